use alloc::format;
use alloc::vec::Vec;

use super::layer::{Layer, LayerCache, LayerSpec, Mode};
use super::tensor::{Scalar, Tensor};
use crate::{Error, Result, RngStream};

/// A feed-forward stack of layers over `[batch, time, channels]` tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    input_width: usize,
    layers: Vec<Layer<T>>,
}

/// Per-layer caches of one forward pass.
#[derive(Clone, Debug)]
pub struct NetworkCache<T> {
    layers: Vec<LayerCache<T>>,
}

impl<T: Scalar> Network<T> {
    /// Initialize a stack; each layer draws its weights from `rng` in order.
    pub fn new(input_width: usize, specs: &[LayerSpec], rng: &mut RngStream) -> Result<Self> {
        let mut layers = Vec::with_capacity(specs.len());
        let mut width = input_width;
        for &spec in specs {
            let layer = Layer::new(spec, width, rng)?;
            width = layer.output_width();
            layers.push(layer);
        }
        Ok(Self {
            input_width,
            layers,
        })
    }

    pub fn from_layers(input_width: usize, layers: Vec<Layer<T>>) -> Result<Self> {
        let mut width = input_width;
        for layer in &layers {
            if layer.input_width() != width {
                return Err(Error::Contract(format!(
                    "layer {:?} takes width {}, previous layer gives {width}",
                    layer.spec(),
                    layer.input_width()
                )));
            }
            width = layer.output_width();
        }
        Ok(Self {
            input_width,
            layers,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers
            .last()
            .map_or(self.input_width, |l| l.output_width())
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec()).collect()
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.params())
            .map(|t| t.len())
            .sum()
    }

    /// Trainable tensors in layer order.
    pub fn params(&self) -> impl Iterator<Item = &Tensor<T>> {
        self.layers.iter().flat_map(|l| l.params())
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut Tensor<T>> {
        self.layers.iter_mut().flat_map(|l| l.params_mut().iter_mut())
    }

    /// Forward pass; in train mode batch-norm running statistics are updated.
    pub fn forward(&mut self, input: &Tensor<T>, mode: Mode) -> Result<(Tensor<T>, NetworkCache<T>)> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in self.layers.iter_mut() {
            let (y, cache) = layer.forward(&x, mode)?;
            if mode == Mode::Train {
                layer.update_running_stats(&cache);
            }
            caches.push(cache);
            x = y;
        }
        Ok((x, NetworkCache { layers: caches }))
    }

    /// Eval-mode forward without caches or state changes.
    pub fn infer(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        let mut x = input.clone();
        for layer in &self.layers {
            x = layer.forward(&x, Mode::Eval)?.0;
        }
        Ok(x)
    }

    /// Backpropagate; returns the input gradient and parameter gradients in
    /// [`Network::params`] order.
    pub fn backward(
        &self,
        cache: &NetworkCache<T>,
        grad_out: &Tensor<T>,
    ) -> Result<(Tensor<T>, Vec<Tensor<T>>)> {
        if cache.layers.len() != self.layers.len() {
            return Err(Error::Contract("cache depth does not match network".into()));
        }
        let mut per_layer = Vec::with_capacity(self.layers.len());
        let mut g = grad_out.clone();
        for (layer, c) in self.layers.iter().zip(&cache.layers).rev() {
            let (gi, gp) = layer.backward(c, &g)?;
            per_layer.push(gp);
            g = gi;
        }
        per_layer.reverse();
        Ok((g, per_layer.into_iter().flatten().collect()))
    }
}
