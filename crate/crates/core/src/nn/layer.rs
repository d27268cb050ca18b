use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tensor::{Scalar, Tensor};
use crate::{Error, Result, RngStream};

/// Running-statistics momentum of batch norm: `running = m * running + (1 - m) * batch`.
pub const BN_MOMENTUM: f64 = 0.9;
pub const BN_EPSILON: f64 = 1e-5;

/// One layer of a network. Every kind acts per time frame except `Conv1d`,
/// which mixes a same-padded window of neighbouring frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    /// Affine map followed by ReLU.
    Dense { width: usize },
    /// Convolution along time, stride 1, same padding, no activation.
    Conv1d { filters: usize, kernel: usize },
    /// Batch norm over (batch x time) per channel, then ReLU.
    BatchnormRelu,
    /// Affine map with identity activation (the embedding head).
    LinearEmbed { width: usize },
    /// Affine map with identity activation (the reconstruction head).
    OutputHead { width: usize },
}

impl LayerSpec {
    pub fn output_width(&self, input_width: usize) -> usize {
        match *self {
            LayerSpec::Dense { width }
            | LayerSpec::LinearEmbed { width }
            | LayerSpec::OutputHead { width } => width,
            LayerSpec::Conv1d { filters, .. } => filters,
            LayerSpec::BatchnormRelu => input_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LayerSpec::Dense { width }
            | LayerSpec::LinearEmbed { width }
            | LayerSpec::OutputHead { width } => width > 0,
            LayerSpec::Conv1d { filters, kernel } => filters > 0 && kernel % 2 == 1,
            LayerSpec::BatchnormRelu => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid layer {self:?}: widths must be positive and kernels odd"
            )))
        }
    }

    /// Shapes of the trainable tensors for a given input width.
    pub fn param_shapes(&self, input_width: usize) -> Vec<Vec<usize>> {
        match *self {
            LayerSpec::Dense { width }
            | LayerSpec::LinearEmbed { width }
            | LayerSpec::OutputHead { width } => vec![vec![input_width, width], vec![width]],
            LayerSpec::Conv1d { filters, kernel } => {
                vec![vec![kernel * input_width, filters], vec![filters]]
            }
            LayerSpec::BatchnormRelu => vec![vec![input_width], vec![input_width]],
        }
    }

    pub fn param_count(&self, input_width: usize) -> usize {
        self.param_shapes(input_width)
            .iter()
            .map(|s| s.iter().product::<usize>())
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Batch norm normalizes with batch statistics.
    Train,
    /// Batch norm normalizes with its frozen running statistics.
    Eval,
}

/// A layer with its parameters.
///
/// Trainable tensors are `[weights, bias]` for affine and conv layers and
/// `[gamma, beta]` for batch norm. Batch norm additionally keeps running mean
/// and variance buffers, which are state but not trained.
#[derive(Clone, Debug)]
pub struct Layer<T> {
    spec: LayerSpec,
    input_width: usize,
    params: Vec<Tensor<T>>,
    buffers: Vec<Tensor<T>>,
    version: u64,
}

/// Values saved by a forward pass for the matching backward pass.
#[derive(Clone, Debug)]
pub struct LayerCache<T> {
    spec: LayerSpec,
    version: u64,
    input_shape: Vec<usize>,
    mode: Mode,
    saved: Saved<T>,
}

#[derive(Clone, Debug)]
enum Saved<T> {
    /// Layer input, rows x in (for conv: the im2col matrix).
    Affine { input: Vec<T>, output: Option<Vec<T>> },
    BatchNorm {
        xhat: Vec<T>,
        inv_std: Vec<T>,
        output: Vec<T>,
        batch_mean: Vec<T>,
        batch_var: Vec<T>,
    },
}

/// Gradients for one layer's trainable tensors, in parameter order.
pub type LayerGrads<T> = Vec<Tensor<T>>;

/// Equality of the layer's definition and state; the cache version counter
/// is bookkeeping and does not take part.
impl<T: PartialEq> PartialEq for Layer<T> {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.input_width == other.input_width
            && self.params == other.params
            && self.buffers == other.buffers
    }
}

impl<T: Scalar> Layer<T> {
    /// Glorot-uniform weights, zero biases; batch norm starts at identity.
    pub fn new(spec: LayerSpec, input_width: usize, rng: &mut RngStream) -> Result<Self> {
        spec.validate()?;
        if input_width == 0 {
            return Err(Error::Config("layer input width must be positive".into()));
        }
        let shapes = spec.param_shapes(input_width);
        let (params, buffers) = match spec {
            LayerSpec::BatchnormRelu => (
                vec![
                    Tensor::filled(shapes[0].clone(), T::ONE),
                    Tensor::zeros(shapes[1].clone()),
                ],
                vec![
                    Tensor::zeros(vec![input_width]),
                    Tensor::filled(vec![input_width], T::ONE),
                ],
            ),
            _ => {
                let (fan_in, fan_out) = (shapes[0][0], shapes[0][1]);
                let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
                let w: Vec<T> = (0..fan_in * fan_out)
                    .map(|_| T::from_f64(rng.uniform_range(-limit, limit)))
                    .collect();
                (
                    vec![Tensor::new(shapes[0].clone(), w)?, Tensor::zeros(shapes[1].clone())],
                    Vec::new(),
                )
            }
        };
        Ok(Self {
            spec,
            input_width,
            params,
            buffers,
            version: 0,
        })
    }

    /// Assemble a layer from explicit tensors, checking their shapes.
    pub fn from_parts(
        spec: LayerSpec,
        input_width: usize,
        params: Vec<Tensor<T>>,
        buffers: Vec<Tensor<T>>,
    ) -> Result<Self> {
        spec.validate()?;
        let shapes = spec.param_shapes(input_width);
        let shapes_ok = params.len() == shapes.len()
            && params.iter().zip(&shapes).all(|(p, s)| p.shape() == s.as_slice());
        let buffers_ok = match spec {
            LayerSpec::BatchnormRelu => {
                buffers.len() == 2 && buffers.iter().all(|b| b.shape() == [input_width])
            }
            _ => buffers.is_empty(),
        };
        if !shapes_ok || !buffers_ok {
            return Err(Error::Contract(format!(
                "tensors do not match layer {spec:?} with input width {input_width}"
            )));
        }
        Ok(Self {
            spec,
            input_width,
            params,
            buffers,
            version: 0,
        })
    }

    pub fn spec(&self) -> LayerSpec {
        self.spec
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.spec.output_width(self.input_width)
    }

    pub fn params(&self) -> &[Tensor<T>] {
        &self.params
    }

    /// Mutable parameters; bumps the version so older caches become stale.
    pub fn params_mut(&mut self) -> &mut [Tensor<T>] {
        self.version += 1;
        &mut self.params
    }

    pub fn buffers(&self) -> &[Tensor<T>] {
        &self.buffers
    }

    pub fn buffers_mut(&mut self) -> &mut [Tensor<T>] {
        &mut self.buffers
    }

    fn check_input(&self, input: &Tensor<T>) -> Result<(usize, usize)> {
        let shape = input.shape();
        if shape.len() != 3 || shape[2] != self.input_width {
            return Err(Error::Contract(format!(
                "layer {:?} expects [batch, time, {}], got {shape:?}",
                self.spec, self.input_width
            )));
        }
        input.ensure_finite("layer input")?;
        Ok((shape[0], shape[1]))
    }

    /// Forward pass. Pure: batch-norm running statistics are not touched
    /// here (see [`Layer::update_running_stats`]).
    pub fn forward(&self, input: &Tensor<T>, mode: Mode) -> Result<(Tensor<T>, LayerCache<T>)> {
        let (batch, time) = self.check_input(input)?;
        let rows = batch * time;
        let cin = self.input_width;
        let cout = self.output_width();
        let out_shape = vec![batch, time, cout];
        let (output, saved) = match self.spec {
            LayerSpec::Dense { .. } | LayerSpec::LinearEmbed { .. } | LayerSpec::OutputHead { .. } => {
                let mut y = self.affine(input.data(), rows, cin)?;
                let relu = matches!(self.spec, LayerSpec::Dense { .. });
                if relu {
                    for v in y.iter_mut() {
                        if *v < T::ZERO {
                            *v = T::ZERO;
                        }
                    }
                }
                let saved = Saved::Affine {
                    input: input.data().to_vec(),
                    output: relu.then(|| y.clone()),
                };
                (y, saved)
            }
            LayerSpec::Conv1d { kernel, .. } => {
                let cols = im2col(input.data(), batch, time, cin, kernel);
                let y = self.affine(&cols, rows, kernel * cin)?;
                (y, Saved::Affine { input: cols, output: None })
            }
            LayerSpec::BatchnormRelu => self.batchnorm_forward(input.data(), rows, cin, mode),
        };
        let output = Tensor::new(out_shape, output)?;
        output.ensure_finite("layer output")?;
        Ok((
            output,
            LayerCache {
                spec: self.spec,
                version: self.version,
                input_shape: input.shape().to_vec(),
                mode,
                saved,
            },
        ))
    }

    fn affine(&self, x: &[T], rows: usize, k: usize) -> Result<Vec<T>> {
        let (w, b) = (&self.params[0], &self.params[1]);
        let n = b.len();
        let mut y = Vec::with_capacity(rows * n);
        for _ in 0..rows {
            y.extend_from_slice(b.data());
        }
        T::gemm(rows, k, n, x, false, w.data(), false, T::ONE, &mut y);
        Ok(y)
    }

    fn batchnorm_forward(&self, x: &[T], rows: usize, c: usize, mode: Mode) -> (Vec<T>, Saved<T>) {
        let (gamma, beta) = (self.params[0].data(), self.params[1].data());
        let eps = T::from_f64(BN_EPSILON);
        let (mean, var) = match mode {
            Mode::Train => column_moments(x, rows, c),
            Mode::Eval => (self.buffers[0].data().to_vec(), self.buffers[1].data().to_vec()),
        };
        let inv_std: Vec<T> = var.iter().map(|&v| T::ONE / (v + eps).sqrt()).collect();
        let mut xhat = Vec::with_capacity(rows * c);
        let mut y = Vec::with_capacity(rows * c);
        for row in x.chunks_exact(c) {
            for j in 0..c {
                let h = (row[j] - mean[j]) * inv_std[j];
                xhat.push(h);
                let z = gamma[j] * h + beta[j];
                y.push(if z > T::ZERO { z } else { T::ZERO });
            }
        }
        let saved = Saved::BatchNorm {
            xhat,
            inv_std,
            output: y.clone(),
            batch_mean: mean,
            batch_var: var,
        };
        (y, saved)
    }

    /// Fold a train-mode cache's batch statistics into the running buffers.
    pub fn update_running_stats(&mut self, cache: &LayerCache<T>) {
        if let (
            Saved::BatchNorm {
                batch_mean,
                batch_var,
                ..
            },
            Mode::Train,
        ) = (&cache.saved, cache.mode)
        {
            let m = T::from_f64(BN_MOMENTUM);
            let one_minus = T::from_f64(1.0 - BN_MOMENTUM);
            let (rm, rv) = self.buffers.split_at_mut(1);
            for (r, &b) in rm[0].data_mut().iter_mut().zip(batch_mean) {
                *r = m * *r + one_minus * b;
            }
            for (r, &b) in rv[0].data_mut().iter_mut().zip(batch_var) {
                *r = m * *r + one_minus * b;
            }
        }
    }

    /// Exact gradients of the layer map for `grad_out`.
    pub fn backward(
        &self,
        cache: &LayerCache<T>,
        grad_out: &Tensor<T>,
    ) -> Result<(Tensor<T>, LayerGrads<T>)> {
        if cache.spec != self.spec || cache.version != self.version {
            return Err(Error::Contract(format!(
                "stale or foreign cache for layer {:?}",
                self.spec
            )));
        }
        let (batch, time) = (cache.input_shape[0], cache.input_shape[1]);
        let rows = batch * time;
        let cin = self.input_width;
        let cout = self.output_width();
        if grad_out.shape() != [batch, time, cout] {
            return Err(Error::Contract(format!(
                "gradient shape {:?} does not match layer output [{batch}, {time}, {cout}]",
                grad_out.shape()
            )));
        }
        grad_out.ensure_finite("output gradient")?;
        let g = grad_out.data();
        let (grad_in, grads) = match (&cache.saved, self.spec) {
            (Saved::Affine { input, output }, LayerSpec::Conv1d { kernel, .. }) => {
                debug_assert!(output.is_none());
                let (dcols, grads) = self.affine_backward(input, g, rows, kernel * cin)?;
                (col2im(&dcols, batch, time, cin, kernel), grads)
            }
            (Saved::Affine { input, output }, _) => {
                let masked;
                let g = match output {
                    Some(y) => {
                        masked = g
                            .iter()
                            .zip(y)
                            .map(|(&gv, &yv)| if yv > T::ZERO { gv } else { T::ZERO })
                            .collect::<Vec<T>>();
                        &masked[..]
                    }
                    None => g,
                };
                self.affine_backward(input, g, rows, cin)?
            }
            (
                Saved::BatchNorm {
                    xhat,
                    inv_std,
                    output,
                    ..
                },
                LayerSpec::BatchnormRelu,
            ) => self.batchnorm_backward(g, xhat, inv_std, output, rows, cin, cache.mode)?,
            _ => return Err(Error::Contract("cache kind does not match layer".into())),
        };
        let grad_in = Tensor::new(cache.input_shape.clone(), grad_in)?;
        Ok((grad_in, grads))
    }

    fn affine_backward(
        &self,
        x: &[T],
        g: &[T],
        rows: usize,
        k: usize,
    ) -> Result<(Vec<T>, LayerGrads<T>)> {
        let w = &self.params[0];
        let n = w.shape()[1];
        let mut dw = vec![T::ZERO; k * n];
        T::gemm(k, rows, n, x, true, g, false, T::ZERO, &mut dw);
        let mut db = vec![T::ZERO; n];
        for row in g.chunks_exact(n) {
            for (d, &v) in db.iter_mut().zip(row) {
                *d += v;
            }
        }
        let mut dx = vec![T::ZERO; rows * k];
        T::gemm(rows, n, k, g, false, w.data(), true, T::ZERO, &mut dx);
        Ok((
            dx,
            vec![Tensor::new(vec![k, n], dw)?, Tensor::new(vec![n], db)?],
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn batchnorm_backward(
        &self,
        g: &[T],
        xhat: &[T],
        inv_std: &[T],
        y: &[T],
        rows: usize,
        c: usize,
        mode: Mode,
    ) -> Result<(Vec<T>, LayerGrads<T>)> {
        let gamma = self.params[0].data();
        // Gradient through the ReLU, then through the affine gamma/beta.
        let dz: Vec<T> = g
            .iter()
            .zip(y)
            .map(|(&gv, &yv)| if yv > T::ZERO { gv } else { T::ZERO })
            .collect();
        let mut dgamma = vec![T::ZERO; c];
        let mut dbeta = vec![T::ZERO; c];
        for (dzr, xr) in dz.chunks_exact(c).zip(xhat.chunks_exact(c)) {
            for j in 0..c {
                dgamma[j] += dzr[j] * xr[j];
                dbeta[j] += dzr[j];
            }
        }
        let mut dx = Vec::with_capacity(rows * c);
        match mode {
            Mode::Train => {
                // dx = inv_std / N * (N dxhat - sum(dxhat) - xhat * sum(dxhat * xhat))
                // with dxhat = dz * gamma, so the sums are gamma * dbeta and gamma * dgamma.
                let n = T::from_f64(rows as f64);
                for (dzr, xr) in dz.chunks_exact(c).zip(xhat.chunks_exact(c)) {
                    for j in 0..c {
                        let v = gamma[j] * inv_std[j] / n
                            * (n * dzr[j] - dbeta[j] - xr[j] * dgamma[j]);
                        dx.push(v);
                    }
                }
            }
            Mode::Eval => {
                for dzr in dz.chunks_exact(c) {
                    for j in 0..c {
                        dx.push(dzr[j] * gamma[j] * inv_std[j]);
                    }
                }
            }
        }
        Ok((
            dx,
            vec![Tensor::new(vec![c], dgamma)?, Tensor::new(vec![c], dbeta)?],
        ))
    }
}

/// Per-column mean and biased variance of a rows x c matrix.
fn column_moments<T: Scalar>(x: &[T], rows: usize, c: usize) -> (Vec<T>, Vec<T>) {
    let mut mean = vec![T::ZERO; c];
    for row in x.chunks_exact(c) {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = T::from_f64(rows as f64);
    for m in mean.iter_mut() {
        *m = *m / n;
    }
    let mut var = vec![T::ZERO; c];
    for row in x.chunks_exact(c) {
        for j in 0..c {
            let d = row[j] - mean[j];
            var[j] += d * d;
        }
    }
    for v in var.iter_mut() {
        *v = *v / n;
    }
    (mean, var)
}

/// `[batch, time, c]` to `[batch * time, kernel * c]`, zero-padded at the
/// sequence edges. Column block `o` holds frame `t + o - kernel / 2`.
fn im2col<T: Scalar>(x: &[T], batch: usize, time: usize, c: usize, kernel: usize) -> Vec<T> {
    let half = kernel / 2;
    let width = kernel * c;
    let mut cols = vec![T::ZERO; batch * time * width];
    for b in 0..batch {
        for t in 0..time {
            let dst = &mut cols[(b * time + t) * width..(b * time + t + 1) * width];
            for o in 0..kernel {
                let src_t = t as isize + o as isize - half as isize;
                if src_t >= 0 && (src_t as usize) < time {
                    let s = (b * time + src_t as usize) * c;
                    dst[o * c..(o + 1) * c].copy_from_slice(&x[s..s + c]);
                }
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatter-add column gradients back onto frames.
fn col2im<T: Scalar>(dcols: &[T], batch: usize, time: usize, c: usize, kernel: usize) -> Vec<T> {
    let half = kernel / 2;
    let width = kernel * c;
    let mut dx = vec![T::ZERO; batch * time * c];
    for b in 0..batch {
        for t in 0..time {
            let src = &dcols[(b * time + t) * width..(b * time + t + 1) * width];
            for o in 0..kernel {
                let dst_t = t as isize + o as isize - half as isize;
                if dst_t >= 0 && (dst_t as usize) < time {
                    let d = (b * time + dst_t as usize) * c;
                    for (acc, &v) in dx[d..d + c].iter_mut().zip(&src[o * c..(o + 1) * c]) {
                        *acc += v;
                    }
                }
            }
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_tensor(shape: Vec<usize>, rng: &mut RngStream) -> Tensor<f64> {
        let n = shape.iter().product();
        Tensor::new(shape, (0..n).map(|_| rng.normal()).collect()).unwrap()
    }

    #[test]
    fn dense_identity_weights() {
        let mut rng = RngStream::new(1);
        let spec = LayerSpec::LinearEmbed { width: 4 };
        let mut layer = Layer::<f64>::new(spec, 4, &mut rng).unwrap();
        let mut eye = vec![0.0; 16];
        for i in 0..4 {
            eye[i * 4 + i] = 1.0;
        }
        layer.params_mut()[0] = Tensor::new(vec![4, 4], eye).unwrap();
        let x = random_tensor(vec![2, 3, 4], &mut rng);
        let (y, _) = layer.forward(&x, Mode::Train).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn relu_zeroes_negative_preactivations() {
        let mut rng = RngStream::new(2);
        let mut layer = Layer::<f64>::new(LayerSpec::Dense { width: 3 }, 2, &mut rng).unwrap();
        layer.params_mut()[0] = Tensor::new(vec![2, 3], vec![1.0; 6]).unwrap();
        let x = Tensor::new(vec![1, 2, 2], vec![-1.0, -2.0, -0.5, -0.1]).unwrap();
        let (y, _) = layer.forward(&x, Mode::Train).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn conv_delta_kernel_is_identity() {
        let mut rng = RngStream::new(3);
        let c = 5;
        let mut layer =
            Layer::<f64>::new(LayerSpec::Conv1d { filters: c, kernel: 3 }, c, &mut rng).unwrap();
        // Taps ordered [t-1, t, t+1]; identity on the centre tap only.
        let mut w = vec![0.0; 3 * c * c];
        for i in 0..c {
            w[(c + i) * c + i] = 1.0;
        }
        layer.params_mut()[0] = Tensor::new(vec![3 * c, c], w).unwrap();
        let x = random_tensor(vec![2, 7, c], &mut rng);
        let (y, _) = layer.forward(&x, Mode::Train).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn conv_shift_kernel_pads_with_zeros() {
        let mut rng = RngStream::new(4);
        let mut layer =
            Layer::<f64>::new(LayerSpec::Conv1d { filters: 1, kernel: 3 }, 1, &mut rng).unwrap();
        // Output t reads input t-1.
        layer.params_mut()[0] = Tensor::new(vec![3, 1], vec![1.0, 0.0, 0.0]).unwrap();
        let x = Tensor::new(vec![1, 4, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (y, _) = layer.forward(&x, Mode::Train).unwrap();
        assert_eq!(y.data(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn zero_grad_out_gives_zero_grads() {
        let mut rng = RngStream::new(5);
        let specs = [
            LayerSpec::Dense { width: 4 },
            LayerSpec::Conv1d { filters: 4, kernel: 3 },
            LayerSpec::BatchnormRelu,
            LayerSpec::LinearEmbed { width: 4 },
            LayerSpec::OutputHead { width: 4 },
        ];
        for spec in specs {
            let layer = Layer::<f64>::new(spec, 3, &mut rng).unwrap();
            let x = random_tensor(vec![2, 5, 3], &mut rng);
            let (y, cache) = layer.forward(&x, Mode::Train).unwrap();
            let (gi, gp) = layer.backward(&cache, &Tensor::zeros(y.shape().to_vec())).unwrap();
            assert!(gi.data().iter().all(|&v| v == 0.0), "{spec:?}");
            assert!(gp.iter().all(|t| t.data().iter().all(|&v| v == 0.0)), "{spec:?}");
        }
    }

    #[test]
    fn shape_mismatch_is_contract_error() {
        let mut rng = RngStream::new(6);
        let layer = Layer::<f64>::new(LayerSpec::Dense { width: 4 }, 3, &mut rng).unwrap();
        let x = random_tensor(vec![2, 5, 2], &mut rng);
        assert!(matches!(layer.forward(&x, Mode::Train), Err(Error::Contract(_))));
        let x = random_tensor(vec![2, 5, 3], &mut rng);
        let (_, cache) = layer.forward(&x, Mode::Train).unwrap();
        let bad = Tensor::zeros(vec![2, 5, 3]);
        assert!(matches!(layer.backward(&cache, &bad), Err(Error::Contract(_))));
    }

    #[test]
    fn stale_cache_is_rejected() {
        let mut rng = RngStream::new(7);
        let mut layer = Layer::<f64>::new(LayerSpec::Dense { width: 4 }, 3, &mut rng).unwrap();
        let x = random_tensor(vec![1, 2, 3], &mut rng);
        let (y, cache) = layer.forward(&x, Mode::Train).unwrap();
        layer.params_mut()[1].data_mut()[0] += 1.0;
        let g = Tensor::zeros(y.shape().to_vec());
        assert!(matches!(layer.backward(&cache, &g), Err(Error::Contract(_))));
        let other = Layer::<f64>::new(LayerSpec::OutputHead { width: 4 }, 3, &mut rng).unwrap();
        assert!(other.backward(&cache, &g).is_err());
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut rng = RngStream::new(8);
        let layer = Layer::<f64>::new(LayerSpec::Dense { width: 2 }, 2, &mut rng).unwrap();
        let x = Tensor::new(vec![1, 1, 2], vec![f64::NAN, 0.0]).unwrap();
        assert!(matches!(layer.forward(&x, Mode::Eval), Err(Error::NonFinite(_))));
    }

    #[test]
    fn batchnorm_train_normalizes_and_updates_running_stats() {
        let mut rng = RngStream::new(9);
        let mut layer = Layer::<f64>::new(LayerSpec::BatchnormRelu, 2, &mut rng).unwrap();
        let x = Tensor::new(vec![1, 4, 2], vec![1.0, 10.0, 2.0, 20.0, 3.0, 30.0, 4.0, 40.0]).unwrap();
        let (y, cache) = layer.forward(&x, Mode::Train).unwrap();
        // Channel 0 normalizes to [-1.34, -0.45, 0.45, 1.34]; ReLU keeps the top half.
        assert_eq!(y.data()[0], 0.0);
        assert!((y.data()[6] - 1.5 / libm::sqrt(1.25 + BN_EPSILON)).abs() < 1e-12);
        layer.update_running_stats(&cache);
        assert!((layer.buffers()[0].data()[0] - 0.25).abs() < 1e-12);
        assert!((layer.buffers()[1].data()[0] - (0.9 + 0.1 * 1.25)).abs() < 1e-12);
        // Eval mode ignores the batch and is repeatable.
        let (a, _) = layer.forward(&x, Mode::Eval).unwrap();
        let (b, _) = layer.forward(&x, Mode::Eval).unwrap();
        assert_eq!(a, b);
    }
}
