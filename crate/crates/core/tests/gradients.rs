//! Central finite-difference checks of every layer kind and the loss, in f64.

use autodecompose_core::nn::{mse_loss, Layer, LayerSpec, Mode, Tensor};
use autodecompose_core::RngStream;

const H: f64 = 1e-5;
const INSTANCES: u64 = 20;

fn random_tensor(shape: Vec<usize>, rng: &mut RngStream) -> Tensor<f64> {
    let n = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    Tensor::new(shape, data).unwrap()
}

/// Worst-case relative error `|a - n|_inf / max(|a|_inf, |n|_inf)` of one tensor.
fn rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max);
    let scale = analytic
        .iter()
        .chain(numeric)
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Scalar probe `L = <layer(x), r>`, so `dL/dy = r`.
fn probe_loss(layer: &Layer<f64>, x: &Tensor<f64>, r: &Tensor<f64>, mode: Mode) -> f64 {
    let (y, _) = layer.forward(x, mode).unwrap();
    y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

fn numeric_grad(values: &mut [f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let v = values[i];
        values[i] = v + H;
        let up = f(values);
        values[i] = v - H;
        let down = f(values);
        values[i] = v;
        g.push((up - down) / (2.0 * H));
    }
    g
}

/// Worst relative error over the input gradient and every parameter gradient.
fn check_layer(spec: LayerSpec, cin: usize, mode: Mode, seed: u64) -> f64 {
    let mut rng = RngStream::new(seed);
    let mut layer = Layer::<f64>::new(spec, cin, &mut rng).unwrap();
    // Randomize everything, including batch-norm gamma/beta and running stats.
    for p in layer.params_mut() {
        for v in p.data_mut() {
            *v = rng.normal();
        }
    }
    for (i, b) in layer.buffers_mut().iter_mut().enumerate() {
        for v in b.data_mut() {
            *v = if i == 0 { rng.normal() } else { rng.uniform_range(0.5, 2.0) };
        }
    }
    let (batch, time) = (1 + rng.index(3), 3 + rng.index(5));
    let x = random_tensor(vec![batch, time, cin], &mut rng);
    let r = random_tensor(vec![batch, time, spec.output_width(cin)], &mut rng);

    let (_, cache) = layer.forward(&x, mode).unwrap();
    let (gx, gparams) = layer.backward(&cache, &r).unwrap();

    let mut worst = {
        let mut xv = x.data().to_vec();
        let num = numeric_grad(&mut xv, |v| {
            let xt = Tensor::new(x.shape().to_vec(), v.to_vec()).unwrap();
            probe_loss(&layer, &xt, &r, mode)
        });
        rel_error(gx.data(), &num)
    };
    for (pi, g) in gparams.iter().enumerate() {
        let mut pv = layer.params()[pi].data().to_vec();
        let num = numeric_grad(&mut pv, |v| {
            let mut l = layer.clone();
            l.params_mut()[pi].data_mut().copy_from_slice(v);
            probe_loss(&l, &x, &r, mode)
        });
        worst = worst.max(rel_error(g.data(), &num));
    }
    worst
}

fn suite(spec: LayerSpec, cin: usize, mode: Mode, bound: f64) {
    for i in 0..INSTANCES {
        let err = check_layer(spec, cin, mode, 1000 + i);
        assert!(err < bound, "{spec:?} {mode:?} instance {i}: relative error {err:e}");
    }
}

#[test]
fn dense() {
    suite(LayerSpec::Dense { width: 6 }, 5, Mode::Train, 1e-6);
}

#[test]
fn linear_embed() {
    suite(LayerSpec::LinearEmbed { width: 4 }, 7, Mode::Train, 1e-6);
}

#[test]
fn output_head() {
    suite(LayerSpec::OutputHead { width: 5 }, 6, Mode::Train, 1e-6);
}

#[test]
fn conv1d() {
    suite(LayerSpec::Conv1d { filters: 5, kernel: 3 }, 4, Mode::Train, 1e-5);
    suite(LayerSpec::Conv1d { filters: 3, kernel: 5 }, 2, Mode::Train, 1e-5);
}

#[test]
fn batchnorm_relu_train() {
    suite(LayerSpec::BatchnormRelu, 5, Mode::Train, 1e-5);
}

#[test]
fn batchnorm_relu_eval() {
    suite(LayerSpec::BatchnormRelu, 5, Mode::Eval, 1e-5);
}

#[test]
fn mse() {
    for i in 0..INSTANCES {
        let mut rng = RngStream::new(77 + i);
        let shape = vec![2, 3, 4];
        let p = random_tensor(shape.clone(), &mut rng);
        let t = random_tensor(shape.clone(), &mut rng);
        let (_, g) = mse_loss(&p, &t).unwrap();
        let mut pv = p.data().to_vec();
        let num = numeric_grad(&mut pv, |v| {
            let pt = Tensor::new(shape.clone(), v.to_vec()).unwrap();
            mse_loss(&pt, &t).unwrap().0
        });
        let err = rel_error(g.data(), &num);
        assert!(err < 1e-8, "instance {i}: relative error {err:e}");
    }
}

#[test]
fn zero_upstream_gradient_gives_zero_gradients() {
    let mut rng = RngStream::new(5);
    for spec in [
        LayerSpec::Dense { width: 3 },
        LayerSpec::Conv1d { filters: 3, kernel: 3 },
        LayerSpec::BatchnormRelu,
        LayerSpec::LinearEmbed { width: 2 },
        LayerSpec::OutputHead { width: 2 },
    ] {
        let layer = Layer::<f64>::new(spec, 4, &mut rng).unwrap();
        let x = random_tensor(vec![2, 5, 4], &mut rng);
        let (y, cache) = layer.forward(&x, Mode::Train).unwrap();
        let (gx, gp) = layer.backward(&cache, &Tensor::zeros(y.shape().to_vec())).unwrap();
        assert!(gx.data().iter().all(|&v| v == 0.0), "{spec:?}");
        assert!(gp.iter().all(|g| g.data().iter().all(|&v| v == 0.0)), "{spec:?}");
    }
}
