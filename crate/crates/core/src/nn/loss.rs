use alloc::format;

use super::tensor::{Scalar, Tensor};
use crate::{Error, Result};

/// Mean squared error over all cells and its gradient `2 (pred - target) / N`.
pub fn mse_loss<T: Scalar>(pred: &Tensor<T>, target: &Tensor<T>) -> Result<(f64, Tensor<T>)> {
    if pred.shape() != target.shape() {
        return Err(Error::Contract(format!(
            "mse shapes differ: {:?} vs {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    pred.ensure_finite("prediction")?;
    target.ensure_finite("target")?;
    let n = pred.len().max(1) as f64;
    let scale = T::from_f64(2.0 / n);
    let mut sum = 0.0;
    let grad = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            let d = p - t;
            let df = d.to_f64();
            sum += df * df;
            scale * d
        })
        .collect();
    Ok((sum / n, Tensor::new(pred.shape().to_vec(), grad)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_at_target() {
        let t = Tensor::<f64>::from_f64(vec![2, 2], &[1.0, -2.0, 3.0, 0.5]).unwrap();
        let (l, g) = mse_loss(&t, &t).unwrap();
        assert_eq!(l, 0.0);
        assert!(g.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_offset_gives_unit_loss() {
        let t = Tensor::<f64>::from_f64(vec![3, 2], &[1.0, -2.0, 3.0, 0.5, 7.0, 8.0]).unwrap();
        let p = Tensor::<f64>::from_f64(vec![3, 2], &[2.0, -1.0, 4.0, 1.5, 8.0, 9.0]).unwrap();
        assert_eq!(mse_loss(&p, &t).unwrap().0, 1.0);
    }

    #[test]
    fn shape_mismatch() {
        let a = Tensor::<f64>::zeros(vec![2, 2]);
        let b = Tensor::<f64>::zeros(vec![4]);
        assert!(matches!(mse_loss(&a, &b), Err(Error::Contract(_))));
    }
}
