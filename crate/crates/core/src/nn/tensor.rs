use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::{Error, Result};

/// Floating-point element type of tensors.
pub trait Scalar:
    Copy
    + Default
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const ZERO: Self;
    const ONE: Self;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn is_finite(self) -> bool;

    /// `c = op(a) * op(b) + beta * c` for row-major `op(a): m x k`,
    /// `op(b): k x n`, `c: m x n`. `trans_*` marks an operand stored
    /// transposed.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        trans_a: bool,
        b: &[Self],
        trans_b: bool,
        beta: Self,
        c: &mut [Self],
    );

    fn max(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }
}

impl Scalar for f32 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn sqrt(self) -> Self {
        libm::sqrtf(self)
    }

    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }

    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        trans_a: bool,
        b: &[Self],
        trans_b: bool,
        beta: Self,
        c: &mut [Self],
    ) {
        super::gemm::sgemm(m, k, n, a, trans_a, b, trans_b, beta, c)
    }
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: &[Self],
        trans_a: bool,
        b: &[Self],
        trans_b: bool,
        beta: Self,
        c: &mut [Self],
    ) {
        super::gemm::dgemm(m, k, n, a, trans_a, b, trans_b, beta, c)
    }
}

/// Dense row-major tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::Contract(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Self {
            shape,
            data: vec![T::ZERO; n],
        }
    }

    pub fn filled(shape: Vec<usize>, value: T) -> Self {
        let n = shape.iter().product();
        Self {
            shape,
            data: vec![value; n],
        }
    }

    pub fn from_f64(shape: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(shape, data.iter().map(|&v| T::from_f64(v)).collect())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Last-axis width.
    pub fn width(&self) -> usize {
        self.shape.last().copied().unwrap_or(1)
    }

    /// Product of all but the last axis.
    pub fn rows(&self) -> usize {
        self.shape[..self.shape.len().saturating_sub(1)]
            .iter()
            .product()
    }

    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::NonFinite(format!("{what} (element {i})"))),
            None => Ok(()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.to_f64()).collect()
    }

    /// Concatenate two `[.., a]` and `[.., b]` tensors along the last axis.
    pub fn concat_last(left: &Self, right: &Self) -> Result<Self> {
        let (ls, rs) = (left.shape(), right.shape());
        if ls.len() != rs.len() || ls[..ls.len() - 1] != rs[..rs.len() - 1] {
            return Err(Error::Contract(format!(
                "cannot concatenate shapes {ls:?} and {rs:?}"
            )));
        }
        let (a, b) = (left.width(), right.width());
        let mut data = Vec::with_capacity(left.len() + right.len());
        for (l, r) in left.data.chunks_exact(a).zip(right.data.chunks_exact(b)) {
            data.extend_from_slice(l);
            data.extend_from_slice(r);
        }
        let mut shape = ls.to_vec();
        *shape.last_mut().unwrap() = a + b;
        Self::new(shape, data)
    }

    /// Inverse of [`Tensor::concat_last`].
    pub fn split_last(&self, left_width: usize) -> Result<(Self, Self)> {
        let w = self.width();
        if left_width > w {
            return Err(Error::Contract(format!("cannot split width {w} at {left_width}")));
        }
        let rows = self.rows();
        let mut l = Vec::with_capacity(rows * left_width);
        let mut r = Vec::with_capacity(rows * (w - left_width));
        for row in self.data.chunks_exact(w) {
            l.extend_from_slice(&row[..left_width]);
            r.extend_from_slice(&row[left_width..]);
        }
        let mut ls = self.shape.clone();
        let mut rs = self.shape.clone();
        *ls.last_mut().unwrap() = left_width;
        *rs.last_mut().unwrap() = w - left_width;
        Ok((Self::new(ls, l)?, Self::new(rs, r)?))
    }
}
