//! Pointwise-evaluable functions of `x` in one or two dimensions.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

type EvalFn = dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync;

/// A complex-valued function of a point; real functions embed with zero
/// imaginary part. Points are slices of length `dim`.
#[derive(Clone)]
pub struct ScalarFn {
    dim: usize,
    inner: Arc<EvalFn>,
}

impl ScalarFn {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        ScalarFn {
            dim,
            inner: Arc::new(move |x| Ok(f(x))),
        }
    }

    pub fn real<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(dim, move |x| Complex64::new(f(x), 0.0))
    }

    pub fn fallible<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        ScalarFn {
            dim,
            inner: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let v = (self.inner)(x)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation {
                point: x.to_vec(),
                reason: format!("non-finite value {v}"),
            });
        }
        Ok(v)
    }

    /// Pointwise product with another function of the same dimension.
    pub fn times(&self, other: &ScalarFn) -> ScalarFn {
        let (a, b) = (self.clone(), other.clone());
        ScalarFn::fallible(self.dim, move |x| Ok(a.eval(x)? * b.eval(x)?))
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn").field("dim", &self.dim).finish()
    }
}

/// A function of `(x, t)`, used for exact solutions.
#[derive(Clone)]
pub struct SpaceTimeFn {
    dim: usize,
    inner: Arc<dyn Fn(&[f64], f64) -> Complex64 + Send + Sync>,
}

impl SpaceTimeFn {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
    {
        SpaceTimeFn {
            dim,
            inner: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Complex64 {
        (self.inner)(x, t)
    }

    /// Freezes the time argument.
    pub fn at(&self, t: f64) -> ScalarFn {
        let f = self.clone();
        ScalarFn::new(self.dim, move |x| f.eval(x, t))
    }
}

impl fmt::Debug for SpaceTimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceTimeFn").field("dim", &self.dim).finish()
    }
}
