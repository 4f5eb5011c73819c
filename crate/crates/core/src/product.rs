//! Pointwise products of trigonometric polynomials.
//!
//! The dealiased product evaluates both factors on a padded grid with at
//! least `4N + 1` points per axis, multiplies, transforms back and keeps
//! `|k|_∞ <= N`. Every mode of the degree-`2N` product is resolved, so the
//! result is the exact low-frequency projection of the product.

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Field;
use crate::grid::{signed_index, Grid};
use crate::transform::{self, fft_nd, smooth_len_at_least};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductMode {
    /// Exact projection via a padded grid.
    #[default]
    Dealiased,
    /// Pointwise product on the native `2N + 1` grid (aliased).
    Collocation,
}

/// Transform sizes and index maps for repeated products on one grid.
#[derive(Debug, Clone)]
pub struct ProductPlan {
    grid: Grid,
    mode: ProductMode,
    len: usize,
}

impl ProductPlan {
    pub fn new(grid: Grid, mode: ProductMode) -> Self {
        let len = match mode {
            ProductMode::Dealiased => smooth_len_at_least(4 * grid.modes() + 1),
            ProductMode::Collocation => grid.axis_len(),
        };
        ProductPlan { grid, mode, len }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mode(&self) -> ProductMode {
        self.mode
    }

    /// Points per axis of the product grid.
    pub fn product_len(&self) -> usize {
        self.len
    }

    fn padded_index(&self, j: usize) -> usize {
        signed_index(j, self.grid.modes()).rem_euclid(self.len as i64) as usize
    }

    /// Samples of `f` on the product grid `x_j = 2 L j / P`.
    pub fn samples(&self, f: &Field) -> Result<Vec<Complex64>> {
        f.check_same(&Field::zeros(self.grid))?;
        let m = self.grid.axis_len();
        let p = self.len;
        let mut buf = vec![ZERO; p.pow(self.grid.dim() as u32)];
        let coeffs = f.coeffs();
        match self.grid.dim() {
            1 => {
                for (j, a) in coeffs.iter().enumerate() {
                    buf[self.padded_index(j)] = *a;
                }
            }
            _ => {
                for (j0, row) in coeffs.chunks(m).enumerate() {
                    let base = self.padded_index(j0) * p;
                    for (j1, a) in row.iter().enumerate() {
                        buf[base + self.padded_index(j1)] = *a;
                    }
                }
            }
        }
        fft_nd(&mut buf, p, self.grid.dim(), FftDirection::Inverse);
        Ok(buf)
    }

    /// Transforms product-grid samples and keeps `|k|_∞ <= N`.
    pub fn truncate(&self, mut buf: Vec<Complex64>) -> Field {
        let p = self.len;
        let dim = self.grid.dim();
        fft_nd(&mut buf, p, dim, FftDirection::Forward);
        let scale = 1.0 / (p.pow(dim as u32)) as f64;
        let m = self.grid.axis_len();
        let mut coeffs = vec![ZERO; self.grid.len()];
        match dim {
            1 => {
                for (j, c) in coeffs.iter_mut().enumerate() {
                    *c = buf[self.padded_index(j)] * scale;
                }
            }
            _ => {
                for (j0, row) in coeffs.chunks_mut(m).enumerate() {
                    let base = self.padded_index(j0) * p;
                    for (j1, c) in row.iter_mut().enumerate() {
                        *c = buf[base + self.padded_index(j1)] * scale;
                    }
                }
            }
        }
        Field::from_coeffs(self.grid, coeffs).expect("length matches grid")
    }

    /// Product of a factor already sampled on the product grid with `f`.
    pub fn multiply_sampled(&self, factor: &[Complex64], f: &Field) -> Result<Field> {
        let mut buf = self.samples(f)?;
        for (b, v) in buf.iter_mut().zip(factor) {
            *b *= v;
        }
        Ok(self.truncate(buf))
    }

    pub fn multiply(&self, f: &Field, g: &Field) -> Result<Field> {
        let fs = self.samples(f)?;
        self.multiply_sampled(&fs, g)
    }
}

/// `P_{L,N}(f g)` computed exactly on a padded grid.
pub fn multiply_dealiased(f: &Field, g: &Field) -> Result<Field> {
    f.check_same(g)?;
    ProductPlan::new(*f.grid(), ProductMode::Dealiased).multiply(f, g)
}

/// `I_{L,N}(f g)`: the product formed on the native collocation nodes.
pub fn multiply_collocated(f: &Field, g: &Field) -> Result<Field> {
    f.check_same(g)?;
    let a = f.samples();
    let b = g.samples();
    let prod: Vec<_> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Field::from_coeffs(*f.grid(), transform::forward(f.grid(), &prod)?)
}
