//! Trigonometric polynomials on the scaled torus.
//!
//! A [`Field`] stores the coefficients `a_k`, `|k|_∞ <= N`, of
//! `Σ a_k exp(iπ k·x / L)` in DFT layout (see [`crate::grid`]). Nodal
//! samples are derived on demand through [`transform::inverse`].

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::grid::{layout_index, signed_index, Grid};
use crate::scalar::ScalarFn;
use crate::transform::{self, fft_nd};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Field { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    /// The single Fourier mode `exp(iπ k·x / L)`; `k` has one entry per axis.
    pub fn mode(grid: Grid, k: &[i64]) -> Result<Self> {
        let n = grid.modes();
        if k.len() != grid.dim() || k.iter().any(|ki| ki.unsigned_abs() as usize > n) {
            return Err(Error::param("k", format!("mode {k:?} is outside {grid}")));
        }
        let mut f = Field::zeros(grid);
        let idx = k
            .iter()
            .fold(0, |acc, &ki| acc * grid.axis_len() + layout_index(ki, n));
        f.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Interpolates nodal samples given in DFT layout.
    pub fn from_samples(grid: Grid, samples: &[Complex64]) -> Result<Self> {
        Ok(Field {
            grid,
            coeffs: transform::forward(&grid, samples)?,
        })
    }

    /// The trigonometric interpolant `I_{L,N} f`.
    pub fn interpolate(f: &ScalarFn, grid: Grid) -> Result<Self> {
        if f.dim() != grid.dim() {
            return Err(Error::param(
                "function",
                format!("dimension {} does not match {grid}", f.dim()),
            ));
        }
        let d = grid.dim();
        let samples = (0..grid.len())
            .into_par_iter()
            .map(|i| f.eval(&grid.point(i)[..d]))
            .collect::<Result<Vec<_>>>()?;
        Field::from_samples(grid, &samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of signed mode `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let n = self.grid.modes();
        let idx = k
            .iter()
            .fold(0, |acc, &ki| acc * self.grid.axis_len() + layout_index(ki, n));
        self.coeffs[idx]
    }

    /// Nodal samples in DFT layout.
    pub fn samples(&self) -> Vec<Complex64> {
        transform::inverse(&self.grid, &self.coeffs).expect("length matches grid")
    }

    /// Low-frequency projection onto `|k|_∞ <= m`, on a grid with cutoff `m`.
    pub fn project(&self, m: usize) -> Result<Field> {
        let n = self.grid.modes();
        if m > n {
            return Err(Error::ProjectionCutoff {
                requested: m,
                available: n,
            });
        }
        if m == 0 {
            return Err(Error::param("M", "projection cutoff must be at least 1"));
        }
        let target = self.grid.with(self.grid.half_width(), m)?;
        Ok(Field {
            grid: target,
            coeffs: reindex(&self.coeffs, &self.grid, &target),
        })
    }

    /// Embeds into a grid with a larger cutoff and the same window.
    pub fn pad_to(&self, m: usize) -> Result<Field> {
        let n = self.grid.modes();
        if m < n {
            return self.project(m);
        }
        let target = self.grid.with(self.grid.half_width(), m)?;
        Ok(Field {
            grid: target,
            coeffs: reindex(&self.coeffs, &self.grid, &target),
        })
    }

    /// `‖f‖_{L²(Ω_L)} = (2L)^{d/2} ‖a‖_{ℓ²}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * s).sqrt()
    }

    /// L² distance; fields on different windows are first brought onto the
    /// larger window with [`Field::resample_zero_extend`].
    pub fn l2_distance(&self, other: &Field) -> Result<f64> {
        if self.grid.same_as(&other.grid) {
            return Ok(self.sub(other)?.l2_norm());
        }
        if self.grid.dim() != other.grid.dim() {
            return Err(grid_mismatch(&self.grid, &other.grid));
        }
        let (small, big) = order_by_window(self, other);
        let lifted = small.resample_zero_extend(big.grid.half_width(), big.grid.modes())?;
        Ok(lifted.sub(big)?.l2_norm())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        Field {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &Field) -> Result<()> {
        self.check_same(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Field) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(grid_mismatch(&self.grid, &other.grid))
        }
    }

    /// Value of the trigonometric polynomial at an arbitrary point (periodic).
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let l = self.grid.half_width();
        let n = self.grid.modes();
        let m = self.grid.axis_len();
        match self.grid.dim() {
            1 => horner(&self.coeffs, n, x[0] / l),
            _ => {
                let row: Vec<Complex64> = self
                    .coeffs
                    .chunks(m)
                    .map(|r| horner(r, n, x[1] / l))
                    .collect();
                horner(&row, n, x[0] / l)
            }
        }
    }

    /// Value of the zero extension `E f`: the polynomial inside `(-L, L)^d`,
    /// zero elsewhere.
    pub fn eval_extended(&self, x: &[f64]) -> Complex64 {
        let l = self.grid.half_width();
        if x.iter().any(|xi| xi.abs() >= l) {
            ZERO
        } else {
            self.eval(x)
        }
    }

    /// `I_{L',N'} E f`: zero-extends onto `[-L', L']^d` and interpolates on
    /// the grid with cutoff `N'`.
    ///
    /// Integer window ratios evaluate the old polynomial at the new nodes with
    /// one inverse FFT (exact). Other ratios fall back to direct evaluation.
    pub fn resample_zero_extend(&self, l_new: f64, n_new: usize) -> Result<Field> {
        let l = self.grid.half_width();
        if !(l_new >= l) {
            return Err(Error::WindowShrink { from: l, to: l_new });
        }
        let target = self.grid.with(l_new, n_new)?;
        if l_new == l && n_new >= self.grid.modes() {
            return self.pad_to(n_new);
        }
        let samples = self.zero_extended_samples(&target)?;
        Field::from_samples(target, &samples)
    }

    /// Samples of `E f` at the nodes of a grid whose window contains this one.
    pub fn zero_extended_samples(&self, target: &Grid) -> Result<Vec<Complex64>> {
        let l = self.grid.half_width();
        if target.dim() != self.grid.dim() {
            return Err(grid_mismatch(&self.grid, target));
        }
        if !(target.half_width() >= l) {
            return Err(Error::WindowShrink {
                from: l,
                to: target.half_width(),
            });
        }
        let ratio = target.half_width() / l;
        Ok(if ratio.fract() == 0.0 && ratio < (u32::MAX as f64) {
            self.samples_on_multiple(target, ratio as usize)
        } else {
            log::debug!("resampling {} onto {} by direct evaluation", self.grid, target);
            self.samples_direct(target)
        })
    }

    /// Whether [`Field::zero_extended_samples`] onto `target` takes the exact
    /// FFT path.
    pub fn commensurate_with(&self, target: &Grid) -> bool {
        (target.half_width() / self.grid.half_width()).fract() == 0.0
    }

    // New nodes are x'_m = 2 m r L / M', so exp(iπ k x'_m / L) only depends on
    // k r mod M'. Coefficients are accumulated into those buckets.
    fn samples_on_multiple(&self, target: &Grid, r: usize) -> Vec<Complex64> {
        let n = self.grid.modes();
        let m_old = self.grid.axis_len();
        let m_new = target.axis_len();
        let bucket = |j: usize| (signed_index(j, n) * r as i64).rem_euclid(m_new as i64) as usize;
        let mut buf = vec![ZERO; target.len()];
        match self.grid.dim() {
            1 => {
                for (j, a) in self.coeffs.iter().enumerate() {
                    buf[bucket(j)] += a;
                }
            }
            _ => {
                for (j0, row) in self.coeffs.chunks(m_old).enumerate() {
                    let b0 = bucket(j0) * m_new;
                    for (j1, a) in row.iter().enumerate() {
                        buf[b0 + bucket(j1)] += a;
                    }
                }
            }
        }
        fft_nd(&mut buf, m_new, target.dim(), FftDirection::Inverse);
        self.mask_outside(target, &mut buf);
        buf
    }

    fn samples_direct(&self, target: &Grid) -> Vec<Complex64> {
        let l = self.grid.half_width();
        let n = self.grid.modes();
        let m_old = self.grid.axis_len();
        let m_new = target.axis_len();
        let nodes = target.axis_nodes();
        let inside: Vec<bool> = nodes.iter().map(|x| x.abs() < l).collect();
        let mut out = vec![ZERO; target.len()];
        match self.grid.dim() {
            1 => {
                out.par_iter_mut().enumerate().for_each(|(i, v)| {
                    if inside[i] {
                        *v = horner(&self.coeffs, n, nodes[i] / l);
                    }
                });
            }
            _ => {
                // First along the fast axis: partial[j0][i1].
                let partial: Vec<Vec<Complex64>> = self
                    .coeffs
                    .par_chunks(m_old)
                    .map(|row| {
                        (0..m_new)
                            .map(|i1| {
                                if inside[i1] {
                                    horner(row, n, nodes[i1] / l)
                                } else {
                                    ZERO
                                }
                            })
                            .collect()
                    })
                    .collect();
                out.par_chunks_mut(m_new).enumerate().for_each(|(i0, row)| {
                    if !inside[i0] {
                        return;
                    }
                    let mut column = vec![ZERO; m_old];
                    for (i1, v) in row.iter_mut().enumerate() {
                        if !inside[i1] {
                            continue;
                        }
                        for (j0, c) in column.iter_mut().enumerate() {
                            *c = partial[j0][i1];
                        }
                        *v = horner(&column, n, nodes[i0] / l);
                    }
                });
            }
        }
        out
    }

    fn mask_outside(&self, target: &Grid, buf: &mut [Complex64]) {
        let l = self.grid.half_width();
        let nodes = target.axis_nodes();
        let m = target.axis_len();
        match target.dim() {
            1 => {
                for (v, x) in buf.iter_mut().zip(&nodes) {
                    if x.abs() >= l {
                        *v = ZERO;
                    }
                }
            }
            _ => {
                for (i0, row) in buf.chunks_mut(m).enumerate() {
                    let out0 = nodes[i0].abs() >= l;
                    for (v, x) in row.iter_mut().zip(&nodes) {
                        if out0 || x.abs() >= l {
                            *v = ZERO;
                        }
                    }
                }
            }
        }
    }

    pub fn is_finite(&self) -> std::result::Result<(), usize> {
        match self
            .coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            Some(i) => Err(i),
            None => Ok(()),
        }
    }
}

fn grid_mismatch(a: &Grid, b: &Grid) -> Error {
    Error::GridMismatch {
        left: a.to_string(),
        right: b.to_string(),
    }
}

fn order_by_window<'a>(a: &'a Field, b: &'a Field) -> (&'a Field, &'a Field) {
    let (la, lb) = (a.grid.half_width(), b.grid.half_width());
    if la < lb || (la == lb && a.grid.modes() <= b.grid.modes()) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Copies every mode present in both layouts; the rest are zero.
fn reindex(coeffs: &[Complex64], from: &Grid, to: &Grid) -> Vec<Complex64> {
    let (nf, nt) = (from.modes(), to.modes());
    let keep = nf.min(nt) as i64;
    let mut out = vec![ZERO; to.len()];
    match from.dim() {
        1 => {
            for k in -keep..=keep {
                out[layout_index(k, nt)] = coeffs[layout_index(k, nf)];
            }
        }
        _ => {
            let (mf, mt) = (from.axis_len(), to.axis_len());
            for k0 in -keep..=keep {
                let (rf, rt) = (layout_index(k0, nf) * mf, layout_index(k0, nt) * mt);
                for k1 in -keep..=keep {
                    out[rt + layout_index(k1, nt)] = coeffs[rf + layout_index(k1, nf)];
                }
            }
        }
    }
    out
}

/// `Σ_{|k|<=n} a_k exp(iπ k s)` for DFT-layout `a`, with `s = x / L`.
fn horner(a: &[Complex64], n: usize, s: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, std::f64::consts::PI * s);
    let mut p = a[layout_index(n as i64, n)];
    for k in (-(n as i64)..n as i64).rev() {
        p = p * w + a[layout_index(k, n)];
    }
    p * Complex64::from_polar(1.0, -std::f64::consts::PI * s * n as f64)
}
