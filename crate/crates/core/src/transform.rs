//! Discrete Fourier transforms on odd-length (or padded) tensor grids.
//!
//! Plans come from one process-wide planner so that repeated transforms of
//! the same length reuse twiddles. Any length is supported; padded grids
//! prefer 7-smooth lengths (see [`smooth_len_at_least`]).

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().unwrap_or_else(|e| e.into_inner());
    p.plan_fft(len, direction)
}

/// Smallest integer `>= min` whose prime factors are all at most 7.
pub fn smooth_len_at_least(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut r = n;
        for p in [2, 3, 5, 7] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

// Rows shorter than this are transformed serially.
const PAR_THRESHOLD: usize = 1 << 14;

fn process_rows(data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
    let len = fft.len();
    if data.len() < PAR_THRESHOLD || data.len() == len {
        fft.process(data);
        return;
    }
    let rows_per_chunk = (PAR_THRESHOLD / len).max(1);
    data.par_chunks_mut(rows_per_chunk * len)
        .for_each(|chunk| fft.process(chunk));
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

/// Unnormalized transform of a `len^dim` tensor stored row-major.
pub fn fft_nd(data: &mut [Complex64], len: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), len.pow(dim as u32));
    let fft = plan(len, direction);
    match dim {
        1 => fft.process(data),
        2 => {
            process_rows(data, &fft);
            transpose_square(data, len);
            process_rows(data, &fft);
            transpose_square(data, len);
        }
        _ => unreachable!("dimension is validated by Grid"),
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if grid.len() != len {
        return Err(Error::SizeMismatch {
            expected: grid.len(),
            actual: len,
        });
    }
    Ok(())
}

/// Nodal samples to interpolation coefficients `a_k` (DFT layout).
pub fn forward(grid: &Grid, samples: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid, samples.len())?;
    let mut out = samples.to_vec();
    fft_nd(&mut out, grid.axis_len(), grid.dim(), FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    out.iter_mut().for_each(|c| *c *= scale);
    Ok(out)
}

/// Coefficients to nodal samples; exact inverse of [`forward`].
pub fn inverse(grid: &Grid, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid, coeffs.len())?;
    let mut out = coeffs.to_vec();
    fft_nd(&mut out, grid.axis_len(), grid.dim(), FftDirection::Inverse);
    Ok(out)
}
