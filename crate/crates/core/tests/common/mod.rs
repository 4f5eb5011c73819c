//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use movewin::grid::{layout_index, signed_index};
use movewin::{Field, Grid};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_field(rng: &mut ChaCha8Rng, grid: Grid) -> Field {
    Field::from_coeffs(grid, random_vec(rng, grid.len())).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

// a_k = M^{-d} Σ_n f_n e^{-2πi k·n / M}, summed directly.
pub fn naive_forward(grid: &Grid, samples: &[Complex64]) -> Vec<Complex64> {
    let m = grid.axis_len();
    let (d, n) = (grid.dim(), grid.modes());
    let norm = (m as f64).powi(d as i32);
    let idx = |flat: usize| -> [i64; 2] {
        if d == 1 {
            [signed_index(flat, n), 0]
        } else {
            [signed_index(flat / m, n), signed_index(flat % m, n)]
        }
    };
    (0..grid.len())
        .map(|kf| {
            let k = idx(kf);
            samples
                .iter()
                .enumerate()
                .map(|(nf, f)| {
                    let x = idx(nf);
                    let phase = -2.0 * PI * ((k[0] * x[0] + k[1] * x[1]) as f64) / m as f64;
                    f * Complex64::from_polar(1.0, phase)
                })
                .sum::<Complex64>()
                / norm
        })
        .collect()
}

// Truncated convolution c_k = Σ_{|j|,|k-j| ≤ N} a_j b_{k-j}, |k| ≤ N.
pub fn convolution_oracle(f: &Field, g: &Field) -> Vec<Complex64> {
    let grid = *f.grid();
    let n = grid.modes() as i64;
    let len = grid.axis_len();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    if grid.dim() == 1 {
        for k in -n..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -n..=n {
                if (k - j).abs() <= n {
                    acc += f.coeff(&[j]) * g.coeff(&[k - j]);
                }
            }
            out[layout_index(k, n as usize)] = acc;
        }
    } else {
        for k0 in -n..=n {
            for k1 in -n..=n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j0 in -n..=n {
                    for j1 in -n..=n {
                        if (k0 - j0).abs() <= n && (k1 - j1).abs() <= n {
                            acc += f.coeff(&[j0, j1]) * g.coeff(&[k0 - j0, k1 - j1]);
                        }
                    }
                }
                out[layout_index(k0, n as usize) * len + layout_index(k1, n as usize)] = acc;
            }
        }
    }
    out
}


/// `Σ_{j<200} z^j / (j+1)!`
pub fn phi1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..200 {
        term = term * z / (j as f64 + 1.0);
        sum += term;
    }
    sum
}
