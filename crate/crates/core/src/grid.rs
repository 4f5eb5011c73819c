//! Collocation geometry on the scaled torus `[-L, L]^d`.
//!
//! Each axis carries the `2N + 1` nodes `x_n = 2nL / (2N + 1)` for
//! `n = -N..=N`. Arrays indexed by node or by mode use the standard DFT
//! layout per axis: position `j` holds node/mode `j` for `j <= N` and
//! `j - (2N + 1)` otherwise. Two-dimensional arrays are row-major with the
//! first coordinate as the slow index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn get(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            other => Err(Error::Dimension(other)),
        }
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.get()
    }
}

/// Maps a DFT-layout position to its signed index in `-N..=N`.
#[inline]
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j <= n {
        j as i64
    } else {
        j as i64 - (2 * n + 1) as i64
    }
}

/// Maps a signed index in `-N..=N` to its DFT-layout position.
#[inline]
pub fn layout_index(k: i64, n: usize) -> usize {
    let m = (2 * n + 1) as i64;
    k.rem_euclid(m) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: Dim,
    half_width: f64,
    modes: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, modes: usize) -> Result<Self> {
        let dim = Dim::try_from(dim)?;
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("L", format!("must be positive, got {half_width}")));
        }
        if modes < 1 {
            return Err(Error::param("N", "must be at least 1"));
        }
        Ok(Grid {
            dim,
            half_width,
            modes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim.get()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Nodes (and modes) per axis, `2N + 1`.
    pub fn axis_len(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.axis_len() as f64
    }

    /// Node coordinate for signed index `n`.
    pub fn coordinate(&self, n: i64) -> f64 {
        2.0 * n as f64 * self.half_width / self.axis_len() as f64
    }

    /// Node coordinates along one axis, in DFT layout.
    pub fn axis_nodes(&self) -> Vec<f64> {
        (0..self.axis_len())
            .map(|j| self.coordinate(signed_index(j, self.modes)))
            .collect()
    }

    /// Node coordinates along one axis, ascending from `-N` to `N`.
    pub fn axis_nodes_sorted(&self) -> Vec<f64> {
        let n = self.modes as i64;
        (-n..=n).map(|i| self.coordinate(i)).collect()
    }

    /// Coordinates of the node at flat DFT-layout position `flat`.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let m = self.axis_len();
        match self.dim {
            Dim::One => [self.coordinate(signed_index(flat, self.modes)), 0.0],
            Dim::Two => [
                self.coordinate(signed_index(flat / m, self.modes)),
                self.coordinate(signed_index(flat % m, self.modes)),
            ],
        }
    }

    /// Squared wavenumber `|k π / L|^2` for the mode at flat position `flat`.
    pub fn wavenumber_sq(&self, flat: usize) -> f64 {
        let m = self.axis_len();
        let scale = std::f64::consts::PI / self.half_width;
        let ksq = match self.dim {
            Dim::One => {
                let k = signed_index(flat, self.modes) as f64;
                k * k
            }
            Dim::Two => {
                let k1 = signed_index(flat / m, self.modes) as f64;
                let k2 = signed_index(flat % m, self.modes) as f64;
                k1 * k1 + k2 * k2
            }
        };
        ksq * scale * scale
    }

    /// Cell volume `h^d` used by nodal quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    /// Torus volume `(2L)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim() as i32)
    }

    pub fn with(&self, half_width: f64, modes: usize) -> Result<Grid> {
        Grid::new(self.dim(), half_width, modes)
    }

    /// Two grids agree when dimension, cutoff and the bit pattern of `L` match.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.modes == other.modes
            && self.half_width.to_bits() == other.half_width.to_bits()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} L={} N={}", self.dim(), self.half_width, self.modes)
    }
}
