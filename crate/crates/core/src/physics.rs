//! Initial data, potentials and the analytic free-evolution oracle.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::cutoff::bump_sq;
use crate::error::{Error, Result};
use crate::scalar::{ScalarFn, SpaceTimeFn};

/// Sobolev regularity class of an initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// `H^γ ∩ L²(|x|^{2γ} dx)` for the given integer `γ`.
    Sobolev(u32),
    Smooth,
}

/// `|s|^p` with the zero case exact.
fn abs_pow(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        (p * s.abs().ln()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialData {
    FreeGaussian,
    TunnelI,
    TunnelIIH1,
    TunnelIIIH2,
    ScatterI,
    ScatterIIH2,
}

impl InitialData {
    pub const ALL: [InitialData; 6] = [
        InitialData::FreeGaussian,
        InitialData::TunnelI,
        InitialData::TunnelIIH1,
        InitialData::TunnelIIIH2,
        InitialData::ScatterI,
        InitialData::ScatterIIH2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            InitialData::FreeGaussian => "free-gaussian",
            InitialData::TunnelI => "tunnel-I",
            InitialData::TunnelIIH1 => "tunnel-II-H1",
            InitialData::TunnelIIIH2 => "tunnel-III-H2",
            InitialData::ScatterI => "scatter-I",
            InitialData::ScatterIIH2 => "scatter-II-H2",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.id() == id)
            .ok_or_else(|| Error::UnknownId {
                kind: "initial data",
                id: id.to_string(),
            })
    }

    pub fn dim(self) -> usize {
        match self {
            InitialData::ScatterI | InitialData::ScatterIIH2 => 2,
            _ => 1,
        }
    }

    pub fn regularity(self) -> Regularity {
        match self {
            InitialData::TunnelIIH1 => Regularity::Sobolev(1),
            InitialData::TunnelIIIH2 | InitialData::ScatterIIH2 => Regularity::Sobolev(2),
            _ => Regularity::Smooth,
        }
    }

    pub fn eval(self, x: &[f64]) -> Complex64 {
        match self {
            InitialData::FreeGaussian => FREE_PACKET.initial(x[0]),
            InitialData::TunnelI => {
                let s = x[0] + 5.0;
                Complex64::from_polar((-s * s).exp(), 8.0 * s)
            }
            InitialData::TunnelIIH1 => {
                let s = x[0] + 8.0;
                Complex64::from_polar(abs_pow(s, 0.51) * (-s * s).exp(), 4.0 * s)
            }
            InitialData::TunnelIIIH2 => {
                let s = x[0] + 8.0;
                Complex64::from_polar(1.0, 4.0 * s) * (s * abs_pow(s, 0.51) * (-s * s).exp())
            }
            InitialData::ScatterI => {
                let s = x[0] + 2.0;
                let r2 = s * s + x[1] * x[1];
                Complex64::from_polar((-r2).exp(), 4.0 * s)
            }
            InitialData::ScatterIIH2 => {
                let s = x[0] + 2.0;
                let r2 = s * s + x[1] * x[1];
                // r^1.02 = (r^2)^0.51
                Complex64::from_polar(abs_pow(r2, 0.51) * (-r2).exp(), 4.0 * s)
            }
        }
    }

    pub fn as_fn(self) -> ScalarFn {
        ScalarFn::new(self.dim(), move |x| self.eval(x))
    }

    /// Closed-form solution of the free equation, when this datum has one.
    pub fn free_solution(self) -> Option<SpaceTimeFn> {
        match self {
            InitialData::FreeGaussian => Some(FREE_PACKET.as_fn()),
            _ => None,
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Gaussian packet `exp(-(x - x0)²/σ² + i k0 (x - x0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub wavenumber: f64,
}

/// The free-equation datum `exp(-x²/9 + ix)`.
pub const FREE_PACKET: GaussianPacket = GaussianPacket {
    center: 0.0,
    width: 3.0,
    wavenumber: 1.0,
};

impl GaussianPacket {
    pub fn initial(&self, x: f64) -> Complex64 {
        let y = x - self.center;
        Complex64::from_polar((-y * y / (self.width * self.width)).exp(), self.wavenumber * y)
    }

    /// Solution of `i u_t + u_xx = 0` started from the packet.
    ///
    /// With `a = 1/σ²`, `y = x - x0` and `s = 1 + 4iat`:
    /// `u = s^{-1/2} exp((-a y² + i k0 y - i k0² t) / s)`.
    /// The modulus is centred at `x0 + 2 k0 t`.
    pub fn evolve(&self, x: f64, t: f64) -> Complex64 {
        let a = 1.0 / (self.width * self.width);
        let k0 = self.wavenumber;
        let y = x - self.center;
        let s = Complex64::new(1.0, 4.0 * a * t);
        let num = Complex64::new(-a * y * y, k0 * y - k0 * k0 * t);
        (num / s).exp() / s.sqrt()
    }

    pub fn as_fn(self) -> SpaceTimeFn {
        SpaceTimeFn::new(1, move |x, t| self.evolve(x[0], t))
    }
}

/// Evaluates the free Gaussian-packet solution at `(x, t)`.
pub fn exact_free_solution(x: f64, t: f64, packet: &GaussianPacket) -> Result<Complex64> {
    if !(packet.width > 0.0) {
        return Err(Error::param("sigma", "must be positive"));
    }
    Ok(packet.evolve(x, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinPotential {
    Zero,
    /// `200 b(10x)`.
    TunnelBump,
    /// `10 Σ_{i=-1}^{1} Σ_{j=-5}^{5} b(4((x - i)² + (y - 6j/5)²))`.
    Lattice,
}

impl BuiltinPotential {
    pub fn id(self) -> &'static str {
        match self {
            BuiltinPotential::Zero => "zero",
            BuiltinPotential::TunnelBump => "tunnel-bump",
            BuiltinPotential::Lattice => "lattice",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            BuiltinPotential::Zero => 0.0,
            BuiltinPotential::TunnelBump => 200.0 * bump_sq(100.0 * x[0] * x[0]),
            BuiltinPotential::Lattice => {
                let mut v = 0.0;
                for i in -1..=1 {
                    let dx = x[0] - i as f64;
                    if dx.abs() >= 0.5 {
                        continue;
                    }
                    for j in -5..=5 {
                        let dy = x[1] - 6.0 * j as f64 / 5.0;
                        v += bump_sq(4.0 * (dx * dx + dy * dy));
                    }
                }
                10.0 * v
            }
        }
    }

    /// Radius (sup-norm) outside of which the potential is exactly zero.
    pub fn support(self) -> f64 {
        match self {
            BuiltinPotential::Zero => 0.0,
            BuiltinPotential::TunnelBump => 0.1,
            BuiltinPotential::Lattice => 6.5,
        }
    }
}

/// Samples tabulated on grid nodes, looked up by exact coordinates.
#[derive(Debug, Clone)]
pub struct Table {
    dim: usize,
    values: Arc<HashMap<(i64, i64), Complex64>>,
}

// Coordinates are matched on a 1e-9 lattice.
fn key(x: &[f64]) -> (i64, i64) {
    let q = |v: f64| (v * 1e9).round() as i64;
    (q(x[0]), x.get(1).copied().map(q).unwrap_or(0))
}

impl Table {
    /// Reads `x[,y],value` (real) or `x[,y],re,im` (complex) rows with a
    /// header line.
    pub fn from_csv(path: &Path, dim: usize) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Format {
            what: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let mut values = HashMap::new();
        for record in reader.records() {
            let record = record?;
            let nums = record
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Format {
                    what: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            let v = match nums.len() - dim {
                1 => Complex64::new(nums[dim], 0.0),
                2 => Complex64::new(nums[dim], nums[dim + 1]),
                _ => {
                    return Err(Error::Format {
                        what: path.display().to_string(),
                        reason: format!("expected {} or {} columns", dim + 1, dim + 2),
                    })
                }
            };
            values.insert(key(&nums[..dim]), v);
        }
        Ok(Table {
            dim,
            values: Arc::new(values),
        })
    }

    pub fn lookup(&self, x: &[f64]) -> Result<Complex64> {
        self.values
            .get(&key(x))
            .copied()
            .ok_or_else(|| Error::Evaluation {
                point: x.to_vec(),
                reason: "point is not a tabulated node".into(),
            })
    }

    pub fn as_fn(&self) -> ScalarFn {
        let t = self.clone();
        ScalarFn::fallible(self.dim, move |x| t.lookup(x))
    }
}

#[derive(Debug, Clone)]
pub enum Potential {
    Builtin(BuiltinPotential),
    Tabulated(Table),
}

impl Potential {
    /// Resolves `zero`, `tunnel-bump`, `lattice` or `csv:<path>`.
    pub fn from_id(id: &str, dim: usize) -> Result<Self> {
        if let Some(path) = id.strip_prefix("csv:") {
            return Ok(Potential::Tabulated(Table::from_csv(Path::new(path), dim)?));
        }
        let p = [
            BuiltinPotential::Zero,
            BuiltinPotential::TunnelBump,
            BuiltinPotential::Lattice,
        ]
        .into_iter()
        .find(|p| p.id() == id)
        .ok_or_else(|| Error::UnknownId {
            kind: "potential",
            id: id.to_string(),
        })?;
        Ok(Potential::Builtin(p))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Builtin(BuiltinPotential::Zero))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Potential::Builtin(p) => Ok(p.eval(x)),
            Potential::Tabulated(t) => Ok(t.lookup(x)?.re),
        }
    }

    pub fn as_fn(&self, dim: usize) -> ScalarFn {
        match self {
            Potential::Builtin(p) => {
                let p = *p;
                ScalarFn::real(dim, move |x| p.eval(x))
            }
            Potential::Tabulated(t) => t.as_fn(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Initial {
    Builtin(InitialData),
    Tabulated(Table),
}

impl Initial {
    pub fn from_id(id: &str, dim: usize) -> Result<Self> {
        if let Some(path) = id.strip_prefix("csv:") {
            return Ok(Initial::Tabulated(Table::from_csv(Path::new(path), dim)?));
        }
        Ok(Initial::Builtin(InitialData::from_id(id)?))
    }

    pub fn as_fn(&self) -> ScalarFn {
        match self {
            Initial::Builtin(d) => d.as_fn(),
            Initial::Tabulated(t) => t.as_fn(),
        }
    }
}

/// Looks up an initial datum by id and evaluates it.
pub fn eval_initial(id: &str, x: &[f64]) -> Result<Complex64> {
    Ok(InitialData::from_id(id)?.eval(x))
}

/// Looks up a built-in potential by id and evaluates it.
pub fn eval_potential(id: &str, x: &[f64]) -> Result<f64> {
    Potential::from_id(id, x.len())?.eval(x)
}
