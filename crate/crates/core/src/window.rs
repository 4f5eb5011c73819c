//! Boundary monitoring and dynamic doubling of the computational window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::signed_index;
use crate::stepper::{self, StepperState};
use crate::transform::fft_nd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPolicy {
    /// Extension fires when the boundary indicator reaches this value.
    pub eps: f64,
    /// Steps between checks.
    pub check_interval: usize,
    /// Total number of doublings allowed in one run.
    pub max_extensions: usize,
    pub enabled: bool,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy {
            eps: 1e-4,
            check_interval: 1,
            max_extensions: 6,
            enabled: true,
        }
    }
}

impl WindowPolicy {
    pub fn disabled() -> Self {
        WindowPolicy {
            enabled: false,
            ..Default::default()
        }
    }

    pub fn with_eps(eps: f64) -> Self {
        WindowPolicy {
            eps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::param("extend-eps", format!("must be positive, got {}", self.eps)));
        }
        if self.check_interval < 1 {
            return Err(Error::param("check-interval", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionEvent {
    pub t: f64,
    #[serde(rename = "old_L")]
    pub old_half_width: f64,
    #[serde(rename = "new_L")]
    pub new_half_width: f64,
    #[serde(rename = "old_N")]
    pub old_modes: usize,
    #[serde(rename = "new_N")]
    pub new_modes: usize,
    pub indicator: f64,
}

/// Largest modulus over the outermost shell of grid nodes: the nodes
/// `x_{±N}` in one dimension, every node with an index equal to `±N` in two.
pub fn boundary_indicator(field: &Field) -> f64 {
    let grid = field.grid();
    let n = grid.modes();
    let m = grid.axis_len();
    let a = field.coeffs();
    let root = |i: i64, k: i64| Complex64::from_polar(1.0, 2.0 * PI * ((i * k) % m as i64) as f64 / m as f64);
    let mut best: f64 = 0.0;
    for i in [n as i64, -(n as i64)] {
        match grid.dim() {
            1 => {
                let v: Complex64 = a
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * root(i, signed_index(j, n)))
                    .sum();
                best = best.max(v.norm());
            }
            _ => {
                // Collapse one axis at node i, then sweep the other by FFT.
                let w: Vec<Complex64> = (0..m).map(|j| root(i, signed_index(j, n))).collect();
                let mut row = vec![Complex64::new(0.0, 0.0); m];
                let mut col = vec![Complex64::new(0.0, 0.0); m];
                for (j0, chunk) in a.chunks(m).enumerate() {
                    for (j1, c) in chunk.iter().enumerate() {
                        row[j1] += c * w[j0];
                        col[j0] += c * w[j1];
                    }
                }
                fft_nd(&mut row, m, 1, FftDirection::Inverse);
                fft_nd(&mut col, m, 1, FftDirection::Inverse);
                for v in row.iter().chain(&col) {
                    best = best.max(v.norm());
                }
            }
        }
    }
    best
}

/// Doubles `L` and `N` (zero-extending and re-interpolating the solution)
/// while the boundary indicator is at least `ε`. Returns the extensions
/// performed, in order.
pub fn maybe_extend(state: &mut StepperState, policy: &WindowPolicy) -> Result<Vec<ExtensionEvent>> {
    let mut events = Vec::new();
    if !policy.enabled {
        return Ok(events);
    }
    loop {
        let indicator = boundary_indicator(state.field());
        if indicator < policy.eps {
            return Ok(events);
        }
        if state.extensions() >= policy.max_extensions {
            return Err(Error::ExtensionBudget {
                max: policy.max_extensions,
                t: state.time(),
            });
        }
        let old = *state.grid();
        let (l, n) = (2.0 * old.half_width(), 2 * old.modes());
        let field = state.field().resample_zero_extend(l, n)?;
        state.rewindow(field)?;
        state.note_extension();
        events.push(ExtensionEvent {
            t: state.time(),
            old_half_width: old.half_width(),
            new_half_width: l,
            old_modes: old.modes(),
            new_modes: n,
            indicator,
        });
    }
}

/// Time of each extension a configuration triggers with threshold `eps`.
pub fn extension_times(config: &SimConfig, eps: f64) -> Result<Vec<f64>> {
    let mut cfg = config.clone();
    cfg.extend = true;
    cfg.extend_eps = eps;
    cfg.snapshot_every = 0;
    let out = stepper::evolve(&cfg, &mut stepper::Silent)?;
    Ok(out.extensions.iter().map(|e| e.t).collect())
}

/// Runs the configuration once per candidate threshold and returns the
/// candidate whose first extension time is closest to `target`, together
/// with every candidate's extension times.
pub fn scan_threshold(
    config: &SimConfig,
    candidates: &[f64],
    target: f64,
) -> Result<(Option<f64>, Vec<(f64, Vec<f64>)>)> {
    use rayon::prelude::*;
    let scanned = candidates
        .par_iter()
        .map(|&eps| Ok((eps, extension_times(config, eps)?)))
        .collect::<Result<Vec<_>>>()?;
    let best = scanned
        .iter()
        .filter_map(|(eps, times)| times.first().map(|t| (*eps, (t - target).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(eps, _)| eps);
    Ok((best, scanned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::physics::Potential;
    use crate::product::ProductMode;
    use crate::scalar::ScalarFn;

    #[test]
    fn indicator_trivial_fields() {
        let g = Grid::new(1, 4.0, 16).unwrap();
        assert_eq!(boundary_indicator(&Field::zeros(g)), 0.0);
        let c = Field::mode(g, &[0]).unwrap().scaled(Complex64::new(0.0, -2.5));
        assert!((boundary_indicator(&c) - 2.5).abs() < 1e-14);
        let g2 = Grid::new(2, 4.0, 6).unwrap();
        let c2 = Field::mode(g2, &[0, 0]).unwrap().scaled(Complex64::new(0.3, 0.4));
        assert!((boundary_indicator(&c2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn indicator_matches_nodewise_evaluation() {
        let g = Grid::new(1, 8.0, 64).unwrap();
        let f = ScalarFn::new(1, |x| Complex64::new((-(x[0] - 4.0).powi(2)).exp(), 0.0));
        let field = Field::interpolate(&f, g).unwrap();
        let s = field.samples();
        let oracle = s[64].norm().max(s[65].norm());
        assert!((boundary_indicator(&field) - oracle).abs() < 1e-15);

        let g2 = Grid::new(2, 3.0, 5).unwrap();
        let f2 = ScalarFn::new(2, |x| Complex64::new((x[0] - 1.0).cos() * (0.4 * x[1]).exp(), x[0] * x[1]));
        let field2 = Field::interpolate(&f2, g2).unwrap();
        let s2 = field2.samples();
        let m = g2.axis_len();
        let mut oracle: f64 = 0.0;
        for (idx, v) in s2.iter().enumerate() {
            let (i0, i1) = (idx / m, idx % m);
            if [5, 6].contains(&i0) || [5, 6].contains(&i1) {
                oracle = oracle.max(v.norm());
            }
        }
        assert!((boundary_indicator(&field2) - oracle).abs() < 1e-13);
    }

    fn packet_state(center: f64, l: f64, n: usize) -> StepperState {
        let g = Grid::new(1, l, n).unwrap();
        let f = ScalarFn::new(1, move |x| Complex64::from_polar((-(x[0] - center).powi(2)).exp(), x[0]));
        let field = Field::interpolate(&f, g).unwrap();
        StepperState::new(field, 0.01, Potential::from_id("zero", 1).unwrap(), 0.5, ProductMode::Dealiased).unwrap()
    }

    #[test]
    fn quiet_boundary_leaves_state_untouched() {
        let mut s = packet_state(0.0, 10.0, 64);
        let before = s.field().clone();
        let events = maybe_extend(&mut s, &WindowPolicy::default()).unwrap();
        assert!(events.is_empty());
        assert_eq!(s.field(), &before);
        assert_eq!(s.grid().modes(), 64);
    }

    #[test]
    fn loud_boundary_doubles_window() {
        let mut s = packet_state(4.0, 6.0, 48);
        let norm = s.field().l2_norm();
        let events = maybe_extend(&mut s, &WindowPolicy::with_eps(1e-6)).unwrap();
        assert_eq!(events.len(), 1);
        let g = s.grid();
        assert_eq!((g.half_width(), g.modes()), (12.0, 96));
        assert!((g.spacing() - 24.0 / 193.0).abs() < 1e-15);
        assert_eq!(g.modes() as f64 / g.half_width(), 48.0 / 6.0);
        assert!(boundary_indicator(s.field()) < 1e-6);
        assert!((s.field().l2_norm() - norm).abs() < 1e-3 * norm);
    }

    #[test]
    fn budget_is_enforced() {
        let mut s = packet_state(5.5, 6.0, 48);
        let policy = WindowPolicy {
            max_extensions: 0,
            ..WindowPolicy::with_eps(1e-6)
        };
        assert!(matches!(maybe_extend(&mut s, &policy), Err(Error::ExtensionBudget { .. })));
        let off = WindowPolicy::disabled();
        assert!(maybe_extend(&mut s, &off).unwrap().is_empty());
    }
}
