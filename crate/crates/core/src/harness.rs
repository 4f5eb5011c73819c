//! Error measurement, convergence sweeps and log-log slope fits.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::SimConfig;
use crate::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::physics::{Initial, Potential};
use crate::scalar::{ScalarFn, SpaceTimeFn};
use crate::stepper::{self, Silent};

/// Tail mass (squared amplitude) below which the exterior integral counts as
/// converged.
const TAIL_TOL: f64 = 1e-24;

/// `sqrt(N)` rounded to the nearest quarter, the window used by sweeps.
pub fn sqrt_window(modes: usize) -> f64 {
    ((modes as f64).sqrt() * 4.0).round() / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub value: f64,
    /// `∫ |u|²` over the exterior region that was added to the quadrature.
    pub tail_mass: f64,
    /// Set when the exterior integral did not converge.
    pub lower_bound: bool,
}

/// Midpoint quadrature of `g` over `R^d \ [-inner, inner]^d` in dyadic
/// square shells. Returns the integral and whether the last shell was
/// negligible.
pub fn exterior_integral(g: &(dyn Fn(&[f64]) -> f64 + Sync), dim: usize, inner: f64) -> (f64, bool) {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    for j in 0..10 {
        let a = inner * f64::powi(2.0, j);
        let b = 2.0 * a;
        let shell = match dim {
            1 => {
                let k = 4096;
                let h = (b - a) / k as f64;
                (0..k)
                    .into_par_iter()
                    .map(|i| {
                        let x = a + (i as f64 + 0.5) * h;
                        (g(&[x]) + g(&[-x])) * h
                    })
                    .sum::<f64>()
            }
            _ => {
                // [-b, b]^2 with cells aligned to the inner square.
                let k = 512;
                let h = 2.0 * b / k as f64;
                (0..k)
                    .into_par_iter()
                    .map(|i| {
                        let x = -b + (i as f64 + 0.5) * h;
                        let mut s = 0.0;
                        for jj in 0..k {
                            let y = -b + (jj as f64 + 0.5) * h;
                            if x.abs() < a && y.abs() < a {
                                continue;
                            }
                            s += g(&[x, y]);
                        }
                        s * h * h
                    })
                    .sum::<f64>()
            }
        };
        total += shell;
        last = shell;
        if j > 0 && shell < TAIL_TOL * 1e-6 {
            break;
        }
    }
    (total, last < TAIL_TOL)
}

/// `‖u(t) - E field‖_{L²(R^d)}`: nodal quadrature over `Ω_{2L}` on a grid
/// with half the spacing, plus the exterior mass of the exact solution.
///
/// The nodal rule is spectrally accurate only when the integrand is small
/// near `|x| = L` and `|x| = 2L`; otherwise the result carries an `O(h)`
/// quadrature error on top of the true distance.
pub fn error_vs_exact(field: &Field, exact: &SpaceTimeFn, t: f64) -> Result<ErrorEstimate> {
    let grid = field.grid();
    if exact.dim() != grid.dim() {
        return Err(Error::param("exact", "dimension does not match field"));
    }
    let d = grid.dim();
    let quad = grid.with(2.0 * grid.half_width(), 4 * grid.modes())?;
    let samples = field.zero_extended_samples(&quad)?;
    let inner: f64 = samples
        .par_iter()
        .enumerate()
        .map(|(i, v)| (v - exact.eval(&quad.point(i)[..d], t)).norm_sqr())
        .sum::<f64>()
        * quad.cell_volume();
    let (tail_mass, converged) =
        exterior_integral(&|x| exact.eval(x, t).norm_sqr(), d, quad.half_width());
    if !converged {
        log::warn!("exterior integral did not converge; error is a lower bound");
    }
    Ok(ErrorEstimate {
        value: (inner + tail_mass).sqrt(),
        tail_mass,
        lower_bound: !converged,
    })
}

/// L² distance between `E field` and a finer reference on a window that
/// contains the field's.
pub fn error_vs_reference(field: &Field, reference: &Field) -> Result<f64> {
    let (g, r) = (field.grid(), reference.grid());
    if g.dim() != r.dim() {
        return Err(Error::param("reference", "dimension does not match field"));
    }
    if r.half_width() < g.half_width() || r.modes() < g.modes() {
        return Err(Error::Reference(format!("reference {r} does not contain {g}")));
    }
    if !field.commensurate_with(r) {
        log::warn!("window ratio {}/{} is not an integer; evaluating directly", r.half_width(), g.half_width());
    }
    let lifted = Field::from_samples(*r, &field.zero_extended_samples(r)?)?;
    Ok(lifted.sub(reference)?.l2_norm())
}

#[derive(Debug, Clone)]
pub enum ReferenceSolution {
    Analytic(SpaceTimeFn),
    Grid { field: Field, tau: f64 },
}

impl ReferenceSolution {
    /// Runs `base` (without window extension) on the given resolution.
    pub fn compute(base: &SimConfig, half_width: f64, modes: usize, tau: f64) -> Result<Self> {
        let cfg = SimConfig {
            half_width,
            modes,
            tau,
            extend: false,
            snapshot_every: 0,
            ..base.clone()
        };
        let out = stepper::evolve(&cfg, &mut Silent)?;
        Ok(ReferenceSolution::Grid {
            field: out.state.into_field(),
            tau,
        })
    }

    /// The analytic solution when the configuration is a free packet.
    pub fn analytic_for(base: &SimConfig) -> Option<Self> {
        let potential = Potential::from_id(&base.potential, base.dim).ok()?;
        match Initial::from_id(&base.initial, base.dim).ok()? {
            Initial::Builtin(d) if potential.is_zero() => d.free_solution().map(ReferenceSolution::Analytic),
            _ => None,
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            ReferenceSolution::Analytic(_) => Provenance {
                kind: "analytic",
                half_width: None,
                modes: None,
                tau: None,
            },
            ReferenceSolution::Grid { field, tau } => Provenance {
                kind: "computed",
                half_width: Some(field.grid().half_width()),
                modes: Some(field.grid().modes()),
                tau: Some(*tau),
            },
        }
    }

    pub fn error(&self, field: &Field, t: f64) -> Result<f64> {
        match self {
            ReferenceSolution::Analytic(f) => Ok(error_vs_exact(field, f, t)?.value),
            ReferenceSolution::Grid { field: r, .. } => error_vs_reference(field, r),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub kind: &'static str,
    pub half_width: Option<f64>,
    pub modes: Option<usize>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    N,
    Tau,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::N => "N",
            SweepParam::Tau => "tau",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub param: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    pub tau: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub param: SweepParam,
    pub rows: Vec<ConvergenceRow>,
    /// Set when a sweep point failed and was left out.
    pub partial: bool,
}

impl ConvergenceTable {
    pub fn new(param: SweepParam, rows: Vec<ConvergenceRow>) -> Self {
        ConvergenceTable {
            param,
            rows,
            partial: false,
        }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn fit(&self) -> Result<SlopeFit> {
        fit_slope(self)
    }

    /// `log(e_i / e_{i+1})` for consecutive rows.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (w[0].error / w[1].error).ln())
            .collect()
    }

    /// Slope of the log-log segment between consecutive rows.
    pub fn local_orders(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| (w[1].error / w[0].error).ln() / (w[1].param / w[0].param).ln())
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn summary(&self, config_hash: &str, reference: Provenance) -> Result<SweepSummary> {
        let fit = self.fit()?;
        Ok(SweepSummary {
            sweep: self.param,
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            rows: self.rows.len(),
            partial: self.partial,
            config_hash: config_hash.to_string(),
            reference,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub sweep: SweepParam,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub rows: usize,
    pub partial: bool,
    pub config_hash: String,
    pub reference: Provenance,
}

impl SweepSummary {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f).map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Least-squares line through `(ln param, ln error)`. Rows with non-positive
/// error are dropped with a warning.
pub fn fit_slope(table: &ConvergenceTable) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| {
            let ok = r.error > 0.0 && r.error.is_finite() && r.param > 0.0;
            if !ok {
                log::warn!("dropping row {} = {} with error {}", table.param, r.param, r.error);
            }
            ok
        })
        .map(|r| (r.param.ln(), r.error.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewRows(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("sweep", "parameter values must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    })
}

fn check_monotone(values: &[f64]) -> Result<()> {
    if values.len() < 3 {
        return Err(Error::TooFewRows(values.len()));
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::param("sweep", "parameters must be strictly monotone"));
    }
    Ok(())
}

fn collect_rows(param: SweepParam, results: Vec<Result<ConvergenceRow>>) -> Result<ConvergenceTable> {
    let mut table = ConvergenceTable::new(param, Vec::new());
    for r in results {
        match r {
            Ok(row) => table.rows.push(row),
            Err(e) => {
                log::error!("sweep point failed: {e}");
                table.partial = true;
            }
        }
    }
    Ok(table)
}

fn run_point(base: &SimConfig, half_width: f64, modes: usize, tau: f64, reference: &ReferenceSolution) -> Result<f64> {
    let cfg = SimConfig {
        half_width,
        modes,
        tau,
        extend: false,
        snapshot_every: 0,
        ..base.clone()
    };
    let out = stepper::evolve(&cfg, &mut Silent)?;
    reference.error(out.state.field(), cfg.tmax)
}

/// Spatial sweep: `L = sqrt(N)` (quarter-rounded), fixed `τ = base.tau`.
///
/// A computed reference must have `N_ref >= 4 max N`, `τ_ref <= τ` and a
/// window containing every sweep window.
pub fn sweep_space(base: &SimConfig, ns: &[usize], reference: &ReferenceSolution) -> Result<ConvergenceTable> {
    let params: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    check_monotone(&params)?;
    let max_n = *ns.iter().max().expect("non-empty");
    if let ReferenceSolution::Grid { field, tau } = reference {
        let r = field.grid();
        if r.modes() < 4 * max_n {
            return Err(Error::Reference(format!("N_ref = {} < 4 * {max_n}", r.modes())));
        }
        if *tau > base.tau {
            return Err(Error::Reference(format!("tau_ref = {tau} > tau = {}", base.tau)));
        }
        if r.half_width() < sqrt_window(max_n) {
            return Err(Error::Reference(format!("L_ref = {} is smaller than the sweep windows", r.half_width())));
        }
    }
    let results = ns
        .par_iter()
        .map(|&n| {
            let l = sqrt_window(n);
            let error = run_point(base, l, n, base.tau, reference)?;
            Ok(ConvergenceRow {
                param: n as f64,
                half_width: l,
                modes: n,
                tau: base.tau,
                error,
            })
        })
        .collect();
    collect_rows(SweepParam::N, results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// `N` and `L` from the base configuration.
    FixedN,
    /// `N = 1/τ`, `L = sqrt(N)`.
    InverseTau,
}

/// Temporal sweep over `taus`.
///
/// A computed reference needs `τ_ref <= min τ / 4` and must contain every
/// sweep window; with [`Coupling::InverseTau`] it also needs
/// `N_ref >= 4 max N`, otherwise `N_ref >= N`.
pub fn sweep_time(
    base: &SimConfig,
    taus: &[f64],
    coupling: Coupling,
    reference: &ReferenceSolution,
) -> Result<ConvergenceTable> {
    check_monotone(taus)?;
    let resolution = |tau: f64| match coupling {
        Coupling::FixedN => (base.half_width, base.modes),
        Coupling::InverseTau => {
            let n = (1.0 / tau).round() as usize;
            (sqrt_window(n), n)
        }
    };
    if let ReferenceSolution::Grid { field, tau: tau_ref } = reference {
        let r = field.grid();
        let tau_min = taus.iter().copied().fold(f64::INFINITY, f64::min);
        if *tau_ref > tau_min / 4.0 {
            return Err(Error::Reference(format!("tau_ref = {tau_ref} > {tau_min} / 4")));
        }
        let (l_max, n_max) = resolution(tau_min);
        let needed = match coupling {
            Coupling::FixedN => n_max,
            Coupling::InverseTau => 4 * n_max,
        };
        if r.modes() < needed {
            return Err(Error::Reference(format!("N_ref = {} < {needed}", r.modes())));
        }
        if r.half_width() < l_max {
            return Err(Error::Reference(format!("L_ref = {} < {l_max}", r.half_width())));
        }
    }
    let results = taus
        .par_iter()
        .map(|&tau| {
            let (l, n) = resolution(tau);
            let error = run_point(base, l, n, tau, reference)?;
            Ok(ConvergenceRow {
                param: tau,
                half_width: l,
                modes: n,
                tau,
                error,
            })
        })
        .collect();
    collect_rows(SweepParam::Tau, results)
}

/// Largest slope compatible with the approximation rate `N^{-γ/2}`.
pub fn projection_slope_bound(gamma: u32) -> f64 {
    -(gamma as f64) / 2.0 + 0.1
}

/// Measures `‖f - E P_{L,N} χ_{a,L} f‖_{L²(R^d)}` with `L = sqrt(N)`.
///
/// The projection is approximated by interpolating `χ f` with `oversample`
/// times the cutoff and truncating; the interior norm is nodal quadrature on
/// that same fine grid and the exterior part is integrated separately.
pub fn projection_error(f: &ScalarFn, modes: usize, plateau: f64, oversample: usize) -> Result<ErrorEstimate> {
    let d = f.dim();
    let l = sqrt_window(modes);
    let cutoff = CutoffSpec::new(plateau, l)?;
    let chi = ScalarFn::real(d, move |x| cutoff.eval(x));
    let fine = Grid::new(d, l, oversample * modes)?;
    let projected = Field::interpolate(&chi.times(f), fine)?
        .project(modes)?
        .pad_to(fine.modes())?;
    let approx = projected.samples();
    let inner = approx
        .par_iter()
        .enumerate()
        .map(|(i, v)| Ok((f.eval(&fine.point(i)[..d])? - v).norm_sqr()))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>()
        * fine.cell_volume();
    let g = |x: &[f64]| f.eval(x).map(|v| v.norm_sqr()).unwrap_or(f64::NAN);
    let (tail_mass, converged) = exterior_integral(&g, d, l);
    Ok(ErrorEstimate {
        value: (inner + tail_mass).sqrt(),
        tail_mass,
        lower_bound: !converged,
    })
}

pub fn projection_rate_check(f: &ScalarFn, ns: &[usize], plateau: f64) -> Result<ConvergenceTable> {
    let params: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    check_monotone(&params)?;
    let oversample = if f.dim() == 1 { 16 } else { 4 };
    let results = ns
        .par_iter()
        .map(|&n| {
            let e = projection_error(f, n, plateau, oversample)?;
            Ok(ConvergenceRow {
                param: n as f64,
                half_width: sqrt_window(n),
                modes: n,
                tau: 0.0,
                error: e.value,
            })
        })
        .collect();
    collect_rows(SweepParam::N, results)
}
