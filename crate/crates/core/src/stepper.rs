//! Exponential Euler time stepping on the scaled torus.
//!
//! One step maps `u` to
//! `e^{iτΔ} u - iτ φ₁(iτΔ) P_{L,N}(I_{L,N}(χ V) · u)`
//! where `Δ` acts on mode `k` as multiplication by `-|kπ/L|²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::SimConfig;
use crate::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::physics::{Initial, Potential};
use crate::product::{ProductMode, ProductPlan};
use crate::window::{self, ExtensionEvent, WindowPolicy};

const I: Complex64 = Complex64::new(0.0, 1.0);

// Below this modulus φ₁ switches to its degree-4 Taylor polynomial.
const PHI1_SERIES_RADIUS: f64 = 1e-4;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin;
    let im = z.re.exp() * z.im.sin();
    Complex64::new(re, im)
}

/// `φ₁(z) = (e^z - 1) / z`, with `φ₁(0) = 1`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < PHI1_SERIES_RADIUS {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        expm1(z) / z
    }
}

/// Applies `e^{iτΔ}`: mode `k` is rotated by `exp(-iτ|kπ/L|²)`.
pub fn free_propagate(field: &Field, tau: f64) -> Field {
    let grid = *field.grid();
    let coeffs = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, -tau * grid.wavenumber_sq(i)))
        .collect();
    Field::from_coeffs(grid, coeffs).expect("length matches grid")
}

/// `P_{L,N}(χ_{a,L} u₀)`, approximated by interpolating on the grid with
/// twice the cutoff and truncating. Tabulated data are interpolated on the
/// native grid.
pub fn discretize_initial(initial: &Initial, grid: Grid, plateau: f64) -> Result<Field> {
    let cutoff = CutoffSpec::new(plateau, grid.half_width())?;
    let chi = crate::scalar::ScalarFn::real(grid.dim(), move |x| cutoff.eval(x));
    let f = chi.times(&initial.as_fn());
    match initial {
        Initial::Builtin(_) => {
            let fine = grid.with(grid.half_width(), 2 * grid.modes())?;
            Field::interpolate(&f, fine)?.project(grid.modes())
        }
        Initial::Tabulated(_) => Field::interpolate(&f, grid),
    }
}

/// `I_{L,N}(χ_{a,L} V)`.
pub fn discretize_potential(potential: &Potential, grid: Grid, plateau: f64) -> Result<Field> {
    if potential.is_zero() {
        return Ok(Field::zeros(grid));
    }
    let cutoff = CutoffSpec::new(plateau, grid.half_width())?;
    let chi = crate::scalar::ScalarFn::real(grid.dim(), move |x| cutoff.eval(x));
    Field::interpolate(&chi.times(&potential.as_fn(grid.dim())), grid)
}

#[derive(Debug, Clone)]
struct Symbols {
    key: (u64, usize, u64),
    propagator: Vec<Complex64>,
    // -iτ φ₁(-iτ|kπ/L|²)
    source: Vec<Complex64>,
}

impl Symbols {
    fn key(grid: &Grid, tau: f64) -> (u64, usize, u64) {
        (grid.half_width().to_bits(), grid.modes(), tau.to_bits())
    }

    fn build(grid: &Grid, tau: f64) -> Self {
        let (propagator, source) = (0..grid.len())
            .map(|i| {
                let w = grid.wavenumber_sq(i);
                (
                    Complex64::from_polar(1.0, -tau * w),
                    -I * tau * phi1(Complex64::new(0.0, -tau * w)),
                )
            })
            .unzip();
        Symbols {
            key: Self::key(grid, tau),
            propagator,
            source,
        }
    }
}

#[derive(Debug, Clone)]
struct PotentialCache {
    field: Field,
    plan: ProductPlan,
    sampled: Vec<Complex64>,
}

/// The evolving solution together with everything derived from its window.
#[derive(Debug, Clone)]
pub struct StepperState {
    field: Field,
    steps: usize,
    tau: f64,
    potential: Potential,
    plateau: f64,
    mode: ProductMode,
    cache: Option<PotentialCache>,
    symbols: Symbols,
    extensions: usize,
}

impl StepperState {
    pub fn new(
        field: Field,
        tau: f64,
        potential: Potential,
        plateau: f64,
        mode: ProductMode,
    ) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("tau", format!("must be positive, got {tau}")));
        }
        let symbols = Symbols::build(field.grid(), tau);
        let mut state = StepperState {
            field,
            steps: 0,
            tau,
            potential,
            plateau,
            mode,
            cache: None,
            symbols,
            extensions: 0,
        };
        state.rebuild_potential()?;
        Ok(state)
    }

    fn rebuild_potential(&mut self) -> Result<()> {
        let grid = *self.field.grid();
        self.cache = if self.potential.is_zero() {
            None
        } else {
            let field = discretize_potential(&self.potential, grid, self.plateau)?;
            let plan = ProductPlan::new(grid, self.mode);
            let sampled = plan.samples(&field)?;
            Some(PotentialCache {
                field,
                plan,
                sampled,
            })
        };
        if self.symbols.key != Symbols::key(&grid, self.tau) {
            self.symbols = Symbols::build(&grid, self.tau);
        }
        Ok(())
    }

    /// Replaces the solution by one on a new window and rebuilds the
    /// potential interpolant and step symbols for it.
    pub fn rewindow(&mut self, field: Field) -> Result<()> {
        self.field = field;
        self.rebuild_potential()
    }

    /// Replaces the solution on the current window.
    pub fn set_field(&mut self, field: Field) -> Result<()> {
        self.field.check_same(&field)?;
        self.field = field;
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn into_field(self) -> Field {
        self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn extensions(&self) -> usize {
        self.extensions
    }

    pub(crate) fn note_extension(&mut self) {
        self.extensions += 1;
    }

    /// `I_{L,N}(χ_{1/2,L} V)` on the current window (zero for `V ≡ 0`).
    pub fn potential_field(&self) -> Field {
        match &self.cache {
            Some(c) => c.field.clone(),
            None => Field::zeros(*self.grid()),
        }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn product_mode(&self) -> ProductMode {
        self.mode
    }

    /// Advances by one step of size `τ`.
    pub fn step(&mut self) -> Result<()> {
        let next = self.apply(&self.field)?;
        if let Err(mode) = next.is_finite() {
            return Err(Error::NonFinite {
                step: self.steps + 1,
                mode,
            });
        }
        self.field = next;
        self.steps += 1;
        Ok(())
    }

    /// The one-step map applied to an arbitrary field on the current window.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.field.check_same(u)?;
        let mut out: Vec<Complex64> = u
            .coeffs()
            .iter()
            .zip(&self.symbols.propagator)
            .map(|(c, p)| c * p)
            .collect();
        if let Some(cache) = &self.cache {
            let product = cache.plan.multiply_sampled(&cache.sampled, u)?;
            for ((o, s), v) in out.iter_mut().zip(&self.symbols.source).zip(product.coeffs()) {
                *o += s * v;
            }
        }
        Field::from_coeffs(*u.grid(), out)
    }
}

/// Callbacks invoked by [`evolve`].
pub trait Observer {
    fn on_step(&mut self, _state: &StepperState) -> Result<()> {
        Ok(())
    }

    fn on_extension(&mut self, _event: &ExtensionEvent) -> Result<()> {
        Ok(())
    }
}

/// Observer that ignores everything.
pub struct Silent;

impl Observer for Silent {}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgressRow {
    pub step: usize,
    pub t: f64,
    pub norm: f64,
    pub boundary_indicator: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: StepperState,
    pub extensions: Vec<ExtensionEvent>,
    pub snapshots: Vec<Snapshot>,
    pub progress: Vec<ProgressRow>,
}

/// Builds the initial state described by a configuration.
pub fn initial_state(config: &SimConfig) -> Result<StepperState> {
    config.validate()?;
    let grid = Grid::new(config.dim, config.half_width, config.modes)?;
    let initial = Initial::from_id(&config.initial, config.dim)?;
    let potential = Potential::from_id(&config.potential, config.dim)?;
    let field = discretize_initial(&initial, grid, config.plateau_fraction)?;
    StepperState::new(
        field,
        config.tau,
        potential,
        config.plateau_fraction,
        config.product_mode(),
    )
}

/// Runs `config.steps()` steps from the configured initial datum.
pub fn evolve(config: &SimConfig, observer: &mut dyn Observer) -> Result<RunOutcome> {
    let state = initial_state(config)?;
    advance(
        state,
        config.steps(),
        &config.window_policy(),
        config.snapshot_every,
        observer,
    )
}

/// Advances an existing state by `steps` steps, checking the window between
/// steps when the policy is enabled. Snapshots (and progress rows) are taken
/// at the start, every `snapshot_every` steps (0 disables) and at the end.
pub fn advance(
    mut state: StepperState,
    steps: usize,
    policy: &WindowPolicy,
    snapshot_every: usize,
    observer: &mut dyn Observer,
) -> Result<RunOutcome> {
    policy.validate()?;
    let mut extensions = Vec::new();
    let mut snapshots = Vec::new();
    let mut progress = Vec::new();
    let record = |state: &StepperState, snapshots: &mut Vec<Snapshot>, progress: &mut Vec<ProgressRow>| {
        snapshots.push(Snapshot {
            step: state.steps(),
            t: state.time(),
            field: state.field().clone(),
        });
        progress.push(ProgressRow {
            step: state.steps(),
            t: state.time(),
            norm: state.field().l2_norm(),
            boundary_indicator: window::boundary_indicator(state.field()),
        });
    };
    record(&state, &mut snapshots, &mut progress);
    for n in 0..steps {
        if policy.enabled && n % policy.check_interval == 0 {
            for ev in window::maybe_extend(&mut state, policy)? {
                log::info!(
                    "window extended at t = {:.4}: L {} -> {}, N {} -> {}",
                    ev.t,
                    ev.old_half_width,
                    ev.new_half_width,
                    ev.old_modes,
                    ev.new_modes
                );
                observer.on_extension(&ev)?;
                extensions.push(ev);
            }
        }
        state.step()?;
        observer.on_step(&state)?;
        let done = n + 1 == steps;
        if !done && snapshot_every > 0 && (n + 1) % snapshot_every == 0 {
            record(&state, &mut snapshots, &mut progress);
        }
    }
    if steps > 0 {
        record(&state, &mut snapshots, &mut progress);
    }
    Ok(RunOutcome {
        state,
        extensions,
        snapshots,
        progress,
    })
}
