//! Adaptive QMC: alternate fixed-field runs with the saddle-point update
//! m̃ₓ ← f′(mₓ) until the transverse magnetization stops moving.
//!
//! Early iterations run on a fraction of the measurement budget. Once two
//! successive estimates agree within the tolerance, the loop switches to the
//! full budget and needs two more agreeing full-budget iterations, plus a
//! fixed-point residual within tolerance, to report convergence.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{FluctuationSpec, NonStoqModel};
use crate::pimc::{run_fixed_field, run_fixed_field_from, sub_seed, ChainRng, MCParams, ObservableRecord, PathConfiguration};

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveParams {
    pub initial_field: f64,
    /// α in m̃ ← (1−α)·m̃ + α·f′(mₓ)
    pub damping: f64,
    /// Tolerance on successive mₓ estimates.
    pub tolerance: f64,
    pub max_outer_iterations: usize,
    /// Fraction of `mc.measurement_sweeps` used before the estimate settles.
    pub coarse_fraction: f64,
    pub mc: MCParams,
}

impl AdaptiveParams {
    pub fn new(initial_field: f64, mc: MCParams) -> Self {
        AdaptiveParams {
            initial_field,
            damping: 0.5,
            tolerance: 0.01,
            max_outer_iterations: 50,
            coarse_fraction: 0.1,
            mc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Argument(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        if self.max_outer_iterations == 0 {
            return Err(Error::Argument("need at least one outer iteration".into()));
        }
        if !(self.coarse_fraction > 0.0 && self.coarse_fraction <= 1.0) {
            return Err(Error::Argument("coarse_fraction must lie in (0, 1]".into()));
        }
        if !(self.initial_field > 0.0) {
            return Err(Error::DegenerateField(self.initial_field));
        }
        self.mc.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub field: f64,
    pub m_x: f64,
    pub m_x_err: f64,
    pub full_budget: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveResult {
    /// Record of the last iteration, taken at `fixed_point_field`.
    pub record: ObservableRecord,
    pub fixed_point_field: f64,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
}

impl AdaptiveResult {
    /// |f′(mₓ) − m̃ₓ*| for the final record.
    pub fn residual(&self, fluctuation: &FluctuationSpec) -> f64 {
        (fluctuation.derivative(self.record.m_x.value) - self.fixed_point_field).abs()
    }
}

pub fn adaptive_solve(model: &NonStoqModel, params: &AdaptiveParams) -> Result<AdaptiveResult> {
    params.validate()?;
    let f = &model.fluctuation;
    if f.has_constant_derivative() {
        let field = f.derivative(0.0);
        let record = run_fixed_field(model, field, &params.mc)?;
        return Ok(AdaptiveResult {
            trace: vec![IterationRecord {
                field,
                m_x: record.m_x.value,
                m_x_err: record.m_x.error,
                full_budget: true,
            }],
            fixed_point_field: field,
            record,
            converged: true,
        });
    }

    let coarse_sweeps = ((params.mc.measurement_sweeps as f64 * params.coarse_fraction).round() as usize)
        .max(2 * params.mc.measure_interval);
    let mut field = params.initial_field;
    let mut path: Option<PathConfiguration> = None;
    let mut full_budget = coarse_sweeps >= params.mc.measurement_sweeps;
    let mut previous: Option<f64> = None;
    let mut trace = Vec::new();
    let mut last = None;
    let mut converged = false;

    for iteration in 0..params.max_outer_iterations {
        let mut mc = params.mc.with_seed(sub_seed(params.mc.seed, iteration as u64));
        if !full_budget {
            mc.measurement_sweeps = coarse_sweeps;
        }
        let (record, final_path) = run_fixed_field_from(model, field, &mc, path.take())?;
        path = Some(final_path);
        let mx = record.m_x.value;
        trace.push(IterationRecord {
            field,
            m_x: mx,
            m_x_err: record.m_x.error,
            full_budget,
        });
        let settled = previous.is_some_and(|p| (mx - p).abs() <= params.tolerance);
        let target = f.derivative(mx);
        let residual_ok = (target - field).abs() <= params.tolerance * field.abs().max(1.0);
        let this_field = field;
        last = Some((record, this_field));

        if full_budget && settled && residual_ok {
            converged = true;
            break;
        }
        if !full_budget && settled {
            full_budget = true;
            previous = None;
        } else {
            previous = Some(mx);
        }
        field = (1.0 - params.damping) * field + params.damping * target;
    }

    let (record, fixed_point_field) = last.expect("at least one outer iteration");
    Ok(AdaptiveResult {
        record,
        fixed_point_field,
        trace,
        converged,
    })
}

/// Sign s ∈ {−1, 0, +1} that makes the Langevin drift s·N·f″(m)·(m − ⟨σˣ⟩)
/// restoring around the current point; 0 when f″(m) = 0.
pub fn stabilization_sign(f: &FluctuationSpec, m: f64) -> f64 {
    let curvature = f.second_derivative(m);
    if curvature == 0.0 {
        0.0
    } else {
        -curvature.signum()
    }
}

/// One Euler–Maruyama step of
/// dm = s·N·f″(m)·(m − ⟨σˣ⟩)·dt + √(2/β)·dW.
pub fn langevin_step(m: f64, mean_sigma_x: f64, f: &FluctuationSpec, dt: f64, beta: f64, n_spins: usize, noise: f64) -> f64 {
    let drift = stabilization_sign(f, m) * n_spins as f64 * f.second_derivative(m) * (m - mean_sigma_x);
    m + drift * dt + (2.0 * dt / beta).sqrt() * noise
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinParams {
    pub initial_m: f64,
    pub dt: f64,
    pub steps: usize,
    /// QMC settings for each ⟨σˣ⟩ estimate; the seed is split per step.
    pub mc: MCParams,
}

/// Relaxes the auxiliary mₓ by Langevin steps, estimating ⟨σˣ⟩ at field
/// f′(mₓ) with a short QMC run per step. Returns the mₓ trajectory.
pub fn langevin_relax(model: &NonStoqModel, params: &LangevinParams) -> Result<Vec<f64>> {
    if !(params.dt > 0.0) {
        return Err(Error::Argument("dt must be positive".into()));
    }
    params.mc.validate()?;
    let f = &model.fluctuation;
    let mut rng = ChainRng::seed_from_u64(sub_seed(params.mc.seed, u64::MAX));
    let mut path = None;
    let mut m = params.initial_m;
    let mut trajectory = Vec::with_capacity(params.steps + 1);
    trajectory.push(m);
    for step in 0..params.steps {
        let mc = params.mc.with_seed(sub_seed(params.mc.seed, step as u64));
        let (record, final_path) = run_fixed_field_from(model, f.derivative(m), &mc, path.take())?;
        path = Some(final_path);
        let noise: f64 = StandardNormal.sample(&mut rng);
        m = langevin_step(m, record.m_x.value, f, params.dt, params.mc.beta, model.n_spins(), noise);
        trajectory.push(m);
    }
    Ok(trajectory)
}
