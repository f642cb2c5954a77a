//! Path-integral Monte Carlo for the conditional distribution at a fixed
//! effective transverse field m̃ₓ, in the static approximation.
//!
//! The Trotter-decomposed weight of an N×τ path σ is
//!
//! ```text
//! w(σ) ∝ exp( −(β/τ) Σₜ H₀(σₜ) + B Σ_{i,t} σ_{i,t} σ_{i,t+1} ),   B = −½ ln tanh(β m̃ₓ/τ)
//! ```
//!
//! with periodic imaginary time. A non-positive field has no finite B; the
//! engine then samples the τ → ∞ limit at zero transverse field, where every
//! site is one classical spin shared by all slices.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassicalIsing, FluctuationSpec, NonStoqModel};
use crate::parallel::{self, Execution};
use crate::stats::{binning_analysis, jackknife, Estimate};

/// Portable generator used by every chain.
pub type ChainRng = Xoshiro256PlusPlus;

/// Deterministic child seed for stream `index` of `master` (SplitMix64 finalizer).
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Spins σ_{i,t} = ±1, stored slice by slice, periodic in t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathConfiguration {
    n_spins: usize,
    tau: usize,
    spins: Vec<i8>,
    slice_sums: Vec<i64>,
}

impl PathConfiguration {
    pub fn from_spins(n_spins: usize, tau: usize, spins: Vec<i8>) -> Result<Self> {
        check_tau(tau)?;
        if n_spins == 0 || spins.len() != n_spins * tau {
            return Err(Error::Argument(format!(
                "path needs {} spins for N={n_spins}, tau={tau}, got {}",
                n_spins * tau,
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Argument("spins must be +1 or -1".into()));
        }
        let slice_sums = spins
            .chunks_exact(n_spins)
            .map(|c| c.iter().map(|&s| i64::from(s)).sum())
            .collect();
        Ok(PathConfiguration {
            n_spins,
            tau,
            spins,
            slice_sums,
        })
    }

    /// Every slice equal to `column`.
    pub fn from_column(column: &[i8], tau: usize) -> Result<Self> {
        let spins = column.iter().copied().cycle().take(column.len() * tau).collect();
        Self::from_spins(column.len(), tau, spins)
    }

    /// Cold start: each spin along the sign of its local field (+1 at zero field).
    pub fn aligned(model: &ClassicalIsing, tau: usize) -> Result<Self> {
        let column: Vec<i8> = model
            .fields()
            .iter()
            .map(|&h| if h < 0.0 { -1 } else { 1 })
            .collect();
        Self::from_column(&column, tau)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn spin(&self, site: usize, slice: usize) -> i8 {
        self.spins[slice * self.n_spins + site]
    }

    pub fn slice(&self, t: usize) -> &[i8] {
        &self.spins[t * self.n_spins..(t + 1) * self.n_spins]
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Σᵢ σ_{i,t} for every slice.
    pub fn slice_sums(&self) -> &[i64] {
        &self.slice_sums
    }

    /// Σ_{i,t} σ_{i,t} σ_{i,t+1} with periodic t.
    pub fn bond_sum(&self) -> i64 {
        let n = self.n_spins;
        let mut total = 0i64;
        for t in 0..self.tau {
            let next = ((t + 1) % self.tau) * n;
            let cur = t * n;
            for i in 0..n {
                total += i64::from(self.spins[cur + i] * self.spins[next + i]);
            }
        }
        total
    }

    pub fn is_locked(&self) -> bool {
        let first = self.slice(0);
        (1..self.tau).all(|t| self.slice(t) == first)
    }

    fn lock_to_first_slice(&mut self) {
        let n = self.n_spins;
        let (first, rest) = self.spins.split_at_mut(n);
        for chunk in rest.chunks_exact_mut(n) {
            chunk.copy_from_slice(first);
        }
        let s0 = self.slice_sums[0];
        self.slice_sums.iter_mut().for_each(|s| *s = s0);
    }

    #[inline]
    fn flip(&mut self, site: usize, slice: usize) {
        let idx = slice * self.n_spins + site;
        let s = self.spins[idx];
        self.spins[idx] = -s;
        self.slice_sums[slice] -= 2 * i64::from(s);
    }
}

fn check_tau(tau: usize) -> Result<()> {
    if tau < 2 || !tau.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "Trotter number must be even and at least 2, got {tau}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SweepOrder {
    /// Slice by slice, site by site.
    #[default]
    Sequential,
    /// N·τ proposals at uniformly random (site, slice).
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCParams {
    pub beta: f64,
    pub tau: usize,
    pub equilibration_sweeps: usize,
    pub measurement_sweeps: usize,
    pub seed: u64,
    pub measure_interval: usize,
    #[serde(default)]
    pub order: SweepOrder,
}

impl MCParams {
    pub fn new(beta: f64, tau: usize, equilibration_sweeps: usize, measurement_sweeps: usize, seed: u64) -> Self {
        MCParams {
            beta,
            tau,
            equilibration_sweeps,
            measurement_sweeps,
            seed,
            measure_interval: 1,
            order: SweepOrder::Sequential,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        MCParams { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Argument(format!("beta must be positive, got {}", self.beta)));
        }
        check_tau(self.tau)?;
        if self.measure_interval == 0 {
            return Err(Error::Argument("measure_interval must be at least 1".into()));
        }
        Ok(())
    }
}

/// Measured observables of one fixed-field run with one-sigma errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub m_z: Estimate,
    /// Slice average of |Σᵢσ_{i,t}|/N, an estimator of ⟨|Σσᶻ|⟩/N.
    pub m_z_abs: Estimate,
    pub m_x: Estimate,
    pub energy_per_spin: Estimate,
    pub acceptance_rate: f64,
    pub effective_field: f64,
    pub seed: u64,
    pub equilibration_sweeps: usize,
    pub measurement_sweeps: usize,
    pub beta: f64,
    pub tau: usize,
    pub n_spins: usize,
}

/// B = −½ ln tanh(β m̃ₓ/τ).
pub fn trotter_coupling(beta: f64, tau: usize, field: f64) -> Result<f64> {
    if !(field > 0.0) {
        return Err(Error::DegenerateField(field));
    }
    if !(beta > 0.0) || tau < 2 {
        return Err(Error::Argument(format!("need beta > 0 and tau >= 2, got {beta}, {tau}")));
    }
    let a = beta * field / tau as f64;
    // −½ ln tanh a = ½ [ln(1 + e^{−2a}) − ln(1 − e^{−2a})]
    let q = (-2.0 * a).exp();
    Ok(0.5 * (q.ln_1p() - (-q).ln_1p()))
}

/// One Metropolis sweep (N·τ single-spin proposals) of the path weight.
/// Returns the number of accepted flips. `coupling` may be +∞.
pub fn metropolis_sweep<R: Rng + ?Sized>(
    config: &mut PathConfiguration,
    model: &ClassicalIsing,
    beta: f64,
    coupling: f64,
    order: SweepOrder,
    rng: &mut R,
) -> usize {
    let n = config.n_spins;
    let tau = config.tau;
    let slice_beta = beta / tau as f64;
    let mut accepted = 0;
    let propose = |config: &mut PathConfiguration, i: usize, t: usize, rng: &mut R| {
        let prev = if t == 0 { tau - 1 } else { t - 1 };
        let next = if t + 1 == tau { 0 } else { t + 1 };
        let s = config.spins[t * n + i];
        let neighbours = i32::from(s) * i32::from(config.spins[prev * n + i] + config.spins[next * n + i]);
        let bond = if neighbours == 0 {
            0.0
        } else {
            2.0 * coupling * f64::from(neighbours)
        };
        let slice = &config.spins[t * n..(t + 1) * n];
        let delta = slice_beta * model.flip_delta(slice, i, config.slice_sums[t]) + bond;
        if delta <= 0.0 || rng.random::<f64>() < (-delta).exp() {
            config.flip(i, t);
            true
        } else {
            false
        }
    };
    match order {
        SweepOrder::Sequential => {
            for t in 0..tau {
                for i in 0..n {
                    accepted += usize::from(propose(config, i, t, rng));
                }
            }
        }
        SweepOrder::Random => {
            for _ in 0..n * tau {
                let i = rng.random_range(0..n);
                let t = rng.random_range(0..tau);
                accepted += usize::from(propose(config, i, t, rng));
            }
        }
    }
    accepted
}

/// Zero-field sweep on a locked path: each site flips as one classical spin
/// across all slices with weight exp(−β H₀).
fn locked_sweep<R: Rng + ?Sized>(
    config: &mut PathConfiguration,
    model: &ClassicalIsing,
    beta: f64,
    order: SweepOrder,
    rng: &mut R,
) -> usize {
    let n = config.n_spins;
    let mut accepted = 0;
    let propose = |config: &mut PathConfiguration, i: usize, rng: &mut R| {
        let delta = beta * model.flip_delta(&config.spins[..n], i, config.slice_sums[0]);
        if delta <= 0.0 || rng.random::<f64>() < (-delta).exp() {
            for t in 0..config.tau {
                config.flip(i, t);
            }
            true
        } else {
            false
        }
    };
    match order {
        SweepOrder::Sequential => {
            for i in 0..n {
                accepted += usize::from(propose(config, i, rng));
            }
        }
        SweepOrder::Random => {
            for _ in 0..n {
                let i = rng.random_range(0..n);
                accepted += usize::from(propose(config, i, rng));
            }
        }
    }
    accepted
}

/// (1/(Nτ)) Σ_{i,t} tanh(a)^{σ_{i,t}σ_{i,t+1}}, a = β m̃ₓ/τ.
pub fn measure_mx(config: &PathConfiguration, beta: f64, field: f64) -> Result<f64> {
    if !(field > 0.0) {
        return Err(Error::DegenerateField(field));
    }
    Ok(mx_from_bonds(config.bond_sum(), config.n_spins * config.tau, (beta * field / config.tau as f64).tanh()))
}

fn mx_from_bonds(bond_sum: i64, n_bonds: usize, tanh_a: f64) -> f64 {
    let aligned = (n_bonds as i64 + bond_sum) / 2;
    let anti = n_bonds as i64 - aligned;
    (aligned as f64 * tanh_a + anti as f64 / tanh_a) / n_bonds as f64
}

/// (1/(Nτ)) Σ_{i,t} σ_{i,t}.
pub fn measure_mz(config: &PathConfiguration) -> f64 {
    config.slice_sums.iter().sum::<i64>() as f64 / (config.n_spins * config.tau) as f64
}

/// (1/τ) Σₜ |Σᵢ σ_{i,t}| / N.
pub fn measure_mz_abs(config: &PathConfiguration) -> f64 {
    config.slice_sums.iter().map(|s| s.abs()).sum::<i64>() as f64 / (config.n_spins * config.tau) as f64
}

/// (1/(Nτ)) Σₜ H₀(σₜ).
pub fn slice_average_energy(config: &PathConfiguration, model: &ClassicalIsing) -> f64 {
    let total: f64 = (0..config.tau)
        .map(|t| model.energy_unchecked(config.slice(t)))
        .sum();
    total / (config.tau * config.n_spins) as f64
}

/// Energy per spin: slice-averaged H₀/N minus f at the measured m_x.
pub fn measure_energy(config: &PathConfiguration, model: &NonStoqModel, measured_mx: f64) -> f64 {
    slice_average_energy(config, &model.classical) - model.fluctuation.eval(measured_mx)
}

#[derive(Debug, Default, Clone)]
struct Samples {
    h0: Vec<f64>,
    mx: Vec<f64>,
    mz: Vec<f64>,
    mz_abs: Vec<f64>,
}

/// A single Markov chain at a fixed effective field.
#[derive(Debug, Clone)]
pub(crate) struct Chain<'a> {
    model: &'a ClassicalIsing,
    pub(crate) config: PathConfiguration,
    rng: ChainRng,
    field: f64,
    /// `None` on the locked zero-field branch.
    coupling: Option<f64>,
    tanh_a: f64,
    params: MCParams,
    accepted: u64,
    proposed: u64,
    samples: Samples,
}

impl<'a> Chain<'a> {
    pub(crate) fn new(
        model: &'a ClassicalIsing,
        field: f64,
        params: &MCParams,
        initial: Option<PathConfiguration>,
    ) -> Result<Self> {
        params.validate()?;
        if !field.is_finite() {
            return Err(Error::Argument(format!("effective field must be finite, got {field}")));
        }
        let mut config = match initial {
            Some(c) => {
                if c.n_spins != model.n_spins() || c.tau != params.tau {
                    return Err(Error::Argument("initial path does not match model and tau".into()));
                }
                c
            }
            None => PathConfiguration::aligned(model, params.tau)?,
        };
        let coupling = if field > 0.0 {
            Some(trotter_coupling(params.beta, params.tau, field)?)
        } else {
            config.lock_to_first_slice();
            None
        };
        Ok(Chain {
            model,
            config,
            rng: ChainRng::seed_from_u64(params.seed),
            field,
            coupling,
            tanh_a: (params.beta * field / params.tau as f64).tanh(),
            params: params.clone(),
            accepted: 0,
            proposed: 0,
            samples: Samples::default(),
        })
    }

    pub(crate) fn total_sweeps(&self) -> usize {
        self.params.equilibration_sweeps + self.params.measurement_sweeps
    }

    pub(crate) fn coupling(&self) -> Option<f64> {
        self.coupling
    }

    /// Sweep number `index` of the run, counting equilibration first.
    pub(crate) fn step(&mut self, index: usize) {
        let accepted = match self.coupling {
            Some(b) => metropolis_sweep(&mut self.config, self.model, self.params.beta, b, self.params.order, &mut self.rng),
            None => locked_sweep(&mut self.config, self.model, self.params.beta, self.params.order, &mut self.rng),
        };
        let Some(k) = index.checked_sub(self.params.equilibration_sweeps) else {
            return;
        };
        let proposals = match self.coupling {
            Some(_) => self.config.n_spins * self.config.tau,
            None => self.config.n_spins,
        };
        self.accepted += accepted as u64;
        self.proposed += proposals as u64;
        if (k + 1) % self.params.measure_interval == 0 {
            self.measure();
        }
    }

    fn measure(&mut self) {
        let mx = if self.coupling.is_some() {
            mx_from_bonds(self.config.bond_sum(), self.config.n_spins * self.config.tau, self.tanh_a)
        } else {
            0.0
        };
        self.samples.mx.push(mx);
        self.samples.h0.push(slice_average_energy(&self.config, self.model));
        self.samples.mz.push(measure_mz(&self.config));
        self.samples.mz_abs.push(measure_mz_abs(&self.config));
    }

    pub(crate) fn run(&mut self) {
        for index in 0..self.total_sweeps() {
            self.step(index);
        }
    }

    pub(crate) fn record(&self, fluctuation: &FluctuationSpec) -> Result<ObservableRecord> {
        let s = &self.samples;
        if s.mx.len() < 2 {
            return Err(Error::InsufficientStatistics(format!(
                "{} measurements from {} sweeps at interval {}",
                s.mx.len(),
                self.params.measurement_sweeps,
                self.params.measure_interval
            )));
        }
        let mx = binning_analysis(&s.mx)?;
        let h0 = binning_analysis(&s.h0)?;
        let mz = binning_analysis(&s.mz)?;
        let mz_abs = binning_analysis(&s.mz_abs)?;
        let energy = jackknife(&[&s.h0, &s.mx], mx.bin_size.max(h0.bin_size), |m| {
            m[0] - fluctuation.eval(m[1])
        })?;
        Ok(ObservableRecord {
            m_z: mz.estimate(),
            m_z_abs: mz_abs.estimate(),
            m_x: mx.estimate(),
            energy_per_spin: energy,
            acceptance_rate: if self.proposed == 0 {
                0.0
            } else {
                self.accepted as f64 / self.proposed as f64
            },
            effective_field: self.field,
            seed: self.params.seed,
            equilibration_sweeps: self.params.equilibration_sweeps,
            measurement_sweeps: self.params.measurement_sweeps,
            beta: self.params.beta,
            tau: self.params.tau,
            n_spins: self.config.n_spins,
        })
    }
}

/// Equilibrate and measure at effective field `field`; a non-positive field
/// takes the locked zero-field branch and reports m_x = 0.
pub fn run_fixed_field(model: &NonStoqModel, field: f64, params: &MCParams) -> Result<ObservableRecord> {
    run_fixed_field_from(model, field, params, None).map(|(record, _)| record)
}

/// As [`run_fixed_field`], starting from `initial` when given and returning
/// the final path.
pub fn run_fixed_field_from(
    model: &NonStoqModel,
    field: f64,
    params: &MCParams,
    initial: Option<PathConfiguration>,
) -> Result<(ObservableRecord, PathConfiguration)> {
    let mut chain = Chain::new(&model.classical, field, params, initial)?;
    chain.run();
    let record = chain.record(&model.fluctuation)?;
    Ok((record, chain.config))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaExchangeResult {
    /// One record per ladder field, in ladder order.
    pub records: Vec<ObservableRecord>,
    /// Acceptance rate of swaps between ladder positions k and k+1.
    pub swap_acceptance: Vec<f64>,
}

/// log of the Metropolis ratio for exchanging the paths held at couplings
/// `b_lo` and `b_hi` with bond sums `k_lo` and `k_hi`.
pub fn swap_log_ratio(b_lo: f64, k_lo: i64, b_hi: f64, k_hi: i64) -> f64 {
    (b_lo - b_hi) * (k_hi - k_lo) as f64
}

/// Parallel chains over a ladder of effective fields with adjacent path swaps
/// every `exchange_interval` sweeps (0 disables swapping). Chain k is seeded
/// with `sub_seed(params.seed, k)`. Energies are H₀/N − f(mₓ) with the
/// model's own f at every rung.
pub fn replica_exchange_run(
    model: &NonStoqModel,
    ladder: &[f64],
    params: &MCParams,
    exchange_interval: usize,
    execution: Execution,
) -> Result<ReplicaExchangeResult> {
    if ladder.len() < 2 {
        return Err(Error::Argument("replica exchange needs at least two fields".into()));
    }
    if ladder.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Argument("field ladder must be sorted ascending".into()));
    }
    if let Some(&f) = ladder.iter().find(|&&f| !(f > 0.0)) {
        return Err(Error::DegenerateField(f));
    }
    let mut chains = ladder
        .iter()
        .enumerate()
        .map(|(k, &field)| Chain::new(&model.classical, field, &params.with_seed(sub_seed(params.seed, k as u64)), None))
        .collect::<Result<Vec<_>>>()?;
    let mut swap_rng = ChainRng::seed_from_u64(sub_seed(params.seed, u64::MAX));
    let mut attempts = vec![0u64; ladder.len() - 1];
    let mut accepts = vec![0u64; ladder.len() - 1];
    let total = params.equilibration_sweeps + params.measurement_sweeps;
    let block = if exchange_interval == 0 { total.max(1) } else { exchange_interval };
    let mut start = 0;
    while start < total {
        let end = (start + block).min(total);
        parallel::for_each_mut(&mut chains, execution, |chain| {
            for index in start..end {
                chain.step(index);
            }
        });
        if exchange_interval > 0 && end - start == block {
            for k in 0..chains.len() - 1 {
                let (lo, hi) = chains.split_at_mut(k + 1);
                let (a, b) = (&mut lo[k], &mut hi[0]);
                let (Some(b_lo), Some(b_hi)) = (a.coupling(), b.coupling()) else {
                    continue;
                };
                let log_ratio = swap_log_ratio(b_lo, a.config.bond_sum(), b_hi, b.config.bond_sum());
                attempts[k] += 1;
                if log_ratio >= 0.0 || swap_rng.random::<f64>() < log_ratio.exp() {
                    std::mem::swap(&mut a.config, &mut b.config);
                    accepts[k] += 1;
                }
            }
        }
        start = end;
    }
    let records = chains
        .iter()
        .map(|c| c.record(&model.fluctuation))
        .collect::<Result<Vec<_>>>()?;
    let swap_acceptance = attempts
        .iter()
        .zip(&accepts)
        .map(|(&n, &a)| if n == 0 { 0.0 } else { a as f64 / n as f64 })
        .collect();
    Ok(ReplicaExchangeResult {
        records,
        swap_acceptance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ferro(n: usize, h: f64) -> NonStoqModel {
        NonStoqModel::new(
            ClassicalIsing::infinite_range(n, h, 0.5).unwrap(),
            FluctuationSpec::linear(1.0),
        )
    }

    #[test]
    fn coupling_closed_form() {
        let b = trotter_coupling(50.0, 128, 1.0).unwrap();
        // −½ ln tanh(0.390625), evaluated in 50-digit arithmetic
        assert!((b - 0.494_566_604_453_375_9).abs() < 1e-14, "{b:.17}");
        assert!(trotter_coupling(1.0, 4, 1e3).unwrap() < 1e-100);
        assert!(trotter_coupling(1.0, 4, 1e-12).unwrap() > 10.0);
        assert!(trotter_coupling(1.0, 4, 2.0).unwrap() < trotter_coupling(1.0, 4, 1.0).unwrap());
        assert!(matches!(trotter_coupling(1.0, 4, 0.0), Err(Error::DegenerateField(_))));
        assert!(matches!(trotter_coupling(1.0, 4, -1.0), Err(Error::DegenerateField(_))));
    }

    #[test]
    fn infinite_coupling_freezes_time_direction() {
        let model = ferro(4, 0.0);
        let mut config = PathConfiguration::from_column(&[1, -1, 1, 1], 8).unwrap();
        let mut rng = ChainRng::seed_from_u64(1);
        for _ in 0..50 {
            let acc = metropolis_sweep(&mut config, &model.classical, 1.0, f64::INFINITY, SweepOrder::Sequential, &mut rng);
            assert_eq!(acc, 0);
        }
        assert!(config.is_locked());
    }

    #[test]
    fn flat_distribution_accepts_everything() {
        let model = ferro(3, 0.7);
        let mut config = PathConfiguration::aligned(&model.classical, 4).unwrap();
        let mut rng = ChainRng::seed_from_u64(2);
        for order in [SweepOrder::Sequential, SweepOrder::Random] {
            assert_eq!(metropolis_sweep(&mut config, &model.classical, 0.0, 0.0, order, &mut rng), 12);
        }
    }

    #[test]
    fn estimators_on_simple_paths() {
        let up = PathConfiguration::from_column(&[1, 1, 1, 1], 4).unwrap();
        assert_eq!(measure_mz(&up), 1.0);
        assert_eq!(measure_mz_abs(&up), 1.0);
        // tanh(a) = 0.5 when a = atanh(0.5)
        let a = 0.5f64.atanh();
        let mx = measure_mx(&up, a * 4.0, 1.0).unwrap();
        assert!((mx - 0.5).abs() < 1e-15);
        assert!(matches!(measure_mx(&up, 1.0, 0.0), Err(Error::DegenerateField(_))));

        let half = PathConfiguration::from_column(&[1, -1, 1, -1], 4).unwrap();
        assert_eq!(measure_mz(&half), 0.0);

        let mut spins = vec![1i8; 8];
        spins[2] = -1; // site 0 of slice 1 in a 2-site, 4-slice path
        let kink = PathConfiguration::from_spins(2, 4, spins).unwrap();
        let t = 0.3f64;
        let mx = mx_from_bonds(kink.bond_sum(), 8, t);
        assert!((mx - (6.0 * t + 2.0 / t) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_paths_and_params() {
        assert!(PathConfiguration::from_spins(2, 3, vec![1; 6]).is_err());
        assert!(PathConfiguration::from_spins(2, 2, vec![1; 3]).is_err());
        assert!(PathConfiguration::from_spins(2, 2, vec![1, 0, 1, 1]).is_err());
        let mut p = MCParams::new(1.0, 4, 10, 10, 0);
        p.beta = 0.0;
        assert!(p.validate().is_err());
        p.beta = 1.0;
        p.measure_interval = 0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_measurements_is_insufficient() {
        let params = MCParams::new(1.0, 4, 10, 0, 1);
        assert!(matches!(
            run_fixed_field(&ferro(4, 0.1), 1.0, &params),
            Err(Error::InsufficientStatistics(_))
        ));
    }

    #[test]
    fn same_seed_same_record() {
        let model = ferro(6, 0.1);
        let params = MCParams::new(2.0, 8, 100, 400, 42);
        let a = run_fixed_field(&model, 0.8, &params).unwrap();
        let b = run_fixed_field(&model, 0.8, &params).unwrap();
        assert_eq!(a, b);
        let c = run_fixed_field(&model, 0.8, &params.with_seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_field_branch_is_classical() {
        let model = ferro(6, 0.1);
        let params = MCParams::new(5.0, 8, 100, 500, 3);
        let (rec, path) = run_fixed_field_from(&model, 0.0, &params, None).unwrap();
        assert_eq!(rec.m_x.value, 0.0);
        assert!(path.is_locked());
        assert!(rec.m_z_abs.value > 0.99);
        assert!((rec.energy_per_spin.value + 0.6).abs() < 1e-2);
    }

    #[test]
    fn large_field_polarizes_along_x() {
        let model = ferro(4, 0.0);
        let params = MCParams::new(10.0, 16, 200, 2000, 5);
        let rec = run_fixed_field(&model, 50.0, &params).unwrap();
        assert!(rec.m_x.value > 0.98, "{:?}", rec.m_x);
    }

    #[test]
    fn identical_fields_swap_with_certainty() {
        let b = trotter_coupling(4.0, 8, 1.0).unwrap();
        assert_eq!(swap_log_ratio(b, 10, b, -30), 0.0);
        assert_eq!(swap_log_ratio(b, 10, b, -30).exp(), 1.0);
    }

    #[test]
    fn ladder_without_swaps_matches_independent_runs() {
        let model = ferro(4, 0.1);
        let params = MCParams::new(3.0, 8, 50, 300, 9);
        let ladder = [0.6, 1.4];
        for execution in [Execution::Sequential, Execution::Parallel] {
            let re = replica_exchange_run(&model, &ladder, &params, 0, execution).unwrap();
            for (k, &field) in ladder.iter().enumerate() {
                let single = run_fixed_field(&model, field, &params.with_seed(sub_seed(params.seed, k as u64))).unwrap();
                assert_eq!(re.records[k], single);
            }
        }
    }

    #[test]
    fn ladder_validation() {
        let model = ferro(4, 0.1);
        let params = MCParams::new(3.0, 8, 5, 30, 9);
        let seq = Execution::Sequential;
        assert!(replica_exchange_run(&model, &[1.0], &params, 1, seq).is_err());
        assert!(replica_exchange_run(&model, &[1.0, 0.5], &params, 1, seq).is_err());
        assert!(replica_exchange_run(&model, &[0.0, 0.5], &params, 1, seq).is_err());
        let same = replica_exchange_run(&model, &[0.7, 0.7], &params, 1, seq).unwrap();
        assert_eq!(same.swap_acceptance, vec![1.0]);
    }

    #[test]
    fn sub_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|k| sub_seed(7, k)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(sub_seed(7, 0), sub_seed(8, 0));
    }
}
