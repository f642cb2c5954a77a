//! Crossing-point analysis: sample the stoquastic model over a grid of
//! transverse fields Γ̃, intersect the curve mₓ(Γ̃) with mₓ = f′⁻¹(Γ̃), and
//! remap the intersection to the non-stoquastic model.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassicalIsing, FluctuationSpec, NonStoqModel};
use crate::oracle::exact_observables;
use crate::parallel::{self, Execution};
use crate::pimc::{run_fixed_field, sub_seed, MCParams, ObservableRecord};
use crate::stats::Estimate;

/// Inclusive grid `min, min+step, …, max`; the last point is snapped to `max`
/// when it lies within half a step of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min >= 0.0 && min.is_finite() && max.is_finite()) {
            return Err(Error::Argument(format!("grid bounds must be finite with min >= 0, got {min}:{max}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Argument(format!("grid step must be positive, got {step}")));
        }
        if max < min {
            return Err(Error::Argument(format!("grid max {max} is below min {min}")));
        }
        Ok(Grid { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 0.5).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| if k + 1 == n && n > 1 { self.max } else { self.min + k as f64 * self.step })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `min:max:step`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid must be min:max:step, got {s:?}")));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid value {p:?}: {e}")));
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma_tilde: f64,
    pub record: ObservableRecord,
}

/// Standard transverse-field results over a grid, sorted by Γ̃.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub grid: Grid,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(grid: Grid, rows: Vec<SweepRow>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[1].gamma_tilde > w[0].gamma_tilde)) {
            return Err(Error::Argument("sweep rows must be strictly increasing in gamma_tilde".into()));
        }
        if let Some(first) = rows.first() {
            let r = &first.record;
            if rows
                .iter()
                .any(|row| row.record.n_spins != r.n_spins || row.record.beta != r.beta || row.record.tau != r.tau)
            {
                return Err(Error::Argument("sweep rows must share N, beta and tau".into()));
            }
        }
        Ok(SweepTable { grid, rows })
    }

    fn m_x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.record.m_x.value).collect()
    }

    fn gammas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gamma_tilde).collect()
    }

    /// Linear interpolation of every estimate between the bracketing rows.
    pub fn interpolate(&self, gamma_tilde: f64) -> Result<ObservableRecord> {
        let (k, t) = self.locate(gamma_tilde)?;
        if t == 0.0 {
            return Ok(self.rows[k].record.clone());
        }
        let (a, b) = (&self.rows[k].record, &self.rows[k + 1].record);
        let lerp = |x: f64, y: f64| x + t * (y - x);
        let est = |x: Estimate, y: Estimate| Estimate::new(lerp(x.value, y.value), lerp(x.error, y.error));
        Ok(ObservableRecord {
            m_z: est(a.m_z, b.m_z),
            m_z_abs: est(a.m_z_abs, b.m_z_abs),
            m_x: est(a.m_x, b.m_x),
            energy_per_spin: est(a.energy_per_spin, b.energy_per_spin),
            acceptance_rate: lerp(a.acceptance_rate, b.acceptance_rate),
            effective_field: gamma_tilde,
            ..a.clone()
        })
    }

    /// Index k and fraction t with Γ̃ = Γ̃ₖ + t·(Γ̃ₖ₊₁ − Γ̃ₖ), t ∈ [0, 1).
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let g = self.gammas();
        let (lo, hi) = match (g.first(), g.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Err(Error::Argument("empty sweep table".into())),
        };
        if !(x >= lo && x <= hi) {
            return Err(Error::Extrapolation(x));
        }
        if x == hi {
            return Ok((g.len() - 1, 0.0));
        }
        let k = g.partition_point(|&v| v <= x) - 1;
        Ok((k, (x - g[k]) / (g[k + 1] - g[k])))
    }

    /// ∫_{Γ̃min}^{x} of a piecewise-linear curve through the rows.
    fn integral(&self, values: &[f64], x: f64) -> Result<f64> {
        let g = self.gammas();
        let (k, t) = self.locate(x)?;
        let mut total = 0.0;
        for i in 0..k {
            total += 0.5 * (values[i] + values[i + 1]) * (g[i + 1] - g[i]);
        }
        if t > 0.0 {
            let width = t * (g[k + 1] - g[k]);
            let end = values[k] + t * (values[k + 1] - values[k]);
            total += 0.5 * (values[k] + end) * width;
        }
        Ok(total)
    }
}

/// One standard run per grid point with f = Linear(Γ̃); point k uses seed
/// `sub_seed(params.seed, k)`.
pub fn sweep_standard(classical: &ClassicalIsing, grid: &Grid, params: &MCParams) -> Result<SweepTable> {
    sweep_standard_with(classical, grid, params, Execution::default())
}

pub fn sweep_standard_with(
    classical: &ClassicalIsing,
    grid: &Grid,
    params: &MCParams,
    execution: Execution,
) -> Result<SweepTable> {
    params.validate()?;
    let points = grid.points();
    let rows = parallel::map_indexed(points.len(), execution, |k| {
        let gamma_tilde = points[k];
        let model = NonStoqModel::new(classical.clone(), FluctuationSpec::linear(gamma_tilde));
        run_fixed_field(&model, gamma_tilde, &params.with_seed(sub_seed(params.seed, k as u64)))
            .map(|record| SweepRow { gamma_tilde, record })
            .map_err(|e| e.at_grid_point(gamma_tilde))
    });
    SweepTable::new(*grid, rows.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Exact counterpart of [`sweep_standard`] with zero error bars.
pub fn sweep_exact(classical: &ClassicalIsing, grid: &Grid, beta: f64) -> Result<SweepTable> {
    let rows = grid
        .points()
        .into_iter()
        .map(|gamma_tilde| {
            let model = NonStoqModel::new(classical.clone(), FluctuationSpec::linear(gamma_tilde));
            let r = exact_observables(&model, beta).map_err(|e| e.at_grid_point(gamma_tilde))?;
            Ok(SweepRow {
                gamma_tilde,
                record: exact_record(&r, classical.n_spins(), beta, gamma_tilde),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SweepTable::new(*grid, rows)
}

/// Oracle values as an error-free record (no Trotter slices, no sweeps).
pub fn exact_record(r: &crate::oracle::SpectralResult, n_spins: usize, beta: f64, field: f64) -> ObservableRecord {
    ObservableRecord {
        m_z: Estimate::exact(r.m_z),
        m_z_abs: Estimate::exact(r.m_z_abs),
        m_x: Estimate::exact(r.m_x),
        energy_per_spin: Estimate::exact(r.energy_per_spin),
        acceptance_rate: 0.0,
        effective_field: field,
        seed: 0,
        equilibration_sweeps: 0,
        measurement_sweeps: 0,
        beta,
        tau: 0,
        n_spins,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub gamma_tilde: f64,
    pub m_x: f64,
    /// Standard-model observables interpolated to `gamma_tilde`.
    pub record: ObservableRecord,
    /// Effective free energy Φ, filled when several crossings are compared.
    pub free_energy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMethod {
    OnlyCrossing,
    FreeEnergy,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingResult {
    pub crossings: Vec<Crossing>,
    pub selected_index: Option<usize>,
    pub selection_method: SelectionMethod,
}

impl CrossingResult {
    pub fn selected(&self) -> Option<&Crossing> {
        self.selected_index.map(|i| &self.crossings[i])
    }
}

/// Intersections of the sampled mₓ(Γ̃) with mₓ = f′⁻¹(Γ̃), with selection
/// among multiple solutions by effective free energy.
pub fn find_crossings(table: &SweepTable, f: &FluctuationSpec) -> Result<CrossingResult> {
    if table.rows.len() < 2 {
        return Err(Error::Argument("crossing analysis needs at least two grid points".into()));
    }
    let gammas = table.gammas();
    let mx = table.m_x();
    // f′⁻¹ on the grid; points where the inverse leaves its bracket are skipped
    let mut residual: Vec<Option<f64>> = Vec::with_capacity(gammas.len());
    for (&g, &m) in gammas.iter().zip(&mx) {
        match f.inverse_derivative(g) {
            Ok(inv) => residual.push(Some(m - inv)),
            Err(Error::InverseOutOfBracket { .. }) => residual.push(None),
            Err(e) => return Err(e),
        }
    }
    let mut positions = Vec::new();
    for k in 0..gammas.len() {
        let Some(a) = residual[k] else { continue };
        if a == 0.0 {
            positions.push(gammas[k]);
            continue;
        }
        if let Some(Some(b)) = residual.get(k + 1) {
            if a * b < 0.0 {
                let t = a / (a - b);
                positions.push(gammas[k] + t * (gammas[k + 1] - gammas[k]));
            }
        }
    }
    if positions.is_empty() {
        return Err(Error::NoCrossing {
            min: table.grid.min,
            max: table.grid.max,
        });
    }

    let step = table.grid.step;
    let mut merged: Vec<f64> = Vec::new();
    let mut cluster: Vec<f64> = vec![positions[0]];
    let flush = |cluster: &mut Vec<f64>, merged: &mut Vec<f64>| -> Result<()> {
        merged.push(weighted_midpoint(table, cluster)?);
        cluster.clear();
        Ok(())
    };
    for &p in &positions[1..] {
        if p - cluster[cluster.len() - 1] < step {
            cluster.push(p);
        } else {
            flush(&mut cluster, &mut merged)?;
            cluster.push(p);
        }
    }
    flush(&mut cluster, &mut merged)?;

    let mut crossings = merged
        .into_iter()
        .map(|g| {
            let record = table.interpolate(g)?;
            Ok(Crossing {
                gamma_tilde: g,
                m_x: record.m_x.value,
                record,
                free_energy: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (selected_index, selection_method) = if crossings.len() == 1 {
        (Some(0), SelectionMethod::OnlyCrossing)
    } else {
        let phi = effective_free_energies(table, f, &crossings)?;
        for (c, p) in crossings.iter_mut().zip(&phi) {
            c.free_energy = Some(*p);
        }
        match free_energy_compare(table, f, &crossings)? {
            Some(i) => (Some(i), SelectionMethod::FreeEnergy),
            None => (None, SelectionMethod::Unresolved),
        }
    };
    Ok(CrossingResult {
        crossings,
        selected_index,
        selection_method,
    })
}

fn weighted_midpoint(table: &SweepTable, cluster: &[f64]) -> Result<f64> {
    if cluster.len() == 1 {
        return Ok(cluster[0]);
    }
    let errors = cluster
        .iter()
        .map(|&g| table.interpolate(g).map(|r| r.m_x.error))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = if errors.iter().all(|&e| e > 0.0) {
        errors.iter().map(|e| 1.0 / (e * e)).collect()
    } else {
        vec![1.0; cluster.len()]
    };
    let total: f64 = weights.iter().sum();
    Ok(cluster.iter().zip(&weights).map(|(g, w)| g * w).sum::<f64>() / total)
}

/// Φ(Γ̃*) = −∫_{Γ̃ref}^{Γ̃*} mₓ(u) du + mₓ*·f′(mₓ*) − f(mₓ*), Γ̃ref = grid max.
pub fn effective_free_energies(table: &SweepTable, f: &FluctuationSpec, crossings: &[Crossing]) -> Result<Vec<f64>> {
    let mx = table.m_x();
    let reference = table.gammas()[table.rows.len() - 1];
    let total = table.integral(&mx, reference)?;
    crossings
        .iter()
        .map(|c| {
            let m = c.m_x;
            Ok(total - table.integral(&mx, c.gamma_tilde)? + m * f.derivative(m) - f.eval(m))
        })
        .collect()
}

/// Index of the crossing with the lowest Φ, or `None` when the two lowest
/// differ by less than the integrated error bar between them.
pub fn free_energy_compare(table: &SweepTable, f: &FluctuationSpec, crossings: &[Crossing]) -> Result<Option<usize>> {
    match crossings.len() {
        0 => return Err(Error::Argument("no crossings to compare".into())),
        1 => return Ok(Some(0)),
        _ => {}
    }
    let lo = table.grid.min.min(table.gammas()[0]);
    let hi = table.gammas()[table.rows.len() - 1];
    if let Some(c) = crossings.iter().find(|c| !(c.gamma_tilde >= lo && c.gamma_tilde <= hi)) {
        return Err(Error::Extrapolation(c.gamma_tilde));
    }
    let phi = effective_free_energies(table, f, crossings)?;
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| phi[a].total_cmp(&phi[b]));
    let (best, second) = (order[0], order[1]);
    let errors: Vec<f64> = table.rows.iter().map(|r| r.record.m_x.error).collect();
    let (a, b) = (crossings[best].gamma_tilde, crossings[second].gamma_tilde);
    let spread = (table.integral(&errors, a.max(b))? - table.integral(&errors, a.min(b))?).abs();
    let tolerance = spread.max(1e-12);
    Ok(if phi[second] - phi[best] <= tolerance { None } else { Some(best) })
}

/// The selected crossing as a record of the non-stoquastic model:
/// E = ⟨H₀⟩/N − f(mₓ*).
pub fn remap(result: &CrossingResult, f: &FluctuationSpec) -> Result<ObservableRecord> {
    let c = result.selected().ok_or(Error::MustSelect)?;
    let mut record = c.record.clone();
    let m = c.m_x;
    record.energy_per_spin.value += c.gamma_tilde * m - f.eval(m);
    record.effective_field = c.gamma_tilde;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(grid: Grid, curve: impl Fn(f64) -> f64, err: f64) -> SweepTable {
        let rows = grid
            .points()
            .into_iter()
            .map(|g| {
                let mut record = exact_record(
                    &crate::oracle::SpectralResult {
                        m_z: 0.0,
                        m_z_abs: 0.5,
                        m_x: curve(g),
                        energy_per_spin: -1.0 - g * curve(g),
                        free_energy_per_spin: 0.0,
                        ground_energy_per_spin: 0.0,
                        sectors: 1,
                        dimension: 1.0,
                    },
                    8,
                    10.0,
                    g,
                );
                record.m_x.error = err;
                SweepRow { gamma_tilde: g, record }
            })
            .collect();
        SweepTable::new(grid, rows).unwrap()
    }

    #[test]
    fn grid_parsing_and_points() {
        let g: Grid = "0:4:0.05".parse().unwrap();
        assert_eq!(g.len(), 81);
        let p = g.points();
        assert_eq!(p[0], 0.0);
        assert_eq!(p[80], 4.0);
        let single: Grid = "1:1:0.05".parse().unwrap();
        assert_eq!(single.points(), vec![1.0]);
        // max within half a step of the last regular point is snapped
        let snapped = Grid::new(0.0, 1.02, 0.1).unwrap();
        assert_eq!(snapped.len(), 11);
        assert_eq!(*snapped.points().last().unwrap(), 1.02);
        assert!("0:4".parse::<Grid>().is_err());
        assert!("0:4:0".parse::<Grid>().is_err());
        assert!("-1:4:0.1".parse::<Grid>().is_err());
        assert!("2:1:0.1".parse::<Grid>().is_err());
        assert!(matches!("a:1:0.1".parse::<Grid>(), Err(Error::Parse(_))));
        assert_eq!(g.to_string().parse::<Grid>().unwrap(), g);
    }

    #[test]
    fn crossing_of_two_lines() {
        let table = synthetic(Grid::new(0.0, 4.0, 0.05).unwrap(), |g| g / 4.0, 0.0);
        let res = find_crossings(&table, &FluctuationSpec::linear_quadratic(2.0, 1.0)).unwrap();
        assert_eq!(res.crossings.len(), 1);
        assert_eq!(res.selection_method, SelectionMethod::OnlyCrossing);
        let c = res.selected().unwrap();
        assert!((c.gamma_tilde - 1.6).abs() < 1e-12);
        assert!((c.m_x - 0.4).abs() < 1e-12);
    }

    #[test]
    fn vanishing_xx_recovers_transverse_field() {
        let table = synthetic(Grid::new(0.0, 4.0, 0.05).unwrap(), |g| (g / 2.0).tanh(), 0.0);
        let res = find_crossings(&table, &FluctuationSpec::linear_quadratic(1.3, 1e-7)).unwrap();
        assert!((res.selected().unwrap().gamma_tilde - 1.3).abs() < 1e-5);
    }

    #[test]
    fn no_crossing_and_unsupported_inverse() {
        let table = synthetic(Grid::new(0.0, 1.0, 0.1).unwrap(), |_| -1.0, 0.0);
        let err = find_crossings(&table, &FluctuationSpec::linear_quadratic(2.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NoCrossing { min, max } if min == 0.0 && max == 1.0));
        assert!(matches!(
            find_crossings(&table, &FluctuationSpec::linear(1.0)),
            Err(Error::UnsupportedInverse(_))
        ));
    }

    #[test]
    fn nearby_crossings_merge() {
        // zig-zag noise around the line produces three sign changes within one step
        let grid = Grid::new(0.0, 2.0, 0.1).unwrap();
        let f = FluctuationSpec::linear_quadratic(1.0, 1.0);
        let noisy = |g: f64| {
            let k = (g / 0.1).round() as i64;
            let line = 1.0 - g;
            match k {
                5 => line - 0.04,
                6 => line + 0.01,
                7 => line - 0.04,
                _ if k < 5 => line - 0.2,
                _ => line + 0.2,
            }
        };
        let table = synthetic(grid, noisy, 0.01);
        let res = find_crossings(&table, &f).unwrap();
        assert_eq!(res.crossings.len(), 1);
        let g = res.crossings[0].gamma_tilde;
        assert!(g > 0.5 && g < 0.8, "{g}");
    }

    #[test]
    fn exact_zero_on_grid_counts_once() {
        let table = synthetic(Grid::new(0.0, 2.0, 0.5).unwrap(), |g| 2.0 - g, 0.0);
        // f′⁻¹(Γ̃) = Γ̃ crosses 2 − Γ̃ exactly at the grid point 1.0
        let res = find_crossings(&table, &FluctuationSpec::linear_quadratic(0.0, -1.0)).unwrap();
        assert_eq!(res.crossings.len(), 1);
        assert_eq!(res.crossings[0].gamma_tilde, 1.0);
    }

    #[test]
    fn free_energy_selection_and_ties() {
        let grid = Grid::new(0.0, 2.0, 0.05).unwrap();
        // m_x(Γ̃) = Γ̃ up to 1, then flat; the line Γ̃/1.5 meets it at 0 and 1.5
        let table = synthetic(grid, |g| g.min(1.0), 0.0);
        let f = FluctuationSpec::linear_quadratic(0.0, -1.5);
        let res = find_crossings(&table, &f).unwrap();
        assert_eq!(res.crossings.len(), 2);
        assert!((res.crossings[1].gamma_tilde - 1.5).abs() < 1e-12);
        // Φ(0) = ∫₀² m du = 1.5; Φ(1.5) = 0.5 + 0.75
        let phi: Vec<f64> = res.crossings.iter().map(|c| c.free_energy.unwrap()).collect();
        assert!((phi[0] - 1.5).abs() < 1e-12);
        assert!((phi[1] - 1.25).abs() < 1e-12);
        assert_eq!(res.selection_method, SelectionMethod::FreeEnergy);
        assert_eq!(res.selected_index, Some(1));

        // with error bars wider than the gap the comparison is a tie
        let noisy = synthetic(grid, |g| g.min(1.0), 0.5);
        let res = find_crossings(&noisy, &f).unwrap();
        assert_eq!(res.selection_method, SelectionMethod::Unresolved);
        assert!(matches!(remap(&res, &f), Err(Error::MustSelect)));

        assert_eq!(free_energy_compare(&table, &f, &res.crossings[..1]).unwrap(), Some(0));
        let mut outside = res.crossings.clone();
        outside[0].gamma_tilde = 3.0;
        assert!(matches!(free_energy_compare(&table, &f, &outside), Err(Error::Extrapolation(_))));
    }

    #[test]
    fn remap_energy_identity() {
        let table = synthetic(Grid::new(0.0, 4.0, 0.05).unwrap(), |g| g / 4.0, 0.0);
        let f = FluctuationSpec::linear_quadratic(2.0, 1.0);
        let res = find_crossings(&table, &f).unwrap();
        let c = res.selected().unwrap();
        let remapped = remap(&res, &f).unwrap();
        let expected = c.gamma_tilde * c.m_x - (2.0 * c.m_x - c.m_x * c.m_x / 2.0);
        assert!((remapped.energy_per_spin.value - c.record.energy_per_spin.value - expected).abs() < 1e-12);
        assert_eq!(remapped.m_x, c.record.m_x);
    }

    #[test]
    fn interpolation_hits_rows_and_midpoints() {
        let table = synthetic(Grid::new(0.0, 1.0, 0.5).unwrap(), |g| g, 0.0);
        assert_eq!(table.interpolate(0.5).unwrap().m_x.value, 0.5);
        assert_eq!(table.interpolate(1.0).unwrap().m_x.value, 1.0);
        assert!((table.interpolate(0.25).unwrap().m_x.value - 0.25).abs() < 1e-15);
        assert!(matches!(table.interpolate(1.5), Err(Error::Extrapolation(_))));
        assert!((table.integral(&table.m_x(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((table.integral(&table.m_x(), 0.75).unwrap() - 0.28125).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_ordered_and_deterministic() {
        let classical = ClassicalIsing::infinite_range(4, 0.1, 0.5).unwrap();
        let grid = Grid::new(0.0, 1.0, 0.5).unwrap();
        let params = MCParams::new(2.0, 8, 100, 400, 21);
        let a = sweep_standard_with(&classical, &grid, &params, Execution::Sequential).unwrap();
        let b = sweep_standard_with(&classical, &grid, &params, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3);
        assert_eq!(a.rows[0].record.m_x.value, 0.0);
        assert_eq!(a.rows[1].record.seed, sub_seed(21, 1));
        let bad = MCParams::new(2.0, 8, 0, 1, 21);
        let err = sweep_standard(&classical, &grid, &bad).unwrap_err();
        assert!(matches!(err, Error::AtGridPoint { gamma_tilde, .. } if gamma_tilde == 0.0));
    }
}
