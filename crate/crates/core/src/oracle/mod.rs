//! Exact reference solvers for small or permutation-symmetric models.
//!
//! * [`spin_symmetric_exact`] block-diagonalizes uniform infinite-range models
//!   into total-spin sectors and handles hundreds of spins.
//! * [`dense_ed`] diagonalizes any model in the full 2ᴺ space (N ≤ 12).
//! * [`trotter_exact`] evaluates the discrete-imaginary-time partition function
//!   sampled by the path-integral engine, without Trotter extrapolation.
//! * [`is_stoquastic`] and [`naive_sign_report`] expose the sign structure of
//!   the Hamiltonian and of its naive Trotter transfer matrix.

mod dense;
mod sign;
mod symmetric;

pub use dense::{dense_ed, hamiltonian_matrix, DENSE_LIMIT};
pub use sign::{is_stoquastic, naive_sign_report, SignReport, StoquasticityReport, SIGN_LIMIT};
pub use symmetric::{spin_symmetric_exact, trotter_exact, TrotterResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NonStoqModel;

/// Exact thermal averages at inverse temperature β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub m_z: f64,
    /// ⟨|Σσᶻ|⟩/N
    pub m_z_abs: f64,
    pub m_x: f64,
    pub energy_per_spin: f64,
    pub free_energy_per_spin: f64,
    pub ground_energy_per_spin: f64,
    /// Number of diagonalized blocks (1 for dense ED).
    pub sectors: usize,
    /// Hilbert-space dimension covered, counting multiplicities.
    pub dimension: f64,
}

/// Picks the spin-symmetric solver for uniform models and dense ED otherwise.
pub fn exact_observables(model: &NonStoqModel, beta: f64) -> Result<SpectralResult> {
    match model.classical.uniform_parameters() {
        Some((h, j)) => spin_symmetric_exact(h, j, &model.fluctuation, beta, model.n_spins()),
        None => dense_ed(model, beta),
    }
}

/// One diagonalized block: eigenvalues with per-eigenstate expectation values,
/// repeated `ln_multiplicity` times (natural log).
pub(crate) struct Block {
    pub ln_multiplicity: f64,
    pub energies: Vec<f64>,
    pub m_z: Vec<f64>,
    pub m_z_abs: Vec<f64>,
    pub m_x: Vec<f64>,
}

/// Boltzmann averages over blocks, stable through log-sum-exp.
pub(crate) fn thermal_average(blocks: &[Block], beta: f64, n_spins: usize, dimension: f64) -> Result<SpectralResult> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Argument(format!("beta must be positive, got {beta}")));
    }
    let e0 = blocks
        .iter()
        .flat_map(|b| b.energies.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let max_log = blocks
        .iter()
        .flat_map(|b| b.energies.iter().map(move |&e| b.ln_multiplicity - beta * (e - e0)))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let (mut mz, mut mz_abs, mut mx, mut energy) = (0.0, 0.0, 0.0, 0.0);
    for b in blocks {
        for k in 0..b.energies.len() {
            let w = (b.ln_multiplicity - beta * (b.energies[k] - e0) - max_log).exp();
            z += w;
            mz += w * b.m_z[k];
            mz_abs += w * b.m_z_abs[k];
            mx += w * b.m_x[k];
            energy += w * b.energies[k];
        }
    }
    let n = n_spins as f64;
    let ln_z = z.ln() + max_log - beta * e0;
    Ok(SpectralResult {
        m_z: mz / z,
        m_z_abs: mz_abs / z,
        m_x: mx / z,
        energy_per_spin: energy / z / n,
        free_energy_per_spin: -ln_z / (beta * n),
        ground_energy_per_spin: e0 / n,
        sectors: blocks.len(),
        dimension,
    })
}

/// In-place Walsh–Hadamard transform (unnormalized).
pub(crate) fn walsh_hadamard(values: &mut [f64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Matrix elements of a σˣ-diagonal operator in the σᶻ basis.
///
/// An operator with eigenvalue `g(k)` on σˣ product states with k spins along
/// −x has σᶻ-basis elements depending only on s ⊕ s′; entry `u` of the result
/// is the element for s ⊕ s′ = u.
pub(crate) fn x_diagonal_kernel(n_spins: usize, g: impl Fn(usize) -> f64) -> Vec<f64> {
    let dim = 1usize << n_spins;
    let mut kernel: Vec<f64> = (0..dim).map(|x| g((x as u32).count_ones() as usize)).collect();
    walsh_hadamard(&mut kernel);
    kernel.iter_mut().for_each(|v| *v /= dim as f64);
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_twice_is_scaled_identity() {
        let orig = vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 2.0, -1.0];
        let mut v = orig.clone();
        walsh_hadamard(&mut v);
        walsh_hadamard(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a / 8.0 - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sigma_x_sum_kernel() {
        // Σσˣ has eigenvalue N − 2k; in the σᶻ basis it connects single flips with weight 1
        let n = 3;
        let k = x_diagonal_kernel(n, |down| (n as f64) - 2.0 * down as f64);
        for (u, &v) in k.iter().enumerate() {
            let expected = if u.count_ones() == 1 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-15, "{u}: {v}");
        }
    }
}
