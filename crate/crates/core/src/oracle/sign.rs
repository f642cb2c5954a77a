use nalgebra::DMatrix;

use super::dense::{basis_spins, check_size, fluctuation_kernel};
use super::x_diagonal_kernel;
use crate::error::{Error, Result};
use crate::model::NonStoqModel;

/// Largest system for the transfer-matrix sign report.
pub const SIGN_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct StoquasticityReport {
    pub stoquastic: bool,
    /// Largest off-diagonal element of H in the σᶻ basis.
    pub max_offdiagonal: f64,
    /// Basis indices (row, column) of that element.
    pub entry: (usize, usize),
}

/// Checks that every off-diagonal element of H in the σᶻ basis is ≤ `tolerance`.
pub fn is_stoquastic(model: &NonStoqModel, tolerance: f64) -> Result<StoquasticityReport> {
    let n = model.n_spins();
    check_size(n, super::DENSE_LIMIT, "is_stoquastic")?;
    // H₀ is diagonal, so off-diagonal elements are the fluctuation kernel at s ⊕ s′ ≠ 0.
    let kernel = fluctuation_kernel(model);
    let (u, max) = kernel
        .iter()
        .enumerate()
        .skip(1)
        .fold((1, f64::NEG_INFINITY), |best, (u, &v)| if v > best.1 { (u, v) } else { best });
    Ok(StoquasticityReport {
        stoquastic: max <= tolerance,
        max_offdiagonal: max,
        entry: (0, u),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    /// Most negative element of the slice transfer matrix.
    pub min_transfer_entry: f64,
    /// Tr(Tᵗ) / Tr(|T|ᵗ) with |T| taken entrywise.
    pub average_sign: f64,
}

/// Sign structure of the naive Trotter slice
/// T = e^{−(β/τ)H₀} · e^{(β/τ)·N·f(Σσˣ/N)} in the σᶻ basis.
pub fn naive_sign_report(model: &NonStoqModel, tau: usize, beta: f64) -> Result<SignReport> {
    let n = model.n_spins();
    check_size(n, SIGN_LIMIT, "naive_sign_report")?;
    if tau == 0 {
        return Err(Error::Argument("tau must be positive".into()));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Argument(format!("beta must be non-negative, got {beta}")));
    }
    let dim = 1usize << n;
    let nf = n as f64;
    let dt = beta / tau as f64;
    let off = x_diagonal_kernel(n, |down| (dt * nf * model.fluctuation.eval((nf - 2.0 * down as f64) / nf)).exp());
    let diag: Vec<f64> = (0..dim)
        .map(|b| (-dt * model.classical.energy_unchecked(&basis_spins(b, n))).exp())
        .collect();
    let t = DMatrix::from_fn(dim, dim, |r, c| diag[r] * off[r ^ c]);
    let abs = t.abs();
    let min_transfer_entry = t.min();
    let signed = t.pow(tau as u32).trace();
    let absolute = abs.pow(tau as u32).trace();
    Ok(SignReport {
        min_transfer_entry,
        average_sign: signed / absolute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassicalIsing, FluctuationSpec};
    use crate::oracle::hamiltonian_matrix;

    fn two_spin(f: FluctuationSpec) -> NonStoqModel {
        NonStoqModel::new(ClassicalIsing::infinite_range(2, 0.1, 0.5).unwrap(), f)
    }

    #[test]
    fn report_matches_explicit_matrix() {
        let model = NonStoqModel::new(
            ClassicalIsing::new(3, vec![(0, 2, 0.4)], vec![0.1, -0.2, 0.3], Some(0.5)).unwrap(),
            FluctuationSpec::linear_quadratic(0.3, 1.2),
        );
        let h = hamiltonian_matrix(&model).unwrap();
        let mut max = f64::NEG_INFINITY;
        for r in 0..8 {
            for c in 0..8 {
                if r != c {
                    max = max.max(h[(r, c)]);
                }
            }
        }
        let rep = is_stoquastic(&model, 1e-12).unwrap();
        assert!((rep.max_offdiagonal - max).abs() < 1e-14);
        let (r, c) = rep.entry;
        assert!((h[(r, c)] - max).abs() < 1e-14);
    }

    #[test]
    fn transverse_field_is_stoquastic() {
        let rep = is_stoquastic(&two_spin(FluctuationSpec::linear(0.7)), 1e-12).unwrap();
        assert!(rep.stoquastic);
        assert!((rep.max_offdiagonal - 0.0).abs() < 1e-14);
        let zero = NonStoqModel::new(
            ClassicalIsing::new(2, vec![], vec![0.0; 2], None).unwrap(),
            FluctuationSpec::linear(0.0),
        );
        assert!(is_stoquastic(&zero, 1e-12).unwrap().stoquastic);
    }

    #[test]
    fn stoquastic_transfer_matrix_is_positive() {
        let rep = naive_sign_report(&two_spin(FluctuationSpec::linear(0.2)), 2, 2.0).unwrap();
        assert!(rep.min_transfer_entry >= 0.0);
        assert!((rep.average_sign - 1.0).abs() < 1e-14);
    }

    #[test]
    fn infinite_temperature_limit() {
        let model = two_spin(FluctuationSpec::linear_quadratic(0.2, 1.0));
        let rep = naive_sign_report(&model, 2, 1e-9).unwrap();
        assert!((rep.average_sign - 1.0).abs() < 1e-6);
        let rep = naive_sign_report(&model, 2, 0.0).unwrap();
        assert_eq!(rep.average_sign, 1.0);
    }

    #[test]
    fn sign_limits() {
        let big = NonStoqModel::new(
            ClassicalIsing::infinite_range(7, 0.0, 0.5).unwrap(),
            FluctuationSpec::linear(1.0),
        );
        assert!(matches!(naive_sign_report(&big, 2, 1.0), Err(Error::SizeLimit { .. })));
    }
}
