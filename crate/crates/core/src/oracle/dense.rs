use faer::{Mat, Side};
use nalgebra::DMatrix;

use super::{thermal_average, x_diagonal_kernel, Block, SpectralResult};
use crate::error::{Error, Result};
use crate::model::NonStoqModel;

/// Largest system handled by full diagonalization (dimension 4096).
pub const DENSE_LIMIT: usize = 12;

/// σᶻ of site `i` in basis state `b`: bit set means −1.
pub(crate) fn basis_spins(b: usize, n: usize) -> Vec<i8> {
    (0..n).map(|i| if (b >> i) & 1 == 1 { -1 } else { 1 }).collect()
}

pub(crate) fn fluctuation_kernel(model: &NonStoqModel) -> Vec<f64> {
    let n = model.n_spins();
    let nf = n as f64;
    x_diagonal_kernel(n, |down| -nf * model.fluctuation.eval((nf - 2.0 * down as f64) / nf))
}

pub(crate) fn check_size(n: usize, limit: usize, method: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit { n, limit, method });
    }
    Ok(())
}

/// H in the σᶻ product basis; basis index bit i set means σᵢᶻ = −1.
pub fn hamiltonian_matrix(model: &NonStoqModel) -> Result<DMatrix<f64>> {
    let n = model.n_spins();
    check_size(n, DENSE_LIMIT, "dense_ed")?;
    let dim = 1usize << n;
    let kernel = fluctuation_kernel(model);
    let mut h = DMatrix::from_fn(dim, dim, |r, c| kernel[r ^ c]);
    for b in 0..dim {
        h[(b, b)] += model.classical.energy_unchecked(&basis_spins(b, n));
    }
    Ok(h)
}

/// Thermal averages by full diagonalization.
pub fn dense_ed(model: &NonStoqModel, beta: f64) -> Result<SpectralResult> {
    let n = model.n_spins();
    check_size(n, DENSE_LIMIT, "dense_ed")?;
    let dim = 1usize << n;
    let kernel = fluctuation_kernel(model);
    let diagonal: Vec<f64> = (0..dim)
        .map(|b| model.classical.energy_unchecked(&basis_spins(b, n)))
        .collect();
    let h = Mat::<f64>::from_fn(dim, dim, |r, c| kernel[r ^ c] + if r == c { diagonal[r] } else { 0.0 });
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Argument(format!("eigendecomposition failed: {e:?}")))?;
    let v = eig.U();
    let mz_diag: Vec<f64> = (0..dim)
        .map(|b| basis_spins(b, n).iter().map(|&s| f64::from(s)).sum::<f64>())
        .collect();
    let mut block = Block {
        ln_multiplicity: 0.0,
        energies: (0..dim).map(|k| eig.S()[k]).collect(),
        m_z: Vec::with_capacity(dim),
        m_z_abs: Vec::with_capacity(dim),
        m_x: Vec::with_capacity(dim),
    };
    let nf = n as f64;
    for col in 0..dim {
        let psi = v.col(col);
        let (mut z, mut za, mut x) = (0.0, 0.0, 0.0);
        for b in 0..dim {
            let amp = psi[b];
            z += amp * amp * mz_diag[b];
            za += amp * amp * mz_diag[b].abs();
            let mut flipped = 0.0;
            for i in 0..n {
                flipped += psi[b ^ (1 << i)];
            }
            x += amp * flipped;
        }
        block.m_z.push(z / nf);
        block.m_z_abs.push(za / nf);
        block.m_x.push(x / nf);
    }
    thermal_average(&[block], beta, n, dim as f64)
}
