//! Total-spin sector solver for H = −h·Σσᶻ − J·(Σσᶻ)²/N − N·f(Σσˣ/N).
//!
//! Collective operators act within each spin-S multiplet, so the 2ᴺ space
//! splits into blocks of size 2S+1 repeated g(N, S) times.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{thermal_average, Block, SpectralResult};
use crate::error::{Error, Result};
use crate::model::FluctuationSpec;

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// ln g(N, S) with 2S = N − 2k, g = C(N, k) − C(N, k−1).
fn ln_multiplicity(n: usize, k: usize) -> f64 {
    let base = ln_binomial(n, k);
    if k == 0 {
        base
    } else {
        base + (1.0 - k as f64 / (n - k + 1) as f64).ln()
    }
}

/// Sector 2S = n − 2k: diagonal of 2S_z (in units of 1, i.e. eigenvalues of
/// Σσᶻ from +2S down to −2S) and the tridiagonal 2S_x.
fn sector_operators(two_s: usize) -> (Vec<f64>, DMatrix<f64>) {
    let dim = two_s + 1;
    let s = two_s as f64 / 2.0;
    let sz: Vec<f64> = (0..dim).map(|k| two_s as f64 - 2.0 * k as f64).collect();
    let mut sx = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        // ⟨m+1|S₊|m⟩ = √(S(S+1) − m(m+1)), m = S − k
        let m = s - k as f64;
        let amp = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
        sx[(k - 1, k)] = amp;
        sx[(k, k - 1)] = amp;
    }
    (sz, sx)
}

fn check(n_spins: usize, beta: f64) -> Result<()> {
    if n_spins == 0 {
        return Err(Error::Argument("need at least one spin".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Argument(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// Exact thermal averages of the uniform infinite-range model.
pub fn spin_symmetric_exact(
    h: f64,
    coupling: f64,
    fluctuation: &FluctuationSpec,
    beta: f64,
    n_spins: usize,
) -> Result<SpectralResult> {
    check(n_spins, beta)?;
    let n = n_spins as f64;
    let mut blocks = Vec::new();
    let mut dimension = 0.0;
    for k in 0..=n_spins / 2 {
        let two_s = n_spins - 2 * k;
        let (sz, sx) = sector_operators(two_s);
        let dim = two_s + 1;
        let rotation = SymmetricEigen::new(sx.clone());
        let fluct_diag: Vec<f64> = rotation
            .eigenvalues
            .iter()
            .map(|&x| -n * fluctuation.eval(x / n))
            .collect();
        let u = &rotation.eigenvectors;
        let mut hamiltonian = u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(fluct_diag)) * u.transpose();
        for (i, &m) in sz.iter().enumerate() {
            hamiltonian[(i, i)] += -h * m - coupling * m * m / n;
        }
        let eig = SymmetricEigen::new(hamiltonian);
        let v = &eig.eigenvectors;
        let sx_v = &sx * v;
        let mut block = Block {
            ln_multiplicity: ln_multiplicity(n_spins, k),
            energies: eig.eigenvalues.iter().copied().collect(),
            m_z: Vec::with_capacity(dim),
            m_z_abs: Vec::with_capacity(dim),
            m_x: Vec::with_capacity(dim),
        };
        for col in 0..dim {
            let (mut z, mut za, mut x) = (0.0, 0.0, 0.0);
            for row in 0..dim {
                let p = v[(row, col)] * v[(row, col)];
                z += p * sz[row];
                za += p * sz[row].abs();
                x += v[(row, col)] * sx_v[(row, col)];
            }
            block.m_z.push(z / n);
            block.m_z_abs.push(za / n);
            block.m_x.push(x / n);
        }
        dimension += block.ln_multiplicity.exp() * dim as f64;
        blocks.push(block);
    }
    thermal_average(&blocks, beta, n_spins, dimension)
}

/// Exact averages of the discrete-time path weight at Trotter number τ for
/// the uniform model with pure transverse field `field`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterResult {
    /// Expectation of the tanh/coth bond estimator.
    pub m_x: f64,
    /// Expectation of the slice-averaged |Σσᶻ|/N.
    pub m_z_abs: f64,
    /// Expectation of the slice-averaged H₀/N.
    pub classical_energy_per_spin: f64,
}

impl TrotterResult {
    /// Energy estimator H₀/N − field·m_x of the path-integral engine.
    pub fn energy_per_spin(&self, field: f64) -> f64 {
        self.classical_energy_per_spin - field * self.m_x
    }
}

/// Tr[(D T)^τ O] / Tr[(D T)^τ] with D = e^{−(β/τ)H₀} and T = e^{(β/τ)·field·Σσˣ},
/// sector by sector. These are exactly the averages the path-integral chain
/// converges to at finite τ.
pub fn trotter_exact(h: f64, coupling: f64, field: f64, beta: f64, tau: usize, n_spins: usize) -> Result<TrotterResult> {
    check(n_spins, beta)?;
    if !(field > 0.0) {
        return Err(Error::DegenerateField(field));
    }
    let n = n_spins as f64;
    let a = beta * field / tau as f64;
    let mut sectors = Vec::new();
    let mut max_log = f64::NEG_INFINITY;
    for k in 0..=n_spins / 2 {
        let two_s = n_spins - 2 * k;
        let (sz, sx) = sector_operators(two_s);
        let dim = two_s + 1;
        let h0: Vec<f64> = sz.iter().map(|&m| -h * m - coupling * m * m / n).collect();
        let rot = SymmetricEigen::new(sx.clone());
        let u = &rot.eigenvectors;
        // e^{a·2S_x}, shifted by the largest eigenvalue to stay finite
        let shift = a * two_s as f64;
        let expo = nalgebra::DVector::from_iterator(dim, rot.eigenvalues.iter().map(|&x| (a * x - shift).exp()));
        let t = u * DMatrix::from_diagonal(&expo) * u.transpose();
        let h0_min = h0.iter().copied().fold(f64::INFINITY, f64::min);
        let d = nalgebra::DVector::from_iterator(dim, h0.iter().map(|&e| (-(beta / tau as f64) * (e - h0_min)).exp()));
        let mut step = DMatrix::from_diagonal(&d) * t;
        // repeated squaring with renormalization; τ is even but not a power of two
        let mut ln_scale = 0.0;
        let mut power = DMatrix::<f64>::identity(dim, dim);
        let mut remaining = tau;
        let mut ln_step = 0.0;
        while remaining > 0 {
            if remaining & 1 == 1 {
                power = &power * &step;
                let norm = power.amax();
                power /= norm;
                ln_scale += norm.ln() + ln_step;
            }
            remaining >>= 1;
            if remaining > 0 {
                step = &step * &step;
                let norm = step.amax();
                step /= norm;
                ln_step = 2.0 * ln_step + norm.ln();
            }
        }
        let trace = power.trace();
        let ln_trace = trace.ln() + ln_scale + tau as f64 * (shift - (beta / tau as f64) * h0_min);
        let ln_weight = ln_multiplicity(n_spins, k) + ln_trace;
        let sx_part = (&power * &sx).trace() / trace / n;
        let mut za = 0.0;
        let mut e0 = 0.0;
        for i in 0..dim {
            za += power[(i, i)] * sz[i].abs();
            e0 += power[(i, i)] * h0[i];
        }
        max_log = max_log.max(ln_weight);
        sectors.push((ln_weight, sx_part, za / trace / n, e0 / trace / n));
    }
    let (mut z, mut mx, mut mz, mut e) = (0.0, 0.0, 0.0, 0.0);
    for (lw, x, za, e0) in sectors {
        let w = (lw - max_log).exp();
        z += w;
        mx += w * x;
        mz += w * za;
        e += w * e0;
    }
    Ok(TrotterResult {
        m_x: mx / z,
        m_z_abs: mz / z,
        classical_energy_per_spin: e / z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spin_ground_energy() {
        let (h, g) = (0.3, 0.4);
        let r = spin_symmetric_exact(h, 0.0, &FluctuationSpec::linear(g), 200.0, 1).unwrap();
        let e = (h * h + g * g).sqrt();
        assert!((r.ground_energy_per_spin + e).abs() < 1e-12);
        assert!((r.m_x - g / e).abs() < 1e-10);
        assert!((r.m_z - h / e).abs() < 1e-10);
    }

    #[test]
    fn dimension_audit() {
        for n in 1..=12 {
            let r = spin_symmetric_exact(0.1, 0.5, &FluctuationSpec::linear(1.0), 1.0, n).unwrap();
            assert!((r.dimension - (1u64 << n) as f64).abs() < 1e-6, "N={n}");
        }
        // N = 4: multiplicities 1, 3, 2 for S = 2, 1, 0
        let g: Vec<f64> = (0..=2).map(|k| ln_multiplicity(4, k).exp()).collect();
        for (a, b) in g.iter().zip([1.0, 3.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = spin_symmetric_exact(0.1, 0.5, &FluctuationSpec::linear(1.0), 1.0, 4).unwrap();
        assert_eq!(r.sectors, 3);
    }

    #[test]
    fn large_systems_are_cheap() {
        let r = spin_symmetric_exact(0.1, 0.5, &FluctuationSpec::linear_quadratic(1.0, 1.0), 50.0, 32).unwrap();
        assert_eq!(r.sectors, 17);
        assert!(r.m_z_abs <= 1.0 && r.m_x.abs() <= 1.0);
    }

    #[test]
    fn trotter_result_approaches_continuum() {
        let exact = spin_symmetric_exact(0.1, 0.5, &FluctuationSpec::linear(1.0), 4.0, 4).unwrap();
        let mut last = f64::INFINITY;
        for tau in [8, 16, 32, 64, 128] {
            let t = trotter_exact(0.1, 0.5, 1.0, 4.0, tau, 4).unwrap();
            let err = (t.m_x - exact.m_x).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-4);
        let t = trotter_exact(0.1, 0.5, 1.0, 4.0, 4096, 4).unwrap();
        assert!((t.energy_per_spin(1.0) - exact.energy_per_spin).abs() < 1e-5);
        assert!((t.m_z_abs - exact.m_z_abs).abs() < 1e-5);
    }
}
