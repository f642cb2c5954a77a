//! Classical Ising part H₀, the fluctuation function f and the combined
//! Hamiltonian H = H₀(σᶻ) − N·f((1/N)Σσᵢˣ).
//!
//! Spin configurations are slices of `i8` holding ±1.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Default strength of the uniform all-to-all coupling, −J·N·m_z².
///
/// With J = 1/2 the zero-field infinite-range model orders below a transverse
/// field of 1 (checked against the exact solver in the test suite).
pub const DEFAULT_INFINITE_RANGE_COUPLING: f64 = 0.5;

/// Root-finding tolerance for the polynomial inverse derivative.
pub const INVERSE_TOLERANCE: f64 = 1e-10;

/// Diagonal Ising Hamiltonian
/// H₀(σ) = −Σ_{i<j} Jᵢⱼσᵢσⱼ − Σᵢ hᵢσᵢ − J_ir·N·m_z²,  m_z = (1/N)Σσᵢ.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalIsing {
    n_spins: usize,
    couplings: Vec<(usize, usize, f64)>,
    neighbors: Vec<Vec<(usize, f64)>>,
    fields: Vec<f64>,
    infinite_range: Option<f64>,
}

impl ClassicalIsing {
    /// Every unordered pair may appear once; listing (i, j) and (j, i) is an error.
    pub fn new(
        n_spins: usize,
        couplings: Vec<(usize, usize, f64)>,
        fields: Vec<f64>,
        infinite_range: Option<f64>,
    ) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::Argument("n_spins must be positive".into()));
        }
        if fields.len() != n_spins {
            return Err(Error::Argument(format!(
                "expected {} local fields, got {}",
                n_spins,
                fields.len()
            )));
        }
        if fields.iter().any(|h| !h.is_finite()) {
            return Err(Error::Argument("local fields must be finite".into()));
        }
        if let Some(j) = infinite_range {
            if !j.is_finite() {
                return Err(Error::Argument("infinite-range coupling must be finite".into()));
            }
        }
        let mut seen = HashSet::new();
        let mut neighbors = vec![Vec::new(); n_spins];
        for &(i, j, value) in &couplings {
            if i >= n_spins || j >= n_spins {
                return Err(Error::Argument(format!(
                    "coupling ({i}, {j}) out of range for {n_spins} spins"
                )));
            }
            if i == j {
                return Err(Error::Argument(format!("self-coupling on site {i}")));
            }
            if !value.is_finite() {
                return Err(Error::Argument(format!("coupling ({i}, {j}) is not finite")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Argument(format!(
                    "pair ({i}, {j}) listed more than once"
                )));
            }
            neighbors[i].push((j, value));
            neighbors[j].push((i, value));
        }
        Ok(ClassicalIsing {
            n_spins,
            couplings,
            neighbors,
            fields,
            infinite_range,
        })
    }

    /// Uniform infinite-range ferromagnet −h·Σσᵢ − J_ir·N·m_z².
    pub fn infinite_range(n_spins: usize, field: f64, coupling: f64) -> Result<Self> {
        Self::new(n_spins, Vec::new(), vec![field; n_spins], Some(coupling))
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn couplings(&self) -> &[(usize, usize, f64)] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn infinite_range_coupling(&self) -> Option<f64> {
        self.infinite_range
    }

    /// `(h, J_ir)` when the model is permutation symmetric: no pair couplings
    /// and identical local fields.
    pub fn uniform_parameters(&self) -> Option<(f64, f64)> {
        if !self.couplings.iter().all(|&(_, _, j)| j == 0.0) {
            return None;
        }
        let h = self.fields[0];
        if self.fields.iter().any(|&x| x != h) {
            return None;
        }
        Some((h, self.infinite_range.unwrap_or(0.0)))
    }

    fn check_spins(&self, spins: &[i8]) -> Result<()> {
        if spins.len() != self.n_spins {
            return Err(Error::Argument(format!(
                "configuration has {} spins, model has {}",
                spins.len(),
                self.n_spins
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Argument("spins must be +1 or -1".into()));
        }
        Ok(())
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        self.check_spins(spins)?;
        Ok(self.energy_unchecked(spins))
    }

    pub(crate) fn energy_unchecked(&self, spins: &[i8]) -> f64 {
        let pair: f64 = self
            .couplings
            .iter()
            .map(|&(i, j, c)| c * f64::from(spins[i] * spins[j]))
            .sum();
        let field: f64 = self
            .fields
            .iter()
            .zip(spins)
            .map(|(h, &s)| h * f64::from(s))
            .sum();
        let magnetization: i64 = spins.iter().map(|&s| i64::from(s)).sum();
        -pair - field - self.infinite_range_energy(magnetization)
    }

    fn infinite_range_energy(&self, magnetization: i64) -> f64 {
        match self.infinite_range {
            Some(j) => j * (magnetization * magnetization) as f64 / self.n_spins as f64,
            None => 0.0,
        }
    }

    /// Energy change from flipping `site`, computed from its local field.
    pub fn energy_delta(&self, spins: &[i8], site: usize) -> Result<f64> {
        self.check_spins(spins)?;
        if site >= self.n_spins {
            return Err(Error::Argument(format!(
                "flip index {site} out of range for {} spins",
                self.n_spins
            )));
        }
        let magnetization: i64 = spins.iter().map(|&s| i64::from(s)).sum();
        Ok(self.flip_delta(spins, site, magnetization))
    }

    /// `magnetization` is Σσᵢ of `spins` before the flip.
    #[inline]
    pub(crate) fn flip_delta(&self, spins: &[i8], site: usize, magnetization: i64) -> f64 {
        let s = f64::from(spins[site]);
        let mut local = self.fields[site];
        for &(j, c) in &self.neighbors[site] {
            local += c * f64::from(spins[j]);
        }
        let mut delta = 2.0 * s * local;
        if let Some(j) = self.infinite_range {
            // −J/N·[(M − 2s)² − M²] = 4J(sM − 1)/N
            let sm = i64::from(spins[site]) * magnetization;
            delta += 4.0 * j * (sm - 1) as f64 / self.n_spins as f64;
        }
        delta
    }
}

/// The function f in the fluctuation term −N·f(m_x).
#[derive(Debug, Clone, PartialEq)]
pub enum FluctuationSpec {
    /// f(m) = Γm, the ordinary transverse field.
    Linear { transverse: f64 },
    /// f(m) = Γm − γm²/2, transverse field plus antiferromagnetic XX coupling.
    LinearQuadratic { transverse: f64, xx: f64 },
    /// f(m) = Σₖ cₖ mᵏ for k = 1..=P. The inverse derivative is searched by
    /// bisection inside `bracket`.
    Polynomial {
        coefficients: Vec<f64>,
        bracket: (f64, f64),
    },
}

impl FluctuationSpec {
    pub fn linear(transverse: f64) -> Self {
        FluctuationSpec::Linear { transverse }
    }

    pub fn linear_quadratic(transverse: f64, xx: f64) -> Self {
        FluctuationSpec::LinearQuadratic { transverse, xx }
    }

    /// Polynomial with the physical bracket [−1, 1] for the inverse.
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        FluctuationSpec::Polynomial {
            coefficients,
            bracket: (-1.0, 1.0),
        }
    }

    pub fn eval(&self, m: f64) -> f64 {
        match *self {
            FluctuationSpec::Linear { transverse } => transverse * m,
            FluctuationSpec::LinearQuadratic { transverse, xx } => transverse * m - 0.5 * xx * m * m,
            FluctuationSpec::Polynomial {
                ref coefficients, ..
            } => coefficients.iter().rev().fold(0.0, |acc, &c| (acc + c) * m),
        }
    }

    pub fn derivative(&self, m: f64) -> f64 {
        match *self {
            FluctuationSpec::Linear { transverse } => transverse,
            FluctuationSpec::LinearQuadratic { transverse, xx } => transverse - xx * m,
            FluctuationSpec::Polynomial {
                ref coefficients, ..
            } => coefficients
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * m + (k + 1) as f64 * c),
        }
    }

    pub fn second_derivative(&self, m: f64) -> f64 {
        match *self {
            FluctuationSpec::Linear { .. } => 0.0,
            FluctuationSpec::LinearQuadratic { xx, .. } => -xx,
            FluctuationSpec::Polynomial {
                ref coefficients, ..
            } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &c)| acc * m + ((k + 1) * k) as f64 * c),
        }
    }

    /// True when f′ does not depend on m, so the effective field is fixed.
    pub fn has_constant_derivative(&self) -> bool {
        match self {
            FluctuationSpec::Linear { .. } => true,
            FluctuationSpec::LinearQuadratic { xx, .. } => *xx == 0.0,
            FluctuationSpec::Polynomial { coefficients, .. } => {
                coefficients.iter().skip(1).all(|&c| c == 0.0)
            }
        }
    }

    /// The m with f′(m) = y.
    pub fn inverse_derivative(&self, y: f64) -> Result<f64> {
        if self.has_constant_derivative() {
            return Err(Error::UnsupportedInverse(format!("{self:?}")));
        }
        match *self {
            FluctuationSpec::Linear { .. } => unreachable!(),
            FluctuationSpec::LinearQuadratic { transverse, xx } => Ok((transverse - y) / xx),
            FluctuationSpec::Polynomial { bracket, .. } => self.bisect_derivative(y, bracket),
        }
    }

    fn bisect_derivative(&self, y: f64, (lo, hi): (f64, f64)) -> Result<f64> {
        let out_of_bracket = || Error::InverseOutOfBracket { target: y, lo, hi };
        let mut a = lo;
        let mut b = hi;
        let mut ga = self.derivative(a) - y;
        let gb = self.derivative(b) - y;
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        if ga.signum() == gb.signum() || !ga.is_finite() || !gb.is_finite() {
            return Err(out_of_bracket());
        }
        while b - a > INVERSE_TOLERANCE {
            let mid = 0.5 * (a + b);
            let gm = self.derivative(mid) - y;
            if gm == 0.0 {
                return Ok(mid);
            }
            if gm.signum() == ga.signum() {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// H = H₀(σᶻ) − N·f((1/N)Σσᵢˣ).
#[derive(Debug, Clone, PartialEq)]
pub struct NonStoqModel {
    pub classical: ClassicalIsing,
    pub fluctuation: FluctuationSpec,
}

impl NonStoqModel {
    pub fn new(classical: ClassicalIsing, fluctuation: FluctuationSpec) -> Self {
        NonStoqModel {
            classical,
            fluctuation,
        }
    }

    pub fn n_spins(&self) -> usize {
        self.classical.n_spins()
    }

    /// Same classical part with a different fluctuation.
    pub fn with_fluctuation(&self, fluctuation: FluctuationSpec) -> Self {
        NonStoqModel {
            classical: self.classical.clone(),
            fluctuation,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ModelFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_model()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

/// On-disk model description (TOML).
///
/// ```toml
/// n_spins = 8
/// infinite_range_coupling = 0.5
/// uniform_field = 0.1          # or: fields = [[0, 0.1], [3, -0.2]]
/// couplings = [[0, 1, 1.0]]    # i j J, each unordered pair once
///
/// [fluctuation]
/// kind = "linear_quadratic"    # linear | linear_quadratic | polynomial
/// Gamma = 1.0
/// gamma = 1.0
/// # polynomial: coefficients = [c1, c2, ...], bracket = [-1.0, 1.0]
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n_spins: usize,
    #[serde(default)]
    couplings: Vec<(usize, usize, f64)>,
    #[serde(default)]
    fields: Vec<(usize, f64)>,
    uniform_field: Option<f64>,
    infinite_range_coupling: Option<f64>,
    fluctuation: FluctuationFile,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FluctuationFile {
    Linear {
        #[serde(rename = "Gamma")]
        transverse: f64,
    },
    LinearQuadratic {
        #[serde(rename = "Gamma")]
        transverse: f64,
        gamma: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
        bracket: Option<(f64, f64)>,
    },
}

impl ModelFile {
    fn into_model(self) -> Result<NonStoqModel> {
        let parse = |e: Error| Error::Parse(e.to_string());
        let mut fields = vec![self.uniform_field.unwrap_or(0.0); self.n_spins];
        let mut seen = HashSet::new();
        for (i, h) in self.fields {
            if i >= self.n_spins {
                return Err(Error::Parse(format!("field index {i} out of range")));
            }
            if !seen.insert(i) {
                return Err(Error::Parse(format!("field for site {i} listed twice")));
            }
            fields[i] = h;
        }
        let classical = ClassicalIsing::new(
            self.n_spins,
            self.couplings,
            fields,
            self.infinite_range_coupling,
        )
        .map_err(parse)?;
        let fluctuation = match self.fluctuation {
            FluctuationFile::Linear { transverse } => FluctuationSpec::linear(transverse),
            FluctuationFile::LinearQuadratic { transverse, gamma } => {
                FluctuationSpec::linear_quadratic(transverse, gamma)
            }
            FluctuationFile::Polynomial {
                coefficients,
                bracket,
            } => {
                if coefficients.is_empty() {
                    return Err(Error::Parse("polynomial needs at least one coefficient".into()));
                }
                FluctuationSpec::Polynomial {
                    coefficients,
                    bracket: bracket.unwrap_or((-1.0, 1.0)),
                }
            }
        };
        Ok(NonStoqModel::new(classical, fluctuation))
    }
}
