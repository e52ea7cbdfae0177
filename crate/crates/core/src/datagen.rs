//! Seeded heavy-tailed data for the simulation experiments.
//!
//! All randomness flows from a [`RngSeed`] through `ChaCha8Rng`, whose
//! output stream is fixed across platforms. Replication `r` of a run seeded
//! with `s` uses the seed `s ^ splitmix64(r)`, so its data do not depend on how
//! many other replications run or in what order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::applications::CompletionObservation;
use crate::error::{Error, Result};
use crate::linalg::{RectMatrix, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of replication `rep`.
    pub fn for_rep(self, rep: u64) -> RngSeed {
        RngSeed(self.0 ^ splitmix64(rep))
    }
}

/// One step of the SplitMix64 generator applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pareto law with density `q / (1 + x)^{1+q}` on `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoSpec {
    q: f64,
}

impl ParetoSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 2.0 && q.is_finite()) {
            return Err(Error::domain(format!("tail index must exceed 2, got {q}")));
        }
        Ok(ParetoSpec { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Variance `q / ((q-1)² (q-2))`.
    pub fn variance(&self) -> f64 {
        let q = self.q;
        q / ((q - 1.0) * (q - 1.0) * (q - 2.0))
    }

    /// `F⁻¹(u) = (1 - u)^{-1/q} - 1`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        (1.0 - u).powf(-1.0 / self.q) - 1.0
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }
}

/// `(ξ₁ - ξ₂) / sqrt(2 Var ξ)` for independent Pareto `ξ₁, ξ₂`: symmetric
/// with unit variance.
pub fn pareto_symmetric_draw<R: Rng + ?Sized>(spec: &ParetoSpec, rng: &mut R) -> f64 {
    let a = spec.draw(rng);
    let b = spec.draw(rng);
    (a - b) / (2.0 * spec.variance()).sqrt()
}

/// Diagonal covariance model `Σ = diag(spectrum)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovModel {
    spectrum: Vec<f64>,
}

impl CovModel {
    pub fn new(spectrum: Vec<f64>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::domain("spectrum is empty"));
        }
        if spectrum.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::domain("spectrum entries must be finite and nonnegative"));
        }
        Ok(CovModel { spectrum })
    }

    /// `(10, 5, 1, 1/(d-3), ..., 1/(d-3))`.
    pub fn simulation_default(d: usize) -> Result<Self> {
        if d < 4 {
            return Err(Error::domain("the default spectrum needs d ≥ 4"));
        }
        let mut s = vec![10.0, 5.0, 1.0];
        s.resize(d, 1.0 / (d - 3) as f64);
        CovModel::new(s)
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn sigma(&self) -> SymMatrix {
        SymMatrix::from_diag(&self.spectrum).expect("nonempty spectrum")
    }

    /// Coordinate vector of the largest variance (first one on ties).
    pub fn leading_direction(&self) -> Vec<f64> {
        let k = self
            .spectrum
            .iter()
            .enumerate()
            .fold(0, |best, (i, s)| if *s > self.spectrum[best] { i } else { best });
        let mut u = vec![0.0; self.dim()];
        u[k] = 1.0;
        u
    }
}

/// `Z = Σ^{1/2} U` with independent symmetric Pareto coordinates `U`.
pub fn gen_vector<R: Rng + ?Sized>(model: &CovModel, spec: &ParetoSpec, rng: &mut R) -> Vec<f64> {
    model.spectrum.iter().map(|s| s.sqrt() * pareto_symmetric_draw(spec, rng)).collect()
}

/// Additive noise in completion observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// Symmetric Pareto noise scaled to the given variance.
    Pareto { spec: ParetoSpec, variance: f64 },
}

impl NoiseModel {
    pub fn pareto(q: f64, variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::domain("noise variance must be finite and nonnegative"));
        }
        if variance == 0.0 {
            return Ok(NoiseModel::None);
        }
        Ok(NoiseModel::Pareto { spec: ParetoSpec::new(q)?, variance })
    }

    pub fn variance(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Pareto { variance, .. } => *variance,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Pareto { spec, variance } => variance.sqrt() * pareto_symmetric_draw(spec, rng),
        }
    }
}

/// `n` observations `y = A₀[r, c] + ξ` at uniformly drawn cells.
pub fn gen_completion_sample<R: Rng + ?Sized>(
    a0: &RectMatrix,
    n: usize,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Vec<CompletionObservation>> {
    if n == 0 {
        return Err(Error::domain("need at least one observation"));
    }
    let (d1, d2) = a0.shape();
    Ok((0..n)
        .map(|_| {
            let cell = rng.random_range(0..d1 * d2);
            let (row, col) = (cell / d2, cell % d2);
            CompletionObservation { row, col, y: a0.get(row, col) + noise.draw(rng) }
        })
        .collect())
}

/// `U Vᵀ / sqrt(r)` with standard normal factors `U` (`d₁ × r`) and `V` (`d₂ × r`),
/// so entries have unit variance.
pub fn gen_low_rank<R: Rng + ?Sized>(d1: usize, d2: usize, rank: usize, rng: &mut R) -> Result<RectMatrix> {
    if d1 == 0 || d2 == 0 || rank == 0 || rank > d1.min(d2) {
        return Err(Error::domain(format!("cannot draw a rank-{rank} matrix of shape {d1}×{d2}")));
    }
    let mut normal = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample(StandardNormal)).collect() };
    let u = RectMatrix::new(d1, rank, normal(d1 * rank))?;
    let v = RectMatrix::new(d2, rank, normal(d2 * rank))?;
    Ok(u.matmul(&v.transpose()).scaled(1.0 / (rank as f64).sqrt()))
}
