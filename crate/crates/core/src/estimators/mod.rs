//! Robust estimators of the mean of a random symmetric (or rectangular) matrix.
//!
//! The basic building block is the truncated mean
//! `T(θ) = (1/(nθ)) Σ ψ(θ Yⱼ)`, where `ψ` is lifted to matrices spectrally.
//! Its deviations are controlled by `‖E Y²‖` as long as `θ` is tuned to that
//! quantity; [`lepski`] removes the need to know it, and the fixed-point
//! estimator [`catoni_fixed_point`] (together with the two-step and iterative
//! schemes) trades `‖E Y²‖` for the centred quantity `‖E (Y - EY)²‖`.

pub mod lepski;

use rayon::prelude::*;

use crate::error::{Error, LastIterate, Result};
use crate::influence::InfluenceKind;
use crate::linalg::{
    eig_sym, hermitian_dilation, upper_right_block, MatrixNorms, RectMatrix, SpectralDecomposition,
    SymMatrix,
};

pub use lepski::{
    delta_closed_form, delta_recursive, iterative_adaptive_mean, iterative_stop_index,
    lepski_adaptive_mean, lepski_adaptive_with, lepski_select, multi_level_mean, sigma_grid,
    two_step_mean, two_step_mean_with, GridAnchor, LepskiConfig,
};

/// Known brackets for the second-moment scale `σ = ‖E Y²‖^{1/2}` and,
/// optionally, for the centred scale `σ₀ = ‖E (Y - EY)²‖^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBounds {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma0: Option<(f64, f64)>,
}

impl VarianceBounds {
    pub fn new(sigma_min: f64, sigma_max: f64) -> Result<Self> {
        let b = VarianceBounds { sigma_min, sigma_max, sigma0: None };
        b.validate()?;
        Ok(b)
    }

    pub fn with_sigma0(mut self, sigma0_min: f64, sigma0_max: f64) -> Result<Self> {
        self.sigma0 = Some((sigma0_min, sigma0_max));
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_bracket("sigma", self.sigma_min, self.sigma_max)?;
        if let Some((lo, hi)) = self.sigma0 {
            check_bracket("sigma0", lo, hi)?;
        }
        Ok(())
    }

    pub(crate) fn require_sigma0(&self) -> Result<(f64, f64)> {
        self.sigma0.ok_or_else(|| Error::config("this estimator needs a sigma0 bracket"))
    }
}

fn check_bracket(name: &str, lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::config(format!("{name} bounds must be positive and finite")));
    }
    if hi < lo {
        return Err(Error::config(format!("{name}_max = {hi} is below {name}_min = {lo}")));
    }
    Ok(())
}

/// An estimate together with the diagnostics of the run that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanEstimate<M = SymMatrix> {
    pub value: M,
    pub theta: f64,
    /// Selected index on the adaptive grid, for Lepski-type estimators.
    pub grid_index: Option<usize>,
    pub iterations: usize,
    pub residual: Option<f64>,
}

impl<M> MeanEstimate<M> {
    fn plain(value: M, theta: f64) -> Self {
        MeanEstimate { value, theta, grid_index: None, iterations: 0, residual: None }
    }
}

/// `θ = sqrt(2t/n) / σ`.
pub fn theta_for(sigma: f64, n: usize, t: f64) -> Result<f64> {
    if !(sigma > 0.0 && t > 0.0) || n == 0 {
        return Err(Error::domain("theta_for needs sigma > 0, n > 0 and t > 0"));
    }
    Ok((2.0 * t / n as f64).sqrt() / sigma)
}

/// `θ = ε sqrt(n) / σₙ²` with `σₙ² = n σ²`: the choice giving the tail
/// `2d exp(-ε² / (2σ²))` for the deviation `ε` of the scaled sum.
pub fn theta_subgaussian(deviation: f64, n: usize, sigma: f64) -> Result<f64> {
    if !(deviation > 0.0 && sigma > 0.0) || n == 0 {
        return Err(Error::domain("theta_subgaussian needs positive arguments"));
    }
    let n = n as f64;
    Ok(deviation * n.sqrt() / (n * sigma * sigma))
}

/// `θ = sqrt(n) / σₙ²`, independent of the deviation level.
pub fn theta_subexponential(n: usize, sigma: f64) -> Result<f64> {
    theta_subgaussian(1.0, n, sigma)
}

/// `θ = (1/(α c_α))^{1/(α-1)} (s/n)^{1/α} / v` for the `ψ_α` estimator, where
/// `v = ‖E|Y|^α‖^{1/α}`.
pub fn theta_psi_alpha(alpha: f64, s: f64, n: usize, v: f64) -> Result<f64> {
    let c = crate::influence::c_alpha(alpha)?;
    if !(s > 0.0 && v > 0.0) || n == 0 {
        return Err(Error::domain("theta_psi_alpha needs positive arguments"));
    }
    Ok((1.0 / (alpha * c)).powf(1.0 / (alpha - 1.0)) * (s / n as f64).powf(1.0 / alpha) / v)
}

pub(crate) fn check_sample(sample: &[SymMatrix]) -> Result<usize> {
    let first = sample.first().ok_or_else(|| Error::domain("sample is empty"))?;
    let d = first.dim();
    if let Some(j) = sample.iter().position(|y| y.dim() != d) {
        return Err(Error::domain(format!(
            "observation {j} has dimension {}, expected {d}",
            sample[j].dim()
        )));
    }
    Ok(d)
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must be positive and finite, got {theta}")))
    }
}

/// Eigendecompositions of every observation, in sample order.
pub(crate) fn decompose_all(sample: &[SymMatrix]) -> Result<Vec<SpectralDecomposition>> {
    sample.par_iter().map(eig_sym).collect()
}

/// `(1/(nθ)) Σ ψ(θ Yⱼ)` from precomputed decompositions.
pub(crate) fn psi_average(eigs: &[SpectralDecomposition], theta: f64, kind: InfluenceKind) -> SymMatrix {
    let d = eigs[0].dim();
    let mut acc = SymMatrix::zeros(d);
    for eig in eigs {
        eig.accumulate_into(&mut acc, 1.0, |l| kind.apply(theta * l));
    }
    acc.scale_mut(1.0 / (eigs.len() as f64 * theta));
    acc
}

/// `(1/(nθ)) Σ ψ(θ (Yⱼ - S))`, the steepest-descent direction at `S`.
pub(crate) fn shifted_psi_average(
    sample: &[SymMatrix],
    shift: &SymMatrix,
    theta: f64,
    kind: InfluenceKind,
) -> Result<SymMatrix> {
    let centred: Vec<SymMatrix> = sample.iter().map(|y| y.sub(shift)).collect();
    let eigs = decompose_all(&centred)?;
    Ok(psi_average(&eigs, theta, kind))
}

/// The truncated mean `(1/(nθ)) Σ ψ(θ Yⱼ)`.
pub fn truncated_mean(sample: &[SymMatrix], theta: f64, kind: InfluenceKind) -> Result<MeanEstimate> {
    check_sample(sample)?;
    check_theta(theta)?;
    let eigs = decompose_all(sample)?;
    Ok(MeanEstimate::plain(psi_average(&eigs, theta, kind), theta))
}

/// Truncated mean of rectangular observations through their dilations:
/// the upper-right block of `(1/(nθ)) Σ ψ(θ H(Yⱼ))`.
pub fn rect_truncated_mean(
    sample: &[RectMatrix],
    theta: f64,
    kind: InfluenceKind,
) -> Result<MeanEstimate<RectMatrix>> {
    let first = sample.first().ok_or_else(|| Error::domain("sample is empty"))?;
    let shape = first.shape();
    if let Some(j) = sample.iter().position(|y| y.shape() != shape) {
        return Err(Error::domain(format!(
            "observation {j} has shape {:?}, expected {shape:?}",
            sample[j].shape()
        )));
    }
    check_theta(theta)?;
    let dilated: Vec<SymMatrix> = sample.iter().map(hermitian_dilation).collect();
    let eigs = decompose_all(&dilated)?;
    let full = psi_average(&eigs, theta, kind);
    Ok(MeanEstimate::plain(upper_right_block(&full, shape.0, shape.1), theta))
}

/// Truncated mean with `ψ_α(x) = log(1 + x + c_α |x|^α)`, for observations with
/// finite moments of order `α ∈ (1, 2]` only.
pub fn psi_alpha_mean(sample: &[SymMatrix], theta: f64, alpha: f64) -> Result<MeanEstimate> {
    truncated_mean(sample, theta, InfluenceKind::psi_alpha(alpha)?)
}

/// `tr(B) / ‖B‖` for a nonzero positive semidefinite `B`.
pub fn effective_dimension(second_moment_sum: &SymMatrix) -> Result<f64> {
    let eig = eig_sym(second_moment_sum)?;
    let evs = eig.eigenvalues();
    let top = evs[0];
    let bottom = evs[evs.len() - 1];
    let norm = top.abs().max(bottom.abs());
    if norm == 0.0 {
        return Err(Error::domain("effective dimension of the zero matrix is undefined"));
    }
    if bottom < -1e-10 * norm {
        return Err(Error::domain(format!(
            "matrix is not positive semidefinite (smallest eigenvalue {bottom})"
        )));
    }
    Ok(second_moment_sum.trace() / norm)
}

/// Settings for [`catoni_fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct CatoniOptions {
    /// Residual tolerance; `None` means `1e-9 (1 + ‖T₀‖)` for the initial point `T₀`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Starting point; defaults to the truncated mean at the same `θ`.
    pub init: Option<SymMatrix>,
    /// Initial step length of each descent step.
    pub damping: f64,
}

impl Default for CatoniOptions {
    fn default() -> Self {
        CatoniOptions { tol: None, max_iter: 200, init: None, damping: 1.0 }
    }
}

/// Solves `Σ ψ(θ (Yⱼ - T)) = 0` by the steepest-descent iteration
/// `T ← T + (1/(nθ)) Σ ψ(θ (Yⱼ - T))`.
///
/// The residual is the operator norm of the update direction. A step that
/// increases the residual is retried at half the length.
pub fn catoni_fixed_point(
    sample: &[SymMatrix],
    theta: f64,
    kind: InfluenceKind,
    opts: &CatoniOptions,
) -> Result<MeanEstimate> {
    check_sample(sample)?;
    check_theta(theta)?;
    if !(opts.damping > 0.0) {
        return Err(Error::domain("damping must be positive"));
    }
    let mut current = match &opts.init {
        Some(init) => {
            if init.dim() != sample[0].dim() {
                return Err(Error::domain("initial point has the wrong dimension"));
            }
            init.clone()
        }
        None => truncated_mean(sample, theta, kind)?.value,
    };
    let tol = match opts.tol {
        Some(tol) if tol > 0.0 => tol,
        Some(tol) => return Err(Error::domain(format!("tolerance must be positive, got {tol}"))),
        None => 1e-9 * (1.0 + current.op_norm()?),
    };

    let mut direction = shifted_psi_average(sample, &current, theta, kind)?;
    let mut residual = direction.op_norm()?;
    let mut iterations = 0;
    while residual > tol {
        if iterations == opts.max_iter {
            return Err(Error::Convergence {
                routine: "catoni_fixed_point",
                iterations,
                residual,
                last: Box::new(LastIterate::Matrix(current)),
            });
        }
        iterations += 1;
        let mut step = opts.damping;
        loop {
            let candidate = current.add(&direction.scaled(step));
            let next_direction = shifted_psi_average(sample, &candidate, theta, kind)?;
            let next_residual = next_direction.op_norm()?;
            if next_residual <= residual || step < 1e-6 {
                current = candidate;
                direction = next_direction;
                residual = next_residual;
                break;
            }
            step *= 0.5;
        }
    }
    if !current.is_finite() {
        return Err(Error::numeric("fixed-point iteration produced non-finite entries"));
    }
    Ok(MeanEstimate { value: current, theta, grid_index: None, iterations, residual: Some(residual) })
}
