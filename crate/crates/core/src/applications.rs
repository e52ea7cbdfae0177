//! Covariance estimation and matrix completion with truncated estimators.
//!
//! Every observation here is rank one (`ZZᵀ`, a pair difference, or a
//! dilated indicator `y H(e_r e_cᵀ)`), so `ψ` is applied to a single
//! nonzero eigenvalue instead of through a full eigendecomposition.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::influence::InfluenceKind;
use crate::linalg::{
    hermitian_dilation, norm2, soft_threshold_svd, soft_threshold_sym, MatrixNorms, RectMatrix,
    SymMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CovMethod {
    KnownMean,
    PairDiff,
    UStat,
}

impl fmt::Display for CovMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CovMethod::KnownMean => "known_mean",
            CovMethod::PairDiff => "pair_diff",
            CovMethod::UStat => "u_stat",
        })
    }
}

impl std::str::FromStr for CovMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known_mean" | "known-mean" => Ok(CovMethod::KnownMean),
            "pair_diff" | "pair-diff" => Ok(CovMethod::PairDiff),
            "u_stat" | "u-stat" | "ustat" => Ok(CovMethod::UStat),
            other => Err(Error::config(format!("unknown covariance method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovEstimate {
    pub sigma_hat: SymMatrix,
    pub method: CovMethod,
    pub theta: f64,
}

/// A noisy entry `y ≈ A₀[row, col]` observed at a uniformly drawn position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionObservation {
    pub row: usize,
    pub col: usize,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionEstimate {
    pub raw: RectMatrix,
    pub thresholded: RectMatrix,
    pub tau: f64,
    pub theta: f64,
}

fn check_vectors(z: &[Vec<f64>]) -> Result<usize> {
    let d = z.first().ok_or_else(|| Error::domain("sample is empty"))?.len();
    if d == 0 {
        return Err(Error::domain("vectors must have positive dimension"));
    }
    if let Some(j) = z.iter().position(|v| v.len() != d) {
        return Err(Error::domain(format!("vector {j} has length {}, expected {d}", z[j].len())));
    }
    if z.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::domain("sample contains non-finite entries"));
    }
    Ok(d)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must be positive and finite, got {theta}")))
    }
}

/// Adds `ψ(θ s ‖v‖²) v vᵀ / ‖v‖²`, the image of `s v vᵀ`; zero vectors add nothing.
fn add_rank1_psi(acc: &mut SymMatrix, v: &[f64], s: f64, theta: f64, kind: InfluenceKind) {
    let sq = v.iter().map(|x| x * x).sum::<f64>();
    if sq == 0.0 {
        return;
    }
    acc.add_outer(kind.apply(theta * s * sq) / sq, v);
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `(1/(nθ)) Σ ψ(θ Zⱼ Zⱼᵀ)` for centred observations `Zⱼ`.
pub fn cov_known_mean(z: &[Vec<f64>], theta: f64, kind: InfluenceKind) -> Result<CovEstimate> {
    let d = check_vectors(z)?;
    check_theta(theta)?;
    let mut acc = SymMatrix::zeros(d);
    for v in z {
        add_rank1_psi(&mut acc, v, 1.0, theta, kind);
    }
    acc.scale_mut(1.0 / (z.len() as f64 * theta));
    Ok(CovEstimate { sigma_hat: acc, method: CovMethod::KnownMean, theta })
}

/// `(1/(nθ)) Σ ψ(θ Yⱼ)` with `Yⱼ = ½ (Z₂ⱼ₋₁ - Z₂ⱼ)(Z₂ⱼ₋₁ - Z₂ⱼ)ᵀ`, for `2n`
/// observations with unknown mean.
pub fn cov_pair_diff(z: &[Vec<f64>], theta: f64, kind: InfluenceKind) -> Result<CovEstimate> {
    let d = check_vectors(z)?;
    check_theta(theta)?;
    if !z.len().is_multiple_of(2) {
        return Err(Error::domain(format!("pair differences need an even sample size, got {}", z.len())));
    }
    let mut acc = SymMatrix::zeros(d);
    for pair in z.chunks_exact(2) {
        add_rank1_psi(&mut acc, &diff(&pair[0], &pair[1]), 0.5, theta, kind);
    }
    acc.scale_mut(1.0 / ((z.len() / 2) as f64 * theta));
    Ok(CovEstimate { sigma_hat: acc, method: CovMethod::PairDiff, theta })
}

/// U-statistic over all pairs: `C(N,2)⁻¹ Σ_{i<j} (1/θ) ψ((θ/2)(Zᵢ - Zⱼ)(Zᵢ - Zⱼ)ᵀ)`.
///
/// Observations are put in a canonical order first, so the result is bitwise
/// identical for every permutation of the sample.
pub fn cov_ustat(z: &[Vec<f64>], theta: f64, kind: InfluenceKind) -> Result<CovEstimate> {
    let d = check_vectors(z)?;
    check_theta(theta)?;
    let n = z.len();
    if n < 2 {
        return Err(Error::domain("the U-statistic needs at least two observations"));
    }
    let mut sorted: Vec<&Vec<f64>> = z.iter().collect();
    sorted.sort_by(|a, b| {
        a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
    });
    let partials: Vec<SymMatrix> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut acc = SymMatrix::zeros(d);
            for j in i + 1..n {
                add_rank1_psi(&mut acc, &diff(sorted[i], sorted[j]), 0.5, theta, kind);
            }
            acc
        })
        .collect();
    let mut acc = SymMatrix::zeros(d);
    for p in &partials {
        acc.add_assign(p);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    acc.scale_mut(1.0 / (pairs * theta));
    Ok(CovEstimate { sigma_hat: acc, method: CovMethod::UStat, theta })
}

/// Eigenvalue soft-thresholding of a covariance estimate at `τ/2`.
pub fn cov_soft_threshold(cov: &CovEstimate, tau: f64) -> Result<SymMatrix> {
    soft_threshold_sym(&cov.sigma_hat, tau)
}

/// `τ = 4 σ̂ sqrt((t + log(2d)) / (2n))`.
pub fn tau_frobenius(sigma_hat_bound: f64, n: usize, t: f64, d: usize) -> Result<f64> {
    if !(sigma_hat_bound > 0.0 && t > 0.0) || n == 0 || d == 0 {
        return Err(Error::domain("tau_frobenius needs positive arguments"));
    }
    Ok(4.0 * sigma_hat_bound * ((t + (2.0 * d as f64).ln()) / (2.0 * n as f64)).sqrt())
}

fn check_observations(obs: &[CompletionObservation], d1: usize, d2: usize) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::domain("no observations"));
    }
    if d1 == 0 || d2 == 0 {
        return Err(Error::domain("matrix dimensions must be positive"));
    }
    for (j, o) in obs.iter().enumerate() {
        if o.row >= d1 || o.col >= d2 {
            return Err(Error::domain(format!(
                "observation {j} at ({}, {}) is outside {d1}×{d2}",
                o.row, o.col
            )));
        }
        if !o.y.is_finite() {
            return Err(Error::domain(format!("observation {j} is not finite")));
        }
    }
    Ok(())
}

/// `(d₁d₂/n) Σ yⱼ e_r e_cᵀ`, the unweighted estimate of `A₀`.
pub fn completion_sample_mean(obs: &[CompletionObservation], d1: usize, d2: usize) -> Result<RectMatrix> {
    check_observations(obs, d1, d2)?;
    let mut out = RectMatrix::zeros(d1, d2);
    for o in obs {
        out.set(o.row, o.col, out.get(o.row, o.col) + o.y);
    }
    Ok(out.scaled((d1 * d2) as f64 / obs.len() as f64))
}

/// Upper-right block of `(d₁d₂/(nθ)) Σ ψ(θ yⱼ H(e_r e_cᵀ))`.
///
/// `H(e_r e_cᵀ)` has eigenvalues `±1`, so each observation contributes
/// `(ψ(θy) - ψ(-θy))/2` at position `(r, c)`.
pub fn completion_robust_raw(
    obs: &[CompletionObservation],
    d1: usize,
    d2: usize,
    theta: f64,
    kind: InfluenceKind,
) -> Result<RectMatrix> {
    check_observations(obs, d1, d2)?;
    check_theta(theta)?;
    let mut out = RectMatrix::zeros(d1, d2);
    for o in obs {
        let w = 0.5 * (kind.apply(theta * o.y) - kind.apply(-theta * o.y));
        out.set(o.row, o.col, out.get(o.row, o.col) + w);
    }
    Ok(out.scaled((d1 * d2) as f64 / (obs.len() as f64 * theta)))
}

/// Same quantity as [`completion_robust_raw`], computed through a full
/// eigendecomposition of every dilated observation.
pub fn completion_robust_raw_spectral(
    obs: &[CompletionObservation],
    d1: usize,
    d2: usize,
    theta: f64,
    kind: InfluenceKind,
) -> Result<RectMatrix> {
    check_observations(obs, d1, d2)?;
    check_theta(theta)?;
    let sample: Vec<RectMatrix> = obs
        .iter()
        .map(|o| {
            let mut x = RectMatrix::zeros(d1, d2);
            x.set(o.row, o.col, o.y);
            x
        })
        .collect();
    let est = crate::estimators::rect_truncated_mean(&sample, theta, kind)?;
    Ok(est.value.scaled((d1 * d2) as f64))
}

/// Minimizer of `(1/(d₁d₂))‖H(A)‖²_F - ⟨(2/(d₁d₂)) H(R), H(A)⟩ + 2τ‖A‖₁`,
/// which is singular-value soft-thresholding of `R` at `d₁d₂τ/2`.
pub fn completion_soft_threshold(raw: &RectMatrix, tau: f64, d1: usize, d2: usize) -> Result<RectMatrix> {
    if raw.shape() != (d1, d2) {
        return Err(Error::domain(format!("raw estimate has shape {:?}, expected ({d1}, {d2})", raw.shape())));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("tau must be nonnegative, got {tau}")));
    }
    soft_threshold_svd(raw, (d1 * d2) as f64 * tau / 2.0)
}

/// The penalized objective minimized by [`completion_soft_threshold`].
pub fn completion_objective(a: &RectMatrix, raw: &RectMatrix, tau: f64, d1: usize, d2: usize) -> Result<f64> {
    let scale = (d1 * d2) as f64;
    let ha = hermitian_dilation(a);
    let hr = hermitian_dilation(raw);
    let quad = ha.frob_norm().powi(2) / scale;
    let linear = 2.0 / scale * ha.as_slice().iter().zip(hr.as_slice()).map(|(x, y)| x * y).sum::<f64>();
    Ok(quad - linear + 2.0 * tau * a.nuclear_norm()?)
}

/// `θ = sqrt((t + log(2(d₁+d₂))) (d₁ ∧ d₂) / n) / scale_bound`, where
/// `scale_bound` bounds both `‖A₀‖_max` and the noise standard deviation.
pub fn theta_completion(t: f64, n: usize, d1: usize, d2: usize, scale_bound: f64) -> Result<f64> {
    if !(t > 0.0 && scale_bound > 0.0) || n == 0 || d1 == 0 || d2 == 0 {
        return Err(Error::domain("theta_completion needs positive arguments"));
    }
    let level = t + (2.0 * (d1 + d2) as f64).ln();
    Ok((level * d1.min(d2) as f64 / n as f64).sqrt() / scale_bound)
}

/// `τ = 4 · scale_bound · sqrt((t + log(2(d₁+d₂))) / (n (d₁ ∧ d₂)))`.
pub fn tau_completion(t: f64, n: usize, d1: usize, d2: usize, scale_bound: f64) -> Result<f64> {
    if !(t > 0.0 && scale_bound > 0.0) || n == 0 || d1 == 0 || d2 == 0 {
        return Err(Error::domain("tau_completion needs positive arguments"));
    }
    let level = t + (2.0 * (d1 + d2) as f64).ln();
    Ok(4.0 * scale_bound * (level / (n as f64 * d1.min(d2) as f64)).sqrt())
}

/// Robust estimate followed by soft-thresholding.
pub fn complete(
    obs: &[CompletionObservation],
    d1: usize,
    d2: usize,
    theta: f64,
    tau: f64,
    kind: InfluenceKind,
) -> Result<CompletionEstimate> {
    let raw = completion_robust_raw(obs, d1, d2, theta, kind)?;
    let thresholded = completion_soft_threshold(&raw, tau, d1, d2)?;
    Ok(CompletionEstimate { raw, thresholded, tau, theta })
}

/// Relative Frobenius error `‖Â - A₀‖_F / ‖A₀‖_F`.
pub fn relative_frobenius_error(estimate: &RectMatrix, truth: &RectMatrix) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(Error::domain("shape mismatch"));
    }
    let denom = truth.frob_norm();
    if denom == 0.0 {
        return Err(Error::domain("relative error against the zero matrix"));
    }
    Ok(norm2(estimate.sub(truth).as_slice()) / denom)
}
