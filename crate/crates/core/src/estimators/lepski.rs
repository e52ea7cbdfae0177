//! Adaptive selection of the truncation level by Lepski's method, and the
//! centred two-step, iterative and multi-level schemes built on it.

use rayon::prelude::*;

use super::{
    check_sample, decompose_all, psi_average, shifted_psi_average, MeanEstimate, VarianceBounds,
};
use crate::error::{Error, Result};
use crate::influence::InfluenceKind;
use crate::linalg::{MatrixNorms, SymMatrix};

/// How grid points are placed between `σ_min` and `σ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridAnchor {
    /// `σ_j = σ_min κ^j` for `j = 0, 1, ...` while `σ_j < κ σ_max`.
    #[default]
    Relative,
    /// `σ_j = κ^j` over all integers `j` with `σ_min < κ^j ≤ σ_max`.
    AbsolutePowers,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LepskiConfig {
    pub t: f64,
    pub kappa: f64,
    /// Radius of grid point `k` is `radius_factor · σ_k · sqrt(2t/n)`.
    pub radius_factor: f64,
    pub anchor: GridAnchor,
}

impl LepskiConfig {
    pub fn new(t: f64) -> Self {
        LepskiConfig { t, kappa: 2.0, radius_factor: 2.0, anchor: GridAnchor::Relative }
    }

    /// The simulation protocol: powers of 1.3 and radius `1.3^k sqrt(t/n)`.
    pub fn simulation(t: f64) -> Self {
        LepskiConfig {
            t,
            kappa: 1.3,
            radius_factor: std::f64::consts::FRAC_1_SQRT_2,
            anchor: GridAnchor::AbsolutePowers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::config(format!("t must be positive, got {}", self.t)));
        }
        if !(self.kappa > 1.0 && self.kappa <= 2.0) {
            return Err(Error::config(format!("kappa must lie in (1, 2], got {}", self.kappa)));
        }
        if !(self.radius_factor > 0.0 && self.radius_factor.is_finite()) {
            return Err(Error::config("radius_factor must be positive"));
        }
        Ok(())
    }
}

/// Grid of candidate scales between `sigma_min` and `sigma_max`.
pub fn sigma_grid(sigma_min: f64, sigma_max: f64, kappa: f64, anchor: GridAnchor) -> Result<Vec<f64>> {
    if !(sigma_min > 0.0 && sigma_max.is_finite() && kappa > 1.0) {
        return Err(Error::config("grid needs 0 < sigma_min, finite sigma_max and kappa > 1"));
    }
    if sigma_max < sigma_min {
        return Err(Error::config(format!(
            "empty grid: sigma_max = {sigma_max} is below sigma_min = {sigma_min}"
        )));
    }
    let grid: Vec<f64> = match anchor {
        GridAnchor::Relative => (0..)
            .map(|j| sigma_min * kappa.powi(j))
            .take_while(|&s| s < kappa * sigma_max)
            .collect(),
        GridAnchor::AbsolutePowers => {
            let mut j = (sigma_min.ln() / kappa.ln()).floor() as i32 - 1;
            while kappa.powi(j) <= sigma_min {
                j += 1;
            }
            (j..).map(|j| kappa.powi(j)).take_while(|&s| s <= sigma_max).collect()
        }
    };
    if grid.is_empty() {
        return Err(Error::config(format!(
            "no power of {kappa} lies in ({sigma_min}, {sigma_max}]"
        )));
    }
    Ok(grid)
}

/// `min { j : ‖T_k - T_j‖ ≤ radius_k for all k > j }`.
///
/// The last index always qualifies, so the minimum exists for any nonempty input.
pub fn lepski_select(estimates: &[SymMatrix], radii: &[f64]) -> Result<usize> {
    if estimates.is_empty() || estimates.len() != radii.len() {
        return Err(Error::config("need one radius per estimate and at least one estimate"));
    }
    let m = estimates.len();
    for j in 0..m {
        let mut accepted = true;
        for k in j + 1..m {
            if estimates[k].sub(&estimates[j]).op_norm()? > radii[k] {
                accepted = false;
                break;
            }
        }
        if accepted {
            return Ok(j);
        }
    }
    Ok(m - 1)
}

/// Lepski selection over the scales `sigmas`, with `estimate(θ)` giving the
/// estimate at `θ = sqrt(2t/n)/σ`.
pub fn lepski_adaptive_with<F>(sigmas: &[f64], n: usize, cfg: &LepskiConfig, estimate: F) -> Result<MeanEstimate>
where
    F: Fn(f64) -> Result<SymMatrix> + Sync,
{
    cfg.validate()?;
    if sigmas.is_empty() || n == 0 {
        return Err(Error::config("empty grid"));
    }
    let scale = (2.0 * cfg.t / n as f64).sqrt();
    let thetas: Vec<f64> = sigmas.iter().map(|s| scale / s).collect();
    let estimates: Vec<SymMatrix> = thetas.par_iter().map(|&th| estimate(th)).collect::<Result<_>>()?;
    let radii: Vec<f64> = sigmas.iter().map(|s| cfg.radius_factor * s * scale).collect();
    let j = lepski_select(&estimates, &radii)?;
    log::debug!("lepski: grid of {} points, selected index {j} (sigma = {})", sigmas.len(), sigmas[j]);
    let value = estimates.into_iter().nth(j).expect("index from selection");
    Ok(MeanEstimate { value, theta: thetas[j], grid_index: Some(j), iterations: 0, residual: None })
}

pub fn lepski_adaptive_mean(
    sample: &[SymMatrix],
    cfg: &LepskiConfig,
    bounds: &VarianceBounds,
    kind: InfluenceKind,
) -> Result<MeanEstimate> {
    check_sample(sample)?;
    bounds.validate()?;
    cfg.validate()?;
    let grid = sigma_grid(bounds.sigma_min, bounds.sigma_max, cfg.kappa, cfg.anchor)?;
    let eigs = decompose_all(sample)?;
    lepski_adaptive_with(&grid, sample.len(), cfg, |theta| Ok(psi_average(&eigs, theta, kind)))
}

/// Two-step estimator: a Lepski estimate on the first `⌈n/2⌉` observations,
/// then a Lepski-tuned truncated mean of the remaining observations centred at it.
pub fn two_step_mean(
    sample: &[SymMatrix],
    t: f64,
    bounds: &VarianceBounds,
    kind: InfluenceKind,
) -> Result<MeanEstimate> {
    two_step_mean_with(sample, t, bounds, kind, |first| {
        Ok(lepski_adaptive_mean(first, &LepskiConfig::new(t), bounds, kind)?.value)
    })
}

/// [`two_step_mean`] with a caller-supplied first stage, which receives the
/// first `⌈n/2⌉` observations.
pub fn two_step_mean_with<F>(
    sample: &[SymMatrix],
    t: f64,
    bounds: &VarianceBounds,
    kind: InfluenceKind,
    first_stage: F,
) -> Result<MeanEstimate>
where
    F: FnOnce(&[SymMatrix]) -> Result<SymMatrix>,
{
    check_sample(sample)?;
    if sample.len() < 2 {
        return Err(Error::domain("two-step estimator needs at least two observations"));
    }
    bounds.validate()?;
    let (s0_min, s0_max) = bounds.require_sigma0()?;
    let cfg = LepskiConfig::new(t);
    cfg.validate()?;

    let n = sample.len();
    let (first, second) = sample.split_at(n.div_ceil(2));
    let centre = first_stage(first)?;
    if centre.dim() != sample[0].dim() {
        return Err(Error::domain("first stage returned a matrix of the wrong dimension"));
    }

    let upper = s0_max + 12.0 * bounds.sigma_max * (t / n as f64).sqrt();
    let grid = sigma_grid(s0_min, upper, 2.0, GridAnchor::Relative)?;
    let centred: Vec<SymMatrix> = second.iter().map(|y| y.sub(&centre)).collect();
    let eigs = decompose_all(&centred)?;
    let stage2 = lepski_adaptive_with(&grid, centred.len(), &cfg, |theta| Ok(psi_average(&eigs, theta, kind)))?;
    Ok(MeanEstimate { value: centre.add(&stage2.value), ..stage2 })
}

/// `δ^{(k)}` from `δ^{(0)} = σ_max sqrt(2t/n)` and
/// `δ^{(k)} = 2 σ₀ⱼ sqrt(2t/n) + δ^{(k-1)}/6`.
pub fn delta_recursive(k: usize, sigma0_j: f64, sigma_max: f64, t: f64, n: usize) -> f64 {
    let s = (2.0 * t / n as f64).sqrt();
    let mut delta = sigma_max * s;
    for _ in 0..k {
        delta = 2.0 * sigma0_j * s + delta / 6.0;
    }
    delta
}

/// `δ^{(k)} = (12/5) σ₀ⱼ sqrt(2t/n) + 6^{-k} (σ_max - (12/5) σ₀ⱼ) sqrt(2t/n)`.
pub fn delta_closed_form(k: usize, sigma0_j: f64, sigma_max: f64, t: f64, n: usize) -> f64 {
    let s = (2.0 * t / n as f64).sqrt();
    let limit = 2.4 * sigma0_j;
    (limit + 6f64.powi(k as i32).recip() * (sigma_max - limit)) * s
}

/// Number of iterations after which `δ^{(k)}` at `σ₀,min` is within 1% of its
/// limit; at least 1 and at most 30.
pub fn iterative_stop_index(sigma0_min: f64, sigma_max: f64) -> usize {
    let limit = 2.4 * sigma0_min;
    let gap = (sigma_max - limit).abs();
    (1..=30usize).find(|&k| gap / 6f64.powi(k as i32) <= 0.01 * limit).unwrap_or(30)
}

/// Iterated centring: every grid point `σ₀ⱼ` runs
/// `T^{(k)} = T^{(k-1)} + (1/(nθⱼ)) Σ ψ(θⱼ (Yᵢ - T^{(k-1)}))` from a common start,
/// then Lepski's rule picks among the results with radii `2 δ^{(k)}`.
pub fn iterative_adaptive_mean(
    sample: &[SymMatrix],
    t: f64,
    bounds: &VarianceBounds,
    kind: InfluenceKind,
) -> Result<MeanEstimate> {
    let d = check_sample(sample)?;
    bounds.validate()?;
    let (s0_min, s0_max) = bounds.require_sigma0()?;
    LepskiConfig::new(t).validate()?;
    let n = sample.len();
    if n < d * d {
        log::warn!("iterative estimator: n = {n} is below d² = {}, its guarantee may not apply", d * d);
    }

    let scale = (2.0 * t / n as f64).sqrt();
    let start = psi_average(&decompose_all(sample)?, scale / bounds.sigma_max, kind);
    let grid = sigma_grid(s0_min, s0_max, 2.0, GridAnchor::Relative)?;
    let k_stop = iterative_stop_index(s0_min, bounds.sigma_max);
    let thetas: Vec<f64> = grid.iter().map(|s| scale / s).collect();

    let estimates: Vec<SymMatrix> = thetas
        .par_iter()
        .map(|&theta| {
            let mut current = start.clone();
            for _ in 0..k_stop {
                let step = shifted_psi_average(sample, &current, theta, kind)?;
                current.add_assign(&step);
            }
            Ok(current)
        })
        .collect::<Result<_>>()?;
    let radii: Vec<f64> =
        grid.iter().map(|&s| 2.0 * delta_recursive(k_stop, s, bounds.sigma_max, t, n)).collect();
    let j = lepski_select(&estimates, &radii)?;
    let value = estimates.into_iter().nth(j).expect("index from selection");
    Ok(MeanEstimate { value, theta: thetas[j], grid_index: Some(j), iterations: k_stop, residual: None })
}

/// Selection across confidence levels `t_j = 2^j t_min`, `t_min < t_j < 2 t_max`,
/// with `θⱼ = sqrt(2tⱼ/n) / σ` and radii `2σ sqrt(2t_k/n)`, where `σ` stands for
/// `σₙ/sqrt(n)`.
pub fn multi_level_mean(
    sample: &[SymMatrix],
    sigma_n_over_sqrt_n: f64,
    t_min: f64,
    t_max: f64,
    kind: InfluenceKind,
) -> Result<MeanEstimate> {
    check_sample(sample)?;
    let sigma = sigma_n_over_sqrt_n;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma must be positive"));
    }
    if !(t_min > 0.0 && t_max.is_finite() && t_min < t_max) {
        return Err(Error::config(format!("empty t-grid: need 0 < t_min < t_max, got ({t_min}, {t_max})")));
    }
    let levels: Vec<f64> = (1..)
        .map(|j| t_min * 2f64.powi(j))
        .take_while(|&tj| tj < 2.0 * t_max)
        .collect();
    let n = sample.len() as f64;
    let eigs = decompose_all(sample)?;
    let thetas: Vec<f64> = levels.iter().map(|tj| (2.0 * tj / n).sqrt() / sigma).collect();
    let estimates: Vec<SymMatrix> = thetas.par_iter().map(|&th| psi_average(&eigs, th, kind)).collect();
    let radii: Vec<f64> = levels.iter().map(|tk| 2.0 * sigma * (2.0 * tk / n).sqrt()).collect();
    let j = lepski_select(&estimates, &radii)?;
    let value = estimates.into_iter().nth(j).expect("index from selection");
    Ok(MeanEstimate { value, theta: thetas[j], grid_index: Some(j), iterations: 0, residual: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::truncated_mean;

    fn diag(v: f64) -> SymMatrix {
        SymMatrix::from_diag(&[v, 0.0]).unwrap()
    }

    #[test]
    fn relative_grid() {
        let g = sigma_grid(1.0, 8.0, 2.0, GridAnchor::Relative).unwrap();
        assert_eq!(g, vec![1.0, 2.0, 4.0, 8.0]);
        let g = sigma_grid(1.0, 5.0, 2.0, GridAnchor::Relative).unwrap();
        assert_eq!(g, vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(sigma_grid(3.0, 3.0, 2.0, GridAnchor::Relative).unwrap(), vec![3.0]);
        assert!(matches!(sigma_grid(2.0, 1.0, 2.0, GridAnchor::Relative), Err(Error::Config(_))));
    }

    #[test]
    fn absolute_grid() {
        let g = sigma_grid(1.0, 2.0, 1.3, GridAnchor::AbsolutePowers).unwrap();
        assert_eq!(g, vec![1.3, 1.3f64.powi(2)]);
        let g = sigma_grid(0.01, 1.0, 1.3, GridAnchor::AbsolutePowers).unwrap();
        assert!(g[0] > 0.01 && g[0] / 1.3 <= 0.01);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(sigma_grid(1.05, 1.1, 1.3, GridAnchor::AbsolutePowers).is_err());
    }

    #[test]
    fn selection_three_point_violation() {
        // ‖T₁ - T₀‖ = 3 exceeds radius 1 at k = 1; j = 1 sees only ‖T₂ - T₁‖ = 0.5 ≤ 1.
        let estimates = vec![diag(0.0), diag(3.0), diag(3.5)];
        let radii = vec![1.0, 1.0, 1.0];
        assert_eq!(lepski_select(&estimates, &radii).unwrap(), 1);
    }

    #[test]
    fn selection_edge_cases() {
        assert_eq!(lepski_select(&[diag(1.0)], &[0.0]).unwrap(), 0);
        let same = vec![diag(1.0); 5];
        assert_eq!(lepski_select(&same, &[0.0; 5]).unwrap(), 0);
        // nothing but the last index qualifies
        let spread = vec![diag(0.0), diag(10.0), diag(20.0)];
        assert_eq!(lepski_select(&spread, &[0.1; 3]).unwrap(), 2);
        assert!(lepski_select(&[], &[]).is_err());
    }

    #[test]
    fn lepski_mean_constant_sample_picks_first() {
        let c = SymMatrix::from_rows(&[vec![1e-4, 0.0], vec![0.0, -2e-4]]).unwrap();
        let sample = vec![c; 6];
        let b = VarianceBounds::new(1.0, 100.0).unwrap();
        let est = lepski_adaptive_mean(&sample, &LepskiConfig::new(1.0), &b, InfluenceKind::Psi1).unwrap();
        assert_eq!(est.grid_index, Some(0));
    }

    #[test]
    fn lepski_mean_singleton_grid() {
        let sample = vec![diag(1.0), diag(-3.0), diag(7.0)];
        let b = VarianceBounds::new(2.0, 2.0).unwrap();
        let cfg = LepskiConfig::new(1.0);
        let est = lepski_adaptive_mean(&sample, &cfg, &b, InfluenceKind::Psi1).unwrap();
        assert_eq!(est.grid_index, Some(0));
        let theta = (2.0f64 / 3.0).sqrt() / 2.0;
        assert_eq!(est.value, truncated_mean(&sample, theta, InfluenceKind::Psi1).unwrap().value);
    }

    #[test]
    fn multi_level_single_point_and_constant() {
        let sample = vec![diag(1.0), diag(2.0), diag(-0.5)];
        let est = multi_level_mean(&sample, 1.0, 1.0, 1.5, InfluenceKind::Psi1).unwrap();
        assert_eq!(est.grid_index, Some(0));
        let theta = (2.0f64 * 2.0 / 3.0).sqrt();
        assert_eq!(est.value, truncated_mean(&sample, theta, InfluenceKind::Psi1).unwrap().value);

        let constant = vec![diag(1e-5); 4];
        let est = multi_level_mean(&constant, 1.0, 0.5, 40.0, InfluenceKind::Psi1).unwrap();
        assert_eq!(est.grid_index, Some(0));
        assert!(matches!(
            multi_level_mean(&sample, 1.0, 2.0, 1.0, InfluenceKind::Psi1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn multi_level_engineered_violation() {
        // Levels t = 2, 4, 8 for t_min = 1, t_max = 5. Observations are scalars so
        // each level's estimate is known; a single large outlier moves the first
        // estimate far from the later ones.
        let values = [0.0, 0.0, 0.0, 1e6];
        let sample: Vec<SymMatrix> = values.iter().map(|&v| SymMatrix::new(1, vec![v]).unwrap()).collect();
        let sigma = 0.01;
        let est = multi_level_mean(&sample, sigma, 1.0, 5.0, InfluenceKind::Psi1).unwrap();
        let n = 4.0;
        let estimate = |t: f64| {
            let th = (2.0 * t / n).sqrt() / sigma;
            InfluenceKind::Psi1.apply(th * 1e6) / (n * th)
        };
        let radius = |t: f64| 2.0 * sigma * (2.0 * t / n).sqrt();
        let (e1, e2, e3) = (estimate(2.0), estimate(4.0), estimate(8.0));
        let oracle = if (e2 - e1).abs() <= radius(4.0) && (e3 - e1).abs() <= radius(8.0) {
            0
        } else if (e3 - e2).abs() <= radius(8.0) {
            1
        } else {
            2
        };
        assert_eq!(oracle, 1);
        assert_eq!(est.grid_index, Some(oracle));
    }

    #[test]
    fn delta_recursion_values() {
        let (s0, smax, t, n) = (0.7, 5.0, 10f64.ln(), 400);
        let s = (2.0 * t / n as f64).sqrt();
        assert!((delta_recursive(0, s0, smax, t, n) - smax * s).abs() < 1e-15);
        assert!((delta_recursive(1, s0, smax, t, n) - (2.0 * s0 * s + smax * s / 6.0)).abs() < 1e-15);
        for k in 0..12 {
            let a = delta_recursive(k, s0, smax, t, n);
            let b = delta_closed_form(k, s0, smax, t, n);
            assert!((a - b).abs() < 1e-13, "k = {k}");
        }
        assert!((delta_recursive(20, s0, smax, t, n) - 2.4 * s0 * s).abs() < 1e-9);
    }

    #[test]
    fn stop_index() {
        // gap 6^{-k} |σ_max - 2.4 σ₀| ≤ 0.01 · 2.4 σ₀
        assert_eq!(iterative_stop_index(1.0, 2.4), 1);
        let k = iterative_stop_index(0.01, 100.0);
        let gap = (100.0f64 - 0.024).abs();
        assert!(gap / 6f64.powi(k as i32) <= 0.00024);
        assert!(gap / 6f64.powi(k as i32 - 1) > 0.00024);
    }

    #[test]
    fn iterative_constant_sample() {
        let c = SymMatrix::from_rows(&[vec![1e-3, 2e-4], vec![2e-4, -5e-4]]).unwrap();
        let sample = vec![c.clone(); 9];
        let b = VarianceBounds::new(0.5, 2.0).unwrap().with_sigma0(0.1, 1.0).unwrap();
        let est = iterative_adaptive_mean(&sample, 1.0, &b, InfluenceKind::Psi1).unwrap();
        assert_eq!(est.grid_index, Some(0));
        assert!(est.value.sub(&c).op_norm().unwrap() < 1e-10);
    }

    #[test]
    fn two_step_constant_sample() {
        let c = SymMatrix::from_rows(&[vec![1e-3, 2e-4], vec![2e-4, -5e-4]]).unwrap();
        let sample = vec![c.clone(); 9];
        let b = VarianceBounds::new(0.5, 2.0).unwrap().with_sigma0(0.1, 1.0).unwrap();
        let est = two_step_mean(&sample, 1.0, &b, InfluenceKind::Psi1).unwrap();
        assert!(est.value.sub(&c).op_norm().unwrap() < 1e-9);
        assert!(two_step_mean(&sample[..1], 1.0, &b, InfluenceKind::Psi1).is_err());
        let no_sigma0 = VarianceBounds::new(0.5, 2.0).unwrap();
        assert!(two_step_mean(&sample, 1.0, &no_sigma0, InfluenceKind::Psi1).is_err());
    }

    #[test]
    fn two_step_stub_first_stage() {
        let mean = SymMatrix::from_rows(&[vec![50.0, 1.0], vec![1.0, -20.0]]).unwrap();
        let noise = [
            SymMatrix::from_rows(&[vec![0.3, -0.1], vec![-0.1, 0.2]]).unwrap(),
            SymMatrix::from_rows(&[vec![-0.5, 0.4], vec![0.4, 0.1]]).unwrap(),
            SymMatrix::from_rows(&[vec![0.2, 0.0], vec![0.0, -0.6]]).unwrap(),
            SymMatrix::from_rows(&[vec![1.1, 0.2], vec![0.2, 0.3]]).unwrap(),
            SymMatrix::from_rows(&[vec![-0.9, -0.3], vec![-0.3, 0.4]]).unwrap(),
        ];
        let sample: Vec<SymMatrix> = noise.iter().map(|w| mean.add(w)).collect();
        let b = VarianceBounds::new(1.0, 60.0).unwrap().with_sigma0(0.2, 2.0).unwrap();
        let t = 2.0;
        let mut seen = 0;
        let est = two_step_mean_with(&sample, t, &b, InfluenceKind::Psi1, |first| {
            seen = first.len();
            Ok(mean.clone())
        })
        .unwrap();
        assert_eq!(seen, 3);

        // second stage = Lepski on the centred second half, over the σ₀ grid
        let centred: Vec<SymMatrix> = noise[3..].to_vec();
        let upper = 2.0 + 12.0 * 60.0 * (t / 5.0).sqrt();
        let grid = sigma_grid(0.2, upper, 2.0, GridAnchor::Relative).unwrap();
        let cfg = LepskiConfig::new(t);
        let oracle = lepski_adaptive_with(&grid, 2, &cfg, |theta| {
            Ok(truncated_mean(&centred, theta, InfluenceKind::Psi1)?.value)
        })
        .unwrap();
        assert_eq!(est.grid_index, oracle.grid_index);
        assert!(est.value.sub(&mean.add(&oracle.value)).op_norm().unwrap() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(LepskiConfig { kappa: 1.0, ..LepskiConfig::new(1.0) }.validate().is_err());
        assert!(LepskiConfig { kappa: 2.5, ..LepskiConfig::new(1.0) }.validate().is_err());
        assert!(LepskiConfig::new(0.0).validate().is_err());
        assert!(LepskiConfig::simulation(1.0).validate().is_ok());
    }
}
