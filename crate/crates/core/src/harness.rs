//! Monte Carlo experiments: heavy-tailed covariance estimation, matrix
//! completion and matrix mean estimation, with per-replication error records.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::applications::{
    complete, completion_sample_mean, cov_known_mean, cov_ustat, relative_frobenius_error,
    tau_completion, theta_completion,
};
use crate::datagen::{
    gen_completion_sample, gen_low_rank, gen_vector, pareto_symmetric_draw, CovModel, NoiseModel,
    ParetoSpec, RngSeed,
};
use crate::error::{Error, Result};
use crate::estimators::{
    catoni_fixed_point, lepski_adaptive_mean, lepski_adaptive_with, sigma_grid, theta_for,
    truncated_mean, two_step_mean, CatoniOptions, GridAnchor, LepskiConfig, VarianceBounds,
};
use crate::influence::InfluenceKind;
use crate::linalg::{eig_sym, leading_singular_triple, MatrixNorms, RectMatrix, SymMatrix};
use crate::location::{geometric_median, PointCloud, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Cov7,
    Completion,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorTag {
    Sample,
    Truncated,
    Lepski,
    TwoStep,
    FixedPoint,
    Ustat,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 6] = [
        EstimatorTag::Sample,
        EstimatorTag::Truncated,
        EstimatorTag::Lepski,
        EstimatorTag::TwoStep,
        EstimatorTag::FixedPoint,
        EstimatorTag::Ustat,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorTag::Sample => "sample",
            EstimatorTag::Truncated => "truncated",
            EstimatorTag::Lepski => "lepski",
            EstimatorTag::TwoStep => "two_step",
            EstimatorTag::FixedPoint => "fixed_point",
            EstimatorTag::Ustat => "ustat",
        }
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown estimator `{s}`")))
    }
}

fn default_q() -> f64 {
    4.01
}
fn default_reps() -> usize {
    1
}
fn default_t() -> f64 {
    10f64.ln()
}
fn default_kappa() -> f64 {
    1.3
}
fn default_noise_var() -> f64 {
    1.0
}
fn default_estimators() -> Vec<EstimatorTag> {
    vec![EstimatorTag::Sample, EstimatorTag::Lepski]
}

/// Experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub experiment: Experiment,
    /// Dimension for `cov7` and `mean`.
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub d1: Option<usize>,
    #[serde(default)]
    pub d2: Option<usize>,
    #[serde(default)]
    pub rank: Option<usize>,
    /// Diagonal of the covariance (`cov7`) or of the mean (`mean`); defaults
    /// to `(10, 5, 1, 1/(d-3), ...)`.
    #[serde(default)]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default = "default_q")]
    pub q: f64,
    /// Noise variance for `completion` and entry variance for `mean`.
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
    pub n: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_kappa")]
    pub grid_kappa: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorTag>,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        SimConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::config("reps must be at least 1"));
        }
        if self.n < 2 {
            return Err(Error::config("n must be at least 2"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::config("t must be positive"));
        }
        if !(self.grid_kappa > 1.0 && self.grid_kappa <= 2.0) {
            return Err(Error::config("grid_kappa must lie in (1, 2]"));
        }
        if !(self.noise_var >= 0.0 && self.noise_var.is_finite()) {
            return Err(Error::config("noise_var must be nonnegative"));
        }
        ParetoSpec::new(self.q).map_err(|e| Error::config(e.to_string()))?;
        if self.estimators.is_empty() {
            return Err(Error::config("no estimators requested"));
        }
        let allowed: &[EstimatorTag] = match self.experiment {
            Experiment::Cov7 => &EstimatorTag::ALL,
            Experiment::Completion => &[EstimatorTag::Sample, EstimatorTag::Truncated],
            Experiment::Mean => &EstimatorTag::ALL[..5],
        };
        if let Some(bad) = self.estimators.iter().find(|e| !allowed.contains(e)) {
            return Err(Error::config(format!("estimator `{bad}` does not apply to this experiment")));
        }
        match self.experiment {
            Experiment::Cov7 | Experiment::Mean => {
                self.model().map_err(|e| Error::config(e.to_string()))?;
            }
            Experiment::Completion => {
                let (d1, d2, r) = self.completion_shape()?;
                if r == 0 || r > d1.min(d2) {
                    return Err(Error::config(format!("rank {r} is impossible for {d1}×{d2}")));
                }
            }
        }
        Ok(())
    }

    fn model(&self) -> Result<CovModel> {
        match (&self.spectrum, self.d) {
            (Some(s), Some(d)) if s.len() != d => {
                Err(Error::config(format!("spectrum has {} entries but d = {d}", s.len())))
            }
            (Some(s), _) => CovModel::new(s.clone()),
            (None, Some(d)) => CovModel::simulation_default(d),
            (None, None) => Err(Error::config("need `d` or `spectrum`")),
        }
    }

    fn completion_shape(&self) -> Result<(usize, usize, usize)> {
        match (self.d1, self.d2, self.rank) {
            (Some(d1), Some(d2), Some(r)) if d1 > 0 && d2 > 0 => Ok((d1, d2, r)),
            _ => Err(Error::config("completion needs positive `d1`, `d2` and `rank`")),
        }
    }
}

/// Errors of one estimator in one replication. For covariance and mean runs,
/// `op_error` is the relative operator-norm error; for completion it is the
/// relative Frobenius error. `pc_error` is the operator-norm distance between
/// the projectors onto the leading (left singular) directions of the estimate
/// and of the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub rep: usize,
    pub estimator: EstimatorTag,
    pub op_error: f64,
    pub pc_error: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimFailure {
    pub rep: usize,
    pub estimator: EstimatorTag,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorTag,
    pub count: usize,
    pub op_error: Quartiles,
    pub pc_error: Quartiles,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimResult {
    pub records: Vec<SimRecord>,
    pub failures: Vec<SimFailure>,
}

impl SimResult {
    /// Quartiles of both errors for each estimator that has records.
    pub fn summary(&self) -> Vec<EstimatorSummary> {
        let mut tags: Vec<EstimatorTag> = self.records.iter().map(|r| r.estimator).collect();
        tags.sort();
        tags.dedup();
        tags.into_iter()
            .map(|tag| {
                let pick = |f: fn(&SimRecord) -> f64| -> Vec<f64> {
                    self.records.iter().filter(|r| r.estimator == tag).map(f).collect()
                };
                let op = pick(|r| r.op_error);
                let pc = pick(|r| r.pc_error);
                EstimatorSummary { estimator: tag, count: op.len(), op_error: quartiles(&op), pc_error: quartiles(&pc) }
            })
            .collect()
    }

    pub fn median_op_error(&self, tag: EstimatorTag) -> Option<f64> {
        self.summary().into_iter().find(|s| s.estimator == tag).map(|s| s.op_error.median)
    }

    pub fn median_pc_error(&self, tag: EstimatorTag) -> Option<f64> {
        self.summary().into_iter().find(|s| s.estimator == tag).map(|s| s.pc_error.median)
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            failures: usize,
            summary: &'a [EstimatorSummary],
        }
        let summary = self.summary();
        serde_json::to_string_pretty(&Out { failures: self.failures.len(), summary: &summary })
            .expect("summary serializes")
    }
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n-1)p`).
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty set");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn quartiles(values: &[f64]) -> Quartiles {
    Quartiles { q1: quantile(values, 0.25), median: quantile(values, 0.5), q3: quantile(values, 0.75) }
}

pub fn write_results<W: Write>(writer: W, result: &SimResult) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    if result.records.is_empty() {
        csv.write_record(["rep", "estimator", "op_error", "pc_error", "wall_ms"])
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    for r in &result.records {
        csv.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<SimRecord>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["rep", "estimator", "op_error", "pc_error", "wall_ms"] {
        return Err(Error::Parse(format!("unexpected results header {header:?}")));
    }
    csv.deserialize().map(|r| r.map_err(|e| Error::Parse(e.to_string()))).collect()
}

pub fn write_results_to(path: impl AsRef<Path>, result: &SimResult) -> Result<()> {
    write_results(std::fs::File::create(path)?, result)
}

pub fn read_results_from(path: impl AsRef<Path>) -> Result<Vec<SimRecord>> {
    read_results(std::fs::File::open(path)?)
}

/// `σ_max = 2 sqrt(‖(1/n) Σ ‖Zⱼ‖² Zⱼ Zⱼᵀ‖)` and `σ_min = σ_max / 100`.
pub fn sigma_bracket_from_data(z: &[Vec<f64>]) -> Result<(f64, f64)> {
    let d = z.first().ok_or_else(|| Error::config("no data"))?.len();
    if z.iter().any(|v| v.len() != d) {
        return Err(Error::domain("vectors have different lengths"));
    }
    let mut acc = SymMatrix::zeros(d);
    for v in z {
        let sq: f64 = v.iter().map(|x| x * x).sum();
        acc.add_outer(sq, v);
    }
    acc.scale_mut(1.0 / z.len() as f64);
    let norm = acc.op_norm()?;
    if norm == 0.0 {
        return Err(Error::config("all observations are zero; the variance bracket is undefined"));
    }
    let sigma_max = 2.0 * norm.sqrt();
    Ok((sigma_max / 100.0, sigma_max))
}

/// `‖u uᵀ - v vᵀ‖` for unit vectors, which equals `sqrt(1 - ⟨u, v⟩²)`.
pub fn projector_distance(u: &[f64], v: &[f64]) -> f64 {
    let c: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    (1.0 - c * c).max(0.0).sqrt()
}

fn sym_errors(estimate: &SymMatrix, truth: &SymMatrix, truth_direction: &[f64]) -> Result<(f64, f64)> {
    let op = estimate.sub(truth).op_norm()? / truth.op_norm()?;
    let top = eig_sym(estimate)?.eigenvector(0);
    Ok((op, projector_distance(&top, truth_direction)))
}

fn rect_errors(estimate: &RectMatrix, truth: &RectMatrix, truth_direction: &[f64]) -> Result<(f64, f64)> {
    let fro = relative_frobenius_error(estimate, truth)?;
    let pc = match leading_singular_triple(estimate)? {
        Some((_, u, _)) => projector_distance(&u, truth_direction),
        None => 1.0,
    };
    Ok((fro, pc))
}

type Outcome = (Vec<SimRecord>, Vec<SimFailure>);

fn timed<F>(rep: usize, tag: EstimatorTag, out: &mut Outcome, f: F)
where
    F: FnOnce() -> Result<(f64, f64)>,
{
    let start = Instant::now();
    match f() {
        Ok((op_error, pc_error)) => {
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            out.0.push(SimRecord { rep, estimator: tag, op_error, pc_error, wall_ms });
        }
        Err(e) => {
            log::warn!("replication {rep}, estimator {tag}: {e}");
            out.1.push(SimFailure { rep, estimator: tag, message: e.to_string() });
        }
    }
}

fn fail_all(rep: usize, tags: &[EstimatorTag], err: &Error) -> Outcome {
    log::warn!("replication {rep}: {err}");
    let failures = tags.iter().map(|&estimator| SimFailure { rep, estimator, message: err.to_string() }).collect();
    (Vec::new(), failures)
}

fn run_parallel<F>(cfg: &SimConfig, one: F) -> SimResult
where
    F: Fn(usize) -> Outcome + Sync + Send,
{
    let outcomes: Vec<Outcome> = (0..cfg.reps).into_par_iter().map(one).collect();
    let mut result = SimResult::default();
    for (records, failures) in outcomes {
        result.records.extend(records);
        result.failures.extend(failures);
    }
    result.records.sort_by_key(|r| (r.rep, r.estimator));
    result.failures.sort_by_key(|f| (f.rep, f.estimator));
    result
}

pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    match cfg.experiment {
        Experiment::Cov7 => run_cov7(cfg),
        Experiment::Completion => run_completion(cfg),
        Experiment::Mean => run_mean(cfg),
    }
}

/// Covariance experiment: heavy-tailed vectors centred at their geometric
/// median; the robust estimator is Lepski-tuned over `σ_j = κ^j` with radii
/// `κ^k sqrt(t/n)`.
pub fn run_cov7(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.experiment != Experiment::Cov7 {
        return Err(Error::config("run_cov7 needs a cov7 config"));
    }
    cfg.validate()?;
    let model = cfg.model()?;
    let spec = ParetoSpec::new(cfg.q)?;
    let truth = model.sigma();
    let direction = model.leading_direction();
    let seed = RngSeed(cfg.seed);
    let n = cfg.n;

    Ok(run_parallel(cfg, |rep| {
        let mut rng = seed.for_rep(rep as u64).rng();
        let z: Vec<Vec<f64>> = (0..n).map(|_| gen_vector(&model, &spec, &mut rng)).collect();
        let prepared = PointCloud::new(z.clone())
            .and_then(|c| geometric_median(&c, DEFAULT_TOL, DEFAULT_MAX_ITER))
            .and_then(|centre| {
                let z0: Vec<Vec<f64>> =
                    z.iter().map(|v| v.iter().zip(&centre).map(|(a, b)| a - b).collect()).collect();
                let bracket = sigma_bracket_from_data(&z0)?;
                Ok((z0, bracket))
            });
        let (z0, (s_min, s_max)) = match prepared {
            Ok(p) => p,
            Err(e) => return fail_all(rep, &cfg.estimators, &e),
        };
        let theta = (2.0 * cfg.t / n as f64).sqrt() / (s_max / 2.0);
        let outer: Vec<SymMatrix> = z0.iter().map(|v| SymMatrix::outer(v).expect("nonempty")).collect();

        let mut out = Outcome::default();
        for &tag in &cfg.estimators {
            timed(rep, tag, &mut out, || {
                let estimate = match tag {
                    EstimatorTag::Sample => {
                        let mut s = SymMatrix::zeros(model.dim());
                        for v in &z0 {
                            s.add_outer(1.0, v);
                        }
                        s.scaled(1.0 / n as f64)
                    }
                    EstimatorTag::Truncated => cov_known_mean(&z0, theta, InfluenceKind::Psi1)?.sigma_hat,
                    EstimatorTag::Lepski => {
                        let lc = LepskiConfig {
                            t: cfg.t,
                            kappa: cfg.grid_kappa,
                            radius_factor: std::f64::consts::FRAC_1_SQRT_2,
                            anchor: GridAnchor::AbsolutePowers,
                        };
                        let grid = sigma_grid(s_min, s_max, lc.kappa, lc.anchor)?;
                        lepski_adaptive_with(&grid, n, &lc, |th| {
                            Ok(cov_known_mean(&z0, th, InfluenceKind::Psi1)?.sigma_hat)
                        })?
                        .value
                    }
                    EstimatorTag::TwoStep => {
                        let b = VarianceBounds::new(s_min, s_max)?.with_sigma0(s_min, s_max)?;
                        two_step_mean(&outer, cfg.t, &b, InfluenceKind::Psi1)?.value
                    }
                    EstimatorTag::FixedPoint => {
                        catoni_fixed_point(&outer, theta, InfluenceKind::Psi1, &CatoniOptions::default())?.value
                    }
                    EstimatorTag::Ustat => cov_ustat(&z, theta, InfluenceKind::Psi1)?.sigma_hat,
                };
                sym_errors(&estimate, &truth, &direction)
            });
        }
        out
    }))
}

/// Completion experiment: random rank-`r` `A₀`, symmetric Pareto noise;
/// `sample` is the unweighted estimate and `truncated` the thresholded robust one.
pub fn run_completion(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.experiment != Experiment::Completion {
        return Err(Error::config("run_completion needs a completion config"));
    }
    cfg.validate()?;
    let (d1, d2, rank) = cfg.completion_shape()?;
    let noise = NoiseModel::pareto(cfg.q, cfg.noise_var)?;
    let seed = RngSeed(cfg.seed);
    let n = cfg.n;

    Ok(run_parallel(cfg, |rep| {
        let mut rng = seed.for_rep(rep as u64).rng();
        let drawn = gen_low_rank(d1, d2, rank, &mut rng).and_then(|a0| {
            let obs = gen_completion_sample(&a0, n, &noise, &mut rng)?;
            let direction = leading_singular_triple(&a0)?
                .map(|(_, u, _)| u)
                .ok_or_else(|| Error::numeric("drawn A0 is zero"))?;
            Ok((a0, obs, direction))
        });
        let (a0, obs, direction) = match drawn {
            Ok(d) => d,
            Err(e) => return fail_all(rep, &cfg.estimators, &e),
        };
        let scale = a0.max_abs().max(noise.variance().sqrt());

        let mut out = Outcome::default();
        for &tag in &cfg.estimators {
            timed(rep, tag, &mut out, || {
                let estimate = match tag {
                    EstimatorTag::Sample => completion_sample_mean(&obs, d1, d2)?,
                    EstimatorTag::Truncated => {
                        let theta = theta_completion(cfg.t, n, d1, d2, scale)?;
                        let tau = tau_completion(cfg.t, n, d1, d2, scale)?;
                        complete(&obs, d1, d2, theta, tau, InfluenceKind::Psi1)?.thresholded
                    }
                    other => return Err(Error::config(format!("estimator `{other}` does not apply"))),
                };
                rect_errors(&estimate, &a0, &direction)
            });
        }
        out
    }))
}

/// Matrix mean experiment: `Yⱼ = M + Wⱼ` with `M = diag(spectrum)` and `Wⱼ`
/// symmetric with independent symmetric Pareto entries of variance `noise_var`,
/// so that `E(Y - M)² = d · noise_var · I`. Estimators are tuned with the exact
/// `σ` and `σ₀`, and adaptive ones get brackets spanning a factor 10 each way.
pub fn run_mean(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.experiment != Experiment::Mean {
        return Err(Error::config("run_mean needs a mean config"));
    }
    cfg.validate()?;
    let model = cfg.model()?;
    let spec = ParetoSpec::new(cfg.q)?;
    let d = model.dim();
    let truth = model.sigma();
    let direction = model.leading_direction();
    let top = model.spectrum().iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::config("mean experiment needs a nonzero spectrum"));
    }
    let sigma0 = (d as f64 * cfg.noise_var).sqrt();
    let sigma = (top * top + sigma0 * sigma0).sqrt();
    let seed = RngSeed(cfg.seed);
    let n = cfg.n;
    let sd = cfg.noise_var.sqrt();

    Ok(run_parallel(cfg, |rep| {
        let mut rng = seed.for_rep(rep as u64).rng();
        let sample: Vec<SymMatrix> = (0..n)
            .map(|_| {
                let mut w = vec![0.0; d * d];
                for i in 0..d {
                    for j in i..d {
                        let x = sd * pareto_symmetric_draw(&spec, &mut rng);
                        w[i * d + j] = x;
                        w[j * d + i] = x;
                    }
                }
                truth.add(&SymMatrix::new(d, w).expect("square"))
            })
            .collect();

        let mut out = Outcome::default();
        for &tag in &cfg.estimators {
            timed(rep, tag, &mut out, || {
                let estimate = match tag {
                    EstimatorTag::Sample => {
                        let mut s = SymMatrix::zeros(d);
                        for y in &sample {
                            s.add_assign(y);
                        }
                        s.scaled(1.0 / n as f64)
                    }
                    EstimatorTag::Truncated => {
                        truncated_mean(&sample, theta_for(sigma, n, cfg.t)?, InfluenceKind::Psi1)?.value
                    }
                    EstimatorTag::Lepski => {
                        let b = VarianceBounds::new(sigma / 10.0, sigma * 10.0)?;
                        let lc = LepskiConfig { kappa: cfg.grid_kappa, ..LepskiConfig::new(cfg.t) };
                        lepski_adaptive_mean(&sample, &lc, &b, InfluenceKind::Psi1)?.value
                    }
                    EstimatorTag::TwoStep => {
                        let s0 = sigma0.max(f64::MIN_POSITIVE);
                        let b = VarianceBounds::new(sigma / 10.0, sigma * 10.0)?.with_sigma0(s0 / 10.0, s0 * 10.0)?;
                        two_step_mean(&sample, cfg.t, &b, InfluenceKind::Psi1)?.value
                    }
                    EstimatorTag::FixedPoint => {
                        let th = theta_for(sigma0.max(f64::MIN_POSITIVE), n, cfg.t)?;
                        catoni_fixed_point(&sample, th, InfluenceKind::Psi1, &CatoniOptions::default())?.value
                    }
                    EstimatorTag::Ustat => return Err(Error::config("ustat does not apply to mean runs")),
                };
                sym_errors(&estimate, &truth, &direction)
            });
        }
        out
    }))
}
