//! Geometric (spatial) median by Weiszfeld's iteration.

use crate::error::{Error, LastIterate, Result};
use crate::linalg::norm2;

/// A nonempty set of finite points of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let d = points.first().ok_or_else(|| Error::domain("point cloud is empty"))?.len();
        if d == 0 {
            return Err(Error::domain("points must have positive dimension"));
        }
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::domain("points have different dimensions"));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::domain("point cloud contains non-finite coordinates"));
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ ‖y - Zⱼ‖`.
    pub fn distance_sum(&self, y: &[f64]) -> f64 {
        self.points.iter().map(|p| distance(p, y)).sum()
    }

    /// Per-coordinate sample median (mean of the middle pair for even sizes).
    pub fn coordinate_median(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let mut col: Vec<f64> = self.points.iter().map(|p| p[k]).collect();
                col.sort_by(f64::total_cmp);
                let m = col.len();
                if m % 2 == 1 {
                    col[m / 2]
                } else {
                    0.5 * (col[m / 2 - 1] + col[m / 2])
                }
            })
            .collect()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Minimizer of `y ↦ Σ ‖y - Zⱼ‖`.
///
/// Starts at the coordinate-wise median and stops once the sum of unit
/// vectors towards the points not coinciding with the iterate has norm at most
/// `tol · n`. When the iterate sits on data points of multiplicity `m`, it is
/// returned if that sum has norm at most `m` (the point is then optimal), and
/// otherwise moved off by the modified step of Vardi and Zhang.
pub fn geometric_median(cloud: &PointCloud, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::domain("geometric_median needs tol > 0 and max_iter > 0"));
    }
    let n = cloud.len();
    let d = cloud.dim();
    if n == 1 {
        return Ok(cloud.points[0].clone());
    }
    let mut y = cloud.coordinate_median();
    let mut objective = cloud.distance_sum(&y);
    let mut residual = f64::INFINITY;

    for _ in 0..max_iter {
        let scale = 1.0 + norm2(&y);
        let mut coincident = 0usize;
        let mut coincident_point = None;
        let mut weight = 0.0;
        let mut weighted = vec![0.0; d];
        let mut pull = vec![0.0; d];
        for p in &cloud.points {
            let dist = distance(p, &y);
            if dist <= 1e-12 * scale {
                coincident += 1;
                coincident_point = Some(p);
                continue;
            }
            weight += 1.0 / dist;
            for k in 0..d {
                weighted[k] += p[k] / dist;
                pull[k] += (p[k] - y[k]) / dist;
            }
        }
        residual = norm2(&pull);

        let next: Vec<f64> = if coincident > 0 {
            if residual <= coincident as f64 {
                return Ok(coincident_point.expect("counted above").clone());
            }
            if weight == 0.0 {
                unreachable!("a nonzero pull needs non-coincident points");
            }
            let eta = coincident as f64 / residual;
            weighted.iter().zip(&y).map(|(w, yk)| (1.0 - eta) * w / weight + eta * yk).collect()
        } else {
            if residual <= tol * n as f64 {
                return Ok(y);
            }
            weighted.iter().map(|w| w / weight).collect()
        };

        let next_objective = cloud.distance_sum(&next);
        if next_objective > objective * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::numeric(format!(
                "Weiszfeld step increased the objective from {objective} to {next_objective}"
            )));
        }
        if next == y {
            // no representable progress is possible
            return Ok(y);
        }
        y = next;
        objective = next_objective;
    }
    Err(Error::Convergence {
        routine: "geometric_median",
        iterations: max_iter,
        residual,
        last: Box::new(LastIterate::Point(y)),
    })
}
