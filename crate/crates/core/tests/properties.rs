use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use robust_mean::applications::cov_ustat;
use robust_mean::datagen::{pareto_symmetric_draw, ParetoSpec};
use robust_mean::estimators::{
    catoni_fixed_point, lepski_adaptive_mean, lepski_select, psi_alpha_mean, sigma_grid, truncated_mean,
    CatoniOptions, GridAnchor, LepskiConfig, VarianceBounds,
};
use robust_mean::influence::{c_alpha, Alpha};
use robust_mean::location::{geometric_median, PointCloud};
use robust_mean::{InfluenceKind, MatrixNorms, RectMatrix, SymMatrix};

fn kind_strategy() -> impl Strategy<Value = InfluenceKind> {
    prop_oneof![
        Just(InfluenceKind::Psi1),
        Just(InfluenceKind::Psi2),
        (1.01f64..=2.0).prop_map(|a| InfluenceKind::PsiAlpha(Alpha::new(a).unwrap())),
    ]
}

fn heavy_sample(seed: u64, n: usize, d: usize, shift: f64) -> Vec<SymMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = ParetoSpec::new(3.0).unwrap();
    (0..n)
        .map(|_| {
            let mut data = vec![0.0; d * d];
            for i in 0..d {
                for j in i..d {
                    let x = pareto_symmetric_draw(&spec, &mut rng) + if i == j { shift } else { 0.0 };
                    data[i * d + j] = x;
                    data[j * d + i] = x;
                }
            }
            SymMatrix::new(d, data).unwrap()
        })
        .collect()
}

fn orthogonal(d: usize, seed: u64) -> RectMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for u in &cols {
            let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    RectMatrix::new(d, d, (0..d).flat_map(|i| cols.iter().map(move |c| c[i])).collect()).unwrap()
}

fn dist(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.sub(b).op_norm().unwrap()
}

fn shuffled<T: Clone>(v: &[T], seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = v.to_vec();
    for i in (1..out.len()).rev() {
        out.swap(i, rng.random_range(0..=i));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn psi1_and_psi2_are_odd_monotone_and_sandwiched(x in -1e3f64..1e3, h in 1e-6f64..10.0) {
        for kind in [InfluenceKind::Psi1, InfluenceKind::Psi2] {
            prop_assert_eq!(kind.apply(-x), -kind.apply(x));
            prop_assert!(kind.apply(x + h) >= kind.apply(x));
            prop_assert!(kind.apply(x) <= (1.0 + x + x * x).ln());
            prop_assert!(kind.apply(x) >= -(1.0 - x + x * x).ln());
        }
    }

    #[test]
    fn psi_alpha_sandwich(alpha in 1.01f64..=2.0, x in -1e3f64..1e3) {
        let c = c_alpha(alpha).unwrap();
        let p = InfluenceKind::psi_alpha(alpha).unwrap().apply(x);
        let g = c * x.abs().powf(alpha);
        prop_assert!(1.0 - x + g > 0.0);
        prop_assert!(p <= (1.0 + x + g).ln() + 1e-12 * (1.0 + p.abs()));
        prop_assert!(p >= -(1.0 - x + g).ln() - 1e-12 * (1.0 + p.abs()));
    }

    #[test]
    fn one_by_one_truncated_mean_is_the_scalar_loop(
        ys in prop::collection::vec(-1e3f64..1e3, 1..60),
        theta in 1e-4f64..2.0,
        kind in kind_strategy(),
    ) {
        let sample: Vec<SymMatrix> = ys.iter().map(|&y| SymMatrix::new(1, vec![y]).unwrap()).collect();
        let mut s = 0.0;
        for &y in &ys {
            s += kind.apply(theta * y);
        }
        let oracle = s * (1.0 / (ys.len() as f64 * theta));
        prop_assert_eq!(truncated_mean(&sample, theta, kind).unwrap().value.get(0, 0), oracle);
        if let InfluenceKind::PsiAlpha(a) = kind {
            prop_assert_eq!(psi_alpha_mean(&sample, theta, a.value()).unwrap().value.get(0, 0), oracle);
        }
    }

    #[test]
    fn one_by_one_lepski_is_the_scalar_loop(seed in 0u64..1000, n in 5usize..80) {
        let sample = heavy_sample(seed, n, 1, 3.0);
        let ys: Vec<f64> = sample.iter().map(|y| y.get(0, 0)).collect();
        let t = 10f64.ln();
        let cfg = LepskiConfig::new(t);
        let bounds = VarianceBounds::new(0.1, 50.0).unwrap();
        let got = lepski_adaptive_mean(&sample, &cfg, &bounds, InfluenceKind::Psi1).unwrap();

        let grid = sigma_grid(0.1, 50.0, 2.0, GridAnchor::Relative).unwrap();
        let scale = (2.0 * t / n as f64).sqrt();
        let est: Vec<f64> = grid
            .iter()
            .map(|s| {
                let theta = scale / s;
                let mut acc = 0.0;
                for &y in &ys {
                    acc += InfluenceKind::Psi1.apply(theta * y);
                }
                acc * (1.0 / (n as f64 * theta))
            })
            .collect();
        let j = (0..grid.len())
            .find(|&j| (j + 1..grid.len()).all(|k| (est[k] - est[j]).abs() <= 2.0 * grid[k] * scale))
            .unwrap();
        prop_assert_eq!(got.grid_index, Some(j));
        prop_assert_eq!(got.value.get(0, 0), est[j]);
    }

    #[test]
    fn estimators_are_permutation_invariant(seed in 0u64..1000, n in 3usize..40, d in 1usize..5) {
        let sample = heavy_sample(seed, n, d, 2.0);
        let perm = shuffled(&sample, seed + 1);
        let theta = 0.3;
        let a = truncated_mean(&sample, theta, InfluenceKind::Psi1).unwrap().value;
        let b = truncated_mean(&perm, theta, InfluenceKind::Psi1).unwrap().value;
        prop_assert!(dist(&a, &b) <= 1e-12 * (1.0 + a.frob_norm()));

        let opts = CatoniOptions { tol: Some(1e-12), max_iter: 5000, ..CatoniOptions::default() };
        let a = catoni_fixed_point(&sample, theta, InfluenceKind::Psi1, &opts).unwrap().value;
        let b = catoni_fixed_point(&perm, theta, InfluenceKind::Psi1, &opts).unwrap().value;
        prop_assert!(dist(&a, &b) <= 1e-9);

        let bounds = VarianceBounds::new(0.05, 100.0).unwrap();
        let a = lepski_adaptive_mean(&sample, &LepskiConfig::new(2.0), &bounds, InfluenceKind::Psi1).unwrap();
        let b = lepski_adaptive_mean(&perm, &LepskiConfig::new(2.0), &bounds, InfluenceKind::Psi1).unwrap();
        prop_assert_eq!(a.grid_index, b.grid_index);
        prop_assert!(dist(&a.value, &b.value) <= 1e-12 * (1.0 + a.value.frob_norm()));

        let z: Vec<Vec<f64>> = sample.iter().map(|y| y.diag()).collect();
        let zp = shuffled(&z, seed + 2);
        prop_assert_eq!(cov_ustat(&z, 0.2, InfluenceKind::Psi1).unwrap(), cov_ustat(&zp, 0.2, InfluenceKind::Psi1).unwrap());
    }

    #[test]
    fn estimators_are_orthogonally_equivariant(seed in 0u64..1000, n in 3usize..30, d in 2usize..6) {
        let sample = heavy_sample(seed, n, d, 1.5);
        let q = orthogonal(d, seed ^ 0xabc);
        let rotated: Vec<SymMatrix> = sample.iter().map(|y| y.conjugate(&q)).collect();
        let theta = 0.25;

        let a = truncated_mean(&sample, theta, InfluenceKind::Psi1).unwrap().value.conjugate(&q);
        let b = truncated_mean(&rotated, theta, InfluenceKind::Psi1).unwrap().value;
        prop_assert!(dist(&a, &b) <= 1e-8);

        let opts = CatoniOptions { tol: Some(1e-12), max_iter: 5000, ..CatoniOptions::default() };
        let a = catoni_fixed_point(&sample, theta, InfluenceKind::Psi2, &opts).unwrap().value.conjugate(&q);
        let b = catoni_fixed_point(&rotated, theta, InfluenceKind::Psi2, &opts).unwrap().value;
        prop_assert!(dist(&a, &b) <= 1e-8);
    }

    #[test]
    fn lepski_reselects_on_the_truncated_grid(seed in 0u64..1000, n in 5usize..60) {
        let sample = heavy_sample(seed, n, 3, 1.0);
        let t = 10f64.ln();
        let grid = sigma_grid(0.05, 40.0, 2.0, GridAnchor::Relative).unwrap();
        let scale = (2.0 * t / n as f64).sqrt();
        let estimates: Vec<SymMatrix> =
            grid.iter().map(|s| truncated_mean(&sample, scale / s, InfluenceKind::Psi1).unwrap().value).collect();
        let radii: Vec<f64> = grid.iter().map(|s| 2.0 * s * scale).collect();
        let j = lepski_select(&estimates, &radii).unwrap();
        prop_assert_eq!(lepski_select(&estimates[j..], &radii[j..]).unwrap(), 0);
    }

    #[test]
    fn truncated_mean_is_first_order_translation_covariant(seed in 0u64..1000, c in -5.0f64..5.0) {
        let sample = heavy_sample(seed, 20, 3, 0.0);
        let shift = SymMatrix::from_diag(&[c, 0.5 * c, -c]).unwrap();
        let shifted: Vec<SymMatrix> = sample.iter().map(|y| y.add(&shift)).collect();
        let largest = shifted.iter().chain(&sample).map(|y| y.op_norm().unwrap()).fold(0.0, f64::max);
        let c_norm = shift.op_norm().unwrap();
        let theta = 1e-4 / (largest + c_norm);
        let a = truncated_mean(&shifted, theta, InfluenceKind::Psi1).unwrap().value;
        let b = truncated_mean(&sample, theta, InfluenceKind::Psi1).unwrap().value;
        prop_assert!(dist(&a.sub(&b), &shift) <= 1e-6 * (1.0 + c_norm));
    }

    #[test]
    fn fixed_point_is_translation_equivariant(seed in 0u64..1000, c in -20.0f64..20.0) {
        let sample = heavy_sample(seed, 25, 2, 0.0);
        let shift = SymMatrix::from_rows(&[vec![c, 0.3 * c], vec![0.3 * c, -0.5 * c]]).unwrap();
        let shifted: Vec<SymMatrix> = sample.iter().map(|y| y.add(&shift)).collect();
        let tol = 1e-10;
        let opts = CatoniOptions { tol: Some(tol), max_iter: 10_000, ..CatoniOptions::default() };
        let a = catoni_fixed_point(&shifted, 0.4, InfluenceKind::Psi1, &opts).unwrap();
        let b = catoni_fixed_point(&sample, 0.4, InfluenceKind::Psi1, &opts).unwrap();
        prop_assert!(dist(&a.value.sub(&b.value), &shift) <= 2.0 * tol * (1.0 + shift.op_norm().unwrap()));
    }

    #[test]
    fn geometric_median_is_equivariant(seed in 0u64..1000, n in 1usize..30, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let tol = 1e-8;
        let m = geometric_median(&PointCloud::new(pts.clone()).unwrap(), tol, 10_000).unwrap();
        let c: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&c).map(|(a, b)| a + b).collect()).collect();
        let mm = geometric_median(&PointCloud::new(moved).unwrap(), tol, 10_000).unwrap();
        let f = PointCloud::new(pts).unwrap();
        for i in 0..d {
            prop_assert!((mm[i] - m[i] - c[i]).abs() <= 2.0 * tol, "coordinate {i}: {} vs {}", mm[i], m[i] + c[i]);
        }
        prop_assert!(f.distance_sum(&m).is_finite());
    }
}
