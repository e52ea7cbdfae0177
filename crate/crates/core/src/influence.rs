//! Scalar influence functions.
//!
//! Every spectral estimator in this crate is built by lifting one of these
//! scalar maps to symmetric matrices through the eigendecomposition. The
//! supported choices are
//!
//! * `Psi1`: `log(1 + x + x²/2)` for `x ≥ 0` and `-log(1 - x + x²/2)` for `x < 0`;
//! * `Psi2`: the bounded map `x - x²/2` on `[0, 1]`, saturated at `1/2`, and
//!   extended to negative arguments by oddness;
//! * `PsiAlpha(α)`: `log(1 + x + c_α |x|^α)` for `α ∈ (1, 2]`, intended for
//!   observations with only `α` finite moments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tail exponent of the `PsiAlpha` influence function, validated to lie in `(1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    alpha: f64,
    c: f64,
}

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        let c = c_alpha(alpha)?;
        Ok(Alpha { alpha, c })
    }

    pub fn value(&self) -> f64 {
        self.alpha
    }

    /// The constant `c_α` multiplying `|x|^α`.
    pub fn c(&self) -> f64 {
        self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InfluenceKind {
    #[default]
    Psi1,
    Psi2,
    PsiAlpha(Alpha),
}

impl InfluenceKind {
    pub fn psi_alpha(alpha: f64) -> Result<Self> {
        Ok(InfluenceKind::PsiAlpha(Alpha::new(alpha)?))
    }

    /// Evaluates the influence function at a finite argument.
    ///
    /// Non-finite arguments propagate to the output; use [`psi_eval`] when the
    /// input has not been validated.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            InfluenceKind::Psi1 => psi1(x),
            InfluenceKind::Psi2 => psi2(x),
            InfluenceKind::PsiAlpha(a) => psi_alpha(a, x),
        }
    }
}

impl fmt::Display for InfluenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfluenceKind::Psi1 => write!(f, "psi1"),
            InfluenceKind::Psi2 => write!(f, "psi2"),
            InfluenceKind::PsiAlpha(a) => write!(f, "alpha={}", a.value()),
        }
    }
}

impl FromStr for InfluenceKind {
    type Err = Error;

    /// Parses `psi1`, `psi2` or `alpha=<a>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "psi1" => Ok(InfluenceKind::Psi1),
            "psi2" => Ok(InfluenceKind::Psi2),
            _ => {
                let value = s
                    .strip_prefix("alpha=")
                    .ok_or_else(|| Error::Parse(format!("unknown influence function `{s}`")))?;
                let alpha: f64 = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid alpha `{value}`")))?;
                InfluenceKind::psi_alpha(alpha)
            }
        }
    }
}

/// `c_α = max((α - 1)/α, sqrt((2 - α)/α))` for `α ∈ (1, 2]`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    Ok(((alpha - 1.0) / alpha).max(((2.0 - alpha) / alpha).sqrt()))
}

/// Evaluates `kind` at `x`, rejecting non-finite input.
pub fn psi_eval(kind: InfluenceKind, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("influence function argument {x} is not finite")));
    }
    Ok(kind.apply(x))
}

/// `log(1 + a + a²/2)` for `a ≥ 0`, without overflowing for large `a`.
#[inline]
fn log_quadratic(a: f64) -> f64 {
    if a > 1e8 {
        2.0 * a.ln() - std::f64::consts::LN_2 + (2.0 / a + 2.0 / (a * a)).ln_1p()
    } else {
        (a + 0.5 * a * a).ln_1p()
    }
}

#[inline]
fn psi1(x: f64) -> f64 {
    if x >= 0.0 {
        log_quadratic(x)
    } else {
        -log_quadratic(-x)
    }
}

#[inline]
fn psi2(x: f64) -> f64 {
    let a = x.abs();
    let v = if a > 1.0 { 0.5 } else { a - 0.5 * a * a };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[inline]
fn psi_alpha(a: &Alpha, x: f64) -> f64 {
    (x + a.c * x.abs().powf(a.alpha)).ln_1p()
}

/// The bounded influence function exactly as it is usually printed:
/// `x - x²/2` on `[-1, 1]` and `1/2` elsewhere.
///
/// It is neither odd nor monotone on `[-1, 0)` and is not used by any
/// estimator; it exists only to compare against [`InfluenceKind::Psi2`].
pub fn psi2_as_printed(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        x - 0.5 * x * x
    } else {
        0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> impl Iterator<Item = f64> {
        (0..=4000).map(|i| -50.0 + 100.0 * i as f64 / 4000.0)
    }

    #[test]
    fn psi1_reference_values() {
        assert_eq!(psi_eval(InfluenceKind::Psi1, 0.0).unwrap(), 0.0);
        let v = psi_eval(InfluenceKind::Psi1, 1.0).unwrap();
        assert!((v - 2.5f64.ln()).abs() < 1e-15);
        assert!((v - 0.9162907).abs() < 1e-7);
        assert_eq!(psi_eval(InfluenceKind::Psi1, -1.0).unwrap(), -v);
    }

    #[test]
    fn psi2_saturates_at_one_half() {
        assert_eq!(psi_eval(InfluenceKind::Psi2, 10.0).unwrap(), 0.5);
        assert_eq!(psi_eval(InfluenceKind::Psi2, -10.0).unwrap(), -0.5);
        assert_eq!(psi_eval(InfluenceKind::Psi2, 1.0).unwrap(), 0.5);
        for x in grid() {
            assert!(psi2(x).abs() <= 0.5);
        }
    }

    #[test]
    fn c_alpha_values() {
        assert_eq!(c_alpha(2.0).unwrap(), 0.5);
        assert!((c_alpha(1.5).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // branch comparison: (α-1)/α = 0.0909.. < sqrt(0.9/1.1) = 0.90453..
        let c = c_alpha(1.1).unwrap();
        assert!((c - (0.9f64 / 1.1).sqrt()).abs() < 1e-15);
        assert!((c - 0.904534).abs() < 1e-6);
        assert!(c_alpha(1.0).is_err());
        assert!(c_alpha(2.5).is_err());
        assert!(c_alpha(f64::NAN).is_err());
    }

    #[test]
    fn psi_alpha_reference_value() {
        let kind = InfluenceKind::psi_alpha(1.5).unwrap();
        // log(1 + 1 + sqrt(1/3)), evaluated independently
        let expected = (2.0 + (1.0f64 / 3.0).sqrt()).ln();
        let v = psi_eval(kind, 1.0).unwrap();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.9467618).abs() < 1e-7);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        for kind in [InfluenceKind::Psi1, InfluenceKind::Psi2] {
            assert!(matches!(psi_eval(kind, f64::NAN), Err(Error::Domain(_))));
            assert!(matches!(psi_eval(kind, f64::INFINITY), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn psi1_and_psi2_are_odd_and_monotone() {
        for kind in [InfluenceKind::Psi1, InfluenceKind::Psi2] {
            let mut prev = f64::NEG_INFINITY;
            for x in grid() {
                let v = kind.apply(x);
                assert_eq!(kind.apply(-x), -v);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn psi_alpha_is_monotone_above_its_minimiser() {
        // 1 + x + c|x|^α is convex with minimiser at -(1/(α c))^{1/(α-1)}.
        for alpha in [1.1, 1.5, 2.0] {
            let a = Alpha::new(alpha).unwrap();
            let x_min = -(1.0 / (alpha * a.c())).powf(1.0 / (alpha - 1.0));
            let kind = InfluenceKind::PsiAlpha(a);
            let mut prev = f64::NEG_INFINITY;
            for x in grid().filter(|&x| x >= x_min) {
                let v = kind.apply(x);
                assert!(v >= prev, "alpha={alpha}, x={x}");
                prev = v;
            }
            assert!(kind.apply(x_min - 1.0) > kind.apply(x_min));
        }
    }

    #[test]
    fn psi_alpha_argument_stays_positive() {
        for alpha in [1.01, 1.1, 1.3, 1.5, 1.9, 2.0] {
            let c = c_alpha(alpha).unwrap();
            for x in grid() {
                assert!(1.0 + x + c * x.abs().powf(alpha) > 0.0);
            }
        }
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        let v = psi1(1e200);
        assert!(v.is_finite());
        let expected = 2.0 * 1e200f64.ln() - std::f64::consts::LN_2;
        assert!((v - expected).abs() < 1e-12);
        // both branches agree across the switch point
        let below = log_quadratic(1e8);
        let above = log_quadratic(1e8 * (1.0 + 1e-15));
        assert!((above - below).abs() < 1e-12);
    }

    #[test]
    fn printed_form_differs_only_below_zero() {
        for x in grid() {
            if x >= 0.0 {
                assert_eq!(psi2_as_printed(x), psi2(x));
            }
        }
        assert_eq!(psi2_as_printed(-2.0), 0.5);
        assert_eq!(psi2(-2.0), -0.5);
        assert_eq!(psi2_as_printed(-0.5), psi2(-0.5) - 0.25);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("psi1".parse::<InfluenceKind>().unwrap(), InfluenceKind::Psi1);
        assert_eq!("psi2".parse::<InfluenceKind>().unwrap(), InfluenceKind::Psi2);
        let k: InfluenceKind = "alpha=1.5".parse().unwrap();
        assert_eq!(k.to_string(), "alpha=1.5");
        assert!(matches!("alpha=3".parse::<InfluenceKind>(), Err(Error::Domain(_))));
        assert!(matches!("huber".parse::<InfluenceKind>(), Err(Error::Parse(_))));
    }
}
