//! Class parameters `(α, r, β, p)`, conjugate exponents and the threshold
//! integers `n₀`, `n₁`, `n₂` above which the explicit remainder bounds apply.
//!
//! All three thresholds are "smallest integer `n` such that `lhs(n) ≤ rhs`".
//! For `n₀` and `n₂` the left side is a sum of two decreasing powers of `n`;
//! `n₁` carries an extra logarithm and is only eventually decreasing, which
//! is why every search ends with a short local scan below the bisection
//! result.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Relative slack in threshold comparisons; several reference thresholds
/// sit exactly on the boundary of their defining inequality.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Default upper limit for threshold searches.
pub const DEFAULT_CEILING: u64 = 1 << 62;

/// An integrability index in `[1, ∞]`.
///
/// `∞` is represented by `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(invalid(format!("index must lie in [1, ∞], got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The dual index `p′` with `1/p + 1/p′ = 1`.
    pub fn conjugate(self) -> Exponent {
        conjugate_exponent(self)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| invalid(format!("index is not numeric: {s:?}")))?;
                Exponent::new(p)
            }
        }
    }
}

/// Conjugate index: `p/(p−1)` for finite `p > 1`, `1 ↔ ∞`.
pub fn conjugate_exponent(p: Exponent) -> Exponent {
    let v = p.value();
    if v.is_infinite() {
        Exponent(1.0)
    } else if v == 1.0 {
        Exponent(f64::INFINITY)
    } else {
        Exponent(v / (v - 1.0))
    }
}

/// `χ(p)`: `p` for finite indices and `1` for `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValue(f64);

impl ChiValue {
    pub fn of(p: Exponent) -> Self {
        if p.is_infinite() {
            ChiValue(1.0)
        } else {
            ChiValue(p.value())
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameters of the class `C^{α,r}_{β,p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
    pub p: Exponent,
}

impl ClassParams {
    pub fn new(alpha: f64, r: f64, beta: f64, p: Exponent) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid(format!("r must lie in (0, 1], got {r}")));
        }
        if !beta.is_finite() {
            return Err(invalid(format!("beta must be finite, got {beta}")));
        }
        Ok(ClassParams { alpha, r, beta, p })
    }

    pub fn p_conj(&self) -> Exponent {
        conjugate_exponent(self.p)
    }

    pub fn chi(&self) -> ChiValue {
        ChiValue::of(self.p)
    }

    /// `αr`, the product that appears in every main term.
    pub fn alpha_r(&self) -> f64 {
        self.alpha * self.r
    }

    pub(crate) fn require_sub_linear(&self) -> Result<()> {
        require_sub_linear(self.alpha, self.r)
    }
}

pub(crate) fn require_sub_linear(alpha: f64, r: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("this estimate needs 0 < r < 1, got {r}")));
    }
    Ok(())
}

/// `1/(3π)³`.
pub fn cubic_three_pi_recip() -> f64 {
    1.0 / (3.0 * PI).powi(3)
}

/// Right-hand side of the `n₀` inequality.
pub fn n0_rhs(p: Exponent) -> f64 {
    let v = p.value();
    if v == 1.0 {
        1.0 / 14.0
    } else if v.is_infinite() {
        cubic_three_pi_recip()
    } else {
        cubic_three_pi_recip() * (v - 1.0) / v
    }
}

/// `(1/(αr)) n^{−r} + αr χ n^{r−1}`, the left side shared by `n₀` and `n₂`.
pub fn power_lhs(alpha: f64, r: f64, chi: f64, n: f64) -> f64 {
    let ar = alpha * r;
    n.powf(-r) / ar + ar * chi * n.powf(r - 1.0)
}

/// Left side of the `n₁` inequality.
pub fn log_lhs(alpha: f64, r: f64, n: f64) -> f64 {
    let ar = alpha * r;
    let upsilon = PI * n.powf(1.0 - r) / ar;
    n.powf(-r) / ar * (1.0 + upsilon.ln()) + ar * n.powf(r - 1.0)
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + THRESHOLD_SLACK * rhs.abs()
}

/// Smallest `n ≥ 1` with `cond(n)`, by doubling, bisection and a local scan.
fn smallest_satisfying(
    name: &'static str,
    ceiling: u64,
    cond: impl Fn(u64) -> bool,
) -> Result<u64> {
    if cond(1) {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !cond(hi) {
        if hi >= ceiling {
            return Err(Error::InfeasibleThreshold { name, ceiling });
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(ceiling);
    }
    // cond(lo) is false, cond(hi) is true.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if cond(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut n = hi;
    for _ in 0..2 {
        if n > 1 && cond(n - 1) {
            n -= 1;
        } else {
            break;
        }
    }
    Ok(n)
}

pub fn threshold_n0(params: &ClassParams) -> Result<u64> {
    threshold_n0_with_ceiling(params, DEFAULT_CEILING)
}

pub fn threshold_n0_with_ceiling(params: &ClassParams, ceiling: u64) -> Result<u64> {
    params.require_sub_linear()?;
    let chi = params.chi().value();
    let rhs = n0_rhs(params.p);
    smallest_satisfying("n0", ceiling, |n| {
        holds(power_lhs(params.alpha, params.r, chi, n as f64), rhs)
    })
}

pub fn threshold_n1(alpha: f64, r: f64) -> Result<u64> {
    threshold_n1_with_ceiling(alpha, r, DEFAULT_CEILING)
}

pub fn threshold_n1_with_ceiling(alpha: f64, r: f64, ceiling: u64) -> Result<u64> {
    require_sub_linear(alpha, r)?;
    let rhs = cubic_three_pi_recip();
    smallest_satisfying("n1", ceiling, |n| holds(log_lhs(alpha, r, n as f64), rhs))
}

pub fn threshold_n2(params: &ClassParams) -> Result<u64> {
    threshold_n2_with_ceiling(params, DEFAULT_CEILING)
}

pub fn threshold_n2_with_ceiling(params: &ClassParams, ceiling: u64) -> Result<u64> {
    params.require_sub_linear()?;
    let chi = params.chi().value();
    smallest_satisfying("n2", ceiling, |n| {
        holds(power_lhs(params.alpha, params.r, chi, n as f64), 1.0 / 14.0)
    })
}

/// Whether the `n₀` inequality holds at `n` (same slack as the search).
pub fn n0_condition(params: &ClassParams, n: u64) -> bool {
    holds(
        power_lhs(params.alpha, params.r, params.chi().value(), n as f64),
        n0_rhs(params.p),
    )
}

pub fn n1_condition(alpha: f64, r: f64, n: u64) -> bool {
    holds(log_lhs(alpha, r, n as f64), cubic_three_pi_recip())
}

pub fn n2_condition(params: &ClassParams, n: u64) -> bool {
    holds(
        power_lhs(params.alpha, params.r, params.chi().value(), n as f64),
        1.0 / 14.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(alpha: f64, r: f64, p: f64) -> ClassParams {
        ClassParams::new(alpha, r, 0.0, Exponent::new(p).unwrap()).unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate_exponent(Exponent::TWO).value(), 2.0);
        assert!(conjugate_exponent(Exponent::ONE).is_infinite());
        assert!(
            (conjugate_exponent(Exponent::new(4.0).unwrap()).value() - 4.0 / 3.0).abs() < 1e-15
        );
        assert_eq!(conjugate_exponent(Exponent::INFINITY).value(), 1.0);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!("abc".parse::<Exponent>().is_err());
        assert!("inf".parse::<Exponent>().unwrap().is_infinite());
        assert_eq!("3".parse::<Exponent>().unwrap().value(), 3.0);
    }

    #[test]
    fn chi_values() {
        assert_eq!(ChiValue::of(Exponent::INFINITY).value(), 1.0);
        assert_eq!(ChiValue::of(Exponent::new(3.5).unwrap()).value(), 3.5);
    }

    #[test]
    fn n0_reference_value_p1() {
        let pr = params(1.0, 0.5, 1.0);
        assert_eq!(threshold_n0(&pr).unwrap(), 1225);
        // 1224 fails: 2.5/√1224 > 1/14.
        assert!(power_lhs(1.0, 0.5, 1.0, 1224.0) > 1.0 / 14.0);
        assert!(!n0_condition(&pr, 1224));
    }

    #[test]
    fn n0_decreases_with_alpha_here() {
        let a = threshold_n0(&params(2.0, 0.5, 1.0)).unwrap();
        let b = threshold_n0(&params(1.0, 0.5, 1.0)).unwrap();
        assert!(a <= b);
    }

    #[test]
    fn n2_reference_values() {
        assert_eq!(threshold_n2(&params(1.0, 0.5, 1.0)).unwrap(), 1225);
        assert_eq!(threshold_n2(&params(1.0, 0.5, 2.0)).unwrap(), 1764);
    }

    #[test]
    fn n1_matches_linear_scan_on_coarse_grid() {
        // Oracle: scan a coarse arithmetic grid from 1 upwards and take the
        // first grid point satisfying the condition; the search result must
        // fall inside that grid cell.
        for &(alpha, r) in &[(1.0, 0.5), (0.7, 0.35), (2.0, 0.6)] {
            let n1 = threshold_n1(alpha, r).unwrap();
            let step = (n1 / 2000).max(1);
            let first = (0..)
                .map(|i| 1 + i * step)
                .find(|&n| n1_condition(alpha, r, n))
                .unwrap();
            assert!(
                first >= n1 && first < n1 + step,
                "{alpha} {r}: {first} vs {n1}"
            );
        }
    }

    #[test]
    fn n1_reference_alpha1_r_half() {
        let n1 = threshold_n1(1.0, 0.5).unwrap();
        assert!(n1_condition(1.0, 0.5, n1));
        assert!(!n1_condition(1.0, 0.5, n1 - 1));
        assert!(n1 > threshold_n0(&params(1.0, 0.5, f64::INFINITY)).unwrap());
    }

    #[test]
    fn ceiling_signals_infeasible() {
        let pr = params(1e-6, 0.5, f64::INFINITY);
        let err = threshold_n0_with_ceiling(&pr, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::InfeasibleThreshold { name: "n0", .. }));
    }

    #[test]
    fn thresholds_reject_r_one() {
        assert!(threshold_n0(&params(1.0, 1.0, 2.0)).is_err());
        assert!(threshold_n1(1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn conjugate_sums_to_one(p in 1.0f64..1e6) {
            let p = Exponent::new(p).unwrap();
            let q = conjugate_exponent(p);
            prop_assert!((p.recip() + q.recip() - 1.0).abs() < 1e-12);
            let back = conjugate_exponent(q);
            prop_assert!((back.value() - p.value()).abs() <= 1e-9 * p.value());
        }

        #[test]
        fn thresholds_are_minimal_and_ordered(
            alpha in 0.5f64..4.0,
            r in 0.3f64..0.9,
            p in prop_oneof![Just(1.0f64), 1.1f64..6.0, Just(f64::INFINITY)],
        ) {
            let pr = params(alpha, r, p);
            let n2 = match threshold_n2(&pr) {
                Ok(n2) => {
                    prop_assert!(n2_condition(&pr, n2));
                    prop_assert!(n2 == 1 || !n2_condition(&pr, n2 - 1));
                    Some(n2)
                }
                Err(Error::InfeasibleThreshold { ceiling, .. }) => {
                    prop_assert!(!n2_condition(&pr, ceiling));
                    None
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            match threshold_n0(&pr) {
                Ok(n0) => {
                    prop_assert!(n0_condition(&pr, n0));
                    prop_assert!(n0 == 1 || !n0_condition(&pr, n0 - 1));
                    prop_assert!(n2.is_some_and(|n2| n0 >= n2));
                }
                Err(Error::InfeasibleThreshold { ceiling, .. }) => {
                    prop_assert!(!n0_condition(&pr, ceiling));
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn n1_exceeds_n0_infinity(alpha in 0.5f64..4.0, r in 0.3f64..0.9) {
            let n0 = threshold_n0(&params(alpha, r, f64::INFINITY));
            match threshold_n1(alpha, r) {
                Ok(n1) => {
                    prop_assert!(n1 > n0.unwrap());
                    prop_assert!(n1_condition(alpha, r, n1));
                    prop_assert!(n1 == 1 || !n1_condition(alpha, r, n1 - 1));
                }
                Err(Error::InfeasibleThreshold { ceiling, .. }) => {
                    prop_assert!(!n1_condition(alpha, r, ceiling));
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
