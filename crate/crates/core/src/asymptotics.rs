//! Main terms of the error asymptotics and extraction of the normalized
//! remainder `γ = (exact − main)/denominator`.
//!
//! Every value is scaled by `e^{αn^r}` except [`main_term_r1_crosscheck`],
//! which is returned unscaled as the `r = 1` terms stay representable.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::params::{self, ClassParams, Exponent};
use crate::special::{cos_norm, generalized_k, half_line_integral, j_s};

/// Main term, remainder scale and the certified bound on `|γ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTerm {
    pub main_scaled: f64,
    pub denominator: f64,
    pub gamma_bound: f64,
}

/// Extracted remainder of one estimate at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticReport {
    pub exact_scaled: f64,
    pub main_term_scaled: f64,
    pub remainder_denominator: f64,
    pub gamma: f64,
    pub gamma_bound: f64,
    pub within_regime: bool,
}

impl AsymptoticReport {
    /// `|γ| ≤ bound`; meaningful as a certificate only within the regime.
    pub fn gamma_within_bound(&self) -> bool {
        self.gamma.abs() <= self.gamma_bound
    }
}

/// `(14π)²`.
pub fn remainder_gamma_bound() -> f64 {
    (14.0 * PI).powi(2)
}

/// `γ = (exact − main)/denominator`.
pub fn extract_gamma(
    exact_scaled: f64,
    main: f64,
    denominator: f64,
    bound: f64,
    within_regime: bool,
) -> Result<AsymptoticReport> {
    if !(denominator > 0.0) {
        return Err(invalid(format!(
            "remainder denominator must be positive, got {denominator}"
        )));
    }
    Ok(AsymptoticReport {
        exact_scaled,
        main_term_scaled: main,
        remainder_denominator: denominator,
        gamma: (exact_scaled - main) / denominator,
        gamma_bound: bound,
        within_regime,
    })
}

fn upsilon(alpha_r: f64, r: f64, n: f64) -> f64 {
    PI * n.powf(1.0 - r) / alpha_r
}

/// `‖cos‖_{p′}/(π^{1+1/p′}(αr)^{1/p})`.
fn shape_constant(params: &ClassParams) -> f64 {
    let q = params.p_conj();
    cos_norm(q) / (PI.powf(1.0 + q.recip()) * params.alpha_r().powf(params.p.recip()))
}

/// Finite-`υ` estimate with `J_{p′}(πn^{1−r}/(αr))`, valid for `1 ≤ p ≤ ∞`.
pub fn main_term_finite_window(params: &ClassParams, n: u64) -> Result<MainTerm> {
    params.require_sub_linear()?;
    let nf = n as f64;
    let (ar, r) = (params.alpha_r(), params.r);
    let inv_p = params.p.recip();
    let j = j_s(upsilon(ar, r, nf), params.p_conj())?;
    let lead = nf.powf((1.0 - r) * inv_p);
    Ok(MainTerm {
        main_scaled: lead * shape_constant(params) * j,
        denominator: lead * (ar.powf(-1.0 - inv_p) * j * nf.powf(-r) + nf.powf(-(1.0 - r) * inv_p)),
        gamma_bound: remainder_gamma_bound(),
    })
}

/// Full-line estimate for `1 < p < ∞`, and the `p = 1` specialisation.
pub fn main_term_full_line(params: &ClassParams, n: u64) -> Result<MainTerm> {
    params.require_sub_linear()?;
    if params.p.is_infinite() {
        return Err(Error::NotApplicable(
            "p = ∞ has a logarithmic main term; use the logarithmic estimate".into(),
        ));
    }
    let nf = n as f64;
    let (ar, r) = (params.alpha_r(), params.r);
    if params.p.value() == 1.0 {
        let lead = nf.powf(1.0 - r);
        return Ok(MainTerm {
            main_scaled: lead / (PI * ar),
            denominator: lead * (ar.powi(-2) * nf.powf(-r) + nf.powf(-(1.0 - r))),
            gamma_bound: remainder_gamma_bound(),
        });
    }
    let p = params.p.value();
    let q = params.p_conj().value();
    let inv_p = 1.0 / p;
    let lead = nf.powf((1.0 - r) * inv_p);
    let full = half_line_integral(q)?.powf(1.0 / q);
    let bracket = ar.powf((q - 1.0) * inv_p) * nf.powf(-(1.0 - r) * (q - 1.0)) / (q - 1.0)
        + p.powf(1.0 / q) * ar.powf(-1.0 - inv_p) * nf.powf(-r)
        + nf.powf(-(1.0 - r) * inv_p);
    Ok(MainTerm {
        main_scaled: lead * shape_constant(params) * full,
        denominator: lead * bracket,
        gamma_bound: remainder_gamma_bound(),
    })
}

/// Logarithmic law for `p = ∞`: `(4/π²)·ln(πn^{1−r}/(αr))`, additive remainder.
pub fn main_term_logarithmic(alpha: f64, r: f64, n: u64) -> Result<MainTerm> {
    params::require_sub_linear(alpha, r)?;
    let u = upsilon(alpha * r, r, n as f64);
    Ok(MainTerm {
        main_scaled: 4.0 / (PI * PI) * u.ln(),
        denominator: 1.0,
        gamma_bound: 20.0 * PI.powi(4),
    })
}

/// `p = 2`: `n^{(1−r)/2}/√(2παr)` with the plain or the refined remainder.
pub fn main_term_quadratic(alpha: f64, r: f64, n: u64, refined: bool) -> Result<MainTerm> {
    params::require_sub_linear(alpha, r)?;
    let nf = n as f64;
    let ar = alpha * r;
    let main = nf.powf(0.5 * (1.0 - r)) / (2.0 * PI * ar).sqrt();
    let (bracket, bound) = if refined {
        (
            nf.powf(-r) / (2.0 * ar) + ar * nf.powf(-(1.0 - r)),
            (54.0 * PI.powi(3) / (54.0 * PI.powi(3) - 1.0)).sqrt(),
        )
    } else {
        (
            nf.powf(-r) / ar + ar.sqrt() * nf.powf(-0.5 * (1.0 - r)),
            392.0 * PI.powf(2.5),
        )
    };
    Ok(MainTerm {
        main_scaled: main,
        denominator: main * bracket,
        gamma_bound: bound,
    })
}

/// Limit of `e^{αn^r}E_n / n^{(1−r)/p}` for `1 < p < ∞`.
pub fn limit_constant_tan(params: &ClassParams) -> Result<f64> {
    params.require_sub_linear()?;
    if params.p.is_infinite() {
        return Err(Error::NotApplicable(
            "p = ∞: the half-line integral diverges logarithmically; use the logarithmic estimate"
                .into(),
        ));
    }
    if params.p.value() == 1.0 {
        return Err(Error::NotApplicable(
            "p = 1: the limit is 1/(παr) with the full-line (p = 1) remainder".into(),
        ));
    }
    let q = params.p_conj().value();
    Ok(shape_constant(params) * half_line_integral(q)?.powf(1.0 / q))
}

/// `(2/π^{1+1/p′})·‖cos‖_{p′}·K(p′, e^{-α})`, the `r = 1` constant.
pub fn r1_constant(alpha: f64, p: Exponent) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let q = p.conjugate();
    let k = generalized_k(q, (-alpha).exp())?;
    Ok(2.0 / PI.powf(1.0 + q.recip()) * cos_norm(q) * k)
}

/// Unscaled `r = 1` main term `e^{-αn}·r1_constant(α, p)`.
pub fn main_term_r1_crosscheck(alpha: f64, p: Exponent, n: u64) -> Result<f64> {
    Ok((-alpha * n as f64).exp() * r1_constant(alpha, p)?)
}

/// Remainder scale `e^{-α}/(n(1 − e^{-α})^{s(p)})` of the `r = 1` formula.
pub fn r1_remainder_scale(alpha: f64, p: Exponent, n: u64) -> f64 {
    let q = (-alpha).exp();
    let pow = if p.is_infinite() {
        1
    } else if p.value() == 2.0 {
        return 0.0;
    } else {
        2
    };
    q / (n as f64 * (1.0 - q).powi(pow))
}

/// The estimates that can be certified against an exact value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimate {
    FiniteWindow,
    FullLine,
    Logarithmic,
    Quadratic,
    QuadraticRefined,
}

impl Estimate {
    pub const ALL: [Estimate; 5] = [
        Estimate::FiniteWindow,
        Estimate::FullLine,
        Estimate::Logarithmic,
        Estimate::Quadratic,
        Estimate::QuadraticRefined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimate::FiniteWindow => "finite_window",
            Estimate::FullLine => "full_line",
            Estimate::Logarithmic => "logarithmic",
            Estimate::Quadratic => "quadratic",
            Estimate::QuadraticRefined => "quadratic_refined",
        }
    }

    /// Whether the estimate speaks about the class with exponent `p`.
    pub fn applies_to(self, p: Exponent) -> bool {
        match self {
            Estimate::FiniteWindow => true,
            Estimate::FullLine => !p.is_infinite(),
            Estimate::Logarithmic => p.is_infinite(),
            Estimate::Quadratic | Estimate::QuadraticRefined => p.value() == 2.0,
        }
    }

    pub fn main_term(self, params: &ClassParams, n: u64) -> Result<MainTerm> {
        if !self.applies_to(params.p) {
            return Err(Error::NotApplicable(format!(
                "{} does not cover p = {}",
                self.name(),
                params.p
            )));
        }
        match self {
            Estimate::FiniteWindow => main_term_finite_window(params, n),
            Estimate::FullLine => main_term_full_line(params, n),
            Estimate::Logarithmic => main_term_logarithmic(params.alpha, params.r, n),
            Estimate::Quadratic => main_term_quadratic(params.alpha, params.r, n, false),
            Estimate::QuadraticRefined => main_term_quadratic(params.alpha, params.r, n, true),
        }
    }

    /// Threshold from which the estimate is claimed, `None` when it lies
    /// beyond the search ceiling.
    pub fn threshold(self, params: &ClassParams) -> Result<Option<u64>> {
        let found = match self {
            Estimate::Logarithmic => params::threshold_n1(params.alpha, params.r),
            _ => params::threshold_n0(params),
        };
        match found {
            Ok(v) => Ok(Some(v)),
            Err(Error::InfeasibleThreshold { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Main term, regime flag and extracted `γ` for a given exact value.
    pub fn assess(
        self,
        params: &ClassParams,
        n: u64,
        exact_scaled: f64,
    ) -> Result<AsymptoticReport> {
        let m = self.main_term(params, n)?;
        let within = self.threshold(params)?.is_some_and(|t| n >= t);
        extract_gamma(
            exact_scaled,
            m.main_scaled,
            m.denominator,
            m.gamma_bound,
            within,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use proptest::prelude::*;

    fn cp(alpha: f64, r: f64, p: f64) -> ClassParams {
        ClassParams::new(alpha, r, 0.0, Exponent::new(p).unwrap()).unwrap()
    }

    #[test]
    fn finite_window_collapses_for_extreme_exponents() {
        let (alpha, r, n) = (1.0, 0.5, 10_000u64);
        let u = PI * 100.0 / 0.5;
        let m = main_term_finite_window(&cp(alpha, r, f64::INFINITY), n).unwrap();
        assert!((m.main_scaled - 4.0 * u.asinh() / (PI * PI)).abs() < 1e-13);
        let m = main_term_finite_window(&cp(alpha, r, 1.0), n).unwrap();
        assert!((m.main_scaled - 100.0 / (PI * 0.5)).abs() < 1e-12);
        let m = main_term_finite_window(&cp(alpha, r, 2.0), n).unwrap();
        let full = 10.0 / (2.0 * PI * 0.5f64).sqrt();
        let finite = full * (u.atan() / (PI / 2.0)).sqrt();
        assert!((m.main_scaled - finite).abs() < 1e-12);
    }

    #[test]
    fn full_line_reference_values() {
        let m = main_term_full_line(&cp(1.0, 0.5, 1.0), 10_000).unwrap();
        assert!((m.main_scaled - 200.0 / PI).abs() < 1e-12);
        let m = main_term_full_line(&cp(1.0, 0.5, 2.0), 10_000).unwrap();
        assert!((m.main_scaled - 10.0 / PI.sqrt()).abs() < 1e-12);
        assert!(matches!(
            main_term_full_line(&cp(1.0, 0.5, f64::INFINITY), 100),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn logarithmic_reference_values() {
        let m = main_term_logarithmic(1.0, 0.5, 10_000).unwrap();
        assert!((m.main_scaled - 4.0 / (PI * PI) * (200.0 * PI).ln()).abs() < 1e-13);
        assert!((m.main_scaled - 2.6112).abs() < 1e-4);
        let m = main_term_logarithmic(PI, 0.5, 400).unwrap();
        assert!((m.main_scaled - 4.0 / (PI * PI) * 40f64.ln()).abs() < 1e-13);
        assert_eq!(m.gamma_bound, 20.0 * PI.powi(4));
    }

    #[test]
    fn quadratic_reference_values() {
        let a = main_term_quadratic(1.0, 0.5, 100, false).unwrap();
        let b = main_term_quadratic(1.0, 0.5, 100, true).unwrap();
        assert_eq!(a.main_scaled, b.main_scaled);
        assert!((a.main_scaled - 10f64.sqrt() / PI.sqrt()).abs() < 1e-13);
        assert!((b.gamma_bound - 1.0003).abs() < 1e-4);
        assert!((a.gamma_bound - 392.0 * PI.powf(2.5)).abs() < 1e-9);
    }

    #[test]
    fn limit_constant_examples() {
        for &(alpha, r) in &[(1.0, 0.5), (0.3, 0.8)] {
            let c = limit_constant_tan(&cp(alpha, r, 2.0)).unwrap();
            assert!((c - 1.0 / (2.0 * PI * alpha * r).sqrt()).abs() < 1e-13);
        }
        // p = 4, p′ = 4/3: brute-force the defining integral on [0, 10⁶] plus
        // the explicit t^{-4/3} tail.
        let q = 4.0 / 3.0;
        let body = integrate(|t: f64| (t * t + 1.0).powf(-0.5 * q), 0.0, 1e6, 1e-14, 0.0).value;
        let tail = 3.0 * 1e6f64.powf(-1.0 / 3.0);
        let oracle_integral = body + tail;
        let params = cp(1.0, 0.5, 4.0);
        let shape =
            cos_norm(Exponent::new(q).unwrap()) / (PI.powf(1.0 + 1.0 / q) * 0.5f64.powf(0.25));
        let oracle = shape * oracle_integral.powf(1.0 / q);
        let c = limit_constant_tan(&params).unwrap();
        assert!((c - oracle).abs() < 1e-8 * c, "{c} vs {oracle}");
        assert!(limit_constant_tan(&cp(1.0, 0.5, 1.0)).is_err());
        assert!(limit_constant_tan(&cp(1.0, 0.5, f64::INFINITY)).is_err());
        let lo = limit_constant_tan(&cp(1.0, 0.5, 3.0)).unwrap();
        let hi = limit_constant_tan(&cp(2.0, 0.5, 3.0)).unwrap();
        assert!(hi < lo);
    }

    #[test]
    fn r1_crosscheck_closed_forms() {
        let alpha = 0.7;
        let q = (-alpha as f64).exp();
        let n = 5;
        let pinf = main_term_r1_crosscheck(alpha, Exponent::INFINITY, n).unwrap();
        let k = crate::special::elliptic_k(q).unwrap();
        let expect = (-alpha * 5.0f64).exp() * 8.0 / (PI * PI) * k;
        assert!((pinf - expect).abs() < 1e-12 * expect);
        let p2 = main_term_r1_crosscheck(alpha, Exponent::TWO, n).unwrap();
        let expect = (-alpha * 5.0f64).exp() / (PI * (1.0 - q * q)).sqrt();
        assert!((p2 - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn extract_gamma_basics() {
        assert_eq!(extract_gamma(2.0, 2.0, 0.5, 1.0, true).unwrap().gamma, 0.0);
        assert_eq!(extract_gamma(2.5, 2.0, 0.5, 1.0, true).unwrap().gamma, 1.0);
        let a = extract_gamma(3.0, 2.0, 0.25, 1.0, true).unwrap().gamma;
        let b = extract_gamma(2.0, 3.0, 0.25, 1.0, true).unwrap().gamma;
        assert_eq!(a, -b);
        assert!(extract_gamma(1.0, 1.0, 0.0, 1.0, true).is_err());
    }

    #[test]
    fn regime_flags_follow_thresholds() {
        let params = cp(1.0, 0.5, 1.0);
        assert!(
            Estimate::FiniteWindow
                .assess(&params, 1225, 22.0)
                .unwrap()
                .within_regime
        );
        assert!(
            !Estimate::FiniteWindow
                .assess(&params, 1224, 22.0)
                .unwrap()
                .within_regime
        );
        let pinf = cp(1.0, 0.5, f64::INFINITY);
        assert!(
            !Estimate::Logarithmic
                .assess(&pinf, 4096, 2.0)
                .unwrap()
                .within_regime
        );
        assert!(Estimate::FullLine.assess(&pinf, 10, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn finite_main_below_full_line_main(
            alpha in 0.2f64..3.0,
            r in 0.1f64..0.9,
            p in 1.05f64..50.0,
            n in 1u64..1_000_000,
        ) {
            let params = cp(alpha, r, p);
            let t1 = main_term_finite_window(&params, n).unwrap();
            let t2 = main_term_full_line(&params, n).unwrap();
            prop_assert!(t1.main_scaled <= t2.main_scaled * (1.0 + 1e-12));
            // Swapping the finite J-integral for the half-line one moves the
            // main term by at most the documented tail bound.
            let q = params.p_conj().value();
            let ar = alpha * r;
            let nf = n as f64;
            let gap_bound = 2.0 / (q - 1.0) * (ar / (PI * nf.powf(1.0 - r))).powf(q - 1.0)
                * shape_constant(&params) * nf.powf((1.0 - r) / p);
            prop_assert!(t2.main_scaled - t1.main_scaled <= gap_bound * (1.0 + 1e-9) + 1e-13 * t2.main_scaled);
        }

        #[test]
        fn logarithmic_main_increasing(alpha in 0.1f64..5.0, r in 0.1f64..0.9, n in 1u64..1_000_000) {
            let a = main_term_logarithmic(alpha, r, n).unwrap().main_scaled;
            let b = main_term_logarithmic(alpha, r, n + 1).unwrap().main_scaled;
            prop_assert!(b > a);
        }
    }
}
