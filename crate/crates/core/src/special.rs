//! Analytic ingredients of the main terms.
//!
//! - `J_s(υ) = ‖(t²+1)^{-1/2}‖_{L_s[0,υ]}` and its half-line limit.
//! - Tail integrals `∫_m^∞ e^{-γt^r} t^δ dt` in a scaled form that survives
//!   exponents far below the double-precision range, together with the
//!   normalized residual `Θ` of the integration-by-parts estimate.
//! - Complete elliptic integral `K(q)` (modulus convention) and the
//!   generalized `K(p′, q)` used for `r = 1`.
//! - `‖cos‖_s` over one period.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::params::Exponent;
use crate::quad::{integrate, integrate_to_infinity};

const REL_TOL: f64 = 1e-13;

/// `J_s(υ)`.
pub fn j_s(upsilon: f64, s: Exponent) -> Result<f64> {
    if !(upsilon > 0.0 && upsilon.is_finite()) {
        return Err(invalid(format!("upsilon must be positive, got {upsilon}")));
    }
    let sv = s.value();
    if sv.is_infinite() {
        return Ok(1.0);
    }
    if sv == 1.0 {
        return Ok(upsilon.asinh());
    }
    if sv == 2.0 {
        return Ok(upsilon.atan().sqrt());
    }
    let f = |t: f64| (t * t + 1.0).powf(-0.5 * sv);
    let mut total = integrate(f, 0.0, upsilon.min(1.0), REL_TOL, 0.0).value;
    let mut lo = 1.0;
    while lo < upsilon {
        let hi = (2.0 * lo).min(upsilon);
        total += integrate(f, lo, hi, REL_TOL, 0.0).value;
        lo = hi;
    }
    Ok(total.powf(1.0 / sv))
}

/// `∫_0^∞ (t²+1)^{-s/2} dt = ½·B(½, (s−1)/2)` for `s > 1`.
pub fn half_line_integral(s: f64) -> Result<f64> {
    if !(s > 1.0) || s.is_infinite() {
        return Err(invalid(format!("half-line integral diverges for s = {s}")));
    }
    let ln = 0.5 * PI.ln() - 2f64.ln() + ln_gamma(0.5 * (s - 1.0)) - ln_gamma(0.5 * s);
    Ok(ln.exp())
}

/// `‖cos‖_s` over a full period `[0, 2π)`.
pub fn cos_norm(s: Exponent) -> f64 {
    let sv = s.value();
    if sv.is_infinite() {
        1.0
    } else if sv == 1.0 {
        4.0
    } else if sv == 2.0 {
        PI.sqrt()
    } else {
        let quarter = integrate(|t: f64| t.cos().powf(sv), 0.0, FRAC_PI_2, 1e-14, 0.0).value;
        (4.0 * quarter).powf(1.0 / sv)
    }
}

/// `∫_m^∞ e^{-γt^r} t^δ dt` in scaled form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIntegral {
    /// The integral multiplied by `e^{γ m^r}`.
    pub scaled: f64,
    /// `γ m^r`.
    pub exponent: f64,
}

impl TailIntegral {
    /// Unscaled value; underflows to zero for large exponents.
    pub fn value(&self) -> f64 {
        self.scaled * (-self.exponent).exp()
    }
}

/// `I = ∫_0^∞ e^{-s} (1+s/u₀)^b ds`, returned as `(I, I − 1)`.
///
/// Substituting `u = γt^r` turns the tail integral into
/// `m^{δ+1−r}/(γr) · I` with `u₀ = γm^r` and `b = (δ+1−r)/r`.
fn reduced_tail(u0: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    if b <= u0 {
        // Integrand decreases from 1; integrate the deviation from e^{-s}.
        let dev = integrate_to_infinity(
            |s: f64| (-s).exp() * (b * (s / u0).ln_1p()).exp_m1(),
            0.0,
            1.0,
            REL_TOL,
        )
        .value;
        (1.0 + dev, dev)
    } else {
        // Peak at s* = b − u₀; integrate relative to the peak height.
        let s_star = b - u0;
        let log_peak = -s_star + b * (b / u0).ln();
        let width = b.sqrt().max(1.0);
        let g = |s: f64| (-s + b * (s / u0).ln_1p() - log_peak).exp();
        let left = integrate(g, 0.0, s_star, REL_TOL, 0.0).value;
        let right = integrate_to_infinity(g, s_star, width, REL_TOL).value;
        let i = (left + right) * log_peak.exp();
        (i, i - 1.0)
    }
}

fn check_tail_args(gamma: f64, r: f64, m: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("r must be positive, got {r}")));
    }
    if !(m >= 1.0 && m.is_finite()) {
        return Err(invalid(format!("m must be at least 1, got {m}")));
    }
    Ok(())
}

/// `∫_m^∞ e^{-γt^r} t^δ dt`, relative accuracy about `1e-13`.
pub fn tail_integral(gamma: f64, r: f64, delta: f64, m: f64) -> Result<TailIntegral> {
    check_tail_args(gamma, r, m)?;
    let u0 = gamma * m.powf(r);
    let b = (delta + 1.0 - r) / r;
    let (i, _) = reduced_tail(u0, b);
    let scaled = m.powf(delta + 1.0 - r) / (gamma * r) * i;
    if !(scaled.is_finite() && scaled > 0.0) {
        return Err(Error::NonConverged(format!(
            "tail integral (γ={gamma}, r={r}, δ={delta}, m={m}) is not representable"
        )));
    }
    Ok(TailIntegral {
        scaled,
        exponent: u0,
    })
}

/// Numeric tail integral against its integration-by-parts main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailResult {
    pub numeric: f64,
    pub main_term: f64,
    pub numeric_scaled: f64,
    pub main_term_scaled: f64,
    /// `γ m^r`; scaled values carry the factor `e^{γ m^r}`.
    pub exponent: f64,
    pub theta: f64,
    pub theta_bound: f64,
}

/// `m` from which the tail estimate is certified.
pub fn tail_regime_start(gamma: f64, r: f64, delta: f64) -> f64 {
    (14.0 * (delta + 1.0 - r).abs() / (gamma * r))
        .powf(1.0 / r)
        .max(1.0)
}

/// Extracts `Θ` from `∫_m^∞ = e^{-γm^r} m^{δ+1−r}/(γr)·(1 + Θ·|δ+1−r|/(γr)·m^{-r})`.
pub fn tail_estimate(gamma: f64, r: f64, delta: f64, m: f64) -> Result<TailResult> {
    check_tail_args(gamma, r, m)?;
    let start = tail_regime_start(gamma, r, delta);
    if m < start {
        return Err(Error::OutOfRegime(format!(
            "tail estimate needs m ≥ {start}, got {m}"
        )));
    }
    let u0 = gamma * m.powf(r);
    let b = (delta + 1.0 - r) / r;
    let (i, i_minus_one) = reduced_tail(u0, b);
    let main_term_scaled = m.powf(delta + 1.0 - r) / (gamma * r);
    let numeric_scaled = main_term_scaled * i;
    let theta = if b == 0.0 {
        0.0
    } else {
        i_minus_one * u0 / b.abs()
    };
    let decay = (-u0).exp();
    Ok(TailResult {
        numeric: numeric_scaled * decay,
        main_term: main_term_scaled * decay,
        numeric_scaled,
        main_term_scaled,
        exponent: u0,
        theta,
        theta_bound: 14.0 / 13.0,
    })
}

/// Complete elliptic integral of the first kind, `K(q) = ∫_0^{π/2} (1−q² sin²t)^{-1/2} dt`,
/// by the arithmetic–geometric mean.
pub fn elliptic_k(q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(invalid(format!("modulus must lie in [0, 1), got {q}")));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - q * q).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(PI / (a + b))
}

/// `K(p′, q) = 2^{-1-1/p′} ‖(1 − 2q cos t + q²)^{-1/2}‖_{p′}` over `[0, 2π)`.
///
/// The periodic trapezoidal rule is doubled until it settles; for `p′ = ∞`
/// the supremum `1/(1−q)` is used.
pub fn generalized_k(p_conj: Exponent, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(invalid(format!("q must lie in [0, 1), got {q}")));
    }
    let s = p_conj.value();
    if s.is_infinite() {
        return Ok(0.5 / (1.0 - q));
    }
    let f = |t: f64| (1.0 - 2.0 * q * t.cos() + q * q).powf(-0.5 * s);
    let mut nodes = 64usize;
    let trap = |n: usize| {
        let h = 2.0 * PI / n as f64;
        (0..n).map(|j| f(j as f64 * h)).sum::<f64>() * h
    };
    let mut prev = trap(nodes);
    loop {
        nodes *= 2;
        let cur = trap(nodes);
        if (cur - prev).abs() <= 1e-15 * cur || nodes >= 1 << 24 {
            return Ok(cur.powf(1.0 / s) / 2f64.powf(1.0 + 1.0 / s));
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn j_closed_forms() {
        assert_eq!(j_s(5.0, Exponent::INFINITY).unwrap(), 1.0);
        assert!((j_s(1.0, e(1.0)).unwrap() - 0.881_373_587_019_543).abs() < 1e-12);
        assert!((j_s(1.0, e(2.0)).unwrap() - (PI / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn j_quadrature_matches_closed_form_at_integer_index() {
        // s = 3: ∫_0^υ (t²+1)^{-3/2} = υ/√(υ²+1).
        for &u in &[0.3, 1.0, 7.0, 1e4] {
            let expect = (u / (u * u + 1.0f64).sqrt()).powf(1.0 / 3.0);
            assert!((j_s(u, e(3.0)).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn half_line_integral_against_quadrature() {
        for &s in &[1.5, 2.0, 4.0 / 3.0, 3.0, 7.5] {
            let q = integrate_to_infinity(|t: f64| (t * t + 1.0).powf(-0.5 * s), 0.0, 1.0, 1e-13);
            let closed = half_line_integral(s).unwrap();
            assert!(
                (q.value - closed).abs() < 1e-6 * closed,
                "s={s}: {} vs {closed}",
                q.value
            );
        }
        assert!((half_line_integral(2.0).unwrap() - FRAC_PI_2).abs() < 1e-14);
        assert!(half_line_integral(1.0).is_err());
    }

    #[test]
    fn cos_norm_against_gamma_closed_form() {
        for &s in &[1.0, 4.0 / 3.0, 2.0, 3.0, 5.5] {
            let closed =
                (2.0 * PI.sqrt() * gamma((s + 1.0) / 2.0) / gamma(s / 2.0 + 1.0)).powf(1.0 / s);
            assert!((cos_norm(e(s)) - closed).abs() < 1e-11, "s={s}");
        }
        assert_eq!(cos_norm(Exponent::INFINITY), 1.0);
    }

    #[test]
    fn tail_integral_closed_forms() {
        let t = tail_integral(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((t.value() - (-1.0f64).exp()).abs() < 1e-15);
        let t = tail_integral(2.0, 1.0, 1.0, 3.0).unwrap();
        assert!((t.value() - 1.75 * (-6.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tail_integral_against_midpoint_brute_force() {
        // ∫_10^60 e^{-√t} dt by a fine midpoint rule versus the difference of
        // two tail integrals.
        let steps = 2_000_000;
        let h = 50.0 / steps as f64;
        let brute: f64 = (0..steps)
            .map(|k| {
                let t = 10.0 + (k as f64 + 0.5) * h;
                (-t.sqrt()).exp()
            })
            .sum::<f64>()
            * h;
        let a = tail_integral(1.0, 0.5, 0.0, 10.0).unwrap().value();
        let b = tail_integral(1.0, 0.5, 0.0, 60.0).unwrap().value();
        assert!(((a - b) - brute).abs() < 1e-8 * brute);
    }

    #[test]
    fn tail_integral_handles_huge_exponents() {
        let t = tail_integral(1.0, 0.1, 1.0, 1e40).unwrap();
        assert!(t.scaled.is_finite() && t.exponent > 9000.0);
        assert_eq!(t.value(), 0.0);
    }

    #[test]
    fn tail_integral_inadmissible_peak() {
        // δ = 5, r = 1, γ = 1, m = 1: ∫_1^∞ e^{-t} t^5 dt = e^{-1}·Σ_{k≤5} 5!/k!.
        let exact = (-1.0f64).exp() * (120.0 + 120.0 + 60.0 + 20.0 + 5.0 + 1.0);
        let t = tail_integral(1.0, 1.0, 5.0, 1.0).unwrap();
        assert!((t.value() - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn tail_estimate_examples() {
        let t = tail_estimate(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(t.theta, 0.0);
        assert!((t.main_term - (-1.0f64).exp()).abs() < 1e-16);
        let t = tail_estimate(1.0, 0.5, 0.0, 196.0).unwrap();
        assert!(t.theta.abs() <= 14.0 / 13.0);
        assert!(t.main_term > 0.0);
        assert!(matches!(
            tail_estimate(1.0, 0.5, 0.0, 195.0),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn elliptic_examples() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let direct = integrate(
            |t: f64| (1.0 - 0.25 * t.sin().powi(2)).powf(-0.5),
            0.0,
            FRAC_PI_2,
            1e-15,
            0.0,
        )
        .value;
        assert!((elliptic_k(0.5).unwrap() - direct).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=90 {
            let k = elliptic_k(i as f64 * 0.01).unwrap();
            assert!(k > prev);
            prev = k;
        }
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn generalized_k_examples() {
        for &q in &[0.1, 0.5, 0.9] {
            let a = generalized_k(Exponent::ONE, q).unwrap();
            assert!((a - elliptic_k(q).unwrap()).abs() < 1e-10, "q={q}");
        }
        for &p in &[1.0, 1.5, 2.0, 4.0] {
            let k = generalized_k(e(p), 0.0).unwrap();
            assert!((k - PI.powf(1.0 / p) / 2.0).abs() < 1e-13);
        }
        // Independent fine-grid midpoint quadrature of the p′ = 2 integral.
        let steps = 400_000;
        let h = 2.0 * PI / steps as f64;
        let brute: f64 = (0..steps)
            .map(|j| {
                let t = (j as f64 + 0.5) * h;
                1.0 / (1.0 - t.cos() + 0.25)
            })
            .sum::<f64>()
            * h;
        let expect = brute.sqrt() / 2f64.powf(1.5);
        assert!((generalized_k(e(2.0), 0.5).unwrap() - expect).abs() < 1e-10);
        assert!(generalized_k(e(2.0), 1.0).is_err());
    }

    proptest! {
        #[test]
        fn j_nondecreasing(u in 0.01f64..1e3, du in 0.0f64..10.0, s in 1.0f64..8.0) {
            let a = j_s(u, e(s)).unwrap();
            let b = j_s(u + du, e(s)).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-12));
        }

        #[test]
        fn theta_certified_on_admissible_sample(
            gamma in 0.05f64..5.0,
            r in 0.1f64..0.9,
            delta in prop_oneof![Just(0.0f64), Just(1.0f64)],
            stretch in 1.0f64..50.0,
        ) {
            let m = tail_regime_start(gamma, r, delta) * stretch;
            let t = tail_estimate(gamma, r, delta, m).unwrap();
            prop_assert!(t.theta.abs() <= t.theta_bound, "theta {}", t.theta);
        }
    }
}
