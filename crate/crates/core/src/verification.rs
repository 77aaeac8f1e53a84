//! Numerical certificates for the identities and bounds behind the error
//! asymptotics.
//!
//! - `|𝒫(t)|² = Q_n(t) + R_n(t)` from Poisson summation, with `Q_n` from its
//!   oscillatory-integral definition and the bounds on both parts.
//! - `∫_0^∞ ψ(τ+u)cos(vu)du ≤ π|ψ′(τ)|/v²` for `ψ(t) = e^{-αt^r}`.
//! - `M_n = sup|𝒫′|/|𝒫|` against its explicit bound.
//! - Norms of modulated signals `φ = g cos(nt+γ) + h sin(nt+γ)` against
//!   `‖r‖_s‖cos‖_s/(2π)^{1/s}`, with the normalized deviations `δ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::kernel::{build_scaled_kernel, exponent_gap, grid_node, ScaledKernel};
use crate::norms::{best_constant_fit, Envelope, PanelSignal};
use crate::params::{self, ClassParams, Exponent};
use crate::quad::{compensated_sum, golden_section, integrate_cosine_tail};
use crate::special::{cos_norm, tail_integral};

/// One `t`-sample of the decomposition, all values scaled by `e^{2αn^r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionSample {
    pub t: f64,
    pub p_sq: f64,
    pub q_n: f64,
    pub r_n: f64,
}

/// Upper bound on the scaled `R_n`.
pub const R_N_BOUND: f64 = PI / 3.0;

/// Relative cut-off of the `j`-sum in `Q_n`.
const Q_TERM_CUTOFF: f64 = 1e-18;

/// `n₂` for `p = 1`, the regime of the decomposition bounds.
fn decomposition_threshold(alpha: f64, r: f64) -> Result<u64> {
    let p = ClassParams::new(alpha, r, 0.0, Exponent::ONE)?;
    params::threshold_n2(&p)
}

fn require_t(t: f64) -> Result<()> {
    if !(t.abs() <= PI) {
        return Err(invalid(format!("t must lie in [−π, π], got {t}")));
    }
    Ok(())
}

/// Scaled main term of `Q_n` and its band `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnAsymptotic {
    pub main: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `1/(t² + (αr n^{r−1})²)` with band multiplier `1 ± 5((1−r)/(αr)n^{-r} + αr n^{r−1})`.
pub fn q_n_asymptotic(alpha: f64, r: f64, n: u64, t: f64) -> Result<QnAsymptotic> {
    params::require_sub_linear(alpha, r)?;
    require_t(t)?;
    let n2 = decomposition_threshold(alpha, r)?;
    if n < n2 {
        return Err(Error::OutOfRegime(format!(
            "Q_n estimate needs n ≥ {n2}, got {n}"
        )));
    }
    let nf = n as f64;
    let ar = alpha * r;
    let a = ar * nf.powf(r - 1.0);
    let main = 1.0 / (t * t + a * a);
    let width = 5.0 * ((1.0 - r) / ar * nf.powf(-r) + a);
    Ok(QnAsymptotic {
        main,
        lower: main * (1.0 - width),
        upper: main * (1.0 + width),
    })
}

/// `∫_0^∞ e^{-α((j+u)^r − j^r)} cos(ut) du`.
fn q_inner(alpha: f64, r: f64, j: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(tail_integral(alpha, r, 0.0, j)?.scaled);
    }
    let f = |u: f64| (-alpha * exponent_gap(j, u, r)).exp();
    let res = integrate_cosine_tail(f, t, 1e-13);
    if !res.converged {
        return Err(Error::NonConverged(format!(
            "Q_n inner integral at j = {j}, t = {t}"
        )));
    }
    Ok(res.value)
}

/// Scaled `Q_n(t) = 2 Σ_{j≥n} ĉ_j² ∫_0^∞ e^{-α((j+u)^r − j^r)} cos(ut) du`,
/// `ĉ_j = e^{-α(j^r − n^r)}`.
pub fn q_n_exact(alpha: f64, r: f64, n: u64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(r > 0.0 && r <= 1.0) || n == 0 {
        return Err(invalid("Q_n needs α > 0, 0 < r ≤ 1 and n ≥ 1"));
    }
    require_t(t)?;
    let nf = n as f64;
    let mut terms = Vec::new();
    let mut k = 0u64;
    loop {
        let w = (-2.0 * alpha * exponent_gap(nf, k as f64, r)).exp();
        if w < Q_TERM_CUTOFF {
            break;
        }
        terms.push(w * q_inner(alpha, r, nf + k as f64, t.abs())?);
        k += 1;
    }
    Ok(2.0 * compensated_sum(terms))
}

/// `|𝒫(t)|² − Q_n(t)`, scaled.
pub fn r_n_residual(kernel: &ScaledKernel, t: f64) -> Result<DecompositionSample> {
    require_t(t)?;
    let p_sq = kernel.eval_direct(t).0.norm_sqr();
    let q_n = q_n_exact(kernel.alpha, kernel.r, kernel.n, t)?;
    Ok(DecompositionSample {
        t,
        p_sq,
        q_n,
        r_n: p_sq - q_n,
    })
}

/// `∫_{-π}^{π}|𝒫|²` on the kernel grid against `2πΣc_k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    pub grid_integral: f64,
    pub coefficient_sum: f64,
    pub relative_gap: f64,
}

pub fn parseval_closure(kernel: &ScaledKernel) -> Result<ParsevalCheck> {
    let nodes = kernel.default_nodes();
    let g = kernel.grid_eval(nodes, 0.0)?;
    let grid_integral =
        compensated_sum(g.values.iter().map(|z| z.norm_sqr())) * 2.0 * PI / nodes as f64;
    let coefficient_sum = 2.0 * PI * kernel.sum_of_squares();
    Ok(ParsevalCheck {
        grid_integral,
        coefficient_sum,
        relative_gap: (grid_integral - coefficient_sum).abs() / coefficient_sum,
    })
}

/// Oscillatory integral of `e^{-αt^r}` from `τ` and its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryTailCheck {
    pub value: f64,
    pub bound: f64,
}

impl OscillatoryTailCheck {
    pub fn holds(&self) -> bool {
        self.value > 0.0 && self.value <= self.bound
    }
}

/// `∫_0^∞ e^{-α(τ+u)^r} cos(vu) du` against `π|ψ′(τ)|/v²`.
pub fn oscillatory_tail_bound(
    alpha: f64,
    r: f64,
    tau: f64,
    v: f64,
) -> Result<OscillatoryTailCheck> {
    if !(alpha > 0.0) || !(r > 0.0 && r <= 1.0) {
        return Err(invalid("ψ(t) = e^{-αt^r} needs α > 0 and 0 < r ≤ 1"));
    }
    if !(tau >= 1.0) || v == 0.0 || !v.is_finite() {
        return Err(invalid(format!(
            "need τ ≥ 1 and v ≠ 0, got τ = {tau}, v = {v}"
        )));
    }
    let psi = (-alpha * tau.powf(r)).exp();
    let res = integrate_cosine_tail(|u| (-alpha * exponent_gap(tau, u, r)).exp(), v, 1e-13);
    if !res.converged {
        return Err(Error::NonConverged(format!(
            "oscillatory integral at τ = {tau}, v = {v}"
        )));
    }
    let slope = alpha * r * tau.powf(r - 1.0);
    Ok(OscillatoryTailCheck {
        value: psi * res.value,
        bound: PI / (v * v) * slope * psi,
    })
}

/// `sup|E′|/|E|` from the grid maximum, refined by golden section on direct
/// evaluations around the best node.
pub fn log_derivative_sup<E: Envelope + ?Sized>(env: &E, nodes: usize) -> Result<(f64, f64)> {
    let v = env.samples(nodes, 0.0)?;
    let d = env.derivative_samples(nodes, 0.0)?;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (j, (a, b)) in v.iter().zip(&d).enumerate() {
        let m = a.norm();
        if m == 0.0 || !m.is_finite() {
            return Err(invalid(format!(
                "envelope vanishes at t = {}",
                grid_node(nodes, 0.0, j)
            )));
        }
        let q = b.norm() / m;
        if q > best.1 {
            best = (j, q);
        }
    }
    let h = 2.0 * PI / nodes as f64;
    let t0 = grid_node(nodes, 0.0, best.0);
    let ratio = |t: f64| {
        let (a, b) = env.eval(t);
        -(b.norm() / a.norm())
    };
    let m = golden_section(ratio, t0 - h, t0 + h, 1e-12);
    Ok((
        best.1.max(-m.value),
        if -m.value > best.1 { m.x } else { t0 },
    ))
}

/// Numeric `M_n` and its explicit bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MnCheck {
    pub m_n: f64,
    pub argmax: f64,
    pub bound: f64,
    pub nodes: usize,
}

/// `(784π²/117)(n^{1−r}/(αr) + αr n^r)`.
pub fn m_n_bound(alpha: f64, r: f64, n: u64) -> f64 {
    let nf = n as f64;
    let ar = alpha * r;
    784.0 * PI * PI / 117.0 * (nf.powf(1.0 - r) / ar + ar * nf.powf(r))
}

/// `M_n` on the default grid, confirmed on the doubled grid.
pub fn m_n_compute(kernel: &ScaledKernel) -> Result<MnCheck> {
    params::require_sub_linear(kernel.alpha, kernel.r)?;
    let n2 = decomposition_threshold(kernel.alpha, kernel.r)?;
    if kernel.n < n2 {
        return Err(Error::OutOfRegime(format!(
            "M_n bound needs n ≥ {n2}, got {}",
            kernel.n
        )));
    }
    let nodes = kernel.default_nodes();
    let (m1, t1) = log_derivative_sup(kernel, nodes)?;
    let (m2, _) = log_derivative_sup(kernel, 2 * nodes)?;
    if (m1 - m2).abs() > 1e-8 * m2 {
        return Err(Error::NonConverged(format!(
            "M_n moved from {m1} to {m2} on grid doubling"
        )));
    }
    Ok(MnCheck {
        m_n: m1.max(m2),
        argmax: t1,
        bound: m_n_bound(kernel.alpha, kernel.r, kernel.n),
        nodes,
    })
}

/// `(E(t+h)e^{inh} − E(t))/2`, the envelope of `(φ(t+h) − φ(t))/2`.
struct HalfShift<'a, E: ?Sized> {
    inner: &'a E,
    h: f64,
    n: u64,
}

impl<E: Envelope + ?Sized> HalfShift<'_, E> {
    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, (self.n as f64 * self.h) % (2.0 * PI))
    }
}

impl<E: Envelope + ?Sized> Envelope for HalfShift<'_, E> {
    fn samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        let a = self.inner.samples(nodes, shift + self.h)?;
        let b = self.inner.samples(nodes, shift)?;
        let rot = self.rotation();
        Ok(a.iter().zip(&b).map(|(x, y)| 0.5 * (x * rot - y)).collect())
    }

    fn derivative_samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        let a = self.inner.derivative_samples(nodes, shift + self.h)?;
        let b = self.inner.derivative_samples(nodes, shift)?;
        let rot = self.rotation();
        Ok(a.iter().zip(&b).map(|(x, y)| 0.5 * (x * rot - y)).collect())
    }

    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let (a, da) = self.inner.eval(t + self.h);
        let (b, db) = self.inner.eval(t);
        let rot = self.rotation();
        (0.5 * (a * rot - b), 0.5 * (da * rot - db))
    }
}

/// Norms of `φ = Re[E(t)e^{i(nt+γ)}]` against `‖r‖_s‖cos‖_s/(2π)^{1/s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormComparison {
    pub s: Exponent,
    pub n: u64,
    pub norm_phi: f64,
    pub best_const_phi: f64,
    /// Largest `½‖φ(·+h) − φ‖_s` over the scanned shifts.
    pub half_shift_sup: f64,
    /// The value at `h = π/n`.
    pub half_shift_pi_over_n: f64,
    pub r_norm: f64,
    pub m: f64,
    /// `‖cos‖_s/(2π)^{1/s}`.
    pub main: f64,
    /// `δ^{(i)} = (quantity/‖r‖_s − main)·n/M`; `None` when `M = 0`.
    pub deltas: [Option<f64>; 3],
    /// `n ≥ 4πsM` for finite `s`, always for `s = ∞`.
    pub within_regime: bool,
}

/// Refined two-sided bounds on `δ^{(1)}` and on `δ^{(2)}, δ^{(3)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBounds {
    pub first: (f64, f64),
    pub others: (f64, f64),
}

impl DeltaBounds {
    pub fn refined(s: Exponent) -> Self {
        let sq2 = 2f64.sqrt();
        if s.is_infinite() {
            let hi = 5.0 * sq2 * PI;
            DeltaBounds {
                first: (-hi, hi),
                others: (-15.0 * PI / sq2, hi),
            }
        } else {
            let hi = sq2 * (5.0 * PI + 2.0) + 4.0;
            DeltaBounds {
                first: (-hi, hi),
                others: (-(15.0 * PI + 6.0) / sq2 - 4.0, hi),
            }
        }
    }

    /// `|δ| < 14π`.
    pub fn coarse() -> Self {
        let b = 14.0 * PI;
        DeltaBounds {
            first: (-b, b),
            others: (-b, b),
        }
    }
}

impl NormComparison {
    /// The three quantities are ordered as `half_shift ≤ best_const ≤ norm`.
    pub fn ordered(&self) -> bool {
        let tol = 1e-10 * self.norm_phi;
        self.half_shift_sup <= self.best_const_phi + tol
            && self.best_const_phi <= self.norm_phi + tol
    }

    /// Every defined `δ` lies within `bounds`.
    pub fn deltas_within(&self, bounds: &DeltaBounds) -> bool {
        self.deltas.iter().enumerate().all(|(i, d)| match d {
            None => true,
            Some(d) => {
                let (lo, hi) = if i == 0 { bounds.first } else { bounds.others };
                *d >= lo && *d <= hi
            }
        })
    }
}

/// Shifts `h` for the supremum: `π/n`, odd multiples of it, and small
/// perturbations.
fn shift_scan(n: u64) -> Vec<f64> {
    let base = PI / n as f64;
    let mut hs = vec![base];
    for m in [3.0, 5.0, 9.0, 17.0, 33.0] {
        hs.push(m * base);
    }
    for f in [0.97, 1.03] {
        hs.push(f * base);
    }
    hs
}

/// Evaluates the three norms of `φ = Re[E(t)e^{i(nt+γ)}]` on `nodes` panels.
pub fn norm_comparison<E: Envelope + ?Sized>(
    env: &E,
    phase: f64,
    n: u64,
    s: Exponent,
    nodes: usize,
) -> Result<NormComparison> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let beta = -2.0 * phase / PI;
    let (m, _) = log_derivative_sup(env, nodes)?;
    if !m.is_finite() {
        return Err(invalid("logarithmic derivative is unbounded"));
    }
    let phi = PanelSignal::modulated(env, n, beta, nodes)?;
    let norm_phi = phi.norm(s);
    let best_const_phi = best_constant_fit(&phi, s).value;
    let mut half_shift_pi_over_n = 0.0;
    let mut half_shift_sup = 0.0f64;
    for (i, h) in shift_scan(n).into_iter().enumerate() {
        let d = HalfShift { inner: env, h, n };
        let v = PanelSignal::modulated(&d, n, beta, nodes)?.norm(s);
        if i == 0 {
            half_shift_pi_over_n = v;
        }
        half_shift_sup = half_shift_sup.max(v);
    }
    let r_norm = PanelSignal::modulus(env, nodes)?.norm(s);
    let main = cos_norm(s) / (2.0 * PI).powf(s.recip());
    let delta = |q: f64| (m > 0.0).then(|| (q / r_norm - main) * n as f64 / m);
    let within_regime = s.is_infinite() || n as f64 >= 4.0 * PI * s.value() * m;
    Ok(NormComparison {
        s,
        n,
        norm_phi,
        best_const_phi,
        half_shift_sup,
        half_shift_pi_over_n,
        r_norm,
        m,
        main,
        deltas: [
            delta(norm_phi),
            delta(best_const_phi),
            delta(half_shift_sup),
        ],
        within_regime,
    })
}

/// [`norm_comparison`] on the kernel pair `g − ih = 𝒫` at its default grid.
pub fn norm_comparison_kernel(
    alpha: f64,
    r: f64,
    n: u64,
    beta: f64,
    s: Exponent,
    eps: f64,
) -> Result<NormComparison> {
    let kernel = build_scaled_kernel(alpha, r, n, eps)?;
    let nodes = crate::norms::exact_nodes(&kernel);
    norm_comparison(&kernel, -beta * PI / 2.0, n, s, nodes)
}
