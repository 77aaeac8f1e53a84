//! `L_s` norms over one period and best approximating constants.
//!
//! Two sample models share the same minimisation:
//!
//! - [`GridSamples`] on a uniform grid with trapezoidal weights, the plain
//!   discretisation of a periodic function;
//! - [`PanelSignal`], Gauss–Legendre values on every grid panel of a
//!   modulated signal `Re[E(t)e^{i(nt − βπ/2)}]`. Panels where `f − λ`
//!   changes sign are split at the roots of the panel interpolant, so the
//!   kink of `|f − λ|^s` costs no accuracy.
//!
//! [`exact_en`] applies the second model to the kernel and returns the
//! scaled error `e^{αn^r}E_n = π^{-1} inf_λ ‖e^{αn^r}P^{(n)} − λ‖_{p′}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::kernel::{
    build_scaled_kernel, carrier, grid_node, GridSamples, ScaledKernel, DEFAULT_EPS,
};
use crate::params::{ClassParams, Exponent};
use crate::quad::{golden_section, GaussLegendre};

/// Functions with a best constant approximation in `L_s`.
pub trait ConstantFit {
    /// `(min f, max f)`.
    fn range(&self) -> (f64, f64);
    /// Mean over the period.
    fn mean(&self) -> f64;
    /// `∫|f − λ|^s` over the period, finite `s ≥ 1`.
    fn deviation(&self, lambda: f64, s: f64) -> f64;
    /// Exact minimiser for `s = 1` when cheaply available.
    fn median(&self) -> Option<f64> {
        None
    }
}

/// Minimiser and minimum of `λ ↦ ‖f − λ‖_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestConstantResult {
    pub lambda_star: f64,
    pub value: f64,
    pub iterations: usize,
}

/// `inf_λ ‖f − λ‖_s` for any [`ConstantFit`].
pub fn best_constant_fit<F: ConstantFit + ?Sized>(f: &F, s: Exponent) -> BestConstantResult {
    let sv = s.value();
    let (lo, hi) = f.range();
    if sv.is_infinite() {
        return BestConstantResult {
            lambda_star: 0.5 * (lo + hi),
            value: 0.5 * (hi - lo),
            iterations: 0,
        };
    }
    if sv == 2.0 {
        let m = f.mean();
        return BestConstantResult {
            lambda_star: m,
            value: f.deviation(m, 2.0).sqrt(),
            iterations: 0,
        };
    }
    if sv == 1.0 {
        if let Some(m) = f.median() {
            return BestConstantResult {
                lambda_star: m,
                value: f.deviation(m, 1.0),
                iterations: 0,
            };
        }
    }
    let min = golden_section(|l| f.deviation(l, sv), lo, hi, 1e-12);
    BestConstantResult {
        lambda_star: min.x,
        value: min.value.powf(1.0 / sv),
        iterations: min.iterations,
    }
}

impl ConstantFit for GridSamples<f64> {
    fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            })
    }

    fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    fn deviation(&self, lambda: f64, s: f64) -> f64 {
        let w = 2.0 * PI / self.values.len() as f64;
        self.values
            .iter()
            .map(|v| pow_abs(v - lambda, s))
            .sum::<f64>()
            * w
    }

    fn median(&self) -> Option<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 0 {
            0.5 * (v[m - 1] + v[m])
        } else {
            v[m]
        })
    }
}

fn pow_abs(x: f64, s: f64) -> f64 {
    if s == 1.0 {
        x.abs()
    } else if s == 2.0 {
        x * x
    } else {
        x.abs().powf(s)
    }
}

/// `‖f‖_s` of grid samples over `[−π, π)`.
pub fn lp_norm_grid(samples: &GridSamples<f64>, s: Exponent) -> f64 {
    let sv = s.value();
    if sv.is_infinite() {
        samples.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        samples.deviation(0.0, sv).powf(1.0 / sv)
    }
}

/// `inf_λ ‖f − λ‖_s` of grid samples.
pub fn best_constant(samples: &GridSamples<f64>, s: Exponent) -> Result<BestConstantResult> {
    if samples.is_empty() {
        return Err(invalid("no samples"));
    }
    Ok(best_constant_fit(samples, s))
}

/// Complex envelope `E` of a modulated signal `Re[E(t)e^{i(nt+φ)}]`.
pub trait Envelope {
    /// `E` on the grid `t_j = −π + shift + 2πj/N`.
    fn samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>>;
    /// `E′` on the same grid.
    fn derivative_samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>>;
    /// `(E(t), E′(t))` at a single point.
    fn eval(&self, t: f64) -> (Complex64, Complex64);
}

impl Envelope for ScaledKernel {
    fn samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        Ok(self.grid_eval(nodes, shift)?.values)
    }

    fn derivative_samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        Ok(self.derivative_grid_eval(nodes, shift)?.values)
    }

    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        self.eval_direct(t)
    }
}

/// Envelope given pointwise by a closure returning `(E(t), E′(t))`.
pub struct FnEnvelope<F>(pub F);

impl<F: Fn(f64) -> (Complex64, Complex64)> Envelope for FnEnvelope<F> {
    fn samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        Ok((0..nodes)
            .map(|j| (self.0)(grid_node(nodes, shift, j)).0)
            .collect())
    }

    fn derivative_samples(&self, nodes: usize, shift: f64) -> Result<Vec<Complex64>> {
        Ok((0..nodes)
            .map(|j| (self.0)(grid_node(nodes, shift, j)).1)
            .collect())
    }

    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        (self.0)(t)
    }
}

/// Gauss–Legendre points per grid panel.
pub const PANEL_POINTS: usize = 10;

struct PanelRule {
    x: [f64; PANEL_POINTS],
    w: [f64; PANEL_POINTS],
    bary: [f64; PANEL_POINTS],
}

fn panel_rule() -> &'static PanelRule {
    static R: OnceLock<PanelRule> = OnceLock::new();
    R.get_or_init(|| {
        let gl = GaussLegendre::new(PANEL_POINTS);
        let mut rule = PanelRule {
            x: [0.0; PANEL_POINTS],
            w: [0.0; PANEL_POINTS],
            bary: [0.0; PANEL_POINTS],
        };
        for g in 0..PANEL_POINTS {
            rule.x[g] = gl.nodes[g];
            rule.w[g] = gl.weights[g];
            let sign = if g % 2 == 0 { 1.0 } else { -1.0 };
            rule.bary[g] = sign * ((1.0 - gl.nodes[g].powi(2)) * gl.weights[g]).sqrt();
        }
        rule
    })
}

fn interpolate(v: &[f64], x: f64) -> f64 {
    let rule = panel_rule();
    let mut num = 0.0;
    let mut den = 0.0;
    for g in 0..PANEL_POINTS {
        let d = x - rule.x[g];
        if d == 0.0 {
            return v[g];
        }
        let t = rule.bary[g] / d;
        num += t * v[g];
        den += t;
    }
    num / den
}

/// Root of `p − λ` in `[a, b]` by the Illinois method; signs at the ends differ.
fn panel_root(v: &[f64], lambda: f64, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..100 {
        let x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) || b - a < 1e-15 {
            return 0.5 * (a + b);
        }
        let fx = interpolate(v, x) - lambda;
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Real signal known at the Gauss–Legendre points of every grid panel.
#[derive(Debug, Clone)]
pub struct PanelSignal {
    nodes: usize,
    values: Vec<f64>,
    ends: Vec<(f64, f64)>,
    min: f64,
    max: f64,
}

/// `E` at the Gauss–Legendre points of every panel, panel-major.
fn panel_envelope<E: Envelope + ?Sized>(env: &E, nodes: usize) -> Result<Vec<Complex64>> {
    let rule = panel_rule();
    let h = 2.0 * PI / nodes as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); nodes * PANEL_POINTS];
    for g in 0..PANEL_POINTS {
        let offset = 0.5 * h * (1.0 + rule.x[g]);
        let s = env.samples(nodes, offset)?;
        if s.len() != nodes {
            return Err(Error::GridSize {
                nodes,
                reason: "envelope returned a short grid".into(),
            });
        }
        for (j, v) in s.into_iter().enumerate() {
            out[j * PANEL_POINTS + g] = v;
        }
    }
    Ok(out)
}

fn check_panel_nodes(nodes: usize) -> Result<()> {
    if nodes < 8 || !nodes.is_power_of_two() {
        return Err(Error::GridSize {
            nodes,
            reason: "need a power of two ≥ 8".into(),
        });
    }
    Ok(())
}

impl PanelSignal {
    /// `Re[E(t)e^{i(nt − βπ/2)}]`.
    pub fn modulated<E: Envelope + ?Sized>(
        env: &E,
        n: u64,
        beta: f64,
        nodes: usize,
    ) -> Result<Self> {
        check_panel_nodes(nodes)?;
        let rule = panel_rule();
        let h = 2.0 * PI / nodes as f64;
        let e = panel_envelope(env, nodes)?;
        let offsets: Vec<f64> = rule.x.iter().map(|x| 0.5 * h * (1.0 + x)).collect();
        let values = e
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (j, g) = (i / PANEL_POINTS, i % PANEL_POINTS);
                (v * carrier(n, nodes, j, offsets[g], beta)).re
            })
            .collect();
        Ok(Self::from_values(nodes, values))
    }

    /// `|E(t)|`.
    pub fn modulus<E: Envelope + ?Sized>(env: &E, nodes: usize) -> Result<Self> {
        check_panel_nodes(nodes)?;
        let values = panel_envelope(env, nodes)?
            .iter()
            .map(|v| v.norm())
            .collect();
        Ok(Self::from_values(nodes, values))
    }

    /// Samples a real function on `[−π, π)`.
    pub fn from_fn(f: impl Fn(f64) -> f64, nodes: usize) -> Result<Self> {
        check_panel_nodes(nodes)?;
        let rule = panel_rule();
        let h = 2.0 * PI / nodes as f64;
        let mut values = Vec::with_capacity(nodes * PANEL_POINTS);
        for j in 0..nodes {
            let t0 = grid_node(nodes, 0.0, j);
            for x in rule.x {
                values.push(f(t0 + 0.5 * h * (1.0 + x)));
            }
        }
        Ok(Self::from_values(nodes, values))
    }

    fn from_values(nodes: usize, values: Vec<f64>) -> Self {
        let ends = values
            .chunks_exact(PANEL_POINTS)
            .map(|v| (interpolate(v, -1.0), interpolate(v, 1.0)))
            .collect();
        let mut sig = PanelSignal {
            nodes,
            values,
            ends,
            min: 0.0,
            max: 0.0,
        };
        sig.max = sig.extreme(1.0);
        sig.min = -sig.extreme(-1.0);
        sig
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Panel sample points in `[−1, 1]` with values: left end, interior, right end.
    fn panel_points(&self, j: usize) -> ([f64; PANEL_POINTS + 2], [f64; PANEL_POINTS + 2]) {
        let rule = panel_rule();
        let v = &self.values[j * PANEL_POINTS..(j + 1) * PANEL_POINTS];
        let mut xs = [0.0; PANEL_POINTS + 2];
        let mut vs = [0.0; PANEL_POINTS + 2];
        xs[0] = -1.0;
        vs[0] = self.ends[j].0;
        xs[PANEL_POINTS + 1] = 1.0;
        vs[PANEL_POINTS + 1] = self.ends[j].1;
        xs[1..=PANEL_POINTS].copy_from_slice(&rule.x);
        vs[1..=PANEL_POINTS].copy_from_slice(v);
        (xs, vs)
    }

    /// `max sgn·f`, refined on the panel interpolants near the sample maximum.
    fn extreme(&self, sgn: f64) -> f64 {
        let sample_best = self
            .values
            .iter()
            .chain(self.ends.iter().flat_map(|e| [&e.0, &e.1]))
            .fold(f64::NEG_INFINITY, |m, &v| m.max(sgn * v));
        let spread = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let slack = 1e-3 * spread;
        let mut best = sample_best;
        for j in 0..self.nodes {
            let (xs, vs) = self.panel_points(j);
            let (i, top) = vs
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, sgn * v))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            if top < sample_best - slack {
                continue;
            }
            let v = &self.values[j * PANEL_POINTS..(j + 1) * PANEL_POINTS];
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(PANEL_POINTS + 1)];
            let m = golden_section(|x| -sgn * interpolate(v, x), a, b, 1e-10);
            best = best.max(-m.value);
        }
        best
    }

    /// `‖f‖_s` over the period.
    pub fn norm(&self, s: Exponent) -> f64 {
        let sv = s.value();
        if sv.is_infinite() {
            self.max.abs().max(self.min.abs())
        } else {
            self.deviation(0.0, sv).powf(1.0 / sv)
        }
    }
}

impl ConstantFit for PanelSignal {
    fn range(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    fn mean(&self) -> f64 {
        let rule = panel_rule();
        let h = 2.0 * PI / self.nodes as f64;
        let sum: f64 = self
            .values
            .chunks_exact(PANEL_POINTS)
            .map(|v| v.iter().zip(&rule.w).map(|(a, w)| a * w).sum::<f64>())
            .sum();
        sum * 0.5 * h / (2.0 * PI)
    }

    fn deviation(&self, lambda: f64, s: f64) -> f64 {
        let rule = panel_rule();
        let h = 2.0 * PI / self.nodes as f64;
        let mut total = 0.0;
        for j in 0..self.nodes {
            let v = &self.values[j * PANEL_POINTS..(j + 1) * PANEL_POINTS];
            let (xs, vs) = self.panel_points(j);
            let crosses = s != 2.0
                && vs
                    .windows(2)
                    .any(|w| (w[0] - lambda) * (w[1] - lambda) <= 0.0);
            if !crosses {
                total += v
                    .iter()
                    .zip(&rule.w)
                    .map(|(a, w)| w * pow_abs(a - lambda, s))
                    .sum::<f64>();
                continue;
            }
            let mut cuts = [(0.0, false); PANEL_POINTS + 3];
            let mut count = 1;
            cuts[0] = (-1.0, false);
            for k in 0..PANEL_POINTS + 1 {
                let (fa, fb) = (vs[k] - lambda, vs[k + 1] - lambda);
                if fa == 0.0 && k > 0 {
                    cuts[count] = (xs[k], true);
                    count += 1;
                } else if fa * fb < 0.0 {
                    cuts[count] = (panel_root(v, lambda, xs[k], fa, xs[k + 1], fb), true);
                    count += 1;
                }
            }
            cuts[count] = (1.0, false);
            count += 1;
            let graded = s.fract() != 0.0;
            for w in cuts[..count].windows(2) {
                let ((a, ra), (b, rb)) = (w[0], w[1]);
                if b <= a {
                    continue;
                }
                let f = |x: f64| pow_abs(interpolate(v, x) - lambda, s);
                total += if graded {
                    graded_piece(f, a, ra, b, rb)
                } else {
                    plain_piece(f, a, b)
                };
            }
        }
        total * 0.5 * h
    }
}

fn plain_piece(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = panel_rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * rule
        .x
        .iter()
        .zip(&rule.w)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// `∫_a^b f` when `f` behaves like `|x − root|^s` at the flagged ends:
/// `x = a + (b−a)u²` (or its mirror, or smoothstep for both ends) makes the
/// integrand vanish like `u^{2s+1}`.
fn graded_piece(f: impl Fn(f64) -> f64, a: f64, ra: bool, b: f64, rb: bool) -> f64 {
    let rule = panel_rule();
    let len = b - a;
    let map = |u: f64| -> (f64, f64) {
        match (ra, rb) {
            (true, true) => (a + len * u * u * (3.0 - 2.0 * u), len * 6.0 * u * (1.0 - u)),
            (true, false) => (a + len * u * u, len * 2.0 * u),
            (false, true) => (b - len * (1.0 - u) * (1.0 - u), len * 2.0 * (1.0 - u)),
            (false, false) => (a + len * u, len),
        }
    };
    0.5 * rule
        .x
        .iter()
        .zip(&rule.w)
        .map(|(x, w)| {
            let (t, jac) = map(0.5 * (1.0 + x));
            w * jac * f(t)
        })
        .sum::<f64>()
}

/// Settings for [`exact_en`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    pub eps: f64,
    /// Panel count; `None` picks the default grid.
    pub nodes: Option<usize>,
    /// Relative tolerance of the grid-doubling check.
    pub tol: f64,
    pub check_doubling: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            eps: DEFAULT_EPS,
            nodes: None,
            tol: 1e-8,
            check_doubling: true,
        }
    }
}

/// Scaled error `e^{αn^r}E_n` with its numerical provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactErrorResult {
    pub n: u64,
    pub scaled_value: f64,
    /// `−αn^r`, the logarithm of the omitted factor.
    pub log_scale: f64,
    pub lambda_star: f64,
    pub nodes: usize,
    pub truncation: usize,
    /// Relative change against the doubled grid, when checked.
    pub doubling_gap: Option<f64>,
}

impl ExactErrorResult {
    /// Unscaled `E_n`; underflows for large `αn^r`.
    pub fn value(&self) -> f64 {
        self.scaled_value * self.log_scale.exp()
    }
}

/// Default panel count for the kernel at `n`.
pub fn exact_nodes(kernel: &ScaledKernel) -> usize {
    let by_n = (16 * kernel.n as usize).next_power_of_two();
    kernel.default_nodes().max(by_n)
}

fn scaled_error_on(
    kernel: &ScaledKernel,
    beta: f64,
    s: Exponent,
    nodes: usize,
) -> Result<BestConstantResult> {
    let sig = PanelSignal::modulated(kernel, kernel.n, beta, nodes)?;
    Ok(best_constant_fit(&sig, s))
}

/// `e^{αn^r}E_n` for the class `params`, through `π^{-1} inf_λ ‖P^{(n)} − λ‖_{p′}`.
pub fn exact_en(params: &ClassParams, n: u64, cfg: &ExactConfig) -> Result<ExactErrorResult> {
    let kernel = build_scaled_kernel(params.alpha, params.r, n, cfg.eps)?;
    let s = params.p_conj();
    let nodes = match cfg.nodes {
        Some(v) => {
            check_panel_nodes(v)?;
            v
        }
        None => exact_nodes(&kernel),
    };
    let base = scaled_error_on(&kernel, params.beta, s, nodes)?;
    let (best, used, gap) = if cfg.check_doubling {
        let fine = scaled_error_on(&kernel, params.beta, s, 2 * nodes)?;
        let gap = (fine.value - base.value).abs() / fine.value.abs();
        if !(gap <= cfg.tol) {
            return Err(Error::NonConverged(format!(
                "E_n at n = {n}: relative change {gap:.3e} on doubling {nodes} panels exceeds {:.1e}",
                cfg.tol
            )));
        }
        (fine, 2 * nodes, Some(gap))
    } else {
        (base, nodes, None)
    };
    Ok(ExactErrorResult {
        n,
        scaled_value: best.value / PI,
        log_scale: -params.alpha * (n as f64).powf(params.r),
        lambda_star: best.lambda_star,
        nodes: used,
        truncation: kernel.truncation(),
        doubling_gap: gap,
    })
}

/// `e^{αn^r}E_n` for `p = 2` from Parseval: `(Σ c_k² / π)^{1/2}`.
pub fn exact_en_p2(alpha: f64, r: f64, n: u64, eps: f64) -> Result<f64> {
    let kernel = build_scaled_kernel(alpha, r, n, eps)?;
    Ok((kernel.sum_of_squares() / PI).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::cos_norm;
    use proptest::prelude::*;

    fn e(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn grid(f: impl Fn(f64) -> f64, nodes: usize) -> GridSamples<f64> {
        GridSamples {
            values: (0..nodes).map(|j| f(grid_node(nodes, 0.0, j))).collect(),
            shift: 0.0,
        }
    }

    #[test]
    fn grid_norms_of_cosine() {
        let g = grid(|t| (3.0 * t).cos(), 4096);
        assert!((lp_norm_grid(&g, Exponent::ONE) - 4.0).abs() < 1e-5);
        assert!((lp_norm_grid(&g, Exponent::TWO) - PI.sqrt()).abs() < 1e-12);
        assert!((lp_norm_grid(&g, Exponent::INFINITY) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_constant_of_shifted_cosine() {
        let g = grid(|t| 0.7 + t.cos(), 4096);
        for s in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY, e(3.0)] {
            let b = best_constant(&g, s).unwrap();
            assert!((b.lambda_star - 0.7).abs() < 1e-6, "{s}");
            assert!((b.value - cos_norm(s)).abs() < 1e-5, "{s}");
        }
    }

    #[test]
    fn panel_signal_matches_closed_forms() {
        // ∫|cos t − λ| over the period: 4 sin θ + 2λ(π − 2θ), θ = arccos λ.
        let sig = PanelSignal::from_fn(|t| t.cos(), 64).unwrap();
        for &l in &[0.0, 0.3, -0.8] {
            let th = f64::acos(l);
            let exact = 4.0 * th.sin() + 2.0 * l * (PI - 2.0 * th);
            assert!((sig.deviation(l, 1.0) - exact).abs() < 1e-13, "λ = {l}");
        }
        assert!((sig.norm(Exponent::INFINITY) - 1.0).abs() < 1e-13);
        assert!(sig.mean().abs() < 1e-15);
        assert!((sig.norm(e(3.0)) - cos_norm(e(3.0))).abs() < 1e-12);
    }

    #[test]
    fn modulated_signal_against_direct_function() {
        // E(t) = 1/(a − it) carried at n = 5.
        let a = 0.3;
        let env = FnEnvelope(move |t: f64| {
            let z = Complex64::new(a, -t);
            (1.0 / z, Complex64::i() / (z * z))
        });
        let n = 5u64;
        let beta = 0.4;
        let modulated = PanelSignal::modulated(&env, n, beta, 256).unwrap();
        let direct = PanelSignal::from_fn(
            |t| {
                (Complex64::new(a, -t).inv()
                    * Complex64::from_polar(1.0, n as f64 * t - beta * PI / 2.0))
                .re
            },
            256,
        )
        .unwrap();
        for &l in &[0.0, 0.5, -1.0] {
            let x = modulated.deviation(l, 1.0);
            let y = direct.deviation(l, 1.0);
            assert!((x - y).abs() < 1e-12 * y, "{x} {y}");
        }
    }

    #[test]
    fn exact_en_p2_agrees_with_panel_route() {
        let params = ClassParams::new(1.0, 0.5, 0.0, Exponent::TWO).unwrap();
        let via_parseval = exact_en_p2(1.0, 0.5, 50, DEFAULT_EPS).unwrap();
        let kernel = build_scaled_kernel(1.0, 0.5, 50, DEFAULT_EPS).unwrap();
        let panel = scaled_error_on(&kernel, 0.0, Exponent::TWO, exact_nodes(&kernel)).unwrap();
        assert!((panel.value / PI - via_parseval).abs() < 1e-12 * via_parseval);
        let r = exact_en(&params, 50, &ExactConfig::default()).unwrap();
        assert!((r.scaled_value - via_parseval).abs() < 1e-12 * via_parseval);
        assert!(r.lambda_star.abs() < 1e-12);
    }

    #[test]
    fn exact_en_r_one_matches_abel_kernel() {
        // r = 1, p = ∞ (p′ = 1): the kernel is Re[e^{i(nt−βπ/2)}/(1 − qe^{it})]·q^0.
        let alpha = 0.5;
        let q = (-alpha as f64).exp();
        let n = 3u64;
        let params = ClassParams::new(alpha, 1.0, 0.0, Exponent::INFINITY).unwrap();
        let r = exact_en(&params, n, &ExactConfig::default()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let f = |t: f64| {
            (one / (one - Complex64::from_polar(q, t)) * Complex64::from_polar(1.0, n as f64 * t))
                .re
        };
        // Brute-force oracle: fine midpoint rule and a dense λ scan.
        let m = 200_000;
        let vals: Vec<f64> = (0..m)
            .map(|j| f(-PI + (j as f64 + 0.5) * 2.0 * PI / m as f64))
            .collect();
        let dev = |l: f64| vals.iter().map(|v| (v - l).abs()).sum::<f64>() * 2.0 * PI / m as f64;
        let oracle = (0..=400)
            .map(|i| r.lambda_star - 0.02 + 1e-4 * i as f64)
            .map(dev)
            .fold(f64::INFINITY, f64::min)
            / PI;
        assert!(
            (r.scaled_value - oracle).abs() < 1e-6 * oracle,
            "{} {oracle}",
            r.scaled_value
        );
    }

    #[test]
    fn exact_en_rejects_bad_grid() {
        let params = ClassParams::new(1.0, 0.5, 0.0, Exponent::ONE).unwrap();
        let cfg = ExactConfig {
            nodes: Some(1000),
            ..Default::default()
        };
        assert!(matches!(
            exact_en(&params, 10, &cfg),
            Err(Error::GridSize { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn best_constant_is_no_worse_than_zero_or_mean(
            c in -2.0f64..2.0,
            amp in 0.1f64..3.0,
            k in 1u32..6,
            s in prop_oneof![Just(1.0f64), 1.2f64..5.0, Just(2.0f64), Just(f64::INFINITY)],
        ) {
            let s = e(s);
            let sig = PanelSignal::from_fn(|t| c + amp * (k as f64 * t).cos() + 0.3 * (t).sin().powi(3), 64).unwrap();
            let b = best_constant_fit(&sig, s);
            let at = |l: f64| if s.is_infinite() {
                let (lo, hi) = sig.range();
                (hi - l).max(l - lo)
            } else {
                sig.deviation(l, s.value()).powf(1.0 / s.value())
            };
            prop_assert!(b.value <= at(0.0) * (1.0 + 1e-10));
            prop_assert!(b.value <= at(sig.mean()) * (1.0 + 1e-10));
            prop_assert!(b.value <= at(b.lambda_star + 1e-3) * (1.0 + 1e-12));
            prop_assert!(b.value <= at(b.lambda_star - 1e-3) * (1.0 + 1e-12));
        }
    }
}
