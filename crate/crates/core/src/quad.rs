//! Quadrature and summation primitives shared by the analytic modules.
//!
//! - Gauss–Legendre rules from a Newton iteration on the Legendre recurrence.
//! - A global adaptive integrator comparing 10- and 20-point rules per
//!   interval and bisecting the worst one.
//! - Semi-infinite integrals by geometrically growing panels.
//! - Cosine-weighted semi-infinite integrals by half-period panels summed
//!   with Wynn's epsilon algorithm.
//! - Compensated summation and golden-section minimisation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with this rule.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule10() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(10))
}

fn rule20() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(20))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn estimate(a: f64, b: f64, f: &impl Fn(f64) -> f64) -> Piece {
    let coarse = rule10().integrate(a, b, f);
    let fine = rule20().integrate(a, b, f);
    Piece {
        a,
        b,
        value: fine,
        error: (fine - coarse).abs(),
    }
}

const MAX_PIECES: usize = 4000;

/// Global adaptive integration of `f` on `[a, b]` until the summed error
/// estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let mut heap = BinaryHeap::new();
    heap.push(estimate(a, b, &f));
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target {
            return Integral {
                value,
                error,
                converged: true,
            };
        }
        if heap.len() >= MAX_PIECES {
            return Integral {
                value,
                error,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(Piece {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(estimate(worst.a, mid, &f));
        heap.push(estimate(mid, worst.b, &f));
    }
}

/// `∫_a^∞ f`, for `f` that eventually decays faster than any power.
///
/// Panels start at width `scale` and double; integration stops once three
/// consecutive panels contribute less than `rel_tol` of the running total.
pub fn integrate_to_infinity(f: impl Fn(f64) -> f64, a: f64, scale: f64, rel_tol: f64) -> Integral {
    let mut total = 0.0;
    let mut error = 0.0;
    let mut lo = a;
    let mut width = scale;
    let mut quiet = 0;
    let mut converged = true;
    for _ in 0..2000 {
        let hi = lo + width;
        let piece = integrate(&f, lo, hi, rel_tol * 0.1, 0.0);
        converged &= piece.converged;
        total += piece.value;
        error += piece.error;
        if piece.value.abs() <= rel_tol * 1e-3 * total.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Integral {
                    value: total,
                    error,
                    converged,
                };
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Integral {
        value: total,
        error,
        converged: false,
    }
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the deepest even-column entry, which for alternating series with
/// smoothly varying terms converges far faster than the sums themselves.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n == 0 {
        return 0.0;
    }
    if n < 3 {
        return sums[n - 1];
    }
    // prev: column j-1, cur: column j; each indexed by starting position.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut j = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for k in 0..cur.len() - 1 {
            let diff = cur[k + 1] - cur[k];
            if diff == 0.0 {
                // Column has converged exactly.
                return if j % 2 == 0 { cur[k + 1] } else { best };
            }
            next.push(prev[k + 1] + 1.0 / diff);
        }
        j += 1;
        prev = cur;
        cur = next;
        if j % 2 == 0 {
            if let Some(&last) = cur.last() {
                if last.is_finite() {
                    best = last;
                } else {
                    break;
                }
            }
        }
    }
    best
}

/// `∫_0^∞ f(u) cos(v u) du` by splitting at the zeros of `cos(vu)` and
/// accelerating the alternating panel sums.
///
/// `f` must be smooth and tend to zero; convergence is declared when two
/// successive extrapolations agree to `rel_tol`, or to the round-off level
/// of the current panel.
pub fn integrate_cosine_tail(f: impl Fn(f64) -> f64, v: f64, rel_tol: f64) -> Integral {
    let v = v.abs();
    assert!(v > 0.0, "frequency must be non-zero");
    let half = PI / v;
    let g = |u: f64| f(u) * (v * u).cos();
    let mut sums: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut error = 0.0;
    let mut converged_quad = true;
    let mut lo = 0.0;
    let mut hi = 0.5 * half;
    let mut last_estimate = f64::NAN;
    let mut agree = 0;
    const WINDOW: usize = 40;
    for m in 0..200_000 {
        let piece = integrate(g, lo, hi, rel_tol * 1e-2, 0.0);
        converged_quad &= piece.converged;
        error += piece.error;
        total += piece.value;
        sums.push(total);
        if piece.value.abs() <= f64::EPSILON * total.abs() {
            return Integral {
                value: total,
                error,
                converged: converged_quad,
            };
        }
        if m >= 4 {
            let start = sums.len().saturating_sub(WINDOW);
            let est = wynn_epsilon(&sums[start..]);
            // Round-off in the panel sums sets a floor on the agreement.
            let floor = 100.0 * f64::EPSILON * piece.value.abs();
            if (est - last_estimate).abs() <= (rel_tol * est.abs()).max(floor) {
                agree += 1;
                if agree >= 2 {
                    return Integral {
                        value: est,
                        error: error + (est - last_estimate).abs(),
                        converged: converged_quad,
                    };
                }
            } else {
                agree = 0;
            }
            last_estimate = est;
        }
        lo = hi;
        hi += half;
    }
    Integral {
        value: total,
        error,
        converged: false,
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Result of a one-dimensional minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `rel_tol` times the larger of the
/// initial bracket width and `|x|`.
pub fn golden_section(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Minimum {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let width0 = b - a;
    if width0 == 0.0 {
        return Minimum {
            x: a,
            value: f(a),
            iterations: 0,
        };
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > rel_tol * width0.max(0.5 * (a + b).abs()) && iterations < 500 {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = Minimum {
        x: c,
        value: fc,
        iterations,
    };
    for (x, v) in [(d, fd), (a, fa), (b, fb)] {
        if v < best.value {
            best = Minimum {
                x,
                value: v,
                iterations,
            };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        // x^18 is the highest even power integrated exactly by 10 nodes.
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(18));
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(5));
        assert!((v - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_kink() {
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, 1e-12, 0.0);
        assert!(r.converged);
        assert!((r.value - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn infinite_range_exponential() {
        let r = integrate_to_infinity(|x: f64| (-x).exp(), 1.0, 1.0, 1e-13);
        assert!(r.converged);
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn cosine_tail_matches_closed_forms() {
        // ∫ e^{-au} cos(vu) du = a/(a²+v²)
        for &(a, v) in &[(1.0, 2.0), (0.01, 3.0), (0.3, 0.1)] {
            let r = integrate_cosine_tail(|u: f64| (-a * u).exp(), v, 1e-13);
            let exact = a / (a * a + v * v);
            assert!(
                (r.value - exact).abs() < 1e-11 * exact.max(1e-3),
                "{a} {v}: {} vs {exact}",
                r.value
            );
        }
        // ∫ cos(vu)/(1+u²) du = (π/2) e^{-v}, algebraic decay.
        let r = integrate_cosine_tail(|u: f64| 1.0 / (1.0 + u * u), 1.5, 1e-12);
        let exact = 0.5 * PI * (-1.5f64).exp();
        assert!((r.value - exact).abs() < 1e-9, "{} vs {exact}", r.value);
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
    }
}
