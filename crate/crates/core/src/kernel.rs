//! The kernel `P^{(n)}(t) = Σ_{k≥n} e^{-αk^r} cos(kt − βπ/2)` in scaled form.
//!
//! Coefficients are stored as `c_k = e^{-α((k+n)^r − n^r)}`, so `c_0 = 1` and
//! `e^{αn^r} P^{(n)}(t) = Re[𝒫(t) e^{i(nt − βπ/2)}]` with `𝒫 = Σ c_k e^{ikt}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::quad::compensated_sum;
use crate::special::tail_integral;

/// Default relative truncation level.
pub const DEFAULT_EPS: f64 = 1e-16;
/// Default cap on the number of stored coefficients.
pub const DEFAULT_CAP: usize = 1 << 26;

/// `(k+n)^r − n^r` without cancellation.
pub fn exponent_gap(n: f64, k: f64, r: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    n.powf(r) * (r * (k / n).ln_1p()).exp_m1()
}

/// Truncated scaled coefficient sequence of `P^{(n)}`.
#[derive(Debug, Clone)]
pub struct ScaledKernel {
    pub alpha: f64,
    pub r: f64,
    pub n: u64,
    pub eps: f64,
    pub coeffs: Vec<f64>,
}

/// Samples on the grid `t_j = −π + shift + 2πj/N`.
#[derive(Debug, Clone)]
pub struct GridSamples<T> {
    pub values: Vec<T>,
    pub shift: f64,
}

impl<T> GridSamples<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, j: usize) -> f64 {
        grid_node(self.values.len(), self.shift, j)
    }
}

pub(crate) fn grid_node(nodes: usize, shift: f64, j: usize) -> f64 {
    -PI + shift + 2.0 * PI * j as f64 / nodes as f64
}

/// Builds the truncated scaled kernel with [`DEFAULT_CAP`].
pub fn build_scaled_kernel(alpha: f64, r: f64, n: u64, eps: f64) -> Result<ScaledKernel> {
    ScaledKernel::build_with_cap(alpha, r, n, eps, DEFAULT_CAP)
}

impl ScaledKernel {
    /// Keeps coefficients up to the first `K` with `c_K < eps` whose tail
    /// bound `c_K·e^{α(n+K)^r}∫_{n+K}^∞ e^{-αt^r}dt` is below `eps·Σ c_k`.
    pub fn build_with_cap(alpha: f64, r: f64, n: u64, eps: f64, cap: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid(format!("r must lie in (0, 1], got {r}")));
        }
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!(
                "truncation eps must lie in (0, 1), got {eps}"
            )));
        }
        let nf = n as f64;
        let mut coeffs = vec![1.0];
        let mut sum = 1.0;
        let mut check_below = eps;
        loop {
            let k = coeffs.len();
            if k >= cap {
                return Err(Error::TruncationCap { cap });
            }
            let c = (-alpha * exponent_gap(nf, k as f64, r)).exp();
            coeffs.push(c);
            sum += c;
            if c < check_below {
                let tail = tail_integral(alpha, r, 0.0, nf + k as f64)?;
                if c * tail.scaled <= eps * sum {
                    break;
                }
                check_below *= 0.1;
            }
        }
        Ok(ScaledKernel {
            alpha,
            r,
            n,
            eps,
            coeffs,
        })
    }

    /// Index `K` of the last stored coefficient.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `‖𝒫‖_∞ = Σ c_k`, attained at `t = 0`.
    pub fn sup_norm(&self) -> f64 {
        compensated_sum(self.coeffs.iter().copied())
    }

    /// `Σ c_k²`.
    pub fn sum_of_squares(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c * c))
    }

    /// Smallest power-of-two grid resolving the kernel.
    pub fn default_nodes(&self) -> usize {
        let nf = self.n as f64;
        let decay = self.alpha * self.r * nf.powf(self.r - 1.0);
        let per_decay = 64.0 * (1.0 / decay).ceil();
        let need = (4 * self.coeffs.len())
            .max(4096)
            .max(per_decay.min(1e15) as usize);
        need.next_power_of_two()
    }

    fn check_nodes(&self, nodes: usize) -> Result<()> {
        if !nodes.is_power_of_two() {
            return Err(Error::GridSize {
                nodes,
                reason: "not a power of two".into(),
            });
        }
        let min = (4 * self.coeffs.len()).max(4096);
        if nodes < min {
            return Err(Error::GridSize {
                nodes,
                reason: format!("at least {min} nodes are needed"),
            });
        }
        Ok(())
    }

    /// `∂^d 𝒫` on the grid `t_j = −π + shift + 2πj/N` by one inverse FFT.
    pub fn grid_eval_derivative(
        &self,
        nodes: usize,
        shift: f64,
        order: u32,
    ) -> Result<GridSamples<Complex64>> {
        self.check_nodes(nodes)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); nodes];
        for (k, &c) in self.coeffs.iter().enumerate() {
            // e^{ik(−π + shift)} = (−1)^k e^{ik·shift}
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let phase = Complex64::from_polar(sign * c, k as f64 * shift);
            let factor = Complex64::new(0.0, k as f64).powu(order);
            buf[k % nodes] += phase * factor;
        }
        FftPlanner::new().plan_fft_inverse(nodes).process(&mut buf);
        Ok(GridSamples { values: buf, shift })
    }

    /// `𝒫 = g − ih` on the grid.
    pub fn grid_eval(&self, nodes: usize, shift: f64) -> Result<GridSamples<Complex64>> {
        self.grid_eval_derivative(nodes, shift, 0)
    }

    /// `𝒫′` on the grid.
    pub fn derivative_grid_eval(&self, nodes: usize, shift: f64) -> Result<GridSamples<Complex64>> {
        self.grid_eval_derivative(nodes, shift, 1)
    }

    /// `e^{αn^r}P^{(n)}` on the unshifted grid.
    pub fn real_grid_eval(&self, nodes: usize, beta: f64) -> Result<GridSamples<f64>> {
        let env = self.grid_eval(nodes, 0.0)?;
        let values = env
            .values
            .iter()
            .enumerate()
            .map(|(j, e)| (*e * carrier(self.n, nodes, j, 0.0, beta)).re)
            .collect();
        Ok(GridSamples { values, shift: 0.0 })
    }

    /// `(𝒫(t), 𝒫′(t))` by direct summation.
    pub fn eval_direct(&self, t: f64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let e = Complex64::from_polar(c, k as f64 * t);
            v += e;
            d += e * Complex64::new(0.0, k as f64);
        }
        (v, d)
    }

    /// `e^{αn^r}P^{(n)}(t)` by direct summation of cosines.
    pub fn real_form(&self, beta: f64, t: f64) -> f64 {
        let shift = beta * PI / 2.0;
        compensated_sum(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * ((k as f64 + self.n as f64) * t - shift).cos()),
        )
    }
}

/// `e^{i(n t_j + n·offset − βπ/2)}` at grid node `t_j = −π + 2πj/N`, with
/// the integer part of the phase reduced exactly.
pub(crate) fn carrier(n: u64, nodes: usize, j: usize, offset: f64, beta: f64) -> Complex64 {
    let n_mod = (n % nodes as u64) as u128;
    let turns = (n_mod * j as u128 % nodes as u128) as f64 / nodes as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let angle = 2.0 * PI * turns + n as f64 * offset - beta * PI / 2.0;
    Complex64::from_polar(sign, angle)
}
