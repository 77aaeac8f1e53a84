//! `compute`, `verify` and `thresholds`.

use std::f64::consts::PI;
use std::fmt::Display;

use rayon::prelude::*;

use poisson_sums::asymptotics::{r1_constant, r1_remainder_scale, Estimate};
use poisson_sums::kernel::{build_scaled_kernel, ScaledKernel};
use poisson_sums::norms::{exact_en, exact_en_p2, exact_nodes, ExactConfig, ExactErrorResult};
use poisson_sums::params::{
    n0_condition, n1_condition, n2_condition, threshold_n0, threshold_n1, threshold_n2,
};
use poisson_sums::special::{tail_estimate, tail_regime_start};
use poisson_sums::verification::{
    m_n_compute, norm_comparison, oscillatory_tail_bound, parseval_closure, q_n_asymptotic,
    r_n_residual, DeltaBounds, R_N_BOUND,
};
use poisson_sums::{ClassParams, Error, Exponent};

use crate::config::{RunConfig, Suite};
use crate::table::{Cell, Table};
use crate::{exit, CliError, Outcome};

fn class_params(cfg: &RunConfig) -> Result<ClassParams, CliError> {
    ClassParams::new(cfg.alpha, cfg.r, cfg.beta, cfg.p).map_err(|e| CliError::Config(e.to_string()))
}

fn exact_config(cfg: &RunConfig) -> ExactConfig {
    ExactConfig {
        eps: cfg.eps,
        nodes: None,
        tol: cfg.tol,
        check_doubling: true,
    }
}

fn sub_linear(cfg: &RunConfig) -> bool {
    cfg.r < 1.0
}

/// `n₂` is taken at `p = 1`, the exponent used by the decomposition bounds.
fn decomposition_threshold(params: &ClassParams) -> poisson_sums::Result<u64> {
    threshold_n2(&ClassParams {
        p: Exponent::ONE,
        ..*params
    })
}

// ---------------------------------------------------------------- thresholds

pub fn thresholds(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = class_params(cfg)?;
    if !sub_linear(cfg) {
        return Err(CliError::Config(format!(
            "thresholds need 0 < r < 1, got r = {}",
            cfg.r
        )));
    }
    let mut output = String::new();
    for (name, found) in [
        ("n0", threshold_n0(&params)),
        ("n1", threshold_n1(cfg.alpha, cfg.r)),
        ("n2", threshold_n2(&params)),
    ] {
        match found {
            Ok(v) => output.push_str(&format!("{name}={v}\n")),
            Err(Error::InfeasibleThreshold { ceiling, .. }) => {
                output.push_str(&format!("{name}=infeasible (beyond {ceiling})\n"))
            }
            Err(e) => return Err(CliError::Numerical(e.to_string())),
        }
    }
    Ok(Outcome {
        output,
        exit_code: exit::PASS,
        written_to: None,
    })
}

fn threshold_cell(found: poisson_sums::Result<u64>) -> Cell {
    match found {
        Ok(v) => Cell::Int(v),
        Err(Error::InfeasibleThreshold { .. }) => Cell::text("infeasible"),
        Err(_) => Cell::Empty,
    }
}

// ------------------------------------------------------------------- compute

pub const COMPUTE_COLUMNS: &[&str] = &[
    "n",
    "log_scale",
    "exact_scaled",
    "lambda_star",
    "nodes",
    "truncation",
    "doubling_gap",
    "exact_p2_scaled",
    "p2_relative_gap",
    "n0",
    "n1",
    "n2",
    "finite_window_main",
    "finite_window_gamma",
    "finite_window_gamma_bound",
    "finite_window_within_regime",
    "finite_window_status",
    "full_line_main",
    "full_line_gamma",
    "full_line_gamma_bound",
    "full_line_within_regime",
    "full_line_status",
    "logarithmic_main",
    "logarithmic_gamma",
    "logarithmic_gamma_bound",
    "logarithmic_within_regime",
    "logarithmic_status",
    "quadratic_main",
    "quadratic_gamma",
    "quadratic_gamma_bound",
    "quadratic_within_regime",
    "quadratic_status",
    "quadratic_refined_main",
    "quadratic_refined_gamma",
    "quadratic_refined_gamma_bound",
    "quadratic_refined_within_regime",
    "quadratic_refined_status",
    "r1_main",
    "r1_relative_deviation",
    "r1_bound",
    "r1_status",
    "status",
    "message",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum RowStatus {
    Ok,
    Fail,
    Error,
}

impl RowStatus {
    fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Fail => "fail",
            RowStatus::Error => "error",
        }
    }
}

fn exit_code_for(worst: RowStatus) -> i32 {
    match worst {
        RowStatus::Ok => exit::PASS,
        RowStatus::Fail => exit::FAIL,
        RowStatus::Error => exit::NON_CONVERGED,
    }
}

/// One row per `n`; numerical failures are reported in the row, not raised.
pub fn compute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = class_params(cfg)?;
    let thresholds = if sub_linear(cfg) {
        [
            threshold_cell(threshold_n0(&params)),
            threshold_cell(threshold_n1(cfg.alpha, cfg.r)),
            threshold_cell(threshold_n2(&params)),
        ]
    } else {
        [Cell::Empty, Cell::Empty, Cell::Empty]
    };
    let rows: Vec<(Vec<Cell>, RowStatus)> = cfg
        .n_list
        .par_iter()
        .map(|&n| compute_row(cfg, &params, n, &thresholds))
        .collect();
    let mut table = Table::new(COMPUTE_COLUMNS);
    let mut worst = RowStatus::Ok;
    for (row, status) in rows {
        worst = worst.max(status);
        table.push(row);
    }
    Ok(Outcome {
        output: table.render(cfg.format),
        exit_code: exit_code_for(worst),
        written_to: None,
    })
}

fn compute_row(
    cfg: &RunConfig,
    params: &ClassParams,
    n: u64,
    thresholds: &[Cell; 3],
) -> (Vec<Cell>, RowStatus) {
    let mut cells = vec![Cell::Int(n), Cell::Num(-cfg.alpha * (n as f64).powf(cfg.r))];
    let mut status = RowStatus::Ok;
    let mut messages: Vec<String> = Vec::new();

    let exact = exact_en(params, n, &exact_config(cfg));
    match &exact {
        Ok(e) => cells.extend([
            Cell::Num(e.scaled_value),
            Cell::Num(e.lambda_star),
            Cell::Int(e.nodes as u64),
            Cell::Int(e.truncation as u64),
            Cell::opt_num(e.doubling_gap),
        ]),
        Err(e) => {
            cells.extend(std::iter::repeat(Cell::Empty).take(5));
            status = RowStatus::Error;
            messages.push(format!("exact: {e}"));
        }
    }
    let exact = exact.ok();

    if cfg.p.value() == 2.0 {
        match exact_en_p2(cfg.alpha, cfg.r, n, cfg.eps) {
            Ok(v) => {
                let gap = exact.map(|e| (e.scaled_value - v).abs() / v);
                cells.extend([Cell::Num(v), Cell::opt_num(gap)]);
                if gap.is_some_and(|g| !(g <= cfg.tol)) {
                    status = status.max(RowStatus::Fail);
                    messages.push("quadrature and closed form differ by more than tol".into());
                }
            }
            Err(e) => {
                cells.extend([Cell::Empty, Cell::Empty]);
                status = RowStatus::Error;
                messages.push(format!("closed form: {e}"));
            }
        }
    } else {
        cells.extend([Cell::Empty, Cell::Empty]);
    }

    cells.extend(thresholds.iter().cloned());

    for est in Estimate::ALL {
        if !est.applies_to(cfg.p) || !sub_linear(cfg) {
            cells.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::text("n/a"),
            ]);
            continue;
        }
        let Some(e) = exact else {
            let main = est.main_term(params, n).ok().map(|m| m.main_scaled);
            cells.extend([
                Cell::opt_num(main),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::text("error"),
            ]);
            continue;
        };
        match est.assess(params, n, e.scaled_value) {
            Ok(rep) => {
                let verdict = if !rep.within_regime {
                    "skipped"
                } else if rep.gamma_within_bound() {
                    "pass"
                } else {
                    status = status.max(RowStatus::Fail);
                    messages.push(format!("{}: |gamma| exceeds its bound", est.name()));
                    "fail"
                };
                cells.extend([
                    Cell::Num(rep.main_term_scaled),
                    Cell::Num(rep.gamma),
                    Cell::Num(rep.gamma_bound),
                    Cell::Bool(rep.within_regime),
                    Cell::text(verdict),
                ]);
            }
            Err(err) => {
                status = RowStatus::Error;
                messages.push(format!("{}: {err}", est.name()));
                cells.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::text("error"),
                ]);
            }
        }
    }

    match (sub_linear(cfg), exact) {
        (true, _) => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::text("n/a")]),
        (false, None) => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::text("error")]),
        (false, Some(e)) => match r1_check(cfg, n, &e) {
            Ok((main, dev, bound)) => {
                let pass = dev <= bound;
                if !pass {
                    status = status.max(RowStatus::Fail);
                    messages.push("r = 1 closed form deviates beyond its remainder scale".into());
                }
                cells.extend([
                    Cell::Num(main),
                    Cell::Num(dev),
                    Cell::Num(bound),
                    Cell::text(if pass { "pass" } else { "fail" }),
                ]);
            }
            Err(err) => {
                status = RowStatus::Error;
                messages.push(format!("r = 1 closed form: {err}"));
                cells.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::text("error")]);
            }
        },
    }

    cells.push(Cell::text(status.name()));
    cells.push(if messages.is_empty() {
        Cell::Empty
    } else {
        Cell::text(messages.join("; "))
    });
    (cells, status)
}

/// Scaled `r = 1` main term, relative deviation of the exact value from it,
/// and the allowed deviation (ten remainder scales, at least `tol`).
fn r1_check(
    cfg: &RunConfig,
    n: u64,
    exact: &ExactErrorResult,
) -> poisson_sums::Result<(f64, f64, f64)> {
    let main = r1_constant(cfg.alpha, cfg.p)?;
    let dev = (exact.scaled_value - main).abs() / main;
    let bound = (10.0 * r1_remainder_scale(cfg.alpha, cfg.p, n)).max(cfg.tol);
    Ok((main, dev, bound))
}

// -------------------------------------------------------------------- verify

pub const VERIFY_COLUMNS: &[&str] = &[
    "suite", "check", "n", "detail", "value", "bound", "status", "message",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
struct Check {
    suite: Suite,
    name: String,
    n: Option<u64>,
    detail: String,
    value: Option<f64>,
    bound: Option<f64>,
    status: Status,
    message: String,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, n: Option<u64>) -> Self {
        Check {
            suite,
            name: name.into(),
            n,
            detail: String::new(),
            value: None,
            bound: None,
            status: Status::Skipped,
            message: String::new(),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    fn measured(mut self, value: f64, bound: Option<f64>, pass: bool) -> Self {
        self.value = Some(value);
        self.bound = bound;
        self.status = if pass { Status::Pass } else { Status::Fail };
        self
    }

    fn skipped(mut self, why: impl Into<String>) -> Self {
        self.status = Status::Skipped;
        self.message = why.into();
        self
    }

    /// Out-of-regime and not-applicable requests are skipped; anything else is an error.
    fn failed(mut self, err: &Error) -> Self {
        match err {
            Error::OutOfRegime(_) | Error::NotApplicable(_) => self.skipped(err.to_string()),
            _ => {
                self.status = Status::Error;
                self.message = err.to_string();
                self
            }
        }
    }

    fn error(mut self, err: impl Display) -> Self {
        self.status = Status::Error;
        self.message = err.to_string();
        self
    }

    fn row(self) -> Vec<Cell> {
        vec![
            Cell::text(self.suite.name()),
            Cell::Text(self.name),
            self.n.map_or(Cell::Empty, Cell::Int),
            Cell::Text(self.detail),
            Cell::opt_num(self.value),
            Cell::opt_num(self.bound),
            Cell::text(self.status.name()),
            if self.message.is_empty() {
                Cell::Empty
            } else {
                Cell::Text(self.message)
            },
        ]
    }
}

/// Pass/fail table; rows are grouped by `n` in ascending order.
pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = class_params(cfg)?;
    let mut checks = Vec::new();
    if cfg.suite.includes(Suite::Kernel) {
        checks.extend(threshold_checks(cfg, &params));
        checks.push(tail_theta_check());
    }
    if cfg.suite.includes(Suite::Lemmas) {
        checks.push(oscillatory_check());
    }
    let per_n: Vec<Vec<Check>> = cfg
        .n_list
        .par_iter()
        .map(|&n| checks_at(cfg, &params, n))
        .collect();
    checks.extend(per_n.into_iter().flatten());

    let mut table = Table::new(VERIFY_COLUMNS);
    let mut code = exit::PASS;
    for c in checks {
        code = match (code, c.status) {
            (_, Status::Error) => exit::NON_CONVERGED,
            (exit::PASS, Status::Fail) => exit::FAIL,
            (current, _) => current,
        };
        table.push(c.row());
    }
    Ok(Outcome {
        output: table.render(cfg.format),
        exit_code: code,
        written_to: None,
    })
}

fn checks_at(cfg: &RunConfig, params: &ClassParams, n: u64) -> Vec<Check> {
    let kernel = match build_scaled_kernel(cfg.alpha, cfg.r, n, cfg.eps) {
        Ok(k) => k,
        Err(e) => return vec![Check::new(Suite::Kernel, "kernel_build", Some(n)).failed(&e)],
    };
    let mut out = Vec::new();
    if cfg.suite.includes(Suite::Kernel) {
        out.extend(kernel_checks(&kernel));
    }
    if cfg.suite.includes(Suite::Decomposition) {
        out.extend(decomposition_checks(cfg, params, &kernel));
    }
    if cfg.suite.includes(Suite::Lemmas) {
        out.extend(lemma_checks(cfg, params, &kernel));
    }
    if cfg.suite.includes(Suite::Asymptotics) {
        out.extend(asymptotic_checks(cfg, params, n));
    }
    out
}

const FFT_AGREEMENT: f64 = 1e-12;
const PARSEVAL_TOL: f64 = 1e-8;

fn kernel_checks(kernel: &ScaledKernel) -> Vec<Check> {
    let n = Some(kernel.n);
    let mut out = Vec::new();

    let last = *kernel.coeffs.last().expect("kernel has coefficients");
    let decreasing = kernel.coeffs.windows(2).all(|w| w[1] < w[0]);
    out.push(
        Check::new(Suite::Kernel, "truncation", n)
            .detail(format!(
                "last kept coefficient below eps, K = {}",
                kernel.truncation()
            ))
            .measured(last, Some(kernel.eps), last < kernel.eps && decreasing),
    );

    let nodes = kernel.default_nodes();
    let fft = Check::new(Suite::Kernel, "fft_vs_direct", n);
    let lower = Check::new(Suite::Kernel, "real_part_floor", n);
    match kernel.grid_eval(nodes, 0.0) {
        Ok(grid) => {
            let sup = kernel.sup_norm();
            let err = (0..64)
                .map(|i| (i * (nodes / 64) + 7 * i) % nodes)
                .map(|j| (grid.values[j] - kernel.eval_direct(grid.node(j)).0).norm())
                .fold(0.0f64, f64::max)
                / sup;
            out.push(
                fft.detail(format!("max relative gap at 64 of {nodes} nodes"))
                    .measured(err, Some(FFT_AGREEMENT), err <= FFT_AGREEMENT),
            );
            let min_re = grid
                .values
                .iter()
                .map(|z| z.re)
                .fold(f64::INFINITY, f64::min);
            out.push(
                lower
                    .detail("minimum of the real part over the grid, at least 1/2")
                    .measured(min_re, Some(0.5), min_re >= 0.5 - 1e-12 * sup),
            );
        }
        Err(e) => {
            out.push(fft.failed(&e));
            out.push(lower.failed(&e));
        }
    }

    let c = Check::new(Suite::Kernel, "parseval_closure", n);
    out.push(match parseval_closure(kernel) {
        Ok(p) => c
            .detail("grid integral of |P|^2 against 2 pi sum of squared coefficients")
            .measured(
                p.relative_gap,
                Some(PARSEVAL_TOL),
                p.relative_gap <= PARSEVAL_TOL,
            ),
        Err(e) => c.failed(&e),
    });
    out
}

fn threshold_checks(cfg: &RunConfig, params: &ClassParams) -> Vec<Check> {
    let names = ["threshold_n0", "threshold_n1", "threshold_n2"];
    if !sub_linear(cfg) {
        return names
            .iter()
            .map(|c| Check::new(Suite::Kernel, *c, None).skipped("needs r < 1"))
            .collect();
    }
    let conds: [Box<dyn Fn(u64) -> bool + '_>; 3] = [
        Box::new(|n| n0_condition(params, n)),
        Box::new(|n| n1_condition(cfg.alpha, cfg.r, n)),
        Box::new(|n| n2_condition(params, n)),
    ];
    let found = [
        threshold_n0(params),
        threshold_n1(cfg.alpha, cfg.r),
        threshold_n2(params),
    ];
    names
        .iter()
        .zip(conds.iter().zip(found))
        .map(|(name, (cond, found))| {
            let c = Check::new(Suite::Kernel, *name, None);
            match found {
                Ok(t) => {
                    let minimal = cond(t) && (t == 1 || !cond(t - 1));
                    c.detail(format!("smallest n satisfying the condition is {t}"))
                        .measured(t as f64, None, minimal)
                }
                Err(Error::InfeasibleThreshold { ceiling, .. }) => {
                    c.skipped(format!("beyond the search ceiling {ceiling}"))
                }
                Err(e) => c.failed(&e),
            }
        })
        .collect()
}

fn tail_theta_check() -> Check {
    let c = Check::new(Suite::Kernel, "tail_theta", None);
    let mut worst = 0.0f64;
    let mut bound = f64::INFINITY;
    let mut count = 0;
    for gamma in [0.3, 1.0, 3.0] {
        for r in [0.15, 0.5, 0.85] {
            for delta in [0.0, 1.0] {
                for factor in [1.0, 2.0, 10.0] {
                    let m = tail_regime_start(gamma, r, delta) * factor;
                    match tail_estimate(gamma, r, delta, m) {
                        Ok(t) => {
                            worst = worst.max(t.theta.abs());
                            bound = t.theta_bound;
                            count += 1;
                        }
                        Err(e) => return c.failed(&e),
                    }
                }
            }
        }
    }
    c.detail(format!("largest |theta| over {count} tail integrals"))
        .measured(worst, Some(bound), worst <= bound)
}

fn oscillatory_check() -> Check {
    let c = Check::new(Suite::Lemmas, "oscillatory_tail_bound", None);
    let mut worst = 0.0f64;
    let mut all = true;
    let mut count = 0;
    for alpha in [0.1, 1.0, 2.0] {
        for r in [0.25, 0.5, 1.0] {
            for tau in [1.0, 4.0, 20.0] {
                for v in [-20.0, -0.5, 0.5, 3.0, 20.0] {
                    match oscillatory_tail_bound(alpha, r, tau, v) {
                        Ok(l) => {
                            worst = worst.max(l.value / l.bound);
                            all &= l.holds();
                            count += 1;
                        }
                        Err(e) => return c.failed(&e),
                    }
                }
            }
        }
    }
    c.detail(format!(
        "largest integral-to-bound ratio over {count} samples"
    ))
    .measured(worst, Some(1.0), all)
}

const DECOMPOSITION_T: [f64; 9] = [0.0, 0.1, -0.1, 1.0, -1.0, PI / 2.0, -PI / 2.0, PI, -PI];

fn decomposition_checks(
    cfg: &RunConfig,
    params: &ClassParams,
    kernel: &ScaledKernel,
) -> Vec<Check> {
    let n = Some(kernel.n);
    let names = ["q_n_positive", "q_n_band", "r_n_bound"];
    let skip_all = |why: String| -> Vec<Check> {
        DECOMPOSITION_T
            .iter()
            .flat_map(|t| {
                let why = why.clone();
                names.iter().map(move |c| {
                    Check::new(Suite::Decomposition, *c, n)
                        .detail(format!("t = {t:.6}"))
                        .skipped(why.clone())
                })
            })
            .collect()
    };
    if !sub_linear(cfg) {
        return skip_all("needs r < 1".into());
    }
    match decomposition_threshold(params) {
        Ok(n2) if kernel.n >= n2 => {}
        Ok(n2) => return skip_all(format!("n below n2 = {n2}")),
        Err(e) => return skip_all(e.to_string()),
    }
    DECOMPOSITION_T
        .par_iter()
        .map(|&t| {
            let detail = format!("t = {t:.6}");
            let mk = |c: &str| Check::new(Suite::Decomposition, c, n).detail(detail.clone());
            let sample = r_n_residual(kernel, t);
            let band = q_n_asymptotic(cfg.alpha, cfg.r, kernel.n, t);
            match (sample, band) {
                (Ok(s), Ok(b)) => vec![
                    mk(names[0]).measured(s.q_n, None, s.q_n > 0.0),
                    mk(names[1])
                        .detail(format!("{detail}, band [{:.6e}, {:.6e}]", b.lower, b.upper))
                        .measured(s.q_n, Some(b.upper), s.q_n >= b.lower && s.q_n <= b.upper),
                    mk(names[2]).measured(
                        s.r_n,
                        Some(R_N_BOUND),
                        s.r_n > 0.0 && s.r_n <= R_N_BOUND,
                    ),
                ],
                (Err(e), _) | (_, Err(e)) => names.iter().map(|c| mk(c).failed(&e)).collect(),
            }
        })
        .flatten()
        .collect()
}

fn lemma_checks(cfg: &RunConfig, params: &ClassParams, kernel: &ScaledKernel) -> Vec<Check> {
    let n = Some(kernel.n);
    let mut out = Vec::new();

    let c = Check::new(Suite::Lemmas, "log_derivative_bound", n);
    out.push(if !sub_linear(cfg) {
        c.skipped("needs r < 1")
    } else {
        match decomposition_threshold(params) {
            Ok(n2) if kernel.n < n2 => c.skipped(format!("n below n2 = {n2}")),
            Err(e) => c.failed(&e),
            Ok(_) => match m_n_compute(kernel) {
                Ok(m) => c
                    .detail(format!("sup |E'|/|E| at t = {:.6}", m.argmax))
                    .measured(m.m_n, Some(m.bound), m.m_n <= m.bound),
                Err(e) => c.failed(&e),
            },
        }
    });

    let nodes = exact_nodes(kernel);
    let phase = -cfg.beta * PI / 2.0;
    let per_s: Vec<Vec<Check>> = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY]
        .par_iter()
        .map(|&s| {
            let order = Check::new(Suite::Lemmas, "norm_ordering", n).detail(format!("s = {s}"));
            let deltas = Check::new(Suite::Lemmas, "norm_deltas", n).detail(format!("s = {s}"));
            match norm_comparison(kernel, phase, kernel.n, s, nodes) {
                Ok(rep) => {
                    let order = order
                        .detail(format!(
                            "s = {s}: shift difference <= best constant <= norm"
                        ))
                        .measured(rep.best_const_phi, Some(rep.norm_phi), rep.ordered());
                    let deltas = if !rep.within_regime {
                        deltas.skipped(format!("n < 4 pi s M_n with M_n = {:.6}", rep.m))
                    } else {
                        let b = DeltaBounds::refined(s);
                        let worst = rep
                            .deltas
                            .iter()
                            .flatten()
                            .fold(0.0f64, |a, d| a.max(d.abs()));
                        let shown: Vec<String> = rep
                            .deltas
                            .iter()
                            .map(|d| d.map_or("undefined".into(), |d| format!("{d:.6}")))
                            .collect();
                        deltas
                            .detail(format!("s = {s}: deltas {}", shown.join(" ")))
                            .measured(worst, Some(b.first.1), rep.deltas_within(&b))
                    };
                    vec![order, deltas]
                }
                Err(e) => vec![order.failed(&e), deltas.failed(&e)],
            }
        })
        .collect();
    out.extend(per_s.into_iter().flatten());
    out
}

fn asymptotic_checks(cfg: &RunConfig, params: &ClassParams, n: u64) -> Vec<Check> {
    let exact = match exact_en(params, n, &exact_config(cfg)) {
        Ok(e) => e,
        Err(e) => return vec![Check::new(Suite::Asymptotics, "exact_value", Some(n)).failed(&e)],
    };
    let mut out = Vec::new();
    if sub_linear(cfg) {
        for est in Estimate::ALL.into_iter().filter(|e| e.applies_to(cfg.p)) {
            let c = Check::new(Suite::Asymptotics, format!("gamma_{}", est.name()), Some(n));
            out.push(match est.assess(params, n, exact.scaled_value) {
                Ok(rep) if !rep.within_regime => c.skipped("n below the estimate's threshold"),
                Ok(rep) => c
                    .detail(format!(
                        "exact {:.12e} against main term {:.12e}",
                        rep.exact_scaled, rep.main_term_scaled
                    ))
                    .measured(rep.gamma, Some(rep.gamma_bound), rep.gamma_within_bound()),
                Err(e) => c.failed(&e),
            });
        }
    } else {
        let c = Check::new(Suite::Asymptotics, "r1_closed_form", Some(n));
        out.push(match r1_check(cfg, n, &exact) {
            Ok((main, dev, bound)) => c
                .detail(format!("relative deviation from {main:.12e}"))
                .measured(dev, Some(bound), dev <= bound),
            Err(e) => c.failed(&e),
        });
    }
    if cfg.p.value() == 2.0 {
        let c = Check::new(Suite::Asymptotics, "p2_closed_form", Some(n));
        out.push(match exact_en_p2(cfg.alpha, cfg.r, n, cfg.eps) {
            Ok(v) => {
                let gap = (exact.scaled_value - v).abs() / v;
                c.detail("quadrature against the coefficient-sum closed form")
                    .measured(gap, Some(cfg.tol), gap <= cfg.tol)
            }
            Err(e) => c.error(e),
        });
    }
    out
}
