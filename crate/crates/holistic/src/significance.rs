//! Asymptotic-normality significance machinery: the test statistic, the
//! acceptance threshold, the lazy significance constraints with pattern
//! gating, and a bootstrap evaluator used for reporting.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::mc::Cut;
use crate::mip::{GatedSignificance, Incumbent, LazyResponse, MioProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignificanceParams {
    pub alpha: f64,
    /// Standard-normal quantile at 1 - alpha/2.
    pub n_sign: f64,
    /// Gate constant making frozen pairs vacuous off their pattern.
    pub gate_big_m: f64,
}

impl SignificanceParams {
    pub fn new(alpha: f64, gate_big_m: f64) -> Result<SignificanceParams> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} outside (0,1)")));
        }
        let n_sign = linalg::normal_quantile(1.0 - alpha / 2.0)?;
        if gate_big_m < n_sign {
            return Err(Error::Parameter("gate_big_m must be at least n_sign".into()));
        }
        Ok(SignificanceParams { alpha, n_sign, gate_big_m })
    }

    /// Gate constant sized from the data: the threshold plus the largest
    /// statistic magnitude seen at a full ridge fit, plus one.
    pub fn with_default_gate(alpha: f64, x: &Matrix, y: &[f64]) -> Result<SignificanceParams> {
        let n_sign = linalg::normal_quantile(1.0 - alpha / 2.0)?;
        let (n, p) = (x.rows(), x.cols());
        let mut a = x.gram();
        let trace: f64 = (0..p).map(|j| a.get(j, j)).sum();
        let ridge = 1e-6 * trace / p as f64;
        for j in 0..p {
            a.set(j, j, a.get(j, j) + ridge);
        }
        let q = x.t_matvec(y);
        let beta = match linalg::cholesky(&a, 1e-14) {
            Some(l) => linalg::cholesky_solve(&l, &q),
            None => vec![0.0; p],
        };
        let fitted = x.matvec(&beta);
        let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
        let dof = n.saturating_sub(p).max(1);
        let sigma = (rss / dof as f64).sqrt();
        let mut max_stat = 0.0f64;
        if sigma > 0.0 {
            if let Ok(diag) = linalg::sym_inverse_diag(&a) {
                for j in 0..p {
                    if diag[j] > 0.0 {
                        max_stat = max_stat.max(beta[j].abs() / (sigma * diag[j].sqrt()));
                    }
                }
            }
        }
        SignificanceParams::new(alpha, n_sign + max_stat + 1.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignificanceReport {
    /// Statistic per selected column, in support order.
    pub stats: Vec<f64>,
    /// verdict_j = |stat_j| >= n_sign.
    pub verdicts: Vec<bool>,
    pub sigma: f64,
    pub selected: usize,
}

/// Test statistic for column j of Xz at the null beta_j = 0:
/// beta_hat_j / (sigma~ * sqrt((Xz^T Xz)^{-1}_jj)).
pub fn n_stat(j: usize, beta_hat: &[f64], xz: &Matrix, y: &[f64]) -> Result<f64> {
    if j >= xz.cols() || beta_hat.len() != xz.cols() {
        return Err(Error::Structure("n_stat: index or beta length out of range".into()));
    }
    let sigma = linalg::sigma_tilde(xz, y)?;
    let diag = linalg::sym_inverse_diag(&xz.gram())?;
    let denom = (sigma * diag[j].sqrt()).max(f64::MIN_POSITIVE);
    Ok(beta_hat[j] / denom)
}

/// Least-squares refit on the selected columns plus per-column statistics.
pub fn significance_report(
    x: &Matrix,
    y: &[f64],
    support: &[usize],
    params: &SignificanceParams,
) -> Result<SignificanceReport> {
    let xs = x.select_columns(support);
    let sigma = linalg::sigma_tilde(&xs, y)?;
    let diag = linalg::sym_inverse_diag(&xs.gram())?;
    let beta = linalg::least_squares(&xs, y)?;
    let stats: Vec<f64> = (0..support.len())
        .map(|i| beta[i] / (sigma * diag[i].sqrt()).max(f64::MIN_POSITIVE))
        .collect();
    let verdicts = stats.iter().map(|s| s.abs() >= params.n_sign).collect();
    Ok(SignificanceReport { stats, verdicts, sigma, selected: support.len() })
}

/// Lazy-callback body: accept the incumbent, or return the frozen pair for
/// each insignificant variable plus a no-good cut on the pattern. A singular
/// or untestable selected set is rejected with the cut alone.
pub fn significance_callback(
    inc: &Incumbent,
    x: &Matrix,
    y: &[f64],
    params: &SignificanceParams,
) -> Result<LazyResponse> {
    let support = inc.support();
    if support.is_empty() {
        return Ok(LazyResponse::Accept);
    }
    let no_good = Cut { indices: support.clone(), rhs: support.len() - 1 };
    let report = match significance_report(x, y, &support, params) {
        Ok(r) => r,
        Err(Error::Singular { .. }) | Err(Error::DegreesOfFreedom { .. }) => {
            return Ok(LazyResponse::Reject { cuts: vec![no_good], gated: vec![] });
        }
        Err(e) => return Err(e),
    };
    if report.verdicts.iter().all(|&v| v) {
        return Ok(LazyResponse::Accept);
    }
    let xs = x.select_columns(&support);
    let diag = linalg::sym_inverse_diag(&xs.gram())?;
    let terms: Vec<(usize, f64)> = support
        .iter()
        .enumerate()
        .filter(|&(i, _)| !report.verdicts[i])
        .map(|(i, &j)| (j, (report.sigma * diag[i].sqrt()).max(f64::MIN_POSITIVE)))
        .collect();
    let gated = GatedSignificance {
        pattern: support,
        terms,
        n_sign: params.n_sign,
        gate_big_m: params.gate_big_m,
    };
    Ok(LazyResponse::Reject { cuts: vec![no_good], gated: vec![gated] })
}

/// Adapter: closure shape the engine expects.
pub fn make_callback<'a>(
    x: &'a Matrix,
    y: &'a [f64],
    params: SignificanceParams,
) -> impl FnMut(&Incumbent, &MioProblem) -> Result<LazyResponse> + 'a {
    move |inc, _prob| significance_callback(inc, x, y, &params)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// 100 * (significant count) / |S|.
    pub percent: f64,
    pub significant: Vec<bool>,
    /// Percentile interval per selected column.
    pub intervals: Vec<(f64, f64)>,
    /// Resamples dropped because the resampled design was singular.
    pub skipped: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let pos = q * (m - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Percentile-bootstrap significance of the selected set, deterministic per
/// seed; per-resample generators are derived from the master seed so the
/// resamples stay independent of evaluation order.
pub fn bootstrap_significance(
    x: &Matrix,
    y: &[f64],
    support: &[usize],
    b: usize,
    alpha: f64,
    seed: u64,
) -> Result<BootstrapOutcome> {
    if b < 100 {
        return Err(Error::Parameter("bootstrap requires B >= 100".into()));
    }
    if support.is_empty() {
        return Err(Error::Parameter("bootstrap requires a nonempty selected set".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} outside (0,1)")));
    }
    let xs = x.select_columns(support);
    let n = xs.rows();
    let k = support.len();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let sub_seeds: Vec<u64> = (0..b).map(|_| master.gen()).collect();
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(b); k];
    let mut skipped = 0usize;
    for s in sub_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let xb = xs.select_rows(&idx);
        let yb: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        match linalg::least_squares(&xb, &yb) {
            Ok(beta) => {
                for (d, bj) in draws.iter_mut().zip(&beta) {
                    d.push(*bj);
                }
            }
            Err(Error::Singular { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if draws[0].is_empty() {
        return Err(Error::Singular {
            context: "bootstrap_significance: every resample singular".into(),
            cond: f64::INFINITY,
        });
    }
    let mut intervals = Vec::with_capacity(k);
    let mut significant = Vec::with_capacity(k);
    for d in draws.iter_mut() {
        d.sort_by(f64::total_cmp);
        let lo = quantile(d, alpha / 2.0);
        let hi = quantile(d, 1.0 - alpha / 2.0);
        significant.push(lo > 0.0 || hi < 0.0);
        intervals.push((lo, hi));
    }
    let count = significant.iter().filter(|&&s| s).count();
    Ok(BootstrapOutcome {
        percent: 100.0 * count as f64 / k as f64,
        significant,
        intervals,
        skipped,
    })
}
