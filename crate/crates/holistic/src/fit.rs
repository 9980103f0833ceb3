//! End-to-end orchestration: detect multicollinearity on the training
//! design, assemble the constrained subset-selection model, solve with the
//! significance callback, tune on a 60/20/20 split, and compute the
//! evaluation metrics. Also hosts the Lasso and cutting-plane baselines.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::mc::{self, Cut, MulticollinearRelation, SmallEigenSpace};
use crate::mip::{self, Limits, MioProblem, SolveStatus};
use crate::significance::{self, SignificanceParams};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_RHO: f64 = 0.8;
pub const DEFAULT_EPSILON: f64 = 1e-2;
pub const DEFAULT_DELTA: f64 = 1e-6;
pub const DEFAULT_COND_LIMIT: f64 = 100.0;
pub const BOOTSTRAP_B: usize = 1000;
const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct HolisticProblem {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub gamma_grid: Vec<f64>,
    pub alpha: f64,
    /// Pairwise-correlation cutoff for the exclusion pairs.
    pub rho: f64,
    /// Small-eigenvalue threshold for detection.
    pub epsilon: f64,
    /// Support-size threshold below which a relation is discarded.
    pub delta: f64,
    pub groups: Vec<Vec<usize>>,
    pub intercept: bool,
    pub standardize: bool,
    pub seed: u64,
    pub limits: Limits,
}

/// Default Gamma grid: {0, 0.01, 0.1, 1, 10} * ||X^T y||_inf / n.
pub fn default_gamma_grid(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let scale = x
        .t_matvec(y)
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        / x.rows() as f64;
    [0.0, 0.01, 0.1, 1.0, 10.0].iter().map(|c| c * scale).collect()
}

impl HolisticProblem {
    pub fn new(x: Matrix, y: Vec<f64>) -> Result<HolisticProblem> {
        if y.len() != x.rows() {
            return Err(Error::Structure("y length must match X rows".into()));
        }
        let p = x.cols();
        let k_grid = (1..=p.min(15)).collect();
        let gamma_grid = default_gamma_grid(&x, &y);
        Ok(HolisticProblem {
            x,
            y,
            k_grid,
            gamma_grid,
            alpha: DEFAULT_ALPHA,
            rho: DEFAULT_RHO,
            epsilon: DEFAULT_EPSILON,
            delta: DEFAULT_DELTA,
            groups: Vec::new(),
            intercept: false,
            standardize: false,
            seed: 0,
            limits: Limits::default(),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.k_grid.is_empty() || self.gamma_grid.is_empty() {
            return Err(Error::Parameter("k and gamma grids must be nonempty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha = {} outside (0,1)", self.alpha)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::Parameter(format!("rho = {} outside (0,1]", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub beta: Vec<f64>,
    pub intercept: Option<f64>,
    pub z: Vec<bool>,
    pub chosen_k: usize,
    pub chosen_gamma: f64,
    pub train_mse: f64,
    pub test_mse: Option<f64>,
    /// Bootstrap percent significant; None for the empty model.
    pub significance_percent: Option<f64>,
    /// None when the training design has no small-eigenvalue space.
    pub ma_percent: Option<f64>,
    pub status: SolveStatus,
    pub relations: Vec<MulticollinearRelation>,
    pub cuts: Vec<Cut>,
    pub solves: usize,
    pub lazy_rounds: usize,
    pub detect_time_secs: f64,
    pub total_time_secs: f64,
}

impl FitResult {
    pub fn support(&self) -> Vec<usize> {
        self.z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

// --- data preparation ------------------------------------------------------

/// Column transform: optional centering (intercept) and unit-scale columns
/// (standardize). Coefficients are mapped back to the original scale.
struct Prepared {
    x: Matrix,
    y: Vec<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
    scale: Vec<f64>,
    intercept: bool,
}

fn prepare(x: &Matrix, y: &[f64], intercept: bool, standardize: bool) -> Result<Prepared> {
    let (n, p) = (x.rows(), x.cols());
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let mut x_mean = vec![0.0; p];
    let mut y_mean = 0.0;
    let mut yt = y.to_vec();
    if intercept {
        for (j, c) in cols.iter_mut().enumerate() {
            let m = c.iter().sum::<f64>() / n as f64;
            x_mean[j] = m;
            for v in c.iter_mut() {
                *v -= m;
            }
        }
        y_mean = yt.iter().sum::<f64>() / n as f64;
        for v in yt.iter_mut() {
            *v -= y_mean;
        }
    }
    let mut scale = vec![1.0; p];
    if standardize {
        for (j, c) in cols.iter_mut().enumerate() {
            let m = c.iter().sum::<f64>() / n as f64;
            let var = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
            if var <= 0.0 {
                return Err(Error::ZeroVariance);
            }
            let s = var.sqrt();
            scale[j] = s;
            for v in c.iter_mut() {
                *v /= s;
            }
        }
    }
    Ok(Prepared {
        x: Matrix::from_columns(&cols)?,
        y: yt,
        x_mean,
        y_mean,
        scale,
        intercept,
    })
}

impl Prepared {
    /// Map a coefficient vector on the transformed design back to the
    /// original scale, with the implied intercept.
    fn original(&self, beta_t: &[f64]) -> (Vec<f64>, Option<f64>) {
        let beta: Vec<f64> = beta_t.iter().zip(&self.scale).map(|(b, s)| b / s).collect();
        if self.intercept {
            let shift: f64 = beta.iter().zip(&self.x_mean).map(|(b, m)| b * m).sum();
            (beta, Some(self.y_mean - shift))
        } else {
            (beta, None)
        }
    }
}

/// Mean squared prediction error on raw data.
pub fn mse(x: &Matrix, y: &[f64], beta: &[f64], intercept: Option<f64>) -> f64 {
    let fitted = x.matvec(beta);
    let b0 = intercept.unwrap_or(0.0);
    y.iter()
        .zip(&fitted)
        .map(|(yi, fi)| (yi - fi - b0) * (yi - fi - b0))
        .sum::<f64>()
        / y.len() as f64
}

/// Big-M from a ridge-regularized full fit: 2 * ||beta_ridge||_inf, floored.
pub fn big_m_from_ridge(x: &Matrix, y: &[f64]) -> Result<f64> {
    let p = x.cols();
    let mut a = x.gram();
    let trace: f64 = (0..p).map(|j| a.get(j, j)).sum();
    let ridge = (1e-6 * trace / p as f64).max(1e-12);
    for j in 0..p {
        a.set(j, j, a.get(j, j) + ridge);
    }
    let q = x.t_matvec(y);
    let l = linalg::cholesky(&a, 1e-300).ok_or(Error::Singular {
        context: "big_m_from_ridge".into(),
        cond: f64::INFINITY,
    })?;
    let beta = linalg::cholesky_solve(&l, &q);
    let m = 2.0 * beta.iter().map(|b| b.abs()).fold(0.0f64, f64::max);
    Ok(m.max(1e-6))
}

/// Exclusion pairs from pairwise correlation at cutoff rho.
pub fn hc_pairs(x: &Matrix, rho: f64) -> Result<Vec<(usize, usize)>> {
    let p = x.cols();
    let cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let mut pairs = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if linalg::pairwise_corr(&cols[i], &cols[j])?.abs() >= rho {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Multicollinearity Accuracy: 100 * (1 - dim(V_z)/dim(V)); None when the
/// full design has no small-eigenvalue space.
pub fn ma_metric(v: &SmallEigenSpace, z: &[bool], x: &Matrix) -> Result<Option<f64>> {
    if v.dim() == 0 {
        return Ok(None);
    }
    let selected: Vec<usize> =
        z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    let dim_vz = if selected.is_empty() {
        0
    } else {
        let xz = x.select_columns(&selected);
        mc::small_eigenvectors(&xz, v.epsilon, false)?.dim()
    };
    Ok(Some(100.0 * (1.0 - dim_vz as f64 / v.dim() as f64)))
}

// --- fit -------------------------------------------------------------------

/// Detection artifacts shared across grid points.
struct DetectContext {
    v: SmallEigenSpace,
    relations: Vec<MulticollinearRelation>,
    cuts: Vec<Cut>,
    hc: Vec<(usize, usize)>,
    big_m: f64,
    params: SignificanceParams,
    detect_time_secs: f64,
}

fn build_context(prob: &HolisticProblem, prep: &Prepared) -> Result<DetectContext> {
    let t0 = Instant::now();
    let v = mc::small_eigenvectors(&prep.x, prob.epsilon, false)?;
    let relations = if v.dim() > 0 { mc::iterative_mc(&v, prob.delta)? } else { Vec::new() };
    let cuts = relations.iter().map(mc::emit_cut).collect::<Result<Vec<_>>>()?;
    let detect_time_secs = t0.elapsed().as_secs_f64();
    let hc = hc_pairs(&prep.x, prob.rho)?;
    let big_m = big_m_from_ridge(&prep.x, &prep.y)?;
    let params = SignificanceParams::with_default_gate(prob.alpha, &prep.x, &prep.y)?;
    Ok(DetectContext { v, relations, cuts, hc, big_m, params, detect_time_secs })
}

fn fit_prepared(
    prob: &HolisticProblem,
    prep: &Prepared,
    ctx: &DetectContext,
    k: usize,
    gamma: f64,
) -> Result<FitResult> {
    let t0 = Instant::now();
    let p = prep.x.cols();
    let mut mio = MioProblem::new(
        prep.x.clone(),
        prep.y.clone(),
        gamma,
        vec![ctx.big_m; p],
        k,
    )?;
    mio.groups = prob.groups.clone();
    mio.exclusions = ctx.hc.clone();
    mio.cuts = ctx.cuts.clone();
    let mut cb = significance::make_callback(&prep.x, &prep.y, ctx.params.clone());
    let outcome = mip::solve(&mio, &prob.limits, Some(&mut cb))?;

    let (beta_t, z) = match &outcome.incumbent {
        Some(inc) => (inc.beta.clone(), inc.z.clone()),
        None => (vec![0.0; p], vec![false; p]),
    };
    let (beta, intercept) = prep.original(&beta_t);
    let support: Vec<usize> =
        z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    let significance_percent = if support.is_empty() {
        None
    } else {
        Some(
            significance::bootstrap_significance(
                &prep.x,
                &prep.y,
                &support,
                BOOTSTRAP_B,
                prob.alpha,
                prob.seed,
            )?
            .percent,
        )
    };
    let ma_percent = ma_metric(&ctx.v, &z, &prep.x)?;
    let train_mse = mse(&prep.x, &prep.y, &beta_t, None);
    Ok(FitResult {
        beta,
        intercept,
        z,
        chosen_k: k,
        chosen_gamma: gamma,
        train_mse,
        test_mse: None,
        significance_percent,
        ma_percent,
        status: outcome.status,
        relations: ctx.relations.clone(),
        cuts: outcome.cuts,
        solves: 1,
        lazy_rounds: outcome.lazy_rounds,
        detect_time_secs: ctx.detect_time_secs,
        total_time_secs: t0.elapsed().as_secs_f64() + ctx.detect_time_secs,
    })
}

/// Single fit at fixed (k, gamma) on the full provided data.
pub fn fit(prob: &HolisticProblem, k: usize, gamma: f64) -> Result<FitResult> {
    prob.validate()?;
    let prep = prepare(&prob.x, &prob.y, prob.intercept, prob.standardize)?;
    let ctx = build_context(prob, &prep)?;
    fit_prepared(prob, &prep, &ctx, k, gamma)
}

fn split_indices(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let n_test = n / 5;
    let n_val = n / 5;
    let n_train = n - n_val - n_test;
    let train = idx[..n_train].to_vec();
    let val = idx[n_train..n_train + n_val].to_vec();
    let test = idx[n_train + n_val..].to_vec();
    (train, val, test)
}

/// Grid search over (k, Gamma) on a deterministic 60/20/20 split; the test
/// rows are scored exactly once, at the winner.
pub fn tune(prob: &HolisticProblem) -> Result<FitResult> {
    prob.validate()?;
    let n = prob.x.rows();
    if n < 10 {
        return Err(Error::Parameter("tune requires n >= 10".into()));
    }
    let (train, val, test) = split_indices(n, prob.seed);
    let x_train = prob.x.select_rows(&train);
    let y_train: Vec<f64> = train.iter().map(|&i| prob.y[i]).collect();
    let x_val = prob.x.select_rows(&val);
    let y_val: Vec<f64> = val.iter().map(|&i| prob.y[i]).collect();
    let x_test = prob.x.select_rows(&test);
    let y_test: Vec<f64> = test.iter().map(|&i| prob.y[i]).collect();

    let sub = HolisticProblem { x: x_train.clone(), y: y_train.clone(), ..prob.clone() };
    let prep = prepare(&x_train, &y_train, prob.intercept, prob.standardize)?;
    let ctx = build_context(&sub, &prep)?;

    let mut best: Option<(f64, FitResult)> = None;
    for &k in &prob.k_grid {
        for &gamma in &prob.gamma_grid {
            let res = fit_prepared(&sub, &prep, &ctx, k, gamma)?;
            if res.incomplete() {
                continue;
            }
            let vm = mse(&x_val, &y_val, &res.beta, res.intercept);
            let better = match &best {
                Some((bv, _)) => vm < *bv,
                None => true,
            };
            if better {
                best = Some((vm, res));
            }
        }
    }
    let (_, mut winner) = best.ok_or_else(|| {
        Error::Infeasible("no grid configuration produced a feasible model".into())
    })?;
    winner.test_mse = Some(mse(&x_test, &y_test, &winner.beta, winner.intercept));
    Ok(winner)
}

impl FitResult {
    /// True when the solve ended without an accepted incumbent.
    pub fn incomplete(&self) -> bool {
        self.status != SolveStatus::ProvenOptimal && self.support().is_empty()
    }
}

// --- Lasso baseline --------------------------------------------------------

/// Proximal-gradient (accelerated) Lasso: min 1/2||y - X beta||^2 + gamma
/// ||beta||_1, unconstrained.
pub fn lasso_prox(x: &Matrix, y: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let p = x.cols();
    let g = x.gram();
    let q = x.t_matvec(y);
    let eig = linalg::sym_eigen(&g)?;
    let l = eig.values.last().copied().unwrap_or(0.0).max(1e-12);
    let step = 1.0 / l;
    let mut beta = vec![0.0; p];
    let mut momentum = beta.clone();
    let mut t_prev = 1.0f64;
    let value = |b: &[f64]| -> f64 {
        let fitted = x.matvec(b);
        let rss: f64 = y.iter().zip(&fitted).map(|(a, c)| (a - c) * (a - c)).sum();
        0.5 * rss + gamma * b.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut best = value(&beta);
    for it in 0..50_000 {
        let mut grad = g.matvec(&momentum);
        for (gi, qi) in grad.iter_mut().zip(&q) {
            *gi -= qi;
        }
        let next: Vec<f64> = momentum
            .iter()
            .zip(&grad)
            .map(|(m, gr)| {
                let w = m - step * gr;
                (w.abs() - gamma * step).max(0.0) * w.signum()
            })
            .collect();
        let f_next = value(&next);
        let (t_next, nm) = if f_next > best + 1e-14 {
            (1.0, next.clone())
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
            let c = (t_prev - 1.0) / t_next;
            let nm: Vec<f64> =
                next.iter().zip(&beta).map(|(a, b)| a + c * (a - b)).collect();
            (t_next, nm)
        };
        best = best.min(f_next);
        // Subgradient optimality check.
        if it % 25 == 24 {
            let mut gr = g.matvec(&next);
            for (gi, qi) in gr.iter_mut().zip(&q) {
                *gi -= qi;
            }
            let res = next
                .iter()
                .zip(&gr)
                .map(|(b, gi)| {
                    if b.abs() > 1e-12 {
                        (gi + gamma * b.signum()).abs()
                    } else {
                        (gi.abs() - gamma).max(0.0)
                    }
                })
                .fold(0.0f64, f64::max);
            if res <= 1e-8 * (1.0 + l) {
                beta = next;
                break;
            }
        }
        beta = next;
        momentum = nm;
        t_prev = t_next;
    }
    Ok(beta)
}

/// Lasso over the Gamma grid, tuned on validation MSE; reporting metrics
/// follow the same shape as the holistic fit.
pub fn baseline_lasso(prob: &HolisticProblem) -> Result<FitResult> {
    prob.validate()?;
    let n = prob.x.rows();
    if n < 10 {
        return Err(Error::Parameter("baseline_lasso requires n >= 10".into()));
    }
    let t0 = Instant::now();
    let (train, val, test) = split_indices(n, prob.seed);
    let x_train = prob.x.select_rows(&train);
    let y_train: Vec<f64> = train.iter().map(|&i| prob.y[i]).collect();
    let x_val = prob.x.select_rows(&val);
    let y_val: Vec<f64> = val.iter().map(|&i| prob.y[i]).collect();
    let x_test = prob.x.select_rows(&test);
    let y_test: Vec<f64> = test.iter().map(|&i| prob.y[i]).collect();
    let prep = prepare(&x_train, &y_train, prob.intercept, prob.standardize)?;

    // (validation MSE, gamma, beta, intercept, transformed beta).
    type Candidate = (f64, f64, Vec<f64>, Option<f64>, Vec<f64>);
    let mut best: Option<Candidate> = None;
    for &gamma in &prob.gamma_grid {
        let beta_t = lasso_prox(&prep.x, &prep.y, gamma)?;
        let (beta, b0) = prep.original(&beta_t);
        let vm = mse(&x_val, &y_val, &beta, b0);
        let better = match &best {
            Some((bv, ..)) => vm < *bv,
            None => true,
        };
        if better {
            best = Some((vm, gamma, beta, b0, beta_t));
        }
    }
    let (_, gamma, beta, b0, beta_t) = best.expect("gamma grid is nonempty");
    let z: Vec<bool> = beta_t.iter().map(|b| b.abs() > SUPPORT_TOL).collect();
    let support: Vec<usize> =
        z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    let significance_percent = if support.is_empty() {
        None
    } else {
        match significance::bootstrap_significance(
            &prep.x,
            &prep.y,
            &support,
            BOOTSTRAP_B,
            prob.alpha,
            prob.seed,
        ) {
            Ok(b) => Some(b.percent),
            // A selected set whose every resample is singular has
            // demonstrated significance for none of its variables.
            Err(Error::Singular { .. }) => Some(0.0),
            Err(e) => return Err(e),
        }
    };
    let v = mc::small_eigenvectors(&prep.x, prob.epsilon, false)?;
    let ma_percent = ma_metric(&v, &z, &prep.x)?;
    Ok(FitResult {
        beta: beta.clone(),
        intercept: b0,
        z,
        chosen_k: support.len(),
        chosen_gamma: gamma,
        train_mse: mse(&x_train, &y_train, &beta, b0),
        test_mse: Some(mse(&x_test, &y_test, &beta, b0)),
        significance_percent,
        ma_percent,
        status: SolveStatus::ProvenOptimal,
        relations: Vec::new(),
        cuts: Vec::new(),
        solves: prob.gamma_grid.len(),
        lazy_rounds: 0,
        detect_time_secs: 0.0,
        total_time_secs: t0.elapsed().as_secs_f64(),
    })
}

// --- cutting-plane baseline ------------------------------------------------

#[derive(Debug, Clone)]
pub struct CuttingPlaneOutcome {
    pub result: FitResult,
    pub iterations: usize,
}

/// Iterated subset selection: solve, bootstrap-test the selected set and
/// check its condition number, exclude dirty sets with a cut, repeat.
pub fn baseline_cutting_plane(
    prob: &HolisticProblem,
    k: usize,
    gamma: f64,
    cond_limit: f64,
    max_iters: usize,
) -> Result<CuttingPlaneOutcome> {
    prob.validate()?;
    let t0 = Instant::now();
    let prep = prepare(&prob.x, &prob.y, prob.intercept, prob.standardize)?;
    let p = prep.x.cols();
    let big_m = big_m_from_ridge(&prep.x, &prep.y)?;
    let hc = hc_pairs(&prep.x, prob.rho)?;
    let mut cuts: Vec<Cut> = Vec::new();
    let mut iterations = 0usize;
    loop {
        if iterations >= max_iters {
            return Err(Error::Budget);
        }
        iterations += 1;
        let mut mio =
            MioProblem::new(prep.x.clone(), prep.y.clone(), gamma, vec![big_m; p], k)?;
        mio.groups = prob.groups.clone();
        mio.exclusions = hc.clone();
        mio.cuts = cuts.clone();
        let outcome = mip::solve(&mio, &prob.limits, None)?;
        let inc = match outcome.incumbent {
            Some(inc) => inc,
            None => {
                return Err(Error::Infeasible(
                    "cutting-plane exclusions removed every pattern".into(),
                ))
            }
        };
        let support = inc.support();
        let clean = if support.is_empty() {
            true
        } else {
            // Condition number first: a badly conditioned (possibly exactly
            // singular) selected set is dirty regardless of the bootstrap,
            // and bootstrapping it would be wasted or impossible.
            let xs = prep.x.select_columns(&support);
            let eig = linalg::sym_eigen(&xs.gram())?;
            let lam_min = eig.values.first().copied().unwrap_or(0.0);
            let lam_max = eig.values.last().copied().unwrap_or(0.0);
            let cond =
                if lam_min > 0.0 { (lam_max / lam_min).sqrt() } else { f64::INFINITY };
            if cond > cond_limit {
                false
            } else {
                let boot = significance::bootstrap_significance(
                    &prep.x,
                    &prep.y,
                    &support,
                    BOOTSTRAP_B,
                    prob.alpha,
                    prob.seed,
                )?;
                boot.significant.iter().all(|&s| s)
            }
        };
        if clean {
            let (beta, b0) = prep.original(&inc.beta);
            let v = mc::small_eigenvectors(&prep.x, prob.epsilon, false)?;
            let ma_percent = ma_metric(&v, &inc.z, &prep.x)?;
            let significance_percent = if support.is_empty() {
                None
            } else {
                Some(
                    significance::bootstrap_significance(
                        &prep.x,
                        &prep.y,
                        &support,
                        BOOTSTRAP_B,
                        prob.alpha,
                        prob.seed,
                    )?
                    .percent,
                )
            };
            let result = FitResult {
                train_mse: mse(&prob.x, &prob.y, &beta, b0),
                beta,
                intercept: b0,
                z: inc.z,
                chosen_k: k,
                chosen_gamma: gamma,
                test_mse: None,
                significance_percent,
                ma_percent,
                status: outcome.status,
                relations: Vec::new(),
                cuts,
                solves: iterations,
                lazy_rounds: 0,
                detect_time_secs: 0.0,
                total_time_secs: t0.elapsed().as_secs_f64(),
            };
            return Ok(CuttingPlaneOutcome { result, iterations });
        }
        cuts.push(Cut { indices: support.clone(), rhs: support.len() - 1 });
    }
}
