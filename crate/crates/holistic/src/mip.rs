//! Exact branch-and-bound for the subset-selection problem class:
//! min 1/2 ||y - X beta||^2 + Gamma ||beta||_1 over beta coupled to binary z
//! through per-variable big-M boxes, with cardinality, group-sparsity,
//! pairwise-exclusion, and no-good-cut constraints on z, plus a
//! lazy-constraint callback evaluated at integer-feasible incumbents.

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::mc::Cut;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::collections::HashSet;
use std::time::Instant;

/// Significance constraint pair frozen at a specific selection pattern.
/// The gate term makes it vacuous for any other pattern.
#[derive(Debug, Clone)]
pub struct GatedSignificance {
    /// Sorted support S the denominators were computed at.
    pub pattern: Vec<usize>,
    /// (variable index, frozen denominator sigma~ * sqrt((X_S^T X_S)^{-1}_jj)).
    pub terms: Vec<(usize, f64)>,
    pub n_sign: f64,
    pub gate_big_m: f64,
}

impl GatedSignificance {
    /// Gate value for a selection pattern; the pair binds only when this is
    /// (numerically) zero, i.e. z matches the frozen pattern exactly.
    pub fn gate(&self, support: &[usize]) -> f64 {
        let in_s: HashSet<usize> = self.pattern.iter().copied().collect();
        let selected: HashSet<usize> = support.iter().copied().collect();
        let missing = self.pattern.iter().filter(|i| !selected.contains(i)).count();
        let extra = support.iter().filter(|i| !in_s.contains(i)).count();
        self.gate_big_m * (missing + extra) as f64
    }

    /// True when the pair is violated by (support, beta).
    pub fn violated(&self, support: &[usize], beta: &[f64]) -> bool {
        let gate = self.gate(support);
        if gate >= self.n_sign {
            return false;
        }
        self.terms
            .iter()
            .any(|&(j, denom)| beta[j].abs() / denom + gate < self.n_sign - 1e-12)
    }
}

/// The full problem handed to the engine.
#[derive(Debug, Clone)]
pub struct MioProblem {
    pub x: Matrix,
    pub y: Vec<f64>,
    /// l1 robustness weight Gamma.
    pub gamma: f64,
    /// Per-variable big-M bound on |beta_j|.
    pub big_m: Vec<f64>,
    /// Cardinality cap on the number of selected variables.
    pub k: usize,
    /// Group-sparsity sets: all members selected together or not at all.
    pub groups: Vec<Vec<usize>>,
    /// Pairwise exclusions (i, j): at most one of the pair selected.
    pub exclusions: Vec<(usize, usize)>,
    /// No-good cuts accumulated up front or lazily.
    pub cuts: Vec<Cut>,
    /// Lazily added significance pairs.
    pub gated: Vec<GatedSignificance>,
}

impl MioProblem {
    pub fn new(x: Matrix, y: Vec<f64>, gamma: f64, big_m: Vec<f64>, k: usize) -> Result<Self> {
        if y.len() != x.rows() {
            return Err(Error::Structure("y length must match X rows".into()));
        }
        if big_m.len() != x.cols() {
            return Err(Error::Structure("big_m length must match X columns".into()));
        }
        if big_m.iter().any(|m| !m.is_finite() || *m <= 0.0) {
            return Err(Error::Parameter("all big-M values must be positive".into()));
        }
        if gamma < 0.0 {
            return Err(Error::Parameter("gamma must be nonnegative".into()));
        }
        Ok(MioProblem {
            x,
            y,
            gamma,
            big_m,
            k,
            groups: Vec::new(),
            exclusions: Vec::new(),
            cuts: Vec::new(),
            gated: Vec::new(),
        })
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    fn validate_indices(&self) -> Result<()> {
        let p = self.p();
        let ok = self.groups.iter().flatten().all(|&i| i < p)
            && self.exclusions.iter().all(|&(i, j)| i < p && j < p)
            && self.cuts.iter().flat_map(|c| &c.indices).all(|&i| i < p);
        if ok {
            Ok(())
        } else {
            Err(Error::Structure("constraint references an out-of-range variable".into()))
        }
    }

    /// Is a fully specified pattern feasible for the z-constraints?
    pub fn pattern_feasible(&self, z: &[bool]) -> bool {
        if z.iter().filter(|&&b| b).count() > self.k {
            return false;
        }
        for g in &self.groups {
            if g.iter().any(|&i| z[i]) && !g.iter().all(|&i| z[i]) {
                return false;
            }
        }
        for &(i, j) in &self.exclusions {
            if z[i] && z[j] {
                return false;
            }
        }
        for c in &self.cuts {
            if c.indices.iter().filter(|&&i| z[i]).count() > c.rhs {
                return false;
            }
        }
        true
    }
}

/// Branch-and-bound node: per-variable z bounds.
#[derive(Debug, Clone)]
pub struct NodeState {
    /// z_j fixed to one.
    pub fixed_one: Vec<bool>,
    /// z_j still allowed to be one (false = fixed to zero).
    pub allowed: Vec<bool>,
    pub depth: usize,
}

impl NodeState {
    pub fn root(p: usize) -> NodeState {
        NodeState { fixed_one: vec![false; p], allowed: vec![true; p], depth: 0 }
    }

    fn is_free(&self, j: usize) -> bool {
        self.allowed[j] && !self.fixed_one[j]
    }

    fn all_fixed(&self) -> bool {
        (0..self.fixed_one.len()).all(|j| !self.is_free(j))
    }
}

/// Integer-feasible solution accepted by the lazy callback.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Incumbent {
    pub beta: Vec<f64>,
    pub z: Vec<bool>,
    pub objective: f64,
    pub lazy_rounds: usize,
}

impl Incumbent {
    pub fn support(&self) -> Vec<usize> {
        self.z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    ProvenOptimal,
    BudgetExhausted,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub incumbent: Option<Incumbent>,
    pub status: SolveStatus,
    pub nodes: u64,
    pub lazy_rounds: usize,
    pub lower_bound: f64,
    /// Variables whose solution sits within 1e-4 of the active big-M bound;
    /// nonempty means the big-M may be too small.
    pub big_m_warnings: Vec<usize>,
    /// Cut inventory at termination, including lazily added cuts.
    pub cuts: Vec<Cut>,
}

#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub time_limit_secs: Option<f64>,
    pub node_limit: Option<u64>,
}

/// Lazy callback verdict.
pub enum LazyResponse {
    Accept,
    Reject { cuts: Vec<Cut>, gated: Vec<GatedSignificance> },
}

pub type LazyCallback<'a> = dyn FnMut(&Incumbent, &MioProblem) -> Result<LazyResponse> + 'a;

/// Relative optimality gap the engine proves.
pub const GAP_TOL: f64 = 1e-6;
const PRUNE_SLACK: f64 = 1e-9;
const INT_TOL: f64 = 1e-5;

// --- convex relaxation -----------------------------------------------------

/// Precomputed quadratic data: F(beta) = 1/2 y'y - q'beta + 1/2 beta'G beta
/// + Gamma ||beta||_1.
struct Quadratic {
    g: Matrix,
    q: Vec<f64>,
    yty: f64,
    lipschitz: f64,
}

impl Quadratic {
    fn new(prob: &MioProblem) -> Result<Quadratic> {
        let g = prob.x.gram();
        let q = prob.x.t_matvec(&prob.y);
        let yty = dot(&prob.y, &prob.y);
        let eig = linalg::sym_eigen(&g)?;
        let lipschitz = eig.values.last().copied().unwrap_or(0.0).max(1e-12);
        Ok(Quadratic { g, q, yty, lipschitz })
    }

    fn smooth_value(&self, beta: &[f64]) -> f64 {
        0.5 * self.yty - dot(&self.q, beta) + 0.5 * dot(beta, &self.g.matvec(beta))
    }

    fn value(&self, beta: &[f64], gamma: f64) -> f64 {
        self.smooth_value(beta) + gamma * beta.iter().map(|b| b.abs()).sum::<f64>()
    }

    fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        let mut g = self.g.matvec(beta);
        for (gi, qi) in g.iter_mut().zip(&self.q) {
            *gi -= qi;
        }
        g
    }

    /// Fenchel dual bound at the current residual. `agg` carries the
    /// aggregated-cardinality weights and budget when the surrogate is
    /// present; the conjugate then becomes a continuous knapsack.
    fn dual_bound(
        &self,
        beta: &[f64],
        gamma: f64,
        caps: &[f64],
        agg: Option<(&[f64], f64)>,
    ) -> f64 {
        let grad = self.gradient(beta);
        // X^T r = -grad where r = y - X beta.
        let v: Vec<f64> = grad.iter().map(|g| -g).collect();
        let r_dot_y = self.yty - dot(beta, &self.q);
        let r_sq = self.yty - 2.0 * dot(beta, &self.q) + dot(beta, &self.g.matvec(beta));
        let mut conj = 0.0;
        match agg {
            None => {
                for (j, cap) in caps.iter().enumerate() {
                    conj += cap * (v[j].abs() - gamma).max(0.0);
                }
            }
            Some((weights, budget)) => {
                // Variables with zero weight are unconstrained by the budget.
                let mut items: Vec<(f64, f64, f64)> = Vec::new(); // (rate, cap, weight)
                for j in 0..caps.len() {
                    let gain = (v[j].abs() - gamma).max(0.0);
                    if gain <= 0.0 || caps[j] <= 0.0 {
                        continue;
                    }
                    if weights[j] <= 0.0 {
                        conj += caps[j] * gain;
                    } else {
                        items.push((gain / weights[j], caps[j] * gain, weights[j] * caps[j]));
                    }
                }
                items.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                let mut left = budget.max(0.0);
                for (rate, full_gain, full_cost) in items {
                    if left <= 0.0 {
                        break;
                    }
                    if full_cost <= left {
                        conj += full_gain;
                        left -= full_cost;
                    } else {
                        conj += rate * left;
                        left = 0.0;
                    }
                }
            }
        }
        r_dot_y - 0.5 * r_sq - conj
    }
}

/// Prox of Gamma||.||_1 + box + (optional) weighted-l1 budget, at unit step.
fn prox(
    w: &[f64],
    shrink: f64,
    caps: &[f64],
    agg: Option<(&[f64], f64)>,
) -> Vec<f64> {
    let base = |lambda: f64| -> Vec<f64> {
        w.iter()
            .enumerate()
            .map(|(j, &wj)| {
                let extra = match agg {
                    Some((weights, _)) => lambda * weights[j],
                    None => 0.0,
                };
                let t = (wj.abs() - shrink - extra).max(0.0);
                (t * wj.signum()).clamp(-caps[j], caps[j])
            })
            .collect()
    };
    match agg {
        None => base(0.0),
        Some((weights, budget)) => {
            let usage = |b: &[f64]| -> f64 {
                b.iter().zip(weights).map(|(x, w)| x.abs() * w).sum()
            };
            let at_zero = base(0.0);
            if usage(&at_zero) <= budget + 1e-12 {
                return at_zero;
            }
            // Bisection on the budget multiplier.
            let mut lo = 0.0;
            let mut hi = w
                .iter()
                .zip(weights)
                .map(|(wj, wt)| if *wt > 0.0 { wj.abs() / wt } else { 0.0 })
                .fold(1.0f64, f64::max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if usage(&base(mid)) > budget {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            base(hi)
        }
    }
}

struct RelaxationSolution {
    beta: Vec<f64>,
    primal: f64,
    lower_bound: f64,
}

/// FISTA with adaptive restart plus the Fenchel dual bound; coordinate
/// descent polish when the budget surrogate is slack.
fn solve_relaxation_inner(
    quad: &Quadratic,
    gamma: f64,
    caps: &[f64],
    agg: Option<(&[f64], f64)>,
    warm: Option<&[f64]>,
    max_iter: usize,
) -> RelaxationSolution {
    let p = caps.len();
    let clamp_caps = |b: &mut Vec<f64>| {
        for (x, c) in b.iter_mut().zip(caps) {
            *x = x.clamp(-c, *c);
        }
    };
    let mut x: Vec<f64> = match warm {
        Some(w) => {
            let mut v = w.to_vec();
            clamp_caps(&mut v);
            if let Some((weights, budget)) = agg {
                let used: f64 = v.iter().zip(weights).map(|(x, w)| x.abs() * w).sum();
                if used > budget {
                    let scale = if used > 0.0 { budget / used } else { 0.0 };
                    for xv in v.iter_mut() {
                        *xv *= scale;
                    }
                }
            }
            v
        }
        None => vec![0.0; p],
    };
    let l = quad.lipschitz;
    let step = 1.0 / l;
    let mut momentum = x.clone();
    let mut t_prev = 1.0f64;
    let mut best_primal = quad.value(&x, gamma);
    let mut best_beta = x.clone();
    let mut best_lb = f64::NEG_INFINITY;

    for it in 0..max_iter {
        let grad = quad.gradient(&momentum);
        let w: Vec<f64> = momentum.iter().zip(&grad).map(|(m, g)| m - step * g).collect();
        let x_new = prox(&w, gamma * step, caps, agg);
        let f_new = quad.value(&x_new, gamma);
        // Adaptive restart on objective increase.
        let (t_next, next_momentum) = if f_new > best_primal + 1e-14 {
            (1.0, x_new.clone())
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
            let coef = (t_prev - 1.0) / t_next;
            let nm: Vec<f64> =
                x_new.iter().zip(&x).map(|(xn, xo)| xn + coef * (xn - xo)).collect();
            (t_next, nm)
        };
        if f_new < best_primal {
            best_primal = f_new;
            best_beta = x_new.clone();
        }
        x = x_new;
        momentum = next_momentum;
        t_prev = t_next;

        if it % 20 == 19 || it + 1 == max_iter {
            let lb = quad.dual_bound(&best_beta, gamma, caps, agg);
            if lb > best_lb {
                best_lb = lb;
            }
            if best_primal - best_lb <= 1e-10 * (1.0 + best_primal.abs()) {
                break;
            }
        }
    }

    // Coordinate-descent polish, valid when the budget stays satisfied.
    let mut polished = best_beta.clone();
    let mut grad = quad.gradient(&polished);
    for _ in 0..200 {
        let mut delta_max = 0.0f64;
        for j in 0..p {
            let gjj = quad.g.get(j, j);
            if gjj <= 0.0 {
                continue;
            }
            let old = polished[j];
            let target = old - grad[j] / gjj;
            let shrunk = (target.abs() - gamma / gjj).max(0.0) * target.signum();
            let new = shrunk.clamp(-caps[j], caps[j]);
            let d = new - old;
            if d != 0.0 {
                polished[j] = new;
                for (i, gi) in grad.iter_mut().enumerate() {
                    *gi += quad.g.get(i, j) * d;
                }
                delta_max = delta_max.max(d.abs());
            }
        }
        if delta_max < 1e-13 {
            break;
        }
    }
    let budget_ok = match agg {
        Some((weights, budget)) => {
            polished.iter().zip(weights).map(|(x, w)| x.abs() * w).sum::<f64>() <= budget + 1e-9
        }
        None => true,
    };
    if budget_ok {
        let f_pol = quad.value(&polished, gamma);
        if f_pol < best_primal {
            best_primal = f_pol;
            best_beta = polished;
        }
    }
    let lb = quad.dual_bound(&best_beta, gamma, caps, agg).max(best_lb);
    RelaxationSolution {
        beta: best_beta,
        primal: best_primal,
        lower_bound: lb.min(best_primal).max(0.0),
    }
}

fn node_caps(prob: &MioProblem, node: &NodeState) -> Vec<f64> {
    (0..prob.p())
        .map(|j| if node.allowed[j] { prob.big_m[j] } else { 0.0 })
        .collect()
}

fn node_aggregate(prob: &MioProblem, node: &NodeState) -> Option<(Vec<f64>, f64)> {
    let n_one = node.fixed_one.iter().filter(|&&b| b).count();
    let budget = prob.k.saturating_sub(n_one) as f64;
    let weights: Vec<f64> = (0..prob.p())
        .map(|j| if node.fixed_one[j] { 0.0 } else { 1.0 / prob.big_m[j] })
        .collect();
    Some((weights, budget))
}

/// Valid lower bound and relaxed beta for a node. Public surface used by the
/// enumeration tests; the engine calls the same path with warm starts.
pub fn solve_relaxation(prob: &MioProblem, node: &NodeState) -> Result<(f64, Vec<f64>)> {
    let quad = Quadratic::new(prob)?;
    let caps = node_caps(prob, node);
    let agg = node_aggregate(prob, node);
    let sol = solve_relaxation_inner(
        &quad,
        prob.gamma,
        &caps,
        agg.as_ref().map(|(w, b)| (w.as_slice(), *b)),
        None,
        20_000,
    );
    Ok((sol.lower_bound, sol.beta))
}

// --- propagation -----------------------------------------------------------

/// Fixpoint propagation of the z-constraints. Returns false on infeasibility.
fn propagate(prob: &MioProblem, node: &mut NodeState) -> bool {
    loop {
        let mut changed = false;
        let fix_one = |node: &mut NodeState, j: usize, changed: &mut bool| -> bool {
            if !node.allowed[j] {
                return false;
            }
            if !node.fixed_one[j] {
                node.fixed_one[j] = true;
                *changed = true;
            }
            true
        };
        let fix_zero = |node: &mut NodeState, j: usize, changed: &mut bool| -> bool {
            if node.fixed_one[j] {
                return false;
            }
            if node.allowed[j] {
                node.allowed[j] = false;
                *changed = true;
            }
            true
        };
        for gi in 0..prob.groups.len() {
            let g = prob.groups[gi].clone();
            if g.iter().any(|&i| node.fixed_one[i]) {
                for &i in &g {
                    if !fix_one(node, i, &mut changed) {
                        return false;
                    }
                }
            }
            if g.iter().any(|&i| !node.allowed[i]) {
                for &i in &g {
                    if !fix_zero(node, i, &mut changed) {
                        return false;
                    }
                }
            }
        }
        for &(i, j) in &prob.exclusions {
            if node.fixed_one[i] && !fix_zero(node, j, &mut changed) {
                return false;
            }
            if node.fixed_one[j] && !fix_zero(node, i, &mut changed) {
                return false;
            }
        }
        for c in &prob.cuts {
            let ones = c.indices.iter().filter(|&&i| node.fixed_one[i]).count();
            if ones > c.rhs {
                return false;
            }
            if ones == c.rhs {
                for &i in &c.indices {
                    if !node.fixed_one[i] && node.allowed[i] && !fix_zero(node, i, &mut changed) {
                        return false;
                    }
                }
            }
        }
        let n_one = node.fixed_one.iter().filter(|&&b| b).count();
        if n_one > prob.k {
            return false;
        }
        if n_one == prob.k {
            for j in 0..prob.p() {
                if node.is_free(j) && !fix_zero(node, j, &mut changed) {
                    return false;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

// --- the engine ------------------------------------------------------------

struct QueueEntry {
    bound: f64,
    seq: u64,
    node: NodeState,
    warm: Vec<f64>,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert for best-bound-first.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub fn solve(
    prob: &MioProblem,
    limits: &Limits,
    mut callback: Option<&mut LazyCallback<'_>>,
) -> Result<SolveOutcome> {
    prob.validate_indices()?;
    let mut prob = prob.clone();
    let quad = Quadratic::new(&prob)?;
    let start = Instant::now();
    let p = prob.p();

    let mut pq: BinaryHeap<QueueEntry> = BinaryHeap::new();
    let mut plunge: Vec<QueueEntry> = Vec::new();
    let mut seq: u64 = 0;
    let mut nodes: u64 = 0;
    let mut lazy_rounds: usize = 0;
    let mut incumbent: Option<Incumbent> = None;
    let mut ub = f64::INFINITY;
    let mut rejected_patterns: HashSet<Vec<bool>> = HashSet::new();
    let mut budget_hit = false;

    let mut root = NodeState::root(p);
    if propagate(&prob, &mut root) {
        pq.push(QueueEntry { bound: 0.0, seq, node: root, warm: vec![0.0; p] });
        seq += 1;
    }

    let leaf_solve = |quad: &Quadratic, prob: &MioProblem, z: &[bool], warm: &[f64]| {
        let caps: Vec<f64> =
            (0..p).map(|j| if z[j] { prob.big_m[j] } else { 0.0 }).collect();
        solve_relaxation_inner(quad, prob.gamma, &caps, None, Some(warm), 20_000)
    };

    'outer: while let Some(entry) = plunge.pop().or_else(|| pq.pop()) {
        if let Some(t) = limits.time_limit_secs {
            if start.elapsed().as_secs_f64() > t {
                budget_hit = true;
                pq.push(entry);
                break;
            }
        }
        if let Some(nl) = limits.node_limit {
            if nodes >= nl {
                budget_hit = true;
                pq.push(entry);
                break;
            }
        }
        nodes += 1;
        let prune_at = if ub.is_finite() {
            ub - PRUNE_SLACK * (1.0 + ub.abs())
        } else {
            f64::INFINITY
        };
        if entry.bound >= prune_at {
            continue;
        }
        let mut node = entry.node;
        if !propagate(&prob, &mut node) {
            continue;
        }
        let caps = node_caps(&prob, &node);
        let agg = node_aggregate(&prob, &node);
        let relax = solve_relaxation_inner(
            &quad,
            prob.gamma,
            &caps,
            agg.as_ref().map(|(w, b)| (w.as_slice(), *b)),
            Some(&entry.warm),
            8_000,
        );
        if relax.lower_bound >= prune_at {
            continue;
        }

        // Implied z for free variables; branch on the most fractional.
        let implied = |j: usize| (relax.beta[j].abs() / prob.big_m[j]).clamp(0.0, 1.0);
        let mut branch_j: Option<usize> = None;
        let mut best_frac = INT_TOL;
        for j in 0..p {
            if node.is_free(j) {
                let zj = implied(j);
                let frac = zj.min(1.0 - zj);
                if frac > best_frac {
                    best_frac = frac;
                    branch_j = Some(j);
                }
            }
        }

        if branch_j.is_none() {
            // Integral relaxation: harvest the rounded pattern.
            let z: Vec<bool> = (0..p)
                .map(|j| node.fixed_one[j] || (node.is_free(j) && implied(j) >= 0.5))
                .collect();
            if prob.pattern_feasible(&z) && !rejected_patterns.contains(&z) {
                let leaf = leaf_solve(&quad, &prob, &z, &relax.beta);
                let support: Vec<usize> =
                    z.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
                let gate_violated =
                    prob.gated.iter().any(|g| g.violated(&support, &leaf.beta));
                if !gate_violated && leaf.primal < prune_at {
                    let cand = Incumbent {
                        beta: leaf.beta.clone(),
                        z: z.clone(),
                        objective: leaf.primal,
                        lazy_rounds,
                    };
                    let verdict = match callback.as_mut() {
                        Some(cb) => cb(&cand, &prob)?,
                        None => LazyResponse::Accept,
                    };
                    match verdict {
                        LazyResponse::Accept => {
                            ub = cand.objective;
                            incumbent = Some(cand);
                            // Node solved exactly when the leaf meets the bound.
                            if node.all_fixed()
                                || leaf.primal - relax.lower_bound
                                    <= PRUNE_SLACK * (1.0 + leaf.primal.abs())
                            {
                                continue 'outer;
                            }
                        }
                        LazyResponse::Reject { cuts, gated } => {
                            let any_violated = cuts
                                .iter()
                                .any(|c| c.indices.iter().filter(|&&i| z[i]).count() > c.rhs)
                                || gated.iter().any(|g| g.violated(&support, &cand.beta));
                            if !any_violated {
                                return Err(Error::Protocol(
                                    "rejection returned no constraint violated by the incumbent"
                                        .into(),
                                ));
                            }
                            lazy_rounds += 1;
                            rejected_patterns.insert(z.clone());
                            prob.cuts.extend(cuts);
                            prob.gated.extend(gated);
                        }
                    }
                }
            }
            if node.all_fixed() {
                continue;
            }
            // Keep exploring the node on the lowest-index free variable.
            branch_j = (0..p).find(|&j| node.is_free(j));
        }

        let j = branch_j.expect("non-fixed node has a free variable");
        let toward_one = implied(j) >= 0.5;
        let mut children = Vec::new();
        for &fix_to_one in &[!toward_one, toward_one] {
            let mut child = node.clone();
            child.depth += 1;
            if fix_to_one {
                child.fixed_one[j] = true;
            } else {
                child.allowed[j] = false;
            }
            if propagate(&prob, &mut child) {
                children.push(QueueEntry {
                    bound: relax.lower_bound,
                    seq,
                    node: child,
                    warm: relax.beta.clone(),
                });
                seq += 1;
            }
        }
        // Plunge into the rounding direction (pushed last), queue the rest.
        if let Some(dive) = children.pop() {
            if let Some(other) = children.pop() {
                pq.push(other);
            }
            plunge.push(dive);
        }

        // Early stop on proven gap.
        if let Some(inc) = &incumbent {
            let open_lb = plunge
                .iter()
                .map(|e| e.bound)
                .chain(pq.peek().map(|e| e.bound))
                .fold(f64::INFINITY, f64::min);
            if open_lb.is_infinite()
                || inc.objective - open_lb <= GAP_TOL * (1.0 + inc.objective.abs())
            {
                break;
            }
        }
    }

    let open_lb = plunge
        .iter()
        .map(|e| e.bound)
        .chain(pq.iter().map(|e| e.bound))
        .fold(f64::INFINITY, f64::min);
    let lower_bound = match &incumbent {
        Some(inc) => inc.objective.min(open_lb),
        None => open_lb,
    };

    let status = if budget_hit {
        SolveStatus::BudgetExhausted
    } else if incumbent.is_some() {
        SolveStatus::ProvenOptimal
    } else {
        SolveStatus::Infeasible
    };

    let big_m_warnings = incumbent
        .as_ref()
        .map(|inc| {
            (0..p)
                .filter(|&j| inc.z[j] && prob.big_m[j] - inc.beta[j].abs() < 1e-4)
                .collect()
        })
        .unwrap_or_default();

    Ok(SolveOutcome {
        incumbent,
        status,
        nodes,
        lazy_rounds,
        lower_bound,
        big_m_warnings,
        cuts: prob.cuts,
    })
}
