//! Multicollinearity detection through the small-eigenvalue subspace of
//! X^T X: minimum-support relation search, iteration to exhaustion with
//! no-good cuts, and the planted synthetic generator used by the benchmark.

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm2, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Eigenvectors of X^T X with eigenvalue below the detection threshold,
/// plus the complement eigenvalues needed by the subspace residual bounds.
#[derive(Debug, Clone)]
pub struct SmallEigenSpace {
    /// Unit eigenvectors (ambient dimension p), eigenvalues ascending.
    pub vectors: Vec<Vec<f64>>,
    /// Eigenvalues matching `vectors`, all < `epsilon`.
    pub values: Vec<f64>,
    pub epsilon: f64,
    /// Eigenvalues >= epsilon, ascending.
    pub complement_values: Vec<f64>,
    /// Ambient dimension p (kept explicitly so an empty V still knows it).
    pub ambient: usize,
}

impl SmallEigenSpace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Construct directly from an explicit basis; used by tests and by
    /// callers that already hold an eigendecomposition.
    pub fn from_basis(
        vectors: Vec<Vec<f64>>,
        values: Vec<f64>,
        epsilon: f64,
        complement_values: Vec<f64>,
        ambient: usize,
    ) -> Result<SmallEigenSpace> {
        if vectors.len() != values.len() {
            return Err(Error::Structure("basis/eigenvalue length mismatch".into()));
        }
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::Structure("basis vector has wrong dimension".into()));
        }
        Ok(SmallEigenSpace { vectors, values, epsilon, complement_values, ambient })
    }
}

/// One detected near-linear dependence among columns: a unit vector `a`
/// with its support and its coordinates in the V basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MulticollinearRelation {
    pub coefficients: Vec<f64>,
    /// Sorted indices with |a_j| above the effective zero tolerance.
    pub support: Vec<usize>,
    pub theta: Vec<f64>,
}

/// Proof/test quantity from the subspace-perturbation bound: the eigenbasis
/// tail of a candidate relation. Only the property suites construct it.
#[derive(Debug, Clone)]
pub struct RelationResidual {
    pub b: Vec<f64>,
    pub norm_bound: f64,
}

/// No-good cut: sum of z over `indices` <= rhs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub indices: Vec<usize>,
    pub rhs: usize,
}

impl Cut {
    /// Violated by a selection that includes every index of the cut.
    pub fn excludes(&self, support: &[usize]) -> bool {
        self.indices.iter().all(|i| support.contains(i))
    }
}

/// Parameters of one planted synthetic instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlantedSpec {
    /// One entry per planted relation: the number q of variables involved.
    pub relation_sizes: Vec<usize>,
    /// Uniform range the combination weights are drawn from.
    pub gamma_range: (f64, f64),
    /// Standard deviation of the entrywise Gaussian noise added to X.
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Detection tolerances. `feas_tol = None` selects the adaptive rule
/// `max(feas_scale * sqrt(lambda_small_max / lambda_complement_min), feas_floor)`,
/// which collapses to `feas_floor` on exactly singular data.
#[derive(Debug, Clone)]
pub struct DetectOptions {
    pub delta: f64,
    pub support_zero_tol: f64,
    pub feas_tol: Option<f64>,
    pub feas_scale: f64,
    pub feas_floor: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            delta: 1e-6,
            support_zero_tol: 1e-7,
            feas_tol: None,
            feas_scale: 1.0,
            feas_floor: 1e-9,
        }
    }
}

impl DetectOptions {
    /// Residual threshold under which a zero-pattern is considered attainable.
    pub fn effective_feas_tol(&self, v: &SmallEigenSpace) -> f64 {
        if let Some(t) = self.feas_tol {
            return t;
        }
        let small_max = v.values.iter().cloned().fold(0.0f64, f64::max);
        let denom = v
            .complement_values
            .first()
            .copied()
            .unwrap_or(v.epsilon.max(small_max))
            .max(f64::MIN_POSITIVE);
        (self.feas_scale * (small_max.max(0.0) / denom).sqrt()).max(self.feas_floor)
    }
}

/// Eigenvectors of X^T X (optionally with an appended intercept column)
/// whose eigenvalues fall below `epsilon`.
pub fn small_eigenvectors(
    x: &Matrix,
    epsilon: f64,
    add_intercept: bool,
) -> Result<SmallEigenSpace> {
    if epsilon <= 0.0 {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let design = if add_intercept { x.with_intercept() } else { x.clone() };
    let eig = linalg::sym_eigen(&design.gram())?;
    let ambient = design.cols();
    let mut vectors = Vec::new();
    let mut values = Vec::new();
    let mut complement = Vec::new();
    for (lam, v) in eig.values.iter().zip(eig.vectors) {
        if *lam < epsilon {
            values.push(*lam);
            vectors.push(v);
        } else {
            complement.push(*lam);
        }
    }
    Ok(SmallEigenSpace { vectors, values, epsilon, complement_values: complement, ambient })
}

/// Big-M for the relation MIO: 1/sqrt(m), the tightest constant for
/// orthonormal basis vectors.
pub fn big_m_for_relation(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Parameter("big_m_for_relation: m must be >= 1".into()));
    }
    Ok(1.0 / (m as f64).sqrt())
}

/// Smallest eigenvalue of a symmetric m x m matrix in row-major storage;
/// closed forms for m <= 3, Jacobi fallback above.
fn lam_min_small(g: &[f64], m: usize) -> f64 {
    match m {
        1 => g[0],
        2 => {
            let (a, b, c) = (g[0], g[1], g[3]);
            0.5 * ((a + c) - ((a - c) * (a - c) + 4.0 * b * b).sqrt())
        }
        3 => {
            let (a00, a01, a02) = (g[0], g[1], g[2]);
            let (a11, a12, a22) = (g[4], g[5], g[8]);
            let p1 = a01 * a01 + a02 * a02 + a12 * a12;
            let q = (a00 + a11 + a22) / 3.0;
            let p2 =
                (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
            if p2 <= 0.0 {
                return q;
            }
            let p = (p2 / 6.0).sqrt();
            let b00 = (a00 - q) / p;
            let b01 = a01 / p;
            let b02 = a02 / p;
            let b11 = (a11 - q) / p;
            let b12 = a12 / p;
            let b22 = (a22 - q) / p;
            let det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02)
                + b02 * (b01 * b12 - b11 * b02);
            let r = (det_b / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
        }
        _ => {
            let mat = Matrix::new(m, m, g.to_vec()).expect("square gram");
            linalg::sym_eigen(&mat).map(|e| e.values[0]).unwrap_or(0.0)
        }
    }
}

/// Branch-and-bound state for the minimum-support search.
struct SupportSearch<'a> {
    /// rows[j] = j-th coordinate of every basis vector (length m).
    rows: Vec<Vec<f64>>,
    /// Indices whose basis row is large enough to ever enter a support;
    /// all others are zeroed up front (|a_j| <= ||row_j|| <= entry_tol).
    active: Vec<usize>,
    m: usize,
    p: usize,
    tau_sq: f64,
    entry_tol: f64,
    delta: f64,
    cuts: &'a [Cut],
    best: Option<(Vec<usize>, Vec<f64>, Vec<f64>)>, // (support, a, theta)
    free: Vec<usize>,
}

impl<'a> SupportSearch<'a> {
    fn smallest_eigenpair(&self, gram: &[f64]) -> (f64, Vec<f64>) {
        let m = self.m;
        let mat = Matrix::new(m, m, gram.to_vec()).expect("gram is m x m");
        let eig = linalg::sym_eigen(&mat).expect("gram is symmetric");
        (eig.values[0], eig.vectors[0].clone())
    }

    fn candidate_key(support: &[usize]) -> (usize, Vec<usize>) {
        (support.len(), support.to_vec())
    }

    fn consider_terminal(&mut self, gram: &[f64]) {
        let (_, theta) = self.smallest_eigenpair(gram);
        if theta.iter().map(|t| t.abs()).sum::<f64>() < self.delta {
            return;
        }
        let a: Vec<f64> = self.rows.iter().map(|r| dot(r, &theta)).collect();
        let nrm = norm2(&a);
        if nrm <= 0.0 {
            return;
        }
        let a: Vec<f64> = a.iter().map(|v| v / nrm).collect();
        let support: Vec<usize> =
            (0..self.p).filter(|&j| a[j].abs() > self.entry_tol).collect();
        if support.is_empty() {
            return;
        }
        if self.cuts.iter().any(|c| c.excludes(&support)) {
            return;
        }
        let key = Self::candidate_key(&support);
        let better = match &self.best {
            None => true,
            Some((s, _, _)) => key < Self::candidate_key(s),
        };
        if better {
            self.best = Some((support, a, theta));
        }
    }

    /// Depth-first over the active indices: each is either forced to zero
    /// (its basis row joins the residual Gram) or left free. Zero-first
    /// order reaches a sparse incumbent quickly; the free count is bounded
    /// by the incumbent's support size.
    fn dfs(&mut self, pos: usize, gram: &mut Vec<f64>) {
        if let Some((s, _, _)) = &self.best {
            if self.free.len() > s.len() {
                return;
            }
        }
        if pos == self.active.len() {
            self.consider_terminal(gram);
            return;
        }
        let j = self.active[pos];
        // Branch 1: a_j forced to zero.
        let saved = gram.clone();
        for r in 0..self.m {
            let rr = self.rows[j][r];
            for c in 0..self.m {
                gram[r * self.m + c] += rr * self.rows[j][c];
            }
        }
        // Feasibility with a trace-relative slack: the closed-form smallest
        // eigenvalue loses ~eps * trace to cancellation, which can exceed a
        // tiny absolute tau^2 on exactly singular data.
        let trace: f64 = (0..self.m).map(|r| gram[r * self.m + r]).sum();
        if lam_min_small(gram, self.m) <= self.tau_sq + 1e-11 * trace {
            self.dfs(pos + 1, gram);
        }
        gram.copy_from_slice(&saved);
        // Branch 2: a_j free.
        let within_bound = match &self.best {
            None => true,
            Some((s, _, _)) => self.free.len() < s.len(),
        };
        if within_bound {
            self.free.push(j);
            self.dfs(pos + 1, gram);
            self.free.pop();
        }
    }
}

/// Minimum-support vector in Span(V), subject to the accumulated no-good
/// cuts. Exact branch-and-bound over the support indicators with a
/// least-squares feasibility subproblem; ties broken toward the
/// lexicographically smallest support.
pub fn min_support_relation(
    v: &SmallEigenSpace,
    delta: f64,
    cuts: &[Cut],
) -> Result<Option<MulticollinearRelation>> {
    min_support_relation_with(v, delta, cuts, &DetectOptions::default())
}

pub fn min_support_relation_with(
    v: &SmallEigenSpace,
    delta: f64,
    cuts: &[Cut],
    opts: &DetectOptions,
) -> Result<Option<MulticollinearRelation>> {
    if delta <= 0.0 {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let m = v.dim();
    if m == 0 {
        return Err(Error::Parameter("min_support_relation: V is empty".into()));
    }
    let p = v.ambient;
    let tau = opts.effective_feas_tol(v);
    let entry_tol = opts.support_zero_tol.max(tau);
    let rows: Vec<Vec<f64>> =
        (0..p).map(|j| v.vectors.iter().map(|vec| vec[j]).collect()).collect();
    // Indices with a negligible basis row can never carry a support entry
    // (|a_j| <= ||row_j||); zero them up front to shrink the search.
    let mut gram = vec![0.0; m * m];
    let mut active = Vec::new();
    for (j, row) in rows.iter().enumerate() {
        if norm2(row) <= entry_tol {
            for r in 0..m {
                for c in 0..m {
                    gram[r * m + c] += row[r] * row[c];
                }
            }
        } else {
            active.push(j);
        }
    }
    let mut search = SupportSearch {
        rows,
        active,
        m,
        p,
        tau_sq: tau * tau,
        entry_tol,
        delta,
        cuts,
        best: None,
        free: Vec::new(),
    };
    search.dfs(0, &mut gram);
    Ok(search.best.map(|(support, coefficients, theta)| MulticollinearRelation {
        coefficients,
        support,
        theta,
    }))
}

/// No-good cut over the support of a relation.
pub fn emit_cut(r: &MulticollinearRelation) -> Result<Cut> {
    if r.support.is_empty() {
        return Err(Error::Logic("emit_cut: relation has empty support".into()));
    }
    Ok(Cut { indices: r.support.clone(), rhs: r.support.len() - 1 })
}

/// Repeatedly extract minimum-support relations, excluding each found
/// support, until the search is infeasible or dim(V) relations are found.
/// The returned relations are linearly independent.
pub fn iterative_mc(v: &SmallEigenSpace, delta: f64) -> Result<Vec<MulticollinearRelation>> {
    iterative_mc_with(v, delta, &DetectOptions::default())
}

pub fn iterative_mc_with(
    v: &SmallEigenSpace,
    delta: f64,
    opts: &DetectOptions,
) -> Result<Vec<MulticollinearRelation>> {
    let mut relations: Vec<MulticollinearRelation> = Vec::new();
    let mut cuts: Vec<Cut> = Vec::new();
    if v.dim() == 0 {
        return Ok(relations);
    }
    while relations.len() < v.dim() {
        let found = min_support_relation_with(v, delta, &cuts, opts)?;
        let Some(rel) = found else { break };
        cuts.push(emit_cut(&rel)?);
        if independent_with(&relations, &rel) {
            relations.push(rel);
        }
    }
    Ok(relations)
}

/// Gram-matrix independence check: smallest eigenvalue of the coefficient
/// Gram must stay above 1e-8 after adding the candidate.
fn independent_with(existing: &[MulticollinearRelation], candidate: &MulticollinearRelation) -> bool {
    let mut all: Vec<&Vec<f64>> = existing.iter().map(|r| &r.coefficients).collect();
    all.push(&candidate.coefficients);
    let k = all.len();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g.set(i, j, dot(all[i], all[j]));
        }
    }
    match linalg::sym_eigen(&g) {
        Ok(eig) => eig.values[0] > 1e-8,
        Err(_) => false,
    }
}

/// Planted synthetic design: iid N(0,1) entries, then per relation one
/// randomly chosen column is replaced by a random +/-10-weighted combination
/// of q-1 other columns; entrywise Gaussian noise is added last. Relation
/// supports are disjoint across relations and returned as ground truth.
pub fn synth_generate(n: usize, p: usize, spec: &PlantedSpec) -> Result<(Matrix, Vec<Vec<usize>>)> {
    if n == 0 || p == 0 {
        return Err(Error::Parameter("synth_generate: n and p must be positive".into()));
    }
    if spec.noise_sigma < 0.0 {
        return Err(Error::Parameter("noise_sigma must be nonnegative".into()));
    }
    let total: usize = spec.relation_sizes.iter().sum();
    if spec.relation_sizes.iter().any(|&q| q < 2 || q > p) {
        return Err(Error::Parameter("each relation size must be in [2, p]".into()));
    }
    if total > p {
        return Err(Error::Parameter(format!(
            "relations need {total} distinct columns but p = {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut cols: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| std_normal.sample(&mut rng)).collect())
        .collect();

    // Disjoint supports drawn from a shuffled index pool.
    let mut pool: Vec<usize> = (0..p).collect();
    for i in (1..p).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    let mut supports = Vec::new();
    let mut offset = 0;
    for &q in &spec.relation_sizes {
        let mut s: Vec<usize> = pool[offset..offset + q].to_vec();
        offset += q;
        s.sort_unstable();
        let replaced = s[rng.gen_range(0..q)];
        let (lo, hi) = spec.gamma_range;
        let mut combo = vec![0.0; n];
        for &j in s.iter().filter(|&&j| j != replaced) {
            let gamma = rng.gen_range(lo..hi);
            for (c, v) in combo.iter_mut().zip(&cols[j]) {
                *c += gamma * v;
            }
        }
        cols[replaced] = combo;
        supports.push(s);
    }

    if spec.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sigma).expect("noise distribution");
        for col in cols.iter_mut() {
            for v in col.iter_mut() {
                *v += noise.sample(&mut rng);
            }
        }
    }
    Ok((Matrix::from_columns(&cols)?, supports))
}

/// Exact-support-match accuracy and false positive rate, in percent.
pub fn evaluate_detection(found: &[Vec<usize>], planted: &[Vec<usize>]) -> (f64, f64) {
    let normalize = |s: &Vec<usize>| {
        let mut v = s.clone();
        v.sort_unstable();
        v
    };
    let planted: Vec<Vec<usize>> = planted.iter().map(normalize).collect();
    let found: Vec<Vec<usize>> = found.iter().map(normalize).collect();
    let matched = planted.iter().filter(|p| found.contains(p)).count();
    let spurious = found.iter().filter(|f| !planted.contains(f)).count();
    let acc = if planted.is_empty() {
        100.0
    } else {
        100.0 * matched as f64 / planted.len() as f64
    };
    let fpr = 100.0 * spurious as f64 / found.len().max(1) as f64;
    (acc, fpr)
}
