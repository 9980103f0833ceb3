//! Dense linear-algebra kernel: symmetric eigendecomposition (cyclic Jacobi),
//! least squares via normal equations, residual variance, correlations, and
//! the standard-normal quantile.

use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Numerical tolerances for the kernel. All overridable; the defaults are the
/// module constants used throughout the crate.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Maximum relative asymmetry accepted by `sym_eigen`.
    pub symmetry: f64,
    /// Jacobi convergence: off-diagonal Frobenius norm <= `jacobi * ||A||_F`.
    pub jacobi: f64,
    /// Maximum Jacobi sweeps.
    pub max_sweeps: usize,
    /// Full-rank requirement: smallest singular value > `rank * largest`.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { symmetry: 1e-10, jacobi: 1e-12, max_sweeps: 100, rank: 1e-10 }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::Structure(format!("matrix must be nonempty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Structure(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Structure("matrix entries must be finite".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from column vectors, all of equal length.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Matrix> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::Structure("from_columns: empty input".into()));
        }
        let n = cols[0].len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Structure("from_columns: ragged columns".into()));
        }
        let mut data = vec![0.0; n * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                data[i * cols.len() + j] = *v;
            }
        }
        Matrix::new(n, cols.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            m.data[ii * self.cols..(ii + 1) * self.cols].copy_from_slice(self.row(i));
        }
        m
    }

    /// Append a column of ones (the intercept).
    pub fn with_intercept(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            m.data[i * (self.cols + 1)..i * (self.cols + 1) + self.cols]
                .copy_from_slice(self.row(i));
            m.set(i, self.cols, 1.0);
        }
        m
    }

    /// A^T A, exploiting symmetry.
    pub fn gram(&self) -> Matrix {
        let p = self.cols;
        let mut g = Matrix::zeros(p, p);
        for i in 0..self.rows {
            let r = self.row(i);
            for j in 0..p {
                let rj = r[j];
                if rj != 0.0 {
                    for (k, &rk) in r.iter().enumerate().skip(j) {
                        g.data[j * p + k] += rj * rk;
                    }
                }
            }
        }
        for j in 0..p {
            for k in 0..j {
                g.data[j * p + k] = g.data[k * p + j];
            }
        }
        g
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// A^T x.
    pub fn t_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += a * xi;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending with
/// matching unit-norm eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eigen(a: &Matrix) -> Result<EigenSystem> {
    sym_eigen_with(a, &Tolerances::default())
}

pub fn sym_eigen_with(a: &Matrix, tol: &Tolerances) -> Result<EigenSystem> {
    if a.rows != a.cols {
        return Err(Error::Structure(format!("sym_eigen: matrix is {}x{}", a.rows, a.cols)));
    }
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    if a.max_asymmetry() > tol.symmetry * scale.max(1.0) {
        return Err(Error::Structure("sym_eigen: matrix is not symmetric".into()));
    }

    let n = a.rows;
    let mut m = a.clone();
    // Symmetrize exactly so rotations stay consistent.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let mut v = Matrix::identity(n);

    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m.get(i, j) * m.get(i, j);
                }
            }
        }
        s.sqrt()
    };

    let threshold = tol.jacobi * scale;
    for _sweep in 0..tol.max_sweeps {
        if off(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= threshold / (n as f64) {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(m.get(k, k));
        let mut col = v.column(k);
        let nrm = norm2(&col);
        // Sign convention: the largest-magnitude component is positive. Keeps
        // repeated runs byte-identical.
        let lead = col
            .iter()
            .cloned()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for c in col.iter_mut() {
            *c *= sign / nrm;
        }
        vectors.push(col);
    }
    Ok(EigenSystem { values, vectors })
}

/// Lower-triangular Cholesky factor of an SPD matrix, or `None` when a pivot
/// falls below `pivot_tol` times the largest diagonal.
pub fn cholesky(a: &Matrix, pivot_tol: f64) -> Option<Matrix> {
    let n = a.rows;
    let diag_max = (0..n).map(|i| a.get(i, i)).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= pivot_tol * diag_max {
                    return None;
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// Solve L L^T x = b given the Cholesky factor L.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Least-squares result with the solve path taken.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub beta: Vec<f64>,
    /// True when the normal equations were near-singular and the eigen-based
    /// pseudo-inverse path was used.
    pub used_fallback: bool,
}

/// beta_hat = (X^T X)^{-1} X^T y via normal equations, with an eigen-based
/// pseudo-inverse fallback (cutoff `rank_tol * lambda_max`) when the Cholesky
/// factorization is unreliable. Rank-deficient designs are rejected.
pub fn least_squares_detailed(x: &Matrix, y: &[f64]) -> Result<LeastSquares> {
    if y.len() != x.rows {
        return Err(Error::Structure(format!(
            "least_squares: y has length {}, X has {} rows",
            y.len(),
            x.rows
        )));
    }
    let tol = Tolerances::default();
    let g = x.gram();
    let xty = x.t_matvec(y);
    let eig = sym_eigen(&g)?;
    let lam_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let lam_min = eig.values.first().copied().unwrap_or(0.0);
    // Singular values of X are sqrt of the gram eigenvalues.
    let rank_cut = tol.rank * tol.rank * lam_max;
    if lam_min <= rank_cut {
        let cond = if lam_min > 0.0 { (lam_max / lam_min).sqrt() } else { f64::INFINITY };
        return Err(Error::Singular { context: "least_squares".into(), cond });
    }
    if let Some(l) = cholesky(&g, 1e-14) {
        let beta = cholesky_solve(&l, &xty);
        // Verify the solve; fall back if the factorization degraded.
        let resid = {
            let gb = g.matvec(&beta);
            gb.iter().zip(&xty).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max)
        };
        if resid <= 1e-8 * (1.0 + norm2(&xty)) {
            return Ok(LeastSquares { beta, used_fallback: false });
        }
    }
    // Pseudo-inverse through the eigenbasis.
    let p = g.rows;
    let mut beta = vec![0.0; p];
    let cutoff = tol.rank * lam_max;
    for (lam, v) in eig.values.iter().zip(&eig.vectors) {
        if *lam > cutoff {
            let coeff = dot(v, &xty) / lam;
            for (b, vj) in beta.iter_mut().zip(v) {
                *b += coeff * vj;
            }
        }
    }
    Ok(LeastSquares { beta, used_fallback: true })
}

pub fn least_squares(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    least_squares_detailed(x, y).map(|r| r.beta)
}

/// sigma_tilde = sqrt(RSS / (n - p)), the residual estimate of sigma.
pub fn sigma_tilde(x: &Matrix, y: &[f64]) -> Result<f64> {
    let (n, p) = (x.rows, x.cols);
    if n <= p {
        return Err(Error::DegreesOfFreedom { n, p });
    }
    let beta = least_squares(x, y)?;
    let fitted = x.matvec(&beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((rss / (n - p) as f64).sqrt())
}

/// Pearson correlation, clamped to [-1, 1].
pub fn pairwise_corr(xi: &[f64], xj: &[f64]) -> Result<f64> {
    if xi.len() != xj.len() || xi.len() < 2 {
        return Err(Error::Structure("pairwise_corr: need two vectors of equal length >= 2".into()));
    }
    let n = xi.len() as f64;
    let mi = xi.iter().sum::<f64>() / n;
    let mj = xj.iter().sum::<f64>() / n;
    let mut sij = 0.0;
    let mut sii = 0.0;
    let mut sjj = 0.0;
    for (a, b) in xi.iter().zip(xj) {
        let da = a - mi;
        let db = b - mj;
        sij += da * db;
        sii += da * da;
        sjj += db * db;
    }
    if sii <= 0.0 || sjj <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sij / (sii * sjj).sqrt()).clamp(-1.0, 1.0))
}

/// Inverse standard-normal CDF.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal_quantile: p = {p} outside (0,1)")));
    }
    let n = Normal::standard();
    Ok(n.inverse_cdf(p))
}

/// Diagonal of (A)^{-1} for symmetric positive definite A.
pub fn sym_inverse_diag(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.rows;
    let eig = sym_eigen(a)?;
    let lam_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let lam_min = eig.values.first().copied().unwrap_or(0.0);
    if lam_min <= Tolerances::default().rank * Tolerances::default().rank * lam_max
        || lam_min <= 0.0
    {
        let cond = if lam_min > 0.0 { lam_max / lam_min } else { f64::INFINITY };
        return Err(Error::Singular { context: "sym_inverse_diag".into(), cond });
    }
    match cholesky(a, 1e-14) {
        Some(l) => {
            let mut diag = vec![0.0; n];
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                diag[j] = cholesky_solve(&l, &e)[j];
            }
            Ok(diag)
        }
        None => {
            let mut diag = vec![0.0; n];
            for (lam, v) in eig.values.iter().zip(&eig.vectors) {
                for (d, vj) in diag.iter_mut().zip(v) {
                    *d += vj * vj / lam;
                }
            }
            Ok(diag)
        }
    }
}
