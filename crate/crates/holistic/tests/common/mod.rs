//! Independent oracle implementations shared by the integration suites.
//! Everything here is deliberately written from scratch against textbook
//! formulas, not by calling back into the library's numeric paths.

#![allow(dead_code)]
// Oracles favor textbook index notation over iterator chains.
#![allow(clippy::needless_range_loop)]

use holistic::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Solve A x = b by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in (row + 1)..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

/// Least squares via normal equations + elimination.
pub fn ls_oracle(x: &Matrix, y: &[f64]) -> Option<Vec<f64>> {
    let p = x.cols();
    let g = x.gram();
    let a: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| g.get(i, j)).collect()).collect();
    gauss_solve(&a, &x.t_matvec(y))
}

/// Full inverse via elimination on unit vectors.
pub fn inverse_oracle(g: &Matrix) -> Option<Vec<Vec<f64>>> {
    let n = g.rows();
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| g.get(i, j)).collect()).collect();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(gauss_solve(&a, &e)?);
    }
    // cols[j][i] = (A^{-1})_{ij}; return row-major.
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Standard normal CDF via the Abramowitz-Stegun erf series.
pub fn norm_cdf_oracle(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.2316419 * x.abs());
    let poly = t
        * (0.319381530
            + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let upper = pdf * poly;
    if x >= 0.0 {
        1.0 - upper
    } else {
        upper
    }
}

/// Quantile by bisecting the series CDF. Series accuracy ~1e-7.
pub fn quantile_oracle(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if norm_cdf_oracle(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of a symmetric 3x3 via the characteristic cubic, solved with
/// Cardano's trigonometric form. Ascending order.
pub fn eig3_oracle(a: &Matrix) -> Vec<f64> {
    assert_eq!(a.rows(), 3);
    let (a00, a01, a02) = (a.get(0, 0), a.get(0, 1), a.get(0, 2));
    let (a11, a12, a22) = (a.get(1, 1), a.get(1, 2), a.get(2, 2));
    // Characteristic polynomial t^3 + b t^2 + c t + d with
    // b = -tr(A), c = sum of principal 2x2 minors, d = -det(A).
    let b = -(a00 + a11 + a22);
    let c = a00 * a11 + a00 * a22 + a11 * a22 - a01 * a01 - a02 * a02 - a12 * a12;
    let d = -(a00 * a11 * a22 + 2.0 * a01 * a12 * a02
        - a00 * a12 * a12
        - a11 * a02 * a02
        - a22 * a01 * a01);
    // Depressed cubic s^3 + p s + q = 0 via t = s - b/3.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let mut eig: Vec<f64> = if p >= -1e-300 {
        // Triple (or near-triple) root.
        vec![-b / 3.0; 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - b / 3.0)
            .collect()
    };
    eig.sort_by(f64::total_cmp);
    eig
}

/// Cyclic coordinate descent for
/// min 1/2 ||y - X beta||^2 + gamma ||beta||_1, |beta_j| <= cap_j.
pub fn cd_box_lasso(x: &Matrix, y: &[f64], gamma: f64, caps: &[f64], sweeps: usize) -> Vec<f64> {
    let p = x.cols();
    let g = x.gram();
    let q = x.t_matvec(y);
    let mut beta = vec![0.0; p];
    let mut grad: Vec<f64> = q.iter().map(|v| -v).collect();
    for _ in 0..sweeps {
        let mut moved = 0.0f64;
        for j in 0..p {
            let gjj = g.get(j, j);
            if gjj <= 0.0 || caps[j] <= 0.0 {
                if beta[j] != 0.0 && caps[j] <= 0.0 {
                    let d = -beta[j];
                    beta[j] = 0.0;
                    for i in 0..p {
                        grad[i] += g.get(i, j) * d;
                    }
                }
                continue;
            }
            let target = beta[j] - grad[j] / gjj;
            let shrunk = (target.abs() - gamma / gjj).max(0.0) * target.signum();
            let new = shrunk.clamp(-caps[j], caps[j]);
            let d = new - beta[j];
            if d != 0.0 {
                beta[j] = new;
                for i in 0..p {
                    grad[i] += g.get(i, j) * d;
                }
                moved = moved.max(d.abs());
            }
        }
        if moved < 1e-14 {
            break;
        }
    }
    beta
}

/// Objective of the penalized problem.
pub fn penalized_objective(x: &Matrix, y: &[f64], beta: &[f64], gamma: f64) -> f64 {
    let fitted = x.matvec(beta);
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * rss + gamma * beta.iter().map(|b| b.abs()).sum::<f64>()
}

pub fn gaussian_matrix(n: usize, p: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    Matrix::from_columns(&cols).unwrap()
}

pub fn gaussian_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All subsets of {0..p} as boolean patterns.
pub fn all_patterns(p: usize) -> Vec<Vec<bool>> {
    (0..1usize << p)
        .map(|mask| (0..p).map(|j| mask >> j & 1 == 1).collect())
        .collect()
}

/// Random symmetric matrix with entries in [-1, 1].
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.gen_range(-1.0..1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}
