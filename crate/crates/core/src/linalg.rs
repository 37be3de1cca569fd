//! Small dense linear algebra: Gauss-Jordan elimination and the cyclic Jacobi
//! eigenvalue method for real symmetric matrices.

use crate::scalar::Real;

/// Dense row-major matrix, just big enough for the 4x4 and 5x5 systems used here.
pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

pub fn transpose<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn matmul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

pub fn matvec<T: Real>(a: &Matrix<T>, v: &[T]) -> Vec<T> {
    a.iter().map(|row| row.iter().zip(v).map(|(&x, &y)| x * y).sum()).collect()
}

/// Solves `a x = b` by Gauss-Jordan elimination with partial pivoting.
///
/// Underdetermined systems return the basic solution (free variables set to
/// zero). Returns `None` when the system is inconsistent.
pub fn solve_basic<T: Real>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let scale = a.iter().flatten().chain(b.iter()).fold(T::one(), |acc, x| acc.max(x.abs()));
    let tiny = T::tol(1e-12) * scale;

    let mut aug: Matrix<T> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_abs) =
            (r..rows)
                .map(|i| (i, aug[i][c].abs()))
                .fold((r, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tiny {
            continue;
        }
        aug.swap(r, best);
        let p = aug[r][c];
        for x in aug[r].iter_mut() {
            *x /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = aug[i][c];
                if f != T::zero() {
                    for k in c..=cols {
                        let delta = f * aug[r][k];
                        aug[i][k] -= delta;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    // rows without a pivot must read 0 = 0
    if aug[r..].iter().any(|row| row[cols].abs() > tiny) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][cols];
    }
    Some(x)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues, sorted in decreasing order.
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn max(&self) -> (T, &[T]) {
        (self.values[0], &self.vectors[0])
    }
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.len();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12` relative to the matrix scale.
pub fn jacobi_eigen<T: Real>(m: &Matrix<T>) -> SymmetricEigen<T> {
    const MAX_SWEEPS: usize = 100;
    let n = m.len();
    let mut a = m.clone();
    let mut v = identity::<T>(n);
    let scale = a.iter().flatten().fold(T::one(), |acc, x| acc.max(x.abs()));
    let target = T::tol(1e-12) * scale;
    let half = T::lit(0.5);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_norm(&a) >= target {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
                // symmetric restore against rounding drift
                let sym = half * (a[p][q] + a[q][p]);
                a[p][q] = sym;
                a[q][p] = sym;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    SymmetricEigen {
        values: order.iter().map(|&k| a[k][k]).collect(),
        vectors: order.iter().map(|&k| (0..n).map(|r| v[r][k]).collect()).collect(),
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        let a: Matrix<f64> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_basic(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn inconsistent_system_is_none() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve_basic(&a, &[1.0, 3.0]).is_none());
    }

    #[test]
    fn underdetermined_sets_free_variables_to_zero() {
        let a = vec![vec![1.0, 1.0, 1.0]];
        let x = solve_basic(&a, &[1.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // eigenvalues 1, 3 with eigenvectors (1,-1)/sqrt2, (1,1)/sqrt2
        let m: Matrix<f64> = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let e = jacobi_eigen(&m);
        assert!((e.values[0] - 3.0).abs() < 1e-13);
        assert!((e.values[1] - 1.0).abs() < 1e-13);
        let v = &e.vectors[0];
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-13);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let m = vec![
            vec![4.0, 1.0, -2.0, 0.5],
            vec![1.0, 3.0, 0.0, 1.5],
            vec![-2.0, 0.0, 1.0, -1.0],
            vec![0.5, 1.5, -1.0, 2.0],
        ];
        let e = jacobi_eigen(&m);
        for i in 0..4 {
            for j in 0..4 {
                let r: f64 = (0..4).map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j]).sum();
                assert!((r - m[i][j]).abs() < 1e-12);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
