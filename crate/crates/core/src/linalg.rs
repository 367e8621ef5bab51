//! Gaussian elimination: reduced echelon form, rank, nullspace, linear solves
//! and the inertia of a symmetric matrix.
//!
//! Exact scalars pivot on the first non-zero entry of each column, scanning
//! columns left to right, so the nullspace basis is reproducible. Floating
//! scalars pivot on the largest entry and treat `|x| <= tol` as zero.

use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub reduced: Mat<T>,
    pub pivots: Vec<usize>,
}

fn choose_pivot<T: Scalar>(m: &Mat<T>, col: usize, from: usize, tol: f64) -> Option<usize> {
    if T::EXACT {
        (from..m.rows()).find(|&r| !m[(r, col)].is_zero())
    } else {
        let best = (from..m.rows()).max_by(|&a, &b| {
            m[(a, col)]
                .abs()
                .partial_cmp(&m[(b, col)].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!m[(best, col)].is_negligible(tol)).then_some(best)
    }
}

fn swap_rows<T: Scalar>(m: &mut Mat<T>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols() {
        let tmp = m[(a, c)].clone();
        m[(a, c)] = m[(b, c)].clone();
        m[(b, c)] = tmp;
    }
}

pub fn rref<T: Scalar>(m: &Mat<T>, tol: f64) -> Echelon<T> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = choose_pivot(&a, c, r, tol) else {
            if !T::EXACT {
                for rr in r..rows {
                    a[(rr, c)] = T::zero();
                }
            }
            continue;
        };
        swap_rows(&mut a, r, p);
        let inv = T::one() / a[(r, c)].clone();
        for cc in c..cols {
            a[(r, cc)] = a[(r, cc)].clone() * inv.clone();
        }
        for rr in 0..rows {
            if rr == r {
                continue;
            }
            let f = a[(rr, c)].clone();
            if f.is_zero() {
                continue;
            }
            for cc in c..cols {
                let v = a[(r, cc)].clone();
                if !v.is_zero() {
                    a[(rr, cc)] = a[(rr, cc)].clone() - f.clone() * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: a, pivots }
}

pub fn rank<T: Scalar>(m: &Mat<T>, tol: f64) -> usize {
    rref(m, tol).pivots.len()
}

/// Basis of `{v : m v = 0}`, one vector per free column in increasing order.
pub fn nullspace<T: Scalar>(m: &Mat<T>, tol: f64) -> Vec<Vec<T>> {
    let Echelon { reduced, pivots } = rref(m, tol);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![T::zero(); cols];
            v[free] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(row, free)].clone();
            }
            v
        })
        .collect()
}

/// Solve `a x = b`; `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &[T], tol: f64) -> Option<Vec<T>> {
    assert_eq!(a.rows(), b.len());
    let aug = Mat::from_fn(a.rows(), a.cols() + 1, |r, c| {
        if c < a.cols() {
            a[(r, c)].clone()
        } else {
            b[r].clone()
        }
    });
    let Echelon { reduced, pivots } = rref(&aug, tol);
    if pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = vec![T::zero(); a.cols()];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = reduced[(row, a.cols())].clone();
    }
    Some(x)
}

pub fn inverse<T: Scalar>(a: &Mat<T>, tol: f64) -> Option<Mat<T>> {
    assert!(a.is_square());
    let n = a.rows();
    let aug = Mat::from_fn(n, 2 * n, |r, c| {
        if c < n {
            a[(r, c)].clone()
        } else if c - n == r {
            T::one()
        } else {
            T::zero()
        }
    });
    let Echelon { reduced, pivots } = rref(&aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Mat::from_fn(n, n, |r, c| reduced[(r, c + n)].clone()))
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix, computed by
/// symmetric congruence elimination.
///
/// When every remaining diagonal entry vanishes but an off-diagonal entry
/// `a_ij` does not, row/column `j` is added to row/column `i`, which puts
/// `2 a_ij` on the diagonal.
pub fn inertia<T: Scalar>(m: &Mat<T>, tol: f64) -> (usize, usize, usize) {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.clone();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    while k < n {
        let diag = if T::EXACT {
            (k..n).find(|&i| !a[(i, i)].is_zero())
        } else {
            (k..n)
                .max_by(|&x, &y| {
                    a[(x, x)]
                        .abs()
                        .partial_cmp(&a[(y, y)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !a[(i, i)].is_negligible(tol))
        };
        let pivot = match diag {
            Some(i) => i,
            None => {
                let off = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_negligible(tol));
                let Some((i, j)) = off else { break };
                for c in 0..n {
                    a[(i, c)] = a[(i, c)].clone() + a[(j, c)].clone();
                }
                for r in 0..n {
                    a[(r, i)] = a[(r, i)].clone() + a[(r, j)].clone();
                }
                i
            }
        };
        // symmetric swap of pivot into position k
        swap_rows(&mut a, k, pivot);
        let t = a.transpose();
        a = t;
        swap_rows(&mut a, k, pivot);
        let p = a[(k, k)].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in k + 1..n {
            let f = a[(r, k)].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for c in k..n {
                a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
            }
            for rr in k..n {
                a[(rr, r)] = a[(rr, r)].clone() - f.clone() * a[(rr, k)].clone();
            }
        }
        k += 1;
    }
    (pos, neg, n - pos - neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::scalar::{rat, Rational};

    fn m(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a, 0.0), 1);
        let ns = nullspace(&a, 0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.matvec(&v).iter().all(|x| *x == rat(0, 1)));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[rat(1, 1), rat(3, 1)], 0.0).is_none());
        let x = solve(&a, &[rat(1, 1), rat(2, 1)], 0.0).unwrap();
        assert_eq!(a.matvec(&x), vec![rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&a, 0.0).unwrap();
        assert_eq!(&a * &inv, Mat::identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]]), 0.0).is_none());
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        // zero diagonal forces the off-diagonal branch
        assert_eq!(inertia(&m(&[&[0, 1], &[1, 0]]), 0.0), (1, 1, 0));
        assert_eq!(
            inertia(&m(&[&[1, 0, 0], &[0, -3, 0], &[0, 0, 0]]), 0.0),
            (1, 1, 1)
        );
        assert_eq!(inertia(&m(&[&[2, 1], &[1, 2]]), 0.0), (2, 0, 0));
    }

    #[test]
    fn inertia_float_matches_exact() {
        let a = m(&[&[0, 2, 1], &[2, 0, 3], &[1, 3, 0]]);
        assert_eq!(inertia(&a, 0.0), inertia(&a.to_f64(), 1e-12));
    }
}
