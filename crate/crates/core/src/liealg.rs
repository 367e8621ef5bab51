//! Matrix realization of `g = so*(2n) + sp(1)` inside `gl(4n, R)`, the
//! invariant projections onto `Z(Q) = gl(n, H)` and `Q = span{J_a}`, and the
//! equivariant map `x o y : S^2 V -> g`.

use crate::error::{Error, Result};
use crate::linalg::{inverse, nullspace};
use crate::linmodel::FlatModel;
use crate::matrix::{dot, Mat};
use crate::scalar::Scalar;

/// An element of `g` with its splitting `M = M_so + sum_a c_a J_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieElement<T> {
    pub matrix: Mat<T>,
    pub so_part: Mat<T>,
    pub sp_coeffs: [T; 3],
}

impl<T: Scalar> LieElement<T> {
    pub fn from_parts(model: &FlatModel<T>, so_part: Mat<T>, sp_coeffs: [T; 3]) -> Self {
        let mut matrix = so_part.clone();
        for (a, c) in sp_coeffs.iter().enumerate() {
            matrix = &matrix + &model.j(a).scale(c);
        }
        Self {
            matrix,
            so_part,
            sp_coeffs,
        }
    }

    pub fn zero(model: &FlatModel<T>) -> Self {
        let d = model.dim();
        Self::from_parts(model, Mat::zeros(d, d), [T::zero(), T::zero(), T::zero()])
    }

    pub fn sp_matrix(&self) -> Mat<T> {
        &self.matrix - &self.so_part
    }

    pub fn has_zero_sp_part(&self, tol: f64) -> bool {
        self.sp_coeffs.iter().all(|c| c.is_negligible(tol))
    }
}

/// Basis of `g`: the `n(2n-1)` elements of `so*(2n)` followed by `J_1, J_2, J_3`.
#[derive(Clone, Debug)]
pub struct LieBasis<T> {
    pub so_basis: Vec<Mat<T>>,
    pub sp_basis: [Mat<T>; 3],
    // rows map vec(M) to coordinates in the basis (inverse Gram times basis)
    dual: Mat<T>,
}

/// `dim so*(2n) = n(2n - 1)`.
pub fn so_star_dimension(n: usize) -> usize {
    n * (2 * n - 1)
}

fn frobenius<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> T {
    dot(a.as_slice(), b.as_slice())
}

/// Solve `{M : M J_a = J_a M for all a, omega0(Mx, y) + omega0(x, My) = 0}`
/// by exact nullspace computation.
pub fn enumerate_so_star_basis<T: Scalar>(model: &FlatModel<T>) -> Result<LieBasis<T>> {
    let dim = model.dim();
    let unknowns = dim * dim;
    let var = |r: usize, c: usize| r * dim + c;
    let omega = model.omega();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for a in 0..3 {
        let j = model.j(a);
        for r in 0..dim {
            for c in 0..dim {
                let mut eq = vec![T::zero(); unknowns];
                for k in 0..dim {
                    // (M J)_{rc} - (J M)_{rc}
                    eq[var(r, k)] = eq[var(r, k)].clone() + j[(k, c)].clone();
                    eq[var(k, c)] = eq[var(k, c)].clone() - j[(r, k)].clone();
                }
                if eq.iter().any(|v| !v.is_zero()) {
                    rows.push(eq);
                }
            }
        }
    }
    // Omega M + M^T Omega is skew, so the strict upper triangle suffices
    // together with the diagonal
    for r in 0..dim {
        for c in r..dim {
            let mut eq = vec![T::zero(); unknowns];
            for k in 0..dim {
                eq[var(k, c)] = eq[var(k, c)].clone() + omega[(r, k)].clone();
                eq[var(k, r)] = eq[var(k, r)].clone() + omega[(k, c)].clone();
            }
            if eq.iter().any(|v| !v.is_zero()) {
                rows.push(eq);
            }
        }
    }
    let system = Mat::from_rows(rows);
    let so_basis: Vec<Mat<T>> = nullspace(&system, model.tolerance())
        .into_iter()
        .map(|v| Mat::from_fn(dim, dim, |r, c| v[var(r, c)].clone()))
        .collect();
    let expected = so_star_dimension(model.n());
    if so_basis.len() != expected {
        return Err(Error::SelfCheck(format!(
            "so*(2n) has dimension {}, expected {expected}",
            so_basis.len()
        )));
    }
    LieBasis::new(model, so_basis)
}

impl<T: Scalar> LieBasis<T> {
    fn new(model: &FlatModel<T>, so_basis: Vec<Mat<T>>) -> Result<Self> {
        let sp_basis = model.js().clone();
        let all: Vec<&Mat<T>> = so_basis.iter().chain(sp_basis.iter()).collect();
        let k = all.len();
        let gram = Mat::from_fn(k, k, |i, j| frobenius(all[i], all[j]));
        let gram_inv = inverse(&gram, model.tolerance())
            .ok_or_else(|| Error::SelfCheck("g basis is linearly dependent".into()))?;
        let d2 = model.dim() * model.dim();
        let stacked = Mat::from_fn(k, d2, |i, e| all[i].as_slice()[e].clone());
        let dual = &gram_inv * &stacked;
        Ok(Self {
            so_basis,
            sp_basis,
            dual,
        })
    }

    /// `dim g = n(2n - 1) + 3`.
    pub fn dim(&self) -> usize {
        self.so_basis.len() + 3
    }

    /// Basis element `i` of `g` (so*-elements first, then `J_a`).
    pub fn element(&self, i: usize) -> &Mat<T> {
        if i < self.so_basis.len() {
            &self.so_basis[i]
        } else {
            &self.sp_basis[i - self.so_basis.len()]
        }
    }

    /// Basis element `i` as a split [`LieElement`].
    pub fn lie_element(&self, model: &FlatModel<T>, i: usize) -> LieElement<T> {
        let mut coeffs = vec![T::zero(); self.dim()];
        coeffs[i] = T::one();
        self.combine(model, &coeffs)
    }

    /// `sum_i coeffs[i] * element(i)`, split into its two parts.
    pub fn combine(&self, model: &FlatModel<T>, coeffs: &[T]) -> LieElement<T> {
        assert_eq!(coeffs.len(), self.dim());
        let d = model.dim();
        let mut so = Mat::zeros(d, d);
        for (b, c) in self.so_basis.iter().zip(coeffs) {
            if !c.is_zero() {
                so = &so + &b.scale(c);
            }
        }
        let m = self.so_basis.len();
        let sp = std::array::from_fn(|a| coeffs[m + a].clone());
        LieElement::from_parts(model, so, sp)
    }

    /// Coordinates of `m` in the basis and the residual `m - projection`.
    pub fn coordinates(&self, m: &Mat<T>) -> (Vec<T>, Mat<T>) {
        let coeffs = self.dual.matvec(m.as_slice());
        let mut recon = Mat::zeros(m.rows(), m.cols());
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                recon = &recon + &self.element(i).scale(c);
            }
        }
        let residual = m - &recon;
        (coeffs, residual)
    }

    /// Split `m = m_so + sum_a c_a J_a`, or fail if `m` is not in `g`.
    pub fn decompose(&self, model: &FlatModel<T>, m: &Mat<T>) -> Result<LieElement<T>> {
        let (coeffs, residual) = self.coordinates(m);
        if !residual.is_negligible(model.tolerance()) {
            let norm = residual
                .as_slice()
                .iter()
                .map(|v| v.to_f64().powi(2))
                .sum::<f64>()
                .sqrt();
            return Err(Error::NotInAlgebra { residual: norm });
        }
        Ok(self.combine(model, &coeffs))
    }
}

/// `omega0(x, -)` and `g_a(x, -)` relative to an admissible frame.
fn frame_covectors<T: Scalar>(
    model: &FlatModel<T>,
    frame: &[Mat<T>; 3],
    x: &[T],
) -> (Vec<T>, [Vec<T>; 3]) {
    let w = model.omega_covector(x);
    let g = std::array::from_fn(|a| frame[a].vecmat(&w));
    (w, g)
}

fn check_len<T>(model: &FlatModel<T>, v: &[T]) -> Result<()>
where
    T: Scalar,
{
    if v.len() == model.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: v.len(),
        })
    }
}

/// `pi_Z(Q)(omega0(x, -) (x) y) = 1/4 (omega0(x, -) y - sum_a g_a(x, -) J_a y)`,
/// with `g_a` and `J_a` taken from `frame`.
pub fn project_zq_in_frame<T: Scalar>(
    model: &FlatModel<T>,
    frame: &[Mat<T>; 3],
    x: &[T],
    y: &[T],
) -> Result<Mat<T>> {
    check_len(model, x)?;
    check_len(model, y)?;
    let (w, g) = frame_covectors(model, frame, x);
    let mut m = Mat::outer(y, &w);
    for a in 0..3 {
        let jy = frame[a].matvec(y);
        m = &m - &Mat::outer(&jy, &g[a]);
    }
    Ok(m.scale(&T::ratio(1, 4)))
}

pub fn project_zq<T: Scalar>(model: &FlatModel<T>, x: &[T], y: &[T]) -> Result<Mat<T>> {
    project_zq_in_frame(model, model.js(), x, y)
}

/// `pi_Q(omega0(x, -) (x) y) = -1/(4n) sum_a Tr(omega0(x, -) (x) J_a y) J_a`.
///
/// The trace is taken literally from the rank-one operator.
pub fn project_q_in_frame<T: Scalar>(
    model: &FlatModel<T>,
    frame: &[Mat<T>; 3],
    x: &[T],
    y: &[T],
) -> Result<Mat<T>> {
    check_len(model, x)?;
    check_len(model, y)?;
    let w = model.omega_covector(x);
    let d = model.dim();
    let mut m = Mat::zeros(d, d);
    for a in 0..3 {
        let tr = Mat::outer(&frame[a].matvec(y), &w).trace();
        m = &m + &frame[a].scale(&tr);
    }
    Ok(m.scale(&-T::ratio(1, 4 * model.n() as i64)))
}

pub fn project_q<T: Scalar>(model: &FlatModel<T>, x: &[T], y: &[T]) -> Result<Mat<T>> {
    project_q_in_frame(model, model.js(), x, y)
}

/// Linear extension of `pi_Z(Q)` to all of `gl(4n)`: `1/4 (M - sum_a J_a M J_a)`.
pub fn project_zq_matrix<T: Scalar>(model: &FlatModel<T>, m: &Mat<T>) -> Mat<T> {
    let mut out = m.clone();
    for j in model.js() {
        out = &out - &(&(j * m) * j);
    }
    out.scale(&T::ratio(1, 4))
}

/// Linear extension of `pi_Q`: `-1/(4n) sum_a Tr(J_a M) J_a`.
pub fn project_q_matrix<T: Scalar>(model: &FlatModel<T>, m: &Mat<T>) -> Mat<T> {
    let d = model.dim();
    let mut out = Mat::zeros(d, d);
    for j in model.js() {
        out = &out + &j.scale(&(j * m).trace());
    }
    out.scale(&-T::ratio(1, 4 * model.n() as i64))
}

/// Unscaled parts of `x o y`: the `so*(2n)` matrix
/// `pi_Z(Q)(f_{x.y})` and the `sp(1)` coefficients `-1/(2n) g_a(x, y)`.
pub fn circle_parts<T: Scalar>(model: &FlatModel<T>, x: &[T], y: &[T]) -> Result<(Mat<T>, [T; 3])> {
    let so = &project_zq(model, x, y)? + &project_zq(model, y, x)?;
    let f = -T::ratio(1, 2 * model.n() as i64);
    let sp = std::array::from_fn(|a| model.g_form(a, x, y) * f.clone());
    Ok((so, sp))
}

/// `x o y = c1 (x o y)_so + c2 (x o y)_sp` with `c1 = 2 kappa`, `c2 = n kappa`.
pub fn circle_map<T: Scalar>(
    model: &FlatModel<T>,
    x: &[T],
    y: &[T],
    kappa: &T,
) -> Result<LieElement<T>> {
    if kappa.is_negligible(model.tolerance()) {
        return Err(Error::ZeroKappa);
    }
    let (so, sp) = circle_parts(model, x, y)?;
    let c1 = kappa.clone() * T::from_int(2);
    let c2 = kappa.clone() * T::from_int(model.n() as i64);
    Ok(LieElement::from_parts(
        model,
        so.scale(&c1),
        sp.map(|v| v * c2.clone()),
    ))
}
