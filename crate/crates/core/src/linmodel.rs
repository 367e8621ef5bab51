//! The flat model `V = H^n = R^{4n}` with its quaternionic structure, scalar
//! 2-form, the three metrics and the quaternionic skew-Hermitian form.
//!
//! # Coordinates
//!
//! A vector `x` in `R^{4n}` is a column of `n` quaternions
//! `x_k = x[4k] + x[4k+1] i + x[4k+2] j + x[4k+3] k`, i.e. the real index is
//! `4 * component + quaternion_part`.
//!
//! * `GL(n, H)` acts by left matrix multiplication.
//! * `J_a x = x * conj(e_a)` componentwise, with `(e_1, e_2, e_3) = (i, j, k)`.
//!   Right multiplication by the conjugate makes `J_1 J_2 = J_3` and
//!   `J_1 J_2 J_3 = -Id`.
//! * `omega0(x, y) = Re(sum_k conj(x_k) j y_k)`.
//! * `g_a(x, y) = omega0(x, J_a y)`.
//!
//! Bilinear forms are stored as Gram matrices: `omega0(x, y) = x^T Omega y`.

use crate::error::{Error, Result};
use crate::linalg::{inertia, rank};
use crate::matrix::{basis_vector, Mat};
use crate::quaternion::Quaternion;
use crate::scalar::{Scalar, DEFAULT_TOLERANCE};

#[derive(Clone, Debug)]
pub struct FlatModel<T> {
    n: usize,
    tol: f64,
    j: [Mat<T>; 3],
    omega: Mat<T>,
    g: [Mat<T>; 3],
}

/// Value of `h(x, y) = omega0(x, y) Id + sum_a g_a(x, y) J_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct QshValue<T> {
    pub scalar: T,
    pub sp1: [T; 3],
}

impl<T: Scalar> QshValue<T> {
    /// The endomorphism `h(x, y)` as a matrix.
    pub fn to_matrix(&self, model: &FlatModel<T>) -> Mat<T> {
        let mut m = Mat::identity(model.dim()).scale(&self.scalar);
        for a in 0..3 {
            m = &m + &model.j(a).scale(&self.sp1[a]);
        }
        m
    }
}

fn quaternion_at<T: Scalar>(x: &[T], k: usize) -> Quaternion<T> {
    Quaternion::new(
        x[4 * k].clone(),
        x[4 * k + 1].clone(),
        x[4 * k + 2].clone(),
        x[4 * k + 3].clone(),
    )
}

impl<T: Scalar> FlatModel<T> {
    /// Build the standard model on `H^n` using the default tolerance.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tolerance(n, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(n: usize, tol: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let dim = 4 * n;
        let j: [Mat<T>; 3] = std::array::from_fn(|a| {
            let unit = Quaternion::<T>::unit(a + 1).conj();
            Mat::from_fn(dim, dim, |r, c| {
                let (k, p) = (c / 4, c % 4);
                if r / 4 != k {
                    return T::zero();
                }
                let image = Quaternion::<T>::unit(p) * unit.clone();
                image.to_array()[r % 4].clone()
            })
        });
        let omega = Mat::from_fn(dim, dim, |r, c| {
            if r / 4 != c / 4 {
                return T::zero();
            }
            let x = Quaternion::<T>::unit(r % 4);
            let y = Quaternion::<T>::unit(c % 4);
            (x.conj() * Quaternion::j() * y).h0
        });
        let g = std::array::from_fn(|a| &omega * &j[a]);
        let model = Self {
            n,
            tol,
            j,
            omega,
            g,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `4n`.
    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `J_{a+1}` for `a = 0, 1, 2`.
    pub fn j(&self, a: usize) -> &Mat<T> {
        &self.j[a]
    }

    pub fn js(&self) -> &[Mat<T>; 3] {
        &self.j
    }

    /// Gram matrix of `omega0`.
    pub fn omega(&self) -> &Mat<T> {
        &self.omega
    }

    /// Gram matrix of `g_{a+1}`.
    pub fn g(&self, a: usize) -> &Mat<T> {
        &self.g[a]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<T> {
        basis_vector(self.dim(), i)
    }

    fn check_len(&self, v: &[T]) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            })
        }
    }

    pub fn omega_form(&self, x: &[T], y: &[T]) -> T {
        self.omega.bilinear(x, y)
    }

    pub fn g_form(&self, a: usize, x: &[T], y: &[T]) -> T {
        self.g[a].bilinear(x, y)
    }

    /// Row vector of the covector `omega0(x, -)`.
    pub fn omega_covector(&self, x: &[T]) -> Vec<T> {
        self.omega.vecmat(x)
    }

    /// Row vector of the covector `g_a(x, -)`.
    pub fn g_covector(&self, a: usize, x: &[T]) -> Vec<T> {
        self.g[a].vecmat(x)
    }

    /// `omega0(x, y)` computed from quaternion arithmetic instead of the
    /// Gram matrix.
    pub fn omega_quaternionic(&self, x: &[T], y: &[T]) -> T {
        (0..self.n)
            .map(|k| (quaternion_at(x, k).conj() * Quaternion::j() * quaternion_at(y, k)).h0)
            .fold(T::zero(), |a, b| a + b)
    }

    /// The quaternionic skew-Hermitian form, split into its `Id` and
    /// `J_a` coefficients.
    pub fn qsh_form(&self, x: &[T], y: &[T]) -> Result<QshValue<T>> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(QshValue {
            scalar: self.omega_form(x, y),
            sp1: std::array::from_fn(|a| self.g_form(a, x, y)),
        })
    }

    /// `Phi(x, y, z, w) = sum_a g_a(x, y) g_a(z, w)`.
    pub fn fundamental_4tensor(&self, x: &[T], y: &[T], z: &[T], w: &[T]) -> Result<T> {
        for v in [x, y, z, w] {
            self.check_len(v)?;
        }
        Ok((0..3)
            .map(|a| self.g_form(a, x, y) * self.g_form(a, z, w))
            .fold(T::zero(), |s, v| s + v))
    }

    /// Image of a quaternion under `q -> q0 Id + q1 J1 + q2 J2 + q3 J3`.
    pub fn quaternion_operator(&self, q: &Quaternion<T>) -> Mat<T> {
        let [q0, q1, q2, q3] = q.to_array();
        let mut m = Mat::identity(self.dim()).scale(&q0);
        for (a, c) in [q1, q2, q3].iter().enumerate() {
            m = &m + &self.j[a].scale(c);
        }
        m
    }

    /// Admissible frame obtained by conjugating `{J_a}` with the unit
    /// quaternion `q`: `J'_a = L_q J_a L_q^{-1}`.
    pub fn sp1_conjugate_frame(&self, q: &Quaternion<T>) -> Result<[Mat<T>; 3]> {
        let norm = q.norm_sq();
        if !(norm.clone() - T::one()).is_negligible(self.tol) {
            return Err(Error::NonUnitQuaternion {
                norm_sq: norm.to_string(),
            });
        }
        let l = self.quaternion_operator(q);
        let l_inv = self.quaternion_operator(&q.conj());
        Ok(std::array::from_fn(|a| &(&l * &self.j[a]) * &l_inv))
    }

    /// Inertia `(positive, negative, zero)` of `g_{a+1}`.
    pub fn signature(&self, a: usize) -> (usize, usize, usize) {
        inertia(&self.g[a], self.tol)
    }

    /// First basis pair `(x, y)` with `g_a(J_b e_x, J_b e_y) != g_a(e_x, e_y)`.
    pub fn hermiticity_witness(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let pulled = &(&self.j[b].transpose() * &self.g[a]) * &self.j[b];
        let diff = &pulled - &self.g[a];
        let dim = self.dim();
        (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .find(|&(r, c)| !diff[(r, c)].is_negligible(self.tol))
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let id = Mat::<T>::identity(dim);
        let minus_id = -&id;
        let tol = self.tol;
        let fail = |msg: &str| Err(Error::SelfCheck(msg.to_string()));
        for a in 0..3 {
            if !(&self.j[a] * &self.j[a]).approx_eq(&minus_id, tol) {
                return fail("J_a^2 != -Id");
            }
            let pulled = &(&self.j[a].transpose() * &self.omega) * &self.j[a];
            if !pulled.approx_eq(&self.omega, tol) {
                return fail("omega0 is not J_a-invariant");
            }
            if !self.g[a].approx_eq(&self.g[a].transpose(), tol) {
                return fail("g_a is not symmetric");
            }
        }
        if !(&(&self.j[0] * &self.j[1]) * &self.j[2]).approx_eq(&minus_id, tol) {
            return fail("J1 J2 J3 != -Id");
        }
        if !self.omega.approx_eq(&-&self.omega.transpose(), tol) {
            return fail("omega0 is not skew");
        }
        if rank(&self.omega, tol) != dim {
            return fail("omega0 is degenerate");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    type Model = FlatModel<Rational>;

    #[test]
    fn rejects_small_n() {
        assert_eq!(Model::new(1).unwrap_err(), Error::InvalidDimension(1));
        assert_eq!(Model::new(0).unwrap_err(), Error::InvalidDimension(0));
    }

    #[test]
    fn quaternionic_identity_n2() {
        let m = Model::new(2).unwrap();
        assert_eq!(m.dim(), 8);
        let prod = &(m.j(0) * m.j(1)) * m.j(2);
        assert_eq!(prod, -&Mat::identity(8));
        assert_eq!(&(m.j(0) * m.j(1)), m.j(2));
    }

    #[test]
    fn metrics_have_split_signature() {
        for n in 2..=3 {
            let m = Model::new(n).unwrap();
            for a in 0..3 {
                assert_eq!(m.signature(a), (2 * n, 2 * n, 0));
            }
        }
    }

    #[test]
    fn omega_nondegenerate_n3() {
        let m = Model::new(3).unwrap();
        assert_eq!(rank(m.omega(), 0.0), 12);
    }

    #[test]
    fn gram_matrix_matches_quaternion_formula() {
        let m = Model::new(2).unwrap();
        let x: Vec<Rational> = (0..8).map(|i| rat(i * 3 - 7, 5)).collect();
        let y: Vec<Rational> = (0..8).map(|i| rat(11 - i * i, 3)).collect();
        assert_eq!(m.omega_form(&x, &y), m.omega_quaternionic(&x, &y));
    }

    #[test]
    fn metrics_are_not_h_hermitian() {
        let m = Model::new(2).unwrap();
        for a in 0..3 {
            assert!(m.hermiticity_witness(a, a).is_none());
            for b in (0..3).filter(|&b| b != a) {
                assert!(m.hermiticity_witness(a, b).is_some());
            }
        }
    }

    #[test]
    fn qsh_form_examples() {
        let m = Model::new(2).unwrap();
        let e1 = m.basis_vector(0);
        let h = m.qsh_form(&e1, &e1).unwrap();
        assert_eq!(h.scalar, rat(0, 1));
        let j1e1 = m.j(0).matvec(&e1);
        let h = m.qsh_form(&e1, &j1e1).unwrap();
        assert_eq!(h.sp1[0], rat(0, 1));
        assert!(matches!(
            m.qsh_form(&e1, &[rat(1, 1)]),
            Err(Error::DimensionMismatch {
                expected: 8,
                got: 1
            })
        ));
    }

    #[test]
    fn identity_frame_is_unchanged() {
        let m = Model::new(2).unwrap();
        let frame = m.sp1_conjugate_frame(&Quaternion::real(rat(1, 1))).unwrap();
        for a in 0..3 {
            assert_eq!(&frame[a], m.j(a));
        }
        assert!(m
            .sp1_conjugate_frame(&Quaternion::new(rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1)))
            .is_err());
    }

    #[test]
    fn float_model_agrees() {
        let m = FlatModel::<f64>::new(2).unwrap();
        assert_eq!(m.signature(0), (4, 4, 0));
        let exact = Model::new(2).unwrap();
        assert_eq!(exact.omega().to_f64(), *m.omega());
    }
}
