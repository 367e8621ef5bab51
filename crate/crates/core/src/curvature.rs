//! Formal curvature tensors `R_A` of `g = so*(2n) + sp(1)`, their first Bianchi
//! residual, the Ricci tensor and the `Q`-Hermiticity test.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liealg::{circle_parts, LieBasis, LieElement};
use crate::linalg::rank;
use crate::linmodel::FlatModel;
use crate::matrix::{axpy, Mat};
use crate::quaternion::Quaternion;
use crate::scalar::Scalar;

/// Coefficients of `R_A(x, y) = kappa omega(x, y) A + c1 (..)_so + c2 (..)_sp`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvParams<T> {
    pub kappa: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Scalar> CurvParams<T> {
    /// The Bianchi-compatible choice `c1 = 2 kappa`, `c2 = n kappa`.
    pub fn pinned(kappa: T, n: usize) -> Result<Self> {
        if kappa.is_zero() {
            return Err(Error::ZeroKappa);
        }
        Ok(Self {
            c1: kappa.clone() * T::from_int(2),
            c2: kappa.clone() * T::from_int(n as i64),
            kappa,
        })
    }

    /// Arbitrary coefficients, used for negative tests.
    pub fn free(kappa: T, c1: T, c2: T) -> Self {
        Self { kappa, c1, c2 }
    }

    /// `(c1 +- 1, c2)` and `(c1, c2 +- 1)` around the pinned values.
    pub fn perturbation_grid(kappa: T, n: usize) -> Result<[Self; 4]> {
        let p = Self::pinned(kappa, n)?;
        let one = T::one();
        Ok([
            Self::free(p.kappa.clone(), p.c1.clone() + one.clone(), p.c2.clone()),
            Self::free(p.kappa.clone(), p.c1.clone() - one.clone(), p.c2.clone()),
            Self::free(p.kappa.clone(), p.c1.clone(), p.c2.clone() + one.clone()),
            Self::free(p.kappa.clone(), p.c1.clone(), p.c2.clone() - one),
        ])
    }

    pub fn is_pinned(&self, n: usize) -> bool {
        self.c1 == self.kappa.clone() * T::from_int(2)
            && self.c2 == self.kappa.clone() * T::from_int(n as i64)
    }
}

/// `R(e_x, e_y)` for every pair of standard basis vectors.
#[derive(Clone, Debug)]
pub struct CurvTensor<T> {
    dim: usize,
    values: Vec<Mat<T>>,
}

impl<T: Scalar> CurvTensor<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            values: vec![Mat::zeros(dim, dim); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, x: usize, y: usize) -> &Mat<T> {
        &self.values[x * self.dim + y]
    }

    /// Trilinear evaluation `R(x, y) z`.
    pub fn apply(&self, x: &[T], y: &[T], z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let w = self.at(i, j).matvec(z);
                axpy(&(xi.clone() * yj.clone()), &w, &mut out);
            }
        }
        out
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|x| (x..self.dim).all(|y| (self.at(x, y) + self.at(y, x)).is_negligible(tol)))
    }

    /// Check every value lies in `g`.
    pub fn check_values_in_algebra(&self, model: &FlatModel<T>, basis: &LieBasis<T>) -> Result<()> {
        for m in &self.values {
            basis.decompose(model, m)?;
        }
        Ok(())
    }

    /// Values for `x < y`, flattened; the image of `A` under `A -> R_A`.
    fn flatten_upper(&self) -> Vec<T> {
        let mut out = Vec::new();
        for x in 0..self.dim {
            for y in x + 1..self.dim {
                out.extend_from_slice(self.at(x, y).as_slice());
            }
        }
        out
    }
}

/// `R_A` on all pairs of basis vectors.
pub fn curvature_of<T: Scalar>(
    model: &FlatModel<T>,
    basis: &LieBasis<T>,
    a: &LieElement<T>,
    params: &CurvParams<T>,
) -> Result<CurvTensor<T>> {
    basis.decompose(model, &a.matrix)?;
    let dim = model.dim();
    let am = &a.matrix;
    let images: Vec<Vec<T>> = (0..dim).map(|i| am.column(i)).collect();
    let rows: Vec<Vec<Mat<T>>> = (0..dim)
        .into_par_iter()
        .map(|x| {
            let ex = model.basis_vector(x);
            (0..dim)
                .map(|y| {
                    let ey = model.basis_vector(y);
                    let (so_xy, sp_xy) = circle_parts(model, &ex, &images[y])?;
                    let (so_yx, sp_yx) = circle_parts(model, &ey, &images[x])?;
                    let mut r = am.scale(&(params.kappa.clone() * model.omega()[(x, y)].clone()));
                    r = &r + &(&so_xy - &so_yx).scale(&params.c1);
                    for k in 0..3 {
                        let c = (sp_xy[k].clone() - sp_yx[k].clone()) * params.c2.clone();
                        if !c.is_zero() {
                            r = &r + &model.j(k).scale(&c);
                        }
                    }
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvTensor {
        dim,
        values: rows.into_iter().flatten().collect(),
    })
}

/// Direct evaluation of the `(1,3)` expansion of `R_A(x, y) z`:
///
/// ```text
/// kappa w(x,y) Az
///  + c1/4 (w(x,z) Ay - sum g_a(x,z) J_a Ay + w(Ay,z) x - sum g_a(Ay,z) J_a x)
///  - c1/4 (w(y,z) Ax - sum g_a(y,z) J_a Ax + w(Ax,z) y - sum g_a(Ax,z) J_a y)
///  - c2/(2n) sum (g_a(x,Ay) - g_a(y,Ax)) J_a z
/// ```
pub fn curvature_expanded<T: Scalar>(
    model: &FlatModel<T>,
    a: &Mat<T>,
    params: &CurvParams<T>,
    x: &[T],
    y: &[T],
    z: &[T],
) -> Vec<T> {
    let w = |u: &[T], v: &[T]| model.omega_form(u, v);
    let g = |k: usize, u: &[T], v: &[T]| model.g_form(k, u, v);
    let ax = a.matvec(x);
    let ay = a.matvec(y);
    let az = a.matvec(z);
    let quarter = params.c1.clone() * T::ratio(1, 4);
    let mut out = vec![T::zero(); model.dim()];
    axpy(&(params.kappa.clone() * w(x, y)), &az, &mut out);

    axpy(&(quarter.clone() * w(x, z)), &ay, &mut out);
    axpy(&(quarter.clone() * w(&ay, z)), x, &mut out);
    axpy(&(-quarter.clone() * w(y, z)), &ax, &mut out);
    axpy(&(-quarter.clone() * w(&ax, z)), y, &mut out);
    let sp = params.c2.clone() / T::from_int(2 * model.n() as i64);
    for k in 0..3 {
        let j = model.j(k);
        axpy(&(-quarter.clone() * g(k, x, z)), &j.matvec(&ay), &mut out);
        axpy(&(-quarter.clone() * g(k, &ay, z)), &j.matvec(x), &mut out);
        axpy(&(quarter.clone() * g(k, y, z)), &j.matvec(&ax), &mut out);
        axpy(&(quarter.clone() * g(k, &ax, z)), &j.matvec(y), &mut out);
        let c = -(sp.clone() * (g(k, x, &ay) - g(k, y, &ax)));
        axpy(&c, &j.matvec(z), &mut out);
    }
    out
}

/// Largest Bianchi cyclic sum and the basis triple where it occurs.
#[derive(Clone, Debug, PartialEq)]
pub struct BianchiReport<T> {
    pub residual: T,
    pub witness: Option<(usize, usize, usize)>,
}

/// Max-norm of `R(x,y)z + R(y,z)x + R(z,x)y` over basis triples.
///
/// The cyclic sum is alternating once `R` is antisymmetric, so triples
/// `x < y < z` cover all others up to sign.
pub fn bianchi_check<T: Scalar>(r: &CurvTensor<T>) -> BianchiReport<T> {
    let d = r.dim();
    let triples: Vec<(usize, usize, usize)> = (0..d)
        .flat_map(|x| (x + 1..d).flat_map(move |y| (y + 1..d).map(move |z| (x, y, z))))
        .collect();
    let best = triples
        .par_iter()
        .map(|&(x, y, z)| {
            let v = (0..d)
                .map(|i| {
                    (r.at(x, y)[(i, z)].clone()
                        + r.at(y, z)[(i, x)].clone()
                        + r.at(z, x)[(i, y)].clone())
                    .abs()
                })
                .fold(T::zero(), |m, v| if v > m { v } else { m });
            (v, (x, y, z))
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a });
    match best {
        Some((v, t)) if !v.is_zero() => BianchiReport {
            residual: v,
            witness: Some(t),
        },
        _ => BianchiReport {
            residual: T::zero(),
            witness: None,
        },
    }
}

pub fn bianchi_residual<T: Scalar>(r: &CurvTensor<T>) -> T {
    bianchi_check(r).residual
}

/// `Ric(y, z) = Tr(x -> R(x, y) z)`, summed over the standard basis.
pub fn ricci_of<T: Scalar>(r: &CurvTensor<T>) -> Mat<T> {
    let d = r.dim();
    Mat::from_fn(d, d, |y, z| {
        (0..d)
            .map(|i| r.at(i, y)[(i, z)].clone())
            .fold(T::zero(), |s, v| s + v)
    })
}

/// Gram matrix of `(y, z) -> omega0(A y, z)`.
pub fn omega_of<T: Scalar>(model: &FlatModel<T>, a: &Mat<T>) -> Mat<T> {
    &a.transpose() * model.omega()
}

/// Closed form `(2n+1) k w(Ay,z) + k/2 sum g_a(y,z) Tr(J_a A) - k sum w(J_a A J_a y, z)`.
pub fn ricci_closed_form<T: Scalar>(model: &FlatModel<T>, a: &Mat<T>, kappa: &T) -> Mat<T> {
    let n = model.n() as i64;
    let mut ric = omega_of(model, a).scale(&(kappa.clone() * T::from_int(2 * n + 1)));
    let half = kappa.clone() * T::ratio(1, 2);
    for k in 0..3 {
        let j = model.j(k);
        let tr = (j * a).trace();
        ric = &ric + &model.g(k).scale(&(half.clone() * tr));
        let jaj = &(j * a) * j;
        ric = &ric - &omega_of(model, &jaj).scale(kappa);
    }
    ric
}

/// `2(n+2) k w(A_so y, z) + 4n k w(A_sp y, z)`.
pub fn ricci_split_form<T: Scalar>(model: &FlatModel<T>, a: &LieElement<T>, kappa: &T) -> Mat<T> {
    let n = model.n() as i64;
    let so = omega_of(model, &a.so_part).scale(&(kappa.clone() * T::from_int(2 * (n + 2))));
    let sp = omega_of(model, &a.sp_matrix()).scale(&(kappa.clone() * T::from_int(4 * n)));
    &so + &sp
}

/// Which complex structure broke invariance.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    /// `J_{a+1}` of the standard frame.
    Generator(usize),
    /// `J'_1` of the frame conjugated by the sampled quaternion at this index.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermiticityWitness<T> {
    pub structure: Structure,
    pub x: usize,
    pub y: usize,
    /// `T(Jx, Jy) - T(x, y)`.
    pub defect: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermiticityReport<T> {
    pub hermitian: bool,
    pub witness: Option<HermiticityWitness<T>>,
}

fn invariance_defect<T: Scalar>(t: &Mat<T>, j: &Mat<T>, tol: f64) -> Option<(usize, usize, T)> {
    let diff = &(&(&j.transpose() * t) * j) - t;
    let d = t.rows();
    (0..d)
        .flat_map(|x| (0..d).map(move |y| (x, y)))
        .find(|&(x, y)| !diff[(x, y)].is_negligible(tol))
        .map(|(x, y)| (x, y, diff[(x, y)].clone()))
}

/// `T(Jx, Jy) = T(x, y)` for `J = J_1, J_2, J_3` and for `J'_1` of every
/// frame conjugated by a quaternion in `frames`.
pub fn is_q_hermitian<T: Scalar>(
    model: &FlatModel<T>,
    t: &Mat<T>,
    frames: &[Quaternion<T>],
) -> Result<HermiticityReport<T>> {
    let tol = model.tolerance();
    let mut candidates: Vec<(Structure, Mat<T>)> = (0..3)
        .map(|a| (Structure::Generator(a), model.j(a).clone()))
        .collect();
    for (i, q) in frames.iter().enumerate() {
        let frame = model.sp1_conjugate_frame(q)?;
        let [j1, _, _] = frame;
        candidates.push((Structure::Sampled(i), j1));
    }
    for (structure, j) in candidates {
        if let Some((x, y, defect)) = invariance_defect(t, &j, tol) {
            return Ok(HermiticityReport {
                hermitian: false,
                witness: Some(HermiticityWitness {
                    structure,
                    x,
                    y,
                    defect,
                }),
            });
        }
    }
    Ok(HermiticityReport {
        hermitian: true,
        witness: None,
    })
}

/// Image matrix of `A -> R_A` over the basis of `g`, one row per basis element.
pub fn curvature_map_matrix<T: Scalar>(
    model: &FlatModel<T>,
    basis: &LieBasis<T>,
    params: &CurvParams<T>,
) -> Result<Mat<T>> {
    let rows = (0..basis.dim())
        .map(|i| {
            let a = basis.lie_element(model, i);
            curvature_of(model, basis, &a, params).map(|r| r.flatten_upper())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_rows(rows))
}

/// Rank of `A -> R_A`; equals `dim g` when the map is injective.
pub fn curvature_map_rank<T: Scalar>(
    model: &FlatModel<T>,
    basis: &LieBasis<T>,
    params: &CurvParams<T>,
) -> Result<usize> {
    let m = curvature_map_matrix(model, basis, params)?;
    Ok(rank(&m, model.tolerance()))
}

/// Singular values of the curvature map, in decreasing order.
pub fn curvature_map_singular_values(
    model: &FlatModel<f64>,
    basis: &LieBasis<f64>,
    params: &CurvParams<f64>,
) -> Result<Vec<f64>> {
    let m = curvature_map_matrix(model, basis, params)?;
    let na = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let mut sv: Vec<f64> = na.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(sv)
}

/// Number of singular values above `rel_tol * max`.
pub fn numerical_rank(singular_values: &[f64], rel_tol: f64) -> usize {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::enumerate_so_star_basis;
    use crate::scalar::{rat, Rational};

    type Model = FlatModel<Rational>;

    fn setup(n: usize) -> (Model, LieBasis<Rational>) {
        let m = Model::new(n).unwrap();
        let b = enumerate_so_star_basis(&m).unwrap();
        (m, b)
    }

    #[test]
    fn zero_element_gives_zero_tensor() {
        let (m, b) = setup(2);
        let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
        let r = curvature_of(&m, &b, &LieElement::zero(&m), &p).unwrap();
        assert!((0..8).all(|x| (0..8).all(|y| r.at(x, y).is_negligible(0.0))));
        assert_eq!(bianchi_residual(&r), rat(0, 1));
    }

    #[test]
    fn pinned_params_satisfy_bianchi_for_j1() {
        let (m, b) = setup(2);
        let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
        let a = b.lie_element(&m, b.dim() - 3);
        let r = curvature_of(&m, &b, &a, &p).unwrap();
        assert!(r.is_antisymmetric(0.0));
        assert_eq!(bianchi_check(&r).witness, None);
        r.check_values_in_algebra(&m, &b).unwrap();
    }

    #[test]
    fn shifted_c2_breaks_bianchi() {
        let (m, b) = setup(2);
        let p = CurvParams::free(rat(1, 1), rat(2, 1), rat(3, 1));
        let a = b.lie_element(&m, b.dim() - 3);
        let r = curvature_of(&m, &b, &a, &p).unwrap();
        let rep = bianchi_check(&r);
        assert!(rep.residual > rat(0, 1));
        assert!(rep.witness.is_some());
    }

    #[test]
    fn rejects_matrix_outside_g() {
        let (m, b) = setup(2);
        let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
        let bogus = LieElement {
            matrix: Mat::identity(8),
            so_part: Mat::identity(8),
            sp_coeffs: [rat(0, 1), rat(0, 1), rat(0, 1)],
        };
        assert!(matches!(
            curvature_of(&m, &b, &bogus, &p),
            Err(Error::NotInAlgebra { .. })
        ));
        assert_eq!(CurvParams::pinned(rat(0, 1), 2), Err(Error::ZeroKappa));
    }

    #[test]
    fn zero_form_is_hermitian() {
        let (m, _) = setup(2);
        let rep = is_q_hermitian(&m, &Mat::zeros(8, 8), &[]).unwrap();
        assert!(rep.hermitian);
    }

    #[test]
    fn ricci_of_j1_is_not_hermitian() {
        let (m, b) = setup(2);
        let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
        let a = b.lie_element(&m, b.dim() - 3);
        let ric = ricci_of(&curvature_of(&m, &b, &a, &p).unwrap());
        let rep = is_q_hermitian(&m, &ric, &[]).unwrap();
        assert!(!rep.hermitian);
        // J1 itself preserves Ric_{J1}; an anticommuting structure does not
        let w = rep.witness.unwrap();
        assert_ne!(w.structure, Structure::Generator(0));
    }
}
