//! The coframe of the fiber `H^x` in the coordinates `h = h0 + h1 i + h2 j + h3 k`.

use crate::error::Result;
use crate::forms::field::{norm_sq, radius, ScalarField};
use crate::forms::vertical::VerticalForm;
use crate::forms::Coframe;
use crate::quaternion::Quaternion;

/// `(b, c)` with `(a, b, c)` a cyclic permutation of `(1, 2, 3)`.
pub fn cyclic(a: usize) -> (usize, usize) {
    match a {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => panic!("structure index must be 1, 2 or 3"),
    }
}

pub fn h(i: usize) -> ScalarField {
    ScalarField::var(i)
}

/// Rows are the `dh` coefficients of `t^3 alpha_i`.
pub fn coframe_matrix() -> [[ScalarField; 4]; 4] {
    let (h0, h1, h2, h3) = (h(0), h(1), h(2), h(3));
    [
        [h0.clone(), h1.clone(), h2.clone(), h3.clone()],
        [-&h1, h0.clone(), h3.clone(), -&h2],
        [-&h2, -&h3, h0.clone(), h1.clone()],
        [-&h3, h2, -h1, h0],
    ]
}

fn row_form(scale: &ScalarField, row: &[ScalarField; 4]) -> VerticalForm {
    VerticalForm::one_form(Coframe::Dh, std::array::from_fn(|j| &row[j] * scale))
}

/// `alpha_0 = t^-2 dt`, `alpha_a = t^-1 theta_a`, written in `dh`.
pub fn alpha_in_dh() -> [VerticalForm; 4] {
    let m = coframe_matrix();
    let s = radius().powi(-3);
    std::array::from_fn(|i| row_form(&s, &m[i]))
}

/// `theta_a = |h|^-2 (row a of the coframe matrix)`, `a in 1..=3`.
pub fn theta_in_dh(a: usize) -> VerticalForm {
    assert!((1..=3).contains(&a), "structure index must be 1, 2 or 3");
    let m = coframe_matrix();
    row_form(&norm_sq().powi(-1), &m[a])
}

/// `theta_0 = t^-1 dt`.
pub fn theta0_in_dh() -> Result<VerticalForm> {
    let t = radius();
    let dt = VerticalForm::function(Coframe::Dh, t.clone()).d()?;
    Ok(dt.scale(&t.powi(-1)))
}

/// The components of the quaternion-valued 1-form `h^-1 dh`, obtained by
/// multiplying out `h^-1 e_b` symbolically.
pub fn maurer_cartan_oracle() -> [VerticalForm; 4] {
    let q = Quaternion::new(h(0), h(1), h(2), h(3));
    let inv = q.conj().scale(&norm_sq().powi(-1));
    let columns: Vec<[ScalarField; 4]> = (0..4)
        .map(|b| (inv.clone() * Quaternion::unit(b)).to_array())
        .collect();
    std::array::from_fn(|i| {
        VerticalForm::one_form(Coframe::Dh, std::array::from_fn(|b| columns[b][i].clone()))
    })
}

pub fn alpha(i: usize) -> VerticalForm {
    VerticalForm::basis(Coframe::Alpha, i)
}

/// `beta_a = alpha_0 ^ alpha_a + alpha_b ^ alpha_c`.
pub fn beta(a: usize) -> VerticalForm {
    let (b, c) = cyclic(a);
    let first = alpha(0).wedge(&alpha(a)).expect("degree 2");
    let second = alpha(b).wedge(&alpha(c)).expect("degree 2");
    first.add(&second).expect("same space")
}

/// `dh_0 ^ dh_a + dh_b ^ dh_c` up to the sign used in `beta = sum F_a (..)`:
/// `dh0^dh1 + dh2^dh3`, `dh0^dh2 - dh1^dh3`, `dh0^dh3 + dh1^dh2`.
pub fn flat_pair(a: usize) -> VerticalForm {
    let m = |i: &[usize]| VerticalForm::monomial(Coframe::Dh, i).expect("degree 2");
    let (left, right) = match a {
        1 => (m(&[0, 1]), m(&[2, 3])),
        2 => (m(&[0, 2]), m(&[1, 3]).neg()),
        3 => (m(&[0, 3]), m(&[1, 2])),
        _ => panic!("structure index must be 1, 2 or 3"),
    };
    left.add(&right).expect("same space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn coframe_at_identity_is_dh() {
        let p = [rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        let alphas = alpha_in_dh();
        for (i, a) in alphas.iter().enumerate() {
            for j in 0..4 {
                let c = a.coefficient(1 << j).eval(&p).unwrap();
                assert_eq!(c, if i == j { rat(1, 1) } else { rat(0, 1) });
            }
        }
    }

    #[test]
    fn beta_is_invariant_under_each_structure() {
        for a in 1..=3 {
            for b in 1..=3 {
                assert_eq!(beta(a).pullback_ia(b).unwrap(), beta(a));
            }
        }
    }
}
