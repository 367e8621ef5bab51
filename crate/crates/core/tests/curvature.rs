use proptest::prelude::*;
use qsh_core::curvature::*;
use qsh_core::liealg::{circle_map, enumerate_so_star_basis, LieBasis};
use qsh_core::matrix::Mat;
use qsh_core::{rat, ExactModel, FloatModel, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(n: usize) -> (ExactModel, LieBasis<Rational>) {
    let m = ExactModel::new(n).unwrap();
    let b = enumerate_so_star_basis(&m).unwrap();
    (m, b)
}

fn random_coeffs(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
    (0..len)
        .map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
        .collect()
}

#[test]
fn g_valued_and_expanded_forms_agree() {
    let (m, b) = setup(2);
    let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
    let a = b.lie_element(&m, b.dim() - 3);
    let r = curvature_of(&m, &b, &a, &p).unwrap();
    for x in 0..8 {
        for y in 0..8 {
            for z in 0..8 {
                let (ex, ey, ez) = (m.basis_vector(x), m.basis_vector(y), m.basis_vector(z));
                assert_eq!(
                    r.apply(&ex, &ey, &ez),
                    curvature_expanded(&m, &a.matrix, &p, &ex, &ey, &ez)
                );
            }
        }
    }
}

#[test]
fn expanded_form_agrees_off_the_pinned_locus() {
    let (m, b) = setup(2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = CurvParams::free(rat(1, 2), rat(3, 1), rat(-1, 1));
    let a = b.combine(&m, &random_coeffs(&mut rng, b.dim()));
    let r = curvature_of(&m, &b, &a, &p).unwrap();
    for _ in 0..5 {
        let x = random_coeffs(&mut rng, 8);
        let y = random_coeffs(&mut rng, 8);
        let z = random_coeffs(&mut rng, 8);
        assert_eq!(
            r.apply(&x, &y, &z),
            curvature_expanded(&m, &a.matrix, &p, &x, &y, &z)
        );
    }
}

fn bianchi_pinning(n: usize) {
    let (m, b) = setup(n);
    let kappa = rat(1, 1);
    let p = CurvParams::pinned(kappa.clone(), n).unwrap();
    for i in 0..b.dim() {
        let r = curvature_of(&m, &b, &b.lie_element(&m, i), &p).unwrap();
        assert!(r.is_antisymmetric(0.0));
        assert_eq!(bianchi_residual(&r), rat(0, 1), "basis element {i}");
    }
    for q in CurvParams::perturbation_grid(kappa, n).unwrap() {
        let broken = (0..b.dim()).any(|i| {
            let r = curvature_of(&m, &b, &b.lie_element(&m, i), &q).unwrap();
            bianchi_residual(&r) != rat(0, 1)
        });
        assert!(broken, "{q:?}");
    }
}

#[test]
fn bianchi_pinning_n2() {
    bianchi_pinning(2);
}

#[test]
fn bianchi_pinning_n3() {
    bianchi_pinning(3);
}

fn ricci_coefficients(n: usize) {
    let (m, b) = setup(n);
    let kappa = rat(1, 1);
    let p = CurvParams::pinned(kappa.clone(), n).unwrap();
    let so_coef = rat(2 * (n as i64 + 2), 1);
    let sp_coef = rat(4 * n as i64, 1);
    for i in 0..b.dim() {
        let a = b.lie_element(&m, i);
        let ric = ricci_of(&curvature_of(&m, &b, &a, &p).unwrap());
        let expected = if a.has_zero_sp_part(0.0) {
            &so_coef
        } else {
            &sp_coef
        };
        assert_eq!(
            ric,
            omega_of(&m, &a.matrix).scale(expected),
            "basis element {i}"
        );
        assert_eq!(ric, ric.transpose());
        let herm = is_q_hermitian(&m, &ric, &[]).unwrap();
        assert_eq!(herm.hermitian, a.has_zero_sp_part(0.0));
        assert_eq!(herm.witness.is_some(), !herm.hermitian);
    }
}

#[test]
fn ricci_coefficients_n2() {
    ricci_coefficients(2);
}

#[test]
fn ricci_coefficients_n3() {
    ricci_coefficients(3);
}

#[test]
fn ricci_closed_form_matches_trace_for_random_elements() {
    let (m, b) = setup(2);
    let kappa = rat(3, 2);
    let p = CurvParams::pinned(kappa.clone(), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let a = b.combine(&m, &random_coeffs(&mut rng, b.dim()));
        let ric = ricci_of(&curvature_of(&m, &b, &a, &p).unwrap());
        assert_eq!(ric, ricci_closed_form(&m, &a.matrix, &kappa));
        assert_eq!(ric, ricci_split_form(&m, &a, &kappa));
    }
}

#[test]
fn ricci_is_linear_in_a() {
    let (m, b) = setup(2);
    let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c1 = random_coeffs(&mut rng, b.dim());
    let c2 = random_coeffs(&mut rng, b.dim());
    let sum: Vec<Rational> = c1.iter().zip(&c2).map(|(x, y)| x + y).collect();
    let ric = |c: &[Rational]| ricci_of(&curvature_of(&m, &b, &b.combine(&m, c), &p).unwrap());
    assert_eq!(ric(&sum), &ric(&c1) + &ric(&c2));
}

#[test]
fn hermiticity_uses_sampled_frames() {
    let (m, b) = setup(2);
    let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
    let frames = [qsh_core::ExactQuaternion::new(
        rat(1, 3),
        rat(2, 3),
        rat(2, 3),
        rat(0, 1),
    )];
    let so = b.lie_element(&m, 0);
    let ric = ricci_of(&curvature_of(&m, &b, &so, &p).unwrap());
    assert!(is_q_hermitian(&m, &ric, &frames).unwrap().hermitian);
    let bad = qsh_core::ExactQuaternion::new(rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1));
    assert!(is_q_hermitian(&m, &ric, &[bad]).is_err());
}

#[test]
fn curvature_map_rank_equals_dim_g() {
    for (n, expected) in [(2, 9), (3, 18)] {
        let (m, b) = setup(n);
        let p = CurvParams::pinned(rat(1, 1), n).unwrap();
        assert_eq!(curvature_map_rank(&m, &b, &p).unwrap(), expected);

        let fm = FloatModel::new(n).unwrap();
        let fb = enumerate_so_star_basis(&fm).unwrap();
        let fp = CurvParams::pinned(1.0, n).unwrap();
        let sv = curvature_map_singular_values(&fm, &fb, &fp).unwrap();
        assert_eq!(numerical_rank(&sv, 1e-8), expected);
    }
}

#[test]
fn curvature_values_lie_in_g() {
    let (m, b) = setup(2);
    let p = CurvParams::pinned(rat(1, 1), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = b.combine(&m, &random_coeffs(&mut rng, b.dim()));
    curvature_of(&m, &b, &a, &p)
        .unwrap()
        .check_values_in_algebra(&m, &b)
        .unwrap();
}

fn small_vec(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-4i64..=4).prop_map(|v| rat(v, 1)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circle_map_is_equivariant(x in small_vec(8), y in small_vec(8), i in 0usize..9) {
        let (m, b) = setup(2);
        let kappa = rat(1, 1);
        let bm: &Mat<Rational> = b.element(i);
        let lhs = bm.commutator(&circle_map(&m, &x, &y, &kappa).unwrap().matrix);
        let bx = bm.matvec(&x);
        let by = bm.matvec(&y);
        let rhs = &circle_map(&m, &bx, &y, &kappa).unwrap().matrix
            + &circle_map(&m, &x, &by, &kappa).unwrap().matrix;
        prop_assert_eq!(lhs, rhs);
    }
}
