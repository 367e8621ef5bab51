use proptest::prelude::*;
use qsh_core::forms::fiber::{
    alpha, alpha_in_dh, beta, coframe_matrix, cyclic, maurer_cartan_oracle, theta0_in_dh,
    theta_in_dh,
};
use qsh_core::forms::{equal, radius, Coframe, Sampler, ScalarField, VerticalForm};
use qsh_core::{rat, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational point with rational `|h|`: the square of an integer quaternion, scaled by `r`.
fn rational_sphere_point(rng: &mut ChaCha8Rng) -> [Rational; 4] {
    loop {
        let [m, n, p, q]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-5..=5));
        if m * m + n * n + p * p + q * q == 0 {
            continue;
        }
        let r = rat(rng.gen_range(1..=7), rng.gen_range(1..=5));
        let v = [
            m * m - n * n - p * p - q * q,
            2 * m * n,
            2 * m * p,
            2 * m * q,
        ];
        return v.map(|x| &r * rat(x, 1));
    }
}

fn eval_form(f: &VerticalForm, p: &[Rational; 4]) -> Vec<(u8, Rational)> {
    f.masks()
        .into_iter()
        .map(|m| (m, f.coefficient(m).eval(p).unwrap()))
        .collect()
}

#[test]
fn maurer_cartan_matches_coframe_exactly() {
    let oracle = maurer_cartan_oracle();
    let theta0 = theta0_in_dh().unwrap();
    let mut r = rng(7);
    for _ in 0..50 {
        let p = rational_sphere_point(&mut r);
        assert_eq!(eval_form(&oracle[0], &p), eval_form(&theta0, &p));
        for a in 1..=3 {
            assert_eq!(eval_form(&oracle[a], &p), eval_form(&theta_in_dh(a), &p));
        }
    }
}

#[test]
fn theta_is_t_alpha() {
    let alphas = alpha_in_dh();
    let t = radius();
    let mut r = rng(8);
    for _ in 0..20 {
        let p = rational_sphere_point(&mut r);
        for a in 1..=3 {
            assert_eq!(
                eval_form(&alphas[a].scale(&t), &p),
                eval_form(&theta_in_dh(a), &p)
            );
        }
        let t2 = t.powi(2);
        assert_eq!(
            eval_form(&alphas[0].scale(&t2), &p),
            eval_form(
                &VerticalForm::function(Coframe::Dh, t.clone()).d().unwrap(),
                &p
            )
        );
    }
}

#[test]
fn structure_equations() {
    let s = Sampler::default();
    let mut r = rng(9);
    let alphas = alpha_in_dh();
    let d0 = alphas[0].d().unwrap();
    let zero = VerticalForm::zero(Coframe::Dh, 2).unwrap();
    let rep = equal(&d0, &zero, &s, TOL, &mut r).unwrap();
    assert!(rep.equal, "{rep:?}");

    let t = VerticalForm::function(Coframe::Alpha, radius());
    for a in 1..=3 {
        let (b, c) = cyclic(a);
        let lhs = alphas[a].d().unwrap();
        let rhs = alpha(0)
            .wedge(&alpha(a))
            .unwrap()
            .add(
                &alpha(b)
                    .wedge(&alpha(c))
                    .unwrap()
                    .scale(&ScalarField::int(2)),
            )
            .unwrap()
            .wedge(&t)
            .unwrap()
            .neg();
        let rep = equal(&lhs, &rhs, &s, TOL, &mut r).unwrap();
        assert!(rep.equal, "a={a}: {rep:?}");
    }
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    // Laplace expansion along the first row
    let minor = |c: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&j| j != c).collect();
        let e = |i: usize, j: usize| m[i + 1][cols[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    (0..4)
        .map(|c| if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * minor(c))
        .sum()
}

#[test]
fn volume_factor_is_determinant() {
    let top = VerticalForm::monomial(Coframe::Alpha, &[0, 1, 2, 3]).unwrap();
    let coef = top.to_dh().unwrap().coefficient(0b1111);
    let m = coframe_matrix();
    let s = Sampler::default();
    let mut r = rng(10);
    for _ in 0..20 {
        let p = s.point(&mut r);
        let mm: [[f64; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].eval_f64(&p).unwrap()));
        let t: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        let expected = det4(&mm) / t.powi(12);
        let got = coef.eval_f64(&p).unwrap();
        assert!((got - expected).abs() < 1e-10 * expected.abs().max(1.0));
    }
}

#[test]
fn beta_closed_by_two_paths() {
    let s = Sampler::default();
    let mut r = rng(11);
    let alphas = alpha_in_dh();
    let zero3 = VerticalForm::zero(Coframe::Dh, 3).unwrap();
    for a in 1..=3 {
        let (b, c) = cyclic(a);
        // path 1: convert to dh, differentiate
        let direct = beta(a).to_dh().unwrap().d().unwrap();
        // path 2: Leibniz on the alpha factors
        let leibniz = |x: usize, y: usize| {
            alphas[x]
                .d()
                .unwrap()
                .wedge(&alphas[y])
                .unwrap()
                .sub(&alphas[x].wedge(&alphas[y].d().unwrap()).unwrap())
                .unwrap()
        };
        let via_structure = leibniz(0, a).add(&leibniz(b, c)).unwrap();
        assert!(equal(&direct, &zero3, &s, TOL, &mut r).unwrap().equal);
        assert!(
            equal(&via_structure, &zero3, &s, TOL, &mut r)
                .unwrap()
                .equal
        );
        assert!(
            equal(&direct, &via_structure, &s, TOL, &mut r)
                .unwrap()
                .equal
        );
    }
}

#[test]
fn pullback_is_an_involution_on_two_forms() {
    for a in 1..=3 {
        for i in 0..4 {
            for j in i + 1..4 {
                let f = VerticalForm::monomial(Coframe::Alpha, &[i, j]).unwrap();
                let twice = f.pullback_ia(a).unwrap().pullback_ia(a).unwrap();
                assert_eq!(twice, f);
            }
        }
    }
}

fn arb_field() -> impl Strategy<Value = ScalarField> {
    let leaf = prop_oneof![
        (0usize..4).prop_map(ScalarField::var),
        (-3i64..=3).prop_map(ScalarField::int),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| a.sin()),
            inner
                .clone()
                .prop_map(|a| (a * ScalarField::constant(rat(1, 4))).exp()),
            inner.prop_map(|a| a.powi(2)),
        ]
    })
}

fn arb_form(degree: usize) -> impl Strategy<Value = VerticalForm> {
    prop::collection::vec(arb_field(), 6).prop_map(move |cs| {
        let masks = qsh_core::forms::vertical::masks_of_degree(degree);
        let mut form = VerticalForm::zero(Coframe::Dh, degree).unwrap();
        for (m, c) in masks.into_iter().zip(cs) {
            let idx: Vec<usize> = (0..4).filter(|i| m & (1 << i) != 0).collect();
            let mono = VerticalForm::monomial(Coframe::Dh, &idx).unwrap().scale(&c);
            form = form.add(&mono).unwrap();
        }
        form
    })
}

fn sampled_equal(u: &VerticalForm, v: &VerticalForm, seed: u64) -> bool {
    let s = Sampler::with_trials(20);
    equal(u, v, &s, 1e-8, &mut rng(seed)).unwrap().equal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_vanishes(f in arb_form(1), g in arb_form(0)) {
        let zero2 = VerticalForm::zero(Coframe::Dh, 2).unwrap();
        let zero3 = VerticalForm::zero(Coframe::Dh, 3).unwrap();
        prop_assert!(sampled_equal(&g.d().unwrap().d().unwrap(), &zero2, 1));
        prop_assert!(sampled_equal(&f.d().unwrap().d().unwrap(), &zero3, 2));
    }

    #[test]
    fn leibniz_rule(u in arb_form(1), v in arb_form(2)) {
        let lhs = u.wedge(&v).unwrap().d().unwrap();
        let rhs = u.d().unwrap().wedge(&v).unwrap()
            .sub(&u.wedge(&v.d().unwrap()).unwrap()).unwrap();
        prop_assert!(sampled_equal(&lhs, &rhs, 3));
    }

    #[test]
    fn graded_commutativity(u in arb_form(1), v in arb_form(2), w in arb_form(1)) {
        prop_assert!(sampled_equal(&u.wedge(&v).unwrap(), &v.wedge(&u).unwrap(), 5));
        let uw = u.wedge(&w).unwrap();
        let wu = w.wedge(&u).unwrap();
        prop_assert!(sampled_equal(&uw, &wu.neg(), 4));
    }
}
