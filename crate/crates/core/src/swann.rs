//! Closed vertical 2-forms on the fiber of the Swann bundle: the basis
//! `beta_a`, the flat-model PDE system for `beta = sum F_a (dh_0 ^ dh_a + ..)`
//! with its explicit solution family, and the primitive `f` on the
//! symmetric space `SO*(2n+2)/SO*(2n)U(1)`.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::fiber::{alpha, beta, cyclic, flat_pair, h};
use crate::forms::{norm_sq, parse, radius, Coframe, Sampler, ScalarField, VerticalForm};
use crate::quaternion::Quaternion;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

/// `(F_1, F_2, F_3)` as functions of `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSolution {
    pub f: [ScalarField; 3],
}

impl FlatSolution {
    pub fn new(f1: ScalarField, f2: ScalarField, f3: ScalarField) -> Self {
        Self { f: [f1, f2, f3] }
    }

    pub fn parse(f1: &str, f2: &str, f3: &str) -> Result<Self> {
        Ok(Self::new(parse(f1)?, parse(f2)?, parse(f3)?))
    }

    pub fn constant(values: [i64; 3]) -> Self {
        Self {
            f: values.map(ScalarField::int),
        }
    }

    /// Random expression trees of depth at most 3, built from `h_i`, small
    /// integers, `+`, `*`, `sin`, `exp(x/4)` and squares. Generally not closed.
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            f: std::array::from_fn(|_| random_field(rng, 3)),
        }
    }
}

fn random_field(rng: &mut impl Rng, depth: usize) -> ScalarField {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.7) {
            ScalarField::var(rng.gen_range(0..4))
        } else {
            ScalarField::int(rng.gen_range(-3..=3))
        };
    }
    let a = random_field(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => a + random_field(rng, depth - 1),
        1 => a * random_field(rng, depth - 1),
        2 => a.sin(),
        3 => (a * ScalarField::constant(crate::scalar::rat(1, 4))).exp(),
        _ => a.powi(2),
    }
}

/// `beta = F_1 (dh0^dh1 + dh2^dh3) + F_2 (dh0^dh2 - dh1^dh3) + F_3 (dh0^dh3 + dh1^dh2)`.
pub fn beta_of_f(sol: &FlatSolution) -> VerticalForm {
    (1..=3).fold(
        VerticalForm::zero(Coframe::Dh, 2).expect("degree 2"),
        |acc, a| {
            acc.add(&flat_pair(a).scale(&sol.f[a - 1]))
                .expect("same space")
        },
    )
}

/// The coefficients `f_a` with `beta = sum f_a beta_a` in the `alpha` coframe.
pub fn f_of_flat(sol: &FlatSolution) -> [ScalarField; 3] {
    let [h0, h1, h2, h3] = [h(0), h(1), h(2), h(3)];
    let [f1, f2, f3] = sol.f.clone();
    let two = ScalarField::int(2);
    let sq = |x: &ScalarField| x.powi(2);
    let t2 = norm_sq();
    let a = (sq(&h0) + sq(&h1) - sq(&h2) - sq(&h3)) * f1.clone()
        + &two * &(&h0 * &h3 + &h1 * &h2) * f2.clone()
        - &two * &(&h0 * &h2 - &h1 * &h3) * f3.clone();
    let b = -(&two * &(&h0 * &h3 - &h1 * &h2)) * f1.clone()
        + (sq(&h0) - sq(&h1) + sq(&h2) - sq(&h3)) * f2.clone()
        + &two * &(&h0 * &h1 + &h2 * &h3) * f3.clone();
    let c = &two * &(&h0 * &h2 + &h1 * &h3) * f1 - &two * &(&h0 * &h1 - &h2 * &h3) * f2
        + (sq(&h0) - sq(&h1) - sq(&h2) + sq(&h3)) * f3;
    [&t2 * &a, &t2 * &b, &t2 * &c]
}

/// `beta = sum_a f_a beta_a` in the `alpha` coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaForm {
    pub f: [ScalarField; 3],
    pub form: VerticalForm,
}

impl BetaForm {
    pub fn new(f: [ScalarField; 3]) -> Self {
        let form = (1..=3).fold(
            VerticalForm::zero(Coframe::Alpha, 2).expect("degree 2"),
            |acc, a| acc.add(&beta(a).scale(&f[a - 1])).expect("same space"),
        );
        Self { f, form }
    }

    /// `sum_a df_a ^ beta_a`, the value of `d beta` when the curvature terms vanish.
    pub fn dbeta_flat(&self) -> Result<VerticalForm> {
        let mut out = VerticalForm::zero(Coframe::Dh, 3)?;
        for a in 1..=3 {
            let df = VerticalForm::function(Coframe::Dh, self.f[a - 1].clone()).d()?;
            out = out.add(&df.wedge(&beta(a).to_dh()?)?)?;
        }
        Ok(out)
    }
}

/// `F_{a,b} = dF_a / dh_b`.
fn partial(sol: &FlatSolution, a: usize, b: usize) -> ScalarField {
    sol.f[a - 1].derivative(b)
}

/// The four PDE residuals:
/// `F_{1,0} - F_{3,2} + F_{2,3}`, `F_{1,1} + F_{2,2} + F_{3,3}`,
/// `F_{1,3} - F_{2,0} - F_{3,1}`, `F_{1,2} - F_{2,1} + F_{3,0}`.
pub fn pde_residuals(sol: &FlatSolution) -> [ScalarField; 4] {
    let p = |a, b| partial(sol, a, b);
    [
        p(1, 0) - p(3, 2) + p(2, 3),
        p(1, 1) + p(2, 2) + p(3, 3),
        p(1, 3) - p(2, 0) - p(3, 1),
        p(1, 2) - p(2, 1) + p(3, 0),
    ]
}

/// `d beta` component carrying each PDE residual: `(mask, sign)` with
/// `d beta = sum_i sign_i * residual_i * dh_{mask_i}`.
pub const PDE_COMPONENTS: [(u8, i32); 4] = [
    (0b1101, 1), // dh0 ^ dh2 ^ dh3
    (0b1110, 1), // dh1 ^ dh2 ^ dh3
    (0b1011, 1), // dh0 ^ dh1 ^ dh3
    (0b0111, 1), // dh0 ^ dh1 ^ dh2
];

#[derive(Clone, Debug, PartialEq)]
pub struct PdeComparison {
    /// `d beta` coefficients and residuals agree.
    pub matches: bool,
    /// Largest deviation between a `d beta` component and its residual.
    pub max_deviation: f64,
    /// Largest `|residual|`; zero iff `d beta = 0` on the sample.
    pub max_residual: f64,
    pub witness: Option<[f64; 4]>,
}

/// Compare the components of `d(beta_of_f(F))` with [`pde_residuals`].
pub fn dbeta_equals_pde(
    sol: &FlatSolution,
    sampler: &Sampler,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<PdeComparison> {
    let db = beta_of_f(sol).d()?;
    let res = pde_residuals(sol);
    let mut deviations = Vec::new();
    for (r, (mask, sign)) in res.iter().zip(PDE_COMPONENTS) {
        let c = db.coefficient(mask);
        let c = if sign > 0 { c } else { -c };
        let dev = c - r.clone();
        if !dev.is_literal_zero() {
            deviations.push(dev);
        }
    }
    let covered: u16 = PDE_COMPONENTS.iter().fold(0, |m, (k, _)| m | (1 << k));
    let stray = db.terms().any(|(k, _)| covered & (1u16 << k) == 0);
    let max_deviation = if deviations.is_empty() {
        0.0
    } else {
        sampler.max_abs(&deviations, &[], rng)?.max_residual
    };
    let live: Vec<ScalarField> = res
        .iter()
        .filter(|r| !r.is_literal_zero())
        .cloned()
        .collect();
    let (max_residual, witness) = if live.is_empty() {
        (0.0, None)
    } else {
        let rep = sampler.max_abs(&live, &[], rng)?;
        (rep.max_residual, rep.witness)
    };
    Ok(PdeComparison {
        matches: !stray && max_deviation < tolerance,
        max_deviation,
        max_residual,
        witness,
    })
}

/// Constants of the explicit solution family. `s_i = sqrt(C_{10+i})` are the
/// primary inputs; `c[k]` holds `C_{k+1}` for `k < 10`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionConstants {
    pub s: [Rational; 3],
    pub c: [Rational; 10],
    pub c14: Rational,
}

impl SolutionConstants {
    pub fn new(s: [Rational; 3], c: [Rational; 10], c14: Rational) -> Result<Self> {
        if s.iter().any(Signed::is_negative) {
            return Err(Error::Schema("s1, s2, s3 must be non-negative".into()));
        }
        let k = Self { s, c, c14 };
        if (k.big_c(11) + k.big_c(12)).is_zero() {
            return Err(Error::DegenerateFamily);
        }
        Ok(k)
    }

    /// `C_i` for `i in 1..=14`.
    pub fn big_c(&self, i: usize) -> Rational {
        match i {
            1..=10 => self.c[i - 1].clone(),
            11..=13 => &self.s[i - 11] * &self.s[i - 11],
            14 => self.c14.clone(),
            _ => panic!("constant index out of range"),
        }
    }

    /// Some `tau_i` or the pair `(C7, C8)` vanishes identically, which makes
    /// every member of the family constant.
    pub fn yields_constant(&self) -> bool {
        (1..=7)
            .step_by(2)
            .any(|i| self.big_c(i).is_zero() && self.big_c(i + 1).is_zero())
    }

    /// `s` drawn from `{1/2, 3/4, .., 2}` and `C_1..C_10, C_14` from `[-2, 2]` in steps of 1/4.
    pub fn random(rng: &mut impl Rng) -> Self {
        let q = |rng: &mut dyn rand::RngCore, lo: i64, hi: i64| {
            crate::scalar::rat(rng.gen_range(lo..=hi), 4)
        };
        let s = std::array::from_fn(|_| q(rng, 2, 8));
        let c = std::array::from_fn(|_| q(rng, -8, 8));
        let c14 = q(rng, -8, 8);
        Self::new(s, c, c14).expect("s > 0 keeps the family non-degenerate")
    }
}

fn rational_field(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Schema(format!("invalid rational {s:?}")))
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema(e.to_string())
}

/// `{"s": ["1", ..], "c": ["1/2", ..], "c14": "0"}`, entries as `"p/q"` strings.
#[derive(Serialize, Deserialize)]
struct ConstantsJson {
    s: [String; 3],
    c: [String; 10],
    c14: String,
}

impl SolutionConstants {
    pub fn to_json(&self) -> String {
        let j = ConstantsJson {
            s: self.s.clone().map(|x| format_rational(&x)),
            c: self.c.clone().map(|x| format_rational(&x)),
            c14: format_rational(&self.c14),
        };
        serde_json::to_string(&j).expect("strings serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ConstantsJson = serde_json::from_str(text).map_err(schema)?;
        let s = [
            rational_field(&j.s[0])?,
            rational_field(&j.s[1])?,
            rational_field(&j.s[2])?,
        ];
        let c =
            j.c.iter()
                .map(|x| rational_field(x))
                .collect::<Result<Vec<_>>>()?;
        Self::new(
            s,
            c.try_into().expect("ten entries"),
            rational_field(&j.c14)?,
        )
    }
}

/// The explicit solution family, built term by term as printed.
pub fn solution_family(k: &SolutionConstants) -> Result<FlatSolution> {
    let k = SolutionConstants::new(k.s.clone(), k.c.clone(), k.c14.clone())?;
    let c = |i: usize| ScalarField::constant(k.big_c(i));
    let [s1, s2, s3] = k.s.clone().map(ScalarField::constant);
    let [h0, h1, h2, h3] = [h(0), h(1), h(2), h(3)];
    let two = ScalarField::int(2);
    let big_s = (c(11) + c(12) + c(13)).sqrt();
    let den = c(11) + c(12);

    let tau0 = (&(&two * &s1) * &h0).exp() * c(1) + c(2);
    let tau1 = (&(&two * &s2) * &h1).exp() * c(3) + c(4);
    let tau2 = (&(&two * &s3) * &h2).exp() * c(5) + c(6);
    let decay = (-(&s2 * &h1)).exp() * (-(&s3 * &h2)).exp() * (-(&s1 * &h0)).exp();
    let eta1 = (&big_s * &h3).sin() * decay.clone();
    let eta2 = (&big_s * &h3).cos() * decay;

    let p = c(7) * eta1.clone() + c(8) * eta2.clone(); // C7 eta1 + C8 eta2
    let m = c(7) * eta2 - c(8) * eta1; // C7 eta2 - C8 eta1
    let two_c2 = &two * &c(2) - tau0.clone();
    let two_c4 = &two * &c(4) - tau1.clone();
    let two_c6 = &two * &c(6) - tau2.clone();

    let f1 = &tau0 * &tau1 * tau2.clone() * p.clone() + c(14);
    let f2 =
        -(m.clone() * s1.clone() * tau2.clone() * tau1.clone() * two_c2.clone() * big_s.clone())
            / den.clone()
            + s3.clone() * two_c4.clone() * s2.clone() * two_c6.clone() * p.clone() * tau0.clone()
                / den.clone()
            + c(10);
    let f3 = -(tau0 * two_c4 * m * s2 * big_s * tau2) / den.clone()
        - s3 * p * tau1 * two_c6 * two_c2 * s1 / den
        + c(9);
    Ok(FlatSolution::new(f1, f2, f3))
}

/// Parameters of the symmetric-space example: Einstein constant `c`, the
/// quaternionic dimension `n` and integration constants `c_1..c_4`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSpaceParams {
    pub c: Rational,
    pub n: usize,
    pub cs: [Rational; 4],
}

impl SymSpaceParams {
    pub fn new(c: Rational, n: usize, cs: [Rational; 4]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if cs[..3].iter().all(Zero::is_zero) {
            return Err(Error::DegenerateSymSpace);
        }
        Ok(Self { c, n, cs })
    }

    /// `c` and `c_1..c_4` from `[-2, 2]` in steps of 1/4, `c != 0`, `(c1, c2, c3) != 0`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let q = |rng: &mut dyn rand::RngCore| crate::scalar::rat(rng.gen_range(-8..=8), 4);
        loop {
            let c = q(rng);
            let cs = std::array::from_fn(|_| q(rng));
            if c.is_zero() {
                continue;
            }
            if let Ok(p) = Self::new(c, n, cs) {
                return p;
            }
        }
    }

    fn factor<T: Scalar>(&self) -> T {
        T::from_rational(&self.c) / T::from_int(2 * self.n as i64)
    }
}

/// `{"c": "-1", "n": 2, "cs": ["1", "0", "0", "0"]}`.
#[derive(Serialize, Deserialize)]
struct SymSpaceJson {
    c: String,
    n: usize,
    cs: [String; 4],
}

impl SymSpaceParams {
    pub fn to_json(&self) -> String {
        let j = SymSpaceJson {
            c: format_rational(&self.c),
            n: self.n,
            cs: self.cs.clone().map(|x| format_rational(&x)),
        };
        serde_json::to_string(&j).expect("strings serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: SymSpaceJson = serde_json::from_str(text).map_err(schema)?;
        let cs =
            j.cs.iter()
                .map(|x| rational_field(x))
                .collect::<Result<Vec<_>>>()?;
        Self::new(
            rational_field(&j.c)?,
            j.n,
            cs.try_into().expect("four entries"),
        )
    }
}

/// `r(h)` from the closed formulas
/// `r_1 = -(c/2n)(h0^2 + h1^2 - h2^2 - h3^2)/t^2`, `r_2 = (c/2n) 2(h0 h3 - h1 h2)/t^2`,
/// `r_3 = -(c/2n) 2(h0 h2 + h1 h3)/t^2`.
pub fn symspace_r<T: Scalar>(params: &SymSpaceParams, q: &Quaternion<T>) -> Result<[T; 3]> {
    let t2 = q.norm_sq();
    if t2.is_zero() {
        return Err(Error::ZeroQuaternion);
    }
    let k: T = params.factor();
    let two = T::from_int(2);
    let [h0, h1, h2, h3] = q.to_array();
    let sq = |x: &T| x.clone() * x.clone();
    Ok([
        -(k.clone() * (sq(&h0) + sq(&h1) - sq(&h2) - sq(&h3)) / t2.clone()),
        k.clone() * two.clone() * (h0.clone() * h3.clone() - h1.clone() * h2.clone()) / t2.clone(),
        -(k * two * (h0 * h2 + h1 * h3) / t2),
    ])
}

/// `r(h) = -(c/2n) h^-1 i h` by quaternion arithmetic.
pub fn symspace_r_oracle<T: Scalar>(params: &SymSpaceParams, q: &Quaternion<T>) -> Result<[T; 3]> {
    if q.norm_sq().is_zero() {
        return Err(Error::ZeroQuaternion);
    }
    let k: T = params.factor();
    let v = (q.inverse() * Quaternion::i()) * q.clone();
    Ok(v.imag().map(|x| -(k.clone() * x)))
}

/// `r(h)` as scalar fields.
pub fn symspace_r_fields(params: &SymSpaceParams) -> [ScalarField; 3] {
    let q = Quaternion::new(h(0), h(1), h(2), h(3));
    let k = ScalarField::constant(params.c.clone() / Rational::from_integer((2 * params.n).into()));
    let t2 = norm_sq();
    let two = ScalarField::int(2);
    let sq = |x: &ScalarField| x.powi(2);
    [
        -(&k * &(sq(&q.h0) + sq(&q.h1) - sq(&q.h2) - sq(&q.h3))) / t2.clone(),
        &k * &(&two * &(&q.h0 * &q.h3 - &q.h1 * &q.h2)) / t2.clone(),
        -(&k * &(&two * &(&q.h0 * &q.h2 + &q.h1 * &q.h3))) / t2,
    ]
}

/// Denominator `c c1(-h0^2 - h1^2 + h2^2 + h3^2) + 2c c2(h0 h3 - h1 h2) - 2c c3(h0 h2 + h1 h3) + 2c c4 t^4`.
pub fn exp_f_denominator(params: &SymSpaceParams) -> ScalarField {
    let [h0, h1, h2, h3] = [h(0), h(1), h(2), h(3)];
    let k = |x: &Rational| ScalarField::constant(&params.c * x);
    let two = ScalarField::int(2);
    let sq = |x: &ScalarField| x.powi(2);
    let [c1, c2, c3, c4] = &params.cs;
    k(c1) * (-sq(&h0) - sq(&h1) + sq(&h2) + sq(&h3)) + &two * &k(c2) * (&h0 * &h3 - &h1 * &h2)
        - &two * &k(c3) * (&h0 * &h2 + &h1 * &h3)
        + &two * &k(c4) * norm_sq().powi(2)
}

/// `exp(f) = -4n t^4 / denominator`.
pub fn exp_f(params: &SymSpaceParams) -> ScalarField {
    let num = ScalarField::int(-4 * params.n as i64) * norm_sq().powi(2);
    num / exp_f_denominator(params)
}

/// `f = log(exp(f))`. Only `df = d(exp f)/exp f` is ever evaluated, which is
/// also the differential of `log|exp f|`, so the sign of `exp f` is irrelevant.
pub fn f_field(params: &SymSpaceParams) -> ScalarField {
    exp_f(params).log()
}

/// `f_a = c_a exp(f)`.
pub fn symspace_f(params: &SymSpaceParams) -> [ScalarField; 3] {
    let e = exp_f(params);
    std::array::from_fn(|a| ScalarField::constant(params.cs[a].clone()) * e.clone())
}

/// `tau = t^-1 exp(f) (-(c.r) alpha_0 + (c2 r3 - c3 r2) alpha_1
///   + (-c1 r3 + c3 r1) alpha_2 + (c1 r2 - c2 r1) alpha_3)` in the `alpha` coframe.
pub fn tau_form(params: &SymSpaceParams) -> VerticalForm {
    let [r1, r2, r3] = symspace_r_fields(params);
    let [c1, c2, c3, _] = params.cs.clone().map(ScalarField::constant);
    let coeffs = [
        -(&c1 * &r1 + &c2 * &r2 + &c3 * &r3),
        &c2 * &r3 - &c3 * &r2,
        -(&c1 * &r3) + &c3 * &r1,
        &c1 * &r2 - &c2 * &r1,
    ];
    let scale = exp_f(params) / radius();
    let mut out = VerticalForm::zero(Coframe::Alpha, 1).expect("degree 1");
    for (i, k) in coeffs.into_iter().enumerate() {
        out = out
            .add(&alpha(i).scale(&(&scale * &k)))
            .expect("same space");
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveReport {
    /// `max |df - tau|` over the sample.
    pub max_residual: f64,
    /// `max |d(df)|` over the sample, relative to the second derivatives of `f`.
    pub closed_residual: f64,
    pub witness: Option<[f64; 4]>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Compare `df` with `tau` in the `dh` coframe, rejecting points where the
/// denominator of `exp(f)` is small relative to `t^4`.
pub fn symspace_primitive_check(
    params: &SymSpaceParams,
    sampler: &Sampler,
    rng: &mut impl Rng,
) -> Result<PrimitiveReport> {
    let f = f_field(params);
    let df = VerticalForm::function(Coframe::Dh, f.clone()).d()?;
    let tau = tau_form(params).to_dh()?;
    let diff = df.sub(&tau)?;
    let guard = exp_f_denominator(params) / norm_sq().powi(2);
    let fields: Vec<ScalarField> = diff.terms().map(|(_, c)| c.clone()).collect();
    let closed = mixed_partial_defects(&f);
    let (main, closed_residual) = if fields.is_empty() {
        let rep = sampler.max_abs(&[ScalarField::int(0)], std::slice::from_ref(&guard), rng)?;
        (rep, 0.0)
    } else {
        let rep = sampler.max_abs(&fields, std::slice::from_ref(&guard), rng)?;
        let cr = if closed.is_empty() {
            0.0
        } else {
            sampler.max_abs(&closed, &[guard], rng)?.max_residual
        };
        (rep, cr)
    };
    Ok(PrimitiveReport {
        max_residual: main.max_residual,
        closed_residual,
        witness: main.witness,
        accepted: main.accepted,
        rejected: main.rejected,
    })
}

/// `(d_a d_b f - d_b d_a f) / sqrt(1 + (d_a d_b f)^2 + (d_b d_a f)^2)` for
/// `a < b`: the components of `d(df)` relative to the second derivatives.
fn mixed_partial_defects(f: &ScalarField) -> Vec<ScalarField> {
    let g = f.gradient();
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            let ab = g[b].derivative(a);
            let ba = g[a].derivative(b);
            let scale = (ScalarField::int(1) + ab.powi(2) + ba.powi(2)).sqrt();
            out.push((ab - ba) / scale);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionClass {
    TorsionFree,
    /// Closed scalar 2-form with integrable hypercomplex structure.
    X57,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionReport {
    pub class: TorsionClass,
    /// All `F_a` vanish identically, so `beta = 0`.
    pub degenerate: bool,
    pub max_gradient: f64,
}

/// Torsion type of the structure defined by a closed `F`: torsion-free iff
/// every `F_a` is constant.
pub fn torsion_type(
    sol: &FlatSolution,
    sampler: &Sampler,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<TorsionReport> {
    for (index, r) in pde_residuals(sol).iter().enumerate() {
        if r.is_literal_zero() {
            continue;
        }
        let rep = sampler.max_abs(std::slice::from_ref(r), &[], rng)?;
        if rep.max_residual > tolerance {
            return Err(Error::NotClosed {
                index: index + 1,
                value: rep.max_residual,
                point: rep.witness.unwrap_or_default(),
            });
        }
    }
    let degenerate = sol.f.iter().all(ScalarField::is_literal_zero);
    let gradient: Vec<ScalarField> = sol
        .f
        .iter()
        .filter(|f| !f.is_constant())
        .flat_map(|f| f.gradient())
        .filter(|g| !g.is_literal_zero())
        .collect();
    let max_gradient = if gradient.is_empty() {
        0.0
    } else {
        sampler.max_abs(&gradient, &[], rng)?.max_residual
    };
    Ok(TorsionReport {
        class: if max_gradient < tolerance {
            TorsionClass::TorsionFree
        } else {
            TorsionClass::X57
        },
        degenerate,
        max_gradient,
    })
}

/// Which closedness condition failed at a witness point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `sum_a df_a ^ beta_a = 0`.
    Vertical,
    /// `sum_a f_a r_a = 0`.
    Trace,
    /// `f_b r_c - f_c r_b = 0` for the given `a`.
    Cross(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionWitness {
    pub point: [f64; 4],
    pub condition: Condition,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    /// No sampled point has `f != 0`, `r != 0` and all five conditions satisfied.
    pub implication_holds: bool,
    /// Points with `r = 0`, where the conditions reduce to the flat case.
    pub vacuous: usize,
    /// Points where `r != 0` and some condition fails.
    pub witnesses: Vec<ObstructionWitness>,
    pub sampled: usize,
}

/// Pointwise mechanics of the obstruction: with `Omega_a = r_a w` for a fixed
/// non-degenerate `w`, the conditions `sum f_a Omega_a = 0` and
/// `f_b Omega_c = f_c Omega_b` reduce to `f.r = 0` and `f x r = 0`, which
/// force `r = 0` wherever `f != 0`. The `1/t` factors on the curvature terms
/// are absorbed into `r`.
pub fn general_obstruction_check(
    r: &[ScalarField; 3],
    f: &[ScalarField; 3],
    sampler: &Sampler,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<ObstructionReport> {
    let vertical = BetaForm::new(f.clone()).dbeta_flat()?;
    let vertical_fields: Vec<ScalarField> = vertical.terms().map(|(_, c)| c.clone()).collect();
    let trace = f
        .iter()
        .zip(r)
        .fold(ScalarField::int(0), |acc, (fa, ra)| acc + fa * ra);
    let cross: Vec<ScalarField> = (1..=3)
        .map(|a| {
            let (b, c) = cyclic(a);
            &f[b - 1] * &r[c - 1] - &f[c - 1] * &r[b - 1]
        })
        .collect();

    let mut report = ObstructionReport {
        implication_holds: true,
        vacuous: 0,
        witnesses: Vec::new(),
        sampled: 0,
    };
    let limit = sampler.trials.max(1) * sampler.max_attempts_factor.max(1);
    let mut attempts = 0;
    while report.sampled < sampler.trials && attempts < limit {
        attempts += 1;
        let p = sampler.point(rng);
        let eval = |x: &ScalarField| x.eval_f64(&p).ok().filter(|v| v.is_finite());
        let Some(fv) = f.iter().map(eval).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        let Some(rv) = r.iter().map(eval).collect::<Option<Vec<f64>>>() else {
            continue;
        };
        let Some(vv) = vertical_fields
            .iter()
            .map(eval)
            .collect::<Option<Vec<f64>>>()
        else {
            continue;
        };
        let (Some(tv), Some(cv)) = (
            eval(&trace),
            cross.iter().map(eval).collect::<Option<Vec<f64>>>(),
        ) else {
            continue;
        };
        report.sampled += 1;
        let r_zero = rv.iter().all(|x| x.abs() <= tolerance);
        let f_zero = fv.iter().all(|x| x.abs() <= tolerance);
        if r_zero {
            report.vacuous += 1;
            continue;
        }
        let mut failed = None;
        let vmax = vv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if vmax > tolerance {
            failed = Some((Condition::Vertical, vmax));
        } else if tv.abs() > tolerance {
            failed = Some((Condition::Trace, tv.abs()));
        } else if let Some((a, v)) = cv.iter().enumerate().find(|(_, v)| v.abs() > tolerance) {
            failed = Some((Condition::Cross(a + 1), v.abs()));
        }
        match failed {
            Some((condition, value)) => report.witnesses.push(ObstructionWitness {
                point: p,
                condition,
                value,
            }),
            None if !f_zero => report.implication_holds = false,
            None => {}
        }
    }
    if report.sampled == 0 {
        return Err(Error::AllSamplesRejected { attempts });
    }
    Ok(report)
}
