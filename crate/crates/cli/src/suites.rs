//! The checks behind each suite. Every check draws from its own RNG stream,
//! derived from the run seed, the suite, `n` and the check name, so results
//! do not depend on scheduling.

use std::time::Instant;

use num_traits::{Signed, Zero};
use qsh_core::curvature::{
    bianchi_check, curvature_map_rank, curvature_map_singular_values, curvature_of, is_q_hermitian,
    numerical_rank, omega_of, ricci_closed_form, ricci_of, CurvParams, CurvTensor,
};
use qsh_core::forms::fiber::{
    alpha, alpha_in_dh, beta, cyclic, maurer_cartan_oracle, theta0_in_dh, theta_in_dh,
};
use qsh_core::forms::{equal, norm_sq, radius, Coframe, Sampler, ScalarField, VerticalForm};
use qsh_core::liealg::{circle_map, enumerate_so_star_basis, so_star_dimension};
use qsh_core::matrix::Mat;
use qsh_core::quaternion::Quaternion;
use qsh_core::swann::{
    beta_of_f, dbeta_equals_pde, f_of_flat, general_obstruction_check, pde_residuals,
    solution_family, symspace_primitive_check, symspace_r, symspace_r_oracle, torsion_type,
    BetaForm, FlatSolution, SolutionConstants, SymSpaceParams, TorsionClass,
};
use qsh_core::{rat, ExactLieBasis, ExactModel, FloatModel, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Check, Status};
use crate::{Job, RunConfig, Suite};

type CoreResult<T> = qsh_core::Result<T>;

pub struct Outcome {
    pub passed: bool,
    pub residual: f64,
    pub witness: Option<Value>,
}

impl Outcome {
    fn exact(passed: bool, witness: Option<Value>) -> Self {
        Self {
            passed,
            residual: if passed { 0.0 } else { 1.0 },
            witness,
        }
    }

    fn exact_residual(residual: &Rational, witness: Option<Value>) -> Self {
        Self {
            passed: residual.is_zero(),
            residual: residual.to_f64(),
            witness,
        }
    }

    fn measured(residual: f64, tolerance: f64, witness: Option<Value>) -> Self {
        Self {
            passed: residual < tolerance,
            residual,
            witness,
        }
    }
}

struct Ctx<'a> {
    job: Job,
    config: &'a RunConfig,
    checks: Vec<Check>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Ctx<'_> {
    fn rng(&self, name: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let key = format!(
            "{}/{}/{}",
            self.job.suite.name(),
            self.job.n.unwrap_or(0),
            name
        );
        rng.set_stream(fnv1a(key.as_bytes()));
        rng
    }

    fn sampler(&self) -> Sampler {
        Sampler::with_trials(self.config.trials)
    }

    fn check(
        &mut self,
        name: &'static str,
        anchor: &'static str,
        f: impl FnOnce(&mut ChaCha8Rng) -> CoreResult<Outcome>,
    ) {
        let mut rng = self.rng(name);
        let start = Instant::now();
        let outcome = f(&mut rng).unwrap_or_else(|e| Outcome {
            passed: false,
            residual: f64::MAX,
            witness: Some(json!({ "error": e.to_string() })),
        });
        self.checks.push(Check {
            suite: self.job.suite.name(),
            n: self.job.n,
            name,
            anchor,
            status: if outcome.passed {
                Status::Pass
            } else {
                Status::Fail
            },
            residual: outcome.residual,
            witness: outcome.witness,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
}

pub fn run_job(job: Job, config: &RunConfig, user: Option<&FlatSolution>) -> Vec<Check> {
    let mut ctx = Ctx {
        job,
        config,
        checks: Vec::new(),
    };
    match (job.suite, job.n) {
        (Suite::Model, Some(n)) => model(&mut ctx, n),
        (Suite::Liealg, Some(n)) => liealg(&mut ctx, n),
        (Suite::Curvature, Some(n)) => curvature(&mut ctx, n),
        (Suite::Fiber, _) => fiber(&mut ctx),
        (Suite::Flat, _) => flat(&mut ctx, user),
        (Suite::Symspace, Some(n)) => symspace(&mut ctx, n),
        _ => unreachable!("job without n for an n-dependent suite"),
    }
    ctx.checks
}

fn max_abs_entry(m: &Mat<Rational>) -> Rational {
    m.as_slice()
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn random_vector(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| random_rational(rng)).collect()
}

/// `u^2 / |u|^2` for a random non-zero integer quaternion `u`: a rational unit quaternion.
fn random_unit_quaternion(rng: &mut impl Rng) -> Quaternion<Rational> {
    loop {
        let u = Quaternion::new(
            rat(rng.gen_range(-4..=4), 1),
            rat(rng.gen_range(-4..=4), 1),
            rat(rng.gen_range(-4..=4), 1),
            rat(rng.gen_range(-4..=4), 1),
        );
        let norm = u.norm_sq();
        if !norm.is_zero() {
            return (u.clone() * u).scale(&(Rational::from_integer(1.into()) / norm));
        }
    }
}

fn model(ctx: &mut Ctx, n: usize) {
    let m = match ExactModel::new(n) {
        Ok(m) => m,
        Err(e) => return ctx.check("construct", "flat model H^n", |_| Err(e)),
    };
    let dim = m.dim();
    ctx.check(
        "quaternion_relations",
        "J_a^2 = -Id and J_1 J_2 = J_3",
        |_| {
            let id = Mat::<Rational>::identity(dim);
            let mut res = max_abs_entry(&(&(m.j(0) * m.j(1)) - m.j(2)));
            for a in 0..3 {
                res = res.max(max_abs_entry(&(&(m.j(a) * m.j(a)) + &id)));
            }
            Ok(Outcome::exact_residual(&res, None))
        },
    );
    let trials = ctx.config.trials.min(10);
    ctx.check(
        "omega_q_hermitian",
        "omega0(Jx, Jy) = omega0(x, y) for J in the 2-sphere of Q",
        |rng| {
            let frames: Vec<_> = (0..trials).map(|_| random_unit_quaternion(rng)).collect();
            let rep = is_q_hermitian(&m, m.omega(), &frames)?;
            let witness = rep
                .witness
                .map(|w| json!({ "x": w.x, "y": w.y, "defect": w.defect.to_string() }));
            Ok(Outcome::exact(rep.hermitian, witness))
        },
    );
    ctx.check(
        "metric_signatures",
        "g_a = omega0(., J_a .) is symmetric of signature (2n, 2n)",
        |_| {
            let bad: Vec<usize> = (0..3)
                .filter(|&a| m.g(a) != &m.g(a).transpose() || m.signature(a) != (2 * n, 2 * n, 0))
                .collect();
            Ok(Outcome::exact(
                bad.is_empty(),
                (!bad.is_empty()).then(|| json!({ "a": bad })),
            ))
        },
    );
    ctx.check(
        "metric_invariance",
        "g_a is J_a-invariant and not J_b-invariant for b != a",
        |_| {
            let bad: Vec<(usize, usize)> = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .filter(|&(a, b)| m.hermiticity_witness(a, b).is_some() == (a == b))
                .collect();
            Ok(Outcome::exact(
                bad.is_empty(),
                (!bad.is_empty()).then(|| json!({ "pairs": bad })),
            ))
        },
    );
    let trials = ctx.config.trials.min(20);
    ctx.check(
        "omega_quaternion_formula",
        "omega0(x, y) = Re sum conj(x_k) j y_k",
        |rng| {
            for _ in 0..trials {
                let x = random_vector(rng, dim);
                let y = random_vector(rng, dim);
                let d = m.omega_form(&x, &y) - m.omega_quaternionic(&x, &y);
                if !d.is_zero() {
                    let w = json!({ "x": fmt_vec(&x), "y": fmt_vec(&y) });
                    return Ok(Outcome::exact_residual(&d.abs(), Some(w)));
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
}

fn fmt_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn liealg(ctx: &mut Ctx, n: usize) {
    let m = match ExactModel::new(n) {
        Ok(m) => m,
        Err(e) => return ctx.check("construct", "flat model H^n", |_| Err(e)),
    };
    let mut basis: Option<ExactLieBasis> = None;
    ctx.check("so_star_dimension", "dim so*(2n) = n(2n-1)", |_| {
        let b = enumerate_so_star_basis(&m)?;
        let found = b.so_basis.len();
        let expected = n * (2 * n - 1);
        basis = Some(b);
        Ok(Outcome {
            passed: found == expected && so_star_dimension(n) == expected,
            residual: found.abs_diff(expected) as f64,
            witness: Some(json!({ "found": found, "expected": expected })),
        })
    });
    let Some(b) = basis else { return };
    ctx.check("bracket_closure", "[g, g] lies in so*(2n) + sp(1)", |_| {
        let bad = (0..b.dim())
            .flat_map(|i| (i + 1..b.dim()).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .find_first(|&(i, j)| {
                b.decompose(&m, &b.element(i).commutator(b.element(j)))
                    .is_err()
            });
        Ok(Outcome::exact(
            bad.is_none(),
            bad.map(|(i, j)| json!({ "i": i, "j": j })),
        ))
    });
    let kappa = ctx.config.kappa.clone();
    let trials = ctx.config.trials.min(10);
    ctx.check(
        "circle_map_equivariance",
        "[B, x o y] = (Bx) o y + x o (By) for B in g",
        |rng| {
            for _ in 0..trials {
                let x = random_vector(rng, m.dim());
                let y = random_vector(rng, m.dim());
                let bm = b.combine(&m, &random_vector(rng, b.dim())).matrix;
                let lhs = bm.commutator(&circle_map(&m, &x, &y, &kappa)?.matrix);
                let rhs = &circle_map(&m, &bm.matvec(&x), &y, &kappa)?.matrix
                    + &circle_map(&m, &x, &bm.matvec(&y), &kappa)?.matrix;
                let res = max_abs_entry(&(&lhs - &rhs));
                if !res.is_zero() {
                    let w = json!({ "x": fmt_vec(&x), "y": fmt_vec(&y) });
                    return Ok(Outcome::exact_residual(&res, Some(w)));
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
}

fn curvature(ctx: &mut Ctx, n: usize) {
    let (m, b) = match ExactModel::new(n).and_then(|m| enumerate_so_star_basis(&m).map(|b| (m, b)))
    {
        Ok(mb) => mb,
        Err(e) => return ctx.check("construct", "flat model H^n", |_| Err(e)),
    };
    let kappa = ctx.config.kappa.clone();
    let params = match CurvParams::pinned(kappa.clone(), n) {
        Ok(p) => p,
        Err(e) => return ctx.check("construct", "R_A with kappa != 0", |_| Err(e)),
    };
    let mut tensors: Vec<CurvTensor<Rational>> = Vec::new();
    ctx.check(
        "bianchi_pinned",
        "first Bianchi identity holds for every A in g when c1 = 2 kappa, c2 = n kappa",
        |_| {
            tensors = (0..b.dim())
                .into_par_iter()
                .map(|i| curvature_of(&m, &b, &b.lie_element(&m, i), &params))
                .collect::<CoreResult<_>>()?;
            let mut worst = Rational::zero();
            let mut witness = None;
            for (i, r) in tensors.iter().enumerate() {
                let rep = bianchi_check(r);
                if rep.residual > worst {
                    worst = rep.residual.clone();
                    witness = Some(json!({ "basis_element": i, "triple": rep.witness }));
                }
            }
            Ok(Outcome::exact_residual(&worst, witness))
        },
    );
    ctx.check(
        "bianchi_perturbed",
        "first Bianchi identity fails for (c1 +- 1, c2) and (c1, c2 +- 1)",
        |_| {
            let grid = CurvParams::perturbation_grid(kappa.clone(), n)?;
            let mut unbroken = Vec::new();
            let mut smallest: Option<Rational> = None;
            for (k, q) in grid.iter().enumerate() {
                let hit = (0..b.dim())
                    .into_par_iter()
                    .map(|i| {
                        curvature_of(&m, &b, &b.lie_element(&m, i), q)
                            .map(|r| bianchi_check(&r).residual)
                    })
                    .find_first(|r| r.as_ref().map_or(true, |v| !v.is_zero()));
                match hit {
                    Some(Ok(v)) => {
                        smallest = Some(smallest.map_or(v.clone(), |s: Rational| s.min(v)));
                    }
                    Some(Err(e)) => return Err(e),
                    None => unbroken.push(k),
                }
            }
            Ok(Outcome {
                passed: unbroken.is_empty(),
                residual: smallest.map_or(0.0, |s| s.to_f64()),
                witness: (!unbroken.is_empty())
                    .then(|| json!({ "unbroken_perturbations": unbroken })),
            })
        },
    );
    if tensors.len() != b.dim() {
        return;
    }
    let ricci: Vec<Mat<Rational>> = tensors.par_iter().map(ricci_of).collect();
    ctx.check(
        "ricci_coefficients",
        "Ric_A = 2(n+2) kappa omega0(A., .) on so*(2n) and 4n kappa omega0(A., .) on sp(1)",
        |_| {
            let so = &kappa * rat(2 * (n as i64 + 2), 1);
            let sp = &kappa * rat(4 * n as i64, 1);
            let mut worst = Rational::zero();
            let mut witness = None;
            for (i, ric) in ricci.iter().enumerate() {
                let a = b.lie_element(&m, i);
                let coef = if a.has_zero_sp_part(0.0) { &so } else { &sp };
                let res = max_abs_entry(&(ric - &omega_of(&m, &a.matrix).scale(coef)));
                if res > worst {
                    worst = res;
                    witness = Some(json!({ "basis_element": i }));
                }
            }
            Ok(Outcome::exact_residual(&worst, witness))
        },
    );
    ctx.check("ricci_symmetric", "Ric_A is symmetric", |_| {
        let bad = ricci.iter().position(|r| r != &r.transpose());
        Ok(Outcome::exact(
            bad.is_none(),
            bad.map(|i| json!({ "basis_element": i })),
        ))
    });
    ctx.check(
        "hermiticity_dichotomy",
        "Ric_A is Q-Hermitian iff the sp(1) part of A vanishes",
        |rng| {
            let frames: Vec<_> = (0..3).map(|_| random_unit_quaternion(rng)).collect();
            for (i, ric) in ricci.iter().enumerate() {
                let rep = is_q_hermitian(&m, ric, &frames)?;
                let so = b.lie_element(&m, i).has_zero_sp_part(0.0);
                if rep.hermitian != so || rep.witness.is_some() == rep.hermitian {
                    return Ok(Outcome::exact(
                        false,
                        Some(json!({ "basis_element": i, "hermitian": rep.hermitian })),
                    ));
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
    let trials = ctx.config.trials.min(20);
    ctx.check(
        "ricci_closed_form",
        "Ric_A(y, z) = (2n+1) kappa omega0(Ay, z) + (kappa/2) sum g_a(y, z) tr(J_a A) - kappa sum omega0(J_a A J_a y, z)",
        |rng| {
            let samples: Vec<Vec<Rational>> =
                (0..trials).map(|_| random_vector(rng, b.dim())).collect();
            let worst = samples
                .par_iter()
                .enumerate()
                .map(|(k, c)| {
                    let a = b.combine(&m, c);
                    let ric = ricci_of(&curvature_of(&m, &b, &a, &params)?);
                    let res = max_abs_entry(&(&ric - &ricci_closed_form(&m, &a.matrix, &kappa)));
                    Ok((res, k))
                })
                .collect::<CoreResult<Vec<_>>>()?
                .into_iter()
                .max_by(|x, y| x.0.cmp(&y.0));
            let (res, k) = worst.unwrap_or((Rational::zero(), 0));
            let witness = (!res.is_zero()).then(|| json!({ "coefficients": fmt_vec(&samples[k]) }));
            Ok(Outcome::exact_residual(&res, witness))
        },
    );
    let dim_g = b.dim();
    ctx.check(
        "curvature_map_rank",
        "A -> R_A is injective: rank = dim g",
        |_| {
            let r = curvature_map_rank(&m, &b, &params)?;
            Ok(Outcome {
                passed: r == dim_g,
                residual: r.abs_diff(dim_g) as f64,
                witness: Some(json!({ "rank": r, "dim_g": dim_g })),
            })
        },
    );
    let kf = kappa.to_f64();
    ctx.check(
        "curvature_map_svd",
        "floating-point singular values give numerical rank dim g",
        |_| {
            let fm = FloatModel::new(n)?;
            let fb = enumerate_so_star_basis(&fm)?;
            let sv = curvature_map_singular_values(&fm, &fb, &CurvParams::pinned(kf, n)?)?;
            let r = numerical_rank(&sv, 1e-8);
            let max = sv.first().copied().unwrap_or(0.0);
            let gap = sv.get(dim_g).copied().unwrap_or(0.0) / max.max(f64::MIN_POSITIVE);
            Ok(Outcome {
                passed: r == dim_g,
                residual: gap,
                witness: Some(
                    json!({ "rank": r, "smallest_kept": sv.get(dim_g.saturating_sub(1)) }),
                ),
            })
        },
    );
}

/// The square of an integer quaternion scaled by a rational, so that `|h|` is rational.
fn rational_point(rng: &mut impl Rng) -> [Rational; 4] {
    loop {
        let [a, b, c, d]: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-5..=5));
        if a * a + b * b + c * c + d * d == 0 {
            continue;
        }
        let r = rat(rng.gen_range(1..=7), rng.gen_range(1..=5));
        let v = [
            a * a - b * b - c * c - d * d,
            2 * a * b,
            2 * a * c,
            2 * a * d,
        ];
        return v.map(|x| &r * rat(x, 1));
    }
}

fn eval_form(f: &VerticalForm, p: &[Rational; 4]) -> CoreResult<Vec<(u8, Rational)>> {
    f.masks()
        .into_iter()
        .map(|k| Ok((k, f.coefficient(k).eval(p)?)))
        .collect()
}

fn form_witness(rep: &qsh_core::forms::EqualityReport) -> Option<Value> {
    rep.witness.map(|p| json!({ "point": p }))
}

fn fiber(ctx: &mut Ctx) {
    let tol = ctx.config.tolerance;
    let sampler = ctx.sampler();
    let points = ctx.config.trials.min(50);
    ctx.check(
        "maurer_cartan_exact",
        "theta_0 = t^-1 dt and theta_a match h^-1 dh at rational points",
        |rng| {
            let oracle = maurer_cartan_oracle();
            let mut ours = vec![theta0_in_dh()?];
            ours.extend((1..=3).map(theta_in_dh));
            for _ in 0..points {
                let p = rational_point(rng);
                for (i, (o, f)) in oracle.iter().zip(&ours).enumerate() {
                    if eval_form(o, &p)? != eval_form(f, &p)? {
                        let w = json!({ "component": i, "point": fmt_vec(&p) });
                        return Ok(Outcome::exact(false, Some(w)));
                    }
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
    let zero2 = VerticalForm::zero(Coframe::Dh, 2).expect("degree 2");
    let zero3 = VerticalForm::zero(Coframe::Dh, 3).expect("degree 3");
    let alphas = alpha_in_dh();
    ctx.check("d_alpha0", "d alpha_0 = 0", |rng| {
        let rep = equal(&alphas[0].d()?, &zero2, &sampler, tol, rng)?;
        Ok(Outcome::measured(rep.max_residual, tol, form_witness(&rep)))
    });
    ctx.check(
        "structure_equations",
        "d alpha_a = -t alpha_0 ^ alpha_a - 2t alpha_b ^ alpha_c",
        |rng| {
            let t = VerticalForm::function(Coframe::Alpha, radius());
            let mut worst = (0.0f64, None);
            for a in 1..=3 {
                let (b, c) = cyclic(a);
                let rhs = alpha(0)
                    .wedge(&alpha(a))?
                    .add(&alpha(b).wedge(&alpha(c))?.scale(&ScalarField::int(2)))?
                    .wedge(&t)?
                    .neg();
                let rep = equal(&alphas[a].d()?, &rhs, &sampler, tol, rng)?;
                if rep.max_residual >= worst.0 {
                    worst = (
                        rep.max_residual,
                        rep.witness.map(|p| json!({ "a": a, "point": p })),
                    );
                }
            }
            Ok(Outcome::measured(worst.0, tol, worst.1))
        },
    );
    ctx.check(
        "beta_invariance",
        "beta_a = alpha_0 ^ alpha_a + alpha_b ^ alpha_c is invariant under I_1, I_2, I_3",
        |_| {
            for a in 1..=3 {
                for b in 1..=3 {
                    if beta(b).pullback_ia(a)? != beta(b) {
                        return Ok(Outcome::exact(false, Some(json!({ "a": a, "b": b }))));
                    }
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
    ctx.check(
        "beta_closed",
        "d beta_a = 0, computed in dh and through the structure equations",
        |rng| {
            let mut worst = (0.0f64, None);
            for a in 1..=3 {
                let (b, c) = cyclic(a);
                let direct = beta(a).to_dh()?.d()?;
                let leibniz = |x: usize, y: usize| -> CoreResult<VerticalForm> {
                    alphas[x]
                        .d()?
                        .wedge(&alphas[y])?
                        .sub(&alphas[x].wedge(&alphas[y].d()?)?)
                };
                let structural = leibniz(0, a)?.add(&leibniz(b, c)?)?;
                for (u, v) in [
                    (&direct, &zero3),
                    (&structural, &zero3),
                    (&direct, &structural),
                ] {
                    let rep = equal(u, v, &sampler, tol, rng)?;
                    if rep.max_residual >= worst.0 {
                        worst = (
                            rep.max_residual,
                            rep.witness.map(|p| json!({ "a": a, "point": p })),
                        );
                    }
                }
            }
            Ok(Outcome::measured(worst.0, tol, worst.1))
        },
    );
    let forms = ctx.config.trials.min(10);
    ctx.check("d_squared", "d^2 = 0 on functions and 1-forms", |rng| {
        let small = Sampler::with_trials(sampler.trials.min(20));
        let mut worst = (0.0f64, None);
        for _ in 0..forms {
            let FlatSolution { f: [g, c0, c1] } = FlatSolution::random(rng);
            let FlatSolution { f: [c2, c3, _] } = FlatSolution::random(rng);
            let fun = VerticalForm::function(Coframe::Dh, g);
            let one = VerticalForm::one_form(Coframe::Dh, [c0, c1, c2, c3]);
            for (u, z) in [(fun.d()?.d()?, &zero2), (one.d()?.d()?, &zero3)] {
                let rep = equal(&u, z, &small, tol, rng)?;
                if rep.max_residual >= worst.0 {
                    worst = (rep.max_residual, form_witness(&rep));
                }
            }
        }
        Ok(Outcome::measured(worst.0, tol, worst.1))
    });
}

fn flat(ctx: &mut Ctx, user: Option<&FlatSolution>) {
    let tol = ctx.config.tolerance;
    let cf_tol = ctx.config.closed_form_tolerance();
    let sampler = ctx.sampler();
    ctx.check(
        "dbeta_equals_pde",
        "the dh-components of d beta are the four PDE residuals",
        |rng| {
            let mut worst = (0.0f64, None);
            for _ in 0..10 {
                let sol = FlatSolution::random(rng);
                let cmp = dbeta_equals_pde(&sol, &sampler, tol, rng)?;
                if !cmp.matches || cmp.max_deviation >= worst.0 {
                    let w =
                        json!({ "F": sol.f.iter().map(ToString::to_string).collect::<Vec<_>>() });
                    worst = (
                        if cmp.matches {
                            cmp.max_deviation
                        } else {
                            f64::MAX
                        },
                        Some(w),
                    );
                }
            }
            Ok(Outcome::measured(worst.0, tol, worst.1))
        },
    );
    ctx.check(
        "hand_checked_solution",
        "F = (h1, -h2, 0) satisfies the PDE system",
        |_| {
            let sol = FlatSolution::parse("h1", "-h2", "0")?;
            let ok = pde_residuals(&sol).iter().all(ScalarField::is_literal_zero);
            Ok(Outcome::exact(ok, None))
        },
    );
    ctx.check(
        "violating_solution_detected",
        "F = (h0, 0, 0) violates the first PDE with residual 1",
        |rng| {
            let sol = FlatSolution::parse("h0", "0", "0")?;
            let r = pde_residuals(&sol);
            let predicted = r[0].as_constant() == Some(&rat(1, 1))
                && r[1..].iter().all(ScalarField::is_literal_zero);
            let cmp = dbeta_equals_pde(&sol, &sampler, tol, rng)?;
            let detected = predicted && cmp.matches && (cmp.max_residual - 1.0).abs() < tol;
            Ok(Outcome::exact(
                detected,
                Some(json!({ "max_residual": cmp.max_residual })),
            ))
        },
    );
    let mut family: Vec<(SolutionConstants, FlatSolution)> = Vec::new();
    ctx.check(
        "solution_family_residuals",
        "the explicit family built from tau_i and eta_i solves the PDE system",
        |rng| {
            let mut worst = (0.0f64, None);
            for _ in 0..20 {
                let k = SolutionConstants::random(rng);
                let sol = solution_family(&k)?;
                let rep = sampler.max_abs(&pde_residuals(&sol), &[], rng)?;
                if rep.max_residual >= worst.0 {
                    worst = (rep.max_residual, rep.witness.map(|p| json!({ "point": p })));
                }
                family.push((k, sol));
            }
            Ok(Outcome::measured(worst.0, cf_tol, worst.1))
        },
    );
    ctx.check(
        "solution_family_cross_representation",
        "sum F_a (dh_0 ^ dh_a + ..) = sum f_a beta_a with f_a = t^2 (..)",
        |rng| {
            let mut worst = (0.0f64, None);
            for (_, sol) in &family {
                let via_f = BetaForm::new(f_of_flat(sol)).form;
                let rep = equal(&via_f, &beta_of_f(sol), &sampler, cf_tol, rng)?;
                if rep.max_residual >= worst.0 {
                    worst = (rep.max_residual, form_witness(&rep));
                }
            }
            Ok(Outcome::measured(worst.0, cf_tol, worst.1))
        },
    );
    ctx.check(
        "torsion_classification",
        "closed F is torsion-free iff every F_a is constant, otherwise of type X57",
        |rng| {
            let constant = torsion_type(&FlatSolution::constant([1, -2, 3]), &sampler, tol, rng)?;
            let linear = torsion_type(&FlatSolution::parse("h1", "-h2", "0")?, &sampler, tol, rng)?;
            let mut ok =
                constant.class == TorsionClass::TorsionFree && linear.class == TorsionClass::X57;
            let mut witness = json!({
                "constant": class_name(constant.class),
                "linear": class_name(linear.class),
            });
            for (i, (k, sol)) in family.iter().enumerate() {
                let expected = if k.yields_constant() {
                    TorsionClass::TorsionFree
                } else {
                    TorsionClass::X57
                };
                let got = torsion_type(sol, &sampler, cf_tol, rng)?.class;
                if got != expected {
                    ok = false;
                    witness["family_member"] = json!(i);
                    witness["family_class"] = json!(class_name(got));
                    break;
                }
            }
            Ok(Outcome::exact(ok, (!ok).then_some(witness)))
        },
    );
    if let Some(sol) = user {
        ctx.check(
            "user_solution_closed",
            "the supplied F satisfies the PDE system",
            |rng| {
                let mut worst = (0.0f64, None);
                let mut values = Vec::new();
                for (i, r) in pde_residuals(sol).iter().enumerate() {
                    let (v, p) = if r.is_literal_zero() {
                        (0.0, None)
                    } else {
                        let rep = sampler.max_abs(std::slice::from_ref(r), &[], rng)?;
                        (rep.max_residual, rep.witness)
                    };
                    values.push(v);
                    if v > worst.0 {
                        worst = (
                            v,
                            Some(json!({ "residual": i + 1, "point": p, "value": v })),
                        );
                    }
                }
                let passed = worst.0 < tol;
                let mut w = worst.1.unwrap_or_else(|| json!({}));
                w["residuals"] = json!(values);
                if passed {
                    let class = torsion_type(sol, &sampler, tol, rng)?;
                    w["torsion"] = json!(class_name(class.class));
                }
                Ok(Outcome::measured(worst.0, tol, Some(w)))
            },
        );
    }
}

fn class_name(c: TorsionClass) -> &'static str {
    match c {
        TorsionClass::TorsionFree => "torsion-free",
        TorsionClass::X57 => "X57",
    }
}

fn symspace(ctx: &mut Ctx, n: usize) {
    let cf_tol = ctx.config.closed_form_tolerance();
    let tol = ctx.config.tolerance;
    let sampler = ctx.sampler();
    ctx.check(
        "r_matches_quaternion_oracle",
        "r(h) = -(c/2n) h^-1 i h",
        |rng| {
            for _ in 0..10 {
                let p = SymSpaceParams::random(n, rng);
                for _ in 0..20 {
                    let q = loop {
                        let q = Quaternion::new(
                            random_rational(rng),
                            random_rational(rng),
                            random_rational(rng),
                            random_rational(rng),
                        );
                        if !q.norm_sq().is_zero() {
                            break q;
                        }
                    };
                    if symspace_r(&p, &q)? != symspace_r_oracle(&p, &q)? {
                        let w = json!({ "h": fmt_vec(&q.to_array()) });
                        return Ok(Outcome::exact(false, Some(w)));
                    }
                }
            }
            Ok(Outcome::exact(true, None))
        },
    );
    let mut closed = (0.0f64, None);
    ctx.check(
        "df_equals_tau",
        "df = tau for f = log(-4n t^4 / D)",
        |rng| {
            let mut worst = (0.0f64, None);
            for _ in 0..10 {
                let p = SymSpaceParams::random(n, rng);
                let rep = symspace_primitive_check(&p, &sampler, rng)?;
                if rep.max_residual >= worst.0 {
                    worst = (rep.max_residual, rep.witness.map(|w| json!({ "point": w })));
                }
                if rep.closed_residual >= closed.0 {
                    closed = (rep.closed_residual, Some(json!({ "c": p.c.to_string() })));
                }
            }
            Ok(Outcome::measured(worst.0, cf_tol, worst.1))
        },
    );
    ctx.check(
        "df_closed",
        "d(df) = 0, relative to the second derivatives of f",
        |_| Ok(Outcome::measured(closed.0, cf_tol, closed.1)),
    );
    let trials = 20;
    ctx.check(
        "obstruction_witnesses",
        "with f nowhere zero and Omega_a = r_a w, r != 0 violates the closedness conditions",
        |rng| {
            let small = Sampler::with_trials(sampler.trials.min(20));
            let mut missing = Vec::new();
            for trial in 0..trials {
                let f: [ScalarField; 3] =
                    std::array::from_fn(|_| ScalarField::int(rng.gen_range(1..=3)) + norm_sq());
                let r: [ScalarField; 3] = match trial % 3 {
                    0 => {
                        let lambda = ScalarField::constant(rat(rng.gen_range(1..=6), 2));
                        f.clone().map(|x| &lambda * &x)
                    }
                    1 => std::array::from_fn(|_| ScalarField::int(rng.gen_range(1..=4))),
                    _ => [
                        ScalarField::var(0),
                        ScalarField::int(1),
                        ScalarField::var(2),
                    ],
                };
                let rep = general_obstruction_check(&r, &f, &small, tol, rng)?;
                if !rep.implication_holds || rep.witnesses.is_empty() {
                    missing.push(trial);
                }
            }
            Ok(Outcome::exact(
                missing.is_empty(),
                (!missing.is_empty()).then(|| json!({ "trials_without_witness": missing })),
            ))
        },
    );
}
