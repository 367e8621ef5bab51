//! Randomized evaluation of scalar fields and forms.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::field::ScalarField;
use crate::forms::vertical::VerticalForm;

/// Sampling policy: points with `|h|` uniform in `[min_radius, max_radius]`,
/// rejected where a guard is smaller than `guard_min` in absolute value or
/// where any field fails to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampler {
    pub trials: usize,
    pub min_radius: f64,
    pub max_radius: f64,
    pub guard_min: f64,
    /// Give up after `trials * max_attempts_factor` candidates.
    pub max_attempts_factor: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Self {
            trials: 100,
            min_radius: 0.5,
            max_radius: 2.0,
            guard_min: 1e-3,
            max_attempts_factor: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub max_residual: f64,
    /// Point where the maximum was attained.
    pub witness: Option<[f64; 4]>,
    pub accepted: usize,
    pub rejected: usize,
}

impl Sampler {
    pub fn with_trials(trials: usize) -> Self {
        Self {
            trials,
            ..Self::default()
        }
    }

    pub fn point(&self, rng: &mut impl Rng) -> [f64; 4] {
        loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.1 && norm <= 1.0 {
                let r = rng.gen_range(self.min_radius..=self.max_radius);
                return v.map(|x| x * r / norm);
            }
        }
    }

    fn evaluate(
        &self,
        fields: &[ScalarField],
        guards: &[ScalarField],
        p: &[f64; 4],
    ) -> Option<f64> {
        for g in guards {
            match g.eval_f64(p) {
                Ok(v) if v.is_finite() && v.abs() >= self.guard_min => {}
                _ => return None,
            }
        }
        let mut max: f64 = 0.0;
        for f in fields {
            let v = f.eval_f64(p).ok().filter(|v| v.is_finite())?;
            max = max.max(v.abs());
        }
        Some(max)
    }

    /// Largest `|field|` over `trials` accepted points.
    pub fn max_abs(
        &self,
        fields: &[ScalarField],
        guards: &[ScalarField],
        rng: &mut impl Rng,
    ) -> Result<SampleReport> {
        let mut report = SampleReport {
            max_residual: 0.0,
            witness: None,
            accepted: 0,
            rejected: 0,
        };
        let limit = self.trials.max(1) * self.max_attempts_factor.max(1);
        while report.accepted < self.trials && report.accepted + report.rejected < limit {
            let want =
                (self.trials - report.accepted).min(limit - report.accepted - report.rejected);
            let points: Vec<[f64; 4]> = (0..want).map(|_| self.point(rng)).collect();
            let values: Vec<Option<f64>> = points
                .par_iter()
                .map(|p| self.evaluate(fields, guards, p))
                .collect();
            for (p, v) in points.iter().zip(values) {
                match v {
                    Some(r) if report.accepted < self.trials => {
                        report.accepted += 1;
                        if report.witness.is_none() || r > report.max_residual {
                            report.max_residual = r;
                            report.witness = Some(*p);
                        }
                    }
                    Some(_) => {}
                    None => report.rejected += 1,
                }
            }
        }
        if report.accepted == 0 {
            return Err(Error::AllSamplesRejected {
                attempts: report.rejected,
            });
        }
        Ok(report)
    }
}

/// Shorthand for [`Sampler::max_abs`].
pub fn sample_residual(
    fields: &[ScalarField],
    guards: &[ScalarField],
    sampler: &Sampler,
    rng: &mut impl Rng,
) -> Result<SampleReport> {
    sampler.max_abs(fields, guards, rng)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualityReport {
    pub equal: bool,
    /// Decided without sampling: the difference simplified to zero.
    pub symbolic: bool,
    pub max_residual: f64,
    pub witness: Option<[f64; 4]>,
}

/// Identity test for forms: simplify the difference, then sample.
///
/// Forms in different coframes are compared in `dh`.
pub fn equal(
    u: &VerticalForm,
    v: &VerticalForm,
    sampler: &Sampler,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<EqualityReport> {
    let (u, v) = if u.coframe() == v.coframe() {
        (u.clone(), v.clone())
    } else {
        (u.clone().into_dh()?, v.clone().into_dh()?)
    };
    if u.degree() != v.degree() {
        let both_zero = u.is_zero() && v.is_zero();
        return Ok(EqualityReport {
            equal: both_zero,
            symbolic: true,
            max_residual: if both_zero { 0.0 } else { f64::INFINITY },
            witness: None,
        });
    }
    let diff = u.sub(&v)?;
    if diff.is_zero() {
        return Ok(EqualityReport {
            equal: true,
            symbolic: true,
            max_residual: 0.0,
            witness: None,
        });
    }
    let fields: Vec<ScalarField> = diff.terms().map(|(_, c)| c.clone()).collect();
    let report = sampler.max_abs(&fields, &[], rng)?;
    Ok(EqualityReport {
        equal: report.max_residual < tolerance,
        symbolic: false,
        max_residual: report.max_residual,
        witness: report.witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Coframe;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_respect_radius() {
        let s = Sampler::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = s.point(&mut rng);
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((0.5 - 1e-12..=2.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn guards_reject_points() {
        let s = Sampler::with_trials(10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let zero = ScalarField::int(0);
        let err = s.max_abs(&[ScalarField::var(0)], &[zero], &mut rng);
        assert_eq!(err, Err(Error::AllSamplesRejected { attempts: 500 }));
    }

    #[test]
    fn sampled_identity() {
        let h0 = ScalarField::var(0);
        let h1 = ScalarField::var(1);
        let lhs = (&h0 + &h1).powi(2);
        let rhs = &(&h0 * &h0) + &(&(&ScalarField::int(2) * &h0) * &h1) + (&h1 * &h1);
        let u = VerticalForm::function(Coframe::Dh, lhs);
        let v = VerticalForm::function(Coframe::Dh, rhs);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = equal(&u, &v, &Sampler::default(), 1e-10, &mut rng).unwrap();
        assert!(r.equal && !r.symbolic);
        let w = VerticalForm::function(Coframe::Dh, h0.clone());
        let r = equal(&u, &w, &Sampler::default(), 1e-10, &mut rng).unwrap();
        assert!(!r.equal && r.witness.is_some());
        assert!(
            equal(&u, &u, &Sampler::default(), 1e-10, &mut rng)
                .unwrap()
                .symbolic
        );
    }
}
