//! Graded forms on the 4-dimensional fiber with symbolic coefficients.
//!
//! A basis monomial `e_{i1} ^ .. ^ e_{ip}` with `i1 < .. < ip` is stored
//! under the bitmask `sum 1 << ik`, where `e` is either `dh` or `alpha`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::forms::field::ScalarField;
use crate::forms::Coframe;

#[derive(Clone, Debug, PartialEq)]
pub struct VerticalForm {
    coframe: Coframe,
    degree: usize,
    terms: BTreeMap<u8, ScalarField>,
}

/// Sign of `e_S ^ e_T` relative to `e_{S u T}`; zero when they overlap.
pub fn wedge_sign(s: u8, t: u8) -> i32 {
    if s & t != 0 {
        return 0;
    }
    let mut inversions = 0;
    for i in 0..4 {
        if t & (1 << i) != 0 {
            // elements of s greater than i must move past it
            inversions += (s >> (i + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > 4 {
        Err(Error::DegreeOverflow(degree))
    } else {
        Ok(())
    }
}

impl VerticalForm {
    pub fn zero(coframe: Coframe, degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self {
            coframe,
            degree,
            terms: BTreeMap::new(),
        })
    }

    /// A 0-form.
    pub fn function(coframe: Coframe, f: ScalarField) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_literal_zero() {
            terms.insert(0, f);
        }
        Self {
            coframe,
            degree: 0,
            terms,
        }
    }

    /// `e_{i1} ^ .. ^ e_{ip}` for indices in any order.
    pub fn monomial(coframe: Coframe, indices: &[usize]) -> Result<Self> {
        let mut form = Self::function(coframe, ScalarField::int(1));
        for &i in indices {
            form = form.wedge(&Self::basis(coframe, i))?;
        }
        Ok(form)
    }

    /// The basis 1-form `e_i`.
    pub fn basis(coframe: Coframe, i: usize) -> Self {
        assert!(i < 4, "coframe index out of range");
        Self {
            coframe,
            degree: 1,
            terms: BTreeMap::from([(1u8 << i, ScalarField::int(1))]),
        }
    }

    /// `sum_i c[i] e_i`.
    pub fn one_form(coframe: Coframe, c: [ScalarField; 4]) -> Self {
        let mut form = Self {
            coframe,
            degree: 1,
            terms: BTreeMap::new(),
        };
        for (i, f) in c.into_iter().enumerate() {
            form.accumulate(1 << i, f);
        }
        form
    }

    pub fn coframe(&self) -> Coframe {
        self.coframe
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of the monomial with bitmask `mask` (zero if absent).
    pub fn coefficient(&self, mask: u8) -> ScalarField {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| ScalarField::int(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, &ScalarField)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// All bitmasks of the current degree, in increasing order.
    pub fn masks(&self) -> Vec<u8> {
        masks_of_degree(self.degree)
    }

    /// True when every coefficient is a literal zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, mask: u8, f: ScalarField) {
        if f.is_literal_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => old + f,
            None => f,
        };
        if !sum.is_literal_zero() {
            self.terms.insert(mask, sum);
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.coframe != other.coframe {
            return Err(Error::CoframeMismatch {
                expected: self.coframe,
                found: other.coframe,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.accumulate(*k, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|f| -f)
    }

    pub fn scale(&self, s: &ScalarField) -> Self {
        self.map_coefficients(|f| f * s)
    }

    pub fn map_coefficients(&self, g: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let mut out = Self {
            coframe: self.coframe,
            degree: self.degree,
            terms: BTreeMap::new(),
        };
        for (k, v) in &self.terms {
            out.accumulate(*k, g(v));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.coframe != other.coframe {
            return Err(Error::CoframeMismatch {
                expected: self.coframe,
                found: other.coframe,
            });
        }
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.coframe, degree)?;
        for (s, u) in &self.terms {
            for (t, v) in &other.terms {
                let sign = wedge_sign(*s, *t);
                if sign == 0 {
                    continue;
                }
                let c = u * v;
                out.accumulate(s | t, if sign > 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// Exterior derivative; only defined in the `dh` coframe.
    pub fn d(&self) -> Result<Self> {
        if self.coframe != Coframe::Dh {
            return Err(Error::CoframeMismatch {
                expected: Coframe::Dh,
                found: self.coframe,
            });
        }
        let mut out = Self::zero(Coframe::Dh, self.degree + 1)?;
        for (s, c) in &self.terms {
            for b in 0..4 {
                let sign = wedge_sign(1 << b, *s);
                if sign == 0 {
                    continue;
                }
                let db = c.derivative(b);
                out.accumulate(s | (1 << b), if sign > 0 { db } else { -db });
            }
        }
        Ok(out)
    }

    /// Replace each basis 1-form `e_i` by `images[i]` (all in one coframe).
    pub fn substitute(&self, images: &[VerticalForm; 4]) -> Result<Self> {
        let target = images[0].coframe;
        if let Some(bad) = images.iter().find(|f| f.coframe != target || f.degree != 1) {
            return Err(Error::CoframeMismatch {
                expected: target,
                found: bad.coframe,
            });
        }
        let mut out = Self::zero(target, self.degree)?;
        for (s, c) in &self.terms {
            let mut piece = Self::function(target, c.clone());
            for (i, image) in images.iter().enumerate() {
                if s & (1 << i) != 0 {
                    piece = piece.wedge(image)?;
                }
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// Express an `alpha`-coframe form in `dh`.
    pub fn to_dh(&self) -> Result<Self> {
        match self.coframe {
            Coframe::Dh => Err(Error::CoframeMismatch {
                expected: Coframe::Alpha,
                found: Coframe::Dh,
            }),
            Coframe::Alpha => self.substitute(&crate::forms::fiber::alpha_in_dh()),
        }
    }

    /// Convert to `dh` if needed.
    pub fn into_dh(self) -> Result<Self> {
        match self.coframe {
            Coframe::Dh => Ok(self),
            Coframe::Alpha => self.to_dh(),
        }
    }

    /// Pullback by the vertical complex structure `I_a`, `a in 1..=3`:
    /// `alpha_0 -> alpha_a`, `alpha_a -> -alpha_0`, `alpha_b -> -alpha_c`,
    /// `alpha_c -> alpha_b` for `(a, b, c)` cyclic.
    pub fn pullback_ia(&self, a: usize) -> Result<Self> {
        if self.coframe != Coframe::Alpha {
            return Err(Error::CoframeMismatch {
                expected: Coframe::Alpha,
                found: self.coframe,
            });
        }
        assert!((1..=3).contains(&a), "structure index must be 1, 2 or 3");
        let (b, c) = crate::forms::fiber::cyclic(a);
        let e = |i| Self::basis(Coframe::Alpha, i);
        let mut images = [e(0), e(1), e(2), e(3)];
        images[0] = e(a);
        images[a] = e(0).neg();
        images[b] = e(c).neg();
        images[c] = e(b);
        self.substitute(&images)
    }
}

pub fn masks_of_degree(degree: usize) -> Vec<u8> {
    (0u8..16)
        .filter(|m| m.count_ones() as usize == degree)
        .collect()
}

impl fmt::Display for VerticalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let sym = match self.coframe {
            Coframe::Dh => "dh",
            Coframe::Alpha => "a",
        };
        for (n, (mask, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for i in 0..4 {
                if mask & (1 << i) != 0 {
                    write!(f, "*{sym}{i}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dh(i: usize) -> VerticalForm {
        VerticalForm::basis(Coframe::Dh, i)
    }

    fn al(i: usize) -> VerticalForm {
        VerticalForm::basis(Coframe::Alpha, i)
    }

    #[test]
    fn wedge_signs() {
        assert!(dh(0).wedge(&dh(0)).unwrap().is_zero());
        let a = dh(0).wedge(&dh(1)).unwrap();
        let b = dh(1).wedge(&dh(0)).unwrap();
        assert_eq!(a, b.neg());
        assert_eq!(wedge_sign(0b0010, 0b0001), -1);
        assert_eq!(wedge_sign(0b0101, 0b1010), -1);
        let top = al(0)
            .wedge(&al(1))
            .unwrap()
            .wedge(&al(2).wedge(&al(3)).unwrap())
            .unwrap();
        assert_eq!(top.coefficient(0b1111), ScalarField::int(1));
        assert_eq!(top.terms().count(), 1);
    }

    #[test]
    fn exterior_derivative_basics() {
        let h0 = ScalarField::var(0);
        let form = dh(1).scale(&h0);
        assert_eq!(form.d().unwrap(), dh(0).wedge(&dh(1)).unwrap());
        assert!(dh(2).d().unwrap().is_zero());
        assert!(matches!(al(0).d(), Err(Error::CoframeMismatch { .. })));
    }

    #[test]
    fn degree_and_coframe_guards() {
        let three = VerticalForm::monomial(Coframe::Dh, &[0, 1, 2]).unwrap();
        let two = VerticalForm::monomial(Coframe::Dh, &[0, 1]).unwrap();
        assert!(matches!(three.wedge(&two), Err(Error::DegreeOverflow(5))));
        assert!(matches!(
            dh(0).wedge(&al(1)),
            Err(Error::CoframeMismatch { .. })
        ));
        assert!(matches!(dh(0).add(&two), Err(Error::DegreeMismatch { .. })));
        assert!(matches!(
            dh(0).pullback_ia(1),
            Err(Error::CoframeMismatch { .. })
        ));
    }

    #[test]
    fn pullback_rules() {
        assert_eq!(al(0).pullback_ia(1).unwrap(), al(1));
        assert_eq!(al(1).pullback_ia(1).unwrap(), al(0).neg());
        assert_eq!(al(2).pullback_ia(1).unwrap(), al(3).neg());
        assert_eq!(al(3).pullback_ia(1).unwrap(), al(2));
        assert_eq!(al(3).pullback_ia(2).unwrap(), al(1).neg());
    }
}
