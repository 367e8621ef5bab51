//! Quaternions `h0 + h1 i + h2 j + h3 k` over any commutative ring.
//!
//! The coefficient type only needs ring operations, so the same code runs on
//! rationals (exact oracle), floats and symbolic [`crate::forms::ScalarField`]s.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Commutative ring operations needed for quaternion arithmetic.
pub trait Ring:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quaternion<T> {
    pub h0: T,
    pub h1: T,
    pub h2: T,
    pub h3: T,
}

impl<T: Ring> Quaternion<T> {
    pub fn new(h0: T, h1: T, h2: T, h3: T) -> Self {
        Self { h0, h1, h2, h3 }
    }

    pub fn from_array([h0, h1, h2, h3]: [T; 4]) -> Self {
        Self { h0, h1, h2, h3 }
    }

    pub fn to_array(&self) -> [T; 4] {
        [
            self.h0.clone(),
            self.h1.clone(),
            self.h2.clone(),
            self.h3.clone(),
        ]
    }

    pub fn real(r: T) -> Self {
        Self::new(r, T::zero(), T::zero(), T::zero())
    }

    /// The basis unit `1, i, j, k` for `index = 0..4`.
    pub fn unit(index: usize) -> Self {
        let mut c = [T::zero(), T::zero(), T::zero(), T::zero()];
        c[index] = T::one();
        Self::from_array(c)
    }

    pub fn i() -> Self {
        Self::unit(1)
    }

    pub fn j() -> Self {
        Self::unit(2)
    }

    pub fn k() -> Self {
        Self::unit(3)
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.h0.clone(),
            -self.h1.clone(),
            -self.h2.clone(),
            -self.h3.clone(),
        )
    }

    /// `|q|^2 = h0^2 + h1^2 + h2^2 + h3^2`.
    pub fn norm_sq(&self) -> T {
        self.h0.clone() * self.h0.clone()
            + self.h1.clone() * self.h1.clone()
            + self.h2.clone() * self.h2.clone()
            + self.h3.clone() * self.h3.clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(
            self.h0.clone() * s.clone(),
            self.h1.clone() * s.clone(),
            self.h2.clone() * s.clone(),
            self.h3.clone() * s.clone(),
        )
    }

    /// Imaginary part as a 3-vector over `(i, j, k)`.
    pub fn imag(&self) -> [T; 3] {
        [self.h1.clone(), self.h2.clone(), self.h3.clone()]
    }
}

impl<T: Ring + Div<Output = T>> Quaternion<T> {
    /// `q^{-1} = conj(q) / |q|^2`. The caller guarantees `q != 0`.
    pub fn inverse(&self) -> Self {
        let n = self.norm_sq();
        let c = self.conj();
        Self::new(
            c.h0 / n.clone(),
            c.h1 / n.clone(),
            c.h2 / n.clone(),
            c.h3 / n,
        )
    }
}

impl<T: Scalar> Quaternion<T> {
    pub fn is_zero_exact(&self, tol: f64) -> bool {
        [&self.h0, &self.h1, &self.h2, &self.h3]
            .iter()
            .all(|c| c.is_negligible(tol))
    }

    /// Rotation matrix of `v -> q v q^{-1}` on the imaginary quaternions:
    /// column `a` holds the `(i, j, k)` coordinates of `q e_a q^{-1}`.
    pub fn rotation_matrix(&self) -> [[T; 3]; 3] {
        let inv = self.inverse();
        let mut m: [[T; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
        for a in 0..3 {
            let img = (self.clone() * Self::unit(a + 1)) * inv.clone();
            let im = img.imag();
            for b in 0..3 {
                m[b][a] = im[b].clone();
            }
        }
        m
    }
}

impl<T: Ring> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.h0 + o.h0,
            self.h1 + o.h1,
            self.h2 + o.h2,
            self.h3 + o.h3,
        )
    }
}

impl<T: Ring> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.h0 - o.h0,
            self.h1 - o.h1,
            self.h2 - o.h2,
            self.h3 - o.h3,
        )
    }
}

impl<T: Ring> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.h0, -self.h1, -self.h2, -self.h3)
    }
}

impl<T: Ring> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a0, a1, a2, a3) = (self.h0, self.h1, self.h2, self.h3);
        let (b0, b1, b2, b3) = (o.h0, o.h1, o.h2, o.h3);
        Self::new(
            a0.clone() * b0.clone()
                - a1.clone() * b1.clone()
                - a2.clone() * b2.clone()
                - a3.clone() * b3.clone(),
            a0.clone() * b1.clone() + a1.clone() * b0.clone() + a2.clone() * b3.clone()
                - a3.clone() * b2.clone(),
            a0.clone() * b2.clone() - a1.clone() * b3.clone()
                + a2.clone() * b0.clone()
                + a3.clone() * b1.clone(),
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl<T: Ring> Zero for Quaternion<T> {
    fn zero() -> Self {
        Self::real(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.h0.is_zero() && self.h1.is_zero() && self.h2.is_zero() && self.h3.is_zero()
    }
}

impl<T: Ring> One for Quaternion<T> {
    fn one() -> Self {
        Self::real(T::one())
    }
}
