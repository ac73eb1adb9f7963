use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// An element of sp(2) in `(lambda, u, v, w)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SpElement {
    pub lambda: f64,
    pub u: Vec3,
    pub v: Vec3,
    pub w: Vec3,
}

impl SpElement {
    pub fn new(lambda: f64, u: Vec3, v: Vec3, w: Vec3) -> Self {
        Self { lambda, u, v, w }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Element of `m` (`lambda = 0`).
    pub fn m(u: Vec3, v: Vec3, w: Vec3) -> Self {
        Self::new(0.0, u, v, w)
    }

    /// Element of `h`.
    pub fn h(lambda: f64) -> Self {
        Self::new(lambda, Vec3::zeros(), Vec3::zeros(), Vec3::zeros())
    }

    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[0] = self.lambda;
        out[1..4].copy_from_slice(self.u.as_slice());
        out[4..7].copy_from_slice(self.v.as_slice());
        out[7..10].copy_from_slice(self.w.as_slice());
        out
    }

    pub fn from_array(a: &[f64; 10]) -> Self {
        Self::new(
            a[0],
            Vec3::new(a[1], a[2], a[3]),
            Vec3::new(a[4], a[5], a[6]),
            Vec3::new(a[7], a[8], a[9]),
        )
    }

    /// The nine `m` coordinates `(u, v, w)`; `lambda` is dropped.
    pub fn m_coords(&self) -> [f64; 9] {
        let a = self.to_array();
        let mut out = [0.0; 9];
        out.copy_from_slice(&a[1..]);
        out
    }

    pub fn from_m_coords(c: &[f64; 9]) -> Self {
        Self::m(
            Vec3::new(c[0], c[1], c[2]),
            Vec3::new(c[3], c[4], c[5]),
            Vec3::new(c[6], c[7], c[8]),
        )
    }

    pub fn norm(&self) -> f64 {
        bi_inner(self, self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Fails unless `lambda` vanishes to `TOL` relative to the element's size.
    pub fn check_in_m(&self) -> Result<()> {
        let scale = 1.0 + self.max_abs();
        if self.lambda.abs() > super::TOL * scale {
            return Err(Error::NotInM {
                lambda: self.lambda,
            });
        }
        Ok(())
    }
}

impl Add for SpElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.lambda + o.lambda, self.u + o.u, self.v + o.v, self.w + o.w)
    }
}

impl Sub for SpElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.lambda - o.lambda, self.u - o.u, self.v - o.v, self.w - o.w)
    }
}

impl AddAssign for SpElement {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for SpElement {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for SpElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.lambda, -self.u, -self.v, -self.w)
    }
}

impl Mul<f64> for SpElement {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.lambda * s, self.u * s, self.v * s, self.w * s)
    }
}

impl Mul<SpElement> for f64 {
    type Output = SpElement;
    fn mul(self, x: SpElement) -> SpElement {
        x * self
    }
}

/// Lie bracket.
///
/// On `m` the `u`, `v`, `w` components are
/// `(u x u' + v x v' + w x w', u x v' - u' x v, u x w' - u' x w)`. The
/// `lambda` component is `v'.w - v.w'`, the sign the matrix commutator
/// produces; `lambda` acts on `(v, w)` by `(v, w) -> (w, -v)`.
pub fn bracket(x: &SpElement, y: &SpElement) -> SpElement {
    let (l1, u1, v1, w1) = (x.lambda, &x.u, &x.v, &x.w);
    let (l2, u2, v2, w2) = (y.lambda, &y.u, &y.v, &y.w);
    SpElement::new(
        v2.dot(w1) - v1.dot(w2),
        u1.cross(u2) + v1.cross(v2) + w1.cross(w2),
        u1.cross(v2) - u2.cross(v1) + w2 * l1 - w1 * l2,
        u1.cross(w2) - u2.cross(w1) - v2 * l1 + v1 * l2,
    )
}

/// Bi-invariant inner product with unit weight on every factor.
///
/// Equals `-2 Re tr(XY)` on the matrix model.
pub fn bi_inner(x: &SpElement, y: &SpElement) -> f64 {
    x.lambda * y.lambda + x.u.dot(&y.u) + x.v.dot(&y.v) + x.w.dot(&y.w)
}

/// Isotropy action of `exp(angle * Z)`, `Z = (1, 0, 0, 0)` normalized so the
/// `(v, w)` pair turns by twice the angle:
/// `(v, w) -> (cos 2a v + sin 2a w, -sin 2a v + cos 2a w)`.
pub fn ad_h(angle: f64, x: &SpElement) -> Result<SpElement> {
    x.check_in_m()?;
    Ok(rotate_vw(angle, x))
}

/// `ad_h` without the `m` check; `lambda` is left untouched.
pub(crate) fn rotate_vw(angle: f64, x: &SpElement) -> SpElement {
    let (s, c) = (2.0 * angle).sin_cos();
    SpElement::new(x.lambda, x.u, x.v * c + x.w * s, -x.v * s + x.w * c)
}

pub fn project_m(x: &SpElement) -> SpElement {
    SpElement::new(0.0, x.u, x.v, x.w)
}

pub fn project_h(x: &SpElement) -> SpElement {
    SpElement::h(x.lambda)
}
