//! Quaternionic 2x2 matrix model of sp(2), used as an independent check on
//! the coordinate formulas. Multiplication follows `ij = k, jk = i, ki = j`.

use std::ops::{Add, Mul, Neg, Sub};

use super::element::{SpElement, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub re: f64,
    pub im: Vec3,
}

impl Quaternion {
    pub fn new(re: f64, im: Vec3) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, Vec3::zeros())
    }

    pub fn pure(im: Vec3) -> Self {
        Self::new(0.0, im)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.re.abs() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.im.iter().fold(self.re.abs(), |m, x| m.max(x.abs()))
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im.dot(&o.im),
            o.im * self.re + self.im * o.re + self.im.cross(&o.im),
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

/// Row-major 2x2 quaternionic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuatMatrix(pub [[Quaternion; 2]; 2]);

impl QuatMatrix {
    pub fn entry(&self, i: usize, j: usize) -> Quaternion {
        self.0[i][j]
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let mut out = Self::default();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j];
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        let (p, q) = (self.matmul(o), o.matmul(self));
        let mut out = Self::default();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = p.0[i][j] - q.0[i][j];
            }
        }
        out
    }

    pub fn real_trace(&self) -> f64 {
        self.0[0][0].re + self.0[1][1].re
    }

    /// Largest deviation from `X* = -X`.
    pub fn anti_hermitian_residual(&self) -> f64 {
        let d0 = self.0[0][0].re.abs();
        let d1 = self.0[1][1].re.abs();
        let off = (self.0[1][0] + self.0[0][1].conj()).max_abs();
        d0.max(d1).max(off)
    }
}

pub fn to_matrix(x: &SpElement) -> QuatMatrix {
    let u = Quaternion::pure(x.u);
    let v = Quaternion::pure(x.v);
    let w = Quaternion::pure(x.w);
    let l = Quaternion::real(x.lambda);
    QuatMatrix([
        [(u + w) * 0.5, (v - l) * 0.5],
        [(v + l) * 0.5, (u - w) * 0.5],
    ])
}

/// Inverse of [`to_matrix`]; rejects matrices outside sp(2).
pub fn from_matrix(m: &QuatMatrix) -> Result<SpElement> {
    let scale = 1.0
        + m.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, q| acc.max(q.max_abs()));
    let residual = m.anti_hermitian_residual();
    if !residual.is_finite() || residual > super::TOL * scale {
        return Err(Error::NotAntiHermitian { residual });
    }
    let (a, b, c, d) = (m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]);
    Ok(SpElement::new(
        c.re - b.re,
        a.im + d.im,
        b.im + c.im,
        a.im - d.im,
    ))
}

/// Bracket computed as a matrix commutator.
pub fn bracket_oracle(x: &SpElement, y: &SpElement) -> SpElement {
    let c = to_matrix(x).commutator(&to_matrix(y));
    from_matrix(&c).expect("commutator of anti-Hermitian matrices is anti-Hermitian")
}

/// `-Re tr(XY)` on the matrix model.
pub fn trace_form(x: &SpElement, y: &SpElement) -> f64 {
    -to_matrix(x).matmul(&to_matrix(y)).real_trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bi_inner, bracket};

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i - 1] = 1.0;
        v
    }

    #[test]
    fn unit_quaternion_table() {
        let (i, j, k) = (Quaternion::pure(e(1)), Quaternion::pure(e(2)), Quaternion::pure(e(3)));
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(i * i, Quaternion::real(-1.0));
    }

    #[test]
    fn zero_maps_to_zero() {
        assert_eq!(to_matrix(&SpElement::zero()), QuatMatrix::default());
    }

    #[test]
    fn lambda_line_matrix() {
        let m = to_matrix(&SpElement::h(3.0));
        assert_eq!(m.entry(0, 1), Quaternion::real(-1.5));
        assert_eq!(m.entry(1, 0), Quaternion::real(1.5));
        assert_eq!(m.entry(0, 0), Quaternion::default());
        assert_eq!(m.entry(1, 1), Quaternion::default());
    }

    #[test]
    fn rejects_hermitian_part() {
        let mut m = to_matrix(&SpElement::m(e(1), e(2), e(3)));
        m.0[0][0].re = 0.25;
        assert!(matches!(from_matrix(&m), Err(Error::NotAntiHermitian { .. })));
        let mut m = to_matrix(&SpElement::m(e(1), e(2), e(3)));
        m.0[1][0].im[2] += 0.1;
        assert!(from_matrix(&m).is_err());
    }

    #[test]
    fn oracle_matches_on_basis_pairs() {
        let pairs = [
            (SpElement::m(Vec3::zeros(), e(1), Vec3::zeros()), SpElement::m(Vec3::zeros(), Vec3::zeros(), e(2))),
            (SpElement::m(Vec3::zeros(), e(1), Vec3::zeros()), SpElement::m(Vec3::zeros(), e(2), Vec3::zeros())),
            (SpElement::m(Vec3::zeros(), e(1), Vec3::zeros()), SpElement::m(Vec3::zeros(), Vec3::zeros(), e(1))),
        ];
        for (x, y) in pairs {
            assert!((bracket(&x, &y) - bracket_oracle(&x, &y)).max_abs() < 1e-15);
        }
        let x = SpElement::new(0.7, e(1), e(2), e(3));
        assert_eq!(bracket_oracle(&x, &x).max_abs(), 0.0);
    }

    #[test]
    fn trace_form_is_half_bi_inner_per_factor() {
        for i in 0..10 {
            let mut a = [0.0; 10];
            a[i] = 1.0;
            let x = SpElement::from_array(&a);
            assert_eq!(trace_form(&x, &x), 0.5);
            assert_eq!(bi_inner(&x, &x), 1.0);
        }
    }
}
