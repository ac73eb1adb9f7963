//! Truncated power series in the deformation parameter `t`.
//!
//! Coefficients are kept through `t^4`; `k!` times coefficient `k` is the
//! exact `k`-th derivative at `t = 0`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::algebra::{bi_inner, bracket, project_h, project_m, SpElement};
use crate::error::{Error, Result};
use crate::metric::MetricDeformation;

pub const ORDER: usize = 5;

const INVERSE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub c: [f64; ORDER],
}

impl Jet {
    pub fn new(c: [f64; ORDER]) -> Self {
        Self { c }
    }

    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = x;
        Self { c }
    }

    /// The series of `t` itself.
    pub fn variable() -> Self {
        let mut c = [0.0; ORDER];
        c[1] = 1.0;
        Self { c }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c[k]
    }

    /// `d^k/dt^k` at `t = 0`.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    /// Evaluates the truncated polynomial.
    pub fn eval(&self, t: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &x| acc * t + x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.c[0];
        if !(c0.abs() > INVERSE_THRESHOLD) {
            return Err(Error::SingularJet { c0 });
        }
        let mut r = [0.0; ORDER];
        r[0] = 1.0 / c0;
        for k in 1..ORDER {
            let s: f64 = (1..=k).map(|j| self.c[j] * r[k - j]).sum();
            r[k] = -s / c0;
        }
        Ok(Self { c: r })
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        Ok(*self * o.inverse()?)
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a += b);
        Self { c }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            c: self.c.map(|x| -x),
        }
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Self { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            c: self.c.map(|x| x * s),
        }
    }
}

/// Panics on a vanishing constant term; use [`Jet::checked_div`] otherwise.
impl Div for Jet {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("series division by a jet with zero constant term")
    }
}

/// Truncated series with coefficients in sp(2).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementSeries {
    pub c: [SpElement; ORDER],
}

impl ElementSeries {
    pub fn constant(x: SpElement) -> Self {
        let mut c = [SpElement::zero(); ORDER];
        c[0] = x;
        Self { c }
    }

    pub fn map(&self, f: impl Fn(&SpElement) -> SpElement) -> Self {
        Self {
            c: self.c.map(|x| f(&x)),
        }
    }

    pub fn project_m(&self) -> Self {
        self.map(project_m)
    }

    pub fn project_h(&self) -> Self {
        self.map(project_h)
    }

    /// Multiplication by `t`, truncating the top coefficient.
    pub fn shift(&self) -> Self {
        let mut c = [SpElement::zero(); ORDER];
        c[1..].copy_from_slice(&self.c[..ORDER - 1]);
        Self { c }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| *x * s)
    }

    /// `M_t x = x + t L x`.
    pub fn metric_apply(&self, l: &MetricDeformation) -> Self {
        *self + self.map(|x| l.apply_unchecked(x)).shift()
    }

    /// `M_t^{-1} x = sum_k (-t)^k L^k x`.
    pub fn metric_inverse(&self, l: &MetricDeformation) -> Self {
        let mut out = self.project_m();
        let mut term = out;
        for _ in 1..ORDER {
            term = term.map(|x| -l.apply_unchecked(x)).shift();
            out = out + term;
        }
        out
    }

    pub fn bracket(&self, o: &Self) -> Self {
        let mut c = [SpElement::zero(); ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += bracket(&self.c[i], &o.c[j]);
            }
        }
        Self { c }
    }

    pub fn bi_inner(&self, o: &Self) -> Jet {
        let mut c = [0.0; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += bi_inner(&self.c[i], &o.c[j]);
            }
        }
        Jet { c }
    }

    /// `g_t(x, y) = <x, M_t y>_bi` on `m`.
    pub fn metric_inner(&self, o: &Self, l: &MetricDeformation) -> Jet {
        self.project_m().bi_inner(&o.project_m().metric_apply(l))
    }
}

impl Add for ElementSeries {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a += b);
        Self { c }
    }
}

impl Sub for ElementSeries {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Jet, b: &[f64; ORDER], tol: f64) -> bool {
        a.c.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn geometric_series() {
        let one = Jet::constant(1.0);
        let r = one / (one - Jet::variable());
        assert!(close(&r, &[1.0; 5], 1e-15));
    }

    #[test]
    fn cubic_over_one_minus_square() {
        // t^3 / (1 - t^2) = t^3 + t^5 + ...
        let t = Jet::variable();
        let r = (t * t * t) / (Jet::constant(1.0) - t * t);
        assert!(close(&r, &[0.0, 0.0, 0.0, 1.0, 0.0], 1e-15));
        assert_eq!(r.derivative(3), 6.0);
    }

    #[test]
    fn inverse_rejects_zero_constant() {
        assert!(matches!(Jet::variable().inverse(), Err(Error::SingularJet { .. })));
    }

    #[test]
    fn product_truncates() {
        let t = Jet::variable();
        let t4 = t * t * t * t;
        assert_eq!(t4.c, [0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!((t4 * t).c, [0.0; 5]);
    }

    #[test]
    fn eval_matches_horner() {
        let j = Jet::new([1.0, -2.0, 0.5, 3.0, -1.0]);
        let t: f64 = 0.3;
        let direct = 1.0 - 2.0 * t + 0.5 * t * t + 3.0 * t.powi(3) - t.powi(4);
        assert!((j.eval(t) - direct).abs() < 1e-15);
    }

    #[test]
    fn metric_inverse_undoes_metric_apply() {
        use crate::algebra::Vec3;
        let l = MetricDeformation::reference();
        let x = ElementSeries::constant(SpElement::m(
            Vec3::new(0.3, -1.0, 2.0),
            Vec3::new(1.0, 0.5, 0.0),
            Vec3::new(-0.2, 0.0, 0.7),
        ));
        let back = x.metric_apply(&l).metric_inverse(&l);
        for k in 0..ORDER {
            let want = if k == 0 { x.c[0] } else { SpElement::zero() };
            assert!((back.c[k] - want).max_abs() < 1e-12, "coefficient {k}");
        }
    }
}
