//! Ad(H)-invariant metrics on `m`.
//!
//! An invariant operator acts as `(0, u, v, w) -> (0, Au, Cv - Bw, Bv + Cw)`
//! with `A`, `C` symmetric and `B` antisymmetric. The same shape serves both as
//! a deformation direction `L` (no sign condition) and, through
//! `M_t = I + tL`, as a metric (positive definite).

use nalgebra::{Matrix3, Matrix6, SMatrix, Vector6};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{bi_inner, SpElement, Vec3};
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::rng::stream_rng;

/// Smallest admissible eigenvalue of a metric operator.
pub const POSITIVITY_THRESHOLD: f64 = 1e-9;

const SHAPE_TOL: f64 = 1e-12;

pub type Matrix9 = SMatrix<f64, 9, 9>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDeformation {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub c: Matrix3<f64>,
}

impl MetricDeformation {
    pub fn new(a: Matrix3<f64>, b: Matrix3<f64>, c: Matrix3<f64>) -> Result<Self> {
        let scale = 1.0 + a.amax().max(b.amax()).max(c.amax());
        let checks = [
            ("A", "symmetric", (a - a.transpose()).amax()),
            ("B", "antisymmetric", (b + b.transpose()).amax()),
            ("C", "symmetric", (c - c.transpose()).amax()),
        ];
        for (block, expected, residual) in checks {
            if !residual.is_finite() || residual > SHAPE_TOL * scale {
                return Err(Error::BlockShape {
                    block,
                    expected,
                    residual,
                });
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn zero() -> Self {
        Self {
            a: Matrix3::zeros(),
            b: Matrix3::zeros(),
            c: Matrix3::zeros(),
        }
    }

    /// The deformation direction `L` used for the positivity construction.
    #[rustfmt::skip]
    pub fn reference() -> Self {
        Self {
            a: Matrix3::new(
                0.0, 1.0, 0.0,
                1.0, 0.0, 0.0,
                0.0, 0.0, 0.0,
            ),
            b: Matrix3::new(
                0.0, 1.0, 0.0,
                -1.0, 0.0, 0.0,
                0.0, 0.0, 0.0,
            ),
            c: Matrix3::new(
                1.0, 0.0, 1.0,
                0.0, 0.0, 1.0,
                1.0, 1.0, 0.0,
            ),
        }
    }

    pub fn apply(&self, x: &SpElement) -> Result<SpElement> {
        x.check_in_m()?;
        Ok(self.apply_unchecked(x))
    }

    /// Action on the `m` part of `x`; `lambda` is ignored.
    pub(crate) fn apply_unchecked(&self, x: &SpElement) -> SpElement {
        SpElement::m(
            self.a * x.u,
            self.c * x.v - self.b * x.w,
            self.b * x.v + self.c * x.w,
        )
    }

    /// The real 6x6 block `[[C, -B], [B, C]]` acting on `(v, w)`.
    pub fn block(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.c);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-self.b));
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&self.b);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.c);
        m
    }

    /// The operator as a 9x9 matrix on `m` coordinates `(u, v, w)`.
    pub fn matrix9(&self) -> Matrix9 {
        let mut m = Matrix9::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<6, 6>(3, 3).copy_from(&self.block());
        m
    }

    /// Spectra of `A` and of the 6x6 block, each sorted ascending.
    pub fn spectra(&self) -> (Vec<f64>, Vec<f64>) {
        (
            sym_eigen(&self.a).0.as_slice().to_vec(),
            sym_eigen(&self.block()).0.as_slice().to_vec(),
        )
    }

    /// Smallest eigenvalue of the operator read as a metric.
    pub fn min_eigenvalue(&self) -> f64 {
        let (a, b) = self.spectra();
        a[0].min(b[0])
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            a: self.a * t,
            b: self.b * t,
            c: self.c * t,
        }
    }

    /// Deformation direction with entries uniform in `[-1, 1)` and no sign
    /// condition.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut a = Matrix3::zeros();
        let mut b = Matrix3::zeros();
        let mut c = Matrix3::zeros();
        for i in 0..3 {
            for j in i..3 {
                let (x, y, z) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = x;
                a[(j, i)] = x;
                c[(i, j)] = z;
                c[(j, i)] = z;
                if i != j {
                    b[(i, j)] = y;
                    b[(j, i)] = -y;
                }
            }
        }
        Self { a, b, c }
    }
}

/// The metric `M_t = I + tL`, validated positive definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedMetric {
    pub deformation: MetricDeformation,
    pub t: f64,
    #[serde(skip)]
    inverse: Option<Inverse>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Inverse {
    a: Matrix3<f64>,
    block: Matrix6<f64>,
}

impl DeformedMetric {
    pub fn new(deformation: MetricDeformation, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Config(format!("deformation parameter {t} is not finite")));
        }
        let op = Self::operator_of(&deformation, t);
        let min_eigenvalue = op.min_eigenvalue();
        if !(min_eigenvalue > POSITIVITY_THRESHOLD) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let a = op
            .a
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue })?
            .inverse();
        let block = op
            .block()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue })?
            .inverse();
        Ok(Self {
            deformation,
            t,
            inverse: Some(Inverse { a, block }),
        })
    }

    /// The normal metric `M = I`.
    pub fn identity() -> Self {
        Self::new(MetricDeformation::zero(), 0.0).expect("identity is positive definite")
    }

    /// A general invariant metric given by its operator blocks, stored as
    /// `I + L` with `t = 1`.
    pub fn from_operator(op: MetricDeformation) -> Result<Self> {
        let id = Matrix3::identity();
        let l = MetricDeformation {
            a: op.a - id,
            b: op.b,
            c: op.c - id,
        };
        Self::new(l, 1.0)
    }

    fn operator_of(l: &MetricDeformation, t: f64) -> MetricDeformation {
        let id = Matrix3::identity();
        MetricDeformation {
            a: id + l.a * t,
            b: l.b * t,
            c: id + l.c * t,
        }
    }

    /// Blocks `(A, B, C)` of the metric operator itself.
    pub fn operator(&self) -> MetricDeformation {
        Self::operator_of(&self.deformation, self.t)
    }

    fn inv(&self) -> Inverse {
        match self.inverse {
            Some(i) => i,
            // only reachable after deserialization
            None => {
                let op = self.operator();
                Inverse {
                    a: op.a.try_inverse().expect("validated metric"),
                    block: op.block().try_inverse().expect("validated metric"),
                }
            }
        }
    }

    pub fn apply(&self, x: &SpElement) -> Result<SpElement> {
        x.check_in_m()?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &SpElement) -> SpElement {
        let mut y = *x + self.deformation.apply_unchecked(x) * self.t;
        y.lambda = 0.0;
        y
    }

    pub fn inverse_apply(&self, x: &SpElement) -> Result<SpElement> {
        x.check_in_m()?;
        Ok(self.inverse_apply_unchecked(x))
    }

    pub(crate) fn inverse_apply_unchecked(&self, x: &SpElement) -> SpElement {
        let inv = self.inv();
        let vw = Vector6::new(x.v[0], x.v[1], x.v[2], x.w[0], x.w[1], x.w[2]);
        let r = inv.block * vw;
        SpElement::m(
            inv.a * x.u,
            Vec3::new(r[0], r[1], r[2]),
            Vec3::new(r[3], r[4], r[5]),
        )
    }

    /// `<x, M y>_bi`.
    pub fn inner(&self, x: &SpElement, y: &SpElement) -> Result<f64> {
        x.check_in_m()?;
        y.check_in_m()?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &SpElement, y: &SpElement) -> f64 {
        bi_inner(&crate::algebra::project_m(x), &self.apply_unchecked(y))
    }
}

/// Symmetric `A`, antisymmetric `B`, symmetric `C` with entries drawn
/// uniformly (diagonals of `A` and `C` from `[0, 3)`, everything else from
/// `[-1, 1)`), rejected until the operator is positive definite. The result
/// is the metric `M = I + L`, `t = 1`.
pub fn random_admissible_metric(seed: u64) -> DeformedMetric {
    let mut rng = stream_rng(seed, 0);
    random_admissible_metric_with(&mut rng)
}

pub fn random_admissible_metric_with<R: Rng + ?Sized>(rng: &mut R) -> DeformedMetric {
    loop {
        let mut a = Matrix3::zeros();
        let mut b = Matrix3::zeros();
        let mut c = Matrix3::zeros();
        for i in 0..3 {
            a[(i, i)] = rng.gen_range(0.0..3.0);
            c[(i, i)] = rng.gen_range(0.0..3.0);
            for j in (i + 1)..3 {
                let (x, y, z) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = x;
                a[(j, i)] = x;
                b[(i, j)] = y;
                b[(j, i)] = -y;
                c[(i, j)] = z;
                c[(j, i)] = z;
            }
        }
        let op = MetricDeformation { a, b, c };
        if op.min_eigenvalue() > 1e-3 {
            if let Ok(m) = DeformedMetric::from_operator(op) {
                return m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i - 1] = 1.0;
        v
    }

    fn z() -> Vec3 {
        Vec3::zeros()
    }

    #[test]
    fn reference_blocks_by_column() {
        let l = MetricDeformation::reference();
        assert_eq!(l.a * e(1), e(2));
        assert_eq!(l.b * e(2), e(1));
        assert_eq!(l.c * e(3), e(1) + e(2));
        assert!(MetricDeformation::new(l.a, l.b, l.c).is_ok());
    }

    #[test]
    fn reference_deformation_on_reference_torus() {
        let l = MetricDeformation::reference();
        let x = SpElement::m(z(), e(1), z());
        let y = SpElement::m(z(), z(), e(2));
        assert_eq!(l.apply(&x).unwrap(), SpElement::m(z(), e(1) + e(3), -e(2)));
        assert_eq!(l.apply(&y).unwrap(), SpElement::m(z(), -e(1), e(3)));
        assert_eq!(MetricDeformation::zero().apply(&x).unwrap(), SpElement::zero());
    }

    #[test]
    fn shape_violations_are_rejected() {
        let l = MetricDeformation::reference();
        assert!(matches!(
            MetricDeformation::new(l.b, l.b, l.c),
            Err(Error::BlockShape { block: "A", .. })
        ));
        assert!(MetricDeformation::new(l.a, l.a, l.c).is_err());
        assert!(MetricDeformation::new(l.a, l.b, l.b).is_err());
    }

    #[test]
    fn apply_rejects_h() {
        assert!(MetricDeformation::reference().apply(&SpElement::h(1.0)).is_err());
    }

    #[test]
    fn reference_metric_on_y() {
        let t = 0.1;
        let m = DeformedMetric::new(MetricDeformation::reference(), t).unwrap();
        let y = SpElement::m(z(), z(), e(2));
        let got = m.apply(&y).unwrap();
        let want = SpElement::m(z(), -e(1) * t, e(2) + e(3) * t);
        assert!((got - want).max_abs() < 1e-15);
    }

    #[test]
    fn zero_t_is_identity() {
        let m = DeformedMetric::new(MetricDeformation::reference(), 0.0).unwrap();
        let x = SpElement::m(e(1), e(2) * 2.0, e(3) - e(1));
        assert_eq!(m.apply(&x).unwrap(), x);
        assert_eq!(m.inverse_apply(&x).unwrap(), x);
        assert_eq!(m.inner(&x, &x).unwrap(), bi_inner(&x, &x));
    }

    #[test]
    fn reference_deformation_is_not_a_metric() {
        // A has eigenvalue -1, so I + L is singular
        assert!(matches!(
            DeformedMetric::new(MetricDeformation::reference(), 1.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(DeformedMetric::new(MetricDeformation::reference(), -0.3).is_ok());
    }

    #[test]
    fn admissible_metric_is_deterministic() {
        let a = random_admissible_metric(11);
        let b = random_admissible_metric(11);
        assert_eq!(a, b);
        assert!(a.operator().min_eigenvalue() > POSITIVITY_THRESHOLD);
    }
}
