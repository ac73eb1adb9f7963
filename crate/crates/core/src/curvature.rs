//! Sectional curvature of an invariant metric at the base point `o = eH`.
//!
//! For a plane spanned by `X, Y` in `m`, `K = C / S` with
//! `S = g(X,X) g(Y,Y) - g(X,Y)^2` and
//!
//! ```text
//! C = -3/4 g([X,Y]_m, [X,Y]_m) + 1/2 g([[Y,X]_m, Y]_m, X) + 1/2 g([[X,Y]_m, X]_m, Y)
//!     + g([[X,Y]_h, X], Y) + g(U(X,Y), U(X,Y)) - g(U(X,X), U(Y,Y))
//! ```
//!
//! where `U(X,Y) = 1/2 M^{-1} ([X, MY] + [Y, MX])_m`.
//!
//! Along `M_t = I + tL` every term is expanded as a truncated series in `t`
//! ([`numerator_jet`]), which gives exact derivatives at `t = 0`.

use serde::{Deserialize, Serialize};

use crate::algebra::{bi_inner, bracket, project_h, project_m, SpElement};
use crate::error::{Error, Result};
use crate::jet::{ElementSeries, Jet};
use crate::metric::{DeformedMetric, MetricDeformation};

/// `|[X,Y]| <= COMMUTING_TOL |X| |Y|` counts as commuting.
pub const COMMUTING_TOL: f64 = 1e-9;

const GRAM_THRESHOLD: f64 = 1e-12;

/// An ordered basis of a 2-plane in `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentPlane {
    pub x: SpElement,
    pub y: SpElement,
}

impl TangentPlane {
    pub fn new(x: SpElement, y: SpElement) -> Result<Self> {
        x.check_in_m()?;
        y.check_in_m()?;
        let (nx, ny) = (x.norm(), y.norm());
        if !(nx > 0.0 && ny > 0.0) || !nx.is_finite() || !ny.is_finite() {
            return Err(Error::DegeneratePlane { gram: 0.0 });
        }
        let cos = bi_inner(&x, &y) / (nx * ny);
        let gram = 1.0 - cos * cos;
        if !(gram > GRAM_THRESHOLD) {
            return Err(Error::DegeneratePlane { gram });
        }
        Ok(Self {
            x: project_m(&x),
            y: project_m(&y),
        })
    }

    /// Gram-Schmidt under the bi-invariant product.
    pub fn orthonormalized(&self) -> Self {
        let x = self.x * (1.0 / self.x.norm());
        let y = self.y - x * bi_inner(&x, &self.y);
        let y = y * (1.0 / y.norm());
        Self { x, y }
    }

    /// Basis `(a x + b y, c x + d y)`.
    pub fn recombined(&self, m: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(
            self.x * m[0][0] + self.y * m[0][1],
            self.x * m[1][0] + self.y * m[1][1],
        )
    }

    /// Image under the isotropy action.
    pub fn rotated(&self, angle: f64) -> Self {
        use crate::algebra::ad_h;
        Self {
            x: ad_h(angle, &self.x).expect("plane lies in m"),
            y: ad_h(angle, &self.y).expect("plane lies in m"),
        }
    }

    pub fn commutator_norm(&self) -> f64 {
        bracket(&self.x, &self.y).norm()
    }

    pub fn is_commuting(&self) -> bool {
        self.commutator_norm() <= COMMUTING_TOL * self.x.norm() * self.y.norm()
    }

    pub fn check_commuting(&self) -> Result<()> {
        if self.is_commuting() {
            Ok(())
        } else {
            Err(Error::NotCommuting {
                residual: self.commutator_norm() / (self.x.norm() * self.y.norm()),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub c_value: f64,
    pub s_value: f64,
    pub k_value: f64,
}

/// `U(X,Y) = 1/2 M^{-1} ([X, MY] + [Y, MX])_m`.
pub fn u_tensor(m: &DeformedMetric, x: &SpElement, y: &SpElement) -> Result<SpElement> {
    x.check_in_m()?;
    y.check_in_m()?;
    Ok(u_tensor_unchecked(m, x, y))
}

fn u_tensor_unchecked(m: &DeformedMetric, x: &SpElement, y: &SpElement) -> SpElement {
    let s = bracket(x, &m.apply_unchecked(y)) + bracket(y, &m.apply_unchecked(x));
    m.inverse_apply_unchecked(&project_m(&s)) * 0.5
}

/// The six terms of the numerator, in the order of the module docs.
pub fn numerator_terms(m: &DeformedMetric, p: &TangentPlane) -> [f64; 6] {
    let (x, y) = (&p.x, &p.y);
    let g = |a: &SpElement, b: &SpElement| m.inner_unchecked(a, b);
    let xy = bracket(x, y);
    let xy_m = project_m(&xy);
    let yx_m = project_m(&bracket(y, x));
    let uxy = u_tensor_unchecked(m, x, y);
    let uxx = u_tensor_unchecked(m, x, x);
    let uyy = u_tensor_unchecked(m, y, y);
    [
        -0.75 * g(&xy_m, &xy_m),
        0.5 * g(&project_m(&bracket(&yx_m, y)), x),
        0.5 * g(&project_m(&bracket(&xy_m, x)), y),
        g(&project_m(&bracket(&project_h(&xy), x)), y),
        g(&uxy, &uxy),
        -g(&uxx, &uyy),
    ]
}

pub fn numerator(m: &DeformedMetric, p: &TangentPlane) -> f64 {
    numerator_terms(m, p).iter().sum()
}

pub fn denominator(m: &DeformedMetric, p: &TangentPlane) -> f64 {
    let g = |a: &SpElement, b: &SpElement| m.inner_unchecked(a, b);
    let gxy = g(&p.x, &p.y);
    g(&p.x, &p.x) * g(&p.y, &p.y) - gxy * gxy
}

pub fn sectional_curvature(m: &DeformedMetric, p: &TangentPlane) -> CurvatureReport {
    let c_value = numerator(m, p);
    let s_value = denominator(m, p);
    CurvatureReport {
        c_value,
        s_value,
        k_value: c_value / s_value,
    }
}

fn u_series(l: &MetricDeformation, x: &ElementSeries, y: &ElementSeries) -> ElementSeries {
    let s = x.bracket(&y.metric_apply(l)) + y.bracket(&x.metric_apply(l));
    s.project_m().metric_inverse(l).scale(0.5)
}

/// Series of the six numerator terms along `M_t = I + tL`.
pub fn numerator_term_jets(l: &MetricDeformation, p: &TangentPlane) -> [Jet; 6] {
    let x = ElementSeries::constant(p.x);
    let y = ElementSeries::constant(p.y);
    let g = |a: &ElementSeries, b: &ElementSeries| a.metric_inner(b, l);
    let xy = x.bracket(&y);
    let xy_m = xy.project_m();
    let yx_m = y.bracket(&x).project_m();
    let uxy = u_series(l, &x, &y);
    let uxx = u_series(l, &x, &x);
    let uyy = u_series(l, &y, &y);
    [
        g(&xy_m, &xy_m) * -0.75,
        g(&yx_m.bracket(&y).project_m(), &x) * 0.5,
        g(&xy_m.bracket(&x).project_m(), &y) * 0.5,
        g(&xy.project_h().bracket(&x).project_m(), &y),
        g(&uxy, &uxy),
        -g(&uxx, &uyy),
    ]
}

/// Truncated series of `C(X, Y, t)` at `t = 0`.
pub fn numerator_jet(l: &MetricDeformation, p: &TangentPlane) -> Jet {
    numerator_term_jets(l, p)
        .into_iter()
        .fold(Jet::default(), |acc, j| acc + j)
}

pub fn denominator_jet(l: &MetricDeformation, p: &TangentPlane) -> Jet {
    let x = ElementSeries::constant(p.x);
    let y = ElementSeries::constant(p.y);
    let gxy = x.metric_inner(&y, l);
    x.metric_inner(&x, l) * y.metric_inner(&y, l) - gxy * gxy
}

/// Truncated series of `K(t) = C / S`.
pub fn curvature_jet(l: &MetricDeformation, p: &TangentPlane) -> Result<Jet> {
    numerator_jet(l, p).checked_div(&denominator_jet(l, p))
}

/// `1/2 |[X,LY] - [Y,LX]|^2`, the second derivative of `C` at `t = 0` for a
/// commuting pair.
pub fn second_derivative_closed_form(l: &MetricDeformation, p: &TangentPlane) -> Result<f64> {
    p.check_commuting()?;
    let d = bracket(&p.x, &l.apply_unchecked(&p.y)) - bracket(&p.y, &l.apply_unchecked(&p.x));
    Ok(0.5 * bi_inner(&d, &d))
}
