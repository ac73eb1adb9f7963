//! Cartan subalgebras of sp(2) contained in `m`.
//!
//! Every such subalgebra lies in the isotropy orbit of exactly one of
//!
//! * `F1`: `span{(0,0,v,0), (0,0,0,w')}`, `|v| = |w'| = 1`, `v.w' = 0`;
//! * `F2`: `span{(0,u,0,w), (0,0,u,0)}`, `|u| = 1`, `u.w = 0`;
//! * `F3`: `span{(0,u,u',0), (0,u',u,0)}`, `u.u' = 0`;
//! * `F4`: `span{(0,u,u',0), (0,u',u,mu u)}`, `u.u' = 0`, `mu != 0`.
//!
//! [`canonicalize`] finds the family, the representative and the isotropy
//! angle plus basis change that carry the representative onto the input.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DVector, Matrix2, Matrix3, Matrix3x2, SMatrix, Vector2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{bi_inner, bracket, SpElement, Vec3};
use crate::curvature::TangentPlane;
use crate::error::{Error, Result};
use crate::linalg::{svd, sym_eigen};
use crate::rng::{normal, normal_m, stream_rng, unit_orthogonal_to, unit_vec3};

/// Threshold on singular values for rank decisions on unit-scale data.
pub const RANK_TOL: f64 = 1e-8;
/// Subspace distance below which two planes are treated as equal.
pub const SUBSPACE_TOL: f64 = 1e-8;
/// `|mu|` above this separates `F4` from `F3`.
pub const MU_TOL: f64 = 1e-8;

const ORBIT_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    F1,
    F2,
    F3,
    F4,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::F1, Family::F2, Family::F3, Family::F4];

    pub fn name(&self) -> &'static str {
        match self {
            Family::F1 => "F1",
            Family::F2 => "F2",
            Family::F3 => "F3",
            Family::F4 => "F4",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(Family::F1),
            "F2" => Ok(Family::F2),
            "F3" => Ok(Family::F3),
            "F4" => Ok(Family::F4),
            _ => Err(Error::Config(format!("unknown family {s:?}, expected F1..F4"))),
        }
    }
}

/// Data of a canonical representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum CanonicalParameters {
    F1 { v: Vec3, w_prime: Vec3 },
    F2 { u: Vec3, w: Vec3 },
    F3 { u: Vec3, u_prime: Vec3 },
    F4 { u: Vec3, u_prime: Vec3, mu: f64 },
}

impl CanonicalParameters {
    pub fn family(&self) -> Family {
        match self {
            CanonicalParameters::F1 { .. } => Family::F1,
            CanonicalParameters::F2 { .. } => Family::F2,
            CanonicalParameters::F3 { .. } => Family::F3,
            CanonicalParameters::F4 { .. } => Family::F4,
        }
    }

    /// The representative basis `(X, Y)`.
    pub fn basis(&self) -> (SpElement, SpElement) {
        let z = Vec3::zeros();
        match *self {
            CanonicalParameters::F1 { v, w_prime } => (SpElement::m(z, v, z), SpElement::m(z, z, w_prime)),
            CanonicalParameters::F2 { u, w } => (SpElement::m(u, z, w), SpElement::m(z, u, z)),
            CanonicalParameters::F3 { u, u_prime } => {
                (SpElement::m(u, u_prime, z), SpElement::m(u_prime, u, z))
            }
            CanonicalParameters::F4 { u, u_prime, mu } => {
                (SpElement::m(u, u_prime, z), SpElement::m(u_prime, u, u * mu))
            }
        }
    }

    pub fn representative(&self) -> Result<TangentPlane> {
        let (x, y) = self.basis();
        TangentPlane::new(x, y)
    }
}

/// Input basis = `basis` applied to `ad_h(angle)` of the representative:
/// `x = b[0][0] X' + b[0][1] Y'`, `y = b[1][0] X' + b[1][1] Y'` with
/// `X' = ad_h(angle, X)`, `Y' = ad_h(angle, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub angle: f64,
    pub basis: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanClassification {
    pub family: Family,
    pub parameters: CanonicalParameters,
    pub witness: Witness,
    /// Subspace distance between the input and the witness image.
    pub residual: f64,
}

impl CartanClassification {
    /// The representative moved by the witness; spans the input plane.
    pub fn reconstruct(&self) -> Result<TangentPlane> {
        self.parameters
            .representative()?
            .rotated(self.witness.angle)
            .recombined(self.witness.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneSample {
    pub plane: TangentPlane,
    pub family_hint: Option<Family>,
}

pub fn commutes(p: &TangentPlane) -> bool {
    p.is_commuting()
}

type Basis9 = SMatrix<f64, 9, 2>;

fn column9(x: &SpElement) -> SMatrix<f64, 9, 1> {
    SMatrix::<f64, 9, 1>::from_column_slice(&x.m_coords())
}

fn orthonormal_basis9(p: &TangentPlane) -> Basis9 {
    let q = p.orthonormalized();
    let mut b = Basis9::zeros();
    b.set_column(0, &column9(&q.x));
    b.set_column(1, &column9(&q.y));
    b
}

/// Principal angles between two planes, ascending. Computed from sines so
/// that angles near zero keep full relative precision.
pub fn principal_angles(p: &TangentPlane, q: &TangentPlane) -> [f64; 2] {
    let a = orthonormal_basis9(p);
    let b = orthonormal_basis9(q);
    let cross = b.transpose() * a;
    let residual = a - b * cross;
    let sines = svd(&residual).s;
    let cosines = svd(&cross).s;
    [sines[1].atan2(cosines[0]), sines[0].atan2(cosines[1])]
}

/// Geodesic distance on the Grassmannian of 2-planes in `m`.
pub fn subspace_distance(p: &TangentPlane, q: &TangentPlane) -> f64 {
    let [a, b] = principal_angles(p, q);
    a.hypot(b)
}

fn chordal_sq(p: &TangentPlane, q: &TangentPlane) -> f64 {
    let a = orthonormal_basis9(p);
    let b = orthonormal_basis9(q);
    let residual = a - b * (b.transpose() * a);
    residual.norm_squared()
}

/// `span{(0,0,e1,0), (0,0,0,e2)}`.
pub fn reference_torus() -> TangentPlane {
    let z = Vec3::zeros();
    TangentPlane::new(SpElement::m(z, Vec3::x(), z), SpElement::m(z, z, Vec3::y())).expect("independent")
}

/// Orthonormal basis of `{Y in m : [x, Y] = 0}`, starting with `x / |x|`.
pub fn centralizer_in_m(x: &SpElement) -> Result<Vec<SpElement>> {
    x.check_in_m()?;
    let nx = x.norm();
    if !(nx > 0.0) {
        return Err(Error::DegeneratePlane { gram: 0.0 });
    }
    let mut ad = SMatrix::<f64, 10, 9>::zeros();
    for j in 0..9 {
        let mut c = [0.0; 9];
        c[j] = 1.0;
        let col = bracket(x, &SpElement::from_m_coords(&c)).to_array();
        for (i, val) in col.iter().enumerate() {
            ad[(i, j)] = *val;
        }
    }
    let null = svd(&ad).null_space(RANK_TOL * nx);
    let unit = *x * (1.0 / nx);
    // complement of x inside the null space, without Gram-Schmidt cancellation
    let along = null.transpose() * DVector::from_column_slice(&unit.m_coords());
    let rest = &null * svd(&along.transpose()).null_space(0.5);
    let mut basis = vec![unit];
    for col in rest.column_iter() {
        let mut c = [0.0; 9];
        c.copy_from_slice(col.as_slice());
        basis.push(SpElement::from_m_coords(&c));
    }
    Ok(basis)
}

/// Angle `s` for which `ad_h(s)` makes the `v` and `w` parts of `x`
/// orthogonal with `|v| >= |w|`.
pub fn orthogonalizing_angle(x: &SpElement) -> f64 {
    // v(s).w(s) = cos(4s) v.w - sin(4s) (|v|^2 - |w|^2) / 2
    0.25 * (2.0 * x.v.dot(&x.w)).atan2(x.v.norm_squared() - x.w.norm_squared())
}

/// Roots `(a, b)` on the unit circle of `q00 a^2 + 2 q01 ab + q11 b^2`.
/// A semidefinite form yields its null direction once.
fn quadratic_form_roots(q: Matrix2<f64>) -> Result<Vec<Vector2<f64>>> {
    let (vals, vecs) = sym_eigen(&q);
    let (lo, hi) = (vals[0], vals[1]);
    let q_lo = Vector2::new(vecs[(0, 0)], vecs[(1, 0)]);
    let q_hi = Vector2::new(vecs[(0, 1)], vecs[(1, 1)]);
    let scale = lo.abs().max(hi.abs());
    if !(scale > 0.0) {
        return Err(Error::Classification("quadratic form vanishes identically".into()));
    }
    let eps = 1e-12 * scale;
    if lo < -eps && hi > eps {
        let psi = (-lo / hi).sqrt().atan();
        let (s, c) = psi.sin_cos();
        Ok(vec![q_lo * c + q_hi * s, q_lo * c - q_hi * s])
    } else if lo >= -eps && hi > eps {
        Ok(vec![q_lo])
    } else if hi <= eps && lo < -eps {
        Ok(vec![q_hi])
    } else {
        Err(Error::Classification("quadratic form has no real root".into()))
    }
}

fn first_significant_negative(v: &Vec3) -> bool {
    let scale = v.amax();
    v.iter().find(|c| c.abs() > 1e-9 * scale.max(1e-300)).is_some_and(|c| *c < 0.0)
}

fn lex_less(a: &Vec3, b: &Vec3) -> bool {
    for i in 0..3 {
        if (a[i] - b[i]).abs() > 1e-9 {
            return a[i] < b[i];
        }
    }
    false
}

fn vw_dependence(x: &SpElement) -> (Vec3, f64, f64) {
    // dominant direction of the 3x2 block [v w] and the coordinates along it
    let m = Matrix3x2::from_columns(&[x.v, x.w]);
    let n = vec3(&svd(&m).left(0));
    (n, n.dot(&x.v), n.dot(&x.w))
}

/// Family, representative and witness for a Cartan subalgebra in `m`.
pub fn canonicalize(p: &TangentPlane) -> Result<CartanClassification> {
    p.check_commuting()?;
    let q = p.orthonormalized();
    let u = Matrix3x2::from_columns(&[q.x.u, q.y.u]);
    let d = svd(&u);
    let sv = [d.s[0], d.s[1]];
    let rank = d.rank(RANK_TOL);
    let right = |k: usize| Vector2::new(d.v_t[(k, 0)], d.v_t[(k, 1)]);
    let (angle, params) = match rank {
        0 => reduce_case_one(&q)?,
        1 => reduce_case_two(&q, vec3(&d.left(0)), right(0), right(1))?,
        _ => {
            let frame = [vec3(&d.left(0)), vec3(&d.left(1))];
            let coeffs = [right(0) / sv[0], right(1) / sv[1]];
            reduce_case_three(&q, frame, coeffs)?
        }
    };
    finish(p, params, -angle)
}

fn vec3(x: &nalgebra::DVector<f64>) -> Vec3 {
    Vec3::new(x[0], x[1], x[2])
}

fn combine(q: &TangentPlane, c: &Vector2<f64>) -> SpElement {
    q.x * c[0] + q.y * c[1]
}

/// Fits the basis change and checks the witness.
fn finish(p: &TangentPlane, parameters: CanonicalParameters, angle: f64) -> Result<CartanClassification> {
    let rep = parameters.representative()?;
    let moved = rep.rotated(angle);
    let gram = Matrix2::new(
        bi_inner(&moved.x, &moved.x),
        bi_inner(&moved.x, &moved.y),
        bi_inner(&moved.y, &moved.x),
        bi_inner(&moved.y, &moved.y),
    );
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Classification("representative is degenerate".into()))?;
    let fit = |z: &SpElement| gram_inv * Vector2::new(bi_inner(&moved.x, z), bi_inner(&moved.y, z));
    let (a, b) = (fit(&p.x), fit(&p.y));
    let witness = Witness {
        angle,
        basis: [[a[0], a[1]], [b[0], b[1]]],
    };
    let residual = subspace_distance(p, &moved);
    if !(residual < SUBSPACE_TOL) {
        return Err(Error::Classification(format!(
            "{} representative misses the input plane by {residual:e}",
            parameters.family()
        )));
    }
    Ok(CartanClassification {
        family: parameters.family(),
        parameters,
        witness,
        residual,
    })
}

/// `u = 0` on the whole plane.
fn reduce_case_one(q: &TangentPlane) -> Result<(f64, CanonicalParameters)> {
    // v x w of aX + bY is a vector-valued binary quadratic; its components
    // share their roots, the two lines of the plane whose (v, w) are parallel
    let p = q.x.v.cross(&q.x.w);
    let r = q.y.v.cross(&q.y.w);
    let mid = q.x.v.cross(&q.y.w) + q.y.v.cross(&q.x.w);
    let n = Matrix3::from_columns(&[p, mid * 0.5, r]);
    let coeffs = svd(&n).right(0);
    let form = Matrix2::new(coeffs[0], coeffs[1], coeffs[1], coeffs[2]);
    let roots = quadratic_form_roots(form)?;
    if roots.len() != 2 {
        return Err(Error::Classification("case I plane has a single parallel line".into()));
    }
    let first = combine(q, &roots[0]);
    let second = combine(q, &roots[1]);
    let (_, a, b) = vw_dependence(&first);
    let mut angle = 0.5 * b.atan2(a);
    let x1 = crate::algebra::ad_h(angle, &first)?;
    let y1 = crate::algebra::ad_h(angle, &second)?;
    let mut v = x1.v.normalize();
    let mut w_prime = y1.w.normalize();
    if first_significant_negative(&v) {
        v = -v;
    }
    if first_significant_negative(&w_prime) {
        w_prime = -w_prime;
    }
    if lex_less(&v, &w_prime) {
        // a quarter turn exchanges the roles of v and w'
        std::mem::swap(&mut v, &mut w_prime);
        angle += FRAC_PI_4;
    }
    Ok((angle, CanonicalParameters::F1 { v, w_prime }))
}

/// `u` components of rank one.
fn reduce_case_two(
    q: &TangentPlane,
    e_u: Vec3,
    keep: Vector2<f64>,
    kill: Vector2<f64>,
) -> Result<(f64, CanonicalParameters)> {
    let x0 = combine(q, &keep);
    let mut y0 = combine(q, &kill);
    y0.u = Vec3::zeros();
    let (alpha, beta) = (e_u.dot(&y0.v), e_u.dot(&y0.w));
    let rho = alpha.hypot(beta);
    if !(rho > RANK_TOL) {
        return Err(Error::Classification("case II partner has no u-direction".into()));
    }
    let mut angle = 0.5 * beta.atan2(alpha);
    let y1 = crate::algebra::ad_h(angle, &y0)? * (1.0 / rho);
    let x1 = crate::algebra::ad_h(angle, &x0)?;
    let x1 = x1 * (1.0 / e_u.dot(&x1.u));
    let x2 = x1 - y1 * e_u.dot(&x1.v);
    let mut u = e_u;
    let mut w = x2.w - e_u * e_u.dot(&x2.w);
    if first_significant_negative(&u) {
        u = -u;
        w = -w;
    }
    if w.amax() > RANK_TOL && first_significant_negative(&w) {
        // a half turn of (v, w) flips w
        w = -w;
        angle += FRAC_PI_2;
    }
    Ok((angle, CanonicalParameters::F2 { u, w }))
}

/// `u` components of rank two.
///
/// On this stratum `v` and `w` are linear functions `V`, `W` of `u` on the
/// plane `P = span(u-parts)`. The isotropy angle acts by
/// `(V, W) -> (cos V + sin W, -sin V + cos W)`; representatives have a
/// nilpotent `W`, so the angle is a root of `det(-sin V + cos W)`.
fn reduce_case_three(
    q: &TangentPlane,
    frame: [Vec3; 2],
    coeffs: [Vector2<f64>; 2],
) -> Result<(f64, CanonicalParameters)> {
    let mut vmat = Matrix2::zeros();
    let mut wmat = Matrix2::zeros();
    let mut leak = 0.0_f64;
    for (j, c) in coeffs.iter().enumerate() {
        let z = combine(q, c);
        for (i, e) in frame.iter().enumerate() {
            vmat[(i, j)] = e.dot(&z.v);
            wmat[(i, j)] = e.dot(&z.w);
        }
        let v_in = frame[0] * vmat[(0, j)] + frame[1] * vmat[(1, j)];
        let w_in = frame[0] * wmat[(0, j)] + frame[1] * wmat[(1, j)];
        leak = leak.max((z.v - v_in).amax()).max((z.w - w_in).amax());
    }
    let scale = 1.0 + vmat.amax().max(wmat.amax());
    if leak > 1e-6 * scale {
        return Err(Error::Classification(format!(
            "case III plane has (v, w) outside span(u) (leak {leak:e})"
        )));
    }
    let det_v = vmat.determinant();
    let det_w = wmat.determinant();
    let mixed = (vmat + wmat).determinant() - det_v - det_w;
    let form = Matrix2::new(det_v, 0.5 * mixed, 0.5 * mixed, det_w);
    let roots = quadratic_form_roots(form)?;
    let rotate = |theta: f64| {
        let (s, c) = theta.sin_cos();
        (vmat * c + wmat * s, -vmat * s + wmat * c)
    };
    let lift = |p: Vector2<f64>| frame[0] * p[0] + frame[1] * p[1];

    // nilpotent W: frame from its singular vectors, mu from the ratio
    let mut f4 = None;
    if roots.len() == 2 {
        for root in &roots {
            let theta = (-root[0]).atan2(root[1]);
            let (vt, wt) = rotate(theta);
            let d = svd(&wt);
            let e_a = Vector2::new(d.u[(0, 0)], d.u[(1, 0)]);
            let mut e_b = Vector2::new(d.v_t[(0, 0)], d.v_t[(0, 1)]);
            let mut r = e_a.dot(&(vt * e_b));
            if r < 0.0 {
                e_b = -e_b;
                r = -r;
            }
            let mu = e_a.dot(&(wt * e_b)) / r;
            if mu > 0.0 && r > RANK_TOL {
                f4 = Some((theta, e_a, e_b, r, mu));
            }
        }
    }
    let (theta, e_a, e_b, r, mu) = match f4 {
        Some(f) if f.4 > MU_TOL => f,
        _ => {
            // W vanishes at the double root; V has zero diagonal in a frame
            // at 45 degrees to the eigenvectors of its symmetric part
            let root = if roots.len() == 1 {
                roots[0]
            } else {
                (roots[0] + roots[1]).normalize()
            };
            let theta = (-root[0]).atan2(root[1]);
            let (vt, _) = rotate(theta);
            let sym = (vt + vt.transpose()) * 0.5;
            let (_, vecs) = sym_eigen(&sym);
            let s1 = Vector2::new(vecs[(0, 0)], vecs[(1, 0)]);
            let s2 = Vector2::new(vecs[(0, 1)], vecs[(1, 1)]);
            let mut best = None;
            for e_a in [(s1 + s2).normalize(), (s1 - s2).normalize()] {
                let mut e_b = Vector2::new(-e_a[1], e_a[0]);
                let mut r = e_a.dot(&(vt * e_b));
                if r < 0.0 {
                    e_b = -e_b;
                    r = -r;
                }
                if r >= 1.0 || best.is_none() {
                    best = Some((theta, e_a, e_b, r, 0.0));
                }
            }
            best.expect("two candidates")
        }
    };
    if !(r > RANK_TOL) {
        return Err(Error::Classification("case III frame is degenerate".into()));
    }
    let mut u = lift(e_a) * r.sqrt();
    let mut u_prime = lift(e_b) / r.sqrt();
    if first_significant_negative(&u) {
        u = -u;
        u_prime = -u_prime;
    }
    let params = if mu.abs() > MU_TOL {
        CanonicalParameters::F4 { u, u_prime, mu }
    } else {
        CanonicalParameters::F3 { u, u_prime }
    };
    Ok((0.5 * theta, params))
}

/// Minimum over the isotropy circle of the distance to the reference torus,
/// with the minimizing angle.
pub fn special_orbit_distance(p: &TangentPlane) -> Result<(f64, f64)> {
    p.check_commuting()?;
    let target = reference_torus();
    let f = |s: f64| chordal_sq(&p.rotated(s), &target);
    let step = PI / ORBIT_GRID as f64;
    let (mut best_s, mut best_f) = (0.0, f64::INFINITY);
    for k in 0..ORBIT_GRID {
        let s = k as f64 * step;
        let val = f(s);
        if val < best_f {
            best_f = val;
            best_s = s;
        }
    }
    let (mut lo, mut hi) = (best_s - step, best_s + step);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if hi - lo < 1e-15 {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    let s = 0.5 * (lo + hi);
    let s = if f(s) <= best_f { s } else { best_s };
    Ok((subspace_distance(&p.rotated(s), &target), s))
}

/// Whether the plane lies in the isotropy orbit of the reference torus.
pub fn in_special_orbit(p: &TangentPlane) -> Result<bool> {
    Ok(special_orbit_distance(p)?.0 < SUBSPACE_TOL)
}

fn random_basis_change<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 2]; 2] {
    loop {
        let m = [[normal(rng), normal(rng)], [normal(rng), normal(rng)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let n0 = m[0][0].hypot(m[0][1]);
        let n1 = m[1][0].hypot(m[1][1]);
        if det.abs() > 0.1 * n0 * n1 {
            return m;
        }
    }
}

fn dress<R: Rng + ?Sized>(rng: &mut R, plane: TangentPlane) -> TangentPlane {
    let s = rng.gen_range(0.0..PI);
    plane
        .rotated(s)
        .recombined(random_basis_change(rng))
        .expect("well conditioned basis change")
}

/// Canonical parameters of a family drawn at random.
pub fn sample_parameters<R: Rng + ?Sized>(rng: &mut R, family: Family) -> CanonicalParameters {
    match family {
        Family::F1 => {
            let v = unit_vec3(rng);
            CanonicalParameters::F1 {
                v,
                w_prime: unit_orthogonal_to(rng, &v),
            }
        }
        Family::F2 => {
            let u = unit_vec3(rng);
            let w = unit_orthogonal_to(rng, &u) * rng.gen_range(0.0..2.0);
            CanonicalParameters::F2 { u, w }
        }
        Family::F3 | Family::F4 => {
            let e_a = unit_vec3(rng);
            let e_b = unit_orthogonal_to(rng, &e_a);
            let r = 4f64.powf(rng.gen_range(-1.0..1.0));
            let (u, u_prime) = (e_a * r.sqrt(), e_b / r.sqrt());
            if family == Family::F3 {
                CanonicalParameters::F3 { u, u_prime }
            } else {
                let mu = rng.gen_range(0.05..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                CanonicalParameters::F4 { u, u_prime, mu }
            }
        }
    }
}

/// A Cartan subalgebra in `m` from the given family (uniform over the four
/// when `None`), moved by a random isotropy angle and basis change.
pub fn sample_cartan(seed: u64, family: Option<Family>) -> PlaneSample {
    sample_cartan_with(&mut stream_rng(seed, 0), family)
}

pub fn sample_cartan_with<R: Rng + ?Sized>(rng: &mut R, family: Option<Family>) -> PlaneSample {
    let family = family.unwrap_or_else(|| Family::ALL[rng.gen_range(0..4)]);
    let rep = sample_parameters(rng, family)
        .representative()
        .expect("representatives are independent");
    PlaneSample {
        plane: dress(rng, rep),
        family_hint: Some(family),
    }
}

fn small_rotation<R: Rng + ?Sized>(rng: &mut R, angle: f64) -> nalgebra::Rotation3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(unit_vec3(rng)), angle)
}

/// Perturbation sizes used for orbit-adjacent samples.
pub const ADVERSARIAL_RANGE: (f64, f64) = (1e-4, 1e-1);

/// A Cartan subalgebra on or near the orbit of the reference torus, at a
/// distance of order `delta`, log-uniform in [`ADVERSARIAL_RANGE`].
///
/// A quarter of the samples lie on the orbit. Half rotate the reference
/// torus by a rotation of R^3 through `delta`. The rest keep `(0,0,e1,0)`
/// and move `(0,0,0,e2)` by `delta` inside the centralizer of `(0,0,e1,0)`,
/// which also reaches nearby `F2` planes.
pub fn sample_near_special<R: Rng + ?Sized>(rng: &mut R) -> PlaneSample {
    let z = Vec3::zeros();
    let (lo, hi) = ADVERSARIAL_RANGE;
    let delta = 10f64.powf(rng.gen_range(lo.log10()..hi.log10()));
    let mode = rng.gen_range(0..4);
    let (rep, hint) = match mode {
        0 => (reference_torus(), Some(Family::F1)),
        1 | 2 => {
            let r = small_rotation(rng, delta);
            let plane = TangentPlane::new(SpElement::m(z, r * Vec3::x(), z), SpElement::m(z, z, r * Vec3::y()))
                .expect("independent");
            (plane, Some(Family::F1))
        }
        _ => {
            let x = SpElement::m(z, Vec3::x(), z);
            let y0 = SpElement::m(z, z, Vec3::y());
            let basis = centralizer_in_m(&x).expect("x is nonzero and in m");
            // random unit direction of the centralizer orthogonal to x and y0
            let xi = normal_m(rng);
            let mut dir = SpElement::zero();
            for b in basis.iter().skip(1) {
                dir += *b * bi_inner(b, &xi);
            }
            dir -= y0 * bi_inner(&y0, &dir);
            let dir = dir * (1.0 / dir.norm());
            (TangentPlane::new(x, y0 + dir * delta).expect("independent"), None)
        }
    };
    PlaneSample {
        plane: dress(rng, rep),
        family_hint: hint,
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
    fn commuting_examples() {
        assert!(commutes(&reference_torus()));
        let p = TangentPlane::new(SpElement::m(z(), e(1), z()), SpElement::m(z(), e(2), z())).unwrap();
        assert!(!commutes(&p));
    }

    #[test]
    fn centralizer_examples() {
        let c = centralizer_in_m(&SpElement::m(z(), e(1), z())).unwrap();
        let target = SpElement::m(z(), z(), e(2));
        let proj: f64 = c.iter().map(|b| bi_inner(b, &target).powi(2)).sum();
        assert!((proj - 1.0).abs() < 1e-12);
        assert_eq!(c.len(), 4);

        let c = centralizer_in_m(&SpElement::m(e(1), z(), z())).unwrap();
        let target = SpElement::m(z(), e(1), z());
        let proj: f64 = c.iter().map(|b| bi_inner(b, &target).powi(2)).sum();
        assert!((proj - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centralizer_of_generic_element_is_a_line() {
        let mut rng = stream_rng(3, 0);
        let x = normal_m(&mut rng);
        let c = centralizer_in_m(&x).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - x * (1.0 / x.norm())).max_abs() < 1e-15);
    }

    #[test]
    fn reference_torus_is_already_canonical() {
        let c = canonicalize(&reference_torus()).unwrap();
        assert_eq!(c.family, Family::F1);
        match c.parameters {
            CanonicalParameters::F1 { v, w_prime } => {
                assert!((v - e(2)).amax() < 1e-12 || (v - e(1)).amax() < 1e-12);
                assert!(v.dot(&w_prime).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
        assert!(c.residual < 1e-12);
    }

    #[test]
    fn proposition_item_four() {
        let mu = 0.7;
        let p = TangentPlane::new(SpElement::m(e(1), e(2), z()), SpElement::m(e(2), e(1), e(1) * mu)).unwrap();
        let c = canonicalize(&p).unwrap();
        assert_eq!(c.family, Family::F4);
        match c.parameters {
            CanonicalParameters::F4 { mu: m, .. } => assert!((m.abs() - mu).abs() < 1e-9, "{m}"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn proposition_item_three() {
        let p = TangentPlane::new(SpElement::m(e(1), e(3) * 2.0, z()), SpElement::m(e(3) * 2.0, e(1), z())).unwrap();
        assert_eq!(canonicalize(&p).unwrap().family, Family::F3);
    }

    #[test]
    fn case_two_representative_round_trip() {
        let (u, w) = (e(3), e(1) * 0.8);
        let rep = CanonicalParameters::F2 { u, w }.representative().unwrap();
        let p = rep.rotated(0.37).recombined([[0.3, -1.2], [2.0, 0.5]]).unwrap();
        let c = canonicalize(&p).unwrap();
        assert_eq!(c.family, Family::F2);
        match c.parameters {
            CanonicalParameters::F2 { u: cu, w: cw } => {
                assert!((cu - u).amax() < 1e-10);
                assert!((cw - w).amax() < 1e-10);
            }
            _ => unreachable!(),
        }
        let back = c.reconstruct().unwrap();
        assert!((back.x - p.x).max_abs() < 1e-10 && (back.y - p.y).max_abs() < 1e-10);
    }

    #[test]
    fn canonicalize_rejects_non_commuting() {
        let p = TangentPlane::new(SpElement::m(z(), e(1), z()), SpElement::m(z(), e(2), z())).unwrap();
        assert!(matches!(canonicalize(&p), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn orbit_membership() {
        assert!(in_special_orbit(&reference_torus()).unwrap());
        let moved = reference_torus().rotated(0.3).recombined([[1.0, 2.0], [-0.5, 0.7]]).unwrap();
        assert!(in_special_orbit(&moved).unwrap());
        let f2 = CanonicalParameters::F2 { u: e(3), w: e(1) }.representative().unwrap();
        assert!(!in_special_orbit(&f2).unwrap());
        // rotating v, w' inside span{e1, e2} leaves the orbit
        let (c, s) = (0.6_f64.cos(), 0.6_f64.sin());
        let tilted = CanonicalParameters::F1 {
            v: e(1) * c + e(2) * s,
            w_prime: -e(1) * s + e(2) * c,
        }
        .representative()
        .unwrap();
        assert!(!in_special_orbit(&tilted).unwrap());
    }

    #[test]
    fn principal_angles_of_tilted_plane() {
        let a: f64 = 1e-9;
        let p = TangentPlane::new(
            SpElement::m(z(), e(1) * a.cos() + e(3) * a.sin(), z()),
            SpElement::m(z(), z(), e(2)),
        )
        .unwrap();
        let [small, zero] = {
            let mut x = principal_angles(&p, &reference_torus());
            x.reverse();
            x
        };
        assert!((small - a).abs() < 1e-20, "{small}");
        assert!(zero.abs() < 1e-20);
    }

    #[test]
    fn samples_are_deterministic_and_commute() {
        for f in Family::ALL {
            let a = sample_cartan(5, Some(f));
            assert_eq!(a, sample_cartan(5, Some(f)));
            assert!(commutes(&a.plane));
            assert_eq!(canonicalize(&a.plane).unwrap().family, f);
        }
    }

    #[test]
    fn jacobi_angle_orthogonalizes() {
        let x = SpElement::m(z(), Vec3::new(1.0, 2.0, -0.5), Vec3::new(0.3, -1.0, 2.0));
        let s = orthogonalizing_angle(&x);
        let y = crate::algebra::ad_h(s, &x).unwrap();
        assert!(y.v.dot(&y.w).abs() < 1e-12);
        assert!(y.v.norm() >= y.w.norm());
    }
}
