//! Numerical verification drivers.
//!
//! Every sampled object is drawn from its own generator stream, keyed by the
//! run seed and the sample index, and results are collected in index order.
//! Reports are therefore independent of the number of worker threads.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{bi_inner, bracket, bracket_oracle, project_m, trace_form, SpElement, Vec3};
use crate::cartan::{
    in_special_orbit, orthogonalizing_angle, reference_torus, sample_cartan_with, sample_near_special, special_orbit_distance,
    Family, PlaneSample,
};
use crate::curvature::{
    numerator, numerator_jet, second_derivative_closed_form, sectional_curvature, TangentPlane,
};
use crate::error::{Error, Result};
use crate::linalg::{svd, sym_eigen};
use crate::metric::{random_admissible_metric_with, DeformedMetric, MetricDeformation};
use crate::rng::{normal_element, normal_m, stream_rng};

/// Default tolerance for derivative and curvature checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Relative tolerance of the Wilking re-checks.
pub const WILKING_TOL: f64 = 1e-9;

// stream offsets so that different experiments on one seed do not share draws
const PLANE_STREAMS: u64 = 0;
const DEFORMATION_STREAMS: u64 = 1 << 40;
const METRIC_STREAMS: u64 = 2 << 40;
const ORACLE_STREAMS: u64 = 3 << 40;
const BASELINE_STREAMS: u64 = 4 << 40;

/// How test planes are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Restrict family-parametrized samples to one family.
    pub family: Option<Family>,
    /// Interleave samples concentrated near the degenerate orbit.
    pub adversarial: bool,
}

impl SamplingPlan {
    pub fn uniform() -> Self {
        Self::default()
    }

    pub fn mixed() -> Self {
        Self {
            family: None,
            adversarial: true,
        }
    }

    /// Sample `index`; with `adversarial` every odd index is orbit-adjacent.
    pub fn sample(&self, seed: u64, index: u64) -> PlaneSample {
        let mut rng = stream_rng(seed, PLANE_STREAMS + index);
        if self.adversarial && index % 2 == 1 {
            sample_near_special(&mut rng)
        } else {
            sample_cartan_with(&mut rng, self.family)
        }
    }
}

fn par_map<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub p05: f64,
    pub median: f64,
    pub p95: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        Some(Self {
            count: v.len(),
            min: v[0],
            p05: q(0.05),
            median: q(0.5),
            p95: q(0.95),
            max: v[v.len() - 1],
        })
    }
}

// ---------------------------------------------------------------- oracle

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleWitness {
    pub index: u64,
    pub x: SpElement,
    pub y: SpElement,
    pub formula: SpElement,
    pub oracle: SpElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub pairs: usize,
    pub tolerance: f64,
    pub max_bracket_error: f64,
    /// `<x, y>_bi / (-Re tr(XY))` on each of the four factors.
    pub factor_ratios: [f64; 4],
    pub ratio_spread: f64,
    /// Worst relative deviation of the ratio over the random pairs.
    pub pair_ratio_spread: f64,
    pub worst: Option<OracleWitness>,
    pub passed: bool,
}

/// Bracket formula against the quaternionic commutator, and the
/// bi-invariant product against the trace form.
pub fn oracle_suite(seed: u64, pairs: usize, tol: f64) -> OracleReport {
    oracle_suite_with(seed, pairs, tol, bracket)
}

/// [`oracle_suite`] with a substitute for the bracket formula.
pub fn oracle_suite_with(
    seed: u64,
    pairs: usize,
    tol: f64,
    formula: fn(&SpElement, &SpElement) -> SpElement,
) -> OracleReport {
    let rows = par_map(pairs, |i| {
        let mut rng = stream_rng(seed, ORACLE_STREAMS + i);
        let x = normal_element(&mut rng);
        let y = normal_element(&mut rng);
        let f = formula(&x, &y);
        let o = bracket_oracle(&x, &y);
        let err = (f - o).max_abs();
        let tr = trace_form(&x, &y);
        let ratio = if tr.abs() > 1e-3 { Some(bi_inner(&x, &y) / tr) } else { None };
        (i, x, y, f, o, err, ratio)
    });
    let z = Vec3::zeros();
    let factors = [
        SpElement::h(1.0),
        SpElement::m(Vec3::new(0.3, -1.2, 0.7), z, z),
        SpElement::m(z, Vec3::new(-0.4, 0.9, 1.1), z),
        SpElement::m(z, z, Vec3::new(1.5, 0.2, -0.6)),
    ];
    let factor_ratios = factors.map(|f| bi_inner(&f, &f) / trace_form(&f, &f));
    let spread = |rs: &mut dyn Iterator<Item = f64>| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for r in rs {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (hi - lo) / hi.abs()
    };
    let ratio_spread = spread(&mut factor_ratios.iter().copied());
    let pair_ratio_spread = spread(&mut rows.iter().filter_map(|r| r.6).chain(factor_ratios));
    let worst = rows.iter().max_by(|a, b| a.5.total_cmp(&b.5));
    let max_bracket_error = worst.map_or(0.0, |w| w.5);
    let passed = max_bracket_error <= tol && ratio_spread < 1e-12 && pair_ratio_spread < 1e-9;
    OracleReport {
        pairs,
        tolerance: tol,
        max_bracket_error,
        factor_ratios,
        ratio_spread,
        pair_ratio_spread,
        worst: worst.filter(|w| w.5 > tol).map(|w| OracleWitness {
            index: w.0,
            x: w.1,
            y: w.2,
            formula: w.3,
            oracle: w.4,
        }),
        passed,
    }
}

// ---------------------------------------------------------------- lemma 0

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma0Witness {
    pub plane_index: u64,
    pub deformation_index: u64,
    pub plane: TangentPlane,
    pub deformation: MetricDeformation,
    pub coefficients: [f64; 3],
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma0Report {
    pub planes: usize,
    pub deformations: usize,
    pub tolerance: f64,
    pub max_abs_c0: f64,
    pub max_abs_c1: f64,
    pub min_c2: f64,
    /// Largest `|2 c2 - closed form|`.
    pub max_closed_form_gap: f64,
    pub failures: usize,
    pub first_failure: Option<Lemma0Witness>,
    pub passed: bool,
}

/// For commuting planes and arbitrary deformation directions `L`: the
/// curvature numerator vanishes to first order at `t = 0`, its second
/// derivative is nonnegative and equals `1/2 |[X,LY] - [Y,LX]|^2`.
pub fn verify_lemma0(seed: u64, planes: usize, deformations: usize, tol: f64) -> Lemma0Report {
    let ls: Vec<MetricDeformation> = (0..deformations as u64)
        .map(|j| MetricDeformation::random(&mut stream_rng(seed, DEFORMATION_STREAMS + j)))
        .collect();
    let plan = SamplingPlan::mixed();
    let rows = par_map(planes, |i| {
        let plane = plan.sample(seed, i).plane.orthonormalized();
        let mut acc = (0.0_f64, 0.0_f64, f64::INFINITY, 0.0_f64, 0usize, None);
        for (j, l) in ls.iter().enumerate() {
            let jet = numerator_jet(l, &plane);
            let closed = second_derivative_closed_form(l, &plane).expect("sampled planes commute");
            let (c0, c1, c2) = (jet.coeff(0), jet.coeff(1), jet.coeff(2));
            let gap = (2.0 * c2 - closed).abs();
            acc.0 = acc.0.max(c0.abs());
            acc.1 = acc.1.max(c1.abs());
            acc.2 = acc.2.min(c2);
            acc.3 = acc.3.max(gap);
            let bad = !(c0.abs() <= tol && c1.abs() <= tol && c2 >= -tol && gap <= tol);
            if bad {
                acc.4 += 1;
                if acc.5.is_none() {
                    acc.5 = Some(Lemma0Witness {
                        plane_index: i,
                        deformation_index: j as u64,
                        plane,
                        deformation: *l,
                        coefficients: [c0, c1, c2],
                        closed_form: closed,
                    });
                }
            }
        }
        acc
    });
    let mut report = Lemma0Report {
        planes,
        deformations,
        tolerance: tol,
        max_abs_c0: 0.0,
        max_abs_c1: 0.0,
        min_c2: f64::INFINITY,
        max_closed_form_gap: 0.0,
        failures: 0,
        first_failure: None,
        passed: true,
    };
    for r in rows {
        report.max_abs_c0 = report.max_abs_c0.max(r.0);
        report.max_abs_c1 = report.max_abs_c1.max(r.1);
        report.min_c2 = report.min_c2.min(r.2);
        report.max_closed_form_gap = report.max_closed_form_gap.max(r.3);
        report.failures += r.4;
        if report.first_failure.is_none() {
            report.first_failure = r.5;
        }
    }
    report.passed = report.failures == 0;
    report
}

// ---------------------------------------------------------------- lemma 1

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Lemma1Class {
    GenericPositive,
    DegenerateCubic,
    Violation,
}

impl Lemma1Class {
    pub fn name(&self) -> &'static str {
        match self {
            Lemma1Class::GenericPositive => "GENERIC_POSITIVE",
            Lemma1Class::DegenerateCubic => "DEGENERATE_CUBIC",
            Lemma1Class::Violation => "VIOLATION",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Verdict {
    pub id: u64,
    pub family: Option<Family>,
    pub special_orbit: bool,
    pub orbit_distance: f64,
    pub c2: f64,
    pub c3: f64,
    pub classification: Lemma1Class,
    /// Orthonormal basis the coefficients refer to.
    pub plane: TangentPlane,
}

/// Lemma 1 verdict for one plane under the reference deformation.
pub fn lemma1_verdict(id: u64, plane: &TangentPlane, tol: f64) -> Result<Lemma1Verdict> {
    plane.check_commuting()?;
    let q = plane.orthonormalized();
    let jet = numerator_jet(&MetricDeformation::reference(), &q);
    let (c2, c3) = (jet.coeff(2), jet.coeff(3));
    let (orbit_distance, _) = special_orbit_distance(&q)?;
    let special_orbit = orbit_distance < crate::cartan::SUBSPACE_TOL;
    let family = crate::cartan::canonicalize(&q).ok().map(|c| c.family);
    let classification = if !special_orbit && c2 > tol {
        Lemma1Class::GenericPositive
    } else if special_orbit && c2.abs() <= tol && c3.abs() > tol {
        Lemma1Class::DegenerateCubic
    } else {
        Lemma1Class::Violation
    };
    Ok(Lemma1Verdict {
        id,
        family,
        special_orbit,
        orbit_distance,
        c2,
        c3,
        classification,
        plane: q,
    })
}

pub fn verify_lemma1(seed: u64, n_samples: usize) -> Vec<Lemma1Verdict> {
    verify_lemma1_with(seed, n_samples, &SamplingPlan::mixed(), DEFAULT_TOL)
}

pub fn verify_lemma1_with(seed: u64, n_samples: usize, plan: &SamplingPlan, tol: f64) -> Vec<Lemma1Verdict> {
    par_map(n_samples, |i| {
        lemma1_verdict(i, &plan.sample(seed, i).plane, tol).expect("sampled planes commute")
    })
}

// ---------------------------------------------------------------- theorem 1

/// Sign `sigma` of the cubic coefficient on the reference torus; positive
/// curvature on commuting pairs is expected for `sigma * t > 0`.
pub fn working_sign() -> (f64, f64) {
    let c3 = numerator_jet(&MetricDeformation::reference(), &reference_torus()).coeff(3);
    (c3.signum(), c3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMinimum {
    pub t: f64,
    pub min_k: f64,
    pub argmin: u64,
    pub plane: TangentPlane,
    pub negatives: usize,
    pub min_k_over_t2: Option<f64>,
    pub min_k_over_t3: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Positive,
    /// `t = 0`: the normal metric, where commuting planes are flat.
    ZeroMinimum,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub minimum: CurvatureMinimum,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonScan {
    pub grid: Vec<f64>,
    pub min_k: Vec<f64>,
    /// Largest `|t|` of the grid up to which every sampled plane is positive.
    pub largest_positive: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub sigma: f64,
    pub reference_c3: f64,
    pub samples: usize,
    pub rows: Vec<Theorem1Row>,
    /// The same magnitudes with the opposite sign; expected to go negative.
    pub opposite: Vec<CurvatureMinimum>,
    pub opposite_negative: bool,
    pub epsilon_scan: Option<EpsilonScan>,
    pub passed: bool,
}

fn planes_for(seed: u64, n: usize, plan: &SamplingPlan) -> Vec<TangentPlane> {
    par_map(n, |i| plan.sample(seed, i).plane.orthonormalized())
}

/// Minimum sectional curvature over `planes` for `M_t = I + tL`, `L` the
/// reference deformation.
pub fn curvature_minimum(planes: &[TangentPlane], t: f64) -> Result<CurvatureMinimum> {
    let metric = DeformedMetric::new(MetricDeformation::reference(), t)?;
    let ks: Vec<f64> = planes.par_iter().map(|p| sectional_curvature(&metric, p).k_value).collect();
    let (argmin, min_k) = ks
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Config("no planes to evaluate".into()))?;
    let ratio = |p: i32| (t != 0.0).then(|| ks.iter().map(|k| k / t.powi(p)).fold(f64::INFINITY, f64::min));
    Ok(CurvatureMinimum {
        t,
        min_k,
        argmin: argmin as u64,
        plane: planes[argmin],
        negatives: ks.iter().filter(|k| **k < 0.0).count(),
        min_k_over_t2: ratio(2),
        min_k_over_t3: ratio(3),
    })
}

/// Validates that `M_t` is positive definite for every requested `t`.
pub fn check_t_values(t_values: &[f64]) -> Result<()> {
    for &t in t_values {
        DeformedMetric::new(MetricDeformation::reference(), t)?;
    }
    Ok(())
}

/// Theorem 1 scan. `t_values` are taken as magnitudes and evaluated at
/// `t = sigma |t|`; the opposite sign is evaluated for comparison.
pub fn verify_theorem1(seed: u64, n_samples: usize, t_values: &[f64]) -> Result<Theorem1Report> {
    let (sigma, _) = working_sign();
    let signed: Vec<f64> = t_values.iter().map(|t| sigma * t.abs()).collect();
    let mut report = verify_theorem1_at(seed, n_samples, &signed, &SamplingPlan::mixed(), true)?;
    report.epsilon_scan = Some(epsilon_scan(seed, n_samples, &SamplingPlan::mixed())?);
    Ok(report)
}

/// Theorem 1 scan at exactly the given `t`, without re-signing.
pub fn verify_theorem1_at(
    seed: u64,
    n_samples: usize,
    t_values: &[f64],
    plan: &SamplingPlan,
    with_opposite: bool,
) -> Result<Theorem1Report> {
    check_t_values(t_values)?;
    let (sigma, reference_c3) = working_sign();
    let planes = planes_for(seed, n_samples, plan);
    let mut rows = Vec::new();
    for &t in t_values {
        let minimum = curvature_minimum(&planes, t)?;
        let status = if t == 0.0 {
            if minimum.min_k.abs() <= 1e-12 {
                RowStatus::ZeroMinimum
            } else {
                RowStatus::Failed
            }
        } else if minimum.min_k > 0.0 {
            RowStatus::Positive
        } else {
            RowStatus::Failed
        };
        rows.push(Theorem1Row { minimum, status });
    }
    let mut opposite = Vec::new();
    if with_opposite {
        // the reference torus and its neighbours carry the sign of the cubic
        let near: Vec<TangentPlane> = std::iter::once(reference_torus())
            .chain(planes_for(seed, n_samples.min(2_000), &SamplingPlan::mixed()))
            .collect();
        for &t in t_values.iter().filter(|t| **t != 0.0) {
            if DeformedMetric::new(MetricDeformation::reference(), -t).is_ok() {
                opposite.push(curvature_minimum(&near, -t)?);
            }
        }
    }
    let opposite_negative = opposite.iter().all(|m| m.min_k < 0.0);
    let passed = rows.iter().all(|r| r.status != RowStatus::Failed);
    Ok(Theorem1Report {
        sigma,
        reference_c3,
        samples: n_samples,
        rows,
        opposite,
        opposite_negative,
        epsilon_scan: None,
        passed,
    })
}

/// Geometric grid `|t| = 1e-4 * 2^k` on the working sign, stopped at the
/// first non-positive minimum or when `M_t` stops being positive definite.
pub fn epsilon_scan(seed: u64, n_samples: usize, plan: &SamplingPlan) -> Result<EpsilonScan> {
    let (sigma, _) = working_sign();
    let planes = planes_for(seed, n_samples, plan);
    let mut scan = EpsilonScan {
        grid: Vec::new(),
        min_k: Vec::new(),
        largest_positive: None,
    };
    let mut mag = 1e-4;
    while mag < 1.0 {
        let t = sigma * mag;
        if DeformedMetric::new(MetricDeformation::reference(), t).is_err() {
            break;
        }
        let m = curvature_minimum(&planes, t)?;
        scan.grid.push(t);
        scan.min_k.push(m.min_k);
        if m.min_k > 0.0 {
            scan.largest_positive = Some(mag);
        } else {
            break;
        }
        mag *= 2.0;
    }
    Ok(scan)
}

// ---------------------------------------------------------------- wilking

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilkingCase {
    /// Smallest eigenvalue from `A`: `X = (0,u,0,0)`, `Z = (0,0,u,0)`.
    AEigenvector,
    /// Block eigenvector with `v`, `w` dependent: `Z = (0,v,0,0)` or `(0,w,0,0)`.
    BlockDependent,
    /// Block eigenvector with `v`, `w` independent: `Z` from the rotated frame.
    BlockIndependent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilkingCertificate {
    pub metric: DeformedMetric,
    pub lambda: f64,
    pub x: SpElement,
    pub z: SpElement,
    pub y: SpElement,
    pub c_value: f64,
    pub k_value: f64,
    pub case_tag: WilkingCase,
}

/// Unit vector of the column span of `q` closest to a standard basis vector,
/// with its largest entry positive.
fn canonical_unit_in_span(q: &nalgebra::DMatrix<f64>) -> nalgebra::DVector<f64> {
    let n = q.nrows();
    let mut best: Option<(f64, nalgebra::DVector<f64>)> = None;
    for i in 0..n {
        let p = q * q.row(i).transpose();
        let norm = p.norm();
        if best.as_ref().is_none_or(|(b, _)| norm > b + 1e-12) {
            best = Some((norm, p));
        }
    }
    let (norm, mut p) = best.expect("nonempty");
    p /= norm;
    let k = p.iamax();
    if p[k] < 0.0 {
        p = -p;
    }
    p
}

/// Eigenvector of the smallest eigenvalue and a commuting partner.
pub fn wilking_pair(m: &DeformedMetric) -> Result<WilkingCertificate> {
    let op = m.operator();
    let (a_vals, a_vecs) = sym_eigen(&op.a);
    let (b_vals, b_vecs) = sym_eigen(&op.block());
    let (la, lb) = (a_vals[0], b_vals[0]);
    let scale = a_vals.amax().max(b_vals.amax());
    let tie = 1e-10 * scale;
    let lambda = la.min(lb);
    if !(lambda > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lambda });
    }
    let eigenspace = |vals: &nalgebra::DVector<f64>, vecs: &nalgebra::DMatrix<f64>| {
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= lambda + tie).collect();
        nalgebra::DMatrix::from_fn(vecs.nrows(), cols.len(), |r, c| vecs[(r, cols[c])])
    };
    let z3 = Vec3::zeros();
    let (x, z, case_tag) = if la <= lb + tie {
        let u = canonical_unit_in_span(&eigenspace(&a_vals, &a_vecs));
        let u = Vec3::new(u[0], u[1], u[2]);
        (SpElement::m(u, z3, z3), SpElement::m(z3, u, z3), WilkingCase::AEigenvector)
    } else {
        let e = canonical_unit_in_span(&eigenspace(&b_vals, &b_vecs));
        let (v, w) = (Vec3::new(e[0], e[1], e[2]), Vec3::new(e[3], e[4], e[5]));
        let x = SpElement::m(z3, v, w);
        let vw = nalgebra::Matrix3x2::from_columns(&[v, w]);
        if svd(&vw).rank(1e-8) < 2 {
            let partner = if v.norm() >= w.norm() { v } else { w };
            (x, SpElement::m(partner, z3, z3), WilkingCase::BlockDependent)
        } else {
            let s = orthogonalizing_angle(&x);
            let rotated = crate::algebra::ad_h(s, &x)?;
            let z = crate::algebra::ad_h(-s, &SpElement::m(z3, rotated.v, z3))?;
            (x, z, WilkingCase::BlockIndependent)
        }
    };
    let y = m.inverse_apply(&z)?;
    let plane = TangentPlane::new(x, y)?;
    let report = sectional_curvature(m, &plane);
    Ok(WilkingCertificate {
        metric: m.clone(),
        lambda,
        x,
        z,
        y,
        c_value: report.c_value,
        k_value: report.k_value,
        case_tag,
    })
}

/// Independent re-checks of a certificate, each a residual that should be
/// at most [`WILKING_TOL`] (relative to the natural scale of the quantity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilkingChecks {
    /// `|M X - lambda X|`.
    pub eigen_residual: f64,
    /// `|[X, Z]|`.
    pub commutator: f64,
    /// `|M Y - Z|`.
    pub partner_residual: f64,
    /// `lambda |W|^2 - <W, M W>`, should be `<= 0`.
    pub lower_bound_excess: f64,
    /// `<W, M^-1 W> - |W|^2 / lambda`, should be `<= 0`.
    pub upper_bound_excess: f64,
    /// `|[X,MY] + [Y,MX] + lambda [X,Y]|`.
    pub identity_residual: f64,
    /// `|[X,Y]_h|`.
    pub h_component: f64,
    /// The three-term expression for `C` minus the numerator.
    pub estimate_gap: f64,
    /// The three-term expression, should be `<= 0`.
    pub estimate: f64,
    /// `|W|^2 (1 + lambda)`, the scale the residuals are compared against.
    pub scale: f64,
}

impl WilkingChecks {
    pub fn passed(&self) -> bool {
        let tol = WILKING_TOL * self.scale.max(1.0);
        self.eigen_residual <= WILKING_TOL
            && self.commutator <= WILKING_TOL
            && self.partner_residual <= WILKING_TOL
            && self.lower_bound_excess <= tol
            && self.upper_bound_excess <= tol
            && self.identity_residual <= tol
            && self.h_component <= tol
            && self.estimate_gap.abs() <= tol
            && self.estimate <= tol
    }
}

pub fn check_wilking_inequalities(m: &DeformedMetric, cert: &WilkingCertificate) -> Result<WilkingChecks> {
    let (x, y, lambda) = (&cert.x, &cert.y, cert.lambda);
    let mx = m.apply(x)?;
    let my = m.apply(y)?;
    let w = bracket(x, y);
    let wm = project_m(&w);
    let ww = bi_inner(&wm, &wm);
    let w_mw = bi_inner(&wm, &m.apply(&wm)?);
    let w_minv_w = bi_inner(&wm, &m.inverse_apply(&wm)?);
    let identity = bracket(x, &my) + bracket(y, &mx) + w * lambda;
    let estimate = -0.75 * w_mw + 0.5 * lambda * ww + 0.25 * lambda * lambda * w_minv_w;
    let plane = TangentPlane::new(*x, *y)?;
    Ok(WilkingChecks {
        eigen_residual: (mx - *x * lambda).norm(),
        commutator: bracket(x, &cert.z).norm(),
        partner_residual: (my - cert.z).norm(),
        lower_bound_excess: lambda * ww - w_mw,
        upper_bound_excess: w_minv_w - ww / lambda,
        identity_residual: identity.norm(),
        h_component: w.lambda.abs(),
        estimate_gap: estimate - numerator(m, &plane),
        estimate,
        scale: ww * (1.0 + lambda) * (1.0 + lambda),
    })
}

pub fn verify_wilking_inequalities(m: &DeformedMetric, cert: &WilkingCertificate) -> bool {
    check_wilking_inequalities(m, cert).is_ok_and(|c| c.passed())
}

/// Random admissible metric `index` of a suite; every third one has its
/// `B` block enlarged to the size of `C`.
pub fn suite_metric(seed: u64, index: u64) -> DeformedMetric {
    let mut rng = stream_rng(seed, METRIC_STREAMS + index);
    if index % 3 == 2 {
        large_b_metric(&mut rng)
    } else {
        random_admissible_metric_with(&mut rng)
    }
}

/// Admissible metric whose antisymmetric block is as large as the
/// symmetric one.
pub fn large_b_metric<R: Rng + ?Sized>(rng: &mut R) -> DeformedMetric {
    loop {
        let base = random_admissible_metric_with(rng).operator();
        let mut b = nalgebra::Matrix3::<f64>::zeros();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let x = rng.gen_range(-1.0..1.0);
                b[(i, j)] = x;
                b[(j, i)] = -x;
            }
        }
        let b = b * (base.c.norm() / b.norm().max(1e-12));
        // shift C to restore positivity with the enlarged B
        let c = base.c + nalgebra::Matrix3::identity() * b.norm();
        let op = MetricDeformation { a: base.a, b, c };
        if op.min_eigenvalue() > 1e-3 {
            if let Ok(m) = DeformedMetric::from_operator(op) {
                return m;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilkingSuiteRow {
    pub index: u64,
    pub case_tag: WilkingCase,
    pub lambda: f64,
    pub k_value: f64,
    pub b_over_c: f64,
    pub checks_passed: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilkingSuiteReport {
    pub metrics: usize,
    pub tolerance: f64,
    pub max_k: f64,
    pub max_b_over_c: f64,
    pub cases: [usize; 3],
    pub failures: usize,
    pub first_failure: Option<(WilkingCertificate, WilkingChecks)>,
    pub rows: Vec<WilkingSuiteRow>,
    pub passed: bool,
}

pub fn wilking_suite(seed: u64, n_metrics: usize, tol: f64) -> Result<WilkingSuiteReport> {
    let results = par_map(n_metrics, |i| -> Result<_> {
        let m = suite_metric(seed, i);
        let cert = wilking_pair(&m)?;
        let checks = check_wilking_inequalities(&m, &cert)?;
        Ok((i, cert, checks))
    });
    let mut report = WilkingSuiteReport {
        metrics: n_metrics,
        tolerance: tol,
        max_k: f64::NEG_INFINITY,
        max_b_over_c: 0.0,
        cases: [0; 3],
        failures: 0,
        first_failure: None,
        rows: Vec::with_capacity(n_metrics),
        passed: true,
    };
    for r in results {
        let (index, cert, checks) = r?;
        let op = cert.metric.operator();
        let b_over_c = op.b.norm() / op.c.norm();
        let passed = checks.passed() && cert.k_value <= tol;
        report.max_k = report.max_k.max(cert.k_value);
        report.max_b_over_c = report.max_b_over_c.max(b_over_c);
        report.cases[cert.case_tag as usize] += 1;
        report.rows.push(WilkingSuiteRow {
            index,
            case_tag: cert.case_tag,
            lambda: cert.lambda,
            k_value: cert.k_value,
            b_over_c,
            checks_passed: checks.passed(),
            passed,
        });
        if !passed {
            report.failures += 1;
            if report.first_failure.is_none() {
                report.first_failure = Some((cert, checks));
            }
        }
    }
    report.passed = report.failures == 0;
    Ok(report)
}

// ---------------------------------------------------------------- baseline

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub samples: usize,
    pub commuting: usize,
    pub min_k: f64,
    pub max_k_commuting: f64,
    pub min_k_non_commuting: f64,
    pub passed: bool,
}

/// Normal metric: curvature is nonnegative, and vanishes exactly on the
/// commuting planes among a mix of Cartan and random planes.
pub fn normal_metric_baseline(seed: u64, n_samples: usize, tol: f64) -> BaselineReport {
    let metric = DeformedMetric::identity();
    let plan = SamplingPlan::mixed();
    let rows = par_map(n_samples, |i| {
        let plane = if i % 2 == 0 {
            plan.sample(seed, i / 2).plane
        } else {
            let mut rng = stream_rng(seed, BASELINE_STREAMS + i);
            loop {
                if let Ok(p) = TangentPlane::new(normal_m(&mut rng), normal_m(&mut rng)) {
                    break p;
                }
            }
        };
        let q = plane.orthonormalized();
        (q.is_commuting(), sectional_curvature(&metric, &q).k_value)
    });
    let commuting = rows.iter().filter(|r| r.0).count();
    let min_k = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max_k_commuting = rows.iter().filter(|r| r.0).map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let min_k_non_commuting = rows.iter().filter(|r| !r.0).map(|r| r.1).fold(f64::INFINITY, f64::min);
    let passed = min_k >= -tol && max_k_commuting <= tol && min_k_non_commuting > tol;
    BaselineReport {
        samples: n_samples,
        commuting,
        min_k,
        max_k_commuting,
        min_k_non_commuting,
        passed,
    }
}

/// Whether any of the planes lies on the degenerate orbit.
pub fn touches_special_orbit(planes: &[TangentPlane]) -> Result<bool> {
    for p in planes {
        if in_special_orbit(p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i - 1] = 1.0;
        v
    }

    #[test]
    fn sign_of_the_cubic() {
        let (sigma, c3) = working_sign();
        assert!((c3.abs() - 1.0).abs() < 1e-12);
        assert_eq!(sigma, c3.signum());
    }

    #[test]
    fn reference_torus_is_degenerate_cubic() {
        let v = lemma1_verdict(0, &reference_torus(), DEFAULT_TOL).unwrap();
        assert_eq!(v.classification, Lemma1Class::DegenerateCubic);
        assert!(v.c2.abs() < 1e-12);
        assert!((v.c3.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_two_checkpoint_is_generic() {
        let z = Vec3::zeros();
        let p = TangentPlane::new(SpElement::m(e(3), z, e(1)), SpElement::m(z, e(3), z)).unwrap();
        let v = lemma1_verdict(0, &p, DEFAULT_TOL).unwrap();
        assert_eq!(v.classification, Lemma1Class::GenericPositive);
        // |X|^2 = 2, so the orthonormal coefficient is a quarter of 7/2
        assert!((v.c2 - 7.0 / 8.0).abs() < 1e-12, "{}", v.c2);
    }

    #[test]
    fn identity_metric_certificate() {
        let m = DeformedMetric::identity();
        let c = wilking_pair(&m).unwrap();
        assert_eq!(c.case_tag, WilkingCase::AEigenvector);
        assert!((c.x - SpElement::m(e(1), Vec3::zeros(), Vec3::zeros())).max_abs() < 1e-12);
        assert!(c.k_value.abs() < 1e-15);
        let checks = check_wilking_inequalities(&m, &c).unwrap();
        assert!(checks.passed());
        assert!(checks.lower_bound_excess.abs() < 1e-15 && checks.upper_bound_excess.abs() < 1e-15);
    }

    #[test]
    fn small_a_eigenvalue_branch() {
        let op = MetricDeformation::new(Matrix3::identity() * 0.5, Matrix3::zeros(), Matrix3::identity()).unwrap();
        let m = DeformedMetric::from_operator(op).unwrap();
        let c = wilking_pair(&m).unwrap();
        assert_eq!(c.case_tag, WilkingCase::AEigenvector);
        assert!((c.lambda - 0.5).abs() < 1e-14);
        let z = Vec3::zeros();
        assert!((c.x - SpElement::m(e(1), z, z)).max_abs() < 1e-12);
        assert!((c.z - SpElement::m(z, e(1), z)).max_abs() < 1e-12);
        assert!(c.k_value <= 1e-12);
    }

    #[test]
    fn block_branches_occur() {
        let mut seen = [false; 3];
        for i in 0..300 {
            let m = suite_metric(5, i);
            let c = wilking_pair(&m).unwrap();
            seen[c.case_tag as usize] = true;
            assert!(c.k_value <= 1e-10, "{i}: {}", c.k_value);
            assert!(verify_wilking_inequalities(&m, &c), "{i}");
        }
        assert!(seen[0] && seen[2], "{seen:?}");
    }

    #[test]
    fn dependent_block_branch() {
        // C has its smallest eigenvalue along e2 and B = 0: X = (0,0,e2,0)
        let c = Matrix3::from_diagonal(&Vec3::new(2.0, 0.25, 3.0));
        let op = MetricDeformation::new(Matrix3::identity(), Matrix3::zeros(), c).unwrap();
        let m = DeformedMetric::from_operator(op).unwrap();
        let cert = wilking_pair(&m).unwrap();
        assert_eq!(cert.case_tag, WilkingCase::BlockDependent);
        assert!(cert.k_value <= 1e-12);
        assert!(verify_wilking_inequalities(&m, &cert));
    }

    #[test]
    fn perturbed_partner_breaks_identity() {
        let m = suite_metric(1, 0);
        let mut c = wilking_pair(&m).unwrap();
        c.y += SpElement::m(Vec3::new(1e-3, 0.0, 0.0), Vec3::zeros(), Vec3::new(0.0, 2e-3, 0.0));
        let checks = check_wilking_inequalities(&m, &c).unwrap();
        assert!(checks.identity_residual > 1e-6);
        assert!(!checks.passed());
    }

    #[test]
    fn oracle_catches_corruption() {
        assert!(oracle_suite(1, 200, 1e-12).passed);
        fn flipped(x: &SpElement, y: &SpElement) -> SpElement {
            let mut b = bracket(x, y);
            b.lambda = -b.lambda;
            b
        }
        let r = oracle_suite_with(1, 200, 1e-12, flipped);
        assert!(!r.passed);
        assert!(r.worst.is_some());
    }

    #[test]
    fn small_runs_are_deterministic() {
        assert_eq!(verify_lemma1(3, 20), verify_lemma1(3, 20));
        let a = verify_theorem1_at(3, 50, &[-0.01], &SamplingPlan::mixed(), true).unwrap();
        let b = verify_theorem1_at(3, 50, &[-0.01], &SamplingPlan::mixed(), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn summary_quantiles() {
        let s = Summary::of((0..101).map(|i| i as f64)).unwrap();
        assert_eq!((s.min, s.p05, s.median, s.p95, s.max), (0.0, 5.0, 50.0, 95.0, 100.0));
        assert!(Summary::of(std::iter::empty()).is_none());
    }
}
