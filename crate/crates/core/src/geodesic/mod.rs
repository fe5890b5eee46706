//! Geodesic-vector criteria.
//!
//! A nonzero `Y` in g is a geodesic vector when `exp(tY) o` is a geodesic.
//! Three algebraic tests are provided, all tested against an m basis
//! `z_1, ..., z_k`:
//!
//! * Riemannian: `<[Y, z]_m, Y_m> = 0`.
//! * General Finsler: `g_{Y_m}([Y, z]_m, Y_m) = 0` with the fundamental
//!   tensor from [`MetricSpec::fundamental_tensor`].
//! * Kropina: `<[Y, z]_m, 2 Y_m / F(Y_m) - X> = 0`, which differs from the
//!   Finsler form by the positive factor `F^3 / <Y_m, Y_m>`.

mod search;

pub use search::{find_geodesic_vectors, Axis, AxisSet, SearchConfig};

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::ReductiveSpace;
use crate::linalg;
use crate::metric::{InnerProduct, MetricFamily, MetricSpec};

/// Default verdict tolerance on the residual of the normalized candidate.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance of the bracket-orthogonality tests (Douglas type, transfer,
/// natural reductivity).
pub const BRACKET_TOL: f64 = 1e-10;
/// Tolerance used when a Riemannian geodesic is re-checked against the
/// finite-difference Finsler criterion.
pub const TRANSFER_TOL: f64 = 1e-6;

fn check_len(space: &ReductiveSpace, y: &DVector<f64>) -> Result<()> {
    if y.len() != space.dim_g() {
        return Err(Error::DimensionMismatch { expected: space.dim_g(), got: y.len() });
    }
    if y.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

fn nonzero_projection(space: &ReductiveSpace, y: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(space, y)?;
    let ym = space.m_coords(y);
    if ym.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroProjection);
    }
    Ok(ym)
}

/// `<[Y, z_j]_m, Y_m>` for each m-basis vector `z_j`.
pub fn riemannian_residual(space: &ReductiveSpace, ip: &InnerProduct, y: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(space, y)?;
    let ym = space.m_coords(y);
    Ok(DVector::from_iterator(
        space.dim_m(),
        space.m_basis().iter().map(|z| ip.inner(&space.bracket_m(y, z), &ym)),
    ))
}

/// `<[Y, z_j]_m, 2 Y_m / F(Y_m) - X>` for a Kropina metric.
pub fn kropina_residual(space: &ReductiveSpace, metric: &MetricSpec, y: &DVector<f64>) -> Result<DVector<f64>> {
    if *metric.family() != MetricFamily::Kropina {
        return Err(Error::InvalidInput("kropina_residual needs a Kropina metric".into()));
    }
    let ym = nonzero_projection(space, y)?;
    let f = metric.eval(&ym)?;
    let target = &ym * (2.0 / f) - metric.drift();
    let ip = metric.inner();
    Ok(DVector::from_iterator(
        space.dim_m(),
        space.m_basis().iter().map(|z| ip.inner(&space.bracket_m(y, z), &target)),
    ))
}

/// `g_{Y_m}([Y, z_j]_m, Y_m)` with the finite-difference fundamental tensor.
pub fn finsler_residual(space: &ReductiveSpace, metric: &MetricSpec, y: &DVector<f64>) -> Result<DVector<f64>> {
    let ym = nonzero_projection(space, y)?;
    let g = metric.fundamental_tensor(&ym)?;
    let gy = &g * &ym;
    Ok(DVector::from_iterator(
        space.dim_m(),
        space.m_basis().iter().map(|z| space.bracket_m(y, z).dot(&gy)),
    ))
}

/// `F(Y_m) dF_{Y_m}([Y, z_j]_m)`: the Finsler criterion evaluated from the
/// exact first derivative of F instead of the Hessian.
pub fn euler_residual(space: &ReductiveSpace, metric: &MetricSpec, y: &DVector<f64>) -> Result<DVector<f64>> {
    let ym = nonzero_projection(space, y)?;
    space
        .m_basis()
        .iter()
        .map(|z| metric.euler_form(&ym, &space.bracket_m(y, z)))
        .collect::<Result<Vec<f64>>>()
        .map(DVector::from_vec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Geodesic,
    NotGeodesic,
    OutsideDomain,
}

/// Which criterion produced the residuals in a [`GeodesicReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Riemannian,
    Kropina,
    FundamentalTensor,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicReport {
    /// The candidate, rescaled so that `|Y_m| = 1`.
    pub candidate: Vec<f64>,
    pub family: String,
    pub criterion: Criterion,
    pub residuals: Vec<f64>,
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub verdict: Verdict,
}

/// Evaluates the criterion matching the metric family at `Y / |Y_m|`.
///
/// Riemannian metrics use the Riemannian test, Kropina metrics the closed
/// Kropina form, everything else the fundamental tensor.
pub fn check(space: &ReductiveSpace, metric: &MetricSpec, y: &DVector<f64>, tol: f64) -> Result<GeodesicReport> {
    let ym = nonzero_projection(space, y)?;
    let yhat = y / metric.inner().norm(&ym);
    let criterion = match metric.family() {
        MetricFamily::Riemannian => Criterion::Riemannian,
        MetricFamily::Kropina => Criterion::Kropina,
        _ => Criterion::FundamentalTensor,
    };
    let residual = match criterion {
        Criterion::Riemannian => riemannian_residual(space, metric.inner(), &yhat),
        Criterion::Kropina => kropina_residual(space, metric, &yhat),
        Criterion::FundamentalTensor => finsler_residual(space, metric, &yhat),
    };
    let family = metric.family().name().to_string();
    let candidate = yhat.iter().copied().collect();
    match residual {
        Ok(r) => {
            let max = linalg::max_abs(&r);
            Ok(GeodesicReport {
                candidate,
                family,
                criterion,
                residuals: r.iter().copied().collect(),
                max_residual: Some(max),
                tol,
                verdict: if max <= tol { Verdict::Geodesic } else { Verdict::NotGeodesic },
            })
        }
        Err(Error::OutsideDomain(_)) => Ok(GeodesicReport {
            candidate,
            family,
            criterion,
            residuals: Vec::new(),
            max_residual: None,
            tol,
            verdict: Verdict::OutsideDomain,
        }),
        Err(e) => Err(e),
    }
}

/// Douglas type for Randers and Kropina metrics: X is orthogonal to
/// `[m, m]_m`. `x` is in m-coordinates.
pub fn douglas_check(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> bool {
    douglas_violation(space, ip, x) <= BRACKET_TOL
}

pub fn douglas_violation(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> f64 {
    let zs = space.m_basis();
    let mut worst = 0.0_f64;
    for (i, a) in zs.iter().enumerate() {
        for b in &zs[i + 1..] {
            worst = worst.max(ip.inner(x, &space.bracket_m(a, b)).abs());
        }
    }
    worst
}

/// Natural reductivity of `(g = h + m, <,>)`:
/// `<X, [Z, Y]_m> + <[Z, X]_m, Y> = 0` on all m-basis triples.
pub fn naturally_reductive_check(space: &ReductiveSpace, ip: &InnerProduct) -> bool {
    let zs = space.m_basis();
    let d = zs.len();
    let e = |i: usize| {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    };
    for z in zs {
        for (i, x) in zs.iter().enumerate() {
            for (j, y) in zs.iter().enumerate() {
                let lhs = ip.inner(&e(i), &space.bracket_m(z, y)) + ip.inner(&space.bracket_m(z, x), &e(j));
                if lhs.abs() > BRACKET_TOL {
                    return false;
                }
            }
        }
    }
    true
}

/// Pointwise check of the transfer hypotheses at a candidate `Y`:
/// `<X, [Y, z]_m> = 0` for all z in m, and `phi''(r_m) <= 0` with
/// `r_m = <X, Y_m> / |Y_m|`.
#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub applies: bool,
    pub bracket_condition: bool,
    pub bracket_violation: f64,
    pub phi_condition: bool,
    pub r_m: f64,
    pub phi_second_at_r: Option<f64>,
    pub riemannian_geodesic: bool,
    /// Present when the hypotheses hold and Y is a Riemannian geodesic:
    /// the largest finite-difference Finsler residual at `Y / |Y_m|`.
    pub finsler_max_residual: Option<f64>,
    pub finsler_verified: Option<bool>,
}

pub fn transfer_check(space: &ReductiveSpace, metric: &MetricSpec, y: &DVector<f64>) -> Result<TransferReport> {
    let ym = nonzero_projection(space, y)?;
    let ip = metric.inner();
    let norm = ip.norm(&ym);
    let yhat = y / norm;
    let ymhat = &ym / norm;
    let x = metric.drift();

    let bracket_violation = space
        .m_basis()
        .iter()
        .map(|z| ip.inner(x, &space.bracket_m(&yhat, z)).abs())
        .fold(0.0, f64::max);
    let bracket_condition = bracket_violation <= BRACKET_TOL;

    let r_m = ip.inner(x, &ymhat);
    let phi_second_at_r = metric.phi_second_derivative().eval(r_m).ok();
    let phi_condition = matches!(phi_second_at_r, Some(v) if v <= 0.0);
    let applies = bracket_condition && phi_condition;

    let riem = riemannian_residual(space, ip, &yhat)?;
    let riemannian_geodesic = linalg::max_abs(&riem) <= DEFAULT_TOL;

    let (finsler_max_residual, finsler_verified) = if applies && riemannian_geodesic {
        let r = finsler_residual(space, metric, &yhat)?;
        let max = linalg::max_abs(&r);
        (Some(max), Some(max <= TRANSFER_TOL))
    } else {
        (None, None)
    };
    Ok(TransferReport {
        applies,
        bracket_condition,
        bracket_violation,
        phi_condition,
        r_m,
        phi_second_at_r,
        riemannian_geodesic,
        finsler_max_residual,
        finsler_verified,
    })
}
