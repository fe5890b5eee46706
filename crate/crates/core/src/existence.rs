//! Constructive existence of a geodesic vector for homogeneous Kropina
//! metrics, and orthogonal geodesic frames on semisimple algebras.
//!
//! The construction works in an `<,>`-orthonormal eigenbasis `f_i` of the
//! operator `theta` defined by `K(u, v) = <theta u, v>` on m. With `V_0` the
//! kernel of theta and `X = X_0 + sum x_i f_i`, a vector
//! `Y = X_0 + sum y_i f_i` is geodesic as soon as
//!
//! ```text
//! F(Y) = 2,   (y_i - x_i) / lambda_i = t y_i   for every lambda_i != 0,
//! ```
//!
//! because then `2Y/F - X = t theta(Y)` and `K(Y, [Y, z]_m) = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{self, find_geodesic_vectors, SearchConfig, TransferReport, Verdict};
use crate::lie::ReductiveSpace;
use crate::linalg;
use crate::metric::{InnerProduct, MetricFamily, MetricSpec};

/// Relative threshold separating zero from nonzero theta eigenvalues.
pub const EIGEN_ZERO_TOL: f64 = 1e-8;
/// Relative distance to a pole at which the scan stops.
pub const POLE_MARGIN: f64 = 1e-6;
/// Grid points of the scan toward each pole.
pub const SCAN_POINTS: usize = 240;
pub const BISECTION_MAX: usize = 200;
pub const BISECTION_TOL: f64 = 1e-12;
/// Certificate acceptance threshold on the Kropina residual.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Threshold on `|K(h, m)|` relative to the Killing scale.
pub const KILLING_ORTHOGONALITY_TOL: f64 = 1e-9;
/// Threshold on `|<f_i, f_j>|` for the orthogonal frame.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Eigen-decomposition of theta on m.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaSplit {
    /// Nonzero eigenvalues by decreasing magnitude, then the zero block.
    pub eigenvalues: Vec<f64>,
    /// `<,>`-orthonormal eigenvectors in m-coordinates, same order.
    #[serde(skip)]
    pub vectors: DMatrix<f64>,
    /// Number of nonzero eigenvalues (`r`); the rest span `V_0`.
    pub nonzero: usize,
    pub zero_threshold: f64,
}

impl ThetaSplit {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn zero_dim(&self) -> usize {
        self.dim() - self.nonzero
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).clone_owned()
    }

    /// Coordinates of an m-vector in the eigenbasis.
    pub fn coords(&self, ip: &InnerProduct, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), (0..self.dim()).map(|i| ip.inner(&self.vector(i), x)))
    }

    /// The m-vector with the given eigen-coordinates.
    pub fn from_coords(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.vectors * c
    }
}

/// Diagonalizes theta = G^{-1} K|_m through the symmetric matrix
/// `L^{-1} K L^{-T}`, where `G = L L^T`.
pub fn theta_eigensplit(space: &ReductiveSpace, ip: &InnerProduct) -> Result<ThetaSplit> {
    let d = space.dim_m();
    if ip.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: ip.dim() });
    }
    let kf = space.algebra().killing_form();
    let km = space.killing_on_m(&kf);
    let l = ip.cholesky();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
    let sym = &linv * km * linv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = linalg::jacobi_eigen(&sym);

    let scale = space.algebra().structure_scale();
    let max_abs = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let zero_threshold = EIGEN_ZERO_TOL * max_abs.max(scale * scale);

    let mut order: Vec<usize> = (0..d).collect();
    let is_zero = |v: f64| v.abs() <= zero_threshold;
    order.sort_by(|&a, &b| {
        let (va, vb) = (eig.values[a], eig.values[b]);
        match (is_zero(va), is_zero(vb)) {
            (false, true) => std::cmp::Ordering::Less,
            (true, false) => std::cmp::Ordering::Greater,
            _ => vb.abs().total_cmp(&va.abs()).then(va.total_cmp(&vb)),
        }
    });
    let nonzero = order.iter().filter(|&&i| !is_zero(eig.values[i])).count();
    let mut vectors = DMatrix::zeros(d, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for (col, &i) in order.iter().enumerate() {
        let lambda = if is_zero(eig.values[i]) { 0.0 } else { eig.values[i] };
        eigenvalues.push(lambda);
        let mut f = ip.from_orthonormal(&eig.vectors.column(i).clone_owned());
        linalg::canonical_sign(&mut f);
        vectors.set_column(col, &f);
    }
    Ok(ThetaSplit { eigenvalues, vectors, nonzero, zero_threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExistenceCase {
    RadEqualsM,
    #[serde(rename = "EigenSplit_XequalsX0")]
    EigenSplitXEqualsX0,
    #[serde(rename = "EigenSplit_General")]
    EigenSplitGeneral,
}

/// How the certified vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionPath {
    /// `W = (|X| Y + X) / 2` with `Y` orthogonal to `[g, g]_m`.
    DerivedComplement,
    /// `[g, g]_m` is all of m; a Kropina sphere search supplied the vector.
    SphereSearch,
    /// `Y = X_0 + |X_0| f_1`.
    Explicit,
    /// Bisection of `M(t) = F(Y(t)) - 2`.
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    /// `F(Y(t)) - 2`, NaN where undefined.
    pub m: f64,
    /// Set at poles `1 - t lambda_i = 0` and outside the Kropina domain.
    pub domain_flag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BisectionStep {
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_mid: f64,
    pub m_mid: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExistenceCertificate {
    pub case: ExistenceCase,
    pub path: ConstructionPath,
    pub eigen: ThetaSplit,
    /// Eigenvectors in m-coordinates.
    pub eigenvectors: Vec<Vec<f64>>,
    /// X in eigen-coordinates.
    pub x_components: Vec<f64>,
    pub t0: Option<f64>,
    /// `[t_lo, t_hi]` with `M(t_lo) < 0 < M(t_hi)` (as values, not as order).
    pub bracket: Option<[f64; 2]>,
    pub bracket_values: Option<[f64; 2]>,
    pub scan_trace: Vec<CurvePoint>,
    pub bisection_trace: Vec<BisectionStep>,
    /// Y in eigen-coordinates.
    pub y_components: Vec<f64>,
    /// Y in m-coordinates.
    pub y_m: Vec<f64>,
    /// Y in g-coordinates.
    pub y: Vec<f64>,
    pub residual: f64,
    pub f_value: f64,
}

fn check_inputs(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> Result<()> {
    let d = space.dim_m();
    if ip.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: ip.dim() });
    }
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    if !(ip.norm(x) > crate::metric::DRIFT_EPS) {
        return Err(Error::InvalidInput("X must be nonzero".into()));
    }
    let violation = space.invariance_violation(&space.from_m_coords(x));
    if violation > crate::lie::JACOBI_TOL {
        return Err(Error::InvariantVectorViolation { violation });
    }
    if !space.h_basis().is_empty() {
        let kf = space.algebra().killing_form();
        let v = space.killing_orthogonality_violation(&kf);
        let scale = kf.matrix.amax().max(1.0);
        if v > KILLING_ORTHOGONALITY_TOL * scale {
            return Err(Error::InvalidInput(format!("m is not Killing-orthogonal to h (violation {v:e})")));
        }
    }
    Ok(())
}

/// The eigen-coordinates of `Y(t)`: `y_i = x_i / (1 - t lambda_i)` for the
/// nonzero block, `x_i` on `V_0`. `None` at a pole.
fn curve_coords(split: &ThetaSplit, xc: &DVector<f64>, t: f64) -> Option<DVector<f64>> {
    let mut y = xc.clone();
    for i in 0..split.nonzero {
        if xc[i] != 0.0 {
            let den = 1.0 - t * split.eigenvalues[i];
            if den == 0.0 {
                return None;
            }
            y[i] = xc[i] / den;
        }
    }
    Some(y)
}

/// `M(t)` in eigen-coordinates, where `<,>` is the Euclidean dot product.
fn curve_value(split: &ThetaSplit, xc: &DVector<f64>, t: f64) -> Option<f64> {
    let y = curve_coords(split, xc, t)?;
    let b = xc.dot(&y);
    (b > 0.0).then(|| y.dot(&y) / b - 2.0)
}

/// Samples `M(t)` for plotting.
pub fn m_curve(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>, ts: &[f64]) -> Result<Vec<CurvePoint>> {
    check_inputs(space, ip, x)?;
    let split = theta_eigensplit(space, ip)?;
    let xc = split.coords(ip, x);
    let xnorm = xc.norm();
    Ok(ts
        .iter()
        .map(|&t| {
            let pole = (0..split.nonzero)
                .any(|i| xc[i].abs() > 1e-14 * xnorm && (1.0 - t * split.eigenvalues[i]).abs() <= 1e-12);
            match (pole, curve_value(&split, &xc, t)) {
                (false, Some(m)) if m.is_finite() => CurvePoint { t, m, domain_flag: false },
                _ => CurvePoint { t, m: f64::NAN, domain_flag: true },
            }
        })
        .collect())
}

/// The nearest poles of `Y(t)` on each side of `t = 0`, among indices with
/// `x_i != 0`. `None` when there is no pole on that side.
pub fn pole_free_interval(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> Result<(Option<f64>, Option<f64>)> {
    check_inputs(space, ip, x)?;
    let split = theta_eigensplit(space, ip)?;
    let xc = split.coords(ip, x);
    let xnorm = xc.norm();
    let poles: Vec<f64> = (0..split.nonzero)
        .filter(|&i| xc[i].abs() > 1e-14 * xnorm)
        .map(|i| 1.0 / split.eigenvalues[i])
        .collect();
    let below = poles.iter().copied().filter(|p| *p < 0.0).max_by(f64::total_cmp);
    let above = poles.iter().copied().filter(|p| *p > 0.0).min_by(f64::total_cmp);
    Ok((below, above))
}

/// Builds and verifies a geodesic vector for the Kropina metric with drift
/// `x` (m-coordinates).
pub fn kropina_existence(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> Result<ExistenceCertificate> {
    check_inputs(space, ip, x)?;
    let metric = MetricSpec::kropina(ip.clone(), x.clone())?;
    let split = theta_eigensplit(space, ip)?;
    let xc = split.coords(ip, x);
    let xnorm = ip.norm(x);
    let eigenvectors = (0..split.dim()).map(|i| split.vector(i).iter().copied().collect()).collect();

    let mut cert = ExistenceCertificate {
        case: ExistenceCase::RadEqualsM,
        path: ConstructionPath::DerivedComplement,
        eigen: split.clone(),
        eigenvectors,
        x_components: xc.iter().copied().collect(),
        t0: None,
        bracket: None,
        bracket_values: None,
        scan_trace: Vec::new(),
        bisection_trace: Vec::new(),
        y_components: Vec::new(),
        y_m: Vec::new(),
        y: Vec::new(),
        residual: f64::NAN,
        f_value: f64::NAN,
    };

    let ym = if split.nonzero == 0 {
        match derived_complement_unit(space, ip, x) {
            Some(yperp) => (yperp * xnorm + x) * 0.5,
            None => {
                cert.path = ConstructionPath::SphereSearch;
                let set = find_geodesic_vectors(space, &metric, &SearchConfig { samples: 2000, ..SearchConfig::default() })?;
                let axis = set.axes.first().ok_or_else(|| Error::DomainExhausted {
                    trace: "sphere search found no Kropina geodesic vector".into(),
                })?;
                DVector::from_column_slice(&axis.m_coords)
            }
        }
    } else {
        let x0_norm = xc.rows(split.nonzero, split.zero_dim()).norm();
        let x_v = xc.rows(0, split.nonzero).norm();
        if x_v <= EIGEN_ZERO_TOL * xnorm {
            cert.case = ExistenceCase::EigenSplitXEqualsX0;
            cert.path = ConstructionPath::Explicit;
            let mut yc = DVector::zeros(split.dim());
            yc.rows_mut(split.nonzero, split.zero_dim()).copy_from(&xc.rows(split.nonzero, split.zero_dim()));
            yc[0] = x0_norm;
            cert.t0 = Some(1.0 / split.eigenvalues[0]);
            cert.y_components = yc.iter().copied().collect();
            split.from_coords(&yc)
        } else {
            cert.case = ExistenceCase::EigenSplitGeneral;
            cert.path = ConstructionPath::Bisection;
            let sol = solve_curve(&split, &xc)?;
            cert.t0 = Some(sol.t0);
            cert.bracket = Some(sol.bracket);
            cert.bracket_values = Some(sol.bracket_values);
            cert.scan_trace = sol.scan_trace;
            cert.bisection_trace = sol.bisection_trace;
            let yc = curve_coords(&split, &xc, sol.t0).expect("root lies inside the pole-free interval");
            cert.y_components = yc.iter().copied().collect();
            split.from_coords(&yc)
        }
    };

    if cert.y_components.is_empty() {
        cert.y_components = split.coords(ip, &ym).iter().copied().collect();
    }
    let yg = space.from_m_coords(&ym);
    let residual = linalg::max_abs(&geodesic::kropina_residual(space, &metric, &yg)?);
    cert.f_value = metric.eval(&ym)?;
    cert.residual = residual;
    cert.y_m = ym.iter().copied().collect();
    cert.y = yg.iter().copied().collect();
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::ResidualTooLarge { residual });
    }
    Ok(cert)
}

/// A unit vector orthogonal to `[g, g]_m`, preferring one orthogonal to X
/// and otherwise with `<X, Y> >= 0`. `None` when `[g, g]_m = m`.
fn derived_complement_unit(space: &ReductiveSpace, ip: &InnerProduct, x: &DVector<f64>) -> Option<DVector<f64>> {
    let d = space.dim_m();
    let derived = space.algebra().derived_algebra();
    let projected: Vec<DVector<f64>> =
        linalg::matrix_columns(&derived).iter().map(|v| space.m_coords(v)).collect();
    let tol = crate::lie::RANK_TOL * space.algebra().structure_scale().max(1.0);
    let span = linalg::span_basis(d, &projected, tol);
    // c with c^T G v = 0 for every v in the span
    let perp = if span.ncols() == 0 {
        DMatrix::identity(d, d)
    } else {
        linalg::null_space(&(span.transpose() * ip.matrix()), tol)
    };
    if perp.ncols() == 0 {
        return None;
    }
    let basis = linalg::matrix_columns(&perp);
    // part of the complement orthogonal to X
    let gx = ip.matrix() * x;
    let coeffs = DMatrix::from_iterator(1, basis.len(), basis.iter().map(|b| b.dot(&gx)));
    let inner = linalg::null_space(&coeffs, 1e-12 * coeffs.amax().max(f64::MIN_POSITIVE));
    let mut y = if inner.ncols() > 0 {
        let c = inner.column(0).clone_owned();
        basis.iter().zip(c.iter()).fold(DVector::zeros(d), |acc, (b, &ci)| acc + b * ci)
    } else {
        basis[0].clone()
    };
    y /= ip.norm(&y);
    if ip.inner(x, &y) < 0.0 {
        y = -y;
    }
    Some(y)
}

struct CurveSolution {
    t0: f64,
    bracket: [f64; 2],
    bracket_values: [f64; 2],
    scan_trace: Vec<CurvePoint>,
    bisection_trace: Vec<BisectionStep>,
}

/// Scans from 0 toward the nearest pole on each side (nearest side first)
/// for a sign change of M, then bisects.
fn solve_curve(split: &ThetaSplit, xc: &DVector<f64>) -> Result<CurveSolution> {
    let xnorm = xc.norm();
    let active: Vec<usize> = (0..split.nonzero).filter(|&i| xc[i].abs() > 1e-14 * xnorm).collect();
    let poles = |positive: bool| {
        active
            .iter()
            .map(|&i| 1.0 / split.eigenvalues[i])
            .filter(|p| (*p > 0.0) == positive)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
    };
    let mut ends: Vec<f64> = [poles(true), poles(false)].into_iter().flatten().collect();
    ends.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    let m0 = curve_value(split, xc, 0.0).expect("t = 0 is in the domain");
    let mut trace = vec![CurvePoint { t: 0.0, m: m0, domain_flag: false }];
    for pole in ends {
        let mut prev = (0.0, m0);
        for k in 1..=SCAN_POINTS {
            // distances to the pole spaced geometrically down to POLE_MARGIN
            let u = POLE_MARGIN.powf(k as f64 / SCAN_POINTS as f64);
            let t = pole * (1.0 - u);
            let Some(m) = curve_value(split, xc, t) else {
                trace.push(CurvePoint { t, m: f64::NAN, domain_flag: true });
                break;
            };
            trace.push(CurvePoint { t, m, domain_flag: false });
            if m > 0.0 {
                let (t_lo, m_lo) = prev;
                let (t0, steps) = bisect(split, xc, t_lo, t)?;
                return Ok(CurveSolution {
                    t0,
                    bracket: [t_lo, t],
                    bracket_values: [m_lo, m],
                    scan_trace: trace,
                    bisection_trace: steps,
                });
            }
            prev = (t, m);
        }
    }
    let summary: Vec<String> = trace.iter().map(|p| format!("({:e}, {:e})", p.t, p.m)).collect();
    Err(Error::DomainExhausted { trace: summary.join(" ") })
}

/// Bisection on `[lo, hi]` with `M(lo) < 0 < M(hi)`.
fn bisect(split: &ThetaSplit, xc: &DVector<f64>, lo: f64, hi: f64) -> Result<(f64, Vec<BisectionStep>)> {
    let (mut lo, mut hi) = (lo, hi);
    let mut steps = Vec::new();
    let mut best = (lo, f64::INFINITY);
    for _ in 0..BISECTION_MAX {
        let mid = 0.5 * (lo + hi);
        let m = curve_value(split, xc, mid)
            .ok_or_else(|| Error::NumericalFailure(format!("M undefined at t = {mid:e} inside the bracket")))?;
        steps.push(BisectionStep { t_lo: lo, t_hi: hi, t_mid: mid, m_mid: m });
        if m.abs() < best.1 {
            best = (mid, m.abs());
        }
        if m.abs() <= BISECTION_TOL || mid == lo || mid == hi {
            break;
        }
        if m < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((best.0, steps))
}

/// One theta eigenvector tested as a geodesic vector.
#[derive(Debug, Clone, Serialize)]
pub struct EigenAxis {
    pub index: usize,
    pub eigenvalue: f64,
    pub m_coords: Vec<f64>,
    pub riemannian_residual: f64,
    pub transfer: Option<TransferReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalGeodesics {
    pub family: String,
    /// `<X, [u, v]_m> = 0` for all u, v in m.
    pub global_hypotheses: bool,
    pub note: Option<String>,
    pub axes: Vec<EigenAxis>,
    pub passing: usize,
    /// Largest `|<f_i, f_j>|` over distinct passing axes.
    pub max_pairwise_inner: f64,
    pub mutually_orthogonal: bool,
}

/// Tests each theta eigenvector of a semisimple algebra as a geodesic
/// vector of `metric`. Non-Riemannian families are tested through the
/// pointwise transfer hypotheses at each eigenvector.
pub fn semisimple_orthogonal_geodesics(space: &ReductiveSpace, metric: &MetricSpec) -> Result<OrthogonalGeodesics> {
    if !space.algebra().is_semisimple() {
        return Err(Error::NotSemisimple);
    }
    let ip = metric.inner();
    let split = theta_eigensplit(space, ip)?;
    let riemannian = *metric.family() == MetricFamily::Riemannian;
    let global_hypotheses = riemannian || geodesic::douglas_check(space, ip, metric.drift());
    let note = (!global_hypotheses).then(|| "hypotheses unsatisfiable for X != 0".to_string());

    let mut axes = Vec::with_capacity(split.dim());
    for i in 0..split.dim() {
        let f = split.vector(i);
        let fg = space.from_m_coords(&f);
        let riem = linalg::max_abs(&geodesic::riemannian_residual(space, ip, &fg)?);
        let (transfer, passed) = if riemannian {
            let report = geodesic::check(space, metric, &fg, geodesic::DEFAULT_TOL)?;
            (None, report.verdict == Verdict::Geodesic)
        } else {
            let t = geodesic::transfer_check(space, metric, &fg)?;
            let ok = t.applies && t.riemannian_geodesic && t.finsler_verified == Some(true);
            (Some(t), ok)
        };
        axes.push(EigenAxis {
            index: i,
            eigenvalue: split.eigenvalues[i],
            m_coords: f.iter().copied().collect(),
            riemannian_residual: riem,
            transfer,
            passed,
        });
    }
    let passing: Vec<&EigenAxis> = axes.iter().filter(|a| a.passed).collect();
    let mut worst = 0.0_f64;
    for (k, a) in passing.iter().enumerate() {
        for b in &passing[k + 1..] {
            let u = DVector::from_column_slice(&a.m_coords);
            let v = DVector::from_column_slice(&b.m_coords);
            worst = worst.max(ip.inner(&u, &v).abs());
        }
    }
    Ok(OrthogonalGeodesics {
        family: metric.family().name().to_string(),
        global_hypotheses,
        note,
        passing: passing.len(),
        axes,
        max_pairwise_inner: worst,
        mutually_orthogonal: worst <= ORTHOGONALITY_TOL,
    })
}
