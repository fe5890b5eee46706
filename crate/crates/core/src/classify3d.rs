//! Three-dimensional non-unimodular Lie algebras in a Milnor frame:
//! `[e1, e2] = a e2 + b e3`, `[e1, e3] = c e2 + d e3`, `[e2, e3] = 0`, with
//! `a + d != 0` and `a c + b d = 0`, and `{e1, e2, e3}` orthonormal.
//!
//! For the left-invariant Riemannian metric the geodesic equations reduce to
//! `y1 (a y2 + b y3) = y1 (c y2 + d y3) = 0` and
//! `a y2^2 + (b + c) y2 y3 + d y3^2 = 0`, so the number of axes is governed
//! by the discriminant `D = (b + c)^2 - 4 a d`.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{douglas_check, find_geodesic_vectors, AxisSet, SearchConfig};
use crate::lie::{LieAlgebra, ReductiveSpace, StructureEntry};
use crate::linalg;
use crate::metric::{levi_civita_ricci, InnerProduct, MetricFamily, MetricSpec, RicciData};

pub const PARAM_TOL: f64 = 1e-12;
pub const DISCRIMINANT_TOL: f64 = 1e-12;
/// Minimum gap between Ricci eigenvalues for them to count as distinct.
pub const RICCI_GAP: f64 = 1e-8;
/// Tolerance of the orthogonality and independence pattern.
pub const PATTERN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonUnimodularParams {
    #[serde(rename = "milnor_alpha")]
    pub alpha: f64,
    #[serde(rename = "milnor_beta")]
    pub beta: f64,
    #[serde(rename = "milnor_gamma")]
    pub gamma: f64,
    #[serde(rename = "milnor_delta")]
    pub delta: f64,
}

impl NonUnimodularParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = Self { alpha, beta, gamma, delta };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `D = 0`: `b^2 = 4 a^3 d / (a - d)^2`, `c = -b d / a`.
    /// Needs `a d > 0` and `a != d`.
    pub fn zero_discriminant(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha * delta > 0.0) || alpha == delta {
            return Err(Error::InvalidInput("D = 0 family needs a d > 0 and a != d".into()));
        }
        let beta = 2.0 * (alpha.powi(3) * delta).sqrt() / (alpha - delta).abs();
        Self::new(alpha, beta, -beta * delta / alpha, delta)
    }

    /// A random admissible draw: `a, b, d` uniform in `[-3, 3]` with
    /// `|a| >= 0.1`, `|a + d| >= 0.1`, then `c = -b d / a`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let alpha: f64 = rng.random_range(-3.0..3.0);
            let beta: f64 = rng.random_range(-3.0..3.0);
            let delta: f64 = rng.random_range(-3.0..3.0);
            if alpha.abs() < 0.1 || (alpha + delta).abs() < 0.1 {
                continue;
            }
            let p = Self { alpha, beta, gamma: -beta * delta / alpha, delta };
            if p.validate().is_ok() {
                return p;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { alpha, beta, gamma, delta } = *self;
        if ![alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::ConstraintViolation("parameters must be finite".into()));
        }
        if !((alpha + delta).abs() > PARAM_TOL) {
            return Err(Error::ConstraintViolation(format!("alpha + delta != 0 fails: {:e}", alpha + delta)));
        }
        let c = alpha * gamma + beta * delta;
        if c.abs() > PARAM_TOL {
            return Err(Error::ConstraintViolation(format!("alpha*gamma + beta*delta = 0 fails: {c:e}")));
        }
        Ok(())
    }

    /// `D = (b + c)^2 - 4 a d`.
    pub fn discriminant(&self) -> f64 {
        (self.beta + self.gamma).powi(2) - 4.0 * self.alpha * self.delta
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { alpha: c * self.alpha, beta: c * self.beta, gamma: c * self.gamma, delta: c * self.delta }
    }
}

/// The algebra in its Milnor frame as a Lie group (`h = {0}`), with the
/// identity inner product.
pub fn build(params: &NonUnimodularParams) -> Result<(ReductiveSpace, InnerProduct)> {
    params.validate()?;
    let p = params;
    let algebra = LieAlgebra::new(
        3,
        &[
            StructureEntry { i: 0, j: 1, k: 1, c: p.alpha },
            StructureEntry { i: 0, j: 1, k: 2, c: p.beta },
            StructureEntry { i: 0, j: 2, k: 1, c: p.gamma },
            StructureEntry { i: 0, j: 2, k: 2, c: p.delta },
        ],
    )?;
    let report = algebra.validate();
    if !report.passed {
        return Err(Error::NumericalFailure(format!("Jacobi violation {:e}", report.max_violation)));
    }
    Ok((ReductiveSpace::lie_group(algebra), InnerProduct::identity(3)))
}

/// Axis count from the sign of D alone.
pub fn count_from_discriminant(d: f64) -> usize {
    if d < -DISCRIMINANT_TOL {
        1
    } else if d > DISCRIMINANT_TOL {
        3
    } else {
        2
    }
}

pub fn ricci_data(params: &NonUnimodularParams) -> Result<RicciData> {
    let (space, ip) = build(params)?;
    levi_civita_ricci(&space, &ip)
}

/// Predicted number of axes; fails with `RicciDegenerate` unless the Ricci
/// eigenvalues are pairwise distinct.
pub fn predicted_axis_count(params: &NonUnimodularParams) -> Result<usize> {
    let gap = ricci_data(params)?.min_gap();
    if !(gap > RICCI_GAP) {
        return Err(Error::RicciDegenerate { gap });
    }
    Ok(count_from_discriminant(params.discriminant()))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityPattern {
    /// `|cos|` between each pair of axes, row-major over `i < j`.
    pub pair_cosines: Vec<f64>,
    pub mutually_orthogonal: bool,
    pub linearly_independent: bool,
    pub has_non_orthogonal_pair: bool,
    /// Smallest singular value of the matrix of unit axes.
    pub smallest_singular_value: f64,
}

impl OrthogonalityPattern {
    pub fn of(axes: &AxisSet) -> Self {
        let vs: Vec<DVector<f64>> = axes.axes.iter().map(|a| DVector::from_column_slice(&a.vector)).collect();
        let mut pair_cosines = Vec::new();
        for (i, u) in vs.iter().enumerate() {
            for v in &vs[i + 1..] {
                pair_cosines.push(u.dot(v).abs() / (u.norm() * v.norm()));
            }
        }
        let smallest = if vs.is_empty() {
            0.0
        } else {
            let n = vs[0].len();
            linalg::singular_values(&linalg::columns_to_matrix(n, &vs)).last().copied().unwrap_or(0.0)
        };
        Self {
            mutually_orthogonal: pair_cosines.iter().all(|&c| c <= PATTERN_TOL),
            has_non_orthogonal_pair: pair_cosines.iter().any(|&c| c > PATTERN_TOL),
            linearly_independent: smallest > PATTERN_TOL,
            smallest_singular_value: smallest,
            pair_cosines,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub params: NonUnimodularParams,
    pub discriminant: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub ricci_distinct: bool,
    /// Absent when the Ricci eigenvalues are not distinct.
    pub predicted: Option<usize>,
    pub found: usize,
    pub axes: AxisSet,
    pub pattern: OrthogonalityPattern,
    /// Count and pattern agree with the prediction; absent without one.
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

/// Enumerates the axes of a Riemannian or Douglas-type Randers metric and
/// compares them with the prediction. The metric's inner product must be
/// the identity of the Milnor frame.
pub fn enumerate_and_verify(params: &NonUnimodularParams, metric: &MetricSpec, config: &SearchConfig) -> Result<Classification> {
    let (space, ip) = build(params)?;
    if metric.inner() != &ip {
        return Err(Error::InvalidInput("the Milnor frame must be orthonormal for the metric".into()));
    }
    match metric.family() {
        MetricFamily::Riemannian => {}
        MetricFamily::Randers if douglas_check(&space, &ip, metric.drift()) => {}
        _ => return Err(Error::InvalidInput("needs a Riemannian or Douglas-type Randers metric".into())),
    }
    let ricci = levi_civita_ricci(&space, &ip)?;
    let ricci_distinct = ricci.min_gap() > RICCI_GAP;
    let d = params.discriminant();
    let predicted = ricci_distinct.then(|| count_from_discriminant(d));

    let axes = find_geodesic_vectors(&space, metric, config)?;
    let pattern = OrthogonalityPattern::of(&axes);
    let found = axes.count();
    let matches = predicted.map(|p| {
        let count_ok = !axes.manifold_detected && found == p;
        let pattern_ok = match p {
            2 => pattern.mutually_orthogonal,
            3 => pattern.linearly_independent && pattern.has_non_orthogonal_pair,
            _ => true,
        };
        count_ok && pattern_ok
    });
    Ok(Classification {
        params: *params,
        discriminant: d,
        ricci_eigenvalues: ricci.eigenvalues,
        ricci_distinct,
        predicted,
        found,
        axes,
        pattern,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig { samples: 1000, ..SearchConfig::default() }
    }

    #[test]
    fn build_examples() {
        let p = NonUnimodularParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.discriminant(), -4.0);
        let p = NonUnimodularParams::new(2.0, 2.0, 1.0, -1.0).unwrap();
        assert_eq!(p.discriminant(), 17.0);
        assert!(matches!(NonUnimodularParams::new(1.0, 0.0, 0.0, -1.0), Err(Error::ConstraintViolation(m)) if m.contains("alpha + delta")));
        assert!(matches!(NonUnimodularParams::new(1.0, 1.0, 1.0, 1.0), Err(Error::ConstraintViolation(m)) if m.contains("alpha*gamma")));
    }

    #[test]
    fn zero_discriminant_family() {
        let p = NonUnimodularParams::zero_discriminant(2.0, 1.0).unwrap();
        assert!((p.beta - 32f64.sqrt()).abs() < 1e-14);
        assert!((p.gamma + 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(p.discriminant().abs() < 1e-12);
    }

    #[test]
    fn predictions() {
        let hyperbolic = NonUnimodularParams::new(1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(predicted_axis_count(&hyperbolic), Err(Error::RicciDegenerate { .. })));
        let p = NonUnimodularParams::new(2.0, 2.0, 1.0, -1.0).unwrap();
        assert_eq!(predicted_axis_count(&p).unwrap(), 3);
        assert_eq!(count_from_discriminant(-4.0), 1);
        assert_eq!(count_from_discriminant(0.0), 2);
    }

    #[test]
    fn d17_pattern() {
        let p = NonUnimodularParams::new(2.0, 2.0, 1.0, -1.0).unwrap();
        let m = MetricSpec::riemannian(InnerProduct::identity(3));
        let c = enumerate_and_verify(&p, &m, &cfg()).unwrap();
        assert_eq!(c.found, 3);
        assert_eq!(c.matches, Some(true));
        assert!(c.pattern.has_non_orthogonal_pair);
    }

    #[test]
    fn d0_pattern() {
        let p = NonUnimodularParams::zero_discriminant(2.0, 1.0).unwrap();
        let m = MetricSpec::riemannian(InnerProduct::identity(3));
        let c = enumerate_and_verify(&p, &m, &cfg()).unwrap();
        assert_eq!(c.found, 2);
        assert!(c.pattern.mutually_orthogonal);
    }

    #[test]
    fn douglas_randers_matches_riemannian() {
        let p = NonUnimodularParams::new(2.0, 2.0, 1.0, -1.0).unwrap();
        let r = enumerate_and_verify(&p, &MetricSpec::riemannian(InnerProduct::identity(3)), &cfg()).unwrap();
        let x = DVector::from_column_slice(&[0.4, 0.0, 0.0]);
        let f = enumerate_and_verify(&p, &MetricSpec::randers(InnerProduct::identity(3), x).unwrap(), &cfg()).unwrap();
        assert_eq!(r.found, f.found);
        for (a, b) in r.axes.axes.iter().zip(&f.axes.axes) {
            let dot: f64 = a.vector.iter().zip(&b.vector).map(|(u, v)| u * v).sum();
            assert!(dot.abs() > 1.0 - 1e-8);
        }
    }

    #[test]
    fn non_douglas_randers_rejected() {
        let p = NonUnimodularParams::new(2.0, 2.0, 1.0, -1.0).unwrap();
        let x = DVector::from_column_slice(&[0.0, 0.3, 0.0]);
        let m = MetricSpec::randers(InnerProduct::identity(3), x).unwrap();
        assert!(enumerate_and_verify(&p, &m, &cfg()).is_err());
    }
}
