//! Multi-start search for geodesic vectors on the unit sphere of m.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{check, douglas_check, Verdict, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lie::ReductiveSpace;
use crate::metric::{MetricFamily, MetricSpec};

/// Forward-difference step of the Newton Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-7;
pub const MAX_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 30;
/// Convergence threshold on the sup-norm of the search residual, relative to
/// `max(1, structure scale)`.
pub const CONVERGENCE_TOL: f64 = 1e-11;
/// Converged Kropina points closer than this (cosine to X) to the boundary
/// of the half-space are discarded.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
/// Fraction of converged samples, and absolute count, above which the set of
/// distinct axes is reported as a manifold.
pub const MANIFOLD_FRACTION: f64 = 0.05;
pub const MANIFOLD_MIN_AXES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub samples: usize,
    pub seed: u64,
    /// Verdict tolerance every returned axis must pass.
    pub tol: f64,
    /// Angle (radians) below which two unit vectors count as one axis.
    pub dedup_angle: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { samples: 20_000, seed: 0, tol: DEFAULT_TOL, dedup_angle: 1e-4 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    /// Unit vector in m-coordinates.
    pub m_coords: Vec<f64>,
    /// The same vector in g-coordinates.
    pub vector: Vec<f64>,
    /// Residual of the family's own criterion at this vector.
    pub max_residual: f64,
    /// Number of samples that converged to this axis.
    pub hits: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisSet {
    pub family: String,
    /// Whether `Y` and `-Y` were identified.
    pub antipodal_identified: bool,
    pub axes: Vec<Axis>,
    /// Pairwise angles between the axes, in radians, measured in the inner
    /// product on m.
    pub pairwise_angles: Vec<Vec<f64>>,
    pub manifold_detected: bool,
    pub samples: usize,
    pub converged: usize,
    pub nonconverged: usize,
    /// Converged points dropped by the boundary margin or by re-verification.
    pub rejected: usize,
}

impl AxisSet {
    pub fn count(&self) -> usize {
        self.axes.len()
    }
}

/// Residual of the criterion in orthonormal m-coordinates, with the bracket
/// maps `c -> [c, z_j]_m` precomputed.
struct System<'a> {
    metric: &'a MetricSpec,
    brackets: Vec<DMatrix<f64>>,
    dim: usize,
}

impl<'a> System<'a> {
    fn new(space: &ReductiveSpace, metric: &'a MetricSpec) -> Self {
        let zs = space.m_basis();
        let d = zs.len();
        let brackets = zs
            .iter()
            .map(|zj| {
                let mut m = DMatrix::zeros(d, d);
                for (a, za) in zs.iter().enumerate() {
                    m.set_column(a, &space.bracket_m(za, zj));
                }
                m
            })
            .collect();
        Self { metric, brackets, dim: d }
    }

    /// Search residual at orthonormal coordinates `w`; `None` outside the
    /// domain.
    fn residual(&self, w: &DVector<f64>) -> Option<DVector<f64>> {
        let ip = self.metric.inner();
        let c = ip.from_orthonormal(w);
        let mut r = DVector::zeros(self.dim);
        match self.metric.family() {
            MetricFamily::Riemannian => {
                let gc = ip.matrix() * &c;
                for (j, b) in self.brackets.iter().enumerate() {
                    r[j] = (b * &c).dot(&gc);
                }
            }
            MetricFamily::Kropina => {
                let f = self.metric.eval(&c).ok()?;
                let target = ip.matrix() * (&c * (2.0 / f) - self.metric.drift());
                for (j, b) in self.brackets.iter().enumerate() {
                    r[j] = (b * &c).dot(&target);
                }
            }
            _ => {
                for (j, b) in self.brackets.iter().enumerate() {
                    r[j] = self.metric.euler_form(&c, &(b * &c)).ok()?;
                }
            }
        }
        Some(r)
    }

    /// Projected Gauss-Newton on the unit sphere. Returns the converged unit
    /// point, or `None`.
    fn solve(&self, start: DVector<f64>, conv_tol: f64) -> Option<DVector<f64>> {
        let d = self.dim;
        let mut w = start.normalize();
        let mut r = self.residual(&w)?;
        for _ in 0..MAX_ITERATIONS {
            if r.amax() <= conv_tol {
                return Some(w);
            }
            // rows 0..d: residual, row d: sphere constraint
            let mut jac = DMatrix::zeros(d + 1, d);
            for k in 0..d {
                let mut wk = w.clone();
                wk[k] += JACOBIAN_STEP;
                let rk = self.residual(&wk)?;
                jac.view_mut((0, k), (d, 1)).copy_from(&((rk - &r) / JACOBIAN_STEP));
                jac[(d, k)] = 2.0 * w[k];
            }
            let mut rhs = DVector::zeros(d + 1);
            rhs.rows_mut(0, d).copy_from(&(-&r));
            let svd = jac.svd(true, true);
            let smax = svd.singular_values.max();
            let step = svd.solve(&rhs, 1e-12 * smax.max(f64::MIN_POSITIVE)).ok()?;

            let norm0 = r.norm();
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let trial = (&w + &step * lambda).normalize();
                if let Some(rt) = self.residual(&trial) {
                    if rt.norm() < norm0 {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            let (nw, nr) = accepted?;
            w = nw;
            r = nr;
        }
        (r.amax() <= conv_tol).then_some(w)
    }
}

/// Seeded multi-start search for unit geodesic vectors in m.
///
/// Start points are standard normal samples; sample `i` draws from stream
/// `i` of a ChaCha8 generator seeded with `config.seed`, so the result does
/// not depend on thread scheduling. Axes are deduplicated by angle, kept in
/// first-hit order and then sorted by coordinates.
pub fn find_geodesic_vectors(space: &ReductiveSpace, metric: &MetricSpec, config: &SearchConfig) -> Result<AxisSet> {
    let d = space.dim_m();
    if metric.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: metric.dim() });
    }
    if d == 0 {
        return Err(Error::InvalidInput("m is zero-dimensional".into()));
    }
    if config.samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let ip = metric.inner();
    let system = System::new(space, metric);
    let conv_tol = CONVERGENCE_TOL * space.algebra().structure_scale().max(1.0);

    let kropina = *metric.family() == MetricFamily::Kropina;
    let antipodal_identified = match metric.family() {
        MetricFamily::Riemannian => true,
        MetricFamily::Randers => douglas_check(space, ip, metric.drift()),
        _ => false,
    };
    let x_on = ip.to_orthonormal(metric.drift());
    let x_norm = x_on.norm();

    let hits: Vec<Option<DVector<f64>>> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let mut w = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut rng)));
            if kropina && w.dot(&x_on) < 0.0 {
                w = -w;
            }
            system.solve(w, conv_tol)
        })
        .collect();

    let converged: Vec<DVector<f64>> = hits.iter().flatten().cloned().collect();
    let nonconverged = config.samples - converged.len();
    let manifold_threshold = (MANIFOLD_FRACTION * converged.len() as f64).max(MANIFOLD_MIN_AXES as f64);
    let cos_tol = config.dedup_angle.cos();

    let mut rejected = 0;
    let mut reps: Vec<(DVector<f64>, usize)> = Vec::new();
    let mut manifold_detected = false;
    for mut w in converged.iter().cloned() {
        if kropina && w.dot(&x_on) <= BOUNDARY_MARGIN * x_norm {
            rejected += 1;
            continue;
        }
        if antipodal_identified {
            canonical_sign(&mut w);
        }
        let same = reps.iter_mut().find(|(u, _)| {
            let c = u.dot(&w);
            (if antipodal_identified { c.abs() } else { c }) >= cos_tol
        });
        match same {
            Some((_, n)) => *n += 1,
            None => {
                reps.push((w, 1));
                if reps.len() as f64 > manifold_threshold {
                    manifold_detected = true;
                    break;
                }
            }
        }
    }

    let mut axes = Vec::with_capacity(reps.len());
    let mut unit_on = Vec::with_capacity(reps.len());
    for (w, n) in reps {
        let c = ip.from_orthonormal(&w);
        let y = space.from_m_coords(&c);
        let report = check(space, metric, &y, config.tol)?;
        if report.verdict != Verdict::Geodesic {
            rejected += 1;
            continue;
        }
        axes.push(Axis {
            m_coords: c.iter().copied().collect(),
            vector: report.candidate,
            max_residual: report.max_residual.unwrap_or(f64::NAN),
            hits: n,
        });
        unit_on.push(w);
    }

    let mut order: Vec<usize> = (0..axes.len()).collect();
    order.sort_by(|&a, &b| {
        let (u, v) = (&axes[a].m_coords, &axes[b].m_coords);
        u.iter().zip(v).map(|(x, y)| y.total_cmp(x)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let axes: Vec<Axis> = order.iter().map(|&i| axes[i].clone()).collect();
    let unit_on: Vec<DVector<f64>> = order.iter().map(|&i| unit_on[i].clone()).collect();

    let pairwise_angles = unit_on
        .iter()
        .map(|u| {
            unit_on
                .iter()
                .map(|v| {
                    let c = u.dot(v);
                    let c = if antipodal_identified { c.abs() } else { c };
                    c.clamp(-1.0, 1.0).acos()
                })
                .collect()
        })
        .collect();

    Ok(AxisSet {
        family: metric.family().name().to_string(),
        antipodal_identified,
        axes,
        pairwise_angles,
        manifold_detected,
        samples: config.samples,
        converged: converged.len(),
        nonconverged,
        rejected,
    })
}

/// Makes the largest-magnitude coordinate positive (first one on ties).
fn canonical_sign(w: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..w.len() {
        if w[i].abs() > w[best].abs() + 1e-9 {
            best = i;
        }
    }
    if w[best] < 0.0 {
        *w = -w.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{LieAlgebra, StructureEntry};
    use crate::metric::InnerProduct;

    fn milnor(p: [f64; 4]) -> ReductiveSpace {
        let a = LieAlgebra::new(
            3,
            &[
                StructureEntry { i: 0, j: 1, k: 1, c: p[0] },
                StructureEntry { i: 0, j: 1, k: 2, c: p[1] },
                StructureEntry { i: 0, j: 2, k: 1, c: p[2] },
                StructureEntry { i: 0, j: 2, k: 2, c: p[3] },
            ],
        )
        .unwrap();
        ReductiveSpace::lie_group(a)
    }

    fn cfg(samples: usize) -> SearchConfig {
        SearchConfig { samples, ..SearchConfig::default() }
    }

    #[test]
    fn three_axes() {
        let s = milnor([2.0, 2.0, 1.0, -1.0]);
        let m = MetricSpec::riemannian(InnerProduct::identity(3));
        let set = find_geodesic_vectors(&s, &m, &cfg(2000)).unwrap();
        assert!(!set.manifold_detected);
        assert_eq!(set.count(), 3);
        // e1 is always an axis
        assert!(set.axes.iter().any(|a| (a.m_coords[0].abs() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn single_axis() {
        let s = milnor([1.0, 0.0, 0.0, 1.0]);
        let m = MetricSpec::riemannian(InnerProduct::identity(3));
        let set = find_geodesic_vectors(&s, &m, &cfg(2000)).unwrap();
        assert_eq!(set.count(), 1);
        assert!((set.axes[0].m_coords[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn abelian_is_a_manifold() {
        let s = ReductiveSpace::lie_group(LieAlgebra::abelian(3));
        let m = MetricSpec::riemannian(InnerProduct::identity(3));
        let set = find_geodesic_vectors(&s, &m, &cfg(500)).unwrap();
        assert!(set.manifold_detected);
    }

    #[test]
    fn deterministic() {
        let s = milnor([2.0, 2.0, 1.0, -1.0]);
        let m = MetricSpec::kropina(InnerProduct::identity(3), DVector::from_column_slice(&[0.3, 0.5, -0.2])).unwrap();
        let a = find_geodesic_vectors(&s, &m, &cfg(400)).unwrap();
        let b = find_geodesic_vectors(&s, &m, &cfg(400)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for axis in &a.axes {
            assert!(axis.max_residual <= DEFAULT_TOL);
        }
    }

    #[test]
    fn randers_axes_verify_with_hessian() {
        let s = milnor([2.0, 2.0, 1.0, -1.0]);
        let m = MetricSpec::randers(InnerProduct::identity(3), DVector::from_column_slice(&[0.2, 0.1, 0.3])).unwrap();
        let set = find_geodesic_vectors(&s, &m, &cfg(400)).unwrap();
        assert!(set.count() >= 1);
        assert_eq!(set.rejected, 0);
    }
}
