//! Invariant metrics on m: Riemannian, Randers, Kropina and general
//! (alpha, beta)-metrics `F = alpha * phi(beta / alpha)`.
//!
//! All vectors here are m-coordinates (see [`crate::lie::ReductiveSpace`]).

mod navigation;
mod ricci;

pub use navigation::NavigationData;
pub use ricci::{levi_civita_ricci, RicciData};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::phi::PhiExpr;

/// Base step of the fundamental-tensor stencil, as a fraction of the local
/// length scale (|Y|, or the distance to the Kropina boundary if smaller).
pub const HESSIAN_STEP: f64 = 1e-3;
/// Relative asymmetry of the raw Hessian that counts as a numerical failure.
pub const HESSIAN_SYMMETRY_TOL: f64 = 1e-6;
/// Drift vectors shorter than this are treated as zero.
pub const DRIFT_EPS: f64 = 1e-12;

/// Symmetric positive-definite inner product on m.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    matrix: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl InnerProduct {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotPositiveDefinite("matrix must be square and nonempty".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotPositiveDefinite("matrix has non-finite entries".into()));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * matrix.amax().max(1.0) {
            return Err(Error::NotPositiveDefinite(format!("asymmetry {asym:e}")));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let smallest = linalg::jacobi_eigen(&sym).values[0];
        if smallest <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {smallest:e}")));
        }
        let chol = linalg::cholesky(&sym)
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        Ok(Self { matrix: sym, chol })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Lower Cholesky factor `L` with `matrix = L L^T`.
    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.matrix * v)[0]
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// Coordinates in which this inner product is the Euclidean one.
    pub fn to_orthonormal(&self, u: &DVector<f64>) -> DVector<f64> {
        self.chol.transpose() * u
    }

    pub fn from_orthonormal(&self, w: &DVector<f64>) -> DVector<f64> {
        self.chol
            .transpose()
            .solve_upper_triangular(w)
            .expect("Cholesky factor is nonsingular")
    }

    /// Largest violation of `<[h,u],v> + <u,[h,v]> = 0`, the infinitesimal
    /// Ad(H)-invariance of the inner product.
    pub fn invariance_violation(&self, space: &crate::lie::ReductiveSpace) -> f64 {
        let mut worst = 0.0_f64;
        let dm = space.dim_m();
        for h in space.h_basis() {
            let mut ad = DMatrix::zeros(dm, dm);
            for (j, z) in space.m_basis().iter().enumerate() {
                ad.set_column(j, &space.bracket_m(h, z));
            }
            let skew = ad.transpose() * &self.matrix + &self.matrix * &ad;
            worst = worst.max(skew.amax());
        }
        worst
    }
}

/// Which (alpha, beta)-metric is meant.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricFamily {
    Riemannian,
    Randers,
    Kropina,
    AlphaBeta(PhiExpr),
}

impl MetricFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MetricFamily::Riemannian => "riemannian",
            MetricFamily::Randers => "randers",
            MetricFamily::Kropina => "kropina",
            MetricFamily::AlphaBeta(_) => "alphabeta",
        }
    }
}

/// An invariant metric on m: an inner product, a family, and the drift
/// vector X dual to beta.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    inner: InnerProduct,
    family: MetricFamily,
    drift: DVector<f64>,
    // phi and its first two derivatives, for every family
    phi: [PhiExpr; 3],
}

impl MetricSpec {
    pub fn riemannian(inner: InnerProduct) -> Self {
        let dim = inner.dim();
        Self::build(inner, MetricFamily::Riemannian, DVector::zeros(dim), PhiExpr::riemannian())
    }

    /// `F(y) = |y| + <X, y>`; requires `0 < |X| < 1`.
    pub fn randers(inner: InnerProduct, drift: DVector<f64>) -> Result<Self> {
        check_drift(&inner, &drift)?;
        let b = inner.norm(&drift);
        if b >= 1.0 {
            return Err(Error::InvalidInput(format!("Randers drift must satisfy |X| < 1, got {b}")));
        }
        Ok(Self::build(inner, MetricFamily::Randers, drift, PhiExpr::randers()))
    }

    /// `F(y) = <y, y> / <X, y>` on the half-space `<X, y> > 0`.
    pub fn kropina(inner: InnerProduct, drift: DVector<f64>) -> Result<Self> {
        check_drift(&inner, &drift)?;
        Ok(Self::build(inner, MetricFamily::Kropina, drift, PhiExpr::kropina()))
    }

    /// `F(y) = |y| phi(<X, y> / |y|)`.
    pub fn alpha_beta(inner: InnerProduct, phi: PhiExpr, drift: DVector<f64>) -> Result<Self> {
        if drift.len() != inner.dim() {
            return Err(Error::DimensionMismatch { expected: inner.dim(), got: drift.len() });
        }
        Ok(Self::build(inner, MetricFamily::AlphaBeta(phi.clone()), drift, phi))
    }

    fn build(inner: InnerProduct, family: MetricFamily, drift: DVector<f64>, phi: PhiExpr) -> Self {
        let (d1, d2) = phi.derivatives();
        Self { inner, family, drift, phi: [phi, d1, d2] }
    }

    pub fn inner(&self) -> &InnerProduct {
        &self.inner
    }

    pub fn family(&self) -> &MetricFamily {
        &self.family
    }

    pub fn drift(&self) -> &DVector<f64> {
        &self.drift
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn phi(&self) -> &PhiExpr {
        &self.phi[0]
    }

    pub fn phi_second_derivative(&self) -> &PhiExpr {
        &self.phi[2]
    }

    /// `|beta|_alpha`, the norm of the drift.
    pub fn drift_norm(&self) -> f64 {
        self.inner.norm(&self.drift)
    }

    /// `beta(y) = <X, y>`.
    pub fn beta(&self, y: &DVector<f64>) -> f64 {
        self.inner.inner(&self.drift, y)
    }

    /// Whether `y` lies in the open domain of F.
    pub fn in_domain(&self, y: &DVector<f64>) -> bool {
        self.eval(y).is_ok()
    }

    /// The Finsler function. Positive and 1-homogeneous on its domain.
    pub fn eval(&self, y: &DVector<f64>) -> Result<f64> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: y.len() });
        }
        let a2 = self.inner.inner(y, y);
        if !(a2 > 0.0) {
            return Err(Error::ZeroVector);
        }
        let alpha = a2.sqrt();
        let f = match &self.family {
            MetricFamily::Riemannian => alpha,
            MetricFamily::Randers => alpha + self.beta(y),
            MetricFamily::Kropina => {
                let b = self.beta(y);
                if !(b > 0.0) {
                    return Err(Error::OutsideDomain(format!("Kropina needs <X, y> > 0, got {b:e}")));
                }
                a2 / b
            }
            MetricFamily::AlphaBeta(phi) => {
                let s = self.beta(y) / alpha;
                let p = phi.eval(s).map_err(|e| Error::OutsideDomain(e.to_string()))?;
                alpha * p
            }
        };
        if f > 0.0 && f.is_finite() {
            Ok(f)
        } else {
            Err(Error::OutsideDomain(format!("F = {f} is not positive")))
        }
    }

    /// `g_Y(w, Y) = F(Y) dF_Y(w)`, evaluated from the exact first derivative
    /// of `alpha * phi(beta / alpha)`. By Euler's theorem this equals the
    /// fundamental tensor contracted with Y once.
    pub fn euler_form(&self, y: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        let f = self.eval(y)?;
        let a2 = self.inner.inner(y, y);
        let alpha = a2.sqrt();
        let yw = self.inner.inner(y, w);
        let xw = self.beta(w);
        let b = self.beta(y);
        let df = match &self.family {
            MetricFamily::Riemannian => yw / alpha,
            MetricFamily::Randers => yw / alpha + xw,
            MetricFamily::Kropina => 2.0 * yw / b - a2 * xw / (b * b),
            MetricFamily::AlphaBeta(_) => {
                let s = b / alpha;
                let p = self.phi[0].eval(s).map_err(|e| Error::OutsideDomain(e.to_string()))?;
                let p1 = self.phi[1].eval(s).map_err(|e| Error::OutsideDomain(e.to_string()))?;
                let ds = xw / alpha - b * yw / (alpha * a2);
                p * yw / alpha + alpha * p1 * ds
            }
        };
        Ok(f * df)
    }

    /// Local length scale for finite differences around `y`.
    fn stencil_scale(&self, y: &DVector<f64>) -> f64 {
        let alpha = self.inner.norm(y);
        match self.family {
            MetricFamily::Kropina => {
                let dist = self.beta(y) / self.drift_norm();
                alpha.min(dist)
            }
            _ => alpha,
        }
    }

    /// Gradient of `F^2 / 2` in m-coordinates, from the generic
    /// `alpha * phi(s)` formula: `F ((phi - s phi') G y / alpha + phi' G X)`.
    pub fn energy_gradient(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let f = self.eval(y)?;
        let gy = &self.inner.matrix * y;
        if self.family == MetricFamily::Riemannian {
            return Ok(gy);
        }
        let alpha = self.inner.norm(y);
        let s = self.beta(y) / alpha;
        let p = self.phi[0].eval(s).map_err(|e| Error::OutsideDomain(e.to_string()))?;
        let p1 = self.phi[1].eval(s).map_err(|e| Error::OutsideDomain(e.to_string()))?;
        let gx = &self.inner.matrix * &self.drift;
        Ok((gy * ((p - s * p1) / alpha) + gx * p1) * f)
    }

    /// Fundamental tensor `g_Y = (1/2) Hess(F^2)(Y)`.
    ///
    /// The Riemannian family returns the inner product exactly. Every other
    /// family takes central differences of [`Self::energy_gradient`] in
    /// orthonormal coordinates, with one Richardson extrapolation step.
    pub fn fundamental_tensor(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.eval(y)?;
        if self.family == MetricFamily::Riemannian {
            return Ok(self.inner.matrix.clone());
        }
        let l = self.inner.cholesky();
        let w0 = self.inner.to_orthonormal(y);
        // w = L^T y, so grad_w = L^{-1} grad_y
        let gradient = |w: &DVector<f64>| -> Result<DVector<f64>> {
            let gy = self.energy_gradient(&self.inner.from_orthonormal(w))?;
            l.clone().solve_lower_triangular(&gy).ok_or_else(|| Error::NumericalFailure("singular Cholesky factor".into()))
        };
        let h = HESSIAN_STEP * self.stencil_scale(y);
        let coarse = gradient_jacobian(&gradient, &w0, h)?;
        let fine = gradient_jacobian(&gradient, &w0, 0.5 * h)?;
        let hess = (fine * 4.0 - coarse) / 3.0;

        let scale = hess.amax();
        let asym = (&hess - hess.transpose()).amax();
        if !scale.is_finite() || asym > HESSIAN_SYMMETRY_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "finite-difference Hessian asymmetry {asym:e} against scale {scale:e}"
            )));
        }
        let hess = (&hess + hess.transpose()) * 0.5;
        // back to m-coordinates: Hess_y = L Hess_w L^T
        Ok(l * hess * l.transpose())
    }

    /// Closed form of `g_Y(u, Y)` for a Kropina metric:
    /// `F(Y)^3 / <Y, Y> * <u, 2 Y / F(Y) - X>`.
    pub fn kropina_directional_identity(&self, y: &DVector<f64>, u: &DVector<f64>) -> Result<f64> {
        if self.family != MetricFamily::Kropina {
            return Err(Error::InvalidInput("closed form applies to Kropina metrics only".into()));
        }
        let f = self.eval(y)?;
        let target = y * (2.0 / f) - &self.drift;
        Ok(f.powi(3) / self.inner.inner(y, y) * self.inner.inner(u, &target))
    }
}

fn check_drift(inner: &InnerProduct, drift: &DVector<f64>) -> Result<()> {
    if drift.len() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: inner.dim(), got: drift.len() });
    }
    if !(inner.norm(drift) > DRIFT_EPS) {
        return Err(Error::InvalidInput("X must be nonzero".into()));
    }
    Ok(())
}

/// Unsymmetrized second differences; entry (i, j) steps along i first.
fn gradient_jacobian(
    gradient: &dyn Fn(&DVector<f64>) -> Result<DVector<f64>>,
    w0: &DVector<f64>,
    h: f64,
) -> Result<DMatrix<f64>> {
    let d = w0.len();
    let mut jac = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut plus = w0.clone();
        let mut minus = w0.clone();
        plus[k] += h;
        minus[k] -= h;
        jac.set_column(k, &((gradient(&plus)? - gradient(&minus)?) / (2.0 * h)));
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn kropina_2d() -> MetricSpec {
        MetricSpec::kropina(InnerProduct::identity(2), v(&[1.0, 0.0])).unwrap()
    }

    #[test]
    fn generic_gradient_matches_family_formulas() {
        let ip = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        let x = v(&[0.2, 0.3]);
        let metrics = [
            MetricSpec::kropina(ip.clone(), x.clone()).unwrap(),
            MetricSpec::randers(ip.clone(), x.clone()).unwrap(),
            MetricSpec::alpha_beta(ip.clone(), PhiExpr::parse("1+s+s^2").unwrap(), x.clone()).unwrap(),
        ];
        let y = v(&[1.0, 0.4]);
        let w = v(&[-0.3, 0.8]);
        for m in &metrics {
            let lhs = m.energy_gradient(&y).unwrap().dot(&w);
            let rhs = m.euler_form(&y, &w).unwrap();
            assert!((lhs - rhs).abs() < 1e-14, "{}", m.family().name());
        }
    }

    #[test]
    fn inner_product_validation() {
        assert!(InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).is_err());
        let ip = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        let u = v(&[0.3, -1.2]);
        let w = ip.to_orthonormal(&u);
        assert!((w.norm_squared() - ip.inner(&u, &u)).abs() < 1e-14);
        assert!((ip.from_orthonormal(&w) - u).norm() < 1e-14);
    }

    #[test]
    fn zero_drift_rejected() {
        let e = MetricSpec::kropina(InnerProduct::identity(2), v(&[0.0, 0.0])).unwrap_err();
        assert_eq!(e, Error::InvalidInput("X must be nonzero".into()));
        assert!(MetricSpec::randers(InnerProduct::identity(2), v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn kropina_values_and_domain() {
        let m = MetricSpec::kropina(InnerProduct::identity(3), v(&[0.3, 0.4, 0.0])).unwrap();
        assert_eq!(m.eval(&v(&[0.3, 0.4, 0.0])).unwrap(), 1.0);
        assert!(matches!(m.eval(&v(&[-0.3, -0.4, 0.0])), Err(Error::OutsideDomain(_))));
        assert!(matches!(m.eval(&v(&[0.0, 0.0, 0.0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn randers_value() {
        let m = MetricSpec::randers(InnerProduct::identity(3), v(&[0.5, 0.0, 0.0])).unwrap();
        assert_eq!(m.eval(&v(&[1.0, 0.0, 0.0])).unwrap(), 1.5);
    }

    #[test]
    fn riemannian_tensor_is_exact() {
        let ip = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        let m = MetricSpec::riemannian(ip.clone());
        assert_eq!(&m.fundamental_tensor(&v(&[0.2, 5.0])).unwrap(), ip.matrix());
    }

    #[test]
    fn kropina_tensor_matches_symbolic_hessian() {
        // F^2 / 2 = (y1^2 + y2^2)^2 / (2 y1^2); its Hessian at (1, 1), by hand:
        //   d2/dy1^2  = 1 + 3 y2^4 / y1^4          = 4
        //   d2/dy1dy2 = -4 y2^3 / y1^3             = -4
        //   d2/dy2^2  = 2 (y1^2 + 3 y2^2) / y1^2   = 8
        let m = kropina_2d();
        let y = v(&[1.0, 1.0]);
        assert_eq!(m.eval(&y).unwrap(), 2.0);
        let g = m.fundamental_tensor(&y).unwrap();
        let exact = DMatrix::from_row_slice(2, 2, &[4.0, -4.0, -4.0, 8.0]);
        assert!((g - exact).amax() < 1e-8);
    }

    #[test]
    fn directional_identity_examples() {
        let m = MetricSpec::kropina(InnerProduct::identity(3), v(&[0.5, 0.2, -0.1])).unwrap();
        let y = v(&[1.0, -0.3, 0.4]);
        let f = m.eval(&y).unwrap();
        let at_y = m.kropina_directional_identity(&y, &y).unwrap();
        assert!((at_y - f * f).abs() < 1e-13 * f * f);

        let x = m.drift().clone();
        let u = v(&[0.1, 2.0, -1.0]);
        let at_x = m.kropina_directional_identity(&x, &u).unwrap();
        assert!((at_x - x.dot(&u) / x.dot(&x)).abs() < 1e-14);

        let g = m.fundamental_tensor(&y).unwrap();
        let hess_path = (u.transpose() * &g * &y)[0];
        let closed = m.kropina_directional_identity(&y, &u).unwrap();
        assert!((hess_path - closed).abs() < 1e-6 * closed.abs());
    }

    #[test]
    fn euler_form_matches_hessian_for_alpha_beta() {
        let ip = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.5, 0.2, 0.2, 0.8])).unwrap();
        let phi = PhiExpr::parse("sqrt(1+s^2)+0.3*s").unwrap();
        let m = MetricSpec::alpha_beta(ip, phi, v(&[0.4, -0.3])).unwrap();
        let y = v(&[0.7, 0.9]);
        let u = v(&[-1.0, 0.25]);
        let g = m.fundamental_tensor(&y).unwrap();
        let hess_path = (u.transpose() * &g * &y)[0];
        let exact = m.euler_form(&y, &u).unwrap();
        assert!((hess_path - exact).abs() < 1e-8 * exact.abs().max(1.0));
    }
}
