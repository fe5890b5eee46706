use nalgebra::DVector;

use super::{InnerProduct, MetricSpec};
use crate::error::{Error, Result};

/// Tolerance on `|W|_h = 1`.
pub const UNIT_TOL: f64 = 1e-9;

/// Zermelo navigation data `(h, W)` with `W` of unit h-length. Its
/// time-optimal metric is the Kropina metric `h(y, y) / (2 h(W, y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationData {
    h: InnerProduct,
    wind: DVector<f64>,
}

impl NavigationData {
    pub fn new(h: InnerProduct, wind: DVector<f64>) -> Result<Self> {
        if wind.len() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: wind.len() });
        }
        let norm = h.norm(&wind);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self { h, wind })
    }

    pub fn h(&self) -> &InnerProduct {
        &self.h
    }

    pub fn wind(&self) -> &DVector<f64> {
        &self.wind
    }

    /// The Kropina metric with inner product `h` and drift `X = 2 W`.
    pub fn to_kropina(&self) -> MetricSpec {
        MetricSpec::kropina(self.h.clone(), &self.wind * 2.0).expect("unit wind is nonzero")
    }

    /// `h(y/F(y) - W, y/F(y) - W) - 1` for the converted metric; vanishes on
    /// the whole domain.
    pub fn zermelo_defect(&self, metric: &MetricSpec, y: &DVector<f64>) -> Result<f64> {
        let f = metric.eval(y)?;
        let u = y / f - &self.wind;
        Ok(self.h.inner(&u, &u) - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn planar_example() {
        let nav = NavigationData::new(InnerProduct::identity(2), v(&[1.0, 0.0])).unwrap();
        let m = nav.to_kropina();
        assert_eq!(m.drift(), &v(&[2.0, 0.0]));
        // F(y) = (y1^2 + y2^2) / (2 y1)
        assert_eq!(m.eval(&v(&[1.0, 0.0])).unwrap(), 0.5);
        assert_eq!(m.eval(&v(&[1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(nav.zermelo_defect(&m, nav.wind()).unwrap(), 0.0);
    }

    #[test]
    fn tilted_wind() {
        let nav = NavigationData::new(InnerProduct::identity(2), v(&[0.6, 0.8])).unwrap();
        let m = nav.to_kropina();
        assert!((m.drift() - v(&[1.2, 1.6])).amax() < 1e-15);
        let y = v(&[0.5, 2.0]);
        assert!(nav.zermelo_defect(&m, &y).unwrap().abs() < 1e-14);
    }

    #[test]
    fn non_unit_wind_rejected() {
        let h = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(
            NavigationData::new(h.clone(), v(&[1.0, 0.0])).unwrap_err(),
            Error::NotUnitVector { norm: 2.0 }
        );
        assert!(NavigationData::new(h, v(&[0.5, 0.0])).is_ok());
    }
}
