//! Instance files: a Lie algebra, a reductive split, an inner product and a
//! metric, in TOML or JSON.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lie::{LieAlgebra, ReductiveSpace, StructureEntry};
use crate::metric::{InnerProduct, MetricSpec, NavigationData};
use crate::phi::PhiExpr;

/// `[e_i, e_j] = sum_k coeffs[k] e_k`, with 1-based `i` and `j`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BracketRow {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub family: String,
    #[serde(rename = "X", default)]
    pub x: Option<Vec<f64>>,
    #[serde(default)]
    pub phi: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NavigationSection {
    pub h: Vec<Vec<f64>>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    #[serde(default)]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<BracketRow>,
    #[serde(default)]
    pub h_basis: Vec<Vec<f64>>,
    #[serde(default)]
    pub m_basis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub inner_product: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub metric: Option<MetricSection>,
    #[serde(default)]
    pub navigation: Option<NavigationSection>,
}

/// An error tied to a key path in the instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceError {
    pub path: String,
    pub error: Error,
}

impl std::fmt::Display for InstanceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.error)
        } else {
            write!(f, "{}: {}", self.path, self.error)
        }
    }
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> InstanceError {
    let path = path.into();
    move |error| InstanceError { path, error }
}

fn invalid(path: impl Into<String>, msg: impl Into<String>) -> InstanceError {
    InstanceError { path: path.into(), error: Error::InvalidInput(msg.into()) }
}

impl InstanceFile {
    /// Parses JSON for `.json` files and TOML otherwise.
    pub fn parse(path: &Path, text: &str) -> Result<Self, InstanceError> {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(text).map_err(|e| invalid("", format!("JSON parse error: {e}")))
        } else {
            toml::from_str(text).map_err(|e| invalid("", format!("TOML parse error: {e}")))
        }
    }

    pub fn algebra(&self) -> Result<LieAlgebra, InstanceError> {
        let n = self.dim;
        if n == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        let names = match &self.basis {
            Some(b) if b.len() != n => {
                return Err(at("basis")(Error::DimensionMismatch { expected: n, got: b.len() }))
            }
            Some(b) => b.clone(),
            None => (1..=n).map(|i| format!("e{i}")).collect(),
        };
        let mut entries = Vec::new();
        for (r, row) in self.brackets.iter().enumerate() {
            let path = format!("brackets[{r}]");
            if row.i == 0 || row.i > n || row.j == 0 || row.j > n {
                return Err(invalid(&path, format!("indices are 1-based and at most {n}, got ({}, {})", row.i, row.j)));
            }
            if row.coeffs.len() != n {
                return Err(at(format!("{path}.coeffs"))(Error::DimensionMismatch { expected: n, got: row.coeffs.len() }));
            }
            for (k, &c) in row.coeffs.iter().enumerate() {
                if c != 0.0 {
                    entries.push(StructureEntry { i: row.i - 1, j: row.j - 1, k, c });
                }
            }
        }
        LieAlgebra::with_names(n, names, &entries).map_err(at("brackets"))
    }

    fn vectors(&self, key: &str, rows: &[Vec<f64>]) -> Result<Vec<DVector<f64>>, InstanceError> {
        rows.iter()
            .enumerate()
            .map(|(r, v)| {
                if v.len() != self.dim {
                    Err(at(format!("{key}[{r}]"))(Error::DimensionMismatch { expected: self.dim, got: v.len() }))
                } else {
                    Ok(DVector::from_column_slice(v))
                }
            })
            .collect()
    }

    pub fn space(&self, algebra: LieAlgebra) -> Result<ReductiveSpace, InstanceError> {
        let h = self.vectors("h_basis", &self.h_basis)?;
        match &self.m_basis {
            Some(m) => {
                let m = self.vectors("m_basis", m)?;
                ReductiveSpace::new(algebra, h, m).map_err(at("m_basis"))
            }
            None => algebra.reductive_split(&h).map_err(at("h_basis")),
        }
    }

    pub fn inner_product(&self, dim_m: usize) -> Result<InnerProduct, InstanceError> {
        match &self.inner_product {
            None => Ok(InnerProduct::identity(dim_m)),
            Some(rows) => matrix("inner_product", rows, dim_m).and_then(|m| InnerProduct::new(m).map_err(at("inner_product"))),
        }
    }

    /// The metric, with its drift converted from g- to m-coordinates.
    /// Without `metric` or `navigation` sections the metric is Riemannian.
    pub fn metric(&self, space: &ReductiveSpace, ip: &InnerProduct) -> Result<MetricSpec, InstanceError> {
        if let Some(nav) = &self.navigation {
            if self.metric.is_some() {
                return Err(invalid("navigation", "give either metric or navigation, not both"));
            }
            let h = matrix("navigation.h", &nav.h, space.dim_m())?;
            let h = InnerProduct::new(h).map_err(at("navigation.h"))?;
            let w = to_m(space, "navigation.W", &nav.w)?;
            let data = NavigationData::new(h, w).map_err(at("navigation.W"))?;
            return Ok(data.to_kropina());
        }
        let Some(section) = &self.metric else {
            return Ok(MetricSpec::riemannian(ip.clone()));
        };
        let drift = || -> Result<DVector<f64>, InstanceError> {
            let x = section.x.as_ref().ok_or_else(|| invalid("metric.X", "missing"))?;
            to_m(space, "metric.X", x)
        };
        match section.family.as_str() {
            "riemannian" => Ok(MetricSpec::riemannian(ip.clone())),
            "randers" => MetricSpec::randers(ip.clone(), drift()?).map_err(at("metric.X")),
            "kropina" => MetricSpec::kropina(ip.clone(), drift()?).map_err(at("metric.X")),
            "alphabeta" => {
                let text = section.phi.as_ref().ok_or_else(|| invalid("metric.phi", "missing"))?;
                let phi = PhiExpr::parse(text).map_err(|e| at("metric.phi")(e.into()))?;
                MetricSpec::alpha_beta(ip.clone(), phi, drift()?).map_err(at("metric.X"))
            }
            other => Err(invalid(
                "metric.family",
                format!("unknown family {other:?}; expected riemannian, randers, kropina or alphabeta"),
            )),
        }
    }
}

fn matrix(key: &str, rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>, InstanceError> {
    if rows.len() != n {
        return Err(at(key)(Error::DimensionMismatch { expected: n, got: rows.len() }));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(at(format!("{key}[{r}]"))(Error::DimensionMismatch { expected: n, got: row.len() }));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Converts a g-vector lying in m to m-coordinates.
pub fn to_m(space: &ReductiveSpace, key: &str, v: &[f64]) -> Result<DVector<f64>, InstanceError> {
    let n = space.dim_g();
    if v.len() != n {
        return Err(at(key)(Error::DimensionMismatch { expected: n, got: v.len() }));
    }
    let g = DVector::from_column_slice(v);
    let c = space.m_coords(&g);
    let off = (&g - space.from_m_coords(&c)).amax();
    if off > 1e-10 * g.amax().max(1.0) {
        return Err(invalid(key, format!("vector must lie in m (h-component {off:e})")));
    }
    Ok(c)
}

/// Parses a comma-separated vector such as `1,0,-0.5`.
pub fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect()
}
