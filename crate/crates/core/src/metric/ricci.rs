//! Levi-Civita connection and Ricci tensor of a left-invariant Riemannian
//! metric, assembled from the Koszul formula in an orthonormal frame.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::InnerProduct;
use crate::error::{Error, Result};
use crate::lie::ReductiveSpace;
use crate::linalg;

#[derive(Debug, Clone, Serialize)]
pub struct RicciData {
    /// Ricci form in the orthonormal frame built from the m basis.
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
}

impl RicciData {
    /// Smallest gap between consecutive eigenvalues (infinite for dim 1).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Ricci eigenvalues of the left-invariant metric `ip` on a Lie group
/// (`h = {0}`).
pub fn levi_civita_ricci(space: &ReductiveSpace, ip: &InnerProduct) -> Result<RicciData> {
    if !space.h_basis().is_empty() {
        return Err(Error::InvalidInput("Ricci computation needs h = {0}".into()));
    }
    let n = space.dim_m();
    if ip.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ip.dim() });
    }

    // orthonormal frame u_i, as g-vectors
    let frame: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            space.from_m_coords(&ip.from_orthonormal(&e))
        })
        .collect();
    // c[i][j][k] = <[u_i, u_j], u_k>
    let mut c = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let w = ip.to_orthonormal(&space.bracket_m(&frame[i], &frame[j]));
            for k in 0..n {
                c[(i * n + j) * n + k] = w[k];
            }
        }
    }
    let cc = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];

    // Koszul: 2 <nabla_i u_j, u_k> = c_ijk - c_jki + c_kij
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] = 0.5 * (cc(i, j, k) - cc(j, k, i) + cc(k, i, j));
            }
        }
    }
    let nabla = |i: usize, j: usize| -> DVector<f64> {
        DVector::from_iterator(n, (0..n).map(|k| gamma[(i * n + j) * n + k]))
    };
    // nabla_{sum_k a_k u_k} v, for v given by frame coefficients
    let nabla_vec = |a: usize, v: &DVector<f64>| -> DVector<f64> {
        let mut out = DVector::zeros(n);
        for (k, &vk) in v.iter().enumerate() {
            if vk != 0.0 {
                out += nabla(a, k) * vk;
            }
        }
        out
    };

    // R(u_a, u_b) u_c = nabla_a nabla_b u_c - nabla_b nabla_a u_c - nabla_[a,b] u_c
    let curvature = |a: usize, b: usize, cidx: usize| -> DVector<f64> {
        let mut r = nabla_vec(a, &nabla(b, cidx)) - nabla_vec(b, &nabla(a, cidx));
        for k in 0..n {
            let ck = cc(a, b, k);
            if ck != 0.0 {
                r -= nabla(k, cidx) * ck;
            }
        }
        r
    };

    let mut ric = DMatrix::zeros(n, n);
    for b in 0..n {
        for cidx in 0..n {
            ric[(b, cidx)] = (0..n).map(|a| curvature(a, b, cidx)[a]).sum();
        }
    }
    let ric = (&ric + ric.transpose()) * 0.5;
    let eig = linalg::jacobi_eigen(&ric);
    Ok(RicciData { matrix: ric, eigenvalues: eig.values.iter().copied().collect() })
}
