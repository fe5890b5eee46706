//! Real Lie algebras given by structure constants, their Killing form, and
//! reductive decompositions g = h + m.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Jacobi identity tolerance (sup norm).
pub const JACOBI_TOL: f64 = 1e-10;
/// Rank tolerance for subspace bases.
pub const RANK_TOL: f64 = 1e-10;
/// Relative tolerance for Killing-form null spaces.
pub const KILLING_TOL: f64 = 1e-9;

/// One structure constant: `[e_i, e_j]` has coefficient `c` on `e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// A finite-dimensional real Lie algebra.
///
/// Only brackets `[e_i, e_j]` with `i < j` are stored; the opposite order is
/// synthesized, so antisymmetry cannot be violated. The dense table is kept
/// alongside for fast evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    basis_names: Vec<String>,
    entries: Vec<StructureEntry>,
    // table[(i * n + j) * n + k] = c_{ij}^k, full antisymmetric
    table: Vec<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from sparse entries. Entries with `i > j` are
    /// flipped (negating `c`), repeated entries are summed, and `i == j` is
    /// rejected unless `c == 0`.
    pub fn new(dim: usize, entries: &[StructureEntry]) -> Result<Self> {
        let names = (1..=dim).map(|i| format!("e{i}")).collect();
        Self::with_names(dim, names, entries)
    }

    pub fn with_names(dim: usize, basis_names: Vec<String>, entries: &[StructureEntry]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if basis_names.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: basis_names.len() });
        }
        let mut table = vec![0.0; dim * dim * dim];
        for e in entries {
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return Err(Error::InvalidInput(format!(
                    "structure entry ({}, {}, {}) out of range for dimension {dim}",
                    e.i, e.j, e.k
                )));
            }
            if !e.c.is_finite() {
                return Err(Error::InvalidInput("structure constant is not finite".into()));
            }
            if e.i == e.j {
                if e.c != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "[e{0}, e{0}] must vanish",
                        e.i + 1
                    )));
                }
                continue;
            }
            let (i, j, c) = if e.i < e.j { (e.i, e.j, e.c) } else { (e.j, e.i, -e.c) };
            table[(i * dim + j) * dim + e.k] += c;
            table[(j * dim + i) * dim + e.k] -= c;
        }
        let mut canonical = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in 0..dim {
                    let c = table[(i * dim + j) * dim + k];
                    if c != 0.0 {
                        canonical.push(StructureEntry { i, j, k, c });
                    }
                }
            }
        }
        Ok(Self { dim, basis_names, entries: canonical, table })
    }

    /// Builds the algebra from a dense `c[i][j][k]` table, reading only `i < j`.
    pub fn from_dense(dim: usize, c: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in 0..dim {
                    let v = c(i, j, k);
                    if v != 0.0 {
                        entries.push(StructureEntry { i, j, k, c: v });
                    }
                }
            }
        }
        Self::new(dim, &entries)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim, &[]).expect("abelian algebra is valid")
    }

    /// `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::new(3, &[StructureEntry { i: 0, j: 1, k: 2, c: 1.0 }]).expect("valid")
    }

    /// `[e1, e2] = e3`, `[e2, e3] = e1`, `[e3, e1] = e2`.
    pub fn so3() -> Self {
        Self::new(
            3,
            &[
                StructureEntry { i: 0, j: 1, k: 2, c: 1.0 },
                StructureEntry { i: 1, j: 2, k: 0, c: 1.0 },
                StructureEntry { i: 2, j: 0, k: 1, c: 1.0 },
            ],
        )
        .expect("valid")
    }

    /// sl(2, R) in the basis `h, e, f`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        Self::new(
            3,
            &[
                StructureEntry { i: 0, j: 1, k: 1, c: 2.0 },
                StructureEntry { i: 0, j: 2, k: 2, c: -2.0 },
                StructureEntry { i: 1, j: 2, k: 0, c: 1.0 },
            ],
        )
        .expect("valid")
    }

    /// Direct sum `self + other`, with `other`'s basis appended.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let n = self.dim;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|e| StructureEntry {
            i: e.i + n,
            j: e.j + n,
            k: e.k + n,
            c: e.c,
        }));
        let mut names = self.basis_names.clone();
        names.extend((n + 1..=n + other.dim).map(|i| format!("e{i}")));
        LieAlgebra::with_names(n + other.dim, names, &entries).expect("direct sum is valid")
    }

    /// Re-expresses the algebra in the basis given by the columns of `p`
    /// (new `e'_a = sum_i p[i][a] e_i`). Jacobi is preserved exactly in
    /// exact arithmetic.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim;
        if p.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.nrows() });
        }
        let pinv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("basis change is singular".into()))?;
        let cols: Vec<DVector<f64>> = linalg::matrix_columns(p);
        let mut entries = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                let w = pinv.clone() * self.bracket_unchecked(&cols[a], &cols[b]);
                for k in 0..n {
                    if w[k] != 0.0 {
                        entries.push(StructureEntry { i: a, j: b, k, c: w[k] });
                    }
                }
            }
        }
        LieAlgebra::with_names(n, self.basis_names.clone(), &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Canonical sparse entries with `i < j`.
    pub fn entries(&self) -> &[StructureEntry] {
        &self.entries
    }

    /// Structure constant `c_{ij}^k` (antisymmetric in `i, j`).
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.table[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    /// Largest absolute structure constant; sets the scale of numerical
    /// zero for Killing-form decisions.
    pub fn structure_scale(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, e| m.max(e.c.abs()))
    }

    /// Bilinear extension of the structure table.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.bracket_unchecked(u, v))
    }

    pub(crate) fn bracket_unchecked(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for e in &self.entries {
            let w = u[e.i] * v[e.j] - u[e.j] * v[e.i];
            if w != 0.0 {
                out[e.k] += e.c * w;
            }
        }
        out
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    /// Matrix of `ad u`, acting on column vectors.
    pub fn ad(&self, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_len(u)?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket_unchecked(u, &self.basis_vector(j));
            m.set_column(j, &col);
        }
        Ok(m)
    }

    /// Jacobi identity over all basis triples.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let basis: Vec<DVector<f64>> = (0..n).map(|i| self.basis_vector(i)).collect();
        let mut worst = 0.0;
        let mut triple = None;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let (a, b, c) = (&basis[i], &basis[j], &basis[k]);
                    let s = self.bracket_unchecked(a, &self.bracket_unchecked(b, c))
                        + self.bracket_unchecked(b, &self.bracket_unchecked(c, a))
                        + self.bracket_unchecked(c, &self.bracket_unchecked(a, b));
                    let v = linalg::max_abs(&s);
                    if v > worst {
                        worst = v;
                        triple = Some((i, j, k));
                    }
                }
            }
        }
        ValidationReport { max_violation: worst, worst_triple: triple, passed: worst <= JACOBI_TOL }
    }

    /// Killing form `K(u, v) = tr(ad u ad v)` together with its radical.
    pub fn killing_form(&self) -> KillingForm {
        let n = self.dim;
        let ads: Vec<DMatrix<f64>> =
            (0..n).map(|i| self.ad(&self.basis_vector(i)).expect("basis vector")).collect();
        let mut k = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = (&ads[a] * &ads[b]).trace();
                k[(a, b)] = v;
                k[(b, a)] = v;
            }
        }
        let zero = self.killing_zero_threshold(&k);
        let radical = linalg::null_space(&k, zero);
        KillingForm { matrix: k, radical, zero_threshold: zero }
    }

    fn killing_zero_threshold(&self, k: &DMatrix<f64>) -> f64 {
        let sigma_max = linalg::singular_values(k).first().copied().unwrap_or(0.0);
        let s = self.structure_scale();
        KILLING_TOL * sigma_max.max(s * s)
    }

    /// Cartan's criterion: the Killing form is nondegenerate.
    pub fn is_semisimple(&self) -> bool {
        let kf = self.killing_form();
        let sv = linalg::singular_values(&kf.matrix);
        match sv.last() {
            Some(&smallest) => smallest > kf.zero_threshold && kf.zero_threshold > 0.0,
            None => false,
        }
    }

    /// Span of `[a, b]` over the given spanning vectors.
    fn bracket_span(&self, left: &[DVector<f64>], right: &[DVector<f64>]) -> DMatrix<f64> {
        let mut vs = Vec::new();
        for a in left {
            for b in right {
                vs.push(self.bracket_unchecked(a, b));
            }
        }
        let scale = self.structure_scale().max(1.0);
        linalg::span_basis(self.dim, &vs, RANK_TOL * scale)
    }

    /// The derived series g, [g,g], [[g,g],[g,g]], ... as orthonormal bases,
    /// stopping once the dimension no longer drops.
    pub fn derived_series(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim;
        let mut series = vec![DMatrix::<f64>::identity(n, n)];
        loop {
            let last = series.last().expect("nonempty");
            let cols = linalg::matrix_columns(last);
            let next = self.bracket_span(&cols, &cols);
            let stop = next.ncols() == last.ncols();
            if !stop {
                series.push(next);
            }
            if stop || series.last().expect("nonempty").ncols() == 0 {
                break;
            }
        }
        series
    }

    /// Orthonormal basis of `[g, g]`.
    pub fn derived_algebra(&self) -> DMatrix<f64> {
        let basis: Vec<DVector<f64>> = (0..self.dim).map(|i| self.basis_vector(i)).collect();
        self.bracket_span(&basis, &basis)
    }

    /// Splits g into h and its Killing-orthogonal complement m.
    ///
    /// The complement basis is put in reduced row echelon form, so for
    /// `h = {0}` it is the standard basis.
    pub fn reductive_split(&self, h_basis: &[DVector<f64>]) -> Result<ReductiveSpace> {
        let n = self.dim;
        for h in h_basis {
            self.check_len(h)?;
        }
        if h_basis.is_empty() {
            return ReductiveSpace::new(self.clone(), vec![], (0..n).map(|i| self.basis_vector(i)).collect());
        }
        let kf = self.killing_form();
        let hm = linalg::columns_to_matrix(n, h_basis);
        let k_on_h = hm.transpose() * &kf.matrix * &hm;
        let smallest = linalg::singular_values(&k_on_h).last().copied().unwrap_or(0.0);
        if !(smallest > kf.zero_threshold.max(KILLING_TOL) && kf.zero_threshold > 0.0) {
            return Err(Error::DegenerateOnH { smallest_singular_value: smallest });
        }
        let ortho = hm.transpose() * &kf.matrix;
        let ns = linalg::null_space(&ortho, kf.zero_threshold.max(KILLING_TOL));
        let rows = linalg::rref_rows(&ns.transpose(), RANK_TOL);
        let m_basis: Vec<DVector<f64>> = (0..rows.nrows()).map(|r| rows.row(r).transpose()).collect();
        ReductiveSpace::new(self.clone(), h_basis.to_vec(), m_basis)
    }
}

/// Outcome of the Jacobi-identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub max_violation: f64,
    /// Zero-based basis indices of the worst triple, if any bracket is nonzero.
    pub worst_triple: Option<(usize, usize, usize)>,
    pub passed: bool,
}

/// Killing form and its radical.
#[derive(Debug, Clone)]
pub struct KillingForm {
    pub matrix: DMatrix<f64>,
    /// Orthonormal basis of rad K, as columns.
    pub radical: DMatrix<f64>,
    /// Singular values at or below this count as zero.
    pub zero_threshold: f64,
}

/// A Lie algebra with a reductive decomposition `g = h + m`.
///
/// Vectors of g are handled in the algebra's own coordinates. Components in
/// m are expressed in `m_basis` coordinates, which is also the basis the
/// inner product on m is written in.
#[derive(Debug, Clone)]
pub struct ReductiveSpace {
    algebra: LieAlgebra,
    h_basis: Vec<DVector<f64>>,
    m_basis: Vec<DVector<f64>>,
    // coordinates w.r.t. [h_basis | m_basis]
    inverse_basis: DMatrix<f64>,
    proj_h: DMatrix<f64>,
    proj_m: DMatrix<f64>,
}

impl ReductiveSpace {
    /// Checks that `h + m = g` is direct, `[h,h] <= h` and `[h,m] <= m`.
    pub fn new(algebra: LieAlgebra, h_basis: Vec<DVector<f64>>, m_basis: Vec<DVector<f64>>) -> Result<Self> {
        let n = algebra.dim();
        for v in h_basis.iter().chain(m_basis.iter()) {
            algebra.check_len(v)?;
        }
        if h_basis.len() + m_basis.len() != n {
            return Err(Error::NotComplementary);
        }
        let all: Vec<DVector<f64>> = h_basis.iter().chain(m_basis.iter()).cloned().collect();
        let b = linalg::columns_to_matrix(n, &all);
        let scale = b.norm().max(1.0);
        if linalg::rank(&b, RANK_TOL * scale) != n {
            return Err(Error::NotComplementary);
        }
        let inverse_basis = b.clone().try_inverse().ok_or(Error::NotComplementary)?;
        let dh = h_basis.len();
        let mut sel_h = DMatrix::zeros(n, n);
        let mut sel_m = DMatrix::zeros(n, n);
        for i in 0..n {
            if i < dh {
                sel_h[(i, i)] = 1.0;
            } else {
                sel_m[(i, i)] = 1.0;
            }
        }
        let proj_h = &b * sel_h * &inverse_basis;
        let proj_m = &b * sel_m * &inverse_basis;
        let space = Self { algebra, h_basis, m_basis, inverse_basis, proj_h, proj_m };

        let tol = RANK_TOL * space.algebra.structure_scale().max(1.0) * scale * scale;
        let mut sub = 0.0_f64;
        let mut inv = 0.0_f64;
        for a in &space.h_basis {
            for b in &space.h_basis {
                let w = space.algebra.bracket_unchecked(a, b);
                sub = sub.max(linalg::max_abs(&(&space.proj_m * &w)));
            }
            for z in &space.m_basis {
                let w = space.algebra.bracket_unchecked(a, z);
                inv = inv.max(linalg::max_abs(&(&space.proj_h * &w)));
            }
        }
        if sub > tol {
            return Err(Error::NotSubalgebra { violation: sub });
        }
        if inv > tol {
            return Err(Error::NotInvariantComplement { violation: inv });
        }
        Ok(space)
    }

    /// The Lie-group case `h = {0}`, `m = g` with the standard basis.
    pub fn lie_group(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        let m = (0..n).map(|i| algebra.basis_vector(i)).collect();
        Self::new(algebra, vec![], m).expect("trivial decomposition is valid")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn h_basis(&self) -> &[DVector<f64>] {
        &self.h_basis
    }

    pub fn m_basis(&self) -> &[DVector<f64>] {
        &self.m_basis
    }

    pub fn dim_g(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn projection_h(&self) -> &DMatrix<f64> {
        &self.proj_h
    }

    pub fn projection_m(&self) -> &DMatrix<f64> {
        &self.proj_m
    }

    /// Coordinates of the m-component of `v` in `m_basis`.
    pub fn m_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        let dh = self.h_basis.len();
        let all = &self.inverse_basis * v;
        all.rows(dh, self.dim_m()).clone_owned()
    }

    /// The g-vector with the given m-coordinates.
    pub fn from_m_coords(&self, c: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim_g());
        for (i, z) in self.m_basis.iter().enumerate() {
            out += z * c[i];
        }
        out
    }

    /// `[u, v]_m` in m-coordinates.
    pub fn bracket_m(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.m_coords(&self.algebra.bracket_unchecked(u, v))
    }

    /// Largest `|[h, X]|` over the h basis; zero means X is invariant under
    /// the identity component of H.
    pub fn invariance_violation(&self, x: &DVector<f64>) -> f64 {
        self.h_basis
            .iter()
            .map(|h| linalg::max_abs(&self.algebra.bracket_unchecked(h, x)))
            .fold(0.0, f64::max)
    }

    /// Infinitesimal Ad(H)-invariance `[h, X] = 0`.
    pub fn check_invariant_vector(&self, x: &DVector<f64>) -> bool {
        self.invariance_violation(x) <= JACOBI_TOL
    }

    /// Restriction of the Killing form to m, in m-coordinates.
    pub fn killing_on_m(&self, k: &KillingForm) -> DMatrix<f64> {
        let mb = linalg::columns_to_matrix(self.dim_g(), &self.m_basis);
        mb.transpose() * &k.matrix * mb
    }

    /// Largest `|K(h, m)|`; zero when m is the Killing complement of h.
    pub fn killing_orthogonality_violation(&self, k: &KillingForm) -> f64 {
        let mut worst = 0.0_f64;
        for h in &self.h_basis {
            for z in &self.m_basis {
                worst = worst.max((h.transpose() * &k.matrix * z)[0].abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn bracket_examples() {
        let ab = LieAlgebra::abelian(3);
        assert_eq!(ab.bracket(&v(&[1.0, 2.0, 3.0]), &v(&[-1.0, 0.5, 2.0])).unwrap(), v(&[0.0; 3]));
        let h = LieAlgebra::heisenberg();
        assert_eq!(h.bracket(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0])).unwrap(), v(&[0.0, 0.0, 1.0]));
        let so3 = LieAlgebra::so3();
        // [e1 + e2, e2 + e3] = [e1,e2] + [e1,e3] + [e2,e3] = e3 - e2 + e1
        let w = so3.bracket(&v(&[1.0, 1.0, 0.0]), &v(&[0.0, 1.0, 1.0])).unwrap();
        assert_eq!(w, v(&[1.0, -1.0, 1.0]));
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let so3 = LieAlgebra::so3();
        assert_eq!(
            so3.bracket(&v(&[1.0, 0.0]), &v(&[0.0, 1.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn reversed_entries_are_normalized() {
        let a = LieAlgebra::new(3, &[StructureEntry { i: 1, j: 0, k: 2, c: -1.0 }]).unwrap();
        assert_eq!(a, LieAlgebra::heisenberg());
        assert!(LieAlgebra::new(2, &[StructureEntry { i: 1, j: 1, k: 0, c: 1.0 }]).is_err());
    }

    #[test]
    fn jacobi_validation() {
        assert!(LieAlgebra::abelian(4).validate().passed);
        assert_eq!(LieAlgebra::abelian(4).validate().max_violation, 0.0);
        assert!(LieAlgebra::so3().validate().passed);
        let bad = LieAlgebra::new(
            3,
            &[
                StructureEntry { i: 0, j: 1, k: 2, c: 1.0 },
                StructureEntry { i: 0, j: 2, k: 2, c: 1.0 },
                StructureEntry { i: 1, j: 2, k: 0, c: 1.0 },
            ],
        )
        .unwrap();
        let r = bad.validate();
        assert!(!r.passed);
        // [e1,[e2,e3]] + [e2,[e3,e1]] + [e3,[e1,e2]] = -e1
        assert_eq!(r.max_violation, 1.0);
        assert_eq!(r.worst_triple, Some((0, 1, 2)));
    }

    #[test]
    fn killing_form_examples() {
        let k = LieAlgebra::abelian(3).killing_form();
        assert_eq!(k.matrix, DMatrix::zeros(3, 3));
        assert_eq!(k.radical.ncols(), 3);

        let k = LieAlgebra::heisenberg().killing_form();
        assert_eq!(k.matrix, DMatrix::zeros(3, 3));
        assert_eq!(k.radical.ncols(), 3);

        let k = LieAlgebra::so3().killing_form();
        assert_eq!(k.matrix, DMatrix::identity(3, 3) * -2.0);
        assert_eq!(k.radical.ncols(), 0);
    }

    #[test]
    fn semisimplicity() {
        assert!(LieAlgebra::so3().is_semisimple());
        assert!(LieAlgebra::sl2().is_semisimple());
        assert!(!LieAlgebra::heisenberg().is_semisimple());
        assert!(!LieAlgebra::abelian(2).is_semisimple());
    }

    #[test]
    fn derived_series_examples() {
        let s = LieAlgebra::abelian(3).derived_series();
        assert_eq!(s.iter().map(|b| b.ncols()).collect::<Vec<_>>(), vec![3, 0]);

        let s = LieAlgebra::heisenberg().derived_series();
        assert_eq!(s.iter().map(|b| b.ncols()).collect::<Vec<_>>(), vec![3, 1, 0]);
        assert!(linalg::distance_to_span(&s[1], &v(&[0.0, 0.0, 1.0])) < 1e-12);

        let s = LieAlgebra::so3().derived_series();
        assert_eq!(s.iter().map(|b| b.ncols()).collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn reductive_split_examples() {
        let so3 = LieAlgebra::so3();
        let s = so3.reductive_split(&[]).unwrap();
        assert_eq!(s.projection_m(), &DMatrix::identity(3, 3));
        assert_eq!(s.projection_h(), &DMatrix::zeros(3, 3));

        let s = so3.reductive_split(&[v(&[0.0, 0.0, 1.0])]).unwrap();
        assert_eq!(s.m_basis(), &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]);
        let p_sum = s.projection_h() + s.projection_m();
        assert!((p_sum - DMatrix::identity(3, 3)).norm() < 1e-12);

        let err = LieAlgebra::heisenberg().reductive_split(&[v(&[0.0, 0.0, 1.0])]).unwrap_err();
        assert!(matches!(err, Error::DegenerateOnH { .. }));
    }

    #[test]
    fn split_rejects_non_subalgebra() {
        // span{e1, e2} in so(3) is not closed: [e1, e2] = e3.
        let err = LieAlgebra::so3()
            .reductive_split(&[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])])
            .unwrap_err();
        assert!(matches!(err, Error::NotSubalgebra { .. }));
    }

    #[test]
    fn invariant_vector_examples() {
        let s = ReductiveSpace::lie_group(LieAlgebra::so3());
        assert!(s.check_invariant_vector(&v(&[0.3, -1.0, 2.0])));
        let s = LieAlgebra::so3().reductive_split(&[v(&[0.0, 0.0, 1.0])]).unwrap();
        assert!(!s.check_invariant_vector(&v(&[1.0, 0.0, 0.0])));
    }
}
