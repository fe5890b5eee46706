//! Random instance generators shared by the acceptance and property tests.
#![allow(dead_code)]

use homgeo::lie::{LieAlgebra, ReductiveSpace, StructureEntry};
use homgeo::metric::InnerProduct;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_vec<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

pub fn normal_mat<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_iterator(n, n, (0..n * n).map(|_| StandardNormal.sample(rng)))
}

/// `A A^T / n + I / 2`: eigenvalues bounded below by 1/2.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> InnerProduct {
    let a = normal_mat(rng, n);
    let g = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.5;
    InnerProduct::new((&g + g.transpose()) * 0.5).expect("SPD by construction")
}

/// A well-conditioned change of basis `I + 0.3 N`, redrawn until its
/// smallest singular value exceeds 0.3.
pub fn random_basis_change<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let p = DMatrix::identity(n, n) + normal_mat(rng, n) * 0.3;
        let sv = p.clone().svd(false, false).singular_values;
        if sv.min() > 0.3 {
            return p;
        }
    }
}

fn entries(list: &[(usize, usize, usize, f64)]) -> Vec<StructureEntry> {
    list.iter().map(|&(i, j, k, c)| StructureEntry { i, j, k, c }).collect()
}

/// `[e1, e2] = e3`, `[e1, e3] = e4`.
pub fn filiform4() -> LieAlgebra {
    LieAlgebra::new(4, &entries(&[(0, 1, 2, 1.0), (0, 2, 3, 1.0)])).unwrap()
}

/// `R x_A R^{n-1}`: `[e1, e_j] = sum_k A[k][j] e_k` for `j >= 2`.
pub fn semidirect(a: &DMatrix<f64>) -> LieAlgebra {
    let n = a.nrows() + 1;
    let mut list = Vec::new();
    for j in 0..a.ncols() {
        for k in 0..a.nrows() {
            if a[(k, j)] != 0.0 {
                list.push((0, j + 1, k + 1, a[(k, j)]));
            }
        }
    }
    LieAlgebra::new(n, &entries(&list)).unwrap()
}

pub fn milnor(p: [f64; 4]) -> LieAlgebra {
    LieAlgebra::new(3, &entries(&[(0, 1, 1, p[0]), (0, 1, 2, p[1]), (0, 2, 1, p[2]), (0, 2, 2, p[3])])).unwrap()
}

/// One of the base algebras of dimension 2 to 5.
pub fn base_algebra<R: Rng>(rng: &mut R) -> LieAlgebra {
    match rng.random_range(0..12) {
        0 => LieAlgebra::abelian(rng.random_range(2..=5)),
        1 => LieAlgebra::heisenberg(),
        2 => LieAlgebra::heisenberg().direct_sum(&LieAlgebra::abelian(rng.random_range(1..=2))),
        3 => filiform4(),
        4 => LieAlgebra::so3(),
        5 => LieAlgebra::sl2(),
        6 => LieAlgebra::so3().direct_sum(&LieAlgebra::abelian(rng.random_range(1..=2))),
        7 => LieAlgebra::sl2().direct_sum(&LieAlgebra::abelian(1)),
        _ => {
            let n = rng.random_range(1..=4);
            semidirect(&normal_mat(rng, n))
        }
    }
}

/// A base algebra written in a random basis.
pub fn random_algebra<R: Rng>(rng: &mut R) -> LieAlgebra {
    let a = base_algebra(rng);
    let p = random_basis_change(rng, a.dim());
    a.change_basis(&p).unwrap()
}

pub fn random_group<R: Rng>(rng: &mut R) -> ReductiveSpace {
    ReductiveSpace::lie_group(random_algebra(rng))
}

/// A vector `y` with `<x, y> >= min_cos |x| |y|`, unit in `ip`.
pub fn admissible<R: Rng>(rng: &mut R, ip: &InnerProduct, x: &DVector<f64>, min_cos: f64) -> DVector<f64> {
    let xn = ip.norm(x);
    loop {
        let y = normal_vec(rng, x.len());
        let y = &y / ip.norm(&y);
        let c = ip.inner(x, &y) / xn;
        if c >= min_cos {
            return y;
        }
        if -c >= min_cos {
            return -y;
        }
    }
}

/// Relative closeness of two matrices.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / a.amax().max(b.amax()).max(f64::MIN_POSITIVE)
}
