//! Test-only oracles built from the hidden factorization.
#![allow(dead_code)]

use tensorcone::ratlin::{Subspace, Vector};
use tensorcone::tensor_space::{FactorShape, TensorSpaceInstance};

pub fn shape(m: usize, n: usize) -> FactorShape {
    FactorShape::new(m, n).unwrap()
}

/// Rank at most one, decided from all 2x2 minors of the unscrambled matrix.
pub fn hidden_rank_le_one(inst: &TensorSpaceInstance, v: &Vector) -> bool {
    let FactorShape { m, n } = inst.shape();
    let x = inst.hidden().scramble_inverse().mul_vec(v);
    let at = |i: usize, j: usize| &x[i * n + j];
    (0..m).all(|i| (i + 1..m).all(|k| (0..n).all(|j| (j + 1..n).all(|l| at(i, j) * at(k, l) == at(i, l) * at(k, j)))))
}

/// Rank of the unscrambled `m x n` coefficient matrix of `v`.
pub fn hidden_rank(inst: &TensorSpaceInstance, v: &Vector) -> usize {
    let FactorShape { m, n } = inst.shape();
    inst.hidden().scramble_inverse().mul_vec(v).reshape(m, n).rank()
}

/// The image of `V1 ⊗ beta`.
pub fn left_sheet(inst: &TensorSpaceInstance, beta: &Vector) -> Subspace {
    let m = inst.shape().m;
    let vs: Vec<Vector> = (0..m).map(|i| inst.embed_simple(&Vector::unit(m, i), beta).unwrap()).collect();
    Subspace::span(inst.dim(), &vs)
}

/// The image of `alpha ⊗ V2`.
pub fn right_sheet(inst: &TensorSpaceInstance, alpha: &Vector) -> Subspace {
    let n = inst.shape().n;
    let vs: Vec<Vector> = (0..n).map(|j| inst.embed_simple(alpha, &Vector::unit(n, j)).unwrap()).collect();
    Subspace::span(inst.dim(), &vs)
}
