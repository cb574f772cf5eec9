use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::echelon;
use super::{Matrix, Scalar, Vector};
use crate::error::{Error, Result};

/// A linear subspace of `Q^n`, stored as its reduced row-echelon basis.
///
/// The basis is the unique canonical representative, so derived equality is
/// subspace equality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "SubspaceRepr")]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

#[derive(Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    basis: Matrix,
}

impl From<SubspaceRepr> for Subspace {
    fn from(r: SubspaceRepr) -> Self {
        if r.basis.rows() == 0 {
            Subspace::zero(r.ambient)
        } else {
            Subspace::row_space(&r.basis)
        }
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Span of the given vectors, each of length `ambient`.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        Self::row_space(&Matrix::from_rows(ambient, vectors))
    }

    pub fn row_space(m: &Matrix) -> Self {
        let e = echelon(m);
        let rank = e.pivots.len();
        let rows: Vec<Vector> = (0..rank).map(|i| e.matrix.row(i)).collect();
        Subspace { ambient: m.cols(), basis: Matrix::from_rows(m.cols(), &rows) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in
    /// the subspace.
    pub fn coordinates(&self, v: &Vector) -> Option<Vec<Scalar>> {
        if v.len() != self.ambient {
            return None;
        }
        let coeffs: Vec<Scalar> = self.pivots().into_iter().map(|p| v[p].clone()).collect();
        let mut residual = v.clone();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                residual = residual.axpy(&-c, &self.basis.row(i));
            }
        }
        residual.is_zero().then_some(coeffs)
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_vectors().iter().all(|b| self.contains(b))
    }

    /// Vector with the given coordinates in the canonical basis.
    pub fn combine(&self, coeffs: &[Scalar]) -> Vector {
        assert_eq!(coeffs.len(), self.dim(), "coefficient count mismatch");
        let mut out = Vector::zeros(self.ambient);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.axpy(c, &self.basis.row(i));
            }
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Self::row_space(&self.basis.vstack(&other.basis)))
    }

    /// Vectors orthogonal (under the standard pairing) to every basis vector.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        intersect(self, other)
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.basis.row_slice(i).iter().position(|x| !x.is_zero()).expect("basis row is nonzero"))
            .collect()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient })
        }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: {:?})", self.dim(), self.ambient, self.basis)
    }
}

/// Null space `{x : m x = 0}`.
pub fn kernel(m: &Matrix) -> Subspace {
    let cols = m.cols();
    let e = echelon(m);
    let mut is_pivot = vec![false; cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<Vector> = (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = Vector::unit(cols, f);
            for (i, &p) in e.pivots.iter().enumerate() {
                x[p] = -&e.matrix[(i, f)];
            }
            x
        })
        .collect();
    Subspace::span(cols, &basis)
}

/// Largest subspace contained in both `a` and `b`, computed as the common
/// null space of both annihilators.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.check_ambient(b)?;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(a.ambient));
    }
    let ann = a.annihilator().basis.vstack(&b.annihilator().basis);
    Ok(kernel(&ann))
}

/// Some solution of `a x = rhs`, or [`Error::Inconsistent`].
pub fn solve_linear(a: &Matrix, rhs: &Vector) -> Result<Vector> {
    rhs.check_len(a.rows())?;
    let cols = a.cols();
    let aug = a.hstack(&Matrix::from_columns(a.rows(), std::slice::from_ref(rhs)));
    let e = echelon(&aug);
    if e.pivots.last() == Some(&cols) {
        return Err(Error::Inconsistent);
    }
    let mut x = Vector::zeros(cols);
    for (i, &p) in e.pivots.iter().enumerate() {
        x[p] = e.matrix[(i, cols)].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vector {
        Vector::unit(n, i)
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Matrix::zeros(3, 3)), Subspace::full(3));
        assert_eq!(kernel(&Matrix::identity(3)), Subspace::zero(3));
        let m = Matrix::from_ints(&[&[1, 1, 0]]);
        let k = kernel(&m);
        assert_eq!(k.dim(), 2);
        for b in k.basis_vectors() {
            assert!(m.mul_vec(&b).is_zero());
        }
    }

    #[test]
    fn intersect_examples() {
        let a = Subspace::span(3, &[e(3, 0), e(3, 1)]);
        let b = Subspace::span(3, &[e(3, 1), e(3, 2)]);
        assert_eq!(intersect(&a, &b).unwrap(), Subspace::span(3, &[e(3, 1)]));
        assert_eq!(intersect(&a, &a).unwrap(), a);
        assert!(intersect(&a, &Subspace::full(4)).is_err());
    }

    #[test]
    fn solve_examples() {
        let rhs = Vector::from_ints(&[3, -4]);
        assert_eq!(solve_linear(&Matrix::identity(2), &rhs).unwrap(), rhs);
        let a = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
        assert_eq!(solve_linear(&a, &Vector::from_ints(&[0, 1])), Err(Error::Inconsistent));
    }

    #[test]
    fn coordinates_round_trip() {
        let s = Subspace::span(4, &[Vector::from_ints(&[2, 4, 0, 2]), Vector::from_ints(&[0, 3, 3, 0])]);
        let v = Vector::from_ints(&[2, 7, 3, 2]);
        let c = s.coordinates(&v).unwrap();
        assert_eq!(s.combine(&c), v);
        assert!(!s.contains(&e(4, 3)));
    }

    #[test]
    fn json_round_trip_restores_pivots() {
        let s = Subspace::span(3, &[Vector::from_ints(&[0, 2, 4])]);
        let back: Subspace = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back.basis(), s.basis());
        assert!(back.contains(&Vector::from_ints(&[0, 1, 2])));
    }
}
