//! Recovery of the two tensor factors from the simple cone alone.
//!
//! The sheets `W1`, `W2` through a base point `w0` stand in for the unknown
//! factors. The derived product `w1 ⊗̄ w2` is the fourth corner of the square
//! `[[w0, w2], [w1, ?]]`, and the products of basis vectors give a basis
//! `E_jk` of `V`. Writing a vector in that basis yields its coefficient
//! matrix; simple vectors are exactly those with rank at most one.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{normal_space, sheets_through, Sheet};
use crate::ratlin::{Matrix, Scalar, Subspace, Vector};
use crate::squares::complete_with_normals;
use crate::tensor_space::{split_rank_one, TensorSpaceInstance};

/// Recovered factor spaces with the derived product and its matrix `Φ`.
#[derive(Clone)]
pub struct Reconstruction<'a> {
    inst: &'a TensorSpaceInstance,
    w0: Vector,
    w1: Sheet,
    w2: Sheet,
    basis_e: Vec<Vector>,
    basis_f: Vec<Vector>,
    phi: Matrix,
    phi_inverse: Matrix,
    samples_used: usize,
}

impl PartialEq for Reconstruction<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.w0 == other.w0 && self.w1 == other.w1 && self.w2 == other.w2 && self.phi == other.phi
    }
}

impl fmt::Debug for Reconstruction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reconstruction")
            .field("w0", &self.w0)
            .field("w1", &self.w1)
            .field("w2", &self.w2)
            .field("phi", &self.phi)
            .finish()
    }
}

/// Finds `W1`, `W2` through `w0` (or the instance base point, or a fresh
/// sample) and builds `Φ`.
///
/// `W1` is the sheet of dimension `m` and `W2` the one of dimension `n`; for
/// `m = n` the canonical sheet order decides. Shapes without quadrics skip
/// the search: `W1` is the whole space and `W2` the line through `w0`.
pub fn recover_factors<'a, R: Rng + ?Sized>(
    inst: &'a TensorSpaceInstance,
    rng: &mut R,
    w0: Option<&Vector>,
) -> Result<Reconstruction<'a>> {
    let w0 = match w0.or(inst.base_point()) {
        Some(v) => {
            if v.len() != inst.dim() {
                return Err(Error::DimensionMismatch { expected: inst.dim(), found: v.len() });
            }
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            if !inst.is_simple(v)? {
                return Err(Error::NotSimple);
            }
            v.clone()
        }
        None => inst.sample_simple(rng),
    };

    let shape = inst.shape();
    let line = Subspace::span(inst.dim(), std::slice::from_ref(&w0));
    let (w1, w2, samples_used) = if inst.quadrics().is_empty() {
        let full = Sheet::certify(inst, Subspace::full(inst.dim()))?;
        (full, Sheet::certify(inst, line)?, 0)
    } else {
        let pair = sheets_through(inst, &w0, rng)?;
        if pair.first.dim() == shape.m {
            (pair.first, pair.second, pair.samples_used)
        } else {
            (pair.second, pair.first, pair.samples_used)
        }
    };

    let basis_e = w1.subspace().basis_vectors();
    let basis_f = w2.subspace().basis_vectors();
    let mut recon = Reconstruction {
        inst,
        w0,
        w1,
        w2,
        basis_e,
        basis_f,
        phi: Matrix::zeros(0, 0),
        phi_inverse: Matrix::zeros(0, 0),
        samples_used,
    };
    recon.phi = recon.phi_from_bases(&recon.basis_e, &recon.basis_f)?;
    recon.phi_inverse = recon.phi.inverse()?;
    Ok(recon)
}

/// A factor vector ready for repeated products: its primitive integer
/// multiple, the scale back to the original, and its normal space.
struct Prepared {
    scale: Scalar,
    vector: Vector,
    along_w0: Option<Scalar>,
    normal: Option<Subspace>,
}

impl<'a> Reconstruction<'a> {
    pub fn instance(&self) -> &'a TensorSpaceInstance {
        self.inst
    }

    pub fn base_point(&self) -> &Vector {
        &self.w0
    }

    pub fn w1(&self) -> &Sheet {
        &self.w1
    }

    pub fn w2(&self) -> &Sheet {
        &self.w2
    }

    pub fn basis_e(&self) -> &[Vector] {
        &self.basis_e
    }

    pub fn basis_f(&self) -> &[Vector] {
        &self.basis_f
    }

    /// Columns `E_jk = e_j ⊗̄ f_k` in lexicographic `(j, k)` order.
    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn phi_inverse(&self) -> &Matrix {
        &self.phi_inverse
    }

    /// The vectors `E_jk`; all of them are simple.
    pub fn special_basis(&self) -> Vec<Vector> {
        self.phi.column_vectors()
    }

    pub fn samples_used(&self) -> usize {
        self.samples_used
    }

    pub fn sheet_dims(&self) -> (usize, usize) {
        (self.w1.dim(), self.w2.dim())
    }

    /// The derived product `w1 ⊗̄ w2`, pointed so that `w0 ⊗̄ w2 = w2` and
    /// `w1 ⊗̄ w0 = w1`.
    pub fn bar_tensor(&self, w1: &Vector, w2: &Vector) -> Result<Vector> {
        let e = self.prepare(w1, &self.w1)?;
        let f = self.prepare(w2, &self.w2)?;
        self.product(&e, &f)
    }

    fn prepare(&self, v: &Vector, sheet: &Sheet) -> Result<Prepared> {
        if !sheet.contains(v) {
            return Err(Error::MembershipViolated);
        }
        let (scale, vector) = v.primitive();
        let along_w0 = vector.ratio_to(&self.w0);
        let normal = if along_w0.is_none() { Some(normal_space(self.inst, &vector)?) } else { None };
        Ok(Prepared { scale, vector, along_w0, normal })
    }

    /// Completes the square on primitive representatives, then rescales.
    /// Membership in the two certified sheets already guarantees every
    /// precondition of the square, so the completion runs unverified.
    fn product(&self, e: &Prepared, f: &Prepared) -> Result<Vector> {
        let product = match (&e.along_w0, &f.along_w0, &e.normal, &f.normal) {
            (Some(lambda), _, _, _) => f.vector.scale(lambda),
            (_, Some(mu), _, _) => e.vector.scale(mu),
            (None, None, Some(ne), Some(nf)) => {
                complete_with_normals(self.inst, &self.w0, &f.vector, &e.vector, nf, ne, false)?.d
            }
            _ => unreachable!("normal spaces exist off the base ray"),
        };
        Ok(product.scale(&(&e.scale * &f.scale)))
    }

    /// `Φ` rebuilt from the given bases of `W1` and `W2`.
    ///
    /// Each basis vector is replaced by its primitive integer multiple and its
    /// normal space computed once; bilinearity restores the scale.
    pub fn phi_from_bases(&self, basis_e: &[Vector], basis_f: &[Vector]) -> Result<Matrix> {
        let es = basis_e.iter().map(|e| self.prepare(e, &self.w1)).collect::<Result<Vec<_>>>()?;
        let fs = basis_f.iter().map(|f| self.prepare(f, &self.w2)).collect::<Result<Vec<_>>>()?;
        let mut columns = Vec::with_capacity(es.len() * fs.len());
        for e in &es {
            for f in &fs {
                columns.push(self.product(e, f)?);
            }
        }
        let phi = Matrix::from_columns(self.inst.dim(), &columns);
        if phi.rank() != self.inst.dim() {
            return Err(Error::RankDeficient);
        }
        Ok(phi)
    }

    /// Coefficient matrix of `v` in the basis `E_jk`, of size
    /// `dim W1 x dim W2`.
    pub fn coefficients(&self, v: &Vector) -> Result<Matrix> {
        if v.len() != self.inst.dim() {
            return Err(Error::DimensionMismatch { expected: self.inst.dim(), found: v.len() });
        }
        let (r, c) = self.sheet_dims();
        Ok(self.phi_inverse.mul_vec(v).reshape(r, c))
    }

    /// The vector whose coefficient matrix is `coeffs`.
    pub fn from_coefficients(&self, coeffs: &Matrix) -> Result<Vector> {
        let (r, c) = self.sheet_dims();
        if coeffs.rows() != r || coeffs.cols() != c {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.phi.mul_vec(&coeffs.flatten()))
    }

    /// Splits a simple vector as `w1 ⊗̄ w2`, with the leading coefficient of
    /// `w1` (in `basis_e`) equal to one. Zero splits as `(0, 0)`.
    pub fn factorize_simple(&self, v: &Vector) -> Result<(Vector, Vector)> {
        if !self.inst.is_simple(v)? {
            return Err(Error::NotSimple);
        }
        let coeffs = self.coefficients(v)?;
        let (c, r) = split_rank_one(&coeffs).ok_or_else(|| Error::RankViolation(coeffs.rank()))?;
        Ok((combine(&self.basis_e, &c, v.len()), combine(&self.basis_f, &r, v.len())))
    }

    /// Rank of the coefficient matrix: the least number of simple vectors
    /// summing to `v`.
    pub fn tensor_rank(&self, v: &Vector) -> Result<usize> {
        Ok(self.coefficients(v)?.rank())
    }
}

fn combine(basis: &[Vector], coeffs: &Vector, len: usize) -> Vector {
    let mut out = Vector::zeros(len);
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        if !c.is_zero() {
            out = out.axpy(c, b);
        }
    }
    out
}

/// Sheets of the hidden factorization through a simple `w0 = α0 ⊗ β0`:
/// `{α ⊗ β0}` and `{α0 ⊗ β}`, plus the factors `(α0, β0)`.
pub fn hidden_sheets(inst: &TensorSpaceInstance, w0: &Vector) -> Result<(Subspace, Subspace, Vector, Vector)> {
    let hidden = inst.hidden();
    let shape = hidden.shape();
    let (alpha0, beta0) = hidden.factor(w0)?.ok_or(Error::NotSimple)?;
    if alpha0.is_zero() {
        return Err(Error::ZeroVector);
    }
    let h1: Vec<Vector> =
        (0..shape.m).map(|i| hidden.embed(&Vector::unit(shape.m, i), &beta0)).collect::<Result<_>>()?;
    let h2: Vec<Vector> =
        (0..shape.n).map(|j| hidden.embed(&alpha0, &Vector::unit(shape.n, j))).collect::<Result<_>>()?;
    Ok((Subspace::span(inst.dim(), &h1), Subspace::span(inst.dim(), &h2), alpha0, beta0))
}

/// Outcome of comparing a reconstruction with the hidden factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub success: bool,
    pub m: usize,
    pub n: usize,
    /// `W1` matched the second hidden factor.
    pub swap: bool,
    /// First nonzero entry of the matrix taking hidden coordinates of the
    /// matched factor to coordinates in the recovered basis.
    pub lambda: Scalar,
    pub oracle_calls: u64,
    pub samples_used: usize,
    pub sheet_dims: [usize; 2],
}

/// Checks `Φ · (G ⊗ H) = scramble` (with the factor swap if `W1` matched the
/// second hidden factor), where `G`, `H` express the hidden factor bases in
/// the recovered bases.
pub fn verify_round_trip(inst: &TensorSpaceInstance, recon: &Reconstruction<'_>) -> Result<Report> {
    let hidden = inst.hidden();
    let shape = hidden.shape();
    let (h1, h2, alpha0, beta0) = hidden_sheets(inst, &recon.w0)?;
    let (s1, s2) = (recon.w1.subspace(), recon.w2.subspace());
    let swap = if *s1 == h1 && *s2 == h2 {
        false
    } else if *s1 == h2 && *s2 == h1 {
        true
    } else {
        return Err(Error::Mismatch("recovered sheets are not the hidden sheets through w0".into()));
    };

    let coords = |sheet: &Subspace, v: &Vector| -> Result<Vector> {
        sheet
            .coordinates(v)
            .map(Vector::new)
            .ok_or_else(|| Error::Mismatch("hidden vector outside its recovered sheet".into()))
    };
    let g_cols: Vec<Vector> = (0..shape.m)
        .map(|i| coords(if swap { s2 } else { s1 }, &hidden.embed(&Vector::unit(shape.m, i), &beta0)?))
        .collect::<Result<_>>()?;
    let h_cols: Vec<Vector> = (0..shape.n)
        .map(|j| coords(if swap { s1 } else { s2 }, &hidden.embed(&alpha0, &Vector::unit(shape.n, j))?))
        .collect::<Result<_>>()?;
    let g = Matrix::from_columns(shape.m, &g_cols);
    let h = Matrix::from_columns(shape.n, &h_cols);

    let change = if swap { h.kron(&g).mul(&commutation(shape.m, shape.n)) } else { g.kron(&h) };
    if recon.phi.mul(&change) != *hidden.scramble() {
        return Err(Error::Mismatch("derived product disagrees with the hidden tensor product".into()));
    }
    let lambda = g.flatten().first_nonzero().map(|p| g.flatten()[p].clone()).unwrap_or_else(Scalar::zero);
    let (d1, d2) = recon.sheet_dims();
    Ok(Report {
        success: true,
        m: shape.m,
        n: shape.n,
        swap,
        lambda,
        oracle_calls: inst.oracle_calls(),
        samples_used: recon.samples_used,
        sheet_dims: [d1, d2],
    })
}

/// Permutation taking row-major `vec(X)` to row-major `vec(X^T)` for `X` of
/// size `m x n`.
pub(crate) fn commutation(m: usize, n: usize) -> Matrix {
    let cols: Vec<Vector> = (0..m * n)
        .map(|p| {
            let (i, j) = (p / n, p % n);
            Vector::unit(m * n, j * m + i)
        })
        .collect();
    Matrix::from_columns(m * n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_space::{generate_instance, seeded_rng, FactorShape};

    #[test]
    fn identity_2x2_phi_is_unit() {
        let inst = TensorSpaceInstance::identity(FactorShape::new(2, 2).unwrap());
        let w0 = Vector::unit(4, 0);
        let recon = recover_factors(&inst, &mut seeded_rng(1), Some(&w0)).unwrap();
        assert_eq!(recon.basis_e(), &[Vector::unit(4, 0), Vector::unit(4, 2)]);
        assert_eq!(recon.basis_f(), &[Vector::unit(4, 0), Vector::unit(4, 1)]);
        assert_eq!(recon.phi(), &Matrix::identity(4));
        let report = verify_round_trip(&inst, &recon).unwrap();
        assert!(report.success && !report.swap);
    }

    #[test]
    fn pointed_stipulations() {
        let inst = generate_instance(FactorShape::new(2, 3).unwrap(), 5, true);
        let recon = recover_factors(&inst, &mut seeded_rng(5), None).unwrap();
        let w0 = recon.base_point().clone();
        assert_eq!(&w0, inst.base_point().unwrap());
        assert_eq!(recon.bar_tensor(&w0, &w0).unwrap(), w0);
        let w2 = recon.basis_f()[1].clone();
        let w1 = recon.basis_e()[1].clone();
        assert_eq!(recon.bar_tensor(&w0, &w2).unwrap(), w2);
        assert_eq!(recon.bar_tensor(&w1, &w0).unwrap(), w1);
        assert_eq!(recon.sheet_dims(), (2, 3));
    }

    #[test]
    fn trivial_shapes() {
        for (m, n) in [(1, 1), (5, 1), (1, 4)] {
            let inst = generate_instance(FactorShape::new(m, n).unwrap(), 9, true);
            let recon = recover_factors(&inst, &mut seeded_rng(0), None).unwrap();
            assert_eq!(recon.sheet_dims(), (m * n, 1));
            let report = verify_round_trip(&inst, &recon).unwrap();
            assert_eq!(report.swap, m == 1 && n > 1);
        }
    }

    #[test]
    fn factorize_round_trip_and_rank() {
        let inst = generate_instance(FactorShape::new(3, 3).unwrap(), 12, false);
        let mut rng = seeded_rng(12);
        let recon = recover_factors(&inst, &mut rng, None).unwrap();
        let s = inst.sample_simple(&mut rng);
        let t = inst.sample_simple(&mut rng);
        let (x, y) = recon.factorize_simple(&s).unwrap();
        assert_eq!(recon.bar_tensor(&x, &y).unwrap(), s);
        assert_eq!(recon.factorize_simple(&Vector::zeros(9)).unwrap(), (Vector::zeros(9), Vector::zeros(9)));
        assert_eq!(recon.tensor_rank(&s).unwrap(), 1);
        assert_eq!(recon.tensor_rank(&(&s + &t)).unwrap(), 2);
        assert_eq!(recon.factorize_simple(&(&s + &t)), Err(Error::NotSimple));
        assert!(verify_round_trip(&inst, &recon).unwrap().success);
    }

    #[test]
    fn membership_enforced() {
        let inst = generate_instance(FactorShape::new(2, 2).unwrap(), 3, true);
        let recon = recover_factors(&inst, &mut seeded_rng(3), None).unwrap();
        let outside = recon.basis_f().iter().find(|f| !recon.w1().contains(f)).unwrap().clone();
        assert_eq!(recon.bar_tensor(&outside, &outside), Err(Error::MembershipViolated));
    }

    #[test]
    fn commutation_transposes() {
        let x = Matrix::from_ints(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(commutation(2, 3).mul_vec(&x.flatten()), x.transpose().flatten());
    }
}
