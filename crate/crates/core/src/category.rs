//! The product functor on pairs of invertible maps, the recovery functor on
//! cone-preserving isomorphisms, and the comparison maps between them.
//!
//! `Ψ` identifies a hidden factor with the recovered sheet through the base
//! point (`α -> α ⊗ β0`, `β -> α0 ⊗ β`), and `Φ` identifies the product of
//! the recovered sheets with the ambient space. Both commute with morphisms
//! exactly once base points are matched; without base points the pair
//! `(g, h)` is only determined up to `(λ g, h / λ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::Sheet;
use crate::ratlin::{solve_linear, Matrix, Scalar, Subspace, Vector};
use crate::reconstruct::{commutation, Reconstruction};
use crate::tensor_space::TensorSpaceInstance;

/// A pair of invertible maps `g` on the first factor and `h` on the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VecPairMorphism {
    pub g: Matrix,
    pub h: Matrix,
}

impl VecPairMorphism {
    pub fn new(g: Matrix, h: Matrix) -> Result<Self> {
        if !g.is_square() || !h.is_square() {
            return Err(Error::ShapeMismatch);
        }
        if g.rank() != g.rows() || h.rank() != h.rows() {
            return Err(Error::RankDeficient);
        }
        Ok(VecPairMorphism { g, h })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        VecPairMorphism { g: Matrix::identity(m), h: Matrix::identity(n) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &VecPairMorphism) -> Result<Self> {
        if self.g.cols() != other.g.rows() || self.h.cols() != other.h.rows() {
            return Err(Error::ShapeMismatch);
        }
        Ok(VecPairMorphism { g: self.g.mul(&other.g), h: self.h.mul(&other.h) })
    }

    /// `(λ g, h / λ)`, which has the same tensor product.
    pub fn rebalanced(&self, lambda: &Scalar) -> Result<Self> {
        let inv = lambda.recip().ok_or(Error::PreconditionViolated("lambda must be nonzero"))?;
        Ok(VecPairMorphism { g: self.g.scale(lambda), h: self.h.scale(&inv) })
    }
}

/// A linear isomorphism between two instances, not yet certified to carry
/// one simple cone onto the other; see [`is_tvec_morphism`].
#[derive(Clone, Debug)]
pub struct TvecMorphism<'a> {
    source: &'a TensorSpaceInstance,
    target: &'a TensorSpaceInstance,
    map: Matrix,
}

impl<'a> TvecMorphism<'a> {
    pub fn new(source: &'a TensorSpaceInstance, target: &'a TensorSpaceInstance, map: Matrix) -> Result<Self> {
        if map.rows() != target.dim() || map.cols() != source.dim() {
            return Err(Error::ShapeMismatch);
        }
        Ok(TvecMorphism { source, target, map })
    }

    pub fn identity(inst: &'a TensorSpaceInstance) -> Self {
        TvecMorphism { source: inst, target: inst, map: Matrix::identity(inst.dim()) }
    }

    pub fn source(&self) -> &'a TensorSpaceInstance {
        self.source
    }

    pub fn target(&self) -> &'a TensorSpaceInstance {
        self.target
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        self.map.mul_vec(v)
    }

    /// `self ∘ other`; the target of `other` must be the source of `self`.
    pub fn compose(&self, other: &TvecMorphism<'a>) -> Result<TvecMorphism<'a>> {
        if other.target.dim() != self.source.dim() || other.target.quadrics() != self.source.quadrics() {
            return Err(Error::ShapeMismatch);
        }
        Ok(TvecMorphism { source: other.source, target: self.target, map: self.map.mul(&other.map) })
    }
}

/// `g ⊗ h` carried to the scrambled spaces: `S_b (g ⊗ h) S_a^-1`.
pub fn tensor_on_morphisms<'a>(
    a: &'a TensorSpaceInstance,
    b: &'a TensorSpaceInstance,
    pm: &VecPairMorphism,
) -> Result<TvecMorphism<'a>> {
    let shape = a.shape();
    if b.shape() != shape || pm.g.rows() != shape.m || pm.h.rows() != shape.n {
        return Err(Error::ShapeMismatch);
    }
    let map = b.hidden().scramble().mul(&pm.g.kron(&pm.h)).mul(a.hidden().scramble_inverse());
    TvecMorphism::new(a, b, map)
}

/// Whether `f` is invertible and carries the source cone onto the target
/// cone: every target quadric pulled back along `f` must lie in the span of
/// the source quadrics.
pub fn is_tvec_morphism(f: &TvecMorphism<'_>) -> bool {
    let (src, tgt) = (f.source, f.target);
    if src.dim() != tgt.dim() || f.map.rank() != src.dim() || src.quadrics().len() != tgt.quadrics().len() {
        return false;
    }
    if tgt.quadrics().is_empty() {
        return true;
    }
    let upper = |g: &Matrix| -> Vector {
        (0..g.rows()).flat_map(|i| (i..g.cols()).map(move |j| (i, j))).map(|(i, j)| g[(i, j)].clone()).collect()
    };
    let span: Vec<Vector> = src.quadrics().iter().map(|q| upper(q.gram())).collect();
    let span = Matrix::from_columns(span[0].len(), &span);
    tgt.quadrics().iter().all(|q| solve_linear(&span, &upper(q.pull_back(&f.map).gram())).is_ok())
}

/// The pointed pair of sheets `((W1, w0), (W2, w0))`.
pub fn d_on_objects<'r>(recon: &'r Reconstruction<'_>) -> ((&'r Sheet, &'r Vector), (&'r Sheet, &'r Vector)) {
    ((recon.w1(), recon.base_point()), (recon.w2(), recon.base_point()))
}

/// Restrictions of a morphism to the recovered sheets, in the canonical
/// sheet bases. With `swapped`, `f1` maps `W1` to the target `W2` and `f2`
/// maps `W2` to the target `W1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheetMaps {
    pub f1: Matrix,
    pub f2: Matrix,
    pub swapped: bool,
}

impl SheetMaps {
    /// `self ∘ other`.
    pub fn compose(&self, other: &SheetMaps) -> SheetMaps {
        let (f1, f2) = if other.swapped {
            (self.f2.mul(&other.f1), self.f1.mul(&other.f2))
        } else {
            (self.f1.mul(&other.f1), self.f2.mul(&other.f2))
        };
        SheetMaps { f1, f2, swapped: self.swapped != other.swapped }
    }
}

/// The recovery functor on a morphism whose map sends the source base point
/// to the target base point.
pub fn d_on_morphism(f: &TvecMorphism<'_>, rs: &Reconstruction<'_>, rt: &Reconstruction<'_>) -> Result<SheetMaps> {
    if f.apply(rs.base_point()) != *rt.base_point() {
        return Err(Error::PreconditionViolated("morphism must send base point to base point"));
    }
    sheet_maps(f, rs, rt)
}

fn sheet_maps(f: &TvecMorphism<'_>, rs: &Reconstruction<'_>, rt: &Reconstruction<'_>) -> Result<SheetMaps> {
    let restrict = |basis: &[Vector], to: &Subspace| -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = basis.iter().map(|b| to.coordinates(&f.apply(b)).map(Vector::new)).collect();
        cols.map(|c| Matrix::from_columns(to.dim(), &c))
    };
    let (t1, t2) = (rt.w1().subspace(), rt.w2().subspace());
    if let (Some(f1), Some(f2)) = (restrict(rs.basis_e(), t1), restrict(rs.basis_f(), t2)) {
        if f1.is_square() && f2.is_square() {
            return Ok(SheetMaps { f1, f2, swapped: false });
        }
    }
    if let (Some(f1), Some(f2)) = (restrict(rs.basis_e(), t2), restrict(rs.basis_f(), t1)) {
        if f1.is_square() && f2.is_square() {
            return Ok(SheetMaps { f1, f2, swapped: true });
        }
    }
    Err(Error::SheetNotPreserved)
}

/// `Ψ` for one instance: which recovered sheet holds `{α ⊗ β0}` (0 for `W1`),
/// and the coordinate matrices of `α -> α ⊗ β0` and `β -> α0 ⊗ β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psi {
    pub first_sheet: usize,
    pub p1: Matrix,
    pub p2: Matrix,
}

/// `Ψ` for a reconstruction whose base point is `α0 ⊗ β0` in hidden terms.
pub fn psi(recon: &Reconstruction<'_>, alpha0: &Vector, beta0: &Vector) -> Result<Psi> {
    let inst = recon.instance();
    let hidden = inst.hidden();
    let shape = hidden.shape();
    if hidden.embed(alpha0, beta0)? != *recon.base_point() {
        return Err(Error::PreconditionViolated("factors must multiply to the base point"));
    }
    let left: Vec<Vector> =
        (0..shape.m).map(|i| hidden.embed(&Vector::unit(shape.m, i), beta0)).collect::<Result<_>>()?;
    let right: Vec<Vector> =
        (0..shape.n).map(|j| hidden.embed(alpha0, &Vector::unit(shape.n, j))).collect::<Result<_>>()?;
    let sheets = [recon.w1().subspace(), recon.w2().subspace()];
    let coords = |to: &Subspace, vs: &[Vector]| -> Option<Matrix> {
        let cols: Option<Vec<Vector>> = vs.iter().map(|v| to.coordinates(v).map(Vector::new)).collect();
        cols.map(|c| Matrix::from_columns(to.dim(), &c))
    };
    for first_sheet in 0..2 {
        if let (Some(p1), Some(p2)) = (coords(sheets[first_sheet], &left), coords(sheets[1 - first_sheet], &right)) {
            if p1.is_square() && p2.is_square() {
                return Ok(Psi { first_sheet, p1, p2 });
            }
        }
    }
    Err(Error::Mismatch("hidden sheets do not match the recovered sheets".into()))
}

/// Whether `D(F) ∘ Ψ_a = Ψ_b ∘ (g, h)` on both legs.
pub fn psi_commutes(d: &SheetMaps, psi_a: &Psi, psi_b: &Psi, pm: &VecPairMorphism) -> bool {
    let maps = [&d.f1, &d.f2];
    let leg = |sheet_a: usize| -> (&Matrix, usize) { (maps[sheet_a], if d.swapped { 1 - sheet_a } else { sheet_a }) };
    let (d1, to1) = leg(psi_a.first_sheet);
    let (d2, to2) = leg(1 - psi_a.first_sheet);
    to1 == psi_b.first_sheet
        && to2 == 1 - psi_b.first_sheet
        && d1.mul(&psi_a.p1) == psi_b.p1.mul(&pm.g)
        && d2.mul(&psi_a.p2) == psi_b.p2.mul(&pm.h)
}

/// Naturality of `Ψ` for `(g, h)`: the target base point must be
/// `g α0 ⊗ h β0` where `α0 ⊗ β0` is the source base point.
pub fn check_psi_naturality(ra: &Reconstruction<'_>, rb: &Reconstruction<'_>, pm: &VecPairMorphism) -> Result<bool> {
    let (a, b) = (ra.instance(), rb.instance());
    let (alpha0, beta0) = a.hidden().factor(ra.base_point())?.ok_or(Error::NotSimple)?;
    let (alpha0_b, beta0_b) = (pm.g.mul_vec(&alpha0), pm.h.mul_vec(&beta0));
    let f = tensor_on_morphisms(a, b, pm)?;
    let d = d_on_morphism(&f, ra, rb)?;
    let psi_a = psi(ra, &alpha0, &beta0)?;
    let psi_b = psi(rb, &alpha0_b, &beta0_b)?;
    Ok(psi_commutes(&d, &psi_a, &psi_b, pm))
}

/// The scalar `c` with `F Φ_s = c Φ_t (f1 ⊗ f2)`, or `None` if the two sides
/// are not proportional. `F` need only send the source base point onto the
/// target base ray.
pub fn phi_naturality_scalar(
    f: &TvecMorphism<'_>,
    rs: &Reconstruction<'_>,
    rt: &Reconstruction<'_>,
) -> Result<Option<Scalar>> {
    if f.apply(rs.base_point()).ratio_to(rt.base_point()).is_none() {
        return Err(Error::PreconditionViolated("morphism must send base point onto the target base ray"));
    }
    let d = sheet_maps(f, rs, rt)?;
    let coeff = if d.swapped {
        let (r, c) = rs.sheet_dims();
        d.f2.kron(&d.f1).mul(&commutation(r, c))
    } else {
        d.f1.kron(&d.f2)
    };
    let lhs = f.map.mul(rs.phi());
    let rhs = rt.phi().mul(&coeff);
    Ok(lhs.flatten().ratio_to(&rhs.flatten()))
}

/// Naturality of `Φ`: `F Φ_s = Φ_t (f1 ⊗ f2)` exactly, for a base-point
/// preserving `F`.
pub fn check_phi_naturality(f: &TvecMorphism<'_>, rs: &Reconstruction<'_>, rt: &Reconstruction<'_>) -> Result<bool> {
    d_on_morphism(f, rs, rt)?;
    Ok(phi_naturality_scalar(f, rs, rt)? == Some(Scalar::one()))
}

/// `(g, h)` and `(λ g, h / λ)` have the same tensor product, while the pairs
/// differ whenever `λ != 1`.
pub fn gl1_demo(
    a: &TensorSpaceInstance,
    b: &TensorSpaceInstance,
    pm: &VecPairMorphism,
    lambda: &Scalar,
) -> Result<bool> {
    let other = pm.rebalanced(lambda)?;
    let same_image = tensor_on_morphisms(a, b, pm)?.map == tensor_on_morphisms(a, b, &other)?.map;
    let pairs_differ = other != *pm;
    Ok(same_image && (pairs_differ || lambda.is_one()))
}
