//! Tangent spaces, maximal linear sheets and the two foliations of the
//! simple cone.
//!
//! Sheets through a simple vector `v` are found by sampling. For a second
//! simple vector `s` in general position, the tangent spaces at `v` and `s`
//! meet in a plane, and on that plane the quadrics cut out exactly two rays:
//! one lying in each sheet through `v`. Collecting such rays and sorting them
//! with the sum test (`x + y` simple iff `x`, `y` share a sheet) grows both
//! sheets one dimension at a time.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ratlin::{intersect, kernel, rational_sqrt_exact, Matrix, Scalar, Subspace, Vector};
use crate::squares::complete_square;
use crate::tensor_space::TensorSpaceInstance;

/// A one-dimensional subspace, identified by its canonical generator
/// (leading coordinate one).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    subspace: Subspace,
}

impl Ray {
    pub fn new(v: &Vector) -> Result<Ray> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Ray { subspace: Subspace::span(v.len(), std::slice::from_ref(v)) })
    }

    pub fn generator(&self) -> Vector {
        self.subspace.basis().row(0)
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.subspace.contains(v)
    }
}

impl PartialOrd for Ray {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ray {
    fn cmp(&self, other: &Self) -> Ordering {
        self.subspace.basis().entries().cmp(other.subspace.basis().entries())
    }
}

/// A linear subspace certified to lie inside the simple cone.
///
/// The only way to build one is [`Sheet::certify`], so holding a `Sheet` is
/// the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sheet {
    subspace: Subspace,
}

impl Sheet {
    pub fn certify(inst: &TensorSpaceInstance, subspace: Subspace) -> Result<Sheet> {
        if subspace_in_s(inst, &subspace)? {
            Ok(Sheet { subspace })
        } else {
            Err(Error::Malformed("subspace is not contained in the simple cone".into()))
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.subspace.contains(v)
    }

    fn canonical_cmp(&self, other: &Sheet) -> Ordering {
        other.dim().cmp(&self.dim()).then_with(|| self.subspace.basis().entries().cmp(other.subspace.basis().entries()))
    }
}

/// The two sheets through a simple vector, ordered by dimension (descending)
/// and then by canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheetPair {
    pub first: Sheet,
    pub second: Sheet,
    pub through: Vector,
    /// Random simple vectors drawn while searching.
    pub samples_used: usize,
}

/// Whether the quadratic forms vanish identically on `u`, checked on a basis
/// through values and polarizations.
pub fn subspace_in_s(inst: &TensorSpaceInstance, u: &Subspace) -> Result<bool> {
    if u.ambient_dim() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: u.ambient_dim() });
    }
    inst.record_oracle_call();
    let basis = u.basis_vectors();
    for q in inst.quadrics() {
        for (i, bi) in basis.iter().enumerate() {
            let gb = q.doubled_polar_functional(bi);
            for bj in &basis[i..] {
                if !bj.dot(&gb).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Kernel of `w -> (B_k(v, w))_k`; has dimension `m + n - 1` at any nonzero
/// simple vector.
pub fn tangent_space(inst: &TensorSpaceInstance, v: &Vector) -> Result<Subspace> {
    Ok(kernel(&polar_rows(inst, v)?))
}

/// Span of the functionals `B_k(v, .)`: the annihilator of the tangent
/// space at `v`.
pub fn normal_space(inst: &TensorSpaceInstance, v: &Vector) -> Result<Subspace> {
    Ok(Subspace::row_space(&polar_rows(inst, v)?))
}

fn polar_rows(inst: &TensorSpaceInstance, v: &Vector) -> Result<Matrix> {
    v.check_len(inst.dim())?;
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let rows: Vec<Vector> = inst.quadrics().iter().map(|q| q.doubled_polar_functional(v)).collect();
    inst.record_oracle_call();
    if rows.iter().any(|r| !r.dot(v).is_zero()) {
        return Err(Error::NotSimple);
    }
    Ok(Matrix::from_rows(inst.dim(), &rows))
}

/// The two rays `R(alpha0 ⊗ b)` and `R(a ⊗ beta0)` for `v = alpha0 ⊗ beta0`
/// and `s = a ⊗ b`, computed from the quadrics alone and returned in
/// canonical order.
pub fn cross_rays(inst: &TensorSpaceInstance, v: &Vector, s: &Vector) -> Result<(Ray, Ray)> {
    cross_rays_from_normals(inst, &normal_space(inst, v)?, &normal_space(inst, s)?, true)
}

/// [`cross_rays`] given both normal spaces; the tangent spaces meet in the
/// common kernel.
///
/// With `verify` off, the first quadric not vanishing on the plane fixes the
/// rays; callers use this only when both points are known to be simple and in
/// general position, where every restricted quadric has the same two roots.
pub(crate) fn cross_rays_from_normals(
    inst: &TensorSpaceInstance,
    nv: &Subspace,
    ns: &Subspace,
    verify: bool,
) -> Result<(Ray, Ray)> {
    let plane = kernel(&nv.basis().vstack(ns.basis()));
    if plane.dim() != 2 {
        return Err(Error::Degenerate("tangent spaces do not meet in a plane"));
    }
    let d1 = plane.basis().row(0).primitive().1;
    let d2 = plane.basis().row(1).primitive().1;
    inst.record_oracle_call();

    // Restrictions Q(x d1 + y d2) = a x^2 + 2 b x y + c y^2.
    let mut common: Option<[Scalar; 3]> = None;
    for q in inst.quadrics() {
        let g1 = q.doubled_polar_functional(&d1);
        let g2 = q.doubled_polar_functional(&d2);
        let form = [d1.dot(&g1), d1.dot(&g2), d2.dot(&g2)];
        if form.iter().all(Scalar::is_zero) {
            continue;
        }
        match &common {
            None if !verify => {
                common = Some(form);
                break;
            }
            None => common = Some(form),
            Some(f) => {
                if !proportional3(f, &form) {
                    // gcd has degree < 2: fewer than two common rays.
                    return Err(Error::Degenerate("restricted quadrics share fewer than two roots"));
                }
            }
        }
    }
    let [a, b, c] = common.ok_or(Error::Degenerate("all quadrics vanish on the plane"))?;
    let disc = &b * &b - &a * &c;
    if disc.is_zero() || disc.is_negative() {
        return Err(Error::Degenerate("restricted form has no two distinct real roots"));
    }
    let root = rational_sqrt_exact(&disc).map_err(|_| Error::Degenerate("irrational roots"))?;
    let coords: [(Scalar, Scalar); 2] = if a.is_zero() {
        // y (2 b x + c y) = 0
        [(Scalar::one(), Scalar::zero()), (-&c, &b + &b)]
    } else {
        [(-&b + &root, a.clone()), (-&b - &root, a.clone())]
    };
    let mut rays = coords.iter().map(|(x, y)| Ray::new(&d1.scale(x).axpy(y, &d2))).collect::<Result<Vec<_>>>()?;
    rays.sort();
    let second = rays.pop().expect("two rays");
    let first = rays.pop().expect("two rays");
    Ok((first, second))
}

fn proportional3(f: &[Scalar; 3], g: &[Scalar; 3]) -> bool {
    (&f[0] * &g[1] == &f[1] * &g[0]) && (&f[0] * &g[2] == &f[2] * &g[0]) && (&f[1] * &g[2] == &f[2] * &g[1])
}

/// Sum test for two simple vectors lying in a common sheet.
pub fn same_sheet(inst: &TensorSpaceInstance, x: &Vector, y: &Vector) -> Result<bool> {
    y.check_len(x.len())?;
    inst.is_simple(&(x + y))
}

/// Sample budget used by [`sheets_through`]: `64 (m + n)` for an ambient
/// space of dimension `mn`, with `m + n` read off the tangent dimension.
pub fn default_sample_budget(tangent_dim: usize) -> usize {
    64 * (tangent_dim + 1)
}

/// Both maximal linear subspaces of the simple cone through `v`.
pub fn sheets_through<R: Rng + ?Sized>(inst: &TensorSpaceInstance, v: &Vector, rng: &mut R) -> Result<SheetPair> {
    sheets_through_with_budget(inst, v, rng, None)
}

pub fn sheets_through_with_budget<R: Rng + ?Sized>(
    inst: &TensorSpaceInstance,
    v: &Vector,
    rng: &mut R,
    budget: Option<usize>,
) -> Result<SheetPair> {
    if inst.quadrics().is_empty() {
        return Err(Error::TrivialShape);
    }
    if !inst.is_simple(v)? {
        return Err(Error::NotSimple);
    }
    let nv = normal_space(inst, v)?;
    let tangent_dim = inst.dim() - nv.dim();
    let target_sum = tangent_dim + 1;
    let budget = budget.unwrap_or_else(|| default_sample_budget(tangent_dim));
    let through = Subspace::span(inst.dim(), std::slice::from_ref(v));

    let mut seeds: Option<(Vector, Vector)> = None;
    let mut buckets = (through.clone(), through.clone());
    let mut samples = 0;
    while samples < budget {
        samples += 1;
        let s = inst.sample_simple(rng);
        let ns = match normal_space(inst, &s) {
            Ok(ns) => ns,
            Err(Error::ZeroVector) => continue,
            Err(e) => return Err(e),
        };
        let (r1, r2) = match cross_rays_from_normals(inst, &nv, &ns, true) {
            Ok(pair) => pair,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let (g1, g2) = (r1.generator(), r2.generator());
        match &seeds {
            None => {
                buckets.0 = buckets.0.sum(r1.subspace())?;
                buckets.1 = buckets.1.sum(r2.subspace())?;
                seeds = Some((g1, g2));
            }
            Some((seed1, seed2)) => {
                for g in [g1, g2] {
                    let in1 = same_sheet(inst, &g, seed1)?;
                    let in2 = same_sheet(inst, &g, seed2)?;
                    let bucket = match (in1, in2) {
                        (true, false) => &mut buckets.0,
                        (false, true) => &mut buckets.1,
                        _ => continue,
                    };
                    if !bucket.contains(&g) {
                        *bucket = bucket.sum(&Subspace::span(inst.dim(), std::slice::from_ref(&g)))?;
                    }
                }
            }
        }
        let (d1, d2) = (buckets.0.dim(), buckets.1.dim());
        if d1 + d2 > target_sum || d1 * d2 > inst.dim() {
            // A misfiled ray; start over.
            seeds = None;
            buckets = (through.clone(), through.clone());
            continue;
        }
        if d1 + d2 == target_sum && d1 * d2 == inst.dim() {
            match (Sheet::certify(inst, buckets.0.clone()), Sheet::certify(inst, buckets.1.clone())) {
                (Ok(a), Ok(b)) => {
                    let (first, second) = if a.canonical_cmp(&b) == Ordering::Greater { (b, a) } else { (a, b) };
                    return Ok(SheetPair { first, second, through: v.clone(), samples_used: samples });
                }
                _ => {
                    seeds = None;
                    buckets = (through.clone(), through.clone());
                }
            }
        }
    }
    Err(Error::RetryExhausted { samples })
}

/// Sheets are in the same foliation iff they coincide or meet only in zero.
pub fn same_foliation(m: &Sheet, n: &Sheet) -> Result<bool> {
    if m == n {
        return Ok(true);
    }
    match intersect(&m.subspace, &n.subspace)?.dim() {
        0 => Ok(true),
        1 => Ok(false),
        d => Err(Error::Malformed(format!("distinct sheets meet in dimension {d}"))),
    }
}

/// The linear isomorphism `M -> M'` that moves each ray `M ∩ N` to
/// `M' ∩ N`, normalized by `v0 -> v0p`, evaluated at `v`.
pub fn transport(
    inst: &TensorSpaceInstance,
    m: &Sheet,
    mp: &Sheet,
    v0: &Vector,
    v0p: &Vector,
    v: &Vector,
) -> Result<Vector> {
    if v0.is_zero() || v0p.is_zero() {
        return Err(Error::PreconditionViolated("reference vectors must be nonzero"));
    }
    if !m.contains(v0) || !m.contains(v) || !mp.contains(v0p) {
        return Err(Error::PreconditionViolated("vectors must lie in their sheets"));
    }
    if !same_foliation(m, mp)? {
        return Err(Error::PreconditionViolated("sheets belong to different foliations"));
    }
    if !same_sheet(inst, v0, v0p)? {
        return Err(Error::PreconditionViolated("reference vectors must share a cross sheet"));
    }
    Ok(complete_square(inst, v0, v0p, v)?.d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_space::{generate_instance, seeded_rng, FactorShape};

    fn ident(m: usize, n: usize) -> TensorSpaceInstance {
        TensorSpaceInstance::identity(FactorShape::new(m, n).unwrap())
    }

    fn e4(i: usize) -> Vector {
        Vector::unit(4, i)
    }

    #[test]
    fn tangent_single_minor() {
        let inst = ident(2, 2);
        let t = tangent_space(&inst, &e4(0)).unwrap();
        assert_eq!(t, Subspace::span(4, &[e4(0), e4(1), e4(2)]));
        assert_eq!(tangent_space(&inst, &Vector::zeros(4)), Err(Error::ZeroVector));
        assert_eq!(tangent_space(&inst, &Vector::from_ints(&[1, 0, 0, 1])), Err(Error::NotSimple));
    }

    #[test]
    fn tangent_dims_from_spin_example() {
        let mut rng = seeded_rng(0);
        for (m, n, want) in [(4, 3, 6), (2, 6, 7)] {
            let inst = generate_instance(FactorShape::new(m, n).unwrap(), 17, false);
            let v = inst.sample_simple(&mut rng);
            assert_eq!(tangent_space(&inst, &v).unwrap().dim(), want);
        }
    }

    #[test]
    fn cross_rays_by_hand() {
        let inst = ident(2, 2);
        let (r1, r2) = cross_rays(&inst, &e4(0), &e4(3)).unwrap();
        // Canonical order is lexicographic on generators: e3 < e2.
        assert_eq!(r1.generator(), e4(2));
        assert_eq!(r2.generator(), e4(1));
        let v = e4(0);
        assert!(matches!(cross_rays(&inst, &v, &v.scale(&Scalar::from(2))), Err(Error::Degenerate(_))));
    }

    #[test]
    fn same_sheet_examples() {
        let inst = generate_instance(FactorShape::new(3, 3).unwrap(), 2, false);
        let a = Vector::from_ints(&[1, 2, 3]);
        let a2 = Vector::from_ints(&[-4, 0, 1]);
        let b0 = Vector::from_ints(&[2, -1, 5]);
        let b = Vector::from_ints(&[0, 7, 1]);
        let x = inst.embed_simple(&a, &b0).unwrap();
        let y = inst.embed_simple(&a2, &b0).unwrap();
        assert!(same_sheet(&inst, &x, &y).unwrap());
        let cross = inst.embed_simple(&a2, &b).unwrap();
        assert!(!same_sheet(&inst, &x, &cross).unwrap());
        assert!(same_sheet(&inst, &x, &-&x).unwrap());
    }

    #[test]
    fn sheets_by_hand_2x2() {
        let inst = ident(2, 2);
        let mut rng = seeded_rng(3);
        let pair = sheets_through(&inst, &e4(0), &mut rng).unwrap();
        let mut got = [pair.first.subspace().clone(), pair.second.subspace().clone()];
        got.sort_by(|a, b| a.basis().entries().cmp(b.basis().entries()));
        let mut want = [Subspace::span(4, &[e4(0), e4(1)]), Subspace::span(4, &[e4(0), e4(2)])];
        want.sort_by(|a, b| a.basis().entries().cmp(b.basis().entries()));
        assert_eq!(got, want);
        assert!(!same_foliation(&pair.first, &pair.second).unwrap());
        assert!(same_foliation(&pair.first, &pair.first).unwrap());
    }

    #[test]
    fn trivial_shape_rejected() {
        let inst = ident(1, 4);
        let mut rng = seeded_rng(0);
        assert_eq!(sheets_through(&inst, &Vector::unit(4, 0), &mut rng), Err(Error::TrivialShape));
    }

    #[test]
    fn subspace_in_s_examples() {
        let inst = generate_instance(FactorShape::new(3, 2).unwrap(), 6, false);
        assert!(subspace_in_s(&inst, &Subspace::zero(6)).unwrap());
        let beta0 = Vector::from_ints(&[3, -1]);
        let sheet: Vec<Vector> = (0..3).map(|i| inst.embed_simple(&Vector::unit(3, i), &beta0).unwrap()).collect();
        assert!(subspace_in_s(&inst, &Subspace::span(6, &sheet)).unwrap());
        let mut rng = seeded_rng(1);
        let generic = [inst.sample_simple(&mut rng), inst.sample_simple(&mut rng)];
        assert!(!subspace_in_s(&inst, &Subspace::span(6, &generic)).unwrap());
    }

    #[test]
    fn transport_special_cases() {
        let inst = generate_instance(FactorShape::new(3, 3).unwrap(), 12, false);
        let alpha0 = Vector::from_ints(&[1, -2, 1]);
        let beta0 = Vector::from_ints(&[2, 1, 0]);
        let beta = Vector::from_ints(&[0, 1, 3]);
        let sheet = |b: &Vector| {
            let vs: Vec<Vector> = (0..3).map(|i| inst.embed_simple(&Vector::unit(3, i), b).unwrap()).collect();
            Sheet::certify(&inst, Subspace::span(9, &vs)).unwrap()
        };
        let (m, mp) = (sheet(&beta0), sheet(&beta));
        let v0 = inst.embed_simple(&alpha0, &beta0).unwrap();
        let v0p = inst.embed_simple(&alpha0, &beta).unwrap();
        assert_eq!(transport(&inst, &m, &mp, &v0, &v0p, &v0).unwrap(), v0p);
        let three = Scalar::from(3);
        assert_eq!(transport(&inst, &m, &mp, &v0, &v0p, &v0.scale(&three)).unwrap(), v0p.scale(&three));
        let a = Vector::from_ints(&[4, 0, -1]);
        let v = inst.embed_simple(&a, &beta0).unwrap();
        assert_eq!(transport(&inst, &m, &mp, &v0, &v0p, &v).unwrap(), inst.embed_simple(&a, &beta).unwrap());
        assert!(transport(&inst, &m, &mp, &v0, &v, &v).is_err());
    }
}
