mod common;

use common::shape;
use rand::Rng;
use tensorcone::category::{
    check_phi_naturality, check_psi_naturality, d_on_morphism, d_on_objects, gl1_demo, is_tvec_morphism,
    phi_naturality_scalar, psi, tensor_on_morphisms, SheetMaps, TvecMorphism, VecPairMorphism,
};
use tensorcone::ratlin::{Matrix, Scalar, Vector};
use tensorcone::reconstruct::{recover_factors, Reconstruction};
use tensorcone::tensor_space::{
    generate_instance, random_unimodular, seeded_rng, FactorShape, SeededRng, TensorSpaceInstance,
};
use tensorcone::Error;

fn random_pair(rng: &mut SeededRng, s: FactorShape) -> VecPairMorphism {
    VecPairMorphism::new(random_unimodular(rng, s.m), random_unimodular(rng, s.n)).unwrap()
}

/// A pointed source and a target pointed at the image of the source base
/// point under `pm`.
fn pointed_pair(s: FactorShape, seed: u64, pm: &VecPairMorphism) -> (TensorSpaceInstance, TensorSpaceInstance) {
    let a = generate_instance(s, seed, true);
    let (alpha0, beta0) = a.hidden().factor(a.base_point().unwrap()).unwrap().unwrap();
    let b = generate_instance(s, seed + 1000, false);
    let w = b.embed_simple(&pm.g.mul_vec(&alpha0), &pm.h.mul_vec(&beta0)).unwrap();
    (a, b.with_base_point(w).unwrap())
}

fn recon(inst: &TensorSpaceInstance, seed: u64) -> Reconstruction<'_> {
    recover_factors(inst, &mut seeded_rng(seed), None).unwrap()
}

/// Permutation of `Q^n ⊗ Q^n` exchanging the two factors.
fn factor_swap(n: usize) -> Matrix {
    let cols: Vec<Vector> = (0..n * n).map(|p| Vector::unit(n * n, (p % n) * n + p / n)).collect();
    Matrix::from_columns(n * n, &cols)
}

#[test]
fn identity_pair_gives_the_scramble_change() {
    let s = shape(2, 3);
    let a = generate_instance(s, 1, false);
    let b = generate_instance(s, 2, false);
    let f = tensor_on_morphisms(&a, &b, &VecPairMorphism::identity(2, 3)).unwrap();
    assert_eq!(f.map(), &b.hidden().scramble().mul(a.hidden().scramble_inverse()));
    assert!(is_tvec_morphism(&f));
}

#[test]
fn product_maps_preserve_the_cone() {
    let s = shape(3, 2);
    let mut rng = seeded_rng(3);
    let a = generate_instance(s, 3, false);
    let b = generate_instance(s, 4, false);
    for _ in 0..5 {
        let f = tensor_on_morphisms(&a, &b, &random_pair(&mut rng, s)).unwrap();
        assert!(is_tvec_morphism(&f));
        for _ in 0..10 {
            assert!(b.is_simple(&f.apply(&a.sample_simple(&mut rng))).unwrap());
        }
    }
}

#[test]
fn certification_rejects_generic_and_accepts_factor_swap() {
    let inst = generate_instance(shape(2, 2), 5, false);
    let mut rng = seeded_rng(5);
    let mut rejected = 0;
    for _ in 0..20 {
        let f = TvecMorphism::new(&inst, &inst, random_unimodular(&mut rng, 4)).unwrap();
        rejected += usize::from(!is_tvec_morphism(&f));
    }
    assert!(rejected >= 18);

    for n in [2, 3] {
        let inst = generate_instance(shape(n, n), 6, false);
        let swap = inst.hidden().scramble().mul(&factor_swap(n)).mul(inst.hidden().scramble_inverse());
        assert!(is_tvec_morphism(&TvecMorphism::new(&inst, &inst, swap).unwrap()));
    }
}

#[test]
fn recovery_functor_on_identity() {
    let inst = generate_instance(shape(2, 3), 7, true);
    let r = recon(&inst, 7);
    let ((w1, p1), (w2, p2)) = d_on_objects(&r);
    assert!(w1.contains(p1) && w2.contains(p2));
    let d = d_on_morphism(&TvecMorphism::identity(&inst), &r, &r).unwrap();
    assert_eq!(d, SheetMaps { f1: Matrix::identity(2), f2: Matrix::identity(3), swapped: false });
}

#[test]
fn recovery_functor_conjugates_the_pair() {
    let s = shape(2, 3);
    let mut rng = seeded_rng(8);
    for seed in 0..5 {
        let pm = random_pair(&mut rng, s);
        let (a, b) = pointed_pair(s, seed, &pm);
        let (ra, rb) = (recon(&a, seed), recon(&b, seed));
        let f = tensor_on_morphisms(&a, &b, &pm).unwrap();
        let d = d_on_morphism(&f, &ra, &rb).unwrap();
        assert!(!d.swapped);
        let (alpha0, beta0) = a.hidden().factor(ra.base_point()).unwrap().unwrap();
        let psi_a = psi(&ra, &alpha0, &beta0).unwrap();
        let psi_b = psi(&rb, &pm.g.mul_vec(&alpha0), &pm.h.mul_vec(&beta0)).unwrap();
        assert_eq!(d.f1.mul(&psi_a.p1), psi_b.p1.mul(&pm.g));
        assert_eq!(d.f2.mul(&psi_a.p2), psi_b.p2.mul(&pm.h));
    }
}

#[test]
fn recovery_functor_respects_composition() {
    let s = shape(3, 2);
    let mut rng = seeded_rng(9);
    for seed in 0..4 {
        let pm = random_pair(&mut rng, s);
        let pm2 = random_pair(&mut rng, s);
        let (a, b) = pointed_pair(s, seed, &pm);
        let (alpha1, beta1) = b.hidden().factor(b.base_point().unwrap()).unwrap().unwrap();
        let c = generate_instance(s, seed + 2000, false);
        let w = c.embed_simple(&pm2.g.mul_vec(&alpha1), &pm2.h.mul_vec(&beta1)).unwrap();
        let c = c.with_base_point(w).unwrap();
        let (ra, rb, rc) = (recon(&a, seed), recon(&b, seed), recon(&c, seed));
        let f = tensor_on_morphisms(&a, &b, &pm).unwrap();
        let g = tensor_on_morphisms(&b, &c, &pm2).unwrap();
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf.map(), tensor_on_morphisms(&a, &c, &pm2.compose(&pm).unwrap()).unwrap().map());
        let lhs = d_on_morphism(&gf, &ra, &rc).unwrap();
        let rhs = d_on_morphism(&g, &rb, &rc).unwrap().compose(&d_on_morphism(&f, &ra, &rb).unwrap());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn recovery_functor_needs_matched_base_points() {
    let s = shape(2, 2);
    let a = generate_instance(s, 10, true);
    let b = generate_instance(s, 11, true);
    let f = tensor_on_morphisms(&a, &b, &VecPairMorphism::identity(2, 2)).unwrap();
    let (ra, rb) = (recon(&a, 10), recon(&b, 11));
    if f.apply(ra.base_point()) != *rb.base_point() {
        assert!(matches!(d_on_morphism(&f, &ra, &rb), Err(Error::PreconditionViolated(_))));
    }
}

#[test]
fn psi_naturality() {
    let s = shape(2, 3);
    let id = VecPairMorphism::identity(2, 3);
    let (a, b) = pointed_pair(s, 12, &id);
    assert!(check_psi_naturality(&recon(&a, 1), &recon(&b, 2), &id).unwrap());
    let mut rng = seeded_rng(12);
    for seed in 0..5 {
        let pm = random_pair(&mut rng, s);
        let (a, b) = pointed_pair(s, seed + 20, &pm);
        assert!(check_psi_naturality(&recon(&a, seed), &recon(&b, seed), &pm).unwrap());
    }
}

#[test]
fn phi_naturality_pointed_and_unpointed() {
    let s = shape(3, 3);
    let inst = generate_instance(s, 13, true);
    let r = recon(&inst, 13);
    assert!(check_phi_naturality(&TvecMorphism::identity(&inst), &r, &r).unwrap());

    let mut rng = seeded_rng(13);
    for seed in 0..4 {
        let pm = random_pair(&mut rng, s);
        let (a, b) = pointed_pair(s, seed + 40, &pm);
        let (ra, rb) = (recon(&a, seed), recon(&b, seed));
        let f = tensor_on_morphisms(&a, &b, &pm).unwrap();
        assert!(check_phi_naturality(&f, &ra, &rb).unwrap());

        // Moving the target base point along its ray leaves a scalar behind.
        let kappa = Scalar::from(rng.gen_range(2i64..=9));
        let bs = b.clone().with_base_point(rb.base_point().scale(&kappa)).unwrap();
        let rbs = recon(&bs, seed);
        let fs = TvecMorphism::new(&a, &bs, f.map().clone()).unwrap();
        assert_eq!(phi_naturality_scalar(&fs, &ra, &rbs).unwrap(), Some(kappa));
        assert!(matches!(check_phi_naturality(&fs, &ra, &rbs), Err(Error::PreconditionViolated(_))));
    }
}

#[test]
fn gl1_ambiguity() {
    let s = shape(2, 3);
    let mut rng = seeded_rng(14);
    let a = generate_instance(s, 14, false);
    let b = generate_instance(s, 15, false);
    let pm = random_pair(&mut rng, s);
    assert!(gl1_demo(&a, &b, &pm, &Scalar::one()).unwrap());
    let three = Scalar::from(3);
    assert!(gl1_demo(&a, &b, &pm, &three).unwrap());
    let other = pm.rebalanced(&three).unwrap();
    assert_ne!(other, pm);
    assert_eq!(tensor_on_morphisms(&a, &b, &other).unwrap().map(), tensor_on_morphisms(&a, &b, &pm).unwrap().map());
    assert!(gl1_demo(&a, &b, &pm, &Scalar::zero()).is_err());
}

#[test]
fn factor_swap_exchanges_the_recovered_sheets() {
    let inst = generate_instance(shape(3, 3), 16, false);
    let swap = inst.hidden().scramble().mul(&factor_swap(3)).mul(inst.hidden().scramble_inverse());
    // Base point of the form a ⊗ a is fixed by the swap.
    let a = Vector::from_ints(&[1, -2, 3]);
    let w0 = inst.embed_simple(&a, &a).unwrap();
    let inst = inst.with_base_point(w0).unwrap();
    let r = recon(&inst, 16);
    let f = TvecMorphism::new(&inst, &inst, swap).unwrap();
    let d = d_on_morphism(&f, &r, &r).unwrap();
    assert!(d.swapped);
    assert_eq!(d.compose(&d), SheetMaps { f1: Matrix::identity(3), f2: Matrix::identity(3), swapped: false });
}
