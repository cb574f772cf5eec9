//! `(g, h)` and `(λ g, h / λ)` give the same map on the product, so factor
//! maps cannot be read back without base points. Moving the target base
//! point along its ray shows the leftover scalar.
//!
//! Run with `cargo run --release --example gl1_obstruction`.

use tensorcone::category::{gl1_demo, phi_naturality_scalar, tensor_on_morphisms, TvecMorphism, VecPairMorphism};
use tensorcone::ratlin::Scalar;
use tensorcone::reconstruct::recover_factors;
use tensorcone::tensor_space::{generate_instance, random_unimodular, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shape = FactorShape::new(2, 2)?;
    let mut rng = seeded_rng(8);
    let pm = VecPairMorphism::new(random_unimodular(&mut rng, 2), random_unimodular(&mut rng, 2))?;
    let a = generate_instance(shape, 8, true);
    let b = generate_instance(shape, 9, false);

    let lambda = Scalar::new(5, 2);
    println!("same image for λ = {lambda}: {}", gl1_demo(&a, &b, &pm, &lambda)?);
    println!("pairs differ: {}", pm.rebalanced(&lambda)? != pm);

    let (alpha0, beta0) = a.hidden().factor(a.base_point().expect("pointed"))?.expect("simple");
    let image = b.embed_simple(&pm.g.mul_vec(&alpha0), &pm.h.mul_vec(&beta0))?;
    let ra = recover_factors(&a, &mut rng, None)?;
    for kappa in [1, 3, -2] {
        let t = b.clone().with_base_point(image.scale(&Scalar::from(kappa)))?;
        let rt = recover_factors(&t, &mut rng, None)?;
        let f = TvecMorphism::new(&a, &t, tensor_on_morphisms(&a, &b, &pm)?.map().clone())?;
        let c = phi_naturality_scalar(&f, &ra, &rt)?.expect("proportional");
        println!("target base point scaled by {kappa}: F Φ = {c} Φ' (f1 ⊗ f2)");
    }
    Ok(())
}
