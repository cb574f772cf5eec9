//! Pushes a pair of invertible maps through the product functor, recovers
//! both sides, and checks that Ψ and Φ commute with the induced maps.
//!
//! Run with `cargo run --release --example naturality`.

use tensorcone::category::{
    check_phi_naturality, check_psi_naturality, d_on_morphism, is_tvec_morphism, tensor_on_morphisms, VecPairMorphism,
};
use tensorcone::reconstruct::recover_factors;
use tensorcone::tensor_space::{generate_instance, random_unimodular, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shape = FactorShape::new(2, 3)?;
    let mut rng = seeded_rng(3);
    let pm = VecPairMorphism::new(random_unimodular(&mut rng, 2), random_unimodular(&mut rng, 3))?;

    let a = generate_instance(shape, 3, true);
    let (alpha0, beta0) = a.hidden().factor(a.base_point().expect("pointed"))?.expect("simple");
    let b = generate_instance(shape, 4, false);
    let target_base = b.embed_simple(&pm.g.mul_vec(&alpha0), &pm.h.mul_vec(&beta0))?;
    let b = b.with_base_point(target_base)?;

    let f = tensor_on_morphisms(&a, &b, &pm)?;
    println!("g ⊗ h preserves the cone: {}", is_tvec_morphism(&f));
    let ra = recover_factors(&a, &mut rng, None)?;
    let rb = recover_factors(&b, &mut rng, None)?;
    let d = d_on_morphism(&f, &ra, &rb)?;
    println!("induced sheet maps: {}", serde_json::to_string(&d)?);
    println!("Ψ natural: {}", check_psi_naturality(&ra, &rb, &pm)?);
    println!("Φ natural: {}", check_phi_naturality(&f, &ra, &rb)?);
    Ok(())
}
