//! The derived product on recovered sheets: bilinearity, factorization of
//! simple vectors, and tensor rank read off the coefficient matrix.
//!
//! Run with `cargo run --release --example derived_product`.

use tensorcone::ratlin::{Scalar, Vector};
use tensorcone::reconstruct::recover_factors;
use tensorcone::tensor_space::{generate_instance, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate_instance(FactorShape::new(3, 3)?, 11, true);
    let mut rng = seeded_rng(11);
    let recon = recover_factors(&inst, &mut rng, None)?;
    let (e, f) = (recon.basis_e(), recon.basis_f());

    let x = &e[0] + &e[1];
    let two = Scalar::from(2);
    let lhs = recon.bar_tensor(&x.axpy(&two, &e[2]), &f[1])?;
    let rhs = recon.bar_tensor(&x, &f[1])?.axpy(&two, &recon.bar_tensor(&e[2], &f[1])?);
    assert_eq!(lhs, rhs);
    println!("bilinear in the first slot: ok");

    let s = inst.sample_simple(&mut rng);
    let (w1, w2) = recon.factorize_simple(&s)?;
    assert_eq!(recon.bar_tensor(&w1, &w2)?, s);
    println!("sample {s:?} = w1 ⊗̄ w2 with w1 = {w1:?}");

    let mut v = Vector::zeros(inst.dim());
    for k in 1..=4 {
        v = &v + &inst.sample_simple(&mut rng);
        println!("sum of {k} simple vectors has tensor rank {}", recon.tensor_rank(&v)?);
    }
    Ok(())
}
