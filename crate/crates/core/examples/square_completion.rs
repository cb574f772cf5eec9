//! Completes `[[a, b], [c, ?]]` on a scrambled 3x4 instance and checks the
//! answer against the hidden product, including the rescaled special cases.
//!
//! Run with `cargo run --release --example square_completion`.

use tensorcone::ratlin::Scalar;
use tensorcone::squares::{complete_square, is_square, Square};
use tensorcone::tensor_space::{generate_instance, random_factors, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate_instance(FactorShape::new(3, 4)?, 5, false);
    let mut rng = seeded_rng(5);
    let (alpha0, beta0) = random_factors(&mut rng, inst.shape(), 4);
    let (alpha, beta) = random_factors(&mut rng, inst.shape(), 4);

    let a = inst.embed_simple(&alpha0, &beta0)?;
    let b = inst.embed_simple(&alpha0, &beta)?;
    let c = inst.embed_simple(&alpha, &beta0)?;
    let done = complete_square(&inst, &a, &b, &c)?;
    println!("generic case: {}", serde_json::to_string(&done)?);
    assert_eq!(done.d, inst.embed_simple(&alpha, &beta)?);
    assert!(is_square(&inst, &Square::new(a.clone(), b.clone(), c.clone(), done.d))?);

    let lambda = Scalar::new(-2, 3);
    let col = complete_square(&inst, &a, &b, &a.scale(&lambda))?;
    assert_eq!(col.d, b.scale(&lambda));
    let row = complete_square(&inst, &a, &a.scale(&lambda), &c)?;
    assert_eq!(row.d, c.scale(&lambda));
    println!("scaled cases: d = {lambda} b and d = {lambda} c");
    Ok(())
}
