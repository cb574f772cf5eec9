//! Recovers the two factors of a scrambled 4x4 instance from the simple cone
//! alone, then compares them with the hidden factorization.
//!
//! Run with `cargo run --release --example recover_factors [m n seed]`.

use tensorcone::reconstruct::{recover_factors, verify_round_trip};
use tensorcone::tensor_space::{generate_instance, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (m, n, seed) = match args[..] {
        [m, n, seed] => (m as usize, n as usize, seed),
        [] => (4, 4, 7),
        _ => return Err("usage: recover_factors [m n seed]".into()),
    };
    let inst = generate_instance(FactorShape::new(m, n)?, seed, false);
    println!("instance {} with {} quadrics in dimension {}", inst.shape(), inst.quadrics().len(), inst.dim());

    let recon = recover_factors(&inst, &mut seeded_rng(seed), None)?;
    let (d1, d2) = recon.sheet_dims();
    println!("base point w0 = {:?}", recon.base_point());
    println!("sheets through w0: dimensions {d1} and {d2}, found after {} samples", recon.samples_used());

    let s = inst.sample_simple(&mut seeded_rng(seed + 1));
    let (x, y) = recon.factorize_simple(&s)?;
    assert_eq!(recon.bar_tensor(&x, &y)?, s);
    println!("a fresh simple vector factors and multiplies back exactly");

    let report = verify_round_trip(&inst, &recon)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
