//! Decides whether `Σ a_j ⊗ b_j` vanishes by rewriting dependent `a_j` in
//! terms of the others, and compares with the sum formed directly.
//!
//! Run with `cargo run --release --example cancellation_rule`.

use tensorcone::ratlin::Vector;
use tensorcone::tensor_space::{generate_instance, rule_says_zero, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate_instance(FactorShape::new(3, 2)?, 2, false);
    let a1 = Vector::from_ints(&[1, 0, 2]);
    let a2 = Vector::from_ints(&[0, 1, -1]);
    let b = Vector::from_ints(&[4, -3]);

    let cases = [
        ("independent a, nonzero b", vec![a1.clone(), a2.clone()], vec![b.clone(), Vector::zeros(2)]),
        ("a3 = a1 + a2 cancelling", vec![a1.clone(), a2.clone(), &a1 + &a2], vec![b.clone(), b.clone(), -&b]),
        ("a3 = a1 + a2 not cancelling", vec![a1.clone(), a2.clone(), &a1 + &a2], vec![b.clone(), -&b, b.clone()]),
    ];
    for (label, a_list, b_list) in cases {
        let zero = rule_says_zero(&a_list, &b_list)?;
        let agrees = inst.verify_rule(&a_list, &b_list)?;
        println!("{label}: sum is zero = {zero}, agrees with direct sum = {agrees}");
    }
    Ok(())
}
