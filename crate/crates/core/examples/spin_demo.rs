//! Two 12-dimensional spaces, `4 ⊗ 3` and `2 ⊗ 6`, told apart by the
//! dimension of the tangent space to the simple cone.
//!
//! Run with `cargo run --release --example spin_demo`.

use tensorcone::foliation::tangent_space;
use tensorcone::tensor_space::{generate_instance, seeded_rng, FactorShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (m, n) in [(4, 3), (2, 6), (3, 4), (6, 2), (1, 12)] {
        let shape = FactorShape::new(m, n)?;
        let inst = generate_instance(shape, 1, false);
        let mut rng = seeded_rng(1);
        let dims: Vec<usize> = (0..5)
            .map(|_| tangent_space(&inst, &inst.sample_simple(&mut rng)).map(|t| t.dim()))
            .collect::<Result<_, _>>()?;
        println!("{shape}: {} quadrics, tangent dims {dims:?}, m+n-1 = {}", inst.quadrics().len(), m + n - 1);
    }
    Ok(())
}
