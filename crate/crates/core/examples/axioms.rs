//! Boolean and Cartan axioms on a few monoids, with the witness for a
//! monoid that lacks an orthogonal join.

use cartanlab::boolean::{check_axioms, groupoid_relation};
use cartanlab::semigroup::{FiniteInverseMonoid, PartialBijection};

pub fn run_example() -> cartanlab::Result<()> {
    let two_block = FiniteInverseMonoid::block_monoid(3, &[vec![0, 1], vec![2]])?;
    for (name, m) in [("I_3", FiniteInverseMonoid::rook(3)?), ("two-block", two_block)] {
        let r = check_axioms(&m)?;
        let rel = groupoid_relation(&m)?;
        println!("{name}: {} elements, |R| = {}, cartan = {}", m.len(), rel.len(), r.cartan);
    }

    let swap = PartialBijection::from_pairs(2, &[(0, 1), (1, 0)])?;
    let i2 = FiniteInverseMonoid::rook(2)?;
    let without = FiniteInverseMonoid::new(2, i2.iter().filter(|s| **s != swap).cloned())?;
    let r = check_axioms(&without)?;
    println!("I_2 without swap: cartan = {}", r.cartan);
    println!("  complete: {}", r.complete_d);
    println!("  locally complete: {}", r.locally_complete);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
