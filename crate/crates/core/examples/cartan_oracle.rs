//! The generated pair `(M, D)`: dimensions, MASA test, expectation, and the
//! monoid read back from the matrices.

use cartanlab::extension::{Cochain, CocycleTable, Extension, DEFAULT_ELEMENT_GUARD};
use cartanlab::oracle::{cartan_report, DEFAULT_RECOVERY_GUARD};
use cartanlab::semigroup::FiniteInverseMonoid;

pub fn run_example() -> cartanlab::Result<()> {
    let m = FiniteInverseMonoid::rook(3)?;
    let b = Cochain::from_relation(&m, 4, |x, y| (x + 2 * y) as u32);
    let ext = Extension::new(m.clone(), CocycleTable::coboundary(&m, 4, &b))?;
    let r = cartan_report(&ext, DEFAULT_ELEMENT_GUARD, DEFAULT_RECOVERY_GUARD, 1e-9)?;
    println!("dim M = {}, dim D = {}, |R| = {}", r.m.dim(), r.d.dim(), r.relation_size);
    println!("double commutant: {:?}", r.double_commutant_dim);
    println!("MASA: {}", r.masa.masa());
    println!("E(λ(v)) = λ(Δ(v)) within {:.1e}", r.expectation.delta_deviation);
    println!("recovered {} elements, atom map {:?}", r.recovery.monoid.len(), r.recovery.isomorphism);
    println!("all checks: {}", r.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
