//! A coboundary-twisted extension, its untwisting cochain, and the
//! equivalence with the trivial extension. Prints the twisted document.

use cartanlab::cli::document::{emit, ExtensionDocument};
use cartanlab::extension::{
    extensions_equivalent, is_trivial, Cochain, CocycleTable, Extension, DEFAULT_COHOMOLOGY_GUARD,
    DEFAULT_EQUIVALENCE_GUARD,
};
use cartanlab::semigroup::FiniteInverseMonoid;

pub fn run_example() -> cartanlab::Result<()> {
    let m = FiniteInverseMonoid::rook(2)?;
    let b = Cochain::from_relation(&m, 2, |x, _| x as u32);
    let twisted = Extension::new(m.clone(), CocycleTable::coboundary(&m, 2, &b))?;
    let witness = is_trivial(&m, twisted.cocycle(), DEFAULT_COHOMOLOGY_GUARD)?.expect("coboundaries are trivial");
    for (i, s) in m.iter().enumerate() {
        println!("b({s}) = {:?}", witness.values(i));
    }
    let plain = Extension::trivial(m.clone(), 2);
    let eq = extensions_equivalent(&twisted, &plain, DEFAULT_EQUIVALENCE_GUARD, DEFAULT_COHOMOLOGY_GUARD)?;
    println!("equivalent to the trivial extension: {}", eq.is_some());
    print!("{}", emit(&ExtensionDocument::from_extension(&twisted)));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
