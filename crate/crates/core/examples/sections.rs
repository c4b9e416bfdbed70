//! Order-preserving sections of a twisted extension, and why the involution
//! has to be imposed separately.

use cartanlab::extension::{
    order_preserving_section, order_preserving_section_with, validate_section, Cochain, CocycleTable, Extension,
};
use cartanlab::semigroup::{FiniteInverseMonoid, PartialBijection};

pub fn run_example() -> cartanlab::Result<()> {
    let m = FiniteInverseMonoid::rook(2)?;
    let b = Cochain::from_relation(&m, 2, |x, _| x as u32);
    let ext = Extension::new(m.clone(), CocycleTable::coboundary(&m, 2, &b))?;

    let j = order_preserving_section(&ext)?;
    for (s, v) in m.iter().zip(j.values()) {
        println!("j({s}) = {v}");
    }
    println!("{:?}", validate_section(&ext, &j)?);

    // Lifting t01 with phase 1 still preserves order but breaks j(s†) = j(s)†.
    let plain = Extension::trivial(m, 2);
    let t01 = PartialBijection::singleton(2, 0, 1);
    let raw = order_preserving_section_with(
        &plain,
        |s| if *s == t01 { vec![1] } else { vec![0; s.rank()] },
        |s| vec![0; s.rank()],
    )?;
    let r = validate_section(&plain, &raw)?;
    println!("raw lift: order preserving = {}", r.order_preserving());
    println!("raw lift: dagger violation at {:?}", r.dagger_violation);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
