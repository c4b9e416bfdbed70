//! The representation `λ_π` of an extension on `ℓ²(R)`.

use cartanlab::extension::{order_preserving_section, Extension, DEFAULT_ELEMENT_GUARD};
use cartanlab::kernel::{abstract_gram_check, Representation};
use cartanlab::linalg::max_deviation;
use cartanlab::semigroup::FiniteInverseMonoid;

pub fn run_example() -> cartanlab::Result<()> {
    let ext = Extension::trivial(FiniteInverseMonoid::rook(2)?, 2);
    let j = order_preserving_section(&ext)?;
    let rep = Representation::new(&ext, &j)?;
    let g = ext.elements(DEFAULT_ELEMENT_GUARD)?;
    println!("|G| = {}, R = {:?}", g.len(), rep.basis().pairs());

    let mut worst: f64 = 0.0;
    for v in &g {
        for w in &g {
            let lhs = rep.lambda(v)? * rep.lambda(w)?;
            worst = worst.max(max_deviation(&lhs, &rep.lambda(&ext.g_multiply(v, w))?));
        }
    }
    println!("max |λ(v)λ(w) - λ(vw)| = {worst:.1e}");

    let swap = g.iter().find(|v| v.bijection().rank() == 2 && !v.bijection().is_idempotent()).unwrap();
    print!("λ({swap}):\n{}", rep.dump(&rep.lambda(swap)?, 1e-9));
    let gram = abstract_gram_check(&rep, &g, 1e-9)?;
    println!("Gram rank {} for |R| = {}", gram.gram_rank, gram.relation_size);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
