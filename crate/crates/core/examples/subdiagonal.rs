//! Maximal subdiagonal and triangular spectral monoids of `I_2`.

use cartanlab::extension::{order_preserving_section, Extension};
use cartanlab::kernel::Representation;
use cartanlab::semigroup::FiniteInverseMonoid;
use cartanlab::spectral::{msd, mtr, psi_from, section_matrices, verify_subdiagonal, SpectralSet, DEFAULT_SPECTRAL_GUARD};

pub fn run_example() -> cartanlab::Result<()> {
    let m = FiniteInverseMonoid::rook(2)?;
    let ext = Extension::trivial(m.clone(), 1);
    let j = order_preserving_section(&ext)?;
    let rep = Representation::new(&ext, &j)?;
    let full = psi_from(&section_matrices(&rep)?, &SpectralSet::full(m.len()), 1e-9);
    let triangular = mtr(&m, DEFAULT_SPECTRAL_GUARD)?;
    for a in msd(&m, DEFAULT_SPECTRAL_GUARD)? {
        let r = verify_subdiagonal(&rep, &full, &a, DEFAULT_SPECTRAL_GUARD, 1e-9)?;
        println!(
            "{:?}: triangular {}, dim A = {}, dim N = {}, Φ_N defect {:.1e}",
            a.names(&m),
            triangular.contains(&a),
            r.algebra_dim,
            r.diagonal_dim,
            r.multiplicativity_deviation
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
