//! Spectral sets of `I_2` and the bimodules they span.

use cartanlab::extension::{order_preserving_section, Extension};
use cartanlab::kernel::Representation;
use cartanlab::semigroup::FiniteInverseMonoid;
use cartanlab::spectral::{
    enumerate_bimodules, enumerate_spectral_sets, psi_from, section_matrices, theta_from, SpectralSet,
    DEFAULT_BIMODULE_GUARD, DEFAULT_SPECTRAL_GUARD,
};

pub fn run_example() -> cartanlab::Result<()> {
    let m = FiniteInverseMonoid::rook(2)?;
    let ext = Extension::trivial(m.clone(), 1);
    let j = order_preserving_section(&ext)?;
    let rep = Representation::new(&ext, &j)?;
    let mats = section_matrices(&rep)?;
    let tol = 1e-9;
    for a in enumerate_spectral_sets(&m, DEFAULT_SPECTRAL_GUARD)? {
        let b = psi_from(&mats, &a, tol);
        let back = theta_from(&rep, &mats, &b, tol)?;
        println!("dim Ψ = {}  round trip {}  {:?}", b.dim(), back == a, a.names(&m));
    }
    let full = psi_from(&mats, &SpectralSet::full(m.len()), tol);
    println!("bimodules: {}", enumerate_bimodules(&rep, &full, DEFAULT_BIMODULE_GUARD, tol)?.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
