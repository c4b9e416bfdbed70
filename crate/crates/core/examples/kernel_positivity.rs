//! The kernel `K(t, s)` and the rank-one decomposition of `T(ρ)`.

use cartanlab::extension::{order_preserving_section, Extension};
use cartanlab::kernel::{atom_matrix, kernel_psd_check};
use cartanlab::semigroup::FiniteInverseMonoid;

pub fn run_example() -> cartanlab::Result<()> {
    let ext = Extension::trivial(FiniteInverseMonoid::rook(3)?, 1);
    let j = order_preserving_section(&ext)?;
    let m = ext.base();
    let list: Vec<usize> = (0..m.len()).step_by(5).collect();
    let names: Vec<String> = list.iter().map(|&i| m.get(i).to_string()).collect();
    println!("s_list = {}", names.join(" "));
    let report = kernel_psd_check(&ext, &j, &list, 1e-9)?;
    for atom in &report.atoms {
        println!("atom {}: classes {:?}, min eigenvalue {:.3e}", atom.atom, atom.classes, atom.min_eigenvalue);
    }
    println!("T(0) = {}", atom_matrix(&ext, &j, &list, 0));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
