//! Built-in document generators.

use crate::cli::document::ExtensionDocument;
use crate::error::{Error, Result};
use crate::extension::{CocycleTable, Extension};
use crate::semigroup::{FiniteInverseMonoid, PartialBijection};

/// Default bound on the number of atoms of a generated monoid.
pub const DEFAULT_GENERATE_GUARD: u128 = 5;

fn check_guard(atoms: usize, guard: u128) -> Result<()> {
    if atoms as u128 > guard {
        return Err(Error::guard("generated atoms", atoms as u128, guard));
    }
    Ok(())
}

/// The symmetric inverse monoid on `n` atoms with the trivial cocycle.
pub fn rook(n: usize, k: u32, guard: u128) -> Result<ExtensionDocument> {
    check_guard(n, guard)?;
    let ext = Extension::trivial(FiniteInverseMonoid::rook(n)?, k.max(1));
    Ok(ExtensionDocument::from_extension(&ext))
}

/// Parses a partition such as `0,1|2`.
pub fn parse_partition(text: &str) -> Result<Vec<Vec<usize>>> {
    text.split('|')
        .map(|block| {
            block
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::format("partition", format!("\"{x}\" is not an atom")))
                })
                .collect()
        })
        .collect()
}

/// All partial bijections that stay inside the blocks of a partition.
pub fn eqrel(partition: &[Vec<usize>], k: u32, guard: u128) -> Result<ExtensionDocument> {
    let atoms: usize = partition.iter().map(Vec::len).sum();
    check_guard(atoms, guard)?;
    let monoid = FiniteInverseMonoid::block_monoid(atoms, partition)
        .map_err(|e| Error::format("partition", e.to_string()))?;
    Ok(ExtensionDocument::from_extension(&Extension::trivial(monoid, k.max(1))))
}

/// Splits an element of a disjoint union into its two components.
fn split(u: &PartialBijection, left_atoms: usize, right_atoms: usize) -> (PartialBijection, PartialBijection) {
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (x, y) in u.pairs() {
        if x < left_atoms {
            left.push((x, y));
        } else {
            right.push((x - left_atoms, y - left_atoms));
        }
    }
    (
        PartialBijection::from_pairs(left_atoms, &left).unwrap(),
        PartialBijection::from_pairs(right_atoms, &right).unwrap(),
    )
}

/// The disjoint-union extension; its cocycle is the direct sum of the two.
pub fn product(a: &ExtensionDocument, b: &ExtensionDocument, guard: u128) -> Result<ExtensionDocument> {
    check_guard(a.atoms + b.atoms, guard)?;
    if a.k != b.k {
        return Err(Error::format("k", format!("factors have k = {} and k = {}", a.k, b.k)));
    }
    let (ea, eb) = (a.load()?.extension, b.load()?.extension);
    let (sa, sb) = (ea.base(), eb.base());
    let union = FiniteInverseMonoid::disjoint_union(sa, sb)?;
    let parts: Vec<(usize, usize)> = union
        .iter()
        .map(|u| {
            let (l, r) = split(u, sa.atoms(), sb.atoms());
            (sa.index_of(&l).unwrap(), sb.index_of(&r).unwrap())
        })
        .collect();
    let cocycle = CocycleTable::from_fn(&union, a.k, |i, j, y| {
        let ((s1, s2), (t1, t2)) = (parts[i], parts[j]);
        if y < sa.atoms() {
            ea.cocycle().value(sa, s1, t1, y)
        } else {
            eb.cocycle().value(sb, s2, t2, y - sa.atoms())
        }
    });
    let ext = Extension::new(union, cocycle)?;
    Ok(ExtensionDocument::from_extension(&ext))
}
