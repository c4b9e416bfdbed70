//! Boolean, complete and Cartan inverse monoid axioms for finite monoids,
//! the action on characters, chop refinement, and the groupoid relation.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::semigroup::{FiniteInverseMonoid, Idempotent, PartialBijection};

/// A failed axiom, with a counterexample from the monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The minimal nonzero idempotents overlap or fail to cover the unit.
    NotAtomic(Vec<PartialBijection>),
    MissingIdempotent(PartialBijection),
    MissingMeet(PartialBijection, PartialBijection),
    MissingJoin(Vec<PartialBijection>),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[PartialBijection]| {
            v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
        };
        match self {
            Witness::NotAtomic(atoms) => write!(f, "idempotent atoms not a partition: {}", list(atoms)),
            Witness::MissingIdempotent(e) => write!(f, "missing idempotent {e}"),
            Witness::MissingMeet(s, t) => write!(f, "meet of {s} and {t} missing"),
            Witness::MissingJoin(v) => write!(f, "join of orthogonal family [{}] missing", list(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(Witness),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Check::Pass => None,
            Check::Fail(w) => Some(w),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => write!(f, "pass"),
            Check::Fail(w) => write!(f, "fail ({w})"),
        }
    }
}

pub const HYPERSTONEAN_NOTE: &str = "finite discrete space";

#[derive(Clone, Debug)]
pub struct AxiomReport {
    /// Blocks of atoms when `E(S)` is a proper subalgebra of the power set
    /// and the monoid had to be re-based on the atoms of `E(S)`.
    pub rebased: Option<Vec<Idempotent>>,
    pub boolean_a: Check,
    pub boolean_b: Check,
    pub boolean_c: Check,
    pub locally_complete: Check,
    pub complete_d: Check,
    pub fundamental: bool,
    pub hyperstonean: Check,
    pub hyperstonean_note: &'static str,
    pub cartan: bool,
}

impl AxiomReport {
    pub fn boolean(&self) -> bool {
        self.boolean_a.passed() && self.boolean_b.passed() && self.boolean_c.passed()
    }
}

/// Minimal nonzero idempotents of `S`.
fn idempotent_atoms(s: &FiniteInverseMonoid) -> Vec<Idempotent> {
    let idem: Vec<Idempotent> = s
        .iter()
        .filter(|x| x.is_idempotent() && !x.is_zero())
        .map(|x| x.domain())
        .collect();
    idem.iter()
        .copied()
        .filter(|e| !idem.iter().any(|f| f != e && f.leq(e)))
        .collect()
}

/// Checks `E(S)` is a Boolean algebra; on success returns its atoms as
/// blocks of the underlying atom set.
fn check_boolean_algebra(s: &FiniteInverseMonoid) -> std::result::Result<Vec<Idempotent>, Witness> {
    let atoms = idempotent_atoms(s);
    let mut cover = 0u64;
    for e in &atoms {
        if cover & e.support() != 0 {
            return Err(Witness::NotAtomic(atoms.iter().map(|e| e.to_bijection()).collect()));
        }
        cover |= e.support();
    }
    if cover != Idempotent::one(s.atoms()).support() {
        // The complement of the covered part is the missing idempotent.
        let missing = Idempotent::new(s.atoms(), cover).complement();
        let witness = if s.contains(&missing.to_bijection()) {
            Witness::NotAtomic(atoms.iter().map(|e| e.to_bijection()).collect())
        } else {
            Witness::MissingIdempotent(missing.to_bijection())
        };
        return Err(witness);
    }
    // Every union of atoms must be present.
    if atoms.len() > 24 {
        // 2^24 unions is well past desk scale; the count check below still
        // decides the question exactly.
        let idem = s.iter().filter(|x| x.is_idempotent()).count();
        if idem as u128 != 1u128 << atoms.len() {
            return Err(Witness::NotAtomic(atoms.iter().map(|e| e.to_bijection()).collect()));
        }
    } else {
        for mask in 0u64..1 << atoms.len() {
            let support = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u64, |acc, (_, e)| acc | e.support());
            let e = Idempotent::new(s.atoms(), support).to_bijection();
            if !s.contains(&e) {
                return Err(Witness::MissingIdempotent(e));
            }
        }
    }
    let mut blocks = atoms;
    blocks.sort_by_key(|e| e.support().trailing_zeros());
    Ok(blocks)
}

/// Re-labels `S` onto the atoms of `E(S)` through its action on them.
fn rebase(s: &FiniteInverseMonoid, blocks: &[Idempotent]) -> Result<FiniteInverseMonoid> {
    let m = blocks.len();
    let block_of = |support: u64| blocks.iter().position(|b| b.support() == support);
    let mut images = Vec::with_capacity(s.len());
    for x in s.iter() {
        let mut pairs = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            if !b.leq(&x.domain()) {
                continue;
            }
            let img = b.iter().fold(0u64, |acc, a| acc | 1 << x.apply(a).unwrap());
            let j = block_of(img).ok_or_else(|| {
                Error::InvariantViolation(format!("{x} does not carry idempotent atoms to idempotent atoms"))
            })?;
            pairs.push((i, j));
        }
        images.push(PartialBijection::from_pairs(m, &pairs)?);
    }
    FiniteInverseMonoid::from_elements(m, images)
}

fn check_meets(s: &FiniteInverseMonoid) -> Check {
    for a in s.iter() {
        for b in s.iter() {
            if !s.contains(&a.meet(b).meet) {
                return Check::Fail(Witness::MissingMeet(a.clone(), b.clone()));
            }
        }
    }
    Check::Pass
}

fn check_binary_joins(s: &FiniteInverseMonoid) -> Check {
    for (i, a) in s.iter().enumerate() {
        for b in &s.elements()[i + 1..] {
            if a.is_orthogonal(b) {
                let j = PartialBijection::orthogonal_join(s.atoms(), [a, b]).unwrap();
                if !s.contains(&j) {
                    return Check::Fail(Witness::MissingJoin(vec![a.clone(), b.clone()]));
                }
            }
        }
    }
    Check::Pass
}

/// Maximal pairwise-orthogonal families of nonzero elements (Bron–Kerbosch
/// with pivoting over the orthogonality graph).
pub fn maximal_orthogonal_families(s: &FiniteInverseMonoid) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = (0..s.len()).filter(|&i| !s.get(i).is_zero()).collect();
    let n = s.len();
    let mut adj = vec![FixedBitSet::with_capacity(n); n];
    for &i in &nodes {
        for &j in &nodes {
            if i != j && s.get(i).is_orthogonal(s.get(j)) {
                adj[i].insert(j);
            }
        }
    }
    let mut out = Vec::new();
    let mut p = FixedBitSet::with_capacity(n);
    for &i in &nodes {
        p.insert(i);
    }
    fn bk(
        r: &mut Vec<usize>,
        p: FixedBitSet,
        x: FixedBitSet,
        adj: &[FixedBitSet],
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_clear() && x.is_clear() {
            let mut family = r.clone();
            family.sort_unstable();
            out.push(family);
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| adj[u].intersection(&p).count())
            .unwrap();
        let candidates: Vec<usize> = p.difference(&adj[pivot]).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            let mut np = p.clone();
            np.intersect_with(&adj[v]);
            let mut nx = x.clone();
            nx.intersect_with(&adj[v]);
            r.push(v);
            bk(r, np, nx, adj, out);
            r.pop();
            p.set(v, false);
            x.insert(v);
        }
    }
    bk(&mut Vec::new(), p, FixedBitSet::with_capacity(n), &adj, &mut out);
    out.sort();
    out
}

fn check_maximal_joins(s: &FiniteInverseMonoid) -> Check {
    for family in maximal_orthogonal_families(s) {
        let members: Vec<&PartialBijection> = family.iter().map(|&i| s.get(i)).collect();
        let join = PartialBijection::orthogonal_join(s.atoms(), members.iter().copied()).unwrap();
        if !s.contains(&join) {
            return Check::Fail(Witness::MissingJoin(members.into_iter().cloned().collect()));
        }
    }
    Check::Pass
}

/// Verifies the Boolean (a)–(c), local completeness, completeness (d) and
/// Cartan conditions.
///
/// Completeness (d) is checked on maximal orthogonal families; the
/// hyperstonean condition holds trivially for a finite discrete character
/// space.
pub fn check_axioms(s: &FiniteInverseMonoid) -> Result<AxiomReport> {
    let classification = s.classify()?;
    let (boolean_a, rebased, target) = match check_boolean_algebra(s) {
        Ok(blocks) if blocks.iter().all(|b| b.count() == 1) => (Check::Pass, None, None),
        Ok(blocks) => {
            let target = rebase(s, &blocks)?;
            (Check::Pass, Some(blocks), Some(target))
        }
        Err(w) => (Check::Fail(w), None, None),
    };
    let work = target.as_ref().unwrap_or(s);
    let locally_complete = boolean_a.clone();
    let boolean_b = check_meets(work);
    let boolean_c = check_binary_joins(work);
    let complete_d = check_maximal_joins(work);
    let cartan = classification.fundamental
        && boolean_a.passed()
        && boolean_b.passed()
        && boolean_c.passed()
        && locally_complete.passed()
        && complete_d.passed();
    Ok(AxiomReport {
        rebased,
        boolean_a,
        boolean_b,
        boolean_c,
        locally_complete,
        complete_d,
        fundamental: classification.fundamental,
        hyperstonean: Check::Pass,
        hyperstonean_note: HYPERSTONEAN_NOTE,
        cartan,
    })
}

/// The partial map `β_s` on characters, `β_s(ρ)(e) = ρ(s† e s)`, with
/// characters identified with atoms.
///
/// For the partial-bijection realization `β_s = s`; this is verified.
pub fn beta(monoid: &FiniteInverseMonoid, s: &PartialBijection) -> Result<PartialBijection> {
    let n = monoid.atoms();
    let sd = s.dagger();
    let mut pairs = Vec::new();
    for x in s.domain().iter() {
        // β_s(ρ_x) is the character ρ_y with ρ_x(s† e_y s) = 1.
        let targets: Vec<usize> = (0..n)
            .filter(|&y| {
                let e = Idempotent::atom(n, y).to_bijection();
                (&(&sd * &e) * s).domain().contains(x)
            })
            .collect();
        match targets.as_slice() {
            [y] => pairs.push((x, *y)),
            _ => {
                return Err(Error::InvariantViolation(format!(
                    "character {x} under {s} evaluates to one on {} atoms",
                    targets.len()
                )))
            }
        }
    }
    let b = PartialBijection::from_pairs(n, &pairs)?;
    if &b != s {
        return Err(Error::InvariantViolation(format!("beta({s}) = {b}")));
    }
    Ok(b)
}

/// Refines nonzero elements into a pairwise meet-orthogonal family `A` with
/// every input the orthogonal join of the members of `A` below it.
pub fn chop(inputs: &[PartialBijection]) -> Result<Vec<PartialBijection>> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::Domain("chop needs at least one element".into()))?;
    let atoms = first.atoms();
    for s in inputs {
        if s.atoms() != atoms {
            return Err(Error::AtomMismatch {
                left: atoms,
                right: s.atoms(),
            });
        }
        if s.is_zero() {
            return Err(Error::Domain("chop input contains 0".into()));
        }
    }
    let mut a = vec![first.clone()];
    for s_n in &inputs[1..] {
        let mut x = Vec::new();
        for b in &a {
            // Subtract the meet, not s_n: b\s_n must keep the part of b
            // that disagrees with s_n.
            let m = b.meet(s_n).meet;
            let rest = b.relative_complement(&m);
            for c in [m, rest] {
                if !c.is_zero() && !x.contains(&c) {
                    x.push(c);
                }
            }
        }
        let below: Vec<&PartialBijection> = x.iter().filter(|c| c.natural_leq(s_n)).collect();
        let t = PartialBijection::orthogonal_join(atoms, below)?;
        let r = s_n.relative_complement(&t);
        if !r.is_zero() {
            x.push(r);
        }
        a = x;
    }
    a.sort();
    Ok(a)
}

/// `R = ⋃ Graph(s)` as a relation on atoms, with its block partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidRelation {
    atoms: usize,
    pairs: FixedBitSet,
    blocks: Vec<Vec<usize>>,
}

impl GroupoidRelation {
    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(x * self.atoms + y)
    }

    pub fn len(&self) -> usize {
        self.pairs.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs `(x, y)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.ones().map(move |i| (i / self.atoms, i % self.atoms))
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

pub fn groupoid_relation(s: &FiniteInverseMonoid) -> Result<GroupoidRelation> {
    let n = s.atoms();
    let mut pairs = FixedBitSet::with_capacity(n * n);
    for m in s.iter() {
        for (y, x) in m.pairs() {
            pairs.insert(x * n + y);
        }
    }
    let has = |x: usize, y: usize| pairs.contains(x * n + y);
    for x in 0..n {
        if !has(x, x) {
            return Err(Error::InvariantViolation(format!("relation not reflexive at {x}")));
        }
        for y in 0..n {
            if has(x, y) && !has(y, x) {
                return Err(Error::InvariantViolation(format!("relation not symmetric at ({x},{y})")));
            }
            for z in 0..n {
                if has(x, y) && has(y, z) && !has(x, z) {
                    return Err(Error::InvariantViolation(format!(
                        "relation not transitive at ({x},{y},{z})"
                    )));
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for x in 0..n {
        if !seen[x] {
            let block: Vec<usize> = (0..n).filter(|&y| has(x, y)).collect();
            for &y in &block {
                seen[y] = true;
            }
            blocks.push(block);
        }
    }
    Ok(GroupoidRelation {
        atoms: n,
        pairs,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(from: usize, to: usize) -> PartialBijection {
        PartialBijection::singleton(2, from, to)
    }

    fn swap() -> PartialBijection {
        PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn rook_monoids_are_cartan() {
        for n in 1..=3 {
            let r = check_axioms(&FiniteInverseMonoid::rook(n).unwrap()).unwrap();
            assert!(r.cartan, "I_{n}: {r:?}");
            assert!(r.rebased.is_none());
        }
    }

    #[test]
    fn missing_swap_fails_completeness() {
        let i2 = FiniteInverseMonoid::rook(2).unwrap();
        let without = FiniteInverseMonoid::new(2, i2.iter().filter(|s| **s != swap()).cloned()).unwrap();
        let r = check_axioms(&without).unwrap();
        assert!(r.boolean_a.passed() && r.boolean_b.passed());
        assert_eq!(
            r.complete_d,
            Check::Fail(Witness::MissingJoin(vec![t(0, 1), t(1, 0)]))
        );
        assert!(!r.cartan);
    }

    #[test]
    fn proper_subalgebra_is_rebased() {
        // {0, 1, swap} on two atoms: E(S) = {0, 1} has one atom.
        let m = FiniteInverseMonoid::new(2, [swap()]).unwrap();
        let r = check_axioms(&m).unwrap();
        assert_eq!(r.rebased.as_ref().map(|b| b.len()), Some(1));
        assert!(r.boolean());
        assert!(!r.fundamental && !r.cartan);
    }

    #[test]
    fn non_boolean_idempotents_fail_a() {
        let e0 = Idempotent::atom(2, 0).to_bijection();
        let m = FiniteInverseMonoid::new(2, [e0]).unwrap();
        let r = check_axioms(&m).unwrap();
        assert_eq!(
            r.boolean_a,
            Check::Fail(Witness::MissingIdempotent(Idempotent::atom(2, 1).to_bijection()))
        );
    }

    #[test]
    fn beta_examples() {
        let i2 = FiniteInverseMonoid::rook(2).unwrap();
        for s in i2.iter() {
            assert_eq!(&beta(&i2, s).unwrap(), s);
        }
        for s in i2.iter() {
            for u in i2.iter() {
                let lhs = beta(&i2, &(s * u)).unwrap();
                assert_eq!(lhs, &beta(&i2, s).unwrap() * &beta(&i2, u).unwrap());
            }
        }
    }

    #[test]
    fn chop_examples() {
        assert_eq!(chop(&[swap()]).unwrap(), vec![swap()]);
        let one = PartialBijection::identity(2);
        let e0 = Idempotent::atom(2, 0).to_bijection();
        let e1 = Idempotent::atom(2, 1).to_bijection();
        assert_eq!(chop(&[one.clone(), e0.clone()]).unwrap(), vec![e0, e1]);
        let mut expect = vec![swap(), one.clone()];
        expect.sort();
        assert_eq!(chop(&[swap(), one]).unwrap(), expect);
        assert!(matches!(chop(&[PartialBijection::zero(2)]), Err(Error::Domain(_))));
        assert!(matches!(chop(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn groupoid_relation_examples() {
        assert_eq!(groupoid_relation(&FiniteInverseMonoid::rook(3).unwrap()).unwrap().len(), 9);
        assert_eq!(groupoid_relation(&FiniteInverseMonoid::diagonal(3).unwrap()).unwrap().len(), 3);
        let blocks = FiniteInverseMonoid::block_monoid(3, &[vec![0, 1], vec![2]]).unwrap();
        let r = groupoid_relation(&blocks).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r.blocks(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn maximal_families_of_i2() {
        let i2 = FiniteInverseMonoid::rook(2).unwrap();
        let fams = maximal_orthogonal_families(&i2);
        // {e0,e1}, {t01,t10}, {1}, {swap}
        assert_eq!(fams.len(), 4);
    }
}
