//! Finite inverse monoids realized as partial bijections of a finite atom set.
//!
//! Every element of a monoid handled by this crate is a [`PartialBijection`]
//! of the atoms `0..n`, where the atoms are the characters of the Boolean
//! algebra of idempotents. Products, inverses, the natural partial order,
//! meets and orthogonal joins are all computed exactly on bitsets.
//!
//! Elements of an extension carry an additional phase on each domain atom,
//! stored as an exponent of a fixed primitive `k`-th root of unity
//! ([`PhasedElement`]).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Largest supported atom count (atoms are stored in a `u64` bitset).
pub const MAX_ATOMS: usize = 64;

pub(crate) fn full_mask(atoms: usize) -> u64 {
    if atoms >= 64 {
        u64::MAX
    } else {
        (1u64 << atoms) - 1
    }
}

fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let x = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(x)
        }
    })
}

fn check_atoms(atoms: usize) -> Result<()> {
    if atoms == 0 || atoms > MAX_ATOMS {
        return Err(Error::Domain(format!(
            "atom count must lie in 1..={MAX_ATOMS}, got {atoms}"
        )));
    }
    Ok(())
}

/// An idempotent of `E(S)`, identified with its support: the set of atoms
/// (characters) on which it evaluates to one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Idempotent {
    atoms: u8,
    support: u64,
}

impl Idempotent {
    pub fn new(atoms: usize, support: u64) -> Self {
        assert!((1..=MAX_ATOMS).contains(&atoms), "atom count out of range");
        assert_eq!(support & !full_mask(atoms), 0, "support outside atom set");
        Idempotent {
            atoms: atoms as u8,
            support,
        }
    }

    pub fn zero(atoms: usize) -> Self {
        Self::new(atoms, 0)
    }

    pub fn one(atoms: usize) -> Self {
        Self::new(atoms, full_mask(atoms))
    }

    pub fn atom(atoms: usize, x: usize) -> Self {
        Self::new(atoms, 1 << x)
    }

    pub fn atoms(&self) -> usize {
        self.atoms as usize
    }

    pub fn support(&self) -> u64 {
        self.support
    }

    pub fn contains(&self, x: usize) -> bool {
        x < 64 && self.support >> x & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.support == 0
    }

    pub fn count(&self) -> usize {
        self.support.count_ones() as usize
    }

    pub fn meet(&self, other: &Self) -> Self {
        Self::new(self.atoms(), self.support & other.support)
    }

    pub fn join(&self, other: &Self) -> Self {
        Self::new(self.atoms(), self.support | other.support)
    }

    /// Boolean complement `¬e`.
    pub fn complement(&self) -> Self {
        Self::new(self.atoms(), !self.support & full_mask(self.atoms()))
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.support & !other.support == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        bits(self.support)
    }

    pub fn to_bijection(&self) -> PartialBijection {
        PartialBijection::partial_identity(*self)
    }
}

/// A partial bijection of the atoms `0..n`: an element of the symmetric
/// inverse monoid `I_n`.
///
/// Ordering is canonical: by domain bitset (as an integer), then by the
/// image array listed in increasing domain order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBijection {
    atoms: u8,
    domain: u64,
    image: Vec<u8>,
}

impl PartialBijection {
    /// Builds a map from `(source, target)` pairs.
    pub fn from_pairs(atoms: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        check_atoms(atoms)?;
        let mut table = vec![None; atoms];
        let mut used = 0u64;
        for &(x, y) in pairs {
            if x >= atoms || y >= atoms {
                return Err(Error::Domain(format!(
                    "pair ({x},{y}) outside the {atoms}-atom set"
                )));
            }
            if table[x].is_some() {
                return Err(Error::Domain(format!("atom {x} mapped twice")));
            }
            if used >> y & 1 == 1 {
                return Err(Error::Domain(format!("atom {y} hit twice: not injective")));
            }
            used |= 1 << y;
            table[x] = Some(y);
        }
        Ok(Self::from_table(atoms, &table))
    }

    fn from_table(atoms: usize, table: &[Option<usize>]) -> Self {
        let mut domain = 0u64;
        let mut image = Vec::new();
        for (x, y) in table.iter().enumerate() {
            if let Some(y) = y {
                domain |= 1 << x;
                image.push(*y as u8);
            }
        }
        PartialBijection {
            atoms: atoms as u8,
            domain,
            image,
        }
    }

    pub fn identity(atoms: usize) -> Self {
        Self::partial_identity(Idempotent::one(atoms))
    }

    pub fn zero(atoms: usize) -> Self {
        Self::partial_identity(Idempotent::zero(atoms))
    }

    pub fn partial_identity(e: Idempotent) -> Self {
        PartialBijection {
            atoms: e.atoms,
            domain: e.support,
            image: e.iter().map(|x| x as u8).collect(),
        }
    }

    /// The rank-one map sending `from` to `to`.
    pub fn singleton(atoms: usize, from: usize, to: usize) -> Self {
        PartialBijection {
            atoms: atoms as u8,
            domain: 1 << from,
            image: vec![to as u8],
        }
    }

    pub fn atoms(&self) -> usize {
        self.atoms as usize
    }

    fn slot(&self, x: usize) -> usize {
        (self.domain & ((1u64 << x) - 1)).count_ones() as usize
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        if x < self.atoms() && self.domain >> x & 1 == 1 {
            Some(self.image[self.slot(x)] as usize)
        } else {
            None
        }
    }

    /// Position of `x` within the domain listing, if `x` is in the domain.
    pub fn domain_position(&self, x: usize) -> Option<usize> {
        (x < self.atoms() && self.domain >> x & 1 == 1).then(|| self.slot(x))
    }

    /// `s†s`.
    pub fn domain(&self) -> Idempotent {
        Idempotent::new(self.atoms(), self.domain)
    }

    /// `ss†`.
    pub fn range(&self) -> Idempotent {
        let support = self.image.iter().fold(0u64, |acc, &y| acc | 1 << y);
        Idempotent::new(self.atoms(), support)
    }

    pub fn rank(&self) -> usize {
        self.image.len()
    }

    pub fn is_zero(&self) -> bool {
        self.domain == 0
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    /// `(x, s(x))` for every domain atom, in increasing order of `x`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        bits(self.domain).zip(self.image.iter().map(|&y| y as usize))
    }

    fn require_same_atoms(&self, other: &Self) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::AtomMismatch {
                left: self.atoms(),
                right: other.atoms(),
            });
        }
        Ok(())
    }

    /// `self ∘ t`: apply `t` first, then `self`.
    pub fn compose(&self, t: &Self) -> Result<Self> {
        self.require_same_atoms(t)?;
        let mut table = vec![None; self.atoms()];
        for (y, ty) in t.pairs() {
            table[y] = self.apply(ty);
        }
        Ok(Self::from_table(self.atoms(), &table))
    }

    pub fn dagger(&self) -> Self {
        let mut table = vec![None; self.atoms()];
        for (x, y) in self.pairs() {
            table[y] = Some(x);
        }
        Self::from_table(self.atoms(), &table)
    }

    pub fn is_idempotent(&self) -> bool {
        self.pairs().all(|(x, y)| x == y)
    }

    /// Restriction to the idempotent `e`: the product `s·e`.
    pub fn restrict(&self, e: Idempotent) -> Self {
        let mut table = vec![None; self.atoms()];
        for (x, y) in self.pairs() {
            if e.contains(x) {
                table[x] = Some(y);
            }
        }
        Self::from_table(self.atoms(), &table)
    }

    /// Natural partial order: `self = t·e` for some idempotent `e`.
    pub fn natural_leq(&self, t: &Self) -> bool {
        self.atoms == t.atoms
            && self.domain & !t.domain == 0
            && self.pairs().all(|(x, y)| t.apply(x) == Some(y))
    }

    /// The fixed-point idempotent `s†t ∧ 1`: the atoms where both maps are
    /// defined and agree.
    pub fn agreement(&self, t: &Self) -> Idempotent {
        let support = self
            .pairs()
            .filter(|&(x, y)| t.apply(x) == Some(y))
            .fold(0u64, |acc, (x, _)| acc | 1 << x);
        Idempotent::new(self.atoms(), support)
    }

    /// The meet `s ∧ t` together with the idempotent `s†t ∧ 1`.
    pub fn meet(&self, t: &Self) -> Meet {
        let fixed = self.agreement(t);
        let meet = self.restrict(fixed);
        debug_assert!(meet == t.restrict(fixed));
        debug_assert!(meet.domain() == fixed);
        Meet {
            meet,
            fixed_points: fixed,
        }
    }

    /// Orthogonality `s†t = ts† = 0`: disjoint domains and disjoint ranges.
    pub fn is_orthogonal(&self, t: &Self) -> bool {
        self.atoms == t.atoms
            && self.domain & t.domain == 0
            && self.range().support() & t.range().support() == 0
    }

    /// `s \ t := s(s†s ∧ ¬t†t)`.
    pub fn relative_complement(&self, t: &Self) -> Self {
        self.restrict(t.domain().complement())
    }

    /// Least upper bound of a pairwise orthogonal family.
    ///
    /// `atoms` fixes the atom set when the family is empty.
    pub fn orthogonal_join<'a, I>(atoms: usize, family: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PartialBijection>,
    {
        let family: Vec<&PartialBijection> = family.into_iter().collect();
        for (i, s) in family.iter().enumerate() {
            if s.atoms() != atoms {
                return Err(Error::AtomMismatch {
                    left: atoms,
                    right: s.atoms(),
                });
            }
            for t in &family[i + 1..] {
                if !s.is_orthogonal(t) {
                    return Err(Error::Orthogonality {
                        first: s.to_string(),
                        second: t.to_string(),
                    });
                }
            }
        }
        let mut table = vec![None; atoms];
        for s in &family {
            for (x, y) in s.pairs() {
                table[x] = Some(y);
            }
        }
        Ok(Self::from_table(atoms, &table))
    }

    /// Conjugates by an atom permutation: `x ↦ perm[x]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut table = vec![None; self.atoms()];
        for (x, y) in self.pairs() {
            table[perm[x]] = Some(perm[y]);
        }
        Self::from_table(self.atoms(), &table)
    }
}

impl Mul for &PartialBijection {
    type Output = PartialBijection;

    /// Panics on an atom-set mismatch; use [`PartialBijection::compose`] for
    /// the checked version.
    fn mul(self, rhs: &PartialBijection) -> PartialBijection {
        self.compose(rhs).expect("product of maps on different atom sets")
    }
}

impl fmt::Display for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}>{y}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Output of [`PartialBijection::meet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meet {
    pub meet: PartialBijection,
    pub fixed_points: Idempotent,
}

/// An element `[s, p]` of an extension: a partial bijection with a phase
/// exponent (mod `k`) on each domain atom, listed in increasing atom order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasedElement {
    bijection: PartialBijection,
    phases: Vec<u32>,
}

impl PhasedElement {
    pub fn new(bijection: PartialBijection, phases: Vec<u32>) -> Result<Self> {
        if phases.len() != bijection.rank() {
            return Err(Error::Domain(format!(
                "{} phases supplied for a domain of size {}",
                phases.len(),
                bijection.rank()
            )));
        }
        Ok(PhasedElement { bijection, phases })
    }

    pub fn unphased(bijection: PartialBijection) -> Self {
        let phases = vec![0; bijection.rank()];
        PhasedElement { bijection, phases }
    }

    pub fn bijection(&self) -> &PartialBijection {
        &self.bijection
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    pub fn phase_at(&self, x: usize) -> Option<u32> {
        self.bijection.domain_position(x).map(|i| self.phases[i])
    }

    pub fn atoms(&self) -> usize {
        self.bijection.atoms()
    }

    /// Members of `P`: phased partial identities.
    pub fn is_diagonal(&self) -> bool {
        self.bijection.is_idempotent()
    }

    pub fn is_zero(&self) -> bool {
        self.bijection.is_zero()
    }

    /// Restriction `v·e` for an idempotent with zero phase.
    pub fn restrict(&self, e: Idempotent) -> Self {
        let bijection = self.bijection.restrict(e);
        let phases = bijection
            .pairs()
            .map(|(x, _)| self.phase_at(x).unwrap())
            .collect();
        PhasedElement { bijection, phases }
    }

    /// Natural order in the extension: restriction with matching phases.
    pub fn natural_leq(&self, w: &Self) -> bool {
        self.bijection.natural_leq(&w.bijection)
            && self
                .bijection
                .pairs()
                .all(|(x, _)| self.phase_at(x) == w.phase_at(x))
    }

    /// Meet in the extension: restriction to the atoms where the maps and
    /// the phases agree.
    pub fn meet(&self, w: &Self) -> Self {
        let agree = self.bijection.agreement(&w.bijection);
        let support = agree
            .iter()
            .filter(|&x| self.phase_at(x) == w.phase_at(x))
            .fold(0u64, |acc, x| acc | 1 << x);
        self.restrict(Idempotent::new(self.atoms(), support))
    }
}

impl fmt::Display for PhasedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, ((x, y), p)) in self.bijection.pairs().zip(&self.phases).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}>{y}^{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PhasedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite inverse monoid of partial bijections, kept in canonical order.
#[derive(Clone)]
pub struct FiniteInverseMonoid {
    atoms: usize,
    elements: Vec<PartialBijection>,
    index: HashMap<PartialBijection, usize>,
    added: Vec<PartialBijection>,
}

impl PartialEq for FiniteInverseMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.elements == other.elements
    }
}

impl Eq for FiniteInverseMonoid {}

impl fmt::Debug for FiniteInverseMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteInverseMonoid")
            .field("atoms", &self.atoms)
            .field("elements", &self.elements)
            .finish()
    }
}

impl FiniteInverseMonoid {
    /// Collects, deduplicates and sorts the elements, materializing `0` and
    /// `1` if absent. Closure is not checked; see [`Self::new`].
    pub fn from_elements<I>(atoms: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = PartialBijection>,
    {
        check_atoms(atoms)?;
        let mut set: Vec<PartialBijection> = Vec::new();
        let mut seen = HashSet::new();
        for s in elements {
            if s.atoms() != atoms {
                return Err(Error::AtomMismatch {
                    left: atoms,
                    right: s.atoms(),
                });
            }
            if seen.insert(s.clone()) {
                set.push(s);
            }
        }
        let mut added = Vec::new();
        for must in [PartialBijection::zero(atoms), PartialBijection::identity(atoms)] {
            if seen.insert(must.clone()) {
                added.push(must.clone());
                set.push(must);
            }
        }
        set.sort();
        let index = set.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(FiniteInverseMonoid {
            atoms,
            elements: set,
            index,
            added,
        })
    }

    /// Like [`Self::from_elements`], but rejects element lists that are not
    /// closed under composition and inverse.
    pub fn new<I>(atoms: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = PartialBijection>,
    {
        let monoid = Self::from_elements(atoms, elements)?;
        monoid.check_closure()?;
        Ok(monoid)
    }

    /// The inverse submonoid of `I_n` generated by `generators`.
    pub fn generated_by<I>(atoms: usize, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = PartialBijection>,
    {
        check_atoms(atoms)?;
        let mut seen: HashSet<PartialBijection> = HashSet::new();
        let mut gens = Vec::new();
        for g in generators {
            if g.atoms() != atoms {
                return Err(Error::AtomMismatch {
                    left: atoms,
                    right: g.atoms(),
                });
            }
            let d = g.dagger();
            gens.push(g);
            gens.push(d);
        }
        gens.push(PartialBijection::identity(atoms));
        gens.push(PartialBijection::zero(atoms));
        let mut frontier: Vec<PartialBijection> = Vec::new();
        for g in &gens {
            if seen.insert(g.clone()) {
                frontier.push(g.clone());
            }
        }
        let mut all: Vec<PartialBijection> = frontier.clone();
        while let Some(s) = frontier.pop() {
            for g in &gens {
                let p = &s * g;
                if seen.insert(p.clone()) {
                    all.push(p.clone());
                    frontier.push(p);
                }
            }
        }
        Self::from_elements(atoms, all)
    }

    /// The symmetric inverse monoid `I_n` of all partial bijections.
    pub fn rook(atoms: usize) -> Result<Self> {
        check_atoms(atoms)?;
        let mut out = Vec::new();
        let mut table = vec![None; atoms];
        fn rec(
            x: usize,
            atoms: usize,
            used: u64,
            table: &mut Vec<Option<usize>>,
            out: &mut Vec<PartialBijection>,
        ) {
            if x == atoms {
                out.push(PartialBijection::from_table(atoms, table));
                return;
            }
            table[x] = None;
            rec(x + 1, atoms, used, table, out);
            for y in 0..atoms {
                if used >> y & 1 == 0 {
                    table[x] = Some(y);
                    rec(x + 1, atoms, used | 1 << y, table, out);
                }
            }
            table[x] = None;
        }
        rec(0, atoms, 0, &mut table, &mut out);
        Self::from_elements(atoms, out)
    }

    /// All partial bijections whose graph stays inside the blocks of a
    /// partition of the atoms.
    pub fn block_monoid(atoms: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        check_atoms(atoms)?;
        let mut label = vec![usize::MAX; atoms];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= atoms {
                    return Err(Error::Domain(format!("atom {x} outside 0..{atoms}")));
                }
                if label[x] != usize::MAX {
                    return Err(Error::Domain(format!("atom {x} listed in two blocks")));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Domain(format!("atom {x} not covered by the partition")));
        }
        let all = Self::rook(atoms)?;
        Self::from_elements(
            atoms,
            all.elements
                .into_iter()
                .filter(|s| s.pairs().all(|(x, y)| label[x] == label[y])),
        )
    }

    /// The commutative monoid `E = 2^atoms` of all partial identities.
    pub fn diagonal(atoms: usize) -> Result<Self> {
        check_atoms(atoms)?;
        if atoms > 20 {
            return Err(Error::guard("diagonal monoid atoms", atoms as u128, 20));
        }
        Self::from_elements(
            atoms,
            (0..=full_mask(atoms))
                .map(|m| PartialBijection::partial_identity(Idempotent::new(atoms, m))),
        )
    }

    /// Disjoint-union monoid `S1 × S2` acting on `atoms1 + atoms2` atoms.
    pub fn disjoint_union(a: &Self, b: &Self) -> Result<Self> {
        let atoms = a.atoms + b.atoms;
        check_atoms(atoms)?;
        let mut out = Vec::with_capacity(a.len() * b.len());
        for s in &a.elements {
            for t in &b.elements {
                let pairs: Vec<(usize, usize)> = s
                    .pairs()
                    .chain(t.pairs().map(|(x, y)| (x + a.atoms, y + a.atoms)))
                    .collect();
                out.push(PartialBijection::from_pairs(atoms, &pairs)?);
            }
        }
        Self::from_elements(atoms, out)
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PartialBijection] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &PartialBijection {
        &self.elements[i]
    }

    pub fn index_of(&self, s: &PartialBijection) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &PartialBijection) -> bool {
        self.index.contains_key(s)
    }

    /// Elements that had to be added to materialize `0` and `1`.
    pub fn added(&self) -> &[PartialBijection] {
        &self.added
    }

    pub fn zero(&self) -> PartialBijection {
        PartialBijection::zero(self.atoms)
    }

    pub fn one(&self) -> PartialBijection {
        PartialBijection::identity(self.atoms)
    }

    /// Indices of the idempotents.
    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.elements[i].is_idempotent())
            .collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PartialBijection> {
        self.elements.iter()
    }

    /// Index of a product, failing with a closure witness if it escapes.
    pub fn product_index(&self, s: usize, t: usize) -> Result<usize> {
        let p = &self.elements[s] * &self.elements[t];
        self.index_of(&p).ok_or_else(|| {
            Error::Closure(format!(
                "{} * {} = {} is not an element",
                self.elements[s], self.elements[t], p
            ))
        })
    }

    pub fn check_closure(&self) -> Result<()> {
        for s in &self.elements {
            let d = s.dagger();
            if !self.contains(&d) {
                return Err(Error::Closure(format!("inverse {d} of {s} is missing")));
            }
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                self.product_index(i, j)?;
            }
        }
        Ok(())
    }

    /// Closure, idempotents, fundamentality and the Clifford property.
    pub fn classify(&self) -> Result<ClassificationReport> {
        self.check_closure()?;
        let idempotents = self.idempotents();
        // Munn action e ↦ ses† on E(S); fundamental iff it separates elements.
        let mut signatures: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut fundamental = true;
        let mut witness = None;
        for (i, s) in self.elements.iter().enumerate() {
            let sd = s.dagger();
            let sig: Vec<usize> = idempotents
                .iter()
                .map(|&e| {
                    let c = &(s * &self.elements[e]) * &sd;
                    self.index[&c]
                })
                .collect();
            if let Some(&other) = signatures.get(&sig) {
                fundamental = false;
                witness.get_or_insert((other, i));
            } else {
                signatures.insert(sig, i);
            }
        }
        let clifford = self.elements.iter().all(|s| s.domain() == s.range());
        Ok(ClassificationReport {
            inverse_monoid: true,
            idempotents,
            fundamental,
            fundamental_witness: witness,
            clifford,
            added: self.added.clone(),
        })
    }

    /// `θ(s) = π s π⁻¹` for an atom permutation `π`; `None` unless it maps
    /// this monoid onto `other`.
    pub fn transport(&self, perm: &[usize], other: &Self) -> Option<Vec<usize>> {
        if self.atoms != other.atoms || self.len() != other.len() {
            return None;
        }
        self.elements
            .iter()
            .map(|s| other.index_of(&s.permute(perm)))
            .collect()
    }

    /// Finds an atom permutation carrying this monoid onto `other`.
    pub fn find_spatial_isomorphism(&self, other: &Self) -> Option<Vec<usize>> {
        if self.atoms != other.atoms || self.len() != other.len() {
            return None;
        }
        let n = self.atoms;
        // Prune with a cheap invariant: the number of elements whose domain
        // contains a given atom.
        let degree = |m: &Self, x: usize| m.elements.iter().filter(|s| s.domain().contains(x)).count();
        let d1: Vec<usize> = (0..n).map(|x| degree(self, x)).collect();
        let d2: Vec<usize> = (0..n).map(|x| degree(other, x)).collect();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn rec(
            x: usize,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            d1: &[usize],
            d2: &[usize],
            a: &FiniteInverseMonoid,
            b: &FiniteInverseMonoid,
        ) -> bool {
            if x == perm.len() {
                return a.transport(perm, b).is_some();
            }
            for y in 0..perm.len() {
                if !used[y] && d1[x] == d2[y] {
                    used[y] = true;
                    perm[x] = y;
                    if rec(x + 1, perm, used, d1, d2, a, b) {
                        return true;
                    }
                    used[y] = false;
                }
            }
            false
        }
        rec(0, &mut perm, &mut used, &d1, &d2, self, other).then_some(perm)
    }
}

/// Output of [`FiniteInverseMonoid::classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub inverse_monoid: bool,
    pub idempotents: Vec<usize>,
    pub fundamental: bool,
    /// Two distinct elements with the same action on `E(S)`.
    pub fundamental_witness: Option<(usize, usize)>,
    pub clifford: bool,
    pub added: Vec<PartialBijection>,
}

/// Product and inverse of phased elements; implemented by extensions.
pub trait PhasedProduct {
    fn multiply(&self, v: &PhasedElement, w: &PhasedElement) -> PhasedElement;
    fn dagger(&self, v: &PhasedElement) -> PhasedElement;
}

/// The quotient of a phased monoid by its Munn congruence.
#[derive(Clone, Debug)]
pub struct MunnQuotient {
    pub monoid: FiniteInverseMonoid,
    /// Position in `monoid` of the image of each input element.
    pub map: Vec<usize>,
    /// Input positions over each quotient element.
    pub fibers: Vec<Vec<usize>>,
}

/// Quotients `G` by the maximal idempotent-separating congruence, realizing
/// each class by its conjugation action `e ↦ v e v†` on the minimal nonzero
/// idempotents of `G`.
pub fn munn_quotient<P: PhasedProduct>(product: &P, g: &[PhasedElement]) -> Result<MunnQuotient> {
    let index: HashMap<&PhasedElement, usize> = g.iter().enumerate().map(|(i, v)| (v, i)).collect();
    for v in g {
        let d = product.dagger(v);
        if !index.contains_key(&d) {
            return Err(Error::Closure(format!("inverse {d} of {v} is missing")));
        }
        for w in g {
            let p = product.multiply(v, w);
            if !index.contains_key(&p) {
                return Err(Error::Closure(format!("{v} * {w} = {p} is not an element")));
            }
        }
    }
    let idempotents: Vec<&PhasedElement> =
        g.iter().filter(|v| product.multiply(v, v) == **v).collect();
    let leq = |a: &PhasedElement, b: &PhasedElement| product.multiply(a, b) == *a;
    let mut minimal: Vec<&PhasedElement> = idempotents
        .iter()
        .copied()
        .filter(|a| {
            !a.is_zero()
                && idempotents
                    .iter()
                    .all(|b| b.is_zero() || *b == *a || !leq(b, a))
        })
        .collect();
    minimal.sort();
    let atoms = minimal.len();
    if atoms == 0 {
        return Err(Error::Domain("no nonzero idempotents".into()));
    }
    let atom_of: HashMap<&PhasedElement, usize> =
        minimal.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut images = Vec::with_capacity(g.len());
    for v in g {
        let vd = product.dagger(v);
        let source = product.multiply(&vd, v);
        let mut pairs = Vec::new();
        for (x, a) in minimal.iter().enumerate() {
            if !leq(a, &source) {
                continue;
            }
            let c = product.multiply(&product.multiply(v, a), &vd);
            let y = atom_of.get(&c).copied().ok_or_else(|| {
                Error::InvariantViolation(format!("conjugate of a minimal idempotent by {v} is not minimal"))
            })?;
            pairs.push((x, y));
        }
        images.push(PartialBijection::from_pairs(atoms, &pairs)?);
    }
    let monoid = FiniteInverseMonoid::new(atoms, images.iter().cloned())?;
    let map: Vec<usize> = images.iter().map(|s| monoid.index_of(s).unwrap()).collect();
    let mut fibers = vec![Vec::new(); monoid.len()];
    for (i, &m) in map.iter().enumerate() {
        fibers[m].push(i);
    }
    // q restricted to the idempotents of G is a bijection onto E(S).
    for (i, s) in monoid.iter().enumerate() {
        if s.is_idempotent() {
            let idem_count = fibers[i].iter().filter(|&&v| idempotents.contains(&&g[v])).count();
            if idem_count != 1 {
                return Err(Error::InvariantViolation(format!(
                    "{idem_count} idempotents of G lie over {s}"
                )));
            }
        }
    }
    Ok(MunnQuotient { monoid, map, fibers })
}
