//! Spectral sets of `S` and the `D`-bimodules of `M_q` they index.
//!
//! All subspaces here are finite dimensional, so every weak-*, Bures or
//! norm closure is the subspace itself and no closure step is performed.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::kernel::{DiagonalElement, RepMatrix, Representation};
use crate::linalg::{max_deviation, root_of_unity, Subspace};
use crate::semigroup::{FiniteInverseMonoid, PartialBijection};

/// Default bound on the number of minimal nonzero elements.
pub const DEFAULT_SPECTRAL_GUARD: usize = 25;
/// Default bound on `|R|` when enumerating bimodules.
pub const DEFAULT_BIMODULE_GUARD: usize = 16;

/// A subset of `S`, as a bitset over canonical element indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralSet {
    members: FixedBitSet,
}

impl SpectralSet {
    pub fn from_indices(size: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = FixedBitSet::with_capacity(size);
        members.extend(indices);
        SpectralSet { members }
    }

    pub fn full(size: usize) -> Self {
        Self::from_indices(size, 0..size)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        SpectralSet { members }
    }

    /// `{s† : s ∈ A}`.
    pub fn dagger(&self, monoid: &FiniteInverseMonoid) -> Self {
        Self::from_indices(
            monoid.len(),
            self.members
                .ones()
                .map(|i| monoid.index_of(&monoid.get(i).dagger()).unwrap()),
        )
    }

    pub fn names(&self, monoid: &FiniteInverseMonoid) -> Vec<String> {
        self.members.ones().map(|i| monoid.get(i).to_string()).collect()
    }
}

impl fmt::Debug for SpectralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.ones()).finish()
    }
}

fn zero_index(monoid: &FiniteInverseMonoid) -> usize {
    monoid.index_of(&monoid.zero()).unwrap()
}

/// Contains `0`, is downward closed, and is closed under binary orthogonal joins.
pub fn is_spectral_set(monoid: &FiniteInverseMonoid, a: &SpectralSet) -> bool {
    if !a.contains(zero_index(monoid)) {
        return false;
    }
    let members = a.indices();
    for &i in &members {
        let s = monoid.get(i);
        if monoid.iter().enumerate().any(|(t, u)| u.natural_leq(s) && !a.contains(t)) {
            return false;
        }
        for &j in &members {
            if let Some(join) = binary_join(monoid, s, monoid.get(j)) {
                if !a.contains(join) {
                    return false;
                }
            }
        }
    }
    true
}

/// Index of `s ∨ t` when the two are orthogonal and the join lies in `S`.
fn binary_join(monoid: &FiniteInverseMonoid, s: &PartialBijection, t: &PartialBijection) -> Option<usize> {
    if !s.is_orthogonal(t) {
        return None;
    }
    let join = PartialBijection::orthogonal_join(monoid.atoms(), [s, t]).ok()?;
    monoid.index_of(&join)
}

/// The least spectral set containing `generators`.
pub fn spectral_closure(monoid: &FiniteInverseMonoid, generators: impl IntoIterator<Item = usize>) -> SpectralSet {
    let mut a = SpectralSet::from_indices(monoid.len(), generators);
    a.members.insert(zero_index(monoid));
    loop {
        let before = a.len();
        for i in a.indices() {
            let s = monoid.get(i);
            for (t, u) in monoid.iter().enumerate() {
                if u.natural_leq(s) {
                    a.members.insert(t);
                }
            }
        }
        let members = a.indices();
        for &i in &members {
            for &j in &members {
                if let Some(join) = binary_join(monoid, monoid.get(i), monoid.get(j)) {
                    a.members.insert(join);
                }
            }
        }
        if a.len() == before {
            return a;
        }
    }
}

/// `A1 ⋎ A2`, computed as a closure and as the set of orthogonal joins
/// `s1 ∨ s2`; the two must agree.
pub fn join_span(monoid: &FiniteInverseMonoid, a1: &SpectralSet, a2: &SpectralSet) -> Result<SpectralSet> {
    let closure = spectral_closure(monoid, a1.indices().into_iter().chain(a2.indices()));
    let mut joins = SpectralSet::from_indices(monoid.len(), []);
    for i in a1.indices() {
        for j in a2.indices() {
            if let Some(join) = binary_join(monoid, monoid.get(i), monoid.get(j)) {
                joins.members.insert(join);
            }
        }
    }
    if joins != closure {
        return Err(Error::InvariantViolation(format!(
            "join span by closure {:?} differs from join span by pairs {:?}",
            closure.names(monoid),
            joins.names(monoid)
        )));
    }
    Ok(closure)
}

/// Nonzero elements with nothing strictly between them and `0`.
pub fn minimal_nonzero(monoid: &FiniteInverseMonoid) -> Vec<usize> {
    (0..monoid.len())
        .filter(|&i| {
            let s = monoid.get(i);
            !s.is_zero() && monoid.iter().all(|t| t.is_zero() || t == s || !t.natural_leq(s))
        })
        .collect()
}

/// Every spectral set, each determined by its trace on the minimal
/// nonzero elements; sorted canonically.
pub fn enumerate_spectral_sets(monoid: &FiniteInverseMonoid, guard: usize) -> Result<Vec<SpectralSet>> {
    let minimal = minimal_nonzero(monoid);
    if minimal.len() > guard {
        return Err(Error::guard("minimal elements", minimal.len() as u128, guard as u128));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << minimal.len()) {
        let trace: Vec<usize> = (0..minimal.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| minimal[b])
            .collect();
        let a = spectral_closure(monoid, trace.iter().copied());
        let back: Vec<usize> = minimal.iter().copied().filter(|&m| a.contains(m)).collect();
        if back == trace && is_spectral_set(monoid, &a) {
            out.push(a);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `λ_π(j(s))` for every `s`, in canonical order.
pub fn section_matrices(rep: &Representation<'_>) -> Result<Vec<RepMatrix>> {
    rep.section().values().iter().map(|v| rep.lambda(v)).collect()
}

fn diagonal_basis(rep: &Representation<'_>) -> Vec<RepMatrix> {
    let n = rep.basis().atoms();
    (0..n)
        .map(|x| {
            let e = crate::semigroup::Idempotent::atom(n, x);
            rep.pi(&DiagonalElement::from_idempotent(&e))
        })
        .collect()
}

/// Closed under left and right multiplication by `D`.
pub fn is_bimodule(rep: &Representation<'_>, b: &Subspace, tol: f64) -> bool {
    let d = diagonal_basis(rep);
    b.basis()
        .iter()
        .all(|x| d.iter().all(|p| b.contains(&(p * x), tol) && b.contains(&(x * p), tol)))
}

/// `Ψ(A) = span{λ_π(j(s)) : s ∈ A}`.
pub fn psi(rep: &Representation<'_>, a: &SpectralSet, tol: f64) -> Result<Subspace> {
    Ok(psi_from(&section_matrices(rep)?, a, tol))
}

/// [`psi`] over precomputed [`section_matrices`].
pub fn psi_from(mats: &[RepMatrix], a: &SpectralSet, tol: f64) -> Subspace {
    let n = mats.first().map_or(0, |m| m.nrows());
    Subspace::span(n, n, a.indices().iter().map(|&i| &mats[i]), tol)
}

/// `Θ(B) = {s : λ_π(j(s)) ∈ B}`, cross-checked against the normalizer
/// route `λ_π(j(s)) π(d) ∈ B` for a fixed unimodular `d`.
pub fn theta(rep: &Representation<'_>, b: &Subspace, tol: f64) -> Result<SpectralSet> {
    theta_from(rep, &section_matrices(rep)?, b, tol)
}

/// [`theta`] over precomputed [`section_matrices`].
pub fn theta_from(rep: &Representation<'_>, mats: &[RepMatrix], b: &Subspace, tol: f64) -> Result<SpectralSet> {
    if !is_bimodule(rep, b, tol) {
        return Err(Error::Domain("subspace is not a D-bimodule".into()));
    }
    let atoms = rep.basis().atoms();
    let unimodular = DiagonalElement::new(
        (0..atoms)
            .map(|x| root_of_unity(2 * atoms as u32 + 1, x as u32 + 1))
            .collect(),
    );
    let twist = rep.pi(&unimodular);
    let mut by_section = Vec::new();
    for (i, m) in mats.iter().enumerate() {
        let direct = b.contains(m, tol);
        let normalizer = b.contains(&(m * &twist), tol);
        if direct != normalizer {
            return Err(Error::InvariantViolation(format!(
                "section and normalizer membership disagree at element {i}"
            )));
        }
        if direct {
            by_section.push(i);
        }
    }
    Ok(SpectralSet::from_indices(mats.len(), by_section))
}

/// All `D`-bimodules of `M_q`, as sums of the lines `p_x M_q p_y`.
pub fn enumerate_bimodules(rep: &Representation<'_>, m: &Subspace, guard: usize, tol: f64) -> Result<Vec<Subspace>> {
    let d = diagonal_basis(rep);
    let n = rep.dim();
    let mut lines = Vec::new();
    for p in &d {
        for q in &d {
            let compressed: Vec<RepMatrix> = m.basis().iter().map(|x| p * x * q).collect();
            let line = Subspace::span(n, n, &compressed, tol);
            if line.dim() > 0 {
                lines.push(line);
            }
        }
    }
    if lines.len() > guard {
        return Err(Error::guard("bimodule lines", lines.len() as u128, guard as u128));
    }
    let mut out = Vec::with_capacity(1 << lines.len());
    for mask in 0u64..(1u64 << lines.len()) {
        let mut space = Subspace::zero(n, n);
        for (b, line) in lines.iter().enumerate() {
            if mask >> b & 1 == 1 {
                space = space.sum(line, tol);
            }
        }
        out.push(space);
    }
    Ok(out)
}

fn is_submonoid(monoid: &FiniteInverseMonoid, a: &SpectralSet) -> Result<bool> {
    let members = a.indices();
    for &i in &members {
        for &j in &members {
            if !a.contains(monoid.product_index(i, j)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn contains_idempotents(monoid: &FiniteInverseMonoid, a: &SpectralSet) -> bool {
    monoid.idempotents().into_iter().all(|e| a.contains(e))
}

/// Spectral sets that are monoids containing `E(S)`.
pub fn spectral_monoids(monoid: &FiniteInverseMonoid, guard: usize) -> Result<Vec<SpectralSet>> {
    let mut out = Vec::new();
    for a in enumerate_spectral_sets(monoid, guard)? {
        if contains_idempotents(monoid, &a) && is_submonoid(monoid, &a)? {
            out.push(a);
        }
    }
    Ok(out)
}

/// Spectral inverse submonoids containing `E(S)`.
pub fn full_submonoids(monoid: &FiniteInverseMonoid, guard: usize) -> Result<Vec<SpectralSet>> {
    Ok(spectral_monoids(monoid, guard)?
        .into_iter()
        .filter(|a| a.dagger(monoid) == *a)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntermediateReport {
    pub dim: usize,
    pub product_closed: bool,
    pub self_adjoint: bool,
    pub unital: bool,
    pub contains_diagonal: bool,
}

impl IntermediateReport {
    pub fn passed(&self) -> bool {
        self.product_closed && self.self_adjoint && self.unital && self.contains_diagonal
    }
}

/// Checks that `Ψ(T)` is a unital self-adjoint algebra between `D_q` and `M_q`.
pub fn intermediate_algebra_check(rep: &Representation<'_>, t: &SpectralSet, tol: f64) -> Result<IntermediateReport> {
    let space = psi(rep, t, tol)?;
    Ok(intermediate_report(rep, &space, tol))
}

fn intermediate_report(rep: &Representation<'_>, space: &Subspace, tol: f64) -> IntermediateReport {
    let n = rep.dim();
    let basis = space.basis();
    IntermediateReport {
        dim: space.dim(),
        product_closed: basis.iter().all(|a| basis.iter().all(|b| space.contains(&(a * b), tol))),
        self_adjoint: basis.iter().all(|a| space.contains(&a.adjoint(), tol)),
        unital: space.contains(&RepMatrix::identity(n, n), tol),
        contains_diagonal: diagonal_basis(rep).iter().all(|p| space.contains(p, tol)),
    }
}

/// Intermediate algebras `D_q ⊆ N ⊆ M_q` among the enumerated bimodules.
pub fn intermediate_algebras(rep: &Representation<'_>, bimodules: &[Subspace], tol: f64) -> Vec<Subspace> {
    bimodules
        .iter()
        .filter(|b| intermediate_report(rep, b, tol).passed())
        .cloned()
        .collect()
}

/// Spectral monoids `A ⊇ E(S)` with `A ⋎ A† = S`.
pub fn msd(monoid: &FiniteInverseMonoid, guard: usize) -> Result<Vec<SpectralSet>> {
    let full = SpectralSet::full(monoid.len());
    let mut out = Vec::new();
    for a in spectral_monoids(monoid, guard)? {
        if join_span(monoid, &a, &a.dagger(monoid))? == full {
            out.push(a);
        }
    }
    Ok(out)
}

/// Members of [`msd`] with `A ∩ A† = E(S)`.
pub fn mtr(monoid: &FiniteInverseMonoid, guard: usize) -> Result<Vec<SpectralSet>> {
    let idem = SpectralSet::from_indices(monoid.len(), monoid.idempotents());
    Ok(msd(monoid, guard)?
        .into_iter()
        .filter(|a| a.intersection(&a.dagger(monoid)) == idem)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubdiagonalReport {
    pub algebra_dim: usize,
    pub diagonal_dim: usize,
    pub product_closed: bool,
    /// Largest entry of `Φ_N(xy) − Φ_N(x)Φ_N(y)` over a basis of `Ψ(A)`.
    pub multiplicativity_deviation: f64,
    /// Largest entry of `Φ_N(nx) − nΦ_N(x)` and `Φ_N(xn) − Φ_N(x)n`.
    pub bimodularity_deviation: f64,
    /// `dim(Ψ(A) + Ψ(A)*)` against `dim M_q`.
    pub span_dim: usize,
    pub m_dim: usize,
    /// A strictly larger spectral monoid with the same diagonal and a
    /// multiplicative projection.
    pub larger: Option<SpectralSet>,
}

impl SubdiagonalReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.product_closed
            && self.multiplicativity_deviation <= tol
            && self.bimodularity_deviation <= tol
            && self.span_dim == self.m_dim
            && self.larger.is_none()
    }
}

fn phi_deviations(space: &Subspace, diagonal: &Subspace) -> (f64, f64) {
    let basis = space.basis();
    let mut mult: f64 = 0.0;
    for x in basis {
        for y in basis {
            let lhs = diagonal.project(&(x * y));
            let rhs = diagonal.project(x) * diagonal.project(y);
            mult = mult.max(max_deviation(&lhs, &rhs));
        }
    }
    let mut bimod: f64 = 0.0;
    for nb in diagonal.basis() {
        for x in basis {
            bimod = bimod.max(max_deviation(&diagonal.project(&(nb * x)), &(nb * diagonal.project(x))));
            bimod = bimod.max(max_deviation(&diagonal.project(&(x * nb)), &(diagonal.project(x) * nb)));
        }
    }
    (mult, bimod)
}

/// Builds `𝒜 = Ψ(A)`, `N = 𝒜 ∩ 𝒜*` and the Hilbert-Schmidt projection
/// `Φ_N`, then checks multiplicativity, density and maximality.
pub fn verify_subdiagonal(
    rep: &Representation<'_>,
    m: &Subspace,
    a: &SpectralSet,
    guard: usize,
    tol: f64,
) -> Result<SubdiagonalReport> {
    let monoid = rep.extension().base();
    let mats = section_matrices(rep)?;
    let space = psi_from(&mats, a, tol);
    let adjoint = space.adjoint(tol);
    let diagonal = space.intersection(&adjoint, tol);
    let basis = space.basis();
    let product_closed = basis.iter().all(|x| basis.iter().all(|y| space.contains(&(x * y), tol)));
    let (multiplicativity_deviation, bimodularity_deviation) = phi_deviations(&space, &diagonal);
    let span_dim = space.sum(&adjoint, tol).dim();

    let mut larger = None;
    for b in spectral_monoids(monoid, guard)? {
        if b == *a || !a.is_subset(&b) {
            continue;
        }
        let bigger = psi_from(&mats, &b, tol);
        let bigger_diag = bigger.intersection(&bigger.adjoint(tol), tol);
        if !bigger_diag.same_as(&diagonal, tol) {
            continue;
        }
        let (mult, _) = phi_deviations(&bigger, &bigger_diag);
        if mult <= tol {
            larger = Some(b);
            break;
        }
    }
    Ok(SubdiagonalReport {
        algebra_dim: space.dim(),
        diagonal_dim: diagonal.dim(),
        product_closed,
        multiplicativity_deviation,
        bimodularity_deviation,
        span_dim,
        m_dim: m.dim(),
        larger,
    })
}
