//! Idempotent-separating extensions `P ↪ G → S` with `μ_k` phases.
//!
//! `G` is realized in the Lausch picture: pairs `[s, p]` of a monoid
//! element and a phase function on its domain, multiplied through a
//! normalized 2-cocycle `c`:
//!
//! ```text
//! [s, p]·[t, r] = [st, (p∘t) + r + c(s, t)]   (exponents mod k)
//! ```

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::semigroup::{FiniteInverseMonoid, Idempotent, PartialBijection, PhasedElement, PhasedProduct};

/// Default bound on enumerated candidates in cohomology searches.
pub const DEFAULT_COHOMOLOGY_GUARD: u128 = 10_000_000;
/// Default bound on `|S|` for equivalence searches.
pub const DEFAULT_EQUIVALENCE_GUARD: usize = 40;
/// Default bound on `|G|` for explicit enumeration.
pub const DEFAULT_ELEMENT_GUARD: u128 = 1_000_000;

fn modk(x: i64, k: u32) -> u32 {
    x.rem_euclid(k as i64) as u32
}

/// A normalized 2-cocycle `c: S × S → phase arrays`, entry `(s, t)` listed
/// over `dom(st)` in increasing atom order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    k: u32,
    entries: BTreeMap<(usize, usize), Vec<u32>>,
}

impl CocycleTable {
    pub fn trivial(monoid: &FiniteInverseMonoid, k: u32) -> Self {
        Self::from_fn(monoid, k, |_, _, _| 0)
    }

    /// Builds every entry from `f(s, t, y)` for `y ∈ dom(st)`.
    pub fn from_fn(monoid: &FiniteInverseMonoid, k: u32, mut f: impl FnMut(usize, usize, usize) -> u32) -> Self {
        let mut entries = BTreeMap::new();
        for (i, s) in monoid.iter().enumerate() {
            for (j, t) in monoid.iter().enumerate() {
                let st = s * t;
                let row = st.domain().iter().map(|y| f(i, j, y) % k).collect();
                entries.insert((i, j), row);
            }
        }
        CocycleTable { k, entries }
    }

    /// Builds a table from explicit entries.
    ///
    /// Entries forced by normalization (an idempotent argument) or by
    /// support (`st = 0`) may be omitted and are filled with zeros; any
    /// other missing entry is rejected.
    pub fn from_entries<I>(monoid: &FiniteInverseMonoid, k: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Vec<u32>)>,
    {
        if k == 0 {
            return Err(Error::format("k", "phase order must be at least 1"));
        }
        let mut table = BTreeMap::new();
        for ((i, j), row) in entries {
            if i >= monoid.len() || j >= monoid.len() {
                return Err(Error::format(format!("cocycle({i},{j})"), "element index out of range"));
            }
            if let Some(&p) = row.iter().find(|&&p| p >= k) {
                return Err(Error::format(
                    format!("cocycle({},{})", monoid.get(i), monoid.get(j)),
                    format!("exponent {p} is not reduced mod {k}"),
                ));
            }
            if table.insert((i, j), row).is_some() {
                return Err(Error::format(
                    format!("cocycle({},{})", monoid.get(i), monoid.get(j)),
                    "duplicate entry",
                ));
            }
        }
        for (i, s) in monoid.iter().enumerate() {
            for (j, t) in monoid.iter().enumerate() {
                if table.contains_key(&(i, j)) {
                    continue;
                }
                let st = s * t;
                if s.is_idempotent() || t.is_idempotent() || st.is_zero() {
                    table.insert((i, j), vec![0; st.rank()]);
                } else {
                    return Err(Error::format(
                        format!("cocycle({s},{t})"),
                        "missing entry",
                    ));
                }
            }
        }
        Ok(CocycleTable { k, entries: table })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn entry(&self, s: usize, t: usize) -> &[u32] {
        &self.entries[&(s, t)]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<u32>)> {
        self.entries.iter()
    }

    /// Value of `c(s, t)` at atom `y ∈ dom(st)`.
    pub fn value(&self, monoid: &FiniteInverseMonoid, s: usize, t: usize, y: usize) -> u32 {
        let st = monoid.get(s) * monoid.get(t);
        let pos = st.domain_position(y).expect("atom outside dom(st)");
        self.entries[&(s, t)][pos]
    }

    /// The coboundary `(δb)(s,t) = (b(s)∘t) + b(t) − b(st)`.
    pub fn coboundary(monoid: &FiniteInverseMonoid, k: u32, b: &Cochain) -> Self {
        Self::from_fn(monoid, k, |i, j, y| {
            let t = monoid.get(j);
            let st = monoid.get(i) * t;
            let st_idx = monoid.index_of(&st).unwrap();
            let v = b.at(monoid, i, t.apply(y).unwrap()) as i64 + b.at(monoid, j, y) as i64
                - b.at(monoid, st_idx, y) as i64;
            modk(v, k)
        })
    }

    /// Pointwise sum of two tables over the same monoid.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        let entries = self
            .entries
            .iter()
            .map(|(key, row)| {
                let sum = row
                    .iter()
                    .zip(&other.entries[key])
                    .map(|(a, b)| (a + b) % self.k)
                    .collect();
                (*key, sum)
            })
            .collect();
        CocycleTable { k: self.k, entries }
    }

    /// Relabels the table along an atom permutation carrying `from` onto
    /// `to` (`theta[i]` is the image of element `i`).
    pub fn transport(&self, from: &FiniteInverseMonoid, to: &FiniteInverseMonoid, perm: &[usize], theta: &[usize]) -> Self {
        let mut inverse_theta = vec![0; theta.len()];
        for (i, &t) in theta.iter().enumerate() {
            inverse_theta[t] = i;
        }
        let mut inverse_perm = vec![0; perm.len()];
        for (x, &p) in perm.iter().enumerate() {
            inverse_perm[p] = x;
        }
        Self::from_fn(to, self.k, |i, j, y| {
            self.value(from, inverse_theta[i], inverse_theta[j], inverse_perm[y])
        })
    }
}

/// Violations found by [`validate_cocycle`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CocycleReport {
    /// Entries whose length differs from `|dom(st)|`.
    pub support: Vec<(usize, usize)>,
    /// Triples `(s, t, u)` where the cocycle identity fails.
    pub identity: Vec<(usize, usize, usize)>,
    /// Entries with an idempotent argument that are not identically zero.
    pub normalization: Vec<(usize, usize)>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.support.is_empty() && self.identity.is_empty() && self.normalization.is_empty()
    }
}

/// Checks support, normalization, and
/// `c(t,u) + c(s,tu) = (c(s,t)∘u) + c(st,u)` on `dom(stu)` for all triples.
pub fn validate_cocycle(monoid: &FiniteInverseMonoid, c: &CocycleTable) -> Result<CocycleReport> {
    let n = monoid.len();
    let mut report = CocycleReport::default();
    for i in 0..n {
        for j in 0..n {
            let row = c.entries.get(&(i, j)).ok_or_else(|| {
                Error::format(format!("cocycle({},{})", monoid.get(i), monoid.get(j)), "missing entry")
            })?;
            let st = monoid.get(i) * monoid.get(j);
            if row.len() != st.rank() {
                report.support.push((i, j));
            } else if (monoid.get(i).is_idempotent() || monoid.get(j).is_idempotent())
                && row.iter().any(|&p| p != 0)
            {
                report.normalization.push((i, j));
            }
        }
    }
    if !report.support.is_empty() {
        return Ok(report);
    }
    let k = c.k as i64;
    let product: Vec<usize> = (0..n * n)
        .map(|ij| monoid.product_index(ij / n, ij % n))
        .collect::<Result<_>>()?;
    for s in 0..n {
        for t in 0..n {
            let st = product[s * n + t];
            for u in 0..n {
                let tu = product[t * n + u];
                let stu = monoid.get(product[st * n + u]);
                let um = monoid.get(u);
                let ok = stu.domain().iter().all(|y| {
                    let lhs = c.value(monoid, t, u, y) as i64 + c.value(monoid, s, tu, y) as i64;
                    let rhs = c.value(monoid, s, t, um.apply(y).unwrap()) as i64 + c.value(monoid, st, u, y) as i64;
                    (lhs - rhs).rem_euclid(k) == 0
                });
                if !ok {
                    report.identity.push((s, t, u));
                }
            }
        }
    }
    Ok(report)
}

/// A 1-cochain `b: S → phase arrays over dom(s)`, zero on idempotents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    values: Vec<Vec<u32>>,
}

impl Cochain {
    pub fn zero(monoid: &FiniteInverseMonoid) -> Self {
        Cochain {
            values: monoid.iter().map(|s| vec![0; s.rank()]).collect(),
        }
    }

    /// Builds a cochain from `f(s, y)`; values on idempotents are forced to 0.
    pub fn from_fn(monoid: &FiniteInverseMonoid, k: u32, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        Cochain {
            values: monoid
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.domain()
                        .iter()
                        .map(|y| if s.is_idempotent() { 0 } else { f(i, y) % k })
                        .collect()
                })
                .collect(),
        }
    }

    /// `b(s)(y) = f(s(y), y)`, zero on the diagonal.
    ///
    /// Such cochains are compatible with restriction, so their coboundaries
    /// are normalized.
    pub fn from_relation(monoid: &FiniteInverseMonoid, k: u32, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        Self::from_fn(monoid, k, |i, y| {
            let x = monoid.get(i).apply(y).unwrap();
            if x == y {
                0
            } else {
                f(x, y)
            }
        })
    }

    pub fn values(&self, s: usize) -> &[u32] {
        &self.values[s]
    }

    fn at(&self, monoid: &FiniteInverseMonoid, s: usize, y: usize) -> u32 {
        self.values[s][monoid.get(s).domain_position(y).unwrap()]
    }
}

/// A finite extension of `S` by `μ_k`-phased diagonal partial isometries.
#[derive(Clone, Debug)]
pub struct Extension {
    base: FiniteInverseMonoid,
    k: u32,
    cocycle: CocycleTable,
}

impl Extension {
    /// Validates the cocycle and builds the extension.
    pub fn new(base: FiniteInverseMonoid, cocycle: CocycleTable) -> Result<Self> {
        let report = validate_cocycle(&base, &cocycle)?;
        if !report.passed() {
            let m = |i: usize| base.get(i).to_string();
            let what = if let Some(&(s, t, u)) = report.identity.first() {
                format!("cocycle identity fails at ({}, {}, {})", m(s), m(t), m(u))
            } else if let Some(&(s, t)) = report.normalization.first() {
                format!("entry ({}, {}) has an idempotent argument but is nonzero", m(s), m(t))
            } else {
                let (s, t) = report.support[0];
                format!("entry ({}, {}) has the wrong length", m(s), m(t))
            };
            return Err(Error::Domain(format!("invalid cocycle: {what}")));
        }
        Ok(Extension {
            k: cocycle.k,
            base,
            cocycle,
        })
    }

    pub fn trivial(base: FiniteInverseMonoid, k: u32) -> Self {
        let cocycle = CocycleTable::trivial(&base, k);
        Extension { base, k, cocycle }
    }

    pub fn base(&self) -> &FiniteInverseMonoid {
        &self.base
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cocycle(&self) -> &CocycleTable {
        &self.cocycle
    }

    /// The quotient map `q`, as an index into the base monoid.
    pub fn q(&self, v: &PhasedElement) -> usize {
        self.base
            .index_of(v.bijection())
            .unwrap_or_else(|| panic!("{v} does not lie over an element of S"))
    }

    pub fn is_member(&self, v: &PhasedElement) -> bool {
        self.base.contains(v.bijection()) && v.phases().iter().all(|&p| p < self.k)
    }

    /// `|G| = Σ_s k^{|dom s|}`.
    pub fn order(&self) -> u128 {
        self.base
            .iter()
            .map(|s| (self.k as u128).pow(s.rank() as u32))
            .sum()
    }

    /// Every element of `G`, grouped by `q` in canonical order.
    pub fn elements(&self, guard: u128) -> Result<Vec<PhasedElement>> {
        let order = self.order();
        if order > guard {
            return Err(Error::guard("extension elements", order, guard));
        }
        let mut out = Vec::with_capacity(order as usize);
        for s in self.base.iter() {
            out.extend(self.lifts(s));
        }
        Ok(out)
    }

    /// The fiber `q⁻¹(s)`.
    pub fn lifts<'a>(&'a self, s: &'a PartialBijection) -> impl Iterator<Item = PhasedElement> + 'a {
        let r = s.rank() as u32;
        let k = self.k as u64;
        (0..(k.pow(r))).map(move |mut code| {
            let phases = (0..r)
                .map(|_| {
                    let p = (code % k) as u32;
                    code /= k;
                    p
                })
                .collect();
            PhasedElement::new(s.clone(), phases).unwrap()
        })
    }

    /// `ι(P)`: the phased partial identities.
    pub fn diagonal_elements(&self) -> Vec<PhasedElement> {
        self.base
            .iter()
            .filter(|s| s.is_idempotent())
            .flat_map(|s| self.lifts(s))
            .collect()
    }

    pub fn unit(&self) -> PhasedElement {
        PhasedElement::unphased(self.base.one())
    }

    /// The twisted product in `G`.
    pub fn g_multiply(&self, v: &PhasedElement, w: &PhasedElement) -> PhasedElement {
        let (s, t) = (self.q(v), self.q(w));
        let st = v.bijection() * w.bijection();
        let c = self.cocycle.entry(s, t);
        let phases = st
            .pairs()
            .enumerate()
            .map(|(i, (y, _))| {
                let ty = w.bijection().apply(y).unwrap();
                (v.phase_at(ty).unwrap() + w.phase_at(y).unwrap() + c[i]) % self.k
            })
            .collect();
        PhasedElement::new(st, phases).unwrap()
    }

    /// The inverse `[s,p]† = [s†, −(p∘s†) − c(s,s†)]`.
    pub fn g_dagger(&self, v: &PhasedElement) -> PhasedElement {
        let s = v.bijection();
        let sd = s.dagger();
        let s_idx = self.q(v);
        let sd_idx = self.base.index_of(&sd).expect("S not closed under inverse");
        let c = self.cocycle.entry(s_idx, sd_idx);
        let phases = sd
            .pairs()
            .enumerate()
            .map(|(i, (_, y))| modk(-(v.phase_at(y).unwrap() as i64) - c[i] as i64, self.k))
            .collect::<Vec<_>>();
        // dom(ss†) = dom(s†), so c(s,s†) is indexed like s†.
        debug_assert_eq!(c.len(), sd.rank());
        PhasedElement::new(sd, phases).unwrap()
    }

    pub fn is_idempotent(&self, v: &PhasedElement) -> bool {
        self.g_multiply(v, v) == *v
    }
}

impl PhasedProduct for Extension {
    fn multiply(&self, v: &PhasedElement, w: &PhasedElement) -> PhasedElement {
        self.g_multiply(v, w)
    }

    fn dagger(&self, v: &PhasedElement) -> PhasedElement {
        self.g_dagger(v)
    }
}

/// A section `j: S → G` of `q`, indexed by the canonical order of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    values: Vec<PhasedElement>,
}

impl Section {
    pub fn from_values(values: Vec<PhasedElement>) -> Self {
        Section { values }
    }

    /// The section `s ↦ [s, 0]`.
    pub fn unphased(ext: &Extension) -> Self {
        Section {
            values: ext.base.iter().cloned().map(PhasedElement::unphased).collect(),
        }
    }

    pub fn get(&self, s: usize) -> &PhasedElement {
        &self.values[s]
    }

    pub fn values(&self) -> &[PhasedElement] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Returns a copy with the phase of `j(s)` at atom `x` shifted by `delta`.
    pub fn with_phase_shift(&self, k: u32, s: usize, x: usize, delta: u32) -> Self {
        let mut values = self.values.clone();
        let v = &values[s];
        let pos = v.bijection().domain_position(x).expect("atom outside domain");
        let mut phases = v.phases().to_vec();
        phases[pos] = (phases[pos] + delta) % k;
        values[s] = PhasedElement::new(v.bijection().clone(), phases).unwrap();
        Section { values }
    }
}

/// A maximal pairwise meet-orthogonal set containing `1`, built greedily in
/// canonical order.
pub fn maximal_meet_orthogonal(monoid: &FiniteInverseMonoid) -> Vec<usize> {
    let one = monoid.index_of(&monoid.one()).unwrap();
    let mut chosen = vec![one];
    for (i, s) in monoid.iter().enumerate() {
        if i == one || s.is_zero() {
            continue;
        }
        if chosen.iter().all(|&b| s.meet(monoid.get(b)).meet.is_zero()) {
            chosen.push(i);
        }
    }
    chosen
}

/// An order-preserving section with `j(s†) = j(s)†`, built from
/// zero-phase lifts.
pub fn order_preserving_section(ext: &Extension) -> Result<Section> {
    let j = order_preserving_section_with(ext, |s| vec![0; s.rank()], |s| vec![0; s.rank()])?;
    dagger_compatible(ext, &j)
}

/// Makes an order-preserving section commute with the involution.
///
/// Order preservation does not force `j(s†) = j(s)†`: in the trivial
/// extension of `I_2` with `k = 2`, `j(swap) = [swap, (1, 0)]` restricts to
/// `j(t01) = [t01, 1]` and `j(t10) = [t10, 0]`, and `j(t01)† ≠ j(t10)`.
/// Every `s` is the orthogonal join of its restrictions `sa` to atoms `a` of
/// `E(S)`, and these are the minimal nonzero elements. Keeping `j(m)` for
/// one member of each pair `{m, m†}`, setting `j(m†) = j(m)†` and rebuilding
/// `j(s)` as the join of the `j(sa)` preserves order. A self-inverse minimal
/// `m` keeps its value unless some `[m, p]` is self-adjoint.
pub fn dagger_compatible(ext: &Extension, j: &Section) -> Result<Section> {
    let monoid = &ext.base;
    let atoms: Vec<Idempotent> = {
        let idem: Vec<Idempotent> = monoid
            .iter()
            .filter(|e| e.is_idempotent() && !e.is_zero())
            .map(|e| e.domain())
            .collect();
        idem.iter()
            .copied()
            .filter(|a| !idem.iter().any(|b| b != a && b.leq(a)))
            .collect()
    };
    let mut minimal: Vec<Option<PhasedElement>> = vec![None; monoid.len()];
    for (m, s) in monoid.iter().enumerate() {
        if minimal[m].is_some() || !atoms.contains(&s.domain()) {
            continue;
        }
        let md = monoid.index_of(&s.dagger()).unwrap();
        let value = j.get(m).clone();
        if md != m {
            minimal[md] = Some(ext.g_dagger(&value));
            minimal[m] = Some(value);
            continue;
        }
        let self_adjoint = |v: &PhasedElement| ext.g_dagger(v) == *v;
        let mut chosen = value.clone();
        if !self_adjoint(&value) && u128::from(ext.k).pow(s.rank() as u32) <= DEFAULT_ELEMENT_GUARD {
            if let Some(v) = ext.lifts(s).find(|v| self_adjoint(v)) {
                chosen = v;
            }
        }
        minimal[m] = Some(chosen);
    }
    let values = monoid
        .iter()
        .map(|s| {
            let mut phases = Vec::with_capacity(s.rank());
            for y in s.domain().iter() {
                let a = atoms.iter().find(|a| a.contains(y)).unwrap();
                let sa = s * &a.to_bijection();
                let v = minimal[monoid.index_of(&sa).unwrap()].as_ref().unwrap();
                phases.push(v.phase_at(y).unwrap());
            }
            PhasedElement::new(s.clone(), phases)
        })
        .collect::<Result<_>>()?;
    Ok(Section { values })
}

/// Builds an order-preserving section from arbitrary lifts.
///
/// `lift_b` chooses `j` on a maximal meet-orthogonal set `B ∋ 1`; `j` is
/// extended by `j(se) = j(s)j(e)` below each member of `B`. Every remaining
/// `t` gets the arbitrary lift `w = [t, lift_rest(t)]`, corrected by the
/// diagonal element `h` glued from `h_s = w† j(t ∧ s)`, `s ∈ B`.
pub fn order_preserving_section_with(
    ext: &Extension,
    mut lift_b: impl FnMut(&PartialBijection) -> Vec<u32>,
    mut lift_rest: impl FnMut(&PartialBijection) -> Vec<u32>,
) -> Result<Section> {
    let monoid = &ext.base;
    let n = monoid.atoms();
    let mut j: Vec<Option<PhasedElement>> = vec![None; monoid.len()];
    for (i, s) in monoid.iter().enumerate() {
        if s.is_idempotent() {
            j[i] = Some(PhasedElement::unphased(s.clone()));
        }
    }
    let b = maximal_meet_orthogonal(monoid);
    for &s_idx in &b {
        let s = monoid.get(s_idx);
        let js = if s.is_idempotent() {
            j[s_idx].clone().unwrap()
        } else {
            let phases: Vec<u32> = lift_b(s).into_iter().map(|p| p % ext.k).collect();
            PhasedElement::new(s.clone(), phases)?
        };
        // Extend to everything below s: j(se) = j(s)j(e).
        for e in monoid.iter().filter(|e| e.is_idempotent() && e.leq_domain_of(s)) {
            let se = s * e;
            let idx = monoid.index_of(&se).unwrap();
            let value = ext.g_multiply(&js, &PhasedElement::unphased(e.clone()));
            if let Some(existing) = &j[idx] {
                if *existing != value {
                    return Err(Error::InvariantViolation(format!(
                        "the sets below members of B overlap at {se}"
                    )));
                }
            }
            j[idx] = Some(value);
        }
    }
    for (t_idx, t) in monoid.iter().enumerate() {
        if j[t_idx].is_some() {
            continue;
        }
        let phases: Vec<u32> = lift_rest(t).into_iter().map(|p| p % ext.k).collect();
        let w = PhasedElement::new(t.clone(), phases)?;
        let wd = ext.g_dagger(&w);
        let mut h_support = 0u64;
        let mut h_phases = vec![None; n];
        for &s_idx in &b {
            let m = t.meet(monoid.get(s_idx)).meet;
            if m.is_zero() {
                continue;
            }
            let jm = j[monoid.index_of(&m).unwrap()].as_ref().unwrap();
            let h_s = ext.g_multiply(&wd, jm);
            if !h_s.is_diagonal() {
                return Err(Error::InvariantViolation(format!("h_s for {t} is not diagonal")));
            }
            let e_s = h_s.bijection().domain();
            if e_s.support() & h_support != 0 {
                return Err(Error::InvariantViolation(format!("supports of h_s overlap for {t}")));
            }
            h_support |= e_s.support();
            for x in e_s.iter() {
                h_phases[x] = h_s.phase_at(x);
            }
        }
        // On a finite discrete space the dense open union is everything.
        if h_support != t.domain().support() {
            return Err(Error::InvariantViolation(format!(
                "glued h does not cover the domain of {t}"
            )));
        }
        let h_bij = Idempotent::new(n, h_support).to_bijection();
        let h = PhasedElement::new(
            h_bij.clone(),
            h_bij.domain().iter().map(|x| h_phases[x].unwrap()).collect(),
        )?;
        j[t_idx] = Some(ext.g_multiply(&w, &h));
    }
    Ok(Section {
        values: j.into_iter().map(Option::unwrap).collect(),
    })
}

trait LeqDomain {
    fn leq_domain_of(&self, s: &PartialBijection) -> bool;
}

impl LeqDomain for PartialBijection {
    /// For an idempotent `e`: `e ≤ s†s`.
    fn leq_domain_of(&self, s: &PartialBijection) -> bool {
        self.domain().leq(&s.domain())
    }
}

/// Which of the three equivalent order-preservation conditions hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionReport {
    pub unit: bool,
    /// A pair `s ≤ t` with `j(s) ≰ j(t)`.
    pub order_violation: Option<(usize, usize)>,
    /// A triple `(e, s, f)` with `j(esf) ≠ j(e)j(s)j(f)`.
    pub conjugation_violation: Option<(usize, usize, usize)>,
    /// A pair with `j(s ∧ t) ≠ j(s) ∧ j(t)`.
    pub meet_violation: Option<(usize, usize)>,
    /// An element with `j(s†) ≠ j(s)†`.
    pub dagger_violation: Option<usize>,
}

impl SectionReport {
    pub fn order_preserving(&self) -> bool {
        self.unit && self.order_violation.is_none()
    }

    pub fn conjugation(&self) -> bool {
        self.conjugation_violation.is_none()
    }

    pub fn meets(&self) -> bool {
        self.unit && self.meet_violation.is_none()
    }

    pub fn all_pass(&self) -> bool {
        self.order_preserving() && self.conjugation() && self.meets() && self.dagger_violation.is_none()
    }
}

pub fn validate_section(ext: &Extension, j: &Section) -> Result<SectionReport> {
    let monoid = &ext.base;
    if j.len() != monoid.len() {
        return Err(Error::Domain(format!(
            "section has {} values for {} elements",
            j.len(),
            monoid.len()
        )));
    }
    for (i, s) in monoid.iter().enumerate() {
        let v = j.get(i);
        if v.bijection() != s || !ext.is_member(v) {
            return Err(Error::Domain(format!("j({s}) = {v} does not lie over {s}")));
        }
    }
    let n = monoid.len();
    let idem = monoid.idempotents();
    let one = monoid.index_of(&monoid.one()).unwrap();
    let unit = *j.get(one) == ext.unit();

    let mut order_violation = None;
    'order: for s in 0..n {
        for t in 0..n {
            if monoid.get(s).natural_leq(monoid.get(t)) && !j.get(s).natural_leq(j.get(t)) {
                order_violation = Some((s, t));
                break 'order;
            }
        }
    }

    let mut conjugation_violation = None;
    'conj: for s in 0..n {
        for &e in &idem {
            for &f in &idem {
                let esf = &(monoid.get(e) * monoid.get(s)) * monoid.get(f);
                let lhs = j.get(monoid.index_of(&esf).unwrap());
                let rhs = ext.g_multiply(&ext.g_multiply(j.get(e), j.get(s)), j.get(f));
                if *lhs != rhs {
                    conjugation_violation = Some((e, s, f));
                    break 'conj;
                }
            }
        }
    }

    let mut meet_violation = None;
    'meet: for s in 0..n {
        for t in 0..n {
            let m = monoid.get(s).meet(monoid.get(t)).meet;
            let lhs = j.get(monoid.index_of(&m).unwrap());
            if *lhs != j.get(s).meet(j.get(t)) {
                meet_violation = Some((s, t));
                break 'meet;
            }
        }
    }

    let dagger_violation = (0..n).find(|&s| {
        let sd = monoid.index_of(&monoid.get(s).dagger()).unwrap();
        *j.get(sd) != ext.g_dagger(j.get(s))
    });

    Ok(SectionReport {
        unit,
        order_violation,
        conjugation_violation,
        meet_violation,
        dagger_violation,
    })
}

fn require_diagonal(v: PhasedElement, what: &str) -> Result<PhasedElement> {
    if v.is_diagonal() {
        Ok(v)
    } else {
        Err(Error::InvariantViolation(format!("{what} = {v} is not in P")))
    }
}

/// Lausch's cocycle `α(s,t) = j(st)† j(s) j(t)`.
pub fn lausch_alpha(ext: &Extension, j: &Section, s: usize, t: usize) -> Result<PhasedElement> {
    let st = ext.base.product_index(s, t)?;
    let v = ext.g_multiply(&ext.g_multiply(&ext.g_dagger(j.get(st)), j.get(s)), j.get(t));
    require_diagonal(v, "alpha")
}

/// The cocycle-like function `σ(v,s) = j(q(v)s)† v j(s)`.
pub fn sigma(ext: &Extension, j: &Section, v: &PhasedElement, s: usize) -> Result<PhasedElement> {
    let vs = ext.base.product_index(ext.q(v), s)?;
    let w = ext.g_multiply(&ext.g_multiply(&ext.g_dagger(j.get(vs)), v), j.get(s));
    require_diagonal(w, "sigma")
}

/// The diagonal part `Δ(v) = v j(q(v) ∧ 1)`.
pub fn delta(ext: &Extension, j: &Section, v: &PhasedElement) -> PhasedElement {
    let fixed = v.bijection().agreement(&ext.base.one()).to_bijection();
    let idx = ext.base.index_of(&fixed).unwrap();
    ext.g_multiply(v, j.get(idx))
}

struct Equation {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

/// Backtracking search over `Z_k` with unit propagation.
struct CoboundarySolver<'a> {
    k: i64,
    equations: &'a [Equation],
    occurs: Vec<Vec<usize>>,
    value: Vec<Option<i64>>,
    trail: Vec<usize>,
    candidates: u128,
    guard: u128,
}

impl CoboundarySolver<'_> {
    fn assign(&mut self, var: usize, val: i64) -> bool {
        let mut queue = vec![(var, val)];
        while let Some((v, x)) = queue.pop() {
            match self.value[v] {
                Some(old) if old == x => continue,
                Some(_) => return false,
                None => {}
            }
            self.value[v] = Some(x);
            self.trail.push(v);
            for &e in &self.occurs[v] {
                let eq = &self.equations[e];
                let mut sum = 0;
                let mut open: Option<(usize, i64)> = None;
                let mut open_count = 0;
                for &(u, c) in &eq.terms {
                    match self.value[u] {
                        Some(y) => sum += c * y,
                        None => {
                            open_count += 1;
                            open = Some((u, c));
                        }
                    }
                }
                if open_count == 0 {
                    if (sum - eq.rhs).rem_euclid(self.k) != 0 {
                        return false;
                    }
                } else if open_count == 1 {
                    let (u, c) = open.unwrap();
                    // Coefficients are ±1 after merging unless a variable
                    // repeats; only unit coefficients force a value.
                    if c.rem_euclid(self.k) == 1 {
                        queue.push((u, (eq.rhs - sum).rem_euclid(self.k)));
                    } else if (c + 1).rem_euclid(self.k) == 0 {
                        queue.push((u, (sum - eq.rhs).rem_euclid(self.k)));
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.value[v] = None;
        }
    }

    fn solve(&mut self) -> Result<bool> {
        let Some(var) = self.value.iter().position(Option::is_none) else {
            return Ok(self.equations.iter().all(|eq| {
                let sum: i64 = eq.terms.iter().map(|&(u, c)| c * self.value[u].unwrap()).sum();
                (sum - eq.rhs).rem_euclid(self.k) == 0
            }));
        };
        for x in 0..self.k {
            self.candidates += 1;
            if self.candidates > self.guard {
                return Err(Error::guard("coboundary candidates", self.candidates, self.guard));
            }
            let mark = self.trail.len();
            if self.assign(var, x) && self.solve()? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }
}

/// Searches for `b` with `c2 = c1 + δb`; `Ok(None)` means not cohomologous.
pub fn cohomologous(
    monoid: &FiniteInverseMonoid,
    c1: &CocycleTable,
    c2: &CocycleTable,
    guard: u128,
) -> Result<Option<Cochain>> {
    if c1.k != c2.k {
        return Err(Error::Domain(format!("phase orders differ: {} vs {}", c1.k, c2.k)));
    }
    let k = c1.k;
    // One variable per (non-idempotent s, y ∈ dom s).
    let mut var_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, s) in monoid.iter().enumerate() {
        if !s.is_idempotent() {
            for y in s.domain().iter() {
                let id = var_of.len();
                var_of.insert((i, y), id);
            }
        }
    }
    let nvars = var_of.len();
    let n = monoid.len();
    let mut equations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = monoid.get(j);
            let st = monoid.product_index(i, j)?;
            for y in monoid.get(st).domain().iter() {
                let mut terms: Vec<(usize, i64)> = Vec::new();
                let mut push = |key: (usize, usize), coef: i64| {
                    if let Some(&v) = var_of.get(&key) {
                        if let Some(term) = terms.iter_mut().find(|(u, _)| *u == v) {
                            term.1 += coef;
                        } else {
                            terms.push((v, coef));
                        }
                    }
                };
                push((i, t.apply(y).unwrap()), 1);
                push((j, y), 1);
                push((st, y), -1);
                terms.retain(|&(_, c)| c.rem_euclid(k as i64) != 0);
                let rhs = c2.value(monoid, i, j, y) as i64 - c1.value(monoid, i, j, y) as i64;
                if terms.is_empty() {
                    if rhs.rem_euclid(k as i64) != 0 {
                        return Ok(None);
                    }
                    continue;
                }
                equations.push(Equation { terms, rhs });
            }
        }
    }
    let mut occurs = vec![Vec::new(); nvars];
    for (e, eq) in equations.iter().enumerate() {
        for &(u, _) in &eq.terms {
            occurs[u].push(e);
        }
    }
    let mut solver = CoboundarySolver {
        k: k as i64,
        equations: &equations,
        occurs,
        value: vec![None; nvars],
        trail: Vec::new(),
        candidates: 0,
        guard,
    };
    if !solver.solve()? {
        return Ok(None);
    }
    let b = Cochain::from_fn(monoid, k, |i, y| solver.value[var_of[&(i, y)]].unwrap() as u32);
    debug_assert_eq!(c1.add(&CocycleTable::coboundary(monoid, k, &b)), *c2);
    Ok(Some(b))
}

/// `Some(b)` with `c = δb` when the cocycle is a coboundary.
pub fn is_trivial(monoid: &FiniteInverseMonoid, c: &CocycleTable, guard: u128) -> Result<Option<Cochain>> {
    cohomologous(monoid, &CocycleTable::trivial(monoid, c.k), c, guard)
}

/// Isomorphisms `θ: S1 → S2` and `α: G1 → G2` with `q2 ∘ α = θ ∘ q1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// Atom permutation implementing `θ`.
    pub atom_map: Vec<usize>,
    /// `theta[i]` is the index in `S2` of the image of element `i` of `S1`.
    pub theta: Vec<usize>,
    /// `α([s,p]) = [θ(s), p∘π⁻¹ − b(θ(s))]`.
    pub correction: Cochain,
}

impl EquivalenceWitness {
    pub fn apply(&self, ext1: &Extension, ext2: &Extension, v: &PhasedElement) -> PhasedElement {
        let s = ext1.q(v);
        let image = ext2.base.get(self.theta[s]).clone();
        let b = self.correction.values(self.theta[s]);
        let phases = image
            .pairs()
            .enumerate()
            .map(|(pos, (x, _))| {
                let source = self.atom_map.iter().position(|&p| p == x).unwrap();
                modk(v.phase_at(source).unwrap() as i64 - b[pos] as i64, ext1.k)
            })
            .collect();
        PhasedElement::new(image, phases).unwrap()
    }
}

/// Decides equivalence of two extensions by brute force over spatial
/// isomorphisms of the bases and coboundary corrections of the cocycles.
pub fn extensions_equivalent(
    ext1: &Extension,
    ext2: &Extension,
    size_guard: usize,
    cohomology_guard: u128,
) -> Result<Option<EquivalenceWitness>> {
    let (s1, s2) = (&ext1.base, &ext2.base);
    if s1.atoms() != s2.atoms() || s1.len() != s2.len() || ext1.k != ext2.k {
        return Ok(None);
    }
    if s1.len() > size_guard {
        return Err(Error::guard("monoid size for equivalence", s1.len() as u128, size_guard as u128));
    }
    let n = s1.atoms();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if let Some(theta) = s1.transport(&perm, s2) {
            let moved = ext1.cocycle.transport(s1, s2, &perm, &theta);
            if let Some(b) = cohomologous(s2, &moved, &ext2.cocycle, cohomology_guard)? {
                return Ok(Some(EquivalenceWitness {
                    atom_map: perm,
                    theta,
                    correction: b,
                }));
            }
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::munn_quotient;

    fn i2() -> FiniteInverseMonoid {
        FiniteInverseMonoid::rook(2).unwrap()
    }

    fn swap() -> PartialBijection {
        PartialBijection::from_pairs(2, &[(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn trivial_cocycles_validate() {
        for k in [1, 2] {
            let m = i2();
            assert!(validate_cocycle(&m, &CocycleTable::trivial(&m, k)).unwrap().passed());
        }
    }

    #[test]
    fn flipped_swap_entry_fails_at_swap_triple() {
        let m = i2();
        let sw = m.index_of(&swap()).unwrap();
        let mut entries: Vec<_> = CocycleTable::trivial(&m, 2).entries().map(|(k, v)| (*k, v.clone())).collect();
        for (key, row) in entries.iter_mut() {
            if *key == (sw, sw) {
                row[0] = 1;
            }
        }
        let c = CocycleTable::from_entries(&m, 2, entries).unwrap();
        let r = validate_cocycle(&m, &c).unwrap();
        assert!(r.identity.contains(&(sw, sw, sw)));
    }

    #[test]
    fn missing_entry_rejected() {
        let m = i2();
        let err = CocycleTable::from_entries(&m, 2, []).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn g_multiply_examples() {
        let ext = Extension::trivial(i2(), 2);
        let w = PhasedElement::new(swap(), vec![1, 0]).unwrap();
        assert_eq!(ext.g_multiply(&ext.unit(), &w), w);
        let v = PhasedElement::new(PartialBijection::singleton(2, 0, 1), vec![1]).unwrap();
        let u = PhasedElement::new(PartialBijection::singleton(2, 1, 0), vec![1]).unwrap();
        let e1 = PhasedElement::unphased(Idempotent::atom(2, 1).to_bijection());
        assert_eq!(ext.g_multiply(&v, &u), e1);
    }

    #[test]
    fn g_has_17_elements_and_is_associative() {
        let ext = Extension::trivial(i2(), 2);
        let g = ext.elements(DEFAULT_ELEMENT_GUARD).unwrap();
        assert_eq!(g.len(), 17);
        for a in &g {
            for b in &g {
                for c in &g {
                    assert_eq!(
                        ext.g_multiply(&ext.g_multiply(a, b), c),
                        ext.g_multiply(a, &ext.g_multiply(b, c))
                    );
                }
            }
        }
    }

    #[test]
    fn munn_quotient_forgets_phases() {
        let ext = Extension::trivial(i2(), 2);
        let g = ext.elements(DEFAULT_ELEMENT_GUARD).unwrap();
        let mq = munn_quotient(&ext, &g).unwrap();
        assert_eq!(mq.monoid.len(), 7);
        for (i, s) in mq.monoid.iter().enumerate() {
            assert_eq!(mq.fibers[i].len(), 1 << s.rank());
        }
        for (a, v) in g.iter().enumerate() {
            for (b, w) in g.iter().enumerate() {
                let vw = g.iter().position(|x| *x == ext.g_multiply(v, w)).unwrap();
                let prod = mq.monoid.get(mq.map[a]) * mq.monoid.get(mq.map[b]);
                assert_eq!(mq.monoid.index_of(&prod), Some(mq.map[vw]));
            }
        }
        assert!(mq.monoid.classify().unwrap().fundamental);

        let plain = Extension::trivial(i2(), 1);
        let g1 = plain.elements(DEFAULT_ELEMENT_GUARD).unwrap();
        let mq1 = munn_quotient(&plain, &g1).unwrap();
        assert_eq!(mq1.monoid, i2());
    }

    #[test]
    fn trivial_cocycle_gives_unphased_section() {
        let ext = Extension::trivial(i2(), 2);
        let j = order_preserving_section(&ext).unwrap();
        assert_eq!(j, Section::unphased(&ext));
        assert!(validate_section(&ext, &j).unwrap().all_pass());
    }

    #[test]
    fn flipped_phase_breaks_conjugation() {
        let ext = Extension::trivial(i2(), 2);
        let m = ext.base();
        let j = order_preserving_section(&ext).unwrap();
        let t01 = m.index_of(&PartialBijection::singleton(2, 0, 1)).unwrap();
        let bad = j.with_phase_shift(2, t01, 0, 1);
        let r = validate_section(&ext, &bad).unwrap();
        assert!(!r.conjugation() && !r.order_preserving() && !r.meets());
    }

    #[test]
    fn order_preservation_does_not_force_dagger() {
        let ext = Extension::trivial(i2(), 2);
        let t01 = PartialBijection::singleton(2, 0, 1);
        let j = order_preserving_section_with(
            &ext,
            |s| if *s == t01 { vec![1] } else { vec![0; s.rank()] },
            |s| vec![0; s.rank()],
        )
        .unwrap();
        let r = validate_section(&ext, &j).unwrap();
        assert!(r.unit && r.order_preserving() && r.conjugation() && r.meets());
        assert!(r.dagger_violation.is_some());
        let fixed = dagger_compatible(&ext, &j).unwrap();
        assert!(validate_section(&ext, &fixed).unwrap().all_pass());
        let i = ext.base().index_of(&t01).unwrap();
        assert_eq!(fixed.get(i), j.get(i));
    }

    #[test]
    fn non_section_rejected() {
        let ext = Extension::trivial(i2(), 2);
        let mut values = Section::unphased(&ext).values().to_vec();
        values.swap(0, 1);
        let err = validate_section(&ext, &Section::from_values(values)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn alpha_sigma_delta_examples() {
        let ext = Extension::trivial(i2(), 2);
        let m = ext.base();
        let j = order_preserving_section(&ext).unwrap();
        let sw = m.index_of(&swap()).unwrap();
        let dom = m.index_of(&swap().domain().to_bijection()).unwrap();
        assert_eq!(
            lausch_alpha(&ext, &j, sw, dom).unwrap(),
            PhasedElement::unphased(swap().domain().to_bijection())
        );
        assert!(delta(&ext, &j, j.get(sw)).is_zero());
        for s in 0..m.len() {
            for t in 0..m.len() {
                assert_eq!(sigma(&ext, &j, j.get(s), t).unwrap(), lausch_alpha(&ext, &j, s, t).unwrap());
            }
        }
    }

    #[test]
    fn cohomology_reflexive_and_round_trip() {
        let m = i2();
        let c = CocycleTable::trivial(&m, 2);
        let b = cohomologous(&m, &c, &c, DEFAULT_COHOMOLOGY_GUARD).unwrap().unwrap();
        assert_eq!(b, Cochain::zero(&m));
        let b = Cochain::from_relation(&m, 2, |x, _| x as u32);
        let c2 = CocycleTable::coboundary(&m, 2, &b);
        assert!(validate_cocycle(&m, &c2).unwrap().passed());
        let found = is_trivial(&m, &c2, DEFAULT_COHOMOLOGY_GUARD).unwrap().unwrap();
        assert_eq!(CocycleTable::coboundary(&m, 2, &found), c2);
    }

    #[test]
    fn cohomology_guard_trips() {
        let m = FiniteInverseMonoid::rook(3).unwrap();
        let b = Cochain::from_relation(&m, 4, |x, y| (3 * x + y) as u32);
        let c2 = CocycleTable::coboundary(&m, 4, &b);
        let err = is_trivial(&m, &c2, 1).unwrap_err();
        assert!(matches!(err, Error::SizeGuard { .. }));
    }

    #[test]
    fn equivalence_examples() {
        let ext = Extension::trivial(i2(), 2);
        let w = extensions_equivalent(&ext, &ext, DEFAULT_EQUIVALENCE_GUARD, DEFAULT_COHOMOLOGY_GUARD)
            .unwrap()
            .unwrap();
        assert_eq!(w.atom_map, vec![0, 1]);
        let i3 = Extension::trivial(FiniteInverseMonoid::rook(3).unwrap(), 2);
        assert!(extensions_equivalent(&ext, &i3, DEFAULT_EQUIVALENCE_GUARD, DEFAULT_COHOMOLOGY_GUARD)
            .unwrap()
            .is_none());
    }

    #[test]
    fn permutations_enumerated() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
