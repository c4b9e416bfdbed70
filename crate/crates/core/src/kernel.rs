//! The projection-valued kernel `K`, its positivity, and the matrix
//! representation `λ_π` of `G` on `ℓ²(R)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::boolean::groupoid_relation;
use crate::error::{Error, Result};
use crate::extension::{sigma, Extension, Section};
use crate::linalg::{max_deviation, min_eigenvalue, real_rank, root_of_unity, CMatrix};
use crate::semigroup::{Idempotent, PartialBijection, PhasedElement};

pub type RepMatrix = CMatrix;

/// An element of `D`: a complex function on atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalElement {
    values: Vec<Complex64>,
}

impl DiagonalElement {
    pub fn new(values: Vec<Complex64>) -> Self {
        DiagonalElement { values }
    }

    pub fn from_idempotent(e: &Idempotent) -> Self {
        DiagonalElement {
            values: (0..e.atoms())
                .map(|x| Complex64::new(if e.contains(x) { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.values
            .iter()
            .all(|v| v.norm() <= tol || (v - Complex64::new(1.0, 0.0)).norm() <= tol)
    }
}

/// `K(t,s) = j(s†t ∧ 1)`: the atoms where `s` and `t` agree.
pub fn kernel(ext: &Extension, j: &Section, t: usize, s: usize) -> Idempotent {
    let monoid = ext.base();
    let fixed = (&monoid.get(s).dagger() * monoid.get(t)).agreement(&monoid.one());
    let idx = monoid.index_of(&fixed.to_bijection()).expect("idempotent missing from S");
    j.get(idx).bijection().domain()
}

/// All values `K(s,t)` over `S × S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelMatrix {
    size: usize,
    entries: Vec<Idempotent>,
}

impl KernelMatrix {
    pub fn new(ext: &Extension, j: &Section) -> Self {
        let size = ext.base().len();
        let entries = (0..size * size).map(|ij| kernel(ext, j, ij / size, ij % size)).collect();
        KernelMatrix { size, entries }
    }

    pub fn get(&self, t: usize, s: usize) -> Idempotent {
        self.entries[t * self.size + s]
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Positivity data for one atom `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomPositivity {
    pub atom: usize,
    /// Index classes of the relation `ρ(K(s_i, s_j)) = 1`.
    pub classes: Vec<Vec<usize>>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelPsdReport {
    pub atoms: Vec<AtomPositivity>,
}

impl KernelPsdReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.atoms.iter().map(|a| a.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

/// The matrix `T(ρ)_{ij} = ρ(K(s_j, s_i))`.
pub fn atom_matrix(ext: &Extension, j: &Section, s_list: &[usize], atom: usize) -> DMatrix<f64> {
    let n = s_list.len();
    DMatrix::from_fn(n, n, |a, b| {
        if kernel(ext, j, s_list[b], s_list[a]).contains(atom) {
            1.0
        } else {
            0.0
        }
    })
}

/// Verifies, for every atom, that `T(ρ)` is an equivalence-class sum of
/// rank-one blocks `ζ ζᵀ` and has no eigenvalue below `−tol`.
pub fn kernel_psd_check(ext: &Extension, j: &Section, s_list: &[usize], tol: f64) -> Result<KernelPsdReport> {
    let n = s_list.len();
    let mut atoms = Vec::new();
    for rho in 0..ext.base().atoms() {
        let t = atom_matrix(ext, j, s_list, rho);
        let related = |a: usize, b: usize| t[(a, b)] == 1.0;
        for a in 0..n {
            for b in 0..n {
                if related(a, b) && !(related(b, a) && related(a, a)) {
                    return Err(Error::InvariantViolation(format!(
                        "kernel relation at atom {rho} not symmetric on ({a},{b})"
                    )));
                }
                for c in 0..n {
                    if related(a, b) && related(b, c) && !related(a, c) {
                        return Err(Error::InvariantViolation(format!(
                            "kernel relation at atom {rho} not transitive on ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for a in (0..n).filter(|&a| related(a, a)) {
            match classes.iter_mut().find(|c| related(c[0], a)) {
                Some(c) => c.push(a),
                None => classes.push(vec![a]),
            }
        }
        let mut sum = DMatrix::<f64>::zeros(n, n);
        for class in &classes {
            for &a in class {
                for &b in class {
                    sum[(a, b)] += 1.0;
                }
            }
        }
        if sum != t {
            return Err(Error::InvariantViolation(format!(
                "T({rho}) is not the sum of its class blocks"
            )));
        }
        let min = min_eigenvalue(&t);
        if min < -tol {
            return Err(Error::InvariantViolation(format!("T({rho}) has eigenvalue {min}")));
        }
        atoms.push(AtomPositivity {
            atom: rho,
            classes,
            min_eigenvalue: min,
        });
    }
    Ok(KernelPsdReport { atoms })
}

/// The pairs of `R` in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RBasis {
    atoms: usize,
    pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl RBasis {
    pub fn new(atoms: usize, pairs: Vec<(usize, usize)>) -> Self {
        let index = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        RBasis { atoms, pairs, index }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    /// Positions of the pairs `(y, y)`, in atom order.
    pub fn diagonal(&self) -> Vec<usize> {
        (0..self.atoms).map(|y| self.index[&(y, y)]).collect()
    }
}

/// `λ_π` on `ℓ²(R)` for a fixed extension and order-preserving section.
#[derive(Clone, Debug)]
pub struct Representation<'a> {
    ext: &'a Extension,
    section: &'a Section,
    basis: RBasis,
    singletons: HashMap<(usize, usize), usize>,
}

impl<'a> Representation<'a> {
    pub fn new(ext: &'a Extension, section: &'a Section) -> Result<Self> {
        let monoid = ext.base();
        let relation = groupoid_relation(monoid)?;
        let basis = RBasis::new(monoid.atoms(), relation.pairs().collect());
        let mut singletons = HashMap::new();
        for &(x, y) in basis.pairs() {
            let single = PartialBijection::singleton(monoid.atoms(), y, x);
            let idx = monoid.index_of(&single).ok_or_else(|| {
                Error::Domain(format!("S does not contain the singleton {single} below R"))
            })?;
            singletons.insert((x, y), idx);
        }
        Ok(Representation {
            ext,
            section,
            basis,
            singletons,
        })
    }

    pub fn extension(&self) -> &Extension {
        self.ext
    }

    pub fn section(&self) -> &Section {
        self.section
    }

    pub fn basis(&self) -> &RBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `λ_π(v) δ_(x,y) = σ(v, y↦x)(y) δ_(q(v)x, y)`.
    pub fn lambda(&self, v: &PhasedElement) -> Result<RepMatrix> {
        let n = self.dim();
        let mut m = RepMatrix::zeros(n, n);
        let qv = v.bijection();
        for (col, &(x, y)) in self.basis.pairs().iter().enumerate() {
            let Some(image) = qv.apply(x) else { continue };
            let s = self.singletons[&(x, y)];
            let phase = sigma(self.ext, self.section, v, s)?
                .phase_at(y)
                .expect("sigma(v, s) is supported on dom(s)");
            let row = self.basis.index_of(image, y).expect("R is closed under S");
            m[(row, col)] = root_of_unity(self.ext.k(), phase);
        }
        Ok(m)
    }

    /// `π(d)`: `δ_(x,y) ↦ d(x) δ_(x,y)`.
    pub fn pi(&self, d: &DiagonalElement) -> RepMatrix {
        let n = self.dim();
        let mut m = RepMatrix::zeros(n, n);
        for (i, &(x, _)) in self.basis.pairs().iter().enumerate() {
            m[(i, i)] = d.values()[x];
        }
        m
    }

    /// `π_*(P)`: the projection onto `span{δ_(y,y)}`.
    pub fn projection(&self) -> RepMatrix {
        let n = self.dim();
        let mut m = RepMatrix::zeros(n, n);
        for i in self.basis.diagonal() {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `V: ℓ²(X) → ℓ²(R)`, `e_y ↦ δ_(y,y)`.
    pub fn isometry(&self) -> CMatrix {
        let mut v = CMatrix::zeros(self.dim(), self.basis.atoms());
        for (y, i) in self.basis.diagonal().into_iter().enumerate() {
            v[(i, y)] = Complex64::new(1.0, 0.0);
        }
        v
    }

    /// `E(T) = π(diag(V* T V))`.
    pub fn expectation(&self, t: &RepMatrix) -> RepMatrix {
        let diag = self.basis.diagonal();
        let f = DiagonalElement::new(diag.iter().map(|&i| t[(i, i)]).collect());
        self.pi(&f)
    }

    /// Matrix dump: header line, then one `row,col,re,im` line per nonzero entry.
    pub fn dump(&self, m: &RepMatrix, tol: f64) -> String {
        let mut out = format!(
            "atoms={} k={} dim={}\n",
            self.basis.atoms(),
            self.ext.k(),
            self.dim()
        );
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                if z.norm() > tol {
                    writeln!(out, "{},{},{},{}", r, c, clean(z.re), clean(z.im)).unwrap();
                }
            }
        }
        out
    }
}

/// Formats a float with `-0` and float noise normalized.
fn clean(x: f64) -> String {
    let rounded = (x * 1e12).round() / 1e12;
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

/// Outcome of the Gram and intertwining checks.
#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub gram_rank: usize,
    pub relation_size: usize,
    /// Largest entry deviation of `λ_π(v)U − Uλ(v)` over all `v` and generators.
    pub intertwining_deviation: f64,
    /// First `(t, s, e)` with `K(t, se) ≠ K(t, s) e`.
    pub restriction_violation: Option<(usize, usize, usize)>,
    /// First `(t, r, s)` with `K(t, r) K(t, s) ≠ K(t, r ∧ s)`.
    pub meet_violation: Option<(usize, usize, usize)>,
}

impl GramReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.gram_rank == self.relation_size
            && self.intertwining_deviation <= tol
            && self.restriction_violation.is_none()
            && self.meet_violation.is_none()
    }
}

/// Checks the abstract module picture against `λ_π`.
///
/// Vectors `k_s ⊗ e_y` carry the scalar Gram form
/// `⟨k_s ⊗ e_x, k_t ⊗ e_y⟩ = δ_xy [x ∈ K(s,t)]`; the map
/// `U(k_s ⊗ e_y) = δ_(s(y), y)` must carry the abstract action
/// `λ(v)(k_s ⊗ e_y) = σ(v,s)(y) k_{q(v)s} ⊗ e_y` onto `λ_π(v)`.
pub fn abstract_gram_check(rep: &Representation<'_>, g: &[PhasedElement], tol: f64) -> Result<GramReport> {
    let ext = rep.extension();
    let j = rep.section();
    let monoid = ext.base();
    let n_s = monoid.len();
    let n_x = monoid.atoms();
    let kernel_matrix = KernelMatrix::new(ext, j);

    let size = n_s * n_x;
    let gram = DMatrix::from_fn(size, size, |a, b| {
        let (s, x) = (a / n_x, a % n_x);
        let (t, y) = (b / n_x, b % n_x);
        if x == y && kernel_matrix.get(s, t).contains(x) {
            1.0
        } else {
            0.0
        }
    });
    let gram_rank = real_rank(&gram, tol);

    let u_of = |s: usize, y: usize| -> Option<usize> {
        monoid.get(s).apply(y).map(|x| rep.basis().index_of(x, y).unwrap())
    };
    let mut intertwining_deviation: f64 = 0.0;
    for v in g {
        let lv = rep.lambda(v)?;
        let qv = ext.q(v);
        for s in 0..n_s {
            let qs = monoid.product_index(qv, s)?;
            for y in 0..n_x {
                let Some(col) = u_of(s, y) else { continue };
                let mut lhs = lv.column(col).clone_owned();
                if let Some(target) = u_of(qs, y) {
                    let phase = sigma(ext, j, v, s)?.phase_at(y).unwrap();
                    lhs[target] -= root_of_unity(ext.k(), phase);
                }
                let dev = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
                intertwining_deviation = intertwining_deviation.max(dev);
            }
        }
    }

    let idempotents = monoid.idempotents();
    let mut restriction_violation = None;
    'restrict: for t in 0..n_s {
        for s in 0..n_s {
            for &e in &idempotents {
                let se = monoid.product_index(s, e)?;
                let lhs = kernel_matrix.get(t, se);
                let rhs = kernel_matrix.get(t, s).meet(&monoid.get(e).domain());
                if lhs != rhs {
                    restriction_violation = Some((t, s, e));
                    break 'restrict;
                }
            }
        }
    }
    let mut meet_violation = None;
    'meet: for t in 0..n_s {
        for r in 0..n_s {
            for s in 0..n_s {
                let rs = monoid.index_of(&monoid.get(r).meet(monoid.get(s)).meet).unwrap();
                let lhs = kernel_matrix.get(t, r).meet(&kernel_matrix.get(t, s));
                if lhs != kernel_matrix.get(t, rs) {
                    meet_violation = Some((t, r, s));
                    break 'meet;
                }
            }
        }
    }

    Ok(GramReport {
        gram_rank,
        relation_size: rep.dim(),
        intertwining_deviation,
        restriction_violation,
        meet_violation,
    })
}

/// Outcome of the projection and isometry identities.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionReport {
    pub rank: usize,
    /// Largest deviation of `Pλ(v)P − λ(Δ(v))P` over `G`.
    pub compression_deviation: f64,
    /// Largest deviation of `VV* − P` and `V*V − I`.
    pub isometry_deviation: f64,
}

/// Verifies `Pλ(v)P = λ(Δ(v))P` on `g` and `VV* = P`, `V*V = I`.
pub fn projection_and_isometry(rep: &Representation<'_>, g: &[PhasedElement]) -> Result<ProjectionReport> {
    let p = rep.projection();
    let v = rep.isometry();
    let mut compression_deviation: f64 = 0.0;
    for w in g {
        let lhs = &p * rep.lambda(w)? * &p;
        let rhs = rep.lambda(&crate::extension::delta(rep.extension(), rep.section(), w))? * &p;
        compression_deviation = compression_deviation.max(max_deviation(&lhs, &rhs));
    }
    let n = rep.basis().atoms();
    let isometry_deviation = max_deviation(&(&v * v.adjoint()), &p)
        .max(max_deviation(&(v.adjoint() * &v), &CMatrix::identity(n, n)));
    let rank = rep.basis().diagonal().len();
    Ok(ProjectionReport {
        rank,
        compression_deviation,
        isometry_deviation,
    })
}
