//! Brute-force operator-algebra checks on the generated pair `(M_q, D_q)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extension::{delta, order_preserving_section, Extension};
use crate::kernel::{DiagonalElement, RepMatrix, Representation};
use crate::linalg::{
    commutant, complex_kernel, hs_norm, is_diagonal, max_deviation, relative_commutant, CMatrix, Subspace,
};
use crate::semigroup::{FiniteInverseMonoid, Idempotent, PartialBijection, PhasedElement};

/// Default bound on candidate graphs during recovery.
pub const DEFAULT_RECOVERY_GUARD: u128 = 1_000_000;
/// Largest `|R|` for which the double commutant is computed.
pub const DOUBLE_COMMUTANT_LIMIT: usize = 9;

/// A finite-dimensional matrix algebra given by an orthonormal basis.
#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    space: Subspace,
    pub product_closed: bool,
    pub adjoint_closed: bool,
    pub contains_identity: bool,
}

impl MatrixAlgebra {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[RepMatrix] {
        self.space.basis()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.shape().0
    }

    pub fn is_algebra(&self) -> bool {
        self.product_closed && self.adjoint_closed && self.contains_identity
    }
}

/// Orthonormalizes `matrices` and reports closure under products and adjoints.
pub fn span_basis(matrices: &[RepMatrix], tol: f64) -> Result<MatrixAlgebra> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Domain("span_basis needs at least one matrix".into()))?;
    let n = first.nrows();
    if matrices.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err(Error::Domain("matrices have different shapes".into()));
    }
    Ok(algebra_from_space(Subspace::span(n, n, matrices, tol), tol))
}

fn algebra_from_space(space: Subspace, tol: f64) -> MatrixAlgebra {
    let n = space.shape().0;
    let basis = space.basis();
    let product_closed = basis
        .iter()
        .all(|a| basis.iter().all(|b| space.contains(&(a * b), tol)));
    let adjoint_closed = basis.iter().all(|a| space.contains(&a.adjoint(), tol));
    let contains_identity = space.contains(&CMatrix::identity(n, n), tol);
    MatrixAlgebra {
        space,
        product_closed,
        adjoint_closed,
        contains_identity,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasaReport {
    pub m_dim: usize,
    pub d_dim: usize,
    pub relative_commutant_dim: usize,
    pub center_dim: usize,
}

impl MasaReport {
    pub fn masa(&self) -> bool {
        self.relative_commutant_dim == self.d_dim
    }
}

/// Compares `D' ∩ M` with `D` and reports the center of `M`.
pub fn masa_check(m: &MatrixAlgebra, d: &MatrixAlgebra, tol: f64) -> Result<MasaReport> {
    if !m.space.contains_space(&d.space, tol) {
        return Err(Error::Domain("D is not contained in M".into()));
    }
    let rel = relative_commutant(m.basis(), d.basis(), tol);
    let center = relative_commutant(m.basis(), m.basis(), tol);
    Ok(MasaReport {
        m_dim: m.dim(),
        d_dim: d.dim(),
        relative_commutant_dim: rel.dim(),
        center_dim: center.dim(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationReport {
    /// Largest deviation of `E(λ(v)) − λ(Δ(v))` over `G`.
    pub delta_deviation: f64,
    /// Largest deviation of `E(E(x)) − E(x)` on a basis of `M`.
    pub idempotent_deviation: f64,
    pub unital_deviation: f64,
    /// Smallest diagonal entry of `E(x*x)` over basis elements and their sums.
    pub positivity_min: f64,
    /// Rank of `x ↦ (x δ_(y,y))_y` on `M`.
    pub faithful_rank: usize,
    pub m_dim: usize,
}

impl ExpectationReport {
    pub fn faithful(&self) -> bool {
        self.faithful_rank == self.m_dim
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.delta_deviation <= tol
            && self.idempotent_deviation <= tol
            && self.unital_deviation <= tol
            && self.positivity_min >= -tol
            && self.faithful()
    }
}

pub fn expectation_properties(
    rep: &Representation<'_>,
    g: &[PhasedElement],
    m: &MatrixAlgebra,
    tol: f64,
) -> Result<ExpectationReport> {
    let mut delta_deviation: f64 = 0.0;
    for v in g {
        let lhs = rep.expectation(&rep.lambda(v)?);
        let rhs = rep.lambda(&delta(rep.extension(), rep.section(), v))?;
        delta_deviation = delta_deviation.max(max_deviation(&lhs, &rhs));
    }
    let n = rep.dim();
    let identity = CMatrix::identity(n, n);
    let unital_deviation = max_deviation(&rep.expectation(&identity), &identity);
    let basis = m.basis();
    let idempotent_deviation = basis
        .iter()
        .map(|x| {
            let e = rep.expectation(x);
            max_deviation(&rep.expectation(&e), &e)
        })
        .fold(0.0, f64::max);
    let mut positivity_min = f64::INFINITY;
    for (a, x) in basis.iter().enumerate() {
        for y in &basis[a..] {
            let z = x + y;
            let e = rep.expectation(&(z.adjoint() * &z));
            for i in 0..n {
                positivity_min = positivity_min.min(e[(i, i)].re);
            }
        }
    }
    let diagonal = rep.basis().diagonal();
    let restricted: Vec<CMatrix> = basis.iter().map(|x| x.select_columns(&diagonal)).collect();
    let faithful_rank = basis.len() - complex_kernel(&restricted, tol).len();
    Ok(ExpectationReport {
        delta_deviation,
        idempotent_deviation,
        unital_deviation,
        positivity_min,
        faithful_rank,
        m_dim: m.dim(),
    })
}

/// The monoid read back from `(M, D)`.
#[derive(Clone, Debug)]
pub struct Recovery {
    pub atoms: usize,
    /// Pairs `(a, b)` with `p_a M p_b ≠ 0`.
    pub relation: Vec<(usize, usize)>,
    pub candidates: u128,
    pub monoid: FiniteInverseMonoid,
    /// Atom permutation carrying the recovered monoid onto the target.
    pub isomorphism: Option<Vec<usize>>,
}

/// Reads the inverse monoid of `D`-normalizing partial isometries back out
/// of `(M, D)` and matches it against `target` up to relabeling of atoms.
pub fn recover_extension(
    m: &MatrixAlgebra,
    d: &MatrixAlgebra,
    target: &FiniteInverseMonoid,
    guard: u128,
    tol: f64,
) -> Result<Recovery> {
    let n = m.size();
    if let Some(b) = d.basis().iter().find(|b| !is_diagonal(b, tol)) {
        return Err(Error::Domain(format!(
            "D is not diagonal (basis element with off-diagonal mass {})",
            hs_norm(&(b - CMatrix::from_diagonal(&b.diagonal())))
        )));
    }
    // Minimal projections of D: positions with identical value patterns.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let same = |j: usize| d.basis().iter().all(|b| (b[(i, i)] - b[(j, j)]).norm() <= tol);
        match blocks.iter_mut().find(|blk| same(blk[0])) {
            Some(blk) => blk.push(i),
            None => blocks.push(vec![i]),
        }
    }
    let atoms = blocks.len();
    let projection = |a: usize| {
        let mut p = CMatrix::zeros(n, n);
        for &i in &blocks[a] {
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
        p
    };
    let projections: Vec<CMatrix> = (0..atoms).map(projection).collect();

    let mut units: Vec<Vec<Option<CMatrix>>> = vec![vec![None; atoms]; atoms];
    let mut relation = Vec::new();
    for a in 0..atoms {
        for b in 0..atoms {
            let compressed: Vec<CMatrix> = m
                .basis()
                .iter()
                .map(|x| &projections[a] * x * &projections[b])
                .collect();
            let space = Subspace::span(n, n, &compressed, tol);
            match space.dim() {
                0 => {}
                1 => {
                    let w = &space.basis()[0];
                    let scale = (w.adjoint() * w)
                        .diagonal()
                        .iter()
                        .map(|z| z.re)
                        .fold(0.0, f64::max)
                        .sqrt();
                    units[a][b] = Some(w / Complex64::new(scale, 0.0));
                    relation.push((a, b));
                }
                k => {
                    return Err(Error::Domain(format!(
                        "p_{a} M p_{b} has dimension {k}; D is not maximal abelian"
                    )))
                }
            }
        }
    }

    let mut graphs = Vec::new();
    let mut candidates = 0u128;
    let mut current: Vec<Option<usize>> = vec![None; atoms];
    let mut used = vec![false; atoms];
    enumerate_graphs(&units, 0, &mut current, &mut used, &mut |graph| {
        candidates += 1;
        if candidates > guard {
            return Err(Error::guard("recovery candidates", candidates, guard));
        }
        let mut v = CMatrix::zeros(n, n);
        for (b, a) in graph.iter().enumerate() {
            if let Some(a) = a {
                v += units[*a][b].as_ref().unwrap();
            }
        }
        let isometry = max_deviation(&(&v * v.adjoint() * &v), &v) <= tol;
        let normalizes = projections.iter().all(|p| {
            is_diagonal(&(&v * p * v.adjoint()), tol) && is_diagonal(&(v.adjoint() * p * &v), tol)
        });
        if isometry && normalizes {
            let pairs: Vec<(usize, usize)> = graph
                .iter()
                .enumerate()
                .filter_map(|(b, a)| a.map(|a| (b, a)))
                .collect();
            graphs.push(PartialBijection::from_pairs(atoms, &pairs)?);
        }
        Ok(())
    })?;
    let monoid = FiniteInverseMonoid::new(atoms, graphs)?;
    let isomorphism = if monoid.atoms() == target.atoms() {
        monoid.find_spatial_isomorphism(target)
    } else {
        None
    };
    Ok(Recovery {
        atoms,
        relation,
        candidates,
        monoid,
        isomorphism,
    })
}

fn enumerate_graphs(
    units: &[Vec<Option<CMatrix>>],
    b: usize,
    current: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    visit: &mut dyn FnMut(&[Option<usize>]) -> Result<()>,
) -> Result<()> {
    if b == current.len() {
        return visit(current);
    }
    current[b] = None;
    enumerate_graphs(units, b + 1, current, used, visit)?;
    for a in 0..units.len() {
        if !used[a] && units[a][b].is_some() {
            used[a] = true;
            current[b] = Some(a);
            enumerate_graphs(units, b + 1, current, used, visit)?;
            used[a] = false;
            current[b] = None;
        }
    }
    Ok(())
}

/// Everything the oracle checks about one extension.
#[derive(Clone, Debug)]
pub struct CartanReport {
    pub atoms: usize,
    pub relation_size: usize,
    pub m: MatrixAlgebra,
    pub d: MatrixAlgebra,
    /// Dimension of `(λ(G))″`, when small enough to compute.
    pub double_commutant_dim: Option<usize>,
    pub masa: MasaReport,
    pub expectation: ExpectationReport,
    /// `λ(v) p λ(v)*` and `λ(v)* p λ(v)` lie in `D` for all `v` and minimal `p`.
    pub normalizes: bool,
    pub recovery: Recovery,
    pub tol: f64,
}

impl CartanReport {
    pub fn dims_match(&self) -> bool {
        self.m.dim() == self.relation_size
            && self.d.dim() == self.atoms
            && self.double_commutant_dim.is_none_or(|dc| dc == self.m.dim())
    }

    pub fn passed(&self) -> bool {
        self.dims_match()
            && self.m.is_algebra()
            && self.d.is_algebra()
            && self.masa.masa()
            && self.expectation.passed(self.tol)
            && self.normalizes
            && self.recovery.isomorphism.is_some()
    }
}

/// Builds `λ_π` from an order-preserving section and runs every oracle check.
pub fn cartan_report(ext: &Extension, element_guard: u128, recovery_guard: u128, tol: f64) -> Result<CartanReport> {
    let j = order_preserving_section(ext)?;
    let rep = Representation::new(ext, &j)?;
    let g = ext.elements(element_guard)?;
    let lambdas: Vec<RepMatrix> = g.iter().map(|v| rep.lambda(v)).collect::<Result<_>>()?;
    let diag: Vec<RepMatrix> = ext
        .diagonal_elements()
        .iter()
        .map(|v| rep.lambda(v))
        .collect::<Result<_>>()?;
    let m = span_basis(&lambdas, tol)?;
    let d = span_basis(&diag, tol)?;
    let n = rep.dim();
    let double_commutant_dim = (n <= DOUBLE_COMMUTANT_LIMIT).then(|| {
        let first = commutant(n, m.basis(), tol);
        commutant(n, first.basis(), tol).dim()
    });
    let masa = masa_check(&m, &d, tol)?;
    let expectation = expectation_properties(&rep, &g, &m, tol)?;
    let atoms = ext.base().atoms();
    let minimal: Vec<RepMatrix> = (0..atoms)
        .map(|x| rep.pi(&DiagonalElement::from_idempotent(&Idempotent::atom(atoms, x))))
        .collect();
    let normalizes = lambdas.iter().all(|l| {
        minimal.iter().all(|p| {
            let a = l * p * l.adjoint();
            let b = l.adjoint() * p * l;
            d.space().contains(&a, tol) && d.space().contains(&b, tol)
        })
    });
    let recovery = recover_extension(&m, &d, ext.base(), recovery_guard, tol)?;
    Ok(CartanReport {
        atoms,
        relation_size: n,
        m,
        d,
        double_commutant_dim,
        masa,
        expectation,
        normalizes,
        recovery,
        tol,
    })
}
