//! Dense complex linear algebra used by the representation and the oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Default numerical tolerance for ranks, eigenvalues and entry comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `exp(2πi p / k)`, exact when `4p/k` is an integer.
pub fn root_of_unity(k: u32, p: u32) -> Complex64 {
    let p = p % k;
    if (4 * p).is_multiple_of(k) {
        return match 4 * p / k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * p as f64 / k as f64)
}

/// Hilbert-Schmidt inner product `tr(a* b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry of `a − b`.
pub fn max_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_diagonal(a: &CMatrix, tol: f64) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| i == j || a[(i, j)].norm() <= tol))
}

/// An orthonormal (Hilbert-Schmidt) basis of a space of equally sized matrices.
#[derive(Clone, Debug)]
pub struct Subspace {
    rows: usize,
    cols: usize,
    basis: Vec<CMatrix>,
}

impl Subspace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Subspace {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    /// Gram-Schmidt with one reorthogonalization pass.
    pub fn span<'a>(rows: usize, cols: usize, matrices: impl IntoIterator<Item = &'a CMatrix>, tol: f64) -> Self {
        let mut space = Subspace::zero(rows, cols);
        for m in matrices {
            space.insert(m, tol);
        }
        space
    }

    /// Adds `m` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, m: &CMatrix, tol: f64) -> bool {
        assert_eq!((m.nrows(), m.ncols()), (self.rows, self.cols));
        let scale = hs_norm(m).max(1.0);
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = hs_inner(b, &r);
                r -= b * c;
            }
        }
        let norm = hs_norm(&r);
        if norm <= tol * scale {
            return false;
        }
        self.basis.push(r / Complex64::new(norm, 0.0));
        true
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for b in &self.basis {
            out += b * hs_inner(b, m);
        }
        out
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        hs_norm(&(m - self.project(m))) <= tol * hs_norm(m).max(1.0)
    }

    pub fn contains_space(&self, other: &Subspace, tol: f64) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }

    /// The intersection, via the null space of `[A | −B]`.
    pub fn intersection(&self, other: &Subspace, tol: f64) -> Subspace {
        let a = self.dim();
        let generators: Vec<CMatrix> = self.basis.iter().chain(&other.basis).cloned().collect();
        let neg: Vec<CMatrix> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| if i < a { g.clone() } else { -g })
            .collect();
        let kernel = complex_kernel(&neg, tol);
        let combos = kernel.iter().map(|coef| combine(&self.basis, &coef.as_slice()[..a]));
        let combos: Vec<CMatrix> = combos.collect();
        Subspace::span(self.rows, self.cols, &combos, tol)
    }

    /// The sum of two subspaces.
    pub fn sum(&self, other: &Subspace, tol: f64) -> Subspace {
        Subspace::span(self.rows, self.cols, self.basis.iter().chain(&other.basis), tol)
    }

    pub fn adjoint(&self, tol: f64) -> Subspace {
        let adj: Vec<CMatrix> = self.basis.iter().map(|b| b.adjoint()).collect();
        Subspace::span(self.cols, self.rows, &adj, tol)
    }

    pub fn same_as(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim() && self.contains_space(other, tol)
    }
}

/// `Σ c_i m_i`.
pub fn combine(matrices: &[CMatrix], coefficients: &[Complex64]) -> CMatrix {
    let (r, c) = matrices.first().map_or((0, 0), |m| (m.nrows(), m.ncols()));
    let mut out = CMatrix::zeros(r, c);
    for (m, &a) in matrices.iter().zip(coefficients) {
        out += m * a;
    }
    out
}

/// Real null space of `a`, as orthonormal columns.
pub fn real_null_space(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    // Reduce tall systems to an n×n triangle first; pad short ones.
    let square = if a.nrows() > n {
        a.clone().qr().r()
    } else {
        let mut padded = DMatrix::<f64>::zeros(n, n);
        padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Complex coefficient vectors `c` with `Σ c_i g_i = 0`, via a real split.
pub fn complex_kernel(generators: &[CMatrix], tol: f64) -> Vec<DVector<Complex64>> {
    let n = generators.len();
    if n == 0 {
        return Vec::new();
    }
    let entries = generators[0].len();
    let mut a = DMatrix::<f64>::zeros(2 * entries, 2 * n);
    for (j, g) in generators.iter().enumerate() {
        for (e, z) in g.iter().enumerate() {
            // (u + iw)(x + iy) = (ux − wy) + i(uy + wx)
            a[(2 * e, j)] = z.re;
            a[(2 * e, n + j)] = -z.im;
            a[(2 * e + 1, j)] = z.im;
            a[(2 * e + 1, n + j)] = z.re;
        }
    }
    real_null_space(&a, tol)
        .into_iter()
        .map(|v| DVector::from_iterator(n, (0..n).map(|j| Complex64::new(v[j], v[n + j]))))
        .collect()
}

/// `{x ∈ span(basis) : x d = d x for all d}`.
pub fn relative_commutant(basis: &[CMatrix], against: &[CMatrix], tol: f64) -> Subspace {
    let (r, c) = basis.first().map_or((0, 0), |m| (m.nrows(), m.ncols()));
    if basis.is_empty() {
        return Subspace::zero(r, c);
    }
    // x = Σ a_i b_i commutes with d iff Σ a_i [b_i, d] = 0 for every d.
    let stacked: Vec<CMatrix> = basis
        .iter()
        .map(|b| {
            let mut block = CMatrix::zeros(r * against.len().max(1), c);
            for (i, d) in against.iter().enumerate() {
                block.view_mut((i * r, 0), (r, c)).copy_from(&(b * d - d * b));
            }
            block
        })
        .collect();
    let kernel = complex_kernel(&stacked, tol);
    let elements: Vec<CMatrix> = kernel.iter().map(|coef| combine(basis, coef.as_slice())).collect();
    Subspace::span(r, c, &elements, tol)
}

/// The commutant of `generators` in the full matrix algebra `M_n`.
pub fn commutant(n: usize, generators: &[CMatrix], tol: f64) -> Subspace {
    let units: Vec<CMatrix> = (0..n * n)
        .map(|ij| {
            let mut e = CMatrix::zeros(n, n);
            e[(ij / n, ij % n)] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    relative_commutant(&units, generators, tol)
}

/// Numerical rank of a real matrix.
pub fn real_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    a.clone().svd(false, false).singular_values.iter().filter(|&&s| s > tol).count()
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}
