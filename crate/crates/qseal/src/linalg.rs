//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything downstream (sealing schemes, measurement channels, the
//! optimizer) is built on the three types here: [`ComplexMatrix`],
//! [`StateVector`], and [`EigenDecomposition`].
//!
//! Index convention, fixed once for the whole crate: a bipartite state over a
//! public factor B (dimension `dim_b`) and a private factor A (dimension
//! `dim_a`) stores its amplitude for `|b>|a>` at global index
//! `b * dim_a + a` (B-major, A-minor). Tensor products and partial traces
//! below follow this convention.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum Hermitian asymmetry tolerated by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Off-diagonal convergence tolerance for the Jacobi sweeps.
pub const JACOBI_OFF_DIAG_TOL: f64 = 1e-12;

/// Sweep budget for the Jacobi eigensolver; plenty at dimension <= 64.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from row-major entries; panics if the length does not match.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "entry count must be rows * cols");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "inner dimensions must agree for matmul"
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols, v.dim(), "matrix/vector dimensions must agree");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.amplitudes()[j];
            }
            out[i] = acc;
        }
        StateVector::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(
            self.rows,
            self.cols,
            self.data.iter().map(|a| a * factor).collect(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry, max |A[i][j] - conj(A[j][i])|.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest entrywise difference to another matrix.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Complex state vector over one or more tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "state vector cannot be empty");
        Self { amplitudes }
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self::new(
            amplitudes
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        )
    }

    /// Computational basis state |index> in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self::new(self.amplitudes.iter().map(|z| z / n).collect())
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Kronecker product |self> ⊗ |other>.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.amplitudes.iter().map(|a| a * factor).collect())
    }

    /// Rank-one matrix |self><self|.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        m
    }

    /// Expectation value <self| m |self>.
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        self.inner(&m.matvec(self))
    }
}

/// Spectral decomposition of a Hermitian matrix: real eigenvalues in
/// ascending order, eigenvectors as orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Column `k` of the eigenvector matrix as a state vector.
    pub fn eigenvector(&self, k: usize) -> StateVector {
        let n = self.eigenvectors.rows();
        StateVector::new((0..n).map(|i| self.eigenvectors.get(i, k)).collect())
    }
}

/// Kronecker product a ⊗ b with entry (i_a*rows_b + i_b, j_a*cols_b + j_b).
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let aij = a.get(ia, ja);
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out.set(ia * b.rows() + ib, ja * b.cols() + jb, aij * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Each rotation is a complex plane rotation that annihilates one
/// off-diagonal pivot; sweeps repeat until every off-diagonal magnitude
/// drops below [`JACOBI_OFF_DIAG_TOL`]. Robust and reproducible for the
/// dimensions this crate targets (<= 64).
pub fn hermitian_eigendecomposition(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let asym = h.hermiticity_error();
    if asym > HERMITICITY_TOL {
        return Err(Error::NotHermitian(asym));
    }

    let n = h.rows();
    // Absolute tolerance on matrices of unit scale; scale up for larger inputs.
    let tol = JACOBI_OFF_DIAG_TOL * h.max_abs().max(1.0);

    let mut a = h.clone();
    // Symmetrize away the sub-tolerance asymmetry so rotations stay unitary.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
        let d = a.get(i, i);
        a.set(i, i, Complex64::new(d.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(n);

    let off_diag_max = |m: &ComplexMatrix| {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.get(i, j).norm());
            }
        }
        off
    };

    let mut converged = n < 2;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diag_max(&a) <= tol {
            converged = true;
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a.get(p, q);
                let b = beta.norm();
                if b <= tol * 1e-4 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let phase = beta / b; // e^{i phi}

                // Smaller root of t^2 + 2*theta*t - 1 = 0.
                let theta = (alpha - gamma) / (2.0 * b);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = t * c;
                let s = sigma * phase.conj(); // rotation entry, s_bar = sigma * phase
                let s_bar = s.conj();

                // Rows p and q: A <- U^dag A.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c + aqj * s_bar);
                    a.set(q, j, aqj * c - apj * s);
                }
                // Columns p and q: A <- A U.
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c + aiq * s);
                    a.set(i, q, aiq * c - aip * s_bar);
                }
                // The pivot is annihilated analytically; pin it to zero and
                // keep the diagonal real.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, Complex64::new(dp.re, 0.0));
                a.set(q, q, Complex64::new(dq.re, 0.0));

                // Accumulate eigenvectors: V <- V U.
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * s);
                    v.set(i, q, viq * c - vip * s_bar);
                }
            }
        }
    }

    if !converged {
        // The budget may have run out right after the sweep that converged.
        let off = off_diag_max(&a);
        if off > tol {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off_diag: off,
            });
        }
    }

    // Sort eigenvalues ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors.set(row, new_col, v.get(row, old_col));
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Reduced state on the public factor: trace out A from a pure bipartite
/// state with global index b * dim_a + a.
pub fn partial_trace_over_a(
    state: &StateVector,
    dim_b: usize,
    dim_a: usize,
) -> Result<ComplexMatrix> {
    if state.dim() != dim_b * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} != dim_b {} * dim_a {}",
            state.dim(),
            dim_b,
            dim_a
        )));
    }
    let amps = state.amplitudes();
    let mut rho = ComplexMatrix::zeros(dim_b, dim_b);
    for i in 0..dim_b {
        for j in 0..dim_b {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim_a {
                acc += amps[i * dim_a + k] * amps[j * dim_a + k].conj();
            }
            rho.set(i, j, acc);
        }
    }
    Ok(rho)
}

/// Validate Hermiticity, unit trace, and positive semidefiniteness at the
/// given tolerance.
pub fn validate_density_matrix(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidDensityMatrix(format!(
            "not square: {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let asym = rho.hermiticity_error();
    if asym > tol {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (asymmetry {asym:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidDensityMatrix(format!(
            "trace {} != 1",
            tr.re
        )));
    }
    let eig = hermitian_eigendecomposition(rho)?;
    let min_ev = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min_ev < -tol {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min_ev:.3e}"
        )));
    }
    Ok(())
}

/// Trace distance D(rho0, rho1) = (1/2) sum |eigenvalues of rho0 - rho1|.
pub fn trace_distance(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> Result<f64> {
    if (rho0.rows(), rho0.cols()) != (rho1.rows(), rho1.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            rho0.rows(),
            rho0.cols(),
            rho1.rows(),
            rho1.cols()
        )));
    }
    validate_density_matrix(rho0, 1e-8)?;
    validate_density_matrix(rho1, 1e-8)?;
    let diff = rho0.sub(rho1);
    let eig = hermitian_eigendecomposition(&diff)?;
    let d = 0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>();
    Ok(d.min(1.0))
}

/// Random generators shared by test modules across the crate.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use rand::rngs::StdRng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut StdRng) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            h.set(i, i, c(rng.gen_range(-1.0..1.0), 0.0));
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h.set(i, j, z);
                h.set(j, i, z.conj());
            }
        }
        h
    }

    /// A A^dag / Tr(A A^dag) is Hermitian, PSD, and unit trace.
    pub(crate) fn random_density_matrix(n: usize, rng: &mut StdRng) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        let g = a.matmul(&a.adjoint());
        let tr = g.trace().re;
        g.scale(1.0 / tr)
    }

    pub(crate) fn random_density_pair(
        n: usize,
        rng: &mut StdRng,
    ) -> (ComplexMatrix, ComplexMatrix) {
        (random_density_matrix(n, rng), random_density_matrix(n, rng))
    }

    pub(crate) fn random_state(dim: usize, rng: &mut StdRng) -> StateVector {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        StateVector::new(amps).normalized()
    }

    /// Random qubit-public scheme with a private factor of dimension 1..=3.
    pub(crate) fn random_scheme(rng: &mut StdRng) -> crate::seal::SealScheme {
        let dim_a = rng.gen_range(1..=3usize);
        let dim = 2 * dim_a;
        crate::seal::SealScheme::new(
            2,
            dim_a,
            random_state(dim, rng),
            random_state(dim, rng),
        )
        .unwrap()
    }
}
