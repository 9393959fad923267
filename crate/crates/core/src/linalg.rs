//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a column vector from `(re, im)` pairs.
pub fn cvec(entries: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| c(re, im)))
}

/// Builds a square matrix from row-major `(re, im)` pairs.
pub fn cmat(dim: usize, entries: &[(f64, f64)]) -> CMatrix {
    assert_eq!(entries.len(), dim * dim, "cmat needs dim*dim entries");
    CMatrix::from_row_iterator(dim, dim, entries.iter().map(|&(re, im)| c(re, im)))
}

/// Largest entrywise deviation `max |M[j,k] - conj(M[k,j])|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues come back in
/// ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Decomposes the Hermitian part of `m`.
    pub fn of(m: &CMatrix) -> Self {
        let eig = hermitian_part(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, col| {
            eig.eigenvectors[(r, order[col])]
        });
        Spectrum { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `V f(Λ) V†` for a complex function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// `exp(-i φ A)` via the spectral decomposition of the Hermitian `a`.
pub fn unitary_exp(a: &CMatrix, phi: f64) -> CMatrix {
    Spectrum::of(a).apply(|lambda| C64::from_polar(1.0, -phi * lambda))
}

/// Principal square root of a positive semidefinite matrix; negative
/// eigenvalues from round-off are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    Spectrum::of(m).apply(|lambda| c(lambda.max(0.0).sqrt(), 0.0))
}

/// `Tr{A B}` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

/// `|v⟩⟨v|`.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `⟨u|v⟩`, conjugating the left argument.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

/// `‖M − I‖_max`.
pub fn identity_residual(m: &CMatrix) -> f64 {
    let id = CMatrix::identity(m.nrows(), m.ncols());
    max_abs_diff(m, &id)
}

/// Operator (spectral) norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    Spectrum::of(m).max_abs()
}
