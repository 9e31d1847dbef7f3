//! Dense symmetric-matrix kernels shared by every geometric module.
//!
//! Three primitives cover all downstream needs: symmetric eigendecomposition
//! ([`sym_eig`]), Cholesky factorization ([`cholesky_lower`]), and spectral
//! application of scalar functions ([`spectral_apply`] and the named helpers
//! [`spd_log`], [`sym_exp`], [`spd_sqrt`], [`spd_inv_sqrt`], [`spd_inv`],
//! [`spd_power`]).
//!
//! Conventions baked in here and relied on elsewhere:
//!
//! * all arithmetic is `f64`; no mixed-precision path;
//! * inputs are symmetrized as `(s + sᵀ)/2` before any decomposition, which
//!   tolerates the asymmetry that accumulates in long products upstream;
//! * eigenvalues come back sorted in non-increasing order, so the Cartan
//!   projection downstream lands in the closed Weyl chamber without an extra
//!   sort;
//! * SPD construction rejects a smallest eigenvalue at or below `1e-12`
//!   rather than jittering silently; jitter is an explicit caller option.
//!
//! [`cholesky_lower`] accumulates its inner products in compensated
//! (double-double) arithmetic.  The factor diagonal suffers cancellation that
//! plain `f64` amplifies by the square of the condition number; compensated
//! sums keep the log-pivots accurate even at condition numbers around `1e8`,
//! which the Iwasawa horospherical map downstream depends on.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Smallest eigenvalue accepted when constructing an [`SpdMatrix`].
pub const SPD_EIGEN_FLOOR: f64 = 1e-12;

/// Cholesky pivots at or below this threshold abort the factorization.
const CHOLESKY_PIVOT_FLOOR: f64 = 1e-14;

/// Errors produced by the matrix kernels.
#[derive(Debug, Error)]
pub enum MatError {
    /// Input matrix is not square.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    /// Two operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// Input contains NaN or infinity.
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    /// Symmetric eigensolver did not converge.
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix with norm {norm:.3e}")]
    EigenFailed { dim: usize, norm: f64 },
    /// A matrix required to be positive definite is not.
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    /// Cholesky hit a nonpositive (or below-floor) pivot.
    #[error("cholesky pivot {pivot:.3e} at index {index} is not positive")]
    CholeskyPivot { index: usize, pivot: f64 },
    /// A scalar function was applied outside its domain.
    #[error("spectral function undefined at eigenvalue {eigenvalue:.6e}")]
    SpectralDomain { eigenvalue: f64 },
}

/// Real symmetric matrix.  The stored entries are exactly symmetric: the
/// constructor replaces the input by `(s + sᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from an arbitrary square matrix by
    /// symmetrizing it.  Rejects non-square or non-finite input.
    pub fn new(m: DMatrix<f64>) -> Result<Self, MatError> {
        check_square_finite(&m)?;
        Ok(Self::symmetrize(m))
    }

    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(d: &DVector<f64>) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(d),
        }
    }

    pub(crate) fn symmetrize(m: DMatrix<f64>) -> Self {
        let sym = (&m + m.transpose()) * 0.5;
        SymMatrix { m: sym }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn frobenius_inner(&self, other: &SymMatrix) -> f64 {
        self.m.dot(&other.m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }
}

/// Symmetric positive-definite matrix.  Construction verifies positivity via
/// the spectrum and rejects a smallest eigenvalue ≤ [`SPD_EIGEN_FLOOR`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix {
    m: DMatrix<f64>,
}

impl SpdMatrix {
    /// Builds an SPD matrix, verifying symmetry (by symmetrization) and
    /// positive definiteness (by eigendecomposition).
    pub fn new(m: DMatrix<f64>) -> Result<Self, MatError> {
        let sym = SymMatrix::new(m)?;
        let eig = sym_eig(&sym)?;
        let min = eig.values[eig.values.len() - 1];
        if min <= SPD_EIGEN_FLOOR {
            return Err(MatError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(SpdMatrix { m: sym.m })
    }

    /// Like [`SpdMatrix::new`] but adds `1e-12·I` first, nudging borderline
    /// positive-semidefinite input across the construction floor.  Intended
    /// for generated data, not for geometry.
    pub fn new_jittered(m: DMatrix<f64>) -> Result<Self, MatError> {
        check_square_finite(&m)?;
        let dim = m.nrows();
        let jittered = m + DMatrix::<f64>::identity(dim, dim) * SPD_EIGEN_FLOOR;
        Self::new(jittered)
    }

    /// Identity matrix, the base point of the SPD manifold.
    pub fn identity(dim: usize) -> Self {
        SpdMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Wraps a matrix that is positive definite by construction (for
    /// example `exp` of a symmetric matrix, or a congruence `g·x·gᵀ` with
    /// invertible `g`).  Symmetrizes but skips the eigenvalue check.
    pub(crate) fn from_positive_unchecked(m: DMatrix<f64>) -> Self {
        let sym = SymMatrix::symmetrize(m);
        SpdMatrix { m: sym.m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// View as a plain symmetric matrix.
    pub fn to_sym(&self) -> SymMatrix {
        SymMatrix { m: self.m.clone() }
    }
}

/// Lower-triangular matrix with positive diagonal (a Cholesky factor).
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    m: DMatrix<f64>,
}

impl LowerTriangular {
    pub(crate) fn from_factor(m: DMatrix<f64>) -> Self {
        LowerTriangular { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Diagonal of the factor.
    pub fn diagonal(&self) -> DVector<f64> {
        self.m.diagonal()
    }
}

/// Matrix with orthonormal columns: `‖QᵀQ − I‖_F ≤ 1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    m: DMatrix<f64>,
}

impl OrthogonalMatrix {
    /// Orthogonality tolerance enforced at construction.
    pub const TOLERANCE: f64 = 1e-10;

    /// Builds an orthogonal matrix, verifying `QᵀQ = I` within
    /// [`OrthogonalMatrix::TOLERANCE`].
    pub fn new(m: DMatrix<f64>) -> Result<Self, MatError> {
        check_square_finite(&m)?;
        let dim = m.nrows();
        let residual = (m.transpose() * &m - DMatrix::<f64>::identity(dim, dim)).norm();
        if residual > Self::TOLERANCE {
            return Err(MatError::NotPositiveDefinite {
                min_eigenvalue: residual,
            });
        }
        Ok(OrthogonalMatrix { m })
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Wraps columns produced by an orthogonalizing algorithm; the caller
    /// vouches for (and may separately verify) orthonormality.
    pub(crate) fn from_columns_unchecked(m: DMatrix<f64>) -> Self {
        OrthogonalMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<(), MatError> {
    if m.nrows() != m.ncols() {
        return Err(MatError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(MatError::NonFinite);
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix: `s = u · diag(values) · uᵀ`
/// with `values` sorted non-increasing.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub vectors: OrthogonalMatrix,
    pub values: DVector<f64>,
}

/// Symmetric eigendecomposition with eigenvalues sorted non-increasing.
pub fn sym_eig(s: &SymMatrix) -> Result<SymEigen, MatError> {
    let dim = s.dim();
    let norm = s.m.norm();

    // The tridiagonal QL solver lands within ~1e-10·‖s‖ of a diagonalization
    // but no closer; Jacobi sweeps on the rotated matrix close the remaining
    // gap to a few ε·‖s‖.  Downstream spectral maps depend on that margin
    // whenever two computation routes are compared near 1e-12.
    let (mut u, mut b) = match nalgebra::SymmetricEigen::try_new(s.m.clone(), f64::EPSILON, 10_000)
    {
        Some(eig) => {
            let rotated = eig.eigenvectors.tr_mul(&s.m) * &eig.eigenvectors;
            let sym = (&rotated + rotated.transpose()) / 2.0;
            (eig.eigenvectors, sym)
        }
        None => (DMatrix::identity(dim, dim), s.m.clone()),
    };
    if !jacobi_diagonalize(&mut b, Some(&mut u), f64::EPSILON * norm) {
        return Err(MatError::EigenFailed { dim, norm });
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        b[(j, j)]
            .partial_cmp(&b[(i, i)])
            .expect("eigenvalues of a finite symmetric matrix are finite")
    });

    let mut vectors = DMatrix::zeros(dim, dim);
    let mut values = DVector::zeros(dim);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &u.column(src));
        values[col] = b[(src, src)];
    }
    Ok(SymEigen {
        vectors: OrthogonalMatrix::from_columns_unchecked(vectors),
        values,
    })
}

/// Applies a scalar function to the spectrum: `u · diag(f(λ)) · uᵀ`.
///
/// `f` returns `None` where it is undefined; that surfaces as
/// [`MatError::SpectralDomain`] naming the offending eigenvalue.
pub fn spectral_apply<F>(s: &SymMatrix, f: F) -> Result<SymMatrix, MatError>
where
    F: Fn(f64) -> Option<f64>,
{
    let eig = sym_eig(s)?;
    let mut mapped = DVector::zeros(eig.values.len());
    for (i, &lambda) in eig.values.iter().enumerate() {
        mapped[i] = f(lambda).ok_or(MatError::SpectralDomain { eigenvalue: lambda })?;
    }
    let u = eig.vectors.matrix();
    Ok(SymMatrix::symmetrize(
        u * DMatrix::from_diagonal(&mapped) * u.transpose(),
    ))
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(x: &SpdMatrix) -> Result<SymMatrix, MatError> {
    spectral_apply(&x.to_sym(), |l| (l > 0.0).then(|| l.ln()))
}

/// Matrix exponential of a symmetric matrix; the result is positive definite.
pub fn sym_exp(s: &SymMatrix) -> Result<SpdMatrix, MatError> {
    let e = spectral_apply(s, |l| Some(l.exp()))?;
    Ok(SpdMatrix { m: e.m })
}

/// Principal square root of an SPD matrix.
pub fn spd_sqrt(x: &SpdMatrix) -> Result<SpdMatrix, MatError> {
    let e = spectral_apply(&x.to_sym(), |l| (l > 0.0).then(|| l.sqrt()))?;
    Ok(SpdMatrix { m: e.m })
}

/// Inverse principal square root of an SPD matrix.
pub fn spd_inv_sqrt(x: &SpdMatrix) -> Result<SpdMatrix, MatError> {
    let e = spectral_apply(&x.to_sym(), |l| (l > 0.0).then(|| 1.0 / l.sqrt()))?;
    Ok(SpdMatrix { m: e.m })
}

/// Inverse of an SPD matrix, computed spectrally.
pub fn spd_inv(x: &SpdMatrix) -> Result<SpdMatrix, MatError> {
    let e = spectral_apply(&x.to_sym(), |l| (l > 0.0).then(|| 1.0 / l))?;
    Ok(SpdMatrix { m: e.m })
}

/// Real power `x^theta` of an SPD matrix.
pub fn spd_power(x: &SpdMatrix, theta: f64) -> Result<SpdMatrix, MatError> {
    let e = spectral_apply(&x.to_sym(), |l| (l > 0.0).then(|| l.powf(theta)))?;
    Ok(SpdMatrix { m: e.m })
}

/// Cholesky factorization `s = c · cᵀ` with positive diagonal.
///
/// Inner products are accumulated in compensated (double-double) arithmetic;
/// see the module docs for why the pivots need it.
pub fn cholesky_lower(s: &SpdMatrix) -> Result<LowerTriangular, MatError> {
    let dim = s.dim();
    let a = s.matrix();
    let mut c = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for i in j..dim {
            // a[(i, j)] - sum_{k<j} c[(i,k)]*c[(j,k)] in doubled precision.
            let mut acc = DdAccumulator::new(a[(i, j)]);
            for k in 0..j {
                acc.sub_product(c[(i, k)], c[(j, k)]);
            }
            let value = acc.value();
            if i == j {
                if value <= CHOLESKY_PIVOT_FLOOR {
                    return Err(MatError::CholeskyPivot {
                        index: j,
                        pivot: value,
                    });
                }
                c[(j, j)] = value.sqrt();
            } else {
                c[(i, j)] = value / c[(j, j)];
            }
        }
    }
    Ok(LowerTriangular::from_factor(c))
}

/// Compensated accumulator for expressions `base - Σ xᵢ·yᵢ`, carrying the
/// rounding error of every product and sum in a second limb.
pub(crate) struct DdAccumulator {
    hi: f64,
    lo: f64,
}

impl DdAccumulator {
    pub(crate) fn new(base: f64) -> Self {
        DdAccumulator { hi: base, lo: 0.0 }
    }

    #[inline]
    pub(crate) fn sub_product(&mut self, x: f64, y: f64) {
        let (p, perr) = two_prod(x, y);
        let (s, serr) = two_sum(self.hi, -p);
        self.hi = s;
        self.lo += serr - perr;
    }

    #[inline]
    pub(crate) fn add_product(&mut self, x: f64, y: f64) {
        let (p, perr) = two_prod(x, y);
        let (s, serr) = two_sum(self.hi, p);
        self.hi = s;
        self.lo += serr + perr;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Unevaluated double-double scalar `hi + lo` (~31 significant digits).
///
/// Carries quantities whose accuracy an algorithm later amplifies — most
/// importantly the Gram matrix inside [`cholesky_dd`], whose trailing
/// pivots sit `κ²` below the leading entries and would lose exactly those
/// bits to a plain `f64` round of the input.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub(crate) fn zero() -> Self {
        Dd { hi: 0.0, lo: 0.0 }
    }

    pub(crate) fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Leading component (the sign and magnitude live here).
    pub(crate) fn hi(self) -> f64 {
        self.hi
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Renormalization `quick_two_sum`: exact when `|hi| ≥ |lo|`, which
    /// every operation below guarantees.
    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let err = lo - (s - hi);
        Dd { hi: s, lo: err }
    }

    pub(crate) fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::renorm(s, e + self.lo + o.lo)
    }

    pub(crate) fn sub(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, -o.hi);
        Dd::renorm(s, e + self.lo - o.lo)
    }

    pub(crate) fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    pub(crate) fn div(self, o: Dd) -> Dd {
        // Two correction terms bring the quotient to full dd accuracy.
        let q1 = self.hi / o.hi;
        let r1 = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r1.hi / o.hi;
        let r2 = r1.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / o.hi;
        Dd::renorm(q1, q2).add(Dd::from_f64(q3))
    }

    /// One dd Newton step on the `f64` square root; requires `hi ≥ 0`.
    pub(crate) fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::zero();
        }
        let a = self.hi.sqrt();
        let r = self.sub(Dd::from_f64(a).mul(Dd::from_f64(a)));
        Dd::renorm(a, r.hi / (2.0 * a))
    }

    /// Natural log collapsed to `f64`: `ln hi + ln1p(lo/hi)`; requires a
    /// positive value.
    pub(crate) fn ln(self) -> f64 {
        self.hi.ln() + (self.lo / self.hi).ln_1p()
    }
}

/// Compensated dot product of two matrix columns, used where `gᵀg` must be
/// formed without losing the low-order bits the Cholesky pivots depend on.
pub(crate) fn dd_column_dot(m: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let mut acc = DdAccumulator::new(0.0);
    for r in 0..m.nrows() {
        acc.add_product(m[(r, i)], m[(r, j)]);
    }
    acc.value()
}

/// Full-precision variant of [`dd_column_dot`]: the dot product as an
/// unevaluated [`Dd`] pair instead of a rounded `f64`.
pub(crate) fn dd_column_dot_pair(m: &DMatrix<f64>, i: usize, j: usize) -> Dd {
    let mut acc = DdAccumulator::new(0.0);
    for r in 0..m.nrows() {
        acc.add_product(m[(r, i)], m[(r, j)]);
    }
    Dd::renorm(acc.hi, acc.lo)
}

/// Cholesky factorization carried entirely in double-double arithmetic.
///
/// Takes a row-major symmetric positive-definite `dim × dim` Gram matrix
/// and returns its lower factor, both as [`Dd`] buffers. The trailing
/// pivot of a Gram matrix `gᵀg` is `κ(g)²` below its leading entries; the
/// subtraction that produces it amplifies input rounding by the same
/// factor, so `f64` Cholesky caps the achievable relative pivot accuracy
/// at `ε·κ²` no matter how carefully it accumulates. Keeping every entry
/// in dd defers the rounding until after the cancellation, leaving the
/// log-diagonal accurate to `f64` roundoff for conditioning up to `~1e8`.
pub(crate) fn cholesky_dd(gram: &[Dd], dim: usize) -> Result<Vec<Dd>, MatError> {
    debug_assert_eq!(gram.len(), dim * dim);
    let mut c = vec![Dd::zero(); dim * dim];
    for j in 0..dim {
        for i in j..dim {
            let mut acc = gram[i * dim + j];
            for k in 0..j {
                acc = acc.sub(c[i * dim + k].mul(c[j * dim + k]));
            }
            if i == j {
                if acc.hi() <= CHOLESKY_PIVOT_FLOOR {
                    return Err(MatError::CholeskyPivot {
                        index: j,
                        pivot: acc.hi(),
                    });
                }
                c[j * dim + j] = acc.sqrt();
            } else {
                c[i * dim + j] = acc.div(c[j * dim + j]);
            }
        }
    }
    Ok(c)
}

/// Cyclic Jacobi eigenvalues of a symmetric positive-definite matrix,
/// returned sorted non-increasing.
///
/// Unlike tridiagonalization-based solvers, two-sided Jacobi computes every
/// eigenvalue of a graded SPD matrix `D·A·D` (`D` diagonal, `A` well
/// conditioned) to high *relative* accuracy, so logarithms of tiny
/// eigenvalues stay meaningful.  The verification oracles lean on this when
/// they form points far along a geodesic ray, where eigenvalue spreads reach
/// `e^200`.
pub(crate) fn jacobi_spd_eigenvalues(s: &DMatrix<f64>) -> Result<DVector<f64>, MatError> {
    let mut a = s.clone();
    if !jacobi_diagonalize(&mut a, None, 0.0) {
        return Err(MatError::EigenFailed {
            dim: s.nrows(),
            norm: s.norm(),
        });
    }
    let mut values: Vec<f64> = a.diagonal().iter().copied().collect();
    values.sort_by(|x, y| y.partial_cmp(x).expect("jacobi diagonal is finite"));
    Ok(DVector::from_vec(values))
}

/// Cyclic Jacobi loop shared by the eigenvalue-only path and the
/// vector-accumulating refinement inside [`sym_eig`].
///
/// Rotations are applied as `a ← jᵀ·a·j` and, when `vectors` is given,
/// accumulated as `u ← u·j`.  An off-diagonal entry counts as negligible
/// once it is small relative to its own diagonal pair (which preserves
/// relative accuracy on graded matrices) *or* falls below the caller's
/// absolute floor `abs_tol` (pass `0.0` to keep the loop purely relative).
/// Returns `false` if the sweep cap is exhausted before convergence.
fn jacobi_diagonalize(
    a: &mut DMatrix<f64>,
    mut vectors: Option<&mut DMatrix<f64>>,
    abs_tol: f64,
) -> bool {
    let dim = a.nrows();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..dim.saturating_sub(1) {
            for q in (p + 1)..dim {
                let apq = a[(p, q)];
                let scale = (a[(p, p)].abs() * a[(q, q)].abs()).sqrt();
                if apq.abs() <= (1e-17 * scale).max(abs_tol) {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for r in 0..dim {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - sn * arq;
                    a[(r, q)] = sn * arp + c * arq;
                }
                for r in 0..dim {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - sn * aqr;
                    a[(q, r)] = sn * apr + c * aqr;
                }
                if let Some(u) = vectors.as_deref_mut() {
                    for r in 0..dim {
                        let urp = u[(r, p)];
                        let urq = u[(r, q)];
                        u[(r, p)] = c * urp - sn * urq;
                        u[(r, q)] = sn * urp + c * urq;
                    }
                }
            }
        }
        if !rotated {
            return true;
        }
    }
    false
}
