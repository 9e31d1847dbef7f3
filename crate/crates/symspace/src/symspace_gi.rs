//! SPD geometry through its symmetric-space structure `GL_m / O_m`.
//!
//! A point `x` of the SPD cone is identified with the coset `gK` of any
//! invertible `g` with `g·gᵀ = x` ([`CosetRep`]); the group acts by
//! congruence `g[x] = g·x·gᵀ`. Two classical decompositions drive
//! everything here:
//!
//! * **Cartan** `g = k·exp(μ)·k′` — [`cartan_mu`] returns `μ`, the sorted
//!   log singular values, living in the closed chamber of non-increasing
//!   vectors. It induces the K-invariant inner product ([`gi_inner`]) and
//!   the distance `gi_dist(x,y) = ‖μ(g⁻¹h)‖` — half of the familiar
//!   affine-invariant distance `‖log(x^{−1/2} y x^{−1/2})‖_F`, because the
//!   identification `gK ↦ g·gᵀ` doubles exponents.
//! * **Iwasawa** `g = k·exp(diag H)·n` with `k` orthogonal and `n` unit
//!   upper triangular — [`iwasawa_h`] computes `H` from a Cholesky
//!   factorization of `gᵀg` with compensated accumulation, so the log-A
//!   part stays accurate even for badly conditioned `g`.
//!
//! Boundary rays are parameterized by an orthogonal frame `k` and a unit
//! diagonal direction `a` (a [`WeylDirection`]); the Busemann function of
//! such a ray has the closed form `B(x) = ⟨a, H(g⁻¹)⟩` after rotating `x`
//! into the frame ([`busemann_gi`]). The signed point-to-hyperplane
//! distance ([`b_distance_gi`]) and the fully connected layer built from a
//! stack of such distances ([`fc_layer_gi_forward`]) follow.
//!
//! The canonical representative used throughout is the **symmetric square
//! root** `x^{1/2}`. Any `x^{1/2}·q` with `q` orthogonal names the same
//! coset, and every exposed quantity is representative-independent; the
//! symmetric choice is what makes the induced gyro-operations clean:
//! `⊖x = x⁻¹` and `x ⊕ y = x^{1/2}·y·x^{1/2}`, so `(⊖x) ⊕ x = I` exactly.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::matkernels::{
    cholesky_dd, dd_column_dot, dd_column_dot_pair, spd_inv, spd_inv_sqrt, spd_sqrt, sym_eig, Dd,
    MatError, OrthogonalMatrix, SpdMatrix, SymMatrix,
};

/// Determinant magnitude below which a representative is rejected.
const DET_FLOOR: f64 = 1e-12;

/// Orthogonality residual the Iwasawa K-part must satisfy.
const IWASAWA_K_TOLERANCE: f64 = 1e-8;

/// Errors for the symmetric-space operations.
#[derive(Debug, Error)]
pub enum GiError {
    /// Underlying matrix-kernel failure.
    #[error(transparent)]
    Mat(#[from] MatError),
    /// Representative matrix is singular (or numerically so).
    #[error("coset representative is singular: |det| = {det:.3e}")]
    SingularRep { det: f64 },
    /// Input is not square or contains non-finite entries.
    #[error("representative must be a finite square matrix")]
    InvalidRep,
    /// A chamber direction must be unit norm.
    #[error("direction norm {norm} is not 1 within {tolerance}")]
    NotUnit { norm: f64, tolerance: f64 },
    /// Operand dimensions disagree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// The computed Iwasawa K-part drifted from orthogonality, which means
    /// the input was too badly conditioned for the factorization.
    #[error("iwasawa K-part orthogonality residual {residual:.3e} exceeds {tolerance:.0e}")]
    IwasawaConditioning { residual: f64, tolerance: f64 },
    /// A matrix required to be unit upper triangular is not.
    #[error("matrix is not unit upper triangular (defect {defect:.3e})")]
    NotUnitUpperTriangular { defect: f64 },
    /// A layer received no output axes.
    #[error("layer needs at least one output axis")]
    Empty,
}

/// An invertible matrix `g` representing the coset `gK`, i.e. the SPD
/// point `g·gᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetRep {
    g: DMatrix<f64>,
}

impl CosetRep {
    /// Wraps an invertible matrix; rejects `|det| ≤ 1e-12`.
    pub fn new(g: DMatrix<f64>) -> Result<Self, GiError> {
        if g.nrows() != g.ncols() || g.iter().any(|v| !v.is_finite()) {
            return Err(GiError::InvalidRep);
        }
        let det = g.determinant();
        if det.abs() <= DET_FLOOR {
            return Err(GiError::SingularRep { det });
        }
        Ok(CosetRep { g })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// The representative of the inverse coset, `g⁻¹`.
    pub fn inverse(&self) -> Result<CosetRep, GiError> {
        let inv = self
            .g
            .clone()
            .try_inverse()
            .ok_or(GiError::SingularRep { det: 0.0 })?;
        Ok(CosetRep { g: inv })
    }
}

/// Unit direction in the flat of diagonal exponents (embedded as
/// `diag(a)`); parameterizes a boundary ray together with a frame `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylDirection {
    a: DVector<f64>,
}

impl WeylDirection {
    /// Unit-norm tolerance enforced at construction.
    pub const TOLERANCE: f64 = 1e-12;

    /// Wraps a direction already normalized to unit length.
    pub fn new(a: DVector<f64>) -> Result<Self, GiError> {
        if a.iter().any(|v| !v.is_finite()) || a.is_empty() {
            return Err(GiError::InvalidRep);
        }
        let norm = a.norm();
        if (norm - 1.0).abs() > Self::TOLERANCE {
            return Err(GiError::NotUnit {
                norm,
                tolerance: Self::TOLERANCE,
            });
        }
        Ok(WeylDirection { a })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn unit(v: DVector<f64>) -> Result<Self, GiError> {
        if v.iter().any(|x| !x.is_finite()) || v.is_empty() {
            return Err(GiError::InvalidRep);
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(GiError::NotUnit {
                norm: 0.0,
                tolerance: Self::TOLERANCE,
            });
        }
        Ok(WeylDirection { a: v / norm })
    }

    /// The `i`-th standard basis direction.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut a = DVector::zeros(dim);
        a[i] = 1.0;
        WeylDirection { a }
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Whether the entries are non-increasing (closed-chamber membership).
    /// The Busemann closed form agrees with the metric limit exactly for
    /// such directions; see [`busemann_gi`].
    pub fn in_closed_chamber(&self) -> bool {
        self.a.as_slice().windows(2).all(|w| w[0] >= w[1])
    }
}

/// Hyperplane through `p` toward the ray `(k, a)`.
#[derive(Clone, Debug)]
pub struct GiHyperplane {
    pub k: OrthogonalMatrix,
    pub a: WeylDirection,
    pub p: SpdMatrix,
}

impl GiHyperplane {
    pub fn new(k: OrthogonalMatrix, a: WeylDirection, p: SpdMatrix) -> Result<Self, GiError> {
        check_dims(k.dim(), a.dim())?;
        check_dims(a.dim(), p.dim())?;
        Ok(GiHyperplane { k, a, p })
    }

    /// Hyperplane with the identity frame.
    pub fn axis_aligned(a: WeylDirection, p: SpdMatrix) -> Result<Self, GiError> {
        let dim = a.dim();
        Self::new(OrthogonalMatrix::identity(dim), a, p)
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), GiError> {
    if left != right {
        return Err(GiError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Canonical representative of the SPD point `x`: the symmetric square
/// root `x^{1/2}` (see the module docs for why this section).
pub fn coset_rep(x: &SpdMatrix) -> Result<CosetRep, GiError> {
    Ok(CosetRep {
        g: spd_sqrt(x)?.into_matrix(),
    })
}

/// The SPD point named by a representative: `g·gᵀ`.
pub fn spd_point(g: &CosetRep) -> SpdMatrix {
    SpdMatrix::from_positive_unchecked(&g.g * g.g.transpose())
}

/// Gyro-addition `x ⊕ y = x^{1/2}·y·x^{1/2}` (the group translate of `y`
/// by the representative of `x`). Non-commutative.
pub fn gi_oplus(x: &SpdMatrix, y: &SpdMatrix) -> Result<SpdMatrix, GiError> {
    check_dims(x.dim(), y.dim())?;
    let s = spd_sqrt(x)?;
    Ok(SpdMatrix::from_positive_unchecked(
        s.matrix() * y.matrix() * s.matrix(),
    ))
}

/// Gyro-inverse `⊖x = x⁻¹`.
pub fn gi_ominus(x: &SpdMatrix) -> Result<SpdMatrix, GiError> {
    Ok(spd_inv(x)?)
}

/// Cartan projection: the log singular values of `g`, sorted
/// non-increasing (an element of the closed chamber).
///
/// Computed from the spectrum of `gᵀg` (formed with compensated dot
/// products): `μ_i = ½·ln λ_i`.
pub fn cartan_mu(g: &CosetRep) -> Result<DVector<f64>, GiError> {
    let dim = g.dim();
    let b = gram_dd(&g.g);
    let eig = sym_eig(&SymMatrix::symmetrize(b))?;
    let mut mu = DVector::zeros(dim);
    for i in 0..dim {
        let lambda = eig.values[i];
        if lambda <= 0.0 {
            return Err(GiError::SingularRep {
                det: g.g.determinant(),
            });
        }
        mu[i] = 0.5 * lambda.ln();
    }
    Ok(mu)
}

/// `gᵀg` with compensated column dot products, mirrored to exact symmetry.
fn gram_dd(g: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = g.ncols();
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = dd_column_dot(g, i, j);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// K-invariant inner product `⟨μ(rep x), μ(rep y)⟩`.
pub fn gi_inner(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64, GiError> {
    check_dims(x.dim(), y.dim())?;
    Ok(cartan_mu(&coset_rep(x)?)?.dot(&cartan_mu(&coset_rep(y)?)?))
}

/// Norm induced by [`gi_inner`]: `‖μ(rep x)‖` (distance from the identity).
pub fn gi_norm(x: &SpdMatrix) -> Result<f64, GiError> {
    Ok(cartan_mu(&coset_rep(x)?)?.norm())
}

/// Distance `gi_dist(x, y) = ‖μ(g⁻¹h)‖` for representatives `g, h`.
///
/// Equals `gi_norm(⊖x ⊕ y)` and half the affine-invariant distance
/// `‖log(x^{−1/2} y x^{−1/2})‖_F`.
pub fn gi_dist(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64, GiError> {
    check_dims(x.dim(), y.dim())?;
    let m = spd_inv_sqrt(x)?.into_matrix() * spd_sqrt(y)?.matrix();
    Ok(cartan_mu(&CosetRep { g: m })?.norm())
}

/// The Iwasawa factors of `g = k·exp(diag h)·n`.
#[derive(Clone, Debug)]
pub struct IwasawaKan {
    /// Orthogonal part.
    pub k: OrthogonalMatrix,
    /// Log of the positive-diagonal part.
    pub h: DVector<f64>,
    /// Unit-upper-triangular part.
    pub n: DMatrix<f64>,
}

/// Iwasawa decomposition `g = k·exp(diag h)·n` via Cholesky of `gᵀg`.
///
/// `gᵀg = nᵀ·exp(2·diag h)·n`, so the Cholesky factor `c` of `gᵀg` is
/// `nᵀ·exp(diag h)`: the log-diagonal of `c` is `h` and `n = exp(−diag
/// h)·cᵀ`. Both the Gram matrix and the whole factorization are carried in
/// double-double arithmetic — the pivots of `gᵀg` sit `κ(g)²` below its
/// leading entries, and once the Gram is rounded to `f64` those bits (the
/// ones `h` is made of) are gone for good. The K-part
/// `g·n⁻¹·exp(−diag h)` is checked to be orthogonal within `1e-8`.
pub fn iwasawa_h(g: &CosetRep) -> Result<IwasawaKan, GiError> {
    let dim = g.dim();
    let mut gram = vec![Dd::zero(); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = dd_column_dot_pair(&g.g, i, j);
            gram[i * dim + j] = v;
            gram[j * dim + i] = v;
        }
    }
    let c = cholesky_dd(&gram, dim)?;
    let mut h = DVector::zeros(dim);
    let mut n = DMatrix::<f64>::identity(dim, dim);
    // Lower factor rounded to f64, only for recovering k: c = (exp(diag
    // h)·n)ᵀ exactly, so k solves k·cᵀ = g.
    let mut c_f64 = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let c_ii = c[i * dim + i];
        h[i] = c_ii.ln();
        c_f64[(i, i)] = c_ii.to_f64();
        for j in (i + 1)..dim {
            let c_ji = c[j * dim + i];
            n[(i, j)] = c_ji.div(c_ii).to_f64();
            c_f64[(j, i)] = c_ji.to_f64();
        }
    }
    let kt = c_f64
        .solve_lower_triangular(&g.g.transpose())
        .ok_or(GiError::SingularRep {
            det: g.g.determinant(),
        })?;
    let k = kt.transpose();
    let residual = (k.transpose() * &k - DMatrix::<f64>::identity(dim, dim)).norm();
    if residual > IWASAWA_K_TOLERANCE {
        return Err(GiError::IwasawaConditioning {
            residual,
            tolerance: IWASAWA_K_TOLERANCE,
        });
    }
    Ok(IwasawaKan {
        k: OrthogonalMatrix::from_columns_unchecked(k),
        h,
        n,
    })
}

/// Busemann function of the ray `t ↦ k·exp(t·diag a)·K`:
/// `B(x) = ⟨a, H(g⁻¹)⟩` where `g` represents `kᵀ·x·k`.
///
/// The closed form is defined for any unit diagonal direction `a` and is
/// what the layers consume. It agrees with the metric limit
/// `lim (gi_dist(x, δ(t)) − t)` exactly when `a` lies in the closed
/// chamber (non-increasing entries, [`WeylDirection::in_closed_chamber`]);
/// for other orderings the limit sees the sorted direction instead.
pub fn busemann_gi(k: &OrthogonalMatrix, a: &WeylDirection, x: &SpdMatrix) -> Result<f64, GiError> {
    check_dims(k.dim(), a.dim())?;
    check_dims(a.dim(), x.dim())?;
    let y = SpdMatrix::from_positive_unchecked(k.matrix().transpose() * x.matrix() * k.matrix());
    let g_inv = CosetRep {
        g: spd_inv_sqrt(&y)?.into_matrix(),
    };
    Ok(a.vector().dot(&iwasawa_h(&g_inv)?.h))
}

/// Signed hyperplane distance `⟨a, H(g⁻¹·h·k)⟩` with `g = x^{1/2}`,
/// `h = p^{1/2}`.
///
/// Zero when `x = p` (the Iwasawa H of an orthogonal matrix vanishes), and
/// equal to the ray-Busemann pipeline
/// `gi_dist(x,p) · busemann_gi(k, a, ⊖p⊕x) / gi_norm(⊖p⊕x)` through the
/// polar decomposition — the two code paths are kept separate precisely so
/// they can cross-check each other.
pub fn b_distance_gi(hp: &GiHyperplane, x: &SpdMatrix) -> Result<f64, GiError> {
    check_dims(hp.p.dim(), x.dim())?;
    let m = spd_inv_sqrt(x)?.into_matrix() * spd_sqrt(&hp.p)?.matrix() * hp.k.matrix();
    Ok(hp.a.vector().dot(&iwasawa_h(&CosetRep { g: m })?.h))
}

/// One output axis of a [`FcLayerGi`]: a hyperplane `(k_j, a_j, p_j)` in
/// the input space.
#[derive(Clone, Debug)]
pub struct GiAxis {
    pub k: OrthogonalMatrix,
    pub a: WeylDirection,
    pub p: SpdMatrix,
}

impl GiAxis {
    /// Axis with the identity frame.
    pub fn axis_aligned(a: WeylDirection, p: SpdMatrix) -> Result<Self, GiError> {
        check_dims(a.dim(), p.dim())?;
        let dim = a.dim();
        Ok(GiAxis {
            k: OrthogonalMatrix::identity(dim),
            a,
            p,
        })
    }
}

/// Fully connected layer `SPD_{m_in} → SPD_{m_out}` in the symmetric-space
/// parameterization.
///
/// Each output axis `j` measures the translated Busemann value
/// `v_j = busemann_gi(k_j, a_j, ⊖p_j ⊕ x)`; the output point is
/// `n·exp(−2·diag v)·nᵀ` for the layer's unit-upper-triangular `n` (the
/// factor 2 converts coset exponents to SPD-point exponents under
/// `gK ↦ g·gᵀ`). Reading the output back against the `j`-th axis
/// hyperplane `(I, e_j, I)` recovers `v_j`.
#[derive(Clone, Debug)]
pub struct FcLayerGi {
    m_in: usize,
    axes: Vec<GiAxis>,
    n: DMatrix<f64>,
}

impl FcLayerGi {
    /// Builds the layer; `n` must be unit upper triangular within `1e-12`
    /// (it is canonicalized to exact unit diagonal and zero strict lower
    /// part).
    pub fn new(m_in: usize, axes: Vec<GiAxis>, n: DMatrix<f64>) -> Result<Self, GiError> {
        if axes.is_empty() {
            return Err(GiError::Empty);
        }
        for axis in &axes {
            check_dims(axis.k.dim(), m_in)?;
            check_dims(axis.a.dim(), m_in)?;
            check_dims(axis.p.dim(), m_in)?;
        }
        let m_out = axes.len();
        if n.nrows() != m_out || n.ncols() != m_out {
            return Err(GiError::DimensionMismatch {
                left: n.nrows(),
                right: m_out,
            });
        }
        let mut defect = 0.0f64;
        for i in 0..m_out {
            defect = defect.max((n[(i, i)] - 1.0).abs());
            for j in 0..i {
                defect = defect.max(n[(i, j)].abs());
            }
        }
        if defect > 1e-12 {
            return Err(GiError::NotUnitUpperTriangular { defect });
        }
        let mut canonical = n;
        for i in 0..m_out {
            canonical[(i, i)] = 1.0;
            for j in 0..i {
                canonical[(i, j)] = 0.0;
            }
        }
        Ok(FcLayerGi {
            m_in,
            axes,
            n: canonical,
        })
    }

    /// Layer with the identity mixing matrix.
    pub fn with_identity_n(m_in: usize, axes: Vec<GiAxis>) -> Result<Self, GiError> {
        let m_out = axes.len();
        Self::new(m_in, axes, DMatrix::identity(m_out, m_out))
    }

    pub fn input_dim(&self) -> usize {
        self.m_in
    }

    pub fn output_dim(&self) -> usize {
        self.axes.len()
    }

    pub fn mixing(&self) -> &DMatrix<f64> {
        &self.n
    }

    /// The translated Busemann values `v_j` at `x`.
    pub fn hyperplane_values(&self, x: &SpdMatrix) -> Result<Vec<f64>, GiError> {
        check_dims(x.dim(), self.m_in)?;
        let mut v = Vec::with_capacity(self.axes.len());
        for axis in &self.axes {
            let translated = gi_oplus(&gi_ominus(&axis.p)?, x)?;
            v.push(busemann_gi(&axis.k, &axis.a, &translated)?);
        }
        Ok(v)
    }
}

/// Forward pass of a symmetric-space FC layer; see [`FcLayerGi`].
pub fn fc_layer_gi_forward(layer: &FcLayerGi, x: &SpdMatrix) -> Result<SpdMatrix, GiError> {
    let v = layer.hyperplane_values(x)?;
    let m_out = layer.axes.len();
    let mut scaled = layer.n.clone();
    // n·exp(−2·diag v)·nᵀ, with the exponential applied column-wise.
    for j in 0..m_out {
        let e = (-2.0 * v[j]).exp();
        for i in 0..m_out {
            scaled[(i, j)] *= e;
        }
    }
    Ok(SpdMatrix::from_positive_unchecked(
        scaled * layer.n.transpose(),
    ))
}
