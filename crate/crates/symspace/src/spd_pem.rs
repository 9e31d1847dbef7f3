//! SPD geometry under pullback-Euclidean metrics.
//!
//! A diffeomorphism `φ: SPD_m → Sym_m` pulls the Euclidean (Frobenius)
//! structure back onto the SPD cone: distance `‖φ(x) − φ(y)‖_F`, a
//! commutative gyro-addition `x ⊕ y = φ⁻¹(φ(x) + φ(y))`, the Busemann
//! function `B_a(x) = −⟨a, φ(x)⟩_F` of the ray `φ⁻¹(t·a)`, and the signed
//! point-to-hyperplane distance `⟨a, φ(p) − φ(x)⟩_F`.
//!
//! Two instances ship:
//!
//! * [`PhiMap::LogEuclidean`] — `φ = matrix log`, the Log-Euclidean metric;
//! * [`PhiMap::Power`] — `φ_θ(x) = (x^θ − I)/θ` for `θ ∈ (0, 1]`, a second
//!   pullback demonstrating that everything here is φ-generic. As `θ → 0⁺`
//!   it converges to the log map, which is how it is validated.
//!
//! The power map's inverse `s ↦ (I + θs)^{1/θ}` is defined only where
//! `I + θs` is positive definite; leaving that domain is a real error
//! ([`SpdPemError::PowerDomain`]), not something to clamp away.
//!
//! On top of the metric ops sit the Log-Euclidean neural pieces: the FC
//! layer assembling hyperplane distances into a new SPD matrix
//! ([`fc_layer_le_forward`]), the weighted Fréchet mean ([`wfm_le`]), and —
//! for `φ = log` only, where the Fréchet derivatives have spectral closed
//! forms — the Riemannian exponential/logarithmic maps and parallel
//! transport ([`le_exp_map`], [`le_log_map`], [`le_transport`]).

use nalgebra::DMatrix;
use thiserror::Error;

use crate::matkernels::{
    spd_log, spectral_apply, sym_eig, sym_exp, MatError, SpdMatrix, SymMatrix,
};

/// Errors for pullback-Euclidean operations.
#[derive(Debug, Error)]
pub enum SpdPemError {
    /// Underlying matrix-kernel failure.
    #[error(transparent)]
    Mat(#[from] MatError),
    /// Power-map exponent outside `(0, 1]`.
    #[error("power-map exponent must lie in (0, 1], got {theta}")]
    InvalidTheta { theta: f64 },
    /// The power map's inverse was applied outside its domain.
    #[error(
        "power map inverse undefined: eigenvalue {eigenvalue:.6e} makes I + {theta}·s \
         lose positive definiteness"
    )]
    PowerDomain { eigenvalue: f64, theta: f64 },
    /// A hyperplane direction must be nonzero (it is normalized on entry).
    #[error("hyperplane direction must be nonzero")]
    ZeroDirection,
    /// Operand dimensions disagree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// Fréchet-mean weights must be strictly positive.
    #[error("weight {value} at index {index} is not positive")]
    WeightNotPositive { index: usize, value: f64 },
    /// Fréchet-mean weights must sum to 1.
    #[error("weights sum to {sum}, expected 1 within {tolerance}")]
    WeightSum { sum: f64, tolerance: f64 },
    /// An operation over a collection received no elements.
    #[error("input collection is empty")]
    Empty,
    /// FC-layer parameter count must be m_out·(m_out+1)/2.
    #[error("expected {expected} parameter pairs for output dimension {m_out}, got {got}")]
    ParamCount {
        m_out: usize,
        expected: usize,
        got: usize,
    },
}

/// A pullback diffeomorphism `φ: SPD → Sym` together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiMap {
    /// `φ = matrix logarithm` (Log-Euclidean metric).
    LogEuclidean,
    /// `φ_θ(x) = (x^θ − I)/θ`, `θ ∈ (0, 1]`.
    Power { theta: f64 },
}

impl PhiMap {
    /// The Log-Euclidean instance.
    pub fn log_euclidean() -> Self {
        PhiMap::LogEuclidean
    }

    /// The power-map instance; `theta` must lie in `(0, 1]`.
    pub fn power(theta: f64) -> Result<Self, SpdPemError> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(SpdPemError::InvalidTheta { theta });
        }
        Ok(PhiMap::Power { theta })
    }

    /// Short label for reports (`log_euclidean` or `power(θ)`).
    pub fn label(&self) -> String {
        match self {
            PhiMap::LogEuclidean => "log_euclidean".to_string(),
            PhiMap::Power { theta } => format!("power({theta})"),
        }
    }

    /// Applies `φ`.
    pub fn phi(&self, x: &SpdMatrix) -> Result<SymMatrix, SpdPemError> {
        match self {
            PhiMap::LogEuclidean => Ok(spd_log(x)?),
            PhiMap::Power { theta } => {
                let th = *theta;
                Ok(spectral_apply(&x.to_sym(), |l| {
                    (l > 0.0).then(|| (l.powf(th) - 1.0) / th)
                })?)
            }
        }
    }

    /// Applies `φ⁻¹`.
    ///
    /// For the power map this requires `I + θ·s` positive definite and
    /// fails with [`SpdPemError::PowerDomain`] naming the offending
    /// eigenvalue otherwise.
    pub fn phi_inv(&self, s: &SymMatrix) -> Result<SpdMatrix, SpdPemError> {
        match self {
            PhiMap::LogEuclidean => Ok(sym_exp(s)?),
            PhiMap::Power { theta } => {
                let th = *theta;
                let mapped = spectral_apply(s, |l| {
                    (1.0 + th * l > 0.0).then(|| (1.0 + th * l).powf(1.0 / th))
                })
                .map_err(|e| match e {
                    MatError::SpectralDomain { eigenvalue } => SpdPemError::PowerDomain {
                        eigenvalue,
                        theta: th,
                    },
                    other => SpdPemError::Mat(other),
                })?;
                Ok(SpdMatrix::from_positive_unchecked(mapped.into_matrix()))
            }
        }
    }
}

/// Hyperplane through `p` with unit Frobenius direction `a` in
/// φ-coordinates. The direction is normalized at construction.
#[derive(Clone, Debug)]
pub struct PemHyperplane {
    a: SymMatrix,
    pub p: SpdMatrix,
}

impl PemHyperplane {
    pub fn new(a: SymMatrix, p: SpdMatrix) -> Result<Self, SpdPemError> {
        if a.dim() != p.dim() {
            return Err(SpdPemError::DimensionMismatch {
                left: a.dim(),
                right: p.dim(),
            });
        }
        let norm = a.frobenius_norm();
        if norm == 0.0 {
            return Err(SpdPemError::ZeroDirection);
        }
        let unit = SymMatrix::symmetrize(a.into_matrix() / norm);
        Ok(PemHyperplane { a: unit, p })
    }

    /// The unit direction.
    pub fn direction(&self) -> &SymMatrix {
        &self.a
    }
}

fn check_dims(left: usize, right: usize) -> Result<(), SpdPemError> {
    if left != right {
        return Err(SpdPemError::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Gyro-addition `x ⊕ y = φ⁻¹(φ(x) + φ(y))` — commutative, identity `I`.
pub fn pem_oplus(phi: &PhiMap, x: &SpdMatrix, y: &SpdMatrix) -> Result<SpdMatrix, SpdPemError> {
    check_dims(x.dim(), y.dim())?;
    let sum = SymMatrix::symmetrize(phi.phi(x)?.into_matrix() + phi.phi(y)?.into_matrix());
    phi.phi_inv(&sum)
}

/// Gyro-inverse `⊖x = φ⁻¹(−φ(x))`.
pub fn pem_ominus(phi: &PhiMap, x: &SpdMatrix) -> Result<SpdMatrix, SpdPemError> {
    let neg = SymMatrix::symmetrize(-phi.phi(x)?.into_matrix());
    phi.phi_inv(&neg)
}

/// Pullback inner product `⟨φ(x), φ(y)⟩_F`.
pub fn pem_inner(phi: &PhiMap, x: &SpdMatrix, y: &SpdMatrix) -> Result<f64, SpdPemError> {
    check_dims(x.dim(), y.dim())?;
    Ok(phi.phi(x)?.frobenius_inner(&phi.phi(y)?))
}

/// Pullback norm `‖φ(x)‖_F` (distance from the identity).
pub fn pem_norm(phi: &PhiMap, x: &SpdMatrix) -> Result<f64, SpdPemError> {
    Ok(phi.phi(x)?.frobenius_norm())
}

/// Pullback distance `‖φ(x) − φ(y)‖_F`.
pub fn pem_dist(phi: &PhiMap, x: &SpdMatrix, y: &SpdMatrix) -> Result<f64, SpdPemError> {
    check_dims(x.dim(), y.dim())?;
    Ok((phi.phi(x)?.into_matrix() - phi.phi(y)?.into_matrix()).norm())
}

/// Busemann function of the ray `t ↦ φ⁻¹(t·a)`: `B_a(x) = −⟨a, φ(x)⟩_F`.
///
/// # Panics
/// If `a` is not unit Frobenius norm within `1e-9` (construct directions
/// through [`PemHyperplane`] to get normalization for free).
pub fn busemann_pem(phi: &PhiMap, a: &SymMatrix, x: &SpdMatrix) -> Result<f64, SpdPemError> {
    check_dims(a.dim(), x.dim())?;
    assert!(
        (a.frobenius_norm() - 1.0).abs() <= 1e-9,
        "busemann direction must be unit Frobenius norm"
    );
    Ok(-a.frobenius_inner(&phi.phi(x)?))
}

/// Signed hyperplane distance `⟨a, φ(p) − φ(x)⟩_F`.
///
/// Equals the Euclidean signed distance of `φ(x)` to the affine hyperplane
/// `{y : ⟨a, y − φ(p)⟩ = 0}` up to sign, and the ray-Busemann pipeline
/// `d(x,p)·B_a(⊖p⊕x)/‖⊖p⊕x‖` exactly.
pub fn b_distance_pem(phi: &PhiMap, hp: &PemHyperplane, x: &SpdMatrix) -> Result<f64, SpdPemError> {
    check_dims(hp.p.dim(), x.dim())?;
    let diff = phi.phi(&hp.p)?.into_matrix() - phi.phi(x)?.into_matrix();
    Ok(hp.a.matrix().dot(&diff))
}

/// One hyperplane pair `(p, a)` of a Log-Euclidean FC layer. Both are SPD;
/// the layer works with their logarithms, cached at construction.
#[derive(Clone, Debug)]
pub struct FcPairLe {
    pub p: SpdMatrix,
    pub a: SpdMatrix,
}

/// Log-Euclidean fully connected layer `SPD_{m_in} → SPD_{m_out}`.
///
/// One hyperplane pair per output entry `(l, j)`, `l ≤ j`: the forward pass
/// computes `v_(l,j) = ⟨log x − log p_(l,j), log a_(l,j)⟩_F`, assembles the
/// symmetric matrix `z` with `z_ll = v_(l,l)` and `z_lj = v_(l,j)/√2` off
/// the diagonal, and returns `exp(z)` — always SPD.
#[derive(Clone, Debug)]
pub struct FcLayerLe {
    m_in: usize,
    m_out: usize,
    log_p: Vec<SymMatrix>,
    log_a: Vec<SymMatrix>,
}

impl FcLayerLe {
    /// Builds the layer from `m_out·(m_out+1)/2` pairs ordered row-major
    /// over `l ≤ j` (pair index `(l,j)` before `(l,j+1)`, rows by `l`).
    pub fn new(m_in: usize, m_out: usize, pairs: &[FcPairLe]) -> Result<Self, SpdPemError> {
        let expected = m_out * (m_out + 1) / 2;
        if pairs.len() != expected {
            return Err(SpdPemError::ParamCount {
                m_out,
                expected,
                got: pairs.len(),
            });
        }
        let mut log_p = Vec::with_capacity(expected);
        let mut log_a = Vec::with_capacity(expected);
        for pair in pairs {
            check_dims(pair.p.dim(), m_in)?;
            check_dims(pair.a.dim(), m_in)?;
            log_p.push(spd_log(&pair.p)?);
            log_a.push(spd_log(&pair.a)?);
        }
        Ok(FcLayerLe {
            m_in,
            m_out,
            log_p,
            log_a,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.m_in
    }

    pub fn output_dim(&self) -> usize {
        self.m_out
    }

    /// The hyperplane values `v_(l,j)` at `x`, row-major over `l ≤ j`.
    pub fn hyperplane_values(&self, x: &SpdMatrix) -> Result<Vec<f64>, SpdPemError> {
        check_dims(x.dim(), self.m_in)?;
        let log_x = spd_log(x)?;
        Ok(self
            .log_p
            .iter()
            .zip(&self.log_a)
            .map(|(lp, la)| (log_x.matrix() - lp.matrix()).dot(la.matrix()))
            .collect())
    }
}

/// Forward pass of a Log-Euclidean FC layer; see [`FcLayerLe`].
pub fn fc_layer_le_forward(layer: &FcLayerLe, x: &SpdMatrix) -> Result<SpdMatrix, SpdPemError> {
    let v = layer.hyperplane_values(x)?;
    let m = layer.m_out;
    let mut z = DMatrix::<f64>::zeros(m, m);
    let mut idx = 0;
    for l in 0..m {
        for j in l..m {
            if l == j {
                z[(l, l)] = v[idx];
            } else {
                let scaled = v[idx] / 2.0_f64.sqrt();
                z[(l, j)] = scaled;
                z[(j, l)] = scaled;
            }
            idx += 1;
        }
    }
    Ok(sym_exp(&SymMatrix::symmetrize(z))?)
}

/// Weighted Fréchet mean in the Log-Euclidean metric:
/// `exp(Σ w_j · log x_j)` with positive weights summing to 1 within `1e-12`.
pub fn wfm_le(points: &[SpdMatrix], weights: &[f64]) -> Result<SpdMatrix, SpdPemError> {
    const WEIGHT_TOLERANCE: f64 = 1e-12;
    if points.is_empty() {
        return Err(SpdPemError::Empty);
    }
    check_dims(points.len(), weights.len())?;
    for (index, &w) in weights.iter().enumerate() {
        if w.is_nan() || w <= 0.0 {
            return Err(SpdPemError::WeightNotPositive { index, value: w });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(SpdPemError::WeightSum {
            sum,
            tolerance: WEIGHT_TOLERANCE,
        });
    }
    let dim = points[0].dim();
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    for (x, &w) in points.iter().zip(weights) {
        check_dims(x.dim(), dim)?;
        acc += spd_log(x)?.into_matrix() * w;
    }
    Ok(sym_exp(&SymMatrix::symmetrize(acc))?)
}

/// Fréchet derivative of `exp` at the symmetric matrix `s`, applied to `v`.
///
/// With `s = u·diag(λ)·uᵀ` and `ṽ = uᵀvu`, the result is `u·(ṽ ∘ Φ)·uᵀ`
/// where `Φ_ij` is the divided difference `(e^{λ_i} − e^{λ_j})/(λ_i − λ_j)`
/// (equal-λ limit `e^{λ_j}`), computed via `expm1` to survive close
/// eigenvalues.
fn frechet_dexp(s: &SymMatrix, v: &SymMatrix) -> Result<SymMatrix, MatError> {
    let eig = sym_eig(s)?;
    let u = eig.vectors.matrix();
    let vt = u.transpose() * v.matrix() * u;
    let lam = &eig.values;
    let n = lam.len();
    let mut scaled = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = lam[i] - lam[j];
            let coeff = if delta == 0.0 {
                lam[j].exp()
            } else {
                lam[j].exp() * delta.exp_m1() / delta
            };
            scaled[(i, j)] = vt[(i, j)] * coeff;
        }
    }
    Ok(SymMatrix::symmetrize(u * scaled * u.transpose()))
}

/// Fréchet derivative of `log` at the SPD matrix `x`, applied to `v`.
///
/// Divided differences `(ln μ_i − ln μ_j)/(μ_i − μ_j)` (equal-μ limit
/// `1/μ_j`) are computed via `log1p` of the relative gap, which stays
/// accurate when eigenvalues cluster.
fn frechet_dlog(x: &SpdMatrix, v: &SymMatrix) -> Result<SymMatrix, MatError> {
    let eig = sym_eig(&x.to_sym())?;
    let u = eig.vectors.matrix();
    let vt = u.transpose() * v.matrix() * u;
    let mu = &eig.values;
    let n = mu.len();
    let mut scaled = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = mu[i] - mu[j];
            let coeff = if delta == 0.0 {
                1.0 / mu[j]
            } else {
                (delta / mu[j]).ln_1p() / delta
            };
            scaled[(i, j)] = vt[(i, j)] * coeff;
        }
    }
    Ok(SymMatrix::symmetrize(u * scaled * u.transpose()))
}

/// Log-Euclidean Riemannian exponential at `x`:
/// `exp_x(u) = exp(log x + D log_x(u))`.
pub fn le_exp_map(x: &SpdMatrix, u: &SymMatrix) -> Result<SpdMatrix, SpdPemError> {
    check_dims(x.dim(), u.dim())?;
    let shifted =
        SymMatrix::symmetrize(spd_log(x)?.into_matrix() + frechet_dlog(x, u)?.into_matrix());
    Ok(sym_exp(&shifted)?)
}

/// Log-Euclidean Riemannian logarithm at `x`:
/// `log_x(y) = D exp_{log x}(log y − log x)`. Inverse of [`le_exp_map`].
pub fn le_log_map(x: &SpdMatrix, y: &SpdMatrix) -> Result<SymMatrix, SpdPemError> {
    check_dims(x.dim(), y.dim())?;
    let diff = SymMatrix::symmetrize(spd_log(y)?.into_matrix() - spd_log(x)?.into_matrix());
    Ok(frechet_dexp(&spd_log(x)?, &diff)?)
}

/// Log-Euclidean metric on the tangent space at `x`:
/// `⟨u, v⟩_x = ⟨D log_x(u), D log_x(v)⟩_F`.
pub fn le_inner(x: &SpdMatrix, u: &SymMatrix, v: &SymMatrix) -> Result<f64, SpdPemError> {
    check_dims(x.dim(), u.dim())?;
    check_dims(x.dim(), v.dim())?;
    Ok(frechet_dlog(x, u)?.frobenius_inner(&frechet_dlog(x, v)?))
}

/// Log-Euclidean parallel transport of the tangent vector `v` from `from`
/// to `to`: `P(v) = D exp_{log to}(D log_from(v))`. Preserves [`le_inner`].
pub fn le_transport(
    from: &SpdMatrix,
    to: &SpdMatrix,
    v: &SymMatrix,
) -> Result<SymMatrix, SpdPemError> {
    check_dims(from.dim(), v.dim())?;
    check_dims(from.dim(), to.dim())?;
    let flat = frechet_dlog(from, v)?;
    Ok(frechet_dexp(&spd_log(to)?, &flat)?)
}
