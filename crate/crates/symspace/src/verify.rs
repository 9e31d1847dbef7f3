//! Independent numerical oracles and the property-suite runner.
//!
//! Every closed form in this crate is cross-checked here against a route
//! that shares as little code with it as possible:
//!
//! * Busemann closed forms against the defining limit `d(x, δ(t)) − t`,
//!   with ray points handled in coordinates (boundary radius for the ball,
//!   `φ`-space vectors and diagonal exponents for the SPD spaces) so large
//!   `t` never materializes an ill-conditioned matrix.
//! * The Cholesky-based Iwasawa factorization against a hand-rolled
//!   modified Gram–Schmidt QR ([`iwasawa_qr_oracle`]).
//! * The geodesic-hyperplane signed distance against direct golden-section
//!   minimization of the distance to the hyperplane's geodesic
//!   ([`projection_min_distance_oracle`]).
//! * The boundary angular metric against the flat-orbit distance quotient
//!   ([`angular_metric_estimate`]).
//!
//! [`run_suite`] packages these oracles and the module invariants into
//! named checks, runs each over independently seeded random trials, and
//! reports per-check worst errors in a [`PropertyReport`]. Reports are
//! deterministic for a fixed `(suite, seed, trials)` triple — each trial
//! derives its own random stream from the seed, the check name, and the
//! trial index, so neither thread count nor check order can perturb the
//! numbers. A failed check is recorded and the suite carries on; nothing
//! here panics on a numerical miss.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::attention::{
    attention_forward, attention_weights, AttentionBlock, AttentionError, AttentionFc,
};
use crate::matkernels::{
    dd_column_dot, jacobi_spd_eigenvalues, spd_inv_sqrt, spd_log, sym_exp, MatError,
    OrthogonalMatrix, SpdMatrix, SymMatrix,
};
use crate::poincare::{
    b_distance_ball, busemann_ball, clamp_event_count, dist_ball, exp_map_ball, g_distance,
    h_distance, log0_ball, lorentz_distance, lorentz_from_ball, mlr_ball, mobius_add,
    BHyperplaneBall, BMlrClass, BallBoundary, BallError, BallPoint, GHyperplaneBall,
    HHoroplaneBall, MlrHeadBall,
};
use crate::spd_pem::{
    b_distance_pem, busemann_pem, fc_layer_le_forward, le_exp_map, le_inner, le_log_map,
    le_transport, pem_dist, pem_norm, pem_ominus, pem_oplus, wfm_le, FcLayerLe, FcPairLe,
    PemHyperplane, PhiMap, SpdPemError,
};
use crate::symspace_gi::{
    b_distance_gi, busemann_gi, cartan_mu, coset_rep, fc_layer_gi_forward, gi_dist, gi_inner,
    gi_norm, gi_ominus, gi_oplus, iwasawa_h, CosetRep, FcLayerGi, GiAxis, GiError, GiHyperplane,
    IwasawaKan, WeylDirection,
};

/// Largest ray parameter the dense (generic-`x`) route of the symmetric-
/// space limit oracle accepts; beyond this the Gram matrix spectrum spans
/// more than `e^{200}` and even the graded eigensolver runs out of range.
const GI_DENSE_T_MAX: f64 = 50.0;

/// Largest ray parameter of the ball limit oracle (`cosh²(t/2)` must stay
/// finite).
const BALL_T_MAX: f64 = 700.0;

/// Errors from oracles and the suite runner.
#[derive(Debug, Error)]
pub enum VerifyError {
    /// Underlying matrix-kernel failure.
    #[error(transparent)]
    Mat(#[from] MatError),
    /// Underlying ball-geometry failure.
    #[error(transparent)]
    Ball(#[from] BallError),
    /// Underlying Log-Euclidean failure.
    #[error(transparent)]
    Pem(#[from] SpdPemError),
    /// Underlying symmetric-space failure.
    #[error(transparent)]
    Gi(#[from] GiError),
    /// Underlying attention failure.
    #[error(transparent)]
    Attention(#[from] AttentionError),
    /// The ray parameter overflows the oracle's representable range.
    #[error("ray parameter t = {t} overflows this oracle; use t <= {max}")]
    Overflow { t: f64, max: f64 },
    /// The QR oracle hit a (numerically) dependent column.
    #[error("rank deficiency at column {column}")]
    RankDeficient { column: usize },
    /// The projection oracle is specific to the two-dimensional ball.
    #[error("projection oracle needs dimension 2, got {dim}")]
    DimensionNotTwo { dim: usize },
    /// Unknown suite name.
    #[error("unknown suite `{name}` (expected poincare|pem|gi|attention|all)")]
    UnknownSuite { name: String },
}

/// Outcome of one named check: the worst error seen over its trials
/// against the tolerance it must meet.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One suite run: every check outcome plus the reproducibility envelope
/// (seed, wall time, and how often ball points had to be clamped).
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub suite: String,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub clamp_events: u64,
    pub checks: Vec<CheckResult>,
}

impl PropertyReport {
    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Ball Busemann limit oracle: `d(x, δ(t)) − t` along `δ(t) = tanh(t/2)·ξ`,
/// computed clamp-free by substituting `1 − ‖δ(t)‖² = sech²(t/2)` into the
/// distance formula instead of materializing the near-boundary point.
///
/// The difference from the closed form decays like `e^{−t}`; at `t = 40`
/// it is far below `1e−8`.
pub fn busemann_limit_oracle_ball(
    xi: &BallBoundary,
    x: &BallPoint,
    t: f64,
) -> Result<f64, VerifyError> {
    assert!(t > 0.0, "ray parameter must be positive");
    if t > BALL_T_MAX {
        return Err(VerifyError::Overflow { t, max: BALL_T_MAX });
    }
    let radius = (t / 2.0).tanh();
    let diff2 = (x.coords() - xi.direction() * radius).norm_squared();
    let cosh_half = (t / 2.0).cosh();
    let arg = 1.0 + 2.0 * diff2 * cosh_half * cosh_half / (1.0 - x.coords().norm_squared());
    Ok(arg.max(1.0).acosh() - t)
}

/// Pullback-Euclidean Busemann limit oracle: `d(x, δ(t)) − t` along the
/// `φ`-coordinate ray `φ(δ(t)) = t·a`, evaluated entirely in `φ`-space.
///
/// Uses the cancellation-free form `(‖v‖² − 2t⟨a,v⟩)/(d + t)` with
/// `v = φ(x)`, valid because `‖a‖ = 1`, so arbitrarily large `t` loses no
/// precision. The difference from the closed form is
/// `(‖v‖² − ⟨a,v⟩²)/(2t) + O(1/t²)` — halving on doubled `t`.
pub fn busemann_limit_oracle_pem(
    phi: &PhiMap,
    a: &SymMatrix,
    x: &SpdMatrix,
    t: f64,
) -> Result<f64, VerifyError> {
    assert!(t > 0.0, "ray parameter must be positive");
    let v = phi.phi(x)?;
    let d = (v.matrix() - a.matrix() * t).norm();
    Ok((v.frobenius_norm().powi(2) - 2.0 * t * a.frobenius_inner(&v)) / (d + t))
}

/// Symmetric-space Busemann limit oracle: `gi_dist(x, δ(t)) − t` along the
/// ray with frame `k` and direction `a`.
///
/// Two routes. When `kᵀxk` is diagonal (the flat A-orbit through the ray,
/// in particular every on-ray `x`), the distance reduces to exponent
/// arithmetic `‖t·a − w‖` with `w = ½·ln diag(kᵀxk)`, again in the
/// cancellation-free quotient form — exact for any `t`. Otherwise the ray
/// point is materialized as `x^{−1/2}·k·exp(t·diag a)` and its Cartan
/// projection extracted with the relative-accuracy Jacobi eigensolver
/// (ordinary solvers lose the small exponents of such graded matrices);
/// this route caps `t` at 50 because the Gram spectrum grows like
/// `e^{2t}`. The difference from the closed form decays like `O(1/t)` with
/// constant `~‖log x‖²/2`.
pub fn busemann_limit_oracle_gi(
    k: &OrthogonalMatrix,
    a: &WeylDirection,
    x: &SpdMatrix,
    t: f64,
) -> Result<f64, VerifyError> {
    assert!(t > 0.0, "ray parameter must be positive");
    let dim = x.dim();
    let y = k.matrix().transpose() * x.matrix() * k.matrix();
    let mut max_diag = 0.0f64;
    let mut max_off = 0.0f64;
    for i in 0..dim {
        max_diag = max_diag.max(y[(i, i)].abs());
        for j in 0..dim {
            if i != j {
                max_off = max_off.max(y[(i, j)].abs());
            }
        }
    }
    if max_off <= 1e-13 * max_diag {
        // Flat-orbit route: both points live in the diagonal flat.
        let w = DVector::from_fn(dim, |i, _| 0.5 * y[(i, i)].ln());
        let d = (a.vector() * t - &w).norm();
        return Ok((w.norm_squared() - 2.0 * t * a.vector().dot(&w)) / (d + t));
    }
    if t > GI_DENSE_T_MAX {
        return Err(VerifyError::Overflow {
            t,
            max: GI_DENSE_T_MAX,
        });
    }
    let mut m = spd_inv_sqrt(x)?.into_matrix() * k.matrix();
    for j in 0..dim {
        let scale = (t * a.vector()[j]).exp();
        for i in 0..dim {
            m[(i, j)] *= scale;
        }
    }
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = dd_column_dot(&m, i, j);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let lambda = jacobi_spd_eigenvalues(&gram)?;
    let mu = DVector::from_fn(dim, |i, _| 0.5 * lambda[i].ln());
    Ok(mu.norm() - t)
}

/// QR route for the Iwasawa decomposition, independent of the production
/// Cholesky route: modified Gram–Schmidt with one reorthogonalization
/// pass, diagonal signs fixed positive. `g = k·exp(diag h)·n` with
/// `k = Q`, `h = log diag R`, `n = diag(R)⁻¹·R`.
pub fn iwasawa_qr_oracle(g: &CosetRep) -> Result<IwasawaKan, VerifyError> {
    let dim = g.dim();
    let m = g.matrix();
    let scale = m.norm();
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    let mut r = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let mut v: DVector<f64> = m.column(j).into();
        for i in 0..j {
            let qi = q.column(i);
            let c = qi.dot(&v);
            r[(i, j)] = c;
            v -= DVector::from(qi) * c;
        }
        // Second pass restores orthogonality lost to cancellation.
        for i in 0..j {
            let qi = q.column(i);
            let c = qi.dot(&v);
            r[(i, j)] += c;
            v -= DVector::from(qi) * c;
        }
        let norm = v.norm();
        if norm <= 1e-14 * scale {
            return Err(VerifyError::RankDeficient { column: j });
        }
        r[(j, j)] = norm;
        q.set_column(j, &(v / norm));
    }
    let mut h = DVector::zeros(dim);
    let mut n = DMatrix::<f64>::identity(dim, dim);
    for i in 0..dim {
        h[i] = r[(i, i)].ln();
        for j in (i + 1)..dim {
            n[(i, j)] = r[(i, j)] / r[(i, i)];
        }
    }
    Ok(IwasawaKan {
        k: OrthogonalMatrix::from_columns_unchecked(q),
        h,
        n,
    })
}

/// Brute-force minimal distance from `x` to a geodesic hyperplane of the
/// two-dimensional ball: golden-section search along the hyperplane's
/// unit-speed geodesic `s ↦ p ⊕ tanh(s/2)·u` (with `u ⊥ a`), refined to
/// `1e−4` parameter resolution over `s ∈ [−10, 10]`. The distance to a
/// geodesic is convex along it, so the search is exact to the resolution.
pub fn projection_min_distance_oracle(
    hp: &GHyperplaneBall,
    x: &BallPoint,
) -> Result<f64, VerifyError> {
    if hp.p.dim() != 2 {
        return Err(VerifyError::DimensionNotTwo { dim: hp.p.dim() });
    }
    let a = hp.normal();
    let u = DVector::from_vec(vec![-a[1], a[0]]) / a.norm();
    let f = |s: f64| -> f64 {
        let w = BallPoint::clamped(&u * (s / 2.0).tanh());
        dist_ball(x, &mobius_add(&hp.p, &w))
    };
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-10.0f64, 10.0f64);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > 1e-4 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    Ok(fc.min(fd))
}

/// Boundary angle estimate from ray divergence: `gi_dist(δ(t), δ′(t))/t`
/// for the axis rays `δ(t) = exp(t·diag a)·K`. Both rays live in the
/// diagonal flat, where the distance is exactly the Euclidean distance of
/// the exponent vectors, so this is `‖t·a′ − t·a‖/t` — constant in `t` and
/// equal to the angular metric `2·sin(∠/2)` between the limit points.
pub fn angular_metric_estimate(a: &WeylDirection, a_prime: &WeylDirection, t: f64) -> f64 {
    assert!(t > 0.0, "ray parameter must be positive");
    (a_prime.vector() * t - a.vector() * t).norm() / t
}

// ---------------------------------------------------------------------------
// Randomized samples (the distributions all checks draw from)
// ---------------------------------------------------------------------------

/// Deterministic per-trial stream: mixes the suite seed, the check name,
/// and the trial index, so checks can run in any order or thread.
fn trial_rng(seed: u64, name: &str, trial: u64) -> ChaCha8Rng {
    // FNV-1a over the name, then a splitmix64 finisher over the mix.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h
        .wrapping_add(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(trial.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn sample_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Ball point with norm ≤ 0.9: uniform direction, radius `0.9·u^{1/m}`.
fn sample_ball_point(dim: usize, rng: &mut ChaCha8Rng) -> BallPoint {
    let r = 0.9 * rng.gen::<f64>().powf(1.0 / dim as f64);
    BallPoint::clamped(sample_unit_vector(dim, rng) * r)
}

fn sample_boundary(dim: usize, rng: &mut ChaCha8Rng) -> BallBoundary {
    BallBoundary::from_vector(sample_unit_vector(dim, rng)).expect("unit direction")
}

fn sample_sym(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> SymMatrix {
    SymMatrix::new(DMatrix::from_fn(dim, dim, |_, _| {
        rng.gen_range(-scale..scale)
    }))
    .expect("finite square matrix")
}

/// SPD sample `exp(symmetric with entries U(−1,1))`.
fn sample_spd(dim: usize, rng: &mut ChaCha8Rng) -> SpdMatrix {
    sym_exp(&sample_sym(dim, 1.0, rng)).expect("exp of a bounded symmetric matrix")
}

fn sample_unit_sym(dim: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let s = sample_sym(dim, 1.0, rng);
    let norm = s.frobenius_norm();
    SymMatrix::new(s.matrix() / norm).expect("normalized symmetric matrix")
}

fn sample_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> OrthogonalMatrix {
    loop {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let Ok(rep) = CosetRep::new(m) else { continue };
        let Ok(dec) = iwasawa_qr_oracle(&rep) else {
            continue;
        };
        return dec.k;
    }
}

fn sample_weyl(dim: usize, rng: &mut ChaCha8Rng) -> WeylDirection {
    WeylDirection::unit(sample_unit_vector(dim, rng)).expect("unit vector")
}

/// Chamber-sorted unit direction (entries non-increasing); the directions
/// for which the Busemann closed form is the metric limit.
fn sample_weyl_sorted(dim: usize, rng: &mut ChaCha8Rng) -> WeylDirection {
    let mut v: Vec<f64> = sample_unit_vector(dim, rng).iter().copied().collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    WeylDirection::unit(DVector::from_vec(v)).expect("unit vector")
}

/// Invertible matrix with condition number at most `10^(2·half_range)`:
/// two random orthogonal factors around a log-uniform diagonal.
fn sample_cond_bounded(dim: usize, half_range: f64, rng: &mut ChaCha8Rng) -> CosetRep {
    let q1 = sample_orthogonal(dim, rng);
    let q2 = sample_orthogonal(dim, rng);
    let d = DVector::from_fn(dim, |_, _| {
        10f64.powf(rng.gen_range(-half_range..half_range))
    });
    CosetRep::new(q1.matrix() * DMatrix::from_diagonal(&d) * q2.matrix().transpose())
        .expect("bounded-condition matrix is invertible")
}

fn sample_le_layer(m_in: usize, m_out: usize, rng: &mut ChaCha8Rng) -> FcLayerLe {
    let pairs: Vec<FcPairLe> = (0..m_out * (m_out + 1) / 2)
        .map(|_| FcPairLe {
            p: sample_spd_scaled(m_in, 0.5, rng),
            a: sample_spd_scaled(m_in, 0.5, rng),
        })
        .collect();
    FcLayerLe::new(m_in, m_out, &pairs).expect("well-formed layer")
}

fn sample_spd_scaled(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> SpdMatrix {
    sym_exp(&sample_sym(dim, scale, rng)).expect("exp of a bounded symmetric matrix")
}

fn sample_gi_layer(m_in: usize, m_out: usize, rng: &mut ChaCha8Rng) -> FcLayerGi {
    let axes: Vec<GiAxis> = (0..m_out)
        .map(|_| GiAxis {
            k: sample_orthogonal(m_in, rng),
            a: sample_weyl(m_in, rng),
            p: sample_spd_scaled(m_in, 0.5, rng),
        })
        .collect();
    let mut n = DMatrix::<f64>::identity(m_out, m_out);
    for i in 0..m_out {
        for j in (i + 1)..m_out {
            n[(i, j)] = rng.gen_range(-0.5..0.5);
        }
    }
    FcLayerGi::new(m_in, axes, n).expect("well-formed layer")
}

/// Query, key, and value layers plus `(c1_raw, c2)`; kept apart so checks
/// can hold on to a layer or vary the temperature while sharing the rest.
fn sample_attention_parts(
    gi: bool,
    m_in: usize,
    m_out: usize,
    rng: &mut ChaCha8Rng,
) -> (AttentionFc, AttentionFc, AttentionFc, f64, f64) {
    let layer = |rng: &mut ChaCha8Rng| {
        if gi {
            AttentionFc::Gi(sample_gi_layer(m_in, m_out, rng))
        } else {
            AttentionFc::Le(sample_le_layer(m_in, m_out, rng))
        }
    };
    let fc_q = layer(rng);
    let fc_k = layer(rng);
    let fc_v = layer(rng);
    let c1_raw = rng.gen_range(-1.0..1.0);
    let c2 = rng.gen_range(-0.5..0.5);
    (fc_q, fc_k, fc_v, c1_raw, c2)
}

fn sample_attention_block(
    gi: bool,
    m_in: usize,
    m_out: usize,
    rng: &mut ChaCha8Rng,
) -> AttentionBlock {
    let (fc_q, fc_k, fc_v, c1_raw, c2) = sample_attention_parts(gi, m_in, m_out, rng);
    AttentionBlock::new(fc_q, fc_k, fc_v, c1_raw, c2).expect("layers share variant and dimensions")
}

// ---------------------------------------------------------------------------
// Check definitions
// ---------------------------------------------------------------------------

type CheckFn = Box<dyn Fn(usize, &mut ChaCha8Rng) -> Result<f64, VerifyError> + Send + Sync>;

/// A named property: per-trial error against a fixed tolerance. `scale`
/// multiplies the requested trial count (criteria that demand more
/// evidence), `cap` bounds it (expensive brute-force oracles).
struct Check {
    name: &'static str,
    tolerance: f64,
    scale: usize,
    cap: Option<usize>,
    body: CheckFn,
}

impl Check {
    fn new<F>(name: &'static str, tolerance: f64, body: F) -> Self
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Result<f64, VerifyError> + Send + Sync + 'static,
    {
        Check {
            name,
            tolerance,
            scale: 1,
            cap: None,
            body: Box::new(body),
        }
    }

    fn times(mut self, scale: usize) -> Self {
        self.scale = scale;
        self
    }

    fn cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    fn execute(&self, seed: u64, trials: usize) -> CheckResult {
        let n = trials
            .saturating_mul(self.scale)
            .min(self.cap.unwrap_or(usize::MAX));
        let mut max_error = 0.0f64;
        for trial in 0..n {
            let mut rng = trial_rng(seed, self.name, trial as u64);
            let err = match (self.body)(trial, &mut rng) {
                Ok(e) if e.is_nan() => f64::INFINITY,
                Ok(e) => e,
                Err(_) => f64::INFINITY,
            };
            max_error = max_error.max(err);
        }
        CheckResult {
            name: self.name.to_string(),
            trials: n,
            max_error,
            tolerance: self.tolerance,
            passed: max_error <= self.tolerance,
        }
    }
}

/// Error-decay ratio with a floor: when both errors sit at rounding level
/// there is nothing to measure and the ratio counts as 0.
fn decay_ratio(err_t: f64, err_2t: f64) -> f64 {
    if err_t <= 1e-11 {
        if err_2t <= 1e-11 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        err_2t / err_t
    }
}

fn ball_dims(trial: usize) -> usize {
    [2, 3, 5][trial % 3]
}

fn ball_checks() -> Vec<Check> {
    vec![
        Check::new("ball_busemann_limit_t40", 1e-8, |trial, rng| {
            let m = ball_dims(trial);
            let xi = sample_boundary(m, rng);
            let x = sample_ball_point(m, rng);
            let oracle = busemann_limit_oracle_ball(&xi, &x, 40.0)?;
            Ok((busemann_ball(&xi, &x) - oracle).abs())
        }),
        Check::new("ball_busemann_ray", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let xi = sample_boundary(m, rng);
            let s: f64 = rng.gen_range(0.1..3.0);
            let on_ray = BallPoint::clamped(xi.direction() * (s / 2.0).tanh());
            Ok((busemann_ball(&xi, &on_ray) + s).abs())
        }),
        Check::new("ball_dist_artanh_acosh", 1e-10, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_ball_point(m, rng);
            let y = sample_ball_point(m, rng);
            let translated = mobius_add(&x.negated(), &y);
            let via_artanh = 2.0 * translated.norm().atanh();
            Ok((via_artanh - dist_ball(&x, &y)).abs())
        }),
        Check::new("ball_lorentz_isometry", 1e-9, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_ball_point(m, rng);
            let y = sample_ball_point(m, rng);
            let dl = lorentz_distance(&lorentz_from_ball(&x), &lorentz_from_ball(&y));
            Ok((dl - dist_ball(&x, &y)).abs())
        }),
        Check::new("ball_exp_log_round_trip", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_ball_point(m, rng);
            let back = exp_map_ball(&BallPoint::origin(m), &log0_ball(&x));
            let there = (back.coords() - x.coords()).norm();
            let v = sample_unit_vector(m, rng) * rng.gen_range(0.0..1.5);
            let image = exp_map_ball(&BallPoint::origin(m), &v);
            let again = (log0_ball(&image) - &v).norm();
            Ok(there.max(again))
        }),
        Check::new("ball_gyrotranslation_isometry", 1e-10, |trial, rng| {
            let m = ball_dims(trial);
            let z = sample_ball_point(m, rng);
            let x = sample_ball_point(m, rng);
            let y = sample_ball_point(m, rng);
            let before = dist_ball(&x, &y);
            let after = dist_ball(&mobius_add(&z, &x), &mobius_add(&z, &y));
            Ok((before - after).abs())
        }),
        Check::new("ball_h_distance_composition", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let xi = sample_boundary(m, rng);
            let a = rng.gen_range(0.1..2.0);
            let b = rng.gen_range(-1.0..1.0);
            let hp = HHoroplaneBall::new(xi.clone(), a, b)?;
            let x = sample_ball_point(m, rng);
            let composed = -a * busemann_ball(&xi, &x) - b;
            Ok((h_distance(&hp, &x) - composed).abs())
        }),
        Check::new("ball_b_distance_two_path", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let xi = sample_boundary(m, rng);
            let p = sample_ball_point(m, rng);
            let x = sample_ball_point(m, rng);
            let hp = BHyperplaneBall::new(xi.clone(), p.clone())?;
            let closed = b_distance_ball(&hp, &x);
            let z = mobius_add(&p.negated(), &x);
            if z.norm() <= 1e-9 {
                return Ok(closed.abs());
            }
            let pipeline = dist_ball(&x, &p) * busemann_ball(&xi, &z) / z.norm();
            Ok((closed - pipeline).abs())
        }),
        Check::new("ball_mlr_mirrored_uniform", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let p = sample_ball_point(m, rng);
            let a = sample_unit_vector(m, rng);
            let xi = sample_boundary(m, rng);
            let xi_opp = BallBoundary::from_vector(-xi.direction())?;
            let head = match trial % 3 {
                0 => MlrHeadBall::G(vec![
                    GHyperplaneBall::new(p.clone(), a.clone())?,
                    GHyperplaneBall::new(p.negated(), -a)?,
                ]),
                1 => MlrHeadBall::H(vec![
                    HHoroplaneBall::new(xi.clone(), 0.8, 0.25)?,
                    HHoroplaneBall::new(xi_opp.clone(), 0.8, 0.25)?,
                ]),
                _ => MlrHeadBall::B(vec![
                    BMlrClass {
                        hyperplane: BHyperplaneBall::new(xi.clone(), p.clone())?,
                        scale: 1.2,
                    },
                    BMlrClass {
                        hyperplane: BHyperplaneBall::new(xi_opp, p.negated())?,
                        scale: 1.2,
                    },
                ]),
            };
            let probs = mlr_ball(&head, &BallPoint::origin(m));
            let tied = (probs[0] - 0.5).abs();
            let sum = (probs.sum() - 1.0).abs();
            Ok(tied.max(sum))
        }),
        Check::new("ball_wrapped_normal_radius", 1e-10, |trial, rng| {
            let m = ball_dims(trial);
            let h = sample_ball_point(m, rng);
            let vt = DVector::from_fn(m, |_, _| 0.3 * rng.sample::<f64, _>(StandardNormal));
            let u = &vt * ((1.0 - h.coords().norm_squared()) / 2.0);
            let z = exp_map_ball(&h, &u);
            Ok((dist_ball(&h, &z) - vt.norm()).abs())
        }),
        Check::new("ball_g_distance_projection", 1e-3, |_, rng| {
            let p = BallPoint::clamped(sample_unit_vector(2, rng) * rng.gen_range(0.0..0.5));
            let a = sample_unit_vector(2, rng);
            let x = BallPoint::clamped(sample_unit_vector(2, rng) * rng.gen_range(0.0..0.8));
            let hp = GHyperplaneBall::new(p, a)?;
            let brute = projection_min_distance_oracle(&hp, &x)?;
            Ok((g_distance(&hp, &x).abs() - brute).abs())
        })
        .cap(20),
    ]
}

fn pem_checks() -> Vec<Check> {
    vec![
        Check::new("pem_busemann_limit_decay", 0.6, |trial, rng| {
            let m = ball_dims(trial);
            let a = sample_unit_sym(m, rng);
            let x = sample_spd(m, rng);
            let phi = PhiMap::log_euclidean();
            let closed = busemann_pem(&phi, &a, &x)?;
            let err_25 = (busemann_limit_oracle_pem(&phi, &a, &x, 25.0)? - closed).abs();
            let err_50 = (busemann_limit_oracle_pem(&phi, &a, &x, 50.0)? - closed).abs();
            Ok(decay_ratio(err_25, err_50))
        }),
        Check::new("pem_busemann_ray_exact", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let a = sample_unit_sym(m, rng);
            let s = rng.gen_range(0.1..2.0);
            let phi = PhiMap::log_euclidean();
            let x = phi.phi_inv(&SymMatrix::new(a.matrix() * s)?)?;
            let closed = busemann_pem(&phi, &a, &x)?;
            let oracle = busemann_limit_oracle_pem(&phi, &a, &x, 100.0)?;
            Ok((closed - oracle).abs().max((closed + s).abs()))
        }),
        Check::new("pem_dist_translation_identity", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let phi = if trial % 2 == 0 {
                PhiMap::log_euclidean()
            } else {
                PhiMap::power(0.5)?
            };
            let x = sample_spd_scaled(m, 0.4, rng);
            let y = sample_spd_scaled(m, 0.4, rng);
            let translated = pem_oplus(&phi, &pem_ominus(&phi, &x)?, &y)?;
            Ok((pem_norm(&phi, &translated)? - pem_dist(&phi, &x, &y)?).abs())
        }),
        Check::new("pem_b_distance_two_path_log", 1e-12, |trial, rng| {
            pem_two_path_error(&PhiMap::log_euclidean(), ball_dims(trial), rng)
        })
        .times(2),
        Check::new("pem_b_distance_two_path_power", 1e-12, |trial, rng| {
            pem_two_path_error(&PhiMap::power(0.5)?, ball_dims(trial), rng)
        })
        .times(2),
        Check::new("pem_fc_round_trip", 1e-10, |_, rng| {
            let m_in = rng.gen_range(2..=5);
            let m_out = rng.gen_range(2..=5);
            let layer = sample_le_layer(m_in, m_out, rng);
            let x = sample_spd_scaled(m_in, 0.5, rng);
            let v = layer.hyperplane_values(&x)?;
            let y = fc_layer_le_forward(&layer, &x)?;
            let log_y = spd_log(&y)?;
            let mut worst = 0.0f64;
            let mut idx = 0;
            for l in 0..m_out {
                for j in l..m_out {
                    let got = if l == j {
                        log_y.matrix()[(l, l)]
                    } else {
                        2.0_f64.sqrt() * log_y.matrix()[(l, j)]
                    };
                    worst = worst.max((got - v[idx]).abs());
                    idx += 1;
                }
            }
            Ok(worst)
        }),
        Check::new("pem_wfm_variational", 0.0, |trial, rng| {
            let m = ball_dims(trial);
            let n = rng.gen_range(2..=4);
            let points: Vec<SpdMatrix> = (0..n).map(|_| sample_spd_scaled(m, 0.6, rng)).collect();
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let mean = wfm_le(&points, &weights)?;
            let phi = PhiMap::log_euclidean();
            let objective = |y: &SpdMatrix| -> Result<f64, VerifyError> {
                let mut total = 0.0;
                for (p, w) in points.iter().zip(&weights) {
                    let d = pem_dist(&phi, y, p)?;
                    total += w * d * d;
                }
                Ok(total)
            };
            let at_mean = objective(&mean)?;
            let mut worst = 0.0f64;
            for _ in 0..4 {
                let dir = sample_sym(m, 0.02, rng);
                let nearby = le_exp_map(&mean, &dir)?;
                // The mean minimizes the weighted squared-distance sum; any
                // perturbation must not beat it (up to rounding, hence the
                // tiny slack folded into the error).
                worst = worst.max(at_mean - objective(&nearby)? - 1e-13);
            }
            Ok(worst.max(0.0))
        }),
        Check::new("pem_power_theta_limit", 1e-5, |trial, rng| {
            let m = ball_dims(trial);
            let x = sym_exp(&sample_sym(m, 0.3, rng))?;
            let p = sym_exp(&sample_sym(m, 0.3, rng))?;
            let a = sample_unit_sym(m, rng);
            let hp_log = PemHyperplane::new(a.clone(), p.clone())?;
            let log_value = b_distance_pem(&PhiMap::log_euclidean(), &hp_log, &x)?;
            let near_log = PhiMap::power(1e-6)?;
            let power_value = b_distance_pem(&near_log, &PemHyperplane::new(a, p)?, &x)?;
            Ok((log_value - power_value).abs())
        }),
        Check::new("pem_riemannian_round_trip", 1e-10, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_spd_scaled(m, 0.5, rng);
            let y = sample_spd_scaled(m, 0.5, rng);
            let u = sample_sym(m, 0.5, rng);
            let v = sample_sym(m, 0.5, rng);
            let back = le_log_map(&x, &le_exp_map(&x, &u)?)?;
            let round = (back.matrix() - u.matrix()).norm();
            let tu = le_transport(&x, &y, &u)?;
            let tv = le_transport(&x, &y, &v)?;
            let preserved = (le_inner(&y, &tu, &tv)? - le_inner(&x, &u, &v)?).abs();
            Ok(round.max(preserved))
        }),
    ]
}

fn pem_two_path_error(phi: &PhiMap, m: usize, rng: &mut ChaCha8Rng) -> Result<f64, VerifyError> {
    let x = sample_spd_scaled(m, 0.3, rng);
    let p = sample_spd_scaled(m, 0.3, rng);
    let a = sample_unit_sym(m, rng);
    let hp = PemHyperplane::new(a.clone(), p.clone())?;
    let closed = b_distance_pem(phi, &hp, &x)?;
    // Definition pipeline: distance times the Busemann value of the
    // translated point, normalized by its norm.
    let translated = pem_oplus(phi, &pem_ominus(phi, &p)?, &x)?;
    let norm = pem_norm(phi, &translated)?;
    if norm <= 1e-12 {
        return Ok(closed.abs());
    }
    let pipeline = pem_dist(phi, &x, &p)? * busemann_pem(phi, &a, &translated)? / norm;
    Ok((closed - pipeline).abs())
}

fn gi_checks() -> Vec<Check> {
    vec![
        Check::new("gi_busemann_limit_decay", 0.6, |trial, rng| {
            let m = ball_dims(trial);
            let a = sample_weyl_sorted(m, rng);
            let k = sample_orthogonal(m, rng);
            let x = sample_spd(m, rng);
            let closed = busemann_gi(&k, &a, &x)?;
            let err_25 = (busemann_limit_oracle_gi(&k, &a, &x, 25.0)? - closed).abs();
            let err_50 = (busemann_limit_oracle_gi(&k, &a, &x, 50.0)? - closed).abs();
            Ok(decay_ratio(err_25, err_50))
        }),
        Check::new("gi_busemann_ray_exact", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let a = sample_weyl(m, rng);
            let s = rng.gen_range(0.1..2.0);
            let x = SpdMatrix::from_positive_unchecked(DMatrix::from_diagonal(&DVector::from_fn(
                m,
                |i, _| (2.0 * s * a.vector()[i]).exp(),
            )));
            let k = OrthogonalMatrix::identity(m);
            let closed = busemann_gi(&k, &a, &x)?;
            let oracle = busemann_limit_oracle_gi(&k, &a, &x, 1e6)?;
            Ok((closed - oracle).abs().max((closed + s).abs()))
        }),
        Check::new("gi_inner_translate_norm", 1e-10, |trial, rng| {
            let m = 2 + trial % 5;
            let x = sample_spd(m, rng);
            let y = sample_spd(m, rng);
            let translated = gi_oplus(&gi_ominus(&x)?, &y)?;
            let inv_sqrt = spd_inv_sqrt(&x)?;
            let conj = SpdMatrix::from_positive_unchecked(
                inv_sqrt.matrix() * y.matrix() * inv_sqrt.matrix(),
            );
            let half_ai = 0.5 * spd_log(&conj)?.frobenius_norm();
            Ok((gi_norm(&translated)? - half_ai).abs())
        })
        .times(2),
        Check::new("gi_inner_k_invariance", 1e-10, |trial, rng| {
            let m = 2 + trial % 5;
            let x = sample_spd(m, rng);
            let y = sample_spd(m, rng);
            let k = sample_orthogonal(m, rng);
            let kx = SpdMatrix::from_positive_unchecked(
                k.matrix() * x.matrix() * k.matrix().transpose(),
            );
            let ky = SpdMatrix::from_positive_unchecked(
                k.matrix() * y.matrix() * k.matrix().transpose(),
            );
            Ok((gi_inner(&x, &y)? - gi_inner(&kx, &ky)?).abs())
        })
        .times(2),
        Check::new("gi_b_distance_two_path", 1e-8, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_spd(m, rng);
            let p = sample_spd(m, rng);
            let a = sample_weyl(m, rng);
            let k = sample_orthogonal(m, rng);
            let hp = GiHyperplane::new(k.clone(), a.clone(), p.clone())?;
            let closed = b_distance_gi(&hp, &x)?;
            let translated = gi_oplus(&gi_ominus(&p)?, &x)?;
            let norm = gi_norm(&translated)?;
            if norm <= 1e-12 {
                return Ok(closed.abs());
            }
            let pipeline = gi_dist(&x, &p)? * busemann_gi(&k, &a, &translated)? / norm;
            Ok((closed - pipeline).abs())
        })
        .times(2),
        Check::new("gi_iwasawa_cholesky_vs_qr", 1e-10, |trial, rng| {
            let m = 2 + trial % 5;
            let g = sample_cond_bounded(m, 2.0, rng);
            let chol = iwasawa_h(&g)?;
            let qr = iwasawa_qr_oracle(&g)?;
            Ok((chol.h - qr.h).amax())
        })
        .times(5),
        Check::new("gi_angular_orthonormal", 1e-12, |trial, rng| {
            let m = ball_dims(trial);
            let i = rng.gen_range(0..m);
            let mut j = rng.gen_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let ei = WeylDirection::axis(m, i);
            let ej = WeylDirection::axis(m, j);
            let opposite = WeylDirection::unit(-ei.vector().clone())?;
            let mut worst = 0.0f64;
            for &t in &[1.0, 10.0, 1e3] {
                worst = worst.max((angular_metric_estimate(&ei, &ej, t) - 2.0f64.sqrt()).abs());
                worst = worst.max((angular_metric_estimate(&ei, &opposite, t) - 2.0).abs());
                worst = worst.max(angular_metric_estimate(&ei, &ei, t).abs());
            }
            Ok(worst)
        }),
        Check::new("gi_fc_round_trip", 1e-8, |_, rng| {
            let m_in = rng.gen_range(2..=5);
            let m_out = rng.gen_range(2..=5);
            let layer = sample_gi_layer(m_in, m_out, rng);
            let x = sample_spd_scaled(m_in, 0.5, rng);
            let v = layer.hyperplane_values(&x)?;
            let y = fc_layer_gi_forward(&layer, &x)?;
            let mut worst = 0.0f64;
            for (j, &vj) in v.iter().enumerate() {
                let probe = GiHyperplane::axis_aligned(
                    WeylDirection::axis(m_out, j),
                    SpdMatrix::identity(m_out),
                )?;
                worst = worst.max((b_distance_gi(&probe, &y)? - vj).abs());
            }
            Ok(worst)
        }),
        Check::new("gi_dist_symmetry", 1e-10, |trial, rng| {
            let m = ball_dims(trial);
            let x = sample_spd(m, rng);
            let y = sample_spd(m, rng);
            let forward = gi_dist(&x, &y)?;
            let backward = gi_dist(&y, &x)?;
            let mu = cartan_mu(&coset_rep(&x)?)?;
            let from_identity = (gi_dist(&SpdMatrix::identity(m), &x)? - mu.norm()).abs();
            Ok((forward - backward).abs().max(from_identity))
        }),
    ]
}

fn attention_checks() -> Vec<Check> {
    vec![
        Check::new("attn_perm_equivariance_le", 1e-10, |_, rng| {
            attention_permutation_error(false, rng)
        }),
        Check::new("attn_perm_equivariance_gi", 1e-10, |_, rng| {
            attention_permutation_error(true, rng)
        }),
        Check::new("attn_weight_simplex_le", 1e-12, |_, rng| {
            attention_simplex_error(false, rng)
        }),
        Check::new("attn_weight_simplex_gi", 1e-12, |_, rng| {
            attention_simplex_error(true, rng)
        }),
        Check::new("attn_identical_tokens", 1e-10, |trial, rng| {
            let gi = trial % 2 == 1;
            let m = rng.gen_range(2..=3);
            let block = sample_attention_block(gi, m, m, rng);
            let x = sample_spd_scaled(m, 0.5, rng);
            let seq = vec![x.clone(), x.clone(), x];
            let out = attention_forward(&block, &seq)?;
            let mut worst = 0.0f64;
            for y in &out[1..] {
                worst = worst.max((y.matrix() - out[0].matrix()).norm());
            }
            Ok(worst)
        }),
        Check::new("attn_single_token", 1e-10, |trial, rng| {
            let gi = trial % 2 == 1;
            let m = rng.gen_range(2..=3);
            let (fc_q, fc_k, fc_v, c1_raw, c2) = sample_attention_parts(gi, m, m, rng);
            let value_layer = fc_v.clone();
            let block = AttentionBlock::new(fc_q, fc_k, fc_v, c1_raw, c2)?;
            let x = sample_spd_scaled(m, 0.5, rng);
            // A single token can only attend to itself: weight 1, output
            // exactly the value projection.
            let weights = attention_weights(&block, std::slice::from_ref(&x))?;
            let weight_err = (weights[0][0] - 1.0).abs();
            let out = attention_forward(&block, std::slice::from_ref(&x))?;
            let expected = value_layer.forward(&x)?;
            Ok(weight_err.max((out[0].matrix() - expected.matrix()).norm()))
        }),
        Check::new("attn_argmax_temperature", 0.0, |trial, rng| {
            let gi = trial % 2 == 1;
            let m = rng.gen_range(2..=3);
            let (fc_q, fc_k, fc_v, c1_raw, c2) = sample_attention_parts(gi, m, m, rng);
            let cold_block =
                AttentionBlock::new(fc_q.clone(), fc_k.clone(), fc_v.clone(), c1_raw, c2)?;
            // Raising the temperature parameter sharpens every row but must
            // not move any row's argmax: scores are monotone in distance.
            let hot_block = AttentionBlock::new(fc_q, fc_k, fc_v, c1_raw + 2.0, c2)?;
            let seq: Vec<SpdMatrix> = (0..4).map(|_| sample_spd_scaled(m, 0.6, rng)).collect();
            let cold = attention_weights(&cold_block, &seq)?;
            let hot = attention_weights(&hot_block, &seq)?;
            let argmax = |row: &[f64]| {
                row.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(i, _)| i)
                    .unwrap()
            };
            let mut mismatches = 0.0;
            for (rc, rh) in cold.iter().zip(&hot) {
                if argmax(rc) != argmax(rh) {
                    mismatches = 1.0;
                }
            }
            Ok(mismatches)
        }),
    ]
}

fn attention_permutation_error(gi: bool, rng: &mut ChaCha8Rng) -> Result<f64, VerifyError> {
    let m = rng.gen_range(2..=4);
    let len = rng.gen_range(2..=6);
    let block = sample_attention_block(gi, m, m.min(3), rng);
    let seq: Vec<SpdMatrix> = (0..len).map(|_| sample_spd_scaled(m, 0.6, rng)).collect();
    let out = attention_forward(&block, &seq)?;
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let permuted: Vec<SpdMatrix> = perm.iter().map(|&i| seq[i].clone()).collect();
    let out_permuted = attention_forward(&block, &permuted)?;
    let mut worst = 0.0f64;
    for (slot, &i) in perm.iter().enumerate() {
        worst = worst.max((out_permuted[slot].matrix() - out[i].matrix()).norm());
    }
    Ok(worst)
}

fn attention_simplex_error(gi: bool, rng: &mut ChaCha8Rng) -> Result<f64, VerifyError> {
    let m = rng.gen_range(2..=4);
    let len = rng.gen_range(2..=6);
    let block = sample_attention_block(gi, m, m.min(3), rng);
    let seq: Vec<SpdMatrix> = (0..len).map(|_| sample_spd_scaled(m, 0.6, rng)).collect();
    let weights = attention_weights(&block, &seq)?;
    let mut worst = 0.0f64;
    for row in &weights {
        let sum: f64 = row.iter().sum();
        worst = worst.max((sum - 1.0).abs());
        if !row.iter().all(|&w| w > 0.0) {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

fn suite_checks(name: &str) -> Result<Vec<Check>, VerifyError> {
    match name {
        "poincare" => Ok(ball_checks()),
        "pem" => Ok(pem_checks()),
        "gi" => Ok(gi_checks()),
        "attention" => Ok(attention_checks()),
        "all" => {
            let mut checks = ball_checks();
            checks.extend(pem_checks());
            checks.extend(gi_checks());
            checks.extend(attention_checks());
            Ok(checks)
        }
        _ => Err(VerifyError::UnknownSuite {
            name: name.to_string(),
        }),
    }
}

/// Runs a named suite (`poincare`, `pem`, `gi`, `attention`, or `all`)
/// with `trials` base trials per check (individual checks scale or cap
/// this; `trials = 0` runs nothing and passes vacuously) across at most
/// `threads` worker threads. Failed checks are recorded, never raised.
pub fn run_suite(
    name: &str,
    seed: u64,
    trials: usize,
    threads: usize,
) -> Result<PropertyReport, VerifyError> {
    let start = Instant::now();
    let clamps_before = clamp_event_count();
    let checks = suite_checks(name)?;
    let results = if trials == 0 {
        Vec::new()
    } else {
        run_checks(&checks, seed, trials, threads.max(1))
    };
    Ok(PropertyReport {
        suite: name.to_string(),
        seed,
        elapsed_ms: u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX),
        clamp_events: clamp_event_count().saturating_sub(clamps_before),
        checks: results,
    })
}

fn run_checks(checks: &[Check], seed: u64, trials: usize, threads: usize) -> Vec<CheckResult> {
    if threads <= 1 || checks.len() <= 1 {
        return checks.iter().map(|c| c.execute(seed, trials)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<CheckResult>>> = checks.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(checks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= checks.len() {
                    break;
                }
                let result = checks[i].execute(seed, trials);
                *slots[i].lock().expect("no poisoned check slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("no poisoned check slot")
                .expect("every check index was claimed")
        })
        .collect()
}
