//! Poincaré-ball geometry: Möbius operations, the hyperbolic distance,
//! Busemann functions, three flavors of signed point-to-hyperplane distance,
//! multinomial-regression heads built from them, wrapped-normal sampling, and
//! the Lorentz-model bridge used for cross-checking.
//!
//! The ball `𝔹_m = { x ∈ ℝ^m : ‖x‖ < 1 }` carries the metric of constant
//! curvature −1 (conformal factor `2/(1−‖x‖²)`; no curvature parameter is
//! exposed). Three hyperplane notions coexist:
//!
//! * **g**: the geodesic hyperplane through `p` with normal `a`, with the
//!   arcsinh-based signed distance;
//! * **h**: a horosphere-offset ("horoplane") determined by an ideal point
//!   `ξ`, a scale `a > 0`, and an offset `b`;
//! * **b**: the Busemann-based hyperplane through `p` toward `ξ`, whose
//!   signed distance is `d(x,p)·B_ξ(⊖p⊕x)/‖⊖p⊕x‖`.
//!
//! All three distances are **signed**; wrappers restore the absolute value
//! (and, for h, the `1/a` normalization) where a metric distance is wanted.
//! Sign carries the side of the hyperplane, which the classification heads
//! need.
//!
//! Points are clamped to norm `1 − 1e-5` when operations push them toward
//! the boundary (the conformal factor blows up there); every clamp bumps a
//! process-wide counter surfaced in verification reports.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Largest norm a [`BallPoint`] may have; operations clamp to this radius.
pub const BALL_MAX_NORM: f64 = 1.0 - 1e-5;

/// `‖z−ξ‖²` is floored at this value before logarithms, so Busemann-type
/// expressions stay finite when a point collides with its ideal point.
const LOG_FLOOR: f64 = 1e-30;

/// Points with Möbius-translate norm at or below this threshold are treated
/// as lying *on* a b-hyperplane (signed distance exactly zero).
const B_DISTANCE_ZERO_RADIUS: f64 = 1e-9;

static CLAMP_EVENTS: AtomicU64 = AtomicU64::new(0);

/// Number of boundary clamps since process start (or the last reset).
pub fn clamp_event_count() -> u64 {
    CLAMP_EVENTS.load(Ordering::Relaxed)
}

/// Resets the boundary-clamp counter; verification suites call this at the
/// start of a run so reports carry per-run counts.
pub fn reset_clamp_event_count() {
    CLAMP_EVENTS.store(0, Ordering::Relaxed);
}

/// Errors for ball-geometry constructors and operations.
#[derive(Debug, Error)]
pub enum BallError {
    /// Point norm exceeds the clamp radius and rejection was requested.
    #[error("point norm {norm} exceeds the ball bound {max}")]
    OutsideBall { norm: f64, max: f64 },
    /// Input contains NaN or infinity.
    #[error("input contains a non-finite entry")]
    NonFinite,
    /// A boundary direction is not unit length.
    #[error("boundary direction norm {norm} is not 1 within {tolerance}")]
    NotUnit { norm: f64, tolerance: f64 },
    /// Vectors of different dimensions were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// A strictly positive scalar was required.
    #[error("expected a positive value, got {value}")]
    NonPositive { value: f64 },
    /// A nonzero vector was required.
    #[error("expected a nonzero vector")]
    ZeroVector,
    /// Lorentz coordinates do not satisfy the hyperboloid constraint.
    #[error("hyperboloid constraint violated by {defect:.3e} (tolerance {tolerance:.0e})")]
    LorentzConstraint { defect: f64, tolerance: f64 },
    /// Lorentz time coordinate must be positive.
    #[error("lorentz time coordinate must be positive, got {value}")]
    LorentzTimeCoordinate { value: f64 },
    /// A classification head needs at least two classes.
    #[error("multinomial head needs at least 2 classes, got {count}")]
    TooFewClasses { count: usize },
}

/// A point of the open unit ball, kept at norm ≤ [`BALL_MAX_NORM`].
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: DVector<f64>,
}

impl BallPoint {
    /// Builds a point, rejecting coordinates outside the clamp radius.
    pub fn new(coords: DVector<f64>) -> Result<Self, BallError> {
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(BallError::NonFinite);
        }
        let norm = coords.norm();
        if norm > BALL_MAX_NORM {
            return Err(BallError::OutsideBall {
                norm,
                max: BALL_MAX_NORM,
            });
        }
        Ok(BallPoint { coords })
    }

    /// Builds a point, scaling back to norm [`BALL_MAX_NORM`] if the input
    /// lies outside. An actual clamp increments the process-wide counter.
    pub fn clamped(coords: DVector<f64>) -> Self {
        debug_assert!(coords.iter().all(|v| v.is_finite()));
        let norm = coords.norm();
        if norm > BALL_MAX_NORM {
            CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed);
            BallPoint {
                coords: coords * (BALL_MAX_NORM / norm),
            }
        } else {
            BallPoint { coords }
        }
    }

    /// The origin of the ball.
    pub fn origin(dim: usize) -> Self {
        BallPoint {
            coords: DVector::zeros(dim),
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// The Möbius inverse `⊖x = −x`.
    pub fn negated(&self) -> Self {
        BallPoint {
            coords: -&self.coords,
        }
    }
}

/// An ideal point: a unit direction on the boundary sphere at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct BallBoundary {
    direction: DVector<f64>,
}

impl BallBoundary {
    /// Unit-norm tolerance enforced at construction.
    pub const TOLERANCE: f64 = 1e-12;

    /// Wraps a direction already normalized to unit length.
    pub fn new(direction: DVector<f64>) -> Result<Self, BallError> {
        if direction.iter().any(|v| !v.is_finite()) {
            return Err(BallError::NonFinite);
        }
        let norm = direction.norm();
        if (norm - 1.0).abs() > Self::TOLERANCE {
            return Err(BallError::NotUnit {
                norm,
                tolerance: Self::TOLERANCE,
            });
        }
        Ok(BallBoundary { direction })
    }

    /// Normalizes an arbitrary nonzero vector onto the boundary sphere.
    pub fn from_vector(v: DVector<f64>) -> Result<Self, BallError> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(BallError::NonFinite);
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(BallError::ZeroVector);
        }
        Ok(BallBoundary {
            direction: v / norm,
        })
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }
}

/// Geodesic hyperplane through `p` with normal `a ∈ T_p𝔹` (g-flavor).
#[derive(Clone, Debug)]
pub struct GHyperplaneBall {
    pub p: BallPoint,
    a: DVector<f64>,
}

impl GHyperplaneBall {
    pub fn new(p: BallPoint, a: DVector<f64>) -> Result<Self, BallError> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(BallError::NonFinite);
        }
        if a.len() != p.dim() {
            return Err(BallError::DimensionMismatch {
                left: p.dim(),
                right: a.len(),
            });
        }
        if a.norm() == 0.0 {
            return Err(BallError::ZeroVector);
        }
        Ok(GHyperplaneBall { p, a })
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.a
    }
}

/// Horosphere offset ("horoplane") toward `ξ` with scale `a > 0` and
/// offset `b` (h-flavor).
#[derive(Clone, Debug)]
pub struct HHoroplaneBall {
    pub xi: BallBoundary,
    a: f64,
    pub b: f64,
}

impl HHoroplaneBall {
    pub fn new(xi: BallBoundary, a: f64, b: f64) -> Result<Self, BallError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(BallError::NonFinite);
        }
        if a <= 0.0 {
            return Err(BallError::NonPositive { value: a });
        }
        Ok(HHoroplaneBall { xi, a, b })
    }

    pub fn scale(&self) -> f64 {
        self.a
    }
}

/// Busemann hyperplane through `p` toward the ideal point `ξ` (b-flavor).
#[derive(Clone, Debug)]
pub struct BHyperplaneBall {
    pub xi: BallBoundary,
    pub p: BallPoint,
}

impl BHyperplaneBall {
    pub fn new(xi: BallBoundary, p: BallPoint) -> Result<Self, BallError> {
        if xi.dim() != p.dim() {
            return Err(BallError::DimensionMismatch {
                left: xi.dim(),
                right: p.dim(),
            });
        }
        Ok(BHyperplaneBall { xi, p })
    }
}

/// One class of a b-flavor regression head: a hyperplane plus a learnable
/// logit scale.
#[derive(Clone, Debug)]
pub struct BMlrClass {
    pub hyperplane: BHyperplaneBall,
    pub scale: f64,
}

/// Multinomial-regression head on the ball. Each variant carries one
/// hyperplane bundle per class; logits are the corresponding signed
/// distances (see [`mlr_logits_ball`]).
#[derive(Clone, Debug)]
pub enum MlrHeadBall {
    /// Geodesic-hyperplane head; the logit carries the conformal margin
    /// factor `2‖a_l‖/(1−‖p_l‖²)`.
    G(Vec<GHyperplaneBall>),
    /// Horoplane head; the logit is the signed h-distance itself (the
    /// scale `a_l` lives inside the horoplane).
    H(Vec<HHoroplaneBall>),
    /// Busemann-hyperplane head; the logit is `s_l` times the signed
    /// b-distance.
    B(Vec<BMlrClass>),
}

impl MlrHeadBall {
    /// Validates class count (≥ 2) and uniform dimension.
    pub fn validate(&self) -> Result<(), BallError> {
        let dims: Vec<usize> = match self {
            MlrHeadBall::G(cs) => cs.iter().map(|c| c.p.dim()).collect(),
            MlrHeadBall::H(cs) => cs.iter().map(|c| c.xi.dim()).collect(),
            MlrHeadBall::B(cs) => cs.iter().map(|c| c.hyperplane.p.dim()).collect(),
        };
        if dims.len() < 2 {
            return Err(BallError::TooFewClasses { count: dims.len() });
        }
        for &d in &dims[1..] {
            if d != dims[0] {
                return Err(BallError::DimensionMismatch {
                    left: dims[0],
                    right: d,
                });
            }
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        match self {
            MlrHeadBall::G(cs) => cs.len(),
            MlrHeadBall::H(cs) => cs.len(),
            MlrHeadBall::B(cs) => cs.len(),
        }
    }
}

/// Point on the hyperboloid `−x₀² + Σᵢ xᵢ² = −1`, `x₀ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzPoint {
    coords: DVector<f64>,
}

impl LorentzPoint {
    /// Hyperboloid-constraint tolerance enforced at construction.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(coords: DVector<f64>) -> Result<Self, BallError> {
        if coords.iter().any(|v| !v.is_finite()) || coords.len() < 2 {
            return Err(BallError::NonFinite);
        }
        if coords[0] <= 0.0 {
            return Err(BallError::LorentzTimeCoordinate { value: coords[0] });
        }
        let spatial: f64 = coords.rows(1, coords.len() - 1).norm_squared();
        let defect = (-coords[0] * coords[0] + spatial + 1.0).abs();
        if defect > Self::TOLERANCE {
            return Err(BallError::LorentzConstraint {
                defect,
                tolerance: Self::TOLERANCE,
            });
        }
        Ok(LorentzPoint { coords })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Ambient dimension of the underlying hyperbolic space (one less than
    /// the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

fn assert_same_dim(left: usize, right: usize) {
    assert!(
        left == right,
        "dimension mismatch: {left} vs {right}; construct operands of equal dimension"
    );
}

/// Möbius addition `x ⊕ y`.
///
/// The result is clamped back to norm [`BALL_MAX_NORM`] if rounding pushes
/// it outside (counted as a clamp event). The origin is the identity and
/// `⊖x = −x` the inverse; the operation is neither commutative nor
/// associative in general.
///
/// # Panics
/// If the operands have different dimensions.
pub fn mobius_add(x: &BallPoint, y: &BallPoint) -> BallPoint {
    assert_same_dim(x.dim(), y.dim());
    let xy = x.coords.dot(&y.coords);
    let nx2 = x.coords.norm_squared();
    let ny2 = y.coords.norm_squared();
    let denom = 1.0 + 2.0 * xy + nx2 * ny2;
    let num = &x.coords * (1.0 + 2.0 * xy + ny2) + &y.coords * (1.0 - nx2);
    BallPoint::clamped(num / denom)
}

/// Hyperbolic distance `acosh(1 + 2‖x−y‖²/((1−‖x‖²)(1−‖y‖²)))`.
///
/// # Panics
/// If the operands have different dimensions.
pub fn dist_ball(x: &BallPoint, y: &BallPoint) -> f64 {
    assert_same_dim(x.dim(), y.dim());
    let diff2 = (&x.coords - &y.coords).norm_squared();
    let denom = (1.0 - x.coords.norm_squared()) * (1.0 - y.coords.norm_squared());
    let arg = 1.0 + 2.0 * diff2 / denom;
    arg.max(1.0).acosh()
}

/// Exponential map at `h`: `h ⊕ tanh(‖u‖/(1−‖h‖²))·u/‖u‖`, with
/// `exp_h(0) = h`. The image of `u` lies at distance `2‖u‖/(1−‖h‖²)`.
///
/// # Panics
/// If `u` has a different dimension than `h`.
pub fn exp_map_ball(h: &BallPoint, u: &DVector<f64>) -> BallPoint {
    assert_same_dim(h.dim(), u.len());
    let nu = u.norm();
    if nu == 0.0 {
        return h.clone();
    }
    let factor = (nu / (1.0 - h.coords.norm_squared())).tanh();
    let step = BallPoint::clamped(u * (factor / nu));
    mobius_add(h, &step)
}

/// Logarithmic map at the origin: `artanh(‖x‖)·x/‖x‖` (zero at the origin).
pub fn log0_ball(x: &BallPoint) -> DVector<f64> {
    let n = x.norm();
    if n == 0.0 {
        return DVector::zeros(x.dim());
    }
    &x.coords * (n.atanh() / n)
}

/// Busemann function of the ray toward `ξ` through the origin:
/// `B_ξ(x) = log(‖x−ξ‖² / (1−‖x‖²))`, normalized so `B_ξ(0) = 0`.
///
/// Equals `lim_{t→∞} d(x, δ(t)) − t` along `δ(t) = tanh(t/2)·ξ`.
///
/// # Panics
/// If dimensions differ.
pub fn busemann_ball(xi: &BallBoundary, x: &BallPoint) -> f64 {
    assert_same_dim(xi.dim(), x.dim());
    let d2 = (&x.coords - &xi.direction).norm_squared().max(LOG_FLOOR);
    (d2 / (1.0 - x.coords.norm_squared())).ln()
}

/// Signed geodesic-hyperplane distance
/// `asinh(2⟨⊖p⊕x, a⟩ / ((1−‖⊖p⊕x‖²)·‖a‖))`.
///
/// The sign is the side of the hyperplane `a` points away from; negating
/// `a` flips it. [`g_distance_metric`] restores the absolute value.
///
/// # Panics
/// If dimensions differ.
pub fn g_distance(hp: &GHyperplaneBall, x: &BallPoint) -> f64 {
    assert_same_dim(hp.p.dim(), x.dim());
    let z = mobius_add(&hp.p.negated(), x);
    let arg = 2.0 * z.coords.dot(&hp.a) / ((1.0 - z.coords.norm_squared()) * hp.a.norm());
    arg.asinh()
}

/// Metric (unsigned) variant of [`g_distance`].
pub fn g_distance_metric(hp: &GHyperplaneBall, x: &BallPoint) -> f64 {
    g_distance(hp, x).abs()
}

/// Signed horoplane distance `a·log((1−‖x‖²)/‖x−ξ‖²) − b`, i.e.
/// `−a·B_ξ(x) − b`.
///
/// The scale `a` and the offset `b` stay inside the value so it can serve
/// directly as a classification logit. [`h_distance_metric`] restores the
/// metric normalization `|·|/a`.
///
/// # Panics
/// If dimensions differ.
pub fn h_distance(hp: &HHoroplaneBall, x: &BallPoint) -> f64 {
    assert_same_dim(hp.xi.dim(), x.dim());
    let d2 = (&x.coords - &hp.xi.direction).norm_squared().max(LOG_FLOOR);
    hp.a * ((1.0 - x.coords.norm_squared()).ln() - d2.ln()) - hp.b
}

/// Metric (unsigned, scale-normalized) variant of [`h_distance`].
pub fn h_distance_metric(hp: &HHoroplaneBall, x: &BallPoint) -> f64 {
    h_distance(hp, x).abs() / hp.a
}

/// Signed Busemann-hyperplane distance
/// `−(d(x,p)/‖z‖)·log((1−‖z‖²)/‖z−ξ‖²)` with `z = ⊖p⊕x`.
///
/// Exactly zero when `‖z‖ ≤ 1e-9` (the point sits on the hyperplane; the
/// ratio `d(x,p)/‖z‖` is otherwise removable but numerically indeterminate
/// there).
///
/// # Panics
/// If dimensions differ.
pub fn b_distance_ball(hp: &BHyperplaneBall, x: &BallPoint) -> f64 {
    assert_same_dim(hp.p.dim(), x.dim());
    let z = mobius_add(&hp.p.negated(), x);
    let nz = z.norm();
    if nz <= B_DISTANCE_ZERO_RADIUS {
        return 0.0;
    }
    let d = dist_ball(x, &hp.p);
    let d2 = (&z.coords - &hp.xi.direction).norm_squared().max(LOG_FLOOR);
    -(d / nz) * ((1.0 - z.coords.norm_squared()).ln() - d2.ln())
}

/// Per-class logits of a regression head at `x`.
///
/// * g-head: `(2/(1−‖p_l‖²))·‖a_l‖·asinh(2⟨⊖p_l⊕x, a_l⟩/((1−‖⊖p_l⊕x‖²)‖a_l‖))`
/// * h-head: the signed [`h_distance`]
/// * b-head: `s_l ·` the signed [`b_distance_ball`]
///
/// # Panics
/// If dimensions differ between head parameters and `x`.
pub fn mlr_logits_ball(head: &MlrHeadBall, x: &BallPoint) -> DVector<f64> {
    match head {
        MlrHeadBall::G(classes) => DVector::from_iterator(
            classes.len(),
            classes.iter().map(|hp| {
                let lam = 2.0 / (1.0 - hp.p.coords.norm_squared());
                lam * hp.a.norm() * g_distance(hp, x)
            }),
        ),
        MlrHeadBall::H(classes) => {
            DVector::from_iterator(classes.len(), classes.iter().map(|hp| h_distance(hp, x)))
        }
        MlrHeadBall::B(classes) => DVector::from_iterator(
            classes.len(),
            classes
                .iter()
                .map(|c| c.scale * b_distance_ball(&c.hyperplane, x)),
        ),
    }
}

/// Class probabilities: softmax of [`mlr_logits_ball`]. Sums to 1 within
/// 1e-12.
pub fn mlr_ball(head: &MlrHeadBall, x: &BallPoint) -> DVector<f64> {
    softmax(&mlr_logits_ball(head, x))
}

/// Numerically stable softmax (max-subtracted).
pub(crate) fn softmax(logits: &DVector<f64>) -> DVector<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut exps: DVector<f64> = logits.map(|l| (l - max).exp());
    let sum = exps.sum();
    exps /= sum;
    exps
}

/// Wrapped-normal sample around `h`.
///
/// Draws `ṽ ~ N(0, diag σ²)` in the tangent space at the origin, halves it
/// (`v = ṽ/2`), rescales into the tangent space at `h`
/// (`u = (1−‖h‖²)·v`), and maps through [`exp_map_ball`]. The hyperbolic
/// displacement `d(h, z)` equals `‖ṽ‖` by construction.
///
/// # Panics
/// If `sigma` has a different dimension than `h` or a negative entry.
pub fn wrapped_normal_sample<R: Rng + ?Sized>(
    h: &BallPoint,
    sigma: &DVector<f64>,
    rng: &mut R,
) -> BallPoint {
    assert_same_dim(h.dim(), sigma.len());
    assert!(
        sigma.iter().all(|&s| s >= 0.0),
        "sigma entries must be nonnegative"
    );
    let vt = DVector::from_iterator(
        sigma.len(),
        sigma
            .iter()
            .map(|&s| s * rng.sample::<f64, _>(StandardNormal)),
    );
    let v = vt / 2.0;
    let u = v * (1.0 - h.coords.norm_squared());
    exp_map_ball(h, &u)
}

/// Stereographic-style projection `τ(x) = (x₁,…,x_m)/(x₀+1)` from the
/// hyperboloid to the ball.
pub fn ball_from_lorentz(x: &LorentzPoint) -> BallPoint {
    let m = x.coords.len() - 1;
    let denom = x.coords[0] + 1.0;
    let coords = DVector::from_iterator(m, x.coords.iter().skip(1).map(|&v| v / denom));
    BallPoint::clamped(coords)
}

/// Inverse projection `τ⁻¹(x) = (1+‖x‖², 2x)/(1−‖x‖²)` from the ball to
/// the hyperboloid. The image satisfies the Minkowski constraint by
/// construction.
pub fn lorentz_from_ball(x: &BallPoint) -> LorentzPoint {
    let n2 = x.coords.norm_squared();
    let denom = 1.0 - n2;
    let mut coords = DVector::zeros(x.dim() + 1);
    coords[0] = (1.0 + n2) / denom;
    for i in 0..x.dim() {
        coords[i + 1] = 2.0 * x.coords[i] / denom;
    }
    LorentzPoint { coords }
}

/// Hyperboloid distance `acosh(x₀y₀ − Σᵢ xᵢyᵢ)`, with the Minkowski
/// product clamped to ≥ 1 against rounding.
///
/// # Panics
/// If the operands have different dimensions.
pub fn lorentz_distance(x: &LorentzPoint, y: &LorentzPoint) -> f64 {
    assert_same_dim(x.dim(), y.dim());
    let mut mink = x.coords[0] * y.coords[0];
    for i in 1..x.coords.len() {
        mink -= x.coords[i] * y.coords[i];
    }
    mink.max(1.0).acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn vec2(a: f64, b: f64) -> DVector<f64> {
        DVector::from_vec(vec![a, b])
    }

    fn random_point(dim: usize, max_norm: f64, rng: &mut StdRng) -> BallPoint {
        // Uniform direction, radius ~ U^(1/dim) up to max_norm.
        let dir = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)).normalize();
        let r = max_norm * rng.gen::<f64>().powf(1.0 / dim as f64);
        BallPoint::new(dir * r).unwrap()
    }

    fn random_boundary(dim: usize, rng: &mut StdRng) -> BallBoundary {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        BallBoundary::from_vector(v).unwrap()
    }

    #[test]
    fn construction_clamps_and_rejects() {
        assert!(BallPoint::new(vec2(0.8, 0.0)).is_ok());
        assert!(matches!(
            BallPoint::new(vec2(1.2, 0.0)),
            Err(BallError::OutsideBall { .. })
        ));
        let before = clamp_event_count();
        let p = BallPoint::clamped(vec2(3.0, 4.0));
        assert!((p.norm() - BALL_MAX_NORM).abs() <= 1e-15);
        assert_eq!(clamp_event_count(), before + 1);
    }

    #[test]
    fn mobius_identity_and_inverse() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let x = random_point(3, 0.9, &mut rng);
            let zero = BallPoint::origin(3);
            let id = mobius_add(&zero, &x);
            assert!((id.coords() - x.coords()).norm() <= 1e-15);
            let cancel = mobius_add(&x.negated(), &x);
            assert!(cancel.norm() <= 1e-14);
        }
    }

    #[test]
    fn mobius_artanh_matches_acosh_distance() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..50 {
            let x = random_point(3, 0.9, &mut rng);
            let y = random_point(3, 0.9, &mut rng);
            let via_mobius = 2.0 * mobius_add(&x.negated(), &y).norm().atanh();
            let via_acosh = dist_ball(&x, &y);
            assert!((via_mobius - via_acosh).abs() <= 1e-10);
        }
    }

    #[test]
    fn dist_axioms_and_ray() {
        let mut rng = StdRng::seed_from_u64(13);
        let xi = random_boundary(3, &mut rng);
        for &t in &[0.1, 1.0, 5.0] {
            let x = BallPoint::new(xi.direction() * (t / 2.0f64).tanh()).unwrap();
            assert!((dist_ball(&BallPoint::origin(3), &x) - t).abs() <= 1e-12);
        }
        for _ in 0..30 {
            let (a, b, c) = (
                random_point(3, 0.9, &mut rng),
                random_point(3, 0.9, &mut rng),
                random_point(3, 0.9, &mut rng),
            );
            assert_eq!(dist_ball(&a, &a), 0.0);
            assert!((dist_ball(&a, &b) - dist_ball(&b, &a)).abs() <= 1e-12);
            assert!(dist_ball(&a, &c) <= dist_ball(&a, &b) + dist_ball(&b, &c) + 1e-12);
        }
    }

    #[test]
    fn exp_log_round_trip_and_radius() {
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..30 {
            let x = random_point(3, 0.9, &mut rng);
            let back = exp_map_ball(&BallPoint::origin(3), &log0_ball(&x));
            assert!((back.coords() - x.coords()).norm() <= 1e-12);
            assert!(
                (log0_ball(&x).norm() - dist_ball(&BallPoint::origin(3), &x) / 2.0).abs() <= 1e-12
            );
        }
        let h = random_point(3, 0.7, &mut rng);
        assert_eq!(exp_map_ball(&h, &DVector::zeros(3)).coords(), h.coords());
        let u = DVector::from_vec(vec![0.3, -0.1, 0.2]);
        let moved = exp_map_ball(&h, &u);
        let expect = 2.0 * u.norm() / (1.0 - h.coords().norm_squared());
        assert!((dist_ball(&h, &moved) - expect).abs() <= 1e-10);
    }

    #[test]
    fn gyrotranslation_invariance() {
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..30 {
            let h = random_point(3, 0.8, &mut rng);
            let a = random_point(3, 0.8, &mut rng);
            let b = random_point(3, 0.8, &mut rng);
            let lhs = mobius_add(&mobius_add(&h, &a).negated(), &mobius_add(&h, &b)).norm();
            let rhs = mobius_add(&a.negated(), &b).norm();
            assert!((lhs - rhs).abs() <= 1e-10);
        }
    }

    #[test]
    fn busemann_normalization_and_ray() {
        let mut rng = StdRng::seed_from_u64(16);
        let exact = BallBoundary::new(DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(busemann_ball(&exact, &BallPoint::origin(4)), 0.0);
        let xi = random_boundary(4, &mut rng);
        assert!(busemann_ball(&xi, &BallPoint::origin(4)).abs() <= 1e-15);
        for &t in &[0.5, 2.0, 10.0] {
            let x = BallPoint::new(xi.direction() * (t / 2.0f64).tanh()).unwrap();
            assert!((busemann_ball(&xi, &x) + t).abs() <= 1e-10);
        }
    }

    #[test]
    fn g_distance_sign_and_zero() {
        let mut rng = StdRng::seed_from_u64(17);
        let p = random_point(2, 0.7, &mut rng);
        let a = vec2(0.4, -0.3);
        let hp = GHyperplaneBall::new(p.clone(), a.clone()).unwrap();
        assert_eq!(g_distance(&hp, &p), 0.0);
        let hp_neg = GHyperplaneBall::new(p, -a).unwrap();
        let x = random_point(2, 0.9, &mut rng);
        assert!((g_distance(&hp, &x) + g_distance(&hp_neg, &x)).abs() <= 1e-14);
        assert_eq!(g_distance_metric(&hp, &x), g_distance(&hp, &x).abs());
    }

    #[test]
    fn h_distance_conventions() {
        let mut rng = StdRng::seed_from_u64(18);
        let xi = random_boundary(3, &mut rng);
        let hp = HHoroplaneBall::new(xi.clone(), 1.7, 0.0).unwrap();
        // At the origin the log term vanishes (up to the rounding of ‖ξ‖²).
        assert!(h_distance(&hp, &BallPoint::origin(3)).abs() <= 1e-15);
        // Signed value is -a·B - b; the metric wrapper strips scale and sign.
        let x = random_point(3, 0.9, &mut rng);
        let expect = -1.7 * busemann_ball(&xi, &x) - 0.0;
        assert!((h_distance(&hp, &x) - expect).abs() <= 1e-12);
        assert!((h_distance_metric(&hp, &x) - (h_distance(&hp, &x).abs() / 1.7)).abs() <= 1e-15);
        // A point sitting on the horoplane: pick b to match.
        let on = HHoroplaneBall::new(xi.clone(), 1.7, expect + 0.0).unwrap();
        assert!(h_distance(&on, &x).abs() <= 1e-12);
    }

    #[test]
    fn b_distance_base_point_and_ray() {
        let mut rng = StdRng::seed_from_u64(19);
        let xi = random_boundary(2, &mut rng);
        let p = random_point(2, 0.7, &mut rng);
        let hp = BHyperplaneBall::new(xi.clone(), p.clone()).unwrap();
        assert_eq!(b_distance_ball(&hp, &p), 0.0);

        // p = 0, x = tanh(t/2)·ξ gives -(t/tanh(t/2))·t.
        let t = 1.3f64;
        let origin_hp = BHyperplaneBall::new(xi.clone(), BallPoint::origin(2)).unwrap();
        let x = BallPoint::new(xi.direction() * (t / 2.0).tanh()).unwrap();
        let got = b_distance_ball(&origin_hp, &x);
        let expect = -(t / (t / 2.0).tanh()) * t;
        assert!((got - expect).abs() <= 1e-10);
    }

    #[test]
    fn b_distance_matches_definition_pipeline() {
        let mut rng = StdRng::seed_from_u64(20);
        for _ in 0..50 {
            let xi = random_boundary(3, &mut rng);
            let p = random_point(3, 0.8, &mut rng);
            let x = random_point(3, 0.8, &mut rng);
            let hp = BHyperplaneBall::new(xi.clone(), p.clone()).unwrap();
            let closed = b_distance_ball(&hp, &x);
            let z = mobius_add(&p.negated(), &x);
            let pipeline = dist_ball(&x, &p) * busemann_ball(&xi, &z) / z.norm();
            assert!((closed - pipeline).abs() <= 1e-12);
        }
    }

    #[test]
    fn mlr_uniform_and_mirrored() {
        let p = BallPoint::new(vec2(0.3, 0.1)).unwrap();
        let a = vec2(0.5, -0.2);
        let same = GHyperplaneBall::new(p.clone(), a.clone()).unwrap();
        let head = MlrHeadBall::G(vec![same.clone(), same.clone(), same]);
        head.validate().unwrap();
        let probs = mlr_ball(&head, &BallPoint::new(vec2(0.2, -0.4)).unwrap());
        for i in 0..3 {
            assert!((probs[i] - 1.0 / 3.0).abs() <= 1e-12);
        }
        assert!((probs.sum() - 1.0).abs() <= 1e-12);

        // Mirrored two-class heads are tied at the origin.
        let mirrored = MlrHeadBall::G(vec![
            GHyperplaneBall::new(p.clone(), a.clone()).unwrap(),
            GHyperplaneBall::new(p.negated(), -a).unwrap(),
        ]);
        let probs = mlr_ball(&mirrored, &BallPoint::origin(2));
        assert!((probs[0] - 0.5).abs() <= 1e-12);

        let xi = BallBoundary::new(vec2(1.0, 0.0)).unwrap();
        let h_mirrored = MlrHeadBall::H(vec![
            HHoroplaneBall::new(xi.clone(), 0.8, 0.25).unwrap(),
            HHoroplaneBall::new(BallBoundary::new(vec2(-1.0, 0.0)).unwrap(), 0.8, 0.25).unwrap(),
        ]);
        let probs = mlr_ball(&h_mirrored, &BallPoint::origin(2));
        assert!((probs[0] - 0.5).abs() <= 1e-12);

        let b_mirrored = MlrHeadBall::B(vec![
            BMlrClass {
                hyperplane: BHyperplaneBall::new(xi.clone(), p.clone()).unwrap(),
                scale: 1.2,
            },
            BMlrClass {
                hyperplane: BHyperplaneBall::new(
                    BallBoundary::new(vec2(-1.0, 0.0)).unwrap(),
                    p.negated(),
                )
                .unwrap(),
                scale: 1.2,
            },
        ]);
        let probs = mlr_ball(&b_mirrored, &BallPoint::origin(2));
        assert!((probs[0] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn mlr_logits_compose_from_distance_ops() {
        let mut rng = StdRng::seed_from_u64(21);
        let x = random_point(2, 0.8, &mut rng);
        let p = random_point(2, 0.7, &mut rng);
        let a = vec2(0.4, 0.9);
        let xi = random_boundary(2, &mut rng);

        let g_head = MlrHeadBall::G(vec![
            GHyperplaneBall::new(p.clone(), a.clone()).unwrap(),
            GHyperplaneBall::new(BallPoint::origin(2), vec2(1.0, 0.0)).unwrap(),
        ]);
        let logits = mlr_logits_ball(&g_head, &x);
        let hp = GHyperplaneBall::new(p.clone(), a.clone()).unwrap();
        let expect = 2.0 / (1.0 - p.coords().norm_squared()) * a.norm() * g_distance(&hp, &x);
        assert!((logits[0] - expect).abs() <= 1e-13);

        let b_head = MlrHeadBall::B(vec![
            BMlrClass {
                hyperplane: BHyperplaneBall::new(xi.clone(), p.clone()).unwrap(),
                scale: 2.5,
            },
            BMlrClass {
                hyperplane: BHyperplaneBall::new(xi.clone(), BallPoint::origin(2)).unwrap(),
                scale: 1.0,
            },
        ]);
        let logits = mlr_logits_ball(&b_head, &x);
        let hp = BHyperplaneBall::new(xi, p).unwrap();
        assert!((logits[0] - 2.5 * b_distance_ball(&hp, &x)).abs() <= 1e-13);
    }

    #[test]
    fn mlr_argmax_shift_invariant() {
        let logits = DVector::from_vec(vec![0.3, -1.2, 2.0, 0.9]);
        let shifted = logits.map(|l| l + 17.5);
        let p0 = softmax(&logits);
        let p1 = softmax(&shifted);
        assert!((p0 - p1).norm() <= 1e-12);
    }

    #[test]
    fn wrapped_normal_displacement_and_symmetry() {
        let mut rng = StdRng::seed_from_u64(22);
        let h = random_point(3, 0.6, &mut rng);
        let sigma = DVector::from_vec(vec![0.2, 0.4, 0.1]);

        // sigma = 0 returns h exactly.
        let fixed = wrapped_normal_sample(&h, &DVector::zeros(3), &mut rng);
        assert_eq!(fixed.coords(), h.coords());

        // Displacement equals ‖ṽ‖; the pipeline is symmetric in ṽ ↦ −ṽ.
        for _ in 0..20 {
            let vt = DVector::from_fn(3, |i, _| sigma[i] * rng.sample::<f64, _>(StandardNormal));
            let push = |vt: &DVector<f64>| {
                let u = vt / 2.0 * (1.0 - h.coords().norm_squared());
                exp_map_ball(&h, &u)
            };
            let z = push(&vt);
            let z_neg = push(&(-&vt));
            assert!(z.norm() < 1.0);
            assert!((dist_ball(&h, &z) - vt.norm()).abs() <= 1e-9);
            assert!((dist_ball(&h, &z) - dist_ball(&h, &z_neg)).abs() <= 1e-9);
        }
    }

    #[test]
    fn lorentz_bridge_round_trip_and_isometry() {
        let mut rng = StdRng::seed_from_u64(23);
        let apex = LorentzPoint::new(DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(ball_from_lorentz(&apex).norm(), 0.0);

        for _ in 0..30 {
            let x = random_point(3, 0.9, &mut rng);
            let l = lorentz_from_ball(&x);
            // Constraint holds by construction.
            let spatial: f64 = l.coords().rows(1, 3).norm_squared();
            assert!((-l.coords()[0] * l.coords()[0] + spatial + 1.0).abs() <= 1e-9);
            let back = ball_from_lorentz(&l);
            assert!((back.coords() - x.coords()).norm() <= 1e-12);

            let y = random_point(3, 0.9, &mut rng);
            let dl = lorentz_distance(&lorentz_from_ball(&x), &lorentz_from_ball(&y));
            assert!((dl - dist_ball(&x, &y)).abs() <= 1e-9);
        }

        assert!(matches!(
            LorentzPoint::new(DVector::from_vec(vec![2.0, 0.0, 0.0])),
            Err(BallError::LorentzConstraint { .. })
        ));
        assert!(matches!(
            LorentzPoint::new(DVector::from_vec(vec![-1.0, 0.0, 0.0])),
            Err(BallError::LorentzTimeCoordinate { .. })
        ));
    }

    #[test]
    fn lorentz_distance_axioms() {
        let x = lorentz_from_ball(&BallPoint::new(vec2(0.3, -0.2)).unwrap());
        let y = lorentz_from_ball(&BallPoint::new(vec2(-0.5, 0.1)).unwrap());
        assert_eq!(lorentz_distance(&x, &x), 0.0);
        assert_eq!(lorentz_distance(&x, &y), lorentz_distance(&y, &x));
    }

    #[test]
    fn head_validation() {
        let p = BallPoint::origin(2);
        let single = MlrHeadBall::G(vec![GHyperplaneBall::new(p, vec2(1.0, 0.0)).unwrap()]);
        assert!(matches!(
            single.validate(),
            Err(BallError::TooFewClasses { count: 1 })
        ));
    }
}
