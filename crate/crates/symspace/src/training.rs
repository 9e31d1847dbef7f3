//! Constrained parameter spaces, finite-difference gradients, Riemannian
//! SGD, and the multinomial-regression demo trainer.
//!
//! Gradients are central finite differences rather than analytic
//! backpropagation: the exact derivative formulas route through
//! eigendecomposition differentials that degenerate at repeated
//! eigenvalues, while at the scale this crate trains (a few hundred
//! parameters) central differences are accurate to the square of the step
//! and indifferent to such corner cases. Each [`ParamSpace`] kind knows
//! how to probe itself in an unconstrained direction and how to retract an
//! update back onto its constraint set, so the same optimizer loop drives
//! Euclidean weights, ball points, unit boundary directions, SPD points
//! (as symmetric log-parameters), and unit-upper-triangular factors.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matkernels::{sym_exp, MatError, SpdMatrix, SymMatrix};
use crate::poincare::{
    mlr_logits_ball, wrapped_normal_sample, BHyperplaneBall, BMlrClass, BallBoundary, BallError,
    BallPoint, GHyperplaneBall, HHoroplaneBall, MlrHeadBall,
};

/// Errors from parameter handling and training.
#[derive(Debug, Error)]
pub enum TrainError {
    /// Underlying ball-geometry failure.
    #[error(transparent)]
    Ball(#[from] BallError),
    /// Underlying matrix-kernel failure.
    #[error(transparent)]
    Mat(#[from] MatError),
    /// The loss is non-finite at the current parameters.
    #[error("loss is non-finite at the current parameters")]
    NonFiniteBase,
    /// The loss became non-finite while probing one parameter.
    #[error("loss is non-finite while probing parameter {param_index}")]
    NonFiniteLoss { param_index: usize },
    /// A configuration field is out of range.
    #[error("configuration field `{field}` is out of range")]
    InvalidConfig { field: &'static str },
    /// Vector cannot be normalized.
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    /// A matrix handed to a constrained kind violates its shape contract.
    #[error("matrix is not unit upper triangular (defect {defect:.3e})")]
    NotUnitUpperTriangular { defect: f64 },
    /// The dataset is empty.
    #[error("dataset is empty")]
    EmptyDataset,
    /// Feature/label counts or feature dimensions disagree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// A label falls outside `[0, num_classes)`.
    #[error("label {label} at row {index} is outside [0, {num_classes})")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        num_classes: usize,
    },
    /// Training requires at least two distinct labels.
    #[error("dataset is degenerate: only {distinct} distinct label(s)")]
    DegenerateDataset { distinct: usize },
    /// Synthetic generation requires at least two classes.
    #[error("need at least 2 classes, got {count}")]
    TooFewClasses { count: usize },
}

/// Constraint kind of a [`ParamSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamKind {
    /// Unconstrained vector.
    Euclidean,
    /// Point of the open unit ball (clamped like every ball point).
    Ball,
    /// Unit vector; updates move in the tangent space and renormalize.
    UnitSphere,
    /// SPD point stored as its packed symmetric log-parameter
    /// (row-major upper triangle including the diagonal).
    SpdViaSymExp { dim: usize },
    /// Unit-upper-triangular matrix stored as its packed strictly-upper
    /// entries (row-major); the unit diagonal is implicit and untouched.
    UnitUpperTriangular { dim: usize },
}

/// One optimizable parameter: a flat value vector plus the constraint it
/// lives under. Every constructor and every [`sgd_step`] output satisfies
/// the kind's invariant.
#[derive(Clone, Debug)]
pub struct ParamSpace {
    kind: ParamKind,
    value: DVector<f64>,
}

impl ParamSpace {
    /// Unconstrained parameter.
    pub fn euclidean(value: DVector<f64>) -> Self {
        ParamSpace {
            kind: ParamKind::Euclidean,
            value,
        }
    }

    /// Ball-point parameter; the value is clamped into the ball the same
    /// way all ball points are.
    pub fn ball(value: DVector<f64>) -> Self {
        let clamped = BallPoint::clamped(value);
        ParamSpace {
            kind: ParamKind::Ball,
            value: clamped.coords().clone(),
        }
    }

    /// Unit-vector parameter, normalized at construction.
    pub fn unit_sphere(value: DVector<f64>) -> Result<Self, TrainError> {
        let norm = value.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(TrainError::ZeroVector);
        }
        Ok(ParamSpace {
            kind: ParamKind::UnitSphere,
            value: value / norm,
        })
    }

    /// SPD-point parameter from its symmetric log-parameter.
    pub fn spd_via_sym_exp(log_point: &SymMatrix) -> Self {
        let dim = log_point.dim();
        let mut value = DVector::zeros(dim * (dim + 1) / 2);
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                value[k] = log_point.matrix()[(i, j)];
                k += 1;
            }
        }
        ParamSpace {
            kind: ParamKind::SpdViaSymExp { dim },
            value,
        }
    }

    /// Unit-upper-triangular parameter; `n` must already be unit upper
    /// triangular within `1e-12`.
    pub fn unit_upper_triangular(n: &DMatrix<f64>) -> Result<Self, TrainError> {
        let dim = n.nrows();
        if n.ncols() != dim {
            return Err(TrainError::DimensionMismatch {
                left: dim,
                right: n.ncols(),
            });
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            defect = defect.max((n[(i, i)] - 1.0).abs());
            for j in 0..i {
                defect = defect.max(n[(i, j)].abs());
            }
        }
        if defect > 1e-12 {
            return Err(TrainError::NotUnitUpperTriangular { defect });
        }
        let mut value = DVector::zeros(dim * (dim - 1) / 2);
        let mut k = 0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                value[k] = n[(i, j)];
                k += 1;
            }
        }
        Ok(ParamSpace {
            kind: ParamKind::UnitUpperTriangular { dim },
            value,
        })
    }

    pub fn kind(&self) -> &ParamKind {
        &self.kind
    }

    /// Raw stored coordinates (the unconstrained parameterization for the
    /// SPD and triangular kinds).
    pub fn value(&self) -> &DVector<f64> {
        &self.value
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    /// Ball point named by a `Ball` parameter.
    ///
    /// # Panics
    /// If the kind is not `Ball`.
    pub fn as_ball_point(&self) -> BallPoint {
        assert_eq!(self.kind, ParamKind::Ball, "parameter is not a ball point");
        BallPoint::clamped(self.value.clone())
    }

    /// Boundary direction named by a `UnitSphere` parameter.
    ///
    /// # Panics
    /// If the kind is not `UnitSphere`.
    pub fn as_boundary(&self) -> Result<BallBoundary, TrainError> {
        assert_eq!(
            self.kind,
            ParamKind::UnitSphere,
            "parameter is not a unit vector"
        );
        Ok(BallBoundary::from_vector(self.value.clone())?)
    }

    /// SPD point named by a `SpdViaSymExp` parameter: `exp` of the packed
    /// symmetric matrix.
    ///
    /// # Panics
    /// If the kind is not `SpdViaSymExp`.
    pub fn as_spd_point(&self) -> Result<SpdMatrix, TrainError> {
        let ParamKind::SpdViaSymExp { dim } = self.kind else {
            panic!("parameter is not an SPD log-parameter");
        };
        let mut s = DMatrix::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                s[(i, j)] = self.value[k];
                s[(j, i)] = self.value[k];
                k += 1;
            }
        }
        Ok(sym_exp(&SymMatrix::new(s)?)?)
    }

    /// Unit-upper-triangular matrix named by a `UnitUpperTriangular`
    /// parameter.
    ///
    /// # Panics
    /// If the kind is not `UnitUpperTriangular`.
    pub fn as_unit_upper(&self) -> DMatrix<f64> {
        let ParamKind::UnitUpperTriangular { dim } = self.kind else {
            panic!("parameter is not unit upper triangular");
        };
        let mut n = DMatrix::identity(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                n[(i, j)] = self.value[k];
                k += 1;
            }
        }
        n
    }
}

/// Training hyperparameters. `learning_rate` may be zero (a zero-rate run
/// leaves parameters untouched, which the determinism tests rely on);
/// everything else must be positive. `batch_size: None` trains full-batch.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: Option<usize>,
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 200,
            batch_size: None,
            fd_step: 1e-6,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(TrainError::InvalidConfig {
                field: "learning_rate",
            });
        }
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig { field: "epochs" });
        }
        if self.batch_size == Some(0) {
            return Err(TrainError::InvalidConfig {
                field: "batch_size",
            });
        }
        if !self.fd_step.is_finite() || self.fd_step <= 0.0 {
            return Err(TrainError::InvalidConfig { field: "fd_step" });
        }
        Ok(())
    }
}

/// Central finite-difference gradient of `loss` with respect to every
/// parameter, in each parameter's stored coordinates.
///
/// Probes step by `step` in the unconstrained parameterization: plain
/// coordinate steps for `Euclidean`, `Ball` (an open set), `SpdViaSymExp`
/// and `UnitUpperTriangular` (whose stored vectors are unconstrained), and
/// tangent-projected renormalized steps for `UnitSphere`. A sphere
/// coordinate whose direction has no tangent component gets gradient 0.
pub fn fd_gradient<F>(
    loss: &mut F,
    params: &[ParamSpace],
    step: f64,
) -> Result<Vec<DVector<f64>>, TrainError>
where
    F: FnMut(&[ParamSpace]) -> Result<f64, TrainError>,
{
    let base = loss(params)?;
    if !base.is_finite() {
        return Err(TrainError::NonFiniteBase);
    }
    let mut work: Vec<ParamSpace> = params.to_vec();
    let mut grads = Vec::with_capacity(params.len());
    for p in 0..params.len() {
        let n = params[p].len();
        let mut grad = DVector::zeros(n);
        for i in 0..n {
            let (f_plus, f_minus) = match params[p].kind {
                ParamKind::UnitSphere => {
                    let x = params[p].value.clone();
                    let mut dir = DVector::zeros(n);
                    dir[i] = 1.0;
                    let tangent = &dir - &x * x.dot(&dir);
                    if tangent.norm() == 0.0 {
                        continue;
                    }
                    let probe = |sign: f64,
                                 work: &mut Vec<ParamSpace>,
                                 loss: &mut F|
                     -> Result<f64, TrainError> {
                        let v = &x + &tangent * (sign * step);
                        work[p].value = &v / v.norm();
                        loss(work)
                    };
                    let fp = probe(1.0, &mut work, loss)?;
                    let fm = probe(-1.0, &mut work, loss)?;
                    work[p].value = x;
                    (fp, fm)
                }
                _ => {
                    let orig = params[p].value[i];
                    work[p].value[i] = orig + step;
                    let fp = loss(&work)?;
                    work[p].value[i] = orig - step;
                    let fm = loss(&work)?;
                    work[p].value[i] = orig;
                    (fp, fm)
                }
            };
            if !f_plus.is_finite() || !f_minus.is_finite() {
                return Err(TrainError::NonFiniteLoss { param_index: p });
            }
            grad[i] = (f_plus - f_minus) / (2.0 * step);
        }
        grads.push(grad);
    }
    Ok(grads)
}

/// One SGD update with the kind's retraction. A zero effective step
/// returns the parameter bit-for-bit unchanged.
///
/// * `Euclidean`, `SpdViaSymExp`, `UnitUpperTriangular`: plain step in the
///   stored (unconstrained) coordinates.
/// * `Ball`: the raw gradient is rescaled by the inverse conformal metric
///   factor `(1−‖x‖²)²/4`, stepped, then clamped into the ball.
/// * `UnitSphere`: the gradient is projected to the tangent space, stepped,
///   then renormalized.
///
/// # Panics
/// If `grad` does not match the parameter's stored length.
pub fn sgd_step(param: &ParamSpace, grad: &DVector<f64>, lr: f64) -> ParamSpace {
    assert_eq!(
        param.len(),
        grad.len(),
        "gradient length {} does not match parameter length {}",
        grad.len(),
        param.len()
    );
    match param.kind {
        ParamKind::Euclidean
        | ParamKind::SpdViaSymExp { .. }
        | ParamKind::UnitUpperTriangular { .. } => {
            let delta = grad * lr;
            if delta.iter().all(|&d| d == 0.0) {
                return param.clone();
            }
            ParamSpace {
                kind: param.kind.clone(),
                value: &param.value - delta,
            }
        }
        ParamKind::Ball => {
            let x = &param.value;
            let factor = {
                let one_minus = 1.0 - x.norm_squared();
                lr * one_minus * one_minus / 4.0
            };
            let delta = grad * factor;
            if delta.iter().all(|&d| d == 0.0) {
                return param.clone();
            }
            ParamSpace::ball(x - delta)
        }
        ParamKind::UnitSphere => {
            let x = &param.value;
            let tangent = grad - x * x.dot(grad);
            let delta = tangent * lr;
            if delta.iter().all(|&d| d == 0.0) {
                return param.clone();
            }
            let v = x - delta;
            let norm = v.norm();
            if norm == 0.0 {
                return param.clone();
            }
            ParamSpace {
                kind: ParamKind::UnitSphere,
                value: v / norm,
            }
        }
    }
}

/// Labeled classification dataset on the ball.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Vec<BallPoint>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    pub fn new(
        features: Vec<BallPoint>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self, TrainError> {
        if features.is_empty() {
            return Err(TrainError::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(TrainError::DimensionMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        let dim = features[0].dim();
        for f in &features {
            if f.dim() != dim {
                return Err(TrainError::DimensionMismatch {
                    left: dim,
                    right: f.dim(),
                });
            }
        }
        for (index, &label) in labels.iter().enumerate() {
            if label >= num_classes {
                return Err(TrainError::LabelOutOfRange {
                    index,
                    label,
                    num_classes,
                });
            }
        }
        Ok(Dataset {
            features,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].dim()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &[BallPoint] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.num_classes];
        for &l in &self.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Which hyperplane family the regression head uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadKind {
    /// Geodesic hyperplanes (point + normal).
    G,
    /// Horoplanes (boundary point + positive scale + offset).
    H,
    /// Busemann hyperplanes (boundary point + base point + scale).
    B,
}

impl HeadKind {
    pub fn label(&self) -> &'static str {
        match self {
            HeadKind::G => "g",
            HeadKind::H => "h",
            HeadKind::B => "b",
        }
    }
}

/// Per-run training record.
#[derive(Clone, Debug)]
pub struct TrainMetrics {
    /// Full-dataset mean cross-entropy before any update.
    pub initial_loss: f64,
    /// Full-dataset mean cross-entropy after each epoch.
    pub losses: Vec<f64>,
    /// Fraction of training points whose argmax logit matches the label.
    pub final_accuracy: f64,
}

/// Parameter layout per class for each head kind; the head is rebuilt
/// from the flat list on every loss evaluation.
fn head_from_params(
    kind: HeadKind,
    num_classes: usize,
    params: &[ParamSpace],
) -> Result<MlrHeadBall, TrainError> {
    match kind {
        HeadKind::G => {
            let mut classes = Vec::with_capacity(num_classes);
            for l in 0..num_classes {
                let p = params[2 * l].as_ball_point();
                let a = params[2 * l + 1].value().clone();
                classes.push(GHyperplaneBall::new(p, a)?);
            }
            Ok(MlrHeadBall::G(classes))
        }
        HeadKind::H => {
            let mut classes = Vec::with_capacity(num_classes);
            for l in 0..num_classes {
                let xi = params[2 * l].as_boundary()?;
                let ab = params[2 * l + 1].value();
                classes.push(HHoroplaneBall::new(xi, softplus(ab[0]), ab[1])?);
            }
            Ok(MlrHeadBall::H(classes))
        }
        HeadKind::B => {
            let mut classes = Vec::with_capacity(num_classes);
            for l in 0..num_classes {
                let xi = params[3 * l].as_boundary()?;
                let p = params[3 * l + 1].as_ball_point();
                let scale = params[3 * l + 2].value()[0];
                classes.push(BMlrClass {
                    hyperplane: BHyperplaneBall::new(xi, p)?,
                    scale,
                });
            }
            Ok(MlrHeadBall::B(classes))
        }
    }
}

fn init_params(
    kind: HeadKind,
    num_classes: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ParamSpace> {
    let mut params = Vec::new();
    for _ in 0..num_classes {
        match kind {
            HeadKind::G => {
                params.push(ParamSpace::ball(random_small(dim, 0.1, rng)));
                params.push(ParamSpace::euclidean(random_unit_ish(dim, rng)));
            }
            HeadKind::H => {
                params.push(
                    ParamSpace::unit_sphere(random_unit_ish(dim, rng))
                        .expect("random direction is nonzero"),
                );
                params.push(ParamSpace::euclidean(DVector::from_vec(vec![0.0, 0.0])));
            }
            HeadKind::B => {
                params.push(
                    ParamSpace::unit_sphere(random_unit_ish(dim, rng))
                        .expect("random direction is nonzero"),
                );
                params.push(ParamSpace::ball(random_small(dim, 0.1, rng)));
                params.push(ParamSpace::euclidean(DVector::from_vec(vec![1.0])));
            }
        }
    }
    params
}

fn random_small(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-scale..scale))
}

fn random_unit_ish(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0f64..1.0));
        if v.norm() > 1e-3 {
            return v;
        }
    }
}

/// Numerically stable `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Mean cross-entropy of the head over the indexed subset.
fn mean_cross_entropy(head: &MlrHeadBall, dataset: &Dataset, indices: &[usize]) -> f64 {
    let mut total = 0.0;
    for &i in indices {
        let logits = mlr_logits_ball(head, &dataset.features[i]);
        let max = logits.max();
        let lse = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
        total += lse - logits[dataset.labels[i]];
    }
    total / indices.len() as f64
}

/// Training-set accuracy of a head on a dataset.
pub fn mlr_accuracy(head: &MlrHeadBall, dataset: &Dataset) -> f64 {
    let mut correct = 0usize;
    for (x, &label) in dataset.features.iter().zip(&dataset.labels) {
        let logits = mlr_logits_ball(head, x);
        let argmax = logits
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if argmax == label {
            correct += 1;
        }
    }
    correct as f64 / dataset.len() as f64
}

/// Trains a multinomial-regression head of the given kind by SGD over
/// finite-difference gradients of the mean cross-entropy. Deterministic
/// for a fixed config (initialization and batch shuffling both derive from
/// `config.seed`). Refuses datasets with fewer than two distinct labels.
pub fn train_mlr(
    dataset: &Dataset,
    kind: HeadKind,
    config: &TrainConfig,
) -> Result<TrainMetrics, TrainError> {
    config.validate()?;
    let distinct = dataset.distinct_labels();
    if dataset.num_classes < 2 || distinct < 2 {
        return Err(TrainError::DegenerateDataset { distinct });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = init_params(kind, dataset.num_classes, dataset.dim(), &mut rng);
    let all_indices: Vec<usize> = (0..dataset.len()).collect();

    let eval = |params: &[ParamSpace], indices: &[usize]| -> Result<f64, TrainError> {
        let head = head_from_params(kind, dataset.num_classes, params)?;
        Ok(mean_cross_entropy(&head, dataset, indices))
    };

    let initial_loss = eval(&params, &all_indices)?;
    let mut losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let batches: Vec<Vec<usize>> = match config.batch_size {
            None => vec![all_indices.clone()],
            Some(bs) => {
                let mut shuffled = all_indices.clone();
                shuffled.shuffle(&mut rng);
                shuffled.chunks(bs).map(|c| c.to_vec()).collect()
            }
        };
        for batch in &batches {
            let mut loss = |p: &[ParamSpace]| eval(p, batch);
            let grads = fd_gradient(&mut loss, &params, config.fd_step)?;
            for (param, grad) in params.iter_mut().zip(&grads) {
                *param = sgd_step(param, grad, config.learning_rate);
            }
        }
        losses.push(eval(&params, &all_indices)?);
    }

    let head = head_from_params(kind, dataset.num_classes, &params)?;
    Ok(TrainMetrics {
        initial_loss,
        losses,
        final_accuracy: mlr_accuracy(&head, dataset),
    })
}

/// Synthetic ball dataset: class prototypes at `exp₀(0.5·uᵢ)` for
/// maximally separated unit directions `uᵢ` (a planar circle for
/// dimension ≥ 2, alternating signs in dimension 1), with points sampled
/// around each prototype by the wrapped normal with the given isotropic
/// standard deviation. Labels cycle round-robin, so class sizes differ by
/// at most one.
pub fn gen_synthetic(
    dim: usize,
    classes: usize,
    samples: usize,
    sigma: f64,
    seed: u64,
) -> Result<Dataset, TrainError> {
    if classes < 2 {
        return Err(TrainError::TooFewClasses { count: classes });
    }
    if dim == 0 || samples == 0 {
        return Err(TrainError::EmptyDataset);
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(TrainError::InvalidConfig { field: "sigma" });
    }
    let origin = BallPoint::origin(dim);
    let prototypes: Vec<BallPoint> = (0..classes)
        .map(|i| {
            let mut u = DVector::zeros(dim);
            if dim == 1 {
                u[0] = if i % 2 == 0 { 1.0 } else { -1.0 };
            } else {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / classes as f64;
                u[0] = theta.cos();
                u[1] = theta.sin();
            }
            crate::poincare::exp_map_ball(&origin, &(u * 0.5))
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigmas = DVector::from_element(dim, sigma);
    let mut features = Vec::with_capacity(samples);
    let mut labels = Vec::with_capacity(samples);
    for idx in 0..samples {
        let label = idx % classes;
        features.push(wrapped_normal_sample(&prototypes[label], &sigmas, &mut rng));
        labels.push(label);
    }
    Dataset::new(features, labels, classes)
}
