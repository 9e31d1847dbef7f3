//! Distance-score attention over sequences of SPD matrices.
//!
//! A block carries three fully connected layers (queries, keys, values) of
//! a single geometry variant — Log-Euclidean ([`FcLayerLe`]) or
//! symmetric-space ([`FcLayerGi`]) — plus two scalars: a positive
//! temperature `c1` (kept positive by storing the softplus preimage) and
//! an offset `c2`. Tokens are projected through the three layers, scored
//! pairwise by `f_att(q, z) = −c1·d(q, z) − c2` with the variant's
//! distance, the scores are row-softmaxed into weights on the probability
//! simplex, and each output token is the weighted Fréchet mean of the
//! value tokens under those weights.
//!
//! The mean is the Log-Euclidean [`wfm_le`] for **both** variants — it is
//! the closed-form midpoint the networks use; an iterative Karcher mean is
//! deliberately not provided. The symmetric-space variant scores with
//! [`gi_dist`], which is half the trace-metric affine-invariant distance;
//! the constant factor is absorbed by the learnable `c1`.

use thiserror::Error;

use crate::matkernels::SpdMatrix;
use crate::poincare::softmax;
use crate::spd_pem::{pem_dist, wfm_le, FcLayerLe, PhiMap, SpdPemError};
use crate::symspace_gi::{fc_layer_gi_forward, gi_dist, FcLayerGi, GiError};

/// Errors for attention blocks.
#[derive(Debug, Error)]
pub enum AttentionError {
    /// Underlying Log-Euclidean operation failure.
    #[error(transparent)]
    Pem(#[from] SpdPemError),
    /// Underlying symmetric-space operation failure.
    #[error(transparent)]
    Gi(#[from] GiError),
    /// The three projection layers must share one geometry variant.
    #[error("query/key/value layers mix geometry variants")]
    VariantMismatch,
    /// Operand dimensions disagree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// The input sequence is empty.
    #[error("attention needs a nonempty sequence")]
    Empty,
}

/// A fully connected projection in one of the two SPD geometries.
#[derive(Clone, Debug)]
pub enum AttentionFc {
    /// Log-Euclidean layer; paired with the Log-Euclidean distance.
    Le(FcLayerLe),
    /// Symmetric-space layer; paired with [`gi_dist`].
    Gi(FcLayerGi),
}

impl AttentionFc {
    pub fn input_dim(&self) -> usize {
        match self {
            AttentionFc::Le(layer) => layer.input_dim(),
            AttentionFc::Gi(layer) => layer.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            AttentionFc::Le(layer) => layer.output_dim(),
            AttentionFc::Gi(layer) => layer.output_dim(),
        }
    }

    fn same_variant(&self, other: &AttentionFc) -> bool {
        matches!(
            (self, other),
            (AttentionFc::Le(_), AttentionFc::Le(_)) | (AttentionFc::Gi(_), AttentionFc::Gi(_))
        )
    }

    /// Projects one token.
    pub fn forward(&self, x: &SpdMatrix) -> Result<SpdMatrix, AttentionError> {
        match self {
            AttentionFc::Le(layer) => Ok(crate::spd_pem::fc_layer_le_forward(layer, x)?),
            AttentionFc::Gi(layer) => Ok(fc_layer_gi_forward(layer, x)?),
        }
    }
}

/// Attention block: three projection layers of one variant plus the score
/// parameters.
#[derive(Clone, Debug)]
pub struct AttentionBlock {
    fc_q: AttentionFc,
    fc_k: AttentionFc,
    fc_v: AttentionFc,
    /// Softplus preimage of the temperature.
    c1_raw: f64,
    c2: f64,
}

impl AttentionBlock {
    /// Builds a block. All three layers must share the variant and input
    /// dimension, and queries and keys must project to the same dimension
    /// (their distance is what gets scored). `c1_raw` parameterizes the
    /// temperature as `c1 = softplus(c1_raw) > 0`.
    pub fn new(
        fc_q: AttentionFc,
        fc_k: AttentionFc,
        fc_v: AttentionFc,
        c1_raw: f64,
        c2: f64,
    ) -> Result<Self, AttentionError> {
        if !fc_q.same_variant(&fc_k) || !fc_q.same_variant(&fc_v) {
            return Err(AttentionError::VariantMismatch);
        }
        check_dims(fc_q.input_dim(), fc_k.input_dim())?;
        check_dims(fc_q.input_dim(), fc_v.input_dim())?;
        check_dims(fc_q.output_dim(), fc_k.output_dim())?;
        Ok(AttentionBlock {
            fc_q,
            fc_k,
            fc_v,
            c1_raw,
            c2,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.fc_q.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.fc_v.output_dim()
    }

    /// The positive temperature `softplus(c1_raw)`.
    pub fn c1(&self) -> f64 {
        softplus(self.c1_raw)
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    fn score_dist(&self, q: &SpdMatrix, z: &SpdMatrix) -> Result<f64, AttentionError> {
        match &self.fc_q {
            AttentionFc::Le(_) => Ok(pem_dist(&PhiMap::log_euclidean(), q, z)?),
            AttentionFc::Gi(_) => Ok(gi_dist(q, z)?),
        }
    }
}

/// Numerically stable `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Attention score `−c1·d(q, z) − c2` in the block's geometry.
pub fn f_att(block: &AttentionBlock, q: &SpdMatrix, z: &SpdMatrix) -> Result<f64, AttentionError> {
    check_dims(q.dim(), z.dim())?;
    Ok(-block.c1() * block.score_dist(q, z)? - block.c2())
}

/// The row-softmax weight matrix `π[j'][j]` of a sequence: the weight
/// query `j'` puts on key `j`. Each row is a point of the probability
/// simplex (positive entries summing to 1).
pub fn attention_weights(
    block: &AttentionBlock,
    seq: &[SpdMatrix],
) -> Result<Vec<Vec<f64>>, AttentionError> {
    if seq.is_empty() {
        return Err(AttentionError::Empty);
    }
    for x in seq {
        check_dims(x.dim(), block.input_dim())?;
    }
    let queries: Vec<SpdMatrix> = seq
        .iter()
        .map(|x| block.fc_q.forward(x))
        .collect::<Result<_, _>>()?;
    let keys: Vec<SpdMatrix> = seq
        .iter()
        .map(|x| block.fc_k.forward(x))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(seq.len());
    for q in &queries {
        let mut scores = nalgebra::DVector::zeros(seq.len());
        for (j, k) in keys.iter().enumerate() {
            scores[j] = f_att(block, q, k)?;
        }
        rows.push(softmax(&scores).iter().copied().collect());
    }
    Ok(rows)
}

/// Full forward pass: project, score, softmax, and aggregate values with
/// the Log-Euclidean weighted Fréchet mean. Output length equals input
/// length; token `j'` is the mean of the value tokens under row `j'` of
/// [`attention_weights`].
pub fn attention_forward(
    block: &AttentionBlock,
    seq: &[SpdMatrix],
) -> Result<Vec<SpdMatrix>, AttentionError> {
    let weights = attention_weights(block, seq)?;
    let values: Vec<SpdMatrix> = seq
        .iter()
        .map(|x| block.fc_v.forward(x))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(seq.len());
    for row in &weights {
        out.push(wfm_le(&values, row)?);
    }
    Ok(out)
}

fn check_dims(left: usize, right: usize) -> Result<(), AttentionError> {
    if left != right {
        return Err(AttentionError::DimensionMismatch { left, right });
    }
    Ok(())
}
