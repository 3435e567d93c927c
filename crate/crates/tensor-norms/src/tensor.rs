//! Dense tensors over ℝ/ℂ, rank-one terms, decompositions and flattenings.
//!
//! Entries are stored row-major with the **last index fastest**; the mode-k
//! flattening keeps the remaining indices in their original order (again last
//! index fastest), so `flatten` is a pure reshape for k = 1.
//!
//! Complex scalars are `(re, im)` pairs of `f64`; the real field is a tag on
//! the value, not a separate type, so every algorithm has one code path.
//! All values are immutable after construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scalar entry type: a complex double. Real-mode values carry `im == 0`.
pub type Scalar = Complex64;

/// Unit-norm tolerance for representation invariants (factor norms, phases).
pub const EPS_UNIT: f64 = 1e-12;

/// Base field tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both operands.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field violation: {0}")]
    FieldViolation(String),
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("rank-one factor {0} is zero (or shorter than machine precision)")]
    ZeroFactor(usize),
    #[error("mode {mode} out of range for a {order}-tensor (modes are 1-based)")]
    BadMode { mode: usize, order: usize },
    #[error("tensor is not cubical: shape {0:?}")]
    NotCubical(String),
    #[error("exponent {0} is not in [1, ∞]")]
    BadExponent(f64),
}

fn product(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Row-major strides (last index fastest).
fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// ℓ² norm of a scalar vector.
pub fn vec_norm(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product of two scalar vectors: Σ aᵢ·conj(bᵢ).
pub fn vec_inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Dense d-way array over ℝ or ℂ.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    field: Field,
    entries: Vec<Scalar>,
}

impl DenseTensor {
    /// Build a validated tensor. Rejects length mismatches, non-finite
    /// entries, and nonzero imaginary parts in real mode.
    pub fn new(
        shape: Vec<usize>,
        field: Field,
        entries: Vec<Scalar>,
    ) -> Result<Self, TensorError> {
        if shape.is_empty() || shape.iter().any(|&n| n == 0) {
            return Err(TensorError::ShapeMismatch(format!(
                "shape {shape:?} must be nonempty with positive dimensions"
            )));
        }
        let want = product(&shape);
        if entries.len() != want {
            return Err(TensorError::ShapeMismatch(format!(
                "entry count {} does not match shape product {}",
                entries.len(),
                want
            )));
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(TensorError::NonFinite(i));
            }
            if field == Field::Real && z.im != 0.0 {
                return Err(TensorError::FieldViolation(format!(
                    "entry {i} has imaginary part {} in real mode",
                    z.im
                )));
            }
        }
        Ok(DenseTensor {
            shape,
            field,
            entries,
        })
    }

    /// All-zero tensor of the given shape.
    pub fn zeros(shape: Vec<usize>, field: Field) -> Self {
        let n = product(&shape);
        DenseTensor {
            shape,
            field,
            entries: vec![Scalar::new(0.0, 0.0); n],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// Number of modes d.
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Flat offset of a (0-based) multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        let s = strides(&self.shape);
        index.iter().zip(&s).map(|(i, st)| i * st).sum()
    }

    /// Entry at a 0-based multi-index.
    pub fn entry(&self, index: &[usize]) -> Scalar {
        self.entries[self.offset(index)]
    }

    /// Decode a flat offset into a 0-based multi-index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let s = strides(&self.shape);
        let mut idx = vec![0usize; self.shape.len()];
        for (k, st) in s.iter().enumerate() {
            idx[k] = flat / st;
            flat %= st;
        }
        idx
    }

    /// Retag a real tensor as complex (entries unchanged).
    pub fn to_complex(&self) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            field: Field::Complex,
            entries: self.entries.clone(),
        }
    }

    /// Hermitian inner product ⟨A,B⟩ = Σ aᵢ·conj(bᵢ).
    pub fn inner_product(&self, other: &DenseTensor) -> Result<Scalar, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(format!(
                "inner product of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(vec_inner(&self.entries, &other.entries))
    }

    /// Hilbert–Schmidt norm √⟨A,A⟩.
    pub fn hs_norm(&self) -> f64 {
        vec_norm(&self.entries)
    }

    /// Entrywise Hölder p-norm, p ∈ [1, ∞] (`f64::INFINITY` for ∞).
    pub fn holder_norm(&self, p: f64) -> Result<f64, TensorError> {
        if !(p >= 1.0) {
            return Err(TensorError::BadExponent(p));
        }
        if p.is_infinite() {
            return Ok(self
                .entries
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max));
        }
        if p == 2.0 {
            return Ok(self.hs_norm());
        }
        if p == 1.0 {
            return Ok(self.entries.iter().map(|z| z.norm()).sum());
        }
        Ok(self
            .entries
            .iter()
            .map(|z| z.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p))
    }

    /// Mode-k unfolding (k is 1-based). Rows are indexed by i_k; columns by
    /// the remaining indices in their original order, last index fastest.
    pub fn flatten(&self, mode: usize) -> Result<DenseTensor, TensorError> {
        let d = self.order();
        if mode == 0 || mode > d {
            return Err(TensorError::BadMode { mode, order: d });
        }
        let k = mode - 1;
        let rows = self.shape[k];
        let cols = self.num_entries() / rows;
        let mut out = vec![Scalar::new(0.0, 0.0); rows * cols];
        // Strides of the column tuple (remaining modes in original order).
        let rest: Vec<usize> = (0..d).filter(|&m| m != k).map(|m| self.shape[m]).collect();
        let rest_strides = strides(&rest);
        for (flat, &z) in self.entries.iter().enumerate() {
            let idx = self.multi_index(flat);
            let r = idx[k];
            let mut c = 0usize;
            let mut pos = 0usize;
            for (m, &i) in idx.iter().enumerate() {
                if m != k {
                    c += i * rest_strides[pos];
                    pos += 1;
                }
            }
            out[r * cols + c] = z;
        }
        DenseTensor::new(vec![rows, cols], self.field, out)
    }

    /// Entrywise modulus |A|, always real-field.
    pub fn entrywise_abs(&self) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            field: Field::Real,
            entries: self
                .entries
                .iter()
                .map(|z| Scalar::new(z.norm(), 0.0))
                .collect(),
        }
    }

    /// A ⊗ x₁ ⊗ ⋯ ⊗ x_e: append vector modes on the right.
    pub fn tensor_with_vectors(&self, vectors: &[Vec<Scalar>]) -> DenseTensor {
        // Flat outer product of the appended vectors, last vector fastest.
        let mut tail = vec![Scalar::new(1.0, 0.0)];
        for v in vectors {
            let mut next = Vec::with_capacity(tail.len() * v.len());
            for t in &tail {
                for x in v {
                    next.push(t * x);
                }
            }
            tail = next;
        }
        let mut shape = self.shape.clone();
        shape.extend(vectors.iter().map(|v| v.len()));
        let mut entries = Vec::with_capacity(self.entries.len() * tail.len());
        for a in &self.entries {
            for t in &tail {
                entries.push(a * t);
            }
        }
        let complexified = vectors
            .iter()
            .any(|v| v.iter().any(|z| z.im != 0.0));
        DenseTensor {
            shape,
            field: if complexified {
                Field::Complex
            } else {
                self.field
            },
            entries,
        }
    }

    /// True iff the tensor is cubical and invariant (within `tol`) under
    /// every permutation of its indices.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool, TensorError> {
        let d = self.order();
        let n = self.shape[0];
        if self.shape.iter().any(|&m| m != n) {
            return Err(TensorError::NotCubical(format!("{:?}", self.shape)));
        }
        let perms = permutations(d);
        let mut permuted = vec![0usize; d];
        for flat in 0..self.num_entries() {
            let idx = self.multi_index(flat);
            let a = self.entries[flat];
            for perm in &perms {
                for (j, &p) in perm.iter().enumerate() {
                    permuted[j] = idx[p];
                }
                let b = self.entry(&permuted);
                if (a - b).norm() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Multilinear matrix action (M₁,…,M_d)·A: contracts mode k with Mₖ
    /// (each matrix is a 2-tensor whose column count equals n_k).
    pub fn multilinear_apply(&self, mats: &[DenseTensor]) -> Result<DenseTensor, TensorError> {
        let d = self.order();
        if mats.len() != d {
            return Err(TensorError::ShapeMismatch(format!(
                "{} matrices supplied for a {d}-tensor",
                mats.len()
            )));
        }
        let mut cur = self.clone();
        for (k, m) in mats.iter().enumerate() {
            if m.order() != 2 {
                return Err(TensorError::ShapeMismatch(format!(
                    "mode-{} operand is a {}-tensor, expected a matrix",
                    k + 1,
                    m.order()
                )));
            }
            let (rows, cols) = (m.shape[0], m.shape[1]);
            if cols != cur.shape[k] {
                return Err(TensorError::ShapeMismatch(format!(
                    "mode-{} matrix has {cols} columns but the mode has dimension {}",
                    k + 1,
                    cur.shape[k]
                )));
            }
            let mut new_shape = cur.shape.clone();
            new_shape[k] = rows;
            let mut out = DenseTensor::zeros(new_shape, cur.field.join(m.field));
            let out_strides = strides(&out.shape);
            for (flat, &z) in cur.entries.iter().enumerate() {
                if z == Scalar::new(0.0, 0.0) {
                    continue;
                }
                let idx = cur.multi_index(flat);
                let base: usize = idx
                    .iter()
                    .enumerate()
                    .filter(|&(m2, _)| m2 != k)
                    .map(|(m2, &i)| i * out_strides[m2])
                    .sum();
                for j in 0..rows {
                    out.entries[base + j * out_strides[k]] +=
                        m.entries[j * cols + idx[k]] * z;
                }
            }
            cur = out;
        }
        Ok(cur)
    }

    /// Entrywise difference A − B.
    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(format!(
                "difference of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            field: self.field.join(other.field),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Entrywise sum A + B.
    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(format!(
                "sum of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            field: self.field.join(other.field),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Scalar multiple s·A.
    pub fn scale(&self, s: Scalar) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            field: if s.im != 0.0 {
                Field::Complex
            } else {
                self.field
            },
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }
}

/// All permutations of 0..d (Heap's algorithm); d is tiny here.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..d).collect();
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    heap(d, &mut a, &mut out);
    out
}

/// Weight λ ≥ 0, unit phase, and unit factor vectors: λ·φ·u₁⊗⋯⊗u_d.
///
/// The constructor canonicalizes: factor norms are absorbed into the weight,
/// factor phases into the phase, and each factor is rotated so its first
/// nonzero entry is real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneTerm {
    weight: f64,
    phase: Scalar,
    factors: Vec<Vec<Scalar>>,
}

impl RankOneTerm {
    pub fn new(
        factors: Vec<Vec<Scalar>>,
        weight: f64,
        phase: Scalar,
    ) -> Result<Self, TensorError> {
        if !weight.is_finite() || !phase.re.is_finite() || !phase.im.is_finite() {
            return Err(TensorError::NonFinite(0));
        }
        let mut total = phase * Scalar::new(weight, 0.0);
        let mut canon = Vec::with_capacity(factors.len());
        for (k, f) in factors.into_iter().enumerate() {
            if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(TensorError::NonFinite(k));
            }
            let norm = vec_norm(&f);
            if norm < EPS_UNIT {
                return Err(TensorError::ZeroFactor(k));
            }
            // Rotate so the first nonzero entry is real ≥ 0.
            let lead = f
                .iter()
                .find(|z| z.norm() > EPS_UNIT * norm)
                .copied()
                .unwrap_or(Scalar::new(1.0, 0.0));
            let rot = lead.conj() / lead.norm();
            total *= norm * lead / lead.norm();
            canon.push(
                f.iter()
                    .map(|z| z * rot / norm)
                    .collect::<Vec<_>>(),
            );
        }
        let weight = total.norm();
        let phase = if weight > 0.0 {
            total / weight
        } else {
            Scalar::new(1.0, 0.0)
        };
        Ok(RankOneTerm {
            weight,
            phase,
            factors: canon,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn phase(&self) -> Scalar {
        self.phase
    }

    pub fn factors(&self) -> &[Vec<Scalar>] {
        &self.factors
    }

    /// Dimensions of the factors, i.e. the shape of the materialized tensor.
    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len()).collect()
    }

    /// True iff the phase and every factor entry have zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.phase.im == 0.0
            && self
                .factors
                .iter()
                .all(|f| f.iter().all(|z| z.im == 0.0))
    }

    /// Materialize λ·φ·u₁⊗⋯⊗u_d as a dense tensor of the given field.
    pub fn to_tensor(&self, field: Field) -> Result<DenseTensor, TensorError> {
        if field == Field::Real && !self.is_real() {
            return Err(TensorError::FieldViolation(
                "complex rank-one term materialized in real mode".into(),
            ));
        }
        let shape = self.shape();
        let mut entries = vec![self.phase * Scalar::new(self.weight, 0.0)];
        for f in &self.factors {
            let mut next = Vec::with_capacity(entries.len() * f.len());
            for e in &entries {
                for x in f {
                    next.push(e * x);
                }
            }
            entries = next;
        }
        DenseTensor::new(shape, field, entries)
    }

    /// ⟨A, u₁⊗⋯⊗u_d⟩ against this term's **unit factors** (weight and phase
    /// ignored). This is the spectral-norm pairing.
    pub fn unit_pairing(&self, a: &DenseTensor) -> Result<Scalar, TensorError> {
        if a.shape() != self.shape().as_slice() {
            return Err(TensorError::ShapeMismatch(format!(
                "pairing of shapes {:?} and {:?}",
                a.shape(),
                self.shape()
            )));
        }
        let mut acc = Scalar::new(0.0, 0.0);
        for (flat, &z) in a.entries().iter().enumerate() {
            if z == Scalar::new(0.0, 0.0) {
                continue;
            }
            let idx = a.multi_index(flat);
            let mut w = Scalar::new(1.0, 0.0);
            for (k, &i) in idx.iter().enumerate() {
                w *= self.factors[k][i];
            }
            acc += z * w.conj();
        }
        Ok(acc)
    }
}

/// Materialize weight·phase·x₁⊗⋯⊗x_d directly from (possibly non-unit)
/// factors. The field is inferred: complex iff any input has a nonzero
/// imaginary part.
pub fn rank_one(
    factors: Vec<Vec<Scalar>>,
    weight: f64,
    phase: Scalar,
) -> Result<DenseTensor, TensorError> {
    let complex = phase.im != 0.0
        || factors
            .iter()
            .any(|f| f.iter().any(|z| z.im != 0.0));
    let term = RankOneTerm::new(factors, weight, phase)?;
    term.to_tensor(if complex { Field::Complex } else { Field::Real })
}

/// A finite list of rank-one terms representing Σᵢ λᵢφᵢ·u₁ᵢ⊗⋯⊗u_dᵢ.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    shape: Vec<usize>,
    field: Field,
    terms: Vec<RankOneTerm>,
}

impl Decomposition {
    pub fn new(
        shape: Vec<usize>,
        field: Field,
        terms: Vec<RankOneTerm>,
    ) -> Result<Self, TensorError> {
        for (i, t) in terms.iter().enumerate() {
            if t.shape() != shape {
                return Err(TensorError::ShapeMismatch(format!(
                    "term {i} has shape {:?}, decomposition has {:?}",
                    t.shape(),
                    shape
                )));
            }
            if field == Field::Real && !t.is_real() {
                return Err(TensorError::FieldViolation(format!(
                    "term {i} is complex in a real decomposition"
                )));
            }
        }
        Ok(Decomposition {
            shape,
            field,
            terms,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σᵢ λᵢ — the decomposition's nuclear cost.
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Σ terms, materialized (the zero tensor for an empty term list).
    pub fn evaluate(&self) -> DenseTensor {
        let mut acc = DenseTensor::zeros(self.shape.clone(), self.field);
        for t in &self.terms {
            // Terms were validated against shape/field at construction.
            let tt = t
                .to_tensor(self.field)
                .expect("validated term materializes");
            acc = acc.add(&tt).expect("validated term shape");
        }
        acc
    }

    /// Certification residual ‖evaluate() − A‖.
    pub fn residual_to(&self, a: &DenseTensor) -> Result<f64, TensorError> {
        Ok(self.evaluate().sub(a)?.hs_norm())
    }

    /// Replace the contents with new terms (used by split/merge utilities).
    pub fn with_terms(&self, terms: Vec<RankOneTerm>) -> Result<Self, TensorError> {
        Decomposition::new(self.shape.clone(), self.field, terms)
    }
}
