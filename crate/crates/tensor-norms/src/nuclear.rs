//! Nuclear-norm estimation for dense tensors.
//!
//! The nuclear norm is the minimum of Σλᵢ over all rank-one expansions
//! A = Σ λᵢ·φᵢ·u₁ᵢ⊗⋯⊗u_dᵢ (λᵢ ≥ 0, |φᵢ| = 1, unit factors). Every explicit
//! decomposition therefore gives an upper bound, and every test tensor B
//! gives the dual lower bound Re⟨A, B⟩ / ‖B‖_σ. This module searches both
//! sides and, when a decomposition pairs uniformly with a witness at the
//! witness's spectral value, certifies that the two sides meet.

use crate::bounds::flattening_bounds;
use crate::linalg::{complex_svd, eig_sym, rmat_of, solve, RMat};
use crate::spectral::{
    self, basis_vector, hopm_run, random_unit, shopm_run, spectral_norm_estimate, sym_pairing,
    SpectralConfig,
};
use crate::tensor::{
    vec_inner, vec_norm, Decomposition, DenseTensor, Field, RankOneTerm, Scalar, TensorError,
    EPS_UNIT,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors reported by the nuclear-norm operations.
#[derive(Debug, Error)]
pub enum NuclearError {
    #[error("dual witness is numerically zero")]
    ZeroWitness,
    #[error("decomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("no rank-{rank} decomposition reached residual {tol:.3e} (best {best:.3e})")]
    NoFit { rank: usize, best: f64, tol: f64 },
    #[error("tensor is not symmetric")]
    NotSymmetric,
    #[error("decomposition factors are not orthonormal")]
    NotOrthogonal,
    #[error("exponent must satisfy p >= 1 (got {0})")]
    BadExponent(f64),
    #[error("term index {index} out of range for {len} terms")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("split multiplicity must be at least 2 (got {0})")]
    BadSplit(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl From<TensorError> for NuclearError {
    fn from(e: TensorError) -> Self {
        NuclearError::Shape(e.to_string())
    }
}

/// Tuning knobs for the decomposition search.
#[derive(Debug, Clone)]
pub struct NuclearConfig {
    /// Independent restarts per fitting rank.
    pub starts: usize,
    /// Alternating-least-squares sweep budget per fitting phase.
    pub max_iters: usize,
    /// Sparsity-annealing rounds (each interleaves shrinkage and refit).
    pub anneal_rounds: usize,
    /// A decomposition is accepted when ‖A − Σ terms‖ falls below this,
    /// relative to max(1, ‖A‖).
    pub residual_tol: f64,
    /// Certification tolerance for pairing defects.
    pub cert_tol: f64,
    /// RNG seed; identical inputs and seeds reproduce identical results.
    pub seed: u64,
    /// Requested base field; joined with the tensor's own field.
    pub field: Field,
    /// Cap on the number of rank-one terms tried by the iterative fitter.
    /// `None` uses `default_r_max`; `Some(0)` disables iterative fitting.
    pub r_max: Option<usize>,
}

impl Default for NuclearConfig {
    fn default() -> Self {
        NuclearConfig {
            starts: 4,
            max_iters: 200,
            anneal_rounds: 16,
            residual_tol: 1e-10,
            cert_tol: 1e-8,
            seed: 0,
            field: Field::Real,
            r_max: None,
        }
    }
}

/// Default cap on decomposition length: 2·(Π nₖ)/max nₖ, clamped to [1, 24].
pub fn default_r_max(shape: &[usize]) -> usize {
    let total: usize = shape.iter().product();
    let maxn = shape.iter().copied().max().unwrap_or(1).max(1);
    (2 * total / maxn).clamp(1, 24)
}

/// Two-sided nuclear-norm certificate: an explicit decomposition whose cost
/// is the upper bound, and a dual witness whose normalized pairing is the
/// lower bound.
#[derive(Debug, Clone)]
pub struct NormCertificate {
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub primal: Decomposition,
    pub dual_witness: DenseTensor,
    /// The spectral value of the witness used to normalize the lower bound.
    pub s_upper: f64,
}

/// Outcome of checking a decomposition/witness pair for exactness.
#[derive(Debug, Clone, Copy)]
pub struct CertResult {
    pub certified: bool,
    /// max over terms of |conj(φᵢ)·⟨B, Uᵢ⟩ − s| where s is the witness's
    /// spectral value.
    pub max_defect: f64,
    /// ‖A − Σ terms‖.
    pub residual: f64,
}

// ---------------------------------------------------------------------------
// Elementary operations on decompositions.
// ---------------------------------------------------------------------------

/// Σ|λᵢ| of an orthonormally decomposable input — its exact nuclear norm.
pub fn odeco_nuclear(d: &Decomposition) -> Result<f64, NuclearError> {
    spectral::check_odeco(d).map_err(|_| NuclearError::NotOrthogonal)?;
    Ok(d.terms().iter().map(|t| t.weight()).sum())
}

/// (Σ λᵢᵖ)^{1/p} over the term weights; p = ∞ gives max λᵢ. Requires p ≥ 1.
pub fn nu_p_objective(d: &Decomposition, p: f64) -> Result<f64, NuclearError> {
    if p.is_nan() || p < 1.0 {
        return Err(NuclearError::BadExponent(p));
    }
    let weights: Vec<f64> = d.terms().iter().map(|t| t.weight()).collect();
    let m = weights.iter().fold(0.0f64, |a, &b| a.max(b));
    if p.is_infinite() || m == 0.0 {
        return Ok(m);
    }
    let s: f64 = weights.iter().map(|w| (w / m).powf(p)).sum();
    Ok(m * s.powf(1.0 / p))
}

/// Replace term `i` by `m` identical copies of weight λᵢ/m. The evaluated
/// tensor and the ν₁ objective are unchanged, while ν_p strictly drops for
/// every p > 1 — repeated splitting drives ν_p toward zero.
pub fn split_term(d: &Decomposition, i: usize, m: usize) -> Result<Decomposition, NuclearError> {
    if i >= d.len() {
        return Err(NuclearError::IndexOutOfRange {
            index: i,
            len: d.len(),
        });
    }
    if m < 2 {
        return Err(NuclearError::BadSplit(m));
    }
    let mut terms = Vec::with_capacity(d.len() + m - 1);
    for (j, t) in d.terms().iter().enumerate() {
        if j == i {
            let part = RankOneTerm::new(t.factors().to_vec(), t.weight() / m as f64, t.phase())?;
            for _ in 0..m {
                terms.push(part.clone());
            }
        } else {
            terms.push(t.clone());
        }
    }
    Ok(d.with_terms(terms)?)
}

/// Dual bound Re⟨A, B⟩ / s_upper. Valid lower bound on ‖A‖_* whenever
/// s_upper ≥ ‖B‖_σ over the field under consideration.
pub fn dual_lower_bound(
    a: &DenseTensor,
    b: &DenseTensor,
    s_upper: f64,
) -> Result<f64, NuclearError> {
    if a.shape() != b.shape() {
        return Err(NuclearError::Shape(format!(
            "tensor shape {:?} vs witness shape {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if b.hs_norm() <= EPS_UNIT || !(s_upper > 0.0) {
        return Err(NuclearError::ZeroWitness);
    }
    Ok(a.inner_product(b)?.re / s_upper)
}

// ---------------------------------------------------------------------------
// Certification.
// ---------------------------------------------------------------------------

/// Spectral value of a witness, corroborated by extra power-iteration runs
/// seeded from the decomposition's own factor tuples.
fn witness_spectral_value(b: &DenseTensor, seeds: Option<&Decomposition>, field: Field) -> f64 {
    let mut cfg = SpectralConfig::default();
    cfg.starts = 24;
    cfg.max_iters = 240;
    cfg.tol = 1e-13;
    cfg.field = field;
    let mut s = spectral_norm_estimate(b, &cfg).value;
    if let Some(d) = seeds {
        for t in d.terms() {
            if t.weight() <= EPS_UNIT {
                continue;
            }
            let (v, _, _, _) = hopm_run(b, t.factors().to_vec(), 160, 1e-13);
            if v > s {
                s = v;
            }
        }
    }
    s
}

/// Check the exactness certificate for cost(D) = ‖A‖_*. Requirements:
/// D reproduces A within `tol`, and every term of D pairs with the witness at
/// a common value equal to the witness's spectral value s. Then
/// ⟨A, B⟩ = cost(D)·s while the dual bound caps ‖A‖_* ≥ ⟨A, B⟩/s, so the
/// decomposition cost is optimal. The defect reported is the worst deviation
/// |conj(φᵢ)·⟨B, Uᵢ⟩ − s| over the terms.
pub fn certify_nuclear_decomposition(
    a: &DenseTensor,
    d: &Decomposition,
    b: &DenseTensor,
    tol: f64,
) -> Result<CertResult, NuclearError> {
    if d.shape() != a.shape() {
        return Err(NuclearError::Shape(format!(
            "decomposition shape {:?} vs tensor shape {:?}",
            d.shape(),
            a.shape()
        )));
    }
    if b.shape() != a.shape() {
        return Err(NuclearError::Shape(format!(
            "witness shape {:?} vs tensor shape {:?}",
            b.shape(),
            a.shape()
        )));
    }
    if b.hs_norm() <= EPS_UNIT {
        return Err(NuclearError::ZeroWitness);
    }
    let residual = d.residual_to(a)?;
    if !(residual <= tol) {
        return Err(NuclearError::ResidualTooLarge { residual, tol });
    }
    let field = a.field().join(d.field()).join(b.field());
    let s = witness_spectral_value(b, Some(d), field);
    if s <= EPS_UNIT {
        return Err(NuclearError::ZeroWitness);
    }
    let mut max_defect = 0.0f64;
    for t in d.terms() {
        if t.weight() <= EPS_UNIT {
            continue;
        }
        let pairing_value = t.phase().conj() * t.unit_pairing(b)?;
        let defect = (pairing_value - Scalar::new(s, 0.0)).norm();
        if defect > max_defect {
            max_defect = defect;
        }
    }
    Ok(CertResult {
        certified: max_defect <= tol,
        max_defect,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Raw CP models: factors[mode][term] with weights absorbed into the vectors.
// ---------------------------------------------------------------------------

type Model = Vec<Vec<Vec<Scalar>>>;

fn model_rank(m: &Model) -> usize {
    m.first().map_or(0, |c| c.len())
}

fn term_entries(shape: &[usize], m: &Model, j: usize) -> Vec<Scalar> {
    let mut cur = vec![Scalar::new(1.0, 0.0)];
    for mk in m.iter().take(shape.len()) {
        let f = &mk[j];
        let mut next = Vec::with_capacity(cur.len() * f.len());
        for c in &cur {
            for x in f {
                next.push(c * x);
            }
        }
        cur = next;
    }
    cur
}

fn model_entries(shape: &[usize], m: &Model) -> Vec<Scalar> {
    let total: usize = shape.iter().product();
    let mut out = vec![Scalar::new(0.0, 0.0); total];
    for j in 0..model_rank(m) {
        for (o, v) in out.iter_mut().zip(term_entries(shape, m, j)) {
            *o += v;
        }
    }
    out
}

fn entries_distance(x: &[Scalar], y: &[Scalar]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Σ over flat indices with index k fixed to each i of
/// entries[idx]·Π_{l≠k} conj(factors[l][term j][idx_l]).
fn contraction_raw(
    shape: &[usize],
    entries: &[Scalar],
    m: &Model,
    j: usize,
    skip: usize,
) -> Vec<Scalar> {
    let d = shape.len();
    let mut out = vec![Scalar::new(0.0, 0.0); shape[skip]];
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    for (flat, &z) in entries.iter().enumerate() {
        if z == Scalar::new(0.0, 0.0) {
            continue;
        }
        let mut w = Scalar::new(1.0, 0.0);
        let mut pos = 0usize;
        let mut rem = flat;
        for k in 0..d {
            let i = rem / strides[k];
            rem %= strides[k];
            if k == skip {
                pos = i;
            } else {
                w *= m[k][j][i].conj();
            }
        }
        out[pos] += z * w;
    }
    out
}

/// Solve H·z = b for Hermitian H (row-major). Real systems stay in real
/// arithmetic so real-field models never pick up imaginary dust.
fn solve_hermitian(h: &[Scalar], n: usize, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let all_real = h.iter().chain(b.iter()).all(|z| z.im == 0.0);
    if all_real {
        let a = RMat {
            m: n,
            n,
            a: h.iter().map(|z| z.re).collect(),
        };
        let rb: Vec<f64> = b.iter().map(|z| z.re).collect();
        let x = solve(&a, &rb)?;
        return Some(x.into_iter().map(|v| Scalar::new(v, 0.0)).collect());
    }
    let mut e = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[i * n + j];
            e.set(i, j, z.re);
            e.set(i, j + n, -z.im);
            e.set(i + n, j, z.im);
            e.set(i + n, j + n, z.re);
        }
    }
    let mut rhs = vec![0.0; 2 * n];
    for (i, z) in b.iter().enumerate() {
        rhs[i] = z.re;
        rhs[i + n] = z.im;
    }
    let x = solve(&e, &rhs)?;
    Some((0..n).map(|i| Scalar::new(x[i], x[i + n])).collect())
}

/// One least-squares refresh of mode k with the other modes fixed.
fn als_update_mode(shape: &[usize], a_entries: &[Scalar], m: &mut Model, k: usize) -> bool {
    let r = model_rank(m);
    if r == 0 {
        return true;
    }
    let d = shape.len();
    let mut h = vec![Scalar::new(1.0, 0.0); r * r];
    for l in 0..d {
        if l == k {
            continue;
        }
        for jp in 0..r {
            for j in 0..r {
                h[jp * r + j] *= vec_inner(&m[l][j], &m[l][jp]);
            }
        }
    }
    let nk = shape[k];
    let mut rhs_rows: Vec<Vec<Scalar>> = Vec::with_capacity(r);
    for j in 0..r {
        rhs_rows.push(contraction_raw(shape, a_entries, m, j, k));
    }
    let scale = h.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    for &mu in &[1e-13, 1e-9, 1e-6] {
        let mut hreg = h.clone();
        for j in 0..r {
            hreg[j * r + j] += Scalar::new(mu * scale, 0.0);
        }
        let mut cols = vec![vec![Scalar::new(0.0, 0.0); nk]; r];
        let mut ok = true;
        for i in 0..nk {
            let b: Vec<Scalar> = (0..r).map(|j| rhs_rows[j][i]).collect();
            match solve_hermitian(&hreg, r, &b) {
                Some(z) => {
                    for j in 0..r {
                        cols[j][i] = z[j];
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for j in 0..r {
                m[k][j] = cols[j].clone();
            }
            return true;
        }
    }
    false
}

/// One pass of group soft-thresholding at level `eps`: each term's mode-k
/// vector is refit against its own residual with an ℓ2 group penalty, which
/// shrinks superfluous terms all the way to zero as eps anneals.
fn l1_sweep(shape: &[usize], a_entries: &[Scalar], m: &mut Model, eps: f64) {
    let d = shape.len();
    let r = model_rank(m);
    let mut eval = model_entries(shape, m);
    for k in 0..d {
        for j in 0..r {
            let old = term_entries(shape, m, j);
            let rj: Vec<Scalar> = a_entries
                .iter()
                .zip(&eval)
                .zip(&old)
                .map(|((a, e), t)| a - e + t)
                .collect();
            let g: f64 = (0..d)
                .filter(|&l| l != k)
                .map(|l| vec_norm(&m[l][j]))
                .product();
            if g <= 1e-200 {
                for x in m[k][j].iter_mut() {
                    *x = Scalar::new(0.0, 0.0);
                }
            } else {
                let w = contraction_raw(shape, &rj, m, j, k);
                let nw = vec_norm(&w);
                let s = (nw - 0.5 * eps * g).max(0.0) / (g * g);
                let f = if nw > 0.0 { s / nw } else { 0.0 };
                for (x, wv) in m[k][j].iter_mut().zip(&w) {
                    *x = wv * f;
                }
            }
            let newt = term_entries(shape, m, j);
            for ((e, o), t) in eval.iter_mut().zip(&old).zip(&newt) {
                *e += t - o;
            }
        }
    }
}

/// Decomposition whose field is as tight as its terms allow.
fn decomposition_of(shape: &[usize], terms: Vec<RankOneTerm>) -> Option<Decomposition> {
    let field = if terms.iter().all(|t| t.is_real()) {
        Field::Real
    } else {
        Field::Complex
    };
    Decomposition::new(shape.to_vec(), field, terms).ok()
}

fn model_decomposition(shape: &[usize], m: &Model, floor: f64) -> Option<Decomposition> {
    let mut terms = Vec::new();
    for j in 0..model_rank(m) {
        let product: f64 = m.iter().map(|c| vec_norm(&c[j])).product();
        if !(product > floor) {
            continue;
        }
        let factors: Vec<Vec<Scalar>> = m.iter().map(|c| c[j].clone()).collect();
        match RankOneTerm::new(factors, 1.0, Scalar::new(1.0, 0.0)) {
            Ok(t) => terms.push(t),
            Err(_) => continue,
        }
    }
    decomposition_of(shape, terms)
}

/// Least-squares coefficients minimizing ‖A − Σ cⱼ·φⱼUⱼ‖ over the phased
/// unit terms of a decomposition.
fn coefficient_fit(a: &DenseTensor, terms: &[RankOneTerm]) -> Option<Vec<Scalar>> {
    let r = terms.len();
    if r == 0 {
        return Some(vec![]);
    }
    let mut g = vec![Scalar::new(0.0, 0.0); r * r];
    for i in 0..r {
        for j in 0..r {
            let mut v = terms[j].phase() * terms[i].phase().conj();
            for k in 0..terms[i].factors().len() {
                v *= vec_inner(&terms[j].factors()[k], &terms[i].factors()[k]);
            }
            g[i * r + j] = v;
        }
    }
    let b: Vec<Scalar> = terms
        .iter()
        .map(|t| t.unit_pairing(a).map(|p| t.phase().conj() * p))
        .collect::<Result<_, _>>()
        .ok()?;
    let scale = g.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    for &mu in &[0.0, 1e-12, 1e-9] {
        let mut greg = g.clone();
        for j in 0..r {
            greg[j * r + j] += Scalar::new(mu * scale, 0.0);
        }
        if let Some(c) = solve_hermitian(&greg, r, &b) {
            return Some(c);
        }
    }
    None
}

fn phase_of(z: Scalar) -> Scalar {
    let n = z.norm();
    if n <= 0.0 {
        Scalar::new(1.0, 0.0)
    } else {
        z / n
    }
}

/// Rebuild terms with new complex coefficients cⱼ·φⱼ·Uⱼ, dropping those
/// below `floor`.
fn reweighted(terms: &[RankOneTerm], c: &[Scalar], floor: f64) -> Vec<RankOneTerm> {
    let mut out = Vec::new();
    for (t, &cj) in terms.iter().zip(c) {
        let w = cj.norm();
        if w <= floor {
            continue;
        }
        if let Ok(nt) = RankOneTerm::new(t.factors().to_vec(), w, t.phase() * phase_of(cj)) {
            out.push(nt);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Structural (non-iterative) decomposition candidates.
// ---------------------------------------------------------------------------

/// One term per nonzero entry: always exact, cost = entrywise ℓ1 norm.
fn entry_decomposition(a: &DenseTensor) -> Option<Decomposition> {
    let mut terms = Vec::new();
    for (flat, &z) in a.entries().iter().enumerate() {
        if z.norm() <= 1e-300 {
            continue;
        }
        let idx = a.multi_index(flat);
        let factors: Vec<Vec<Scalar>> = idx
            .iter()
            .zip(a.shape())
            .map(|(&i, &n)| basis_vector(n, i))
            .collect();
        match RankOneTerm::new(factors, z.norm(), phase_of(z)) {
            Ok(t) => terms.push(t),
            Err(_) => return None,
        }
    }
    decomposition_of(a.shape(), terms)
}

/// Exact SVD expansion of a matrix: cost = Σσᵢ, the true nuclear norm.
fn svd_decomposition(a: &DenseTensor) -> Option<Decomposition> {
    if a.order() != 2 {
        return None;
    }
    let scale = a.hs_norm();
    let mut terms = Vec::new();
    for (sigma, u, v) in complex_svd(a) {
        if sigma <= 1e-14 * scale {
            continue;
        }
        let vbar: Vec<Scalar> = v.iter().map(|z| z.conj()).collect();
        match RankOneTerm::new(vec![u, vbar], sigma, Scalar::new(1.0, 0.0)) {
            Ok(t) => terms.push(t),
            Err(_) => return None,
        }
    }
    decomposition_of(a.shape(), terms)
}

/// Exact decomposition of a 3-tensor from its mode-k flattening: each right
/// singular vector is reshaped over the remaining two modes and split by a
/// second SVD. Total cost is at most √(min other mode-rank)·ν(♭ₖ), matching
/// the flattening-based upper bound on the nuclear norm.
fn flattening_construction(a: &DenseTensor, k0: usize) -> Option<Decomposition> {
    if a.order() != 3 {
        return None;
    }
    let flat = a.flatten(k0 + 1).ok()?;
    let rem: Vec<usize> = (0..3).filter(|&l| l != k0).collect();
    let (n1, n2) = (a.shape()[rem[0]], a.shape()[rem[1]]);
    let scale = a.hs_norm();
    let mut terms = Vec::new();
    for (sigma, u, w) in complex_svd(&flat) {
        if sigma <= 1e-13 * scale {
            continue;
        }
        let ment: Vec<Scalar> = w.iter().map(|z| z.conj()).collect();
        let mfield = if ment.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        let mt = DenseTensor::new(vec![n1, n2], mfield, ment).ok()?;
        for (tau, p, q) in complex_svd(&mt) {
            if tau <= 1e-13 {
                continue;
            }
            let mut factors = vec![Vec::new(); 3];
            factors[k0] = u.clone();
            factors[rem[0]] = p;
            factors[rem[1]] = q.iter().map(|z| z.conj()).collect();
            match RankOneTerm::new(factors, sigma * tau, Scalar::new(1.0, 0.0)) {
                Ok(t) => terms.push(t),
                Err(_) => return None,
            }
        }
    }
    decomposition_of(a.shape(), terms)
}

/// Eigenexpansion of a real symmetric matrix: terms λᵢ·vᵢ⊗vᵢ with sign
/// phases — a symmetric-form decomposition of cost Σ|λᵢ|.
fn eigen_decomposition(a: &DenseTensor) -> Option<Decomposition> {
    if a.order() != 2 || a.field() != Field::Real {
        return None;
    }
    let (vals, vecs) = eig_sym(&rmat_of(a));
    let scale = a.hs_norm();
    let mut terms = Vec::new();
    for (i, &lam) in vals.iter().enumerate() {
        if lam.abs() <= 1e-14 * scale {
            continue;
        }
        let v: Vec<Scalar> = vecs.column(i).iter().map(|&x| Scalar::new(x, 0.0)).collect();
        let t = RankOneTerm::new(
            vec![v.clone(), v],
            lam.abs(),
            Scalar::new(lam.signum(), 0.0),
        )
        .ok()?;
        terms.push(t);
    }
    decomposition_of(a.shape(), terms)
}

// ---------------------------------------------------------------------------
// Dual witnesses.
// ---------------------------------------------------------------------------

/// Collapse negligible imaginary dust so genuinely real tensors stay in real
/// mode (the witness's field participates in downstream field joins).
fn tidy_tensor(shape: Vec<usize>, mut entries: Vec<Scalar>) -> Option<DenseTensor> {
    let scale = entries.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let imax = entries.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if imax <= 1e-12 * scale.max(1e-300) {
        for z in entries.iter_mut() {
            z.im = 0.0;
        }
        DenseTensor::new(shape, Field::Real, entries).ok()
    } else {
        DenseTensor::new(shape, Field::Complex, entries).ok()
    }
}

fn unit_term_entries(t: &RankOneTerm) -> Vec<Scalar> {
    let mut cur = vec![t.phase()];
    for f in t.factors() {
        let mut next = Vec::with_capacity(cur.len() * f.len());
        for c in &cur {
            for x in f {
                next.push(c * x);
            }
        }
        cur = next;
    }
    cur
}

/// Interpolating witness W = Σ cⱼ·φⱼUⱼ chosen so conj(φᵢ)·⟨W, Uᵢ⟩ = 1 for
/// every term. For a nuclear-minimal decomposition, W/‖W‖_σ is exactly the
/// dual witness that certifies optimality.
fn interpolation_witness(d: &Decomposition) -> Option<DenseTensor> {
    let terms: Vec<&RankOneTerm> = d
        .terms()
        .iter()
        .filter(|t| t.weight() > EPS_UNIT)
        .collect();
    let r = terms.len();
    if r == 0 || r > 64 {
        return None;
    }
    let mut g = vec![Scalar::new(0.0, 0.0); r * r];
    for i in 0..r {
        for j in 0..r {
            let mut v = terms[j].phase() * terms[i].phase().conj();
            for k in 0..terms[i].factors().len() {
                v *= vec_inner(&terms[j].factors()[k], &terms[i].factors()[k]);
            }
            g[i * r + j] = v;
        }
    }
    let ones = vec![Scalar::new(1.0, 0.0); r];
    let c = solve_hermitian(&g, r, &ones).unwrap_or(ones);
    let shape = d.shape().to_vec();
    let total: usize = shape.iter().product();
    let mut entries = vec![Scalar::new(0.0, 0.0); total];
    for (t, &cj) in terms.iter().zip(&c) {
        for (e, v) in entries.iter_mut().zip(unit_term_entries(t)) {
            *e += cj * v;
        }
    }
    tidy_tensor(shape, entries)
}

/// Matrix witness Σ uᵢvᵢᴴ over the nonzero singular triples: its spectral
/// norm is exactly 1 and ⟨A, W⟩ = Σσᵢ, so the dual bound is tight.
fn unitary_witness(a: &DenseTensor) -> Option<DenseTensor> {
    if a.order() != 2 {
        return None;
    }
    let (mrows, ncols) = (a.shape()[0], a.shape()[1]);
    let scale = a.hs_norm();
    let mut entries = vec![Scalar::new(0.0, 0.0); mrows * ncols];
    for (sigma, u, v) in complex_svd(a) {
        if sigma <= 1e-14 * scale {
            continue;
        }
        for i in 0..mrows {
            for j in 0..ncols {
                entries[i * ncols + j] += u[i] * v[j].conj();
            }
        }
    }
    tidy_tensor(a.shape().to_vec(), entries)
}

/// Rotate a witness by a unit scalar so its pairing with A is real positive.
fn phase_aligned(a: &DenseTensor, w: &DenseTensor) -> DenseTensor {
    if let Ok(z) = a.inner_product(w) {
        let n = z.norm();
        if n > 0.0 && z.re < n * (1.0 - 1e-15) {
            let p = z / n;
            let entries: Vec<Scalar> = w.entries().iter().map(|e| e * p).collect();
            if let Some(t) = tidy_tensor(w.shape().to_vec(), entries) {
                return t;
            }
        }
    }
    w.clone()
}

/// Certified upper bound on ‖W‖_σ over either field: the smallest flattening
/// spectral norm (or the Hilbert–Schmidt norm as a fallback).
fn sigma_upper_of(w: &DenseTensor) -> f64 {
    if w.order() == 1 {
        return w.hs_norm();
    }
    match flattening_bounds(w) {
        Ok(rep) => rep.sigma_upper.min(w.hs_norm()),
        Err(_) => w.hs_norm(),
    }
}

// ---------------------------------------------------------------------------
// Iterative fitting.
// ---------------------------------------------------------------------------

struct FitReport {
    outcome: Option<(Decomposition, f64)>, // (decomposition, residual)
    best_residual: f64,
}

fn consider(
    a: &DenseTensor,
    dec: Option<Decomposition>,
    rtol: f64,
    best: &mut Option<(Decomposition, f64)>,
    best_residual: &mut f64,
) {
    let Some(dec) = dec else { return };
    let Ok(res) = dec.residual_to(a) else { return };
    if res < *best_residual {
        *best_residual = res;
    }
    if res <= rtol {
        let cost = dec.cost();
        if best.as_ref().map_or(true, |(b, _)| cost < b.cost()) {
            *best = Some((dec, res));
        }
    }
}

/// Polished variant of a model: unit-normalize the terms and refit the
/// coefficients jointly, which both tightens the residual and removes any
/// cost hidden in near-duplicate terms.
fn polished_decomposition(a: &DenseTensor, m: &Model, floor: f64) -> Option<Decomposition> {
    let dec = model_decomposition(a.shape(), m, floor)?;
    let c = coefficient_fit(a, dec.terms())?;
    let terms = reweighted(dec.terms(), &c, floor);
    decomposition_of(a.shape(), terms)
}

fn init_model(
    a: &DenseTensor,
    r: usize,
    field: Field,
    rng: &mut ChaCha8Rng,
    variant: usize,
) -> Model {
    let shape = a.shape();
    let d = shape.len();
    let scale = a.hs_norm();
    let mut m: Model = vec![Vec::with_capacity(r); d];
    if variant == 0 {
        // Deterministic start: one term per largest-magnitude entry.
        let mut order: Vec<usize> = (0..a.num_entries()).collect();
        order.sort_by(|&x, &y| {
            a.entries()[y]
                .norm()
                .partial_cmp(&a.entries()[x].norm())
                .unwrap()
        });
        for j in 0..r {
            let flat = order[j % order.len()];
            let z = a.entries()[flat];
            let idx = a.multi_index(flat);
            let amp = z.norm().max(1e-3 * scale).powf(1.0 / d as f64);
            for (k, &i) in idx.iter().enumerate() {
                let mut f = basis_vector(shape[k], i);
                for x in f.iter_mut() {
                    *x *= amp;
                }
                if k == 0 {
                    let ph = phase_of(z);
                    for x in f.iter_mut() {
                        *x *= ph;
                    }
                }
                m[k].push(f);
            }
        }
    } else {
        let amp = (scale / (r as f64).sqrt()).powf(1.0 / d as f64);
        for k in 0..d {
            for _ in 0..r {
                let mut f = random_unit(rng, shape[k], field);
                for x in f.iter_mut() {
                    *x *= amp;
                }
                m[k].push(f);
            }
        }
    }
    m
}

/// Search for a rank-≤r decomposition: plain alternating least squares to
/// drive the residual down, then annealed group-shrinkage sweeps to strip
/// cost out of the representation, with joint coefficient polish throughout.
fn fit_rank(a: &DenseTensor, r: usize, field: Field, cfg: &NuclearConfig, salt: u64) -> FitReport {
    let shape = a.shape().to_vec();
    let d = shape.len();
    let scale = a.hs_norm();
    let mut report = FitReport {
        outcome: None,
        best_residual: f64::INFINITY,
    };
    if r == 0 || scale <= 0.0 {
        return report;
    }
    let a_entries = a.entries();
    let rtol = cfg.residual_tol * scale.max(1.0);
    let floor = 1e-14 * scale;
    let mut best: Option<(Decomposition, f64)> = None;

    for start in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed
                ^ salt
                ^ ((r as u64) << 24)
                ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut m = init_model(a, r, field, &mut rng, start);
        // Phase 1: plain ALS.
        let mut prev = f64::INFINITY;
        let mut stall = 0;
        for _ in 0..cfg.max_iters {
            for k in 0..d {
                als_update_mode(&shape, a_entries, &mut m, k);
            }
            let res = entries_distance(&model_entries(&shape, &m), a_entries);
            if res <= 0.2 * rtol {
                break;
            }
            if res > 0.999 * prev {
                stall += 1;
                if stall >= 10 {
                    break;
                }
            } else {
                stall = 0;
            }
            prev = res;
        }
        consider(
            a,
            model_decomposition(&shape, &m, floor),
            rtol,
            &mut best,
            &mut report.best_residual,
        );
        consider(
            a,
            polished_decomposition(a, &m, floor),
            rtol,
            &mut best,
            &mut report.best_residual,
        );
        // Phase 2: annealed shrinkage.
        let eps0 = 0.35 * scale;
        for round in 0..cfg.anneal_rounds {
            let eps = eps0 * 0.62f64.powi(round as i32);
            l1_sweep(&shape, a_entries, &mut m, eps);
            for _ in 0..2 {
                for k in 0..d {
                    als_update_mode(&shape, a_entries, &mut m, k);
                }
            }
            consider(
                a,
                polished_decomposition(a, &m, floor),
                rtol,
                &mut best,
                &mut report.best_residual,
            );
        }
        // Phase 3: repair sweeps at zero shrinkage.
        for _ in 0..24 {
            for k in 0..d {
                als_update_mode(&shape, a_entries, &mut m, k);
            }
        }
        consider(
            a,
            model_decomposition(&shape, &m, floor),
            rtol,
            &mut best,
            &mut report.best_residual,
        );
        consider(
            a,
            polished_decomposition(a, &m, floor),
            rtol,
            &mut best,
            &mut report.best_residual,
        );
    }
    report.outcome = best;
    report
}

// ---------------------------------------------------------------------------
// Symmetric fitting: terms c·y^{⊗d} only.
// ---------------------------------------------------------------------------

fn raw_tensor(shape: &[usize], entries: Vec<Scalar>) -> Option<DenseTensor> {
    let field = if entries.iter().all(|z| z.im == 0.0) {
        Field::Real
    } else {
        Field::Complex
    };
    DenseTensor::new(shape.to_vec(), field, entries).ok()
}

fn sym_term_entries(d: usize, y: &[Scalar], c: Scalar) -> Vec<Scalar> {
    let mut cur = vec![c];
    for _ in 0..d {
        let mut next = Vec::with_capacity(cur.len() * y.len());
        for e in &cur {
            for x in y {
                next.push(e * x);
            }
        }
        cur = next;
    }
    cur
}

fn soft_threshold(g: Scalar, eps: f64, field: Field) -> Scalar {
    match field {
        Field::Real => {
            let t = g.re;
            let s = (t.abs() - eps).max(0.0) * t.signum();
            Scalar::new(s, 0.0)
        }
        Field::Complex => {
            let n = g.norm();
            if n <= eps {
                Scalar::new(0.0, 0.0)
            } else {
                g * ((n - eps) / n)
            }
        }
    }
}

/// Symmetric-form decomposition search: greedy deflation for an initial
/// term set, then block-coordinate refinement of each direction with an
/// annealed shrinkage on the coefficients, and a joint coefficient refit.
fn fit_symmetric_rank(
    a: &DenseTensor,
    r: usize,
    field: Field,
    cfg: &NuclearConfig,
    salt: u64,
) -> FitReport {
    let shape = a.shape().to_vec();
    let d = a.order();
    let n = shape[0];
    let scale = a.hs_norm();
    let mut report = FitReport {
        outcome: None,
        best_residual: f64::INFINITY,
    };
    if r == 0 || scale <= 0.0 {
        return report;
    }
    let rtol = cfg.residual_tol * scale.max(1.0);
    let mut best: Option<(Decomposition, f64)> = None;

    let build = |ys: &[Vec<Scalar>], cs: &[Scalar]| -> Option<Decomposition> {
        let mut terms = Vec::new();
        for (y, &c) in ys.iter().zip(cs) {
            let w = c.norm();
            if w <= 1e-13 * scale || vec_norm(y) <= EPS_UNIT {
                continue;
            }
            let t = RankOneTerm::new(vec![y.clone(); d], w, phase_of(c)).ok()?;
            terms.push(t);
        }
        decomposition_of(&shape, terms)
    };

    for start in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed
                ^ salt
                ^ ((r as u64) << 16)
                ^ (start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        // Greedy deflation initialization.
        let mut ys: Vec<Vec<Scalar>> = Vec::with_capacity(r);
        let mut cs: Vec<Scalar> = Vec::with_capacity(r);
        let mut resid = a.entries().to_vec();
        for _ in 0..r {
            let rt = match raw_tensor(&shape, resid.clone()) {
                Some(t) => t,
                None => break,
            };
            let mut bestv = -1.0;
            let mut besty = basis_vector(n, 0);
            for t in 0..4 {
                let y0 = if t == 0 {
                    besty.clone()
                } else {
                    random_unit(&mut rng, n, field)
                };
                let (v, y, _, _) = shopm_run(&rt, y0, field, 80, 1e-12);
                if v > bestv {
                    bestv = v;
                    besty = y;
                }
            }
            let g = sym_pairing(&rt, &besty);
            for (e, tv) in resid.iter_mut().zip(sym_term_entries(d, &besty, g)) {
                *e -= tv;
            }
            ys.push(besty);
            cs.push(g);
        }
        consider(a, build(&ys, &cs), rtol, &mut best, &mut report.best_residual);

        // Annealed block-coordinate refinement.
        let mut eval = vec![Scalar::new(0.0, 0.0); a.num_entries()];
        for (y, &c) in ys.iter().zip(&cs) {
            for (e, tv) in eval.iter_mut().zip(sym_term_entries(d, y, c)) {
                *e += tv;
            }
        }
        let eps0 = 0.3 * scale;
        let rounds = cfg.anneal_rounds.max(12);
        for round in 0..rounds {
            let eps = eps0 * 0.6f64.powi(round as i32);
            for j in 0..ys.len() {
                let old = sym_term_entries(d, &ys[j], cs[j]);
                let rj: Vec<Scalar> = a
                    .entries()
                    .iter()
                    .zip(&eval)
                    .zip(&old)
                    .map(|((av, e), t)| av - e + t)
                    .collect();
                let rjt = match raw_tensor(&shape, rj) {
                    Some(t) => t,
                    None => continue,
                };
                let y0 = if vec_norm(&ys[j]) > 0.5 {
                    ys[j].clone()
                } else {
                    random_unit(&mut rng, n, field)
                };
                let (_, y, _, _) = shopm_run(&rjt, y0, field, 8, 1e-13);
                let g = sym_pairing(&rjt, &y);
                let c = soft_threshold(g, eps, field);
                let newt = sym_term_entries(d, &y, c);
                for ((e, o), t) in eval.iter_mut().zip(&old).zip(&newt) {
                    *e += t - o;
                }
                ys[j] = y;
                cs[j] = c;
            }
            if round % 4 == 3 {
                consider(a, build(&ys, &cs), rtol, &mut best, &mut report.best_residual);
            }
        }
        // Joint coefficient refit at zero shrinkage, then a final sharpening
        // pass over the directions.
        for _ in 0..3 {
            let mut g = vec![Scalar::new(0.0, 0.0); ys.len() * ys.len()];
            let mut b = vec![Scalar::new(0.0, 0.0); ys.len()];
            for i in 0..ys.len() {
                for j in 0..ys.len() {
                    let ip = vec_inner(&ys[j], &ys[i]);
                    g[i * ys.len() + j] = ip.powu(d as u32);
                }
                b[i] = sym_pairing(a, &ys[i]);
            }
            if let Some(c) = solve_hermitian(&g, ys.len(), &b) {
                let keep = if field == Field::Real {
                    c.iter().map(|z| Scalar::new(z.re, 0.0)).collect()
                } else {
                    c
                };
                cs = keep;
            }
            eval = vec![Scalar::new(0.0, 0.0); a.num_entries()];
            for (y, &c) in ys.iter().zip(&cs) {
                for (e, tv) in eval.iter_mut().zip(sym_term_entries(d, y, c)) {
                    *e += tv;
                }
            }
            consider(a, build(&ys, &cs), rtol, &mut best, &mut report.best_residual);
            for j in 0..ys.len() {
                let old = sym_term_entries(d, &ys[j], cs[j]);
                let rj: Vec<Scalar> = a
                    .entries()
                    .iter()
                    .zip(&eval)
                    .zip(&old)
                    .map(|((av, e), t)| av - e + t)
                    .collect();
                let rjt = match raw_tensor(&shape, rj) {
                    Some(t) => t,
                    None => continue,
                };
                let (_, y, _, _) = shopm_run(&rjt, ys[j].clone(), field, 20, 1e-14);
                let g = sym_pairing(&rjt, &y);
                let newt = sym_term_entries(d, &y, g);
                for ((e, o), t) in eval.iter_mut().zip(&old).zip(&newt) {
                    *e += t - o;
                }
                ys[j] = y;
                cs[j] = g;
            }
            consider(a, build(&ys, &cs), rtol, &mut best, &mut report.best_residual);
        }
    }
    report.outcome = best;
    report
}

fn binom(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    let mut out: u128 = 1;
    for i in 1..=k {
        out = out * (n - k + i) as u128 / i as u128;
    }
    out.min(usize::MAX as u128) as usize
}

// ---------------------------------------------------------------------------
// Top-level estimates.
// ---------------------------------------------------------------------------

/// Rank-capped upper bound: the cheapest decomposition with at most `r`
/// terms that reproduces A within the residual tolerance, along with its
/// cost. Fails with `NoFit` when no candidate reaches the tolerance.
pub fn nuclear_upper_bound(
    a: &DenseTensor,
    r: usize,
    cfg: &NuclearConfig,
) -> Result<(Decomposition, f64), NuclearError> {
    let field = a.field().join(cfg.field);
    let scale = a.hs_norm();
    let rtol = cfg.residual_tol * scale.max(1.0);
    if scale <= EPS_UNIT {
        let dec = Decomposition::new(a.shape().to_vec(), field, vec![])?;
        return Ok((dec, 0.0));
    }
    let mut best: Option<(Decomposition, f64)> = None;
    let mut best_residual = f64::INFINITY;
    let mut admit = |dec: Option<Decomposition>| {
        let Some(dec) = dec else { return };
        if dec.len() > r {
            return;
        }
        let Ok(res) = dec.residual_to(a) else { return };
        if res < best_residual {
            best_residual = res;
        }
        if res <= rtol {
            let cost = dec.cost();
            if best.as_ref().map_or(true, |(b, _)| cost < b.cost()) {
                best = Some((dec, res));
            }
        }
    };
    admit(entry_decomposition(a));
    admit(svd_decomposition(a));
    admit(eigen_decomposition(a));
    for k in 0..3 {
        admit(flattening_construction(a, k));
    }
    if r >= 1 {
        let rep = fit_rank(a, r, field, cfg, 0x41);
        if rep.best_residual < best_residual {
            best_residual = rep.best_residual;
        }
        if let Some((dec, res)) = rep.outcome {
            if res <= rtol {
                let cost = dec.cost();
                if best.as_ref().map_or(true, |(b, _)| cost < b.cost()) {
                    best = Some((dec, res));
                }
            }
        }
        if a.is_symmetric(1e-10).unwrap_or(false) {
            let rep = fit_symmetric_rank(a, r, field, cfg, 0x53);
            if rep.best_residual < best_residual {
                best_residual = rep.best_residual;
            }
            if let Some((dec, res)) = rep.outcome {
                if res <= rtol {
                    let cost = dec.cost();
                    if best.as_ref().map_or(true, |(b, _)| cost < b.cost()) {
                        best = Some((dec, res));
                    }
                }
            }
        }
    }
    match best {
        Some((dec, _)) => {
            let cost = dec.cost();
            Ok((dec, cost))
        }
        None => Err(NuclearError::NoFit {
            rank: r,
            best: best_residual,
            tol: rtol,
        }),
    }
}

/// Shared assembly: given candidate decompositions, compute the best upper
/// bound, hunt for dual witnesses, attempt exact certification, and return
/// the two-sided certificate.
fn assemble_certificate(
    a: &DenseTensor,
    field: Field,
    candidates: Vec<Decomposition>,
    cfg: &NuclearConfig,
    floor: f64,
) -> Result<NormCertificate, NuclearError> {
    let scale = a.hs_norm();
    let rtol = cfg.residual_tol * scale.max(1.0);
    let mut scored: Vec<(f64, Decomposition)> = Vec::new();
    for dec in candidates {
        if let Ok(res) = dec.residual_to(a) {
            if res <= rtol {
                scored.push((dec.cost(), dec));
            }
        }
    }
    if scored.is_empty() {
        return Err(NuclearError::NoFit {
            rank: 0,
            best: f64::INFINITY,
            tol: rtol,
        });
    }
    scored.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let upper = scored[0].0;

    // Witness pool: interpolants of the cheapest decompositions, plus the
    // phase-aligned tensor itself, plus the unitary witness for matrices.
    let mut witnesses: Vec<DenseTensor> = Vec::new();
    if let Some(w) = unitary_witness(a) {
        witnesses.push(w);
    }
    for (_, dec) in scored.iter().take(4) {
        if let Some(w) = interpolation_witness(dec) {
            witnesses.push(phase_aligned(a, &w));
        }
    }
    witnesses.push(phase_aligned(a, a));

    let mut lower = floor.min(upper);
    let mut chosen: Option<(DenseTensor, f64)> = None; // (witness, s_upper)
    for w in &witnesses {
        let su = sigma_upper_of(w);
        if su <= EPS_UNIT {
            continue;
        }
        if let Ok(v) = dual_lower_bound(a, w, su) {
            let v = v.min(upper);
            if v > lower {
                lower = v;
                chosen = Some((w.clone(), su));
            }
        }
    }

    // Exact certification: the cheapest decompositions against the witness
    // pool. Success pins the lower bound to the decomposition cost.
    'cert: for (cost, dec) in scored.iter().take(3) {
        for w in &witnesses {
            match certify_nuclear_decomposition(a, dec, w, cfg.cert_tol) {
                Ok(c) if c.certified => {
                    let s = witness_spectral_value(w, Some(dec), field);
                    if *cost > lower {
                        lower = (*cost).min(upper);
                    }
                    chosen = Some((w.clone(), s));
                    break 'cert;
                }
                _ => {}
            }
        }
    }

    let (dual_witness, s_upper) = match chosen {
        Some((w, s)) => (w, s),
        None => {
            let w = phase_aligned(a, a);
            let s = sigma_upper_of(&w);
            (w, s)
        }
    };
    let primal = scored.into_iter().next().unwrap().1;
    Ok(NormCertificate {
        lower,
        upper,
        gap: (upper - lower).max(0.0),
        primal,
        dual_witness,
        s_upper,
    })
}

fn trivial_certificate(a: &DenseTensor, field: Field) -> Result<NormCertificate, NuclearError> {
    let shape = a.shape().to_vec();
    if a.order() == 1 {
        let norm = a.hs_norm();
        if norm > EPS_UNIT {
            // ‖a‖_* = ‖a‖₂ for vectors; a is its own witness.
            let t = RankOneTerm::new(vec![a.entries().to_vec()], 1.0, Scalar::new(1.0, 0.0))?;
            let primal = Decomposition::new(shape, field, vec![t])?;
            return Ok(NormCertificate {
                lower: norm,
                upper: norm,
                gap: 0.0,
                primal,
                dual_witness: a.clone(),
                s_upper: norm,
            });
        }
    }
    let primal = Decomposition::new(shape.clone(), field, vec![])?;
    Ok(NormCertificate {
        lower: 0.0,
        upper: 0.0,
        gap: 0.0,
        primal,
        dual_witness: DenseTensor::zeros(shape, field),
        s_upper: 0.0,
    })
}

/// Two-sided nuclear-norm estimate over the joined field of the tensor and
/// the configuration. The upper bound is the cost of the best decomposition
/// found (structural constructions plus an iterative search over a ladder of
/// ranks); the lower bound is the best of the flattening bound and dual
/// witness pairings, upgraded to the decomposition cost itself whenever an
/// exactness certificate passes.
pub fn nuclear_norm_estimate(
    a: &DenseTensor,
    cfg: &NuclearConfig,
) -> Result<NormCertificate, NuclearError> {
    let field = a.field().join(cfg.field);
    let scale = a.hs_norm();
    if scale <= EPS_UNIT || a.order() == 1 {
        return trivial_certificate(a, field);
    }
    let floor = match flattening_bounds(a) {
        Ok(rep) => rep.nuclear_lower,
        Err(_) => scale,
    };
    let rtol = cfg.residual_tol * scale.max(1.0);
    let gap_done = 1e-8 * scale.max(1.0);

    let mut candidates: Vec<Decomposition> = Vec::new();
    if let Some(d) = entry_decomposition(a) {
        candidates.push(d);
    }
    if let Some(d) = svd_decomposition(a) {
        candidates.push(d);
    }
    if let Some(d) = eigen_decomposition(a) {
        candidates.push(d);
    }
    for k in 0..3 {
        if let Some(d) = flattening_construction(a, k) {
            candidates.push(d);
        }
    }

    // Round 1: structural candidates only. Many instances certify here.
    let first = assemble_certificate(a, field, candidates.clone(), cfg, floor)?;
    if first.gap <= gap_done {
        return Ok(first);
    }

    // Round 2: iterative fits over a rank ladder, then reassemble.
    let rmax = cfg.r_max.unwrap_or_else(|| default_r_max(a.shape()));
    let ladder: Vec<usize> = [1usize, 2, 3, 4, 6, 8, 12, 16, 20, 24]
        .iter()
        .copied()
        .filter(|&x| x <= rmax)
        .collect();
    let symmetric = a.is_symmetric(1e-10).unwrap_or(false);
    let mut best_fit_cost = f64::INFINITY;
    let mut stale = 0usize;
    for &r in &ladder {
        let rep = fit_rank(a, r, field, cfg, 0x11);
        if let Some((dec, res)) = rep.outcome {
            if res <= rtol {
                let cost = dec.cost();
                candidates.push(dec);
                if cost < best_fit_cost - 1e-12 * scale.max(1.0) {
                    best_fit_cost = cost;
                    stale = 0;
                } else {
                    stale += 1;
                }
                if best_fit_cost <= floor + gap_done || stale >= 2 {
                    break;
                }
                continue;
            }
        }
        // No acceptable fit at this rank: only stop once fits were found.
        if best_fit_cost.is_finite() {
            stale += 1;
            if stale >= 2 {
                break;
            }
        }
    }
    if symmetric {
        let n = a.shape()[0];
        let cap = (1 + binom(n + a.order() - 1, a.order())).min(rmax.max(1));
        for r in 1..=cap {
            let rep = fit_symmetric_rank(a, r, field, cfg, 0x29);
            if let Some((dec, res)) = rep.outcome {
                if res <= rtol {
                    candidates.push(dec);
                }
            }
        }
    }
    let refined = assemble_certificate(a, field, candidates, cfg, floor)?;
    Ok(refined)
}

/// Nuclear-norm estimate restricted to symmetric-form decompositions
/// (every term a multiple of y^{⊗d}). Rejects non-symmetric input. The
/// term-count cap is 1 + C(n+d−1, d), enough for any symmetric tensor.
pub fn symmetric_nuclear_estimate(
    a: &DenseTensor,
    cfg: &NuclearConfig,
) -> Result<NormCertificate, NuclearError> {
    if !a.is_symmetric(1e-10).map_err(|_| NuclearError::NotSymmetric)? {
        return Err(NuclearError::NotSymmetric);
    }
    let field = a.field().join(cfg.field);
    let scale = a.hs_norm();
    if scale <= EPS_UNIT || a.order() == 1 {
        return trivial_certificate(a, field);
    }
    let floor = match flattening_bounds(a) {
        Ok(rep) => rep.nuclear_lower,
        Err(_) => scale,
    };
    let gap_done = 1e-8 * scale.max(1.0);
    let rtol = cfg.residual_tol * scale.max(1.0);

    let mut candidates: Vec<Decomposition> = Vec::new();
    if let Some(d) = eigen_decomposition(a) {
        candidates.push(d);
    }
    let n = a.shape()[0];
    let d = a.order();
    let spec_cap = 1 + binom(n + d - 1, d);
    let cap = cfg.r_max.map_or(spec_cap, |r| r.min(spec_cap)).max(1);
    let mut best_cost = f64::INFINITY;
    for r in 1..=cap {
        let rep = fit_symmetric_rank(a, r, field, cfg, 0x71);
        if let Some((dec, res)) = rep.outcome {
            if res <= rtol {
                let cost = dec.cost();
                candidates.push(dec);
                if cost < best_cost {
                    best_cost = cost;
                }
                if best_cost <= floor + gap_done {
                    break;
                }
            }
        }
    }
    assemble_certificate(a, field, candidates, cfg, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{tensor_b, tensor_c};
    use crate::tensor::rank_one;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn e(n: usize, i: usize) -> Vec<Scalar> {
        basis_vector(n, i)
    }

    /// Decomposition of the sign tensor with entries ±1/2: one basis term
    /// per nonzero entry. Cost 2.
    fn entry_terms_of_b() -> Decomposition {
        entry_decomposition(&tensor_b()).unwrap()
    }

    /// The scaled witness with ±1 entries matching the sign pattern above.
    fn doubled_b() -> DenseTensor {
        let b = tensor_b();
        let entries: Vec<Scalar> = b.entries().iter().map(|z| z * 2.0).collect();
        DenseTensor::new(vec![2, 2, 2], Field::Real, entries).unwrap()
    }

    #[test]
    fn nu_p_objective_interpolates_between_sum_and_max() {
        let t1 = RankOneTerm::new(vec![e(2, 0); 3], 3.0, Scalar::new(1.0, 0.0)).unwrap();
        let t2 = RankOneTerm::new(vec![e(2, 1); 3], 4.0, Scalar::new(1.0, 0.0)).unwrap();
        let d = Decomposition::new(vec![2, 2, 2], Field::Real, vec![t1, t2]).unwrap();
        assert_abs_diff_eq!(nu_p_objective(&d, 1.0).unwrap(), 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nu_p_objective(&d, 2.0).unwrap(), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            nu_p_objective(&d, f64::INFINITY).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            nu_p_objective(&d, 0.5),
            Err(NuclearError::BadExponent(_))
        ));
    }

    #[test]
    fn split_term_preserves_tensor_and_shrinks_higher_objectives() {
        let t = RankOneTerm::new(vec![e(2, 0); 3], 3.0, Scalar::new(1.0, 0.0)).unwrap();
        let d = Decomposition::new(vec![2, 2, 2], Field::Real, vec![t]).unwrap();
        let s = split_term(&d, 0, 3).unwrap();
        assert_eq!(s.len(), 3);
        assert_abs_diff_eq!(
            s.evaluate().inner_product(&d.evaluate()).unwrap().re,
            9.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(nu_p_objective(&s, 1.0).unwrap(), 3.0, epsilon = 1e-12);
        // ν₂ drops from 3 to √3.
        assert_abs_diff_eq!(
            nu_p_objective(&s, 2.0).unwrap(),
            3.0_f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(
            split_term(&d, 5, 2),
            Err(NuclearError::IndexOutOfRange { .. })
        ));
        assert!(matches!(split_term(&d, 0, 1), Err(NuclearError::BadSplit(1))));
    }

    #[test]
    fn odeco_nuclear_sums_weights_and_rejects_skew_factors() {
        let t1 = RankOneTerm::new(
            vec![e(2, 0), e(2, 0), e(2, 0)],
            2.0,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        let t2 = RankOneTerm::new(
            vec![e(2, 1), e(2, 1), e(2, 1)],
            1.5,
            Scalar::new(-1.0, 0.0),
        )
        .unwrap();
        let d = Decomposition::new(vec![2, 2, 2], Field::Real, vec![t1.clone(), t2]).unwrap();
        assert_abs_diff_eq!(odeco_nuclear(&d).unwrap(), 3.5, epsilon = 1e-12);
        let skew = RankOneTerm::new(
            vec![
                vec![Scalar::new(FRAC_1_SQRT_2, 0.0), Scalar::new(FRAC_1_SQRT_2, 0.0)],
                e(2, 0),
                e(2, 0),
            ],
            1.0,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        let bad = Decomposition::new(vec![2, 2, 2], Field::Real, vec![t1, skew]).unwrap();
        assert!(matches!(
            odeco_nuclear(&bad),
            Err(NuclearError::NotOrthogonal)
        ));
    }

    #[test]
    fn dual_lower_bound_matches_hand_computation() {
        // ⟨C, Y⟩ = 3·(1/√3) = √3 against the ±1 sign witness with spectral
        // value 1 over the reals.
        let c = tensor_c();
        let y = doubled_b();
        let v = dual_lower_bound(&c, &y, 1.0).unwrap();
        assert_abs_diff_eq!(v, 3.0_f64.sqrt(), epsilon = 1e-12);
        let zero = DenseTensor::zeros(vec![2, 2, 2], Field::Real);
        assert!(matches!(
            dual_lower_bound(&c, &zero, 1.0),
            Err(NuclearError::ZeroWitness)
        ));
    }

    #[test]
    fn certifies_entrywise_decomposition_with_sign_witness() {
        let b = tensor_b();
        let dec = entry_terms_of_b();
        assert_abs_diff_eq!(dec.cost(), 2.0, epsilon = 1e-12);
        let y = doubled_b();
        let res = certify_nuclear_decomposition(&b, &dec, &y, 1e-8).unwrap();
        assert!(res.certified);
        assert!(res.max_defect <= 1e-10);
        assert!(res.residual <= 1e-14);
    }

    #[test]
    fn certificate_is_field_sensitive() {
        // Over the reals the tensor certifies itself (every unit pairing hits
        // the real spectral value 1/2). Over the complexes the spectral value
        // rises to 1/√2 and the same pairings leave a visible defect.
        let b = tensor_b();
        let dec = entry_terms_of_b();
        let res = certify_nuclear_decomposition(&b, &dec, &b, 1e-8).unwrap();
        assert!(res.certified);
        let mut complex_dec_terms = dec.terms().to_vec();
        // Rebuild the same decomposition marked complex to force the join.
        for t in complex_dec_terms.iter_mut() {
            let mut f = t.factors().to_vec();
            f[0][0] += Scalar::new(0.0, 0.0);
            *t = RankOneTerm::new(f, t.weight(), t.phase()).unwrap();
        }
        let bc = tensor_b().to_complex();
        let res_c = certify_nuclear_decomposition(&bc, &dec, &bc, 1e-8).unwrap();
        assert!(!res_c.certified);
        assert!(res_c.max_defect > 0.1);
    }

    #[test]
    fn certify_rejects_wrong_tensor_or_zero_witness() {
        let b = tensor_b();
        let c = tensor_c();
        let dec = entry_terms_of_b();
        assert!(matches!(
            certify_nuclear_decomposition(&c, &dec, &b, 1e-8),
            Err(NuclearError::ResidualTooLarge { .. })
        ));
        let zero = DenseTensor::zeros(vec![2, 2, 2], Field::Real);
        assert!(matches!(
            certify_nuclear_decomposition(&b, &dec, &zero, 1e-8),
            Err(NuclearError::ZeroWitness)
        ));
    }

    #[test]
    fn upper_bound_recovers_unit_rank_one() {
        let t = rank_one(
            vec![
                vec![Scalar::new(0.6, 0.0), Scalar::new(0.8, 0.0)],
                e(2, 0),
                e(2, 1),
            ],
            2.5,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        let cfg = NuclearConfig::default();
        let (dec, cost) = nuclear_upper_bound(&t, 1, &cfg).unwrap();
        assert_eq!(dec.len(), 1);
        assert_abs_diff_eq!(cost, 2.5, epsilon = 1e-8);
    }

    #[test]
    fn upper_bound_respects_rank_cap() {
        // The sign tensor has real rank 3; rank 1 cannot reproduce it.
        let b = tensor_b();
        let cfg = NuclearConfig::default();
        assert!(matches!(
            nuclear_upper_bound(&b, 1, &cfg),
            Err(NuclearError::NoFit { rank: 1, .. })
        ));
    }

    #[test]
    fn upper_bound_finds_orthonormal_complex_pair() {
        // Over the complexes the sign tensor splits into two orthonormal
        // cubes with total cost √2.
        let b = tensor_b();
        let mut cfg = NuclearConfig::default();
        cfg.field = Field::Complex;
        cfg.starts = 6;
        let (dec, cost) = nuclear_upper_bound(&b, 2, &cfg).unwrap();
        assert!(dec.len() <= 2);
        assert_abs_diff_eq!(cost, SQRT_2, epsilon = 1e-7);
    }

    #[test]
    fn upper_bound_uses_entry_terms_at_rank_three() {
        let c = tensor_c();
        let cfg = NuclearConfig::default();
        let (_, cost) = nuclear_upper_bound(&c, 3, &cfg).unwrap();
        assert_abs_diff_eq!(cost, 3.0_f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn estimate_certifies_sign_tensor_over_reals() {
        let b = tensor_b();
        let cert = nuclear_norm_estimate(&b, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cert.lower, 2.0, epsilon = 1e-9);
        assert!(cert.gap <= 2e-6);
        assert_abs_diff_eq!(cert.s_upper, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn estimate_certifies_sign_tensor_over_complexes() {
        let b = tensor_b();
        let mut cfg = NuclearConfig::default();
        cfg.field = Field::Complex;
        let cert = nuclear_norm_estimate(&b, &cfg).unwrap();
        assert_abs_diff_eq!(cert.upper, SQRT_2, epsilon = 1e-6);
        assert!(cert.gap <= 2e-6);
    }

    #[test]
    fn estimate_certifies_three_term_tensor_over_reals() {
        let c = tensor_c();
        let cert = nuclear_norm_estimate(&c, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, 3.0_f64.sqrt(), epsilon = 1e-9);
        assert!(cert.gap <= 2e-6, "gap {} too large", cert.gap);
    }

    #[test]
    fn estimate_certifies_three_term_tensor_over_complexes() {
        let c = tensor_c();
        let mut cfg = NuclearConfig::default();
        cfg.field = Field::Complex;
        let cert = nuclear_norm_estimate(&c, &cfg).unwrap();
        assert_abs_diff_eq!(cert.upper, 1.5, epsilon = 1e-6);
        assert!(cert.gap <= 2e-6, "gap {} too large", cert.gap);
    }

    #[test]
    fn matrix_estimate_matches_singular_value_sum() {
        let t = DenseTensor::new(
            vec![2, 2],
            Field::Real,
            vec![
                Scalar::new(1.0, 0.0),
                Scalar::new(2.0, 0.0),
                Scalar::new(3.0, 0.0),
                Scalar::new(4.0, 0.0),
            ],
        )
        .unwrap();
        let svs = crate::linalg::matrix_singular_values(&t);
        let want: f64 = svs.iter().sum();
        let cert = nuclear_norm_estimate(&t, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, want, epsilon = 1e-9);
        assert!(cert.gap <= 1e-8);
    }

    #[test]
    fn vector_and_zero_inputs_are_exact() {
        let v = DenseTensor::new(
            vec![2],
            Field::Real,
            vec![Scalar::new(3.0, 0.0), Scalar::new(4.0, 0.0)],
        )
        .unwrap();
        let cert = nuclear_norm_estimate(&v, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cert.gap, 0.0, epsilon = 1e-12);
        let z = DenseTensor::zeros(vec![2, 2, 2], Field::Real);
        let zc = nuclear_norm_estimate(&z, &NuclearConfig::default()).unwrap();
        assert_eq!(zc.upper, 0.0);
        assert_eq!(zc.lower, 0.0);
        assert!(zc.primal.is_empty());
    }

    #[test]
    fn symmetric_estimate_requires_symmetry() {
        let t = rank_one(
            vec![e(2, 0), e(2, 1), e(2, 0)],
            1.0,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            symmetric_nuclear_estimate(&t, &NuclearConfig::default()),
            Err(NuclearError::NotSymmetric)
        ));
    }

    #[test]
    fn symmetric_matrix_estimate_uses_eigen_expansion() {
        let t = DenseTensor::new(
            vec![2, 2],
            Field::Real,
            vec![
                Scalar::new(3.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(-2.0, 0.0),
            ],
        )
        .unwrap();
        let cert = symmetric_nuclear_estimate(&t, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, 5.0, epsilon = 1e-9);
        assert!(cert.gap <= 1e-7);
    }

    #[test]
    fn symmetric_estimate_matches_general_value_for_sign_tensor() {
        // The symmetric-form optimum for the sign tensor equals the general
        // one over both fields.
        let b = tensor_b();
        let cert = symmetric_nuclear_estimate(&b, &NuclearConfig::default()).unwrap();
        assert_abs_diff_eq!(cert.upper, 2.0, epsilon = 1e-7);
        assert!(cert.gap <= 2e-6, "gap {} too large", cert.gap);
        let mut cfg = NuclearConfig::default();
        cfg.field = Field::Complex;
        let cc = symmetric_nuclear_estimate(&b, &cfg).unwrap();
        assert_abs_diff_eq!(cc.upper, SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn interpolation_witness_recovers_sign_pattern() {
        // Basis terms are orthonormal, so the interpolant is the plain sum
        // of the phased unit terms: the ±1 sign tensor.
        let dec = entry_terms_of_b();
        let w = interpolation_witness(&dec).unwrap();
        let y = doubled_b();
        let diff = entries_distance(w.entries(), y.entries());
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-10);
        assert_eq!(w.field(), Field::Real);
    }

    #[test]
    fn flattening_construction_is_exact_and_cost_bounded() {
        let c = tensor_c();
        for k in 0..3 {
            let dec = flattening_construction(&c, k).unwrap();
            assert!(dec.residual_to(&c).unwrap() <= 1e-12);
            let rep = flattening_bounds(&c).unwrap();
            assert!(dec.cost() <= rep.nuclear_upper + 1e-9);
        }
    }

    #[test]
    fn estimate_stays_inside_flattening_interval_on_random_input() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let entries: Vec<Scalar> = (0..27)
                .map(|_| Scalar::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect();
            let t = DenseTensor::new(vec![3, 3, 3], Field::Real, entries).unwrap();
            let rep = flattening_bounds(&t).unwrap();
            let mut cfg = NuclearConfig::default();
            cfg.r_max = Some(2);
            cfg.starts = 2;
            cfg.max_iters = 40;
            cfg.anneal_rounds = 6;
            let cert = nuclear_norm_estimate(&t, &cfg).unwrap();
            assert!(cert.lower >= rep.nuclear_lower - 1e-9);
            assert!(cert.upper <= rep.nuclear_upper + 1e-9);
            assert!(cert.lower <= cert.upper + 1e-12);
        }
    }
}
