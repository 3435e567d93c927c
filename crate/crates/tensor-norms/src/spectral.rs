//! Spectral-norm estimation.
//!
//! The spectral norm ‖A‖_σ = max |⟨A, u₁⊗⋯⊗u_d⟩| over unit vectors is
//! NP-hard in general, so this module computes certified *lower* bounds by
//! multi-start alternating maximization (higher-order power iteration), plus
//! exact closed forms for orthogonally decomposable inputs, a specialization
//! for partially-symmetric PSD 4-tensors where the alternation is provably
//! exact over ℂ, and a brute-force grid oracle for 2×2×2 tensors used as an
//! independent check in tests.
//!
//! Every estimate satisfies `value == |⟨A, maximizer⟩|` with unit factors, so
//! validity as a lower bound never depends on convergence.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{cholesky_psd, matrix_top_triple, RMat};
use crate::tensor::{vec_inner, vec_norm, DenseTensor, Decomposition, Field, RankOneTerm, Scalar, TensorError, EPS_UNIT};

/// Knobs for the iterative estimators. `field` selects the base field the
/// maximization runs over; a complex input tensor always forces ℂ.
#[derive(Debug, Clone)]
pub struct SpectralConfig {
    /// Number of starting points (structured starts first, seeded random fill).
    pub starts: usize,
    /// Maximum alternating sweeps per start.
    pub max_iters: usize,
    /// Relative objective-change stopping threshold.
    pub tol: f64,
    /// RNG seed; identical seeds give identical results.
    pub seed: u64,
    /// Base field to optimize over (ignored in favor of ℂ for complex input).
    pub field: Field,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            starts: 64,
            max_iters: 500,
            tol: 1e-12,
            seed: 0,
            field: Field::Real,
        }
    }
}

impl SpectralConfig {
    /// The field the optimization actually runs over for tensor `a`.
    pub fn effective_field(&self, a: &DenseTensor) -> Field {
        a.field().join(self.field)
    }
}

/// Result of a spectral estimation run. `value` is always a valid lower
/// bound on ‖A‖_σ over the effective field, attained by `maximizer`.
#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    pub value: f64,
    pub maximizer: RankOneTerm,
    pub converged: bool,
    pub iterations_used: usize,
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("tensor is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("factors are not orthonormal per mode: {0}")]
    NotOrthogonal(String),
    #[error("tensor is not bi-positive-semidefinite: {0}")]
    NotBiPSD(String),
    #[error("unsupported shape for the grid oracle: {0}")]
    UnsupportedShape(String),
}

// ---------------------------------------------------------------------------
// Shared contraction helpers.
// ---------------------------------------------------------------------------

/// ⟨A, x₁⊗⋯⊗x_d⟩ = Σ a_idx · conj(Π x_k[i_k]).
pub(crate) fn pairing(a: &DenseTensor, factors: &[Vec<Scalar>]) -> Scalar {
    let mut acc = Scalar::new(0.0, 0.0);
    for (flat, &z) in a.entries().iter().enumerate() {
        if z.re == 0.0 && z.im == 0.0 {
            continue;
        }
        let idx = a.multi_index(flat);
        let mut w = Scalar::new(1.0, 0.0);
        for (k, &i) in idx.iter().enumerate() {
            w *= factors[k][i];
        }
        acc += z * w.conj();
    }
    acc
}

/// Contraction of A against every factor except mode `skip`:
/// c_j = Σ_{idx with idx[skip]=j} a_idx · Π_{l≠skip} conj(x_l[i_l]).
/// With unit factors, setting x_skip = c/‖c‖ maximizes |⟨A, ⊗x⟩| over that
/// block and the pairing becomes the real number ‖c‖.
pub(crate) fn partial_contraction(
    a: &DenseTensor,
    factors: &[Vec<Scalar>],
    skip: usize,
) -> Vec<Scalar> {
    let n_skip = a.shape()[skip];
    let mut c = vec![Scalar::new(0.0, 0.0); n_skip];
    for (flat, &z) in a.entries().iter().enumerate() {
        if z.re == 0.0 && z.im == 0.0 {
            continue;
        }
        let idx = a.multi_index(flat);
        let mut w = Scalar::new(1.0, 0.0);
        for (l, &i) in idx.iter().enumerate() {
            if l != skip {
                w *= factors[l][i];
            }
        }
        c[idx[skip]] += z * w.conj();
    }
    c
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize, field: Field) -> Vec<Scalar> {
    loop {
        let v: Vec<Scalar> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = match field {
                    Field::Real => 0.0,
                    Field::Complex => rng.sample(StandardNormal),
                };
                Scalar::new(re, im)
            })
            .collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.iter().map(|z| z / norm).collect();
        }
    }
}

pub(crate) fn basis_vector(n: usize, i: usize) -> Vec<Scalar> {
    let mut e = vec![Scalar::new(0.0, 0.0); n];
    e[i] = Scalar::new(1.0, 0.0);
    e
}

pub(crate) fn normalized(v: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = vec_norm(v);
    if n > EPS_UNIT {
        Some(v.iter().map(|z| z / n).collect())
    } else {
        None
    }
}

/// Structured starting tuples: the largest-entry basis tuple, plus flattening
/// starts. For 3-tensors each mode contributes a "sandwich" start whose
/// initial objective already equals σ_max of the residual matrix M_k =
/// reshape(flattenₖᵀ·conj(u_k)) — at least the mode-k flattening spectral
/// norm divided by √(rank of the complementary unfolding), so power iteration
/// can only improve on the polynomial-time flattening lower bound.
fn structured_starts(a: &DenseTensor) -> Vec<Vec<Vec<Scalar>>> {
    let d = a.order();
    let shape = a.shape().to_vec();
    let mut out: Vec<Vec<Vec<Scalar>>> = Vec::new();

    // Largest-magnitude entry → basis tuple.
    if let Some((flat, _)) = a
        .entries()
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.norm().partial_cmp(&y.norm()).unwrap())
    {
        if a.entries()[flat].norm() > 0.0 {
            let idx = a.multi_index(flat);
            out.push(
                idx.iter()
                    .enumerate()
                    .map(|(k, &i)| basis_vector(shape[k], i))
                    .collect(),
            );
        }
    }

    match d {
        2 => {
            let (s, u, v) = matrix_top_triple(a);
            if s > 0.0 {
                let vb: Vec<Scalar> = v.iter().map(|z| z.conj()).collect();
                out.push(vec![u, vb]);
            }
        }
        3 => {
            for mode in 1..=3 {
                if let Some(start) = sandwich_start(a, mode) {
                    out.push(start);
                }
            }
        }
        d2 if d2 >= 4 => {
            // HOSVD-style start: dominant left singular vector per mode.
            let mut tuple = Vec::with_capacity(d);
            let mut ok = true;
            for mode in 1..=d {
                let flat = a.flatten(mode).expect("mode in range");
                let (s, u, _) = matrix_top_triple(&flat);
                if s <= 0.0 {
                    ok = false;
                    break;
                }
                tuple.push(u);
            }
            if ok {
                out.push(tuple);
            }
        }
        _ => {}
    }
    out
}

/// The mode-k sandwich start for a 3-tensor (see `structured_starts`).
fn sandwich_start(a: &DenseTensor, mode: usize) -> Option<Vec<Vec<Scalar>>> {
    let d = a.order();
    debug_assert_eq!(d, 3);
    let flat = a.flatten(mode).ok()?;
    let (s, u, _) = matrix_top_triple(&flat);
    if s <= EPS_UNIT {
        return None;
    }
    // m_col = Σ_i conj(u_i)·flat[i, col], reshaped over the remaining modes.
    let rem: Vec<usize> = (0..d).filter(|&k| k != mode - 1).collect();
    let (ra, rb) = (a.shape()[rem[0]], a.shape()[rem[1]]);
    let rows = flat.shape()[0];
    let cols = flat.shape()[1];
    let mut m = vec![Scalar::new(0.0, 0.0); cols];
    for i in 0..rows {
        let ui = u[i].conj();
        if ui.norm() == 0.0 {
            continue;
        }
        for (c, slot) in m.iter_mut().enumerate() {
            *slot += ui * flat.entry(&[i, c]);
        }
    }
    let mt = DenseTensor::new(vec![ra, rb], Field::Complex, m).ok()?;
    let (t, p, q) = matrix_top_triple(&mt);
    if t <= EPS_UNIT {
        return None;
    }
    let qc: Vec<Scalar> = q.iter().map(|z| z.conj()).collect();
    let mut factors = vec![Vec::new(), Vec::new(), Vec::new()];
    factors[mode - 1] = u;
    factors[rem[0]] = p;
    factors[rem[1]] = qc;
    Some(factors)
}

/// Force a factor tuple onto the requested field (drops imaginary parts and
/// renormalizes; used to keep real-mode runs real when a structured start
/// came back complex from the embedding SVD).
fn project_to_field(tuple: Vec<Vec<Scalar>>, field: Field) -> Option<Vec<Vec<Scalar>>> {
    if field == Field::Complex {
        return Some(tuple);
    }
    let mut out = Vec::with_capacity(tuple.len());
    for f in tuple {
        let re: Vec<Scalar> = f.iter().map(|z| Scalar::new(z.re, 0.0)).collect();
        out.push(normalized(&re)?);
    }
    Some(out)
}

/// One multi-start-able power-iteration run. Returns the best objective seen
/// (monotone in exact arithmetic; tracked defensively), its factors, whether
/// the stopping rule fired, and sweeps used.
pub(crate) fn hopm_run(
    a: &DenseTensor,
    mut factors: Vec<Vec<Scalar>>,
    max_iters: usize,
    tol: f64,
) -> (f64, Vec<Vec<Scalar>>, bool, usize) {
    let d = a.order();
    let mut best_val = pairing(a, &factors).norm();
    let mut best_factors = factors.clone();
    let mut prev = best_val;
    let mut converged = false;
    let mut iters = 0;
    for it in 0..max_iters {
        iters = it + 1;
        let mut last = prev;
        for k in 0..d {
            let c = partial_contraction(a, &factors, k);
            let nc = vec_norm(&c);
            if nc > EPS_UNIT {
                factors[k] = c.iter().map(|z| z / nc).collect();
                last = nc;
            }
        }
        if last > best_val {
            best_val = last;
            best_factors = factors.clone();
        }
        if (last - prev).abs() <= tol * last.abs().max(1.0) {
            converged = true;
            break;
        }
        prev = last;
    }
    (best_val, best_factors, converged, iters)
}

fn zero_estimate(a: &DenseTensor) -> SpectralEstimate {
    let factors: Vec<Vec<Scalar>> = a.shape().iter().map(|&n| basis_vector(n, 0)).collect();
    SpectralEstimate {
        value: 0.0,
        maximizer: RankOneTerm::new(factors, 1.0, Scalar::new(1.0, 0.0))
            .expect("basis factors are unit"),
        converged: true,
        iterations_used: 0,
    }
}

fn finish_estimate(
    a: &DenseTensor,
    factors: Vec<Vec<Scalar>>,
    converged: bool,
    iterations_used: usize,
) -> SpectralEstimate {
    let maximizer = RankOneTerm::new(factors, 1.0, Scalar::new(1.0, 0.0))
        .expect("maximizer factors are unit vectors");
    let value = maximizer
        .unit_pairing(a)
        .expect("maximizer has the tensor's shape")
        .norm();
    SpectralEstimate {
        value,
        maximizer,
        converged,
        iterations_used,
    }
}

/// Multi-start higher-order power iteration. The returned value is a valid
/// lower bound on ‖A‖ over the effective field (ℂ whenever the input or the
/// config says so), deterministic in `cfg.seed`.
pub fn spectral_norm_estimate(a: &DenseTensor, cfg: &SpectralConfig) -> SpectralEstimate {
    let field = cfg.effective_field(a);
    if a.hs_norm() == 0.0 {
        return zero_estimate(a);
    }
    let want = cfg.starts.max(1);
    let mut starts: Vec<Vec<Vec<Scalar>>> = structured_starts(a)
        .into_iter()
        .filter_map(|t| project_to_field(t, field))
        .collect();
    starts.truncate(want);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < want {
        starts.push(
            a.shape()
                .iter()
                .map(|&n| random_unit(&mut rng, n, field))
                .collect(),
        );
    }
    let mut best: Option<(f64, Vec<Vec<Scalar>>, bool, usize)> = None;
    for tuple in starts {
        let run = hopm_run(a, tuple, cfg.max_iters, cfg.tol);
        if best.as_ref().map_or(true, |b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (_, factors, converged, iters) = best.expect("at least one start");
    finish_estimate(a, factors, converged, iters)
}

// ---------------------------------------------------------------------------
// Symmetric (single-vector) estimation.
// ---------------------------------------------------------------------------

pub(crate) fn sym_pairing(a: &DenseTensor, x: &[Scalar]) -> Scalar {
    let d = a.order();
    let factors: Vec<Vec<Scalar>> = (0..d).map(|_| x.to_vec()).collect();
    pairing(a, &factors)
}

/// Rotate x by a d-th root of the pairing's phase so ⟨A, x^{⊗d}⟩ ≥ 0; over ℝ
/// with odd d this is the sign flip, and over ℝ with even d the sign cannot
/// be moved into x, so the caller keeps working with |f| directly.
fn phase_align(a: &DenseTensor, x: &mut [Scalar], field: Field) {
    let d = a.order() as f64;
    let f = sym_pairing(a, x);
    if f.norm() <= EPS_UNIT {
        return;
    }
    match field {
        Field::Complex => {
            let p = Scalar::from_polar(1.0, f.arg() / d);
            for z in x.iter_mut() {
                *z *= p;
            }
        }
        Field::Real => {
            if f.re < 0.0 && (a.order() % 2 == 1) {
                for z in x.iter_mut() {
                    *z = -*z;
                }
            }
        }
    }
}

/// Shifted symmetric power iteration maximizing |⟨A, x^{⊗d}⟩| over unit x.
/// Plain updates can oscillate, so each step retries with growing shifts
/// α·x added to the contraction until the objective does not decrease.
pub(crate) fn shopm_run(
    a: &DenseTensor,
    mut x: Vec<Scalar>,
    field: Field,
    max_iters: usize,
    tol: f64,
) -> (f64, Vec<Scalar>, bool, usize) {
    let d = a.order();
    let scale = a.hs_norm();
    phase_align(a, &mut x, field);
    let mut f = sym_pairing(a, &x).norm();
    let mut best = f;
    let mut best_x = x.clone();
    let mut converged = false;
    let mut iters = 0;
    for it in 0..max_iters {
        iters = it + 1;
        let factors: Vec<Vec<Scalar>> = (0..d).map(|_| x.to_vec()).collect();
        let c = partial_contraction(a, &factors, d - 1);
        // Ascent direction for |f|: the contraction, sign-corrected when the
        // pairing is negative real and the sign cannot be absorbed into x.
        let fc = sym_pairing(a, &x);
        let dir: Vec<Scalar> = if field == Field::Real && fc.re < 0.0 {
            c.iter().map(|z| -z).collect()
        } else {
            c.clone()
        };
        let mut accepted = false;
        for shift_pow in 0..9 {
            let alpha = if shift_pow == 0 {
                0.0
            } else {
                scale * (1 << (shift_pow - 1)) as f64 * 0.25
            };
            let z: Vec<Scalar> = dir
                .iter()
                .zip(&x)
                .map(|(ci, xi)| ci + xi * Scalar::new(alpha, 0.0))
                .collect();
            let Some(mut cand) = normalized(&z) else {
                continue;
            };
            phase_align(a, &mut cand, field);
            let fcand = sym_pairing(a, &cand).norm();
            if fcand >= f - 1e-15 * scale {
                x = cand;
                let prev = f;
                f = fcand;
                if f > best {
                    best = f;
                    best_x = x.clone();
                }
                accepted = true;
                if (f - prev).abs() <= tol * f.abs().max(1.0) {
                    converged = true;
                }
                break;
            }
        }
        if !accepted || converged {
            converged = converged || !accepted;
            break;
        }
    }
    (best, best_x, converged, iters)
}

/// Maximizes |⟨A, x^{⊗d}⟩| over unit x for symmetric A. The supremum equals
/// the unconstrained spectral norm, so agreement with
/// `spectral_norm_estimate` is a useful cross-check.
pub fn symmetric_spectral_estimate(
    a: &DenseTensor,
    cfg: &SpectralConfig,
) -> Result<SpectralEstimate, SpectralError> {
    match a.is_symmetric(1e-10) {
        Ok(true) => {}
        Ok(false) => {
            return Err(SpectralError::NotSymmetric(
                "entries change under index permutation".into(),
            ))
        }
        Err(TensorError::NotCubical(s)) => return Err(SpectralError::NotSymmetric(s)),
        Err(e) => return Err(SpectralError::NotSymmetric(e.to_string())),
    }
    let field = cfg.effective_field(a);
    if a.hs_norm() == 0.0 {
        return Ok(zero_estimate(a));
    }
    let n = a.shape()[0];
    let d = a.order();
    let want = cfg.starts.max(1);
    // Structured single-vector starts: each factor of each structured tuple.
    let mut starts: Vec<Vec<Scalar>> = Vec::new();
    for tuple in structured_starts(a) {
        for f in tuple {
            if let Some(t) = project_to_field(vec![f], field) {
                starts.push(t.into_iter().next().unwrap());
            }
        }
    }
    starts.dedup_by(|x, y| {
        x.iter()
            .zip(y.iter())
            .all(|(p, q)| (p - q).norm() < 1e-12)
    });
    starts.truncate(want);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < want {
        starts.push(random_unit(&mut rng, n, field));
    }
    let mut best: Option<(f64, Vec<Scalar>, bool, usize)> = None;
    for x in starts {
        let run = shopm_run(a, x, field, cfg.max_iters, cfg.tol);
        if best.as_ref().map_or(true, |b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (_, x, converged, iters) = best.expect("at least one start");
    let factors: Vec<Vec<Scalar>> = (0..d).map(|_| x.clone()).collect();
    Ok(finish_estimate(a, factors, converged, iters))
}

// ---------------------------------------------------------------------------
// Orthogonally decomposable closed form.
// ---------------------------------------------------------------------------

/// Exact spectral norm of an orthogonally decomposable tensor: max |λᵢ|.
/// Factors must be orthonormal within 1e−10 in every mode.
pub fn odeco_spectral(d: &Decomposition) -> Result<f64, SpectralError> {
    check_odeco(d)?;
    Ok(d.terms()
        .iter()
        .map(RankOneTerm::weight)
        .fold(0.0, f64::max))
}

pub(crate) fn check_odeco(d: &Decomposition) -> Result<(), SpectralError> {
    let terms = d.terms();
    if terms.is_empty() {
        return Ok(());
    }
    let order = terms[0].factors().len();
    for k in 0..order {
        for i in 0..terms.len() {
            let fi = &terms[i].factors()[k];
            let nrm = vec_norm(fi);
            if (nrm - 1.0).abs() > 1e-10 {
                return Err(SpectralError::NotOrthogonal(format!(
                    "mode {} factor {} has norm {:.3e}",
                    k + 1,
                    i,
                    nrm
                )));
            }
            for j in 0..i {
                let g = vec_inner(fi, &terms[j].factors()[k]).norm();
                if g > 1e-10 {
                    return Err(SpectralError::NotOrthogonal(format!(
                        "mode {} factors {} and {} have |⟨·,·⟩| = {:.3e}",
                        k + 1,
                        j,
                        i,
                        g
                    )));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Partially-symmetric PSD 4-tensors.
// ---------------------------------------------------------------------------

/// Matricization of an m×n×m×n tensor into an mn×mn matrix with row (i,j)
/// and column (k,l), both row-major. Returns `None` for other shapes.
pub(crate) fn bi_matricization(a: &DenseTensor) -> Option<DenseTensor> {
    let s = a.shape();
    if s.len() != 4 || s[0] != s[2] || s[1] != s[3] {
        return None;
    }
    let (m, n) = (s[0], s[1]);
    let mn = m * n;
    let mut entries = vec![Scalar::new(0.0, 0.0); mn * mn];
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    entries[(i * n + j) * mn + (k * n + l)] = a.entry(&[i, j, k, l]);
                }
            }
        }
    }
    DenseTensor::new(vec![mn, mn], a.field(), entries).ok()
}

/// True iff the matricization is Hermitian and PSD within `tol` (absolute,
/// relative to the Frobenius scale).
pub(crate) fn bi_psd_ok(m: &DenseTensor, tol: f64) -> bool {
    let mn = m.shape()[0];
    let scale = m.hs_norm().max(1.0);
    for r in 0..mn {
        for c in 0..r + 1 {
            let dlt = (m.entry(&[r, c]) - m.entry(&[c, r]).conj()).norm();
            if dlt > tol * scale {
                return false;
            }
        }
    }
    let shift = tol * scale;
    match m.field() {
        Field::Real => cholesky_psd(&crate::linalg::rmat_of(m), shift),
        Field::Complex => cholesky_psd(&crate::linalg::embedding_of(m), shift),
    }
}

/// Compression Q(y)_{ik} = Σ_{j,l} conj(y_j)·M[(i,j),(k,l)]·y_l — Hermitian
/// PSD whenever M is, with λ_max(Q(y)) = max_x ⟨A, x⊗y⊗x̄⊗ȳ⟩ at unit x.
fn compress_first(m: &DenseTensor, dims: (usize, usize), y: &[Scalar]) -> DenseTensor {
    let (mm, nn) = dims;
    let mn = mm * nn;
    let mut q = vec![Scalar::new(0.0, 0.0); mm * mm];
    for i in 0..mm {
        for k in 0..mm {
            let mut acc = Scalar::new(0.0, 0.0);
            for j in 0..nn {
                let yj = y[j].conj();
                if yj.norm() == 0.0 {
                    continue;
                }
                for l in 0..nn {
                    acc += yj * m.entries()[(i * nn + j) * mn + (k * nn + l)] * y[l];
                }
            }
            q[i * mm + k] = acc;
        }
    }
    DenseTensor::new(vec![mm, mm], Field::Complex, q).expect("finite compression")
}

fn compress_second(m: &DenseTensor, dims: (usize, usize), x: &[Scalar]) -> DenseTensor {
    let (mm, nn) = dims;
    let mn = mm * nn;
    let mut q = vec![Scalar::new(0.0, 0.0); nn * nn];
    for j in 0..nn {
        for l in 0..nn {
            let mut acc = Scalar::new(0.0, 0.0);
            for i in 0..mm {
                let xi = x[i].conj();
                if xi.norm() == 0.0 {
                    continue;
                }
                for k in 0..mm {
                    acc += xi * m.entries()[(i * nn + j) * mn + (k * nn + l)] * x[k];
                }
            }
            q[j * nn + l] = acc;
        }
    }
    DenseTensor::new(vec![nn, nn], Field::Complex, q).expect("finite compression")
}

fn top_eigvec_psd(q: &DenseTensor) -> (f64, Vec<Scalar>) {
    // For Hermitian PSD matrices the top singular triple is (λ_max, v, v).
    let (s, _, v) = matrix_top_triple(q);
    (s, v)
}

/// Spectral estimate for A ∈ 𝔽^{m×n×m×n} with Hermitian PSD matricization.
/// For such tensors ‖A‖_{σ,ℂ} = max ⟨A, x⊗y⊗x̄⊗ȳ⟩ over unit x, y, and
/// alternating on x and y solves each block exactly (top eigenvector of a
/// PSD compression), so the objective is monotone.
pub fn bipsd_spectral_estimate(
    a: &DenseTensor,
    cfg: &SpectralConfig,
) -> Result<SpectralEstimate, SpectralError> {
    let m = bi_matricization(a).ok_or_else(|| {
        SpectralError::NotBiPSD(format!("shape {:?} is not m×n×m×n", a.shape()))
    })?;
    if !bi_psd_ok(&m, 1e-8) {
        return Err(SpectralError::NotBiPSD(
            "matricization is not Hermitian PSD within tolerance".into(),
        ));
    }
    if a.hs_norm() == 0.0 {
        return Ok(zero_estimate(a));
    }
    let dims = (a.shape()[0], a.shape()[1]);
    let field = cfg.effective_field(a);
    let want = cfg.starts.max(1);
    let mut ys: Vec<Vec<Scalar>> = Vec::new();
    // Uniform start (optimal for clique tensors on the clique's support).
    ys.push(normalized(&vec![Scalar::new(1.0, 0.0); dims.1]).expect("n ≥ 1"));
    // Top singular pair of the reshaped dominant eigenvector of M.
    {
        let (_, _, z) = matrix_top_triple(&m);
        if let Ok(zt) = DenseTensor::new(vec![dims.0, dims.1], Field::Complex, z) {
            let (s, _, y0) = matrix_top_triple(&zt);
            if s > EPS_UNIT {
                ys.push(y0);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    ys.truncate(want);
    while ys.len() < want {
        ys.push(random_unit(&mut rng, dims.1, field));
    }
    let ys: Vec<Vec<Scalar>> = ys
        .into_iter()
        .filter_map(|y| project_to_field(vec![y], field).map(|t| t.into_iter().next().unwrap()))
        .collect();

    let mut best: Option<(f64, Vec<Scalar>, Vec<Scalar>, bool, usize)> = None;
    for y0 in ys {
        let mut y = y0;
        let mut x = vec![Scalar::new(0.0, 0.0); dims.0];
        let mut val = 0.0;
        let mut prev = -1.0;
        let mut converged = false;
        let mut iters = 0;
        for it in 0..cfg.max_iters {
            iters = it + 1;
            let (vx, xv) = top_eigvec_psd(&compress_first(&m, dims, &y));
            x = xv;
            let (vy, yv) = top_eigvec_psd(&compress_second(&m, dims, &x));
            y = yv;
            val = vy.max(vx);
            if (val - prev).abs() <= cfg.tol * val.abs().max(1.0) {
                converged = true;
                break;
            }
            prev = val;
        }
        if field == Field::Real {
            // Embedding SVD may hand back complex-phased vectors; realign.
            if let Some(t) = project_to_field(vec![x.clone(), y.clone()], Field::Real) {
                let mut it = t.into_iter();
                x = it.next().unwrap();
                y = it.next().unwrap();
            }
        }
        if best.as_ref().map_or(true, |b| val > b.0) {
            best = Some((val, x, y, converged, iters));
        }
    }
    let (_, x, y, converged, iters) = best.expect("at least one start");
    let xc: Vec<Scalar> = x.iter().map(|z| z.conj()).collect();
    let yc: Vec<Scalar> = y.iter().map(|z| z.conj()).collect();
    Ok(finish_estimate(a, vec![x, y, xc, yc], converged, iters))
}

// ---------------------------------------------------------------------------
// Grid oracle for 2×2×2 tensors.
// ---------------------------------------------------------------------------

fn angle_factor_real(theta: f64) -> Vec<Scalar> {
    vec![
        Scalar::new(theta.cos(), 0.0),
        Scalar::new(theta.sin(), 0.0),
    ]
}

fn angle_factor_complex(theta: f64, phi: f64) -> Vec<Scalar> {
    vec![
        Scalar::new(theta.cos(), 0.0),
        Scalar::from_polar(theta.sin(), phi),
    ]
}

fn grid_objective(a: &DenseTensor, angles: &[f64], complex: bool) -> f64 {
    let factors: Vec<Vec<Scalar>> = if complex {
        (0..3)
            .map(|k| angle_factor_complex(angles[2 * k], angles[2 * k + 1]))
            .collect()
    } else {
        (0..3).map(|k| angle_factor_real(angles[k])).collect()
    };
    pairing(a, &factors).norm()
}

/// Brute-force maximization of |⟨A, x⊗y⊗z⟩| for 2×2×2 tensors by an angle
/// grid with local refinement; accuracy O(1/resolution). Real inputs use one
/// angle per factor, complex inputs two. Intended as an independent test
/// oracle, not for production use.
pub fn grid_oracle_spectral(a: &DenseTensor, resolution: usize) -> Result<f64, SpectralError> {
    if a.shape() != [2, 2, 2] {
        return Err(SpectralError::UnsupportedShape(format!(
            "{:?} (need 2×2×2)",
            a.shape()
        )));
    }
    let complex = a.field() == Field::Complex;
    let pi = std::f64::consts::PI;
    let (n_angles, ranges, coarse): (usize, Vec<f64>, Vec<usize>) = if complex {
        (
            6,
            vec![pi / 2.0, 2.0 * pi, pi / 2.0, 2.0 * pi, pi / 2.0, 2.0 * pi],
            vec![10, 12, 10, 12, 10, 12],
        )
    } else {
        (3, vec![pi, pi, pi], vec![48, 48, 48])
    };
    // Coarse pass.
    let mut best_angles = vec![0.0; n_angles];
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; n_angles];
    loop {
        let angles: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| ranges[k] * i as f64 / coarse[k] as f64)
            .collect();
        let v = grid_objective(a, &angles, complex);
        if v > best {
            best = v;
            best_angles = angles;
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == n_angles {
                break;
            }
            idx[k] += 1;
            if idx[k] < coarse[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n_angles {
            break;
        }
    }
    // Local refinement: shrink a ±h box around the best point.
    let mut h: Vec<f64> = (0..n_angles).map(|k| ranges[k] / coarse[k] as f64).collect();
    let target: Vec<f64> = (0..n_angles)
        .map(|k| ranges[k] / resolution.max(2) as f64)
        .collect();
    for _level in 0..60 {
        if (0..n_angles).all(|k| h[k] <= target[k]) {
            break;
        }
        let mut improved_angles = best_angles.clone();
        let mut idx = vec![0usize; n_angles];
        loop {
            let angles: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(k, &i)| best_angles[k] + h[k] * (i as f64 - 2.0) / 2.0)
                .collect();
            let v = grid_objective(a, &angles, complex);
            if v > best {
                best = v;
                improved_angles = angles;
            }
            let mut k = 0;
            loop {
                if k == n_angles {
                    break;
                }
                idx[k] += 1;
                if idx[k] < 5 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n_angles {
                break;
            }
        }
        best_angles = improved_angles;
        for hk in h.iter_mut() {
            *hk /= 2.0;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::{tensor_b, tensor_c};
    use approx::assert_abs_diff_eq;

    fn cfg(field: Field) -> SpectralConfig {
        SpectralConfig {
            starts: 48,
            seed: 7,
            field,
            ..SpectralConfig::default()
        }
    }

    #[test]
    fn spectral_of_b_over_both_fields() {
        let b = tensor_b();
        let real = spectral_norm_estimate(&b, &cfg(Field::Real));
        assert_abs_diff_eq!(real.value, 0.5, epsilon = 1e-8);
        assert!(real.maximizer.is_real());
        let complex = spectral_norm_estimate(&b, &cfg(Field::Complex));
        assert_abs_diff_eq!(complex.value, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-8);
    }

    #[test]
    fn spectral_of_c_is_two_thirds_over_both_fields() {
        let c = tensor_c();
        for field in [Field::Real, Field::Complex] {
            let est = spectral_norm_estimate(&c, &cfg(field));
            assert_abs_diff_eq!(est.value, 2.0 / 3.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn estimate_value_matches_its_own_maximizer() {
        let b = tensor_b();
        let est = spectral_norm_estimate(&b, &cfg(Field::Complex));
        let paired = est.maximizer.unit_pairing(&b).unwrap().norm();
        assert_abs_diff_eq!(est.value, paired, epsilon = 1e-10);
        for f in est.maximizer.factors() {
            assert_abs_diff_eq!(vec_norm(f), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn symmetric_estimate_matches_known_maximizers() {
        let b = tensor_b();
        let real = symmetric_spectral_estimate(&b, &cfg(Field::Real)).unwrap();
        assert_abs_diff_eq!(real.value, 0.5, epsilon = 1e-8);
        // The returned point attains the value; the objective has several
        // global maximizers (|⟨B, x^⊗3⟩| = |cos 3θ|/2), so we don't pin one.
        let paired = real.maximizer.unit_pairing(&b).unwrap().norm();
        assert_abs_diff_eq!(paired, 0.5, epsilon = 1e-10);
        // The classical maximizer x = (√3/2, 1/2) attains the same value.
        let x = vec![
            Scalar::new(3f64.sqrt() / 2.0, 0.0),
            Scalar::new(0.5, 0.0),
        ];
        assert_abs_diff_eq!(sym_pairing(&b, &x).norm(), 0.5, epsilon = 1e-12);

        let cx = symmetric_spectral_estimate(&b, &cfg(Field::Complex)).unwrap();
        assert_abs_diff_eq!(cx.value, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-8);
        // And the known complex maximizer (i/√2, −1/√2) attains 1/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = vec![Scalar::new(0.0, s), Scalar::new(-s, 0.0)];
        assert_abs_diff_eq!(sym_pairing(&b, &z).norm(), s, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_estimate_rejects_asymmetric_input() {
        let e12 = crate::tensor::rank_one(
            vec![
                vec![Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0)],
                vec![Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)],
            ],
            1.0,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            symmetric_spectral_estimate(&e12, &SpectralConfig::default()),
            Err(SpectralError::NotSymmetric(_))
        ));
    }

    #[test]
    fn rank_one_symmetric_tensor_has_unit_norm() {
        let x = vec![
            Scalar::new(0.6, 0.0),
            Scalar::new(0.0, 0.0),
            Scalar::new(0.8, 0.0),
        ];
        let t = crate::tensor::rank_one(vec![x.clone(), x.clone(), x], 1.0, Scalar::new(1.0, 0.0))
            .unwrap();
        let est = symmetric_spectral_estimate(&t, &cfg(Field::Real)).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn odeco_closed_form() {
        let terms: Vec<RankOneTerm> = [(3.0, 0), (2.0, 1), (1.0, 2)]
            .iter()
            .map(|&(w, i)| {
                RankOneTerm::new(
                    vec![basis_vector(3, i), basis_vector(3, i), basis_vector(3, i)],
                    w,
                    Scalar::new(1.0, 0.0),
                )
                .unwrap()
            })
            .collect();
        let d = Decomposition::new(vec![3, 3, 3], Field::Real, terms).unwrap();
        assert_abs_diff_eq!(odeco_spectral(&d).unwrap(), 3.0, epsilon = 1e-14);

        // Non-orthogonal factors are rejected.
        let x = normalized(&[Scalar::new(1.0, 0.0), Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0)])
            .unwrap();
        let bad = Decomposition::new(
            vec![3, 3, 3],
            Field::Real,
            vec![
                RankOneTerm::new(
                    vec![basis_vector(3, 0), basis_vector(3, 0), basis_vector(3, 0)],
                    1.0,
                    Scalar::new(1.0, 0.0),
                )
                .unwrap(),
                RankOneTerm::new(vec![x.clone(), x.clone(), x], 1.0, Scalar::new(1.0, 0.0))
                    .unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            odeco_spectral(&bad),
            Err(SpectralError::NotOrthogonal(_))
        ));
    }

    #[test]
    fn odeco_agrees_with_power_iteration() {
        let terms: Vec<RankOneTerm> = (0..2)
            .map(|i| {
                RankOneTerm::new(
                    vec![basis_vector(2, i), basis_vector(2, i), basis_vector(2, i)],
                    1.0,
                    Scalar::new(1.0, 0.0),
                )
                .unwrap()
            })
            .collect();
        let d = Decomposition::new(vec![2, 2, 2], Field::Real, terms).unwrap();
        let t = d.evaluate();
        let est = spectral_norm_estimate(&t, &cfg(Field::Real));
        assert_abs_diff_eq!(odeco_spectral(&d).unwrap(), est.value, epsilon = 1e-8);
    }

    fn single_edge_tensor() -> DenseTensor {
        let mut entries = vec![Scalar::new(0.0, 0.0); 16];
        // (s,t,s,t),(t,s,t,s),(s,t,t,s),(t,s,s,t) with s=0,t=1 → flat indices.
        for idx in [
            [0usize, 1, 0, 1],
            [1, 0, 1, 0],
            [0, 1, 1, 0],
            [1, 0, 0, 1],
        ] {
            let flat = ((idx[0] * 2 + idx[1]) * 2 + idx[2]) * 2 + idx[3];
            entries[flat] = Scalar::new(0.5, 0.0);
        }
        DenseTensor::new(vec![2, 2, 2, 2], Field::Real, entries).unwrap()
    }

    #[test]
    fn bipsd_single_edge_gives_one_half() {
        let t = single_edge_tensor();
        let est = bipsd_spectral_estimate(&t, &cfg(Field::Real)).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-8);
        let paired = est.maximizer.unit_pairing(&t).unwrap().norm();
        assert_abs_diff_eq!(est.value, paired, epsilon = 1e-10);
    }

    #[test]
    fn bipsd_rejects_indefinite_input() {
        let mut entries = vec![Scalar::new(0.0, 0.0); 16];
        entries[((0 * 2 + 1) * 2 + 0) * 2 + 1] = Scalar::new(-0.5, 0.0);
        entries[((1 * 2 + 0) * 2 + 1) * 2 + 0] = Scalar::new(0.5, 0.0);
        entries[((0 * 2 + 1) * 2 + 1) * 2 + 0] = Scalar::new(0.5, 0.0);
        entries[((1 * 2 + 0) * 2 + 0) * 2 + 1] = Scalar::new(0.5, 0.0);
        let t = DenseTensor::new(vec![2, 2, 2, 2], Field::Real, entries).unwrap();
        assert!(matches!(
            bipsd_spectral_estimate(&t, &SpectralConfig::default()),
            Err(SpectralError::NotBiPSD(_))
        ));
    }

    #[test]
    fn grid_oracle_matches_known_values() {
        let b = tensor_b();
        assert_abs_diff_eq!(grid_oracle_spectral(&b, 2000).unwrap(), 0.5, epsilon = 1e-3);
        let c = tensor_c();
        assert_abs_diff_eq!(
            grid_oracle_spectral(&c, 2000).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-3
        );
        let e111 = crate::tensor::rank_one(
            vec![basis_vector(2, 0), basis_vector(2, 0), basis_vector(2, 0)],
            1.0,
            Scalar::new(1.0, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(grid_oracle_spectral(&e111, 2000).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn grid_oracle_complex_recovers_complex_norm_of_b() {
        let b = tensor_b().to_complex();
        assert_abs_diff_eq!(
            grid_oracle_spectral(&b, 600).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-3
        );
    }

    #[test]
    fn grid_oracle_rejects_other_shapes() {
        let t = DenseTensor::zeros(vec![2, 2], Field::Real);
        assert!(matches!(
            grid_oracle_spectral(&t, 100),
            Err(SpectralError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn zero_tensor_short_circuits() {
        let z = DenseTensor::zeros(vec![2, 3, 2], Field::Real);
        let est = spectral_norm_estimate(&z, &SpectralConfig::default());
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn complex_estimate_dominates_real_on_real_input() {
        let b = tensor_b();
        let r = spectral_norm_estimate(&b, &cfg(Field::Real)).value;
        let c = spectral_norm_estimate(&b, &cfg(Field::Complex)).value;
        assert!(c >= r - 1e-9);
    }
}
