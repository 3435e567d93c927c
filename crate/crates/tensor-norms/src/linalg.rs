//! Self-contained dense kernels for small matrices: one-sided Jacobi SVD,
//! cyclic Jacobi symmetric eigensolver, and Gaussian elimination.
//!
//! Everything here targets desk-scale problems (dimensions up to a few
//! hundred); no external linear-algebra crates are used. Complex matrices are
//! handled through the real embedding z ↦ [[Re, −Im], [Im, Re]], which
//! represents the same linear map on ℝ²ⁿ and therefore duplicates every
//! singular value / eigenvalue of the complex matrix exactly twice.

use crate::tensor::{DenseTensor, Field, Scalar};

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
}

impl RMat {
    pub fn zeros(m: usize, n: usize) -> Self {
        RMat {
            m,
            n,
            a: vec![0.0; m * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = RMat::zeros(n, n);
        for i in 0..n {
            r.a[i * n + i] = 1.0;
        }
        r
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let m = rows.len();
        let n = if m == 0 { 0 } else { rows[0].len() };
        let mut a = Vec::with_capacity(m * n);
        for r in rows {
            assert_eq!(r.len(), n, "ragged rows");
            a.extend_from_slice(r);
        }
        RMat { m, n, a }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> RMat {
        let mut t = RMat::zeros(self.n, self.m);
        for i in 0..self.m {
            for j in 0..self.n {
                t.a[j * self.m + i] = self.at(i, j);
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.m];
        for i in 0..self.m {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.at(i, j)).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Thin SVD A = U·diag(s)·Vᵀ with s sorted descending. U is m×min(m,n) and
/// V is n×min(m,n); columns of U belonging to (numerically) zero singular
/// values are zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: RMat,
    pub s: Vec<f64>,
    pub v: RMat,
}

/// One-sided Jacobi SVD. Orthogonalizes the columns of A by right rotations;
/// accurate to ~1e−14 relative for the small dense matrices used here.
pub fn svd(a: &RMat) -> Svd {
    if a.m < a.n {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (m, n) = (a.m, a.n);
    let mut b = a.clone();
    let mut v = RMat::identity(n);
    let scale = a.frobenius();
    if scale == 0.0 {
        return Svd {
            u: RMat::zeros(m, n),
            s: vec![0.0; n],
            v,
        };
    }
    let tol = 1e-15;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    let bp = b.at(i, p);
                    let bq = b.at(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() + tol * scale * scale {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let bp = b.at(i, p);
                    let bq = b.at(i, q);
                    b.set(i, p, c * bp - s * bq);
                    b.set(i, q, s * bp + c * bq);
                }
                for i in 0..n {
                    let vp = v.at(i, p);
                    let vq = v.at(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    // Column norms are the singular values; normalize to get U.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| b.at(i, j).powi(2)).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut u = RMat::zeros(m, n);
    let mut vv = RMat::zeros(n, n);
    let mut s = vec![0.0; n];
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        if norms[src] > 0.0 {
            for i in 0..m {
                u.set(i, dst, b.at(i, src) / norms[src]);
            }
        }
        for i in 0..n {
            vv.set(i, dst, v.at(i, src));
        }
    }
    Svd { u, s, v: vv }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and the matching orthonormal
/// eigenvectors as columns.
pub fn eig_sym(a: &RMat) -> (Vec<f64>, RMat) {
    assert_eq!(a.m, a.n, "eig_sym needs a square matrix");
    let n = a.n;
    let mut w = a.clone();
    let mut v = RMat::identity(n);
    let scale = a.frobenius().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += w.at(p, q).powi(2);
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.at(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (w.at(q, q) - w.at(p, p)) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let wip = w.at(i, p);
                    let wiq = w.at(i, q);
                    w.set(i, p, c * wip - s * wiq);
                    w.set(i, q, s * wip + c * wiq);
                }
                for j in 0..n {
                    let wpj = w.at(p, j);
                    let wqj = w.at(q, j);
                    w.set(p, j, c * wpj - s * wqj);
                    w.set(q, j, s * wpj + c * wqj);
                }
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| w.at(y, y).partial_cmp(&w.at(x, x)).unwrap());
    let vals: Vec<f64> = order.iter().map(|&j| w.at(j, j)).collect();
    let mut vecs = RMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, dst, v.at(i, src));
        }
    }
    (vals, vecs)
}

/// Attempt a Cholesky factorization of A + shift·I; returns true iff every
/// pivot stays positive. For symmetric A this certifies λ_min(A) > −shift,
/// which is the "PSD within tolerance" test used on matricized 4-tensors —
/// a single O(n³/3) pass, much cheaper than a full eigendecomposition.
pub fn cholesky_psd(a: &RMat, shift: f64) -> bool {
    assert_eq!(a.m, a.n, "cholesky_psd needs a square matrix");
    let n = a.n;
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.at(i, j);
            if i == j {
                s += shift;
            }
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Solve A·x = b by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub fn solve(a: &RMat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.m, a.n, "solve needs a square matrix");
    assert_eq!(b.len(), a.n);
    let n = a.n;
    let mut w = a.clone();
    let mut x = b.to_vec();
    let scale = a.frobenius().max(1e-300);
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if w.at(r, col).abs() > w.at(piv, col).abs() {
                piv = r;
            }
        }
        if w.at(piv, col).abs() < 1e-13 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = w.at(col, j);
                w.set(col, j, w.at(piv, j));
                w.set(piv, j, tmp);
            }
            x.swap(col, piv);
        }
        let d = w.at(col, col);
        for r in (col + 1)..n {
            let f = w.at(r, col) / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = w.at(r, j) - f * w.at(col, j);
                w.set(r, j, v);
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in (col + 1)..n {
            s -= w.at(col, j) * x[j];
        }
        x[col] = s / w.at(col, col);
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Bridges between DenseTensor matrices (2-tensors) and the real kernels.
// ---------------------------------------------------------------------------

/// View a real 2-tensor as an `RMat`. Panics if entries are complex.
pub fn rmat_of(t: &DenseTensor) -> RMat {
    assert_eq!(t.order(), 2, "expected a matrix (2-tensor)");
    RMat {
        m: t.shape()[0],
        n: t.shape()[1],
        a: t.entries()
            .iter()
            .map(|z| {
                debug_assert_eq!(z.im, 0.0);
                z.re
            })
            .collect(),
    }
}

/// Real embedding of a complex 2-tensor: [[Re, −Im], [Im, Re]] of size
/// 2m × 2n. Its singular values are those of the complex matrix, duplicated.
pub fn embedding_of(t: &DenseTensor) -> RMat {
    assert_eq!(t.order(), 2, "expected a matrix (2-tensor)");
    let (m, n) = (t.shape()[0], t.shape()[1]);
    let mut e = RMat::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let z = t.entry(&[i, j]);
            e.set(i, j, z.re);
            e.set(i, j + n, -z.im);
            e.set(i + m, j, z.im);
            e.set(i + m, j + n, z.re);
        }
    }
    e
}

/// Singular values of a 2-tensor over its own field, sorted descending.
/// Complex matrices go through the real embedding (values de-duplicated).
pub fn matrix_singular_values(t: &DenseTensor) -> Vec<f64> {
    match t.field() {
        Field::Real => svd(&rmat_of(t)).s,
        Field::Complex => {
            let s = svd(&embedding_of(t)).s;
            s.into_iter().step_by(2).collect()
        }
    }
}

/// Largest singular value with matching unit singular vectors (u, v) of a
/// 2-tensor over its own field: A·v = σ·u.
pub fn matrix_top_triple(t: &DenseTensor) -> (f64, Vec<Scalar>, Vec<Scalar>) {
    let (m, n) = (t.shape()[0], t.shape()[1]);
    match t.field() {
        Field::Real => {
            let d = svd(&rmat_of(t));
            let u = d.u.column(0).iter().map(|&x| Scalar::new(x, 0.0)).collect();
            let v = d.v.column(0).iter().map(|&x| Scalar::new(x, 0.0)).collect();
            (d.s[0], u, v)
        }
        Field::Complex => {
            let d = svd(&embedding_of(t));
            let uc = d.u.column(0);
            let vc = d.v.column(0);
            let u = (0..m).map(|i| Scalar::new(uc[i], uc[i + m])).collect();
            let v = (0..n).map(|j| Scalar::new(vc[j], vc[j + n])).collect();
            (d.s[0], u, v)
        }
    }
}

/// Full SVD triples (σᵢ, uᵢ, vᵢ) of a 2-tensor over its own field, sorted by
/// descending σ, satisfying A = Σ σᵢ·uᵢvᵢᴴ exactly. Real inputs reuse the
/// real kernel. Complex inputs run a one-sided Jacobi in complex arithmetic:
/// unlike the real embedding, this keeps the factor pairs complex-orthonormal
/// even when singular values are degenerate, so the dyad expansion always
/// reconstructs the matrix.
pub fn complex_svd(t: &DenseTensor) -> Vec<(f64, Vec<Scalar>, Vec<Scalar>)> {
    assert_eq!(t.order(), 2, "expected a matrix (2-tensor)");
    let (m, n) = (t.shape()[0], t.shape()[1]);
    if t.field() == Field::Real {
        let d = svd(&rmat_of(t));
        return (0..d.s.len())
            .map(|i| {
                let u = d.u.column(i).iter().map(|&x| Scalar::new(x, 0.0)).collect();
                let v = d.v.column(i).iter().map(|&x| Scalar::new(x, 0.0)).collect();
                (d.s[i], u, v)
            })
            .collect();
    }
    // Column-major working copies of A and of the accumulated right factor V.
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|j| (0..m).map(|i| t.entries()[i * n + j]).collect())
        .collect();
    let mut v: Vec<Vec<Scalar>> = (0..n)
        .map(|j| {
            let mut e = vec![Scalar::new(0.0, 0.0); n];
            e[j] = Scalar::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = 1e-15;
    for _ in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let gpp: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let gqq: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let mut gpq = Scalar::new(0.0, 0.0);
                for i in 0..m {
                    gpq += a[p][i] * a[q][i].conj();
                }
                let mag = gpq.norm();
                let denom = (gpp * gqq).sqrt().max(1e-300);
                if mag <= tol * denom {
                    continue;
                }
                off = off.max(mag / denom);
                // Phase-twist column q so the cross term is real, then apply
                // the classical real Jacobi rotation to the pair.
                let phi = gpq / mag;
                let tau = (gqq - gpp) / (2.0 * mag);
                let tt = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + tt * tt).sqrt();
                let sn = tt * cs;
                for i in 0..m {
                    let xp = a[p][i];
                    let xq = a[q][i] * phi;
                    a[p][i] = xp * cs - xq * sn;
                    a[q][i] = xp * sn + xq * cs;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i] * phi;
                    v[p][i] = vp * cs - vq * sn;
                    v[q][i] = vp * sn + vq * cs;
                }
            }
        }
        if off <= tol {
            break;
        }
    }
    let mut triples: Vec<(f64, Vec<Scalar>, Vec<Scalar>)> = (0..n)
        .map(|j| {
            let sigma: f64 = a[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let u: Vec<Scalar> = if sigma > 0.0 {
                a[j].iter().map(|z| z / sigma).collect()
            } else {
                vec![Scalar::new(0.0, 0.0); m]
            };
            (sigma, u, v[j].clone())
        })
        .collect();
    triples.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    triples
}

/// Numerical rank: number of singular values above `tol`·σ_max.
pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    let smax = singular_values.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn svd_of_diagonal() {
        let a = RMat::from_rows(&[vec![3.0, 0.0], vec![0.0, -2.0]]);
        let d = svd(&a);
        assert_abs_diff_eq!(d.s[0], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d.s[1], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn svd_reconstructs_a_known_product() {
        // Build A = U Σ Vᵀ from explicit rotations and recover Σ.
        let (c1, s1) = (0.8f64, 0.6f64);
        let (c2, s2) = ((0.3f64).cos(), (0.3f64).sin());
        let u = RMat::from_rows(&[vec![c1, -s1], vec![s1, c1]]);
        let v = RMat::from_rows(&[vec![c2, -s2], vec![s2, c2]]);
        let sig = [5.0, 0.5];
        let mut a = RMat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += u.at(i, k) * sig[k] * v.at(j, k);
                }
                a.set(i, j, acc);
            }
        }
        let d = svd(&a);
        assert_abs_diff_eq!(d.s[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.s[1], 0.5, epsilon = 1e-12);
        // Reconstruction error.
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += d.u.at(i, k) * d.s[k] * d.v.at(j, k);
                }
                assert_abs_diff_eq!(acc, a.at(i, j), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn svd_wide_and_rank_deficient() {
        let a = RMat::from_rows(&[vec![1.0, 2.0, 2.0], vec![2.0, 4.0, 4.0]]);
        let d = svd(&a);
        // Rank one: σ₁ = ‖a‖_F, σ₂ = 0.
        assert_abs_diff_eq!(d.s[0], a.frobenius(), epsilon = 1e-12);
        assert!(d.s[1] < 1e-12);
        assert_eq!(numerical_rank(&d.s, 1e-10), 1);
    }

    #[test]
    fn svd_nuclear_of_rank_one_is_norm_product() {
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 4.0];
        let mut a = RMat::zeros(3, 2);
        for i in 0..3 {
            for j in 0..2 {
                a.set(i, j, u[i] * v[j]);
            }
        }
        let d = svd(&a);
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(d.s.iter().sum::<f64>(), nu * nv, epsilon = 1e-12);
    }

    #[test]
    fn eig_of_known_symmetric() {
        let a = RMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = eig_sym(&a);
        assert_abs_diff_eq!(vals[0], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-13);
        // Eigenvector for 3 is (1,1)/√2 up to sign.
        let x = vecs.column(0);
        assert_abs_diff_eq!(x[0].abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(x[0], x[1], epsilon = 1e-12);
    }

    #[test]
    fn solve_known_system() {
        let a = RMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&a, &[5.0, 10.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 3.0, epsilon = 1e-12);
        let singular = RMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&singular, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn cholesky_psd_detects_definiteness() {
        let psd = RMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(cholesky_psd(&psd, 1e-12));
        let indef = RMat::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]);
        assert!(!cholesky_psd(&indef, 1e-12));
        // Singular PSD passes thanks to the shift.
        let sing = RMat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(cholesky_psd(&sing, 1e-12));
    }

    #[test]
    fn complex_embedding_doubles_singular_values() {
        use crate::tensor::{DenseTensor, Field, Scalar};
        // M = [[i, 0], [0, 2]] has singular values 2 and 1.
        let t = DenseTensor::new(
            vec![2, 2],
            Field::Complex,
            vec![
                Scalar::new(0.0, 1.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(2.0, 0.0),
            ],
        )
        .unwrap();
        let s = matrix_singular_values(&t);
        assert_abs_diff_eq!(s[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-12);
        let (smax, u, v) = matrix_top_triple(&t);
        assert_abs_diff_eq!(smax, 2.0, epsilon = 1e-12);
        // Top pair lives on the second coordinate.
        assert_abs_diff_eq!(u[1].norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v[1].norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn complex_svd_reconstructs_with_orthonormal_factors() {
        use crate::tensor::{DenseTensor, Field, Scalar};
        // Pseudo-arbitrary complex 3×4 matrix.
        let entries: Vec<Scalar> = (0..12)
            .map(|k| {
                let x = ((3 * k + 1) as f64 * 0.7).sin();
                let y = ((5 * k + 2) as f64 * 0.3).cos();
                Scalar::new(x, y)
            })
            .collect();
        let t = DenseTensor::new(vec![3, 4], Field::Complex, entries.clone()).unwrap();
        let triples = complex_svd(&t);
        // Reconstruct Σ σ·u·vᴴ and compare entrywise.
        let mut rec = vec![Scalar::new(0.0, 0.0); 12];
        for (s, u, v) in &triples {
            for i in 0..3 {
                for j in 0..4 {
                    rec[i * 4 + j] += u[i] * v[j].conj() * *s;
                }
            }
        }
        for (r, e) in rec.iter().zip(&entries) {
            assert_abs_diff_eq!(r.re, e.re, epsilon = 1e-12);
            assert_abs_diff_eq!(r.im, e.im, epsilon = 1e-12);
        }
        // Right factors of the nonzero triples are complex-orthonormal.
        for (i, (si, _, vi)) in triples.iter().enumerate() {
            if *si <= 1e-12 {
                continue;
            }
            for (j, (sj, _, vj)) in triples.iter().enumerate() {
                if *sj <= 1e-12 {
                    continue;
                }
                let mut ip = Scalar::new(0.0, 0.0);
                for k in 0..4 {
                    ip += vi[k] * vj[k].conj();
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ip.norm(), expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn complex_svd_handles_degenerate_singular_values() {
        use crate::tensor::{DenseTensor, Field, Scalar};
        // diag(1, i): two singular values equal to 1. The dyad expansion must
        // still reconstruct the matrix (factor pairs must not mix).
        let t = DenseTensor::new(
            vec![2, 2],
            Field::Complex,
            vec![
                Scalar::new(1.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(0.0, 1.0),
            ],
        )
        .unwrap();
        let triples = complex_svd(&t);
        assert_eq!(triples.len(), 2);
        assert_abs_diff_eq!(triples[0].0, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(triples[1].0, 1.0, epsilon = 1e-13);
        let mut rec = vec![Scalar::new(0.0, 0.0); 4];
        for (s, u, v) in &triples {
            for i in 0..2 {
                for j in 0..2 {
                    rec[i * 2 + j] += u[i] * v[j].conj() * *s;
                }
            }
        }
        assert_abs_diff_eq!(rec[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec[3].im, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec[1].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec[2].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn complex_svd_on_real_input_matches_real_kernel() {
        use crate::tensor::{DenseTensor, Field, Scalar};
        let t = DenseTensor::new(
            vec![2, 2],
            Field::Real,
            vec![
                Scalar::new(3.0, 0.0),
                Scalar::new(0.0, 0.0),
                Scalar::new(4.0, 0.0),
                Scalar::new(5.0, 0.0),
            ],
        )
        .unwrap();
        let triples = complex_svd(&t);
        let s = svd(&rmat_of(&t));
        for (k, (sig, _, _)) in triples.iter().enumerate() {
            assert_abs_diff_eq!(*sig, s.s[k], epsilon = 1e-12);
        }
    }
}
