//! Extremal eigenpairs of a symmetric operator by Krylov projection.
//!
//! The basis is fully reorthogonalised and the projected matrix `Vᵀ A V` is
//! formed explicitly, so Rayleigh–Ritz stays valid across restarts. A restart
//! from a fresh random direction is used both after breakdown (invariant
//! subspace found) and once deliberately after convergence when several modes
//! are requested: single-vector Krylov methods see only one copy of a repeated
//! eigenvalue, and the extra direction exposes any copies that were missed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, eig_sym_dense, norm, Matrix, SymmetricOperator};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Residual tolerance relative to `max(1, |largest Ritz value|)`.
    pub tol: f64,
    /// Cap on operator applications; `0` means `10 n`.
    pub max_iter: usize,
    /// Seed for the start and restart vectors.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 0, seed: 0x6c61_6e63_7a6f_7331 }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOutput<T> {
    /// Ordered by squared value, descending; ties broken by value, descending.
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub matvecs: usize,
}

struct Ritz<T> {
    values: Vec<T>,
    vectors: Vec<Vec<T>>,
    residuals: Vec<T>,
}

/// The `s` eigenpairs of largest magnitude.
pub fn lanczos_top<T, A>(op: &A, s: usize, opts: &LanczosOptions) -> Result<LanczosOutput<T>>
where
    T: Scalar,
    A: SymmetricOperator<T> + ?Sized,
{
    let n = op.dim();
    if s == 0 || s > n {
        return Err(Error::RankOutOfRange { s, n });
    }
    let max_iter = if opts.max_iter == 0 { 10 * n } else { opts.max_iter };
    let tol = T::lit(opts.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut images: Vec<Vec<T>> = Vec::new();
    // proj[k][i] = <q_i, A q_k> for i <= k
    let mut proj: Vec<Vec<T>> = Vec::new();

    let mut q = random_orthonormal(n, &basis, &mut rng);
    let mut next_check = (s + 10).min(n);
    let mut reference: Option<Vec<T>> = None;

    loop {
        let mut w = vec![T::zero(); n];
        op.apply(&q, &mut w);
        let mut col: Vec<T> = basis.iter().map(|b| dot(b, &w)).collect();
        col.push(dot(&q, &w));
        basis.push(q);
        images.push(w.clone());
        proj.push(col);
        let m = basis.len();

        let w_before = norm(&w);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let w_after = norm(&w);

        let exhausted = m == n;
        let out_of_budget = m >= max_iter;
        let mut force_restart = false;
        if exhausted || out_of_budget || m >= next_check {
            let ritz = rayleigh_ritz(&basis, &images, &proj, s)?;
            let scale = ritz.values.iter().fold(T::one(), |a, v| a.max(v.abs()));
            let worst = ritz.residuals.iter().fold(T::zero(), |a, &r| a.max(r));
            let converged = worst <= tol * scale;
            if exhausted || (converged && (s < 2 || out_of_budget)) {
                return Ok(finish(ritz, m));
            }
            if converged {
                let agrees = reference.as_ref().is_some_and(|prev| {
                    prev.iter().zip(&ritz.values).all(|(&a, &b)| (a - b).abs() <= T::lit(4.0) * tol * scale)
                });
                if agrees {
                    return Ok(finish(ritz, m));
                }
                reference = Some(ritz.values);
                force_restart = true;
            } else if out_of_budget {
                return Err(Error::NoConvergence { residual: (worst / scale).as_f64(), tol: opts.tol });
            }
            next_check = (m + (m / 5).max(10)).min(n);
        }

        let breakdown = w_after <= T::lit(1e-10) * w_before.max(T::min_positive_value());
        q = if force_restart || breakdown {
            random_orthonormal(n, &basis, &mut rng)
        } else {
            let inv = T::one() / w_after;
            w.iter().map(|&x| x * inv).collect()
        };
    }
}

fn finish<T: Scalar>(ritz: Ritz<T>, matvecs: usize) -> LanczosOutput<T> {
    LanczosOutput { values: ritz.values, vectors: ritz.vectors, residuals: ritz.residuals, matvecs }
}

fn rayleigh_ritz<T: Scalar>(basis: &[Vec<T>], images: &[Vec<T>], proj: &[Vec<T>], s: usize) -> Result<Ritz<T>> {
    let m = basis.len();
    let n = basis[0].len();
    let h = Matrix::from_fn(m, m, |i, k| if i <= k { proj[k][i] } else { proj[i][k] });
    let (vals, vecs) = eig_sym_dense(&h)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (vals[a], vals[b]);
        (y * y).partial_cmp(&(x * x)).unwrap().then(y.partial_cmp(&x).unwrap())
    });
    let mut out = Ritz { values: Vec::new(), vectors: Vec::new(), residuals: Vec::new() };
    for &j in order.iter().take(s) {
        let y = vecs.row(j);
        let mut x = vec![T::zero(); n];
        let mut ax = vec![T::zero(); n];
        for i in 0..m {
            axpy(y[i], &basis[i], &mut x);
            axpy(y[i], &images[i], &mut ax);
        }
        let theta = vals[j];
        let r = ax.iter().zip(&x).map(|(&a, &b)| (a - theta * b) * (a - theta * b)).sum::<T>().sqrt();
        out.values.push(theta);
        out.vectors.push(x);
        out.residuals.push(r);
    }
    Ok(out)
}

fn random_orthonormal<T: Scalar>(n: usize, basis: &[Vec<T>], rng: &mut ChaCha8Rng) -> Vec<T> {
    loop {
        let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect();
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &v);
                axpy(-c, b, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > T::lit(1e-6) {
            let inv = T::one() / nv;
            v.iter_mut().for_each(|x| *x *= inv);
            return v;
        }
    }
}
