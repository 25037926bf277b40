//! Spectral gap of the lazy random walk `M = (I + D^{-1} A) / 2`.
//!
//! `M` is similar to `(I + N) / 2` with `N = D^{-1/2} A D^{-1/2}`, so its
//! second eigenvalue is `(1 + mu_2) / 2` where `mu_2` is the second largest
//! eigenvalue of `N`. Small graphs use a dense symmetric eigensolver; larger
//! ones run Lanczos on `N` with the top eigenvector `D^{1/2} 1` deflated.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::error::DecompositionError;
use crate::graph::Graph;
use crate::util::rng_for;

/// Above this size the Lanczos path is used.
pub const DENSE_LIMIT: usize = 400;
const LANCZOS_MAX_STEPS: usize = 400;
/// Target relative accuracy of the gap.
pub const GAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MixingEstimate {
    pub vertex_count: usize,
    /// `1 - lambda_2(M)`, in `(0, 1]`.
    pub gap: f64,
    pub lambda2: f64,
    pub pi_min: f64,
    /// `ceil(walk_scale * log2(n / pi_min) / gap)`.
    pub mixing_bound: f64,
}

/// Second eigenpair of `N`: `mu_2` and, scaled by `D^{-1/2}`, the
/// corresponding walk eigenvector (the Fiedler vector).
#[derive(Debug, Clone)]
pub struct FiedlerPair {
    pub mu2: f64,
    pub vector: Vec<f64>,
}

pub fn estimate_mixing(g: &Graph, walk_scale: f64) -> Result<MixingEstimate, DecompositionError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(DecompositionError::Empty);
    }
    if n == 1 {
        return Ok(MixingEstimate {
            vertex_count: 1,
            gap: 1.0,
            lambda2: 0.0,
            pi_min: 1.0,
            mixing_bound: 0.0,
        });
    }
    if !g.is_connected() {
        return Err(DecompositionError::Disconnected);
    }
    let pair = fiedler(g);
    Ok(estimate_from_mu2(g, pair.mu2, walk_scale))
}

pub fn estimate_from_mu2(g: &Graph, mu2: f64, walk_scale: f64) -> MixingEstimate {
    let n = g.vertex_count();
    let lambda2 = ((1.0 + mu2) / 2.0).clamp(0.0, 1.0);
    let gap = (1.0 - lambda2).max(f64::MIN_POSITIVE);
    let pi_min = g.degrees().into_iter().min().unwrap_or(0) as f64 / g.degree_sum().max(1) as f64;
    let mixing_bound = (walk_scale * (n as f64 / pi_min).log2() / gap).ceil();
    MixingEstimate {
        vertex_count: n,
        gap,
        lambda2,
        pi_min,
        mixing_bound,
    }
}

/// Needs a connected graph on at least two vertices.
pub fn fiedler(g: &Graph) -> FiedlerPair {
    if g.vertex_count() <= DENSE_LIMIT {
        dense_fiedler(g)
    } else {
        lanczos_fiedler(g)
    }
}

fn inv_sqrt_degrees(g: &Graph) -> Vec<f64> {
    g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect()
}

pub fn dense_fiedler(g: &Graph) -> FiedlerPair {
    let n = g.vertex_count();
    let s = inv_sqrt_degrees(g);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        let w = s[u] * s[v];
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let idx = order[1];
    let col = eig.eigenvectors.column(idx);
    let vector = (0..n).map(|i| col[i] * s[i]).collect();
    FiedlerPair {
        mu2: eig.eigenvalues[idx],
        vector,
    }
}

fn apply_n(g: &Graph, s: &[f64], x: &DVector<f64>, out: &mut DVector<f64>) {
    for u in 0..g.vertex_count() {
        let mut acc = 0.0;
        for &w in g.neighbors(u) {
            acc += s[w] * x[w];
        }
        out[u] = s[u] * acc;
    }
}

pub fn lanczos_fiedler(g: &Graph) -> FiedlerPair {
    let n = g.vertex_count();
    let s = inv_sqrt_degrees(g);
    let mut top = DVector::from_iterator(n, g.degrees().iter().map(|&d| (d as f64).sqrt()));
    top /= top.norm();
    let project = |v: &mut DVector<f64>| {
        let c = top.dot(v);
        v.axpy(-c, &top, 1.0);
    };
    let mut rng = rng_for(0x01a2_c205, &[n as u64]);
    let mut q = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    project(&mut q);
    q /= q.norm();
    let steps = LANCZOS_MAX_STEPS.min(n - 1);
    let mut basis: Vec<DVector<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = DVector::zeros(n);
    let mut result: Option<(f64, DVector<f64>)> = None;
    for j in 0..steps {
        apply_n(g, &s, &basis[j], &mut w);
        project(&mut w);
        let a = basis[j].dot(&w);
        alpha.push(a);
        // Full reorthogonalisation, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
            project(&mut w);
        }
        let b = w.norm();
        let (theta, y) = top_ritz(&alpha, &beta);
        let residual = b * y[y.len() - 1].abs();
        let gap_est = (1.0 - theta).max(1e-12);
        // The Ritz value is within `residual` of an eigenvalue of N.
        let converged = residual <= GAP_TOLERANCE * gap_est;
        if converged || b < 1e-12 || j + 1 == steps {
            let mut v = DVector::zeros(n);
            for (i, bi) in basis.iter().enumerate() {
                v.axpy(y[i], bi, 1.0);
            }
            result = Some((theta, v));
            break;
        }
        beta.push(b);
        basis.push(&w / b);
    }
    let (mu2, v) = result.unwrap_or((0.0, DVector::zeros(n)));
    FiedlerPair {
        mu2,
        vector: (0..n).map(|i| v[i] * s[i]).collect(),
    }
}

/// Largest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let col = eig.eigenvectors.column(best);
    (eig.eigenvalues[best], col.iter().copied().collect())
}
