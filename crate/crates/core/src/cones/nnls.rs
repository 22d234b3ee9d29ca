//! Nonnegative least squares in Gram form (Lawson–Hanson active set).
//!
//! Minimizes `pᵀ G p − 2 hᵀ p` over `p ≥ 0` for a symmetric PSD `G`, which is
//! `‖b − A p‖²` up to a constant when `G = AᵀA`, `h = Aᵀb`.

use crate::scalar::Real;

/// Row-major symmetric Gram matrix.
pub(crate) struct Gram<T> {
    pub k: usize,
    pub g: Vec<T>,
}

impl<T: Real> Gram<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.g[i * self.k + j]
    }
}

/// Solves `G_PP z = h_P` by Cholesky with a small diagonal ridge.
/// `None` if the submatrix is numerically singular.
fn solve_passive<T: Real>(gram: &Gram<T>, h: &[T], passive: &[usize]) -> Option<Vec<T>> {
    let p = passive.len();
    let mut l = vec![T::zero(); p * p];
    let scale = passive
        .iter()
        .map(|&i| gram.at(i, i))
        .fold(T::zero(), |a, b| a.max(b));
    let ridge = scale * T::c(1e-13);
    for a in 0..p {
        for b in 0..=a {
            let mut s = gram.at(passive[a], passive[b]);
            if a == b {
                s += ridge;
            }
            for c in 0..b {
                s -= l[a * p + c] * l[b * p + c];
            }
            if a == b {
                if s <= T::zero() {
                    return None;
                }
                l[a * p + a] = s.sqrt();
            } else {
                l[a * p + b] = s / l[b * p + b];
            }
        }
    }
    let mut y = vec![T::zero(); p];
    for a in 0..p {
        let mut s = h[passive[a]];
        for c in 0..a {
            s -= l[a * p + c] * y[c];
        }
        y[a] = s / l[a * p + a];
    }
    let mut z = vec![T::zero(); p];
    for a in (0..p).rev() {
        let mut s = y[a];
        for c in a + 1..p {
            s -= l[c * p + a] * z[c];
        }
        z[a] = s / l[a * p + a];
    }
    Some(z)
}

/// Lawson–Hanson on the Gram form, optionally warm-started from a feasible `p0`.
pub(crate) fn nnls<T: Real>(gram: &Gram<T>, h: &[T], p0: Option<&[T]>, max_outer: usize) -> Vec<T> {
    let k = gram.k;
    let mut p: Vec<T> = p0.map_or_else(|| vec![T::zero(); k], |v| v.to_vec());
    p.resize(k, T::zero());
    let mut passive: Vec<bool> = p.iter().map(|&v| v > T::zero()).collect();
    let hmax = h.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    let eps = T::c(1e-12) * (T::one() + hmax);

    let gradient = |p: &[T]| -> Vec<T> {
        (0..k)
            .map(|i| h[i] - (0..k).map(|j| gram.at(i, j) * p[j]).sum::<T>())
            .collect()
    };

    for _ in 0..max_outer {
        let w = gradient(&p);
        let candidate = (0..k)
            .filter(|&i| !passive[i] && w[i] > eps)
            .max_by(|&a, &b| w[a].partial_cmp(&w[b]).expect("finite"));
        let Some(j) = candidate else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let Some(z) = solve_passive(gram, h, &idx) else {
                passive[j] = false;
                return p;
            };
            if z.iter().all(|&v| v > T::zero()) {
                for (a, &i) in idx.iter().enumerate() {
                    p[i] = z[a];
                }
                break;
            }
            // step toward z until the first passive coordinate hits zero
            let mut alpha = T::one();
            for (a, &i) in idx.iter().enumerate() {
                if z[a] <= T::zero() {
                    let denom = p[i] - z[a];
                    if denom > T::zero() {
                        alpha = alpha.min(p[i] / denom);
                    }
                }
            }
            for (a, &i) in idx.iter().enumerate() {
                let pi = p[i];
                p[i] = pi + alpha * (z[a] - pi);
                if p[i] <= T::c(1e-15) * (T::one() + hmax) {
                    p[i] = T::zero();
                    passive[i] = false;
                }
            }
            if !idx.iter().any(|&i| passive[i]) {
                break;
            }
        }
    }
    p
}
