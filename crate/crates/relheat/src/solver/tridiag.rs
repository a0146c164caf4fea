//! Symmetric tridiagonal eigensolver: Sturm-count bisection for the
//! eigenvalues (all of them, or only those below a threshold) and inverse
//! iteration with partial-pivot LU solves for the eigenvectors.
//!
//! Bisection costs O(n) per Sturm pass, so a partial low spectrum on a very
//! large grid stays cheap; that is what the long-time kernel sweeps lean on.

use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>, // length n - 1
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        Tridiagonal { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let pivmin = 1e-290;
        let mut count = 0usize;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let mut denom = q;
            if denom.abs() < pivmin {
                denom = -pivmin;
            }
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Ascending eigenvalues below `lambda_max` (capped at `max_count`),
    /// each bisected to near machine precision.
    pub fn eigenvalues_below(&self, lambda_max: f64, max_count: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let hi_bound = lambda_max.min(ghi + 1e-8 * (ghi - glo).abs().max(1.0));
        if hi_bound <= glo {
            return Vec::new();
        }
        let total = self.count_below(hi_bound).min(max_count);
        let span = (ghi - glo).abs().max(1.0);
        let tol = 1e-14 * span;
        let mut out = Vec::with_capacity(total);
        let mut lower = glo - 1e-8 * span;
        for k in 0..total {
            // invariant: count_below(lo) <= k < count_below(hi)
            let mut lo = lower;
            let mut hi = hi_bound;
            while hi - lo > tol + 1e-14 * lo.abs().max(hi.abs()) {
                let mid = 0.5 * (lo + hi);
                if self.count_below(mid) <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let lambda = 0.5 * (lo + hi);
            out.push(lambda);
            lower = lo; // eigenvalues are sorted; reuse as next lower bracket
        }
        out
    }

    pub fn eigenvalues_all(&self) -> Vec<f64> {
        self.eigenvalues_below(f64::INFINITY, self.n())
    }

    /// Inverse-iteration eigenvector for an isolated eigenvalue.
    fn eigenvector(&self, lambda: f64, seed: u64) -> Vec<f64> {
        let n = self.n();
        let mut v = pseudo_random_unit(n, seed);
        let lu = LuTri::factor(self, lambda);
        for _ in 0..3 {
            lu.solve(&mut v);
            normalize(&mut v);
        }
        v
    }

    /// Eigenpairs below `lambda_max`: values plus full vectors (row-major,
    /// one vector per row).
    pub fn eigenpairs_below(&self, lambda_max: f64, max_count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let values = self.eigenvalues_below(lambda_max, max_count);
        let mut vectors: Vec<Vec<f64>> = values
            .par_iter()
            .enumerate()
            .map(|(k, &lambda)| self.eigenvector(lambda, k as u64))
            .collect();
        self.reorthogonalize_clusters(&values, &mut vectors);
        (values, vectors)
    }

    /// Same as [`eigenpairs_below`], but keeps only the vector components at
    /// `rows` (plus the values); vectors are transient, so huge grids stay
    /// within memory.
    pub fn eigenpairs_projected(
        &self,
        lambda_max: f64,
        max_count: usize,
        rows: &[usize],
    ) -> (Vec<f64>, Vec<Vec<f64>>) {
        let values = self.eigenvalues_below(lambda_max, max_count);
        let projected: Vec<Vec<f64>> = values
            .par_iter()
            .enumerate()
            .map(|(k, &lambda)| {
                let v = self.eigenvector(lambda, k as u64);
                rows.iter().map(|&i| v[i]).collect()
            })
            .collect();
        (values, projected)
    }

    /// Re-orthogonalize vectors whose eigenvalues are numerically
    /// degenerate; well-separated eigenvalues come out orthogonal already.
    fn reorthogonalize_clusters(&self, values: &[f64], vectors: &mut [Vec<f64>]) {
        let (glo, ghi) = self.gershgorin();
        let span = (ghi - glo).abs().max(1.0);
        let cluster_gap = 1e-9 * span;
        for k in 1..values.len() {
            if values[k] - values[k - 1] < cluster_gap {
                let prev = vectors[k - 1].clone();
                let dot: f64 = prev.iter().zip(vectors[k].iter()).map(|(a, b)| a * b).sum();
                for (vi, pi) in vectors[k].iter_mut().zip(prev.iter()) {
                    *vi -= dot * pi;
                }
                normalize(&mut vectors[k]);
            }
        }
    }

    /// Max residual `||T v - lambda v||_inf`, for diagnostics and tests.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut s = self.diag[i] * v[i] - lambda * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            worst = worst.max(s.abs());
        }
        worst
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        let inv = 1.0 / norm;
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
}

/// Deterministic pseudo-random seed vector (splitmix-style), so repeated
/// runs produce bit-identical eigenvectors.
fn pseudo_random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x2545_F491_4F6C_DD1D);
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        let bits = (state >> 11) as f64 / (1u64 << 53) as f64;
        v.push(bits - 0.5);
    }
    normalize(&mut v);
    v
}

/// Partial-pivot LU of `T - lambda I` in banded storage.
struct LuTri {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl LuTri {
    fn factor(tri: &Tridiagonal, lambda: f64) -> LuTri {
        let n = tri.n();
        let mut dl: Vec<f64> = tri.off.clone();
        let mut d: Vec<f64> = tri.diag.iter().map(|x| x - lambda).collect();
        let mut du: Vec<f64> = tri.off.clone();
        let mut du2 = vec![0.0f64; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = 1e-300;
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].abs() < tiny {
            d[n - 1] = tiny;
        }
        LuTri { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Dirichlet second-difference chain: exact eigenpairs are
    /// `lambda_k = (2/h^2)(1 - cos(k pi/(n+1)))`, `v_k[j] ~ sin(j k pi/(n+1))`.
    fn chain(n: usize, h: f64) -> Tridiagonal {
        let inv = 1.0 / (h * h);
        Tridiagonal::new(vec![2.0 * inv; n], vec![-inv; n - 1])
    }

    #[test]
    fn chain_eigenvalues_are_exact() {
        let n = 60;
        let h = 0.1;
        let tri = chain(n, h);
        let vals = tri.eigenvalues_all();
        assert_eq!(vals.len(), n);
        for (k, &v) in vals.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos());
            assert_relative_eq!(v, exact, max_relative = 1e-11, epsilon = 1e-9);
        }
    }

    #[test]
    fn eigenvectors_match_sines_and_are_orthogonal() {
        let n = 40;
        let tri = chain(n, 1.0);
        let (vals, vecs) = tri.eigenpairs_below(f64::INFINITY, n);
        assert_eq!(vals.len(), n);
        // residuals near machine precision
        for (k, v) in vecs.iter().enumerate() {
            assert!(tri.residual(vals[k], v) < 1e-10, "residual too large at k = {k}");
        }
        // pairwise orthogonality
        for a in 0..n {
            for b in (a + 1)..n {
                let dot: f64 = vecs[a].iter().zip(vecs[b].iter()).map(|(x, y)| x * y).sum();
                assert!(dot.abs() < 1e-9, "vectors {a}, {b} not orthogonal: {dot:e}");
            }
        }
        // shape of the ground state: positive half-sine (up to sign)
        let mut ground = vecs[0].clone();
        if ground[0] < 0.0 {
            for g in ground.iter_mut() {
                *g = -*g;
            }
        }
        for (j, g) in ground.iter().enumerate() {
            let exact = ((j + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).sin();
            let norm = (2.0 / (n as f64 + 1.0)).sqrt();
            assert_relative_eq!(*g, exact * norm, epsilon = 1e-9);
        }
    }

    #[test]
    fn partial_spectrum_matches_full() {
        let n = 200;
        let mut tri = chain(n, 0.05);
        // add an asymmetric potential to break the pure chain
        for (i, d) in tri.diag.iter_mut().enumerate() {
            *d += 3.0 / (1.0 + i as f64 * 0.05);
        }
        let full = tri.eigenvalues_all();
        let cut = full[24] + 1e-9;
        let partial = tri.eigenvalues_below(cut, usize::MAX);
        assert_eq!(partial.len(), 25);
        for (a, b) in partial.iter().zip(full.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-10);
        }
        // projected rows equal full-vector entries up to sign
        let rows = [0usize, 57, 199];
        let (_, proj) = tri.eigenpairs_projected(cut, usize::MAX, &rows);
        let (_, vecs) = tri.eigenpairs_below(cut, usize::MAX);
        for k in 0..25 {
            let sign = if (proj[k][0] - vecs[k][0]).abs() < (proj[k][0] + vecs[k][0]).abs() { 1.0 } else { -1.0 };
            for (ri, &row) in rows.iter().enumerate() {
                assert_relative_eq!(proj[k][ri], sign * vecs[k][row], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sturm_count_is_consistent() {
        let tri = chain(25, 0.3);
        let vals = tri.eigenvalues_all();
        for (k, &v) in vals.iter().enumerate() {
            assert_eq!(tri.count_below(v - 1e-9), k);
            assert_eq!(tri.count_below(v + 1e-9), k + 1);
        }
    }
}
