//! Equivalence of ensembles on a box: expectations of local functions under
//! the canonical measure (fixed particle number / fixed angle multiset,
//! exchangeable site assignment) converge to the grand-canonical product
//! expectations as the box grows, at rate 1 / box size.

use crate::rng::substream_indexed;
use rand::Rng;

/// Number of sites of the box B_l.
pub fn box_sites(l: usize) -> usize {
    (2 * l + 1) * (2 * l + 1)
}

/// Exact canonical pair correlation `E[eta_0 eta_{e1}]` with K particles on
/// B sites: hypergeometric `K(K-1) / (B(B-1))`.
pub fn canonical_pair_exact(b: usize, k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / (b * (b - 1)) as f64
}

/// Exact canonical-vs-grand-canonical gap for the pair correlation:
/// `|K(K-1)/(B(B-1)) - (K/B)^2| = K(B-K) / (B^2 (B-1))`.
pub fn pair_gap_exact(b: usize, k: usize) -> f64 {
    (k * (b - k)) as f64 / ((b * b) as f64 * (b - 1) as f64)
}

/// Exact ensemble gap for `f = eta^omega_0 eta^omega_{e1}` with a fixed
/// angle multiset `omega(a_1), .., omega(a_K)`: canonical
/// `(S1^2 - S2)/(B(B-1))` versus grand-canonical `(S1/B)^2`, where
/// `S1 = sum omega(a_j)`, `S2 = sum omega(a_j)^2`.
pub fn weighted_pair_gap_exact(b: usize, weights: &[f64]) -> f64 {
    let s1: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    let canonical = (s1 * s1 - s2) / (b * (b - 1)) as f64;
    let grand = (s1 / b as f64) * (s1 / b as f64);
    (canonical - grand).abs()
}

/// Monte-Carlo estimate (mean, standard error) of the canonical expectation
/// `E[omega-weight at site 0 times omega-weight at site e1]`: two sites of
/// an exchangeable assignment are two draws without replacement from the
/// B-slot multiset (K particle weights and B - K zeros).
pub fn canonical_pair_mc(
    b: usize,
    weights: &[f64],
    samples: usize,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let mut rng = substream_indexed(seed, "ensemble-mc", stream);
    let k = weights.len();
    let (mut acc, mut acc2) = (0.0, 0.0);
    for _ in 0..samples {
        let i = rng.gen_range(0..b);
        let mut j = rng.gen_range(0..b - 1);
        if j >= i {
            j += 1;
        }
        let wi = if i < k { weights[i] } else { 0.0 };
        let wj = if j < k { weights[j] } else { 0.0 };
        let f = wi * wj;
        acc += f;
        acc2 += f * f;
    }
    let mean = acc / samples as f64;
    let var = (acc2 / samples as f64 - mean * mean).max(0.0);
    (mean, (var / samples as f64).sqrt())
}

/// Least-squares slope of `log gap` against `log l`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Angle multiset spread evenly on the circle, weighted by cosine; the
/// standard cylinder function for the continuum-angle gap study.
pub fn cosine_weights(k: usize) -> Vec<f64> {
    (0..k)
        .map(|j| (std::f64::consts::TAU * j as f64 / k as f64 + 0.3).cos())
        .collect()
}
