//! Bundled verdicts for the exact-check suite, consumed by the CLI.

use super::ensembles::{box_sites, log_log_slope, pair_gap_exact};
use super::gap::{spectral_gap_blind, GAP_TIMES_N2_BRACKET};
use super::paths::{irreducibility_path, validate_path, FROZEN_PATH_C};
use super::tiny::TinyModel;
use crate::error::Result;
use crate::rng::substream;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub name: String,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckVerdict {
    fn below(name: &str, defect: f64, tolerance: f64) -> Self {
        CheckVerdict {
            name: name.into(),
            defect,
            tolerance,
            pass: defect <= tolerance,
        }
    }

    fn above(name: &str, defect: f64, threshold: f64) -> Self {
        CheckVerdict {
            name: name.into(),
            defect,
            tolerance: threshold,
            pass: defect > threshold,
        }
    }
}

/// Runs the full exact-check suite: dense generator identities on tiny
/// two-type tori, the angle-blind spectral gap, the constructive
/// irreducibility paths, and the ensemble-equivalence decay rate.
pub fn run_all(seed: u64) -> Result<Vec<CheckVerdict>> {
    let mut out = Vec::new();
    let mut rng = substream(seed, "exactcheck");

    for (n1, n2) in [(2usize, 2usize), (5, 1)] {
        let m = TinyModel::new(n1, n2, 1.0, 0.5)?;
        let tag = format!("{n1}x{n2}");
        let row = [
            m.generator_sym(),
            m.generator_wa(),
            m.generator_glauber(),
            m.generator_full(),
        ]
        .iter()
        .map(TinyModel::row_sum_defect)
        .fold(0.0, f64::max);
        out.push(CheckVerdict::below(&format!("row-sums-{tag}"), row, 1e-12));

        let mu = m.mu_star(0.4);
        out.push(CheckVerdict::below(
            &format!("exclusion-self-adjoint-{tag}"),
            TinyModel::self_adjoint_defect(&m.generator_sym(), &mu),
            1e-12,
        ));
        out.push(CheckVerdict::below(
            &format!("current-decomposition-{tag}"),
            m.current_decomposition_defect([0.8, -0.3]),
            1e-12,
        ));
        out.push(CheckVerdict::below(
            &format!("drift-adjoint-{tag}"),
            m.adjoint_defect(0.5),
            1e-12,
        ));

        let neutral = TinyModel::new(n1, n2, 0.0, 0.0)?;
        out.push(CheckVerdict::below(
            &format!("uniform-measure-stationary-{tag}"),
            neutral.stationarity_residual(&neutral.mu_star(0.5)),
            1e-12,
        ));
    }
    // negative control: drift on a side > 2 breaks the invariance
    let drift = TinyModel::new(5, 1, 1.0, 0.0)?;
    out.push(CheckVerdict::above(
        "drift-breaks-stationarity-5x1",
        drift.stationarity_residual(&drift.mu_star(0.5)),
        1e-3,
    ));

    out.push(CheckVerdict::below(
        "blind-gap-single-particle",
        (spectral_gap_blind(1, 1)? - 1.0).abs(),
        1e-10,
    ));
    let (lo, hi) = GAP_TIMES_N2_BRACKET;
    let mut bracket_defect = 0.0f64;
    for (n, k) in [(1usize, 2usize), (1, 4), (2, 2)] {
        let scaled = spectral_gap_blind(n, k)? * (n * n) as f64;
        bracket_defect = bracket_defect.max((scaled - hi).max(lo - scaled));
    }
    out.push(CheckVerdict::below("blind-gap-bracket", bracket_defect, 0.0));

    // constructive irreducibility on B_2: 50 random pairs, replayed
    let mut worst_len = 0usize;
    let mut invalid = 0usize;
    for _ in 0..50 {
        let holes = 2 + rng.gen::<usize>() % 6;
        let mut a: Vec<u8> = (0..25)
            .map(|i| if i < holes { 0 } else { 1 + (rng.gen::<u8>() % 4) })
            .collect();
        a.shuffle(&mut rng);
        let mut b = a.clone();
        b.shuffle(&mut rng);
        let path = irreducibility_path(&a, &b, 2)?;
        if validate_path(&a, &path, 5)? != b {
            invalid += 1;
        }
        worst_len = worst_len.max(path.len());
    }
    out.push(CheckVerdict::below("irreducibility-replay", invalid as f64, 0.0));
    out.push(CheckVerdict::below(
        "irreducibility-length",
        worst_len as f64,
        FROZEN_PATH_C * 16.0,
    ));

    let pts: Vec<(f64, f64)> = [2usize, 4, 8, 16]
        .iter()
        .map(|&l| {
            let b = box_sites(l);
            let k = (0.3 * b as f64).round() as usize;
            (l as f64, pair_gap_exact(b, k))
        })
        .collect();
    out.push(CheckVerdict::below(
        "ensemble-gap-slope",
        (log_log_slope(&pts) + 2.0).abs(),
        0.3,
    ));
    Ok(out)
}
