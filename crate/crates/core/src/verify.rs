//! Seeded randomized equivalence between a plan and the naive basic operation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::kernels::{apply_basic_op, apply_basic_op_naive, precompute_diagonal};
use crate::plan::{KernelPlan, OutputPair, Taps, Tile};
use crate::scalar::Dyadic;

/// Largest magnitude drawn for taps and samples.
pub const DEFAULT_RANGE: i64 = 1 << 20;

/// Allowed relative error between the float kernel and the float oracle.
pub const FLOAT_REL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub m: usize,
    pub trials: usize,
    pub exact_failures: usize,
    pub float_failures: usize,
    pub max_rel_err: f64,
    /// Description of the first exact mismatch.
    pub first_failure: Option<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.exact_failures == 0 && self.float_failures == 0
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both are equal.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Runs `trials` random integer `(w, x)` draws with entries in
/// `[-range, range]` through the plan in dyadic and float mode.
///
/// The stream of draws depends only on `seed` and `plan.m()`.
pub fn check_equivalence(plan: &KernelPlan, trials: usize, seed: u64, range: i64) -> Result<EquivalenceReport> {
    let m = plan.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(m as u64);

    let mut report = EquivalenceReport {
        m,
        trials,
        exact_failures: 0,
        float_failures: 0,
        max_rel_err: 0.0,
        first_failure: None,
    };
    for trial in 0..trials {
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-range..=range)).collect();
        let x: Vec<i64> = (0..=m).map(|_| rng.gen_range(-range..=range)).collect();

        let taps = Taps::new(w.iter().map(|&v| Dyadic::from(v)).collect())?;
        let tile = Tile::new(x.iter().map(|&v| Dyadic::from(v)).collect());
        let kernel = precompute_diagonal(plan, &taps)?;
        let got = apply_basic_op(&kernel, &tile)?;
        let want = apply_basic_op_naive(&taps, &tile)?;
        if got != want {
            report.exact_failures += 1;
            report.first_failure.get_or_insert_with(|| {
                format!(
                    "trial {trial}: w={w:?} x={x:?} expected {} got {}",
                    fmt_pair(&want),
                    fmt_pair(&got)
                )
            });
        }

        let taps_f = taps.map(|v| v.to_f64());
        let tile_f = tile.map(|v| v.to_f64());
        let kernel_f = precompute_diagonal(plan, &taps_f)?;
        let got_f = apply_basic_op(&kernel_f, &tile_f)?;
        let want_f = apply_basic_op_naive(&taps_f, &tile_f)?;
        let err = rel_err(got_f.y0, want_f.y0).max(rel_err(got_f.y1, want_f.y1));
        report.max_rel_err = report.max_rel_err.max(err);
        if err.is_nan() || err > FLOAT_REL_TOL {
            report.float_failures += 1;
        }
    }
    Ok(report)
}

fn fmt_pair(p: &OutputPair<Dyadic>) -> String {
    format!("({}, {})", p.y0, p.y1)
}
