//! Executes a [`KernelPlan`] on tiles.
//!
//! The diagonal is evaluated once per filter. Each tile then costs one
//! pre-addition pass, `P` multiplications and one post-addition pass. Wrap
//! the scalar in [`Counted`](crate::scalar::Counted) to tally the arithmetic
//! of the same code path.

use crate::error::{Error, Result};
use crate::plan::{KernelPlan, OutputPair, Taps, Tile};
use crate::scalar::Scalar;

/// A plan bound to concrete taps, with the diagonal `s` precomputed.
#[derive(Clone, Debug)]
pub struct PreparedKernel<'p, S> {
    plan: &'p KernelPlan,
    s: Vec<S>,
}

impl<'p, S: Scalar> PreparedKernel<'p, S> {
    pub fn new(plan: &'p KernelPlan, taps: &Taps<S>) -> Result<Self> {
        precompute_diagonal(plan, taps)
    }

    pub fn plan(&self) -> &'p KernelPlan {
        self.plan
    }

    pub fn diagonal(&self) -> &[S] {
        &self.s
    }
}

pub fn precompute_diagonal<'p, S: Scalar>(plan: &'p KernelPlan, taps: &Taps<S>) -> Result<PreparedKernel<'p, S>> {
    if taps.m() != plan.m() {
        return Err(Error::Dimension {
            what: "taps",
            expected: plan.m(),
            found: taps.m(),
        });
    }
    plan.check_shape()?;
    Ok(PreparedKernel {
        plan,
        s: plan.diag().eval(taps.values()),
    })
}

/// Two adjacent filter outputs via `a_post · (s ⊙ (a_pre · x))`.
pub fn apply_basic_op<S: Scalar>(kernel: &PreparedKernel<'_, S>, tile: &Tile<S>) -> Result<OutputPair<S>> {
    let plan = kernel.plan;
    if tile.len() != plan.m() + 1 {
        return Err(Error::Dimension {
            what: "tile",
            expected: plan.m() + 1,
            found: tile.len(),
        });
    }
    Ok(apply_unchecked(kernel, tile.values()))
}

pub(crate) fn apply_unchecked<S: Scalar>(kernel: &PreparedKernel<'_, S>, x: &[S]) -> OutputPair<S> {
    let t = kernel.plan.a_pre().apply(x);
    let mu: Vec<S> = kernel.s.iter().zip(&t).map(|(&s, &t)| s * t).collect();
    let y = kernel.plan.a_post().apply(&mu);
    OutputPair::new(y[0], y[1])
}

/// Direct evaluation: `y0 = Σ x_i w_i`, `y1 = Σ x_{i+1} w_i`, summed in index
/// order. Costs `2m` multiplications and `2(m - 1)` additions.
pub fn apply_basic_op_naive<S: Scalar>(taps: &Taps<S>, tile: &Tile<S>) -> Result<OutputPair<S>> {
    if tile.len() != taps.m() + 1 {
        return Err(Error::Dimension {
            what: "tile",
            expected: taps.m() + 1,
            found: tile.len(),
        });
    }
    let x = tile.values();
    Ok(OutputPair::new(
        dot(taps.values(), &x[..taps.m()]),
        dot(taps.values(), &x[1..]),
    ))
}

pub(crate) fn dot<S: Scalar>(w: &[S], x: &[S]) -> S {
    let mut terms = w.iter().zip(x).map(|(&w, &x)| x * w);
    let first = terms.next().unwrap_or_else(S::zero);
    terms.fold(first, |acc, t| acc + t)
}
