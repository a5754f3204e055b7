//! Reference FIR filter, evaluated term by term.
//!
//! Indexing is correlation style, `y_j = Σ_i x_{i+j} w_i`, with no tap
//! reversal. Only valid outputs are produced: `N - m + 1` of them.

use crate::error::{Error, Result};
use crate::kernels::dot;
use crate::plan::Taps;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Signal<S>(Vec<S>);

impl<S: Scalar> Signal<S> {
    pub fn new(samples: Vec<S>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        Ok(Self(samples))
    }

    pub fn samples(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Signal<T> {
        Signal(self.0.iter().copied().map(f).collect())
    }
}

pub fn naive_fir<S: Scalar>(signal: &Signal<S>, taps: &Taps<S>) -> Result<Vec<S>> {
    let (n, m) = (signal.len(), taps.m());
    if n < m {
        return Err(Error::SignalTooShort { n, m });
    }
    Ok(signal
        .samples()
        .windows(m)
        .map(|window| dot(taps.values(), window))
        .collect())
}
