//! Full-signal filtering by sliding the basic operation two samples at a time.

use crate::error::{Error, Result};
use crate::kernels::{apply_unchecked, PreparedKernel};
use crate::oracle::Signal;
use crate::scalar::Scalar;

/// Basic operations needed for `n` samples through an `m`-tap filter.
pub fn tile_count(n: usize, m: usize) -> usize {
    if n < m {
        0
    } else {
        (n - m + 1).div_ceil(2)
    }
}

/// Valid-mode FIR output, identical to [`naive_fir`](crate::oracle::naive_fir).
///
/// Tile `k` is `x[2k ..= 2k + m]`. With an odd output count the last tile
/// runs one sample past the signal; that sample is taken as zero and the
/// tile's second output is dropped.
pub fn fir_filter<S: Scalar>(kernel: &PreparedKernel<'_, S>, signal: &Signal<S>) -> Result<Vec<S>> {
    let m = kernel.plan().m();
    let n = signal.len();
    if n < m {
        return Err(Error::SignalTooShort { n, m });
    }
    let outputs = n - m + 1;
    let x = signal.samples();

    let mut out = Vec::with_capacity(outputs + 1);
    let mut tile = Vec::with_capacity(m + 1);
    for k in 0..tile_count(n, m) {
        let start = 2 * k;
        tile.clear();
        let end = (start + m + 1).min(n);
        tile.extend_from_slice(&x[start..end]);
        tile.resize(m + 1, S::zero());
        let pair = apply_unchecked(kernel, &tile);
        out.push(pair.y0);
        out.push(pair.y1);
    }
    out.truncate(outputs);
    Ok(out)
}
