//! Minimal filtering basic operations for short FIR filters.
//!
//! A basic operation computes two adjacent outputs of an `m`-tap filter from
//! `m + 1` input samples as `y = A_post · diag(s) · A_pre · x`, where the `A`
//! matrices are ternary and `s` is precomputed from the taps. Plans exist for
//! any `m >= 1`; the 3, 5, 7, 9 and 11 tap cases need 4, 7, 10, 12 and 15
//! multiplications instead of `2m`.
//!
//! ```
//! use minfilt::{generate_plan, precompute_diagonal, apply_basic_op, Taps, Tile};
//!
//! let plan = generate_plan(3).unwrap();
//! let kernel = precompute_diagonal(&plan, &Taps::new(vec![1.0, 1.0, 1.0]).unwrap()).unwrap();
//! let y = apply_basic_op(&kernel, &Tile::new(vec![1.0, 2.0, 3.0, 4.0])).unwrap();
//! assert_eq!((y.y0, y.y1), (6.0, 9.0));
//! ```

pub mod cost;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod plan;
pub mod scalar;
pub mod stream;
pub mod verify;

pub use cost::{count_naive, count_proposed, savings_report, OpCount, SavingsRow};
pub use error::{Error, Result};
pub use kernels::{apply_basic_op, apply_basic_op_naive, precompute_diagonal, PreparedKernel};
pub use oracle::{naive_fir, Signal};
pub use plan::{
    decompose, generate_plan, validate_plan, Block, BlockKind, DiagonalSpec, DiagonalTerm, KernelPlan, OutputPair,
    Taps, TernaryMatrix, Tile, ValidationReport, Violation,
};
pub use scalar::{Counted, Dyadic, OpTally, Scalar};
pub use stream::{fir_filter, tile_count};
