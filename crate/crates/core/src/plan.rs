//! Kernel plans: the factorization `y = A_post · diag(s) · A_pre · x` of one
//! basic filtering operation.
//!
//! A basic operation takes a tile of `m + 1` consecutive samples and produces
//! the two adjacent outputs of an `m`-tap FIR filter. Plans are built from
//! three block kinds laid over the taps:
//!
//! * `Wino3`: the F(2,3) minimal filtering trick, 3 taps in 4 products.
//! * `Pair2`: 2 taps in 3 products (`w_a`, `w_a + w_b`, `w_b`).
//! * `Pass1`: 1 tap in 2 direct products.
//!
//! Each block contributes its own rows to `A_pre` and the diagonal, and its
//! own columns to `A_post`. Every matrix entry stays in `{-1, 0, 1}`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{apply_basic_op, apply_basic_op_naive, PreparedKernel};
use crate::scalar::{Dyadic, Scalar};

/// Filter coefficients `w_0..w_{m-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Taps<S>(Vec<S>);

impl<S: Scalar> Taps<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidTapCount(0));
        }
        Ok(Self(values))
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[S] {
        &self.0
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Taps<T> {
        Taps(self.0.iter().copied().map(f).collect())
    }
}

/// The `m + 1` input samples `x_0..x_m` read by one basic operation.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile<S>(Vec<S>);

impl<S: Scalar> Tile<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[S] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Tile<T> {
        Tile(self.0.iter().copied().map(f).collect())
    }
}

/// Outputs at window offsets 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputPair<S> {
    pub y0: S,
    pub y1: S,
}

impl<S> OutputPair<S> {
    pub fn new(y0: S, y1: S) -> Self {
        Self { y0, y1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Wino3,
    Pass1,
    Pair2,
}

impl BlockKind {
    pub fn taps(self) -> usize {
        match self {
            BlockKind::Wino3 => 3,
            BlockKind::Pass1 => 1,
            BlockKind::Pair2 => 2,
        }
    }

    pub fn products(self) -> usize {
        match self {
            BlockKind::Wino3 => 4,
            BlockKind::Pass1 => 2,
            BlockKind::Pair2 => 3,
        }
    }

    /// Number of tile samples the block reads, starting at its tap offset.
    pub fn window(self) -> usize {
        self.taps() + 1
    }

    // Local factorization of the block, relative to its tap offset `t`:
    // pre rows index x_t.., diag terms index w_t.., post columns index the
    // block's own products.

    fn local_pre(self) -> &'static [&'static [i8]] {
        match self {
            // x0 - x2, x1 + x2, x2 - x1, x1 - x3
            BlockKind::Wino3 => &[&[1, 0, -1, 0], &[0, 1, 1, 0], &[0, -1, 1, 0], &[0, 1, 0, -1]],
            BlockKind::Pass1 => &[&[1, 0], &[0, 1]],
            // x0 - x1, x1, x2 - x1
            BlockKind::Pair2 => &[&[1, -1, 0], &[0, 1, 0], &[0, -1, 1]],
        }
    }

    fn local_diag(self) -> &'static [(&'static [i8], bool)] {
        match self {
            BlockKind::Wino3 => &[
                (&[1, 0, 0], false),
                (&[1, 1, 1], true),
                (&[1, -1, 1], true),
                (&[0, 0, 1], false),
            ],
            BlockKind::Pass1 => &[(&[1], false), (&[1], false)],
            BlockKind::Pair2 => &[(&[1, 0], false), (&[1, 1], false), (&[0, 1], false)],
        }
    }

    fn local_post(self) -> [&'static [i8]; 2] {
        match self {
            BlockKind::Wino3 => [&[1, 1, 1, 0], &[0, 1, -1, -1]],
            BlockKind::Pass1 => [&[1, 0], &[0, 1]],
            BlockKind::Pair2 => [&[1, 1, 0], &[0, 1, 1]],
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::Wino3 => "wino3",
            BlockKind::Pass1 => "pass1",
            BlockKind::Pair2 => "pair2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    #[serde(rename = "offset")]
    pub tap_offset: usize,
}

impl Block {
    pub fn new(kind: BlockKind, tap_offset: usize) -> Self {
        Self { kind, tap_offset }
    }
}

/// Dense row-major matrix of small integers, expected to be ternary.
///
/// Construction only enforces a rectangular shape; entries outside
/// `{-1, 0, 1}` are representable so that [`validate_plan`] can report them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl TernaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::MalformedPlan(format!(
                "ragged matrix: row {i} has {} entries, row 0 has {cols}",
                r.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i8) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_ternary(&self) -> bool {
        self.entries.iter().all(|e| (-1..=1).contains(e))
    }

    /// Non-zero entries per row.
    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().filter(|&&e| e != 0).count()
    }

    /// Matrix-vector product. Ternary entries cost only additions and sign
    /// flips; a row with `k` non-zeros performs `k - 1` additions.
    pub fn apply<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| combine(self.row(r), x)).collect()
    }
}

/// Signed sum `Σ coeffs[i]·x[i]`, in index order.
pub(crate) fn combine<S: Scalar>(coeffs: &[i8], x: &[S]) -> S {
    let mut acc: Option<S> = None;
    for (&c, &v) in coeffs.iter().zip(x) {
        acc = match (c, acc) {
            (0, a) => a,
            (1, None) => Some(v),
            (-1, None) => Some(-v),
            (1, Some(a)) => Some(a + v),
            (-1, Some(a)) => Some(a - v),
            // only reachable for plans that fail validation
            (c, None) => Some(S::from_i64(c as i64) * v),
            (c, Some(a)) => Some(a + S::from_i64(c as i64) * v),
        };
    }
    acc.unwrap_or_else(S::zero)
}

/// One diagonal entry: `(Σ coeffs[i]·w_i) / (2 if halved)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalTerm {
    pub coeffs: Vec<i8>,
    pub halved: bool,
}

impl DiagonalTerm {
    pub fn eval<S: Scalar>(&self, taps: &[S]) -> S {
        let v = combine(&self.coeffs, taps);
        if self.halved {
            v.half()
        } else {
            v
        }
    }

    /// True for `(w_a ± w_{a+1} + w_{a+2})/2` shaped terms.
    fn is_halved_triple(&self) -> bool {
        let nz: Vec<usize> = (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).collect();
        match nz.as_slice() {
            &[a, b, c] => {
                b == a + 1 && c == a + 2 && self.coeffs[a] == 1 && self.coeffs[c] == 1 && self.coeffs[b].abs() == 1
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiagonalSpec {
    pub terms: Vec<DiagonalTerm>,
}

impl DiagonalSpec {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval<S: Scalar>(&self, taps: &[S]) -> Vec<S> {
        self.terms.iter().map(|t| t.eval(taps)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPlan {
    m: usize,
    blocks: Vec<Block>,
    a_pre: TernaryMatrix,
    diag: DiagonalSpec,
    a_post: TernaryMatrix,
}

impl KernelPlan {
    /// Assembles a plan from raw parts without checking it. Use
    /// [`validate_plan`] before trusting a plan built this way.
    pub fn from_parts(
        m: usize,
        blocks: Vec<Block>,
        a_pre: TernaryMatrix,
        diag: DiagonalSpec,
        a_post: TernaryMatrix,
    ) -> Self {
        Self {
            m,
            blocks,
            a_pre,
            diag,
            a_post,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn a_pre(&self) -> &TernaryMatrix {
        &self.a_pre
    }

    pub fn a_post(&self) -> &TernaryMatrix {
        &self.a_post
    }

    pub fn diag(&self) -> &DiagonalSpec {
        &self.diag
    }

    /// Product count P implied by the block structure.
    pub fn p(&self) -> usize {
        self.blocks.iter().map(|b| b.kind.products()).sum()
    }

    pub fn into_parts(self) -> (usize, Vec<Block>, TernaryMatrix, DiagonalSpec, TernaryMatrix) {
        (self.m, self.blocks, self.a_pre, self.diag, self.a_post)
    }

    /// Checks the dimensions the executor relies on.
    pub(crate) fn check_shape(&self) -> Result<()> {
        let p = self.a_pre.rows();
        let checks = [
            ("a_pre columns", self.m + 1, self.a_pre.cols()),
            ("diagonal length", p, self.diag.len()),
            ("a_post columns", p, self.a_post.cols()),
            ("a_post rows", 2, self.a_post.rows()),
        ];
        for (what, expected, found) in checks {
            if expected != found {
                return Err(Error::Dimension { what, expected, found });
            }
        }
        for t in &self.diag.terms {
            if t.coeffs.len() != self.m {
                return Err(Error::Dimension {
                    what: "diagonal term length",
                    expected: self.m,
                    found: t.coeffs.len(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PlanDoc::from(self)).expect("plan serialization cannot fail")
    }

    /// Parses the JSON plan document. Only the document shape is checked.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PlanDoc = serde_json::from_str(s)?;
        Ok(Self {
            m: doc.m,
            blocks: doc.blocks,
            a_pre: TernaryMatrix::from_rows(doc.a_pre)?,
            a_post: TernaryMatrix::from_rows(doc.a_post)?,
            diag: DiagonalSpec { terms: doc.diag },
        })
    }
}

// Field order here is the canonical key order of the JSON document.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    m: usize,
    blocks: Vec<Block>,
    a_pre: Vec<Vec<i8>>,
    a_post: Vec<Vec<i8>>,
    diag: Vec<DiagonalTerm>,
}

impl From<&KernelPlan> for PlanDoc {
    fn from(p: &KernelPlan) -> Self {
        PlanDoc {
            m: p.m,
            blocks: p.blocks.clone(),
            a_pre: p.a_pre.to_rows(),
            a_post: p.a_post.to_rows(),
            diag: p.diag.terms.clone(),
        }
    }
}

/// Splits `m` taps into blocks.
///
/// Greedy 3-tap blocks, then a `Pass1` for one leftover tap or a `Pair2` for
/// two. For `m = 7` the `Pass1` sits between the two `Wino3` blocks.
pub fn decompose(m: usize) -> Result<Vec<Block>> {
    if m == 0 {
        return Err(Error::InvalidTapCount(m));
    }
    if m == 7 {
        return Ok(vec![
            Block::new(BlockKind::Wino3, 0),
            Block::new(BlockKind::Pass1, 3),
            Block::new(BlockKind::Wino3, 4),
        ]);
    }
    let mut blocks: Vec<Block> = (0..m / 3).map(|i| Block::new(BlockKind::Wino3, 3 * i)).collect();
    let tail = 3 * (m / 3);
    match m % 3 {
        1 => blocks.push(Block::new(BlockKind::Pass1, tail)),
        2 => blocks.push(Block::new(BlockKind::Pair2, tail)),
        _ => {}
    }
    Ok(blocks)
}

/// Product count for `m` taps without building the plan.
pub fn product_count(m: usize) -> Result<usize> {
    Ok(decompose(m)?.iter().map(|b| b.kind.products()).sum())
}

pub fn generate_plan(m: usize) -> Result<KernelPlan> {
    let blocks = decompose(m)?;
    let p: usize = blocks.iter().map(|b| b.kind.products()).sum();

    let mut a_pre = TernaryMatrix::zeros(p, m + 1);
    let mut a_post = TernaryMatrix::zeros(2, p);
    let mut terms = Vec::with_capacity(p);

    let mut row = 0;
    for b in &blocks {
        let t = b.tap_offset;
        let post = b.kind.local_post();
        for (k, (pre, (coeffs, halved))) in b.kind.local_pre().iter().zip(b.kind.local_diag()).enumerate() {
            for (j, &e) in pre.iter().enumerate() {
                a_pre.set(row + k, t + j, e);
            }
            let mut full = vec![0i8; m];
            full[t..t + coeffs.len()].copy_from_slice(coeffs);
            terms.push(DiagonalTerm {
                coeffs: full,
                halved: *halved,
            });
            a_post.set(0, row + k, post[0][k]);
            a_post.set(1, row + k, post[1][k]);
        }
        row += b.kind.products();
    }

    Ok(KernelPlan {
        m,
        blocks,
        a_pre,
        diag: DiagonalSpec { terms },
        a_post,
    })
}

/// A single failed check from [`validate_plan`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    InvalidTapCount,
    NonTernary {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: i8,
    },
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    Tiling(String),
    HalvedForm {
        term: usize,
    },
    Identity {
        failed_trials: usize,
        trials: usize,
        first: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidTapCount => write!(f, "tap count must be at least 1"),
            Violation::NonTernary {
                matrix,
                row,
                col,
                value,
            } => write!(f, "ternary-entry violation: {matrix}[{row}][{col}] = {value}"),
            Violation::Dimension { what, expected, found } => {
                write!(f, "dimension violation: {what} is {found}, expected {expected}")
            }
            Violation::Tiling(msg) => write!(f, "tiling violation: {msg}"),
            Violation::HalvedForm { term } => write!(
                f,
                "diagonal violation: term {term} is halved but not of the form (w_a ± w_a+1 + w_a+2)/2"
            ),
            Violation::Identity {
                failed_trials,
                trials,
                first,
            } => write!(
                f,
                "identity violation: {failed_trials}/{trials} trials differ from the naive result ({first})"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_identity_violation(&self) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Identity { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "all checks pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

const IDENTITY_TRIALS: usize = 100;
const IDENTITY_SEED: u64 = 0x006d_696e_6669_6c74;
const IDENTITY_RANGE: i64 = 1 << 10;

/// Checks every structural invariant of `plan` and the correctness identity
/// against the naive basic operation on a fixed set of random integer
/// inputs, in exact arithmetic. Failures are collected, never returned as
/// errors.
pub fn validate_plan(plan: &KernelPlan) -> ValidationReport {
    let mut v = Vec::new();
    let m = plan.m;
    if m == 0 {
        v.push(Violation::InvalidTapCount);
    }

    let mut covered = vec![0usize; m];
    for b in &plan.blocks {
        let end = b.tap_offset + b.kind.taps();
        if end > m {
            v.push(Violation::Tiling(format!(
                "{} block at offset {} runs past tap {}",
                b.kind,
                b.tap_offset,
                m.saturating_sub(1)
            )));
            continue;
        }
        for c in &mut covered[b.tap_offset..end] {
            *c += 1;
        }
    }
    for (i, &c) in covered.iter().enumerate() {
        if c != 1 {
            v.push(Violation::Tiling(format!("tap {i} covered {c} times")));
        }
    }

    let p = plan.p();
    let mut dim = |what: &str, expected: usize, found: usize| {
        if expected != found {
            v.push(Violation::Dimension {
                what: what.to_string(),
                expected,
                found,
            });
        }
    };
    dim("a_pre rows", p, plan.a_pre.rows());
    dim("a_pre columns", m + 1, plan.a_pre.cols());
    dim("diagonal terms", p, plan.diag.len());
    dim("a_post rows", 2, plan.a_post.rows());
    dim("a_post columns", p, plan.a_post.cols());
    for (k, t) in plan.diag.terms.iter().enumerate() {
        dim(&format!("diagonal term {k} length"), m, t.coeffs.len());
    }

    for (name, mat) in [("a_pre", &plan.a_pre), ("a_post", &plan.a_post)] {
        for r in 0..mat.rows() {
            for c in 0..mat.cols() {
                let value = mat.get(r, c);
                if !(-1..=1).contains(&value) {
                    v.push(Violation::NonTernary {
                        matrix: name,
                        row: r,
                        col: c,
                        value,
                    });
                }
            }
        }
    }
    for (k, t) in plan.diag.terms.iter().enumerate() {
        for (i, &value) in t.coeffs.iter().enumerate() {
            if !(-1..=1).contains(&value) {
                v.push(Violation::NonTernary {
                    matrix: "diag",
                    row: k,
                    col: i,
                    value,
                });
            }
        }
        if t.halved && !t.is_halved_triple() {
            v.push(Violation::HalvedForm { term: k });
        }
    }

    if m > 0 && plan.check_shape().is_ok() {
        if let Some(violation) = check_identity(plan) {
            v.push(violation);
        }
    }

    ValidationReport { violations: v }
}

fn check_identity(plan: &KernelPlan) -> Option<Violation> {
    let mut rng = ChaCha8Rng::seed_from_u64(IDENTITY_SEED);
    let mut failed = 0;
    let mut first = None;
    for trial in 0..IDENTITY_TRIALS {
        let mut draw = |n: usize| -> Vec<Dyadic> {
            (0..n)
                .map(|_| Dyadic::from(rng.gen_range(-IDENTITY_RANGE..=IDENTITY_RANGE)))
                .collect()
        };
        let taps = Taps::new(draw(plan.m)).expect("m > 0");
        let tile = Tile::new(draw(plan.m + 1));
        let kernel = PreparedKernel::new(plan, &taps).expect("shape checked");
        let got = apply_basic_op(&kernel, &tile).expect("shape checked");
        let want = apply_basic_op_naive(&taps, &tile).expect("shape checked");
        if got != want {
            failed += 1;
            first.get_or_insert_with(|| {
                format!(
                    "trial {trial}: expected ({}, {}), got ({}, {})",
                    want.y0, want.y1, got.y0, got.y1
                )
            });
        }
    }
    first.map(|first| Violation::Identity {
        failed_trials: failed,
        trials: IDENTITY_TRIALS,
        first,
    })
}
