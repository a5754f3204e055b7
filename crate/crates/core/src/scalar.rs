//! Numeric scalars the kernels are generic over.
//!
//! Two concrete representations are provided: `f64` and [`Dyadic`], an exact
//! rational whose denominator is a power of two. The halved diagonal terms of
//! the minimal filtering kernels only ever introduce factors of 1/2, so dyadic
//! arithmetic is closed under everything a kernel does and lets the fast path
//! be compared bit-for-bit against the naive one.
//!
//! [`Counted`] wraps any scalar and tallies the additions and multiplications
//! performed through it on the current thread.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Copy + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact division by two (a single rounding in floating point).
    fn half(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn half(self) -> Self {
        self / 2.0
    }
}

/// Exact value `num / 2^exp`.
///
/// Kept in lowest terms: either `exp == 0` or the numerator is odd, and zero
/// is always `0 / 2^0`.
/// Arithmetic panics on `i128` overflow instead of wrapping, so every value
/// that is produced is exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        Self { num, exp }.normalized()
    }

    pub fn from_int(v: i128) -> Self {
        Self { num: v, exp: 0 }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    /// Power of two in the denominator.
    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn to_f64(&self) -> f64 {
        // exp is small in practice; powi keeps the scaling exact
        self.num as f64 * 2f64.powi(-(self.exp as i32))
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.exp = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    fn scaled_num(&self, exp: u32) -> i128 {
        let shift = exp - self.exp;
        1i128
            .checked_shl(shift)
            .and_then(|f| self.num.checked_mul(f))
            .expect("dyadic numerator overflow")
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exp = self.exp.max(rhs.exp);
        let num = self
            .scaled_num(exp)
            .checked_add(rhs.scaled_num(exp))
            .expect("dyadic numerator overflow");
        Dyadic { num, exp }.normalized()
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            num: self.num.checked_neg().expect("dyadic numerator overflow"),
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let num = self.num.checked_mul(rhs.num).expect("dyadic numerator overflow");
        let exp = self.exp.checked_add(rhs.exp).expect("dyadic exponent overflow");
        Dyadic { num, exp }.normalized()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.scaled_num(exp).cmp(&other.scaled_num(exp))
    }
}

impl Scalar for Dyadic {
    fn zero() -> Self {
        Dyadic::ZERO
    }

    fn from_i64(v: i64) -> Self {
        Dyadic::from_int(v as i128)
    }

    fn half(self) -> Self {
        Dyadic {
            num: self.num,
            exp: self.exp.checked_add(1).expect("dyadic exponent overflow"),
        }
        .normalized()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v as i128)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else if self.exp < 127 {
            write!(f, "{}/{}", self.num, 1i128 << self.exp)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

thread_local! {
    static MULS: Cell<u64> = const { Cell::new(0) };
    static ADDS: Cell<u64> = const { Cell::new(0) };
}

fn bump(counter: &'static std::thread::LocalKey<Cell<u64>>) {
    counter.with(|c| c.set(c.get() + 1));
}

/// Arithmetic tallies recorded by [`Counted`] on the current thread.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    pub multiplications: u64,
    pub additions: u64,
}

impl OpTally {
    pub fn reset() {
        MULS.with(|c| c.set(0));
        ADDS.with(|c| c.set(0));
    }

    pub fn current() -> OpTally {
        OpTally {
            multiplications: MULS.with(Cell::get),
            additions: ADDS.with(Cell::get),
        }
    }

    /// Runs `f` with fresh counters and returns its result with the tally.
    pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpTally) {
        Self::reset();
        let out = f();
        (out, Self::current())
    }
}

/// Scalar wrapper counting additions, subtractions and multiplications.
///
/// Negation and halving are not counted: sign flips are wiring in hardware,
/// and halving only happens when the diagonal is precomputed from the taps.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Counted<S>(pub S);

impl<S: Scalar> Add for Counted<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        bump(&ADDS);
        Counted(self.0 + rhs.0)
    }
}

impl<S: Scalar> Sub for Counted<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        bump(&ADDS);
        Counted(self.0 - rhs.0)
    }
}

impl<S: Scalar> Mul for Counted<S> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        bump(&MULS);
        Counted(self.0 * rhs.0)
    }
}

impl<S: Scalar> Neg for Counted<S> {
    type Output = Self;

    fn neg(self) -> Self {
        Counted(-self.0)
    }
}

impl<S: Scalar> Scalar for Counted<S> {
    fn zero() -> Self {
        Counted(S::zero())
    }

    fn from_i64(v: i64) -> Self {
        Counted(S::from_i64(v))
    }

    fn half(self) -> Self {
        Counted(self.0.half())
    }
}
