//! Scalar types for Fourier coefficients.
//!
//! Everything in `cutspace` and `constructions` is generic over [`Coefficient`].
//! [`Dyadic`] is the exact default; `BigRational` is the exact fallback for
//! anything leaving the dyadic ring, and `f64` is available for quick numeric
//! experiments where exact-zero tests are not required.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ring operations needed to manipulate sparse Fourier expansions.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
    /// Whether equality tests on this type are exact.
    const EXACT: bool;

    /// `2^exp`.
    fn pow2(exp: i32) -> Self;

    fn from_i64(value: i64) -> Self;
}

/// Exact number `mantissa / 2^exponent`, kept normalized.
///
/// Arithmetic is exact. Overflowing the 128-bit mantissa panics instead of
/// rounding.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: i128,
    exponent: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        mantissa: 0,
        exponent: 0,
    };
    pub const ONE: Dyadic = Dyadic {
        mantissa: 1,
        exponent: 0,
    };

    pub fn new(mantissa: i128, exponent: u32) -> Self {
        if mantissa == 0 {
            return Self::ZERO;
        }
        let shift = mantissa.trailing_zeros().min(exponent);
        Dyadic {
            mantissa: mantissa >> shift,
            exponent: exponent - shift,
        }
    }

    pub fn from_int(value: i128) -> Self {
        Dyadic::new(value, 0)
    }

    pub fn mantissa(&self) -> i128 {
        self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `self / 2^k`.
    pub fn scale_down(self, k: u32) -> Self {
        Dyadic::new(self.mantissa, self.exponent + k)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.mantissa),
            BigInt::from(1u8) << self.exponent as usize,
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 / 2f64.powi(self.exponent as i32)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (i128, i128, u32) {
        let e = a.exponent.max(b.exponent);
        (
            lift(a.mantissa, e - a.exponent),
            lift(b.mantissa, e - b.exponent),
            e,
        )
    }
}

fn lift(m: i128, shift: u32) -> i128 {
    if m == 0 {
        return 0;
    }
    assert!(shift < 127, "dyadic exponent gap too large");
    m.checked_mul(1i128 << shift)
        .expect("dyadic mantissa overflow")
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

/// Text form `<mantissa>/2^<exponent>`, the coefficient format of network files.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDyadicError(pub String);

impl fmt::Display for ParseDyadicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid dyadic literal `{}`", self.0)
    }
}

impl std::error::Error for ParseDyadicError {}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let (m, e) = match s.split_once("/2^") {
            Some((m, e)) => (m, e.parse::<u32>().map_err(|_| err())?),
            None => (s, 0),
        };
        let m = m.parse::<i128>().map_err(|_| err())?;
        if e > 126 {
            return Err(err());
        }
        Ok(Dyadic::new(m, e))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::aligned(&self, &rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic mantissa overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = Dyadic::aligned(&self, &rhs);
        Dyadic::new(a.checked_sub(b).expect("dyadic mantissa overflow"), e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let m = self
            .mantissa
            .checked_mul(rhs.mantissa)
            .expect("dyadic mantissa overflow");
        Dyadic::new(m, self.exponent + rhs.exponent)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.mantissa == 0
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Self::ONE
    }
}

impl Coefficient for Dyadic {
    const EXACT: bool = true;

    fn pow2(exp: i32) -> Self {
        if exp >= 0 {
            Dyadic::new(lift(1, exp as u32), 0)
        } else {
            Dyadic::new(1, exp.unsigned_abs())
        }
    }

    fn from_i64(value: i64) -> Self {
        Dyadic::from_int(value as i128)
    }
}

impl Coefficient for BigRational {
    const EXACT: bool = true;

    fn pow2(exp: i32) -> Self {
        let p = BigInt::from(1u8) << exp.unsigned_abs() as usize;
        if exp >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::from(1u8), p)
        }
    }

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
}

impl Coefficient for f64 {
    const EXACT: bool = false;

    fn pow2(exp: i32) -> Self {
        2f64.powi(exp)
    }

    fn from_i64(value: i64) -> Self {
        value as f64
    }
}

/// `log2` of a positive rational, accurate to f64 precision even when
/// numerator and denominator overflow f64.
pub fn log2_rational(value: &BigRational) -> f64 {
    assert!(value.is_positive(), "log2 of a non-positive value");
    log2_bigint(value.numer()) - log2_bigint(value.denom())
}

pub fn log2_bigint(value: &BigInt) -> f64 {
    let bits = value.bits();
    if bits <= 1000 {
        return value.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top: BigInt = value >> shift as usize;
    top.to_f64().expect("finite").log2() + shift as f64
}
