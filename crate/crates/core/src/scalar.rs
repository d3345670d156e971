//! Scalar abstraction.
//!
//! Every numeric routine in the crate is written against [`Real`] (or the
//! weaker [`Field`] for routines that also make sense over exact rationals).
//! Three families of scalar are provided:
//!
//! * `f32` / `f64` for quick experiments,
//! * [`BigFloat`], a binary floating point number whose precision is taken
//!   from a process-wide context (see [`set_precision_digits`]),
//! * [`num_rational::BigRational`] (only [`Field`]) for exact determinants.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use dashu_base::{Abs, BitTest, DivRem, SquareRoot, UnsignedAbs};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::UBig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default number of significant decimal digits for [`BigFloat`].
pub const DEFAULT_PRECISION_DIGITS: u32 = 50;

/// Lowest precision accepted by [`set_precision_digits`].
pub const MIN_PRECISION_DIGITS: u32 = 30;

static PRECISION_DIGITS: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_DIGITS);

/// Sets the precision (in significant decimal digits) used for every
/// [`BigFloat`] created afterwards.
///
/// Values created earlier keep their precision; mixed arithmetic rounds to the
/// larger of the two. Intended to be called once at start-up.
pub fn set_precision_digits(digits: u32) -> Result<()> {
    if digits < MIN_PRECISION_DIGITS {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least {MIN_PRECISION_DIGITS} digits, got {digits}"
        )));
    }
    PRECISION_DIGITS.store(digits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Current [`BigFloat`] precision in significant decimal digits.
pub fn precision_digits() -> u32 {
    PRECISION_DIGITS.load(AtomicOrdering::Relaxed)
}

fn precision_bits() -> usize {
    // log2(10) = 3.3219..., plus a few guard bits
    (f64::from(precision_digits()) * std::f64::consts::LOG2_10).ceil() as usize + 4
}

/// Ordered field operations needed by elimination-style routines.
pub trait Field: Clone + fmt::Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when `self` cannot be told apart from zero at the magnitude `scale`.
    fn negligible(&self, scale: &Self) -> bool;
}

/// A real scalar with elementary functions and decimal I/O.
pub trait Real: Field + fmt::Display + FromPrimitive + ToPrimitive {
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn round(&self) -> Self;

    /// Unit roundoff of the type, or of the current context for [`BigFloat`].
    fn epsilon() -> Self;

    /// Significant decimal digits carried by the type.
    fn digits() -> u32;

    /// Parses a decimal literal (`-12.5`, `3e-7`) at full working precision.
    fn parse_decimal(s: &str) -> Result<Self>;

    /// Full-precision decimal rendering in scientific notation.
    fn to_decimal_string(&self) -> String;

    fn from_int(i: i64) -> Self {
        Self::from_i64(i).expect("every i64 is representable")
    }

    fn from_i128_exact(i: i128) -> Self {
        match i64::try_from(i) {
            Ok(small) => Self::from_int(small),
            Err(_) => {
                let hi = (i >> 62) as i64;
                let lo = (i & ((1i128 << 62) - 1)) as i64;
                Self::from_int(hi) * Self::from_int(1i64 << 62) + Self::from_int(lo)
            }
        }
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// `max(nominal, 1024 * epsilon)`: a tolerance that is meaningful for the
    /// scalar type at hand.
    fn tolerance(nominal: f64) -> Self {
        let floor = Self::epsilon() * Self::from_int(1024);
        let nominal = Self::from_f64(nominal).expect("finite tolerance");
        if nominal > floor {
            nominal
        } else {
            floor
        }
    }

    fn ln2() -> Self {
        Self::from_int(2).ln()
    }

    /// `self^e` for `self > 0`.
    fn powf(&self, e: &Self) -> Self {
        (self.ln() * e.clone()).exp()
    }

    fn powi(&self, k: i32) -> Self {
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        if k < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    /// `2^self`.
    fn exp2(&self) -> Self {
        (self.clone() * Self::ln2()).exp()
    }

    /// Real `k`-th root of a non-negative number.
    fn nth_root(&self, k: u32) -> Self {
        match k {
            _ if self.is_zero() => Self::zero(),
            1 => self.clone(),
            2 => self.sqrt(),
            _ => {
                // one Newton step on r^k = x polishes the exp/ln estimate
                let r = (self.ln() / Self::from_int(i64::from(k))).exp();
                let kk = Self::from_int(i64::from(k));
                let rk1 = r.powi(k as i32 - 1);
                r.clone() - (rk1.clone() * r - self.clone()) / (kk * rk1)
            }
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn floor_i64(&self) -> Result<i64> {
        self.floor().to_i64().ok_or(Error::Overflow("floor to i64"))
    }

    fn ceil_i64(&self) -> Result<i64> {
        self.ceil().to_i64().ok_or(Error::Overflow("ceil to i64"))
    }

    fn round_i128(&self) -> Result<i128> {
        self.round().to_i128().ok_or(Error::Overflow("round to i128"))
    }
}

/// Total order for values that are known not to be NaN.
pub fn cmp_real<T: Real>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

macro_rules! impl_primitive_real {
    ($t:ty, $digits:expr) => {
        impl Field for $t {
            fn negligible(&self, scale: &Self) -> bool {
                self.abs() <= <$t>::EPSILON * 64.0 * scale.abs().max(1.0)
            }
        }

        impl Real for $t {
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn ceil(&self) -> Self {
                <$t>::ceil(*self)
            }
            fn round(&self) -> Self {
                <$t>::round(*self)
            }
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn digits() -> u32 {
                $digits
            }
            fn parse_decimal(s: &str) -> Result<Self> {
                s.trim()
                    .parse::<$t>()
                    .map_err(|e| Error::Parse(format!("invalid number {s:?}: {e}")))
            }
            fn to_decimal_string(&self) -> String {
                format!("{:e}", self)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
        }
    };
}

impl_primitive_real!(f32, 7);
impl_primitive_real!(f64, 16);

impl Field for BigRational {
    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

/// Parses a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid decimal {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

type Inner = FBig<HalfEven, 2>;

/// Binary floating point number carrying the context precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Inner);

impl BigFloat {
    /// Attaches the context precision. Some dashu results (`exp(0)`, exact
    /// integers) come back with unlimited precision, which later panics.
    fn ctx(x: Inner) -> Self {
        BigFloat(x.with_precision(precision_bits()).value())
    }

    pub fn precision_bits(&self) -> usize {
        self.0.precision()
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $op:tt) => {
        impl $trait for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: BigFloat) -> BigFloat {
                BigFloat(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                BigFloat(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                BigFloat(self.0 $op &rhs.0)
            }
        }
        impl $assign_trait for BigFloat {
            #[inline]
            fn $assign_method(&mut self, rhs: BigFloat) {
                self.0 = &self.0 $op rhs.0;
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign, +);
forward_binop!(Sub, sub, SubAssign, sub_assign, -);
forward_binop!(Mul, mul, MulAssign, mul_assign, *);
forward_binop!(Div, div, DivAssign, div_assign, /);

impl Rem for BigFloat {
    type Output = BigFloat;
    fn rem(self, rhs: BigFloat) -> BigFloat {
        let q = (&self.0 / &rhs.0).trunc();
        BigFloat(self.0 - q * rhs.0)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        Self::ctx(Inner::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        Self::ctx(Inner::ONE)
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        if radix != 10 {
            return Err(Error::Parse(format!("unsupported radix {radix}")));
        }
        Self::parse_decimal(s)
    }
}

impl Signed for BigFloat {
    fn abs(&self) -> Self {
        BigFloat(self.0.clone().abs())
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self <= other {
            Self::zero()
        } else {
            self - other
        }
    }
    fn signum(&self) -> Self {
        Self::ctx(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.sign() == dashu_base::Sign::Positive
    }
    fn is_negative(&self) -> bool {
        !self.is_zero() && self.0.sign() == dashu_base::Sign::Negative
    }
}

impl FromPrimitive for BigFloat {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::ctx(Inner::from(n)))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::ctx(Inner::from(n)))
    }
    fn from_i128(n: i128) -> Option<Self> {
        Some(Self::ctx(Inner::from(n)))
    }
    fn from_f64(x: f64) -> Option<Self> {
        Inner::try_from(x).ok().map(Self::ctx)
    }
}

impl ToPrimitive for BigFloat {
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(self.0.trunc().to_int().value()).ok()
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self.0.trunc().to_int().value()).ok()
    }
    fn to_i128(&self) -> Option<i128> {
        i128::try_from(self.0.trunc().to_int().value()).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0.to_f64().value())
    }
}

impl Field for BigFloat {
    fn negligible(&self, scale: &Self) -> bool {
        let scale = scale.abs().max_of(Self::one());
        self.abs() <= Self::epsilon() * Self::from_int(64) * scale
    }
}

impl Real for BigFloat {
    fn sqrt(&self) -> Self {
        Self::ctx(self.0.sqrt())
    }
    fn ln(&self) -> Self {
        Self::ctx(self.0.ln())
    }
    fn exp(&self) -> Self {
        Self::ctx(self.0.exp())
    }
    fn floor(&self) -> Self {
        Self::ctx(self.0.floor())
    }
    fn ceil(&self) -> Self {
        Self::ctx(self.0.ceil())
    }
    fn round(&self) -> Self {
        Self::ctx(self.0.round())
    }
    fn epsilon() -> Self {
        let bits = precision_bits() as isize;
        Self::ctx(Inner::from_parts(1.into(), 1 - bits))
    }
    fn digits() -> u32 {
        precision_digits()
    }
    fn parse_decimal(s: &str) -> Result<Self> {
        let dec = FBig::<HalfEven, 10>::from_str(s.trim())
            .map_err(|e| Error::Parse(format!("invalid number {s:?}: {e:?}")))?;
        Ok(BigFloat(dec.with_base_and_precision::<2>(precision_bits()).value()))
    }
    fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        decimal_scientific(&self.0, precision_digits() as usize)
    }
    fn from_i128_exact(i: i128) -> Self {
        Self::ctx(Inner::from(i))
    }
}

// dashu's own base conversion evaluates logarithms on every call; exact
// integer scaling is orders of magnitude cheaper at these sizes.
fn decimal_scientific(x: &Inner, digits: usize) -> String {
    let repr = x.repr();
    let neg = repr.significand().sign() == dashu_base::Sign::Negative;
    let m = repr.significand().clone().unsigned_abs();
    let e = repr.exponent();
    let top = UBig::from(10u8).pow(digits);
    let mut k = (((m.bit_len() as f64 - 1.0) + e as f64) * std::f64::consts::LOG10_2).floor() as isize;
    let q = loop {
        // q = round_half_even(m · 2^e · 10^(digits − 1 − k))
        let s = digits as isize - 1 - k;
        let mut num = m.clone();
        let mut den = UBig::ONE;
        if e >= 0 {
            num <<= e as usize;
        } else {
            den <<= (-e) as usize;
        }
        if s >= 0 {
            num *= UBig::from(10u8).pow(s as usize);
        } else {
            den *= UBig::from(10u8).pow((-s) as usize);
        }
        let (mut q, r) = num.div_rem(&den);
        let twice = r << 1;
        if twice > den || (twice == den && q.bit(0)) {
            q += UBig::ONE;
        }
        if q >= top {
            k += 1;
        } else if q < UBig::from(10u8).pow(digits - 1) {
            k -= 1;
        } else {
            break q;
        }
    };
    let text = q.to_string();
    let text = text.trim_end_matches('0');
    let (lead, rest) = text.split_at(1);
    let sign = if neg { "-" } else { "" };
    if rest.is_empty() {
        format!("{sign}{lead}e{k}")
    } else {
        format!("{sign}{lead}.{rest}e{k}")
    }
}

impl FromStr for BigFloat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_decimal(s)
    }
}
