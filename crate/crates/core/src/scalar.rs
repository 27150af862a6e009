//! Exact arithmetic for the p-local integers A = Z_(p) and their fraction
//! field K = Q, with p-adic valuations and unit-part decompositions.
//!
//! A is modelled by the rationals of nonnegative p-valuation rather than by
//! the p-adic completion; every invariant computed downstream (ranks,
//! valuations, invariant factors) is insensitive to completion, and exact
//! rational arithmetic needs no precision management.
//!
//! `Scalar` keeps a machine-word fast path and promotes to arbitrary
//! precision on overflow, so elimination-heavy callers stay exact without
//! paying big-integer cost on small values.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// The prime p fixing the local ring Z_(p). Primality is checked at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeParam {
    p: u64,
}

impl PrimeParam {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(PrimeParam { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn value(&self) -> u64 {
        self.p
    }

    /// The uniformizer p as a scalar.
    pub fn uniformizer(&self) -> Scalar {
        Scalar::from_int(self.p as i64)
    }
}

impl fmt::Display for PrimeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

/// Deterministic Miller-Rabin for u64.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| -> u64 { ((a as u128 * b as u128) % n as u128) as u64 };
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    // These witnesses decide primality for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation: an integer or +infinity (for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An exact rational in lowest terms, with denominator positive.
///
/// Small values are stored inline as an i64/u64 pair; anything that would
/// overflow is held as a `BigRational`. Both representations are canonical
/// and mixed-representation equality is impossible: a value is `Small`
/// exactly when it fits.
#[derive(Clone)]
pub struct Scalar(Repr);

#[derive(Clone)]
enum Repr {
    Small { num: i64, den: u64 },
    Big(Box<BigRational>),
}

/// Reduce a ratio of i128s to a canonical Scalar, demoting to Small when it
/// fits.
fn make_i128(num: i128, den: i128) -> Scalar {
    debug_assert!(den != 0);
    let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
    if num == 0 {
        return Scalar(Repr::Small { num: 0, den: 1 });
    }
    let g = gcd_u64_128(num.unsigned_abs(), den as u128);
    num /= g as i128;
    den /= g as i128;
    if num >= i64::MIN as i128 && num <= i64::MAX as i128 && den <= u64::MAX as i128 {
        Scalar(Repr::Small {
            num: num as i64,
            den: den as u64,
        })
    } else {
        Scalar(Repr::Big(Box::new(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        ))))
    }
}

fn gcd_u64_128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Canonicalize a BigRational into a Scalar, demoting when small.
fn make_big(r: BigRational) -> Scalar {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_u64()) {
        return Scalar(Repr::Small { num: n, den: d });
    }
    Scalar(Repr::Big(Box::new(r)))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Scalar(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Small { num: n, den: 1 })
    }

    pub fn from_bigint(n: BigInt) -> Self {
        make_big(BigRational::from_integer(n))
    }

    /// num/den, reduced. Panics if den == 0.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        make_i128(num as i128, den as i128)
    }

    pub fn from_rational(r: BigRational) -> Self {
        make_big(r)
    }

    pub fn to_rational(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(r) => (**r).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num == 0,
            Repr::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// p-adic valuation; `Infinite` exactly for zero.
    pub fn valuation(&self, p: &PrimeParam) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        match &self.0 {
            Repr::Small { num, den } => {
                let v =
                    int_val_u128(num.unsigned_abs() as u128, p.p) - int_val_u128(*den as u128, p.p);
                Valuation::Finite(v)
            }
            Repr::Big(r) => {
                let v = bigint_val(r.numer(), p.p) - bigint_val(r.denom(), p.p);
                Valuation::Finite(v)
            }
        }
    }

    /// True when the value lies in Z_(p), i.e. valuation >= 0.
    pub fn is_integral(&self, p: &PrimeParam) -> bool {
        match self.valuation(p) {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= 0,
        }
    }

    /// The p-unit u with self = p^valuation * u. Errors on zero.
    pub fn unit_part(&self, p: &PrimeParam) -> Result<Scalar> {
        match self.valuation(p) {
            Valuation::Infinite => Err(Error::ZeroScalar),
            Valuation::Finite(v) => Ok(self * &p_power(p, -v)),
        }
    }
}

/// p^k as a scalar, for any integer k.
pub fn p_power(p: &PrimeParam, k: i64) -> Scalar {
    let e = k.unsigned_abs();
    let small: Option<i64> = if p.p <= i64::MAX as u64 {
        let mut acc: Option<i64> = Some(1);
        for _ in 0..e.min(128) {
            acc = acc.and_then(|a| a.checked_mul(p.p as i64));
        }
        if e <= 128 {
            acc
        } else {
            None
        }
    } else {
        None
    };
    match (small, k >= 0) {
        (Some(n), true) => Scalar::from_int(n),
        (Some(n), false) => make_i128(1, n as i128),
        (None, up) => {
            let mag = BigInt::from(p.p).pow(u32::try_from(e).expect("exponent too large"));
            if up {
                Scalar::from_bigint(mag)
            } else {
                make_big(BigRational::new(BigInt::from(1), mag))
            }
        }
    }
}

fn int_val_u128(mut n: u128, p: u64) -> i64 {
    debug_assert!(n != 0);
    let p = p as u128;
    let mut v = 0i64;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn bigint_val(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = num_integer_div_rem(&m, &p);
        if r.is_zero() {
            m = q;
            v += 1;
        } else {
            return v;
        }
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            // Representations are canonical: a small value never equals a big one.
            (Repr::Small { .. }, Repr::Big(_)) | (Repr::Big(_), Repr::Small { .. }) => false,
            (Repr::Big(a), Repr::Big(b)) => a == b,
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den } => {
                if *den == 1 {
                    write!(f, "{num}")
                } else {
                    write!(f, "{num}/{den}")
                }
            }
            Repr::Big(r) => write!(f, "{r}"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) =
                    (&self.0, &rhs.0)
                {
                    let f: fn(i128, i128, i128, i128) -> Option<Scalar> = $small;
                    if let Some(out) = f(*a as i128, *b as i128, *c as i128, *d as i128) {
                        return out;
                    }
                }
                let f: fn(BigRational, BigRational) -> BigRational = $big;
                make_big(f(self.to_rational(), rhs.to_rational()))
            }
        }

        impl std::ops::$trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    };
}

// Single i64 x u64 products fit i128; cross sums and denominator products are
// checked, overflowing into the arbitrary-precision path.
forward_binop!(
    Add,
    add,
    |a, b, c, d| {
        let num = (a * d).checked_add(c * b)?;
        Some(make_i128(num, b.checked_mul(d)?))
    },
    |x, y| x + y
);
forward_binop!(
    Sub,
    sub,
    |a, b, c, d| {
        let num = (a * d).checked_sub(c * b)?;
        Some(make_i128(num, b.checked_mul(d)?))
    },
    |x, y| x - y
);
forward_binop!(
    Mul,
    mul,
    |a, b, c, d| Some(make_i128(a.checked_mul(c)?, b.checked_mul(d)?)),
    |x, y| x * y
);
forward_binop!(
    Div,
    div,
    |a, b, c, d| {
        assert!(c != 0, "division by zero scalar");
        Some(make_i128(a.checked_mul(d)?, b.checked_mul(c)?))
    },
    |x, y| x / y
);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small { num, den } => make_i128(-(*num as i128), *den as i128),
            Repr::Big(r) => make_big(-(**r).clone()),
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl std::ops::SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}
