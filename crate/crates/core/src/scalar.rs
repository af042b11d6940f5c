//! Scalar abstraction: exact rational arithmetic (the default) and an IEEE
//! double backend for the few places that are inherently numeric.
//!
//! Every algebraic module is generic over [`Scalar`]. The exact backend is
//! [`Rat`] (= `num_rational::BigRational`); the float backend is `f64` and
//! exists for quadrature cross-checks and for dihedral groups without a
//! rational orthogonal realization. The two modes never mix inside one
//! computation: mixing is a compile error because the scalar type is fixed
//! by the caller.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{DunklError, Result};

/// Exact rational scalar.
pub type Rat = num_rational::BigRational;

/// Residual/dedup tolerance for the float backend. Exact mode tolerates
/// nothing; float mode treats values below this as zero when matching group
/// elements, roots, and division remainders.
pub const FLOAT_NEGLIGIBLE: f64 = 1e-9;

/// Field of coefficients for polynomials, matrices, and operators.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and equality is meaningful.
    const IS_EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Inject an f64. `None` in exact mode: a double has no preferred exact
    /// preimage, and the only callers are trigonometric presets that must be
    /// rejected there.
    fn from_f64(x: f64) -> Option<Self>;

    fn is_zero(&self) -> bool;

    /// Exact mode: `is_zero`. Float mode: `|self| < FLOAT_NEGLIGIBLE`.
    fn is_negligible(&self) -> bool;

    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    /// Parse "3", "-3/4", or "1.25". Float mode additionally accepts any
    /// literal `f64::from_str` understands.
    fn parse(s: &str) -> Result<Self>;

    /// Canonical text form; `parse` round-trips it bit-exactly.
    fn render(&self) -> String;

    /// Total order usable as a map key (exact: `Ord`; float: IEEE totalOrder).
    fn key_cmp(&self, other: &Self) -> Ordering;

    // Reference-based ops so hot paths avoid gratuitous clones of big rationals.
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn add_assign_ref(&mut self, o: &Self) {
        *self = self.add_ref(o);
    }

    fn is_positive_val(&self) -> bool {
        matches!(self.partial_cmp(&Self::zero()), Some(Ordering::Greater))
    }

    fn is_negative_val(&self) -> bool {
        matches!(self.partial_cmp(&Self::zero()), Some(Ordering::Less))
    }

    fn pow_u(&self, e: u32) -> Self {
        // binary exponentiation; e == 0 gives 1
        let mut base = self.clone();
        let mut e = e;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }
}

fn parse_decimal_rat(s: &str) -> Option<Rat> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(Rat::new(BigInt::from(sign) * numer, denom))
}

impl Scalar for Rat {
    const IS_EXACT: bool = true;

    fn zero() -> Self {
        <Rat as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <Rat as num_traits::One>::one()
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(r) = parse_decimal_rat(t) {
            return Ok(r);
        }
        t.parse::<Rat>()
            .map_err(|e| DunklError::Parse(format!("bad rational {t:?}: {e}")))
    }
    fn render(&self) -> String {
        self.to_string()
    }
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) < FLOAT_NEGLIGIBLE
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|e| DunklError::Parse(format!("bad numerator {n:?}: {e}")))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|e| DunklError::Parse(format!("bad denominator {d:?}: {e}")))?;
            if d == 0.0 {
                return Err(DunklError::Parse("zero denominator".into()));
            }
            return Ok(n / d);
        }
        t.parse::<f64>()
            .map_err(|e| DunklError::Parse(format!("bad float {t:?}: {e}")))
    }
    fn render(&self) -> String {
        // `Display` for f64 is shortest-round-trip, so parse(render(x)) == x.
        format!("{self}")
    }
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// n! as a scalar (exact in exact mode; factorial arguments here stay small
/// enough for f64 in float mode).
pub fn factorial<S: Scalar>(n: usize) -> S {
    let mut acc = S::one();
    for i in 2..=n {
        acc = acc.mul_ref(&S::from_i64(i as i64));
    }
    acc
}

/// Complex number over a scalar backend. Real and imaginary parts stay exact
/// in exact mode; magnitudes are taken in f64 at the very end.
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cplx<S> {
    pub fn new(re: S, im: S) -> Self {
        Cplx { re, im }
    }
    pub fn zero() -> Self {
        Cplx::new(S::zero(), S::zero())
    }
    pub fn one() -> Self {
        Cplx::new(S::one(), S::zero())
    }
    pub fn i() -> Self {
        Cplx::new(S::zero(), S::one())
    }
    pub fn from_re(re: S) -> Self {
        Cplx::new(re, S::zero())
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Cplx::new(self.re.clone(), self.im.neg_ref())
    }
    pub fn add(&self, o: &Self) -> Self {
        Cplx::new(self.re.add_ref(&o.re), self.im.add_ref(&o.im))
    }
    pub fn sub(&self, o: &Self) -> Self {
        Cplx::new(self.re.sub_ref(&o.re), self.im.sub_ref(&o.im))
    }
    pub fn mul(&self, o: &Self) -> Self {
        Cplx::new(
            self.re.mul_ref(&o.re).sub_ref(&self.im.mul_ref(&o.im)),
            self.re.mul_ref(&o.im).add_ref(&self.im.mul_ref(&o.re)),
        )
    }
    pub fn scale(&self, c: &S) -> Self {
        Cplx::new(self.re.mul_ref(c), self.im.mul_ref(c))
    }
    pub fn norm_sq(&self) -> S {
        self.re
            .mul_ref(&self.re)
            .add_ref(&self.im.mul_ref(&self.im))
    }
    pub fn magnitude(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }
    pub fn pow_u(&self, e: u32) -> Self {
        let mut acc = Cplx::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parse "a", "bi", "a+bi", "a-bi" with scalar literals for a and b
    /// ("i" and "-i" denote unit imaginary parts).
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(DunklError::Parse("empty complex literal".into()));
        }
        // split at the last '+'/'-' that is not the leading sign
        let bytes = t.as_bytes();
        let mut split_at = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' {
                split_at = Some(i);
                break;
            }
        }
        let parse_im = |part: &str| -> Result<S> {
            match part {
                "i" | "+i" => Ok(S::one()),
                "-i" => Ok(S::one().neg_ref()),
                _ => S::parse(part),
            }
        };
        match split_at {
            Some(i) if t.ends_with('i') => {
                let re = S::parse(&t[..i])?;
                let im_str = format!("{}{}", &t[i..i + 1], &t[i + 1..t.len() - 1]);
                let im = if im_str == "+" || im_str == "-" {
                    parse_im(&format!("{im_str}i"))?
                } else {
                    S::parse(&im_str)?
                };
                Ok(Cplx::new(re, im))
            }
            _ if t.ends_with('i') => {
                let body = &t[..t.len() - 1];
                let im = if body.is_empty() || body == "+" {
                    S::one()
                } else if body == "-" {
                    S::one().neg_ref()
                } else {
                    S::parse(body)?
                };
                Ok(Cplx::new(S::zero(), im))
            }
            _ => Ok(Cplx::from_re(S::parse(&t)?)),
        }
    }

    pub fn render(&self) -> String {
        if self.im.is_zero() {
            return self.re.render();
        }
        if self.re.is_zero() {
            return format!("{}i", self.im.render());
        }
        if self.im.is_negative_val() {
            format!("{}-{}i", self.re.render(), self.im.abs().render())
        } else {
            format!("{}+{}i", self.re.render(), self.im.render())
        }
    }
}
