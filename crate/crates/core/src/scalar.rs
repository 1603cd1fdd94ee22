//! Dual-backend scalars: exact rationals, or high-precision reals with a
//! comparison tolerance of `2^-(precision/2)`.
//!
//! Arithmetic between two exact values stays exact. Anything touching a real
//! (or an operation with no exact result, such as `ln 2`) produces a real at
//! the smaller of the participating precisions.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default working precision, in bits, for real-valued scalars.
pub const DEFAULT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

fn bigint_to_float(n: &BigInt, precision: usize) -> BigFloat {
    if let Some(v) = n.to_i64() {
        return BigFloat::from_i64(v, precision);
    }
    let s = n.to_string();
    with_consts(|cc| BigFloat::parse(&s, Radix::Dec, precision, RM, cc))
}

/// A high-precision real number.
#[derive(Clone, Debug)]
pub struct Real {
    value: BigFloat,
    precision: usize,
}

impl Real {
    pub fn from_rational(r: &BigRational, precision: usize) -> Self {
        let num = bigint_to_float(r.numer(), precision);
        let den = bigint_to_float(r.denom(), precision);
        Real { value: num.div(&den, precision, RM), precision }
    }

    pub fn from_f64(f: f64, precision: usize) -> Self {
        Real { value: BigFloat::from_f64(f, precision), precision }
    }

    pub fn from_int(i: i64, precision: usize) -> Self {
        Real { value: BigFloat::from_i64(i, precision), precision }
    }

    /// Parses a decimal literal such as `1.4142` or `-2.5e-3`.
    pub fn parse_decimal(s: &str, precision: usize) -> Result<Self> {
        let value = with_consts(|cc| BigFloat::parse(s, Radix::Dec, precision, RM, cc));
        if value.is_nan() || value.is_inf() {
            return Err(Error::ScalarParse(s.to_string()));
        }
        Ok(Real { value, precision })
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Number of bits `k` such that two reals within `2^-k` compare as tied.
    pub fn tolerance_bits(&self) -> usize {
        self.precision / 2
    }

    pub fn tolerance(&self) -> f64 {
        2f64.powi(-(self.tolerance_bits() as i32))
    }

    fn wrap(&self, value: BigFloat, other_precision: usize) -> Real {
        Real { value, precision: self.precision.min(other_precision) }
    }

    pub fn add(&self, o: &Real) -> Real {
        let p = self.precision.min(o.precision);
        self.wrap(self.value.add(&o.value, p, RM), o.precision)
    }

    pub fn sub(&self, o: &Real) -> Real {
        let p = self.precision.min(o.precision);
        self.wrap(self.value.sub(&o.value, p, RM), o.precision)
    }

    pub fn mul(&self, o: &Real) -> Real {
        let p = self.precision.min(o.precision);
        self.wrap(self.value.mul(&o.value, p, RM), o.precision)
    }

    pub fn div(&self, o: &Real) -> Real {
        let p = self.precision.min(o.precision);
        self.wrap(self.value.div(&o.value, p, RM), o.precision)
    }

    pub fn neg(&self) -> Real {
        Real { value: self.value.clone().neg(), precision: self.precision }
    }

    pub fn abs(&self) -> Real {
        Real { value: self.value.abs(), precision: self.precision }
    }

    pub fn ln(&self) -> Real {
        let p = self.precision;
        Real { value: with_consts(|cc| self.value.ln(p, RM, cc)), precision: p }
    }

    pub fn exp(&self) -> Real {
        let p = self.precision;
        Real { value: with_consts(|cc| self.value.exp(p, RM, cc)), precision: p }
    }

    pub fn sqrt(&self) -> Real {
        let p = self.precision;
        Real { value: self.value.sqrt(p, RM), precision: p }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Raw ordering of the represented values, ignoring the tolerance.
    pub fn raw_cmp(&self, o: &Real) -> Ordering {
        match self.value.cmp(&o.value) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    /// True if `|self - o| <= 2^-k` with `k` the smaller tolerance.
    pub fn within_tolerance(&self, o: &Real) -> bool {
        let bits = self.tolerance_bits().min(o.tolerance_bits()) as i64;
        let d = self.sub(o);
        if d.value.is_zero() {
            return true;
        }
        // astro-float values satisfy 2^(e-1) <= |x| < 2^e.
        match d.value.exponent() {
            Some(e) => (e as i64) <= -bits,
            None => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_string().parse().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Outcome of a tolerance-aware comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub ordering: Ordering,
    /// Set when the values were declared equal only because they fell inside
    /// the real-mode tolerance.
    pub within_tolerance: bool,
}

/// Either an exact rational or a high-precision real.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Real(Real),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(i: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn real_f64(f: f64) -> Self {
        Scalar::Real(Real::from_f64(f, DEFAULT_PRECISION))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Real(_) => None,
        }
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Real(r) => Some(r.precision),
        }
    }

    pub fn to_real(&self, precision: usize) -> Real {
        match self {
            Scalar::Exact(q) => Real::from_rational(q, precision),
            Scalar::Real(r) => r.clone(),
        }
    }

    /// Converts an exact value into a real at `precision`; reals are kept.
    pub fn into_real_mode(self, precision: usize) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Real(Real::from_rational(&q, precision)),
            r => r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or_else(|| Real::from_rational(q, 64).to_f64()),
            Scalar::Real(r) => r.to_f64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Real(r) => r.is_zero(),
        }
    }

    fn real_pair(&self, o: &Scalar) -> (Real, Real) {
        let p = self.precision().into_iter().chain(o.precision()).min().unwrap_or(DEFAULT_PRECISION);
        (self.to_real(p), o.to_real(p))
    }

    /// Tolerance-aware comparison. Exact operands compare exactly.
    pub fn compare(&self, o: &Scalar) -> Comparison {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Comparison { ordering: a.cmp(b), within_tolerance: false },
            _ => {
                let (a, b) = self.real_pair(o);
                if a.within_tolerance(&b) {
                    let exact_eq = a.raw_cmp(&b) == Ordering::Equal;
                    Comparison { ordering: Ordering::Equal, within_tolerance: !exact_eq }
                } else {
                    Comparison { ordering: a.raw_cmp(&b), within_tolerance: false }
                }
            }
        }
    }

    /// Total order on the represented values without any tolerance. Used for
    /// sorting; near-ties are detected in a separate pass.
    pub fn raw_cmp(&self, o: &Scalar) -> Ordering {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = self.real_pair(o);
                a.raw_cmp(&b)
            }
        }
    }

    pub fn tol_eq(&self, o: &Scalar) -> bool {
        self.compare(o).ordering == Ordering::Equal
    }

    pub fn gt(&self, o: &Scalar) -> bool {
        self.compare(o).ordering == Ordering::Greater
    }

    pub fn lt(&self, o: &Scalar) -> bool {
        self.compare(o).ordering == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.gt(&Scalar::zero())
    }

    pub fn is_negative(&self) -> bool {
        self.lt(&Scalar::zero())
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Real(r) => Scalar::Real(r.abs()),
        }
    }

    pub fn recip(&self) -> Scalar {
        Scalar::one() / self
    }

    /// Natural logarithm. Exact only for `ln 1 = 0`.
    pub fn ln(&self) -> Scalar {
        match self {
            Scalar::Exact(q) if q.is_one() => Scalar::zero(),
            _ => Scalar::Real(self.to_real(self.precision().unwrap_or(DEFAULT_PRECISION)).ln()),
        }
    }

    /// Exponential. Exact only for `exp 0 = 1`.
    pub fn exp(&self) -> Scalar {
        match self {
            Scalar::Exact(q) if q.is_zero() => Scalar::one(),
            _ => Scalar::Real(self.to_real(self.precision().unwrap_or(DEFAULT_PRECISION)).exp()),
        }
    }

    /// Square root; exact when the argument is a square of a rational.
    pub fn sqrt(&self) -> Scalar {
        if let Scalar::Exact(q) = self {
            if !q.is_negative() {
                let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
                if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
                    return Scalar::Exact(BigRational::new(n, d));
                }
            }
        }
        Scalar::Real(self.to_real(self.precision().unwrap_or(DEFAULT_PRECISION)).sqrt())
    }

    /// Integer power, exact for exact bases.
    pub fn powi(&self, e: i32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(num_traits::pow::Pow::pow(q, e)),
            Scalar::Real(_) => {
                let mut acc = Scalar::one();
                let base = if e < 0 { self.recip() } else { self.clone() };
                for _ in 0..e.unsigned_abs() {
                    acc = &acc * &base;
                }
                acc
            }
        }
    }

    /// Parses a scalar literal.
    ///
    /// Accepted forms: integers and `p/q` (exact), decimals such as `1.25`
    /// (real), `sqrt2` / `sqrt(7/3)`, `lnK`, and `c/lnK` (real).
    pub fn parse(s: &str, precision: usize) -> Result<Scalar> {
        let t = s.trim();
        let err = || Error::ScalarParse(s.to_string());
        if t.is_empty() {
            return Err(err());
        }
        if let Some(rest) = t.strip_prefix('-') {
            return Ok(-Scalar::parse(rest, precision)?);
        }
        if let Some(arg) = t.strip_prefix("sqrt") {
            let arg = arg.trim_start_matches('(').trim_end_matches(')');
            let v = Scalar::parse(arg, precision)?;
            return Ok(v.into_real_mode(precision).sqrt());
        }
        if let Some(arg) = t.strip_prefix("ln") {
            let v = parse_rational(arg).ok_or_else(err)?;
            return Ok(Scalar::Real(Real::from_rational(&v, precision).ln()));
        }
        if let Some((c, k)) = split_inverse_log(t) {
            let num = Real::from_rational(&c, precision);
            let den = Real::from_rational(&k, precision).ln();
            return Ok(Scalar::Real(num.div(&den)));
        }
        if let Some(q) = parse_rational(t) {
            return Ok(Scalar::Exact(q));
        }
        let decimal = t.chars().any(|c| c.is_ascii_digit())
            && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        if !decimal {
            return Err(err());
        }
        Real::parse_decimal(t, precision).map(Scalar::Real)
    }
}

/// Parses `p`, `p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Splits `c/lnK` into `(c, K)`; `1/ln2` gives `(1, 2)`.
pub fn split_inverse_log(s: &str) -> Option<(BigRational, BigRational)> {
    let (c, k) = s.split_once("/ln")?;
    let c = parse_rational(c)?;
    let k = parse_rational(k)?;
    Some((c, k))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Real(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s, DEFAULT_PRECISION).map_err(serde::de::Error::custom)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<i64> for Scalar {
    fn from(i: i64) -> Self {
        Scalar::int(i)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $real:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, o: &Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => {
                        let (a, b) = self.real_pair(o);
                        Scalar::Real(a.$real(&b))
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, o: Scalar) -> Scalar {
                (&self).$method(&o)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, o: &Scalar) -> Scalar {
                (&self).$method(o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Real(r) => Scalar::Real(r.neg()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        self.tol_eq(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(1, 6);
        let s = &a + &b;
        assert!(s.is_exact());
        assert_eq!(s.to_string(), "1/2");
        assert_eq!((&a / &b).to_string(), "2");
    }

    #[test]
    fn ln_of_two_is_real_and_accurate() {
        let l = Scalar::int(2).ln();
        assert!(!l.is_exact());
        assert!((l.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(l.exp().tol_eq(&Scalar::int(2)));
    }

    #[test]
    fn tolerance_ties_are_flagged() {
        let a = Scalar::Real(Real::from_int(1, 256));
        let eps = Scalar::Real(Real::from_rational(&BigRational::new(1.into(), BigInt::one() << 200), 256));
        let b = &a + &eps;
        let c = a.compare(&b);
        assert_eq!(c.ordering, Ordering::Equal);
        assert!(c.within_tolerance);

        let far = &a + &Scalar::real_f64(1e-30);
        assert_eq!(a.compare(&far).ordering, Ordering::Less);
    }

    #[test]
    fn tolerance_boundary_uses_half_precision() {
        let one = Real::from_int(1, 256);
        let just_inside = Real::from_rational(&BigRational::new(1.into(), BigInt::one() << 129), 256);
        let just_outside = Real::from_rational(&BigRational::new(1.into(), BigInt::one() << 126), 256);
        assert!(one.within_tolerance(&one.add(&just_inside)));
        assert!(!one.within_tolerance(&one.add(&just_outside)));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Scalar::parse("3/6", 256).unwrap().to_string(), "1/2");
        assert!(Scalar::parse("-4", 256).unwrap().tol_eq(&Scalar::int(-4)));
        let s2 = Scalar::parse("sqrt2", 256).unwrap();
        assert!((s2.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(Scalar::parse("sqrt(9/4)", 256).unwrap().tol_eq(&Scalar::ratio(3, 2)));
        let t = Scalar::parse("1/ln2", 256).unwrap();
        assert!((t.to_f64() - 1.0 / std::f64::consts::LN_2).abs() < 1e-14);
        let d = Scalar::parse("1.25", 256).unwrap();
        assert!(!d.is_exact());
        assert!(d.tol_eq(&Scalar::ratio(5, 4)));
        assert!(Scalar::parse("abc", 256).is_err());
        assert!(Scalar::parse("1/0", 256).is_err());
    }

    #[test]
    fn exact_sqrt_of_square() {
        assert!(Scalar::ratio(9, 16).sqrt().is_exact());
        assert!(!Scalar::int(2).sqrt().is_exact());
    }

    #[test]
    fn powi_exact() {
        assert_eq!(Scalar::ratio(2, 3).powi(3).to_string(), "8/27");
        assert_eq!(Scalar::ratio(2, 3).powi(-2).to_string(), "9/4");
    }
}

/// Serde adapter writing a rational as its `p/q` text.
pub mod rational_text {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(r)
    }
}

/// Serde adapter writing a rational list as `p/q` texts.
pub mod rational_text_vec {
    use num_rational::BigRational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }
}
