//! Exact scalars over the rationals and prime fields.
//!
//! Rationals keep a machine-word fast path and promote to arbitrary
//! precision only when a result stops fitting in `i64`. Every value has a
//! single canonical representation, so derived equality is mathematical
//! equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} and {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("malformed scalar literal {text:?} for field {field}")]
    Malformed { text: String, field: FieldSpec },
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
}

/// The coefficient field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    /// Checked constructor for 𝔽_p.
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(Rational::from_integer(v)),
            FieldSpec::PrimeField(p) => Scalar::Residue {
                value: (v as i128).rem_euclid(p as i128) as u64,
                p,
            },
        }
    }

    pub fn parse(self, text: &str) -> Result<Scalar, ScalarError> {
        parse_scalar(text, self)
    }

    /// Small random element: uniform on {-3, ..., 3} over ℚ, uniform residue over 𝔽_p.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> Scalar {
        match self {
            FieldSpec::Rationals => self.from_i64(rng.gen_range(-3..=3)),
            FieldSpec::PrimeField(p) => Scalar::Residue {
                value: rng.gen_range(0..p),
                p,
            },
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// An exact rational number in lowest terms with positive denominator.
///
/// Values whose numerator and denominator fit in `i64` (excluding
/// `i64::MIN`) are always stored inline; everything else is boxed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

impl Rational {
    pub fn from_integer(v: i64) -> Self {
        if v == i64::MIN {
            Rational(Repr::Big(Box::new(BigRational::from_integer(v.into()))))
        } else {
            Rational(Repr::Small { num: v, den: 1 })
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw((*num).into(), (*den).into()),
            Repr::Big(b) => (**b).clone(),
        }
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(num), Some(den)) if num != i64::MIN => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(Box::new(b))),
        }
    }

    /// Reduces `num/den` (den ≠ 0) computed in `i128`.
    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut num, mut den) = if g > 1 { (num / g, den / g) } else { (num, den) };
        if den < 0 {
            num = -num;
            den = -den;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small { num: n, den: d }),
            _ => Rational::from_big(BigRational::new(num.into(), den.into())),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.0 {
            Repr::Small { num, den } => {
                if *num < 0 {
                    Rational(Repr::Small { num: -den, den: -num })
                } else {
                    Rational(Repr::Small { num: *den, den: *num })
                }
            }
            Repr::Big(b) => Rational::from_big(b.recip()),
        })
    }

    fn add_ref(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_add(*c) {
                        return Rational::from_integer(s);
                    }
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rational::from_i128(a * d + c * b, b * d)
            }
            _ => Rational::from_big(self.to_big() + other.to_big()),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if *b == 1 && *d == 1 {
                    if let Some(s) = a.checked_mul(*c) {
                        return Rational::from_integer(s);
                    }
                }
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * other.to_big()),
        }
    }

    fn neg_ref(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den: *den }),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One exact field element, tagged with its field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Residue { value: u64, p: u64 },
}

/// Binary operation selector for [`Scalar::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Residue { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => *r == Rational::one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(self.field(), other.field()))
        }
    }

    /// Exact arithmetic with explicit errors for division by zero and
    /// mixed fields.
    pub fn apply(&self, op: ArithOp, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(match op {
            ArithOp::Add => self.add_unchecked(other),
            ArithOp::Sub => self.add_unchecked(&other.neg_ref()),
            ArithOp::Mul => self.mul_unchecked(other),
            ArithOp::Div => self.mul_unchecked(&other.inverse()?),
        })
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(r) => r.recip().map(Scalar::Rational).ok_or(ScalarError::DivisionByZero),
            Scalar::Residue { value: 0, .. } => Err(ScalarError::DivisionByZero),
            Scalar::Residue { value, p } => Ok(Scalar::Residue {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            }),
        }
    }

    fn add_unchecked(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.add_ref(b)),
            (Scalar::Residue { value: a, p }, Scalar::Residue { value: b, .. }) => Scalar::Residue {
                value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => panic!("{}", ScalarError::FieldMismatch(self.field(), other.field())),
        }
    }

    fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a.mul_ref(b)),
            (Scalar::Residue { value: a, p }, Scalar::Residue { value: b, .. }) => Scalar::Residue {
                value: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => panic!("{}", ScalarError::FieldMismatch(self.field(), other.field())),
        }
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.neg_ref()),
            Scalar::Residue { value: 0, p } => Scalar::Residue { value: 0, p: *p },
            Scalar::Residue { value, p } => Scalar::Residue { value: p - value, p: *p },
        }
    }

    /// `self -= factor * other`, the elimination kernel.
    pub fn sub_mul_assign(&mut self, factor: &Scalar, other: &Scalar) {
        if factor.is_zero() || other.is_zero() {
            return;
        }
        let prod = factor.mul_unchecked(other);
        *self = self.add_unchecked(&prod.neg_ref());
    }

    /// `self += factor * other`.
    pub fn add_mul_assign(&mut self, factor: &Scalar, other: &Scalar) {
        if factor.is_zero() || other.is_zero() {
            return;
        }
        let prod = factor.mul_unchecked(other);
        *self = self.add_unchecked(&prod);
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => fmt::Display::fmt(r, f),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Residue { value, p } => write!(f, "{value} (mod {p})"),
        }
    }
}

// Operator forms panic on mixed fields; use `Scalar::apply` for a checked path.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_unchecked(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_unchecked(&rhs.neg_ref())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `-?digits(/digits)?` over ℚ or `digits` over 𝔽_p. Literals
/// at or above `p` are reduced.
pub fn parse_scalar(text: &str, field: FieldSpec) -> Result<Scalar, ScalarError> {
    let malformed = || ScalarError::Malformed {
        text: text.to_string(),
        field,
    };
    match field {
        FieldSpec::Rationals => {
            let (negative, body) = match text.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, text),
            };
            let (num, den) = match body.split_once('/') {
                Some((n, d)) => (n, Some(d)),
                None => (body, None),
            };
            if !is_digits(num) || !den.map_or(true, is_digits) {
                return Err(malformed());
            }
            let mut num = BigInt::from_str(num).map_err(|_| malformed())?;
            if negative {
                num = -num;
            }
            let den = match den {
                Some(d) => BigInt::from_str(d).map_err(|_| malformed())?,
                None => BigInt::one(),
            };
            if den.is_zero() {
                return Err(ScalarError::ZeroDenominator(text.to_string()));
            }
            Ok(Scalar::Rational(Rational::from_big(BigRational::new(num, den))))
        }
        FieldSpec::PrimeField(p) => {
            if !is_digits(text) {
                return Err(malformed());
            }
            let v = BigUint::from_str(text).map_err(|_| malformed())? % BigUint::from(p);
            Ok(Scalar::Residue {
                value: v.to_u64().expect("residue below p"),
                p,
            })
        }
    }
}

pub fn format_scalar(a: &Scalar) -> String {
    a.to_string()
}

impl Rational {
    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn q(text: &str) -> Scalar {
        Q.parse(text).unwrap()
    }

    #[test]
    fn fraction_addition() {
        assert_eq!(q("1/2").apply(ArithOp::Add, &q("1/3")).unwrap(), q("5/6"));
    }

    #[test]
    fn residue_product() {
        let f5 = FieldSpec::prime(5).unwrap();
        let r = f5.from_i64(3).apply(ArithOp::Mul, &f5.from_i64(4)).unwrap();
        assert_eq!(r, f5.from_i64(2));
    }

    #[test]
    fn inverses_in_f7_by_exhaustion() {
        let f7 = FieldSpec::prime(7).unwrap();
        for a in 1..7 {
            let a = f7.from_i64(a);
            let inv = f7.one().apply(ArithOp::Div, &a).unwrap();
            assert!(a.apply(ArithOp::Mul, &inv).unwrap().is_one());
        }
    }

    #[test]
    fn division_by_zero_and_mixed_fields() {
        assert_eq!(q("1").apply(ArithOp::Div, &q("0")), Err(ScalarError::DivisionByZero));
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(matches!(
            q("1").apply(ArithOp::Add, &f3.one()),
            Err(ScalarError::FieldMismatch(..))
        ));
        assert_eq!(f3.zero().inverse(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn parsing_and_formatting() {
        let r = q("-2/5");
        assert_eq!(r.to_string(), "-2/5");
        if let Scalar::Rational(r) = &r {
            assert_eq!(r.denom(), BigInt::from(5));
        }
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("0/3"), Q.zero());
        assert_eq!(q("-1").to_string(), "-1");
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.parse("7").unwrap(), f5.from_i64(2));
        assert_eq!(f5.zero().to_string(), "0");
        assert_eq!(q("5/6").to_string(), "5/6");
    }

    #[test]
    fn malformed_literals() {
        for bad in ["", "-", "1/", "/2", "1.5", "--1", "1/-2", "+3", " 1"] {
            assert!(matches!(Q.parse(bad), Err(ScalarError::Malformed { .. })), "{bad}");
        }
        assert!(matches!(Q.parse("1/0"), Err(ScalarError::ZeroDenominator(_))));
        let f5 = FieldSpec::prime(5).unwrap();
        assert!(f5.parse("-1").is_err());
        assert!(f5.parse("1/2").is_err());
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(18446744073709551557 - 2));
        assert_eq!(FieldSpec::prime(1), Err(ScalarError::NotPrime(1)));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Q.from_i64(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.to_string(), "85070591730234615847396907784232501249");
        let back = sq.apply(ArithOp::Div, &big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(&back, Scalar::Rational(Rational(Repr::Small { .. }))));
        let tiny = q("1/9223372036854775807");
        let t2 = &tiny * &tiny;
        assert_eq!(&(&t2 * &big) * &big, Q.one());
        let min = Q.from_i64(i64::MIN);
        assert_eq!((&min - &min), Q.zero());
        assert_eq!((-&min).to_string(), "9223372036854775808");
    }

    fn rational() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            (-50i64..50, 1i64..20).prop_map(|(n, d)| Q.parse(&format!("{n}/{d}")).unwrap()),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| {
                Scalar::Rational(Rational::from_big(BigRational::new(n.into(), d.into())))
            }),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms_rational(a in rational(), b in rational(), c in rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&a.apply(ArithOp::Div, &b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn field_axioms_prime(a in 0u64..101, b in 0u64..101, c in 0u64..101) {
            let f = FieldSpec::prime(101).unwrap();
            let (a, b, c) = (f.from_i64(a as i64), f.from_i64(b as i64), f.from_i64(c as i64));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn format_parse_round_trip(a in rational()) {
            let text = format_scalar(&a);
            prop_assert_eq!(Q.parse(&text).unwrap(), a);
        }

        #[test]
        fn parse_canonicalizes(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50) {
            let direct = Q.parse(&format!("{n}/{d}")).unwrap();
            let scaled = Q.parse(&format!("{}/{}", n * k, d * k)).unwrap();
            prop_assert_eq!(format_scalar(&direct), format_scalar(&scaled));
        }
    }
}
