//! Exact arithmetic in a real quadratic field `Q(sqrt(d))`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// The number `rational + coeff * sqrt(radicand)`.
///
/// `radicand` is square-free and greater than one, or zero when the value is
/// rational. Mixing two different radicands in one operation panics: a map
/// only ever lives in a single quadratic field.
#[derive(Clone, Debug)]
pub struct QuadSurd {
    rational: BigRational,
    coeff: BigRational,
    radicand: u64,
}

fn square_free_split(n: u64) -> (u64, u64) {
    // n = outer^2 * inner with inner square-free
    let mut outer = 1u64;
    let mut inner = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            inner *= p;
        }
        p += 1;
    }
    inner *= m;
    (outer, inner)
}

impl QuadSurd {
    pub fn new(rational: BigRational, coeff: BigRational, radicand: u64) -> Self {
        if coeff.is_zero() || radicand == 0 {
            return QuadSurd { rational, coeff: BigRational::zero(), radicand: 0 };
        }
        let (outer, inner) = square_free_split(radicand);
        let coeff = coeff * BigRational::from_integer(BigInt::from(outer));
        if inner == 1 {
            QuadSurd { rational: rational + coeff, coeff: BigRational::zero(), radicand: 0 }
        } else {
            QuadSurd { rational, coeff, radicand: inner }
        }
    }

    /// Square root of a non-negative integer.
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return QuadSurd::zero();
        }
        QuadSurd::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn irrational_coeff(&self) -> &BigRational {
        &self.coeff
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 0
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.rational.clone())
    }

    fn joint_radicand(&self, other: &Self) -> u64 {
        match (self.radicand, other.radicand) {
            (0, d) | (d, 0) => d,
            (d, e) if d == e => d,
            (d, e) => panic!("cannot combine sqrt({d}) and sqrt({e})"),
        }
    }

    /// Sign as -1, 0 or 1, decided exactly.
    pub fn signum_i(&self) -> i32 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.coeff);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.rational * &self.rational;
        let b2d = &self.coeff * &self.coeff * BigRational::from_integer(BigInt::from(self.radicand));
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    fn conjugate(&self) -> Self {
        QuadSurd { rational: self.rational.clone(), coeff: -self.coeff.clone(), radicand: self.radicand }
    }

    /// Field norm `a^2 - b^2 d`.
    fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.coeff * &self.coeff * BigRational::from_integer(BigInt::from(self.radicand))
    }

    pub fn floor(&self) -> i64 {
        let mut f = self.to_f64().unwrap_or(0.0).floor() as i64;
        let as_surd = |v: i64| QuadSurd::from(BigRational::from_integer(BigInt::from(v)));
        while as_surd(f) > *self {
            f -= 1;
        }
        while as_surd(f + 1) <= *self {
            f += 1;
        }
        f
    }

    pub fn bit_size(&self) -> u64 {
        self.rational.numer().bits()
            + self.rational.denom().bits()
            + self.coeff.numer().bits()
            + self.coeff.denom().bits()
    }

    /// Largest real root of `a x^2 + b x + c`, if real and `a != 0`.
    pub fn largest_root(a: i64, b: i64, c: i64) -> Option<Self> {
        if a == 0 {
            if b == 0 {
                return None;
            }
            return Some(QuadSurd::from(BigRational::new(BigInt::from(-c), BigInt::from(b))));
        }
        let disc = (b as i128) * (b as i128) - 4 * (a as i128) * (c as i128);
        if disc < 0 {
            return None;
        }
        let disc = u64::try_from(disc).ok()?;
        let two_a = BigRational::from_integer(BigInt::from(2 * a));
        let root = QuadSurd::sqrt(disc);
        let sign = if a > 0 { QuadSurd::one() } else { -QuadSurd::one() };
        let minus_b = QuadSurd::from(BigRational::from_integer(BigInt::from(-b)));
        Some((minus_b + sign * root) / QuadSurd::from(two_a))
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl From<BigRational> for QuadSurd {
    fn from(r: BigRational) -> Self {
        QuadSurd { rational: r, coeff: BigRational::zero(), radicand: 0 }
    }
}

impl PartialEq for QuadSurd {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational
            && self.coeff == other.coeff
            && (self.coeff.is_zero() || self.radicand == other.radicand)
    }
}

impl Eq for QuadSurd {}

impl Hash for QuadSurd {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rational.hash(state);
        self.coeff.hash(state);
        self.radicand.hash(state);
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.clone() - other.clone()).signum_i() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for QuadSurd {
    type Output = QuadSurd;
    fn add(self, rhs: QuadSurd) -> QuadSurd {
        let d = self.joint_radicand(&rhs);
        QuadSurd::new(self.rational + rhs.rational, self.coeff + rhs.coeff, d)
    }
}

impl Sub for QuadSurd {
    type Output = QuadSurd;
    fn sub(self, rhs: QuadSurd) -> QuadSurd {
        let d = self.joint_radicand(&rhs);
        QuadSurd::new(self.rational - rhs.rational, self.coeff - rhs.coeff, d)
    }
}

impl Mul for QuadSurd {
    type Output = QuadSurd;
    fn mul(self, rhs: QuadSurd) -> QuadSurd {
        let d = self.joint_radicand(&rhs);
        let dq = BigRational::from_integer(BigInt::from(d));
        let rational = &self.rational * &rhs.rational + &self.coeff * &rhs.coeff * dq;
        let coeff = &self.rational * &rhs.coeff + &self.coeff * &rhs.rational;
        QuadSurd::new(rational, coeff, d)
    }
}

impl Div for QuadSurd {
    type Output = QuadSurd;
    fn div(self, rhs: QuadSurd) -> QuadSurd {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero");
        let num = self * rhs.conjugate();
        QuadSurd::new(num.rational / n.clone(), num.coeff / n, num.radicand)
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { rational: -self.rational, coeff: -self.coeff, radicand: self.radicand }
    }
}

impl Zero for QuadSurd {
    fn zero() -> Self {
        QuadSurd::from(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }
}

impl One for QuadSurd {
    fn one() -> Self {
        QuadSurd::from(BigRational::one())
    }
}

impl FromPrimitive for QuadSurd {
    fn from_i64(n: i64) -> Option<Self> {
        Some(QuadSurd::from(BigRational::from_integer(BigInt::from(n))))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(QuadSurd::from(BigRational::from_integer(BigInt::from(n))))
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_f64(x).map(QuadSurd::from)
    }
}

impl ToPrimitive for QuadSurd {
    fn to_i64(&self) -> Option<i64> {
        Some(self.floor())
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self.floor()).ok()
    }
    fn to_f64(&self) -> Option<f64> {
        if self.coeff.is_zero() {
            return self.rational.to_f64();
        }
        let root = (self.radicand as f64).sqrt();
        let a = self.rational.to_f64()?;
        let b = self.coeff.to_f64()?;
        if sign_of(&self.rational) * sign_of(&self.coeff) >= 0 {
            Some(a + b * root)
        } else {
            // a + b r = (a^2 - b^2 d) / (a - b r) avoids cancellation
            Some(self.norm().to_f64()? / (a - b * root))
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if !self.rational.is_zero() {
            write!(f, "{} + ", self.rational)?;
        }
        write!(f, "({})*sqrt({})", self.coeff, self.radicand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> QuadSurd {
        QuadSurd::from(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = QuadSurd::largest_root(1, -1, -1).unwrap();
        assert_eq!(phi.clone() * phi.clone(), phi.clone() + QuadSurd::one());
        assert_eq!(QuadSurd::one() / phi.clone(), phi.clone() - QuadSurd::one());
        assert!((phi.to_f64().unwrap() - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(phi.floor(), 1);
    }

    #[test]
    fn square_free_normalisation() {
        assert_eq!(QuadSurd::sqrt(8), QuadSurd::sqrt(2) * q(2, 1));
        assert!(QuadSurd::sqrt(9).is_rational());
        assert_eq!(QuadSurd::sqrt(9), q(3, 1));
    }

    #[test]
    fn exact_sign_near_cancellation() {
        // 1393/985 is a convergent of sqrt(2), just below it
        let x = q(1393, 985) - QuadSurd::sqrt(2);
        assert_eq!(x.signum_i(), -1);
        assert!(x.to_f64().unwrap() < 0.0);
        assert!(q(577, 408) > QuadSurd::sqrt(2));
        assert!(q(99, 70) > QuadSurd::sqrt(2));
        assert!(q(41, 29) < QuadSurd::sqrt(2));
    }
}
