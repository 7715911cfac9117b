//! Fixtures and independent reference computations shared by the
//! integration tests.
#![allow(dead_code)]

use abdyn::mapspec::{AnyMap, Backend, MapSpec, NumberSpec, SignsSpec};
use abdyn::{MapParams, Rational, Scalar, Symbol, Word};
use num_bigint::BigInt;
use num_traits::One;

pub fn any_map(alpha: &str, beta: &str, signs: &str) -> AnyMap {
    MapSpec {
        alpha: NumberSpec::Text(alpha.into()),
        beta: NumberSpec::Text(beta.into()),
        signs: SignsSpec::Text(signs.into()),
        precision_bits: Some(256),
        backend: Backend::Exact,
    }
    .build()
    .expect("valid fixture")
}

pub const GOLDEN: &str = "root(1,-1,-1)";

/// Parameter sets exercised by the structural checks.
pub const CORPUS: &[(&str, &str, &str)] = &[
    ("0", "2", "++"),
    ("0", GOLDEN, "++"),
    ("0", "2", "+-"),
    ("0.5", "2", "+-+"),
    ("0.3", "2.6", "+-+"),
    ("0.7", "2.37", "-+-+"),
    ("0.2", "1.2", "++"),
    ("0.1", "1.3", "-+"),
    ("0.05", "1.21", "+-"),
];

/// Members of [`CORPUS`] that are transitive; the last two are not (their
/// kneading orbits stay outside the transitive part).
pub const TRANSITIVE: &[(&str, &str, &str)] = &[
    ("0", "2", "++"),
    ("0", GOLDEN, "++"),
    ("0", "2", "+-"),
    ("0.5", "2", "+-+"),
    ("0.3", "2.6", "+-+"),
    ("0.7", "2.37", "-+-+"),
    ("0.2", "1.2", "++"),
];

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn parse_decimal(s: &str) -> Rational {
    abdyn::mapspec::parse_rational(s).expect("decimal")
}

/// Ratio of consecutive Fibonacci numbers, within `phi^{-2n}` of the golden
/// mean.
pub fn golden_approx(n: usize) -> Rational {
    let (mut a, mut b) = (BigInt::one(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    Rational::new(b, a)
}

/// Reference map written from the branch formula alone:
/// `T(x) = beta x + alpha - (j - 1)` on increasing branches and
/// `j - alpha - beta x` on decreasing ones, `j` the branch of `x`.
#[derive(Clone, Debug)]
pub struct RefMap<S> {
    pub alpha: S,
    pub beta: S,
    pub plus: Vec<bool>,
}

impl<S: Scalar> RefMap<S> {
    pub fn new(alpha: S, beta: S, signs: &str) -> Self {
        RefMap { alpha, beta, plus: signs.chars().map(|c| c == '+').collect() }
    }

    pub fn k(&self) -> usize {
        self.plus.len()
    }

    /// Branch containing `x`, read off `alpha + beta x`.
    pub fn branch_of(&self, x: &S) -> usize {
        let y = self.alpha.clone() + self.beta.clone() * x.clone();
        ((y.floor_i64().max(0) + 1) as usize).min(self.k())
    }

    pub fn apply(&self, j: usize, x: &S) -> S {
        let y = self.alpha.clone() + self.beta.clone() * x.clone() - S::from_i64(j as i64 - 1).unwrap();
        if self.plus[j - 1] {
            y
        } else {
            S::one() - y
        }
    }

    /// Itinerary of `x + delta` (`delta` signed and tiny) read by exact
    /// iteration of the perturbed point.
    pub fn perturbed_itinerary(&self, x: &S, delta: &S, n: usize) -> Word {
        let mut p = x.clone() + delta.clone();
        let mut w = Vec::with_capacity(n);
        for _ in 0..n {
            let j = self.branch_of(&p);
            w.push(j as Symbol);
            p = self.apply(j, &p);
        }
        w
    }

    /// Open cell `j`, `((j - 1 - alpha) / beta, (j - alpha) / beta)` clipped
    /// to `[0, 1]`.
    pub fn cell(&self, j: usize) -> (S, S) {
        let end = |i: usize| {
            let c = (S::from_i64(i as i64).unwrap() - self.alpha.clone()) / self.beta.clone();
            if c < S::zero() {
                S::zero()
            } else if c > S::one() {
                S::one()
            } else {
                c
            }
        };
        (end(j - 1), end(j))
    }

    /// Cells whose interior meets the open interval `(lo, hi)`.
    pub fn cells_meeting(&self, lo: &S, hi: &S) -> Vec<usize> {
        (1..=self.k())
            .filter(|&j| {
                let (a, b) = self.cell(j);
                let l = if *lo > a { lo.clone() } else { a };
                let h = if *hi < b { hi.clone() } else { b };
                l < h
            })
            .collect()
    }

    /// Open interval of points reached after reading `u` from `(0, 1)`;
    /// `None` once it is empty.
    pub fn follower_interval(&self, u: &[Symbol]) -> Option<(S, S)> {
        let (mut lo, mut hi) = (S::zero(), S::one());
        for &s in u {
            let j = s as usize;
            let (a, b) = self.cell(j);
            let l = if lo > a { lo } else { a };
            let h = if hi < b { hi } else { b };
            if l >= h {
                return None;
            }
            let (x, y) = (self.apply(j, &l), self.apply(j, &h));
            (lo, hi) = if x < y { (x, y) } else { (y, x) };
        }
        Some((lo, hi))
    }

    /// Times `n` at which the follower interval of `w_{[0, n)}` meets two or
    /// more cells, starting with `0`.
    pub fn cut_times(&self, w: &[Symbol]) -> Vec<usize> {
        let mut out = vec![0];
        for n in 1..=w.len() {
            let (lo, hi) = self.follower_interval(&w[..n]).expect("kneading prefixes are admissible");
            if self.cells_meeting(&lo, &hi).len() >= 2 {
                out.push(n);
            }
        }
        out
    }

    /// Number of admissible words of each length `0..=n`, by depth-first
    /// extension of follower intervals.
    pub fn count_words(&self, n: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n + 1];
        let mut stack = vec![(S::zero(), S::one(), 0usize)];
        while let Some((lo, hi, len)) = stack.pop() {
            counts[len] += 1;
            if len == n {
                continue;
            }
            for j in self.cells_meeting(&lo, &hi) {
                let (a, b) = self.cell(j);
                let l = if lo > a { lo.clone() } else { a };
                let h = if hi < b { hi.clone() } else { b };
                let (x, y) = (self.apply(j, &l), self.apply(j, &h));
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                stack.push((x, y, len + 1));
            }
        }
        counts
    }
}

/// The reference map of a fixture, in the same field as the library map.
pub fn ref_map<S: Scalar>(map: &MapParams<S>) -> RefMap<S> {
    let signs: String = map.signs().iter().map(|s| s.as_char()).collect();
    RefMap::new(map.alpha().clone(), map.beta().clone(), &signs)
}

pub fn tiny(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

