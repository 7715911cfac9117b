//! Itineraries, kneading sequences and follower sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{MapParams, Side, SidedPoint, Sign, Symbol, Word};
use crate::scalar::Scalar;

/// Itinerary of a point; `exact` is false when the word was cut short
/// because an orbit point could not be separated from a critical point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub word: Word,
    pub exact: bool,
}

/// The two kneading lines: `a` starts at `0+`, `b` at `1-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Line {
    A,
    B,
}

impl Line {
    pub fn other(self) -> Line {
        match self {
            Line::A => Line::B,
            Line::B => Line::A,
        }
    }

    pub fn name(self) -> char {
        match self {
            Line::A => 'a',
            Line::B => 'b',
        }
    }
}

/// The first `n` symbols of the orbit of `x`.
///
/// Hitting an interior critical point is an `AmbiguousCoding` error; the
/// endpoints 0 and 1 belong to a single cell and code normally.
pub fn itinerary<S: Scalar>(map: &MapParams<S>, x: &S, n: usize) -> Result<Itinerary> {
    let mut word = Vec::with_capacity(n);
    let mut cur = x.clone();
    let mut err = 0.0;
    let beta = map.beta().approx();
    for t in 0..n {
        if map.interior_critical_index(&cur).is_some() && (S::EXACT || err == 0.0) {
            return Err(Error::AmbiguousCoding { step: t });
        }
        if !S::EXACT && err > 0.0 {
            let xv = cur.approx();
            let near = map.critical_points()[1..map.k()].iter().any(|c| (c.approx() - xv).abs() <= err);
            if near {
                return Ok(Itinerary { word, exact: false });
            }
        }
        let (y, j) = map.eval(&cur)?;
        word.push(j);
        err = beta * err + 4.0 * S::unit_roundoff() * (2.0 + beta + j as f64);
        cur = clamp_unit(y);
    }
    Ok(Itinerary { word, exact: true })
}

fn clamp_unit<S: Scalar>(y: S) -> S {
    if y < S::zero() {
        S::zero()
    } else if y > S::one() {
        S::one()
    } else {
        y
    }
}

/// Itinerary of a sided point together with the sided orbit
/// (`points[t]` is the point before symbol `t`; one extra trailing point).
pub fn sided_itinerary<S: Scalar>(map: &MapParams<S>, p: &SidedPoint<S>, n: usize) -> Result<(Word, Vec<SidedPoint<S>>)> {
    let mut word = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n + 1);
    points.push(p.clone());
    let mut cur = p.clone();
    let mut err = 0.0;
    let beta = map.beta().approx();
    for t in 0..n {
        if !S::EXACT && err > 0.0 {
            let xv = cur.value.approx();
            let near = map.critical_points().iter().any(|c| (c.approx() - xv).abs() <= err);
            if near {
                return Err(Error::PrecisionExhausted { achieved_depth: t });
            }
        }
        let (next, j) = map.eval_sided(&cur)?;
        word.push(j);
        err = beta * err + 4.0 * S::unit_roundoff() * (2.0 + beta + j as f64);
        cur = SidedPoint { value: clamp_unit(next.value), side: next.side };
        points.push(cur.clone());
    }
    Ok((word, points))
}

/// Finite prefixes of the kneading data of a map.
#[derive(Clone, Debug)]
pub struct KneadingData<S> {
    /// Itinerary of `0+`.
    pub a: Word,
    /// Itinerary of `1-`.
    pub b: Word,
    /// `crit_right[i - 1]` is the itinerary of `c_i+`, `i = 1..k-1`.
    pub crit_right: Vec<Word>,
    /// `crit_left[i - 1]` is the itinerary of `c_i-`.
    pub crit_left: Vec<Word>,
    /// Sided orbit of `0+`; `a_points[n]` precedes `a[n]`.
    pub a_points: Vec<SidedPoint<S>>,
    /// Sided orbit of `1-`.
    pub b_points: Vec<SidedPoint<S>>,
    pub signs: Vec<Sign>,
    /// `c_0, ..., c_k`.
    pub critical: Vec<S>,
    pub depth: usize,
    /// Largest representation size (bits) met along the orbits.
    pub precision_used: u64,
}

impl<S: Scalar> KneadingData<S> {
    pub fn k(&self) -> usize {
        self.signs.len()
    }

    pub fn line(&self, line: Line) -> &Word {
        match line {
            Line::A => &self.a,
            Line::B => &self.b,
        }
    }

    pub fn line_points(&self, line: Line) -> &[SidedPoint<S>] {
        match line {
            Line::A => &self.a_points,
            Line::B => &self.b_points,
        }
    }

    /// Itinerary of `c_i` approached from `side` (`1 <= i <= k-1`).
    pub fn crit(&self, i: usize, side: Side) -> &Word {
        match side {
            Side::Right => &self.crit_right[i - 1],
            Side::Left => &self.crit_left[i - 1],
        }
    }

    pub fn sign(&self, j: Symbol) -> Sign {
        self.signs[j as usize - 1]
    }
}

/// Kneading sequences to the given depth.
pub fn kneading_sequences<S: Scalar>(map: &MapParams<S>, depth: usize) -> Result<KneadingData<S>> {
    let k = map.k();
    let (a, a_points) = sided_itinerary(map, &SidedPoint::new(S::zero(), Side::Right)?, depth)?;
    let (b, b_points) = sided_itinerary(map, &SidedPoint::new(S::one(), Side::Left)?, depth)?;
    let mut crit_right = Vec::with_capacity(k.saturating_sub(1));
    let mut crit_left = Vec::with_capacity(k.saturating_sub(1));
    for i in 1..k {
        let c = map.critical_points()[i].clone();
        crit_right.push(sided_itinerary(map, &SidedPoint::new(c.clone(), Side::Right)?, depth)?.0);
        crit_left.push(sided_itinerary(map, &SidedPoint::new(c, Side::Left)?, depth)?.0);
    }
    let precision_used = a_points
        .iter()
        .chain(b_points.iter())
        .map(|p| p.value.bit_size())
        .max()
        .unwrap_or(0);
    Ok(KneadingData {
        a,
        b,
        crit_right,
        crit_left,
        a_points,
        b_points,
        signs: map.signs().to_vec(),
        critical: map.critical_points().to_vec(),
        depth,
        precision_used,
    })
}

/// Closure of the set of points whose itinerary starts with `u`, as the
/// open interval `T^{|u|}` of that cylinder.
pub fn follower_interval<S: Scalar>(map: &MapParams<S>, u: &[Symbol]) -> Result<(S, S)> {
    let mut lo = S::zero();
    let mut hi = S::one();
    for (t, &s) in u.iter().enumerate() {
        if s == 0 || s as usize > map.k() {
            return Err(Error::NotInLanguage { position: t });
        }
        match map.image_interval(&lo, &hi, s) {
            Some((a, b)) => {
                lo = a;
                hi = b;
            }
            None => return Err(Error::NotInLanguage { position: t }),
        }
    }
    Ok((lo, hi))
}

/// Symbols that can follow `u` in the language.
pub fn followers<S: Scalar>(map: &MapParams<S>, u: &[Symbol]) -> Result<BTreeSet<Symbol>> {
    let (lo, hi) = follower_interval(map, u)?;
    Ok(map.cells_meeting(&lo, &hi).into_iter().collect())
}

/// Whether `u` is an admissible word.
pub fn in_language<S: Scalar>(map: &MapParams<S>, u: &[Symbol]) -> bool {
    follower_interval(map, u).is_ok()
}

/// Order of itineraries matching the order of points: at the first
/// difference, symbols compare directly after an even number of decreasing
/// branches and reversed after an odd number. Equal when one word is a
/// prefix of the other.
pub fn signed_lex_cmp(signs: &[Sign], u: &[Symbol], v: &[Symbol]) -> Ordering {
    let mut flipped = false;
    for (&x, &y) in u.iter().zip(v.iter()) {
        if x != y {
            let o = x.cmp(&y);
            return if flipped { o.reverse() } else { o };
        }
        if signs[x as usize - 1] == Sign::Minus {
            flipped = !flipped;
        }
    }
    Ordering::Equal
}

/// Parses a word like `"1 2 1"` or `"121"` (single-digit symbols).
pub fn parse_word(s: &str) -> Result<Word> {
    let parts: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|p| !p.is_empty()).collect();
    let symbols: Vec<String> = if parts.len() == 1 { parts[0].chars().map(String::from).collect() } else { parts.iter().map(|p| p.to_string()).collect() };
    symbols
        .iter()
        .map(|p| p.parse::<Symbol>().map_err(|_| Error::InvalidParams(format!("bad symbol {p:?}"))))
        .collect()
}

pub fn format_word(w: &[Symbol]) -> String {
    if w.iter().all(|&s| s < 10) {
        w.iter().map(|s| s.to_string()).collect()
    } else {
        w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    }
}
