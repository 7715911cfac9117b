//! Generalized (alpha, beta)-transformations and their one-sided evaluation.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Branch label, `1..=k`.
pub type Symbol = u16;
pub type Word = Vec<Symbol>;

/// Orientation of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn parse_list(s: &str) -> Result<Vec<Sign>> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::InvalidParams(format!("bad sign character {other:?}"))),
            })
            .collect()
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Side from which a point is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn after(self, sign: Sign) -> Side {
        match sign {
            Sign::Plus => self,
            Sign::Minus => self.flip(),
        }
    }
}

/// A point of `[0, 1]` together with the side it is approached from.
#[derive(Clone, Debug, PartialEq)]
pub struct SidedPoint<S> {
    pub value: S,
    pub side: Side,
}

impl<S: Scalar> SidedPoint<S> {
    pub fn new(value: S, side: Side) -> Result<Self> {
        let bad = value < S::zero()
            || value > S::one()
            || (side == Side::Left && value.is_zero())
            || (side == Side::Right && value.is_one());
        if bad {
            return Err(Error::InvalidSidedPoint(format!("({value}, {side:?})")));
        }
        Ok(SidedPoint { value, side })
    }
}

/// Orbit points with a bound on their accumulated rounding error.
#[derive(Clone, Debug)]
pub struct Orbit<S> {
    pub points: Vec<S>,
    pub error_bound: f64,
}

/// Default absolute error tolerated on floating orbits.
pub const DEFAULT_GUARD_BAND: f64 = 1.0 / (1u64 << 20) as f64;

/// A generalized (alpha, beta)-transformation.
///
/// With `k = ceil(alpha + beta)` and `c_i = (i - alpha) / beta`, branch `i`
/// acts on `[c_{i-1}, c_i)` (the last branch on the closed interval) by
/// `alpha + beta x - i + 1` when increasing and `-alpha - beta x + i` when
/// decreasing.
#[derive(Clone, Debug)]
pub struct MapParams<S> {
    alpha: S,
    beta: S,
    signs: Vec<Sign>,
    critical: Vec<S>,
    precision_bits: u32,
}

impl<S: Scalar> MapParams<S> {
    pub fn new(alpha: S, beta: S, signs: Vec<Sign>, precision_bits: u32) -> Result<Self> {
        if beta <= S::one() {
            return Err(Error::InvalidParams(format!("beta = {beta} must exceed 1")));
        }
        if alpha < S::zero() || alpha >= S::one() {
            return Err(Error::InvalidParams(format!("alpha = {alpha} must lie in [0, 1)")));
        }
        if precision_bits == 0 {
            return Err(Error::InvalidParams("precision_bits must be positive".into()));
        }
        let sum = alpha.clone() + beta.clone();
        let fl = sum.floor_i64();
        let k = if S::from_i64(fl).expect("integer") == sum { fl } else { fl + 1 } as usize;
        if signs.len() != k {
            return Err(Error::InvalidParams(format!(
                "expected {k} branch signs for ceil(alpha + beta) = {k}, got {}",
                signs.len()
            )));
        }
        let mut critical = Vec::with_capacity(k + 1);
        critical.push(S::zero());
        for i in 1..k {
            let i_s = S::from_usize(i).expect("integer");
            critical.push((i_s - alpha.clone()) / beta.clone());
        }
        critical.push(S::one());
        Ok(MapParams { alpha, beta, signs, critical, precision_bits })
    }

    pub fn k(&self) -> usize {
        self.signs.len()
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn sign(&self, j: Symbol) -> Sign {
        self.signs[j as usize - 1]
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `c_0 = 0, c_1, ..., c_k = 1`.
    pub fn critical_points(&self) -> &[S] {
        &self.critical
    }

    /// Left end of cell `j`.
    pub fn cell_lo(&self, j: Symbol) -> &S {
        &self.critical[j as usize - 1]
    }

    /// Right end of cell `j`.
    pub fn cell_hi(&self, j: Symbol) -> &S {
        &self.critical[j as usize]
    }

    /// Applies branch `j` to `x` regardless of which cell `x` lies in.
    pub fn branch(&self, j: Symbol, x: &S) -> S {
        let shift = S::from_u16(j).expect("integer");
        match self.sign(j) {
            Sign::Plus => self.alpha.clone() + self.beta.clone() * x.clone() - shift + S::one(),
            Sign::Minus => shift - self.alpha.clone() - self.beta.clone() * x.clone(),
        }
    }

    /// The preimage of `y` under branch `j` (may lie outside cell `j`).
    pub fn inverse_branch(&self, j: Symbol, y: &S) -> S {
        let shift = S::from_u16(j).expect("integer");
        match self.sign(j) {
            Sign::Plus => (y.clone() - self.alpha.clone() + shift - S::one()) / self.beta.clone(),
            Sign::Minus => (shift - self.alpha.clone() - y.clone()) / self.beta.clone(),
        }
    }

    fn check_domain(&self, x: &S) -> Result<()> {
        if *x < S::zero() || *x > S::one() {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        Ok(())
    }

    /// Cell containing `x` under the half-open convention.
    pub fn cell_of(&self, x: &S) -> Result<Symbol> {
        self.check_domain(x)?;
        let k = self.k();
        // number of interior critical points <= x
        let pos = self.critical[1..k].partition_point(|c| c <= x);
        Ok(pos as Symbol + 1)
    }

    /// Cell containing points just to the given side of `v`.
    pub fn cell_sided(&self, v: &S, side: Side) -> Symbol {
        let k = self.k();
        let pos = match side {
            Side::Right => self.critical[1..k].partition_point(|c| c <= v),
            Side::Left => self.critical[1..k].partition_point(|c| c < v),
        };
        pos as Symbol + 1
    }

    /// Index `i` in `1..k` with `x == c_i`, if any.
    pub fn interior_critical_index(&self, x: &S) -> Option<usize> {
        let k = self.k();
        (1..k).find(|&i| self.critical[i].total_cmp(x) == Ordering::Equal)
    }

    /// `T(x)` and the branch used.
    pub fn eval(&self, x: &S) -> Result<(S, Symbol)> {
        let j = self.cell_of(x)?;
        Ok((self.branch(j, x), j))
    }

    /// One-sided image: the limit of `T` along points on the given side.
    pub fn eval_sided(&self, p: &SidedPoint<S>) -> Result<(SidedPoint<S>, Symbol)> {
        self.check_domain(&p.value)?;
        let j = self.cell_sided(&p.value, p.side);
        let value = self.branch(j, &p.value);
        Ok((SidedPoint { value, side: p.side.after(self.sign(j)) }, j))
    }

    fn step_error(&self, x: &S, j: Symbol) -> f64 {
        let u = S::unit_roundoff();
        4.0 * u * (1.0 + self.alpha.approx().abs() + self.beta.approx() * x.approx().abs() + j as f64)
    }

    fn distance_to_interior_critical(&self, x: &S) -> f64 {
        let xv = x.approx();
        self.critical[1..self.k()]
            .iter()
            .map(|c| (c.approx() - xv).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `x, T(x), ..., T^n(x)` with the default guard band.
    pub fn orbit(&self, x: &S, n: usize) -> Result<Orbit<S>> {
        self.orbit_with_guard(x, n, DEFAULT_GUARD_BAND)
    }

    /// Orbit with explicit guard band. For floating backends the error bound
    /// follows `e_{t+1} = beta e_t + O(u)`; the orbit stops with
    /// `PrecisionExhausted` once the bound exceeds `guard` or the distance to
    /// an interior critical point.
    pub fn orbit_with_guard(&self, x: &S, n: usize, guard: f64) -> Result<Orbit<S>> {
        self.check_domain(x)?;
        let mut points = Vec::with_capacity(n + 1);
        points.push(x.clone());
        let mut err = 0.0;
        let beta = self.beta.approx();
        let mut cur = x.clone();
        for t in 0..n {
            if !S::EXACT && err > 0.0 && err >= self.distance_to_interior_critical(&cur) {
                return Err(Error::PrecisionExhausted { achieved_depth: t });
            }
            let (y, j) = self.eval(&cur)?;
            err = beta * err + self.step_error(&cur, j);
            if !S::EXACT && err > guard {
                return Err(Error::PrecisionExhausted { achieved_depth: t });
            }
            // rounding may push a float just outside [0, 1]
            let y = if y < S::zero() {
                S::zero()
            } else if y > S::one() {
                S::one()
            } else {
                y
            };
            points.push(y.clone());
            cur = y;
        }
        Ok(Orbit { points, error_bound: err })
    }

    /// Image of the open interval `(lo, hi) ∩ (c_{j-1}, c_j)` under branch
    /// `j`, as an ordered open interval; `None` when the intersection is empty.
    pub fn image_interval(&self, lo: &S, hi: &S, j: Symbol) -> Option<(S, S)> {
        let a = if lo > self.cell_lo(j) { lo.clone() } else { self.cell_lo(j).clone() };
        let b = if hi < self.cell_hi(j) { hi.clone() } else { self.cell_hi(j).clone() };
        if a >= b {
            return None;
        }
        let (fa, fb) = (self.branch(j, &a), self.branch(j, &b));
        Some(match self.sign(j) {
            Sign::Plus => (fa, fb),
            Sign::Minus => (fb, fa),
        })
    }

    /// Cells whose interior meets the open interval `(lo, hi)`.
    pub fn cells_meeting(&self, lo: &S, hi: &S) -> Vec<Symbol> {
        (1..=self.k() as Symbol)
            .filter(|&j| lo < self.cell_hi(j) && hi > self.cell_lo(j))
            .collect()
    }

    /// The same map with `f64` parameters.
    pub fn to_f64_map(&self) -> MapParams<f64> {
        MapParams::new(self.alpha.approx(), self.beta.approx(), self.signs.clone(), self.precision_bits.min(53))
            .expect("parameters already validated")
    }

    /// Heuristic transitivity test: every cell of a uniform partition of
    /// `[0, 1]` into `cells` pieces must have forward images whose union
    /// covers `[0, 1]` within `max_iter` iterations.
    pub fn is_transitive_heuristic(&self, cells: usize, max_iter: usize) -> bool {
        (0..cells).all(|i| {
            let lo = S::from_ratio(i as i64, cells as i64);
            let hi = S::from_ratio(i as i64 + 1, cells as i64);
            self.covers_under_iteration(vec![(lo, hi)], max_iter)
        })
    }

    fn covers_under_iteration(&self, start: Vec<(S, S)>, max_iter: usize) -> bool {
        let mut current = start;
        let mut reached = current.clone();
        for _ in 0..max_iter {
            let mut next = Vec::new();
            for (lo, hi) in &current {
                for j in self.cells_meeting(lo, hi) {
                    if let Some(im) = self.image_interval(lo, hi, j) {
                        next.push(im);
                    }
                }
            }
            current = merge_intervals(next);
            reached.extend(current.iter().cloned());
            reached = merge_intervals(reached);
            if reached.len() == 1 && reached[0].0.is_zero() && reached[0].1.is_one() {
                return true;
            }
        }
        false
    }
}

/// Sorts closed intervals and merges overlapping or touching ones.
pub fn merge_intervals<S: Scalar>(mut v: Vec<(S, S)>) -> Vec<(S, S)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(S, S)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

impl<S: Scalar> fmt::Display for MapParams<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signs: String = self.signs.iter().map(|s| s.as_char()).collect();
        write!(f, "T(alpha={}, beta={}, signs={})", self.alpha, self.beta, signs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MapParams::new(r(0, 1), r(1, 1), vec![Sign::Plus], 64).is_err());
        assert!(MapParams::new(r(0, 1), r(2, 1), vec![Sign::Plus], 64).is_err());
        assert!(MapParams::new(r(1, 1), r(2, 1), vec![Sign::Plus; 3], 64).is_err());
    }

    #[test]
    fn doubling_cells() {
        let m = MapParams::new(r(0, 1), r(2, 1), vec![Sign::Plus; 2], 64).unwrap();
        assert_eq!(m.k(), 2);
        assert_eq!(m.cell_of(&r(1, 2)).unwrap(), 2);
        assert_eq!(m.cell_of(&r(1, 1)).unwrap(), 2);
        assert_eq!(m.cell_sided(&r(1, 2), Side::Left), 1);
        assert_eq!(m.eval(&r(1, 3)).unwrap(), (r(2, 3), 1));
        assert!(m.eval(&r(3, 2)).is_err());
    }

    #[test]
    fn inverse_branch_inverts() {
        let m = MapParams::new(r(3, 10), r(13, 5), vec![Sign::Plus, Sign::Minus, Sign::Plus], 64).unwrap();
        for j in 1..=3 {
            let y = r(2, 7);
            assert_eq!(m.branch(j, &m.inverse_branch(j, &y)), y);
        }
    }

    #[test]
    fn float_orbit_exhausts_precision() {
        let m = MapParams::new(0.0f64, 2.0, vec![Sign::Plus; 2], 53).unwrap();
        assert!(m.orbit(&0.1, 10).is_ok());
        assert!(matches!(m.orbit(&0.1, 200), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn merge_touching_intervals() {
        let v = merge_intervals(vec![(r(1, 2), r(1, 1)), (r(0, 1), r(1, 2))]);
        assert_eq!(v, vec![(r(0, 1), r(1, 1))]);
    }
}
