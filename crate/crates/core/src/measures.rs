//! Empirical measures on `[0, 1]`, Wasserstein-1 distance and sampling of
//! Lebesgue-random orbits.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{MapParams, Sign, Symbol, Word};
use crate::scalar::Scalar;

/// Finitely supported probability measure with sorted atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<(f64, f64)>,
}

impl EmpiricalMeasure {
    /// Uniform weights on the given points.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("no points".into()));
        }
        let w = 1.0 / points.len() as f64;
        Self::from_weighted(points.iter().map(|&p| (p, w)).collect())
    }

    /// Weighted atoms; weights must be nonnegative and sum to 1 (within 1e-9).
    pub fn from_weighted(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for &(p, w) in &atoms {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidMeasure(format!("atom position {p} outside [0, 1]")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative or non-finite weight {w}")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => merged.push((p, w)),
            }
        }
        Ok(EmpiricalMeasure { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `∫ f dμ`.
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(p, w)| w * f(p)).sum()
    }

    /// `position,weight` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("position,weight\n");
        for (p, w) in &self.atoms {
            let _ = writeln!(s, "{p},{w}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("position")) {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidMeasure(format!("bad csv line {}: {line:?}", i + 1)))
            };
            atoms.push((parse(parts.next())?, parse(parts.next())?));
        }
        Self::from_weighted(atoms)
    }
}

/// Uniform measure on `x, T x, ..., T^{n-1} x`.
pub fn empirical_measure<S: Scalar>(map: &MapParams<S>, x0: &S, n: usize) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::InvalidMeasure("orbit length must be positive".into()));
    }
    let orbit = map.orbit(x0, n - 1)?;
    let points: Vec<f64> = orbit.points.iter().map(|p| p.approx()).collect();
    EmpiricalMeasure::from_points(&points)
}

/// Wasserstein-1 distance, `∫ |F_μ - F_ν|` over `[0, 1]`; exact for atomic
/// measures up to floating rounding.
pub fn w1_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
    let (a, b) = (&mu.atoms, &nu.atoms);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut x = 0.0;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        total += (fa - fb).abs() * (next - x);
        x = next;
        while i < a.len() && a[i].0 == next {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == next {
            fb += b[j].1;
            j += 1;
        }
    }
    total + (fa - fb).abs() * (1.0 - x)
}

/// Precomputed CDF of a large target for fast W1 against small measures.
pub struct CdfIndex {
    positions: Vec<f64>,
    cum_weight: Vec<f64>,
    cum_moment: Vec<f64>,
}

impl CdfIndex {
    pub fn new(target: &EmpiricalMeasure) -> Self {
        let mut positions = Vec::with_capacity(target.len());
        let mut cum_weight = Vec::with_capacity(target.len());
        let mut cum_moment = Vec::with_capacity(target.len());
        let (mut w, mut m) = (0.0, 0.0);
        for &(p, q) in target.atoms() {
            w += q;
            m += q * p;
            positions.push(p);
            cum_weight.push(w);
            cum_moment.push(m);
        }
        CdfIndex { positions, cum_weight, cum_moment }
    }

    /// `∫_0^x F(t) dt`.
    fn integral(&self, x: f64) -> f64 {
        let n = self.positions.partition_point(|&p| p <= x);
        if n == 0 {
            return 0.0;
        }
        x * self.cum_weight[n - 1] - self.cum_moment[n - 1]
    }

    /// Least atom position where the target CDF reaches `c`.
    fn quantile(&self, c: f64) -> f64 {
        let i = self.cum_weight.partition_point(|&w| w < c);
        self.positions.get(i).copied().unwrap_or(f64::INFINITY)
    }

    /// `∫_{x1}^{x2} |c - F|` for `x1 <= x2`.
    fn segment(&self, c: f64, x1: f64, x2: f64) -> f64 {
        if x2 <= x1 {
            return 0.0;
        }
        let p = self.quantile(c).clamp(x1, x2);
        let (g1, gp, g2) = (self.integral(x1), self.integral(p), self.integral(x2));
        (c * (p - x1) - (gp - g1)) + ((g2 - gp) - c * (x2 - p))
    }

    /// W1 between the indexed target and `mu`.
    pub fn distance(&self, mu: &EmpiricalMeasure) -> f64 {
        let mut total = 0.0;
        let mut x = 0.0;
        let mut c = 0.0;
        for &(p, w) in mu.atoms() {
            total += self.segment(c, x, p);
            c += w;
            x = p;
        }
        total + self.segment(c.min(1.0), x, 1.0)
    }
}

/// Draws itineraries of Lebesgue-random points one symbol at a time.
///
/// Conditional on the symbols drawn so far, the current orbit point is
/// uniform on the follower interval, so the next symbol is the cell of a
/// uniform point of that interval.
#[derive(Clone, Debug)]
pub struct LebesgueSampler {
    interior: Vec<f64>,
    cells: Vec<(f64, f64)>,
    slopes: Vec<f64>,
    offsets: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl LebesgueSampler {
    pub fn new(map: &MapParams<f64>) -> Self {
        let k = map.k();
        let c = map.critical_points();
        let beta = *map.beta();
        let mut slopes = Vec::with_capacity(k);
        let mut offsets = Vec::with_capacity(k);
        for j in 1..=k as Symbol {
            slopes.push(match map.sign(j) {
                Sign::Plus => beta,
                Sign::Minus => -beta,
            });
            offsets.push(map.branch(j, &0.0));
        }
        LebesgueSampler {
            interior: c[1..k].to_vec(),
            cells: (0..k).map(|j| (c[j], c[j + 1])).collect(),
            slopes,
            offsets,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn reset(&mut self) {
        self.lo = 0.0;
        self.hi = 1.0;
    }

    /// Current follower interval.
    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Next symbol (1-based) given a uniform variate `u` in `[0, 1)`.
    #[inline]
    pub fn step(&mut self, u: f64) -> Symbol {
        let y = self.lo + u * (self.hi - self.lo);
        let j = self.interior.partition_point(|&c| c <= y);
        let (clo, chi) = self.cells[j];
        let a = self.lo.max(clo);
        let b = self.hi.min(chi);
        let (fa, fb) = (self.slopes[j] * a + self.offsets[j], self.slopes[j] * b + self.offsets[j]);
        let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        self.lo = lo.max(0.0);
        self.hi = hi.min(1.0);
        if self.hi <= self.lo {
            // rounding collapsed the interval; restart from the full cell image
            self.lo = 0.0;
            self.hi = 1.0;
        }
        j as Symbol + 1
    }

    /// Preimage of `y` under branch `j`, clamped to the cell.
    pub fn inverse(&self, j: Symbol, y: f64) -> f64 {
        let i = j as usize - 1;
        ((y - self.offsets[i]) / self.slopes[i]).clamp(self.cells[i].0, self.cells[i].1)
    }
}

/// Orbit `x, T x, ..., T^{n-1} x` of a Lebesgue-random `x`, with its
/// itinerary. Points are rebuilt backwards through contracting inverse
/// branches, so they stay accurate in floating point.
pub fn lebesgue_orbit<R: Rng + ?Sized>(map: &MapParams<f64>, n: usize, rng: &mut R) -> (Vec<f64>, Word) {
    let mut sampler = LebesgueSampler::new(map);
    let word: Word = (0..n).map(|_| sampler.step(rng.gen::<f64>())).collect();
    let (lo, hi) = sampler.interval();
    let mut y = lo + rng.gen::<f64>() * (hi - lo);
    let mut points = vec![0.0; n];
    for t in (0..n).rev() {
        y = sampler.inverse(word[t], y);
        points[t] = y;
    }
    (points, word)
}

/// Average of a per-symbol observable along the atoms of a measure.
pub fn symbol_average(map: &MapParams<f64>, mu: &EmpiricalMeasure, weights: &[f64]) -> Result<f64> {
    if weights.len() != map.k() {
        return Err(Error::PreconditionViolated(format!("need {} weights, got {}", map.k(), weights.len())));
    }
    let mut total = 0.0;
    for &(p, w) in mu.atoms() {
        total += w * weights[map.cell_of(&p)? as usize - 1];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w1_of_point_masses() {
        let a = EmpiricalMeasure::from_points(&[0.2]).unwrap();
        let b = EmpiricalMeasure::from_points(&[0.7]).unwrap();
        assert!((w1_distance(&a, &b) - 0.5).abs() < 1e-15);
        let c = EmpiricalMeasure::from_points(&[0.2, 0.7]).unwrap();
        assert!((w1_distance(&a, &c) - 0.25).abs() < 1e-15);
        assert!((CdfIndex::new(&c).distance(&a) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(EmpiricalMeasure::from_weighted(vec![(0.5, 0.7)]).is_err());
        assert!(EmpiricalMeasure::from_weighted(vec![(1.5, 1.0)]).is_err());
        assert!(EmpiricalMeasure::from_weighted(vec![(0.5, -1.0), (0.2, 2.0)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = EmpiricalMeasure::from_weighted(vec![(0.25, 0.5), (0.75, 0.5)]).unwrap();
        assert_eq!(EmpiricalMeasure::from_csv(&m.to_csv()).unwrap(), m);
    }
}
