//! Symbolic description of the vertices along the two kneading lines.
//!
//! Every vertex on a line is an interval whose endpoints are sided points of
//! a special kind: a sided critical point, or a point `sigma^s(a)` or
//! `sigma^s(b)` of one of the kneading orbits. Working with these
//! descriptors instead of numbers lets the diagram be built from kneading
//! data alone.

use std::cmp::Ordering;

use crate::coding::{KneadingData, Line};
use crate::error::{Error, Result};
use crate::map::{Side, Sign, Symbol};
use crate::scalar::Scalar;

use super::cut::CutTimes;

/// Sided endpoint of a vertex interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    /// `c_index` approached from `side`.
    Crit { index: usize, side: Side },
    /// `sigma^shift` of the kneading sequence of `line`.
    Orbit { line: Line, shift: usize },
}

/// One vertex of a line: interval with endpoints `x_end` (on the kneading
/// orbit of the line itself) and `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineVertex {
    pub symbol: Symbol,
    pub x_end: Endpoint,
    pub other: Endpoint,
}

/// What happens at the `m`-th cut time of a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutEvent {
    pub m: usize,
    /// `R_m`.
    pub time: usize,
    /// Critical endpoint `f_m` active on `(R_{m-1}, R_m]`.
    pub f: Endpoint,
    /// Line whose kneading sequence equals `sigma(f_m)`.
    pub returns_to: Line,
    /// `R_m - R_{m-1}`.
    pub gap: usize,
    /// Symbol of the line at the cut.
    pub x_symbol: Symbol,
    /// Symbol reached by the other endpoint.
    pub other_symbol: Symbol,
    /// Successor lying in cell `other_symbol`.
    pub piece: LineVertex,
    /// Cells lying strictly between the two symbols, entered in full.
    pub full_cells: Vec<Symbol>,
    /// `f_{m+1}`.
    pub next_f: Endpoint,
}

/// Vertices `Z_0, ..., Z_n` along one line, with its cut events.
#[derive(Clone, Debug)]
pub struct LineWalk {
    pub line: Line,
    pub vertices: Vec<LineVertex>,
    pub cuts: Vec<CutEvent>,
}

impl LineWalk {
    /// Cut event `m >= 1`.
    pub fn cut(&self, m: usize) -> Option<&CutEvent> {
        m.checked_sub(1).and_then(|i| self.cuts.get(i))
    }

    pub fn cut_times(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.cuts.iter().map(|c| c.time)).collect()
    }
}

/// Symbol sequences and sides of endpoint descriptors.
pub struct Symbolic<'a, S> {
    pub kn: &'a KneadingData<S>,
    // flips[line][s]: number of decreasing branches in the first s symbols is odd
    flips: [Vec<bool>; 2],
}

fn line_index(l: Line) -> usize {
    match l {
        Line::A => 0,
        Line::B => 1,
    }
}

impl<'a, S: Scalar> Symbolic<'a, S> {
    pub fn new(kn: &'a KneadingData<S>) -> Self {
        let flips_of = |w: &[Symbol]| {
            let mut v = Vec::with_capacity(w.len() + 1);
            let mut f = false;
            v.push(f);
            for &s in w {
                if kn.sign(s) == Sign::Minus {
                    f = !f;
                }
                v.push(f);
            }
            v
        };
        Symbolic { kn, flips: [flips_of(&kn.a), flips_of(&kn.b)] }
    }

    pub fn k(&self) -> usize {
        self.kn.k()
    }

    /// Sided itinerary of an endpoint (as far as known).
    pub fn seq(&self, e: Endpoint) -> &'a [Symbol] {
        match e {
            Endpoint::Crit { index, side } => self.kn.crit(index, side),
            Endpoint::Orbit { line, shift } => &self.kn.line(line)[shift.min(self.kn.depth)..],
        }
    }

    pub fn side(&self, e: Endpoint) -> Side {
        match e {
            Endpoint::Crit { side, .. } => side,
            Endpoint::Orbit { line, shift } => {
                let start = match line {
                    Line::A => Side::Right,
                    Line::B => Side::Left,
                };
                if self.flips[line_index(line)][shift] {
                    start.flip()
                } else {
                    start
                }
            }
        }
    }

    pub fn first_symbol(&self, e: Endpoint) -> Result<Symbol> {
        self.seq(e)
            .first()
            .copied()
            .ok_or(Error::InsufficientKneadingDepth { needed: self.kn.depth + 1, available: self.kn.depth })
    }

    /// Line whose kneading sequence is `sigma` of the sided critical point.
    pub fn returns_to(&self, e: Endpoint) -> Line {
        match e {
            Endpoint::Crit { index, side: Side::Right } => match self.kn.signs[index] {
                Sign::Plus => Line::A,
                Sign::Minus => Line::B,
            },
            Endpoint::Crit { index, side: Side::Left } => match self.kn.signs[index - 1] {
                Sign::Plus => Line::B,
                Sign::Minus => Line::A,
            },
            Endpoint::Orbit { line, .. } => line,
        }
    }

    /// Descriptor of the image point.
    pub fn advance(&self, e: Endpoint) -> Endpoint {
        match e {
            Endpoint::Crit { .. } => Endpoint::Orbit { line: self.returns_to(e), shift: 0 },
            Endpoint::Orbit { line, shift } => Endpoint::Orbit { line, shift: shift + 1 },
        }
    }

    /// Exact value of an endpoint.
    pub fn value(&self, e: Endpoint) -> S {
        match e {
            Endpoint::Crit { index, .. } => self.kn.critical[index].clone(),
            Endpoint::Orbit { line, shift } => self.kn.line_points(line)[shift].value.clone(),
        }
    }

    /// Two endpoints denote the same sided point (itineraries agree on `len` symbols).
    pub fn same_point(&self, e: Endpoint, f: Endpoint, len: usize) -> bool {
        if self.side(e) != self.side(f) {
            return false;
        }
        let (u, v) = (self.seq(e), self.seq(f));
        let n = len.min(u.len()).min(v.len());
        u[..n] == v[..n]
    }

    /// `(lo, hi)` by side: the left end of an interval is approached from the right.
    pub fn ordered(&self, v: &LineVertex) -> Result<(Endpoint, Endpoint)> {
        match (self.side(v.x_end), self.side(v.other)) {
            (Side::Right, Side::Left) => Ok((v.x_end, v.other)),
            (Side::Left, Side::Right) => Ok((v.other, v.x_end)),
            _ => Err(Error::Inconsistent(format!("vertex endpoints {:?} share a side", v))),
        }
    }

    /// Comparison key identifying a vertex by its endpoint itineraries.
    pub fn key(&self, v: &LineVertex, len: usize) -> Result<VertexKey> {
        let (lo, hi) = self.ordered(v)?;
        let cut = |w: &[Symbol]| w[..len.min(w.len())].to_vec();
        Ok(VertexKey { symbol: v.symbol, lo: cut(self.seq(lo)), hi: cut(self.seq(hi)) })
    }

    pub fn same_vertex(&self, v: &LineVertex, w: &LineVertex, len: usize) -> Result<bool> {
        if v.symbol != w.symbol {
            return Ok(false);
        }
        let (a, b) = self.ordered(v)?;
        let (c, d) = self.ordered(w)?;
        Ok(self.same_point(a, c, len) && self.same_point(b, d, len))
    }

    /// The full cell `i` as a vertex.
    pub fn cell(&self, i: Symbol) -> LineVertex {
        let k = self.k() as Symbol;
        let lo = if i == 1 {
            Endpoint::Orbit { line: Line::A, shift: 0 }
        } else {
            Endpoint::Crit { index: i as usize - 1, side: Side::Right }
        };
        let hi = if i == k {
            Endpoint::Orbit { line: Line::B, shift: 0 }
        } else {
            Endpoint::Crit { index: i as usize, side: Side::Left }
        };
        LineVertex { symbol: i, x_end: lo, other: hi }
    }

    /// Walks a line up to level `n_max`, following the other endpoint and
    /// splitting at each cut.
    pub fn walk(&self, line: Line, n_max: usize) -> Result<LineWalk> {
        let kn = self.kn;
        if n_max >= kn.depth {
            return Err(Error::InsufficientKneadingDepth { needed: n_max + 1, available: kn.depth });
        }
        let x = kn.line(line);
        let k = self.k();
        let first_f = match line {
            Line::A => Endpoint::Crit { index: 1, side: Side::Left },
            Line::B => Endpoint::Crit { index: k - 1, side: Side::Right },
        };
        let mut vertices = vec![LineVertex { symbol: x[0], x_end: Endpoint::Orbit { line, shift: 0 }, other: first_f }];
        let mut cuts = Vec::new();
        let mut f = first_f;
        let mut last_cut = 0;
        for n in 1..=n_max {
            let o = self.advance(vertices[n - 1].other);
            let j = x[n];
            let jp = self.first_symbol(o)?;
            let x_end = Endpoint::Orbit { line, shift: n };
            if jp == j {
                vertices.push(LineVertex { symbol: j, x_end, other: o });
                continue;
            }
            let (next_f, piece_crit) = if jp > j {
                (
                    Endpoint::Crit { index: j as usize, side: Side::Left },
                    Endpoint::Crit { index: jp as usize - 1, side: Side::Right },
                )
            } else {
                (
                    Endpoint::Crit { index: j as usize - 1, side: Side::Right },
                    Endpoint::Crit { index: jp as usize, side: Side::Left },
                )
            };
            let (lo, hi) = if j < jp { (j, jp) } else { (jp, j) };
            cuts.push(CutEvent {
                m: cuts.len() + 1,
                time: n,
                f,
                returns_to: self.returns_to(f),
                gap: n - last_cut,
                x_symbol: j,
                other_symbol: jp,
                piece: LineVertex { symbol: jp, x_end: o, other: piece_crit },
                full_cells: (lo + 1..hi).collect(),
                next_f,
            });
            vertices.push(LineVertex { symbol: j, x_end, other: next_f });
            f = next_f;
            last_cut = n;
        }
        Ok(LineWalk { line, vertices, cuts })
    }
}

/// Vertex identity: symbol plus itinerary prefixes of both endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexKey {
    pub symbol: Symbol,
    pub lo: Vec<Symbol>,
    pub hi: Vec<Symbol>,
}

/// Checks that the symbolic walk reproduces the geometric cut times.
pub fn check_walk_against(walk: &LineWalk, cuts: &CutTimes) -> Result<()> {
    let from_walk = walk.cut_times();
    let limit = walk.vertices.len() - 1;
    let geometric: Vec<usize> = cuts.line(walk.line).iter().copied().filter(|&t| t <= limit).collect();
    if from_walk.cmp(&geometric) != Ordering::Equal {
        return Err(Error::Inconsistent(format!(
            "cut times of line {} disagree: symbolic {:?} vs geometric {:?}",
            walk.line.name(),
            &from_walk[..from_walk.len().min(8)],
            &geometric[..geometric.len().min(8)]
        )));
    }
    Ok(())
}
