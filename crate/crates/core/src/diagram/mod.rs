//! Markov diagrams of generalized (alpha, beta)-transformations.
//!
//! Vertices are intervals `T^n(cylinder) ∩ cell`; arrows follow the map.
//! [`build_diagram`] constructs the diagram from kneading data and cut times
//! alone; [`build_diagram_interval`] iterates exact intervals and serves as
//! an independent cross-check.

mod build;
mod classify;
mod cut;
mod walk;

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::coding::Line;
use crate::error::{Error, Result};
use crate::map::{Symbol, Word};
use crate::scalar::Scalar;

pub use build::{build_diagram, build_diagram_interval, MIN_COMPARE};
pub use classify::{
    classify, compare_constant, lex_condition, Case, Classification, LexOutcome, LexVerdict, LineClasses,
};
pub use cut::{cut_times, CutTimes};
pub use walk::{check_walk_against, CutEvent, Endpoint, LineVertex, LineWalk, Symbolic, VertexKey};

/// How a vertex was first named.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexTag {
    /// Full cell.
    Base(Symbol),
    /// `n`-th vertex on a kneading line.
    Line(Line, usize),
    /// Successor created at the `m`-th cut of a line.
    Piece(Line, usize),
    /// Discovered at this breadth-first level by the interval construction.
    Level(usize),
}

impl VertexTag {
    pub fn label(&self) -> String {
        match self {
            VertexTag::Base(i) => format!("[{i}]"),
            VertexTag::Line(Line::A, n) => format!("A{n}"),
            VertexTag::Line(Line::B, n) => format!("B{n}"),
            VertexTag::Piece(l, m) => format!("P{}{m}", l.name()),
            VertexTag::Level(n) => format!("L{n}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Vertex<S> {
    pub tag: VertexTag,
    pub symbol: Symbol,
    pub lo: S,
    pub hi: S,
}

/// A truncated Markov diagram with canonically ordered vertices
/// (by symbol, then interval endpoints).
#[derive(Clone, Debug)]
pub struct MarkovDiagram<S> {
    pub vertices: Vec<Vertex<S>>,
    /// Sorted successor lists.
    pub successors: Vec<Vec<usize>>,
    /// Whether the successors of a vertex were computed.
    pub expanded: Vec<bool>,
    /// `cells[j - 1]` is the full cell `j`.
    pub cells: Vec<usize>,
    /// Every name a vertex received during construction.
    pub aliases: BTreeMap<VertexTag, usize>,
    /// Truncation level.
    pub depth: usize,
}

pub(crate) struct RawDiagram<S> {
    pub vertices: Vec<Vertex<S>>,
    pub successors: Vec<Vec<usize>>,
    pub expanded: Vec<bool>,
    pub cells: Vec<usize>,
    pub aliases: BTreeMap<VertexTag, usize>,
    pub depth: usize,
}

impl<S: Scalar> RawDiagram<S> {
    pub fn canonical(self) -> MarkovDiagram<S> {
        let n = self.vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            let (u, v) = (&self.vertices[i], &self.vertices[j]);
            u.symbol.cmp(&v.symbol).then_with(|| u.lo.total_cmp(&v.lo)).then_with(|| u.hi.total_cmp(&v.hi))
        });
        let mut new_id = vec![0; n];
        for (pos, &old) in order.iter().enumerate() {
            new_id[old] = pos;
        }
        let mut vertices = Vec::with_capacity(n);
        let mut successors = Vec::with_capacity(n);
        let mut expanded = Vec::with_capacity(n);
        let mut raw_vertices: Vec<Option<Vertex<S>>> = self.vertices.into_iter().map(Some).collect();
        for &old in &order {
            vertices.push(raw_vertices[old].take().expect("each vertex moved once"));
            let mut succ: Vec<usize> = self.successors[old].iter().map(|&s| new_id[s]).collect();
            succ.sort_unstable();
            succ.dedup();
            successors.push(succ);
            expanded.push(self.expanded[old]);
        }
        MarkovDiagram {
            vertices,
            successors,
            expanded,
            cells: self.cells.iter().map(|&c| new_id[c]).collect(),
            aliases: self.aliases.into_iter().map(|(t, v)| (t, new_id[v])).collect(),
            depth: self.depth,
        }
    }
}

impl<S: Scalar> MarkovDiagram<S> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn arrow_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn has_arrow(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, succ) in self.successors.iter().enumerate() {
            for &w in succ {
                pred[w].push(v);
            }
        }
        pred
    }

    /// Vertex `A_n` or `B_n`, when the diagram was built from kneading data.
    pub fn line_vertex(&self, line: Line, n: usize) -> Option<usize> {
        self.aliases.get(&VertexTag::Line(line, n)).copied()
    }

    /// Breadth-first distance of every vertex from the full cells.
    pub fn levels(&self) -> Vec<Option<usize>> {
        let mut level = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &c in &self.cells {
            if level[c].is_none() {
                level[c] = Some(0);
                queue.push_back(c);
            }
        }
        while let Some(v) = queue.pop_front() {
            let next = level[v].expect("queued vertices have a level") + 1;
            for &w in &self.successors[v] {
                if level[w].is_none() {
                    level[w] = Some(next);
                    queue.push_back(w);
                }
            }
        }
        level
    }

    /// Finds the vertex with the given interval.
    pub fn find(&self, symbol: Symbol, lo: &S, hi: &S) -> Option<usize> {
        self.vertices
            .binary_search_by(|v| {
                v.symbol.cmp(&symbol).then_with(|| v.lo.total_cmp(lo)).then_with(|| v.hi.total_cmp(hi))
            })
            .ok()
    }

    /// Same vertices (as intervals), same expanded set and same arrows.
    pub fn compare_structure(&self, other: &MarkovDiagram<S>) -> std::result::Result<(), String> {
        if self.len() != other.len() {
            return Err(format!("{} vertices vs {}", self.len(), other.len()));
        }
        for (i, (u, v)) in self.vertices.iter().zip(&other.vertices).enumerate() {
            let same = u.symbol == v.symbol
                && u.lo.total_cmp(&v.lo) == Ordering::Equal
                && u.hi.total_cmp(&v.hi) == Ordering::Equal;
            if !same {
                return Err(format!(
                    "vertex {i}: [{}] ({}, {}) vs [{}] ({}, {})",
                    u.symbol, u.lo, u.hi, v.symbol, v.lo, v.hi
                ));
            }
            if self.expanded[i] != other.expanded[i] {
                return Err(format!("vertex {i} ({}) expanded in only one diagram", u.tag.label()));
            }
            if self.successors[i] != other.successors[i] {
                return Err(format!(
                    "vertex {i} ({}) successors {:?} vs {:?}",
                    u.tag.label(),
                    self.successors[i],
                    other.successors[i]
                ));
            }
        }
        Ok(())
    }

    /// Graphviz rendering with canonical vertex order.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph markov {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(
                s,
                "  v{i} [label=\"{} [{}] ({:.6}, {:.6})\"{}];",
                v.tag.label(),
                v.symbol,
                v.lo.approx(),
                v.hi.approx(),
                if self.expanded[i] { "" } else { ", style=dashed" }
            );
        }
        for (i, succ) in self.successors.iter().enumerate() {
            for &j in succ {
                let _ = writeln!(s, "  v{i} -> v{j};");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Symbol word read along a path of vertices.
pub fn project_path<S: Scalar>(diagram: &MarkovDiagram<S>, path: &[usize]) -> Result<Word> {
    for (pos, &v) in path.iter().enumerate() {
        if v >= diagram.len() {
            return Err(Error::InvalidPath(format!("vertex {v} at position {pos} does not exist")));
        }
    }
    for (pos, w) in path.windows(2).enumerate() {
        if !diagram.has_arrow(w[0], w[1]) {
            return Err(Error::InvalidPath(format!("no arrow {} -> {} at position {pos}", w[0], w[1])));
        }
    }
    Ok(path.iter().map(|&v| diagram.vertices[v].symbol).collect())
}
