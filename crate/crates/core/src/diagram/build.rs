use std::collections::{BTreeMap, BTreeSet};

use crate::coding::{KneadingData, Line};
use crate::error::{Error, Result};
use crate::map::{MapParams, Symbol};
use crate::scalar::{Key, Scalar};

use super::walk::{check_walk_against, LineVertex, Symbolic, VertexKey};
use super::{CutTimes, MarkovDiagram, RawDiagram, Vertex, VertexTag};

/// Minimum number of kneading symbols compared when deciding that two
/// vertex descriptors denote the same interval.
pub const MIN_COMPARE: usize = 64;

struct Merger<'a, S> {
    sym: &'a Symbolic<'a, S>,
    len: usize,
    by_key: BTreeMap<VertexKey, usize>,
    reps: Vec<LineVertex>,
    aliases: BTreeMap<VertexTag, usize>,
    members: Vec<Vec<LineVertex>>,
}

impl<'a, S: Scalar> Merger<'a, S> {
    fn add(&mut self, tag: VertexTag, v: LineVertex) -> Result<usize> {
        let key = self.sym.key(&v, self.len)?;
        let id = match self.by_key.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.reps.len();
                self.by_key.insert(key, id);
                self.reps.push(v);
                self.members.push(Vec::new());
                id
            }
        };
        self.members[id].push(v);
        self.aliases.entry(tag).or_insert(id);
        Ok(id)
    }
}

/// Builds the Markov diagram truncated at level `n` from kneading data and
/// cut times.
///
/// Arrows: `Z_i -> Z_{i+1}` along each line; at a cut `R_m` the vertex
/// `Z_{R_m - 1}` also points to the piece entering the other cell and to
/// every cell lying strictly in between; each interior full cell points to
/// all full cells. Vertices are merged when both endpoint itineraries agree
/// on `depth - n >= MIN_COMPARE` symbols; merges are then confirmed on the
/// exact endpoint values.
pub fn build_diagram<S: Scalar>(kn: &KneadingData<S>, cuts: &CutTimes, n: usize) -> Result<MarkovDiagram<S>> {
    if kn.depth < n + MIN_COMPARE {
        return Err(Error::InsufficientKneadingDepth { needed: n + MIN_COMPARE, available: kn.depth });
    }
    if !cuts.covers(n) {
        return Err(Error::DepthExceeded { needed: n, available: cuts.depth });
    }
    let sym = Symbolic::new(kn);
    let k = kn.k() as Symbol;
    let walks = [sym.walk(Line::A, n)?, sym.walk(Line::B, n)?];
    for w in &walks {
        check_walk_against(w, cuts)?;
    }
    let mut merger = Merger {
        sym: &sym,
        len: kn.depth - n,
        by_key: BTreeMap::new(),
        reps: Vec::new(),
        aliases: BTreeMap::new(),
        members: Vec::new(),
    };
    let mut cells = Vec::with_capacity(k as usize);
    for i in 1..=k {
        cells.push(merger.add(VertexTag::Base(i), sym.cell(i))?);
    }
    let mut line_ids = Vec::new();
    for w in &walks {
        let mut ids = Vec::with_capacity(n + 1);
        for (i, v) in w.vertices.iter().enumerate() {
            ids.push(merger.add(VertexTag::Line(w.line, i), *v)?);
        }
        line_ids.push(ids);
    }
    let mut arrows: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut sources: BTreeSet<usize> = BTreeSet::new();
    for (w, ids) in walks.iter().zip(&line_ids) {
        let mut cut_iter = w.cuts.iter().peekable();
        for i in 0..n {
            let src = ids[i];
            sources.insert(src);
            arrows.insert((src, ids[i + 1]));
            while cut_iter.peek().is_some_and(|c| c.time < i + 1) {
                cut_iter.next();
            }
            if let Some(c) = cut_iter.peek().filter(|c| c.time == i + 1) {
                let piece = merger.add(VertexTag::Piece(w.line, c.m), c.piece)?;
                arrows.insert((src, piece));
                for &l in &c.full_cells {
                    arrows.insert((src, cells[l as usize - 1]));
                }
            }
        }
    }
    for i in 2..k {
        let src = cells[i as usize - 1];
        sources.insert(src);
        for &c in &cells {
            arrows.insert((src, c));
        }
    }

    // realise intervals and confirm merges on exact values
    let mut vertices = Vec::with_capacity(merger.reps.len());
    let mut seen: BTreeMap<(Symbol, Key<S>, Key<S>), usize> = BTreeMap::new();
    for (id, rep) in merger.reps.iter().enumerate() {
        let (lo_e, hi_e) = sym.ordered(rep)?;
        let (lo, hi) = (sym.value(lo_e), sym.value(hi_e));
        for m in &merger.members[id] {
            let (a, b) = sym.ordered(m)?;
            if sym.value(a).total_cmp(&lo).is_ne() || sym.value(b).total_cmp(&hi).is_ne() {
                return Err(Error::Inconsistent(format!("merged descriptors {:?} and {:?} differ in value", rep, m)));
            }
        }
        if let Some(prev) = seen.insert((rep.symbol, Key(lo.clone()), Key(hi.clone())), id) {
            return Err(Error::Inconsistent(format!("descriptors {prev} and {id} realise the same interval")));
        }
        let tag = merger
            .aliases
            .iter()
            .filter(|(_, &v)| v == id)
            .map(|(t, _)| *t)
            .min_by_key(|t| tag_rank(t))
            .expect("every vertex has a tag");
        vertices.push(Vertex { tag, symbol: rep.symbol, lo, hi });
    }
    let count = vertices.len();
    let mut successors = vec![Vec::new(); count];
    for (a, b) in arrows {
        successors[a].push(b);
    }
    let mut expanded = vec![false; count];
    for s in sources {
        expanded[s] = true;
    }
    Ok(RawDiagram { vertices, successors, expanded, cells, aliases: merger.aliases, depth: n }.canonical())
}

fn tag_rank(t: &VertexTag) -> (usize, u8) {
    match *t {
        VertexTag::Base(i) => (0, i as u8),
        VertexTag::Line(Line::A, n) => (n, 1),
        VertexTag::Line(Line::B, n) => (n, 2),
        VertexTag::Piece(_, m) => (usize::MAX / 2 + m, 3),
        VertexTag::Level(n) => (n, 4),
    }
}

/// Builds the diagram truncated at level `n` by iterating exact intervals:
/// starting from the full cells, every vertex found at a level below `n`
/// is expanded into the pieces of its image cut by the cells.
pub fn build_diagram_interval<S: Scalar>(map: &MapParams<S>, n: usize) -> MarkovDiagram<S> {
    let k = map.k() as Symbol;
    let mut vertices: Vec<Vertex<S>> = Vec::new();
    let mut index: BTreeMap<(Symbol, Key<S>, Key<S>), usize> = BTreeMap::new();
    let mut level = Vec::new();
    let mut aliases = BTreeMap::new();
    let mut frontier = Vec::new();
    for j in 1..=k {
        let (lo, hi) = (map.cell_lo(j).clone(), map.cell_hi(j).clone());
        index.insert((j, Key(lo.clone()), Key(hi.clone())), vertices.len());
        aliases.insert(VertexTag::Base(j), vertices.len());
        frontier.push(vertices.len());
        vertices.push(Vertex { tag: VertexTag::Level(0), symbol: j, lo, hi });
        level.push(0);
    }
    let cells: Vec<usize> = (0..k as usize).collect();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    let mut expanded = vec![false; vertices.len()];
    for depth in 0..n {
        let mut next = Vec::new();
        for &v in &frontier {
            let (sym, lo, hi) = (vertices[v].symbol, vertices[v].lo.clone(), vertices[v].hi.clone());
            let Some((ilo, ihi)) = map.image_interval(&lo, &hi, sym) else { continue };
            let mut succ = Vec::new();
            for j in map.cells_meeting(&ilo, &ihi) {
                let a = if ilo > *map.cell_lo(j) { ilo.clone() } else { map.cell_lo(j).clone() };
                let b = if ihi < *map.cell_hi(j) { ihi.clone() } else { map.cell_hi(j).clone() };
                let key = (j, Key(a.clone()), Key(b.clone()));
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = vertices.len();
                        index.insert(key, id);
                        vertices.push(Vertex { tag: VertexTag::Level(depth + 1), symbol: j, lo: a, hi: b });
                        level.push(depth + 1);
                        successors.push(Vec::new());
                        expanded.push(false);
                        next.push(id);
                        id
                    }
                };
                succ.push(id);
            }
            successors[v] = succ;
            expanded[v] = true;
        }
        frontier = next;
    }
    RawDiagram { vertices, successors, expanded, cells, aliases, depth: n }.canonical()
}
