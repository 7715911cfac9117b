//! Periodic words: diagram cycles, realised periodic orbits, shadowing
//! witnesses along the kneading lines, and approximation of measures by
//! periodic orbit measures.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{bfs_distances, shortest_path, Component, ComponentReport};
use crate::coding::{format_word, KneadingData, Line};
use crate::diagram::{project_path, Case, Classification, CutTimes, MarkovDiagram};
use crate::error::{Error, Result};
use crate::map::{MapParams, Symbol, Word};
use crate::measures::{CdfIndex, EmpiricalMeasure};
use crate::scalar::Scalar;

/// A periodic orbit `points[t+1] = T(points[t])`, `T(points[l-1]) = points[0]`,
/// following `word`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicOrbit<S> {
    pub word: Word,
    pub points: Vec<S>,
    /// Derivative of `T^l` along the orbit, `±β^l`.
    pub multiplier: S,
}

impl<S: Scalar> PeriodicOrbit<S> {
    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// Uniform measure on the orbit.
    pub fn measure(&self) -> EmpiricalMeasure {
        let pts: Vec<f64> = self.points.iter().map(|p| p.approx()).collect();
        EmpiricalMeasure::from_points(&pts).expect("orbit points lie in [0, 1]")
    }
}

/// Distance below which a floating point counts as sitting on a critical
/// point.
const FLOAT_COLLISION: f64 = 1e-12;

/// Solves `T^l(x) = x` along `word` and checks the orbit follows the word.
///
/// The composition of the branches is affine with slope `±β^l`, so the fixed
/// point is unique. Points are recovered backwards through inverse branches.
/// Hitting an interior critical point is reported as a collision; the
/// endpoints `0` and `1` are ordinary points.
pub fn realize_periodic<S: Scalar>(map: &MapParams<S>, word: &[Symbol]) -> Result<PeriodicOrbit<S>> {
    if word.is_empty() {
        return Err(Error::NotAdmissible("empty word".into()));
    }
    let k = map.k();
    if let Some(&s) = word.iter().find(|&&s| s == 0 || s as usize > k) {
        return Err(Error::NotAdmissible(format!("symbol {s} outside 1..={k}")));
    }
    // x -> slope * x + offset
    let mut slope = S::one();
    let mut offset = S::zero();
    for &s in word {
        let c = map.branch(s, &S::zero());
        let b = map.branch(s, &S::one()) - c.clone();
        slope = b.clone() * slope;
        offset = b * offset + c;
    }
    let x0 = offset / (S::one() - slope.clone());
    let l = word.len();
    let mut points = vec![S::zero(); l];
    let mut y = x0;
    for t in (0..l).rev() {
        y = map.inverse_branch(word[t], &y);
        points[t] = y.clone();
    }
    let crit = map.critical_points();
    for (t, p) in points.iter().enumerate() {
        for i in 1..k {
            let hit = if S::EXACT {
                p.total_cmp(&crit[i]).is_eq()
            } else {
                (p.approx() - crit[i].approx()).abs() <= FLOAT_COLLISION
            };
            if hit {
                return Err(Error::CriticalCollision { index: i });
            }
        }
        let s = word[t];
        if *p < *map.cell_lo(s) || *p > *map.cell_hi(s) {
            return Err(Error::NotAdmissible(format!(
                "point {} of {} leaves cell {s}",
                t,
                format_word(word)
            )));
        }
    }
    if S::EXACT {
        for t in 0..l {
            let (next, s) = map.eval(&points[t])?;
            if s != word[t] || next.total_cmp(&points[(t + 1) % l]).is_ne() {
                return Err(Error::NotAdmissible(format!("itinerary of {} does not close", format_word(word))));
            }
        }
    }
    Ok(PeriodicOrbit { word: word.to_vec(), points, multiplier: slope })
}

/// Shortest word `r` with `w = r^q`.
pub fn primitive_root(w: &[Symbol]) -> &[Symbol] {
    let n = w.len();
    for p in 1..n {
        if n % p == 0 && (p..n).all(|i| w[i] == w[i - p]) {
            return &w[..p];
        }
    }
    w
}

/// Lexicographically least rotation.
pub fn min_rotation<T: Ord + Clone>(w: &[T]) -> Vec<T> {
    (0..w.len().max(1))
        .map(|r| w[r..].iter().chain(&w[..r]).cloned().collect::<Vec<T>>())
        .min()
        .unwrap_or_default()
}

/// Canonical name of the periodic sequence `w^∞`: least rotation of the
/// primitive root.
pub fn canonical_word(w: &[Symbol]) -> Word {
    min_rotation(primitive_root(w))
}

fn is_lyndon(v: &[usize]) -> bool {
    let n = v.len();
    (1..n).all(|r| v[r..].iter().chain(&v[..r]).gt(v.iter()))
}

/// A closed path in the diagram and the word it reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub word: Word,
}

/// Closed paths of a component by increasing length.
///
/// Closed walks (simple cycles and their concatenations) are emitted once,
/// as the rotation starting at the least vertex; powers of a shorter walk
/// are left out since they read powers of its word.
/// Cycles whose words are rotations or powers of an earlier word are
/// skipped.
pub struct CycleEnumerator<'a, S> {
    diagram: &'a MarkovDiagram<S>,
    allowed: Vec<bool>,
    starts: Vec<usize>,
    max_len: usize,
    cap: usize,
    emitted: usize,
    len: usize,
    start_idx: usize,
    stack: Vec<(usize, usize)>,
    seen: HashSet<Word>,
    done: bool,
}

pub fn enumerate_cycles<'a, S: Scalar>(
    diagram: &'a MarkovDiagram<S>,
    comp: &Component,
    max_len: usize,
    cap: usize,
) -> CycleEnumerator<'a, S> {
    let mut allowed = vec![false; diagram.len()];
    for &v in &comp.vertices {
        allowed[v] = true;
    }
    CycleEnumerator {
        diagram,
        allowed,
        starts: comp.vertices.clone(),
        max_len,
        cap,
        emitted: 0,
        len: 1,
        start_idx: 0,
        stack: Vec::new(),
        seen: HashSet::new(),
        done: max_len == 0 || comp.vertices.is_empty(),
    }
}

impl<'a, S: Scalar> Iterator for CycleEnumerator<'a, S> {
    type Item = Result<Cycle>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            if self.stack.is_empty() {
                if self.start_idx == self.starts.len() {
                    self.start_idx = 0;
                    self.len += 1;
                    if self.len > self.max_len {
                        self.done = true;
                        return None;
                    }
                }
                self.stack.push((self.starts[self.start_idx], 0));
                self.start_idx += 1;
                continue;
            }
            let start = self.stack[0].0;
            if self.stack.len() == self.len {
                let (v, _) = self.stack.pop().expect("nonempty");
                if !self.diagram.has_arrow(v, start) {
                    continue;
                }
                let mut path: Vec<usize> = self.stack.iter().map(|e| e.0).collect();
                path.push(v);
                if !is_lyndon(&path) {
                    continue;
                }
                let word: Word = path.iter().map(|&u| self.diagram.vertices[u].symbol).collect();
                if !self.seen.insert(canonical_word(&word)) {
                    continue;
                }
                if self.emitted == self.cap {
                    self.done = true;
                    return Some(Err(Error::BudgetExceeded { budget: self.cap }));
                }
                self.emitted += 1;
                return Some(Ok(Cycle { vertices: path, word }));
            }
            let top = self.stack.len() - 1;
            let (v, i) = self.stack[top];
            let succ = &self.diagram.successors[v];
            if i < succ.len() {
                self.stack[top].1 += 1;
                let w = succ[i];
                if self.allowed[w] && w >= start {
                    self.stack.push((w, 0));
                }
            } else {
                self.stack.pop();
            }
        }
    }
}

/// Follows `word^∞` through the diagram from the full cell of its first
/// symbol; returns the closed vertex path the walk settles into, read at
/// period boundaries.
pub fn lift_periodic<S: Scalar>(diagram: &MarkovDiagram<S>, word: &[Symbol]) -> Option<Vec<usize>> {
    let first = *word.first()?;
    let mut v = *diagram.cells.get(first as usize - 1)?;
    let mut boundary: Vec<usize> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for _ in 0..=diagram.len() {
        if let Some(pos) = boundary.iter().position(|&b| b == v) {
            return Some(path[pos * word.len()..].to_vec());
        }
        boundary.push(v);
        for t in 0..word.len() {
            path.push(v);
            if !diagram.expanded[v] {
                return None;
            }
            let next = word[(t + 1) % word.len()];
            v = *diagram.successors[v].iter().find(|&&w| diagram.vertices[w].symbol == next)?;
        }
    }
    None
}

/// Constants of the shadowing construction computed on a truncated diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HrConstants {
    /// Least `n` with `A_n`, `B_n` in the component.
    pub n0: usize,
    /// Least `m` with `R_m, S_m >= n0`.
    pub m0: usize,
    /// `max(R_{m0}, S_{m0})`.
    pub big_n0: usize,
    /// Longest shortest path from a vertex of level `<= n0` to one of level
    /// `<= N0` inside the component.
    pub n1: usize,
    /// `N0 + n1`.
    pub big_n1: usize,
}

/// Everything the witness finder reads.
pub struct HrContext<'a, S> {
    pub kn: &'a KneadingData<S>,
    pub cuts: &'a CutTimes,
    pub classes: &'a Classification,
    pub diagram: &'a MarkovDiagram<S>,
    pub comp: &'a Component,
    pub constants: HrConstants,
}

impl<'a, S: Scalar> HrContext<'a, S> {
    /// Computes the default constants from the component report.
    pub fn new(
        kn: &'a KneadingData<S>,
        cuts: &'a CutTimes,
        classes: &'a Classification,
        diagram: &'a MarkovDiagram<S>,
        report: &'a ComponentReport,
    ) -> Result<Self> {
        let comp = report.main();
        let n0 = report
            .n0
            .ok_or_else(|| Error::PreconditionViolated("the kneading lines never enter the component".into()))?;
        let m0 = (0..=cuts.count(Line::A).min(cuts.count(Line::B)))
            .find(|&m| cuts.a[m] >= n0 && cuts.b[m] >= n0)
            .ok_or(Error::DepthExceeded { needed: n0, available: cuts.depth })?;
        let big_n0 = cuts.a[m0].max(cuts.b[m0]);
        if big_n0 > diagram.depth {
            return Err(Error::DepthExceeded { needed: big_n0, available: diagram.depth });
        }
        let levels = diagram.levels();
        let within = |v: usize, n: usize| levels[v].is_some_and(|l| l <= n);
        let allowed = |v: usize| comp.contains(v);
        let mut n1 = 0;
        for &c in comp.vertices.iter().filter(|&&c| within(c, n0)) {
            let dist = bfs_distances(diagram, c, &allowed);
            for &d in comp.vertices.iter().filter(|&&d| within(d, big_n0)) {
                let l = dist[d].ok_or_else(|| Error::Inconsistent(format!("component vertex {d} unreachable from {c}")))?;
                n1 = n1.max(l);
            }
        }
        Ok(HrContext {
            kn,
            cuts,
            classes,
            diagram,
            comp,
            constants: HrConstants { n0, m0, big_n0, n1, big_n1: big_n0 + n1 },
        })
    }

    /// Overrides `N0` and `N1`.
    pub fn with_bounds(mut self, big_n0: usize, big_n1: usize) -> Self {
        self.constants.big_n0 = big_n0;
        self.constants.big_n1 = big_n1;
        self
    }

    fn line_ids(&self, line: Line, from: usize, to: usize) -> Result<Vec<usize>> {
        (from..to)
            .map(|n| {
                self.diagram
                    .line_vertex(line, n)
                    .ok_or(Error::DepthExceeded { needed: n, available: self.diagram.depth })
            })
            .collect()
    }

    fn cut(&self, line: Line, m: usize) -> Result<usize> {
        self.cuts.get(line, m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessMethod {
    /// Built from the case recipe.
    Explicit,
    /// Found by closing a stretch of the line through the component.
    Search,
}

/// A periodic word shadowing a stretch of a kneading line.
#[derive(Clone, Debug, Serialize)]
pub struct HrWitness {
    pub line: Line,
    pub j: usize,
    pub m: usize,
    /// Vertex cycle whose word is the period of `p`.
    pub cycle: Vec<usize>,
    /// `p_{[0, l)}`.
    pub period: Word,
    /// Start of `u` inside the line, and its length.
    pub u_start: usize,
    pub u_len: usize,
    /// `|u| - (cut(j) - cut(m) - N1)`.
    pub slack: i64,
    pub method: WitnessMethod,
    pub case: Case,
}

impl HrWitness {
    pub fn u<'k, S: Scalar>(&self, kn: &'k KneadingData<S>) -> &'k [Symbol] {
        &kn.line(self.line)[self.u_start..self.u_start + self.u_len]
    }
}

fn contains(hay: &[Symbol], needle: &[Symbol]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

/// Re-checks a witness by plain substring search: `u` occurs in
/// `line_{[cut(m), cut(j))}` and in `p_{[0, l)}`, and the length bound holds.
pub fn verify_witness<S: Scalar>(ctx: &HrContext<S>, w: &HrWitness) -> Result<bool> {
    let line = ctx.kn.line(w.line);
    let (cm, cj) = (ctx.cut(w.line, w.m)?, ctx.cut(w.line, w.j)?);
    let min_m = usize::from(w.j > 1);
    if w.m >= w.j || w.m < min_m || w.period.is_empty() {
        return Ok(false);
    }
    let u = w.u(ctx.kn);
    let bound = cj as i64 - cm as i64 - ctx.constants.big_n1 as i64;
    let slack = u.len() as i64 - bound;
    let word = project_path(ctx.diagram, &w.cycle)?;
    let closes = ctx.diagram.has_arrow(*w.cycle.last().expect("nonempty"), w.cycle[0]);
    Ok(slack == w.slack
        && slack >= 0
        && closes
        && word == w.period
        && contains(&line[cm..cj], u)
        && contains(&w.period, u))
}

fn witness<S: Scalar>(
    ctx: &HrContext<S>,
    line: Line,
    j: usize,
    m: usize,
    cycle: Vec<usize>,
    u_start: usize,
    u_len: usize,
    method: WitnessMethod,
) -> Result<HrWitness> {
    let period = project_path(ctx.diagram, &cycle)?;
    let (cm, cj) = (ctx.cut(line, m)?, ctx.cut(line, j)?);
    let slack = u_len as i64 - (cj as i64 - cm as i64 - ctx.constants.big_n1 as i64);
    let case = ctx.classes.line(line).case(j).unwrap_or(Case::Unknown);
    Ok(HrWitness { line, j, m, cycle, period, u_start, u_len, slack, method, case })
}

/// Least `m` tried for index `j`: `max(m0, 1)`, or `0` when `j = 1` since
/// no positive `m` is below it.
fn lowest_m<S: Scalar>(ctx: &HrContext<S>, j: usize) -> usize {
    if j == 1 {
        0
    } else {
        ctx.constants.m0.max(1)
    }
}

fn check_index<S: Scalar>(ctx: &HrContext<S>, line: Line, j: usize) -> Result<()> {
    if ctx.constants.big_n0 > ctx.diagram.depth {
        return Err(Error::DepthExceeded { needed: ctx.constants.big_n0, available: ctx.diagram.depth });
    }
    let cj = ctx.cut(line, j)?;
    if cj <= ctx.constants.big_n0 {
        return Err(Error::PreconditionViolated(format!(
            "cut time {cj} of line {} is not beyond N0 = {}",
            line.name(),
            ctx.constants.big_n0
        )));
    }
    if cj > ctx.diagram.depth {
        return Err(Error::DepthExceeded { needed: cj, available: ctx.diagram.depth });
    }
    Ok(())
}

/// Witness for index `j` of `line`: the case recipe for cases C, D and E,
/// otherwise (or when the recipe needs vertices beyond the truncation) the
/// generic search.
pub fn hr_witness<S: Scalar>(ctx: &HrContext<S>, line: Line, j: usize, budget: usize) -> Result<HrWitness> {
    if let Some(w) = hr_witness_explicit(ctx, line, j, budget)? {
        return Ok(w);
    }
    hr_witness_search(ctx, line, j, budget)
}

/// Case recipes. `Ok(None)` when the index is in another case or the recipe
/// cannot be carried out on the truncated diagram.
pub fn hr_witness_explicit<S: Scalar>(
    ctx: &HrContext<S>,
    line: Line,
    j: usize,
    budget: usize,
) -> Result<Option<HrWitness>> {
    check_index(ctx, line, j)?;
    let classes = ctx.classes.line(line);
    let case = classes.case(j).unwrap_or(Case::Unknown);
    let other = line.other();
    let m0 = ctx.constants.m0;
    let mut budget = budget;
    let allowed = |v: usize| ctx.comp.contains(v);
    // D in S(from) ∩ D_0 inside the component, then a path D -> ... -> to
    let close_through_cell = |from: usize, to: usize, budget: &mut usize| -> Option<Vec<usize>> {
        ctx.diagram.successors[from]
            .iter()
            .filter(|&&d| ctx.diagram.cells.contains(&d) && allowed(d))
            .find_map(|&d| shortest_path(ctx.diagram, d, to, &allowed, budget))
    };
    let built = match case {
        Case::C => {
            let Some(p) = classes.partner_of(j) else { return Ok(None) };
            let (sp, sm0) = (ctx.cut(other, p)?, ctx.cut(other, m0)?);
            if sp == 0 {
                return Ok(None);
            }
            let start = ctx.cut(line, j - 1)? + 1 + sm0;
            if sp <= sm0 {
                // the stretch of the other line is empty: u is empty and any
                // cycle through the cell D does
                let from = ctx.line_ids(other, sp - 1, sp)?[0];
                let target = ctx.line_ids(other, sm0, sm0 + 1)?[0];
                let Some(path) = close_through_cell(from, target, &mut budget) else { return Ok(None) };
                let Some(back) = return_path(ctx.diagram, target, path[0], &allowed, &mut budget) else {
                    return Ok(None);
                };
                let mut cycle = path;
                cycle.extend(back);
                return finish(ctx, line, j, j - 1, cycle, start.min(ctx.cut(line, j)?), 0);
            }
            let stretch = ctx.line_ids(other, sm0, sp)?;
            let from = ctx.line_ids(other, sp - 1, sp)?[0];
            let Some(path) = close_through_cell(from, stretch[0], &mut budget) else { return Ok(None) };
            let mut cycle = stretch;
            cycle.extend_from_slice(&path[..path.len() - 1]);
            // u = b_{[S_{m0}, S_P)} = a_{[R_{j-1} + 1 + S_{m0}, R_j)}
            Some((j - 1, cycle, start, sp - sm0))
        }
        Case::D => {
            let Some(p) = classes.partner_of(j) else { return Ok(None) };
            let sp = ctx.cut(other, p)?;
            let sp1 = ctx.cut(other, p + 1)?;
            let u_vertex = ctx.cuts.gap(other, p + 1)? - 1;
            if u_vertex > sp {
                return Ok(None);
            }
            let mut cycle = ctx.line_ids(other, sp + 1, sp1)?;
            cycle.extend(ctx.line_ids(other, u_vertex, sp + 1)?);
            // u = a_{(R_{j-1}, R_j)} = b_{[0, S_P)}
            let start = ctx.cut(line, j - 1)? + 1;
            Some((j - 1, cycle, start, sp))
        }
        Case::E => {
            let m = lowest_m(ctx, j).max(m0);
            if m >= j {
                return Ok(None);
            }
            let (rm0, rj) = (ctx.cut(line, m0)?, ctx.cut(line, j)?);
            let stretch = ctx.line_ids(line, rm0, rj)?;
            let from = *stretch.last().expect("R_j > R_{m0}");
            let Some(path) = close_through_cell(from, stretch[0], &mut budget) else { return Ok(None) };
            let mut cycle = stretch;
            cycle.extend_from_slice(&path[..path.len() - 1]);
            let rm = ctx.cut(line, m)?;
            Some((m, cycle, rm, rj - rm))
        }
        _ => None,
    };
    let Some((m, cycle, start, len)) = built else { return Ok(None) };
    finish(ctx, line, j, m, cycle, start, len)
}

fn finish<S: Scalar>(
    ctx: &HrContext<S>,
    line: Line,
    j: usize,
    m: usize,
    cycle: Vec<usize>,
    start: usize,
    len: usize,
) -> Result<Option<HrWitness>> {
    if project_path(ctx.diagram, &cycle).is_err() {
        return Ok(None);
    }
    let w = witness(ctx, line, j, m, cycle, start, len, WitnessMethod::Explicit)?;
    Ok(verify_witness(ctx, &w)?.then_some(w))
}

/// Vertices strictly after `from` on a shortest path of at least one arrow
/// from `from` to `to`, ending before `to`.
fn return_path<S: Scalar>(
    diagram: &MarkovDiagram<S>,
    from: usize,
    to: usize,
    allowed: &dyn Fn(usize) -> bool,
    budget: &mut usize,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; diagram.len()];
    let mut seen = vec![false; diagram.len()];
    let mut queue = std::collections::VecDeque::new();
    for &w in &diagram.successors[from] {
        if w == to {
            return Some(Vec::new());
        }
        if allowed(w) && !seen[w] {
            seen[w] = true;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        for &w in &diagram.successors[v] {
            if w == to {
                let mut path = vec![v];
                let mut cur = v;
                while prev[cur] != usize::MAX {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            if allowed(w) && !seen[w] {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Closes `line_{[cut(m), cut(j))}` through the component by a shortest
/// return path, trying `m = j - 1, j - 2, ...` down to `max(m0, 1)`.
pub fn hr_witness_search<S: Scalar>(ctx: &HrContext<S>, line: Line, j: usize, budget: usize) -> Result<HrWitness> {
    check_index(ctx, line, j)?;
    let allowed = |v: usize| ctx.comp.contains(v);
    let mut budget = budget;
    let lowest = lowest_m(ctx, j).min(j - 1);
    let mut best_slack: Option<i64> = None;
    for m in (lowest..j).rev() {
        let (cm, cj) = (ctx.cut(line, m)?, ctx.cut(line, j)?);
        let stretch = ctx.line_ids(line, cm, cj)?;
        if !stretch.iter().all(|&v| allowed(v)) {
            continue;
        }
        let last = *stretch.last().expect("cut times increase");
        let Some(back) = return_path(ctx.diagram, last, stretch[0], &allowed, &mut budget) else {
            if budget == 0 {
                break;
            }
            continue;
        };
        let mut cycle = stretch;
        cycle.extend(back);
        let w = witness(ctx, line, j, m, cycle, cm, cj - cm, WitnessMethod::Search)?;
        best_slack = best_slack.max(Some(w.slack));
        if verify_witness(ctx, &w)? {
            return Ok(w);
        }
    }
    Err(Error::NoWitnessInBudget { best_slack })
}

/// Candidate policy of [`approximate_by_periodic`].
#[derive(Clone, Debug)]
pub struct PeriodicSearch {
    pub max_len: usize,
    /// Cap on the number of distinct candidate words scored.
    pub budget: usize,
    /// Extra words tried first at their length (e.g. enumerated cycles).
    pub seed_words: Vec<Word>,
}

/// Number of lengths the budget is shared over; fixed so that the candidate
/// list for a given budget grows only by appending as `max_len` increases.
const LENGTH_SLOTS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct Approximation {
    pub orbit: PeriodicOrbit<f64>,
    pub distance: f64,
    pub candidates: usize,
}

/// Best periodic orbit measure, in W1, among candidate words of length at
/// most `max_len`.
///
/// Candidates of length `l` are the seed words of that length followed by
/// the length-`l` prefixes of the itineraries of evenly spaced target atoms.
/// Words are deduplicated by their canonical rotation and the list for
/// `max_len` is a prefix of the list for any larger `max_len`, so the
/// distance never increases with `max_len`. Ties go to the least canonical
/// word.
pub fn approximate_by_periodic(
    map: &MapParams<f64>,
    target: &EmpiricalMeasure,
    search: &PeriodicSearch,
) -> Result<Approximation> {
    if search.max_len == 0 || search.budget == 0 {
        return Err(Error::PreconditionViolated("max_len and budget must be positive".into()));
    }
    let quota = (search.budget / LENGTH_SLOTS).max(1);
    let atoms = target.atoms();
    let stride = (atoms.len() / quota).max(1);
    let itineraries: Vec<Word> = atoms
        .iter()
        .step_by(stride)
        .take(quota)
        .map(|&(x, _)| {
            let mut w = Word::with_capacity(search.max_len);
            let mut y = x;
            for _ in 0..search.max_len {
                match map.eval(&y) {
                    Ok((next, s)) => {
                        w.push(s);
                        y = next.clamp(0.0, 1.0);
                    }
                    Err(_) => break,
                }
            }
            w
        })
        .collect();
    let index = CdfIndex::new(target);
    let mut seen: HashSet<Word> = HashSet::new();
    let mut tried = 0usize;
    let mut best: Option<(f64, Word, PeriodicOrbit<f64>)> = None;
    'lengths: for l in 1..=search.max_len {
        let mut batch: Vec<Word> = Vec::new();
        let fresh = search
            .seed_words
            .iter()
            .filter(|w| w.len() == l)
            .cloned()
            .chain(itineraries.iter().filter(|w| w.len() >= l).map(|w| w[..l].to_vec()));
        let mut exhausted = false;
        for w in fresh {
            if seen.insert(canonical_word(&w)) {
                if tried == search.budget {
                    exhausted = true;
                    break;
                }
                tried += 1;
                batch.push(w);
            }
        }
        let scored: Vec<(f64, Word, PeriodicOrbit<f64>)> = batch
            .par_iter()
            .filter_map(|w| {
                let orbit = realize_periodic(map, w).ok()?;
                Some((index.distance(&orbit.measure()), canonical_word(w), orbit))
            })
            .collect();
        for cand in scored {
            let better = match &best {
                None => true,
                Some((d, w, _)) => cand.0 < *d || (cand.0 == *d && cand.1 < *w),
            };
            if better {
                best = Some(cand);
            }
        }
        if exhausted {
            break 'lengths;
        }
    }
    match best {
        Some((distance, _, orbit)) => Ok(Approximation { orbit, distance, candidates: tried }),
        None if tried == search.budget => Err(Error::BudgetExceeded { budget: search.budget }),
        None => Err(Error::NotAdmissible("no candidate word is realised by a periodic orbit".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Sign;
    use crate::scalar::Rational;
    use num_traits::One;

    fn doubling() -> MapParams<Rational> {
        MapParams::new(Rational::from_integer(0.into()), Rational::from_integer(2.into()), vec![Sign::Plus; 2], 256)
            .unwrap()
    }

    #[test]
    fn doubling_period_two() {
        let o = realize_periodic(&doubling(), &[1, 2]).unwrap();
        let third = Rational::one() / Rational::from_integer(3.into());
        assert_eq!(o.points[0], third);
        assert_eq!(o.points[1], third.clone() + third);
        assert_eq!(o.multiplier, Rational::from_integer(4.into()));
    }

    #[test]
    fn roots_and_rotations() {
        assert_eq!(primitive_root(&[1, 2, 1, 2]), &[1, 2]);
        assert_eq!(canonical_word(&[2, 1, 2, 1]), vec![1, 2]);
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[1, 0]));
        assert!(!is_lyndon(&[0, 0]));
    }
}
