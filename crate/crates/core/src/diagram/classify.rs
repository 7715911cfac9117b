//! Classification of cut times by where the cut arrows return.

use std::cmp::Ordering;

use serde::Serialize;

use crate::coding::{KneadingData, Line};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::build::MIN_COMPARE;
use super::walk::{check_walk_against, Symbolic};
use super::CutTimes;

/// Per-line classification of the cut indices `m = 1, 2, ...`.
///
/// Index `m - 1` of every vector describes the `m`-th cut.
#[derive(Clone, Debug, Serialize)]
pub struct LineClasses {
    pub line: Line,
    /// Line whose kneading sequence is `sigma(f_m)`. For the `a` line this is
    /// `a` on the first class and `b` on the second; for the `b` line, `a` on
    /// the first class and `b` on the second.
    pub returns_to: Vec<Line>,
    /// Some successor of the vertex before the cut is a full cell.
    pub hits_base: Vec<bool>,
    /// Index `q` with `r_m - 1` equal to the `q`-th cut time of the return
    /// line (defined on both classes; the cross-line one is the usual
    /// partner index).
    pub partner: Vec<Option<usize>>,
    /// The cut arrow lands on the vertex at level `r_m - 1` of the return line.
    pub cut_arrow_matches: Vec<bool>,
    /// Case label of each index.
    pub cases: Vec<Case>,
}

impl LineClasses {
    /// Number of classified cut indices.
    pub fn count(&self) -> usize {
        self.returns_to.len()
    }

    fn idx(&self, m: usize) -> Option<usize> {
        (m >= 1 && m <= self.count()).then(|| m - 1)
    }

    /// The cut arrow at `m` returns to this line itself.
    pub fn returns_to_self(&self, m: usize) -> Option<bool> {
        self.idx(m).map(|i| self.returns_to[i] == self.line)
    }

    pub fn hits_base_at(&self, m: usize) -> Option<bool> {
        self.idx(m).map(|i| self.hits_base[i])
    }

    pub fn partner_of(&self, m: usize) -> Option<usize> {
        self.idx(m).and_then(|i| self.partner[i])
    }

    pub fn case(&self, m: usize) -> Option<Case> {
        self.idx(m).map(|i| self.cases[i])
    }

    /// Short class label such as `A1`, `A2`, `B1+B3`.
    pub fn label(&self, m: usize) -> String {
        let Some(i) = self.idx(m) else { return "?".into() };
        let upper = match self.line {
            Line::A => 'A',
            Line::B => 'B',
        };
        let first = match self.returns_to[i] {
            Line::A => 1,
            Line::B => 2,
        };
        let mut s = format!("{upper}{first}");
        if self.hits_base[i] {
            s.push_str(&format!("+{upper}3"));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub a: LineClasses,
    pub b: LineClasses,
    /// Cut indices are classified while their cut time is at most this.
    pub horizon: usize,
}

impl Classification {
    pub fn line(&self, line: Line) -> &LineClasses {
        match line {
            Line::A => &self.a,
            Line::B => &self.b,
        }
    }
}

/// Case of a cut index, checked in the order listed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// Cut arrow returns to the same line.
    A,
    /// Cross return followed by a same-line return.
    B,
    /// Cross return whose partner index reaches a full cell.
    C,
    /// Cross return whose partner's successor index returns to its own line.
    D,
    /// A successor of the cut vertex is a full cell.
    E,
    /// Remaining cross returns, by which lexicographic alternative holds.
    F1,
    F2,
    F3,
    /// Remaining cross return where neither alternative is settled.
    FUndetermined,
    /// Needs cut data beyond the available depth.
    Unknown,
}

impl Case {
    pub fn label(&self) -> &'static str {
        match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
            Case::E => "E",
            Case::F1 => "F1",
            Case::F2 => "F2",
            Case::F3 => "F3",
            Case::FUndetermined => "F?",
            Case::Unknown => "unknown",
        }
    }
}

/// Verdict on `c^∞ ≻ (s_1, s_2, ...)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LexVerdict {
    Holds,
    Fails,
    Unknown,
}

/// Compares the constant sequence `c, c, ...` with `seq` lexicographically.
pub fn compare_constant(c: usize, seq: &[usize]) -> LexVerdict {
    for &s in seq {
        match c.cmp(&s) {
            Ordering::Greater => return LexVerdict::Holds,
            Ordering::Less => return LexVerdict::Fails,
            Ordering::Equal => {}
        }
    }
    LexVerdict::Unknown
}

/// Which of the two lexicographic alternatives holds for a cross-return
/// index `j` with partner `p`:
/// first `(cut_{other}(p))^∞ ≻ (gap_{line}(j+i) - 1)_{i≥1}`,
/// second `(cut_{line}(j))^∞ ≻ (gap_{other}(p+i) - 1)_{i≥1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LexOutcome {
    FirstHolds,
    SecondHolds,
    Both,
    /// Both alternatives fail on the available data.
    Neither,
    Undetermined,
}

/// Evaluates the lexicographic alternatives for `(line, j)` using at most
/// `horizon` terms of each sequence.
pub fn lex_condition(
    classes: &Classification,
    cuts: &CutTimes,
    line: Line,
    j: usize,
    horizon: usize,
) -> Result<LexOutcome> {
    let c = classes.line(line);
    if c.returns_to_self(j) != Some(false) {
        return Err(Error::PreconditionViolated(format!("index {j} of line {} is not a cross return", line.name())));
    }
    let p = c.partner_of(j).ok_or_else(|| Error::Inconsistent(format!("no partner index for {j}")))?;
    let other = line.other();
    let gaps = |l: Line, from: usize| -> Vec<usize> {
        (from..from + horizon).map_while(|m| cuts.gap(l, m).ok()).map(|g| g - 1).collect()
    };
    let first = compare_constant(cuts.get(other, p)?, &gaps(line, j + 1));
    let second = compare_constant(cuts.get(line, j)?, &gaps(other, p + 1));
    Ok(match (first, second) {
        (LexVerdict::Holds, LexVerdict::Holds) => LexOutcome::Both,
        (LexVerdict::Holds, _) => LexOutcome::FirstHolds,
        (_, LexVerdict::Holds) => LexOutcome::SecondHolds,
        (LexVerdict::Fails, LexVerdict::Fails) => LexOutcome::Neither,
        _ => LexOutcome::Undetermined,
    })
}

/// Classifies every cut index whose cut time is at most
/// `depth - MIN_COMPARE`.
pub fn classify<S: Scalar>(kn: &KneadingData<S>, cuts: &CutTimes) -> Result<Classification> {
    if kn.depth <= MIN_COMPARE + 1 {
        return Err(Error::InsufficientKneadingDepth { needed: MIN_COMPARE + 2, available: kn.depth });
    }
    let horizon = (kn.depth - MIN_COMPARE).min(cuts.depth);
    let sym = Symbolic::new(kn);
    let walks = [sym.walk(Line::A, horizon)?, sym.walk(Line::B, horizon)?];
    for w in &walks {
        check_walk_against(w, cuts)?;
    }
    let k = kn.k() as u16;
    let mut per_line = Vec::new();
    for w in &walks {
        let mut lc = LineClasses {
            line: w.line,
            returns_to: Vec::new(),
            hits_base: Vec::new(),
            partner: Vec::new(),
            cut_arrow_matches: Vec::new(),
            cases: Vec::new(),
        };
        for ev in &w.cuts {
            let len = kn.depth - ev.time;
            let cont = w.vertices[ev.time];
            let mut hits = !ev.full_cells.is_empty();
            for i in 1..=k {
                let cell = sym.cell(i);
                hits |= sym.same_vertex(&cont, &cell, len)? || sym.same_vertex(&ev.piece, &cell, len)?;
            }
            let target_line = &walks[match ev.returns_to {
                Line::A => 0,
                Line::B => 1,
            }];
            let matches = sym.same_vertex(&ev.piece, &target_line.vertices[ev.gap - 1], len)?;
            lc.returns_to.push(ev.returns_to);
            lc.hits_base.push(hits);
            lc.partner.push(cuts.index_of(ev.returns_to, ev.gap - 1));
            lc.cut_arrow_matches.push(matches);
        }
        per_line.push(lc);
    }
    let b = per_line.pop().expect("two lines");
    let a = per_line.pop().expect("two lines");
    let mut classes = Classification { a, b, horizon };
    for line in [Line::A, Line::B] {
        let cases: Vec<Case> =
            (1..=classes.line(line).count()).map(|j| case_of(&classes, cuts, line, j)).collect();
        match line {
            Line::A => classes.a.cases = cases,
            Line::B => classes.b.cases = cases,
        }
    }
    Ok(classes)
}

fn case_of(classes: &Classification, cuts: &CutTimes, line: Line, j: usize) -> Case {
    let c = classes.line(line);
    let o = classes.line(line.other());
    let Some(self_j) = c.returns_to_self(j) else { return Case::Unknown };
    if self_j {
        return Case::A;
    }
    let Some(self_next) = c.returns_to_self(j + 1) else { return Case::Unknown };
    if self_next {
        return Case::B;
    }
    let Some(p) = c.partner_of(j) else { return Case::Unknown };
    if p >= 1 && o.hits_base_at(p) == Some(true) {
        return Case::C;
    }
    match o.returns_to_self(p + 1) {
        Some(true) => return Case::D,
        Some(false) => {}
        None => return Case::Unknown,
    }
    if c.hits_base_at(j) == Some(true) {
        return Case::E;
    }
    match lex_condition(classes, cuts, line, j, usize::MAX / 4) {
        Ok(LexOutcome::SecondHolds) | Ok(LexOutcome::Both) => Case::F1,
        Ok(LexOutcome::FirstHolds) => match p.checked_sub(1).filter(|&q| q >= 1).and_then(|q| o.returns_to_self(q)) {
            Some(false) => Case::F2,
            Some(true) => Case::F3,
            None => Case::FUndetermined,
        },
        _ => Case::FUndetermined,
    }
}
