use crate::coding::{KneadingData, Line};
use crate::error::{Error, Result};
use crate::map::MapParams;
use crate::scalar::Scalar;

/// Cut times `R_0 = 0 < R_1 < ...` of the `a` line and `S_0 = 0 < S_1 < ...`
/// of the `b` line, known up to `depth`.
///
/// `n` is a cut time of a line `x` when the follower interval of the prefix
/// `x_{[0,n)}` meets at least two cells, i.e. the vertex of the Markov
/// diagram sitting at level `n - 1` on that line has more than one successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutTimes {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Every cut time `<= depth` is listed; later ones are unknown.
    pub depth: usize,
}

impl CutTimes {
    pub fn line(&self, line: Line) -> &[usize] {
        match line {
            Line::A => &self.a,
            Line::B => &self.b,
        }
    }

    /// `R_m` (or `S_m`).
    pub fn get(&self, line: Line, m: usize) -> Result<usize> {
        self.line(line)
            .get(m)
            .copied()
            .ok_or(Error::DepthExceeded { needed: m, available: self.count(line) })
    }

    /// `r_m = R_m - R_{m-1}` (or `s_m`), for `m >= 1`.
    pub fn gap(&self, line: Line, m: usize) -> Result<usize> {
        if m == 0 {
            return Err(Error::PreconditionViolated("gaps start at m = 1".into()));
        }
        Ok(self.get(line, m)? - self.get(line, m - 1)?)
    }

    /// Largest index `m` with a known cut time.
    pub fn count(&self, line: Line) -> usize {
        self.line(line).len() - 1
    }

    /// `m` with `R_m == value`, if `value` is a cut time.
    pub fn index_of(&self, line: Line, value: usize) -> Option<usize> {
        self.line(line).binary_search(&value).ok()
    }

    /// Whether the cut times up to `value` are all known.
    pub fn covers(&self, value: usize) -> bool {
        value <= self.depth
    }
}

/// Cut times of both lines up to `depth`, from follower intervals.
pub fn cut_times<S: Scalar>(map: &MapParams<S>, kneading: &KneadingData<S>, depth: usize) -> Result<CutTimes> {
    if kneading.depth < depth {
        return Err(Error::InsufficientKneadingDepth { needed: depth, available: kneading.depth });
    }
    let line_cuts = |word: &[u16]| -> Result<Vec<usize>> {
        let mut cuts = vec![0];
        let mut lo = S::zero();
        let mut hi = S::one();
        for n in 1..=depth {
            match map.image_interval(&lo, &hi, word[n - 1]) {
                Some((a, b)) => {
                    lo = a;
                    hi = b;
                }
                None => return Err(Error::Inconsistent(format!("kneading prefix of length {n} is not admissible"))),
            }
            if map.cells_meeting(&lo, &hi).len() >= 2 {
                cuts.push(n);
            }
        }
        Ok(cuts)
    };
    Ok(CutTimes { a: line_cuts(&kneading.a)?, b: line_cuts(&kneading.b)?, depth })
}
