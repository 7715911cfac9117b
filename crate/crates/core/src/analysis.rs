//! Irreducible components, Perron data, entropy, the measure of maximal
//! entropy and pressure of a truncated Markov diagram.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::coding::Line;
use crate::diagram::MarkovDiagram;
use crate::error::{Error, Result};
use crate::map::MapParams;
use crate::scalar::Scalar;

/// Default tolerance on the Perron residual.
pub const PERRON_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the power method.
pub const PERRON_MAX_ITER: usize = 100_000;

/// A strongly connected set of vertices carrying at least one cycle.
#[derive(Clone, Debug, Serialize)]
pub struct Component {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// No arrow leaves the component.
    pub closed: bool,
}

impl Component {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    /// Nontrivial components, sources of the condensation first.
    pub components: Vec<Component>,
    /// Index of the component with the largest Perron root.
    pub distinguished: usize,
    /// Least `n` with `A_n` and `B_n` in the distinguished component.
    pub n0: Option<usize>,
}

impl ComponentReport {
    pub fn main(&self) -> &Component {
        &self.components[self.distinguished]
    }
}

/// Strongly connected components of the diagram.
pub fn scc_irreducible<S: Scalar>(diagram: &MarkovDiagram<S>) -> Result<ComponentReport> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(diagram.len(), diagram.arrow_count());
    let nodes: Vec<_> = (0..diagram.len()).map(|_| g.add_node(())).collect();
    for (v, succ) in diagram.successors.iter().enumerate() {
        for &w in succ {
            g.add_edge(nodes[v], nodes[w], ());
        }
    }
    // tarjan_scc yields reverse topological order
    let mut sccs = tarjan_scc(&g);
    sccs.reverse();
    let mut components = Vec::new();
    for scc in sccs {
        let mut vs: Vec<usize> = scc.iter().map(|n| n.index()).collect();
        vs.sort_unstable();
        let nontrivial = vs.len() > 1 || diagram.has_arrow(vs[0], vs[0]);
        if !nontrivial {
            continue;
        }
        let closed = vs
            .iter()
            .all(|&v| diagram.successors[v].iter().all(|w| vs.binary_search(w).is_ok()));
        components.push(Component { vertices: vs, closed });
    }
    if components.is_empty() {
        return Err(Error::EmptyComponent);
    }
    // In a truncated diagram the deep parts of the two lines may still sit in
    // a small component of their own; the component of largest Perron root
    // is the one that grows into the component carrying the entropy.
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in components.iter().enumerate() {
        let root = perron(&Sparse::from_component(diagram, c, &|_| 1.0), 1e-11)?.0;
        if best.map_or(true, |(_, r)| root > r * (1.0 + 1e-9)) {
            best = Some((i, root));
        }
    }
    let distinguished = best.expect("nonempty").0;
    let main = &components[distinguished];
    let n0 = (0..=diagram.depth).find(|&n| {
        let a = diagram.line_vertex(Line::A, n);
        let b = diagram.line_vertex(Line::B, n);
        matches!((a, b), (Some(a), Some(b)) if main.contains(a) && main.contains(b))
    });
    Ok(ComponentReport { components, distinguished, n0 })
}

/// Perron root and eigenvector of a nonnegative matrix.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    /// `log` of the Perron root.
    pub value: f64,
    pub root: f64,
    /// Right Perron vector on the component (max-normalised), indexed like
    /// `Component::vertices`.
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// Truncation level of the diagram.
    pub depth: usize,
}

/// Sparse matrix on a component: `rows[i]` lists `(j, weight)`.
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn from_component<S: Scalar>(diagram: &MarkovDiagram<S>, comp: &Component, weight: &dyn Fn(usize) -> f64) -> Self {
        let local = |v: usize| comp.vertices.binary_search(&v).ok();
        let rows = comp
            .vertices
            .iter()
            .map(|&v| diagram.successors[v].iter().filter_map(|&w| local(w).map(|j| (j, weight(w)))).collect())
            .collect();
        Sparse { rows }
    }

    fn transpose(&self) -> Sparse {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                rows[j].push((i, w));
            }
        }
        Sparse { rows }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, w)| w * x[j]).sum();
        }
    }
}

/// Power iteration on `M + sI` with `s` the current estimate of the Perron
/// root: aperiodic even when `M` is (nearly) periodic, and every other
/// eigenvalue `mu` is damped by `|mu + s| / 2s`.
fn perron(m: &Sparse, tol: f64) -> Result<(f64, Vec<f64>, f64, usize)> {
    let n = m.rows.len();
    if n == 0 {
        return Err(Error::EmptyComponent);
    }
    let mut x = vec![1.0; n];
    let mut mx = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=PERRON_MAX_ITER {
        m.apply(&x, &mut mx);
        let sx: f64 = x.iter().sum();
        let smx: f64 = mx.iter().sum();
        let lambda = smx / sx;
        let xmax = x.iter().cloned().fold(0.0, f64::max);
        residual = mx.iter().zip(&x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max) / xmax;
        if residual <= tol * lambda.max(1.0) {
            return Ok((lambda, x.iter().map(|v| v / xmax).collect(), residual, it));
        }
        let mut norm = 0.0f64;
        let shift = if lambda > 0.0 { lambda } else { 1.0 };
        for (xi, mi) in x.iter_mut().zip(&mx) {
            *xi = shift * *xi + mi;
            norm = norm.max(*xi);
        }
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual });
        }
        for xi in x.iter_mut() {
            *xi /= norm;
        }
    }
    Err(Error::NonConvergence { iterations: PERRON_MAX_ITER, residual })
}

/// Log of the Perron root of the component: the entropy of the truncated
/// diagram.
pub fn entropy_estimate<S: Scalar>(diagram: &MarkovDiagram<S>, comp: &Component, tol: f64) -> Result<SpectralResult> {
    let m = Sparse::from_component(diagram, comp, &|_| 1.0);
    let (root, v, residual, iterations) = perron(&m, tol)?;
    Ok(SpectralResult { value: root.ln(), root, eigenvector: v, residual, iterations, depth: diagram.depth })
}

/// Equal-width histogram on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub masses: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let n = self.bins() as f64;
        (i as f64 / n, (i + 1) as f64 / n)
    }

    /// Adds `mass` spread uniformly over `[lo, hi]`.
    pub fn spread(&mut self, lo: f64, hi: f64, mass: f64) {
        let n = self.bins();
        let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
        if hi <= lo {
            let i = ((lo * n as f64) as usize).min(n - 1);
            self.masses[i] += mass;
            return;
        }
        let first = ((lo * n as f64) as usize).min(n - 1);
        let last = ((hi * n as f64).ceil() as usize).clamp(first + 1, n);
        for i in first..last {
            let (a, b) = self.edges(i);
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                self.masses[i] += mass * overlap / (hi - lo);
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn l1_distance(&self, other: &Histogram) -> f64 {
        self.masses.iter().zip(&other.masses).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Histogram of the measure of maximal entropy of the component.
///
/// Vertex `v` carries mass proportional to `u_v w_v` (left and right Perron
/// vectors), spread uniformly over its interval.
pub fn mme_estimate<S: Scalar>(diagram: &MarkovDiagram<S>, comp: &Component, bins: usize, tol: f64) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::PreconditionViolated("bins must be positive".into()));
    }
    let m = Sparse::from_component(diagram, comp, &|_| 1.0);
    let (_, right, _, _) = perron(&m, tol)?;
    let (_, left, _, _) = perron(&m.transpose(), tol)?;
    let weights: Vec<f64> = left.iter().zip(&right).map(|(u, w)| u * w).collect();
    let total: f64 = weights.iter().sum();
    let mut h = Histogram { masses: vec![0.0; bins] };
    for (&v, w) in comp.vertices.iter().zip(&weights) {
        let vx = &diagram.vertices[v];
        h.spread(vx.lo.approx(), vx.hi.approx(), w / total);
    }
    Ok(h)
}

/// Topological pressure of the per-symbol potential `t * f(symbol)` on the
/// component: log Perron root of the matrix weighting each arrow by
/// `exp(t f(target symbol))`.
pub fn pressure<S: Scalar>(diagram: &MarkovDiagram<S>, comp: &Component, f: &[f64], t: f64, tol: f64) -> Result<f64> {
    let sym = |v: usize| diagram.vertices[v].symbol as usize - 1;
    let present: Vec<f64> = comp.vertices.iter().map(|&v| f[sym(v)]).collect();
    // factor out the dominant weight to keep entries bounded
    let shift = if t >= 0.0 {
        present.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        present.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let m = Sparse::from_component(diagram, comp, &|w| (t * (f[sym(w)] - shift)).exp());
    let (root, _, _, _) = perron(&m, tol)?;
    Ok(t * shift + root.ln())
}

/// Pushes a histogram forward under the map (mass uniform within each bin).
pub fn push_histogram(map: &MapParams<f64>, h: &Histogram) -> Histogram {
    let mut out = Histogram { masses: vec![0.0; h.bins()] };
    for (i, &mass) in h.masses.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let (a, b) = h.edges(i);
        for j in map.cells_meeting(&a, &b) {
            let lo = a.max(*map.cell_lo(j));
            let hi = b.min(*map.cell_hi(j));
            if let Some((ilo, ihi)) = map.image_interval(&lo, &hi, j) {
                out.spread(ilo, ihi, mass * (hi - lo) / (b - a));
            }
        }
    }
    out
}

/// Lengths of shortest paths from `from` to every vertex, within `allowed`.
pub fn bfs_distances<S: Scalar>(diagram: &MarkovDiagram<S>, from: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; diagram.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued") + 1;
        for &w in &diagram.successors[v] {
            if dist[w].is_none() && allowed(w) {
                dist[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Shortest path `from -> ... -> to` (inclusive) within `allowed`.
pub fn shortest_path<S: Scalar>(
    diagram: &MarkovDiagram<S>,
    from: usize,
    to: usize,
    allowed: &dyn Fn(usize) -> bool,
    budget: &mut usize,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; diagram.len()];
    let mut seen = vec![false; diagram.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        for &w in &diagram.successors[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_spread_conserves_mass() {
        let mut h = Histogram { masses: vec![0.0; 10] };
        h.spread(0.05, 0.37, 1.0);
        h.spread(0.5, 0.5, 0.5);
        assert!((h.total() - 1.5).abs() < 1e-12);
        assert!((h.masses[1] - 0.1 / 0.32).abs() < 1e-12);
    }

    #[test]
    fn perron_of_periodic_matrix() {
        // 2-cycle: eigenvalues +-1, power method on M + I still converges
        let m = Sparse { rows: vec![vec![(1, 1.0)], vec![(0, 1.0)]] };
        let (root, v, _, _) = perron(&m, 1e-12).unwrap();
        assert!((root - 1.0).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }
}
