//! Large deviations of Birkhoff averages of per-symbol observables:
//! Monte-Carlo decay rates under Lebesgue sampling and rate functions from
//! the Legendre transform of the pressure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{pressure, Component, PERRON_TOLERANCE};
use crate::diagram::MarkovDiagram;
use crate::error::{Error, Result};
use crate::map::MapParams;
use crate::measures::LebesgueSampler;
use crate::scalar::Scalar;

/// Samples per random substream.
pub const CHUNK: usize = 4096;
/// Rows with fewer hits are left out of the rate fit when enough others
/// remain.
pub const MIN_COUNT: u64 = 16;

#[derive(Clone, Debug, Serialize)]
pub struct McConfig {
    /// Increasing orbit lengths at which averages are tested.
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::PreconditionViolated("n_list must be positive and increasing".into()));
        }
        if self.samples < 1000 {
            return Err(Error::PreconditionViolated("at least 1000 samples are needed".into()));
        }
        Ok(())
    }
}

/// Hit counts `counts[w][i]`: samples whose vector of Birkhoff averages at
/// time `n_list[i]` lies in box `w`.
///
/// `observables[d][j - 1]` is the value of observable `d` on symbol `j`;
/// each box gives one closed interval per observable. Sample `s` uses
/// substream `s / CHUNK` of a ChaCha8 generator seeded with `seed`, so the
/// counts do not depend on the number of worker threads.
pub fn mc_deviation_counts(
    map: &MapParams<f64>,
    observables: &[Vec<f64>],
    boxes: &[Vec<(f64, f64)>],
    cfg: &McConfig,
) -> Result<Vec<Vec<u64>>> {
    cfg.validate()?;
    let k = map.k();
    if observables.is_empty() || observables.iter().any(|f| f.len() != k) {
        return Err(Error::PreconditionViolated(format!("each observable needs {k} values")));
    }
    if boxes.iter().any(|b| b.len() != observables.len() || b.iter().any(|&(lo, hi)| !(lo < hi))) {
        return Err(Error::PreconditionViolated("each window needs lo < hi for every observable".into()));
    }
    let dims = observables.len();
    // symbol-major layout for the inner loop
    let table: Vec<f64> = (0..k).flat_map(|j| observables.iter().map(move |f| f[j])).collect();
    let n_max = *cfg.n_list.last().expect("validated");
    let chunks = cfg.samples.div_ceil(CHUNK);
    let base = LebesgueSampler::new(map);
    let per_chunk: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64);
            let mut counts = vec![0u64; boxes.len() * cfg.n_list.len()];
            let mut sums = vec![0.0f64; dims];
            let size = CHUNK.min(cfg.samples - c * CHUNK);
            for _ in 0..size {
                let mut sampler = base.clone();
                sums.iter_mut().for_each(|s| *s = 0.0);
                let mut next = 0;
                for n in 1..=n_max {
                    let j = sampler.step(rng.gen::<f64>()) as usize - 1;
                    for (s, v) in sums.iter_mut().zip(&table[j * dims..(j + 1) * dims]) {
                        *s += v;
                    }
                    if n == cfg.n_list[next] {
                        let inv = 1.0 / n as f64;
                        for (w, b) in boxes.iter().enumerate() {
                            if b.iter().zip(&sums).all(|(&(lo, hi), &s)| (lo..=hi).contains(&(s * inv))) {
                                counts[w * cfg.n_list.len() + next] += 1;
                            }
                        }
                        next += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; boxes.len() * cfg.n_list.len()];
    for counts in per_chunk {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    Ok(total.chunks(cfg.n_list.len()).map(|c| c.to_vec()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DeviationRow {
    pub n: usize,
    pub count: u64,
    pub fraction: f64,
    /// `-(1/n) log fraction`, absent when nothing was hit.
    pub log_rate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeviationEstimate {
    pub window: (f64, f64),
    pub rows: Vec<DeviationRow>,
    /// Decay rate: minus the slope of `log fraction` against `n`, or
    /// `-(1/n) log fraction` when a single row is usable.
    pub rate: f64,
    /// Two standard errors from the binomial counts.
    pub band: f64,
    /// Lengths the rate was fitted on.
    pub fitted: Vec<usize>,
    /// Lengths with no hit at all.
    pub zero_counts: Vec<usize>,
}

/// Decay rate from hit counts.
pub fn fit_rate(window: (f64, f64), n_list: &[usize], counts: &[u64], samples: usize) -> Result<DeviationEstimate> {
    let total = samples as f64;
    let rows: Vec<DeviationRow> = n_list
        .iter()
        .zip(counts)
        .map(|(&n, &count)| {
            let fraction = count as f64 / total;
            let log_rate = (count > 0).then(|| -fraction.ln() / n as f64);
            DeviationRow { n, count, fraction, log_rate }
        })
        .collect();
    let zero_counts: Vec<usize> = rows.iter().filter(|r| r.count == 0).map(|r| r.n).collect();
    if zero_counts.len() == rows.len() {
        return Err(Error::AllZeroCounts);
    }
    let mut usable: Vec<&DeviationRow> = rows.iter().filter(|r| r.count >= MIN_COUNT).collect();
    if usable.is_empty() {
        usable = rows.iter().filter(|r| r.count > 0).collect();
    }
    // variance of log(fraction) from binomial counts
    let var = |r: &DeviationRow| ((1.0 - r.fraction) / r.count as f64).max(1.0 / total);
    let (rate, band) = if usable.len() == 1 {
        let r = usable[0];
        (-r.fraction.ln() / r.n as f64, 2.0 * var(r).sqrt() / r.n as f64)
    } else {
        let w: Vec<f64> = usable.iter().map(|r| 1.0 / var(r)).collect();
        let sw: f64 = w.iter().sum();
        let xm = usable.iter().zip(&w).map(|(r, w)| w * r.n as f64).sum::<f64>() / sw;
        let ym = usable.iter().zip(&w).map(|(r, w)| w * r.fraction.ln()).sum::<f64>() / sw;
        let sxx: f64 = usable.iter().zip(&w).map(|(r, w)| w * (r.n as f64 - xm).powi(2)).sum();
        let sxy: f64 = usable.iter().zip(&w).map(|(r, w)| w * (r.n as f64 - xm) * (r.fraction.ln() - ym)).sum();
        (-sxy / sxx, 2.0 / sxx.sqrt())
    };
    let fitted = usable.iter().map(|r| r.n).collect();
    Ok(DeviationEstimate { window, rows, rate, band, fitted, zero_counts })
}

/// Monte-Carlo decay rate of the Lebesgue measure of
/// `{x : (1/n) Σ f(T^i x) ∈ window}` for a per-symbol observable `f`.
pub fn mc_deviation_rate(
    map: &MapParams<f64>,
    f: &[f64],
    window: (f64, f64),
    cfg: &McConfig,
) -> Result<DeviationEstimate> {
    mc_deviation_rates(map, f, &[window], cfg)?.pop().expect("one window")
}

/// As [`mc_deviation_rate`] for several windows sharing the same samples.
pub fn mc_deviation_rates(
    map: &MapParams<f64>,
    f: &[f64],
    windows: &[(f64, f64)],
    cfg: &McConfig,
) -> Result<Vec<Result<DeviationEstimate>>> {
    let boxes: Vec<Vec<(f64, f64)>> = windows.iter().map(|&w| vec![w]).collect();
    let counts = mc_deviation_counts(map, &[f.to_vec()], &boxes, cfg)?;
    Ok(windows.iter().zip(&counts).map(|(&w, c)| fit_rate(w, &cfg.n_list, c, cfg.samples)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSource {
    Legendre,
    Analytic,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateCurve {
    pub grid: Vec<f64>,
    /// `I(s)`; `+∞` outside the range of the observable.
    pub rate: Vec<f64>,
    pub source: RateSource,
    pub h_top: f64,
}

impl RateCurve {
    /// Grid point of least rate.
    pub fn argmin(&self) -> f64 {
        let i = (0..self.rate.len()).min_by(|&a, &b| self.rate[a].total_cmp(&self.rate[b])).unwrap_or(0);
        self.grid[i]
    }
}

/// `I(s) = sup_t [t s - (P(t) - h_top)]` with `P` the pressure of `t f` on
/// the component.
///
/// The supremum is taken over `t_grid` and then refined by golden-section
/// search around the best grid point (the objective is concave in `t`).
pub fn rate_from_pressure<S: Scalar>(
    diagram: &MarkovDiagram<S>,
    comp: &Component,
    f: &[f64],
    t_grid: &[f64],
    s_grid: &[f64],
) -> Result<RateCurve> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionViolated("t_grid must be nonempty and increasing".into()));
    }
    let p = |t: f64| pressure(diagram, comp, f, t, PERRON_TOLERANCE);
    let h_top = p(0.0)?;
    let values: Vec<f64> = t_grid.iter().map(|&t| p(t)).collect::<Result<_>>()?;
    let present: Vec<f64> = comp.vertices.iter().map(|&v| f[diagram.vertices[v].symbol as usize - 1]).collect();
    let fmin = present.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut rate = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if s < fmin - 1e-12 || s > fmax + 1e-12 {
            rate.push(f64::INFINITY);
            continue;
        }
        let g = |t: f64, pt: f64| t * s - (pt - h_top);
        let (i, best) = values
            .iter()
            .enumerate()
            .map(|(i, &pt)| (i, g(t_grid[i], pt)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty grid");
        let lo = t_grid[i.saturating_sub(1)];
        let hi = t_grid[(i + 1).min(t_grid.len() - 1)];
        let refined = golden_max(|t| p(t).map(|pt| g(t, pt)), lo, hi, 1e-10)?;
        let mut value = best.max(refined);
        if value < 0.0 && value > -1e-9 {
            value = 0.0;
        }
        rate.push(value);
    }
    Ok(RateCurve { grid: s_grid.to_vec(), rate, source: RateSource::Legendre, h_top })
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.max(fd))
}

/// `inf` of a convex rate curve over `[lo, hi]`, evaluated exactly at the
/// nearer end of the window when the window misses the minimiser.
pub fn window_rate<S: Scalar>(
    diagram: &MarkovDiagram<S>,
    comp: &Component,
    f: &[f64],
    t_grid: &[f64],
    window: (f64, f64),
    mean: f64,
) -> Result<f64> {
    if (window.0..=window.1).contains(&mean) {
        return Ok(0.0);
    }
    let s = if mean < window.0 { window.0 } else { window.1 };
    Ok(rate_from_pressure(diagram, comp, f, t_grid, &[s])?.rate[0])
}

/// Binary-entropy rate `log 2 - H(s)` of digit frequencies in the full
/// two-shift.
pub fn binary_entropy_rate(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return f64::INFINITY;
    }
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    std::f64::consts::LN_2 - h(s) - h(1.0 - s)
}

/// Evenly spaced grid with `n + 1` points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_rate_values() {
        assert_eq!(binary_entropy_rate(0.5), 0.0);
        assert!((binary_entropy_rate(0.3) - 0.082_282_9).abs() < 1e-6);
        assert!(binary_entropy_rate(1.5).is_infinite());
    }

    #[test]
    fn fit_rejects_empty_window() {
        assert_eq!(fit_rate((0.0, 0.1), &[8, 16], &[0, 0], 1000).unwrap_err(), Error::AllZeroCounts);
    }
}
