//! Direction-agnostic view of `u` and the slope supremum `a`, `rho`.
//!
//! Every pass runs left to right. The decreasing pass is the increasing pass
//! of the reflected game `q = 1 - p`, so the same code handles both.

use serde::{Deserialize, Serialize};

use super::Tolerances;
use crate::oracle::UOracle;

/// Uniform exact points added to the oracle cache for the slope scan.
const SCAN_POINTS: usize = 64;
/// Golden-section search stops when its bracket is this narrow.
const GOLDEN_WIDTH: f64 = 1e-10;
/// Beliefs this close to `p*` are treated as `p*`.
pub(crate) const AT_STAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Result of maximizing the slope ratio over beliefs beyond `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeSup {
    /// The supremum (may be `+inf` when `f` lies below `u(p*)` at `p = p*`).
    pub a: f64,
    /// Largest maximizer, snapped to `p` when within the tolerance.
    pub rho: f64,
}

pub(crate) struct Frame<'a> {
    oracle: &'a UOracle,
    reflected: bool,
    pub(crate) q_star: f64,
    pub(crate) mu: f64,
    samples: Vec<(f64, f64)>,
}

impl<'a> Frame<'a> {
    pub(crate) fn new(oracle: &'a UOracle, direction: Direction) -> Self {
        let reflected = direction == Direction::Decreasing;
        let map = |p: f64| if reflected { 1.0 - p } else { p };
        let mut samples: Vec<(f64, f64)> = oracle.samples().iter().map(|&(p, u)| (map(p), u)).collect();
        samples.extend((0..=SCAN_POINTS).map(|i| {
            let q = i as f64 / SCAN_POINTS as f64;
            (q, oracle.u(map(q)))
        }));
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| a.0 == b.0);
        let params = oracle.params();
        Frame {
            oracle,
            reflected,
            q_star: map(params.p_star),
            mu: params.mu,
            samples,
        }
    }

    pub(crate) fn reflected(&self) -> bool {
        self.reflected
    }

    /// Frame coordinate of a belief, and back (the map is an involution).
    pub(crate) fn map(&self, x: f64) -> f64 {
        if self.reflected {
            1.0 - x
        } else {
            x
        }
    }

    pub(crate) fn u(&self, q: f64) -> f64 {
        self.oracle.u(self.map(q))
    }

    /// Right derivative of `u` at `q` in frame coordinates.
    pub(crate) fn u_slope_right(&self, q: f64) -> f64 {
        if self.reflected {
            -self.oracle.one_sided_slope(1.0 - q, -1.0)
        } else {
            self.oracle.one_sided_slope(q, 1.0)
        }
    }

    /// `a(q, f)` and the largest maximizer `rho(q, f)` over `q' in (q, 1]`.
    pub(crate) fn slope_sup(&self, q: f64, f: f64, tol: &Tolerances) -> SlopeSup {
        let (mu, qs) = (self.mu, self.q_star);
        let ratio = |x: f64, ux: f64| {
            let h = mu * (ux - f) / (x - qs + mu * (x - q));
            if h.is_nan() {
                f64::NEG_INFINITY
            } else {
                h
            }
        };
        let exact = |x: f64| ratio(x, self.u(x));

        let at_p = if q - qs > AT_STAR {
            mu * (self.u(q) - f) / (q - qs)
        } else {
            // Limit p' -> p* of the ratio.
            let gap = self.u(q) - f;
            if gap.abs() <= tol.eq {
                mu / (1.0 + mu) * self.u_slope_right(q)
            } else if gap > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        };

        let start = self.samples.partition_point(|s| s.0 <= q + AT_STAR);
        let mut seq: Vec<(f64, f64)> = Vec::with_capacity(self.samples.len() - start + 1);
        seq.push((q, at_p));
        seq.extend(self.samples[start..].iter().map(|&(x, ux)| (x, ratio(x, ux))));

        let mut candidates: Vec<(f64, f64)> = Vec::new();
        let n = seq.len();
        for i in 0..n {
            let v = seq[i].1;
            let left = if i > 0 { seq[i - 1].1 } else { f64::NEG_INFINITY };
            let right = if i + 1 < n { seq[i + 1].1 } else { f64::NEG_INFINITY };
            if v < left || v < right {
                continue;
            }
            candidates.push(seq[i]);
            if v == left && v == right {
                continue;
            }
            // A maximum of the scan brackets a local maximum of the ratio.
            let lo = if i > 0 { seq[i - 1].0 } else { q };
            let hi = if i + 1 < n { seq[i + 1].0 } else { seq[i].0 };
            if hi - lo > GOLDEN_WIDTH {
                candidates.push(golden_max(&exact, lo, hi));
            }
        }

        let best = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        if best == f64::INFINITY {
            return SlopeSup { a: best, rho: q };
        }
        let rho = candidates
            .iter()
            .filter(|c| c.1 >= best - tol.argmax)
            .map(|c| c.0)
            .fold(q, f64::max);
        let rho = if rho <= q + tol.rho { q } else { rho };
        SlopeSup { a: best, rho }
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`; ties move right
/// so the largest maximizer wins.
pub(crate) fn golden_max(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const G: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut c = b - G * (b - a);
    let mut d = a + G * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iter = 0;
    while b - a > GOLDEN_WIDTH && iter < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - G * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + G * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_interior_peak() {
        let (x, fx) = golden_max(&|x: f64| -(x - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn golden_prefers_right_on_plateau() {
        let (x, _) = golden_max(&|_| 1.0, 0.0, 1.0);
        assert!(x > 1.0 - 1e-8);
    }

    #[test]
    fn golden_runs_to_edge_on_monotone() {
        let (x, _) = golden_max(&|x: f64| -x, 0.2, 0.5);
        assert!(x - 0.2 < 1e-9);
    }
}
