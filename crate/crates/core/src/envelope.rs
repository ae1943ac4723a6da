//! Upper concave envelope of `u` and the initial affine piece around `p*`.

use serde::Serialize;

use crate::game::DerivedParams;
use crate::oracle::UOracle;

/// Contact tolerance relative to the payoff scale.
pub const CONTACT_REL_TOL: f64 = 1e-7;
/// Vertex refinement stops once no gap-boundary vertex moves more than this.
const VERTEX_STABLE: f64 = 1e-6;
const REFINE_POINTS: usize = 32;
const MAX_REFINE_ROUNDS: usize = 16;

/// Breakpoint representation of `cav u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcaveEnvelope {
    /// Hull vertices sorted by `p`, with strictly decreasing chord slopes.
    pub vertices: Vec<(f64, f64)>,
    /// Gaps of the contact set: open intervals on which `u < cav u`.
    pub gaps: Vec<(f64, f64)>,
    pub contact_tol: f64,
}

/// Affine function `slope * p + intercept` restricted to `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct InitialSegment {
    pub p_tilde0: f64,
    pub p0: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl InitialSegment {
    pub fn value(&self, p: f64) -> f64 {
        self.slope * p + self.intercept
    }

    /// True when the initialization collapses to the single anchor `w(p*) = u(p*)`.
    pub fn is_anchor(&self) -> bool {
        self.p_tilde0 == self.p0
    }
}

/// Upper hull of a sorted point set (monotone chain, collinear points dropped).
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(points.len());
    for (i, &(x, y)) in points.iter().enumerate() {
        while hull.len() >= 2 {
            let (ax, ay) = points[hull[hull.len() - 2]];
            let (bx, by) = points[hull[hull.len() - 1]];
            // Pop b unless a -> b -> c turns right.
            let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

impl ConcaveEnvelope {
    fn from_samples(oracle: &UOracle, contact_tol: f64) -> Self {
        let samples = oracle.samples();
        let idx = upper_hull(samples);
        let mut gaps = Vec::new();
        for w in idx.windows(2) {
            let (a, b) = (samples[w[0]], samples[w[1]]);
            let chord = |p: f64| a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0);
            let deficit = if w[1] > w[0] + 1 {
                samples[w[0] + 1..w[1]]
                    .iter()
                    .map(|&(p, u)| chord(p) - u)
                    .fold(f64::NEG_INFINITY, f64::max)
            } else {
                let m = 0.5 * (a.0 + b.0);
                chord(m) - oracle.u(m)
            };
            if deficit > contact_tol {
                gaps.push((a.0, b.0));
            }
        }
        ConcaveEnvelope {
            vertices: idx.iter().map(|&i| samples[i]).collect(),
            gaps,
            contact_tol,
        }
    }

    pub fn eval(&self, p: f64) -> f64 {
        let v = &self.vertices;
        let i = v.partition_point(|x| x.0 < p);
        if i == 0 {
            return v[0].1;
        }
        if i == v.len() {
            return v[v.len() - 1].1;
        }
        let (a, b) = (v[i - 1], v[i]);
        a.1 + (b.1 - a.1) * (p - a.0) / (b.0 - a.0)
    }

    /// Whether `p` belongs to the contact set `{cav u = u}`. Gap endpoints are
    /// only known to within the vertex resolution, so points that close to
    /// an endpoint count as contact.
    pub fn touches(&self, p: f64) -> bool {
        !self
            .gaps
            .iter()
            .any(|&(a, b)| a + VERTEX_STABLE < p && p < b - VERTEX_STABLE)
    }

    fn gap_boundaries(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.gaps.iter().flat_map(|&(a, b)| [a, b]).collect();
        out.dedup();
        out
    }
}

/// Builds `cav u` from the oracle cache, re-sampling `u` around every vertex
/// that bounds a gap of the contact set until those vertices stop moving.
pub fn upper_concave_envelope(oracle: &mut UOracle) -> ConcaveEnvelope {
    let tol = CONTACT_REL_TOL * oracle.params().scale;
    let mut env = ConcaveEnvelope::from_samples(oracle, tol);
    for _ in 0..MAX_REFINE_ROUNDS {
        let before = env.gap_boundaries();
        for &p in &before {
            if p <= 0.0 || p >= 1.0 {
                continue;
            }
            let s = oracle.samples();
            let i = s.partition_point(|x| x.0 < p);
            let left = if i > 0 { p - s[i - 1].0 } else { 0.0 };
            let right = s.get(i + 1).map_or(0.0, |x| x.0 - p);
            let half = left.max(right);
            if half > VERTEX_STABLE * 0.01 {
                oracle.refine_around(p, half, REFINE_POINTS);
            }
        }
        env = ConcaveEnvelope::from_samples(oracle, tol);
        let after = env.gap_boundaries();
        let stable = before.len() == after.len()
            && before.iter().zip(&after).all(|(a, b)| (a - b).abs() <= VERTEX_STABLE);
        if stable {
            break;
        }
    }
    env
}

/// The interval `[p~0, p0]` around `p*` on which `w` is affine.
///
/// For interior `p*` in the contact set the interval collapses to `p*`.
/// Otherwise `p0` (resp. `p~0`) is the nearest contact point above (resp.
/// below) `p*`; when `p*` sits on the boundary of `[0, 1]` the side beyond it
/// is pinned to `p*`.
pub fn initial_interval(env: &ConcaveEnvelope, params: &DerivedParams) -> (f64, f64) {
    let ps = params.p_star;
    if ps > 0.0 && ps < 1.0 && env.touches(ps) {
        return (ps, ps);
    }
    let p0 = if ps >= 1.0 {
        1.0
    } else {
        env.gaps
            .iter()
            .find(|&&(a, b)| a <= ps && ps < b)
            .map_or(ps, |&(_, b)| b)
    };
    let p_tilde0 = if ps <= 0.0 {
        0.0
    } else {
        env.gaps
            .iter()
            .find(|&&(a, b)| a < ps && ps <= b)
            .map_or(ps, |&(a, _)| a)
    };
    (p_tilde0, p0)
}

/// The affine value on `[p~0, p0]` obtained by mutual jumps between the two
/// endpoints (or the single anchor `u(p*)` when they coincide).
pub fn initial_segment(oracle: &UOracle, params: &DerivedParams, p_tilde0: f64, p0: f64) -> InitialSegment {
    let (ps, mu) = (params.p_star, params.mu);
    if p_tilde0 >= p0 {
        return InitialSegment {
            p_tilde0: ps,
            p0: ps,
            slope: 0.0,
            intercept: oracle.u(ps),
        };
    }
    let (ul, uh) = (oracle.u(p_tilde0), oracle.u(p0));
    let denom = (p0 - p_tilde0) * (mu + 1.0);
    InitialSegment {
        p_tilde0,
        p0,
        slope: mu * (uh - ul) / denom,
        intercept: ul * (p0 * (mu + 1.0) - ps) / denom + uh * (ps - p_tilde0 * (mu + 1.0)) / denom,
    }
}
