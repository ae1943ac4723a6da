use serde::Serialize;

use crate::game::DerivedParams;
use crate::value::{PiecewiseValue, SegmentKind};

/// Beliefs closer than this to a segment endpoint sit on the endpoint.
pub(crate) const ENDPOINT_EPS: f64 = 1e-12;

/// What the informed player does when the belief is at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "regime")]
pub enum Regime {
    /// The belief is `p*`; nothing moves.
    Absorb,
    /// Split immediately to `lo` or `hi` with mean-preserving weights.
    Split { lo: f64, hi: f64 },
    /// Reveal nothing; the belief drifts toward `p*` until it reaches `stop`.
    Slide { stop: f64 },
    /// Stay put until an exponential clock with rate `intensity` rings, then jump to `target`.
    Hold { target: f64, intensity: f64 },
}

/// Weight on `hi` when splitting `p` to `{lo, hi}`.
pub fn split_weight(p: f64, lo: f64, hi: f64) -> f64 {
    (p - lo) / (hi - lo)
}

/// Intensity of the jump from `from` to `target` that keeps the expected
/// belief on the chain's drift toward `p*`.
pub fn hold_intensity(from: f64, target: f64, p_star: f64, kappa: f64) -> f64 {
    kappa * (from - p_star).abs() / (from - target).abs()
}

/// Optimal revelation behaviour read off a solved value function.
#[derive(Debug, Clone)]
pub struct RevelationPolicy {
    pieces: Vec<(f64, f64, SegmentKind, Option<f64>)>,
    params: DerivedParams,
}

impl RevelationPolicy {
    pub fn new(pv: &PiecewiseValue) -> Self {
        RevelationPolicy {
            pieces: pv.segments().iter().map(|s| (s.lo, s.hi, s.kind, s.jump_target)).collect(),
            params: *pv.params(),
        }
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    /// All segment endpoints.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.pieces.iter().flat_map(|p| [p.0, p.1]).collect();
        pts.dedup();
        pts
    }

    /// Behaviour at `p`, decided by the segment next to `p` on the side of `p*`.
    pub fn regime_at(&self, p: f64) -> Regime {
        let ps = self.params.p_star;
        if (p - ps).abs() <= ENDPOINT_EPS {
            return Regime::Absorb;
        }
        let above = p > ps;
        let idx = if above {
            self.pieces.partition_point(|s| s.1 < p - ENDPOINT_EPS)
        } else {
            self.pieces.partition_point(|s| s.1 <= p + ENDPOINT_EPS)
        }
        .min(self.pieces.len() - 1);
        let (lo, hi, kind, jump_target) = self.pieces[idx];
        let interior = lo + ENDPOINT_EPS < p && p < hi - ENDPOINT_EPS;
        match kind {
            SegmentKind::Nonlinear => Regime::Slide {
                stop: if above { lo } else { hi },
            },
            _ if interior => Regime::Split { lo, hi },
            SegmentKind::Linear => {
                let target = jump_target.unwrap_or(if above { lo } else { hi });
                Regime::Hold {
                    target,
                    intensity: hold_intensity(p, target, ps, self.params.kappa),
                }
            }
            SegmentKind::InitialSplit => {
                let target = if (p - hi).abs() <= ENDPOINT_EPS { lo } else { hi };
                Regime::Hold {
                    target,
                    intensity: hold_intensity(p, target, ps, self.params.kappa),
                }
            }
        }
    }
}

/// Builds the policy of a solved value function.
pub fn build_policy(pv: &PiecewiseValue) -> RevelationPolicy {
    RevelationPolicy::new(pv)
}
