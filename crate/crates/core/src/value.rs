//! Piecewise representation of the limit value function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::DerivedParams;

/// Densely sampled smooth curve with stored derivatives, evaluated by cubic
/// Hermite interpolation. Abscissae are strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseCurve {
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
}

impl DenseCurve {
    pub fn push(&mut self, p: f64, v: f64, dv: f64) {
        debug_assert!(self.p.last().is_none_or(|&q| p > q));
        self.p.push(p);
        self.v.push(v);
        self.dv.push(dv);
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.p[0]
    }

    pub fn hi(&self) -> f64 {
        self.p[self.p.len() - 1]
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.p.len();
        let i = self.p.partition_point(|&q| q <= x).clamp(1, n - 1) - 1;
        let h = self.p[i + 1] - self.p[i];
        let t = ((x - self.p[i]) / h).clamp(0.0, 1.0);
        (i, h, t)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.p.len() == 1 {
            return self.v[0];
        }
        let (i, h, t) = self.locate(x);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.v[i] + h10 * h * self.dv[i] + h01 * self.v[i + 1] + h11 * h * self.dv[i + 1]
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if self.p.len() == 1 {
            return self.dv[0];
        }
        let (i, h, t) = self.locate(x);
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.v[i] + d10 * self.dv[i] + d01 * self.v[i + 1] + d11 * self.dv[i + 1]
    }

    /// Mirror image under `p -> 1 - p`.
    pub fn reflected(&self) -> DenseCurve {
        DenseCurve {
            p: self.p.iter().rev().map(|&p| 1.0 - p).collect(),
            v: self.v.iter().rev().copied().collect(),
            dv: self.dv.iter().rev().map(|&d| -d).collect(),
        }
    }

    /// Keeps samples strictly below `x` and appends `(x, v, dv)`.
    pub fn truncate_at(&mut self, x: f64, v: f64, dv: f64) {
        let keep = self.p.partition_point(|&q| q < x);
        self.p.truncate(keep);
        self.v.truncate(keep);
        self.dv.truncate(keep);
        self.push(x, v, dv);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Affine piece around `p*` from the initialization.
    InitialSplit,
    /// Affine piece the belief never enters: split at time 0, hold-and-jump afterwards.
    Linear,
    /// Nonrevealing piece following the sliding ODE.
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Affine { slope: f64, intercept: f64 },
    Dense(DenseCurve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
    pub payload: Payload,
    /// For linear pieces, the endpoint the belief jumps to from the far endpoint.
    pub jump_target: Option<f64>,
}

impl Segment {
    pub fn affine(lo: f64, hi: f64, kind: SegmentKind, slope: f64, intercept: f64, jump_target: Option<f64>) -> Self {
        Segment {
            lo,
            hi,
            kind,
            payload: Payload::Affine { slope, intercept },
            jump_target,
        }
    }

    pub fn dense(curve: DenseCurve) -> Self {
        Segment {
            lo: curve.lo(),
            hi: curve.hi(),
            kind: SegmentKind::Nonlinear,
            payload: Payload::Dense(curve),
            jump_target: None,
        }
    }

    /// Samples `f` and its derivative `df` on `[lo, hi]` as a nonlinear piece.
    pub fn sampled(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let mut c = DenseCurve::default();
        for i in 0..=n {
            let p = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
            c.push(p, f(p), df(p));
        }
        Segment::dense(c)
    }

    pub fn eval(&self, p: f64) -> f64 {
        match &self.payload {
            Payload::Affine { slope, intercept } => slope * p + intercept,
            Payload::Dense(c) => c.eval(p),
        }
    }

    pub fn deriv(&self, p: f64) -> f64 {
        match &self.payload {
            Payload::Affine { slope, .. } => *slope,
            Payload::Dense(c) => c.deriv(p),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.payload, Payload::Affine { .. })
    }

    /// Mirror image under `p -> 1 - p`.
    pub fn reflected(&self) -> Segment {
        let payload = match &self.payload {
            Payload::Affine { slope, intercept } => Payload::Affine {
                slope: -slope,
                intercept: slope + intercept,
            },
            Payload::Dense(c) => Payload::Dense(c.reflected()),
        };
        Segment {
            lo: 1.0 - self.hi,
            hi: 1.0 - self.lo,
            kind: self.kind,
            payload,
            jump_target: self.jump_target.map(|t| 1.0 - t),
        }
    }
}

/// Tolerance for segment endpoints to count as the same joint.
pub const JOINT_EPS: f64 = 1e-12;

/// Ordered segments tiling `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseValue {
    segments: Vec<Segment>,
    params: DerivedParams,
    /// `p*` when the initialization collapsed to the single anchor `w(p*) = u(p*)`.
    anchor: Option<(f64, f64)>,
}

impl PiecewiseValue {
    /// Assembles and checks the tiling. `anchor` is `(p*, u(p*))` for a
    /// degenerate initialization.
    pub fn new(segments: Vec<Segment>, params: DerivedParams, anchor: Option<(f64, f64)>) -> Result<Self> {
        let pv = PiecewiseValue {
            segments,
            params,
            anchor,
        };
        pv.check_tiling()?;
        Ok(pv)
    }

    fn check_tiling(&self) -> Result<()> {
        let s = &self.segments;
        if s.is_empty() {
            // Only a single anchor at a boundary p* with no passes could be empty,
            // which cannot cover [0, 1].
            return Err(Error::Coverage("no segments".into()));
        }
        if s[0].lo.abs() > JOINT_EPS || (s[s.len() - 1].hi - 1.0).abs() > JOINT_EPS {
            return Err(Error::Coverage(format!(
                "segments span [{}, {}]",
                s[0].lo,
                s[s.len() - 1].hi
            )));
        }
        for (i, w) in s.windows(2).enumerate() {
            if (w[0].hi - w[1].lo).abs() > JOINT_EPS {
                return Err(Error::Coverage(format!(
                    "gap between segment {i} (hi {}) and {} (lo {})",
                    w[0].hi,
                    i + 1,
                    w[1].lo
                )));
            }
        }
        if s.iter().any(|seg| !(seg.hi >= seg.lo)) {
            return Err(Error::Coverage("segment with hi < lo".into()));
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn anchor(&self) -> Option<(f64, f64)> {
        self.anchor
    }

    /// Index of a segment containing `p` (the left one at a joint).
    pub fn segment_index(&self, p: f64) -> usize {
        self.segments
            .partition_point(|s| s.hi < p)
            .min(self.segments.len() - 1)
    }

    pub fn eval(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        self.segments[self.segment_index(p)].eval(p)
    }

    /// Right derivative (left derivative at `p = 1`).
    pub fn deriv_right(&self, p: f64) -> f64 {
        let i = self.segments.partition_point(|s| s.hi <= p).min(self.segments.len() - 1);
        self.segments[i].deriv(p)
    }

    /// Left derivative (right derivative at `p = 0`).
    pub fn deriv_left(&self, p: f64) -> f64 {
        let i = self.segments.partition_point(|s| s.hi < p).min(self.segments.len() - 1);
        let i = if self.segments[i].lo >= p && i > 0 && p > 0.0 { i - 1 } else { i };
        self.segments[i].deriv(p)
    }

    /// Interior points where two segments meet.
    pub fn joints(&self) -> Vec<f64> {
        self.segments.windows(2).map(|w| w[1].lo).collect()
    }

    /// Points where `w` stops being affine: segment joints whose neighbours are
    /// not a single line, plus the two corners.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        out.extend(self.joints());
        out.push(1.0);
        out
    }
}

/// Wire form of a segment in the solution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    /// `[p, v, dv]` triples of a nonlinear piece.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_target: Option<f64>,
}

impl From<&Segment> for SegmentRecord {
    fn from(s: &Segment) -> Self {
        let (slope, intercept, samples) = match &s.payload {
            Payload::Affine { slope, intercept } => (Some(*slope), Some(*intercept), None),
            Payload::Dense(c) => (
                None,
                None,
                Some((0..c.len()).map(|i| [c.p[i], c.v[i], c.dv[i]]).collect()),
            ),
        };
        SegmentRecord {
            lo: s.lo,
            hi: s.hi,
            kind: s.kind,
            slope,
            intercept,
            samples,
            jump_target: s.jump_target,
        }
    }
}

impl TryFrom<SegmentRecord> for Segment {
    type Error = Error;

    fn try_from(r: SegmentRecord) -> Result<Self> {
        let payload = match (r.slope, r.intercept, r.samples) {
            (Some(slope), Some(intercept), None) => Payload::Affine { slope, intercept },
            (None, None, Some(samples)) if !samples.is_empty() => {
                let mut c = DenseCurve::default();
                for [p, v, dv] in samples {
                    if c.p.last().is_some_and(|&q| p <= q) {
                        return Err(Error::InvalidArgument("segment samples must increase".into()));
                    }
                    c.push(p, v, dv);
                }
                Payload::Dense(c)
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "segment needs either slope+intercept or samples".into(),
                ))
            }
        };
        Ok(Segment {
            lo: r.lo,
            hi: r.hi,
            kind: r.kind,
            payload,
            jump_target: r.jump_target,
        })
    }
}
