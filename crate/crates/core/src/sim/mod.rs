//! Monte-Carlo simulation of the optimal belief process.
//!
//! On sliding pieces the belief follows the chain's drift toward `p*`; at the
//! far end of a revealing piece it holds and jumps at an exponential time; a
//! starting belief strictly inside an affine piece is split to the endpoints.

mod policy;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

pub use policy::{build_policy, hold_intensity, split_weight, Regime, RevelationPolicy};

use crate::error::{Error, Result};
use crate::game::DerivedParams;
use crate::oracle::UOracle;

/// Time step of the tabulated slide integrals.
const SLIDE_DT: f64 = 1e-3;
/// Spacing of recorded samples along a slide.
const SAMPLE_DT: f64 = 0.05;
/// Guard against runaway event loops.
const MAX_EVENTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Start,
    Split,
    SlideSample,
    Jump,
    Truncate,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::Split => "split",
            EventKind::SlideSample => "slide-sample",
            EventKind::Jump => "jump",
            EventKind::Truncate => "truncate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub p: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    Hold,
    Slide,
}

/// The belief on `[t0, t1)`: constant at `p0` or drifting from `p0` toward `p*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub p0: f64,
    pub motion: Motion,
}

/// A sampled càdlàg belief path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefTrajectory {
    pub events: Vec<Event>,
    pub pieces: Vec<Piece>,
    pub horizon: f64,
    #[serde(skip)]
    params: DerivedParams,
}

impl BeliefTrajectory {
    /// Belief at time `t` (right-continuous).
    pub fn at(&self, t: f64) -> f64 {
        let i = self
            .pieces
            .partition_point(|pc| pc.t1 <= t)
            .min(self.pieces.len() - 1);
        let pc = &self.pieces[i];
        match pc.motion {
            Motion::Hold => pc.p0,
            Motion::Slide => self.params.drift(pc.p0, t - pc.t0),
        }
    }
}

fn slide_duration(params: &DerivedParams, from: f64, stop: f64) -> f64 {
    let (a, b) = (from - params.p_star, stop - params.p_star);
    if b == 0.0 || a * b <= 0.0 || b.abs() > a.abs() {
        return f64::INFINITY;
    }
    (a / b).ln() / params.kappa
}

/// Walks the process from `p_init`, calling `emit` for each event and piece.
fn walk(
    policy: &RevelationPolicy,
    p_init: f64,
    horizon: f64,
    rng: &mut ChaCha8Rng,
    mut on_event: impl FnMut(Event),
    mut on_piece: impl FnMut(Piece),
) -> Result<()> {
    let params = *policy.params();
    let (mut t, mut p) = (0.0, p_init);
    on_event(Event {
        t,
        p,
        kind: EventKind::Start,
    });
    for _ in 0..MAX_EVENTS {
        match policy.regime_at(p) {
            Regime::Absorb => {
                on_piece(Piece {
                    t0: t,
                    t1: horizon,
                    p0: p,
                    motion: Motion::Hold,
                });
                break;
            }
            Regime::Split { lo, hi } => {
                p = if rng.random::<f64>() < split_weight(p, lo, hi) { hi } else { lo };
                on_event(Event {
                    t,
                    p,
                    kind: EventKind::Split,
                });
            }
            Regime::Hold { target, intensity } => {
                let wait = if intensity > 0.0 {
                    Exp::new(intensity)
                        .map_err(|e| Error::InvalidArgument(e.to_string()))?
                        .sample(rng)
                } else {
                    f64::INFINITY
                };
                let end = (t + wait).min(horizon);
                on_piece(Piece {
                    t0: t,
                    t1: end,
                    p0: p,
                    motion: Motion::Hold,
                });
                if end >= horizon {
                    break;
                }
                t = end;
                p = target;
                on_event(Event {
                    t,
                    p,
                    kind: EventKind::Jump,
                });
            }
            Regime::Slide { stop } => {
                let end = (t + slide_duration(&params, p, stop)).min(horizon);
                on_piece(Piece {
                    t0: t,
                    t1: end,
                    p0: p,
                    motion: Motion::Slide,
                });
                if end >= horizon {
                    break;
                }
                t = end;
                p = stop;
                on_event(Event {
                    t,
                    p,
                    kind: EventKind::SlideSample,
                });
            }
        }
    }
    Ok(())
}

fn check_inputs(p_init: f64, horizon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_init) {
        return Err(Error::ProbabilityOutOfRange(p_init));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples one belief path on `[0, horizon]`.
pub fn sample_trajectory(policy: &RevelationPolicy, p_init: f64, horizon: f64, seed: u64) -> Result<BeliefTrajectory> {
    check_inputs(p_init, horizon)?;
    let params = *policy.params();
    let mut rng = stream_rng(seed, 0);
    let mut events = Vec::new();
    let mut pieces = Vec::new();
    walk(policy, p_init, horizon, &mut rng, |e| events.push(e), |pc| pieces.push(pc))?;

    // Interleave slide samples and close with a truncation event.
    let mut out: Vec<Event> = Vec::with_capacity(events.len());
    let mut ev = events.into_iter().peekable();
    for pc in &pieces {
        while let Some(e) = ev.next_if(|e| e.t <= pc.t0) {
            out.push(e);
        }
        if pc.motion == Motion::Slide {
            let mut s = pc.t0 + SAMPLE_DT;
            while s < pc.t1 {
                out.push(Event {
                    t: s,
                    p: params.drift(pc.p0, s - pc.t0),
                    kind: EventKind::SlideSample,
                });
                s += SAMPLE_DT;
            }
        }
    }
    out.extend(ev);
    let last = pieces.last().expect("walk emits at least one piece");
    let p_end = match last.motion {
        Motion::Hold => last.p0,
        Motion::Slide => params.drift(last.p0, last.t1 - last.t0),
    };
    out.push(Event {
        t: horizon,
        p: p_end,
        kind: EventKind::Truncate,
    });
    Ok(BeliefTrajectory {
        events: out,
        pieces,
        horizon,
        params,
    })
}

/// Cumulative discounted payoff along a slide that starts at time 0.
struct SlideTable {
    cum: Vec<f64>,
    integrand: Vec<f64>,
}

impl SlideTable {
    fn new(oracle: &UOracle, from: f64, horizon: f64) -> Self {
        let params = oracle.params();
        let steps = (horizon / SLIDE_DT).ceil() as usize + 1;
        let integrand: Vec<f64> = (0..=steps)
            .into_par_iter()
            .map(|k| {
                let s = k as f64 * SLIDE_DT;
                params.r * (-params.r * s).exp() * oracle.u(params.drift(from, s))
            })
            .collect();
        let mut cum = Vec::with_capacity(integrand.len());
        cum.push(0.0);
        for k in 1..integrand.len() {
            cum.push(cum[k - 1] + 0.5 * SLIDE_DT * (integrand[k - 1] + integrand[k]));
        }
        SlideTable { cum, integrand }
    }

    /// Integral over `[0, duration]`.
    fn integral(&self, duration: f64) -> f64 {
        let x = duration / SLIDE_DT;
        let k = (x.floor() as usize).min(self.cum.len() - 2);
        let frac = x - k as f64;
        let (f0, f1) = (self.integrand[k], self.integrand[k + 1]);
        let fm = f0 + frac * (f1 - f0);
        self.cum[k] + 0.5 * frac * SLIDE_DT * (f0 + fm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub num_traj: usize,
    /// Defaults to `12 / r` when `None`.
    pub horizon: Option<f64>,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            num_traj: 10_000,
            horizon: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p_init: f64,
    pub mean: f64,
    pub stderr: f64,
    /// Bound on the discounted payoff beyond the horizon.
    pub tail_bound: f64,
    pub num_traj: usize,
    pub horizon: f64,
}

/// Monte-Carlo estimate of the expected discounted payoff
/// `E[ int_0^H r e^{-rt} u(p_t) dt ]` under the policy.
pub fn estimate_value(policy: &RevelationPolicy, oracle: &UOracle, p_init: f64, opts: &SimOptions) -> Result<Estimate> {
    let params = *policy.params();
    let horizon = opts.horizon.unwrap_or(12.0 / params.r);
    check_inputs(p_init, horizon)?;
    if opts.num_traj == 0 {
        return Err(Error::InvalidArgument("num_traj must be at least 1".into()));
    }
    let mut starts = policy.endpoints();
    starts.push(p_init);
    let tables: HashMap<u64, SlideTable> = starts
        .iter()
        .filter(|&&p| matches!(policy.regime_at(p), Regime::Slide { .. }))
        .map(|&p| (p.to_bits(), SlideTable::new(oracle, p, horizon)))
        .collect();
    let mut hold_u: HashMap<u64, f64> = HashMap::new();
    for p in starts {
        hold_u.insert(p.to_bits(), oracle.u(p));
    }

    let payoffs: Vec<f64> = (0..opts.num_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(opts.seed, i);
            let mut total = 0.0;
            walk(
                policy,
                p_init,
                horizon,
                &mut rng,
                |_| {},
                |pc| {
                    let disc = (-params.r * pc.t0).exp();
                    total += match pc.motion {
                        Motion::Hold => {
                            let u = hold_u.get(&pc.p0.to_bits()).copied().unwrap_or_else(|| oracle.u(pc.p0));
                            u * (disc - (-params.r * pc.t1).exp())
                        }
                        Motion::Slide => {
                            let d = pc.t1 - pc.t0;
                            disc * match tables.get(&pc.p0.to_bits()) {
                                Some(tab) => tab.integral(d),
                                None => SlideTable::new(oracle, pc.p0, d).integral(d),
                            }
                        }
                    };
                },
            )
            .map(|_| total)
        })
        .collect::<Result<_>>()?;

    let n = payoffs.len() as f64;
    let mean = payoffs.iter().sum::<f64>() / n;
    let var = if payoffs.len() > 1 {
        payoffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(Estimate {
        p_init,
        mean,
        stderr: (var / n).sqrt(),
        tail_bound: (-params.r * horizon).exp() * params.max_abs_payoff,
        num_traj: opts.num_traj,
        horizon,
    })
}
