//! The one-shot value curve `u(p)` as an evaluable, cached oracle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{DerivedParams, GameSpec};
use crate::matrix_game::matrix_value;

/// Default number of uniform samples.
pub const DEFAULT_RESOLUTION: usize = 1025;

/// Slope jumps larger than this fraction of the Lipschitz bound are kinks.
const KINK_FRACTION: f64 = 0.05;
/// Kink flags closer than this are one kink.
const KINK_CLUSTER: f64 = 1e-4;
const MIN_WIDTH: f64 = 1e-9;

/// Value of the one-shot game when neither player observes the state.
pub fn eval_u(spec: &GameSpec, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    matrix_value(&spec.mixed_matrix(p))
}

/// `p -> u(p)` with an append-only sample cache.
///
/// The cache is a sorted list of exact evaluations: a uniform grid plus
/// adaptive bisection wherever linear interpolation between neighbours could
/// be off by more than `refine_tol`.
#[derive(Debug, Clone)]
pub struct UOracle {
    spec: GameSpec,
    params: DerivedParams,
    samples: Vec<(f64, f64)>,
    kinks: Vec<f64>,
    refine_tol: f64,
}

impl UOracle {
    /// Builds the oracle with the default grid and tolerance.
    pub fn new(spec: &GameSpec) -> Result<Self> {
        let params = spec.derived();
        Self::build(spec, DEFAULT_RESOLUTION, 1e-6 * params.scale)
    }

    pub fn build(spec: &GameSpec, resolution: usize, refine_tol: f64) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!("resolution must be >= 2, got {resolution}")));
        }
        if !(refine_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("refine_tol must be positive, got {refine_tol}")));
        }
        let params = spec.derived();
        let last = (resolution - 1) as f64;
        let grid: Vec<(f64, f64)> = (0..resolution)
            .into_par_iter()
            .map(|i| {
                let p = i as f64 / last;
                matrix_value(&spec.mixed_matrix(p)).map(|u| (p, u))
            })
            .collect::<Result<_>>()?;

        let lipschitz = params.lipschitz_u;
        let inserted: Vec<Vec<(f64, f64)>> = grid
            .par_windows(2)
            .map(|w| {
                let mut out = Vec::new();
                bisect(spec, lipschitz, refine_tol, w[0], w[1], 0, &mut out);
                out
            })
            .collect();

        let mut samples = Vec::with_capacity(grid.len() + inserted.iter().map(Vec::len).sum::<usize>());
        for (i, s) in grid.iter().enumerate() {
            samples.push(*s);
            if let Some(extra) = inserted.get(i) {
                samples.extend_from_slice(extra);
            }
        }
        let mut oracle = UOracle {
            spec: spec.clone(),
            params,
            samples,
            kinks: Vec::new(),
            refine_tol,
        };
        oracle.detect_kinks();
        Ok(oracle)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn refine_tol(&self) -> f64 {
        self.refine_tol
    }

    pub fn lipschitz(&self) -> f64 {
        self.params.lipschitz_u
    }

    /// Cached `(p, u(p))` pairs, sorted by `p`, covering `[0, 1]`.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn kink_candidates(&self) -> &[f64] {
        &self.kinks
    }

    /// Exact evaluation. `p` is clamped into `[0, 1]`.
    pub fn u(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        matrix_value(&self.spec.mixed_matrix(p)).expect("validated spec")
    }

    /// Piecewise-linear interpolation of the cache.
    pub fn interp(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let i = self.samples.partition_point(|s| s.0 < p);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let (a, ua) = self.samples[i - 1];
        let (b, ub) = self.samples[i];
        if b == a {
            return ub;
        }
        ua + (ub - ua) * (p - a) / (b - a)
    }

    /// One-sided difference quotient of `u` at `p` in direction `sign` (+1 or -1).
    pub fn one_sided_slope(&self, p: f64, sign: f64) -> f64 {
        let h = 1e-7;
        let q = (p + sign * h).clamp(0.0, 1.0);
        let q2 = (p + sign * 2.0 * h).clamp(0.0, 1.0);
        if q == p {
            return 0.0;
        }
        // Second-order one-sided formula.
        let (u0, u1, u2) = (self.u(p), self.u(q), self.u(q2));
        if q2 == q {
            return (u1 - u0) / (q - p);
        }
        (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * (q - p))
    }

    /// Adds `count` exact samples spread uniformly over `[center - half, center + half]`.
    pub fn refine_around(&mut self, center: f64, half: f64, count: usize) {
        let lo = (center - half).max(0.0);
        let hi = (center + half).min(1.0);
        if hi <= lo || count == 0 {
            return;
        }
        let new: Vec<(f64, f64)> = (0..=count)
            .map(|i| {
                let p = lo + (hi - lo) * i as f64 / count as f64;
                (p, self.u(p))
            })
            .collect();
        self.insert(new);
    }

    fn insert(&mut self, mut new: Vec<(f64, f64)>) {
        self.samples.append(&mut new);
        self.samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.samples.dedup_by(|a, b| a.0 == b.0);
        self.detect_kinks();
    }

    fn detect_kinks(&mut self) {
        self.kinks.clear();
        let threshold = KINK_FRACTION * self.params.lipschitz_u;
        if threshold <= 0.0 || self.samples.len() < 3 {
            return;
        }
        let slopes: Vec<f64> = self
            .samples
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        let mut cluster: Option<(f64, f64)> = None;
        for (i, s) in slopes.windows(2).enumerate() {
            let jump = (s[1] - s[0]).abs();
            if jump <= threshold {
                continue;
            }
            let p = self.samples[i + 1].0;
            cluster = match cluster {
                Some((q, best)) if p - q < KINK_CLUSTER => {
                    if jump > best {
                        // keep the location with the biggest jump
                        self.kinks.pop();
                        self.kinks.push(p);
                        Some((p, jump))
                    } else {
                        Some((q, best))
                    }
                }
                _ => {
                    self.kinks.push(p);
                    Some((p, jump))
                }
            };
        }
    }
}

fn bisect(
    spec: &GameSpec,
    lipschitz: f64,
    tol: f64,
    a: (f64, f64),
    b: (f64, f64),
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) {
    let width = b.0 - a.0;
    // Interpolation error is at most L * width / 2.
    if lipschitz * width * 0.5 <= tol || width < MIN_WIDTH || depth > 40 {
        return;
    }
    let m = 0.5 * (a.0 + b.0);
    let um = matrix_value(&spec.mixed_matrix(m)).expect("validated spec");
    if (um - 0.5 * (a.1 + b.1)).abs() <= tol {
        return;
    }
    let mid = (m, um);
    bisect(spec, lipschitz, tol, a, mid, depth + 1, out);
    out.push(mid);
    bisect(spec, lipschitz, tol, mid, b, depth + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog as examples;
    use proptest::prelude::*;

    #[test]
    fn paper_values() {
        assert!((eval_u(&examples::nonrevealing(), 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert!((eval_u(&examples::revealing(), 0.5).unwrap() + 0.25).abs() < 1e-15);
        assert!(eval_u(&examples::partial(), 0.5).unwrap().abs() < 1e-15);
        assert!(eval_u(&examples::partial(), 1.5).is_err());
    }

    #[test]
    fn partial_matches_closed_form() {
        let spec = examples::partial();
        for i in 0..=200 {
            let p = i as f64 / 200.0;
            let expected = examples::partial_u(p);
            assert!((eval_u(&spec, p).unwrap() - expected).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn kinks_of_partial() {
        let o = UOracle::new(&examples::partial()).unwrap();
        let k = o.kink_candidates();
        assert_eq!(k.len(), 2, "{k:?}");
        assert!((k[0] - 1.0 / 3.0).abs() < 1e-4);
        assert!((k[1] - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn smooth_curve_has_no_kinks() {
        let o = UOracle::new(&examples::nonrevealing()).unwrap();
        assert!(o.kink_candidates().is_empty());
    }

    #[test]
    fn constant_payoffs_need_two_samples() {
        let spec = GameSpec::new(vec![vec![2.0, 2.0]], vec![vec![2.0, 2.0]], 1.0, 1.0, 1.0).unwrap();
        let o = UOracle::build(&spec, 2, 1e-6).unwrap();
        assert_eq!(o.samples().len(), 2);
        assert_eq!(o.interp(0.3), 2.0);
    }

    #[test]
    fn interpolation_within_tolerance() {
        let o = UOracle::new(&examples::partial()).unwrap();
        for i in 0..5000 {
            let p = (i as f64 + 0.37) / 5000.0;
            assert!((o.interp(p) - o.u(p)).abs() < 2.0 * o.refine_tol() + 1e-12, "p={p}");
        }
    }

    #[test]
    fn cache_is_sorted_and_bounded() {
        let o = UOracle::new(&examples::partial()).unwrap();
        let (lo, hi) = (-2.0, 2.0);
        for w in o.samples().windows(2) {
            assert!(w[0].0 < w[1].0);
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!(slope.abs() <= o.lipschitz() + 1e-9);
        }
        assert!(o.samples().iter().all(|s| s.1 >= lo && s.1 <= hi));
    }

    proptest! {
        #[test]
        fn lipschitz_on_random_pairs(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let spec = examples::partial();
            let l = spec.derived().lipschitz_u;
            let (up, uq) = (eval_u(&spec, p).unwrap(), eval_u(&spec, q).unwrap());
            prop_assert!((up - uq).abs() <= l * (p - q).abs() + 1e-12);
        }

        #[test]
        fn frozen_column_strategy_is_affine_upper_bound(p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let spec = examples::partial();
            let sol = crate::matrix_game::matrix_game_value(&spec.mixed_matrix(p)).unwrap();
            let bound_at = |x: f64| sol.col_guarantee(&spec.mixed_matrix(x));
            prop_assert!((bound_at(p) - sol.value).abs() < 1e-9);
            prop_assert!(bound_at(q) >= eval_u(&spec, q).unwrap() - 1e-9);
        }
    }
}
