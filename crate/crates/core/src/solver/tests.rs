use super::*;
use crate::catalog;
use crate::value::Payload;

fn oracle(spec: &GameSpec) -> UOracle {
    UOracle::new(spec).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn slope_sup_partial_at_one_third() {
    let o = oracle(&catalog::partial());
    let s = slope_sup(&o, 1.0 / 3.0, -1.0 / 3.0).unwrap();
    assert!(close(s.a, 1.0, 1e-9), "{s:?}");
    assert_eq!(s.rho, 1.0 / 3.0);
}

#[test]
fn slope_sup_partial_at_half() {
    let o = oracle(&catalog::partial());
    let f = -1.0 / (9.0 * 0.5);
    let s = slope_sup(&o, 0.5, f).unwrap();
    let expected = (6.0 * 0.5 + 1.0) / (9.0 * 0.5 * 1.5);
    // Independent brute force over a fine grid of the closed-form u.
    let brute = (1..=1_000_000)
        .map(|i| 0.5 + 0.5 * i as f64 / 1e6)
        .map(|x| (catalog::partial_u(x) - f) / (x + (x - 0.5)))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(close(brute, expected, 1e-9));
    assert!(close(s.a, expected, 1e-9), "{s:?}");
    assert_eq!(s.rho, 1.0);
}

#[test]
fn slope_sup_variation_b() {
    let o = oracle(&catalog::partial_variation_b());
    let s = slope_sup(&o, 1.0 / 3.0, 0.0).unwrap();
    assert!(close(s.a, 1.0 / 3.0, 1e-9), "{s:?}");
    assert_eq!(s.rho, 1.0);
}

#[test]
fn slope_inf_variation_b() {
    let o = oracle(&catalog::partial_variation_b());
    let s = slope_inf(&o, 1.0 / 3.0, 0.0).unwrap();
    assert!(close(s.a, 2.0 / 3.0, 1e-9), "{s:?}");
    assert!(s.rho.abs() < 1e-12);
}

#[test]
fn slope_inf_constant_game() {
    let spec = GameSpec::new(vec![vec![1.5]], vec![vec![1.5]], 1.0, 1.0, 1.0).unwrap();
    let o = oracle(&spec);
    let s = slope_inf(&o, 0.5, 1.5).unwrap();
    assert_eq!(s.a, 0.0);
}

#[test]
fn slope_domain_errors() {
    let o = oracle(&catalog::partial_variation_b());
    assert!(slope_sup(&o, 1.0, 0.0).is_err());
    assert!(slope_sup(&o, 0.2, 0.0).is_err());
    assert!(slope_inf(&o, 0.0, 0.0).is_err());
    assert!(slope_inf(&o, 0.5, 0.0).is_err());
}

#[test]
fn ode_partial_is_minus_one_over_nine_p() {
    let o = oracle(&catalog::partial());
    let c = solve_nonrevealing(&o, 1.0 / 3.0, -1.0 / 3.0, 0.6, DEFAULT_ODE_STEP).unwrap();
    assert!(close(c.eval(0.5), -2.0 / 9.0, 1e-9));
    for i in 0..=50 {
        let p = 1.0 / 3.0 + (0.6 - 1.0 / 3.0) * i as f64 / 50.0;
        assert!(close(c.eval(p), -1.0 / (9.0 * p), 1e-9), "p={p}");
    }
    assert!(c.p.windows(2).all(|w| w[1] - w[0] <= DEFAULT_ODE_STEP + 1e-15));
}

#[test]
fn ode_variation_a_closed_form() {
    let o = oracle(&catalog::partial_variation_a());
    let c = solve_nonrevealing(&o, 1.0 / 3.0, -2.0 / 15.0, 0.5, DEFAULT_ODE_STEP).unwrap();
    let exact = |p: f64| -(2.0 / 15.0) * 3f64.powf(-0.25) * (4.0 * p - 1.0).powf(-0.25);
    for i in 0..=40 {
        let p = 1.0 / 3.0 + (0.5 - 1.0 / 3.0) * i as f64 / 40.0;
        assert!(close(c.eval(p), exact(p), 1e-9), "p={p}");
    }
}

#[test]
fn ode_constant_is_stationary() {
    let spec = GameSpec::new(vec![vec![0.7, 0.7]], vec![vec![0.7, 0.7]], 2.0, 1.0, 0.5).unwrap();
    let o = oracle(&spec);
    let c = solve_nonrevealing(&o, 0.9, 0.7, 0.4, DEFAULT_ODE_STEP).unwrap();
    assert!(c.v.iter().all(|&v| close(v, 0.7, 1e-14)));
    assert!(c.lo() < c.hi());
}

#[test]
fn ode_rejects_straddling_interval() {
    let o = oracle(&catalog::partial_variation_a());
    assert!(matches!(
        solve_nonrevealing(&o, 0.1, 0.0, 0.5, DEFAULT_ODE_STEP),
        Err(Error::StraddlesInvariant { .. })
    ));
}

/// `phi(p) = (p_k phi(p_k) + int_{p_k}^p u) / p` when `p* = 0`, `mu = 1`.
#[test]
fn ode_matches_explicit_integral() {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        let l = (m - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + m)) + f(m));
        let r = (b - m) / 6.0 * (f(m) + 4.0 * f(0.5 * (m + b)) + f(b));
        if depth == 0 || (l + r - whole).abs() < 15.0 * tol {
            l + r + (l + r - whole) / 15.0
        } else {
            simpson(f, a, m, tol / 2.0, depth - 1) + simpson(f, m, b, tol / 2.0, depth - 1)
        }
    }
    for spec in [catalog::nonrevealing(), catalog::partial()] {
        let o = oracle(&spec);
        let scale = o.params().scale;
        let (pk, vk) = (0.2, o.u(0.2) - 0.05);
        let c = solve_nonrevealing(&o, pk, vk, 0.95, DEFAULT_ODE_STEP).unwrap();
        for i in 1..=15 {
            let p = pk + (0.95 - pk) * i as f64 / 15.0;
            let integral = simpson(&|x| o.u(x), pk, p, 1e-12, 40);
            let exact = (pk * vk + integral) / p;
            assert!(close(c.eval(p), exact, 1e-6 * scale), "p={p}");
        }
    }
}

#[test]
fn switch_partial() {
    let o = oracle(&catalog::partial());
    let (curve, p1) =
        find_regime_switch(&o, Direction::Increasing, 1.0 / 3.0, -1.0 / 3.0, &SolveOptions::default()).unwrap();
    assert!(close(p1, catalog::partial_switch(), 1e-5), "{p1}");
    assert_eq!(curve.hi(), p1);
}

#[test]
fn switch_variation_a() {
    let o = oracle(&catalog::partial_variation_a());
    let (_, p1) =
        find_regime_switch(&o, Direction::Increasing, 1.0 / 3.0, -2.0 / 15.0, &SolveOptions::default()).unwrap();
    assert!(close(p1, 0.385_870_115_02, 1e-4), "{p1}");
}

#[test]
fn switch_nonrevealing_never_happens() {
    let o = oracle(&catalog::nonrevealing());
    let (curve, p1) = find_regime_switch(&o, Direction::Increasing, 0.0, 0.0, &SolveOptions::default()).unwrap();
    assert_eq!(p1, 1.0);
    assert!(close(curve.eval(1.0), 1.0 / 6.0, 1e-8));
}

fn affine(seg: &Segment) -> (f64, f64) {
    match seg.payload {
        Payload::Affine { slope, intercept } => (slope, intercept),
        Payload::Dense(_) => panic!("expected an affine segment"),
    }
}

#[test]
fn increasing_pass_partial() {
    let o = oracle(&catalog::partial());
    let out = increasing_pass(&o, 1.0 / 3.0, -1.0 / 3.0, &SolveOptions::default()).unwrap();
    let kinds: Vec<_> = out.segments.iter().map(|s| s.kind).collect();
    assert_eq!(kinds, [SegmentKind::Nonlinear, SegmentKind::Linear]);
    let pb = catalog::partial_switch();
    let (slope, _) = affine(&out.segments[1]);
    assert!(close(slope, 1.0 / (9.0 * pb * pb), 1e-4));
    assert!(close(out.segments[1].jump_target.unwrap(), pb, 1e-5));
    assert!(out.diagnostics.is_empty());
}

#[test]
fn passes_variation_b() {
    let o = oracle(&catalog::partial_variation_b());
    let opts = SolveOptions::default();
    let up = increasing_pass(&o, 1.0 / 3.0, 0.0, &opts).unwrap();
    assert_eq!(up.segments.len(), 1);
    assert_eq!((up.segments[0].lo, up.segments[0].hi), (1.0 / 3.0, 1.0));
    assert!(close(affine(&up.segments[0]).0, 1.0 / 3.0, 1e-9));

    let down = decreasing_pass(&o, 1.0 / 3.0, 0.0, &opts).unwrap();
    assert_eq!(down.segments.len(), 1);
    let seg = &down.segments[0];
    assert!(seg.lo.abs() < 1e-15 && close(seg.hi, 1.0 / 3.0, 1e-15));
    assert!(close(affine(seg).0, 2.0 / 3.0, 1e-9));
    assert!(close(seg.jump_target.unwrap(), 1.0 / 3.0, 1e-15));
    assert!(close(down.steps[0].a.unwrap(), 2.0 / 3.0, 1e-9));
}

fn sup_error(sol: &Solution, exact: impl Fn(f64) -> f64) -> f64 {
    (0..=1000)
        .map(|i| i as f64 / 1000.0)
        .map(|p| (sol.value.eval(p) - exact(p)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn solve_nonrevealing_game() {
    let sol = solve_limit_value(&catalog::nonrevealing(), &SolveOptions::default()).unwrap();
    assert!(sup_error(&sol, catalog::nonrevealing_value) < 1e-7);
    assert_eq!(sol.value.segments().len(), 1);
    assert!(sol.trace.diagnostics.is_empty(), "{:?}", sol.trace.diagnostics);
}

#[test]
fn solve_revealing_game() {
    let sol = solve_limit_value(&catalog::revealing(), &SolveOptions::default()).unwrap();
    assert!(sup_error(&sol, catalog::revealing_value) < 1e-12);
    assert_eq!((sol.trace.p_tilde0, sol.trace.p0), (0.0, 1.0));
    assert!(sol.trace.increasing.is_empty() && sol.trace.decreasing.is_empty());
}

#[test]
fn solve_partial_game() {
    let sol = solve_limit_value(&catalog::partial(), &SolveOptions::default()).unwrap();
    assert!(sup_error(&sol, catalog::partial_value) < 1e-5);
    let kinds: Vec<_> = sol.value.segments().iter().map(|s| s.kind).collect();
    assert_eq!(
        kinds,
        [SegmentKind::InitialSplit, SegmentKind::Nonlinear, SegmentKind::Linear]
    );
    assert!(sol.trace.diagnostics.is_empty(), "{:?}", sol.trace.diagnostics);
}

#[test]
fn solve_variation_a() {
    let sol = solve_limit_value(&catalog::partial_variation_a(), &SolveOptions::default()).unwrap();
    let segs = sol.value.segments();
    assert_eq!(segs.len(), 3);
    for p in [0.0, 0.1, 0.25, 1.0 / 3.0] {
        assert!(close(segs[0].eval(p), 2.0 / 15.0 * (3.0 * p - 2.0), 1e-6));
    }
    assert!(close(segs[2].lo, 0.385_870_115_02, 1e-4));
    let (slope, intercept) = affine(&segs[2]);
    assert!(close(slope, 0.217_109_338_91, 1e-4));
    assert!(close(intercept, -0.201_770_69, 1e-4));
}

/// On sliding pieces `a(p, w) = mu (u - w) / (p - p*) = w'(p)`.
#[test]
fn sliding_pieces_satisfy_identity() {
    for spec in [catalog::partial(), catalog::partial_variation_a(), catalog::nonrevealing()] {
        let sol = solve_limit_value(&spec, &SolveOptions::default()).unwrap();
        let params = *sol.value.params();
        let tol = Tolerances::for_params(&params);
        for seg in sol.value.segments().iter().filter(|s| s.kind == SegmentKind::Nonlinear) {
            for i in 1..=50 {
                let p = seg.lo + (seg.hi - seg.lo) * i as f64 / 51.0;
                let w = seg.eval(p);
                let ratio = params.mu * (sol.oracle.u(p) - w) / (p - params.p_star);
                let s = slope_sup(&sol.oracle, p, w).unwrap();
                assert!(close(s.a, ratio, tol.eq), "{p}: {} vs {ratio}", s.a);
                assert!(close(seg.deriv(p), ratio, tol.eq), "{p}");
            }
        }
    }
}

/// At the far end of a revealing piece the value is the weighted average of
/// the jump target's value and the stage payoff.
#[test]
fn linear_endpoints_satisfy_hold_identity() {
    for spec in catalog::all() {
        let sol = solve_limit_value(&spec, &SolveOptions::default()).unwrap();
        let params = *sol.value.params();
        let tol = Tolerances::for_params(&params);
        for seg in sol.value.segments().iter().filter(|s| s.kind == SegmentKind::Linear) {
            let near = seg.jump_target.unwrap();
            let far = if (near - seg.lo).abs() < 1e-15 { seg.hi } else { seg.lo };
            let (d_far, d) = ((far - params.p_star).abs(), (far - near).abs());
            let expected =
                (seg.eval(near) * d_far + params.mu * d * sol.oracle.u(far)) / (d_far + params.mu * d);
            assert!(close(seg.eval(far), expected, tol.eq), "{:?}", spec.name());
        }
    }
}

#[test]
fn mirrored_partial_is_reflection() {
    let opts = SolveOptions::default();
    let sol = solve_limit_value(&catalog::partial(), &opts).unwrap();
    let mirrored = solve_limit_value(&catalog::partial().mirrored(), &opts).unwrap();
    assert_eq!(mirrored.value.params().p_star, 1.0);
    assert!(mirrored.trace.increasing.is_empty());
    assert_eq!(mirrored.trace.decreasing.len(), sol.trace.increasing.len());
    for i in 0..=200 {
        let p = i as f64 / 200.0;
        assert!(close(mirrored.value.eval(1.0 - p), sol.value.eval(p), 1e-8), "p={p}");
    }
}

#[test]
fn breakpoints_are_monotone_and_kinds_alternate() {
    for spec in catalog::all() {
        let sol = solve_limit_value(&spec, &SolveOptions::default()).unwrap();
        let up = sol.trace.increasing_breakpoints();
        assert!(up.windows(2).all(|w| w[0] < w[1]));
        let down = sol.trace.decreasing_breakpoints();
        assert!(down.windows(2).all(|w| w[0] > w[1]));
        for steps in [&sol.trace.increasing, &sol.trace.decreasing] {
            assert!(steps.windows(2).all(|w| w[0].kind != w[1].kind));
        }
    }
}

#[test]
fn options_are_validated() {
    let bad = SolveOptions {
        ode_step: 0.0,
        ..Default::default()
    };
    assert!(solve_limit_value(&catalog::partial(), &bad).is_err());
}
