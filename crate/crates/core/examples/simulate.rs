// Samples the belief process under the optimal revelation policy and
// estimates the discounted payoff by Monte Carlo.

use revelation::sim::Regime;
use revelation::{build_policy, catalog, estimate_value, sample_trajectory, solve_limit_value, SimOptions, SolveOptions};

pub fn run_example() -> revelation::Result<()> {
    let spec = catalog::partial();
    let sol = solve_limit_value(&spec, &SolveOptions::default())?;
    let policy = build_policy(&sol.value);

    for p in [0.2, 0.4, 1.0] {
        let regime = match policy.regime_at(p) {
            Regime::Absorb => "stay at p*".to_string(),
            Regime::Split { lo, hi } => format!("split to {lo:.4} or {hi:.4}"),
            Regime::Slide { stop } => format!("reveal nothing, drift to {stop:.4}"),
            Regime::Hold { target, intensity } => format!("hold, jump to {target:.4} at rate {intensity:.4}"),
        };
        println!("at p = {p}: {regime}");
    }

    let traj = sample_trajectory(&policy, 1.0, 3.0, 42)?;
    println!("one path from p = 1:");
    for e in traj.events.iter().filter(|e| e.kind.as_str() != "slide-sample") {
        println!("  t = {:.4}  p = {:.4}  {}", e.t, e.p, e.kind.as_str());
    }

    let opts = SimOptions {
        num_traj: 20_000,
        ..Default::default()
    };
    for p in [0.3, 0.6, 1.0] {
        let e = estimate_value(&policy, &sol.oracle, p, &opts)?;
        println!(
            "p = {p}: Monte Carlo {:+.5} +- {:.5}, solver {:+.5}",
            e.mean,
            e.stderr,
            sol.value.eval(p)
        );
    }
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
