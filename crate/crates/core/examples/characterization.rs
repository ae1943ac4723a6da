// Checks solved value functions against the characterization: concavity,
// the inequality everywhere, and equality at extreme points. A perturbed
// function is rejected.

use revelation::verify::CharTolerances;
use revelation::{catalog, check_characterization, solve_limit_value, PiecewiseValue, Segment, SolveOptions};

pub fn run_example() -> revelation::Result<()> {
    for spec in catalog::all() {
        let sol = solve_limit_value(&spec, &SolveOptions::default())?;
        let report = check_characterization(&sol.value, &sol.oracle, &CharTolerances::for_oracle(&sol.oracle));
        println!(
            "{}: {} (worst inequality {:+.2e} at {:.4}, worst equality residual {:.2e}, kinks {:?})",
            spec.name().unwrap_or("unnamed"),
            if report.pass { "pass" } else { "FAIL" },
            report.g2_worst.1,
            report.g2_worst.0,
            report.g3_worst.1,
            report.kink_locations
        );
    }

    // p/2 - p^2/3 + 0.01 p(1 - p) on the nonrevealing game: still concave,
    // but no longer satisfies the equality.
    let spec = catalog::nonrevealing();
    let sol = solve_limit_value(&spec, &SolveOptions::default())?;
    let bumped = |p: f64| catalog::nonrevealing_value(p) + 0.01 * p * (1.0 - p);
    let bumped_slope = |p: f64| 0.5 - 2.0 * p / 3.0 + 0.01 * (1.0 - 2.0 * p);
    let seg = Segment::sampled(0.0, 1.0, 1e-3, bumped, bumped_slope);
    let pv = PiecewiseValue::new(vec![seg], *sol.value.params(), None)?;
    let report = check_characterization(&pv, &sol.oracle, &CharTolerances::for_oracle(&sol.oracle));
    println!("perturbed nonrevealing value: {}", if report.pass { "pass" } else { "rejected" });
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
