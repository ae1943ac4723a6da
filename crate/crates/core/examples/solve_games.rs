// Solves the five reference games and prints the piece structure of each
// limit value function.

use revelation::{catalog, solve_limit_value, Segment, SegmentKind, SolveOptions};

fn describe(seg: &Segment) -> String {
    let kind = match seg.kind {
        SegmentKind::InitialSplit => "split around p*",
        SegmentKind::Linear => "revealing (affine)",
        SegmentKind::Nonlinear => "nonrevealing (ODE)",
    };
    format!("[{:.6}, {:.6}] {kind}", seg.lo, seg.hi)
}

pub fn run_example() -> revelation::Result<()> {
    for spec in catalog::all() {
        let sol = solve_limit_value(&spec, &SolveOptions::default())?;
        let params = sol.value.params();
        println!(
            "{}: p* = {:.4}, mu = {:.4}",
            spec.name().unwrap_or("unnamed"),
            params.p_star,
            params.mu
        );
        for seg in sol.value.segments() {
            println!("  {}", describe(seg));
        }
        let samples: Vec<String> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&p| format!("v({p}) = {:+.6}", sol.value.eval(p)))
            .collect();
        println!("  {}", samples.join(", "));
    }
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
