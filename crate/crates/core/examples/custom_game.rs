// Reads a game from JSON, solves it, and writes the solution and a CSV of
// the value curve next to each other in a scratch directory.

use std::path::PathBuf;

use revelation::io::{csv_string, read_spec, write_json, SolutionFile};
use revelation::{solve_limit_value, SolveOptions};

pub fn run_example() -> revelation::Result<()> {
    let input = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/games/variation_a.json");
    let (spec, params) = read_spec(&input)?;
    println!("read {}: p* = {:.4}, mu = {:.4}", input.display(), params.p_star, params.mu);

    let sol = solve_limit_value(&spec, &SolveOptions::default())?;
    let out = std::env::temp_dir().join("revelation-custom-game");
    std::fs::create_dir_all(&out)?;
    write_json(&out.join("solution.json"), &SolutionFile::new(&sol, spec.name()))?;
    let rows = (0..=100).map(|i| {
        let p = i as f64 / 100.0;
        (vec![p, sol.value.eval(p)], None)
    });
    std::fs::write(out.join("value.csv"), csv_string(&["p", "v"], rows))?;
    println!("wrote solution.json and value.csv to {}", out.display());

    // The stored solution reproduces the value function.
    let back = SolutionFile::read(&out.join("solution.json"))?.to_value(&params)?;
    assert!((back.eval(0.9) - sol.value.eval(0.9)).abs() < 1e-12);
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
