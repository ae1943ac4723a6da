// Value iteration for the game played in stages of length 1/n, compared
// with the continuous-time limit as n grows.

use revelation::verify::OracleOptions;
use revelation::{catalog, compare_to_oracle, discrete_oracle_value, solve_limit_value, SolveOptions};

pub fn run_example() -> revelation::Result<()> {
    let spec = catalog::partial();
    let sol = solve_limit_value(&spec, &SolveOptions::default())?;
    for n in [16.0, 32.0, 64.0, 128.0] {
        let og = discrete_oracle_value(
            &spec,
            &OracleOptions {
                n,
                grid_size: 1001,
                ..Default::default()
            },
        )?;
        println!(
            "n = {n:>3}: {:>5} iterations, contraction {:.5} (modulus {:.5}), sup |v_n - v| = {:.2e}",
            og.iterations,
            og.max_contraction_ratio,
            og.modulus,
            compare_to_oracle(&sol.value, &og)
        );
    }
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
