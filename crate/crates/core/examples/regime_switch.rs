// The building blocks of the construction on the partial-revelation game:
// the steepest revealing slope from a point, the nonrevealing ODE, and the
// belief at which the ODE gives way to revelation.

use revelation::solver::{find_regime_switch, slope_sup, solve_nonrevealing, Direction};
use revelation::{catalog, initial_interval, initial_segment, upper_concave_envelope, SolveOptions, UOracle};

pub fn run_example() -> revelation::Result<()> {
    let spec = catalog::partial();
    let params = spec.derived();
    let mut oracle = UOracle::new(&spec)?;
    let env = upper_concave_envelope(&mut oracle);
    let (lo, hi) = initial_interval(&env, &params);
    // The construction starts at the right end of the initial affine piece.
    let init = initial_segment(&oracle, &params, lo, hi);
    let (start, w_start) = (init.p0, init.value(init.p0));

    let s = slope_sup(&oracle, start, w_start)?;
    println!("from p = {start:.6}: steepest slope {:+.6}, attained at {:.6}", s.a, s.rho);

    let curve = solve_nonrevealing(&oracle, start, w_start, 1.0, 1e-3)?;
    println!(
        "ODE to p = 1: {} samples, phi(1) = {:+.6}",
        curve.len(),
        curve.eval(1.0)
    );

    let (curve, switch) = find_regime_switch(&oracle, Direction::Increasing, start, w_start, &SolveOptions::default())?;
    println!(
        "switch at {switch:.9} (closed form {:.9}), phi there {:+.6}",
        catalog::partial_switch(),
        curve.eval(switch)
    );
    let after = slope_sup(&oracle, switch, curve.eval(switch))?;
    println!("beyond the switch the value is affine with slope {:+.6}", after.a);
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
