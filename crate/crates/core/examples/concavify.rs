// The one-shot value curve, its concave envelope, and the affine piece the
// solver starts from.

use revelation::{catalog, initial_interval, initial_segment, upper_concave_envelope, UOracle};

pub fn run_example() -> revelation::Result<()> {
    for spec in [catalog::revealing(), catalog::partial(), catalog::partial_variation_a()] {
        let params = spec.derived();
        let mut oracle = UOracle::new(&spec)?;
        let env = upper_concave_envelope(&mut oracle);
        let (lo, hi) = initial_interval(&env, &params);
        let init = initial_segment(&oracle, &params, lo, hi);
        println!("{}:", spec.name().unwrap_or("unnamed"));
        println!("  hull vertices: {}", env.vertices.len());
        for &(a, b) in &env.gaps {
            println!("  u < cav u on ({a:.6}, {b:.6})");
        }
        println!(
            "  start on [{:.6}, {:.6}] with slope {:+.6}, intercept {:+.6}",
            init.p_tilde0, init.p0, init.slope, init.intercept
        );
        for p in [0.1, 0.5, 0.9] {
            println!("  p = {p}: u = {:+.6}, cav u = {:+.6}", oracle.u(p), env.eval(p));
        }
    }
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
