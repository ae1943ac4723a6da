// Values and optimal strategies of one-shot zero-sum games, including the
// mixed game the uninformed player faces at a given belief.

use revelation::{catalog, matrix_game_value};

pub fn run_example() -> revelation::Result<()> {
    let pennies = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
    let rps = vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]];
    let saddle = vec![vec![3.0, 1.0, 4.0], vec![2.0, 0.0, -1.0]];
    for (name, m) in [("matching pennies", pennies), ("rock-paper-scissors", rps), ("saddle point", saddle)] {
        let sol = matrix_game_value(&m)?;
        println!(
            "{name}: value {:+.4}, row {:?}, col {:?}",
            sol.value, sol.row_strategy, sol.col_strategy
        );
        // Both strategies certify the value.
        assert!((sol.row_guarantee(&m) - sol.value).abs() < 1e-9);
        assert!((sol.col_guarantee(&m) - sol.value).abs() < 1e-9);
    }

    let spec = catalog::partial();
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let sol = matrix_game_value(&spec.mixed_matrix(p))?;
        println!("partial game at p = {p}: u = {:+.6}", sol.value);
    }
    Ok(())
}

fn main() -> revelation::Result<()> {
    run_example()
}
