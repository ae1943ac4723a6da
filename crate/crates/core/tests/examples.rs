//! Every example runs to completion, and every game file in
//! `examples/games` solves to its recorded value curve.

use std::fs;
use std::path::PathBuf;

use revelation::io::read_spec;
use revelation::{solve_limit_value, SolveOptions};

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(solve_games);
example!(matrix_game);
example!(concavify);
example!(regime_switch);
example!(characterization);
example!(discrete_oracle);
example!(simulate);
example!(custom_game);

#[test]
fn examples_run() {
    solve_games::run_example().unwrap();
    matrix_game::run_example().unwrap();
    concavify::run_example().unwrap();
    regime_switch::run_example().unwrap();
    characterization::run_example().unwrap();
    discrete_oracle::run_example().unwrap();
    simulate::run_example().unwrap();
    custom_game::run_example().unwrap();
}

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/games")
}

#[test]
fn game_files_match_recorded_values() {
    for name in ["example1", "example2", "example3", "variation_a", "variation_b"] {
        let (spec, _) = read_spec(&games_dir().join(format!("{name}.json"))).unwrap();
        let sol = solve_limit_value(&spec, &SolveOptions::default()).unwrap();
        let text = fs::read_to_string(games_dir().join(format!("{name}.expected.csv"))).unwrap();
        let mut worst = 0.0f64;
        for line in text.lines().skip(1) {
            let mut cols = line.split(',').map(|c| c.parse::<f64>().unwrap());
            let (p, v) = (cols.next().unwrap(), cols.next().unwrap());
            worst = worst.max((sol.value.eval(p) - v).abs());
        }
        assert!(worst <= 1e-4, "{name}: sup error {worst:.3e}");
    }
}
