//! Reading specs and solutions, writing CSV and JSON artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::envelope::InitialSegment;
use crate::error::{Error, Result};
use crate::game::{DerivedParams, GameSpec};
use crate::solver::{AlgorithmTrace, Solution};
use crate::value::{PiecewiseValue, Segment, SegmentRecord};

pub fn read_spec(path: &Path) -> Result<(GameSpec, DerivedParams)> {
    GameSpec::from_json(&fs::read_to_string(path)?)
}

/// On-disk form of a solved value function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p_star: f64,
    pub mu: f64,
    pub initialization: InitialSegment,
    pub segments: Vec<SegmentRecord>,
    pub trace: AlgorithmTrace,
}

impl SolutionFile {
    pub fn new(sol: &Solution, name: Option<&str>) -> Self {
        let params = sol.value.params();
        SolutionFile {
            name: name.map(str::to_owned),
            p_star: params.p_star,
            mu: params.mu,
            initialization: sol.initialization,
            segments: sol.value.segments().iter().map(SegmentRecord::from).collect(),
            trace: sol.trace.clone(),
        }
    }

    /// Rebuilds the value function; `params` must come from the same game.
    pub fn to_value(&self, params: &DerivedParams) -> Result<PiecewiseValue> {
        let tol = 1e-12;
        if (self.p_star - params.p_star).abs() > tol || (self.mu - params.mu).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "solution was computed for p* = {}, mu = {} but the game has p* = {}, mu = {}",
                self.p_star, self.mu, params.p_star, params.mu
            )));
        }
        let segments = self
            .segments
            .iter()
            .cloned()
            .map(Segment::try_from)
            .collect::<Result<Vec<_>>>()?;
        let init = &self.initialization;
        let anchor = init.is_anchor().then_some((init.p0, init.intercept));
        PiecewiseValue::new(segments, *params, anchor)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Full-precision scientific notation (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders rows of numbers, with an optional trailing text column.
pub fn csv_string<'a>(header: &[&str], rows: impl IntoIterator<Item = (Vec<f64>, Option<&'a str>)>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for (nums, tag) in rows {
        let mut line = nums.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(",");
        if let Some(tag) = tag {
            let _ = write!(line, ",{tag}");
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::solver::{solve_limit_value, SolveOptions};

    #[test]
    fn solution_round_trip() {
        let spec = catalog::partial();
        let sol = solve_limit_value(&spec, &SolveOptions::default()).unwrap();
        let file = SolutionFile::new(&sol, spec.name());
        let text = serde_json::to_string(&file).unwrap();
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let pv = back.to_value(&spec.derived()).unwrap();
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            assert_eq!(pv.eval(p), sol.value.eval(p));
        }
        assert!(back.to_value(&catalog::partial_variation_a().derived()).is_err());
    }

    #[test]
    fn csv_full_precision() {
        let text = csv_string(&["p", "v"], [(vec![0.1, 1.0 / 3.0], None), (vec![1.0, -0.0], Some("x"))]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,v");
        let third: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
        assert!(lines[2].ends_with(",x"));
    }
}
