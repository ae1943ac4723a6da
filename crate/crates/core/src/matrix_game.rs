//! Zero-sum matrix games: value and optimal mixed strategies.
//!
//! General games are solved with a dense tableau simplex (Bland's rule, so
//! the pivot sequence and therefore the returned strategies are a pure
//! function of the input). 2x2 games use the classical closed form.

use serde::Serialize;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;

/// Value of a zero-sum game together with certifying strategies.
///
/// The row player maximizes, the column player minimizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
}

impl MatrixGameSolution {
    /// Worst payoff the row strategy can be held to.
    pub fn row_guarantee(&self, m: &[Vec<f64>]) -> f64 {
        (0..m[0].len())
            .map(|j| m.iter().zip(&self.row_strategy).map(|(row, x)| x * row[j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Best payoff the row player can get against the column strategy.
    pub fn col_guarantee(&self, m: &[Vec<f64>]) -> f64 {
        m.iter()
            .map(|row| row.iter().zip(&self.col_strategy).map(|(a, y)| a * y).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_matrix(m: &[Vec<f64>]) -> Result<(usize, usize)> {
    if m.is_empty() || m[0].is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let cols = m[0].len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::RaggedMatrix {
                row: i,
                expected: cols,
                found: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "matrix game" });
        }
    }
    Ok((m.len(), cols))
}

/// Solves the matrix game `m` (rows maximize).
pub fn matrix_game_value(m: &[Vec<f64>]) -> Result<MatrixGameSolution> {
    let (rows, cols) = check_matrix(m)?;
    if rows == 2 && cols == 2 {
        if let Some(sol) = solve_2x2(m) {
            return Ok(sol);
        }
    }
    solve_simplex(m)
}

/// Value only; skips strategy bookkeeping on the 2x2 path.
pub fn matrix_value(m: &[Vec<f64>]) -> Result<f64> {
    let (rows, cols) = check_matrix(m)?;
    if rows == 2 && cols == 2 {
        if let Some(v) = value_2x2(m[0][0], m[0][1], m[1][0], m[1][1]) {
            return Ok(v);
        }
    }
    solve_simplex(m).map(|s| s.value)
}

fn value_2x2(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    // Pure saddle: maximin equals minimax.
    let maximin = a.min(b).max(c.min(d));
    let minimax = a.max(c).min(b.max(d));
    if maximin == minimax {
        return Some(maximin);
    }
    let denom = a - b - c + d;
    if denom == 0.0 {
        return None;
    }
    Some((a * d - b * c) / denom)
}

/// Closed-form solution of a 2x2 game. Returns `None` only for the
/// numerically degenerate case, where the caller falls back to the simplex.
pub fn solve_2x2(m: &[Vec<f64>]) -> Option<MatrixGameSolution> {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    // First saddle point in row-major order.
    for i in 0..2 {
        for j in 0..2 {
            let x = m[i][j];
            let row_min = m[i][0].min(m[i][1]);
            let col_max = m[0][j].max(m[1][j]);
            if x == row_min && x == col_max {
                let mut row_strategy = vec![0.0; 2];
                let mut col_strategy = vec![0.0; 2];
                row_strategy[i] = 1.0;
                col_strategy[j] = 1.0;
                return Some(MatrixGameSolution {
                    value: x,
                    row_strategy,
                    col_strategy,
                });
            }
        }
    }
    let denom = a - b - c + d;
    if denom == 0.0 {
        return None;
    }
    let x1 = ((d - c) / denom).clamp(0.0, 1.0);
    let y1 = ((d - b) / denom).clamp(0.0, 1.0);
    Some(MatrixGameSolution {
        value: (a * d - b * c) / denom,
        row_strategy: vec![x1, 1.0 - x1],
        col_strategy: vec![y1, 1.0 - y1],
    })
}

/// Dense tableau simplex on the column player's problem
/// `max sum(y) s.t. M' y <= 1, y >= 0` with `M' = M - min(M) + 1 > 0`.
/// The optimal dual gives the row strategy.
pub fn solve_simplex(m: &[Vec<f64>]) -> Result<MatrixGameSolution> {
    let (rows, cols) = check_matrix(m)?;
    let min = m.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;

    let width = cols + rows + 1;
    let rhs = width - 1;
    // Constraint rows followed by the objective row.
    let mut t = vec![vec![0.0; width]; rows + 1];
    for i in 0..rows {
        for j in 0..cols {
            t[i][j] = m[i][j] + shift;
        }
        t[i][cols + i] = 1.0;
        t[i][rhs] = 1.0;
    }
    t[rows][..cols].fill(-1.0);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    let max_pivots = 50 * (rows + cols) + 1000;
    let mut pivots = 0;
    // Bland: lowest-index improving column.
    while let Some(enter) = (0..rhs).find(|&j| t[rows][j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..rows {
            let coef = t[i][enter];
            if coef > PIVOT_EPS {
                let ratio = t[i][rhs] / coef;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // Bounded: every entry of M' is positive, so some ratio exists.
        let Some(leave) = leave else {
            return Err(Error::Lp("unbounded tableau".into()));
        };
        pivot(&mut t, leave, enter);
        basis[leave] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Lp("pivot limit exceeded".into()));
        }
    }

    let z = t[rows][rhs];
    if !(z > 0.0) {
        return Err(Error::Lp(format!("non-positive objective {z}")));
    }
    let mut col_strategy = vec![0.0; cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            col_strategy[b] = t[i][rhs];
        }
    }
    let mut row_strategy: Vec<f64> = (0..rows).map(|i| t[rows][cols + i]).collect();
    normalize(&mut col_strategy);
    normalize(&mut row_strategy);
    Ok(MatrixGameSolution {
        value: 1.0 / z - shift,
        row_strategy,
        col_strategy,
    })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for x in t[row].iter_mut() {
        *x /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
        }
    }
}

fn normalize(v: &mut [f64]) {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn simplex_ok(m: &[Vec<f64>], sol: &MatrixGameSolution) {
        let scale = m.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
        assert!((sol.row_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((sol.col_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(sol.row_strategy.iter().chain(&sol.col_strategy).all(|&x| x >= 0.0));
        assert!(sol.row_guarantee(m) >= sol.value - 1e-9 * scale);
        assert!(sol.col_guarantee(m) <= sol.value + 1e-9 * scale);
    }

    #[test]
    fn half_identity() {
        let m = vec![vec![0.5, 0.0], vec![0.0, 0.5]];
        let s = matrix_game_value(&m).unwrap();
        assert!((s.value - 0.25).abs() < 1e-15);
        assert_eq!(s.row_strategy, vec![0.5, 0.5]);
        let s = solve_simplex(&m).unwrap();
        assert!((s.value - 0.25).abs() < 1e-12);
        assert!((s.row_strategy[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_one_two() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        assert!((matrix_game_value(&m).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
        assert!((solve_simplex(&m).unwrap().value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_game() {
        let m = vec![vec![-1.5; 3]; 4];
        let s = matrix_game_value(&m).unwrap();
        assert_eq!(s.value, -1.5);
        simplex_ok(&m, &s);
    }

    #[test]
    fn rock_paper_scissors() {
        let m = vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]];
        let s = matrix_game_value(&m).unwrap();
        assert!(s.value.abs() < 1e-12);
        for x in s.row_strategy.iter().chain(&s.col_strategy) {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn skewed_three_by_three() {
        let m = vec![vec![0.0, 2.0, -1.0], vec![-1.0, 0.0, 1.0], vec![1.0, -1.0, 0.0]];
        let s = matrix_game_value(&m).unwrap();
        assert!((s.value - 1.0 / 12.0).abs() < 1e-12);
        simplex_ok(&m, &s);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matrix_game_value(&[vec![1.0, f64::NAN]]).is_err());
        assert!(matrix_game_value(&[]).is_err());
    }

    #[test]
    fn deterministic() {
        let m = vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let a = solve_simplex(&m).unwrap();
        let b = solve_simplex(&m).unwrap();
        assert_eq!(a, b);
        simplex_ok(&m, &a);
    }

    fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, cols), rows)
    }

    proptest! {
        #[test]
        fn simplex_certifies(m in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
            let s = solve_simplex(&m).unwrap();
            simplex_ok(&m, &s);
        }

        #[test]
        fn closed_form_agrees_with_simplex(m in matrix(2, 2)) {
            let a = matrix_game_value(&m).unwrap();
            let b = solve_simplex(&m).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-9);
            simplex_ok(&m, &a);
        }

        #[test]
        fn transpose_negation_duality(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
            let rows = m.len();
            let cols = m[0].len();
            let dual: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| -m[i][j]).collect()).collect();
            let v = matrix_game_value(&m).unwrap().value;
            let w = matrix_game_value(&dual).unwrap().value;
            prop_assert!((v + w).abs() < 1e-9);
        }
    }
}
