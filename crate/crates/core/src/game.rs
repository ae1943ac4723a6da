//! Game specification and its continuous / discrete-time parameterizations.
//!
//! A game is two payoff matrices (one per state) together with the switching
//! rates of the underlying two-state chain and the discount rate. The
//! informed player (rows, maximizer) observes the state, the column player
//! only holds a belief `p` that the state is `s1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major payoff matrix.
pub type Matrix = Vec<Vec<f64>>;

/// Game description exactly as it appears in a spec file.
///
/// Unknown keys are rejected so that typos in hand-written specs surface as
/// errors instead of silently falling back to defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGame {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub matrix_s1: Matrix,
    pub matrix_s2: Matrix,
    pub lambda1: f64,
    pub lambda2: f64,
    pub r: f64,
}

/// A validated game. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    name: Option<String>,
    matrix_s1: Matrix,
    matrix_s2: Matrix,
    lambda1: f64,
    lambda2: f64,
    r: f64,
}

/// Quantities derived from a [`GameSpec`] that the solver uses everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Invariant probability of `s1`.
    pub p_star: f64,
    /// Discount rate relative to the total switching rate.
    pub mu: f64,
    /// Upper bound on the Lipschitz constant of the one-shot value `u`.
    pub lipschitz_u: f64,
    /// Payoff range used to scale every absolute tolerance.
    pub scale: f64,
    /// Largest absolute payoff entry.
    pub max_abs_payoff: f64,
    /// Total switching rate `lambda1 + lambda2`.
    pub kappa: f64,
    pub r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Per-stage probabilities of the game played with stage length `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteParams {
    pub n: f64,
    /// Weight of the current stage payoff, `1 - exp(-r/n)`.
    pub delta: f64,
    /// Probability of leaving `s1` during one stage.
    pub pi1: f64,
    /// Probability of leaving `s2` during one stage.
    pub pi2: f64,
}

fn dims(name: &'static str, m: &Matrix) -> Result<(usize, usize)> {
    let rows = m.len();
    if rows == 0 || m[0].is_empty() {
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
            return Err(Error::NonFinite { what: name });
        }
    }
    Ok((rows, cols))
}

/// Validates a raw description and computes its derived parameters.
pub fn validate_spec(raw: RawGame) -> Result<(GameSpec, DerivedParams)> {
    let s1 = dims("matrix_s1", &raw.matrix_s1)?;
    let s2 = dims("matrix_s2", &raw.matrix_s2)?;
    if s1 != s2 {
        return Err(Error::DimensionMismatch { s1, s2 });
    }
    for (name, value) in [("lambda1", raw.lambda1), ("lambda2", raw.lambda2), ("r", raw.r)] {
        if !value.is_finite() {
            return Err(Error::NonFinite { what: name });
        }
    }
    if raw.lambda1 < 0.0 {
        return Err(Error::NegativeRate {
            name: "lambda1",
            value: raw.lambda1,
        });
    }
    if raw.lambda2 < 0.0 {
        return Err(Error::NegativeRate {
            name: "lambda2",
            value: raw.lambda2,
        });
    }
    if raw.lambda1 + raw.lambda2 <= 0.0 {
        return Err(Error::DegenerateChain);
    }
    if raw.r <= 0.0 {
        return Err(Error::NonPositiveDiscount(raw.r));
    }
    let spec = GameSpec {
        name: raw.name,
        matrix_s1: raw.matrix_s1,
        matrix_s2: raw.matrix_s2,
        lambda1: raw.lambda1,
        lambda2: raw.lambda2,
        r: raw.r,
    };
    let params = spec.derived();
    Ok((spec, params))
}

impl GameSpec {
    /// Convenience constructor; same validation as [`validate_spec`].
    pub fn new(matrix_s1: Matrix, matrix_s2: Matrix, lambda1: f64, lambda2: f64, r: f64) -> Result<Self> {
        validate_spec(RawGame {
            name: None,
            matrix_s1,
            matrix_s2,
            lambda1,
            lambda2,
            r,
        })
        .map(|(spec, _)| spec)
    }

    pub fn from_json(text: &str) -> Result<(Self, DerivedParams)> {
        let raw: RawGame = serde_json::from_str(text)?;
        validate_spec(raw)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn to_raw(&self) -> RawGame {
        RawGame {
            name: self.name.clone(),
            matrix_s1: self.matrix_s1.clone(),
            matrix_s2: self.matrix_s2.clone(),
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            r: self.r,
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn matrix_s1(&self) -> &Matrix {
        &self.matrix_s1
    }

    pub fn matrix_s2(&self) -> &Matrix {
        &self.matrix_s2
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.matrix_s1.len(), self.matrix_s1[0].len())
    }

    /// The one-shot matrix `p * G(s1) + (1 - p) * G(s2)`.
    pub fn mixed_matrix(&self, p: f64) -> Matrix {
        self.matrix_s1
            .iter()
            .zip(&self.matrix_s2)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| p * a + (1.0 - p) * b).collect())
            .collect()
    }

    /// The same game seen from the other state: matrices and rates swapped,
    /// so beliefs map through `p -> 1 - p`.
    pub fn mirrored(&self) -> GameSpec {
        GameSpec {
            name: self.name.as_ref().map(|n| format!("{n} (mirrored)")),
            matrix_s1: self.matrix_s2.clone(),
            matrix_s2: self.matrix_s1.clone(),
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            r: self.r,
        }
    }

    pub fn derived(&self) -> DerivedParams {
        let kappa = self.lambda1 + self.lambda2;
        let entries = || self.matrix_s1.iter().chain(&self.matrix_s2).flatten().copied();
        let max_g = entries().fold(f64::NEG_INFINITY, f64::max);
        let min_g = entries().fold(f64::INFINITY, f64::min);
        let max_abs_payoff = entries().fold(0.0, |m: f64, x| m.max(x.abs()));
        let lipschitz_u = self
            .matrix_s1
            .iter()
            .flatten()
            .zip(self.matrix_s2.iter().flatten())
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        let range = max_g - min_g;
        let scale = if range > 0.0 {
            range
        } else {
            max_abs_payoff.max(1.0)
        };
        DerivedParams {
            p_star: self.lambda2 / kappa,
            mu: self.r / kappa,
            lipschitz_u,
            scale,
            max_abs_payoff,
            kappa,
            r: self.r,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
        }
    }
}

/// Stage parameters of the discretized game with stage length `1/n`.
pub fn discrete_step_params(spec: &GameSpec, n: f64) -> Result<DiscreteParams> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::NonPositiveStep(n));
    }
    Ok(DiscreteParams {
        n,
        delta: -(-spec.r / n).exp_m1(),
        pi1: -(-spec.lambda1 / n).exp_m1(),
        pi2: -(-spec.lambda2 / n).exp_m1(),
    })
}

impl DerivedParams {
    /// Expected belief after time `t` with no information revealed.
    pub fn drift(&self, p: f64, t: f64) -> f64 {
        self.p_star + (p - self.p_star) * (-self.kappa * t).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(l1: f64, l2: f64, r: f64) -> RawGame {
        RawGame {
            name: None,
            matrix_s1: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            matrix_s2: vec![vec![-2.0, 0.0], vec![0.0, -1.0]],
            lambda1: l1,
            lambda2: l2,
            r,
        }
    }

    #[test]
    fn absorbing_second_state() {
        let (_, d) = validate_spec(raw(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(d.p_star, 0.0);
        assert_eq!(d.mu, 1.0);
        assert_eq!(d.lipschitz_u, 3.0);
        assert_eq!(d.scale, 4.0);
    }

    #[test]
    fn variation_b_params() {
        let (_, d) = validate_spec(raw(4.0 / 3.0, 2.0 / 3.0, 1.0)).unwrap();
        assert!((d.p_star - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.mu - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_chain() {
        let err = validate_spec(raw(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateChain));
        assert!(err.to_string().contains("degenerate chain"));
    }

    #[test]
    fn distinct_diagnostics() {
        assert!(matches!(
            validate_spec(raw(1.0, 0.0, 0.0)).unwrap_err(),
            Error::NonPositiveDiscount(_)
        ));
        assert!(matches!(
            validate_spec(raw(f64::NAN, 0.0, 1.0)).unwrap_err(),
            Error::NonFinite { .. }
        ));
        let mut bad = raw(1.0, 0.0, 1.0);
        bad.matrix_s2 = vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
        assert!(matches!(
            validate_spec(bad).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        let mut bad = raw(1.0, 0.0, 1.0);
        bad.matrix_s1[1][0] = f64::INFINITY;
        assert!(matches!(validate_spec(bad).unwrap_err(), Error::NonFinite { .. }));
        let mut bad = raw(1.0, 0.0, 1.0);
        bad.matrix_s1 = vec![];
        bad.matrix_s2 = vec![];
        assert!(matches!(validate_spec(bad).unwrap_err(), Error::EmptyMatrix));
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let text = r#"{"matrix_s1":[[1]],"matrix_s2":[[0]],"lambda1":1,"lambda2":0,"r":1,"rho":2}"#;
        assert!(matches!(GameSpec::from_json(text).unwrap_err(), Error::Json(_)));
        let text = r#"{"name":"x","matrix_s1":[[1]],"matrix_s2":[[0]],"lambda1":1,"lambda2":0,"r":1}"#;
        let (spec, _) = GameSpec::from_json(text).unwrap();
        assert_eq!(spec.name(), Some("x"));
    }

    #[test]
    fn discrete_params_formulas() {
        let spec = GameSpec::new(vec![vec![1.0]], vec![vec![0.0]], 1.0, 0.0, 1.0).unwrap();
        let d = discrete_step_params(&spec, 1.0).unwrap();
        assert!((d.delta - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((d.delta - 0.632_120_558_828_557_7).abs() < 1e-12);
        assert_eq!(d.pi2, 0.0);
        assert!(discrete_step_params(&spec, 0.0).is_err());
        assert!(discrete_step_params(&spec, -3.0).is_err());
    }

    #[test]
    fn discrete_params_monotone_in_n() {
        let spec = GameSpec::new(vec![vec![1.0]], vec![vec![0.0]], 0.7, 1.3, 2.0).unwrap();
        let mut prev = discrete_step_params(&spec, 0.5).unwrap();
        for k in 1..40 {
            let n = 0.5 * 1.5f64.powi(k);
            let d = discrete_step_params(&spec, n).unwrap();
            assert!(d.delta < prev.delta && d.pi1 < prev.pi1 && d.pi2 < prev.pi2);
            prev = d;
        }
        assert!(prev.delta < 1e-6);
    }

    #[test]
    fn p_star_boundary_cases() {
        let (_, d) = validate_spec(raw(0.0, 2.0, 1.0)).unwrap();
        assert_eq!(d.p_star, 1.0);
        let (_, d) = validate_spec(raw(2.0, 0.0, 1.0)).unwrap();
        assert_eq!(d.p_star, 0.0);
    }
}
