//! The classic Aumann–Maschler games adapted to a two-state Markov chain,
//! with their known closed-form solutions.
//!
//! In the first three games state `s2` is absorbing (`p* = 0`, `mu = 1`).
//! The two variations of [`partial`] change the rates so that `p*` moves
//! into the interior.

use crate::game::GameSpec;

/// Concave one-shot value `u(p) = p(1 - p)`; the informed player never reveals.
pub fn nonrevealing() -> GameSpec {
    GameSpec::new(
        vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        vec![vec![0.0, 0.0], vec![0.0, 1.0]],
        1.0,
        0.0,
        1.0,
    )
    .expect("valid game")
    .with_name("nonrevealing")
}

/// Convex one-shot value `u(p) = -p(1 - p)`; the informed player reveals everything.
pub fn revealing() -> GameSpec {
    GameSpec::new(
        vec![vec![-1.0, 0.0], vec![0.0, 0.0]],
        vec![vec![0.0, 0.0], vec![0.0, -1.0]],
        1.0,
        0.0,
        1.0,
    )
    .expect("valid game")
    .with_name("revealing")
}

fn partial_with_rates(lambda1: f64, lambda2: f64, r: f64, name: &str) -> GameSpec {
    GameSpec::new(
        vec![vec![1.0, 0.0], vec![0.0, 2.0]],
        vec![vec![-2.0, 0.0], vec![0.0, -1.0]],
        lambda1,
        lambda2,
        r,
    )
    .expect("valid game")
    .with_name(name)
}

/// One-shot value neither concave nor convex; partial revelation.
pub fn partial() -> GameSpec {
    partial_with_rates(1.0, 0.0, 1.0, "partial")
}

/// [`partial`] with `lambda1 = 3, lambda2 = 1, r = 1` (`p* = mu = 1/4`).
pub fn partial_variation_a() -> GameSpec {
    partial_with_rates(3.0, 1.0, 1.0, "partial-variation-a")
}

/// [`partial`] with `lambda1 = 4/3, lambda2 = 2/3, r = 1` (`p* = 1/3`, `mu = 1/2`).
pub fn partial_variation_b() -> GameSpec {
    partial_with_rates(4.0 / 3.0, 2.0 / 3.0, 1.0, "partial-variation-b")
}

/// All five games in a fixed order.
pub fn all() -> Vec<GameSpec> {
    vec![
        revealing(),
        nonrevealing(),
        partial(),
        partial_variation_a(),
        partial_variation_b(),
    ]
}

/// One-shot value of [`partial`] and both variations.
pub fn partial_u(p: f64) -> f64 {
    if p > 1.0 / 3.0 && p <= 2.0 / 3.0 {
        0.0
    } else {
        (9.0 * p * p - 9.0 * p + 2.0) / (6.0 * p - 3.0)
    }
}

/// Belief where the informed player of [`partial`] switches from sliding to
/// revealing: `(sqrt(13) - 1) / 6`.
pub fn partial_switch() -> f64 {
    (13f64.sqrt() - 1.0) / 6.0
}

/// Limit value of [`nonrevealing`].
pub fn nonrevealing_value(p: f64) -> f64 {
    p / 2.0 - p * p / 3.0
}

/// Limit value of [`revealing`].
pub fn revealing_value(_p: f64) -> f64 {
    0.0
}

/// Limit value of [`partial`]: affine, then `-1/(9p)`, then the tangent line.
pub fn partial_value(p: f64) -> f64 {
    let pb = partial_switch();
    if p < 1.0 / 3.0 {
        p - 2.0 / 3.0
    } else if p < pb {
        -1.0 / (9.0 * p)
    } else {
        -1.0 / (9.0 * pb) + (p - pb) / (9.0 * pb * pb)
    }
}

/// Limit value of [`partial_variation_b`]: two affine pieces with a kink at `p* = 1/3`.
pub fn partial_variation_b_value(p: f64) -> f64 {
    if p < 1.0 / 3.0 {
        2.0 / 3.0 * p - 2.0 / 9.0
    } else {
        p / 3.0 - 1.0 / 9.0
    }
}
