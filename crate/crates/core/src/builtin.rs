//! Small games and environments used throughout the examples and tests.

use std::sync::Arc;

use crate::environment::{Environment, RandomVariable, SampleSpace};
use crate::game::{Game, Player};
use crate::private_info::PrivateInfoGame;
use crate::scalar::Real;

fn cd() -> Vec<String> {
    vec!["C".into(), "D".into()]
}

fn table<T: Real>(cells: [(f64, f64); 4]) -> Vec<(T, T)> {
    cells.iter().map(|&(a, b)| (T::lit(a), T::lit(b))).collect()
}

pub fn prisoners_dilemma<T: Real>() -> Game<T> {
    Game::new("prisoners-dilemma", cd(), cd(), table([(3.0, 3.0), (0.0, 5.0), (5.0, 0.0), (1.0, 1.0)]))
        .expect("static table")
}

/// Two pure equilibria `(C,D)`, `(D,C)` and one interior mixed equilibrium.
pub fn ic3_game<T: Real>() -> Game<T> {
    Game::new("ic3", cd(), cd(), table([(0.0, 0.0), (2.0, 1.0), (1.0, 2.0), (0.0, 0.0)])).expect("static table")
}

/// Player 1 holds `X` and `Y`, Player 2 holds `W`. Given `W`, the two are
/// independent, with `X` matching `W` a quarter of the time and `Y` a sixth.
pub fn ic3_environment<T: Real>() -> Environment<T> {
    // (w, x, y, weight / 48)
    let rows = [
        ("C", "C", "C", 1.0),
        ("C", "C", "D", 5.0),
        ("C", "D", "C", 3.0),
        ("C", "D", "D", 15.0),
        ("D", "D", "D", 1.0),
        ("D", "D", "C", 5.0),
        ("D", "C", "D", 3.0),
        ("D", "C", "C", 15.0),
    ];
    let space = Arc::new(
        SampleSpace::new(rows.iter().enumerate().map(|(k, r)| (format!("w{k}"), T::lit(r.3 / 48.0))))
            .expect("probabilities sum to one"),
    );
    let column = |f: fn(&(&'static str, &'static str, &'static str, f64)) -> &'static str| {
        rows.iter().map(f).collect::<Vec<_>>()
    };
    let x = RandomVariable::new("X", &space, Player::One, column(|r| r.1)).expect("one value per atom");
    let y = RandomVariable::new("Y", &space, Player::One, column(|r| r.2)).expect("one value per atom");
    let w = RandomVariable::new("W", &space, Player::Two, column(|r| r.0)).expect("one value per atom");
    Environment::new(&space, cd(), cd(), vec![x, y], vec![w]).expect("consistent environment")
}

/// Uniform red/green types; coordination pays when both are red, and
/// anti-coordination pays otherwise.
pub fn iid1<T: Real>() -> PrivateInfoGame<T> {
    let types = || vec!["red".to_string(), "green".to_string()];
    PrivateInfoGame::new("iid1", types(), types(), vec![T::lit(0.25); 4], cd(), cd(), |a1, a2, s1, s2| {
        let coordinate = a1 == 0 && a2 == 0;
        if (s1 == s2) == coordinate {
            (T::one(), T::one())
        } else {
            (T::zero(), T::zero())
        }
    })
    .expect("static table")
}
