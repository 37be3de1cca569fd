//! Independent oracles shared by the integration tests. Nothing here calls
//! the routine it is used to check.

#![allow(dead_code)]

use std::sync::Arc;

use qgt::environment::{Environment, RandomVariable, SampleSpace};
use qgt::ewl::{Cell, MixedQuatStrategy, OutcomeAssignment, Quaternion};
use qgt::game::{Game, Player};
use rand::Rng;

pub type Q = Quaternion<f64>;

/// Super-Fibonacci spiral on the unit three-sphere.
pub fn s3_net(n: usize) -> Vec<Q> {
    let phi = 2f64.sqrt();
    let psi = 1.533_751_168_755_204_3;
    (0..n)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n as f64).sqrt();
            let big_r = (1.0 - s / n as f64).sqrt();
            let alpha = std::f64::consts::TAU * s / phi;
            let beta = std::f64::consts::TAU * s / psi;
            Q::new(r * alpha.sin(), r * alpha.cos(), big_r * beta.sin(), big_r * beta.cos())
        })
        .collect()
}

/// Componentwise Hamilton product written out independently of the library.
pub fn hamilton(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Expected payoff of `who` playing the pure quaternion `r` against `opp`.
pub fn pure_vs_mixed(g: &Game<f64>, r: Q, opp: &MixedQuatStrategy<f64>, who: Player, asg: &OutcomeAssignment) -> f64 {
    let mut total = 0.0;
    for (q, w) in opp.support() {
        let m = match who {
            Player::One => hamilton(r.to_array(), q.to_array()),
            Player::Two => hamilton(q.to_array(), r.to_array()),
        };
        for (slot, x) in m.iter().enumerate() {
            let cell = asg.cell(slot);
            total += w * x * x * who.of(g.payoff(&cell.profile()).unwrap());
        }
    }
    total
}

/// Best deviation payoff over the net.
pub fn net_best(g: &Game<f64>, net: &[Q], opp: &MixedQuatStrategy<f64>, who: Player, asg: &OutcomeAssignment) -> f64 {
    net.iter().map(|&r| pure_vs_mixed(g, r, opp, who, asg)).fold(f64::NEG_INFINITY, f64::max)
}

/// Gram-Schmidt on random vectors: an orthonormal frame of R^4.
pub fn random_frame<R: Rng>(rng: &mut R) -> Vec<Q> {
    let mut frame: Vec<[f64; 4]> = Vec::new();
    while frame.len() < 4 {
        let mut v = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
        for f in &frame {
            let d: f64 = (0..4).map(|k| v[k] * f[k]).sum();
            for k in 0..4 {
                v[k] -= d * f[k];
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            frame.push(v.map(|x| x / n));
        }
    }
    frame.into_iter().map(Q::from_array).collect()
}

/// Closed-form joint law of the rotated entangled pair: `(CC, CD, DC, DD)`.
pub fn rotated_pair_joint(theta: f64, phi: f64) -> [f64; 4] {
    let d = theta - phi;
    let (c, s) = (d.cos().powi(2) / 2.0, d.sin().powi(2) / 2.0);
    [c, s, s, c]
}

/// Player 1's closed-form payoff in the red/green game at angles
/// `theta = (red, green)` against `phi = (red, green)`.
pub fn iid1_closed_form(theta: [f64; 2], phi: [f64; 2]) -> f64 {
    let rr = (theta[0] - phi[0]).cos().powi(2);
    let rg = (theta[0] - phi[1]).sin().powi(2);
    let gr = (theta[1] - phi[0]).sin().powi(2);
    let gg = (theta[1] - phi[1]).sin().powi(2);
    (rr + rg + gr + gg) / 4.0
}

pub fn random_game<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Game<f64> {
    let r: Vec<String> = (0..rows).map(|i| format!("r{i}")).collect();
    let c: Vec<String> = (0..cols).map(|j| format!("c{j}")).collect();
    let table = (0..rows * cols).map(|_| (rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64)).collect();
    Game::new("random", r, c, table).unwrap()
}

pub fn random_probs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let rest: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - rest;
    p
}

/// Random environment for `g` with up to 6 atoms and up to 2 variables per player.
pub fn random_environment<R: Rng>(rng: &mut R, g: &Game<f64>) -> Environment<f64> {
    let atoms = rng.gen_range(1..=6);
    let space = Arc::new(
        SampleSpace::new(random_probs(rng, atoms).into_iter().enumerate().map(|(k, p)| (format!("w{k}"), p))).unwrap(),
    );
    let mut vars = |who: Player, tag: &str| -> Vec<RandomVariable<f64>> {
        let labels = g.strategies(who).to_vec();
        (0..rng.gen_range(1..=2))
            .map(|k| {
                let values: Vec<String> = (0..atoms).map(|_| labels[rng.gen_range(0..labels.len())].clone()).collect();
                RandomVariable::new(format!("{tag}{k}"), &space, who, values).unwrap()
            })
            .collect()
    };
    let v1 = vars(Player::One, "X");
    let v2 = vars(Player::Two, "Y");
    Environment::for_game(g, &space, v1, v2).unwrap()
}

pub fn cell_index(c: Cell) -> usize {
    c.index()
}
