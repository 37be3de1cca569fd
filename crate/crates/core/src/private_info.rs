//! Games of private information, behavioural maps, lifting of games and
//! environments over information sets, and the commuting-square check
//! between "randomise then lift" and "lift then randomise".

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::environment::{env_payoff, Environment, RandomVariable, SampleSpace};
use crate::error::{Error, Result};
use crate::game::{Game, Player, PAYOFF_TOL};
use crate::scalar::Real;

/// Largest number of behavioural maps allowed per player.
pub const SHARP_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateInfoGame<T> {
    name: String,
    info: [Vec<String>; 2],
    type_dist: Vec<T>,
    strategies: [Vec<String>; 2],
    payoffs: Vec<(T, T)>,
}

impl<T: Real> PrivateInfoGame<T> {
    /// `type_dist` is row-major over `info1 x info2`; `payoff(a1, a2, s1, s2)`
    /// is evaluated once per cell.
    pub fn new(
        name: impl Into<String>,
        info1: Vec<String>,
        info2: Vec<String>,
        type_dist: Vec<T>,
        strategies1: Vec<String>,
        strategies2: Vec<String>,
        payoff: impl Fn(usize, usize, usize, usize) -> (T, T),
    ) -> Result<Self> {
        if info1.is_empty() || info2.is_empty() {
            return Err(Error::InvalidGame("empty information set".into()));
        }
        if strategies1.is_empty() || strategies2.is_empty() {
            return Err(Error::InvalidGame("empty strategy set".into()));
        }
        if type_dist.len() != info1.len() * info2.len() {
            return Err(Error::DimensionMismatch("type distribution size".into()));
        }
        if type_dist.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(Error::InvalidWeights("negative type probability".into()));
        }
        let total: T = type_dist.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(PAYOFF_TOL) {
            return Err(Error::InvalidWeights(format!("type distribution sums to {total}")));
        }
        let (n1, n2, m1, m2) = (info1.len(), info2.len(), strategies1.len(), strategies2.len());
        let mut payoffs = Vec::with_capacity(n1 * n2 * m1 * m2);
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                for s1 in 0..m1 {
                    for s2 in 0..m2 {
                        payoffs.push(payoff(a1, a2, s1, s2));
                    }
                }
            }
        }
        Ok(PrivateInfoGame {
            name: name.into(),
            info: [info1, info2],
            type_dist,
            strategies: [strategies1, strategies2],
            payoffs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn info(&self, who: Player) -> &[String] {
        &self.info[who.index()]
    }

    pub fn strategies(&self, who: Player) -> &[String] {
        &self.strategies[who.index()]
    }

    pub fn type_prob(&self, a1: usize, a2: usize) -> T {
        self.type_dist[a1 * self.info[1].len() + a2]
    }

    pub fn type_dist(&self) -> &[T] {
        &self.type_dist
    }

    #[inline]
    pub fn payoff(&self, a1: usize, a2: usize, s1: usize, s2: usize) -> (T, T) {
        let (n2, m1, m2) = (self.info[1].len(), self.strategies[0].len(), self.strategies[1].len());
        self.payoffs[((a1 * n2 + a2) * m1 + s1) * m2 + s2]
    }

    /// The ordinary game played when the types are `(a1, a2)`.
    pub fn cell_game(&self, a1: usize, a2: usize) -> Game<T> {
        Game::from_fn(
            format!("{}[{},{}]", self.name, self.info[0][a1], self.info[1][a2]),
            self.strategies[0].clone(),
            self.strategies[1].clone(),
            |s1, s2| self.payoff(a1, a2, s1, s2),
        )
        .expect("validated strategy sets")
    }

    /// Same game with another type distribution.
    pub fn with_type_dist(&self, type_dist: Vec<T>) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.info[0].clone(),
            self.info[1].clone(),
            type_dist,
            self.strategies[0].clone(),
            self.strategies[1].clone(),
            |a1, a2, s1, s2| self.payoff(a1, a2, s1, s2),
        )
    }
}

/// A map from a player's information set to indices of some target list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BehavioralMap {
    pub assignment: Vec<usize>,
}

impl BehavioralMap {
    /// Renders the map as `type=target|type=target`.
    pub fn label<S: AsRef<str>>(&self, info: &[String], targets: &[S]) -> String {
        behavioral_label(info, self.assignment.iter().map(|&i| targets[i].as_ref()))
    }
}

fn behavioral_label<'a>(info: &[String], images: impl Iterator<Item = &'a str>) -> String {
    info.iter().zip(images).map(|(a, s)| format!("{a}={s}")).collect::<Vec<_>>().join("|")
}

/// All maps `info -> targets`, lexicographic with the first type most significant.
pub fn behavioral_maps(info_len: usize, target_len: usize) -> Result<Vec<BehavioralMap>> {
    let count = (target_len as u64)
        .checked_pow(info_len as u32)
        .filter(|&c| c as usize <= SHARP_LIMIT)
        .ok_or_else(|| Error::SizeLimit(format!("{target_len}^{info_len} behavioural maps exceed {SHARP_LIMIT}")))?
        as usize;
    Ok((0..count)
        .map(|mut code| {
            let mut assignment = vec![0; info_len];
            for slot in assignment.iter_mut().rev() {
                *slot = code % target_len;
                code /= target_len;
            }
            BehavioralMap { assignment }
        })
        .collect())
}

/// The ordinary game whose strategies are behavioural maps `A_i -> S_i`.
pub fn sharp_game<T: Real>(pg: &PrivateInfoGame<T>) -> Result<Game<T>> {
    let maps1 = behavioral_maps(pg.info[0].len(), pg.strategies[0].len())?;
    let maps2 = behavioral_maps(pg.info[1].len(), pg.strategies[1].len())?;
    let rows: Vec<String> = maps1.iter().map(|m| m.label(&pg.info[0], &pg.strategies[0])).collect();
    let cols: Vec<String> = maps2.iter().map(|m| m.label(&pg.info[1], &pg.strategies[1])).collect();
    let cells: Vec<(usize, usize, T)> = (0..pg.info[0].len())
        .flat_map(|a1| (0..pg.info[1].len()).map(move |a2| (a1, a2)))
        .map(|(a1, a2)| (a1, a2, pg.type_prob(a1, a2)))
        .filter(|(_, _, p)| *p > T::zero())
        .collect();
    Game::from_fn(format!("{}#", pg.name), rows, cols, |i, j| {
        let (f1, f2) = (&maps1[i].assignment, &maps2[j].assignment);
        let mut acc = (T::zero(), T::zero());
        for &(a1, a2, p) in &cells {
            let (u, v) = pg.payoff(a1, a2, f1[a1], f2[a2]);
            acc.0 += p * u;
            acc.1 += p * v;
        }
        acc
    })
}

/// Lifts `e` over the information sets: each lifted variable is a map
/// `A_i -> X_i`, realised atomwise as the behavioural map `a -> X_a(omega)`.
pub fn sharp_environment<T: Real>(e: &Environment<T>, pg: &PrivateInfoGame<T>) -> Result<Environment<T>> {
    let mut lifted: Vec<Vec<RandomVariable<T>>> = Vec::with_capacity(2);
    let mut lifted_strategies: Vec<Vec<String>> = Vec::with_capacity(2);
    for who in [Player::One, Player::Two] {
        let info = pg.info(who);
        let labels = pg.strategies(who);
        if e.strategies(who) != labels {
            return Err(Error::InvalidGame(format!("environment strategy set of {who} differs from the game")));
        }
        let vars = e.vars(who);
        // validates the strategy-side size too
        let sharp_maps = behavioral_maps(info.len(), labels.len())?;
        lifted_strategies.push(sharp_maps.iter().map(|m| m.label(info, labels)).collect());
        let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
        let mut out = Vec::new();
        for map in behavioral_maps(info.len(), vars.len())? {
            let values = (0..e.space().len())
                .map(|atom| behavioral_label(info, map.assignment.iter().map(|&k| vars[k].values()[atom].as_str())));
            out.push(RandomVariable::new(map.label(info, &names), e.space(), who, values)?);
        }
        lifted.push(out);
    }
    let vars2 = lifted.pop().expect("two players");
    let vars1 = lifted.pop().expect("two players");
    let s2 = lifted_strategies.pop().expect("two players");
    let s1 = lifted_strategies.pop().expect("two players");
    Environment::new(e.space(), s1, s2, vars1, vars2)
}

/// Private-information game whose strategies are the environment's variables,
/// with payoffs averaged under each pair's joint law.
pub fn game_of_env<T: Real>(pg: &PrivateInfoGame<T>, e: &Environment<T>) -> Result<PrivateInfoGame<T>> {
    let idx = |who: Player| -> Result<Vec<Vec<usize>>> {
        let labels = pg.strategies(who);
        e.vars(who)
            .iter()
            .map(|v| {
                v.values()
                    .iter()
                    .map(|s| labels.iter().position(|l| l == s).ok_or_else(|| Error::UnknownLabel(s.clone())))
                    .collect()
            })
            .collect()
    };
    let (x_idx, y_idx) = (idx(Player::One)?, idx(Player::Two)?);
    let probs = e.space().probs();
    let names = |who: Player| -> Vec<String> { e.vars(who).iter().map(|v| v.name().to_string()).collect() };
    let out = PrivateInfoGame::new(
        format!("{}(E)", pg.name),
        pg.info[0].clone(),
        pg.info[1].clone(),
        pg.type_dist.clone(),
        names(Player::One),
        names(Player::Two),
        |a1, a2, x, y| {
            let mut acc = (T::zero(), T::zero());
            for (atom, &p) in probs.iter().enumerate() {
                let (u, v) = pg.payoff(a1, a2, x_idx[x][atom], y_idx[y][atom]);
                acc.0 += p * u;
                acc.1 += p * v;
            }
            acc
        },
    )?;
    for who in [Player::One, Player::Two] {
        let n = out.strategies(who);
        if (1..n.len()).any(|i| n[..i].contains(&n[i])) {
            return Err(Error::InvalidGame(format!("duplicate variable names for {who}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteReport<T> {
    pub max_abs_diff: T,
    pub holds: bool,
    pub profiles: usize,
}

/// Compares the lifted game of `G(E)` with the lifted game played in the
/// lifted environment, profile by profile.
pub fn check_commute<T: Real>(pg: &PrivateInfoGame<T>, e: &Environment<T>) -> Result<CommuteReport<T>> {
    let left = sharp_game(&game_of_env(pg, e)?)?;
    let base = sharp_game(pg)?;
    let lifted = sharp_environment(e, pg)?;
    let (v1, v2) = (lifted.vars(Player::One), lifted.vars(Player::Two));
    if left.rows().len() != v1.len() || left.cols().len() != v2.len() {
        return Err(Error::BijectionMismatch("strategy counts differ".into()));
    }
    for (label, v) in left.rows().iter().zip(v1).chain(left.cols().iter().zip(v2)) {
        if label != v.name() {
            return Err(Error::BijectionMismatch(format!("`{label}` vs `{}`", v.name())));
        }
    }
    let mut max_abs_diff = T::zero();
    for (i, x) in v1.iter().enumerate() {
        for (j, y) in v2.iter().enumerate() {
            let (a, b) = left.at(i, j);
            let (c, d) = env_payoff(&base, x, y)?;
            max_abs_diff = max_abs_diff.max((a - c).abs()).max((b - d).abs());
        }
    }
    Ok(CommuteReport { max_abs_diff, holds: max_abs_diff <= T::tol(PAYOFF_TOL), profiles: v1.len() * v2.len() })
}

fn random_simplex<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut out: Vec<T> = raw.iter().map(|x| T::lit(x / total)).collect();
    // absorb rounding into the last entry so the sum check is exact enough
    let rest: T = out[..n - 1].iter().copied().sum();
    out[n - 1] = T::one() - rest;
    out
}

/// Random instance with `|A_i| <= 2`, `S_i = {C, D}`, `|X_i| <= 3`, `<= 8` atoms.
pub fn random_instance<T: Real, R: Rng>(rng: &mut R) -> (PrivateInfoGame<T>, Environment<T>) {
    let types =
        |rng: &mut R, tag: &str| -> Vec<String> { (0..rng.gen_range(1..=2)).map(|k| format!("{tag}{k}")).collect() };
    let info1 = types(rng, "a");
    let info2 = types(rng, "b");
    let type_dist = random_simplex(rng, info1.len() * info2.len());
    let cd = || vec!["C".to_string(), "D".to_string()];
    let n_pay = info1.len() * info2.len() * 4;
    let table: Vec<(T, T)> =
        (0..n_pay).map(|_| (T::lit(rng.gen_range(-5.0..5.0)), T::lit(rng.gen_range(-5.0..5.0)))).collect();
    let n2 = info2.len();
    let pg = PrivateInfoGame::new("random", info1, info2, type_dist, cd(), cd(), |a1, a2, s1, s2| {
        table[((a1 * n2 + a2) * 2 + s1) * 2 + s2]
    })
    .expect("valid random game");

    let atoms = rng.gen_range(1..=8);
    let probs = random_simplex::<T, R>(rng, atoms);
    let space = Arc::new(
        SampleSpace::new(probs.into_iter().enumerate().map(|(k, p)| (format!("w{k}"), p))).expect("valid space"),
    );
    let mut vars = |who: Player, tag: &str| -> Vec<RandomVariable<T>> {
        (0..rng.gen_range(1..=3))
            .map(|k| {
                let values: Vec<&str> = (0..atoms).map(|_| if rng.gen_bool(0.5) { "C" } else { "D" }).collect();
                RandomVariable::new(format!("{tag}{k}"), &space, who, values).expect("sized to space")
            })
            .collect()
    };
    let vars1 = vars(Player::One, "X");
    let vars2 = vars(Player::Two, "Y");
    let env = Environment::new(&space, cd(), cd(), vars1, vars2).expect("valid environment");
    (pg, env)
}

/// Runs [`check_commute`] on `trials` seeded random instances in parallel.
/// Instance `k` uses stream `k` of a ChaCha8 generator seeded with `seed`.
pub fn check_commute_trials(trials: usize, seed: u64) -> Result<Vec<CommuteReport<f64>>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let (pg, env) = random_instance::<f64, _>(&mut rng);
            check_commute(&pg, &env)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn base_pd() -> PrivateInfoGame<f64> {
        let pd = builtin::prisoners_dilemma::<f64>();
        PrivateInfoGame::new(
            "pd",
            vec!["only".into()],
            vec!["only".into()],
            vec![1.0],
            pd.rows().to_vec(),
            pd.cols().to_vec(),
            |_, _, s1, s2| pd.at(s1, s2),
        )
        .unwrap()
    }

    #[test]
    fn singleton_types_reproduce_base_game() {
        let g = sharp_game(&base_pd()).unwrap();
        let pd = builtin::prisoners_dilemma::<f64>();
        assert_eq!(g.shape(), (2, 2));
        assert_eq!(g.rows(), ["only=C", "only=D"]);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.at(i, j), pd.at(i, j));
            }
        }
    }

    #[test]
    fn map_enumeration_is_lexicographic() {
        let pg = builtin::iid1::<f64>();
        let g = sharp_game(&pg).unwrap();
        assert_eq!(g.rows(), ["red=C|green=C", "red=C|green=D", "red=D|green=C", "red=D|green=D"]);
    }

    #[test]
    fn iid1_sharp_game_best_cell() {
        let g = sharp_game(&builtin::iid1::<f64>()).unwrap();
        let best = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| g.at(i, j).0).fold(f64::MIN, f64::max);
        assert!((best - 0.75).abs() < 1e-12);
    }

    #[test]
    fn type_independent_payoffs_pass_through() {
        let pd = builtin::prisoners_dilemma::<f64>();
        let pg = PrivateInfoGame::new(
            "flat",
            vec!["x".into(), "y".into()],
            vec!["u".into(), "v".into()],
            vec![0.25; 4],
            pd.rows().to_vec(),
            pd.cols().to_vec(),
            |_, _, s1, s2| pd.at(s1, s2),
        )
        .unwrap();
        let g = sharp_game(&pg).unwrap();
        // constant maps reproduce base payoffs
        assert_eq!(g.at(0, 0), pd.at(0, 0));
        assert_eq!(g.at(3, 0), pd.at(1, 0));
        assert_eq!(g.at(3, 3), pd.at(1, 1));
    }

    #[test]
    fn sharp_limits() {
        assert!(behavioral_maps(12, 2).is_ok());
        assert!(matches!(behavioral_maps(13, 2), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn lifted_environment_sizes() {
        let env = builtin::ic3_environment::<f64>();
        let pg = builtin::iid1::<f64>();
        let lifted = sharp_environment(&env, &pg).unwrap();
        assert_eq!(lifted.vars(Player::One).len(), 4);
        assert_eq!(lifted.vars(Player::Two).len(), 1);
        assert_eq!(lifted.vars(Player::One)[1].name(), "red=X|green=Y");
    }

    #[test]
    fn game_of_env_matches_env_payoff() {
        let g = builtin::ic3_game::<f64>();
        let env = builtin::ic3_environment::<f64>();
        let pg = PrivateInfoGame::new(
            "ic3",
            vec!["red".into(), "green".into()],
            vec!["only".into()],
            vec![0.5, 0.5],
            g.rows().to_vec(),
            g.cols().to_vec(),
            |_, _, s1, s2| g.at(s1, s2),
        )
        .unwrap();
        let ge = game_of_env(&pg, &env).unwrap();
        for (i, x) in env.vars(Player::One).iter().enumerate() {
            let w = &env.vars(Player::Two)[0];
            let expect = env_payoff(&g, x, w).unwrap();
            for a1 in 0..2 {
                let got = ge.payoff(a1, 0, i, 0);
                assert!((got.0 - expect.0).abs() < 1e-12 && (got.1 - expect.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn commute_on_ic3_lift() {
        let env = builtin::ic3_environment::<f64>();
        let r = check_commute(&builtin::iid1::<f64>(), &env).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn singleton_types_commute_exactly() {
        let env = builtin::ic3_environment::<f64>();
        let g = builtin::ic3_game::<f64>();
        let pg = PrivateInfoGame::new(
            "ic3",
            vec!["only".into()],
            vec!["only".into()],
            vec![1.0],
            g.rows().to_vec(),
            g.cols().to_vec(),
            |_, _, s1, s2| g.at(s1, s2),
        )
        .unwrap();
        assert_eq!(check_commute(&pg, &env).unwrap().max_abs_diff, 0.0);
    }

    #[test]
    fn constant_payoffs_stay_constant() {
        let env = builtin::ic3_environment::<f64>();
        let pg = builtin::iid1::<f64>();
        let c = PrivateInfoGame::new(
            "c",
            pg.info(Player::One).to_vec(),
            pg.info(Player::Two).to_vec(),
            vec![0.25; 4],
            pg.strategies(Player::One).to_vec(),
            pg.strategies(Player::Two).to_vec(),
            |_, _, _, _| (2.5, -1.0),
        )
        .unwrap();
        let lifted = game_of_env(&c, &env).unwrap();
        assert!(lifted.payoffs.iter().all(|&(a, b)| (a - 2.5).abs() < 1e-12 && (b + 1.0).abs() < 1e-12));
    }
}
