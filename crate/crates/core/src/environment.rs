//! Finite probability spaces, strategy-valued random variables, environments,
//! the induced game of random-variable strategies, and correlated equilibria.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Game, Player, Profile, PAYOFF_TOL};
use crate::scalar::Real;

/// Default deviation tolerance for equilibrium checks.
pub const DEFAULT_EPS: f64 = 1e-9;
/// Cap on `|S|^|S|`, the number of relabelling maps enumerated by closure.
pub const CLOSURE_MAP_LIMIT: usize = 4096;

/// Joint law of a strategy pair, keyed by profile.
pub type JointDistribution<T> = BTreeMap<Profile, T>;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpace<T> {
    atoms: Vec<String>,
    probs: Vec<T>,
}

impl<T: Real> SampleSpace<T> {
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let (atoms, probs): (Vec<String>, Vec<T>) = atoms.into_iter().map(|(a, p)| (a.into(), p)).unzip();
        if atoms.is_empty() {
            return Err(Error::InvalidWeights("sample space has no atoms".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (a, p) in atoms.iter().zip(&probs) {
            if !seen.insert(a.as_str()) {
                return Err(Error::InvalidWeights(format!("atom `{a}` repeated")));
            }
            if !p.is_finite() || *p < T::zero() {
                return Err(Error::InvalidWeights(format!("atom `{a}` has probability {p}")));
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(PAYOFF_TOL) {
            return Err(Error::InvalidWeights(format!("atom probabilities sum to {total}")));
        }
        Ok(SampleSpace { atoms, probs })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// A random variable on a shared sample space, valued in one player's strategy labels.
#[derive(Debug, Clone)]
pub struct RandomVariable<T> {
    name: String,
    space: Arc<SampleSpace<T>>,
    target: Player,
    values: Vec<String>,
}

impl<T: Real> RandomVariable<T> {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        space: &Arc<SampleSpace<T>>,
        target: Player,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let name = name.into();
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "variable `{name}` has {} values for {} atoms",
                values.len(),
                space.len()
            )));
        }
        Ok(RandomVariable { name, space: Arc::clone(space), target, values })
    }

    pub fn constant(name: impl Into<String>, space: &Arc<SampleSpace<T>>, target: Player, label: &str) -> Self {
        RandomVariable {
            name: name.into(),
            space: Arc::clone(space),
            target,
            values: vec![label.to_string(); space.len()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<SampleSpace<T>> {
        &self.space
    }

    pub fn target(&self) -> Player {
        self.target
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same variable and same realisations, ignoring the name.
    pub fn same_mapping(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }

    /// Distinct values in order of first appearance.
    pub fn range(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in &self.values {
            if !out.contains(&v.as_str()) {
                out.push(v);
            }
        }
        out
    }
}

pub fn same_space<T: Real>(a: &Arc<SampleSpace<T>>, b: &Arc<SampleSpace<T>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Joint law of `(x, y)` obtained by summing atom probabilities.
pub fn joint_distribution<T: Real>(x: &RandomVariable<T>, y: &RandomVariable<T>) -> Result<JointDistribution<T>> {
    if !same_space(&x.space, &y.space) {
        return Err(Error::MismatchedSpace);
    }
    let mut out = JointDistribution::new();
    for ((a, b), &p) in x.values.iter().zip(&y.values).zip(x.space.probs()) {
        *out.entry(Profile::new(a.clone(), b.clone())).or_insert(T::zero()) += p;
    }
    Ok(out)
}

/// Expected payoff pair of `g` under the joint law of `(x, y)`.
pub fn env_payoff<T: Real>(g: &Game<T>, x: &RandomVariable<T>, y: &RandomVariable<T>) -> Result<(T, T)> {
    if x.target != Player::One || y.target != Player::Two {
        return Err(Error::InvalidParameter("variables must target Player 1 then Player 2".into()));
    }
    let joint = joint_distribution(x, y)?;
    expectation(g, &joint)
}

pub fn expectation<T: Real>(g: &Game<T>, joint: &JointDistribution<T>) -> Result<(T, T)> {
    let mut acc = (T::zero(), T::zero());
    for (profile, &p) in joint {
        let (a, b) = g.payoff(profile)?;
        acc.0 += p * a;
        acc.1 += p * b;
    }
    Ok(acc)
}

/// A pair of random-variable strategy sets over one sample space.
#[derive(Debug, Clone)]
pub struct Environment<T> {
    space: Arc<SampleSpace<T>>,
    strategies: [Vec<String>; 2],
    vars: [Vec<RandomVariable<T>>; 2],
}

impl<T: Real> Environment<T> {
    pub fn new(
        space: &Arc<SampleSpace<T>>,
        strategies1: Vec<String>,
        strategies2: Vec<String>,
        vars1: Vec<RandomVariable<T>>,
        vars2: Vec<RandomVariable<T>>,
    ) -> Result<Self> {
        let strategies = [strategies1, strategies2];
        let vars = [vars1, vars2];
        for who in [Player::One, Player::Two] {
            let list = &vars[who.index()];
            if list.is_empty() {
                return Err(Error::InvalidGame(format!("{who} has no random variables")));
            }
            for v in list {
                if !same_space(&v.space, space) {
                    return Err(Error::MismatchedSpace);
                }
                if v.target != who {
                    return Err(Error::InvalidParameter(format!("variable `{}` targets {}", v.name, v.target)));
                }
                if let Some(bad) = v.values.iter().find(|s| !strategies[who.index()].contains(s)) {
                    return Err(Error::UnknownLabel(bad.clone()));
                }
            }
        }
        Ok(Environment { space: Arc::clone(space), strategies, vars })
    }

    /// Environment with the game's strategy sets.
    pub fn for_game(
        g: &Game<T>,
        space: &Arc<SampleSpace<T>>,
        vars1: Vec<RandomVariable<T>>,
        vars2: Vec<RandomVariable<T>>,
    ) -> Result<Self> {
        Self::new(space, g.rows().to_vec(), g.cols().to_vec(), vars1, vars2)
    }

    pub fn space(&self) -> &Arc<SampleSpace<T>> {
        &self.space
    }

    pub fn strategies(&self, who: Player) -> &[String] {
        &self.strategies[who.index()]
    }

    pub fn vars(&self, who: Player) -> &[RandomVariable<T>] {
        &self.vars[who.index()]
    }

    pub fn var(&self, who: Player, name: &str) -> Option<&RandomVariable<T>> {
        self.vars[who.index()].iter().find(|v| v.name == name)
    }

    /// Closes both lists under relabelling `sigma: S_i -> S_i`.
    ///
    /// Originals come first, then for each original the images under every
    /// non-identity map in lexicographic order. Variables with identical
    /// realisations are kept once.
    pub fn close(&self) -> Result<Self> {
        let mut closed = self.clone();
        for who in [Player::One, Player::Two] {
            let labels = &self.strategies[who.index()];
            let maps = relabellings(labels.len())?;
            let mut out: Vec<RandomVariable<T>> = Vec::new();
            for v in &self.vars[who.index()] {
                push_unique(&mut out, v.clone());
            }
            for v in &self.vars[who.index()] {
                let idx: Vec<usize> =
                    v.values.iter().map(|s| labels.iter().position(|l| l == s).expect("validated label")).collect();
                for map in &maps {
                    if map.iter().enumerate().all(|(i, &m)| i == m) {
                        continue;
                    }
                    let values: Vec<String> = idx.iter().map(|&i| labels[map[i]].clone()).collect();
                    let name = if map.iter().all(|&m| m == map[0]) {
                        format!("const({})", labels[map[0]])
                    } else {
                        let img: Vec<&str> = map.iter().map(|&m| labels[m].as_str()).collect();
                        format!("({})∘{}", img.join(","), v.name)
                    };
                    let composed = RandomVariable { name, space: Arc::clone(&self.space), target: who, values };
                    push_unique(&mut out, composed);
                }
            }
            closed.vars[who.index()] = out;
        }
        Ok(closed)
    }

    /// The closed-list member with the same realisations as `v`.
    pub fn member(&self, who: Player, v: &RandomVariable<T>) -> Result<&RandomVariable<T>> {
        self.vars[who.index()].iter().find(|c| c.same_mapping(v)).ok_or_else(|| Error::Membership(v.name.clone()))
    }
}

fn push_unique<T: Real>(out: &mut Vec<RandomVariable<T>>, v: RandomVariable<T>) {
    if !out.iter().any(|o| o.same_mapping(&v)) {
        out.push(v);
    }
}

/// Every map `{0..n} -> {0..n}` as an image tuple, lexicographic.
fn relabellings(n: usize) -> Result<Vec<Vec<usize>>> {
    let count = (n as u32)
        .checked_pow(n as u32)
        .map(|c| c as usize)
        .filter(|&c| c <= CLOSURE_MAP_LIMIT)
        .ok_or_else(|| Error::SizeLimit(format!("{n}^{n} relabelling maps")))?;
    Ok((0..count)
        .map(|mut code| {
            let mut img = vec![0; n];
            for slot in img.iter_mut().rev() {
                *slot = code % n;
                code /= n;
            }
            img
        })
        .collect())
}

pub fn close_environment<T: Real>(e: &Environment<T>) -> Result<Environment<T>> {
    e.close()
}

/// One candidate deviation examined by an equilibrium check.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation<T> {
    pub player: Player,
    pub strategy: String,
    pub payoff: T,
    pub gain: T,
}

/// Verdict of an equilibrium check together with the full deviation table.
#[derive(Debug, Clone)]
pub struct EquilibriumReport<T> {
    pub equilibrium: bool,
    pub payoffs: (T, T),
    pub deviations: Vec<Deviation<T>>,
    /// Most profitable deviation when the profile is rejected.
    pub witness: Option<Deviation<T>>,
    pub max_gain: T,
}

/// Nash check of `(x, y)` in the game played with the closure of `e`.
pub fn is_env_nash<T: Real>(
    g: &Game<T>,
    e: &Environment<T>,
    x: &RandomVariable<T>,
    y: &RandomVariable<T>,
    eps: T,
) -> Result<EquilibriumReport<T>> {
    let closed = e.close()?;
    let x = closed.member(Player::One, x)?;
    let y = closed.member(Player::Two, y)?;
    let payoffs = env_payoff(g, x, y)?;

    let mut deviations = Vec::new();
    for dev in closed.vars(Player::One) {
        let pay = env_payoff(g, dev, y)?.0;
        deviations.push(Deviation {
            player: Player::One,
            strategy: dev.name.clone(),
            payoff: pay,
            gain: pay - payoffs.0,
        });
    }
    for dev in closed.vars(Player::Two) {
        let pay = env_payoff(g, x, dev)?.1;
        deviations.push(Deviation {
            player: Player::Two,
            strategy: dev.name.clone(),
            payoff: pay,
            gain: pay - payoffs.1,
        });
    }
    let best = deviations
        .iter()
        .fold(None::<&Deviation<T>>, |acc, d| match acc {
            Some(a) if a.gain >= d.gain => Some(a),
            _ => Some(d),
        })
        .expect("closed lists are nonempty");
    let max_gain = best.gain;
    let equilibrium = max_gain <= eps;
    Ok(EquilibriumReport { equilibrium, payoffs, witness: (!equilibrium).then(|| best.clone()), deviations, max_gain })
}

/// Every pure profile of the game played with the closure of `e` that no
/// player can improve on by more than `eps`, named by closed-list members.
pub fn env_nash_profiles<T: Real>(g: &Game<T>, e: &Environment<T>, eps: T) -> Result<Vec<Profile>> {
    let closed = e.close()?;
    let (v1, v2) = (closed.vars(Player::One), closed.vars(Player::Two));
    let mut table = Vec::with_capacity(v1.len() * v2.len());
    for x in v1 {
        for y in v2 {
            table.push(env_payoff(g, x, y)?);
        }
    }
    let at = |i: usize, j: usize| table[i * v2.len() + j];
    let mut out = Vec::new();
    for (i, x) in v1.iter().enumerate() {
        for (j, y) in v2.iter().enumerate() {
            let (p1, p2) = at(i, j);
            let best1 = (0..v1.len()).map(|k| at(k, j).0).fold(T::neg_infinity(), T::max);
            let best2 = (0..v2.len()).map(|k| at(i, k).1).fold(T::neg_infinity(), T::max);
            if best1 - p1 <= eps && best2 - p2 <= eps {
                out.push(Profile::new(x.name.clone(), y.name.clone()));
            }
        }
    }
    Ok(out)
}

/// Correlated-equilibrium check: deviations are exactly the relabellings of `x` and `y`.
pub fn is_correlated_equilibrium<T: Real>(
    g: &Game<T>,
    x: &RandomVariable<T>,
    y: &RandomVariable<T>,
    eps: T,
) -> Result<EquilibriumReport<T>> {
    let e = Environment::for_game(g, x.space(), vec![x.clone()], vec![y.clone()])?;
    is_env_nash(g, &e, x, y, eps)
}

/// A sample space with one variable per player.
pub type Realization<T> = (Arc<SampleSpace<T>>, RandomVariable<T>, RandomVariable<T>);

/// Realises a joint law on a sample space with one atom per support cell.
pub fn realize_joint<T: Real>(joint: &JointDistribution<T>) -> Result<Realization<T>> {
    let cells: Vec<(&Profile, T)> = joint.iter().map(|(p, &w)| (p, w)).collect();
    let space = Arc::new(SampleSpace::new(cells.iter().map(|(p, w)| (format!("{p}"), *w)))?);
    let x = RandomVariable::new("X", &space, Player::One, cells.iter().map(|(p, _)| p.s1.clone()))?;
    let y = RandomVariable::new("Y", &space, Player::Two, cells.iter().map(|(p, _)| p.s2.clone()))?;
    Ok((space, x, y))
}

/// Both sides of `P(X!=W) <= P(X!=Y) + P(Y!=Z) + P(Z!=W)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainBound<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn chain_disagreement_bound<T: Real>(
    space: &Arc<SampleSpace<T>>,
    x: &RandomVariable<T>,
    y: &RandomVariable<T>,
    z: &RandomVariable<T>,
    w: &RandomVariable<T>,
) -> Result<ChainBound<T>> {
    let vars = [x, y, z, w];
    for v in vars {
        if !same_space(v.space(), space) {
            return Err(Error::MismatchedSpace);
        }
    }
    let mut range: Vec<&str> = Vec::new();
    for v in vars {
        for s in v.range() {
            if !range.contains(&s) {
                range.push(s);
            }
        }
        if range.len() > 2 {
            return Err(Error::NonBinary(v.name.clone()));
        }
    }
    let dis = |a: &RandomVariable<T>, b: &RandomVariable<T>| -> T {
        a.values.iter().zip(&b.values).zip(space.probs()).filter(|((u, v), _)| u != v).map(|(_, &p)| p).sum()
    };
    let lhs = dis(x, w);
    let rhs = dis(x, y) + dis(y, z) + dis(z, w);
    Ok(ChainBound { lhs, rhs, holds: lhs <= rhs + T::tol(PAYOFF_TOL) })
}
