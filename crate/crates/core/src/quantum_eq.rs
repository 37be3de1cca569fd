//! Quantum environments, the games they induce, quantum equilibria, and
//! their private-information counterparts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::{is_correlated_equilibrium, realize_joint, EquilibriumReport, JointDistribution};
use crate::error::{Error, Result};
use crate::game::{Game, Player, Profile, EQUILIBRIUM_TOL, PAYOFF_TOL};
use crate::private_info::{sharp_game, PrivateInfoGame};
use crate::quantum::{
    apply_local, entangled_pair, measure_joint, rotation, OutcomeDistribution, StateVector, UnitaryOp,
};
use crate::scalar::Real;

/// Number of grid points used to bracket a best-response angle.
pub const ANGLE_GRID: usize = 4096;
/// Final bracket width of the golden-section refinement.
pub const GOLDEN_WIDTH: f64 = 1e-10;
/// Best-response steps per sweep start before it is abandoned.
pub const SWEEP_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyFamily<T> {
    /// Every real rotation `M(theta)`.
    Rotation,
    Explicit(Vec<UnitaryOp<T>>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyParam<T> {
    Angle(T),
    Index(usize),
}

impl<T: Real> StrategyParam<T> {
    pub fn angle(self) -> Option<T> {
        match self {
            StrategyParam::Angle(t) => Some(t),
            StrategyParam::Index(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumEnvironment<T> {
    xi: StateVector<T>,
    families: [StrategyFamily<T>; 2],
}

impl<T: Real> QuantumEnvironment<T> {
    pub fn new(xi: StateVector<T>, family1: StrategyFamily<T>, family2: StrategyFamily<T>) -> Result<Self> {
        let dims = xi.dims();
        for (fam, n) in [(&family1, dims.0), (&family2, dims.1)] {
            match fam {
                StrategyFamily::Rotation if n != 2 => {
                    return Err(Error::DimensionMismatch(format!("rotation family on a factor of dimension {n}")))
                }
                StrategyFamily::Explicit(ops) => {
                    if ops.is_empty() {
                        return Err(Error::InvalidParameter("empty operator list".into()));
                    }
                    if let Some(op) = ops.iter().find(|op| op.dim() != n) {
                        return Err(Error::DimensionMismatch(format!(
                            "operator of dimension {} on factor {n}",
                            op.dim()
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(QuantumEnvironment { xi, families: [family1, family2] })
    }

    /// Entangled pair with both players choosing any rotation.
    pub fn rotation_pair() -> Self {
        QuantumEnvironment { xi: entangled_pair(), families: [StrategyFamily::Rotation, StrategyFamily::Rotation] }
    }

    pub fn xi(&self) -> &StateVector<T> {
        &self.xi
    }

    pub fn family(&self, who: Player) -> &StrategyFamily<T> {
        &self.families[who.index()]
    }

    pub fn operator(&self, who: Player, param: StrategyParam<T>) -> Result<UnitaryOp<T>> {
        match (&self.families[who.index()], param) {
            (StrategyFamily::Rotation, StrategyParam::Angle(t)) if t.is_finite() => Ok(rotation(t)),
            (StrategyFamily::Explicit(ops), StrategyParam::Index(k)) => {
                ops.get(k).cloned().ok_or_else(|| Error::InvalidParameter(format!("operator index {k} out of range")))
            }
            (_, p) => Err(Error::InvalidParameter(format!("{p:?} does not fit the family of {who}"))),
        }
    }

    pub fn is_rotation_pair(&self) -> bool {
        self.families.iter().all(|f| matches!(f, StrategyFamily::Rotation))
    }

    /// Outcome distribution after both players apply their operators.
    pub fn outcome(&self, u: StrategyParam<T>, v: StrategyParam<T>) -> Result<OutcomeDistribution<T>> {
        let a = self.operator(Player::One, u)?;
        let b = self.operator(Player::Two, v)?;
        measure_joint(&apply_local(&self.xi, &a, &b)?)
    }
}

fn check_shape<T: Real>(g: &Game<T>, qe: &QuantumEnvironment<T>) -> Result<()> {
    if g.shape() != qe.xi.dims() {
        return Err(Error::DimensionMismatch(format!(
            "game is {:?} but the state has dims {:?}",
            g.shape(),
            qe.xi.dims()
        )));
    }
    Ok(())
}

fn dist_payoff<T: Real>(d: &OutcomeDistribution<T>, cell: impl Fn(usize, usize) -> (T, T)) -> (T, T) {
    let (n1, n2) = d.dims;
    let mut acc = (T::zero(), T::zero());
    for i in 0..n1 {
        for j in 0..n2 {
            let p = d.get(i, j);
            let (a, b) = cell(i, j);
            acc.0 += p * a;
            acc.1 += p * b;
        }
    }
    acc
}

/// Expected payoffs when basis outcome `k` is read as strategy `k` of `g`.
pub fn qgame_payoff<T: Real>(
    g: &Game<T>,
    qe: &QuantumEnvironment<T>,
    u: StrategyParam<T>,
    v: StrategyParam<T>,
) -> Result<(T, T)> {
    check_shape(g, qe)?;
    Ok(dist_payoff(&qe.outcome(u, v)?, |i, j| g.at(i, j)))
}

/// Induced joint law over strategy profiles.
pub fn quantum_profile_joint<T: Real>(
    g: &Game<T>,
    qe: &QuantumEnvironment<T>,
    u: StrategyParam<T>,
    v: StrategyParam<T>,
) -> Result<JointDistribution<T>> {
    check_shape(g, qe)?;
    let d = qe.outcome(u, v)?;
    let mut out = JointDistribution::new();
    for (i, s1) in g.rows().iter().enumerate() {
        for (j, s2) in g.cols().iter().enumerate() {
            out.insert(Profile::new(s1.clone(), s2.clone()), d.get(i, j));
        }
    }
    Ok(out)
}

/// Realises the induced joint law classically and runs the correlated-equilibrium check.
pub fn quantum_joint_is_correlated<T: Real>(
    g: &Game<T>,
    qe: &QuantumEnvironment<T>,
    u: StrategyParam<T>,
    v: StrategyParam<T>,
    eps: T,
) -> Result<EquilibriumReport<T>> {
    let joint = quantum_profile_joint(g, qe, u, v)?;
    let (_, x, y) = realize_joint(&joint)?;
    is_correlated_equilibrium(g, &x, &y, eps)
}

pub fn canonical_angle<T: Real>(t: T) -> T {
    let r = t % T::TAU();
    let r = if r < T::zero() { r + T::TAU() } else { r };
    if r >= T::TAU() {
        T::zero()
    } else {
        r
    }
}

fn golden_max<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let width = T::tol(GOLDEN_WIDTH);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let m = (a + b) * T::lit(0.5);
    (m, f(m))
}

/// Maximises a periodic objective over `[0, 2pi)`: grid of [`ANGLE_GRID`]
/// points, then golden-section refinement around the first grid maximiser.
/// Returns the smallest maximising angle when the refinement gains nothing.
pub fn maximize_angle<T: Real>(f: impl Fn(T) -> T) -> (T, T) {
    let step = T::TAU() / T::from_usize_lossy(ANGLE_GRID);
    let values: Vec<T> = (0..ANGLE_GRID).map(|k| f(T::from_usize_lossy(k) * step)).collect();
    let best = values.iter().copied().fold(T::neg_infinity(), T::max);
    let tie = T::tol(PAYOFF_TOL) * best.abs().max(T::one());
    let k = values.iter().position(|&v| v >= best - tie).expect("nonempty grid");
    let grid_theta = T::from_usize_lossy(k) * step;
    let (theta, value) = golden_max(&f, grid_theta - step, grid_theta + step);
    if value > values[k] + tie {
        (canonical_angle(theta), value)
    } else {
        (grid_theta, values[k])
    }
}

/// Best rotation angle for `who` against the opponent's fixed angle.
pub fn best_response_rotation<T: Real>(
    g: &Game<T>,
    qe: &QuantumEnvironment<T>,
    opponent: T,
    who: Player,
) -> Result<(T, T)> {
    if !qe.is_rotation_pair() {
        return Err(Error::FamilyKind);
    }
    check_shape(g, qe)?;
    let payoff = |t: T| -> T {
        let (u, v) = match who {
            Player::One => (t, opponent),
            Player::Two => (opponent, t),
        };
        let d = qe.outcome(StrategyParam::Angle(u), StrategyParam::Angle(v)).expect("rotation parameters");
        who.of(dist_payoff(&d, |i, j| g.at(i, j)))
    };
    Ok(maximize_angle(payoff))
}

fn best_response_any<T: Real>(
    qe: &QuantumEnvironment<T>,
    who: Player,
    value: impl Fn(StrategyParam<T>) -> Result<T>,
) -> Result<(StrategyParam<T>, T)> {
    match qe.family(who) {
        StrategyFamily::Rotation => {
            let (t, v) = maximize_angle(|t| value(StrategyParam::Angle(t)).expect("rotation parameters"));
            Ok((StrategyParam::Angle(t), v))
        }
        StrategyFamily::Explicit(ops) => {
            let mut best = (StrategyParam::Index(0), T::neg_infinity());
            for k in 0..ops.len() {
                let v = value(StrategyParam::Index(k))?;
                if v > best.1 {
                    best = (StrategyParam::Index(k), v);
                }
            }
            Ok(best)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDeviation<T> {
    pub player: Player,
    pub param: StrategyParam<T>,
    pub payoff: T,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumEqReport<T> {
    pub equilibrium: bool,
    pub payoffs: (T, T),
    /// Best response of each player against the other's current strategy.
    pub best_responses: [QuantumDeviation<T>; 2],
    pub witness: Option<QuantumDeviation<T>>,
}

pub fn is_quantum_equilibrium<T: Real>(
    g: &Game<T>,
    qe: &QuantumEnvironment<T>,
    u: StrategyParam<T>,
    v: StrategyParam<T>,
    eps: T,
) -> Result<QuantumEqReport<T>> {
    let payoffs = qgame_payoff(g, qe, u, v)?;
    let br1 = best_response_any(qe, Player::One, |p| Ok(qgame_payoff(g, qe, p, v)?.0))?;
    let br2 = best_response_any(qe, Player::Two, |p| Ok(qgame_payoff(g, qe, u, p)?.1))?;
    let dev = |player: Player, (param, payoff): (StrategyParam<T>, T)| QuantumDeviation {
        player,
        param,
        payoff,
        gain: payoff - player.of(payoffs),
    };
    let best_responses = [dev(Player::One, br1), dev(Player::Two, br2)];
    let top = if best_responses[1].gain > best_responses[0].gain { &best_responses[1] } else { &best_responses[0] };
    let equilibrium = top.gain <= eps;
    Ok(QuantumEqReport { equilibrium, payoffs, witness: (!equilibrium).then(|| top.clone()), best_responses })
}

/// Player-indexed map from type labels to strategy parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoStrategy<T> {
    pub assignment: Vec<StrategyParam<T>>,
}

impl<T: Real> InfoStrategy<T> {
    pub fn angles(angles: &[T]) -> Self {
        InfoStrategy { assignment: angles.iter().map(|&t| StrategyParam::Angle(t)).collect() }
    }
}

fn check_private<T: Real>(
    pg: &PrivateInfoGame<T>,
    qe: &QuantumEnvironment<T>,
    f1: &InfoStrategy<T>,
    f2: &InfoStrategy<T>,
) -> Result<()> {
    let dims = qe.xi.dims();
    if (pg.strategies(Player::One).len(), pg.strategies(Player::Two).len()) != dims {
        return Err(Error::DimensionMismatch("strategy sets do not match the state".into()));
    }
    if f1.assignment.len() != pg.info(Player::One).len() || f2.assignment.len() != pg.info(Player::Two).len() {
        return Err(Error::InvalidParameter("strategy must assign every type".into()));
    }
    Ok(())
}

/// Type-weighted payoff contribution of player `who` holding type `own`.
fn type_value<T: Real>(
    pg: &PrivateInfoGame<T>,
    qe: &QuantumEnvironment<T>,
    who: Player,
    own: usize,
    mine: StrategyParam<T>,
    theirs: &InfoStrategy<T>,
) -> Result<T> {
    let mut total = T::zero();
    for (k, &other) in theirs.assignment.iter().enumerate() {
        let (a1, a2, u, v) = match who {
            Player::One => (own, k, mine, other),
            Player::Two => (k, own, other, mine),
        };
        let p = pg.type_prob(a1, a2);
        if p == T::zero() {
            continue;
        }
        let d = qe.outcome(u, v)?;
        total += p * who.of(dist_payoff(&d, |i, j| pg.payoff(a1, a2, i, j)));
    }
    Ok(total)
}

pub fn private_quantum_payoff<T: Real>(
    pg: &PrivateInfoGame<T>,
    qe: &QuantumEnvironment<T>,
    f1: &InfoStrategy<T>,
    f2: &InfoStrategy<T>,
) -> Result<(T, T)> {
    check_private(pg, qe, f1, f2)?;
    let mut acc = (T::zero(), T::zero());
    for (a1, &u) in f1.assignment.iter().enumerate() {
        for (a2, &v) in f2.assignment.iter().enumerate() {
            let p = pg.type_prob(a1, a2);
            if p == T::zero() {
                continue;
            }
            let (x, y) = dist_payoff(&qe.outcome(u, v)?, |i, j| pg.payoff(a1, a2, i, j));
            acc.0 += p * x;
            acc.1 += p * y;
        }
    }
    Ok(acc)
}

/// Best response of one type of one player, holding everything else fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDeviation<T> {
    pub player: Player,
    pub type_label: String,
    pub current: T,
    pub best: StrategyParam<T>,
    pub best_value: T,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateEqReport<T> {
    pub equilibrium: bool,
    pub payoffs: (T, T),
    pub per_type: Vec<TypeDeviation<T>>,
    /// Total gain available to each player from optimising all of their types.
    pub gains: (T, T),
    pub witness: Option<TypeDeviation<T>>,
}

/// A player's payoff is a sum over own types, each depending only on the
/// strategy used at that type, so best responses are computed per type.
pub fn is_private_quantum_equilibrium<T: Real>(
    pg: &PrivateInfoGame<T>,
    qe: &QuantumEnvironment<T>,
    f1: &InfoStrategy<T>,
    f2: &InfoStrategy<T>,
    eps: T,
) -> Result<PrivateEqReport<T>> {
    check_private(pg, qe, f1, f2)?;
    let payoffs = private_quantum_payoff(pg, qe, f1, f2)?;
    let mut per_type = Vec::new();
    let mut gains = (T::zero(), T::zero());
    for (who, mine, theirs) in [(Player::One, f1, f2), (Player::Two, f2, f1)] {
        for (own, &param) in mine.assignment.iter().enumerate() {
            let current = type_value(pg, qe, who, own, param, theirs)?;
            let (best, best_value) = best_response_any(qe, who, |p| type_value(pg, qe, who, own, p, theirs))?;
            let gain = best_value - current;
            match who {
                Player::One => gains.0 += gain,
                Player::Two => gains.1 += gain,
            }
            per_type.push(TypeDeviation {
                player: who,
                type_label: pg.info(who)[own].clone(),
                current,
                best,
                best_value,
                gain,
            });
        }
    }
    let equilibrium = gains.0 <= eps && gains.1 <= eps;
    let witness = if equilibrium {
        None
    } else {
        per_type
            .iter()
            .fold(None::<&TypeDeviation<T>>, |acc, d| match acc {
                Some(a) if a.gain >= d.gain => Some(a),
                _ => Some(d),
            })
            .cloned()
    };
    Ok(PrivateEqReport { equilibrium, payoffs, per_type, gains, witness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBound<T> {
    /// Best Player-1 payoff over all pure behavioural profiles.
    pub value: T,
    pub profile: Profile,
    /// Set when the two players' payoffs differ somewhere; `value` is still
    /// reported for Player 1.
    pub asymmetric: bool,
}

/// Upper bound on what any classical environment can deliver: classical play
/// mixes pure behavioural profiles and payoffs are affine in the mixture.
pub fn classical_value_bound<T: Real>(pg: &PrivateInfoGame<T>) -> Result<ClassicalBound<T>> {
    let g = sharp_game(pg)?;
    let (n, m) = g.shape();
    let tol = T::tol(PAYOFF_TOL);
    let mut best = (T::neg_infinity(), 0, 0);
    let mut asymmetric = false;
    for i in 0..n {
        for j in 0..m {
            let (a, b) = g.at(i, j);
            asymmetric |= (a - b).abs() > tol;
            if a > best.0 + tol {
                best = (a, i, j);
            }
        }
    }
    Ok(ClassicalBound {
        value: best.0,
        profile: Profile::new(g.rows()[best.1].clone(), g.cols()[best.2].clone()),
        asymmetric,
    })
}

/// An equilibrium found by a search sweep, reported with canonical angles.
#[derive(Debug, Clone, PartialEq)]
pub struct FoundEquilibrium<T> {
    pub angles1: Vec<T>,
    pub angles2: Vec<T>,
    pub payoffs: (T, T),
    /// Outcome distribution of every type cell, row-major over types.
    pub cells: Vec<OutcomeDistribution<T>>,
    pub hits: usize,
}

fn cells_close<T: Real>(a: &[OutcomeDistribution<T>], b: &[OutcomeDistribution<T>], tol: T) -> bool {
    a.iter().zip(b).all(|(x, y)| x.total_variation(y) <= tol)
}

/// Alternating per-type best-response iteration from seeded random starts.
/// Results are deduplicated up to equivalence (equal per-cell outcome
/// distributions) and sorted by decreasing Player-1 payoff. Not exhaustive.
pub fn sweep_private_equilibria(
    pg: &PrivateInfoGame<f64>,
    qe: &QuantumEnvironment<f64>,
    starts: usize,
    seed: u64,
) -> Result<Vec<FoundEquilibrium<f64>>> {
    if !qe.is_rotation_pair() {
        return Err(Error::FamilyKind);
    }
    let (n1, n2) = (pg.info(Player::One).len(), pg.info(Player::Two).len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<FoundEquilibrium<f64>> = Vec::new();
    let eps = EQUILIBRIUM_TOL;
    for _ in 0..starts {
        let mut f1 =
            InfoStrategy::angles(&(0..n1).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>());
        let mut f2 =
            InfoStrategy::angles(&(0..n2).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect::<Vec<_>>());
        let mut converged = false;
        for _ in 0..SWEEP_ITERATIONS {
            let report = is_private_quantum_equilibrium(pg, qe, &f1, &f2, eps)?;
            if report.equilibrium {
                converged = true;
                break;
            }
            // move the single most profitable type
            let w = report.witness.expect("rejected profile has a witness");
            let idx = pg.info(w.player).iter().position(|t| *t == w.type_label).expect("own type");
            match w.player {
                Player::One => f1.assignment[idx] = w.best,
                Player::Two => f2.assignment[idx] = w.best,
            }
        }
        if !converged {
            continue;
        }
        let payoffs = private_quantum_payoff(pg, qe, &f1, &f2)?;
        let mut cells = Vec::with_capacity(n1 * n2);
        for &u in &f1.assignment {
            for &v in &f2.assignment {
                cells.push(qe.outcome(u, v)?);
            }
        }
        if let Some(hit) = found.iter_mut().find(|e| cells_close(&e.cells, &cells, 1e-6)) {
            hit.hits += 1;
            continue;
        }
        let canon =
            |f: &InfoStrategy<f64>| f.assignment.iter().map(|p| canonical_angle(p.angle().unwrap_or(0.0))).collect();
        found.push(FoundEquilibrium { angles1: canon(&f1), angles2: canon(&f2), payoffs, cells, hits: 1 });
    }
    found.sort_by(|a, b| b.payoffs.0.partial_cmp(&a.payoffs.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(found)
}

/// Best-response iteration for an ordinary game in a rotation environment.
pub fn search_rotation_equilibria(
    g: &Game<f64>,
    qe: &QuantumEnvironment<f64>,
    starts: usize,
    seed: u64,
) -> Result<Vec<FoundEquilibrium<f64>>> {
    let pg = PrivateInfoGame::new(
        g.name(),
        vec!["all".into()],
        vec!["all".into()],
        vec![1.0],
        g.rows().to_vec(),
        g.cols().to_vec(),
        |_, _, i, j| g.at(i, j),
    )?;
    sweep_private_equilibria(&pg, qe, starts, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    const A: fn(f64) -> StrategyParam<f64> = StrategyParam::Angle;

    #[test]
    fn qgame_payoff_examples() {
        let g = builtin::ic3_game::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        let (a, b) = qgame_payoff(&g, &qe, A(FRAC_PI_2), A(0.0)).unwrap();
        assert!((a - 1.5).abs() < 1e-12 && (b - 1.5).abs() < 1e-12);
        let (a, b) = qgame_payoff(&g, &qe, A(0.8), A(0.8)).unwrap();
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        let zero = Game::<f64>::from_fn("z", ["C", "D"], ["C", "D"], |_, _| (0.0, 0.0)).unwrap();
        assert_eq!(qgame_payoff(&zero, &qe, A(0.3), A(2.0)).unwrap(), (0.0, 0.0));
        assert!(qgame_payoff(&g, &qe, StrategyParam::Index(0), A(0.0)).is_err());
    }

    #[test]
    fn best_response_examples() {
        let g = builtin::ic3_game::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        let (t, v) = best_response_rotation(&g, &qe, 0.0, Player::One).unwrap();
        assert!((t - FRAC_PI_2).abs() < 1e-7, "{t}");
        assert!((v - 1.5).abs() < 1e-12);
        let (t, _) = best_response_rotation(&g, &qe, FRAC_PI_4, Player::One).unwrap();
        assert!((t - 3.0 * FRAC_PI_4).abs() < 1e-7, "{t}");

        let ones = Game::<f64>::from_fn("ones", ["C", "D"], ["C", "D"], |_, _| (1.0, 1.0)).unwrap();
        let (t, v) = best_response_rotation(&ones, &qe, 1.0, Player::Two).unwrap();
        assert_eq!(t, 0.0);
        assert!((v - 1.0).abs() < 1e-12);

        let explicit = QuantumEnvironment::new(
            entangled_pair(),
            StrategyFamily::Explicit(vec![UnitaryOp::identity(2)]),
            StrategyFamily::Rotation,
        )
        .unwrap();
        assert_eq!(best_response_rotation(&g, &explicit, 0.0, Player::One), Err(Error::FamilyKind));
    }

    #[test]
    fn quantum_equilibrium_examples() {
        let g = builtin::ic3_game::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        let r = is_quantum_equilibrium(&g, &qe, A(FRAC_PI_2), A(0.0), 1e-9).unwrap();
        assert!(r.equilibrium);
        let r = is_quantum_equilibrium(&g, &qe, A(0.0), A(0.0), 1e-9).unwrap();
        assert!(!r.equilibrium);
        let w = r.witness.unwrap();
        assert_eq!(w.player, Player::One);
        assert!((w.param.angle().unwrap() - FRAC_PI_2).abs() < 1e-7);
        assert!((w.gain - 1.5).abs() < 1e-12);
        let ones = Game::<f64>::from_fn("ones", ["C", "D"], ["C", "D"], |_, _| (1.0, 1.0)).unwrap();
        assert!(is_quantum_equilibrium(&ones, &qe, A(0.4), A(2.2), 1e-9).unwrap().equilibrium);
    }

    #[test]
    fn explicit_families_enumerate() {
        let g = builtin::ic3_game::<f64>();
        let ops = vec![UnitaryOp::identity(2), rotation(FRAC_PI_2)];
        let qe = QuantumEnvironment::new(
            entangled_pair(),
            StrategyFamily::Explicit(ops.clone()),
            StrategyFamily::Explicit(ops),
        )
        .unwrap();
        let r = is_quantum_equilibrium(&g, &qe, StrategyParam::Index(1), StrategyParam::Index(0), 1e-9).unwrap();
        assert!(r.equilibrium);
        assert!((r.payoffs.0 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn joints() {
        let g = builtin::ic3_game::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        let j = quantum_profile_joint(&g, &qe, A(FRAC_PI_2), A(0.0)).unwrap();
        assert!((j[&Profile::new("C", "D")] - 0.5).abs() < 1e-12);
        assert!((j[&Profile::new("D", "C")] - 0.5).abs() < 1e-12);
        assert!(j[&Profile::new("C", "C")] < 1e-12);
        assert!(quantum_joint_is_correlated(&g, &qe, A(FRAC_PI_2), A(0.0), 1e-9).unwrap().equilibrium);

        let j = quantum_profile_joint(&g, &qe, A(1.0), A(1.0)).unwrap();
        assert!((j[&Profile::new("C", "C")] - 0.5).abs() < 1e-12);
        assert!((j[&Profile::new("D", "D")] - 0.5).abs() < 1e-12);

        let product = QuantumEnvironment::new(
            StateVector::basis((2, 2), 0, 0),
            StrategyFamily::Rotation,
            StrategyFamily::Rotation,
        )
        .unwrap();
        let j = quantum_profile_joint(&g, &product, A(0.3), A(1.2)).unwrap();
        let p1c = j[&Profile::new("C", "C")] + j[&Profile::new("C", "D")];
        let p2c = j[&Profile::new("C", "C")] + j[&Profile::new("D", "C")];
        assert!((j[&Profile::new("C", "C")] - p1c * p2c).abs() < 1e-12);
    }

    #[test]
    fn iid1_profiles() {
        let pg = builtin::iid1::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        let a1 = InfoStrategy::angles(&[0.0, FRAC_PI_2]);
        let (p, q) = private_quantum_payoff(&pg, &qe, &a1, &a1).unwrap();
        assert!((p - 0.75).abs() < 1e-12 && (q - 0.75).abs() < 1e-12);
        assert!(is_private_quantum_equilibrium(&pg, &qe, &a1, &a1, 1e-9).unwrap().equilibrium);

        let theta = InfoStrategy::angles(&[FRAC_PI_8, 3.0 * FRAC_PI_8]);
        let phi = InfoStrategy::angles(&[0.0, 3.0 * FRAC_PI_4]);
        let (p, _) = private_quantum_payoff(&pg, &qe, &theta, &phi).unwrap();
        assert!((p - (0.5 + 2f64.sqrt() / 4.0)).abs() < 1e-12);
        let r = is_private_quantum_equilibrium(&pg, &qe, &theta, &phi, 1e-9).unwrap();
        assert!(r.equilibrium, "{:?}", r.gains);

        let zero = InfoStrategy::angles(&[0.0, 0.0]);
        let r = is_private_quantum_equilibrium(&pg, &qe, &zero, &zero, 1e-9).unwrap();
        assert!(!r.equilibrium);
        assert!(r.witness.unwrap().gain > 0.1);
    }

    #[test]
    fn classical_bound_examples() {
        let b = classical_value_bound(&builtin::iid1::<f64>()).unwrap();
        assert!((b.value - 0.75).abs() < 1e-12);
        assert!(!b.asymmetric);

        let coord =
            Game::<f64>::from_fn(
                "c",
                ["C", "D"],
                ["C", "D"],
                |i, j| if i == j && i == 0 { (1.0, 1.0) } else { (0.0, 0.0) },
            )
            .unwrap();
        let pg = PrivateInfoGame::new(
            "coord",
            vec!["r".into(), "g".into()],
            vec!["r".into(), "g".into()],
            vec![0.25; 4],
            coord.rows().to_vec(),
            coord.cols().to_vec(),
            |_, _, i, j| coord.at(i, j),
        )
        .unwrap();
        assert!((classical_value_bound(&pg).unwrap().value - 1.0).abs() < 1e-12);
        let zero = pg.with_type_dist(vec![0.25; 4]).unwrap();
        let zero = PrivateInfoGame::new(
            "z",
            zero.info(Player::One).to_vec(),
            zero.info(Player::Two).to_vec(),
            vec![0.25; 4],
            coord.rows().to_vec(),
            coord.cols().to_vec(),
            |_, _, _, _| (0.0, 0.0),
        )
        .unwrap();
        assert_eq!(classical_value_bound(&zero).unwrap().value, 0.0);
    }

    #[test]
    fn common_rotation_shift_invariance() {
        let g = builtin::ic3_game::<f64>();
        let qe = QuantumEnvironment::rotation_pair();
        for k in 0..16 {
            let (t, f, s) = (0.1 * k as f64, 0.37 * k as f64 - 1.0, PI / 7.0 * k as f64);
            let a = qgame_payoff(&g, &qe, A(t), A(f)).unwrap();
            let b = qgame_payoff(&g, &qe, A(t + s), A(f + s)).unwrap();
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_angles() {
        assert!((canonical_angle(-FRAC_PI_2) - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert_eq!(canonical_angle(0.0), 0.0);
        assert!(canonical_angle(7.0 * PI) < 2.0 * PI);
    }
}
