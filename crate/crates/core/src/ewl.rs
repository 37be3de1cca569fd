//! The Eisert-Wilkens-Lewenstein protocol: direct two-qubit simulation and
//! the equivalent unit-quaternion game.

use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{Game, Player, Profile, EQUILIBRIUM_TOL, PAYOFF_TOL};
use crate::linalg::{jacobi_eigen, Matrix};
use crate::penny::{flip, no_flip};
use crate::quantum::{apply_local, entangled_pair, StateVector, UnitaryOp, UNITARY_TOL};
use crate::scalar::Real;

/// Largest support accepted for a mixed quaternion strategy.
pub const MAX_SUPPORT: usize = 8;
pub const CALIBRATION_TRIALS: usize = 1000;
pub const CALIBRATION_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x05ee_de41;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Quaternion<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn from_array(v: [T; 4]) -> Self {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn one() -> Self {
        Quaternion::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Quaternion::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Quaternion::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Quaternion::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Negates the `j` component; matches matrix transpose.
    pub fn tau(self) -> Self {
        Quaternion::new(self.a, self.b, -self.c, self.d)
    }

    pub fn dot(self, o: Self) -> T {
        self.a * o.a + self.b * o.b + self.c * o.c + self.d * o.d
    }

    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Quaternion::new(self.a / n, self.b / n, self.c / n, self.d / n))
    }

    pub fn is_unit(self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::tol(PAYOFF_TOL)
    }

    /// Matrix of `r -> self * r` in the basis `1, i, j, k`.
    pub fn left_matrix(self) -> Matrix<T> {
        let Quaternion { a, b, c, d } = self;
        vec![vec![a, -b, -c, -d], vec![b, a, -d, c], vec![c, d, a, -b], vec![d, -c, b, a]]
    }

    /// Matrix of `r -> r * self`.
    pub fn right_matrix(self) -> Matrix<T> {
        let Quaternion { a, b, c, d } = self;
        vec![vec![a, -b, -c, -d], vec![b, a, d, -c], vec![c, -d, a, b], vec![d, c, -b, a]]
    }

    /// The special-unitary matrix `((a+bi, c+di), (-c+di, a-bi))`.
    pub fn to_su2(self) -> UnitaryOp<T> {
        let Quaternion { a, b, c, d } = self;
        UnitaryOp::unchecked(2, vec![Complex::new(a, b), Complex::new(c, d), Complex::new(-c, d), Complex::new(a, -b)])
            .expect("2x2")
    }

    /// Quaternion of a 2x2 unitary after dividing by a square root of its
    /// determinant (root with nonnegative real part, then nonnegative imaginary part).
    pub fn from_unitary(u: &UnitaryOp<T>) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", u.dim(), u.dim())));
        }
        let r = u.unitarity_residual();
        if r > T::tol(UNITARY_TOL) {
            return Err(Error::NotUnitary(r.as_f64()));
        }
        let mut root = u.det2()?.sqrt();
        if root.re < T::zero() || (root.re == T::zero() && root.im < T::zero()) {
            root = -root;
        }
        let (x, y) = (u.get(0, 0) / root, u.get(0, 1) / root);
        Ok(Quaternion::new(x.re, x.im, y.re, y.im))
    }

    /// Imaginary part as a 3-vector.
    pub fn vector(self) -> [T; 3] {
        [self.b, self.c, self.d]
    }

    /// 3x3 matrix of `v -> self v conj(self)` on pure quaternions.
    pub fn rotation_matrix(self) -> [[T; 3]; 3] {
        let Quaternion { a: w, b: x, c: y, d: z } = self;
        let two = T::lit(2.0);
        let one = T::one();
        [
            [one - two * (y * y + z * z), two * (x * y - w * z), two * (x * z + w * y)],
            [two * (x * y + w * z), one - two * (x * x + z * z), two * (y * z - w * x)],
            [two * (x * z - w * y), two * (y * z + w * x), one - two * (x * x + y * y)],
        ]
    }

    /// Inverse of [`Quaternion::rotation_matrix`] for a proper rotation (Shepperd's method).
    pub fn from_rotation_matrix(r: &[[T; 3]; 3]) -> Self {
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        let t = r[0][0] + r[1][1] + r[2][2];
        let q = if t >= r[0][0] && t >= r[1][1] && t >= r[2][2] {
            let w = (T::one() + t).sqrt() * half;
            let s = quarter / w;
            Quaternion::new(w, (r[2][1] - r[1][2]) * s, (r[0][2] - r[2][0]) * s, (r[1][0] - r[0][1]) * s)
        } else if r[0][0] >= r[1][1] && r[0][0] >= r[2][2] {
            let x = (T::one() + r[0][0] - r[1][1] - r[2][2]).sqrt() * half;
            let s = quarter / x;
            Quaternion::new((r[2][1] - r[1][2]) * s, x, (r[0][1] + r[1][0]) * s, (r[0][2] + r[2][0]) * s)
        } else if r[1][1] >= r[2][2] {
            let y = (T::one() - r[0][0] + r[1][1] - r[2][2]).sqrt() * half;
            let s = quarter / y;
            Quaternion::new((r[0][2] - r[2][0]) * s, (r[0][1] + r[1][0]) * s, y, (r[1][2] + r[2][1]) * s)
        } else {
            let z = (T::one() - r[0][0] - r[1][1] + r[2][2]).sqrt() * half;
            let s = quarter / z;
            Quaternion::new((r[1][0] - r[0][1]) * s, (r[0][2] + r[2][0]) * s, (r[1][2] + r[2][1]) * s, z)
        };
        q.normalized().unwrap_or_else(|_| Quaternion::one())
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Quaternion::new(
            self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        )
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl<T: Real> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |x: T| if x < T::zero() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}i{}{}j{}{}k",
            self.a,
            sign(self.b),
            self.b.abs(),
            sign(self.c),
            self.c.abs(),
            sign(self.d),
            self.d.abs()
        )
    }
}

/// Hamilton product.
pub fn quat_mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    p * q
}

/// Outcome cell of the 2x2 base game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    CC,
    CD,
    DC,
    DD,
}

impl Cell {
    pub const ALL: [Cell; 4] = [Cell::CC, Cell::CD, Cell::DC, Cell::DD];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Cell reached by the classical moves (`false` = C, `true` = D).
    pub fn from_moves(d1: bool, d2: bool) -> Cell {
        Cell::ALL[2 * usize::from(d1) + usize::from(d2)]
    }

    pub fn profile(self) -> Profile {
        let s = |d: bool| if d { "D" } else { "C" };
        let i = self.index();
        Profile::new(s(i >= 2), s(i % 2 == 1))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.profile())
    }
}

/// Probabilities indexed by [`Cell::index`].
pub type CellDistribution<T> = [T; 4];

/// Which outcome cell each squared component of `pq` pays out on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutcomeAssignment {
    slots: [Cell; 4],
}

impl OutcomeAssignment {
    /// Cells for the `B`, `C` and `D` slots; `A` always pays `(C,C)`.
    pub fn new(b: Cell, c: Cell, d: Cell) -> Result<Self> {
        let slots = [Cell::CC, b, c, d];
        let mut seen = [false; 4];
        for s in slots {
            if std::mem::replace(&mut seen[s.index()], true) {
                return Err(Error::BijectionMismatch(format!("cell {s} assigned twice")));
            }
        }
        Ok(OutcomeAssignment { slots })
    }

    /// `B -> (D,D)`, `C -> (C,D)`, `D -> (D,C)`.
    pub fn standard() -> Self {
        OutcomeAssignment { slots: [Cell::CC, Cell::DD, Cell::CD, Cell::DC] }
    }

    /// `B -> (C,D)`, `C -> (D,C)`, `D -> (D,D)`.
    pub fn printed() -> Self {
        OutcomeAssignment { slots: [Cell::CC, Cell::CD, Cell::DC, Cell::DD] }
    }

    pub fn slots(&self) -> [Cell; 4] {
        self.slots
    }

    pub fn cell(&self, slot: usize) -> Cell {
        self.slots[slot]
    }

    /// Spreads squared slot components onto cells.
    pub fn distribute<T: Real>(&self, m: Quaternion<T>) -> CellDistribution<T> {
        let mut out = [T::zero(); 4];
        for (s, x) in m.to_array().into_iter().enumerate() {
            out[self.slots[s].index()] += x * x;
        }
        out
    }
}

impl Default for OutcomeAssignment {
    fn default() -> Self {
        OutcomeAssignment::standard()
    }
}

impl fmt::Display for OutcomeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A²→{} B²→{} C²→{} D²→{}", self.slots[0], self.slots[1], self.slots[2], self.slots[3])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedQuatStrategy<T> {
    support: Vec<(Quaternion<T>, T)>,
}

impl<T: Real> MixedQuatStrategy<T> {
    pub fn new(support: Vec<(Quaternion<T>, T)>) -> Result<Self> {
        if support.is_empty() || support.len() > MAX_SUPPORT {
            return Err(Error::InvalidWeights(format!("support size {} outside 1..={MAX_SUPPORT}", support.len())));
        }
        for (q, w) in &support {
            if !q.is_unit() {
                return Err(Error::InvalidParameter(format!("{q} is not a unit quaternion")));
            }
            if !w.is_finite() || *w < T::zero() {
                return Err(Error::InvalidWeights(format!("weight {w}")));
            }
        }
        let total: T = support.iter().map(|(_, w)| *w).sum();
        if (total - T::one()).abs() > T::tol(PAYOFF_TOL) {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(MixedQuatStrategy { support })
    }

    pub fn pure(q: Quaternion<T>) -> Result<Self> {
        Self::new(vec![(q, T::one())])
    }

    pub fn uniform(qs: &[Quaternion<T>]) -> Result<Self> {
        let w = T::one() / T::from_usize_lossy(qs.len().max(1));
        Self::new(qs.iter().map(|&q| (q, w)).collect())
    }

    pub fn support(&self) -> &[(Quaternion<T>, T)] {
        &self.support
    }
}

/// Payoffs of `g` on the four cells, looked up by the labels `C` and `D`.
pub fn cell_payoffs<T: Real>(g: &Game<T>) -> Result<[(T, T); 4]> {
    for who in [Player::One, Player::Two] {
        let s = g.strategies(who);
        if s.len() != 2 || !s.iter().any(|x| x == "C") || !s.iter().any(|x| x == "D") {
            return Err(Error::InvalidGame(format!("{who} must have strategies C and D")));
        }
    }
    let mut out = [(T::zero(), T::zero()); 4];
    for c in Cell::ALL {
        out[c.index()] = g.payoff(&c.profile())?;
    }
    Ok(out)
}

fn slot_weights<T: Real>(cells: &[(T, T); 4], asg: &OutcomeAssignment, who: Player) -> [T; 4] {
    let mut d = [T::zero(); 4];
    for (s, w) in d.iter_mut().enumerate() {
        *w = who.of(cells[asg.cell(s).index()]);
    }
    d
}

pub fn quat_payoff<T: Real>(
    g: &Game<T>,
    p: Quaternion<T>,
    q: Quaternion<T>,
    asg: &OutcomeAssignment,
) -> Result<(T, T)> {
    let cells = cell_payoffs(g)?;
    Ok(payoff_from_cells(&cells, asg, p * q))
}

fn payoff_from_cells<T: Real>(cells: &[(T, T); 4], asg: &OutcomeAssignment, m: Quaternion<T>) -> (T, T) {
    let dist = asg.distribute(m);
    let mut acc = (T::zero(), T::zero());
    for (k, p) in dist.iter().enumerate() {
        acc.0 += *p * cells[k].0;
        acc.1 += *p * cells[k].1;
    }
    acc
}

/// Outcome distribution induced by a pair of mixtures.
pub fn mixed_quat_distribution<T: Real>(
    s1: &MixedQuatStrategy<T>,
    s2: &MixedQuatStrategy<T>,
    asg: &OutcomeAssignment,
) -> CellDistribution<T> {
    let mut out = [T::zero(); 4];
    for (p, wp) in &s1.support {
        for (q, wq) in &s2.support {
            let d = asg.distribute(*p * *q);
            for k in 0..4 {
                out[k] += *wp * *wq * d[k];
            }
        }
    }
    out
}

pub fn mixed_quat_payoff<T: Real>(
    g: &Game<T>,
    s1: &MixedQuatStrategy<T>,
    s2: &MixedQuatStrategy<T>,
    asg: &OutcomeAssignment,
) -> Result<(T, T)> {
    let cells = cell_payoffs(g)?;
    let d = mixed_quat_distribution(s1, s2, asg);
    let mut acc = (T::zero(), T::zero());
    for k in 0..4 {
        acc.0 += d[k] * cells[k].0;
        acc.1 += d[k] * cells[k].1;
    }
    Ok(acc)
}

/// Symmetric `M` with `payoff(r) = r^T M r` for the responding player.
pub fn best_response_matrix<T: Real>(
    g: &Game<T>,
    opponent: &MixedQuatStrategy<T>,
    who: Player,
    asg: &OutcomeAssignment,
) -> Result<Matrix<T>> {
    let cells = cell_payoffs(g)?;
    let diag = slot_weights(&cells, asg, who);
    let mut m = vec![vec![T::zero(); 4]; 4];
    for (q, w) in &opponent.support {
        // Player 1 plays r * q, Player 2 plays p * r
        let x = match who {
            Player::One => q.right_matrix(),
            Player::Two => q.left_matrix(),
        };
        for r in 0..4 {
            for c in 0..4 {
                let mut s = T::zero();
                for (k, dk) in diag.iter().enumerate() {
                    s += x[k][r] * *dk * x[k][c];
                }
                m[r][c] += *w * s;
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuatDeviation<T> {
    pub player: Player,
    pub quaternion: Quaternion<T>,
    pub payoff: T,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuatEqReport<T> {
    pub equilibrium: bool,
    pub payoffs: (T, T),
    /// Best pure-deviation payoff of each player.
    pub lambda_max: (T, T),
    pub gaps: (T, T),
    pub witness: Option<QuatDeviation<T>>,
}

pub fn is_quat_equilibrium<T: Real>(
    g: &Game<T>,
    s1: &MixedQuatStrategy<T>,
    s2: &MixedQuatStrategy<T>,
    asg: &OutcomeAssignment,
    eps: T,
) -> Result<QuatEqReport<T>> {
    let payoffs = mixed_quat_payoff(g, s1, s2, asg)?;
    let mut devs = Vec::with_capacity(2);
    for (who, opp) in [(Player::One, s2), (Player::Two, s1)] {
        let eig = jacobi_eigen(&best_response_matrix(g, opp, who, asg)?);
        let (lambda, v) = eig.max();
        devs.push(QuatDeviation {
            player: who,
            quaternion: Quaternion::from_array([v[0], v[1], v[2], v[3]]),
            payoff: lambda,
            gain: lambda - who.of(payoffs),
        });
    }
    let equilibrium = devs.iter().all(|d| d.gain <= eps);
    let witness = if equilibrium {
        None
    } else if devs[1].gain > devs[0].gain {
        Some(devs[1].clone())
    } else {
        Some(devs[0].clone())
    };
    Ok(QuatEqReport {
        equilibrium,
        payoffs,
        lambda_max: (devs[0].payoff, devs[1].payoff),
        gaps: (devs[0].gain, devs[1].gain),
        witness,
    })
}

/// Classical move operators: `N` for C and `F` for D.
fn classical_move<T: Real>(defect: bool) -> UnitaryOp<T> {
    if defect {
        flip()
    } else {
        no_flip()
    }
}

/// Referee basis `(s1 x s2) xi`, indexed by [`Cell::index`].
pub fn ewl_basis<T: Real>() -> [StateVector<T>; 4] {
    let xi = entangled_pair::<T>();
    Cell::ALL.map(|c| {
        let i = c.index();
        apply_local(&xi, &classical_move(i >= 2), &classical_move(i % 2 == 1)).expect("2x2 moves").normalized()
    })
}

/// Largest deviation of the referee basis' Gram matrix from the identity.
pub fn ewl_basis_residual<T: Real>() -> T {
    let basis = ewl_basis::<T>();
    let mut worst = T::zero();
    for (x, bx) in basis.iter().enumerate() {
        for (y, by) in basis.iter().enumerate() {
            let target = if x == y { T::one() } else { T::zero() };
            let g = bx.inner(by);
            worst = worst.max((g - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

/// Direct simulation: both players act on their half of the entangled pair
/// and the referee measures in [`ewl_basis`].
pub fn ewl_direct<T: Real>(u1: &UnitaryOp<T>, u2: &UnitaryOp<T>) -> Result<CellDistribution<T>> {
    for u in [u1, u2] {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", u.dim(), u.dim())));
        }
        let r = u.unitarity_residual();
        if r > T::tol(UNITARY_TOL) {
            return Err(Error::NotUnitary(r.as_f64()));
        }
    }
    let psi = apply_local(&entangled_pair(), u1, u2)?;
    let basis = ewl_basis::<T>();
    Ok([0, 1, 2, 3].map(|k| basis[k].inner(&psi).norm_sqr()))
}

/// Unit quaternion `e` with `P(cell) = <e, p tau(q)>^2` in the direct simulation.
pub fn measurement_quaternion<T: Real>(cell: Cell) -> Quaternion<T> {
    let i = cell.index();
    let s1 = classical_move::<T>(i >= 2);
    let s2 = classical_move::<T>(i % 2 == 1);
    // <(s1 x s2) xi, (u1 x u2) xi> = tr(conj(s2) s1^dagger u1 u2^T) / 2
    let m = s2.conj().compose(&s1.adjoint()).expect("2x2");
    Quaternion::from_unitary(&m).expect("unitary").conj()
}

/// Identification of the direct simulation with the quaternion game.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub assignment: OutcomeAssignment,
    /// Conjugating quaternion `a`: strategies map to `conj(a) p a`.
    pub a: Quaternion<f64>,
    /// Signs applied to the measurement quaternions of the `B`, `C`, `D` slots.
    pub signs: [f64; 3],
    /// Determinant of the unsigned frame.
    pub raw_det: f64,
    pub trials: usize,
    pub max_tv: f64,
}

impl Calibration {
    /// Quaternion-form prediction for a pair of unitaries.
    pub fn predict(&self, u1: &UnitaryOp<f64>, u2: &UnitaryOp<f64>) -> Result<CellDistribution<f64>> {
        let p = Quaternion::from_unitary(u1)?;
        let q = Quaternion::from_unitary(u2)?.tau();
        let a = self.a;
        let m = (a.conj() * p * a) * (a.conj() * q * a);
        Ok(self.assignment.distribute(m))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationOutcome {
    Found(Calibration),
    /// The measurement frame is not orthonormal, so no rotation can match it.
    Infeasible {
        residual: f64,
    },
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Random element of U(2): uniform unit quaternion times a random phase.
pub fn random_unitary<R: Rng>(rng: &mut R) -> UnitaryOp<f64> {
    let q = loop {
        let v = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
        let n: f64 = v.iter().map(|x| x * x).sum();
        if n > 1e-6 && n <= 1.0 {
            break Quaternion::from_array(v).normalized().expect("nonzero");
        }
    };
    let phase = Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    q.to_su2().scale(phase)
}

/// Derives a quaternion identification for `asg` and validates it on
/// [`CALIBRATION_TRIALS`] seeded random unitary pairs.
pub fn calibrate(asg: &OutcomeAssignment, seed: u64) -> Result<CalibrationOutcome> {
    // columns: images of i, j, k
    let cols: Vec<[f64; 3]> = (1..4).map(|s| measurement_quaternion::<f64>(asg.cell(s)).vector()).collect();
    let mut residual = 0.0f64;
    for x in 0..3 {
        for y in 0..3 {
            let dot: f64 = (0..3).map(|r| cols[x][r] * cols[y][r]).sum();
            residual = residual.max((dot - if x == y { 1.0 } else { 0.0 }).abs());
        }
    }
    if residual > 1e-9 {
        return Ok(CalibrationOutcome::Infeasible { residual });
    }
    let mut frame = [[0.0; 3]; 3];
    for (c, col) in cols.iter().enumerate() {
        for r in 0..3 {
            frame[r][c] = col[r];
        }
    }
    let raw_det = det3(&frame);
    // a reflection is repaired by flipping the last column
    let mut signs = [1.0; 3];
    if raw_det < 0.0 {
        signs[2] = -1.0;
        for row in frame.iter_mut() {
            row[2] = -row[2];
        }
    }
    let a = Quaternion::from_rotation_matrix(&frame);
    let mut cal = Calibration { assignment: *asg, a, signs, raw_det, trials: CALIBRATION_TRIALS, max_tv: 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CALIBRATION_TRIALS {
        let (u1, u2) = (random_unitary(&mut rng), random_unitary(&mut rng));
        let direct = ewl_direct(&u1, &u2)?;
        let predicted = cal.predict(&u1, &u2)?;
        let tv = 0.5 * direct.iter().zip(&predicted).map(|(x, y)| (x - y).abs()).sum::<f64>();
        cal.max_tv = cal.max_tv.max(tv);
    }
    if cal.max_tv > CALIBRATION_TOL {
        return Err(Error::ValidationFailure(format!("max total variation {:e}", cal.max_tv)));
    }
    Ok(CalibrationOutcome::Found(cal))
}

/// Equilibrium reached by the search, with its outcome distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct QuatFound {
    pub s1: MixedQuatStrategy<f64>,
    pub s2: MixedQuatStrategy<f64>,
    pub payoffs: (f64, f64),
    pub distribution: CellDistribution<f64>,
    pub hits: usize,
}

fn random_frame<R: Rng>(rng: &mut R) -> Vec<Quaternion<f64>> {
    let mut frame: Vec<[f64; 4]> = Vec::with_capacity(4);
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
    frame.into_iter().map(Quaternion::from_array).collect()
}

/// Equilibria of the game restricted to two frames, best payoff sum first.
fn restricted_equilibria(
    g: &Game<f64>,
    f1: &[Quaternion<f64>],
    f2: &[Quaternion<f64>],
    asg: &OutcomeAssignment,
) -> Result<Vec<(MixedQuatStrategy<f64>, MixedQuatStrategy<f64>)>> {
    let labels: Vec<String> = (0..4).map(|k| format!("e{k}")).collect();
    let cells = cell_payoffs(g)?;
    let sub = Game::from_fn("restricted", labels.clone(), labels.clone(), |i, j| {
        payoff_from_cells(&cells, asg, f1[i] * f2[j])
    })?;
    let mut eqs: Vec<_> = sub
        .mixed_nash_small()?
        .into_iter()
        .map(|(a, b)| {
            let v = sub.expected_payoff(&a, &b).map(|(x, y)| x + y).unwrap_or(f64::NEG_INFINITY);
            (v, a, b)
        })
        .collect();
    eqs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let lift = |m: &crate::game::MixedStrategy<f64>, frame: &[Quaternion<f64>]| -> Result<MixedQuatStrategy<f64>> {
        let w = m.aligned(&labels)?;
        let support: Vec<_> = frame.iter().zip(&w).filter(|(_, &x)| x > 1e-12).map(|(q, &x)| (*q, x)).collect();
        let total: f64 = support.iter().map(|(_, w)| w).sum();
        MixedQuatStrategy::new(support.into_iter().map(|(q, w)| (q, w / total)).collect())
    };
    eqs.iter().map(|(_, a, b)| Ok((lift(a, f1)?, lift(b, f2)?))).collect()
}

fn eigen_frame(m: &Matrix<f64>) -> Vec<Quaternion<f64>> {
    jacobi_eigen(m).vectors.iter().map(|v| Quaternion::from_array([v[0], v[1], v[2], v[3]])).collect()
}

/// Alternates between solving the game restricted to two orthonormal frames
/// and replacing each frame by the eigenbasis of the player's best-response
/// matrix. Start 0 uses the coordinate frame, the rest are seeded random
/// frames. Runs in parallel, deduplicated by outcome distribution and sorted
/// canonically. Not exhaustive.
pub fn search_quat_equilibria(
    g: &Game<f64>,
    asg: &OutcomeAssignment,
    starts: usize,
    seed: u64,
) -> Result<Vec<QuatFound>> {
    cell_payoffs(g)?;
    let runs: Vec<Option<QuatFound>> = (0..starts)
        .into_par_iter()
        .map(|k| -> Result<Option<QuatFound>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let (mut f1, mut f2) = if k == 0 {
                let basis = vec![Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()];
                (basis.clone(), basis)
            } else {
                (random_frame(&mut rng), random_frame(&mut rng))
            };
            for _ in 0..50 {
                let eqs = restricted_equilibria(g, &f1, &f2, asg)?;
                for (s1, s2) in &eqs {
                    let r = is_quat_equilibrium(g, s1, s2, asg, EQUILIBRIUM_TOL)?;
                    if r.equilibrium {
                        let distribution = mixed_quat_distribution(s1, s2, asg);
                        return Ok(Some(QuatFound {
                            s1: s1.clone(),
                            s2: s2.clone(),
                            payoffs: r.payoffs,
                            distribution,
                            hits: 1,
                        }));
                    }
                }
                let Some((s1, s2)) = eqs.first() else { return Ok(None) };
                f1 = eigen_frame(&best_response_matrix(g, s2, Player::One, asg)?);
                f2 = eigen_frame(&best_response_matrix(g, s1, Player::Two, asg)?);
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let mut found: Vec<QuatFound> = Vec::new();
    for run in runs.into_iter().flatten() {
        let close = |f: &QuatFound| f.distribution.iter().zip(&run.distribution).all(|(x, y)| (x - y).abs() <= 1e-9);
        match found.iter_mut().find(|f| close(f)) {
            Some(f) => f.hits += 1,
            None => found.push(run),
        }
    }
    found.sort_by(|a, b| {
        let key = |f: &QuatFound| (-(f.payoffs.0 + f.payoffs.1), f.distribution);
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}
