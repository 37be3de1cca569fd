//! Finite two-player normal-form games, mixed strategies and equilibria.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{solve_basic, Matrix};
use crate::scalar::Real;

/// Absolute tolerance for payoff comparisons.
pub const PAYOFF_TOL: f64 = 1e-12;
/// Tolerance used to certify mixed equilibria and to merge duplicates.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;
/// Largest strategy count per player accepted by [`Game::mixed_nash_small`].
pub const SUPPORT_ENUMERATION_LIMIT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Picks this player's component of a payoff pair.
    pub fn of<T: Copy>(self, pair: (T, T)) -> T {
        match self {
            Player::One => pair.0,
            Player::Two => pair.1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Player {}", self.index() + 1)
    }
}

/// A pure strategy profile `(s1, s2)` addressed by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    pub s1: String,
    pub s2: String,
}

impl Profile {
    pub fn new(s1: impl Into<String>, s2: impl Into<String>) -> Self {
        Profile { s1: s1.into(), s2: s2.into() }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s1, self.s2)
    }
}

fn index_labels(labels: &[String], who: &str) -> Result<HashMap<String, usize>> {
    if labels.is_empty() {
        return Err(Error::InvalidGame(format!("{who} has no strategies")));
    }
    let mut map = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if map.insert(l.clone(), i).is_some() {
            return Err(Error::InvalidGame(format!("duplicate {who} label `{l}`")));
        }
    }
    Ok(map)
}

/// Two-player finite game with a dense row-major payoff table.
#[derive(Debug, Clone)]
pub struct Game<T> {
    name: String,
    rows: Vec<String>,
    cols: Vec<String>,
    table: Vec<(T, T)>,
    row_index: HashMap<String, usize>,
    col_index: HashMap<String, usize>,
}

impl<T: Real> PartialEq for Game<T> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.rows == other.rows && self.cols == other.cols && self.table == other.table
    }
}

impl<T: Real> Game<T> {
    /// Builds a game from a row-major payoff table.
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        rows: impl IntoIterator<Item = S>,
        cols: impl IntoIterator<Item = S>,
        table: Vec<(T, T)>,
    ) -> Result<Self> {
        let rows: Vec<String> = rows.into_iter().map(Into::into).collect();
        let cols: Vec<String> = cols.into_iter().map(Into::into).collect();
        let row_index = index_labels(&rows, "row")?;
        let col_index = index_labels(&cols, "column")?;
        if table.len() != rows.len() * cols.len() {
            return Err(Error::InvalidGame(format!(
                "expected {} payoff cells, got {}",
                rows.len() * cols.len(),
                table.len()
            )));
        }
        if table.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidGame("non-finite payoff".into()));
        }
        Ok(Game { name: name.into(), rows, cols, table, row_index, col_index })
    }

    pub fn from_fn<S: Into<String>>(
        name: impl Into<String>,
        rows: impl IntoIterator<Item = S>,
        cols: impl IntoIterator<Item = S>,
        f: impl Fn(usize, usize) -> (T, T),
    ) -> Result<Self> {
        let rows: Vec<String> = rows.into_iter().map(Into::into).collect();
        let cols: Vec<String> = cols.into_iter().map(Into::into).collect();
        let table = (0..rows.len()).flat_map(|i| (0..cols.len()).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self::new(name, rows, cols, table)
    }

    /// Builds a game from labelled cells; every cell must appear exactly once.
    pub fn from_cells(
        name: impl Into<String>,
        rows: Vec<String>,
        cols: Vec<String>,
        cells: impl IntoIterator<Item = (String, String, (T, T))>,
    ) -> Result<Self> {
        let row_index = index_labels(&rows, "row")?;
        let col_index = index_labels(&cols, "column")?;
        let mut table: Vec<Option<(T, T)>> = vec![None; rows.len() * cols.len()];
        for (r, c, pay) in cells {
            let i = *row_index.get(&r).ok_or_else(|| Error::UnknownLabel(r.clone()))?;
            let j = *col_index.get(&c).ok_or_else(|| Error::UnknownLabel(c.clone()))?;
            let slot = &mut table[i * cols.len() + j];
            if slot.is_some() {
                return Err(Error::InvalidGame(format!("cell ({r},{c}) given twice")));
            }
            *slot = Some(pay);
        }
        let mut full = Vec::with_capacity(table.len());
        for (k, cell) in table.into_iter().enumerate() {
            match cell {
                Some(p) => full.push(p),
                None => {
                    return Err(Error::InvalidGame(format!(
                        "missing cell ({},{})",
                        rows[k / cols.len()],
                        cols[k % cols.len()]
                    )))
                }
            }
        }
        Self::new(name, rows, cols, full)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn strategies(&self, who: Player) -> &[String] {
        match who {
            Player::One => &self.rows,
            Player::Two => &self.cols,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Payoff pair at cell `(i, j)` by index.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> (T, T) {
        self.table[i * self.cols.len() + j]
    }

    pub fn index_of(&self, who: Player, label: &str) -> Result<usize> {
        let map = match who {
            Player::One => &self.row_index,
            Player::Two => &self.col_index,
        };
        map.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn payoff(&self, p: &Profile) -> Result<(T, T)> {
        let i = self.index_of(Player::One, &p.s1)?;
        let j = self.index_of(Player::Two, &p.s2)?;
        Ok(self.at(i, j))
    }

    fn is_best_reply(&self, i: usize, j: usize, tol: T) -> bool {
        let (p1, p2) = self.at(i, j);
        let row_ok = (0..self.rows.len()).all(|k| self.at(k, j).0 <= p1 + tol);
        let col_ok = (0..self.cols.len()).all(|k| self.at(i, k).1 <= p2 + tol);
        row_ok && col_ok
    }

    /// All pure Nash equilibria in row-major order; ties are kept.
    pub fn pure_nash(&self) -> Vec<Profile> {
        let tol = T::tol(PAYOFF_TOL);
        let mut out = Vec::new();
        for i in 0..self.rows.len() {
            for j in 0..self.cols.len() {
                if self.is_best_reply(i, j, tol) {
                    out.push(Profile::new(self.rows[i].clone(), self.cols[j].clone()));
                }
            }
        }
        out
    }

    /// Expected payoffs under the product of two mixed strategies.
    pub fn expected_payoff(&self, m1: &MixedStrategy<T>, m2: &MixedStrategy<T>) -> Result<(T, T)> {
        let x = m1.aligned(&self.rows)?;
        let y = m2.aligned(&self.cols)?;
        Ok(self.expected_payoff_dense(&x, &y))
    }

    pub fn expected_payoff_dense(&self, x: &[T], y: &[T]) -> (T, T) {
        let mut acc = (T::zero(), T::zero());
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let w = xi * yj;
                let (a, b) = self.at(i, j);
                acc.0 += w * a;
                acc.1 += w * b;
            }
        }
        acc
    }

    /// Payoff of each pure strategy of `who` against the opponent's dense mixture.
    pub fn pure_replies(&self, who: Player, opponent: &[T]) -> Vec<T> {
        match who {
            Player::One => (0..self.rows.len())
                .map(|i| opponent.iter().enumerate().map(|(j, &w)| w * self.at(i, j).0).sum())
                .collect(),
            Player::Two => (0..self.cols.len())
                .map(|j| opponent.iter().enumerate().map(|(i, &w)| w * self.at(i, j).1).sum())
                .collect(),
        }
    }

    /// Largest gain either player can obtain from a pure deviation.
    pub fn max_deviation_gain(&self, x: &[T], y: &[T]) -> T {
        let (v1, v2) = self.expected_payoff_dense(x, y);
        let best1 = self.pure_replies(Player::One, y).into_iter().fold(T::neg_infinity(), T::max);
        let best2 = self.pure_replies(Player::Two, x).into_iter().fold(T::neg_infinity(), T::max);
        (best1 - v1).max(best2 - v2)
    }

    /// All mixed equilibria found by support enumeration (games up to 4x4).
    ///
    /// Each support pair contributes the basic solution of its indifference
    /// system. Candidates are certified against all pure deviations and
    /// merged when their joint distributions agree in total variation.
    pub fn mixed_nash_small(&self) -> Result<Vec<(MixedStrategy<T>, MixedStrategy<T>)>> {
        let (n, m) = self.shape();
        if n > SUPPORT_ENUMERATION_LIMIT || m > SUPPORT_ENUMERATION_LIMIT {
            return Err(Error::SizeLimit(format!(
                "support enumeration handles at most {SUPPORT_ENUMERATION_LIMIT}x{SUPPORT_ENUMERATION_LIMIT}, got {n}x{m}"
            )));
        }
        let eps = T::tol(EQUILIBRIUM_TOL);
        let mut found: Vec<(Vec<T>, Vec<T>)> = Vec::new();
        let row_sets = subsets(n);
        let col_sets = subsets(m);
        let mut pairs: Vec<(&Vec<usize>, &Vec<usize>)> =
            row_sets.iter().flat_map(|r| col_sets.iter().map(move |c| (r, c))).collect();
        pairs.sort_by_key(|(r, c)| (r.len() + c.len(), r.len()));

        for (rs, cs) in pairs {
            let Some(y) = self.indifference(Player::One, rs, cs) else { continue };
            let Some(x) = self.indifference(Player::Two, cs, rs) else { continue };
            let (Some(x), Some(y)) = (clamp_weights(x, n, rs), clamp_weights(y, m, cs)) else {
                continue;
            };
            if self.max_deviation_gain(&x, &y) > eps {
                continue;
            }
            if found.iter().any(|(fx, fy)| joint_tv(fx, fy, &x, &y) < eps) {
                continue;
            }
            found.push((x, y));
        }
        Ok(found
            .into_iter()
            .map(|(x, y)| (MixedStrategy::from_dense(&self.rows, &x), MixedStrategy::from_dense(&self.cols, &y)))
            .collect())
    }

    /// Solves for the opponent weights on `opp_support` that make `who`
    /// indifferent across `own_support`. Returns the weights only.
    fn indifference(&self, who: Player, own_support: &[usize], opp_support: &[usize]) -> Option<Vec<T>> {
        let k = opp_support.len();
        let mut a: Matrix<T> = Vec::with_capacity(own_support.len() + 1);
        let mut b = Vec::with_capacity(own_support.len() + 1);
        for &s in own_support {
            let mut row: Vec<T> = opp_support
                .iter()
                .map(|&o| match who {
                    Player::One => self.at(s, o).0,
                    Player::Two => self.at(o, s).1,
                })
                .collect();
            row.push(-T::one());
            a.push(row);
            b.push(T::zero());
        }
        let mut norm_row = vec![T::one(); k];
        norm_row.push(T::zero());
        a.push(norm_row);
        b.push(T::one());
        let sol = solve_basic(&a, &b)?;
        Some(sol[..k].to_vec())
    }
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> =
        (1u32..(1 << n)).map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn clamp_weights<T: Real>(w: Vec<T>, n: usize, support: &[usize]) -> Option<Vec<T>> {
    let tol = T::tol(PAYOFF_TOL);
    if w.iter().any(|&x| x < -tol || !x.is_finite()) {
        return None;
    }
    let mut dense = vec![T::zero(); n];
    for (&s, &x) in support.iter().zip(&w) {
        dense[s] = x.max(T::zero());
    }
    let total: T = dense.iter().copied().sum();
    if total <= T::zero() {
        return None;
    }
    dense.iter_mut().for_each(|x| *x /= total);
    Some(dense)
}

fn joint_tv<T: Real>(x1: &[T], y1: &[T], x2: &[T], y2: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..x1.len() {
        for j in 0..y1.len() {
            s += (x1[i] * y1[j] - x2[i] * y2[j]).abs();
        }
    }
    s * T::lit(0.5)
}

/// Probability distribution over one player's strategy labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy<T> {
    weights: Vec<(String, T)>,
}

impl<T: Real> MixedStrategy<T> {
    pub fn new<S: Into<String>>(weights: impl IntoIterator<Item = (S, T)>) -> Result<Self> {
        let weights: Vec<(String, T)> = weights.into_iter().map(|(s, w)| (s.into(), w)).collect();
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty mixture".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (s, w) in &weights {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidWeights(format!("label `{s}` repeated")));
            }
            if !w.is_finite() || *w < T::zero() {
                return Err(Error::InvalidWeights(format!("weight {w} on `{s}`")));
            }
        }
        let total: T = weights.iter().map(|(_, w)| *w).sum();
        if (total - T::one()).abs() > T::tol(PAYOFF_TOL) {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(MixedStrategy { weights })
    }

    pub fn pure(label: impl Into<String>) -> Self {
        MixedStrategy { weights: vec![(label.into(), T::one())] }
    }

    pub fn uniform<S: AsRef<str>>(labels: &[S]) -> Self {
        let w = T::one() / T::from_usize_lossy(labels.len());
        MixedStrategy { weights: labels.iter().map(|l| (l.as_ref().to_string(), w)).collect() }
    }

    /// Wraps a dense weight vector aligned with `labels`, dropping zero weights.
    pub fn from_dense(labels: &[String], w: &[T]) -> Self {
        MixedStrategy {
            weights: labels.iter().zip(w).filter(|(_, &x)| x > T::zero()).map(|(l, &x)| (l.clone(), x)).collect(),
        }
    }

    pub fn weights(&self) -> &[(String, T)] {
        &self.weights
    }

    pub fn weight(&self, label: &str) -> T {
        self.weights.iter().find(|(l, _)| l == label).map_or(T::zero(), |(_, w)| *w)
    }

    /// Dense weights in the order of `labels`; unknown labels are an error.
    pub fn aligned(&self, labels: &[String]) -> Result<Vec<T>> {
        let mut dense = vec![T::zero(); labels.len()];
        for (l, w) in &self.weights {
            let i = labels.iter().position(|x| x == l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
            dense[i] = *w;
        }
        Ok(dense)
    }
}
