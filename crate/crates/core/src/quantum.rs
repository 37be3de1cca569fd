//! Bipartite pure-state simulation: tensor-product states, local unitaries and
//! computational-basis measurement.
//!
//! Basis index 0 is `H` (heads), index 1 is `T` (tails).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Entrywise tolerance on `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    dims: (usize, usize),
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(dims: (usize, usize), amps: Vec<Complex<T>>) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || amps.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for dims {:?}", amps.len(), dims)));
        }
        let s = StateVector { dims, amps };
        let n = s.norm_sqr();
        if !n.is_finite() {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        if n == T::zero() {
            return Err(Error::ZeroVector);
        }
        Ok(s)
    }

    /// Product basis state `|i> (x) |j>`.
    pub fn basis(dims: (usize, usize), i: usize, j: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dims.0 * dims.1];
        amps[i * dims.1 + j] = Complex::new(T::one(), T::zero());
        StateVector { dims, amps }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amp(&self, i: usize, j: usize) -> Complex<T> {
        self.amps[i * self.dims.1 + j]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        StateVector { dims: self.dims, amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        StateVector { dims: self.dims, amps: self.amps.iter().map(|a| a / n).collect() }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Square unitary matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> UnitaryOp<T> {
    /// Validates unitarity to within [`UNITARY_TOL`] entrywise.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        let op = Self::unchecked(dim, entries)?;
        let r = op.unitarity_residual();
        // written this way so a NaN residual is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(r <= T::tol(UNITARY_TOL)) {
            return Err(Error::NotUnitary(r.as_f64()));
        }
        Ok(op)
    }

    /// Shape-checked only; used for matrices such as `F` whose unitarity is
    /// verified separately or which are intermediate products.
    pub fn unchecked(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!("{} entries for dimension {dim}", entries.len())));
        }
        Ok(UnitaryOp { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        UnitaryOp { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim + j]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).conj()).collect();
        UnitaryOp { dim: n, entries }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n)).collect();
        UnitaryOp { dim: n, entries }
    }

    pub fn conj(&self) -> Self {
        UnitaryOp { dim: self.dim, entries: self.entries.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        UnitaryOp { dim: self.dim, entries: self.entries.iter().map(|z| z * c).collect() }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, rhs.dim)));
        }
        let n = self.dim;
        let entries = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (0..n).map(|l| self.get(i, l) * rhs.get(l, j)).sum()
            })
            .collect();
        Ok(UnitaryOp { dim: n, entries })
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// Kronecker product `self (x) rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let d = n * m;
        let entries = (0..d * d)
            .map(|k| {
                let (r, c) = (k / d, k % d);
                self.get(r / m, c / m) * rhs.get(r % m, c % m)
            })
            .collect();
        UnitaryOp { dim: d, entries }
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_residual(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s: Complex<T> = (0..n).map(|k| self.get(k, i).conj() * self.get(k, j)).sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_max(&self) -> T {
        let n = self.dim;
        (0..n * n).filter(|k| k / n != k % n).map(|k| self.entries[k].norm()).fold(T::zero(), T::max)
    }

    pub fn det2(&self) -> Result<Complex<T>> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch("determinant needs a 2x2 matrix".into()));
        }
        Ok(self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0))
    }
}

/// `(1, 0, 0, 1) / sqrt(2)`: the normalised `H(x)H + T(x)T`.
pub fn entangled_pair<T: Real>() -> StateVector<T> {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    StateVector {
        dims: (2, 2),
        amps: vec![Complex::new(h, z), Complex::new(z, z), Complex::new(z, z), Complex::new(h, z)],
    }
}

/// `(u (x) v) s`, with `u` acting on the first factor.
pub fn apply_local<T: Real>(s: &StateVector<T>, u: &UnitaryOp<T>, v: &UnitaryOp<T>) -> Result<StateVector<T>> {
    let (n1, n2) = s.dims;
    if u.dim != n1 || v.dim != n2 {
        return Err(Error::DimensionMismatch(format!("operators {}x{} on state dims {:?}", u.dim, v.dim, s.dims)));
    }
    let zero = Complex::new(T::zero(), T::zero());
    // apply v along the second index, then u along the first
    let mut tmp = vec![zero; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            tmp[i * n2 + j] = (0..n2).map(|l| v.get(j, l) * s.amps[i * n2 + l]).sum();
        }
    }
    let mut out = vec![zero; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            out[i * n2 + j] = (0..n1).map(|k| u.get(i, k) * tmp[k * n2 + j]).sum();
        }
    }
    Ok(StateVector { dims: s.dims, amps: out })
}

/// Computational-basis outcome probabilities, `probs[i * n2 + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution<T> {
    pub dims: (usize, usize),
    pub probs: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.probs[i * self.dims.1 + j]
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    pub fn marginal(&self, first: bool) -> Vec<T> {
        let (n1, n2) = self.dims;
        if first {
            (0..n1).map(|i| (0..n2).map(|j| self.get(i, j)).sum()).collect()
        } else {
            (0..n2).map(|j| (0..n1).map(|i| self.get(i, j)).sum()).collect()
        }
    }

    pub fn total_variation(&self, other: &Self) -> T {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (*a - *b).abs()).sum::<T>() * T::lit(0.5)
    }
}

pub fn measure_joint<T: Real>(s: &StateVector<T>) -> Result<OutcomeDistribution<T>> {
    let n = s.norm_sqr();
    if n == T::zero() {
        return Err(Error::ZeroVector);
    }
    Ok(OutcomeDistribution { dims: s.dims, probs: s.amps.iter().map(|a| a.norm_sqr() / n).collect() })
}

/// The real rotation `((cos t, sin t), (-sin t, cos t))`.
pub fn rotation<T: Real>(theta: T) -> UnitaryOp<T> {
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    UnitaryOp { dim: 2, entries: vec![Complex::new(c, z), Complex::new(s, z), Complex::new(-s, z), Complex::new(c, z)] }
}

/// Probability that the two halves of the entangled pair disagree after
/// rotations by `a` and `b`.
pub fn rotation_disagreement<T: Real>(a: T, b: T) -> T {
    let s = apply_local(&entangled_pair(), &rotation(a), &rotation(b)).expect("2x2 operators on a 2x2 state");
    let d = measure_joint(&s).expect("unitary image of a unit vector");
    d.get(0, 1) + d.get(1, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellChain<T> {
    pub lhs: T,
    pub rhs: T,
    pub violated: bool,
}

/// Chain inequality evaluated on pairwise measurement statistics only; no
/// joint law of all four observables is ever formed.
pub fn bell_chain_demo<T: Real>(angles: [T; 4]) -> BellChain<T> {
    let [x, y, z, w] = angles;
    let lhs = rotation_disagreement(x, w);
    let rhs = rotation_disagreement(x, y) + rotation_disagreement(y, z) + rotation_disagreement(z, w);
    BellChain { lhs, rhs, violated: lhs > rhs + T::tol(1e-12) }
}
