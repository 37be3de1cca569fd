//! Penny-flip communication protocols and the Meyer cheat.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::quantum::{OutcomeDistribution, UnitaryOp, UNITARY_TOL};
use crate::scalar::Real;

/// Player 1's labels in the simple protocol, first penny first.
pub const PENNY_ROWS: [&str; 4] = ["NN", "NF", "FN", "FF"];
pub const PENNY_COLS: [&str; 2] = ["N", "F"];
/// Mixture points used when checking the cheat against classical randomisation.
pub const MIXTURE_POINTS: usize = 11;

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Flip: `((0, 1), (-i, 0))`.
pub fn flip<T: Real>() -> UnitaryOp<T> {
    UnitaryOp::unchecked(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]).expect("2x2")
}

pub fn no_flip<T: Real>() -> UnitaryOp<T> {
    UnitaryOp::identity(2)
}

/// Meyer's `U = ((1+i, sqrt2), (-sqrt2, 1-i)) / 2`.
pub fn meyer_u<T: Real>() -> UnitaryOp<T> {
    let h = T::lit(0.5);
    let r = T::SQRT_2() * h;
    UnitaryOp::unchecked(
        2,
        vec![Complex::new(h, h), Complex::new(r, T::zero()), Complex::new(-r, T::zero()), Complex::new(h, -h)],
    )
    .expect("2x2")
}

fn check_penny_op<T: Real>(u: &UnitaryOp<T>, dim: usize) -> Result<()> {
    if u.dim() != dim {
        return Err(Error::DimensionMismatch(format!("expected a {dim}x{dim} operator, got {}", u.dim())));
    }
    let r = u.unitarity_residual();
    if r > T::tol(UNITARY_TOL) {
        return Err(Error::NotUnitary(r.as_f64()));
    }
    Ok(())
}

/// Payoff pair when the final penny reads H with probability `h`.
fn referee<T: Real>(h: T) -> (T, T) {
    (h, T::one() - h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialRun<T> {
    /// Final amplitudes on (H, T).
    pub final_state: [Complex<T>; 2],
    /// Expected payoffs: `(1, 0)` on H and `(0, 1)` on T.
    pub payoffs: (T, T),
}

/// P1, P2, P1 act in turn on a single penny that starts at H.
pub fn run_sequential<T: Real>(ops: &[UnitaryOp<T>; 3]) -> Result<SequentialRun<T>> {
    for op in ops {
        check_penny_op(op, 2)?;
    }
    let mut v = vec![Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())];
    for op in ops {
        v = op.apply(&v);
    }
    let norm = v[0].norm_sqr() + v[1].norm_sqr();
    Ok(SequentialRun { final_state: [v[0], v[1]], payoffs: referee(v[0].norm_sqr() / norm) })
}

/// Seeded sampling of the sequential protocol's final measurement; returns
/// the number of H and T readings.
pub fn sample_sequential(ops: &[UnitaryOp<f64>; 3], shots: usize, seed: u64) -> Result<(usize, usize)> {
    let p = run_sequential(ops)?.payoffs.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heads = (0..shots).filter(|_| rng.gen::<f64>() < p).count();
    Ok((heads, shots - heads))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeyerReport<T> {
    pub unitarity_residual: T,
    pub off_diagonal_flip: T,
    pub off_diagonal_no_flip: T,
    pub win_vs_flip: T,
    pub win_vs_no_flip: T,
    /// `(flip probability, win probability)` when Player 2 randomises.
    pub mixtures: Vec<(T, T)>,
    /// Largest deviation from the ideal value across every check.
    pub max_residual: T,
}

impl<T: Real> MeyerReport<T> {
    pub fn passed(&self, tol: T) -> bool {
        self.max_residual <= tol
    }
}

pub fn meyer_cheat_check<T: Real>() -> MeyerReport<T> {
    let u = meyer_u::<T>();
    let ui = u.adjoint();
    let conj = |s: &UnitaryOp<T>| ui.compose(&s.compose(&u).expect("2x2")).expect("2x2");
    let (f, n) = (flip::<T>(), no_flip::<T>());
    let (cf, cn) = (conj(&f), conj(&n));
    let win = |s: &UnitaryOp<T>| run_sequential(&[u.clone(), s.clone(), ui.clone()]).expect("unitary moves").payoffs.0;
    let (win_vs_flip, win_vs_no_flip) = (win(&f), win(&n));
    let mixtures: Vec<(T, T)> = (0..MIXTURE_POINTS)
        .map(|k| {
            let q = T::from_usize_lossy(k) / T::from_usize_lossy(MIXTURE_POINTS - 1);
            (q, q * win_vs_flip + (T::one() - q) * win_vs_no_flip)
        })
        .collect();
    let unitarity_residual = u.unitarity_residual();
    let mut max_residual = unitarity_residual.max(cf.off_diagonal_max()).max(cn.off_diagonal_max());
    for (_, w) in &mixtures {
        max_residual = max_residual.max((T::one() - *w).abs());
    }
    MeyerReport {
        unitarity_residual,
        off_diagonal_flip: cf.off_diagonal_max(),
        off_diagonal_no_flip: cn.off_diagonal_max(),
        win_vs_flip,
        win_vs_no_flip,
        mixtures,
        max_residual,
    }
}

/// Player 1's move in the simple protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum SimpleMove<T> {
    /// One 2x2 operator per penny.
    Pennies(UnitaryOp<T>, UnitaryOp<T>),
    /// A 4x4 operator acting on both pennies at once (first penny most significant).
    Joint(UnitaryOp<T>),
}

/// Distribution over Player 1's four labels and Player 2's two, with rows
/// in [`PENNY_ROWS`] order and columns in [`PENNY_COLS`] order.
pub fn run_simple<T: Real>(p1: &SimpleMove<T>, p2: &UnitaryOp<T>) -> Result<OutcomeDistribution<T>> {
    check_penny_op(p2, 2)?;
    let mine: Vec<T> = match p1 {
        SimpleMove::Pennies(a, b) => {
            check_penny_op(a, 2)?;
            check_penny_op(b, 2)?;
            let (a0, a1) = (a.get(0, 0).norm_sqr(), a.get(1, 0).norm_sqr());
            let (b0, b1) = (b.get(0, 0).norm_sqr(), b.get(1, 0).norm_sqr());
            vec![a0 * b0, a0 * b1, a1 * b0, a1 * b1]
        }
        SimpleMove::Joint(u) => {
            check_penny_op(u, 4)?;
            (0..4).map(|k| u.get(k, 0).norm_sqr()).collect()
        }
    };
    let theirs = [p2.get(0, 0).norm_sqr(), p2.get(1, 0).norm_sqr()];
    let probs = mine.iter().flat_map(|&x| theirs.iter().map(move |&y| x * y)).collect();
    Ok(OutcomeDistribution { dims: (4, 2), probs })
}

/// The matching-pennies style game behind both protocols: Player 1 wins
/// exactly when the total number of flips is even.
pub fn penny_game<T: Real>() -> Game<T> {
    Game::from_fn("penny", PENNY_ROWS, PENNY_COLS, |i, j| {
        let flips = (i >> 1) + (i & 1) + j;
        if flips % 2 == 0 {
            (T::one(), T::zero())
        } else {
            (T::zero(), T::one())
        }
    })
    .expect("static table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Profile;

    #[test]
    fn table_matches_print() {
        let g = penny_game::<f64>();
        let expect = [
            ("NN", "N", (1.0, 0.0)),
            ("NN", "F", (0.0, 1.0)),
            ("NF", "N", (0.0, 1.0)),
            ("NF", "F", (1.0, 0.0)),
            ("FN", "N", (0.0, 1.0)),
            ("FN", "F", (1.0, 0.0)),
            ("FF", "N", (1.0, 0.0)),
            ("FF", "F", (0.0, 1.0)),
        ];
        for (r, c, p) in expect {
            assert_eq!(g.payoff(&Profile::new(r, c)).unwrap(), p);
        }
        assert!(g.pure_nash().is_empty());
    }

    #[test]
    fn sequential_examples() {
        let (n, f) = (no_flip::<f64>(), flip::<f64>());
        let r = run_sequential(&[n.clone(), n.clone(), n.clone()]).unwrap();
        assert_eq!(r.payoffs, (1.0, 0.0));
        let r = run_sequential(&[n.clone(), f.clone(), n.clone()]).unwrap();
        assert!((r.payoffs.1 - 1.0).abs() < 1e-15);
        let u = meyer_u::<f64>();
        let r = run_sequential(&[u.clone(), f, u.adjoint()]).unwrap();
        assert!((r.payoffs.0 - 1.0).abs() < 1e-12);
        let bad = UnitaryOp::unchecked(2, vec![Complex::new(2.0, 0.0); 4]).unwrap();
        assert!(matches!(run_sequential(&[bad, n.clone(), n]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn classical_moves_follow_table() {
        let g = penny_game::<f64>();
        let ops = [no_flip::<f64>(), flip::<f64>()];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let r = run_sequential(&[ops[a].clone(), ops[b].clone(), ops[c].clone()]).unwrap();
                    let cell = g.at(2 * a + c, b);
                    assert!((r.payoffs.0 - cell.0).abs() < 1e-12 && (r.payoffs.1 - cell.1).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn meyer() {
        let r = meyer_cheat_check::<f64>();
        assert!(r.passed(1e-12), "{r:?}");
        assert_eq!(r.mixtures.len(), MIXTURE_POINTS);
    }

    #[test]
    fn simple_protocol() {
        let (n, f) = (no_flip::<f64>(), flip::<f64>());
        let d = run_simple(&SimpleMove::Pennies(n.clone(), n.clone()), &n).unwrap();
        assert_eq!(d.get(0, 0), 1.0);
        let d = run_simple(&SimpleMove::Pennies(f.clone(), n.clone()), &f).unwrap();
        assert!((d.get(2, 1) - 1.0).abs() < 1e-15);
        let d = run_simple(&SimpleMove::Joint(UnitaryOp::identity(4)), &f).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert!(run_simple(&SimpleMove::Joint(n.clone()), &n).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let ops = [meyer_u::<f64>(), flip(), meyer_u::<f64>().adjoint()];
        assert_eq!(sample_sequential(&ops, 100, 3).unwrap(), (100, 0));
        let half = [crate::quantum::rotation(std::f64::consts::FRAC_PI_4), no_flip(), no_flip()];
        assert_eq!(sample_sequential(&half, 500, 9).unwrap(), sample_sequential(&half, 500, 9).unwrap());
    }
}
