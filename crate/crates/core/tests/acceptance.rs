//! Acceptance suite: one PASS/FAIL line per criterion, then informational
//! search sweeps. Exits non-zero if any criterion fails.
#![allow(clippy::needless_range_loop)]

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI, TAU};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use qgt::builtin::{ic3_environment, ic3_game, iid1, prisoners_dilemma};
use qgt::environment::{
    chain_disagreement_bound, env_nash_profiles, is_correlated_equilibrium, is_env_nash, realize_joint, RandomVariable,
    SampleSpace,
};
use qgt::ewl::{
    best_response_matrix, calibrate, is_quat_equilibrium, mixed_quat_payoff, search_quat_equilibria,
    CalibrationOutcome, MixedQuatStrategy, OutcomeAssignment, DEFAULT_SEED,
};
use qgt::game::{Player, EQUILIBRIUM_TOL};
use qgt::linalg::jacobi_eigen;
use qgt::penny::{meyer_cheat_check, penny_game};
use qgt::private_info::check_commute_trials;
use qgt::quantum::{apply_local, bell_chain_demo, entangled_pair, measure_joint, rotation, UnitaryOp};
use qgt::quantum_eq::{
    classical_value_bound, is_private_quantum_equilibrium, is_quantum_equilibrium, private_quantum_payoff,
    quantum_joint_is_correlated, quantum_profile_joint, search_rotation_equilibria, sweep_private_equilibria,
    InfoStrategy, QuantumEnvironment, StrategyParam,
};
use qgt::Profile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{net_best, random_environment, random_frame, random_game, random_probs, rotated_pair_joint, s3_net, Q};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, err: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(err.into())
    }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn c1_environment_vs_correlated() -> Outcome {
    let g = ic3_game::<f64>();
    let env = ic3_environment::<f64>();
    let x = env.var(Player::One, "X").unwrap();
    let y = env.var(Player::One, "Y").unwrap();
    let w = env.var(Player::Two, "W").unwrap();
    let cx = is_correlated_equilibrium(&g, x, w, 1e-12).map_err(|e| e.to_string())?;
    let cy = is_correlated_equilibrium(&g, y, w, 1e-12).map_err(|e| e.to_string())?;
    if !(cx.equilibrium && cy.equilibrium && cx.max_gain <= 1e-12 && cy.max_gain <= 1e-12) {
        return Err(format!("correlated gains {} / {}", cx.max_gain, cy.max_gain));
    }
    let rx = is_env_nash(&g, &env, x, w, 1e-12).map_err(|e| e.to_string())?;
    let ry = is_env_nash(&g, &env, y, w, 1e-12).map_err(|e| e.to_string())?;
    let witness = rx.witness.clone().ok_or("(X,W) accepted")?;
    check(
        !rx.equilibrium && witness.strategy == "Y" && near(witness.gain, 0.125, 1e-12) && ry.equilibrium,
        format!("(X,W) rejected by deviation {} gaining {:.15}; (Y,W) accepted", witness.strategy, witness.gain),
        format!("witness {witness:?}, (Y,W) accepted = {}", ry.equilibrium),
    )
}

fn c2_commute() -> Outcome {
    let reports = check_commute_trials(100, 0xC0FFEE).map_err(|e| e.to_string())?;
    let worst = reports.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    check(
        reports.len() == 100 && reports.iter().all(|r| r.holds) && worst <= 1e-12,
        format!("100 random instances, max |diff| = {worst:e}"),
        format!("max |diff| = {worst:e}"),
    )
}

fn c3_rotated_pair() -> Outcome {
    let mut worst = 0.0f64;
    for a in 0..64 {
        for b in 0..64 {
            let (t, f) = (TAU * a as f64 / 64.0, TAU * b as f64 / 64.0);
            let s = apply_local(&entangled_pair(), &rotation(t), &rotation(f)).map_err(|e| e.to_string())?;
            let d = measure_joint(&s).map_err(|e| e.to_string())?;
            let want = rotated_pair_joint(t, f);
            for (k, w) in want.iter().enumerate() {
                worst = worst.max((d.get(k / 2, k % 2) - w).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("64x64 grid, max error {worst:e}"), format!("max error {worst:e}"))
}

fn c4_quantum_equilibrium() -> Outcome {
    let g = ic3_game::<f64>();
    let qe = QuantumEnvironment::rotation_pair();
    let (u, v) = (StrategyParam::Angle(FRAC_PI_2), StrategyParam::Angle(0.0));
    let r = is_quantum_equilibrium(&g, &qe, u, v, EQUILIBRIUM_TOL).map_err(|e| e.to_string())?;
    let joint = quantum_profile_joint(&g, &qe, u, v).map_err(|e| e.to_string())?;
    let corr = quantum_joint_is_correlated(&g, &qe, u, v, EQUILIBRIUM_TOL).map_err(|e| e.to_string())?;
    let cd = joint[&Profile::new("C", "D")];
    let dc = joint[&Profile::new("D", "C")];
    check(
        r.equilibrium
            && near(r.payoffs.0, 1.5, 1e-12)
            && near(r.payoffs.1, 1.5, 1e-12)
            && near(cd, 0.5, 1e-12)
            && near(dc, 0.5, 1e-12)
            && corr.equilibrium,
        format!("payoffs ({:.12}, {:.12}), joint (C,D)={cd:.12} (D,C)={dc:.12}, correlated", r.payoffs.0, r.payoffs.1),
        format!("report {r:?}, correlated {}", corr.equilibrium),
    )
}

fn c5_private_information() -> Outcome {
    let pg = iid1::<f64>();
    let qe = QuantumEnvironment::rotation_pair();
    let a = InfoStrategy::angles(&[0.0, FRAC_PI_2]);
    let (theta, phi) =
        (InfoStrategy::angles(&[FRAC_PI_8, 3.0 * FRAC_PI_8]), InfoStrategy::angles(&[0.0, 3.0 * FRAC_PI_4]));
    let pa = private_quantum_payoff(&pg, &qe, &a, &a).map_err(|e| e.to_string())?;
    let ra = is_private_quantum_equilibrium(&pg, &qe, &a, &a, EQUILIBRIUM_TOL).map_err(|e| e.to_string())?;
    let pb = private_quantum_payoff(&pg, &qe, &theta, &phi).map_err(|e| e.to_string())?;
    let rb = is_private_quantum_equilibrium(&pg, &qe, &theta, &phi, EQUILIBRIUM_TOL).map_err(|e| e.to_string())?;
    let bound = classical_value_bound(&pg).map_err(|e| e.to_string())?;
    let b = 0.853_553_390_593_273_8;
    let per_type = rb.per_type.iter().map(|d| d.gain).fold(f64::NEG_INFINITY, f64::max);
    check(
        near(pa.0, 0.75, 1e-12)
            && near(pa.1, 0.75, 1e-12)
            && ra.equilibrium
            && near(pb.0, b, 1e-9)
            && near(pb.1, b, 1e-9)
            && rb.equilibrium
            && per_type <= 1e-9
            && near(bound.value, 0.75, 1e-12)
            && pb.0 > bound.value,
        format!(
            "type-a {:.12}, type-b {:.12} (max per-type gain {per_type:e}), classical bound {:.12}",
            pa.0, pb.0, bound.value
        ),
        format!("type-a {pa:?} eq={}, type-b {pb:?} eq={}, bound {}", ra.equilibrium, rb.equilibrium, bound.value),
    )
}

fn c6_penny_flip() -> Outcome {
    let m = meyer_cheat_check::<f64>();
    let g = penny_game::<f64>();
    let eqs = g.mixed_nash_small().map_err(|e| e.to_string())?;
    let values: Vec<(f64, f64)> = eqs.iter().map(|(a, b)| g.expected_payoff(a, b).unwrap()).collect();
    check(
        m.passed(1e-12)
            && m.mixtures.len() == 11
            && g.pure_nash().is_empty()
            && !values.is_empty()
            && values.iter().all(|v| near(v.0, 0.5, 1e-12) && near(v.1, 0.5, 1e-12)),
        format!(
            "max cheat residual {:e}, no pure equilibrium, {} mixed equilibria all worth (1/2,1/2)",
            m.max_residual,
            values.len()
        ),
        format!("residual {:e}, pure {:?}, values {values:?}", m.max_residual, g.pure_nash()),
    )
}

fn c7_quaternion_game() -> Outcome {
    let g = prisoners_dilemma::<f64>();
    let asg = OutcomeAssignment::standard();
    let basis = [Q::one(), Q::i(), Q::j(), Q::k()];
    let all = MixedQuatStrategy::uniform(&basis).unwrap();
    let s1 = MixedQuatStrategy::uniform(&[Q::one(), Q::i()]).unwrap();
    let s2 = MixedQuatStrategy::uniform(&[Q::j(), Q::k()]).unwrap();
    let net = s3_net(100_000);
    let mut notes = Vec::new();
    for (name, a, b, value) in [("orthonormal quadruple", &all, &all, 2.25), ("pair profile", &s1, &s2, 2.5)] {
        let r = is_quat_equilibrium(&g, a, b, &asg, EQUILIBRIUM_TOL).map_err(|e| e.to_string())?;
        if !(r.equilibrium && near(r.payoffs.0, value, 1e-12) && near(r.payoffs.1, value, 1e-12)) {
            return Err(format!("{name}: {r:?}"));
        }
        if r.gaps.0 > 1e-9 || r.gaps.1 > 1e-9 {
            return Err(format!("{name}: gaps {:?}", r.gaps));
        }
        // the net can only under-estimate the true best response
        for (who, opp, own) in [(Player::One, b, r.payoffs.0), (Player::Two, a, r.payoffs.1)] {
            let brute = net_best(&g, &net, opp, who, &asg);
            let m = best_response_matrix(&g, opp, who, &asg).map_err(|e| e.to_string())?;
            let eig = jacobi_eigen(&m);
            let spread = eig.values[0] - eig.values[3];
            // covering radius of a 1e5-point net is below 0.05
            if brute > own + EQUILIBRIUM_TOL || eig.values[0] - brute > spread * 0.05 * 0.05 + 1e-12 {
                return Err(format!("{name}: net best {brute} vs eigen {} (payoff {own})", eig.values[0]));
            }
        }
        notes.push(format!("{name} {value}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let f1 = MixedQuatStrategy::uniform(&random_frame(&mut rng)).unwrap();
        let f2 = MixedQuatStrategy::uniform(&random_frame(&mut rng)).unwrap();
        let p = mixed_quat_payoff(&g, &f1, &f2, &asg).map_err(|e| e.to_string())?;
        if !(near(p.0, 2.25, 1e-12) && near(p.1, 2.25, 1e-12)) {
            return Err(format!("random quadruple payoff {p:?}"));
        }
    }
    Ok(format!("{} accepted, net cross-check on {} points, 100 random quadruples at 9/4", notes.join(", "), net.len()))
}

fn c8_calibration() -> Outcome {
    match calibrate(&OutcomeAssignment::standard(), DEFAULT_SEED).map_err(|e| e.to_string())? {
        CalibrationOutcome::Found(c) => check(
            c.max_tv <= 1e-9 && c.trials == 1000,
            format!("a = {}, max total variation {:e} over {} pairs", c.a, c.max_tv, c.trials),
            format!("max total variation {:e}", c.max_tv),
        ),
        other => Err(format!("{other:?}")),
    }
}

fn c9_bell() -> Outcome {
    let r = bell_chain_demo([0.0, FRAC_PI_6, FRAC_PI_3, FRAC_PI_2]);
    if !(near(r.lhs, 1.0, 1e-12) && near(r.rhs, 0.75, 1e-12) && r.violated) {
        return Err(format!("{r:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let atoms = rng.gen_range(1..=16);
        let space = Arc::new(
            SampleSpace::new(random_probs(&mut rng, atoms).into_iter().enumerate().map(|(k, p)| (format!("w{k}"), p)))
                .unwrap(),
        );
        let mut var = |name: &str| {
            let values: Vec<&str> = (0..atoms).map(|_| if rng.gen_bool(0.5) { "C" } else { "D" }).collect();
            RandomVariable::new(name, &space, Player::One, values).unwrap()
        };
        let (x, y, z, w) = (var("X"), var("Y"), var("Z"), var("W"));
        let b = chain_disagreement_bound(&space, &x, &y, &z, &w).map_err(|e| e.to_string())?;
        if !b.holds {
            return Err(format!("classical violation {b:?}"));
        }
        worst = worst.max(b.lhs - b.rhs);
    }
    Ok(format!("quantum lhs {:.12} > rhs {:.12}; 1000 classical joints hold (max lhs-rhs {worst:.3})", r.lhs, r.rhs))
}

fn c10_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // environment equilibria are correlated equilibria
    let mut accepted = 0;
    for _ in 0..200 {
        let (n, m) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let g = random_game(&mut rng, n, m);
        let env = random_environment(&mut rng, &g);
        let closed = env.close().map_err(|e| e.to_string())?;
        let again = closed.close().map_err(|e| e.to_string())?;
        for who in [Player::One, Player::Two] {
            let a = closed.vars(who);
            let b = again.vars(who);
            if a.len() != b.len() || a.iter().zip(b).any(|(u, v)| !u.same_mapping(v)) {
                return Err("closure not idempotent".into());
            }
        }
        for p in env_nash_profiles(&g, &env, 1e-9).map_err(|e| e.to_string())? {
            let x = closed.var(Player::One, &p.s1).ok_or("unknown member")?;
            let y = closed.var(Player::Two, &p.s2).ok_or("unknown member")?;
            accepted += 1;
            if accepted % 16 == 1 && !is_env_nash(&g, &env, x, y, 1e-9).map_err(|e| e.to_string())?.equilibrium {
                return Err(format!("enumeration and check disagree on {p}"));
            }
            if !is_correlated_equilibrium(&g, x, y, 1e-9).map_err(|e| e.to_string())?.equilibrium {
                return Err(format!("environment equilibrium {p} not correlated"));
            }
        }
    }
    // accepted rotation-family quantum equilibria are correlated
    let qe = QuantumEnvironment::rotation_pair();
    let mut quantum = 0;
    for k in 0..6 {
        let g = if k == 0 { ic3_game::<f64>() } else { random_game(&mut rng, 2, 2) };
        let g =
            qgt::game::Game::new("relabelled", ["C", "D"], ["C", "D"], (0..4).map(|c| g.at(c / 2, c % 2)).collect())
                .unwrap();
        for found in search_rotation_equilibria(&g, &qe, 2, 100 + k).map_err(|e| e.to_string())? {
            let (u, v) = (StrategyParam::Angle(found.angles1[0]), StrategyParam::Angle(found.angles2[0]));
            quantum += 1;
            let j = quantum_profile_joint(&g, &qe, u, v).map_err(|e| e.to_string())?;
            let (_, x, y) = realize_joint(&j).map_err(|e| e.to_string())?;
            if !is_correlated_equilibrium(&g, &x, &y, 1e-9).map_err(|e| e.to_string())?.equilibrium {
                return Err(format!("quantum equilibrium {found:?} not correlated"));
            }
        }
    }
    // norm preservation and normalisation under random local unitaries
    for _ in 0..200 {
        let u = random_unitary(&mut rng);
        let v = random_unitary(&mut rng);
        let s = apply_local(&entangled_pair(), &u, &v).map_err(|e| e.to_string())?;
        let d = measure_joint(&s).map_err(|e| e.to_string())?;
        if !near(s.norm(), 1.0, 1e-12) || !near(d.total(), 1.0, 1e-12) {
            return Err("norm not preserved".into());
        }
    }
    check(
        accepted > 0 && quantum > 0,
        format!("{accepted} environment equilibria correlated, {quantum} quantum equilibria correlated, norms and closures stable"),
        format!("vacuous: {accepted} environment and {quantum} quantum equilibria"),
    )
}

fn random_unitary<R: Rng>(rng: &mut R) -> UnitaryOp<f64> {
    qgt::ewl::random_unitary(rng)
}

fn informational() {
    let pg = iid1::<f64>();
    let qe = QuantumEnvironment::rotation_pair();
    match sweep_private_equilibria(&pg, &qe, 32, 2024) {
        Ok(found) => {
            println!("INFO private-information sweep: {} equilibrium classes from 32 starts", found.len());
            for f in found {
                println!(
                    "INFO   payoff {:.10} theta {:?} phi {:?} ({} hits)",
                    f.payoffs.0,
                    f.angles1.iter().map(|a| format!("{:.4}", a / PI)).collect::<Vec<_>>(),
                    f.angles2.iter().map(|a| format!("{:.4}", a / PI)).collect::<Vec<_>>(),
                    f.hits
                );
            }
        }
        Err(e) => println!("INFO private-information sweep failed: {e}"),
    }
    let lattice = [0.0, FRAC_PI_2, PI];
    let mut classes: Vec<(f64, usize)> = Vec::new();
    for code in 0..81 {
        let pick = |k: u32| lattice[(code / 3usize.pow(k)) % 3];
        let (t, f) = (InfoStrategy::angles(&[pick(0), pick(1)]), InfoStrategy::angles(&[pick(2), pick(3)]));
        if let Ok(r) = is_private_quantum_equilibrium(&pg, &qe, &t, &f, EQUILIBRIUM_TOL) {
            if r.equilibrium {
                match classes.iter_mut().find(|c| near(c.0, r.payoffs.0, 1e-9)) {
                    Some(c) => c.1 += 1,
                    None => classes.push((r.payoffs.0, 1)),
                }
            }
        }
    }
    println!("INFO private-information lattice {{0, pi/2, pi}}^4: accepted payoffs {classes:?}");
    let g = prisoners_dilemma::<f64>();
    match search_quat_equilibria(&g, &OutcomeAssignment::standard(), 64, DEFAULT_SEED) {
        Ok(found) => {
            println!("INFO quaternion search: {} outcome classes from 64 starts", found.len());
            for f in found {
                println!(
                    "INFO   payoffs ({:.6}, {:.6}) outcomes {:?} ({} hits)",
                    f.payoffs.0,
                    f.payoffs.1,
                    f.distribution.map(|x| (x * 1e6).round() / 1e6),
                    f.hits
                );
            }
        }
        Err(e) => println!("INFO quaternion search failed: {e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("environment equilibrium vs correlated equilibrium", c1_environment_vs_correlated),
        ("private information commutes with environments", c2_commute),
        ("rotated entangled pair statistics", c3_rotated_pair),
        ("quantum equilibrium and its correlated joint", c4_quantum_equilibrium),
        ("quantum private-information equilibria beat classical", c5_private_information),
        ("penny-flip cheat and penny game", c6_penny_flip),
        ("quaternion game equilibria", c7_quaternion_game),
        ("direct simulation calibration", c8_calibration),
        ("chain inequality demo", c9_bell),
        ("property suites", c10_properties),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.2}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.2}s]", k + 1);
            }
        }
    }
    informational();
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
