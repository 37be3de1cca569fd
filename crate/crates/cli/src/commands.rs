//! Subcommand implementations. Each returns a [`Report`]; the binary only
//! chooses which half to print.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use qgt::environment::{env_nash_profiles, is_correlated_equilibrium, is_env_nash, EquilibriumReport};
use qgt::ewl::{
    calibrate, is_quat_equilibrium, mixed_quat_distribution, search_quat_equilibria, CalibrationOutcome, Cell,
    MixedQuatStrategy, OutcomeAssignment, Quaternion, DEFAULT_SEED,
};
use qgt::game::{Game, MixedStrategy, Player, EQUILIBRIUM_TOL};
use qgt::penny::{meyer_cheat_check, run_sequential, sample_sequential};
use qgt::private_info::check_commute_trials;
use qgt::quantum::{bell_chain_demo, rotation_disagreement, UnitaryOp};
use qgt::quantum_eq::{
    classical_value_bound, is_private_quantum_equilibrium, is_quantum_equilibrium, quantum_joint_is_correlated,
    quantum_profile_joint, search_rotation_equilibria, sweep_private_equilibria, InfoStrategy, QuantumEnvironment,
    StrategyParam,
};
use serde_json::{json, Value};

use crate::parse::{parse_angle_list, parse_env, parse_game, parse_mixture, parse_moves};
use crate::{num, CliError, Report};

type Res<T> = std::result::Result<T, CliError>;

/// Default seed of the commutation check.
pub const COMMUTE_SEED: u64 = 0xC0FFEE;
/// Default seed of the rotation-environment searches.
pub const ROTATION_SEED: u64 = 0x5eed;
/// Environment variable that replaces the default seeds.
pub const SEED_VAR: &str = "QGT_SEED";

/// An explicit seed wins, then `QGT_SEED`, then the command default.
pub fn resolve_seed(flag: Option<u64>, default: u64) -> Res<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Validation(format!("{SEED_VAR}=`{v}` is not a seed"))),
        Err(_) => Ok(default),
    }
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn load_game(path: &Path) -> Res<Game<f64>> {
    parse_game(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn pair(p: (f64, f64)) -> String {
    format!("({}, {})", num(p.0), num(p.1))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn player_no(p: Player) -> usize {
    p.index() + 1
}

/// Scientific notation for residuals, which are too small for [`num`].
pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn mixed_text(m: &MixedStrategy<f64>) -> String {
    m.weights().iter().map(|(l, w)| format!("{l} {}", num(*w))).collect::<Vec<_>>().join(" ")
}

fn mixed_json(m: &MixedStrategy<f64>) -> Value {
    Value::Object(m.weights().iter().map(|(l, w)| (l.clone(), json!(w))).collect())
}

pub fn nash(path: &Path, mixed: bool) -> Res<Report> {
    let g = load_game(path)?;
    let (n, m) = g.shape();
    let mut h = format!("game {} ({n}x{m})\n", g.name());
    let pure = g.pure_nash();
    let _ = writeln!(h, "pure equilibria: {}", pure.len());
    let mut pure_json = Vec::new();
    for p in &pure {
        let pay = g.payoff(p)?;
        let _ = writeln!(h, "  {p}  payoffs {}", pair(pay));
        pure_json.push(json!({"row": p.s1, "col": p.s2, "payoffs": [pay.0, pay.1]}));
    }
    let mut out =
        json!({"command": "nash", "game": g.name(), "rows": n, "cols": m, "pure_count": pure.len(), "pure": pure_json});
    if mixed {
        let eqs = g.mixed_nash_small()?;
        let _ = writeln!(h, "equilibria by support enumeration: {}", eqs.len());
        let mut list = Vec::new();
        for (a, b) in &eqs {
            let pay = g.expected_payoff(a, b)?;
            let _ = writeln!(h, "  player 1 [{}]  player 2 [{}]  payoffs {}", mixed_text(a), mixed_text(b), pair(pay));
            list.push(json!({"p1": mixed_json(a), "p2": mixed_json(b), "payoffs": [pay.0, pay.1]}));
        }
        out["mixed_count"] = json!(eqs.len());
        out["mixed"] = Value::Array(list);
    }
    Ok(Report { human: h, json: out, exit: 0 })
}

/// Which deviation set `env_check` examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvCheck {
    /// Relabellings of the profile's own two variables.
    Correlated,
    /// The closure of the whole environment.
    EnvNash,
}

fn verdict_line(r: &EquilibriumReport<f64>) -> String {
    match &r.witness {
        None => "equilibrium".into(),
        Some(w) => format!("NOT equilibrium; deviation {} gains {}", w.strategy, num(w.gain)),
    }
}

pub fn env_check(kind: EnvCheck, game: &Path, env: &Path, x: &str, y: &str) -> Res<Report> {
    let g = load_game(game)?;
    let e = parse_env(&read(env)?)
        .and_then(|s| s.environment(&g))
        .map_err(|err| CliError::Validation(format!("{}: {err}", env.display())))?;
    let find = |who: Player, name: &str| {
        e.var(who, name).ok_or_else(|| {
            let known: Vec<&str> = e.vars(who).iter().map(|v| v.name()).collect();
            CliError::Validation(format!(
                "no variable `{name}` for player {}; known: {}",
                player_no(who),
                known.join(" ")
            ))
        })
    };
    let (xv, yv) = (find(Player::One, x)?, find(Player::Two, y)?);
    let (r, name) = match kind {
        EnvCheck::Correlated => (is_correlated_equilibrium(&g, xv, yv, EQUILIBRIUM_TOL)?, "correlated"),
        EnvCheck::EnvNash => (is_env_nash(&g, &e, xv, yv, EQUILIBRIUM_TOL)?, "env-nash"),
    };
    let atoms = e.space().len();
    let mut h = format!("game {}, environment with {atoms} atoms\n", g.name());
    let _ = writeln!(h, "profile ({x}, {y})  payoffs {}", pair(r.payoffs));
    let _ = writeln!(h, "deviations:");
    let _ = writeln!(h, "  {:<8} {:<16} {:>14} {:>14}", "player", "strategy", "payoff", "gain");
    let mut devs = Vec::new();
    for d in &r.deviations {
        let _ =
            writeln!(h, "  {:<8} {:<16} {:>14} {:>14}", player_no(d.player), d.strategy, num(d.payoff), num(d.gain));
        devs.push(json!({"player": player_no(d.player), "strategy": d.strategy, "payoff": d.payoff, "gain": d.gain}));
    }
    let verdict = verdict_line(&r);
    let _ = writeln!(h, "verdict: {verdict}");
    let mut out = json!({
        "command": name,
        "game": g.name(),
        "atoms": atoms,
        "x": x,
        "y": y,
        "payoffs": [r.payoffs.0, r.payoffs.1],
        "equilibrium": r.equilibrium,
        "max_gain": r.max_gain,
        "verdict": verdict,
        "deviations": devs,
        "witness": r.witness.as_ref().map(|w| json!({"player": player_no(w.player), "strategy": w.strategy, "gain": w.gain})),
    });
    if kind == EnvCheck::EnvNash {
        let all = env_nash_profiles(&g, &e, EQUILIBRIUM_TOL)?;
        let names: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(h, "pure equilibria of the environment game: {}", names.join(" "));
        out["equilibria"] = json!(names);
    }
    Ok(Report { human: h, json: out, exit: 0 })
}

pub fn commute_check(trials: usize, seed: Option<u64>) -> Res<Report> {
    if trials == 0 {
        return Err(CliError::Validation("--trials must be positive".into()));
    }
    let seed = resolve_seed(seed, COMMUTE_SEED)?;
    let reports = check_commute_trials(trials, seed)?;
    let held = reports.iter().filter(|r| r.holds).count();
    let worst = reports.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    let profiles: usize = reports.iter().map(|r| r.profiles).sum();
    let ok = held == trials;
    let mut h = format!("random instances: {trials} (seed {seed})\n");
    let _ = writeln!(h, "profiles compared: {profiles}");
    let _ = writeln!(h, "max payoff difference: {}", sci(worst));
    let _ = writeln!(h, "holds on {held} of {trials}: {}", yes_no(ok));
    let out = json!({
        "command": "commute-check",
        "trials": trials,
        "seed": seed,
        "profiles": profiles,
        "max_abs_diff": worst,
        "held": held,
        "holds": ok,
    });
    Ok(Report { human: h, json: out, exit: if ok { 0 } else { 1 } })
}

fn angle_of(p: StrategyParam<f64>) -> f64 {
    p.angle().unwrap_or(f64::NAN)
}

pub fn quantum_eq(game: &Path, angles: Option<(f64, f64)>, search: Option<(usize, Option<u64>)>) -> Res<Report> {
    let g = load_game(game)?;
    let qe = QuantumEnvironment::rotation_pair();
    let mut h = format!("game {} with a maximally entangled pair, both players choosing rotations\n", g.name());
    let mut out = json!({"command": "quantum-eq", "game": g.name()});
    if let Some((theta, phi)) = angles {
        let (u, v) = (StrategyParam::Angle(theta), StrategyParam::Angle(phi));
        let r = is_quantum_equilibrium(&g, &qe, u, v, EQUILIBRIUM_TOL)?;
        let joint = quantum_profile_joint(&g, &qe, u, v)?;
        let corr = quantum_joint_is_correlated(&g, &qe, u, v, EQUILIBRIUM_TOL)?;
        let _ = writeln!(h, "theta {}  phi {}", num(theta), num(phi));
        let _ = writeln!(h, "payoffs {}", pair(r.payoffs));
        let _ = writeln!(h, "outcome distribution:");
        let mut cells = Vec::new();
        for s1 in g.rows() {
            for s2 in g.cols() {
                let p = joint[&qgt::Profile::new(s1.clone(), s2.clone())];
                let _ = writeln!(h, "  ({s1},{s2}) {}", num(p));
                cells.push(json!({"row": s1, "col": s2, "prob": p}));
            }
        }
        let _ = writeln!(h, "best responses:");
        let mut brs = Vec::new();
        for d in &r.best_responses {
            let a = angle_of(d.param);
            let _ = writeln!(
                h,
                "  player {}  angle {}  payoff {}  gain {}",
                player_no(d.player),
                num(a),
                num(d.payoff),
                num(d.gain)
            );
            brs.push(json!({"player": player_no(d.player), "angle": a, "payoff": d.payoff, "gain": d.gain}));
        }
        let _ = writeln!(h, "induced joint is a correlated equilibrium: {}", yes_no(corr.equilibrium));
        let _ = writeln!(h, "equilibrium: {}", yes_no(r.equilibrium));
        out["theta"] = json!(theta);
        out["phi"] = json!(phi);
        out["payoffs"] = json!([r.payoffs.0, r.payoffs.1]);
        out["distribution"] = Value::Array(cells);
        out["best_responses"] = Value::Array(brs);
        out["correlated"] = json!(corr.equilibrium);
        out["equilibrium"] = json!(r.equilibrium);
    }
    if let Some((starts, seed)) = search {
        let seed = resolve_seed(seed, ROTATION_SEED)?;
        let found = search_rotation_equilibria(&g, &qe, starts, seed)?;
        let _ = writeln!(h, "best-response search: {starts} starts (seed {seed}), {} classes found", found.len());
        let mut list = Vec::new();
        for f in &found {
            let _ = writeln!(
                h,
                "  theta {}  phi {}  payoffs {}  hits {}",
                num(f.angles1[0]),
                num(f.angles2[0]),
                pair(f.payoffs),
                f.hits
            );
            list.push(json!({"theta": f.angles1[0], "phi": f.angles2[0], "payoffs": [f.payoffs.0, f.payoffs.1], "hits": f.hits}));
        }
        out["search"] = json!({"starts": starts, "seed": seed, "classes": found.len(), "found": list});
    }
    Ok(Report { human: h, json: out, exit: 0 })
}

/// Named profiles of the bundled private-information game, as
/// `(player 1 angles, player 2 angles)` indexed by type.
pub fn iid1_profile(name: &str) -> Res<([f64; 2], [f64; 2])> {
    match name {
        "a" => Ok(([0.0, FRAC_PI_2], [0.0, FRAC_PI_2])),
        "b" => Ok(([FRAC_PI_8, 3.0 * FRAC_PI_8], [0.0, 3.0 * FRAC_PI_4])),
        other => {
            let v = parse_angle_list(other, 4)?;
            Ok(([v[0], v[1]], [v[2], v[3]]))
        }
    }
}

pub fn private_quantum(
    profile: Option<&str>,
    classical_bound: bool,
    sweep: Option<(usize, Option<u64>)>,
) -> Res<Report> {
    if profile.is_none() && !classical_bound && sweep.is_none() {
        return Err(CliError::Validation("give --profile, --classical-bound or --sweep".into()));
    }
    let pg = qgt::builtin::iid1::<f64>();
    let qe = QuantumEnvironment::rotation_pair();
    let types = |who: Player| pg.info(who).to_vec();
    let mut h = format!("game iid1: types {} for each player, uniform and independent\n", types(Player::One).join(" "));
    let mut out = json!({"command": "private-quantum", "builtin": "iid1", "types": types(Player::One)});
    if let Some(name) = profile {
        let (a1, a2) = iid1_profile(name)?;
        let (f1, f2) = (InfoStrategy::angles(&a1), InfoStrategy::angles(&a2));
        let r = is_private_quantum_equilibrium(&pg, &qe, &f1, &f2, EQUILIBRIUM_TOL)?;
        for (who, a) in [(Player::One, a1), (Player::Two, a2)] {
            let t = types(who);
            let _ = writeln!(h, "player {} angles: {} {}  {} {}", player_no(who), t[0], num(a[0]), t[1], num(a[1]));
        }
        let _ = writeln!(h, "payoffs {}", pair(r.payoffs));
        let _ = writeln!(h, "per-type best responses:");
        let mut per = Vec::new();
        for d in &r.per_type {
            let a = angle_of(d.best);
            let _ = writeln!(
                h,
                "  player {} {:<6} current {}  best angle {}  best {}  gain {}",
                player_no(d.player),
                d.type_label,
                num(d.current),
                num(a),
                num(d.best_value),
                num(d.gain)
            );
            per.push(json!({
                "player": player_no(d.player),
                "type": d.type_label,
                "current": d.current,
                "best_angle": a,
                "best": d.best_value,
                "gain": d.gain,
            }));
        }
        let _ = writeln!(h, "equilibrium: {}", yes_no(r.equilibrium));
        out["profile"] = json!({"name": name, "p1": a1, "p2": a2});
        out["payoffs"] = json!([r.payoffs.0, r.payoffs.1]);
        out["per_type"] = Value::Array(per);
        out["gains"] = json!([r.gains.0, r.gains.1]);
        out["equilibrium"] = json!(r.equilibrium);
    }
    if classical_bound {
        let b = classical_value_bound(&pg)?;
        let _ = writeln!(h, "classical bound: {} (attained by {})", num(b.value), b.profile);
        out["classical_bound"] = json!({"value": b.value, "profile": b.profile.to_string()});
        if let Some(p) = out.get("payoffs").and_then(|v| v[0].as_f64()) {
            let _ = writeln!(h, "quantum advantage: {}", num(p - b.value));
            out["classical_bound"]["advantage"] = json!(p - b.value);
        }
    }
    if let Some((starts, seed)) = sweep {
        let seed = resolve_seed(seed, ROTATION_SEED)?;
        let found = sweep_private_equilibria(&pg, &qe, starts, seed)?;
        let _ = writeln!(h, "best-response sweep: {starts} starts (seed {seed}), {} classes found", found.len());
        let mut list = Vec::new();
        for f in &found {
            let _ = writeln!(
                h,
                "  player 1 [{} {}]  player 2 [{} {}]  payoffs {}  hits {}",
                num(f.angles1[0]),
                num(f.angles1[1]),
                num(f.angles2[0]),
                num(f.angles2[1]),
                pair(f.payoffs),
                f.hits
            );
            list.push(json!({"p1": f.angles1, "p2": f.angles2, "payoffs": [f.payoffs.0, f.payoffs.1], "hits": f.hits}));
        }
        out["sweep"] = json!({"starts": starts, "seed": seed, "classes": found.len(), "found": list});
    }
    Ok(Report { human: h, json: out, exit: 0 })
}

pub fn bell(angles: &str) -> Res<Report> {
    let a = parse_angle_list(angles, 4)?;
    let r = bell_chain_demo([a[0], a[1], a[2], a[3]]);
    let names = ["x", "y", "z", "w"];
    let mut h = format!(
        "angles {}\n",
        names.iter().zip(&a).map(|(n, v)| format!("{n} {}", num(*v))).collect::<Vec<_>>().join("  ")
    );
    let mut pairs = Vec::new();
    for (i, j) in [(0, 3), (0, 1), (1, 2), (2, 3)] {
        let p = rotation_disagreement(a[i], a[j]);
        let _ = writeln!(h, "  disagree({},{}) {}", names[i], names[j], num(p));
        pairs.push(json!({"pair": format!("{}{}", names[i], names[j]), "disagreement": p}));
    }
    let _ = writeln!(h, "chain inequality: lhs {}  rhs {}", num(r.lhs), num(r.rhs));
    let _ = writeln!(h, "violated by the entangled pair: {}", yes_no(r.violated));
    let out =
        json!({"command": "bell", "angles": a, "pairs": pairs, "lhs": r.lhs, "rhs": r.rhs, "violated": r.violated});
    Ok(Report { human: h, json: out, exit: 0 })
}

fn amp_text(z: Complex<f64>) -> String {
    format!("({}, {})", num(z.re), num(z.im))
}

pub fn pennyflip_moves(moves: &str, shots: Option<(usize, Option<u64>)>) -> Res<Report> {
    let ops = parse_moves(moves)?;
    let ops: [UnitaryOp<f64>; 3] = ops.try_into().map_err(|v: Vec<_>| {
        CliError::Validation(format!("expected 3 moves (player 1, player 2, player 1), got {}", v.len()))
    })?;
    let run = run_sequential(&ops)?;
    let tokens = crate::parse::split_moves(moves);
    let mut h = String::from("start H: (1, 0) (0, 0)\n");
    let mut state = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let mut trace = Vec::new();
    for (k, (op, tok)) in ops.iter().zip(&tokens).enumerate() {
        state = op.apply(&state);
        let who = if k == 1 { 2 } else { 1 };
        let _ = writeln!(h, "player {who} {}: {} {}", tok.trim(), amp_text(state[0]), amp_text(state[1]));
        trace.push(json!({
            "player": who,
            "move": tok.trim(),
            "state": [[state[0].re, state[0].im], [state[1].re, state[1].im]],
        }));
    }
    let heads = run.final_state[0].norm_sqr();
    let _ = writeln!(h, "P(H) {}  P(T) {}", num(heads), num(1.0 - heads));
    let _ = writeln!(h, "payoffs {}", pair(run.payoffs));
    let mut out = json!({
        "command": "pennyflip",
        "trace": trace,
        "p_heads": heads,
        "p_tails": 1.0 - heads,
        "payoffs": [run.payoffs.0, run.payoffs.1],
    });
    if let Some((n, seed)) = shots {
        let seed = resolve_seed(seed, DEFAULT_SEED)?;
        let (hh, tt) = sample_sequential(&ops, n, seed)?;
        let _ = writeln!(h, "sampled {n} shots (seed {seed}): H {hh}  T {tt}");
        out["sample"] = json!({"shots": n, "seed": seed, "heads": hh, "tails": tt});
    }
    Ok(Report { human: h, json: out, exit: 0 })
}

pub fn pennyflip_meyer() -> Res<Report> {
    let m = meyer_cheat_check::<f64>();
    let ok = m.passed(qgt::game::PAYOFF_TOL);
    let mut h = String::from("protocol: U, then N or F from the opponent, then U^-1\n");
    let _ = writeln!(h, "unitarity residual of U: {}", sci(m.unitarity_residual));
    let _ = writeln!(h, "off-diagonal after F: {}", sci(m.off_diagonal_flip));
    let _ = writeln!(h, "off-diagonal after N: {}", sci(m.off_diagonal_no_flip));
    let _ = writeln!(h, "player 1 wins against F: {}", num(m.win_vs_flip));
    let _ = writeln!(h, "player 1 wins against N: {}", num(m.win_vs_no_flip));
    let _ = writeln!(h, "opponent mixing (flip probability, win probability):");
    for (p, w) in &m.mixtures {
        let _ = writeln!(h, "  {} {}", num(*p), num(*w));
    }
    let _ = writeln!(h, "max residual: {}", sci(m.max_residual));
    let _ = writeln!(h, "cheat succeeds: {}", yes_no(ok));
    let out = json!({
        "command": "pennyflip",
        "check": "meyer",
        "unitarity_residual": m.unitarity_residual,
        "off_diagonal_flip": m.off_diagonal_flip,
        "off_diagonal_no_flip": m.off_diagonal_no_flip,
        "win_vs_flip": m.win_vs_flip,
        "win_vs_no_flip": m.win_vs_no_flip,
        "mixtures": m.mixtures.iter().map(|(p, w)| json!([p, w])).collect::<Vec<_>>(),
        "max_residual": m.max_residual,
        "passed": ok,
    });
    Ok(Report { human: h, json: out, exit: if ok { 0 } else { 1 } })
}

/// `a+bi+cj+dk` with zero terms dropped and [`num`] coefficients.
pub fn quat_text(q: &Quaternion<f64>) -> String {
    let mut s = String::new();
    for (x, unit) in q.to_array().into_iter().zip(["", "i", "j", "k"]) {
        let t = num(x);
        if t == "0" {
            continue;
        }
        let body = match (unit, t.as_str()) {
            ("", _) => t.clone(),
            (_, "1") => unit.to_string(),
            (_, "-1") => format!("-{unit}"),
            _ => format!("{t}{unit}"),
        };
        if !s.is_empty() && !body.starts_with('-') {
            s.push('+');
        }
        s.push_str(&body);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn quat_json(q: &Quaternion<f64>) -> Value {
    json!(q.to_array())
}

fn mixture_text(m: &MixedQuatStrategy<f64>) -> String {
    m.support().iter().map(|(q, w)| format!("{}*{}", num(*w), quat_text(q))).collect::<Vec<_>>().join(" ; ")
}

fn mixture_json(m: &MixedQuatStrategy<f64>) -> Value {
    Value::Array(m.support().iter().map(|(q, w)| json!({"weight": w, "quaternion": quat_json(q)})).collect())
}

/// Outcome assignment chosen on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentChoice {
    Default,
    /// The alternative reading, with `D` paying `(D,D)`.
    Paper,
}

impl AssignmentChoice {
    pub fn get(self) -> OutcomeAssignment {
        match self {
            AssignmentChoice::Default => OutcomeAssignment::standard(),
            AssignmentChoice::Paper => OutcomeAssignment::printed(),
        }
    }
}

fn distribution_lines(h: &mut String, d: &[f64; 4]) -> Value {
    let _ = writeln!(h, "outcome distribution:");
    let mut cells = Vec::new();
    for c in Cell::ALL {
        let _ = writeln!(h, "  {c} {}", num(d[c.index()]));
        cells.push(json!({"cell": c.to_string(), "prob": d[c.index()]}));
    }
    Value::Array(cells)
}

pub fn ewl(game: &Path, p1: &str, p2: &str, asg: AssignmentChoice) -> Res<Report> {
    let g = load_game(game)?;
    let (s1, s2) = (parse_mixture(p1)?, parse_mixture(p2)?);
    let asg = asg.get();
    let r = is_quat_equilibrium(&g, &s1, &s2, &asg, EQUILIBRIUM_TOL)?;
    let d = mixed_quat_distribution(&s1, &s2, &asg);
    let mut h = format!("game {}, outcome assignment {asg}\n", g.name());
    let _ = writeln!(h, "player 1: {}", mixture_text(&s1));
    let _ = writeln!(h, "player 2: {}", mixture_text(&s2));
    let cells = distribution_lines(&mut h, &d);
    let _ = writeln!(h, "payoffs {}", pair(r.payoffs));
    let _ = writeln!(
        h,
        "best pure deviation: player 1 {} (gap {}), player 2 {} (gap {})",
        num(r.lambda_max.0),
        num(r.gaps.0),
        num(r.lambda_max.1),
        num(r.gaps.1)
    );
    if let Some(w) = &r.witness {
        let _ = writeln!(
            h,
            "deviation: player {} plays {} for {}",
            player_no(w.player),
            quat_text(&w.quaternion),
            num(w.payoff)
        );
    }
    let _ = writeln!(h, "equilibrium: {}", yes_no(r.equilibrium));
    let out = json!({
        "command": "ewl",
        "game": g.name(),
        "assignment": asg.to_string(),
        "p1": mixture_json(&s1),
        "p2": mixture_json(&s2),
        "distribution": cells,
        "payoffs": [r.payoffs.0, r.payoffs.1],
        "lambda_max": [r.lambda_max.0, r.lambda_max.1],
        "gaps": [r.gaps.0, r.gaps.1],
        "witness": r.witness.as_ref().map(|w| json!({
            "player": player_no(w.player),
            "quaternion": quat_json(&w.quaternion),
            "payoff": w.payoff,
            "gain": w.gain,
        })),
        "equilibrium": r.equilibrium,
    });
    Ok(Report { human: h, json: out, exit: 0 })
}

pub fn ewl_calibrate(asg: AssignmentChoice, seed: Option<u64>) -> Res<Report> {
    let asg = asg.get();
    let seed = resolve_seed(seed, DEFAULT_SEED)?;
    let mut h = format!("outcome assignment {asg}\n");
    let mut out = json!({"command": "ewl", "check": "calibrate", "assignment": asg.to_string(), "seed": seed});
    let exit = match calibrate(&asg, seed)? {
        CalibrationOutcome::Found(c) => {
            let _ = writeln!(h, "player 1 plays conj(a) q(U) a, player 2 plays conj(a) tau(q(V)) a");
            let _ = writeln!(h, "a = {}", quat_text(&c.a));
            let _ = writeln!(
                h,
                "frame signs {} {} {}  raw determinant {}",
                num(c.signs[0]),
                num(c.signs[1]),
                num(c.signs[2]),
                num(c.raw_det)
            );
            let _ = writeln!(
                h,
                "validated on {} random operator pairs (seed {seed}): max total variation {}",
                c.trials,
                sci(c.max_tv)
            );
            let ok = c.max_tv <= qgt::ewl::CALIBRATION_TOL;
            let _ = writeln!(h, "identification found: {}", yes_no(ok));
            out["found"] = json!(ok);
            out["a"] = quat_json(&c.a);
            out["signs"] = json!(c.signs);
            out["raw_det"] = json!(c.raw_det);
            out["trials"] = json!(c.trials);
            out["max_tv"] = json!(c.max_tv);
            if ok {
                0
            } else {
                1
            }
        }
        CalibrationOutcome::Infeasible { residual } => {
            let _ = writeln!(h, "identification found: no (frame residual {})", sci(residual));
            out["found"] = json!(false);
            out["residual"] = json!(residual);
            1
        }
    };
    Ok(Report { human: h, json: out, exit })
}

pub fn ewl_search(game: &Path, asg: AssignmentChoice, starts: usize, seed: Option<u64>) -> Res<Report> {
    let g = load_game(game)?;
    let asg = asg.get();
    let seed = resolve_seed(seed, DEFAULT_SEED)?;
    let found = search_quat_equilibria(&g, &asg, starts, seed)?;
    let mut h = format!("game {}, outcome assignment {asg}\n", g.name());
    let _ = writeln!(h, "best-response search: {starts} starts (seed {seed}), {} classes found", found.len());
    let mut list = Vec::new();
    for f in &found {
        let _ = writeln!(h, "  payoffs {}  hits {}", pair(f.payoffs), f.hits);
        let _ = writeln!(h, "    player 1: {}", mixture_text(&f.s1));
        let _ = writeln!(h, "    player 2: {}", mixture_text(&f.s2));
        list.push(json!({
            "payoffs": [f.payoffs.0, f.payoffs.1],
            "hits": f.hits,
            "p1": mixture_json(&f.s1),
            "p2": mixture_json(&f.s2),
            "distribution": f.distribution,
        }));
    }
    let out = json!({"command": "ewl", "game": g.name(), "assignment": asg.to_string(), "starts": starts, "seed": seed, "classes": found.len(), "found": list});
    Ok(Report { human: h, json: out, exit: 0 })
}
