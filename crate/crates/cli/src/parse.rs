//! Text formats and literal syntax understood by the command line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use qgt::environment::{Environment, RandomVariable, SampleSpace};
use qgt::ewl::{MixedQuatStrategy, Quaternion};
use qgt::game::{Game, Player};
use qgt::penny::{flip, meyer_u, no_flip};
use qgt::quantum::UnitaryOp;

use crate::CliError;

type Res<T> = std::result::Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Tolerance on the total probability of an environment file.
pub const ENV_SUM_TOL: f64 = 1e-9;
/// Quaternion literals further than this from unit norm are rejected; closer
/// ones are normalised.
pub const QUAT_NORM_SLACK: f64 = 1e-3;

/// Exact value of a decimal (`-1.25`, `3e-2`) or rational (`5/12`) literal.
pub fn parse_rational(s: &str) -> Res<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (parse_decimal(n)?, parse_decimal(d)?);
        if d.is_zero() {
            return Err(bad(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Res<BigRational> {
    let s = s.trim();
    let err = || bad(format!("`{s}` is not a number"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: &BigRational) -> Res<f64> {
    r.to_f64().filter(|x| x.is_finite()).ok_or_else(|| bad(format!("{r} is out of range")))
}

/// Parses a number literal and converts it to `f64` once.
pub fn parse_number(s: &str) -> Res<f64> {
    to_f64(&parse_rational(s)?)
}

/// Angle literal: a number, or a multiple of `pi` such as `pi/2`, `3pi/4`,
/// `-3*pi/8`, `2pi`.
pub fn parse_angle(s: &str) -> Res<f64> {
    let t = s.trim().replace(' ', "");
    let Some(k) = t.find("pi") else { return parse_number(&t) };
    let (coef, rest) = (&t[..k], &t[k + 2..]);
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_number(c)?,
    };
    let d = match rest {
        "" => 1.0,
        r => parse_number(r.strip_prefix('/').ok_or_else(|| bad(format!("bad angle `{s}`")))?)?,
    };
    if d == 0.0 {
        return Err(bad(format!("zero denominator in `{s}`")));
    }
    Ok(c * std::f64::consts::PI / d)
}

pub fn parse_angle_list(s: &str, n: usize) -> Res<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(parse_angle).collect::<Res<_>>()?;
    if v.len() != n {
        return Err(bad(format!("expected {n} comma-separated angles, got {}", v.len())));
    }
    Ok(v)
}

/// Splits `s` into signed terms: `"1-0.5i+j"` gives `["1", "-0.5i", "+j"]`.
fn signed_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        let exponent = matches!(prev, Some('e' | 'E'));
        if (ch == '+' || ch == '-') && !cur.is_empty() && !exponent {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn term_coefficient(body: &str, whole: &str) -> Res<f64> {
    let body = body.strip_suffix('*').unwrap_or(body);
    match body {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        b => parse_number(b).map_err(|_| bad(format!("bad term in `{whole}`"))),
    }
}

/// Complex literal such as `1`, `-i` or `0.5-0.5i`. Each term is a decimal or
/// rational coefficient, with a trailing `i` on the imaginary part.
pub fn parse_complex(s: &str) -> Res<Complex<f64>> {
    let mut z = Complex::new(0.0, 0.0);
    let terms = signed_terms(s);
    if terms.is_empty() {
        return Err(bad("empty complex literal"));
    }
    for t in terms {
        match t.strip_suffix('i') {
            Some(body) => z.im += term_coefficient(body, s)?,
            None => z.re += parse_number(&t)?,
        }
    }
    Ok(z)
}

/// Quaternion literal `a+bi+cj+dk`; any subset of terms, in any order.
pub fn parse_quaternion(s: &str) -> Res<Quaternion<f64>> {
    let mut v = [0.0; 4];
    let terms = signed_terms(s);
    if terms.is_empty() {
        return Err(bad("empty quaternion literal"));
    }
    for t in terms {
        let (slot, body) = match t.chars().last() {
            Some('i') => (1, &t[..t.len() - 1]),
            Some('j') => (2, &t[..t.len() - 1]),
            Some('k') => (3, &t[..t.len() - 1]),
            _ => (0, t.as_str()),
        };
        v[slot] += if slot == 0 { parse_number(body)? } else { term_coefficient(body, s)? };
    }
    Ok(Quaternion::from_array(v))
}

/// Unit quaternion literal; small rounding in the coefficients is normalised away.
pub fn parse_unit_quaternion(s: &str) -> Res<Quaternion<f64>> {
    let q = parse_quaternion(s)?;
    let n = q.norm();
    if (n - 1.0).abs() > QUAT_NORM_SLACK {
        return Err(bad(format!("`{s}` has norm {n}, expected a unit quaternion")));
    }
    q.normalized().map_err(|e| bad(e.to_string()))
}

/// Mixture literal `w1*q1 ; w2*q2 ; ...`; a lone `q` is the pure strategy.
pub fn parse_mixture(s: &str) -> Res<MixedQuatStrategy<f64>> {
    let mut support = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        // a bare quaternion carries weight 1
        let (w, q) = match part.split_once('*') {
            Some((w, q)) => (parse_number(w)?, q),
            None => (1.0, part),
        };
        support.push((parse_unit_quaternion(q)?, w));
    }
    MixedQuatStrategy::new(support).map_err(|e| bad(e.to_string()))
}

/// Penny move: `N`, `F`, `U`, `Uinv`, or `[a,b,c,d]` (row-major complex entries).
pub fn parse_move(s: &str) -> Res<UnitaryOp<f64>> {
    let t = s.trim();
    match t {
        "N" => Ok(no_flip()),
        "F" => Ok(flip()),
        "U" => Ok(meyer_u()),
        "Uinv" => Ok(meyer_u::<f64>().adjoint()),
        _ => {
            let inner = t
                .strip_prefix('[')
                .and_then(|x| x.strip_suffix(']'))
                .ok_or_else(|| bad(format!("unknown move `{t}`")))?;
            let entries: Vec<Complex<f64>> = inner.split(',').map(parse_complex).collect::<Res<_>>()?;
            if entries.len() != 4 {
                return Err(bad(format!("move `{t}` needs 4 entries")));
            }
            UnitaryOp::new(2, entries).map_err(|e| bad(e.to_string()))
        }
    }
}

/// Splits a move list on top-level commas; brackets group matrix entries.
pub fn split_moves(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

/// Comma-separated moves; see [`parse_move`] for the tokens.
pub fn parse_moves(s: &str) -> Res<Vec<UnitaryOp<f64>>> {
    if s.matches('[').count() != s.matches(']').count() {
        return Err(bad("unbalanced brackets in moves"));
    }
    split_moves(s).iter().map(|m| parse_move(m)).collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((n + 1, l))
    })
}

/// Parses the game file format:
///
/// ```text
/// game: <name>
/// rows: C D
/// cols: C D
/// payoff C D = 2 1
/// ```
pub fn parse_game(text: &str) -> Res<Game<f64>> {
    let (mut name, mut rows, mut cols) = (None, None, None);
    let mut cells: Vec<(usize, String, String, f64, f64)> = Vec::new();
    for (n, line) in content_lines(text) {
        let at = |m: &str| bad(format!("line {n}: {m}"));
        if let Some(v) = line.strip_prefix("game:") {
            name = Some(v.trim().to_string());
        } else if let Some(v) = line.strip_prefix("rows:") {
            rows = Some(v.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(v) = line.strip_prefix("cols:") {
            cols = Some(v.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(v) = line.strip_prefix("payoff ") {
            let (lhs, rhs) = v.split_once('=').ok_or_else(|| at("missing `=`"))?;
            let l: Vec<&str> = lhs.split_whitespace().collect();
            let r: Vec<&str> = rhs.split_whitespace().collect();
            if l.len() != 2 || r.len() != 2 {
                return Err(at("expected `payoff <row> <col> = <p1> <p2>`"));
            }
            let p1 = parse_number(r[0]).map_err(|e| at(&e.to_string()))?;
            let p2 = parse_number(r[1]).map_err(|e| at(&e.to_string()))?;
            cells.push((n, l[0].into(), l[1].into(), p1, p2));
        } else {
            return Err(at(&format!("unrecognised line `{line}`")));
        }
    }
    let name = name.ok_or_else(|| bad("missing `game:` line"))?;
    let rows = rows.ok_or_else(|| bad("missing `rows:` line"))?;
    let cols = cols.ok_or_else(|| bad("missing `cols:` line"))?;
    let mut seen = HashMap::new();
    for (n, r, c, _, _) in &cells {
        if !rows.contains(r) {
            return Err(bad(format!("line {n}: unknown row `{r}`")));
        }
        if !cols.contains(c) {
            return Err(bad(format!("line {n}: unknown column `{c}`")));
        }
        if let Some(first) = seen.insert((r.clone(), c.clone()), *n) {
            return Err(bad(format!("line {n}: cell ({r},{c}) already given on line {first}")));
        }
    }
    let cells = cells.into_iter().map(|(_, r, c, a, b)| (r, c, (a, b)));
    Game::from_cells(name, rows, cols, cells).map_err(|e| bad(e.to_string()))
}

/// Inverse of [`parse_game`]. Numbers use the shortest decimal that reads back exactly.
pub fn write_game(g: &Game<f64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "game: {}", g.name());
    let _ = writeln!(s, "rows: {}", g.rows().join(" "));
    let _ = writeln!(s, "cols: {}", g.cols().join(" "));
    for (i, r) in g.rows().iter().enumerate() {
        for (j, c) in g.cols().iter().enumerate() {
            let (a, b) = g.at(i, j);
            let _ = writeln!(s, "payoff {r} {c} = {a:?} {b:?}");
        }
    }
    s
}

/// Environment file contents before they are bound to a game.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub vars: [Vec<String>; 2],
    pub atoms: Vec<(String, BigRational, HashMap<String, String>)>,
}

/// Parses the environment file format:
///
/// ```text
/// var1: X Y
/// var2: W
/// atoms: 2
/// atom w0 prob 1/2 X=C Y=D W=C
/// ```
pub fn parse_env(text: &str) -> Res<EnvSpec> {
    let (mut var1, mut var2, mut count) = (None, None, None);
    let mut atoms = Vec::new();
    for (n, line) in content_lines(text) {
        let at = |m: &str| bad(format!("line {n}: {m}"));
        if let Some(v) = line.strip_prefix("var1:") {
            var1 = Some(v.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(v) = line.strip_prefix("var2:") {
            var2 = Some(v.split_whitespace().map(String::from).collect::<Vec<_>>());
        } else if let Some(v) = line.strip_prefix("atoms:") {
            count = Some(v.trim().parse::<usize>().map_err(|_| at("`atoms:` needs a count"))?);
        } else if let Some(v) = line.strip_prefix("atom ") {
            let (Some(v1), Some(v2)) = (&var1, &var2) else {
                return Err(at("variables must be declared before atoms"));
            };
            let mut parts = v.split_whitespace();
            let id = parts.next().ok_or_else(|| at("missing atom id"))?.to_string();
            if parts.next() != Some("prob") {
                return Err(at("expected `atom <id> prob <p> ...`"));
            }
            let p = parse_rational(parts.next().ok_or_else(|| at("missing probability"))?)?;
            if p.is_negative() {
                return Err(at("negative probability"));
            }
            let mut values = HashMap::new();
            for a in parts {
                let (k, val) = a.split_once('=').ok_or_else(|| at(&format!("`{a}` is not VAR=label")))?;
                if !v1.iter().chain(v2).any(|d| d == k) {
                    return Err(at(&format!("undeclared variable `{k}`")));
                }
                if values.insert(k.to_string(), val.to_string()).is_some() {
                    return Err(at(&format!("`{k}` assigned twice")));
                }
            }
            if let Some(missing) = v1.iter().chain(v2).find(|d| !values.contains_key(*d)) {
                return Err(at(&format!("`{missing}` not assigned")));
            }
            atoms.push((id, p, values));
        } else {
            return Err(at(&format!("unrecognised line `{line}`")));
        }
    }
    let vars = [var1.ok_or_else(|| bad("missing `var1:`"))?, var2.ok_or_else(|| bad("missing `var2:`"))?];
    if let Some(c) = count {
        if c != atoms.len() {
            return Err(bad(format!("`atoms: {c}` but {} atoms listed", atoms.len())));
        }
    }
    let total = atoms.iter().fold(BigRational::zero(), |acc, a| acc + &a.1);
    if (to_f64(&total)? - 1.0).abs() > ENV_SUM_TOL {
        return Err(bad(format!("atom probabilities sum to {total}")));
    }
    Ok(EnvSpec { vars, atoms })
}

impl EnvSpec {
    /// Binds the variables to the strategy sets of `g`. Probabilities are
    /// divided by their exact total before conversion.
    pub fn environment(&self, g: &Game<f64>) -> Res<Environment<f64>> {
        let total = self.atoms.iter().fold(BigRational::zero(), |acc, a| acc + &a.1);
        let scale = if total.is_zero() { BigRational::one() } else { total };
        let probs: Vec<(String, f64)> =
            self.atoms.iter().map(|(id, p, _)| Ok((id.clone(), to_f64(&(p / &scale))?))).collect::<Res<_>>()?;
        let space = Arc::new(SampleSpace::new(probs).map_err(|e| bad(e.to_string()))?);
        let mut lists: [Vec<RandomVariable<f64>>; 2] = [Vec::new(), Vec::new()];
        for who in [Player::One, Player::Two] {
            for name in &self.vars[who.index()] {
                let values: Vec<String> = self.atoms.iter().map(|(_, _, v)| v[name].clone()).collect();
                if let Some(bad_label) = values.iter().find(|v| !g.strategies(who).contains(v)) {
                    return Err(bad(format!("`{name}` takes value `{bad_label}`, not a strategy of {who}")));
                }
                lists[who.index()]
                    .push(RandomVariable::new(name.clone(), &space, who, values).map_err(|e| bad(e.to_string()))?);
            }
        }
        let [v1, v2] = lists;
        Environment::for_game(g, &space, v1, v2).map_err(|e| bad(e.to_string()))
    }
}
