//! Instance and plan files, LP text export and solution import.
//!
//! JSON documents carry a `schema_version` next to the flattened payload.
//! The LP writer produces the usual CPLEX-style text format; [`LpFile`] is
//! its parsed form and doubles as a grammar checker for emitted files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cuts::CutPool;
use crate::formulation::{MilpModel, Sense};
use crate::lp::INF;
use crate::model::Instance;
use crate::routes::Plan;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    schema_version: u32,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    })?;
    s.push('\n');
    Ok(s)
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    #[derive(Deserialize)]
    struct Probe {
        schema_version: Option<u32>,
    }
    let probe: Probe = serde_json::from_str(text)?;
    match probe.schema_version {
        Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(Error::SchemaVersion(v)),
        None => return Err(Error::SchemaVersion(0)),
    }
    let v: Versioned<T> = serde_json::from_str(text)?;
    Ok(v.body)
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    to_json(inst)
}

/// Parses and validates an instance document.
pub fn instance_from_json(text: &str) -> Result<Instance> {
    let inst: Instance = from_json(text)?;
    inst.validate()?;
    Ok(inst)
}

/// Plans refer to arc ids of the LT and LTX graphs, which depend on the
/// instance only.
pub fn plan_to_json(plan: &Plan) -> Result<String> {
    to_json(plan)
}

pub fn plan_from_json(text: &str) -> Result<Plan> {
    from_json(text)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    Ok(std::fs::write(path, instance_to_json(inst)?)?)
}

pub fn read_plan(path: &Path) -> Result<Plan> {
    plan_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_plan(path: &Path, plan: &Plan) -> Result<()> {
    Ok(std::fs::write(path, plan_to_json(plan)?)?)
}

/// A number with 17 significant digits, exponent padded to two digits.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:.16e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub coeffs: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Structural content of an LP file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpFile {
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<LpRow>,
    /// Explicit bounds, in declaration order.
    pub bounds: Vec<(String, f64, f64)>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

const TERMS_PER_LINE: usize = 6;

fn is_binary(lo: f64, hi: f64) -> bool {
    lo == 0.0 && hi == 1.0
}

impl LpFile {
    /// The model (and optionally a cut pool appended as rows) in LP form.
    pub fn from_model(model: &MilpModel, cuts: Option<&CutPool>) -> LpFile {
        let name = |j: usize| model.vars[j].name.clone();
        let mut f = LpFile {
            objective: model
                .vars
                .iter()
                .filter(|v| v.cost != 0.0)
                .map(|v| (v.name.clone(), v.cost))
                .collect(),
            ..LpFile::default()
        };
        let extra = cuts.map(|p| p.rows()).unwrap_or_default();
        for r in model.rows.iter().chain(&extra) {
            f.rows.push(LpRow {
                name: r.name.clone(),
                coeffs: r.coeffs.iter().map(|&(j, c)| (name(j), c)).collect(),
                sense: r.sense,
                rhs: r.rhs,
            });
        }
        for v in &model.vars {
            if v.integer && is_binary(v.lower, v.upper) {
                f.binaries.push(v.name.clone());
                continue;
            }
            f.bounds.push((v.name.clone(), v.lower, v.upper));
            if v.integer {
                f.generals.push(v.name.clone());
            }
        }
        f
    }

    pub fn emit(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for r in &self.rows {
            let _ = write!(out, " {}:", r.name);
            terms(&mut out, &r.coeffs);
            let _ = writeln!(out, " {} {}", r.sense.symbol(), fmt_num(r.rhs));
        }
        out.push_str("Bounds\n");
        for (n, lo, hi) in &self.bounds {
            let lo = if *lo <= -INF { "-inf".to_string() } else { fmt_num(*lo) };
            let hi = if *hi >= INF { "+inf".to_string() } else { fmt_num(*hi) };
            let _ = writeln!(out, " {lo} <= {n} <= {hi}");
        }
        for (title, list) in [("Binaries", &self.binaries), ("Generals", &self.generals)] {
            if list.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{title}");
            for chunk in list.chunks(TERMS_PER_LINE * 2) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
        out.push_str("End\n");
        out
    }

    /// Parses LP text of the shape written by [`LpFile::emit`].
    pub fn parse(text: &str) -> Result<LpFile> {
        #[derive(PartialEq, Clone, Copy)]
        enum Sec {
            None,
            Obj,
            Rows,
            Bounds,
            Bin,
            Gen,
            End,
        }
        let mut f = LpFile::default();
        let mut sec = Sec::None;
        // Pending statement text and the line it started on.
        let mut stmt: Option<(usize, String)> = None;
        let flush = |f: &mut LpFile, sec: Sec, stmt: &mut Option<(usize, String)>| -> Result<()> {
            let Some((line, s)) = stmt.take() else { return Ok(()) };
            match sec {
                Sec::Obj => {
                    let (label, body) = split_label(line, &s)?;
                    if label != "obj" {
                        return Err(lp_err(line, "objective must be labelled obj"));
                    }
                    f.objective = parse_terms(line, &tokens(body))?;
                }
                Sec::Rows => f.rows.push(parse_row(line, &s)?),
                _ => unreachable!(),
            }
            Ok(())
        };
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let l = raw.split('\\').next().unwrap_or("");
            if l.trim().is_empty() {
                continue;
            }
            let head = l.trim().to_ascii_lowercase();
            let next = match head.as_str() {
                "minimize" | "minimise" | "min" => Some(Sec::Obj),
                "subject to" | "st" | "s.t." => Some(Sec::Rows),
                "bounds" => Some(Sec::Bounds),
                "binaries" | "binary" | "bin" => Some(Sec::Bin),
                "generals" | "general" | "gen" => Some(Sec::Gen),
                "end" => Some(Sec::End),
                _ => None,
            };
            if let Some(n) = next {
                flush(&mut f, sec, &mut stmt)?;
                if sec == Sec::End {
                    return Err(lp_err(line, "text after End"));
                }
                if sec == Sec::None && n != Sec::Obj {
                    return Err(lp_err(line, "expected Minimize"));
                }
                sec = n;
                continue;
            }
            match sec {
                Sec::None => return Err(lp_err(line, "expected Minimize")),
                Sec::End => return Err(lp_err(line, "text after End")),
                Sec::Obj | Sec::Rows => {
                    let first = l.split_whitespace().next().unwrap_or("");
                    if first.ends_with(':') || l.contains(':') && !first.starts_with(['+', '-']) {
                        flush(&mut f, sec, &mut stmt)?;
                        stmt = Some((line, l.to_string()));
                    } else {
                        match stmt.as_mut() {
                            Some((_, s)) => {
                                s.push(' ');
                                s.push_str(l);
                            }
                            None => return Err(lp_err(line, "continuation without a statement")),
                        }
                    }
                }
                Sec::Bounds => f.bounds.push(parse_bound(line, l)?),
                Sec::Bin => f.binaries.extend(l.split_whitespace().map(String::from)),
                Sec::Gen => f.generals.extend(l.split_whitespace().map(String::from)),
            }
        }
        if sec != Sec::End {
            return Err(lp_err(text.lines().count(), "missing End"));
        }
        Ok(f)
    }

    /// Every variable name, in first-mention order.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        let mut add = |n: &String| {
            if !seen.contains_key(n) {
                seen.insert(n.clone(), ());
                out.push(n.clone());
            }
        };
        self.objective.iter().for_each(|(n, _)| add(n));
        self.rows.iter().flat_map(|r| &r.coeffs).for_each(|(n, _)| add(n));
        self.bounds.iter().for_each(|(n, _, _)| add(n));
        self.binaries.iter().chain(&self.generals).for_each(&mut add);
        out
    }
}

fn lp_err(line: usize, msg: &str) -> Error {
    Error::LpFormat {
        line,
        msg: msg.to_string(),
    }
}

fn terms(out: &mut String, t: &[(String, f64)]) {
    if t.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, (n, c)) in t.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_sign_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {n}", fmt_num(c.abs()));
    }
}

fn tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn split_label(line: usize, s: &str) -> Result<(&str, &str)> {
    let (label, body) = s.split_once(':').ok_or_else(|| lp_err(line, "missing label"))?;
    let label = label.trim();
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err(lp_err(line, "bad label"));
    }
    Ok((label, body))
}

fn num(line: usize, t: &str) -> Result<f64> {
    match t {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(INF),
        "-inf" | "-infinity" => Ok(-INF),
        _ => t.parse().map_err(|_| lp_err(line, &format!("bad number {t}"))),
    }
}

/// `[+|-] coef name` sequences; a bare `0` stands for the empty sum.
fn parse_terms(line: usize, toks: &[&str]) -> Result<Vec<(String, f64)>> {
    if toks == ["0"] {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut k = 0;
    while k < toks.len() {
        let mut sign = 1.0;
        if toks[k] == "+" || toks[k] == "-" {
            if toks[k] == "-" {
                sign = -1.0;
            }
            k += 1;
        }
        let (c, n) = match (toks.get(k), toks.get(k + 1)) {
            (Some(c), Some(n)) if c.parse::<f64>().is_ok() => (c.parse::<f64>().unwrap(), *n),
            (Some(n), _) => (1.0, *n),
            _ => return Err(lp_err(line, "dangling sign")),
        };
        k += if n == toks[k] { 1 } else { 2 };
        if n.parse::<f64>().is_ok() || n.starts_with(['+', '-', '<', '>', '=']) {
            return Err(lp_err(line, &format!("expected a variable, found {n}")));
        }
        out.push((n.to_string(), sign * c));
    }
    Ok(out)
}

fn parse_row(line: usize, s: &str) -> Result<LpRow> {
    let (label, body) = split_label(line, s)?;
    let toks = tokens(body);
    let pos = toks
        .iter()
        .position(|t| matches!(*t, "<=" | ">=" | "=" | "=<" | "=>"))
        .ok_or_else(|| lp_err(line, "row without a sense"))?;
    let sense = match toks[pos] {
        "<=" | "=<" => Sense::Le,
        ">=" | "=>" => Sense::Ge,
        _ => Sense::Eq,
    };
    if pos + 2 != toks.len() {
        return Err(lp_err(line, "expected a single right-hand side"));
    }
    Ok(LpRow {
        name: label.to_string(),
        coeffs: parse_terms(line, &toks[..pos])?,
        sense,
        rhs: num(line, toks[pos + 1])?,
    })
}

fn parse_bound(line: usize, l: &str) -> Result<(String, f64, f64)> {
    let t = tokens(l);
    match t.as_slice() {
        [lo, "<=", n, "<=", hi] => Ok((n.to_string(), num(line, lo)?, num(line, hi)?)),
        [n, ">=", lo] => Ok((n.to_string(), num(line, lo)?, INF)),
        [n, "<=", hi] => Ok((n.to_string(), 0.0, num(line, hi)?)),
        [n, "=", v] => Ok((n.to_string(), num(line, v)?, num(line, v)?)),
        [n, "free"] => Ok((n.to_string(), -INF, INF)),
        _ => Err(lp_err(line, "unrecognised bound")),
    }
}

/// LP text for a model, with an optional cut pool appended as rows.
pub fn emit_lp(model: &MilpModel, cuts: Option<&CutPool>) -> String {
    LpFile::from_model(model, cuts).emit()
}

pub fn write_lp(path: &Path, model: &MilpModel, cuts: Option<&CutPool>) -> Result<()> {
    Ok(std::fs::write(path, emit_lp(model, cuts))?)
}

/// `name value` lines for the nonzero entries of `x`.
pub fn emit_solution(model: &MilpModel, x: &[f64]) -> String {
    let mut out = String::new();
    for (v, &xv) in model.vars.iter().zip(x) {
        if xv != 0.0 {
            let _ = writeln!(out, "{} {}", v.name, fmt_num(xv));
        }
    }
    out
}

/// Reads `name value` lines into a vector indexed like the model's
/// variables; absent names are zero. Blank lines and lines starting with `#`
/// are skipped. Returns the values and the number of unknown names.
pub fn parse_solution(model: &MilpModel, text: &str) -> Result<(Vec<f64>, usize)> {
    let index: HashMap<&str, usize> = model.vars.iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
    let mut x = vec![0.0; model.num_vars()];
    let mut unknown = 0;
    for (k, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let t = tokens(l);
        let [name, value] = t.as_slice() else {
            return Err(Error::SolutionFormat {
                line: k + 1,
                msg: "expected `name value`".into(),
            });
        };
        let value: f64 = value.parse().map_err(|_| Error::SolutionFormat {
            line: k + 1,
            msg: format!("bad value {value}"),
        })?;
        match index.get(name) {
            Some(&j) => x[j] = value,
            None => unknown += 1,
        }
    }
    if unknown > 0 {
        log::warn!("solution: ignored {unknown} unknown variable names");
    }
    Ok((x, unknown))
}

pub fn read_solution(path: &Path, model: &MilpModel) -> Result<(Vec<f64>, usize)> {
    parse_solution(model, &std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnc::{solve_milp, SolverConfig};
    use crate::cuts::{generate, CutConfig};
    use crate::formulation::{build_model, solution_to_plan, BuildOptions};
    use crate::graph::{Flavor, GraphConfig, Graphs};
    use crate::model::example_instance;

    fn lt_model() -> (Instance, Graphs, MilpModel) {
        let inst = example_instance();
        let graphs = Graphs::build(&inst, Flavor::Lt, &GraphConfig::pruned());
        let m = build_model(&inst, &graphs, BuildOptions::new(Flavor::Lt));
        (inst, graphs, m)
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e+00");
        assert_eq!(fmt_num(-0.25), "-2.5000000000000000e-01");
        assert_eq!(fmt_num(0.0), "0");
        for v in [0.1, 1.0 / 3.0, -123456.789, 1e300] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn instance_round_trip() {
        let inst = example_instance();
        let s = instance_to_json(&inst).unwrap();
        assert!(s.contains("\"schema_version\": 1"));
        let back = instance_from_json(&s).unwrap();
        assert_eq!(back, inst);
        assert_eq!(instance_to_json(&back).unwrap(), s);
    }

    #[test]
    fn schema_version_is_checked() {
        let s = instance_to_json(&example_instance()).unwrap();
        let bumped = s.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(matches!(instance_from_json(&bumped), Err(Error::SchemaVersion(9))));
        let missing = s.replace("\"schema_version\": 1,", "");
        assert!(matches!(instance_from_json(&missing), Err(Error::SchemaVersion(0))));
    }

    #[test]
    fn plan_round_trip() {
        let plan = Plan {
            trucks: vec![vec![0, 5, 9], vec![]],
            drivers: vec![vec![1, 2]],
            days_off: vec![vec![false, true]],
        };
        let s = plan_to_json(&plan).unwrap();
        assert_eq!(plan_from_json(&s).unwrap(), plan);
    }

    #[test]
    fn lp_round_trip() {
        let (inst, graphs, m) = lt_model();
        let pool = generate(&inst, &graphs, &m, &CutConfig::default()).unwrap();
        for cuts in [None, Some(&pool)] {
            let text = emit_lp(&m, cuts);
            let parsed = LpFile::parse(&text).unwrap();
            assert_eq!(parsed, LpFile::from_model(&m, cuts));
            assert_eq!(parsed.emit(), text);
            assert_eq!(parsed.variables().len(), m.num_vars());
        }
    }

    #[test]
    fn lp_row_names() {
        let (_, _, m) = lt_model();
        let text = emit_lp(&m, None);
        let picks: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("pick_once_r")).collect();
        assert_eq!(picks.len(), 2);
        for s in ["Minimize", "Subject To", "Bounds", "Binaries", "End"] {
            assert!(text.lines().any(|l| l == s), "{s}");
        }
    }

    #[test]
    fn lp_relaxation_has_bounds_only() {
        let (_, _, m) = lt_model();
        let f = LpFile::parse(&emit_lp(&m.lp_relaxation(), None)).unwrap();
        assert!(f.binaries.is_empty() && f.generals.is_empty());
        assert_eq!(f.bounds.len(), m.num_vars());
    }

    #[test]
    fn lp_parse_rejects_garbage() {
        assert!(LpFile::parse("Subject To\n c: x >= 1\nEnd\n").is_err());
        assert!(LpFile::parse("Minimize\n obj: + 1 x\nSubject To\n c: + 1 x 1\nEnd\n").is_err());
        assert!(LpFile::parse("Minimize\n obj: + 1 x\n").is_err());
        let ok = LpFile::parse("Minimize\n obj: x + 2 y\nSubject To\n c1: x - y >= -1\nBounds\n y >= 2\nEnd\n").unwrap();
        assert_eq!(ok.objective, vec![("x".to_string(), 1.0), ("y".to_string(), 2.0)]);
        assert_eq!(ok.rows[0].coeffs[1], ("y".to_string(), -1.0));
        assert_eq!(ok.bounds[0], ("y".to_string(), 2.0, INF));
    }

    #[test]
    fn solution_reimport_gives_optimum() {
        let (inst, graphs, m) = lt_model();
        let res = solve_milp(&m, None, &SolverConfig::default());
        let mut text = emit_solution(&m, res.x.as_ref().unwrap());
        text.push_str("# comment\nnot_a_var 1\n");
        let (x, unknown) = parse_solution(&m, &text).unwrap();
        assert_eq!(unknown, 1);
        assert_eq!(m.objective(&x), 2.0);
        let plan = solution_to_plan(&inst, &graphs, &m, &x).unwrap();
        assert_eq!(plan.cost(&graphs.lt, &graphs.ltx).total, 2);
        assert!(parse_solution(&m, "X_v0_a1\n").is_err());
        assert!(parse_solution(&m, "X_v0_a1 abc\n").is_err());
    }
}
