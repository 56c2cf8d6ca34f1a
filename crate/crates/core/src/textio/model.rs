use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use super::formula::{parse_formula, render_formula, FormulaEnv};
use super::ParseError;
use crate::cgs::{profile_from_index, Cgs, CgsSpec, CgsValidationError};
use crate::discount::DiscountFn;
use crate::formula::Formula;
use crate::rational::{format_exact, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] CgsValidationError),
}

/// Source form of a discount declaration, kept so that models re-render with
/// the names they were written with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscountExpr {
    Exp(Rational),
    Hyp,
    Scale(Rational, Box<DiscountExpr>),
    Shift(u64, Box<DiscountExpr>),
    Table(Vec<Rational>, Box<DiscountExpr>),
    Name(String),
}

impl fmt::Display for DiscountExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscountExpr::Exp(r) => write!(f, "exp {}", format_exact(r)),
            DiscountExpr::Hyp => write!(f, "hyp"),
            DiscountExpr::Scale(r, inner) => write!(f, "scale {} {inner}", format_exact(r)),
            DiscountExpr::Shift(k, inner) => write!(f, "shift {k} {inner}"),
            DiscountExpr::Table(vals, tail) => {
                write!(f, "table")?;
                for v in vals {
                    write!(f, " {}", format_exact(v))?;
                }
                write!(f, " then {tail}")
            }
            DiscountExpr::Name(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscountDecl {
    pub name: String,
    pub expr: DiscountExpr,
    pub func: DiscountFn,
}

/// A parsed model: the game structure, its discount declarations in source
/// order, and any `goal` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFile {
    pub cgs: Cgs,
    pub discounts: Vec<DiscountDecl>,
    pub goals: Vec<(String, Formula)>,
}

impl ModelFile {
    /// Discounts and agents of this model, for parsing formulas against it.
    pub fn env(&self) -> FormulaEnv {
        FormulaEnv {
            discounts: self
                .discounts
                .iter()
                .map(|d| (d.name.clone(), d.func.clone()))
                .collect(),
            agents: Some(self.cgs.agents().to_vec()),
        }
    }

    pub fn discount(&self, name: &str) -> Option<&DiscountFn> {
        self.discounts
            .iter()
            .find(|d| d.name == name)
            .map(|d| &d.func)
    }

    pub fn goal(&self, agent: &str) -> Option<&Formula> {
        self.goals.iter().find(|(a, _)| a == agent).map(|(_, g)| g)
    }
}

struct Word<'a> {
    text: &'a str,
    col: usize,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word {
                    text: &line[s..i],
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Word {
            text: &line[s..],
            col: s + 1,
        });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

struct TransLine {
    line: usize,
    col: usize,
    source: String,
    profile: Vec<String>,
    target: String,
}

/// Parses a model file and validates the resulting game structure.
pub fn parse_model(text: &str) -> Result<ModelFile, ModelError> {
    let mut agents: Option<Vec<String>> = None;
    let mut actions: Option<Vec<String>> = None;
    let mut positions: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut labels: Vec<(String, Vec<String>)> = Vec::new();
    let mut discounts: Vec<DiscountDecl> = Vec::new();
    let mut trans: Vec<TransLine> = Vec::new();
    let mut goal_lines: Vec<(usize, usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let ws = words(line);
        let Some(head) = ws.first() else { continue };
        let err = |col: usize, msg: String| ParseError::new(lineno, col, msg);
        let rest: Vec<String> = ws[1..].iter().map(|w| w.text.to_string()).collect();
        let once = |taken: bool, what: &str| {
            if taken {
                Err(err(head.col, format!("`{what}` declared twice")))
            } else {
                Ok(())
            }
        };
        match head.text {
            "agents" => {
                once(agents.is_some(), "agents")?;
                agents = Some(rest);
            }
            "actions" => {
                once(actions.is_some(), "actions")?;
                actions = Some(rest);
            }
            "positions" => {
                once(positions.is_some(), "positions")?;
                positions = Some(rest);
            }
            "init" => {
                once(initial.is_some(), "init")?;
                if rest.len() != 1 {
                    return Err(err(head.col, "`init` takes exactly one position".into()).into());
                }
                initial = Some(rest[0].clone());
            }
            "label" => {
                if rest.is_empty() {
                    return Err(err(head.col, "`label` needs a position".into()).into());
                }
                labels.push((rest[0].clone(), rest[1..].to_vec()));
            }
            "discount" => {
                let (name, expr_col, expr_text) = split_decl(line, lineno, "discount")?;
                if discounts.iter().any(|d| d.name == name) {
                    return Err(err(ws[1].col, format!("discount `{name}` declared twice")).into());
                }
                let expr =
                    parse_discount_expr(expr_text).map_err(|e| e.offset(lineno, expr_col))?;
                let func = resolve_discount(&expr, &discounts)
                    .map_err(|m| ParseError::new(lineno, expr_col, m))?;
                discounts.push(DiscountDecl { name, expr, func });
            }
            "goal" => {
                let (agent, col, body) = split_decl(line, lineno, "goal")?;
                goal_lines.push((lineno, col, agent, body.to_string()));
            }
            "trans" => {
                let Some(arrow) = ws.iter().position(|w| w.text == "->") else {
                    return Err(err(head.col, "expected `->` in transition".into()).into());
                };
                if arrow < 2 || arrow + 2 != ws.len() {
                    return Err(err(
                        head.col,
                        "expected `trans <position> <action per agent> -> <position>`".into(),
                    )
                    .into());
                }
                trans.push(TransLine {
                    line: lineno,
                    col: head.col,
                    source: ws[1].text.to_string(),
                    profile: ws[2..arrow].iter().map(|w| w.text.to_string()).collect(),
                    target: ws[arrow + 1].text.to_string(),
                });
            }
            other => {
                return Err(err(head.col, format!("unknown directive `{other}`")).into());
            }
        }
    }

    let missing = |what: &str| ParseError::new(1, 1, format!("missing `{what}` line"));
    let agents = agents.ok_or_else(|| missing("agents"))?;
    let actions = actions.ok_or_else(|| missing("actions"))?;
    let positions = positions.ok_or_else(|| missing("positions"))?;
    let initial = initial.ok_or_else(|| missing("init"))?;

    let transitions = expand_transitions(&trans, &agents, &actions, &positions)?;
    let cgs = CgsSpec {
        agents,
        actions,
        positions,
        initial,
        transitions,
        labels,
    }
    .build()?;

    let mut model = ModelFile {
        cgs,
        discounts,
        goals: Vec::new(),
    };
    let env = model.env();
    for (lineno, col, agent, body) in goal_lines {
        if model.cgs.agent_id(&agent).is_none() {
            return Err(
                ParseError::new(lineno, col, format!("goal for unknown agent `{agent}`")).into(),
            );
        }
        if model.goal(&agent).is_some() {
            return Err(ParseError::new(lineno, col, format!("second goal for `{agent}`")).into());
        }
        let phi = parse_formula(&body, &env).map_err(|e| e.offset(lineno, col))?;
        model.goals.push((agent, phi));
    }
    Ok(model)
}

/// Splits `<kw> <name> = <rest>` and returns the name, the column where the
/// rest starts, and the rest.
fn split_decl<'a>(
    line: &'a str,
    lineno: usize,
    kw: &str,
) -> Result<(String, usize, &'a str), ParseError> {
    let bad = || ParseError::new(lineno, 1, format!("expected `{kw} <name> = ...`"));
    let eq = line.find('=').ok_or_else(bad)?;
    let lhs = words(&line[..eq]);
    if lhs.len() != 2 {
        return Err(bad());
    }
    Ok((lhs[1].text.to_string(), eq + 2, &line[eq + 1..]))
}

/// Expands `_` wildcards over actions and positions. When several lines
/// match the same entry, the one with more concrete fields wins; a tie
/// between different targets is an error.
fn expand_transitions(
    lines: &[TransLine],
    agents: &[String],
    actions: &[String],
    positions: &[String],
) -> Result<Vec<(String, Vec<String>, String)>, ParseError> {
    let mut chosen: HashMap<(String, Vec<String>), (usize, &TransLine)> = HashMap::new();
    let mut order: Vec<(String, Vec<String>)> = Vec::new();
    for t in lines {
        if t.profile.len() != agents.len() {
            return Err(ParseError::new(
                t.line,
                t.col,
                format!(
                    "transition lists {} actions but the model has {} agents",
                    t.profile.len(),
                    agents.len()
                ),
            ));
        }
        let specificity = std::iter::once(&t.source)
            .chain(&t.profile)
            .filter(|s| *s != "_")
            .count();
        let sources: Vec<String> = if t.source == "_" {
            positions.to_vec()
        } else {
            vec![t.source.clone()]
        };
        let choices: Vec<Vec<String>> = t
            .profile
            .iter()
            .map(|a| {
                if a == "_" {
                    actions.to_vec()
                } else {
                    vec![a.clone()]
                }
            })
            .collect();
        let total: usize = choices.iter().map(|c| c.len()).product();
        for src in &sources {
            for idx in 0..total {
                let mut rem = idx;
                let mut profile = vec![String::new(); choices.len()];
                for (slot, c) in profile.iter_mut().zip(&choices).rev() {
                    *slot = c[rem % c.len()].clone();
                    rem /= c.len();
                }
                let key = (src.clone(), profile);
                match chosen.get(&key) {
                    Some((s, _)) if *s > specificity => {}
                    Some((s, prev)) if *s == specificity && prev.target != t.target => {
                        return Err(ParseError::new(
                            t.line,
                            t.col,
                            format!(
                                "transition for {} ({}) conflicts with line {}",
                                key.0,
                                key.1.join(" "),
                                prev.line
                            ),
                        ));
                    }
                    Some(_) => {
                        chosen.insert(key, (specificity, t));
                    }
                    None => {
                        order.push(key.clone());
                        chosen.insert(key, (specificity, t));
                    }
                }
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let target = chosen[&key].1.target.clone();
            (key.0, key.1, target)
        })
        .collect())
}

struct ExprParser<'a> {
    toks: Vec<(&'a str, usize)>,
    pos: usize,
}

/// Parses a discount expression:
/// `exp r | hyp | scale r X | shift k X | table r.. then X | name | (X)`.
pub fn parse_discount_expr(text: &str) -> Result<DiscountExpr, ParseError> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() || c == '(' || c == ')' {
            if let Some(s) = start.take() {
                toks.push((&text[s..i], s + 1));
            }
            if !c.is_whitespace() {
                toks.push((&text[i..i + 1], i + 1));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push((&text[s..], s + 1));
    }
    let end = text.len() + 1;
    let mut p = ExprParser { toks, pos: 0 };
    let e = p.expr(end)?;
    if let Some((t, col)) = p.toks.get(p.pos) {
        return Err(ParseError::new(
            1,
            *col,
            format!("unexpected `{t}` after discount expression"),
        ));
    }
    Ok(e)
}

impl<'a> ExprParser<'a> {
    fn next(&mut self, end: usize) -> Result<(&'a str, usize), ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| ParseError::new(1, end, "unexpected end of discount expression"))?;
        self.pos += 1;
        Ok(t)
    }

    fn rational(&mut self, end: usize) -> Result<Rational, ParseError> {
        let (t, col) = self.next(end)?;
        parse_rational(t).map_err(|m| ParseError::new(1, col, m))
    }

    fn expr(&mut self, end: usize) -> Result<DiscountExpr, ParseError> {
        let (t, col) = self.next(end)?;
        Ok(match t {
            "exp" => DiscountExpr::Exp(self.rational(end)?),
            "hyp" => DiscountExpr::Hyp,
            "scale" => {
                let r = self.rational(end)?;
                DiscountExpr::Scale(r, Box::new(self.expr(end)?))
            }
            "shift" => {
                let (k, kcol) = self.next(end)?;
                let k = k
                    .parse()
                    .map_err(|_| ParseError::new(1, kcol, format!("invalid shift `{k}`")))?;
                DiscountExpr::Shift(k, Box::new(self.expr(end)?))
            }
            "table" => {
                let mut vals = Vec::new();
                loop {
                    match self.toks.get(self.pos) {
                        Some(("then", _)) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => vals.push(self.rational(end)?),
                        None => return Err(ParseError::new(1, end, "expected `then` after table")),
                    }
                }
                DiscountExpr::Table(vals, Box::new(self.expr(end)?))
            }
            "(" => {
                let e = self.expr(end)?;
                match self.next(end)? {
                    (")", _) => e,
                    (other, c) => {
                        return Err(ParseError::new(
                            1,
                            c,
                            format!("expected `)`, found `{other}`"),
                        ))
                    }
                }
            }
            name if name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_') =>
            {
                DiscountExpr::Name(name.to_string())
            }
            other => {
                return Err(ParseError::new(
                    1,
                    col,
                    format!("unexpected `{other}` in discount expression"),
                ))
            }
        })
    }
}

fn resolve_discount(expr: &DiscountExpr, known: &[DiscountDecl]) -> Result<DiscountFn, String> {
    Ok(match expr {
        DiscountExpr::Exp(r) => DiscountFn::exponential(r.clone()).map_err(|e| e.to_string())?,
        DiscountExpr::Hyp => DiscountFn::hyperbolic(),
        DiscountExpr::Scale(r, inner) => {
            DiscountFn::scaled(r.clone(), resolve_discount(inner, known)?)
                .map_err(|e| e.to_string())?
        }
        DiscountExpr::Shift(k, inner) => resolve_discount(inner, known)?.shift(*k),
        DiscountExpr::Table(vals, tail) => {
            DiscountFn::table_then_tail(vals.clone(), resolve_discount(tail, known)?)
                .map_err(|e| e.to_string())?
        }
        DiscountExpr::Name(n) => known
            .iter()
            .find(|d| &d.name == n)
            .map(|d| d.func.clone())
            .ok_or_else(|| format!("unknown discount `{n}`"))?,
    })
}

/// Renders a model in the format read by [`parse_model`]. Transitions are
/// compressed with `_` where the successor ignores some agents.
pub fn render_model(model: &ModelFile) -> String {
    let g = &model.cgs;
    let mut out = String::new();
    out.push_str(&format!("agents {}\n", g.agents().join(" ")));
    out.push_str(&format!("actions {}\n", g.actions().join(" ")));
    out.push_str(&format!("positions {}\n", g.positions().join(" ")));
    out.push_str(&format!("init {}\n", g.positions()[g.initial()]));
    for (p, name) in g.positions().iter().enumerate() {
        let labels = g.labels(p);
        if !labels.is_empty() {
            let l: Vec<&str> = labels.iter().map(String::as_str).collect();
            out.push_str(&format!("label {name} {}\n", l.join(" ")));
        }
    }
    for d in &model.discounts {
        out.push_str(&format!("discount {} = {}\n", d.name, d.expr));
    }
    for p in 0..g.num_positions() {
        for (profile, target) in compressed_transitions(g, p) {
            out.push_str(&format!(
                "trans {} {} -> {}\n",
                g.positions()[p],
                profile.join(" "),
                g.positions()[target]
            ));
        }
    }
    for (agent, phi) in &model.goals {
        out.push_str(&format!("goal {agent} = {}\n", render_formula(phi)));
    }
    out
}

fn compressed_transitions(g: &Cgs, pos: usize) -> Vec<(Vec<String>, usize)> {
    let n_agents = g.num_agents();
    let n_actions = g.num_actions();
    let all: Vec<(Vec<usize>, usize)> = (0..g.profiles())
        .map(|i| {
            let prof = profile_from_index(i, n_actions, n_agents);
            let t = g.transition(pos, &prof);
            (prof, t)
        })
        .collect();
    let wildcard = |keep: Option<usize>, prof: &[usize]| -> Vec<String> {
        (0..n_agents)
            .map(|a| {
                if Some(a) == keep {
                    g.actions()[prof[a]].clone()
                } else {
                    "_".to_string()
                }
            })
            .collect()
    };
    if all.iter().all(|(_, t)| *t == all[0].1) {
        return vec![(wildcard(None, &all[0].0), all[0].1)];
    }
    for agent in 0..n_agents {
        let mut by_action: BTreeMap<usize, usize> = BTreeMap::new();
        let decided = all
            .iter()
            .all(|(prof, t)| *by_action.entry(prof[agent]).or_insert(*t) == *t);
        if decided {
            return by_action
                .into_iter()
                .map(|(a, t)| {
                    let mut prof = vec![0; n_agents];
                    prof[agent] = a;
                    (wildcard(Some(agent), &prof), t)
                })
                .collect();
        }
    }
    all.into_iter()
        .map(|(prof, t)| (prof.iter().map(|&a| g.actions()[a].clone()).collect(), t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const SMALL: &str = "\
# two rounds
agents Ann Bob
actions y n
positions q0 q1 q2
init q0
label q2 done
discount dBob = exp 1/2
discount dPie = table 1 1 1 then exp 1/2
discount dTwo = scale 2/3 dPie
trans q0 y y -> q2
trans q0 _ _ -> q1
trans q1 _ _ -> q1
trans _ _ _ -> q2
goal Bob = F[dBob] done
";

    #[test]
    fn parses_with_wildcards_and_specificity() {
        let m = parse_model(SMALL).unwrap();
        let g = &m.cgs;
        assert_eq!(g.num_positions(), 3);
        assert_eq!(g.transition(0, &[0, 0]), 2);
        assert_eq!(g.transition(0, &[0, 1]), 1);
        assert_eq!(g.transition(1, &[1, 1]), 1);
        assert_eq!(g.transition(2, &[1, 0]), 2);
        assert!(g.has_label(2, "done"));
        assert_eq!(m.discount("dTwo").unwrap().value(3), rat(1, 12));
        assert_eq!(m.goals.len(), 1);
    }

    #[test]
    fn render_then_parse_is_identity() {
        let m = parse_model(SMALL).unwrap();
        let text = render_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
        assert!(text.contains("discount dTwo = scale 2/3 dPie\n"));
        assert!(text.contains("trans q1 _ _ -> q1\n"));
    }

    #[test]
    fn arity_mismatch_is_a_parse_error() {
        let text = SMALL.replace("trans q0 y y -> q2", "trans q0 y -> q2");
        match parse_model(&text) {
            Err(ModelError::Parse(e)) => {
                assert_eq!(e.line, 10);
                assert!(e.message.contains("agents"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_discount_is_rejected() {
        let text = SMALL.replace("discount dPie", "discount dBob = exp 1/3\ndiscount dPie");
        match parse_model(&text) {
            Err(ModelError::Parse(e)) => assert!(e.message.contains("declared twice")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_transitions_fail_validation() {
        let text = SMALL.replace("trans _ _ _ -> q2\n", "");
        assert!(matches!(parse_model(&text), Err(ModelError::Invalid(_))));
    }

    #[test]
    fn conflicting_lines_of_equal_weight() {
        let text = SMALL.replace(
            "trans q0 y y -> q2",
            "trans q0 y _ -> q2\ntrans q0 _ y -> q0",
        );
        assert!(matches!(parse_model(&text), Err(ModelError::Parse(_))));
    }

    #[test]
    fn discount_expressions() {
        assert_eq!(
            parse_discount_expr("scale 1/2 (shift 2 hyp)").unwrap(),
            DiscountExpr::Scale(
                rat(1, 2),
                Box::new(DiscountExpr::Shift(2, Box::new(DiscountExpr::Hyp)))
            )
        );
        assert!(parse_discount_expr("exp 0.5").is_err());
        assert!(parse_discount_expr("table 1 1").is_err());
        assert!(parse_discount_expr("hyp hyp").is_err());
    }

    #[test]
    fn goal_formula_errors_point_into_the_line() {
        let text = SMALL.replace("F[dBob] done", "F[dNone] done");
        match parse_model(&text) {
            Err(ModelError::Parse(e)) => assert_eq!((e.line, e.col), (14, 14)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
