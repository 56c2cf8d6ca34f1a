//! Abstract syntax of strategy logic with discounting.
//!
//! Only the core connectives are represented. Conjunction, implication,
//! eventually/always (plain and discounted) and universal quantification are
//! sugar: the constructors below expand them into the core grammar, and the
//! parser uses the same constructors.

use std::collections::BTreeSet;
use std::fmt;

use crate::discount::DiscountFn;

/// A named discounting function as it appears in a formula, possibly shifted
/// by `shift` steps (written `name+k`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscountRef {
    pub name: String,
    pub shift: u64,
    pub func: DiscountFn,
}

impl DiscountRef {
    pub fn new(name: impl Into<String>, func: DiscountFn) -> Self {
        DiscountRef {
            name: name.into(),
            shift: 0,
            func,
        }
    }

    /// The same function advanced by `k` more steps.
    pub fn shifted(&self, k: u64) -> Self {
        DiscountRef {
            name: self.name.clone(),
            shift: self.shift + k,
            func: self.func.shift(k),
        }
    }
}

impl fmt::Display for DiscountRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}+{}", self.name, self.shift)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `E x . body`
    Exists(String, Box<Formula>),
    /// `(agent, var) body`
    Bind {
        agent: String,
        var: String,
        body: Box<Formula>,
    },
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    UntilD(DiscountRef, Box<Formula>, Box<Formula>),
}

pub fn atom(p: impl Into<String>) -> Formula {
    Formula::Atom(p.into())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    not(or(not(a), not(b)))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    or(not(a), b)
}

pub fn next(f: Formula) -> Formula {
    Formula::Next(Box::new(f))
}

pub fn until(a: Formula, b: Formula) -> Formula {
    Formula::Until(Box::new(a), Box::new(b))
}

pub fn until_d(d: DiscountRef, a: Formula, b: Formula) -> Formula {
    Formula::UntilD(d, Box::new(a), Box::new(b))
}

pub fn eventually(f: Formula) -> Formula {
    until(Formula::True, f)
}

pub fn always(f: Formula) -> Formula {
    not(eventually(not(f)))
}

pub fn eventually_d(d: DiscountRef, f: Formula) -> Formula {
    until_d(d, Formula::True, f)
}

pub fn always_d(d: DiscountRef, f: Formula) -> Formula {
    not(eventually_d(d, not(f)))
}

pub fn exists(var: impl Into<String>, f: Formula) -> Formula {
    Formula::Exists(var.into(), Box::new(f))
}

pub fn forall(var: impl Into<String>, f: Formula) -> Formula {
    not(exists(var, not(f)))
}

pub fn bind(agent: impl Into<String>, var: impl Into<String>, f: Formula) -> Formula {
    Formula::Bind {
        agent: agent.into(),
        var: var.into(),
        body: Box::new(f),
    }
}

/// `(A, x1..xn) f` for agents `A = a1..an`: nested bindings, first agent
/// outermost.
pub fn bind_group<A: AsRef<str>, V: AsRef<str>>(agents: &[A], vars: &[V], f: Formula) -> Formula {
    assert_eq!(agents.len(), vars.len(), "group binding arity mismatch");
    agents
        .iter()
        .zip(vars)
        .rev()
        .fold(f, |acc, (a, v)| bind(a.as_ref(), v.as_ref(), acc))
}

/// Conjunction of a non-empty list, left-nested.
pub fn and_all(mut parts: Vec<Formula>) -> Formula {
    assert!(!parts.is_empty(), "empty conjunction");
    let first = parts.remove(0);
    parts.into_iter().fold(first, and)
}

impl Formula {
    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(f) | Formula::Next(f) | Formula::Exists(_, f) => vec![f],
            Formula::Bind { body, .. } => vec![body],
            Formula::Or(a, b) | Formula::Until(a, b) | Formula::UntilD(_, a, b) => vec![a, b],
        }
    }

    /// All subformulas, including `self`.
    pub fn subformulas(&self) -> BTreeSet<&Formula> {
        let mut out = BTreeSet::new();
        fn walk<'a>(f: &'a Formula, out: &mut BTreeSet<&'a Formula>) {
            if out.insert(f) {
                for c in f.children() {
                    walk(c, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// No strategy quantifiers and no bindings.
    pub fn is_ltld(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Bind { .. } => false,
            _ => self.children().iter().all(|c| c.is_ltld()),
        }
    }

    pub fn has_exists(&self) -> bool {
        matches!(self, Formula::Exists(..)) || self.children().iter().any(|c| c.has_exists())
    }

    /// Every discounting function mentioned.
    pub fn discounts(&self) -> Vec<&DiscountRef> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a DiscountRef>) {
            if let Formula::UntilD(d, _, _) = f {
                out.push(d);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Atomic propositions mentioned.
    pub fn atoms(&self) -> BTreeSet<&str> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(p) => Some(p.as_str()),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::textio::render_formula(self))
    }
}

/// Free variables and free agents of `f` over the given agent set.
///
/// A variable is free when some binding uses it outside any quantifier for
/// it. An agent is free when a temporal operator (`X`, `U`, `U[d]`) occurs
/// outside every binding for that agent; atoms alone never free an agent.
pub fn free_names<S: AsRef<str>>(f: &Formula, agents: &[S]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound_agents = Vec::new();
    let mut quantified = Vec::new();
    collect_free(f, agents, &mut bound_agents, &mut quantified, &mut out);
    out
}

fn collect_free<'a, S: AsRef<str>>(
    f: &'a Formula,
    agents: &[S],
    bound_agents: &mut Vec<&'a str>,
    quantified: &mut Vec<&'a str>,
    out: &mut BTreeSet<String>,
) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => {}
        Formula::Exists(x, body) => {
            quantified.push(x);
            collect_free(body, agents, bound_agents, quantified, out);
            quantified.pop();
        }
        Formula::Bind { agent, var, body } => {
            if !quantified.contains(&var.as_str()) {
                out.insert(var.clone());
            }
            bound_agents.push(agent);
            collect_free(body, agents, bound_agents, quantified, out);
            bound_agents.pop();
        }
        Formula::Next(_) | Formula::Until(..) | Formula::UntilD(..) => {
            for a in agents {
                if !bound_agents.contains(&a.as_ref()) {
                    out.insert(a.as_ref().to_string());
                }
            }
            for c in f.children() {
                collect_free(c, agents, bound_agents, quantified, out);
            }
        }
        Formula::Not(_) | Formula::Or(..) => {
            for c in f.children() {
                collect_free(c, agents, bound_agents, quantified, out);
            }
        }
    }
}

pub fn is_sentence<S: AsRef<str>>(f: &Formula, agents: &[S]) -> bool {
    free_names(f, agents).is_empty()
}
