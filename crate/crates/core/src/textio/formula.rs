use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::discount::DiscountFn;
use crate::formula::{self as f, DiscountRef, Formula};

const RESERVED: &[&str] = &["X", "F", "G", "U", "E", "A", "true", "false", "Ag"];

/// Names a formula may refer to: declared discounting functions and, when
/// known, the agents of the model.
#[derive(Debug, Clone, Default)]
pub struct FormulaEnv {
    pub discounts: BTreeMap<String, DiscountFn>,
    /// `None` accepts any agent name in bindings but rejects `Ag`.
    pub agents: Option<Vec<String>>,
}

impl FormulaEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_discount(mut self, name: impl Into<String>, d: DiscountFn) -> Self {
        self.discounts.insert(name.into(), d);
        self
    }

    pub fn with_agents<S: AsRef<str>>(mut self, agents: &[S]) -> Self {
        self.agents = Some(agents.iter().map(|a| a.as_ref().to_string()).collect());
        self
    }
}

/// Parses a formula. Derived operators are expanded on the fly.
pub fn parse_formula(text: &str, env: &FormulaEnv) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, env };
    let phi = p.implication()?;
    match p.peek() {
        Tok::Eof => Ok(phi),
        other => Err(p.error(format!("unexpected {} after formula", other.describe()))),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    env: &'a FormulaEnv,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.line, t.col, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(f::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = f::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = f::and(acc, self.until()?);
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.bump();
            let d = if *self.peek() == Tok::LBrack {
                Some(self.discount_ref()?)
            } else {
                None
            };
            let rhs = self.until()?;
            return Ok(match d {
                Some(d) => f::until_d(d, lhs, rhs),
                None => f::until(lhs, rhs),
            });
        }
        Ok(lhs)
    }

    fn discount_ref(&mut self) -> Result<DiscountRef, ParseError> {
        self.expect(Tok::LBrack)?;
        let at = self.error("");
        let name = self.name("discount name")?;
        let func = self
            .env
            .discounts
            .get(&name)
            .cloned()
            .ok_or_else(|| ParseError {
                message: format!("unknown discount `{name}`"),
                ..at
            })?;
        let mut d = DiscountRef::new(name, func);
        if *self.peek() == Tok::Plus {
            self.bump();
            match self.bump() {
                Tok::Num(k) => d = d.shifted(k),
                other => {
                    return Err(
                        self.error(format!("expected shift amount, found {}", other.describe()))
                    )
                }
            }
        }
        self.expect(Tok::RBrack)?;
        Ok(d)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(f::not(self.unary()?))
            }
            Tok::LParen if self.at_binding() => self.binding(),
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                "X" => {
                    self.bump();
                    Ok(f::next(self.unary()?))
                }
                "F" | "G" => {
                    self.bump();
                    let d = if *self.peek() == Tok::LBrack {
                        Some(self.discount_ref()?)
                    } else {
                        None
                    };
                    let body = self.unary()?;
                    Ok(match (word.as_str(), d) {
                        ("F", None) => f::eventually(body),
                        ("F", Some(d)) => f::eventually_d(d, body),
                        (_, None) => f::always(body),
                        (_, Some(d)) => f::always_d(d, body),
                    })
                }
                "E" | "A" => {
                    self.bump();
                    let var = self.name("strategy variable")?;
                    self.expect(Tok::Dot)?;
                    let body = self.implication()?;
                    Ok(if word == "E" {
                        f::exists(var, body)
                    } else {
                        f::forall(var, body)
                    })
                }
                "U" | "Ag" => Err(self.error(format!("unexpected `{word}`"))),
                _ => {
                    self.bump();
                    Ok(f::atom(word))
                }
            },
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn at_binding(&self) -> bool {
        matches!(self.peek_at(1), Tok::Ident(_))
            && matches!(self.peek_at(2), Tok::Comma | Tok::Semi)
    }

    /// `(a, x) body`, `(a1,..,an; x1,..,xn) body` or `(Ag; x1,..,xn) body`.
    fn binding(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LParen)?;
        let mut agents = Vec::new();
        let grouped;
        if self.is_keyword("Ag") {
            let Some(all) = &self.env.agents else {
                return Err(self.error("`Ag` needs a model to know the agents"));
            };
            agents = all.iter().map(|a| (a.clone(), self.error(""))).collect();
            self.bump();
            grouped = true;
        } else {
            loop {
                let at = self.error("");
                agents.push((self.name("agent")?, at));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            grouped = *self.peek() == Tok::Semi;
        }
        let vars = if grouped {
            self.expect(Tok::Semi)?;
            let mut vars = vec![self.name("strategy variable")?];
            while *self.peek() == Tok::Comma {
                self.bump();
                vars.push(self.name("strategy variable")?);
            }
            if vars.len() != agents.len() {
                return Err(self.error(format!(
                    "{} agents bound to {} variables",
                    agents.len(),
                    vars.len()
                )));
            }
            vars
        } else {
            if agents.len() != 2 {
                return Err(self.error("expected `(agent, variable)` or a group binding with `;`"));
            }
            let (var, _) = agents.pop().expect("two names");
            vec![var]
        };
        self.expect(Tok::RParen)?;
        if let Some(known) = &self.env.agents {
            for (a, at) in &agents {
                if !known.contains(a) {
                    return Err(ParseError {
                        message: format!("unknown agent `{a}`"),
                        ..at.clone()
                    });
                }
            }
        }
        let body = self.implication()?;
        let names: Vec<&str> = agents.iter().map(|(a, _)| a.as_str()).collect();
        Ok(f::bind_group(&names, &vars, body))
    }
}

// Binding strength used by the renderer, loosest first.
const IMP: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNTIL: u8 = 3;
const UNARY: u8 = 4;

/// Renders a formula in the syntax accepted by [`parse_formula`], folding
/// expanded sugar back into `&`, `->`, `F`, `G` and `A` where the shape
/// matches exactly.
pub fn render_formula(phi: &Formula) -> String {
    let mut out = String::new();
    render(phi, IMP, &mut out);
    out
}

fn render(phi: &Formula, ctx: u8, out: &mut String) {
    let wrap = |prec: u8, out: &mut String, body: &dyn Fn(&mut String)| {
        if prec < ctx {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match phi {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(p) => out.push_str(p),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Or(a, b) => match (a.as_ref(), b.as_ref()) {
                (Formula::Not(a), Formula::Not(b)) => wrap(AND, out, &|out| {
                    render(a, AND, out);
                    out.push_str(" & ");
                    render(b, UNTIL, out);
                }),
                _ => prefix("!", inner, out),
            },
            Formula::Until(t, b) if **t == Formula::True => match b.as_ref() {
                Formula::Not(body) => prefix("G ", body, out),
                _ => prefix("!", inner, out),
            },
            Formula::UntilD(d, t, b) if **t == Formula::True => match b.as_ref() {
                Formula::Not(body) => prefix(&format!("G[{d}] "), body, out),
                _ => prefix("!", inner, out),
            },
            Formula::Exists(x, b) => match b.as_ref() {
                Formula::Not(body) => quantifier(&format!("A {x} . "), body, ctx, out),
                _ => prefix("!", inner, out),
            },
            _ => prefix("!", inner, out),
        },
        Formula::Or(a, b) => match a.as_ref() {
            Formula::Not(a) => wrap(IMP, out, &|out| {
                render(a, OR, out);
                out.push_str(" -> ");
                render(b, IMP, out);
            }),
            _ => wrap(OR, out, &|out| {
                render(a, OR, out);
                out.push_str(" | ");
                render(b, AND, out);
            }),
        },
        Formula::Next(body) => prefix("X ", body, out),
        Formula::Until(a, b) if **a == Formula::True => prefix("F ", b, out),
        Formula::UntilD(d, a, b) if **a == Formula::True => prefix(&format!("F[{d}] "), b, out),
        Formula::Until(a, b) => wrap(UNTIL, out, &|out| {
            render(a, UNARY, out);
            out.push_str(" U ");
            render(b, UNTIL, out);
        }),
        Formula::UntilD(d, a, b) => wrap(UNTIL, out, &|out| {
            render(a, UNARY, out);
            out.push_str(&format!(" U[{d}] "));
            render(b, UNTIL, out);
        }),
        Formula::Exists(x, body) => quantifier(&format!("E {x} . "), body, ctx, out),
        Formula::Bind { agent, var, body } => {
            quantifier(&format!("({agent}, {var}) "), body, ctx, out)
        }
    }
}

fn prefix(op: &str, body: &Formula, out: &mut String) {
    out.push_str(op);
    render(body, UNARY, out);
}

/// Quantifiers and bindings extend as far right as possible, so they need
/// parentheses anywhere but the outermost level.
fn quantifier(head: &str, body: &Formula, ctx: u8, out: &mut String) {
    if ctx > IMP {
        out.push('(');
    }
    out.push_str(head);
    render(body, IMP, out);
    if ctx > IMP {
        out.push(')');
    }
}
