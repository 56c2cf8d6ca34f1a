//! Alternating parity automata for threshold assertions on discounted LTL
//! with bindings, and their membership test on memoryless assignments.
//!
//! A Type-1 state asserts that a formula's value is above or below a
//! threshold; a Type-2 state asserts a Boolean formula, used once a
//! threshold reaches zero. States carry a binding context mapping each agent
//! to the free name whose action it currently follows. Letters pair an
//! action for every free name of the root formula with a position, and a
//! move in direction `q'` continues at the successor `q'` reached by the
//! profile the context reads off the letter.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num::Zero;

use crate::cgs::{ActionId, Cgs, PosId};
use crate::error::{Error, Result};
use crate::formula::{free_names, Formula};
use crate::lasso::posi;
use crate::parity::{solve_parity, ParityGame, Player};
use crate::rational::{format_exact, in_unit_interval, one, Rational};
use crate::strategy::Assignment;

/// Direction of a threshold assertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Gt,
    Lt,
}

impl Cmp {
    fn flip(self) -> Cmp {
        match self {
            Cmp::Gt => Cmp::Lt,
            Cmp::Lt => Cmp::Gt,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Gt => ">",
            Cmp::Lt => "<",
        })
    }
}

/// Boolean formulas in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolFormula {
    True,
    False,
    Lit(String, bool),
    And(Box<BoolFormula>, Box<BoolFormula>),
    Or(Box<BoolFormula>, Box<BoolFormula>),
    Next(Box<BoolFormula>),
    Until(Box<BoolFormula>, Box<BoolFormula>),
    Release(Box<BoolFormula>, Box<BoolFormula>),
    Bind {
        agent: String,
        var: String,
        body: Box<BoolFormula>,
    },
}

impl BoolFormula {
    /// Negation normal form of a Boolean-valued formula.
    pub fn from_formula(phi: &Formula) -> Result<BoolFormula> {
        nnf(phi, true)
    }
}

fn nnf(phi: &Formula, positive: bool) -> Result<BoolFormula> {
    use BoolFormula as B;
    let bx = Box::new;
    Ok(match phi {
        Formula::True => {
            if positive {
                B::True
            } else {
                B::False
            }
        }
        Formula::False => {
            if positive {
                B::False
            } else {
                B::True
            }
        }
        Formula::Atom(p) => B::Lit(p.clone(), positive),
        Formula::Not(a) => nnf(a, !positive)?,
        Formula::Or(a, b) => {
            let (a, b) = (bx(nnf(a, positive)?), bx(nnf(b, positive)?));
            if positive {
                B::Or(a, b)
            } else {
                B::And(a, b)
            }
        }
        Formula::Next(a) => B::Next(bx(nnf(a, positive)?)),
        Formula::Until(a, b) => {
            let (a, b) = (bx(nnf(a, positive)?), bx(nnf(b, positive)?));
            if positive {
                B::Until(a, b)
            } else {
                B::Release(a, b)
            }
        }
        Formula::Bind { agent, var, body } => B::Bind {
            agent: agent.clone(),
            var: var.clone(),
            body: bx(nnf(body, positive)?),
        },
        Formula::UntilD(..) | Formula::Exists(..) => {
            return Err(Error::Unsupported("not a Boolean formula".into()))
        }
    })
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolFormula::True => write!(f, "true"),
            BoolFormula::False => write!(f, "false"),
            BoolFormula::Lit(p, true) => write!(f, "{p}"),
            BoolFormula::Lit(p, false) => write!(f, "!{p}"),
            BoolFormula::And(a, b) => write!(f, "({a} & {b})"),
            BoolFormula::Or(a, b) => write!(f, "({a} | {b})"),
            BoolFormula::Next(a) => write!(f, "X {a}"),
            BoolFormula::Until(a, b) => write!(f, "({a} U {b})"),
            BoolFormula::Release(a, b) => write!(f, "({a} R {b})"),
            BoolFormula::Bind { agent, var, body } => write!(f, "({agent}, {var}) {body}"),
        }
    }
}

/// Agent -> index of the free name it follows, in agent order.
pub type Context = Vec<Option<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AptState {
    Type1 {
        ctx: Context,
        formula: Formula,
        cmp: Cmp,
        threshold: Rational,
    },
    Type2 {
        ctx: Context,
        formula: BoolFormula,
    },
}

/// Positive Boolean combinations of moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Transition {
    True,
    False,
    And(Box<Transition>, Box<Transition>),
    Or(Box<Transition>, Box<Transition>),
    /// continue in state `state` at the successor position `dir`
    Move {
        dir: PosId,
        state: usize,
    },
}

impl Transition {
    fn and(a: Transition, b: Transition) -> Transition {
        match (a, b) {
            (Transition::False, _) | (_, Transition::False) => Transition::False,
            (Transition::True, x) | (x, Transition::True) => x,
            (a, b) => Transition::And(Box::new(a), Box::new(b)),
        }
    }

    fn or(a: Transition, b: Transition) -> Transition {
        match (a, b) {
            (Transition::True, _) | (_, Transition::True) => Transition::True,
            (Transition::False, x) | (x, Transition::False) => x,
            (a, b) => Transition::Or(Box::new(a), Box::new(b)),
        }
    }

    fn bool(b: bool) -> Transition {
        if b {
            Transition::True
        } else {
            Transition::False
        }
    }

    fn dual(&self) -> Transition {
        match self {
            Transition::True => Transition::False,
            Transition::False => Transition::True,
            Transition::And(a, b) => Transition::Or(Box::new(a.dual()), Box::new(b.dual())),
            Transition::Or(a, b) => Transition::And(Box::new(a.dual()), Box::new(b.dual())),
            Transition::Move { .. } => self.clone(),
        }
    }

    fn render(&self, g: &Cgs) -> String {
        match self {
            Transition::True => "true".into(),
            Transition::False => "false".into(),
            Transition::And(a, b) => format!("({} & {})", a.render(g), b.render(g)),
            Transition::Or(a, b) => format!("({} | {})", a.render(g), b.render(g)),
            Transition::Move { dir, state } => format!("<{}, s{state}>", g.positions()[*dir]),
        }
    }
}

/// A letter: one action per free name of the root formula, and a position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub valuation: Vec<ActionId>,
    pub position: PosId,
}

/// An alternating parity automaton with max-parity acceptance.
#[derive(Debug, Clone)]
pub struct Apt {
    /// free names of the root formula; letters give each one an action
    keys: Vec<String>,
    agents: Vec<String>,
    num_actions: usize,
    num_positions: usize,
    states: Vec<AptState>,
    priority: Vec<u32>,
    initial: usize,
    /// indexed by `state * letters + letter index`
    delta: Vec<Transition>,
}

const ACCEPT: u32 = 2;
const REJECT: u32 = 1;

impl Apt {
    pub fn states(&self) -> &[AptState] {
        &self.states
    }

    pub fn priority(&self, state: usize) -> u32 {
        self.priority[state]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn num_letters(&self) -> usize {
        self.num_positions * self.num_actions.pow(self.keys.len() as u32)
    }

    fn letter_index(&self, letter: &Letter) -> usize {
        let val = letter
            .valuation
            .iter()
            .fold(0, |acc, &a| acc * self.num_actions + a);
        letter.position * self.num_actions.pow(self.keys.len() as u32) + val
    }

    fn letter_at(&self, index: usize) -> Letter {
        let per_pos = self.num_actions.pow(self.keys.len() as u32);
        let mut val = index % per_pos;
        let mut valuation = vec![0; self.keys.len()];
        for slot in valuation.iter_mut().rev() {
            *slot = val % self.num_actions;
            val /= self.num_actions;
        }
        Letter {
            valuation,
            position: index / per_pos,
        }
    }

    pub fn transition(&self, state: usize, letter: &Letter) -> &Transition {
        &self.delta[state * self.num_letters() + self.letter_index(letter)]
    }

    /// Text dump: header, one line per state, then the transitions of each
    /// state per position, merged when they agree for all valuations.
    pub fn dump(&self, g: &Cgs) -> String {
        let mut out = format!(
            "apt states={} initial=s{} letters={} keys=[{}]\n",
            self.states.len(),
            self.initial,
            self.num_letters(),
            self.keys.join(",")
        );
        for (i, s) in self.states.iter().enumerate() {
            out.push_str(&format!(
                "state s{i} priority={} {}\n",
                self.priority[i],
                self.describe_state(s)
            ));
        }
        let per_pos = self.num_actions.pow(self.keys.len() as u32);
        for i in 0..self.states.len() {
            for pos in 0..self.num_positions {
                let base = i * self.num_letters() + pos * per_pos;
                let row = &self.delta[base..base + per_pos];
                if row.iter().all(|t| *t == row[0]) {
                    out.push_str(&format!(
                        "delta s{i} {} * -> {}\n",
                        g.positions()[pos],
                        row[0].render(g)
                    ));
                } else {
                    for (v, t) in row.iter().enumerate() {
                        let letter = self.letter_at(pos * per_pos + v);
                        let val: Vec<String> = self
                            .keys
                            .iter()
                            .zip(&letter.valuation)
                            .map(|(k, &a)| format!("{k}={}", g.actions()[a]))
                            .collect();
                        out.push_str(&format!(
                            "delta s{i} {} {{{}}} -> {}\n",
                            g.positions()[pos],
                            val.join(","),
                            t.render(g)
                        ));
                    }
                }
            }
        }
        out
    }

    fn describe_state(&self, s: &AptState) -> String {
        let ctx_text = |ctx: &Context| {
            let parts: Vec<String> = self
                .agents
                .iter()
                .zip(ctx)
                .filter_map(|(a, k)| k.map(|k| format!("{a}->{}", self.keys[k])))
                .collect();
            parts.join(",")
        };
        match s {
            AptState::Type1 {
                ctx,
                formula,
                cmp,
                threshold,
            } => format!(
                "[{}] ({formula}) {cmp} {}",
                ctx_text(ctx),
                format_exact(threshold)
            ),
            AptState::Type2 { ctx, formula } => format!("[{}] {formula}", ctx_text(ctx)),
        }
    }
}

struct Builder<'a> {
    g: &'a Cgs,
    keys: Vec<String>,
    states: Vec<AptState>,
    ids: HashMap<AptState, usize>,
    queue: VecDeque<usize>,
}

impl Builder<'_> {
    fn state(&mut self, s: AptState) -> usize {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.states.push(s.clone());
        self.ids.insert(s, id);
        self.queue.push_back(id);
        id
    }

    fn key(&self, name: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == name)
    }

    fn successor(&self, ctx: &Context, letter: &Letter) -> PosId {
        let profile: Vec<ActionId> = ctx
            .iter()
            .map(|k| {
                letter.valuation
                    [k.expect("temporal operators only occur where every agent is bound")]
            })
            .collect();
        self.g.transition(letter.position, &profile)
    }

    fn rebind(&self, ctx: &Context, agent: &str, var: &str) -> Context {
        let mut ctx = ctx.clone();
        let a = self
            .g
            .agent_id(agent)
            .expect("agents checked before building");
        ctx[a] = self.key(var);
        ctx
    }

    fn move_to(&mut self, ctx: &Context, letter: &Letter, s: AptState) -> Transition {
        let dir = self.successor(ctx, letter);
        Transition::Move {
            dir,
            state: self.state(s),
        }
    }

    /// Transition of a threshold assertion, expanding everything that does
    /// not move.
    fn delta1(
        &mut self,
        ctx: &Context,
        phi: &Formula,
        cmp: Cmp,
        t: &Rational,
        letter: &Letter,
    ) -> Result<Transition> {
        let compare = |v: Rational| match cmp {
            Cmp::Gt => v > *t,
            Cmp::Lt => v < *t,
        };
        Ok(match phi {
            Formula::True => Transition::bool(compare(one())),
            Formula::False => Transition::bool(compare(Rational::zero())),
            Formula::Atom(p) => {
                let v = if self.g.has_label(letter.position, p) {
                    one()
                } else {
                    Rational::zero()
                };
                Transition::bool(compare(v))
            }
            // [[!a]] > t  iff  [[a]] < 1 - t, and dually
            Formula::Not(a) => self.delta1(ctx, a, cmp.flip(), &(one() - t), letter)?,
            Formula::Or(a, b) => {
                let ta = self.delta1(ctx, a, cmp, t, letter)?;
                let tb = self.delta1(ctx, b, cmp, t, letter)?;
                match cmp {
                    Cmp::Gt => Transition::or(ta, tb),
                    Cmp::Lt => Transition::and(ta, tb),
                }
            }
            Formula::Bind { agent, var, body } => {
                let ctx = self.rebind(ctx, agent, var);
                self.delta1(&ctx, body, cmp, t, letter)?
            }
            Formula::Next(a) => self.move_to(
                ctx,
                letter,
                AptState::Type1 {
                    ctx: ctx.clone(),
                    formula: (**a).clone(),
                    cmp,
                    threshold: t.clone(),
                },
            ),
            Formula::Until(a, b) => match cmp {
                Cmp::Gt if *t >= one() => Transition::False,
                Cmp::Gt if t.is_zero() => {
                    let b2 = BoolFormula::from_formula(&posi(phi)?)?;
                    self.delta2(ctx, &b2, letter)?
                }
                Cmp::Lt if *t > one() => Transition::True,
                Cmp::Lt if t.is_zero() => Transition::False,
                _ => {
                    let here = self.delta1(ctx, b, cmp, t, letter)?;
                    let left = self.delta1(ctx, a, cmp, t, letter)?;
                    let again = self.move_to(
                        ctx,
                        letter,
                        AptState::Type1 {
                            ctx: ctx.clone(),
                            formula: phi.clone(),
                            cmp,
                            threshold: t.clone(),
                        },
                    );
                    match cmp {
                        Cmp::Gt => Transition::or(here, Transition::and(left, again)),
                        Cmp::Lt => Transition::and(here, Transition::or(left, again)),
                    }
                }
            },
            Formula::UntilD(d, a, b) => {
                let d0 = d.func.value(0);
                match cmp {
                    Cmp::Gt if t.is_zero() => {
                        let b2 = BoolFormula::from_formula(&posi(phi)?)?;
                        return self.delta2(ctx, &b2, letter);
                    }
                    Cmp::Lt if t.is_zero() => return Ok(Transition::False),
                    _ => {}
                }
                let scaled = t / &d0;
                match cmp {
                    Cmp::Gt if scaled >= one() => return Ok(Transition::False),
                    Cmp::Lt if scaled > one() => return Ok(Transition::True),
                    _ => {}
                }
                let here = self.delta1(ctx, b, cmp, &scaled, letter)?;
                let left = self.delta1(ctx, a, cmp, &scaled, letter)?;
                let shifted = Formula::UntilD(d.shifted(1), a.clone(), b.clone());
                let again = self.move_to(
                    ctx,
                    letter,
                    AptState::Type1 {
                        ctx: ctx.clone(),
                        formula: shifted,
                        cmp,
                        threshold: t.clone(),
                    },
                );
                match cmp {
                    Cmp::Gt => Transition::or(here, Transition::and(left, again)),
                    Cmp::Lt => Transition::and(here, Transition::or(left, again)),
                }
            }
            Formula::Exists(..) => return Err(Error::Unsupported("strategy quantifier".into())),
        })
    }

    fn delta2(&mut self, ctx: &Context, phi: &BoolFormula, letter: &Letter) -> Result<Transition> {
        Ok(match phi {
            BoolFormula::True => Transition::True,
            BoolFormula::False => Transition::False,
            BoolFormula::Lit(p, positive) => {
                Transition::bool(self.g.has_label(letter.position, p) == *positive)
            }
            BoolFormula::And(a, b) => {
                Transition::and(self.delta2(ctx, a, letter)?, self.delta2(ctx, b, letter)?)
            }
            BoolFormula::Or(a, b) => {
                Transition::or(self.delta2(ctx, a, letter)?, self.delta2(ctx, b, letter)?)
            }
            BoolFormula::Bind { agent, var, body } => {
                let ctx = self.rebind(ctx, agent, var);
                self.delta2(&ctx, body, letter)?
            }
            BoolFormula::Next(a) => self.move_to(
                ctx,
                letter,
                AptState::Type2 {
                    ctx: ctx.clone(),
                    formula: (**a).clone(),
                },
            ),
            BoolFormula::Until(a, b) | BoolFormula::Release(a, b) => {
                let here = self.delta2(ctx, b, letter)?;
                let left = self.delta2(ctx, a, letter)?;
                let again = self.move_to(
                    ctx,
                    letter,
                    AptState::Type2 {
                        ctx: ctx.clone(),
                        formula: phi.clone(),
                    },
                );
                if matches!(phi, BoolFormula::Until(..)) {
                    Transition::or(here, Transition::and(left, again))
                } else {
                    Transition::and(here, Transition::or(left, again))
                }
            }
        })
    }
}

fn state_priority(s: &AptState) -> u32 {
    match s {
        AptState::Type1 {
            formula: Formula::Until(..) | Formula::UntilD(..),
            cmp: Cmp::Lt,
            ..
        } => ACCEPT,
        AptState::Type2 {
            formula: BoolFormula::Release(..),
            ..
        } => ACCEPT,
        _ => REJECT,
    }
}

fn check_fragment(phi: &Formula, g: &Cgs) -> Result<()> {
    match phi {
        Formula::Exists(..) => {
            return Err(Error::Unsupported(
                "strategy quantifiers have no automaton rule here".into(),
            ))
        }
        Formula::UntilD(d, _, _) if !d.func.is_exponential_family() => {
            return Err(Error::Unsupported(format!(
                "discount `{d}` is not exponential"
            )))
        }
        Formula::Bind { agent, .. } if g.agent_id(agent).is_none() => {
            return Err(Error::UnknownAgent(agent.clone()))
        }
        _ => {}
    }
    phi.children()
        .into_iter()
        .try_for_each(|c| check_fragment(c, g))
}

/// The automaton accepting the encodings of assignments under which
/// `[[phi]] > threshold`. States and transitions over all letters are
/// generated from the initial assertion.
pub fn build_apt(phi: &Formula, threshold: &Rational, g: &Cgs) -> Result<Apt> {
    check_fragment(phi, g)?;
    if !in_unit_interval(threshold) {
        return Err(Error::ThresholdRange(format_exact(threshold)));
    }
    let keys: Vec<String> = free_names(phi, g.agents()).into_iter().collect();
    let initial_ctx: Context = g
        .agents()
        .iter()
        .map(|a| keys.iter().position(|k| k == a))
        .collect();
    let mut b = Builder {
        g,
        keys: keys.clone(),
        states: Vec::new(),
        ids: HashMap::new(),
        queue: VecDeque::new(),
    };
    let initial = b.state(AptState::Type1 {
        ctx: initial_ctx,
        formula: phi.clone(),
        cmp: Cmp::Gt,
        threshold: threshold.clone(),
    });
    let mut apt = Apt {
        keys,
        agents: g.agents().to_vec(),
        num_actions: g.num_actions(),
        num_positions: g.num_positions(),
        states: Vec::new(),
        priority: Vec::new(),
        initial,
        delta: Vec::new(),
    };
    let letters: Vec<Letter> = (0..apt.num_letters()).map(|i| apt.letter_at(i)).collect();
    let mut rows: Vec<Vec<Transition>> = Vec::new();
    while let Some(id) = b.queue.pop_front() {
        let s = b.states[id].clone();
        let mut row = Vec::with_capacity(letters.len());
        for letter in &letters {
            let t = match &s {
                AptState::Type1 {
                    ctx,
                    formula,
                    cmp,
                    threshold,
                } => b.delta1(ctx, formula, *cmp, threshold, letter)?,
                AptState::Type2 { ctx, formula } => b.delta2(ctx, formula, letter)?,
            };
            row.push(t);
        }
        if rows.len() <= id {
            rows.resize(id + 1, Vec::new());
        }
        rows[id] = row;
    }
    apt.priority = b.states.iter().map(state_priority).collect();
    apt.states = b.states;
    apt.delta = rows.into_iter().flatten().collect();
    Ok(apt)
}

/// Complement automaton: Boolean connectives and constants swapped, every
/// priority raised by one.
pub fn dualize(a: &Apt) -> Apt {
    let mut d = a.clone();
    d.delta = a.delta.iter().map(Transition::dual).collect();
    d.priority = a.priority.iter().map(|p| p + 1).collect();
    d
}

pub fn reachable_state_count(phi: &Formula, threshold: &Rational, g: &Cgs) -> Result<usize> {
    Ok(build_apt(phi, threshold, g)?.states.len())
}

/// Extended closure with discounted untils shifted up to `max_shift` steps:
/// subformulas, subformulas of `posi(t)` and `posi(!t)` for every
/// subformula `t`, and shifted copies of every discounted until.
pub fn extended_closure(phi: &Formula, max_shift: u64) -> Result<BTreeSet<Formula>> {
    if phi.has_exists() {
        return Err(Error::Unsupported("strategy quantifier".into()));
    }
    let mut out = BTreeSet::new();
    for theta in phi.subformulas() {
        out.insert(theta.clone());
        for p in [posi(theta)?, posi(&crate::formula::not(theta.clone()))?] {
            out.extend(p.subformulas().into_iter().cloned());
        }
        if let Formula::UntilD(d, a, b) = theta {
            for k in 1..=max_shift {
                out.insert(Formula::UntilD(d.shifted(k), a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

/// Whether the automaton accepts the encoding of the memoryless assignment
/// `chi` from `q`: the histories collapse to positions, so the acceptance
/// game is played on positions times states.
pub fn apt_membership(a: &Apt, g: &Cgs, chi: &Assignment, q: PosId) -> Result<bool> {
    if g.num_positions() != a.num_positions || g.agents() != a.agents.as_slice() {
        return Err(Error::Unsupported(
            "automaton was built for another model".into(),
        ));
    }
    let strategies = a
        .keys
        .iter()
        .map(|k| chi.get(k).ok_or_else(|| Error::UnboundName(k.clone())))
        .collect::<Result<Vec<_>>>()?;
    let letter = |p: PosId| Letter {
        valuation: strategies.iter().map(|s| s.action(p)).collect(),
        position: p,
    };
    let mut game = ParityGame::new();
    let top = game.add_node(Player::Verifier, 0);
    game.add_edge(top, top);
    let bottom = game.add_node(Player::Spoiler, 1);
    game.add_edge(bottom, bottom);
    let mut nodes: HashMap<(PosId, usize), usize> = HashMap::new();
    let mut work = VecDeque::new();
    let mut node_of =
        |game: &mut ParityGame, work: &mut VecDeque<(PosId, usize)>, p: PosId, s: usize| {
            *nodes.entry((p, s)).or_insert_with(|| {
                work.push_back((p, s));
                game.add_node(Player::Verifier, a.priority[s])
            })
        };
    let start = node_of(&mut game, &mut work, q, a.initial);
    game.initial = start;
    while let Some((p, s)) = work.pop_front() {
        let v = node_of(&mut game, &mut work, p, s);
        let t = a.transition(s, &letter(p)).clone();
        let w = expand(&mut game, &t, top, bottom, &mut |game, dir, st| {
            node_of(game, &mut work, dir, st)
        });
        game.add_edge(v, w);
    }
    let sol = solve_parity(&game);
    Ok(sol.initial_winner(&game) == Player::Verifier)
}

fn expand(
    game: &mut ParityGame,
    t: &Transition,
    top: usize,
    bottom: usize,
    state_node: &mut dyn FnMut(&mut ParityGame, PosId, usize) -> usize,
) -> usize {
    match t {
        Transition::True => top,
        Transition::False => bottom,
        Transition::Move { dir, state } => state_node(game, *dir, *state),
        Transition::And(x, y) | Transition::Or(x, y) => {
            let owner = if matches!(t, Transition::Or(..)) {
                Player::Verifier
            } else {
                Player::Spoiler
            };
            let v = game.add_node(owner, 0);
            let l = expand(game, x, top, bottom, state_node);
            let r = expand(game, y, top, bottom, state_node);
            game.add_edge(v, l);
            game.add_edge(v, r);
            v
        }
    }
}
