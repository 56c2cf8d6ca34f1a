//! Exact satisfaction values under memoryless strategies.
//!
//! Every subformula is evaluated to a vector holding its value at each
//! position. Such a vector depends only on the strategies assigned to the
//! subformula's free names, which makes `(subformula, those strategies)` a
//! sound cache key and lets nested quantifiers share work.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num::{One, Zero};

use crate::cgs::{ActionId, Cgs, PosId};
use crate::discount::DiscountFn;
use crate::error::{Error, Result};
use crate::formula::{free_names, is_sentence, Formula};
use crate::rational::{format_exact, in_unit_interval, one, zero, Rational};
use crate::strategy::{lasso_from_successors, Assignment, LassoPlay, Strategy};
use crate::textio::Report;

/// How `E x` enumerates candidate strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationMode {
    /// Every memoryless strategy.
    Full,
    /// Strategies that vary only where some agent bound to `x` can affect
    /// the successor, playing the first action elsewhere. At any other
    /// position the choice for `x` is never consulted, so the maximum is
    /// unchanged.
    #[default]
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: EnumerationMode,
    pub memo: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            mode: EnumerationMode::Effective,
            memo: true,
        }
    }
}

/// Threshold comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Ge,
    Gt,
}

impl Comparison {
    pub fn holds(self, value: &Rational, threshold: &Rational) -> bool {
        match self {
            Comparison::Ge => value >= threshold,
            Comparison::Gt => value > threshold,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        })
    }
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Atom(String),
    Not(usize),
    Or(usize, usize),
    Exists {
        var: usize,
        body: usize,
        /// positions where the candidate strategies vary
        vary: Vec<PosId>,
    },
    Bind {
        agent: usize,
        var: usize,
        body: usize,
    },
    Next(usize),
    Until(usize, usize),
    UntilD(DiscountFn, usize, usize),
}

type Values = Rc<Vec<Rational>>;

/// Evaluation state for one game structure. Compiled subformulas, interned
/// strategies and cached value vectors persist across calls; cached entries
/// are keyed by everything they depend on, so reuse never changes a result.
pub struct EvalContext<'g> {
    g: &'g Cgs,
    opts: EvalOptions,
    nodes: Vec<Node>,
    free: Vec<Vec<usize>>,
    node_ids: HashMap<Formula, usize>,
    names: Vec<String>,
    name_ids: HashMap<String, usize>,
    strategies: Vec<Strategy>,
    strategy_ids: HashMap<Strategy, u32>,
    memo: HashMap<(usize, Vec<u32>), Values>,
    lassos: HashMap<Vec<u32>, Rc<Vec<LassoPlay>>>,
}

impl<'g> EvalContext<'g> {
    pub fn new(g: &'g Cgs) -> Self {
        Self::with_options(g, EvalOptions::default())
    }

    pub fn with_options(g: &'g Cgs, opts: EvalOptions) -> Self {
        let mut ctx = EvalContext {
            g,
            opts,
            nodes: Vec::new(),
            free: Vec::new(),
            node_ids: HashMap::new(),
            names: Vec::new(),
            name_ids: HashMap::new(),
            strategies: Vec::new(),
            strategy_ids: HashMap::new(),
            memo: HashMap::new(),
            lassos: HashMap::new(),
        };
        for a in g.agents() {
            ctx.name_id(a);
        }
        ctx
    }

    pub fn cgs(&self) -> &'g Cgs {
        self.g
    }

    /// Value of `phi` at every position under `chi`.
    pub fn values(&mut self, phi: &Formula, chi: &Assignment) -> Result<Vec<Rational>> {
        let root = self.compile(phi);
        let mut env = vec![None; self.names.len()];
        for (name, s) in chi {
            if s.choices().len() != self.g.num_positions()
                || s.choices().iter().any(|&a| a >= self.g.num_actions())
            {
                return Err(Error::InvalidStrategy {
                    name: name.clone(),
                    reason: "does not fit the model".into(),
                });
            }
            if let Some(&id) = self.name_ids.get(name) {
                env[id] = Some(self.intern(s.clone()));
            }
        }
        Ok(self.node_values(root, &mut env)?.as_ref().clone())
    }

    /// Value of `phi` at position `q` under `chi`.
    pub fn eval(&mut self, phi: &Formula, chi: &Assignment, q: PosId) -> Result<Rational> {
        Ok(self.values(phi, chi)?.swap_remove(q))
    }

    /// Number of cached value vectors.
    pub fn cache_len(&self) -> usize {
        self.memo.len()
    }

    fn name_id(&mut self, name: &str) -> usize {
        if let Some(&id) = self.name_ids.get(name) {
            return id;
        }
        self.names.push(name.to_string());
        self.name_ids.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    fn intern(&mut self, s: Strategy) -> u32 {
        if let Some(&id) = self.strategy_ids.get(&s) {
            return id;
        }
        let id = self.strategies.len() as u32;
        self.strategies.push(s.clone());
        self.strategy_ids.insert(s, id);
        id
    }

    fn compile(&mut self, phi: &Formula) -> usize {
        if let Some(&id) = self.node_ids.get(phi) {
            return id;
        }
        let node = match phi {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Atom(p) => Node::Atom(p.clone()),
            Formula::Not(a) => Node::Not(self.compile(a)),
            Formula::Or(a, b) => Node::Or(self.compile(a), self.compile(b)),
            Formula::Exists(x, body) => {
                let vary = match self.opts.mode {
                    EnumerationMode::Full => (0..self.g.num_positions()).collect(),
                    EnumerationMode::Effective => {
                        let mut agents = Vec::new();
                        agents_bound_to(body, x, &mut agents);
                        let mut vary: Vec<PosId> = agents
                            .iter()
                            .filter_map(|a| self.g.agent_id(a))
                            .flat_map(|a| self.g.effective_positions(a))
                            .collect();
                        vary.sort_unstable();
                        vary.dedup();
                        vary
                    }
                };
                Node::Exists {
                    var: self.name_id(x),
                    body: self.compile(body),
                    vary,
                }
            }
            Formula::Bind { agent, var, body } => Node::Bind {
                agent: self.name_id(agent),
                var: self.name_id(var),
                body: self.compile(body),
            },
            Formula::Next(a) => Node::Next(self.compile(a)),
            Formula::Until(a, b) => Node::Until(self.compile(a), self.compile(b)),
            Formula::UntilD(d, a, b) => {
                Node::UntilD(d.func.clone(), self.compile(a), self.compile(b))
            }
        };
        let mut free: Vec<usize> = free_names(phi, self.g.agents())
            .iter()
            .map(|n| self.name_id(n))
            .collect();
        free.sort_unstable();
        self.nodes.push(node);
        self.free.push(free);
        let id = self.nodes.len() - 1;
        self.node_ids.insert(phi.clone(), id);
        id
    }

    fn node_values(&mut self, id: usize, env: &mut Vec<Option<u32>>) -> Result<Values> {
        if env.len() < self.names.len() {
            env.resize(self.names.len(), None);
        }
        let key_strats = self.free[id]
            .iter()
            .map(|&n| env[n].ok_or_else(|| Error::UnboundName(self.names[n].clone())))
            .collect::<Result<Vec<u32>>>()?;
        let key = (id, key_strats);
        if self.opts.memo {
            if let Some(v) = self.memo.get(&key) {
                return Ok(Rc::clone(v));
            }
        }
        let n = self.g.num_positions();
        let values: Vec<Rational> = match self.nodes[id].clone() {
            Node::True => vec![one(); n],
            Node::False => vec![zero(); n],
            Node::Atom(p) => (0..n)
                .map(|q| {
                    if self.g.has_label(q, &p) {
                        one()
                    } else {
                        zero()
                    }
                })
                .collect(),
            Node::Not(a) => self
                .node_values(a, env)?
                .iter()
                .map(|v| one() - v)
                .collect(),
            Node::Or(a, b) => {
                let va = self.node_values(a, env)?;
                let vb = self.node_values(b, env)?;
                va.iter()
                    .zip(vb.iter())
                    .map(|(x, y)| x.max(y).clone())
                    .collect()
            }
            Node::Exists { var, body, vary } => {
                let saved = env[var];
                let result = self.exists(var, body, &vary, env);
                env[var] = saved;
                result?
            }
            Node::Bind { agent, var, body } => {
                let target = env[var].ok_or_else(|| Error::UnboundName(self.names[var].clone()))?;
                let saved = env[agent];
                env[agent] = Some(target);
                let result = self.node_values(body, env);
                env[agent] = saved;
                result?.as_ref().clone()
            }
            Node::Next(a) => {
                let plays = self.plays(env)?;
                let va = self.node_values(a, env)?;
                plays.iter().map(|play| va[play.at(1)].clone()).collect()
            }
            Node::Until(a, b) => {
                let plays = self.plays(env)?;
                let va = self.node_values(a, env)?;
                let vb = self.node_values(b, env)?;
                plays
                    .iter()
                    .map(|play| eval_until(play, &va, &vb))
                    .collect()
            }
            Node::UntilD(d, a, b) => {
                let plays = self.plays(env)?;
                let va = self.node_values(a, env)?;
                let vb = self.node_values(b, env)?;
                plays
                    .iter()
                    .map(|play| eval_until_discounted(play, &d, &va, &vb))
                    .collect()
            }
        };
        let values = Rc::new(values);
        if self.opts.memo {
            self.memo.insert(key, Rc::clone(&values));
        }
        Ok(values)
    }

    fn exists(
        &mut self,
        var: usize,
        body: usize,
        vary: &[PosId],
        env: &mut Vec<Option<u32>>,
    ) -> Result<Vec<Rational>> {
        let n_actions = self.g.num_actions();
        let mut choice: Vec<ActionId> = vec![0; self.g.num_positions()];
        let mut best: Option<Vec<Rational>> = None;
        loop {
            let sid = self.intern(Strategy::from_raw(choice.clone()));
            env[var] = Some(sid);
            let v = self.node_values(body, env)?;
            let best = match &mut best {
                Some(b) => {
                    for (bi, vi) in b.iter_mut().zip(v.iter()) {
                        if vi > bi {
                            *bi = vi.clone();
                        }
                    }
                    b
                }
                None => best.insert(v.as_ref().clone()),
            };
            if best.iter().all(|x| x.is_one()) {
                break;
            }
            // odometer over the varying positions, last position fastest
            let mut k = vary.len();
            loop {
                if k == 0 {
                    return Ok(best.clone());
                }
                k -= 1;
                choice[vary[k]] += 1;
                if choice[vary[k]] < n_actions {
                    break;
                }
                choice[vary[k]] = 0;
            }
        }
        Ok(best.expect("at least one candidate"))
    }

    /// The play from every position under the agents' current strategies.
    fn plays(&mut self, env: &[Option<u32>]) -> Result<Rc<Vec<LassoPlay>>> {
        let agent_strats = (0..self.g.num_agents())
            .map(|a| env[a].ok_or_else(|| Error::UnboundName(self.names[a].clone())))
            .collect::<Result<Vec<u32>>>()?;
        if let Some(p) = self.lassos.get(&agent_strats) {
            return Ok(Rc::clone(p));
        }
        let mut profile = vec![0; self.g.num_agents()];
        let succ: Vec<PosId> = (0..self.g.num_positions())
            .map(|q| {
                for (slot, &s) in profile.iter_mut().zip(&agent_strats) {
                    *slot = self.strategies[s as usize].action(q);
                }
                self.g.transition(q, &profile)
            })
            .collect();
        let plays = Rc::new(
            (0..self.g.num_positions())
                .map(|q| lasso_from_successors(&succ, q))
                .collect::<Vec<_>>(),
        );
        self.lassos.insert(agent_strats, Rc::clone(&plays));
        Ok(plays)
    }
}

/// Agents bound to `var` somewhere in `f`, ignoring bindings under an inner
/// quantifier for the same variable.
fn agents_bound_to(f: &Formula, var: &str, out: &mut Vec<String>) {
    match f {
        Formula::Exists(x, _) if x == var => {}
        Formula::Bind {
            agent,
            var: v,
            body,
        } => {
            if v == var && !out.contains(agent) {
                out.push(agent.clone());
            }
            agents_bound_to(body, var, out);
        }
        _ => {
            for c in f.children() {
                agents_bound_to(c, var, out);
            }
        }
    }
}

/// Value of `phi` at `q` under the memoryless assignment `chi`.
pub fn eval(g: &Cgs, chi: &Assignment, q: PosId, phi: &Formula) -> Result<Rational> {
    EvalContext::new(g).eval(phi, chi, q)
}

pub fn eval_with(
    g: &Cgs,
    chi: &Assignment,
    q: PosId,
    phi: &Formula,
    opts: EvalOptions,
) -> Result<Rational> {
    EvalContext::with_options(g, opts).eval(phi, chi, q)
}

/// `sup_i min(v2(pi_i), min_{j<i} v1(pi_j))` along a lasso, where `v1` and
/// `v2` are indexed by position. Indices past the first cycle revisit
/// positions already scanned with a smaller prefix minimum, so scanning up to
/// `loop_end` suffices.
pub fn eval_until(play: &LassoPlay, v1: &[Rational], v2: &[Rational]) -> Rational {
    let mut best = zero();
    let mut prefix_min = one();
    for &p in play.positions() {
        let cand = (&v2[p]).min(&prefix_min);
        if *cand > best {
            best = cand.clone();
        }
        if v1[p] < prefix_min {
            prefix_min = v1[p].clone();
        }
        if prefix_min.is_zero() || best == prefix_min {
            break;
        }
    }
    best
}

/// `sup_i min(d(i) v2(pi_i), min_{j<i} d(j) v1(pi_j))` along a lasso.
///
/// After the prefix and one cycle, no later index can beat
/// `min(d(i) * vmax, prefix_min)` where `vmax` is the largest `v2` on the
/// cycle; the scan continues only while that bound exceeds the best value,
/// and never past the crossing index of `best / vmax`.
pub fn eval_until_discounted(
    play: &LassoPlay,
    d: &DiscountFn,
    v1: &[Rational],
    v2: &[Rational],
) -> Rational {
    let mut best = zero();
    let mut prefix_min = one();
    let mut i: u64 = 0;
    let loop_end = play.loop_end() as u64;
    let vmax = play.positions()[play.loop_start()..]
        .iter()
        .map(|&p| &v2[p])
        .max()
        .expect("non-empty cycle")
        .clone();
    let mut cap: Option<u64> = None;
    loop {
        let di = d.value(i);
        if i >= loop_end {
            if vmax.is_zero() || prefix_min.is_zero() {
                break;
            }
            let bound = (&di * &vmax).min(prefix_min.clone());
            if bound <= best {
                break;
            }
            if !best.is_zero() {
                let c = *cap.get_or_insert_with(|| {
                    d.crossing_index(&(&best / &vmax)).expect("positive bound")
                });
                if i >= c {
                    break;
                }
            }
        }
        let p = play.at(i as usize);
        let cand = (&di * &v2[p]).min(prefix_min.clone());
        if cand > best {
            best = cand;
            cap = None;
        }
        let left = &di * &v1[p];
        if left < prefix_min {
            prefix_min = left;
        }
        i += 1;
    }
    best
}

/// Decides `[[phi]](initial) cmp threshold` for a sentence.
pub fn check_threshold(
    g: &Cgs,
    phi: &Formula,
    threshold: &Rational,
    cmp: Comparison,
) -> Result<(bool, Report)> {
    check_threshold_with(g, phi, threshold, cmp, EvalOptions::default())
}

pub fn check_threshold_with(
    g: &Cgs,
    phi: &Formula,
    threshold: &Rational,
    cmp: Comparison,
    opts: EvalOptions,
) -> Result<(bool, Report)> {
    if !is_sentence(phi, g.agents()) {
        let names: Vec<String> = free_names(phi, g.agents()).into_iter().collect();
        return Err(Error::NotASentence(names.join(", ")));
    }
    if !in_unit_interval(threshold) {
        return Err(Error::ThresholdRange(format_exact(threshold)));
    }
    let value = eval_with(g, &Assignment::new(), g.initial(), phi, opts)?;
    let verdict = cmp.holds(&value, threshold);
    let report = Report::new(format!("{phi} {cmp} {}", format_exact(threshold)))
        .with_value(value)
        .with_verdict(verdict);
    Ok((verdict, report))
}
