//! Nash equilibria for discounted goals, and the two case-study games.

use std::collections::{BTreeMap, HashMap};

use crate::cgs::{ActionId, Cgs, CgsSpec};
use crate::discount::DiscountFn;
use crate::error::{Error, Result};
use crate::eval::EvalContext;
use crate::formula::{self as f, DiscountRef, Formula};
use crate::rational::{format_exact, rat, Rational};
use crate::strategy::{Assignment, Strategy};
use crate::textio::{DiscountDecl, DiscountExpr, ModelFile};

/// One quantifier- and binding-free goal per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalProfile {
    goals: Vec<(String, Formula)>,
}

impl GoalProfile {
    /// Goals must cover every agent of `g` exactly once.
    pub fn new(g: &Cgs, goals: Vec<(String, Formula)>) -> Result<Self> {
        for (agent, goal) in &goals {
            if g.agent_id(agent).is_none() {
                return Err(Error::UnknownAgent(agent.clone()));
            }
            if !goal.is_ltld() {
                return Err(Error::Unsupported(format!(
                    "goal of `{agent}` uses quantifiers or bindings"
                )));
            }
        }
        let mut ordered = Vec::new();
        for agent in g.agents() {
            let mut found = goals.iter().filter(|(a, _)| a == agent);
            match (found.next(), found.next()) {
                (Some(goal), None) => ordered.push(goal.clone()),
                (None, _) => return Err(Error::Arity(format!("no goal for `{agent}`"))),
                (Some(_), Some(_)) => return Err(Error::Arity(format!("two goals for `{agent}`"))),
            }
        }
        Ok(GoalProfile { goals: ordered })
    }

    /// The `goal` lines of a model file.
    pub fn from_model(model: &ModelFile) -> Result<Self> {
        Self::new(&model.cgs, model.goals.clone())
    }

    /// Goals in agent order.
    pub fn goals(&self) -> &[(String, Formula)] {
        &self.goals
    }

    pub fn goal(&self, agent: &str) -> Option<&Formula> {
        self.goals.iter().find(|(a, _)| a == agent).map(|(_, g)| g)
    }
}

/// Variable naming scheme for equilibrium formulas.
pub fn profile_var(agent: &str) -> String {
    format!("s_{agent}")
}

fn deviation_var(agent: &str) -> String {
    format!("b_{agent}")
}

/// `(Ag, vars) AND_a ((A b_a . (a, b_a) goal_a) -> goal_a)`
pub fn ne_formula(goals: &GoalProfile, vars: &[String]) -> Result<Formula> {
    if vars.len() != goals.goals.len() {
        return Err(Error::Arity(format!(
            "{} profile variables for {} agents",
            vars.len(),
            goals.goals.len()
        )));
    }
    let agents: Vec<&str> = goals.goals.iter().map(|(a, _)| a.as_str()).collect();
    let parts = goals
        .goals
        .iter()
        .map(|(agent, goal)| {
            let beta = deviation_var(agent);
            let deviates = f::forall(beta.clone(), f::bind(agent.clone(), beta, goal.clone()));
            f::implies(deviates, goal.clone())
        })
        .collect();
    Ok(f::bind_group(&agents, vars, f::and_all(parts)))
}

/// `E s_1 ... E s_n . ne_formula(s_1..s_n)`
pub fn ne_exists_formula(goals: &GoalProfile) -> Result<Formula> {
    let vars: Vec<String> = goals.goals.iter().map(|(a, _)| profile_var(a)).collect();
    let body = ne_formula(goals, &vars)?;
    Ok(vars
        .iter()
        .rev()
        .fold(body, |acc, v| f::exists(v.clone(), acc)))
}

/// Values behind an equilibrium verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeWitness {
    pub profile: Assignment,
    pub values: BTreeMap<String, Rational>,
    pub best_deviation_values: BTreeMap<String, Rational>,
    pub best_deviations: BTreeMap<String, Strategy>,
}

impl NeWitness {
    /// Agents whose best deviation beats their current value.
    pub fn improving_agents(&self) -> Vec<&str> {
        self.values
            .iter()
            .filter(|(a, v)| self.best_deviation_values[*a] > **v)
            .map(|(a, _)| a.as_str())
            .collect()
    }

    pub fn is_equilibrium(&self) -> bool {
        self.improving_agents().is_empty()
    }

    /// One line per agent: value, best deviation value, strategy.
    pub fn describe(&self, g: &Cgs) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (agent, v) in &self.values {
            out.push((format!("{agent}.value"), format_exact(v)));
            out.push((
                format!("{agent}.best_deviation"),
                format_exact(&self.best_deviation_values[agent]),
            ));
            out.push((format!("{agent}.strategy"), self.profile[agent].describe(g)));
            out.push((
                format!("{agent}.deviation_strategy"),
                self.best_deviations[agent].describe(g),
            ));
        }
        out
    }
}

/// Best-response checker with caches shared across profiles.
pub struct NeChecker<'g> {
    ctx: EvalContext<'g>,
    goals: GoalProfile,
    effective: Vec<Vec<usize>>,
    /// `(agent, others' strategies)` -> best deviation and its value
    best: HashMap<(usize, Vec<Strategy>), (Rational, Strategy)>,
}

impl<'g> NeChecker<'g> {
    pub fn new(g: &'g Cgs, goals: GoalProfile) -> Self {
        let effective = (0..g.num_agents())
            .map(|a| g.effective_positions(a))
            .collect();
        NeChecker {
            ctx: EvalContext::new(g),
            goals,
            effective,
            best: HashMap::new(),
        }
    }

    /// Checks that no agent gains by a unilateral memoryless deviation.
    /// Deviations range over the positions where the deviating agent can
    /// influence the successor; elsewhere its choice never matters.
    pub fn check(&mut self, profile: &Assignment) -> Result<(bool, NeWitness)> {
        let g = self.ctx.cgs();
        let q0 = g.initial();
        let mut witness = NeWitness {
            profile: profile.clone(),
            values: BTreeMap::new(),
            best_deviation_values: BTreeMap::new(),
            best_deviations: BTreeMap::new(),
        };
        let mut ok = true;
        for (a, agent) in g.agents().iter().enumerate() {
            let goal = self.goals.goal(agent).expect("goal per agent").clone();
            let value = self.ctx.eval(&goal, profile, q0)?;
            let others: Vec<Strategy> = g
                .agents()
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, name)| {
                    profile
                        .get(name)
                        .cloned()
                        .ok_or_else(|| Error::UnboundName(name.clone()))
                })
                .collect::<Result<_>>()?;
            let key = (a, others);
            let (dev_value, dev) = match self.best.get(&key) {
                Some(hit) => hit.clone(),
                None => {
                    let found = self.best_deviation(a, &goal, profile)?;
                    self.best.insert(key, found.clone());
                    found
                }
            };
            if dev_value > value {
                ok = false;
            }
            witness.values.insert(agent.clone(), value);
            witness
                .best_deviation_values
                .insert(agent.clone(), dev_value);
            witness.best_deviations.insert(agent.clone(), dev);
        }
        Ok((ok, witness))
    }

    fn best_deviation(
        &mut self,
        a: usize,
        goal: &Formula,
        profile: &Assignment,
    ) -> Result<(Rational, Strategy)> {
        let g = self.ctx.cgs();
        let agent = &g.agents()[a];
        let vary = self.effective[a].clone();
        let mut chi = profile.clone();
        let mut best: Option<(Rational, Strategy)> = None;
        for_each_choice(g, &vary, |choice| {
            let s = Strategy::from_raw(choice.to_vec());
            chi.insert(agent.clone(), s.clone());
            let v = self.ctx.eval(goal, &chi, g.initial())?;
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, s));
            }
            Ok(true)
        })?;
        Ok(best.expect("at least one deviation"))
    }
}

/// Runs `visit` over all choices that vary on `vary` (first listed position
/// most significant) and play the first action elsewhere. `visit` returns
/// `false` to stop early.
fn for_each_choice(
    g: &Cgs,
    vary: &[usize],
    mut visit: impl FnMut(&[ActionId]) -> Result<bool>,
) -> Result<()> {
    let mut choice = vec![0; g.num_positions()];
    loop {
        if !visit(&choice)? {
            return Ok(());
        }
        let mut k = vary.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            choice[vary[k]] += 1;
            if choice[vary[k]] < g.num_actions() {
                break;
            }
            choice[vary[k]] = 0;
        }
    }
}

/// Direct equilibrium check of a full profile.
pub fn check_ne_direct(
    g: &Cgs,
    profile: &Assignment,
    goals: &GoalProfile,
) -> Result<(bool, NeWitness)> {
    NeChecker::new(g, goals.clone()).check(profile)
}

/// First memoryless equilibrium in lexicographic order over
/// `(position, agent)` digits, earlier positions and agents more
/// significant, actions in declaration order. Digits where the agent cannot
/// influence the successor stay at the first action: they never affect the
/// verdict, so the first equilibrium in the full order has them at zero.
pub fn find_ne(g: &Cgs, goals: &GoalProfile) -> Result<Option<(Assignment, NeWitness)>> {
    let mut checker = NeChecker::new(g, goals.clone());
    let digits: Vec<(usize, usize)> = (0..g.num_positions())
        .flat_map(|p| (0..g.num_agents()).map(move |a| (p, a)))
        .filter(|&(p, a)| checker.effective[a].contains(&p))
        .collect();
    let mut choices = vec![vec![0; g.num_positions()]; g.num_agents()];
    loop {
        let profile: Assignment = g
            .agents()
            .iter()
            .zip(&choices)
            .map(|(a, c)| (a.clone(), Strategy::from_raw(c.clone())))
            .collect();
        let (ok, witness) = checker.check(&profile)?;
        if ok {
            return Ok(Some((profile, witness)));
        }
        let mut k = digits.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            let (p, a) = digits[k];
            choices[a][p] += 1;
            if choices[a][p] < g.num_actions() {
                break;
            }
            choices[a][p] = 0;
        }
    }
}

fn s(x: &str) -> String {
    x.to_string()
}

/// The three-candidate hiring game between Ann and Bob.
pub fn gen_secretary() -> ModelFile {
    let positions: Vec<String> = (0..7).map(|i| format!("q{i}")).collect();
    let mut spec = CgsSpec {
        agents: vec![s("Ann"), s("Bob")],
        actions: vec![s("y"), s("n")],
        positions: positions.clone(),
        initial: s("q0"),
        transitions: Vec::new(),
        labels: vec![
            (s("q2"), vec![s("hired_a"), s("onehired")]),
            (s("q4"), vec![s("hired_b"), s("onehired")]),
            (s("q6"), vec![s("hired_c"), s("onehired")]),
        ],
    };
    // (vote position, hire position, next vote position)
    for (vote, hire, next) in [("q0", "q2", "q1"), ("q1", "q4", "q3"), ("q3", "q6", "q5")] {
        for a in ["y", "n"] {
            for b in ["y", "n"] {
                let target = if a == "y" && b == "y" { hire } else { next };
                spec.transitions
                    .push((s(vote), vec![s(a), s(b)], s(target)));
            }
        }
    }
    for sink in ["q2", "q4", "q6", "q5"] {
        for a in ["y", "n"] {
            for b in ["y", "n"] {
                spec.transitions.push((s(sink), vec![s(a), s(b)], s(sink)));
            }
        }
    }
    let cgs = spec.build().expect("secretary model is well formed");
    let d_ann = DiscountDecl {
        name: s("dAnn"),
        expr: DiscountExpr::Hyp,
        func: DiscountFn::hyperbolic(),
    };
    let d_bob = DiscountDecl {
        name: s("dBob"),
        expr: DiscountExpr::Exp(rat(1, 2)),
        func: DiscountFn::exponential(rat(1, 2)).expect("valid base"),
    };
    let ann = DiscountRef::new("dAnn", d_ann.func.clone());
    let bob = DiscountRef::new("dBob", d_bob.func.clone());
    let goals = vec![
        (
            s("Ann"),
            f::or(
                f::eventually(f::atom("hired_b")),
                f::eventually_d(ann, f::atom("onehired")),
            ),
        ),
        (s("Bob"), f::eventually_d(bob, f::atom("onehired"))),
    ];
    ModelFile {
        cgs,
        discounts: vec![d_ann, d_bob],
        goals,
    }
}

/// Strategy of the secretary game that votes `y` from the given vote
/// positions on and `n` before (`0` for all three candidates, `1` for b and
/// c, `2` for c only).
pub fn secretary_strategy(g: &Cgs, first_yes: usize) -> Strategy {
    let votes = ["q0", "q1", "q3"];
    let pairs: Vec<(&str, &str)> = votes
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, if i >= first_yes { "y" } else { "n" }))
        .collect();
    Strategy::from_named(g, 0, &pairs).expect("secretary positions")
}

fn share_name(r: &Rational) -> Option<&'static str> {
    if *r == rat(1, 3) {
        Some("onethird")
    } else if *r == rat(1, 2) {
        Some("half")
    } else if *r == rat(2, 3) {
        Some("twothird")
    } else {
        None
    }
}

/// Alternating-offer negotiation between Alice and Beth over one pie.
///
/// `offers` lists splits `(proposer's share, responder's share)`. The
/// actions are `acc` followed by one `keep_<share>` per offer. Alice
/// proposes at `q0`; each responder may accept, which leads to an absorbing
/// agreement state labelled with both shares, or counter with one of the
/// offers, which hands the proposal to the other agent. After `depth`
/// responding rounds, counteroffers lead to absorbing states without
/// agreement. Playing `acc` where a proposal is due walks away into the
/// last position, `q_none`.
///
/// Each responder state gets its agreement state and then its counteroffer
/// states numbered consecutively; responder states of one round are
/// expanded ordered by the offer they answer, then by parent. With the default two offers and depth 2 this reproduces the
/// drawn numbering `q0`..`q14`.
pub fn gen_negotiation(offers: &[(Rational, Rational)], depth: usize) -> Result<ModelFile> {
    if offers.is_empty() || depth == 0 {
        return Err(Error::Arity("need at least one offer and one round".into()));
    }
    let mut keep_names = Vec::new();
    for (mine, theirs) in offers {
        let (Some(m), Some(_)) = (share_name(mine), share_name(theirs)) else {
            return Err(Error::Arity(format!(
                "split [{}, {}] uses a share outside 1/3, 1/2, 2/3",
                format_exact(mine),
                format_exact(theirs)
            )));
        };
        if mine + theirs != rat(1, 1) {
            return Err(Error::Arity(format!(
                "split [{}, {}] does not sum to 1",
                format_exact(mine),
                format_exact(theirs)
            )));
        }
        let name = format!("keep_{m}");
        if keep_names.contains(&name) {
            return Err(Error::Arity(format!("offer {name} listed twice")));
        }
        keep_names.push(name);
    }
    let agents = [s("Alice"), s("Beth")];
    let mut actions = vec![s("acc")];
    actions.extend(keep_names.iter().cloned());

    struct Pos {
        labels: Vec<String>,
        /// `Some(agent)` when that agent moves here; `None` for absorbing.
        mover: Option<usize>,
        /// successor per action of the mover
        succ: Vec<usize>,
    }
    let mut pos: Vec<Pos> = vec![Pos {
        labels: vec![],
        mover: Some(0),
        succ: vec![],
    }];
    // responder states of the current level: (index, responder, offer made)
    let mut level: Vec<(usize, usize, usize)> = Vec::new();
    for (o, _) in offers.iter().enumerate() {
        pos.push(Pos {
            labels: vec![],
            mover: Some(1),
            succ: vec![],
        });
        level.push((pos.len() - 1, 1, o));
    }
    let none_placeholder = usize::MAX;
    pos[0].succ = std::iter::once(none_placeholder)
        .chain(level.iter().map(|&(i, _, _)| i))
        .collect();

    for round in 1..=depth {
        let mut next: Vec<(usize, usize, usize, usize)> = Vec::new();
        for (parent_order, &(state, responder, offer)) in level.iter().enumerate() {
            let proposer = 1 - responder;
            let (p_share, r_share) = &offers[offer];
            let mut labels = vec![
                format!("{}_{}", share_name(p_share).unwrap(), agents[proposer]),
                format!("{}_{}", share_name(r_share).unwrap(), agents[responder]),
            ];
            labels.sort();
            pos.push(Pos {
                labels,
                mover: None,
                succ: vec![],
            });
            let mut succ = vec![pos.len() - 1];
            for counter in 0..offers.len() {
                pos.push(Pos {
                    labels: vec![],
                    mover: if round < depth { Some(proposer) } else { None },
                    succ: vec![],
                });
                succ.push(pos.len() - 1);
                if round < depth {
                    next.push((pos.len() - 1, proposer, counter, parent_order));
                }
            }
            pos[state].succ = succ;
        }
        next.sort_by_key(|&(_, _, offer, parent)| (offer, parent));
        level = next
            .iter()
            .map(|&(i, responder, offer, _)| (i, responder, offer))
            .collect();
    }
    let none = pos.len();
    let names: Vec<String> = (0..none)
        .map(|i| format!("q{i}"))
        .chain([s("q_none")])
        .collect();

    let mut transitions = Vec::new();
    let n_actions = actions.len();
    for (i, p) in pos.iter().enumerate() {
        for a in 0..n_actions {
            for b in 0..n_actions {
                let target = match p.mover {
                    None => i,
                    Some(m) => {
                        let act = if m == 0 { a } else { b };
                        match p.succ[act] {
                            usize::MAX => none,
                            t => t,
                        }
                    }
                };
                transitions.push((
                    names[i].clone(),
                    vec![actions[a].clone(), actions[b].clone()],
                    names[target].clone(),
                ));
            }
        }
    }
    for a in 0..n_actions {
        for b in 0..n_actions {
            transitions.push((
                names[none].clone(),
                vec![actions[a].clone(), actions[b].clone()],
                names[none].clone(),
            ));
        }
    }
    let labels = pos
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.labels.is_empty())
        .map(|(i, p)| (names[i].clone(), p.labels.clone()))
        .collect();
    let cgs = CgsSpec {
        agents: agents.to_vec(),
        actions,
        positions: names,
        initial: s("q0"),
        transitions,
        labels,
    }
    .build()?;

    let pie_expr = DiscountExpr::Table(
        vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        Box::new(DiscountExpr::Exp(rat(1, 2))),
    );
    let pie = DiscountFn::table_then_tail(
        vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        DiscountFn::exponential(rat(1, 2))?,
    )?;
    let mut discounts = vec![DiscountDecl {
        name: s("dPie"),
        expr: pie_expr,
        func: pie.clone(),
    }];
    let buckets = [
        ("twothird", "dTwoThird", rat(2, 3)),
        ("half", "dHalf", rat(1, 2)),
        ("onethird", "dOneThird", rat(1, 3)),
    ];
    for (_, name, factor) in &buckets {
        discounts.push(DiscountDecl {
            name: s(name),
            expr: DiscountExpr::Scale(factor.clone(), Box::new(DiscountExpr::Name(s("dPie")))),
            func: DiscountFn::scaled(factor.clone(), pie.clone())?,
        });
    }
    let goals = agents
        .iter()
        .map(|agent| {
            let parts: Vec<Formula> = buckets
                .iter()
                .enumerate()
                .map(|(k, (bucket, _, _))| {
                    let d = &discounts[k + 1];
                    f::eventually_d(
                        DiscountRef::new(d.name.clone(), d.func.clone()),
                        f::atom(format!("{bucket}_{agent}")),
                    )
                })
                .collect();
            let goal = parts.into_iter().reduce(f::or).expect("three buckets");
            (agent.clone(), goal)
        })
        .collect();
    Ok(ModelFile {
        cgs,
        discounts,
        goals,
    })
}

/// The default negotiation: offers keeping one half or two thirds, two
/// responding rounds.
pub fn default_negotiation() -> ModelFile {
    gen_negotiation(&[(rat(1, 2), rat(1, 2)), (rat(2, 3), rat(1, 3))], 2)
        .expect("default offers are valid")
}
