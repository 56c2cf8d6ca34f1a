#![allow(dead_code)]

use std::collections::BTreeSet;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sld_core::cgs::CgsSpec;
use sld_core::discount::DiscountFn;
use sld_core::formula::{self as f, DiscountRef};
use sld_core::lasso::LassoWord;
use sld_core::parity::{ParityGame, Player};
use sld_core::rational::rat;
use sld_core::{Assignment, Cgs, Formula, Rational, Strategy};

pub const ATOMS: [&str; 2] = ["p", "q"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn agent_name(i: usize) -> String {
    ["a", "b"][i].to_string()
}

/// Up to 5 positions, 3 actions and 2 agents, labels over p and q.
pub fn random_cgs(r: &mut impl Rng) -> Cgs {
    let n_pos = r.gen_range(1..=5);
    let n_act: usize = r.gen_range(1..=3);
    let n_ag = r.gen_range(1..=2);
    let positions: Vec<String> = (0..n_pos).map(|i| format!("q{i}")).collect();
    let actions: Vec<String> = (0..n_act).map(|i| format!("a{i}")).collect();
    let mut transitions = Vec::new();
    for src in &positions {
        for idx in 0..n_act.pow(n_ag as u32) {
            let mut rest = idx;
            let mut profile = vec![String::new(); n_ag];
            for slot in profile.iter_mut().rev() {
                *slot = actions[rest % n_act].clone();
                rest /= n_act;
            }
            let target = positions.choose(r).unwrap().clone();
            transitions.push((src.clone(), profile, target));
        }
    }
    let labels = positions
        .iter()
        .map(|p| {
            let props = ATOMS
                .iter()
                .filter(|_| r.gen_bool(0.5))
                .map(|a| a.to_string())
                .collect();
            (p.clone(), props)
        })
        .collect();
    CgsSpec {
        agents: (0..n_ag).map(agent_name).collect(),
        actions,
        positions: positions.clone(),
        initial: positions[0].clone(),
        transitions,
        labels,
    }
    .build()
    .expect("generated structure is valid")
}

pub fn random_strategy(r: &mut impl Rng, g: &Cgs) -> Strategy {
    let choice = (0..g.num_positions())
        .map(|_| r.gen_range(0..g.num_actions()))
        .collect();
    Strategy::new(g, choice).unwrap()
}

/// Strategies for every agent and for the extra names given.
pub fn random_assignment(r: &mut impl Rng, g: &Cgs, extra: &[&str]) -> Assignment {
    let mut chi = Assignment::new();
    for a in g.agents() {
        chi.insert(a.clone(), random_strategy(r, g));
    }
    for x in extra {
        chi.insert(x.to_string(), random_strategy(r, g));
    }
    chi
}

pub fn exp(n: i64, d: i64) -> DiscountFn {
    DiscountFn::exponential(rat(n, d)).unwrap()
}

/// Exponential functions, plain and scaled.
pub fn exponential_pool() -> Vec<DiscountRef> {
    vec![
        DiscountRef::new("e12", exp(1, 2)),
        DiscountRef::new("e23", exp(2, 3)),
        DiscountRef::new("s34e12", DiscountFn::scaled(rat(3, 4), exp(1, 2)).unwrap()),
    ]
}

/// Exponential and hyperbolic functions.
pub fn mixed_pool() -> Vec<DiscountRef> {
    let mut pool = exponential_pool();
    pool.push(DiscountRef::new("hyp", DiscountFn::hyperbolic()));
    pool
}

/// Strictly positive functions, including ones that start with several
/// exact ones.
pub fn positive_pool() -> Vec<DiscountRef> {
    let mut pool = mixed_pool();
    pool.push(DiscountRef::new(
        "t11e12",
        DiscountFn::table_then_tail(vec![rat(1, 1), rat(1, 1)], exp(1, 2)).unwrap(),
    ));
    pool.push(DiscountRef::new(
        "t1h",
        DiscountFn::table_then_tail(vec![rat(1, 1), rat(1, 2)], DiscountFn::hyperbolic()).unwrap(),
    ));
    pool
}

/// Quantifier- and binding-free formula of depth at most `depth`.
pub fn random_ltld(r: &mut impl Rng, depth: usize, pool: &[DiscountRef]) -> Formula {
    if depth == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..8) {
            0 => Formula::True,
            1 => Formula::False,
            k => f::atom(ATOMS[k % 2]),
        };
    }
    let sub = |r: &mut _| random_ltld(r, depth - 1, pool);
    match r.gen_range(0..9) {
        0 => f::not(sub(r)),
        1 => f::or(sub(r), sub(r)),
        2 => f::and(sub(r), sub(r)),
        3 => f::next(sub(r)),
        4 => f::until(sub(r), sub(r)),
        5 => f::eventually(sub(r)),
        6 => f::always(sub(r)),
        7 => f::eventually_d(pool.choose(r).unwrap().clone(), sub(r)),
        _ => f::until_d(pool.choose(r).unwrap().clone(), sub(r), sub(r)),
    }
}

pub fn random_word(r: &mut impl Rng) -> LassoWord {
    let len = r.gen_range(1..=6);
    let letters: Vec<BTreeSet<String>> = (0..len)
        .map(|_| {
            ATOMS
                .iter()
                .filter(|_| r.gen_bool(0.5))
                .map(|a| a.to_string())
                .collect()
        })
        .collect();
    let loop_start = r.gen_range(0..len);
    LassoWord::new(letters, loop_start)
}

/// Value of an LTL[D] formula at every stored index of a lasso word,
/// computed by walking the unrolled word. Each until is a supremum over
/// all later indices; the walk covers the prefix and the cycle twice, and
/// then, for discounted operators, continues until the discount alone
/// can no longer beat the best term found.
pub fn oracle_values(w: &LassoWord, phi: &Formula) -> Vec<Rational> {
    let n = w.len();
    let next = |i: usize| if i + 1 < n { i + 1 } else { w.loop_start() };
    let zero = Rational::zero;
    let one = Rational::one;
    match phi {
        Formula::True => vec![one(); n],
        Formula::False => vec![zero(); n],
        Formula::Atom(p) => w
            .letters()
            .iter()
            .map(|l| if l.contains(p) { one() } else { zero() })
            .collect(),
        Formula::Not(a) => oracle_values(w, a).into_iter().map(|v| one() - v).collect(),
        Formula::Or(a, b) => oracle_values(w, a)
            .into_iter()
            .zip(oracle_values(w, b))
            .map(|(x, y)| if x > y { x } else { y })
            .collect(),
        Formula::Next(a) => {
            let v = oracle_values(w, a);
            (0..n).map(|i| v[next(i)].clone()).collect()
        }
        Formula::Until(a, b) => until_walk(w, &oracle_values(w, a), &oracle_values(w, b), None),
        Formula::UntilD(d, a, b) => {
            until_walk(w, &oracle_values(w, a), &oracle_values(w, b), Some(&d.func))
        }
        _ => panic!("oracle covers LTL[D] only"),
    }
}

fn until_walk(
    w: &LassoWord,
    v1: &[Rational],
    v2: &[Rational],
    d: Option<&DiscountFn>,
) -> Vec<Rational> {
    let n = w.len();
    let window = 2 * n + 2;
    let weight = |k: usize| d.map_or_else(Rational::one, |d| d.value(k as u64));
    (0..n)
        .map(|start| {
            let mut best = Rational::zero();
            let mut prefix = Rational::one();
            let mut idx = start;
            let mut k = 0;
            loop {
                let dk = weight(k);
                if k >= window && (d.is_none() || best.is_zero() || dk <= best) {
                    break;
                }
                let term = (&dk * &v2[idx]).min(prefix.clone());
                if term > best {
                    best = term;
                }
                prefix = prefix.min(&dk * &v1[idx]);
                idx = if idx + 1 < n { idx + 1 } else { w.loop_start() };
                k += 1;
            }
            best
        })
        .collect()
}

pub fn oracle_value(w: &LassoWord, phi: &Formula) -> Rational {
    oracle_values(w, phi)[0].clone()
}

/// Random game with at most `max_nodes` nodes, out-degree 1 to 3 and
/// priorities 0 to 4.
pub fn random_parity_game(r: &mut impl Rng, max_nodes: usize) -> ParityGame {
    let n = r.gen_range(1..=max_nodes);
    let mut g = ParityGame::new();
    for _ in 0..n {
        let owner = if r.gen_bool(0.5) {
            Player::Verifier
        } else {
            Player::Spoiler
        };
        g.add_node(owner, r.gen_range(0..5));
    }
    for v in 0..n {
        for _ in 0..r.gen_range(1..=3) {
            g.add_edge(v, r.gen_range(0..n));
        }
    }
    g.initial = r.gen_range(0..n);
    g
}

/// Whether Verifier wins from `start` by some positional strategy: every
/// strategy is tried, and it wins when no reachable cycle of the remaining
/// graph has an odd maximum priority.
pub fn brute_force_verifier_wins(g: &ParityGame, start: usize) -> bool {
    let n = g.len();
    let mut choice = vec![0usize; n];
    loop {
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|v| match g.owner[v] {
                Player::Verifier => vec![g.succ[v][choice[v]]],
                Player::Spoiler => g.succ[v].clone(),
            })
            .collect();
        if !spoiler_cycle_reachable(g, &succ, start) {
            return true;
        }
        // next strategy in mixed radix over Verifier nodes
        let mut v = 0;
        loop {
            if v == n {
                return false;
            }
            if g.owner[v] == Player::Verifier && choice[v] + 1 < g.succ[v].len() {
                choice[v] += 1;
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
}

fn reachable(succ: &[Vec<usize>], from: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        for &w in &succ[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// A reachable node of odd priority `p` that returns to itself through
/// nodes of priority at most `p`.
fn spoiler_cycle_reachable(g: &ParityGame, succ: &[Vec<usize>], start: usize) -> bool {
    let from_start = reachable(succ, start, &|_| true);
    (0..g.len()).any(|u| {
        let p = g.priority[u];
        if p.is_multiple_of(2) || !from_start[u] {
            return false;
        }
        let low = |w: usize| g.priority[w] <= p;
        succ[u]
            .iter()
            .any(|&w| low(w) && (w == u || reachable(succ, w, &low)[u]))
    })
}
