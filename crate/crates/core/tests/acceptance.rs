mod common;

use std::process::ExitCode;
use std::time::Instant;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use sld_core::apt::{apt_membership, build_apt, reachable_state_count};
use sld_core::cgs::CgsSpec;
use sld_core::concepts::{
    check_ne_direct, default_negotiation, gen_secretary, ne_exists_formula, secretary_strategy,
    GoalProfile,
};
use sld_core::discount::DiscountFn;
use sld_core::eval::{check_threshold, eval, eval_until, eval_until_discounted, Comparison};
use sld_core::formula::{self as f, DiscountRef};
use sld_core::lasso::{eval_ltld, notone, posi, LassoWord};
use sld_core::parity::{solve_parity, verify, Player};
use sld_core::rational::{format_decimal, format_exact, rat};
use sld_core::strategy::{lasso_from_successors, outcome};
use sld_core::{Assignment, Formula, Rational, Strategy};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn discount_table() -> Outcome {
    let m = gen_secretary();
    let ann = m.discount("dAnn").ok_or("no dAnn")?;
    let bob = m.discount("dBob").ok_or("no dBob")?;
    let expect_ann = [rat(1, 1), rat(1, 2), rat(1, 3), rat(1, 4)];
    let expect_bob = [rat(1, 1), rat(1, 2), rat(1, 4), rat(1, 8)];
    for i in 0..4 {
        ensure(ann.value(i as u64) == expect_ann[i], || {
            format!("dAnn({i})")
        })?;
        ensure(bob.value(i as u64) == expect_bob[i], || {
            format!("dBob({i})")
        })?;
    }
    ensure(format_decimal(&ann.value(2), 3) == "0.333", || {
        "1/3 display".into()
    })?;
    Ok("dAnn = 1, 1/2, 1/3, 1/4; dBob = 1, 1/2, 1/4, 1/8".into())
}

fn secretary_profile(g: &sld_core::Cgs, ann: usize, bob: usize) -> Assignment {
    [("Ann", ann), ("Bob", bob)]
        .into_iter()
        .map(|(a, k)| (a.to_string(), secretary_strategy(g, k)))
        .collect()
}

fn secretary_values() -> Outcome {
    let m = gen_secretary();
    let g = &m.cgs;
    let (psi_ann, psi_bob) = (m.goal("Ann").unwrap(), m.goal("Bob").unwrap());
    // rows: Ann plays abc, bc, c; columns: Bob plays abc, bc, c
    let expected = [
        [
            (rat(1, 2), rat(1, 2)),
            (rat(1, 1), rat(1, 4)),
            (rat(1, 4), rat(1, 8)),
        ],
        [
            (rat(1, 1), rat(1, 4)),
            (rat(1, 1), rat(1, 4)),
            (rat(1, 4), rat(1, 8)),
        ],
        [
            (rat(1, 4), rat(1, 8)),
            (rat(1, 4), rat(1, 8)),
            (rat(1, 4), rat(1, 8)),
        ],
    ];
    for (a, row) in expected.iter().enumerate() {
        for (b, (va, vb)) in row.iter().enumerate() {
            let chi = secretary_profile(g, a, b);
            let got_a = eval(g, &chi, g.initial(), psi_ann).map_err(|e| e.to_string())?;
            let got_b = eval(g, &chi, g.initial(), psi_bob).map_err(|e| e.to_string())?;
            ensure(got_a == *va && got_b == *vb, || {
                format!("entry ({a},{b}): got ({got_a}, {got_b}), expected ({va}, {vb})")
            })?;
        }
    }
    Ok("all 9 entries exact".into())
}

fn secretary_ne() -> Outcome {
    let m = gen_secretary();
    let g = &m.cgs;
    let goals = GoalProfile::from_model(&m).map_err(|e| e.to_string())?;
    let (ok, w) =
        check_ne_direct(g, &secretary_profile(g, 1, 0), &goals).map_err(|e| e.to_string())?;
    ensure(ok, || {
        format!(
            "(sigma_bc, sigma_abc) rejected, improving: {:?}",
            w.improving_agents()
        )
    })?;
    let phi = ne_exists_formula(&goals).map_err(|e| e.to_string())?;
    let (verdict, report) =
        check_threshold(g, &phi, &rat(1, 1000), Comparison::Ge).map_err(|e| e.to_string())?;
    ensure(verdict, || "existential NE formula below 1/1000".into())?;
    Ok(format!(
        "(sigma_bc, sigma_abc) is an NE; NE formula value {}",
        format_exact(report.value.as_ref().unwrap())
    ))
}

fn negotiation_ne() -> Outcome {
    let m = default_negotiation();
    let g = &m.cgs;
    let goals = GoalProfile::from_model(&m).map_err(|e| e.to_string())?;
    let alice =
        Strategy::from_named(g, 0, &[("q0", "keep_twothird")]).map_err(|e| e.to_string())?;
    let beth = Strategy::constant(g, g.action_id("acc").ok_or("no acc")?);
    let chi: Assignment = [("Alice".to_string(), alice), ("Beth".to_string(), beth)]
        .into_iter()
        .collect();

    // simulate: first index where an agreement label shows up
    let play = outcome(g, &chi, g.initial()).map_err(|e| e.to_string())?;
    let k = (0..play.loop_end())
        .find(|&i| g.has_label(play.at(i), "twothird_Alice"))
        .ok_or("agreement never reached")?;
    let d_pie = |i: usize| {
        if i < 3 {
            rat(1, 1)
        } else {
            rat(1, 2).pow(i as i32)
        }
    };
    let (want_a, want_b) = (rat(2, 3) * d_pie(k), rat(1, 3) * d_pie(k));
    ensure(g.has_label(play.at(k), "onethird_Beth"), || {
        "Beth's share label".into()
    })?;

    let (ok, w) = check_ne_direct(g, &chi, &goals).map_err(|e| e.to_string())?;
    ensure(ok, || {
        format!("profile rejected, improving: {:?}", w.improving_agents())
    })?;
    ensure(
        w.values["Alice"] == want_a && w.values["Beth"] == want_b,
        || {
            format!(
                "values ({}, {}), simulated ({want_a}, {want_b})",
                w.values["Alice"], w.values["Beth"]
            )
        },
    )?;
    let phi = ne_exists_formula(&goals).map_err(|e| e.to_string())?;
    let (verdict, _) =
        check_threshold(g, &phi, &rat(1, 1000), Comparison::Ge).map_err(|e| e.to_string())?;
    ensure(verdict, || "existential NE formula below 1/1000".into())?;
    Ok(format!(
        "agreement at step {k}, values ({want_a}, {want_b}); NE formula >= 1/1000"
    ))
}

fn eval_vs_lasso() -> Outcome {
    let mut r = rng(5);
    let pool = mixed_pool();
    let cases = 600;
    for case in 0..cases {
        let g = random_cgs(&mut r);
        let chi = random_assignment(&mut r, &g, &[]);
        let phi = random_ltld(&mut r, 4, &pool);
        let q = r.gen_range(0..g.num_positions());
        let direct = eval(&g, &chi, q, &phi).map_err(|e| e.to_string())?;
        let word = LassoWord::from_play(&g, &outcome(&g, &chi, q).map_err(|e| e.to_string())?);
        let via_word = eval_ltld(&word, &phi).map_err(|e| e.to_string())?;
        let oracle = oracle_value(&word, &phi);
        ensure(direct == via_word && direct == oracle, || {
            format!("case {case}: {phi}: eval {direct}, eval_ltld {via_word}, unrolled {oracle}")
        })?;
    }
    Ok(format!(
        "{cases} cases agree with eval_ltld and the unrolled oracle"
    ))
}

fn brute_sup(
    play: &sld_core::LassoPlay,
    d: Option<&DiscountFn>,
    v1: &[Rational],
    v2: &[Rational],
    horizon: usize,
) -> Rational {
    let w = |i: usize| d.map_or_else(Rational::one, |d| d.value(i as u64));
    let mut best = Rational::zero();
    for i in 0..horizon {
        let mut term = &w(i) * &v2[play.at(i)];
        for j in 0..i {
            term = term.min(&w(j) * &v1[play.at(j)]);
        }
        if term > best {
            best = term;
        }
    }
    best
}

fn bounded_scan() -> Outcome {
    let mut r = rng(6);
    let levels = [
        rat(0, 1),
        rat(1, 4),
        rat(1, 3),
        rat(1, 2),
        rat(2, 3),
        rat(1, 1),
    ];
    let mut pool: Vec<DiscountRef> = positive_pool();
    pool.push(DiscountRef::new("e910", exp(9, 10)));
    let cases = 600;
    for case in 0..cases {
        let n = r.gen_range(1..=6);
        let succ: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
        let play = lasso_from_successors(&succ, r.gen_range(0..n));
        let v1: Vec<Rational> = (0..n)
            .map(|_| levels.choose(&mut r).unwrap().clone())
            .collect();
        let v2: Vec<Rational> = (0..n)
            .map(|_| levels.choose(&mut r).unwrap().clone())
            .collect();
        let (end, cycle) = (play.loop_end(), play.cycle_len());

        let scanned = eval_until(&play, &v1, &v2);
        let brute = brute_sup(&play, None, &v1, &v2, end + 3 * cycle);
        ensure(scanned == brute, || {
            format!("case {case}: until {scanned} vs {brute}")
        })?;

        let d = &pool.choose(&mut r).unwrap().func;
        let window = end + 3 * cycle;
        let b0 = brute_sup(&play, Some(d), &v1, &v2, window);
        let horizon = if b0.is_zero() {
            window
        } else {
            let mut c = 0u64;
            while d.value(c) > b0 {
                c += 1;
            }
            window.max(end + cycle + c as usize)
        };
        let scanned = eval_until_discounted(&play, d, &v1, &v2);
        let brute = brute_sup(&play, Some(d), &v1, &v2, horizon);
        ensure(scanned == brute, || {
            format!("case {case}: discounted until with {d}: {scanned} vs {brute}")
        })?;
    }
    Ok(format!("{cases} plays, both scans exact"))
}

fn apt_soundness() -> Outcome {
    let mut r = rng(7);
    let pool = exponential_pool();
    let cases = 250;
    let mut accepted = 0;
    let mut states = 0;
    for case in 0..cases {
        let g = random_cgs(&mut r);
        let mut phi = random_ltld(&mut r, 3, &pool);
        let mut extra = Vec::new();
        if r.gen_bool(0.3) {
            phi = f::bind(g.agents()[0].clone(), "x", phi);
            extra.push("x");
        }
        let chi = random_assignment(&mut r, &g, &extra);
        let t = rat(r.gen_range(0..=16), 16);
        let q = r.gen_range(0..g.num_positions());
        let a = build_apt(&phi, &t, &g).map_err(|e| format!("case {case}: {e}"))?;
        states += a.states().len();
        let member = apt_membership(&a, &g, &chi, q).map_err(|e| e.to_string())?;
        let value = eval(&g, &chi, q, &phi).map_err(|e| e.to_string())?;
        ensure(member == (value > t), || {
            format!("case {case}: {phi} > {t}: value {value}, membership {member}")
        })?;
        accepted += member as usize;
    }
    Ok(format!(
        "{cases} cases ({accepted} accepted, {states} automaton states in total)"
    ))
}

fn finiteness_trend() -> Outcome {
    let g = CgsSpec {
        agents: vec!["a".into()],
        actions: vec!["go".into()],
        positions: vec!["q0".into(), "q1".into()],
        initial: "q0".into(),
        transitions: vec![
            ("q0".into(), vec!["go".into()], "q1".into()),
            ("q1".into(), vec!["go".into()], "q1".into()),
        ],
        labels: vec![("q1".into(), vec!["p".into()])],
    }
    .build()
    .map_err(|e| e.to_string())?;
    let phi = f::eventually_d(DiscountRef::new("d", exp(1, 2)), f::atom("p"));
    let counts: Vec<usize> = (1..=8)
        .map(|m| reachable_state_count(&phi, &rat(1, 1 << m), &g).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let step = counts[1] as i64 - counts[0] as i64;
    ensure(step > 0, || format!("no growth: {counts:?}"))?;
    for w in counts.windows(2) {
        ensure(w[1] as i64 - w[0] as i64 == step, || {
            format!("not affine: {counts:?}")
        })?;
    }
    Ok(format!("counts for m = 1..8: {counts:?}"))
}

fn extreme_values() -> Outcome {
    let mut r = rng(9);
    let pool = positive_pool();
    let cases = 600;
    let (mut zeros, mut ones) = (0, 0);
    for case in 0..cases {
        let w = random_word(&mut r);
        let phi = random_ltld(&mut r, 4, &pool);
        let value = eval_ltld(&w, &phi).map_err(|e| e.to_string())?;
        ensure(value == oracle_value(&w, &phi), || {
            format!("case {case}: value mismatch for {phi}")
        })?;
        let p = posi(&phi).map_err(|e| e.to_string())?;
        let n = notone(&phi).map_err(|e| e.to_string())?;
        let holds = |b: &Formula| oracle_value(&w, b).is_one();
        ensure((value > Rational::zero()) == holds(&p), || {
            format!("case {case}: {phi}: value {value}, posi = {p}")
        })?;
        ensure((value < Rational::one()) == holds(&n), || {
            format!("case {case}: {phi}: value {value}, notone = {n}")
        })?;
        zeros += value.is_zero() as usize;
        ones += value.is_one() as usize;
    }
    Ok(format!(
        "{cases} word/formula pairs ({zeros} with value 0, {ones} with value 1)"
    ))
}

fn stutter() -> Outcome {
    // r -> s -> t, t loops and is labelled p; r and s carry the same labels
    let g = CgsSpec {
        agents: vec!["a".into()],
        actions: vec!["go".into()],
        positions: vec!["r".into(), "s".into(), "t".into()],
        initial: "r".into(),
        transitions: vec![
            ("r".into(), vec!["go".into()], "s".into()),
            ("s".into(), vec!["go".into()], "t".into()),
            ("t".into(), vec!["go".into()], "t".into()),
        ],
        labels: vec![("t".into(), vec!["p".into()])],
    }
    .build()
    .map_err(|e| e.to_string())?;
    let chi: Assignment = [("a".to_string(), Strategy::constant(&g, 0))]
        .into_iter()
        .collect();
    let fd = f::eventually_d(DiscountRef::new("d", exp(1, 2)), f::atom("p"));
    let fp = f::eventually(f::atom("p"));
    let at = |q: &str, phi: &Formula| {
        eval(&g, &chi, g.position_id(q).unwrap(), phi).map_err(|e| e.to_string())
    };
    let (d_s, d_r) = (at("s", &fd)?, at("r", &fd)?);
    let (u_s, u_r) = (at("s", &fp)?, at("r", &fp)?);
    ensure(d_s == rat(1, 2) && d_r == rat(1, 4), || {
        format!("discounted values {d_s}, {d_r}")
    })?;
    ensure(u_s == rat(1, 1) && u_r == rat(1, 1), || {
        format!("plain values {u_s}, {u_r}")
    })?;
    let w = LassoWord::from_names(&[&[], &["p"]], 1);
    let (a, b) = (
        eval_ltld(&w, &fd).map_err(|e| e.to_string())?,
        eval_ltld(&w.stutter(), &fd).map_err(|e| e.to_string())?,
    );
    ensure(a == rat(1, 2) && b == rat(1, 4), || {
        format!("stuttered word {a}, {b}")
    })?;
    Ok("F[exp 1/2] p: 1/2 vs 1/4; F p: 1 vs 1".into())
}

fn parity_oracle() -> Outcome {
    let mut r = rng(11);
    let cases = 250;
    let mut verifier_wins = 0;
    for case in 0..cases {
        let game = random_parity_game(&mut r, 12);
        let sol = solve_parity(&game);
        ensure(verify(&game, &sol), || {
            format!("case {case}: strategy does not verify")
        })?;
        for v in 0..game.len() {
            let brute = brute_force_verifier_wins(&game, v);
            ensure((sol.winner[v] == Player::Verifier) == brute, || {
                format!(
                    "case {case} node {v}: solver {:?}, enumeration {brute}",
                    sol.winner[v]
                )
            })?;
            verifier_wins += brute as usize;
        }
    }
    Ok(format!(
        "{cases} games, every node agrees ({verifier_wins} Verifier nodes)"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("discount table", discount_table),
        ("secretary goal values", secretary_values),
        ("secretary equilibrium", secretary_ne),
        ("negotiation equilibrium", negotiation_ne),
        ("eval vs lasso evaluation", eval_vs_lasso),
        ("bounded until scans", bounded_scan),
        ("automaton membership", apt_soundness),
        ("automaton size trend", finiteness_trend),
        ("extreme values", extreme_values),
        ("stutter discrimination", stutter),
        ("parity solver", parity_oracle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
