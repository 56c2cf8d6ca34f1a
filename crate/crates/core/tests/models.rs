use std::fs;
use std::path::PathBuf;

use sld_core::concepts::{default_negotiation, gen_secretary, secretary_strategy};
use sld_core::eval::eval;
use sld_core::rational::rat;
use sld_core::textio::{parse_assignment, parse_formula, parse_model, render_model};

fn shipped(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn shipped_models_are_the_generated_ones() {
    assert_eq!(
        parse_model(&shipped("secretary.sld")).unwrap(),
        gen_secretary()
    );
    assert_eq!(
        parse_model(&shipped("negotiation.sld")).unwrap(),
        default_negotiation()
    );
    assert_eq!(render_model(&gen_secretary()), shipped("secretary.sld"));
    assert_eq!(
        render_model(&default_negotiation()),
        shipped("negotiation.sld")
    );
}

#[test]
fn secretary_model_shape() {
    let m = parse_model(&shipped("secretary.sld")).unwrap();
    let g = &m.cgs;
    assert_eq!(g.positions(), ["q0", "q1", "q2", "q3", "q4", "q5", "q6"]);
    assert_eq!(g.agents(), ["Ann", "Bob"]);
    assert_eq!(g.actions(), ["y", "n"]);
}

#[test]
fn shipped_assignments_are_the_voting_strategies() {
    let m = gen_secretary();
    let g = &m.cgs;
    let abc = parse_assignment(&shipped("sigma_abc_abc.assign"), g)
        .unwrap()
        .assignment;
    let bc = parse_assignment(&shipped("sigma_bc_abc.assign"), g)
        .unwrap()
        .assignment;
    for who in ["Ann", "Bob"] {
        for q in ["q0", "q1", "q3"] {
            let p = g.position_id(q).unwrap();
            assert_eq!(abc[who].action(p), secretary_strategy(g, 0).action(p));
        }
    }
    for q in ["q0", "q1", "q3"] {
        let p = g.position_id(q).unwrap();
        assert_eq!(bc["Ann"].action(p), secretary_strategy(g, 1).action(p));
    }
}

#[test]
fn shipped_formulas_parse_against_the_model() {
    let m = gen_secretary();
    let bob = parse_formula(&shipped("bob_hires.formula"), &m.env()).unwrap();
    let ann = parse_formula(&shipped("ann_prefers_b.formula"), &m.env()).unwrap();
    assert_eq!(&bob, m.goal("Bob").unwrap());
    assert_eq!(&ann, m.goal("Ann").unwrap());
    let chi = parse_assignment(&shipped("sigma_abc_abc.assign"), &m.cgs)
        .unwrap()
        .assignment;
    assert_eq!(
        eval(&m.cgs, &chi, m.cgs.initial(), &bob).unwrap(),
        rat(1, 2)
    );
}

#[test]
fn negotiation_assignment_loads() {
    let m = default_negotiation();
    let file = parse_assignment(&shipped("negotiation_ne.assign"), &m.cgs).unwrap();
    assert_eq!(file.default_action, "acc");
    assert_eq!(file.assignment.len(), 2);
}
