use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn sld(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sld"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn kv(o: &Output, key: &str) -> Option<String> {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn secretary_equilibrium_exists() {
    let o = sld(&[
        "check",
        "--model",
        "secretary",
        "--formula",
        "phiNE-hat",
        "--threshold",
        "1/1000",
        "--cmp",
        "ge",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: true"));
}

#[test]
fn bob_value_under_eager_voting() {
    let o = sld(&[
        "eval",
        "--model",
        "secretary",
        "--formula",
        "psiBob",
        "--assign",
        "sigma_abc_abc",
        "--output",
        "kv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(kv(&o, "value").as_deref(), Some("1/2"));
}

#[test]
fn shipped_files_give_the_same_value() {
    let o = sld(&[
        "eval",
        "--model",
        &model("secretary.sld"),
        "--formula",
        &model("bob_hires.formula"),
        "--assign",
        &model("sigma_abc_abc.assign"),
        "--output",
        "kv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(kv(&o, "value").as_deref(), Some("1/2"));
    assert_eq!(kv(&o, "unlisted_positions_play").as_deref(), Some("y"));
}

#[test]
fn failing_check_exits_one() {
    let o = sld(&[
        "check",
        "--model",
        "secretary",
        "--formula",
        "psiBob",
        "--assign",
        "sigma_abc_abc",
        "--threshold",
        "1/2",
        "--cmp",
        "gt",
        "--output",
        "kv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(kv(&o, "verdict").as_deref(), Some("false"));
}

#[test]
fn kv_and_text_verdicts_agree() {
    let base = [
        "check",
        "--model",
        "secretary",
        "--formula",
        "E x . (Ann, Bob; x, x) F[dBob] onehired",
        "--threshold",
        "1/3",
    ];
    let text = sld(&base);
    let mut with_kv = base.to_vec();
    with_kv.extend(["--output", "kv"]);
    let kvo = sld(&with_kv);
    assert_eq!(text.status.code(), kvo.status.code());
    let verdict = kv(&kvo, "verdict").unwrap();
    assert!(stdout(&text).contains(&format!("verdict: {verdict}")));
}

#[test]
fn unparsable_formula_is_located() {
    let o = sld(&[
        "check",
        "--model",
        "secretary",
        "--formula",
        "F (onehired",
        "--threshold",
        "1/2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("<formula>:1:"), "{}", stderr(&o));
}

#[test]
fn decimal_threshold_is_rejected() {
    let o = sld(&[
        "check",
        "--model",
        "secretary",
        "--formula",
        "F onehired",
        "--threshold",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_option_is_a_usage_error() {
    let o = sld(&["check", "--model", "secretary", "--formula", "F onehired"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_errors_are_located_or_classified() {
    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = dir.path().join("bad.sld");
    std::fs::write(
        &bad_syntax,
        "agents a b\nactions x\npositions q\ninit q\ntrans q x -> q\n",
    )
    .unwrap();
    let o = sld(&[
        "eval",
        "--model",
        bad_syntax.to_str().unwrap(),
        "--formula",
        "true",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.sld:5:"), "{}", stderr(&o));

    let partial = dir.path().join("partial.sld");
    std::fs::write(
        &partial,
        "agents a\nactions x y\npositions q r\ninit q\ntrans q x -> r\ntrans r _ -> r\n",
    )
    .unwrap();
    let o = sld(&[
        "eval",
        "--model",
        partial.to_str().unwrap(),
        "--formula",
        "true",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn negotiation_equilibrium() {
    let o = sld(&[
        "ne-check",
        "--model",
        &model("negotiation.sld"),
        "--assign",
        &model("negotiation_ne.assign"),
        "--output",
        "kv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(kv(&o, "Alice.value").as_deref(), Some("2/3"));
    assert_eq!(kv(&o, "Beth.value").as_deref(), Some("1/3"));
}

#[test]
fn secretary_profile_that_is_not_an_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.assign");
    std::fs::write(
        &f,
        "strategy Ann: q0->y q1->y q3->y\nstrategy Bob: q0->n q1->n q3->y\n",
    )
    .unwrap();
    let o = sld(&[
        "ne-check",
        "--model",
        "secretary",
        "--assign",
        f.to_str().unwrap(),
        "--output",
        "kv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(kv(&o, "improving_agents").as_deref(), Some("Bob"));
}

#[test]
fn ne_find_reports_a_profile() {
    let o = sld(&["ne-find", "--model", "secretary", "--output", "kv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(kv(&o, "Ann.strategy").is_some());
}

#[test]
fn automaton_dump_and_membership() {
    let o = sld(&[
        "apt-build",
        "--model",
        "secretary",
        "--formula",
        "F[dBob] onehired",
        "--threshold",
        "1/8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("apt states=4 initial=s0"));
    assert!(out.contains("states: 4"));

    let member = |t: &str| {
        sld(&[
            "apt-member",
            "--model",
            "secretary",
            "--formula",
            "F[dBob] onehired",
            "--threshold",
            t,
            "--assign",
            "sigma_abc_abc",
        ])
        .status
        .code()
    };
    assert_eq!(member("1/5"), Some(0));
    assert_eq!(member("3/5"), Some(1));
}

#[test]
fn hyperbolic_discount_has_no_automaton() {
    let o = sld(&[
        "apt-build",
        "--model",
        "secretary",
        "--formula",
        "F[dAnn] onehired",
        "--threshold",
        "1/2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generated_models_match_shipped_files() {
    for name in ["secretary", "negotiation"] {
        let o = sld(&["gen", name]);
        assert_eq!(o.status.code(), Some(0));
        let shipped = std::fs::read_to_string(models().join(format!("{name}.sld"))).unwrap();
        assert_eq!(stdout(&o), shipped, "{name}");
    }
}

#[test]
fn gen_writes_a_loadable_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n1.sld");
    let o = sld(&[
        "gen",
        "negotiation",
        "--offer",
        "1/2:1/2",
        "--depth",
        "1",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = sld(&[
        "eval",
        "--model",
        path.to_str().unwrap(),
        "--formula",
        "E x . (Alice, Beth; x, x) F half_Alice",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn runs_are_bit_identical() {
    let args = ["ne-find", "--model", "negotiation", "--output", "kv"];
    let a = sld(&args);
    let b = sld(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
