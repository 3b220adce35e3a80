use std::path::PathBuf;
use std::process::{Command, Output};

fn shapq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapq")).args(args).output().unwrap()
}

fn write(name: &str, body: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const DB: &str = r#"{"schema":[{"name":"R","arity":2},{"name":"S","arity":1}],
 "relations":{"R":[{"tuple":[1,1],"endogenous":true},{"tuple":[2,1],"endogenous":true},{"tuple":[3,2],"endogenous":false}],
  "S":[{"tuple":[1],"endogenous":true},{"tuple":[2],"endogenous":true},{"tuple":[3],"endogenous":true}]}}"#;

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn shapley_is_reproducible_without_timing() {
    let db = write("db.json", DB);
    let args = ["--no-timing", "shapley", "--query", "Q(x) :- R(x,y), S(y).", "--agg", "max", "--tau", "id:1", "--db", &db, "--compare"];
    let a = shapq(&args);
    let b = shapq(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.contains("engine\tmaxmin"));
    assert!(out.contains("S(2)\t9/4\t2.250000\toracle 9/4\tagree"));
    assert!(!out.contains("time_ms"));
    let seq = shapq(&[&["--sequential"][..], &args[..]].concat());
    assert_eq!(seq.stdout, a.stdout);
}

#[test]
fn exit_codes() {
    let db = write("db2.json", DB);
    let parse = shapq(&["shapley", "--query", "Q(x :- R(x)", "--agg", "max", "--tau", "id:1", "--db", &db]);
    assert_eq!(parse.status.code(), Some(2));
    let hard = ["shapley", "--query", "Q(x) :- R(x,y), S(y).", "--agg", "avg", "--tau", "id:1", "--db", &db];
    assert_eq!(shapq(&hard).status.code(), Some(3));
    let forced = shapq(&[&hard[..], &["--allow-bruteforce"][..]].concat());
    assert!(forced.status.success());
    assert!(stdout(&forced).contains("engine\tbruteforce"));
    let capped = shapq(&[&hard[..], &["--allow-bruteforce", "--cap", "3"][..]].concat());
    assert_eq!(capped.status.code(), Some(4));
    let missing = shapq(&["shapley", "--query", "Q(x) :- R(x).", "--agg", "max", "--tau", "id:1", "--db", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn single_fact_and_banzhaf() {
    let db = write("db3.json", DB);
    let o = shapq(&["--no-timing", "shapley", "--query", "Q(x) :- R(x,y), S(y).", "--agg", "count", "--tau", "const:1", "--db", &db, "--fact", "S(2)", "--banzhaf", "--compare"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("score\tbanzhaf"));
    assert_eq!(out.lines().filter(|l| l.starts_with("S(2)")).count(), 1);
    assert!(out.contains("agree"));
}

#[test]
fn classify_and_axioms() {
    let o = shapq(&["classify", "--query", "Q(x,y) :- R(x,y), S(x)."]);
    let out = stdout(&o);
    assert!(out.contains("class\tq-hierarchical"));
    assert!(out.contains("dup\trefused"));
    assert!(out.contains("avg\tavgqnt"));
    let db = write("db4.json", DB);
    let o = shapq(&["axioms", "--query", "Q(x) :- R(x,y), S(y).", "--agg", "cdist", "--tau", "id:1", "--db", &db]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("efficiency\tok"));
}

#[test]
fn gadgets() {
    let sc = write("sc.json", r#"{"n":4,"sets":[[1,2],[3,4],[2,3]]}"#);
    let o = shapq(&["gadget", "setcover-avg", "--instance", &sc]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("covers\t2/1"));
    let o = shapq(&["gadget", "setcover-qnt", "--instance", &sc, "--q", "1/3"]);
    assert!(o.status.success());
    let m = write("m.json", r#"{"matrix":[[1,1],[1,1]]}"#);
    let o = shapq(&["gadget", "permanent-dup", "--instance", &m]);
    assert!(stdout(&o).contains("recovered\t2/1"));
    assert!(o.status.success());
    let db = write("db5.json", DB);
    let o = shapq(&["gadget", "embed", "--query", "Q(x) :- P(y), R(x,y,z), S(y,v).", "--agg", "dup", "--tau", "id:1", "--db", &db]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("verdict\tverified"));
}

#[test]
fn generate_is_seeded() {
    let a = shapq(&["generate", "--seed", "5", "--engine", "dup"]);
    let b = shapq(&["generate", "--seed", "5", "--engine", "dup"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["engine"], "dup");
    assert!(v["db"]["relations"].is_object());
}
