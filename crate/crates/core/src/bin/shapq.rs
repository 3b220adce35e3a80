use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use shapq::aggregates::{eval, parse_aggregate, parse_value_function};
use shapq::corpus::{random_instance, rng, DbShape};
use shapq::cq::parse_fact;
use shapq::exec::{set_mode, ExecMode};
use shapq::gadgets::embed::embed_qxyy;
use shapq::gadgets::permanent::{matrix_sets, permanent, recover_disjoint_counts, DupVariant};
use shapq::gadgets::setcover::{
    build_qnt_setcover_db, qnt_player, qnt_query, recover_cover_counts_avg, SetCoverInstance,
};
use shapq::manifest::{manifest_json, parse_manifest};
use shapq::model::{format_decimal, format_exact, parse_rational, Provenance};
use shapq::shapley::axioms::check_axioms;
use shapq::shapley::bruteforce::{bruteforce_all, default_cap, shapley_bruteforce_capped, Game};
use shapq::shapley::dispatch::{dispatch, route, Engine, Options};
use shapq::shapley::Score;
use shapq::{parse_cq, AggregateQuery, Database, Error, Fact, Rational};

#[derive(Parser)]
#[command(name = "shapq", version, about = "Exact Shapley values of facts for aggregate queries")]
struct Cli {
    /// Run every parallel section sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    /// Omit wall-clock timings so output is byte-for-byte reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shapley (or Banzhaf) value of one fact or of every endogenous fact.
    Shapley(ShapleyArgs),
    /// Print the hierarchy class of a query and the tractable engine per aggregate.
    Classify {
        #[arg(long)]
        query: String,
    },
    /// Check efficiency, null player and symmetry on the computed values.
    Axioms(QueryArgs),
    /// Hardness reductions run forward on concrete instances.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Print a random routed instance as JSON.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = EngineArg::Avgqnt)]
        engine: EngineArg,
    },
}

#[derive(Args)]
struct QueryArgs {
    /// Conjunctive query, e.g. `Q(x) :- R(x,y), S(x).`
    #[arg(long)]
    query: String,
    /// sum, count, cdist, min, max, avg, median, dup or qnt:a/b
    #[arg(long)]
    agg: String,
    /// id:i, relu:i, gt:t:i or const:c
    #[arg(long)]
    tau: String,
    /// JSON database manifest.
    #[arg(long)]
    db: String,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Fall back to coalition enumeration when no tractable engine applies.
    #[arg(long)]
    allow_bruteforce: bool,
    /// Brute-force limit on endogenous facts.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct ShapleyArgs {
    #[command(flatten)]
    q: QueryArgs,
    /// Fact such as `R(1,2)`; every endogenous fact when absent.
    #[arg(long)]
    fact: Option<String>,
    /// Banzhaf value instead of Shapley.
    #[arg(long)]
    banzhaf: bool,
    /// Also run brute force and report agreement.
    #[arg(long)]
    compare: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Bruteforce,
    Boolean,
    Sumcount,
    Maxmin,
    Cdist,
    Avgqnt,
    Dup,
}

impl EngineArg {
    fn engine(self) -> Option<Engine> {
        Some(match self {
            EngineArg::Auto => return None,
            EngineArg::Bruteforce => Engine::BruteForce,
            EngineArg::Boolean => Engine::Boolean,
            EngineArg::Sumcount => Engine::SumCount,
            EngineArg::Maxmin => Engine::MaxMin,
            EngineArg::Cdist => Engine::CDist,
            EngineArg::Avgqnt => Engine::AvgQnt,
            EngineArg::Dup => Engine::Dup,
        })
    }
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// Recover cover counts from Avg Shapley values.
    SetcoverAvg {
        /// JSON `{"n": 4, "sets": [[1,2],[3,4]]}`
        #[arg(long)]
        instance: String,
    },
    /// Compare quantile Shapley values with the set-cover game.
    SetcoverQnt {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value = "1/2")]
        q: String,
    },
    /// Recover the permanent of a 0/1 matrix through has-duplicates.
    PermanentDup {
        /// JSON `{"matrix": [[1,0],[1,1]]}`
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
    },
    /// Embed a `Q(x) :- R(x,y), S(y)` database into another query.
    Embed {
        #[arg(long)]
        query: String,
        #[arg(long)]
        agg: String,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        db: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Relu,
}

#[derive(Deserialize)]
struct MatrixFile {
    matrix: Vec<Vec<u8>>,
}

/// Failures carry their exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Syntax { .. }
            | Error::Parse(_)
            | Error::InvalidAggregate(_)
            | Error::InvalidValueFunction(_)
            | Error::UnsafeHead(_)
            | Error::UnknownVariable(_)
            | Error::ArityMismatch { .. }
            | Error::DuplicateFact(_)
            | Error::UnknownRelation(_)
            | Error::SchemaMismatch(_)
            | Error::FactAbsent(_)
            | Error::FactNotEndogenous(_) => 2,
            Error::IntractableClass(_)
            | Error::SelfJoin(_)
            | Error::NotAllHierarchical
            | Error::NotQHierarchical
            | Error::NotExistsHierarchical
            | Error::NotSQHierarchical
            | Error::NotConnectedSQ
            | Error::EngineNotApplicable(..) => 3,
            Error::InstanceTooLarge { .. } => 4,
            _ => 5,
        };
        Failure(code, e.to_string())
    }
}

type Out = Result<(), Failure>;

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(2, format!("{path}: {e}")))
}

fn value(v: &Rational) -> String {
    format!("{}\t{}", format_exact(v), format_decimal(v, 6))
}

fn load(q: &QueryArgs) -> Result<(AggregateQuery, Database), Failure> {
    let cq = parse_cq(&q.query)?;
    let a = AggregateQuery::new(parse_aggregate(&q.agg)?, parse_value_function(&q.tau)?, cq)?;
    let d = parse_manifest(&read(&q.db)?)?;
    Ok((a, d))
}

fn options(q: &QueryArgs, score: Score) -> Options {
    Options {
        allow_bruteforce: q.allow_bruteforce,
        cap: q.cap.unwrap_or_else(default_cap),
        score,
    }
}

fn compute(q: &QueryArgs, a: &AggregateQuery, d: &Database, f: &Fact, opts: &Options) -> Result<(Rational, Engine), Failure> {
    match q.engine.engine() {
        None => Ok(dispatch(a, d, f, opts)?),
        Some(e) => {
            if !d.is_endogenous(f) {
                return Err(Error::FactNotEndogenous(f.to_string()).into());
            }
            Ok((shapq::shapley::dispatch::run_engine(e, a, d, f, opts)?, e))
        }
    }
}

fn cmd_shapley(args: &ShapleyArgs, timing: bool) -> Out {
    let (a, d) = load(&args.q)?;
    let score = if args.banzhaf { Score::Banzhaf } else { Score::Shapley };
    let opts = options(&args.q, score);
    let facts = match &args.fact {
        Some(t) => vec![parse_fact(t)?],
        None => d.endogenous(),
    };
    let start = Instant::now();
    let mut engine = None;
    let mut rows = Vec::new();
    for f in &facts {
        let (v, e) = compute(&args.q, &a, &d, f, &opts)?;
        engine = Some(e);
        rows.push((f, v));
    }
    let elapsed = start.elapsed();
    println!("query\t{a}");
    println!("engine\t{}", engine.map_or("none".to_string(), |e| e.to_string()));
    println!("score\t{}", if args.banzhaf { "banzhaf" } else { "shapley" });
    let mut agree = true;
    for (f, v) in &rows {
        if args.compare {
            let game = Game::new(&a, &d, opts.cap)?;
            let oracle = game.score(game.index_of(f).expect("endogenous"), score);
            let ok = oracle == *v;
            agree &= ok;
            println!("{f}\t{}\toracle {}\t{}", value(v), format_exact(&oracle), if ok { "agree" } else { "DIFFER" });
        } else {
            println!("{f}\t{}", value(v));
        }
    }
    if timing {
        println!("time_ms\t{:.3}", elapsed.as_secs_f64() * 1e3);
    }
    if agree {
        Ok(())
    } else {
        Err(Failure(5, "engine and oracle differ".into()))
    }
}

fn cmd_classify(query: &str) -> Out {
    let q = parse_cq(query)?;
    let rep = q.class_report();
    println!("query\t{q}");
    println!("class\t{}", rep.class);
    let show = |w: &Option<(String, String)>| match w {
        None => "yes".to_string(),
        Some((x, y)) => format!("no ({x}, {y})"),
    };
    println!("exists-hierarchical\t{}", show(&rep.exists_hierarchical));
    println!("all-hierarchical\t{}", show(&rep.all_hierarchical));
    println!("q-hierarchical\t{}", show(&rep.q_hierarchical));
    println!("sq-hierarchical\t{}", show(&rep.sq_hierarchical));
    if let Some(r) = q.self_join() {
        println!("self-join\t{r}");
    }
    let tau = match q.slots.is_empty() {
        true => "const:1",
        false => "id:1",
    };
    for agg in ["sum", "count", "cdist", "min", "max", "avg", "median", "dup"] {
        let a = AggregateQuery::new(parse_aggregate(agg)?, parse_value_function(tau)?, q.clone())?;
        let verdict = match route(&a) {
            Ok(e) => e.to_string(),
            Err(e) => format!("refused: {e}"),
        };
        println!("{agg}\t{verdict}");
    }
    Ok(())
}

fn all_values(q: &QueryArgs, a: &AggregateQuery, d: &Database) -> Result<(BTreeMap<Fact, Rational>, Option<Engine>), Failure> {
    let opts = options(q, Score::Shapley);
    let mut out = BTreeMap::new();
    let mut engine = None;
    for f in d.endogenous() {
        let (v, e) = compute(q, a, d, &f, &opts)?;
        engine = Some(e);
        out.insert(f, v);
    }
    Ok((out, engine))
}

fn cmd_axioms(q: &QueryArgs) -> Out {
    let (a, d) = load(q)?;
    let (values, engine) = all_values(q, &a, &d)?;
    let rep = check_axioms(&a, &d, &values)?;
    println!("query\t{a}");
    println!("engine\t{}", engine.map_or("none".to_string(), |e| e.to_string()));
    println!(
        "efficiency\t{}\texpected {}\ttotal {}",
        if rep.efficiency_holds() { "ok" } else { "FAIL" },
        format_exact(&rep.efficiency_expected),
        format_exact(&rep.efficiency_total)
    );
    println!("null-player\t{}", if rep.null_player_failures.is_empty() { "ok".to_string() } else { format!("FAIL {:?}", rep.null_player_failures.iter().map(|f| f.to_string()).collect::<Vec<_>>()) });
    let bad = rep.symmetric_pairs.iter().filter(|p| !p.2).count();
    println!("symmetry\t{}\t{} pairs", if bad == 0 { "ok" } else { "FAIL" }, rep.symmetric_pairs.len());
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure(5, "axiom check failed".into()))
    }
}

fn oracle(a: &AggregateQuery, d: &Database, f: &Fact) -> shapq::Result<Rational> {
    shapley_bruteforce_capped(a, d, f, default_cap())
}

fn verdict(ok: bool) -> Out {
    println!("verdict\t{}", if ok { "verified" } else { "MISMATCH" });
    if ok {
        Ok(())
    } else {
        Err(Failure(5, "gadget verification failed".into()))
    }
}

fn cmd_gadget(g: &GadgetCmd) -> Out {
    match g {
        GadgetCmd::SetcoverAvg { instance } => {
            let inst: SetCoverInstance = serde_json::from_str(&read(instance)?).map_err(|e| Failure(2, e.to_string()))?;
            let inst = SetCoverInstance::new(inst.n, inst.sets)?;
            let z = recover_cover_counts_avg(&inst, &oracle)?;
            let direct = inst.cover_counts();
            let mut ok = true;
            for (i, row) in z.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(format_exact).collect();
                println!("Z[{i}]\t{}", cells.join(" "));
                ok &= row.iter().zip(&direct[i]).all(|(a, b)| *a == Rational::from_integer(b.clone()));
            }
            let covers: Rational = z[inst.n].iter().sum();
            println!("covers\t{}", format_exact(&covers));
            println!("enumerated\t{}", inst.count_covers());
            verdict(ok)
        }
        GadgetCmd::SetcoverQnt { instance, q } => {
            let inst: SetCoverInstance = serde_json::from_str(&read(instance)?).map_err(|e| Failure(2, e.to_string()))?;
            let inst = SetCoverInstance::new(inst.n, inst.sets)?;
            let q = parse_rational(q)?;
            let d = build_qnt_setcover_db(&inst, &q)?;
            let a = qnt_query(&q)?;
            let mut ok = true;
            for i in 0..inst.m() {
                let got = oracle(&a, &d, &qnt_player(i))?;
                let want = inst.cover_game_shapley(i);
                ok &= got == want;
                println!("{}\t{}\tgame {}", qnt_player(i), value(&got), format_exact(&want));
            }
            verdict(ok)
        }
        GadgetCmd::PermanentDup { instance, variant } => {
            let m: MatrixFile = serde_json::from_str(&read(instance)?).map_err(|e| Failure(2, e.to_string()))?;
            let matrix: Vec<Vec<bool>> = m.matrix.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect();
            let inst = matrix_sets(&matrix)?;
            let variant = match variant {
                VariantArg::Full => DupVariant::Full,
                VariantArg::Relu => DupVariant::Relu,
            };
            let z = recover_disjoint_counts(&inst, variant, &oracle)?;
            let cells: Vec<String> = z.iter().map(format_exact).collect();
            println!("Z\t{}", cells.join(" "));
            let direct = permanent(&matrix)?;
            let n = matrix.len();
            let got = z.get(n).cloned().unwrap_or_default();
            println!("recovered\t{}", format_exact(&got));
            println!("permanent\t{direct}");
            verdict(got == Rational::from_integer(direct))
        }
        GadgetCmd::Embed { query, agg, tau, db } => {
            let q0 = parse_cq(query)?;
            let alpha = parse_aggregate(agg)?;
            let tau = parse_value_function(tau)?;
            let d = parse_manifest(&read(db)?)?;
            let src = AggregateQuery::new(alpha.clone(), tau.clone(), shapq::gadgets::setcover::qxyy())?;
            let e = embed_qxyy(&q0, &alpha, &tau, &d)?;
            println!("query\t{}", e.query);
            println!("witness\t{} {}", e.x0, e.y0);
            let before = bruteforce_all(&src, &d, Score::Shapley, default_cap())?;
            let after = bruteforce_all(&e.query, &e.db, Score::Shapley, default_cap())?;
            let mut ok = true;
            for (f, v) in &before {
                let img = &e.h[f];
                let w = &after[img];
                ok &= v == w;
                println!("{f}\t{img}\t{}\t{}", format_exact(v), format_exact(w));
            }
            let json: serde_json::Value = serde_json::from_str(&manifest_json(&e.db)?).expect("valid json");
            println!("database\t{json}");
            verdict(ok)
        }
    }
}

fn cmd_generate(seed: u64, engine: EngineArg) -> Out {
    let engine = engine.engine().unwrap_or(Engine::AvgQnt);
    let (a, d) = random_instance(&mut rng(seed), engine, &DbShape::default());
    let exo = d.filter(|_, p| p == Provenance::Exogenous);
    let doc = serde_json::json!({
        "query": a.query.to_string(),
        "agg": a.alpha.to_string(),
        "tau": a.tau.to_string(),
        "engine": engine.tag(),
        "value": format_exact(&eval(&a, &d)?),
        "exogenous_value": format_exact(&eval(&a, &exo)?),
        "db": serde_json::from_str::<serde_json::Value>(&manifest_json(&d)?).expect("valid json"),
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.sequential {
        set_mode(ExecMode::Sequential);
    }
    let res = match &cli.cmd {
        Cmd::Shapley(args) => cmd_shapley(args, !cli.no_timing),
        Cmd::Classify { query } => cmd_classify(query),
        Cmd::Axioms(q) => cmd_axioms(q),
        Cmd::Gadget(g) => cmd_gadget(g),
        Cmd::Generate { seed, engine } => cmd_generate(*seed, *engine),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
