use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use unikb::er::{self, DatabaseState, ErElement};
use unikb::frames;
use unikb::kb::{is_model, parse_concept, parse_kb, Interpretation, KnowledgeBase};
use unikb::oo::{self, OoInstance};
use unikb::reason::{analyze_cardinalities, find_model, subsumption_counterexample, ReasoningVerdict, SearchBudget};

#[derive(Parser)]
#[command(name = "unikb", version, about = "Translate class-based schemas into a description logic and reason over them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Kb,
    Frm,
    Ers,
    Oos,
}

#[derive(clap::Args)]
struct Bounds {
    /// Smallest domain size to try.
    #[arg(long, default_value_t = 1)]
    min: usize,
    /// Largest domain size to try.
    #[arg(long, default_value_t = 6)]
    max: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a frame, ER or object-oriented schema into a .kb knowledge base.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        from: Option<Format>,
        /// Leave out the disjointness assertions of ER relationships and domains and merge
        /// assertions sharing a left-hand side.
        #[arg(long)]
        elide_disjointness: bool,
        #[arg(long)]
        pretty: bool,
    },
    /// Check whether a JSON interpretation is a model of a knowledge base.
    CheckModel { kb: PathBuf, interpretation: PathBuf },
    /// Search for a finite model in which a concept is nonempty.
    FindModel {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        pretty: bool,
    },
    /// Search for a finite counterexample to LHS ⊑ RHS.
    Subsumes {
        file: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        pretty: bool,
    },
    /// List cardinality facts that hold in every finite model.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Check a database state (.ers) or instance (.oos) against its schema.
    CheckState {
        schema: PathBuf,
        state: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Map a state or instance into an interpretation and back, reporting any difference.
    Roundtrip { schema: PathBuf, state: PathBuf },
    /// Print the depth of an object-oriented schema and of each declared type.
    Depth { schema: PathBuf },
}

/// Failure to read or interpret the input; exit code 3.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<bool, InputError>;

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn format_of(path: &Path, explicit: Option<Format>) -> Result<Format, InputError> {
    if let Some(f) = explicit {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("kb") => Ok(Format::Kb),
        Some("frm") => Ok(Format::Frm),
        Some("ers") => Ok(Format::Ers),
        Some("oos") => Ok(Format::Oos),
        _ => Err(InputError(format!("{}: cannot tell the format from the extension", path.display()))),
    }
}

/// The knowledge base reasoning runs against for a file of any supported format.
fn load_kb(path: &Path) -> Result<KnowledgeBase, InputError> {
    let text = read(path)?;
    Ok(match format_of(path, None)? {
        Format::Kb => parse_kb(&text)?,
        Format::Frm => frames::translate_theta(&frames::parse_frames(&text)?),
        Format::Ers => er::translate_phi(&er::parse_er(&text)?),
        Format::Oos => oo::reasoning_kb(&oo::parse_oo(&text)?),
    })
}

fn budget(b: &Bounds) -> Result<SearchBudget, InputError> {
    let mut budget = SearchBudget::new(b.min, b.max)?;
    if let Some(t) = b.time {
        let t = Duration::try_from_secs_f64(t).map_err(|e| InputError(format!("--time: {e}")))?;
        budget = budget.with_time_limit(t);
    }
    Ok(budget)
}

fn print_json(v: &Json) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn print_verdict(kb: &KnowledgeBase, v: &ReasoningVerdict, pretty: bool) {
    let facts = analyze_cardinalities(kb);
    if !pretty {
        print_json(&v.to_json(&facts));
        return;
    }
    match v {
        ReasoningVerdict::WitnessFound(i) => {
            println!("witness of size {}", i.size());
            print_interpretation(i);
        }
        ReasoningVerdict::NoModelUpTo(n) => println!("no model up to size {n}"),
        ReasoningVerdict::TimedOut(n) => println!("timed out; no model up to size {n}"),
    }
    if !facts.is_empty() {
        println!("finite-model facts:");
        facts.iter().for_each(|f| println!("  {}", f.describe()));
    }
}

fn print_interpretation(i: &Interpretation) {
    for (c, ext) in i.concepts() {
        if !ext.is_empty() {
            println!("  {c} = {ext:?}");
        }
    }
    for (r, ext) in i.roles() {
        if !ext.is_empty() {
            println!("  {r} = {ext:?}");
        }
    }
}

fn translate(file: &Path, from: Option<Format>, elide: bool, pretty: bool) -> Outcome {
    let text = read(file)?;
    let kb = match format_of(file, from)? {
        Format::Kb => parse_kb(&text)?,
        Format::Frm => frames::translate_theta(&frames::parse_frames(&text)?),
        Format::Ers if elide => er::translate_phi_with(&er::parse_er(&text)?, false).collapsed_kb(),
        Format::Ers => er::translate_phi(&er::parse_er(&text)?),
        Format::Oos => oo::translate_psi(&oo::parse_oo(&text)?),
    };
    if pretty {
        print!("{}", kb.pretty());
    } else {
        print!("{kb}");
    }
    Ok(true)
}

fn check_model(kb: &Path, interp: &Path) -> Outcome {
    let kb = load_kb(kb)?;
    let i: Interpretation = serde_json::from_str(&read(interp)?)?;
    let report = is_model(&kb, &i)?;
    let violations: Vec<Json> = report
        .violations
        .iter()
        .map(|v| json!({"assertion": v.assertion, "lhs": v.lhs, "rhs": v.rhs, "witness": v.witness}))
        .collect();
    print_json(&json!({"model": report.holds(), "violations": violations}));
    Ok(report.holds())
}

fn check_state(schema: &Path, state: &Path, pretty: bool) -> Outcome {
    let text = read(schema)?;
    let state = read(state)?;
    let (legal, report) = match format_of(schema, None)? {
        Format::Ers => {
            let s = er::parse_er(&text)?;
            let b: DatabaseState = serde_json::from_str(&state)?;
            let r = er::check_legal(&s, &b)?;
            (r.holds(), serde_json::to_value(&r.violations)?)
        }
        Format::Oos => {
            let s = oo::parse_oo(&text)?;
            let j: OoInstance = serde_json::from_str(&state)?;
            let r = oo::check_legal_instance(&s, &j)?;
            (r.holds(), serde_json::to_value(&r.violations)?)
        }
        _ => return Err(InputError("check-state needs an .ers or .oos schema".into())),
    };
    if pretty {
        println!("{}", if legal { "legal" } else { "illegal" });
        for v in report.as_array().into_iter().flatten() {
            println!("  {}", v["message"].as_str().unwrap_or_default());
        }
    } else {
        print_json(&json!({"legal": legal, "violations": report}));
    }
    Ok(legal)
}

fn roundtrip(schema: &Path, state: &Path) -> Outcome {
    let text = read(schema)?;
    let state = read(state)?;
    let mut diffs: Vec<String> = Vec::new();
    let (model, extra) = match format_of(schema, None)? {
        Format::Ers => {
            let s = er::parse_er(&text)?;
            let b: DatabaseState = serde_json::from_str(&state)?;
            let emb = er::alpha_er(&s, &b)?;
            let model = is_model(&er::translate_phi(&s), &emb.interpretation)?.holds();
            let descriptive = er::is_relation_descriptive(&s, &emb.interpretation).is_empty();
            let names: Vec<String> = emb
                .elements
                .iter()
                .enumerate()
                .map(|(k, e)| match e {
                    ErElement::Individual(x) => x.clone(),
                    _ => format!("#{k}"),
                })
                .collect();
            let back = er::beta_er_with_names(&s, &emb.interpretation, &names)?.state;
            for e in s.entities().keys() {
                if b.entity(e) != back.entity(e) {
                    diffs.push(format!("entity {e}: {:?} became {:?}", b.entity(e), back.entity(e)));
                }
            }
            for a in s.attributes() {
                if b.attr(&a).len() != back.attr(&a).len() {
                    diffs.push(format!("attribute {a}: {} pairs became {}", b.attr(&a).len(), back.attr(&a).len()));
                }
            }
            for r in s.relationships().keys() {
                if b.rel(r) != back.rel(r) {
                    diffs.push(format!("relationship {r}: {:?} became {:?}", b.rel(r), back.rel(r)));
                }
            }
            (model, json!({"relation_descriptive": descriptive}))
        }
        Format::Oos => {
            let s = oo::parse_oo(&text)?;
            let j: OoInstance = serde_json::from_str(&state)?;
            let emb = oo::alpha_oo(&s, &j)?;
            let model = is_model(&oo::translate_psi(&s), &emb.interpretation)?.holds();
            let names: Vec<String> = emb.values.iter().map(|v| v.to_string()).collect();
            let back = oo::beta_oo_with_names(&s, &emb.interpretation, &names)?.instance;
            if back.oids != j.oids {
                diffs.push(format!("objects: {:?} became {:?}", j.oids, back.oids));
            }
            for c in s.classes() {
                if j.class(c) != back.class(c) {
                    diffs.push(format!("class {c}: {:?} became {:?}", j.class(c), back.class(c)));
                }
            }
            for (o, v) in &j.rho {
                if back.rho.get(o) != Some(v) {
                    diffs.push(format!("value of {o}: {v} changed"));
                }
            }
            (model, json!({}))
        }
        _ => return Err(InputError("roundtrip needs an .ers or .oos schema".into())),
    };
    let mut out = json!({"model": model, "differences": diffs});
    if let (Some(o), Some(e)) = (out.as_object_mut(), extra.as_object()) {
        o.extend(e.clone());
    }
    print_json(&out);
    Ok(model && diffs.is_empty())
}

fn depth(schema: &Path) -> Outcome {
    let s = oo::parse_oo(&read(schema)?)?;
    println!("schema depth: {}", s.depth());
    for d in s.decls() {
        println!("{}: {}", d.name, d.ty.depth());
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Translate { file, from, elide_disjointness, pretty } => translate(&file, from, elide_disjointness, pretty),
        Command::CheckModel { kb, interpretation } => check_model(&kb, &interpretation),
        Command::FindModel { file, goal, bounds, pretty } => {
            let kb = load_kb(&file)?;
            let goal = parse_concept(&goal, &kb)?;
            let v = find_model(&kb, &goal, budget(&bounds)?)?;
            print_verdict(&kb, &v, pretty);
            Ok(v.is_witness())
        }
        Command::Subsumes { file, lhs, rhs, bounds, pretty } => {
            let kb = load_kb(&file)?;
            let (c1, c2) = (parse_concept(&lhs, &kb)?, parse_concept(&rhs, &kb)?);
            let v = subsumption_counterexample(&kb, &c1, &c2, budget(&bounds)?)?;
            print_verdict(&kb, &v, pretty);
            Ok(matches!(v, ReasoningVerdict::NoModelUpTo(_)))
        }
        Command::Analyze { file, pretty } => {
            let kb = load_kb(&file)?;
            let facts = analyze_cardinalities(&kb);
            if pretty {
                facts.iter().for_each(|f| println!("{}", f.describe()));
            } else {
                print_json(&serde_json::to_value(&facts)?);
            }
            Ok(true)
        }
        Command::CheckState { schema, state, pretty } => check_state(&schema, &state, pretty),
        Command::Roundtrip { schema, state } => roundtrip(&schema, &state),
        Command::Depth { schema } => depth(&schema),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
