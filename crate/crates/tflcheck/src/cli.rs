//! Command-line interface: model validation, translation to the hub
//! representation, model checking with the denotational and game engines,
//! bisimulation queries, structural classification, folding of CCS
//! programs, and interactive game replay.

use std::io::BufRead;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bisim::{self, Mode, Rel, Tri};
use crate::ccs::{ccs_to_net, parse_ccs, relabel_theta};
use crate::classify::{classify_confusion, is_free_choice, is_free_choice_net, is_xi_system};
use crate::error::{Error, Result};
use crate::es::{es_to_tsi, parse_es, validate_es};
use crate::folding::{fold, verify_fold, CcsGenerator, CcsOracle};
use crate::game::mcgame::{build_mc_game, playout_losses, replay, solve_mc, DEFAULT_GAME_CAP};
use crate::game::Player;
use crate::logic::{parse_formula, Formula};
use crate::net::{net_to_tsi, parse_net, validate_net};
use crate::semantics::{Analysis, Valuation};
use crate::tsi::{parse_tsi, print_tsi, validate_tsi, Tsi};

const FORMAT_REFERENCE: &str = "\
Model files are recognised by extension and translated to TSI where needed.

  .tsi   state <id> [init] | trans <id> <src> <label> <dst> | indep <t> <t>
  .net   place <id> [marked] | action <id> <label> | arc <from> -> <to>
  .es    event <id> <label> | causal <a> < <b> | conflict <a> # <b>
  .ccs   Name = term and root = term, with 0, a.T, T + T, T | T, Name

Formulas: tt ff Z !f f&f f|f <a>c f <a>nc f [a]c f [a]nc f <a> f [a] f
          <co> f [co] f mu Z. f nu Z. f, parentheses; `co` is reserved.";

#[derive(Parser)]
#[command(
    name = "tflcheck",
    version,
    about = "Model checking and bisimulation for concurrent systems with partial order semantics",
    after_help = FORMAT_REFERENCE
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Denot,
    Game,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelArg {
    Sb,
    Hpb,
    Hhpb,
    Thpb,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check a model's axioms (TSI), safety (net), or order axioms (ES)
    Validate {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Translate a net, event structure or CCS program into a TSI
    Translate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Evaluate a formula on a model with the denotational and/or game engine
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Decide a bisimulation between two models
    Bisim {
        #[arg(long, value_enum)]
        rel: RelArg,
        /// exact | bounded=K | local
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Report auto-concurrency, confusion, free-choice and Xi membership
    Classify {
        model: PathBuf,
    },
    /// Fold a CCS program into a finite TSI, or verify a folding
    Fold {
        #[arg(long)]
        ccs: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        formulas: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Replay a solved model-checking game interactively
    Play {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        formula_file: Option<PathBuf>,
    },
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

fn with_context(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, col, msg } => {
            Error::Model(format!("{}:{line}:{col}: {msg}", path.display()))
        }
        other => other,
    }
}

/// Loads any supported model file and translates it to a TSI.
pub fn load_tsi(path: &Path, cap: usize) -> Result<Tsi> {
    let text = read_file(path)?;
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("");
    let out = match ext {
        "tsi" => parse_tsi(&text),
        "net" => parse_net(&text).and_then(|n| net_to_tsi(&n, cap)),
        "es" => parse_es(&text).and_then(|e| es_to_tsi(&e, cap)),
        "ccs" => parse_ccs(&text).and_then(|p| {
            let relabelled = relabel_theta(&p)?.program;
            net_to_tsi(&ccs_to_net(&relabelled)?, cap)
        }),
        other => Err(Error::Usage(format!("unknown model extension .{other}"))),
    };
    out.map_err(|e| with_context(path, e))
}

fn load_formula(inline: &Option<String>, file: &Option<PathBuf>) -> Result<Formula> {
    let text = match (inline, file) {
        (Some(s), None) => s.clone(),
        (None, Some(p)) => read_file(p)?,
        _ => return Err(Error::Usage("provide exactly one of --formula / --formula-file".into())),
    };
    let f = parse_formula(text.trim())?;
    if !f.is_closed() {
        let z = f.free_vars().into_iter().next().unwrap();
        return Err(Error::UnboundVariable(z));
    }
    Ok(f)
}

fn parse_mode(s: &str) -> Result<Mode> {
    if s == "exact" {
        Ok(Mode::ExactAcyclic)
    } else if s == "local" {
        Ok(Mode::LocalXi)
    } else if let Some(k) = s.strip_prefix("bounded=") {
        let k: usize = k.parse().map_err(|_| Error::Usage(format!("bad bound {k}")))?;
        Ok(Mode::Bounded(k))
    } else {
        Err(Error::Usage(format!("unknown mode {s} (exact | bounded=K | local)")))
    }
}

/// Runs a parsed invocation; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { model, json } => cmd_validate(&model, json),
        Command::Translate { input, output, cap } => cmd_translate(&input, output.as_deref(), cap),
        Command::Check { model, formula, formula_file, engine, json, cap } => {
            cmd_check(&model, &formula, &formula_file, engine, json, cap)
        }
        Command::Bisim { rel, mode, left, right, json } => cmd_bisim(rel, &mode, &left, &right, json),
        Command::Classify { model } => cmd_classify(&model),
        Command::Fold { ccs, output, cap, verify, formulas, depth } => {
            cmd_fold(&ccs, output.as_deref(), cap, verify, formulas.as_deref(), depth)
        }
        Command::Play { model, formula, formula_file } => cmd_play(&model, &formula, &formula_file),
    }
}

fn cmd_validate(path: &Path, json: bool) -> Result<i32> {
    let text = read_file(path)?;
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("");
    let report = match ext {
        "tsi" => validate_tsi(&parse_tsi(&text).map_err(|e| with_context(path, e))?),
        "net" => validate_net(&parse_net(&text).map_err(|e| with_context(path, e))?, 100_000),
        "es" => validate_es(&parse_es(&text).map_err(|e| with_context(path, e))?),
        other => return Err(Error::Usage(format!("validate expects .tsi/.net/.es, got .{other}"))),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        for c in &report.checks {
            match &c.witness {
                None => println!("{}: PASS", c.name),
                Some(w) => println!("{}: VIOLATION {w}", c.name),
            }
        }
        if !report.classes.is_empty() {
            for (i, class) in report.classes.iter().enumerate() {
                println!("class {i}: {}", class.join(" "));
            }
        }
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn cmd_translate(input: &Path, output: Option<&Path>, cap: usize) -> Result<i32> {
    let tsi = load_tsi(input, cap)?;
    let text = print_tsi(&tsi);
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_check(
    model: &Path,
    formula: &Option<String>,
    formula_file: &Option<PathBuf>,
    engine: Engine,
    json: bool,
    cap: usize,
) -> Result<i32> {
    let tsi = load_tsi(model, cap)?;
    let f = load_formula(formula, formula_file)?;
    let an = Analysis::with_cap(&tsi, cap)?;

    let mut denot_part = None;
    if engine != Engine::Game {
        let (d, lengths) = an.denote_with_stats(&f, &Valuation::new())?;
        let satisfied = d.contains(&an.space.initial());
        denot_part = Some((satisfied, d.len(), lengths));
    }
    let mut game_part = None;
    if engine != Engine::Denot {
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), cap)?;
        let sol = solve_mc(&mc);
        let mut priorities: Vec<u32> = mc.game.priority.to_vec();
        priorities.sort();
        priorities.dedup();
        let mut strategy = Vec::new();
        for v in 0..mc.game.len() {
            if sol.solved.winner[v] == sol.winner && mc.game.owner[v] == sol.winner {
                if let Some(t) = sol.solved.strategy[v] {
                    strategy.push(json!({
                        "position": mc.render_node(&an, v),
                        "move": mc.render_node(&an, t),
                    }));
                }
            }
        }
        game_part = Some((sol.winner, mc.game.len(), priorities, strategy));
    }

    let satisfied = match (&denot_part, &game_part) {
        (Some((s, _, _)), _) => *s,
        (None, Some((w, _, _, _))) => *w == Player::Eve,
        (None, None) => unreachable!(),
    };
    let agree = match (&denot_part, &game_part) {
        (Some((s, _, _)), Some((w, _, _, _))) => Some(*s == (*w == Player::Eve)),
        _ => None,
    };

    if json {
        let mut obj = serde_json::Map::new();
        if let Some((s, size, lengths)) = &denot_part {
            obj.insert(
                "denot".into(),
                json!({
                    "satisfied": s,
                    "denotation_size": size,
                    "approximant_lengths": lengths,
                }),
            );
        }
        if let Some((w, nodes, prios, strat)) = &game_part {
            obj.insert(
                "game".into(),
                json!({
                    "winner": format!("{w}"),
                    "node_count": nodes,
                    "priorities_used": prios,
                    "strategy": strat,
                }),
            );
        }
        obj.insert("satisfied".into(), json!(satisfied));
        if let Some(a) = agree {
            obj.insert("agree".into(), json!(a));
        }
        println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap());
    } else {
        if let Some((s, size, lengths)) = &denot_part {
            println!("denotational: {} (denotation size {size})", if *s { "satisfied" } else { "not satisfied" });
            for (z, n) in lengths {
                println!("  approximants of {z}: {n}");
            }
        }
        if let Some((w, nodes, prios, _)) = &game_part {
            println!("game: {w} wins ({nodes} positions, priorities {prios:?})");
        }
        if agree == Some(false) {
            println!("engines DISAGREE");
        }
    }
    if agree == Some(false) {
        return Ok(1);
    }
    Ok(if satisfied { 0 } else { 1 })
}

fn cmd_bisim(rel: RelArg, mode: &str, left: &Path, right: &Path, json: bool) -> Result<i32> {
    let l = load_tsi(left, 100_000)?;
    let r = load_tsi(right, 100_000)?;
    let rel = match rel {
        RelArg::Sb => Rel::Sb,
        RelArg::Hpb => Rel::Hpb,
        RelArg::Hhpb => Rel::Hhpb,
        RelArg::Thpb => Rel::Thpb,
    };
    let mode = parse_mode(mode)?;
    let verdict = bisim::decide(&l, &r, rel, mode)?;
    if json {
        let eq = match verdict.equivalent {
            Tri::Yes => json!(true),
            Tri::No => json!(false),
            Tri::Unknown(_) => json!(null),
        };
        let bound = match verdict.equivalent {
            Tri::Unknown(k) => json!(k),
            _ => json!(null),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "relation": format!("{rel:?}").to_lowercase(),
                "equivalent": eq,
                "unknown_bound": bound,
                "witness": verdict.witness,
            }))
            .unwrap()
        );
    } else {
        match verdict.equivalent {
            Tri::Yes => println!("EQUIVALENT"),
            Tri::No => println!(
                "NOT EQUIVALENT{}",
                verdict.witness.as_deref().map(|w| format!(": {w}")).unwrap_or_default()
            ),
            Tri::Unknown(k) => println!("UNKNOWN (bound {k})"),
        }
    }
    Ok(match verdict.equivalent {
        Tri::Yes => 0,
        Tri::No => 1,
        Tri::Unknown(_) => 2,
    })
}

fn cmd_classify(path: &Path) -> Result<i32> {
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("");
    let tsi = load_tsi(path, 100_000)?;
    let auto: Vec<[String; 2]> = crate::tsi::detect_auto_concurrency(&tsi)
        .into_iter()
        .map(|(a, b)| [tsi.trans_name(a).to_string(), tsi.trans_name(b).to_string()])
        .collect();
    let confusion: Vec<serde_json::Value> = classify_confusion(&tsi)
        .into_iter()
        .map(|c| {
            json!({
                "t1": tsi.trans_name(c.t1),
                "t2": tsi.trans_name(c.t2),
                "t3": tsi.trans_name(c.t3),
                "variant": format!("{:?}", c.variant).to_lowercase(),
                "deterministic": c.deterministic,
            })
        })
        .collect();
    let mut obj = serde_json::Map::new();
    obj.insert("auto_concurrency".into(), json!(auto));
    obj.insert("confusion".into(), json!(confusion));
    obj.insert("free_choice".into(), json!(is_free_choice(&tsi).is_ok()));
    obj.insert("xi".into(), json!(is_xi_system(&tsi).is_ok()));
    if ext == "net" {
        let net = parse_net(&read_file(path)?).map_err(|e| with_context(path, e))?;
        obj.insert("free_choice_net".into(), json!(is_free_choice_net(&net).is_ok()));
    }
    println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap());
    Ok(0)
}

fn cmd_fold(
    ccs_path: &Path,
    output: Option<&Path>,
    cap: usize,
    verify: bool,
    formulas: Option<&Path>,
    depth: usize,
) -> Result<i32> {
    let program = parse_ccs(&read_file(ccs_path)?).map_err(|e| with_context(ccs_path, e))?;
    let relabelled = relabel_theta(&program)?;
    if !relabelled.theta_inv.is_empty() {
        for (new, old) in &relabelled.theta_inv {
            eprintln!("relabelled {old} -> {new}");
        }
    }
    let generator = CcsGenerator::new(relabelled.program);
    let oracle = CcsOracle { gen: &generator };
    let outcome = fold(&generator, &oracle, cap)?;
    if verify {
        let path = formulas.ok_or_else(|| Error::Usage("--verify needs --formulas".into()))?;
        let text = read_file(path)?;
        let mut fs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            fs.push(parse_formula(line)?);
        }
        let report = verify_fold(&outcome.tsi, &generator, &fs, depth, cap)?;
        let mut disagreements = 0;
        for e in &report {
            let t = match e.truncated {
                Some(true) => "true",
                Some(false) => "false",
                None => "undecided",
            };
            println!(
                "{:10} folded={} truncated={} :: {}",
                format!("{:?}", e.status).to_lowercase(),
                e.folded,
                t,
                e.formula
            );
            if e.status == crate::folding::Agreement::Disagree {
                disagreements += 1;
            }
        }
        println!("{} formulas, {} disagreements", report.len(), disagreements);
        return Ok(if disagreements == 0 { 0 } else { 1 });
    }
    let text = print_tsi(&outcome.tsi);
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Usage(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    eprintln!(
        "folded: {} classes, {} transitions, |E_r|={}, |E_f|={}",
        outcome.tsi.n_states(),
        outcome.tsi.n_transitions(),
        outcome.reps.e_r.len(),
        outcome.reps.e_f.len()
    );
    Ok(0)
}

fn cmd_play(model: &Path, formula: &Option<String>, formula_file: &Option<PathBuf>) -> Result<i32> {
    let tsi = load_tsi(model, 100_000)?;
    let f = load_formula(formula, formula_file)?;
    let an = Analysis::new(&tsi)?;
    let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)?;
    let sol = solve_mc(&mc);
    println!("{} wins this game; you play the other side.", sol.winner);
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let transcript = replay(&mc, &sol, &an, |position, options| {
        println!("at {position}");
        for (i, o) in options.iter().enumerate() {
            println!("  [{i}] {o}");
        }
        match lines.next() {
            Some(Ok(line)) => line.trim().parse().unwrap_or(0),
            _ => 0,
        }
    })?;
    for step in &transcript.steps {
        match (&step.chooser, &step.moved_to) {
            (Some(p), Some(m)) => println!("{:?} [{p}] {} -> {m}", step.rule, step.position),
            _ => println!("{:?} {}", step.rule, step.position),
        }
    }
    println!("{}", transcript.outcome);
    Ok(if transcript.winner == Player::Eve { 0 } else { 1 })
}

/// Strategy validation helper shared with the test suite: the number of lost
/// playouts over the whole corpus game.
pub fn validate_strategies(tsi: &Tsi, f: &Formula, plays: usize, seed: u64) -> Result<usize> {
    use rand::SeedableRng;
    let an = Analysis::new(tsi)?;
    let mc = build_mc_game(&an, an.space.initial(), f, &Valuation::new(), DEFAULT_GAME_CAP)?;
    let sol = solve_mc(&mc);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok(playout_losses(&mc, &sol, plays, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!(parse_mode("exact").unwrap(), Mode::ExactAcyclic);
        assert_eq!(parse_mode("local").unwrap(), Mode::LocalXi);
        assert_eq!(parse_mode("bounded=7").unwrap(), Mode::Bounded(7));
        assert!(parse_mode("???").is_err());
    }
}
