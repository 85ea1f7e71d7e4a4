//! `paritree` command-line front end.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use paritree::game::{
    gen_loop, gen_random, gen_worstcase, parse_pgsolver, to_mean_payoff, write_mean_payoff,
    write_pgsolver, ParityGame, Strategy,
};
use paritree::labeling::progress_measure_solve;
use paritree::oracle::zielonka_solve;
use paritree::solver::{
    default_spec, race_naive_solve, strategy_iteration_solve, Engine, PivotRule, RaceWinner,
    SolveOptions,
};
use paritree::tree::{TreeKind, TreeSpec};
use paritree::{Error, Result};

#[derive(Parser)]
#[command(name = "paritree", version, about = "Solve parity games by strategy iteration over universal trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game and print winners and labels.
    Solve(SolveArgs),
    /// Cross-check strategy iteration against Zielonka's algorithm.
    Verify(VerifyArgs),
    /// Generate games in PGSolver format.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Time every instance of a directory under several configurations; CSV on stdout.
    Bench(BenchArgs),
    /// Print the equivalent mean payoff game as `u v weight` lines.
    ExportMpg {
        /// Game file, or `-` for stdin.
        input: String,
    },
}

#[derive(Args, Clone)]
struct TreeArgs {
    /// perfect, succinct or strahler.
    #[arg(long, default_value = "perfect")]
    tree: TreeKind,
    /// Leaves per vertex budget ℓ; defaults to the number of nodes.
    #[arg(long)]
    capacity: Option<u64>,
    /// Strahler parameter; defaults to min(⌊log₂ ℓ⌋, d/2).
    #[arg(long)]
    g: Option<usize>,
}

impl TreeArgs {
    fn spec(&self, game: &ParityGame) -> Result<TreeSpec> {
        default_spec(game, self.tree, self.capacity, self.g)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Strategy,
    Progress,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct SolveArgs {
    /// Game file, or `-` for stdin.
    input: String,
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, value_enum, default_value = "strategy")]
    algo: Algo,
    /// all, first, random or random:<seed>.
    #[arg(long, default_value = "all")]
    rule: PivotRule,
    /// auto, lc, dijkstra or perfect.
    #[arg(long, default_value = "auto")]
    engine: Engine,
    /// Odd's first strategy as `node:successor` pairs, e.g. `A:D,E:C`.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Include the labeling of every phase in the output.
    #[arg(long)]
    history: bool,
    /// Print the priced auxiliary digraph of every phase to stderr.
    #[arg(long)]
    dump_aux: bool,
    /// Run progress-measure lifting alongside and keep whichever finishes first.
    #[arg(long)]
    race_naive: bool,
    /// Lift budget for `--algo progress`.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Game file to check; random games are generated when absent.
    input: Option<String>,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    d: u32,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random sinkless game.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Base game plus the two-node odd gadget that is hard for progress measures.
    Worstcase {
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Cycle of Even nodes whose node 0 has priority `top`.
    Loop {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        top: u32,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of `.pg` files.
    dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "perfect,succinct,strahler")]
    trees: Vec<TreeKind>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "strategy,progress")]
    algos: Vec<Algo>,
}

fn read_input(path: &str) -> Result<String> {
    let res = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    };
    res.map_err(|e| Error::Usage(format!("cannot read {path}: {e}")))
}

fn read_game(path: &str) -> Result<ParityGame> {
    parse_pgsolver(&read_input(path)?)
}

fn parse_tau(game: &ParityGame, text: &str) -> Result<Strategy> {
    let mut pairs = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (v, w) = item
            .split_once(':')
            .ok_or_else(|| Error::Usage(format!("expected node:successor, got {item:?}")))?;
        let find = |name: &str| {
            game.find(name.trim())
                .ok_or_else(|| Error::Usage(format!("unknown node {name:?}")))
        };
        pairs.push((find(v)?, find(w)?));
    }
    let mut tau = Strategy::lowest(game);
    for (v, w) in pairs {
        tau.set(game, v, w)?;
    }
    Ok(tau)
}

fn names(game: &ParityGame, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&v| game.display_name(v)).collect()
}

fn solve(args: &SolveArgs) -> Result<()> {
    let game = read_game(&args.input)?;
    let spec = args.tree.spec(&game)?;
    if args.engine == Engine::LabelSetting && spec.kind() != TreeKind::Perfect {
        return Err(Error::Usage("--engine dijkstra/perfect needs --tree perfect".into()));
    }
    let opts = SolveOptions {
        rule: args.rule,
        engine: args.engine,
        initial: args.tau.as_deref().map(|t| parse_tau(&game, t)).transpose()?,
        keep_history: args.history,
        dump_aux: args.dump_aux,
    };
    let (labeling, mut out) = if args.race_naive {
        let (mu, winner) = race_naive_solve(&game, &spec, &opts)?;
        let side = match winner {
            RaceWinner::StrategyIteration => "strategy iteration",
            RaceWinner::ProgressMeasure => "progress measure",
        };
        eprintln!("race won by {side}");
        (mu, json!({}))
    } else if args.algo == Algo::Progress {
        let r = progress_measure_solve(&game, &spec, args.budget)?;
        (r.labeling, json!({ "lifts": r.lifts }))
    } else {
        let r = strategy_iteration_solve(&game, &spec, &opts)?;
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        for (i, dump) in r.aux_dumps.iter().enumerate() {
            eprint!("# phase {}\n{dump}", i + 1);
        }
        let mut out = r.to_json(&game);
        if args.history {
            out["history"] = r.history.iter().map(|mu| mu.to_json(&game)).collect();
        }
        (r.labeling, out)
    };
    let (even, odd): (Vec<usize>, Vec<usize>) = game.nodes().partition(|&v| !labeling.get(v).is_top());
    out["tree"] = json!(spec.to_string());
    out["even_wins"] = json!(names(&game, &even));
    out["odd_wins"] = json!(names(&game, &odd));
    out["labels"] = labeling.to_json(&game);
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out).expect("json value")),
        Format::Text => {
            println!("tree: {spec}");
            println!("even wins: {}", names(&game, &even).join(" "));
            println!("odd wins: {}", names(&game, &odd).join(" "));
            if let Some(p) = out.get("phases") {
                println!("phases: {p}");
            }
            if let Some(l) = out.get("lifts") {
                println!("lifts: {l}");
            }
            print!("{}", labeling.to_text(&game));
        }
    }
    Ok(())
}

/// Returns whether every check agreed.
fn verify(args: &VerifyArgs) -> Result<bool> {
    let games: Vec<(String, ParityGame)> = match &args.input {
        Some(path) => vec![(path.clone(), read_game(path)?)],
        None => (0..args.runs)
            .map(|i| {
                let seed = args.seed + i;
                gen_random(args.n, args.d, args.max_degree, seed).map(|g| (format!("seed {seed}"), g))
            })
            .collect::<Result<_>>()?,
    };
    let mut solves = 0;
    for (label, game) in &games {
        let expected = zielonka_solve(game);
        for kind in [TreeKind::Perfect, TreeKind::Succinct, TreeKind::Strahler] {
            let Ok(spec) = default_spec(game, kind, None, None) else {
                continue;
            };
            let r = strategy_iteration_solve(game, &spec, &SolveOptions::default())?;
            solves += 1;
            if r.even_wins != expected.even_wins {
                eprintln!(
                    "mismatch on {label} with {spec}: strategy iteration {:?}, zielonka {:?}",
                    names(game, &r.even_wins),
                    names(game, &expected.even_wins)
                );
                print!("{}", write_pgsolver(game));
                return Ok(false);
            }
        }
    }
    println!("ok: {} games, {solves} solves agree with zielonka", games.len());
    Ok(true)
}

fn gen(cmd: &GenCommand) -> Result<()> {
    let game = match cmd {
        GenCommand::Random { n, d, max_degree, seed } => gen_random(*n, *d, *max_degree, *seed)?,
        GenCommand::Worstcase { base, k } => gen_worstcase(&read_game(base)?, *k)?,
        GenCommand::Loop { n, top } => gen_loop(*n, *top)?,
    };
    print!("{}", write_pgsolver(&game));
    Ok(())
}

struct BenchRow {
    instance: String,
    n: usize,
    m: usize,
    d: u32,
    tree: TreeKind,
    algo: Algo,
    phases: usize,
    lifts: u64,
    wall_ms: f64,
}

fn bench_report(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(["instance", "n", "m", "d", "tree", "algo", "phases", "lifts", "wall_ms"])
        .map_err(csv_err)?;
    for r in rows {
        let algo = match r.algo {
            Algo::Strategy => "strategy",
            Algo::Progress => "progress",
        };
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.d.to_string(),
            r.tree.to_string(),
            algo.to_string(),
            r.phases.to_string(),
            r.lifts.to_string(),
            format!("{:.3}", r.wall_ms),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn bench(args: &BenchArgs) -> Result<()> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", args.dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pg"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Usage(format!("no .pg files in {}", args.dir.display())));
    }
    let mut rows = Vec::new();
    for path in &files {
        let game = read_game(path.to_str().unwrap_or_default())?;
        let instance = Path::new(path).file_name().unwrap().to_string_lossy().into_owned();
        for &tree in &args.trees {
            let spec = default_spec(&game, tree, None, None)?;
            for &algo in &args.algos {
                let start = Instant::now();
                let (phases, lifts) = match algo {
                    Algo::Strategy => {
                        let r = strategy_iteration_solve(&game, &spec, &SolveOptions::default())?;
                        (r.phases, r.stats.iter().map(|s| s.raised as u64).sum())
                    }
                    Algo::Progress => (0, progress_measure_solve(&game, &spec, None)?.lifts),
                };
                rows.push(BenchRow {
                    instance: instance.clone(),
                    n: game.n(),
                    m: game.m(),
                    d: game.d(),
                    tree,
                    algo,
                    phases,
                    lifts,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
        }
    }
    print!("{}", bench_report(&rows)?);
    Ok(())
}

fn export_mpg(input: &str) -> Result<()> {
    let game = read_game(input)?;
    print!("{}", write_mean_payoff(&game, &to_mean_payoff(&game)));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a).map(|()| true),
        Command::Verify(a) => verify(a),
        Command::Gen(c) => gen(c).map(|()| true),
        Command::Bench(a) => bench(a).map(|()| true),
        Command::ExportMpg { input } => export_mpg(input).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("paritree: {e}");
            ExitCode::from(2)
        }
    }
}
