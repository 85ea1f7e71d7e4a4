//! Strategy iteration with tree labels.
//!
//! Odd fixes a strategy `τ`; the labeling is raised to the least fixed point of `G_τ`; Odd
//! then pivots along admissible arcs (violated arcs leaving Odd nodes) until none remain.
//!
//! ```
//! use paritree::game::parse_pgsolver;
//! use paritree::solver::{strategy_iteration_solve, SolveOptions};
//! use paritree::tree::TreeSpec;
//!
//! let g = parse_pgsolver("parity 1;\n0 2 0 0,1;\n1 1 1 1;\n").unwrap();
//! let spec = TreeSpec::succinct(2, 1).unwrap();
//! let r = strategy_iteration_solve(&g, &spec, &SolveOptions::default()).unwrap();
//! assert_eq!((r.even_wins, r.odd_wins), (vec![0], vec![1]));
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::mpsc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::{usage, Error, Result};
use crate::game::{NodeId, Owner, ParityGame, Strategy, StrategySubgraph};
use crate::labeling::{progress_measure_from, ArcStatus, NodeLabeling};
use crate::one_player::{
    assign_costs, build_auxiliary_digraph, find_base_nodes, least_fixed_point_lc,
    least_fixed_point_perfect,
};
use crate::tree::{TreeKind, TreeSpec};

/// How Odd chooses among admissible arcs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Every Odd node with an admissible arc switches to the one with the largest lift.
    #[default]
    SwitchAll,
    /// Only the first admissible arc in `(tail, head)` order is taken.
    SwitchFirst,
    /// A random nonempty set of Odd nodes switches, each to a random admissible arc.
    SwitchRandom(u64),
}

impl fmt::Display for PivotRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PivotRule::SwitchAll => write!(f, "all"),
            PivotRule::SwitchFirst => write!(f, "first"),
            PivotRule::SwitchRandom(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for PivotRule {
    type Err = Error;

    /// `all`, `first`, `random` or `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(PivotRule::SwitchAll),
            "first" => Ok(PivotRule::SwitchFirst),
            "random" => Ok(PivotRule::SwitchRandom(0)),
            _ => match s.strip_prefix("random:").map(str::parse) {
                Some(Ok(seed)) => Ok(PivotRule::SwitchRandom(seed)),
                _ => usage(format!("unknown pivot rule {s:?}")),
            },
        }
    }
}

/// Which 1-player engine computes `μ^{G↑_τ}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Label-setting for perfect trees, label-correcting otherwise.
    #[default]
    Auto,
    LabelCorrecting,
    /// Perfect trees only.
    LabelSetting,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "lc" => Ok(Engine::LabelCorrecting),
            "dijkstra" | "perfect" => Ok(Engine::LabelSetting),
            _ => usage(format!("unknown engine {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub rule: PivotRule,
    pub engine: Engine,
    /// Odd's first strategy; the lowest successor per Odd node when absent.
    pub initial: Option<Strategy>,
    /// Keep the labeling of every phase in [`SolveResult::history`].
    pub keep_history: bool,
    /// Record the priced auxiliary digraph of every phase in [`SolveResult::aux_dumps`].
    pub dump_aux: bool,
}

/// Per-phase counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseStats {
    /// Nodes whose label rose in this phase.
    pub raised: usize,
    /// Odd nodes that switched after this phase.
    pub switched: usize,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub labeling: NodeLabeling,
    pub odd_strategy: Strategy,
    pub even_wins: Vec<NodeId>,
    pub odd_wins: Vec<NodeId>,
    /// A tight arc for every Even node of `even_wins` that has one.
    pub even_strategy: Vec<(NodeId, NodeId)>,
    /// Number of 1-player fixed points computed.
    pub phases: usize,
    pub stats: Vec<PhaseStats>,
    /// The starting labeling followed by the labeling after each phase, when requested.
    pub history: Vec<NodeLabeling>,
    /// One [`crate::one_player::AuxiliaryDigraph::dump`] per phase, when requested.
    pub aux_dumps: Vec<String>,
    pub warnings: Vec<String>,
}

impl SolveResult {
    /// Keys: `tree`, `even_wins`, `odd_wins`, `labels`, `even_strategy`, `odd_strategy`,
    /// `phases`, `warnings`.
    pub fn to_json(&self, game: &ParityGame) -> Value {
        let names = |vs: &[NodeId]| -> Vec<String> { vs.iter().map(|&v| game.display_name(v)).collect() };
        let arcs = |pairs: &mut dyn Iterator<Item = (NodeId, NodeId)>| -> Value {
            let mut m = Map::new();
            for (v, w) in pairs {
                m.insert(game.display_name(v), Value::String(game.display_name(w)));
            }
            Value::Object(m)
        };
        json!({
            "tree": self.labeling.spec().to_string(),
            "even_wins": names(&self.even_wins),
            "odd_wins": names(&self.odd_wins),
            "labels": self.labeling.to_json(game),
            "even_strategy": arcs(&mut self.even_strategy.iter().copied()),
            "odd_strategy": arcs(&mut self.odd_strategy.pairs()),
            "phases": self.phases,
            "warnings": self.warnings,
        })
    }
}

/// Tree of height `max(d/2, 1)` with capacity `n` unless overridden; Strahler trees default
/// to `g = min(⌊log₂ ℓ⌋, h)`.
pub fn default_spec(
    game: &ParityGame,
    kind: TreeKind,
    capacity: Option<u64>,
    g: Option<usize>,
) -> Result<TreeSpec> {
    let capacity = capacity.unwrap_or(game.n().max(1) as u64);
    let height = game.height().max(1);
    let g = g.unwrap_or_else(|| (capacity.max(1).ilog2() as usize).min(height));
    TreeSpec::new(kind, capacity, height, g)
}

/// Violated arcs leaving Odd nodes, ascending.
pub fn admissible_arcs(game: &ParityGame, mu: &NodeLabeling) -> Vec<(NodeId, NodeId)> {
    game.arcs()
        .filter(|&(v, w)| {
            game.owner(v) == Owner::Odd && mu.arc_status(game, v, w) == ArcStatus::Violated
        })
        .collect()
}

/// Switches Odd's strategy along admissible arcs; `round` varies the random rule per phase.
pub fn pivot(
    game: &ParityGame,
    tau: &Strategy,
    mu: &NodeLabeling,
    rule: PivotRule,
    round: u64,
) -> Result<Strategy> {
    let adm = admissible_arcs(game, mu);
    if adm.is_empty() {
        return usage("no admissible arc to pivot on");
    }
    let mut by_tail: Vec<(NodeId, Vec<NodeId>)> = Vec::new();
    for (v, w) in adm {
        match by_tail.last_mut() {
            Some((t, heads)) if *t == v => heads.push(w),
            _ => by_tail.push((v, vec![w])),
        }
    }
    let mut next = tau.clone();
    match rule {
        PivotRule::SwitchAll => {
            for (v, heads) in &by_tail {
                let mut best = heads[0];
                for &w in &heads[1..] {
                    if mu.lift_arc(game, *v, w) > mu.lift_arc(game, *v, best) {
                        best = w;
                    }
                }
                next.set(game, *v, best)?;
            }
        }
        PivotRule::SwitchFirst => {
            let (v, heads) = &by_tail[0];
            next.set(game, *v, heads[0])?;
        }
        PivotRule::SwitchRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ round.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut chosen: Vec<bool> = by_tail.iter().map(|_| rng.gen_bool(0.5)).collect();
            if !chosen.contains(&true) {
                let i = rng.gen_range(0..chosen.len());
                chosen[i] = true;
            }
            for ((v, heads), pick) in by_tail.iter().zip(chosen) {
                if pick {
                    next.set(game, *v, heads[rng.gen_range(0..heads.len())])?;
                }
            }
        }
    }
    Ok(next)
}

/// A tight out-arc, lowest head first, for every Even node with a finite label.
pub fn extract_even_strategy(game: &ParityGame, mu: &NodeLabeling) -> Result<Vec<(NodeId, NodeId)>> {
    let mut out = Vec::new();
    for v in game.nodes() {
        if game.owner(v) != Owner::Even || mu.get(v).is_top() {
            continue;
        }
        match game
            .succ(v)
            .iter()
            .find(|&&w| mu.arc_status(game, v, w) == ArcStatus::Tight)
        {
            Some(&w) => out.push((v, w)),
            None => {
                return Err(Error::Internal(format!(
                    "Even node {} has a finite label but no tight arc",
                    game.display_name(v)
                )))
            }
        }
    }
    Ok(out)
}

fn one_player(h: &StrategySubgraph<'_>, mu: &NodeLabeling, engine: Engine) -> Result<NodeLabeling> {
    match (engine, mu.spec().kind()) {
        (Engine::Auto, TreeKind::Perfect) | (Engine::LabelSetting, _) => least_fixed_point_perfect(h, mu),
        _ => least_fixed_point_lc(h, mu),
    }
}

/// Runs strategy iteration to the pointwise minimal labeling feasible in the whole game.
pub fn strategy_iteration_solve(
    game: &ParityGame,
    spec: &TreeSpec,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    solve_inner(game, spec, opts, None)?.ok_or_else(|| Error::Internal("solve was cancelled".into()))
}

fn solve_inner(
    game: &ParityGame,
    spec: &TreeSpec,
    opts: &SolveOptions,
    cancel: Option<&AtomicBool>,
) -> Result<Option<SolveResult>> {
    if opts.engine == Engine::LabelSetting && spec.kind() != TreeKind::Perfect {
        return usage("the label-setting engine needs a perfect tree");
    }
    let mut warnings = Vec::new();
    if spec.capacity() < game.n() as u64 {
        warnings.push(format!(
            "tree capacity {} is below n = {}; winning regions may be wrong",
            spec.capacity(),
            game.n()
        ));
    }
    let mut tau = match &opts.initial {
        Some(t) => t.clone(),
        None => Strategy::lowest(game),
    };
    let mut mu = NodeLabeling::min(spec, game.n());
    mu.check(game)?;
    let cap = BigUint::from(game.n()) * spec.leaf_count() + 1u32;
    let mut history = if opts.keep_history { vec![mu.clone()] } else { Vec::new() };
    let mut stats = Vec::new();
    let mut aux_dumps = Vec::new();
    loop {
        if cancel.is_some_and(|c| c.load(AtomicOrdering::Relaxed)) {
            return Ok(None);
        }
        if BigUint::from(stats.len()) >= cap {
            return Err(Error::Internal(format!("phase cap {cap} exceeded")));
        }
        let h = StrategySubgraph::new(game, &tau)?;
        if opts.dump_aux {
            let report = find_base_nodes(&h);
            let mut aux = build_auxiliary_digraph(&report);
            assign_costs(&h, &report, &mut aux, spec)?;
            aux_dumps.push(aux.dump(game));
        }
        let next = one_player(&h, &mu, opts.engine)?;
        debug_assert!(mu.le(&next), "labels decreased");
        debug_assert!(next.is_feasible(&h) && !next.has_loose_arc(&h), "loop-head invariant");
        let raised = game.nodes().filter(|&v| next.get(v) != mu.get(v)).count();
        mu = next;
        if opts.keep_history {
            history.push(mu.clone());
        }
        let adm = admissible_arcs(game, &mu);
        if adm.is_empty() {
            stats.push(PhaseStats { raised, switched: 0 });
            break;
        }
        let new_tau = pivot(game, &tau, &mu, opts.rule, stats.len() as u64)?;
        let switched = game.odd_nodes().filter(|&v| new_tau.get(v) != tau.get(v)).count();
        stats.push(PhaseStats { raised, switched });
        tau = new_tau;
    }
    let (even_wins, odd_wins) = game.nodes().partition(|&v| !mu.get(v).is_top());
    let even_strategy = extract_even_strategy(game, &mu)?;
    Ok(Some(SolveResult {
        labeling: mu,
        odd_strategy: tau,
        even_wins,
        odd_wins,
        even_strategy,
        phases: stats.len(),
        stats,
        history,
        aux_dumps,
        warnings,
    }))
}

/// Which side of [`race_naive_solve`] finished first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaceWinner {
    StrategyIteration,
    ProgressMeasure,
}

/// Runs strategy iteration and the progress-measure lifting side by side and keeps whichever
/// finishes first. Both reach the same labeling.
pub fn race_naive_solve(
    game: &ParityGame,
    spec: &TreeSpec,
    opts: &SolveOptions,
) -> Result<(NodeLabeling, RaceWinner)> {
    const CHUNK: u64 = 4096;
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        let tx_si = tx.clone();
        let stop_si = &stop;
        s.spawn(move || {
            let r = solve_inner(game, spec, opts, Some(stop_si));
            if let Ok(None) = r {
                return;
            }
            let _ = tx_si.send(r.map(|r| (r.unwrap().labeling, RaceWinner::StrategyIteration)));
        });
        let stop_pm = &stop;
        s.spawn(move || {
            let mut mu = NodeLabeling::min(spec, game.n());
            loop {
                if stop_pm.load(AtomicOrdering::Relaxed) {
                    return;
                }
                match progress_measure_from(game, mu, Some(CHUNK)) {
                    Ok(r) => {
                        let _ = tx.send(Ok((r.labeling, RaceWinner::ProgressMeasure)));
                        return;
                    }
                    Err(Error::BudgetExhausted { partial, .. }) => mu = *partial,
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        return;
                    }
                }
            }
        });
        let first = rx.recv().map_err(|_| Error::Internal("race ended without a result".into()));
        stop.store(true, AtomicOrdering::Relaxed);
        first?
    })
}
