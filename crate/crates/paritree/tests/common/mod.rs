//! Generators and brute-force checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paritree::game::{gen_random, GameView, NodeId, Owner, ParityGame, Strategy, StrategySubgraph};
use paritree::labeling::{ArcStatus, NodeLabeling};
use paritree::one_player::{
    assign_costs, bellman_ford_traced, build_auxiliary_digraph, dijkstra, dijkstra_traced,
    find_base_nodes, initial_base_labels, least_fixed_point_lc, least_fixed_point_perfect,
};
use paritree::oracle::{naive_lfp_with, zielonka_solve, LeafTable};
use paritree::solver::{admissible_arcs, pivot, strategy_iteration_solve, PivotRule, SolveOptions};
use paritree::tree::{Label, TreeKind, TreeSpec};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random game plus a random Odd strategy.
pub fn one_player(n: usize, d: u32, deg: usize, seed: u64) -> (ParityGame, Strategy) {
    let game = gen_random(n, d, deg, seed).unwrap();
    let mut r = rng(seed ^ 0x5eed);
    let pairs: Vec<(NodeId, NodeId)> = game
        .odd_nodes()
        .map(|v| (v, game.succ(v)[r.gen_range(0..game.succ(v).len())]))
        .collect();
    let tau = Strategy::from_pairs(&game, &pairs).unwrap();
    (game, tau)
}

/// A small tree of `kind` tall enough for `game`, or `None` when the kind has no tree that small.
pub fn small_spec(kind: TreeKind, game: &ParityGame, max_capacity: u64, seed: u64) -> Option<TreeSpec> {
    let mut r = rng(seed ^ 0x7ee);
    let height = game.height().max(1);
    let lo = if kind == TreeKind::Strahler { 2 } else { 1 };
    if max_capacity < lo {
        return None;
    }
    let capacity = r.gen_range(lo..=max_capacity);
    let g = if kind == TreeKind::Strahler {
        r.gen_range(1..=height.min(capacity.ilog2() as usize))
    } else {
        0
    };
    Some(TreeSpec::new(kind, capacity, height, g).unwrap())
}

/// The smallest perfect tree on which the label-setting engine runs without falling back.
pub fn fitting_perfect_spec(h: &StrategySubgraph<'_>) -> TreeSpec {
    let report = find_base_nodes(h);
    let capacity = report.info.values().map(|i| i.k_nodes.len()).max().unwrap_or(1);
    TreeSpec::perfect(capacity as u64, h.game().height().max(1)).unwrap()
}

/// Uniform random labels (⊤ one time in eight) pushed down by Drop until no arc of `h` is loose.
pub fn loose_free_labeling<H: GameView>(h: &H, spec: &TreeSpec, seed: u64) -> NodeLabeling {
    let game = h.game();
    let leaves: Vec<Label> = spec.leaves().map(Label::Leaf).collect();
    let mut r = rng(seed ^ 0x1abe1);
    let values = game
        .nodes()
        .map(|_| {
            if r.gen_ratio(1, 8) {
                Label::Top
            } else {
                leaves[r.gen_range(0..leaves.len())].clone()
            }
        })
        .collect();
    let mut mu = NodeLabeling::from_values(spec, values).unwrap();
    let mut changed = true;
    while changed {
        changed = false;
        for v in game.nodes() {
            for &w in h.succ(v) {
                let dropped = mu.drop_arc(game, v, w);
                if dropped < *mu.get(v) {
                    mu.set(v, dropped);
                    changed = true;
                }
            }
        }
    }
    mu
}

/// Random labels with ⊤ one time in eight.
pub fn random_labeling(spec: &TreeSpec, n: usize, seed: u64) -> NodeLabeling {
    let leaves: Vec<Label> = spec.leaves().map(Label::Leaf).collect();
    let mut r = rng(seed ^ 0x4a4d);
    let values = (0..n)
        .map(|_| {
            if r.gen_ratio(1, 8) {
                Label::Top
            } else {
                leaves[r.gen_range(0..leaves.len())].clone()
            }
        })
        .collect();
    NodeLabeling::from_values(spec, values).unwrap()
}

/// Simple cycles of a digraph given by successor lists, each rotated to start at its least node.
pub fn simple_cycles(succ: &dyn Fn(NodeId) -> Vec<NodeId>, n: usize) -> Vec<Vec<NodeId>> {
    fn go(
        succ: &dyn Fn(NodeId) -> Vec<NodeId>,
        start: NodeId,
        path: &mut Vec<NodeId>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        let v = *path.last().unwrap();
        for w in succ(v) {
            if w == start {
                out.push(path.clone());
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                go(succ, start, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        go(succ, s, &mut vec![s], &mut on_path, &mut out);
    }
    out
}

/// The subgraph consisting of one cycle.
pub struct CycleView<'g> {
    game: &'g ParityGame,
    succ: Vec<Vec<NodeId>>,
}

impl<'g> CycleView<'g> {
    pub fn new(game: &'g ParityGame, cycle: &[NodeId]) -> CycleView<'g> {
        let mut succ = vec![Vec::new(); game.n()];
        for (i, &v) in cycle.iter().enumerate() {
            succ[v].push(cycle[(i + 1) % cycle.len()]);
        }
        CycleView { game, succ }
    }
}

impl GameView for CycleView<'_> {
    fn game(&self) -> &ParityGame {
        self.game
    }

    fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }
}

fn render(mu: &NodeLabeling) -> Vec<String> {
    mu.values().iter().map(|l| mu.spec().render(l)).collect()
}

/// Outputs of every 1-player engine equal naive lifting and are certified fixed points.
pub fn check_lfp_engines(h: &StrategySubgraph<'_>, mu: &NodeLabeling, table: &LeafTable) -> Check {
    let expected = naive_lfp_with(table, h, mu).map_err(|e| e.to_string())?;
    let lc = least_fixed_point_lc(h, mu).map_err(|e| e.to_string())?;
    ensure!(lc == expected, "lc {:?} != naive {:?}", render(&lc), render(&expected));
    ensure!(lc.is_feasible(h), "lc output infeasible");
    ensure!(!lc.has_loose_arc(h), "lc output has a loose arc");
    if mu.spec().kind() == TreeKind::Perfect {
        let fast = least_fixed_point_perfect(h, mu).map_err(|e| e.to_string())?;
        ensure!(fast == expected, "perfect {:?} != naive {:?}", render(&fast), render(&expected));
        let seeded = dijkstra(h, &expected).map_err(|e| e.to_string())?;
        ensure!(seeded == expected, "dijkstra from oracle base labels {:?}", render(&seeded));
    }
    Ok(())
}

/// Sandwich: `μ ≤ μ^{G↑_τ} ≤ state ≤ ν` after every Bellman–Ford pass.
pub fn check_sandwich(h: &StrategySubgraph<'_>, mu: &NodeLabeling, table: &LeafTable) -> Check {
    let lfp = naive_lfp_with(table, h, mu).map_err(|e| e.to_string())?;
    let report = find_base_nodes(h);
    let nu = initial_base_labels(h, &report, mu).map_err(|e| e.to_string())?;
    ensure!(mu.le(&lfp), "μ above its fixed point");
    let mut bad = None;
    let mut prev = nu.clone();
    bellman_ford_traced(h, &nu, |state| {
        if bad.is_none() && !(lfp.le(state) && state.le(&prev)) {
            bad = Some(render(state));
        }
        prev = state.clone();
    });
    ensure!(bad.is_none(), "pass state {:?} escapes [{:?}, ν]", bad, render(&lfp));
    Ok(())
}

/// Smallest `x ≥ μ(w)` such that some cycle through `w` dominated by `w` has a feasible
/// labeling with value `x` at `w`; ⊤ if none.
pub fn threshold_label(h: &StrategySubgraph<'_>, mu: &NodeLabeling, w: NodeId) -> Label {
    let game = h.game();
    let spec = mu.spec();
    let cycles = simple_cycles(&|v| h.succ(v).to_vec(), h.n());
    let mut best = Label::Top;
    for cycle in cycles.iter().filter(|c| c.contains(&w)) {
        if cycle.iter().any(|&v| game.priority(v) > game.priority(w)) {
            continue;
        }
        let at = cycle.iter().position(|&v| v == w).unwrap();
        let rotated: Vec<NodeId> = cycle[at..].iter().chain(&cycle[..at]).copied().collect();
        for leaf in spec.leaves() {
            let x = Label::Leaf(leaf);
            if x < *mu.get(w) || x >= best {
                continue;
            }
            let mut head = x.clone();
            for &v in rotated.iter().rev() {
                head = spec.tighten_target(&head, game.priority(v)).unwrap();
            }
            if head <= x {
                best = x;
                break;
            }
        }
    }
    best
}

/// Base-node initialization lies between the fixed point and the threshold label.
pub fn check_threshold(h: &StrategySubgraph<'_>, mu: &NodeLabeling, table: &LeafTable) -> Check {
    let lfp = naive_lfp_with(table, h, mu).map_err(|e| e.to_string())?;
    let report = find_base_nodes(h);
    let nu = initial_base_labels(h, &report, mu).map_err(|e| e.to_string())?;
    for &w in &report.base_nodes {
        let hat = threshold_label(h, mu, w);
        ensure!(
            lfp.get(w) <= nu.get(w) && nu.get(w) <= &hat,
            "node {w}: lfp {} ν {} threshold {}",
            mu.spec().render(lfp.get(w)),
            mu.spec().render(nu.get(w)),
            mu.spec().render(&hat)
        );
    }
    Ok(())
}

/// Base nodes are exactly the even-priority nodes lying on a cycle they dominate.
pub fn check_base_nodes(h: &StrategySubgraph<'_>) -> Check {
    let game = h.game();
    let report = find_base_nodes(h);
    let mut expected = Vec::new();
    for w in game.nodes() {
        let p = game.priority(w);
        if p % 2 == 1 {
            continue;
        }
        let mut seen = vec![false; h.n()];
        let mut stack: Vec<NodeId> = h.succ(w).iter().copied().filter(|&x| game.priority(x) <= p).collect();
        let mut closes = false;
        while let Some(x) = stack.pop() {
            if x == w {
                closes = true;
                break;
            }
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            stack.extend(h.succ(x).iter().copied().filter(|&y| game.priority(y) <= p));
        }
        if closes {
            expected.push(w);
        }
    }
    ensure!(report.base_nodes == expected, "base nodes {:?}, expected {:?}", report.base_nodes, expected);
    Ok(())
}

/// Drop fixed point on `J_w` in `tree` with `w` pinned to its minimum leaf.
fn lambda(game: &ParityGame, arcs: &[(NodeId, NodeId)], w: NodeId, tree: &TreeSpec) -> NodeLabeling {
    let mut nu = NodeLabeling::top(tree, game.n());
    nu.set(w, Label::Leaf(tree.min_leaf()));
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, x) in arcs {
            if u == w {
                continue;
            }
            let dropped = nu.drop_arc(game, u, x);
            if dropped < *nu.get(u) {
                nu.set(u, dropped);
                changed = true;
            }
        }
    }
    nu
}

/// Whether the path ending at its last node has a finite feasible labeling in `tree`.
fn path_fits(game: &ParityGame, path: &[NodeId], tree: &TreeSpec) -> bool {
    let mut head = Label::Leaf(tree.min_leaf());
    for &v in path.iter().rev().skip(1) {
        head = tree.tighten_target(&head, game.priority(v)).unwrap();
        if head.is_top() {
            return false;
        }
    }
    true
}

fn simple_paths(arcs: &[(NodeId, NodeId)], from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
    fn go(arcs: &[(NodeId, NodeId)], to: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let v = *path.last().unwrap();
        if v == to {
            out.push(path.clone());
            return;
        }
        for &(a, b) in arcs {
            if a == v && !path.contains(&b) {
                path.push(b);
                go(arcs, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(arcs, to, &mut vec![from], &mut out);
    out
}

/// Every auxiliary arc cost lies between the brute-force lower and upper bounds of its chain.
pub fn check_cost_bracketing(h: &StrategySubgraph<'_>, spec: &TreeSpec) -> Check {
    let game = h.game();
    let report = find_base_nodes(h);
    let mut aux = build_auxiliary_digraph(&report);
    assign_costs(h, &report, &mut aux, spec).map_err(|e| e.to_string())?;
    for (&(v, w), costs) in &aux.costs {
        let info = report.info(w).unwrap();
        let j = game.priority(w) as usize / 2;
        let chains = spec.chain_info(j).map_err(|e| e.to_string())?;
        let heads: BTreeSet<NodeId> =
            info.j_arcs.iter().filter(|a| a.0 == v).map(|a| a.1).collect();
        for (idx, chain) in chains.chains.iter().enumerate() {
            let tree = |i: u32| spec.chain_tree(j, chain.k, i).unwrap();
            let lower = chain.positions.iter().copied().find(|&i| {
                let lam = lambda(game, &info.j_arcs, w, &tree(i));
                heads.iter().any(|&u| !lam.get(u).is_top())
            });
            let paths: Vec<Vec<NodeId>> =
                heads.iter().flat_map(|&u| simple_paths(&info.j_arcs, u, w)).collect();
            let upper = chain
                .positions
                .iter()
                .copied()
                .find(|&i| paths.iter().any(|p| path_fits(game, p, &tree(i))));
            let c = costs[idx];
            let le = |a: Option<u32>, b: Option<u32>| match (a, b) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(x), Some(y)) => x <= y,
            };
            ensure!(
                le(lower, c) && le(c, upper),
                "arc {v}->{w} chain {}: {lower:?} <= {c:?} <= {upper:?} fails",
                chain.k
            );
        }
    }
    Ok(())
}

/// Label-setting admissions come in nondecreasing potential order.
pub fn check_dijkstra_order(h: &StrategySubgraph<'_>, mu: &NodeLabeling, table: &LeafTable) -> Check {
    let lfp = naive_lfp_with(table, h, mu).map_err(|e| e.to_string())?;
    let mut keys: Vec<Option<Vec<u64>>> = Vec::new();
    dijkstra_traced(h, &lfp, |_, k| keys.push(k.map(<[u64]>::to_vec))).map_err(|e| e.to_string())?;
    let rank = |k: &Option<Vec<u64>>| (k.is_none(), k.clone().unwrap_or_default());
    ensure!(
        keys.windows(2).all(|p| rank(&p[0]) <= rank(&p[1])),
        "admission potentials decrease: {keys:?}"
    );
    Ok(())
}

/// Cycle Lemma on every simple cycle: a feasible cycle with a finite label is even and its
/// labels agree above its top priority.
pub fn check_cycle_lemma(game: &ParityGame, spec: &TreeSpec, table: &LeafTable, seed: u64) -> Check {
    let cycles = simple_cycles(&|v| game.succ(v).to_vec(), game.n());
    for (ci, cycle) in cycles.iter().enumerate() {
        let view = CycleView::new(game, cycle);
        let top = cycle.iter().map(|&v| game.priority(v)).max().unwrap();
        for t in 0..2 {
            let start = random_labeling(spec, game.n(), seed ^ (ci as u64 * 31 + t));
            let lifted = naive_lfp_with(table, &view, &start).map_err(|e| e.to_string())?;
            for mu in [start, lifted] {
                let feasible = cycle.iter().enumerate().all(|(i, &v)| {
                    mu.arc_status(game, v, cycle[(i + 1) % cycle.len()]) != ArcStatus::Violated
                });
                if !feasible || cycle.iter().all(|&v| mu.get(v).is_top()) {
                    continue;
                }
                ensure!(top % 2 == 0, "feasible finite labeling on odd cycle {cycle:?}");
                let first = spec.truncate(mu.get(cycle[0]), top).unwrap();
                ensure!(
                    cycle.iter().all(|&v| spec.truncate(mu.get(v), top).unwrap() == first),
                    "labels on cycle {cycle:?} disagree above priority {top}"
                );
            }
        }
    }
    Ok(())
}

/// Drives the strategy-iteration loop by hand and checks monotonicity, the loop-head invariant
/// and agreement with the solver and with Zielonka's algorithm.
pub fn check_solve_loop(game: &ParityGame, spec: &TreeSpec, rule: PivotRule) -> Check {
    let mut tau = Strategy::lowest(game);
    let mut mu = NodeLabeling::min(spec, game.n());
    let mut round = 0u64;
    loop {
        let h = StrategySubgraph::new(game, &tau).map_err(|e| e.to_string())?;
        let next = if spec.kind() == TreeKind::Perfect {
            least_fixed_point_perfect(&h, &mu)
        } else {
            least_fixed_point_lc(&h, &mu)
        }
        .map_err(|e| e.to_string())?;
        ensure!(mu.le(&next), "round {round}: labels decreased");
        ensure!(round == 0 || next != mu, "round {round}: no label increased");
        ensure!(next.is_feasible(&h), "round {round}: loop head infeasible in G_τ");
        ensure!(!next.has_loose_arc(&h), "round {round}: loop head has a loose arc");
        mu = next;
        if admissible_arcs(game, &mu).is_empty() {
            break;
        }
        tau = pivot(game, &tau, &mu, rule, round).map_err(|e| e.to_string())?;
        round += 1;
        ensure!(round <= 10_000, "no termination");
    }
    let opts = SolveOptions { rule, ..SolveOptions::default() };
    let solved = strategy_iteration_solve(game, spec, &opts).map_err(|e| e.to_string())?;
    ensure!(solved.labeling == mu, "solver and hand-driven loop disagree");
    if spec.capacity() >= game.n() as u64 {
        let z = zielonka_solve(game);
        ensure!(solved.even_wins == z.even_wins, "winners {:?} vs zielonka {:?}", solved.even_wins, z.even_wins);
    }
    for &(v, w) in &solved.even_strategy {
        ensure!(game.owner(v) == Owner::Even, "witness arc from Odd node {v}");
        ensure!(mu.arc_status(game, v, w) != ArcStatus::Violated, "witness arc {v}->{w} violated");
    }
    Ok(())
}
