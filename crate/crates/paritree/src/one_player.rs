//! Least fixed points `μ^{G↑_τ}` of 1-player games for Even.
//!
//! Two engines are provided. [`least_fixed_point_lc`] seeds the base nodes through the
//! auxiliary digraph and finishes with Bellman–Ford; [`least_fixed_point_perfect`] is the
//! Dijkstra-style label-setting method for perfect trees.
//!
//! ```
//! use paritree::game::{parse_pgsolver, Strategy, StrategySubgraph};
//! use paritree::labeling::NodeLabeling;
//! use paritree::one_player::least_fixed_point_lc;
//! use paritree::tree::TreeSpec;
//!
//! let g = parse_pgsolver("parity 1;\n0 2 0 1;\n1 1 1 0;\n").unwrap();
//! let tau = Strategy::lowest(&g);
//! let h = StrategySubgraph::new(&g, &tau).unwrap();
//! let spec = TreeSpec::perfect(2, 1).unwrap();
//! let mu = least_fixed_point_lc(&h, &NodeLabeling::min(&spec, 2)).unwrap();
//! assert_eq!(mu.to_text(&g), "0: (0)\n1: (1)\n");
//! ```

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt::Write as _;

use crate::error::{usage, Result};
use crate::game::{GameView, NodeId, ParityGame, StrategySubgraph};
use crate::graph;
use crate::labeling::{ArcStatus, NodeLabeling};
use crate::tree::{zeta_unchecked, Label, TreeKind, TreeSpec};

/// Base nodes `B(G_τ)` and, per base node `w`, the subgraphs `K_w` and `J_w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseNodeReport {
    pub base_nodes: Vec<NodeId>,
    pub info: BTreeMap<NodeId, BaseNodeInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseNodeInfo {
    /// `K_w`: SCC of `w` among the nodes of priority at most `π(w)`.
    pub k_nodes: Vec<NodeId>,
    /// `J_w`: nodes reaching `w` inside `K_w` without an intermediate node of priority `π(w)`.
    pub j_nodes: Vec<NodeId>,
    pub j_arcs: Vec<(NodeId, NodeId)>,
    /// `Π(J_w)`.
    pub j_top: Vec<NodeId>,
}

impl BaseNodeReport {
    pub fn is_base(&self, v: NodeId) -> bool {
        self.info.contains_key(&v)
    }

    pub fn info(&self, w: NodeId) -> Option<&BaseNodeInfo> {
        self.info.get(&w)
    }
}

impl BaseNodeInfo {
    /// Tails of the auxiliary arcs entering `w`.
    fn tails(&self, w: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.j_top.iter().copied().filter(|&v| v != w).collect();
        if self.j_arcs.iter().any(|&(v, _)| v == w) {
            out.push(w);
        }
        out.sort_unstable();
        out
    }

    /// `N⁺_{J_w}(v)`.
    fn heads(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.j_arcs.iter().filter(move |a| a.0 == v).map(|a| a.1)
    }
}

/// Computes `B(G_τ)` by recursive SCC decomposition, then `K_w` and `J_w`.
pub fn find_base_nodes(h: &StrategySubgraph<'_>) -> BaseNodeReport {
    let n = h.n();
    let mut base = Vec::new();
    let mut stamp = vec![0usize; n];
    let mut index = vec![0usize; n];
    let mut round = 0;
    let mut stack: Vec<Vec<NodeId>> = vec![(0..n).collect()];
    while let Some(set) = stack.pop() {
        round += 1;
        for (i, &v) in set.iter().enumerate() {
            stamp[v] = round;
            index[v] = i;
        }
        let mut arcs = Vec::new();
        for (i, &v) in set.iter().enumerate() {
            arcs.extend(h.succ(v).iter().filter(|&&w| stamp[w] == round).map(|&w| (i, index[w])));
        }
        for comp in graph::sccs(set.len(), arcs) {
            let nodes: Vec<NodeId> = comp.iter().map(|&i| set[i]).collect();
            if nodes.len() == 1 && !h.succ(nodes[0]).contains(&nodes[0]) {
                continue;
            }
            let p = nodes.iter().map(|&v| h.priority(v)).max().unwrap();
            if p % 2 == 0 {
                base.extend(nodes.iter().copied().filter(|&v| h.priority(v) == p));
            }
            let rest: Vec<NodeId> = nodes.into_iter().filter(|&v| h.priority(v) < p).collect();
            if !rest.is_empty() {
                stack.push(rest);
            }
        }
    }
    base.sort_unstable();

    let mut comp_by_priority: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut info = BTreeMap::new();
    for &w in &base {
        let p = h.priority(w);
        let comp_of = comp_by_priority.entry(p).or_insert_with(|| {
            let arcs = h
                .arcs()
                .filter(|&(v, x)| h.priority(v) <= p && h.priority(x) <= p)
                .collect::<Vec<_>>();
            let mut comp_of = vec![0; n];
            for (c, nodes) in graph::sccs(n, arcs).into_iter().enumerate() {
                for v in nodes {
                    comp_of[v] = c;
                }
            }
            comp_of
        });
        let k_nodes: Vec<NodeId> = (0..n).filter(|&v| comp_of[v] == comp_of[w]).collect();
        let mut in_k = vec![false; n];
        for &v in &k_nodes {
            in_k[v] = true;
        }
        let blocked = |v: NodeId| v != w && h.priority(v) == p;
        let mut in_j = vec![false; n];
        in_j[w] = true;
        let mut queue = vec![w];
        while let Some(x) = queue.pop() {
            if blocked(x) {
                continue;
            }
            for &y in h.pred(x) {
                if in_k[y] && !in_j[y] {
                    in_j[y] = true;
                    queue.push(y);
                }
            }
        }
        let j_nodes: Vec<NodeId> = (0..n).filter(|&v| in_j[v]).collect();
        let j_arcs = j_nodes
            .iter()
            .flat_map(|&v| h.succ(v).iter().map(move |&x| (v, x)))
            .filter(|&(_, x)| in_j[x] && !blocked(x))
            .collect();
        let j_top = j_nodes.iter().copied().filter(|&v| h.priority(v) == p).collect();
        info.insert(
            w,
            BaseNodeInfo {
                k_nodes,
                j_nodes,
                j_arcs,
                j_top,
            },
        );
    }
    BaseNodeReport {
        base_nodes: base,
        info,
    }
}

/// The auxiliary digraph `D` on `B(G_τ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxiliaryDigraph {
    pub arcs: Vec<(NodeId, NodeId)>,
    /// The sets `Π(K_w)`, each strongly connected in `D`.
    pub components: Vec<Vec<NodeId>>,
    /// Per arc, one cost per chain of the component's height in `chain_info` order;
    /// `None` is ∞. Empty until [`assign_costs`] runs.
    pub costs: BTreeMap<(NodeId, NodeId), Vec<Option<u32>>>,
}

impl AuxiliaryDigraph {
    /// One line per arc: `v -> w : [c0, c1]`, with `inf` for ∞.
    pub fn dump(&self, game: &ParityGame) -> String {
        let mut out = String::new();
        for &(v, w) in &self.arcs {
            let costs: Vec<String> = self
                .costs
                .get(&(v, w))
                .map(|cs| {
                    cs.iter()
                        .map(|c| c.map_or_else(|| "inf".to_string(), |c| c.to_string()))
                        .collect()
                })
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{} -> {} : [{}]",
                game.display_name(v),
                game.display_name(w),
                costs.join(", ")
            );
        }
        out
    }
}

/// Arcs and components of `D`; costs are left empty.
pub fn build_auxiliary_digraph(report: &BaseNodeReport) -> AuxiliaryDigraph {
    let mut arcs = Vec::new();
    let mut groups: BTreeMap<(NodeId, usize), Vec<NodeId>> = BTreeMap::new();
    for (&w, info) in &report.info {
        arcs.extend(info.tails(w).into_iter().map(|v| (v, w)));
        groups
            .entry((info.k_nodes[0], info.k_nodes.len()))
            .or_default()
            .push(w);
    }
    arcs.sort_unstable();
    AuxiliaryDigraph {
        arcs,
        components: groups.into_values().collect(),
        costs: BTreeMap::new(),
    }
}

/// Drop passes over `arcs` in the given order; stops early once a pass changes nothing.
fn relax(
    game: &ParityGame,
    nu: &mut NodeLabeling,
    arcs: &[(NodeId, NodeId)],
    passes: usize,
    mut on_pass: impl FnMut(&NodeLabeling),
) {
    for _ in 0..passes {
        let mut changed = false;
        for &(v, w) in arcs {
            let dropped = nu.drop_arc(game, v, w);
            if dropped < *nu.get(v) {
                nu.set(v, dropped);
                changed = true;
            }
        }
        on_pass(nu);
        if !changed {
            break;
        }
    }
}

/// Bellman–Ford on `G_τ`: `n − 1` passes of Drop over all arcs in ascending order.
pub fn bellman_ford(h: &StrategySubgraph<'_>, nu: &NodeLabeling) -> NodeLabeling {
    bellman_ford_traced(h, nu, |_| {})
}

/// As [`bellman_ford`], reporting the labeling after every pass.
pub fn bellman_ford_traced(
    h: &StrategySubgraph<'_>,
    nu: &NodeLabeling,
    on_pass: impl FnMut(&NodeLabeling),
) -> NodeLabeling {
    let arcs: Vec<_> = h.arcs().collect();
    let mut out = nu.clone();
    relax(h.game(), &mut out, &arcs, h.n().saturating_sub(1), on_pass);
    out
}

/// Drop fixed point on `J_w` in `tree`, with `w` pinned to the tree's minimum leaf.
fn run_on_j(h: &StrategySubgraph<'_>, info: &BaseNodeInfo, w: NodeId, tree: &TreeSpec) -> NodeLabeling {
    let mut nu = NodeLabeling::top(tree, h.n());
    nu.set(w, Label::Leaf(tree.min_leaf()));
    relax(h.game(), &mut nu, &info.j_arcs, info.j_nodes.len().saturating_sub(1), |_| {});
    nu
}

fn base_info(report: &BaseNodeReport, w: NodeId) -> Result<&BaseNodeInfo> {
    match report.info(w) {
        Some(i) => Ok(i),
        None => usage(format!("node {w} is not a base node")),
    }
}

/// Costs `c^k(vw)` of the auxiliary arcs entering `w`, found by searching chain `k` for the
/// first position at which each node of `J_w` gets a finite label.
pub fn arc_costs_generic(
    h: &StrategySubgraph<'_>,
    report: &BaseNodeReport,
    w: NodeId,
    spec: &TreeSpec,
    k: usize,
) -> Result<Vec<(NodeId, Option<u32>)>> {
    let info = base_info(report, w)?;
    let j = h.priority(w) as usize / 2;
    let chains = spec.chain_info(j)?;
    let Some(chain) = chains.chain(k) else {
        return usage(format!("no chain k={k} at height {j}"));
    };
    let positions = &chain.positions;
    let mut cache: HashMap<usize, NodeLabeling> = HashMap::new();
    let mut finite_at = |idx: usize, v: NodeId| -> Result<bool> {
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(idx) {
            let tree = spec.chain_tree(j, k, positions[idx])?;
            e.insert(run_on_j(h, info, w, &tree));
        }
        Ok(!cache[&idx].get(v).is_top())
    };

    let len = positions.len();
    let mut threshold: HashMap<NodeId, Option<usize>> = HashMap::new();
    if len <= 3 {
        for &v in &info.j_nodes {
            let mut t = None;
            for idx in 0..len {
                if finite_at(idx, v)? {
                    t = Some(idx);
                    break;
                }
            }
            threshold.insert(v, t);
        }
    } else {
        let mut work = vec![(0, len, info.j_nodes.clone())];
        while let Some((lo, hi, nodes)) = work.pop() {
            if nodes.is_empty() {
                continue;
            }
            if lo == hi {
                for v in nodes {
                    threshold.insert(v, (lo < len).then_some(lo));
                }
                continue;
            }
            let mid = (lo + hi) / 2;
            let (mut below, mut above) = (Vec::new(), Vec::new());
            for v in nodes {
                if finite_at(mid, v)? {
                    below.push(v);
                } else {
                    above.push(v);
                }
            }
            work.push((lo, mid, below));
            work.push((mid + 1, hi, above));
        }
    }

    Ok(info
        .tails(w)
        .into_iter()
        .map(|v| {
            let t = info.heads(v).filter_map(|u| threshold[&u]).min();
            (v, t.map(|idx| positions[idx]))
        })
        .collect())
}

/// Succinct trees only: all costs into `w` from a single run in the largest chain member,
/// `c(vw) = L − max ζ(ν'(u))` rounded up to a position of the chain.
pub fn arc_costs_succinct(
    h: &StrategySubgraph<'_>,
    report: &BaseNodeReport,
    w: NodeId,
    spec: &TreeSpec,
) -> Result<Vec<(NodeId, Option<u32>)>> {
    if spec.kind() != TreeKind::Succinct {
        return usage("the ζ cost shortcut needs a succinct tree");
    }
    let info = base_info(report, w)?;
    let j = h.priority(w) as usize / 2;
    let chains = spec.chain_info(j)?;
    let positions = &chains.chains[0].positions;
    let top = *positions.last().expect("chains are nonempty");
    let nu = run_on_j(h, info, w, &spec.chain_tree(j, 0, top)?);
    Ok(info
        .tails(w)
        .into_iter()
        .map(|v| {
            let zeta = info.heads(v).map(|u| zeta_unchecked(nu.get(u))).max().unwrap_or(-1);
            let raw = i64::from(top) - zeta;
            (v, positions.iter().copied().find(|&p| i64::from(p) >= raw))
        })
        .collect())
}

/// Fills `aux.costs` for every arc and every chain.
pub fn assign_costs(
    h: &StrategySubgraph<'_>,
    report: &BaseNodeReport,
    aux: &mut AuxiliaryDigraph,
    spec: &TreeSpec,
) -> Result<()> {
    aux.costs.clear();
    for comp in &aux.components {
        let j = h.priority(comp[0]) as usize / 2;
        let chains = spec.chain_info(j)?;
        for &w in comp {
            for (idx, chain) in chains.chains.iter().enumerate() {
                let costs = if spec.kind() == TreeKind::Succinct {
                    arc_costs_succinct(h, report, w, spec)?
                } else {
                    arc_costs_generic(h, report, w, spec, chain.k)?
                };
                for (v, c) in costs {
                    let slot = aux
                        .costs
                        .entry((v, w))
                        .or_insert_with(|| vec![None; chains.num_chains()]);
                    slot[idx] = c;
                }
            }
        }
    }
    Ok(())
}

/// For each node, the least `c` such that the node lies on a cycle using only arcs of cost
/// at most `c`; `None` when no such cycle exists.
pub fn min_bottleneck_cycle_costs(
    nodes: &[NodeId],
    arcs: &[((NodeId, NodeId), Option<u32>)],
) -> BTreeMap<NodeId, Option<u32>> {
    let local: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut levels: Vec<u32> = arcs.iter().filter_map(|a| a.1).collect();
    levels.sort_unstable();
    levels.dedup();
    let mut cache: HashMap<usize, Vec<bool>> = HashMap::new();
    let mut cyclic = |t: usize| -> Vec<bool> {
        cache
            .entry(t)
            .or_insert_with(|| {
                let cheap: Vec<(usize, usize)> = arcs
                    .iter()
                    .filter(|a| a.1.is_some_and(|c| c <= levels[t]))
                    .filter_map(|a| Some((*local.get(&a.0 .0)?, *local.get(&a.0 .1)?)))
                    .collect();
                graph::on_cycle(nodes.len(), &cheap)
            })
            .clone()
    };
    let mut out = BTreeMap::new();
    for (x, &v) in nodes.iter().enumerate() {
        if levels.is_empty() || !cyclic(levels.len() - 1)[x] {
            out.insert(v, None);
            continue;
        }
        let (mut lo, mut hi) = (0, levels.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cyclic(mid)[x] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        out.insert(v, Some(levels[lo]));
    }
    out
}

fn check_one_player(h: &StrategySubgraph<'_>, mu: &NodeLabeling) -> Result<()> {
    mu.check(h.game())?;
    if mu.has_loose_arc(h) {
        return usage("the starting labeling has a loose arc in G_τ");
    }
    Ok(())
}

/// Initial base-node labels `ν(w) = min_k Raise(μ(w), i^k(w), π(w)/2, k)`; ⊤ elsewhere.
pub fn initial_base_labels(
    h: &StrategySubgraph<'_>,
    report: &BaseNodeReport,
    mu: &NodeLabeling,
) -> Result<NodeLabeling> {
    let spec = mu.spec();
    let mut aux = build_auxiliary_digraph(report);
    assign_costs(h, report, &mut aux, spec)?;
    let mut nu = NodeLabeling::top(spec, h.n());
    for comp in &aux.components {
        let j = h.priority(comp[0]) as usize / 2;
        let depth = spec.height() - j;
        let chains = spec.chain_info(j)?;
        let per_chain: Vec<BTreeMap<NodeId, Option<u32>>> = (0..chains.num_chains())
            .map(|idx| {
                let arcs: Vec<_> = aux
                    .arcs
                    .iter()
                    .filter(|a| comp.contains(&a.1))
                    .map(|&a| (a, aux.costs[&a][idx]))
                    .collect();
                min_bottleneck_cycle_costs(comp, &arcs)
            })
            .collect();
        for &w in comp {
            let Label::Leaf(xi) = mu.get(w) else { continue };
            let is: Vec<(usize, u32)> = chains
                .chains
                .iter()
                .zip(&per_chain)
                .filter_map(|(c, m)| m[&w].map(|i| (c.k, i)))
                .collect();
            let label = if spec.kind() == TreeKind::Strahler && is.iter().any(|&(_, i)| i == 0) {
                let short = if spec.is_min_below(xi, depth) {
                    Label::Leaf(xi.clone())
                } else {
                    spec.next_subtree_min(xi, depth)
                };
                debug_assert_eq!(
                    Some(&short),
                    is.iter().map(|&(k, i)| spec.raise_unchecked(xi, i, j, k)).min().as_ref()
                );
                short
            } else {
                let mut best = Label::Top;
                for &(k, i) in &is {
                    best = best.min(spec.raise(xi, i, j, k)?);
                }
                best
            };
            nu.set(w, label);
        }
    }
    Ok(nu)
}

/// Label-correcting engine: base-node initialization followed by Bellman–Ford.
pub fn least_fixed_point_lc(h: &StrategySubgraph<'_>, mu: &NodeLabeling) -> Result<NodeLabeling> {
    check_one_player(h, mu)?;
    let report = find_base_nodes(h);
    let nu = initial_base_labels(h, &report, mu)?;
    Ok(bellman_ford(h, &nu))
}

/// `Φ(v) = (Φ_{2h}(v), Φ_{2h−2}(v), …, Φ_2(v))` for a tree of height `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialVector {
    values: Vec<Vec<u32>>,
}

impl PotentialVector {
    pub fn get(&self, v: NodeId) -> &[u32] {
        &self.values[v]
    }

    /// `Φ_p(v)` for even `p`.
    pub fn phi(&self, v: NodeId, p: u32) -> u32 {
        let h = self.values[v].len();
        self.values[v][h - p as usize / 2]
    }

    /// `Φ^ν(v)`: `Φ` interlaced with the components of `ν(v)`; `None` is ∞.
    pub fn interlaced(&self, v: NodeId, label: &Label) -> Option<Vec<u64>> {
        let leaf = label.leaf()?;
        Some(
            self.values[v]
                .iter()
                .zip(leaf.keys())
                .flat_map(|(&phi, &c)| [u64::from(phi), c])
                .collect(),
        )
    }
}

/// Topological numbering of `H_p` for every even `p ≤ 2·height`, where `H` is `G_τ`
/// without the out-arcs of base nodes.
pub fn compute_phi(
    h: &StrategySubgraph<'_>,
    report: &BaseNodeReport,
    height: usize,
) -> PotentialVector {
    let n = h.n();
    let mut values = vec![vec![0; height]; n];
    for (q, p) in (1..=height).rev().map(|x| 2 * x as u32).enumerate() {
        let arcs: Vec<_> = h
            .arcs()
            .filter(|&(v, w)| !report.is_base(v) && h.priority(v) <= p && h.priority(w) <= p)
            .collect();
        let mut next = 1;
        for comp in graph::sccs(n, arcs) {
            if h.priority(comp[0]) > p {
                continue;
            }
            for v in comp {
                values[v][q] = next;
            }
            next += 1;
        }
    }
    PotentialVector { values }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Potential {
    Finite(Vec<u64>),
    Infinite,
}

/// Label-setting engine: keeps `ν` on the base nodes, resets the rest to ⊤ and admits nodes
/// in order of the potential `Φ^ν`, ties broken by node id.
pub fn dijkstra(h: &StrategySubgraph<'_>, nu: &NodeLabeling) -> Result<NodeLabeling> {
    dijkstra_traced(h, nu, |_, _| {})
}

/// As [`dijkstra`], reporting each admitted non-base node with its potential `Φ^ν`
/// (`None` for ∞).
pub fn dijkstra_traced(
    h: &StrategySubgraph<'_>,
    nu: &NodeLabeling,
    mut on_admit: impl FnMut(NodeId, Option<&[u64]>),
) -> Result<NodeLabeling> {
    let game = h.game();
    nu.check(game)?;
    let report = find_base_nodes(h);
    let phi = compute_phi(h, &report, nu.spec().height());
    let mut out = nu.clone();
    let mut settled = vec![false; h.n()];
    for v in game.nodes() {
        if report.is_base(v) {
            settled[v] = true;
        } else {
            out.set(v, Label::Top);
        }
    }
    let key = |out: &NodeLabeling, v: NodeId| match phi.interlaced(v, out.get(v)) {
        Some(k) => Potential::Finite(k),
        None => Potential::Infinite,
    };
    let mut heap = BinaryHeap::new();
    let settle = |u: NodeId, out: &mut NodeLabeling, heap: &mut BinaryHeap<_>, settled: &[bool]| {
        for &v in h.pred(u) {
            if settled[v] {
                continue;
            }
            let dropped = out.drop_arc(game, v, u);
            if dropped < *out.get(v) {
                out.set(v, dropped);
                heap.push(Reverse((key(out, v), v)));
            }
        }
    };
    for &w in &report.base_nodes {
        settle(w, &mut out, &mut heap, &settled);
    }
    let mut last: Option<Potential> = None;
    while let Some(Reverse((k, u))) = heap.pop() {
        if settled[u] || k != key(&out, u) {
            continue;
        }
        debug_assert!(last.as_ref().is_none_or(|l| *l <= k), "admission order decreased");
        match &k {
            Potential::Finite(key) => on_admit(u, Some(key)),
            Potential::Infinite => on_admit(u, None),
        }
        last = Some(k);
        settled[u] = true;
        settle(u, &mut out, &mut heap, &settled);
    }
    Ok(out)
}

/// Perfect trees: one Lift on each base node whose arcs are all violated, then [`dijkstra`].
///
/// The Lift pre-step is exact only when every `K_w` fits in the tree's capacity; otherwise
/// this falls back to [`least_fixed_point_lc`], which has the same fixed point.
pub fn least_fixed_point_perfect(
    h: &StrategySubgraph<'_>,
    mu: &NodeLabeling,
) -> Result<NodeLabeling> {
    if mu.spec().kind() != TreeKind::Perfect {
        return usage("the label-setting engine needs a perfect tree");
    }
    check_one_player(h, mu)?;
    let game = h.game();
    let report = find_base_nodes(h);
    let capacity = mu.spec().capacity();
    if report.info.values().any(|i| i.k_nodes.len() as u64 > capacity) {
        return least_fixed_point_lc(h, mu);
    }
    let mut lifted = mu.clone();
    for &w in &report.base_nodes {
        let all_violated = h
            .succ(w)
            .iter()
            .all(|&x| lifted.arc_status(game, w, x) == ArcStatus::Violated);
        if all_violated {
            let l = lifted.lift_node(h, w);
            lifted.set(w, l);
        }
    }
    dijkstra(h, &lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{game, FIVE_NODE, NINE_NODE};
    use crate::game::Strategy;

    fn labels(spec: &TreeSpec, texts: &[&str]) -> NodeLabeling {
        let values = texts.iter().map(|t| spec.parse_label(t).unwrap()).collect();
        NodeLabeling::from_values(spec, values).unwrap()
    }

    fn rendered(mu: &NodeLabeling) -> Vec<String> {
        mu.values().iter().map(|l| mu.spec().render(l)).collect()
    }

    const MIDDLE: [&str; 5] = ["(0,1)", "(0,2)", "(1,0)", "(0,0)", "(1,0)"];

    #[test]
    fn nine_node_base_nodes_and_aux_arcs() {
        let g = game(NINE_NODE);
        let tau = Strategy::lowest(&g);
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let report = find_base_nodes(&h);
        assert_eq!(report.base_nodes, vec![2, 3, 4, 7]);
        let aux = build_auxiliary_digraph(&report);
        let mut expected = vec![(2, 2), (7, 4), (4, 7), (4, 3), (3, 7), (3, 3)];
        expected.sort_unstable();
        assert_eq!(aux.arcs, expected);
        assert_eq!(aux.components, vec![vec![2], vec![3, 4, 7]]);
    }

    #[test]
    fn five_node_base_node_d() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let report = find_base_nodes(&h);
        assert_eq!(report.base_nodes, vec![3]);
        let aux = build_auxiliary_digraph(&report);
        assert_eq!(aux.arcs, vec![(3, 3)]);
        let spec = TreeSpec::perfect(3, 2).unwrap();
        assert_eq!(arc_costs_generic(&h, &report, 3, &spec, 0).unwrap(), vec![(3, Some(0))]);
    }

    #[test]
    fn five_node_first_response_labels() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let spec = TreeSpec::perfect(3, 2).unwrap();
        let start = NodeLabeling::min(&spec, 5);
        assert_eq!(rendered(&least_fixed_point_lc(&h, &start).unwrap()), MIDDLE);
        assert_eq!(rendered(&least_fixed_point_perfect(&h, &start).unwrap()), MIDDLE);
        let seed = labels(&spec, &["TOP", "TOP", "TOP", "(0,0)", "TOP"]);
        assert_eq!(rendered(&bellman_ford(&h, &seed)), MIDDLE);
        assert_eq!(rendered(&dijkstra(&h, &seed).unwrap()), MIDDLE);
    }

    #[test]
    fn five_node_second_response_labels() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 1), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let spec = TreeSpec::perfect(3, 2).unwrap();
        let mu = labels(&spec, &MIDDLE);
        let right = ["TOP", "TOP", "(1,0)", "(0,0)", "(1,0)"];
        assert_eq!(rendered(&least_fixed_point_lc(&h, &mu).unwrap()), right);
        assert_eq!(rendered(&least_fixed_point_perfect(&h, &mu).unwrap()), right);
    }

    #[test]
    fn loose_precondition_is_checked() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let spec = TreeSpec::perfect(3, 2).unwrap();
        let mu = labels(&spec, &["(2,2)", "(0,0)", "(0,0)", "(0,0)", "(0,0)"]);
        assert!(least_fixed_point_lc(&h, &mu).is_err());
        let succinct = TreeSpec::succinct(3, 2).unwrap();
        assert!(least_fixed_point_perfect(&h, &NodeLabeling::min(&succinct, 5)).is_err());
    }

    #[test]
    fn bottleneck_examples() {
        let all0 = [((3, 4), Some(0)), ((4, 3), Some(0)), ((4, 7), Some(0)), ((7, 4), Some(0))];
        let m = min_bottleneck_cycle_costs(&[3, 4, 7], &all0);
        assert!(m.values().all(|&c| c == Some(0)));
        let pair = [((0, 1), Some(3)), ((1, 0), Some(1))];
        let m = min_bottleneck_cycle_costs(&[0, 1], &pair);
        assert_eq!(m.values().copied().collect::<Vec<_>>(), vec![Some(3), Some(3)]);
        assert_eq!(min_bottleneck_cycle_costs(&[5], &[])[&5], None);
        let inf = [((5, 5), None)];
        assert_eq!(min_bottleneck_cycle_costs(&[5], &inf)[&5], None);
    }

    #[test]
    fn succinct_costs_match_generic_on_nine_node() {
        let g = game(NINE_NODE);
        let tau = Strategy::lowest(&g);
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let report = find_base_nodes(&h);
        for spec in [TreeSpec::succinct(9, 4).unwrap(), TreeSpec::succinct(3, 2).unwrap()] {
            for &w in &report.base_nodes {
                assert_eq!(
                    arc_costs_succinct(&h, &report, w, &spec).unwrap(),
                    arc_costs_generic(&h, &report, w, &spec, 0).unwrap()
                );
            }
        }
    }

    #[test]
    fn phi_properties_five_node() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let report = find_base_nodes(&h);
        let phi = compute_phi(&h, &report, 2);
        for v in g.nodes() {
            assert_eq!(phi.phi(v, 2) == 0, g.priority(v) > 2);
            assert!(phi.phi(v, 4) > 0);
        }
        // H_2 holds A, B and E with the single arc B -> A.
        assert!(phi.phi(1, 2) > phi.phi(0, 2));
        assert!(phi.phi(4, 2) != phi.phi(0, 2) && phi.phi(4, 2) != phi.phi(1, 2));
    }
}
