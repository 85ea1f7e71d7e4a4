//! Slow reference implementations used to cross-check the solvers.
//!
//! Nothing here shares code with the engines it checks beyond leaf enumeration: arc
//! statuses are recomputed from an explicit sorted leaf table, Raise is a literal scan and
//! embeddings are decided on explicit trees.

use std::collections::HashMap;

use crate::error::{usage, Result};
use crate::game::{GameView, NodeId, Owner, ParityGame};
use crate::labeling::NodeLabeling;
use crate::tree::{Label, Leaf, TreeSpec};

/// Largest tree the oracles will enumerate.
pub const MAX_ORACLE_LEAVES: u64 = 1_000_000;

/// Winning regions of both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinnerPartition {
    pub even_wins: Vec<NodeId>,
    pub odd_wins: Vec<NodeId>,
}

/// Zielonka's recursive algorithm.
pub fn zielonka_solve(game: &ParityGame) -> WinnerPartition {
    let all = vec![true; game.n()];
    let (even, _) = zielonka(game, &all);
    let (even_wins, odd_wins) = game.nodes().partition(|&v| even[v]);
    WinnerPartition {
        even_wins,
        odd_wins,
    }
}

fn attractor(game: &ParityGame, mask: &[bool], target: &[bool], player: Owner) -> Vec<bool> {
    let mut attr = target.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for v in game.nodes() {
            if !mask[v] || attr[v] {
                continue;
            }
            let mut succ = game.succ(v).iter().filter(|&&w| mask[w]);
            let pulled = if game.owner(v) == player {
                succ.any(|&w| attr[w])
            } else {
                succ.all(|&w| attr[w])
            };
            if pulled {
                attr[v] = true;
                changed = true;
            }
        }
    }
    attr
}

fn minus(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| x && !y).collect()
}

/// Returns `(W_0, W_1)` of the subgame on `mask`.
fn zielonka(game: &ParityGame, mask: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let n = game.n();
    let Some(p) = game.nodes().filter(|&v| mask[v]).map(|v| game.priority(v)).max() else {
        return (vec![false; n], vec![false; n]);
    };
    let player = if p % 2 == 0 { Owner::Even } else { Owner::Odd };
    let top: Vec<bool> = game.nodes().map(|v| mask[v] && game.priority(v) == p).collect();
    let a = attractor(game, mask, &top, player);
    let (w0, w1) = zielonka(game, &minus(mask, &a));
    let theirs = if player == Owner::Even { w1 } else { w0 };
    if !theirs.contains(&true) {
        return match player {
            Owner::Even => (mask.to_vec(), vec![false; n]),
            Owner::Odd => (vec![false; n], mask.to_vec()),
        };
    }
    let b = attractor(game, mask, &theirs, player.opponent());
    let (mut w0, mut w1) = zielonka(game, &minus(mask, &b));
    let grown = if player == Owner::Even { &mut w1 } else { &mut w0 };
    for v in 0..n {
        grown[v] |= b[v];
    }
    (w0, w1)
}

/// Every leaf of a tree in ascending order.
#[derive(Clone, Debug)]
pub struct LeafTable {
    height: usize,
    leaves: Vec<Vec<u64>>,
}

impl LeafTable {
    pub fn new(spec: &TreeSpec) -> Result<LeafTable> {
        let count = spec.leaf_count();
        if count > MAX_ORACLE_LEAVES.into() {
            return usage(format!("{spec} has {count} leaves; the oracle limit is {MAX_ORACLE_LEAVES}"));
        }
        let leaves: Vec<Vec<u64>> = spec.leaves().map(|l| l.keys().to_vec()).collect();
        debug_assert!(leaves.windows(2).all(|w| w[0] < w[1]));
        Ok(LeafTable {
            height: spec.height(),
            leaves,
        })
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Components compared by an arc whose tail has priority `p`.
    fn kept(&self, p: u32) -> usize {
        self.height - (p as usize / 2)
    }

    fn index(&self, label: &Label) -> Option<usize> {
        let leaf = label.leaf()?;
        Some(self.leaves.binary_search_by(|l| l.as_slice().cmp(leaf.keys())).expect("leaf of this tree"))
    }

    fn label(&self, idx: Option<usize>) -> Label {
        match idx {
            Some(i) => Label::Leaf(Leaf::from_keys(self.leaves[i].clone())),
            None => Label::Top,
        }
    }

    /// Least label whose `p`-truncation is `≥` (even `p`) or `>` (odd `p`) that of `head`.
    fn least_satisfying(&self, head: Option<usize>, p: u32) -> Option<usize> {
        let head = &self.leaves[head?];
        let kept = self.kept(p);
        let key = &head[..kept];
        let idx = if p.is_multiple_of(2) {
            self.leaves.partition_point(|l| &l[..kept] < key)
        } else {
            self.leaves.partition_point(|l| &l[..kept] <= key)
        };
        (idx < self.leaves.len()).then_some(idx)
    }
}

fn idx_max(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

fn idx_min(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

/// Least simultaneous fixed point of the Lift operators of `h` that is at least `mu`,
/// by sweeping all nodes until nothing changes.
pub fn naive_lfp<H: GameView>(h: &H, mu: &NodeLabeling) -> Result<NodeLabeling> {
    let table = LeafTable::new(mu.spec())?;
    naive_lfp_with(&table, h, mu)
}

/// As [`naive_lfp`] with a prebuilt leaf table for `mu`'s tree.
pub fn naive_lfp_with<H: GameView>(
    table: &LeafTable,
    h: &H,
    mu: &NodeLabeling,
) -> Result<NodeLabeling> {
    let game = h.game();
    if mu.len() != game.n() || mu.spec().height() != table.height {
        return usage("labeling does not match the game or the leaf table");
    }
    let mut cur: Vec<Option<usize>> = mu.values().iter().map(|l| table.index(l)).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for v in game.nodes() {
            let p = game.priority(v);
            let lifts = h
                .succ(v)
                .iter()
                .map(|&w| idx_max(cur[v], table.least_satisfying(cur[w], p)));
            let next = match game.owner(v) {
                Owner::Even => lifts.fold(None, |acc: Option<Option<usize>>, x| {
                    Some(acc.map_or(x, |a| idx_min(a, x)))
                }),
                Owner::Odd => lifts.fold(None, |acc: Option<Option<usize>>, x| {
                    Some(acc.map_or(x, |a| idx_max(a, x)))
                }),
            };
            if let Some(next) = next {
                if next != cur[v] {
                    cur[v] = next;
                    changed = true;
                }
            }
        }
    }
    let values = cur.into_iter().map(|i| table.label(i)).collect();
    NodeLabeling::from_values(mu.spec(), values)
}

/// An explicit ordered tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedTree {
    pub children: Vec<OrderedTree>,
}

impl OrderedTree {
    pub fn leaf() -> OrderedTree {
        OrderedTree { children: Vec::new() }
    }

    pub fn node(children: Vec<OrderedTree>) -> OrderedTree {
        OrderedTree { children }
    }

    /// Height-2 tree whose root has children with the given numbers of leaves.
    pub fn two_level(fanouts: &[usize]) -> OrderedTree {
        OrderedTree::node(
            fanouts
                .iter()
                .map(|&f| OrderedTree::node(vec![OrderedTree::leaf(); f]))
                .collect(),
        )
    }

    /// The tree spanned by a sorted list of equal-length tuples.
    pub fn from_tuples(tuples: &[Vec<u64>]) -> OrderedTree {
        fn build(tuples: &[&[u64]]) -> OrderedTree {
            if tuples.first().is_none_or(|t| t.is_empty()) {
                return OrderedTree::leaf();
            }
            let mut children = Vec::new();
            let mut start = 0;
            for i in 1..=tuples.len() {
                if i == tuples.len() || tuples[i][0] != tuples[start][0] {
                    let tails: Vec<&[u64]> = tuples[start..i].iter().map(|t| &t[1..]).collect();
                    children.push(build(&tails));
                    start = i;
                }
            }
            OrderedTree::node(children)
        }
        let refs: Vec<&[u64]> = tuples.iter().map(Vec::as_slice).collect();
        build(&refs)
    }

    /// The whole tree described by `spec`.
    pub fn from_spec(spec: &TreeSpec) -> Result<OrderedTree> {
        Ok(OrderedTree::from_tuples(&LeafTable::new(spec)?.leaves))
    }

    pub fn num_leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(OrderedTree::num_leaves).sum()
        }
    }

    /// Depth of every leaf, if they all agree.
    pub fn uniform_height(&self) -> Option<usize> {
        if self.children.is_empty() {
            return Some(0);
        }
        let hs: Option<Vec<usize>> = self.children.iter().map(OrderedTree::uniform_height).collect();
        let hs = hs?;
        hs.iter().all(|&h| h == hs[0]).then(|| hs[0] + 1)
    }

    /// Height of the largest perfect binary tree minor.
    pub fn strahler_number(&self) -> usize {
        let mut ks: Vec<usize> = self.children.iter().map(OrderedTree::strahler_number).collect();
        ks.sort_unstable_by(|a, b| b.cmp(a));
        match ks.as_slice() {
            [] => 0,
            [a] => *a,
            [a, b, ..] if a == b => a + 1,
            [a, ..] => *a,
        }
    }
}

/// Whether `small` embeds into `host` by an injective order-preserving homomorphism that
/// maps leaves to leaves.
pub fn embeds(small: &OrderedTree, host: &OrderedTree) -> bool {
    fn go<'a>(
        s: &'a OrderedTree,
        t: &'a OrderedTree,
        memo: &mut HashMap<(*const OrderedTree, *const OrderedTree), bool>,
    ) -> bool {
        let key = (s as *const _, t as *const _);
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let r = if s.children.is_empty() {
            t.children.is_empty()
        } else {
            let mut next = 0;
            s.children.iter().all(|c| {
                while next < t.children.len() {
                    next += 1;
                    if go(c, &t.children[next - 1], memo) {
                        return true;
                    }
                }
                false
            })
        };
        memo.insert(key, r);
        r
    }
    go(small, host, &mut HashMap::new())
}

/// `small ⊑ T(spec)`; `small` must have all leaves at depth `spec.height()`.
pub fn embed_check(small: &OrderedTree, spec: &TreeSpec) -> Result<bool> {
    if small.uniform_height() != Some(spec.height()) {
        return usage("tree leaves must all lie at the host height");
    }
    Ok(embeds(small, &OrderedTree::from_spec(spec)?))
}

/// Every ordered tree of the given height, all leaves at that depth, with at most
/// `max_leaves` leaves.
pub fn ordered_trees(max_leaves: usize, height: usize) -> Vec<OrderedTree> {
    fn with_leaves(exact: usize, height: usize, memo: &mut HashMap<(usize, usize), Vec<OrderedTree>>) -> Vec<OrderedTree> {
        if let Some(v) = memo.get(&(exact, height)) {
            return v.clone();
        }
        let out = if height == 0 {
            if exact == 1 {
                vec![OrderedTree::leaf()]
            } else {
                Vec::new()
            }
        } else {
            // Sequences of subtrees of height - 1 whose leaf counts sum to `exact`.
            let mut out = Vec::new();
            let mut stack: Vec<(usize, Vec<OrderedTree>)> = vec![(exact, Vec::new())];
            while let Some((left, kids)) = stack.pop() {
                if left == 0 {
                    if !kids.is_empty() {
                        out.push(OrderedTree::node(kids));
                    }
                    continue;
                }
                for first in 1..=left {
                    for t in with_leaves(first, height - 1, memo) {
                        let mut k = kids.clone();
                        k.push(t);
                        stack.push((left - first, k));
                    }
                }
            }
            out.sort();
            out
        };
        memo.insert((exact, height), out.clone());
        out
    }
    let mut memo = HashMap::new();
    (1..=max_leaves)
        .flat_map(|k| with_leaves(k, height, &mut memo))
        .collect()
}

/// Literal Raise: the least leaf `ξ' ≥ ξ` that is the minimum leaf of a depth-`h − j`
/// subtree shaped like some chain member `T^k_{i',j}` with `i' ≥ i`.
pub fn brute_raise(xi: &Leaf, i: u32, j: usize, k: usize, spec: &TreeSpec) -> Result<Label> {
    let table = LeafTable::new(spec)?;
    if !spec.is_valid_leaf(xi) || j > spec.height() {
        return usage("invalid leaf or subtree height");
    }
    let mut shapes = Vec::new();
    for ip in i..=spec.log_capacity().max(i) {
        if let Ok(member) = spec.chain_tree(j, k, ip) {
            shapes.push(OrderedTree::from_spec(&member)?);
        }
    }
    let depth = spec.height() - j;
    let start = table.leaves.partition_point(|l| l.as_slice() < xi.keys());
    let mut shape_of: HashMap<Vec<u64>, OrderedTree> = HashMap::new();
    for (pos, leaf) in table.leaves.iter().enumerate().skip(start) {
        let prefix = &leaf[..depth];
        let is_min = pos == 0 || table.leaves[pos - 1][..depth] != *prefix;
        if !is_min {
            continue;
        }
        let shape = shape_of.entry(prefix.to_vec()).or_insert_with(|| {
            let below: Vec<Vec<u64>> = table.leaves[pos..]
                .iter()
                .take_while(|l| l[..depth] == *prefix)
                .map(|l| l[depth..].to_vec())
                .collect();
            OrderedTree::from_tuples(&below)
        });
        if shapes.contains(shape) {
            return Ok(Label::Leaf(Leaf::from_keys(leaf.clone())));
        }
    }
    Ok(Label::Top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{game, FIVE_NODE};
    use crate::game::{Strategy, StrategySubgraph};

    #[test]
    fn zielonka_five_node() {
        let w = zielonka_solve(&game(FIVE_NODE));
        assert_eq!(w.even_wins, vec![2, 3, 4]);
        assert_eq!(w.odd_wins, vec![0, 1]);
    }

    #[test]
    fn zielonka_self_loops() {
        let even = ParityGame::new(vec![Owner::Even], vec![2], vec![vec![0]]).unwrap();
        assert_eq!(zielonka_solve(&even).even_wins, vec![0]);
        let odd = ParityGame::new(vec![Owner::Even], vec![1], vec![vec![0]]).unwrap();
        assert_eq!(zielonka_solve(&odd).odd_wins, vec![0]);
    }

    #[test]
    fn naive_lfp_five_node_first_response() {
        let g = game(FIVE_NODE);
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        let spec = TreeSpec::perfect(3, 2).unwrap();
        let out = naive_lfp(&h, &NodeLabeling::min(&spec, 5)).unwrap();
        let texts: Vec<String> = out.values().iter().map(|l| spec.render(l)).collect();
        assert_eq!(texts, ["(0,1)", "(0,2)", "(1,0)", "(0,0)", "(1,0)"]);
        assert_eq!(naive_lfp(&h, &out).unwrap(), out);
    }

    #[test]
    fn embedding_examples() {
        let small_succinct = OrderedTree::from_spec(&TreeSpec::succinct(3, 2).unwrap()).unwrap();
        assert_eq!(small_succinct, OrderedTree::two_level(&[1, 3, 1]));
        let perfect = TreeSpec::perfect(3, 2).unwrap();
        assert!(embed_check(&small_succinct, &perfect).unwrap());
        assert!(!embed_check(&OrderedTree::two_level(&[4]), &perfect).unwrap());
        assert!(embed_check(&OrderedTree::leaf(), &perfect).is_err());
    }

    #[test]
    fn ordered_tree_enumeration() {
        // Compositions of 1..=3 into parts, each part a star: 1 + 2 + 4 = 7 trees.
        assert_eq!(ordered_trees(3, 2).len(), 7);
        assert_eq!(ordered_trees(3, 1).len(), 3);
        assert_eq!(OrderedTree::two_level(&[2, 2]).strahler_number(), 2);
        assert_eq!(OrderedTree::two_level(&[2, 1, 1]).strahler_number(), 1);
        assert_eq!(OrderedTree::two_level(&[1, 1]).strahler_number(), 1);
        assert_eq!(OrderedTree::two_level(&[1]).strahler_number(), 0);
    }

    #[test]
    fn brute_raise_matches_examples() {
        let spec = TreeSpec::succinct(7, 2).unwrap();
        let xi = spec.leaf_from_strs(&["", ""]).unwrap();
        assert_eq!(brute_raise(&xi, 1, 1, 0, &spec).unwrap(), spec.parse_label("(1,0)").unwrap());
        // (ε,ε) is not the least leaf below ε; the next subtree is the path below 10.
        assert_eq!(brute_raise(&xi, 0, 1, 0, &spec).unwrap(), spec.parse_label("(10, )").unwrap());
        assert_eq!(brute_raise(&xi, 0, 1, 0, &spec).unwrap(), spec.raise(&xi, 0, 1, 0).unwrap());
        let min = spec.leaf_from_strs(&["", "00"]).unwrap();
        assert_eq!(brute_raise(&min, 2, 1, 0, &spec).unwrap(), Label::Leaf(min.clone()));
        let last = spec.leaf_from_strs(&["11", ""]).unwrap();
        assert_eq!(brute_raise(&last, 2, 1, 0, &spec).unwrap(), Label::Top);
    }
}
