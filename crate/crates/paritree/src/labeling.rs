//! Node labelings, arc classification, lift and drop, and the progress-measure baseline.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde_json::{Map, Value};

use crate::error::{usage, Error, Result};
use crate::game::{GameView, NodeId, Owner, ParityGame};
use crate::tree::{Label, TreeSpec};

/// A total map from nodes to labels of one tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeLabeling {
    spec: TreeSpec,
    values: Vec<Label>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcStatus {
    Violated,
    Tight,
    Loose,
}

impl NodeLabeling {
    /// Every node at the minimum leaf.
    pub fn min(spec: &TreeSpec, n: usize) -> NodeLabeling {
        NodeLabeling {
            spec: spec.clone(),
            values: vec![Label::Leaf(spec.min_leaf()); n],
        }
    }

    pub fn top(spec: &TreeSpec, n: usize) -> NodeLabeling {
        NodeLabeling {
            spec: spec.clone(),
            values: vec![Label::Top; n],
        }
    }

    pub fn from_values(spec: &TreeSpec, values: Vec<Label>) -> Result<NodeLabeling> {
        for l in &values {
            if let Label::Leaf(leaf) = l {
                if !spec.is_valid_leaf(leaf) {
                    return usage(format!("{leaf:?} is not a leaf of {spec}"));
                }
            }
        }
        Ok(NodeLabeling {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: NodeId) -> &Label {
        &self.values[v]
    }

    pub fn values(&self) -> &[Label] {
        &self.values
    }

    /// Replaces the value of `v`. The label must belong to this labeling's tree.
    pub fn set(&mut self, v: NodeId, label: Label) {
        debug_assert!(label.leaf().is_none_or(|l| self.spec.is_valid_leaf(l)));
        self.values[v] = label;
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &NodeLabeling) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub(crate) fn check(&self, game: &ParityGame) -> Result<()> {
        if self.values.len() != game.n() {
            return usage("labeling and game differ in size");
        }
        if self.spec.height() < game.height() {
            return usage(format!(
                "tree height {} is below d/2 = {}",
                self.spec.height(),
                game.height()
            ));
        }
        Ok(())
    }

    /// Label that makes `vw` tight given the current head label.
    pub(crate) fn target(&self, game: &ParityGame, v: NodeId, w: NodeId) -> Label {
        self.spec.tighten_unchecked(&self.values[w], game.priority(v))
    }

    pub fn arc_status(&self, game: &ParityGame, v: NodeId, w: NodeId) -> ArcStatus {
        match self.values[v].cmp(&self.target(game, v, w)) {
            Ordering::Less => ArcStatus::Violated,
            Ordering::Equal => ArcStatus::Tight,
            Ordering::Greater => ArcStatus::Loose,
        }
    }

    /// Smallest label `≥ μ(v)` for which `vw` is not violated.
    pub fn lift_arc(&self, game: &ParityGame, v: NodeId, w: NodeId) -> Label {
        self.values[v].clone().max(self.target(game, v, w))
    }

    /// Largest label `≤ ν(v)` for which `vw` is not loose.
    pub fn drop_arc(&self, game: &ParityGame, v: NodeId, w: NodeId) -> Label {
        self.values[v].clone().min(self.target(game, v, w))
    }

    /// `Lift_v` over the arcs of `h`: Even takes the cheapest arc, Odd must satisfy all.
    pub fn lift_node<H: GameView>(&self, h: &H, v: NodeId) -> Label {
        let game = h.game();
        let lifts = h.succ(v).iter().map(|&w| self.lift_arc(game, v, w));
        match game.owner(v) {
            Owner::Even => lifts.min(),
            Owner::Odd => lifts.max(),
        }
        .unwrap_or_else(|| self.values[v].clone())
    }

    /// Whether some Even strategy in `h` avoids violated arcs.
    pub fn is_feasible<H: GameView>(&self, h: &H) -> bool {
        self.feasibility_witness(h).is_some()
    }

    /// A non-violated arc per Even node with out-arcs, if the labeling is feasible in `h`.
    pub fn feasibility_witness<H: GameView>(&self, h: &H) -> Option<Vec<Option<NodeId>>> {
        let game = h.game();
        let mut sigma = vec![None; game.n()];
        for v in game.nodes() {
            let mut ok = h
                .succ(v)
                .iter()
                .filter(|&&w| self.arc_status(game, v, w) != ArcStatus::Violated);
            match game.owner(v) {
                Owner::Even => {
                    if h.succ(v).is_empty() {
                        continue;
                    }
                    sigma[v] = Some(*ok.next()?);
                }
                Owner::Odd => {
                    if ok.count() != h.succ(v).len() {
                        return None;
                    }
                }
            }
        }
        Some(sigma)
    }

    /// Whether any arc of `h` is loose.
    pub fn has_loose_arc<H: GameView>(&self, h: &H) -> bool {
        let game = h.game();
        game.nodes()
            .any(|v| h.succ(v).iter().any(|&w| self.arc_status(game, v, w) == ArcStatus::Loose))
    }

    /// `{name or id: "(…)" | "TOP"}`.
    pub fn to_json(&self, game: &ParityGame) -> Value {
        let mut map = Map::new();
        for v in game.nodes() {
            map.insert(game.display_name(v), Value::String(self.spec.render(&self.values[v])));
        }
        Value::Object(map)
    }

    /// Inverse of [`NodeLabeling::to_json`]; every node must be present.
    pub fn from_json(game: &ParityGame, spec: &TreeSpec, json: &Value) -> Result<NodeLabeling> {
        let map = json
            .as_object()
            .ok_or_else(|| Error::Format("labeling must be a JSON object".into()))?;
        let mut values = vec![None; game.n()];
        for (key, text) in map {
            let v = game
                .find(key)
                .ok_or_else(|| Error::Format(format!("unknown node `{key}`")))?;
            let text = text
                .as_str()
                .ok_or_else(|| Error::Format(format!("label of `{key}` is not a string")))?;
            values[v] = Some(spec.parse_label(text)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(v, l)| l.ok_or_else(|| Error::Format(format!("node {} has no label", game.display_name(v)))))
            .collect::<Result<Vec<_>>>()?;
        NodeLabeling::from_values(spec, values)
    }

    /// One line per node, `name: label`.
    pub fn to_text(&self, game: &ParityGame) -> String {
        game.nodes()
            .map(|v| format!("{}: {}\n", game.display_name(v), self.spec.render(&self.values[v])))
            .collect()
    }
}

/// Outcome of the progress-measure baseline.
#[derive(Clone, Debug)]
pub struct ProgressMeasureResult {
    pub labeling: NodeLabeling,
    pub lifts: u64,
}

/// Least simultaneous fixed point of all `Lift_v`, from the all-minimum labeling.
///
/// FIFO worklist seeded with every node; a raised node re-enqueues the predecessors whose
/// arcs it violated. `budget` caps the number of label-raising lifts.
pub fn progress_measure_solve(
    game: &ParityGame,
    spec: &TreeSpec,
    budget: Option<u64>,
) -> Result<ProgressMeasureResult> {
    progress_measure_from(game, NodeLabeling::min(spec, game.n()), budget)
}

/// As [`progress_measure_solve`], resuming from any labeling below the fixed point, such as
/// the partial labeling of an exhausted budget.
pub fn progress_measure_from(
    game: &ParityGame,
    start: NodeLabeling,
    budget: Option<u64>,
) -> Result<ProgressMeasureResult> {
    let mut mu = start;
    mu.check(game)?;
    let mut lifts = 0u64;
    let mut queue: VecDeque<NodeId> = game.nodes().collect();
    let mut queued = vec![true; game.n()];
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let lifted = mu.lift_node(game, v);
        if lifted <= mu.values[v] {
            continue;
        }
        if budget.is_some_and(|b| lifts >= b) {
            return Err(Error::BudgetExhausted {
                budget: budget.unwrap(),
                lifts,
                partial: Box::new(mu),
            });
        }
        mu.values[v] = lifted;
        lifts += 1;
        for &u in game.pred(v) {
            if !queued[u] && mu.arc_status(game, u, v) == ArcStatus::Violated {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }
    Ok(ProgressMeasureResult { labeling: mu, lifts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_pgsolver, Strategy, StrategySubgraph};

    const FIVE_NODE: &str = "0 1 1 1,3 \"A\"; 1 1 0 0 \"B\"; 2 3 0 1,3,4 \"C\"; 3 4 0 4 \"D\"; 4 2 1 2 \"E\";";

    fn labels(spec: &TreeSpec, texts: &[&str]) -> NodeLabeling {
        let values = texts.iter().map(|t| spec.parse_label(t).unwrap()).collect();
        NodeLabeling::from_values(spec, values).unwrap()
    }

    fn rendered(mu: &NodeLabeling) -> Vec<String> {
        mu.values().iter().map(|l| mu.spec().render(l)).collect()
    }

    #[test]
    fn five_node_arc_statuses() {
        let g = parse_pgsolver(FIVE_NODE).unwrap();
        let t = TreeSpec::perfect(3, 2).unwrap();
        let mu = labels(&t, &["TOP", "TOP", "(1,0)", "(0,0)", "(1,0)"]);
        assert_eq!(mu.arc_status(&g, 0, 3), ArcStatus::Loose);
        assert_eq!(mu.arc_status(&g, 2, 3), ArcStatus::Tight);
        assert_eq!(mu.arc_status(&g, 2, 1), ArcStatus::Violated);
        assert_eq!(mu.arc_status(&g, 0, 1), ArcStatus::Tight);
    }

    #[test]
    fn lift_and_drop_examples() {
        let g = parse_pgsolver(FIVE_NODE).unwrap();
        let t = TreeSpec::perfect(3, 2).unwrap();
        let mu = NodeLabeling::min(&t, 5);
        assert_eq!(t.render(&mu.lift_arc(&g, 0, 3)), "(0,1)");

        let fin = labels(&t, &["TOP", "TOP", "(1,0)", "(0,0)", "(1,0)"]);
        assert_eq!(fin.lift_arc(&g, 2, 3), fin.get(2).clone());
        assert_eq!(fin.drop_arc(&g, 2, 3), fin.get(2).clone());

        let even = parse_pgsolver("0 2 0 1; 1 2 0 1;").unwrap();
        let nu = labels(&TreeSpec::perfect(3, 1).unwrap(), &["TOP", "(0)"]);
        assert_eq!(nu.spec().render(&nu.drop_arc(&even, 0, 1)), "(0)");
        let t2 = TreeSpec::perfect(3, 2).unwrap();
        let nu = labels(&t2, &["TOP", "(0,0)"]);
        assert_eq!(t2.render(&nu.drop_arc(&even, 0, 1)), "(0,0)");
    }

    #[test]
    fn feasibility() {
        let g = parse_pgsolver(FIVE_NODE).unwrap();
        let t = TreeSpec::perfect(3, 2).unwrap();
        let fin = labels(&t, &["TOP", "TOP", "(1,0)", "(0,0)", "(1,0)"]);
        let sigma = fin.feasibility_witness(&g).unwrap();
        assert_eq!(sigma[2], Some(3));
        assert!(NodeLabeling::top(&t, 5).is_feasible(&g));
        let mid = labels(&t, &["(0,1)", "(0,2)", "(1,0)", "(0,0)", "(1,0)"]);
        assert!(!mid.is_feasible(&g));
        let tau = Strategy::from_pairs(&g, &[(0, 3), (4, 2)]).unwrap();
        let h = StrategySubgraph::new(&g, &tau).unwrap();
        assert!(mid.is_feasible(&h));
        assert!(!mid.has_loose_arc(&h));
    }

    #[test]
    fn progress_measure_five_node() {
        let g = parse_pgsolver(FIVE_NODE).unwrap();
        let r = progress_measure_solve(&g, &TreeSpec::perfect(3, 2).unwrap(), None).unwrap();
        assert_eq!(rendered(&r.labeling), ["TOP", "TOP", "(1,0)", "(0,0)", "(1,0)"]);
        let r = progress_measure_solve(&g, &TreeSpec::succinct(3, 2).unwrap(), None).unwrap();
        assert_eq!(rendered(&r.labeling), ["TOP", "TOP", "( ,0)", "(0, )", "( ,0)"]);
        let err = progress_measure_solve(&g, &TreeSpec::perfect(3, 2).unwrap(), Some(2)).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted { lifts: 2, .. }));
    }

    #[test]
    fn progress_measure_self_loop() {
        let g = parse_pgsolver("0 2 0 0;").unwrap();
        let t = TreeSpec::perfect(1, 1).unwrap();
        let r = progress_measure_solve(&g, &t, None).unwrap();
        assert_eq!(r.labeling, NodeLabeling::min(&t, 1));
        assert_eq!(r.lifts, 0);
    }

    #[test]
    fn json_round_trip() {
        let g = parse_pgsolver(FIVE_NODE).unwrap();
        let t = TreeSpec::succinct(3, 2).unwrap();
        let mu = labels(&t, &["TOP", "TOP", "( ,0)", "(0, )", "( ,0)"]);
        let json = mu.to_json(&g);
        assert_eq!(json["D"], "(0, )");
        assert_eq!(NodeLabeling::from_json(&g, &t, &json).unwrap(), mu);
    }
}
