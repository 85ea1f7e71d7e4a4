//! Parity games, the PGSolver text format, generators and the mean-payoff export.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Even,
    Odd,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Even => Owner::Odd,
            Owner::Odd => Owner::Even,
        }
    }
}

/// A sinkless game graph with owners and priorities in `1..=d`, `d` even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    owners: Vec<Owner>,
    priorities: Vec<u32>,
    names: Vec<Option<String>>,
    ids: Vec<u64>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
    d: u32,
}

impl ParityGame {
    /// Builds a game with dense ids; successor lists are sorted and deduplicated.
    pub fn new(owners: Vec<Owner>, priorities: Vec<u32>, succ: Vec<Vec<NodeId>>) -> Result<Self> {
        let n = owners.len();
        let ids = (0..n as u64).collect();
        ParityGame::with_meta(owners, priorities, succ, vec![None; n], ids)
    }

    fn with_meta(
        owners: Vec<Owner>,
        priorities: Vec<u32>,
        mut succ: Vec<Vec<NodeId>>,
        names: Vec<Option<String>>,
        ids: Vec<u64>,
    ) -> Result<Self> {
        let n = owners.len();
        if n == 0 {
            return usage("a game needs at least one node");
        }
        if priorities.len() != n || succ.len() != n || names.len() != n || ids.len() != n {
            return usage("node attribute vectors differ in length");
        }
        if let Some(v) = priorities.iter().position(|&p| p == 0) {
            return usage(format!("node {} has priority 0; priorities start at 1", ids[v]));
        }
        let mut pred = vec![Vec::new(); n];
        for (v, out) in succ.iter_mut().enumerate() {
            out.sort_unstable();
            out.dedup();
            if out.is_empty() {
                return usage(format!("node {} is a sink", ids[v]));
            }
            if let Some(&w) = out.iter().find(|&&w| w >= n) {
                return usage(format!("arc {} -> {w} leaves the node range", ids[v]));
            }
            for &w in out.iter() {
                pred[w].push(v);
            }
        }
        let max = *priorities.iter().max().unwrap();
        Ok(ParityGame {
            owners,
            priorities,
            names,
            ids,
            succ,
            pred,
            d: max + max % 2,
        })
    }

    pub fn n(&self) -> usize {
        self.owners.len()
    }

    pub fn m(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Maximum priority rounded up to an even number.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn owner(&self, v: NodeId) -> Owner {
        self.owners[v]
    }

    pub fn priority(&self, v: NodeId) -> u32 {
        self.priorities[v]
    }

    pub fn priorities(&self) -> &[u32] {
        &self.priorities
    }

    pub fn name(&self, v: NodeId) -> Option<&str> {
        self.names[v].as_deref()
    }

    /// Id in the source file (or the dense id for generated games).
    pub fn original_id(&self, v: NodeId) -> u64 {
        self.ids[v]
    }

    /// Name if present, otherwise the original id.
    pub fn display_name(&self, v: NodeId) -> String {
        match &self.names[v] {
            Some(s) => s.clone(),
            None => self.ids[v].to_string(),
        }
    }

    pub fn find(&self, name_or_id: &str) -> Option<NodeId> {
        self.names
            .iter()
            .position(|s| s.as_deref() == Some(name_or_id))
            .or_else(|| {
                let id: u64 = name_or_id.parse().ok()?;
                self.ids.iter().position(|&i| i == id)
            })
    }

    pub fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }

    pub fn pred(&self, v: NodeId) -> &[NodeId] {
        &self.pred[v]
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.n()
    }

    /// All arcs in ascending `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |v| self.succ[v].iter().map(move |&w| (v, w)))
    }

    /// Odd-owned nodes in ascending order.
    pub fn odd_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| self.owners[v] == Owner::Odd)
    }

    /// Tree height `d / 2` needed for this game.
    pub fn height(&self) -> usize {
        self.d as usize / 2
    }

    /// Same graph with every priority shifted by one and owners swapped.
    pub fn dual(&self) -> ParityGame {
        let mut g = self.clone();
        for p in &mut g.priorities {
            *p += 1;
        }
        for o in &mut g.owners {
            *o = o.opponent();
        }
        let max = *g.priorities.iter().max().unwrap();
        g.d = max + max % 2;
        g
    }

    /// Same game with priorities compressed as the parser does.
    pub fn compressed(&self) -> ParityGame {
        let raw: Vec<u64> = self.priorities.iter().map(|&p| u64::from(p)).collect();
        let mut g = self.clone();
        g.priorities = compress(&raw);
        let max = *g.priorities.iter().max().unwrap();
        g.d = max + max % 2;
        g
    }

    /// Subgame induced by `keep` (must stay sinkless); returns the game and the old ids.
    pub fn induced(&self, keep: &[bool]) -> Result<(ParityGame, Vec<NodeId>)> {
        let old: Vec<NodeId> = self.nodes().filter(|&v| keep[v]).collect();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let succ = old
            .iter()
            .map(|&v| {
                self.succ[v]
                    .iter()
                    .filter(|&&w| keep[w])
                    .map(|&w| new_id[w])
                    .collect()
            })
            .collect();
        let g = ParityGame::with_meta(
            old.iter().map(|&v| self.owners[v]).collect(),
            old.iter().map(|&v| self.priorities[v]).collect(),
            succ,
            old.iter().map(|&v| self.names[v].clone()).collect(),
            old.iter().map(|&v| self.ids[v]).collect(),
        )?;
        Ok((g, old))
    }
}

/// Read access to the arcs of a game or of one of its subgraphs.
pub trait GameView {
    fn game(&self) -> &ParityGame;
    fn succ(&self, v: NodeId) -> &[NodeId];
}

impl GameView for ParityGame {
    fn game(&self) -> &ParityGame {
        self
    }

    fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }
}

fn compress(raw: &[u64]) -> Vec<u32> {
    let mut distinct: Vec<u64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut map = HashMap::new();
    let mut cur = 0u32;
    for p in distinct {
        let mut v = cur + 1;
        if u64::from(v % 2) != p % 2 {
            v += 1;
        }
        map.insert(p, v);
        cur = v;
    }
    raw.iter().map(|p| map[p]).collect()
}

/// Splits on `;` outside double quotes.
fn statements(text: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut quoted = false;
    for (i, c) in text.char_indices() {
        match c {
            '"' => quoted = !quoted,
            ';' if !quoted => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if quoted {
        return Err(Error::Format("unterminated node name".into()));
    }
    if !text[start..].trim().is_empty() {
        return Err(Error::Format(format!(
            "missing `;` after `{}`",
            text[start..].trim()
        )));
    }
    Ok(out)
}

type Row = (u64, u64, Owner, Vec<u64>, Option<String>);

/// Parses PGSolver text: `parity <max>;` then `<id> <prio> <owner> <succ>,… ["name"];`.
///
/// Priorities are compressed to the smallest values with the same parity and order;
/// ids are densified, the originals kept for output.
///
/// ```
/// let g = paritree::game::parse_pgsolver("parity 1; 0 2 0 1; 1 1 1 0;").unwrap();
/// assert_eq!((g.n(), g.priority(0), g.priority(1)), (2, 2, 1));
/// ```
pub fn parse_pgsolver(text: &str) -> Result<ParityGame> {
    let fmt = |msg: String| Err(Error::Format(msg));
    let mut rows: Vec<Row> = Vec::new();
    for stmt in statements(text)? {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        let (body, name) = match stmt.find('"') {
            Some(q) => {
                let rest = &stmt[q + 1..];
                let end = rest.rfind('"').unwrap();
                if !rest[end + 1..].trim().is_empty() {
                    return fmt(format!("text after node name in `{stmt}`"));
                }
                (&stmt[..q], Some(rest[..end].to_string()))
            }
            None => (stmt, None),
        };
        let mut toks = body.split_whitespace();
        let first = toks.next().unwrap_or_default();
        if first == "parity" || first == "start" {
            continue;
        }
        let num = |t: Option<&str>, what: &str| -> Result<u64> {
            let t = t.ok_or_else(|| Error::Format(format!("missing {what} in `{stmt}`")))?;
            t.parse()
                .map_err(|_| Error::Format(format!("bad {what} `{t}` in `{stmt}`")))
        };
        let id = num(Some(first), "node id")?;
        let prio = num(toks.next(), "priority")?;
        let owner = match num(toks.next(), "owner")? {
            0 => Owner::Even,
            1 => Owner::Odd,
            o => return fmt(format!("owner of node {id} is {o}, expected 0 or 1")),
        };
        let succ_text: String = toks.collect::<Vec<_>>().join("");
        let succs = succ_text
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Error::Format(format!("bad successor `{s}` of node {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if succs.is_empty() {
            return fmt(format!("node {id} is a sink"));
        }
        rows.push((id, prio, owner, succs, name));
    }
    if rows.is_empty() {
        return fmt("no nodes".into());
    }
    let mut dense: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        if dense.insert(row.0, i).is_some() {
            return fmt(format!("duplicate node id {}", row.0));
        }
    }
    let mut succ = Vec::with_capacity(rows.len());
    for (id, _, _, s, _) in &rows {
        let mapped = s
            .iter()
            .map(|w| {
                dense
                    .get(w)
                    .copied()
                    .ok_or_else(|| Error::Format(format!("node {id} has dangling successor {w}")))
            })
            .collect::<Result<Vec<_>>>()?;
        succ.push(mapped);
    }
    let raw: Vec<u64> = rows.iter().map(|r| r.1).collect();
    ParityGame::with_meta(
        rows.iter().map(|r| r.2).collect(),
        compress(&raw),
        succ,
        rows.iter().map(|r| r.4.clone()).collect(),
        rows.iter().map(|r| r.0).collect(),
    )
    .map_err(|e| match e {
        Error::Usage(m) => Error::Format(m),
        e => e,
    })
}

/// PGSolver text using the original ids.
pub fn write_pgsolver(game: &ParityGame) -> String {
    let max_id = game.ids.iter().max().copied().unwrap_or(0);
    let mut out = format!("parity {max_id};\n");
    for v in game.nodes() {
        let succs: Vec<String> = game.succ[v].iter().map(|&w| game.ids[w].to_string()).collect();
        let owner = match game.owners[v] {
            Owner::Even => 0,
            Owner::Odd => 1,
        };
        write!(out, "{} {} {owner} {}", game.ids[v], game.priorities[v], succs.join(",")).unwrap();
        if let Some(name) = &game.names[v] {
            write!(out, " \"{name}\"").unwrap();
        }
        out.push_str(";\n");
    }
    out
}

/// A positional strategy for Odd: one successor per Odd node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    choice: Vec<Option<NodeId>>,
}

impl Strategy {
    /// Lowest-id successor for every Odd node.
    pub fn lowest(game: &ParityGame) -> Strategy {
        Strategy {
            choice: game
                .nodes()
                .map(|v| (game.owner(v) == Owner::Odd).then(|| game.succ(v)[0]))
                .collect(),
        }
    }

    /// Builds a strategy from `(odd node, successor)` pairs; unspecified Odd nodes get
    /// their lowest successor.
    pub fn from_pairs(game: &ParityGame, pairs: &[(NodeId, NodeId)]) -> Result<Strategy> {
        let mut s = Strategy::lowest(game);
        for &(v, w) in pairs {
            s.set(game, v, w)?;
        }
        Ok(s)
    }

    pub fn get(&self, v: NodeId) -> Option<NodeId> {
        self.choice[v]
    }

    pub fn set(&mut self, game: &ParityGame, v: NodeId, w: NodeId) -> Result<()> {
        if v >= game.n() || game.owner(v) != Owner::Odd {
            return usage(format!("node {v} is not an Odd node"));
        }
        if game.succ(v).binary_search(&w).is_err() {
            return usage(format!("{v} -> {w} is not an arc"));
        }
        self.choice[v] = Some(w);
        Ok(())
    }

    /// `(node, choice)` for every Odd node.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|w| (v, w)))
    }
}

/// `G_τ`: Even keeps all arcs, Odd keeps the chosen one.
#[derive(Clone, Debug)]
pub struct StrategySubgraph<'g> {
    game: &'g ParityGame,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
}

impl<'g> StrategySubgraph<'g> {
    pub fn new(game: &'g ParityGame, tau: &Strategy) -> Result<Self> {
        if tau.choice.len() != game.n() {
            return usage("strategy belongs to a different game");
        }
        let mut succ = Vec::with_capacity(game.n());
        for v in game.nodes() {
            succ.push(match (game.owner(v), tau.get(v)) {
                (Owner::Even, _) => game.succ(v).to_vec(),
                (Owner::Odd, Some(w)) if game.succ(v).binary_search(&w).is_ok() => vec![w],
                (Owner::Odd, _) => return usage(format!("no valid choice for Odd node {v}")),
            });
        }
        let mut pred = vec![Vec::new(); game.n()];
        for (v, out) in succ.iter().enumerate() {
            for &w in out {
                pred[w].push(v);
            }
        }
        Ok(StrategySubgraph { game, succ, pred })
    }

    pub fn n(&self) -> usize {
        self.game.n()
    }

    pub fn priority(&self, v: NodeId) -> u32 {
        self.game.priority(v)
    }

    pub fn pred(&self, v: NodeId) -> &[NodeId] {
        &self.pred[v]
    }

    /// Arcs of `E_τ` in ascending `(tail, head)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n()).flat_map(move |v| self.succ[v].iter().map(move |&w| (v, w)))
    }

    pub fn num_arcs(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

impl GameView for StrategySubgraph<'_> {
    fn game(&self) -> &ParityGame {
        self.game
    }

    fn succ(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }
}

/// Random sinkless game; equal arguments give equal games.
pub fn gen_random(n: usize, d: u32, max_out_degree: usize, seed: u64) -> Result<ParityGame> {
    if n == 0 || d == 0 || max_out_degree == 0 {
        return usage("n, d and the out-degree bound must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owners = Vec::with_capacity(n);
    let mut priorities = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        owners.push(if rng.gen_bool(0.5) { Owner::Even } else { Owner::Odd });
        priorities.push(rng.gen_range(1..=d));
        let deg = rng.gen_range(1..=max_out_degree.min(n));
        succ.push(sample(&mut rng, n, deg).into_vec());
    }
    ParityGame::new(owners, priorities, succ)
}

/// A cycle of `n` Even nodes; node 0 has priority `top`, the others the largest lower
/// priority of the same parity that survives compression (2 for even `top ≥ 4`).
pub fn gen_loop(n: usize, top: u32) -> Result<ParityGame> {
    if n == 0 || top == 0 {
        return usage("a loop needs at least one node and a positive priority");
    }
    let rest = if top > 2 { 2 - top % 2 } else { top };
    let priorities = (0..n).map(|v| if v == 0 { top } else { rest }).collect();
    let succ = (0..n).map(|v| vec![(v + 1) % n]).collect();
    ParityGame::new(vec![Owner::Even; n], priorities, succ)
}

/// Adds the two-node priority-`k` gadget of the progress-measure worst case to the
/// lowest-id node of priority `d`.
pub fn gen_worstcase(base: &ParityGame, k: u32) -> Result<ParityGame> {
    if k.is_multiple_of(2) {
        return usage(format!("gadget priority {k} must be odd"));
    }
    if k >= base.d() {
        return usage(format!("gadget priority {k} must be below d = {}", base.d()));
    }
    let Some(x) = base.nodes().find(|&v| base.priority(v) == base.d()) else {
        return usage(format!("base game has no node of priority {}", base.d()));
    };
    let n = base.n();
    let (a, b) = (n, n + 1);
    let mut owners = base.owners.clone();
    let mut priorities = base.priorities.clone();
    let mut succ = base.succ.clone();
    let mut names = base.names.clone();
    let mut ids = base.ids.clone();
    owners.extend([Owner::Odd, Owner::Odd]);
    priorities.extend([k, k]);
    succ[x].push(a);
    succ.push(vec![b, x]);
    succ.push(vec![a]);
    names.extend([None, None]);
    let next = ids.iter().max().unwrap() + 1;
    ids.extend([next, next + 1]);
    ParityGame::with_meta(owners, priorities, succ, names, ids)
}

/// The game with arc weights `(-n)^π(u)` on every arc `uv`; Even maximises the mean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanPayoffGame {
    pub owners: Vec<Owner>,
    pub arcs: Vec<(NodeId, NodeId, BigInt)>,
}

pub fn to_mean_payoff(game: &ParityGame) -> MeanPayoffGame {
    let base = -BigInt::from(game.n());
    let mut powers: HashMap<u32, BigInt> = HashMap::new();
    let arcs = game
        .arcs()
        .map(|(u, v)| {
            let p = game.priority(u);
            let w = powers.entry(p).or_insert_with(|| base.pow(p)).clone();
            (u, v, w)
        })
        .collect();
    MeanPayoffGame {
        owners: game.owners.clone(),
        arcs,
    }
}

/// `u v weight` lines with original ids.
pub fn write_mean_payoff(game: &ParityGame, mpg: &MeanPayoffGame) -> String {
    let mut out = String::new();
    for (u, v, w) in &mpg.arcs {
        writeln!(out, "{} {} {w}", game.original_id(*u), game.original_id(*v)).unwrap();
    }
    out
}
