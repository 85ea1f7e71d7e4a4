//! Universal trees and the leaf-level arithmetic on their labels.
//!
//! A leaf is an `h`-tuple `(ξ_{2h-1}, ξ_{2h-3}, …, ξ_1)`. Perfect trees use integer
//! components; succinct and Strahler trees use binary strings ordered `0s < ε < 1s'`.
//!
//! ```
//! use paritree::tree::{Label, TreeSpec};
//!
//! let spec = TreeSpec::succinct(3, 2).unwrap();
//! let leaves: Vec<String> = spec.leaves().map(|l| spec.render(&Label::Leaf(l))).collect();
//! assert_eq!(leaves, ["(0, )", "( ,0)", "( , )", "( ,1)", "(1, )"]);
//! ```

mod bits;
mod shape;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
pub use bits::BitString;
pub(crate) use shape::Budget;
use shape::{Options, Target};

/// The three universal-tree constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Perfect,
    Succinct,
    Strahler,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::Perfect => "perfect",
            TreeKind::Succinct => "succinct",
            TreeKind::Strahler => "strahler",
        })
    }
}

impl std::str::FromStr for TreeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "perfect" => Ok(TreeKind::Perfect),
            "succinct" => Ok(TreeKind::Succinct),
            "strahler" => Ok(TreeKind::Strahler),
            _ => Err(format!("unknown tree kind `{s}`")),
        }
    }
}

/// An `(ℓ, h)`-universal tree description.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeSpec {
    kind: TreeKind,
    capacity: u64,
    height: usize,
    strahler_g: usize,
    /// `⌊log₂ ℓ⌋`.
    log: u32,
}

fn floor_log2(x: u64) -> u32 {
    63 - x.leading_zeros()
}

impl TreeSpec {
    /// The perfect `ℓ`-ary tree of height `h`.
    pub fn perfect(capacity: u64, height: usize) -> Result<TreeSpec> {
        TreeSpec::checked(TreeKind::Perfect, capacity, height, 0)
    }

    /// Leaves are tuples of bit strings with at most `⌊log₂ ℓ⌋` bits in total.
    pub fn succinct(capacity: u64, height: usize) -> Result<TreeSpec> {
        TreeSpec::checked(TreeKind::Succinct, capacity, height, 0)
    }

    /// Universal for trees of Strahler number at most `g`.
    pub fn strahler(capacity: u64, height: usize, g: usize) -> Result<TreeSpec> {
        TreeSpec::checked(TreeKind::Strahler, capacity, height, g)
    }

    /// Builds a spec of the given kind; `g` is ignored unless the kind is Strahler.
    pub fn new(kind: TreeKind, capacity: u64, height: usize, g: usize) -> Result<TreeSpec> {
        TreeSpec::checked(kind, capacity, height, g)
    }

    fn checked(kind: TreeKind, capacity: u64, height: usize, g: usize) -> Result<TreeSpec> {
        if capacity == 0 {
            return usage("tree capacity must be positive");
        }
        if height == 0 {
            return usage("tree height must be positive");
        }
        let log = floor_log2(capacity);
        if kind != TreeKind::Perfect && height as u64 * 2 + log as u64 > bits::MAX_BITS as u64 {
            return usage("tree too large for the packed string encoding");
        }
        let strahler_g = if kind == TreeKind::Strahler {
            if g == 0 || g > height.min(log as usize) {
                return usage(format!(
                    "Strahler parameter g={g} must lie in 1..={}",
                    height.min(log as usize)
                ));
            }
            g
        } else {
            0
        };
        Ok(TreeSpec::raw(kind, capacity, height, strahler_g))
    }

    /// No validation; used for chain members, whose parameters may fall outside the public range.
    pub(crate) fn raw(kind: TreeKind, capacity: u64, height: usize, g: usize) -> TreeSpec {
        TreeSpec {
            kind,
            capacity,
            height,
            strahler_g: g,
            log: floor_log2(capacity),
        }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// The Strahler parameter `g`, or 0 for the other kinds.
    pub fn strahler_g(&self) -> usize {
        self.strahler_g
    }

    /// `⌊log₂ ℓ⌋`.
    pub fn log_capacity(&self) -> u32 {
        self.log
    }

    fn uses_strings(&self) -> bool {
        self.kind != TreeKind::Perfect
    }

    /// Number of components kept by the `p`-truncation.
    pub fn kept(&self, p: u32) -> usize {
        self.height.saturating_sub(p as usize / 2)
    }

    fn check_priority(&self, p: u32) -> Result<()> {
        if p == 0 || p as usize > 2 * self.height {
            return usage(format!("priority {p} outside 1..={}", 2 * self.height));
        }
        Ok(())
    }

    fn check_leaf(&self, leaf: &Leaf) -> Result<()> {
        if !self.is_valid_leaf(leaf) {
            return usage(format!("{leaf:?} is not a leaf of {self}"));
        }
        Ok(())
    }

    fn check_label(&self, label: &Label) -> Result<()> {
        match label {
            Label::Top => Ok(()),
            Label::Leaf(l) => self.check_leaf(l),
        }
    }

    pub fn is_valid_leaf(&self, leaf: &Leaf) -> bool {
        leaf.0.len() == self.height && self.budgets(&leaf.0).is_some()
    }

    /// Leaf from integer components (perfect trees).
    pub fn leaf_from_ints(&self, comps: &[u64]) -> Result<Leaf> {
        if self.uses_strings() {
            return usage("integer components need a perfect tree");
        }
        let leaf = Leaf(comps.to_vec());
        self.check_leaf(&leaf)?;
        Ok(leaf)
    }

    /// Leaf from bit-string components; `""` or `"ε"` is the empty string.
    pub fn leaf_from_strs(&self, comps: &[&str]) -> Result<Leaf> {
        if !self.uses_strings() {
            return usage("string components need a succinct or Strahler tree");
        }
        let keys = comps
            .iter()
            .map(|s| s.parse::<BitString>().map(|b| b.key()).map_err(Error::Usage))
            .collect::<Result<Vec<_>>>()?;
        let leaf = Leaf(keys);
        self.check_leaf(&leaf)?;
        Ok(leaf)
    }

    /// Component `pos` (0 is the first, index `2h-1`).
    pub fn component(&self, leaf: &Leaf, pos: usize) -> Component {
        let key = leaf.0[pos];
        if self.uses_strings() {
            Component::Str(BitString::from_key(key))
        } else {
            Component::Int(key)
        }
    }

    /// Canonical text: `(c1,c2,…)` with ε as a single space, `TOP` for ⊤.
    pub fn render(&self, label: &Label) -> String {
        match label {
            Label::Top => "TOP".to_string(),
            Label::Leaf(l) => self.render_prefix(&l.0),
        }
    }

    fn render_prefix(&self, keys: &[u64]) -> String {
        let parts: Vec<String> = keys
            .iter()
            .map(|&k| {
                if self.uses_strings() {
                    let s = BitString::from_key(k);
                    if s.is_empty() {
                        " ".to_string()
                    } else {
                        s.to_string()
                    }
                } else {
                    k.to_string()
                }
            })
            .collect();
        format!("({})", parts.join(","))
    }

    /// Renders a truncated label in the same style as [`TreeSpec::render`].
    pub fn render_truncated(&self, t: &TruncatedLabel) -> String {
        match t {
            TruncatedLabel::Top => "TOP".to_string(),
            TruncatedLabel::Prefix(p) => self.render_prefix(p),
        }
    }

    /// Inverse of [`TreeSpec::render`]; also accepts `ε` for the empty string.
    pub fn parse_label(&self, text: &str) -> Result<Label> {
        let t = text.trim();
        if t == "TOP" || t == "⊤" {
            return Ok(Label::Top);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Usage(format!("`{text}` is not a label")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        let leaf = if self.uses_strings() {
            self.leaf_from_strs(&parts)?
        } else {
            let ints = parts
                .iter()
                .map(|p| p.trim().parse::<u64>().map_err(|e| Error::Usage(format!("`{p}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            self.leaf_from_ints(&ints)?
        };
        Ok(Label::Leaf(leaf))
    }

    /// Order of two labels of this tree.
    pub fn leaf_cmp(&self, a: &Label, b: &Label) -> Result<Ordering> {
        self.check_label(a)?;
        self.check_label(b)?;
        Ok(a.cmp(b))
    }

    /// `ξ|_p`: drops components of index below `p` (at or below `p` when `p` is even).
    pub fn truncate(&self, label: &Label, p: u32) -> Result<TruncatedLabel> {
        self.check_priority(p)?;
        Ok(match label {
            Label::Top => TruncatedLabel::Top,
            Label::Leaf(l) => TruncatedLabel::Prefix(l.0[..self.kept(p)].to_vec()),
        })
    }

    /// Smallest leaf of the tree.
    pub fn min_leaf(&self) -> Leaf {
        Leaf(self.extend_min(Vec::new(), self.root_budget()))
    }

    /// Smallest leaf of the subtree rooted at `prefix`.
    pub fn min_leaf_below(&self, prefix: &TruncatedLabel) -> Result<Label> {
        match prefix {
            TruncatedLabel::Top => Ok(Label::Top),
            TruncatedLabel::Prefix(p) => {
                let b = self.vertex_budget(p)?;
                Ok(Label::Leaf(Leaf(self.extend_min(p.clone(), b))))
            }
        }
    }

    fn vertex_budget(&self, prefix: &[u64]) -> Result<Budget> {
        if prefix.len() > self.height {
            return usage("prefix longer than the tree height");
        }
        match self.budgets(prefix) {
            Some(b) => Ok(*b.last().unwrap()),
            None => usage(format!("{} is not a vertex of {self}", self.render_prefix(prefix))),
        }
    }

    /// Smallest label that makes an arc with tail priority `p` tight against `head`.
    ///
    /// Even `p`: the min leaf below `head|_p`. Odd `p`: the min leaf of the next subtree at
    /// that level, or ⊤. Runs in `O(h · log ℓ)` word operations.
    pub fn tighten_target(&self, head: &Label, p: u32) -> Result<Label> {
        self.check_priority(p)?;
        self.check_label(head)?;
        Ok(self.tighten_unchecked(head, p))
    }

    pub(crate) fn tighten_unchecked(&self, head: &Label, p: u32) -> Label {
        let Label::Leaf(l) = head else { return Label::Top };
        let kept = self.kept(p);
        if p.is_multiple_of(2) {
            let budgets = self.budgets(&l.0[..kept]).expect("valid leaf");
            Label::Leaf(Leaf(self.extend_min(l.0[..kept].to_vec(), budgets[kept])))
        } else {
            match self.successor(&l.0, kept, None) {
                Some(v) => Label::Leaf(Leaf(v)),
                None => Label::Top,
            }
        }
    }

    /// Whether `leaf` is the smallest leaf of the subtree rooted at its depth-`depth` prefix.
    pub(crate) fn is_min_below(&self, leaf: &Leaf, depth: usize) -> bool {
        let budgets = self.budgets(&leaf.0[..depth]).expect("valid leaf");
        self.extend_min(leaf.0[..depth].to_vec(), budgets[depth]) == leaf.0
    }

    /// Min leaf of the depth-`depth` subtree that follows the one containing `leaf`, or ⊤.
    pub(crate) fn next_subtree_min(&self, leaf: &Leaf, depth: usize) -> Label {
        match self.successor(&leaf.0, depth, None) {
            Some(v) => Label::Leaf(Leaf(v)),
            None => Label::Top,
        }
    }

    /// Smallest `ξ' ≥ ξ` that is the minimum leaf of a subtree `T^k_{i',j}` with `i' ≥ i`.
    ///
    /// Positions are succinct: bits left below the subtree root; Strahler: non-leading bits
    /// left (0 for the chain `k = 0` of paths). The search walks up from `ξ|_{2j}` to the
    /// first ancestor with a larger child that can still host such a subtree, then descends
    /// along smallest children, matching the case analysis on `r` and `s`.
    pub fn raise(&self, xi: &Leaf, i: u32, j: usize, k: usize) -> Result<Label> {
        self.check_leaf(xi)?;
        self.check_chain(j, k)?;
        if self.kind == TreeKind::Strahler && i == 0 {
            return usage("Strahler raise needs i > 0; resolve i = 0 at the call site");
        }
        Ok(self.raise_unchecked(xi, i, j, k))
    }

    pub(crate) fn raise_unchecked(&self, xi: &Leaf, i: u32, j: usize, k: usize) -> Label {
        let depth = self.height - j;
        let budgets = self.budgets(&xi.0[..depth]).expect("valid leaf");
        let (vk, vi) = self.position(budgets[depth]);
        if vk == k && vi >= i && self.is_min_below(xi, depth) {
            return Label::Leaf(xi.clone());
        }
        let target = Target {
            j,
            chain: Some((k, i)),
        };
        match self.successor(&xi.0, depth, Some(target)) {
            Some(v) => Label::Leaf(Leaf(v)),
            None => Label::Top,
        }
    }

    fn check_chain(&self, j: usize, k: usize) -> Result<()> {
        if j > self.height {
            return usage(format!("subtree height {j} exceeds {}", self.height));
        }
        let (lo, hi) = self.chain_window(j);
        if k < lo || k > hi {
            return usage(format!("no chain k={k} at height {j}"));
        }
        Ok(())
    }

    /// Range of chain indices that can be nonempty at subtree height `j`.
    fn chain_window(&self, j: usize) -> (usize, usize) {
        match self.kind {
            TreeKind::Strahler => {
                let g = self.strahler_g;
                (g.saturating_sub(self.height - j), j.min(g))
            }
            _ => (0, 0),
        }
    }

    /// Chains of height-`j` subtrees and the positions occurring in each.
    pub fn chain_info(&self, j: usize) -> Result<ChainInfo> {
        if j > self.height {
            return usage(format!("subtree height {j} exceeds {}", self.height));
        }
        let mut by_k: HashMap<usize, Vec<u32>> = HashMap::new();
        for b in self.budgets_at_depth(self.height - j) {
            let (k, i) = self.position(b);
            by_k.entry(k).or_default().push(i);
        }
        let mut chains: Vec<Chain> = by_k
            .into_iter()
            .map(|(k, mut positions)| {
                positions.sort_unstable();
                positions.dedup();
                Chain { k, positions }
            })
            .collect();
        chains.sort_by_key(|c| c.k);
        Ok(ChainInfo { j, chains })
    }

    /// The tree `T^k_{i,j}` as a stand-alone spec of height `j`.
    ///
    /// The Strahler chain `k = 0` holds only the path, at position 0.
    pub fn chain_tree(&self, j: usize, k: usize, i: u32) -> Result<TreeSpec> {
        self.check_chain(j, k)?;
        if self.kind == TreeKind::Strahler && k == 0 && i > 0 {
            return usage(format!("the Strahler path chain has no member at position {i}"));
        }
        Ok(match self.kind {
            TreeKind::Perfect => TreeSpec::raw(TreeKind::Perfect, self.capacity, j, 0),
            TreeKind::Succinct => TreeSpec::raw(TreeKind::Succinct, 1 << i, j, 0),
            TreeKind::Strahler if k == 0 => TreeSpec::raw(TreeKind::Strahler, 1, j, 0),
            TreeKind::Strahler => TreeSpec::raw(TreeKind::Strahler, 1 << i, j, k),
        })
    }

    /// Leading zeroes of the first component; `ζ(⊤) = -1`.
    pub fn zeta(&self, label: &Label) -> Result<i64> {
        if !self.uses_strings() {
            return usage("ζ is defined for string-encoded trees only");
        }
        Ok(zeta_unchecked(label))
    }

    /// `ξ^κ`: deletes `κ` leading zeroes from the first component, ⊤ if there are fewer.
    ///
    /// The result is a label of the chain tree `κ` positions lower.
    pub fn strip_zeros(&self, label: &Label, kappa: u32) -> Result<Label> {
        if self.kind != TreeKind::Succinct {
            return usage("ξ^κ is defined for succinct trees only");
        }
        Ok(strip_zeros_unchecked(label, kappa))
    }

    /// Exact number of leaves.
    pub fn leaf_count(&self) -> BigUint {
        let mut memo = HashMap::new();
        self.count_below(self.root_budget(), self.height, &mut memo)
    }

    fn count_below(
        &self,
        b: Budget,
        rem: usize,
        memo: &mut HashMap<(Budget, usize), BigUint>,
    ) -> BigUint {
        if rem == 0 {
            return BigUint::from(1u32);
        }
        if let Some(c) = memo.get(&(b, rem)) {
            return c.clone();
        }
        let total = match self.options(b, rem, None) {
            Options::Ints(bound) => BigUint::from(bound).pow(rem as u32),
            Options::Strs { eps, max_len, lead1 } => {
                let mut t = BigUint::from(0u32);
                if eps {
                    t += self.count_below(b, rem - 1, memo);
                }
                for len in 1..=max_len {
                    let child = match b {
                        Budget::Succinct { bits } => Budget::Succinct { bits: bits - len },
                        Budget::Strahler { need, bud } => Budget::Strahler {
                            need: need - 1,
                            bud: bud - (len - 1),
                        },
                        Budget::Perfect => unreachable!(),
                    };
                    let strings = BigUint::from(1u32) << (if lead1 { len } else { len - 1 });
                    t += strings * self.count_below(child, rem - 1, memo);
                }
                t
            }
        };
        memo.insert((b, rem), total.clone());
        total
    }

    /// All leaves in increasing order.
    pub fn leaves(&self) -> Leaves<'_> {
        Leaves {
            spec: self,
            next: Some(self.min_leaf()),
        }
    }

    /// The leaf following `leaf`, if any.
    pub fn next_leaf(&self, leaf: &Leaf) -> Option<Leaf> {
        self.successor(&leaf.0, self.height, None).map(Leaf)
    }
}

pub(crate) fn zeta_unchecked(label: &Label) -> i64 {
    match label {
        Label::Top => -1,
        Label::Leaf(l) => BitString::from_key(l.0[0]).leading_zeros() as i64,
    }
}

pub(crate) fn strip_zeros_unchecked(label: &Label, kappa: u32) -> Label {
    match label {
        Label::Top => Label::Top,
        Label::Leaf(l) => {
            let first = BitString::from_key(l.0[0]);
            if kappa > first.leading_zeros() {
                return Label::Top;
            }
            let mut keys = l.0.clone();
            keys[0] = first.strip_front(kappa).key();
            Label::Leaf(Leaf(keys))
        }
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TreeKind::Strahler => write!(
                f,
                "{}-strahler({},{})",
                self.strahler_g, self.capacity, self.height
            ),
            k => write!(f, "{k}({},{})", self.capacity, self.height),
        }
    }
}

/// Iterator over the leaves of a tree in order.
pub struct Leaves<'a> {
    spec: &'a TreeSpec,
    next: Option<Leaf>,
}

impl Iterator for Leaves<'_> {
    type Item = Leaf;

    fn next(&mut self) -> Option<Leaf> {
        let cur = self.next.take()?;
        self.next = self.spec.next_leaf(&cur);
        Some(cur)
    }
}

/// A decoded component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Int(u64),
    Str(BitString),
}

/// A leaf as a tuple of order-preserving component keys.
///
/// Keys compare like the components they encode, so leaves of one tree compare
/// lexicographically. Integer components are stored as themselves.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf(pub(crate) Vec<u64>);

impl Leaf {
    pub fn keys(&self) -> &[u64] {
        &self.0
    }

    pub fn from_keys(keys: Vec<u64>) -> Leaf {
        Leaf(keys)
    }
}

impl fmt::Debug for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Leaf{:x?}", self.0)
    }
}

/// A leaf or the top element ⊤, which exceeds every leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Leaf(Leaf),
    Top,
}

impl Label {
    pub fn is_top(&self) -> bool {
        matches!(self, Label::Top)
    }

    pub fn leaf(&self) -> Option<&Leaf> {
        match self {
            Label::Leaf(l) => Some(l),
            Label::Top => None,
        }
    }

    /// Compares `self|_p` with `other|_p` without building the truncations.
    pub fn cmp_truncated(&self, other: &Label, kept: usize) -> Ordering {
        match (self, other) {
            (Label::Top, Label::Top) => Ordering::Equal,
            (Label::Top, _) => Ordering::Greater,
            (_, Label::Top) => Ordering::Less,
            (Label::Leaf(a), Label::Leaf(b)) => a.0[..kept].cmp(&b.0[..kept]),
        }
    }
}

impl From<Leaf> for Label {
    fn from(l: Leaf) -> Label {
        Label::Leaf(l)
    }
}

/// `ξ|_p`: a vertex of the tree, or ⊤.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruncatedLabel {
    Prefix(Vec<u64>),
    Top,
}

/// The chain `C^k_j` and the positions `i` at which it has a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub k: usize,
    pub positions: Vec<u32>,
}

/// Chain cover of the height-`j` subtrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainInfo {
    pub j: usize,
    pub chains: Vec<Chain>,
}

impl ChainInfo {
    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn chain(&self, k: usize) -> Option<&Chain> {
        self.chains.iter().find(|c| c.k == k)
    }
}
