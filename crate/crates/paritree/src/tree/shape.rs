//! The vertex state machine shared by all tree kinds.
//!
//! Every vertex of a universal tree is summarised by a [`Budget`]; its children and their
//! subtrees depend only on that budget and on how many components are still to be chosen.

use super::bits::BitString;
use super::{TreeKind, TreeSpec};

/// What a vertex may still spend below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Budget {
    Perfect,
    /// Remaining bits.
    Succinct { bits: u32 },
    /// Nonempty strings still required and remaining non-leading bits.
    Strahler { need: u32, bud: u32 },
}

/// A depth-`h - j` vertex that a search must reach, optionally restricted to chain `k`
/// at position at least `i`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Target {
    pub j: usize,
    pub chain: Option<(usize, u32)>,
}

/// The admissible next components at a vertex.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Options {
    /// Integers `0..bound`.
    Ints(u64),
    Strs {
        eps: bool,
        /// Nonempty strings of length `1..=max_len`.
        max_len: u32,
        /// Whether nonempty strings may start with 1.
        lead1: bool,
    },
}

impl TreeSpec {
    pub(crate) fn root_budget(&self) -> Budget {
        match self.kind {
            TreeKind::Perfect => Budget::Perfect,
            TreeKind::Succinct => Budget::Succinct { bits: self.log },
            TreeKind::Strahler => Budget::Strahler {
                need: self.strahler_g as u32,
                bud: self.log,
            },
        }
    }

    /// Chain coordinates `(k, position)` of the subtree hanging below a vertex.
    pub(crate) fn position(&self, b: Budget) -> (usize, u32) {
        match b {
            Budget::Perfect => (0, 0),
            Budget::Succinct { bits } => (0, bits),
            Budget::Strahler { need: 0, .. } => (0, 0),
            Budget::Strahler { need, bud } => (need as usize, bud),
        }
    }

    /// Whether a vertex with budget `b` and `rem` components below it can reach `target`.
    fn reaches(&self, b: Budget, rem: usize, target: Option<Target>) -> bool {
        let Some(t) = target else { return true };
        if rem < t.j {
            return false;
        }
        let Some((k, i)) = t.chain else { return true };
        match b {
            Budget::Perfect => k == 0 && i == 0,
            Budget::Succinct { bits } => k == 0 && bits >= i,
            Budget::Strahler { need, bud } => {
                let (need, k) = (need as usize, k);
                let steps = rem - t.j;
                let pos_ok = if k == 0 { i == 0 } else { bud >= i };
                let forced_ok = bud > 0 || need == 0 || need.saturating_sub(steps) == k;
                k <= t.j && need >= k && need - k <= steps && pos_ok && forced_ok
            }
        }
    }

    /// Children of a vertex with budget `b`, with `rem >= 1` components left including the
    /// one being chosen, that can still reach `target`.
    pub(crate) fn options(&self, b: Budget, rem: usize, target: Option<Target>) -> Options {
        debug_assert!(rem >= 1);
        let below = rem - 1;
        match b {
            Budget::Perfect => {
                let ok = self.reaches(b, below, target);
                Options::Ints(if ok { self.capacity } else { 0 })
            }
            Budget::Succinct { bits } => {
                let max_len = (0..=bits)
                    .rev()
                    .find(|&l| self.reaches(Budget::Succinct { bits: bits - l }, below, target))
                    .unwrap_or(0);
                Options::Strs {
                    eps: self.reaches(b, below, target),
                    max_len,
                    lead1: true,
                }
            }
            Budget::Strahler { need, bud } => {
                // Once the non-leading bits are spent, the remaining required strings are all "0".
                let forced = bud == 0 && need > 0;
                let eps = !forced && need as usize <= below && self.reaches(b, below, target);
                let max_len = if need == 0 {
                    0
                } else if forced {
                    let child = Budget::Strahler { need: need - 1, bud: 0 };
                    u32::from(self.reaches(child, below, target))
                } else {
                    (0..=bud)
                        .rev()
                        .find(|&t| {
                            let child = Budget::Strahler { need: need - 1, bud: bud - t };
                            self.reaches(child, below, target)
                        })
                        .map_or(0, |t| t + 1)
                };
                Options::Strs {
                    eps,
                    max_len,
                    lead1: !forced && (need as usize) < rem,
                }
            }
        }
    }

    /// Budget of the child reached through component `key`, if that child exists.
    pub(crate) fn step(&self, b: Budget, rem: usize, key: u64) -> Option<Budget> {
        match (self.options(b, rem, None), b) {
            (Options::Ints(bound), _) => (key < bound).then_some(Budget::Perfect),
            (Options::Strs { eps, max_len, lead1 }, _) => {
                let s = BitString::from_key(key);
                if s.is_empty() {
                    return eps.then_some(b);
                }
                if s.len() > max_len || (!lead1 && s.first() == Some(true)) {
                    return None;
                }
                Some(match b {
                    Budget::Succinct { bits } => Budget::Succinct { bits: bits - s.len() },
                    Budget::Strahler { need, bud } => Budget::Strahler {
                        need: need - 1,
                        bud: bud - (s.len() - 1),
                    },
                    Budget::Perfect => unreachable!(),
                })
            }
        }
    }

    /// Smallest admissible child component greater than `after` (or the smallest overall).
    pub(crate) fn next_child(
        &self,
        b: Budget,
        rem: usize,
        after: Option<u64>,
        target: Option<Target>,
    ) -> Option<u64> {
        match self.options(b, rem, target) {
            Options::Ints(bound) => {
                let next = after.map_or(0, |a| a + 1);
                (next < bound).then_some(next)
            }
            Options::Strs { eps, max_len, lead1 } => {
                let after = after.map(BitString::from_key);
                let nonempty = match after {
                    None => (max_len > 0).then(|| BitString::zeros(max_len)),
                    Some(s) => s.next_nonempty(max_len),
                }
                .filter(|c| lead1 || c.first() == Some(false));
                let empty = (eps && after.is_none_or(|s| s < BitString::EMPTY)).then_some(BitString::EMPTY);
                match (nonempty, empty) {
                    (Some(a), Some(e)) => Some(a.min(e).key()),
                    (a, e) => a.or(e).map(|s| s.key()),
                }
            }
        }
    }

    /// Budgets along a prefix: entry `q` is the budget after `q` components.
    pub(crate) fn budgets(&self, prefix: &[u64]) -> Option<Vec<Budget>> {
        let mut out = Vec::with_capacity(prefix.len() + 1);
        let mut b = self.root_budget();
        out.push(b);
        for (q, &key) in prefix.iter().enumerate() {
            b = self.step(b, self.height - q, key)?;
            out.push(b);
        }
        Some(out)
    }

    /// Extends a valid prefix by smallest children down to a leaf.
    pub(crate) fn extend_min(&self, mut prefix: Vec<u64>, mut b: Budget) -> Vec<u64> {
        while prefix.len() < self.height {
            let rem = self.height - prefix.len();
            let c = self
                .next_child(b, rem, None, None)
                .expect("every vertex has a child");
            b = self.step(b, rem, c).expect("chosen child is admissible");
            prefix.push(c);
        }
        prefix
    }

    /// Min leaf below the smallest depth-`depth` vertex that is strictly greater than
    /// `leaf[..depth]` and can reach `target`.
    pub(crate) fn successor(
        &self,
        leaf: &[u64],
        depth: usize,
        target: Option<Target>,
    ) -> Option<Vec<u64>> {
        let budgets = self.budgets(&leaf[..depth])?;
        for dd in (0..depth).rev() {
            let rem = self.height - dd;
            let Some(c) = self.next_child(budgets[dd], rem, Some(leaf[dd]), target) else {
                continue;
            };
            let mut prefix = leaf[..dd].to_vec();
            let mut b = self.step(budgets[dd], rem, c)?;
            prefix.push(c);
            while prefix.len() < depth {
                let rem = self.height - prefix.len();
                let c = self.next_child(b, rem, None, target)?;
                b = self.step(b, rem, c)?;
                prefix.push(c);
            }
            return Some(self.extend_min(prefix, b));
        }
        None
    }

    /// All budgets of vertices at depth `depth`.
    pub(crate) fn budgets_at_depth(&self, depth: usize) -> Vec<Budget> {
        let mut layer = vec![self.root_budget()];
        for q in 0..depth {
            let rem = self.height - q;
            let mut next = Vec::new();
            for &b in &layer {
                match self.options(b, rem, None) {
                    Options::Ints(bound) => {
                        if bound > 0 {
                            next.push(Budget::Perfect);
                        }
                    }
                    Options::Strs { eps, max_len, .. } => {
                        if eps {
                            next.push(b);
                        }
                        for len in 1..=max_len {
                            next.push(match b {
                                Budget::Succinct { bits } => Budget::Succinct { bits: bits - len },
                                Budget::Strahler { need, bud } => Budget::Strahler {
                                    need: need - 1,
                                    bud: bud - (len - 1),
                                },
                                Budget::Perfect => unreachable!(),
                            });
                        }
                    }
                }
            }
            next.sort();
            next.dedup();
            layer = next;
        }
        layer
    }
}
