use std::cmp::Ordering;
use std::fmt;

/// Longest bit string a component can hold.
pub const MAX_BITS: u32 = 63;

/// A finite binary string, ordered `0s < ε < 1s'`.
///
/// Stored as `(len, bits)` with the string in the low `len` bits, first bit most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: u8,
    bits: u64,
}

impl BitString {
    pub const EMPTY: BitString = BitString { len: 0, bits: 0 };

    pub fn new(len: u32, bits: u64) -> BitString {
        assert!(len <= MAX_BITS, "bit string longer than {MAX_BITS}");
        let mask = if len == 0 { 0 } else { u64::MAX >> (64 - len) };
        BitString {
            len: len as u8,
            bits: bits & mask,
        }
    }

    /// `0^n`.
    pub fn zeros(n: u32) -> BitString {
        BitString::new(n, 0)
    }

    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at position `i` (0-based, from the left).
    pub fn bit(&self, i: u32) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn first(&self) -> Option<bool> {
        (!self.is_empty()).then(|| self.bit(0))
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: u32) -> BitString {
        let n = n.min(self.len());
        BitString::new(n, self.bits >> (self.len() - n))
    }

    pub fn push(&self, b: bool) -> BitString {
        BitString::new(self.len() + 1, (self.bits << 1) | b as u64)
    }

    pub fn leading_zeros(&self) -> u32 {
        if self.bits == 0 {
            self.len()
        } else {
            self.bits.leading_zeros() - (64 - self.len())
        }
    }

    /// Removes `n` leading bits.
    pub fn strip_front(&self, n: u32) -> BitString {
        let n = n.min(self.len());
        BitString::new(self.len() - n, self.bits)
    }

    /// Order-preserving 64-bit key: the string followed by a single 1 bit.
    pub fn key(&self) -> u64 {
        if self.len == 0 {
            1 << 63
        } else {
            (self.bits << (64 - self.len())) | (1 << (63 - self.len()))
        }
    }

    pub fn from_key(key: u64) -> BitString {
        debug_assert!(key != 0);
        let tz = key.trailing_zeros();
        let len = 63 - tz;
        if len == 0 {
            BitString::EMPTY
        } else {
            BitString::new(len, key >> (tz + 1))
        }
    }

    /// Smallest nonempty string of length at most `m` that is greater than `self`.
    ///
    /// This is the in-order successor in the binary tree of strings cut at depth `m`.
    pub fn next_nonempty(&self, m: u32) -> Option<BitString> {
        if m == 0 {
            return None;
        }
        let s = if self.len() > m {
            let cut = self.prefix(m);
            if !self.bit(m) {
                return Some(cut);
            }
            cut
        } else {
            *self
        };
        if s.len() < m {
            let mut c = s.push(true);
            while c.len() < m {
                c = c.push(false);
            }
            return Some(c);
        }
        let t = (0..s.len()).rev().find(|&q| !s.bit(q))?;
        let up = s.prefix(t);
        if up.is_empty() {
            up.next_nonempty(m)
        } else {
            Some(up)
        }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl std::str::FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(BitString::EMPTY);
        }
        if s.len() > MAX_BITS as usize {
            return Err(format!("bit string `{s}` is too long"));
        }
        let mut out = BitString::EMPTY;
        for c in s.chars() {
            out = match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(format!("`{s}` is not a bit string")),
            };
        }
        Ok(out)
    }
}
