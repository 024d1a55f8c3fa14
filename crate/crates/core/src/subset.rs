use std::fmt;

use serde::{Deserialize, Serialize};

/// Hard cap on the number of parts; subset enumeration is `2^k`.
pub const MAX_PARTS: usize = 12;

/// A subset of the coordinate set `{0, .., k-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn full(k: usize) -> Self {
        Subset(((1u64 << k) - 1) as u32)
    }

    pub const fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub const fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub const fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub const fn complement(self, k: usize) -> Subset {
        Subset(!self.0 & Subset::full(k).0)
    }

    pub const fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    /// True when every set bit is below `k`.
    pub const fn fits(self, k: usize) -> bool {
        self.is_subset_of(Subset::full(k))
    }

    /// Member coordinates in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask { None } else { Some((cur.wrapping_sub(mask)) & mask) };
            Some(Subset(cur))
        })
    }

    /// Every subset of `{0, .., k-1}` in increasing bitmask order.
    pub fn all(k: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << k).map(Subset)
    }

    /// Every subset of `{0, .., k-1}` with at most `d` elements, ordered by size then bitmask.
    pub fn up_to_size(k: usize, d: usize) -> Vec<Subset> {
        let mut out: Vec<Subset> = Subset::all(k).filter(|s| s.len() <= d).collect();
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    /// `(-1)^{|self|}`.
    pub const fn sign(self) -> f64 {
        if self.len().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
