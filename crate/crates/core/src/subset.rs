//! Bitmask subsets of a small ground set `{0, .., n-1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported ground-set size.
pub const MAX_GROUND: usize = 16;

/// A subset of the ground set, bit `i` set iff element `i` is present.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_GROUND);
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(x: usize) -> Subset {
        Subset(1 << x)
    }

    pub fn from_elems<I: IntoIterator<Item = usize>>(elems: I) -> Subset {
        Subset(elems.into_iter().fold(0, |acc, x| acc | (1 << x)))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    #[inline]
    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    #[inline]
    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        self.0 >> x & 1 == 1
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// True when the mask fits a ground set of size `n`.
    pub fn fits(self, n: usize) -> bool {
        (self.0 as u64) < (1u64 << n)
    }

    pub fn elems(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(x)
            }
        })
    }

    /// Every subset of `{0, .., n-1}` in ascending mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << n).map(Subset)
    }

    /// Every `d` with `lo ⊆ d ⊆ hi`, ascending. Empty when `lo ⊄ hi`.
    pub fn interval(lo: Subset, hi: Subset) -> Interval {
        Interval {
            lo: lo.0,
            free: hi.0 & !lo.0,
            next: if lo.is_subset_of(hi) { Some(0) } else { None },
        }
    }
}

/// Ascending enumeration of a subset interval, via submasks of the free bits.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: u32,
    free: u32,
    next: Option<u32>,
}

impl Iterator for Interval {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        // next submask of `free` in increasing order
        self.next = if cur == self.free {
            None
        } else {
            Some(((cur | !self.free).wrapping_add(1)) & self.free)
        };
        Some(Subset(self.lo | cur))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elems().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}
