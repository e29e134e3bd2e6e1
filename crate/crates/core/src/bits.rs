//! Fixed-width qubit bitmasks.
//!
//! Every simulated object in this crate lives on at most [`MAX_QUBITS`]
//! qubits, which covers four stacked 4x16 codeblocks. A fixed width keeps
//! masks `Copy` so that the counting engine never allocates while
//! propagating frames.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const WORDS: usize = 4;
pub const MAX_QUBITS: usize = WORDS * 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct QubitMask(pub [u64; WORDS]);

impl QubitMask {
    pub const EMPTY: QubitMask = QubitMask([0; WORDS]);

    pub fn single(q: usize) -> Self {
        let mut m = Self::EMPTY;
        m.set(q, true);
        m
    }

    pub fn from_qubits<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        let mut m = Self::EMPTY;
        for q in qubits {
            m.toggle(q);
        }
        m
    }

    /// Mask with bits `0..n` set.
    pub fn low(n: usize) -> Self {
        let mut m = Self::EMPTY;
        for (w, word) in m.0.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        (self.0[q >> 6] >> (q & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, v: bool) {
        let bit = 1u64 << (q & 63);
        if v {
            self.0[q >> 6] |= bit;
        } else {
            self.0[q >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, q: usize) {
        self.0[q >> 6] ^= 1u64 << (q & 63);
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the overlap with `other`.
    #[inline]
    pub fn dot(&self, other: &Self) -> bool {
        let mut acc = 0u64;
        for w in 0..WORDS {
            acc ^= self.0[w] & other.0[w];
        }
        acc.count_ones() & 1 == 1
    }

    #[inline]
    pub fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= other.0[w];
        }
        out
    }

    #[inline]
    pub fn or(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] |= other.0[w];
        }
        out
    }

    #[inline]
    pub fn and_not(&self, other: &Self) -> Self {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= !other.0[w];
        }
        out
    }

    /// Highest set bit, if any.
    pub fn highest(&self) -> Option<usize> {
        for w in (0..WORDS).rev() {
            if self.0[w] != 0 {
                return Some(w * 64 + 63 - self.0[w].leading_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..WORDS).flat_map(move |w| {
            let mut word = self.0[w];
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }
}

impl std::ops::BitXor for QubitMask {
    type Output = QubitMask;
    #[inline]
    fn bitxor(mut self, rhs: Self) -> Self {
        self ^= rhs;
        self
    }
}

impl std::ops::BitXorAssign for QubitMask {
    #[inline]
    fn bitxor_assign(&mut self, rhs: Self) {
        for w in 0..WORDS {
            self.0[w] ^= rhs.0[w];
        }
    }
}

impl fmt::Debug for QubitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
