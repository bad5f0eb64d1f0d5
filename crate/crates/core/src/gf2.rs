//! Bit-packed GF(2) columns and the standard column reduction `R = D V`.

use std::fmt;

/// A dense vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitColumn {
    words: Vec<u64>,
    len: usize,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut c = Self::zeros(len);
        c.set(i);
        c
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, idx: I) -> Self {
        let mut c = Self::zeros(len);
        for i in idx {
            c.flip(i);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Highest set index (the pivot, or "low", in persistence terminology).
    pub fn pivot(&self) -> Option<usize> {
        for (w, &word) in self.words.iter().enumerate().rev() {
            if word != 0 {
                return Some(w * 64 + 63 - word.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for BitColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.ones()).finish()
    }
}

/// Result of reducing a boundary matrix column by column, left to right.
///
/// `r[j] = sum of d-columns recorded in v[j]`; nonzero columns of `r` have
/// pairwise distinct pivots.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub r: Vec<BitColumn>,
    pub v: Vec<BitColumn>,
    /// `pivot_owner[i] = Some(j)` when `r[j]` has pivot `i`.
    pub pivot_owner: Vec<Option<usize>>,
}

impl Reduction {
    pub fn new(columns: &[BitColumn], rows: usize) -> Self {
        let n = columns.len();
        let mut r: Vec<BitColumn> = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut pivot_owner = vec![None; rows];
        for (j, col) in columns.iter().enumerate() {
            let mut rc = col.clone();
            let mut vc = BitColumn::unit(n, j);
            while let Some(p) = rc.pivot() {
                match pivot_owner[p] {
                    Some(k) => {
                        let (rk, vk): (&BitColumn, &BitColumn) = (&r[k], &v[k]);
                        rc.xor_assign(rk);
                        vc.xor_assign(vk);
                    }
                    None => {
                        pivot_owner[p] = Some(j);
                        break;
                    }
                }
            }
            r.push(rc);
            v.push(vc);
        }
        Self { r, v, pivot_owner }
    }

    pub fn rank(&self) -> usize {
        self.r.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Rank over GF(2) of the matrix whose columns are given.
pub fn rank(columns: &[BitColumn]) -> usize {
    let rows = columns.first().map_or(0, BitColumn::len);
    let mut pivots: Vec<Option<BitColumn>> = vec![None; rows];
    let mut rank = 0;
    for col in columns {
        let mut c = col.clone();
        while let Some(p) = c.pivot() {
            match &pivots[p] {
                Some(b) => c.xor_assign(b),
                None => {
                    pivots[p] = Some(c);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}
