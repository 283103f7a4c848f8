use smallvec::{smallvec, SmallVec};

/// Fixed-length bitset used for relation rows and columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

impl Mask {
    pub fn zeros(len: usize) -> Self {
        Mask {
            len,
            words: smallvec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut m = Mask::zeros(len);
        for i in 0..len {
            m.set(i, true);
        }
        m
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut m = Mask::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            m.set(i, b);
        }
        m
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Mask::zeros(len);
        for i in indices {
            m.set(i, true);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn and(&self, other: &Mask) -> Mask {
        debug_assert_eq!(self.len, other.len);
        Mask {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &Mask) -> Mask {
        debug_assert_eq!(self.len, other.len);
        Mask {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn not(&self) -> Mask {
        let mut m = Mask {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        m.trim();
        m
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        *self == Mask::ones(self.len)
    }

    pub fn intersects(&self, other: &Mask) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Mask) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn not_keeps_padding_clear() {
        let m = Mask::zeros(3).not();
        assert_eq!(m, Mask::ones(3));
        assert_eq!(m.count(), 3);
        assert!(m.is_full());
    }

    #[test]
    fn wide_masks() {
        let mut m = Mask::zeros(130);
        m.set(129, true);
        m.set(0, true);
        assert_eq!(m.ones_iter().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(m.not().count(), 128);
        assert!(Mask::zeros(0).is_full());
    }
}
