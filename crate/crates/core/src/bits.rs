//! Small helpers for `u64` vertex sets.

/// Iterator over the set bits of a mask, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct Bits(pub u64);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Bits {}

#[inline]
pub fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Mask with the lowest `n` bits set.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn mask_of(vs: impl IntoIterator<Item = usize>) -> u64 {
    vs.into_iter().fold(0, |m, v| m | bit(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterates_set_bits() {
        assert_eq!(Bits(0b1011_0001).collect::<Vec<_>>(), vec![0, 4, 5, 7]);
        assert_eq!(Bits(u64::MAX).count(), 64);
        assert_eq!(low_mask(64), u64::MAX);
        assert_eq!(low_mask(3), 0b111);
        assert_eq!(mask_of([1, 3]), 0b1010);
    }
}
