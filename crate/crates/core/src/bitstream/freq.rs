use super::BitstreamError;

pub const SCALE_BITS: u32 = 12;
/// Sum of every normalised table.
pub const SCALE: u32 = 1 << SCALE_BITS;

fn slot(s: i8) -> usize {
    (s as i16 + 128) as usize
}

/// Normalised symbol counts for one latent channel, indexed by `symbol + 128`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreqTable {
    counts: [u32; 256],
    cumulative: [u32; 257],
}

impl FreqTable {
    /// Counts proportional to the empirical frequencies, at least 1 for every
    /// symbol present, summing to exactly 4096.
    pub fn build(symbols: &[i8]) -> Result<FreqTable, BitstreamError> {
        if symbols.is_empty() {
            return Err(BitstreamError::Empty);
        }
        let mut raw = [0u64; 256];
        for &s in symbols {
            raw[slot(s)] += 1;
        }
        let total = symbols.len() as u64;
        let mut counts = [0u32; 256];
        for (c, &r) in counts.iter_mut().zip(&raw) {
            if r > 0 {
                // round(r * SCALE / total), at least 1
                *c = (((r * SCALE as u64 * 2 + total) / (2 * total)) as u32).max(1);
            }
        }
        let mut sum: u32 = counts.iter().sum();
        while sum != SCALE {
            if sum < SCALE {
                let i = (0..256).max_by_key(|&i| (raw[i], std::cmp::Reverse(i))).unwrap();
                let add = SCALE - sum;
                counts[i] += add;
                sum += add;
            } else {
                let i = (0..256)
                    .filter(|&i| counts[i] > 1)
                    .max_by_key(|&i| (counts[i], std::cmp::Reverse(i)))
                    .expect("at most 255 present symbols fit in 4096");
                let take = (sum - SCALE).min(counts[i] - 1);
                counts[i] -= take;
                sum -= take;
            }
        }
        Ok(Self::from_counts_unchecked(counts))
    }

    /// Accepts counts that already sum to 4096.
    pub fn from_counts(counts: [u32; 256]) -> Result<FreqTable, BitstreamError> {
        let sum = counts.iter().try_fold(0u32, |a, &c| a.checked_add(c)).unwrap_or(u32::MAX);
        if sum != SCALE {
            return Err(BitstreamError::TableSum(sum));
        }
        Ok(Self::from_counts_unchecked(counts))
    }

    fn from_counts_unchecked(counts: [u32; 256]) -> FreqTable {
        let mut cumulative = [0u32; 257];
        for i in 0..256 {
            cumulative[i + 1] = cumulative[i] + counts[i];
        }
        FreqTable { counts, cumulative }
    }

    pub fn count(&self, s: i8) -> u32 {
        self.counts[slot(s)]
    }

    pub(crate) fn start(&self, s: i8) -> u32 {
        self.cumulative[slot(s)]
    }

    pub fn counts(&self) -> &[u32; 256] {
        &self.counts
    }

    /// Smallest and largest symbol with a non-zero count.
    pub fn support(&self) -> (i8, i8) {
        let lo = self.counts.iter().position(|&c| c > 0).unwrap_or(128);
        let hi = self.counts.iter().rposition(|&c| c > 0).unwrap_or(128);
        ((lo as i16 - 128) as i8, (hi as i16 - 128) as i8)
    }

    /// Symbol owning each of the 4096 cumulative slots.
    pub(crate) fn lookup(&self) -> Vec<i8> {
        let mut t = Vec::with_capacity(SCALE as usize);
        for (i, &c) in self.counts.iter().enumerate() {
            t.extend(std::iter::repeat_n((i as i16 - 128) as i8, c as usize));
        }
        t
    }

    /// Expected cost of coding `symbols` with this table, in bits.
    pub fn cost_bits(&self, symbols: &[i8]) -> f64 {
        symbols.iter().map(|&s| (SCALE as f64 / self.count(s) as f64).log2()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_symbol_takes_everything() {
        let t = FreqTable::build(&[0; 100]).unwrap();
        assert_eq!(t.count(0), 4096);
        assert_eq!(t.counts().iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn equal_halves() {
        let s: Vec<i8> = (0..1000).map(|i| if i % 2 == 0 { 3 } else { -7 }).collect();
        let t = FreqTable::build(&s).unwrap();
        assert_eq!((t.count(3), t.count(-7)), (2048, 2048));
    }

    #[test]
    fn ninety_ten_split() {
        let s: Vec<i8> = (0..1000).map(|i| if i < 900 { 1 } else { 2 }).collect();
        let t = FreqTable::build(&s).unwrap();
        assert!((t.count(1) as i32 - 3686).abs() <= 1);
        assert!((t.count(2) as i32 - 410).abs() <= 1);
    }

    #[test]
    fn many_rare_symbols_still_sum() {
        let mut s = vec![0i8; 1_000_000];
        for (i, v) in (-127..=127).enumerate() {
            s[i] = v;
        }
        let t = FreqTable::build(&s).unwrap();
        assert_eq!(t.counts().iter().sum::<u32>(), 4096);
        assert!((-127..=127).all(|v| t.count(v) >= 1));
        assert_eq!(t.support(), (-127, 127));
    }

    #[test]
    fn empty_and_bad_sums_rejected() {
        assert_eq!(FreqTable::build(&[]), Err(BitstreamError::Empty));
        assert_eq!(FreqTable::from_counts([0; 256]), Err(BitstreamError::TableSum(0)));
        let mut c = [0u32; 256];
        c[5] = u32::MAX;
        c[6] = 10;
        assert!(FreqTable::from_counts(c).is_err());
    }
}
