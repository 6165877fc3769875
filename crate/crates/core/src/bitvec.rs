//! Plain bitvectors with rank and select, plus an Elias–Fano encoding of
//! sorted position lists built on top of them.

use crate::error::Error;

const SUPERBLOCK_WORDS: usize = 8; // 512-bit superblocks

/// Bitvector with a superblock/word rank directory and select by binary
/// search over superblocks followed by an in-word scan.
#[derive(Debug, Clone, Default)]
pub struct RsBitvec {
    len: usize,
    words: Vec<u64>,
    /// Cumulative 1-count at each superblock boundary.
    super_ranks: Vec<u64>,
    ones: usize,
}

impl RsBitvec {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> RsBitvec {
        let mut words = Vec::new();
        let mut len = 0usize;
        let mut cur = 0u64;
        for b in bits {
            if b {
                cur |= 1u64 << (len % 64);
            }
            len += 1;
            if len % 64 == 0 {
                words.push(cur);
                cur = 0;
            }
        }
        if len % 64 != 0 {
            words.push(cur);
        }
        RsBitvec::from_words(words, len)
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> RsBitvec {
        let mut bv = RsBitvec {
            len,
            words,
            super_ranks: Vec::new(),
            ones: 0,
        };
        bv.words.resize((len + 63) / 64, 0);
        if len % 64 != 0 {
            if let Some(last) = bv.words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        bv.build_directory();
        bv
    }

    fn build_directory(&mut self) {
        let n_super = self.words.len() / SUPERBLOCK_WORDS + 1;
        self.super_ranks = Vec::with_capacity(n_super + 1);
        let mut acc = 0u64;
        self.super_ranks.push(0);
        for (i, w) in self.words.iter().enumerate() {
            acc += w.count_ones() as u64;
            if (i + 1) % SUPERBLOCK_WORDS == 0 {
                self.super_ranks.push(acc);
            }
        }
        if self.words.len() % SUPERBLOCK_WORDS != 0 || self.words.is_empty() {
            self.super_ranks.push(acc);
        }
        self.ones = acc as usize;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of set bits in `[0..j)`.
    #[inline]
    pub fn rank1(&self, j: usize) -> usize {
        debug_assert!(j <= self.len, "rank arg {j} > len {}", self.len);
        let word = j / 64;
        let sb = word / SUPERBLOCK_WORDS;
        let mut r = self.super_ranks[sb];
        for w in sb * SUPERBLOCK_WORDS..word {
            r += self.words[w].count_ones() as u64;
        }
        if j % 64 != 0 {
            r += (self.words[word] & ((1u64 << (j % 64)) - 1)).count_ones() as u64;
        }
        r as usize
    }

    /// Number of zero bits in `[0..j)`.
    #[inline]
    pub fn rank0(&self, j: usize) -> usize {
        j - self.rank1(j)
    }

    pub fn rank(&self, bit: bool, j: usize) -> usize {
        if bit {
            self.rank1(j)
        } else {
            self.rank0(j)
        }
    }

    /// 0-based position of the `r`-th set bit, `r >= 1`.
    pub fn select1(&self, r: usize) -> usize {
        debug_assert!(r >= 1 && r <= self.ones, "select1({r}) of {}", self.ones);
        let target = r as u64;
        // superblock binary search
        let mut lo = 0usize;
        let mut hi = self.super_ranks.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.super_ranks[mid] < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let sb = lo - 1;
        let mut rem = target - self.super_ranks[sb];
        let mut w = sb * SUPERBLOCK_WORDS;
        loop {
            let c = self.words[w].count_ones() as u64;
            if c >= rem {
                return w * 64 + select_in_word(self.words[w], rem as u32);
            }
            rem -= c;
            w += 1;
        }
    }

    /// 0-based position of the `r`-th zero bit, `r >= 1`.
    pub fn select0(&self, r: usize) -> usize {
        debug_assert!(r >= 1 && r <= self.len - self.ones);
        let target = r as u64;
        let mut lo = 0usize;
        let mut hi = self.super_ranks.len() - 1;
        // zeros before superblock i = i*512 - super_ranks[i] (clamped to len)
        let zeros_at = |i: usize| -> u64 {
            let bits = ((i * SUPERBLOCK_WORDS * 64).min(self.len)) as u64;
            bits - self.super_ranks[i]
        };
        while lo < hi {
            let mid = (lo + hi) / 2;
            if zeros_at(mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let sb = lo - 1;
        let mut rem = target - zeros_at(sb);
        let mut w = sb * SUPERBLOCK_WORDS;
        loop {
            let inv = !self.words[w];
            let c = inv.count_ones() as u64;
            if c >= rem {
                return w * 64 + select_in_word(inv, rem as u32);
            }
            rem -= c;
            w += 1;
        }
    }

    pub fn select(&self, bit: bool, r: usize) -> usize {
        if bit {
            self.select1(r)
        } else {
            self.select0(r)
        }
    }

    pub fn checked_select(&self, bit: bool, r: usize) -> Result<usize, Error> {
        let max = if bit { self.ones } else { self.len - self.ones };
        if r < 1 || r > max {
            return Err(Error::RankOutOfRange { rank: r, max });
        }
        Ok(self.select(bit, r))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// 0-based position of the `r`-th set bit within a word, `r >= 1`.
#[inline]
fn select_in_word(mut w: u64, mut r: u32) -> usize {
    let mut pos = 0usize;
    loop {
        let tz = w.trailing_zeros() as usize;
        pos += tz;
        r -= 1;
        if r == 0 {
            return pos;
        }
        w >>= tz + 1;
        pos += 1;
    }
}

/// Builder that appends bits at arbitrary positions of a preallocated buffer.
#[derive(Debug)]
pub struct BitBuf {
    pub words: Vec<u64>,
    pub len: usize,
}

impl BitBuf {
    pub fn zeros(len: usize) -> BitBuf {
        BitBuf {
            words: vec![0u64; (len + 63) / 64],
            len,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn finish(self) -> RsBitvec {
        RsBitvec::from_words(self.words, self.len)
    }
}

/// Elias–Fano encoding of a strictly increasing position sequence over a
/// universe `[0..u)`: low bits stored packed, high bits in a unary-coded
/// bitvector. Access is constant time; predecessor counting does a select
/// plus a bounded binary search of the low bits.
#[derive(Debug, Clone)]
pub struct EliasFano {
    count: usize,
    low_width: u32,
    lows: Vec<u64>,
    high: RsBitvec,
}

impl EliasFano {
    pub fn new(values: &[u64], universe: u64) -> EliasFano {
        let count = values.len();
        let u = universe.max(1);
        let low_width = if count == 0 {
            0
        } else {
            let per = u / count as u64;
            63 - per.max(1).leading_zeros().min(63) as u32
        };
        let low_width = low_width.min(63);
        let mut lows = vec![0u64; (count * low_width as usize + 63) / 64 + 1];
        let high_len = count + (u >> low_width) as usize + 1;
        let mut high = vec![0u64; (high_len + 63) / 64];
        let mask = if low_width == 0 { 0 } else { (1u64 << low_width) - 1 };
        let mut prev = 0u64;
        for (i, &v) in values.iter().enumerate() {
            debug_assert!(i == 0 || v > prev, "values must be strictly increasing");
            debug_assert!(v < u || (v == 0 && u == 1));
            prev = v;
            if low_width > 0 {
                let bitpos = i * low_width as usize;
                let (w, off) = (bitpos / 64, bitpos % 64);
                lows[w] |= (v & mask) << off;
                if off + low_width as usize > 64 {
                    lows[w + 1] |= (v & mask) >> (64 - off);
                }
            }
            let hpos = (v >> low_width) as usize + i;
            high[hpos / 64] |= 1u64 << (hpos % 64);
        }
        EliasFano {
            count,
            low_width,
            lows,
            high: RsBitvec::from_words(high, high_len),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Value at index `i` (0-based).
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.count);
        let hi = (self.high.select1(i + 1) - i) as u64;
        (hi << self.low_width) | self.low(i)
    }

    #[inline]
    fn low(&self, i: usize) -> u64 {
        if self.low_width == 0 {
            return 0;
        }
        let bitpos = i * self.low_width as usize;
        let (w, off) = (bitpos / 64, bitpos % 64);
        let mut v = self.lows[w] >> off;
        if off + self.low_width as usize > 64 {
            v |= self.lows.get(w + 1).copied().unwrap_or(0) << (64 - off);
        }
        v & ((1u64 << self.low_width) - 1)
    }

    /// Number of stored values `<= x`.
    pub fn rank_leq(&self, x: u64) -> usize {
        if self.count == 0 {
            return 0;
        }
        let hb = (x >> self.low_width) as usize;
        let zeros = self.high.len() - self.high.count_ones();
        // The t-th zero (1-based, 0-based position p) has exactly p - (t-1)
        // elements with high part < t before it.
        let start = if hb == 0 {
            0
        } else if hb > zeros {
            return self.count;
        } else {
            self.high.select0(hb) - (hb - 1)
        };
        let end = if hb + 1 > zeros {
            self.count
        } else {
            self.high.select0(hb + 1) - hb
        };
        // Binary search of the low bits within the bucket.
        let xl = x & if self.low_width == 0 { 0 } else { (1u64 << self.low_width) - 1 };
        let mut lo = start;
        let mut hi = end;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.low(mid) <= xl {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count).map(|i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_rank(bits: &[bool], b: bool, j: usize) -> usize {
        bits[..j].iter().filter(|&&x| x == b).count()
    }

    fn naive_select(bits: &[bool], b: bool, r: usize) -> usize {
        bits.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(r - 1)
            .unwrap()
            .0
    }

    #[test]
    fn trivial_blocks() {
        let bv = RsBitvec::from_bits(std::iter::repeat(false).take(64));
        assert_eq!(bv.rank1(64), 0);
        let bv = RsBitvec::from_bits(std::iter::repeat(true).take(64));
        assert_eq!(bv.select1(64), 63);
        assert_eq!(bv.rank(true, 0), 0);
    }

    #[test]
    fn small_example() {
        // S = 10110 (reading left to right)
        let bv = RsBitvec::from_bits([true, false, true, true, false]);
        assert_eq!(bv.rank1(3), 2);
        assert_eq!(bv.select1(bv.rank1(bv.len())), 3);
    }

    #[test]
    fn oracle_equivalence_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &len in &[1usize, 63, 64, 65, 511, 512, 513, 3000] {
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.37)).collect();
            let bv = RsBitvec::from_bits(bits.iter().copied());
            for j in 0..=len {
                assert_eq!(bv.rank1(j), naive_rank(&bits, true, j));
                assert_eq!(bv.rank0(j), naive_rank(&bits, false, j));
                assert_eq!(bv.rank0(j) + bv.rank1(j), j);
            }
            for r in 1..=bv.count_ones() {
                assert_eq!(bv.select1(r), naive_select(&bits, true, r));
            }
            for r in 1..=(len - bv.count_ones()) {
                assert_eq!(bv.select0(r), naive_select(&bits, false, r));
            }
            for (p, &b) in bits.iter().enumerate() {
                if b {
                    assert_eq!(bv.select1(bv.rank1(p + 1)), p);
                }
            }
        }
    }

    #[test]
    fn select_out_of_range_is_error() {
        let bv = RsBitvec::from_bits([true, false]);
        assert!(bv.checked_select(true, 2).is_err());
        assert!(bv.checked_select(true, 1).is_ok());
    }

    #[test]
    fn elias_fano_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = rng.gen_range(1..5000u64);
            let k = rng.gen_range(0..=u.min(400)) as usize;
            let mut vals: Vec<u64> = (0..u).collect();
            for i in (1..vals.len()).rev() {
                vals.swap(i, rng.gen_range(0..=i));
            }
            let mut vals: Vec<u64> = vals.into_iter().take(k).collect();
            vals.sort_unstable();
            let ef = EliasFano::new(&vals, u);
            for (i, &v) in vals.iter().enumerate() {
                assert_eq!(ef.get(i), v);
            }
            for x in 0..u + 2 {
                let expect = vals.iter().filter(|&&v| v <= x).count();
                assert_eq!(ef.rank_leq(x), expect, "u={u} k={k} x={x}");
            }
        }
    }

    #[test]
    fn elias_fano_dense_and_empty() {
        let ef = EliasFano::new(&[], 10);
        assert_eq!(ef.rank_leq(5), 0);
        let vals: Vec<u64> = (0..100).collect();
        let ef = EliasFano::new(&vals, 100);
        assert_eq!(ef.rank_leq(99), 100);
        assert_eq!(ef.rank_leq(0), 1);
        assert_eq!(ef.get(42), 42);
    }
}
