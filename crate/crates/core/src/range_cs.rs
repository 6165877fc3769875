//! Range counting and selection over a nonnegative integer array whose sum
//! is bounded: threshold-level position arrays plus per-level bitvector
//! strips, answering `rcount`/`rselect` with one predecessor search and one
//! rank/select each.

use crate::bitvec::RsBitvec;
use crate::error::Error;

#[derive(Debug, Clone)]
pub struct BoundedSumRange {
    values: Vec<u64>,
    /// Bucket height: thresholds are grouped `h` per level.
    h: u64,
    /// `levels[k]` holds the positions with value >= k*h (0-based positions,
    /// ascending) and the concatenated mark strips for thresholds
    /// `k*h ..= k*h + h - 1`.
    levels: Vec<Level>,
}

#[derive(Debug, Clone)]
struct Level {
    positions: Vec<u32>,
    strips: RsBitvec,
}

impl BoundedSumRange {
    pub fn build(values: &[u64]) -> Result<BoundedSumRange, Error> {
        if values.len() < 2 {
            return Err(Error::TooShort { need: 2 });
        }
        let m = values.len();
        let h = (usize::BITS - 1 - m.leading_zeros()).max(1) as u64; // floor(log2 m)
        let mut levels = Vec::new();
        let mut current: Vec<u32> = (0..m as u32).collect();
        let mut k = 0u64;
        while !current.is_empty() {
            let mk = current.len();
            // Strip for threshold k*h + y is all ones minus the positions
            // whose value falls below; build by the two construction cases.
            let all_high = current.iter().all(|&i| values[i as usize] >= (k + 1) * h);
            let strips = if all_high {
                RsBitvec::from_bits(std::iter::repeat(true).take((h as usize) * mk))
            } else {
                let mut bits = vec![true; (h as usize) * mk];
                // event lists: position i leaves the strip at level y+1 when
                // values[i] == k*h + y
                let mut leave: Vec<Vec<u32>> = vec![Vec::new(); h as usize];
                for (slot, &i) in current.iter().enumerate() {
                    let v = values[i as usize];
                    if v < (k + 1) * h {
                        let y = (v - k * h) as usize;
                        leave[y].push(slot as u32);
                    }
                }
                let mut dropped: Vec<u32> = Vec::new();
                for y in 1..h as usize {
                    dropped.extend_from_slice(&leave[y - 1]);
                    for &slot in &dropped {
                        bits[y * mk + slot as usize] = false;
                    }
                }
                RsBitvec::from_bits(bits)
            };
            levels.push(Level {
                positions: std::mem::take(&mut current),
                strips,
            });
            let prev = &levels.last().unwrap().positions;
            current = prev
                .iter()
                .copied()
                .filter(|&i| values[i as usize] >= (k + 1) * h)
                .collect();
            k += 1;
        }
        Ok(BoundedSumRange {
            values: values.to_vec(),
            h,
            levels,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// `|{i in [0..j) : values[i] >= v}|` (0-based exclusive prefix).
    pub fn rcount(&self, v: u64, j: usize) -> usize {
        debug_assert!(j <= self.values.len());
        let k = (v / self.h) as usize;
        let Some(level) = self.levels.get(k) else {
            return 0;
        };
        let mk = level.positions.len();
        // j' = number of level positions < j
        let jp = level.positions.partition_point(|&p| (p as usize) < j);
        let y = (v - k as u64 * self.h) as usize;
        level.strips.rank1(y * mk + jp) - level.strips.rank1(y * mk)
    }

    /// 0-based position of the `r`-th entry (left to right) with value at
    /// least `v`; `r >= 1`.
    pub fn rselect(&self, v: u64, r: usize) -> Option<usize> {
        let k = (v / self.h) as usize;
        let level = self.levels.get(k)?;
        let mk = level.positions.len();
        let y = (v - k as u64 * self.h) as usize;
        let base = level.strips.rank1(y * mk);
        if base + r > level.strips.count_ones() {
            return None;
        }
        let pos = level.strips.select1(base + r);
        if pos >= (y + 1) * mk {
            return None;
        }
        Some(level.positions[pos - y * mk] as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_rcount, naive_rselect};
    use rand::{Rng, SeedableRng};

    #[test]
    fn spec_examples() {
        let a = [3u64, 0, 5, 1];
        let r = BoundedSumRange::build(&a).unwrap();
        // 1-based in the description: rcount(2,4)=2, rselect(2,2)=3,
        // rselect(1,3)=4, rcount(4,4)=1
        assert_eq!(r.rcount(2, 4), 2);
        assert_eq!(r.rselect(2, 2), Some(2));
        assert_eq!(r.rselect(1, 3), Some(3));
        assert_eq!(r.rcount(4, 4), 1);
        assert_eq!(r.rcount(0, 3), 3);
        assert_eq!(r.rcount(6, 4), 0);
        assert_eq!(r.rcount(2, 0), 0);
        for rr in 1..=4 {
            assert_eq!(r.rselect(0, rr), Some(rr - 1));
        }
    }

    #[test]
    fn all_zeros() {
        let a = [0u64; 16];
        let r = BoundedSumRange::build(&a).unwrap();
        assert_eq!(r.rcount(1, 16), 0);
        assert_eq!(r.rcount(0, 16), 16);
    }

    #[test]
    fn too_short_rejected() {
        assert!(BoundedSumRange::build(&[1]).is_err());
    }

    #[test]
    fn oracle_equivalence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..60 {
            let m = rng.gen_range(2..120usize);
            // mixes of small and large values, including a bounded-sum shape
            let a: Vec<u64> = (0..m)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        rng.gen_range(0..(4 * m as u64))
                    } else {
                        rng.gen_range(0..6u64)
                    }
                })
                .collect();
            let r = BoundedSumRange::build(&a).unwrap();
            let max = a.iter().copied().max().unwrap();
            for v in 0..=max + 1 {
                for j in 0..=m {
                    assert_eq!(r.rcount(v, j), naive_rcount(&a, v, j), "v={v} j={j} a={a:?}");
                }
                let total = naive_rcount(&a, v, m);
                for rk in 1..=total {
                    assert_eq!(
                        r.rselect(v, rk).map(|x| x + 1),
                        naive_rselect(&a, v, rk),
                        "v={v} r={rk}"
                    );
                }
                assert_eq!(r.rselect(v, total + 1), None);
            }
        }
    }

    #[test]
    fn duality() {
        let a = [7u64, 7, 0, 3, 9, 1, 7];
        let r = BoundedSumRange::build(&a).unwrap();
        for v in 0..=10u64 {
            let total = r.rcount(v, a.len());
            for rk in 1..=total {
                let p = r.rselect(v, rk).unwrap();
                assert_eq!(r.rcount(v, p + 1), rk);
            }
        }
    }
}
