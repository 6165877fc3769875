//! Construction and storage of a synchronizing position set: a sparse set of
//! anchors chosen consistently from local window contents, dense outside
//! highly periodic regions, together with its text-order/lex-order
//! permutations and membership bitvector.

use crate::bitvec::{BitBuf, RsBitvec};
use crate::error::Error;
use crate::oracle::SyncReport;
use crate::text::PackedText;

#[derive(Debug)]
pub struct SyncSet {
    tau: usize,
    /// Sorted anchor positions (0-based).
    positions: Vec<u32>,
    /// Membership bitvector over text positions.
    marks: RsBitvec,
    /// lex index -> text index into `positions`.
    lex_to_text: Vec<u32>,
    /// text index -> lex index.
    text_to_lex: Vec<u32>,
}

impl SyncSet {
    /// Selects anchors by the local-minimum rule: a position joins the set
    /// when the smallest window identifier in its neighborhood sits at one
    /// of the two boundary windows. Windows whose period is at most a third
    /// of the window length carry no identifier, which keeps long periodic
    /// stretches empty.
    pub fn construct(text: &PackedText, isa: &[u32]) -> Result<SyncSet, Error> {
        let n = text.n();
        let tau = text.tau();
        if 2 * tau > n {
            return Err(Error::TauTooLarge { tau, n });
        }
        let last_window = n - tau; // windows start at 0..=last_window
        let ids: Vec<u64> = (0..=last_window)
            .map(|k| {
                if tau >= 3 && text.period_at_most(k, tau, tau / 3).is_some() {
                    u64::MAX
                } else {
                    window_id(text, k, tau)
                }
            })
            .collect();

        // Sliding minimum of ids over [x ..= x+tau].
        let mut positions: Vec<u32> = Vec::new();
        let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
        let upper = n - 2 * tau; // anchors range over 0..=upper
        for k in 0..=last_window {
            while let Some(&b) = deque.back() {
                if ids[b] >= ids[k] {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(k);
            let x = k as isize - tau as isize;
            if x >= 0 {
                let x = x as usize;
                while let Some(&f) = deque.front() {
                    if f < x {
                        deque.pop_front();
                    } else {
                        break;
                    }
                }
                if x <= upper {
                    let m = ids[*deque.front().unwrap()];
                    // Take the window when the minimum sits at its left end,
                    // or at its right end with no interior occurrence (texts
                    // with few distinct windows would otherwise anchor at
                    // every phase of the repetition at once).
                    let take = m != u64::MAX
                        && (ids[x] == m
                            || (ids[x + tau] == m
                                && !(x + 1..x + tau).any(|k| ids[k] == m)));
                    if take {
                        positions.push(x as u32);
                    }
                }
            }
        }

        let mut buf = BitBuf::zeros(n);
        for &p in &positions {
            buf.set(p as usize);
        }
        let marks = buf.finish();

        // Lexicographic order of the anchored suffixes via the inverse
        // suffix array available at build time.
        let mut lex_to_text: Vec<u32> = (0..positions.len() as u32).collect();
        lex_to_text.sort_by_key(|&t| isa[positions[t as usize] as usize]);
        let mut text_to_lex = vec![0u32; positions.len()];
        for (lex, &t) in lex_to_text.iter().enumerate() {
            text_to_lex[t as usize] = lex as u32;
        }
        Ok(SyncSet {
            tau,
            positions,
            marks,
            lex_to_text,
            text_to_lex,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Anchor positions in text order (0-based).
    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn marks(&self) -> &RsBitvec {
        &self.marks
    }

    /// 0-based anchor position of lex index `i` (0-based).
    #[inline]
    pub fn lex_pos(&self, i: usize) -> usize {
        self.positions[self.lex_to_text[i] as usize] as usize
    }

    #[inline]
    pub fn lex_to_text(&self) -> &[u32] {
        &self.lex_to_text
    }

    #[inline]
    pub fn text_to_lex(&self) -> &[u32] {
        &self.text_to_lex
    }

    /// Smallest anchor at or after `j` (0-based), or `n - 2*tau + 1` when
    /// none exists.
    pub fn succ(&self, text: &PackedText, j: usize) -> usize {
        let bound = text.n() - 2 * self.tau + 1;
        let before = self.marks.rank1(j);
        if before < self.positions.len() {
            (self.positions[before] as usize).min(bound)
        } else {
            bound
        }
    }

    /// Exhaustive check of the consistency and density conditions; returns
    /// the first violation found.
    pub fn verify(&self, text: &PackedText) -> SyncReport {
        verify_positions(text, self.tau, &self.positions)
    }

    /// The anchored context sequence: entry `i` is the reversal of the
    /// cyclic window `[lex_pos(i) - tau .. lex_pos(i) + 2*tau)`, flattened
    /// for the prefix rank/select structure. Entries have length `3*tau`.
    pub fn context_entries(&self, text: &PackedText) -> Vec<u32> {
        let tau = self.tau as isize;
        let mut flat = Vec::with_capacity(self.positions.len() * 3 * self.tau);
        for i in 0..self.positions.len() {
            let s = self.lex_pos(i) as isize;
            for t in 0..3 * tau {
                flat.push(text.sym_cyclic(s + 2 * tau - 1 - t));
            }
        }
        flat
    }

    pub(crate) fn from_parts(tau: usize, positions: Vec<u32>, n: usize, lex_to_text: Vec<u32>) -> SyncSet {
        let mut buf = BitBuf::zeros(n);
        for &p in &positions {
            buf.set(p as usize);
        }
        let mut text_to_lex = vec![0u32; positions.len()];
        for (lex, &t) in lex_to_text.iter().enumerate() {
            text_to_lex[t as usize] = lex as u32;
        }
        SyncSet {
            tau,
            positions,
            marks: buf.finish(),
            lex_to_text,
            text_to_lex,
        }
    }
}

/// Deterministic identifier of the window content: a mix of the packed
/// symbols so that regular texts behave like random ones. Equal windows
/// always get equal identifiers; the top value is reserved.
fn window_id(text: &PackedText, k: usize, tau: usize) -> u64 {
    let mut acc: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut i = 0usize;
    while i < tau {
        let take = (tau - i).min(16);
        let mut chunk: u64 = 0;
        for t in 0..take {
            chunk = chunk.wrapping_mul(1099511628211).wrapping_add(text.sym(k + i + t) as u64 + 1);
        }
        acc ^= chunk;
        acc = acc.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        acc ^= acc >> 29;
        i += take;
    }
    acc & (u64::MAX >> 1)
}

/// Window-packed variant of the exhaustive condition check, shared by the
/// set's own `verify` and the command-line verifier.
pub fn verify_positions(text: &PackedText, tau: usize, positions: &[u32]) -> SyncReport {
    let n = text.n();
    let mut member = vec![false; n];
    for &p in positions {
        member[p as usize] = true;
    }
    // Consistency: equal 2*tau-windows agree on membership.
    if n >= 2 * tau {
        use std::collections::HashMap;
        let packable = 2 * tau * text.bits() as usize <= 128;
        let mut seen: HashMap<u128, (usize, bool)> = HashMap::new();
        let mut seen_vec: HashMap<Vec<u32>, (usize, bool)> = HashMap::new();
        for i in 0..=n - 2 * tau {
            let m = member[i];
            if packable {
                let key = (0..2 * tau).fold(0u128, |acc, t| {
                    (acc << text.bits()) | text.sym(i + t) as u128
                });
                match seen.get(&key) {
                    Some(&(j, mj)) => {
                        if mj != m {
                            return SyncReport::ConsistencyViolation { i, j };
                        }
                    }
                    None => {
                        seen.insert(key, (i, m));
                    }
                }
            } else {
                let key: Vec<u32> = (0..2 * tau).map(|t| text.sym(i + t)).collect();
                match seen_vec.get(&key) {
                    Some(&(j, mj)) => {
                        if mj != m {
                            return SyncReport::ConsistencyViolation { i, j };
                        }
                    }
                    None => {
                        seen_vec.insert(key, (i, m));
                    }
                }
            }
        }
    }
    // Density: a window of tau consecutive anchorless positions appears
    // exactly at the highly periodic positions.
    if n + 2 >= 3 * tau {
        for i in 0..=n + 1 - 3 * tau {
            let empty = (i..i + tau).all(|x| !member[x]);
            let periodic = text.period_at_most(i, 3 * tau - 1, tau / 3).is_some();
            if empty != periodic {
                return SyncReport::DensityViolation { i };
            }
        }
    }
    SyncReport::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sais;
    use crate::text::BuildConfig;

    fn build(raw: &[u8], tau: u16) -> (PackedText, SyncSet) {
        let cfg = BuildConfig {
            tau_override: Some(tau),
            force_full: true,
            ..BuildConfig::default()
        };
        let text = PackedText::ingest(raw, &cfg).unwrap();
        let syms: Vec<u32> = (0..text.n()).map(|i| text.sym(i)).collect();
        let sa = sais::suffix_array(&syms);
        let isa = sais::inverse(&sa);
        let set = SyncSet::construct(&text, &isa).unwrap();
        (text, set)
    }

    #[test]
    fn tau_one_takes_everything() {
        let (text, set) = build(b"abaababababaababa", 1);
        let expect: Vec<u32> = (0..text.n() as u32 - 1).collect();
        assert_eq!(set.positions(), &expect[..]);
        assert_eq!(set.verify(&text), SyncReport::Pass);
    }

    #[test]
    fn fig_lex_order_matches_sa() {
        // tau = 1: anchors are 1..=17 (1-based), so the lex order is the SA
        // with the sentinel suffix removed.
        let (_text, set) = build(b"abaababababaababa", 1);
        let expect_1based = [17u32, 12, 3, 15, 10, 1, 13, 8, 6, 4, 16, 11, 2, 14, 9, 7, 5];
        let got: Vec<u32> = (0..set.len()).map(|i| set.lex_pos(i) as u32 + 1).collect();
        assert_eq!(got, expect_1based);
    }

    #[test]
    fn constructed_sets_verify() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for &(len, sigma, tau) in &[
            (300usize, 2u8, 2u16),
            (500, 2, 3),
            (500, 3, 3),
            (400, 2, 4),
            (333, 4, 3),
            (64, 2, 6),
        ] {
            let raw: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let (text, set) = build(&raw, tau);
            assert_eq!(set.verify(&text), SyncReport::Pass, "len={len} sigma={sigma} tau={tau}");
            // spot-check against the independent oracle checker
            let syms: Vec<u32> = (0..text.n()).map(|i| text.sym(i)).collect();
            let pos: Vec<usize> = set.positions().iter().map(|&p| p as usize).collect();
            assert_eq!(
                crate::oracle::verify_sync(&syms, tau as usize, &pos),
                SyncReport::Pass
            );
        }
    }

    #[test]
    fn periodic_texts_stay_sparse() {
        let mut raw = vec![b'a'; 200];
        raw.extend(b"babab");
        raw.extend(vec![b'a'; 200]);
        let (text, set) = build(&raw, 3);
        assert_eq!(set.verify(&text), SyncReport::Pass);
        // the unary stretches admit no anchors except near their ends
        assert!(set.len() < 40, "|S| = {} should be tiny", set.len());
    }

    #[test]
    fn succ_matches_scan() {
        let (text, set) = build(b"abaababababaababaabbbaabababbbaba", 2);
        assert_eq!(set.verify(&text), SyncReport::Pass);
        let n = text.n();
        let bound = n - 2 * set.tau() + 1;
        for j in 0..=n - 2 * set.tau() {
            let naive = set
                .positions()
                .iter()
                .map(|&p| p as usize)
                .find(|&p| p >= j)
                .unwrap_or(bound)
                .min(bound);
            assert_eq!(set.succ(&text, j), naive);
            if set.marks().get(j) {
                assert_eq!(set.succ(&text, j), j);
            }
        }
    }

    #[test]
    fn size_within_target() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let raw: Vec<u8> = (0..1 << 16).map(|_| b'a' + rng.gen_range(0..2)).collect();
        let (text, set) = build(&raw, 2);
        assert_eq!(set.verify(&text), SyncReport::Pass);
        let ratio = set.len() as f64 * set.tau() as f64 / text.n() as f64;
        assert!(ratio <= 4.0, "|S| tau / n = {ratio}");
    }

    #[test]
    fn context_entries_shape() {
        let (text, set) = build(b"abaababababaababa", 1);
        let flat = set.context_entries(&text);
        assert_eq!(flat.len(), set.len() * 3);
        // entry i = reverse of T_cyclic[s-1 .. s+2)
        for i in 0..set.len() {
            let s = set.lex_pos(i) as isize;
            for t in 0..3isize {
                assert_eq!(flat[i * 3 + t as usize], text.sym_cyclic(s + 1 - t));
            }
        }
    }
}
