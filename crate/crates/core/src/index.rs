//! The assembled index: one structure per text direction, so that
//! suffix-link and Weiner-link traversal can run on the reversed text, plus
//! the byte-level query API.

use crate::error::Error;
use crate::sa::{RunMeta, TextIndex};
use crate::text::{BuildConfig, PackedText};

/// Full index over a byte text: forward and reversed structures behind the
/// byte-level API.
#[derive(Debug)]
pub struct Index {
    pub(crate) fwd: TextIndex,
    pub(crate) rev: TextIndex,
    pub(crate) config: BuildConfig,
}

impl Index {
    pub fn build(raw: &[u8], config: &BuildConfig) -> Result<Index, Error> {
        let fwd_text = PackedText::ingest(raw, config)?;
        // reversed text with the sentinel kept at the end
        let rev_raw: Vec<u8> = raw.iter().rev().copied().collect();
        let rev_text = PackedText::ingest(&rev_raw, config)?;
        Ok(Index {
            fwd: TextIndex::build(fwd_text)?,
            rev: TextIndex::build(rev_text)?,
            config: *config,
        })
    }

    pub(crate) fn from_parts(fwd: TextIndex, rev: TextIndex, config: BuildConfig) -> Index {
        Index { fwd, rev, config }
    }

    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn forward(&self) -> &TextIndex {
        &self.fwd
    }

    pub fn reverse(&self) -> &TextIndex {
        &self.rev
    }

    /// Text length including the sentinel.
    pub fn n(&self) -> usize {
        self.fwd.text().n()
    }

    pub fn sigma(&self) -> u32 {
        self.fwd.text().sigma()
    }

    pub fn tau(&self) -> usize {
        self.fwd.text().tau()
    }

    pub fn is_fallback(&self) -> bool {
        self.fwd.is_fallback()
    }

    /// `SA[i]`, 1-based in and out.
    pub fn sa(&self, i: usize) -> Result<usize, Error> {
        self.fwd.query_sa(i)
    }

    /// `ISA[j]`, 1-based in and out.
    pub fn isa(&self, j: usize) -> Result<usize, Error> {
        self.fwd.query_isa(j)
    }

    pub fn run_meta(&self, j: usize) -> Result<RunMeta, Error> {
        self.fwd.run_meta(j)
    }

    /// Remaps pattern bytes onto the text alphabet; `None` when a byte does
    /// not occur in the text.
    pub fn remap(&self, pattern: &[u8]) -> Option<Vec<u32>> {
        pattern
            .iter()
            .map(|&b| self.fwd.text().byte_to_sym(b))
            .collect()
    }

    /// Suffix-array range of a byte pattern. Bytes absent from the text
    /// still position correctly: the range is empty at the insertion rank.
    pub fn range(&self, pattern: &[u8]) -> Result<(usize, usize), Error> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        match self.remap(pattern) {
            Some(syms) => self.fwd.range_syms(&syms),
            None => {
                // longest mappable prefix, then the insertion point of the
                // first unmapped byte among the follow-up symbols
                let t = pattern
                    .iter()
                    .position(|&b| self.fwd.text().byte_to_sym(b).is_none())
                    .unwrap();
                let head: Vec<u32> = pattern[..t]
                    .iter()
                    .map(|&b| self.fwd.text().byte_to_sym(b).unwrap())
                    .collect();
                let (b0, e0) = self.fwd.range_syms(&head)?;
                let b = match self.fwd.text().sym_at_least(pattern[t]) {
                    Some(c) => {
                        let mut probe = head;
                        probe.push(c);
                        self.fwd.range_syms(&probe)?.0
                    }
                    None => e0,
                };
                let _ = b0;
                Ok((b, b))
            }
        }
    }

    pub fn count(&self, pattern: &[u8]) -> Result<usize, Error> {
        let (b, e) = self.range(pattern)?;
        Ok(e - b)
    }

    /// 1-based occurrence positions, in rank order.
    pub fn locate(&self, pattern: &[u8]) -> Result<Vec<usize>, Error> {
        let (b, e) = self.range(pattern)?;
        (b + 1..=e).map(|i| self.fwd.query_sa(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quickstart() {
        let idx = Index::build(b"abaababababaababa", &BuildConfig::default()).unwrap();
        assert_eq!(idx.sa(7).unwrap(), 1);
        assert_eq!(idx.sa(1).unwrap(), 18);
        assert_eq!(idx.sa(18).unwrap(), 5);
        assert_eq!(idx.isa(18).unwrap(), 1);
        assert_eq!(idx.isa(1).unwrap(), 7);
        assert_eq!(idx.range(b"aba").unwrap(), (4, 11));
        assert_eq!(idx.count(b"aba").unwrap(), 7);
        assert_eq!(idx.count(b"b").unwrap(), 7);
        assert_eq!(idx.range(b"b").unwrap(), (11, 18));
    }

    #[test]
    fn inverse_permutations() {
        let idx = Index::build(b"mississippi mississippi banana", &BuildConfig::default()).unwrap();
        let n = idx.n();
        for j in 1..=n {
            assert_eq!(idx.sa(idx.isa(j).unwrap()).unwrap(), j);
        }
        assert!(idx.sa(0).is_err());
        assert!(idx.sa(n + 1).is_err());
    }

    #[test]
    fn unmapped_bytes_position_correctly() {
        let idx = Index::build(b"abaababababaababa", &BuildConfig::default()).unwrap();
        assert_eq!(idx.count(b"axa").unwrap(), 0);
        // 'c' sorts above everything: insertion at the very end
        let (b, e) = idx.range(b"c").unwrap();
        assert_eq!((b, e), (idx.n(), idx.n()));
        // 'a' then an absent byte sorts between "a(b...)" extensions
        let (b1, e1) = idx.range(b"ac").unwrap();
        assert_eq!(b1, e1);
        let (beg_ab, _) = idx.range(b"ab").unwrap();
        let (_, end_a) = idx.range(b"a").unwrap();
        assert!(b1 > beg_ab && b1 <= end_a);
        // absent byte below 'a'
        let (b2, e2) = idx.range(b"Z").unwrap();
        assert_eq!((b2, e2), (1, 1), "only the sentinel suffix is smaller");
    }
}
