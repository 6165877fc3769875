//! Pattern matching: suffix-array range, occurrence count, and occurrence
//! enumeration for packed patterns. Short patterns resolve through the
//! block table, long aperiodic ones through an anchored context lookup, and
//! periodic ones through the run machinery with the occurrence set split by
//! repetition count and break direction.

use crate::error::Error;
use crate::sa::{period_of, prank, psel, window_rotation, FullIndex, Mode, TextIndex};
use crate::text::{MetaEncoding, PackedText};

/// Decomposition of a periodic pattern, mirroring the position view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMeta {
    pub root: Vec<u32>,
    pub head: usize,
    pub exp: usize,
    pub tail: usize,
    /// 1-based position of the first period break, `m + 1` when none.
    pub run_end: usize,
    /// `run_end - tail`.
    pub run_end_full: usize,
    pub type_plus: bool,
    pub(crate) root_key: u128,
}

impl TextIndex {
    /// Suffix-array range `(b, e)` of a symbol pattern: `b` suffixes are
    /// smaller, the next `e - b` have the pattern as a prefix.
    pub fn range_syms(&self, pat: &[u32]) -> Result<(usize, usize), Error> {
        let sigma = self.text.sigma();
        if let Some(&s) = pat.iter().find(|&&s| s >= sigma) {
            return Err(Error::BadSymbol { sym: s, sigma });
        }
        // The sentinel symbol may appear only at the very end. A pattern
        // continuing past a sentinel cannot occur, and any suffix matching
        // up to the sentinel is a proper prefix of it, hence smaller.
        if let Some(at) = pat.iter().position(|&s| s == 0) {
            if at + 1 != pat.len() {
                let (_, e) = self.range_syms(&pat[..at + 1])?;
                return Ok((e, e));
            }
        }
        Ok(self.range_unchecked(pat))
    }

    fn range_unchecked(&self, pat: &[u32]) -> (usize, usize) {
        match &self.mode {
            Mode::Fallback { sa, .. } => fallback_range(&self.text, sa, pat),
            Mode::Full(f) => f.range_pattern(&self.text, &self.enc, pat),
        }
    }

    /// Number of occurrences.
    pub fn count_syms(&self, pat: &[u32]) -> Result<usize, Error> {
        if pat.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let (b, e) = self.range_syms(pat)?;
        Ok(e - b)
    }

    /// All occurrence positions (1-based), in rank order.
    pub fn locate_syms(&self, pat: &[u32]) -> Result<Vec<usize>, Error> {
        if pat.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let (b, e) = self.range_syms(pat)?;
        (b + 1..=e).map(|i| self.query_sa(i)).collect()
    }

    /// Decomposition of a periodic pattern.
    pub fn pattern_meta(&self, pat: &[u32]) -> Result<PatternMeta, Error> {
        let tau = self.text.tau();
        let win = 3 * tau - 1;
        if tau < 3 || pat.len() < win {
            return Err(Error::NotPeriodic { pos: 0 });
        }
        let p = period_of(&pat[..win])
            .filter(|&p| 3 * p <= tau)
            .ok_or(Error::NotPeriodic { pos: 0 })?;
        Ok(pattern_meta_inner(&self.enc, pat, p))
    }

    /// Whether the pattern takes the periodic path.
    pub fn pattern_periodic(&self, pat: &[u32]) -> bool {
        let tau = self.text.tau();
        let win = 3 * tau - 1;
        tau >= 3
            && pat.len() >= win
            && period_of(&pat[..win]).map(|p| 3 * p <= tau).unwrap_or(false)
    }
}

/// Run view of an explicit pattern with verified window period `p`.
pub(crate) fn pattern_meta_inner(enc: &MetaEncoding, pat: &[u32], p: usize) -> PatternMeta {
    let m = pat.len();
    let (head, root_key) = window_rotation(pat, p, enc);
    // longest common prefix of the pattern and its p-shift
    let mut l = 0usize;
    while p + l < m && pat[l] == pat[p + l] {
        l += 1;
    }
    let rend0 = p + l; // 0-based index of the break, m if none
    let exp = (rend0 - head) / p;
    let tail = (rend0 - head) % p;
    let type_plus = rend0 < m && pat[rend0] > pat[rend0 - p];
    PatternMeta {
        root: pat[head..head + p].to_vec(),
        head,
        exp,
        tail,
        run_end: rend0 + 1,
        run_end_full: rend0 + 1 - tail,
        type_plus,
        root_key,
    }
}

impl FullIndex {
    pub(crate) fn range_pattern(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        pat: &[u32],
    ) -> (usize, usize) {
        let tau = text.tau();
        let win = 3 * tau - 1;
        if pat.len() < win {
            return self.range_of_short(enc, pat);
        }
        let window = &pat[..win];
        let periodic = period_of(window).map(|p| 3 * p <= tau).unwrap_or(false);
        if periodic {
            return self.periodic_range(text, enc, pat);
        }
        // resolve the window block first
        let (b_y, e_y) = self.range_of_short(enc, window);
        if b_y == e_y {
            return (b_y, e_y);
        }
        let l = self
            .dist_prefix_len(tau, text.bits(), window)
            .expect("occurring nonperiodic windows anchor");
        let x = &window[..l];
        let (b_x, _) = self.range_of_short(enc, x);
        let delta_text = l - 2 * tau;
        let tail_pat = &pat[delta_text..];
        let (b_pre, e_pre) = self.s_meta.prefix_range(text, enc, tail_pat);
        let rev: Vec<u32> = x.iter().rev().copied().collect();
        let d1 = self.w.prefix_rank(&rev, b_pre).expect("context rank");
        let d2 = self.w.prefix_rank(&rev, e_pre).expect("context rank");
        (b_x + d1, b_x + d2)
    }

    fn periodic_range(&self, text: &PackedText, enc: &MetaEncoding, pat: &[u32]) -> (usize, usize) {
        let tau = text.tau();
        let win = 3 * tau - 1;
        let m = pat.len();
        let window = &pat[..win];
        let p = period_of(window).unwrap();
        let meta = pattern_meta_inner(enc, pat, p);
        let (b_x, e_x) = self.range_of_short(enc, window);
        let int_x = enc.int(window.iter().copied(), win);
        let rend0 = meta.run_end - 1;
        let pend_full0 = meta.run_end_full - 1; // = head + exp * p
        debug_assert_eq!(pend_full0, meta.head + meta.exp * p);

        // occurrence count: repetition-above occurrences exist only when
        // the pattern stays periodic to its end
        let occ_above = if rend0 < m {
            0
        } else {
            self.count_exp_gt(false, b_x, e_x, int_x, meta.exp)
                + self.count_exp_gt(true, b_x, e_x, int_x, meta.exp)
        };
        let occ_same = self.count_exact_occ(text, enc, &meta, pat, pend_full0, false)
            + self.count_exact_occ(text, enc, &meta, pat, pend_full0, true);
        let occ = occ_above + occ_same;

        // rank offset of the pattern within the window class
        let delta = if !meta.type_plus {
            let da = self.count_exp_le(false, b_x, e_x, int_x, meta.exp);
            let ds = self.pos_same_minus(text, enc, &meta, pat, pend_full0);
            da - ds
        } else {
            let da = self.count_exp_le(true, b_x, e_x, int_x, meta.exp);
            let ds = self.pos_same_plus(text, enc, &meta, pat, pend_full0);
            (e_x - b_x) - (da - ds)
        };
        (b_x + delta, b_x + delta + occ)
    }

    /// Class positions on one side with repetition count strictly above `k`.
    pub(crate) fn count_exp_gt(
        &self,
        plus: bool,
        b_x: usize,
        e_x: usize,
        int_x: u128,
        k: usize,
    ) -> usize {
        let side = self.side(plus);
        let marks = &side.exp_marks;
        let d = prank(marks, e_x) - prank(marks, b_x);
        if d == 0 {
            return 0;
        }
        let kmin = side.min_exp[&int_x] as usize;
        let kmax = kmin + d - 1;
        if k >= kmax {
            return 0;
        }
        if !plus {
            let p0 = prank(marks, b_x);
            let total = psel(marks, p0 + d) - b_x;
            if k < kmin {
                total
            } else {
                total - (psel(marks, p0 + (k - kmin) + 1) - b_x)
            }
        } else {
            let r0 = prank(marks, b_x);
            let first = psel(marks, r0 + 1);
            if k < kmin {
                e_x - first + 1
            } else {
                // groups run from the largest count downward
                let g = kmax - k; // number of groups with count > k
                psel(marks, r0 + g + 1) - first
            }
        }
    }

    /// Class positions on one side with repetition count at most `k`.
    pub(crate) fn count_exp_le(
        &self,
        plus: bool,
        b_x: usize,
        e_x: usize,
        int_x: u128,
        k: usize,
    ) -> usize {
        let side = self.side(plus);
        let marks = &side.exp_marks;
        let d = prank(marks, e_x) - prank(marks, b_x);
        if d == 0 {
            return 0;
        }
        let kmin = side.min_exp[&int_x] as usize;
        let kmax = kmin + d - 1;
        if k < kmin {
            return 0;
        }
        if !plus {
            let p0 = prank(marks, b_x);
            if k >= kmax {
                psel(marks, p0 + d) - b_x
            } else {
                psel(marks, p0 + (k - kmin) + 1) - b_x
            }
        } else {
            let r0 = prank(marks, b_x);
            let g = if k >= kmax { 1 } else { kmax - k + 1 };
            let start = psel(marks, r0 + g);
            e_x - start + 1
        }
    }

    /// Occurrences with repetition count exactly the pattern's, on one side:
    /// at most one per run, found through the post-run anchors.
    fn count_exact_occ(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PatternMeta,
        pat: &[u32],
        pend_full0: usize,
        plus: bool,
    ) -> usize {
        let side = self.side(plus);
        let Some(z_meta) = side.z_meta.as_ref() else {
            return 0;
        };
        let probe = padded_remainder(text, meta, pat, pend_full0);
        let (b_pre, e_pre) = z_meta.prefix_range(text, enc, &probe);
        side.rcount(pend_full0 as u64, e_pre) - side.rcount(pend_full0 as u64, b_pre)
    }

    /// Same-repetition class positions whose suffix is at least the pattern
    /// (minus side).
    fn pos_same_minus(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PatternMeta,
        pat: &[u32],
        pend_full0: usize,
    ) -> usize {
        let side = self.side(false);
        let Some(root) = side.roots.get(&meta.root_key) else {
            return 0;
        };
        let x = self.z_rank_lt(text, enc, meta, pat, pend_full0, false);
        let e_h = root.block.1 as usize;
        side.rcount(pend_full0 as u64, e_h) - side.rcount(pend_full0 as u64, x)
    }

    /// Same-repetition class positions whose suffix is below the pattern
    /// (plus side).
    fn pos_same_plus(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PatternMeta,
        pat: &[u32],
        pend_full0: usize,
    ) -> usize {
        let side = self.side(true);
        let Some(root) = side.roots.get(&meta.root_key) else {
            return 0;
        };
        let x = self.z_rank_lt(text, enc, meta, pat, pend_full0, true);
        let b_h = root.block.0 as usize;
        side.rcount(pend_full0 as u64, x) - side.rcount(pend_full0 as u64, b_h)
    }

    /// Runs (lex count) whose anchored suffix is smaller than the padded
    /// pattern remainder.
    fn z_rank_lt(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PatternMeta,
        pat: &[u32],
        pend_full0: usize,
        plus: bool,
    ) -> usize {
        let side = self.side(plus);
        let Some(z_meta) = side.z_meta.as_ref() else {
            return 0;
        };
        let probe = padded_remainder(text, meta, pat, pend_full0);
        let m = probe.len();
        z_meta.rank_lt(text, enc, |i| enc.meta_symbol(|d| probe[d], m, i), enc.meta_len(m))
    }
}

/// The repeated root padded to the anchor length, followed by the pattern
/// remainder after its last full repetition.
fn padded_remainder(
    text: &PackedText,
    meta: &PatternMeta,
    pat: &[u32],
    pend_full0: usize,
) -> Vec<u32> {
    let p = meta.root.len();
    let pow_len = p * text.tau().div_ceil(p);
    let mut probe: Vec<u32> = Vec::with_capacity(pow_len + pat.len() - pend_full0);
    for t in 0..pow_len {
        probe.push(meta.root[t % p]);
    }
    probe.extend_from_slice(&pat[pend_full0..]);
    probe
}

/// Plain suffix-array binary search for the fallback mode.
pub(crate) fn fallback_range(text: &PackedText, sa: &[u32], pat: &[u32]) -> (usize, usize) {
    let n = text.n();
    let suffix_lt = |suf: usize| -> bool {
        for (t, &pc) in pat.iter().enumerate() {
            if suf + t >= n {
                return true;
            }
            let sc = text.sym(suf + t);
            if sc != pc {
                return sc < pc;
            }
        }
        false
    };
    let prefixed = |suf: usize| -> bool {
        pat.len() <= n - suf && (0..pat.len()).all(|t| text.sym(suf + t) == pat[t])
    };
    let b = sa.partition_point(|&s| suffix_lt(s as usize));
    let e = b + sa[b..].partition_point(|&s| prefixed(s as usize));
    (b, e)
}
