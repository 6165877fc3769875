//! The suffix-array index: short-prefix block core, the nonperiodic path
//! through anchored contexts, and the periodic path through run
//! decompositions, with both orders of lookup (`SA[i]` and `ISA[j]`).
//!
//! Query code follows 1-based rank/position conventions; the `prank`/`psel`
//! helpers pin the translation to the 0-based bitvectors in one place.

use crate::bitvec::{BitBuf, RsBitvec};
use crate::error::Error;
use crate::prefix_rs::PrefixRankSelect;
use crate::range_cs::BoundedSumRange;
use crate::sais;
use crate::sync::SyncSet;
use crate::text::{MetaEncoding, PackedText};
use crate::trie::{CompactTrie, MetaTrie, TruncTrie};
use std::collections::HashMap;

/// Count of set bits at 1-based positions `<= x`.
#[inline]
pub(crate) fn prank(bv: &RsBitvec, x: usize) -> usize {
    bv.rank1(x)
}

/// 1-based position of the `r`-th set bit.
#[inline]
pub(crate) fn psel(bv: &RsBitvec, r: usize) -> usize {
    bv.select1(r) + 1
}

/// Decomposition view of a periodic position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunMeta {
    /// Lexicographically least rotation of the period (symbols).
    pub root: Vec<u32>,
    /// Offset of the first full root occurrence.
    pub head: usize,
    /// Number of full root repetitions.
    pub exp: usize,
    /// Residue length after the last full repetition.
    pub tail: usize,
    /// 1-based position just past the periodic stretch.
    pub run_end: usize,
    /// `run_end - tail`.
    pub run_end_full: usize,
    /// Break direction: `true` when the symbol ending the stretch exceeds
    /// the one a period earlier.
    pub type_plus: bool,
}

/// One maximal periodic run, recorded at its starting position (0-based).
#[derive(Debug, Clone)]
pub(crate) struct RunInfo {
    pub start: u32,
    pub root_key: u128,
    pub period: u32,
    pub head: u32,
    pub rend: u32,
    pub rend_full: u32,
    pub plus: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct RootInfo {
    pub period: u32,
    /// Text position of a literal root occurrence (0-based).
    pub rep: u32,
    /// Run interval of this root in the lex order (counts).
    pub block: (u32, u32),
    /// For each prefix length `l in 0..=period` of the root: counts of runs
    /// whose trailing suffix is smaller than the prefix, and of those it
    /// prefixes.
    pub pref_bounds: Vec<(u32, u32)>,
}

/// Per-break-direction structures of the periodic path.
#[derive(Debug)]
pub(crate) struct PeriodicSide {
    pub plus: bool,
    /// Group boundary marks over suffix ranks: group ends for the minus
    /// side, group starts for the plus side.
    pub exp_marks: RsBitvec,
    /// Run start marks over text positions.
    pub run_marks: RsBitvec,
    /// Run starts ordered by root, then by the suffix after the last full
    /// root repetition (0-based).
    pub run_lex: Vec<u32>,
    /// `run_end_full` of each lex-ordered run (0-based).
    pub run_full: Vec<u32>,
    /// text order -> lex order of runs.
    pub run_text_to_lex: Vec<u32>,
    /// Range structure over `run_full - run_start` in lex order.
    pub lens: Option<BoundedSumRange>,
    pub lens_small: Vec<u64>,
    /// Smallest repetition count per short-prefix key.
    pub min_exp: HashMap<u128, u64>,
    pub roots: HashMap<u128, RootInfo>,
    /// Search anchors for the post-run suffixes (0-based, suffix-sorted).
    pub z_positions: Vec<u32>,
    pub z_meta: Option<MetaTrie>,
    pub z_trie: Option<CompactTrie>,
}

impl PeriodicSide {
    /// Runs among the first `j` (lex order, 1-based count) whose length
    /// value is at least `v`.
    pub fn rcount(&self, v: u64, j: usize) -> usize {
        match &self.lens {
            Some(r) => r.rcount(v, j),
            None => self.lens_small[..j].iter().filter(|&&x| x >= v).count(),
        }
    }

    /// 1-based lex index of the `r`-th run with length value at least `v`.
    pub fn rselect(&self, v: u64, r: usize) -> Option<usize> {
        match &self.lens {
            Some(s) => s.rselect(v, r).map(|x| x + 1),
            None => self
                .lens_small
                .iter()
                .enumerate()
                .filter(|(_, &x)| x >= v)
                .nth(r - 1)
                .map(|(i, _)| i + 1),
        }
    }

    /// Lex-count bounds of the runs in `root`'s block whose post-run suffix
    /// is below / prefixed by an explicit short pattern.
    pub fn pref_range(&self, text: &PackedText, root: &RootInfo, pat: &[u32]) -> (usize, usize) {
        let at = root.block.0 as usize;
        let end = root.block.1 as usize;
        let lo = at + self.run_full[at..end]
            .partition_point(|&rf| suffix_lt_pattern(text, rf as usize, pat));
        let hi = at + self.run_full[at..end]
            .partition_point(|&rf| !suffix_gt_pattern_nonprefix(text, rf as usize, pat));
        (lo, hi)
    }
}

/// Anchor-membership flags keyed by window content.
#[derive(Debug)]
pub(crate) enum WindowFlags {
    Flat { shift: u32, flags: Vec<bool> },
    Map(HashMap<u64, bool>),
}

impl WindowFlags {
    /// Exact packed key; the ingest gate keeps `width * shift` within 64.
    fn key<F: Fn(usize) -> u32>(shift: u32, width: usize, sym: F) -> u64 {
        (0..width).fold(0u64, |acc, t| (acc << shift) | sym(t) as u64)
    }

    pub fn get<F: Fn(usize) -> u32>(&self, width: usize, shift: u32, sym: F) -> bool {
        match self {
            WindowFlags::Flat { shift, flags } => flags[Self::key(*shift, width, sym) as usize],
            WindowFlags::Map(m) => m.get(&Self::key(shift, width, sym)).copied().unwrap_or(false),
        }
    }
}

/// Full structure for one text.
#[derive(Debug)]
pub(crate) struct FullIndex {
    /// Block-end marks over suffix ranks.
    pub b_short: RsBitvec,
    /// Encoded distinct short prefixes in rank order.
    pub a_short: Vec<u128>,
    pub a_short_len: Vec<u8>,
    pub sync: SyncSet,
    pub w: PrefixRankSelect,
    pub win_flags: WindowFlags,
    pub s_meta: MetaTrie,
    pub s_trie: CompactTrie,
    pub t_short: TruncTrie,
    pub minus: PeriodicSide,
    pub plus: PeriodicSide,
}

#[derive(Debug)]
pub(crate) enum Mode {
    Fallback { sa: Vec<u32>, isa: Vec<u32> },
    Full(Box<FullIndex>),
}

/// Index over a single text direction.
#[derive(Debug)]
pub struct TextIndex {
    pub(crate) text: PackedText,
    pub(crate) enc: MetaEncoding,
    pub(crate) mode: Mode,
}

impl TextIndex {
    pub fn build(text: PackedText) -> Result<TextIndex, Error> {
        let enc = MetaEncoding::new(text.sigma(), text.tau());
        let syms: Vec<u32> = (0..text.n()).map(|i| text.sym(i)).collect();
        let sa = sais::suffix_array(&syms);
        let isa = sais::inverse(&sa);
        drop(syms);
        if text.fallback() {
            return Ok(TextIndex {
                text,
                enc,
                mode: Mode::Fallback { sa, isa },
            });
        }
        let full = FullIndex::build(&text, &enc, &sa, &isa)?;
        drop(sa);
        Ok(TextIndex {
            text,
            enc,
            mode: Mode::Full(Box::new(full)),
        })
    }

    pub fn text(&self) -> &PackedText {
        &self.text
    }

    #[cfg(test)]
    pub(crate) fn encoding(&self) -> &MetaEncoding {
        &self.enc
    }

    pub fn is_fallback(&self) -> bool {
        matches!(self.mode, Mode::Fallback { .. })
    }

    pub(crate) fn full(&self) -> Option<&FullIndex> {
        match &self.mode {
            Mode::Full(f) => Some(f),
            Mode::Fallback { .. } => None,
        }
    }

    /// `(anchor count, tau)` when the sampled machinery is active.
    pub fn sync_stats(&self) -> Option<(usize, usize)> {
        self.full().map(|f| (f.sync.len(), f.sync.tau()))
    }

    /// `SA[i]` for 1-based `i`; returns the 1-based suffix start.
    pub fn query_sa(&self, i: usize) -> Result<usize, Error> {
        let n = self.text.n();
        if i < 1 || i > n {
            return Err(Error::OutOfRange { pos: i, max: n });
        }
        match &self.mode {
            Mode::Fallback { sa, .. } => Ok(sa[i - 1] as usize + 1),
            Mode::Full(f) => Ok(f.query_sa(&self.text, &self.enc, i)),
        }
    }

    /// `ISA[j]` for 1-based `j`.
    pub fn query_isa(&self, j: usize) -> Result<usize, Error> {
        let n = self.text.n();
        if j < 1 || j > n {
            return Err(Error::OutOfRange { pos: j, max: n });
        }
        match &self.mode {
            Mode::Fallback { isa, .. } => Ok(isa[j - 1] as usize + 1),
            Mode::Full(f) => Ok(f.query_isa(&self.text, &self.enc, j)),
        }
    }

    /// Whether the 1-based position `j` starts a highly periodic window.
    pub fn is_periodic_pos(&self, j: usize) -> Result<bool, Error> {
        let n = self.text.n();
        if j < 1 || j > n {
            return Err(Error::OutOfRange { pos: j, max: n });
        }
        Ok(is_periodic_at(&self.text, j - 1))
    }

    /// Whether `SA[i]` is a periodic position, decided from the rank alone.
    pub fn is_periodic_rank(&self, i: usize) -> Result<bool, Error> {
        let n = self.text.n();
        if i < 1 || i > n {
            return Err(Error::OutOfRange { pos: i, max: n });
        }
        match &self.mode {
            Mode::Fallback { sa, .. } => Ok(is_periodic_at(&self.text, sa[i - 1] as usize)),
            Mode::Full(f) => {
                let tau = self.text.tau();
                let y = prank(&f.b_short, i - 1);
                if (f.a_short_len[y] as usize) < 3 * tau - 1 {
                    return Ok(false);
                }
                let x = decode_short(&self.enc, f.a_short[y], f.a_short_len[y]);
                Ok(period_of(&x).map(|p| 3 * p <= tau).unwrap_or(false))
            }
        }
    }

    /// Run decomposition of a periodic 1-based position.
    pub fn run_meta(&self, j: usize) -> Result<RunMeta, Error> {
        let n = self.text.n();
        if j < 1 || j > n {
            return Err(Error::OutOfRange { pos: j, max: n });
        }
        let meta =
            position_meta(&self.text, &self.enc, j - 1).ok_or(Error::NotPeriodic { pos: j })?;
        Ok(RunMeta {
            root: (0..meta.period)
                .map(|t| self.text.sym(meta.root_rep + t))
                .collect(),
            head: meta.head,
            exp: meta.exp,
            tail: meta.tail,
            run_end: meta.rend + 1,
            run_end_full: meta.rend_full + 1,
            type_plus: meta.plus,
        })
    }

    /// Positions in `j`'s class with repetition count at most `j`'s
    /// (minus-break positions only).
    pub fn delta_above(&self, j: usize) -> Result<usize, Error> {
        let f = self.full().ok_or(Error::NotPeriodic { pos: j })?;
        let meta =
            position_meta(&self.text, &self.enc, j - 1).ok_or(Error::NotPeriodic { pos: j })?;
        if meta.plus {
            return Err(Error::NotPeriodic { pos: j });
        }
        let win = 3 * self.text.tau() - 1;
        let syms: Vec<u32> = (0..win).map(|t| self.text.sym(j - 1 + t)).collect();
        let (b_x, _) = f.range_of_short(&self.enc, &syms);
        let int_x = self.enc.int(syms.iter().copied(), win);
        Ok(f.delta_above_minus(b_x, int_x, meta.exp))
    }

    /// Same-repetition positions in `j`'s class with larger suffixes
    /// (minus-break positions only).
    pub fn delta_same(&self, j: usize) -> Result<usize, Error> {
        let f = self.full().ok_or(Error::NotPeriodic { pos: j })?;
        let meta =
            position_meta(&self.text, &self.enc, j - 1).ok_or(Error::NotPeriodic { pos: j })?;
        if meta.plus {
            return Err(Error::NotPeriodic { pos: j });
        }
        Ok(f.delta_same_minus(j - 1, &meta))
    }

    pub fn lce(&self, j1: usize, j2: usize) -> Result<usize, Error> {
        let n = self.text.n();
        if j1 < 1 || j1 > n || j2 < 1 || j2 > n {
            return Err(Error::OutOfRange {
                pos: j1.max(j2),
                max: n,
            });
        }
        Ok(self.text.lce(j1 - 1, j2 - 1))
    }
}

/// 0-based periodicity test of the window at `j0`.
pub(crate) fn is_periodic_at(text: &PackedText, j0: usize) -> bool {
    let tau = text.tau();
    let win = 3 * tau - 1;
    if tau < 3 || j0 + win > text.n() {
        return false;
    }
    text.period_at_most(j0, win, tau / 3).is_some()
}

/// Internal decomposition record; all positions 0-based.
#[derive(Debug, Clone)]
pub(crate) struct PosMeta {
    pub root_key: u128,
    pub root_rep: usize,
    pub period: usize,
    pub head: usize,
    pub exp: usize,
    pub tail: usize,
    pub rend: usize,
    pub rend_full: usize,
    pub plus: bool,
}

/// Full decomposition of a periodic 0-based position, straight from the
/// definitions: window period, least rotation, maximal extension.
pub(crate) fn position_meta(text: &PackedText, enc: &MetaEncoding, j0: usize) -> Option<PosMeta> {
    let tau = text.tau();
    let win = 3 * tau - 1;
    if tau < 3 || j0 + win > text.n() {
        return None;
    }
    let p = text.period_at_most(j0, win, tau / 3)?;
    let mut head = 0usize;
    for t in 1..p {
        if text.cmp_range(j0 + t, j0 + head, p) == std::cmp::Ordering::Less {
            head = t;
        }
    }
    let root_key = enc.int((0..p).map(|t| text.sym(j0 + head + t)), p);
    let rend = j0 + p + text.lce(j0, j0 + p);
    debug_assert!(rend < text.n(), "sentinel breaks every period");
    let exp = (rend - j0 - head) / p;
    let tail = (rend - j0 - head) % p;
    let plus = text.sym(rend) > text.sym(rend - p);
    Some(PosMeta {
        root_key,
        root_rep: j0 + head,
        period: p,
        head,
        exp,
        tail,
        rend,
        rend_full: rend - tail,
        plus,
    })
}

pub(crate) fn period_of(x: &[u32]) -> Option<usize> {
    (1..=x.len()).find(|&p| (0..x.len() - p).all(|i| x[i] == x[i + p]))
}

/// Least-rotation offset and length-aware key of an explicit window with
/// period `p`.
pub(crate) fn window_rotation(window: &[u32], p: usize, enc: &MetaEncoding) -> (usize, u128) {
    let mut best = 0usize;
    for t in 1..p {
        let ord = (0..p)
            .map(|i| window[t + i].cmp(&window[best + i]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal);
        if ord == std::cmp::Ordering::Less {
            best = t;
        }
    }
    let key = enc.int((0..p).map(|i| window[best + i]), p);
    (best, key)
}

pub(crate) fn decode_short(enc: &MetaEncoding, v: u128, len: u8) -> Vec<u32> {
    let len = len as usize;
    let tau = enc.tau;
    let mut val = v;
    for _ in 0..6 * tau - len {
        val /= enc.sigma;
    }
    let mut out = vec![0u32; len];
    for i in (0..len).rev() {
        out[i] = (val % enc.sigma) as u32;
        val /= enc.sigma;
    }
    out
}

impl FullIndex {
    pub fn build(
        text: &PackedText,
        enc: &MetaEncoding,
        sa: &[u32],
        isa: &[u32],
    ) -> Result<FullIndex, Error> {
        let tau = text.tau();
        let win = 3 * tau - 1;

        let (a_short, a_short_len, b_short) = build_short_blocks(text, enc, sa)?;
        debug_assert_eq!(b_short.count_ones(), a_short.len());

        let sync = SyncSet::construct(text, isa)?;
        let w = PrefixRankSelect::build(&sync.context_entries(text), 3 * tau, text.sigma(), (1, 2))?;
        let win_flags = build_window_flags(text, &sync);

        let a_s: Vec<u32> = (0..sync.len()).map(|i| sync.lex_pos(i) as u32).collect();
        let s_meta = MetaTrie::build(text, enc, &a_s)?;
        let s_trie = CompactTrie::build(text, &a_s)?;

        let shorts: Vec<Vec<u32>> = a_short
            .iter()
            .zip(&a_short_len)
            .map(|(&v, &l)| decode_short(enc, v, l))
            .collect();
        let t_short = TruncTrie::build(&shorts);

        let runs = collect_runs(text, enc);
        let minus = build_side(
            text,
            enc,
            isa,
            &runs,
            false,
            &|s| range_of_short_in(enc, &b_short, &a_short, s),
            win,
        )?;
        let plus = build_side(
            text,
            enc,
            isa,
            &runs,
            true,
            &|s| range_of_short_in(enc, &b_short, &a_short, s),
            win,
        )?;

        Ok(FullIndex {
            b_short,
            a_short,
            a_short_len,
            sync,
            w,
            win_flags,
            s_meta,
            s_trie,
            t_short,
            minus,
            plus,
        })
    }

    pub(crate) fn side(&self, plus: bool) -> &PeriodicSide {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// `(RangeBeg, RangeEnd)` of a short string, by binary search over the
    /// encoded block prefixes.
    pub(crate) fn range_of_short(&self, enc: &MetaEncoding, syms: &[u32]) -> (usize, usize) {
        range_of_short_in(enc, &self.b_short, &self.a_short, syms)
    }

    // ----- ISA -----

    pub fn query_isa(&self, text: &PackedText, enc: &MetaEncoding, j: usize) -> usize {
        let tau = text.tau();
        let n = text.n();
        let j0 = j - 1;
        if n - j0 < 3 * tau - 1 {
            // sentinel-terminated short suffix: alone in its block
            let syms: Vec<u32> = (j0..n).map(|i| text.sym(i)).collect();
            let (b, _) = self.range_of_short(enc, &syms);
            return b + 1;
        }
        if let Some(meta) = position_meta(text, enc, j0) {
            return self.periodic_isa(text, enc, j, &meta);
        }
        let x = self.sync.marks().rank1(j0);
        let s0 = self.sync.positions()[x] as usize;
        debug_assert!(s0 >= j0 && s0 < j0 + tau, "anchor within reach");
        let xlen = s0 + 2 * tau - j0;
        let syms: Vec<u32> = (j0..j0 + xlen).map(|i| text.sym(i)).collect();
        let (b_x, _) = self.range_of_short(enc, &syms);
        let y = self.sync.text_to_lex()[x] as usize + 1;
        let rev: Vec<u32> = syms.iter().rev().copied().collect();
        let delta = self.w.prefix_rank(&rev, y).expect("context query");
        b_x + delta
    }

    fn periodic_isa(&self, text: &PackedText, enc: &MetaEncoding, j: usize, meta: &PosMeta) -> usize {
        let j0 = j - 1;
        let win = 3 * text.tau() - 1;
        let syms: Vec<u32> = (j0..j0 + win).map(|i| text.sym(i)).collect();
        let (b_x, e_x) = self.range_of_short(enc, &syms);
        let int_x = enc.int(syms.iter().copied(), win);
        let v = (meta.rend_full - j0) as u64;
        if !meta.plus {
            let side = &self.minus;
            let kmin = side.min_exp[&int_x] as usize;
            let da =
                psel(&side.exp_marks, prank(&side.exp_marks, b_x) + (meta.exp - kmin) + 1) - b_x;
            let i_run = side.run_marks.rank1(j0 + 1);
            let x_lex = side.run_text_to_lex[i_run - 1] as usize + 1;
            let e_h = side.roots[&meta.root_key].block.1 as usize;
            let ds = side.rcount(v, e_h) - side.rcount(v, x_lex);
            b_x + da - ds
        } else {
            let side = &self.plus;
            let kmin = side.min_exp[&int_x] as usize;
            let d = prank(&side.exp_marks, e_x) - prank(&side.exp_marks, b_x);
            let kmax = kmin + d - 1;
            let start_g = psel(
                &side.exp_marks,
                prank(&side.exp_marks, b_x) + (kmax - meta.exp) + 1,
            );
            let da = e_x - start_g + 1;
            let i_run = side.run_marks.rank1(j0 + 1);
            let x_lex = side.run_text_to_lex[i_run - 1] as usize + 1;
            let b_h = side.roots[&meta.root_key].block.0 as usize;
            let ds = side.rcount(v, x_lex - 1) - side.rcount(v, b_h);
            // suffixes in the class at or after j in rank order
            let dge = da - ds;
            e_x - dge + 1
        }
    }

    // ----- SA -----

    pub fn query_sa(&self, text: &PackedText, enc: &MetaEncoding, i: usize) -> usize {
        let tau = text.tau();
        let n = text.n();
        let win = 3 * tau - 1;
        let y = prank(&self.b_short, i - 1);
        let len = self.a_short_len[y] as usize;
        if len < win {
            return n + 1 - len;
        }
        let syms = decode_short(enc, self.a_short[y], len as u8);
        let periodic = period_of(&syms).map(|p| 3 * p <= tau).unwrap_or(false);
        if !periodic {
            self.nonperiodic_sa(text, enc, i, &syms)
        } else {
            self.periodic_sa(enc, i, &syms)
        }
    }

    fn nonperiodic_sa(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        i: usize,
        window: &[u32],
    ) -> usize {
        let tau = text.tau();
        let l = self
            .dist_prefix_len(tau, text.bits(), window)
            .expect("nonperiodic block has an anchored prefix");
        let x = &window[..l];
        let (b_x, _) = self.range_of_short(enc, x);
        let rev: Vec<u32> = x.iter().rev().copied().collect();
        let y = self.w.prefix_select(&rev, i - b_x).expect("in-range rank");
        let s_lex = self.sync.lex_pos(y - 1);
        let delta_text = l - 2 * tau;
        s_lex - delta_text + 1
    }

    /// Shortest prefix length of `window` whose trailing anchor window is
    /// marked, in `[2*tau ..= window length]`.
    pub(crate) fn dist_prefix_len(&self, tau: usize, shift: u32, window: &[u32]) -> Option<usize> {
        (2 * tau..=window.len())
            .find(|&l| self.win_flags.get(2 * tau, shift, |t| window[l - 2 * tau + t]))
    }

    fn periodic_sa(&self, enc: &MetaEncoding, i: usize, window: &[u32]) -> usize {
        let (plus, pos, ell) = self.periodic_locate(enc, i, window);
        self.side(plus).run_full[pos - 1] as usize - ell + 1
    }

    /// For a rank `i` whose suffix is periodic: the break direction, the
    /// 1-based lex index of its run, and its distance to the last full
    /// repetition end.
    pub(crate) fn periodic_locate(
        &self,
        enc: &MetaEncoding,
        i: usize,
        window: &[u32],
    ) -> (bool, usize, usize) {
        let (b_x, e_x) = self.range_of_short(enc, window);
        let int_x = enc.int(window.iter().copied(), window.len());
        let p = period_of(window).unwrap();
        let (head, root_key) = window_rotation(window, p, enc);
        let mm = &self.minus.exp_marks;
        let is_minus = prank(mm, e_x) > prank(mm, i - 1);
        if is_minus {
            let side = &self.minus;
            let kmin = side.min_exp[&int_x] as usize;
            let k = kmin + (prank(mm, i - 1) - prank(mm, b_x));
            let da = psel(mm, prank(mm, i - 1) + 1) - b_x;
            let ds = b_x + da - i;
            let ell = head + k * p;
            let e_h = side.roots[&root_key].block.1 as usize;
            let delta = side.rcount(ell as u64, e_h);
            let kk = delta - ds;
            let pos = side.rselect(ell as u64, kk).expect("in-range rank");
            (false, pos, ell)
        } else {
            let side = &self.plus;
            let marks = &side.exp_marks;
            let kmin = side.min_exp[&int_x] as usize;
            let k = kmin + (prank(marks, e_x) - prank(marks, i));
            let start_g = psel(marks, prank(marks, i));
            let ds = i - start_g;
            let ell = head + k * p;
            let b_h = side.roots[&root_key].block.0 as usize;
            let kk = side.rcount(ell as u64, b_h) + ds + 1;
            let pos = side.rselect(ell as u64, kk).expect("in-range rank");
            (true, pos, ell)
        }
    }

    // ----- periodic helpers shared with pattern matching -----

    /// Minus-side count of class positions with repetition count at most
    /// `exp`, assuming the class is nonempty and `exp` within its range.
    pub(crate) fn delta_above_minus(&self, b_x: usize, int_x: u128, exp: usize) -> usize {
        let side = &self.minus;
        let kmin = side.min_exp[&int_x] as usize;
        psel(&side.exp_marks, prank(&side.exp_marks, b_x) + (exp - kmin) + 1) - b_x
    }

    pub(crate) fn delta_same_minus(&self, j0: usize, meta: &PosMeta) -> usize {
        let side = &self.minus;
        let v = (meta.rend_full - j0) as u64;
        let i_run = side.run_marks.rank1(j0 + 1);
        let x_lex = side.run_text_to_lex[i_run - 1] as usize + 1;
        let e_h = side.roots[&meta.root_key].block.1 as usize;
        side.rcount(v, e_h) - side.rcount(v, x_lex)
    }
}

/// Builds the block-prefix array and rank marks, from substring frequency
/// tables when they fit, and by one scan of the build-time suffix order
/// otherwise (window-length overrides can exceed any table budget).
fn build_short_blocks(
    text: &PackedText,
    enc: &MetaEncoding,
    sa: &[u32],
) -> Result<(Vec<u128>, Vec<u8>, RsBitvec), Error> {
    let n = text.n();
    let win = 3 * text.tau() - 1;
    let sigma = text.sigma() as usize;
    let mut sizes = Vec::with_capacity(win + 1);
    let mut total = 1usize;
    let mut fits = true;
    for l in 0..=win {
        sizes.push(total);
        if l < win {
            match total.checked_mul(sigma).filter(|&t| t <= 1 << 22) {
                Some(t) => total = t,
                None => {
                    fits = false;
                    break;
                }
            }
        }
    }
    if !fits {
        return Ok(short_blocks_from_order(text, enc, sa, win));
    }
    let mut freq: Vec<Vec<u32>> = sizes.iter().map(|&s| vec![0u32; s]).collect();
    {
        let top = &mut freq[win];
        let msd = if win <= 1 { 1 } else { sizes[win - 1] };
        let mut v: usize = 0;
        for j in 0..n {
            v = if j < win {
                v * sigma + text.sym(j) as usize
            } else {
                (v - text.sym(j - win) as usize * msd) * sigma + text.sym(j) as usize
            };
            if j + 1 >= win {
                top[v] += 1;
            }
        }
    }
    let mut suffix_val = vec![usize::MAX; win];
    for l in 1..win {
        let mut v = 0usize;
        for t in 0..l {
            v = v * sigma + text.sym(n - l + t) as usize;
        }
        suffix_val[l] = v;
    }
    for l in (1..win).rev() {
        let (shorter, longer) = freq.split_at_mut(l + 1);
        let cur = &mut shorter[l];
        let next = &longer[0];
        for v in 0..sizes[l] {
            let mut f = 0u32;
            for c in 0..sigma {
                f += next[v * sigma + c];
            }
            cur[v] = f;
        }
        cur[suffix_val[l]] += 1;
    }

    let mut a_short: Vec<u128> = Vec::new();
    let mut a_short_len: Vec<u8> = Vec::new();
    let mut acc = 0usize;
    let mut marks = BitBuf::zeros(n);
    let mut stack: Vec<(usize, usize)> = vec![(0usize, 0usize)];
    while let Some((l, v)) = stack.pop() {
        if l > 0 && l < win && suffix_val[l] == v {
            let syms = digits(v, l, sigma);
            a_short.push(enc.int(syms.iter().copied(), l));
            a_short_len.push(l as u8);
            acc += 1;
            marks.set(acc - 1);
            continue;
        }
        if l == win {
            let f = freq[win][v] as usize;
            debug_assert!(f > 0);
            let syms = digits(v, l, sigma);
            a_short.push(enc.int(syms.iter().copied(), l));
            a_short_len.push(l as u8);
            acc += f;
            marks.set(acc - 1);
            continue;
        }
        for c in (0..sigma).rev() {
            let nv = v * sigma + c;
            if freq[l + 1][nv] > 0 {
                stack.push((l + 1, nv));
            }
        }
    }
    debug_assert_eq!(acc, n);
    Ok((a_short, a_short_len, marks.finish()))
}

/// Block boundaries straight from the suffix order: a block ends where the
/// window-capped prefix changes.
fn short_blocks_from_order(
    text: &PackedText,
    enc: &MetaEncoding,
    sa: &[u32],
    win: usize,
) -> (Vec<u128>, Vec<u8>, RsBitvec) {
    let n = text.n();
    let mut a_short: Vec<u128> = Vec::new();
    let mut a_short_len: Vec<u8> = Vec::new();
    let mut marks = BitBuf::zeros(n);
    let mut i = 0usize;
    while i < n {
        let suf = sa[i] as usize;
        let len = win.min(n - suf);
        a_short.push(enc.int((0..len).map(|t| text.sym(suf + t)), len));
        a_short_len.push(len as u8);
        let mut j = i + 1;
        while j < n && text.lce(suf, sa[j] as usize) >= len && n - (sa[j] as usize) >= len {
            j += 1;
        }
        marks.set(j - 1);
        i = j;
    }
    (a_short, a_short_len, marks.finish())
}

fn digits(v: usize, len: usize, sigma: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    let mut x = v;
    for i in (0..len).rev() {
        out[i] = (x % sigma) as u32;
        x /= sigma;
    }
    out
}

pub(crate) fn range_of_short_in(
    enc: &MetaEncoding,
    b_short: &RsBitvec,
    a_short: &[u128],
    syms: &[u32],
) -> (usize, usize) {
    let lo_key = enc.int(syms.iter().copied(), syms.len());
    let hi_key = enc.int_upper(syms.iter().copied(), syms.len());
    let t1 = a_short.partition_point(|&k| k < lo_key);
    let t2 = a_short.partition_point(|&k| k < hi_key);
    let boundary = |t: usize| if t == 0 { 0 } else { psel(b_short, t) };
    (boundary(t1), boundary(t2))
}

pub(crate) fn build_window_flags(text: &PackedText, sync: &SyncSet) -> WindowFlags {
    let tau = text.tau();
    let n = text.n();
    let width = 2 * tau;
    let shift = text.bits();
    if width as u32 * shift <= 24 {
        let mut flags = vec![false; 1usize << (width as u32 * shift)];
        for k in 0..=n - width {
            if sync.marks().get(k) {
                let key = WindowFlags::key(shift, width, |t| text.sym(k + t));
                flags[key as usize] = true;
            }
        }
        WindowFlags::Flat { shift, flags }
    } else {
        let mut map = HashMap::new();
        for k in 0..=n - width {
            let key = WindowFlags::key(shift, width, |t| text.sym(k + t));
            let m = sync.marks().get(k);
            let e = map.entry(key).or_insert(m);
            debug_assert_eq!(*e, m, "anchor choice is content-consistent");
        }
        WindowFlags::Map(map)
    }
}

/// All maximal periodic runs of the text, in start order.
pub(crate) fn collect_runs(text: &PackedText, enc: &MetaEncoding) -> Vec<RunInfo> {
    let tau = text.tau();
    let n = text.n();
    let mut runs = Vec::new();
    if tau < 3 || n + 1 < 3 * tau {
        return runs;
    }
    let mut j = 0usize;
    let limit = n + 1 - (3 * tau - 1);
    while j < limit {
        if !is_periodic_at(text, j) {
            j += 1;
            continue;
        }
        let meta = position_meta(text, enc, j).unwrap();
        runs.push(RunInfo {
            start: j as u32,
            root_key: meta.root_key,
            period: meta.period as u32,
            head: meta.head as u32,
            rend: meta.rend as u32,
            rend_full: meta.rend_full as u32,
            plus: meta.plus,
        });
        j = meta.rend - (3 * tau - 1) + 2;
    }
    runs
}

/// LSD radix sort with square-root-range bucket width.
fn radix_sort_events(events: &mut Vec<(u64, i32)>) {
    if events.len() <= 1 {
        return;
    }
    let max_key = events.iter().map(|e| e.0).max().unwrap();
    let mut bucket_bits = 1u32;
    while bucket_bits < 32 && (1u128 << (2 * bucket_bits)) <= max_key as u128 {
        bucket_bits += 1;
    }
    let buckets = 1usize << bucket_bits;
    let mask = buckets as u64 - 1;
    let mut tmp: Vec<(u64, i32)> = vec![(0, 0); events.len()];
    let mut shift = 0u32;
    loop {
        let mut count = vec![0usize; buckets + 1];
        for &(k, _) in events.iter() {
            count[((k >> shift) & mask) as usize + 1] += 1;
        }
        for b in 0..buckets {
            count[b + 1] += count[b];
        }
        for &(k, v) in events.iter() {
            let b = ((k >> shift) & mask) as usize;
            tmp[count[b]] = (k, v);
            count[b] += 1;
        }
        std::mem::swap(events, &mut tmp);
        shift += bucket_bits;
        if shift >= 64 || (max_key >> shift) == 0 {
            break;
        }
    }
}

fn build_side(
    text: &PackedText,
    enc: &MetaEncoding,
    isa: &[u32],
    all_runs: &[RunInfo],
    plus: bool,
    lookup_range: &dyn Fn(&[u32]) -> (usize, usize),
    win: usize,
) -> Result<PeriodicSide, Error> {
    let n = text.n();
    let tau = text.tau();
    let runs: Vec<&RunInfo> = all_runs.iter().filter(|r| r.plus == plus).collect();
    let q = runs.len();

    let mut run_marks = BitBuf::zeros(n);
    for r in &runs {
        run_marks.set(r.start as usize);
    }
    let run_marks = run_marks.finish();

    let mut order: Vec<u32> = (0..q as u32).collect();
    order.sort_by_key(|&i| {
        let r = runs[i as usize];
        (r.root_key, isa[r.rend_full as usize])
    });
    let run_lex: Vec<u32> = order.iter().map(|&i| runs[i as usize].start).collect();
    let run_full: Vec<u32> = order.iter().map(|&i| runs[i as usize].rend_full).collect();
    let mut run_text_to_lex = vec![0u32; q];
    for (lex, &i) in order.iter().enumerate() {
        run_text_to_lex[i as usize] = lex as u32;
    }

    let lens_small: Vec<u64> = order
        .iter()
        .map(|&i| {
            let r = runs[i as usize];
            (r.rend_full - r.start) as u64
        })
        .collect();
    let lens = if q >= 2 {
        Some(BoundedSumRange::build(&lens_small)?)
    } else {
        None
    };

    let mut roots: HashMap<u128, RootInfo> = HashMap::new();
    let mut exp_buf = BitBuf::zeros(n);
    let mut min_exp: HashMap<u128, u64> = HashMap::new();
    let mut at = 0usize;
    while at < q {
        let r0 = runs[order[at] as usize];
        let p = r0.period as usize;
        let mut end = at + 1;
        while end < q && runs[order[end] as usize].root_key == r0.root_key {
            end += 1;
        }
        let rep = r0.start + r0.head;
        // per-prefix boundaries of the trailing suffixes within the block
        let mut pref_bounds = Vec::with_capacity(p + 1);
        for l in 0..=p {
            let hsyms: Vec<u32> = (0..l).map(|t| text.sym(rep as usize + t)).collect();
            let lo = at + run_full[at..end]
                .partition_point(|&rf| suffix_lt_pattern(text, rf as usize, &hsyms));
            let hi = at + run_full[at..end]
                .partition_point(|&rf| !suffix_gt_pattern_nonprefix(text, rf as usize, &hsyms));
            pref_bounds.push((lo as u32, hi as u32));
        }
        roots.insert(
            r0.root_key,
            RootInfo {
                period: r0.period,
                rep,
                block: (at as u32, end as u32),
                pref_bounds,
            },
        );

        // group marks by the event-sorted unary pipeline
        let mut kmax = 0usize;
        let mut s0_diff: Vec<i64> = Vec::new();
        let mut events: Vec<(u64, i32)> = Vec::new();
        for &oi in &order[at..end] {
            let r = runs[oi as usize];
            let vmax = (r.rend_full - r.start) as usize;
            let tail = (r.rend - r.rend_full) as usize;
            let vmin = win - tail;
            let k_in = vmin.div_ceil(p);
            let k_out = vmax / p + 1;
            kmax = kmax.max(vmax / p);
            if s0_diff.len() < k_out + 2 {
                s0_diff.resize(k_out + 2, 0);
            }
            s0_diff[k_in] += 1;
            s0_diff[k_out] -= 1;
            let (s_in, ki) = (vmin % p, vmin / p);
            if s_in != 0 {
                events.push((((s_in as u64) << 32) | ki as u64, 1));
            }
            let (s_out, ko) = ((vmax + 1) % p, (vmax + 1) / p);
            if s_out != 0 {
                events.push((((s_out as u64) << 32) | ko as u64, -1));
            }
        }
        radix_sort_events(&mut events);
        let mut counts = vec![0i64; kmax + 2];
        {
            let mut acc = 0i64;
            for (k, slot) in counts.iter_mut().enumerate() {
                acc += s0_diff.get(k).copied().unwrap_or(0);
                *slot = acc;
            }
        }
        let mut ev_at = 0usize;
        for s in 0..p {
            if s > 0 {
                while ev_at < events.len() && (events[ev_at].0 >> 32) as usize == s {
                    let k = (events[ev_at].0 & 0xFFFF_FFFF) as usize;
                    if k < counts.len() {
                        counts[k] += events[ev_at].1 as i64;
                    }
                    ev_at += 1;
                }
            }
            let block_len: i64 = counts.iter().sum();
            if block_len == 0 {
                continue;
            }
            // the short prefix realized by this head class
            let xsyms: Vec<u32> = (0..win)
                .map(|t| text.sym(rep as usize + ((p - s) + t) % p))
                .collect();
            let (b_x, e_x) = lookup_range(&xsyms);
            debug_assert!(e_x >= b_x + block_len as usize);
            let int_x = enc.int(xsyms.iter().copied(), win);
            let kmin = counts.iter().position(|&c| c > 0).unwrap();
            min_exp.insert(int_x, kmin as u64);
            // unary image, then the plus-form: drop the head bit and each
            // bit that follows a mark
            let mut unary: Vec<bool> = Vec::with_capacity(block_len as usize + counts.len());
            for &c in &counts {
                for _ in 0..c {
                    unary.push(false);
                }
                unary.push(true);
            }
            let mut bits: Vec<bool> = Vec::with_capacity(block_len as usize);
            for (i, &b) in unary.iter().enumerate() {
                if i == 0 || unary[i - 1] {
                    continue;
                }
                bits.push(b);
            }
            debug_assert_eq!(bits.len(), block_len as usize);
            debug_assert_eq!(
                bits.iter().filter(|&&b| b).count(),
                counts.iter().filter(|&&c| c > 0).count()
            );
            if plus {
                bits.reverse();
                let base = e_x - bits.len();
                for (t, &b) in bits.iter().enumerate() {
                    if b {
                        exp_buf.set(base + t);
                    }
                }
            } else {
                for (t, &b) in bits.iter().enumerate() {
                    if b {
                        exp_buf.set(b_x + t);
                    }
                }
            }
        }
        at = end;
    }
    let exp_marks = exp_buf.finish();

    let z_positions: Vec<u32> = (0..q)
        .map(|i| {
            let r = runs[order[i] as usize];
            let p = r.period as usize;
            let pow_len = p * tau.div_ceil(p);
            r.rend_full - pow_len as u32
        })
        .collect();
    for wpair in z_positions.windows(2) {
        debug_assert!(
            isa[wpair[0] as usize] < isa[wpair[1] as usize],
            "post-run anchors are suffix-sorted"
        );
    }
    let (z_meta, z_trie) = if q > 0 {
        (
            Some(MetaTrie::build(text, enc, &z_positions)?),
            Some(CompactTrie::build(text, &z_positions)?),
        )
    } else {
        (None, None)
    };

    Ok(PeriodicSide {
        plus,
        exp_marks,
        run_marks,
        run_lex,
        run_full,
        run_text_to_lex,
        lens,
        lens_small,
        min_exp,
        roots,
        z_positions,
        z_meta,
        z_trie,
    })
}

/// `T[suf..] < pattern` in lexicographic order (prefixes order first).
fn suffix_lt_pattern(text: &PackedText, suf: usize, pat: &[u32]) -> bool {
    let n = text.n();
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
}

/// `T[suf..] > pattern` without the pattern being one of its prefixes.
fn suffix_gt_pattern_nonprefix(text: &PackedText, suf: usize, pat: &[u32]) -> bool {
    let n = text.n();
    for (t, &pc) in pat.iter().enumerate() {
        if suf + t >= n {
            return false;
        }
        let sc = text.sym(suf + t);
        if sc != pc {
            return sc > pc;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_periodic_positions, naive_run_meta, naive_sa};
    use crate::text::BuildConfig;
    use rand::{Rng, SeedableRng};

    fn build_full(raw: &[u8], tau: u16) -> TextIndex {
        let cfg = BuildConfig {
            tau_override: Some(tau),
            force_full: true,
            ..BuildConfig::default()
        };
        TextIndex::build(PackedText::ingest(raw, &cfg).unwrap()).unwrap()
    }

    fn syms_of(idx: &TextIndex) -> Vec<u32> {
        (0..idx.text().n()).map(|i| idx.text().sym(i)).collect()
    }

    fn check_all(idx: &TextIndex) {
        let syms = syms_of(idx);
        let sa = naive_sa(&syms);
        for (i, &j) in sa.iter().enumerate() {
            assert_eq!(idx.query_sa(i + 1).unwrap(), j + 1, "sa[{}] text={syms:?}", i + 1);
            assert_eq!(idx.query_isa(j + 1).unwrap(), i + 1, "isa[{}]", j + 1);
        }
    }

    #[test]
    fn fig_text_full_and_fallback() {
        let expect = [18usize, 17, 12, 3, 15, 10, 1, 13, 8, 6, 4, 16, 11, 2, 14, 9, 7, 5];
        for tau in [1u16, 2] {
            let idx = build_full(b"abaababababaababa", tau);
            for (i, &v) in expect.iter().enumerate() {
                assert_eq!(idx.query_sa(i + 1).unwrap(), v);
            }
            assert_eq!(idx.query_isa(18).unwrap(), 1);
            assert_eq!(idx.query_isa(1).unwrap(), 7);
        }
        let plain = TextIndex::build(
            PackedText::ingest(b"abaababababaababa", &BuildConfig::default()).unwrap(),
        )
        .unwrap();
        assert!(plain.is_fallback());
        for (i, &v) in expect.iter().enumerate() {
            assert_eq!(plain.query_sa(i + 1).unwrap(), v);
        }
    }

    #[test]
    fn two_symbol_text() {
        let idx = build_full(b"a", 1);
        assert_eq!(idx.query_sa(1).unwrap(), 2);
        assert_eq!(idx.query_sa(2).unwrap(), 1);
    }

    #[test]
    fn random_texts_match_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for round in 0..40 {
            let sigma = [2u8, 2, 3, 4][round % 4];
            let len = rng.gen_range(30..400);
            let raw: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            for tau in [1u16, 2, 3] {
                if 3 * tau as usize > raw.len() {
                    continue;
                }
                check_all(&build_full(&raw, tau));
            }
        }
    }

    #[test]
    fn adversarial_periodic_texts() {
        let mut texts: Vec<Vec<u8>> = vec![
            vec![b'a'; 200],
            {
                let mut v = Vec::new();
                for _ in 0..100 {
                    v.extend(b"ab");
                }
                v
            },
            {
                let mut v = Vec::new();
                for _ in 0..40 {
                    v.extend(b"aab");
                }
                v
            },
            {
                // runs of both break directions
                let mut v = vec![b'b'];
                v.extend(vec![b'a'; 40]);
                v.push(b'b');
                v.extend(vec![b'a'; 25]);
                v.extend(b"bb");
                v.extend(vec![b'a'; 33]);
                v
            },
        ];
        // Fibonacci word
        let mut fib: Vec<u8> = b"a".to_vec();
        let mut prev = b"ab".to_vec();
        while prev.len() < 250 {
            let next = [prev.clone(), fib.clone()].concat();
            fib = prev;
            prev = next;
        }
        texts.push(prev);
        for raw in texts {
            for tau in [3u16, 4, 5, 6] {
                if 3 * tau as usize > raw.len() {
                    continue;
                }
                check_all(&build_full(&raw, tau));
            }
        }
    }

    #[test]
    fn periodic_rank_agrees_with_position() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut raw: Vec<u8> = vec![b'a'; 60];
        raw.extend((0..120).map(|_| b'a' + rng.gen_range(0..2u8)));
        raw.extend(vec![b'b'; 40]);
        let idx = build_full(&raw, 3);
        let n = idx.text().n();
        for i in 1..=n {
            let j = idx.query_sa(i).unwrap();
            assert_eq!(
                idx.is_periodic_rank(i).unwrap(),
                idx.is_periodic_pos(j).unwrap(),
                "rank {i} pos {j}"
            );
        }
        // boundary: no window beyond n - 3tau + 2 (1-based)
        let tau = idx.text().tau();
        assert!(!idx.is_periodic_pos(n - 3 * tau + 3).unwrap());
    }

    #[test]
    fn run_meta_matches_naive() {
        let mut raw: Vec<u8> = Vec::new();
        for _ in 0..16 {
            raw.extend(b"ab");
        }
        raw.extend(b"bb");
        raw.extend(vec![b'a'; 30]);
        for tau in [3u16, 6] {
            let idx = build_full(&raw, tau);
            let syms = syms_of(&idx);
            let in_r = naive_periodic_positions(&syms, tau as usize);
            for j0 in 0..syms.len() {
                let got = idx.run_meta(j0 + 1);
                match naive_run_meta(&syms, tau as usize, j0) {
                    Some(m) => {
                        let got = got.unwrap();
                        assert!(in_r[j0]);
                        assert_eq!(got.root, m.root, "root at {j0}");
                        assert_eq!(got.head, m.head);
                        assert_eq!(got.exp, m.exp);
                        assert_eq!(got.tail, m.tail);
                        assert_eq!(got.run_end, m.run_end + 1, "1-based end");
                        assert_eq!(got.run_end_full, m.run_end_full + 1);
                        assert_eq!(got.type_plus, m.type_plus);
                        // restatement: e(j) = j + p + lce(j, j+p), 1-based
                        let p = got.root.len();
                        assert_eq!(
                            got.run_end,
                            (j0 + 1) + p + idx.lce(j0 + 1, j0 + 1 + p).unwrap()
                        );
                    }
                    None => assert!(got.is_err()),
                }
            }
        }
    }

    #[test]
    fn delta_identities_brute_force() {
        // delta(j) = delta_above(j) - delta_same(j) counts class suffixes
        // at or below j, checked against direct enumeration
        let mut raw: Vec<u8> = vec![b'a'; 50];
        raw.push(b'b');
        raw.extend(vec![b'a'; 35]);
        raw.extend(b"ab");
        raw.extend(vec![b'a'; 20]);
        let idx = build_full(&raw, 3);
        let syms = syms_of(&idx);
        let tau = 3usize;
        let n = syms.len();
        let in_r = naive_periodic_positions(&syms, tau);
        for j0 in 0..n {
            if !in_r[j0] {
                continue;
            }
            let m = naive_run_meta(&syms, tau, j0).unwrap();
            if m.type_plus {
                assert!(idx.delta_above(j0 + 1).is_err());
                continue;
            }
            // brute force over the class: same window-class (root, head),
            // minus side
            let mut above = 0usize;
            let mut same = 0usize;
            for j1 in 0..n {
                if !in_r[j1] {
                    continue;
                }
                let m1 = naive_run_meta(&syms, tau, j1).unwrap();
                if m1.type_plus || m1.root != m.root || m1.head != m.head {
                    continue;
                }
                if m1.exp <= m.exp {
                    above += 1;
                }
                if m1.exp == m.exp && syms[j1..] > syms[j0..] {
                    same += 1;
                }
            }
            assert_eq!(idx.delta_above(j0 + 1).unwrap(), above, "above at {j0}");
            assert_eq!(idx.delta_same(j0 + 1).unwrap(), same, "same at {j0}");
        }
    }

    #[test]
    fn block_structure_lemmas() {
        // block constancy, gap, and end-position injectivity over runs
        let mut raw: Vec<u8> = Vec::new();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            raw.extend(vec![b'a'; rng.gen_range(10..30)]);
            raw.extend((0..rng.gen_range(3..10)).map(|_| b'a' + rng.gen_range(0..2u8)));
        }
        let tau = 3usize;
        let idx = build_full(&raw, tau as u16);
        let syms = syms_of(&idx);
        let n = syms.len();
        let in_r = naive_periodic_positions(&syms, tau);
        let mut run_starts = Vec::new();
        for j in 0..n {
            if in_r[j] && (j == 0 || !in_r[j - 1]) {
                run_starts.push(j);
            }
        }
        for &j in &run_starts {
            let m0 = naive_run_meta(&syms, tau, j).unwrap();
            let mut jj = j + 1;
            while jj < n && in_r[jj] {
                let m1 = naive_run_meta(&syms, tau, jj).unwrap();
                assert_eq!(m1.root, m0.root, "block constancy");
                assert_eq!(m1.run_end, m0.run_end);
                assert_eq!(m1.tail, m0.tail);
                assert_eq!(m1.run_end_full, m0.run_end_full);
                assert_eq!(m1.type_plus, m0.type_plus);
                jj += 1;
            }
        }
        for w in run_starts.windows(2) {
            assert!(w[1] - w[0] >= 2 * tau, "run starts at least 2 tau apart");
        }
        let mut fulls: Vec<usize> = run_starts
            .iter()
            .map(|&j| naive_run_meta(&syms, tau, j).unwrap().run_end_full)
            .collect();
        fulls.sort_unstable();
        fulls.dedup();
        assert_eq!(fulls.len(), run_starts.len(), "full ends are injective");
    }

    #[test]
    fn group_marks_reconstruct_counts() {
        // decoding the group marks of each class equals direct counting
        let mut raw: Vec<u8> = vec![b'a'; 64];
        raw.push(b'b');
        raw.extend(vec![b'a'; 43]);
        raw.extend(b"bab");
        raw.extend(vec![b'b'; 21]);
        let tau = 3usize;
        let idx = build_full(&raw, tau as u16);
        let syms = syms_of(&idx);
        let n = syms.len();
        let f = idx.full().unwrap();
        let in_r = naive_periodic_positions(&syms, tau);
        use std::collections::HashMap;
        // (window, plus) -> exp -> count
        let mut by_class: HashMap<(Vec<u32>, bool), HashMap<usize, usize>> = HashMap::new();
        for j in 0..n {
            if !in_r[j] {
                continue;
            }
            let m = naive_run_meta(&syms, tau, j).unwrap();
            let w = syms[j..j + 3 * tau - 1].to_vec();
            *by_class
                .entry((w, m.type_plus))
                .or_default()
                .entry(m.exp)
                .or_default() += 1;
        }
        for ((w, plus), counts) in by_class {
            let side = f.side(plus);
            let (b_x, e_x) = f.range_of_short(idx.encoding(), &w);
            let kmin = *counts.keys().min().unwrap();
            let kmax = *counts.keys().max().unwrap();
            let int_x = idx.encoding().int(w.iter().copied(), w.len());
            assert_eq!(side.min_exp[&int_x] as usize, kmin, "min count");
            // every value in [kmin..kmax] realized, mark count matches
            for k in kmin..=kmax {
                assert!(counts.contains_key(&k), "contiguous repetition range");
            }
            let marks = prank(&side.exp_marks, e_x) - prank(&side.exp_marks, b_x);
            assert_eq!(marks, counts.len(), "one mark per group");
            // group sizes decoded from the marks
            let p0 = prank(&side.exp_marks, b_x);
            let mut prev = if plus {
                psel(&side.exp_marks, p0 + 1) - 1
            } else {
                b_x
            };
            if plus {
                // groups run kmax..kmin left to right, delimited by starts
                let mut sizes = Vec::new();
                for g in 1..=marks {
                    let start = psel(&side.exp_marks, p0 + g);
                    let end = if g < marks {
                        psel(&side.exp_marks, p0 + g + 1) - 1
                    } else {
                        e_x
                    };
                    sizes.push(end - start + 1);
                }
                for (gi, k) in (kmin..=kmax).rev().enumerate() {
                    assert_eq!(sizes[gi], counts[&k], "plus group size for exp {k}");
                }
                let _ = prev;
            } else {
                for (gi, k) in (kmin..=kmax).enumerate() {
                    let end = psel(&side.exp_marks, p0 + gi + 1);
                    assert_eq!(end - prev, counts[&k], "minus group size for exp {k}");
                    prev = end;
                }
            }
        }
    }
}

impl TextIndex {
    /// Exhaustive check of the anchor set conditions (sampled mode only).
    pub fn verify_sync_conditions(&self) -> Option<crate::oracle::SyncReport> {
        self.full().map(|f| f.sync.verify(&self.text))
    }
}
