//! Suffix tree operations on rank-pair node handles. A node is the pair
//! `(lrank, rrank)` of its subtree's suffix interval; the root is `(0, n)`
//! and the null handle is `(0, 0)`.
//!
//! Every operation dispatches on the node's depth class: shallow nodes
//! resolve in the truncated trie, deep aperiodic nodes map into the anchor
//! trie and back, and deep periodic ones map into the post-run trie of
//! their break direction, with fully periodic handles resolved by direct
//! range computation. Weiner links run the same machinery on the reversed
//! text.

use crate::error::Error;
use crate::index::Index;
use crate::sa::{period_of, position_meta, prank, psel, FullIndex, Mode, PosMeta, TextIndex};
use crate::text::{MetaEncoding, PackedText};

/// Node handle: the pair of suffix-array ranks delimiting the subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRepr {
    pub b: usize,
    pub e: usize,
}

impl NodeRepr {
    pub const NULL: NodeRepr = NodeRepr { b: 0, e: 0 };

    pub fn new(b: usize, e: usize) -> NodeRepr {
        NodeRepr { b, e }
    }

    pub fn is_null(&self) -> bool {
        self.b == 0 && self.e == 0
    }
}

impl std::fmt::Display for NodeRepr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.b, self.e)
    }
}

impl Index {
    pub fn root(&self) -> NodeRepr {
        NodeRepr::new(0, self.n())
    }

    fn check(&self, v: NodeRepr) -> Result<(), Error> {
        if v.b < v.e && v.e <= self.n() {
            Ok(())
        } else {
            Err(Error::InvalidNode { b: v.b, e: v.e })
        }
    }

    /// `|str(v)|`.
    pub fn st_sdepth(&self, v: NodeRepr) -> Result<usize, Error> {
        self.check(v)?;
        Ok(self.fwd.st_sdepth(v))
    }

    pub fn st_isleaf(&self, v: NodeRepr) -> Result<bool, Error> {
        self.check(v)?;
        Ok(v.b + 1 == v.e)
    }

    /// Number of leaves below `v`.
    pub fn st_count(&self, v: NodeRepr) -> Result<usize, Error> {
        self.check(v)?;
        Ok(v.e - v.b)
    }

    /// Some occurrence of `str(v)` (1-based).
    pub fn st_index(&self, v: NodeRepr) -> Result<usize, Error> {
        self.check(v)?;
        self.fwd.query_sa(v.e)
    }

    /// `str(v)[i]` for `i in [1..=sdepth(v)]`, as a raw byte (`None` for
    /// the sentinel).
    pub fn st_letter(&self, v: NodeRepr, i: usize) -> Result<Option<u8>, Error> {
        self.check(v)?;
        let d = self.fwd.st_sdepth(v);
        if i < 1 || i > d {
            return Err(Error::DepthOutOfRange { d: i, max: d });
        }
        let j = self.fwd.query_sa(v.e)?;
        let s = self.fwd.text().sym(j - 1 + i - 1);
        Ok((s != 0).then(|| self.fwd.text().sym_to_byte(s)))
    }

    /// Leaf handle of the suffix starting at 1-based `j`.
    pub fn st_findleaf(&self, j: usize) -> Result<NodeRepr, Error> {
        let i = self.fwd.query_isa(j)?;
        Ok(NodeRepr::new(i - 1, i))
    }

    pub fn st_isancestor(&self, u: NodeRepr, v: NodeRepr) -> Result<bool, Error> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.b <= v.b && v.e <= u.e)
    }

    pub fn st_lca(&self, v1: NodeRepr, v2: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v1)?;
        self.check(v2)?;
        if v1.b <= v2.b && v2.e <= v1.e {
            return Ok(v1);
        }
        if v2.b <= v1.b && v1.e <= v2.e {
            return Ok(v2);
        }
        Ok(self.fwd.st_lca(v1, v2))
    }

    /// Child of `v` whose edge begins with byte `c`; null handle when
    /// absent.
    pub fn st_child(&self, v: NodeRepr, c: u8) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v.b + 1 == v.e {
            return Ok(NodeRepr::NULL);
        }
        let Some(sym) = self.fwd.text().byte_to_sym(c) else {
            return Ok(NodeRepr::NULL);
        };
        Ok(self.fwd.st_child(v, sym))
    }

    /// Child of `v` along the end-of-text branch.
    pub fn st_child_sentinel(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v.b + 1 == v.e {
            return Ok(NodeRepr::NULL);
        }
        Ok(self.fwd.st_child(v, 0))
    }

    /// `RangeBeg(str(v)c)` together with the child holding the largest edge
    /// symbol below `c`, when one exists.
    pub fn st_pred(&self, v: NodeRepr, c: u8) -> Result<(usize, NodeRepr), Error> {
        self.check(v)?;
        if v.b + 1 == v.e {
            return Err(Error::InvalidNode { b: v.b, e: v.e });
        }
        let sym = match self.fwd.text().byte_to_sym(c) {
            Some(s) => s,
            None => match self.fwd.text().sym_at_least(c) {
                Some(s) => s,
                None => {
                    // beyond the whole alphabet: everything precedes
                    return Ok((v.e, self.fwd.st_lastchild_of(v)));
                }
            },
        };
        let i = self.fwd.st_pred_rank(v, sym);
        if i == v.b {
            return Ok((i, NodeRepr::NULL));
        }
        let j = self.fwd.query_sa(i)?;
        let d = self.fwd.st_sdepth(v);
        let c2 = self.fwd.text().sym(j - 1 + d);
        Ok((i, self.fwd.st_child(v, c2)))
    }

    /// Shallowest ancestor with string depth at least `d`.
    pub fn st_wa(&self, v: NodeRepr, d: usize) -> Result<NodeRepr, Error> {
        self.check(v)?;
        let depth = self.fwd.st_sdepth(v);
        if d > depth {
            return Err(Error::DepthOutOfRange { d, max: depth });
        }
        Ok(self.fwd.st_wa(v, d))
    }

    pub fn st_parent(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v == self.root() {
            return Err(Error::IsRoot);
        }
        self.fwd.st_parent(v)
    }

    /// Node whose string drops the first symbol of `str(v)`.
    pub fn st_slink(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v == self.root() {
            return Err(Error::IsRoot);
        }
        self.st_slink_iter(v, 1)
    }

    /// Node whose string drops the first `i` symbols of `str(v)`.
    pub fn st_slink_iter(&self, v: NodeRepr, i: usize) -> Result<NodeRepr, Error> {
        self.check(v)?;
        let d = self.fwd.st_sdepth(v);
        if i > d {
            return Err(Error::DepthOutOfRange { d: i, max: d });
        }
        if i == 0 {
            return Ok(v);
        }
        if i == d {
            return Ok(self.root());
        }
        let j = self.fwd.query_sa(v.e)?;
        let ii = self.fwd.query_isa(j + i)?;
        Ok(self.fwd.st_wa(NodeRepr::new(ii - 1, ii), d - i))
    }

    /// Range handle of `c . str(v)` when that string occurs (possibly
    /// inside an edge); null handle otherwise.
    pub fn st_wlink_range(&self, v: NodeRepr, c: u8) -> Result<NodeRepr, Error> {
        self.check(v)?;
        let Some(sym) = self.fwd.text().byte_to_sym(c) else {
            return Ok(NodeRepr::NULL);
        };
        self.wlink_range_sym(v, sym)
    }

    /// Weiner link proper: the explicit node with `str = c . str(v)`.
    pub fn st_wlink(&self, v: NodeRepr, c: u8) -> Result<NodeRepr, Error> {
        let w = self.st_wlink_range(v, c)?;
        if w.is_null() {
            return Ok(NodeRepr::NULL);
        }
        let d = self.fwd.st_sdepth(v);
        if self.fwd.st_sdepth(w) == d + 1 {
            Ok(w)
        } else {
            Ok(NodeRepr::NULL)
        }
    }

    fn wlink_range_sym(&self, v: NodeRepr, sym: u32) -> Result<NodeRepr, Error> {
        let n = self.n();
        let ell = self.fwd.st_sdepth(v);
        let j = self.fwd.query_sa(v.e)?;
        if j + ell - 1 == n {
            // str(v) ends with the sentinel: it has a single occurrence
            if j >= 2 && self.fwd.text().sym(j - 2) == sym {
                let i = self.fwd.query_isa(j - 1)?;
                return Ok(self.fwd.st_wa(NodeRepr::new(i - 1, i), ell + 1));
            }
            return Ok(NodeRepr::NULL);
        }
        if sym == 0 {
            // the sentinel precedes nothing but the empty string
            if ell == 0 {
                let i = self.fwd.query_isa(n)?;
                return Ok(NodeRepr::new(i - 1, i));
            }
            return Ok(NodeRepr::NULL);
        }
        let j_rev = n - (j + ell - 1);
        let rev_sym = flip_sym(&self.fwd, &self.rev, sym);
        let Some(jc_rev) = occ_extend(&self.rev, ell, j_rev, rev_sym)? else {
            return Ok(NodeRepr::NULL);
        };
        let jp = n - jc_rev - ell;
        let i = self.fwd.query_isa(jp)?;
        Ok(self.fwd.st_wa(NodeRepr::new(i - 1, i), ell + 1))
    }

    pub fn st_firstchild(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v.b + 1 == v.e {
            return Ok(NodeRepr::NULL);
        }
        let d = self.fwd.st_sdepth(v);
        Ok(self.fwd.st_wa(NodeRepr::new(v.b, v.b + 1), d + 1))
    }

    pub fn st_lastchild(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v.b + 1 == v.e {
            return Ok(NodeRepr::NULL);
        }
        Ok(self.fwd.st_lastchild_of(v))
    }

    pub fn st_rightsibling(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v == self.root() {
            return Ok(NodeRepr::NULL);
        }
        let p = self.fwd.st_parent(v)?;
        if v.e == p.e {
            return Ok(NodeRepr::NULL);
        }
        let d = self.fwd.st_sdepth(p);
        Ok(self.fwd.st_wa(NodeRepr::new(v.e, v.e + 1), d + 1))
    }

    pub fn st_leftsibling(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        self.check(v)?;
        if v == self.root() {
            return Ok(NodeRepr::NULL);
        }
        let p = self.fwd.st_parent(v)?;
        if v.b == p.b {
            return Ok(NodeRepr::NULL);
        }
        let d = self.fwd.st_sdepth(p);
        Ok(self.fwd.st_wa(NodeRepr::new(v.b - 1, v.b), d + 1))
    }
}

/// Translates a symbol between the two directions' alphabets.
fn flip_sym(from: &TextIndex, to: &TextIndex, sym: u32) -> u32 {
    if sym == 0 {
        return 0;
    }
    let byte = from.text().sym_to_byte(sym);
    to.text().byte_to_sym(byte).expect("shared byte alphabet")
}

/// Whether the pattern of length `m` occurring at `j` extends by `sym`;
/// returns an occurrence of the extension.
fn occ_extend(idx: &TextIndex, m: usize, j: usize, sym: u32) -> Result<Option<usize>, Error> {
    let n = idx.text().n();
    if j + m == n + 1 {
        return Ok(None);
    }
    let i = idx.query_isa(j)?;
    let w = idx.st_wa(NodeRepr::new(i - 1, i), m);
    let j1 = idx.query_sa(w.b + 1)?;
    let j2 = idx.query_sa(w.e)?;
    let c1 = idx.text().sym(j1 - 1 + m);
    let c2 = idx.text().sym(j2 - 1 + m);
    if c1 == c2 {
        return Ok((sym == c1).then_some(j1));
    }
    let w2 = idx.st_child(w, sym);
    if w2.is_null() {
        return Ok(None);
    }
    Ok(Some(idx.query_sa(w2.e)?))
}

impl TextIndex {
    pub(crate) fn st_sdepth(&self, v: NodeRepr) -> usize {
        let j1 = self.query_sa(v.b + 1).expect("valid handle");
        if v.b + 1 == v.e {
            return self.text.n() - j1 + 1;
        }
        let j2 = self.query_sa(v.e).expect("valid handle");
        self.text.lce(j1 - 1, j2 - 1)
    }

    pub(crate) fn st_lastchild_of(&self, v: NodeRepr) -> NodeRepr {
        let d = self.st_sdepth(v);
        self.st_wa(NodeRepr::new(v.e - 1, v.e), d + 1)
    }

    pub(crate) fn st_parent(&self, v: NodeRepr) -> Result<NodeRepr, Error> {
        let n = self.text.n();
        let mut best: Option<NodeRepr> = None;
        if v.b > 0 {
            best = Some(self.st_lca(NodeRepr::new(v.b - 1, v.b), NodeRepr::new(v.b, v.b + 1)));
        }
        if v.e < n {
            let u = self.st_lca(NodeRepr::new(v.e - 1, v.e), NodeRepr::new(v.e, v.e + 1));
            best = match best {
                Some(cur) if self.st_sdepth(cur) >= self.st_sdepth(u) => Some(cur),
                _ => Some(u),
            };
        }
        best.ok_or(Error::IsRoot)
    }

    pub(crate) fn st_lca(&self, v1: NodeRepr, v2: NodeRepr) -> NodeRepr {
        if v1.b <= v2.b && v2.e <= v1.e {
            return v1;
        }
        if v2.b <= v1.b && v1.e <= v2.e {
            return v2;
        }
        match &self.mode {
            Mode::Fallback { sa, .. } => {
                let l = v1.b.min(v2.b);
                let r = v1.e.max(v2.e);
                let d = self.text.lce(sa[l] as usize, sa[r - 1] as usize);
                fallback_prefix_range(&self.text, sa, sa[l] as usize, d)
            }
            Mode::Full(f) => f.st_lca(&self.text, &self.enc, v1, v2),
        }
    }

    pub(crate) fn st_child(&self, v: NodeRepr, sym: u32) -> NodeRepr {
        match &self.mode {
            Mode::Fallback { sa, .. } => {
                let d = self.st_sdepth(v);
                let (lo, hi) = fallback_child_bounds(&self.text, sa, v, d, sym);
                if lo == hi {
                    NodeRepr::NULL
                } else {
                    NodeRepr::new(lo, hi)
                }
            }
            Mode::Full(f) => f.st_child(&self.text, &self.enc, v, sym),
        }
    }

    pub(crate) fn st_pred_rank(&self, v: NodeRepr, sym: u32) -> usize {
        match &self.mode {
            Mode::Fallback { sa, .. } => {
                let d = self.st_sdepth(v);
                fallback_child_bounds(&self.text, sa, v, d, sym).0
            }
            Mode::Full(f) => f.st_pred_rank(&self.text, &self.enc, v, sym),
        }
    }

    pub(crate) fn st_wa(&self, v: NodeRepr, d: usize) -> NodeRepr {
        if d == 0 {
            return NodeRepr::new(0, self.text.n());
        }
        match &self.mode {
            Mode::Fallback { sa, .. } => {
                let j = sa[v.b] as usize;
                fallback_prefix_range(&self.text, sa, j, d)
            }
            Mode::Full(f) => f.st_wa(&self.text, &self.enc, v, d),
        }
    }
}

/// Range of suffixes prefixed by `T[j0 .. j0+d)`, by binary search in the
/// stored order (fallback mode).
fn fallback_prefix_range(text: &PackedText, sa: &[u32], j0: usize, d: usize) -> NodeRepr {
    let n = text.n();
    let lt = |suf: usize| -> bool {
        let l = text.lce_bounded(suf, j0, d);
        if l >= d {
            return false;
        }
        if suf + l >= n {
            return true;
        }
        text.sym(suf + l) < text.sym(j0 + l)
    };
    let pre = |suf: usize| -> bool { text.lce_bounded(suf, j0, d) >= d };
    let b = sa.partition_point(|&s| lt(s as usize));
    let e = b + sa[b..].partition_point(|&s| pre(s as usize));
    NodeRepr::new(b, e)
}

/// `(RangeBeg, RangeEnd)` of `str(v) . sym` inside `v`'s interval
/// (fallback mode). The exact-length suffix, when present, sorts first.
fn fallback_child_bounds(
    text: &PackedText,
    sa: &[u32],
    v: NodeRepr,
    d: usize,
    sym: u32,
) -> (usize, usize) {
    let n = text.n();
    let key = |slot: usize| -> i64 {
        let suf = sa[slot] as usize;
        if suf + d >= n {
            -1
        } else {
            text.sym(suf + d) as i64
        }
    };
    let len = v.e - v.b;
    let mut lo = 0usize;
    let mut hi = len;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if key(v.b + mid) < sym as i64 {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let begin = v.b + lo;
    let mut hi2 = len;
    let mut lo2 = lo;
    while lo2 < hi2 {
        let mid = (lo2 + hi2) / 2;
        if key(v.b + mid) <= sym as i64 {
            lo2 = mid + 1;
        } else {
            hi2 = mid;
        }
    }
    (begin, v.b + lo2)
}

/// Depth class of a node.
enum NodeClass {
    Short(u32),
    Aperiodic(u32),
    Periodic(u32),
}

/// Boundary view of a deep periodic node: its class decomposition, the
/// length of its periodic prefix, whether the break happens inside the
/// node's string, and an occurrence for symbol probing.
struct RunView {
    meta: PosMeta,
    /// periodic prefix length of `str(v)`; equals `|str(v)|` when the
    /// string is fully periodic
    prefix_len: usize,
    breaks_inside: bool,
    /// 0-based occurrence of `str(v)`
    occ0: usize,
}

impl FullIndex {
    /// Deepest truncated-trie node whose string prefixes `str(v)`.
    fn map_short(&self, v: NodeRepr) -> u32 {
        let y1 = prank(&self.b_short, v.b);
        let y2 = prank(&self.b_short, v.e - 1);
        self.t_short.lca(self.t_short.leaf(y1), self.t_short.leaf(y2))
    }

    fn classify(&self, tau: usize, v: NodeRepr) -> NodeClass {
        let u = self.map_short(v);
        let s = self.t_short.str_of(u);
        if s.len() < 3 * tau - 1 {
            return NodeClass::Short(u);
        }
        if period_of(s).map(|p| 3 * p <= tau).unwrap_or(false) {
            NodeClass::Periodic(u)
        } else {
            NodeClass::Aperiodic(u)
        }
    }

    fn repr_of_short(&self, enc: &MetaEncoding, s: &[u32]) -> NodeRepr {
        let (b, e) = self.range_of_short(enc, s);
        NodeRepr::new(b, e)
    }

    /// Anchor-trie node for a deep aperiodic `v`, with its anchored prefix
    /// and that prefix's range start.
    fn map_anchor(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        v: NodeRepr,
        window: &[u32],
    ) -> (u32, Vec<u32>, usize) {
        let tau = text.tau();
        let l = self
            .dist_prefix_len(tau, text.bits(), window)
            .expect("deep aperiodic nodes anchor");
        let x = window[..l].to_vec();
        let (b_x, _) = self.range_of_short(enc, &x);
        let rev: Vec<u32> = x.iter().rev().copied().collect();
        let y1 = self.w.prefix_select(&rev, v.b + 1 - b_x).expect("rank in class");
        let y2 = self.w.prefix_select(&rev, v.e - b_x).expect("rank in class");
        let u = self
            .s_trie
            .lca(text, self.s_trie.leaf(y1 - 1), self.s_trie.leaf(y2 - 1));
        (u, x, b_x)
    }

    fn inv_anchor(&self, x: &[u32], b_x: usize, u: u32) -> NodeRepr {
        let (z1, z2) = self.s_trie.ranks(u);
        let rev: Vec<u32> = x.iter().rev().copied().collect();
        let d1 = self.w.prefix_rank(&rev, z1).expect("context rank");
        let d2 = self.w.prefix_rank(&rev, z2).expect("context rank");
        NodeRepr::new(b_x + d1, b_x + d2)
    }

    /// Boundary run view of a deep periodic node.
    fn run_view(&self, text: &PackedText, enc: &MetaEncoding, v: NodeRepr) -> RunView {
        let j1 = self.query_sa(text, enc, v.b + 1);
        let meta = position_meta(text, enc, j1 - 1).expect("periodic node occurrence");
        if v.b + 1 == v.e {
            // leaf: the string is the whole suffix
            let prefix_len = meta.rend - (j1 - 1);
            let str_len = text.n() - (j1 - 1);
            return RunView {
                breaks_inside: prefix_len < str_len,
                meta,
                prefix_len,
                occ0: j1 - 1,
            };
        }
        let j2 = self.query_sa(text, enc, v.e);
        let meta2 = position_meta(text, enc, j2 - 1).expect("periodic node occurrence");
        debug_assert_eq!(meta.root_key, meta2.root_key);
        debug_assert_eq!(meta.head, meta2.head);
        let l1 = meta.rend - (j1 - 1);
        let l2 = meta2.rend - (j2 - 1);
        let prefix_len = l1.min(l2);
        let breaks_inside = text.sym(j1 - 1 + prefix_len) == text.sym(j2 - 1 + prefix_len);
        RunView {
            meta,
            prefix_len,
            breaks_inside,
            occ0: j1 - 1,
        }
    }

    /// Post-run trie node of a deep periodic node with an inside break.
    fn map_z(&self, text: &PackedText, enc: &MetaEncoding, v: NodeRepr, window: &[u32], plus: bool) -> u32 {
        let side = self.side(plus);
        let trie = side.z_trie.as_ref().expect("runs exist on this side");
        let (pl1, y1, _) = self.periodic_locate(enc, v.b + 1, window);
        let (pl2, y2, _) = self.periodic_locate(enc, v.e, window);
        debug_assert!(pl1 == plus && pl2 == plus);
        trie.lca(text, trie.leaf(y1 - 1), trie.leaf(y2 - 1))
    }

    /// Rank pair matching a post-run trie node under the class `(head
    /// residue, root)` at trailing length `ell`.
    fn inv_z(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        plus: bool,
        meta: &PosMeta,
        ell: usize,
        u: u32,
    ) -> NodeRepr {
        let side = self.side(plus);
        let p = meta.period;
        let s = ell % p;
        let k = ell / p;
        let win = 3 * text.tau() - 1;
        let rep = meta.root_rep;
        let xsyms: Vec<u32> = (0..win).map(|t| text.sym(rep + ((p - s) + t) % p)).collect();
        let (b_x, e_x) = self.range_of_short(enc, &xsyms);
        let marks = &side.exp_marks;
        let d = prank(marks, e_x) - prank(marks, b_x);
        if d == 0 {
            return NodeRepr::NULL;
        }
        let int_x = enc.int(xsyms.iter().copied(), win);
        let kmin = side.min_exp[&int_x] as usize;
        let kmax = kmin + d - 1;
        if k < kmin || k > kmax {
            return NodeRepr::NULL;
        }
        let e_p = if !plus {
            let p0 = prank(marks, b_x);
            psel(marks, p0 + (k - kmin) + 1)
        } else {
            let r0 = prank(marks, b_x);
            let g = kmax - k + 1;
            if g < d {
                psel(marks, r0 + g + 1) - 1
            } else {
                e_x
            }
        };
        let trie = side.z_trie.as_ref().expect("runs exist");
        let (z1, z2) = trie.ranks(u);
        let root = &side.roots[&meta.root_key];
        let e_h = root.block.1 as usize;
        let c1 = side.rcount(ell as u64, e_h) - side.rcount(ell as u64, z1);
        let c2 = side.rcount(ell as u64, e_h) - side.rcount(ell as u64, z2);
        NodeRepr::new(e_p - c1, e_p - c2)
    }

    /// `(RangeBeg, RangeEnd)` of the fully periodic string of length `m`
    /// in the class of `meta` (the break sits at or past its end).
    fn periodic_full_range(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PosMeta,
        m: usize,
    ) -> NodeRepr {
        let p = meta.period;
        let s = meta.head;
        let win = 3 * text.tau() - 1;
        let t = (m - s) % p;
        let k = (m - s) / p;
        let pend_full0 = m - t;
        let rep = meta.root_rep;
        let xsyms: Vec<u32> = (0..win).map(|i| text.sym(rep + ((p - s) + i) % p)).collect();
        let (b_x, e_x) = self.range_of_short(enc, &xsyms);
        let int_x = enc.int(xsyms.iter().copied(), win);
        let mut occ = self.count_exp_gt(false, b_x, e_x, int_x, k)
            + self.count_exp_gt(true, b_x, e_x, int_x, k);
        let mut lo_minus = None;
        for plus in [false, true] {
            let side = self.side(plus);
            if let Some(root) = side.roots.get(&meta.root_key) {
                let (lo, hi) = root.pref_bounds[t];
                occ += side.rcount(pend_full0 as u64, hi as usize)
                    - side.rcount(pend_full0 as u64, lo as usize);
                if !plus {
                    lo_minus = Some((lo as usize, root.block.1 as usize));
                }
            }
        }
        // a string that is periodic to its very end always breaks downward
        let da = self.count_exp_le(false, b_x, e_x, int_x, k);
        let ds = match lo_minus {
            Some((lo, e_h)) => {
                self.side(false).rcount(pend_full0 as u64, e_h)
                    - self.side(false).rcount(pend_full0 as u64, lo)
            }
            None => 0,
        };
        let delta = da - ds;
        NodeRepr::new(b_x + delta, b_x + delta + occ)
    }

    /// `(RangeBeg, RangeEnd)` of the fully periodic string of length `m`
    /// extended by one symbol.
    fn periodic_extend_range(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        meta: &PosMeta,
        m: usize,
        sym: u32,
    ) -> NodeRepr {
        let p = meta.period;
        let s = meta.head;
        let rep = meta.root_rep;
        let t = (m - s) % p;
        let cont = text.sym(rep + t);
        if sym == cont {
            return self.periodic_full_range(text, enc, meta, m + 1);
        }
        let win = 3 * text.tau() - 1;
        let k = (m - s) / p;
        let pend_full0 = m - t;
        let xsyms: Vec<u32> = (0..win).map(|i| text.sym(rep + ((p - s) + i) % p)).collect();
        let (b_x, e_x) = self.range_of_short(enc, &xsyms);
        let int_x = enc.int(xsyms.iter().copied(), win);
        let plus = sym > cont;
        let side = self.side(plus);
        // pattern remainder: the broken tail
        let mut tailpat: Vec<u32> = (0..t).map(|i| text.sym(rep + i)).collect();
        tailpat.push(sym);
        let bounds = side
            .roots
            .get(&meta.root_key)
            .map(|root| side.pref_range(text, root, &tailpat));
        let occ = match bounds {
            Some((lo, hi)) => {
                side.rcount(pend_full0 as u64, hi) - side.rcount(pend_full0 as u64, lo)
            }
            None => 0,
        };
        let delta = if !plus {
            let da = self.count_exp_le(false, b_x, e_x, int_x, k);
            let ds = match bounds {
                Some((lo, _)) => {
                    let e_h = side.roots[&meta.root_key].block.1 as usize;
                    side.rcount(pend_full0 as u64, e_h) - side.rcount(pend_full0 as u64, lo)
                }
                None => 0,
            };
            da - ds
        } else {
            let da = self.count_exp_le(true, b_x, e_x, int_x, k);
            let ds = match bounds {
                Some((lo, _)) => {
                    let b_h = side.roots[&meta.root_key].block.0 as usize;
                    side.rcount(pend_full0 as u64, lo) - side.rcount(pend_full0 as u64, b_h)
                }
                None => 0,
            };
            (e_x - b_x) - (da - ds)
        };
        NodeRepr::new(b_x + delta, b_x + delta + occ)
    }

    // ----- the dispatched operations -----

    fn st_lca(&self, text: &PackedText, enc: &MetaEncoding, v1: NodeRepr, v2: NodeRepr) -> NodeRepr {
        let tau = text.tau();
        let u = self.t_short.lca(self.map_short(v1), self.map_short(v2));
        let s = self.t_short.str_of(u).to_vec();
        if s.len() < 3 * tau - 1 {
            return self.repr_of_short(enc, &s);
        }
        if !period_of(&s).map(|p| 3 * p <= tau).unwrap_or(false) {
            let (a1, x, b_x) = self.map_anchor(text, enc, v1, &s);
            let (a2, _, _) = self.map_anchor(text, enc, v2, &s);
            let uu = self.s_trie.lca(text, a1, a2);
            return self.inv_anchor(&x, b_x, uu);
        }
        // periodic join: bound the combined node by the outer suffixes
        let i_min = v1.b.min(v2.b) + 1;
        let i_max = v1.e.max(v2.e);
        let j_min = self.query_sa(text, enc, i_min);
        let j_max = self.query_sa(text, enc, i_max);
        let m1 = position_meta(text, enc, j_min - 1).expect("periodic boundary");
        let m2 = position_meta(text, enc, j_max - 1).expect("periodic boundary");
        let p = m1.period;
        let big_l = (m1.rend - (j_min - 1)).min(m2.rend - (j_max - 1));
        if text.sym(j_min - 1 + big_l) != text.sym(j_max - 1 + big_l) {
            return self.periodic_full_range(text, enc, &m1, big_l);
        }
        let plus = text.sym(j_min - 1 + big_l) > text.sym(j_min - 1 + big_l - p);
        let side = self.side(plus);
        let trie = side.z_trie.as_ref().expect("runs exist");
        let (_, ya, _) = self.periodic_locate(enc, v1.b + 1, &s);
        let (_, yb, _) = self.periodic_locate(enc, v1.e, &s);
        let (_, yc, _) = self.periodic_locate(enc, v2.b + 1, &s);
        let (_, yd, _) = self.periodic_locate(enc, v2.e, &s);
        let la = trie.lca(text, trie.leaf(ya - 1), trie.leaf(yb - 1));
        let lb = trie.lca(text, trie.leaf(yc - 1), trie.leaf(yd - 1));
        let uu = trie.lca(text, la, lb);
        let ell = m1.head + ((big_l - m1.head) / p) * p;
        self.inv_z(text, enc, plus, &m1, ell, uu)
    }

    fn st_child(&self, text: &PackedText, enc: &MetaEncoding, v: NodeRepr, sym: u32) -> NodeRepr {
        let tau = text.tau();
        match self.classify(tau, v) {
            NodeClass::Short(u) => {
                let Some(u2) = self.t_short.child(u, sym) else {
                    return NodeRepr::NULL;
                };
                self.repr_of_short(enc, self.t_short.str_of(u2))
            }
            NodeClass::Aperiodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let (a, x, b_x) = self.map_anchor(text, enc, v, &window);
                let Some(a2) = self.s_trie.child(text, a, sym) else {
                    return NodeRepr::NULL;
                };
                let w = self.inv_anchor(&x, b_x, a2);
                if w.b == w.e {
                    NodeRepr::NULL
                } else {
                    w
                }
            }
            NodeClass::Periodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let view = self.run_view(text, enc, v);
                if !view.breaks_inside {
                    let w = self.periodic_extend_range(text, enc, &view.meta, view.prefix_len, sym);
                    return if w.b == w.e { NodeRepr::NULL } else { w };
                }
                let p = view.meta.period;
                let plus = text.sym(view.occ0 + view.prefix_len)
                    > text.sym(view.occ0 + view.prefix_len - p);
                let side = self.side(plus);
                let Some(trie) = side.z_trie.as_ref() else {
                    return NodeRepr::NULL;
                };
                let u_z = self.map_z(text, enc, v, &window, plus);
                let Some(u2) = trie.child(text, u_z, sym) else {
                    return NodeRepr::NULL;
                };
                let ell = view.meta.head + ((view.prefix_len - view.meta.head) / p) * p;
                let w = self.inv_z(text, enc, plus, &view.meta, ell, u2);
                if w.b == w.e {
                    NodeRepr::NULL
                } else {
                    w
                }
            }
        }
    }

    fn st_pred_rank(&self, text: &PackedText, enc: &MetaEncoding, v: NodeRepr, sym: u32) -> usize {
        let tau = text.tau();
        match self.classify(tau, v) {
            NodeClass::Short(u) => {
                let mut s = self.t_short.str_of(u).to_vec();
                s.push(sym);
                self.range_of_short(enc, &s).0
            }
            NodeClass::Aperiodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let (a, x, b_x) = self.map_anchor(text, enc, v, &window);
                match self.s_trie.pred(text, a, sym) {
                    Some(a2) => self.inv_anchor(&x, b_x, a2).e,
                    None => v.b,
                }
            }
            NodeClass::Periodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let view = self.run_view(text, enc, v);
                if !view.breaks_inside {
                    return self
                        .periodic_extend_range(text, enc, &view.meta, view.prefix_len, sym)
                        .b;
                }
                let p = view.meta.period;
                let plus = text.sym(view.occ0 + view.prefix_len)
                    > text.sym(view.occ0 + view.prefix_len - p);
                let side = self.side(plus);
                if side.z_trie.is_none() {
                    return v.b;
                }
                let u_z = self.map_z(text, enc, v, &window, plus);
                let trie = side.z_trie.as_ref().unwrap();
                match trie.pred(text, u_z, sym) {
                    Some(u2) => {
                        let ell = view.meta.head + ((view.prefix_len - view.meta.head) / p) * p;
                        self.inv_z(text, enc, plus, &view.meta, ell, u2).e
                    }
                    None => v.b,
                }
            }
        }
    }

    fn st_wa(&self, text: &PackedText, enc: &MetaEncoding, v: NodeRepr, d: usize) -> NodeRepr {
        let tau = text.tau();
        let win = 3 * tau - 1;
        if d < win {
            let u2 = self.t_short.wa(self.map_short(v), d);
            return self.repr_of_short(enc, self.t_short.str_of(u2));
        }
        match self.classify(tau, v) {
            NodeClass::Short(_) => unreachable!("wa depth exceeds a shallow node"),
            NodeClass::Aperiodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let (a, x, b_x) = self.map_anchor(text, enc, v, &window);
                let delta_text = x.len() - 2 * tau;
                let a2 = self.s_trie.wa(a, d - delta_text);
                self.inv_anchor(&x, b_x, a2)
            }
            NodeClass::Periodic(u) => {
                let window = self.t_short.str_of(u).to_vec();
                let view = self.run_view(text, enc, v);
                let p = view.meta.period;
                if view.prefix_len + 1 > d {
                    // the sliced string stays fully periodic
                    return self.periodic_full_range(text, enc, &view.meta, d);
                }
                let plus = text.sym(view.occ0 + view.prefix_len)
                    > text.sym(view.occ0 + view.prefix_len - p);
                let side = self.side(plus);
                let trie = side.z_trie.as_ref().expect("runs exist");
                let u_z = self.map_z(text, enc, v, &window, plus);
                let ell = view.meta.head + ((view.prefix_len - view.meta.head) / p) * p;
                let pow_len = p * tau.div_ceil(p);
                let u2 = trie.wa(u_z, d - ell + pow_len);
                self.inv_z(text, enc, plus, &view.meta, ell, u2)
            }
        }
    }
}
