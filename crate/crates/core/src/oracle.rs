//! Brute-force reference implementations used to validate every structure.
//! These deliberately share no code with the index: suffix sorting is a
//! comparison sort over symbol slices, occurrence scans are sliding windows,
//! and the suffix tree is an explicit pointer structure.

use crate::error::Error;
use std::collections::BTreeMap;

pub const DEFAULT_CEILING: usize = 10_000;

/// Naive suffix array: sort positions by suffix comparison.
pub fn naive_sa(text: &[u32]) -> Vec<usize> {
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
    sa
}

/// Occurrence set of `pat` in `text` (0-based positions).
pub fn naive_occ(text: &[u32], pat: &[u32]) -> Vec<usize> {
    if pat.is_empty() || pat.len() > text.len() {
        return (0..text.len().saturating_sub(pat.len().saturating_sub(1)))
            .filter(|&j| text[j..].starts_with(pat))
            .collect();
    }
    (0..=text.len() - pat.len())
        .filter(|&j| text[j..j + pat.len()] == *pat)
        .collect()
}

/// `(RangeBeg, RangeEnd)` of `pat` by definition: the number of strictly
/// smaller suffixes and that plus the occurrence count.
pub fn naive_range(text: &[u32], pat: &[u32]) -> (usize, usize) {
    let b = (0..text.len()).filter(|&i| text[i..] < *pat).count();
    (b, b + naive_occ(text, pat).len())
}

/// Prefix rank: entries of `w[..j]` having `x` as a prefix.
pub fn naive_prefix_rank(w: &[Vec<u32>], x: &[u32], j: usize) -> usize {
    w[..j].iter().filter(|e| e.starts_with(x)).count()
}

/// Prefix selection: 1-based index of the `r`-th entry having `x` as a prefix.
pub fn naive_prefix_select(w: &[Vec<u32>], x: &[u32], r: usize) -> Option<usize> {
    w.iter()
        .enumerate()
        .filter(|(_, e)| e.starts_with(x))
        .nth(r - 1)
        .map(|(i, _)| i + 1)
}

/// Range counting: entries of `a[..j]` at least `v`.
pub fn naive_rcount(a: &[u64], v: u64, j: usize) -> usize {
    a[..j].iter().filter(|&&x| x >= v).count()
}

/// Range selection: 1-based position of the `r`-th entry at least `v`.
pub fn naive_rselect(a: &[u64], v: u64, r: usize) -> Option<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, &x)| x >= v)
        .nth(r - 1)
        .map(|(i, _)| i + 1)
}

/// Shortest period of `s` by definition.
pub fn naive_period(s: &[u32]) -> usize {
    for p in 1..=s.len() {
        if (0..s.len() - p).all(|i| s[i] == s[i + p]) {
            return p;
        }
    }
    s.len()
}

/// Run decomposition view of a periodic position, computed directly from the
/// definitions: the window period, the maximal periodic extension, the
/// lexicographically minimal rotation and the head/exponent/tail split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveRunMeta {
    pub root: Vec<u32>,
    pub head: usize,
    pub exp: usize,
    pub tail: usize,
    /// One past the end of the periodic run (0-based, exclusive).
    pub run_end: usize,
    /// `run_end` minus the tail.
    pub run_end_full: usize,
    pub type_plus: bool,
}

/// Positions of `R(tau, text)`: windows of length `3tau-1` with period at
/// most `tau/3` (0-based).
pub fn naive_periodic_positions(text: &[u32], tau: usize) -> Vec<bool> {
    let n = text.len();
    let mut r = vec![false; n];
    let win = 3 * tau - 1;
    if n >= win {
        for j in 0..=n - win {
            r[j] = naive_period(&text[j..j + win]) * 3 <= tau;
        }
    }
    r
}

pub fn naive_run_meta(text: &[u32], tau: usize, j: usize) -> Option<NaiveRunMeta> {
    let in_r = naive_periodic_positions(text, tau);
    if !in_r.get(j).copied().unwrap_or(false) {
        return None;
    }
    let n = text.len();
    let p = naive_period(&text[j..j + 3 * tau - 1]);
    // run_end = min{j' >= j : j' not in R} + 3tau - 2 (0-based exclusive form)
    let mut jp = j;
    while jp < n && in_r.get(jp).copied().unwrap_or(false) {
        jp += 1;
    }
    let run_end = jp + 3 * tau - 2;
    let rot = (0..p)
        .map(|t| text[j + t..j + t + p].to_vec())
        .min()
        .unwrap();
    let head = (0..p).find(|&t| text[j + t..j + t + p] == rot[..]).unwrap();
    let exp = (run_end - j - head) / p;
    let tail = (run_end - j - head) % p;
    let type_plus = run_end < n && text[run_end] > text[run_end - p];
    Some(NaiveRunMeta {
        root: rot,
        head,
        exp,
        tail,
        run_end,
        run_end_full: run_end - tail,
        type_plus,
    })
}

/// Explicit suffix tree with parent pointers, children maps and
/// precomputed leaf ranks; every operation is executed by definition.
pub struct NaiveSuffixTree {
    pub text: Vec<u32>,
    nodes: Vec<Node>,
    /// node of each leaf rank (1-based rank r -> node of the r-th smallest suffix)
    leaf_of_rank: Vec<usize>,
    repr_to_node: BTreeMap<(usize, usize), usize>,
}

struct Node {
    parent: usize,
    /// (lrank, rrank)
    repr: (usize, usize),
    sdepth: usize,
    /// representative occurrence: start of some suffix with str(v) as prefix
    occ: usize,
    children: BTreeMap<u32, usize>,
}

impl NaiveSuffixTree {
    pub fn new(text: &[u32]) -> Result<NaiveSuffixTree, Error> {
        if text.len() > DEFAULT_CEILING {
            return Err(Error::TooLargeForOracle {
                n: text.len(),
                ceiling: DEFAULT_CEILING,
            });
        }
        let n = text.len();
        let sa = naive_sa(text);
        let lcp_of = |a: usize, b: usize| {
            let mut l = 0;
            while a + l < n && b + l < n && text[a + l] == text[b + l] {
                l += 1;
            }
            l
        };
        // Build with a stack over the sorted suffixes.
        let mut nodes = vec![Node {
            parent: usize::MAX,
            repr: (0, n),
            sdepth: 0,
            occ: sa[0],
            children: BTreeMap::new(),
        }];
        let mut stack: Vec<usize> = vec![0];
        let mut leaf_of_rank = vec![usize::MAX; n + 1];
        for (rank, &suf) in sa.iter().enumerate() {
            let mut split = 0usize;
            if rank > 0 {
                split = lcp_of(sa[rank - 1], suf);
            }
            // Pop nodes deeper than the split depth.
            let mut last_popped = usize::MAX;
            while nodes[*stack.last().unwrap()].sdepth > split {
                last_popped = stack.pop().unwrap();
            }
            let top = *stack.last().unwrap();
            let attach = if nodes[top].sdepth == split {
                top
            } else {
                // Split the edge: new internal node at depth `split`.
                let inner = nodes.len();
                let lp = last_popped;
                let parent_of_lp = nodes[lp].parent;
                nodes.push(Node {
                    parent: parent_of_lp,
                    repr: (nodes[lp].repr.0, 0),
                    sdepth: split,
                    occ: nodes[lp].occ,
                    children: BTreeMap::new(),
                });
                let first_sym = text[nodes[lp].occ + split];
                let old_sym = text[nodes[lp].occ + nodes[parent_of_lp].sdepth];
                nodes[parent_of_lp].children.insert(old_sym, inner);
                nodes[lp].parent = inner;
                nodes[inner].children.insert(first_sym, lp);
                stack.push(inner);
                inner
            };
            // Add the new leaf; suffixes are prefix-free, so it always
            // branches below the attach point.
            let leaf = nodes.len();
            let ld = n - suf;
            nodes.push(Node {
                parent: attach,
                repr: (rank, rank + 1),
                sdepth: ld,
                occ: suf,
                children: BTreeMap::new(),
            });
            let sym = text[suf + split];
            nodes[attach].children.insert(sym, leaf);
            stack.push(leaf);
            leaf_of_rank[rank + 1] = leaf;
        }
        // Fill repr by a post-order pass: rrank = max over leaves below.
        fn fill(nodes: &mut Vec<Node>, v: usize) -> (usize, usize) {
            if nodes[v].children.is_empty() {
                return nodes[v].repr;
            }
            let kids: Vec<usize> = nodes[v].children.values().copied().collect();
            let mut lo = usize::MAX;
            let mut hi = 0;
            for c in kids {
                let (a, b) = fill(nodes, c);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            nodes[v].repr = (lo, hi);
            (lo, hi)
        }
        fill(&mut nodes, 0);
        let mut repr_to_node = BTreeMap::new();
        for (i, nd) in nodes.iter().enumerate() {
            repr_to_node.insert(nd.repr, i);
        }
        Ok(NaiveSuffixTree {
            text: text.to_vec(),
            nodes,
            leaf_of_rank,
            repr_to_node,
        })
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn all_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.nodes.len()
    }

    pub fn repr(&self, v: usize) -> (usize, usize) {
        self.nodes[v].repr
    }

    pub fn node_of_repr(&self, repr: (usize, usize)) -> Option<usize> {
        self.repr_to_node.get(&repr).copied()
    }

    pub fn sdepth(&self, v: usize) -> usize {
        self.nodes[v].sdepth
    }

    pub fn str_of(&self, v: usize) -> Vec<u32> {
        let nd = &self.nodes[v];
        self.text[nd.occ..nd.occ + nd.sdepth].to_vec()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.nodes[v].parent)
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].children.is_empty()
    }

    pub fn count(&self, v: usize) -> usize {
        self.nodes[v].repr.1 - self.nodes[v].repr.0
    }

    pub fn index(&self, v: usize) -> usize {
        self.nodes[v].occ
    }

    pub fn letter(&self, v: usize, i: usize) -> u32 {
        self.text[self.nodes[v].occ + i - 1]
    }

    pub fn findleaf(&self, j: usize) -> usize {
        *self
            .leaf_of_rank
            .iter()
            .skip(1)
            .find(|&&l| l != usize::MAX && self.nodes[l].occ == j)
            .unwrap()
    }

    pub fn child(&self, v: usize, c: u32) -> Option<usize> {
        self.nodes[v].children.get(&c).copied()
    }

    pub fn pred(&self, v: usize, c: u32) -> Option<usize> {
        self.nodes[v]
            .children
            .range(..c)
            .next_back()
            .map(|(_, &u)| u)
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.nodes[v].children.values().copied().collect()
    }

    pub fn firstchild(&self, v: usize) -> Option<usize> {
        self.nodes[v].children.values().next().copied()
    }

    pub fn lastchild(&self, v: usize) -> Option<usize> {
        self.nodes[v].children.values().next_back().copied()
    }

    pub fn rightsibling(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        let kids = self.children(p);
        let at = kids.iter().position(|&k| k == v).unwrap();
        kids.get(at + 1).copied()
    }

    pub fn leftsibling(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        let kids = self.children(p);
        let at = kids.iter().position(|&k| k == v).unwrap();
        at.checked_sub(1).map(|i| kids[i])
    }

    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let mut w = v;
        loop {
            if w == u {
                return true;
            }
            match self.parent(w) {
                Some(p) => w = p,
                None => return false,
            }
        }
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let mut au = vec![u];
        let mut w = u;
        while let Some(p) = self.parent(w) {
            au.push(p);
            w = p;
        }
        let mut w = v;
        loop {
            if au.contains(&w) {
                return w;
            }
            w = self.parent(w).unwrap();
        }
    }

    /// Shallowest ancestor with string depth at least `d`.
    pub fn wa(&self, v: usize, d: usize) -> usize {
        let mut best = v;
        let mut w = v;
        while let Some(p) = self.parent(w) {
            if self.nodes[p].sdepth >= d {
                best = p;
            }
            w = p;
        }
        best
    }

    /// Node whose string equals `s`, if explicit.
    pub fn node_of_str(&self, s: &[u32]) -> Option<usize> {
        let mut v = 0usize;
        let mut matched = 0usize;
        while matched < s.len() {
            let c = s[matched];
            let u = self.child(v, c)?;
            let take = (self.nodes[u].sdepth - matched).min(s.len() - matched);
            let occ = self.nodes[u].occ;
            if self.text[occ + matched..occ + matched + take] != s[matched..matched + take] {
                return None;
            }
            matched += take;
            v = u;
        }
        (self.nodes[v].sdepth == s.len()).then_some(v)
    }

    pub fn slink(&self, v: usize) -> Option<usize> {
        if v == 0 {
            return None;
        }
        let s = self.str_of(v);
        self.node_of_str(&s[1..])
    }

    pub fn slink_k(&self, v: usize, i: usize) -> Option<usize> {
        let s = self.str_of(v);
        if i > s.len() {
            return None;
        }
        self.node_of_str(&s[i..])
    }

    pub fn wlink(&self, v: usize, c: u32) -> Option<usize> {
        let mut s = vec![c];
        s.extend(self.str_of(v));
        self.node_of_str(&s)
    }

    /// Range form of the Weiner link: the suffix array interval of
    /// `c . str(v)`, or None when it has no occurrence.
    pub fn wlink_range(&self, v: usize, c: u32) -> Option<(usize, usize)> {
        let mut s = vec![c];
        s.extend(self.str_of(v));
        let (b, e) = naive_range(&self.text, &s);
        (e > b).then_some((b, e))
    }
}

/// Consistency/density report for a candidate synchronizing set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyncReport {
    Pass,
    ConsistencyViolation { i: usize, j: usize },
    DensityViolation { i: usize },
}

/// Checks both defining conditions of a synchronizing set by exhaustive
/// window comparison (0-based positions).
pub fn verify_sync(text: &[u32], tau: usize, set: &[usize]) -> SyncReport {
    let n = text.len();
    let in_set: std::collections::HashSet<usize> = set.iter().copied().collect();
    if n + 1 >= 2 * tau {
        let limit = n + 1 - 2 * tau; // i in [0..=limit-1] 0-based has window
        let mut by_window: std::collections::HashMap<&[u32], (usize, bool)> =
            std::collections::HashMap::new();
        for i in 0..limit {
            let w = &text[i..i + 2 * tau];
            let m = in_set.contains(&i);
            match by_window.get(&w) {
                Some(&(j, mj)) => {
                    if mj != m {
                        return SyncReport::ConsistencyViolation { i, j };
                    }
                }
                None => {
                    by_window.insert(w, (i, m));
                }
            }
        }
    }
    if n + 2 >= 3 * tau {
        let limit = n + 2 - 3 * tau;
        for i in 0..limit {
            let highly_periodic = naive_period(&text[i..i + 3 * tau - 1]) * 3 <= tau;
            let empty = (i..i + tau).all(|x| !in_set.contains(&x));
            if empty != highly_periodic {
                return SyncReport::DensityViolation { i };
            }
        }
    }
    SyncReport::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_text() -> Vec<u32> {
        let mut t: Vec<u32> = b"abaababababaababa".iter().map(|&c| (c - b'a' + 1) as u32).collect();
        t.push(0);
        t
    }

    #[test]
    fn fig_sa() {
        let expect: Vec<usize> = [18, 17, 12, 3, 15, 10, 1, 13, 8, 6, 4, 16, 11, 2, 14, 9, 7, 5]
            .iter()
            .map(|&x| x - 1)
            .collect();
        assert_eq!(naive_sa(&fig_text()), expect);
    }

    #[test]
    fn fig_range_and_occ() {
        let t = fig_text();
        let aba = [1u32, 2, 1];
        assert_eq!(naive_range(&t, &aba), (4, 11));
        let occ = naive_occ(&t, &aba);
        let expect: Vec<usize> = [1usize, 4, 6, 8, 10, 13, 15].iter().map(|&x| x - 1).collect();
        assert_eq!(occ, expect);
    }

    #[test]
    fn rcount_example() {
        let a = [3u64, 0, 5, 1];
        assert_eq!(naive_rcount(&a, 2, 4), 2);
        assert_eq!(naive_rselect(&a, 2, 2), Some(3));
        assert_eq!(naive_rselect(&a, 1, 3), Some(4));
    }

    #[test]
    fn oracles_mutually_consistent() {
        let t = fig_text();
        for pat in [[1u32, 2, 1].as_slice(), &[2, 2], &[1], &[2, 1, 2]] {
            let (b, e) = naive_range(&t, pat);
            let sa = naive_sa(&t);
            let mut from_sa: Vec<usize> = sa[b..e].to_vec();
            from_sa.sort_unstable();
            assert_eq!(from_sa, naive_occ(&t, pat));
        }
    }

    #[test]
    fn suffix_tree_basics() {
        let t = fig_text();
        let st = NaiveSuffixTree::new(&t).unwrap();
        let root = st.root();
        assert_eq!(st.repr(root), (0, 18));
        // node "aba" has repr (4, 11)
        let aba = st.node_of_str(&[1, 2, 1]).unwrap();
        assert_eq!(st.repr(aba), (4, 11));
        assert_eq!(st.sdepth(aba), 3);
        assert_eq!(st.count(aba), 7);
        // child(root, 'a') = node "a" = rows 2..11
        let a = st.child(root, 1).unwrap();
        assert_eq!(st.repr(a), (1, 11));
        // lca of leaves for suffixes 15 and 4 (1-based) is "aba"
        let sa = naive_sa(&t);
        let r15 = sa.iter().position(|&x| x == 14).unwrap();
        let r4 = sa.iter().position(|&x| x == 3).unwrap();
        let l1 = st.findleaf(sa[r15]);
        let l2 = st.findleaf(sa[r4]);
        assert_eq!(st.repr(st.lca(l1, l2)), (4, 11));
        // wlink("ba", 'a') = "aba"
        let ba = st.node_of_str(&[2, 1]).unwrap();
        assert_eq!(st.repr(ba), (11, 18));
        assert_eq!(st.wlink(ba, 1), Some(aba));
        // slink("aba") = "ba"
        assert_eq!(st.slink(aba), Some(ba));
    }

    #[test]
    fn verify_sync_detects_violations() {
        let t = fig_text();
        // tau = 1: R is empty, so an empty set violates density everywhere.
        assert!(matches!(
            verify_sync(&t, 1, &[]),
            SyncReport::DensityViolation { .. }
        ));
        let all: Vec<usize> = (0..t.len() - 1).collect();
        assert_eq!(verify_sync(&t, 1, &all), SyncReport::Pass);
        // long unary run with tau = 3: positions inside the run must be absent
        let mut run: Vec<u32> = vec![1; 40];
        run.push(0);
        let every: Vec<usize> = (0..run.len() - 5).collect();
        assert!(matches!(
            verify_sync(&run, 3, &every),
            SyncReport::DensityViolation { .. }
        ));
    }

    #[test]
    fn run_meta_by_definition() {
        // (ab)^16 $ with tau = 6 (so period 2 windows qualify): j=0 has root
        // "ab", head 0, and the run extends to the sentinel.
        let mut t: Vec<u32> = Vec::new();
        for _ in 0..16 {
            t.extend([1u32, 2]);
        }
        t.push(0);
        let m = naive_run_meta(&t, 6, 0).unwrap();
        assert_eq!(m.root, vec![1, 2]);
        assert_eq!(m.head, 0);
        assert_eq!(m.run_end, 32);
        assert!(!m.type_plus, "sentinel ends the run");
        assert_eq!(m.run_end, 0 + 2 + {
            // e(j) = j + p + lce(j, j+p)
            let mut l = 0;
            while 2 + l < t.len() && t[l] == t[2 + l] {
                l += 1;
            }
            l
        });
        // tau = 3 demands period at most 1: an alternating text has no
        // periodic position at that window length.
        assert!(naive_run_meta(&t, 3, 0).is_none());
        // unary run with tau = 3
        let mut u = vec![1u32; 20];
        u.push(0);
        let m = naive_run_meta(&u, 3, 4).unwrap();
        assert_eq!(m.root, vec![1]);
        assert_eq!(m.exp, 16);
        assert_eq!(m.run_end, 20);
        assert_eq!(m.run_end_full, 20);
    }
}
