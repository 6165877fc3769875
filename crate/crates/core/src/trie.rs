//! Compact tries over suffix subsets: the plain-alphabet trie with leaf
//! access, LCA, weighted ancestor and ordered-child queries; the metasymbol
//! trie answering packed-pattern prefix-range queries; and the truncated
//! trie over the short-prefix blocks.
//!
//! Edge labels are never materialized: every label access reads the packed
//! text through a representative suffix position.

use crate::error::Error;
use crate::text::{MetaEncoding, PackedText};

/// Compact trie of the suffixes starting at a sorted position array. Node
/// handles are indices; the root is node 0.
#[derive(Debug)]
pub struct CompactTrie {
    /// Suffix start positions in lexicographic order (0-based).
    pos: Vec<u32>,
    parent: Vec<u32>,
    sdepth: Vec<u32>,
    lrank: Vec<u32>,
    rrank: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    /// node id of each leaf, in left-to-right order
    leaf_node: Vec<u32>,
    /// heavy-path decomposition: head node of each node's chain
    hp_head: Vec<u32>,
    /// position of each node inside the concatenated chain array
    chain_pos: Vec<u32>,
    chain_nodes: Vec<u32>,
}

/// Transient node record used by the stack construction.
struct BuildNode {
    parent: u32,
    sdepth: u32,
    lrank: u32,
    first_child: u32,
    last_child: u32,
    next_sibling: u32,
    prev_sibling: u32,
}

const NIL: u32 = u32::MAX;

impl CompactTrie {
    /// Builds the trie by inserting the suffixes in the given order,
    /// maintaining the rightmost path on a stack.
    pub fn build(text: &PackedText, positions: &[u32]) -> Result<CompactTrie, Error> {
        let q = positions.len();
        assert!(q >= 1, "trie needs at least one string");
        let mut nodes: Vec<BuildNode> = Vec::with_capacity(2 * q);
        nodes.push(BuildNode {
            parent: NIL,
            sdepth: 0,
            lrank: 0,
            first_child: NIL,
            last_child: NIL,
            next_sibling: NIL,
            prev_sibling: NIL,
        });
        let mut stack: Vec<u32> = vec![0];
        let mut leaf_node = vec![0u32; q];

        let attach = |nodes: &mut Vec<BuildNode>, parent: u32, child: u32| {
            let prev = nodes[parent as usize].last_child;
            nodes[child as usize].prev_sibling = prev;
            nodes[child as usize].next_sibling = NIL;
            nodes[child as usize].parent = parent;
            if prev == NIL {
                nodes[parent as usize].first_child = child;
            } else {
                nodes[prev as usize].next_sibling = child;
            }
            nodes[parent as usize].last_child = child;
        };

        for (rank, &suf) in positions.iter().enumerate() {
            let mut split = 0u32;
            if rank > 0 {
                let prev = positions[rank - 1] as usize;
                let l = text.lce(prev, suf as usize);
                // sorted and prefix-free input required
                let prev_len = text.n() - prev;
                if l >= prev_len
                    || (l >= text.n() - suf as usize)
                    || text.sym(prev + l) > text.sym(suf as usize + l)
                {
                    return Err(Error::NotSorted);
                }
                split = l as u32;
            }
            let mut last_popped = NIL;
            while nodes[*stack.last().unwrap() as usize].sdepth > split {
                last_popped = stack.pop().unwrap();
            }
            let top = *stack.last().unwrap();
            let at = if nodes[top as usize].sdepth == split {
                top
            } else {
                // split the edge towards last_popped
                let inner = nodes.len() as u32;
                let lp = last_popped as usize;
                let old_parent = nodes[lp].parent;
                nodes.push(BuildNode {
                    parent: old_parent,
                    sdepth: split,
                    lrank: nodes[lp].lrank,
                    first_child: last_popped,
                    last_child: last_popped,
                    next_sibling: nodes[lp].next_sibling,
                    prev_sibling: nodes[lp].prev_sibling,
                });
                // replace last_popped by inner in the parent's child list
                let (prev_sib, next_sib) = (nodes[lp].prev_sibling, nodes[lp].next_sibling);
                if prev_sib == NIL {
                    nodes[old_parent as usize].first_child = inner;
                } else {
                    nodes[prev_sib as usize].next_sibling = inner;
                }
                if next_sib == NIL {
                    nodes[old_parent as usize].last_child = inner;
                } else {
                    nodes[next_sib as usize].prev_sibling = inner;
                }
                nodes[lp].parent = inner;
                nodes[lp].prev_sibling = NIL;
                nodes[lp].next_sibling = NIL;
                stack.push(inner);
                inner
            };
            let leaf = nodes.len() as u32;
            nodes.push(BuildNode {
                parent: at,
                sdepth: (text.n() - suf as usize) as u32,
                lrank: rank as u32,
                first_child: NIL,
                last_child: NIL,
                next_sibling: NIL,
                prev_sibling: NIL,
            });
            attach(&mut nodes, at, leaf);
            stack.push(leaf);
            leaf_node[rank] = leaf;
        }

        Self::finalize(text, positions.to_vec(), nodes, leaf_node)
    }

    fn finalize(
        _text: &PackedText,
        pos: Vec<u32>,
        nodes: Vec<BuildNode>,
        leaf_node: Vec<u32>,
    ) -> Result<CompactTrie, Error> {
        let count = nodes.len();
        let mut parent = vec![0u32; count];
        let mut sdepth = vec![0u32; count];
        let mut lrank = vec![0u32; count];
        let mut rrank = vec![0u32; count];
        let mut child_start = vec![0u32; count + 1];
        for (i, nd) in nodes.iter().enumerate() {
            parent[i] = nd.parent;
            sdepth[i] = nd.sdepth;
            lrank[i] = nd.lrank;
        }
        // children CSR preserving sibling order
        let mut degree = vec![0u32; count];
        for (i, _) in nodes.iter().enumerate().skip(1) {
            degree[nodes[i].parent as usize] += 1;
        }
        for i in 0..count {
            child_start[i + 1] = child_start[i] + degree[i];
        }
        let mut children = vec![0u32; count.saturating_sub(1)];
        let mut fill = child_start.clone();
        for i in 0..count {
            let mut c = nodes[i].first_child;
            while c != NIL {
                children[fill[i] as usize] = c;
                fill[i] += 1;
                c = nodes[c as usize].next_sibling;
            }
        }
        // rrank and subtree sizes by iterative post-order
        let mut size = vec![1u32; count];
        {
            let mut order: Vec<u32> = Vec::with_capacity(count);
            let mut dfs = vec![0u32];
            while let Some(v) = dfs.pop() {
                order.push(v);
                let v = v as usize;
                for c in &children[child_start[v] as usize..child_start[v + 1] as usize] {
                    dfs.push(*c);
                }
            }
            for &v in order.iter().rev() {
                let v = v as usize;
                let cs = child_start[v] as usize;
                let ce = child_start[v + 1] as usize;
                if cs == ce {
                    rrank[v] = lrank[v] + 1;
                } else {
                    rrank[v] = rrank[children[ce - 1] as usize];
                    for c in &children[cs..ce] {
                        size[v] += size[*c as usize];
                    }
                }
            }
        }
        // heavy path decomposition
        let mut hp_head = vec![0u32; count];
        let mut chain_pos = vec![0u32; count];
        let mut chain_nodes = vec![0u32; count];
        {
            let mut next_slot = 0u32;
            let mut dfs: Vec<(u32, u32)> = vec![(0, 0)]; // (node, head)
            while let Some((v, head)) = dfs.pop() {
                hp_head[v as usize] = head;
                chain_pos[v as usize] = next_slot;
                chain_nodes[next_slot as usize] = v;
                next_slot += 1;
                let vs = child_start[v as usize] as usize;
                let ve = child_start[v as usize + 1] as usize;
                if vs == ve {
                    continue;
                }
                let heavy = children[vs..ve]
                    .iter()
                    .copied()
                    .max_by_key(|&c| size[c as usize])
                    .unwrap();
                // push light children first so the heavy chain continues
                // contiguously in the slot order
                for c in children[vs..ve].iter().copied() {
                    if c != heavy {
                        dfs.push((c, c));
                    }
                }
                dfs.push((heavy, head));
            }
        }
        Ok(CompactTrie {
            pos,
            parent,
            sdepth,
            lrank,
            rrank,
            child_start,
            children,
            leaf_node,
            hp_head,
            chain_pos,
            chain_nodes,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_node.len()
    }

    /// Node of the `i`-th leftmost leaf (0-based).
    pub fn leaf(&self, i: usize) -> u32 {
        self.leaf_node[i]
    }

    pub fn positions(&self) -> &[u32] {
        &self.pos
    }

    pub fn sdepth(&self, v: u32) -> usize {
        self.sdepth[v as usize] as usize
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        (v != 0).then(|| self.parent[v as usize])
    }

    /// `(lrank, rrank)`: strings strictly before the subtree, and that plus
    /// the subtree's leaf count.
    pub fn ranks(&self, v: u32) -> (usize, usize) {
        (self.lrank[v as usize] as usize, self.rrank[v as usize] as usize)
    }

    /// A text position whose suffix has `str(v)` as a prefix.
    pub fn rep(&self, v: u32) -> usize {
        self.pos[self.lrank[v as usize] as usize] as usize
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        let v = v as usize;
        self.child_start[v] == self.child_start[v + 1]
    }

    pub fn children(&self, v: u32) -> &[u32] {
        &self.children[self.child_start[v as usize] as usize..self.child_start[v as usize + 1] as usize]
    }

    /// First symbol of the edge from `v` to child `u`.
    #[inline]
    fn edge_sym(&self, text: &PackedText, v: u32, u: u32) -> u32 {
        text.sym(self.rep(u) + self.sdepth(v))
    }

    /// Child of `v` whose edge starts with `c`.
    pub fn child(&self, text: &PackedText, v: u32, c: u32) -> Option<u32> {
        let kids = self.children(v);
        let i = kids.partition_point(|&u| self.edge_sym(text, v, u) < c);
        kids.get(i)
            .copied()
            .filter(|&u| self.edge_sym(text, v, u) == c)
    }

    /// Child of `v` with the largest edge symbol smaller than `c`.
    pub fn pred(&self, text: &PackedText, v: u32, c: u32) -> Option<u32> {
        let kids = self.children(v);
        let i = kids.partition_point(|&u| self.edge_sym(text, v, u) < c);
        i.checked_sub(1).map(|i| kids[i])
    }

    /// Shallowest ancestor of `v` with string depth at least `d`, via the
    /// heavy-path chains.
    pub fn wa(&self, v: u32, d: usize) -> u32 {
        if d == 0 {
            return 0;
        }
        debug_assert!(d <= self.sdepth(v));
        let mut v = v;
        loop {
            let h = self.hp_head[v as usize];
            if (self.sdepth[h as usize] as usize) >= d {
                if h == 0 || (self.sdepth[self.parent[h as usize] as usize] as usize) < d {
                    return h;
                }
                v = self.parent[h as usize];
            } else {
                // answer inside the chain segment (h .. v]
                let lo = self.chain_pos[h as usize];
                let hi = self.chain_pos[v as usize];
                let slice = &self.chain_nodes[lo as usize..=hi as usize];
                let at = slice.partition_point(|&u| (self.sdepth[u as usize] as usize) < d);
                return slice[at];
            }
        }
    }

    /// Lowest common ancestor, computed from the leaf interval and one
    /// longest-common-extension query.
    pub fn lca(&self, text: &PackedText, u: u32, v: u32) -> u32 {
        let (lu, ru) = self.ranks(u);
        let (lv, rv) = self.ranks(v);
        if lu <= lv && rv <= ru {
            return u;
        }
        if lv <= lu && ru <= rv {
            return v;
        }
        let l = lu.min(lv);
        let r = ru.max(rv);
        let d = text.lce(self.pos[l] as usize, self.pos[r - 1] as usize);
        self.wa(self.leaf_node[l], d)
    }
}

/// Trie over the metasymbol images of a sorted suffix set, answering
/// "how many stored suffixes precede this packed pattern" without
/// materializing the images. Dummy top-alphabet leaves pad the alphabet and
/// sit after every real entry, so they never enter a count.
#[derive(Debug)]
pub struct MetaTrie {
    pos: Vec<u32>,
    real: usize,
    dummies: usize,
    /// depth in metasymbols
    sdepth: Vec<u32>,
    lrank: Vec<u32>,
    rrank: Vec<u32>,
    child_start: Vec<u32>,
    children: Vec<u32>,
}

impl MetaTrie {
    pub fn build(text: &PackedText, enc: &MetaEncoding, positions: &[u32]) -> Result<MetaTrie, Error> {
        let q = positions.len();
        let kappa = enc.kappa;
        let dummies = (text.n() as f64).sqrt().ceil() as usize;
        struct Tmp {
            parent: u32,
            sdepth: u32,
            lrank: u32,
            first_child: u32,
            last_child: u32,
            next_sibling: u32,
            prev_sibling: u32,
        }
        let mut nodes: Vec<Tmp> = vec![Tmp {
            parent: NIL,
            sdepth: 0,
            lrank: 0,
            first_child: NIL,
            last_child: NIL,
            next_sibling: NIL,
            prev_sibling: NIL,
        }];
        let mut stack: Vec<u32> = vec![0];
        let attach = |nodes: &mut Vec<Tmp>, parent: u32, child: u32| {
            let prev = nodes[parent as usize].last_child;
            nodes[child as usize].prev_sibling = prev;
            nodes[child as usize].parent = parent;
            if prev == NIL {
                nodes[parent as usize].first_child = child;
            } else {
                nodes[prev as usize].next_sibling = child;
            }
            nodes[parent as usize].last_child = child;
        };
        for (rank, &suf) in positions.iter().enumerate() {
            let mut split = 0u32;
            if rank > 0 {
                let prev = positions[rank - 1] as usize;
                let l = text.lce(prev, suf as usize);
                if text.n() - prev == l || text.n() - (suf as usize) == l {
                    return Err(Error::NotSorted);
                }
                if text.sym(prev + l) > text.sym(suf as usize + l) {
                    return Err(Error::NotSorted);
                }
                split = (l / kappa) as u32;
            }
            let mut last_popped = NIL;
            while nodes[*stack.last().unwrap() as usize].sdepth > split {
                last_popped = stack.pop().unwrap();
            }
            let top = *stack.last().unwrap();
            let at = if nodes[top as usize].sdepth == split {
                top
            } else {
                let inner = nodes.len() as u32;
                let lp = last_popped as usize;
                let old_parent = nodes[lp].parent;
                nodes.push(Tmp {
                    parent: old_parent,
                    sdepth: split,
                    lrank: nodes[lp].lrank,
                    first_child: last_popped,
                    last_child: last_popped,
                    next_sibling: nodes[lp].next_sibling,
                    prev_sibling: nodes[lp].prev_sibling,
                });
                let (prev_sib, next_sib) = (nodes[lp].prev_sibling, nodes[lp].next_sibling);
                if prev_sib == NIL {
                    nodes[old_parent as usize].first_child = inner;
                } else {
                    nodes[prev_sib as usize].next_sibling = inner;
                }
                if next_sib == NIL {
                    nodes[old_parent as usize].last_child = inner;
                } else {
                    nodes[next_sib as usize].prev_sibling = inner;
                }
                nodes[lp].parent = inner;
                nodes[lp].prev_sibling = NIL;
                nodes[lp].next_sibling = NIL;
                stack.push(inner);
                inner
            };
            let leaf = nodes.len() as u32;
            let meta_len = enc.meta_len(text.n() - suf as usize) as u32;
            nodes.push(Tmp {
                parent: at,
                sdepth: meta_len,
                lrank: rank as u32,
                first_child: NIL,
                last_child: NIL,
                next_sibling: NIL,
                prev_sibling: NIL,
            });
            attach(&mut nodes, at, leaf);
            stack.push(leaf);
        }
        // dummy length-1 strings over the padding alphabet, largest last
        for t in 0..dummies {
            let leaf = nodes.len() as u32;
            nodes.push(Tmp {
                parent: 0,
                sdepth: 1,
                lrank: (q + t) as u32,
                first_child: NIL,
                last_child: NIL,
                next_sibling: NIL,
                prev_sibling: NIL,
            });
            attach(&mut nodes, 0, leaf);
        }
        // flatten
        let count = nodes.len();
        let mut sdepth = vec![0u32; count];
        let mut lrank = vec![0u32; count];
        let mut rrank = vec![0u32; count];
        let mut child_start = vec![0u32; count + 1];
        let mut degree = vec![0u32; count];
        for i in 1..count {
            degree[nodes[i].parent as usize] += 1;
        }
        for i in 0..count {
            sdepth[i] = nodes[i].sdepth;
            lrank[i] = nodes[i].lrank;
            child_start[i + 1] = child_start[i] + degree[i];
        }
        let mut children = vec![0u32; count - 1];
        let mut fill = child_start.clone();
        for i in 0..count {
            let mut c = nodes[i].first_child;
            while c != NIL {
                children[fill[i] as usize] = c;
                fill[i] += 1;
                c = nodes[c as usize].next_sibling;
            }
        }
        {
            let mut order: Vec<u32> = Vec::with_capacity(count);
            let mut dfs = vec![0u32];
            while let Some(v) = dfs.pop() {
                order.push(v);
                for c in &children[child_start[v as usize] as usize..child_start[v as usize + 1] as usize] {
                    dfs.push(*c);
                }
            }
            for &v in order.iter().rev() {
                let v = v as usize;
                let cs = child_start[v] as usize;
                let ce = child_start[v + 1] as usize;
                rrank[v] = if cs == ce {
                    lrank[v] + 1
                } else {
                    rrank[children[ce - 1] as usize]
                };
            }
        }
        Ok(MetaTrie {
            pos: positions.to_vec(),
            real: q,
            dummies,
            sdepth,
            lrank,
            rrank,
            child_start,
            children,
        })
    }

    pub fn len(&self) -> usize {
        self.real
    }

    pub fn is_empty(&self) -> bool {
        self.real == 0
    }

    pub fn dummy_count(&self) -> usize {
        self.dummies
    }

    /// `i`-th metasymbol of the stored string of the node's representative.
    fn node_sym(&self, text: &PackedText, enc: &MetaEncoding, v: u32, d: usize) -> u128 {
        let lr = self.lrank[v as usize] as usize;
        if lr >= self.real {
            return enc.meta_alphabet() + (lr - self.real) as u128;
        }
        let start = self.pos[lr] as usize;
        let len = text.n() - start;
        enc.meta_symbol(|i| text.sym(start + i), len, d)
    }

    /// Number of stored strings strictly smaller than the metasymbol string
    /// `q`, given as an accessor over `[0..q_len)`. While the walk fully
    /// matches `str(node)`, everything smaller sits left of the subtree, so
    /// the count is always a rank boundary of a visited node.
    pub fn rank_lt<F: Fn(usize) -> u128>(
        &self,
        text: &PackedText,
        enc: &MetaEncoding,
        qsym: F,
        q_len: usize,
    ) -> usize {
        let mut node = 0u32;
        let mut depth = 0usize;
        loop {
            let v = node as usize;
            if depth == q_len {
                return self.lrank[v] as usize;
            }
            let kids = &self.children[self.child_start[v] as usize..self.child_start[v + 1] as usize];
            if kids.is_empty() {
                // full stored string matched: a proper prefix of q
                return self.lrank[v] as usize + 1;
            }
            let c = qsym(depth);
            let i = kids.partition_point(|&u| self.node_sym(text, enc, u, depth) < c);
            let count = if i == 0 {
                self.lrank[v] as usize
            } else {
                self.rrank[kids[i - 1] as usize] as usize
            };
            let Some(&u) = kids.get(i).filter(|&&u| self.node_sym(text, enc, u, depth) == c)
            else {
                return count;
            };
            // walk the edge label
            let target = self.sdepth[u as usize] as usize;
            let mut d = depth + 1;
            while d < target {
                if d == q_len {
                    return count;
                }
                let es = self.node_sym(text, enc, u, d);
                let qs = qsym(d);
                if es < qs {
                    return self.rrank[u as usize] as usize;
                }
                if es > qs {
                    return count;
                }
                d += 1;
            }
            node = u;
            depth = target;
        }
    }

    /// Prefix range of a packed pattern: `b` counts stored suffixes smaller
    /// than the pattern, and `(b..e]` are exactly those it prefixes.
    pub fn prefix_range(&self, text: &PackedText, enc: &MetaEncoding, pat: &[u32]) -> (usize, usize) {
        let m = pat.len();
        let q_len = enc.meta_len(m);
        let b = self.rank_lt(text, enc, |i| enc.meta_symbol(|d| pat[d], m, i), q_len);
        let e = self.rank_lt(text, enc, |i| enc.meta_symbol_upper(|d| pat[d], m, i), q_len);
        (b, e)
    }
}

/// Truncated trie over the distinct short prefixes of the suffix order: one
/// leaf per block of the short-prefix partition, with ancestor and child
/// lookup by plain walks (depths never exceed the window length).
#[derive(Debug)]
pub struct TruncTrie {
    parent: Vec<u32>,
    sdepth: Vec<u32>,
    /// block interval below each node (in block index space)
    lblock: Vec<u32>,
    rblock: Vec<u32>,
    /// decoded symbols of each node's string
    strs: Vec<Vec<u32>>,
    child_start: Vec<u32>,
    children: Vec<u32>,
    child_sym: Vec<u32>,
    /// node of each block's leaf
    leaf_node: Vec<u32>,
}

impl TruncTrie {
    /// `shorts[k]` is the decoded symbol string of block `k`, in
    /// lexicographic order, each of length at most `3*tau - 1` and
    /// prefix-free as a set.
    pub fn build(shorts: &[Vec<u32>]) -> TruncTrie {
        let q = shorts.len();
        let mut parent = vec![NIL; 1];
        let mut sdepth = vec![0u32];
        let mut lblock = vec![0u32];
        let mut strs: Vec<Vec<u32>> = vec![Vec::new()];
        let mut kids: Vec<Vec<(u32, u32)>> = vec![Vec::new()];
        let mut stack = vec![0u32];
        let mut leaf_node = vec![0u32; q];
        for (rank, s) in shorts.iter().enumerate() {
            let mut split = 0usize;
            if rank > 0 {
                let p = &shorts[rank - 1];
                while split < p.len() && split < s.len() && p[split] == s[split] {
                    split += 1;
                }
            }
            let mut last_popped = NIL;
            while sdepth[*stack.last().unwrap() as usize] as usize > split {
                last_popped = stack.pop().unwrap();
            }
            let top = *stack.last().unwrap();
            let at = if sdepth[top as usize] as usize == split {
                top
            } else {
                let inner = parent.len() as u32;
                let lp = last_popped as usize;
                let op = parent[lp] as usize;
                parent.push(parent[lp]);
                sdepth.push(split as u32);
                lblock.push(lblock[lp]);
                strs.push(strs[lp][..split].to_vec());
                kids.push(vec![(strs[lp][split], last_popped)]);
                let slot = kids[op].iter().position(|&(_, c)| c == last_popped).unwrap();
                kids[op][slot].1 = inner;
                parent[lp] = inner;
                stack.push(inner);
                inner
            };
            let leaf = parent.len() as u32;
            parent.push(at);
            sdepth.push(s.len() as u32);
            lblock.push(rank as u32);
            strs.push(s.clone());
            kids.push(Vec::new());
            kids[at as usize].push((s[split], leaf));
            stack.push(leaf);
            leaf_node[rank] = leaf;
        }
        let count = parent.len();
        let mut rblock = vec![0u32; count];
        let mut child_start = vec![0u32; count + 1];
        for i in 0..count {
            child_start[i + 1] = child_start[i] + kids[i].len() as u32;
        }
        let mut children = Vec::with_capacity(count - 1);
        let mut child_sym = Vec::with_capacity(count - 1);
        for k in &kids {
            for &(sym, c) in k {
                children.push(c);
                child_sym.push(sym);
            }
        }
        let mut order: Vec<u32> = Vec::with_capacity(count);
        let mut dfs = vec![0u32];
        while let Some(v) = dfs.pop() {
            order.push(v);
            for c in &children[child_start[v as usize] as usize..child_start[v as usize + 1] as usize] {
                dfs.push(*c);
            }
        }
        for &v in order.iter().rev() {
            let v = v as usize;
            let cs = child_start[v] as usize;
            let ce = child_start[v + 1] as usize;
            rblock[v] = if cs == ce {
                lblock[v] + 1
            } else {
                rblock[children[ce - 1] as usize]
            };
        }
        TruncTrie {
            parent,
            sdepth,
            lblock,
            rblock,
            strs,
            child_start,
            children,
            child_sym,
            leaf_node,
        }
    }

    pub fn leaf(&self, block: usize) -> u32 {
        self.leaf_node[block]
    }

    pub fn sdepth(&self, v: u32) -> usize {
        self.sdepth[v as usize] as usize
    }

    pub fn str_of(&self, v: u32) -> &[u32] {
        &self.strs[v as usize]
    }

    pub fn blocks(&self, v: u32) -> (usize, usize) {
        (self.lblock[v as usize] as usize, self.rblock[v as usize] as usize)
    }

    pub fn lca(&self, u: u32, v: u32) -> u32 {
        let mut pu: Vec<u32> = std::iter::successors(Some(u), |&x| {
            (x != 0).then(|| self.parent[x as usize])
        })
        .collect();
        pu.reverse();
        let mut pv: Vec<u32> = std::iter::successors(Some(v), |&x| {
            (x != 0).then(|| self.parent[x as usize])
        })
        .collect();
        pv.reverse();
        let mut ans = 0;
        for i in 0..pu.len().min(pv.len()) {
            if pu[i] == pv[i] {
                ans = pu[i];
            } else {
                break;
            }
        }
        ans
    }

    pub fn wa(&self, v: u32, d: usize) -> u32 {
        let mut best = v;
        let mut w = v;
        while w != 0 {
            w = self.parent[w as usize];
            if self.sdepth[w as usize] as usize >= d {
                best = w;
            }
        }
        best
    }

    pub fn child(&self, v: u32, c: u32) -> Option<u32> {
        let cs = self.child_start[v as usize] as usize;
        let ce = self.child_start[v as usize + 1] as usize;
        let syms = &self.child_sym[cs..ce];
        let i = syms.partition_point(|&s| s < c);
        (i < syms.len() && syms[i] == c).then(|| self.children[cs + i])
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_range, naive_sa, NaiveSuffixTree};
    use crate::sais;
    use crate::text::BuildConfig;

    fn make_text(raw: &[u8]) -> PackedText {
        let cfg = BuildConfig {
            force_full: true,
            tau_override: Some(if raw.len() >= 8 { 2 } else { 1 }),
            ..BuildConfig::default()
        };
        PackedText::ingest(raw, &cfg).unwrap()
    }

    fn syms_of(text: &PackedText) -> Vec<u32> {
        (0..text.n()).map(|i| text.sym(i)).collect()
    }

    #[test]
    fn suffix_trie_matches_naive_tree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for len in [1usize, 2, 17, 100, 500] {
            let raw: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..3u8)).collect();
            let text = make_text(&raw);
            let syms = syms_of(&text);
            let sa: Vec<u32> = naive_sa(&syms).iter().map(|&x| x as u32).collect();
            let trie = CompactTrie::build(&text, &sa).unwrap();
            let naive = NaiveSuffixTree::new(&syms).unwrap();
            assert_eq!(trie.leaf_count(), text.n());
            // every naive node appears with matching ranks and depth
            let mut count = 0;
            for v in naive.all_nodes() {
                let (b, e) = naive.repr(v);
                // locate the corresponding trie node: lca of boundary leaves
                let u = trie.lca(&text, trie.leaf(b), trie.leaf(e - 1));
                assert_eq!(trie.ranks(u), (b, e));
                assert_eq!(trie.sdepth(u), naive.sdepth(v));
                count += 1;
            }
            assert_eq!(count, trie.node_count());
        }
    }

    #[test]
    fn lca_and_wa_against_walks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let raw: Vec<u8> = (0..300).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
        let text = make_text(&raw);
        let syms = syms_of(&text);
        let sa: Vec<u32> = naive_sa(&syms).iter().map(|&x| x as u32).collect();
        let trie = CompactTrie::build(&text, &sa).unwrap();
        // parent pointers give a reference wa/lca
        let parents: Vec<u32> = (0..trie.node_count() as u32)
            .map(|v| trie.parent(v).unwrap_or(0))
            .collect();
        let ancestors = |v: u32| -> Vec<u32> {
            let mut out = vec![v];
            let mut w = v;
            while w != 0 {
                w = parents[w as usize];
                out.push(w);
            }
            out
        };
        for v in 0..trie.node_count() as u32 {
            assert_eq!(trie.lca(&text, v, v), v);
            let anc = ancestors(v);
            for d in 0..=trie.sdepth(v) {
                let expect = *anc
                    .iter()
                    .filter(|&&a| trie.sdepth(a) >= d)
                    .last()
                    .unwrap();
                assert_eq!(trie.wa(v, d), expect, "wa({v},{d})");
            }
            assert_eq!(trie.wa(v, 0), 0);
        }
        for _ in 0..2000 {
            let u = rng.gen_range(0..trie.node_count()) as u32;
            let v = rng.gen_range(0..trie.node_count()) as u32;
            let au = ancestors(u);
            let expect = ancestors(v).into_iter().find(|a| au.contains(a)).unwrap();
            assert_eq!(trie.lca(&text, u, v), expect);
        }
    }

    #[test]
    fn child_and_pred() {
        let text = make_text(b"abaababababaababa");
        let syms = syms_of(&text);
        let sa: Vec<u32> = naive_sa(&syms).iter().map(|&x| x as u32).collect();
        let trie = CompactTrie::build(&text, &sa).unwrap();
        let root = trie.root();
        // root children: sentinel, a, b
        let a = trie.child(&text, root, 1).unwrap();
        assert_eq!(trie.ranks(a), (1, 11));
        assert!(trie.child(&text, root, 3).is_none());
        let p = trie.pred(&text, root, 2).unwrap();
        assert_eq!(p, a);
        assert!(trie.pred(&text, root, 0).is_none());
    }

    #[test]
    fn unsorted_input_rejected() {
        let text = make_text(b"abaababababaababa");
        let bad = [3u32, 1, 2];
        assert!(matches!(
            CompactTrie::build(&text, &bad),
            Err(Error::NotSorted)
        ));
    }

    #[test]
    fn meta_trie_prefix_ranges() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for len in [30usize, 120, 300] {
            let raw: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..2u8)).collect();
            let text = make_text(&raw);
            let syms = syms_of(&text);
            let enc = MetaEncoding::new(text.sigma(), text.tau());
            let sa: Vec<u32> = naive_sa(&syms).iter().map(|&x| x as u32).collect();
            let trie = MetaTrie::build(&text, &enc, &sa).unwrap();
            // exhaustive patterns up to length 8
            let mut pats: Vec<Vec<u32>> = vec![vec![]];
            let mut level: Vec<Vec<u32>> = vec![vec![]];
            for _ in 0..8 {
                let mut next = Vec::new();
                for p in &level {
                    for c in 0..text.sigma() {
                        let mut q = p.clone();
                        q.push(c);
                        next.push(q);
                    }
                }
                pats.extend(next.iter().cloned());
                level = next;
            }
            for p in &pats {
                let got = trie.prefix_range(&text, &enc, p);
                let expect = naive_range(&syms, p);
                assert_eq!(got, expect, "pattern {p:?} text len {len}");
            }
        }
    }

    #[test]
    fn meta_trie_fig_values() {
        let text = make_text(b"abaababababaababa");
        let syms = syms_of(&text);
        let enc = MetaEncoding::new(text.sigma(), text.tau());
        let sa: Vec<u32> = naive_sa(&syms).iter().map(|&x| x as u32).collect();
        let trie = MetaTrie::build(&text, &enc, &sa).unwrap();
        assert_eq!(trie.prefix_range(&text, &enc, &[1, 2, 1]), (4, 11));
        assert_eq!(trie.prefix_range(&text, &enc, &[]), (0, 18));
        let (b, e) = trie.prefix_range(&text, &enc, &[2, 2]);
        assert_eq!(b, e, "absent pattern has an empty range");
        assert_eq!(trie.dummy_count(), (text.n() as f64).sqrt().ceil() as usize);
    }

    #[test]
    fn trunc_trie_blocks() {
        // strings over the short-prefix alphabet, lexicographically sorted,
        // prefix-free (sentinel-terminated shorts end in 0)
        let shorts: Vec<Vec<u32>> = vec![
            vec![0],
            vec![1, 0],
            vec![1, 1, 1],
            vec![1, 1, 2],
            vec![1, 2, 0],
            vec![2, 1, 1],
        ];
        let t = TruncTrie::build(&shorts);
        for (k, s) in shorts.iter().enumerate() {
            let leaf = t.leaf(k);
            assert_eq!(t.str_of(leaf), &s[..]);
            assert_eq!(t.blocks(leaf), (k, k + 1));
        }
        // lca of blocks 2 and 3 is the "11" node
        let u = t.lca(t.leaf(2), t.leaf(3));
        assert_eq!(t.str_of(u), &[1, 1]);
        assert_eq!(t.blocks(u), (2, 4));
        // lca of 1 and 4 is "1"
        let u = t.lca(t.leaf(1), t.leaf(4));
        assert_eq!(t.str_of(u), &[1]);
        assert_eq!(t.blocks(u), (1, 5));
        assert_eq!(t.wa(t.leaf(3), 2), t.lca(t.leaf(2), t.leaf(3)));
        assert_eq!(t.wa(t.leaf(3), 0), 0);
        // child lookups
        let one = t.child(0, 1).unwrap();
        assert_eq!(t.str_of(one), &[1]);
        assert!(t.child(0, 3).is_none());
        assert_eq!(t.child(one, 0).map(|v| t.blocks(v)), Some((1, 2)));
    }
}
