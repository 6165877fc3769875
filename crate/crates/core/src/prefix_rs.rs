//! Prefix rank and prefix selection over a sequence of equal-length strings:
//! a wavelet tree whose nodes carry per-symbol position lists, nested with a
//! grouped-alphabet instance so that a query descends at most `h` levels
//! before handing the remaining prefix to the next instance.

use crate::bitvec::EliasFano;
use crate::error::Error;
use std::collections::HashMap;

/// Per-symbol rank/select over one node sequence. Positions are stored per
/// symbol in Elias–Fano form: selection reads one entry, rank does a
/// predecessor count.
#[derive(Debug, Clone)]
pub struct NodeSeq {
    len: u32,
    syms: Vec<(u64, EliasFano)>,
}

impl NodeSeq {
    fn from_lists(len: u32, mut lists: Vec<(u64, Vec<u64>)>) -> NodeSeq {
        lists.sort_by_key(|(s, _)| *s);
        let syms = lists
            .into_iter()
            .map(|(s, positions)| (s, EliasFano::new(&positions, len.max(1) as u64)))
            .collect();
        NodeSeq { len, syms }
    }

    /// Occurrences of `sym` in the first `r` entries.
    pub fn rank(&self, sym: u64, r: usize) -> usize {
        if r == 0 {
            return 0;
        }
        match self.syms.binary_search_by_key(&sym, |(s, _)| *s) {
            Ok(i) => self.syms[i].1.rank_leq(r as u64 - 1),
            Err(_) => 0,
        }
    }

    /// 1-based position of the `q`-th occurrence of `sym`.
    pub fn select(&self, sym: u64, q: usize) -> usize {
        let i = self
            .syms
            .binary_search_by_key(&sym, |(s, _)| *s)
            .expect("select on absent symbol");
        self.syms[i].1.get(q - 1) as usize + 1
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }
}

#[derive(Debug)]
struct Instance {
    /// Base symbols per symbol of this instance.
    span: usize,
    nodes: HashMap<(u8, u64), NodeSeq>,
    child: Option<Box<Instance>>,
}

/// Prefix rank/select structure over `m` strings of length `ell` drawn from
/// `[0..sigma)`.
#[derive(Debug)]
pub struct PrefixRankSelect {
    m: usize,
    ell: usize,
    sigma: u64,
    h: usize,
    top: Instance,
}

impl PrefixRankSelect {
    /// `entries` is the concatenation of `m` strings of `ell` symbols each.
    pub fn build(entries: &[u32], ell: usize, sigma: u32, eps: (u32, u32)) -> Result<PrefixRankSelect, Error> {
        if ell == 0 || sigma < 2 {
            return Err(Error::InconsistentLengths);
        }
        if entries.len() % ell != 0 {
            return Err(Error::InconsistentLengths);
        }
        let m = entries.len() / ell;
        if checked_pow(sigma as u128, ell).is_none_or(|v| v > (1u128 << 64)) {
            return Err(Error::ConfigTooLarge);
        }
        let h = branch_parameter(ell, eps);
        let top = Instance::build(entries, m, ell, sigma as u64, 1, h);
        Ok(PrefixRankSelect {
            m,
            ell,
            sigma: sigma as u64,
            h,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn entry_len(&self) -> usize {
        self.ell
    }

    pub fn branch(&self) -> usize {
        self.h
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    fn check_pattern(&self, x: &[u32]) -> Result<(), Error> {
        if x.len() > self.ell {
            return Err(Error::TooLong { max: self.ell });
        }
        if let Some(&s) = x.iter().find(|&&s| s as u64 >= self.sigma) {
            return Err(Error::BadSymbol {
                sym: s,
                sigma: self.sigma as u32,
            });
        }
        Ok(())
    }

    /// Entries among the first `j` having `x` as a prefix.
    pub fn prefix_rank(&self, x: &[u32], j: usize) -> Result<usize, Error> {
        self.check_pattern(x)?;
        debug_assert!(j <= self.m);
        Ok(self.top.rank(self.sigma, x, j))
    }

    /// 1-based index of the `r`-th entry having `x` as a prefix.
    pub fn prefix_select(&self, x: &[u32], r: usize) -> Result<usize, Error> {
        self.check_pattern(x)?;
        let total = self.top.rank(self.sigma, x, self.m);
        if r < 1 || r > total {
            return Err(Error::RankOutOfRange { rank: r, max: total });
        }
        Ok(self.top.select(self.sigma, x, r))
    }

    #[cfg(test)]
    pub(crate) fn instances(&self) -> Vec<(&HashMap<(u8, u64), NodeSeq>, usize)> {
        let mut out = Vec::new();
        let mut cur = Some(&self.top);
        while let Some(inst) = cur {
            out.push((&inst.nodes, inst.span));
            cur = inst.child.as_deref();
        }
        out
    }
}

/// `h = max(2, ceil(ell^(eps/2)))` with `eps` a rational in (0,1).
fn branch_parameter(ell: usize, eps: (u32, u32)) -> usize {
    let (num, den) = eps;
    let target = checked_pow(ell as u128, num as usize);
    let mut hh = 1usize;
    loop {
        let lhs = checked_pow(hh as u128, 2 * den as usize);
        match (lhs, target) {
            (Some(a), Some(b)) if a >= b => break,
            (None, _) => break,
            _ => hh += 1,
        }
        if hh > ell.max(2) {
            break;
        }
    }
    hh.max(2)
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl Instance {
    fn build(base: &[u32], m: usize, ell_base: usize, sigma_base: u64, span: usize, h: usize) -> Instance {
        let ell = ell_base / span;
        let sym_of = |j: usize, t: usize| -> u64 {
            let from = t * span;
            (from..from + span).fold(0u64, |acc, p| acc * sigma_base + base[j * ell_base + p] as u64)
        };
        // Running prefix keys, updated one depth at a time so that only one
        // depth's position lists are materialized at once.
        let mut keys = vec![0u64; m];
        let sigma_inst = {
            let mut v = 1u64;
            for _ in 0..span {
                v = v.saturating_mul(sigma_base);
            }
            v
        };
        let mut nodes: HashMap<(u8, u64), NodeSeq> = HashMap::new();
        for d in 0..ell {
            let mut building: HashMap<u64, (u32, HashMap<u64, Vec<u64>>)> = HashMap::new();
            for j in 0..m {
                let sym = sym_of(j, d);
                let entry = building.entry(keys[j]).or_default();
                entry.1.entry(sym).or_default().push(entry.0 as u64);
                entry.0 += 1;
                keys[j] = keys[j].wrapping_mul(sigma_inst).wrapping_add(sym);
            }
            for (key, (len, lists)) in building {
                let node = NodeSeq::from_lists(len, lists.into_iter().collect());
                nodes.insert((d as u8, key), node);
            }
        }
        let child = if h <= ell && ell >= 2 {
            Some(Box::new(Instance::build(
                base,
                m,
                ell_base,
                sigma_base,
                span * h,
                h,
            )))
        } else {
            None
        };
        Instance { span, nodes, child }
    }

    fn split(&self, x_len_base: usize, h: usize) -> (usize, usize) {
        let d_inst = x_len_base / self.span;
        debug_assert_eq!(x_len_base % self.span, 0);
        if self.child.is_none() {
            (0, d_inst)
        } else {
            let rem = d_inst % h;
            (d_inst - rem, d_inst)
        }
    }

    fn sym_of_pattern(&self, sigma_base: u64, x: &[u32], t: usize) -> u64 {
        let from = t * self.span;
        (from..from + self.span).fold(0u64, |acc, p| acc * sigma_base + x[p] as u64)
    }

    fn key_of_pattern(&self, sigma_base: u64, x: &[u32], depth: usize) -> u64 {
        let sigma_inst = {
            let mut v = 1u64;
            for _ in 0..self.span {
                v = v.saturating_mul(sigma_base);
            }
            v
        };
        (0..depth).fold(0u64, |acc, t| {
            acc.wrapping_mul(sigma_inst)
                .wrapping_add(self.sym_of_pattern(sigma_base, x, t))
        })
    }

    fn rank(&self, sigma_base: u64, x: &[u32], j: usize) -> usize {
        let h = self.branch_of();
        let (d_main, d_inst) = self.split(x.len(), h);
        let mut r = if d_main == 0 {
            j
        } else {
            self.child
                .as_ref()
                .unwrap()
                .rank(sigma_base, &x[..d_main * self.span], j)
        };
        let mut key = self.key_of_pattern(sigma_base, x, d_main);
        let sigma_inst = {
            let mut v = 1u64;
            for _ in 0..self.span {
                v = v.saturating_mul(sigma_base);
            }
            v
        };
        for t in d_main..d_inst {
            if r == 0 {
                return 0;
            }
            let sym = self.sym_of_pattern(sigma_base, x, t);
            r = match self.nodes.get(&(t as u8, key)) {
                Some(node) => node.rank(sym, r),
                None => 0,
            };
            key = key.wrapping_mul(sigma_inst).wrapping_add(sym);
        }
        r
    }

    fn select(&self, sigma_base: u64, x: &[u32], r: usize) -> usize {
        let h = self.branch_of();
        let (d_main, d_inst) = self.split(x.len(), h);
        let mut q = r;
        let sigma_inst = {
            let mut v = 1u64;
            for _ in 0..self.span {
                v = v.saturating_mul(sigma_base);
            }
            v
        };
        // Precompute keys along the path, then ascend.
        let mut keys = Vec::with_capacity(d_inst - d_main);
        let mut key = self.key_of_pattern(sigma_base, x, d_main);
        for t in d_main..d_inst {
            keys.push(key);
            key = key
                .wrapping_mul(sigma_inst)
                .wrapping_add(self.sym_of_pattern(sigma_base, x, t));
        }
        for t in (d_main..d_inst).rev() {
            let node = self
                .nodes
                .get(&(t as u8, keys[t - d_main]))
                .expect("select descends only through nonempty nodes");
            q = node.select(self.sym_of_pattern(sigma_base, x, t), q);
        }
        if d_main == 0 {
            q
        } else {
            self.child
                .as_ref()
                .unwrap()
                .select(sigma_base, &x[..d_main * self.span], q)
        }
    }

    fn branch_of(&self) -> usize {
        match &self.child {
            Some(c) => c.span / self.span,
            None => usize::MAX,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_prefix_rank, naive_prefix_select};
    use rand::{Rng, SeedableRng};

    fn build_from(entries: &[&[u32]], sigma: u32) -> PrefixRankSelect {
        let ell = entries[0].len();
        let flat: Vec<u32> = entries.iter().flat_map(|e| e.iter().copied()).collect();
        PrefixRankSelect::build(&flat, ell, sigma, (1, 2)).unwrap()
    }

    #[test]
    fn spec_examples() {
        // W = ["ab","aa","ba","ab"] with a=0, b=1
        let w = build_from(&[&[0, 1], &[0, 0], &[1, 0], &[0, 1]], 2);
        assert_eq!(w.prefix_rank(&[0], 3).unwrap(), 2);
        assert_eq!(w.prefix_select(&[0, 1], 2).unwrap(), 4);
        assert_eq!(w.prefix_rank(&[1], 4).unwrap(), 1);
        assert_eq!(w.prefix_select(&[0], 3).unwrap(), 4);
        for j in 0..=4 {
            assert_eq!(w.prefix_rank(&[], j).unwrap(), j);
        }
        for r in 1..=4 {
            assert_eq!(w.prefix_select(&[], r).unwrap(), r);
        }
        assert!(w.prefix_rank(&[0, 1, 0], 1).is_err(), "longer than ell");
        assert!(w.prefix_rank(&[2], 1).is_err(), "symbol outside alphabet");
        assert!(w.prefix_select(&[1, 1], 1).is_err(), "rank out of range");
    }

    #[test]
    fn rank_select_duality() {
        let w = build_from(&[&[0, 1], &[0, 0], &[1, 0], &[0, 1]], 2);
        for x in [[0u32].as_slice(), &[1], &[0, 1], &[0, 0]] {
            let total = w.prefix_rank(x, 4).unwrap();
            for r in 1..=total {
                let i = w.prefix_select(x, r).unwrap();
                assert_eq!(w.prefix_rank(x, i).unwrap(), r);
            }
        }
    }

    fn enumerate_patterns(sigma: u32, max_len: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        let mut level = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &level {
                for c in 0..sigma {
                    let mut q = p.clone();
                    q.push(c);
                    next.push(q);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    #[test]
    fn oracle_equivalence_exhaustive_small() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for &(m, sigma, ell) in &[(40usize, 2u32, 3usize), (64, 3, 4), (128, 2, 4), (9, 3, 2)] {
            let entries: Vec<Vec<u32>> = (0..m)
                .map(|_| (0..ell).map(|_| rng.gen_range(0..sigma)).collect())
                .collect();
            let flat: Vec<u32> = entries.iter().flatten().copied().collect();
            let w = PrefixRankSelect::build(&flat, ell, sigma, (1, 2)).unwrap();
            for x in enumerate_patterns(sigma, ell) {
                for j in 0..=m {
                    assert_eq!(
                        w.prefix_rank(&x, j).unwrap(),
                        naive_prefix_rank(&entries, &x, j),
                        "x={x:?} j={j}"
                    );
                }
                let total = naive_prefix_rank(&entries, &x, m);
                for r in 1..=total {
                    assert_eq!(
                        w.prefix_select(&x, r).unwrap(),
                        naive_prefix_select(&entries, &x, r).unwrap(),
                        "x={x:?} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn longer_entries_recursion() {
        // ell large enough to force several recursion levels
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (m, sigma, ell) = (300usize, 2u32, 9usize);
        let entries: Vec<Vec<u32>> = (0..m)
            .map(|_| (0..ell).map(|_| rng.gen_range(0..sigma)).collect())
            .collect();
        let flat: Vec<u32> = entries.iter().flatten().copied().collect();
        let w = PrefixRankSelect::build(&flat, ell, sigma, (1, 2)).unwrap();
        assert!(w.instances().len() > 1, "recursion must engage");
        for _ in 0..500 {
            let len = rng.gen_range(0..=ell);
            let x: Vec<u32> = (0..len).map(|_| rng.gen_range(0..sigma)).collect();
            let j = rng.gen_range(0..=m);
            assert_eq!(w.prefix_rank(&x, j).unwrap(), naive_prefix_rank(&entries, &x, j));
            let total = naive_prefix_rank(&entries, &x, m);
            if total > 0 {
                let r = rng.gen_range(1..=total);
                assert_eq!(
                    w.prefix_select(&x, r).unwrap(),
                    naive_prefix_select(&entries, &x, r).unwrap()
                );
            }
        }
    }

    #[test]
    fn rank_monotone_steps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let (m, sigma, ell) = (100usize, 3u32, 3usize);
        let flat: Vec<u32> = (0..m * ell).map(|_| rng.gen_range(0..sigma)).collect();
        let w = PrefixRankSelect::build(&flat, ell, sigma, (1, 2)).unwrap();
        let x = [1u32, 0];
        let mut prev = 0;
        for j in 1..=m {
            let r = w.prefix_rank(&x, j).unwrap();
            assert!(r == prev || r == prev + 1);
            prev = r;
        }
    }
}
