//! Index file format: a tagged section stream with a checksum per section.
//!
//! Payloads hold the text and every order-dependent array (anchor
//! positions, run orders, block prefixes); rank/select directories, tries,
//! and the context rank structure are rebuilt deterministically on load, so
//! identical inputs produce byte-identical files and query-identical
//! indexes.

use crate::bitvec::RsBitvec;
use crate::error::Error;
use crate::index::Index;
use crate::prefix_rs::PrefixRankSelect;
use crate::range_cs::BoundedSumRange;
use crate::sa::{decode_short, FullIndex, Mode, PeriodicSide, RootInfo, TextIndex};
use crate::sync::SyncSet;
use crate::text::{BuildConfig, MetaEncoding, PackedText};
use crate::trie::{CompactTrie, MetaTrie, TruncTrie};
use std::collections::HashMap;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 8] = b"SYNIDX01";
pub const VERSION: u32 = 1;

const TAG_CONFIG: u32 = 0x01;
const TAG_TEXT: u32 = 0x10;
const TAG_PLAIN_SA: u32 = 0x11;
const TAG_SYNC: u32 = 0x12;
const TAG_BLOCKS: u32 = 0x13;
const TAG_SIDE_MINUS: u32 = 0x14;
const TAG_SIDE_PLUS: u32 = 0x15;
const DIR_REV: u32 = 0x100;

// ---- CRC64 (ECMA polynomial) ----

const CRC64_POLY: u64 = 0x42F0_E1EB_A9EA_3693;

const fn crc64_table() -> [u64; 256] {
    let mut table = [0u64; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u64) << 56;
        let mut b = 0;
        while b < 8 {
            crc = if crc & (1 << 63) != 0 {
                (crc << 1) ^ CRC64_POLY
            } else {
                crc << 1
            };
            b += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static CRC64_TABLE: [u64; 256] = crc64_table();

pub fn crc64(data: &[u8]) -> u64 {
    let mut crc = !0u64;
    for &byte in data {
        let idx = ((crc >> 56) as u8 ^ byte) as usize;
        crc = (crc << 8) ^ CRC64_TABLE[idx];
    }
    !crc
}

// ---- primitive writers/readers ----

struct Buf(Vec<u8>);

impl Buf {
    fn new() -> Buf {
        Buf(Vec::new())
    }

    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u128(&mut self, v: u128) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn varint(&mut self, mut v: u64) {
        loop {
            let b = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.0.push(b);
                break;
            }
            self.0.push(b | 0x80);
        }
    }

    fn bytes(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }

    fn u32s(&mut self, vs: &[u32]) {
        self.varint(vs.len() as u64);
        for &v in vs {
            self.u32(v);
        }
    }

    fn varints(&mut self, vs: &[u64]) {
        self.varint(vs.len() as u64);
        for &v in vs {
            self.varint(v);
        }
    }

    /// Nondecreasing values as deltas.
    fn deltas(&mut self, vs: &[u32]) {
        self.varint(vs.len() as u64);
        let mut prev = 0u64;
        for &v in vs {
            self.varint(v as u64 - prev);
            prev = v as u64;
        }
    }
}

struct Cur<'a> {
    data: &'a [u8],
    at: usize,
}

impl<'a> Cur<'a> {
    fn new(data: &'a [u8]) -> Cur<'a> {
        Cur { data, at: 0 }
    }

    fn corrupt(msg: &str) -> Error {
        Error::Corrupt(msg.to_string())
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], Error> {
        if self.at + n > self.data.len() {
            return Err(Self::corrupt("section truncated"));
        }
        let s = &self.data[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, Error> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, Error> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u128(&mut self) -> Result<u128, Error> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64, Error> {
        let mut v = 0u64;
        let mut shift = 0u32;
        loop {
            let b = self.u8()?;
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
            shift += 7;
            if shift >= 64 {
                return Err(Self::corrupt("varint overflow"));
            }
        }
    }

    fn u32s(&mut self) -> Result<Vec<u32>, Error> {
        let len = self.varint()? as usize;
        if len > self.data.len() {
            return Err(Self::corrupt("length field too large"));
        }
        (0..len).map(|_| self.u32()).collect()
    }

    fn varints(&mut self) -> Result<Vec<u64>, Error> {
        let len = self.varint()? as usize;
        if len > self.data.len() {
            return Err(Self::corrupt("length field too large"));
        }
        (0..len).map(|_| self.varint()).collect()
    }

    fn deltas(&mut self) -> Result<Vec<u32>, Error> {
        let len = self.varint()? as usize;
        if len > self.data.len() {
            return Err(Self::corrupt("length field too large"));
        }
        let mut prev = 0u64;
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let d = self.varint()?;
            prev += d;
            if k > 0 && d == 0 {
                return Err(Self::corrupt("positions must increase"));
            }
            out.push(u32::try_from(prev).map_err(|_| Self::corrupt("position overflow"))?);
        }
        Ok(out)
    }
}

fn section(out: &mut Vec<u8>, tag: u32, payload: &[u8]) {
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc64(payload).to_le_bytes());
}

// ---- index serialization ----

impl Index {
    pub fn save<W: Write>(&self, mut w: W) -> Result<(), Error> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let mut cfg = Buf::new();
        let c = self.config();
        cfg.u32(c.mu_num);
        cfg.u32(c.mu_den);
        cfg.u32(c.eps_num);
        cfg.u32(c.eps_den);
        cfg.u32(c.tau_override.map(|t| t as u32 + 1).unwrap_or(0));
        cfg.u8(c.force_full as u8);
        section(&mut out, TAG_CONFIG, &cfg.0);
        write_text_index(&mut out, self.forward(), 0);
        write_text_index(&mut out, self.reverse(), DIR_REV);
        w.write_all(&out)?;
        Ok(())
    }

    pub fn save_to_file(&self, path: &std::path::Path) -> Result<(), Error> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.save(&mut w)?;
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Index, Error> {
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        Index::from_bytes(&data)
    }

    pub fn load_from_file(path: &std::path::Path) -> Result<Index, Error> {
        let data = std::fs::read(path)?;
        Index::from_bytes(&data)
    }

    pub fn from_bytes(data: &[u8]) -> Result<Index, Error> {
        if data.len() < 12 || &data[..8] != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = u32::from_le_bytes(data[8..12].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Version(version));
        }
        let mut sections: HashMap<u32, &[u8]> = HashMap::new();
        let mut at = 12usize;
        while at < data.len() {
            if at + 12 > data.len() {
                return Err(Error::Corrupt("section header truncated".into()));
            }
            let tag = u32::from_le_bytes(data[at..at + 4].try_into().unwrap());
            let len = u64::from_le_bytes(data[at + 4..at + 12].try_into().unwrap()) as usize;
            at += 12;
            if len > data.len() || at + len + 8 > data.len() {
                return Err(Error::Corrupt("section body truncated".into()));
            }
            let payload = &data[at..at + len];
            let stored = u64::from_le_bytes(data[at + len..at + len + 8].try_into().unwrap());
            if crc64(payload) != stored {
                return Err(Error::Corrupt(format!(
                    "checksum mismatch in section {tag:#x}"
                )));
            }
            if sections.insert(tag, payload).is_some() {
                return Err(Error::Corrupt("duplicate section".into()));
            }
            at += len + 8;
        }
        let cfg_payload = sections
            .get(&TAG_CONFIG)
            .ok_or_else(|| Error::Corrupt("missing config".into()))?;
        let mut c = Cur::new(cfg_payload);
        let config = BuildConfig {
            mu_num: c.u32()?,
            mu_den: c.u32()?,
            eps_num: c.u32()?,
            eps_den: c.u32()?,
            tau_override: match c.u32()? {
                0 => None,
                t => Some((t - 1) as u16),
            },
            force_full: c.u8()? != 0,
        };
        let fwd = read_text_index(&sections, 0)?;
        let rev = read_text_index(&sections, DIR_REV)?;
        if fwd.text().n() != rev.text().n() {
            return Err(Error::Corrupt("direction length mismatch".into()));
        }
        Ok(Index::from_parts(fwd, rev, config))
    }
}

fn write_text_index(out: &mut Vec<u8>, idx: &TextIndex, dir: u32) {
    let text = idx.text();
    let mut t = Buf::new();
    t.u64(text.n() as u64);
    t.u32(text.sigma());
    t.u32(text.tau() as u32);
    t.u32(text.mu_num);
    t.u32(text.mu_den);
    t.u8(idx.is_fallback() as u8);
    let table = text.sym_table();
    t.varint(table.len() as u64);
    t.bytes(table);
    t.varint(text.words().len() as u64);
    for &w in text.words() {
        t.u64(w);
    }
    section(out, TAG_TEXT | dir, &t.0);

    match idx.mode() {
        Mode::Fallback { sa, .. } => {
            let mut b = Buf::new();
            b.u32s(sa);
            section(out, TAG_PLAIN_SA | dir, &b.0);
        }
        Mode::Full(f) => {
            let mut s = Buf::new();
            s.deltas(f.sync.positions());
            s.u32s(f.sync.lex_to_text());
            section(out, TAG_SYNC | dir, &s.0);

            let mut b = Buf::new();
            b.varint(f.a_short.len() as u64);
            for (&v, &l) in f.a_short.iter().zip(&f.a_short_len) {
                b.u8(l);
                b.u128(v);
            }
            b.varint(f.b_short.words().len() as u64);
            for &w in f.b_short.words() {
                b.u64(w);
            }
            section(out, TAG_BLOCKS | dir, &b.0);

            for side in [&f.minus, &f.plus] {
                let mut p = Buf::new();
                write_side(&mut p, side);
                let tag = if side.plus { TAG_SIDE_PLUS } else { TAG_SIDE_MINUS };
                section(out, tag | dir, &p.0);
            }
        }
    }
}

fn write_side(p: &mut Buf, side: &PeriodicSide) {
    p.varint(side.exp_marks.words().len() as u64);
    for &w in side.exp_marks.words() {
        p.u64(w);
    }
    p.u32s(&side.run_lex);
    p.u32s(&side.run_full);
    p.varints(&side.lens_small);
    let mut mins: Vec<(u128, u64)> = side.min_exp.iter().map(|(&k, &v)| (k, v)).collect();
    mins.sort_unstable();
    p.varint(mins.len() as u64);
    for (k, v) in mins {
        p.u128(k);
        p.varint(v);
    }
    let mut roots: Vec<(u128, &RootInfo)> = side.roots.iter().map(|(&k, r)| (k, r)).collect();
    roots.sort_unstable_by_key(|(k, _)| *k);
    p.varint(roots.len() as u64);
    for (k, r) in roots {
        p.u128(k);
        p.u32(r.period);
        p.u32(r.rep);
        p.u32(r.block.0);
        p.u32(r.block.1);
        p.varint(r.pref_bounds.len() as u64);
        for &(a, b) in &r.pref_bounds {
            p.u32(a);
            p.u32(b);
        }
    }
    p.u32s(&side.z_positions);
}

fn read_text_index(sections: &HashMap<u32, &[u8]>, dir: u32) -> Result<TextIndex, Error> {
    let payload = sections
        .get(&(TAG_TEXT | dir))
        .ok_or_else(|| Error::Corrupt("missing text section".into()))?;
    let mut c = Cur::new(payload);
    let n = c.u64()? as usize;
    let sigma = c.u32()?;
    let tau = c.u32()? as usize;
    let mu_num = c.u32()?;
    let mu_den = c.u32()?;
    let fallback = c.u8()? != 0;
    let table_len = c.varint()? as usize;
    let sym_table = c.take(table_len)?.to_vec();
    let words_len = c.varint()? as usize;
    if n < 2 || sigma < 2 || tau == 0 || sym_table.len() != sigma as usize {
        return Err(Error::Corrupt("inconsistent text header".into()));
    }
    let mut words = Vec::with_capacity(words_len);
    for _ in 0..words_len {
        words.push(c.u64()?);
    }
    let text = PackedText::from_parts(n, sigma, tau, mu_num, mu_den, fallback, words, sym_table);
    if (0..n).any(|i| text.sym(i) >= sigma) || text.sym(n - 1) != 0 {
        return Err(Error::Corrupt("text symbols out of range".into()));
    }
    let enc = MetaEncoding::new(sigma, tau);

    if fallback {
        let payload = sections
            .get(&(TAG_PLAIN_SA | dir))
            .ok_or_else(|| Error::Corrupt("missing suffix section".into()))?;
        let mut c = Cur::new(payload);
        let sa = c.u32s()?;
        if sa.len() != n {
            return Err(Error::Corrupt("suffix array length".into()));
        }
        let mut isa = vec![u32::MAX; n];
        for (i, &j) in sa.iter().enumerate() {
            if j as usize >= n || isa[j as usize] != u32::MAX {
                return Err(Error::Corrupt("suffix array not a permutation".into()));
            }
            isa[j as usize] = i as u32;
        }
        return Ok(TextIndex::from_parts(text, enc, Mode::Fallback { sa, isa }));
    }

    let payload = sections
        .get(&(TAG_SYNC | dir))
        .ok_or_else(|| Error::Corrupt("missing anchor section".into()))?;
    let mut c = Cur::new(payload);
    let positions = c.deltas()?;
    let lex_to_text = c.u32s()?;
    if lex_to_text.len() != positions.len()
        || positions.iter().any(|&p| p as usize >= n)
        || lex_to_text.iter().any(|&t| t as usize >= positions.len())
    {
        return Err(Error::Corrupt("anchor arrays inconsistent".into()));
    }
    let sync = SyncSet::from_parts(tau, positions, n, lex_to_text);

    let payload = sections
        .get(&(TAG_BLOCKS | dir))
        .ok_or_else(|| Error::Corrupt("missing block section".into()))?;
    let mut c = Cur::new(payload);
    let blocks = c.varint()? as usize;
    if blocks > n {
        return Err(Error::Corrupt("too many blocks".into()));
    }
    let mut a_short = Vec::with_capacity(blocks);
    let mut a_short_len = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        a_short_len.push(c.u8()?);
        a_short.push(c.u128()?);
    }
    let bw_len = c.varint()? as usize;
    let mut bwords = Vec::with_capacity(bw_len);
    for _ in 0..bw_len {
        bwords.push(c.u64()?);
    }
    if bw_len != (n + 63) / 64 {
        return Err(Error::Corrupt("block mark words".into()));
    }
    let b_short = RsBitvec::from_words(bwords, n);
    if b_short.count_ones() != blocks {
        return Err(Error::Corrupt("block mark count".into()));
    }

    let minus = read_side(sections, TAG_SIDE_MINUS | dir, &text, false)?;
    let plus = read_side(sections, TAG_SIDE_PLUS | dir, &text, true)?;

    let full = FullIndex::assemble(&text, &enc, b_short, a_short, a_short_len, sync, minus, plus)?;
    Ok(TextIndex::from_parts(text, enc, Mode::Full(Box::new(full))))
}

fn read_side(
    sections: &HashMap<u32, &[u8]>,
    tag: u32,
    text: &PackedText,
    plus: bool,
) -> Result<PeriodicSide, Error> {
    let payload = sections
        .get(&tag)
        .ok_or_else(|| Error::Corrupt("missing run section".into()))?;
    let mut c = Cur::new(payload);
    let ew_len = c.varint()? as usize;
    if ew_len != (text.n() + 63) / 64 {
        return Err(Error::Corrupt("mark words".into()));
    }
    let mut ewords = Vec::with_capacity(ew_len);
    for _ in 0..ew_len {
        ewords.push(c.u64()?);
    }
    let exp_marks = RsBitvec::from_words(ewords, text.n());
    let run_lex = c.u32s()?;
    let run_full = c.u32s()?;
    let lens_small = c.varints()?;
    let q = run_lex.len();
    if run_full.len() != q || lens_small.len() != q {
        return Err(Error::Corrupt("run arrays inconsistent".into()));
    }
    if run_lex.iter().chain(&run_full).any(|&v| v as usize >= text.n()) {
        return Err(Error::Corrupt("run position out of range".into()));
    }
    let minexp_len = c.varint()? as usize;
    if minexp_len > text.n() {
        return Err(Error::Corrupt("class count out of range".into()));
    }
    let mut min_exp = HashMap::with_capacity(minexp_len);
    for _ in 0..minexp_len {
        let k = c.u128()?;
        let v = c.varint()?;
        min_exp.insert(k, v);
    }
    let roots_len = c.varint()? as usize;
    if roots_len > q {
        return Err(Error::Corrupt("root count out of range".into()));
    }
    let mut roots = HashMap::with_capacity(roots_len);
    for _ in 0..roots_len {
        let k = c.u128()?;
        let period = c.u32()?;
        let rep = c.u32()?;
        let block = (c.u32()?, c.u32()?);
        let pb_len = c.varint()? as usize;
        if pb_len != period as usize + 1 || rep as usize + period as usize > text.n() {
            return Err(Error::Corrupt("root entry inconsistent".into()));
        }
        let mut pref_bounds = Vec::with_capacity(pb_len);
        for _ in 0..pb_len {
            pref_bounds.push((c.u32()?, c.u32()?));
        }
        if block.1 as usize > q || block.0 > block.1 {
            return Err(Error::Corrupt("root block out of range".into()));
        }
        roots.insert(
            k,
            RootInfo {
                period,
                rep,
                block,
                pref_bounds,
            },
        );
    }
    let z_positions = c.u32s()?;
    if z_positions.len() != q || z_positions.iter().any(|&v| v as usize >= text.n()) {
        return Err(Error::Corrupt("post-run anchors inconsistent".into()));
    }
    PeriodicSide::assemble(
        text,
        plus,
        exp_marks,
        run_lex,
        run_full,
        lens_small,
        min_exp,
        roots,
        z_positions,
    )
}

impl TextIndex {
    pub(crate) fn mode(&self) -> &Mode {
        &self.mode
    }

    pub(crate) fn from_parts(text: PackedText, enc: MetaEncoding, mode: Mode) -> TextIndex {
        TextIndex { text, enc, mode }
    }
}

impl FullIndex {
    /// Rebuilds the derived structures around deserialized payload arrays.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        text: &PackedText,
        enc: &MetaEncoding,
        b_short: RsBitvec,
        a_short: Vec<u128>,
        a_short_len: Vec<u8>,
        sync: SyncSet,
        minus: PeriodicSide,
        plus: PeriodicSide,
    ) -> Result<FullIndex, Error> {
        let w = PrefixRankSelect::build(
            &sync.context_entries(text),
            3 * text.tau(),
            text.sigma(),
            (1, 2),
        )?;
        let win_flags = crate::sa::build_window_flags(text, &sync);
        let a_s: Vec<u32> = (0..sync.len()).map(|i| sync.lex_pos(i) as u32).collect();
        let s_meta = MetaTrie::build(text, enc, &a_s)?;
        let s_trie = CompactTrie::build(text, &a_s)?;
        let shorts: Vec<Vec<u32>> = a_short
            .iter()
            .zip(&a_short_len)
            .map(|(&v, &l)| decode_short(enc, v, l))
            .collect();
        let t_short = TruncTrie::build(&shorts);
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
}

impl PeriodicSide {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        text: &PackedText,
        plus: bool,
        exp_marks: RsBitvec,
        run_lex: Vec<u32>,
        run_full: Vec<u32>,
        lens_small: Vec<u64>,
        min_exp: HashMap<u128, u64>,
        roots: HashMap<u128, RootInfo>,
        z_positions: Vec<u32>,
    ) -> Result<PeriodicSide, Error> {
        let q = run_lex.len();
        let mut buf = crate::bitvec::BitBuf::zeros(text.n());
        for &s in &run_lex {
            buf.set(s as usize);
        }
        let run_marks = buf.finish();
        if run_marks.count_ones() != q {
            return Err(Error::Corrupt("duplicate run start".into()));
        }
        // text order of runs = run_lex sorted by start position
        let mut order: Vec<u32> = (0..q as u32).collect();
        order.sort_unstable_by_key(|&i| run_lex[i as usize]);
        let mut run_text_to_lex = vec![0u32; q];
        for (text_rank, &lex_idx) in order.iter().enumerate() {
            run_text_to_lex[text_rank] = lex_idx;
        }
        let lens = if q >= 2 {
            Some(BoundedSumRange::build(&lens_small)?)
        } else {
            None
        };
        let enc = MetaEncoding::new(text.sigma(), text.tau());
        let (z_meta, z_trie) = if q > 0 {
            (
                Some(MetaTrie::build(text, &enc, &z_positions)?),
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn roundtrip(idx: &Index) -> Index {
        let mut bytes = Vec::new();
        idx.save(&mut bytes).unwrap();
        Index::from_bytes(&bytes).unwrap()
    }

    #[test]
    fn roundtrip_identical_answers() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for (raw, tau) in [
            (b"abaababababaababa".to_vec(), None),
            (
                (0..400).map(|_| b'a' + rng.gen_range(0..3u8)).collect::<Vec<u8>>(),
                Some(2u16),
            ),
            (
                {
                    let mut v = vec![b'a'; 80];
                    v.push(b'b');
                    v.extend(vec![b'a'; 50]);
                    v
                },
                Some(3),
            ),
        ] {
            let cfg = BuildConfig {
                tau_override: tau,
                force_full: tau.is_some(),
                ..BuildConfig::default()
            };
            let idx = Index::build(&raw, &cfg).unwrap();
            let loaded = roundtrip(&idx);
            let n = idx.n();
            for _ in 0..300 {
                let i = rng.gen_range(1..=n);
                assert_eq!(idx.sa(i).unwrap(), loaded.sa(i).unwrap());
                assert_eq!(idx.isa(i).unwrap(), loaded.isa(i).unwrap());
            }
            for _ in 0..100 {
                let s = rng.gen_range(0..raw.len().saturating_sub(4));
                let l = rng.gen_range(1..=4.min(raw.len() - s));
                let pat = &raw[s..s + l];
                assert_eq!(idx.range(pat).unwrap(), loaded.range(pat).unwrap());
                assert_eq!(idx.locate(pat).unwrap(), loaded.locate(pat).unwrap());
            }
            let leaf = idx.st_findleaf(1).unwrap();
            assert_eq!(idx.st_parent(leaf).unwrap(), loaded.st_parent(leaf).unwrap());
        }
    }

    #[test]
    fn deterministic_bytes() {
        let cfg = BuildConfig {
            tau_override: Some(3),
            force_full: true,
            ..BuildConfig::default()
        };
        let raw = {
            let mut v = vec![b'a'; 100];
            v.push(b'b');
            v.extend(vec![b'a'; 60]);
            v
        };
        let a = Index::build(&raw, &cfg).unwrap();
        let b = Index::build(&raw, &cfg).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        a.save(&mut ba).unwrap();
        b.save(&mut bb).unwrap();
        assert_eq!(ba, bb, "identical input and config give identical bytes");
        let loaded = Index::from_bytes(&ba).unwrap();
        let mut bc = Vec::new();
        loaded.save(&mut bc).unwrap();
        assert_eq!(ba, bc, "load and resave reproduces the file");
    }

    #[test]
    fn corruption_detected() {
        let idx =
            Index::build(b"mississippi banana abracadabra", &BuildConfig::default()).unwrap();
        let mut bytes = Vec::new();
        idx.save(&mut bytes).unwrap();
        assert!(Index::from_bytes(&bytes).is_ok());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let mut broken = bytes.clone();
            let at = rng.gen_range(0..broken.len());
            broken[at] ^= 1 << rng.gen_range(0..8);
            assert!(Index::from_bytes(&broken).is_err(), "flip at {at} must fail");
        }
        assert!(Index::from_bytes(&bytes[..bytes.len() - 3]).is_err());
        let mut vbad = bytes.clone();
        vbad[8] = 9;
        assert!(matches!(Index::from_bytes(&vbad), Err(Error::Version(_))));
    }
}
