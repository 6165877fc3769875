//! Packed text storage: alphabet remapping, sentinel enforcement, word-packed
//! symbol access, longest-common-extension queries, and the order-preserving
//! integer encodings of short strings used by every lookup table.

use crate::error::Error;

/// Window parameter configuration. `mu` is a rational constant used to derive
/// the window length `tau` from the text length and alphabet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    /// Numerator of the density constant.
    pub mu_num: u32,
    /// Denominator of the density constant.
    pub mu_den: u32,
    /// Recursion shape parameter for the prefix rank/select structure,
    /// stored as a rational in (0, 1).
    pub eps_num: u32,
    pub eps_den: u32,
    /// Explicit window length, overriding the `mu`-derived value.
    pub tau_override: Option<u16>,
    /// Build the full structure even when the input is small enough that the
    /// plain-array fallback would normally be used.
    pub force_full: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            mu_num: 1,
            mu_den: 8,
            eps_num: 1,
            eps_den: 2,
            tau_override: None,
            force_full: false,
        }
    }
}

/// Immutable text over the effective alphabet `[0..sigma)`, terminated by a
/// unique sentinel symbol 0, stored with `ceil(log2 sigma)` bits per symbol.
#[derive(Debug, Clone)]
pub struct PackedText {
    /// Length in symbols, including the sentinel.
    n: usize,
    /// Effective alphabet size (distinct raw bytes + 1 for the sentinel).
    sigma: u32,
    /// Bits per symbol.
    bits: u32,
    /// Packed symbols, little-endian within each word.
    words: Vec<u64>,
    /// Window parameter.
    tau: usize,
    /// Density constant used to derive `tau`.
    pub mu_num: u32,
    pub mu_den: u32,
    /// True when the index should use the plain-array fallback.
    fallback: bool,
    /// raw byte -> symbol (+1 shifted); 0 means the byte does not occur.
    byte_to_sym: Box<[u32; 256]>,
    /// symbol -> raw byte (symbol 0 is the sentinel and has no byte).
    sym_to_byte: Vec<u8>,
}

impl PackedText {
    /// Remaps the raw bytes order-preservingly onto `[1..sigma)`, appends the
    /// sentinel 0, and derives the window parameter from `config`.
    pub fn ingest(raw: &[u8], config: &BuildConfig) -> Result<PackedText, Error> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut present = [false; 256];
        for &b in raw {
            present[b as usize] = true;
        }
        let mut byte_to_sym = Box::new([0u32; 256]);
        let mut sym_to_byte = vec![0u8];
        let mut next = 1u32;
        for b in 0..256 {
            if present[b] {
                byte_to_sym[b] = next;
                sym_to_byte.push(b as u8);
                next += 1;
            }
        }
        let sigma = next;
        let n = raw.len() + 1;
        let bits = 32 - (sigma - 1).leading_zeros().max(0);
        let bits = bits.max(1);
        let mut text = PackedText {
            n,
            sigma,
            bits,
            words: vec![0u64; (n * bits as usize + 63) / 64 + 1],
            tau: 1,
            mu_num: config.mu_num,
            mu_den: config.mu_den,
            fallback: false,
            byte_to_sym,
            sym_to_byte,
        };
        for (i, &b) in raw.iter().enumerate() {
            text.set(i, text.byte_to_sym[b as usize]);
        }
        text.set(n - 1, 0);

        // tau = floor(mu * log_sigma n), computed exactly: the largest t with
        // sigma^(t * mu_den) <= n^mu_num.
        let mut tau = 0usize;
        if sigma >= 2 {
            while pow_leq(sigma as u128, (tau + 1) * config.mu_den as usize, n as u128, config.mu_num as usize) {
                tau += 1;
                if tau > 64 {
                    break;
                }
            }
        }
        let derived_zero = tau == 0;
        tau = tau.max(1);
        if let Some(t) = config.tau_override {
            tau = t as usize;
        }
        text.tau = tau;

        // sigma >= n^{1/7}  <=>  sigma^7 >= n.
        let sigma_too_big = (sigma as u128).pow(7) >= n as u128;
        text.fallback = sigma_too_big || derived_zero || n < 256;
        if config.force_full {
            text.fallback = false;
        }
        if !text.fallback {
            if 2 * tau > n {
                return Err(Error::TauTooLarge { tau, n });
            }
            // All lookup keys must stay comfortably inside u128 and the
            // frequency tables inside memory.
            if 6 * tau * bits as usize > 120 {
                return Err(Error::ConfigTooLarge);
            }
        }
        Ok(text)
    }

    fn set(&mut self, i: usize, sym: u32) {
        let bits = self.bits as usize;
        let bitpos = i * bits;
        let (w, off) = (bitpos / 64, bitpos % 64);
        self.words[w] |= (sym as u64) << off;
        if off + bits > 64 {
            self.words[w + 1] |= (sym as u64) >> (64 - off);
        }
    }

    /// Symbol at position `i` (0-based).
    #[inline]
    pub fn sym(&self, i: usize) -> u32 {
        debug_assert!(i < self.n);
        let bits = self.bits as usize;
        let bitpos = i * bits;
        let (w, off) = (bitpos / 64, bitpos % 64);
        let mut v = self.words[w] >> off;
        if off + bits > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        (v & ((1u64 << bits) - 1)) as u32
    }

    /// Symbol of the infinite cyclic extension, defined for any integer
    /// offset; `sym_cyclic(i) = sym(i mod n)`.
    #[inline]
    pub fn sym_cyclic(&self, i: isize) -> u32 {
        let n = self.n as isize;
        self.sym(i.rem_euclid(n) as usize)
    }

    /// Length in symbols including the sentinel.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn tau(&self) -> usize {
        self.tau
    }

    #[inline]
    pub fn fallback(&self) -> bool {
        self.fallback
    }

    #[inline]
    pub fn byte_to_sym(&self, b: u8) -> Option<u32> {
        let s = self.byte_to_sym[b as usize];
        (s != 0).then_some(s)
    }

    /// Smallest symbol whose raw byte is `>= b`, if any. Used to position
    /// patterns containing bytes absent from the text.
    pub fn sym_at_least(&self, b: u8) -> Option<u32> {
        self.sym_to_byte[1..]
            .iter()
            .position(|&x| x >= b)
            .map(|p| p as u32 + 1)
    }

    #[inline]
    pub fn sym_to_byte(&self, s: u32) -> u8 {
        self.sym_to_byte[s as usize]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Rebuilds a packed text from its serialized parts.
    pub(crate) fn from_parts(
        n: usize,
        sigma: u32,
        tau: usize,
        mu_num: u32,
        mu_den: u32,
        fallback: bool,
        words: Vec<u64>,
        sym_to_byte: Vec<u8>,
    ) -> PackedText {
        let mut byte_to_sym = Box::new([0u32; 256]);
        for (s, &b) in sym_to_byte.iter().enumerate().skip(1) {
            byte_to_sym[b as usize] = s as u32;
        }
        let bits = (32 - (sigma - 1).leading_zeros()).max(1);
        PackedText {
            n,
            sigma,
            bits,
            words,
            tau,
            mu_num,
            mu_den,
            fallback,
            byte_to_sym,
            sym_to_byte,
        }
    }

    pub(crate) fn sym_table(&self) -> &[u8] {
        &self.sym_to_byte
    }

    /// 64 bits of packed symbols starting at symbol position `i`.
    #[inline]
    fn bits64_at(&self, i: usize) -> u64 {
        let bitpos = i * self.bits as usize;
        let (w, off) = (bitpos / 64, bitpos % 64);
        if off == 0 {
            self.words[w]
        } else {
            (self.words[w] >> off) | (self.words.get(w + 1).copied().unwrap_or(0) << (64 - off))
        }
    }

    /// Length of the longest common prefix of the suffixes starting at `j1`
    /// and `j2` (0-based), comparing whole words at a time.
    pub fn lce(&self, j1: usize, j2: usize) -> usize {
        self.lce_bounded(j1, j2, self.n)
    }

    /// `min(lce(j1, j2), cap)`.
    pub fn lce_bounded(&self, j1: usize, j2: usize, cap: usize) -> usize {
        debug_assert!(j1 < self.n && j2 < self.n);
        if j1 == j2 {
            return (self.n - j1).min(cap);
        }
        let max = (self.n - j1.max(j2)).min(cap);
        let per_word = (64 / self.bits) as usize;
        let mut matched = 0usize;
        while matched + per_word <= max {
            let a = self.bits64_at(j1 + matched);
            let b = self.bits64_at(j2 + matched);
            let x = a ^ b;
            if x != 0 {
                let sym_diff = x.trailing_zeros() as usize / self.bits as usize;
                return (matched + sym_diff).min(max);
            }
            matched += per_word;
        }
        while matched < max && self.sym(j1 + matched) == self.sym(j2 + matched) {
            matched += 1;
        }
        matched
    }

    /// Shortest period of `T[j..j+len)` if it is at most `pmax`.
    pub fn period_at_most(&self, j: usize, len: usize, pmax: usize) -> Option<usize> {
        for p in 1..=pmax.min(len) {
            if p == len || self.lce_bounded(j, j + p, len - p) == len - p {
                return Some(p);
            }
        }
        None
    }

    /// Lexicographic comparison of `T[a..a+len)` and `T[b..b+len)`.
    pub fn cmp_range(&self, a: usize, b: usize, len: usize) -> std::cmp::Ordering {
        let l = self.lce_bounded(a, b, len);
        if l == len {
            std::cmp::Ordering::Equal
        } else {
            self.sym(a + l).cmp(&self.sym(b + l))
        }
    }
}

/// `base^exp <= n^pow`, computed without overflow.
fn pow_leq(base: u128, exp: usize, n: u128, pow: usize) -> bool {
    // Compare exp*log(base) with pow*log(n) using exact saturating powers.
    let lhs = checked_pow(base, exp);
    let rhs = checked_pow(n, pow);
    match (lhs, rhs) {
        (Some(a), Some(b)) => a <= b,
        (None, Some(_)) => false,
        (Some(_), None) => true,
        (None, None) => {
            // Both huge; fall back to comparing in the exponent domain.
            (exp as f64) * (base as f64).ln() <= (pow as f64) * (n as f64).ln()
        }
    }
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// A short explicit symbol sequence, used for patterns and assembled query
/// strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymString {
    pub syms: Vec<u32>,
}

impl SymString {
    pub fn new(syms: Vec<u32>) -> Self {
        SymString { syms }
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn slice(&self, from: usize, to: usize) -> &[u32] {
        &self.syms[from..to]
    }
}

/// Block length and metasymbol width for the order-preserving encodings of
/// short strings. Short strings of length at most `kappa = 3*tau - 1` map
/// injectively to integers below `sigma^(6*tau)`; longer strings map to
/// metasymbol sequences block by block.
#[derive(Debug, Clone, Copy)]
pub struct MetaEncoding {
    pub sigma: u128,
    pub tau: usize,
    /// Block length `3*tau - 1`.
    pub kappa: usize,
    /// Precomputed powers `sigma^0 ..= sigma^(6*tau)`.
    pow: [u128; 128],
    pow_len: usize,
}

impl MetaEncoding {
    pub fn new(sigma: u32, tau: usize) -> MetaEncoding {
        let mut pow = [0u128; 128];
        let len = 6 * tau + 1;
        assert!(len < 128);
        pow[0] = 1;
        for i in 1..len {
            pow[i] = pow[i - 1].checked_mul(sigma as u128).expect("alphabet power overflow");
        }
        MetaEncoding {
            sigma: sigma as u128,
            tau,
            kappa: 3 * tau - 1,
            pow,
            pow_len: len,
        }
    }

    /// Number of distinct metasymbols, `sigma^(6*tau)`.
    pub fn meta_alphabet(&self) -> u128 {
        self.pow[self.pow_len - 1]
    }

    /// Encodes a string of length at most `3*tau - 1` by appending
    /// `6*tau - 2|X|` zeros and `|X|` copies of the largest symbol, then
    /// reading the result in base sigma.
    pub fn int<I: IntoIterator<Item = u32>>(&self, syms: I, len: usize) -> u128 {
        debug_assert!(len <= self.kappa);
        let c = self.sigma - 1;
        let mut v: u128 = 0;
        let mut taken = 0usize;
        for s in syms {
            v = v * self.sigma + s as u128;
            taken += 1;
        }
        debug_assert_eq!(taken, len);
        let zeros = 6 * self.tau - 2 * len;
        v *= self.pow[zeros];
        // Append len copies of the largest symbol: c * (sigma^(len-1) + ... + 1).
        if len > 0 {
            let ones = (self.pow[len] - 1) / (self.sigma - 1);
            v = v * self.pow[len] + c * ones;
        }
        v
    }

    /// Variant that appends `6*tau - 2|X|` copies of the largest symbol and
    /// `|X|` zeros instead; `int(X) <= int(Y) < int_upper(X)` characterizes
    /// "X is a prefix of Y" for short strings.
    pub fn int_upper<I: IntoIterator<Item = u32>>(&self, syms: I, len: usize) -> u128 {
        debug_assert!(len <= self.kappa);
        let c = self.sigma - 1;
        let mut v: u128 = 0;
        for s in syms {
            v = v * self.sigma + s as u128;
        }
        let cs = 6 * self.tau - 2 * len;
        if cs > 0 {
            let ones = (self.pow[cs] - 1) / (self.sigma - 1);
            v = v * self.pow[cs] + c * ones;
        }
        v * self.pow[len]
    }

    pub fn int_of_text(&self, text: &PackedText, j: usize, len: usize) -> u128 {
        self.int((j..j + len).map(|i| text.sym(i)), len)
    }

    /// `i`-th metasymbol (0-based) of the metasymbol image of a string
    /// provided as a symbol accessor over `[0..len)`.
    pub fn meta_symbol<F: Fn(usize) -> u32>(&self, sym: F, len: usize, i: usize) -> u128 {
        let from = i * self.kappa;
        let to = ((i + 1) * self.kappa).min(len);
        debug_assert!(from <= len);
        self.int((from..to).map(&sym), to - from)
    }

    /// `i`-th metasymbol of the upper image: identical to `meta_symbol`
    /// except on the final block.
    pub fn meta_symbol_upper<F: Fn(usize) -> u32>(&self, sym: F, len: usize, i: usize) -> u128 {
        let from = i * self.kappa;
        let to = ((i + 1) * self.kappa).min(len);
        if i + 1 == self.meta_len(len) {
            self.int_upper((from..to).map(&sym), to - from)
        } else {
            self.int((from..to).map(&sym), to - from)
        }
    }

    /// Length of the metasymbol image of a length-`len` string.
    pub fn meta_len(&self, len: usize) -> usize {
        (len + 1 + self.kappa - 1) / self.kappa
    }
}
