//! Suffix array construction by induced sorting, used at build time to
//! order synchronizing positions and run boundaries.

/// Builds the suffix array of `text`; the final symbol must be a unique
/// minimum (the sentinel guarantees this).
pub fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    assert!(n >= 1);
    let sigma = text.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut sa = vec![0u32; n];
    if n == 1 {
        return sa;
    }
    sais(&mut sa, text, sigma);
    sa
}

/// Inverse permutation of a suffix array.
pub fn inverse(sa: &[u32]) -> Vec<u32> {
    let mut isa = vec![0u32; sa.len()];
    for (i, &j) in sa.iter().enumerate() {
        isa[j as usize] = i as u32;
    }
    isa
}

trait SaisSym: Copy {
    fn val(self) -> usize;
}
impl SaisSym for u32 {
    fn val(self) -> usize {
        self as usize
    }
}

const EMPTY: u32 = u32::MAX;

fn sais<S: SaisSym>(sa: &mut [u32], text: &[S], sigma: usize) {
    let n = text.len();
    // S-type flags: stype[i] = true iff suffix i is S-type.
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = if text[i].val() == text[i + 1].val() {
            stype[i + 1]
        } else {
            text[i].val() < text[i + 1].val()
        };
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];

    let mut bucket = vec![0u32; sigma + 1];
    for c in text {
        bucket[c.val() + 1] += 1;
    }
    for i in 0..sigma {
        bucket[i + 1] += bucket[i];
    }

    // Step 1: place LMS suffixes at the ends of their buckets and induce.
    sa.fill(EMPTY);
    {
        let mut tail: Vec<u32> = (1..=sigma).map(|c| bucket[c]).collect();
        for i in (1..n).rev() {
            if is_lms(i) {
                let c = text[i].val();
                tail[c] -= 1;
                sa[tail[c] as usize] = i as u32;
            }
        }
    }
    induce(sa, text, &stype, &bucket);

    // Step 2: name LMS substrings in the order they appear in sa.
    let mut lms_order: Vec<u32> = Vec::new();
    for &p in sa.iter() {
        if p != EMPTY && is_lms(p as usize) {
            lms_order.push(p);
        }
    }
    let n_lms = lms_order.len();
    let mut names = vec![EMPTY; n];
    let mut name_count = 0u32;
    {
        let lms_end = |i: usize| {
            let mut j = i + 1;
            while j < n && !is_lms(j) {
                j += 1;
            }
            j
        };
        let mut prev: Option<(usize, usize)> = None;
        for &p in &lms_order {
            let i = p as usize;
            let end = lms_end(i);
            let same = match prev {
                Some((pi, pend)) => {
                    pend - pi == end - i
                        && (0..=end - i).all(|k| {
                            i + k < n
                                && pi + k < n
                                && text[i + k].val() == text[pi + k].val()
                                && stype[i + k] == stype[pi + k]
                        })
                }
                None => false,
            };
            if !same {
                name_count += 1;
            }
            names[i] = name_count - 1;
            prev = Some((i, end));
        }
    }

    // Step 3: sort the LMS suffixes, recursing when names repeat.
    let lms_positions: Vec<u32> = (0..n).filter(|&i| is_lms(i)).map(|i| i as u32).collect();
    let mut lms_sorted: Vec<u32>;
    if (name_count as usize) == n_lms {
        lms_sorted = vec![0u32; n_lms];
        for &p in &lms_positions {
            lms_sorted[names[p as usize] as usize] = p;
        }
    } else {
        let reduced: Vec<u32> = lms_positions.iter().map(|&p| names[p as usize]).collect();
        let mut sub_sa = vec![0u32; n_lms];
        sais(&mut sub_sa, &reduced, name_count as usize);
        lms_sorted = sub_sa.iter().map(|&r| lms_positions[r as usize]).collect();
    }

    // Step 4: place sorted LMS suffixes and induce the final order.
    sa.fill(EMPTY);
    {
        let mut tail: Vec<u32> = (1..=sigma).map(|c| bucket[c]).collect();
        for &p in lms_sorted.iter().rev() {
            let c = text[p as usize].val();
            tail[c] -= 1;
            sa[tail[c] as usize] = p;
        }
    }
    induce(sa, text, &stype, &bucket);
}

fn induce<S: SaisSym>(sa: &mut [u32], text: &[S], stype: &[bool], bucket: &[u32]) {
    let n = text.len();
    let sigma = bucket.len() - 1;
    // L-type, left to right.
    let mut head: Vec<u32> = (0..sigma).map(|c| bucket[c]).collect();
    for i in 0..n {
        let p = sa[i];
        if p == EMPTY || p == 0 {
            continue;
        }
        let j = p as usize - 1;
        if !stype[j] {
            let c = text[j].val();
            sa[head[c] as usize] = j as u32;
            head[c] += 1;
        }
    }
    // S-type, right to left.
    let mut tail: Vec<u32> = (1..=sigma).map(|c| bucket[c]).collect();
    for i in (0..n).rev() {
        let p = sa[i];
        if p == EMPTY || p == 0 {
            continue;
        }
        let j = p as usize - 1;
        if stype[j] {
            let c = text[j].val();
            tail[c] -= 1;
            sa[tail[c] as usize] = j as u32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive(text: &[u32]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..text.len() as u32).collect();
        sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        sa
    }

    #[test]
    fn fig_text() {
        // abaababababaababa$ with a=1, b=2, $=0
        let raw = b"abaababababaababa";
        let mut t: Vec<u32> = raw.iter().map(|&c| (c - b'a' + 1) as u32).collect();
        t.push(0);
        let sa = suffix_array(&t);
        let expect: Vec<u32> = [18, 17, 12, 3, 15, 10, 1, 13, 8, 6, 4, 16, 11, 2, 14, 9, 7, 5]
            .iter()
            .map(|&x| x - 1)
            .collect();
        assert_eq!(sa, expect);
        let isa = inverse(&sa);
        for (i, &j) in sa.iter().enumerate() {
            assert_eq!(isa[j as usize] as usize, i);
        }
    }

    #[test]
    fn random_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for round in 0..300 {
            let n = rng.gen_range(1..200usize);
            let sigma = *[2u32, 3, 5, 17].get(round % 4).unwrap();
            let mut t: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=sigma)).collect();
            t.push(0);
            assert_eq!(suffix_array(&t), naive(&t), "n={n} sigma={sigma}");
        }
    }

    #[test]
    fn adversarial_texts() {
        for t in [
            {
                let mut v = vec![1u32; 4000];
                v.push(0);
                v
            },
            {
                let mut v: Vec<u32> = (0..4000).map(|i| 1 + (i % 2) as u32).collect();
                v.push(0);
                v
            },
            {
                // Fibonacci word
                let mut a = vec![1u32];
                let mut b = vec![1u32, 2];
                while b.len() < 3000 {
                    let c = [b.clone(), a].concat();
                    a = b;
                    b = c;
                }
                b.push(0);
                b
            },
        ] {
            assert_eq!(suffix_array(&t), naive(&t));
        }
    }
}
