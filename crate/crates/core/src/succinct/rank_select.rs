//! Constant-time rank and select over plain bit strings.
//!
//! Layout of the index, for a payload of `L` bits:
//!
//! * one `u32` cumulative count per 512-bit coarse block,
//! * one `u64` per coarse block packing seven 9-bit counts: the ones in the
//!   block before each of its 64-bit words 1..=7,
//! * one `u32` coarse-block number for every 1024th one bit (select samples).
//!
//! That is 96 bits per 512 payload bits plus at most 32 bits per 1024 ones,
//! which stays under 25% of the payload once it exceeds 4096 bits. Strings
//! of a single block carry no index and are scanned word by word.
//!
//! Bit `i` (0-based) lives in word `i / 64` at bit `i % 64`. The public
//! methods use 1-based positions.

use super::SuccinctError;

const WORD: usize = 64;
const BLOCK_WORDS: usize = 8;
const SAMPLE_RATE: usize = 1024;

/// Words of one bit string, possibly interleaved with other strings.
#[derive(Clone, Copy)]
pub(crate) struct Words<'a> {
    pub words: &'a [u64],
    pub stride: usize,
    pub offset: usize,
}

impl Words<'_> {
    #[inline]
    fn get(&self, w: usize) -> u64 {
        self.words[w * self.stride + self.offset]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Index {
    len: usize,
    ones: usize,
    coarse: Vec<u32>,
    fine: Vec<u64>,
    samples: Vec<u32>,
}

impl Index {
    pub fn build(len: usize, words: Words<'_>) -> Self {
        let nw = len.div_ceil(WORD);
        let nb = nw.div_ceil(BLOCK_WORDS);
        if nb <= 1 {
            // a single block is scanned directly: at most eight popcounts
            let ones = (0..nw).map(|w| words.get(w).count_ones() as usize).sum();
            return Self {
                len,
                ones,
                ..Self::default()
            };
        }
        let mut coarse = Vec::with_capacity(nb);
        let mut fine = Vec::with_capacity(nb);
        let mut samples = Vec::new();
        let mut total = 0usize;
        // the next one bit (1-based count) whose block gets sampled
        let mut target = SAMPLE_RATE + 1;
        for b in 0..nb {
            coarse.push(total as u32);
            let mut rel = 0u64;
            let mut packed = 0u64;
            for t in 0..BLOCK_WORDS {
                let w = b * BLOCK_WORDS + t;
                if t > 0 {
                    packed |= rel << (9 * (t - 1));
                }
                if w < nw {
                    rel += u64::from(words.get(w).count_ones());
                }
            }
            fine.push(packed);
            total += rel as usize;
            while total >= target {
                samples.push(b as u32);
                target += SAMPLE_RATE;
            }
        }
        Self {
            len,
            ones: total,
            coarse,
            fine,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Bits of index metadata beyond the payload.
    pub fn metadata_bits(&self) -> usize {
        32 * self.coarse.len() + 64 * self.fine.len() + 32 * self.samples.len()
    }

    #[inline]
    fn relative(&self, block: usize, t: usize) -> usize {
        if t == 0 {
            0
        } else {
            ((self.fine[block] >> (9 * (t - 1))) & 0x1ff) as usize
        }
    }

    /// Ones among the first `k` bits, `k <= len`.
    #[inline]
    pub fn rank(&self, k: usize, words: Words<'_>) -> usize {
        debug_assert!(k <= self.len);
        if k == self.len {
            return self.ones;
        }
        let w = k / WORD;
        let mask = (1u64 << (k % WORD)) - 1;
        if self.fine.is_empty() {
            let before: usize = (0..w).map(|v| words.get(v).count_ones() as usize).sum();
            return before + (words.get(w) & mask).count_ones() as usize;
        }
        let (b, t) = (w / BLOCK_WORDS, w % BLOCK_WORDS);
        self.coarse[b] as usize + self.relative(b, t) + (words.get(w) & mask).count_ones() as usize
    }

    /// 0-based position of the `k`-th one, `1 <= k <= ones`.
    #[inline]
    pub fn select(&self, k: usize, words: Words<'_>) -> usize {
        debug_assert!(k >= 1 && k <= self.ones);
        if self.fine.is_empty() {
            let mut r = k;
            for w in 0.. {
                let c = words.get(w).count_ones() as usize;
                if r <= c {
                    return w * WORD + select_in_word(words.get(w), (r - 1) as u32);
                }
                r -= c;
            }
        }
        let s = (k - 1) / SAMPLE_RATE;
        let mut lo = if s == 0 {
            0
        } else {
            self.samples[s - 1] as usize
        };
        let mut hi = match self.samples.get(s) {
            Some(&b) => b as usize,
            None => self.coarse.len() - 1,
        };
        // last block that starts with fewer than k ones before it
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if (self.coarse[mid] as usize) < k {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let b = lo;
        let mut r = k - self.coarse[b] as usize;
        let nw = self.len.div_ceil(WORD);
        let mut t = 0;
        while t + 1 < BLOCK_WORDS && b * BLOCK_WORDS + t + 1 < nw && self.relative(b, t + 1) < r {
            t += 1;
        }
        r -= self.relative(b, t);
        let w = b * BLOCK_WORDS + t;
        w * WORD + select_in_word(words.get(w), (r - 1) as u32)
    }
}

/// Offset of the one bit of rank `r` (0-based) inside `w`.
#[inline]
fn select_in_word(mut w: u64, mut r: u32) -> usize {
    let mut base = 0;
    loop {
        let c = (w & 0xff).count_ones();
        if r < c {
            break;
        }
        r -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..r {
        w &= w - 1;
    }
    base + w.trailing_zeros() as usize
}

/// Rank/select queries with 1-based positions.
pub trait RankSelect {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn count_ones(&self) -> usize;

    /// Bit at 1-based position `i`.
    fn get(&self, i: usize) -> bool;

    /// Number of ones in positions `1..=k`.
    fn rank(&self, k: usize) -> Result<usize, SuccinctError>;

    /// Position of the `k`-th one.
    fn select(&self, k: usize) -> Result<usize, SuccinctError>;

    fn to_bit_string(&self) -> String {
        (1..=self.len())
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

/// An immutable bit string with its rank/select index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    words: Vec<u64>,
    index: Index,
}

impl BitVector {
    /// Takes `len` bits from `words`; bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(WORD), 0);
        if !len.is_multiple_of(WORD) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % WORD)) - 1;
        }
        let index = Index::build(
            len,
            Words {
                words: &words,
                stride: 1,
                offset: 0,
            },
        );
        Self { words, index }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    /// Parses a string of '0' and '1'.
    pub fn parse(bits: &str) -> Option<Self> {
        let parsed: Option<Vec<bool>> = bits
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        parsed.map(Self::from_bits)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn metadata_bits(&self) -> usize {
        self.index.metadata_bits()
    }

    fn view(&self) -> BitView<'_> {
        BitView {
            words: Words {
                words: &self.words,
                stride: 1,
                offset: 0,
            },
            index: &self.index,
        }
    }
}

impl RankSelect for BitVector {
    fn len(&self) -> usize {
        self.index.len()
    }

    fn count_ones(&self) -> usize {
        self.index.ones()
    }

    fn get(&self, i: usize) -> bool {
        self.view().get(i)
    }

    fn rank(&self, k: usize) -> Result<usize, SuccinctError> {
        self.view().rank(k)
    }

    fn select(&self, k: usize) -> Result<usize, SuccinctError> {
        self.view().select(k)
    }
}

/// A bit string stored inside a larger, possibly interleaved, word array.
#[derive(Clone, Copy)]
pub struct BitView<'a> {
    pub(crate) words: Words<'a>,
    pub(crate) index: &'a Index,
}

impl RankSelect for BitView<'_> {
    fn len(&self) -> usize {
        self.index.len()
    }

    fn count_ones(&self) -> usize {
        self.index.ones()
    }

    fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len(), "bit {i} out of range");
        let i = i - 1;
        self.words.get(i / WORD) >> (i % WORD) & 1 == 1
    }

    fn rank(&self, k: usize) -> Result<usize, SuccinctError> {
        if k > self.len() {
            return Err(SuccinctError::OutOfRange {
                index: k,
                len: self.len(),
            });
        }
        Ok(self.index.rank(k, self.words))
    }

    fn select(&self, k: usize) -> Result<usize, SuccinctError> {
        if k == 0 || k > self.count_ones() {
            return Err(SuccinctError::NotEnoughOnes {
                requested: k,
                ones: self.count_ones(),
            });
        }
        Ok(self.index.select(k, self.words) + 1)
    }
}
