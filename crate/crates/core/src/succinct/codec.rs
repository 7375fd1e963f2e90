//! Γ sequences in `O(m)` bits.
//!
//! Reading the sequence as `γ_m, ..., γ_1` (non-increasing, `γ_m ∈ {m-1, m}`),
//! `V` is the concatenation of pieces `s_m, ..., s_1`: `s_m` is the single bit
//! `m - γ_m` and, for `k < m`, `s_k` is `0` when `γ_{k+1} = γ_k` and otherwise
//! `γ_{k+1} - γ_k` one bits. `U` has the length of `V` and marks the last bit
//! of every piece. The ones of `V` up to the end of piece `s_k` sum to
//! `m - γ_k`, so `γ_k = m - rank(V, select(U, m + 1 - k))`.
//!
//! The two strings are stored interleaved word by word, `[v0, u0, v1, u1, ...]`,
//! since every access touches both at nearby positions.

use std::fmt::Write as _;

use super::rank_select::{BitVector, BitView, Index, RankSelect, Words};
use super::SuccinctError;
use crate::gamma::{GammaRead, GammaSeq, Interval};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedGamma {
    m: usize,
    interval: Interval,
    words: Vec<u64>,
    v_index: Index,
    u_index: Index,
}

struct PairBuilder {
    words: Vec<u64>,
    len: usize,
}

impl PairBuilder {
    fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(2 * bits.div_ceil(64)),
            len: 0,
        }
    }

    #[inline]
    fn push(&mut self, v: bool, u: bool) {
        if self.len.is_multiple_of(64) {
            self.words.extend([0, 0]);
        }
        let w = 2 * (self.len / 64);
        let bit = self.len % 64;
        self.words[w] |= u64::from(v) << bit;
        self.words[w + 1] |= u64::from(u) << bit;
        self.len += 1;
    }

    fn finish(self, m: usize, interval: Interval) -> CompressedGamma {
        let v_index = Index::build(
            self.len,
            Words {
                words: &self.words,
                stride: 2,
                offset: 0,
            },
        );
        let u_index = Index::build(
            self.len,
            Words {
                words: &self.words,
                stride: 2,
                offset: 1,
            },
        );
        CompressedGamma {
            m,
            interval,
            words: self.words,
            v_index,
            u_index,
        }
    }
}

/// Compresses a Γ sequence; fails if it is not monotone.
pub fn encode(g: &GammaSeq) -> Result<CompressedGamma, SuccinctError> {
    g.check().map_err(SuccinctError::InvalidSequence)?;
    let m = g.pattern_len();
    let mut out = PairBuilder::with_capacity(2 * m + 1);
    if m > 0 {
        out.push(m - g.get(m) == 1, true);
    }
    for k in (1..m).rev() {
        let d = g.get(k + 1) - g.get(k);
        if d == 0 {
            out.push(false, true);
        } else {
            for t in 1..=d {
                out.push(true, t == d);
            }
        }
    }
    let c = out.finish(m, g.interval());
    debug_assert!(c.len() <= 2 * m + 1);
    debug_assert!(c.v().count_ones() <= m + 1);
    debug_assert_eq!(c.u().count_ones(), m);
    Ok(c)
}

/// Decompresses with a single scan over `V` and `U`.
pub fn decode(c: &CompressedGamma) -> Result<GammaSeq, SuccinctError> {
    let m = c.m;
    let (v, u) = (c.v(), c.u());
    let mut values = vec![0u32; m];
    let mut k = m;
    let mut ones = 0usize;
    let mut piece_len = 0usize;
    let mut piece_has_zero = false;
    for i in 1..=c.len() {
        let bit = v.get(i);
        piece_len += 1;
        if bit {
            ones += 1;
        } else {
            piece_has_zero = true;
        }
        if !u.get(i) {
            continue;
        }
        let malformed =
            k == 0 || (piece_has_zero && piece_len > 1) || (k == m && piece_len != 1) || ones > m;
        if malformed {
            return Err(SuccinctError::MalformedEncoding { position: i });
        }
        values[k - 1] = (m - ones) as u32;
        k -= 1;
        piece_len = 0;
        piece_has_zero = false;
    }
    if k != 0 || piece_len != 0 {
        return Err(SuccinctError::MalformedEncoding { position: c.len() });
    }
    GammaSeq::new(c.interval, values).map_err(SuccinctError::InvalidSequence)
}

/// `γ_k` via one select on `U` and one rank on `V`.
pub fn access(c: &CompressedGamma, k: usize) -> Result<usize, SuccinctError> {
    if k == 0 || k > c.m {
        return Err(SuccinctError::OutOfRange { index: k, len: c.m });
    }
    Ok(c.access_unchecked(k))
}

impl CompressedGamma {
    /// Assembles a compressed sequence from explicit `V` and `U` strings.
    pub fn from_parts(
        m: usize,
        interval: Interval,
        v: &BitVector,
        u: &BitVector,
    ) -> Result<Self, SuccinctError> {
        if v.len() != u.len() {
            return Err(SuccinctError::LengthMismatch(v.len(), u.len()));
        }
        if u.count_ones() != m {
            return Err(SuccinctError::MalformedEncoding { position: u.len() });
        }
        let mut out = PairBuilder::with_capacity(v.len());
        for i in 1..=v.len() {
            out.push(v.get(i), u.get(i));
        }
        Ok(out.finish(m, interval))
    }

    pub fn pattern_len(&self) -> usize {
        self.m
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// `|V| = |U|`.
    pub fn len(&self) -> usize {
        self.v_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn v(&self) -> BitView<'_> {
        BitView {
            words: Words {
                words: &self.words,
                stride: 2,
                offset: 0,
            },
            index: &self.v_index,
        }
    }

    pub fn u(&self) -> BitView<'_> {
        BitView {
            words: Words {
                words: &self.words,
                stride: 2,
                offset: 1,
            },
            index: &self.u_index,
        }
    }

    #[inline]
    fn access_unchecked(&self, k: usize) -> usize {
        let words = &self.words;
        let end = self.u_index.select(
            self.m + 1 - k,
            Words {
                words,
                stride: 2,
                offset: 1,
            },
        );
        let d = self.v_index.rank(
            end + 1,
            Words {
                words,
                stride: 2,
                offset: 0,
            },
        );
        self.m - d
    }

    /// Payload bits of `V` and `U` plus their rank/select metadata.
    pub fn size_in_bits(&self) -> usize {
        2 * self.len() + self.v_index.metadata_bits() + self.u_index.metadata_bits()
    }

    /// Bit strings and hex words of `V` and `U`, for inspection.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "interval {} m={} |V|={}",
            self.interval,
            self.m,
            self.len()
        );
        for (name, view) in [("V", self.v()), ("U", self.u())] {
            let _ = writeln!(out, "{name} bits {}", view.to_bit_string());
            let hex: Vec<String> = (0..self.len().div_ceil(64))
                .map(|w| format!("{:016x}", view.words.words[2 * w + view.words.offset]))
                .collect();
            let _ = writeln!(out, "{name} words {}", hex.join(" "));
        }
        out
    }
}

impl GammaRead for CompressedGamma {
    fn pattern_len(&self) -> usize {
        self.m
    }

    fn interval(&self) -> Interval {
        self.interval
    }

    #[inline]
    fn get(&self, j: usize) -> usize {
        if j > self.m {
            self.m
        } else {
            self.access_unchecked(j)
        }
    }
}
