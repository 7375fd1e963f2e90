//! Seeded random instances for tests, fuzzing and benchmarks.
//!
//! Arc sets are drawn as uniformly random Dyck words (cycle lemma) with
//! unpaired positions interleaved at random, which yields deep chains and
//! wide fans alike in linear time.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arcstr::ArcAnnotatedString;

pub const RNA: &str = "ACGU";

pub struct Generator {
    rng: ChaCha8Rng,
    alphabet: Vec<char>,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self::with_alphabet(seed, RNA)
    }

    pub fn with_alphabet(seed: u64, alphabet: &str) -> Self {
        assert!(!alphabet.is_empty(), "alphabet must not be empty");
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            alphabet: alphabet.chars().collect(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A nested arc set on `len` positions with exactly `pairs` arcs.
    pub fn arcs(&mut self, len: usize, pairs: usize) -> Vec<(usize, usize)> {
        assert!(
            2 * pairs <= len,
            "{pairs} arcs do not fit in {len} positions"
        );
        let dyck = self.dyck(pairs);
        let mut paired: Vec<bool> = (0..len).map(|i| i < 2 * pairs).collect();
        paired.shuffle(&mut self.rng);
        let mut arcs = Vec::with_capacity(pairs);
        let mut open = Vec::new();
        let mut steps = dyck.into_iter();
        for (pos, p) in (1..=len).zip(paired) {
            if !p {
                continue;
            }
            if steps.next() == Some(true) {
                open.push(pos);
            } else {
                let l = open.pop().expect("balanced word");
                arcs.push((l, pos));
            }
        }
        arcs
    }

    /// A uniformly random balanced word with `pairs` opens (`true`).
    fn dyck(&mut self, pairs: usize) -> Vec<bool> {
        // k opens and k + 1 closes; exactly one rotation starting after the
        // first minimum prefix has all proper prefixes non-negative.
        let mut w: Vec<bool> = (0..2 * pairs + 1).map(|i| i < pairs).collect();
        w.shuffle(&mut self.rng);
        let (mut sum, mut min, mut at) = (0i64, 0i64, 0usize);
        for (i, &b) in w.iter().enumerate() {
            sum += if b { 1 } else { -1 };
            if sum < min {
                min = sum;
                at = i + 1;
            }
        }
        let len = w.len();
        w.rotate_left(at % len);
        w.pop();
        w
    }

    pub fn bases(&mut self, len: usize) -> Vec<char> {
        (0..len)
            .map(|_| self.alphabet[self.rng.gen_range(0..self.alphabet.len())])
            .collect()
    }

    /// A random string in which about `paired` of the positions carry arcs.
    pub fn string(&mut self, len: usize, paired: f64) -> ArcAnnotatedString {
        let pairs = ((len as f64 * paired.clamp(0.0, 1.0)) / 2.0).round() as usize;
        self.string_with_arcs(len, pairs.min(len / 2))
    }

    pub fn string_with_arcs(&mut self, len: usize, pairs: usize) -> ArcAnnotatedString {
        let arcs = self.arcs(len, pairs);
        let bases = self.bases(len);
        ArcAnnotatedString::from_trusted(bases, &arcs)
    }

    /// Keeps `m` random positions of `q` together with the arcs between
    /// them, so the result is an arc-preserving subsequence of `q`.
    pub fn subsequence(&mut self, q: &ArcAnnotatedString, m: usize) -> ArcAnnotatedString {
        let m = m.min(q.len());
        let mut keep: Vec<usize> = rand::seq::index::sample(&mut self.rng, q.len(), m)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        keep.sort_unstable();
        let local = |i: usize| keep.binary_search(&i).ok().map(|k| k + 1);
        let arcs: Vec<_> = q
            .arcs()
            .filter_map(|(l, r)| Some((local(l)?, local(r)?)))
            .collect();
        let bases = keep.iter().map(|&i| q.base(i)).collect();
        ArcAnnotatedString::from_trusted(bases, &arcs)
    }

    /// Changes one base, drops one arc, or adds one arc where nesting allows.
    pub fn mutate(&mut self, p: &ArcAnnotatedString) -> ArcAnnotatedString {
        if p.is_empty() {
            return p.clone();
        }
        let mut bases = p.bases().to_vec();
        let mut arcs: Vec<_> = p.arcs().collect();
        match self.rng.gen_range(0..3) {
            0 => {
                let i = self.rng.gen_range(0..bases.len());
                bases[i] = self.alphabet[self.rng.gen_range(0..self.alphabet.len())];
            }
            1 if !arcs.is_empty() => {
                let k = self.rng.gen_range(0..arcs.len());
                arcs.remove(k);
            }
            _ => {
                let l = self.rng.gen_range(1..=bases.len());
                let r = self.rng.gen_range(1..=bases.len());
                let (l, r) = (l.min(r), l.max(r));
                let mut with = arcs.clone();
                with.push((l, r));
                let s: String = bases.iter().collect();
                if l < r && ArcAnnotatedString::validate(&s, &with).is_ok() {
                    arcs = with;
                }
            }
        }
        ArcAnnotatedString::from_trusted(bases, &arcs)
    }

    /// A pattern/text pair with `|P| <= max_m` and `|Q| <= max_n`. About half
    /// the patterns are drawn from the text, some of them then mutated, so
    /// both answers occur often.
    pub fn instance(
        &mut self,
        max_m: usize,
        max_n: usize,
    ) -> (ArcAnnotatedString, ArcAnnotatedString) {
        let n = self.rng.gen_range(0..=max_n);
        let density = self.rng.gen_range(0.0..=1.0);
        let q = self.string(n, density);
        let m = self.rng.gen_range(0..=max_m);
        let p = match self.rng.gen_range(0..4) {
            0 | 1 if m <= n => self.subsequence(&q, m),
            2 if m <= n => {
                let p = self.subsequence(&q, m);
                self.mutate(&p)
            }
            _ => {
                let density = self.rng.gen_range(0.0..=1.0);
                self.string(m, density)
            }
        };
        (p, q)
    }
}
