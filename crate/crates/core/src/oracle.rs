//! Reference implementations used as ground truth in tests.
//!
//! [`embed_exists`] searches for an embedding by backtracking, [`gamma_def`]
//! evaluates γ straight from its definition on top of it, and [`Recurrence`]
//! evaluates the recurrence top-down with a memo table. None of them share
//! code with [`crate::gamma`] or [`crate::engine`].

use std::collections::HashMap;

use thiserror::Error;

use crate::arcstr::{ArcAnnotatedString, View};

/// Largest text the backtracking search accepts.
pub const DEFAULT_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("text of length {len} exceeds the oracle cap of {cap}")]
    InstanceTooLarge { len: usize, cap: usize },
}

/// An order-preserving map from pattern positions to text positions, both
/// 1-based and local to the views it was found for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    /// Image of pattern position `j`.
    pub fn image(&self, j: usize) -> usize {
        self.map[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Checks base match, two-sided arc match and order.
    pub fn is_valid(&self, p: View<'_>, q: View<'_>) -> bool {
        if self.map.len() != p.len() || self.map.iter().any(|&i| i == 0 || i > q.len()) {
            return false;
        }
        let ordered = self.map.windows(2).all(|w| w[0] < w[1]);
        let bases = (1..=p.len()).all(|j| p.base(j) == q.base(self.image(j)));
        let arcs = (1..=p.len()).all(|a| {
            (a + 1..=p.len()).all(|b| {
                let in_p = p.partner(a) == Some(b);
                let in_q = q.partner(self.image(a)) == Some(self.image(b));
                in_p == in_q
            })
        });
        ordered && bases && arcs
    }
}

/// Finds an embedding of `p` in `q` if one exists.
pub fn embed_exists(p: View<'_>, q: View<'_>) -> Result<Option<Embedding>, OracleError> {
    embed_exists_with_cap(p, q, DEFAULT_CAP)
}

pub fn embed_exists_with_cap(
    p: View<'_>,
    q: View<'_>,
    cap: usize,
) -> Result<Option<Embedding>, OracleError> {
    if q.len() > cap {
        return Err(OracleError::InstanceTooLarge { len: q.len(), cap });
    }
    if p.len() > q.len() {
        return Ok(None);
    }
    let mut search = Search {
        p,
        q,
        map: Vec::with_capacity(p.len()),
    };
    Ok(search.run(1).then_some(Embedding { map: search.map }))
}

struct Search<'a> {
    p: View<'a>,
    q: View<'a>,
    map: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, j: usize) -> bool {
        let (m, n) = (self.p.len(), self.q.len());
        if j > m {
            return true;
        }
        let from = self.map.last().map_or(1, |&i| i + 1);
        // leave room for the rest of the pattern
        for i in from..=n + j - m {
            if self.fits(j, i) {
                self.map.push(i);
                if self.run(j + 1) {
                    return true;
                }
                self.map.pop();
            }
        }
        false
    }

    /// Whether `j -> i` is consistent with the assignments made so far.
    /// Arc pairs are checked when their later endpoint is assigned.
    fn fits(&self, j: usize, i: usize) -> bool {
        if self.p.base(j) != self.q.base(i) {
            return false;
        }
        let (pp, qp) = (self.p.partner(j), self.q.partner(i));
        // the earlier pattern position whose image is joined to i by an arc
        let q_back = qp
            .filter(|&x| x < i)
            .and_then(|x| self.map.binary_search(&x).ok().map(|a| a + 1));
        let p_back = pp.filter(|&a| a < j);
        if p_back != q_back {
            return false;
        }
        // an opening arc needs an opening arc with at least as much room
        match (pp.filter(|&b| b > j), qp.filter(|&x| x > i)) {
            (Some(b), Some(x)) => x - i >= b - j,
            (Some(_), None) => false,
            _ => true,
        }
    }
}

/// True iff no arc of `p[j1, j2]` has its left end in `[j1, k]` and its right
/// end in `[k + 1, j2]`.
fn splits(p: &ArcAnnotatedString, j1: usize, j2: usize, k: usize) -> bool {
    p.view(j1, j2).is_arc_preserving_split(k + 1 - j1)
}

/// γ by definition: the largest `k` in `[j1 - 1, j2]` that induces an
/// arc-preserving split of `p[j1, j2]` with `p[j1, k]` embeddable in
/// `q[i1, i2]`. An empty text interval is written `i1 = i2 + 1`.
pub fn gamma_def(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    j1: usize,
    j2: usize,
    i1: usize,
    i2: usize,
) -> Result<usize, OracleError> {
    assert!(
        j1 >= 1 && j2 <= p.len() && j1 <= j2 + 1,
        "bad pattern range"
    );
    assert!(i1 >= 1 && i2 <= q.len() && i1 <= i2 + 1, "bad text range");
    let text = q.view(i1, i2);
    for k in (j1..=j2).rev() {
        if splits(p, j1, j2, k) && embed_exists(p.view(j1, k), text)?.is_some() {
            return Ok(k);
        }
    }
    Ok(j1 - 1)
}

/// `[γ(j, m, i1, i2) for j in 1..=m]` by definition.
pub fn gamma_sequence_def(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    i1: usize,
    i2: usize,
) -> Result<Vec<usize>, OracleError> {
    (1..=p.len())
        .map(|j| gamma_def(p, q, j, p.len(), i1, i2))
        .collect()
}

/// Top-down evaluation of the recurrence with memoization.
///
/// Recursion depth grows with `n + m`; large instances need a thread with a
/// generous stack.
pub struct Recurrence<'a> {
    p: &'a ArcAnnotatedString,
    q: &'a ArcAnnotatedString,
    memo: HashMap<(u32, u32, u32, u32), u32>,
}

impl<'a> Recurrence<'a> {
    pub fn new(p: &'a ArcAnnotatedString, q: &'a ArcAnnotatedString) -> Self {
        Self {
            p,
            q,
            memo: HashMap::new(),
        }
    }

    /// Right end of the arc opened at `j1` in `p[j1, j2]`.
    fn p_open(&self, j1: usize, j2: usize) -> Option<usize> {
        self.p.partner(j1).filter(|&r| r > j1 && r <= j2)
    }

    fn q_open(&self, i1: usize, i2: usize) -> Option<usize> {
        self.q.partner(i1).filter(|&r| r > i1 && r <= i2)
    }

    /// γ(j1, j2, i1, i2); an empty text interval is written `i1 = i2 + 1`.
    pub fn gamma(&mut self, j1: usize, j2: usize, i1: usize, i2: usize) -> usize {
        if j1 > j2 {
            return j1 - 1;
        }
        if i1 > i2 {
            return j1 - 1;
        }
        let key = (j1 as u32, j2 as u32, i1 as u32, i2 as u32);
        if let Some(&v) = self.memo.get(&key) {
            return v as usize;
        }
        let v = self.eval(j1, j2, i1, i2);
        self.memo.insert(key, v as u32);
        v
    }

    fn eval(&mut self, j1: usize, j2: usize, i1: usize, i2: usize) -> usize {
        let (p, q) = (self.p, self.q);
        let p_arc = self.p_open(j1, j2);
        let same = p.base(j1) == q.base(i1);
        if i1 == i2 {
            return if same && p_arc.is_none() { j1 } else { j1 - 1 };
        }
        match self.q_open(i1, i2) {
            None => {
                if same && p_arc.is_none() {
                    self.gamma(j1 + 1, j2, i1 + 1, i2)
                } else {
                    self.gamma(j1, j2, i1 + 1, i2)
                }
            }
            Some(ir) if ir < i2 => {
                let mid = self.gamma(j1, j2, i1, ir);
                self.gamma(mid + 1, j2, ir + 1, i2)
            }
            Some(_) => match p_arc {
                None => {
                    let a = self.gamma(j1, j2, i1 + 1, i2);
                    let b = self.gamma(j1, j2, i1, i2 - 1);
                    a.max(b)
                }
                Some(jr) if !same || p.base(jr) != q.base(i2) => self.gamma(j1, j2, i1 + 1, i2),
                Some(jr) => {
                    let phi = if self.gamma(j1 + 1, jr - 1, i1 + 1, i2 - 1) == jr - 1 {
                        jr
                    } else {
                        j1 - 1
                    };
                    phi.max(self.gamma(j1, j2, i1 + 1, i2))
                }
            },
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// γ(j1, j2, i1, i2) by the recurrence, with a fresh memo table.
pub fn gamma_rec(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    j1: usize,
    j2: usize,
    i1: usize,
    i2: usize,
) -> usize {
    assert!(
        j1 >= 1 && j2 <= p.len() && j1 <= j2 + 1,
        "bad pattern range"
    );
    assert!(i1 >= 1 && i2 <= q.len() && i1 <= i2 + 1, "bad text range");
    Recurrence::new(p, q).gamma(j1, j2, i1, i2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(bases: &str, structure: &str) -> ArcAnnotatedString {
        ArcAnnotatedString::parse_dotbracket(bases, structure).unwrap()
    }

    fn fig() -> (ArcAnnotatedString, ArcAnnotatedString) {
        (s("CAAUCUGCG", "(.(.).())"), s("CAGGAUCUGCG", "(.(.(.))())"))
    }

    #[test]
    fn figure_instance_has_witness() {
        let (p, q) = fig();
        let f = embed_exists(p.as_view(), q.as_view()).unwrap().unwrap();
        assert!(f.is_valid(p.as_view(), q.as_view()));
        assert_eq!(f.image(1), 1);
        assert_eq!(f.image(2), 2);
        for j in 3..=9 {
            assert_eq!(f.image(j), j + 2);
        }
    }

    #[test]
    fn unpaired_pattern_against_paired_text() {
        let (p, q) = (s("AU", ".."), s("AU", "()"));
        assert_eq!(embed_exists(p.as_view(), q.as_view()).unwrap(), None);
        assert_eq!(gamma_def(&p, &q, 1, 2, 1, 2).unwrap(), 1);
        assert_eq!(gamma_rec(&p, &q, 1, 2, 1, 2), 1);
    }

    #[test]
    fn identity_embeds() {
        let (p, _) = fig();
        let f = embed_exists(p.as_view(), p.as_view()).unwrap().unwrap();
        assert_eq!(f.as_slice(), &(1..=9).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn cap_is_enforced() {
        let q = s(&"A".repeat(25), &".".repeat(25));
        let p = s("A", ".");
        assert_eq!(
            embed_exists(p.as_view(), q.as_view()),
            Err(OracleError::InstanceTooLarge { len: 25, cap: 24 })
        );
        assert!(embed_exists_with_cap(p.as_view(), q.as_view(), 30)
            .unwrap()
            .is_some());
    }

    #[test]
    fn gamma_examples() {
        let p = s("GAU", "(.)");
        let q = s("GCAU", "(..)");
        assert_eq!(gamma_def(&p, &q, 1, 3, 1, 4).unwrap(), 3);
        assert_eq!(gamma_rec(&p, &q, 1, 3, 1, 4), 3);
        // empty pattern range
        assert_eq!(gamma_def(&p, &q, 3, 2, 1, 4).unwrap(), 2);
        assert_eq!(gamma_rec(&p, &q, 3, 2, 1, 4), 2);
        // single text base matching an unpaired pattern base
        let p = s("GA", "..");
        let q = s("AG", "..");
        assert_eq!(gamma_def(&p, &q, 2, 2, 1, 1).unwrap(), 2);
        assert_eq!(gamma_rec(&p, &q, 2, 2, 1, 1), 2);
    }

    #[test]
    fn split_case_composes() {
        // (i1, ir) with ir < i2
        let q = s("GAUCAG", "(..)..");
        let p = s("GAUCG", "(..).");
        let mut rec = Recurrence::new(&p, &q);
        let whole = rec.gamma(1, 5, 1, 6);
        let mid = rec.gamma(1, 5, 1, 4);
        assert_eq!(mid, 4);
        assert_eq!(whole, rec.gamma(mid + 1, 5, 5, 6));
        assert_eq!(whole, 5);
        assert_eq!(whole, gamma_def(&p, &q, 1, 5, 1, 6).unwrap());
    }

    #[test]
    fn arc_with_unpaired_head_takes_max() {
        let q = s("AGCU", "(..)");
        let p = s("GC", "..");
        let mut rec = Recurrence::new(&p, &q);
        let a = rec.gamma(1, 2, 2, 4);
        let b = rec.gamma(1, 2, 1, 3);
        assert_eq!(rec.gamma(1, 2, 1, 4), a.max(b));
        assert_eq!(rec.gamma(1, 2, 1, 4), 2);
    }

    #[test]
    fn witness_validation_rejects_bad_maps() {
        let (p, q) = (s("AU", "()"), s("AAU", ".()"));
        let good = Embedding { map: vec![2, 3] };
        assert!(good.is_valid(p.as_view(), q.as_view()));
        let bad = Embedding { map: vec![1, 3] };
        assert!(!bad.is_valid(p.as_view(), q.as_view()));
    }
}
