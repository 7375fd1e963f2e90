//! Γ sequences and the four primitive operations on them.
//!
//! For an interval `[i1, i2]` of the text `Q`, the Γ sequence holds, for every
//! suffix start `j` of the pattern `P`, the largest `k` such that `P[j, k]` is
//! an arc-preserving subsequence of `Q[i1, i2]` and `k` splits `P[j, m]`
//! without cutting an arc. Entries are addressed by `j` in `1..=m`; `get(m+1)`
//! is the implicit sentinel `m`.
//!
//! The primitives build Γ for larger intervals from smaller ones:
//!
//! * [`init_single`]: a single text position,
//! * [`extend`]: grow to the left by a position that opens no arc inside,
//! * [`combine`]: concatenate across an arc-preserving split of the text,
//! * [`meld`]: close an interval whose endpoints form an arc.
//!
//! Every primitive runs in `O(m)` time.

use std::fmt;

use thiserror::Error;

use crate::arcstr::ArcAnnotatedString;

const NONE: u32 = 0;
// Never equal to a `char` code.
const NO_MATCH: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("precondition violated at position {position}: {reason}")]
    PreconditionViolated {
        position: usize,
        reason: &'static str,
    },
    #[error("interval mismatch: expected {expected}, found {found}")]
    IntervalMismatch { expected: Interval, found: Interval },
    #[error("operands have pattern lengths {0} and {1}")]
    PatternLengthMismatch(usize, usize),
    #[error("not a valid Γ sequence: entry {index} = {value} violates monotonicity")]
    InvalidSequence { index: usize, value: usize },
}

/// A closed interval `[start, end]` of text positions; `start == end + 1`
/// encodes the empty interval that begins at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(
            start >= 1 && start <= end + 1,
            "bad interval [{start}, {end}]"
        );
        Self { start, end }
    }

    pub fn empty_at(start: usize) -> Self {
        Self::new(start, start - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Read access to a Γ sequence, compressed or not.
pub trait GammaRead {
    /// Length `m` of the pattern.
    fn pattern_len(&self) -> usize;

    fn interval(&self) -> Interval;

    /// `γ(j, m, i1, i2)` for `1 <= j <= m + 1`.
    fn get(&self, j: usize) -> usize;
}

/// Per-pattern lookup tables shared by all primitives.
#[derive(Debug, Clone)]
pub struct PatternContext<'p> {
    pattern: &'p ArcAnnotatedString,
    // right[j - 1] = jr if (j, jr) is an arc of P, else NONE
    right: Vec<u32>,
    // code[j - 1] = P[j] as u32, or NO_MATCH where j opens an arc: such a
    // position can never be matched by a single unpaired text base.
    code: Vec<u32>,
}

impl<'p> PatternContext<'p> {
    pub fn new(pattern: &'p ArcAnnotatedString) -> Self {
        let m = pattern.len();
        let mut right = vec![NONE; m];
        let mut code = vec![NO_MATCH; m];
        for j in 1..=m {
            match pattern.right_partner(j) {
                Some(r) => right[j - 1] = r as u32,
                None => code[j - 1] = pattern.base(j) as u32,
            }
        }
        Self {
            pattern,
            right,
            code,
        }
    }

    pub fn pattern(&self) -> &'p ArcAnnotatedString {
        self.pattern
    }

    pub fn len(&self) -> usize {
        self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right.is_empty()
    }

    /// Right endpoint of the pattern arc opened at `j`.
    #[inline]
    pub fn right_partner(&self, j: usize) -> Option<usize> {
        match self.right[j - 1] {
            NONE => None,
            r => Some(r as usize),
        }
    }
}

/// An uncompressed Γ sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GammaSeq {
    interval: Interval,
    values: Vec<u32>,
}

impl GammaSeq {
    /// Wraps `values[j - 1] = γ(j, m, ...)`, rejecting sequences that break
    /// `j - 1 <= γ_j <= γ_{j+1} <= m`.
    pub fn new(interval: Interval, values: Vec<u32>) -> Result<Self, GammaError> {
        let g = Self { interval, values };
        g.check()?;
        Ok(g)
    }

    #[cfg(test)]
    pub(crate) fn from_raw(interval: Interval, values: Vec<u32>) -> Self {
        Self { interval, values }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// Verifies the monotonicity invariant.
    pub fn check(&self) -> Result<(), GammaError> {
        let m = self.values.len();
        for (k, &v) in self.values.iter().enumerate() {
            let next = self.values.get(k + 1).map_or(m, |&n| n as usize);
            let v = v as usize;
            if v < k || v > next {
                return Err(GammaError::InvalidSequence {
                    index: k + 1,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

impl GammaRead for GammaSeq {
    fn pattern_len(&self) -> usize {
        self.values.len()
    }

    fn interval(&self) -> Interval {
        self.interval
    }

    #[inline]
    fn get(&self, j: usize) -> usize {
        match self.values.get(j - 1) {
            Some(&v) => v as usize,
            None => {
                debug_assert_eq!(j, self.values.len() + 1);
                self.values.len()
            }
        }
    }
}

impl fmt::Debug for GammaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ{}{:?}", self.interval, self.values)
    }
}

/// Γ of the empty interval starting at `start`: nothing embeds, so
/// `γ_j = j - 1`.
pub fn init_empty(m: usize, start: usize) -> GammaSeq {
    GammaSeq {
        interval: Interval::empty_at(start),
        values: (0..m as u32).collect(),
    }
}

/// Γ(i, i).
pub fn init_single(ctx: &PatternContext<'_>, q: &ArcAnnotatedString, i: usize) -> GammaSeq {
    let c = q.base(i) as u32;
    let values = ctx
        .code
        .iter()
        .enumerate()
        .map(|(k, &code)| if code == c { k as u32 + 1 } else { k as u32 })
        .collect();
    GammaSeq {
        interval: Interval::new(i, i),
        values,
    }
}

/// Γ(i1, i2) from Γ(i1 + 1, i2), reusing the operand's storage.
pub fn extend_in_place(
    ctx: &PatternContext<'_>,
    q: &ArcAnnotatedString,
    g: &mut GammaSeq,
    i1: usize,
) -> Result<(), GammaError> {
    check_len(ctx.len(), g.values.len())?;
    if g.interval.start != i1 + 1 {
        return Err(GammaError::IntervalMismatch {
            expected: Interval {
                start: i1 + 1,
                end: g.interval.end,
            },
            found: g.interval,
        });
    }
    if q.right_partner(i1).is_some_and(|r| r <= g.interval.end) {
        return Err(GammaError::PreconditionViolated {
            position: i1,
            reason: "position opens an arc inside the interval",
        });
    }
    let c = q.base(i1) as u32;
    let m = g.values.len();
    // Ascending order reads values[k + 1] before it is overwritten.
    for k in 0..m {
        if ctx.code[k] == c {
            g.values[k] = if k + 1 < m { g.values[k + 1] } else { m as u32 };
        }
    }
    g.interval.start = i1;
    debug_assert!(g.check().is_ok(), "{g:?}");
    Ok(())
}

/// Γ(i1, i2) from Γ(i1 + 1, i2).
pub fn extend(
    ctx: &PatternContext<'_>,
    q: &ArcAnnotatedString,
    g: &GammaSeq,
    i1: usize,
) -> Result<GammaSeq, GammaError> {
    let mut out = g.clone();
    extend_in_place(ctx, q, &mut out, i1)?;
    Ok(out)
}

/// Γ(i1, i2) from Γ(i1, i) and Γ(i + 1, i2), where `i` induces an
/// arc-preserving split of `Q[i1, i2]` (typically `(i1, i)` is an arc).
pub fn combine<L: GammaRead, R: GammaRead>(left: &L, right: &R) -> Result<GammaSeq, GammaError> {
    let m = left.pattern_len();
    check_len(m, right.pattern_len())?;
    let (li, ri) = (left.interval(), right.interval());
    if li.end + 1 != ri.start {
        return Err(GammaError::IntervalMismatch {
            expected: Interval {
                start: li.end + 1,
                end: ri.end,
            },
            found: ri,
        });
    }
    let values = (1..=m).map(|j| right.get(left.get(j) + 1) as u32).collect();
    let out = GammaSeq {
        interval: Interval::new(li.start, ri.end),
        values,
    };
    debug_assert!(out.check().is_ok(), "{out:?}");
    Ok(out)
}

/// Γ(i1, i2) for an arc `(i1, i2)` of the text, from
/// `outer_right` = Γ(i1 + 1, i2), `outer_left` = Γ(i1, i2 - 1) and
/// `inside` = Γ(i1 + 1, i2 - 1).
pub fn meld<A: GammaRead, B: GammaRead, C: GammaRead>(
    ctx: &PatternContext<'_>,
    q: &ArcAnnotatedString,
    outer_right: &A,
    outer_left: &B,
    inside: &C,
) -> Result<GammaSeq, GammaError> {
    let m = ctx.len();
    for len in [
        outer_right.pattern_len(),
        outer_left.pattern_len(),
        inside.pattern_len(),
    ] {
        check_len(m, len)?;
    }
    let a = outer_right.interval();
    if a.start < 2 {
        return Err(GammaError::PreconditionViolated {
            position: 0,
            reason: "meld interval is not an arc of the text",
        });
    }
    let (i1, i2) = (a.start - 1, a.end);
    for (expected, found) in [
        (Interval::new(i1, i2 - 1), outer_left.interval()),
        (Interval::new(i1 + 1, i2 - 1), inside.interval()),
    ] {
        if expected != found {
            return Err(GammaError::IntervalMismatch { expected, found });
        }
    }
    if !q.has_arc(i1, i2) {
        return Err(GammaError::PreconditionViolated {
            position: i1,
            reason: "meld interval is not an arc of the text",
        });
    }
    let (open, close) = (q.base(i1), q.base(i2));
    let p = ctx.pattern();
    let values = (1..=m)
        .map(|j| {
            let skip_open = outer_right.get(j);
            let v = match ctx.right_partner(j) {
                // P[j] is unpaired: use the text arc's left base or its right
                // base, never both.
                None => skip_open.max(outer_left.get(j)),
                Some(jr) if p.base(j) != open || p.base(jr) != close => skip_open,
                Some(jr) => {
                    // The arcs can be matched iff P[j+1, jr-1] embeds inside.
                    let fits = inside.get(j + 1) + 1 >= jr;
                    let fits = if cfg!(feature = "mutate-phi") {
                        !fits
                    } else {
                        fits
                    };
                    let phi = if fits { jr } else { j - 1 };
                    phi.max(skip_open)
                }
            };
            v as u32
        })
        .collect();
    let out = GammaSeq {
        interval: Interval::new(i1, i2),
        values,
    };
    debug_assert!(out.check().is_ok(), "{out:?}");
    Ok(out)
}

fn check_len(expected: usize, found: usize) -> Result<(), GammaError> {
    if expected != found {
        return Err(GammaError::PatternLengthMismatch(expected, found));
    }
    Ok(())
}
