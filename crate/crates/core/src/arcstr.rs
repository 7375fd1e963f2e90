//! Nested arc-annotated strings.
//!
//! Positions are 1-indexed in every public method. An arc `(l, r)` always has
//! `l < r`; arcs never share an endpoint and never cross, so the arc set of a
//! string forms a forest under containment.

use std::borrow::Cow;
use std::fmt;

use thiserror::Error;

/// Symbol placed at both ends of a string by [`ArcAnnotatedString::wrap`].
/// It is rejected in user input, so sentinels can only match each other.
pub const SENTINEL: char = '#';

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArcError {
    #[error("sequence line has {bases} symbols but structure line has {structure}")]
    LengthMismatch { bases: usize, structure: usize },
    #[error("unbalanced structure: unmatched {symbol:?} at position {position}")]
    UnbalancedStructure { position: usize, symbol: char },
    #[error("invalid structure character {found:?} at position {position}")]
    InvalidStructureChar { position: usize, found: char },
    #[error("invalid base symbol {found:?} at position {position}")]
    InvalidBase { position: usize, found: char },
    #[error("position {position} is an endpoint of more than one arc")]
    SharedEndpoint { position: usize },
    #[error("arcs ({}, {}) and ({}, {}) cross", .first.0, .first.1, .second.0, .second.1)]
    CrossingArcs {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("arc ({}, {}) lies outside 1..={len}", .arc.0, .arc.1)]
    OutOfRange { arc: (usize, usize), len: usize },
}

/// A base sequence with a nested, endpoint-disjoint arc set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ArcAnnotatedString {
    bases: Vec<char>,
    // 0-based partner table, NONE for unpaired positions.
    partner: Vec<u32>,
}

fn check_base(position: usize, c: char) -> Result<(), ArcError> {
    if matches!(c, '(' | ')' | '.' | SENTINEL) || c.is_whitespace() || c.is_control() {
        return Err(ArcError::InvalidBase { position, found: c });
    }
    Ok(())
}

impl ArcAnnotatedString {
    /// Parses a base line and a dot-bracket structure line of equal length.
    pub fn parse_dotbracket(sequence: &str, structure: &str) -> Result<Self, ArcError> {
        let bases: Vec<char> = sequence.chars().collect();
        let marks: Vec<char> = structure.chars().collect();
        if bases.len() != marks.len() {
            return Err(ArcError::LengthMismatch {
                bases: bases.len(),
                structure: marks.len(),
            });
        }
        for (k, &c) in bases.iter().enumerate() {
            check_base(k + 1, c)?;
        }
        let mut partner = vec![NONE; bases.len()];
        let mut open = Vec::new();
        for (k, &c) in marks.iter().enumerate() {
            match c {
                '(' => open.push(k),
                ')' => {
                    let l = open.pop().ok_or(ArcError::UnbalancedStructure {
                        position: k + 1,
                        symbol: ')',
                    })?;
                    partner[l] = k as u32;
                    partner[k] = l as u32;
                }
                '.' => {}
                found => {
                    return Err(ArcError::InvalidStructureChar {
                        position: k + 1,
                        found,
                    })
                }
            }
        }
        if let Some(&l) = open.first() {
            return Err(ArcError::UnbalancedStructure {
                position: l + 1,
                symbol: '(',
            });
        }
        Ok(Self { bases, partner })
    }

    /// Builds a string from bases and an arbitrary arc list, checking that the
    /// arcs are in range, endpoint-disjoint and non-crossing. Arcs given as
    /// `(r, l)` are normalized to `(l, r)`.
    pub fn validate(bases: &str, arcs: &[(usize, usize)]) -> Result<Self, ArcError> {
        let bases: Vec<char> = bases.chars().collect();
        for (k, &c) in bases.iter().enumerate() {
            check_base(k + 1, c)?;
        }
        Self::from_parts(bases, arcs)
    }

    fn from_parts(bases: Vec<char>, arcs: &[(usize, usize)]) -> Result<Self, ArcError> {
        let len = bases.len();
        let mut partner = vec![NONE; len];
        for &(a, b) in arcs {
            let (l, r) = if a <= b { (a, b) } else { (b, a) };
            if l == 0 || r > len {
                return Err(ArcError::OutOfRange { arc: (l, r), len });
            }
            if l == r {
                return Err(ArcError::SharedEndpoint { position: l });
            }
            for p in [l, r] {
                if partner[p - 1] != NONE {
                    return Err(ArcError::SharedEndpoint { position: p });
                }
            }
            partner[l - 1] = (r - 1) as u32;
            partner[r - 1] = (l - 1) as u32;
        }
        // A stack scan finds crossings: a right endpoint must close the
        // innermost open arc.
        let mut open: Vec<usize> = Vec::new();
        for k in 0..len {
            let p = partner[k];
            if p == NONE {
                continue;
            }
            let p = p as usize;
            if p > k {
                open.push(k);
            } else {
                let top = open.pop().expect("left endpoint precedes right endpoint");
                if top != p {
                    let inner = (top + 1, partner[top] as usize + 1);
                    return Err(ArcError::CrossingArcs {
                        first: (p + 1, k + 1),
                        second: inner,
                    });
                }
            }
        }
        Ok(Self { bases, partner })
    }

    /// Builds a string that may contain the sentinel symbol. The arcs must
    /// already be valid.
    pub(crate) fn from_trusted(bases: Vec<char>, arcs: &[(usize, usize)]) -> Self {
        Self::from_parts(bases, arcs).expect("trusted arc set is nested")
    }

    pub fn empty() -> Self {
        Self {
            bases: Vec::new(),
            partner: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Base at 1-indexed position `i`.
    #[inline]
    pub fn base(&self, i: usize) -> char {
        self.bases[i - 1]
    }

    pub fn bases(&self) -> &[char] {
        &self.bases
    }

    /// The other endpoint of the arc at position `i`, if any.
    #[inline]
    pub fn partner(&self, i: usize) -> Option<usize> {
        match self.partner[i - 1] {
            NONE => None,
            p => Some(p as usize + 1),
        }
    }

    /// Right endpoint of the arc whose left endpoint is `i`.
    #[inline]
    pub fn right_partner(&self, i: usize) -> Option<usize> {
        self.partner(i).filter(|&r| r > i)
    }

    pub fn has_arc(&self, l: usize, r: usize) -> bool {
        l >= 1 && r <= self.len() && l < r && self.partner(l) == Some(r)
    }

    /// True when the string carries the arc `(1, |S|)`.
    pub fn has_root_arc(&self) -> bool {
        self.len() >= 2 && self.has_arc(1, self.len())
    }

    /// Arcs in increasing order of left endpoint.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.len()).filter_map(move |l| self.right_partner(l).map(|r| (l, r)))
    }

    pub fn arc_count(&self) -> usize {
        self.partner.iter().filter(|&&p| p != NONE).count() / 2
    }

    /// Dot-bracket structure line for this string.
    pub fn structure(&self) -> String {
        (1..=self.len())
            .map(|i| match self.partner(i) {
                None => '.',
                Some(p) if p > i => '(',
                Some(_) => ')',
            })
            .collect()
    }

    pub fn sequence(&self) -> String {
        self.bases.iter().collect()
    }

    /// Adds a sentinel base at each end joined by an outer arc, unless the
    /// string already has the arc `(1, |S|)`.
    pub fn wrap(&self) -> Cow<'_, ArcAnnotatedString> {
        if self.has_root_arc() {
            return Cow::Borrowed(self);
        }
        let n = self.len();
        let mut bases = Vec::with_capacity(n + 2);
        bases.push(SENTINEL);
        bases.extend_from_slice(&self.bases);
        bases.push(SENTINEL);
        let mut partner = Vec::with_capacity(n + 2);
        partner.push((n + 1) as u32);
        partner.extend(
            self.partner
                .iter()
                .map(|&p| if p == NONE { NONE } else { p + 1 }),
        );
        partner.push(0);
        Cow::Owned(Self { bases, partner })
    }

    /// True iff no arc `(l, r)` has `l <= i < r`.
    pub fn is_arc_preserving_split(&self, i: usize) -> bool {
        self.view(1, self.len()).is_arc_preserving_split(i)
    }

    /// The substring `S[i1, i2]` with the arcs that have both endpoints inside.
    /// `i1 > i2` gives the empty string.
    pub fn view(&self, i1: usize, i2: usize) -> View<'_> {
        assert!(i1 >= 1, "views start at position 1 or later");
        assert!(
            i2 <= self.len(),
            "view end {i2} beyond length {}",
            self.len()
        );
        View {
            s: self,
            lo: i1,
            hi: i2.max(i1 - 1),
        }
    }

    pub fn as_view(&self) -> View<'_> {
        View {
            s: self,
            lo: 1,
            hi: self.len(),
        }
    }
}

impl fmt::Debug for ArcAnnotatedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.sequence(), self.structure())
    }
}

/// Borrowed substring `S[lo, hi]`, addressed with local 1-indexed positions.
#[derive(Clone, Copy)]
pub struct View<'a> {
    s: &'a ArcAnnotatedString,
    lo: usize,
    // hi = lo - 1 for the empty view
    hi: usize,
}

impl<'a> View<'a> {
    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position in the underlying string of local position 1.
    pub fn start(&self) -> usize {
        self.lo
    }

    #[inline]
    pub fn base(&self, k: usize) -> char {
        debug_assert!(k >= 1 && k <= self.len());
        self.s.base(self.lo + k - 1)
    }

    /// Local partner of local position `k`, if the arc lies inside the view.
    #[inline]
    pub fn partner(&self, k: usize) -> Option<usize> {
        let p = self.s.partner(self.lo + k - 1)?;
        (self.lo..=self.hi).contains(&p).then(|| p + 1 - self.lo)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.len()).filter_map(move |l| self.partner(l).filter(|&r| r > l).map(|r| (l, r)))
    }

    pub fn is_arc_preserving_split(&self, i: usize) -> bool {
        assert!(
            i <= self.len(),
            "split index {i} beyond length {}",
            self.len()
        );
        // Arcs are nested, so one crosses i iff some arc opened in [1, i] is
        // still open after i.
        let mut depth = 0usize;
        for k in 1..=i {
            match self.partner(k) {
                Some(p) if p > k => depth += 1,
                Some(_) => depth -= 1,
                None => {}
            }
        }
        depth == 0
    }

    pub fn to_owned_string(&self) -> ArcAnnotatedString {
        let bases = (1..=self.len()).map(|k| self.base(k)).collect();
        let arcs: Vec<_> = self.arcs().collect();
        ArcAnnotatedString::from_trusted(bases, &arcs)
    }
}

impl fmt::Debug for View<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] of ", self.lo, self.hi)?;
        self.to_owned_string().fmt(f)
    }
}
