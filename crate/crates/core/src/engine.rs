//! The traversal that computes Γ(1, n) for the whole text.
//!
//! Arcs of the text are visited top-down along the heavy-path decomposition.
//! At an arc `(l, r)` the heavy child is solved first, then two local
//! sequences Γ(x, r) and Γ(x, r - 1) are grown leftward from `r` across the
//! gaps between children, absorbing each child's Γ with a combine as they
//! reach it. Light children are solved when the sweep reaches them, so while
//! one is being solved its ancestor holds at most three sequences: the heavy
//! child's Γ and the two local ones. A final extend and a meld close the arc.
//!
//! Recursion uses an explicit stack because the arc tree may be as deep as
//! the text is long.
//!
//! In the compressed modes the sequences held across a light-child
//! computation are stored as [`CompressedGamma`]. `compress-decompress`
//! decodes them once the child returns; `compress-random-access` never
//! decodes and lets the next combine read them element by element.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcstr::ArcAnnotatedString;
use crate::arctree::{ArcTree, NodeId, TreeError};
use crate::gamma::{
    combine, extend_in_place, init_empty, init_single, meld, GammaError, GammaRead, GammaSeq,
    Interval, PatternContext,
};
use crate::succinct::{decode, encode, CompressedGamma, SuccinctError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Succinct(#[from] SuccinctError),
}

/// How sequences held across light-child computations are stored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Uncompressed,
    CompressDecompress,
    CompressRandomAccess,
}

impl Mode {
    pub const ALL: [Mode; 3] = [
        Mode::Uncompressed,
        Mode::CompressDecompress,
        Mode::CompressRandomAccess,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Uncompressed => "uncompressed",
            Mode::CompressDecompress => "compress-decompress",
            Mode::CompressRandomAccess => "compress-random-access",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "unknown mode {0:?} (expected uncompressed, compress-decompress or compress-random-access)"
)]
pub struct ParseModeError(String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ParseModeError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Measure wall time. Operation counts are always collected.
    pub collect_stats: bool,
}

impl EngineConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            collect_stats: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub initialize: u64,
    pub extend: u64,
    pub combine: u64,
    pub meld: u64,
    pub encode: u64,
    pub decode: u64,
    /// Most Γ sequences held at once by arcs waiting on a child.
    pub peak_live_gamma: usize,
    /// Most bits held at once by those sequences.
    pub peak_gamma_bits: usize,
    /// Arcs of the rooted text the traversal runs on.
    pub tree_arcs: usize,
    pub max_lightdepth: usize,
    pub total_spaces: usize,
    #[serde(serialize_with = "secs")]
    pub wall_time: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl EngineStats {
    /// The stats with `wall_time` cleared, for comparing runs.
    pub fn without_time(&self) -> Self {
        Self {
            wall_time: Duration::ZERO,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct NapsResult {
    pub is_subsequence: bool,
    /// γ(1, m, 1, n): the longest prefix of the pattern that embeds.
    pub gamma_root: usize,
    pub root: GammaSeq,
    pub stats: EngineStats,
}

/// Hooks called on every Γ sequence the engine produces or compresses.
pub trait Observer {
    fn produced(&mut self, _g: &GammaSeq) {}

    fn encoded(&mut self, _source: &GammaSeq, _packed: &CompressedGamma) {}
}

/// An [`Observer`] that ignores everything.
pub struct Silent;

impl Observer for Silent {}

/// Returns the text the engine works on: `q` itself if it has the arc
/// `(1, n)`, otherwise `q` wrapped in sentinels. The pattern is never
/// wrapped; since it contains no sentinel, the answer and every γ value are
/// unchanged.
pub fn rooted_text(q: &ArcAnnotatedString) -> std::borrow::Cow<'_, ArcAnnotatedString> {
    q.wrap()
}

/// Decides whether `p` is an arc-preserving subsequence of `q`.
pub fn naps(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    cfg: EngineConfig,
) -> Result<NapsResult, EngineError> {
    naps_observed(p, q, cfg, &mut Silent)
}

/// Length of the longest prefix of `p` that is an arc-preserving subsequence
/// of `q` and ends on an arc-preserving split of `p`.
pub fn longest_prefix(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    cfg: EngineConfig,
) -> Result<usize, EngineError> {
    Ok(naps(p, q, cfg)?.gamma_root)
}

pub fn naps_observed<O: Observer>(
    p: &ArcAnnotatedString,
    q: &ArcAnnotatedString,
    cfg: EngineConfig,
    observer: &mut O,
) -> Result<NapsResult, EngineError> {
    let start = cfg.collect_stats.then(Instant::now);
    let text = rooted_text(q);
    let tree = ArcTree::build(&text)?;
    let mut run = Run {
        ctx: PatternContext::new(p),
        text: &text,
        tree: &tree,
        mode: cfg.mode,
        stats: EngineStats {
            tree_arcs: tree.len(),
            max_lightdepth: tree.max_lightdepth(),
            total_spaces: tree.total_spaces(),
            ..EngineStats::default()
        },
        live: 0,
        live_bits: 0,
        observer,
    };
    let root = run.solve()?;
    let mut stats = run.stats;
    if let Some(start) = start {
        stats.wall_time = start.elapsed();
    }
    let gamma_root = root.get(1);
    Ok(NapsResult {
        is_subsequence: gamma_root == p.len(),
        gamma_root,
        root,
        stats,
    })
}

enum Held {
    Plain(GammaSeq),
    Packed(CompressedGamma),
}

impl Held {
    fn bits(&self) -> usize {
        match self {
            Held::Plain(g) => 32 * g.pattern_len(),
            Held::Packed(c) => c.size_in_bits(),
        }
    }
}

impl GammaRead for Held {
    fn pattern_len(&self) -> usize {
        match self {
            Held::Plain(g) => g.pattern_len(),
            Held::Packed(c) => c.pattern_len(),
        }
    }

    fn interval(&self) -> Interval {
        match self {
            Held::Plain(g) => g.interval(),
            Held::Packed(c) => c.interval(),
        }
    }

    #[inline]
    fn get(&self, j: usize) -> usize {
        match self {
            Held::Plain(g) => g.get(j),
            Held::Packed(c) => c.get(j),
        }
    }
}

/// State of an internal arc between children.
struct Frame {
    node: NodeId,
    /// The heavy child's Γ until the sweep reaches it.
    heavy: Option<Held>,
    /// Γ(x, r) for the current sweep position x.
    to_right: Held,
    /// Γ(x, r - 1).
    to_inner: Held,
    /// Children not yet absorbed: indices `0..pending`.
    pending: usize,
    held: usize,
    held_bits: usize,
}

// Frames live on the explicit stack, so boxing them would only add an allocation per light descent.
#[allow(clippy::large_enum_variant)]
enum Pending {
    /// Waiting for the heavy child; nothing is held yet.
    Heavy(NodeId),
    /// Waiting for the light child `pending - 1`.
    Light(Frame),
}

#[allow(clippy::large_enum_variant)]
enum Step {
    Descend(Frame, NodeId),
    Done(GammaSeq),
}

struct Run<'a, O> {
    ctx: PatternContext<'a>,
    text: &'a ArcAnnotatedString,
    tree: &'a ArcTree,
    mode: Mode,
    stats: EngineStats,
    live: usize,
    live_bits: usize,
    observer: &'a mut O,
}

impl<O: Observer> Run<'_, O> {
    fn solve(&mut self) -> Result<GammaSeq, EngineError> {
        let mut stack: Vec<Pending> = Vec::new();
        let mut next = self.tree.root();
        loop {
            let mut v = next;
            while let Some(h) = self.tree.heavy_child(v) {
                stack.push(Pending::Heavy(v));
                v = h;
            }
            let (l, r) = self.tree.arc(v);
            let (to_right, to_inner) = self.sweep_start(l, r)?;
            let mut ret = self.close(l, to_right, to_inner)?;

            loop {
                let step = match stack.pop() {
                    None => return Ok(ret),
                    Some(Pending::Heavy(v)) => {
                        let frame = self.open(v, ret)?;
                        self.advance(frame)?
                    }
                    Some(Pending::Light(mut frame)) => {
                        self.resume(&mut frame)?;
                        self.absorb(&mut frame, &ret)?;
                        self.advance(frame)?
                    }
                };
                match step {
                    Step::Done(g) => ret = g,
                    Step::Descend(mut frame, child) => {
                        self.suspend(&mut frame)?;
                        stack.push(Pending::Light(frame));
                        next = child;
                        break;
                    }
                }
            }
        }
    }

    fn produced(&mut self, g: &GammaSeq) {
        self.observer.produced(g);
    }

    /// Γ(b + 1, r) and Γ(b + 1, r - 1), where `b` is the right end of the
    /// last child (or `l` for a leaf arc).
    fn sweep_start(&mut self, b: usize, r: usize) -> Result<(GammaSeq, GammaSeq), EngineError> {
        let m = self.ctx.len();
        let mut to_right = init_single(&self.ctx, self.text, r);
        self.produced(&to_right);
        let mut to_inner = if r - 1 > b {
            init_single(&self.ctx, self.text, r - 1)
        } else {
            init_empty(m, r)
        };
        self.produced(&to_inner);
        self.stats.initialize += 2;
        self.extend_both(&mut to_right, &mut to_inner, b + 1..=r - 1)?;
        Ok((to_right, to_inner))
    }

    /// Extends both local sequences leftward over `span`. The inner one
    /// already covers `r - 1`, so it skips that position.
    fn extend_both(
        &mut self,
        to_right: &mut GammaSeq,
        to_inner: &mut GammaSeq,
        span: std::ops::RangeInclusive<usize>,
    ) -> Result<(), EngineError> {
        for i in span.rev() {
            if i + 1 == to_right.interval().start {
                extend_in_place(&self.ctx, self.text, to_right, i)?;
                self.stats.extend += 1;
                self.produced(to_right);
            }
            if i + 1 == to_inner.interval().start {
                extend_in_place(&self.ctx, self.text, to_inner, i)?;
                self.stats.extend += 1;
                self.produced(to_inner);
            }
        }
        Ok(())
    }

    /// Starts an internal arc once its heavy child is solved.
    fn open(&mut self, v: NodeId, heavy: GammaSeq) -> Result<Frame, EngineError> {
        let r = self.tree.arc(v).1;
        let children = self.tree.children(v);
        let last = *children.last().expect("internal arc has children");
        let (to_right, to_inner) = self.sweep_start(self.tree.arc(last).1, r)?;
        Ok(Frame {
            node: v,
            heavy: Some(Held::Plain(heavy)),
            to_right: Held::Plain(to_right),
            to_inner: Held::Plain(to_inner),
            pending: children.len(),
            held: 0,
            held_bits: 0,
        })
    }

    /// Absorbs the next pending child and moves the sweep to the previous one.
    fn absorb<C: GammaRead>(&mut self, frame: &mut Frame, child: &C) -> Result<(), EngineError> {
        let mut to_right = combine(child, &frame.to_right)?;
        self.produced(&to_right);
        let mut to_inner = combine(child, &frame.to_inner)?;
        self.produced(&to_inner);
        self.stats.combine += 2;

        frame.pending -= 1;
        let (l, _) = self.tree.arc(frame.node);
        let prev_end = match frame.pending {
            0 => l,
            k => self.tree.arc(self.tree.children(frame.node)[k - 1]).1,
        };
        let start = child.interval().start;
        self.extend_both(&mut to_right, &mut to_inner, prev_end + 1..=start - 1)?;
        frame.to_right = Held::Plain(to_right);
        frame.to_inner = Held::Plain(to_inner);
        Ok(())
    }

    /// Absorbs children right to left until a light child must be solved.
    fn advance(&mut self, mut frame: Frame) -> Result<Step, EngineError> {
        let heavy = self.tree.heavy_child(frame.node);
        while frame.pending > 0 {
            let child = self.tree.children(frame.node)[frame.pending - 1];
            if Some(child) != heavy {
                return Ok(Step::Descend(frame, child));
            }
            let h = frame.heavy.take().expect("heavy child solved first");
            self.absorb(&mut frame, &h)?;
        }
        let (l, _) = self.tree.arc(frame.node);
        let to_right = self.plain(frame.to_right)?;
        let to_inner = self.plain(frame.to_inner)?;
        Ok(Step::Done(self.close(l, to_right, to_inner)?))
    }

    /// Γ(l, r) from Γ(l + 1, r) and Γ(l + 1, r - 1).
    fn close(
        &mut self,
        l: usize,
        to_right: GammaSeq,
        inside: GammaSeq,
    ) -> Result<GammaSeq, EngineError> {
        let mut to_inner = inside.clone();
        extend_in_place(&self.ctx, self.text, &mut to_inner, l)?;
        self.stats.extend += 1;
        self.produced(&to_inner);
        let g = meld(&self.ctx, self.text, &to_right, &to_inner, &inside)?;
        self.stats.meld += 1;
        self.produced(&g);
        Ok(g)
    }

    fn plain(&mut self, h: Held) -> Result<GammaSeq, EngineError> {
        match h {
            Held::Plain(g) => Ok(g),
            Held::Packed(c) => {
                self.stats.decode += 1;
                Ok(decode(&c)?)
            }
        }
    }

    fn pack(&mut self, h: Held) -> Result<Held, EngineError> {
        match h {
            Held::Plain(g) => {
                let c = encode(&g)?;
                self.stats.encode += 1;
                self.observer.encoded(&g, &c);
                Ok(Held::Packed(c))
            }
            packed => Ok(packed),
        }
    }

    /// Stores what the frame keeps while a light child is solved.
    fn suspend(&mut self, frame: &mut Frame) -> Result<(), EngineError> {
        if self.mode != Mode::Uncompressed {
            frame.heavy = frame.heavy.take().map(|h| self.pack(h)).transpose()?;
            let placeholder = || Held::Plain(init_empty(0, 1));
            let to_right = std::mem::replace(&mut frame.to_right, placeholder());
            frame.to_right = self.pack(to_right)?;
            let to_inner = std::mem::replace(&mut frame.to_inner, placeholder());
            frame.to_inner = self.pack(to_inner)?;
        }
        let held = [
            frame.heavy.as_ref(),
            Some(&frame.to_right),
            Some(&frame.to_inner),
        ];
        frame.held = held.iter().flatten().count();
        frame.held_bits = held.iter().flatten().map(|h| h.bits()).sum();
        self.live += frame.held;
        self.live_bits += frame.held_bits;
        self.stats.peak_live_gamma = self.stats.peak_live_gamma.max(self.live);
        self.stats.peak_gamma_bits = self.stats.peak_gamma_bits.max(self.live_bits);
        Ok(())
    }

    fn resume(&mut self, frame: &mut Frame) -> Result<(), EngineError> {
        self.live -= frame.held;
        self.live_bits -= frame.held_bits;
        if self.mode == Mode::CompressDecompress {
            if let Some(h) = frame.heavy.take() {
                frame.heavy = Some(Held::Plain(self.plain(h)?));
            }
            let placeholder = || Held::Plain(init_empty(0, 1));
            let to_right = std::mem::replace(&mut frame.to_right, placeholder());
            frame.to_right = Held::Plain(self.plain(to_right)?);
            let to_inner = std::mem::replace(&mut frame.to_inner, placeholder());
            frame.to_inner = Held::Plain(self.plain(to_inner)?);
        }
        Ok(())
    }
}
