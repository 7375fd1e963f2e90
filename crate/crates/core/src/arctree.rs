//! The ordered tree induced by a nested arc set, with its heavy-path
//! decomposition.
//!
//! Nodes are numbered by increasing left endpoint, which is also a preorder of
//! the tree, so parents always precede their children. All per-node data lives
//! in flat arrays.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::arcstr::ArcAnnotatedString;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("string of length {len} has no arc (1, {len})")]
    MissingRootArc { len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct ArcTree {
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    // children of v are children[child_start[v]..child_start[v + 1]]
    child_start: Vec<u32>,
    children: Vec<NodeId>,
    size: Vec<u32>,
    heavy: Vec<u32>,
    lightdepth: Vec<u32>,
}

impl ArcTree {
    /// Builds the tree of a string that carries the arc `(1, |S|)`.
    pub fn build(s: &ArcAnnotatedString) -> Result<Self, TreeError> {
        if !s.has_root_arc() {
            return Err(TreeError::MissingRootArc { len: s.len() });
        }
        let count = s.arc_count();
        let mut left = Vec::with_capacity(count);
        let mut right = Vec::with_capacity(count);
        let mut parent = Vec::with_capacity(count);
        let mut open: Vec<u32> = Vec::new();
        for i in 1..=s.len() {
            match s.partner(i) {
                Some(r) if r > i => {
                    let id = left.len() as u32;
                    left.push(i as u32);
                    right.push(r as u32);
                    parent.push(open.last().copied().unwrap_or(NONE));
                    open.push(id);
                }
                Some(_) => {
                    open.pop();
                }
                None => {}
            }
        }

        let mut child_start = vec![0u32; count + 1];
        for &p in &parent[1..] {
            child_start[p as usize + 1] += 1;
        }
        for v in 0..count {
            child_start[v + 1] += child_start[v];
        }
        let mut fill = child_start.clone();
        let mut children = vec![NodeId::ROOT; count.saturating_sub(1)];
        for (v, &p) in parent.iter().enumerate().skip(1) {
            let slot = &mut fill[p as usize];
            children[*slot as usize] = NodeId(v as u32);
            *slot += 1;
        }

        let mut size = vec![1u32; count];
        for v in (1..count).rev() {
            size[parent[v] as usize] += size[v];
        }

        let mut tree = Self {
            left,
            right,
            parent,
            child_start,
            children,
            size,
            heavy: vec![NONE; count],
            lightdepth: vec![0; count],
        };
        tree.heavy_decompose();
        Ok(tree)
    }

    // Marks the leftmost maximum-size child of every internal node as heavy
    // and counts light edges from the root.
    fn heavy_decompose(&mut self) {
        for v in 0..self.len() {
            let mut best: Option<NodeId> = None;
            for &c in self.children(NodeId(v as u32)) {
                if best.is_none_or(|b| self.size[c.index()] > self.size[b.index()]) {
                    best = Some(c);
                }
            }
            self.heavy[v] = best.map_or(NONE, |b| b.0);
        }
        for v in 1..self.len() {
            let p = self.parent[v] as usize;
            let light = u32::from(self.heavy[p] != v as u32);
            self.lightdepth[v] = self.lightdepth[p] + light;
        }
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    /// Nodes in preorder, which is also increasing left-endpoint order.
    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.len() as u32).map(NodeId)
    }

    /// The arc `(l, r)` of node `v`.
    #[inline]
    pub fn arc(&self, v: NodeId) -> (usize, usize) {
        (
            self.left[v.index()] as usize,
            self.right[v.index()] as usize,
        )
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        match self.parent[v.index()] {
            NONE => None,
            p => Some(NodeId(p)),
        }
    }

    /// Children of `v` ordered by left endpoint.
    #[inline]
    pub fn children(&self, v: NodeId) -> &[NodeId] {
        let lo = self.child_start[v.index()] as usize;
        let hi = self.child_start[v.index() + 1] as usize;
        &self.children[lo..hi]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children(v).is_empty()
    }

    /// Number of arcs in the subtree of `v`, including `v`.
    pub fn size(&self, v: NodeId) -> usize {
        self.size[v.index()] as usize
    }

    pub fn heavy_child(&self, v: NodeId) -> Option<NodeId> {
        match self.heavy[v.index()] {
            NONE => None,
            h => Some(NodeId(h)),
        }
    }

    /// True for the heavy child of its parent. The root is light.
    pub fn is_heavy(&self, v: NodeId) -> bool {
        self.parent(v)
            .is_some_and(|p| self.heavy_child(p) == Some(v))
    }

    pub fn lightdepth(&self, v: NodeId) -> usize {
        self.lightdepth[v.index()] as usize
    }

    pub fn max_lightdepth(&self) -> usize {
        self.lightdepth.iter().copied().max().unwrap_or(0) as usize
    }

    /// Positions inside the arc of `v` that are not inside any child arc.
    pub fn spaces(&self, v: NodeId) -> SpacesSet {
        let (l, r) = self.arc(v);
        let mut ranges = Vec::with_capacity(self.children(v).len() + 1);
        let mut cursor = l;
        for &c in self.children(v) {
            let (cl, cr) = self.arc(c);
            if cursor < cl {
                ranges.push(cursor..=cl - 1);
            }
            cursor = cr + 1;
        }
        if cursor <= r {
            ranges.push(cursor..=r);
        }
        SpacesSet {
            arc: (l, r),
            ranges,
        }
    }

    /// Σ |spaces(v)| over all nodes; equals the string length.
    pub fn total_spaces(&self) -> usize {
        self.nodes().map(|v| self.spaces(v).len()).sum()
    }

    /// Indented text listing of the decomposition, one arc per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut depth = vec![0usize; self.len()];
        for v in self.nodes() {
            if let Some(p) = self.parent(v) {
                depth[v.index()] = depth[p.index()] + 1;
            }
            let (l, r) = self.arc(v);
            let kind = if v == self.root() {
                "root"
            } else if self.is_heavy(v) {
                "heavy"
            } else {
                "light"
            };
            let _ = writeln!(
                out,
                "{:indent$}({l}, {r}) {kind} size={} lightdepth={}",
                "",
                self.size(v),
                self.lightdepth(v),
                indent = 2 * depth[v.index()]
            );
        }
        out
    }
}

/// The positions of one arc that are not covered by its children, as
/// maximal runs in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacesSet {
    pub arc: (usize, usize),
    pub ranges: Vec<RangeInclusive<usize>>,
}

impl SpacesSet {
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.end() + 1 - r.start()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranges.iter().flat_map(|r| r.clone())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.ranges.iter().any(|r| r.contains(&i))
    }
}
