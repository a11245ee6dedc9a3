//! Split-tree generation by ball insertion, structural summaries, validation,
//! and the line-oriented text serialization.
//!
//! A split tree with parameters `(b, s, s0, s1)` and a split-vector law is
//! grown by adding `n` balls one at a time at the root. Each occupied vertex
//! caches one split vector, drawn the first time the vertex has to route
//! balls and fixed thereafter. A vertex holds at most `s` balls; when a ball
//! reaches a full leaf the leaf keeps `s0` balls, hands `s1` balls to each of
//! its `b` children, and routes the remaining `s + 1 - s0 - b*s1` balls
//! independently through its split vector (which can cascade).
//!
//! Only vertices holding at least one ball in their subtree are stored, so
//! every stored vertex has `n_v >= 1`.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SplitVectorModel;

/// Sentinel for "no node".
pub const NONE: u32 = u32::MAX;
const ROOT: u32 = 0;

/// Tree-family parameters: split-vector model plus capacities.
#[derive(Clone, Debug)]
pub struct SplitParams {
    model: SplitVectorModel,
    s: u32,
    s0: u32,
    s1: u32,
}

impl SplitParams {
    /// Validates `s >= 1`, `0 <= s0 <= s` and `0 <= b*s1 <= s + 1 - s0`.
    pub fn new(model: SplitVectorModel, s: u32, s0: u32, s1: u32) -> Result<Self> {
        if s < 1 {
            return Err(Error::invalid("vertex capacity s must be >= 1"));
        }
        if s0 > s {
            return Err(Error::invalid(format!("need 0 <= s0 <= s, got s0={s0}, s={s}")));
        }
        let b = model.branch_factor();
        if b as u64 * s1 as u64 > (s + 1 - s0) as u64 {
            return Err(Error::invalid(format!(
                "need b*s1 <= s + 1 - s0, got b={b}, s1={s1}, s={s}, s0={s0}"
            )));
        }
        Ok(SplitParams { model, s, s0, s1 })
    }

    /// Binary search tree: `b = 2, s = 1, s0 = 1, s1 = 0`.
    pub fn bst() -> Self {
        SplitParams {
            model: SplitVectorModel::bst(),
            s: 1,
            s0: 1,
            s1: 0,
        }
    }

    /// m-ary search tree: uniform spacings with `s = s0 = m - 1`, `s1 = 0`.
    pub fn mary(m: u32) -> Result<Self> {
        Ok(SplitParams {
            model: SplitVectorModel::uniform_spacings(m)?,
            s: m - 1,
            s0: m - 1,
            s1: 0,
        })
    }

    pub fn model(&self) -> &SplitVectorModel {
        &self.model
    }

    pub fn b(&self) -> u32 {
        self.model.branch_factor()
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn s0(&self) -> u32 {
        self.s0
    }

    pub fn s1(&self) -> u32 {
        self.s1
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Node {
    /// Parent id, `NONE` for the root.
    pub parent: u32,
    pub depth: u32,
    /// Balls held by this vertex (`C_v`).
    pub balls: u32,
    /// Balls held by the subtree rooted here (`n_v`).
    pub subtree_balls: u64,
    child_base: u32,
}

/// Arena-backed split tree.
#[derive(Clone, Debug)]
pub struct SplitTree {
    nodes: Vec<Node>,
    child_slots: Vec<u32>,
    b: u32,
    s: u32,
    s0: u32,
    s1: u32,
    n: u64,
    insertion_depths: Vec<u32>,
    split_vectors: Option<Vec<Option<Vec<f64>>>>,
}

/// Structural summary of a tree.
#[derive(Clone, Debug, Serialize)]
pub struct TreeSummary {
    /// Number of stored vertices (`N`).
    pub n_nodes: u64,
    /// Maximal depth.
    pub height: u32,
    /// Vertices per depth.
    pub node_depth_histogram: Vec<u64>,
    /// Balls per depth of their holding vertex.
    pub ball_depth_histogram: Vec<u64>,
    /// Total vertex path length `Υ = Σ_v d(v)`.
    pub upsilon: u64,
    /// Total ball path length `Ψ = Σ_v C_v d(v)`.
    pub psi: u64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GenerateOptions {
    /// Keep the split vector of every internal vertex (debug dump).
    pub record_split_vectors: bool,
}

/// Incremental generator. Useful when the same growing tree must be observed
/// at several ball counts.
pub struct TreeBuilder {
    params: SplitParams,
    opts: GenerateOptions,
    nodes: Vec<Node>,
    child_slots: Vec<u32>,
    cums: Vec<f64>,
    split_vectors: Vec<Option<Vec<f64>>>,
    insertion_depths: Vec<u32>,
    balls: u64,
    upsilon: u64,
    psi: i64,
    stack: Vec<(u32, bool)>,
    vec_buf: Vec<f64>,
}

impl TreeBuilder {
    pub fn new(params: SplitParams) -> Self {
        Self::with_options(params, GenerateOptions::default())
    }

    pub fn with_options(params: SplitParams, opts: GenerateOptions) -> Self {
        let root = Node {
            parent: NONE,
            depth: 0,
            balls: 0,
            subtree_balls: 0,
            child_base: NONE,
        };
        TreeBuilder {
            params,
            opts,
            nodes: vec![root],
            child_slots: Vec::new(),
            cums: Vec::new(),
            split_vectors: Vec::new(),
            insertion_depths: Vec::new(),
            balls: 0,
            upsilon: 0,
            psi: 0,
            stack: Vec::new(),
            vec_buf: Vec::new(),
        }
    }

    pub fn balls(&self) -> u64 {
        self.balls
    }

    pub fn node_count(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn upsilon(&self) -> u64 {
        self.upsilon
    }

    pub fn psi(&self) -> u64 {
        debug_assert!(self.psi >= 0);
        self.psi as u64
    }

    fn ensure_child(&mut self, v: u32, slot: usize) -> u32 {
        let base = self.nodes[v as usize].child_base as usize;
        let existing = self.child_slots[base + slot];
        if existing != NONE {
            return existing;
        }
        let id = self.nodes.len() as u32;
        let depth = self.nodes[v as usize].depth + 1;
        self.nodes.push(Node {
            parent: v,
            depth,
            balls: 0,
            subtree_balls: 0,
            child_base: NONE,
        });
        self.child_slots[base + slot] = id;
        self.upsilon += depth as u64;
        id
    }

    fn route_child<R: Rng + ?Sized>(&mut self, v: u32, rng: &mut R) -> u32 {
        let b = self.params.b() as usize;
        let base = self.nodes[v as usize].child_base as usize;
        let u: f64 = rng.random();
        let mut slot = 0usize;
        while slot + 1 < b && u >= self.cums[base + slot] {
            slot += 1;
        }
        self.ensure_child(v, slot)
    }

    fn make_internal<R: Rng + ?Sized>(&mut self, v: u32, rng: &mut R) -> Result<()> {
        let b = self.params.b() as usize;
        let base = self.child_slots.len();
        self.child_slots.resize(base + b, NONE);
        self.nodes[v as usize].child_base = base as u32;

        let mut buf = std::mem::take(&mut self.vec_buf);
        self.params.model().sample_into(rng, &mut buf)?;
        if self.opts.record_split_vectors {
            if self.split_vectors.len() <= v as usize {
                self.split_vectors.resize(v as usize + 1, None);
            }
            self.split_vectors[v as usize] = Some(buf.clone());
        }
        let mut acc = 0.0;
        for &p in &buf {
            acc += p;
            self.cums.push(acc);
        }
        self.vec_buf = buf;
        Ok(())
    }

    /// Insert one ball at the root and return the depth at which it settles,
    /// after any overflow it triggers. Balls displaced by the overflow keep
    /// their previously recorded depths.
    pub fn insert_ball<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u32> {
        let s = self.params.s();
        let s0 = self.params.s0();
        let s1 = self.params.s1();
        let b = self.params.b();
        debug_assert!(self.stack.is_empty());
        self.stack.push((ROOT, true));
        let mut tracked_depth: Option<u32> = None;

        while let Some((start, tracked)) = self.stack.pop() {
            let mut v = start;
            loop {
                self.nodes[v as usize].subtree_balls += 1;
                if self.nodes[v as usize].child_base != NONE {
                    v = self.route_child(v, rng);
                    continue;
                }
                let held = self.nodes[v as usize].balls;
                if held < s {
                    self.nodes[v as usize].balls = held + 1;
                    let d = self.nodes[v as usize].depth;
                    self.psi += d as i64;
                    if tracked {
                        tracked_depth = Some(d);
                    }
                    break;
                }

                // Overflow: v is a full leaf and one more ball just arrived,
                // so its subtree now holds s + 1 balls. Keep s0 here, give s1
                // to each child, route the rest. The arriving ball is always
                // among the s + 1 - s0 that move on; m-ary search trees and
                // the binary search tree place the new key below the full
                // node, and the displaced-ball identities are unobservable.
                let d = self.nodes[v as usize].depth;
                self.make_internal(v, rng)?;
                self.nodes[v as usize].balls = s0;
                self.psi += (s0 as i64 - s as i64) * d as i64;

                let leavers = s + 1 - s0;
                let block = b * s1;
                let tracked_pos = if tracked {
                    rng.random_range(0..leavers)
                } else {
                    u32::MAX
                };
                let tracked_in_block = tracked && tracked_pos < block;
                for j in 0..b {
                    let mut cnt = s1;
                    if tracked_in_block && tracked_pos / s1 == j {
                        cnt -= 1;
                    }
                    if cnt > 0 {
                        let child = self.ensure_child(v, j as usize);
                        for _ in 0..cnt {
                            self.stack.push((child, false));
                        }
                    }
                }
                let mut routed_untracked =
                    leavers - block - u32::from(tracked && !tracked_in_block);
                while routed_untracked > 0 {
                    let child = self.route_child(v, rng);
                    self.stack.push((child, false));
                    routed_untracked -= 1;
                }
                if tracked {
                    v = if tracked_in_block {
                        self.ensure_child(v, (tracked_pos / s1) as usize)
                    } else {
                        self.route_child(v, rng)
                    };
                    continue;
                }
                break;
            }
        }

        self.balls += 1;
        let depth = tracked_depth.expect("inserted ball must settle");
        self.insertion_depths.push(depth);
        Ok(depth)
    }

    pub fn finish(self) -> Result<SplitTree> {
        if self.balls == 0 {
            return Err(Error::invalid("cannot finish a tree with no balls"));
        }
        let split_vectors = if self.opts.record_split_vectors {
            let mut sv = self.split_vectors;
            sv.resize(self.nodes.len(), None);
            Some(sv)
        } else {
            None
        };
        Ok(SplitTree {
            nodes: self.nodes,
            child_slots: self.child_slots,
            b: self.params.b(),
            s: self.params.s(),
            s0: self.params.s0(),
            s1: self.params.s1(),
            n: self.balls,
            insertion_depths: self.insertion_depths,
            split_vectors,
        })
    }
}

/// Generate a split tree with `n >= 1` balls.
pub fn generate_tree<R: Rng + ?Sized>(
    params: &SplitParams,
    n: u64,
    rng: &mut R,
) -> Result<SplitTree> {
    generate_tree_with(params, n, rng, GenerateOptions::default())
}

pub fn generate_tree_with<R: Rng + ?Sized>(
    params: &SplitParams,
    n: u64,
    rng: &mut R,
    opts: GenerateOptions,
) -> Result<SplitTree> {
    if n < 1 {
        return Err(Error::invalid("ball count must be >= 1"));
    }
    let mut builder = TreeBuilder::with_options(params.clone(), opts);
    for _ in 0..n {
        builder.insert_ball(rng)?;
    }
    builder.finish()
}

impl SplitTree {
    pub fn node_count(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn root(&self) -> u32 {
        ROOT
    }

    pub fn node(&self, v: u32) -> &Node {
        &self.nodes[v as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self, v: u32) -> u32 {
        self.nodes[v as usize].depth
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.children(v).next().is_none()
    }

    pub fn children(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let node = &self.nodes[v as usize];
        let range = if node.child_base == NONE {
            0..0
        } else {
            let base = node.child_base as usize;
            base..base + self.b as usize
        };
        self.child_slots[range].iter().copied().filter(|&c| c != NONE)
    }

    /// Child occupying split-vector slot `slot` (0-based), if any.
    pub fn child_in_slot(&self, v: u32, slot: u32) -> Option<u32> {
        let node = &self.nodes[v as usize];
        if node.child_base == NONE || slot >= self.b {
            return None;
        }
        let id = self.child_slots[node.child_base as usize + slot as usize];
        (id != NONE).then_some(id)
    }

    /// `(b, s, s0, s1)`.
    pub fn params(&self) -> (u32, u32, u32, u32) {
        (self.b, self.s, self.s0, self.s1)
    }

    /// Depth at which each ball settled when it was inserted.
    pub fn insertion_depths(&self) -> &[u32] {
        &self.insertion_depths
    }

    /// Depth of the last inserted ball (`D_n`).
    pub fn last_insertion_depth(&self) -> Option<u32> {
        self.insertion_depths.last().copied()
    }

    /// Split vectors per internal vertex, when recorded at generation time.
    pub fn split_vector(&self, v: u32) -> Option<&[f64]> {
        self.split_vectors
            .as_ref()
            .and_then(|sv| sv.get(v as usize))
            .and_then(|o| o.as_deref())
    }

    /// Deterministic structural summary.
    pub fn summarize(&self) -> TreeSummary {
        let height = self.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
        let mut node_hist = vec![0u64; height as usize + 1];
        let mut ball_hist = vec![0u64; height as usize + 1];
        let mut upsilon = 0u64;
        let mut psi = 0u64;
        for node in &self.nodes {
            node_hist[node.depth as usize] += 1;
            ball_hist[node.depth as usize] += node.balls as u64;
            upsilon += node.depth as u64;
            psi += node.balls as u64 * node.depth as u64;
        }
        TreeSummary {
            n_nodes: self.nodes.len() as u64,
            height,
            node_depth_histogram: node_hist,
            ball_depth_histogram: ball_hist,
            upsilon,
            psi,
        }
    }

    /// Check every structural invariant; returns one description per
    /// violation (empty iff the tree is valid).
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            out.push("tree has no nodes".into());
            return out;
        }
        if self.nodes[0].parent != NONE || self.nodes[0].depth != 0 {
            out.push("root must have no parent and depth 0".into());
        }
        let total: u64 = self.nodes.iter().map(|n| n.balls as u64).sum();
        if total != self.n {
            out.push(format!(
                "ball conservation violated: sum C_v = {total}, n = {}",
                self.n
            ));
        }
        if !self.insertion_depths.is_empty() && self.insertion_depths.len() as u64 != self.n {
            out.push(format!(
                "insertion depth record has length {}, n = {}",
                self.insertion_depths.len(),
                self.n
            ));
        }
        for v in 0..self.nodes.len() as u32 {
            let node = &self.nodes[v as usize];
            if node.subtree_balls == 0 {
                out.push(format!("useless node stored: node {v} has n_v = 0"));
            }
            if node.balls > self.s {
                out.push(format!(
                    "node {v} holds {} balls, capacity s = {}",
                    node.balls, self.s
                ));
            }
            let mut child_sum = 0u64;
            let mut child_count = 0u32;
            for c in self.children(v) {
                child_count += 1;
                let child = &self.nodes[c as usize];
                child_sum += child.subtree_balls;
                if child.parent != v {
                    out.push(format!("node {c} has wrong parent pointer"));
                }
                if child.depth != node.depth + 1 {
                    out.push(format!(
                        "node {c} has depth {}, parent {v} has depth {}",
                        child.depth, node.depth
                    ));
                }
            }
            if child_count > self.b {
                out.push(format!("node {v} has {child_count} children, b = {}", self.b));
            }
            if node.subtree_balls != node.balls as u64 + child_sum {
                out.push(format!(
                    "subtree consistency violated at node {v}: n_v = {}, C_v + sum children = {}",
                    node.subtree_balls,
                    node.balls as u64 + child_sum
                ));
            }
            let is_leaf = child_count == 0;
            let leaf_like = node.balls as u64 == node.subtree_balls && node.subtree_balls > 0;
            if is_leaf && !leaf_like {
                out.push(format!(
                    "node {v} has no children but C_v = {} != n_v = {}",
                    node.balls, node.subtree_balls
                ));
            }
            if !is_leaf && leaf_like {
                out.push(format!(
                    "node {v} has children holding no balls (C_v = n_v = {})",
                    node.balls
                ));
            }
        }
        out
    }

    /// Write the line-oriented text format:
    /// a `splittree v1` header followed by one node per line,
    /// `index parent depth C_v n_v child_indices...`.
    pub fn write_text<W: Write>(&self, w: &mut W, seed: u64) -> std::io::Result<()> {
        writeln!(
            w,
            "splittree v1 b={} s={} s0={} s1={} n={} seed={}",
            self.b, self.s, self.s0, self.s1, self.n, seed
        )?;
        for v in 0..self.nodes.len() as u32 {
            let node = &self.nodes[v as usize];
            if node.parent == NONE {
                write!(w, "{v} - {} {} {}", node.depth, node.balls, node.subtree_balls)?;
            } else {
                write!(
                    w,
                    "{v} {} {} {} {}",
                    node.parent, node.depth, node.balls, node.subtree_balls
                )?;
            }
            for c in self.children(v) {
                write!(w, " {c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parse the text format produced by `write_text`. The per-ball insertion
    /// history is not part of the format and comes back empty.
    pub fn from_text<R: BufRead>(r: R) -> Result<SplitTree> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty tree file".into()))??;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("splittree") || fields.next() != Some("v1") {
            return Err(Error::Parse("expected `splittree v1` header".into()));
        }
        let mut b = None;
        let mut s = None;
        let mut s0 = None;
        let mut s1 = None;
        let mut n = None;
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
            let parsed: u64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value `{field}`")))?;
            match key {
                "b" => b = Some(parsed as u32),
                "s" => s = Some(parsed as u32),
                "s0" => s0 = Some(parsed as u32),
                "s1" => s1 = Some(parsed as u32),
                "n" => n = Some(parsed),
                "seed" => {}
                _ => return Err(Error::Parse(format!("unknown header key `{key}`"))),
            }
        }
        let (b, s, s0, s1, n) = match (b, s, s0, s1, n) {
            (Some(b), Some(s), Some(s0), Some(s1), Some(n)) => (b, s, s0, s1, n),
            _ => return Err(Error::Parse("header missing a required key".into())),
        };

        let mut nodes: Vec<Node> = Vec::new();
        let mut children: Vec<Vec<u32>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut f = line.split_whitespace();
            let err = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 2));
            let idx: u32 = f
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad index"))?;
            if idx as usize != nodes.len() {
                return Err(err("nodes must appear in index order"));
            }
            let parent_tok = f.next().ok_or_else(|| err("missing parent"))?;
            let parent = if parent_tok == "-" {
                NONE
            } else {
                parent_tok.parse().map_err(|_| err("bad parent"))?
            };
            let depth: u32 = f
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad depth"))?;
            let balls: u32 = f
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad ball count"))?;
            let subtree: u64 = f
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad subtree count"))?;
            let kids: Vec<u32> = f
                .map(|t| t.parse().map_err(|_| err("bad child index")))
                .collect::<Result<_>>()?;
            if kids.len() > b as usize {
                return Err(err("more children than the branch factor"));
            }
            nodes.push(Node {
                parent,
                depth,
                balls,
                subtree_balls: subtree,
                child_base: NONE,
            });
            children.push(kids);
        }
        if nodes.is_empty() {
            return Err(Error::Parse("tree file has no nodes".into()));
        }
        let mut child_slots = Vec::new();
        for (v, kids) in children.iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            nodes[v].child_base = child_slots.len() as u32;
            for slot in 0..b as usize {
                child_slots.push(kids.get(slot).copied().unwrap_or(NONE));
            }
        }
        Ok(SplitTree {
            nodes,
            child_slots,
            b,
            s,
            s0,
            s1,
            n,
            insertion_depths: Vec::new(),
            split_vectors: None,
        })
    }

    /// Build a tree from explicit parent links: `parents[i]` is the parent of
    /// node `i + 1` and must be `< i + 1`; node 0 is the root. Every node
    /// holds one ball. Intended for fixed-shape record/cutting oracles.
    pub fn from_parents(parents: &[u32]) -> Result<SplitTree> {
        let count = parents.len() + 1;
        let mut nodes: Vec<Node> = Vec::with_capacity(count);
        nodes.push(Node {
            parent: NONE,
            depth: 0,
            balls: 1,
            subtree_balls: 1,
            child_base: NONE,
        });
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); count];
        for (i, &p) in parents.iter().enumerate() {
            let id = (i + 1) as u32;
            if p >= id {
                return Err(Error::invalid(format!(
                    "parent of node {id} must precede it, got {p}"
                )));
            }
            let depth = nodes[p as usize].depth + 1;
            nodes.push(Node {
                parent: p,
                depth,
                balls: 1,
                subtree_balls: 1,
                child_base: NONE,
            });
            children[p as usize].push(id);
        }
        for i in (1..count).rev() {
            let sub = nodes[i].subtree_balls;
            let p = nodes[i].parent as usize;
            nodes[p].subtree_balls += sub;
        }
        let b = children
            .iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(0)
            .max(2) as u32;
        let mut child_slots = Vec::new();
        for (v, kids) in children.iter().enumerate() {
            if kids.is_empty() {
                continue;
            }
            nodes[v].child_base = child_slots.len() as u32;
            for slot in 0..b as usize {
                child_slots.push(kids.get(slot).copied().unwrap_or(NONE));
            }
        }
        let insertion_depths = nodes.iter().map(|n| n.depth).collect();
        Ok(SplitTree {
            nodes,
            child_slots,
            b,
            s: 1,
            s0: 0,
            s1: 0,
            n: count as u64,
            insertion_depths,
            split_vectors: None,
        })
    }

    /// A path with `k` edges (k + 1 nodes).
    pub fn path(edges: u32) -> SplitTree {
        let parents: Vec<u32> = (0..edges).collect();
        SplitTree::from_parents(&parents).expect("path parents are valid")
    }

    /// A root with `k` children.
    pub fn star(leaves: u32) -> SplitTree {
        let parents = vec![0u32; leaves as usize];
        SplitTree::from_parents(&parents).expect("star parents are valid")
    }

    #[cfg(test)]
    pub(crate) fn nodes_mut(&mut self) -> &mut Vec<Node> {
        &mut self.nodes
    }
}

impl PartialEq for SplitTree {
    /// Structural equality: parameters, per-node data and child lists.
    fn eq(&self, other: &Self) -> bool {
        if (self.b, self.s, self.s0, self.s1, self.n) != (other.b, other.s, other.s0, other.s1, other.n)
        {
            return false;
        }
        if self.nodes.len() != other.nodes.len() {
            return false;
        }
        for v in 0..self.nodes.len() as u32 {
            let a = &self.nodes[v as usize];
            let b = &other.nodes[v as usize];
            if (a.parent, a.depth, a.balls, a.subtree_balls)
                != (b.parent, b.depth, b.balls, b.subtree_balls)
            {
                return false;
            }
            if !self.children(v).eq(other.children(v)) {
                return false;
            }
        }
        true
    }
}
