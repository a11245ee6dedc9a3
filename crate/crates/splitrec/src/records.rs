//! Records and cuttings on a fixed rooted tree.
//!
//! Attach i.i.d. continuous labels to the vertices; a label is a record when
//! it is strictly smallest on the path from the root. `X_v` counts vertex
//! records, `X_e` the edge analogue. Cutting removes uniformly random
//! vertices (or edges), keeping only the root component, until the root is
//! cut (or isolated); the cut count has the same law as the record count.
//! Exact expectations `E X_v = Σ_v 1/(d(v)+1)` and
//! `E X_e = Σ_{v≠root} 1/d(v)` serve as oracles.

use std::collections::HashSet;
use std::io::Write;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::tree::SplitTree;

/// One i.i.d. label per vertex, all distinct (ties are redrawn).
#[derive(Clone, Debug)]
pub struct LabelAssignment {
    labels: Vec<f64>,
}

impl LabelAssignment {
    /// Draw Exp(1) labels for every vertex. Only the order relations matter,
    /// so the choice of continuous law does not affect record counts.
    pub fn draw_exponential<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> Self {
        Self::draw_with(tree, rng, |r| r.sample(Exp1))
    }

    /// Draw uniform(0,1) labels; used to check label-law invariance.
    pub fn draw_uniform<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> Self {
        Self::draw_with(tree, rng, |r| r.random())
    }

    fn draw_with<R: Rng + ?Sized>(
        tree: &SplitTree,
        rng: &mut R,
        mut draw: impl FnMut(&mut R) -> f64,
    ) -> Self {
        let count = tree.node_count() as usize;
        let mut labels = Vec::with_capacity(count);
        let mut seen = HashSet::with_capacity(count);
        for _ in 0..count {
            let mut x = draw(rng);
            while !seen.insert(x.to_bits()) {
                x = draw(rng);
            }
            labels.push(x);
        }
        LabelAssignment { labels }
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Number of vertex records under the given labels (root always counts).
pub fn count_records_vertices_with(tree: &SplitTree, labels: &LabelAssignment) -> u64 {
    let lab = labels.labels();
    let mut count = 0u64;
    let mut stack = vec![(tree.root(), f64::INFINITY)];
    while let Some((v, min_above)) = stack.pop() {
        let l = lab[v as usize];
        if l < min_above {
            count += 1;
        }
        let min_here = min_above.min(l);
        for c in tree.children(v) {
            stack.push((c, min_here));
        }
    }
    count
}

/// Draw labels and count vertex records; `1 <= X_v <= N`.
pub fn count_records_vertices<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> u64 {
    count_records_vertices_with(tree, &LabelAssignment::draw_exponential(tree, rng))
}

/// Number of edge records. Edges are identified with their child endpoint;
/// `0 <= X_e <= N - 1`.
pub fn count_records_edges_with(tree: &SplitTree, labels: &LabelAssignment) -> u64 {
    let lab = labels.labels();
    let mut count = 0u64;
    let mut stack: Vec<(u32, f64)> =
        tree.children(tree.root()).map(|c| (c, f64::INFINITY)).collect();
    while let Some((v, min_above)) = stack.pop() {
        let l = lab[v as usize];
        if l < min_above {
            count += 1;
        }
        let min_here = min_above.min(l);
        for c in tree.children(v) {
            stack.push((c, min_here));
        }
    }
    count
}

pub fn count_records_edges<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> u64 {
    count_records_edges_with(tree, &LabelAssignment::draw_exponential(tree, rng))
}

/// Histogram over depth of the vertex records of one labelling.
pub fn record_depth_histogram<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> Vec<u64> {
    let labels = LabelAssignment::draw_exponential(tree, rng);
    let lab = labels.labels();
    let height = tree.nodes().iter().map(|n| n.depth).max().unwrap_or(0);
    let mut hist = vec![0u64; height as usize + 1];
    let mut stack = vec![(tree.root(), f64::INFINITY)];
    while let Some((v, min_above)) = stack.pop() {
        let l = lab[v as usize];
        if l < min_above {
            hist[tree.depth(v) as usize] += 1;
        }
        let min_here = min_above.min(l);
        for c in tree.children(v) {
            stack.push((c, min_here));
        }
    }
    hist
}

/// Vertex records when an external minimum `cap` bounds the root path: the
/// root label is replaced by `cap` and only non-root records are counted.
/// Monte Carlo counterpart of [`conditional_expected_records`].
pub fn count_records_vertices_capped<R: Rng + ?Sized>(
    tree: &SplitTree,
    cap: f64,
    rng: &mut R,
) -> u64 {
    let labels = LabelAssignment::draw_exponential(tree, rng);
    let lab = labels.labels();
    let mut count = 0u64;
    let mut stack: Vec<(u32, f64)> = tree.children(tree.root()).map(|c| (c, cap)).collect();
    while let Some((v, min_above)) = stack.pop() {
        let l = lab[v as usize];
        if l < min_above {
            count += 1;
        }
        let min_here = min_above.min(l);
        for c in tree.children(v) {
            stack.push((c, min_here));
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutKind {
    Vertex,
    Edge,
}

/// Ordered list of cut choices made by one run of the cutting process.
#[derive(Clone, Debug)]
pub struct CutTrace {
    pub kind: CutKind,
    pub cuts: Vec<u32>,
}

impl CutTrace {
    pub fn count(&self) -> u64 {
        self.cuts.len() as u64
    }

    /// One CSV row per cut: `step,kind,node_index`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "step,kind,node_index")?;
        let kind = match self.kind {
            CutKind::Vertex => "vertex",
            CutKind::Edge => "edge",
        };
        for (step, v) in self.cuts.iter().enumerate() {
            writeln!(w, "{},{},{}", step + 1, kind, v)?;
        }
        Ok(())
    }
}

struct AliveSet {
    members: Vec<u32>,
    position: Vec<u32>,
}

const GONE: u32 = u32::MAX;

impl AliveSet {
    fn new(members: Vec<u32>, capacity: usize) -> Self {
        let mut position = vec![GONE; capacity];
        for (i, &v) in members.iter().enumerate() {
            position[v as usize] = i as u32;
        }
        AliveSet { members, position }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn contains(&self, v: u32) -> bool {
        self.position[v as usize] != GONE
    }

    fn remove(&mut self, v: u32) {
        let i = self.position[v as usize];
        debug_assert!(i != GONE);
        let last = *self.members.last().unwrap();
        self.members[i as usize] = last;
        self.position[last as usize] = i;
        self.members.pop();
        self.position[v as usize] = GONE;
    }

    fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.members[rng.random_range(0..self.members.len())]
    }
}

fn remove_subtree(tree: &SplitTree, alive: &mut AliveSet, v: u32, scratch: &mut Vec<u32>) {
    scratch.clear();
    scratch.push(v);
    while let Some(u) = scratch.pop() {
        if alive.contains(u) {
            alive.remove(u);
        }
        for c in tree.children(u) {
            if alive.contains(c) {
                scratch.push(c);
            }
        }
    }
}

/// Cut uniformly random remaining vertices, discarding everything outside
/// the root component, until the root itself is cut. The returned count is
/// distributed as the vertex record count on the same tree.
pub fn simulate_cuts_vertices<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> CutTrace {
    let count = tree.node_count() as usize;
    let mut alive = AliveSet::new((0..count as u32).collect(), count);
    let mut cuts = Vec::new();
    let mut scratch = Vec::new();
    loop {
        let v = alive.choose(rng);
        cuts.push(v);
        if v == tree.root() {
            break;
        }
        remove_subtree(tree, &mut alive, v, &mut scratch);
    }
    CutTrace {
        kind: CutKind::Vertex,
        cuts,
    }
}

/// Edge variant: cut uniformly random remaining edges until only the root is
/// left. Edges are identified with their child endpoints.
pub fn simulate_cuts_edges<R: Rng + ?Sized>(tree: &SplitTree, rng: &mut R) -> CutTrace {
    let count = tree.node_count() as usize;
    let mut alive = AliveSet::new((1..count as u32).collect(), count);
    let mut cuts = Vec::new();
    let mut scratch = Vec::new();
    while alive.len() > 0 {
        let v = alive.choose(rng);
        cuts.push(v);
        remove_subtree(tree, &mut alive, v, &mut scratch);
    }
    CutTrace {
        kind: CutKind::Edge,
        cuts,
    }
}

/// `E X_v(T) = Σ_v 1/(d(v)+1)`, exactly.
pub fn expected_records_vertices(tree: &SplitTree) -> f64 {
    tree.nodes()
        .iter()
        .map(|n| 1.0 / (n.depth as f64 + 1.0))
        .sum()
}

/// `E X_e(T) = Σ_{v != root} 1/d(v)`, exactly.
pub fn expected_records_edges(tree: &SplitTree) -> f64 {
    tree.nodes()
        .iter()
        .filter(|n| n.depth > 0)
        .map(|n| 1.0 / n.depth as f64)
        .sum()
}

/// Expected number of records among non-root vertices when an external
/// minimum `cap` bounds the root path:
/// `φ(T, Λ) = Σ_{v != root} (1 - e^{-d(v) Λ}) / d(v)`.
///
/// `Λ = +∞` is allowed and reduces the sum to `Σ 1/d(v)`.
pub fn conditional_expected_records(tree: &SplitTree, cap: f64) -> Result<f64> {
    if !(cap > 0.0) {
        return Err(Error::invalid("the label cap must be positive"));
    }
    Ok(tree
        .nodes()
        .iter()
        .filter(|n| n.depth > 0)
        .map(|n| {
            let d = n.depth as f64;
            (1.0 - (-d * cap).exp()) / d
        })
        .sum())
}

/// Exact nonnegative rational, reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0);
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn add(self, other: Rational) -> Rational {
        Rational::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// `Σ_v 1/(d(v)+1)` as an exact rational (depths must stay small).
pub fn expected_records_vertices_rational(tree: &SplitTree) -> Rational {
    tree.nodes()
        .iter()
        .map(|n| Rational::new(1, n.depth as u64 + 1))
        .fold(Rational::new(0, 1), Rational::add)
}

/// `Σ_{v != root} 1/d(v)` as an exact rational.
pub fn expected_records_edges_rational(tree: &SplitTree) -> Rational {
    tree.nodes()
        .iter()
        .filter(|n| n.depth > 0)
        .map(|n| Rational::new(1, n.depth as u64))
        .fold(Rational::new(0, 1), Rational::add)
}

/// Exact mean record count over all label orderings, by permutation
/// enumeration. Restricted to 8 labelled items (`N <= 8` for vertices,
/// `N - 1 <= 8` for edges); this is the independent oracle for the
/// expectation identities above.
pub fn brute_force_mean_records(tree: &SplitTree, kind: CutKind) -> Result<Rational> {
    let n_nodes = tree.node_count() as usize;
    let items = match kind {
        CutKind::Vertex => n_nodes,
        CutKind::Edge => n_nodes - 1,
    };
    if items > 8 {
        return Err(Error::invalid(format!(
            "brute force limited to 8 labelled items, tree needs {items}"
        )));
    }
    if items == 0 {
        return Ok(Rational::new(0, 1));
    }
    // Arena order puts parents before children, so one forward sweep
    // propagates path minima.
    let parent: Vec<u32> = tree.nodes().iter().map(|n| n.parent).collect();
    for (v, &p) in parent.iter().enumerate().skip(1) {
        debug_assert!((p as usize) < v);
    }

    let mut ranks: Vec<u32> = (0..items as u32).collect();
    let mut total: u64 = 0;
    let mut permutations: u64 = 0;
    let mut min_to = vec![0u32; n_nodes];
    let count_once = |ranks: &[u32], min_to: &mut [u32]| -> u64 {
        let mut count = 0u64;
        match kind {
            CutKind::Vertex => {
                for v in 0..n_nodes {
                    let above = if v == 0 {
                        u32::MAX
                    } else {
                        min_to[parent[v] as usize]
                    };
                    let r = ranks[v];
                    if r < above {
                        count += 1;
                    }
                    min_to[v] = above.min(r);
                }
            }
            CutKind::Edge => {
                min_to[0] = u32::MAX;
                for v in 1..n_nodes {
                    let above = min_to[parent[v] as usize];
                    let r = ranks[v - 1];
                    if r < above {
                        count += 1;
                    }
                    min_to[v] = above.min(r);
                }
            }
        }
        count
    };

    // Heap's algorithm over the rank assignment.
    let m = items;
    let mut c = vec![0usize; m];
    total += count_once(&ranks, &mut min_to);
    permutations += 1;
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                ranks.swap(0, i);
            } else {
                ranks.swap(c[i], i);
            }
            total += count_once(&ranks, &mut min_to);
            permutations += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(Rational::new(total, permutations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, tags};
    use crate::tree::{generate_tree, SplitParams};

    fn mean_and_se(samples: &[f64]) -> (f64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn single_node_cases() {
        let t = SplitTree::from_parents(&[]).unwrap();
        let mut rng = stream(1, &[]);
        assert_eq!(count_records_vertices(&t, &mut rng), 1);
        assert_eq!(count_records_edges(&t, &mut rng), 0);
        assert_eq!(simulate_cuts_vertices(&t, &mut rng).count(), 1);
        assert_eq!(simulate_cuts_edges(&t, &mut rng).count(), 0);
        assert_eq!(expected_records_vertices(&t), 1.0);
        assert_eq!(expected_records_edges(&t), 0.0);
    }

    #[test]
    fn two_node_path_record_mean() {
        // The child is a record with probability 1/2 (both label orderings).
        let t = SplitTree::path(1);
        let mut rng = stream(2, &[tags::RECORDS_V]);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| count_records_vertices(&t, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!((mean - 1.5).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn star_record_mean() {
        for k in 1..=3u32 {
            let t = SplitTree::star(k);
            let mut rng = stream(3 + k as u64, &[tags::RECORDS_V]);
            let samples: Vec<f64> = (0..60_000)
                .map(|_| count_records_vertices(&t, &mut rng) as f64)
                .collect();
            let (mean, se) = mean_and_se(&samples);
            let expect = 1.0 + k as f64 / 2.0;
            assert!((mean - expect).abs() <= 3.5 * se, "k={k}: mean {mean}, se {se}");
            // brute-force enumeration agrees exactly
            let brute = brute_force_mean_records(&t, CutKind::Vertex).unwrap();
            let direct = expected_records_vertices_rational(&t);
            assert_eq!(brute, direct);
        }
    }

    #[test]
    fn path_edge_records_are_harmonic() {
        let t = SplitTree::path(2);
        let mut rng = stream(6, &[tags::RECORDS_E]);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| count_records_edges(&t, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!((mean - 1.5).abs() <= 3.0 * se, "mean {mean}, se {se}");
        // H_3 for the 3-edge path, exactly
        let t3 = SplitTree::path(3);
        let exact = expected_records_edges_rational(&t3);
        assert_eq!(exact, Rational::new(11, 6));
    }

    #[test]
    fn star_edges_all_records() {
        let t = SplitTree::star(5);
        let mut rng = stream(7, &[tags::RECORDS_E]);
        for _ in 0..50 {
            assert_eq!(count_records_edges(&t, &mut rng), 5);
            assert_eq!(simulate_cuts_edges(&t, &mut rng).count(), 5);
        }
    }

    #[test]
    fn two_node_path_cut_distribution() {
        let t = SplitTree::path(1);
        let mut rng = stream(8, &[tags::CUTS_V]);
        let reps = 100_000;
        let mut ones = 0u64;
        let mut sum = 0u64;
        for _ in 0..reps {
            let c = simulate_cuts_vertices(&t, &mut rng).count();
            sum += c;
            if c == 1 {
                ones += 1;
            }
        }
        let p1 = ones as f64 / reps as f64;
        let se_p = (0.25f64 / reps as f64).sqrt();
        assert!((p1 - 0.5).abs() <= 3.0 * se_p, "P(count=1) = {p1}");
        let mean = sum as f64 / reps as f64;
        assert!((mean - 1.5).abs() <= 0.01, "mean {mean}");
    }

    #[test]
    fn cut_trace_shape() {
        let params = SplitParams::bst();
        let mut rng = stream(9, &[tags::TREE]);
        let tree = generate_tree(&params, 64, &mut rng).unwrap();
        let trace = simulate_cuts_vertices(&tree, &mut rng);
        assert_eq!(trace.count(), trace.cuts.len() as u64);
        assert_eq!(*trace.cuts.last().unwrap(), tree.root());
        let mut csv = Vec::new();
        trace.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("step,kind,node_index\n"));
        assert!(text.lines().count() as u64 == trace.count() + 1);
    }

    #[test]
    fn record_count_bounds() {
        let params = SplitParams::mary(3).unwrap();
        for seed in 0..10 {
            let mut rng = stream(100 + seed, &[tags::TREE]);
            let tree = generate_tree(&params, 200, &mut rng).unwrap();
            let n_nodes = tree.node_count();
            let xv = count_records_vertices(&tree, &mut rng);
            assert!(xv >= 1 && xv <= n_nodes);
            let xe = count_records_edges(&tree, &mut rng);
            assert!(xe <= n_nodes - 1);
        }
    }

    #[test]
    fn conditional_expectation_limits() {
        let two = SplitTree::path(1);
        // cap -> 0+ kills every record
        assert!(conditional_expected_records(&two, 1e-300).unwrap() < 1e-290);
        // cap = +inf reduces to sum of 1/d
        let phi = conditional_expected_records(&two, f64::INFINITY).unwrap();
        assert!((phi - 1.0).abs() < 1e-15);
        assert!(conditional_expected_records(&two, 0.0).is_err());
        assert!(conditional_expected_records(&two, -1.0).is_err());
    }

    #[test]
    fn conditional_expectation_matches_monte_carlo() {
        // Fixed 20-node tree, cap 0.3.
        let parents = [0, 0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 8, 8, 9, 11, 12, 14, 14, 16];
        let tree = SplitTree::from_parents(&parents).unwrap();
        assert_eq!(tree.node_count(), 20);
        let cap = 0.3;
        let phi = conditional_expected_records(&tree, cap).unwrap();
        let mut rng = stream(11, &[tags::LABELS]);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| count_records_vertices_capped(&tree, cap, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!((mean - phi).abs() <= 3.0 * se, "mean {mean}, phi {phi}, se {se}");
    }

    #[test]
    fn brute_force_simple_trees() {
        let single = SplitTree::from_parents(&[]).unwrap();
        assert_eq!(
            brute_force_mean_records(&single, CutKind::Vertex).unwrap(),
            Rational::new(1, 1)
        );
        let path3 = SplitTree::path(2); // 3 nodes
        assert_eq!(
            brute_force_mean_records(&path3, CutKind::Vertex).unwrap(),
            Rational::new(11, 6)
        );
        let cherry = SplitTree::star(2);
        assert_eq!(
            brute_force_mean_records(&cherry, CutKind::Vertex).unwrap(),
            Rational::new(2, 1)
        );
        // complete binary tree of height 2: E X_e = 2 + 4/2 = 4
        let cbt = SplitTree::from_parents(&[0, 0, 1, 1, 2, 2]).unwrap();
        assert_eq!(
            brute_force_mean_records(&cbt, CutKind::Edge).unwrap(),
            Rational::new(4, 1)
        );
        // oversized trees are rejected
        let big = SplitTree::path(9);
        assert!(brute_force_mean_records(&big, CutKind::Vertex).is_err());
    }

    #[test]
    fn label_law_invariance() {
        // Exp(1) and uniform labels give the same record-count law
        // (two-sample KS at level 0.001 on a fixed 50-node tree).
        let mut tree_rng = stream(12, &[tags::TREE]);
        let tree = generate_tree(&SplitParams::bst(), 50, &mut tree_rng).unwrap();
        let reps = 10_000;
        let mut rng_a = stream(13, &[tags::LABELS, 0]);
        let mut rng_b = stream(13, &[tags::LABELS, 1]);
        let a: Vec<f64> = (0..reps)
            .map(|_| {
                let l = LabelAssignment::draw_exponential(&tree, &mut rng_a);
                count_records_vertices_with(&tree, &l) as f64
            })
            .collect();
        let b: Vec<f64> = (0..reps)
            .map(|_| {
                let l = LabelAssignment::draw_uniform(&tree, &mut rng_b);
                count_records_vertices_with(&tree, &l) as f64
            })
            .collect();
        let (_d, p) = crate::stats::ks_two_sample(&a, &b).unwrap();
        assert!(p >= 0.001, "p = {p}");
    }

    #[test]
    fn monotone_in_added_nodes() {
        let base = SplitTree::from_parents(&[0, 1, 1, 2]).unwrap();
        let grown = SplitTree::from_parents(&[0, 1, 1, 2, 4]).unwrap();
        assert!(expected_records_vertices(&grown) > expected_records_vertices(&base));
    }
}
