//! Simple undirected graphs on atom identifiers, maximal-clique enumeration
//! and graph isomorphism search.

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::{self, BitMatrix};

/// Vertex cap for clique enumeration.
pub const CLIQUE_VERTEX_CAP: usize = 512;
/// Maximal number of cliques enumerated before giving up.
pub const CLIQUE_COUNT_CAP: usize = 1_000_000;
/// Vertex cap for the isomorphism search.
pub const ISO_VERTEX_CAP: usize = 64;
/// Default node budget for the isomorphism search.
pub const DEFAULT_GRAPH_ISO_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("search budget exceeded after {0} nodes")]
    SearchBudgetExceeded(u64),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),
}

/// A simple undirected graph: no loops, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomGraph {
    labels: Vec<String>,
    adj: BitMatrix,
}

/// All maximal cliques of a graph, lexicographically ordered by their sorted
/// vertex lists. Every vertex and every edge appears in at least one clique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCover {
    pub cliques: Vec<Vec<usize>>,
}

impl AtomGraph {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        AtomGraph {
            labels,
            adj: BitMatrix::new(n),
        }
    }

    /// Build from labels and an edge list given as label pairs.
    pub fn from_edges(labels: Vec<String>, edges: &[(String, String)]) -> Result<Self, GraphError> {
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(l.clone()));
            }
        }
        let mut g = AtomGraph::new(labels);
        for (a, b) in edges {
            let &ia = seen
                .get(a)
                .ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let &ib = seen
                .get(b)
                .ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            if ia != ib {
                g.add_edge(ia, ib);
            }
        }
        Ok(g)
    }

    /// Complete graph on the given labels.
    pub fn complete(labels: Vec<String>) -> Self {
        let mut g = AtomGraph::new(labels);
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                g.add_edge(i, j);
            }
        }
        g
    }

    /// Cycle v0 - v1 - ... - v(n-1) - v0.
    pub fn cycle(n: usize) -> Self {
        let mut g = AtomGraph::new((0..n).map(|i| format!("v{i}")).collect());
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    /// Path v0 - v1 - ... - v(n-1).
    pub fn path(n: usize) -> Self {
        let mut g = AtomGraph::new((0..n).map(|i| format!("v{i}")).collect());
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Edgeless graph on `n` vertices.
    pub fn edgeless(n: usize) -> Self {
        AtomGraph::new((0..n).map(|i| format!("v{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "loops are not allowed");
        self.adj.set(i, j, true);
        self.adj.set(j, i, true);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn degree(&self, i: usize) -> usize {
        bits::count(self.adj.row(i))
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row_ones(i)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Induced subgraph on the given vertices, in the given order.
    pub fn induced(&self, vertices: &[usize]) -> AtomGraph {
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        let mut g = AtomGraph::new(labels);
        for (i, &vi) in vertices.iter().enumerate() {
            for (j, &vj) in vertices.iter().enumerate().skip(i + 1) {
                if self.adjacent(vi, vj) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// All maximal cliques, pivoting Bron-Kerbosch, deterministic output.
    pub fn maximal_cliques(&self) -> Result<CliqueCover, GraphError> {
        if self.len() > CLIQUE_VERTEX_CAP {
            return Err(GraphError::CapExceeded(format!(
                "{} vertices exceed clique cap {CLIQUE_VERTEX_CAP}",
                self.len()
            )));
        }
        let cliques = enumerate_cliques_on(&self.adj, false, CLIQUE_COUNT_CAP)
            .map_err(|n| GraphError::CapExceeded(format!("more than {n} maximal cliques")))?;
        Ok(CliqueCover { cliques })
    }

    /// Single-threaded clique enumeration, identical output.
    pub(crate) fn maximal_cliques_serial(&self) -> Result<CliqueCover, GraphError> {
        if self.len() > CLIQUE_VERTEX_CAP {
            return Err(GraphError::CapExceeded(format!(
                "{} vertices exceed clique cap {CLIQUE_VERTEX_CAP}",
                self.len()
            )));
        }
        let cliques = enumerate_cliques_serial(&self.adj, false, CLIQUE_COUNT_CAP)
            .map_err(|n| GraphError::CapExceeded(format!("more than {n} maximal cliques")))?;
        Ok(CliqueCover { cliques })
    }

    /// DOT rendering; maximal cliques become color hints where available.
    pub fn to_dot(&self, cover: Option<&CliqueCover>) -> String {
        let mut out = String::from("graph atomgraph {\n  node [shape=circle];\n");
        let mut color = vec![0usize; self.len()];
        if let Some(cover) = cover {
            for (ci, clique) in cover.cliques.iter().enumerate() {
                out.push_str(&format!(
                    "  // clique {}: {}\n",
                    ci,
                    clique
                        .iter()
                        .map(|&v| self.labels[v].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                ));
                for &v in clique {
                    if color[v] == 0 {
                        color[v] = ci % 11 + 1;
                    }
                }
            }
        }
        for (i, l) in self.labels.iter().enumerate() {
            if color[i] > 0 {
                out.push_str(&format!(
                    "  \"{l}\" [colorscheme=spectral11, style=filled, fillcolor={}];\n",
                    color[i]
                ));
            } else {
                out.push_str(&format!("  \"{l}\";\n"));
            }
        }
        for (i, j) in self.edges() {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\";\n",
                self.labels[i], self.labels[j]
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Compare vertex sets lexicographically by their sorted id lists.
pub(crate) fn lex_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.iter().cmp(b.iter()).then(a.len().cmp(&b.len()))
}

/// Enumerate all maximal cliques of the given adjacency matrix. When
/// `strip_diagonal` is set, self-loops in the matrix are ignored (used for
/// reflexive compatibility relations). Errors with the cap when the count
/// exceeds it.
pub(crate) fn enumerate_cliques_on(
    adj: &BitMatrix,
    strip_diagonal: bool,
    cap: usize,
) -> Result<Vec<Vec<usize>>, usize> {
    let n = adj.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = bits::blocks_for(n);
    // Local neighbor rows with the diagonal cleared.
    let mut rows: Vec<u64> = Vec::with_capacity(n * width);
    for i in 0..n {
        let mut row = adj.row(i).to_vec();
        if strip_diagonal || adj.get(i, i) {
            row[i / 64] &= !(1u64 << (i % 64));
        }
        rows.extend_from_slice(&row);
    }
    let neighbors = |v: usize| &rows[v * width..(v + 1) * width];

    let mut full = vec![u64::MAX; width];
    if !n.is_multiple_of(64) {
        full[width - 1] = (1u64 << (n % 64)) - 1;
    }

    // Top-level branch frames, then each branch explored independently.
    let branches = branch_frames(&rows, width, Vec::new(), full.clone(), vec![0u64; width]);
    let results = crate::exec::flat_map(branches, |(r, p, x)| {
        let mut out = Vec::new();
        let mut overflow = false;
        bron_kerbosch(&neighbors, r, p, x, cap, &mut out, &mut overflow);
        if overflow {
            vec![Err(())]
        } else {
            out.into_iter().map(Ok).collect()
        }
    });

    let mut cliques = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(c) => cliques.push(c),
            Err(()) => return Err(cap),
        }
    }
    if cliques.len() > cap {
        return Err(cap);
    }
    cliques.sort_unstable_by(|a, b| lex_cmp(a, b));
    cliques.dedup();
    Ok(cliques)
}

/// Root-only recursion for the sequential reference path.
pub(crate) fn enumerate_cliques_serial(
    adj: &BitMatrix,
    strip_diagonal: bool,
    cap: usize,
) -> Result<Vec<Vec<usize>>, usize> {
    let n = adj.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = bits::blocks_for(n);
    let mut rows: Vec<u64> = Vec::with_capacity(n * width);
    for i in 0..n {
        let mut row = adj.row(i).to_vec();
        if strip_diagonal || adj.get(i, i) {
            row[i / 64] &= !(1u64 << (i % 64));
        }
        rows.extend_from_slice(&row);
    }
    let neighbors = |v: usize| &rows[v * width..(v + 1) * width];
    let mut full = vec![u64::MAX; width];
    if !n.is_multiple_of(64) {
        full[width - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut out = Vec::new();
    let mut overflow = false;
    bron_kerbosch(
        &neighbors,
        Vec::new(),
        full,
        vec![0u64; width],
        cap,
        &mut out,
        &mut overflow,
    );
    if overflow || out.len() > cap {
        return Err(cap);
    }
    out.sort_unstable_by(|a, b| lex_cmp(a, b));
    out.dedup();
    Ok(out)
}

type Frame = (Vec<usize>, Vec<u64>, Vec<u64>);

/// Split the root call of the pivoting recursion into independent frames.
fn branch_frames(
    rows: &[u64],
    width: usize,
    r: Vec<usize>,
    p: Vec<u64>,
    x: Vec<u64>,
) -> Vec<Frame> {
    if bits::count(&p) == 0 {
        return vec![(r, p, x)];
    }
    let neighbors = |v: usize| &rows[v * width..(v + 1) * width];
    let pivot = pick_pivot(&neighbors, &p, &x);
    let mut candidates: Vec<usize> = bits::ones(&p)
        .filter(|&v| !bit(neighbors(pivot), v))
        .collect();
    candidates.sort_unstable();
    let mut frames = Vec::with_capacity(candidates.len());
    let mut p = p;
    let mut x = x;
    for v in candidates.drain(..) {
        let nv = neighbors(v);
        let mut r2 = r.clone();
        r2.push(v);
        let p2: Vec<u64> = p.iter().zip(nv).map(|(a, b)| a & b).collect();
        let x2: Vec<u64> = x.iter().zip(nv).map(|(a, b)| a & b).collect();
        frames.push((r2, p2, x2));
        clear_bit(&mut p, v);
        set_bit(&mut x, v);
    }
    frames
}

#[inline]
fn bit(row: &[u64], v: usize) -> bool {
    row[v / 64] >> (v % 64) & 1 == 1
}

#[inline]
fn set_bit(row: &mut [u64], v: usize) {
    row[v / 64] |= 1 << (v % 64);
}

#[inline]
fn clear_bit(row: &mut [u64], v: usize) {
    row[v / 64] &= !(1 << (v % 64));
}

fn pick_pivot<'a, N>(neighbors: &N, p: &[u64], x: &[u64]) -> usize
where
    N: Fn(usize) -> &'a [u64],
{
    let mut best = usize::MAX;
    let mut best_score = usize::MAX;
    for v in bits::ones(p).chain(bits::ones(x)) {
        let nv = neighbors(v);
        let score = p
            .iter()
            .zip(nv)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum::<usize>();
        // maximize |P ∩ N(v)|; ties to the smaller id for determinism
        let score = usize::MAX - score;
        if score < best_score || (score == best_score && v < best) {
            best_score = score;
            best = v;
        }
    }
    debug_assert!(best != usize::MAX);
    best
}

#[allow(clippy::too_many_arguments)]
fn bron_kerbosch<'a, N>(
    neighbors: &N,
    r: Vec<usize>,
    p: Vec<u64>,
    x: Vec<u64>,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
    overflow: &mut bool,
) where
    N: Fn(usize) -> &'a [u64],
{
    if *overflow {
        return;
    }
    if bits::count(&p) == 0 {
        if bits::count(&x) == 0 {
            let mut clique = r;
            clique.sort_unstable();
            out.push(clique);
            if out.len() > cap {
                *overflow = true;
            }
        }
        return;
    }
    let pivot = pick_pivot(neighbors, &p, &x);
    let candidates: Vec<usize> = bits::ones(&p)
        .filter(|&v| !bit(neighbors(pivot), v))
        .collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let nv = neighbors(v);
        let mut r2 = r.clone();
        r2.push(v);
        let p2: Vec<u64> = p.iter().zip(nv).map(|(a, b)| a & b).collect();
        let x2: Vec<u64> = x.iter().zip(nv).map(|(a, b)| a & b).collect();
        bron_kerbosch(neighbors, r2, p2, x2, cap, out, overflow);
        if *overflow {
            return;
        }
        clear_bit(&mut p, v);
        set_bit(&mut x, v);
    }
}

/// Adjacency-preserving bijection between two graphs if one exists.
///
/// Backtracking over vertices ordered most-constrained-first, pruned by
/// degree and neighborhood-degree invariants. `budget` bounds the number of
/// search nodes.
pub fn graphs_isomorphic(
    g1: &AtomGraph,
    g2: &AtomGraph,
    budget: u64,
) -> Result<Option<Vec<usize>>, GraphError> {
    if g1.len() > ISO_VERTEX_CAP || g2.len() > ISO_VERTEX_CAP {
        return Err(GraphError::CapExceeded(format!(
            "isomorphism search capped at {ISO_VERTEX_CAP} vertices"
        )));
    }
    if g1.len() != g2.len() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let n = g1.len();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }

    let invariant = |g: &AtomGraph, v: usize| {
        let mut nd: Vec<usize> = g.neighbors(v).map(|u| g.degree(u)).collect();
        nd.sort_unstable();
        (g.degree(v), nd)
    };
    let inv1: Vec<_> = (0..n).map(|v| invariant(g1, v)).collect();
    let inv2: Vec<_> = (0..n).map(|v| invariant(g2, v)).collect();
    {
        let mut s1 = inv1.clone();
        let mut s2 = inv2.clone();
        s1.sort();
        s2.sort();
        if s1 != s2 {
            return Ok(None);
        }
    }

    // Order g1's vertices by ascending invariant-class size, then id.
    let mut class_size: HashMap<&(usize, Vec<usize>), usize> = HashMap::new();
    for i in &inv1 {
        *class_size.entry(i).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (class_size[&inv1[v]], v));

    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut nodes = 0u64;
    let found = iso_search(
        g1,
        g2,
        &inv1,
        &inv2,
        &order,
        0,
        &mut mapping,
        &mut used,
        &mut nodes,
        budget,
    )?;
    Ok(found.then_some(mapping))
}

#[allow(clippy::too_many_arguments)]
fn iso_search(
    g1: &AtomGraph,
    g2: &AtomGraph,
    inv1: &[(usize, Vec<usize>)],
    inv2: &[(usize, Vec<usize>)],
    order: &[usize],
    depth: usize,
    mapping: &mut [usize],
    used: &mut [bool],
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, GraphError> {
    if depth == order.len() {
        return Ok(true);
    }
    *nodes += 1;
    if *nodes > budget {
        return Err(GraphError::SearchBudgetExceeded(budget));
    }
    let v = order[depth];
    for w in 0..g2.len() {
        if used[w] || inv1[v] != inv2[w] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| g1.adjacent(v, u) == g2.adjacent(w, mapping[u]));
        if !consistent {
            continue;
        }
        mapping[v] = w;
        used[w] = true;
        if iso_search(
            g1,
            g2,
            inv1,
            inv2,
            order,
            depth + 1,
            mapping,
            used,
            nodes,
            budget,
        )? {
            return Ok(true);
        }
        mapping[v] = usize::MAX;
        used[w] = false;
    }
    Ok(false)
}
