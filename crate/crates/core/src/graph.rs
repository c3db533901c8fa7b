//! Finite simple undirected graphs on `0..n`, stored as one `u64` neighbourhood mask per vertex.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{bit, low_mask, Bits};
use crate::error::{Error, Result};

/// Largest supported order. Every vertex set fits in a `u64`.
pub const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}; ", self.n)?;
        let mut first = true;
        for (u, v) in self.edges() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{u}-{v}")?;
        }
        write!(f, ")")
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    ///
    /// Panics if `n > MAX_ORDER`; use [`Graph::try_empty`] for untrusted sizes.
    pub fn empty(n: usize) -> Self {
        Self::try_empty(n).expect("graph order out of range")
    }

    pub fn try_empty(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::OrderBound { order: n, bound: MAX_ORDER });
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::try_empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge {u}-{v} out of range for order {n}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Builds a graph from raw neighbourhood masks. The masks must be symmetric and loop-free.
    pub fn from_masks(adj: Vec<u64>) -> Result<Self> {
        let n = adj.len();
        if n > MAX_ORDER {
            return Err(Error::OrderBound { order: n, bound: MAX_ORDER });
        }
        for (u, &m) in adj.iter().enumerate() {
            if m & !low_mask(n) != 0 || m & bit(u) != 0 {
                return Err(Error::InvalidParameter(format!("bad neighbourhood mask at vertex {u}")));
            }
            for v in Bits(m) {
                if adj[v] & bit(u) == 0 {
                    return Err(Error::InvalidParameter(format!("asymmetric adjacency {u}-{v}")));
                }
            }
        }
        Ok(Graph { n, adj })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// All vertices as a mask.
    #[inline]
    pub fn vertex_mask(&self) -> u64 {
        low_mask(self.n)
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> u64 {
        self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] & bit(v) != 0
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge {u}-{v}");
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !bit(v);
        self.adj[v] &= !bit(u);
    }

    /// Appends a vertex adjacent to exactly `nbrs` and returns its label.
    pub fn add_vertex(&mut self, nbrs: u64) -> Result<usize> {
        if self.n == MAX_ORDER {
            return Err(Error::OrderBound { order: self.n + 1, bound: MAX_ORDER });
        }
        debug_assert_eq!(nbrs & !self.vertex_mask(), 0);
        let v = self.n;
        self.n += 1;
        self.adj.push(nbrs);
        for u in Bits(nbrs) {
            self.adj[u] |= bit(v);
        }
        Ok(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| Bits(self.adj[u] & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Induced subgraph on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = [usize::MAX; MAX_ORDER];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| Bits(self.adj[v]).filter(|&w| pos[w] != usize::MAX).fold(0u64, |m, w| m | bit(pos[w])))
            .collect();
        Graph { n: vertices.len(), adj }
    }

    pub fn induced_mask(&self, mask: u64) -> Graph {
        self.induced(&Bits(mask).collect::<Vec<_>>())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        debug_assert_eq!(perm.len(), self.n);
        let mut adj = vec![0u64; self.n];
        for u in 0..self.n {
            adj[perm[u]] = Bits(self.adj[u]).fold(0u64, |m, w| m | bit(perm[w]));
        }
        Graph { n: self.n, adj }
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.order()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let n = self.n + other.n;
        if n > MAX_ORDER {
            return Err(Error::OrderBound { order: n, bound: MAX_ORDER });
        }
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|m| m << self.n));
        Ok(Graph { n, adj })
    }

    /// True if the subgraph induced on the first `prefix.order()` labels equals `prefix`.
    pub fn has_prefix(&self, prefix: &Graph) -> bool {
        let m = prefix.n;
        m <= self.n && (0..m).all(|v| self.adj[v] & low_mask(m) == prefix.adj[v])
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.component_of(0) == self.vertex_mask()
    }

    pub fn component_of(&self, v: usize) -> u64 {
        let mut seen = bit(v);
        let mut frontier = bit(v);
        while frontier != 0 {
            let mut next = 0;
            for u in Bits(frontier) {
                next |= self.adj[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    pub fn components(&self) -> Vec<u64> {
        let mut left = self.vertex_mask();
        let mut out = Vec::new();
        while left != 0 {
            let c = self.component_of(left.trailing_zeros() as usize);
            out.push(c);
            left &= !c;
        }
        out
    }

    /// BFS distances from `s`; `None` for unreachable vertices.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let d = dist[u].unwrap();
            for w in Bits(self.adj[u]) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        self.distances_from(u)[v]
    }

    /// Largest shortest-path distance, or [`Diameter::Infinite`] when disconnected.
    pub fn diameter(&self) -> Diameter {
        let mut best = 0;
        for s in 0..self.n {
            for d in self.distances_from(s) {
                match d {
                    Some(d) => best = best.max(d),
                    None => return Diameter::Infinite,
                }
            }
        }
        Diameter::Finite(best)
    }

    /// Lowest-labelled vertex adjacent to every other vertex.
    pub fn dominating_vertex(&self) -> Option<usize> {
        let all = self.vertex_mask();
        (0..self.n).find(|&v| self.adj[v] | bit(v) == all)
    }

    /// Edges `{u, v}` (with `u < v`) whose endpoints have no common neighbour.
    pub fn edges_not_in_triangle(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(u, v)| self.adj[u] & self.adj[v] == 0).collect()
    }

    pub fn common_neighbours(&self, u: usize, v: usize) -> u64 {
        self.adj[u] & self.adj[v]
    }

    /// `(k, λ, μ)` if the graph is strongly regular.
    ///
    /// Requires a connected graph that is neither complete nor edgeless.
    pub fn strongly_regular_params(&self) -> Result<Option<SrgParams>> {
        if self.n == 0 || !self.is_connected() {
            return Err(Error::Precondition("strongly regular parameters need a connected graph".into()));
        }
        if self.edge_count() == 0 {
            return Err(Error::Precondition("graph is edgeless".into()));
        }
        if self.edge_count() == self.n * (self.n - 1) / 2 {
            return Err(Error::Precondition("graph is complete".into()));
        }
        let k = self.degree(0);
        if (0..self.n).any(|v| self.degree(v) != k) {
            return Ok(None);
        }
        let mut lambda = None;
        let mut mu = None;
        for u in 0..self.n {
            for v in u + 1..self.n {
                let c = self.common_neighbours(u, v).count_ones() as usize;
                let slot = if self.has_edge(u, v) { &mut lambda } else { &mut mu };
                match *slot {
                    None => *slot = Some(c),
                    Some(x) if x != c => return Ok(None),
                    _ => {}
                }
            }
        }
        Ok(Some(SrgParams { k, lambda: lambda.unwrap_or(0), mu: mu.unwrap_or(0) }))
    }

    /// Size of a maximum matching in the subgraph induced on `within`, capped at `cap`.
    pub fn matching_number_within(&self, within: u64, cap: usize) -> usize {
        fn go(g: &Graph, free: u64, depth: usize, cap: usize) -> usize {
            if depth == cap {
                return depth;
            }
            let mut best = depth;
            let mut rest = free;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                for w in Bits(g.adj[u] & rest) {
                    let r = go(g, rest & !bit(w), depth + 1, cap);
                    if r == cap {
                        return r;
                    }
                    best = best.max(r);
                }
            }
            best
        }
        go(self, within, 0, cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrgParams {
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diameter {
    Finite(usize),
    Infinite,
}

/// An injective assignment of the vertices of `source` to vertices of `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap<'a> {
    source: &'a Graph,
    target: &'a Graph,
    assignment: Vec<usize>,
}

impl<'a> VertexMap<'a> {
    pub fn new(source: &'a Graph, target: &'a Graph, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.order() {
            return Err(Error::MalformedMap(format!(
                "{} images for a source of order {}",
                assignment.len(),
                source.order()
            )));
        }
        let mut used = 0u64;
        for &t in &assignment {
            if t >= target.order() {
                return Err(Error::MalformedMap(format!("image {t} outside target of order {}", target.order())));
            }
            if used & bit(t) != 0 {
                return Err(Error::MalformedMap(format!("vertex {t} hit twice")));
            }
            used |= bit(t);
        }
        Ok(VertexMap { source, target, assignment })
    }

    pub fn source(&self) -> &'a Graph {
        self.source
    }

    pub fn target(&self) -> &'a Graph {
        self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn image(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Edges and non-edges are both preserved.
    pub fn is_embedding(&self) -> bool {
        is_embedding(self.source, self.target, &self.assignment)
    }

    /// Edges are preserved; non-edges may map to edges.
    pub fn is_weak_embedding(&self) -> bool {
        is_weak_embedding(self.source, self.target, &self.assignment)
    }
}

pub(crate) fn is_embedding(source: &Graph, target: &Graph, f: &[usize]) -> bool {
    (0..source.order()).all(|u| {
        (u + 1..source.order()).all(|v| source.has_edge(u, v) == target.has_edge(f[u], f[v]))
    })
}

pub(crate) fn is_weak_embedding(source: &Graph, target: &Graph, f: &[usize]) -> bool {
    source.edges().all(|(u, v)| target.has_edge(f[u], f[v]))
}

/// A graph with named vertices (the windmill centre, the bowtie labels, gadget roles).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    pub graph: Graph,
    pub marks: BTreeMap<String, usize>,
}

impl MarkedGraph {
    pub fn mark(&self, name: &str) -> Option<usize> {
        self.marks.get(name).copied()
    }
}

/// Named graph families.
pub mod named {
    use super::*;

    /// The `n`-cycle `0-1-…-(n-1)-0`.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        let mut g = Graph::try_empty(n)?;
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Graph> {
        let mut g = Graph::try_empty(n)?;
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    /// The linear graph on `n` vertices: `k ~ l` iff `|k - l| = 1`.
    pub fn linear(n: usize) -> Result<Graph> {
        let mut g = Graph::try_empty(n)?;
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        Ok(g)
    }

    /// Path with `len` edges (`len + 1` vertices).
    pub fn path_of_length(len: usize) -> Result<Graph> {
        linear(len + 1)
    }

    /// `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Result<Graph> {
        let mut g = Graph::try_empty(leaves + 1)?;
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        Ok(g)
    }

    /// Two triangles sharing vertex `v = 0`; wings `(v1, v2) = (1, 2)` and `(v3, v4) = (3, 4)`.
    pub fn bowtie() -> MarkedGraph {
        let graph = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap();
        let marks = [("v", 0), ("v1", 1), ("v2", 2), ("v3", 3), ("v4", 4)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        MarkedGraph { graph, marks }
    }

    /// Wd(3,3): three triangles sharing the centre `p = 0`.
    pub fn windmill33() -> MarkedGraph {
        let graph =
            Graph::from_edges(7, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (0, 5), (0, 6), (5, 6)]).unwrap();
        MarkedGraph { graph, marks: BTreeMap::from([("p".to_string(), 0)]) }
    }

    /// A path `0-1-…-path_len` with one extra leaf `path_len + 1` hanging off `attach_at`.
    pub fn near_path(path_len: usize, attach_at: usize) -> Result<Graph> {
        if path_len == 0 {
            return Err(Error::InvalidParameter("near path needs a path of length >= 1".into()));
        }
        if attach_at > path_len {
            return Err(Error::InvalidParameter(format!(
                "attachment index {attach_at} is not on a path of length {path_len}"
            )));
        }
        let mut g = path_of_length(path_len)?;
        g.add_vertex(bit(attach_at))?;
        Ok(g)
    }

    /// Subdivision of `K_n`: edge `{i, j}` (in lexicographic order) is replaced by a path with
    /// `counts[e]` internal vertices. Branch vertices keep labels `0..n`.
    pub fn subdivision_of_complete(n: usize, counts: &[usize]) -> Result<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        if counts.len() != pairs.len() {
            return Err(Error::InvalidParameter(format!(
                "K_{n} has {} edges but {} subdivision counts were given",
                pairs.len(),
                counts.len()
            )));
        }
        let mut g = Graph::try_empty(n)?;
        for (&(i, j), &c) in pairs.iter().zip(counts) {
            let mut prev = i;
            for _ in 0..c {
                prev = g.add_vertex(bit(prev))?;
            }
            g.add_edge(prev, j);
        }
        Ok(g)
    }

    pub fn petersen() -> Graph {
        let mut g = Graph::empty(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
            g.add_edge(i, 5 + i);
        }
        g
    }
}
