//! Backtracking search for (weak) embeddings of a pattern graph into a host graph.
//!
//! Pattern vertices are placed most-constrained first: start from a vertex of maximum degree, then
//! repeatedly take the vertex with the most already-placed neighbours (ties: higher degree, lower
//! label). Host candidates are intersected neighbourhood masks filtered by degree, and are tried in
//! increasing label order, so the first map found is deterministic.

use std::ops::ControlFlow;

use crate::bits::{bit, Bits};
use crate::graph::{Graph, VertexMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Injective homomorphism: edges map to edges.
    Weak,
    /// Induced embedding: edges map to edges and non-edges to non-edges.
    Induced,
}

/// A configured search. Build with [`Search::new`], then narrow with
/// [`Search::fix`] / [`Search::restrict`].
pub struct Search<'a> {
    pattern: &'a Graph,
    host: &'a Graph,
    mode: Mode,
    fixed: Vec<Option<usize>>,
    allowed: u64,
}

impl<'a> Search<'a> {
    pub fn new(pattern: &'a Graph, host: &'a Graph, mode: Mode) -> Self {
        Search { pattern, host, mode, fixed: vec![None; pattern.order()], allowed: host.vertex_mask() }
    }

    /// Forces pattern vertex `p` onto host vertex `h`.
    pub fn fix(mut self, p: usize, h: usize) -> Self {
        self.fixed[p] = Some(h);
        self
    }

    /// Only host vertices in `allowed` may be used (fixed vertices are exempt).
    pub fn restrict(mut self, allowed: u64) -> Self {
        self.allowed &= allowed;
        self
    }

    fn placement_order(&self) -> Vec<usize> {
        let n = self.pattern.order();
        let mut order: Vec<usize> = (0..n).filter(|&p| self.fixed[p].is_some()).collect();
        let mut placed = order.iter().fold(0u64, |m, &p| m | bit(p));
        while order.len() < n {
            let next = (0..n)
                .filter(|&p| placed & bit(p) == 0)
                .max_by_key(|&p| {
                    let conn = (self.pattern.neighbours(p) & placed).count_ones();
                    (conn, self.pattern.degree(p), std::cmp::Reverse(p))
                })
                .unwrap();
            order.push(next);
            placed |= bit(next);
        }
        order
    }

    /// Calls `visit` with every map found (indexed by pattern vertex) until it breaks.
    pub fn for_each<B>(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> Option<B> {
        let n = self.pattern.order();
        if n > self.host.order() {
            return None;
        }
        // Fixed assignments must be consistent among themselves.
        let mut used = 0u64;
        for p in 0..n {
            if let Some(h) = self.fixed[p] {
                if h >= self.host.order() || used & bit(h) != 0 {
                    return None;
                }
                used |= bit(h);
            }
        }
        let order = self.placement_order();
        let mut map = vec![usize::MAX; n];
        let mut st = State { s: self, order: &order, map: &mut map, used: 0 };
        match st.go(0, &mut visit) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    }

    pub fn first(&self) -> Option<Vec<usize>> {
        self.for_each(|m| ControlFlow::Break(m.to_vec()))
    }

    pub fn exists(&self) -> bool {
        self.for_each(|_| ControlFlow::Break(())).is_some()
    }

    pub fn count(&self) -> usize {
        let mut c = 0;
        self.for_each::<()>(|_| {
            c += 1;
            ControlFlow::Continue(())
        });
        c
    }

    pub fn all(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each::<()>(|m| {
            out.push(m.to_vec());
            ControlFlow::Continue(())
        });
        out
    }
}

struct State<'s, 'a> {
    s: &'s Search<'a>,
    order: &'s [usize],
    map: &'s mut [usize],
    used: u64,
}

impl State<'_, '_> {
    fn candidates(&self, p: usize, depth: usize) -> u64 {
        let s = self.s;
        if let Some(h) = s.fixed[p] {
            let ok = self.order[..depth].iter().all(|&q| {
                let e = s.pattern.has_edge(p, q);
                let he = s.host.has_edge(h, self.map[q]);
                match s.mode {
                    Mode::Weak => !e || he,
                    Mode::Induced => e == he,
                }
            });
            return if ok && self.used & bit(h) == 0 { bit(h) } else { 0 };
        }
        let mut cand = s.allowed & !self.used;
        let pn = s.pattern.neighbours(p);
        for &q in &self.order[..depth] {
            let hq = s.host.neighbours(self.map[q]);
            if pn & bit(q) != 0 {
                cand &= hq;
            } else if s.mode == Mode::Induced {
                cand &= !hq;
            }
            if cand == 0 {
                return 0;
            }
        }
        let need = s.pattern.degree(p);
        Bits(cand).filter(|&h| s.host.degree(h) >= need).fold(0, |m, h| m | bit(h))
    }

    fn go<B>(&mut self, depth: usize, visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>) -> ControlFlow<B> {
        if depth == self.order.len() {
            return visit(self.map);
        }
        let p = self.order[depth];
        for h in Bits(self.candidates(p, depth)) {
            self.map[p] = h;
            self.used |= bit(h);
            let r = self.go(depth + 1, visit);
            self.used &= !bit(h);
            r?;
        }
        self.map[p] = usize::MAX;
        ControlFlow::Continue(())
    }
}

/// First weak embedding of `pattern` into `host` in the fixed search order.
pub fn find_weak_embedding<'a>(pattern: &'a Graph, host: &'a Graph) -> Option<VertexMap<'a>> {
    let m = Search::new(pattern, host, Mode::Weak).first()?;
    Some(VertexMap::new(pattern, host, m).expect("search produced a malformed map"))
}

/// First induced embedding of `pattern` into `host`.
pub fn find_embedding<'a>(pattern: &'a Graph, host: &'a Graph) -> Option<VertexMap<'a>> {
    let m = Search::new(pattern, host, Mode::Induced).first()?;
    Some(VertexMap::new(pattern, host, m).expect("search produced a malformed map"))
}

pub fn has_weak_copy(pattern: &Graph, host: &Graph) -> bool {
    Search::new(pattern, host, Mode::Weak).exists()
}

/// Is there a weak copy of `pattern` in `host` that uses host vertex `v`?
pub fn has_weak_copy_through(pattern: &Graph, host: &Graph, v: usize) -> bool {
    (0..pattern.order()).any(|p| Search::new(pattern, host, Mode::Weak).fix(p, v).exists())
}
