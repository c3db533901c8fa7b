//! Determined vertices and the pair of extensions with no amalgam over a pentagon in the class
//! of C4-free graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amalgamation::Refuter;
use crate::bits::{bit, low_mask, Bits};
use crate::canon::are_isomorphic;
use crate::classes::ForbiddenClass;
use crate::error::{Error, Result};
use crate::graph::{is_embedding, named, Graph, VertexMap};

/// Least superset of `base` containing every vertex with two neighbours in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminedSet {
    pub host: Graph,
    pub base: u64,
    pub members: u64,
}

impl DeterminedSet {
    pub fn contains(&self, v: usize) -> bool {
        v < 64 && self.members & bit(v) != 0
    }

    pub fn vertices(&self) -> Vec<usize> {
        Bits(self.members).collect()
    }

    /// No vertex outside has two neighbours inside.
    pub fn is_fixpoint(&self) -> bool {
        Bits(self.host.vertex_mask() & !self.members).all(|v| (self.host.neighbours(v) & self.members).count_ones() < 2)
    }
}

pub fn determined_closure(host: &Graph, base: u64) -> Result<DeterminedSet> {
    if base & !host.vertex_mask() != 0 {
        return Err(Error::InvalidParameter("the base names vertices outside the host".into()));
    }
    let mut members = base;
    loop {
        let add = Bits(host.vertex_mask() & !members)
            .filter(|&v| (host.neighbours(v) & members).count_ones() >= 2)
            .fold(0u64, |m, v| m | bit(v));
        if add == 0 {
            break;
        }
        members |= add;
    }
    Ok(DeterminedSet { host: host.clone(), base, members })
}

/// Whether two induced embeddings `E -> D` that agree on `base` also agree on every
/// determined vertex. Always true when `D` is C4-free.
pub fn rigidity_check(e: &Graph, base: u64, d: &Graph, f: &[usize], g: &[usize]) -> Result<bool> {
    for m in [f, g] {
        VertexMap::new(e, d, m.to_vec())?;
        if !is_embedding(e, d, m) {
            return Err(Error::Precondition("the maps must be induced embeddings".into()));
        }
    }
    if Bits(base).any(|v| f[v] != g[v]) {
        return Err(Error::Precondition("the embeddings disagree on the base".into()));
    }
    if !ForbiddenClass::c4_free().member(d) {
        return Err(Error::Precondition("the target contains a C4".into()));
    }
    let set = determined_closure(e, base)?;
    Ok(set.vertices().into_iter().all(|v| f[v] == g[v]))
}

/// The extensions `B` and `C` of a C4-free witness whose first five vertices form a pentagon.
///
/// Labels: the witness, then one vertex per triangle-free determined edge (only when the
/// determined subgraph has diameter at most 2), then apexes added on demand for `v_x`, `v_y`,
/// then `z, w_y, w_x`, then `s, t`; `C` continues with the inner path vertices `p, q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C4Gadget {
    pub witness: Graph,
    /// The witness with the apex vertices added.
    pub e: Graph,
    /// `e` with `z`, `w_y`, `w_x`.
    pub e_prime: Graph,
    /// Edges that received an apex, in the order of the added vertices.
    pub augmented_edges: Vec<(usize, usize)>,
    /// Geodesic `(x, x', y', y)` in `e`.
    pub path: [usize; 4],
    pub v_x: usize,
    pub v_y: usize,
    pub z: usize,
    pub w_x: usize,
    pub w_y: usize,
    pub s: usize,
    pub t: usize,
    /// Inner vertices of the `s`-`t` path in `C`.
    pub p: usize,
    pub q: usize,
    /// `s` and `t` joined by an edge.
    pub b: Graph,
    /// `s` and `t` joined by a path of length 3.
    pub c: Graph,
}

pub const PENTAGON_ORDER: usize = 5;

impl C4Gadget {
    pub fn named_vertices(&self) -> BTreeMap<String, usize> {
        let [x, x1, y1, y] = self.path;
        [
            ("x", x),
            ("x'", x1),
            ("y'", y1),
            ("y", y),
            ("v_x", self.v_x),
            ("v_y", self.v_y),
            ("z", self.z),
            ("w_x", self.w_x),
            ("w_y", self.w_y),
            ("s", self.s),
            ("t", self.t),
            ("p", self.p),
            ("q", self.q),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Re-runs every structural check; returns the first failure.
    pub fn check(&self) -> std::result::Result<(), String> {
        let k = ForbiddenClass::c4_free();
        let base = low_mask(PENTAGON_ORDER);
        for (name, g) in [("B", &self.b), ("C", &self.c)] {
            if !k.member(g) {
                return Err(format!("{name} contains a C4"));
            }
            if !g.has_prefix(&self.e_prime) || !g.has_prefix(&self.witness) {
                return Err(format!("{name} does not extend the witness"));
            }
            let det = determined_closure(g, base).map_err(|e| e.to_string())?;
            let named = [self.v_x, self.v_y, self.z, self.w_x, self.w_y, self.s, self.t];
            if let Some(v) = self.path.iter().chain(&named).find(|&&v| !det.contains(v)) {
                return Err(format!("vertex {v} is not determined in {name}"));
            }
        }
        let [x, x1, y1, y] = self.path;
        if !(self.e.has_edge(x, x1) && self.e.has_edge(x1, y1) && self.e.has_edge(y1, y)) || self.e.distance(x, y) != Some(3) {
            return Err("the path is not a geodesic of length 3".into());
        }
        if !(self.e.has_edge(x, self.v_x) && self.e.has_edge(x1, self.v_x)) || !(self.e.has_edge(y, self.v_y) && self.e.has_edge(y1, self.v_y)) {
            return Err("v_x or v_y is not an apex of its path edge".into());
        }
        if self.b.has_edge(self.v_x, self.v_y) {
            return Err("v_x and v_y are adjacent".into());
        }
        if !self.b.has_edge(self.s, self.t) || self.c.has_edge(self.s, self.t) {
            return Err("s and t are joined the wrong way".into());
        }
        if !(self.c.has_edge(self.s, self.p) && self.c.has_edge(self.p, self.q) && self.c.has_edge(self.q, self.t)) {
            return Err("C lacks the s-p-q-t path".into());
        }
        Ok(())
    }
}

fn internal(msg: &str) -> Error {
    Error::Internal(msg.into())
}

/// Builds the gadget pair for `witness`; see [`C4Gadget`] for the labelling.
pub fn c4_nonwap_gadgets(witness: &Graph) -> Result<C4Gadget> {
    let k = ForbiddenClass::c4_free();
    if !k.member(witness) {
        return Err(Error::Precondition("the witness contains a C4".into()));
    }
    if witness.order() < PENTAGON_ORDER
        || !are_isomorphic(&witness.induced(&(0..PENTAGON_ORDER).collect::<Vec<_>>()), &named::cycle(5)?)
    {
        return Err(Error::Precondition("the first five vertices of the witness must induce a pentagon".into()));
    }
    let base = low_mask(PENTAGON_ORDER);

    // (1)-(2): apexes on triangle-free edges of the determined subgraph when its diameter is 2.
    let mut e = witness.clone();
    let mut augmented_edges = Vec::new();
    let det = determined_closure(witness, base)?.members;
    let d = witness.induced_mask(det);
    if matches!(d.diameter(), crate::graph::Diameter::Finite(n) if n <= 2) {
        for (u, v) in witness.edges() {
            if det & bit(u) != 0 && det & bit(v) != 0 && witness.common_neighbours(u, v) & det == 0 {
                e.add_vertex(bit(u) | bit(v))?;
                augmented_edges.push((u, v));
            }
        }
    }

    // (3): the lexicographically least determined geodesic of length 3 in `e`.
    let det_e = determined_closure(&e, base)?.members;
    let mut path = None;
    'outer: for x in Bits(det_e) {
        let dist = e.distances_from(x);
        for x1 in Bits(e.neighbours(x) & det_e) {
            for y1 in Bits(e.neighbours(x1) & det_e) {
                for y in Bits(e.neighbours(y1) & det_e) {
                    if dist[y] == Some(3) {
                        path = Some([x, x1, y1, y]);
                        break 'outer;
                    }
                }
            }
        }
    }
    let path = path.ok_or_else(|| internal("no determined geodesic of length 3"))?;
    let [x, x1, y1, y] = path;

    // (4): apexes v_x on x-x' and v_y on y-y'.
    let mut apex = |e: &mut Graph, a: usize, b: usize| -> Result<usize> {
        let det = determined_closure(e, base)?.members;
        match Bits(e.common_neighbours(a, b) & det).next() {
            Some(v) => Ok(v),
            None => {
                if e.common_neighbours(a, b) != 0 {
                    return Err(internal("an edge between determined vertices has an undetermined apex"));
                }
                augmented_edges.push((a.min(b), a.max(b)));
                e.add_vertex(bit(a) | bit(b))
            }
        }
    };
    let v_x = apex(&mut e, x, x1)?;
    let v_y = apex(&mut e, y, y1)?;
    if e.distance(x, y) != Some(3) {
        return Err(internal("the geodesic was shortened by an apex"));
    }

    // (5)
    let mut e_prime = e.clone();
    let z = e_prime.add_vertex(bit(x) | bit(y))?;
    let w_y = e_prime.add_vertex(bit(x) | bit(z))?;
    let w_x = e_prime.add_vertex(bit(y) | bit(z))?;

    // (6)
    let mut stem = e_prime.clone();
    let s = stem.add_vertex(bit(w_x) | bit(v_x))?;
    let t = stem.add_vertex(bit(w_y) | bit(v_y))?;
    let mut b = stem.clone();
    b.add_edge(s, t);
    let mut c = stem;
    let p = c.add_vertex(bit(s))?;
    let q = c.add_vertex(bit(p) | bit(t))?;

    let gadget = C4Gadget {
        witness: witness.clone(),
        e,
        e_prime,
        augmented_edges,
        path,
        v_x,
        v_y,
        z,
        w_x,
        w_y,
        s,
        t,
        p,
        q,
        b,
        c,
    };
    gadget.check().map_err(Error::Internal)?;
    Ok(gadget)
}

/// Refutes a witness over a pentagon base with [`c4_nonwap_gadgets`].
#[derive(Clone, Copy, Debug, Default)]
pub struct GadgetRefuter;

impl Refuter for GadgetRefuter {
    fn refute(&self, k: &ForbiddenClass, base: &Graph, witness: &Graph) -> Result<Option<(Graph, Graph)>> {
        if base.order() != PENTAGON_ORDER || !witness.has_prefix(base) {
            return Err(Error::Precondition("the gadget refuter needs a pentagon base on the witness prefix".into()));
        }
        let g = c4_nonwap_gadgets(witness)?;
        if !k.member(&g.b) || !k.member(&g.c) {
            return Err(Error::Precondition(format!("the gadget pair is not in `{}`", k.name())));
        }
        Ok(Some((g.b, g.c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgamation::{find_amalgam_with, AmalgamationProblem, SearchOptions, Strategy};
    use crate::embed::{Mode, Search};
    use crate::enumerate::{all_graphs_in_class, Extensions};
    use crate::graph::named::*;

    #[test]
    fn closure_examples() {
        let c5 = cycle(5).unwrap();
        assert_eq!(determined_closure(&c5, low_mask(5)).unwrap().members, low_mask(5));
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(determined_closure(&p, bit(0) | bit(2)).unwrap().vertices(), vec![0, 1, 2]);
        let star = star(3).unwrap();
        let leaves: Vec<usize> = (0..4).filter(|&v| star.degree(v) == 1).collect();
        let centre = (0..4).find(|&v| star.degree(v) == 3).unwrap();
        let set = determined_closure(&star, bit(leaves[0]) | bit(leaves[1])).unwrap();
        assert_eq!(set.members, bit(leaves[0]) | bit(leaves[1]) | bit(centre));
        assert!(set.is_fixpoint());
        assert!(determined_closure(&c5, bit(7)).is_err());
    }

    #[test]
    fn closure_is_monotone_and_idempotent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for g in crate::enumerate::all_graphs(6).unwrap().members() {
            let a: u64 = rng.gen::<u64>() & low_mask(6);
            let b: u64 = a | (rng.gen::<u64>() & low_mask(6));
            let ca = determined_closure(g, a).unwrap();
            let cb = determined_closure(g, b).unwrap();
            assert_eq!(ca.members & !cb.members, 0);
            assert_eq!(determined_closure(g, ca.members).unwrap().members, ca.members);
            assert!(ca.is_fixpoint());
        }
    }

    #[test]
    fn rigidity_examples() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let base = bit(0) | bit(2);
        let id = vec![0, 1, 2];
        assert!(rigidity_check(&p, base, &p, &id, &id).unwrap());
        let c5 = cycle(5).unwrap();
        for f in Search::new(&p, &c5, Mode::Induced).all() {
            for g in Search::new(&p, &c5, Mode::Induced).all() {
                if f[0] == g[0] && f[2] == g[2] {
                    assert!(rigidity_check(&p, base, &c5, &f, &g).unwrap());
                }
            }
        }
        // In C4 itself the middle vertex is not pinned down.
        let c4 = cycle(4).unwrap();
        assert!(rigidity_check(&p, base, &c4, &[0, 1, 2], &[0, 3, 2]).is_err());
        assert!(rigidity_check(&p, base, &c5, &[0, 1, 2], &[1, 2, 3]).is_err());
    }

    #[test]
    fn rigidity_sweep_small() {
        let k = ForbiddenClass::c4_free();
        let hosts = all_graphs_in_class(&k, 6).unwrap();
        for e in crate::enumerate::all_graphs(4).unwrap().members() {
            for base in 1..low_mask(4) {
                for d in hosts.members() {
                    let maps = Search::new(e, d, Mode::Induced).all();
                    for f in &maps {
                        for g in &maps {
                            if Bits(base).all(|v| f[v] == g[v]) {
                                assert!(rigidity_check(e, base, d, f, g).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pentagon_gadget() {
        let c5 = cycle(5).unwrap();
        let g = c4_nonwap_gadgets(&c5).unwrap();
        assert_eq!(g.augmented_edges.len(), 5);
        assert_eq!((g.e.order(), g.e_prime.order(), g.b.order(), g.c.order()), (10, 13, 15, 17));
        assert_eq!(g.path, [0, 1, 2, 8]);
        assert_eq!((g.v_x, g.v_y), (5, 3));
        assert!(!g.b.has_edge(g.v_x, g.v_y));
        assert!(g.check().is_ok());
        let k = ForbiddenClass::c4_free();
        let p = AmalgamationProblem::over_prefix(&c5, &g.b, &g.c).unwrap();
        for strategy in [Strategy::Propagate, Strategy::Pruned] {
            let opts = SearchOptions { strategy, ..SearchOptions::default() };
            assert!(find_amalgam_with(&p, &k, &opts).unwrap().0.is_none());
        }
        let names = g.named_vertices();
        assert_eq!(names["s"], 13);
        assert_eq!(names["q"], 16);
    }

    #[test]
    fn gadget_preconditions() {
        assert!(c4_nonwap_gadgets(&cycle(4).unwrap()).is_err());
        assert!(c4_nonwap_gadgets(&linear(5).unwrap()).is_err());
        let mut relabelled = cycle(5).unwrap().permuted(&[0, 2, 4, 1, 3]);
        relabelled.add_vertex(0).unwrap();
        assert!(c4_nonwap_gadgets(&relabelled).is_ok());
    }

    #[test]
    fn gadgets_for_one_vertex_witnesses() {
        let k = ForbiddenClass::c4_free();
        let c5 = cycle(5).unwrap();
        for w in Extensions::new(&c5, &k, 1).unwrap().collect_all().unwrap() {
            let g = c4_nonwap_gadgets(&w).unwrap();
            let (b, c) = GadgetRefuter.refute(&k, &c5, &w).unwrap().unwrap();
            assert_eq!((b.clone(), c.clone()), (g.b.clone(), g.c.clone()));
            let p = AmalgamationProblem::over_prefix(&c5, &b, &c).unwrap();
            assert!(find_amalgam_with(&p, &k, &SearchOptions::default()).unwrap().0.is_none());
        }
    }
}
