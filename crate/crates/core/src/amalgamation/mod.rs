//! Amalgamation problems, free amalgams, amalgam search and bounded AP / CAP / WAP checks.

mod bounded;
mod obstruction;
mod search;

pub use bounded::{
    build_refutation_tree, check_ap, check_cap_witness, find_cap_witness, refute_wap_at, verify_wap_witness,
    ApReport, BoundedRefuter, LocalRefuter, Budget, Method, Over, Refutation, RefutationTree, Refuter, Triple, WapCertificate,
    WapOutcome,
};
pub use obstruction::{free_amalgam_obstructions, Obstruction};
pub use search::{find_amalgam, find_amalgam_with, SearchOptions, SearchStats, Strategy};

use crate::bits::{bit, Bits};
use crate::embed::{Mode, Search};
use crate::error::{Error, Result};
use crate::graph::{is_embedding, Graph, MAX_ORDER};

/// Two induced embeddings `i_B: A -> B`, `i_C: A -> C` of a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamationProblem {
    pub base: Graph,
    pub left: Graph,
    pub left_map: Vec<usize>,
    pub right: Graph,
    pub right_map: Vec<usize>,
}

impl AmalgamationProblem {
    pub fn new(base: Graph, left: Graph, left_map: Vec<usize>, right: Graph, right_map: Vec<usize>) -> Result<Self> {
        for (side, g, m) in [("left", &left, &left_map), ("right", &right, &right_map)] {
            crate::graph::VertexMap::new(&base, g, m.clone())?;
            if !is_embedding(&base, g, m) {
                return Err(Error::Precondition(format!("the {side} map is not an induced embedding of the base")));
            }
        }
        Ok(AmalgamationProblem { base, left, left_map, right, right_map })
    }

    /// Both sides contain `base` induced on their first labels.
    pub fn over_prefix(base: &Graph, left: &Graph, right: &Graph) -> Result<Self> {
        let id: Vec<usize> = (0..base.order()).collect();
        Self::new(base.clone(), left.clone(), id.clone(), right.clone(), id)
    }

    fn private(g: &Graph, map: &[usize]) -> Vec<usize> {
        let img = map.iter().fold(0u64, |m, &v| m | bit(v));
        Bits(g.vertex_mask() & !img).collect()
    }

    /// Vertices of B outside the image of A, ascending.
    pub fn left_private(&self) -> Vec<usize> {
        Self::private(&self.left, &self.left_map)
    }

    pub fn right_private(&self) -> Vec<usize> {
        Self::private(&self.right, &self.right_map)
    }
}

/// A graph `D` with induced embeddings of both sides that agree on the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub result: Graph,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

impl Amalgam {
    /// Commuting square, both maps induced, and `|D| <= |B| + |C| - |A|`.
    pub fn is_valid_for(&self, p: &AmalgamationProblem) -> bool {
        let d = &self.result;
        let injective = |m: &[usize], n: usize| {
            m.len() == n && m.iter().all(|&v| v < d.order()) && m.iter().fold(0u64, |s, &v| s | bit(v)).count_ones() as usize == n
        };
        injective(&self.left_map, p.left.order())
            && injective(&self.right_map, p.right.order())
            && is_embedding(&p.left, d, &self.left_map)
            && is_embedding(&p.right, d, &self.right_map)
            && (0..p.base.order()).all(|a| self.left_map[p.left_map[a]] == self.right_map[p.right_map[a]])
            && d.order() + p.base.order() <= p.left.order() + p.right.order()
    }
}

/// Glues `B` and `C` along `A` with no identifications and no cross edges. `D` is labelled with
/// the vertices of `B` first, then the private vertices of `C` in ascending order.
pub fn free_amalgam(p: &AmalgamationProblem) -> Result<Amalgam> {
    let rp = p.right_private();
    let n = p.left.order() + rp.len();
    if n > MAX_ORDER {
        return Err(Error::OrderBound { order: n, bound: MAX_ORDER });
    }
    let mut right_map = vec![usize::MAX; p.right.order()];
    for (a, &c) in p.right_map.iter().enumerate() {
        right_map[c] = p.left_map[a];
    }
    for (i, &c) in rp.iter().enumerate() {
        right_map[c] = p.left.order() + i;
    }
    let mut d = p.left.clone();
    for _ in &rp {
        d.add_vertex(0)?;
    }
    for (u, v) in p.right.edges() {
        d.add_edge(right_map[u], right_map[v]);
    }
    Ok(Amalgam { result: d, left_map: (0..p.left.order()).collect(), right_map })
}

/// Relabels `witness` so that an induced copy of `base` occupies labels `0..|base|`; returns it
/// unchanged when it already does.
pub fn align_base(base: &Graph, witness: &Graph) -> Result<Graph> {
    if witness.has_prefix(base) {
        return Ok(witness.clone());
    }
    let m = Search::new(base, witness, Mode::Induced)
        .first()
        .ok_or_else(|| Error::Precondition("the base is not an induced subgraph of the witness".into()))?;
    let mut perm = vec![usize::MAX; witness.order()];
    for (i, &v) in m.iter().enumerate() {
        perm[v] = i;
    }
    for (next, p) in (base.order()..).zip(perm.iter_mut().filter(|p| **p == usize::MAX)) {
        *p = next;
    }
    Ok(witness.permuted(&perm))
}
