//! Exhaustive amalgam search over identifications of private vertices.
//!
//! Private vertices of `B` are decided one at a time: kept separate, or identified with a private
//! vertex of `C` with the same adjacency to `A` and to already identified pairs. The working graph
//! always holds `A`, all of `C` and the decided part of `B`; the final graph of each branch is a
//! supergraph of it, which justifies membership pruning for classes closed under subgraphs.

use crate::bits::{bit, Bits};
use crate::classes::ForbiddenClass;
use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_ORDER};

use super::{Amalgam, AmalgamationProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `Propagate` for classes excluding C4, `Pruned` for other monotone classes, else `Brute`.
    Auto,
    /// Every partial injection, tested only at the leaves.
    Brute,
    /// Abandons a branch as soon as the working graph leaves a monotone class.
    Pruned,
    /// `Pruned` plus forced identifications: a vertex whose decided neighbours `u, w` already
    /// have a common neighbour `y` must be identified with `y`, or the branch holds a C4.
    Propagate,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub allow_cross_edges: bool,
    pub strategy: Strategy,
    /// Largest number of candidate cross pairs whose subsets are enumerated at a leaf.
    pub max_cross_pairs: usize,
    /// Abort with [`Error::BoundExceeded`] after this many search nodes.
    pub node_limit: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { allow_cross_edges: false, strategy: Strategy::Auto, max_cross_pairs: 20, node_limit: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub forced: u64,
}

/// First amalgam of `p` inside `k`, trying the free amalgam first.
pub fn find_amalgam(p: &AmalgamationProblem, k: &ForbiddenClass, allow_cross_edges: bool) -> Result<Option<Amalgam>> {
    let opts = SearchOptions { allow_cross_edges, ..SearchOptions::default() };
    Ok(find_amalgam_with(p, k, &opts)?.0)
}

pub fn find_amalgam_with(
    p: &AmalgamationProblem,
    k: &ForbiddenClass,
    opts: &SearchOptions,
) -> Result<(Option<Amalgam>, SearchStats)> {
    let strategy = match opts.strategy {
        Strategy::Auto if k.is_monotone() && k.excludes_c4() => Strategy::Propagate,
        Strategy::Auto if k.is_monotone() => Strategy::Pruned,
        Strategy::Auto => Strategy::Brute,
        s => s,
    };
    if matches!(strategy, Strategy::Pruned | Strategy::Propagate) && !k.is_monotone() {
        return Err(Error::InvalidParameter(format!("pruned search needs a monotone class, `{}` is not", k.name())));
    }
    if strategy == Strategy::Propagate && !k.excludes_c4() {
        return Err(Error::InvalidParameter(format!("C4 propagation is unsound for `{}`", k.name())));
    }
    let mut stats = SearchStats::default();
    if k.is_hereditary() && (!k.member(&p.left) || !k.member(&p.right)) {
        return Ok((None, stats));
    }
    let a = p.base.order();
    let lp = p.left_private();
    let rp = p.right_private();
    if a + lp.len() + rp.len() > MAX_ORDER {
        return Err(Error::OrderBound { order: a + lp.len() + rp.len(), bound: MAX_ORDER });
    }

    // Local indices: A vertices 0..a, B-private 0..nb, C-private 0..nc.
    let mut lpos = vec![usize::MAX; p.left.order()];
    for (i, &v) in lp.iter().enumerate() {
        lpos[v] = i;
    }
    let mut rpos = vec![usize::MAX; p.right.order()];
    for (j, &v) in rp.iter().enumerate() {
        rpos[v] = j;
    }
    let mut left_a = vec![usize::MAX; p.left.order()];
    for (x, &v) in p.left_map.iter().enumerate() {
        left_a[v] = x;
    }
    let mut right_a = vec![usize::MAX; p.right.order()];
    for (x, &v) in p.right_map.iter().enumerate() {
        right_a[v] = x;
    }
    let split = |g: &Graph, v: usize, apos: &[usize], ppos: &[usize]| {
        let (mut am, mut pm) = (0u64, 0u64);
        for w in Bits(g.neighbours(v)) {
            if apos[w] != usize::MAX {
                am |= bit(apos[w]);
            } else {
                pm |= bit(ppos[w]);
            }
        }
        (am, pm)
    };
    let (b_a, b_b): (Vec<u64>, Vec<u64>) = lp.iter().map(|&v| split(&p.left, v, &left_a, &lpos)).unzip();
    let (c_a, c_c): (Vec<u64>, Vec<u64>) = rp.iter().map(|&v| split(&p.right, v, &right_a, &rpos)).unzip();

    // Working graph: A, then C-private.
    let mut w = Graph::try_empty(a + rp.len())?;
    let node_of_c = |v: usize| if right_a[v] != usize::MAX { right_a[v] } else { a + rpos[v] };
    for (u, v) in p.right.edges() {
        w.add_edge(node_of_c(u), node_of_c(v));
    }

    let order = if strategy == Strategy::Brute { (0..lp.len()).collect() } else { closure_order(&b_a, &b_b) };
    let mut st = State {
        k,
        p,
        opts,
        a,
        nc: rp.len(),
        lp: &lp,
        rp: &rp,
        b_a: &b_a,
        b_b: &b_b,
        c_a: &c_a,
        c_c: &c_c,
        order: &order,
        prune: strategy != Strategy::Brute,
        propagate: strategy == Strategy::Propagate,
        node: vec![usize::MAX; lp.len()],
        ident: vec![None; lp.len()],
        used_c: 0,
        stats: &mut stats,
    };
    let found = st.go(0, &w)?;
    Ok((found, stats))
}

/// Private vertices with two neighbours among the already ordered ones (or `A`) first; otherwise
/// the one with most such neighbours, lowest index on ties.
fn closure_order(b_a: &[u64], b_b: &[u64]) -> Vec<usize> {
    let nb = b_a.len();
    let mut order = Vec::with_capacity(nb);
    let mut placed = 0u64;
    while order.len() < nb {
        let next = (0..nb)
            .filter(|&i| placed & bit(i) == 0)
            .max_by_key(|&i| {
                let c = b_a[i].count_ones() as usize + (b_b[i] & placed).count_ones() as usize;
                (c.min(2), c, std::cmp::Reverse(i))
            })
            .unwrap();
        order.push(next);
        placed |= bit(next);
    }
    order
}

struct State<'s> {
    k: &'s ForbiddenClass,
    p: &'s AmalgamationProblem,
    opts: &'s SearchOptions,
    a: usize,
    nc: usize,
    lp: &'s [usize],
    rp: &'s [usize],
    b_a: &'s [u64],
    b_b: &'s [u64],
    c_a: &'s [u64],
    c_c: &'s [u64],
    order: &'s [usize],
    prune: bool,
    propagate: bool,
    /// Working-graph node of each decided B-private vertex.
    node: Vec<usize>,
    ident: Vec<Option<usize>>,
    used_c: u64,
    stats: &'s mut SearchStats,
}

impl State<'_> {
    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if let Some(limit) = self.opts.node_limit {
            if self.stats.nodes > limit {
                return Err(Error::BoundExceeded(format!("amalgam search exceeded {limit} nodes")));
            }
        }
        Ok(())
    }

    /// Working-graph neighbours of `b` among A and decided B-private vertices.
    fn decided_neighbours(&self, b: usize, depth: usize) -> u64 {
        let mut m = self.b_a[b];
        for &b2 in &self.order[..depth] {
            if self.b_b[b] & bit(b2) != 0 {
                m |= bit(self.node[b2]);
            }
        }
        m
    }

    fn consistent(&self, b: usize, j: usize, depth: usize) -> bool {
        if self.used_c & bit(j) != 0 || self.b_a[b] != self.c_a[j] {
            return false;
        }
        self.order[..depth].iter().all(|&b2| match self.ident[b2] {
            Some(l) => (self.b_b[b] & bit(b2) != 0) == (self.c_c[j] & bit(l) != 0),
            None => true,
        })
    }

    fn go(&mut self, depth: usize, w: &Graph) -> Result<Option<Amalgam>> {
        self.tick()?;
        if depth == self.order.len() {
            return self.leaf(w);
        }
        let b = self.order[depth];
        let nbrs = self.decided_neighbours(b, depth);

        let mut forced: Option<usize> = None;
        if self.propagate {
            let mut common = 0u64;
            let ns: Vec<usize> = Bits(nbrs).collect();
            for (i, &u) in ns.iter().enumerate() {
                for &v in &ns[i + 1..] {
                    common |= w.common_neighbours(u, v);
                }
            }
            match common.count_ones() {
                0 => {}
                1 => {
                    let y = common.trailing_zeros() as usize;
                    if y < self.a || y >= self.a + self.nc || self.used_c & bit(y - self.a) != 0 {
                        return Ok(None);
                    }
                    forced = Some(y - self.a);
                    self.stats.forced += 1;
                }
                _ => return Ok(None),
            }
        }

        if forced.is_none() {
            let mut next = w.clone();
            let v = next.add_vertex(nbrs)?;
            if !self.prune || self.k.member(&next) {
                self.node[b] = v;
                self.ident[b] = None;
                if let Some(am) = self.go(depth + 1, &next)? {
                    return Ok(Some(am));
                }
            }
        }
        let choices: Vec<usize> = match forced {
            Some(j) => vec![j],
            None => (0..self.nc).collect(),
        };
        for j in choices {
            if !self.consistent(b, j, depth) {
                continue;
            }
            let y = self.a + j;
            let mut next = w.clone();
            for u in Bits(nbrs) {
                next.add_edge(y, u);
            }
            if self.prune && !self.k.member(&next) {
                continue;
            }
            self.node[b] = y;
            self.ident[b] = Some(j);
            self.used_c |= bit(j);
            let r = self.go(depth + 1, &next);
            self.used_c &= !bit(j);
            if let Some(am) = r? {
                return Ok(Some(am));
            }
        }
        self.node[b] = usize::MAX;
        self.ident[b] = None;
        Ok(None)
    }

    fn leaf(&mut self, w: &Graph) -> Result<Option<Amalgam>> {
        self.stats.leaves += 1;
        if self.k.member(w) {
            return Ok(Some(self.assemble(w)));
        }
        // In a monotone class no supergraph of a non-member is a member.
        if !self.opts.allow_cross_edges || self.prune {
            return Ok(None);
        }
        let free_b: Vec<usize> = (0..self.lp.len()).filter(|&b| self.ident[b].is_none()).map(|b| self.node[b]).collect();
        let free_c: Vec<usize> = (0..self.nc).filter(|&j| self.used_c & bit(j) == 0).map(|j| self.a + j).collect();
        let pairs: Vec<(usize, usize)> = free_b.iter().flat_map(|&u| free_c.iter().map(move |&v| (u, v))).collect();
        if pairs.len() > self.opts.max_cross_pairs {
            return Err(Error::BoundExceeded(format!(
                "{} cross pairs exceed the enumeration limit {}",
                pairs.len(),
                self.opts.max_cross_pairs
            )));
        }
        for mask in 1u64..1 << pairs.len() {
            let mut d = w.clone();
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d.add_edge(u, v);
                }
            }
            if self.k.member(&d) {
                return Ok(Some(self.assemble(&d)));
            }
        }
        Ok(None)
    }

    /// Relabels the working graph so that `B` keeps its own labels and the unidentified
    /// C-private vertices follow in ascending order.
    fn assemble(&self, w: &Graph) -> Amalgam {
        let p = self.p;
        let mut perm = vec![usize::MAX; w.order()];
        for (x, &v) in p.left_map.iter().enumerate() {
            perm[x] = v;
        }
        for (i, &v) in self.lp.iter().enumerate() {
            perm[self.node[i]] = v;
        }
        let mut next = p.left.order();
        let mut right_map = vec![usize::MAX; p.right.order()];
        for (x, &v) in p.right_map.iter().enumerate() {
            right_map[v] = p.left_map[x];
        }
        for (j, &v) in self.rp.iter().enumerate() {
            let node = self.a + j;
            if perm[node] == usize::MAX {
                perm[node] = next;
                next += 1;
            }
            right_map[v] = perm[node];
        }
        let am = Amalgam { result: w.permuted(&perm), left_map: (0..p.left.order()).collect(), right_map };
        debug_assert!(am.is_valid_for(p));
        am
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgamation::free_amalgam;
    use crate::graph::named::*;

    fn brute(p: &AmalgamationProblem, k: &ForbiddenClass, cross: bool) -> bool {
        let opts = SearchOptions { allow_cross_edges: cross, strategy: Strategy::Brute, ..Default::default() };
        find_amalgam_with(p, k, &opts).unwrap().0.is_some()
    }

    #[test]
    fn c4_pair_needs_identification() {
        let k = ForbiddenClass::c4_free();
        let a = Graph::empty(2);
        let b = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &b, &b).unwrap();
        assert!(!k.member(&free_amalgam(&p).unwrap().result));
        let am = find_amalgam(&p, &k, false).unwrap().unwrap();
        assert!(am.is_valid_for(&p));
        assert_eq!(am.result.order(), 3);
        assert_eq!(am.right_map[2], 2);
        assert!(brute(&p, &k, false));
    }

    #[test]
    fn linear_forest_pair_has_no_amalgam() {
        let k = ForbiddenClass::linear_forests();
        let a = Graph::empty(2);
        let b = Graph::from_edges(3, &[(0, 2), (2, 1)]).unwrap();
        let c = Graph::from_edges(4, &[(0, 2), (2, 3), (3, 1)]).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &b, &c).unwrap();
        assert!(find_amalgam(&p, &k, false).unwrap().is_none());
        assert!(find_amalgam(&p, &k, true).unwrap().is_none());
        assert!(!brute(&p, &k, true));
    }

    #[test]
    fn trivial_left_side() {
        let k = ForbiddenClass::c4_free();
        let a = cycle(5).unwrap();
        let mut c = a.clone();
        c.add_vertex(0b11).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &a, &c).unwrap();
        let am = find_amalgam(&p, &k, false).unwrap().unwrap();
        assert_eq!(am.result, c);
        assert_eq!(am.right_map, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn empty_base_is_joint_embedding() {
        let k = ForbiddenClass::triangle_free();
        let e = Graph::empty(0);
        let p = AmalgamationProblem::over_prefix(&e, &cycle(5).unwrap(), &cycle(4).unwrap()).unwrap();
        let am = find_amalgam(&p, &k, false).unwrap().unwrap();
        assert_eq!(am.result.order(), 9);
    }

    #[test]
    fn cross_edges_can_be_required_for_non_monotone_classes() {
        let k = ForbiddenClass::custom("connected", Graph::is_connected, false, false);
        let a = Graph::empty(0);
        let b = complete(2).unwrap();
        let c = Graph::empty(2);
        let p = AmalgamationProblem::over_prefix(&a, &b, &c).unwrap();
        assert!(find_amalgam(&p, &k, false).unwrap().is_none());
        let am = find_amalgam(&p, &k, true).unwrap().unwrap();
        assert!(am.is_valid_for(&p));
        assert!(am.result.is_connected());
        let opts = SearchOptions { strategy: Strategy::Pruned, ..Default::default() };
        assert!(find_amalgam_with(&p, &k, &opts).is_err());
    }

    #[test]
    fn node_limit_is_enforced() {
        let k = ForbiddenClass::linear_forests();
        let a = Graph::empty(2);
        let b = Graph::from_edges(3, &[(0, 2), (2, 1)]).unwrap();
        let c = Graph::from_edges(4, &[(0, 2), (2, 3), (3, 1)]).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &b, &c).unwrap();
        let opts = SearchOptions { strategy: Strategy::Brute, node_limit: Some(1), ..Default::default() };
        assert!(matches!(find_amalgam_with(&p, &k, &opts), Err(Error::BoundExceeded(_))));
    }

    #[test]
    fn strategies_agree_on_small_c4_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let k = ForbiddenClass::c4_free();
        let mut checked = 0;
        while checked < 200 {
            let a_n = rng.gen_range(0..=3);
            let mut a = Graph::empty(a_n);
            for u in 0..a_n {
                for v in u + 1..a_n {
                    if rng.gen_bool(0.4) {
                        a.add_edge(u, v);
                    }
                }
            }
            let side = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut g = a.clone();
                for _ in 0..rng.gen_range(0..=3) {
                    let m: u64 = rng.gen::<u64>() & crate::bits::low_mask(g.order());
                    g.add_vertex(m).unwrap();
                }
                g
            };
            let (b, c) = (side(&mut rng), side(&mut rng));
            if !k.member(&b) || !k.member(&c) {
                continue;
            }
            let p = AmalgamationProblem::over_prefix(&a, &b, &c).unwrap();
            let run = |s| {
                let opts = SearchOptions { strategy: s, ..Default::default() };
                let r = find_amalgam_with(&p, &k, &opts).unwrap().0;
                if let Some(am) = &r {
                    assert!(am.is_valid_for(&p));
                    assert!(k.member(&am.result));
                }
                r.is_some()
            };
            let x = run(Strategy::Brute);
            assert_eq!(x, run(Strategy::Pruned));
            assert_eq!(x, run(Strategy::Propagate));
            checked += 1;
        }
    }
}
