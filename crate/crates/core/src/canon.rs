//! Exact canonical labelling by partition refinement and individualisation.
//!
//! Every vertex may carry a colour; colour classes are the cells of the initial ordered partition
//! (ascending colour value), so the certificate identifies graphs up to colour-preserving
//! isomorphism. The search keeps the lexicographically largest leaf and prunes with automorphisms
//! discovered on the way (first-path aborts plus orbit pruning among siblings).

use crate::bits::{bit, Bits};
use crate::graph::Graph;

/// Complete invariant of a (vertex-coloured) graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate {
    colors: Vec<u32>,
    rows: Vec<u64>,
}

impl Certificate {
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// The canonically labelled graph this certificate describes.
    pub fn to_graph(&self) -> Graph {
        Graph::from_masks(self.rows.clone()).expect("certificate rows are a valid graph")
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub certificate: Certificate,
    /// `relabeling[v]` is the canonical label of vertex `v`.
    pub relabeling: Vec<usize>,
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonical_form_colored(g, &vec![0; g.order()])
}

pub fn canonical_form_colored(g: &Graph, colors: &[u32]) -> CanonicalForm {
    Canon::new(g, colors).run()
}

/// The canonically relabelled copy of `g`.
pub fn canonical_graph(g: &Graph) -> Graph {
    let cf = canonical_form(g);
    g.permuted(&cf.relabeling)
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.order() == b.order()
        && a.edge_count() == b.edge_count()
        && canonical_form(a).certificate == canonical_form(b).certificate
}

/// Generators of the colour-preserving automorphism group, as found during canonisation.
pub fn automorphism_generators(g: &Graph, colors: &[u32]) -> Vec<Vec<usize>> {
    let mut c = Canon::new(g, colors);
    c.run_search();
    c.autos
}

type Partition = Vec<u64>;

struct Canon<'a> {
    g: &'a Graph,
    colors: Vec<u32>,
    first: Option<(Vec<usize>, Vec<u64>, Vec<usize>)>,
    best: Option<(Vec<usize>, Vec<u64>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

enum Step {
    Continue,
    /// Unwind until the node at this depth.
    Abort(usize),
}

impl<'a> Canon<'a> {
    fn new(g: &'a Graph, colors: &[u32]) -> Self {
        assert_eq!(colors.len(), g.order(), "one colour per vertex");
        Canon { g, colors: colors.to_vec(), first: None, best: None, autos: Vec::new() }
    }

    fn run(mut self) -> CanonicalForm {
        self.run_search();
        let n = self.g.order();
        let (_, rows, order) = self.best.take().unwrap_or_default();
        let mut relabeling = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            relabeling[v] = i;
        }
        let mut sorted = self.colors.clone();
        sorted.sort_unstable();
        CanonicalForm { certificate: Certificate { colors: sorted, rows }, relabeling }
    }

    fn run_search(&mut self) {
        if self.g.order() == 0 {
            self.best = Some((Vec::new(), Vec::new(), Vec::new()));
            return;
        }
        let mut distinct: Vec<u32> = self.colors.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut part: Partition = distinct
            .iter()
            .map(|&c| (0..self.g.order()).filter(|&v| self.colors[v] == c).fold(0u64, |m, v| m | bit(v)))
            .collect();
        refine(self.g, &mut part);
        let mut seq = Vec::new();
        self.search(&part, &mut seq);
    }

    fn search(&mut self, part: &Partition, seq: &mut Vec<usize>) -> Step {
        let target = part
            .iter()
            .enumerate()
            .filter(|(_, c)| c.count_ones() > 1)
            .min_by_key(|&(i, c)| (c.count_ones(), i))
            .map(|(i, _)| i);
        let Some(ti) = target else {
            return self.leaf(part, seq);
        };
        let depth = seq.len();
        let cell = part[ti];
        let mut tried: Vec<usize> = Vec::new();
        for v in Bits(cell) {
            if !tried.is_empty() && self.in_orbit_of(v, &tried, seq) {
                continue;
            }
            tried.push(v);
            let mut child = Vec::with_capacity(part.len() + 1);
            child.extend_from_slice(&part[..ti]);
            child.push(bit(v));
            child.push(cell & !bit(v));
            child.extend_from_slice(&part[ti + 1..]);
            refine(self.g, &mut child);
            seq.push(v);
            let r = self.search(&child, seq);
            seq.pop();
            if let Step::Abort(d) = r {
                if d < depth {
                    return r;
                }
            }
        }
        Step::Continue
    }

    fn in_orbit_of(&self, v: usize, tried: &[usize], seq: &[usize]) -> bool {
        let n = self.g.order();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut any = false;
        for a in &self.autos {
            if seq.iter().all(|&s| a[s] == s) {
                any = true;
                for (x, &ax) in a.iter().enumerate().take(n) {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, ax));
                    if rx != ry {
                        parent[rx] = ry;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn leaf(&mut self, part: &Partition, seq: &[usize]) -> Step {
        let order: Vec<usize> = part.iter().map(|c| c.trailing_zeros() as usize).collect();
        let mut pos = vec![0usize; order.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let rows: Vec<u64> =
            order.iter().map(|&v| Bits(self.g.neighbours(v)).fold(0u64, |m, w| m | bit(pos[w]))).collect();

        if self.first.is_none() {
            self.first = Some((seq.to_vec(), rows.clone(), order.clone()));
            self.best = Some((seq.to_vec(), rows, order));
            return Step::Continue;
        }
        for which in [0, 1] {
            let (bseq, brows, border) = if which == 0 { self.first.as_ref() } else { self.best.as_ref() }.unwrap();
            if *brows == rows {
                // order[i] and border[i] get the same canonical label.
                let mut auto = vec![0usize; order.len()];
                for (i, &v) in order.iter().enumerate() {
                    auto[v] = border[i];
                }
                let d = bseq.iter().zip(seq).take_while(|(a, b)| a == b).count();
                if auto.iter().enumerate().any(|(i, &x)| i != x) {
                    self.autos.push(auto);
                }
                return Step::Abort(d);
            }
        }
        if rows > self.best.as_ref().unwrap().1 {
            self.best = Some((seq.to_vec(), rows, order));
        }
        Step::Continue
    }
}

/// Refines an ordered partition to the coarsest equitable refinement. Each split orders the new
/// cells by neighbour count into the splitter, so the result is labelling-invariant.
fn refine(g: &Graph, part: &mut Partition) {
    let mut changed = true;
    while changed {
        changed = false;
        let mut w = 0;
        while w < part.len() {
            let splitter = part[w];
            let mut i = 0;
            while i < part.len() {
                let cell = part[i];
                if cell.count_ones() > 1 {
                    let mut groups: Vec<(u32, u64)> = Vec::new();
                    for v in Bits(cell) {
                        let c = (g.neighbours(v) & splitter).count_ones();
                        match groups.iter_mut().find(|(k, _)| *k == c) {
                            Some((_, m)) => *m |= bit(v),
                            None => groups.push((c, bit(v))),
                        }
                    }
                    if groups.len() > 1 {
                        groups.sort_unstable_by_key(|&(k, _)| k);
                        let k = groups.len();
                        part.splice(i..=i, groups.into_iter().map(|(_, m)| m));
                        changed = true;
                        i += k;
                        continue;
                    }
                }
                i += 1;
            }
            w += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn random_perm(n: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    }

    #[test]
    fn relabelled_cycles_agree() {
        let c5 = cycle(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let base = canonical_form(&c5).certificate;
        for _ in 0..20 {
            let p = random_perm(5, &mut rng);
            assert_eq!(canonical_form(&c5.permuted(&p)).certificate, base);
        }
        assert_ne!(base, canonical_form(&linear(5).unwrap()).certificate);
    }

    #[test]
    fn k4_minus_an_edge() {
        let mut a = complete(4).unwrap();
        a.remove_edge(0, 1);
        let mut b = complete(4).unwrap();
        b.remove_edge(2, 3);
        assert!(are_isomorphic(&a, &b));
    }

    #[test]
    fn relabeling_produces_certificate_graph() {
        let p = petersen();
        let cf = canonical_form(&p);
        assert_eq!(p.permuted(&cf.relabeling), cf.certificate.to_graph());
    }

    #[test]
    fn colours_are_respected() {
        let p3 = linear(3).unwrap();
        let a = canonical_form_colored(&p3, &[1, 0, 0]).certificate;
        let b = canonical_form_colored(&p3, &[0, 0, 1]).certificate;
        let c = canonical_form_colored(&p3, &[0, 1, 0]).certificate;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn symmetric_graphs_finish() {
        // Large automorphism groups must be pruned, not enumerated.
        for g in [Graph::empty(40), complete(30).unwrap(), cycle(40).unwrap()] {
            let cf = canonical_form(&g);
            assert_eq!(g.permuted(&cf.relabeling), cf.certificate.to_graph());
        }
        let gens = automorphism_generators(&petersen(), &[0; 10]);
        assert!(!gens.is_empty());
        for a in gens {
            assert_eq!(petersen().permuted(&a), petersen());
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let mut g = Graph::empty(n);
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            g.add_edge(u, v);
                        }
                        k += 1;
                    }
                }
                g
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn stable_under_permutation(g in arb_graph(9), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let base = canonical_form(&g).certificate;
            for _ in 0..100 {
                let p = random_perm(g.order(), &mut rng);
                prop_assert_eq!(&canonical_form(&g.permuted(&p)).certificate, &base);
            }
        }
    }
}
