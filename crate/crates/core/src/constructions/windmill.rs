//! WAP witnesses for the class omitting the windmill Wd(3,3).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::{bit, Bits};
use crate::classes::ForbiddenClass;
use crate::embed::{Mode, Search};
use crate::error::{Error, Result};
use crate::graph::{named, Graph};

/// How a base vertex obtained its bowtie.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaturationCase {
    /// A weak bowtie centred at the vertex was already present.
    Existing,
    /// No edge inside the neighbourhood: a whole bowtie was glued on.
    FullBowtie,
    /// Every edge inside the neighbourhood meets one vertex, or they form a triangle: one
    /// pendant triangle was added.
    Triangle,
}

/// For each base vertex `a`, the images `(v1, v2, v3, v4)` of a weak bowtie with centre `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BowtieAnchors {
    pub anchors: BTreeMap<usize, [usize; 4]>,
    pub cases: BTreeMap<usize, SaturationCase>,
}

impl BowtieAnchors {
    pub fn get(&self, a: usize) -> Option<[usize; 4]> {
        self.anchors.get(&a).copied()
    }

    /// Every recorded bowtie is present in `g` with distinct vertices.
    pub fn verify(&self, g: &Graph) -> bool {
        self.anchors.iter().all(|(&a, &[v1, v2, v3, v4])| {
            let vs = [a, v1, v2, v3, v4];
            vs.iter().all(|&v| v < g.order())
                && vs.iter().fold(0u64, |m, &v| m | bit(v)).count_ones() == 5
                && [(a, v1), (a, v2), (v1, v2), (a, v3), (a, v4), (v3, v4)].iter().all(|&(x, y)| g.has_edge(x, y))
        })
    }
}

fn bowtie_at(g: &Graph, a: usize) -> Option<[usize; 4]> {
    let bowtie = named::bowtie().graph;
    Search::new(&bowtie, g, Mode::Weak).fix(0, a).first().map(|m| [m[1], m[2], m[3], m[4]])
}

fn check_member(k: &ForbiddenClass, g: &Graph, what: &str) -> Result<()> {
    if k.member(g) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} contains a weak copy of Wd(3,3)")))
    }
}

/// Extends `a_graph` so that every original vertex is the centre of a weak bowtie, processing
/// vertices in label order.
pub fn bowtie_saturate(a_graph: &Graph) -> Result<(Graph, BowtieAnchors)> {
    let k = ForbiddenClass::windmill_free();
    check_member(&k, a_graph, "the base")?;
    let mut g = a_graph.clone();
    let mut out = BowtieAnchors::default();
    for a in 0..a_graph.order() {
        if let Some(anchor) = bowtie_at(&g, a) {
            out.anchors.insert(a, anchor);
            out.cases.insert(a, SaturationCase::Existing);
            continue;
        }
        let case = if g.matching_number_within(g.neighbours(a), 1) == 0 {
            let n1 = g.add_vertex(bit(a))?;
            let n2 = g.add_vertex(bit(a) | bit(n1))?;
            let n3 = g.add_vertex(bit(a))?;
            let n4 = g.add_vertex(bit(a) | bit(n3))?;
            out.anchors.insert(a, [n1, n2, n3, n4]);
            SaturationCase::FullBowtie
        } else {
            let n1 = g.add_vertex(bit(a))?;
            g.add_vertex(bit(a) | bit(n1))?;
            let anchor = bowtie_at(&g, a).ok_or_else(|| Error::Internal(format!("no bowtie at {a} after adding a triangle")))?;
            out.anchors.insert(a, anchor);
            SaturationCase::Triangle
        };
        out.cases.insert(a, case);
    }
    if !k.member(&g) {
        return Err(Error::Internal("bowtie saturation produced a copy of Wd(3,3)".into()));
    }
    Ok((g, out))
}

/// The saturated witness together with its bowtie table and the vertices added by the second
/// stage as `(a, k, w)` with `w` adjacent to `a` and `v_k[a]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindmillWitness {
    pub base: Graph,
    pub witness: Graph,
    pub anchors: BowtieAnchors,
    pub added: Vec<(usize, usize, usize)>,
}

/// Whether `g` has a vertex outside the bowtie of `a` adjacent to `a` and `v`.
fn has_second_apex(g: &Graph, a: usize, v: usize, anchor: &[usize; 4]) -> bool {
    let wings = anchor.iter().fold(0u64, |m, &x| m | bit(x));
    g.common_neighbours(a, v) & !wings != 0
}

/// [`bowtie_saturate`] followed by the apex loop: for each original vertex `a` (label order)
/// and `k = 1..4`, when no vertex outside the bowtie is adjacent to both `a` and `v_k[a]`, a
/// new vertex adjacent exactly to those two is added if the result still omits Wd(3,3).
/// Repeats until nothing changes.
pub fn wap_witness_full(a_graph: &Graph) -> Result<WindmillWitness> {
    let k = ForbiddenClass::windmill_free();
    let (mut g, anchors) = bowtie_saturate(a_graph)?;
    let mut added = Vec::new();
    loop {
        let mut changed = false;
        for a in 0..a_graph.order() {
            let anchor = anchors.anchors[&a];
            for (i, &v) in anchor.iter().enumerate() {
                if has_second_apex(&g, a, v, &anchor) {
                    continue;
                }
                let mut h = g.clone();
                let w = h.add_vertex(bit(a) | bit(v))?;
                if k.member(&h) {
                    g = h;
                    added.push((a, i + 1, w));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if !k.member(&g) || !anchors.verify(&g) {
        return Err(Error::Internal("windmill witness failed its own checks".into()));
    }
    Ok(WindmillWitness { base: a_graph.clone(), witness: g, anchors, added })
}

pub fn wap_witness(a_graph: &Graph) -> Result<Graph> {
    Ok(wap_witness_full(a_graph)?.witness)
}

/// Second-stage vertices still addable to `g` for the given anchors; empty at a fixpoint.
pub fn missing_apexes(g: &Graph, base_order: usize, anchors: &BowtieAnchors) -> Vec<(usize, usize)> {
    let k = ForbiddenClass::windmill_free();
    let mut out = Vec::new();
    for a in 0..base_order {
        let Some(anchor) = anchors.get(a) else { continue };
        for (i, &v) in anchor.iter().enumerate() {
            if has_second_apex(g, a, v, &anchor) {
                continue;
            }
            let mut h = g.clone();
            if h.add_vertex(bit(a) | bit(v)).is_ok() && k.member(&h) {
                out.push((a, i + 1));
            }
        }
    }
    out
}

/// Vertices of `g` that are the centre of some weak bowtie.
pub fn bowtie_centres(g: &Graph) -> u64 {
    Bits(g.vertex_mask()).filter(|&v| bowtie_at(g, v).is_some()).fold(0, |m, v| m | bit(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgamation::{free_amalgam, free_amalgam_obstructions, AmalgamationProblem};
    use crate::embed::has_weak_copy;
    use crate::enumerate::{Extensions, Symmetry};
    use crate::graph::named::*;

    fn h() -> Graph {
        windmill33().graph
    }

    #[test]
    fn single_vertex_gets_a_bowtie() {
        let (e, anchors) = bowtie_saturate(&Graph::empty(1)).unwrap();
        assert_eq!(e.order(), 5);
        assert!(crate::canon::are_isomorphic(&e, &bowtie().graph));
        assert_eq!(anchors.get(0), Some([1, 2, 3, 4]));
        assert_eq!(anchors.cases[&0], SaturationCase::FullBowtie);
        assert!(anchors.verify(&e));
    }

    #[test]
    fn bowtie_base_saturates_wings_with_triangles() {
        let b = bowtie().graph;
        let (e, anchors) = bowtie_saturate(&b).unwrap();
        assert_eq!(anchors.cases[&0], SaturationCase::Existing);
        for v in 1..5 {
            assert_eq!(anchors.cases[&v], SaturationCase::Triangle);
        }
        assert_eq!(e.order(), 5 + 2 * 4);
        assert!(!has_weak_copy(&h(), &e));
        assert!(anchors.verify(&e));
    }

    #[test]
    fn k4_gets_pendant_triangles() {
        let (e, anchors) = bowtie_saturate(&complete(4).unwrap()).unwrap();
        assert!((0..4).all(|v| anchors.cases[&v] == SaturationCase::Triangle));
        assert_eq!(e.order(), 12);
        assert!(!has_weak_copy(&h(), &e));
    }

    #[test]
    fn rejects_non_members() {
        assert!(bowtie_saturate(&h()).is_err());
        assert!(wap_witness(&complete(7).unwrap()).is_err());
    }

    #[test]
    fn single_vertex_witness() {
        let w = wap_witness_full(&Graph::empty(1)).unwrap();
        assert_eq!(w.witness.order(), 7);
        assert_eq!(w.added.iter().map(|&(_, k, _)| k).collect::<Vec<_>>(), vec![1, 3]);
        assert!(missing_apexes(&w.witness, 1, &w.anchors).is_empty());
    }

    #[test]
    fn minimal_apex_decides_the_existence_of_any_apex() {
        // A one-vertex extension with a vertex adjacent to `a` and `v_k[a]` exists in the class
        // iff the extension adjacent to exactly those two vertices is in the class.
        let k = ForbiddenClass::windmill_free();
        for base in [Graph::empty(1), complete(2).unwrap(), linear(3).unwrap()] {
            let (e, anchors) = bowtie_saturate(&base).unwrap();
            let exts = Extensions::new(&e, &k, 1).unwrap().symmetry(Symmetry::Labeled).collect_all().unwrap();
            for a in 0..base.order() {
                let anchor = anchors.get(a).unwrap();
                for &v in &anchor {
                    let n = e.order();
                    let any = exts.iter().any(|f| f.order() == n + 1 && f.has_edge(n, a) && f.has_edge(n, v));
                    let mut minimal = e.clone();
                    minimal.add_vertex(bit(a) | bit(v)).unwrap();
                    assert_eq!(any, k.member(&minimal));
                }
            }
        }
    }

    #[test]
    fn witness_is_idempotent() {
        for base in [Graph::empty(1), complete(3).unwrap(), bowtie().graph] {
            let w = wap_witness_full(&base).unwrap();
            let again = wap_witness_full(&w.witness).unwrap();
            assert!(missing_apexes(&w.witness, base.order(), &w.anchors).is_empty());
            assert!(again.added.iter().all(|&(a, _, _)| a >= base.order()));
            assert!((0..base.order()).all(|a| again.anchors.cases[&a] == SaturationCase::Existing));
        }
    }

    #[test]
    fn free_amalgam_over_the_base_doubles_the_wings() {
        let k = ForbiddenClass::windmill_free();
        let a = Graph::empty(1);
        let w = wap_witness(&a).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &w, &w).unwrap();
        let free = free_amalgam(&p).unwrap().result;
        assert_eq!(free.order(), 13);
        assert!(has_weak_copy(&h(), &free));
        assert!(!free_amalgam_obstructions(&k, 1, &w, 2, true).unwrap().is_empty());
    }

    /// Every amalgam of `b` and `c` over their common prefix of order `a`, by brute force over
    /// partial injections of the private vertices, tested for a weak Wd(3,3).
    fn some_amalgam_omits_h(a: usize, b: &Graph, c: &Graph) -> bool {
        let (nb, nc) = (b.order() - a, c.order() - a);
        fn go(i: usize, nb: usize, nc: usize, used: u64, map: &mut Vec<Option<usize>>, check: &dyn Fn(&[Option<usize>]) -> bool) -> bool {
            if i == nb {
                return check(map);
            }
            map[i] = None;
            if go(i + 1, nb, nc, used, map, check) {
                return true;
            }
            for j in 0..nc {
                if used & bit(j) == 0 {
                    map[i] = Some(j);
                    if go(i + 1, nb, nc, used | bit(j), map, check) {
                        return true;
                    }
                }
            }
            false
        }
        let check = |map: &[Option<usize>]| {
            let mut d = c.clone();
            let mut pos: Vec<usize> = (0..a).collect();
            for m in map {
                pos.push(match m {
                    Some(j) => a + j,
                    None => d.add_vertex(0).unwrap(),
                });
            }
            for (u, v) in b.edges() {
                d.add_edge(pos[u], pos[v]);
            }
            !has_weak_copy(&h(), &d)
        };
        go(0, nb, nc, 0, &mut vec![None; nb], &check)
    }

    #[test]
    fn witness_survives_one_vertex_but_not_two() {
        use crate::amalgamation::{verify_wap_witness, Budget, LocalRefuter, Refuter};
        let k = ForbiddenClass::windmill_free();
        let a = Graph::empty(1);
        let w = wap_witness(&a).unwrap();
        assert!(verify_wap_witness(&k, &a, &w, 1, Budget::default()).unwrap().verified());

        let (b, c) = LocalRefuter { right_extra: 2 }.refute(&k, &a, &w).unwrap().unwrap();
        assert_eq!((b.order(), c.order()), (8, 9));
        assert!(k.member(&b) && k.member(&c) && b.has_prefix(&w) && c.has_prefix(&w));
        assert!(!some_amalgam_omits_h(1, &b, &c));
        // The oracle does find amalgams for a pair that has one.
        assert!(some_amalgam_omits_h(1, &b, &b));

        for base in [complete(3).unwrap(), Graph::empty(2)] {
            let w = wap_witness(&base).unwrap();
            assert!(LocalRefuter { right_extra: 2 }.refute(&k, &base, &w).unwrap().is_some());
        }
    }

    #[test]
    fn bare_base_is_not_a_witness() {
        let k = ForbiddenClass::windmill_free();
        assert!(free_amalgam_obstructions(&k, 1, &Graph::empty(1), 2, true).unwrap().is_empty());
        assert!(!free_amalgam_obstructions(&k, 1, &Graph::empty(1), 4, true).unwrap().is_empty());
    }
}
