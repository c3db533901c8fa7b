//! Exact search for extension pairs whose free amalgam leaves a finite-omission class.
//!
//! Let `A` be the first `a` vertices of a witness `W`, and let `B, C` range over the members of the
//! class that contain `W` on their first labels and add at most `extra` vertices. A weak copy of a
//! forbidden `F` in the free amalgam `B ⊔_A C` meets `A` in some set `S`; every component of `F - S`
//! lies entirely on the `B` side or entirely on the `C` side, and both sides are used (otherwise the
//! copy sits inside `B` or `C`). Each side embeds into `W - A` plus fresh vertices, and the smallest
//! such `B` (or `C`) keeps only the edges the copy needs at fresh vertices. Since the class is
//! closed under subgraphs, a suitable pair exists iff these reduced graphs are members.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::bits::{bit, low_mask, Bits};
use crate::classes::ForbiddenClass;
use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_ORDER};

/// Two extensions of the witness whose free amalgam over the base contains `forbidden`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub forbidden: Graph,
    pub left: Graph,
    pub right: Graph,
}

/// All reduced obstructions (or only the first when `first_only`), in a deterministic order.
pub fn free_amalgam_obstructions(
    k: &ForbiddenClass,
    base_order: usize,
    witness: &Graph,
    extra: usize,
    first_only: bool,
) -> Result<Vec<Obstruction>> {
    if !k.is_pure_omission() {
        return Err(Error::InvalidParameter(format!(
            "obstruction search needs a finite forbidden family, `{}` has a predicate",
            k.name()
        )));
    }
    if base_order > witness.order() {
        return Err(Error::Precondition("base larger than the witness".into()));
    }
    if witness.order() + extra > MAX_ORDER {
        return Err(Error::OrderBound { order: witness.order() + extra, bound: MAX_ORDER });
    }
    let mut out = Vec::new();
    for f in k.forbidden() {
        let jobs: Vec<u64> = (0..1u64 << f.order()).filter(|s| s.count_ones() as usize <= base_order).collect();
        let found: Vec<Vec<Obstruction>> = jobs
            .par_iter()
            .map(|&s| {
                let ctx = Ctx { k, f, a: base_order, w: witness, extra };
                ctx.for_separator(s, first_only)
            })
            .collect();
        for o in found.into_iter().flatten() {
            out.push(o);
            if first_only {
                return Ok(out);
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|o| seen.insert((o.left.clone(), o.right.clone())));
    Ok(out)
}

struct Ctx<'a> {
    k: &'a ForbiddenClass,
    f: &'a Graph,
    a: usize,
    w: &'a Graph,
    extra: usize,
}

impl Ctx<'_> {
    fn components(&self, within: u64) -> Vec<u64> {
        let mut left = within;
        let mut comps = Vec::new();
        while left != 0 {
            let v = left.trailing_zeros() as usize;
            let mut comp = bit(v);
            let mut frontier = bit(v);
            while frontier != 0 {
                let mut next = 0;
                for u in Bits(frontier) {
                    next |= self.f.neighbours(u) & within & !comp;
                }
                comp |= next;
                frontier = next;
            }
            comps.push(comp);
            left &= !comp;
        }
        comps
    }

    fn for_separator(&self, s: u64, first_only: bool) -> Vec<Obstruction> {
        let rest = self.f.vertex_mask() & !s;
        let comps = self.components(rest);
        if comps.len() < 2 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let svs: Vec<usize> = Bits(s).collect();
        let mut mu = vec![usize::MAX; self.f.order()];
        self.maps_into_base(&svs, 0, &mut mu, 0, &mut |mu| {
            let mut memo: HashMap<u64, Option<Graph>> = HashMap::new();
            let m = comps.len();
            // Component 0 stays on the left; the two sides play symmetric roles.
            for split in 1u64..1 << (m - 1) {
                let right: u64 = Bits(split).map(|i| comps[i + 1]).fold(0, |x, c| x | c);
                let left = rest & !right;
                let l = memo.entry(left).or_insert_with(|| self.realize(mu, left)).clone();
                let Some(l) = l else { continue };
                let r = memo.entry(right).or_insert_with(|| self.realize(mu, right)).clone();
                if let Some(r) = r {
                    out.push(Obstruction { forbidden: self.f.clone(), left: l, right: r });
                    if first_only {
                        return true;
                    }
                }
            }
            false
        });
        out
    }

    /// Injective maps of the separator into the base that send edges to edges.
    fn maps_into_base(&self, svs: &[usize], i: usize, mu: &mut [usize], used: u64, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if i == svs.len() {
            return visit(mu);
        }
        let x = svs[i];
        for t in Bits(low_mask(self.a) & !used) {
            if svs[..i].iter().all(|&y| !self.f.has_edge(x, y) || self.w.has_edge(t, mu[y])) {
                mu[x] = t;
                if self.maps_into_base(svs, i + 1, mu, used | bit(t), visit) {
                    return true;
                }
            }
        }
        mu[x] = usize::MAX;
        false
    }

    /// The first member obtained by placing the vertices of `side` into `W - A` or fresh
    /// vertices, with the separator fixed by `mu`.
    fn realize(&self, mu: &[usize], side: u64) -> Option<Graph> {
        let nw = self.w.order();
        let mut order = Vec::new();
        let mut placed = 0u64;
        for (v, &t) in mu.iter().enumerate() {
            if t != usize::MAX {
                placed |= bit(v);
            }
        }
        let sep = placed;
        while (order.len() as u32) < side.count_ones() {
            let v = Bits(side & !placed)
                .max_by_key(|&v| ((self.f.neighbours(v) & placed).count_ones(), std::cmp::Reverse(v)))
                .unwrap();
            order.push(v);
            placed |= bit(v);
        }
        let mut img = mu.to_vec();
        let mut tried = HashSet::new();
        self.place(&order, 0, &mut img, 0, 0, sep | side, nw, &mut tried)
    }

    #[allow(clippy::too_many_arguments)]
    fn place(
        &self,
        order: &[usize],
        i: usize,
        img: &mut [usize],
        used: u64,
        fresh: usize,
        scope: u64,
        nw: usize,
        tried: &mut HashSet<Graph>,
    ) -> Option<Graph> {
        if i == order.len() {
            let mut g = self.w.clone();
            for _ in 0..fresh {
                g.add_vertex(0).ok()?;
            }
            for u in Bits(scope) {
                for v in Bits(self.f.neighbours(u) & scope) {
                    if u < v && (img[u] >= nw || img[v] >= nw) {
                        g.add_edge(img[u], img[v]);
                    }
                }
            }
            if tried.insert(g.clone()) && self.k.member(&g) {
                return Some(g);
            }
            return None;
        }
        let x = order[i];
        let done: Vec<usize> = Bits(self.f.neighbours(x) & scope).filter(|&y| img[y] != usize::MAX).collect();
        let mut cands = self.w.vertex_mask() & !low_mask(self.a) & !used;
        for &y in &done {
            if img[y] < nw {
                cands &= self.w.neighbours(img[y]);
            }
        }
        for t in Bits(cands) {
            img[x] = t;
            if let Some(g) = self.place(order, i + 1, img, used | bit(t), fresh, scope, nw, tried) {
                img[x] = usize::MAX;
                return Some(g);
            }
        }
        if fresh < self.extra {
            img[x] = nw + fresh;
            let r = self.place(order, i + 1, img, used, fresh + 1, scope, nw, tried);
            img[x] = usize::MAX;
            if r.is_some() {
                return r;
            }
        }
        img[x] = usize::MAX;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgamation::{free_amalgam, AmalgamationProblem};
    use crate::enumerate::{Extensions, Symmetry};
    use crate::graph::named::*;

    /// Oracle: the free amalgam of every pair of enumerated extensions.
    fn literal(k: &ForbiddenClass, a: usize, w: &Graph, extra: usize) -> bool {
        let exts = Extensions::new(w, k, extra).unwrap().symmetry(Symmetry::Labeled).collect_all().unwrap();
        let base = w.induced(&(0..a).collect::<Vec<_>>());
        exts.iter().any(|b| {
            exts.iter().any(|c| {
                let p = AmalgamationProblem::over_prefix(&base, b, c).unwrap();
                !k.member(&free_amalgam(&p).unwrap().result)
            })
        })
    }

    #[test]
    fn agrees_with_literal_enumeration() {
        let classes = [ForbiddenClass::c4_free(), ForbiddenClass::triangle_free(), ForbiddenClass::bowtie_free(), ForbiddenClass::path_free(3).unwrap()];
        let witnesses = [
            (Graph::empty(2), 2),
            (Graph::empty(2), 1),
            (linear(3).unwrap(), 1),
            (linear(3).unwrap(), 3),
            (complete(2).unwrap(), 2),
            (cycle(5).unwrap(), 5),
            (cycle(5).unwrap(), 2),
        ];
        for k in &classes {
            for (w, a) in &witnesses {
                if !k.member(w) {
                    continue;
                }
                for extra in 1..=2 {
                    let obs = free_amalgam_obstructions(k, *a, w, extra, false).unwrap();
                    assert_eq!(!obs.is_empty(), literal(k, *a, w, extra), "{} over {a} of {w:?}, extra {extra}", k.name());
                    let base = w.induced(&(0..*a).collect::<Vec<_>>());
                    for o in obs {
                        assert!(o.left.has_prefix(w) && o.right.has_prefix(w));
                        assert!(k.member(&o.left) && k.member(&o.right));
                        let p = AmalgamationProblem::over_prefix(&base, &o.left, &o.right).unwrap();
                        assert!(!k.member(&free_amalgam(&p).unwrap().result));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_predicate_classes() {
        assert!(free_amalgam_obstructions(&ForbiddenClass::linear_forests(), 1, &Graph::empty(1), 1, true).is_err());
    }
}
