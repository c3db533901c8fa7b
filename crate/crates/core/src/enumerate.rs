//! Isomorphism-class catalogs of small graphs and extension enumeration over a fixed graph.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::low_mask;
use crate::canon::{canonical_form, canonical_form_colored, Certificate};
use crate::classes::ForbiddenClass;
use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_ORDER};

/// Largest order for which unfiltered catalogs are built.
pub const CATALOG_MAX_ORDER: usize = 9;

/// One canonically labelled representative per isomorphism class.
#[derive(Clone, Debug)]
pub struct IsoCatalog {
    order: usize,
    members: Vec<Graph>,
    index: HashMap<Certificate, usize>,
}

impl IsoCatalog {
    fn from_certificates(order: usize, certs: impl IntoIterator<Item = Certificate>) -> Self {
        let mut members = Vec::new();
        let mut index = HashMap::new();
        for c in certs {
            index.insert(c.clone(), members.len());
            members.push(c.to_graph());
        }
        IsoCatalog { order, members, index }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn members(&self) -> &[Graph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of the member isomorphic to `g`.
    pub fn position(&self, g: &Graph) -> Option<usize> {
        if g.order() != self.order {
            return None;
        }
        self.index.get(&canonical_form(g).certificate).copied()
    }

    /// Catalog manifest for cache files.
    pub fn manifest(&self, class: &str) -> CatalogManifest {
        CatalogManifest {
            order: self.order,
            class: class.to_string(),
            count: self.len(),
            generator_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Rebuilds a catalog from graph6 lines, rejecting duplicates and wrong orders.
    pub fn from_graphs(order: usize, graphs: &[Graph]) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for g in graphs {
            if g.order() != order {
                return Err(Error::InvalidParameter(format!("catalog of order {order} holds a graph of order {}", g.order())));
            }
            let c = canonical_form(g).certificate;
            if seen.insert(c, ()).is_some() {
                return Err(Error::InvalidParameter(format!("isomorphic duplicate {g:?}")));
            }
        }
        Ok(Self::from_certificates(order, seen.into_keys()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogManifest {
    pub order: usize,
    pub class: String,
    pub count: usize,
    pub generator_version: String,
}

fn catalog_cache() -> &'static Mutex<HashMap<usize, Arc<IsoCatalog>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<IsoCatalog>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All graphs on `n` vertices up to isomorphism, ordered by certificate.
///
/// Built by canonical augmentation: every class of order `n` arises by adding one vertex to a
/// member of order `n - 1`, so the parents are augmented in parallel and merged by certificate.
pub fn all_graphs(n: usize) -> Result<Arc<IsoCatalog>> {
    if n > CATALOG_MAX_ORDER {
        return Err(Error::OrderBound { order: n, bound: CATALOG_MAX_ORDER });
    }
    if let Some(c) = catalog_cache().lock().unwrap().get(&n) {
        return Ok(c.clone());
    }
    let cat = if n == 0 {
        IsoCatalog::from_certificates(0, [canonical_form(&Graph::empty(0)).certificate])
    } else {
        let parents = all_graphs(n - 1)?;
        let certs: Vec<Certificate> = parents
            .members()
            .par_iter()
            .flat_map_iter(|p| {
                (0..1u64 << (n - 1)).map(move |nbrs| {
                    let mut g = p.clone();
                    g.add_vertex(nbrs).expect("order within bound");
                    canonical_form(&g).certificate
                })
            })
            .collect();
        let unique: std::collections::BTreeSet<Certificate> = certs.into_iter().collect();
        IsoCatalog::from_certificates(n, unique)
    };
    let cat = Arc::new(cat);
    catalog_cache().lock().unwrap().insert(n, cat.clone());
    Ok(cat)
}

/// The members of `all_graphs(n)` that lie in `k`, in catalog order.
pub fn all_graphs_in_class(k: &ForbiddenClass, n: usize) -> Result<Arc<IsoCatalog>> {
    if k.forbidden().is_empty() && k.predicate().is_none() {
        return all_graphs(n);
    }
    let all = all_graphs(n)?;
    let keep: Vec<bool> = all.members().par_iter().map(|g| k.member(g)).collect();
    let certs = all.members().iter().zip(keep).filter(|(_, keep)| *keep).map(|(g, _)| canonical_form(g).certificate);
    Ok(Arc::new(IsoCatalog::from_certificates(n, certs)))
}

/// Which relabellings of the base identify two extensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Automorphisms of the base.
    Full,
    /// Automorphisms of the base that map its first `m` vertices onto themselves.
    Relative(usize),
    /// Only the identity on the base: extensions are distinct unless they differ by a
    /// permutation of the new vertices.
    Labeled,
}

fn colors(base_order: usize, total: usize, sym: Symmetry) -> Vec<u32> {
    (0..total)
        .map(|v| match sym {
            _ if v >= base_order => match sym {
                Symmetry::Full => 1,
                Symmetry::Relative(_) => 2,
                Symmetry::Labeled => base_order as u32,
            },
            Symmetry::Full => 0,
            Symmetry::Relative(m) => (v >= m) as u32,
            Symmetry::Labeled => v as u32,
        })
        .collect()
}

/// Extensions of a fixed graph inside a class: graphs containing it induced on its own labels
/// `0..n`, with new vertices labelled from `n`. Each level (number of added vertices) is built
/// from the previous one and deduplicated up to the chosen [`Symmetry`]; the first-generated
/// labelling of each class is kept, so output order is deterministic.
#[derive(Clone, Debug)]
pub struct Extensions<'a> {
    base: &'a Graph,
    class: &'a ForbiddenClass,
    extra: usize,
    symmetry: Symmetry,
    limit: Option<usize>,
}

impl<'a> Extensions<'a> {
    pub fn new(base: &'a Graph, class: &'a ForbiddenClass, extra: usize) -> Result<Self> {
        if base.order() + extra > MAX_ORDER {
            return Err(Error::OrderBound { order: base.order() + extra, bound: MAX_ORDER });
        }
        Ok(Extensions { base, class, extra, symmetry: Symmetry::Full, limit: None })
    }

    pub fn symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    /// Fails with [`Error::BoundExceeded`] instead of examining more than `limit` candidate
    /// graphs in total.
    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    /// Streams the extensions level by level (0 added vertices first).
    pub fn iter(&self) -> ExtensionIter<'a> {
        ExtensionIter {
            spec: self.clone(),
            level: Vec::new(),
            next_level: 0,
            pos: 0,
            examined: 0,
            failed: false,
        }
    }

    pub fn collect_all(&self) -> Result<Vec<Graph>> {
        self.iter().collect()
    }

    /// Extensions with exactly `j` added vertices, given those with `j - 1`. Intermediate
    /// levels keep non-members when the class is not hereditary.
    fn grow(&self, prev: &[Graph], examined: &mut usize) -> Result<Vec<Graph>> {
        let n = prev.first().map_or(0, Graph::order);
        let per_parent = 1usize << n.min(60);
        let total = prev.len().saturating_mul(per_parent);
        *examined = examined.saturating_add(total);
        if let Some(limit) = self.limit {
            if *examined > limit {
                return Err(Error::BoundExceeded(format!(
                    "extension enumeration would examine more than {limit} candidates"
                )));
            }
        }
        let hereditary = self.class.is_hereditary();
        let base_n = self.base.order();
        let sym = self.symmetry;
        let candidates: Vec<Vec<(Certificate, Graph)>> = prev
            .par_iter()
            .map(|p| {
                let mut out = Vec::new();
                for nbrs in 0..=low_mask(n) {
                    let mut g = p.clone();
                    g.add_vertex(nbrs).expect("order checked");
                    if hereditary && !self.class.member(&g) {
                        continue;
                    }
                    let cert = canonical_form_colored(&g, &colors(base_n, n + 1, sym)).certificate;
                    out.push((cert, g));
                }
                out
            })
            .collect();
        let mut seen = HashSet::new();
        let mut level = Vec::new();
        for (cert, g) in candidates.into_iter().flatten() {
            if seen.insert(cert) {
                level.push(g);
            }
        }
        Ok(level)
    }
}

pub struct ExtensionIter<'a> {
    spec: Extensions<'a>,
    level: Vec<Graph>,
    next_level: usize,
    pos: usize,
    examined: usize,
    failed: bool,
}

impl Iterator for ExtensionIter<'_> {
    type Item = Result<Graph>;

    fn next(&mut self) -> Option<Result<Graph>> {
        loop {
            if self.failed {
                return None;
            }
            while self.pos < self.level.len() {
                let g = &self.level[self.pos];
                self.pos += 1;
                if self.spec.class.is_hereditary() || self.spec.class.member(g) {
                    return Some(Ok(g.clone()));
                }
            }
            if self.next_level > self.spec.extra {
                return None;
            }
            let level = if self.next_level == 0 {
                if self.spec.class.is_hereditary() && !self.spec.class.member(self.spec.base) {
                    self.next_level = self.spec.extra + 1;
                    return None;
                }
                Ok(vec![self.spec.base.clone()])
            } else if self.level.is_empty() {
                Ok(Vec::new())
            } else {
                self.spec.grow(&self.level, &mut self.examined)
            };
            self.next_level += 1;
            match level {
                Ok(l) => {
                    self.level = l;
                    self.pos = 0;
                }
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Extensions of `g` in `k` with at most `extra` new vertices, up to automorphisms of `g`.
pub fn extensions_up_to<'a>(g: &'a Graph, k: &'a ForbiddenClass, extra: usize) -> Result<ExtensionIter<'a>> {
    Ok(Extensions::new(g, k, extra)?.iter())
}

/// Extensions of `g` in `k` by exactly one vertex, up to automorphisms of `g`.
pub fn one_vertex_extensions(g: &Graph, k: &ForbiddenClass) -> Result<Vec<Graph>> {
    let spec = Extensions::new(g, k, 1)?;
    let mut examined = 0;
    let level = spec.grow(std::slice::from_ref(g), &mut examined)?;
    Ok(level.into_iter().filter(|h| k.member(h)).collect())
}
