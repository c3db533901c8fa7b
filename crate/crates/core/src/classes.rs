//! Hereditary graph classes given by forbidden weak subgraphs and/or a structural predicate.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::bits::{bit, low_mask, Bits};
use crate::canon::are_isomorphic;
use crate::embed::has_weak_copy;
use crate::enumerate::{all_graphs_in_class, IsoCatalog};
use crate::error::{Error, Result};
use crate::graph::{named, Graph};
use crate::io;

/// Structural tests that are not a finite list of forbidden graphs.
#[derive(Clone)]
pub enum Predicate {
    /// Circumference strictly below the bound.
    CircumferenceBelow(usize),
    /// No cycle of odd length at most `2n + 1`.
    NoShortOddCycle(usize),
    /// No subdivision of `K_4` as a subgraph.
    TopK4Free,
    /// Disjoint unions of paths.
    LinearForest,
    /// Arbitrary test, with the closure properties it is declared to have.
    Custom { test: Arc<dyn Fn(&Graph) -> bool + Send + Sync>, hereditary: bool, monotone: bool },
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::CircumferenceBelow(n) => write!(f, "CircumferenceBelow({n})"),
            Predicate::NoShortOddCycle(n) => write!(f, "NoShortOddCycle({n})"),
            Predicate::TopK4Free => write!(f, "TopK4Free"),
            Predicate::LinearForest => write!(f, "LinearForest"),
            Predicate::Custom { hereditary, monotone, .. } => {
                write!(f, "Custom {{ hereditary: {hereditary}, monotone: {monotone} }}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fast {
    Generic,
    Triangle,
    FourCycle,
    /// A vertex whose neighbourhood holds this many disjoint edges (2: bowtie, 3: windmill).
    Fan(usize),
}

/// A hereditary class `K(F)`, optionally intersected with a predicate.
#[derive(Clone, Debug)]
pub struct ForbiddenClass {
    name: String,
    forbidden: Vec<Graph>,
    fast: Vec<Fast>,
    predicate: Option<Predicate>,
    description: String,
}

impl fmt::Display for ForbiddenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl ForbiddenClass {
    /// `K(forbidden)` under the given identifier.
    pub fn omitting(name: impl Into<String>, forbidden: Vec<Graph>, description: impl Into<String>) -> Self {
        let fast = forbidden.iter().map(classify).collect();
        ForbiddenClass { name: name.into(), forbidden, fast, predicate: None, description: description.into() }
    }

    fn with_predicate(name: impl Into<String>, predicate: Predicate, description: impl Into<String>) -> Self {
        ForbiddenClass {
            name: name.into(),
            forbidden: Vec::new(),
            fast: Vec::new(),
            predicate: Some(predicate),
            description: description.into(),
        }
    }

    /// A class defined by an arbitrary test. `hereditary` and `monotone` (closed under subgraphs)
    /// are trusted by the searches that rely on them.
    pub fn custom(
        name: impl Into<String>,
        test: impl Fn(&Graph) -> bool + Send + Sync + 'static,
        hereditary: bool,
        monotone: bool,
    ) -> Self {
        Self::with_predicate(
            name,
            Predicate::Custom { test: Arc::new(test), hereditary, monotone: monotone && hereditary },
            "custom predicate",
        )
    }

    pub fn all_graphs() -> Self {
        Self::omitting("all", Vec::new(), "all finite graphs")
    }

    pub fn c4_free() -> Self {
        Self::omitting("c4free", vec![named::cycle(4).unwrap()], "graphs with no weak C4")
    }

    pub fn triangle_free() -> Self {
        Self::omitting("c3free", vec![named::cycle(3).unwrap()], "triangle-free graphs")
    }

    /// `K(H)` with `H` the windmill Wd(3,3).
    pub fn windmill_free() -> Self {
        Self::omitting("windmill", vec![named::windmill33().graph], "graphs with no weak Wd(3,3)")
    }

    pub fn bowtie_free() -> Self {
        Self::omitting("bowtie-free", vec![named::bowtie().graph], "graphs with no weak bowtie")
    }

    /// Forbids every cycle of length at least `n` (circumference below `n`).
    pub fn cocycles(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cocycles needs n >= 3, got {n}")));
        }
        Ok(Self::with_predicate(
            format!("cocycles:{n}"),
            Predicate::CircumferenceBelow(n),
            format!("graphs omitting every cycle of length >= {n}"),
        ))
    }

    /// Forbids the odd cycles `C3, C5, …, C_{2n+1}`.
    pub fn odd_cycles(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("odd-cycles needs n >= 1".into()));
        }
        Ok(Self::with_predicate(
            format!("odd-cycles:{n}"),
            Predicate::NoShortOddCycle(n),
            format!("graphs omitting C3, C5, ..., C{}", 2 * n + 1),
        ))
    }

    /// Forbids the path with `n` edges.
    pub fn path_free(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("path-free needs a path length >= 1".into()));
        }
        Ok(Self::omitting(
            format!("path-free:{n}"),
            vec![named::path_of_length(n)?],
            format!("graphs omitting the path of length {n}"),
        ))
    }

    pub fn near_path(path_len: usize, attach_at: usize) -> Result<Self> {
        Ok(Self::omitting(
            format!("near-path:{path_len}:{attach_at}"),
            vec![named::near_path(path_len, attach_at)?],
            format!("graphs omitting the near path ({path_len}, {attach_at})"),
        ))
    }

    pub fn top_k4_free() -> Self {
        Self::with_predicate("top-k4-free", Predicate::TopK4Free, "graphs with no subdivision of K4")
    }

    /// An explicit finite family. The homomorphism-closure condition is not checked.
    pub fn hom_closed(family: Vec<Graph>) -> Self {
        let ids: Vec<String> = family.iter().map(io::to_graph6).collect();
        Self::omitting(format!("hom-closed:{}", ids.join(",")), family, "explicit finite family")
    }

    pub fn linear_forests() -> Self {
        Self::with_predicate("linear-forests", Predicate::LinearForest, "disjoint unions of paths")
    }

    /// Parses identifiers such as `c4free`, `cocycles:5`, `near-path:3:1`,
    /// `hom-closed:Bw,Dhc` or `family:path/to/list.g6`.
    pub fn parse(spec: &str) -> Result<Self> {
        let unknown = || Error::UnknownClass(spec.to_string());
        let num = |s: &str| s.parse::<usize>().map_err(|_| unknown());
        let (head, rest) = match spec.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (spec, None),
        };
        match (head, rest) {
            ("all", None) => Ok(Self::all_graphs()),
            ("c4free", None) => Ok(Self::c4_free()),
            ("c3free" | "triangle-free", None) => Ok(Self::triangle_free()),
            ("windmill", None) => Ok(Self::windmill_free()),
            ("bowtie-free", None) => Ok(Self::bowtie_free()),
            ("top-k4-free", None) => Ok(Self::top_k4_free()),
            ("linear-forests", None) => Ok(Self::linear_forests()),
            ("cocycles", Some(n)) => Self::cocycles(num(n)?),
            ("odd-cycles", Some(n)) => Self::odd_cycles(num(n)?),
            ("path-free", Some(n)) => Self::path_free(num(n)?),
            ("near-path", Some(r)) => {
                let (l, i) = r.split_once(':').ok_or_else(unknown)?;
                Self::near_path(num(l)?, num(i)?)
            }
            ("hom-closed", Some(list)) => {
                let family = list.split(',').map(io::from_graph6).collect::<Result<Vec<_>>>()?;
                Ok(Self::hom_closed(family))
            }
            ("family", Some(path)) => {
                let family = io::read_graph6_file(Path::new(path))?;
                let mut k = Self::hom_closed(family);
                k.name = spec.to_string();
                Ok(k)
            }
            _ => Err(unknown()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn forbidden(&self) -> &[Graph] {
        &self.forbidden
    }

    pub fn predicate(&self) -> Option<&Predicate> {
        self.predicate.as_ref()
    }

    /// Defined purely by a finite forbidden family.
    pub fn is_pure_omission(&self) -> bool {
        self.predicate.is_none()
    }

    pub fn is_hereditary(&self) -> bool {
        match &self.predicate {
            Some(Predicate::Custom { hereditary, .. }) => *hereditary,
            _ => true,
        }
    }

    /// Closed under taking (not necessarily induced) subgraphs.
    pub fn is_monotone(&self) -> bool {
        match &self.predicate {
            Some(Predicate::Custom { monotone, .. }) => *monotone,
            _ => true,
        }
    }

    /// Every member omits a weak C4.
    pub fn excludes_c4(&self) -> bool {
        let c4 = named::cycle(4).unwrap();
        self.forbidden.iter().any(|f| has_weak_copy(f, &c4))
            || matches!(self.predicate, Some(Predicate::CircumferenceBelow(n)) if n <= 4)
            || matches!(self.predicate, Some(Predicate::LinearForest))
    }

    pub fn member(&self, g: &Graph) -> bool {
        self.forbidden.iter().zip(&self.fast).all(|(f, &fast)| !contains(f, fast, g))
            && self.predicate.as_ref().is_none_or(|p| satisfies(p, g))
    }
}

fn classify(f: &Graph) -> Fast {
    if are_isomorphic(f, &named::cycle(3).unwrap()) {
        Fast::Triangle
    } else if are_isomorphic(f, &named::cycle(4).unwrap()) {
        Fast::FourCycle
    } else if are_isomorphic(f, &named::bowtie().graph) {
        Fast::Fan(2)
    } else if are_isomorphic(f, &named::windmill33().graph) {
        Fast::Fan(3)
    } else {
        Fast::Generic
    }
}

fn contains(f: &Graph, fast: Fast, g: &Graph) -> bool {
    match fast {
        Fast::Generic => has_weak_copy(f, g),
        Fast::Triangle => g.edges().any(|(u, v)| g.common_neighbours(u, v) != 0),
        Fast::FourCycle => {
            (0..g.order()).any(|u| (u + 1..g.order()).any(|v| g.common_neighbours(u, v).count_ones() >= 2))
        }
        Fast::Fan(k) => {
            (0..g.order()).any(|v| g.degree(v) >= 2 * k && g.matching_number_within(g.neighbours(v), k) >= k)
        }
    }
}

fn satisfies(p: &Predicate, g: &Graph) -> bool {
    match p {
        Predicate::CircumferenceBelow(n) => !has_cycle_at_least(g, *n),
        Predicate::NoShortOddCycle(n) => !has_odd_cycle_at_most(g, 2 * n + 1),
        Predicate::TopK4Free => !has_k4_subdivision(g),
        Predicate::LinearForest => is_linear_forest(g),
        Predicate::Custom { test, .. } => test(g),
    }
}

/// Visits every cycle once per (lowest vertex, direction) as its length; stops when `visit`
/// returns true.
fn any_cycle(g: &Graph, max_len: usize, mut visit: impl FnMut(usize) -> bool) -> bool {
    fn go(g: &Graph, s: usize, v: usize, used: u64, len: usize, max_len: usize, visit: &mut dyn FnMut(usize) -> bool) -> bool {
        let nbrs = g.neighbours(v);
        if len >= 3 && nbrs & bit(s) != 0 && visit(len) {
            return true;
        }
        if len == max_len {
            return false;
        }
        let allowed = !used & !low_mask(s + 1);
        for w in Bits(nbrs & allowed) {
            if go(g, s, w, used | bit(w), len + 1, max_len, visit) {
                return true;
            }
        }
        false
    }
    (0..g.order()).any(|s| go(g, s, s, bit(s), 1, max_len, &mut visit))
}

fn has_cycle_at_least(g: &Graph, n: usize) -> bool {
    // Cheap necessary condition: a cycle of length >= n needs n vertices of degree >= 2.
    if g.degrees().iter().filter(|&&d| d >= 2).count() < n {
        return false;
    }
    any_cycle(g, g.order(), |len| len >= n)
}

fn has_odd_cycle_at_most(g: &Graph, max: usize) -> bool {
    any_cycle(g, max, |len| len % 2 == 1)
}

fn is_linear_forest(g: &Graph) -> bool {
    (0..g.order()).all(|v| g.degree(v) <= 2) && g.edge_count() + g.components().len() == g.order()
}

/// Four branch vertices joined pairwise by six internally disjoint paths.
fn has_k4_subdivision(g: &Graph) -> bool {
    let branch: Vec<usize> = (0..g.order()).filter(|&v| g.degree(v) >= 3).collect();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

    fn route(g: &Graph, ends: &[(usize, usize)], used: u64) -> bool {
        let Some(&(a, b)) = ends.first() else { return true };
        if g.has_edge(a, b) && route(g, &ends[1..], used) {
            return true;
        }
        fn extend(g: &Graph, cur: usize, b: usize, used: u64, rest: &[(usize, usize)]) -> bool {
            for w in Bits(g.neighbours(cur) & !used) {
                if g.has_edge(w, b) && route(g, rest, used | bit(w)) {
                    return true;
                }
                if extend(g, w, b, used | bit(w), rest) {
                    return true;
                }
            }
            false
        }
        extend(g, a, b, used, &ends[1..])
    }

    let k = branch.len();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                for m in l + 1..k {
                    let q = [branch[i], branch[j], branch[l], branch[m]];
                    let ends: Vec<(usize, usize)> = pairs.iter().map(|&(x, y)| (q[x], q[y])).collect();
                    let used = q.iter().fold(0u64, |acc, &v| acc | bit(v));
                    if route(g, &ends, used) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// The shipped classes with default parameters.
pub fn class_catalog() -> Vec<ForbiddenClass> {
    vec![
        ForbiddenClass::all_graphs(),
        ForbiddenClass::c4_free(),
        ForbiddenClass::triangle_free(),
        ForbiddenClass::windmill_free(),
        ForbiddenClass::bowtie_free(),
        ForbiddenClass::cocycles(5).unwrap(),
        ForbiddenClass::odd_cycles(2).unwrap(),
        ForbiddenClass::path_free(3).unwrap(),
        ForbiddenClass::near_path(3, 1).unwrap(),
        ForbiddenClass::top_k4_free(),
        ForbiddenClass::hom_closed(vec![named::complete(3).unwrap()]),
        ForbiddenClass::linear_forests(),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct HereditaryReport {
    pub class: String,
    pub order: usize,
    pub members_checked: usize,
    /// Members with a one-vertex-deleted subgraph outside the class, with the deleted vertex.
    pub violations: Vec<(Graph, usize)>,
}

/// Checks over the class catalog up to order `n` that deleting any vertex keeps membership.
pub fn check_hereditary(k: &ForbiddenClass, n: usize) -> Result<HereditaryReport> {
    if n > 8 {
        return Err(Error::InvalidParameter(format!("hereditary check supports n <= 8, got {n}")));
    }
    let mut report = HereditaryReport { class: k.name.clone(), order: n, members_checked: 0, violations: Vec::new() };
    for m in 1..=n {
        for g in all_graphs_in_class(k, m)?.members() {
            report.members_checked += 1;
            for v in 0..m {
                let rest: Vec<usize> = (0..m).filter(|&u| u != v).collect();
                if !k.member(&g.induced(&rest)) {
                    report.violations.push((g.clone(), v));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct JepReport {
    pub class: String,
    pub order: usize,
    pub pairs_checked: usize,
    /// False if some forbidden graph is disconnected, so disjoint unions are not guaranteed.
    pub disjoint_union_applicable: bool,
    /// Pairs whose disjoint union leaves the class.
    pub disjoint_union_failures: Vec<(Graph, Graph)>,
    /// Pairs with no joint embedding at all (searched only when disjoint unions fail).
    pub failures: Vec<(Graph, Graph)>,
}

impl JepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks joint embedding for all member pairs up to order `n`, first by disjoint union, then
/// by an amalgam search over the empty graph.
pub fn check_jep(k: &ForbiddenClass, n: usize) -> Result<JepReport> {
    if n > 6 {
        return Err(Error::InvalidParameter(format!("JEP check supports n <= 6, got {n}")));
    }
    let catalogs: Vec<std::sync::Arc<IsoCatalog>> = (1..=n).map(|m| all_graphs_in_class(k, m)).collect::<Result<_>>()?;
    let members: Vec<&Graph> = catalogs.iter().flat_map(|c| c.members()).collect();
    let mut report = JepReport {
        class: k.name.clone(),
        order: n,
        pairs_checked: 0,
        disjoint_union_applicable: k.forbidden.iter().all(|f| f.order() == 0 || f.is_connected())
            && !matches!(k.predicate, Some(Predicate::Custom { .. })),
        disjoint_union_failures: Vec::new(),
        failures: Vec::new(),
    };
    let empty = Graph::empty(0);
    for (i, a) in members.iter().enumerate() {
        for b in &members[i..] {
            report.pairs_checked += 1;
            if k.member(&a.disjoint_union(b)?) {
                continue;
            }
            report.disjoint_union_failures.push(((*a).clone(), (*b).clone()));
            let p = crate::amalgamation::AmalgamationProblem::over_prefix(&empty, a, b)?;
            if crate::amalgamation::find_amalgam(&p, k, true)?.is_none() {
                report.failures.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::tests_support::brute_force_weak;
    use crate::enumerate::all_graphs;
    use crate::graph::named::*;

    #[test]
    fn membership_examples() {
        assert!(ForbiddenClass::c4_free().member(&cycle(5).unwrap()));
        assert!(ForbiddenClass::bowtie_free().member(&complete(4).unwrap()));
        assert!(ForbiddenClass::windmill_free().member(&bowtie().graph));
        assert!(!ForbiddenClass::cocycles(5).unwrap().member(&cycle(6).unwrap()));
        assert!(!ForbiddenClass::linear_forests().member(&cycle(3).unwrap()));
        assert!(!ForbiddenClass::top_k4_free().member(&complete(4).unwrap()));
        assert!(ForbiddenClass::top_k4_free().member(&cycle(6).unwrap()));
    }

    #[test]
    fn parse_identifiers() {
        for id in ["all", "c4free", "c3free", "windmill", "bowtie-free", "cocycles:5", "odd-cycles:2", "path-free:3", "near-path:3:1", "top-k4-free", "linear-forests", "hom-closed:Bw"] {
            let k = ForbiddenClass::parse(id).unwrap();
            assert_eq!(k.name(), id);
        }
        for bad in ["", "c5free", "cocycles", "cocycles:x", "cocycles:2", "near-path:3", "near-path:3:9", "hom-closed:!!"] {
            assert!(ForbiddenClass::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn family_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.g6");
        std::fs::write(&path, "Bw\n").unwrap();
        let k = ForbiddenClass::parse(&format!("family:{}", path.display())).unwrap();
        assert!(!k.member(&complete(4).unwrap()));
        assert!(k.member(&cycle(4).unwrap()));
    }

    /// Lengths of all cycles, by trying every vertex sequence.
    fn cycle_lengths(g: &Graph) -> Vec<usize> {
        let mut out = Vec::new();
        fn go(g: &Graph, path: &mut Vec<usize>, out: &mut Vec<usize>) {
            let (s, v) = (path[0], *path.last().unwrap());
            if path.len() >= 3 && g.has_edge(v, s) {
                out.push(path.len());
            }
            for w in 0..g.order() {
                if w > s && !path.contains(&w) && g.has_edge(v, w) {
                    path.push(w);
                    go(g, path, out);
                    path.pop();
                }
            }
        }
        for s in 0..g.order() {
            go(g, &mut vec![s], &mut out);
        }
        out
    }

    /// K4-minor-freeness via series-parallel reduction: repeatedly delete vertices of degree
    /// at most 1 and suppress vertices of degree 2 (dropping parallel edges).
    fn series_parallel(g: &Graph) -> bool {
        let mut g = g.clone();
        let mut alive = g.vertex_mask();
        loop {
            let mut changed = false;
            for v in Bits(alive) {
                let nb = g.neighbours(v) & alive;
                match nb.count_ones() {
                    0 | 1 => {
                        alive &= !bit(v);
                        changed = true;
                    }
                    2 => {
                        let mut it = Bits(nb);
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        g.add_edge(a, b);
                        alive &= !bit(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if alive == 0 {
                return true;
            }
            if !changed {
                return false;
            }
        }
    }

    fn oracle(k: &ForbiddenClass, g: &Graph) -> bool {
        let omits = k.forbidden().iter().all(|f| !brute_force_weak(f, g));
        let pred = match k.predicate() {
            None => true,
            Some(Predicate::CircumferenceBelow(n)) => cycle_lengths(g).iter().all(|&l| l < *n),
            Some(Predicate::NoShortOddCycle(n)) => cycle_lengths(g).iter().all(|&l| l % 2 == 0 || l > 2 * n + 1),
            Some(Predicate::TopK4Free) => series_parallel(g),
            Some(Predicate::LinearForest) => cycle_lengths(g).is_empty() && (0..g.order()).all(|v| g.degree(v) <= 2),
            Some(Predicate::Custom { .. }) => unreachable!(),
        };
        omits && pred
    }

    #[test]
    fn agrees_with_definition_level_oracle() {
        let mut classes = class_catalog();
        classes.push(ForbiddenClass::cocycles(3).unwrap());
        classes.push(ForbiddenClass::odd_cycles(1).unwrap());
        for n in 1..=7 {
            let cat = all_graphs(n).unwrap();
            for k in &classes {
                for g in cat.members() {
                    assert_eq!(k.member(g), oracle(k, g), "{} on {g:?}", k.name());
                }
            }
        }
    }

    #[test]
    fn cocycles_match_circumference_up_to_8() {
        for g in all_graphs(8).unwrap().members() {
            let circ = cycle_lengths(g).into_iter().max().unwrap_or(0);
            for n in [3, 5, 7] {
                assert_eq!(ForbiddenClass::cocycles(n).unwrap().member(g), circ < n);
            }
        }
    }

    #[test]
    fn closed_under_edge_deletion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let cat = all_graphs(7).unwrap();
        for k in class_catalog() {
            for _ in 0..300 {
                let g = &cat.members()[rng.gen_range(0..cat.len())];
                if !k.member(g) || g.edge_count() == 0 {
                    continue;
                }
                let edges: Vec<_> = g.edges().collect();
                let (u, v) = edges[rng.gen_range(0..edges.len())];
                let mut h = g.clone();
                h.remove_edge(u, v);
                assert!(k.member(&h), "{} lost membership deleting {u}-{v} from {g:?}", k.name());
            }
        }
    }

    #[test]
    fn hereditary_checks() {
        assert!(check_hereditary(&ForbiddenClass::c4_free(), 6).unwrap().violations.is_empty());
        assert!(check_hereditary(&ForbiddenClass::linear_forests(), 6).unwrap().violations.is_empty());
        let broken = ForbiddenClass::custom("not-three", |g| g.order() != 3, false, false);
        assert!(!check_hereditary(&broken, 4).unwrap().violations.is_empty());
    }

    #[test]
    fn jep_checks() {
        let r = check_jep(&ForbiddenClass::windmill_free(), 5).unwrap();
        assert!(r.disjoint_union_applicable && r.disjoint_union_failures.is_empty() && r.passed());
        assert!(check_jep(&ForbiddenClass::c4_free(), 5).unwrap().passed());
        // Two disjoint edges: a disconnected forbidden graph.
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let r = check_jep(&ForbiddenClass::hom_closed(vec![two_k2]), 4).unwrap();
        assert!(!r.disjoint_union_applicable);
        assert!(!r.disjoint_union_failures.is_empty());
    }

    #[test]
    fn every_shipped_class_has_jep_at_small_orders() {
        for k in class_catalog() {
            assert!(check_jep(&k, 4).unwrap().passed(), "{}", k.name());
        }
    }
}
