//! Bounded AP, CAP and WAP checks, WAP refutation and refutation trees.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{bit, Bits};
use crate::classes::ForbiddenClass;
use crate::enumerate::{all_graphs_in_class, Extensions, Symmetry, CATALOG_MAX_ORDER};
use crate::error::{Error, Result};
use crate::graph::Graph;

use super::obstruction::free_amalgam_obstructions;
use super::search::{find_amalgam_with, SearchOptions, Strategy};
use super::{align_base, AmalgamationProblem};

/// A base with two extensions, both containing the base on its own labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub base: Graph,
    pub left: Graph,
    pub right: Graph,
}

impl Triple {
    fn problem(&self) -> Result<AmalgamationProblem> {
        AmalgamationProblem::over_prefix(&self.base, &self.left, &self.right)
    }

    /// Whether the exhaustive search finds an amalgam in `k`.
    pub fn amalgamates(&self, k: &ForbiddenClass) -> Result<bool> {
        amalgamates(&self.problem()?, k)
    }
}

fn options_for(k: &ForbiddenClass) -> SearchOptions {
    SearchOptions { allow_cross_edges: !k.is_pure_omission(), ..SearchOptions::default() }
}

fn amalgamates(p: &AmalgamationProblem, k: &ForbiddenClass) -> Result<bool> {
    Ok(find_amalgam_with(p, k, &options_for(k))?.0.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApReport {
    pub class: String,
    pub max_order: usize,
    pub triples_checked: u64,
    pub failures: Vec<Triple>,
}

impl ApReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every triple with `|A| < n`, `B` up to automorphisms of `A`, `C` labelled over `A`, and
/// `|B|, |C| <= n`; records each triple with no amalgam in `k`.
pub fn check_ap(k: &ForbiddenClass, n: usize) -> Result<ApReport> {
    if n > 6 {
        return Err(Error::InvalidParameter(format!("check_ap supports n <= 6, got {n}")));
    }
    let mut report = ApReport { class: k.name().to_string(), max_order: n, triples_checked: 0, failures: Vec::new() };
    for m in 0..n.min(CATALOG_MAX_ORDER + 1) {
        let cat = all_graphs_in_class(k, m)?;
        for a in cat.members() {
            let extra = n - m;
            let bs = Extensions::new(a, k, extra)?.collect_all()?;
            let cs = Extensions::new(a, k, extra)?.symmetry(Symmetry::Labeled).collect_all()?;
            let results: Vec<Result<(u64, Vec<Triple>)>> = bs
                .par_iter()
                .filter(|b| b.order() > m)
                .map(|b| {
                    let mut checked = 0;
                    let mut failed = Vec::new();
                    for c in cs.iter().filter(|c| c.order() > m) {
                        checked += 1;
                        let t = Triple { base: a.clone(), left: b.clone(), right: c.clone() };
                        if !t.amalgamates(k)? {
                            failed.push(t);
                        }
                    }
                    Ok((checked, failed))
                })
                .collect();
            for r in results {
                let (checked, failed) = r?;
                report.triples_checked += checked;
                report.failures.extend(failed);
            }
        }
    }
    Ok(report)
}

/// Caps on the literal enumeration fallback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Candidate graphs examined while enumerating each side's extensions.
    pub extension_limit: usize,
    /// Extension pairs passed to the amalgam search.
    pub pair_limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { extension_limit: 4_000_000, pair_limit: 2_000_000 }
    }
}

/// Whether amalgams must commute over the base (WAP) or over the whole witness (CAP).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Over {
    Base,
    Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WapOutcome {
    WitnessVerified,
    Refuted,
}

/// How the outcome was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// No pair of extensions has a free amalgam outside the class, so the free amalgam always
    /// works (finite forbidden families only).
    ObstructionSearch,
    /// A minimal pair whose free amalgam leaves the class also has no other amalgam.
    ReducedPair,
    /// Every pair of enumerated extensions was passed to the amalgam search.
    Enumeration,
}

/// Outcome of a bounded WAP or CAP check of one witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WapCertificate {
    pub kind: WapOutcome,
    pub over: Over,
    pub class: String,
    pub base: Graph,
    pub witness: Graph,
    /// Two extensions of the witness with no amalgam over the base (or the witness).
    pub counterexample: Option<(Graph, Graph)>,
    /// Largest number of vertices added to the witness by either side.
    pub extra: usize,
    pub method: Method,
    pub pairs_checked: u64,
}

impl WapCertificate {
    pub fn verified(&self) -> bool {
        self.kind == WapOutcome::WitnessVerified
    }

    fn amalgamation_base(&self) -> &Graph {
        match self.over {
            Over::Base => &self.base,
            Over::Witness => &self.witness,
        }
    }

    /// Re-checks the certificate from scratch: a counterexample must consist of members
    /// extending the witness with no amalgam; a verified outcome must be reproduced.
    pub fn replay(&self, k: &ForbiddenClass, budget: Budget) -> Result<bool> {
        if !self.witness.has_prefix(&self.base) || !k.member(&self.witness) {
            return Ok(false);
        }
        match (&self.kind, &self.counterexample) {
            (WapOutcome::Refuted, Some((b, c))) => {
                let fits = |g: &Graph| {
                    g.has_prefix(&self.witness) && g.order() <= self.witness.order() + self.extra && k.member(g)
                };
                if !fits(b) || !fits(c) {
                    return Ok(false);
                }
                let p = AmalgamationProblem::over_prefix(self.amalgamation_base(), b, c)?;
                Ok(!amalgamates(&p, k)?)
            }
            (WapOutcome::WitnessVerified, None) => {
                let again = check_witness(k, &self.base, &self.witness, self.extra, self.over, budget)?;
                Ok(again.verified())
            }
            _ => Ok(false),
        }
    }
}

/// Bounded WAP check: every pair of extensions of `witness` by at most `extra` vertices must
/// amalgamate over `base`. The witness is relabelled so that `base` is its prefix.
pub fn verify_wap_witness(k: &ForbiddenClass, base: &Graph, witness: &Graph, extra: usize, budget: Budget) -> Result<WapCertificate> {
    check_witness(k, base, witness, extra, Over::Base, budget)
}

/// Bounded CAP check: as [`verify_wap_witness`], with amalgams commuting over the witness.
pub fn check_cap_witness(k: &ForbiddenClass, base: &Graph, witness: &Graph, extra: usize, budget: Budget) -> Result<WapCertificate> {
    check_witness(k, base, witness, extra, Over::Witness, budget)
}

fn check_witness(k: &ForbiddenClass, base: &Graph, witness: &Graph, extra: usize, over: Over, budget: Budget) -> Result<WapCertificate> {
    let witness = align_base(base, witness)?;
    if !k.member(&witness) {
        return Err(Error::Precondition("the witness is not a member of the class".into()));
    }
    let a = match over {
        Over::Base => base.order(),
        Over::Witness => witness.order(),
    };
    let amal_base = witness.induced(&(0..a).collect::<Vec<_>>());
    let cert = |kind, counterexample, method, pairs_checked| WapCertificate {
        kind,
        over,
        class: k.name().to_string(),
        base: base.clone(),
        witness: witness.clone(),
        counterexample,
        extra,
        method,
        pairs_checked,
    };

    let mut checked = 0u64;
    if k.is_pure_omission() {
        let obstructions = free_amalgam_obstructions(k, a, &witness, extra, false)?;
        if obstructions.is_empty() {
            return Ok(cert(WapOutcome::WitnessVerified, None, Method::ObstructionSearch, 0));
        }
        for o in obstructions {
            checked += 1;
            let p = AmalgamationProblem::over_prefix(&amal_base, &o.left, &o.right)?;
            if !amalgamates(&p, k)? {
                return Ok(cert(WapOutcome::Refuted, Some((o.left, o.right)), Method::ReducedPair, checked));
            }
        }
    }

    let left_sym = match over {
        Over::Base => Symmetry::Relative(a),
        Over::Witness => Symmetry::Full,
    };
    let bs = Extensions::new(&witness, k, extra)?.symmetry(left_sym).limit(budget.extension_limit).collect_all()?;
    let cs = Extensions::new(&witness, k, extra)?.symmetry(Symmetry::Labeled).limit(budget.extension_limit).collect_all()?;
    let pairs = (bs.len() as u64).saturating_mul(cs.len() as u64);
    if pairs > budget.pair_limit {
        return Err(Error::BoundExceeded(format!(
            "{} x {} extension pairs exceed the pair limit {}",
            bs.len(),
            cs.len(),
            budget.pair_limit
        )));
    }
    let n = witness.order();
    let failure = bs
        .par_iter()
        .filter(|b| b.order() > n)
        .map(|b| -> Result<Option<(Graph, Graph)>> {
            for c in cs.iter().filter(|c| c.order() > n) {
                let p = AmalgamationProblem::over_prefix(&amal_base, b, c)?;
                if !amalgamates(&p, k)? {
                    return Ok(Some((b.clone(), c.clone())));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    checked += pairs;
    match failure {
        None => Ok(cert(WapOutcome::WitnessVerified, None, Method::Enumeration, checked)),
        Some(Err(e)) => Err(e),
        Some(Ok(pair)) => Ok(cert(WapOutcome::Refuted, pair, Method::Enumeration, checked)),
    }
}

/// The first extension of `base` by at most `witness_extra` vertices (in enumeration order)
/// that passes the bounded CAP check with `ext_extra`.
pub fn find_cap_witness(
    k: &ForbiddenClass,
    base: &Graph,
    witness_extra: usize,
    ext_extra: usize,
    budget: Budget,
) -> Result<Option<WapCertificate>> {
    for w in Extensions::new(base, k, witness_extra)?.iter() {
        let c = check_cap_witness(k, base, &w?, ext_extra, budget)?;
        if c.verified() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Supplies, for a witness extending `base`, two extensions of the witness with no amalgam
/// over `base`.
pub trait Refuter: Sync {
    fn refute(&self, k: &ForbiddenClass, base: &Graph, witness: &Graph) -> Result<Option<(Graph, Graph)>>;
}

/// Refutes by the bounded WAP check with `ext_extra` added vertices.
#[derive(Clone, Copy, Debug)]
pub struct BoundedRefuter {
    pub ext_extra: usize,
    pub budget: Budget,
}

impl Refuter for BoundedRefuter {
    fn refute(&self, k: &ForbiddenClass, base: &Graph, witness: &Graph) -> Result<Option<(Graph, Graph)>> {
        Ok(verify_wap_witness(k, base, witness, self.ext_extra, self.budget)?.counterexample)
    }
}

/// Refutes with pairs localised at one base vertex `a`. The left side adds one vertex
/// adjacent to `a` and to one neighbour of `a`. The right side adds `right_extra` vertices
/// whose neighbours lie in the closed neighbourhood of `a` or among earlier added vertices.
/// The first failing pair in (a, neighbour, right adjacency) order is returned.
#[derive(Clone, Copy, Debug)]
pub struct LocalRefuter {
    pub right_extra: usize,
}

/// Cap on the number of right-hand adjacency patterns tried per left extension.
const LOCAL_PATTERN_BITS: usize = 26;

impl Refuter for LocalRefuter {
    fn refute(&self, k: &ForbiddenClass, base: &Graph, witness: &Graph) -> Result<Option<(Graph, Graph)>> {
        let witness = align_base(base, witness)?;
        let opts = options_for(k);
        for a in 0..base.order() {
            let local: Vec<usize> = Bits(witness.neighbours(a) | bit(a)).collect();
            let r = self.right_extra;
            let bits = local.len() * r + r * r.saturating_sub(1) / 2;
            if bits > LOCAL_PATTERN_BITS {
                return Err(Error::InvalidParameter(format!("{bits} adjacency bits exceed the local search cap")));
            }
            for v in Bits(witness.neighbours(a)) {
                let mut left = witness.clone();
                left.add_vertex(bit(a) | bit(v))?;
                if !k.member(&left) {
                    continue;
                }
                let found = (0..1u64 << bits).into_par_iter().find_map_first(|pattern| {
                    let mut right = witness.clone();
                    let mut rest = pattern;
                    let mut added = Vec::with_capacity(r);
                    for i in 0..r {
                        let mut nbrs = 0u64;
                        for &x in &local {
                            if rest & 1 == 1 {
                                nbrs |= bit(x);
                            }
                            rest >>= 1;
                        }
                        for &y in &added[..i] {
                            if rest & 1 == 1 {
                                nbrs |= bit(y);
                            }
                            rest >>= 1;
                        }
                        match right.add_vertex(nbrs) {
                            Ok(w) => added.push(w),
                            Err(e) => return Some(Err(e)),
                        }
                    }
                    if !k.member(&right) {
                        return None;
                    }
                    let run = || -> Result<bool> {
                        let p = AmalgamationProblem::over_prefix(base, &left, &right)?;
                        Ok(find_amalgam_with(&p, k, &opts)?.0.is_none())
                    };
                    match run() {
                        Ok(true) => Some(Ok(right)),
                        Ok(false) => None,
                        Err(e) => Some(Err(e)),
                    }
                });
                if let Some(right) = found.transpose()? {
                    return Ok(Some((left, right)));
                }
            }
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub witness: Graph,
    pub left: Graph,
    pub right: Graph,
}

/// Runs `refuter` on every extension of `base` by at most `witness_extra` vertices. Returns
/// all refutations, or `None` when some witness survives.
pub fn refute_wap_at(
    k: &ForbiddenClass,
    base: &Graph,
    witness_extra: usize,
    refuter: &dyn Refuter,
) -> Result<Option<Vec<Refutation>>> {
    let witnesses = Extensions::new(base, k, witness_extra)?.collect_all()?;
    let found: Vec<Result<Option<Refutation>>> = witnesses
        .par_iter()
        .map(|w| {
            Ok(refuter
                .refute(k, base, w)?
                .map(|(left, right)| Refutation { witness: w.clone(), left, right }))
        })
        .collect();
    let mut out = Vec::with_capacity(found.len());
    for r in found {
        match r? {
            Some(r) => out.push(r),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// A complete binary tree of extensions of `base`, keyed by 0/1 strings, whose sibling pairs
/// admit no amalgam over `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationTree {
    pub class: String,
    pub base: Graph,
    pub depth: usize,
    pub nodes: BTreeMap<String, Graph>,
}

impl RefutationTree {
    pub fn leaves(&self) -> usize {
        self.nodes.keys().filter(|s| s.len() == self.depth).count()
    }

    /// Re-checks the shape, the nesting of nodes, membership, and the non-amalgamability of
    /// every sibling pair with the given search strategy.
    pub fn replay(&self, k: &ForbiddenClass, strategy: Strategy) -> Result<bool> {
        if self.nodes.len() != (1usize << (self.depth + 1)) - 1 || self.nodes.get("") != Some(&self.base) {
            return Ok(false);
        }
        for (key, g) in &self.nodes {
            if key.len() > self.depth || key.chars().any(|c| c != '0' && c != '1') || !k.member(g) {
                return Ok(false);
            }
            if let Some(parent) = key.get(..key.len().wrapping_sub(1)).filter(|_| !key.is_empty()) {
                if !self.nodes.get(parent).is_some_and(|p| g.has_prefix(p)) {
                    return Ok(false);
                }
            }
        }
        let opts = SearchOptions { strategy, ..options_for(k) };
        for (key, _) in self.nodes.iter().filter(|(s, _)| s.len() < self.depth) {
            let p = AmalgamationProblem::over_prefix(&self.base, &self.nodes[&format!("{key}0")], &self.nodes[&format!("{key}1")])?;
            if find_amalgam_with(&p, k, &opts)?.0.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds the tree level by level: each node `s` gets the refuter's pair as children `s0`, `s1`.
pub fn build_refutation_tree(k: &ForbiddenClass, base: &Graph, refuter: &dyn Refuter, depth: usize) -> Result<RefutationTree> {
    if depth > 6 {
        return Err(Error::InvalidParameter(format!("refutation tree depth must be at most 6, got {depth}")));
    }
    if !k.member(base) {
        return Err(Error::Precondition("the base is not a member of the class".into()));
    }
    let mut nodes = BTreeMap::new();
    nodes.insert(String::new(), base.clone());
    let mut level = vec![String::new()];
    for _ in 0..depth {
        let children: Vec<Result<[(String, Graph); 2]>> = level
            .par_iter()
            .map(|key| {
                let node = &nodes[key];
                let (b, c) = refuter
                    .refute(k, base, node)?
                    .ok_or_else(|| Error::Precondition(format!("the refuter found no pair for node `{key}`")))?;
                if !b.has_prefix(node) || !c.has_prefix(node) {
                    return Err(Error::Internal(format!("refuter output does not extend node `{key}`")));
                }
                let p = AmalgamationProblem::over_prefix(base, &b, &c)?;
                if amalgamates(&p, k)? {
                    return Err(Error::Internal(format!("refuter pair for node `{key}` amalgamates")));
                }
                Ok([(format!("{key}0"), b), (format!("{key}1"), c)])
            })
            .collect();
        let mut next = Vec::new();
        for r in children {
            for (key, g) in r? {
                next.push(key.clone());
                nodes.insert(key, g);
            }
        }
        level = next;
    }
    Ok(RefutationTree { class: k.name().to_string(), base: base.clone(), depth, nodes })
}
