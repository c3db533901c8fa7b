//! Finite approximations of generic limits: extension chains, the extension-property report
//! and truncated universal linear forests.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgamation::{find_amalgam, AmalgamationProblem};
use crate::bits::{bit, Bits};
use crate::classes::ForbiddenClass;
use crate::constructions::wap_witness;
use crate::error::{Error, Result};
use crate::graph::{named, Graph, MAX_ORDER};
use crate::io;

pub const LEDGER_FILE: &str = "ledger.json";

/// How each step prepares the current stage before realizing a demand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guide {
    /// Realize demands directly.
    #[default]
    Direct,
    /// First pass to the windmill WAP witness of the stage.
    WindmillWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Class identifier accepted by [`ForbiddenClass::parse`].
    pub class: String,
    /// Largest `|A|` for which demands are enqueued.
    pub max_base_order: usize,
    pub seed: u64,
    pub guide: Guide,
    /// Give each new vertex seeded random edges to the stage outside the image of `A`,
    /// keeping only those that stay in the class.
    pub cross_edges: bool,
}

impl ChainConfig {
    pub fn new(class: &str, seed: u64) -> Self {
        ChainConfig { class: class.to_string(), max_base_order: 2, seed, guide: Guide::Direct, cross_edges: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DemandStatus {
    Pending,
    /// `vertex` of stage `stage` extends the embedding of `A` to one of `B`.
    Realized { stage: usize, vertex: usize },
    Blocked { reason: String },
}

/// An induced copy of `A` in a stage, given by its vertices in label order, and a one-vertex
/// extension `B` of `A` whose new vertex is adjacent to the positions in `nbrs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub id: usize,
    pub base: Vec<usize>,
    pub nbrs: u64,
    pub enqueued_at: usize,
    pub status: DemandStatus,
}

impl Demand {
    fn image_nbrs(&self) -> u64 {
        Bits(self.nbrs).fold(0, |m, i| m | bit(self.base[i]))
    }

    fn base_mask(&self) -> u64 {
        self.base.iter().fold(0, |m, &v| m | bit(v))
    }

    /// A vertex of `g` outside the base adjacent, within the base, exactly to the image of
    /// `nbrs`.
    pub fn realizer(&self, g: &Graph) -> Option<usize> {
        let base = self.base_mask();
        let want = self.image_nbrs();
        Bits(g.vertex_mask() & !base).find(|&y| g.neighbours(y) & base == want)
    }

    /// `A` plus the demanded vertex, on labels `0..=|A|`.
    pub fn extension(&self, g: &Graph) -> Result<Graph> {
        let mut b = g.induced(&self.base);
        b.add_vertex(self.nbrs)?;
        Ok(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum StepOutcome {
    Realized { demand: usize, stage: usize },
    Blocked { demand: usize, reason: String },
    Idle,
}

/// Increasing stages of a class, each induced in the next on its own labels, with a ledger of
/// extension demands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionChain {
    pub config: ChainConfig,
    #[serde(skip)]
    pub stages: Vec<Graph>,
    pub demands: Vec<Demand>,
    /// Pending demand ids, one FIFO queue per `|A|`.
    pub queues: Vec<VecDeque<usize>>,
    pub steps: usize,
}

impl ExtensionChain {
    /// A chain whose first stage is `initial`; demands over it are enqueued at step 0.
    pub fn new(config: ChainConfig, initial: Graph) -> Result<Self> {
        let k = ForbiddenClass::parse(&config.class)?;
        if !k.member(&initial) {
            return Err(Error::Precondition(format!("the initial stage is not in `{}`", k.name())));
        }
        let queues = vec![VecDeque::new(); config.max_base_order + 1];
        let mut chain = ExtensionChain { config, stages: Vec::new(), demands: Vec::new(), queues, steps: 0 };
        chain.push_stage(&k, initial, 0);
        Ok(chain)
    }

    pub fn class(&self) -> Result<ForbiddenClass> {
        ForbiddenClass::parse(&self.config.class)
    }

    pub fn last(&self) -> &Graph {
        self.stages.last().expect("a chain has at least one stage")
    }

    pub fn pending(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(self.steps as u64);
        rng
    }

    /// Appends `g`, marks demands it realizes, and enqueues demands over sets meeting the
    /// vertices from `first_new` on.
    fn push_stage(&mut self, k: &ForbiddenClass, g: Graph, first_new: usize) {
        let stage = self.stages.len();
        for d in &mut self.demands {
            if d.status == DemandStatus::Pending {
                if let Some(vertex) = d.realizer(&g) {
                    d.status = DemandStatus::Realized { stage, vertex };
                }
            }
        }
        for q in &mut self.queues {
            let demands = &self.demands;
            q.retain(|&id| demands[id].status == DemandStatus::Pending);
        }

        let mut fresh = Vec::new();
        let n = g.order();
        let cap = self.config.max_base_order.min(n);
        let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
        let mut all = Vec::new();
        for _ in 0..cap {
            let mut next = Vec::new();
            for s in &sets {
                let from = s.last().map_or(0, |&v| v + 1);
                for v in from..n {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
            all.extend(sets);
            sets = next;
        }
        all.extend(sets);
        for s in all {
            let meets_new = s.iter().any(|&v| v >= first_new) || (first_new == 0 && stage == 0);
            if !meets_new {
                continue;
            }
            for nbrs in 0..1u64 << s.len() {
                let mut d = Demand { id: 0, base: s.clone(), nbrs, enqueued_at: self.steps, status: DemandStatus::Pending };
                match d.extension(&g) {
                    Ok(b) if k.member(&b) => {}
                    _ => continue,
                }
                if let Some(vertex) = d.realizer(&g) {
                    d.status = DemandStatus::Realized { stage, vertex };
                }
                fresh.push(d);
            }
        }
        fresh.shuffle(&mut self.rng());
        for mut d in fresh {
            d.id = self.demands.len();
            if d.status == DemandStatus::Pending {
                self.queues[d.base.len()].push_back(d.id);
            }
            self.demands.push(d);
        }
        self.stages.push(g);
    }

    /// The queue to serve next: the oldest front demand, with age weighted so that smaller
    /// `|A|` ages faster. Ties go to the smaller size.
    fn next_queue(&self) -> Option<usize> {
        let cap = self.config.max_base_order;
        let mut best: Option<(usize, usize)> = None;
        for (s, q) in self.queues.iter().enumerate() {
            let Some(&id) = q.front() else { continue };
            let score = (self.steps + 1 - self.demands[id].enqueued_at) * (cap + 2 - s);
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, s));
            }
        }
        best.map(|(_, s)| s)
    }

    /// Realizes the next pending demand by amalgamating the last stage with `B` over `A`.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let k = self.class()?;
        let outcome = self.step_in(&k);
        self.steps += 1;
        outcome
    }

    fn step_in(&mut self, k: &ForbiddenClass) -> Result<StepOutcome> {
        if self.config.guide == Guide::WindmillWitness {
            let g = self.last().clone();
            match wap_witness(&g) {
                Ok(w) if w.order() > g.order() && w.has_prefix(&g) => self.push_stage(k, w, g.order()),
                Ok(_) => {}
                Err(Error::OrderBound { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let Some(s) = self.next_queue() else { return Ok(StepOutcome::Idle) };
        let id = self.queues[s].pop_front().expect("non-empty queue");
        let g = self.last().clone();
        let d = self.demands[id].clone();
        let b = d.extension(&g)?;
        let a = g.induced(&d.base);
        let p = AmalgamationProblem::new(a.clone(), g.clone(), d.base.clone(), b, (0..a.order()).collect())?;
        let amalgam = match find_amalgam(&p, k, !k.is_pure_omission()) {
            Ok(Some(am)) => am,
            Ok(None) => return Ok(self.block(id, "no amalgam in the class".into())),
            Err(Error::OrderBound { order, bound }) => {
                return Ok(self.block(id, format!("stage order {order} exceeds {bound}")));
            }
            Err(e) => return Err(e),
        };
        let mut next = stage_first(&amalgam.result, &amalgam.left_map)?;
        let x = amalgam.right_map[a.order()];
        let x = relabel_of(&amalgam.left_map, amalgam.result.order()).iter().position(|&v| v == x).unwrap_or(x);
        if self.config.cross_edges && x >= g.order() {
            let mut rng = self.rng();
            let mut others: Vec<usize> = Bits(g.vertex_mask() & !d.base_mask()).collect();
            others.shuffle(&mut rng);
            for y in others {
                if rng.gen_bool(0.5) {
                    next.add_edge(x, y);
                    if !k.member(&next) {
                        next.remove_edge(x, y);
                    }
                }
            }
        }
        if !k.member(&next) || !next.has_prefix(&g) {
            return Err(Error::Internal("chain stage left the class".into()));
        }
        let first_new = g.order();
        self.push_stage(k, next, first_new);
        let stage = self.stages.len() - 1;
        match self.demands[id].status {
            DemandStatus::Realized { .. } => Ok(StepOutcome::Realized { demand: id, stage }),
            _ => Err(Error::Internal("amalgam did not realize its demand".into())),
        }
    }

    fn block(&mut self, id: usize, reason: String) -> StepOutcome {
        self.demands[id].status = DemandStatus::Blocked { reason: reason.clone() };
        StepOutcome::Blocked { demand: id, reason }
    }

    pub fn run(&mut self, steps: usize) -> Result<Vec<StepOutcome>> {
        (0..steps).map(|_| self.step()).collect()
    }

    /// Demands enqueued strictly before step `step` with `|A| <= max_base`, and how many of
    /// them are realized.
    pub fn realized_before(&self, step: usize, max_base: usize) -> (usize, usize) {
        let early = self.demands.iter().filter(|d| d.enqueued_at < step && d.base.len() <= max_base);
        early.fold((0, 0), |(n, r), d| (n + 1, r + matches!(d.status, DemandStatus::Realized { .. }) as usize))
    }

    /// Checks monotonicity, class membership and every recorded realization.
    pub fn verify(&self) -> Result<bool> {
        let k = self.class()?;
        let stages_ok = self.stages.iter().all(|g| k.member(g))
            && self.stages.windows(2).all(|w| w[1].has_prefix(&w[0]));
        let demands_ok = self.demands.iter().all(|d| match d.status {
            DemandStatus::Realized { stage, vertex } => self.stages.get(stage).is_some_and(|g| {
                let base = d.base_mask();
                d.base.iter().all(|&v| v < g.order())
                    && vertex < g.order()
                    && base & bit(vertex) == 0
                    && g.neighbours(vertex) & base == d.image_nbrs()
            }),
            _ => true,
        });
        Ok(stages_ok && demands_ok)
    }

    /// Writes `stage_NNNN.g6` files and the JSON ledger into `dir`.
    pub fn checkpoint(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (i, g) in self.stages.iter().enumerate() {
            fs::write(dir.join(stage_file(i)), format!("{}\n", io::to_graph6(g)))?;
        }
        let stale = self.stages.len();
        if dir.join(stage_file(stale)).exists() {
            let mut i = stale;
            while dir.join(stage_file(i)).exists() {
                fs::remove_file(dir.join(stage_file(i)))?;
                i += 1;
            }
        }
        let mut json = serde_json::to_string_pretty(&Checkpoint { stages: self.stages.len(), chain: self })?;
        json.push('\n');
        fs::write(dir.join(LEDGER_FILE), json)?;
        Ok(())
    }

    pub fn resume(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(LEDGER_FILE))?;
        let cp: CheckpointOwned = serde_json::from_str(&text)?;
        let mut chain = cp.chain;
        chain.stages = (0..cp.stages)
            .map(|i| io::from_graph6(fs::read_to_string(dir.join(stage_file(i)))?.trim()))
            .collect::<Result<_>>()?;
        if chain.stages.is_empty() || chain.queues.len() != chain.config.max_base_order + 1 {
            return Err(Error::InvalidParameter("malformed chain checkpoint".into()));
        }
        if !chain.verify()? {
            return Err(Error::InvalidParameter("checkpoint fails verification".into()));
        }
        Ok(chain)
    }
}

#[derive(Serialize)]
struct Checkpoint<'a> {
    stages: usize,
    chain: &'a ExtensionChain,
}

#[derive(Deserialize)]
struct CheckpointOwned {
    stages: usize,
    chain: ExtensionChain,
}

fn stage_file(i: usize) -> String {
    format!("stage_{i:04}.g6")
}

/// Permutation placing `left_map` on labels `0..|left_map|`, then the rest ascending.
fn relabel_of(left_map: &[usize], n: usize) -> Vec<usize> {
    let used = left_map.iter().fold(0u64, |m, &v| m | bit(v));
    left_map.iter().copied().chain((0..n).filter(|&v| used & bit(v) == 0)).collect()
}

/// `d` relabelled so that the stage sits on its own labels.
fn stage_first(d: &Graph, left_map: &[usize]) -> Result<Graph> {
    let order = relabel_of(left_map, d.order());
    if order.iter().enumerate().all(|(i, &v)| i == v) {
        return Ok(d.clone());
    }
    Ok(d.induced(&order))
}

/// Runs `chain_step` on a copy.
pub fn chain_step(chain: &ExtensionChain) -> Result<(ExtensionChain, StepOutcome)> {
    let mut next = chain.clone();
    let outcome = next.step()?;
    Ok((next, outcome))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub k_pairs: usize,
    pub total: usize,
    pub satisfied: usize,
    /// Unsatisfied `(U, V)` pairs, up to a fixed number, in enumeration order.
    pub failures: Vec<(Vec<usize>, Vec<usize>)>,
}

impl ExtensionReport {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.satisfied as f64 / self.total as f64
        }
    }
}

const REPORTED_FAILURES: usize = 32;

/// For all disjoint non-empty `U ∪ V` inside `within` with `|U| + |V| <= k_pairs`, whether
/// some vertex outside `U ∪ V` is adjacent to all of `U` and none of `V`.
pub fn extension_property_report_within(g: &Graph, k_pairs: usize, within: u64) -> ExtensionReport {
    let verts: Vec<usize> = Bits(within & g.vertex_mask()).collect();
    let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
    let mut all = Vec::new();
    for _ in 0..k_pairs.min(verts.len()) {
        let mut next = Vec::new();
        for s in &sets {
            let from = s.last().map_or(0, |&i| i + 1);
            for i in from..verts.len() {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        sets = next;
        all.extend(sets.iter().cloned());
    }
    type Tally = (usize, usize, Vec<(Vec<usize>, Vec<usize>)>);
    let results: Vec<Tally> = all
        .par_iter()
        .map(|s| {
            let vs: Vec<usize> = s.iter().map(|&i| verts[i]).collect();
            let w = vs.iter().fold(0u64, |m, &v| m | bit(v));
            let (mut total, mut ok, mut bad) = (0, 0, Vec::new());
            for u_sel in 0..1u64 << vs.len() {
                let u = Bits(u_sel).fold(0u64, |m, i| m | bit(vs[i]));
                total += 1;
                if Bits(g.vertex_mask() & !w).any(|y| g.neighbours(y) & w == u) {
                    ok += 1;
                } else {
                    let (us, others): (Vec<usize>, Vec<usize>) = vs.iter().partition(|&&v| u & bit(v) != 0);
                    bad.push((us, others));
                }
            }
            (total, ok, bad)
        })
        .collect();
    let mut report = ExtensionReport { k_pairs, total: 0, satisfied: 0, failures: Vec::new() };
    for (t, s, bad) in results {
        report.total += t;
        report.satisfied += s;
        for f in bad {
            if report.failures.len() < REPORTED_FAILURES {
                report.failures.push(f);
            }
        }
    }
    report
}

pub fn extension_property_report(g: &Graph, k_pairs: usize) -> ExtensionReport {
    extension_property_report_within(g, k_pairs, g.vertex_mask())
}

/// `n_lines` disjoint paths on `2 * radius + 1` vertices each.
pub fn universal_linear_forest(n_lines: usize, radius: usize) -> Result<Graph> {
    if n_lines == 0 || radius == 0 {
        return Err(Error::InvalidParameter("n_lines and radius must be positive".into()));
    }
    let order = n_lines * (2 * radius + 1);
    if order > MAX_ORDER {
        return Err(Error::OrderBound { order, bound: MAX_ORDER });
    }
    let line = named::linear(2 * radius + 1)?;
    let mut g = Graph::empty(0);
    for _ in 0..n_lines {
        g = g.disjoint_union(&line)?;
    }
    Ok(g)
}
