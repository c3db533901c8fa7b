//! Checker for C4-free graphs of diameter 2 without a dominating vertex: such a graph has an
//! edge in no triangle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::ForbiddenClass;
use crate::enumerate::all_graphs;
use crate::error::Result;
use crate::graph::{Diameter, Graph, SrgParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diam2Branch {
    StronglyRegular(SrgParams),
    /// Exactly two distinct degrees.
    TwoValency(usize, usize),
    /// Neither of the above; impossible under the hypotheses.
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diam2Verdict {
    pub hypotheses_met: bool,
    pub triangle_free_edges: Vec<(usize, usize)>,
    pub branch: Option<Diam2Branch>,
}

impl Diam2Verdict {
    /// The conclusion holds: hypotheses fail, or some edge lies in no triangle.
    pub fn holds(&self) -> bool {
        !self.hypotheses_met || !self.triangle_free_edges.is_empty()
    }

    /// The graph falls in one of the two expected branches: strongly regular with `μ = 1`
    /// and `λ = 0`, or two valencies.
    pub fn classified(&self) -> bool {
        match self.branch {
            None => !self.hypotheses_met,
            Some(Diam2Branch::StronglyRegular(p)) => p.mu == 1 && p.lambda == 0,
            Some(Diam2Branch::TwoValency(..)) => true,
            Some(Diam2Branch::Unclassified) => false,
        }
    }
}

pub fn check_diam2_proposition(g: &Graph) -> Diam2Verdict {
    let met = g.order() > 0
        && g.diameter() == Diameter::Finite(2)
        && g.dominating_vertex().is_none()
        && ForbiddenClass::c4_free().member(g);
    if !met {
        return Diam2Verdict { hypotheses_met: false, triangle_free_edges: Vec::new(), branch: None };
    }
    let branch = match g.strongly_regular_params() {
        Ok(Some(p)) => Diam2Branch::StronglyRegular(p),
        _ => {
            let mut degrees = g.degrees();
            degrees.sort_unstable();
            degrees.dedup();
            if degrees.len() == 2 {
                Diam2Branch::TwoValency(degrees[0], degrees[1])
            } else {
                Diam2Branch::Unclassified
            }
        }
    };
    Diam2Verdict { hypotheses_met: true, triangle_free_edges: g.edges_not_in_triangle(), branch: Some(branch) }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diam2OrderStats {
    pub order: usize,
    pub graphs: usize,
    pub hypotheses_met: usize,
    pub strongly_regular: usize,
    pub two_valency: usize,
}

/// Runs the checker over every isomorphism class of order `1..=max_order`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diam2SweepReport {
    pub max_order: usize,
    pub per_order: Vec<Diam2OrderStats>,
    /// Hypotheses met but every edge in a triangle.
    pub counterexamples: Vec<Graph>,
    /// Hypotheses met but in neither branch.
    pub unclassified: Vec<Graph>,
}

impl Diam2SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.unclassified.is_empty()
    }
}

pub fn sweep_diam2(max_order: usize) -> Result<Diam2SweepReport> {
    let mut report = Diam2SweepReport { max_order, ..Default::default() };
    for n in 1..=max_order {
        let cat = all_graphs(n)?;
        let verdicts: Vec<Diam2Verdict> = cat.members().par_iter().map(check_diam2_proposition).collect();
        let mut stats = Diam2OrderStats { order: n, graphs: cat.len(), ..Default::default() };
        for (g, v) in cat.members().iter().zip(verdicts) {
            if !v.hypotheses_met {
                continue;
            }
            stats.hypotheses_met += 1;
            match v.branch {
                Some(Diam2Branch::StronglyRegular(_)) => stats.strongly_regular += 1,
                Some(Diam2Branch::TwoValency(..)) => stats.two_valency += 1,
                _ => {}
            }
            if !v.holds() {
                report.counterexamples.push(g.clone());
            }
            if !v.classified() {
                report.unclassified.push(g.clone());
            }
        }
        report.per_order.push(stats);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn examples() {
        let v = check_diam2_proposition(&cycle(5).unwrap());
        assert!(v.hypotheses_met && v.holds() && v.classified());
        assert_eq!(v.branch, Some(Diam2Branch::StronglyRegular(SrgParams { k: 2, lambda: 0, mu: 1 })));
        assert_eq!(v.triangle_free_edges.len(), 5);

        let v = check_diam2_proposition(&petersen());
        assert_eq!(v.branch, Some(Diam2Branch::StronglyRegular(SrgParams { k: 3, lambda: 0, mu: 1 })));
        assert_eq!(v.triangle_free_edges.len(), 15);

        let v = check_diam2_proposition(&star(4).unwrap());
        assert!(!v.hypotheses_met && v.holds() && v.branch.is_none());
    }

    #[test]
    fn sweep_to_order_seven() {
        let r = sweep_diam2(7).unwrap();
        assert!(r.passed());
        assert_eq!(r.per_order[4].strongly_regular, 1);
    }
}
