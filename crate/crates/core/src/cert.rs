//! Versioned JSON certificate bundles and their replay.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::amalgamation::{
    check_ap, find_amalgam_with, Amalgam, AmalgamationProblem, ApReport, Budget, Refutation, RefutationTree,
    SearchOptions, Strategy, WapCertificate,
};
use crate::classes::ForbiddenClass;
use crate::constructions::{c4_nonwap_gadgets, sweep_diam2, wap_witness_full, C4Gadget, Diam2SweepReport, WindmillWitness};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const SCHEMA_VERSION: u32 = 1;

/// One amalgamation problem with the amalgam found, or none after an exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamRecord {
    pub class: String,
    pub base: Graph,
    pub left: Graph,
    pub left_map: Vec<usize>,
    pub right: Graph,
    pub right_map: Vec<usize>,
    pub allow_cross_edges: bool,
    pub amalgam: Option<AmalgamParts>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamParts {
    pub result: Graph,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

impl AmalgamRecord {
    pub fn problem(&self) -> Result<AmalgamationProblem> {
        AmalgamationProblem::new(
            self.base.clone(),
            self.left.clone(),
            self.left_map.clone(),
            self.right.clone(),
            self.right_map.clone(),
        )
    }

    pub fn new(class: &ForbiddenClass, p: &AmalgamationProblem, allow_cross_edges: bool, amalgam: Option<Amalgam>) -> Self {
        AmalgamRecord {
            class: class.name().to_string(),
            base: p.base.clone(),
            left: p.left.clone(),
            left_map: p.left_map.clone(),
            right: p.right.clone(),
            right_map: p.right_map.clone(),
            allow_cross_edges,
            amalgam: amalgam.map(|a| AmalgamParts { result: a.result, left_map: a.left_map, right_map: a.right_map }),
        }
    }
}

/// All witnesses over a base up to a bound, each with a non-amalgamable pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefutationSet {
    pub class: String,
    pub base: Graph,
    pub witness_extra: usize,
    pub refutations: Vec<Refutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WapBundle {
    pub certificate: WapCertificate,
    pub budget: Budget,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Wap(WapBundle),
    RefutationTree(RefutationTree),
    RefutationSet(RefutationSet),
    C4Gadget(C4Gadget),
    WindmillWitness(WindmillWitness),
    ApReport(ApReport),
    Diam2Sweep(Diam2SweepReport),
    Amalgam(AmalgamRecord),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Wap(_) => "wap",
            Payload::RefutationTree(_) => "refutation-tree",
            Payload::RefutationSet(_) => "refutation-set",
            Payload::C4Gadget(_) => "c4-gadget",
            Payload::WindmillWitness(_) => "windmill-witness",
            Payload::ApReport(_) => "ap-report",
            Payload::Diam2Sweep(_) => "diam2-sweep",
            Payload::Amalgam(_) => "amalgam",
        }
    }
}

#[derive(Serialize)]
struct Out<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    body: &'a T,
}

/// A payload with its schema version, serialized as `{schema_version, kind, body}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub schema_version: u32,
    pub payload: Payload,
}

impl Envelope {
    pub fn new(payload: Payload) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, payload }
    }

    pub fn to_json(&self) -> Result<String> {
        fn out<T: Serialize>(v: u32, kind: &str, body: &T) -> serde_json::Result<String> {
            serde_json::to_string_pretty(&Out { schema_version: v, kind, body })
        }
        let (v, kind) = (self.schema_version, self.payload.kind());
        let mut s = match &self.payload {
            Payload::Wap(b) => out(v, kind, b),
            Payload::RefutationTree(b) => out(v, kind, b),
            Payload::RefutationSet(b) => out(v, kind, b),
            Payload::C4Gadget(b) => out(v, kind, b),
            Payload::WindmillWitness(b) => out(v, kind, b),
            Payload::ApReport(b) => out(v, kind, b),
            Payload::Diam2Sweep(b) => out(v, kind, b),
            Payload::Amalgam(b) => out(v, kind, b),
        }?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a bundle, refusing schema versions newer than this build.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::InvalidParameter("certificate lacks a schema_version".into()))?;
        if found > SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion { found: found.min(u32::MAX as u64) as u32, supported: SCHEMA_VERSION });
        }
        let kind = value.get("kind").and_then(serde_json::Value::as_str).unwrap_or_default().to_string();
        let body = value.get_mut("body").map(serde_json::Value::take).unwrap_or_default();
        let payload = match kind.as_str() {
            "wap" => Payload::Wap(serde_json::from_value(body)?),
            "refutation-tree" => Payload::RefutationTree(serde_json::from_value(body)?),
            "refutation-set" => Payload::RefutationSet(serde_json::from_value(body)?),
            "c4-gadget" => Payload::C4Gadget(serde_json::from_value(body)?),
            "windmill-witness" => Payload::WindmillWitness(serde_json::from_value(body)?),
            "ap-report" => Payload::ApReport(serde_json::from_value(body)?),
            "diam2-sweep" => Payload::Diam2Sweep(serde_json::from_value(body)?),
            "amalgam" => Payload::Amalgam(serde_json::from_value(body)?),
            other => return Err(Error::InvalidParameter(format!("unknown certificate kind `{other}`"))),
        };
        Ok(Envelope { schema_version: found as u32, payload })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Writes `<dir>/<name>.json` and a `<name>.meta.json` sidecar holding the timestamp, so
    /// the bundle itself depends only on its inputs.
    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, self.to_json()?)?;
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let meta = serde_json::json!({
            "bundle": format!("{name}.json"),
            "kind": self.payload.kind(),
            "created_unix": created,
            "tool_version": env!("CARGO_PKG_VERSION"),
        });
        fs::write(dir.join(format!("{name}.meta.json")), format!("{}\n", serde_json::to_string_pretty(&meta)?))?;
        Ok(path)
    }

    /// Re-verifies the payload from scratch.
    pub fn replay(&self) -> Result<bool> {
        replay(&self.payload)
    }
}

fn exhaustive(k: &ForbiddenClass, allow_cross_edges: bool) -> SearchOptions {
    let strategy = if k.is_monotone() { Strategy::Pruned } else { Strategy::Brute };
    SearchOptions { allow_cross_edges, strategy, ..SearchOptions::default() }
}

fn no_amalgam(k: &ForbiddenClass, base: &Graph, b: &Graph, c: &Graph) -> Result<bool> {
    let p = AmalgamationProblem::over_prefix(base, b, c)?;
    Ok(find_amalgam_with(&p, k, &exhaustive(k, !k.is_pure_omission()))?.0.is_none())
}

pub fn replay(payload: &Payload) -> Result<bool> {
    match payload {
        Payload::Wap(w) => w.certificate.replay(&ForbiddenClass::parse(&w.certificate.class)?, w.budget),
        Payload::RefutationTree(t) => {
            let k = ForbiddenClass::parse(&t.class)?;
            t.replay(&k, exhaustive(&k, false).strategy)
        }
        Payload::RefutationSet(s) => {
            let k = ForbiddenClass::parse(&s.class)?;
            let expected = crate::enumerate::Extensions::new(&s.base, &k, s.witness_extra)?.collect_all()?;
            if expected.len() != s.refutations.len()
                || expected.iter().zip(&s.refutations).any(|(w, r)| *w != r.witness)
            {
                return Ok(false);
            }
            for r in &s.refutations {
                let ok = k.member(&r.left)
                    && k.member(&r.right)
                    && r.left.has_prefix(&r.witness)
                    && r.right.has_prefix(&r.witness)
                    && no_amalgam(&k, &s.base, &r.left, &r.right)?;
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Payload::C4Gadget(g) => {
            let k = ForbiddenClass::c4_free();
            let base = g.witness.induced(&(0..crate::constructions::PENTAGON_ORDER).collect::<Vec<_>>());
            Ok(g.check().is_ok()
                && c4_nonwap_gadgets(&g.witness)? == *g
                && no_amalgam(&k, &base, &g.b, &g.c)?)
        }
        Payload::WindmillWitness(w) => {
            let k = ForbiddenClass::windmill_free();
            Ok(k.member(&w.witness)
                && w.witness.has_prefix(&w.base)
                && w.anchors.verify(&w.witness)
                && wap_witness_full(&w.base)? == *w)
        }
        Payload::ApReport(r) => {
            let k = ForbiddenClass::parse(&r.class)?;
            for t in &r.failures {
                if t.amalgamates(&k)? {
                    return Ok(false);
                }
            }
            Ok(check_ap(&k, r.max_order)? == *r)
        }
        Payload::Diam2Sweep(r) => Ok(sweep_diam2(r.max_order)? == *r),
        Payload::Amalgam(rec) => {
            let k = ForbiddenClass::parse(&rec.class)?;
            let p = rec.problem()?;
            match &rec.amalgam {
                Some(parts) => {
                    let a = Amalgam {
                        result: parts.result.clone(),
                        left_map: parts.left_map.clone(),
                        right_map: parts.right_map.clone(),
                    };
                    Ok(a.is_valid_for(&p) && k.member(&a.result))
                }
                None => Ok(find_amalgam_with(&p, &k, &exhaustive(&k, rec.allow_cross_edges))?.0.is_none()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgamation::{build_refutation_tree, find_amalgam, verify_wap_witness, BoundedRefuter};
    use crate::graph::named::*;

    fn round_trip(p: Payload) -> Envelope {
        let e = Envelope::new(p);
        let back = Envelope::from_json(&e.to_json().unwrap()).unwrap();
        assert_eq!(back, e);
        back
    }

    #[test]
    fn wap_and_tree_bundles_replay() {
        let k = ForbiddenClass::linear_forests();
        let base = Graph::empty(2);
        let budget = Budget::default();
        let cert = verify_wap_witness(&k, &base, &base, 1, budget).unwrap();
        assert!(round_trip(Payload::Wap(WapBundle { certificate: cert, budget })).replay().unwrap());

        let tree = build_refutation_tree(&k, &base, &BoundedRefuter { ext_extra: 2, budget }, 1).unwrap();
        assert_eq!(tree.nodes.len(), 3);
        assert!(round_trip(Payload::RefutationTree(tree)).replay().unwrap());
    }

    #[test]
    fn construction_bundles_replay() {
        let g = c4_nonwap_gadgets(&cycle(5).unwrap()).unwrap();
        assert!(round_trip(Payload::C4Gadget(g.clone())).replay().unwrap());
        let mut bad = g;
        bad.b.add_edge(0, 2);
        assert!(!round_trip(Payload::C4Gadget(bad)).replay().unwrap());

        let w = wap_witness_full(&complete(2).unwrap()).unwrap();
        assert!(round_trip(Payload::WindmillWitness(w)).replay().unwrap());
    }

    #[test]
    fn report_bundles_replay() {
        let k = ForbiddenClass::linear_forests();
        let r = check_ap(&k, 4).unwrap();
        assert!(!r.passed());
        assert!(round_trip(Payload::ApReport(r.clone())).replay().unwrap());
        let mut forged = r;
        forged.failures.pop();
        assert!(!Envelope::new(Payload::ApReport(forged)).replay().unwrap());

        assert!(round_trip(Payload::Diam2Sweep(sweep_diam2(5).unwrap())).replay().unwrap());
    }

    #[test]
    fn amalgam_records_replay() {
        let k = ForbiddenClass::linear_forests();
        let a = Graph::empty(2);
        let b = Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let c = Graph::from_edges(4, &[(0, 2), (2, 3), (3, 1)]).unwrap();
        let p = AmalgamationProblem::over_prefix(&a, &b, &c).unwrap();
        let rec = AmalgamRecord::new(&k, &p, true, find_amalgam(&p, &k, true).unwrap());
        assert!(rec.amalgam.is_none());
        assert!(round_trip(Payload::Amalgam(rec)).replay().unwrap());

        let p = AmalgamationProblem::over_prefix(&a, &b, &b).unwrap();
        let rec = AmalgamRecord::new(&k, &p, true, find_amalgam(&p, &k, true).unwrap());
        assert!(rec.amalgam.is_some());
        assert!(round_trip(Payload::Amalgam(rec)).replay().unwrap());
    }

    #[test]
    fn newer_schema_is_refused() {
        let e = Envelope::new(Payload::Diam2Sweep(sweep_diam2(3).unwrap()));
        let json = e.to_json().unwrap().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(Envelope::from_json(&json), Err(Error::SchemaVersion { found: 2, supported: 1 })));
        assert!(Envelope::from_json("{}").is_err());
    }

    #[test]
    fn bundles_are_byte_identical_and_carry_a_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let e = Envelope::new(Payload::WindmillWitness(wap_witness_full(&Graph::empty(1)).unwrap()));
        let p1 = e.write(dir.path(), "a").unwrap();
        let p2 = e.write(dir.path(), "b").unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert!(dir.path().join("a.meta.json").exists());
        assert!(Envelope::read(&p1).unwrap().replay().unwrap());
        let text = fs::read_to_string(&p1).unwrap();
        assert!(text.contains("\"kind\": \"windmill-witness\""));
    }
}
