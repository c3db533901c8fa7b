//! Explicit constructions: windmill WAP witnesses, determined-vertex closure, C4 gadget pairs,
//! and the diameter-2 proposition checker.

mod c4;
mod diam2;
mod windmill;

pub use c4::{c4_nonwap_gadgets, determined_closure, rigidity_check, C4Gadget, DeterminedSet, GadgetRefuter, PENTAGON_ORDER};
pub use diam2::{check_diam2_proposition, sweep_diam2, Diam2Branch, Diam2OrderStats, Diam2SweepReport, Diam2Verdict};
pub use windmill::{
    bowtie_centres, bowtie_saturate, missing_apexes, wap_witness, wap_witness_full, BowtieAnchors, SaturationCase,
    WindmillWitness,
};
