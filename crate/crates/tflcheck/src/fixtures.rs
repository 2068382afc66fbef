//! The in-repo fixture corpus: every system used by the test suite and the
//! docs, loaded from `fixtures/` and parsed on demand.

use crate::ccs::{parse_ccs, CcsProgram};
use crate::es::{parse_es, EventStructure};
use crate::net::{parse_net, PetriNet};
use crate::tsi::{parse_tsi, Tsi};

macro_rules! tsi_fixture {
    ($name:ident, $file:expr) => {
        pub fn $name() -> Tsi {
            parse_tsi(include_str!(concat!("../fixtures/", $file))).expect($file)
        }
    };
}

macro_rules! net_fixture {
    ($name:ident, $file:expr) => {
        pub fn $name() -> PetriNet {
            parse_net(include_str!(concat!("../fixtures/", $file))).expect($file)
        }
    };
}

macro_rules! es_fixture {
    ($name:ident, $file:expr) => {
        pub fn $name() -> EventStructure {
            parse_es(include_str!(concat!("../fixtures/", $file))).expect($file)
        }
    };
}

macro_rules! ccs_fixture {
    ($name:ident, $file:expr) => {
        pub fn $name() -> CcsProgram {
            parse_ccs(include_str!(concat!("../fixtures/", $file))).expect($file)
        }
    };
}

tsi_fixture!(diamond, "diamond.tsi");
tsi_fixture!(interleaving, "interleaving.tsi");
tsi_fixture!(auto_diamond, "auto_diamond.tsi");
tsi_fixture!(choice, "choice.tsi");
tsi_fixture!(twin_joint, "twin_joint.tsi");
tsi_fixture!(twin_split, "twin_split.tsi");
tsi_fixture!(diamond_branch, "diamond_branch.tsi");

net_fixture!(choicejoin2_net, "choicejoin2.net");
net_fixture!(choicejoin3_net, "choicejoin3.net");
net_fixture!(confusion_sym_net, "confusion_sym.net");
net_fixture!(confusion_asym_net, "confusion_asym.net");
net_fixture!(fc_merge_net, "fc_merge.net");
net_fixture!(fc_branch_net, "fc_branch.net");
net_fixture!(single_net, "single.net");
net_fixture!(par_ab_net, "par_ab.net");

es_fixture!(choice_then_c_es, "choice_then_c.es");
es_fixture!(co_pair_es, "co_pair.es");
es_fixture!(conflict_pair_es, "conflict_pair.es");

ccs_fixture!(loop_ccs, "loop.ccs");
ccs_fixture!(two_loops_ccs, "two_loops.ccs");
ccs_fixture!(par_ab_ccs, "par_ab.ccs");
ccs_fixture!(seq_choice_ccs, "seq_choice.ccs");

pub fn suite30() -> &'static str {
    include_str!("../fixtures/suite30.tfl")
}

pub fn suite20() -> &'static str {
    include_str!("../fixtures/suite20.tfl")
}

pub fn nonext_formula() -> &'static str {
    include_str!("../fixtures/nonext.tfl")
}

pub fn distinguish_formula() -> &'static str {
    include_str!("../fixtures/distinguish.tfl")
}
