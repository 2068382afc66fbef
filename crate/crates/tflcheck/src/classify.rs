//! Structural classifiers: the confusion relation with its symmetric and
//! asymmetric variants, free-choice checks on systems and on nets, and the
//! fc-structured (Xi) class on which local causal reasoning is complete.

use serde::Serialize;

use crate::net::PetriNet;
use crate::order::duality_relations;
use crate::tsi::{detect_auto_concurrency, TransId, Tsi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConfusionVariant {
    Symmetric,
    Asymmetric,
}

/// A tuple (t1,t2,t3) in the confusion relation: t1 and t2 immediately
/// concurrent, with t3 in conflict with both (symmetric) or causally after t1
/// and in conflict with an instance of t2 (asymmetric).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionTuple {
    pub t1: TransId,
    pub t2: TransId,
    pub t3: TransId,
    pub variant: ConfusionVariant,
    pub deterministic: bool,
}

pub fn classify_confusion(tsi: &Tsi) -> Vec<ConfusionTuple> {
    let d = duality_relations(tsi);
    let class = tsi.instance_classes();
    let mut out = Vec::new();
    for t1 in tsi.trans_ids() {
        for t2 in tsi.trans_ids() {
            if !d.co_immediate.contains(&(t1, t2)) {
                continue;
            }
            for t3 in tsi.trans_ids() {
                // symmetric: reported once per unordered (t1,t2)
                if t1 < t2 && d.conflict.contains(&(t1, t3)) && d.conflict.contains(&(t2, t3)) && t1 != t3 && t2 != t3
                {
                    out.push(make_tuple(tsi, &d, t1, t2, t3, ConfusionVariant::Symmetric));
                }
                // asymmetric: t1 is the causal side, t2 the concurrent one
                if d.causal.contains(&(t1, t3)) {
                    let has_conflicting_instance = tsi
                        .trans_ids()
                        .any(|r2| class[r2.index()] == class[t2.index()] && d.conflict.contains(&(r2, t3)) && r2 != t3);
                    if has_conflicting_instance {
                        out.push(make_tuple(tsi, &d, t1, t2, t3, ConfusionVariant::Asymmetric));
                    }
                }
            }
        }
    }
    out
}

fn make_tuple(
    tsi: &Tsi,
    d: &crate::order::DualityRelations,
    t1: TransId,
    t2: TransId,
    t3: TransId,
    variant: ConfusionVariant,
) -> ConfusionTuple {
    let distinct_labels = tsi.label(t1) != tsi.label(t2)
        && tsi.label(t2) != tsi.label(t3)
        && tsi.label(t1) != tsi.label(t3);
    let causal_same_label = tsi.label(t1) == tsi.label(t3) && d.causal.contains(&(t1, t3));
    ConfusionTuple { t1, t2, t3, variant, deterministic: distinct_labels || causal_same_label }
}

/// Free-choice on systems: whenever t1 # t2 and one of them is independent of
/// some t3, there are instances t4 ~ t1 and t5 ~ t2, still in conflict, both
/// independent of t3.
pub fn is_free_choice(tsi: &Tsi) -> Result<(), (TransId, TransId, TransId)> {
    let d = duality_relations(tsi);
    let class = tsi.instance_classes();
    for t1 in tsi.trans_ids() {
        for t2 in tsi.trans_ids() {
            if t1 == t2 || !d.conflict.contains(&(t1, t2)) {
                continue;
            }
            for t3 in tsi.trans_ids() {
                if !(tsi.independent(t1, t3) || tsi.independent(t2, t3)) {
                    continue;
                }
                let ok = tsi.trans_ids().any(|t4| {
                    class[t4.index()] == class[t1.index()]
                        && tsi.independent(t3, t4)
                        && tsi.trans_ids().any(|t5| {
                            class[t5.index()] == class[t2.index()]
                                && t4 != t5
                                && d.conflict.contains(&(t4, t5))
                                && tsi.independent(t3, t5)
                        })
                });
                if !ok {
                    return Err((t1, t2, t3));
                }
            }
        }
    }
    Ok(())
}

/// Free-choice on nets: every place either branches to at most one action, or
/// all actions it feeds have singleton presets. Returns the offending place.
pub fn is_free_choice_net(net: &PetriNet) -> Result<(), String> {
    for p in net.places() {
        let post = net.place_postset(p);
        if post.len() <= 1 {
            continue;
        }
        if post.iter().any(|&a| net.preset(a).len() != 1) {
            return Err(net.place_name(p).to_string());
        }
    }
    Ok(())
}

/// Xi systems: no auto-concurrency, and either free-choice or a confusion
/// relation with only deterministic tuples.
pub fn is_xi_system(tsi: &Tsi) -> Result<(), String> {
    let auto = detect_auto_concurrency(tsi);
    if let Some(&(a, b)) = auto.first() {
        return Err(format!(
            "auto-concurrency between {} and {}",
            tsi.trans_name(a),
            tsi.trans_name(b)
        ));
    }
    if is_free_choice(tsi).is_ok() {
        return Ok(());
    }
    for c in classify_confusion(tsi) {
        if !c.deterministic {
            return Err(format!(
                "nondeterministic confusion ({},{},{})",
                tsi.trans_name(c.t1),
                tsi.trans_name(c.t2),
                tsi.trans_name(c.t3)
            ));
        }
    }
    Ok(())
}
