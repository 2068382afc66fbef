//! The two local dualities and the structures built from them. Same-source
//! transition pairs split into immediately-concurrent vs in-conflict;
//! consecutive pairs split into linearly-concurrent vs causally-dependent.
//! Support sets, complete/maximal traces and the stateless maximal process
//! space all derive from these relations.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tsi::{StateId, TransId, Tsi};

/// The four relations on transition pairs. `co_immediate` and `conflict`
/// partition the same-source pairs (the diagonal sits in `conflict` since
/// independence is irreflexive); `co_linear` and `causal` partition the
/// consecutive pairs.
#[derive(Debug, Clone)]
pub struct DualityRelations {
    pub co_immediate: BTreeSet<(TransId, TransId)>,
    pub conflict: BTreeSet<(TransId, TransId)>,
    pub co_linear: BTreeSet<(TransId, TransId)>,
    pub causal: BTreeSet<(TransId, TransId)>,
}

pub fn duality_relations(tsi: &Tsi) -> DualityRelations {
    let mut d = DualityRelations {
        co_immediate: BTreeSet::new(),
        conflict: BTreeSet::new(),
        co_linear: BTreeSet::new(),
        causal: BTreeSet::new(),
    };
    for t in tsi.trans_ids() {
        for u in tsi.trans_ids() {
            if tsi.src(t) == tsi.src(u) {
                if tsi.independent(t, u) {
                    d.co_immediate.insert((t, u));
                } else {
                    d.conflict.insert((t, u));
                }
            }
            if tsi.dst(t) == tsi.src(u) {
                if tsi.independent(t, u) {
                    d.co_linear.insert((t, u));
                } else {
                    d.causal.insert((t, u));
                }
            }
        }
    }
    d
}

/// A set of transitions sharing a source state. Either the maximal set of a
/// state (possibly empty, at deadlocks) or a non-empty conflict-free set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SupportSet {
    pub owner: StateId,
    pub members: BTreeSet<TransId>,
}

impl SupportSet {
    pub fn is_conflict_free(&self, tsi: &Tsi) -> bool {
        self.members
            .iter()
            .all(|&a| self.members.iter().all(|&b| a == b || tsi.independent(a, b)))
    }

    pub fn render(&self, tsi: &Tsi) -> String {
        let names: Vec<&str> = self.members.iter().map(|&t| tsi.trans_name(t)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// The maximal set X(s): every transition leaving `s`.
pub fn maximal_set(tsi: &Tsi, s: StateId) -> SupportSet {
    SupportSet { owner: s, members: tsi.out(s).iter().cloned().collect() }
}

/// All complete traces M of `r`: non-empty conflict-free subsets that no
/// further member of `r` is concurrent with. For a conflict-free `r` this is
/// `{r}`; for the empty support set it is empty.
pub fn complete_traces(tsi: &Tsi, r: &SupportSet) -> Vec<SupportSet> {
    let members: Vec<TransId> = r.members.iter().cloned().collect();
    if members.is_empty() {
        return Vec::new();
    }
    // maximal cliques of the independence graph on `members`
    let mut cliques: Vec<BTreeSet<TransId>> = Vec::new();
    let mut current = BTreeSet::new();
    bron_kerbosch(
        tsi,
        &mut current,
        members.clone().into_iter().collect(),
        BTreeSet::new(),
        &mut cliques,
    );
    cliques.sort();
    cliques
        .into_iter()
        .map(|c| SupportSet { owner: r.owner, members: c })
        .collect()
}

fn bron_kerbosch(
    tsi: &Tsi,
    r: &mut BTreeSet<TransId>,
    mut p: BTreeSet<TransId>,
    mut x: BTreeSet<TransId>,
    out: &mut Vec<BTreeSet<TransId>>,
) {
    if p.is_empty() && x.is_empty() {
        if !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let candidates: Vec<TransId> = p.iter().cloned().collect();
    for v in candidates {
        let keep = |u: &TransId| tsi.independent(v, *u);
        let p2: BTreeSet<TransId> = p.iter().filter(|u| keep(u)).cloned().collect();
        let x2: BTreeSet<TransId> = x.iter().filter(|u| keep(u)).cloned().collect();
        r.insert(v);
        bron_kerbosch(tsi, r, p2, x2, out);
        r.remove(&v);
        p.remove(&v);
        x.insert(v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub u32);

impl SupportId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The stateless maximal process space: pairs (support set, last transition)
/// where supports range over maximal sets and maximal traces, pruned to
/// coherent pairs (the support's owner is the target of the last transition,
/// or the initial state under the empty transition).
#[derive(Debug, Clone)]
pub struct ProcessSpace {
    supports: Vec<SupportSet>,
    maximal: Vec<SupportId>,
    traces: Vec<Vec<SupportId>>,
    processes: Vec<(SupportId, Option<TransId>)>,
    proc_idx: BTreeMap<(SupportId, Option<TransId>), ProcId>,
    initial: ProcId,
}

pub const DEFAULT_SPACE_CAP: usize = 100_000;

impl ProcessSpace {
    pub fn build(tsi: &Tsi, cap: usize) -> Result<ProcessSpace> {
        let mut supports: Vec<SupportSet> = Vec::new();
        let mut sup_idx: BTreeMap<SupportSet, SupportId> = BTreeMap::new();
        let mut intern = |s: SupportSet, supports: &mut Vec<SupportSet>| -> SupportId {
            if let Some(&id) = sup_idx.get(&s) {
                return id;
            }
            let id = SupportId(supports.len() as u32);
            sup_idx.insert(s.clone(), id);
            supports.push(s);
            id
        };

        let mut maximal = Vec::with_capacity(tsi.n_states());
        for s in tsi.states() {
            let id = intern(maximal_set(tsi, s), &mut supports);
            maximal.push(id);
        }
        // complete traces of every maximal set; conflict-free supports are
        // their own single trace, so interning dedupes
        let mut pending: Vec<SupportId> = maximal.clone();
        let mut traces_map: BTreeMap<SupportId, Vec<SupportId>> = BTreeMap::new();
        while let Some(rid) = pending.pop() {
            if traces_map.contains_key(&rid) {
                continue;
            }
            let r = supports[rid.index()].clone();
            let ts = complete_traces(tsi, &r);
            let mut ids = Vec::new();
            for m in ts {
                let mid = intern(m, &mut supports);
                ids.push(mid);
                if !traces_map.contains_key(&mid) && mid != rid {
                    pending.push(mid);
                }
            }
            ids.sort();
            ids.dedup();
            traces_map.insert(rid, ids);
        }
        let mut traces = vec![Vec::new(); supports.len()];
        for (rid, ids) in traces_map {
            traces[rid.index()] = ids;
        }

        let mut processes = Vec::new();
        let mut proc_idx = BTreeMap::new();
        for (i, sup) in supports.iter().enumerate() {
            let sid = SupportId(i as u32);
            let mut lasts: Vec<Option<TransId>> = Vec::new();
            if sup.owner == tsi.initial() {
                lasts.push(None);
            }
            for &t in tsi.into_state(sup.owner) {
                lasts.push(Some(t));
            }
            for last in lasts {
                if processes.len() >= cap {
                    return Err(Error::StateExplosion(cap));
                }
                let pid = ProcId(processes.len() as u32);
                proc_idx.insert((sid, last), pid);
                processes.push((sid, last));
            }
        }
        let initial = proc_idx[&(maximal[tsi.initial().index()], None)];
        Ok(ProcessSpace { supports, maximal, traces, processes, proc_idx, initial })
    }

    pub fn initial(&self) -> ProcId {
        self.initial
    }

    pub fn len(&self) -> usize {
        self.processes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.processes.is_empty()
    }

    pub fn procs(&self) -> impl Iterator<Item = ProcId> {
        (0..self.processes.len() as u32).map(ProcId)
    }

    pub fn support_id(&self, p: ProcId) -> SupportId {
        self.processes[p.index()].0
    }

    pub fn support(&self, p: ProcId) -> &SupportSet {
        &self.supports[self.support_id(p).index()]
    }

    pub fn support_set(&self, id: SupportId) -> &SupportSet {
        &self.supports[id.index()]
    }

    pub fn last(&self, p: ProcId) -> Option<TransId> {
        self.processes[p.index()].1
    }

    pub fn owner(&self, p: ProcId) -> StateId {
        self.support(p).owner
    }

    pub fn maximal_support(&self, s: StateId) -> SupportId {
        self.maximal[s.index()]
    }

    pub fn lookup(&self, sid: SupportId, last: Option<TransId>) -> Option<ProcId> {
        self.proc_idx.get(&(sid, last)).copied()
    }

    /// The process reached by taking transition `r` from any process: the
    /// maximal set at its target, with `r` as last transition.
    pub fn step(&self, r: TransId, tsi: &Tsi) -> ProcId {
        self.proc_idx[&(self.maximal[tsi.dst(r).index()], Some(r))]
    }

    /// Processes (M, last) for every complete trace M of p's support.
    pub fn trace_procs(&self, p: ProcId) -> Vec<ProcId> {
        let (sid, last) = self.processes[p.index()];
        self.traces[sid.index()]
            .iter()
            .map(|&mid| self.proc_idx[&(mid, last)])
            .collect()
    }

    pub fn render(&self, p: ProcId, tsi: &Tsi) -> String {
        let last = match self.last(p) {
            None => "eps".to_string(),
            Some(t) => tsi.trans_name(t).to_string(),
        };
        format!("({},{})", self.support(p).render(tsi), last)
    }
}

/// Causal dependence of candidate `r` on the last transition: under the empty
/// transition every initial transition causally extends it; otherwise a
/// consecutive pair is causal exactly when not independent.
pub fn last_causal(tsi: &Tsi, last: Option<TransId>, r: TransId) -> bool {
    match last {
        None => tsi.src(r) == tsi.initial(),
        Some(t) => !tsi.independent(t, r),
    }
}

/// Linear concurrency with the last transition. The empty transition is never
/// linearly concurrent with anything.
pub fn last_concurrent(tsi: &Tsi, last: Option<TransId>, r: TransId) -> bool {
    match last {
        None => false,
        Some(t) => tsi.independent(t, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pair(tsi: &Tsi, a: &str, b: &str) -> (TransId, TransId) {
        (tsi.trans_by_name(a).unwrap(), tsi.trans_by_name(b).unwrap())
    }

    #[test]
    fn diamond_dualities() {
        let tsi = fixtures::diamond();
        let d = duality_relations(&tsi);
        assert!(d.co_immediate.contains(&pair(&tsi, "t1", "t2")));
        assert!(d.co_linear.contains(&pair(&tsi, "t1", "t3")));
        // the diagonal stays in conflict: independence is irreflexive
        assert!(d.conflict.contains(&pair(&tsi, "t1", "t1")));
        // every consecutive pair of the diamond is independent
        assert!(d.causal.is_empty());
    }

    #[test]
    fn empty_independence_collapses_the_dualities() {
        let tsi = fixtures::interleaving();
        let d = duality_relations(&tsi);
        assert!(d.co_immediate.is_empty());
        assert!(d.co_linear.is_empty());
        for t in tsi.trans_ids() {
            for u in tsi.trans_ids() {
                if tsi.src(t) == tsi.src(u) {
                    assert!(d.conflict.contains(&(t, u)));
                }
                if tsi.dst(t) == tsi.src(u) {
                    assert!(d.causal.contains(&(t, u)));
                }
            }
        }
    }

    #[test]
    fn partition_laws() {
        for tsi in [fixtures::diamond(), fixtures::twin_joint(), fixtures::diamond_branch()] {
            let d = duality_relations(&tsi);
            assert!(d.co_immediate.is_disjoint(&d.conflict));
            assert!(d.co_linear.is_disjoint(&d.causal));
            for t in tsi.trans_ids() {
                for u in tsi.trans_ids() {
                    let same = tsi.src(t) == tsi.src(u);
                    assert_eq!(
                        same,
                        d.co_immediate.contains(&(t, u)) || d.conflict.contains(&(t, u))
                    );
                    let consec = tsi.dst(t) == tsi.src(u);
                    assert_eq!(consec, d.co_linear.contains(&(t, u)) || d.causal.contains(&(t, u)));
                }
            }
        }
    }

    #[test]
    fn maximal_sets() {
        let tsi = fixtures::diamond();
        let m = maximal_set(&tsi, tsi.initial());
        assert_eq!(m.members.len(), 2);
        let q = tsi.state_by_name("q").unwrap();
        assert!(maximal_set(&tsi, q).members.is_empty());
        let twin = fixtures::twin_joint();
        assert_eq!(maximal_set(&twin, twin.initial()).members.len(), 4);
    }

    #[test]
    fn traces_of_conflict_free_set_is_itself() {
        let tsi = fixtures::diamond();
        let m = maximal_set(&tsi, tsi.initial());
        let traces = complete_traces(&tsi, &m);
        assert_eq!(traces, vec![m]);
    }

    #[test]
    fn traces_of_conflicting_pair_are_singletons() {
        let tsi = fixtures::choice();
        let m = maximal_set(&tsi, tsi.initial());
        let traces = complete_traces(&tsi, &m);
        assert_eq!(traces.len(), 2);
        assert!(traces.iter().all(|t| t.members.len() == 1));
    }

    #[test]
    fn twin_joint_root_traces_are_the_two_squares() {
        // brute-force oracle: maximal cliques of the co_immediate graph
        let tsi = fixtures::twin_joint();
        let m = maximal_set(&tsi, tsi.initial());
        let traces = complete_traces(&tsi, &m);
        assert_eq!(traces.len(), 2);
        for t in &traces {
            assert_eq!(t.members.len(), 2);
            assert!(t.is_conflict_free(&tsi));
        }
    }

    #[test]
    fn empty_support_has_no_traces() {
        let tsi = fixtures::diamond();
        let q = tsi.state_by_name("q").unwrap();
        assert!(complete_traces(&tsi, &maximal_set(&tsi, q)).is_empty());
    }

    #[test]
    fn diamond_process_space() {
        let tsi = fixtures::diamond();
        let sp = ProcessSpace::build(&tsi, DEFAULT_SPACE_CAP).unwrap();
        // s: ({t1,t2}, eps); s1: ({t3}, t1); s2: ({t4}, t2); q: (0, t3), (0, t4)
        assert_eq!(sp.len(), 5);
        assert_eq!(sp.owner(sp.initial()), tsi.initial());
        assert!(sp.last(sp.initial()).is_none());
        // the maximal set at s is conflict-free, so it is its own single trace
        assert_eq!(sp.trace_procs(sp.initial()), vec![sp.initial()]);
    }

    #[test]
    fn single_transition_space() {
        let tsi = crate::tsi::parse_tsi("state s init\nstate q\ntrans t s a q\n").unwrap();
        let sp = ProcessSpace::build(&tsi, DEFAULT_SPACE_CAP).unwrap();
        // ({t}, eps) and (0, t); the maximal trace {t} coincides with X(s)
        assert_eq!(sp.len(), 2);
    }

    #[test]
    fn choice_join_space_matches_enumeration_oracle() {
        // independent oracle: enumerate processes directly from the
        // definition (maximal sets, maximal cliques of the independence
        // graph, coherent last transitions)
        let tsi = crate::net::net_to_tsi(&crate::fixtures::choicejoin2_net(), 100_000).unwrap();
        let sp = ProcessSpace::build(&tsi, DEFAULT_SPACE_CAP).unwrap();
        let mut expected = std::collections::BTreeSet::new();
        for s in tsi.states() {
            let maximal = maximal_set(&tsi, s);
            let mut supports = vec![maximal.clone()];
            supports.extend(complete_traces(&tsi, &maximal));
            supports.sort();
            supports.dedup();
            for sup in supports {
                if s == tsi.initial() {
                    expected.insert((sup.members.clone(), None));
                }
                for t in tsi.trans_ids() {
                    if tsi.dst(t) == s {
                        expected.insert((sup.members.clone(), Some(t)));
                    }
                }
            }
        }
        assert_eq!(sp.len(), expected.len());
    }

    #[test]
    fn partition_laws_on_random_systems() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        for _ in 0..8 {
            let tsi = crate::gen::random_net_tsi(&mut rng, 15);
            let d = duality_relations(&tsi);
            for t in tsi.trans_ids() {
                for u in tsi.trans_ids() {
                    let same = tsi.src(t) == tsi.src(u);
                    assert_eq!(
                        same,
                        d.co_immediate.contains(&(t, u)) || d.conflict.contains(&(t, u))
                    );
                    let consec = tsi.dst(t) == tsi.src(u);
                    assert_eq!(
                        consec,
                        d.co_linear.contains(&(t, u)) || d.causal.contains(&(t, u))
                    );
                    assert!(!(d.co_linear.contains(&(t, u)) && d.causal.contains(&(t, u))));
                    assert!(!(d.co_immediate.contains(&(t, u)) && d.conflict.contains(&(t, u))));
                }
            }
        }
    }

    #[test]
    fn space_closed_under_moves() {
        for tsi in [fixtures::diamond(), fixtures::twin_joint(), fixtures::diamond_branch()] {
            let sp = ProcessSpace::build(&tsi, DEFAULT_SPACE_CAP).unwrap();
            for p in sp.procs() {
                let members: Vec<TransId> = sp.support(p).members.iter().cloned().collect();
                for r in members {
                    let q = sp.step(r, &tsi);
                    assert!(sp.owner(q) == tsi.dst(r));
                }
                for m in sp.trace_procs(p) {
                    assert_eq!(sp.last(m), sp.last(p));
                }
            }
        }
    }
}
