//! Runs of a TSI and the posets they induce through the independence
//! relation (the Mazurkiewicz dependence closure: earlier dependent
//! occurrences lie below later ones).

use crate::error::{Error, Result};
use crate::poset::LabelledPoset;
use crate::tsi::{StateId, TransId, Tsi};

/// A composable finite sequence of transitions starting at the initial state.
/// The empty run is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Run(pub Vec<TransId>);

impl Run {
    pub fn empty() -> Run {
        Run(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The last transition, if any.
    pub fn last(&self) -> Option<TransId> {
        self.0.last().copied()
    }

    pub fn extended(&self, t: TransId) -> Run {
        let mut v = self.0.clone();
        v.push(t);
        Run(v)
    }

    /// The state reached after the run.
    pub fn end_state(&self, tsi: &Tsi) -> StateId {
        match self.last() {
            Some(t) => tsi.dst(t),
            None => tsi.initial(),
        }
    }

    pub fn check(&self, tsi: &Tsi) -> Result<()> {
        let mut at = tsi.initial();
        for (i, &t) in self.0.iter().enumerate() {
            if tsi.src(t) != at {
                return Err(Error::NotARun(format!(
                    "step {} ({}) starts at {}, run is at {}",
                    i + 1,
                    tsi.trans_name(t),
                    tsi.state_name(tsi.src(t)),
                    tsi.state_name(at)
                )));
            }
            at = tsi.dst(t);
        }
        Ok(())
    }
}

/// The labelled poset induced by a run: occurrence i lies below occurrence j
/// when i precedes j in the sequence and the two transitions are dependent.
pub fn run_poset(run: &Run, tsi: &Tsi) -> Result<LabelledPoset> {
    run.check(tsi)?;
    let labels = run.0.iter().map(|&t| tsi.label(t).clone()).collect();
    let mut pairs = Vec::new();
    for i in 0..run.len() {
        for j in (i + 1)..run.len() {
            if !tsi.independent(run.0[i], run.0[j]) {
                pairs.push((i, j));
            }
        }
    }
    Ok(LabelledPoset::new(labels, &pairs))
}

/// A position is backwards enabled when its transition is independent of
/// everything after it (it is a maximal element of the induced poset).
pub fn backwards_enabled(run: &Run, tsi: &Tsi, i: usize) -> bool {
    (i + 1..run.len()).all(|j| tsi.independent(run.0[i], run.0[j]))
}

/// Removes the backwards-enabled occurrence at position `i`, keeping a real
/// run. The deleted transition is commuted to the tail through independence
/// diamonds and then dropped, so the induced poset is the original one minus
/// that element.
pub fn run_delete(run: &Run, tsi: &Tsi, i: usize) -> Result<Run> {
    run.check(tsi)?;
    if i >= run.len() {
        return Err(Error::NotARun(format!("no position {i}")));
    }
    if !backwards_enabled(run, tsi, i) {
        return Err(Error::NotARun(format!("position {i} is not backwards enabled")));
    }
    let mut seq = run.0.clone();
    for j in i..seq.len() - 1 {
        let (t, u) = (seq[j], seq[j + 1]);
        let (t2, u2) = commute(tsi, t, u)?;
        seq[j] = t2;
        seq[j + 1] = u2;
    }
    seq.pop();
    let out = Run(seq);
    out.check(tsi)?;
    Ok(out)
}

/// Swaps a consecutive independent pair through its diamond: given t I u with
/// `dst(t) = src(u)`, returns the other linearisation (u-instance first). On a
/// TSI satisfying A1-A3 the completion exists and is unique.
fn commute(tsi: &Tsi, t: TransId, u: TransId) -> Result<(TransId, TransId)> {
    if !tsi.independent(t, u) || tsi.dst(t) != tsi.src(u) {
        return Err(Error::NotARun("cannot commute a dependent pair".into()));
    }
    let s = tsi.src(t);
    for &t2 in tsi.out(s) {
        if tsi.label(t2) != tsi.label(u) || !tsi.independent(t, t2) {
            continue;
        }
        for &u2 in tsi.out(tsi.dst(t2)) {
            if tsi.label(u2) == tsi.label(t)
                && tsi.dst(u2) == tsi.dst(u)
                && tsi.independent(t2, u2)
            {
                return Ok((t2, u2));
            }
        }
    }
    Err(Error::NotARun(format!(
        "no diamond completion for {} I {}",
        tsi.trans_name(t),
        tsi.trans_name(u)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poset::poset_isomorphic;
    use crate::tsi::Label;

    #[test]
    fn independent_steps_are_incomparable() {
        let tsi = fixtures::diamond();
        let (t1, t3) = (tsi.trans_by_name("t1").unwrap(), tsi.trans_by_name("t3").unwrap());
        let p = run_poset(&Run(vec![t1, t3]), &tsi).unwrap();
        assert_eq!(p.len(), 2);
        assert!(!p.lt(0, 1) && !p.lt(1, 0));
    }

    #[test]
    fn dependent_steps_form_a_chain() {
        let tsi = fixtures::interleaving();
        let (t1, t3) = (tsi.trans_by_name("t1").unwrap(), tsi.trans_by_name("t3").unwrap());
        let p = run_poset(&Run(vec![t1, t3]), &tsi).unwrap();
        assert!(p.lt(0, 1));
    }

    #[test]
    fn middle_pair_independent_matches_naive_closure() {
        // run of length 3 where exactly positions (0,1) are independent;
        // naive closure oracle: (1,2) and (0,2) dependent and therefore below
        let tsi = fixtures::twin_joint();
        let la1 = tsi.trans_by_name("la1").unwrap(); // s a l1
        let lb2 = tsi.trans_by_name("lb2").unwrap(); // l1 b l3  (indep of la1)
        let run = Run(vec![la1, lb2]);
        let p = run_poset(&run, &tsi).unwrap();
        assert!(!p.lt(0, 1));
        // oracle: quadratic dependence scan over the pair
        let dependent_pair = !tsi.independent(run.0[0], run.0[1]);
        assert!(!dependent_pair);
    }

    #[test]
    fn not_a_run_detected() {
        let tsi = fixtures::diamond();
        let (t1, t4) = (tsi.trans_by_name("t1").unwrap(), tsi.trans_by_name("t4").unwrap());
        assert!(run_poset(&Run(vec![t1, t4]), &tsi).is_err());
    }

    #[test]
    fn delete_commutes_through_the_diamond() {
        let tsi = fixtures::diamond();
        let (t1, t3) = (tsi.trans_by_name("t1").unwrap(), tsi.trans_by_name("t3").unwrap());
        let run = Run(vec![t1, t3]);
        assert!(backwards_enabled(&run, &tsi, 0));
        let reduced = run_delete(&run, &tsi, 0).unwrap();
        assert_eq!(reduced.len(), 1);
        // the remaining occurrence is the b-instance from the initial state
        assert_eq!(tsi.label(reduced.0[0]), &Label("b".into()));
        assert_eq!(tsi.src(reduced.0[0]), tsi.initial());
        // induced poset equals the original minus the deleted element
        let p = run_poset(&reduced, &tsi).unwrap();
        let single = LabelledPoset::new(vec![Label("b".into())], &[]);
        assert!(poset_isomorphic(&p, &single).is_some());
    }

    #[test]
    fn empty_independence_runs_are_chains() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let tsi = crate::gen::random_lts(&mut rng, 6, 2);
            // random walk of bounded length
            let mut run = Run::empty();
            for _ in 0..5 {
                let outs = tsi.out(run.end_state(&tsi));
                if outs.is_empty() {
                    break;
                }
                run = run.extended(outs[rng.gen_range(0..outs.len())]);
            }
            let p = run_poset(&run, &tsi).unwrap();
            for i in 0..p.len() {
                for j in (i + 1)..p.len() {
                    assert!(p.lt(i, j));
                }
            }
        }
    }

    #[test]
    fn dependent_tail_blocks_deletion() {
        let tsi = fixtures::interleaving();
        let (t1, t3) = (tsi.trans_by_name("t1").unwrap(), tsi.trans_by_name("t3").unwrap());
        let run = Run(vec![t1, t3]);
        assert!(!backwards_enabled(&run, &tsi, 0));
        assert!(run_delete(&run, &tsi, 0).is_err());
        assert!(backwards_enabled(&run, &tsi, 1));
        let reduced = run_delete(&run, &tsi, 1).unwrap();
        assert_eq!(reduced.0, vec![t1]);
    }
}
