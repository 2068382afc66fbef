//! Denotational semantics of the logic over the stateless maximal process
//! space. Fixpoints are computed by Knaster-Tarski iteration; negation is
//! complement within the coherent space. A state-based evaluator for the
//! plain-modality mu-calculus fragment is included as a reference oracle.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::{plain_view, Formula, PlainView};
use crate::order::{last_causal, last_concurrent, ProcId, ProcessSpace, DEFAULT_SPACE_CAP};
use crate::tsi::{StateId, Tsi};

pub type Denotation = BTreeSet<ProcId>;
pub type Valuation = BTreeMap<String, Denotation>;

/// A TSI with its process space, built once and reused by the evaluator and
/// the games.
pub struct Analysis<'t> {
    pub tsi: &'t Tsi,
    pub space: ProcessSpace,
}

/// Iteration counts per fixpoint variable observed during an evaluation.
pub type ApproximantLengths = BTreeMap<String, usize>;

#[derive(Debug, Clone)]
pub struct ApproximantTrace {
    pub variable: String,
    pub is_least: bool,
    /// The chain of iterates, from the initial element to the stable one.
    pub chain: Vec<Denotation>,
}

impl<'t> Analysis<'t> {
    pub fn new(tsi: &'t Tsi) -> Result<Analysis<'t>> {
        Ok(Analysis { tsi, space: ProcessSpace::build(tsi, DEFAULT_SPACE_CAP)? })
    }

    pub fn with_cap(tsi: &'t Tsi, cap: usize) -> Result<Analysis<'t>> {
        Ok(Analysis { tsi, space: ProcessSpace::build(tsi, cap)? })
    }

    pub fn full(&self) -> Denotation {
        self.space.procs().collect()
    }

    /// Diamond-c transformer: processes that can take a causally dependent
    /// `a`-labelled member of their support into `s`.
    pub fn dia_c_pre(&self, label: &crate::tsi::Label, s: &Denotation) -> Denotation {
        self.modal_pre(label, s, true, false)
    }

    pub fn dia_nc_pre(&self, label: &crate::tsi::Label, s: &Denotation) -> Denotation {
        self.modal_pre(label, s, false, true)
    }

    pub fn box_c_pre(&self, label: &crate::tsi::Label, s: &Denotation) -> Denotation {
        self.modal_all(label, s, true, false)
    }

    pub fn box_nc_pre(&self, label: &crate::tsi::Label, s: &Denotation) -> Denotation {
        self.modal_all(label, s, false, true)
    }

    fn modal_pre(
        &self,
        label: &crate::tsi::Label,
        s: &Denotation,
        causal: bool,
        concurrent: bool,
    ) -> Denotation {
        let mut out = Denotation::new();
        for p in self.space.procs() {
            let last = self.space.last(p);
            let hit = self.space.support(p).members.iter().any(|&r| {
                self.tsi.label(r) == label
                    && ((causal && last_causal(self.tsi, last, r))
                        || (concurrent && last_concurrent(self.tsi, last, r)))
                    && s.contains(&self.space.step(r, self.tsi))
            });
            if hit {
                out.insert(p);
            }
        }
        out
    }

    fn modal_all(
        &self,
        label: &crate::tsi::Label,
        s: &Denotation,
        causal: bool,
        concurrent: bool,
    ) -> Denotation {
        let mut out = Denotation::new();
        for p in self.space.procs() {
            let last = self.space.last(p);
            let ok = self.space.support(p).members.iter().all(|&r| {
                let applies = self.tsi.label(r) == label
                    && ((causal && last_causal(self.tsi, last, r))
                        || (concurrent && last_concurrent(self.tsi, last, r)));
                !applies || s.contains(&self.space.step(r, self.tsi))
            });
            if ok {
                out.insert(p);
            }
        }
        out
    }

    /// Trace transformer: processes with a complete trace of their support
    /// (same last transition) inside `s`.
    pub fn dia_co_pre(&self, s: &Denotation) -> Denotation {
        self.space
            .procs()
            .filter(|&p| self.space.trace_procs(p).iter().any(|m| s.contains(m)))
            .collect()
    }

    pub fn box_co_pre(&self, s: &Denotation) -> Denotation {
        self.space
            .procs()
            .filter(|&p| self.space.trace_procs(p).iter().all(|m| s.contains(m)))
            .collect()
    }

    pub fn denote(&self, f: &Formula, v: &Valuation) -> Result<Denotation> {
        let mut stats = ApproximantLengths::new();
        self.eval(f, v, &mut stats)
    }

    pub fn denote_with_stats(&self, f: &Formula, v: &Valuation) -> Result<(Denotation, ApproximantLengths)> {
        let mut stats = ApproximantLengths::new();
        let d = self.eval(f, v, &mut stats)?;
        Ok((d, stats))
    }

    fn eval(&self, f: &Formula, v: &Valuation, stats: &mut ApproximantLengths) -> Result<Denotation> {
        Ok(match f {
            Formula::Tt => self.full(),
            Formula::Ff => Denotation::new(),
            Formula::Var(z) => v.get(z).cloned().ok_or_else(|| Error::OpenFormula(z.clone()))?,
            Formula::Neg(a) => {
                let inner = self.eval(a, v, stats)?;
                self.full().difference(&inner).cloned().collect()
            }
            Formula::And(a, b) => {
                let da = self.eval(a, v, stats)?;
                let db = self.eval(b, v, stats)?;
                da.intersection(&db).cloned().collect()
            }
            Formula::Or(a, b) => {
                let da = self.eval(a, v, stats)?;
                let db = self.eval(b, v, stats)?;
                da.union(&db).cloned().collect()
            }
            Formula::DiaC(l, a) => self.dia_c_pre(l, &self.eval(a, v, stats)?),
            Formula::DiaNc(l, a) => self.dia_nc_pre(l, &self.eval(a, v, stats)?),
            Formula::BoxC(l, a) => self.modal_all(l, &self.eval(a, v, stats)?, true, false),
            Formula::BoxNc(l, a) => self.modal_all(l, &self.eval(a, v, stats)?, false, true),
            Formula::DiaCo(a) => self.dia_co_pre(&self.eval(a, v, stats)?),
            Formula::BoxCo(a) => self.box_co_pre(&self.eval(a, v, stats)?),
            Formula::Mu(z, a) => self.fixpoint(z, a, v, stats, true)?,
            Formula::Nu(z, a) => self.fixpoint(z, a, v, stats, false)?,
        })
    }

    fn fixpoint(
        &self,
        z: &str,
        body: &Formula,
        v: &Valuation,
        stats: &mut ApproximantLengths,
        least: bool,
    ) -> Result<Denotation> {
        let mut current = if least { Denotation::new() } else { self.full() };
        let mut steps = 0usize;
        loop {
            let mut v2 = v.clone();
            v2.insert(z.to_string(), current.clone());
            let next = self.eval(body, &v2, stats)?;
            steps += 1;
            if next == current {
                break;
            }
            current = next;
        }
        let entry = stats.entry(z.to_string()).or_insert(0);
        *entry = (*entry).max(steps);
        Ok(current)
    }

    /// Satisfaction of a closed formula at a process.
    pub fn satisfies(&self, p: ProcId, f: &Formula) -> Result<bool> {
        Ok(self.denote(f, &Valuation::new())?.contains(&p))
    }

    pub fn satisfies_initial(&self, f: &Formula) -> Result<bool> {
        self.satisfies(self.space.initial(), f)
    }

    /// The full approximant chain of an outermost fixpoint formula, up to
    /// stabilisation. The final element equals the denotation.
    pub fn approximants(&self, f: &Formula) -> Result<ApproximantTrace> {
        let (z, body, least) = match f {
            Formula::Mu(z, a) => (z.clone(), a.as_ref(), true),
            Formula::Nu(z, a) => (z.clone(), a.as_ref(), false),
            _ => return Err(Error::Usage("approximants need an outermost fixpoint".into())),
        };
        let mut stats = ApproximantLengths::new();
        let mut chain = vec![if least { Denotation::new() } else { self.full() }];
        loop {
            let mut v = Valuation::new();
            v.insert(z.clone(), chain.last().unwrap().clone());
            let next = self.eval(body, &v, &mut stats)?;
            if &next == chain.last().unwrap() {
                break;
            }
            chain.push(next);
        }
        Ok(ApproximantTrace { variable: z, is_least: least, chain })
    }
}

// ---------------------------------------------------------------------------
// Reference evaluator: standard state-based mu-calculus semantics over the
// underlying LTS, for plain-modality formulas. Used as a test oracle and by
// the degeneration checks.

pub type StateSet = BTreeSet<StateId>;

pub fn lmu_denote(tsi: &Tsi, f: &Formula, v: &BTreeMap<String, StateSet>) -> Result<StateSet> {
    let full: StateSet = tsi.states().collect();
    if let Some(view) = plain_view(f) {
        return Ok(match view {
            PlainView::Dia(l, a) => {
                let s = lmu_denote(tsi, a, v)?;
                tsi.states()
                    .filter(|&st| {
                        tsi.out(st).iter().any(|&t| tsi.label(t) == l && s.contains(&tsi.dst(t)))
                    })
                    .collect()
            }
            PlainView::Box(l, a) => {
                let s = lmu_denote(tsi, a, v)?;
                tsi.states()
                    .filter(|&st| {
                        tsi.out(st).iter().all(|&t| tsi.label(t) != l || s.contains(&tsi.dst(t)))
                    })
                    .collect()
            }
        });
    }
    Ok(match f {
        Formula::Tt => full,
        Formula::Ff => StateSet::new(),
        Formula::Var(z) => v.get(z).cloned().ok_or_else(|| Error::OpenFormula(z.clone()))?,
        Formula::Neg(a) => {
            let inner = lmu_denote(tsi, a, v)?;
            full.difference(&inner).cloned().collect()
        }
        Formula::And(a, b) => {
            let da = lmu_denote(tsi, a, v)?;
            let db = lmu_denote(tsi, b, v)?;
            da.intersection(&db).cloned().collect()
        }
        Formula::Or(a, b) => {
            let da = lmu_denote(tsi, a, v)?;
            let db = lmu_denote(tsi, b, v)?;
            da.union(&db).cloned().collect()
        }
        Formula::Mu(z, a) => {
            let mut cur = StateSet::new();
            loop {
                let mut v2 = v.clone();
                v2.insert(z.clone(), cur.clone());
                let next = lmu_denote(tsi, a, &v2)?;
                if next == cur {
                    break cur;
                }
                cur = next;
            }
        }
        Formula::Nu(z, a) => {
            let mut cur = full;
            loop {
                let mut v2 = v.clone();
                v2.insert(z.clone(), cur.clone());
                let next = lmu_denote(tsi, a, &v2)?;
                if next == cur {
                    break cur;
                }
                cur = next;
            }
        }
        _ => return Err(Error::NotLmuFragment),
    })
}
