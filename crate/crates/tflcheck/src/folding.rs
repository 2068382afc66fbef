//! Folding of (possibly infinite) event structures into finite systems.
//! A generator presents the event structure lazily; a quotient oracle
//! decides configuration equivalence through canonical forms. A finite
//! representative set of events is grown breadth-first until every
//! discovered class is covered, completed with the successor events that
//! close cycles, and the quotient then becomes a finite TSI satisfying the
//! same formulae as the unfolding.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::ccs::{CcsProgram, CcsTerm};
use crate::error::{Error, Result};
use crate::es::EventStructure;
use crate::logic::{to_positive_normal_form, Formula};
use crate::semantics::{Analysis, Denotation};
use crate::tsi::{Label, StateId, Tsi};

pub type EsEvent = String;
pub type EsConfig = BTreeSet<EsEvent>;

/// Lazy presentation of an event structure: one-step extensions of a
/// configuration (in a deterministic order) plus a concurrency test on
/// events. The initial configuration is always empty.
pub trait EsGenerator {
    fn successors(&self, c: &EsConfig) -> Vec<(EsEvent, Label, EsConfig)>;
    fn concurrent(&self, a: &EsEvent, b: &EsEvent) -> bool;
}

/// Decidable configuration equivalence, given by a canonical form.
pub trait QuotientOracle {
    fn canon(&self, c: &EsConfig) -> String;
}

#[derive(Debug, Clone)]
pub struct RepresentativeSet {
    pub e_r: BTreeSet<EsEvent>,
    pub e_f: BTreeSet<EsEvent>,
    /// One representative configuration per discovered class, in discovery
    /// order; the first entry is the class of the empty configuration.
    pub classes: Vec<(String, EsConfig)>,
}

/// Breadth-first search from the empty configuration: whenever a
/// configuration inhabits an uncovered class its events join `E_r` and it is
/// kept as the class representative; covered classes are not expanded
/// further. The cap guards against non-regular inputs.
pub fn representative_set(
    gen: &dyn EsGenerator,
    oracle: &dyn QuotientOracle,
    cap: usize,
) -> Result<RepresentativeSet> {
    let mut e_r = BTreeSet::new();
    let mut classes: Vec<(String, EsConfig)> = Vec::new();
    let mut covered: BTreeSet<String> = BTreeSet::new();
    let mut queue = VecDeque::new();
    queue.push_back(EsConfig::new());
    let mut visited = 0usize;
    while let Some(c) = queue.pop_front() {
        visited += 1;
        if visited > cap {
            return Err(Error::CapExceeded(cap));
        }
        let key = oracle.canon(&c);
        if !covered.insert(key.clone()) {
            continue;
        }
        e_r.extend(c.iter().cloned());
        classes.push((key, c.clone()));
        if classes.len() > cap {
            return Err(Error::CapExceeded(cap));
        }
        for (_, _, next) in gen.successors(&c) {
            queue.push_back(next);
        }
    }
    Ok(RepresentativeSet { e_r, e_f: BTreeSet::new(), classes })
}

/// Extends `E_r` with the events of every next configuration of each
/// representative, so that transitions closing cycles are representable.
pub fn complete_representative_set(
    mut rs: RepresentativeSet,
    gen: &dyn EsGenerator,
) -> RepresentativeSet {
    let mut e_f = rs.e_r.clone();
    for (_, c) in &rs.classes {
        for (e, _, _) in gen.successors(c) {
            e_f.insert(e);
        }
    }
    rs.e_f = e_f;
    rs
}

#[derive(Debug)]
pub struct FoldOutcome {
    pub tsi: Tsi,
    pub reps: RepresentativeSet,
}

/// The folding map: states are the discovered classes, transitions come from
/// single-event extensions of the representatives, and independence relates
/// transitions witnessed by concurrent events.
pub fn fold(gen: &dyn EsGenerator, oracle: &dyn QuotientOracle, cap: usize) -> Result<FoldOutcome> {
    let reps = complete_representative_set(representative_set(gen, oracle, cap)?, gen);
    let index: BTreeMap<&str, usize> =
        reps.classes.iter().enumerate().map(|(i, (k, _))| (k.as_str(), i)).collect();
    let state_names: Vec<String> =
        reps.classes.iter().map(|(k, _)| sanitize_state_name(k)).collect();

    let mut triples: BTreeMap<(usize, Label, usize), BTreeSet<EsEvent>> = BTreeMap::new();
    for (i, (_, c)) in reps.classes.iter().enumerate() {
        for (e, label, next) in gen.successors(c) {
            let nk = oracle.canon(&next);
            let j = *index
                .get(nk.as_str())
                .ok_or_else(|| Error::Model(format!("successor class {nk} was never discovered")))?;
            triples.entry((i, label, j)).or_default().insert(e);
        }
    }
    let trans: Vec<((usize, Label, usize), BTreeSet<EsEvent>)> = triples.into_iter().collect();
    let mut decls = Vec::new();
    for (k, ((src, label, dst), _)) in trans.iter().enumerate() {
        decls.push((format!("t{k}"), *src, label.clone(), *dst));
    }
    let mut indep = Vec::new();
    for (i, (_, evs_i)) in trans.iter().enumerate() {
        for (j, (_, evs_j)) in trans.iter().enumerate() {
            if i >= j {
                continue;
            }
            let related = evs_i
                .iter()
                .any(|a| evs_j.iter().any(|b| a != b && gen.concurrent(a, b)));
            if related {
                indep.push((i, j));
            }
        }
    }
    let tsi = Tsi::build(state_names, 0, decls, indep)?;
    Ok(FoldOutcome { tsi, reps })
}

fn sanitize_state_name(k: &str) -> String {
    let cleaned: String = k.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    if cleaned.is_empty() {
        "{}".to_string()
    } else {
        cleaned
    }
}

// ---------------------------------------------------------------------------
// Truncated unfolding: the configurations of size up to `depth` as a TSI,
// with the set of cut states (frontier configurations whose extensions were
// dropped) for three-valued evaluation.

pub struct TruncatedUnfolding {
    pub tsi: Tsi,
    pub cut: BTreeSet<StateId>,
}

pub fn truncated_unfold(gen: &dyn EsGenerator, depth: usize, cap: usize) -> Result<TruncatedUnfolding> {
    let mut order: Vec<EsConfig> = vec![EsConfig::new()];
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    index.insert(config_name(&EsConfig::new()), 0);
    let mut queue = VecDeque::new();
    queue.push_back(EsConfig::new());
    let mut edges: Vec<(usize, EsEvent, Label, usize)> = Vec::new();
    let mut cut_states: BTreeSet<usize> = BTreeSet::new();
    while let Some(c) = queue.pop_front() {
        let i = index[&config_name(&c)];
        let succs = gen.successors(&c);
        if c.len() >= depth {
            if !succs.is_empty() {
                cut_states.insert(i);
            }
            continue;
        }
        for (e, label, next) in succs {
            let key = config_name(&next);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = order.len();
                    if j >= cap {
                        return Err(Error::StateExplosion(cap));
                    }
                    index.insert(key, j);
                    order.push(next.clone());
                    queue.push_back(next.clone());
                    j
                }
            };
            edges.push((i, e, label, j));
        }
    }
    let state_names: Vec<String> = order.iter().map(config_name).collect();
    let mut triples: BTreeMap<(usize, Label, usize), BTreeSet<EsEvent>> = BTreeMap::new();
    for (i, e, label, j) in edges {
        triples.entry((i, label, j)).or_default().insert(e);
    }
    let trans: Vec<((usize, Label, usize), BTreeSet<EsEvent>)> = triples.into_iter().collect();
    let mut decls = Vec::new();
    for (k, ((src, label, dst), _)) in trans.iter().enumerate() {
        decls.push((format!("t{k}"), *src, label.clone(), *dst));
    }
    let mut indep = Vec::new();
    for (i, (_, evs_i)) in trans.iter().enumerate() {
        for (j, (_, evs_j)) in trans.iter().enumerate() {
            if i >= j {
                continue;
            }
            let related = evs_i
                .iter()
                .any(|a| evs_j.iter().any(|b| a != b && gen.concurrent(a, b)));
            if related {
                indep.push((i, j));
            }
        }
    }
    let tsi = Tsi::build(state_names, 0, decls, indep)?;
    let cut = cut_states.into_iter().map(|i| StateId(i as u32)).collect();
    Ok(TruncatedUnfolding { tsi, cut })
}

fn config_name(c: &EsConfig) -> String {
    let parts: Vec<&str> = c.iter().map(String::as_str).collect();
    format!("{{{}}}", parts.join(","))
}

// ---------------------------------------------------------------------------
// Three-valued evaluation on a truncated unfolding: a pessimistic and an
// optimistic denotation bracket the verdict of the full unfolding; cut
// states make modal and trace steps unknown.

#[derive(Clone, PartialEq, Eq)]
struct Bounds {
    pes: Denotation,
    opt: Denotation,
}

fn eval3(
    an: &Analysis,
    cut: &Denotation,
    f: &Formula,
    v: &BTreeMap<String, Bounds>,
) -> Result<Bounds> {
    Ok(match f {
        Formula::Tt => Bounds { pes: an.full(), opt: an.full() },
        Formula::Ff => Bounds { pes: Denotation::new(), opt: Denotation::new() },
        Formula::Var(z) => v
            .get(z)
            .cloned()
            .ok_or_else(|| Error::OpenFormula(z.clone()))?,
        Formula::Neg(a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.full().difference(&b.opt).cloned().collect(),
                opt: an.full().difference(&b.pes).cloned().collect(),
            }
        }
        Formula::And(a, b) => {
            let x = eval3(an, cut, a, v)?;
            let y = eval3(an, cut, b, v)?;
            Bounds {
                pes: x.pes.intersection(&y.pes).cloned().collect(),
                opt: x.opt.intersection(&y.opt).cloned().collect(),
            }
        }
        Formula::Or(a, b) => {
            let x = eval3(an, cut, a, v)?;
            let y = eval3(an, cut, b, v)?;
            Bounds {
                pes: x.pes.union(&y.pes).cloned().collect(),
                opt: x.opt.union(&y.opt).cloned().collect(),
            }
        }
        Formula::DiaC(l, a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.dia_c_pre(l, &b.pes),
                opt: an.dia_c_pre(l, &b.opt).union(cut).cloned().collect(),
            }
        }
        Formula::DiaNc(l, a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.dia_nc_pre(l, &b.pes),
                opt: an.dia_nc_pre(l, &b.opt).union(cut).cloned().collect(),
            }
        }
        Formula::BoxC(l, a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.box_c_pre(l, &b.pes).difference(cut).cloned().collect(),
                opt: an.box_c_pre(l, &b.opt),
            }
        }
        Formula::BoxNc(l, a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.box_nc_pre(l, &b.pes).difference(cut).cloned().collect(),
                opt: an.box_nc_pre(l, &b.opt),
            }
        }
        Formula::DiaCo(a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.dia_co_pre(&b.pes),
                opt: an.dia_co_pre(&b.opt).union(cut).cloned().collect(),
            }
        }
        Formula::BoxCo(a) => {
            let b = eval3(an, cut, a, v)?;
            Bounds {
                pes: an.box_co_pre(&b.pes).difference(cut).cloned().collect(),
                opt: an.box_co_pre(&b.opt),
            }
        }
        Formula::Mu(z, a) => {
            let mut cur = Bounds { pes: Denotation::new(), opt: Denotation::new() };
            loop {
                let mut v2 = v.clone();
                v2.insert(z.clone(), cur.clone());
                let next = eval3(an, cut, a, &v2)?;
                if next == cur {
                    break cur;
                }
                cur = next;
            }
        }
        Formula::Nu(z, a) => {
            let mut cur = Bounds { pes: an.full(), opt: an.full() };
            loop {
                let mut v2 = v.clone();
                v2.insert(z.clone(), cur.clone());
                let next = eval3(an, cut, a, &v2)?;
                if next == cur {
                    break cur;
                }
                cur = next;
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Agreement {
    Agree,
    Undecided,
    Disagree,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyEntry {
    pub formula: String,
    pub folded: bool,
    /// Verdict on the truncated unfolding, when decided within the depth.
    pub truncated: Option<bool>,
    pub status: Agreement,
}

/// Compares each closed formula on the folded system against the truncated
/// unfolding. A formula whose three-valued verdict is decided within the
/// depth must agree; an open verdict is reported as undecided.
pub fn verify_fold(
    folded: &Tsi,
    gen: &dyn EsGenerator,
    formulas: &[Formula],
    depth: usize,
    cap: usize,
) -> Result<Vec<VerifyEntry>> {
    let trunc = truncated_unfold(gen, depth, cap)?;
    let fan = Analysis::new(folded)?;
    let tan = Analysis::new(&trunc.tsi)?;
    let cut_procs: Denotation = tan
        .space
        .procs()
        .filter(|&p| trunc.cut.contains(&tan.space.owner(p)))
        .collect();
    let mut out = Vec::new();
    for f in formulas {
        let pnf = to_positive_normal_form(f);
        let folded_verdict = fan.satisfies_initial(&pnf)?;
        let bounds = eval3(&tan, &cut_procs, &pnf, &BTreeMap::new())?;
        let init = tan.space.initial();
        let truncated = if bounds.pes.contains(&init) {
            Some(true)
        } else if !bounds.opt.contains(&init) {
            Some(false)
        } else {
            None
        };
        let status = match truncated {
            Some(t) if t == folded_verdict => Agreement::Agree,
            Some(_) => Agreement::Disagree,
            None => Agreement::Undecided,
        };
        out.push(VerifyEntry {
            formula: crate::logic::print_formula(f),
            folded: folded_verdict,
            truncated,
            status,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Generators: a finite event structure presented lazily, and the event
// structure of a (relabelled) CCS program. CCS events are encoded as
// `c<component>:<occ>.<occ>...`, the occurrence path taken by that
// component; events of different components are concurrent, events of the
// same component never are.

pub struct FiniteEsGenerator<'a> {
    pub es: &'a EventStructure,
}

impl EsGenerator for FiniteEsGenerator<'_> {
    fn successors(&self, c: &EsConfig) -> Vec<(EsEvent, Label, EsConfig)> {
        let config: BTreeSet<crate::es::EventId> =
            c.iter().filter_map(|n| self.es.event_by_name(n)).collect();
        self.es
            .enabled(&config)
            .into_iter()
            .map(|e| {
                let mut next = c.clone();
                next.insert(self.es.event_name(e).to_string());
                (self.es.event_name(e).to_string(), self.es.label(e).clone(), next)
            })
            .collect()
    }

    fn concurrent(&self, a: &EsEvent, b: &EsEvent) -> bool {
        match (self.es.event_by_name(a), self.es.event_by_name(b)) {
            (Some(x), Some(y)) => self.es.co(x, y),
            _ => false,
        }
    }
}

/// Every configuration is its own class.
pub struct IdentityOracle;

impl QuotientOracle for IdentityOracle {
    fn canon(&self, c: &EsConfig) -> String {
        config_name(c)
    }
}

pub struct CcsGenerator {
    program: CcsProgram,
    components: Vec<CcsTerm>,
}

impl CcsGenerator {
    /// Takes an already relabelled program.
    pub fn new(program: CcsProgram) -> CcsGenerator {
        let components = program.components();
        CcsGenerator { program, components }
    }

    pub fn program(&self) -> &CcsProgram {
        &self.program
    }

    fn component_path(&self, c: &EsConfig, comp: usize) -> Vec<u32> {
        // events of one component form a prefix chain; the longest is the
        // component's local history
        let mut best: Vec<u32> = Vec::new();
        for e in c {
            if let Some((ci, path)) = decode_event(e) {
                if ci == comp && path.len() > best.len() {
                    best = path;
                }
            }
        }
        best
    }

    fn residual(&self, comp: usize, path: &[u32]) -> CcsTerm {
        let mut cur = self.program.resolve(&self.components[comp]);
        for occ in path {
            let heads = self.program.heads(&cur);
            match heads.into_iter().find(|(_, o, _)| o == occ) {
                Some((_, _, cont)) => cur = self.program.resolve(&cont),
                None => return CcsTerm::Nil,
            }
        }
        cur
    }

    pub fn residual_canon(&self, c: &EsConfig) -> String {
        let mut parts: Vec<String> = (0..self.components.len())
            .map(|i| {
                let path = self.component_path(c, i);
                self.residual(i, &path).canonical().render()
            })
            .collect();
        parts.sort();
        parts.join("|")
    }
}

fn decode_event(e: &EsEvent) -> Option<(usize, Vec<u32>)> {
    let rest = e.strip_prefix('c')?;
    let (comp, path) = rest.split_once(':')?;
    let comp = comp.parse().ok()?;
    if path.is_empty() {
        return Some((comp, Vec::new()));
    }
    let occs: Option<Vec<u32>> = path.split('.').map(|s| s.parse().ok()).collect();
    Some((comp, occs?))
}

fn encode_event(comp: usize, path: &[u32]) -> EsEvent {
    let parts: Vec<String> = path.iter().map(|o| o.to_string()).collect();
    format!("c{comp}:{}", parts.join("."))
}

impl EsGenerator for CcsGenerator {
    fn successors(&self, c: &EsConfig) -> Vec<(EsEvent, Label, EsConfig)> {
        let mut out = Vec::new();
        for i in 0..self.components.len() {
            let path = self.component_path(c, i);
            let term = self.residual(i, &path);
            let mut heads = self.program.heads(&term);
            heads.sort_by_key(|(_, o, _)| *o);
            for (label, occ, _) in heads {
                let mut np = path.clone();
                np.push(occ);
                let e = encode_event(i, &np);
                let mut next = c.clone();
                next.insert(e.clone());
                out.push((e, label, next));
            }
        }
        out
    }

    fn concurrent(&self, a: &EsEvent, b: &EsEvent) -> bool {
        match (decode_event(a), decode_event(b)) {
            (Some((ca, _)), Some((cb, _))) => ca != cb,
            _ => false,
        }
    }
}

/// The syntactic quotient: configurations are equivalent when their residual
/// terms coincide after canonicalisation.
pub struct CcsOracle<'a> {
    pub gen: &'a CcsGenerator,
}

impl QuotientOracle for CcsOracle<'_> {
    fn canon(&self, c: &EsConfig) -> String {
        self.gen.residual_canon(c)
    }
}
