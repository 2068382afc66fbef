//! Transition systems with independence (TSI): a rooted labelled transition
//! system plus an irreflexive symmetric relation `I` on transitions, subject
//! to the determinacy/diamond axioms A1-A4. TSI is the hub representation:
//! nets, event structures and CCS programs are all translated into it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An action label drawn from the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Result<Label> {
        let s = s.into();
        if s.is_empty() {
            return Err(Error::Model("empty label".into()));
        }
        Ok(Label(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TransId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    pub label: Label,
    pub dst: StateId,
}

/// A validated-by-construction TSI. Structural invariants (endpoints exist,
/// `I` irreflexive/symmetric, ids map 1:1 to (src,label,dst) triples) are
/// enforced at build time; the behavioural axioms A1-A4 are checked by
/// [`validate_tsi`], which reports witnesses instead of failing.
#[derive(Debug, Clone)]
pub struct Tsi {
    state_names: Vec<String>,
    trans_names: Vec<String>,
    initial: StateId,
    transitions: Vec<Transition>,
    indep: BTreeSet<(TransId, TransId)>,
    out: Vec<Vec<TransId>>,
    into: Vec<Vec<TransId>>,
}

impl Tsi {
    pub fn build(
        state_names: Vec<String>,
        initial: usize,
        transitions: Vec<(String, usize, Label, usize)>,
        indep: Vec<(usize, usize)>,
    ) -> Result<Tsi> {
        let n = state_names.len();
        if initial >= n {
            return Err(Error::Model("initial state out of range".into()));
        }
        let mut seen_states = BTreeSet::new();
        for s in &state_names {
            if !seen_states.insert(s.clone()) {
                return Err(Error::Model(format!("duplicate state {s}")));
            }
        }
        let mut trans = Vec::with_capacity(transitions.len());
        let mut trans_names = Vec::with_capacity(transitions.len());
        let mut triples = BTreeSet::new();
        let mut seen_trans = BTreeSet::new();
        for (name, src, label, dst) in transitions {
            if src >= n || dst >= n {
                return Err(Error::Model(format!("transition {name} endpoint out of range")));
            }
            if !seen_trans.insert(name.clone()) {
                return Err(Error::Model(format!("duplicate transition id {name}")));
            }
            if !triples.insert((src, label.clone(), dst)) {
                return Err(Error::Model(format!(
                    "transition {name} duplicates an existing (source,label,target) triple"
                )));
            }
            trans.push(Transition { src: StateId(src as u32), label, dst: StateId(dst as u32) });
            trans_names.push(name);
        }
        let mut iset = BTreeSet::new();
        for (a, b) in indep {
            if a >= trans.len() || b >= trans.len() {
                return Err(Error::Model("independence pair out of range".into()));
            }
            if a == b {
                return Err(Error::Model(format!(
                    "independence must be irreflexive: ({},{})",
                    trans_names[a], trans_names[b]
                )));
            }
            iset.insert((TransId(a as u32), TransId(b as u32)));
            iset.insert((TransId(b as u32), TransId(a as u32)));
        }
        let mut out = vec![Vec::new(); n];
        let mut into = vec![Vec::new(); n];
        for (i, t) in trans.iter().enumerate() {
            out[t.src.index()].push(TransId(i as u32));
            into[t.dst.index()].push(TransId(i as u32));
        }
        Ok(Tsi {
            state_names,
            trans_names,
            initial: StateId(initial as u32),
            transitions: trans,
            indep: iset,
            out,
            into,
        })
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn n_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn trans_ids(&self) -> impl Iterator<Item = TransId> {
        (0..self.transitions.len() as u32).map(TransId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.index()]
    }

    pub fn trans_name(&self, t: TransId) -> &str {
        &self.trans_names[t.index()]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn trans_by_name(&self, name: &str) -> Option<TransId> {
        self.trans_names.iter().position(|s| s == name).map(|i| TransId(i as u32))
    }

    pub fn src(&self, t: TransId) -> StateId {
        self.transitions[t.index()].src
    }

    pub fn dst(&self, t: TransId) -> StateId {
        self.transitions[t.index()].dst
    }

    pub fn label(&self, t: TransId) -> &Label {
        &self.transitions[t.index()].label
    }

    pub fn out(&self, s: StateId) -> &[TransId] {
        &self.out[s.index()]
    }

    pub fn into_state(&self, s: StateId) -> &[TransId] {
        &self.into[s.index()]
    }

    pub fn independent(&self, a: TransId, b: TransId) -> bool {
        self.indep.contains(&(a, b))
    }

    pub fn indep_pairs(&self) -> impl Iterator<Item = &(TransId, TransId)> {
        self.indep.iter()
    }

    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    /// True when the state graph has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        // colors: 0 unvisited, 1 on stack, 2 done
        let mut color = vec![0u8; self.n_states()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..self.n_states() {
            if color[root] != 0 {
                continue;
            }
            color[root] = 1;
            stack.push((root, 0));
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                if *i < self.out[s].len() {
                    let next = self.dst(self.out[s][*i]).index();
                    *i += 1;
                    match color[next] {
                        0 => {
                            color[next] = 1;
                            stack.push((next, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    color[s] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// The `prec` relation: t prec t' when t and t' are instances of the same
    /// action in the two interleavings of an independence square.
    pub fn prec_pairs(&self) -> Vec<(TransId, TransId)> {
        let mut pairs = Vec::new();
        for t in self.trans_ids() {
            for t2 in self.trans_ids() {
                if t == t2 || self.label(t) != self.label(t2) {
                    continue;
                }
                // t = (s,a,s1), t2 = (s2,a,q): need u = (s,b,s2), v = (s1,b,q)
                // with t I u, t I v, u I t2.
                let (s, s1) = (self.src(t), self.dst(t));
                let (s2, q) = (self.src(t2), self.dst(t2));
                let found = self.out(s).iter().any(|&u| {
                    self.dst(u) == s2
                        && self.independent(t, u)
                        && self.independent(u, t2)
                        && self.out(s1).iter().any(|&v| {
                            self.dst(v) == q
                                && self.label(v) == self.label(u)
                                && self.independent(t, v)
                        })
                });
                if found {
                    pairs.push((t, t2));
                }
            }
        }
        pairs
    }

    /// Instance classes: the reflexive-symmetric-transitive closure of `prec`,
    /// computed by union-find. Returns the class index of every transition.
    pub fn instance_classes(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_transitions()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for (a, b) in self.prec_pairs() {
            let (ra, rb) = (find(&mut parent, a.index()), find(&mut parent, b.index()));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut class = vec![0usize; self.n_transitions()];
        let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, c) in class.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            let next = reps.len();
            *c = *reps.entry(r).or_insert(next);
        }
        class
    }

    /// The set `J(t) = { t' | t I t' }`.
    pub fn jset(&self, t: TransId) -> BTreeSet<TransId> {
        self.trans_ids().filter(|&u| self.independent(t, u)).collect()
    }

    /// States reachable from the initial state.
    pub fn reachable_states(&self) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.initial);
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            for &t in self.out(s) {
                if seen.insert(self.dst(t)) {
                    queue.push_back(self.dst(t));
                }
            }
        }
        seen
    }

    fn describe(&self, t: TransId) -> String {
        format!(
            "{}:({},{},{})",
            self.trans_name(t),
            self.state_name(self.src(t)),
            self.label(t),
            self.state_name(self.dst(t))
        )
    }
}

/// Outcome of a single validation check: pass, or a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: &str) -> Check {
        Check { name: name.into(), witness: None }
    }

    pub fn fail(name: &str, witness: String) -> Check {
        Check { name: name.into(), witness: Some(witness) }
    }

    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Transition names grouped by instance class (the closure of `prec`).
    pub classes: Vec<Vec<String>>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks axioms A1-A4 on a structurally well-formed TSI. Violations are
/// report entries with witnesses, not errors. A4 is checked through its
/// equivalent formulation A4': t ~ t2 implies J(t) = J(t2).
pub fn validate_tsi(tsi: &Tsi) -> ValidationReport {
    let class = tsi.instance_classes();

    // A1: same source, same class => same target.
    let mut a1 = Check::pass("A1");
    'a1: for t in tsi.trans_ids() {
        for t2 in tsi.trans_ids() {
            if t < t2
                && tsi.src(t) == tsi.src(t2)
                && class[t.index()] == class[t2.index()]
                && tsi.dst(t) != tsi.dst(t2)
            {
                a1 = Check::fail("A1", format!("{} ~ {}", tsi.describe(t), tsi.describe(t2)));
                break 'a1;
            }
        }
    }

    // A2: co-initial independent transitions close a diamond forwards.
    let mut a2 = Check::pass("A2");
    'a2: for &(t, u) in tsi.indep_pairs() {
        if tsi.src(t) != tsi.src(u) {
            continue;
        }
        let (s1, s2) = (tsi.dst(t), tsi.dst(u));
        let closes = tsi.out(s1).iter().any(|&v| {
            tsi.label(v) == tsi.label(u)
                && tsi.independent(t, v)
                && tsi
                    .out(s2)
                    .iter()
                    .any(|&w| tsi.label(w) == tsi.label(t) && tsi.dst(w) == tsi.dst(v) && tsi.independent(u, w))
        });
        if !closes {
            a2 = Check::fail("A2", format!("{} I {}", tsi.describe(t), tsi.describe(u)));
            break 'a2;
        }
    }

    // A3: consecutive independent transitions close a diamond backwards.
    let mut a3 = Check::pass("A3");
    'a3: for &(t, v) in tsi.indep_pairs() {
        if tsi.dst(t) != tsi.src(v) {
            continue;
        }
        let s = tsi.src(t);
        let closes = tsi.out(s).iter().any(|&u| {
            tsi.label(u) == tsi.label(v)
                && tsi.independent(t, u)
                && tsi
                    .out(tsi.dst(u))
                    .iter()
                    .any(|&w| tsi.label(w) == tsi.label(t) && tsi.dst(w) == tsi.dst(v) && tsi.independent(u, w))
        });
        if !closes {
            a3 = Check::fail("A3", format!("{} I {}", tsi.describe(t), tsi.describe(v)));
            break 'a3;
        }
    }

    // A4': equal instance classes have equal independence sets.
    let mut a4 = Check::pass("A4");
    'a4: for t in tsi.trans_ids() {
        for t2 in tsi.trans_ids() {
            if t < t2 && class[t.index()] == class[t2.index()] && tsi.jset(t) != tsi.jset(t2) {
                a4 = Check::fail(
                    "A4",
                    format!("J({}) != J({})", tsi.describe(t), tsi.describe(t2)),
                );
                break 'a4;
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for t in tsi.trans_ids() {
        groups.entry(class[t.index()]).or_default().push(tsi.trans_name(t).to_string());
    }
    ValidationReport { checks: vec![a1, a2, a3, a4], classes: groups.into_values().collect() }
}

/// Every pair of equally-labelled immediately-concurrent transitions; an empty
/// result means the model is admissible for the equivalence analyses.
pub fn detect_auto_concurrency(tsi: &Tsi) -> Vec<(TransId, TransId)> {
    let mut witnesses = Vec::new();
    for t in tsi.trans_ids() {
        for u in tsi.trans_ids() {
            if t < u
                && tsi.src(t) == tsi.src(u)
                && tsi.independent(t, u)
                && tsi.label(t) == tsi.label(u)
            {
                witnesses.push((t, u));
            }
        }
    }
    witnesses
}

// ---------------------------------------------------------------------------
// Text format: `state <id> [init]`, `trans <id> <src> <label> <dst>`,
// `indep <id> <id>`, `#` comments.

pub fn parse_tsi(text: &str) -> Result<Tsi> {
    let mut states: Vec<String> = Vec::new();
    let mut state_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut initial: Option<usize> = None;
    let mut transitions: Vec<(String, usize, Label, usize)> = Vec::new();
    let mut trans_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut indep: Vec<(usize, usize)> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = tokens(content);
        let Some((col, word)) = toks.next() else { continue };
        match word {
            "state" => {
                let (c, name) = toks.next().ok_or_else(|| Error::parse(line, col, "expected state id"))?;
                if state_idx.contains_key(name) {
                    return Err(Error::parse(line, c, format!("duplicate state {name}")));
                }
                state_idx.insert(name.to_string(), states.len());
                states.push(name.to_string());
                if let Some((c2, flag)) = toks.next() {
                    if flag == "init" {
                        if initial.is_some() {
                            return Err(Error::parse(line, c2, "second init state"));
                        }
                        initial = Some(states.len() - 1);
                    } else {
                        return Err(Error::parse(line, c2, format!("unexpected token {flag}")));
                    }
                }
            }
            "trans" => {
                let (_, id) = toks.next().ok_or_else(|| Error::parse(line, col, "expected transition id"))?;
                let (c1, src) = toks.next().ok_or_else(|| Error::parse(line, col, "expected source state"))?;
                let (_, lab) = toks.next().ok_or_else(|| Error::parse(line, col, "expected label"))?;
                let (c2, dst) = toks.next().ok_or_else(|| Error::parse(line, col, "expected target state"))?;
                let s = *state_idx
                    .get(src)
                    .ok_or_else(|| Error::parse(line, c1, format!("unknown state {src}")))?;
                let d = *state_idx
                    .get(dst)
                    .ok_or_else(|| Error::parse(line, c2, format!("unknown state {dst}")))?;
                trans_idx.insert(id.to_string(), transitions.len());
                transitions.push((id.to_string(), s, Label::new(lab)?, d));
            }
            "indep" => {
                let (c1, t1) = toks.next().ok_or_else(|| Error::parse(line, col, "expected transition id"))?;
                let (c2, t2) = toks.next().ok_or_else(|| Error::parse(line, col, "expected transition id"))?;
                let a = *trans_idx
                    .get(t1)
                    .ok_or_else(|| Error::parse(line, c1, format!("unknown transition {t1}")))?;
                let b = *trans_idx
                    .get(t2)
                    .ok_or_else(|| Error::parse(line, c2, format!("unknown transition {t2}")))?;
                indep.push((a, b));
            }
            other => {
                return Err(Error::parse(line, col, format!("unknown declaration {other}")));
            }
        }
    }
    let initial = initial.ok_or_else(|| Error::parse(0, 0, "no init state declared"))?;
    Tsi::build(states, initial, transitions, indep)
}

pub fn print_tsi(tsi: &Tsi) -> String {
    let mut s = String::new();
    for st in tsi.states() {
        s.push_str("state ");
        s.push_str(tsi.state_name(st));
        if st == tsi.initial() {
            s.push_str(" init");
        }
        s.push('\n');
    }
    for t in tsi.trans_ids() {
        s.push_str(&format!(
            "trans {} {} {} {}\n",
            tsi.trans_name(t),
            tsi.state_name(tsi.src(t)),
            tsi.label(t),
            tsi.state_name(tsi.dst(t))
        ));
    }
    for &(a, b) in tsi.indep_pairs() {
        if a < b {
            s.push_str(&format!("indep {} {}\n", tsi.trans_name(a), tsi.trans_name(b)));
        }
    }
    s
}

/// Tokenizer that remembers 1-based column positions.
pub(crate) fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}
