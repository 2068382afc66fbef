//! Labelled event structures: events under a causal partial order with an
//! inherited conflict relation. States are configurations; the TSI
//! translation enumerates configurations reachable by single-event extension.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::tsi::{tokens, Check, Label, Tsi, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Configuration = BTreeSet<EventId>;

#[derive(Debug, Clone)]
pub struct EventStructure {
    event_names: Vec<String>,
    labels: Vec<Label>,
    /// Strict causal predecessors, transitively closed.
    below: Vec<BTreeSet<EventId>>,
    conflict: BTreeSet<(EventId, EventId)>,
    /// True when the declared causal pairs formed a cycle (antisymmetry
    /// violation); kept for the validation report.
    causal_cycle: Option<String>,
}

impl EventStructure {
    pub fn build(
        events: Vec<(String, Label)>,
        causal: Vec<(usize, usize)>,
        conflict: Vec<(usize, usize)>,
    ) -> Result<EventStructure> {
        let n = events.len();
        let mut seen = BTreeSet::new();
        for (name, _) in &events {
            if !seen.insert(name.clone()) {
                return Err(Error::Model(format!("duplicate event {name}")));
            }
        }
        for &(a, b) in causal.iter().chain(conflict.iter()) {
            if a >= n || b >= n {
                return Err(Error::Model("event id out of range".into()));
            }
        }
        for &(a, b) in &conflict {
            if a == b {
                return Err(Error::Model(format!("conflict must be irreflexive: {}", events[a].0)));
            }
        }
        // transitive closure of the declared strict causal pairs
        let mut below = vec![BTreeSet::new(); n];
        for &(a, b) in &causal {
            below[b].insert(EventId(a as u32));
        }
        let mut changed = true;
        while changed {
            changed = false;
            for e in 0..n {
                let preds: Vec<EventId> = below[e].iter().cloned().collect();
                for p in preds {
                    let grand: Vec<EventId> = below[p.index()].iter().cloned().collect();
                    for g in grand {
                        if below[e].insert(g) {
                            changed = true;
                        }
                    }
                }
            }
        }
        let mut causal_cycle = None;
        for e in 0..n {
            if below[e].contains(&EventId(e as u32)) {
                causal_cycle = Some(events[e].0.clone());
                break;
            }
        }
        let mut cset = BTreeSet::new();
        for (a, b) in conflict {
            cset.insert((EventId(a as u32), EventId(b as u32)));
            cset.insert((EventId(b as u32), EventId(a as u32)));
        }
        let (event_names, labels) = events.into_iter().unzip();
        Ok(EventStructure { event_names, labels, below, conflict: cset, causal_cycle })
    }

    pub fn n_events(&self) -> usize {
        self.event_names.len()
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.event_names.len() as u32).map(EventId)
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.event_names[e.index()]
    }

    pub fn event_by_name(&self, name: &str) -> Option<EventId> {
        self.event_names.iter().position(|n| n == name).map(|i| EventId(i as u32))
    }

    pub fn label(&self, e: EventId) -> &Label {
        &self.labels[e.index()]
    }

    /// Strict causes of `e` (everything properly below it).
    pub fn causes(&self, e: EventId) -> &BTreeSet<EventId> {
        &self.below[e.index()]
    }

    pub fn leq(&self, a: EventId, b: EventId) -> bool {
        a == b || self.below[b.index()].contains(&a)
    }

    pub fn conflicts(&self, a: EventId, b: EventId) -> bool {
        self.conflict.contains(&(a, b))
    }

    /// Concurrency: unordered and conflict-free.
    pub fn co(&self, a: EventId, b: EventId) -> bool {
        a != b && !self.leq(a, b) && !self.leq(b, a) && !self.conflicts(a, b)
    }

    pub fn config_name(&self, c: &Configuration) -> String {
        let names: Vec<&str> = c.iter().map(|&e| self.event_name(e)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Events extending configuration `c` by one step.
    pub fn enabled(&self, c: &Configuration) -> Vec<EventId> {
        self.events()
            .filter(|&e| {
                !c.contains(&e)
                    && self.causes(e).is_subset(c)
                    && c.iter().all(|&d| !self.conflicts(d, e))
            })
            .collect()
    }
}

/// Checks conflict inheritance and the order axioms; witnesses on failure.
pub fn validate_es(es: &EventStructure) -> ValidationReport {
    let order = match &es.causal_cycle {
        None => Check::pass("causal-order"),
        Some(e) => Check::fail("causal-order", format!("causal cycle through {e}")),
    };
    let mut inheritance = Check::pass("conflict-inheritance");
    'out: for e1 in es.events() {
        for e2 in es.events() {
            if !es.conflicts(e1, e2) {
                continue;
            }
            for e3 in es.events() {
                if es.leq(e2, e3) && !es.conflicts(e1, e3) {
                    inheritance = Check::fail(
                        "conflict-inheritance",
                        format!(
                            "{} # {} <= {} but not {} # {}",
                            es.event_name(e1),
                            es.event_name(e2),
                            es.event_name(e3),
                            es.event_name(e1),
                            es.event_name(e3)
                        ),
                    );
                    break 'out;
                }
            }
        }
    }
    // finite causes holds for any finite structure; reported for completeness
    let finite = Check::pass("finite-causes");
    ValidationReport { checks: vec![order, inheritance, finite], classes: Vec::new() }
}

/// Translates an event structure into a TSI over its reachable configurations.
pub fn es_to_tsi(es: &EventStructure, cap: usize) -> Result<Tsi> {
    let mut seen: BTreeSet<Configuration> = BTreeSet::new();
    let mut order: Vec<Configuration> = Vec::new();
    let mut queue = VecDeque::new();
    let empty = Configuration::new();
    seen.insert(empty.clone());
    order.push(empty.clone());
    queue.push_back(empty);
    let mut edges: Vec<(Configuration, EventId, Configuration)> = Vec::new();
    while let Some(c) = queue.pop_front() {
        for e in es.enabled(&c) {
            let mut next = c.clone();
            next.insert(e);
            edges.push((c.clone(), e, next.clone()));
            if seen.insert(next.clone()) {
                if order.len() >= cap {
                    return Err(Error::StateExplosion(cap));
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    let index: BTreeMap<&Configuration, usize> =
        order.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let state_names: Vec<String> = order.iter().map(|c| es.config_name(c)).collect();

    let mut triples: BTreeMap<(usize, Label, usize), BTreeSet<EventId>> = BTreeMap::new();
    for (c, e, next) in &edges {
        triples
            .entry((index[c], es.label(*e).clone(), index[next]))
            .or_default()
            .insert(*e);
    }
    let trans: Vec<((usize, Label, usize), BTreeSet<EventId>)> = triples.into_iter().collect();
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
            let related = evs_i.iter().any(|&a| evs_j.iter().any(|&b| es.co(a, b)));
            if related {
                indep.push((i, j));
            }
        }
    }
    Tsi::build(state_names, 0, decls, indep)
}

// ---------------------------------------------------------------------------
// Text format: `event <id> <label>`, `causal <id> < <id>`,
// `conflict <id> # <id>`, `#`-to-end-of-line comments are NOT supported on
// conflict lines (the `#` separator is part of the syntax), so comments must
// be whole-line.

pub fn parse_es(text: &str) -> Result<EventStructure> {
    let mut events: Vec<(String, Label)> = Vec::new();
    let mut idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut causal: Vec<(usize, usize)> = Vec::new();
    let mut conflict: Vec<(usize, usize)> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let trimmed = raw.trim_start();
        if trimmed.starts_with('#') || trimmed.is_empty() {
            continue;
        }
        let mut toks = tokens(raw);
        let Some((col, word)) = toks.next() else { continue };
        match word {
            "event" => {
                let (c, name) = toks.next().ok_or_else(|| Error::parse(line, col, "expected event id"))?;
                let (_, lab) = toks.next().ok_or_else(|| Error::parse(line, col, "expected label"))?;
                if idx.contains_key(name) {
                    return Err(Error::parse(line, c, format!("duplicate event {name}")));
                }
                idx.insert(name.to_string(), events.len());
                events.push((name.to_string(), Label::new(lab)?));
            }
            "causal" => {
                let (c1, a) = toks.next().ok_or_else(|| Error::parse(line, col, "expected event id"))?;
                let (c2, lt) = toks.next().ok_or_else(|| Error::parse(line, col, "expected <"))?;
                if lt != "<" {
                    return Err(Error::parse(line, c2, "expected <"));
                }
                let (c3, b) = toks.next().ok_or_else(|| Error::parse(line, col, "expected event id"))?;
                let ia = *idx.get(a).ok_or_else(|| Error::parse(line, c1, format!("unknown event {a}")))?;
                let ib = *idx.get(b).ok_or_else(|| Error::parse(line, c3, format!("unknown event {b}")))?;
                causal.push((ia, ib));
            }
            "conflict" => {
                let (c1, a) = toks.next().ok_or_else(|| Error::parse(line, col, "expected event id"))?;
                let (c2, hash) = toks.next().ok_or_else(|| Error::parse(line, col, "expected #"))?;
                if hash != "#" {
                    return Err(Error::parse(line, c2, "expected #"));
                }
                let (c3, b) = toks.next().ok_or_else(|| Error::parse(line, col, "expected event id"))?;
                let ia = *idx.get(a).ok_or_else(|| Error::parse(line, c1, format!("unknown event {a}")))?;
                let ib = *idx.get(b).ok_or_else(|| Error::parse(line, c3, format!("unknown event {b}")))?;
                conflict.push((ia, ib));
            }
            other => return Err(Error::parse(line, col, format!("unknown declaration {other}"))),
        }
    }
    EventStructure::build(events, causal, conflict)
}
