//! Safe Petri nets and their translation to TSI: states are the reachable
//! markings, transitions go through the action labelling, and independence
//! comes from actions with disjoint neighbourhoods that are co-enabled
//! somewhere.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::tsi::{tokens, Check, Label, Tsi, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Marking = BTreeSet<PlaceId>;

#[derive(Debug, Clone)]
pub struct PetriNet {
    place_names: Vec<String>,
    action_names: Vec<String>,
    labels: Vec<Label>,
    pre: Vec<Marking>,
    post: Vec<Marking>,
    pub initial_marking: Marking,
}

impl PetriNet {
    pub fn build(
        place_names: Vec<String>,
        actions: Vec<(String, Label)>,
        arcs: Vec<(ArcEnd, ArcEnd)>,
        initial: Vec<usize>,
    ) -> Result<PetriNet> {
        let np = place_names.len();
        let na = actions.len();
        let mut pre = vec![Marking::new(); na];
        let mut post = vec![Marking::new(); na];
        for (from, to) in arcs {
            match (from, to) {
                (ArcEnd::Place(p), ArcEnd::Action(a)) => {
                    if p >= np || a >= na {
                        return Err(Error::Model("arc endpoint out of range".into()));
                    }
                    pre[a].insert(PlaceId(p as u32));
                }
                (ArcEnd::Action(a), ArcEnd::Place(p)) => {
                    if p >= np || a >= na {
                        return Err(Error::Model("arc endpoint out of range".into()));
                    }
                    post[a].insert(PlaceId(p as u32));
                }
                _ => return Err(Error::Model("arcs must connect a place and an action".into())),
            }
        }
        let mut m0 = Marking::new();
        for p in initial {
            if p >= np {
                return Err(Error::Model("marked place out of range".into()));
            }
            m0.insert(PlaceId(p as u32));
        }
        let (action_names, labels) = actions.into_iter().unzip();
        Ok(PetriNet { place_names, action_names, labels, pre, post, initial_marking: m0 })
    }

    pub fn n_places(&self) -> usize {
        self.place_names.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.action_names.len() as u32).map(ActionId)
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.place_names.len() as u32).map(PlaceId)
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.place_names[p.index()]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.index()]
    }

    pub fn label(&self, a: ActionId) -> &Label {
        &self.labels[a.index()]
    }

    pub fn preset(&self, a: ActionId) -> &Marking {
        &self.pre[a.index()]
    }

    pub fn postset(&self, a: ActionId) -> &Marking {
        &self.post[a.index()]
    }

    /// Actions consuming from place `p` (its postset as a node).
    pub fn place_postset(&self, p: PlaceId) -> Vec<ActionId> {
        self.actions().filter(|&a| self.pre[a.index()].contains(&p)).collect()
    }

    pub fn enabled(&self, m: &Marking, a: ActionId) -> bool {
        self.pre[a.index()].is_subset(m)
    }

    /// Fires `a` at `m`. Errors when the successor would double-mark a place.
    pub fn fire(&self, m: &Marking, a: ActionId) -> Result<Marking> {
        let mut next: Marking = m.difference(&self.pre[a.index()]).cloned().collect();
        for &p in &self.post[a.index()] {
            if !next.insert(p) {
                return Err(Error::UnsafeNet {
                    marking: self.marking_name_inner(m),
                    action: self.action_name(a).to_string(),
                });
            }
        }
        Ok(next)
    }

    fn marking_name_inner(&self, m: &Marking) -> String {
        let names: Vec<&str> = m.iter().map(|&p| self.place_name(p)).collect();
        names.join(",")
    }

    pub fn marking_name(&self, m: &Marking) -> String {
        format!("{{{}}}", self.marking_name_inner(m))
    }

    /// Breadth-first closure of the firing relation from the initial marking.
    pub fn reachable_markings(&self, cap: usize) -> Result<Vec<Marking>> {
        let mut seen: BTreeSet<Marking> = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(self.initial_marking.clone());
        order.push(self.initial_marking.clone());
        queue.push_back(self.initial_marking.clone());
        while let Some(m) = queue.pop_front() {
            for a in self.actions() {
                if !self.enabled(&m, a) {
                    continue;
                }
                let next = self.fire(&m, a)?;
                if seen.insert(next.clone()) {
                    if order.len() >= cap {
                        return Err(Error::StateExplosion(cap));
                    }
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(order)
    }

    /// The structural independence relation on actions: disjoint
    /// preset/postset neighbourhoods plus a reachable co-enabling marking.
    pub fn independent_actions(&self, reachable: &[Marking]) -> BTreeSet<(ActionId, ActionId)> {
        let mut pairs = BTreeSet::new();
        for a in self.actions() {
            for b in self.actions() {
                if a >= b {
                    continue;
                }
                let na: Marking = self.pre[a.index()].union(&self.post[a.index()]).cloned().collect();
                let nb: Marking = self.pre[b.index()].union(&self.post[b.index()]).cloned().collect();
                if !na.is_disjoint(&nb) {
                    continue;
                }
                let co_enabled = reachable
                    .iter()
                    .any(|m| self.pre[a.index()].is_subset(m) && self.pre[b.index()].is_subset(m));
                if co_enabled {
                    pairs.insert((a, b));
                    pairs.insert((b, a));
                }
            }
        }
        pairs
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ArcEnd {
    Place(usize),
    Action(usize),
}

/// Safety and structural checks over the reachable markings; violations are
/// reported with witnesses.
pub fn validate_net(net: &PetriNet, cap: usize) -> ValidationReport {
    let mut safety = Check::pass("safety");
    let mut finite = Check::pass("finite");
    match net.reachable_markings(cap) {
        Ok(_) => {}
        Err(Error::UnsafeNet { marking, action }) => {
            safety = Check::fail("safety", format!("firing {action} at {{{marking}}}"));
        }
        Err(Error::StateExplosion(n)) => {
            finite = Check::fail("finite", format!("more than {n} reachable markings"));
        }
        Err(e) => {
            safety = Check::fail("safety", e.to_string());
        }
    }
    let mut marked = Check::pass("initial-marking");
    if net.initial_marking.is_empty() {
        marked = Check::fail("initial-marking", "empty initial marking".into());
    }
    ValidationReport { checks: vec![safety, finite, marked], classes: Vec::new() }
}

/// Translates a safe net into a TSI over its reachable markings.
pub fn net_to_tsi(net: &PetriNet, cap: usize) -> Result<Tsi> {
    let markings = net.reachable_markings(cap)?;
    let index: BTreeMap<&Marking, usize> =
        markings.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let state_names: Vec<String> = markings.iter().map(|m| net.marking_name(m)).collect();

    // Transitions are identified by their (source,label,target) triple; a
    // triple may be realized by several net actions, which we remember for
    // deriving independence.
    let mut triples: BTreeMap<(usize, Label, usize), BTreeSet<ActionId>> = BTreeMap::new();
    for (i, m) in markings.iter().enumerate() {
        for a in net.actions() {
            if !net.enabled(m, a) {
                continue;
            }
            let next = net.fire(m, a)?;
            let j = index[&next];
            triples.entry((i, net.label(a).clone(), j)).or_default().insert(a);
        }
    }
    let indep_actions = net.independent_actions(&markings);
    let trans: Vec<((usize, Label, usize), BTreeSet<ActionId>)> = triples.into_iter().collect();
    let mut decls = Vec::new();
    for (k, ((src, label, dst), _)) in trans.iter().enumerate() {
        decls.push((format!("t{k}"), *src, label.clone(), *dst));
    }
    let mut indep = Vec::new();
    for (i, (_, acts_i)) in trans.iter().enumerate() {
        for (j, (_, acts_j)) in trans.iter().enumerate() {
            if i >= j {
                continue;
            }
            let related = acts_i
                .iter()
                .any(|&a| acts_j.iter().any(|&b| indep_actions.contains(&(a, b))));
            if related {
                indep.push((i, j));
            }
        }
    }
    Tsi::build(state_names, 0, decls, indep)
}

// ---------------------------------------------------------------------------
// Text format: `place <id> [marked]`, `action <id> <label>`,
// `arc <from> -> <to>`, `#` comments.

pub fn parse_net(text: &str) -> Result<PetriNet> {
    let mut places: Vec<String> = Vec::new();
    let mut place_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut actions: Vec<(String, Label)> = Vec::new();
    let mut action_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut arcs: Vec<(ArcEnd, ArcEnd)> = Vec::new();
    let mut marked: Vec<usize> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = tokens(content);
        let Some((col, word)) = toks.next() else { continue };
        match word {
            "place" => {
                let (c, name) = toks.next().ok_or_else(|| Error::parse(line, col, "expected place id"))?;
                if place_idx.contains_key(name) || action_idx.contains_key(name) {
                    return Err(Error::parse(line, c, format!("duplicate node {name}")));
                }
                place_idx.insert(name.to_string(), places.len());
                places.push(name.to_string());
                if let Some((c2, flag)) = toks.next() {
                    if flag == "marked" {
                        marked.push(places.len() - 1);
                    } else {
                        return Err(Error::parse(line, c2, format!("unexpected token {flag}")));
                    }
                }
            }
            "action" => {
                let (c, name) = toks.next().ok_or_else(|| Error::parse(line, col, "expected action id"))?;
                let (_, lab) = toks.next().ok_or_else(|| Error::parse(line, col, "expected label"))?;
                if place_idx.contains_key(name) || action_idx.contains_key(name) {
                    return Err(Error::parse(line, c, format!("duplicate node {name}")));
                }
                action_idx.insert(name.to_string(), actions.len());
                actions.push((name.to_string(), Label::new(lab)?));
            }
            "arc" => {
                let (c1, from) = toks.next().ok_or_else(|| Error::parse(line, col, "expected arc source"))?;
                let (c2, arrow) = toks.next().ok_or_else(|| Error::parse(line, col, "expected ->"))?;
                if arrow != "->" {
                    return Err(Error::parse(line, c2, "expected ->"));
                }
                let (c3, to) = toks.next().ok_or_else(|| Error::parse(line, col, "expected arc target"))?;
                let from_end = node_end(&place_idx, &action_idx, from)
                    .ok_or_else(|| Error::parse(line, c1, format!("unknown node {from}")))?;
                let to_end = node_end(&place_idx, &action_idx, to)
                    .ok_or_else(|| Error::parse(line, c3, format!("unknown node {to}")))?;
                arcs.push((from_end, to_end));
            }
            other => return Err(Error::parse(line, col, format!("unknown declaration {other}"))),
        }
    }
    PetriNet::build(places, actions, arcs, marked)
}

fn node_end(
    places: &BTreeMap<String, usize>,
    actions: &BTreeMap<String, usize>,
    name: &str,
) -> Option<ArcEnd> {
    if let Some(&p) = places.get(name) {
        Some(ArcEnd::Place(p))
    } else {
        actions.get(name).map(|&a| ArcEnd::Action(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tsi::validate_tsi;

    fn par_ab_net() -> PetriNet {
        let text = "\
place p1 marked
place p2 marked
place q1
place q2
action a a
action b b
arc p1 -> a
arc p2 -> b
arc a -> q1
arc b -> q2
";
        parse_net(text).unwrap()
    }

    #[test]
    fn par_net_becomes_the_diamond() {
        let tsi = net_to_tsi(&par_ab_net(), 1000).unwrap();
        assert_eq!(tsi.n_states(), 4);
        assert_eq!(tsi.n_transitions(), 4);
        let report = validate_tsi(&tsi);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.classes.len(), 2);
        // each action of the net becomes two TSI transitions
        for class in &report.classes {
            assert_eq!(class.len(), 2);
        }
    }

    #[test]
    fn single_action_net() {
        let net = fixtures::single_net();
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert_eq!(tsi.n_states(), 2);
        assert_eq!(tsi.n_transitions(), 1);
        assert_eq!(tsi.indep_pairs().count(), 0);
    }

    #[test]
    fn choice_then_c_net_reachability() {
        // (a+b).c by hand: markings {p}, {q} (after either branch), {r}
        let text = "\
place p marked
place q
place r
action a a
action b b
action c c
arc p -> a
arc p -> b
arc a -> q
arc b -> q
arc q -> c
arc c -> r
";
        let net = parse_net(text).unwrap();
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert_eq!(tsi.n_states(), 3);
        assert_eq!(tsi.indep_pairs().count(), 0);
        // a and b fire to the same marking and carry different labels, so the
        // TSI keeps them as distinct transitions
        assert_eq!(tsi.n_transitions(), 3);
    }

    #[test]
    fn five_state_sequential_choice() {
        // (a+b).c with separate branch places: 5 markings, I empty
        let text = "\
place p marked
place qa
place qb
place ra
place rb
action a a
action b b
action ca c
action cb c
arc p -> a
arc p -> b
arc a -> qa
arc b -> qb
arc qa -> ca
arc qb -> cb
arc ca -> ra
arc cb -> rb
";
        let net = parse_net(text).unwrap();
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert_eq!(tsi.n_states(), 5);
        assert_eq!(tsi.indep_pairs().count(), 0);
    }

    #[test]
    fn double_marking_detected() {
        let text = "\
place p marked
place q marked
action a a
action b b
arc p -> a
arc a -> q
arc p -> b
arc b -> q
";
        let net = parse_net(text).unwrap();
        let report = validate_net(&net, 1000);
        assert!(!report.check("safety").unwrap().ok());
        assert!(matches!(net_to_tsi(&net, 1000), Err(Error::UnsafeNet { .. })));
    }

    #[test]
    fn fixture_nets_validate() {
        for net in [
            fixtures::choicejoin2_net(),
            fixtures::choicejoin3_net(),
            fixtures::confusion_sym_net(),
            fixtures::confusion_asym_net(),
            fixtures::fc_merge_net(),
            fixtures::fc_branch_net(),
        ] {
            assert!(validate_net(&net, 100_000).all_pass());
            let tsi = net_to_tsi(&net, 100_000).unwrap();
            assert!(validate_tsi(&tsi).all_pass());
        }
    }
}
