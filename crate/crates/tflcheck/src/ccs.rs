//! A finite CCS fragment: guarded recursion, parallel composition only at
//! the root, no communication (parallel components interleave
//! independently). Programs compile to safe nets with one sequential
//! component per parallel operand, and induce a syntactic quotient oracle
//! for folding.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::net::{ArcEnd, PetriNet};
use crate::tsi::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CcsTerm {
    Nil,
    /// Prefix with a unique occurrence id (stable across canonicalisation).
    Prefix(Label, u32, Box<CcsTerm>),
    Choice(Vec<CcsTerm>),
    Par(Vec<CcsTerm>),
    Name(String),
}

#[derive(Debug, Clone)]
pub struct CcsProgram {
    pub defs: BTreeMap<String, CcsTerm>,
    pub root: CcsTerm,
    next_occ: u32,
}

impl CcsTerm {
    /// Canonical rendering; occurrence ids are ignored so alpha-equal terms
    /// render equally.
    pub fn render(&self) -> String {
        match self {
            CcsTerm::Nil => "0".into(),
            CcsTerm::Prefix(l, _, k) => {
                let body = k.render();
                if matches!(k.as_ref(), CcsTerm::Choice(_) | CcsTerm::Par(_)) {
                    format!("{l}.({body})")
                } else {
                    format!("{l}.{body}")
                }
            }
            CcsTerm::Choice(ops) => {
                let parts: Vec<String> = ops.iter().map(|o| o.render()).collect();
                parts.join("+")
            }
            CcsTerm::Par(ops) => {
                let parts: Vec<String> = ops
                    .iter()
                    .map(|o| {
                        let r = o.render();
                        if matches!(o, CcsTerm::Choice(_)) {
                            format!("({r})")
                        } else {
                            r
                        }
                    })
                    .collect();
                parts.join("|")
            }
            CcsTerm::Name(n) => n.clone(),
        }
    }

    /// Flattens nested associative operators, sorts operand lists, and drops
    /// duplicate choice branches. Idempotent.
    pub fn canonical(&self) -> CcsTerm {
        match self {
            CcsTerm::Nil => CcsTerm::Nil,
            CcsTerm::Name(n) => CcsTerm::Name(n.clone()),
            CcsTerm::Prefix(l, o, k) => CcsTerm::Prefix(l.clone(), *o, Box::new(k.canonical())),
            CcsTerm::Choice(ops) => {
                let mut flat = Vec::new();
                for op in ops {
                    match op.canonical() {
                        CcsTerm::Choice(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort_by_key(|t| t.render());
                flat.dedup_by_key(|t| t.render());
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    CcsTerm::Choice(flat)
                }
            }
            CcsTerm::Par(ops) => {
                let mut flat = Vec::new();
                for op in ops {
                    match op.canonical() {
                        CcsTerm::Par(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort_by_key(|t| t.render());
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    CcsTerm::Par(flat)
                }
            }
        }
    }

    fn prefixes<'a>(&'a self, out: &mut Vec<(&'a Label, u32)>) {
        match self {
            CcsTerm::Prefix(l, o, k) => {
                out.push((l, *o));
                k.prefixes(out);
            }
            CcsTerm::Choice(ops) | CcsTerm::Par(ops) => {
                for op in ops {
                    op.prefixes(out);
                }
            }
            _ => {}
        }
    }

    fn names<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            CcsTerm::Name(n) => {
                out.insert(n);
            }
            CcsTerm::Prefix(_, _, k) => k.names(out),
            CcsTerm::Choice(ops) | CcsTerm::Par(ops) => {
                for op in ops {
                    op.names(out);
                }
            }
            CcsTerm::Nil => {}
        }
    }

    fn has_par(&self) -> bool {
        match self {
            CcsTerm::Par(_) => true,
            CcsTerm::Prefix(_, _, k) => k.has_par(),
            CcsTerm::Choice(ops) => ops.iter().any(|o| o.has_par()),
            _ => false,
        }
    }
}

impl CcsProgram {
    /// The top-level parallel components of the root.
    pub fn components(&self) -> Vec<CcsTerm> {
        match &self.root {
            CcsTerm::Par(ops) => ops.clone(),
            other => vec![other.clone()],
        }
    }

    /// Definition names reachable from a term.
    fn reachable_defs(&self, term: &CcsTerm) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut todo: Vec<String> = {
            let mut names = BTreeSet::new();
            term.names(&mut names);
            names.into_iter().map(String::from).collect()
        };
        while let Some(n) = todo.pop() {
            if !out.insert(n.clone()) {
                continue;
            }
            if let Some(def) = self.defs.get(&n) {
                let mut names = BTreeSet::new();
                def.names(&mut names);
                todo.extend(names.into_iter().map(String::from));
            }
        }
        out
    }

    /// The immediately fireable prefixes of a sequential term, resolving
    /// names through choices. Guarded recursion makes this terminate.
    pub fn heads(&self, term: &CcsTerm) -> Vec<(Label, u32, CcsTerm)> {
        match term {
            CcsTerm::Nil => Vec::new(),
            CcsTerm::Prefix(l, o, k) => vec![(l.clone(), *o, k.as_ref().clone())],
            CcsTerm::Choice(ops) => ops.iter().flat_map(|op| self.heads(op)).collect(),
            CcsTerm::Name(n) => match self.defs.get(n) {
                Some(def) => self.heads(def),
                None => Vec::new(),
            },
            CcsTerm::Par(_) => Vec::new(),
        }
    }

    /// Resolves top-level names so that a residual and its one-step unfolding
    /// share a canonical form.
    pub fn resolve(&self, term: &CcsTerm) -> CcsTerm {
        let mut t = term.clone();
        let mut guard = 0;
        loop {
            match t {
                CcsTerm::Name(ref n) => {
                    match self.defs.get(n) {
                        Some(def) => t = def.clone(),
                        None => return t,
                    }
                    guard += 1;
                    if guard > self.defs.len() + 1 {
                        return t;
                    }
                }
                CcsTerm::Choice(ops) => {
                    let resolved: Vec<CcsTerm> = ops.iter().map(|o| self.resolve(o)).collect();
                    return CcsTerm::Choice(resolved).canonical();
                }
                other => return other,
            }
        }
    }

    pub fn canon_residual(&self, term: &CcsTerm) -> String {
        self.resolve(term).canonical().render()
    }

    fn validate(&self) -> Result<()> {
        // every referenced name is defined
        let mut all_names = BTreeSet::new();
        self.root.names(&mut all_names);
        for def in self.defs.values() {
            def.names(&mut all_names);
        }
        for n in &all_names {
            if !self.defs.contains_key(*n) {
                return Err(Error::Parse { line: 0, col: 0, msg: format!("undefined name {n}") });
            }
        }
        // parallel composition only at the root layer
        for (name, def) in &self.defs {
            if def.has_par() {
                return Err(Error::FragmentViolation(format!(
                    "parallel-under-recursion: definition {name} contains |"
                )));
            }
        }
        for comp in self.components() {
            if comp.has_par() {
                return Err(Error::FragmentViolation(
                    "parallel-under-recursion: nested | below the root layer".into(),
                ));
            }
        }
        // guardedness: no definition may reach itself without a prefix
        for name in self.defs.keys() {
            let mut visiting = BTreeSet::new();
            self.check_guarded(name, &mut visiting)?;
        }
        Ok(())
    }

    fn check_guarded(&self, name: &str, visiting: &mut BTreeSet<String>) -> Result<()> {
        if !visiting.insert(name.to_string()) {
            return Err(Error::FragmentViolation(format!("unguarded recursion through {name}")));
        }
        fn unguarded<'a>(term: &'a CcsTerm, out: &mut BTreeSet<&'a str>) {
            match term {
                CcsTerm::Name(n) => {
                    out.insert(n);
                }
                CcsTerm::Choice(ops) | CcsTerm::Par(ops) => {
                    for op in ops {
                        unguarded(op, out);
                    }
                }
                // a prefix guards everything below it
                CcsTerm::Prefix(..) | CcsTerm::Nil => {}
            }
        }
        let mut refs = BTreeSet::new();
        if let Some(def) = self.defs.get(name) {
            unguarded(def, &mut refs);
        }
        for r in refs {
            self.check_guarded(r, visiting)?;
        }
        visiting.remove(name);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing. One `Name = term` per line, `root = term` required. Precedence:
// `.` binds tighter than `+`, which binds tighter than `|`.

pub fn parse_ccs(text: &str) -> Result<CcsProgram> {
    let mut defs = BTreeMap::new();
    let mut root = None;
    let mut next_occ = 0u32;
    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let toks: Vec<(usize, String)> =
            ccs_tokens(content).map(|(c, s)| (c, s.to_string())).collect();
        if toks.len() < 3 || toks[1].1 != "=" {
            return Err(Error::parse(line, 1, "expected `name = term`"));
        }
        let name = toks[0].1.clone();
        let mut pos = 2;
        let term = parse_par(&toks, &mut pos, line, &mut next_occ)?;
        if pos != toks.len() {
            return Err(Error::parse(line, toks[pos].0, "trailing input after term"));
        }
        if name == "root" {
            if root.is_some() {
                return Err(Error::parse(line, 1, "second root definition"));
            }
            root = Some(term);
        } else {
            if defs.contains_key(&name) {
                return Err(Error::parse(line, 1, format!("duplicate definition {name}")));
            }
            defs.insert(name, term);
        }
    }
    let root = root.ok_or_else(|| Error::parse(0, 0, "missing root definition"))?;
    let program = CcsProgram { defs, root, next_occ };
    program.validate()?;
    Ok(program)
}

fn ccs_tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    // split on whitespace and the single-char operators
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if "=+|().".contains(c) {
            out.push((i + 1, &line[i..i + 1]));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let ch = bytes[i] as char;
                if ch.is_whitespace() || "=+|().".contains(ch) {
                    break;
                }
                i += 1;
            }
            out.push((start + 1, &line[start..i]));
        }
    }
    out.into_iter()
}

fn parse_par(toks: &[(usize, String)], pos: &mut usize, line: usize, occ: &mut u32) -> Result<CcsTerm> {
    let mut ops = vec![parse_choice(toks, pos, line, occ)?];
    while *pos < toks.len() && toks[*pos].1 == "|" {
        *pos += 1;
        ops.push(parse_choice(toks, pos, line, occ)?);
    }
    Ok(if ops.len() == 1 { ops.pop().unwrap() } else { CcsTerm::Par(ops) })
}

fn parse_choice(toks: &[(usize, String)], pos: &mut usize, line: usize, occ: &mut u32) -> Result<CcsTerm> {
    let mut ops = vec![parse_prefix(toks, pos, line, occ)?];
    while *pos < toks.len() && toks[*pos].1 == "+" {
        *pos += 1;
        ops.push(parse_prefix(toks, pos, line, occ)?);
    }
    Ok(if ops.len() == 1 { ops.pop().unwrap() } else { CcsTerm::Choice(ops) })
}

fn parse_prefix(toks: &[(usize, String)], pos: &mut usize, line: usize, occ: &mut u32) -> Result<CcsTerm> {
    if *pos >= toks.len() {
        return Err(Error::parse(line, 0, "expected a term"));
    }
    let (col, word) = (toks[*pos].0, toks[*pos].1.clone());
    match word.as_str() {
        "0" => {
            *pos += 1;
            Ok(CcsTerm::Nil)
        }
        "(" => {
            *pos += 1;
            let inner = parse_par(toks, pos, line, occ)?;
            if *pos >= toks.len() || toks[*pos].1 != ")" {
                return Err(Error::parse(line, col, "missing )"));
            }
            *pos += 1;
            Ok(inner)
        }
        w if w.chars().all(|c| c.is_alphanumeric() || c == '_') => {
            *pos += 1;
            if *pos < toks.len() && toks[*pos].1 == "." {
                *pos += 1;
                let body = parse_prefix(toks, pos, line, occ)?;
                let id = *occ;
                *occ += 1;
                Ok(CcsTerm::Prefix(Label(w.to_string()), id, Box::new(body)))
            } else {
                Ok(CcsTerm::Name(w.to_string()))
            }
        }
        other => Err(Error::parse(line, col, format!("unexpected token {other}"))),
    }
}

// ---------------------------------------------------------------------------
// Relabelling: eliminate nondeterministic choices and auto-concurrency by
// suffixing clashing labels with distinct indices. The emitted map sends
// each fresh label back to the original one.

pub struct Relabelling {
    pub program: CcsProgram,
    /// Inverse of the injective relabelling: new label -> original label.
    pub theta_inv: BTreeMap<Label, Label>,
}

pub fn relabel_theta(program: &CcsProgram) -> Result<Relabelling> {
    let mut prog = CcsProgram {
        defs: program.defs.iter().map(|(k, v)| (k.clone(), v.canonical())).collect(),
        root: program.root.canonical(),
        next_occ: program.next_occ,
    };
    let comps = prog.components();
    let n_comps = comps.len();

    // occurrences of each label, per component (defs shared between
    // components contribute to each of them)
    let mut occs_by_comp: Vec<Vec<(Label, u32)>> = Vec::new();
    for comp in &comps {
        let mut occs = Vec::new();
        comp.prefixes(&mut occs);
        for d in prog.reachable_defs(comp) {
            prog.defs[&d].prefixes(&mut occs);
        }
        occs_by_comp.push(occs.into_iter().map(|(l, o)| (l.clone(), o)).collect());
    }

    // intra-component clashes: heads of any syntactic choice sharing a label
    let mut intra_clash: Vec<BTreeSet<Label>> = vec![BTreeSet::new(); n_comps];
    for (i, comp) in comps.iter().enumerate() {
        let mut choice_nodes: Vec<&CcsTerm> = Vec::new();
        collect_choices(comp, &mut choice_nodes);
        let reach = prog.reachable_defs(comp);
        for d in &reach {
            collect_choices(&prog.defs[d], &mut choice_nodes);
        }
        for ch in choice_nodes {
            let heads = prog.heads(ch);
            let mut seen: BTreeMap<Label, u32> = BTreeMap::new();
            for (l, o, _) in heads {
                match seen.get(&l) {
                    Some(&other) if other != o => {
                        intra_clash[i].insert(l.clone());
                    }
                    _ => {
                        seen.insert(l, o);
                    }
                }
            }
        }
    }

    // cross-component clashes: a label visible in two components
    let all_labels: BTreeSet<Label> =
        occs_by_comp.iter().flatten().map(|(l, _)| l.clone()).collect();
    let mut clashing: BTreeSet<Label> = BTreeSet::new();
    for l in &all_labels {
        let comps_with = occs_by_comp.iter().filter(|os| os.iter().any(|(m, _)| m == l)).count();
        if comps_with > 1 {
            clashing.insert(l.clone());
        }
    }
    for set in &intra_clash {
        clashing.extend(set.iter().cloned());
    }

    if clashing.is_empty() {
        return Ok(Relabelling { program: prog, theta_inv: BTreeMap::new() });
    }

    // assign fresh labels per (component, occurrence)
    let mut theta_inv = BTreeMap::new();
    let mut counters: BTreeMap<Label, u32> = BTreeMap::new();
    let fresh = |base: &Label, counters: &mut BTreeMap<Label, u32>, theta_inv: &mut BTreeMap<Label, Label>| {
        loop {
            let c = counters.entry(base.clone()).or_insert(0);
            *c += 1;
            let cand = Label(format!("{}{}", base.0, c));
            if !all_labels.contains(&cand) && !theta_inv.contains_key(&cand) {
                theta_inv.insert(cand.clone(), base.clone());
                return cand;
            }
        }
    };
    // renames[(comp, occ)] = new label
    let mut renames: BTreeMap<(usize, u32), Label> = BTreeMap::new();
    for l in &clashing {
        for (i, occs) in occs_by_comp.iter().enumerate() {
            let mine: Vec<u32> = occs.iter().filter(|(m, _)| m == l).map(|&(_, o)| o).collect();
            if mine.is_empty() {
                continue;
            }
            if intra_clash[i].contains(l) {
                for o in mine {
                    let nl = fresh(l, &mut counters, &mut theta_inv);
                    renames.insert((i, o), nl);
                }
            } else {
                let nl = fresh(l, &mut counters, &mut theta_inv);
                for o in mine {
                    renames.insert((i, o), nl.clone());
                }
            }
        }
    }

    // apply per component; clone reachable defs when a component renames
    let mut new_defs: BTreeMap<String, CcsTerm> = prog.defs.clone();
    let mut new_comps = Vec::new();
    for (i, comp) in comps.iter().enumerate() {
        let renames_i: BTreeMap<u32, Label> = renames
            .iter()
            .filter(|((c, _), _)| *c == i)
            .map(|((_, o), l)| (*o, l.clone()))
            .collect();
        if renames_i.is_empty() {
            new_comps.push(comp.clone());
            continue;
        }
        let reach = prog.reachable_defs(comp);
        let suffix: BTreeMap<String, String> = if reach.is_empty() {
            BTreeMap::new()
        } else {
            reach.iter().map(|d| (d.clone(), format!("{d}__{i}"))).collect()
        };
        for d in &reach {
            let cloned = apply_renames(&prog.defs[d], &renames_i, &suffix);
            new_defs.insert(suffix[d].clone(), cloned);
        }
        new_comps.push(apply_renames(comp, &renames_i, &suffix));
    }
    let root = if new_comps.len() == 1 {
        new_comps.pop().unwrap()
    } else {
        CcsTerm::Par(new_comps)
    };
    prog.defs = new_defs;
    prog.root = root.canonical();
    Ok(Relabelling { program: prog, theta_inv })
}

fn collect_choices<'a>(term: &'a CcsTerm, out: &mut Vec<&'a CcsTerm>) {
    match term {
        CcsTerm::Choice(ops) => {
            out.push(term);
            for op in ops {
                collect_choices(op, out);
            }
        }
        CcsTerm::Prefix(_, _, k) => collect_choices(k, out),
        CcsTerm::Par(ops) => {
            for op in ops {
                collect_choices(op, out);
            }
        }
        _ => {}
    }
}

fn apply_renames(term: &CcsTerm, renames: &BTreeMap<u32, Label>, suffix: &BTreeMap<String, String>) -> CcsTerm {
    match term {
        CcsTerm::Nil => CcsTerm::Nil,
        CcsTerm::Prefix(l, o, k) => {
            let nl = renames.get(o).cloned().unwrap_or_else(|| l.clone());
            CcsTerm::Prefix(nl, *o, Box::new(apply_renames(k, renames, suffix)))
        }
        CcsTerm::Choice(ops) => {
            CcsTerm::Choice(ops.iter().map(|o| apply_renames(o, renames, suffix)).collect())
        }
        CcsTerm::Par(ops) => {
            CcsTerm::Par(ops.iter().map(|o| apply_renames(o, renames, suffix)).collect())
        }
        CcsTerm::Name(n) => CcsTerm::Name(suffix.get(n).cloned().unwrap_or_else(|| n.clone())),
    }
}

// ---------------------------------------------------------------------------
// Compilation to a safe net: one state-machine component per parallel
// operand; places are canonical residuals, choices share their input place.

pub fn ccs_to_net(program: &CcsProgram) -> Result<PetriNet> {
    let comps = program.components();
    let mut place_names: Vec<String> = Vec::new();
    let mut place_idx: BTreeMap<String, usize> = BTreeMap::new();
    let mut actions: Vec<(String, Label)> = Vec::new();
    let mut arcs: Vec<(ArcEnd, ArcEnd)> = Vec::new();
    let mut marked: Vec<usize> = Vec::new();

    for (i, comp) in comps.iter().enumerate() {
        let intern = |key: String, place_names: &mut Vec<String>, place_idx: &mut BTreeMap<String, usize>| {
            if let Some(&p) = place_idx.get(&key) {
                return p;
            }
            let p = place_names.len();
            place_idx.insert(key.clone(), p);
            place_names.push(key);
            p
        };
        let start = program.resolve(comp).canonical();
        let start_key = format!("c{i}:{}", start.render());
        let p0 = intern(start_key.clone(), &mut place_names, &mut place_idx);
        marked.push(p0);
        let mut todo = vec![start];
        let mut seen: BTreeSet<String> = [start_key].into_iter().collect();
        while let Some(term) = todo.pop() {
            let from_key = format!("c{i}:{}", term.render());
            let from = place_idx[&from_key];
            for (label, _occ, cont) in program.heads(&term) {
                let next = program.resolve(&cont).canonical();
                let to_key = format!("c{i}:{}", next.render());
                let to = intern(to_key.clone(), &mut place_names, &mut place_idx);
                let a = actions.len();
                actions.push((format!("t{a}"), label));
                arcs.push((ArcEnd::Place(from), ArcEnd::Action(a)));
                arcs.push((ArcEnd::Action(a), ArcEnd::Place(to)));
                if seen.insert(to_key) {
                    todo.push(next);
                }
            }
        }
    }
    PetriNet::build(place_names, actions, arcs, marked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::net::{net_to_tsi, validate_net};
    use crate::tsi::validate_tsi;

    #[test]
    fn parse_par_program() {
        let p = fixtures::par_ab_ccs();
        assert_eq!(p.components().len(), 2);
    }

    #[test]
    fn loop_program_accepted() {
        let p = fixtures::loop_ccs();
        assert_eq!(p.canon_residual(&p.root), "a.X");
    }

    #[test]
    fn unguarded_recursion_rejected() {
        let err = parse_ccs("X = X + a.0\nroot = X\n").unwrap_err();
        assert!(matches!(err, Error::FragmentViolation(_)), "{err}");
    }

    #[test]
    fn parallel_under_recursion_rejected() {
        let err = parse_ccs("X = a.X | b.0\nroot = X\n").unwrap_err();
        assert!(matches!(err, Error::FragmentViolation(_)), "{err}");
        let err2 = parse_ccs("root = a.(b.0 | c.0)\n").unwrap_err();
        assert!(matches!(err2, Error::FragmentViolation(_)), "{err2}");
    }

    #[test]
    fn undefined_name_rejected() {
        assert!(parse_ccs("root = X\n").is_err());
    }

    #[test]
    fn relabel_choice_clash() {
        let p = parse_ccs("root = a.0 + a.b.0\n").unwrap();
        let r = relabel_theta(&p).unwrap();
        assert_eq!(r.theta_inv.len(), 2);
        for orig in r.theta_inv.values() {
            assert_eq!(orig, &Label("a".into()));
        }
        // the b prefix is untouched
        let mut occs = Vec::new();
        r.program.root.prefixes(&mut occs);
        let labels: BTreeSet<String> = occs.iter().map(|(l, _)| l.0.clone()).collect();
        assert!(labels.contains("b"));
        assert!(!labels.contains("a"));
    }

    #[test]
    fn relabel_auto_concurrency() {
        let p = parse_ccs("root = a.0 | a.0\n").unwrap();
        let r = relabel_theta(&p).unwrap();
        let comps = r.program.components();
        assert_eq!(comps.len(), 2);
        let mut labels = BTreeSet::new();
        for c in &comps {
            let mut occs = Vec::new();
            c.prefixes(&mut occs);
            for (l, _) in occs {
                labels.insert(l.0.clone());
            }
        }
        assert_eq!(labels.len(), 2);
        assert_eq!(r.theta_inv.len(), 2);
    }

    #[test]
    fn clean_program_keeps_identity() {
        let p = fixtures::two_loops_ccs();
        let r = relabel_theta(&p).unwrap();
        assert!(r.theta_inv.is_empty());
    }

    #[test]
    fn shared_definition_is_cloned_per_component() {
        let p = parse_ccs("X = a.X\nroot = X | X\n").unwrap();
        let r = relabel_theta(&p).unwrap();
        assert_eq!(r.theta_inv.len(), 2);
        let comps = r.program.components();
        let r0 = r.program.canon_residual(&comps[0]);
        let r1 = r.program.canon_residual(&comps[1]);
        assert_ne!(r0, r1);
    }

    #[test]
    fn par_program_compiles_to_diamond() {
        let p = fixtures::par_ab_ccs();
        let net = ccs_to_net(&relabel_theta(&p).unwrap().program).unwrap();
        assert!(validate_net(&net, 1000).all_pass());
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert_eq!(tsi.n_states(), 4);
        assert_eq!(tsi.n_transitions(), 4);
        assert!(validate_tsi(&tsi).all_pass());
        assert!(tsi.indep_pairs().count() > 0);
    }

    #[test]
    fn seq_choice_compiles() {
        let p = fixtures::seq_choice_ccs();
        let net = ccs_to_net(&relabel_theta(&p).unwrap().program).unwrap();
        // residuals: the root choice, c.0, 0 -- with the two branches sharing
        // their input place
        assert_eq!(net.n_places(), 3);
        assert_eq!(net.n_actions(), 3);
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert!(validate_tsi(&tsi).all_pass());
        assert_eq!(tsi.indep_pairs().count(), 0);
    }

    #[test]
    fn loop_compiles_to_self_loop() {
        let p = fixtures::loop_ccs();
        let net = ccs_to_net(&relabel_theta(&p).unwrap().program).unwrap();
        assert_eq!(net.n_places(), 1);
        assert_eq!(net.n_actions(), 1);
        let tsi = net_to_tsi(&net, 1000).unwrap();
        assert_eq!(tsi.n_states(), 1);
        assert_eq!(tsi.n_transitions(), 1);
    }

    #[test]
    fn canonicalization_is_idempotent_and_sorts() {
        let p = parse_ccs("root = b.0 + a.0 + a.0\n").unwrap();
        let c = p.root.canonical();
        assert_eq!(c.render(), "a.0+b.0");
        assert_eq!(c.canonical(), c);
    }
}
