//! Seeded random model and formula generators for the test corpus, plus a
//! small exact isomorphism check between systems.

use std::collections::BTreeMap;

use rand::Rng;

use crate::logic::Formula;
use crate::net::{ArcEnd, PetriNet};
use crate::tsi::{Label, Tsi};

const LABELS: [&str; 4] = ["a", "b", "c", "d"];

/// A random rooted LTS (a TSI with empty independence; the axioms hold
/// vacuously). Every state is reachable from the root by construction.
pub fn random_lts<R: Rng>(rng: &mut R, max_states: usize, max_out: usize) -> Tsi {
    let n = rng.gen_range(1..=max_states);
    let state_names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut transitions = Vec::new();
    let mut triples = std::collections::BTreeSet::new();
    // spanning edges keep everything reachable
    for i in 1..n {
        let src = rng.gen_range(0..i);
        let label = LABELS[rng.gen_range(0..LABELS.len())];
        if triples.insert((src, label.to_string(), i)) {
            transitions.push((format!("t{}", transitions.len()), src, Label(label.into()), i));
        }
    }
    let extra = rng.gen_range(0..=max_out * n / 2);
    for _ in 0..extra {
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        let label = LABELS[rng.gen_range(0..LABELS.len())];
        if triples.insert((src, label.to_string(), dst)) {
            transitions.push((format!("t{}", transitions.len()), src, Label(label.into()), dst));
        }
    }
    Tsi::build(state_names, 0, transitions, Vec::new()).expect("random LTS")
}

/// A random acyclic rooted LTS: edges only go from lower to higher indices.
pub fn random_acyclic_lts<R: Rng>(rng: &mut R, max_states: usize, max_out: usize) -> Tsi {
    let n = rng.gen_range(1..=max_states);
    let state_names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut transitions = Vec::new();
    let mut triples = std::collections::BTreeSet::new();
    for i in 1..n {
        let src = rng.gen_range(0..i);
        let label = LABELS[rng.gen_range(0..LABELS.len())];
        if triples.insert((src, label.to_string(), i)) {
            transitions.push((format!("t{}", transitions.len()), src, Label(label.into()), i));
        }
    }
    let extra = rng.gen_range(0..=max_out * n / 2);
    for _ in 0..extra {
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        if src >= dst {
            continue;
        }
        let label = LABELS[rng.gen_range(0..LABELS.len())];
        if triples.insert((src, label.to_string(), dst)) {
            transitions.push((format!("t{}", transitions.len()), src, Label(label.into()), dst));
        }
    }
    Tsi::build(state_names, 0, transitions, Vec::new()).expect("random acyclic LTS")
}

/// A random safe net built from sequential chains over a shared label pool;
/// its reachability TSI carries genuine independence. Retries until the
/// translation is safe and within the state bound.
pub fn random_net_tsi<R: Rng>(rng: &mut R, max_states: usize) -> Tsi {
    loop {
        let n_comp = rng.gen_range(1..=3);
        let mut places = Vec::new();
        let mut actions: Vec<(String, Label)> = Vec::new();
        let mut arcs = Vec::new();
        let mut marked = Vec::new();
        for c in 0..n_comp {
            let len = rng.gen_range(1..=3);
            let branch = rng.gen_range(1..=2);
            let start = places.len();
            places.push(format!("p{c}_0"));
            marked.push(start);
            for i in 0..len {
                let here = start + i;
                places.push(format!("p{c}_{}", i + 1));
                for _ in 0..branch {
                    let label = LABELS[rng.gen_range(0..LABELS.len())];
                    let a = actions.len();
                    actions.push((format!("t{a}"), Label(label.into())));
                    arcs.push((ArcEnd::Place(here), ArcEnd::Action(a)));
                    arcs.push((ArcEnd::Action(a), ArcEnd::Place(here + 1)));
                }
            }
        }
        let net = PetriNet::build(places, actions, arcs, marked).expect("random net");
        match crate::net::net_to_tsi(&net, max_states) {
            Ok(tsi) => return tsi,
            Err(_) => continue,
        }
    }
}

/// A random acyclic TSI with independence, built from an acyclic random net.
pub fn random_acyclic_tsi<R: Rng>(rng: &mut R, max_states: usize) -> Tsi {
    // the chain construction above never revisits a marking
    random_net_tsi(rng, max_states)
}

/// A random acyclic Xi system: a free-choice net of parallel chains whose
/// components draw from disjoint label pools (no auto-concurrency) and whose
/// per-place branches carry distinct labels (deterministic choice).
pub fn random_xi_tsi<R: Rng>(rng: &mut R, max_states: usize) -> Tsi {
    let pools: [&[&str]; 2] = [&["a", "b"], &["c", "d"]];
    loop {
        let n_comp = rng.gen_range(1..=2);
        let mut places = Vec::new();
        let mut actions: Vec<(String, Label)> = Vec::new();
        let mut arcs = Vec::new();
        let mut marked = Vec::new();
        for (c, &pool) in pools.iter().enumerate().take(n_comp) {
            let len = rng.gen_range(1..=2);
            let start = places.len();
            places.push(format!("p{c}_0"));
            marked.push(start);
            for i in 0..len {
                let here = start + i;
                places.push(format!("p{c}_{}", i + 1));
                let branch = rng.gen_range(1..=pool.len());
                for (k, label) in pool.iter().take(branch).enumerate() {
                    let _ = k;
                    let a = actions.len();
                    actions.push((format!("t{a}"), Label((*label).into())));
                    arcs.push((ArcEnd::Place(here), ArcEnd::Action(a)));
                    arcs.push((ArcEnd::Action(a), ArcEnd::Place(here + 1)));
                }
            }
        }
        let net = PetriNet::build(places, actions, arcs, marked).expect("random xi net");
        if let Ok(tsi) = crate::net::net_to_tsi(&net, max_states) {
            if tsi.is_acyclic() && crate::classify::is_xi_system(&tsi).is_ok() {
                return tsi;
            }
        }
    }
}

/// An isomorphic copy under a random state permutation and fresh names;
/// equivalent to the original under every relation.
pub fn shuffled_copy<R: Rng>(rng: &mut R, tsi: &Tsi) -> Tsi {
    let n = tsi.n_states();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut state_names = vec![String::new(); n];
    for (old, &new) in perm.iter().enumerate() {
        state_names[new] = format!("r{old}");
    }
    let mut order: Vec<usize> = (0..tsi.n_transitions()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut tpos = vec![0usize; tsi.n_transitions()];
    let mut transitions = Vec::new();
    for (k, &ti) in order.iter().enumerate() {
        let t = crate::tsi::TransId(ti as u32);
        tpos[ti] = k;
        transitions.push((
            format!("u{k}"),
            perm[tsi.src(t).index()],
            tsi.label(t).clone(),
            perm[tsi.dst(t).index()],
        ));
    }
    let indep: Vec<(usize, usize)> = tsi
        .indep_pairs()
        .map(|&(a, b)| (tpos[a.index()], tpos[b.index()]))
        .collect();
    Tsi::build(state_names, perm[tsi.initial().index()], transitions, indep)
        .expect("shuffled copy stays well-formed")
}

pub struct FormulaOptions {
    pub max_depth: usize,
    pub allow_otimes: bool,
    pub allow_causal: bool,
    pub allow_fixpoints: bool,
}

/// A random closed formula in positive normal form over the given alphabet.
pub fn random_formula<R: Rng>(rng: &mut R, alphabet: &[Label], opts: &FormulaOptions) -> Formula {
    let mut counter = 0;
    gen_formula(rng, alphabet, opts, opts.max_depth, &mut Vec::new(), &mut counter)
}

fn gen_formula<R: Rng>(
    rng: &mut R,
    alphabet: &[Label],
    opts: &FormulaOptions,
    depth: usize,
    bound: &mut Vec<String>,
    counter: &mut usize,
) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.18);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => Formula::Tt,
            1 => Formula::Ff,
            _ if !bound.is_empty() => Formula::Var(bound[rng.gen_range(0..bound.len())].clone()),
            _ => Formula::Tt,
        };
    }
    let label = alphabet[rng.gen_range(0..alphabet.len())].clone();
    let max_kind = if opts.allow_fixpoints { 10 } else { 8 };
    loop {
        match rng.gen_range(0..max_kind) {
            0 => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                let b = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return Formula::and(a, b);
            }
            1 => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                let b = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return Formula::or(a, b);
            }
            2 | 3 => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return Formula::dia(label.as_str(), a);
            }
            4 | 5 => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return Formula::boxm(label.as_str(), a);
            }
            6 if opts.allow_causal => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return match rng.gen_range(0..4) {
                    0 => Formula::DiaC(label, Box::new(a)),
                    1 => Formula::DiaNc(label, Box::new(a)),
                    2 => Formula::BoxC(label, Box::new(a)),
                    _ => Formula::BoxNc(label, Box::new(a)),
                };
            }
            7 if opts.allow_otimes => {
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                return if rng.gen_bool(0.5) {
                    Formula::dia_co(a)
                } else {
                    Formula::box_co(a)
                };
            }
            8 | 9 => {
                *counter += 1;
                let var = format!("V{counter}");
                bound.push(var.clone());
                let a = gen_formula(rng, alphabet, opts, depth - 1, bound, counter);
                bound.pop();
                return if rng.gen_bool(0.5) {
                    Formula::Mu(var, Box::new(a))
                } else {
                    Formula::Nu(var, Box::new(a))
                };
            }
            _ => continue,
        }
    }
}

/// Exact isomorphism of two systems: a bijection on states preserving the
/// root, the transitions with labels, and independence. Backtracking with
/// degree pruning; intended for small systems in tests.
pub fn tsi_isomorphic(a: &Tsi, b: &Tsi) -> bool {
    if a.n_states() != b.n_states()
        || a.n_transitions() != b.n_transitions()
        || a.indep_pairs().count() != b.indep_pairs().count()
    {
        return false;
    }
    let n = a.n_states();
    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    map[a.initial().index()] = Some(b.initial().index());
    used[b.initial().index()] = true;

    fn out_profile(t: &Tsi, s: usize) -> BTreeMap<Label, usize> {
        let mut m = BTreeMap::new();
        for &tr in t.out(crate::tsi::StateId(s as u32)) {
            *m.entry(t.label(tr).clone()).or_insert(0) += 1;
        }
        m
    }

    fn consistent(a: &Tsi, b: &Tsi, map: &[Option<usize>]) -> bool {
        // every fully-mapped transition must exist in the image
        for t in a.trans_ids() {
            let (s, d) = (a.src(t).index(), a.dst(t).index());
            if let (Some(ms), Some(md)) = (map[s], map[d]) {
                let img = b.out(crate::tsi::StateId(ms as u32)).iter().find(|&&u| {
                    b.label(u) == a.label(t) && b.dst(u).index() == md
                });
                if img.is_none() {
                    return false;
                }
            }
        }
        true
    }

    fn solve(a: &Tsi, b: &Tsi, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, next: usize) -> bool {
        let n = a.n_states();
        let s = match (next..n).chain(0..next).find(|&s| map[s].is_none()) {
            Some(s) => s,
            None => return iso_transitions(a, b, map),
        };
        let prof = out_profile(a, s);
        for img in 0..n {
            if used[img] || out_profile(b, img) != prof {
                continue;
            }
            map[s] = Some(img);
            used[img] = true;
            if consistent(a, b, map) && solve(a, b, map, used, s + 1) {
                return true;
            }
            map[s] = None;
            used[img] = false;
        }
        false
    }

    fn iso_transitions(a: &Tsi, b: &Tsi, map: &[Option<usize>]) -> bool {
        // transition map is determined by the state map (triples are unique)
        let mut tmap = BTreeMap::new();
        for t in a.trans_ids() {
            let ms = map[a.src(t).index()].unwrap();
            let md = map[a.dst(t).index()].unwrap();
            let img = b.out(crate::tsi::StateId(ms as u32)).iter().find(|&&u| {
                b.label(u) == a.label(t) && b.dst(u).index() == md
            });
            match img {
                Some(&u) => {
                    tmap.insert(t, u);
                }
                None => return false,
            }
        }
        for t in a.trans_ids() {
            for u in a.trans_ids() {
                if a.independent(t, u) != b.independent(tmap[&t], tmap[&u]) {
                    return false;
                }
            }
        }
        true
    }

    solve(a, b, &mut map, &mut used, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tsi::validate_tsi;
    use rand::SeedableRng;

    #[test]
    fn random_lts_is_valid_tsi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let tsi = random_lts(&mut rng, 8, 3);
            assert!(validate_tsi(&tsi).all_pass());
            assert_eq!(tsi.indep_pairs().count(), 0);
        }
    }

    #[test]
    fn random_net_tsi_is_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..25 {
            let tsi = random_net_tsi(&mut rng, 64);
            assert!(validate_tsi(&tsi).all_pass());
            assert!(tsi.is_acyclic());
        }
    }

    #[test]
    fn random_formulas_are_closed_and_parseable() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let alphabet = vec![Label("a".into()), Label("b".into())];
        let opts = FormulaOptions {
            max_depth: 5,
            allow_otimes: true,
            allow_causal: true,
            allow_fixpoints: true,
        };
        for _ in 0..50 {
            let f = random_formula(&mut rng, &alphabet, &opts);
            assert!(f.is_closed());
            assert!(f.check_polarity().is_ok());
            let printed = crate::logic::print_formula(&f);
            let again = crate::logic::parse_formula(&printed).unwrap();
            assert_eq!(f.alpha_normalize(), again.alpha_normalize());
        }
    }

    #[test]
    fn isomorphism_distinguishes_diamond_from_interleaving() {
        assert!(tsi_isomorphic(&fixtures::diamond(), &fixtures::diamond()));
        // same graph, different independence
        assert!(!tsi_isomorphic(&fixtures::diamond(), &fixtures::interleaving()));
    }
}
