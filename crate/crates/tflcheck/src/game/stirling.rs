//! The classical local model-checking game for the plain-modality
//! mu-calculus, played on states of the underlying LTS (independence
//! ignored). On models with empty independence the higher-order game
//! degenerates to this one; [`project_mc_game`] realises the projection and
//! [`degenerates_to_stirling`] checks graph equality.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::game::mcgame::McGame;
use crate::game::{solve_parity, Game, Player};
use crate::logic::{
    binder_map, fragment_of, game_closure, plain_view, to_positive_normal_form,
    variable_priorities, Formula, FragmentId, PlainView,
};
use crate::semantics::Analysis;
use crate::tsi::{StateId, Tsi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct StNode {
    pub state: StateId,
    pub formula: usize,
}

pub struct StirlingGame {
    pub game: Game,
    pub nodes: Vec<StNode>,
    pub closure: Vec<Formula>,
    pub initial: usize,
}

/// Builds the local game for a closed formula of the plain fragment.
pub fn build_stirling_game(tsi: &Tsi, f: &Formula, cap: usize) -> Result<StirlingGame> {
    let pnf = to_positive_normal_form(f);
    if fragment_of(&pnf) > FragmentId::Lmu {
        return Err(Error::NotLmuFragment);
    }
    if !pnf.is_closed() {
        return Err(Error::OpenFormula(pnf.free_vars().iter().next().unwrap().clone()));
    }
    let closure = game_closure(&pnf);
    let fidx: BTreeMap<Formula, usize> =
        closure.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let priorities = variable_priorities(&pnf);
    let binders = binder_map(&pnf);

    let mut nodes = Vec::new();
    let mut index: BTreeMap<StNode, usize> = BTreeMap::new();
    let mut owner = Vec::new();
    let mut priority = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let root = StNode { state: tsi.initial(), formula: fidx[&pnf] };
    index.insert(root, 0);
    nodes.push(root);
    queue.push_back(root);

    while let Some(node) = queue.pop_front() {
        let formula = closure[node.formula].clone();
        let s = node.state;
        let mut succs = Vec::new();
        let (own, prio) = if let Some(view) = plain_view(&formula) {
            match view {
                PlainView::Dia(l, body) => {
                    for &t in tsi.out(s) {
                        if tsi.label(t) == l {
                            succs.push(StNode { state: tsi.dst(t), formula: fidx[body] });
                        }
                    }
                    (Player::Eve, 0)
                }
                PlainView::Box(l, body) => {
                    for &t in tsi.out(s) {
                        if tsi.label(t) == l {
                            succs.push(StNode { state: tsi.dst(t), formula: fidx[body] });
                        }
                    }
                    (Player::Adam, 0)
                }
            }
        } else {
            match &formula {
                Formula::Tt => (Player::Adam, 0),
                Formula::Ff => (Player::Eve, 0),
                Formula::Var(z) => {
                    succs.push(StNode { state: s, formula: fidx[&binders[z]] });
                    (Player::Eve, priorities[z])
                }
                Formula::Or(a, b) => {
                    succs.push(StNode { state: s, formula: fidx[a.as_ref()] });
                    succs.push(StNode { state: s, formula: fidx[b.as_ref()] });
                    (Player::Eve, 0)
                }
                Formula::And(a, b) => {
                    succs.push(StNode { state: s, formula: fidx[a.as_ref()] });
                    succs.push(StNode { state: s, formula: fidx[b.as_ref()] });
                    (Player::Adam, 0)
                }
                Formula::Mu(z, _) | Formula::Nu(z, _) => {
                    succs.push(StNode { state: s, formula: fidx[&Formula::Var(z.clone())] });
                    (Player::Eve, 0)
                }
                other => {
                    return Err(Error::Usage(format!(
                        "not a plain-fragment construct: {}",
                        crate::logic::print_formula(other)
                    )))
                }
            }
        };
        let mut edge_ids = Vec::with_capacity(succs.len());
        for t in succs {
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    if id >= cap {
                        return Err(Error::StateExplosion(cap));
                    }
                    index.insert(t, id);
                    nodes.push(t);
                    queue.push_back(t);
                    id
                }
            };
            edge_ids.push(id);
        }
        owner.push(own);
        priority.push(prio);
        edges.push(edge_ids);
    }
    Ok(StirlingGame { game: Game { owner, priority, edges }, nodes, closure, initial: 0 })
}

pub fn solve_stirling(tsi: &Tsi, f: &Formula, cap: usize) -> Result<Player> {
    let g = build_stirling_game(tsi, f, cap)?;
    Ok(solve_parity(&g.game).winner[g.initial])
}

/// A game graph with positions projected to (state, formula), for comparing
/// the higher-order game against the classical one.
#[derive(Debug, PartialEq, Eq)]
pub struct ProjectedGraph {
    pub nodes: BTreeSet<(StateId, Formula)>,
    pub edges: BTreeSet<((StateId, Formula), (StateId, Formula))>,
    pub owner: BTreeMap<(StateId, Formula), Player>,
    pub priority: BTreeMap<(StateId, Formula), u32>,
}

/// Projects the higher-order game by erasing support sets and last
/// transitions; positions that differ only in those components collapse.
pub fn project_mc_game(mc: &McGame, an: &Analysis) -> ProjectedGraph {
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut owner = BTreeMap::new();
    let mut priority = BTreeMap::new();
    let key = |v: usize| -> (StateId, Formula) {
        (an.space.owner(mc.nodes[v].process), mc.closure[mc.nodes[v].formula].clone())
    };
    for v in 0..mc.game.len() {
        let k = key(v);
        nodes.insert(k.clone());
        owner.insert(k.clone(), mc.game.owner[v]);
        priority.insert(k.clone(), mc.game.priority[v]);
        for &t in &mc.game.edges[v] {
            edges.insert((k.clone(), key(t)));
        }
    }
    ProjectedGraph { nodes, edges, owner, priority }
}

pub fn stirling_graph(st: &StirlingGame) -> ProjectedGraph {
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut owner = BTreeMap::new();
    let mut priority = BTreeMap::new();
    let key = |v: usize| -> (StateId, Formula) {
        (st.nodes[v].state, st.closure[st.nodes[v].formula].clone())
    };
    for v in 0..st.game.len() {
        let k = key(v);
        nodes.insert(k.clone());
        owner.insert(k.clone(), st.game.owner[v]);
        priority.insert(k.clone(), st.game.priority[v]);
        for &t in &st.game.edges[v] {
            edges.insert((k.clone(), key(t)));
        }
    }
    ProjectedGraph { nodes, edges, owner, priority }
}

/// On a plain-fragment formula, checks that the projected higher-order game
/// coincides with the classical local game position for position.
pub fn degenerates_to_stirling(mc: &McGame, an: &Analysis, st: &StirlingGame) -> bool {
    project_mc_game(mc, an) == stirling_graph(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::mcgame::{build_mc_game, solve_mc, DEFAULT_GAME_CAP};
    use crate::logic::parse_formula;
    use crate::semantics::Valuation;
    use crate::tsi::parse_tsi;

    #[test]
    fn single_edge_dia() {
        let tsi = parse_tsi("state s init\nstate q\ntrans t s a q\n").unwrap();
        let f = parse_formula("<a> tt").unwrap();
        assert_eq!(solve_stirling(&tsi, &f, DEFAULT_GAME_CAP).unwrap(), Player::Eve);
    }

    #[test]
    fn box_cycle_verdict_matches_reference_evaluator() {
        let tsi = parse_tsi("state s init\ntrans t s a s\n").unwrap();
        let f = parse_formula("mu Z. [a] Z").unwrap();
        let winner = solve_stirling(&tsi, &f, DEFAULT_GAME_CAP).unwrap();
        let states = crate::semantics::lmu_denote(&tsi, &f, &BTreeMap::new()).unwrap();
        assert_eq!(winner == Player::Eve, states.contains(&tsi.initial()));
        // on the a-cycle the least fixpoint never terminates the box chain
        assert_eq!(winner, Player::Adam);
    }

    #[test]
    fn trace_formula_rejected() {
        let tsi = fixtures::diamond();
        let f = parse_formula("<co> tt").unwrap();
        assert!(matches!(
            solve_stirling(&tsi, &f, DEFAULT_GAME_CAP),
            Err(Error::NotLmuFragment)
        ));
    }

    #[test]
    fn empty_independence_degenerates() {
        let tsi = fixtures::interleaving();
        let an = Analysis::new(&tsi).unwrap();
        for s in ["<a> <b> tt", "mu Z. (<b> tt | <a> Z)", "nu Z. [a] Z", "[a] <b> tt"] {
            let f = parse_formula(s).unwrap();
            let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
                .unwrap();
            let st = build_stirling_game(&tsi, &f, DEFAULT_GAME_CAP).unwrap();
            assert!(degenerates_to_stirling(&mc, &an, &st), "{s}");
            assert_eq!(solve_mc(&mc).winner, solve_parity(&st.game).winner[st.initial], "{s}");
        }
    }
}
