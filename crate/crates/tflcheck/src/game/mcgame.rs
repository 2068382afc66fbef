//! The higher-order model-checking game. Positions pair a process with a
//! member of the formula closure; Eve owns disjunctions and diamonds, Adam
//! conjunctions and boxes, fixpoint handling is deterministic, and the trace
//! modalities move on complete traces of the current support set. Infinite
//! plays are decided by the outermost variable unfolded infinitely often,
//! realised here as a parity condition over binder nesting depths.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{random_playout, solve_parity, Game, Player, Solved};
use crate::logic::{
    binder_map, game_closure, plain_view, to_positive_normal_form, variable_priorities, Formula,
    PlainView,
};
use crate::order::{last_causal, last_concurrent, ProcId};
use crate::semantics::{Analysis, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct McNode {
    pub process: ProcId,
    pub formula: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum McRule {
    Fp,
    Var,
    Or,
    And,
    DiaCausal,
    DiaConcurrent,
    BoxCausal,
    BoxConcurrent,
    DiaPlain,
    BoxPlain,
    DiaTrace,
    BoxTrace,
    Leaf,
}

pub struct McGame {
    pub game: Game,
    pub nodes: Vec<McNode>,
    pub closure: Vec<Formula>,
    pub rules: Vec<McRule>,
    pub initial: usize,
}

pub const DEFAULT_GAME_CAP: usize = 100_000;

impl McGame {
    pub fn render_node(&self, an: &Analysis, v: usize) -> String {
        format!(
            "{} |- {}",
            an.space.render(self.nodes[v].process, an.tsi),
            crate::logic::print_formula(&self.closure[self.nodes[v].formula])
        )
    }
}

/// Builds the reachable board from `p0 |- f`. The formula is normalised to
/// positive form first; free variables are looked up in the valuation and
/// close the play immediately.
pub fn build_mc_game(
    an: &Analysis,
    p0: ProcId,
    f: &Formula,
    valuation: &Valuation,
    cap: usize,
) -> Result<McGame> {
    let pnf = to_positive_normal_form(f);
    let closure = game_closure(&pnf);
    let fidx: BTreeMap<Formula, usize> =
        closure.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let priorities = variable_priorities(&pnf);
    let binders = binder_map(&pnf);

    let mut nodes: Vec<McNode> = Vec::new();
    let mut index: BTreeMap<McNode, usize> = BTreeMap::new();
    let mut owner = Vec::new();
    let mut priority = Vec::new();
    let mut rules = Vec::new();
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    let root = McNode { process: p0, formula: fidx[&pnf] };
    index.insert(root, 0);
    nodes.push(root);
    queue.push_back(root);

    while let Some(node) = queue.pop_front() {
        let v = index[&node];
        let formula = closure[node.formula].clone();
        let p = node.process;
        let last = an.space.last(p);

        let mut succs: Vec<McNode> = Vec::new();
        let (own, rule, prio): (Player, McRule, u32) = if let Some(view) = plain_view(&formula) {
            match view {
                PlainView::Dia(l, body) => {
                    for &r in &an.space.support(p).members {
                        if an.tsi.label(r) == l {
                            succs.push(McNode {
                                process: an.space.step(r, an.tsi),
                                formula: fidx[body],
                            });
                        }
                    }
                    (Player::Eve, McRule::DiaPlain, 0)
                }
                PlainView::Box(l, body) => {
                    for &r in &an.space.support(p).members {
                        if an.tsi.label(r) == l {
                            succs.push(McNode {
                                process: an.space.step(r, an.tsi),
                                formula: fidx[body],
                            });
                        }
                    }
                    (Player::Adam, McRule::BoxPlain, 0)
                }
            }
        } else {
            match &formula {
                Formula::Tt => (Player::Adam, McRule::Leaf, 0),
                Formula::Ff => (Player::Eve, McRule::Leaf, 0),
                Formula::Var(z) if binders.contains_key(z) => {
                    succs.push(McNode { process: p, formula: fidx[&binders[z]] });
                    (Player::Eve, McRule::Var, priorities[z])
                }
                Formula::Var(z) => {
                    // free variable: winner by the valuation
                    let holds = valuation
                        .get(z)
                        .ok_or_else(|| Error::OpenFormula(z.clone()))?
                        .contains(&p);
                    (if holds { Player::Adam } else { Player::Eve }, McRule::Leaf, 0)
                }
                Formula::Neg(inner) => match inner.as_ref() {
                    Formula::Var(z) if !binders.contains_key(z) => {
                        let holds = valuation
                            .get(z)
                            .ok_or_else(|| Error::OpenFormula(z.clone()))?
                            .contains(&p);
                        (if holds { Player::Eve } else { Player::Adam }, McRule::Leaf, 0)
                    }
                    _ => {
                        return Err(Error::Usage(
                            "game construction expects positive normal form".into(),
                        ))
                    }
                },
                Formula::Or(a, b) => {
                    succs.push(McNode { process: p, formula: fidx[a.as_ref()] });
                    succs.push(McNode { process: p, formula: fidx[b.as_ref()] });
                    (Player::Eve, McRule::Or, 0)
                }
                Formula::And(a, b) => {
                    succs.push(McNode { process: p, formula: fidx[a.as_ref()] });
                    succs.push(McNode { process: p, formula: fidx[b.as_ref()] });
                    (Player::Adam, McRule::And, 0)
                }
                Formula::DiaC(l, body) | Formula::BoxC(l, body) => {
                    for &r in &an.space.support(p).members {
                        if an.tsi.label(r) == l && last_causal(an.tsi, last, r) {
                            succs.push(McNode {
                                process: an.space.step(r, an.tsi),
                                formula: fidx[body.as_ref()],
                            });
                        }
                    }
                    if matches!(formula, Formula::DiaC(..)) {
                        (Player::Eve, McRule::DiaCausal, 0)
                    } else {
                        (Player::Adam, McRule::BoxCausal, 0)
                    }
                }
                Formula::DiaNc(l, body) | Formula::BoxNc(l, body) => {
                    for &r in &an.space.support(p).members {
                        if an.tsi.label(r) == l && last_concurrent(an.tsi, last, r) {
                            succs.push(McNode {
                                process: an.space.step(r, an.tsi),
                                formula: fidx[body.as_ref()],
                            });
                        }
                    }
                    if matches!(formula, Formula::DiaNc(..)) {
                        (Player::Eve, McRule::DiaConcurrent, 0)
                    } else {
                        (Player::Adam, McRule::BoxConcurrent, 0)
                    }
                }
                Formula::DiaCo(body) | Formula::BoxCo(body) => {
                    for m in an.space.trace_procs(p) {
                        succs.push(McNode { process: m, formula: fidx[body.as_ref()] });
                    }
                    if matches!(formula, Formula::DiaCo(..)) {
                        (Player::Eve, McRule::DiaTrace, 0)
                    } else {
                        (Player::Adam, McRule::BoxTrace, 0)
                    }
                }
                Formula::Mu(z, _) | Formula::Nu(z, _) => {
                    succs.push(McNode { process: p, formula: fidx[&Formula::Var(z.clone())] });
                    (Player::Eve, McRule::Fp, 0)
                }
            }
        };

        let mut edge_ids = Vec::with_capacity(succs.len());
        for s in succs {
            let id = match index.get(&s) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    if id >= cap {
                        return Err(Error::StateExplosion(cap));
                    }
                    index.insert(s, id);
                    nodes.push(s);
                    queue.push_back(s);
                    id
                }
            };
            edge_ids.push(id);
        }
        debug_assert_eq!(v, owner.len());
        owner.push(own);
        priority.push(prio);
        rules.push(rule);
        edges.push(edge_ids);
    }

    Ok(McGame {
        game: Game { owner, priority, edges },
        nodes,
        closure,
        rules,
        initial: 0,
    })
}

pub struct McSolution {
    pub solved: Solved,
    pub winner: Player,
}

pub fn solve_mc(mc: &McGame) -> McSolution {
    let solved = solve_parity(&mc.game);
    McSolution { winner: solved.winner[mc.initial], solved }
}

/// Validates a strategy with random adversarial playouts from every node of
/// its owner's winning region; returns the number of plays lost.
pub fn playout_losses<R: rand::Rng>(
    mc: &McGame,
    sol: &McSolution,
    plays_per_node: usize,
    rng: &mut R,
) -> usize {
    let mut losses = 0;
    for v in 0..mc.game.len() {
        let w = sol.solved.winner[v];
        for _ in 0..plays_per_node {
            if !random_playout(&mc.game, &sol.solved, v, w, rng) {
                losses += 1;
            }
        }
    }
    losses
}

// ---------------------------------------------------------------------------
// Replay: the winner follows the computed strategy, the loser's choices come
// from a callback (interactive or scripted). The transcript records the rule
// fired at every step and how the play ended.

#[derive(Debug, Clone, serde::Serialize)]
pub struct PlayStep {
    pub position: String,
    pub rule: McRule,
    pub chooser: Option<Player>,
    pub moved_to: Option<String>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Transcript {
    pub steps: Vec<PlayStep>,
    pub outcome: String,
    pub winner: Player,
}

pub fn replay(
    mc: &McGame,
    sol: &McSolution,
    an: &Analysis,
    mut choose: impl FnMut(&str, &[String]) -> usize,
) -> Result<Transcript> {
    let mut steps = Vec::new();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cur = mc.initial;
    loop {
        if let Some(&at) = seen.get(&cur) {
            let outcome = format!(
                "position repeats (step {at}); the play can loop forever, decided by the outermost fixpoint unfolded in the cycle"
            );
            return Ok(Transcript { steps, outcome, winner: sol.solved.winner[mc.initial] });
        }
        seen.insert(cur, steps.len());
        let position = mc.render_node(an, cur);
        let rule = mc.rules[cur];
        if mc.game.edges[cur].is_empty() {
            let stuck = mc.game.owner[cur];
            let winner = stuck.opponent();
            steps.push(PlayStep { position: position.clone(), rule, chooser: None, moved_to: None });
            let outcome = format!("{stuck} cannot move at {position}; {winner} wins");
            return Ok(Transcript { steps, outcome, winner });
        }
        let owner = mc.game.owner[cur];
        let next = if owner == sol.solved.winner[mc.initial] && sol.solved.winner[cur] == owner {
            match sol.solved.strategy[cur] {
                Some(t) => t,
                None => mc.game.edges[cur][0],
            }
        } else if mc.game.edges[cur].len() == 1 {
            mc.game.edges[cur][0]
        } else {
            let options: Vec<String> =
                mc.game.edges[cur].iter().map(|&t| mc.render_node(an, t)).collect();
            let pick = choose(&position, &options);
            if pick >= options.len() {
                return Err(Error::IllegalMove { position, input: pick.to_string() });
            }
            mc.game.edges[cur][pick]
        };
        steps.push(PlayStep {
            position,
            rule,
            chooser: Some(owner),
            moved_to: Some(mc.render_node(an, next)),
        });
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::logic::parse_formula;
    use crate::tsi::Tsi;
    use rand::SeedableRng;

    fn check(tsi: &Tsi, f: &str) -> (bool, bool) {
        let an = Analysis::new(tsi).unwrap();
        let formula = parse_formula(f).unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &formula, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        let denot = an.satisfies_initial(&formula).unwrap();
        (sol.winner == Player::Eve, denot)
    }

    #[test]
    fn diamond_causal_step_game() {
        let tsi = fixtures::diamond();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<a>c tt").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        // hand construction: the modal position with one edge into tt
        assert_eq!(mc.game.len(), 2);
        assert_eq!(mc.game.owner[0], Player::Eve);
        assert_eq!(mc.game.edges[0].len(), 1);
        assert_eq!(mc.rules[1], McRule::Leaf);
        let sol = solve_mc(&mc);
        assert_eq!(sol.winner, Player::Eve);
    }

    #[test]
    fn tt_wins_vacuously() {
        for tsi in [fixtures::diamond(), fixtures::choice()] {
            let (eve, denot) = check(&tsi, "tt");
            assert!(eve && denot);
        }
    }

    #[test]
    fn game_matches_denotation_on_fixtures() {
        let formulas = [
            "<a> <b> tt",
            "<a>nc tt",
            "[a] <b> tt",
            "<co>(<a> tt & <b> tt)",
            "mu Z. (<b> tt | <a> Z)",
            "nu Z. [a] Z",
            "[co] <a> tt",
        ];
        for tsi in [
            fixtures::diamond(),
            fixtures::interleaving(),
            fixtures::choice(),
            fixtures::twin_joint(),
            fixtures::twin_split(),
            fixtures::diamond_branch(),
        ] {
            for f in formulas {
                let (eve, denot) = check(&tsi, f);
                assert_eq!(eve, denot, "{f}");
            }
        }
    }

    #[test]
    fn trace_positions_enumerate_complete_traces() {
        let tsi = fixtures::twin_joint();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<co>(<a> <c> tt & <b> <d> tt)").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        // the root is the trace position; its successors are the two maximal
        // traces of the initial support set
        assert_eq!(mc.rules[0], McRule::DiaTrace);
        assert_eq!(mc.game.edges[0].len(), an.space.trace_procs(an.space.initial()).len());
        assert_eq!(mc.game.edges[0].len(), 2);
    }

    #[test]
    fn dual_game_flips_winner() {
        let tsi = fixtures::twin_joint();
        let an = Analysis::new(&tsi).unwrap();
        for s in ["<co>(<a> <c> tt & <b> <d> tt)", "<a> <b> tt", "[a] ff"] {
            let f = parse_formula(s).unwrap();
            let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
                .unwrap();
            let neg = Formula::neg(f);
            let mcn = build_mc_game(&an, an.space.initial(), &neg, &Valuation::new(), DEFAULT_GAME_CAP)
                .unwrap();
            assert_eq!(solve_mc(&mc).winner, solve_mc(&mcn).winner.opponent(), "{s}");
        }
    }

    #[test]
    fn determinacy_regions_partition() {
        let tsi = fixtures::twin_split();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("mu Z. (<c> tt | <a> Z | <b> Z)").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        // every node has exactly one winner
        assert_eq!(sol.solved.winner.len(), mc.game.len());
    }

    #[test]
    fn strategies_survive_random_playouts() {
        let tsi = fixtures::twin_joint();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<co>(<a> <c> tt & <b> <d> tt)").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert_eq!(playout_losses(&mc, &sol, 50, &mut rng), 0);
    }

    #[test]
    fn replay_of_winning_play() {
        let tsi = fixtures::diamond();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<a>c tt").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        let t = replay(&mc, &sol, &an, |_, _| 0).unwrap();
        assert_eq!(t.winner, Player::Eve);
        // the final step is Adam stuck at tt
        assert!(t.outcome.contains("Adam cannot move"));
    }

    #[test]
    fn replay_trace_deadlock() {
        // Adam playing [co] at a deadlocked support set loses by emptiness
        let tsi = fixtures::diamond();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("[a] [b] [co] ff").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        assert_eq!(sol.winner, Player::Eve);
        let t = replay(&mc, &sol, &an, |_, _| 0).unwrap();
        assert!(t.outcome.contains("Adam cannot move"), "{}", t.outcome);
    }

    #[test]
    fn dead_ends_match_the_winning_condition_shapes() {
        // every dead end is a constant, a free variable, or an empty modal /
        // trace position; internal positions have the arity their rule fixes
        let tsi = fixtures::twin_split();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("mu Z. (<co>(<a> tt & <b> tt) | [a]c (Z & [co] <c>nc tt))").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        for v in 0..mc.game.len() {
            let deadend = mc.game.edges[v].is_empty();
            match mc.rules[v] {
                McRule::Leaf => assert!(deadend),
                McRule::Fp | McRule::Var => assert_eq!(mc.game.edges[v].len(), 1),
                McRule::Or | McRule::And => assert_eq!(mc.game.edges[v].len(), 2),
                // modal and trace positions may be empty: the emptiness
                // conditions decide them through ownership
                _ => {}
            }
        }
        let sol = solve_mc(&mc);
        for v in 0..mc.game.len() {
            if mc.game.edges[v].is_empty() {
                let expected = mc.game.owner[v].opponent();
                assert_eq!(sol.solved.winner[v], expected, "{}", mc.render_node(&an, v));
            }
        }
    }

    #[test]
    fn refuting_strategy_beats_every_line() {
        // on the side that fails the distinguishing formula, Adam's strategy
        // defeats arbitrary play by Eve
        let tsi = fixtures::twin_split();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<co>(<a> <c> tt & <b> <d> tt)").unwrap();
        let mc = build_mc_game(&an, an.space.initial(), &f, &Valuation::new(), DEFAULT_GAME_CAP)
            .unwrap();
        let sol = solve_mc(&mc);
        assert_eq!(sol.winner, Player::Adam);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            assert!(crate::game::random_playout(&mc.game, &sol.solved, mc.initial, Player::Adam, &mut rng));
        }
        let t = replay(&mc, &sol, &an, |_, _| 0).unwrap();
        assert_eq!(t.winner, Player::Adam);
    }

    #[test]
    fn free_variables_use_the_valuation() {
        let tsi = fixtures::diamond();
        let an = Analysis::new(&tsi).unwrap();
        let f = parse_formula("<a>c Z").unwrap();
        let mut val = Valuation::new();
        val.insert("Z".into(), an.full());
        let mc =
            build_mc_game(&an, an.space.initial(), &f, &val, DEFAULT_GAME_CAP).unwrap();
        assert_eq!(solve_mc(&mc).winner, Player::Eve);
        let mut empty_val = Valuation::new();
        empty_val.insert("Z".into(), Default::default());
        let mc2 =
            build_mc_game(&an, an.space.initial(), &f, &empty_val, DEFAULT_GAME_CAP).unwrap();
        assert_eq!(solve_mc(&mc2).winner, Player::Adam);
    }
}
