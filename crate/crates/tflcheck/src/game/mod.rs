//! Finite two-player parity games: arena representation, the recursive
//! attractor (Zielonka) solver producing positional strategies for both
//! players, and random adversarial playouts for strategy validation.
//!
//! Max-parity convention: the winner of an infinite play is decided by the
//! largest priority seen infinitely often; even favours Eve. A player stuck
//! at a dead end loses.

pub mod mcgame;
pub mod stirling;

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }

    fn favours(self, priority: u32) -> bool {
        priority.is_multiple_of(2) == (self == Player::Eve)
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::Eve => f.write_str("Eve"),
            Player::Adam => f.write_str("Adam"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Game {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub edges: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub winner: Vec<Player>,
    /// Positional choice at every node owned by its winner.
    pub strategy: Vec<Option<usize>>,
}

impl Game {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.len()];
        for (v, es) in self.edges.iter().enumerate() {
            for &u in es {
                preds[u].push(v);
            }
        }
        preds
    }
}

/// Solves the game. Internally the arena is totalised with two sink nodes so
/// that every subgame stays total; the classic recursive algorithm then
/// applies unchanged.
pub fn solve_parity(g: &Game) -> Solved {
    let n = g.len();
    let mut owner = g.owner.clone();
    let mut priority = g.priority.clone();
    let mut edges = g.edges.clone();
    // sink won by Eve (a stuck Adam) and sink won by Adam (a stuck Eve)
    let sink_e = n;
    let sink_a = n + 1;
    owner.push(Player::Adam);
    priority.push(0);
    edges.push(vec![sink_e]);
    owner.push(Player::Eve);
    priority.push(1);
    edges.push(vec![sink_a]);
    for (v, es) in edges.iter_mut().enumerate().take(n) {
        if es.is_empty() {
            let sink = if g.owner[v] == Player::Eve { sink_a } else { sink_e };
            es.push(sink);
        }
    }
    let total = Game { owner, priority, edges };
    let preds = total.predecessors();
    let mut strat_eve = vec![None; total.len()];
    let mut strat_adam = vec![None; total.len()];
    let all: BTreeSet<usize> = (0..total.len()).collect();
    let (we, _wa) = zielonka(&total, &preds, &all, &mut strat_eve, &mut strat_adam);

    let mut winner = Vec::with_capacity(n);
    let mut strategy = Vec::with_capacity(n);
    for v in 0..n {
        let w = if we.contains(&v) { Player::Eve } else { Player::Adam };
        winner.push(w);
        let s = match w {
            Player::Eve => strat_eve[v],
            Player::Adam => strat_adam[v],
        };
        // strategies into a sink are not real moves
        strategy.push(s.filter(|&t| t < n));
    }
    Solved { winner, strategy }
}

fn attractor(
    g: &Game,
    preds: &[Vec<usize>],
    region: &BTreeSet<usize>,
    p: Player,
    base: &BTreeSet<usize>,
    strat: &mut [Option<usize>],
) -> BTreeSet<usize> {
    let mut attr = base.clone();
    let mut queue: VecDeque<usize> = base.iter().cloned().collect();
    let mut out_count: std::collections::BTreeMap<usize, usize> = region
        .iter()
        .filter(|&&v| g.owner[v] != p)
        .map(|&v| (v, g.edges[v].iter().filter(|t| region.contains(t)).count()))
        .collect();
    while let Some(v) = queue.pop_front() {
        for &u in &preds[v] {
            if !region.contains(&u) || attr.contains(&u) {
                continue;
            }
            if g.owner[u] == p {
                attr.insert(u);
                strat[u] = Some(v);
                queue.push_back(u);
            } else {
                let c = out_count.get_mut(&u).expect("opponent node in region");
                *c -= 1;
                if *c == 0 {
                    attr.insert(u);
                    queue.push_back(u);
                }
            }
        }
    }
    attr
}

fn zielonka(
    g: &Game,
    preds: &[Vec<usize>],
    region: &BTreeSet<usize>,
    strat_eve: &mut Vec<Option<usize>>,
    strat_adam: &mut Vec<Option<usize>>,
) -> (BTreeSet<usize>, BTreeSet<usize>) {
    if region.is_empty() {
        return (BTreeSet::new(), BTreeSet::new());
    }
    let d = region.iter().map(|&v| g.priority[v]).max().unwrap();
    let p = if d % 2 == 0 { Player::Eve } else { Player::Adam };
    let base: BTreeSet<usize> = region.iter().filter(|&&v| g.priority[v] == d).cloned().collect();
    let attr = if p == Player::Eve {
        attractor(g, preds, region, p, &base, strat_eve)
    } else {
        attractor(g, preds, region, p, &base, strat_adam)
    };
    let rest: BTreeSet<usize> = region.difference(&attr).cloned().collect();
    let (we, wa) = zielonka(g, preds, &rest, strat_eve, strat_adam);
    let wo = if p == Player::Eve { &wa } else { &we };
    if wo.is_empty() {
        // all of the region goes to p: top nodes may move anywhere inside
        let strat = if p == Player::Eve { &mut *strat_eve } else { &mut *strat_adam };
        for &v in &base {
            if g.owner[v] == p && strat[v].is_none_or(|t| !region.contains(&t)) {
                strat[v] = g.edges[v].iter().find(|t| region.contains(t)).cloned();
            }
        }
        return if p == Player::Eve {
            (region.clone(), BTreeSet::new())
        } else {
            (BTreeSet::new(), region.clone())
        };
    }
    let o = p.opponent();
    let attr_b = if o == Player::Eve {
        attractor(g, preds, region, o, wo, strat_eve)
    } else {
        attractor(g, preds, region, o, wo, strat_adam)
    };
    let rest2: BTreeSet<usize> = region.difference(&attr_b).cloned().collect();
    let (we2, wa2) = zielonka(g, preds, &rest2, strat_eve, strat_adam);
    if o == Player::Eve {
        (we2.union(&attr_b).cloned().collect(), wa2)
    } else {
        (we2, wa2.union(&attr_b).cloned().collect())
    }
}

/// Plays one random adversarial game: `protagonist` follows the computed
/// strategy, the opponent picks uniformly random successors. The play ends at
/// a dead end (stuck player loses) or when a position repeats, in which case
/// the cycle's maximal priority decides. Returns true when the protagonist
/// wins the play.
pub fn random_playout<R: Rng>(
    g: &Game,
    s: &Solved,
    start: usize,
    protagonist: Player,
    rng: &mut R,
) -> bool {
    let mut visited_at: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    let mut trace = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&i) = visited_at.get(&cur) {
            let top = trace[i..].iter().map(|&v: &usize| g.priority[v]).max().unwrap();
            return protagonist.favours(top);
        }
        visited_at.insert(cur, trace.len());
        trace.push(cur);
        let next = if g.owner[cur] == protagonist {
            match s.strategy[cur] {
                Some(t) => t,
                // stuck protagonist loses
                None => return false,
            }
        } else {
            match g.edges[cur].len() {
                0 => return true,
                k => g.edges[cur][rng.gen_range(0..k)],
            }
        };
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn game(owner: Vec<Player>, priority: Vec<u32>, edges: Vec<Vec<usize>>) -> Game {
        Game { owner, priority, edges }
    }

    #[test]
    fn single_even_cycle_goes_to_eve() {
        let g = game(vec![Player::Adam], vec![0], vec![vec![0]]);
        let s = solve_parity(&g);
        assert_eq!(s.winner[0], Player::Eve);
    }

    #[test]
    fn stuck_owner_loses() {
        let g = game(vec![Player::Eve], vec![0], vec![vec![]]);
        assert_eq!(solve_parity(&g).winner[0], Player::Adam);
        let g2 = game(vec![Player::Adam], vec![5], vec![vec![]]);
        assert_eq!(solve_parity(&g2).winner[0], Player::Eve);
    }

    #[test]
    fn choice_between_cycles() {
        // Eve chooses between an odd self-loop and an even self-loop
        let g = game(
            vec![Player::Eve, Player::Adam, Player::Adam],
            vec![0, 1, 2],
            vec![vec![1, 2], vec![1], vec![2]],
        );
        let s = solve_parity(&g);
        assert_eq!(s.winner[0], Player::Eve);
        assert_eq!(s.strategy[0], Some(2));
    }

    #[test]
    fn adam_steers_into_odd() {
        let g = game(
            vec![Player::Adam, Player::Eve, Player::Eve],
            vec![0, 1, 2],
            vec![vec![1, 2], vec![1], vec![2]],
        );
        let s = solve_parity(&g);
        assert_eq!(s.winner[0], Player::Adam);
        assert_eq!(s.strategy[0], Some(1));
    }

    #[test]
    fn alternation() {
        // priority 2 dominates priority 1 on the shared cycle
        let g = game(
            vec![Player::Adam, Player::Eve],
            vec![1, 2],
            vec![vec![1], vec![0]],
        );
        let s = solve_parity(&g);
        assert_eq!(s.winner[0], Player::Eve);
    }

    #[test]
    fn playouts_never_defeat_winner() {
        let g = game(
            vec![Player::Eve, Player::Adam, Player::Adam, Player::Eve],
            vec![1, 0, 3, 2],
            vec![vec![1, 2], vec![0, 3], vec![2], vec![3]],
        );
        let s = solve_parity(&g);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for start in 0..g.len() {
            let w = s.winner[start];
            for _ in 0..200 {
                assert!(random_playout(&g, &s, start, w, &mut rng));
            }
        }
    }
}
