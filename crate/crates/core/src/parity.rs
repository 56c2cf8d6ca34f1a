//! Max-parity games: Zielonka's recursive algorithm with positional
//! strategies.

use std::collections::VecDeque;

/// Verifier wins a play when the largest priority seen infinitely often is
/// even; Spoiler when it is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Verifier,
    Spoiler,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Verifier => Player::Spoiler,
            Player::Spoiler => Player::Verifier,
        }
    }

    /// The player favoured by `priority`.
    pub fn of_priority(priority: u32) -> Player {
        if priority.is_multiple_of(2) {
            Player::Verifier
        } else {
            Player::Spoiler
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
}

impl ParityGame {
    pub fn new() -> Self {
        ParityGame {
            owner: Vec::new(),
            priority: Vec::new(),
            succ: Vec::new(),
            initial: 0,
        }
    }

    pub fn add_node(&mut self, owner: Player, priority: u32) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Gives every dead end a self-loop, which makes its owner lose when
    /// the node's priority is chosen accordingly by the caller.
    pub fn close_dead_ends(&mut self) {
        for v in 0..self.len() {
            if self.succ[v].is_empty() {
                self.succ[v].push(v);
            }
        }
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, out) in self.succ.iter().enumerate() {
            for &w in out {
                pred[w].push(v);
            }
        }
        pred
    }
}

impl Default for ParityGame {
    fn default() -> Self {
        Self::new()
    }
}

/// Winning regions and a positional strategy. `strategy[v]` is the chosen
/// successor of `v` for its owner; it is winning whenever `v` belongs to
/// its owner's region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<usize>,
}

impl Solution {
    pub fn initial_winner(&self, game: &ParityGame) -> Player {
        self.winner[game.initial]
    }
}

/// Solves a game whose nodes all have at least one successor.
pub fn solve_parity(game: &ParityGame) -> Solution {
    assert!(
        game.succ.iter().all(|s| !s.is_empty()),
        "every node needs a successor"
    );
    let pred = game.predecessors();
    let mut strategy: Vec<usize> = game.succ.iter().map(|s| s[0]).collect();
    let all = vec![true; game.len()];
    let (w_ver, _) = zielonka(game, &pred, &all, &mut strategy);
    let winner = w_ver
        .iter()
        .map(|&v| if v { Player::Verifier } else { Player::Spoiler })
        .collect();
    Solution { winner, strategy }
}

/// Returns the winning regions (Verifier, Spoiler) of the subgame `nodes`
/// and records winning choices in `strategy`.
fn zielonka(
    game: &ParityGame,
    pred: &[Vec<usize>],
    nodes: &[bool],
    strategy: &mut [usize],
) -> (Vec<bool>, Vec<bool>) {
    let n = game.len();
    let Some(d) = (0..n).filter(|&v| nodes[v]).map(|v| game.priority[v]).max() else {
        return (vec![false; n], vec![false; n]);
    };
    let p = Player::of_priority(d);
    let top: Vec<bool> = (0..n).map(|v| nodes[v] && game.priority[v] == d).collect();
    let a = attractor(game, pred, nodes, &top, p, strategy);
    let rest: Vec<bool> = (0..n).map(|v| nodes[v] && !a[v]).collect();
    let (w0, w1) = zielonka(game, pred, &rest, strategy);
    let w_opp = match p {
        Player::Verifier => w1,
        Player::Spoiler => w0,
    };
    if !w_opp.iter().any(|&x| x) {
        // p wins everywhere: in the attractor by reaching the top priority,
        // on top nodes by staying inside the subgame
        for v in 0..n {
            if top[v] && game.owner[v] == p {
                strategy[v] = *game.succ[v]
                    .iter()
                    .find(|&&w| nodes[w])
                    .expect("subgames are traps");
            }
        }
        let w_p: Vec<bool> = nodes.to_vec();
        return match p {
            Player::Verifier => (w_p, vec![false; n]),
            Player::Spoiler => (vec![false; n], w_p),
        };
    }
    let opp = p.opponent();
    let b = attractor(game, pred, nodes, &w_opp, opp, strategy);
    let rest2: Vec<bool> = (0..n).map(|v| nodes[v] && !b[v]).collect();
    let (v0, v1) = zielonka(game, pred, &rest2, strategy);
    let (mut w2_p, mut w2_opp) = match p {
        Player::Verifier => (v0, v1),
        Player::Spoiler => (v1, v0),
    };
    for v in 0..n {
        if b[v] {
            w2_opp[v] = true;
            w2_p[v] = false;
        }
    }
    match p {
        Player::Verifier => (w2_p, w2_opp),
        Player::Spoiler => (w2_opp, w2_p),
    }
}

/// Nodes of `nodes` from which `player` can force a visit to `target`,
/// recording attracting choices for `player`'s nodes outside `target`.
fn attractor(
    game: &ParityGame,
    pred: &[Vec<usize>],
    nodes: &[bool],
    target: &[bool],
    player: Player,
    strategy: &mut [usize],
) -> Vec<bool> {
    let n = game.len();
    let mut attr: Vec<bool> = (0..n).map(|v| nodes[v] && target[v]).collect();
    let mut remaining: Vec<usize> = (0..n)
        .map(|v| game.succ[v].iter().filter(|&&w| nodes[w]).count())
        .collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| attr[v]).collect();
    while let Some(w) = queue.pop_front() {
        for &v in &pred[w] {
            if !nodes[v] || attr[v] {
                continue;
            }
            if game.owner[v] == player {
                attr[v] = true;
                strategy[v] = w;
                queue.push_back(v);
            } else {
                remaining[v] -= 1;
                if remaining[v] == 0 {
                    attr[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    attr
}

/// Checks a solution exactly: each player's strategy keeps plays inside its
/// region, and no cycle the opponent can steer into has the opponent's
/// parity as its maximum.
pub fn verify(game: &ParityGame, sol: &Solution) -> bool {
    for player in [Player::Verifier, Player::Spoiler] {
        let region: Vec<bool> = sol.winner.iter().map(|&w| w == player).collect();
        let edges = |v: usize| -> Vec<usize> {
            if game.owner[v] == player {
                vec![sol.strategy[v]]
            } else {
                game.succ[v].clone()
            }
        };
        for v in 0..game.len() {
            if region[v] && edges(v).iter().any(|&w| !region[w]) {
                return false;
            }
            if region[v] && game.owner[v] == player && !game.succ[v].contains(&sol.strategy[v]) {
                return false;
            }
        }
        let opp = player.opponent();
        let mut bad_priorities: Vec<u32> = game
            .priority
            .iter()
            .copied()
            .filter(|&p| Player::of_priority(p) == opp)
            .collect();
        bad_priorities.sort_unstable();
        bad_priorities.dedup();
        for d in bad_priorities {
            let allowed: Vec<bool> = (0..game.len())
                .map(|v| region[v] && game.priority[v] <= d)
                .collect();
            for v in 0..game.len() {
                if allowed[v] && game.priority[v] == d && on_cycle(v, &allowed, &edges) {
                    return false;
                }
            }
        }
    }
    true
}

fn on_cycle(start: usize, allowed: &[bool], edges: &dyn Fn(usize) -> Vec<usize>) -> bool {
    let mut seen = vec![false; allowed.len()];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in edges(v) {
            if w == start {
                return true;
            }
            if allowed[w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}
