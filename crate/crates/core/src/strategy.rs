//! Memoryless strategies, assignments and the lasso-shaped plays they induce.

use std::collections::{BTreeMap, HashMap};

use crate::cgs::{ActionId, Cgs, PosId};
use crate::error::{Error, Result};

/// A memoryless strategy: one action per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    choice: Vec<ActionId>,
}

impl Strategy {
    /// Checks that every position gets an action of `g`.
    pub fn new(g: &Cgs, choice: Vec<ActionId>) -> Result<Self> {
        if choice.len() != g.num_positions() {
            return Err(Error::InvalidStrategy {
                name: String::new(),
                reason: format!(
                    "{} choices for {} positions",
                    choice.len(),
                    g.num_positions()
                ),
            });
        }
        if let Some(&bad) = choice.iter().find(|&&a| a >= g.num_actions()) {
            return Err(Error::InvalidStrategy {
                name: String::new(),
                reason: format!("action index {bad} out of range"),
            });
        }
        Ok(Strategy { choice })
    }

    /// Same action everywhere.
    pub fn constant(g: &Cgs, action: ActionId) -> Self {
        assert!(action < g.num_actions());
        Strategy {
            choice: vec![action; g.num_positions()],
        }
    }

    /// Built from named `(position, action)` pairs; unlisted positions play
    /// `default`.
    pub fn from_named(g: &Cgs, default: ActionId, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut choice = vec![default; g.num_positions()];
        for (pos, act) in pairs {
            let p = g.position_id(pos).ok_or_else(|| Error::InvalidStrategy {
                name: String::new(),
                reason: format!("unknown position `{pos}`"),
            })?;
            let a = g.action_id(act).ok_or_else(|| Error::InvalidStrategy {
                name: String::new(),
                reason: format!("unknown action `{act}`"),
            })?;
            choice[p] = a;
        }
        Ok(Strategy { choice })
    }

    pub(crate) fn from_raw(choice: Vec<ActionId>) -> Self {
        Strategy { choice }
    }

    pub fn action(&self, pos: PosId) -> ActionId {
        self.choice[pos]
    }

    pub fn choices(&self) -> &[ActionId] {
        &self.choice
    }

    /// `q0->y q1->n ...` over all positions.
    pub fn describe(&self, g: &Cgs) -> String {
        self.choice
            .iter()
            .enumerate()
            .map(|(p, &a)| format!("{}->{}", g.positions()[p], g.actions()[a]))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Strategies for agents and variables, by name.
pub type Assignment = BTreeMap<String, Strategy>;

/// A play `positions[..loop_start] (positions[loop_start..])^omega`.
/// The position following the last stored one is `positions[loop_start]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoPlay {
    positions: Vec<PosId>,
    loop_start: usize,
}

impl LassoPlay {
    pub fn new(positions: Vec<PosId>, loop_start: usize) -> Self {
        assert!(loop_start < positions.len(), "lasso loop must be non-empty");
        LassoPlay {
            positions,
            loop_start,
        }
    }

    pub fn positions(&self) -> &[PosId] {
        &self.positions
    }

    pub fn loop_start(&self) -> usize {
        self.loop_start
    }

    /// Exclusive end of the stored cycle; index `loop_end` revisits
    /// `loop_start`.
    pub fn loop_end(&self) -> usize {
        self.positions.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.positions.len() - self.loop_start
    }

    /// Position at any index of the infinite play.
    pub fn at(&self, i: usize) -> PosId {
        if i < self.positions.len() {
            self.positions[i]
        } else {
            self.positions[self.loop_start + (i - self.loop_start) % self.cycle_len()]
        }
    }
}

/// The lasso reached from `start` by iterating a successor function.
pub fn lasso_from_successors(succ: &[PosId], start: PosId) -> LassoPlay {
    let mut seen = HashMap::new();
    let mut positions = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&k) = seen.get(&cur) {
            return LassoPlay::new(positions, k);
        }
        seen.insert(cur, positions.len());
        positions.push(cur);
        cur = succ[cur];
    }
}

/// Successor of every position when each agent follows its strategy in `chi`.
pub fn successor_map(g: &Cgs, chi: &Assignment) -> Result<Vec<PosId>> {
    let strategies = g
        .agents()
        .iter()
        .map(|a| chi.get(a).ok_or_else(|| Error::UnboundName(a.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut profile = vec![0; g.num_agents()];
    Ok((0..g.num_positions())
        .map(|pos| {
            for (slot, s) in profile.iter_mut().zip(&strategies) {
                *slot = s.action(pos);
            }
            g.transition(pos, &profile)
        })
        .collect())
}

/// The unique play from `q` when every agent follows its strategy in `chi`.
pub fn outcome(g: &Cgs, chi: &Assignment, q: PosId) -> Result<LassoPlay> {
    let succ = successor_map(g, chi)?;
    Ok(lasso_from_successors(&succ, q))
}
