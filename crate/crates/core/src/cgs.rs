//! Concurrent game structures.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type PosId = usize;
pub type ActionId = usize;

/// One defect found while validating a [`Cgs`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CgsDefect {
    #[error("no agents declared")]
    NoAgents,
    #[error("no actions declared")]
    NoActions,
    #[error("no positions declared")]
    NoPositions,
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("initial position `{0}` is not a declared position")]
    UnknownInitial(String),
    #[error("missing transition at {position} for profile ({profile})")]
    MissingTransition { position: String, profile: String },
    #[error(
        "transition at {position} for profile ({profile}) targets unknown position `{target}`"
    )]
    UnknownTarget {
        position: String,
        profile: String,
        target: String,
    },
    #[error("label refers to unknown position `{0}`")]
    UnknownLabelPosition(String),
    #[error("transition refers to unknown position `{0}`")]
    UnknownSource(String),
    #[error("transition refers to unknown action `{0}`")]
    UnknownAction(String),
    #[error("transition profile at {position} has {found} actions, expected {expected}")]
    ProfileArity {
        position: String,
        found: usize,
        expected: usize,
    },
}

/// Validation failure: every defect found, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid game structure: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct CgsValidationError(pub Vec<CgsDefect>);

/// Name-level description of a game structure, as read from a model file.
/// [`CgsSpec::build`] validates it into an index-based [`Cgs`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CgsSpec {
    pub agents: Vec<String>,
    pub actions: Vec<String>,
    pub positions: Vec<String>,
    pub initial: String,
    /// `(source, one action per agent, target)`
    pub transitions: Vec<(String, Vec<String>, String)>,
    pub labels: Vec<(String, Vec<String>)>,
}

/// A validated concurrent game structure. Every action is available to every
/// agent at every position, and the transition table is total over the full
/// profile space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgs {
    agents: Vec<String>,
    actions: Vec<String>,
    positions: Vec<String>,
    initial: PosId,
    /// indexed by `position * actions^agents + profile_index`
    table: Vec<PosId>,
    labels: Vec<BTreeSet<String>>,
}

impl CgsSpec {
    pub fn validate(&self) -> Result<(), CgsValidationError> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Cgs, CgsValidationError> {
        let mut defects = Vec::new();
        if self.agents.is_empty() {
            defects.push(CgsDefect::NoAgents);
        }
        if self.actions.is_empty() {
            defects.push(CgsDefect::NoActions);
        }
        if self.positions.is_empty() {
            defects.push(CgsDefect::NoPositions);
        }
        index_names("agent", &self.agents, &mut defects);
        let actions = index_names("action", &self.actions, &mut defects);
        let positions = index_names("position", &self.positions, &mut defects);

        let initial = match positions.get(self.initial.as_str()) {
            Some(&p) => p,
            None => {
                defects.push(CgsDefect::UnknownInitial(self.initial.clone()));
                0
            }
        };

        let n_agents = self.agents.len();
        let n_actions = self.actions.len();
        let profiles = n_actions.checked_pow(n_agents as u32).unwrap_or(usize::MAX);
        let mut table: Vec<Option<PosId>> = vec![None; self.positions.len() * profiles];

        for (source, profile, target) in &self.transitions {
            let Some(&src) = positions.get(source.as_str()) else {
                defects.push(CgsDefect::UnknownSource(source.clone()));
                continue;
            };
            if profile.len() != n_agents {
                defects.push(CgsDefect::ProfileArity {
                    position: source.clone(),
                    found: profile.len(),
                    expected: n_agents,
                });
                continue;
            }
            let mut ids = Vec::with_capacity(n_agents);
            for a in profile {
                match actions.get(a.as_str()) {
                    Some(&id) => ids.push(id),
                    None => defects.push(CgsDefect::UnknownAction(a.clone())),
                }
            }
            if ids.len() != n_agents {
                continue;
            }
            let Some(&dst) = positions.get(target.as_str()) else {
                defects.push(CgsDefect::UnknownTarget {
                    position: source.clone(),
                    profile: profile.join(","),
                    target: target.clone(),
                });
                continue;
            };
            let slot = src * profiles + profile_index(&ids, n_actions);
            table[slot] = Some(dst);
        }

        let mut labels = vec![BTreeSet::new(); self.positions.len()];
        for (pos, props) in &self.labels {
            match positions.get(pos.as_str()) {
                Some(&p) => labels[p].extend(props.iter().cloned()),
                None => defects.push(CgsDefect::UnknownLabelPosition(pos.clone())),
            }
        }

        let mut total = Vec::with_capacity(table.len());
        if n_agents > 0 && n_actions > 0 {
            for (pos, name) in self.positions.iter().enumerate() {
                for p in 0..profiles {
                    match table[pos * profiles + p] {
                        Some(t) => total.push(t),
                        None => {
                            let ids = profile_from_index(p, n_actions, n_agents);
                            defects.push(CgsDefect::MissingTransition {
                                position: name.clone(),
                                profile: ids
                                    .iter()
                                    .map(|&a| self.actions[a].as_str())
                                    .collect::<Vec<_>>()
                                    .join(","),
                            });
                            total.push(0);
                        }
                    }
                }
            }
        }

        if !defects.is_empty() {
            return Err(CgsValidationError(defects));
        }
        Ok(Cgs {
            agents: self.agents.clone(),
            actions: self.actions.clone(),
            positions: self.positions.clone(),
            initial,
            table: total,
            labels,
        })
    }
}

fn index_names<'a>(
    kind: &'static str,
    names: &'a [String],
    defects: &mut Vec<CgsDefect>,
) -> HashMap<&'a str, usize> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            defects.push(CgsDefect::DuplicateName {
                kind,
                name: n.clone(),
            });
        }
    }
    map
}

/// Mixed-radix index of a profile; agent 0 is the most significant digit.
/// Mixed-radix index of a profile, first agent most significant.
pub fn profile_index(profile: &[ActionId], n_actions: usize) -> usize {
    profile.iter().fold(0, |acc, &a| acc * n_actions + a)
}

/// Inverse of [`profile_index`].
pub fn profile_from_index(mut index: usize, n_actions: usize, n_agents: usize) -> Vec<ActionId> {
    let mut out = vec![0; n_agents];
    for slot in out.iter_mut().rev() {
        *slot = index % n_actions;
        index /= n_actions;
    }
    out
}

/// Validates a name-level description, returning every defect found.
pub fn validate_cgs(spec: &CgsSpec) -> Result<(), CgsValidationError> {
    spec.validate()
}

impl Cgs {
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn positions(&self) -> &[String] {
        &self.positions
    }

    pub fn initial(&self) -> PosId {
        self.initial
    }

    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_id(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn position_id(&self, name: &str) -> Option<PosId> {
        self.positions.iter().position(|p| p == name)
    }

    pub fn labels(&self, pos: PosId) -> &BTreeSet<String> {
        &self.labels[pos]
    }

    pub fn has_label(&self, pos: PosId, prop: &str) -> bool {
        self.labels[pos].contains(prop)
    }

    /// Number of full action profiles.
    pub fn profiles(&self) -> usize {
        self.actions.len().pow(self.agents.len() as u32)
    }

    /// Successor of `pos` under `profile` (one action per agent, in agent order).
    pub fn transition(&self, pos: PosId, profile: &[ActionId]) -> PosId {
        debug_assert_eq!(profile.len(), self.agents.len());
        self.table[pos * self.profiles() + profile_index(profile, self.actions.len())]
    }

    /// Positions where `agent`'s own choice can change the successor for
    /// some choice of the other agents.
    pub fn effective_positions(&self, agent: usize) -> Vec<PosId> {
        let n_actions = self.actions.len();
        let n_agents = self.agents.len();
        (0..self.positions.len())
            .filter(|&pos| {
                (0..self.profiles()).any(|p| {
                    let mut profile = profile_from_index(p, n_actions, n_agents);
                    let base = self.transition(pos, &profile);
                    (0..n_actions).any(|a| {
                        profile[agent] = a;
                        self.transition(pos, &profile) != base
                    })
                })
            })
            .collect()
    }

    /// Back to the name-level description (used for serialisation).
    pub fn to_spec(&self) -> CgsSpec {
        let n_actions = self.actions.len();
        let n_agents = self.agents.len();
        let mut transitions = Vec::new();
        for (pos, name) in self.positions.iter().enumerate() {
            for p in 0..self.profiles() {
                let ids = profile_from_index(p, n_actions, n_agents);
                transitions.push((
                    name.clone(),
                    ids.iter().map(|&a| self.actions[a].clone()).collect(),
                    self.positions[self.transition(pos, &ids)].clone(),
                ));
            }
        }
        CgsSpec {
            agents: self.agents.clone(),
            actions: self.actions.clone(),
            positions: self.positions.clone(),
            initial: self.positions[self.initial].clone(),
            transitions,
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(p, l)| (self.positions[p].clone(), l.iter().cloned().collect()))
                .collect(),
        }
    }
}

impl fmt::Display for Cgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cgs({} agents, {} actions, {} positions, initial {})",
            self.agents.len(),
            self.actions.len(),
            self.positions.len(),
            self.positions[self.initial]
        )
    }
}
