//! Agents and atomic propositions.
//!
//! Every model in this crate is built over a finite, non-empty set of agents
//! and a set of atomic propositions, each owned by one agent. Both are
//! declared up front in a [`Vocabulary`] that the model carries around;
//! operations relating two models require their agent lists to coincide.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index into the agent list of a [`Vocabulary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An atomic proposition `name@owner`.
///
/// The owner realises the partition of the atom set by agent: an atom talks
/// about the local state of exactly one agent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub owner: AgentId,
}

impl Atom {
    pub fn new(name: impl Into<String>, owner: AgentId) -> Self {
        Atom { name: name.into(), owner }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("agent set must be non-empty")]
    NoAgents,
    #[error("duplicate agent name `{0}`")]
    DuplicateAgent(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
}

/// The naming context shared by complexes, frames and formulas: a finite,
/// non-empty list of agents plus the declared atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    agents: Vec<String>,
    atoms: Vec<Atom>,
}

impl Vocabulary {
    pub fn new<S: Into<String>>(agents: impl IntoIterator<Item = S>) -> Result<Self, VocabError> {
        let agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        if agents.is_empty() {
            return Err(VocabError::NoAgents);
        }
        for (i, a) in agents.iter().enumerate() {
            if agents[..i].contains(a) {
                return Err(VocabError::DuplicateAgent(a.clone()));
            }
        }
        Ok(Vocabulary { agents, atoms: Vec::new() })
    }

    /// Declares an atom `name@owner`; `(name, owner)` pairs must be unique.
    pub fn declare_atom(
        &mut self,
        name: impl Into<String>,
        owner: AgentId,
    ) -> Result<Atom, VocabError> {
        let atom = Atom::new(name, owner);
        if self.atoms.contains(&atom) {
            return Err(VocabError::DuplicateAtom(self.atom_text(&atom)));
        }
        self.atoms.push(atom.clone());
        Ok(atom)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id.0]
    }

    pub fn agent(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn require_agent(&self, name: &str) -> Result<AgentId, VocabError> {
        self.agent(name).ok_or_else(|| VocabError::UnknownAgent(name.to_string()))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_atom(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    /// Renders an atom in the `name@agent` wire syntax.
    pub fn atom_text(&self, atom: &Atom) -> String {
        format!("{}@{}", atom.name, self.agent_name(atom.owner))
    }

    /// Parses the `name@agent` wire syntax against the declared agents.
    pub fn parse_atom(&self, text: &str) -> Result<Atom, VocabError> {
        let (name, agent) = text
            .rsplit_once('@')
            .ok_or_else(|| VocabError::UnknownAgent(text.to_string()))?;
        let owner = self.require_agent(agent)?;
        Ok(Atom::new(name, owner))
    }

    /// Two structures can interact only when built over the same agent list.
    pub fn same_agents(&self, other: &Vocabulary) -> bool {
        self.agents == other.agents
    }
}
