//! Partial epistemic frames and models.
//!
//! A partial epistemic model is a Kripke model whose accessibility relations
//! are partial equivalence relations: symmetric and transitive, but not
//! necessarily reflexive. An agent is alive in a world exactly when the world
//! is related to itself, so dropping reflexivity is what lets agents die.
//!
//! Morphisms map a world to a non-empty, saturated *set* of target worlds
//! rather than a single world; see [`FrameMorphism`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::complex::restrict_atoms;
use crate::vocab::{AgentId, Atom, Vocabulary};

/// A named world with the atoms true in it. Leaving every label empty turns
/// the model into a bare frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub name: String,
    pub labels: BTreeSet<Atom>,
}

impl World {
    pub fn new(name: impl Into<String>) -> Self {
        World { name: name.into(), labels: BTreeSet::new() }
    }

    pub fn labelled(name: impl Into<String>, labels: impl IntoIterator<Item = Atom>) -> Self {
        World { name: name.into(), labels: labels.into_iter().collect() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameBuildError {
    #[error("duplicate world name `{0}`")]
    DuplicateWorld(String),
    #[error("relation for agent {0} mentions world index {1}, but there are only {2} worlds")]
    WorldOutOfRange(String, usize, usize),
    #[error("expected one relation per agent ({expected}), got {got}")]
    RelationCount { expected: usize, got: usize },
}

/// A Kripke model with one relation per agent, intended to be a PER each.
/// Relations are stored as given; [`PartialEpistemicModel::validate_per`]
/// diagnoses symmetry and transitivity failures rather than fixing them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEpistemicModel {
    vocab: Vocabulary,
    worlds: Vec<World>,
    rel: Vec<BTreeSet<(usize, usize)>>,
}

impl PartialEpistemicModel {
    pub fn new(
        vocab: Vocabulary,
        worlds: Vec<World>,
        rel: Vec<BTreeSet<(usize, usize)>>,
    ) -> Result<Self, FrameBuildError> {
        if rel.len() != vocab.agent_count() {
            return Err(FrameBuildError::RelationCount {
                expected: vocab.agent_count(),
                got: rel.len(),
            });
        }
        for (i, w) in worlds.iter().enumerate() {
            if worlds[..i].iter().any(|u| u.name == w.name) {
                return Err(FrameBuildError::DuplicateWorld(w.name.clone()));
            }
        }
        for (a, pairs) in rel.iter().enumerate() {
            for &(u, v) in pairs {
                let bad = [u, v].into_iter().find(|&x| x >= worlds.len());
                if let Some(x) = bad {
                    return Err(FrameBuildError::WorldOutOfRange(
                        vocab.agent_name(AgentId(a)).to_string(),
                        x,
                        worlds.len(),
                    ));
                }
            }
        }
        Ok(PartialEpistemicModel { vocab, worlds, rel })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_name(&self, w: usize) -> &str {
        &self.worlds[w].name
    }

    pub fn labels(&self, w: usize) -> &BTreeSet<Atom> {
        &self.worlds[w].labels
    }

    /// Resolves a world by name, falling back to a numeric index.
    pub fn world_by_name(&self, key: &str) -> Option<usize> {
        if let Some(i) = self.worlds.iter().position(|w| w.name == key) {
            return Some(i);
        }
        key.parse::<usize>().ok().filter(|&i| i < self.worlds.len())
    }

    pub fn rel(&self, agent: AgentId) -> &BTreeSet<(usize, usize)> {
        &self.rel[agent.0]
    }

    pub fn related(&self, agent: AgentId, u: usize, v: usize) -> bool {
        self.rel[agent.0].contains(&(u, v))
    }

    /// The agents alive in `w`, i.e. those whose relation relates `w` to
    /// itself.
    pub fn alive_set(&self, w: usize) -> BTreeSet<AgentId> {
        self.vocab
            .agent_ids()
            .filter(|&a| self.related(a, w, w))
            .collect()
    }

    pub fn dead_set(&self, w: usize) -> BTreeSet<AgentId> {
        self.vocab
            .agent_ids()
            .filter(|&a| !self.related(a, w, w))
            .collect()
    }

    /// `sat_U(w)`: the worlds indistinguishable from `w` by every agent in
    /// `U`. The empty `U` yields all worlds.
    pub fn saturate(&self, agents: &BTreeSet<AgentId>, w: usize) -> BTreeSet<usize> {
        (0..self.worlds.len())
            .filter(|&v| agents.iter().all(|&a| self.related(a, w, v)))
            .collect()
    }

    /// Diagnoses each relation against the PER laws, reporting every missing
    /// pair: a pair whose mirror image is present counts as a symmetry
    /// failure, every other pair of the symmetric-transitive closure counts
    /// as a transitivity failure.
    pub fn validate_per(&self) -> PerReport {
        let mut violations = Vec::new();
        for a in self.vocab.agent_ids() {
            let given = &self.rel[a.0];
            let closed = per_closure(given);
            for &(u, v) in closed.difference(given) {
                let kind = if given.contains(&(v, u)) {
                    PerLaw::Symmetry
                } else {
                    PerLaw::Transitivity
                };
                violations.push(PerViolation { agent: a, missing: (u, v), law: kind });
            }
        }
        PerReport { violations }
    }

    /// The same model with every relation replaced by its PER closure.
    pub fn per_closed(&self) -> Self {
        PartialEpistemicModel {
            vocab: self.vocab.clone(),
            worlds: self.worlds.clone(),
            rel: self.rel.iter().map(per_closure).collect(),
        }
    }

    /// Properness: every world has an alive agent, and any two distinct
    /// worlds are distinguished by an agent alive in the first. On failure
    /// returns the offending world pair.
    pub fn is_proper(&self) -> Result<(), ProperViolation> {
        for w in 0..self.worlds.len() {
            for v in 0..self.worlds.len() {
                let ok = self.vocab.agent_ids().any(|a| {
                    self.related(a, w, w) && (w == v || !self.related(a, w, v))
                });
                if !ok {
                    return Err(ProperViolation { world: w, other: v });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerLaw {
    Symmetry,
    Transitivity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerViolation {
    pub agent: AgentId,
    pub missing: (usize, usize),
    pub law: PerLaw,
}

#[derive(Debug, Clone, Default)]
pub struct PerReport {
    pub violations: Vec<PerViolation>,
}

impl PerReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProperViolation {
    /// World with no alive distinguishing agent.
    pub world: usize,
    /// The world it cannot be told apart from (equal to `world` when no
    /// agent is alive at all).
    pub other: usize,
}

/// Smallest symmetric and transitive superset of `pairs`. Elements touched
/// by some pair end up related to themselves; untouched elements stay
/// unrelated.
pub fn per_closure(pairs: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            x
        } else {
            let root = find(parent, p);
            parent.insert(x, root);
            root
        }
    }
    for &(u, v) in pairs {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        parent.insert(ru, rv);
    }
    let elements: Vec<usize> = parent.keys().copied().collect();
    let mut closed = BTreeSet::new();
    for &u in &elements {
        for &v in &elements {
            if find(&mut parent, u) == find(&mut parent, v) {
                closed.insert((u, v));
            }
        }
    }
    closed
}

/// A morphism candidate between two frames: one image set per source world.
/// Validity (non-empty saturated images, preservation of the relations) is
/// established by [`check_frame_morphism`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMorphism {
    images: Vec<BTreeSet<usize>>,
}

impl FrameMorphism {
    pub fn new(images: Vec<BTreeSet<usize>>) -> Self {
        FrameMorphism { images }
    }

    /// The identity morphism on `m`: each world maps to its saturation by
    /// its own alive set. On a proper frame every image is a singleton.
    pub fn identity(m: &PartialEpistemicModel) -> Self {
        let images = (0..m.world_count())
            .map(|w| m.saturate(&m.alive_set(w), w))
            .collect();
        FrameMorphism { images }
    }

    pub fn image(&self, w: usize) -> &BTreeSet<usize> {
        &self.images[w]
    }

    pub fn images(&self) -> &[BTreeSet<usize>] {
        &self.images
    }

    pub fn source_size(&self) -> usize {
        self.images.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameMorphismViolation {
    AgentMismatch,
    WrongSourceSize { expected: usize, got: usize },
    EmptyImage { world: usize },
    ImageOutOfRange { world: usize, image: usize },
    PreservationFailure { agent: AgentId, pair: (usize, usize), images: (usize, usize) },
    SaturationFailure { world: usize },
    LabelMismatch { world: usize, image: usize },
}

impl fmt::Display for FrameMorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameMorphismViolation::AgentMismatch => {
                write!(f, "source and target disagree on agents")
            }
            FrameMorphismViolation::WrongSourceSize { expected, got } => {
                write!(f, "morphism covers {got} worlds, source has {expected}")
            }
            FrameMorphismViolation::EmptyImage { world } => {
                write!(f, "world {world} has an empty image")
            }
            FrameMorphismViolation::ImageOutOfRange { world, image } => {
                write!(f, "world {world} maps to unknown world {image}")
            }
            FrameMorphismViolation::PreservationFailure { agent, pair, images } => write!(
                f,
                "worlds {} and {} are {agent}-related but images {} and {} are not",
                pair.0, pair.1, images.0, images.1
            ),
            FrameMorphismViolation::SaturationFailure { world } => write!(
                f,
                "image of world {world} is not the saturation of any of its members"
            ),
            FrameMorphismViolation::LabelMismatch { world, image } => write!(
                f,
                "labels of world {world} and image {image} disagree on the alive agents"
            ),
        }
    }
}

/// Checks the two morphism conditions: images of related worlds are pointwise
/// related, and each image is the saturation of one of its members by the
/// source world's alive set.
pub fn check_frame_morphism(
    f: &FrameMorphism,
    src: &PartialEpistemicModel,
    dst: &PartialEpistemicModel,
) -> Result<(), FrameMorphismViolation> {
    if !src.vocab().same_agents(dst.vocab()) {
        return Err(FrameMorphismViolation::AgentMismatch);
    }
    if f.source_size() != src.world_count() {
        return Err(FrameMorphismViolation::WrongSourceSize {
            expected: src.world_count(),
            got: f.source_size(),
        });
    }
    for w in 0..src.world_count() {
        if f.image(w).is_empty() {
            return Err(FrameMorphismViolation::EmptyImage { world: w });
        }
        if let Some(&bad) = f.image(w).iter().find(|&&i| i >= dst.world_count()) {
            return Err(FrameMorphismViolation::ImageOutOfRange { world: w, image: bad });
        }
    }
    for a in src.vocab().agent_ids() {
        for &(u, v) in src.rel(a) {
            for &u2 in f.image(u) {
                for &v2 in f.image(v) {
                    if !dst.related(a, u2, v2) {
                        return Err(FrameMorphismViolation::PreservationFailure {
                            agent: a,
                            pair: (u, v),
                            images: (u2, v2),
                        });
                    }
                }
            }
        }
    }
    for u in 0..src.world_count() {
        let live = src.alive_set(u);
        let saturated = f
            .image(u)
            .iter()
            .any(|&u2| &dst.saturate(&live, u2) == f.image(u));
        if !saturated {
            return Err(FrameMorphismViolation::SaturationFailure { world: u });
        }
    }
    Ok(())
}

/// A frame morphism whose label condition also holds: for every world and
/// every image world, the labels agree on the atoms of the agents alive in
/// the source world.
pub fn check_model_morphism(
    f: &FrameMorphism,
    src: &PartialEpistemicModel,
    dst: &PartialEpistemicModel,
) -> Result<(), FrameMorphismViolation> {
    check_frame_morphism(f, src, dst)?;
    for w in 0..src.world_count() {
        let live = src.alive_set(w);
        let expected = restrict_atoms(src.labels(w), &live);
        for &w2 in f.image(w) {
            if restrict_atoms(dst.labels(w2), &live) != expected {
                return Err(FrameMorphismViolation::LabelMismatch { world: w, image: w2 });
            }
        }
    }
    Ok(())
}

/// Composes two valid morphisms `f : M → N` and `g : N → P`. The image of
/// `u` is the saturation, by the agents alive in `u`, of any world reachable
/// through representatives; validity of `f` and `g` makes the choice
/// irrelevant.
pub fn compose_morphisms(
    f: &FrameMorphism,
    g: &FrameMorphism,
    src: &PartialEpistemicModel,
    dst: &PartialEpistemicModel,
) -> FrameMorphism {
    let images = (0..src.world_count())
        .map(|u| {
            let v = *f.image(u).iter().next().expect("morphism images are non-empty");
            let w = *g.image(v).iter().next().expect("morphism images are non-empty");
            dst.saturate(&src.alive_set(u), w)
        })
        .collect();
    FrameMorphism::new(images)
}

/// Label set and per-agent (alive, degree) profile of a world; equal across
/// any isomorphism.
type WorldInvariant = (BTreeSet<Atom>, Vec<(bool, usize)>);

/// Searches for an isomorphism between two models: a world bijection that
/// preserves labels and every relation in both directions. Worlds are first
/// partitioned by a cheap invariant, then matched by backtracking.
pub fn check_frame_iso(m: &PartialEpistemicModel, n: &PartialEpistemicModel) -> Option<Vec<usize>> {
    if !m.vocab().same_agents(n.vocab()) || m.world_count() != n.world_count() {
        return None;
    }
    let invariant = |model: &PartialEpistemicModel, w: usize| -> WorldInvariant {
        let degrees: Vec<(bool, usize)> = model
            .vocab()
            .agent_ids()
            .map(|a| {
                let deg = model.rel(a).iter().filter(|&&(u, _)| u == w).count();
                (model.related(a, w, w), deg)
            })
            .collect();
        (model.labels(w).clone(), degrees)
    };
    let m_inv: Vec<_> = (0..m.world_count()).map(|w| invariant(m, w)).collect();
    let n_inv: Vec<_> = (0..n.world_count()).map(|w| invariant(n, w)).collect();
    {
        let mut a = m_inv.clone();
        let mut b = n_inv.clone();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }

    fn extend(
        m: &PartialEpistemicModel,
        n: &PartialEpistemicModel,
        m_inv: &[WorldInvariant],
        n_inv: &[WorldInvariant],
        assigned: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let w = assigned.len();
        if w == m.world_count() {
            return true;
        }
        for cand in 0..n.world_count() {
            if used[cand] || m_inv[w] != n_inv[cand] {
                continue;
            }
            let consistent = m.vocab().agent_ids().all(|a| {
                assigned.iter().enumerate().all(|(u, &hu)| {
                    m.related(a, w, u) == n.related(a, cand, hu)
                        && m.related(a, u, w) == n.related(a, hu, cand)
                })
            });
            if !consistent {
                continue;
            }
            assigned.push(cand);
            used[cand] = true;
            if extend(m, n, m_inv, n_inv, assigned, used) {
                return true;
            }
            assigned.pop();
            used[cand] = false;
        }
        false
    }

    let mut assigned = Vec::new();
    let mut used = vec![false; n.world_count()];
    if extend(m, n, &m_inv, &n_inv, &mut assigned, &mut used) {
        Some(assigned)
    } else {
        None
    }
}
