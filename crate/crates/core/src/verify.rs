//! Exhaustive enumeration of small partial epistemic models and semantic
//! checks of the KB4 axiom schemes, the properness axioms, and the derived
//! tautologies about alive and dead agents.
//!
//! Scheme instantiation ranges over all formulas up to a given syntax-tree
//! depth, built from the model's atoms plus `true`/`false`. Since the truth
//! of a scheme instance at a world depends only on the denotations of the
//! instantiated formulas, the checker enumerates the reachable denotations
//! (there are at most 2^|W|) and keeps one representative formula per
//! denotation for reporting. On a handful of worlds this turns a doubly
//! exponential sweep into a cheap one without changing any verdict.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::frame::{PartialEpistemicModel, World};
use crate::logic::Formula;
use crate::vocab::{AgentId, Atom, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("enumeration would visit {candidates} candidate models; refusing above {limit}")]
    BoundExplosion { candidates: u128, limit: u128 },
}

const CANDIDATE_LIMIT: u128 = 10_000_000;

fn agent_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

fn sweep_vocabulary(agents: usize, atoms: usize) -> Vocabulary {
    let mut vocab = Vocabulary::new((0..agents).map(agent_name)).expect("agents >= 1");
    for i in 0..atoms {
        vocab
            .declare_atom(format!("p{i}"), AgentId(i % agents))
            .expect("atom names are fresh");
    }
    vocab
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    match items.split_first() {
        None => vec![Vec::new()],
        Some((&first, rest)) => {
            let mut out = Vec::new();
            for partial in set_partitions(rest) {
                for i in 0..partial.len() {
                    let mut with = partial.clone();
                    with[i].push(first);
                    out.push(with);
                }
                let mut alone = partial;
                alone.push(vec![first]);
                out.push(alone);
            }
            out
        }
    }
}

/// All PERs on `{0, …, worlds−1}`: a choice of domain plus a partition of it.
fn all_pers(worlds: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let mut out = Vec::new();
    for mask in 0..(1usize << worlds) {
        let domain: Vec<usize> = (0..worlds).filter(|i| mask >> i & 1 == 1).collect();
        for partition in set_partitions(&domain) {
            let mut pairs = BTreeSet::new();
            for block in &partition {
                for &u in block {
                    for &v in block {
                        pairs.insert((u, v));
                    }
                }
            }
            out.push(pairs);
        }
    }
    out
}

/// Lazily enumerates every partial epistemic model with exactly `worlds`
/// worlds over the given numbers of agents and atoms, in a fixed order.
/// Relations are generated directly as PERs, so nothing invalid is ever
/// produced. With `proper_only` the stream is filtered by properness.
pub fn enumerate_models(
    agents: usize,
    worlds: usize,
    atoms: usize,
    proper_only: bool,
) -> Result<impl Iterator<Item = PartialEpistemicModel>, EnumError> {
    let vocab = sweep_vocabulary(agents, atoms);
    let pers = all_pers(worlds);
    let rel_combos = (pers.len() as u128).pow(agents as u32);
    let label_combos = (1u128 << atoms).pow(worlds as u32);
    let candidates = rel_combos * label_combos;
    if candidates > CANDIDATE_LIMIT {
        return Err(EnumError::BoundExplosion { candidates, limit: CANDIDATE_LIMIT });
    }
    let atom_list: Vec<Atom> = vocab.atoms().to_vec();
    let iter = (0..candidates).filter_map(move |index| {
        let rel_index = index / label_combos;
        let label_index = index % label_combos;
        let rel: Vec<BTreeSet<(usize, usize)>> = (0..agents)
            .map(|a| {
                let i = (rel_index / (pers.len() as u128).pow(a as u32))
                    % pers.len() as u128;
                pers[i as usize].clone()
            })
            .collect();
        let worlds_vec: Vec<World> = (0..worlds)
            .map(|w| {
                let bits = (label_index >> (w * atoms)) & ((1 << atoms) - 1);
                let labels = atom_list
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, a)| a.clone())
                    .collect();
                World { name: format!("w{w}"), labels }
            })
            .collect();
        let model = PartialEpistemicModel::new(vocab.clone(), worlds_vec, rel)
            .expect("enumerated models are well-formed");
        if proper_only && model.is_proper().is_err() {
            None
        } else {
            Some(model)
        }
    });
    Ok(iter)
}

/// Models with every world count from zero up to `max_worlds`.
pub fn enumerate_models_up_to(
    agents: usize,
    max_worlds: usize,
    atoms: usize,
    proper_only: bool,
) -> Result<impl Iterator<Item = PartialEpistemicModel>, EnumError> {
    let mut parts = Vec::new();
    for worlds in 0..=max_worlds {
        parts.push(enumerate_models(agents, worlds, atoms, proper_only)?);
    }
    Ok(parts.into_iter().flatten())
}

/// The axiom schemes the harness can check semantically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scheme {
    /// `K_a (φ → ψ) → (K_a φ → K_a ψ)`
    K,
    /// `φ → K_a ¬K_a ¬φ`
    B,
    /// `K_a φ → K_a K_a φ`
    Four,
    /// `¬K_a φ → K_a ¬K_a φ`
    Five,
    /// `K_a φ → φ`; holds only where the agent is alive.
    T,
    /// Some agent is alive in every world.
    Ne,
    /// A sole survivor knows the others are dead.
    Sa,
}

impl Scheme {
    pub const ALL: [Scheme; 7] =
        [Scheme::K, Scheme::B, Scheme::Four, Scheme::Five, Scheme::T, Scheme::Ne, Scheme::Sa];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::K => "K",
            Scheme::B => "B",
            Scheme::Four => "4",
            Scheme::Five => "5",
            Scheme::T => "T",
            Scheme::Ne => "NE",
            Scheme::Sa => "SA",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K" | "k" => Ok(Scheme::K),
            "B" | "b" => Ok(Scheme::B),
            "4" => Ok(Scheme::Four),
            "5" => Ok(Scheme::Five),
            "T" | "t" => Ok(Scheme::T),
            "NE" | "ne" => Ok(Scheme::Ne),
            "SA" | "sa" => Ok(Scheme::Sa),
            other => Err(format!("unknown scheme `{other}`")),
        }
    }
}

/// A world and instantiation falsifying a scheme instance.
#[derive(Debug, Clone)]
pub struct SchemeCounterexample {
    pub scheme: Scheme,
    pub world: usize,
    pub agent: Option<AgentId>,
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
}

type Denotation = Vec<bool>;

fn v_not(x: &Denotation) -> Denotation {
    x.iter().map(|b| !b).collect()
}

fn v_and(x: &Denotation, y: &Denotation) -> Denotation {
    x.iter().zip(y).map(|(a, b)| *a && *b).collect()
}

fn v_implies(x: &Denotation, y: &Denotation) -> Denotation {
    x.iter().zip(y).map(|(a, b)| !*a || *b).collect()
}

fn v_box(m: &PartialEpistemicModel, a: AgentId, x: &Denotation) -> Denotation {
    (0..m.world_count())
        .map(|w| (0..m.world_count()).all(|v| !m.related(a, w, v) || x[v]))
        .collect()
}

fn v_alive(m: &PartialEpistemicModel, a: AgentId) -> Denotation {
    (0..m.world_count()).map(|w| m.related(a, w, w)).collect()
}

/// The denotations of all formulas of depth ≤ `depth` over the model's atoms
/// plus `true`/`false`, each with a representative formula.
pub fn reachable_denotations(
    m: &PartialEpistemicModel,
    depth: usize,
) -> Vec<(Denotation, Formula)> {
    let n = m.world_count();
    let mut layer: BTreeMap<Denotation, Formula> = BTreeMap::new();
    let insert = |map: &mut BTreeMap<Denotation, Formula>, d: Denotation, f: Formula| {
        map.entry(d).or_insert(f);
    };
    insert(&mut layer, vec![true; n], Formula::True);
    insert(&mut layer, vec![false; n], Formula::False);
    for atom in m.vocab().atoms() {
        let d = (0..n).map(|w| m.labels(w).contains(atom)).collect();
        insert(&mut layer, d, Formula::Atom(atom.clone()));
    }
    let base = layer.clone();
    for _ in 1..depth {
        let mut next = base.clone();
        for (d, f) in &layer {
            insert(&mut next, v_not(d), Formula::not(f.clone()));
            for a in m.vocab().agent_ids() {
                insert(&mut next, v_box(m, a, d), Formula::know(a, f.clone()));
            }
            for (d2, f2) in &layer {
                insert(&mut next, v_and(d, d2), Formula::and(f.clone(), f2.clone()));
            }
        }
        if next == layer {
            break;
        }
        layer = next;
    }
    layer.into_iter().collect()
}

/// Evaluates one scheme over all instantiations up to `depth` and returns
/// every falsifying (world, instantiation) pair.
pub fn check_scheme(
    m: &PartialEpistemicModel,
    scheme: Scheme,
    depth: usize,
) -> Vec<SchemeCounterexample> {
    let mut out = Vec::new();
    let n = m.world_count();
    let record =
        |out: &mut Vec<SchemeCounterexample>,
         value: &Denotation,
         agent: Option<AgentId>,
         phi: Option<&Formula>,
         psi: Option<&Formula>| {
            for (w, ok) in value.iter().enumerate() {
                if !ok {
                    out.push(SchemeCounterexample {
                        scheme,
                        world: w,
                        agent,
                        phi: phi.cloned(),
                        psi: psi.cloned(),
                    });
                }
            }
        };
    match scheme {
        Scheme::Ne => {
            let mut any_alive = vec![false; n];
            for a in m.vocab().agent_ids() {
                any_alive = any_alive
                    .iter()
                    .zip(v_alive(m, a))
                    .map(|(x, y)| *x || y)
                    .collect();
            }
            record(&mut out, &any_alive, None, None, None);
        }
        Scheme::Sa => {
            for a in m.vocab().agent_ids() {
                let mut others_dead = vec![true; n];
                for b in m.vocab().agent_ids().filter(|&b| b != a) {
                    others_dead = v_and(&others_dead, &v_not(&v_alive(m, b)));
                }
                let premise = v_and(&v_alive(m, a), &others_dead);
                let value = v_implies(&premise, &v_box(m, a, &others_dead));
                record(&mut out, &value, Some(a), None, None);
            }
        }
        Scheme::K => {
            let dens = reachable_denotations(m, depth);
            for a in m.vocab().agent_ids() {
                for (phi, pf) in &dens {
                    for (psi, sf) in &dens {
                        let lhs = v_box(m, a, &v_implies(phi, psi));
                        let rhs = v_implies(&v_box(m, a, phi), &v_box(m, a, psi));
                        let value = v_implies(&lhs, &rhs);
                        record(&mut out, &value, Some(a), Some(pf), Some(sf));
                    }
                }
            }
        }
        Scheme::B | Scheme::Four | Scheme::Five | Scheme::T => {
            let dens = reachable_denotations(m, depth);
            for a in m.vocab().agent_ids() {
                for (phi, pf) in &dens {
                    let boxed = v_box(m, a, phi);
                    let value = match scheme {
                        Scheme::B => {
                            v_implies(phi, &v_box(m, a, &v_not(&v_box(m, a, &v_not(phi)))))
                        }
                        Scheme::Four => v_implies(&boxed, &v_box(m, a, &boxed)),
                        Scheme::Five => {
                            v_implies(&v_not(&boxed), &v_box(m, a, &v_not(&boxed)))
                        }
                        Scheme::T => v_implies(&boxed, phi),
                        _ => unreachable!(),
                    };
                    record(&mut out, &value, Some(a), Some(pf), None);
                }
            }
        }
    }
    out
}

/// A failed instance of one of the derived tautologies.
#[derive(Debug, Clone)]
pub struct TheoremFailure {
    pub theorem: &'static str,
    pub world: usize,
    pub agent: AgentId,
    pub phi: Option<Formula>,
}

/// Checks the four derived tautologies about alive and dead agents on every
/// world and instantiation: dead agents know everything, alive agents know
/// they are alive, alive agents satisfy T, and only alive agents matter for
/// knowledge.
pub fn check_theorems(m: &PartialEpistemicModel, depth: usize) -> Vec<TheoremFailure> {
    let mut out = Vec::new();
    let dens = reachable_denotations(m, depth);
    let mut record = |theorem: &'static str, value: &Denotation, a: AgentId, phi: Option<&Formula>| {
        for (w, ok) in value.iter().enumerate() {
            if !ok {
                out.push(TheoremFailure { theorem, world: w, agent: a, phi: phi.cloned() });
            }
        }
    };
    for a in m.vocab().agent_ids() {
        let alive = v_alive(m, a);
        let dead = v_not(&alive);
        let know_alive = v_box(m, a, &alive);
        record("alive_implies_knows_alive", &v_implies(&alive, &know_alive), a, None);
        for (phi, pf) in &dens {
            let boxed = v_box(m, a, phi);
            record("dead_knows_everything", &v_implies(&dead, &boxed), a, Some(pf));
            record(
                "alive_satisfies_t",
                &v_implies(&alive, &v_implies(&boxed, phi)),
                a,
                Some(pf),
            );
            let guarded = v_implies(&alive, &boxed);
            let equiv = v_and(&v_implies(&boxed, &guarded), &v_implies(&guarded, &boxed));
            record("only_alive_matters", &equiv, a, Some(pf));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepBounds {
    pub agents: usize,
    pub max_worlds: usize,
    pub atoms: usize,
    pub depth: usize,
    pub proper_only: bool,
}

/// Machine-readable outcome of a soundness sweep. The KB4 schemes and, on
/// proper models, NE and SA must come out clean; T is reported for contrast
/// and is expected to fail somewhere as soon as an agent can be dead.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub bounds: SweepBounds,
    pub models: usize,
    pub proper_models: usize,
    /// Scheme name → number of falsified (world, instantiation) pairs.
    pub counterexamples: BTreeMap<String, usize>,
    pub theorem_failures: usize,
    pub elapsed_ms: u128,
}

impl SweepSummary {
    /// True when every scheme that soundness promises holds indeed held.
    pub fn sound(&self) -> bool {
        ["K", "B", "4", "5", "NE", "SA"]
            .iter()
            .all(|s| self.counterexamples.get(*s).copied().unwrap_or(0) == 0)
            && self.theorem_failures == 0
    }
}

/// Runs the scheme battery over every model within the bounds: K, B, 4, 5
/// and the derived tautologies on all models, NE and SA on the proper ones,
/// T on all models as the expected point of failure.
pub fn soundness_sweep(
    bounds: &SweepBounds,
    only: Option<Scheme>,
) -> Result<SweepSummary, EnumError> {
    let start = Instant::now();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut models = 0usize;
    let mut proper_models = 0usize;
    let mut theorem_failures = 0usize;
    for m in
        enumerate_models_up_to(bounds.agents, bounds.max_worlds, bounds.atoms, bounds.proper_only)?
    {
        models += 1;
        let proper = m.is_proper().is_ok();
        if proper {
            proper_models += 1;
        }
        let schemes: Vec<Scheme> = match only {
            Some(s) => vec![s],
            None => Scheme::ALL.to_vec(),
        };
        for scheme in schemes {
            // NE and SA are promised on proper models only; skip the rest
            // so that an expected failure does not pollute the battery.
            if matches!(scheme, Scheme::Ne | Scheme::Sa) && only.is_none() && !proper {
                continue;
            }
            let n = check_scheme(&m, scheme, bounds.depth).len();
            *counts.entry(scheme.name().to_string()).or_insert(0) += n;
        }
        if only.is_none() {
            theorem_failures += check_theorems(&m, bounds.depth).len();
        }
    }
    Ok(SweepSummary {
        bounds: bounds.clone(),
        models,
        proper_models,
        counterexamples: counts,
        theorem_failures,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
