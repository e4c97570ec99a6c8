//! Generator for the synchronous crash-failure broadcast model.
//!
//! Each round, every process still alive sends its current view to everyone
//! (including itself, which is bookkeeping only). A process may crash during
//! a round, in which case an arbitrary subset of the other processes receives
//! its last message, and it stays silent afterwards. Communication is
//! full-information: the round-r message of a process is its entire view at
//! the end of round r−1, and its round-1 message is its input value.
//!
//! The generator enumerates every crash pattern with at most `max_crashes`
//! failures in total across all rounds, collects the views of the surviving
//! processes, and turns each reachable global state into a simplex over
//! (agent, view) vertices. Global states contained in larger ones are
//! absorbed when taking facets; this is what keeps the resulting frame
//! proper.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{ChromaticComplex, Facet, SimplicialModel, Vertex};
use crate::vocab::{AgentId, Atom, Vocabulary};

/// One round's worth of received messages: sender → content.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct View(BTreeMap<AgentId, MsgContent>);

/// What a message carries: an input value in round 1, the sender's previous
/// view afterwards.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MsgContent {
    Value(String),
    Round(View),
}

impl View {
    /// Canonical rendering: received contents in sender order, nested views
    /// in braces. With distinct inputs this reads like `{1,2,3}`.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .0
            .values()
            .map(|c| match c {
                MsgContent::Value(v) => v.clone(),
                MsgContent::Round(view) => view.render(),
            })
            .collect();
        format!("{{{}}}", parts.join(","))
    }

    /// All (original sender, input value) pairs observable in the view,
    /// directly or nested in forwarded views.
    pub fn leaf_values(&self) -> BTreeSet<(AgentId, String)> {
        let mut out = BTreeSet::new();
        for (&sender, content) in &self.0 {
            match content {
                MsgContent::Value(v) => {
                    out.insert((sender, v.clone()));
                }
                MsgContent::Round(view) => out.extend(view.leaf_values()),
            }
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrashGenError {
    #[error("{0}")]
    Vocab(#[from] crate::vocab::VocabError),
    #[error("need one input per agent: {agents} agents, {inputs} inputs")]
    InputCount { agents: usize, inputs: usize },
    #[error("at least one round is required")]
    NoRounds,
    #[error("no input assignments given")]
    NoAssignments,
    #[error(
        "a bound of {max_crashes} crashes among {agents} agents admits the empty world; \
         the bound must leave a survivor"
    )]
    TooManyCrashes { max_crashes: usize, agents: usize },
}

/// A crash complex together with the view behind every vertex, which is what
/// the input labelling is computed from.
#[derive(Debug, Clone)]
pub struct GeneratedComplex {
    complex: ChromaticComplex,
    views: Vec<(AgentId, View)>,
}

impl GeneratedComplex {
    pub fn complex(&self) -> &ChromaticComplex {
        &self.complex
    }

    /// The (agent, view) pair of a vertex, indexed by vertex id.
    pub fn view(&self, vertex: usize) -> &(AgentId, View) {
        &self.views[vertex]
    }

    /// Facets as (agent name, rendered view) sets, for comparisons across
    /// separately generated complexes.
    pub fn facet_signatures(&self) -> BTreeSet<BTreeSet<(String, String)>> {
        self.complex
            .facets()
            .iter()
            .map(|f| {
                f.vertices
                    .iter()
                    .map(|&v| {
                        let (agent, view) = &self.views[v];
                        (self.complex.vocab().agent_name(*agent).to_string(), view.render())
                    })
                    .collect()
            })
            .collect()
    }
}

/// A reachable global state: the views of the agents alive at the end.
type GlobalState = BTreeMap<AgentId, View>;

fn subsets(pool: &[AgentId]) -> Vec<BTreeSet<AgentId>> {
    let mut out = Vec::with_capacity(1 << pool.len());
    for mask in 0..(1usize << pool.len()) {
        out.push(
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect(),
        );
    }
    out
}

fn enumerate_states(
    inputs: &BTreeMap<AgentId, String>,
    rounds: usize,
    budget: usize,
) -> BTreeSet<GlobalState> {
    let mut out = BTreeSet::new();
    let alive: BTreeSet<AgentId> = inputs.keys().copied().collect();
    round(inputs, rounds, 1, &alive, budget, &None, &mut out);
    return out;

    #[allow(clippy::too_many_arguments)]
    fn round(
        inputs: &BTreeMap<AgentId, String>,
        rounds: usize,
        r: usize,
        alive: &BTreeSet<AgentId>,
        budget: usize,
        prev: &Option<BTreeMap<AgentId, View>>,
        out: &mut BTreeSet<GlobalState>,
    ) {
        let message = |sender: AgentId| match prev {
            None => MsgContent::Value(inputs[&sender].clone()),
            Some(views) => MsgContent::Round(views[&sender].clone()),
        };
        let pool: Vec<AgentId> = alive.iter().copied().collect();
        for crashing in subsets(&pool) {
            if crashing.len() > budget || crashing.len() == alive.len() {
                continue;
            }
            let survivors: BTreeSet<AgentId> = alive.difference(&crashing).copied().collect();
            let survivor_list: Vec<AgentId> = survivors.iter().copied().collect();
            // Per crasher, the set of survivors that still received its last
            // message. Deliveries to other crashers never reach a view, so
            // enumerating them would only duplicate states.
            let mut deliveries: Vec<BTreeMap<AgentId, BTreeSet<AgentId>>> =
                vec![BTreeMap::new()];
            for &crasher in &crashing {
                let mut extended = Vec::new();
                for partial in &deliveries {
                    for receivers in subsets(&survivor_list) {
                        let mut next = partial.clone();
                        next.insert(crasher, receivers);
                        extended.push(next);
                    }
                }
                deliveries = extended;
            }
            for delivered in &deliveries {
                let mut views: BTreeMap<AgentId, View> = BTreeMap::new();
                for &y in &survivors {
                    let received = alive
                        .iter()
                        .filter(|s| match delivered.get(s) {
                            Some(receivers) => receivers.contains(&y),
                            None => true,
                        })
                        .map(|&s| (s, message(s)))
                        .collect();
                    views.insert(y, View(received));
                }
                if r == rounds {
                    out.insert(views);
                } else {
                    round(
                        inputs,
                        rounds,
                        r + 1,
                        &survivors,
                        budget - crashing.len(),
                        &Some(views),
                        out,
                    );
                }
            }
        }
    }
}

/// Generates the crash complex for several input assignments at once;
/// vertices with equal (agent, view) pairs across assignments are identified.
pub fn gen_crash_complex_multi(
    agents: &[String],
    assignments: &[Vec<String>],
    rounds: usize,
    max_crashes: usize,
) -> Result<GeneratedComplex, CrashGenError> {
    let mut vocab = Vocabulary::new(agents.to_vec())?;
    if rounds == 0 {
        return Err(CrashGenError::NoRounds);
    }
    if assignments.is_empty() {
        return Err(CrashGenError::NoAssignments);
    }
    if max_crashes >= agents.len() {
        return Err(CrashGenError::TooManyCrashes { max_crashes, agents: agents.len() });
    }
    let mut declared: BTreeSet<Atom> = BTreeSet::new();
    let mut states: BTreeSet<GlobalState> = BTreeSet::new();
    for assignment in assignments {
        if assignment.len() != agents.len() {
            return Err(CrashGenError::InputCount {
                agents: agents.len(),
                inputs: assignment.len(),
            });
        }
        let inputs: BTreeMap<AgentId, String> = assignment
            .iter()
            .enumerate()
            .map(|(i, v)| (AgentId(i), v.clone()))
            .collect();
        for (&a, v) in &inputs {
            declared.insert(Atom::new(format!("input{v}"), a));
        }
        states.extend(enumerate_states(&inputs, rounds, max_crashes));
    }
    for atom in declared {
        vocab.declare_atom(atom.name, atom.owner)?;
    }

    let mut vertex_ids: BTreeMap<(AgentId, View), usize> = BTreeMap::new();
    for state in &states {
        for (&a, view) in state {
            let next = vertex_ids.len();
            vertex_ids.entry((a, view.clone())).or_insert(next);
        }
    }
    let mut views: Vec<(AgentId, View)> = vec![(AgentId(0), View(BTreeMap::new())); vertex_ids.len()];
    let mut vertices = Vec::with_capacity(vertex_ids.len());
    for ((a, view), &id) in &vertex_ids {
        vertices.push(Vertex::with_tag(id, *a, view.render()));
        views[id] = (*a, view.clone());
    }
    let simplexes: Vec<BTreeSet<usize>> = states
        .iter()
        .map(|state| {
            state
                .iter()
                .map(|(&a, view)| vertex_ids[&(a, view.clone())])
                .collect()
        })
        .collect();
    let mut complex = ChromaticComplex::from_generators(vocab, vertices, &simplexes)
        .expect("generated simplexes are chromatic");
    complex = name_facets(complex);
    Ok(GeneratedComplex { complex, views })
}

fn name_facets(c: ChromaticComplex) -> ChromaticComplex {
    let vocab = c.vocab().clone();
    let vertices = c.vertices().to_vec();
    let facets = c
        .facets()
        .iter()
        .enumerate()
        .map(|(i, f)| Facet::named(format!("w{i}"), f.vertices.iter().copied()))
        .collect();
    ChromaticComplex::new(vocab, vertices, facets)
}

/// Generates the crash complex for a single input assignment.
pub fn gen_crash_complex(
    agents: &[String],
    inputs: &[String],
    rounds: usize,
    max_crashes: usize,
) -> Result<GeneratedComplex, CrashGenError> {
    gen_crash_complex_multi(agents, &[inputs.to_vec()], rounds, max_crashes)
}

/// Labels every facet with the input atoms observable in it: `input{v}@b`
/// is true in a world whenever some surviving view records that `b` started
/// with `v` — even when `b` itself is dead there.
pub fn label_inputs(generated: &GeneratedComplex) -> SimplicialModel {
    let c = &generated.complex;
    let facets = c
        .facets()
        .iter()
        .map(|f| {
            let atoms: BTreeSet<Atom> = f
                .vertices
                .iter()
                .flat_map(|&v| generated.views[v].1.leaf_values())
                .map(|(sender, value)| Atom::new(format!("input{value}"), sender))
                .collect();
            (f.clone(), atoms)
        })
        .collect();
    SimplicialModel::from_parts(c.vocab().clone(), c.vertices().to_vec(), facets)
}

/// Generates and labels in one step.
pub fn gen_crash_model(
    agents: &[String],
    inputs: &[String],
    rounds: usize,
    max_crashes: usize,
) -> Result<SimplicialModel, CrashGenError> {
    Ok(label_inputs(&gen_crash_complex(agents, inputs, rounds, max_crashes)?))
}
