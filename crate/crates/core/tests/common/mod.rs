//! Seeded random generators shared by the integration suites: proper
//! partial epistemic models, chromatic complexes, simplicial models,
//! formulas, and valid pointed morphisms.
#![allow(dead_code)] // each test target uses its own slice of this module

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use kb4_core::complex::{
    check_simplicial_model_morphism, ChromaticComplex, Facet, SimplicialMap, SimplicialModel,
    Vertex,
};
use kb4_core::frame::{PartialEpistemicModel, World};
use kb4_core::logic::Formula;
use kb4_core::vocab::{AgentId, Atom, Vocabulary};

pub fn vocabulary(agents: usize, atoms: usize) -> Vocabulary {
    let names = ["a", "b", "c", "d", "e"];
    let mut vocab = Vocabulary::new(names[..agents].to_vec()).unwrap();
    for i in 0..atoms {
        vocab.declare_atom(format!("p{i}"), AgentId(i % agents)).unwrap();
    }
    vocab
}

fn random_per(rng: &mut impl Rng, worlds: usize) -> BTreeSet<(usize, usize)> {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for w in 0..worlds {
        if rng.gen_bool(0.75) {
            blocks.entry(rng.gen_range(0..worlds)).or_default().push(w);
        }
    }
    let mut pairs = BTreeSet::new();
    for members in blocks.values() {
        for &u in members {
            for &v in members {
                pairs.insert((u, v));
            }
        }
    }
    pairs
}

fn random_labels(rng: &mut impl Rng, vocab: &Vocabulary) -> BTreeSet<Atom> {
    vocab.atoms().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// A random proper model, by rejection: random PERs per agent, every world
/// forced to keep at least one alive agent, resampled until proper.
pub fn random_proper_model(
    rng: &mut impl Rng,
    agents: usize,
    worlds: usize,
    atoms: usize,
) -> PartialEpistemicModel {
    let vocab = vocabulary(agents, atoms);
    loop {
        let mut rel: Vec<BTreeSet<(usize, usize)>> =
            (0..agents).map(|_| random_per(rng, worlds)).collect();
        for w in 0..worlds {
            if !rel.iter().any(|r| r.contains(&(w, w))) {
                rel[rng.gen_range(0..agents)].insert((w, w));
            }
        }
        let world_list = (0..worlds)
            .map(|w| World {
                name: format!("w{w}"),
                labels: random_labels(rng, &vocab),
            })
            .collect();
        let m = PartialEpistemicModel::new(vocab.clone(), world_list, rel).unwrap();
        if m.is_proper().is_ok() {
            return m;
        }
    }
}

/// A random valid complex: coloured vertices, random chromatic generator
/// sets, facets by maximality, unused vertices dropped.
pub fn random_complex(rng: &mut impl Rng, agents: usize, max_facets: usize) -> ChromaticComplex {
    let vocab = vocabulary(agents, 0);
    let per_colour = 3;
    let vertices: Vec<Vertex> = (0..agents * per_colour)
        .map(|id| Vertex::new(id, AgentId(id / per_colour)))
        .collect();
    let mut generators: Vec<BTreeSet<usize>> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_facets) {
        let mut g = BTreeSet::new();
        for a in 0..agents {
            if rng.gen_bool(0.6) {
                g.insert(a * per_colour + rng.gen_range(0..per_colour));
            }
        }
        if !g.is_empty() {
            generators.push(g);
        }
    }
    let generators = if generators.is_empty() {
        vec![[0].into_iter().collect()]
    } else {
        generators
    };
    let used: BTreeSet<usize> = generators.iter().flatten().copied().collect();
    let vertices = vertices.into_iter().filter(|v| used.contains(&v.id)).collect();
    ChromaticComplex::from_generators(vocab, vertices, &generators).unwrap()
}

pub fn random_simplicial_model(
    rng: &mut impl Rng,
    agents: usize,
    max_facets: usize,
    atoms: usize,
) -> SimplicialModel {
    let complex = random_complex(rng, agents, max_facets);
    let mut vocab = complex.vocab().clone();
    for i in 0..atoms {
        vocab.declare_atom(format!("p{i}"), AgentId(i % agents)).unwrap();
    }
    let facets = complex
        .facets()
        .iter()
        .map(|f| (f.clone(), random_labels(rng, &vocab)))
        .collect();
    SimplicialModel::from_parts(vocab, complex.vertices().to_vec(), facets)
}

/// A random formula of depth at most `depth` over the vocabulary's atoms.
pub fn random_formula(rng: &mut impl Rng, vocab: &Vocabulary, depth: usize) -> Formula {
    let leaf = depth <= 1 || rng.gen_bool(0.3);
    if leaf {
        match rng.gen_range(0..4) {
            0 => Formula::True,
            1 => Formula::False,
            _ => match vocab.atoms().len() {
                0 => Formula::True,
                n => Formula::Atom(vocab.atoms()[rng.gen_range(0..n)].clone()),
            },
        }
    } else {
        let agent = AgentId(rng.gen_range(0..vocab.agent_count()));
        match rng.gen_range(0..6) {
            0 => Formula::not(random_formula(rng, vocab, depth - 1)),
            1 => Formula::know(agent, random_formula(rng, vocab, depth - 1)),
            2 => Formula::and(
                random_formula(rng, vocab, depth - 1),
                random_formula(rng, vocab, depth - 1),
            ),
            3 => Formula::or(
                random_formula(rng, vocab, depth - 1),
                random_formula(rng, vocab, depth - 1),
            ),
            4 => Formula::implies(
                random_formula(rng, vocab, depth - 1),
                random_formula(rng, vocab, depth - 1),
            ),
            _ => Formula::alive(agent),
        }
    }
}

/// A random member of the guarded positive fragment.
pub fn random_guarded_formula(rng: &mut impl Rng, vocab: &Vocabulary, depth: usize) -> Formula {
    fn propositional(rng: &mut impl Rng, atoms: &[&Atom], depth: usize) -> Formula {
        if depth <= 1 || rng.gen_bool(0.4) {
            Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone())
        } else if rng.gen_bool(0.5) {
            Formula::not(propositional(rng, atoms, depth - 1))
        } else {
            Formula::and(
                propositional(rng, atoms, depth - 1),
                propositional(rng, atoms, depth - 1),
            )
        }
    }
    let base = depth <= 2 || rng.gen_bool(0.4);
    if base {
        // alive{B} -> ψ with ψ over the atoms owned by B.
        let owners: BTreeSet<AgentId> = vocab.atoms().iter().map(|a| a.owner).collect();
        let owners: Vec<AgentId> = owners.into_iter().collect();
        let mut guard: BTreeSet<AgentId> =
            owners.iter().filter(|_| rng.gen_bool(0.6)).copied().collect();
        if guard.is_empty() {
            guard.insert(owners[rng.gen_range(0..owners.len())]);
        }
        let atoms: Vec<&Atom> =
            vocab.atoms().iter().filter(|a| guard.contains(&a.owner)).collect();
        let psi = propositional(rng, &atoms, 2);
        Formula::implies(Formula::alive_all(guard), psi)
    } else {
        let agent = AgentId(rng.gen_range(0..vocab.agent_count()));
        match rng.gen_range(0..3) {
            0 => Formula::and(
                random_guarded_formula(rng, vocab, depth - 1),
                random_guarded_formula(rng, vocab, depth - 1),
            ),
            1 => Formula::or(
                random_guarded_formula(rng, vocab, depth - 1),
                random_guarded_formula(rng, vocab, depth - 1),
            ),
            _ => Formula::know(agent, random_guarded_formula(rng, vocab, depth - 1)),
        }
    }
}

/// A valid pointed morphism between simplicial models.
pub struct PointedMorphism {
    pub map: SimplicialMap,
    pub src: SimplicialModel,
    pub src_facet: usize,
    pub dst: SimplicialModel,
    pub dst_facet: usize,
}

fn restrict(atoms: &BTreeSet<Atom>, owners: &BTreeSet<AgentId>) -> BTreeSet<Atom> {
    atoms.iter().filter(|a| owners.contains(&a.owner)).cloned().collect()
}

fn jitter_outside(
    rng: &mut impl Rng,
    vocab: &Vocabulary,
    base: &BTreeSet<Atom>,
    owners: &BTreeSet<AgentId>,
) -> BTreeSet<Atom> {
    let mut labels = restrict(base, owners);
    for atom in vocab.atoms() {
        if !owners.contains(&atom.owner) && rng.gen_bool(0.4) {
            labels.insert(atom.clone());
        }
    }
    labels
}

/// Source is a sub-selection of the target's facets, with labels free
/// outside each facet's own colours; the map is the inclusion.
fn inclusion_morphism(rng: &mut impl Rng, dst: &SimplicialModel) -> Option<PointedMorphism> {
    let n = dst.complex().facet_count();
    let chosen: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
    let chosen = if chosen.is_empty() { vec![rng.gen_range(0..n)] } else { chosen };
    let facets: Vec<(Facet, BTreeSet<Atom>)> = chosen
        .iter()
        .map(|&i| {
            let owners = dst.complex().facet_colours(i);
            let facet = dst.complex().facets()[i].clone();
            (facet, jitter_outside(rng, dst.vocab(), dst.label(i), &owners))
        })
        .collect();
    let used: BTreeSet<usize> =
        facets.iter().flat_map(|(f, _)| f.vertices.iter().copied()).collect();
    let vertices: Vec<Vertex> = dst
        .complex()
        .vertices()
        .iter()
        .filter(|v| used.contains(&v.id))
        .cloned()
        .collect();
    let src = SimplicialModel::from_parts(dst.vocab().clone(), vertices, facets);
    let map = SimplicialMap::identity(src.complex());
    let src_facet = rng.gen_range(0..src.complex().facet_count());
    let image = map.image(&src.complex().facets()[src_facet].vertices)?;
    let dst_facet = dst
        .complex()
        .facets()
        .iter()
        .position(|f| image.is_subset(&f.vertices))?;
    Some(PointedMorphism { map, src, src_facet, dst: dst.clone(), dst_facet })
}

/// Target is a single full facet; every source vertex collapses onto its
/// colour's vertex. Source labels agree with the target on each facet's
/// colours and are free elsewhere.
fn collapse_morphism(rng: &mut impl Rng, src_shape: &SimplicialModel) -> Option<PointedMorphism> {
    let vocab = src_shape.vocab().clone();
    let agents = vocab.agent_count();
    let target_label = random_labels(rng, &vocab);
    let dst = SimplicialModel::from_parts(
        vocab.clone(),
        (0..agents).map(|a| Vertex::new(a, AgentId(a))).collect(),
        vec![(Facet::new(0..agents), target_label.clone())],
    );
    let facets: Vec<(Facet, BTreeSet<Atom>)> = (0..src_shape.complex().facet_count())
        .map(|i| {
            let owners = src_shape.complex().facet_colours(i);
            (
                src_shape.complex().facets()[i].clone(),
                jitter_outside(rng, &vocab, &target_label, &owners),
            )
        })
        .collect();
    let src =
        SimplicialModel::from_parts(vocab, src_shape.complex().vertices().to_vec(), facets);
    let map = SimplicialMap::new(
        src.complex().vertices().iter().map(|v| (v.id, v.colour.0)),
    );
    let src_facet = rng.gen_range(0..src.complex().facet_count());
    Some(PointedMorphism { map, src, src_facet, dst, dst_facet: 0 })
}

/// Target extends some source facets with fresh vertices of missing colours,
/// so agents dead at the source come alive at the target.
fn extension_morphism(rng: &mut impl Rng, src: &SimplicialModel) -> Option<PointedMorphism> {
    let vocab = src.vocab().clone();
    let mut next_id = src.complex().vertices().iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut vertices = src.complex().vertices().to_vec();
    let mut facets: Vec<(Facet, BTreeSet<Atom>)> = Vec::new();
    let mut extended_pair: Option<(usize, BTreeSet<usize>)> = None;
    for (i, facet) in src.complex().facets().iter().enumerate() {
        let colours = src.complex().facet_colours(i);
        let missing: Vec<AgentId> =
            vocab.agent_ids().filter(|a| !colours.contains(a)).collect();
        let extend = !missing.is_empty() && rng.gen_bool(0.5);
        if extend {
            let mut grown = facet.vertices.clone();
            let mut label = src.label(i).clone();
            let chosen: Vec<AgentId> =
                missing.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
            for a in chosen {
                vertices.push(Vertex::new(next_id, a));
                grown.insert(next_id);
                next_id += 1;
                for atom in vocab.atoms().iter().filter(|at| at.owner == a) {
                    if rng.gen_bool(0.5) {
                        label.insert(atom.clone());
                    }
                }
            }
            if grown.len() > facet.vertices.len() && extended_pair.is_none() {
                extended_pair = Some((i, grown.clone()));
            }
            facets.push((Facet { name: None, vertices: grown }, label));
        } else {
            facets.push((facet.clone(), src.label(i).clone()));
        }
    }
    // Drop facets absorbed by an extension, keeping labels attached.
    let sets: Vec<BTreeSet<usize>> = facets.iter().map(|(f, _)| f.vertices.clone()).collect();
    let facets: Vec<(Facet, BTreeSet<Atom>)> = facets
        .iter()
        .enumerate()
        .filter(|(i, (f, _))| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, s)| j != *i && f.vertices.is_subset(s) && (f.vertices != *s || *i > j))
        })
        .map(|(_, pair)| pair.clone())
        .collect();
    let used: BTreeSet<usize> =
        facets.iter().flat_map(|(f, _)| f.vertices.iter().copied()).collect();
    let vertices = vertices.into_iter().filter(|v| used.contains(&v.id)).collect();
    let dst = SimplicialModel::from_parts(vocab, vertices, facets);
    let map = SimplicialMap::identity(src.complex());
    let (src_facet, grown) = match extended_pair {
        Some(pair) => pair,
        None => (0, src.complex().facets().first()?.vertices.clone()),
    };
    let dst_facet = dst
        .complex()
        .facets()
        .iter()
        .position(|f| grown.is_subset(&f.vertices) || f.vertices == grown)?;
    Some(PointedMorphism { map, src: src.clone(), src_facet, dst, dst_facet })
}

/// Draws pointed morphisms from the three construction families and keeps
/// the ones the real checker accepts.
pub fn random_pointed_morphism(rng: &mut impl Rng) -> Option<PointedMorphism> {
    let agents = rng.gen_range(2..=3);
    let base = random_simplicial_model(rng, agents, 4, 3);
    if base.complex().facet_count() == 0 {
        return None;
    }
    let candidate = match rng.gen_range(0..3) {
        0 => inclusion_morphism(rng, &base),
        1 => collapse_morphism(rng, &base),
        _ => extension_morphism(rng, &base),
    }?;
    let ok = check_simplicial_model_morphism(&candidate.map, &candidate.src, &candidate.dst)
        .is_ok();
    let image = candidate
        .map
        .image(&candidate.src.complex().facets()[candidate.src_facet].vertices)?;
    let pointed =
        image.is_subset(&candidate.dst.complex().facets()[candidate.dst_facet].vertices);
    (ok && pointed).then_some(candidate)
}
