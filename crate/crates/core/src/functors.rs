//! The translations between simplicial models and partial epistemic models.
//!
//! `kappa` turns a complex into a frame whose worlds are the facets, two
//! facets being indistinguishable by an agent when they share that agent's
//! vertex. `sigma` goes the other way: each world becomes a facet whose
//! vertices are the equivalence classes of the alive agents. On proper
//! models the two constructions are mutually inverse up to isomorphism, and
//! [`roundtrip_frame`] / [`roundtrip_complex`] build and verify the explicit
//! witnesses on a given instance.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{
    ChromaticComplex, Facet, SimplicialMap, SimplicialModel, Vertex,
};
use crate::frame::{
    FrameMorphism, PartialEpistemicModel, ProperViolation, World,
};
use crate::vocab::AgentId;

#[derive(Debug, Error)]
pub enum FunctorError {
    #[error("model is not proper: worlds {} and {} cannot be distinguished", .0.world, .0.other)]
    NotProper(ProperViolation),
    #[error("complex is not usable: {0}")]
    InvalidComplex(String),
    #[error("round-trip witness failed: {0}")]
    Mismatch(String),
}

/// The frame of facets of a simplicial model: one world per facet, with
/// `X ∼ₐ Y` exactly when the facets share their `a`-coloured vertex, and the
/// facet labelling carried over. The result is always proper.
pub fn kappa_obj(s: &SimplicialModel) -> PartialEpistemicModel {
    let c = s.complex();
    let n = c.facet_count();
    let names: Vec<String> = {
        let declared: Vec<Option<&String>> = c.facets().iter().map(|f| f.name.as_ref()).collect();
        let all_named = declared.iter().all(|n| n.is_some());
        let unique = {
            let set: BTreeSet<_> = declared.iter().flatten().collect();
            set.len() == n
        };
        if all_named && unique {
            declared.into_iter().map(|n| n.unwrap().clone()).collect()
        } else {
            (0..n).map(|i| format!("w{i}")).collect()
        }
    };
    let worlds = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| World { name, labels: s.label(i).clone() })
        .collect();
    let rel = c
        .vocab()
        .agent_ids()
        .map(|a| {
            let mut pairs = BTreeSet::new();
            for x in 0..n {
                for y in 0..n {
                    if c.share_colour(x, y, a) {
                        pairs.insert((x, y));
                    }
                }
            }
            pairs
        })
        .collect();
    let model = PartialEpistemicModel::new(c.vocab().clone(), worlds, rel)
        .expect("facet worlds are well-formed");
    debug_assert!(model.is_proper().is_ok(), "kappa must produce a proper frame");
    model
}

/// The frame morphism induced by a simplicial map: a facet goes to the set
/// of target facets containing its image.
pub fn kappa_mor(
    f: &SimplicialMap,
    src: &ChromaticComplex,
    dst: &ChromaticComplex,
) -> FrameMorphism {
    let images = src
        .facets()
        .iter()
        .map(|facet| {
            let image = f.image(&facet.vertices).unwrap_or_default();
            dst.facets()
                .iter()
                .enumerate()
                .filter(|(_, g)| image.is_subset(&g.vertices))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    FrameMorphism::new(images)
}

/// Internal layout of a `sigma` image: the model itself plus the tables
/// linking worlds and equivalence classes to the synthesized facets and
/// vertices.
pub(crate) struct SigmaBuild {
    pub model: SimplicialModel,
    /// World index → canonical facet index of `X_w`.
    pub world_facet: Vec<usize>,
    /// (agent, class representative world) → vertex id.
    pub vertex_ids: BTreeMap<(AgentId, usize), usize>,
}

/// Representative of the `a`-class of `w`: the least world `a` cannot
/// distinguish from `w`. Requires `a` alive in `w`.
fn class_root(m: &PartialEpistemicModel, a: AgentId, w: usize) -> usize {
    (0..m.world_count())
        .find(|&v| m.related(a, w, v))
        .expect("alive agents relate the world to itself")
}

pub(crate) fn sigma_build(m: &PartialEpistemicModel) -> Result<SigmaBuild, FunctorError> {
    m.is_proper().map_err(FunctorError::NotProper)?;
    let mut keys: BTreeSet<(AgentId, usize)> = BTreeSet::new();
    for w in 0..m.world_count() {
        for a in m.alive_set(w) {
            keys.insert((a, class_root(m, a, w)));
        }
    }
    let vertex_ids: BTreeMap<(AgentId, usize), usize> =
        keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let vertices = vertex_ids
        .iter()
        .map(|(&(a, root), &id)| Vertex::with_tag(id, a, m.world_name(root)))
        .collect();
    let facets: Vec<(Facet, _)> = (0..m.world_count())
        .map(|w| {
            let members = m
                .alive_set(w)
                .into_iter()
                .map(|a| vertex_ids[&(a, class_root(m, a, w))])
                .collect::<BTreeSet<usize>>();
            let facet = Facet { name: Some(m.world_name(w).to_string()), vertices: members };
            (facet, m.labels(w).clone())
        })
        .collect();
    let model = SimplicialModel::from_parts(m.vocab().clone(), vertices, facets);
    let world_facet = (0..m.world_count())
        .map(|w| {
            let name = m.world_name(w);
            model
                .complex()
                .facets()
                .iter()
                .position(|f| f.name.as_deref() == Some(name))
                .expect("world names are unique")
        })
        .collect();
    Ok(SigmaBuild { model, world_facet, vertex_ids })
}

/// The simplicial model associated with a proper partial epistemic model:
/// a vertex per (alive agent, equivalence class), a facet per world, the
/// world's labels on its facet. Non-proper input is rejected, since then two
/// worlds would collapse onto comparable simplexes.
pub fn sigma_obj(m: &PartialEpistemicModel) -> Result<SimplicialModel, FunctorError> {
    Ok(sigma_build(m)?.model)
}

/// The simplicial map induced by a frame morphism between proper models:
/// the vertex `(a, [w]ₐ)` goes to `(a, [w']ₐ)` for any `w' ∈ f(w)`;
/// saturation of the morphism makes the choice irrelevant.
pub fn sigma_mor(
    f: &FrameMorphism,
    src: &PartialEpistemicModel,
    dst: &PartialEpistemicModel,
) -> Result<SimplicialMap, FunctorError> {
    let sb = sigma_build(src)?;
    let db = sigma_build(dst)?;
    let mut map = Vec::new();
    for (&(a, root), &vid) in &sb.vertex_ids {
        let w2 = *f
            .image(root)
            .iter()
            .next()
            .ok_or_else(|| FunctorError::Mismatch(format!("empty image for world {root}")))?;
        let target = db
            .vertex_ids
            .get(&(a, class_root(dst, a, w2)))
            .ok_or_else(|| {
                FunctorError::Mismatch(format!(
                    "agent {a} is dead in the image of world {root}"
                ))
            })?;
        map.push((vid, *target));
    }
    Ok(SimplicialMap::new(map))
}

/// `kappa` on pointed models: the distinguished facet becomes the world of
/// the same index.
pub fn kappa_pointed(s: &SimplicialModel, facet: usize) -> (PartialEpistemicModel, usize) {
    (kappa_obj(s), facet)
}

/// `sigma` on pointed models: the distinguished world becomes its facet.
pub fn sigma_pointed(
    m: &PartialEpistemicModel,
    world: usize,
) -> Result<(SimplicialModel, usize), FunctorError> {
    let sb = sigma_build(m)?;
    let facet = sb.world_facet[world];
    Ok((sb.model, facet))
}

/// Outcome of a frame round-trip: the intermediate complex, the model
/// `κσ(M)`, and the verified world bijection `w ↦ X_w`.
#[derive(Debug)]
pub struct FrameRoundtrip {
    pub complex: SimplicialModel,
    pub model: PartialEpistemicModel,
    pub witness: Vec<usize>,
}

/// Builds `κσ(M)` and verifies that `w ↦ X_w` is an isomorphism of models:
/// a label-preserving bijection that preserves and reflects every relation.
pub fn roundtrip_frame(m: &PartialEpistemicModel) -> Result<FrameRoundtrip, FunctorError> {
    let sb = sigma_build(m)?;
    let back = kappa_obj(&sb.model);
    let witness = sb.world_facet;
    if back.world_count() != m.world_count() {
        return Err(FunctorError::Mismatch(format!(
            "{} worlds became {} facets",
            m.world_count(),
            back.world_count()
        )));
    }
    let distinct: BTreeSet<usize> = witness.iter().copied().collect();
    if distinct.len() != witness.len() {
        return Err(FunctorError::Mismatch("witness is not injective".into()));
    }
    for (w, &image) in witness.iter().enumerate() {
        if m.labels(w) != back.labels(image) {
            return Err(FunctorError::Mismatch(format!(
                "labels differ at world {}",
                m.world_name(w)
            )));
        }
    }
    for a in m.vocab().agent_ids() {
        for u in 0..m.world_count() {
            for v in 0..m.world_count() {
                if m.related(a, u, v) != back.related(a, witness[u], witness[v]) {
                    return Err(FunctorError::Mismatch(format!(
                        "relation of agent {a} differs on ({u}, {v})"
                    )));
                }
            }
        }
    }
    Ok(FrameRoundtrip { complex: sb.model, model: back, witness })
}

/// Outcome of a complex round-trip: the intermediate frame, the complex
/// `σκ(C)`, and the verified vertex bijection.
#[derive(Debug)]
pub struct ComplexRoundtrip {
    pub model: PartialEpistemicModel,
    pub complex: SimplicialModel,
    pub vertex_witness: BTreeMap<usize, usize>,
}

/// Builds `σκ(C)` and verifies the canonical vertex bijection (a vertex goes
/// to the class of any facet containing it, at its own colour): it must be
/// chromatic, bijective, and carry facets onto facets with equal labels.
pub fn roundtrip_complex(s: &SimplicialModel) -> Result<ComplexRoundtrip, FunctorError> {
    let c = s.complex();
    let m = kappa_obj(s);
    let db = sigma_build(&m)?;
    let d = &db.model;
    let mut vertex_witness = BTreeMap::new();
    for v in c.vertices() {
        let z = c
            .facets()
            .iter()
            .position(|f| f.vertices.contains(&v.id))
            .ok_or_else(|| {
                FunctorError::InvalidComplex(format!("vertex {} is in no facet", v.id))
            })?;
        let target = db.vertex_ids[&(v.colour, class_root(&m, v.colour, z))];
        vertex_witness.insert(v.id, target);
    }
    let images: BTreeSet<usize> = vertex_witness.values().copied().collect();
    if images.len() != vertex_witness.len() || images.len() != d.complex().vertices().len() {
        return Err(FunctorError::Mismatch("vertex witness is not a bijection".into()));
    }
    for v in c.vertices() {
        let image = vertex_witness[&v.id];
        if d.complex().colour_of(image) != Some(v.colour) {
            return Err(FunctorError::Mismatch(format!("vertex {} changes colour", v.id)));
        }
    }
    let mut facet_images: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (fi, facet) in c.facets().iter().enumerate() {
        let image: BTreeSet<usize> =
            facet.vertices.iter().map(|v| vertex_witness[v]).collect();
        let target = d
            .complex()
            .facets()
            .iter()
            .position(|g| g.vertices == image)
            .ok_or_else(|| {
                FunctorError::Mismatch(format!("facet {fi} does not map onto a facet"))
            })?;
        if s.label(fi) != d.label(target) {
            return Err(FunctorError::Mismatch(format!("labels differ at facet {fi}")));
        }
        facet_images.insert(image.into_iter().collect());
    }
    if facet_images.len() != d.complex().facet_count() {
        return Err(FunctorError::Mismatch("facet map is not a bijection".into()));
    }
    Ok(ComplexRoundtrip { model: m, complex: db.model, vertex_witness })
}
