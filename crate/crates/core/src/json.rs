//! The JSON file formats for simplicial models and partial epistemic models,
//! plus the morphism file used by the command line.
//!
//! A complex file has `agents`, optional `atoms`, `vertices` and `facets`;
//! a frame file has `agents`, optional `atoms`, `worlds` and `rel`. Atoms
//! are written `name@agent`. Relation pairs are unordered on input — the
//! symmetric duplicate may be omitted — and are normalised on output to one
//! sorted pair each.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Facet, SimplicialModel, Vertex};
use crate::frame::{FrameMorphism, PartialEpistemicModel, World};
use crate::vocab::{Atom, Vocabulary};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Vocab(#[from] crate::vocab::VocabError),
    #[error("{0}")]
    Frame(#[from] crate::frame::FrameBuildError),
    #[error("unknown world `{0}` in relation for agent `{1}`")]
    UnknownWorld(String, String),
    #[error("file has neither `facets` nor `worlds`; not a model file")]
    UnknownKind,
    #[error("morphism file has neither `vertex_map` nor `world_map`")]
    NoMap,
    #[error("world `{0}` is not a world of the morphism source")]
    UnknownSourceWorld(String),
    #[error("world `{0}` is not a world of the morphism target")]
    UnknownTargetWorld(String),
}

#[derive(Serialize, Deserialize)]
struct AtomDto {
    name: String,
    owner: String,
}

#[derive(Serialize, Deserialize)]
struct VertexDto {
    id: usize,
    colour: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FacetDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ComplexDto {
    agents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<AtomDto>,
    vertices: Vec<VertexDto>,
    facets: Vec<FacetDto>,
}

#[derive(Serialize, Deserialize)]
struct WorldDto {
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FrameDto {
    agents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<AtomDto>,
    worlds: Vec<WorldDto>,
    rel: BTreeMap<String, Vec<(String, String)>>,
}

fn vocab_from_dto(agents: Vec<String>, atoms: Vec<AtomDto>) -> Result<Vocabulary, FormatError> {
    let mut vocab = Vocabulary::new(agents)?;
    for atom in atoms {
        let owner = vocab.require_agent(&atom.owner)?;
        vocab.declare_atom(atom.name, owner)?;
    }
    Ok(vocab)
}

fn atoms_from_texts(
    vocab: &Vocabulary,
    texts: &[String],
) -> Result<BTreeSet<Atom>, FormatError> {
    texts.iter().map(|t| Ok(vocab.parse_atom(t)?)).collect()
}

pub fn simplicial_model_from_json(text: &str) -> Result<SimplicialModel, FormatError> {
    let dto: ComplexDto = serde_json::from_str(text)?;
    let vocab = vocab_from_dto(dto.agents, dto.atoms)?;
    let vertices = dto
        .vertices
        .into_iter()
        .map(|v| {
            let colour = vocab.require_agent(&v.colour)?;
            Ok(Vertex { id: v.id, colour, tag: v.tag })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let facets = dto
        .facets
        .into_iter()
        .map(|f| {
            let labels = atoms_from_texts(&vocab, &f.labels)?;
            Ok((Facet { name: f.name, vertices: f.vertices.into_iter().collect() }, labels))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(SimplicialModel::from_parts(vocab, vertices, facets))
}

pub fn simplicial_model_to_json(s: &SimplicialModel) -> String {
    let c = s.complex();
    let vocab = c.vocab();
    let dto = ComplexDto {
        agents: vocab.agent_names().to_vec(),
        atoms: vocab
            .atoms()
            .iter()
            .map(|a| AtomDto { name: a.name.clone(), owner: vocab.agent_name(a.owner).into() })
            .collect(),
        vertices: c
            .vertices()
            .iter()
            .map(|v| VertexDto {
                id: v.id,
                colour: vocab.agent_name(v.colour).into(),
                tag: v.tag.clone(),
            })
            .collect(),
        facets: c
            .facets()
            .iter()
            .enumerate()
            .map(|(i, f)| FacetDto {
                name: f.name.clone(),
                vertices: f.vertices.iter().copied().collect(),
                labels: s.label(i).iter().map(|a| vocab.atom_text(a)).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("serialisable")
}

pub fn frame_from_json(text: &str) -> Result<PartialEpistemicModel, FormatError> {
    let dto: FrameDto = serde_json::from_str(text)?;
    let vocab = vocab_from_dto(dto.agents, dto.atoms)?;
    let mut worlds = Vec::new();
    for w in dto.worlds {
        let labels = atoms_from_texts(&vocab, &w.labels)?;
        worlds.push(World { name: w.name, labels });
    }
    let index: BTreeMap<&str, usize> =
        worlds.iter().enumerate().map(|(i, w)| (w.name.as_str(), i)).collect();
    let mut rel = vec![BTreeSet::new(); vocab.agent_count()];
    for (agent_name, pairs) in &dto.rel {
        let agent = vocab.require_agent(agent_name)?;
        for (u, v) in pairs {
            let ui = *index
                .get(u.as_str())
                .ok_or_else(|| FormatError::UnknownWorld(u.clone(), agent_name.clone()))?;
            let vi = *index
                .get(v.as_str())
                .ok_or_else(|| FormatError::UnknownWorld(v.clone(), agent_name.clone()))?;
            rel[agent.0].insert((ui, vi));
            rel[agent.0].insert((vi, ui));
        }
    }
    Ok(PartialEpistemicModel::new(vocab, worlds, rel)?)
}

pub fn frame_to_json(m: &PartialEpistemicModel) -> String {
    let vocab = m.vocab();
    let rel = vocab
        .agent_ids()
        .map(|a| {
            let pairs: Vec<(String, String)> = m
                .rel(a)
                .iter()
                .filter(|(u, v)| u <= v)
                .map(|&(u, v)| (m.world_name(u).to_string(), m.world_name(v).to_string()))
                .collect();
            (vocab.agent_name(a).to_string(), pairs)
        })
        .filter(|(_, pairs)| !pairs.is_empty())
        .collect();
    let dto = FrameDto {
        agents: vocab.agent_names().to_vec(),
        atoms: vocab
            .atoms()
            .iter()
            .map(|a| AtomDto { name: a.name.clone(), owner: vocab.agent_name(a.owner).into() })
            .collect(),
        worlds: m
            .worlds()
            .iter()
            .map(|w| WorldDto {
                name: w.name.clone(),
                labels: w.labels.iter().map(|a| vocab.atom_text(a)).collect(),
            })
            .collect(),
        rel,
    };
    serde_json::to_string_pretty(&dto).expect("serialisable")
}

/// Either kind of model file, detected by its top-level keys.
pub enum ModelFile {
    Simplicial(SimplicialModel),
    Frame(PartialEpistemicModel),
}

pub fn model_from_json(text: &str) -> Result<ModelFile, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("facets").is_some() {
        Ok(ModelFile::Simplicial(simplicial_model_from_json(text)?))
    } else if value.get("worlds").is_some() {
        Ok(ModelFile::Frame(frame_from_json(text)?))
    } else {
        Err(FormatError::UnknownKind)
    }
}

/// The morphism file: a vertex map (simplicial) or a world map (frame),
/// optionally bundled with the paths of its endpoint models and a pointed
/// pair of facet/world names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_map: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world_map: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<(String, String)>,
}

pub fn morphism_from_json(text: &str) -> Result<MorphismFile, FormatError> {
    let file: MorphismFile = serde_json::from_str(text)?;
    if file.vertex_map.is_none() && file.world_map.is_none() {
        return Err(FormatError::NoMap);
    }
    Ok(file)
}

/// Resolves a world map against its endpoint models. Worlds missing from
/// the map get empty images, which the morphism check then rejects.
pub fn resolve_world_map(
    map: &BTreeMap<String, Vec<String>>,
    src: &PartialEpistemicModel,
    dst: &PartialEpistemicModel,
) -> Result<FrameMorphism, FormatError> {
    let mut images = vec![BTreeSet::new(); src.world_count()];
    for (from, to) in map {
        let u = src
            .world_by_name(from)
            .ok_or_else(|| FormatError::UnknownSourceWorld(from.clone()))?;
        for name in to {
            let v = dst
                .world_by_name(name)
                .ok_or_else(|| FormatError::UnknownTargetWorld(name.clone()))?;
            images[u].insert(v);
        }
    }
    Ok(FrameMorphism::new(images))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crashgen::gen_crash_model;
    use crate::functors::kappa_obj;

    fn crash_model() -> SimplicialModel {
        gen_crash_model(
            &["a".into(), "b".into(), "c".into()],
            &["1".into(), "2".into(), "3".into()],
            1,
            2,
        )
        .unwrap()
    }

    #[test]
    fn complex_json_round_trips() {
        let s = crash_model();
        let text = simplicial_model_to_json(&s);
        let back = simplicial_model_from_json(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn frame_json_round_trips() {
        let m = kappa_obj(&crash_model());
        let text = frame_to_json(&m);
        let back = frame_from_json(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn symmetric_duplicates_are_optional() {
        let text = r#"{
            "agents": ["a"],
            "worlds": [{"name": "u"}, {"name": "v"}],
            "rel": {"a": [["u","u"], ["v","v"], ["u","v"]]}
        }"#;
        let m = frame_from_json(text).unwrap();
        assert!(m.related(crate::vocab::AgentId(0), 1, 0));
        assert!(m.validate_per().is_valid());
    }

    #[test]
    fn kind_detection() {
        let s = crash_model();
        match model_from_json(&simplicial_model_to_json(&s)).unwrap() {
            ModelFile::Simplicial(_) => {}
            ModelFile::Frame(_) => panic!("expected a complex"),
        }
        match model_from_json(&frame_to_json(&kappa_obj(&s))).unwrap() {
            ModelFile::Frame(_) => {}
            ModelFile::Simplicial(_) => panic!("expected a frame"),
        }
        assert!(matches!(model_from_json("{}"), Err(FormatError::UnknownKind)));
    }

    #[test]
    fn errors_name_the_offender() {
        let text = r#"{
            "agents": ["a"],
            "worlds": [{"name": "u"}],
            "rel": {"a": [["u","zz"]]}
        }"#;
        let err = frame_from_json(text).unwrap_err();
        assert!(err.to_string().contains("zz"));
        let bad_colour = r#"{
            "agents": ["a"],
            "vertices": [{"id": 0, "colour": "q"}],
            "facets": [{"vertices": [0]}]
        }"#;
        assert!(simplicial_model_from_json(bad_colour).is_err());
    }
}
