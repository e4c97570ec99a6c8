//! Chromatic simplicial complexes and simplicial models.
//!
//! A complex stores its vertices (each coloured by an agent) and its facets,
//! the inclusion-maximal simplexes. The full simplex family is the downward
//! closure of the facets and is never materialised. A simplicial model
//! additionally labels every facet with a set of atomic propositions.
//!
//! Facets are kept in a canonical order (sorted vertex-id sequences compared
//! lexicographically) so that facet indices are deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::vocab::{AgentId, Atom, Vocabulary};

/// A coloured vertex. The optional tag carries a human-readable payload such
/// as a crash-model view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    pub colour: AgentId,
    pub tag: Option<String>,
}

impl Vertex {
    pub fn new(id: usize, colour: AgentId) -> Self {
        Vertex { id, colour, tag: None }
    }

    pub fn with_tag(id: usize, colour: AgentId, tag: impl Into<String>) -> Self {
        Vertex { id, colour, tag: Some(tag.into()) }
    }
}

/// A facet: an inclusion-maximal simplex, given by its vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub name: Option<String>,
    pub vertices: BTreeSet<usize>,
}

impl Facet {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        Facet { name: None, vertices: vertices.into_iter().collect() }
    }

    pub fn named(name: impl Into<String>, vertices: impl IntoIterator<Item = usize>) -> Self {
        Facet { name: Some(name.into()), vertices: vertices.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexViolation {
    DuplicateVertexId { id: usize },
    UnknownVertex { facet: usize, id: usize },
    EmptyFacet { facet: usize },
    ColourClash { facet: usize, first: usize, second: usize },
    NonMaximalFacet { facet: usize, superset: usize },
    OrphanVertex { id: usize },
    UndeclaredAtom { facet: usize, atom: String },
}

impl fmt::Display for ComplexViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexViolation::DuplicateVertexId { id } => {
                write!(f, "duplicate vertex id {id}")
            }
            ComplexViolation::UnknownVertex { facet, id } => {
                write!(f, "facet {facet} references unknown vertex {id}")
            }
            ComplexViolation::EmptyFacet { facet } => write!(f, "facet {facet} is empty"),
            ComplexViolation::ColourClash { facet, first, second } => {
                write!(f, "facet {facet} has same-coloured vertices {first} and {second}")
            }
            ComplexViolation::NonMaximalFacet { facet, superset } => {
                write!(f, "facet {facet} is contained in facet {superset}")
            }
            ComplexViolation::OrphanVertex { id } => {
                write!(f, "vertex {id} does not occur in any facet")
            }
            ComplexViolation::UndeclaredAtom { facet, atom } => {
                write!(f, "facet {facet} is labelled with undeclared atom {atom}")
            }
        }
    }
}

/// Outcome of a validation pass; empty iff the structure is well-formed.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<ComplexViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("generator {index} is empty")]
    EmptyGenerator { index: usize },
    #[error("generator {index} references unknown vertex {id}")]
    UnknownVertex { index: usize, id: usize },
    #[error("generator {index} has same-coloured vertices {first} and {second}")]
    ColourClash { index: usize, first: usize, second: usize },
}

/// A chromatic simplicial complex: coloured vertices plus maximal facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticComplex {
    vocab: Vocabulary,
    vertices: Vec<Vertex>,
    facets: Vec<Facet>,
}

/// Returns the inclusion-maximal members of `sets`, canonically ordered and
/// with duplicates collapsed.
pub fn inclusion_maxima(sets: &[BTreeSet<usize>]) -> Vec<BTreeSet<usize>> {
    let mut maxima: Vec<BTreeSet<usize>> = Vec::new();
    for s in sets {
        if maxima.iter().any(|m| s.is_subset(m)) {
            continue;
        }
        maxima.retain(|m| !m.is_subset(s));
        maxima.push(s.clone());
    }
    maxima.sort_by_key(canonical_key);
    maxima
}

fn canonical_key(set: &BTreeSet<usize>) -> Vec<usize> {
    set.iter().copied().collect()
}

/// Computes the facets spanned by a family of chromatic simplexes: checks
/// each generator against the vertex table and keeps the inclusion-maximal
/// ones in canonical order.
pub fn facets_from_generators(
    vertices: &[Vertex],
    generators: &[BTreeSet<usize>],
) -> Result<Vec<BTreeSet<usize>>, GeneratorError> {
    let colour_of: BTreeMap<usize, AgentId> =
        vertices.iter().map(|v| (v.id, v.colour)).collect();
    for (index, g) in generators.iter().enumerate() {
        if g.is_empty() {
            return Err(GeneratorError::EmptyGenerator { index });
        }
        let mut seen: BTreeMap<AgentId, usize> = BTreeMap::new();
        for &id in g {
            let colour = *colour_of
                .get(&id)
                .ok_or(GeneratorError::UnknownVertex { index, id })?;
            if let Some(&first) = seen.get(&colour) {
                return Err(GeneratorError::ColourClash { index, first, second: id });
            }
            seen.insert(colour, id);
        }
    }
    Ok(inclusion_maxima(generators))
}

impl ChromaticComplex {
    /// Builds a complex from raw parts. Facets are canonically sorted;
    /// nothing is validated — run [`ChromaticComplex::validate`] for that.
    pub fn new(vocab: Vocabulary, mut vertices: Vec<Vertex>, mut facets: Vec<Facet>) -> Self {
        vertices.sort_by_key(|v| v.id);
        facets.sort_by_key(|x| canonical_key(&x.vertices));
        ChromaticComplex { vocab, vertices, facets }
    }

    /// Builds a complex whose facets are the inclusion-maxima of the given
    /// generator simplexes.
    pub fn from_generators(
        vocab: Vocabulary,
        vertices: Vec<Vertex>,
        generators: &[BTreeSet<usize>],
    ) -> Result<Self, GeneratorError> {
        let facets = facets_from_generators(&vertices, generators)?
            .into_iter()
            .map(Facet::new)
            .collect();
        Ok(ChromaticComplex::new(vocab, vertices, facets))
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn colour_of(&self, id: usize) -> Option<AgentId> {
        self.vertex(id).map(|v| v.colour)
    }

    /// χ(X): the colours of a facet's vertices.
    pub fn facet_colours(&self, facet: usize) -> BTreeSet<AgentId> {
        self.facets[facet]
            .vertices
            .iter()
            .filter_map(|&id| self.colour_of(id))
            .collect()
    }

    /// The vertex of `facet` coloured `agent`, when it exists. In a valid
    /// complex it is unique, which is what makes colour-selected subfaces
    /// well-defined.
    pub fn coloured_vertex(&self, facet: usize, agent: AgentId) -> Option<usize> {
        self.facets[facet]
            .vertices
            .iter()
            .copied()
            .find(|&id| self.colour_of(id) == Some(agent))
    }

    /// Whether `a ∈ χ(X ∩ Y)`: the two facets share their `a`-coloured vertex.
    pub fn share_colour(&self, x: usize, y: usize, agent: AgentId) -> bool {
        match self.coloured_vertex(x, agent) {
            Some(v) => self.facets[y].vertices.contains(&v),
            None => false,
        }
    }

    /// Resolves a facet by declared name or by canonical index.
    pub fn facet_by_name(&self, key: &str) -> Option<usize> {
        if let Some(i) = self
            .facets
            .iter()
            .position(|f| f.name.as_deref() == Some(key))
        {
            return Some(i);
        }
        key.parse::<usize>().ok().filter(|&i| i < self.facets.len())
    }

    pub fn facet_display_name(&self, facet: usize) -> String {
        match &self.facets[facet].name {
            Some(n) => n.clone(),
            None => format!("{facet}"),
        }
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                violations.push(ComplexViolation::DuplicateVertexId { id: v.id });
            }
        }
        let colour_of: BTreeMap<usize, AgentId> =
            self.vertices.iter().map(|v| (v.id, v.colour)).collect();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for (fi, facet) in self.facets.iter().enumerate() {
            if facet.vertices.is_empty() {
                violations.push(ComplexViolation::EmptyFacet { facet: fi });
            }
            let mut by_colour: BTreeMap<AgentId, usize> = BTreeMap::new();
            for &id in &facet.vertices {
                used.insert(id);
                match colour_of.get(&id) {
                    None => violations.push(ComplexViolation::UnknownVertex { facet: fi, id }),
                    Some(&c) => {
                        if let Some(&first) = by_colour.get(&c) {
                            violations.push(ComplexViolation::ColourClash {
                                facet: fi,
                                first,
                                second: id,
                            });
                        }
                        by_colour.insert(c, id);
                    }
                }
            }
            for (fj, other) in self.facets.iter().enumerate() {
                if fi != fj
                    && !facet.vertices.is_empty()
                    && facet.vertices.is_subset(&other.vertices)
                    && (facet.vertices != other.vertices || fi > fj)
                {
                    violations.push(ComplexViolation::NonMaximalFacet { facet: fi, superset: fj });
                }
            }
        }
        for v in &self.vertices {
            if !used.contains(&v.id) {
                violations.push(ComplexViolation::OrphanVertex { id: v.id });
            }
        }
        ValidationReport { violations }
    }

    /// A complex is pure when all facets have the same dimension.
    pub fn is_pure(&self) -> bool {
        let mut sizes = self.facets.iter().map(|f| f.vertices.len());
        match sizes.next() {
            None => true,
            Some(first) => sizes.all(|s| s == first),
        }
    }

    /// `Some(dim)` when the complex is pure and non-empty.
    pub fn pure_dimension(&self) -> Option<usize> {
        if self.is_pure() {
            self.facets.first().map(|f| f.vertices.len() - 1)
        } else {
            None
        }
    }

    /// Largest facet dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.vertices.len() - 1).max()
    }
}

/// A simplicial model: a complex with each facet labelled by the atoms true
/// in the corresponding world. Labels may mention atoms of agents outside
/// the facet's colours; the crash-failure generator relies on that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialModel {
    complex: ChromaticComplex,
    labels: Vec<BTreeSet<Atom>>,
}

impl SimplicialModel {
    /// Builds a model from facets paired with their labels. The pairs are
    /// co-sorted into the canonical facet order.
    pub fn from_parts(
        vocab: Vocabulary,
        vertices: Vec<Vertex>,
        facets: Vec<(Facet, BTreeSet<Atom>)>,
    ) -> Self {
        let mut facets = facets;
        facets.sort_by_key(|(x, _)| canonical_key(&x.vertices));
        let (facets, labels): (Vec<_>, Vec<_>) = facets.into_iter().unzip();
        let complex = ChromaticComplex::new(vocab, vertices, facets);
        SimplicialModel { complex, labels }
    }

    /// Wraps a bare complex with empty labels.
    pub fn unlabelled(complex: ChromaticComplex) -> Self {
        let labels = vec![BTreeSet::new(); complex.facet_count()];
        SimplicialModel { complex, labels }
    }

    pub fn complex(&self) -> &ChromaticComplex {
        &self.complex
    }

    pub fn vocab(&self) -> &Vocabulary {
        self.complex.vocab()
    }

    pub fn label(&self, facet: usize) -> &BTreeSet<Atom> {
        &self.labels[facet]
    }

    pub fn labels(&self) -> &[BTreeSet<Atom>] {
        &self.labels
    }

    /// Complex validation plus the check that labels only use declared atoms.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.complex.validate();
        for (fi, label) in self.labels.iter().enumerate() {
            for atom in label {
                if !self.vocab().has_atom(atom) {
                    report.violations.push(ComplexViolation::UndeclaredAtom {
                        facet: fi,
                        atom: self.vocab().atom_text(atom),
                    });
                }
            }
        }
        report
    }
}

/// A vertex map between two complexes. Totality on the source is part of the
/// morphism check, not of construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialMap {
    map: BTreeMap<usize, usize>,
}

impl SimplicialMap {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        SimplicialMap { map: pairs.into_iter().collect() }
    }

    pub fn identity(c: &ChromaticComplex) -> Self {
        SimplicialMap { map: c.vertices().iter().map(|v| (v.id, v.id)).collect() }
    }

    pub fn apply(&self, v: usize) -> Option<usize> {
        self.map.get(&v).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    /// Image of a vertex set; `None` if some vertex is unmapped.
    pub fn image(&self, set: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
        set.iter().map(|&v| self.apply(v)).collect()
    }

    /// `g ∘ self`: apply `self` first, then `g`.
    pub fn then(&self, g: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            map: self
                .map
                .iter()
                .filter_map(|(&a, &b)| g.apply(b).map(|c| (a, c)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    AgentMismatch,
    Unmapped { vertex: usize },
    UnknownSource { vertex: usize },
    UnknownTarget { vertex: usize, image: usize },
    ColourChanged { vertex: usize, image: usize },
    FacetImageNotSimplex { facet: usize, image: BTreeSet<usize> },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::AgentMismatch => write!(f, "source and target disagree on agents"),
            MapViolation::Unmapped { vertex } => write!(f, "vertex {vertex} has no image"),
            MapViolation::UnknownSource { vertex } => {
                write!(f, "map mentions unknown source vertex {vertex}")
            }
            MapViolation::UnknownTarget { vertex, image } => {
                write!(f, "vertex {vertex} maps to unknown vertex {image}")
            }
            MapViolation::ColourChanged { vertex, image } => {
                write!(f, "vertex {vertex} maps to {image} of a different colour")
            }
            MapViolation::FacetImageNotSimplex { facet, image } => {
                write!(f, "image {image:?} of facet {facet} is not a simplex of the target")
            }
        }
    }
}

/// Checks that `f` is a chromatic simplicial map `src → dst`: total on the
/// source vertices, colour-preserving, and sending every facet into some
/// facet of the target.
pub fn check_simplicial_map(
    f: &SimplicialMap,
    src: &ChromaticComplex,
    dst: &ChromaticComplex,
) -> Result<(), MapViolation> {
    if !src.vocab().same_agents(dst.vocab()) {
        return Err(MapViolation::AgentMismatch);
    }
    for (v, _) in f.pairs() {
        if src.vertex(v).is_none() {
            return Err(MapViolation::UnknownSource { vertex: v });
        }
    }
    for v in src.vertices() {
        let image = f.apply(v.id).ok_or(MapViolation::Unmapped { vertex: v.id })?;
        let target = dst
            .vertex(image)
            .ok_or(MapViolation::UnknownTarget { vertex: v.id, image })?;
        if target.colour != v.colour {
            return Err(MapViolation::ColourChanged { vertex: v.id, image });
        }
    }
    for (fi, facet) in src.facets().iter().enumerate() {
        let image = f.image(&facet.vertices).expect("totality checked above");
        let contained = dst.facets().iter().any(|g| image.is_subset(&g.vertices));
        if !contained {
            return Err(MapViolation::FacetImageNotSimplex { facet: fi, image });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelMorphismViolation {
    Map(MapViolation),
    LabelMismatch {
        src_facet: usize,
        dst_facet: usize,
        src_restricted: BTreeSet<Atom>,
        dst_restricted: BTreeSet<Atom>,
    },
}

impl fmt::Display for ModelMorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelMorphismViolation::Map(v) => write!(f, "{v}"),
            ModelMorphismViolation::LabelMismatch { src_facet, dst_facet, .. } => write!(
                f,
                "labels of facets {src_facet} (source) and {dst_facet} (target) disagree on the source colours"
            ),
        }
    }
}

/// Restricts an atom set to the atoms owned by agents in `owners`.
pub fn restrict_atoms(atoms: &BTreeSet<Atom>, owners: &BTreeSet<AgentId>) -> BTreeSet<Atom> {
    atoms.iter().filter(|a| owners.contains(&a.owner)).cloned().collect()
}

/// Checks that `f` is a morphism of simplicial models: a chromatic simplicial
/// map such that whenever `f(X) ⊆ Y`, the labels of `X` and `Y` agree on the
/// atoms of the agents coloured in `X`.
pub fn check_simplicial_model_morphism(
    f: &SimplicialMap,
    src: &SimplicialModel,
    dst: &SimplicialModel,
) -> Result<(), ModelMorphismViolation> {
    check_simplicial_map(f, src.complex(), dst.complex()).map_err(ModelMorphismViolation::Map)?;
    for (fi, facet) in src.complex().facets().iter().enumerate() {
        let image = f.image(&facet.vertices).expect("map is total");
        let owners = src.complex().facet_colours(fi);
        let src_restricted = restrict_atoms(src.label(fi), &owners);
        for (gi, target) in dst.complex().facets().iter().enumerate() {
            if image.is_subset(&target.vertices) {
                let dst_restricted = restrict_atoms(dst.label(gi), &owners);
                if src_restricted != dst_restricted {
                    return Err(ModelMorphismViolation::LabelMismatch {
                        src_facet: fi,
                        dst_facet: gi,
                        src_restricted,
                        dst_restricted,
                    });
                }
            }
        }
    }
    Ok(())
}
