//! Epistemic logic KB4 over chromatic simplicial models and partial
//! epistemic Kripke models.
//!
//! The crate provides both model classes, the two functors translating
//! between them ([`functors::kappa_obj`], [`functors::sigma_obj`]), a formula
//! language with satisfaction on either side, a generator for synchronous
//! crash-failure models, and an enumeration harness that checks the KB4
//! axiom schemes semantically on small models.

pub mod complex;
pub mod crashgen;
pub mod dot;
pub mod frame;
pub mod functors;
pub mod json;
pub mod logic;
pub mod verify;
pub mod vocab;

#[cfg(test)]
pub(crate) mod testutil {
    use std::collections::BTreeSet;

    use crate::complex::{ChromaticComplex, Facet, SimplicialMap, Vertex};
    use crate::frame::{PartialEpistemicModel, World};
    use crate::vocab::{AgentId, Vocabulary};

    pub fn pairs(list: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        list.iter().copied().collect()
    }

    pub fn abc() -> Vocabulary {
        Vocabulary::new(["a", "b", "c"]).unwrap()
    }

    /// A single triangle on colours a, b, c.
    pub fn triangle() -> ChromaticComplex {
        ChromaticComplex::new(
            abc(),
            vec![
                Vertex::new(0, AgentId(0)),
                Vertex::new(1, AgentId(1)),
                Vertex::new(2, AgentId(2)),
            ],
            vec![Facet::new([0, 1, 2])],
        )
    }

    /// Three triangles in a row: the first two share an ab-edge, the last
    /// two share a c-vertex.
    pub fn three_triangles() -> ChromaticComplex {
        ChromaticComplex::new(
            abc(),
            vec![
                Vertex::new(0, AgentId(2)),
                Vertex::new(1, AgentId(0)),
                Vertex::new(2, AgentId(1)),
                Vertex::new(3, AgentId(2)),
                Vertex::new(4, AgentId(0)),
                Vertex::new(5, AgentId(1)),
            ],
            vec![Facet::new([0, 1, 2]), Facet::new([1, 2, 3]), Facet::new([3, 4, 5])],
        )
    }

    /// An ab-edge and a pair of triangles glued along their ab-edge; the map
    /// sends the lone edge onto the shared one.
    pub fn ex_morphism_pair() -> (ChromaticComplex, ChromaticComplex) {
        let edge = ChromaticComplex::new(
            abc(),
            vec![Vertex::new(0, AgentId(0)), Vertex::new(1, AgentId(1))],
            vec![Facet::new([0, 1])],
        );
        let two_triangles = ChromaticComplex::new(
            abc(),
            vec![
                Vertex::new(0, AgentId(2)),
                Vertex::new(1, AgentId(1)),
                Vertex::new(2, AgentId(0)),
                Vertex::new(3, AgentId(2)),
            ],
            vec![Facet::new([0, 1, 2]), Facet::new([1, 2, 3])],
        );
        (edge, two_triangles)
    }

    pub fn ex_morphism_map() -> SimplicialMap {
        SimplicialMap::new([(0, 2), (1, 1)])
    }

    /// Proper two-world frame: b is alive in the first world only, c in the
    /// second only, a everywhere and undiscerning.
    pub fn ex_proper_frame() -> PartialEpistemicModel {
        PartialEpistemicModel::new(
            abc(),
            vec![World::new("w1"), World::new("w2")],
            vec![
                pairs(&[(0, 0), (1, 1), (0, 1), (1, 0)]),
                pairs(&[(0, 0)]),
                pairs(&[(1, 1)]),
            ],
        )
        .unwrap()
    }

    /// Not proper: nothing alive in the second world distinguishes it from
    /// the first.
    pub fn ex_improper_frame() -> PartialEpistemicModel {
        PartialEpistemicModel::new(
            abc(),
            vec![World::new("w1"), World::new("w2")],
            vec![
                pairs(&[(0, 0), (1, 1), (0, 1), (1, 0)]),
                pairs(&[(0, 0), (1, 1), (0, 1), (1, 0)]),
                pairs(&[(0, 0)]),
            ],
        )
        .unwrap()
    }

    /// Frame counterpart of [`ex_morphism_pair`]: one world where a and b
    /// are alive, mapping into two all-alive worlds related by a and b.
    pub fn ex_morphism_frames() -> (PartialEpistemicModel, PartialEpistemicModel) {
        let src = PartialEpistemicModel::new(
            abc(),
            vec![World::new("w0")],
            vec![pairs(&[(0, 0)]), pairs(&[(0, 0)]), pairs(&[])],
        )
        .unwrap();
        let dst = PartialEpistemicModel::new(
            abc(),
            vec![World::new("v1"), World::new("v2")],
            vec![
                pairs(&[(0, 0), (1, 1), (0, 1), (1, 0)]),
                pairs(&[(0, 0), (1, 1), (0, 1), (1, 0)]),
                pairs(&[(0, 0), (1, 1)]),
            ],
        )
        .unwrap();
        (src, dst)
    }
}
