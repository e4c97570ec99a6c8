//! Graphviz export: complexes as clique drawings of their facets, frames as
//! labelled graphs with the alive set under each world.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::complex::ChromaticComplex;
use crate::frame::PartialEpistemicModel;

// Labels may carry graphviz escapes such as \n, so backslashes pass through.
fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Renders each facet as a clique over its vertices; vertex labels are
/// `colour:tag`. Shared edges are drawn once.
pub fn complex_to_dot(c: &ChromaticComplex) -> String {
    let mut out = String::from("graph complex {\n  node [shape=circle];\n");
    for v in c.vertices() {
        let colour = c.vocab().agent_name(v.colour);
        let label = match &v.tag {
            Some(tag) => format!("{colour}:{tag}"),
            None => colour.to_string(),
        };
        let _ = writeln!(out, "  v{} [label={}];", v.id, quote(&label));
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edge_facets: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for (fi, facet) in c.facets().iter().enumerate() {
        let ids: Vec<usize> = facet.vertices.iter().copied().collect();
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                let key = (u.min(v), u.max(v));
                edges.insert(key);
                edge_facets.entry(key).or_default().push(c.facet_display_name(fi));
            }
        }
    }
    for (u, v) in edges {
        let names = edge_facets[&(u, v)].join(",");
        let _ = writeln!(out, "  v{u} -- v{v} [label={}];", quote(&names));
    }
    out.push_str("}\n");
    out
}

/// Renders worlds as nodes annotated with their alive sets, and an edge per
/// indistinguishable pair of distinct worlds, labelled by the agents that
/// cannot tell them apart.
pub fn frame_to_dot(m: &PartialEpistemicModel) -> String {
    let vocab = m.vocab();
    let mut out = String::from("graph frame {\n  node [shape=ellipse];\n");
    for w in 0..m.world_count() {
        let alive: Vec<&str> =
            m.alive_set(w).into_iter().map(|a| vocab.agent_name(a)).collect();
        let label = format!("{}\\n{{{}}}", m.world_name(w), alive.join(","));
        let _ = writeln!(out, "  n{w} [label={}];", quote(&label));
    }
    for u in 0..m.world_count() {
        for v in u + 1..m.world_count() {
            let agents: Vec<&str> = vocab
                .agent_ids()
                .filter(|&a| m.related(a, u, v) || m.related(a, v, u))
                .map(|a| vocab.agent_name(a))
                .collect();
            if !agents.is_empty() {
                let _ = writeln!(out, "  n{u} -- n{v} [label={}];", quote(&agents.join(",")));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functors::kappa_obj;
    use crate::complex::SimplicialModel;
    use crate::testutil::{ex_proper_frame, three_triangles};

    #[test]
    fn complex_export_mentions_every_vertex_once() {
        let c = three_triangles();
        let dot = complex_to_dot(&c);
        for v in c.vertices() {
            assert!(dot.contains(&format!("v{} [", v.id)));
        }
        // The shared ab-edge of the first two triangles is drawn once,
        // attributed to both facets.
        assert_eq!(dot.matches("v1 -- v2").count(), 1);
        assert!(dot.contains("\"0,1\""));
    }

    #[test]
    fn frame_export_annotates_alive_sets() {
        let m = ex_proper_frame();
        let dot = frame_to_dot(&m);
        assert!(dot.contains("w1\\n{a,b}"));
        assert!(dot.contains("w2\\n{a,c}"));
        assert!(dot.contains("n0 -- n1 [label=\"a\"]"));
        let k = kappa_obj(&SimplicialModel::unlabelled(three_triangles()));
        let dot = frame_to_dot(&k);
        assert!(dot.contains("{a,b,c}"));
    }
}
