//! Vertex/edge structures for unit-distance candidate graphs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph JSON: {0}")]
    Json(String),
    #[error("empty vertex id")]
    EmptyVertexId,
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}` in edge list")]
    UnknownVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
}

/// An undirected simple graph over string vertex ids.
///
/// Edges are stored as index pairs, normalized so the smaller index comes
/// first and the list is sorted; two graphs over the same vertex list are
/// equal iff they have the same edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl Graph {
    pub fn new<V, E, S, T>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (T, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        for (i, v) in vertices.iter().enumerate() {
            if v.is_empty() {
                return Err(GraphError::EmptyVertexId);
            }
            if vertices[..i].contains(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let index = |id: &str| -> Result<usize, GraphError> {
            vertices
                .iter()
                .position(|v| v == id)
                .ok_or_else(|| GraphError::UnknownVertex(id.into()))
        };
        let mut normalized = Vec::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let (i, j) = (index(a)?, index(b)?);
            if i == j {
                return Err(GraphError::SelfLoop(a.into()));
            }
            let e = (i.min(j), i.max(j));
            if normalized.contains(&e) {
                return Err(GraphError::DuplicateEdge(a.into(), b.into()));
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        Ok(Graph { vertices, edges: normalized })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges as normalized `(i, j)` index pairs with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Parses `{"vertices": [...], "edges": [["a","b"], ...]}`.
    pub fn from_json(input: &str) -> Result<Graph, GraphError> {
        let file: GraphFile =
            serde_json::from_str(input).map_err(|e| GraphError::Json(e.to_string()))?;
        Graph::new(file.vertices, file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(i, j)| (self.vertices[i].clone(), self.vertices[j].clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    /// Named graphs available without file plumbing: `k33`, `k44`,
    /// `triangle`, `c4`, `moser`.
    pub fn builtin(name: &str) -> Option<Graph> {
        let complete_bipartite = |k: usize| {
            let us: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
            let vs: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            for u in &us {
                for v in &vs {
                    edges.push((u.clone(), v.clone()));
                }
            }
            Graph::new(us.into_iter().chain(vs), edges).expect("valid builtin")
        };
        match name {
            "k33" => Some(complete_bipartite(3)),
            "k44" => Some(complete_bipartite(4)),
            "triangle" => Some(
                Graph::new(["u1", "u2", "u3"], [("u1", "u2"), ("u2", "u3"), ("u1", "u3")])
                    .expect("valid builtin"),
            ),
            "c4" => Some(
                Graph::new(
                    ["u1", "u2", "u3", "u4"],
                    [("u1", "u2"), ("u2", "u3"), ("u3", "u4"), ("u4", "u1")],
                )
                .expect("valid builtin"),
            ),
            "moser" => Some(
                Graph::new(
                    ["a", "b", "c", "d", "e", "f", "g"],
                    [
                        ("a", "b"),
                        ("a", "c"),
                        ("b", "c"),
                        ("b", "d"),
                        ("c", "d"),
                        ("a", "e"),
                        ("a", "f"),
                        ("e", "f"),
                        ("e", "g"),
                        ("f", "g"),
                        ("d", "g"),
                    ],
                )
                .expect("valid builtin"),
            ),
            _ => None,
        }
    }

    /// Unit-distance plane embedding for builtins that have one, aligned
    /// with `vertices()`. The first vertex sits at the origin and the second
    /// on the positive x-axis, so the embedding is already pinned.
    pub fn builtin_embedding(name: &str) -> Option<Vec<[f64; 2]>> {
        let s3 = 3f64.sqrt() / 2.0;
        match name {
            "triangle" => Some(vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3]]),
            "c4" => Some(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
            "moser" => {
                // two rhombi of unit triangles sharing vertex a, one rotated
                // so the far tips d and g end up exactly unit distance apart
                let base = [[1.0, 0.0], [0.5, s3], [1.5, s3]];
                let theta = 2.0 * (1.0 / (2.0 * 3f64.sqrt())).asin();
                let (sin, cos) = theta.sin_cos();
                let rot = |p: [f64; 2]| [cos * p[0] - sin * p[1], sin * p[0] + cos * p[1]];
                let mut pts = vec![[0.0, 0.0]];
                pts.extend(base);
                pts.extend(base.map(rot));
                Some(pts)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = Graph::builtin("k33").unwrap();
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parses_spec_format() {
        let g = Graph::from_json(r#"{"vertices": ["a", "b"], "edges": [["b", "a"]]}"#).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(matches!(
            Graph::new(["a", "a"], [("a", "a")]),
            Err(GraphError::DuplicateVertex(_))
        ));
        assert!(matches!(
            Graph::new(["a", "b"], [("a", "a")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            Graph::new(["a", "b"], [("a", "b"), ("b", "a")]),
            Err(GraphError::DuplicateEdge(_, _))
        ));
        assert!(matches!(
            Graph::new(["a", "b"], [("a", "c")]),
            Err(GraphError::UnknownVertex(_))
        ));
        assert!(Graph::from_json("{").is_err());
        assert!(Graph::from_json(r#"{"vertices": ["a"]}"#).is_err());
    }

    #[test]
    fn builtin_sizes() {
        let sizes = [
            ("triangle", 3, 3),
            ("c4", 4, 4),
            ("k33", 6, 9),
            ("k44", 8, 16),
            ("moser", 7, 11),
        ];
        for (name, nv, ne) in sizes {
            let g = Graph::builtin(name).unwrap();
            assert_eq!((g.vertex_count(), g.edge_count()), (nv, ne), "{name}");
        }
        assert!(Graph::builtin("petersen").is_none());
    }

    #[test]
    fn builtin_embeddings_have_unit_edges() {
        for name in ["triangle", "c4", "moser"] {
            let g = Graph::builtin(name).unwrap();
            let pts = Graph::builtin_embedding(name).unwrap();
            assert_eq!(pts.len(), g.vertex_count());
            assert_eq!(pts[0], [0.0, 0.0]);
            assert_eq!(pts[1][1], 0.0);
            for &(i, j) in g.edges() {
                let d2 = (pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2);
                assert!((d2 - 1.0).abs() < 1e-12, "{name} edge ({i},{j}): {d2}");
            }
        }
        assert!(Graph::builtin_embedding("k33").is_none());
    }

    #[test]
    fn moser_tips_are_distinct_vertices() {
        let g = Graph::builtin("moser").unwrap();
        let pts = Graph::builtin_embedding("moser").unwrap();
        let (d, gi) = (g.vertex_index("d").unwrap(), g.vertex_index("g").unwrap());
        assert!(g.has_edge(d, gi));
        // every non-adjacent pair is at a non-unit distance
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d2 = (pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2);
                if !g.has_edge(i, j) {
                    assert!((d2 - 1.0).abs() > 1e-3, "({i},{j}) unexpectedly unit");
                }
            }
        }
    }
}
