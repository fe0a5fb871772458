//! Laman counting, the (2,3)-pebble game, and rigidity-matrix rank analysis.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::Configuration;
use crate::graph::Graph;
use crate::rng::SplitMix64;

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Default trial count for randomized generic-rank evaluation.
pub const DEFAULT_TRIALS: usize = 3;

const MAX_PEBBLE_VERTICES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("pebble game supports at most {max} vertices, got {got}")]
    TooManyVertices { max: usize, got: usize },
    #[error("configuration does not cover vertex `{0}`")]
    MissingCoordinate(String),
}

/// Rigidity matrix at a configuration: one row per edge, two columns per
/// vertex (vertex i owns columns 2i and 2i+1); the row for edge (a,b)
/// carries pₐ−p_b in a's columns and p_b−pₐ in b's.
pub fn rigidity_matrix(
    graph: &Graph,
    config: &Configuration,
) -> Result<DMatrix<f64>, RigidityError> {
    let mut points = Vec::with_capacity(graph.vertex_count());
    for id in graph.vertices() {
        points.push(
            config
                .point_of(id)
                .ok_or_else(|| RigidityError::MissingCoordinate(id.clone()))?,
        );
    }
    let mut m = DMatrix::zeros(graph.edge_count(), 2 * graph.vertex_count());
    for (row, &(a, b)) in graph.edges().iter().enumerate() {
        let dx = points[a][0] - points[b][0];
        let dy = points[a][1] - points[b][1];
        m[(row, 2 * a)] = dx;
        m[(row, 2 * a + 1)] = dy;
        m[(row, 2 * b)] = -dx;
        m[(row, 2 * b + 1)] = -dy;
    }
    Ok(m)
}

/// Numerical rank: singular values above `tol` relative to the largest.
pub fn matrix_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |acc, &s| acc.max(s));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Best rigidity-matrix rank over `trials` uniformly random configurations
/// in [0,1]²; trial t draws from a generator seeded with seed + t.
pub fn generic_rank(graph: &Graph, trials: usize, seed: u64) -> usize {
    assert!(trials >= 1, "need at least one trial");
    let mut best = 0;
    for t in 0..trials as u64 {
        let mut rng = SplitMix64::new(seed.wrapping_add(t));
        let points = (0..graph.vertex_count())
            .map(|_| [rng.next_f64(), rng.next_f64()])
            .collect();
        let config = Configuration::new(graph.vertices().to_vec(), points)
            .expect("random coordinates are finite");
        let m = rigidity_matrix(graph, &config).expect("ids match");
        best = best.max(matrix_rank(&m, RANK_TOL));
    }
    best
}

/// The bare edge count test: |E| = 2|V| − 3.
pub fn laman_count(graph: &Graph) -> bool {
    graph.edge_count() as i64 == 2 * graph.vertex_count() as i64 - 3
}

/// Full Laman check: the count holds and no vertex subset is overbraced,
/// decided by the (2,3)-pebble game.
pub fn laman_full(graph: &Graph) -> Result<bool, RigidityError> {
    let n = graph.vertex_count();
    if n > MAX_PEBBLE_VERTICES {
        return Err(RigidityError::TooManyVertices { max: MAX_PEBBLE_VERTICES, got: n });
    }
    Ok(laman_count(graph) && pebble_game_sparse(graph))
}

/// (2,3)-pebble game: every vertex starts with 2 pebbles; inserting an edge
/// requires 4 pebbles on its endpoints, gathered by reversing directed
/// paths. All insertions succeed iff no subgraph exceeds 2k − 3 edges.
fn pebble_game_sparse(graph: &Graph) -> bool {
    let n = graph.vertex_count();
    let mut pebbles = vec![2u8; n];
    // out[v] holds the targets of edges currently oriented away from v
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];

    // depth-first hunt for a free pebble reachable from start; reverses the
    // path it walked so the pebble arrives at start
    fn pull(
        start: usize,
        banned: usize,
        pebbles: &mut [u8],
        out: &mut [Vec<usize>],
    ) -> bool {
        let n = pebbles.len();
        let mut seen = vec![false; n];
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![start];
        seen[start] = true;
        seen[banned] = true;
        while let Some(v) = stack.pop() {
            for i in 0..out[v].len() {
                let w = out[v][i];
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                parent[w] = v;
                if pebbles[w] > 0 {
                    pebbles[w] -= 1;
                    pebbles[start] += 1;
                    // reverse every edge on the path start -> w
                    let mut cur = w;
                    while cur != start {
                        let p = parent[cur];
                        let pos = out[p].iter().position(|&t| t == cur).expect("path edge");
                        out[p].swap_remove(pos);
                        out[cur].push(p);
                        cur = p;
                    }
                    return true;
                }
                stack.push(w);
            }
        }
        false
    }

    for &(u, v) in graph.edges() {
        loop {
            if pebbles[u] + pebbles[v] >= 4 {
                break;
            }
            if pebbles[u] < 2 && pull(u, v, &mut pebbles, &mut out) {
                continue;
            }
            if pebbles[v] < 2 && pull(v, u, &mut pebbles, &mut out) {
                continue;
            }
            return false;
        }
        pebbles[u] -= 1;
        out[u].push(v);
    }
    true
}

/// Degrees of freedom left after the rigid motions: 2|V| − 3 − generic rank.
pub fn dof(graph: &Graph) -> i64 {
    2 * graph.vertex_count() as i64 - 3 - generic_rank(graph, DEFAULT_TRIALS, 0) as i64
}
