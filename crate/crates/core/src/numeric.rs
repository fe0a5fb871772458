//! Damped Newton sampling of unit-distance varieties, local dimension, and
//! the collapse experiments.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::Polynomial;
use crate::geometry::Configuration;
use crate::rigidity::matrix_rank;
use crate::rng::SplitMix64;
use crate::varieties::{build_unit_system, ConstraintSystem, Graph, Pinning};

/// Default residual tolerance for declaring convergence.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default Newton iteration cap.
pub const DEFAULT_MAX_ITER: usize = 100;

/// Default distance below which two points count as merged.
pub const DEFAULT_MERGE_TOL: f64 = 1e-6;

/// Singular-value cutoff for the pseudo-inverse Newton step.
const STEP_SVD_CUTOFF: f64 = 1e-10;

/// Relative singular-value cutoff for tangent-space rank at a solution.
const DIMENSION_TOL: f64 = 1e-8;

const MAX_HALVINGS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("solver did not converge")]
    NotConverged,
    #[error("x2 must satisfy 0 < |x2| < 2, got {0}")]
    OutOfRange(f64),
}

/// Outcome of one Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub converged: bool,
    /// Variable assignment reached, whether or not it converged.
    pub values: Vec<f64>,
    /// Full planar configuration, on success.
    pub config: Option<Configuration>,
    /// Largest |equation| at `values`.
    pub residual: f64,
    pub iterations: usize,
}

/// Newton driver with the symbolic Jacobian differentiated once up front.
pub struct NewtonSolver<'a> {
    sys: &'a ConstraintSystem,
    jacobian: Vec<Vec<Polynomial>>,
}

impl<'a> NewtonSolver<'a> {
    pub fn new(sys: &'a ConstraintSystem) -> NewtonSolver<'a> {
        let nvars = sys.var_count();
        let jacobian = sys
            .equations()
            .iter()
            .map(|eq| (0..nvars).map(|v| eq.differentiate(v)).collect())
            .collect();
        NewtonSolver { sys, jacobian }
    }

    pub fn jacobian_at(&self, values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.sys.equation_count(), self.sys.var_count(), |i, j| {
            self.jacobian[i][j].eval_f64(values)
        })
    }

    fn residual_vector(&self, values: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.sys.equation_count(),
            self.sys.equations().iter().map(|eq| eq.eval_f64(values)),
        )
    }

    fn step(&self, values: &[f64]) -> Option<DVector<f64>> {
        let j = self.jacobian_at(values);
        let f = self.residual_vector(values);
        j.svd(true, true).solve(&f, STEP_SVD_CUTOFF).ok()
    }

    /// Damped Newton with pseudo-inverse steps: the step is halved until the
    /// residual decreases, and a converged point keeps taking full polish
    /// steps while they strictly improve. The polish matters near singular
    /// solutions, where convergence is linear and stopping at `tol` can
    /// leave the iterate farther from the variety than the residual suggests.
    pub fn solve(&self, seed_values: &[f64], tol: f64, max_iter: usize) -> SolveResult {
        assert_eq!(seed_values.len(), self.sys.var_count(), "one value per variable");
        assert!(tol > 0.0, "tolerance must be positive");
        let mut x = seed_values.to_vec();
        let mut residual = self.sys.residual(&x);
        let mut iterations = 0;
        let mut converged = residual < tol;

        while !converged && iterations < max_iter {
            iterations += 1;
            let Some(dx) = self.step(&x) else { break };
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> =
                    x.iter().enumerate().map(|(i, &v)| v - scale * dx[i]).collect();
                let r = self.sys.residual(&trial);
                if r < residual {
                    x = trial;
                    residual = r;
                    improved = true;
                    break;
                }
                scale /= 2.0;
            }
            if !improved {
                break;
            }
            converged = residual < tol;
        }

        if converged {
            for _ in 0..32 {
                let Some(dx) = self.step(&x) else { break };
                let trial: Vec<f64> = x.iter().enumerate().map(|(i, &v)| v - dx[i]).collect();
                let r = self.sys.residual(&trial);
                if r < residual {
                    x = trial;
                    residual = r;
                } else {
                    break;
                }
            }
        }

        let config = converged.then(|| self.sys.configuration(&x));
        SolveResult { converged, values: x, config, residual, iterations }
    }
}

/// One-shot damped Newton solve of a pinned unit-distance system.
pub fn newton_solve(
    sys: &ConstraintSystem,
    seed_values: &[f64],
    tol: f64,
    max_iter: usize,
) -> SolveResult {
    NewtonSolver::new(sys).solve(seed_values, tol, max_iter)
}

/// Tangent-space dimension at a converged solution: variable count minus
/// the Jacobian rank there.
pub fn local_dimension(sys: &ConstraintSystem, sol: &SolveResult) -> Result<usize, NumericError> {
    if !sol.converged {
        return Err(NumericError::NotConverged);
    }
    let solver = NewtonSolver::new(sys);
    let rank = matrix_rank(&solver.jacobian_at(&sol.values), DIMENSION_TOL);
    Ok(sys.var_count() - rank)
}

/// Twice the triangle area: |x₁(y₂−y₃) + x₂(y₃−y₁) + x₃(y₁−y₂)|.
pub fn collinearity_measure(points: &[[f64; 2]; 3]) -> f64 {
    let [p1, p2, p3] = points;
    (p1[0] * (p2[1] - p3[1]) + p2[0] * (p3[1] - p1[1]) + p3[0] * (p1[1] - p2[1])).abs()
}

/// Which system the collapse experiment drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CollapseTarget {
    K33,
    K44,
    /// Control case with no coincidence forced.
    Triangle,
}

impl CollapseTarget {
    pub fn graph_name(self) -> &'static str {
        match self {
            CollapseTarget::K33 => "k33",
            CollapseTarget::K44 => "k44",
            CollapseTarget::Triangle => "triangle",
        }
    }

    /// Vertices whose pairwise merges count as neighbor coincidence.
    fn neighbor_side(self) -> &'static [&'static str] {
        match self {
            CollapseTarget::K33 => &["v1", "v2", "v3"],
            CollapseTarget::K44 => &["v1", "v2", "v3", "v4"],
            CollapseTarget::Triangle => &[],
        }
    }

    /// Vertices whose collinearity counts as center degeneracy.
    fn centers(self) -> [&'static str; 3] {
        ["u1", "u2", "u3"]
    }
}

/// Everything needed to rerun a collapse experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseParams {
    pub target: CollapseTarget,
    pub attempts: usize,
    pub seed: u64,
    pub merge_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
}

/// Aggregate classification of converged collapse attempts. A solution may
/// land in both degeneracy bins; `distinct_nondegenerate_count` counts those
/// in neither.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    pub attempts: usize,
    pub converged: usize,
    pub coincident_neighbor_count: usize,
    pub collinear_center_count: usize,
    pub coincident_and_collinear_count: usize,
    pub distinct_nondegenerate_count: usize,
    pub params: CollapseParams,
}

/// Runs `attempts` Newton solves from uniform starts in [−2,2]^vars and
/// classifies each converged solution by neighbor coincidence and center
/// collinearity. Attempt i draws its start from stream (seed, i), so counts
/// are reproducible and independent of execution order.
pub fn collapse_experiment(
    target: CollapseTarget,
    attempts: usize,
    seed: u64,
    merge_tol: f64,
) -> CollapseReport {
    assert!(attempts >= 1, "need at least one attempt");
    let graph = Graph::builtin(target.graph_name()).expect("builtin exists");
    let pinning = Pinning::first_two(&graph).expect("two vertices");
    let sys = build_unit_system(&graph, pinning).expect("valid system");
    let solver = NewtonSolver::new(&sys);

    let mut converged = 0;
    let mut coincident = 0;
    let mut collinear = 0;
    let mut both = 0;
    let mut distinct = 0;
    for i in 0..attempts {
        let mut rng = SplitMix64::stream(seed, i as u64);
        let start: Vec<f64> =
            (0..sys.var_count()).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let sol = solver.solve(&start, DEFAULT_TOL, DEFAULT_MAX_ITER);
        if !sol.converged {
            continue;
        }
        converged += 1;
        let config = sol.config.as_ref().expect("converged has config");

        let neighbors: Vec<[f64; 2]> = target
            .neighbor_side()
            .iter()
            .map(|id| config.point_of(id).expect("vertex present"))
            .collect();
        let mut is_coincident = false;
        for a in 0..neighbors.len() {
            for b in a + 1..neighbors.len() {
                let d = ((neighbors[a][0] - neighbors[b][0]).powi(2)
                    + (neighbors[a][1] - neighbors[b][1]).powi(2))
                .sqrt();
                if d < merge_tol {
                    is_coincident = true;
                }
            }
        }

        let [c1, c2, c3] = target.centers();
        let centers = [
            config.point_of(c1).expect("vertex present"),
            config.point_of(c2).expect("vertex present"),
            config.point_of(c3).expect("vertex present"),
        ];
        let is_collinear = collinearity_measure(&centers) / 2.0 < merge_tol;

        if is_coincident {
            coincident += 1;
        }
        if is_collinear {
            collinear += 1;
        }
        if is_coincident && is_collinear {
            both += 1;
        }
        if !is_coincident && !is_collinear {
            distinct += 1;
        }
    }

    CollapseReport {
        attempts,
        converged,
        coincident_neighbor_count: coincident,
        collinear_center_count: collinear,
        coincident_and_collinear_count: both,
        distinct_nondegenerate_count: distinct,
        params: CollapseParams {
            target,
            attempts,
            seed,
            merge_tol,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        },
    }
}

/// Samples the flat locus over a grid of x3 values by bisecting
/// (x3² − x2·x3 + y3²)² − (4 − x2²)·y3² in y3 over [0, 3]. Returns (x3, y3)
/// pairs with y3 ≥ 0; the locus is mirror-symmetric in y3.
pub fn sample_flatness_curve(x2: f64, count: usize) -> Result<Vec<[f64; 2]>, NumericError> {
    if !(x2.abs() > 0.0 && x2.abs() < 2.0) || !x2.is_finite() {
        return Err(NumericError::OutOfRange(x2));
    }
    assert!(count >= 2, "need at least two grid points");
    // the locus lives within unit distance of the two circle centers at
    // x3 = x2/2, so this window covers it with margin
    let lo = x2 / 2.0 - 1.2;
    let hi = x2 / 2.0 + 1.2;
    let g = |x3: f64, y3: f64| {
        let q = x3 * x3 - x2 * x3 + y3 * y3;
        q * q - (4.0 - x2 * x2) * y3 * y3
    };

    let mut points = Vec::new();
    for i in 0..count {
        let x3 = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let subdivisions = 96;
        let mut prev_y = 0.0;
        let mut prev_g = g(x3, prev_y);
        if prev_g.abs() < 1e-14 {
            points.push([x3, 0.0]);
        }
        for s in 1..=subdivisions {
            let y = 3.0 * s as f64 / subdivisions as f64;
            let cur = g(x3, y);
            if cur.abs() < 1e-14 {
                points.push([x3, y]);
            } else if prev_g * cur < 0.0 {
                let (mut a, mut b) = (prev_y, y);
                let (mut ga, _) = (prev_g, cur);
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    let gm = g(x3, mid);
                    if gm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if ga * gm < 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        ga = gm;
                    }
                }
                points.push([x3, 0.5 * (a + b)]);
            }
            prev_y = y;
            prev_g = cur;
        }
    }
    Ok(points)
}
