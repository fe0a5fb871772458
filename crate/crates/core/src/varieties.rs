//! Pinned unit-distance polynomial systems and the flatness-curve algebra.
//!
//! Pinning fixes one vertex at the origin and one on the positive x-axis,
//! which removes translations and rotations but keeps both mirror images.

use std::sync::Arc;

use thiserror::Error;

pub use crate::graph::{Graph, GraphError};

use crate::exactpoly::{PolyError, Polynomial, Rat, VarTable};
use crate::groebner::{eliminate, normal_form, GroebnerError, GroebnerLimits, IdealBasis};
use crate::geometry::Configuration;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarietiesError {
    #[error("pinning vertex `{0}` is not in the graph")]
    PinningVertexNotInGraph(String),
    #[error("pinning vertices must be distinct")]
    IdenticalPinningVertices,
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("configuration does not cover vertex `{0}`")]
    MissingCoordinate(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Choice of the two vertices that fix the reference frame: `origin` is
/// pinned to (0,0) and `axis` to (x2, 0) with x2 a free variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pinning {
    origin: String,
    axis: String,
}

impl Pinning {
    pub fn new(origin: impl Into<String>, axis: impl Into<String>) -> Result<Pinning, VarietiesError> {
        let (origin, axis) = (origin.into(), axis.into());
        if origin == axis {
            return Err(VarietiesError::IdenticalPinningVertices);
        }
        Ok(Pinning { origin, axis })
    }

    /// Pins the first two vertices of the graph, the usual convention.
    pub fn first_two(graph: &Graph) -> Result<Pinning, VarietiesError> {
        if graph.vertex_count() < 2 {
            return Err(VarietiesError::TooFewVertices(graph.vertex_count()));
        }
        Pinning::new(graph.vertices()[0].clone(), graph.vertices()[1].clone())
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn axis(&self) -> &str {
        &self.axis
    }
}

/// Where a vertex coordinate comes from once the frame is pinned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    Zero,
    Var(usize),
}

/// The polynomial system cutting out the pinned unit-distance realizations
/// of a graph: one equation (xa−xb)² + (ya−yb)² − 1 per edge, over
/// 2|V| − 3 coordinate variables.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    graph: Graph,
    pinning: Pinning,
    vars: Arc<VarTable>,
    equations: Vec<Polynomial>,
    coords: Vec<[Coord; 2]>,
}

/// Variable names for a vertex: the axis vertex owns "x2"; ids of the form
/// u<k> get "x<k>"/"y<k>"; anything else gets "<id>x"/"<id>y".
fn coordinate_names(id: &str) -> (String, String) {
    let digits = id.strip_prefix('u').filter(|d| {
        !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())
    });
    match digits {
        Some(k) => (format!("x{k}"), format!("y{k}")),
        None => (format!("{id}x"), format!("{id}y")),
    }
}

/// Builds the pinned unit-distance system for a graph.
pub fn build_unit_system(graph: &Graph, pinning: Pinning) -> Result<ConstraintSystem, VarietiesError> {
    let n = graph.vertex_count();
    if n < 2 {
        return Err(VarietiesError::TooFewVertices(n));
    }
    let origin = graph
        .vertex_index(pinning.origin())
        .ok_or_else(|| VarietiesError::PinningVertexNotInGraph(pinning.origin().into()))?;
    let axis = graph
        .vertex_index(pinning.axis())
        .ok_or_else(|| VarietiesError::PinningVertexNotInGraph(pinning.axis().into()))?;

    let mut names = vec!["x2".to_string()];
    let mut coords = vec![[Coord::Zero, Coord::Zero]; n];
    coords[axis] = [Coord::Var(0), Coord::Zero];
    for (v, id) in graph.vertices().iter().enumerate() {
        if v == origin || v == axis {
            continue;
        }
        let (xn, yn) = coordinate_names(id);
        coords[v] = [Coord::Var(names.len()), Coord::Var(names.len() + 1)];
        names.push(xn);
        names.push(yn);
    }
    let vars = VarTable::new(names)?;

    let coord_poly = |c: Coord| match c {
        Coord::Zero => Polynomial::zero(&vars),
        Coord::Var(i) => {
            Polynomial::var(&vars, vars.name(i)).expect("known var")
        }
    };
    let one = Polynomial::one(&vars);
    let equations = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            let dx = &coord_poly(coords[a][0]) - &coord_poly(coords[b][0]);
            let dy = &coord_poly(coords[a][1]) - &coord_poly(coords[b][1]);
            &(&(&dx * &dx) + &(&dy * &dy)) - &one
        })
        .collect();

    Ok(ConstraintSystem { graph: graph.clone(), pinning, vars, equations, coords })
}

impl ConstraintSystem {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pinning(&self) -> &Pinning {
        &self.pinning
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn equation_count(&self) -> usize {
        self.equations.len()
    }

    /// Reassembles full planar coordinates from a variable assignment.
    pub fn configuration(&self, values: &[f64]) -> Configuration {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        let read = |c: Coord| match c {
            Coord::Zero => 0.0,
            Coord::Var(i) => values[i],
        };
        let points = self.coords.iter().map(|&[x, y]| [read(x), read(y)]).collect();
        Configuration::new(self.graph.vertices().to_vec(), points).expect("finite values")
    }

    /// Reads a variable assignment off an already-pinned configuration
    /// (origin at (0,0), axis vertex on the x-axis); pinned coordinates are
    /// taken from the frame, not the configuration.
    pub fn values_from_configuration(&self, config: &Configuration) -> Result<Vec<f64>, VarietiesError> {
        let mut values = vec![0.0; self.vars.len()];
        for (v, id) in self.graph.vertices().iter().enumerate() {
            let p = config
                .point_of(id)
                .ok_or_else(|| VarietiesError::MissingCoordinate(id.clone()))?;
            for axis in 0..2 {
                if let Coord::Var(i) = self.coords[v][axis] {
                    values[i] = p[axis];
                }
            }
        }
        Ok(values)
    }

    /// Largest |equation| magnitude at a float assignment.
    pub fn residual(&self, values: &[f64]) -> f64 {
        self.equations
            .iter()
            .map(|eq| eq.eval_f64(values).abs())
            .fold(0.0, f64::max)
    }

    /// Exact equation values at a rational point.
    pub fn evaluate_exact(&self, values: &[Rat]) -> Vec<Rat> {
        self.equations.iter().map(|eq| eq.evaluate(values)).collect()
    }
}

/// The one-shared-neighbor reduction: a vertex v at unit distance from all
/// of u1, u2, u3, in variables [x2, x3, y3, vx, vy].
pub fn shared_neighbor_system() -> ConstraintSystem {
    let graph = Graph::new(
        ["u1", "u2", "u3", "v"],
        [("u1", "v"), ("u2", "v"), ("u3", "v")],
    )
    .expect("valid star graph");
    let pinning = Pinning::first_two(&graph).expect("two vertices");
    build_unit_system(&graph, pinning).expect("valid system")
}

/// The degree-5 polynomial cutting out the flat locus of the shared-neighbor
/// variety in the (x2, x3, y3) coordinates.
pub fn flatness_eq1() -> Polynomial {
    let vars = VarTable::new(["x2", "x3", "y3"]).expect("valid names");
    Polynomial::parse(
        &vars,
        "x2^3*x3^2 + x2^3*y3^2 - 2*x2^2*x3^3 - 2*x2^2*x3*y3^2 + x2*x3^4 \
         + 2*x2*x3^2*y3^2 + x2*y3^4 - 4*x2*y3^2",
    )
    .expect("valid polynomial")
}

/// Degrees-of-freedom audit: (variables, equations, slack). Negative slack
/// marks the system as overconstrained by counting alone.
pub fn laman_variable_audit(sys: &ConstraintSystem) -> (usize, usize, i64) {
    let vars = sys.var_count();
    let eqs = sys.equation_count();
    (vars, eqs, vars as i64 - eqs as i64)
}

/// How to check the flatness polynomial against the shared-neighbor system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Expand x2·[(x3² − x2·x3 + y3²)² − (4 − x2²)·y3²] and compare terms.
    Factorization,
    /// Reduce against the elimination ideal that drops the neighbor
    /// coordinates {vx, vy}.
    Membership,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub holds: bool,
    /// Generator count of the computed elimination ideal (membership mode).
    pub elimination_basis_size: Option<usize>,
}

/// Elimination ideal of the shared-neighbor system with the neighbor
/// coordinates dropped, leaving generators in {x2, x3, y3}.
pub fn shared_neighbor_elimination(limits: GroebnerLimits) -> Result<IdealBasis, GroebnerError> {
    let sys = shared_neighbor_system();
    eliminate(sys.equations(), &["vx", "vy"], limits)
}

#[cfg(test)]
pub(crate) fn shared_neighbor_elimination_with(
    limits: GroebnerLimits,
    tie: crate::groebner::TieBreak,
) -> Result<IdealBasis, GroebnerError> {
    let sys = shared_neighbor_system();
    crate::groebner::eliminate_with(sys.equations(), &["vx", "vy"], limits, tie)
}

/// Checks the flatness polynomial against the shared-neighbor variety,
/// either by the exact product identity or by elimination-ideal membership.
pub fn verify_eq1(mode: VerifyMode, limits: GroebnerLimits) -> Result<VerificationReport, GroebnerError> {
    match mode {
        VerifyMode::Factorization => {
            let eq1 = flatness_eq1();
            let vars = eq1.vars();
            let parse = |s: &str| Polynomial::parse(vars, s).expect("valid polynomial");
            let inner = parse("x3^2 - x2*x3 + y3^2");
            let bracket = &(&inner * &inner) - &(&parse("4 - x2^2") * &parse("y3^2"));
            let product = &parse("x2") * &bracket;
            Ok(VerificationReport {
                mode,
                holds: product == eq1,
                elimination_basis_size: None,
            })
        }
        VerifyMode::Membership => {
            let basis = shared_neighbor_elimination(limits)?;
            let eq1 = Polynomial::parse(&basis.vars, &flatness_eq1().to_string())
                .expect("same variable names");
            let holds = normal_form(&eq1, &basis.generators, basis.order).is_zero();
            Ok(VerificationReport {
                mode,
                holds,
                elimination_basis_size: Some(basis.generators.len()),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::Monomial;
    use crate::groebner::TieBreak;
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn system(name: &str) -> ConstraintSystem {
        let g = Graph::builtin(name).unwrap();
        let pin = Pinning::first_two(&g).unwrap();
        build_unit_system(&g, pin).unwrap()
    }

    #[test]
    fn triangle_system_shape() {
        let sys = system("triangle");
        assert_eq!(sys.vars().names(), &["x2", "x3", "y3"]);
        assert_eq!(sys.equation_count(), 3);
        let (v, e, s) = laman_variable_audit(&sys);
        assert_eq!((v, e, s), (3, 3, 0));
    }

    #[test]
    fn k33_system_shape() {
        let sys = system("k33");
        assert_eq!(
            sys.vars().names(),
            &["x2", "x3", "y3", "v1x", "v1y", "v2x", "v2y", "v3x", "v3y"]
        );
        assert_eq!(laman_variable_audit(&sys), (9, 9, 0));
    }

    #[test]
    fn k44_audit_is_overconstrained() {
        assert_eq!(laman_variable_audit(&system("k44")), (13, 16, -3));
    }

    #[test]
    fn single_edge_system() {
        let g = Graph::new(["u1", "u2"], [("u1", "u2")]).unwrap();
        let sys = build_unit_system(&g, Pinning::first_two(&g).unwrap()).unwrap();
        assert_eq!(laman_variable_audit(&sys), (1, 1, 0));
        let expect = Polynomial::parse(sys.vars(), "x2^2 - 1").unwrap();
        assert_eq!(sys.equations(), &[expect]);
    }

    #[test]
    fn pinning_validation() {
        let g = Graph::builtin("triangle").unwrap();
        assert!(matches!(
            Pinning::new("u1", "u1"),
            Err(VarietiesError::IdenticalPinningVertices)
        ));
        let bad = Pinning::new("u1", "zz").unwrap();
        assert!(matches!(
            build_unit_system(&g, bad),
            Err(VarietiesError::PinningVertexNotInGraph(_))
        ));
        let lone = Graph::new(["a"], Vec::<(&str, &str)>::new()).unwrap();
        assert!(matches!(
            Pinning::first_two(&lone),
            Err(VarietiesError::TooFewVertices(1))
        ));
    }

    #[test]
    fn nonstandard_pinning_collision_is_reported() {
        // axis vertex claims "x2" while unpinned u2 also wants it
        let g = Graph::builtin("triangle").unwrap();
        let pin = Pinning::new("u1", "u3").unwrap();
        assert!(matches!(
            build_unit_system(&g, pin),
            Err(VarietiesError::Poly(PolyError::DuplicateVar(_)))
        ));
    }

    #[test]
    fn shared_neighbor_system_shape() {
        let sys = shared_neighbor_system();
        assert_eq!(sys.vars().names(), &["x2", "x3", "y3", "vx", "vy"]);
        assert_eq!(sys.equation_count(), 3);
        let parse = |s: &str| Polynomial::parse(sys.vars(), s).unwrap();
        assert_eq!(
            sys.equations(),
            &[
                parse("vx^2 + vy^2 - 1"),
                parse("x2^2 - 2*x2*vx + vx^2 + vy^2 - 1"),
                parse("x3^2 - 2*x3*vx + y3^2 - 2*y3*vy + vx^2 + vy^2 - 1"),
            ]
        );
    }

    #[test]
    fn shared_neighbor_has_exact_rational_zero() {
        let sys = shared_neighbor_system();
        let point = vec![rat(6, 5), rat(0, 1), rat(0, 1), rat(3, 5), rat(4, 5)];
        let values = sys.evaluate_exact(&point);
        assert!(values.iter().all(Rat::is_zero));
    }

    #[test]
    fn builtin_embeddings_satisfy_their_systems() {
        for name in ["triangle", "c4", "moser"] {
            let sys = system(name);
            let pts = Graph::builtin_embedding(name).unwrap();
            let config =
                Configuration::new(sys.graph().vertices().to_vec(), pts).unwrap();
            let values = sys.values_from_configuration(&config).unwrap();
            assert!(sys.residual(&values) < 1e-9, "{name}");
            // round trip: configuration -> values -> configuration
            let back = sys.configuration(&values);
            assert_eq!(back, config);
        }
    }

    #[test]
    fn flatness_polynomial_basics() {
        let eq1 = flatness_eq1();
        assert_eq!(eq1.num_terms(), 8);
        assert_eq!(eq1.total_degree(), Some(5));
        assert_eq!(eq1.evaluate(&[rat(2, 1), rat(1, 1), rat(0, 1)]), rat(2, 1));
    }

    #[test]
    fn flatness_at_zero_height_factors_cleanly() {
        // setting y3 = 0 leaves x2*x3^2*(x3 - x2)^2
        let eq1 = flatness_eq1();
        let vars = eq1.vars();
        let x2 = Polynomial::var(vars, "x2").unwrap();
        let x3 = Polynomial::var(vars, "x3").unwrap();
        let diff = &x3 - &x2;
        let expect = &(&x2 * &(&x3 * &x3)) * &(&diff * &diff);
        let mut got = Vec::new();
        for (m, c) in eq1.terms() {
            if m.exp(2) == 0 {
                got.push((m.clone(), c.clone()));
            }
        }
        let restricted = Polynomial::from_terms(vars, got);
        assert_eq!(restricted, expect);
    }

    #[test]
    fn flatness_is_divisible_by_x2() {
        let eq1 = flatness_eq1();
        assert!(eq1.terms().iter().all(|(m, _)| m.exp(0) >= 1));
        let quotient = Polynomial::from_terms(
            eq1.vars(),
            eq1.terms()
                .iter()
                .map(|(m, c)| {
                    let mut e = m.exps().to_vec();
                    e[0] -= 1;
                    (Monomial::from_exps(e), c.clone())
                })
                .collect(),
        );
        let x2 = Polynomial::var(eq1.vars(), "x2").unwrap();
        assert_eq!(&x2 * &quotient, eq1);
    }

    #[test]
    fn factorization_identity_holds() {
        let report = verify_eq1(VerifyMode::Factorization, GroebnerLimits::default()).unwrap();
        assert!(report.holds);
        assert_eq!(report.elimination_basis_size, None);
    }

    #[test]
    fn elimination_contains_flatness_polynomial() {
        let report = verify_eq1(VerifyMode::Membership, GroebnerLimits::default()).unwrap();
        assert!(report.holds);
        assert!(report.elimination_basis_size.unwrap() >= 1);
    }

    #[test]
    fn elimination_rejects_unrelated_polynomial() {
        let basis = shared_neighbor_elimination(GroebnerLimits::default()).unwrap();
        let stray = Polynomial::parse(&basis.vars, "x2 + 1").unwrap();
        assert!(!basis.contains(&stray));
    }

    #[test]
    fn elimination_is_tie_break_independent() {
        let a = shared_neighbor_elimination_with(GroebnerLimits::default(), TieBreak::IndexPair)
            .unwrap();
        let b = shared_neighbor_elimination_with(
            GroebnerLimits::default(),
            TieBreak::ReversedIndexPair,
        )
        .unwrap();
        assert_eq!(a.generators, b.generators);
    }

    #[test]
    fn elimination_generators_vanish_on_the_curve() {
        let basis = shared_neighbor_elimination(GroebnerLimits::default()).unwrap();
        assert!(!basis.generators.is_empty());
        // (6/5, 6/5, 8/5) lies on the circle of centers (3/5, 4/5)
        let on_curve = [
            vec![rat(6, 5), rat(6, 5), rat(8, 5)],
            vec![rat(6, 5), rat(0, 1), rat(0, 1)],
            vec![rat(1, 1), rat(1, 1), rat(0, 1)],
        ];
        for point in &on_curve {
            assert!(flatness_eq1().evaluate(point).is_zero());
            for g in &basis.generators {
                assert!(g.evaluate(point).is_zero());
            }
        }
    }

    #[test]
    fn elimination_respects_limits() {
        let tight = GroebnerLimits { max_pairs: 1, max_basis: 5_000 };
        assert!(matches!(
            shared_neighbor_elimination(tight),
            Err(GroebnerError::PairLimit(1))
        ));
    }

    #[test]
    fn moser_variable_names_avoid_collisions() {
        let sys = system("moser");
        assert_eq!(sys.var_count(), 11);
        assert_eq!(sys.vars().name(0), "x2");
        assert!(sys.vars().index("cx").is_some());
        assert!(sys.vars().index("gy").is_some());
    }

    #[test]
    fn isolated_vertices_get_variables_but_no_equations() {
        let g = Graph::new(["u1", "u2", "u3"], [("u1", "u2")]).unwrap();
        let sys = build_unit_system(&g, Pinning::first_two(&g).unwrap()).unwrap();
        assert_eq!(laman_variable_audit(&sys), (3, 1, 2));
    }
}
