//! Acceptance gate: one test per shipping criterion. Each prints a single
//! pass/fail line (straight to stderr, visible without --nocapture) and
//! fails if its wall-clock budget is exceeded.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use rigidlab_core::census::{self, PointSet};
use rigidlab_core::exactpoly::{MonomialOrder, Polynomial, Rat, VarTable};
use rigidlab_core::geometry::{self, Configuration, SquaredDistanceMatrix};
use rigidlab_core::groebner::{self, GroebnerLimits};
use rigidlab_core::numeric::{self, CollapseTarget, NewtonSolver};
use rigidlab_core::rigidity;
use rigidlab_core::rng::SplitMix64;
use rigidlab_core::varieties::{build_unit_system, Graph, Pinning};

fn criterion(id: usize, name: &str, bound_secs: u64, f: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let ok = outcome.is_ok() && elapsed <= Duration::from_secs(bound_secs);
    let _ = writeln!(
        std::io::stderr().lock(),
        "acceptance {id} {name}: {} ({elapsed:.2?} of {bound_secs}s budget)",
        if ok { "PASS" } else { "FAIL" }
    );
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
    assert!(
        elapsed <= Duration::from_secs(bound_secs),
        "{name} exceeded its {bound_secs}s budget: {elapsed:?}"
    );
}

fn rigidlab(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_rigidlab"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn criterion_1_flatness_identity() {
    criterion(1, "flatness identity holds in both modes", 10, || {
        let v = rigidlab(&["verify-eq1", "--mode", "factorization"]);
        assert_eq!(v["holds"], Value::Bool(true), "factorization check");
        let v = rigidlab(&["verify-eq1", "--mode", "membership"]);
        assert_eq!(v["holds"], Value::Bool(true), "membership check");
        assert!(v["elimination_basis_size"].as_u64().unwrap() >= 1);
    });
}

#[test]
fn criterion_2_groebner_soundness() {
    criterion(2, "Groebner corpus is sound and hits the lex golden", 5, || {
        let corpus: &[(&[&str], &[&str])] = &[
            (&["x", "y"], &["x^2 + y^2 - 1", "x - y"]),
            (&["x"], &["x", "x + 1"]),
            (&["t", "x", "y"], &["x - t", "y - t^2"]),
            (&["x", "y"], &["x^2 + 1", "y^2 + 1"]),
            (&["x", "y"], &["x*y - 1", "x^2 - y"]),
            (&["x", "y"], &["x^2 - y", "y^2 - x"]),
            (&["x", "y", "z"], &["x + y + z", "x*y + y*z + z*x", "x*y*z - 1"]),
            (&["x", "y"], &["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"]),
            (
                &["w", "x", "y", "z"],
                &["w + x + y + z", "w*x + x*y + y*z + z*w", "w*x*y*z - 1"],
            ),
            (&["x", "y", "z"], &["x^2 - 2", "y^2 - 3", "x*z + y*z - 1"]),
            (&["a", "b"], &["2*a + 3*b - 5", "a - b"]),
            (&["x", "y", "z"], &["x^2 + y^2 + z^2 - 1", "x - z", "y - z"]),
        ];
        assert!(corpus.len() >= 10);
        for (names, texts) in corpus {
            let vars = VarTable::new(names.iter().copied()).unwrap();
            let gens: Vec<Polynomial> =
                texts.iter().map(|s| Polynomial::parse(&vars, s).unwrap()).collect();
            for order in [MonomialOrder::Lex, MonomialOrder::Grevlex] {
                let basis =
                    groebner::buchberger(&gens, order, GroebnerLimits::default()).unwrap();
                for g in &gens {
                    assert!(basis.contains(g), "input generator must reduce to zero");
                }
                for i in 0..basis.generators.len() {
                    for j in i + 1..basis.generators.len() {
                        let s = groebner::s_polynomial(
                            &basis.generators[i],
                            &basis.generators[j],
                            order,
                        );
                        assert!(
                            groebner::normal_form(&s, &basis.generators, order).is_zero(),
                            "S-polynomial must reduce to zero"
                        );
                    }
                }
            }
        }

        let vars = VarTable::new(["x", "y"]).unwrap();
        let gens = [
            Polynomial::parse(&vars, "x^2 + y^2 - 1").unwrap(),
            Polynomial::parse(&vars, "x - y").unwrap(),
        ];
        let basis =
            groebner::buchberger(&gens, MonomialOrder::Lex, GroebnerLimits::default()).unwrap();
        let expected = vec![
            Polynomial::parse(&vars, "y^2 - 1/2").unwrap(),
            Polynomial::parse(&vars, "x - y").unwrap(),
        ];
        assert_eq!(basis.generators, expected);
    });
}

#[test]
fn criterion_3_cayley_menger() {
    criterion(3, "Cayley-Menger determinants are exact", 5, || {
        let zero = Rat::from_float(0.0).unwrap();
        let mut rng = SplitMix64::new(42);
        for _ in 0..100 {
            let snap = |v: f64| (v * 64.0).round() / 64.0;
            let pts: Vec<[f64; 2]> = (0..5)
                .map(|_| [snap(rng.uniform(-5.0, 5.0)), snap(rng.uniform(-5.0, 5.0))])
                .collect();
            let ids: Vec<String> = (0..5).map(|i| format!("p{i}")).collect();
            let config = Configuration::new(ids, pts).unwrap();
            let dists = geometry::squared_distances(&config);
            for subset in [
                &[0usize, 1, 2, 3][..],
                &[0, 1, 2, 4],
                &[0, 1, 3, 4],
                &[0, 2, 3, 4],
                &[1, 2, 3, 4],
                &[0, 1, 2, 3, 4],
            ] {
                let det = geometry::cm_determinant(&dists, subset).unwrap();
                assert_eq!(det, zero, "planar point sets must flatten exactly");
            }
        }

        let one = Rat::from_float(1.0).unwrap();
        let equilateral = SquaredDistanceMatrix::from_rows(vec![
            vec![zero.clone(), one.clone(), one.clone()],
            vec![one.clone(), zero.clone(), one.clone()],
            vec![one.clone(), one.clone(), zero.clone()],
        ])
        .unwrap();
        assert_eq!(
            geometry::cm_determinant(&equilateral, &[0, 1, 2]).unwrap(),
            Rat::from_float(-3.0).unwrap()
        );

        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let r = Rat::from_float((rng.below(320) + 1) as f64 / 64.0).unwrap();
            let pair = SquaredDistanceMatrix::from_rows(vec![
                vec![zero.clone(), r.clone()],
                vec![r.clone(), zero.clone()],
            ])
            .unwrap();
            assert_eq!(geometry::cm_determinant(&pair, &[0, 1]).unwrap(), &r + &r);
        }
    });
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Direct sparsity count: |E| = 2|V| − 3 and e(S) ≤ 2|S| − 3 for all S.
fn laman_oracle(n: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 3 != 2 * n {
        return false;
    }
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let e = edges
            .iter()
            .filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1)
            .count();
        if e + 3 > 2 * k {
            return false;
        }
    }
    true
}

#[test]
fn criterion_4_rigidity() {
    criterion(4, "Laman checks, generic ranks, and the pebble oracle", 30, || {
        let k33 = Graph::builtin("k33").unwrap();
        assert!(rigidity::laman_count(&k33));
        assert!(rigidity::laman_full(&k33).unwrap());
        assert_eq!(rigidity::generic_rank(&k33, rigidity::DEFAULT_TRIALS, 0), 9);
        let c4 = Graph::builtin("c4").unwrap();
        assert_eq!(rigidity::generic_rank(&c4, rigidity::DEFAULT_TRIALS, 0), 4);
        let triangle = Graph::builtin("triangle").unwrap();
        assert_eq!(rigidity::dof(&triangle), 0);

        let names = ["a", "b", "c", "d", "e", "f"];
        for n in 2..=6usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            for mask in 0u32..1 << pairs.len() {
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                if !connected(n, &edges) {
                    continue;
                }
                let graph = Graph::new(
                    names[..n].iter().copied(),
                    edges.iter().map(|&(i, j)| (names[i], names[j])),
                )
                .unwrap();
                assert_eq!(
                    rigidity::laman_full(&graph).unwrap(),
                    laman_oracle(n, &edges),
                    "pebble game disagrees on n={n} mask={mask:015b}"
                );
            }
        }
    });
}

#[test]
fn criterion_5_collapse() {
    criterion(5, "K33 collapse finds no distinct common neighbors", 60, || {
        let first = numeric::collapse_experiment(CollapseTarget::K33, 1000, 0, 1e-6);
        assert!(first.converged > 0);
        assert_eq!(
            first.distinct_nondegenerate_count, 0,
            "a distinct triple would put three points on two unit circles"
        );
        let covered = first.coincident_neighbor_count + first.collinear_center_count
            - first.coincident_and_collinear_count
            + first.distinct_nondegenerate_count;
        assert_eq!(covered, first.converged);
        let second = numeric::collapse_experiment(CollapseTarget::K33, 1000, 0, 1e-6);
        assert_eq!(first, second, "same seed must give identical counts");
    });
}

#[test]
fn criterion_6_numeric_integrity() {
    criterion(6, "Jacobians match FD; Moser rigid, C4 flexible", 60, || {
        for name in ["triangle", "c4", "k33", "moser"] {
            let graph = Graph::builtin(name).unwrap();
            let sys = build_unit_system(&graph, Pinning::first_two(&graph).unwrap()).unwrap();
            let solver = NewtonSolver::new(&sys);
            let mut rng = SplitMix64::new(2024);
            let h = 1e-6;
            for _ in 0..50 {
                let at: Vec<f64> =
                    (0..sys.var_count()).map(|_| rng.uniform(-2.0, 2.0)).collect();
                let sym = solver.jacobian_at(&at);
                for (row, eq) in sys.equations().iter().enumerate() {
                    for col in 0..sys.var_count() {
                        let mut hi = at.clone();
                        hi[col] += h;
                        let mut lo = at.clone();
                        lo[col] -= h;
                        let fd = (eq.eval_f64(&hi) - eq.eval_f64(&lo)) / (2.0 * h);
                        let s = sym[(row, col)];
                        assert!(
                            (s - fd).abs() <= 1e-5 * s.abs().max(1.0),
                            "{name} jacobian[{row},{col}]: {s} vs {fd}"
                        );
                    }
                }
            }
        }

        let graph = Graph::builtin("moser").unwrap();
        let embedding = Graph::builtin_embedding("moser").unwrap();
        let sys = build_unit_system(&graph, Pinning::first_two(&graph).unwrap()).unwrap();
        let solver = NewtonSolver::new(&sys);
        let config = Configuration::new(graph.vertices().to_vec(), embedding).unwrap();
        let exact = sys.values_from_configuration(&config).unwrap();
        for seed in 0..5u64 {
            let mut rng = SplitMix64::new(seed);
            let start: Vec<f64> = exact.iter().map(|v| v + rng.uniform(-1e-3, 1e-3)).collect();
            let sol = solver.solve(&start, numeric::DEFAULT_TOL, numeric::DEFAULT_MAX_ITER);
            assert!(sol.converged, "Moser seed {seed} did not converge");
            assert!(sol.residual < 1e-10);
            assert_eq!(numeric::local_dimension(&sys, &sol).unwrap(), 0, "Moser is rigid");
        }

        let graph = Graph::builtin("c4").unwrap();
        let sys = build_unit_system(&graph, Pinning::first_two(&graph).unwrap()).unwrap();
        let solver = NewtonSolver::new(&sys);
        let mut found = 0;
        for i in 0..40u64 {
            let mut rng = SplitMix64::stream(9, i);
            let start: Vec<f64> =
                (0..sys.var_count()).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let sol = solver.solve(&start, numeric::DEFAULT_TOL, numeric::DEFAULT_MAX_ITER);
            if sol.converged {
                assert_eq!(
                    numeric::local_dimension(&sys, &sol).unwrap(),
                    1,
                    "C4 flexes with one degree of freedom"
                );
                found += 1;
            }
        }
        assert!(found >= 5, "want several converged C4 solves, got {found}");
    });
}

#[test]
fn criterion_7_census() {
    criterion(7, "census is exact and growth behaves", 120, || {
        for seed in 0..20u64 {
            let mut rng = SplitMix64::new(1000 + seed);
            let ps = PointSet::new(
                (0..500)
                    .map(|_| [rng.uniform(0.0, 12.0), rng.uniform(0.0, 12.0)])
                    .collect(),
            );
            for eps in [0.0, census::DEFAULT_EPS, census::MAX_EPS] {
                assert_eq!(
                    census::count_unit_pairs(&ps, eps),
                    census::count_unit_pairs_brute(&ps, eps),
                    "grid and brute force disagree (seed {seed}, eps {eps})"
                );
            }
        }

        let lattice = census::lattice_config(10, 5).unwrap();
        assert_eq!(census::count_unit_pairs(&lattice, census::DEFAULT_EPS), 288);

        let mut last = 0.0;
        for side in [10u32, 20, 40] {
            let ps = census::lattice_config(side, 5).unwrap();
            let count = census::count_unit_pairs(&ps, census::DEFAULT_EPS);
            let per_n = count as f64 / ps.len() as f64;
            assert!(per_n > last, "per-point pair count must grow with side");
            last = per_n;
        }

        let mut ratio_sum = 0.0;
        for seed in 0..5u64 {
            let big = census::count_unit_pairs(
                &census::lines_config(4000, 10, seed, false),
                census::MAX_EPS,
            );
            let small = census::count_unit_pairs(
                &census::lines_config(2000, 10, seed, false),
                census::MAX_EPS,
            );
            ratio_sum += big.max(1) as f64 / small.max(1) as f64;
        }
        assert!(
            ratio_sum / 5.0 <= 2.5,
            "line families must grow near-linearly, got mean ratio {}",
            ratio_sum / 5.0
        );
    });
}

fn without_wall_time(mut v: Value) -> String {
    v["manifest"]
        .as_object_mut()
        .expect("manifest object")
        .remove("wall_time_ms");
    v.to_string()
}

#[test]
fn criterion_8_reproducibility() {
    criterion(8, "seeded subcommands rerun byte-identically", 30, || {
        let invocations: &[&[&str]] = &[
            &["rank", "--graph", "builtin:k33", "--seed", "5"],
            &["solve", "--graph", "builtin:triangle", "--seed", "3"],
            &["dim", "--graph", "builtin:c4", "--seed", "4"],
            &["collapse", "--target", "k33", "--attempts", "25", "--seed", "9"],
            &["collapse", "--target", "k44", "--attempts", "5", "--seed", "1"],
            &["census", "--generator", "lines", "--n", "200", "--k", "3", "--seed", "6"],
            &["census", "--generator", "random", "--n", "200", "--seed", "7"],
            &["scaling", "--generator", "lines", "--sizes", "100,200", "--k", "5", "--seed", "8"],
            &["scaling", "--generator", "random", "--sizes", "50,100", "--seed", "2"],
        ];
        for args in invocations {
            let a = without_wall_time(rigidlab(args));
            let b = without_wall_time(rigidlab(args));
            assert_eq!(a, b, "{args:?} must reproduce byte-identically");
        }
    });
}
