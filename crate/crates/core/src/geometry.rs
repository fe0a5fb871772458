//! Cayley-Menger determinants/ideals and the Gram-rank realizability check.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactpoly::{Polynomial, Rat, VarTable};

/// Relative tolerance used for PSD and rank decisions on float matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("subset must contain at least 2 points, got {0}")]
    SubsetTooSmall(usize),
    #[error("duplicate index {0} in subset")]
    DuplicateIndex(usize),
    #[error("entry grid must be {n}x{n}")]
    BadShape { n: usize },
    #[error("matrix not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("non-finite coordinate for `{0}`")]
    NonFinite(String),
    #[error("duplicate point id `{0}`")]
    DuplicateId(String),
}

/// Symmetric grid of exact squared distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix {
    n: usize,
    entries: Vec<Rat>,
}

impl SquaredDistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<SquaredDistanceMatrix, GeometryError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::BadShape { n });
        }
        let entries: Vec<Rat> = rows.into_iter().flatten().collect();
        let m = SquaredDistanceMatrix { n, entries };
        for i in 0..n {
            if !m.get(i, i).is_zero() {
                return Err(GeometryError::NonzeroDiagonal(i));
            }
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(GeometryError::NotSymmetric(i, j));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }
}

/// Ordered assignment of planar float coordinates to vertex ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    ids: Vec<String>,
    points: Vec<[f64; 2]>,
}

impl Configuration {
    pub fn new<I, S>(ids: I, points: Vec<[f64; 2]>) -> Result<Configuration, GeometryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        assert_eq!(ids.len(), points.len(), "one id per point");
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].contains(id) {
                return Err(GeometryError::DuplicateId(id.clone()));
            }
            if !points[i][0].is_finite() || !points[i][1].is_finite() {
                return Err(GeometryError::NonFinite(id.clone()));
            }
        }
        Ok(Configuration { ids, points })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_of(&self, id: &str) -> Option<[f64; 2]> {
        self.ids.iter().position(|v| v == id).map(|i| self.points[i])
    }
}

/// Squared distances of a configuration, exact over the rational images of
/// its float coordinates.
pub fn squared_distances(config: &Configuration) -> SquaredDistanceMatrix {
    let n = config.len();
    let coords: Vec<[Rat; 2]> = config
        .points()
        .iter()
        .map(|p| [exact(p[0]), exact(p[1])])
        .collect();
    let mut entries = vec![Rat::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = &coords[i][0] - &coords[j][0];
            let dy = &coords[i][1] - &coords[j][1];
            let r = &(&dx * &dx) + &(&dy * &dy);
            entries[i * n + j] = r.clone();
            entries[j * n + i] = r;
        }
    }
    SquaredDistanceMatrix { n, entries }
}

fn exact(x: f64) -> Rat {
    Rat::from_float(x).expect("finite coordinate")
}

/// Cayley-Menger determinant of the chosen points: the determinant of the
/// bordered matrix [[0, 1, ..., 1], [1, r_ij]], computed exactly by
/// fraction-free Bareiss elimination.
///
/// Vanishes for any ≥ 4 points drawn from a planar configuration; equals
/// 2·r for a pair and −16·area² for a triangle.
pub fn cm_determinant(
    dists: &SquaredDistanceMatrix,
    subset: &[usize],
) -> Result<Rat, GeometryError> {
    let k = subset.len();
    if k < 2 {
        return Err(GeometryError::SubsetTooSmall(k));
    }
    for (pos, &i) in subset.iter().enumerate() {
        if i >= dists.n() {
            return Err(GeometryError::IndexOutOfRange { index: i, n: dists.n() });
        }
        if subset[..pos].contains(&i) {
            return Err(GeometryError::DuplicateIndex(i));
        }
    }
    let m = k + 1;
    let mut a = vec![vec![Rat::zero(); m]; m];
    for i in 1..m {
        a[0][i] = Rat::one();
        a[i][0] = Rat::one();
        for j in 1..m {
            if i != j {
                a[i][j] = dists.get(subset[i - 1], subset[j - 1]).clone();
            }
        }
    }
    Ok(bareiss_determinant(a))
}

/// Exact determinant by Bareiss' fraction-free elimination with row pivoting.
fn bareiss_determinant(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut sign = 1i32;
    let mut prev = Rat::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Rat::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = &t / &prev;
            }
            a[i][k] = Rat::zero();
        }
        prev = a[k][k].clone();
    }
    if sign < 0 {
        -a[n - 1][n - 1].clone()
    } else {
        a[n - 1][n - 1].clone()
    }
}

/// Name of the squared-distance variable for points `i < j` (1-based ids).
pub fn distance_var(i: usize, j: usize) -> String {
    format!("r{}x{}", i + 1, j + 1)
}

/// Generators of the Cayley-Menger ideal for `n` points in dimension `d`:
/// one symbolic determinant per (d+3)-subset, in the variables r{i}x{j}.
/// Returns the empty list when n < d + 3.
pub fn cm_ideal_generators(n: usize, d: usize) -> Vec<Polynomial> {
    let k = d + 3;
    if n < k {
        return Vec::new();
    }
    let mut names = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            names.push(distance_var(i, j));
        }
    }
    let vars = VarTable::new(names).expect("generated names are valid");
    let var_of = |i: usize, j: usize| {
        Polynomial::var(&vars, &distance_var(i.min(j), i.max(j))).expect("known var")
    };

    let mut gens = Vec::new();
    for subset in subsets(n, k) {
        let m = k + 1;
        let mut grid = vec![vec![Polynomial::zero(&vars); m]; m];
        for i in 1..m {
            grid[0][i] = Polynomial::one(&vars);
            grid[i][0] = Polynomial::one(&vars);
            for j in 1..m {
                if i != j {
                    grid[i][j] = var_of(subset[i - 1], subset[j - 1]);
                }
            }
        }
        gens.push(symbolic_determinant(&grid));
    }
    gens
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant over polynomial entries by Laplace expansion, memoized on the
/// set of surviving columns (rows are consumed top-down).
fn symbolic_determinant(grid: &[Vec<Polynomial>]) -> Polynomial {
    let n = grid.len();
    let vars = Arc::clone(grid[0][0].vars());
    let full: u32 = if n >= 32 { panic!("matrix too large") } else { (1 << n) - 1 };
    let mut memo: HashMap<u32, Polynomial> = HashMap::new();

    fn go(
        grid: &[Vec<Polynomial>],
        mask: u32,
        vars: &Arc<VarTable>,
        memo: &mut HashMap<u32, Polynomial>,
    ) -> Polynomial {
        if mask == 0 {
            return Polynomial::one(vars);
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let n = grid.len();
        let row = n - mask.count_ones() as usize;
        let mut acc = Polynomial::zero(vars);
        let mut pos = 0u32;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let entry = &grid[row][col];
            if !entry.is_zero() {
                let minor = go(grid, mask & !(1 << col), vars, memo);
                let term = entry * &minor;
                acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }

    go(grid, full, &vars, &mut memo)
}

/// Outcome of the Gram realizability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GramCheck {
    pub psd: bool,
    pub rank: usize,
    pub realizable: bool,
}

/// Maehara's criterion: a distance profile embeds in dimension `d` iff the
/// Gram matrix centered at point 1, G_ij = (r_1i + r_1j − r_ij)/2, is
/// positive semi-definite with rank at most `d`. Eigenvalue decisions use
/// `tol` relative to the largest eigenvalue magnitude.
pub fn gram_rank_check(dists: &SquaredDistanceMatrix, d: usize, tol: f64) -> GramCheck {
    let n = dists.n();
    if n <= 1 {
        return GramCheck { psd: true, rank: 0, realizable: true };
    }
    let m = n - 1;
    let gram = DMatrix::from_fn(m, m, |i, j| {
        let g = &(dists.get(0, i + 1) + dists.get(0, j + 1)) - dists.get(i + 1, j + 1);
        (&g / &Rat::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    });
    let eigs = gram.symmetric_eigen().eigenvalues;
    let max_abs = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let cut = tol * max_abs;
    let psd = eigs.iter().all(|&e| e >= -cut);
    let rank = eigs.iter().filter(|&&e| e > cut).count();
    GramCheck { psd, rank, realizable: psd && rank <= d }
}
