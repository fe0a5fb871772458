//! Exact unit-pair counting over planar point sets, plus the lattice and
//! line-family generators used for growth measurements.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::rng::SplitMix64;

/// Default slack on the squared distance when testing for a unit pair.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Largest accepted eps; beyond this the grid-width argument breaks down.
pub const MAX_EPS: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CensusError {
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("non-finite coordinate on line {0}")]
    NonFinite(usize),
    #[error("{0} is not a sum of two squares")]
    NotSumOfTwoSquares(u32),
    #[error("side must be at least 1")]
    EmptyLattice,
    #[error("sizes must be strictly ascending")]
    SizesNotAscending,
}

/// A flat list of planar points; duplicates are allowed and flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<[f64; 2]>,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 2]>) -> PointSet {
        assert!(
            points.iter().all(|p| p[0].is_finite() && p[1].is_finite()),
            "coordinates must be finite"
        );
        PointSet { points }
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

    pub fn has_duplicates(&self) -> bool {
        let mut sorted: Vec<[u64; 2]> = self
            .points
            .iter()
            .map(|p| [p[0].to_bits(), p[1].to_bits()])
            .collect();
        sorted.sort_unstable();
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// Parses the "x y" one-pair-per-line format; '#' starts a comment.
    pub fn parse(input: &str) -> Result<PointSet, CensusError> {
        let mut points = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(CensusError::BadLine {
                    line,
                    msg: format!("expected 2 fields, got {}", fields.len()),
                });
            }
            let mut p = [0.0f64; 2];
            for (slot, field) in p.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|e| CensusError::BadLine {
                    line,
                    msg: format!("bad float `{field}`: {e}"),
                })?;
            }
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(CensusError::NonFinite(line));
            }
            points.push(p);
        }
        Ok(PointSet { points })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p[0], p[1]));
        }
        out
    }
}

fn is_unit(p: [f64; 2], q: [f64; 2], eps: f64) -> bool {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    (dx * dx + dy * dy - 1.0).abs() <= eps
}

fn check_eps(eps: f64) {
    assert!(
        (0.0..=MAX_EPS).contains(&eps),
        "eps must lie in [0, {MAX_EPS}], got {eps}"
    );
}

/// Counts unordered pairs at squared distance within eps of 1 using a unit
/// grid: each point is tested only against points in nearby cells, and a
/// pair is owned by its smaller index. Agrees with the brute-force count
/// exactly.
pub fn count_unit_pairs(ps: &PointSet, eps: f64) -> u64 {
    check_eps(eps);
    // a qualifying pair spans at most ceil(sqrt(1+eps)) cells per axis:
    // 1 when eps = 0, 2 otherwise
    let reach = (1.0 + eps).sqrt().ceil() as i64;
    let cell = |p: [f64; 2]| (p[0].floor() as i64, p[1].floor() as i64);

    let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for (i, &p) in ps.points().iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i as u32);
    }

    let mut count = 0u64;
    for (i, &p) in ps.points().iter().enumerate() {
        let (cx, cy) = cell(p);
        for gx in cx - reach..=cx + reach {
            for gy in cy - reach..=cy + reach {
                let Some(bucket) = grid.get(&(gx, gy)) else { continue };
                for &j in bucket {
                    if (j as usize) > i && is_unit(p, ps.points()[j as usize], eps) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// All-pairs reference counter with the same predicate.
pub fn count_unit_pairs_brute(ps: &PointSet, eps: f64) -> u64 {
    check_eps(eps);
    let pts = ps.points();
    let mut count = 0u64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if is_unit(pts[i], pts[j], eps) {
                count += 1;
            }
        }
    }
    count
}

/// The side×side integer grid scaled by 1/√radius_sq, so unit pairs are
/// exactly the integer pairs at squared distance radius_sq.
pub fn lattice_config(side: u32, radius_sq: u32) -> Result<PointSet, CensusError> {
    if side == 0 {
        return Err(CensusError::EmptyLattice);
    }
    let representable = (0..=radius_sq)
        .take_while(|a| a * a <= radius_sq)
        .any(|a| {
            let rest = radius_sq - a * a;
            let b = (rest as f64).sqrt().round() as u32;
            b * b == rest
        });
    if radius_sq == 0 || !representable {
        return Err(CensusError::NotSumOfTwoSquares(radius_sq));
    }
    let scale = 1.0 / (radius_sq as f64).sqrt();
    let mut points = Vec::with_capacity((side * side) as usize);
    for i in 0..side {
        for j in 0..side {
            points.push([i as f64 * scale, j as f64 * scale]);
        }
    }
    Ok(PointSet { points })
}

/// Points spread over k lines: line i gets ⌈n/k⌉ positions (truncated so the
/// total is n) in a window of length n/k. Random mode draws angles, offsets,
/// and positions from the seed; deterministic mode uses angle π·i/k, a fixed
/// per-line anchor, and integer positions — with k = 1 that is exactly the
/// integer points 0..n−1 on the x-axis.
pub fn lines_config(n: u32, k: u32, seed: u64, deterministic: bool) -> PointSet {
    assert!(k >= 1, "need at least one line");
    assert!(n >= k, "need at least one point per line");
    let per_line = n.div_ceil(k);
    let window = n as f64 / k as f64;
    let mut rng = SplitMix64::new(seed);
    let mut points = Vec::with_capacity(n as usize);
    for i in 0..k {
        let (angle, anchor) = if deterministic {
            (std::f64::consts::PI * i as f64 / k as f64, [0.0, 3.0 * i as f64])
        } else {
            (
                rng.uniform(0.0, std::f64::consts::PI),
                [rng.uniform(0.0, window), rng.uniform(0.0, window)],
            )
        };
        let dir = [angle.cos(), angle.sin()];
        for s in 0..per_line {
            if points.len() == n as usize {
                break;
            }
            let t = if deterministic { s as f64 } else { rng.uniform(0.0, window) };
            points.push([anchor[0] + t * dir[0], anchor[1] + t * dir[1]]);
        }
    }
    PointSet { points }
}

/// Which family of point sets a scaling run grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ScalingGenerator {
    /// Integer lattice scaled to put squared norm radius_sq at distance 1;
    /// sizes are interpreted as grid sides.
    Lattice { radius_sq: u32 },
    /// Points on k lines; sizes are point counts.
    Lines { k: u32, deterministic: bool },
    /// Uniform points in [0, √n]², constant density; sizes are point counts.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub count: u64,
    pub per_n: f64,
    pub per_n43: f64,
}

/// Growth table of unit-pair counts over increasing sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub generator: ScalingGenerator,
    pub seed: u64,
    pub eps: f64,
    pub rows: Vec<ScalingRow>,
    /// Caveats about what the counts do and do not separate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ScalingReport {
    /// Aligned text table with the same numbers as the JSON form.
    pub fn to_text(&self) -> String {
        let mut out = String::from(format!(
            "{:>10} {:>12} {:>12} {:>12}\n",
            "n", "count", "per_n", "per_n43"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:>10} {:>12} {:>12.6} {:>12.6}\n",
                row.n, row.count, row.per_n, row.per_n43
            ));
        }
        if let Some(note) = &self.note {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }
}

/// Counts unit pairs for each size of a generator family.
pub fn scaling_report(
    generator: ScalingGenerator,
    sizes: &[u32],
    seed: u64,
    eps: f64,
) -> Result<ScalingReport, CensusError> {
    check_eps(eps);
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CensusError::SizesNotAscending);
    }
    let mut rows = Vec::new();
    for (idx, &size) in sizes.iter().enumerate() {
        let ps = match generator {
            ScalingGenerator::Lattice { radius_sq } => lattice_config(size, radius_sq)?,
            ScalingGenerator::Lines { k, deterministic } => {
                lines_config(size, k, seed.wrapping_add(idx as u64), deterministic)
            }
            ScalingGenerator::Random => {
                let mut rng = SplitMix64::stream(seed, idx as u64);
                let w = (size as f64).sqrt();
                PointSet::new(
                    (0..size).map(|_| [rng.uniform(0.0, w), rng.uniform(0.0, w)]).collect(),
                )
            }
        };
        let n = ps.len();
        let count = count_unit_pairs(&ps, eps);
        rows.push(ScalingRow {
            n,
            count,
            per_n: count as f64 / n as f64,
            per_n43: count as f64 / (n as f64).powf(4.0 / 3.0),
        });
    }
    let note = match generator {
        ScalingGenerator::Lines { .. } => Some(
            "counts are totals; along-line and inter-line pairs are not separated".to_string(),
        ),
        _ => None,
    };
    Ok(ScalingReport { generator, seed, eps, rows, note })
}
