//! Finite metric spaces over the points `0..n` and their on-disk format.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::REL_TOL;

/// Largest `n` for which [`validate_metric`] checks every triple.
pub const EXHAUSTIVE_TRIPLE_LIMIT: usize = 512;
/// Largest `n` for which every pair is checked for symmetry and positivity.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 4096;
/// Number of random triples checked above [`EXHAUSTIVE_TRIPLE_LIMIT`].
pub const SAMPLED_TRIPLES: usize = 200_000;
/// Validation stops collecting after this many violations.
pub const MAX_VIOLATIONS: usize = 1000;

const SAMPLE_SEED: u64 = 0x6d65_6469_616e;

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Row-major `n * n` table.
    Matrix(Vec<f64>),
    /// Row-major `n * dim` coordinates; distances are Euclidean.
    Points { dim: usize, coords: Vec<f64> },
}

/// `n` points with a distance function, either tabulated or computed from
/// Euclidean coordinates on demand. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpace {
    n: usize,
    storage: Storage,
}

impl MetricSpace {
    /// Builds a tabulated metric from a full row-major matrix.
    pub fn from_matrix(n: usize, matrix: Vec<f64>) -> Result<Self> {
        check_size(n)?;
        if matrix.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        Ok(Self {
            n,
            storage: Storage::Matrix(matrix),
        })
    }

    /// Tabulates `dist` over all pairs; the diagonal is forced to zero and
    /// only `dist(x, y)` with `x > y` is evaluated.
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_size(n)?;
        let mut matrix = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..x {
                let d = dist(x, y);
                matrix[x * n + y] = d;
                matrix[y * n + x] = d;
            }
        }
        Ok(Self {
            n,
            storage: Storage::Matrix(matrix),
        })
    }

    /// Builds a tabulated metric from the strict lower triangle, row-major
    /// (`d(1,0), d(2,0), d(2,1), d(3,0), ...`).
    pub fn from_lower_triangle(n: usize, lower: &[f64]) -> Result<Self> {
        check_size(n)?;
        let expected = n * n.saturating_sub(1) / 2;
        if lower.len() != expected {
            return Err(Error::InvalidInstance(format!(
                "dist_lower_triangle has {} entries, expected {expected} for n = {n}",
                lower.len()
            )));
        }
        let mut matrix = vec![0.0; n * n];
        let mut k = 0;
        for x in 1..n {
            for y in 0..x {
                matrix[x * n + y] = lower[k];
                matrix[y * n + x] = lower[k];
                k += 1;
            }
        }
        Ok(Self {
            n,
            storage: Storage::Matrix(matrix),
        })
    }

    /// Builds a Euclidean metric from a list of points of equal dimension.
    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        check_size(points.len())?;
        if dim == 0 && !points.is_empty() {
            return Err(Error::InvalidInstance(
                "points must have dimension >= 1".into(),
            ));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInstance(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self {
            n: points.len(),
            storage: Storage::Points { dim, coords },
        })
    }

    pub(crate) fn from_flat_points(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let n = coords.len().checked_div(dim).unwrap_or(0);
        check_size(n)?;
        Ok(Self {
            n,
            storage: Storage::Points { dim, coords },
        })
    }

    /// The line metric `d(x, y) = |x - y|` on `0..n`.
    pub fn line(n: usize) -> Self {
        Self::from_fn(n, |x, y| x.abs_diff(y) as f64).expect("line metric size")
    }

    /// The uniform metric: every pair of distinct points at distance 1.
    pub fn uniform(n: usize) -> Self {
        Self::from_fn(n, |_, _| 1.0).expect("uniform metric size")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.storage, Storage::Points { .. })
    }

    /// Distance between two in-range points. Panics on out-of-range indices;
    /// algorithms go through [`crate::QueryLedger`] instead.
    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.n && y < self.n, "point index out of range");
        match &self.storage {
            Storage::Matrix(m) => m[x * self.n + y],
            Storage::Points { dim, coords } => {
                if x == y {
                    return 0.0;
                }
                let a = &coords[x * dim..(x + 1) * dim];
                let b = &coords[y * dim..(y + 1) * dim];
                a.iter()
                    .zip(b)
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Sum of distances from `x` to every point.
    pub fn cost(&self, x: usize) -> f64 {
        (0..self.n).map(|y| self.dist(x, y)).sum()
    }

    /// Strict lower triangle in row-major order.
    pub fn lower_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for x in 1..self.n {
            for y in 0..x {
                out.push(self.dist(x, y));
            }
        }
        out
    }

    pub fn to_file(&self) -> InstanceFile {
        match &self.storage {
            Storage::Matrix(_) => InstanceFile {
                kind: FileKind::Matrix,
                n: self.n,
                dim: None,
                points: None,
                dist_lower_triangle: Some(self.lower_triangle()),
            },
            Storage::Points { dim, coords } => InstanceFile {
                kind: FileKind::Euclidean,
                n: self.n,
                dim: Some(*dim),
                points: Some(coords.chunks((*dim).max(1)).map(<[f64]>::to_vec).collect()),
                dist_lower_triangle: None,
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: InstanceFile = serde_json::from_str(&text)?;
        file.into_metric()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_file())?;
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn check_size(n: usize) -> Result<()> {
    if n as u64 > u32::MAX as u64 {
        return Err(Error::TooManyPoints(n));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Matrix,
    Euclidean,
}

/// JSON instance file. Exactly one of `points` and `dist_lower_triangle`
/// must be present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: FileKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist_lower_triangle: Option<Vec<f64>>,
}

impl InstanceFile {
    pub fn into_metric(self) -> Result<MetricSpace> {
        match (self.points, self.dist_lower_triangle) {
            (Some(_), Some(_)) => Err(Error::InvalidInstance(
                "both points and dist_lower_triangle are present".into(),
            )),
            (None, None) => Err(Error::InvalidInstance(
                "neither points nor dist_lower_triangle is present".into(),
            )),
            (Some(points), None) => {
                if self.kind != FileKind::Euclidean {
                    return Err(Error::InvalidInstance(
                        "points payload requires kind \"euclidean\"".into(),
                    ));
                }
                if points.len() != self.n {
                    return Err(Error::InvalidInstance(format!(
                        "n = {} but {} points given",
                        self.n,
                        points.len()
                    )));
                }
                let dim = match (self.dim, points.first()) {
                    (Some(d), _) => d,
                    (None, Some(p)) => p.len(),
                    (None, None) => 0,
                };
                MetricSpace::from_points(dim, &points)
            }
            (None, Some(lower)) => {
                if self.kind != FileKind::Matrix {
                    return Err(Error::InvalidInstance(
                        "dist_lower_triangle payload requires kind \"matrix\"".into(),
                    ));
                }
                MetricSpace::from_lower_triangle(self.n, &lower)
            }
        }
    }
}

/// A failed metric axiom together with its witnessing points.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    /// `d(x, x) != 0`.
    Identity { x: usize, value: f64 },
    /// `d(x, y) != d(y, x)`.
    Symmetry { x: usize, y: usize },
    /// `d(x, y) <= 0` (or not finite) for `x != y`.
    Positivity { x: usize, y: usize, value: f64 },
    /// `d(x, y) + d(y, z) < d(x, z)` beyond the relative tolerance.
    Triangle { x: usize, y: usize, z: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Identity { x, value } => write!(f, "identity violation ({x}): d = {value}"),
            Violation::Symmetry { x, y } => write!(f, "symmetry violation ({x},{y})"),
            Violation::Positivity { x, y, value } => {
                write!(f, "positivity violation ({x},{y}): d = {value}")
            }
            Violation::Triangle { x, y, z } => write!(f, "triangle violation ({x},{y},{z})"),
        }
    }
}

fn check_pair(m: &MetricSpace, x: usize, y: usize, out: &mut Vec<Violation>) {
    let d = m.dist(x, y);
    if d != m.dist(y, x) {
        out.push(Violation::Symmetry { x, y });
    }
    if !(d > 0.0 && d.is_finite()) {
        out.push(Violation::Positivity { x, y, value: d });
    }
}

fn triangle_fails(m: &MetricSpace, x: usize, y: usize, z: usize) -> bool {
    let direct = m.dist(x, z);
    let detour = m.dist(x, y) + m.dist(y, z);
    direct - detour > REL_TOL * direct.abs().max(detour.abs())
}

/// Checks the metric axioms. Pairwise axioms are checked exhaustively up to
/// [`EXHAUSTIVE_PAIR_LIMIT`] points and on the sampled triples above it; the
/// triangle inequality is checked over every triple up to
/// [`EXHAUSTIVE_TRIPLE_LIMIT`] points and over [`SAMPLED_TRIPLES`] seeded
/// random triples above it. An empty result means the metric is valid.
pub fn validate_metric(m: &MetricSpace) -> Vec<Violation> {
    let n = m.len();
    let mut out = Vec::new();
    let full = |out: &Vec<Violation>| out.len() >= MAX_VIOLATIONS;

    for x in 0..n {
        let d = m.dist(x, x);
        if d != 0.0 {
            out.push(Violation::Identity { x, value: d });
            if full(&out) {
                return out;
            }
        }
    }
    if n <= EXHAUSTIVE_PAIR_LIMIT {
        for x in 0..n {
            for y in 0..x {
                check_pair(m, y, x, &mut out);
                if full(&out) {
                    return out;
                }
            }
        }
    }

    if n <= EXHAUSTIVE_TRIPLE_LIMIT {
        for x in 0..n {
            for z in 0..x {
                for y in 0..n {
                    if y != x && y != z && triangle_fails(m, z, y, x) {
                        out.push(Violation::Triangle { x: z, y, z: x });
                        if full(&out) {
                            return out;
                        }
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        for _ in 0..SAMPLED_TRIPLES {
            let x = rng.random_range(0..n);
            let y = rng.random_range(0..n);
            let z = rng.random_range(0..n);
            if n > EXHAUSTIVE_PAIR_LIMIT {
                for (a, b) in [(x, y), (y, z), (x, z)] {
                    if a != b {
                        check_pair(m, a.min(b), a.max(b), &mut out);
                    }
                }
            }
            if x != y && y != z && x != z && triangle_fails(m, x, y, z) {
                out.push(Violation::Triangle { x, y, z });
                if full(&out) {
                    return out;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_lower(n: usize, lower: &[f64]) -> MetricSpace {
        MetricSpace::from_lower_triangle(n, lower).unwrap()
    }

    #[test]
    fn line_metric_is_valid() {
        assert!(validate_metric(&MetricSpace::line(4)).is_empty());
    }

    #[test]
    fn detects_triangle_violation() {
        // d(1,0)=1, d(2,0)=5, d(2,1)=1
        let m = from_lower(3, &[1.0, 5.0, 1.0]);
        assert_eq!(
            validate_metric(&m),
            vec![Violation::Triangle { x: 0, y: 1, z: 2 }]
        );
    }

    #[test]
    fn detects_zero_distance() {
        let m = from_lower(3, &[0.0, 1.0, 1.0]);
        let v = validate_metric(&m);
        assert!(v.contains(&Violation::Positivity {
            x: 0,
            y: 1,
            value: 0.0
        }));
    }

    #[test]
    fn detects_asymmetry_and_nonzero_diagonal() {
        let m = MetricSpace::from_matrix(2, vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        let v = validate_metric(&m);
        assert!(v.contains(&Violation::Identity { x: 0, value: 0.5 }));
        assert!(v.contains(&Violation::Symmetry { x: 0, y: 1 }));
    }

    #[test]
    fn euclidean_round_off_is_tolerated() {
        // collinear points: d(0,2) = d(0,1) + d(1,2) up to rounding
        let pts = vec![vec![0.1, 0.2], vec![0.4, 0.6], vec![0.7, 1.0]];
        let m = MetricSpace::from_points(2, &pts).unwrap();
        assert!(validate_metric(&m).is_empty());
    }

    #[test]
    fn lower_triangle_layout() {
        let m = MetricSpace::line(4);
        assert_eq!(m.lower_triangle(), vec![1.0, 2.0, 1.0, 3.0, 2.0, 1.0]);
        assert_eq!(from_lower(4, &m.lower_triangle()), m);
    }

    #[test]
    fn file_rejects_both_or_neither_payload() {
        let both = r#"{"kind":"matrix","n":2,"dist_lower_triangle":[1.0],"points":[[0.0],[1.0]]}"#;
        let neither = r#"{"kind":"matrix","n":2}"#;
        for s in [both, neither] {
            let f: InstanceFile = serde_json::from_str(s).unwrap();
            assert!(matches!(f.into_metric(), Err(Error::InvalidInstance(_))));
        }
    }

    #[test]
    fn file_rejects_wrong_lengths() {
        let s = r#"{"kind":"matrix","n":3,"dist_lower_triangle":[1.0,2.0]}"#;
        let f: InstanceFile = serde_json::from_str(s).unwrap();
        assert!(f.into_metric().is_err());
        let s = r#"{"kind":"euclidean","n":3,"dim":1,"points":[[0.0],[1.0]]}"#;
        let f: InstanceFile = serde_json::from_str(s).unwrap();
        assert!(f.into_metric().is_err());
    }

    #[test]
    fn euclidean_file_round_trip() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        let m = MetricSpace::from_points(2, &pts).unwrap();
        let back = m.to_file().into_metric().unwrap();
        assert_eq!(back, m);
        assert_eq!(back.dist(0, 1), 5.0);
    }
}
