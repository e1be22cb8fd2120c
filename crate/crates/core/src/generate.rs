//! Seeded random metric instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// Largest `n` accepted for kinds stored as a full matrix.
pub const MAX_MATRIX_N: usize = 16_384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// Shortest-path closure of a complete graph with weights in `[0.1, 1]`.
    Matrix,
    /// Uniform points in `[0, 1]^dim`.
    Euclidean,
    /// Shortest paths in a connected random graph with weights in `[1, 2]`.
    Graph,
    /// `1 + u` with `u` uniform in `[0, amplitude]`, `amplitude <= 0.9`.
    PerturbedUniform,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 4] = [
        InstanceKind::Matrix,
        InstanceKind::Euclidean,
        InstanceKind::Graph,
        InstanceKind::PerturbedUniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Matrix => "matrix",
            InstanceKind::Euclidean => "euclidean",
            InstanceKind::Graph => "graph",
            InstanceKind::PerturbedUniform => "perturbed-uniform",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown instance kind {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub seed: u64,
    /// Euclidean dimension.
    pub dim: usize,
    /// Edge probability for `graph`; `None` picks `min(1, 2 ln n / n)`.
    pub density: Option<f64>,
    /// Perturbation amplitude for `perturbed-uniform`.
    pub amplitude: f64,
}

impl InstanceSpec {
    pub fn new(kind: InstanceKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            dim: 2,
            density: None,
            amplitude: 0.9,
        }
    }
}

/// Builds the instance described by `spec`. A pure function of the spec.
pub fn generate(spec: &InstanceSpec) -> Result<MetricSpace> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidInstance("n must be at least 1".into()));
    }
    if spec.kind != InstanceKind::Euclidean && n > MAX_MATRIX_N {
        return Err(Error::InvalidInstance(format!(
            "kind {} is stored as a full matrix; n = {n} exceeds {MAX_MATRIX_N}",
            spec.kind
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        InstanceKind::Euclidean => {
            if spec.dim == 0 {
                return Err(Error::InvalidInstance("dim must be at least 1".into()));
            }
            let coords = (0..n * spec.dim).map(|_| rng.random::<f64>()).collect();
            MetricSpace::from_flat_points(spec.dim, coords)
        }
        InstanceKind::PerturbedUniform => {
            if !(0.0..=0.9).contains(&spec.amplitude) {
                return Err(Error::InvalidInstance(format!(
                    "amplitude must lie in [0, 0.9], got {}",
                    spec.amplitude
                )));
            }
            let amp = spec.amplitude;
            MetricSpace::from_fn(n, |_, _| 1.0 + amp * rng.random::<f64>())
        }
        InstanceKind::Matrix => {
            let mut dist = vec![0.0; n * n];
            for x in 0..n {
                for y in 0..x {
                    let w = rng.random_range(0.1..=1.0);
                    dist[x * n + y] = w;
                    dist[y * n + x] = w;
                }
            }
            floyd_warshall(n, &mut dist);
            MetricSpace::from_matrix(n, dist)
        }
        InstanceKind::Graph => {
            let p = spec
                .density
                .unwrap_or_else(|| (2.0 * (n as f64).ln() / n as f64).min(1.0));
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInstance(format!(
                    "density must lie in [0, 1], got {p}"
                )));
            }
            let mut dist = vec![f64::INFINITY; n * n];
            let mut parent: Vec<usize> = (0..n).collect();
            for x in 0..n {
                dist[x * n + x] = 0.0;
                for y in 0..x {
                    if rng.random::<f64>() < p {
                        let w = rng.random_range(1.0..=2.0);
                        dist[x * n + y] = w;
                        dist[y * n + x] = w;
                        union(&mut parent, x, y);
                    }
                }
            }
            // Bridge components in order of their smallest member.
            let mut roots: Vec<usize> = Vec::new();
            for x in 0..n {
                if find(&mut parent, x) == x {
                    roots.push(x);
                }
            }
            for pair in roots.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let w = rng.random_range(1.0..=2.0);
                dist[a * n + b] = w;
                dist[b * n + a] = w;
            }
            floyd_warshall(n, &mut dist);
            MetricSpace::from_matrix(n, dist)
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // keep the smaller index as root
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        parent[hi] = lo;
    }
}

fn floyd_warshall(n: usize, dist: &mut [f64]) {
    for k in 0..n {
        let row_k: Vec<f64> = dist[k * n..(k + 1) * n].to_vec();
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            let row_i = &mut dist[i * n..(i + 1) * n];
            for (dij, &dkj) in row_i.iter_mut().zip(&row_k) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        }
    }
}
