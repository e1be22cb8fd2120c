//! Reports and benchmark sweeps behind the `median` command-line tool.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, InstanceKind, InstanceSpec};
use crate::metric::MetricSpace;
use crate::oracles::{exact_median, tilde_median_naive};
use crate::select::approx_median;
use crate::REL_TOL;

/// Largest `n` for which the `d_tilde` baseline is run.
pub const TILDE_MAX_N: usize = 4096;
/// Largest `n` accepted by a benchmark sweep.
pub const BENCH_MAX_N: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianReport {
    pub n: usize,
    pub h: usize,
    /// Prime base; 0 when `n = 1` and no parameters are chosen.
    pub t: u64,
    pub sigma: usize,
    pub output_index: usize,
    pub output_cost: f64,
    pub exact_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub distinct_queries: usize,
    pub query_bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilde_queries: Option<usize>,
    pub transcript_hash: u64,
    pub runtime_ms: f64,
}

impl MedianReport {
    /// Claim violations: ratio above `2h` (with relative slack) or more
    /// distinct queries than `(n - sigma)(t + 1)`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.distinct_queries as u64 > self.query_bound {
            out.push(format!(
                "n={} h={}: distinct_queries {} exceeds bound {}",
                self.n, self.h, self.distinct_queries, self.query_bound
            ));
        }
        if let Some(exact) = self.exact_cost {
            let limit = 2.0 * self.h as f64 * exact;
            if self.output_cost > limit * (1.0 + REL_TOL) {
                out.push(format!(
                    "n={} h={}: output cost {} exceeds 2h * optimum = {}",
                    self.n, self.h, self.output_cost, limit
                ));
            }
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let mut line = format!(
            "n={} h={} t={} sigma={} output={} cost={} queries={}/{} hash={:016x}",
            self.n,
            self.h,
            self.t,
            self.sigma,
            self.output_index,
            self.output_cost,
            self.distinct_queries,
            self.query_bound,
            self.transcript_hash
        );
        if let Some(r) = self.ratio {
            line.push_str(&format!(" ratio={r:.6}"));
        }
        if let Some(tq) = self.tilde_queries {
            line.push_str(&format!(" tilde_queries={tq}"));
        }
        line
    }
}

/// `max(2, round((epsilon / 2) log2 n))`.
pub fn h_from_epsilon(epsilon: f64, n: usize) -> usize {
    let h = (epsilon / 2.0 * (n.max(1) as f64).log2()).round();
    if h.is_finite() && h > 2.0 {
        h as usize
    } else {
        2
    }
}

/// Runs the algorithm once, optionally alongside the exact oracle and the
/// `d_tilde` baseline.
pub fn run_report(
    metric: &MetricSpace,
    h: usize,
    exact: bool,
    tilde: bool,
) -> Result<MedianReport> {
    let exact_cost = if exact {
        Some(exact_median(metric)?.exact_cost)
    } else {
        None
    };
    report_with(metric, h, exact_cost, tilde)
}

fn report_with(
    metric: &MetricSpace,
    h: usize,
    exact_cost: Option<f64>,
    tilde: bool,
) -> Result<MedianReport> {
    let start = Instant::now();
    let run = approx_median(metric, h)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let tilde_queries = if tilde && metric.len() >= 2 {
        Some(tilde_median_naive(metric, h)?.count_distinct)
    } else {
        None
    };
    let (t, sigma) = run.params().map_or((0, 0), |p| (p.t, p.sigma));
    Ok(MedianReport {
        n: run.n,
        h,
        t,
        sigma,
        output_index: run.output,
        output_cost: run.output_cost,
        exact_cost,
        ratio: exact_cost.map(|e| ratio(run.output_cost, e)),
        distinct_queries: run.distinct_queries,
        query_bound: run.query_bound,
        tilde_queries,
        transcript_hash: run.transcript_hash,
        runtime_ms,
    })
}

fn ratio(cost: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        // only n = 1, where both are zero
        1.0
    } else {
        cost / optimum
    }
}

/// One CSV row of a benchmark sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub h: usize,
    pub t: u64,
    pub sigma: usize,
    pub kind: InstanceKind,
    pub seed: u64,
    pub output_index: usize,
    pub output_cost: f64,
    pub exact_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub distinct_queries: usize,
    pub query_bound: u64,
    pub tilde_queries: Option<usize>,
    pub transcript_hash: u64,
    pub runtime_ms: f64,
}

impl BenchRow {
    fn new(report: MedianReport, kind: InstanceKind, seed: u64) -> Self {
        Self {
            n: report.n,
            h: report.h,
            t: report.t,
            sigma: report.sigma,
            kind,
            seed,
            output_index: report.output_index,
            output_cost: report.output_cost,
            exact_cost: report.exact_cost,
            ratio: report.ratio,
            distinct_queries: report.distinct_queries,
            query_bound: report.query_bound,
            tilde_queries: report.tilde_queries,
            transcript_hash: report.transcript_hash,
            runtime_ms: report.runtime_ms,
        }
    }

    pub fn report(&self) -> MedianReport {
        MedianReport {
            n: self.n,
            h: self.h,
            t: self.t,
            sigma: self.sigma,
            output_index: self.output_index,
            output_cost: self.output_cost,
            exact_cost: self.exact_cost,
            ratio: self.ratio,
            distinct_queries: self.distinct_queries,
            query_bound: self.query_bound,
            tilde_queries: self.tilde_queries,
            transcript_hash: self.transcript_hash,
            runtime_ms: self.runtime_ms,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub h_list: Vec<usize>,
    pub kinds: Vec<InstanceKind>,
    pub trials: u64,
    pub seed: u64,
    pub tilde: bool,
    /// The exact oracle runs only up to this `n`.
    pub exact_max_n: usize,
}

impl BenchConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.n_list.is_empty() || self.h_list.is_empty() || self.kinds.is_empty() {
            return bad("n-list, h-list and kinds must be non-empty".into());
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0 || n > BENCH_MAX_N) {
            return bad(format!("n = {n} outside [1, {BENCH_MAX_N}]"));
        }
        if let Some(&h) = self.h_list.iter().find(|&&h| h < 2) {
            return Err(Error::DepthTooSmall(h));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        Ok(())
    }
}

/// Runs every `(n, kind, seed)` instance against every `h`. Instances run in
/// parallel; rows come back sorted by `(n, h, kind, seed)`.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.check()?;
    let mut jobs = Vec::new();
    for &n in &config.n_list {
        for &kind in &config.kinds {
            for trial in 0..config.trials {
                jobs.push((n, kind, config.seed.wrapping_add(trial)));
            }
        }
    }
    let per_job: Vec<Vec<BenchRow>> = jobs
        .par_iter()
        .map(|&(n, kind, seed)| -> Result<Vec<BenchRow>> {
            let metric = generate(&InstanceSpec::new(kind, n, seed))?;
            let exact_cost = if n <= config.exact_max_n {
                Some(exact_median(&metric)?.exact_cost)
            } else {
                None
            };
            let tilde = config.tilde && n <= TILDE_MAX_N;
            config
                .h_list
                .iter()
                .map(|&h| {
                    report_with(&metric, h, exact_cost, tilde).map(|r| BenchRow::new(r, kind, seed))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<BenchRow> = per_job.into_iter().flatten().collect();
    rows.sort_by_key(|r| (r.n, r.h, r.kind, r.seed));
    Ok(rows)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchSummary {
    pub max_ratio_per_h: BTreeMap<usize, f64>,
    /// `max distinct_queries / n^(1 + 1/h)` per `(n, h)`.
    pub max_query_density: BTreeMap<(usize, usize), f64>,
    pub mean_tilde_ratio: Option<f64>,
    /// `(n, h)` cells whose rows disagree on the transcript hash.
    pub hash_mismatches: Vec<(usize, usize)>,
    /// Rows where `tilde_queries / distinct_queries < h / 2`.
    pub tilde_shortfalls: Vec<(usize, usize, InstanceKind, u64)>,
    pub violations: Vec<String>,
}

impl BenchSummary {
    pub fn from_rows(rows: &[BenchRow]) -> Self {
        let mut s = Self::default();
        let mut hashes: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut tilde_ratios = Vec::new();
        for row in rows {
            if let Some(r) = row.ratio {
                let e = s.max_ratio_per_h.entry(row.h).or_insert(r);
                *e = e.max(r);
            }
            let density =
                row.distinct_queries as f64 / (row.n as f64).powf(1.0 + 1.0 / row.h as f64);
            let e = s.max_query_density.entry((row.n, row.h)).or_insert(density);
            *e = e.max(density);
            if let Some(tq) = row.tilde_queries {
                if row.distinct_queries > 0 {
                    let r = tq as f64 / row.distinct_queries as f64;
                    tilde_ratios.push(r);
                    if r < row.h as f64 / 2.0 {
                        s.tilde_shortfalls.push((row.n, row.h, row.kind, row.seed));
                    }
                }
            }
            let key = (row.n, row.h);
            match hashes.get(&key) {
                Some(&h) if h != row.transcript_hash => {
                    if !s.hash_mismatches.contains(&key) {
                        s.hash_mismatches.push(key);
                    }
                }
                Some(_) => {}
                None => {
                    hashes.insert(key, row.transcript_hash);
                }
            }
            s.violations.extend(row.report().violations());
        }
        if !tilde_ratios.is_empty() {
            s.mean_tilde_ratio = Some(tilde_ratios.iter().sum::<f64>() / tilde_ratios.len() as f64);
        }
        s
    }

    /// True when no row breaks a claim and every cell is nonadaptive.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.hash_mismatches.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (h, r) in &self.max_ratio_per_h {
            out.push_str(&format!("max ratio h={h}: {r:.6} (bound {})\n", 2 * h));
        }
        for ((n, h), d) in &self.max_query_density {
            out.push_str(&format!(
                "max distinct_queries/n^(1+1/h) n={n} h={h}: {d:.4}\n"
            ));
        }
        if let Some(m) = self.mean_tilde_ratio {
            out.push_str(&format!("mean tilde_queries/distinct_queries: {m:.4}\n"));
        }
        for (n, h, kind, seed) in &self.tilde_shortfalls {
            out.push_str(&format!(
                "warning: tilde saving below h/2 at n={n} h={h} kind={kind} seed={seed}\n"
            ));
        }
        for (n, h) in &self.hash_mismatches {
            out.push_str(&format!(
                "FAIL nonadaptivity: transcript hashes differ at n={n} h={h}\n"
            ));
        }
        for v in &self.violations {
            out.push_str(&format!("FAIL {v}\n"));
        }
        out
    }
}

/// Writes rows as CSV through a temporary file in the target directory, then
/// renames it into place.
pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    {
        let mut writer = csv::Writer::from_writer(tmp.as_file());
        for row in rows {
            writer.serialize(row)?;
        }
        if rows.is_empty() {
            writer.write_record(CSV_HEADER)?;
        }
        writer.flush().map_err(io_err)?;
    }
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub const CSV_HEADER: [&str; 15] = [
    "n",
    "h",
    "t",
    "sigma",
    "kind",
    "seed",
    "output_index",
    "output_cost",
    "exact_cost",
    "ratio",
    "distinct_queries",
    "query_bound",
    "tilde_queries",
    "transcript_hash",
    "runtime_ms",
];

pub fn report_to_json(report: &MedianReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Writes a report as pretty JSON.
pub fn write_report(path: &Path, report: &MedianReport) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::create(path).map_err(io_err)?;
    writeln!(file, "{}", report_to_json(report)?).map_err(io_err)
}
