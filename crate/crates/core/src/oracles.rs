//! Ground truth and baselines: the exact 1-median, literal evaluators of the
//! `f`/`g` sums, and the earlier digit-prefix pseudo-distance (`d_tilde`)
//! used to compare query counts.
//!
//! Nothing here shares code with the dynamic program in [`crate::select`].

use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::metric::MetricSpace;
use crate::params::{ceil_root, is_prime, Params};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub exact_index: usize,
    pub exact_cost: f64,
    /// `costs[i] = sum_j d(i, j)`.
    pub costs: Vec<f64>,
}

/// Exhaustive `O(n^2)` scan; ties go to the smallest index.
pub fn exact_median(metric: &MetricSpace) -> Result<OracleReport> {
    if metric.is_empty() {
        return Err(Error::EmptyMetric);
    }
    let costs: Vec<f64> = (0..metric.len()).map(|i| metric.cost(i)).collect();
    let (exact_index, exact_cost) = argmin(&costs);
    Ok(OracleReport {
        exact_index,
        exact_cost,
        costs,
    })
}

fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Sum over digit tuples `(s_m, ..., s_0)` of the `m + 1` chained hops,
/// optionally restricted to tuples not exceeding the low `m + 1` digits of
/// `n - sigma - 1`. Hop endpoints are evaluated as plain integers from the
/// closed-form expression and reduced only when the distance is looked up.
fn level_sum(metric: &MetricSpace, params: &Params, i: usize, m: usize, capped: bool) -> f64 {
    assert!(m < params.h, "level {m} out of range for h = {}", params.h);
    let q = params.modulus() as u128;
    let t = params.t as u128;
    let width = m + 1;
    // digits[l] = s_{m - l}
    let cap: Vec<u128> = (0..width)
        .map(|l| params.sprime.digit(m - l) as u128)
        .collect();
    let cap_value = cap.iter().fold(0u128, |acc, &s| acc * t + s);
    let mut ledger = QueryLedger::new(metric);
    let mut digits = vec![0u128; width];
    let mut total = 0.0;
    loop {
        let value = digits.iter().fold(0u128, |acc, &s| acc * t + s);
        if !capped || value <= cap_value {
            for k in 0..width {
                let prefix = |len: usize| {
                    (0..len).fold(0u128, |acc, l| {
                        acc + digits[l] * t.pow((len - 1 - l) as u32)
                    })
                };
                let from = i as u128 * t.pow(k as u32) + prefix(k);
                let to = i as u128 * t.pow(k as u32 + 1) + prefix(k + 1);
                total += ledger
                    .query((from % q) as usize, (to % q) as usize)
                    .expect("reduced indices are in range");
            }
        }
        // odometer increment, least significant digit last
        let mut pos = width;
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < t {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Literal evaluation of `f(i, m)`. Intended for `t^(m+1)` up to about `1e6`.
pub fn f_direct(metric: &MetricSpace, params: &Params, i: usize, m: usize) -> f64 {
    level_sum(metric, params, i, m, true)
}

/// Literal evaluation of `g(i, m)`.
pub fn g_direct(metric: &MetricSpace, params: &Params, i: usize, m: usize) -> f64 {
    level_sum(metric, params, i, m, false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TildeReport {
    pub output: usize,
    pub output_cost: f64,
    pub count_distinct: usize,
    pub n: usize,
    pub h: usize,
    pub t: u64,
}

/// Naive evaluation of the earlier pseudo-distance
/// `d_tilde(i, i + j mod n) = sum_k d(p_k, p_k + s_{h-1-k}(j) t^{h-1-k} mod n)`
/// with `p_0 = i` and `p_{k+1}` the endpoint of hop `k`: digits of `j` are
/// added from the most significant down, with no shift (`sigma`), modulo `n`.
/// Every `i` sums `d_tilde` over all `j < n`; the smallest minimiser wins.
/// All distances go through one counting ledger, each distinct
/// `(p, k, s)` hop queried once.
pub fn tilde_median_naive(metric: &MetricSpace, h: usize) -> Result<TildeReport> {
    tilde_run(metric, h).map(|(report, _)| report)
}

/// [`tilde_median_naive`] plus its query transcript.
pub fn tilde_run(metric: &MetricSpace, h: usize) -> Result<(TildeReport, Vec<(u32, u32)>)> {
    if h < 2 {
        return Err(Error::DepthTooSmall(h));
    }
    let n = metric.len();
    if n < 2 {
        return Err(Error::InvalidInstance(format!(
            "the d_tilde baseline needs n >= 2, got {n}"
        )));
    }
    let low = ceil_root(n as u64, h);
    let t = (low..=2 * low)
        .find(|&c| is_prime(c))
        .expect("Bertrand's postulate guarantees a prime in [k, 2k]");
    let tu = t as usize;

    // steps[k] = t^(h-1-k) mod n
    let steps: Vec<usize> = (0..h)
        .map(|k| (0..h - 1 - k).fold(1u64, |acc, _| acc * t % n as u64) as usize)
        .collect();

    let mut ledger = QueryLedger::new(metric);
    let mut cache = vec![f64::NAN; n * h * tu];
    let mut hop =
        |ledger: &mut QueryLedger<'_>, p: usize, k: usize, s: usize| -> Result<(f64, usize)> {
            let to = (p + s * steps[k]) % n;
            let slot = (p * h + k) * tu + s;
            if cache[slot].is_nan() {
                cache[slot] = ledger.query(p, to)?;
            }
            Ok((cache[slot], to))
        };

    let mut digits = vec![0usize; h];
    let mut sums = vec![0.0; n];
    for (i, sum) in sums.iter_mut().enumerate() {
        digits.iter_mut().for_each(|s| *s = 0);
        for _ in 0..n {
            let mut p = i;
            for (k, &s) in digits.iter().enumerate() {
                let (d, to) = hop(&mut ledger, p, k, s)?;
                *sum += d;
                p = to;
            }
            for s in digits.iter_mut().rev() {
                *s += 1;
                if *s < tu {
                    break;
                }
                *s = 0;
            }
        }
    }
    let (output, _) = argmin(&sums);
    let report = TildeReport {
        output,
        output_cost: metric.cost(output),
        count_distinct: ledger.count_distinct(),
        n,
        h,
        t,
    };
    Ok((report, ledger.into_transcript()))
}
