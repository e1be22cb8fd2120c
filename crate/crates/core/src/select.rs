//! The approximate 1-median algorithm: a fixed query set, the `f`/`g`
//! dynamic program over base-`t` digits, and the final two-way selector.
//!
//! For `i` in `0..q` (with `q = n - sigma`) the algorithm reads only
//! `d(i, (i t + s) mod q)` for `s` in `0..t` and `d(n - 1, i)`. From those it
//! computes, for every `i`, the sum over `j` of the pseudo-distance
//! `d_hat(i, j)`: a chain of `h` real distances that walks from `i` to
//! `i t^h + j (mod q)` one base-`t` digit of `j` at a time. The `i`
//! minimising that sum, or `n - 1`, is a `2h`-approximate 1-median.

use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::metric::MetricSpace;
use crate::params::{choose_params, tary_digits, Params};

/// `d(x mod q, y mod q)` for arbitrary naturals `x`, `y`.
pub fn d_mod(ledger: &mut QueryLedger<'_>, x: u64, y: u64, params: &Params) -> Result<f64> {
    let q = params.modulus() as u64;
    ledger.query((x % q) as usize, (y % q) as usize)
}

/// Evaluates `d_hat(i, i t^h + j mod q)` straight from its defining sum of
/// `h` hops. Indexed by `(i, j)`, not by the mapped endpoint.
pub fn hat_distance_direct(
    ledger: &mut QueryLedger<'_>,
    i: usize,
    j: usize,
    params: &Params,
) -> Result<f64> {
    let q = params.modulus() as u64;
    let digits = tary_digits(j as u64, params.t, params.h)?;
    let mut from = i as u64 % q;
    let mut total = 0.0;
    for &s in &digits.0 {
        let to = (from * params.t + s) % q;
        total += d_mod(ledger, from, to, params)?;
        from = to;
    }
    Ok(total)
}

/// Answers to the fixed query set, indexed by `(i, s)` rather than by pair.
#[derive(Clone, Debug)]
pub struct QueryAnswers {
    q: usize,
    t: usize,
    /// `near[i * t + s] = d(i, (i t + s) mod q)`.
    near: Vec<f64>,
    /// `to_last[i] = d(n - 1, i)`.
    to_last: Vec<f64>,
}

impl QueryAnswers {
    #[inline]
    pub fn near(&self, i: usize, s: usize) -> f64 {
        self.near[i * self.t + s]
    }

    #[inline]
    pub fn to_last(&self, i: usize) -> f64 {
        self.to_last[i]
    }

    #[inline]
    fn next(&self, i: usize, s: usize) -> usize {
        (i * self.t + s) % self.q
    }
}

/// Issues every query the algorithm will ever need, in the fixed order
/// `for i { for s { d(i, it+s mod q) }; d(n-1, i) }`.
pub fn issue_queries(ledger: &mut QueryLedger<'_>, params: &Params) -> Result<QueryAnswers> {
    let q = params.modulus();
    let t = params.t as usize;
    let last = params.n - 1;
    let mut near = Vec::with_capacity(q * t);
    let mut to_last = Vec::with_capacity(q);
    for i in 0..q {
        for s in 0..t {
            near.push(ledger.query(i, (i * t + s) % q)?);
        }
        to_last.push(ledger.query(last, i)?);
    }
    Ok(QueryAnswers {
        q,
        t,
        near,
        to_last,
    })
}

/// The `f` and `g` tables, `q` rows by `h` columns, stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DpTables {
    q: usize,
    h: usize,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl DpTables {
    pub fn f(&self, i: usize, m: usize) -> f64 {
        self.f[m * self.q + i]
    }

    pub fn g(&self, i: usize, m: usize) -> f64 {
        self.g[m * self.q + i]
    }

    pub fn rows(&self) -> usize {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.h
    }

    /// Column `m` of `f`.
    pub fn f_column(&self, m: usize) -> &[f64] {
        &self.f[m * self.q..(m + 1) * self.q]
    }
}

fn tpow(t: u64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, _| acc * t as f64)
}

/// Fills column 0: `f[i][0]` sums `d(i, it+s)` over `s <= s'_0`, `g[i][0]`
/// over all `s < t`.
pub fn dp_base(answers: &QueryAnswers, params: &Params) -> DpTables {
    let q = params.modulus();
    let h = params.h;
    let t = params.t as usize;
    let cap = params.sprime.digit(0) as usize;
    let mut f = vec![0.0; q * h];
    let mut g = vec![0.0; q * h];
    for i in 0..q {
        let mut below = 0.0;
        for s in 0..=cap {
            below += answers.near(i, s);
        }
        let mut all = below;
        for s in cap + 1..t {
            all += answers.near(i, s);
        }
        f[i] = below;
        g[i] = all;
    }
    DpTables { q, h, f, g }
}

/// `g[i][m] = t^m sum_s d(i, it+s) + sum_s g[it+s mod q][m-1]`.
pub fn dp_g_step(tables: &mut DpTables, answers: &QueryAnswers, params: &Params, m: usize) {
    assert!(m >= 1 && m < tables.h, "step index out of range");
    let q = tables.q;
    let t = params.t as usize;
    let weight = tpow(params.t, m);
    let (prev, cur) = tables.g.split_at_mut(m * q);
    let prev = &prev[(m - 1) * q..];
    for i in 0..q {
        let mut hop = 0.0;
        for s in 0..t {
            hop += answers.near(i, s);
        }
        let mut value = weight * hop;
        for s in 0..t {
            value += prev[answers.next(i, s)];
        }
        cur[i] = value;
    }
}

/// `f[i][m]`: tuples whose digit `m` equals `s'_m` contribute through
/// `f[..][m-1]`; tuples with a smaller digit `m` are uncapped below it and
/// contribute through `g[..][m-1]`.
pub fn dp_f_step(tables: &mut DpTables, answers: &QueryAnswers, params: &Params, m: usize) {
    assert!(m >= 1 && m < tables.h, "step index out of range");
    let q = tables.q;
    let weight = tpow(params.t, m);
    let top = params.sprime.digit(m) as usize;
    let multiplicity = params.capped_prefix(m) as f64;
    let g_prev = &tables.g[(m - 1) * q..m * q];
    let (f_head, f_cur) = tables.f.split_at_mut(m * q);
    let f_prev = &f_head[(m - 1) * q..];
    for i in 0..q {
        let mut value = multiplicity * answers.near(i, top);
        let mut hop = 0.0;
        for s in 0..top {
            hop += answers.near(i, s);
        }
        value += weight * hop;
        value += f_prev[answers.next(i, top)];
        for s in 0..top {
            value += g_prev[answers.next(i, s)];
        }
        f_cur[i] = value;
    }
}

/// Base case followed by the `g` then `f` step for each `m = 1..h`.
pub fn run_dp(answers: &QueryAnswers, params: &Params) -> DpTables {
    let mut tables = dp_base(answers, params);
    for m in 1..params.h {
        dp_g_step(&mut tables, answers, params, m);
        dp_f_step(&mut tables, answers, params, m);
    }
    tables
}

/// Outcome of the selector between the DP minimiser and point `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub alpha: usize,
    pub alpha_score: f64,
    pub last_score: f64,
    pub output: usize,
    pub params: Params,
    pub distinct_queries: usize,
    pub transcript_hash: u64,
}

/// Picks `alpha`, the smallest index minimising
/// `[sigma = 1] d(i, n-1) + f[i][h-1]`, and outputs it if its score is
/// strictly below `sum_j d(n-1, j)`; otherwise outputs `n - 1`.
pub fn select_output(
    ledger: &QueryLedger<'_>,
    tables: &DpTables,
    answers: &QueryAnswers,
    params: &Params,
) -> SelectionResult {
    let q = params.modulus();
    let column = tables.f_column(params.h - 1);
    let score = |i: usize| {
        let shift = if params.sigma == 1 {
            answers.to_last(i)
        } else {
            0.0
        };
        shift + column[i]
    };
    let mut alpha = 0;
    let mut alpha_score = score(0);
    for i in 1..q {
        let s = score(i);
        if s < alpha_score {
            alpha = i;
            alpha_score = s;
        }
    }
    let last_score: f64 = (0..q).map(|i| answers.to_last(i)).sum();
    let output = if alpha_score < last_score {
        alpha
    } else {
        params.n - 1
    };
    SelectionResult {
        alpha,
        alpha_score,
        last_score,
        output,
        params: params.clone(),
        distinct_queries: ledger.count_distinct(),
        transcript_hash: ledger.transcript_hash(),
    }
}

/// Result of one [`approx_median`] run.
#[derive(Clone, Debug, PartialEq)]
pub struct MedianRun {
    pub n: usize,
    pub h: usize,
    pub output: usize,
    /// `sum_j d(output, j)`, measured on a separate ledger.
    pub output_cost: f64,
    /// `None` only for `n = 1`.
    pub selection: Option<SelectionResult>,
    pub distinct_queries: usize,
    pub query_bound: u64,
    pub transcript_hash: u64,
    pub transcript: Vec<(u32, u32)>,
}

impl MedianRun {
    pub fn params(&self) -> Option<&Params> {
        self.selection.as_ref().map(|s| &s.params)
    }
}

/// Runs the full algorithm. Deterministic; the query transcript depends only
/// on `(n, h)`.
pub fn approx_median(metric: &MetricSpace, h: usize) -> Result<MedianRun> {
    if h < 2 {
        return Err(Error::DepthTooSmall(h));
    }
    let n = metric.len();
    if n == 0 {
        return Err(Error::EmptyMetric);
    }
    if n == 1 {
        return Ok(MedianRun {
            n,
            h,
            output: 0,
            output_cost: 0.0,
            selection: None,
            distinct_queries: 0,
            query_bound: 0,
            transcript_hash: QueryLedger::new(metric).transcript_hash(),
            transcript: Vec::new(),
        });
    }

    let params = choose_params(n, h)?;
    let mut ledger = QueryLedger::new(metric);
    let answers = issue_queries(&mut ledger, &params)?;
    let tables = run_dp(&answers, &params);
    let selection = select_output(&ledger, &tables, &answers, &params);

    let mut verify = QueryLedger::new(metric);
    let mut output_cost = 0.0;
    for j in 0..n {
        output_cost += verify.query(selection.output, j)?;
    }

    Ok(MedianRun {
        n,
        h,
        output: selection.output,
        output_cost,
        distinct_queries: selection.distinct_queries,
        query_bound: params.query_bound(),
        transcript_hash: selection.transcript_hash,
        selection: Some(selection),
        transcript: ledger.into_transcript(),
    })
}
