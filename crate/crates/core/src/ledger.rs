//! Query accounting. Every distance an algorithm looks at goes through a
//! [`QueryLedger`], which keeps the ordered transcript and the set of distinct
//! unordered pairs.

use std::hash::Hasher;

use fnv::{FnvHashSet, FnvHasher};

use crate::error::{Error, Result};
use crate::metric::MetricSpace;

/// Incremental 64-bit FNV-1a over a stream of `(x, y)` index pairs, each
/// index fed as 8 little-endian bytes.
#[derive(Default)]
pub struct TranscriptHasher(FnvHasher);

impl TranscriptHasher {
    pub fn push(&mut self, x: usize, y: usize) {
        self.0.write(&(x as u64).to_le_bytes());
        self.0.write(&(y as u64).to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0.finish()
    }

    pub fn of(pairs: &[(u32, u32)]) -> u64 {
        let mut h = Self::default();
        for &(x, y) in pairs {
            h.push(x as usize, y as usize);
        }
        h.finish()
    }
}

/// Single-writer counting oracle over a metric. Self-queries answer 0 and
/// leave no trace.
pub struct QueryLedger<'a> {
    metric: &'a MetricSpace,
    transcript: Vec<(u32, u32)>,
    distinct: FnvHashSet<(u32, u32)>,
    hasher: TranscriptHasher,
}

impl<'a> QueryLedger<'a> {
    pub fn new(metric: &'a MetricSpace) -> Self {
        Self {
            metric,
            transcript: Vec::new(),
            distinct: FnvHashSet::default(),
            hasher: TranscriptHasher::default(),
        }
    }

    pub fn metric(&self) -> &'a MetricSpace {
        self.metric
    }

    pub fn query(&mut self, x: usize, y: usize) -> Result<f64> {
        let n = self.metric.len();
        for index in [x, y] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if x == y {
            return Ok(0.0);
        }
        self.transcript.push((x as u32, y as u32));
        self.distinct.insert((x.min(y) as u32, x.max(y) as u32));
        self.hasher.push(x, y);
        Ok(self.metric.dist(x, y))
    }

    pub fn count_distinct(&self) -> usize {
        self.distinct.len()
    }

    pub fn transcript(&self) -> &[(u32, u32)] {
        &self.transcript
    }

    pub fn into_transcript(self) -> Vec<(u32, u32)> {
        self.transcript
    }

    pub fn transcript_hash(&self) -> u64 {
        self.hasher.finish()
    }
}
