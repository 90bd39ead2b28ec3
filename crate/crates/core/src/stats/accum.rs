//! Streaming accumulation of Monte Carlo observables with batch-means
//! error bars.
//!
//! Samples carry their index; batches are assigned by `index % num_batches`
//! and the final reduce always walks batches in ascending id and samples in
//! ascending index, so merged accumulators produce bit-identical statistics
//! no matter how the work was scheduled.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::{KahanSum, KahanSumC};

pub const DEFAULT_BATCHES: usize = 32;

/// Real estimate with a batch standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Est {
    pub value: f64,
    pub se: f64,
}

/// Complex estimate with per-component batch standard errors.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EstC {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

impl EstC {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Component-wise z-score against a target value.
    pub fn sigmas_from(&self, target: Complex64) -> f64 {
        let zr = if self.se_re > 0.0 {
            (self.re - target.re).abs() / self.se_re
        } else {
            0.0
        };
        let zi = if self.se_im > 0.0 {
            (self.im - target.im).abs() / self.se_im
        } else {
            0.0
        };
        zr.max(zi)
    }
}

/// Mean and batch standard error of a plain sample list.
pub fn batch_mean_se(values: &[f64]) -> (f64, f64) {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    let mean = acc.value() / values.len() as f64;
    let se = batch_se_about(values, mean);
    (mean, se)
}

/// Batch standard error of the mean estimate, batching by index modulo
/// `DEFAULT_BATCHES`.
pub fn batch_se_about(values: &[f64], mean: f64) -> f64 {
    let b = DEFAULT_BATCHES.min(values.len().max(1));
    let mut sums = vec![KahanSum::new(); b];
    let mut counts = vec![0usize; b];
    for (i, &v) in values.iter().enumerate() {
        sums[i % b].add(v);
        counts[i % b] += 1;
    }
    let mut var = KahanSum::new();
    let mut used = 0usize;
    for (s, &c) in sums.iter().zip(counts.iter()) {
        if c > 0 {
            let d = s.value() / c as f64 - mean;
            var.add(d * d);
            used += 1;
        }
    }
    if used < 2 {
        return 0.0;
    }
    (var.value() / (used as f64 - 1.0) / used as f64).sqrt()
}

/// Accumulator over vector-valued complex observables.
///
/// Stores raw per-sample rows grouped by batch. Merging is associative and
/// commutative because `finalize` sorts every batch by sample index before
/// reducing; the reduce itself runs in ascending batch id.
#[derive(Debug, Clone)]
pub struct MCAccumulator {
    width: usize,
    num_batches: usize,
    batches: Vec<Vec<(u64, Vec<Complex64>)>>,
}

impl MCAccumulator {
    pub fn new(width: usize) -> Self {
        Self::with_batches(width, DEFAULT_BATCHES)
    }

    pub fn with_batches(width: usize, num_batches: usize) -> Self {
        assert!(num_batches >= 1);
        Self {
            width,
            num_batches,
            batches: vec![Vec::new(); num_batches],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_samples(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }

    pub fn push(&mut self, sample_index: u64, row: Vec<Complex64>) {
        assert_eq!(row.len(), self.width, "observable row width mismatch");
        let b = (sample_index % self.num_batches as u64) as usize;
        self.batches[b].push((sample_index, row));
    }

    pub fn merge(mut self, other: Self) -> Result<Self> {
        if self.width != other.width || self.num_batches != other.num_batches {
            return Err(Error::config(
                "cannot merge accumulators with different shapes",
            ));
        }
        for (mine, theirs) in self.batches.iter_mut().zip(other.batches) {
            mine.extend(theirs);
        }
        Ok(self)
    }

    /// Rows in canonical order (ascending sample index), for persistence
    /// and distributional tests.
    pub fn ordered_rows(&self) -> Vec<(u64, Vec<Complex64>)> {
        let mut rows: Vec<(u64, Vec<Complex64>)> = self
            .batches
            .iter()
            .flat_map(|b| b.iter().cloned())
            .collect();
        rows.sort_unstable_by_key(|(i, _)| *i);
        rows
    }

    /// Reduce to means, raw cross-moments and centred mixed moments of
    /// degree <= `max_degree`.
    pub fn finalize(&self, max_degree: u32) -> MCSummary {
        let mut batches = self.batches.clone();
        for b in batches.iter_mut() {
            b.sort_unstable_by_key(|(i, _)| *i);
        }
        let w = self.width;
        let total: usize = batches.iter().map(Vec::len).sum();
        let nf = total as f64;

        // Pass 1: two-pass corrected global mean per observable.
        let mut means = vec![Complex64::new(0.0, 0.0); w];
        for j in 0..w {
            let mut acc = KahanSumC::new();
            for b in &batches {
                for (_, row) in b {
                    acc.add(row[j]);
                }
            }
            let m1 = acc.value() / nf;
            let mut corr = KahanSumC::new();
            for b in &batches {
                for (_, row) in b {
                    corr.add(row[j] - m1);
                }
            }
            means[j] = m1 + corr.value() / nf;
        }

        // Pass 2: accumulate per batch, in batch-id order.
        let mut mean_stats = vec![BatchStatC::new(); w];
        let mut cross_conj = vec![BatchStatC::new(); w * w];
        let mut cross_plain = vec![BatchStatC::new(); w * w];
        let mut cross_centred = vec![BatchStatC::new(); w * w];
        let degrees: Vec<(u32, u32)> = (0..=max_degree)
            .flat_map(|n| (0..=max_degree - n).map(move |m| (n, m)))
            .filter(|&(n, m)| n + m >= 1)
            .collect();
        let mut mixed = vec![vec![BatchStatC::new(); degrees.len()]; w];

        for batch in batches.iter().filter(|b| !b.is_empty()) {
            let bn = batch.len() as f64;
            let mut b_mean = vec![KahanSumC::new(); w];
            let mut b_cc = vec![KahanSumC::new(); w * w];
            let mut b_cp = vec![KahanSumC::new(); w * w];
            let mut b_ct = vec![KahanSumC::new(); w * w];
            let mut b_mixed = vec![vec![KahanSumC::new(); degrees.len()]; w];
            for (_, row) in batch {
                for j in 0..w {
                    b_mean[j].add(row[j]);
                    for k in 0..w {
                        b_cc[j * w + k].add(row[j] * row[k].conj());
                        b_cp[j * w + k].add(row[j] * row[k]);
                        b_ct[j * w + k].add((row[j] - means[j]) * (row[k] - means[k]).conj());
                    }
                    let centred = row[j] - means[j];
                    for (d, &(n, m)) in degrees.iter().enumerate() {
                        let v = centred.conj().powu(n) * centred.powu(m);
                        b_mixed[j][d].add(v);
                    }
                }
            }
            for j in 0..w {
                mean_stats[j].push(b_mean[j].value() / bn, batch.len());
                for k in 0..w {
                    cross_conj[j * w + k].push(b_cc[j * w + k].value() / bn, batch.len());
                    cross_plain[j * w + k].push(b_cp[j * w + k].value() / bn, batch.len());
                    cross_centred[j * w + k].push(b_ct[j * w + k].value() / bn, batch.len());
                }
                for d in 0..degrees.len() {
                    mixed[j][d].push(b_mixed[j][d].value() / bn, batch.len());
                }
            }
        }

        let mixed_maps: Vec<BTreeMap<(u32, u32), EstC>> = mixed
            .into_iter()
            .map(|per_obs| {
                degrees
                    .iter()
                    .copied()
                    .zip(per_obs.into_iter().map(|s| s.estimate()))
                    .collect()
            })
            .collect();

        MCSummary {
            num_samples: total,
            means: mean_stats.iter().map(BatchStatC::estimate).collect(),
            cross_conj: pack(cross_conj, w),
            cross_plain: pack(cross_plain, w),
            cross_centred: pack(cross_centred, w),
            mixed: mixed_maps,
        }
    }
}

fn pack(stats: Vec<BatchStatC>, w: usize) -> Vec<Vec<EstC>> {
    let mut out = Vec::with_capacity(w);
    let mut it = stats.into_iter();
    for _ in 0..w {
        out.push((0..w).map(|_| it.next().expect("shape").estimate()).collect());
    }
    out
}

/// Weighted batch means of one complex statistic.
#[derive(Debug, Clone)]
struct BatchStatC {
    values: Vec<(Complex64, usize)>,
}

impl BatchStatC {
    fn new() -> Self {
        Self { values: Vec::new() }
    }

    fn push(&mut self, batch_mean: Complex64, batch_len: usize) {
        self.values.push((batch_mean, batch_len));
    }

    fn estimate(&self) -> EstC {
        let total: usize = self.values.iter().map(|(_, c)| c).sum();
        let nf = total as f64;
        let mut acc = KahanSumC::new();
        for (v, c) in &self.values {
            acc.add(v * *c as f64);
        }
        let mean = acc.value() / nf;
        let b = self.values.len();
        if b < 2 {
            return EstC {
                re: mean.re,
                im: mean.im,
                se_re: 0.0,
                se_im: 0.0,
            };
        }
        let mut vr = KahanSum::new();
        let mut vi = KahanSum::new();
        for (v, _) in &self.values {
            vr.add((v.re - mean.re).powi(2));
            vi.add((v.im - mean.im).powi(2));
        }
        let denom = (b as f64 - 1.0) * b as f64;
        EstC {
            re: mean.re,
            im: mean.im,
            se_re: (vr.value() / denom).sqrt(),
            se_im: (vi.value() / denom).sqrt(),
        }
    }
}

/// Reduced moments with error bars.
#[derive(Debug, Clone)]
pub struct MCSummary {
    pub num_samples: usize,
    pub means: Vec<EstC>,
    /// E X_j conj(X_k), raw.
    pub cross_conj: Vec<Vec<EstC>>,
    /// E X_j X_k, raw.
    pub cross_plain: Vec<Vec<EstC>>,
    /// E <X_j> conj(<X_k>): the centred covariance matrix.
    pub cross_centred: Vec<Vec<EstC>>,
    /// Centred mixed moments E <conj X>^n <X>^m keyed by (n, m).
    pub mixed: Vec<BTreeMap<(u32, u32), EstC>>,
}

/// Merge accumulators in ascending batch-id order regardless of argument
/// order.
pub fn merge_all(parts: Vec<MCAccumulator>) -> Result<MCAccumulator> {
    let mut it = parts.into_iter();
    let first = it
        .next()
        .ok_or_else(|| Error::config("merge_all: no accumulators"))?;
    it.try_fold(first, MCAccumulator::merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(seed: u64, n: usize) -> Vec<(u64, Vec<Complex64>)> {
        // Deterministic pseudo-data.
        let mut state = seed;
        (0..n as u64)
            .map(|i| {
                let mut next = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 11) as f64 / 9007199254740992.0) - 0.5
                };
                (i, vec![Complex64::new(next(), next()), Complex64::new(next(), next())])
            })
            .collect()
    }

    #[test]
    fn merge_is_order_independent() {
        let data = rows(3, 257);
        let mut whole = MCAccumulator::new(2);
        for (i, r) in &data {
            whole.push(*i, r.clone());
        }
        // Split by worker stripes then merge in a scrambled order.
        let mut parts: Vec<MCAccumulator> = (0..5).map(|_| MCAccumulator::new(2)).collect();
        for (i, r) in &data {
            parts[(*i % 5) as usize].push(*i, r.clone());
        }
        parts.rotate_left(3);
        parts.swap(0, 4);
        let merged = merge_all(parts).unwrap();

        let a = whole.finalize(4);
        let b = merged.finalize(4);
        assert_eq!(a.num_samples, b.num_samples);
        for (x, y) in a.means.iter().zip(b.means.iter()) {
            assert_eq!(x, y, "means must be bit-identical");
        }
        for (x, y) in a.mixed.iter().zip(b.mixed.iter()) {
            for (k, v) in x {
                assert_eq!(v, &y[k]);
            }
        }
    }

    #[test]
    fn centring_sums_to_zero() {
        let data = rows(9, 1000);
        let mut acc = MCAccumulator::new(2);
        for (i, r) in &data {
            acc.push(*i, r.clone());
        }
        let s = acc.finalize(2);
        // E <X> must vanish to roundoff under two-pass centring.
        for obs in &s.mixed {
            let first = obs[&(0, 1)];
            assert!(first.re.abs() < 1e-14 && first.im.abs() < 1e-14);
        }
    }

    #[test]
    fn conjugation_consistency_of_cross_moments() {
        let data = rows(17, 300);
        let mut acc = MCAccumulator::new(2);
        for (i, r) in &data {
            acc.push(*i, r.clone());
        }
        let s = acc.finalize(2);
        // E X_j conj(X_k) = conj(E X_k conj(X_j)), exactly.
        let a = s.cross_conj[0][1];
        let b = s.cross_conj[1][0];
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, -b.im);
    }

    #[test]
    fn batch_se_tracks_spread() {
        // N(0,1)-ish data via uniform sums: SE of the mean should be close
        // to sd/sqrt(n).
        let data = rows(23, 4096);
        let values: Vec<f64> = data.iter().map(|(_, r)| r[0].re).collect();
        let (mean, se) = batch_mean_se(&values);
        let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (values.len() as f64 - 1.0))
            .sqrt();
        let expected = sd / (values.len() as f64).sqrt();
        assert!(
            (se - expected).abs() < expected,
            "se {se} vs sqrt-n {expected}"
        );
    }

    #[test]
    fn duplicate_observable_has_identical_columns() {
        let data = rows(31, 128);
        let mut acc = MCAccumulator::new(2);
        for (i, r) in &data {
            let mut row = r.clone();
            row[1] = row[0];
            acc.push(*i, row);
        }
        let s = acc.finalize(2);
        assert_eq!(s.cross_conj[0][0], s.cross_conj[1][1]);
        assert_eq!(s.means[0], s.means[1]);
    }
}
