//! Compensated accumulation and delta-method error propagation.
//!
//! Monte Carlo quantities in this crate are smooth functions of sample means.
//! [`Linear`] carries the value together with its per-sample influence values
//! for every sample group it depends on, so differences and ratios of
//! estimates that share samples (common random numbers) get the correct
//! joint standard error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<KahanSum>().value()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    compensated_sum(values) / values.len() as f64
}

/// Unbiased sample variance; exactly zero when all values are identical.
pub fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return 0.0;
    }
    let m = mean(values);
    let ss: KahanSum = values.iter().map(|v| (v - m) * (v - m)).collect();
    ss.value() / (values.len() - 1) as f64
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = if values.iter().all(|&v| v == values[0]) { values[0] } else { mean(values) };
    (m, (variance(values) / values.len() as f64).sqrt())
}

/// Post-processing applied to a raw sample mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transform {
    None,
    /// `mean^{1/p}`.
    ReciprocalRoot { p: f64 },
    /// `exp(mean)`, the geometric mean of the underlying quantity.
    ExpMean,
}

/// A Monte Carlo scalar estimate with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub transform: Transform,
}

impl McEstimate {
    pub fn exact(value: f64, seed: u64) -> Self {
        McEstimate { value, stderr: 0.0, n_samples: 1, seed, transform: Transform::None }
    }

    /// Plain sample mean.
    pub fn from_samples(values: &[f64], seed: u64) -> Self {
        let (value, stderr) = mean_and_stderr(values);
        McEstimate { value, stderr, n_samples: values.len(), seed, transform: Transform::None }
    }

    /// `mean^{1/p}` with the delta-method error `|value|·se/(|p|·mean)`.
    pub fn reciprocal_root(raw: McEstimate, p: f64) -> Self {
        let value = raw.value.powf(1.0 / p);
        let stderr = value.abs() * raw.stderr / (p.abs() * raw.value);
        McEstimate { value, stderr, transform: Transform::ReciprocalRoot { p }, ..raw }
    }

    /// `exp(mean)` with error `value·se`.
    pub fn exp_mean(raw: McEstimate) -> Self {
        let value = raw.value.exp();
        McEstimate { value, stderr: value * raw.stderr, transform: Transform::ExpMean, ..raw }
    }

    pub fn scaled(self, c: f64) -> Self {
        McEstimate { value: self.value * c, stderr: self.stderr * c.abs(), ..self }
    }
}

/// A smooth function of sample means, linearized per sample group.
///
/// Each group is a set of samples drawn from one keyed stream; estimates
/// built on the same group share its samples index by index. Independent
/// scalar estimates with a known standard error enter as noise sources.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub value: f64,
    groups: BTreeMap<u64, Vec<f64>>,
    noise: BTreeMap<u64, f64>,
}

impl Linear {
    pub fn constant(value: f64) -> Self {
        Linear { value, groups: BTreeMap::new(), noise: BTreeMap::new() }
    }

    /// A scalar estimate with standard error `stderr`, keyed by `id` so that
    /// reusing it in several places stays correlated.
    pub fn independent(id: u64, value: f64, stderr: f64) -> Self {
        let mut noise = BTreeMap::new();
        if stderr > 0.0 {
            noise.insert(id, stderr);
        }
        Linear { value, groups: BTreeMap::new(), noise }
    }

    /// The sample mean of `values`, drawn as group `group`.
    pub fn mean(group: u64, values: Vec<f64>) -> Self {
        let value = if values.iter().all(|&v| v == values[0]) { values[0] } else { mean(&values) };
        let mut groups = BTreeMap::new();
        groups.insert(group, values);
        Linear { value, groups, noise: BTreeMap::new() }
    }

    /// Apply a smooth scalar map with derivative `df` at the current value.
    pub fn map(mut self, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        let slope = df(self.value);
        for psi in self.groups.values_mut() {
            for x in psi.iter_mut() {
                *x *= slope;
            }
        }
        for s in self.noise.values_mut() {
            *s *= slope;
        }
        self.value = f(self.value);
        self
    }

    pub fn scale(self, c: f64) -> Self {
        self.map(|v| v * c, |_| c)
    }

    pub fn powf(self, e: f64) -> Self {
        self.map(|v| v.powf(e), |v| e * v.powf(e - 1.0))
    }

    pub fn ln(self) -> Self {
        self.map(f64::ln, |v| 1.0 / v)
    }

    pub fn exp(self) -> Self {
        self.map(f64::exp, f64::exp)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Linear, b: f64) -> Linear {
        let mut groups = BTreeMap::new();
        for (&g, psi) in &self.groups {
            groups.insert(g, psi.iter().map(|x| a * x).collect::<Vec<_>>());
        }
        for (&g, psi) in &other.groups {
            match groups.get_mut(&g) {
                Some(acc) => {
                    let acc: &mut Vec<f64> = acc;
                    assert_eq!(acc.len(), psi.len(), "sample group {g} length mismatch");
                    for (x, y) in acc.iter_mut().zip(psi) {
                        *x += b * y;
                    }
                }
                None => {
                    groups.insert(g, psi.iter().map(|y| b * y).collect());
                }
            }
        }
        let mut noise: BTreeMap<u64, f64> = self.noise.iter().map(|(&g, s)| (g, a * s)).collect();
        for (&g, s) in &other.noise {
            *noise.entry(g).or_insert(0.0) += b * s;
        }
        Linear { value: a * self.value + b * other.value, groups, noise }
    }

    pub fn sub(&self, other: &Linear) -> Linear {
        self.combine(1.0, other, -1.0)
    }

    pub fn add(&self, other: &Linear) -> Linear {
        self.combine(1.0, other, 1.0)
    }

    pub fn mul(&self, other: &Linear) -> Linear {
        // d(ab) = b da + a db
        let mut out = self.combine(other.value, other, self.value);
        out.value = self.value * other.value;
        out
    }

    pub fn div(&self, other: &Linear) -> Linear {
        // d(a/b) = da/b − a db/b²
        let b = other.value;
        let mut out = self.combine(1.0 / b, other, -self.value / (b * b));
        out.value = self.value / b;
        out
    }

    pub fn variance(&self) -> f64 {
        let sampled: f64 = self.groups.values().map(|psi| variance(psi) / psi.len() as f64).sum();
        sampled + self.noise.values().map(|s| s * s).sum::<f64>()
    }

    pub fn stderr(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn n_samples(&self) -> usize {
        self.groups.values().map(Vec::len).max().unwrap_or(1)
    }

    pub fn to_estimate(&self, seed: u64, transform: Transform) -> McEstimate {
        McEstimate {
            value: self.value,
            stderr: self.stderr(),
            n_samples: self.n_samples(),
            seed,
            transform,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    #[test]
    fn compensated_sum_is_order_insensitive() {
        let s = RngStream::new(9, 9);
        let values: Vec<f64> = (0..10_000u64)
            .map(|i| {
                let mut r = s.substream(i).rng();
                r.gaussian() * 1e3 + 1e-3 * r.uniform()
            })
            .collect();
        let forward = compensated_sum(&values);
        let mut permuted = values.clone();
        // deterministic permutation: stride through the indices
        permuted.sort_by_key(|x| (x.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15)) >> 7);
        let backward = compensated_sum(&permuted);
        assert!((forward - backward).abs() <= 1e-9 * forward.abs().max(1.0));
        // per-index substreams give the same values no matter the evaluation order
        let reversed: Vec<f64> = (0..10_000u64)
            .rev()
            .map(|i| {
                let mut r = s.substream(i).rng();
                r.gaussian() * 1e3 + 1e-3 * r.uniform()
            })
            .collect();
        let mut reversed = reversed;
        reversed.reverse();
        assert_eq!(values, reversed);
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let l = Linear::mean(1, vec![2.5; 1000]);
        assert_eq!(l.value, 2.5);
        assert_eq!(l.stderr(), 0.0);
        let e = McEstimate::from_samples(&[3.0; 10], 0);
        assert_eq!((e.value, e.stderr), (3.0, 0.0));
    }

    #[test]
    fn shared_samples_cancel_in_differences() {
        let x: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = Linear::mean(7, x.iter().map(|v| v + 1.0).collect());
        let b = Linear::mean(7, x.clone());
        let d = a.sub(&b);
        assert!((d.value - 1.0).abs() < 1e-12);
        assert!(d.stderr() < 1e-12);
        // independent groups add in quadrature
        let c = Linear::mean(8, x);
        let e = b.sub(&c);
        assert!((e.stderr() - (2.0f64).sqrt() * b.stderr()).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_root_delta_method() {
        let raw = McEstimate { value: 4.0, stderr: 0.04, n_samples: 100, seed: 0, transform: Transform::None };
        let e = McEstimate::reciprocal_root(raw, -2.0);
        assert!((e.value - 0.5).abs() < 1e-15);
        assert!((e.stderr - 0.5 * 0.04 / (2.0 * 4.0)).abs() < 1e-15);
        let l = Linear::mean(1, vec![3.96, 4.04]).powf(-0.5);
        assert!((l.value - 0.5).abs() < 1e-15);
    }
}
