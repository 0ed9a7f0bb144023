//! Cesàro and logarithmic averages.
//!
//! All sums go through [`Accumulator`], a Neumaier-compensated complex sum.
//! Parallel reductions cut the index range into chunks of a fixed size that
//! does not depend on the thread count, and fold the partial accumulators in
//! chunk order, so a result is bit-identical for any number of workers.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Chunk size for order-stable parallel reductions.
pub const REDUCTION_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Every index has weight 1.
    Cesaro,
    /// Index `n` has weight `1/n`.
    #[serde(alias = "log")]
    Logarithmic,
}

impl WeightKind {
    #[inline]
    pub fn weight(self, n: u64) -> f64 {
        match self {
            WeightKind::Cesaro => 1.0,
            WeightKind::Logarithmic => 1.0 / n as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Cesaro => "cesaro",
            WeightKind::Logarithmic => "logarithmic",
        }
    }
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cesaro" | "uniform" => Ok(WeightKind::Cesaro),
            "log" | "logarithmic" => Ok(WeightKind::Logarithmic),
            other => Err(Error::UnknownPreset(format!("weighting {other}"))),
        }
    }
}

/// Neumaier-compensated real sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Weighted complex sum together with its total weight and term count.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    re: CompensatedSum,
    im: CompensatedSum,
    mass: CompensatedSum,
    count: u64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, value: Complex64, weight: f64) {
        self.re.add(value.re * weight);
        self.im.add(value.im * weight);
        self.mass.add(weight);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
        self.mass.merge(&other.mass);
        self.count += other.count;
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn mass(&self) -> f64 {
        self.mass.value()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self, kind: WeightKind) -> Result<WeightedAverage> {
        if self.count == 0 {
            return Err(Error::EmptyDomain("average over an empty index set".into()));
        }
        let mass = self.mass();
        Ok(WeightedAverage { kind, value: self.total() / mass, mass, count: self.count })
    }
}

/// A normalized average with the weight that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedAverage {
    pub kind: WeightKind,
    pub value: Complex64,
    /// Sum of the weights.
    pub mass: f64,
    pub count: u64,
}

/// `(1/|A|) Σ f(n)`.
pub fn cesaro_avg(values: &[Complex64]) -> Result<WeightedAverage> {
    let mut acc = Accumulator::default();
    for &v in values {
        acc.push(v, 1.0);
    }
    acc.finish(WeightKind::Cesaro)
}

/// `Σ f(n)/n / Σ 1/n` over the supplied `(n, f(n))` pairs.
pub fn log_avg<I>(items: I) -> Result<WeightedAverage>
where
    I: IntoIterator<Item = (u64, Complex64)>,
{
    let mut acc = Accumulator::default();
    for (n, v) in items {
        if n == 0 {
            return contract("logarithmic weights need indices n ≥ 1");
        }
        acc.push(v, 1.0 / n as f64);
    }
    acc.finish(WeightKind::Logarithmic)
}

/// Average of `values[i]`, which sits at index `first + i`.
pub fn weighted_avg(kind: WeightKind, first: u64, values: &[Complex64]) -> Result<WeightedAverage> {
    if first == 0 && kind == WeightKind::Logarithmic {
        return contract("logarithmic weights need indices n ≥ 1");
    }
    let acc = reduce_range(first, first + values.len() as u64, |n, acc| {
        acc.push(values[(n - first) as usize], kind.weight(n))
    });
    acc.finish(kind)
}

/// Parallel fold over `lo..hi` with a result that does not depend on the worker count.
pub fn reduce_range<F>(lo: u64, hi: u64, visit: F) -> Accumulator
where
    F: Fn(u64, &mut Accumulator) + Sync,
{
    if hi <= lo {
        return Accumulator::default();
    }
    let chunks = (hi - lo).div_ceil(REDUCTION_CHUNK as u64);
    let partials: Vec<Accumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * REDUCTION_CHUNK as u64;
            let end = (start + REDUCTION_CHUNK as u64).min(hi);
            let mut acc = Accumulator::default();
            for n in start..end {
                visit(n, &mut acc);
            }
            acc
        })
        .collect();
    let mut out = Accumulator::default();
    for p in &partials {
        out.merge(p);
    }
    out
}

/// `Σ_{n ≤ N} 1/n`, compensated.
pub fn harmonic(n: u64) -> f64 {
    reduce_range(1, n + 1, |k, acc| acc.push(Complex64::new(0.0, 0.0), 1.0 / k as f64)).mass()
}

/// Both sides of the passage from Cesàro to logarithmic averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `𝔼^log_{n ≤ N} f(n)`.
    pub lhs: Complex64,
    /// `𝔼^log_{N^ε < M < N} 𝔼_{n ≤ M} f(n)`.
    pub rhs: Complex64,
    pub residual: f64,
    /// Number of integers `M` in the outer average.
    pub outer_count: u64,
}

/// Compare the log average of `f` with the log average of its Cesàro prefix means.
///
/// `values[i]` is `f(i + 1)`.
pub fn cesaro_to_log_decompose(values: &[Complex64], epsilon: f64) -> Result<Decomposition> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return contract(format!("epsilon {epsilon} outside (0, 1/2)"));
    }
    let n = values.len() as u64;
    if n < 3 {
        return contract(format!("need N ≥ 3, got {n}"));
    }
    let lhs = weighted_avg(WeightKind::Logarithmic, 1, values)?.value;

    // Strictly between N^ε and N.
    let floor_pow = (n as f64).powf(epsilon).floor() as u64;
    let m_lo = floor_pow + 1;
    let m_hi = n - 1;
    if m_lo > m_hi {
        return Err(Error::EmptyDomain(format!("no integer M with N^ε < M < N for N = {n}")));
    }
    let mut prefix = Accumulator::default();
    let mut outer = Accumulator::default();
    for (i, &v) in values.iter().enumerate().take(m_hi as usize) {
        prefix.push(v, 1.0);
        let m = i as u64 + 1;
        if m >= m_lo {
            outer.push(prefix.total() / m as f64, 1.0 / m as f64);
        }
    }
    let rhs = outer.finish(WeightKind::Logarithmic)?.value;
    Ok(Decomposition { lhs, rhs, residual: (lhs - rhs).norm(), outer_count: outer.count() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cesaro_examples() {
        assert_eq!(cesaro_avg(&[c(1.0); 10]).unwrap().value, c(1.0));
        let v: Vec<_> = (1..=4).map(|n| c(n as f64)).collect();
        let avg = cesaro_avg(&v).unwrap();
        assert_eq!(avg.value, c(2.5));
        assert_eq!(avg.mass, 4.0);
        assert_eq!(avg.count, 4);
        let lam = [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0];
        let prod: Vec<_> = lam.windows(2).map(|w| c(w[0] * w[1])).collect();
        assert!((cesaro_avg(&prod).unwrap().value.re + 0.4).abs() < 1e-15);
        assert!(matches!(cesaro_avg(&[]), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn log_examples() {
        let avg = log_avg([(1, c(1.0)), (2, c(0.0))]).unwrap();
        assert!((avg.value.re - 2.0 / 3.0).abs() < 1e-15);
        let avg = log_avg((5..40).map(|n| (n, Complex64::new(0.3, -0.7)))).unwrap();
        assert!((avg.value - Complex64::new(0.3, -0.7)).norm() < 1e-15);
        let lam = [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 1.0];
        let avg = log_avg(lam.iter().enumerate().map(|(i, &x)| (i as u64 + 1, c(x)))).unwrap();
        assert!((avg.mass - 2.928_968_253_968_254).abs() < 1e-14);
        assert!(log_avg([(0, c(1.0))]).is_err());
        assert!(matches!(log_avg(std::iter::empty()), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn chunked_reduction_matches_serial() {
        let vals: Vec<Complex64> = (1..=300_000u64).map(|n| Complex64::new((n as f64).sin(), (n as f64).cos())).collect();
        let par = weighted_avg(WeightKind::Logarithmic, 1, &vals).unwrap();
        let ser = log_avg(vals.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v))).unwrap();
        assert!((par.value - ser.value).norm() < 1e-12);
        assert!((harmonic(300_000) - par.mass).abs() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let ones = vec![c(1.0); 1000];
        assert!(cesaro_to_log_decompose(&ones, 0.1).unwrap().residual < 1e-14);
        let bound = |n: f64, e: f64| 5.0 * (1.0 / n.ln() + e);
        let alt: Vec<_> = (1..=10_000).map(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 })).collect();
        assert!(cesaro_to_log_decompose(&alt, 0.1).unwrap().residual <= bound(1e4, 0.1));
        let mut delta = vec![c(0.0); 1000];
        delta[0] = c(1.0);
        assert!(cesaro_to_log_decompose(&delta, 0.1).unwrap().residual <= bound(1e3, 0.1));
        assert!(matches!(cesaro_to_log_decompose(&ones, 0.5), Err(Error::Contract(_))));
        assert!(matches!(cesaro_to_log_decompose(&ones, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn weight_names_parse() {
        assert_eq!("cesaro".parse::<WeightKind>().unwrap(), WeightKind::Cesaro);
        assert_eq!("log".parse::<WeightKind>().unwrap(), WeightKind::Logarithmic);
        assert!("geometric".parse::<WeightKind>().is_err());
    }

    fn unit_disc() -> impl Strategy<Value = Complex64> {
        (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn averages_are_linear(
            f in prop::collection::vec(unit_disc(), 1..200),
            g_seed in prop::collection::vec(unit_disc(), 200),
            alpha in unit_disc(),
            beta in unit_disc(),
            log in any::<bool>(),
        ) {
            let g = &g_seed[..f.len()];
            let kind = if log { WeightKind::Logarithmic } else { WeightKind::Cesaro };
            let mix: Vec<_> = f.iter().zip(g).map(|(x, y)| alpha * x + beta * y).collect();
            let lhs = weighted_avg(kind, 1, &mix).unwrap().value;
            let rhs = alpha * weighted_avg(kind, 1, &f).unwrap().value + beta * weighted_avg(kind, 1, g).unwrap().value;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn averages_stay_bounded(f in prop::collection::vec(unit_disc(), 1..500), first in 1u64..1000, log in any::<bool>()) {
            let kind = if log { WeightKind::Logarithmic } else { WeightKind::Cesaro };
            let avg = weighted_avg(kind, first, &f).unwrap();
            prop_assert!(avg.value.norm() <= 1.0 + 1e-12);
            if kind == WeightKind::Cesaro {
                prop_assert_eq!(avg.mass, f.len() as f64);
            }
        }
    }
}
