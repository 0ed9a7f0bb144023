//! Two-point correlations of functions of Ω.
//!
//! Every quantity here is a bilinear form in the joint law of
//! `(Ω(n), Ω(n+h))` over `n ≤ N`, so one pass over the factor counts builds a
//! [`PairHistogram`] and each experiment afterwards costs only a few hundred
//! operations, whatever N is.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{reduce_range, CompensatedSum, WeightKind, REDUCTION_CHUNK};
use crate::bounded::BoundedFunction;
use crate::error::{contract, Error, Result};
use crate::sieve::{CountMode, FactorCountBlock, PrimeTable};
use crate::stats::{GaussianModel, TypicalRange};

/// Joint counts and `1/n` weights of `(Ω(n), Ω(n+h))` for `1 ≤ n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairHistogram {
    n: u64,
    shift: u64,
    dim: usize,
    counts: Vec<u64>,
    log_weights: Vec<f64>,
    harmonic: f64,
}

impl PairHistogram {
    /// The block must be a Big-Omega table starting at 1 and reaching `N + h`.
    pub fn new(block: &FactorCountBlock, n: u64, shift: u64) -> Result<Self> {
        if block.mode() != CountMode::BigOmega {
            return contract("correlations need a BigOmega block");
        }
        if n == 0 {
            return Err(Error::EmptyDomain("N = 0".into()));
        }
        if shift == 0 {
            return contract("shift h must be at least 1");
        }
        let counts = block.prefix(n + shift).map_err(|_| {
            Error::Contract(format!(
                "factor counts cover [{}, {}) but [1, {}] is needed",
                block.lo(),
                block.hi(),
                n + shift
            ))
        })?;
        let dim = *counts.iter().max().unwrap_or(&0) as usize + 1;
        let h = shift as usize;
        let len = n as usize;
        let chunks = len.div_ceil(REDUCTION_CHUNK);
        let partials: Vec<(Vec<u64>, Vec<CompensatedSum>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * REDUCTION_CHUNK;
                let end = (start + REDUCTION_CHUNK).min(len);
                let mut cnt = vec![0u64; dim * dim];
                let mut lw = vec![CompensatedSum::default(); dim * dim];
                for i in start..end {
                    let cell = counts[i] as usize * dim + counts[i + h] as usize;
                    cnt[cell] += 1;
                    lw[cell].add(1.0 / (i + 1) as f64);
                }
                (cnt, lw)
            })
            .collect();
        let mut cnt = vec![0u64; dim * dim];
        let mut lw = vec![CompensatedSum::default(); dim * dim];
        for (c, l) in &partials {
            for k in 0..dim * dim {
                cnt[k] += c[k];
                lw[k].merge(&l[k]);
            }
        }
        let mut total = CompensatedSum::default();
        for l in &lw {
            total.merge(l);
        }
        Ok(PairHistogram {
            n,
            shift,
            dim,
            counts: cnt,
            log_weights: lw.iter().map(CompensatedSum::value).collect(),
            harmonic: total.value(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    /// One more than the largest count value seen.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self, first: usize, second: usize) -> u64 {
        self.counts[first * self.dim + second]
    }

    fn weight(&self, first: usize, second: usize, kind: WeightKind) -> f64 {
        let k = first * self.dim + second;
        match kind {
            WeightKind::Cesaro => self.counts[k] as f64 / self.n as f64,
            WeightKind::Logarithmic => self.log_weights[k] / self.harmonic,
        }
    }

    /// `𝔼 a(Ω(n) + da) b(Ω(n+h) + db)`.
    fn bilinear(&self, a: &BoundedFunction, da: i64, b: &BoundedFunction, db: i64, kind: WeightKind) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for i in 0..self.dim {
            let ai = a.eval(i as i64 + da);
            for j in 0..self.dim {
                let w = self.weight(i, j, kind);
                if w != 0.0 {
                    let z = ai * b.eval(j as i64 + db) * w;
                    re.add(z.re);
                    im.add(z.im);
                }
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// `𝔼 a(Ω(n))` over `n ≤ N`.
    pub fn first_mean(&self, a: &BoundedFunction, kind: WeightKind) -> Complex64 {
        self.bilinear(a, 0, &BoundedFunction::constant(Complex64::new(1.0, 0.0)), 0, kind)
    }

    /// Density of `Ω(n) = ℓ` among `n ≤ N`.
    pub fn first_density(&self, ell: usize, kind: WeightKind) -> f64 {
        if ell >= self.dim {
            return 0.0;
        }
        (0..self.dim).map(|j| self.weight(ell, j, kind)).collect::<CompensatedSum>().value()
    }

    /// `Σ_j a(j) w(ℓ, j)`: the weighted sum of `a(Ω(n+h))` over `n ≤ N` with `Ω(n) = ℓ`.
    fn row_sum(&self, ell: usize, a: &BoundedFunction, kind: WeightKind) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for j in 0..self.dim {
            let z = a.eval(j as i64) * self.weight(ell, j, kind);
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Parameters echoed into every report.
pub type Metadata = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n: u64,
    pub lhs: Complex64,
    pub prediction: Complex64,
    /// `|lhs − prediction|`.
    pub error: f64,
    pub weighting: WeightKind,
    pub metadata: Metadata,
}

/// `𝔼 a(Ω(n)) b(Ω(n+h))` with the chosen weights.
pub fn two_point_lhs(a: &BoundedFunction, b: &BoundedFunction, pairs: &PairHistogram, kind: WeightKind) -> Complex64 {
    pairs.bilinear(a, 0, b, 0, kind)
}

/// Correlation against the product of Cesàro means, with the left side weighted by `kind`.
pub fn correlation_report(
    a: &BoundedFunction,
    b: &BoundedFunction,
    pairs: &PairHistogram,
    kind: WeightKind,
) -> CorrelationReport {
    let lhs = two_point_lhs(a, b, pairs, kind);
    let prediction = pairs.first_mean(a, WeightKind::Cesaro) * pairs.first_mean(b, WeightKind::Cesaro);
    let mut metadata = Metadata::new();
    metadata.insert("a".into(), a.label().into());
    metadata.insert("b".into(), b.label().into());
    metadata.insert("shift".into(), pairs.shift().to_string());
    CorrelationReport { n: pairs.n(), lhs, prediction, error: (lhs - prediction).norm(), weighting: kind, metadata }
}

/// Logarithmic correlation against the product of Cesàro means.
pub fn theorem_a_report(a: &BoundedFunction, b: &BoundedFunction, pairs: &PairHistogram) -> Result<CorrelationReport> {
    if pairs.n() < 1000 {
        return contract(format!("need N ≥ 1000, got {}", pairs.n()));
    }
    Ok(correlation_report(a, b, pairs, WeightKind::Logarithmic))
}

/// Largest argument kept in the Gaussian double sum.
pub fn gaussian_cutoff(model: &GaussianModel) -> usize {
    (model.mu + 12.0 * model.sigma).ceil() as usize
}

/// `Σ_{k,ℓ} a(k) b(ℓ) f(k) f(ℓ)` over `0 ≤ k, ℓ ≤ ⌈μ + 12σ⌉`; the double sum factors.
pub fn theorem_b_prediction(a: &BoundedFunction, b: &BoundedFunction, n: u64) -> Result<Complex64> {
    if n < 1000 {
        return contract(format!("need N ≥ 1000, got {n}"));
    }
    let model = GaussianModel::for_n(n)?;
    let top = gaussian_cutoff(&model);
    let side = |f: &BoundedFunction| -> Complex64 { (0..=top).map(|k| f.eval(k as i64) * model.density(k as f64)).sum() };
    Ok(side(a) * side(b))
}

/// Per-ℓ conditional mean of `a(Ω(n+1))` among `n ≤ N` with `Ω(n) = ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllTerm {
    pub ell: usize,
    pub pi_bar: f64,
    pub pi_bar_log: f64,
    /// `𝔼^log_{n ≤ N, Ω(n) = ℓ} a(Ω(n+h))`, zero when no such n exists.
    pub conditional: Complex64,
    /// `|conditional − 𝔼 a(Ω(n))|`.
    pub discrepancy: f64,
}

/// The ℓ-resolved terms together with the Cesàro mean they are compared to.
pub fn ell_terms(a: &BoundedFunction, pairs: &PairHistogram) -> (Vec<EllTerm>, Complex64) {
    let mean = pairs.first_mean(a, WeightKind::Cesaro);
    let terms = (0..pairs.dim())
        .map(|ell| {
            let pi_bar = pairs.first_density(ell, WeightKind::Cesaro);
            let pi_bar_log = pairs.first_density(ell, WeightKind::Logarithmic);
            let (conditional, discrepancy) = if pi_bar_log > 0.0 {
                let c = pairs.row_sum(ell, a, WeightKind::Logarithmic) / pi_bar_log;
                (c, (c - mean).norm())
            } else {
                (Complex64::new(0.0, 0.0), 0.0)
            };
            EllTerm { ell, pi_bar, pi_bar_log, conditional, discrepancy }
        })
        .collect();
    (terms, mean)
}

/// `Σ_ℓ π̄_ℓ(N) |𝔼^log_{n ≤ N, Ω(n)=ℓ} a(Ω(n+1)) − 𝔼 a(Ω(n))|`.
pub fn theorem_c_sum(a: &BoundedFunction, pairs: &PairHistogram) -> Result<f64> {
    if pairs.n() < 1000 {
        return contract(format!("need N ≥ 1000, got {}", pairs.n()));
    }
    let (terms, _) = ell_terms(a, pairs);
    Ok(terms.iter().map(|t| t.pi_bar * t.discrepancy).collect::<CompensatedSum>().value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionCount {
    pub range: TypicalRange,
    pub threshold: f64,
    /// Members of the typical range whose discrepancy exceeds the threshold.
    pub exceptions: Vec<usize>,
    /// `ε |T|`.
    pub allowance: f64,
    pub within_allowance: bool,
}

/// Count typical ℓ whose conditional mean strays more than `threshold` from the global mean.
pub fn typical_ell_exceptions(
    a: &BoundedFunction,
    pairs: &PairHistogram,
    big_a: f64,
    epsilon: f64,
    threshold: f64,
) -> Result<ExceptionCount> {
    if !(epsilon > 0.0) {
        return contract(format!("epsilon {epsilon} must be positive"));
    }
    let range = TypicalRange::new(big_a, pairs.n())?;
    if range.members.is_empty() {
        return Err(Error::EmptyDomain(format!("typical range [{}, {}] has no integers", range.lo, range.hi)));
    }
    let (terms, _) = ell_terms(a, pairs);
    let exceptions: Vec<usize> = range
        .members
        .iter()
        .copied()
        .filter(|&l| terms.get(l).map_or(0.0, |t| t.discrepancy) > threshold)
        .collect();
    let allowance = epsilon * range.members.len() as f64;
    let within_allowance = exceptions.len() as f64 <= allowance;
    Ok(ExceptionCount { range, threshold, exceptions, allowance, within_allowance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftIdentity {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
}

/// Compare `𝔼^log a(Ω(n)) b(Ω(n+1))` with `𝔼^log_{p} 𝔼^log_n a(Ω(n)−1) b(Ω(n+p)−1)`.
///
/// `a(−1)` and `b(−1)` take the functions' default values.
pub fn prime_shift_identity(
    a: &BoundedFunction,
    b: &BoundedFunction,
    block: &FactorCountBlock,
    n: u64,
    window: &[u64],
    table: &PrimeTable,
) -> Result<ShiftIdentity> {
    if window.is_empty() {
        return Err(Error::EmptyDomain("empty prime window".into()));
    }
    for &p in window {
        if p > table.limit() || !table.contains(p) {
            return contract(format!("window entry {p} is not a certified prime"));
        }
    }
    let top = *window.iter().max().expect("nonempty");
    if n < top.saturating_mul(10) {
        return contract(format!("need N ≥ 10 · max window prime = {}, got {n}", top * 10));
    }
    let lhs = PairHistogram::new(block, n, 1)?.bilinear(a, 0, b, 0, WeightKind::Logarithmic);
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    let mut mass = CompensatedSum::default();
    for &p in window {
        let inner = PairHistogram::new(block, n, p)?.bilinear(a, -1, b, -1, WeightKind::Logarithmic);
        let w = 1.0 / p as f64;
        re.add(inner.re * w);
        im.add(inner.im * w);
        mass.add(w);
    }
    let rhs = Complex64::new(re.value(), im.value()) / mass.value();
    Ok(ShiftIdentity { lhs, rhs, gap: (lhs - rhs).norm() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub k: usize,
    pub value: Complex64,
    pub product_of_means: Complex64,
    pub gap: f64,
    pub label: String,
}

/// `𝔼 a₁(Ω(n)) ⋯ a_k(Ω(n+k−1))` against `Π 𝔼 a_i(Ω(n))`; an exploratory statistic.
pub fn k_point_explore(fns: &[BoundedFunction], block: &FactorCountBlock, n: u64, kind: WeightKind) -> Result<KPoint> {
    let k = fns.len();
    if k == 0 {
        return Err(Error::EmptyDomain("no functions supplied".into()));
    }
    if k > 4 {
        return Err(Error::Capacity(format!("k-point correlations supported up to k = 4, got {k}")));
    }
    if block.mode() != CountMode::BigOmega {
        return contract("k-point correlations need a BigOmega block");
    }
    let counts = block.prefix(n + k as u64 - 1)?;
    let value = reduce_range(1, n + 1, |m, acc| {
        let mut v = Complex64::new(1.0, 0.0);
        for (i, f) in fns.iter().enumerate() {
            v *= f.eval(counts[(m - 1) as usize + i] as i64);
        }
        acc.push(v, kind.weight(m));
    });
    let value = value.total() / value.mass();
    let mut product_of_means = Complex64::new(1.0, 0.0);
    for f in fns {
        let mean = reduce_range(1, n + 1, |m, acc| {
            let mut v = Complex64::new(1.0, 0.0);
            v *= f.eval(counts[(m - 1) as usize] as i64);
            acc.push(v, kind.weight(m));
        });
        product_of_means *= mean.total() / mean.mass();
    }
    Ok(KPoint { k, value, product_of_means, gap: (value - product_of_means).norm(), label: "EXPLORATORY".into() })
}

/// Both directions of the equivalence between the correlation bound and the ℓ-resolved sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bridge {
    pub theorem_c: f64,
    pub l1_gap: f64,
    /// Error of the correlation `𝔼^log s(Ω(n)) a(Ω(n+1))` with `s` the phase of the per-ℓ discrepancy.
    pub sign_error: f64,
    /// `theorem_c − ‖a‖ · l1_gap`, which `sign_error` must dominate.
    pub lower_bound: f64,
    /// Error of `𝔼^log b(Ω(n)) a(Ω(n+1))` for the supplied `b`.
    pub other_error: f64,
    /// `‖b‖ Σ_ℓ |d_ℓ(a)|`, which `other_error` may not exceed.
    pub upper_bound: f64,
    pub holds: bool,
    /// The constructed sign function on `0..dim`.
    pub sign_function: Vec<Complex64>,
}

/// Verify, at fixed N, that the ℓ-resolved discrepancies of `a` control correlations with `a(Ω(n+1))` both ways.
pub fn theorem_c_bridge(a: &BoundedFunction, b: &BoundedFunction, pairs: &PairHistogram) -> Result<Bridge> {
    let theorem_c = theorem_c_sum(a, pairs)?;
    let (terms, mean) = ell_terms(a, pairs);
    let l1_gap: f64 = terms.iter().map(|t| (t.pi_bar - t.pi_bar_log).abs()).collect::<CompensatedSum>().value();
    // d_ℓ = 𝔼^log[a(Ω(n+1)) 𝟙(Ω(n)=ℓ)] − 𝔼a · π̄_ℓ
    let d: Vec<Complex64> =
        (0..pairs.dim()).map(|l| pairs.row_sum(l, a, WeightKind::Logarithmic) - mean * terms[l].pi_bar).collect();
    let sign_function: Vec<Complex64> =
        d.iter().map(|z| if z.norm() > 0.0 { z.conj() / z.norm() } else { Complex64::new(0.0, 0.0) }).collect();
    let s = BoundedFunction::new("sign", 1.0, sign_function.clone(), Complex64::new(0.0, 0.0))?;
    let sign_error = correlation_report(&s, a, pairs, WeightKind::Logarithmic).error;
    let lower_bound = theorem_c - a.sup_norm() * l1_gap;
    let other_error = correlation_report(b, a, pairs, WeightKind::Logarithmic).error;
    let abs_sum: f64 = d.iter().map(|z| z.norm()).collect::<CompensatedSum>().value();
    let upper_bound = b.sup_norm() * abs_sum;
    let slack = 1e-12;
    let holds = sign_error + slack >= lower_bound && other_error <= upper_bound + slack;
    Ok(Bridge { theorem_c, l1_gap, sign_error, lower_bound, other_error, upper_bound, holds, sign_function })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::sieve::{enumerate_primes, factor_counts, SieveConfig};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn block() -> &'static FactorCountBlock {
        static B: OnceLock<FactorCountBlock> = OnceLock::new();
        B.get_or_init(|| factor_counts(1, 200_100, CountMode::BigOmega, &SieveConfig::default()).unwrap())
    }

    fn one() -> BoundedFunction {
        BoundedFunction::constant(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn lhs_examples() {
        let p = PairHistogram::new(block(), 10, 1).unwrap();
        let par = BoundedFunction::parity();
        let v = two_point_lhs(&par, &par, &p, WeightKind::Cesaro);
        assert!((v.re + 0.4).abs() < 1e-15);
        let p = PairHistogram::new(block(), 100, 1).unwrap();
        assert!((two_point_lhs(&one(), &one(), &p, WeightKind::Logarithmic).re - 1.0).abs() < 1e-15);
        let ind = BoundedFunction::indicator(1).unwrap();
        assert!((two_point_lhs(&ind, &one(), &p, WeightKind::Cesaro).re - 0.25).abs() < 1e-15);
        assert!(PairHistogram::new(block(), 200_099, 5).is_err());
    }

    #[test]
    fn report_examples() {
        let p = PairHistogram::new(block(), 100_000, 1).unwrap();
        let r = theorem_a_report(&one(), &one(), &p).unwrap();
        assert!(r.error < 1e-14);
        let par = BoundedFunction::parity();
        let r = theorem_a_report(&par, &par, &p).unwrap();
        assert!(r.lhs.norm() <= 1.0 + 1e-12 && r.error.is_finite());
        let small = PairHistogram::new(block(), 999, 1).unwrap();
        assert!(theorem_a_report(&par, &par, &small).is_err());
    }

    #[test]
    fn gaussian_prediction_factors() {
        let n = 100_000_000;
        let model = GaussianModel::for_n(n).unwrap();
        let k0 = model.mu.round() as usize;
        let delta = BoundedFunction::indicator(k0).unwrap();
        let mass: f64 = (0..=gaussian_cutoff(&model)).map(|k| model.density(k as f64)).sum();
        let v = theorem_b_prediction(&delta, &one(), n).unwrap();
        assert!((v.re - model.density(k0 as f64) * mass).abs() < 1e-15);
        let full = theorem_b_prediction(&one(), &one(), n).unwrap();
        assert!((full.re - mass * mass).abs() < 1e-14);
    }

    #[test]
    fn theorem_c_examples() {
        let p = PairHistogram::new(block(), 100_000, 1).unwrap();
        let c = BoundedFunction::constant(Complex64::new(0.3, 0.0));
        assert!(theorem_c_sum(&c, &p).unwrap() < 1e-15);
        let v = theorem_c_sum(&BoundedFunction::parity(), &p).unwrap();
        assert!((0.0..=2.0).contains(&v));
        let e = typical_ell_exceptions(&c, &p, 2.0, 0.1, 1e-9).unwrap();
        assert!(e.exceptions.is_empty());
        let e = typical_ell_exceptions(&BoundedFunction::parity(), &p, 2.0, 0.1, 2.0).unwrap();
        assert!(e.exceptions.is_empty());
    }

    #[test]
    fn conditional_means_match_direct_loop() {
        let n = 20_000u64;
        let p = PairHistogram::new(block(), n, 1).unwrap();
        let a = BoundedFunction::random(11);
        let (terms, _) = ell_terms(&a, &p);
        for t in terms.iter().filter(|t| t.pi_bar > 0.0).take(6) {
            let items: Vec<(u64, Complex64)> = (1..=n)
                .filter(|&m| oracle::big_omega(m) as usize == t.ell)
                .map(|m| (m, a.eval(oracle::big_omega(m + 1) as i64)))
                .collect();
            let direct = crate::averaging::log_avg(items).unwrap().value;
            assert!((direct - t.conditional).norm() < 1e-12, "ell {}", t.ell);
        }
    }

    #[test]
    fn shift_identity_examples() {
        let table = enumerate_primes(1000).unwrap();
        // n = 1 is the only term where Ω(n) − 1 falls off the table.
        let s = prime_shift_identity(&one(), &one(), block(), 100_000, &[11, 13, 97], &table).unwrap();
        assert!((s.gap - 1.0 / crate::averaging::harmonic(100_000)).abs() < 1e-12);
        let par = BoundedFunction::parity();
        let s = prime_shift_identity(&par, &par, block(), 100_000, &[2], &table).unwrap();
        let direct = PairHistogram::new(block(), 100_000, 2).unwrap().bilinear(&par, -1, &par, -1, WeightKind::Logarithmic);
        assert_eq!(s.rhs, direct);
        assert!(prime_shift_identity(&par, &par, block(), 100_000, &[9], &table).is_err());
        assert!(prime_shift_identity(&par, &par, block(), 100, &[11], &table).is_err());
    }

    #[test]
    fn k_point_examples() {
        let par = BoundedFunction::parity();
        let ones = vec![one(); 3];
        assert!(k_point_explore(&ones, block(), 100_000, WeightKind::Cesaro).unwrap().gap < 1e-15);
        let single = k_point_explore(&[BoundedFunction::random(3)], block(), 100_000, WeightKind::Logarithmic).unwrap();
        assert_eq!(single.gap, 0.0);
        let three = k_point_explore(&[par.clone(), par.clone(), par.clone()], block(), 100_000, WeightKind::Cesaro).unwrap();
        assert_eq!(three.label, "EXPLORATORY");
        assert!(matches!(k_point_explore(&vec![par; 5], block(), 1000, WeightKind::Cesaro), Err(Error::Capacity(_))));
    }

    #[test]
    fn bridge_holds_for_samples() {
        let p = PairHistogram::new(block(), 100_000, 1).unwrap();
        for seed in 0..5 {
            let a = BoundedFunction::random(seed);
            let b = BoundedFunction::random(seed + 100);
            let br = theorem_c_bridge(&a, &b, &p).unwrap();
            assert!(br.holds, "{br:?}");
        }
        let br = theorem_c_bridge(&BoundedFunction::parity(), &BoundedFunction::parity(), &p).unwrap();
        assert!(br.holds);
        assert!(br.sign_function.iter().all(|z| z.im == 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn matches_oracle_for_small_n(n in 1u64..=3_000, h in 1u64..=3, sa in any::<u64>(), sb in any::<u64>(), log in any::<bool>()) {
            let kind = if log { WeightKind::Logarithmic } else { WeightKind::Cesaro };
            let (a, b) = (BoundedFunction::random(sa), BoundedFunction::random(sb));
            let p = PairHistogram::new(block(), n, h).unwrap();
            let fast = two_point_lhs(&a, &b, &p, kind);
            let slow = oracle::brute_correlation(&a, &b, n, h, kind).unwrap();
            prop_assert!((fast - slow).norm() <= 1e-12);
        }

        #[test]
        fn conjugation_and_bounds(sa in any::<u64>(), sb in any::<u64>(), n in 1000u64..=50_000) {
            let (a, b) = (BoundedFunction::random(sa), BoundedFunction::random(sb));
            let p = PairHistogram::new(block(), n, 1).unwrap();
            let r = theorem_a_report(&a, &b, &p).unwrap();
            let rc = theorem_a_report(&a.conj(), &b.conj(), &p).unwrap();
            prop_assert_eq!(rc.lhs, r.lhs.conj());
            prop_assert_eq!(rc.prediction, r.prediction.conj());
            prop_assert!(r.lhs.norm() <= a.bound() * b.bound() + 1e-12);
            prop_assert!(r.prediction.norm() <= a.bound() * b.bound() + 1e-12);
        }
    }
}
