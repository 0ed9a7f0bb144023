//! Fourier reduction in the Ω variable, prime windows, Taylor truncation and
//! exponential sums over primes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{harmonic, reduce_range, CompensatedSum, WeightKind, REDUCTION_CHUNK};
use crate::bounded::BoundedFunction;
use crate::correlation::{two_point_lhs, PairHistogram};
use crate::error::{contract, Error, Result};
use crate::pretentious::{unit, unit_fraction, FrequencyFamily};
use crate::sieve::{factor_counts, CountMode, FactorCountBlock, PrimeTable, SieveConfig};

/// Primes in the closed interval `[h0, h]` with their reciprocal sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeWindow {
    pub h0: f64,
    pub h: f64,
    pub primes: Vec<u64>,
    /// `Σ 1/p` over the window.
    pub reciprocal_sum: f64,
}

impl PrimeWindow {
    /// Window over an explicit list of primes.
    pub fn from_primes(primes: Vec<u64>, table: &PrimeTable) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::EmptyDomain("empty prime window".into()));
        }
        if let Some(&p) = primes.iter().find(|&&p| p > table.limit() || !table.contains(p)) {
            return contract(format!("{p} is not a certified prime"));
        }
        let h0 = *primes.iter().min().expect("nonempty") as f64;
        let h = *primes.iter().max().expect("nonempty") as f64;
        let reciprocal_sum = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
        Ok(PrimeWindow { h0, h, primes, reciprocal_sum })
    }

    pub fn max_prime(&self) -> u64 {
        *self.primes.last().expect("window is nonempty")
    }

    /// `p ↦ 1/(p Σ 1/q)`.
    fn weights(&self) -> Vec<f64> {
        self.primes.iter().map(|&p| 1.0 / (p as f64 * self.reciprocal_sum)).collect()
    }
}

/// Explicit window endpoints replacing the asymptotic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowOverrides {
    pub h0: f64,
    pub h: f64,
}

/// `(H0, H)` with `H = exp((log N)^{1/L^{4/9}})`, `H0 = exp(exp(−L^{1/3}) (log N)^{1/L^{4/9}})`, `L = log log N`.
pub fn window_endpoints(n: u64) -> (f64, f64) {
    let log_n = (n as f64).ln();
    let ll = log_n.ln();
    let inner = log_n.powf(1.0 / ll.powf(4.0 / 9.0));
    (((-ll.cbrt()).exp() * inner).exp(), inner.exp())
}

/// Primes in `[H0, H]`, from the formulas or from `overrides`.
pub fn prime_window(n: u64, overrides: Option<WindowOverrides>, table: &PrimeTable) -> Result<PrimeWindow> {
    let (h0, h) = match overrides {
        Some(o) => (o.h0, o.h),
        None => {
            if n < 10_000 {
                return contract(format!("window formulas need N ≥ 10^4 without overrides, got {n}"));
            }
            window_endpoints(n)
        }
    };
    let degenerate = |reason: String| Err(Error::DegenerateWindow { h0, h, reason });
    if !(h0.is_finite() && h.is_finite()) || h0 >= h {
        return degenerate("need finite H0 < H".into());
    }
    if h > table.limit() as f64 {
        return contract(format!("prime table stops at {} below H = {h}", table.limit()));
    }
    let lo = h0.max(0.0).ceil() as u64;
    let hi = h.floor() as u64;
    let primes = if lo <= hi { table.in_range(lo, hi).to_vec() } else { Vec::new() };
    if primes.is_empty() {
        return degenerate("no primes in the window".into());
    }
    let reciprocal_sum = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
    Ok(PrimeWindow { h0, h, primes, reciprocal_sum })
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerInterval {
    pub lo: i64,
    pub hi: i64,
}

impl IntegerInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyDomain(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(IntegerInterval { lo, hi })
    }

    pub fn of_family(family: &FrequencyFamily) -> Self {
        IntegerInterval { lo: family.lo, hi: family.hi }
    }

    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

/// `e(ξn/|I|)` with `ξn` reduced exactly.
fn mode(xi: i64, n: i64, m: u64) -> Complex64 {
    let r = (xi as i128 * n as i128).rem_euclid(m as i128) as u64;
    unit_fraction(r, m)
}

/// Coefficients with `b(n) = Σ_{ξ∈I} b̂(ξ) e(ξn/|I|)` for `n ∈ I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    pub interval: IntegerInterval,
    /// `b̂(ξ)` for `ξ = lo, …, hi`.
    pub coefficients: Vec<Complex64>,
    /// `𝔼_{n∈I} |b(n)|²`.
    pub mean_square: f64,
}

impl FourierTable {
    pub fn coefficient(&self, xi: i64) -> Option<Complex64> {
        self.interval.contains(xi).then(|| self.coefficients[(xi - self.interval.lo) as usize])
    }

    /// `Σ_ξ b̂(ξ) e(ξn/|I|)`.
    pub fn eval(&self, n: i64) -> Complex64 {
        let m = self.interval.len();
        self.interval.iter().zip(&self.coefficients).map(|(xi, c)| c * mode(xi, n, m)).sum()
    }

    /// `Σ_ξ |b̂(ξ)|²`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect::<CompensatedSum>().value()
    }

    /// `|Σ|b̂|² − 𝔼|b|²| / 𝔼|b|²`, or the absolute gap when `b ≡ 0`.
    pub fn parseval_residual(&self) -> f64 {
        let gap = (self.energy() - self.mean_square).abs();
        if self.mean_square > 0.0 { gap / self.mean_square } else { gap }
    }
}

/// Discrete Fourier coefficients of `values` listed over `I`.
pub fn fourier_expand(values: &[Complex64], interval: IntegerInterval) -> Result<FourierTable> {
    if values.len() as u64 != interval.len() {
        return contract(format!("{} values for an interval of length {}", values.len(), interval.len()));
    }
    let m = interval.len();
    let coefficients = interval
        .iter()
        .map(|xi| {
            let mut re = CompensatedSum::default();
            let mut im = CompensatedSum::default();
            for (n, v) in interval.iter().zip(values) {
                let z = v * mode(-xi, n, m);
                re.add(z.re);
                im.add(z.im);
            }
            Complex64::new(re.value(), im.value()) / m as f64
        })
        .collect();
    let mean_square = values.iter().map(|v| v.norm_sqr()).collect::<CompensatedSum>().value() / m as f64;
    Ok(FourierTable { interval, coefficients, mean_square })
}

/// Expand `n ↦ b(n + offset)` over `I`.
pub fn fourier_expand_function(b: &BoundedFunction, interval: IntegerInterval, offset: i64) -> Result<FourierTable> {
    let values: Vec<Complex64> = interval.iter().map(|n| b.eval(n + offset)).collect();
    fourier_expand(&values, interval)
}

/// Per-frequency terms of the reduced sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSum {
    pub n: u64,
    /// `Σ_ξ` over the requested frequencies.
    pub total: f64,
    /// Part with `|ξ| ≤ A^{5/2}`.
    pub small: f64,
    /// Part with `|ξ| > A^{5/2}`.
    pub large: f64,
    pub threshold: f64,
    /// `(ξ, 𝔼^log_n |𝔼^log_p f_ξ(n+p) − 𝔼^log_m f_ξ(m)|²)`.
    pub terms: Vec<(i64, f64)>,
}

/// `Σ_ξ 𝔼^log_{n≤N} |𝔼^log_{p∈window} e(ξΩ(n+p)/|I|) − 𝔼^log_{m≤N} e(ξΩ(m)/|I|)|²`.
///
/// For each n the window is first collapsed into a weighted histogram of `Ω(n+p)`
/// folded modulo `|I|`, so a frequency costs `|I|` operations per n.
pub fn reduced_sum(
    block: &FactorCountBlock,
    n: u64,
    window: &PrimeWindow,
    family: &FrequencyFamily,
    xi_set: &[i64],
) -> Result<ReducedSum> {
    if block.mode() != CountMode::BigOmega {
        return contract("reduced sum needs a BigOmega block");
    }
    if window.primes.is_empty() {
        return Err(Error::EmptyDomain("empty prime window".into()));
    }
    if let Some(&xi) = xi_set.iter().find(|&&x| !family.contains(x)) {
        return contract(format!("frequency {xi} outside [{}, {}]", family.lo, family.hi));
    }
    if n == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    let top = window.max_prime();
    let counts = block.prefix(n + top).map_err(|_| {
        Error::Contract(format!("factor counts must cover [1, {}] (N + max window prime)", n + top))
    })?;
    let m = family.cardinality();
    let mu = m as usize;
    // modes[x][r] = e(ξ_x r/|I|)
    let modes: Vec<Vec<Complex64>> = xi_set.iter().map(|&xi| (0..mu).map(|r| mode(xi, r as i64, m)).collect()).collect();
    let means: Vec<Complex64> = xi_set
        .iter()
        .map(|&xi| {
            let acc = reduce_range(1, n + 1, |k, acc| {
                acc.push(mode(xi, counts[(k - 1) as usize] as i64, m), WeightKind::Logarithmic.weight(k));
            });
            acc.total() / acc.mass()
        })
        .collect();
    let weights = window.weights();
    let offsets: Vec<usize> = window.primes.iter().map(|&p| p as usize).collect();
    let len = n as usize;
    let chunks = len.div_ceil(REDUCTION_CHUNK);
    let partials: Vec<Vec<CompensatedSum>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * REDUCTION_CHUNK;
            let end = (start + REDUCTION_CHUNK).min(len);
            let mut sums = vec![CompensatedSum::default(); xi_set.len()];
            let mut folded = vec![0.0f64; mu];
            for i in start..end {
                // index i holds n = i + 1, and n + p sits at i + p
                folded.iter_mut().for_each(|v| *v = 0.0);
                for (&off, &w) in offsets.iter().zip(&weights) {
                    folded[counts[i + off] as usize % mu] += w;
                }
                let wn = 1.0 / (i + 1) as f64;
                for (x, row) in modes.iter().enumerate() {
                    let mut z = -means[x];
                    for (r, &h) in folded.iter().enumerate() {
                        if h != 0.0 {
                            z += row[r] * h;
                        }
                    }
                    sums[x].add(z.norm_sqr() * wn);
                }
            }
            sums
        })
        .collect();
    let mut sums = vec![CompensatedSum::default(); xi_set.len()];
    for part in &partials {
        for (s, p) in sums.iter_mut().zip(part) {
            s.merge(p);
        }
    }
    let mass = harmonic(n);
    let threshold = family.large_threshold();
    let terms: Vec<(i64, f64)> = xi_set.iter().zip(&sums).map(|(&xi, s)| (xi, s.value() / mass)).collect();
    let part = |small: bool| -> f64 {
        terms
            .iter()
            .filter(|(xi, _)| ((*xi as f64).abs() <= threshold) == small)
            .map(|&(_, v)| v)
            .collect::<CompensatedSum>()
            .value()
    };
    let (small, large) = (part(true), part(false));
    let total = terms.iter().map(|&(_, v)| v).collect::<CompensatedSum>().value();
    Ok(ReducedSum { n, total, small, large, threshold, terms })
}

/// Both sides of the reduction inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionAudit {
    /// `|𝔼^log a(Ω(n)) b(Ω(n+1)) − 𝔼^log a(Ω(n)) · 𝔼^log b(Ω(n))|`.
    pub lhs: f64,
    /// Square root of the reduced sum over the whole frequency interval.
    pub sqrt_reduced: f64,
    /// `C / (log log N)^{1/6}`.
    pub o_term: f64,
    /// `sqrt_reduced − lhs + o_term`.
    pub slack: f64,
    pub reduced: ReducedSum,
}

/// Frozen constant in front of the `(log log N)^{−1/6}` error term of the audit.
pub const REDUCTION_O_TERM: f64 = 1.0;

/// Compare a logarithmic correlation with the square root of the reduced sum.
pub fn reduction_inequality_audit(
    a: &BoundedFunction,
    b: &BoundedFunction,
    block: &FactorCountBlock,
    n: u64,
    window: &PrimeWindow,
) -> Result<ReductionAudit> {
    let family = FrequencyFamily::new(n)?;
    let xi: Vec<i64> = family.members().collect();
    let reduced = reduced_sum(block, n, window, &family, &xi)?;
    let pairs = PairHistogram::new(block, n, 1)?;
    audit_against(a, b, &pairs, reduced)
}

/// The audit for a reduced sum already computed over the whole frequency interval of `pairs.n()`.
pub fn audit_against(
    a: &BoundedFunction,
    b: &BoundedFunction,
    pairs: &PairHistogram,
    reduced: ReducedSum,
) -> Result<ReductionAudit> {
    if pairs.shift() != 1 || pairs.n() != reduced.n {
        return contract("pair histogram must have shift 1 and the same N as the reduced sum");
    }
    let family = FrequencyFamily::new(pairs.n())?;
    if reduced.terms.len() as u64 != family.cardinality() {
        return contract("reduced sum must cover every frequency");
    }
    let lhs_corr = two_point_lhs(a, b, pairs, WeightKind::Logarithmic);
    let ma = pairs.first_mean(a, WeightKind::Logarithmic);
    let mb = pairs.first_mean(b, WeightKind::Logarithmic);
    let lhs = (lhs_corr - ma * mb).norm();
    let sqrt_reduced = reduced.total.sqrt();
    let o_term = REDUCTION_O_TERM / family.loglog.powf(1.0 / 6.0);
    Ok(ReductionAudit { lhs, sqrt_reduced, o_term, slack: sqrt_reduced - lhs + o_term, reduced })
}

/// Degree-K Taylor polynomial of `e(x)` with the factorial tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorTerm {
    /// `Σ_{k≤K} (2πix)^k / k!`.
    pub approx: Complex64,
    /// `(2π|x|)^{K+1} / (K+1)!`.
    pub bound: f64,
}

pub const TAYLOR_MAX_DEGREE: u32 = 10_000;

fn check_degree(k: u32) -> Result<()> {
    if k > TAYLOR_MAX_DEGREE {
        return contract(format!("degree {k} above {TAYLOR_MAX_DEGREE}"));
    }
    Ok(())
}

pub fn taylor_truncation(x: f64, k: u32) -> Result<TaylorTerm> {
    check_degree(k)?;
    let z = Complex64::new(0.0, std::f64::consts::TAU * x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut approx = term;
    for j in 1..=k {
        term = term * z / j as f64;
        approx += term;
    }
    let y = std::f64::consts::TAU * x.abs();
    let bound = if y == 0.0 { 0.0 } else { ((k + 1) as f64 * y.ln() - libm::lgamma((k + 2) as f64)).exp() };
    Ok(TaylorTerm { approx, bound })
}

/// `|e(x) − Σ_{k≤K} (2πix)^k/k!|`, summed from the tail once its terms decrease.
pub fn taylor_error(x: f64, k: u32) -> Result<f64> {
    check_degree(k)?;
    let y = std::f64::consts::TAU * x.abs();
    if y == 0.0 {
        return Ok(0.0);
    }
    if ((k + 1) as f64) <= y {
        return Ok((unit(x) - taylor_truncation(x, k)?.approx).norm());
    }
    // terms (iy)^j/j! for j > K, built in log space to avoid overflow and underflow
    let z = Complex64::new(0.0, std::f64::consts::TAU * x);
    let lead_mag = ((k + 1) as f64 * y.ln() - libm::lgamma((k + 2) as f64)).exp();
    let phase = Complex64::new(0.0, x.signum()).powu(k + 1);
    let mut term = phase * lead_mag;
    let mut tail = term;
    let mut j = k + 1;
    while term.norm() > tail.norm() * 1e-20 && term.norm() > 0.0 {
        j += 1;
        term = term * z / j as f64;
        tail += term;
    }
    Ok(tail.norm())
}

/// Effect of dropping primes above the cutoff from Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationGap {
    pub cutoff: f64,
    /// Cutoff below 2, so the truncated count vanishes identically.
    pub degenerate: bool,
    /// `𝔼_{n≤N} |Ω(n) − ω_N(n)|`.
    pub mean_abs_gap: f64,
    /// `|𝔼 e(t(Ω(n+p) − Ω(n+q))/√L) − 𝔼 e(t(ω_N(n+p) − ω_N(n+q))/√L)|`.
    pub exp_gap: f64,
    /// `8 log log log N`.
    pub reference: f64,
}

/// Compare Ω with its truncation `ω_N(n) = #{p ≤ cutoff : p | n}`; `cutoff` defaults to `N^{1/(log log N)^8}`.
#[allow(clippy::too_many_arguments)]
pub fn omega_truncation_gap(
    block: &FactorCountBlock,
    n: u64,
    p: u64,
    q: u64,
    t: f64,
    cutoff: Option<f64>,
    config: &SieveConfig,
) -> Result<TruncationGap> {
    if block.mode() != CountMode::BigOmega {
        return contract("truncation gap needs a BigOmega block");
    }
    if n < 16 {
        return contract(format!("need N ≥ 16 so that log log N > 1, got {n}"));
    }
    if p.max(q) > n / 10 || p == 0 || q == 0 {
        return contract(format!("shifts {p}, {q} must lie in [1, N/10]"));
    }
    let span = n + p.max(q);
    let big = block.prefix(span)?;
    let cutoff = cutoff.unwrap_or_else(|| config.truncation_cutoff(n));
    let degenerate = !(cutoff >= 2.0);
    let small: Vec<u8> = if degenerate {
        vec![0; span as usize]
    } else {
        factor_counts(1, span + 1, CountMode::TruncatedOmega(cutoff), config)?.counts().to_vec()
    };
    let gap = reduce_range(1, n + 1, |k, acc| {
        let i = (k - 1) as usize;
        acc.push(Complex64::new((big[i] as f64 - small[i] as f64).abs(), 0.0), 1.0);
    });
    let scale = t / (n as f64).ln().ln().sqrt();
    let exp_mean = |c: &[u8]| {
        let acc = reduce_range(1, n + 1, |k, acc| {
            let d = c[(k - 1 + p) as usize] as f64 - c[(k - 1 + q) as usize] as f64;
            acc.push(unit(scale * d), 1.0);
        });
        acc.total() / acc.mass()
    };
    let exp_gap = if t == 0.0 { 0.0 } else { (exp_mean(big) - exp_mean(&small)).norm() };
    Ok(TruncationGap {
        cutoff,
        degenerate,
        mean_abs_gap: gap.total().re / gap.mass(),
        exp_gap,
        reference: 8.0 * (n as f64).ln().ln().ln(),
    })
}

/// `𝔼^log_{p∈window} e(pα)`.
pub fn prime_exponential_sum(window: &PrimeWindow, alpha: f64) -> Complex64 {
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for (&p, w) in window.primes.iter().zip(window.weights()) {
        let z = unit((p as f64 * alpha).rem_euclid(1.0)) * w;
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Grid estimate of the measure of `{α ∈ [0,1) : |𝔼^log_p e(pα)| > ε}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorArcs {
    pub epsilon: f64,
    pub grid_points: u64,
    pub spacing: f64,
    pub measure: f64,
    /// Largest prime in the window.
    pub top: u64,
    /// `measure · ε⁴ · top`.
    pub normalized: f64,
    /// Whether every prime lies in `[top/2, top]`.
    pub dyadic: bool,
}

/// Measure of the major arcs on the grid `α = j / grid_points`, which must have at least `10 · max p` points.
pub fn major_arc_measure(window: &PrimeWindow, epsilon: f64, grid_points: u64) -> Result<MajorArcs> {
    if window.primes.is_empty() {
        return Err(Error::EmptyDomain("empty prime window".into()));
    }
    if !(epsilon > 0.0) {
        return contract(format!("epsilon {epsilon} must be positive"));
    }
    let top = window.max_prime();
    if grid_points < 10 * top {
        return contract(format!("grid of {grid_points} points is coarser than 1/(10·{top})"));
    }
    let hits: u64 = (0..grid_points)
        .into_par_iter()
        .filter(|&j| prime_exponential_sum(window, j as f64 / grid_points as f64).norm() > epsilon)
        .count() as u64;
    let measure = hits as f64 / grid_points as f64;
    Ok(MajorArcs {
        epsilon,
        grid_points,
        spacing: 1.0 / grid_points as f64,
        measure,
        top,
        normalized: measure * epsilon.powi(4) * top as f64,
        dyadic: window.primes.iter().all(|&p| 2 * p >= top),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::sieve::enumerate_primes;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| enumerate_primes(100_000).unwrap())
    }

    fn block() -> &'static FactorCountBlock {
        static B: OnceLock<FactorCountBlock> = OnceLock::new();
        B.get_or_init(|| factor_counts(1, 130_000, CountMode::BigOmega, &SieveConfig::default()).unwrap())
    }

    #[test]
    fn window_overrides() {
        let w = prime_window(0, Some(WindowOverrides { h0: 10.0, h: 100.0 }), table()).unwrap();
        assert_eq!(w.primes.len(), 21);
        assert_eq!((w.primes[0], w.max_prime()), (11, 97));
        let direct: f64 = oracle_primes(10, 100).iter().map(|&p| 1.0 / p as f64).sum();
        assert!((w.reciprocal_sum - direct).abs() < 1e-14);
        let w = prime_window(0, Some(WindowOverrides { h0: 2.0, h: 3.0 }), table()).unwrap();
        assert_eq!(w.primes, vec![2, 3]);
        assert!((w.reciprocal_sum - 5.0 / 6.0).abs() < 1e-15);
        let e = prime_window(0, Some(WindowOverrides { h0: 24.0, h: 28.0 }), table());
        assert!(matches!(e, Err(Error::DegenerateWindow { .. })));
        assert!(prime_window(100, None, table()).is_err());
    }

    fn oracle_primes(lo: u64, hi: u64) -> Vec<u64> {
        (lo..=hi).filter(|&n| oracle::is_prime(n)).collect()
    }

    #[test]
    fn formula_window_at_desk_scale() {
        let (h0, h) = window_endpoints(100_000_000);
        assert!(h0 < h);
        let w = prime_window(100_000_000, None, table()).unwrap();
        assert_eq!(w.primes, oracle_primes(h0.ceil() as u64, h.floor() as u64));
        assert!(w.reciprocal_sum > 0.0);
    }

    #[test]
    fn fourier_basics() {
        let iv = IntegerInterval::new(-3, 4).unwrap();
        let t = fourier_expand(&[Complex64::new(1.0, 0.0); 8], iv).unwrap();
        assert!((t.coefficient(0).unwrap() - 1.0).norm() < 1e-15);
        assert!(iv.iter().filter(|&x| x != 0).all(|x| t.coefficient(x).unwrap().norm() < 1e-15));
        let vals: Vec<Complex64> = iv.iter().map(|n| mode(3, n, 8)).collect();
        let t = fourier_expand(&vals, iv).unwrap();
        for xi in iv.iter() {
            let want = if xi == 3 { 1.0 } else { 0.0 };
            assert!((t.coefficient(xi).unwrap() - want).norm() < 1e-14);
        }
        for (n, v) in iv.iter().zip(&vals) {
            assert!((t.eval(n) - v).norm() < 1e-13);
        }
        assert!(fourier_expand(&vals[..3], iv).is_err());
    }

    #[test]
    fn reduced_sum_examples() {
        let fam = FrequencyFamily::new(10_000).unwrap();
        let w = PrimeWindow::from_primes(vec![2], table()).unwrap();
        let zero = reduced_sum(block(), 10_000, &w, &fam, &[0]).unwrap();
        assert!(zero.total.abs() < 1e-28);
        let all: Vec<i64> = fam.members().collect();
        let r = reduced_sum(block(), 10_000, &w, &fam, &all).unwrap();
        assert!(r.terms.iter().all(|&(_, v)| v >= 0.0));
        assert!((r.small + r.large - r.total).abs() < 1e-12);
        assert!(reduced_sum(block(), 10_000, &w, &fam, &[fam.hi + 1]).is_err());
        assert!(reduced_sum(block(), 129_999, &w, &fam, &[0]).is_err());
    }

    #[test]
    fn reduced_sum_matches_direct_loop() {
        let n = 3_000u64;
        let fam = FrequencyFamily::new(n).unwrap();
        let w = prime_window(0, Some(WindowOverrides { h0: 5.0, h: 40.0 }), table()).unwrap();
        let m = fam.cardinality();
        for xi in [fam.lo, -1, 1, fam.hi] {
            let f = |k: u64| mode(xi, oracle::big_omega(k) as i64, m);
            let mean = oracle::brute_average(f, n, WeightKind::Logarithmic);
            let direct = oracle::brute_average(
                |k| {
                    let g: Complex64 = w.primes.iter().map(|&p| f(k + p) / p as f64).sum::<Complex64>() / w.reciprocal_sum;
                    Complex64::new((g - mean).norm_sqr(), 0.0)
                },
                n,
                WeightKind::Logarithmic,
            );
            let fast = reduced_sum(block(), n, &w, &fam, &[xi]).unwrap().total;
            assert!((fast - direct.re).abs() < 1e-12, "xi {xi}: {fast} vs {}", direct.re);
        }
    }

    #[test]
    fn audit_examples() {
        let w = prime_window(0, Some(WindowOverrides { h0: 10.0, h: 100.0 }), table()).unwrap();
        let one = BoundedFunction::constant(Complex64::new(1.0, 0.0));
        let r = reduction_inequality_audit(&one, &one, block(), 100_000, &w).unwrap();
        assert!(r.lhs < 1e-14 && r.slack >= 0.0);
        let r = reduction_inequality_audit(&BoundedFunction::random(4), &one, block(), 100_000, &w).unwrap();
        assert!(r.lhs < 1e-14 && r.slack >= 0.0);
    }

    #[test]
    fn taylor_examples() {
        let t = taylor_truncation(0.0, 7).unwrap();
        assert_eq!((t.approx, t.bound), (Complex64::new(1.0, 0.0), 0.0));
        let t = taylor_truncation(0.5, 0).unwrap();
        assert_eq!(t.approx, Complex64::new(1.0, 0.0));
        assert!((t.bound - std::f64::consts::PI).abs() < 1e-14);
        assert!((taylor_error(0.5, 0).unwrap() - 2.0).abs() < 1e-14);
        let t = taylor_truncation(1.0, 50).unwrap();
        let err = taylor_error(1.0, 50).unwrap();
        assert!(err <= t.bound && err > 0.0);
        assert!((t.approx - 1.0).norm() < 1e-12);
        assert!(taylor_truncation(1.0, 10_001).is_err());
    }

    #[test]
    fn truncation_gap_examples() {
        let cfg = SieveConfig::default();
        let g = omega_truncation_gap(block(), 100_000, 3, 7, 0.0, None, &cfg).unwrap();
        assert_eq!(g.exp_gap, 0.0);
        assert!(g.degenerate);
        // at cutoff N only multiplicities remain: 𝔼(Ω − ω) → Σ 1/(p(p−1))
        let g = omega_truncation_gap(block(), 100_000, 3, 7, 1.0, Some(100_000.0), &cfg).unwrap();
        let direct = (1..=100_000u64).map(|k| (oracle::big_omega(k) - oracle::small_omega(k)) as f64).sum::<f64>() / 1e5;
        assert!((g.mean_abs_gap - direct).abs() < 1e-12);
        assert!((g.mean_abs_gap - 0.7731566690497452).abs() < 5e-3);
    }

    #[test]
    fn exponential_sums_and_arcs() {
        let w = prime_window(0, Some(WindowOverrides { h0: 50.0, h: 100.0 }), table()).unwrap();
        assert!((prime_exponential_sum(&w, 0.0) - 1.0).norm() < 1e-14);
        assert!(prime_exponential_sum(&w, 0.37).norm() <= 1.0 + 1e-12);
        let arcs = major_arc_measure(&w, 0.5, 6400).unwrap();
        assert!(arcs.dyadic && arcs.measure > 0.0 && arcs.measure < 0.5);
        let all = major_arc_measure(&w, 1e-6, 1000).unwrap();
        assert!(all.measure > 0.9);
        assert!(major_arc_measure(&w, 0.5, 100).is_err());
        let small = PrimeWindow::from_primes(vec![2, 3], table()).unwrap();
        assert!((prime_exponential_sum(&small, 0.5) - 0.2).norm() < 1e-15);
        for alpha in [0.1, 0.37, 0.5, 0.93] {
            let (a, b) = (prime_exponential_sum(&w, alpha), prime_exponential_sum(&w, 1.0 - alpha));
            assert!((a.conj() - b).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn parseval(seed in any::<u64>(), len in prop::sample::select(vec![8i64, 32, 129]), lo in -40i64..40) {
            let b = BoundedFunction::random(seed);
            let iv = IntegerInterval::new(lo, lo + len - 1).unwrap();
            let t = fourier_expand_function(&b, iv, 20 - lo).unwrap();
            prop_assert!(t.parseval_residual() <= 1e-10);
        }

        #[test]
        fn taylor_bound_holds(x in -3.0f64..3.0, k in 0u32..40) {
            let t = taylor_truncation(x, k).unwrap();
            prop_assert!(taylor_error(x, k).unwrap() <= t.bound);
        }
    }
}
