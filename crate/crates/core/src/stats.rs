//! Distribution of the factor count over `[1, N]`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{CompensatedSum, WeightKind, REDUCTION_CHUNK};
use crate::bounded::BoundedFunction;
use crate::error::{contract, Error, Result};
use crate::io::fmt_f64;
use crate::sieve::{FactorCountBlock, PrimeTable};

/// Histogram of a count function on `[1, N]`, with plain and `1/n` weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueHistogram {
    n: u64,
    counts: Vec<u64>,
    log_weights: Vec<f64>,
    harmonic: f64,
}

impl ValueHistogram {
    /// `values[i]` is the count at `n = i + 1`.
    pub fn from_prefix(values: &[u8]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDomain("histogram of an empty range".into()));
        }
        let partials: Vec<(Vec<u64>, Vec<CompensatedSum>)> = values
            .par_chunks(REDUCTION_CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = (c * REDUCTION_CHUNK) as u64 + 1;
                let mut counts = vec![0u64; 256];
                let mut logs = vec![CompensatedSum::default(); 256];
                for (i, &v) in chunk.iter().enumerate() {
                    counts[v as usize] += 1;
                    logs[v as usize].add(1.0 / (base + i as u64) as f64);
                }
                (counts, logs)
            })
            .collect();
        let mut counts = vec![0u64; 256];
        let mut logs = vec![CompensatedSum::default(); 256];
        for (c, l) in &partials {
            for v in 0..256 {
                counts[v] += c[v];
                logs[v].merge(&l[v]);
            }
        }
        let top = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
        counts.truncate(top + 1);
        let mut total = CompensatedSum::default();
        for l in &logs[..=top] {
            total.merge(l);
        }
        let harmonic = total.value();
        Ok(ValueHistogram {
            n: values.len() as u64,
            counts,
            log_weights: logs[..=top].iter().map(CompensatedSum::value).collect(),
            harmonic,
        })
    }

    /// Histogram of the block's counts on `[1, n]`.
    pub fn from_block(block: &FactorCountBlock, n: u64) -> Result<Self> {
        Self::from_prefix(block.prefix(n)?)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest value that occurs.
    pub fn max_value(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, l: usize) -> u64 {
        self.counts.get(l).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Relative density `#{n ≤ N : value = l} / N`.
    pub fn density(&self, l: usize) -> f64 {
        self.count(l) as f64 / self.n as f64
    }

    /// `Σ_{value(n) = l} (1/n) / Σ_{n ≤ N} 1/n`.
    pub fn log_density(&self, l: usize) -> f64 {
        self.log_weights.get(l).copied().unwrap_or(0.0) / self.harmonic
    }

    pub fn harmonic_mass(&self) -> f64 {
        self.harmonic
    }

    /// `𝔼 a(value(n))` as `Σ_l a(l) · density(l)`.
    pub fn expectation(&self, a: &BoundedFunction, kind: WeightKind) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for l in 0..self.counts.len() {
            let w = match kind {
                WeightKind::Cesaro => self.density(l),
                WeightKind::Logarithmic => self.log_density(l),
            };
            let v = a.eval(l as i64) * w;
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Normal model with mean and variance `log log N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianModel {
    pub fn for_n(n: u64) -> Result<Self> {
        if n < 3 {
            return contract(format!("log log N needs N ≥ 3, got {n}"));
        }
        let mu = (n as f64).ln().ln();
        Ok(GaussianModel { mu, sigma: mu.sqrt() })
    }

    pub fn density(&self, x: f64) -> f64 {
        gaussian_density(x, self)
    }

    /// Standardized value `(x − μ)/σ`.
    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }
}

pub fn gaussian_density(x: f64, model: &GaussianModel) -> f64 {
    let z = (x - model.mu) / model.sigma;
    (-0.5 * z * z).exp() / (model.sigma * (std::f64::consts::TAU).sqrt())
}

/// Standard normal CDF through `erfc`, accurate in both tails.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// One row of a [`DensityTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub ell: usize,
    pub count: u64,
    pub pi_bar: f64,
    pub pi_bar_log: f64,
    pub gaussian: f64,
}

impl DensityRow {
    pub fn ratio(&self) -> f64 {
        self.pi_bar / self.gaussian
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub n: u64,
    pub model: GaussianModel,
    pub rows: Vec<DensityRow>,
}

impl DensityTable {
    pub fn row(&self, ell: usize) -> Option<&DensityRow> {
        self.rows.get(ell)
    }

    /// Integer total of the counts; equals N exactly when every n was assigned once.
    pub fn count_total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn pi_bar_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.pi_bar).collect::<CompensatedSum>().value()
    }

    pub fn pi_bar_log_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.pi_bar_log).collect::<CompensatedSum>().value()
    }

    /// `ell,pi_bar,pi_bar_log,gaussian,ratio`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "ell,pi_bar,pi_bar_log,gaussian,ratio")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.ell,
                fmt_f64(r.pi_bar),
                fmt_f64(r.pi_bar_log),
                fmt_f64(r.gaussian),
                fmt_f64(r.ratio())
            )?;
        }
        Ok(())
    }
}

/// Per-ℓ densities, ℓ = 0 included, up to the largest value reached.
pub fn density_table(hist: &ValueHistogram) -> Result<DensityTable> {
    let model = GaussianModel::for_n(hist.n())?;
    let rows = (0..=hist.max_value())
        .map(|ell| DensityRow {
            ell,
            count: hist.count(ell),
            pi_bar: hist.density(ell),
            pi_bar_log: hist.log_density(ell),
            gaussian: model.density(ell as f64),
        })
        .collect();
    Ok(DensityTable { n: hist.n(), model, rows })
}

/// Integers within `A` standard deviations of `log log N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalRange {
    pub a: f64,
    pub n: u64,
    pub lo: f64,
    pub hi: f64,
    /// Positive integers in `[lo, hi]`.
    pub members: Vec<usize>,
}

impl TypicalRange {
    pub fn new(a: f64, n: u64) -> Result<Self> {
        if !(a > 1.0) {
            return contract(format!("typical range needs A > 1, got {a}"));
        }
        let m = GaussianModel::for_n(n)?;
        let lo = m.mu - a * m.sigma;
        let hi = m.mu + a * m.sigma;
        let first = lo.ceil().max(1.0) as usize;
        let last = hi.floor();
        let members = if last >= first as f64 { (first..=last as usize).collect() } else { Vec::new() };
        Ok(TypicalRange { a, n, lo, hi, members })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    /// `(ℓ, π̄_ℓ / f(ℓ))` for ℓ in the typical range.
    pub ratios: Vec<(usize, f64)>,
    pub max_deviation: f64,
    pub worst_ell: usize,
}

/// `π̄_ℓ(N) / f(ℓ; μ_N, σ_N)` across the typical range.
pub fn sathe_selberg_ratio_check(hist: &ValueHistogram, a: f64) -> Result<RatioCheck> {
    let range = TypicalRange::new(a, hist.n())?;
    if range.members.is_empty() {
        return Err(Error::EmptyDomain(format!("typical range [{}, {}] has no integers", range.lo, range.hi)));
    }
    let model = GaussianModel::for_n(hist.n())?;
    let ratios: Vec<(usize, f64)> =
        range.members.iter().map(|&l| (l, hist.density(l) / model.density(l as f64))).collect();
    let (worst_ell, max_deviation) = ratios
        .iter()
        .map(|&(l, r)| (l, (r - 1.0).abs()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(RatioCheck { ratios, max_deviation, worst_ell })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsDistance {
    pub ks: f64,
    /// `ks · √(log log N)`.
    pub normalized: f64,
    /// Standardized abscissa where the supremum is attained.
    pub at: f64,
}

/// Kolmogorov distance between the standardized empirical law and Φ.
///
/// The empirical CDF is a step function and Φ is increasing, so the
/// supremum is attained at a jump, from one side or the other.
pub fn erdos_kac_ks(hist: &ValueHistogram) -> Result<KsDistance> {
    let model = GaussianModel::for_n(hist.n())?;
    let n = hist.n() as f64;
    let mut below = 0u64;
    let mut best = (0.0f64, 0.0f64);
    for l in 0..=hist.max_value() {
        let z = model.standardize(l as f64);
        let phi = std_normal_cdf(z);
        let left = below as f64 / n;
        below += hist.count(l);
        let right = below as f64 / n;
        for d in [(left - phi).abs(), (right - phi).abs()] {
            if d > best.0 {
                best = (d, z);
            }
        }
    }
    Ok(KsDistance { ks: best.0, normalized: best.0 * model.sigma, at: best.1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuranKubilius {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `𝔼_{n ≤ N} |Σ_{p∈P} 𝟙[p | n] − Σ_{p∈P} 1/p|` against `2 (Σ_{p∈P} 1/p)^{1/2}`.
///
/// `primes` must be a set of primes `≤ N`; `table` certifies primality.
pub fn turan_kubilius_check(n: u64, primes: &[u64], table: &PrimeTable) -> Result<TuranKubilius> {
    if n == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    for &p in primes {
        if p > n {
            return contract(format!("prime {p} exceeds N = {n}"));
        }
        if p > table.limit() || !table.contains(p) {
            return contract(format!("{p} is not a certified prime"));
        }
    }
    let len = usize::try_from(n).map_err(|_| Error::Capacity("N exceeds usize".into()))?;
    let mut hits = vec![0u8; len + 1];
    for &p in primes {
        let mut m = p as usize;
        while m <= len {
            hits[m] += 1;
            m += p as usize;
        }
    }
    let mean: f64 = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
    let lhs = hits[1..]
        .par_chunks(REDUCTION_CHUNK)
        .map(|c| c.iter().map(|&h| (h as f64 - mean).abs()).collect::<CompensatedSum>())
        .collect::<Vec<_>>()
        .iter()
        .fold(CompensatedSum::default(), |mut acc, s| {
            acc.merge(s);
            acc
        })
        .value()
        / n as f64;
    let rhs = 2.0 * mean.sqrt();
    Ok(TuranKubilius { lhs, rhs, holds: lhs <= rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDensities {
    /// Share of `n ≤ N` with `ω(n) ≥ μ + Dσ`.
    pub gamma: f64,
    /// Share of `n ≤ N` with `ω(n) ≤ μ − Dσ`.
    pub delta: f64,
}

/// Upper and lower tails of ω. `omega_hist` must be the histogram of ω on `[1, N]`.
pub fn tail_densities(omega_hist: &ValueHistogram, d: f64) -> Result<TailDensities> {
    if !(d >= 1.0) {
        return contract(format!("tail width D = {d} below 1"));
    }
    let model = GaussianModel::for_n(omega_hist.n())?;
    let upper = model.mu + d * model.sigma;
    let lower = model.mu - d * model.sigma;
    let (mut g, mut dl) = (0u64, 0u64);
    for l in 0..=omega_hist.max_value() {
        let x = l as f64;
        if x >= upper {
            g += omega_hist.count(l);
        }
        if x <= lower {
            dl += omega_hist.count(l);
        }
    }
    let n = omega_hist.n() as f64;
    Ok(TailDensities { gamma: g as f64 / n, delta: dl as f64 / n })
}

/// `Σ_ℓ |π̄_ℓ − π̄^log_ℓ|`.
pub fn density_l1_gap(table: &DensityTable) -> f64 {
    table.rows.iter().map(|r| (r.pi_bar - r.pi_bar_log).abs()).collect::<CompensatedSum>().value()
}
