//! Pretentious distance between completely multiplicative functions.

mod characters;
mod zeta;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use characters::{dirichlet_characters, CharacterGroup, TwistSpec, MAX_MODULUS};
pub use zeta::PrimeZetaSum;

use crate::averaging::CompensatedSum;
use crate::error::{contract, Error, Result};
use crate::sieve::PrimeTable;
use crate::stats::ValueHistogram;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn unit(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// `e(r/m)` after exact reduction of `r` modulo `m`.
#[inline]
pub fn unit_fraction(r: u64, m: u64) -> Complex64 {
    let r = r % m;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * r == m {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r == m {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * r == 3 * m {
        return Complex64::new(0.0, -1.0);
    }
    unit(r as f64 / m as f64)
}

/// Integer frequencies `(−A√L, A√L]` with `L = log log N` and `A = 4 L^{1/9}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFamily {
    pub n: u64,
    /// log log N.
    pub loglog: f64,
    pub a: f64,
    pub half_width: f64,
    pub lo: i64,
    pub hi: i64,
}

impl FrequencyFamily {
    pub fn new(n: u64) -> Result<Self> {
        if n < 16 {
            return contract(format!("frequency family needs log log N > 1, i.e. N ≥ 16; got {n}"));
        }
        let loglog = (n as f64).ln().ln();
        let a = 4.0 * loglog.powf(1.0 / 9.0);
        let half_width = a * loglog.sqrt();
        let lo = (-half_width).floor() as i64 + 1;
        let hi = half_width.floor() as i64;
        Ok(FrequencyFamily { n, loglog, a, half_width, lo, hi })
    }

    /// `|I|`.
    pub fn cardinality(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn contains(&self, xi: i64) -> bool {
        (self.lo..=self.hi).contains(&xi)
    }

    pub fn members(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// The frequency whose mode equals λ, when `|I|` is even.
    pub fn parity_frequency(&self) -> Option<i64> {
        let m = self.cardinality() as i64;
        (m % 2 == 0).then(|| {
            let half = m / 2;
            if self.contains(half) { half } else { -half }
        })
    }

    /// Threshold `A^{5/2}` separating small and large frequencies.
    pub fn large_threshold(&self) -> f64 {
        self.a.powf(2.5)
    }

    /// Round `x` and move it into `I` by a multiple of `|I|`; the modes are `|I|`-periodic in ξ.
    pub fn representative(&self, x: f64) -> i64 {
        let m = self.cardinality() as i64;
        let r = x.round() as i64;
        (r - self.lo).rem_euclid(m) + self.lo
    }

    /// Value of the mode ξ on primes, `e(ξ/|I|)`.
    pub fn prime_value(&self, xi: i64) -> Complex64 {
        let m = self.cardinality() as i64;
        unit_fraction(xi.rem_euclid(m) as u64, m as u64)
    }

    /// `e(ξ ℓ/|I|)`.
    pub fn mode(&self, xi: i64, ell: u32) -> Complex64 {
        let m = self.cardinality() as i64;
        unit_fraction((xi.rem_euclid(m) * ell as i64).rem_euclid(m) as u64, m as u64)
    }
}

/// Values on primes of a completely multiplicative function.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimeRule {
    /// `f(p) = c` for every prime.
    Constant(Complex64),
    /// Explicit values, with a default for primes not listed.
    Table { values: BTreeMap<u64, Complex64>, default: Complex64 },
    /// Unit-modulus values drawn from a hash of `(seed, p)`.
    Random { seed: u64 },
}

/// Completely multiplicative `f` with `f(p) = rule(p) · p^{it}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultFunSpec {
    rule: PrimeRule,
    t: f64,
    label: String,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl MultFunSpec {
    pub fn new(rule: PrimeRule, t: f64, label: impl Into<String>) -> Result<Self> {
        let check = |v: &Complex64| v.norm() <= 1.0 + 1e-12;
        let ok = match &rule {
            PrimeRule::Constant(c) => check(c),
            PrimeRule::Table { values, default } => check(default) && values.values().all(check),
            PrimeRule::Random { .. } => true,
        };
        if !ok {
            return contract("prime values must have modulus at most 1");
        }
        if !t.is_finite() {
            return contract("twist exponent must be finite");
        }
        Ok(MultFunSpec { rule, t, label: label.into() })
    }

    /// `f ≡ 1`.
    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0), "one")
    }

    /// `f(p) = −1`, i.e. λ.
    pub fn liouville() -> Self {
        Self::constant(Complex64::new(-1.0, 0.0), "liouville")
    }

    pub fn constant(c: Complex64, label: &str) -> Self {
        Self::new(PrimeRule::Constant(c), 0.0, label).expect("bounded constant")
    }

    /// The mode `n ↦ e(ξΩ(n)/|I|)`.
    pub fn frequency(xi: i64, family: &FrequencyFamily) -> Self {
        Self::constant(family.prime_value(xi), &format!("fourier-mode:{xi}"))
    }

    /// `n ↦ n^{it}`.
    pub fn archimedean(t: f64) -> Self {
        Self::new(PrimeRule::Constant(Complex64::new(1.0, 0.0)), t, format!("n^it:{t}")).expect("finite t")
    }

    pub fn random(seed: u64) -> Self {
        Self::new(PrimeRule::Random { seed }, 0.0, format!("random:{seed}")).expect("unit values")
    }

    pub fn with_twist(mut self, t: f64) -> Self {
        self.t += t;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn rule(&self) -> &PrimeRule {
        &self.rule
    }

    /// `Some(c)` when `f(p) = c` for every prime.
    pub fn constant_on_primes(&self) -> Option<Complex64> {
        match self.rule {
            PrimeRule::Constant(c) if self.t == 0.0 => Some(c),
            _ => None,
        }
    }

    #[inline]
    pub fn prime_value(&self, p: u64) -> Complex64 {
        let base = match &self.rule {
            PrimeRule::Constant(c) => *c,
            PrimeRule::Table { values, default } => values.get(&p).copied().unwrap_or(*default),
            PrimeRule::Random { seed } => {
                let h = splitmix(seed ^ splitmix(p));
                unit((h >> 11) as f64 / (1u64 << 53) as f64)
            }
        };
        if self.t == 0.0 {
            base
        } else {
            base * Complex64::from_polar(1.0, self.t * (p as f64).ln())
        }
    }
}

/// `f(n)` as the product of `f(p)^{a_p}` over the factorization found by trial division.
pub fn eval_multfun(spec: &MultFunSpec, n: u64) -> Result<Complex64> {
    if n == 0 {
        return contract("multiplicative functions are evaluated at n ≥ 1");
    }
    let mut m = n;
    let mut v = Complex64::new(1.0, 0.0);
    let mut d = 2u64;
    while d <= m / d {
        while m.is_multiple_of(d) {
            v *= spec.prime_value(d);
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        v *= spec.prime_value(m);
    }
    Ok(v)
}

/// Largest N for which [`mean_value`] tabulates a general function directly.
pub const DIRECT_MEAN_LIMIT: u64 = 20_000_000;

/// `𝔼_{n ≤ N} f(n)`.
///
/// Functions constant on primes depend on n only through Ω(n), so a histogram
/// of Ω on `[1, N]` answers them exactly; anything else is tabulated with a
/// smallest-prime-factor sieve.
pub fn mean_value(spec: &MultFunSpec, n: u64, omega: Option<&ValueHistogram>) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    if let (Some(c), Some(h)) = (spec.constant_on_primes(), omega) {
        if h.n() == n {
            let mut re = CompensatedSum::default();
            let mut im = CompensatedSum::default();
            let mut pw = Complex64::new(1.0, 0.0);
            for l in 0..=h.max_value() {
                let z = pw * h.density(l);
                re.add(z.re);
                im.add(z.im);
                pw *= c;
            }
            return Ok(Complex64::new(re.value(), im.value()));
        }
    }
    if n > DIRECT_MEAN_LIMIT {
        return Err(Error::Capacity(format!(
            "direct mean of a general multiplicative function limited to N ≤ {DIRECT_MEAN_LIMIT}"
        )));
    }
    let len = n as usize;
    let mut spf = vec![0u32; len + 1];
    let mut primes: Vec<u32> = Vec::new();
    let mut vals = vec![Complex64::new(0.0, 0.0); len + 1];
    vals[1] = Complex64::new(1.0, 0.0);
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    re.add(1.0);
    for i in 2..=len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
            vals[i] = spec.prime_value(i as u64);
        } else {
            let p = spf[i] as usize;
            vals[i] = vals[p] * vals[i / p];
        }
        for &p in &primes {
            let p = p as usize;
            if p > spf[i] as usize || p * i > len {
                break;
            }
            spf[p * i] = p as u32;
        }
        re.add(vals[i].re);
        im.add(vals[i].im);
    }
    Ok(Complex64::new(re.value(), im.value()) / n as f64)
}

fn require_primes(table: &PrimeTable, n: u64) -> Result<&[u64]> {
    if n < 2 {
        return contract(format!("prime sums need N ≥ 2, got {n}"));
    }
    if table.limit() < n {
        return contract(format!("prime table reaches {} but N = {n}", table.limit()));
    }
    Ok(table.up_to(n))
}

/// `𝔻(f, g; N)² = Σ_{p ≤ N} (1 − Re f(p) conj g(p)) / p`.
/// `1 − Re(z w̄)` written so that it vanishes exactly when `z = w` on the unit circle.
fn gap_term(z: Complex64, w: Complex64) -> f64 {
    0.5 * ((1.0 - z.norm_sqr()) + (1.0 - w.norm_sqr()) + (z - w).norm_sqr())
}

pub fn distance_sq(f: &MultFunSpec, g: &MultFunSpec, n: u64, table: &PrimeTable) -> Result<f64> {
    let primes = require_primes(table, n)?;
    let s: CompensatedSum = primes
        .iter()
        .map(|&p| gap_term(f.prime_value(p), g.prime_value(p)) / p as f64)
        .collect();
    Ok(s.value().max(0.0))
}

pub fn distance(f: &MultFunSpec, g: &MultFunSpec, n: u64, table: &PrimeTable) -> Result<f64> {
    Ok(distance_sq(f, g, n, table)?.sqrt())
}

/// `𝔻(f, χ n^{it}; N)` with `χ(p) = 0` for `p | q`.
pub fn twisted_distance(f: &MultFunSpec, chi: &TwistSpec, n: u64, table: &PrimeTable) -> Result<f64> {
    let primes = require_primes(table, n)?;
    let s: CompensatedSum =
        primes.iter().map(|&p| gap_term(f.prime_value(p), chi.eval(p)) / p as f64).collect();
    Ok(s.value().max(0.0).sqrt())
}

/// Symmetric grid of Archimedean exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    points: Vec<f64>,
}

impl TGrid {
    /// `0` and `±` a geometric ladder from `t_max·10^{-6}` to `t_max`, `points` values in all.
    pub fn symmetric_log(t_max: f64, points: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return contract(format!("t range {t_max} must be positive"));
        }
        let per_side = points.saturating_sub(1) / 2;
        let mut out = vec![0.0];
        if per_side > 0 {
            let t_min = t_max * 1e-6;
            let ratio = if per_side > 1 { (t_max / t_min).powf(1.0 / (per_side - 1) as f64) } else { 1.0 };
            let mut t = if per_side > 1 { t_min } else { t_max };
            for _ in 0..per_side {
                out.push(t);
                out.push(-t);
                t *= ratio;
            }
        }
        out.sort_by(f64::total_cmp);
        Ok(TGrid { points: out })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|t| !t.is_finite()) {
            return contract("grid points must be finite");
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(TGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t_max(&self) -> f64 {
        self.points.iter().fold(0.0, |m, t| m.max(t.abs()))
    }
}

/// `t ↦ 𝔻(f, n^{it}; N)²` over the primes up to N.
pub struct ArchimedeanDistance {
    reciprocal_sum: f64,
    zeta: PrimeZetaSum,
}

impl ArchimedeanDistance {
    /// `t_max` bounds the exponents that will be queried most often.
    pub fn new(f: &MultFunSpec, n: u64, table: &PrimeTable, t_max: f64) -> Result<Self> {
        let primes = require_primes(table, n)?;
        let coeffs: Vec<Complex64> = primes.iter().map(|&p| f.prime_value(p) / p as f64).collect();
        let reciprocal_sum = primes.iter().map(|&p| 1.0 / p as f64).collect::<CompensatedSum>().value();
        Ok(ArchimedeanDistance { reciprocal_sum, zeta: PrimeZetaSum::new(primes, coeffs, t_max) })
    }

    /// Since `f(p) conj(p^{it}) / p = f(p) p^{-1-it}`, the square distance is `Σ 1/p − Re Σ f(p) p^{-1-it}`.
    pub fn at(&self, t: f64) -> f64 {
        (self.reciprocal_sum - self.zeta.eval(t).re).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M0 {
    pub value: f64,
    pub argmin_t: f64,
}

/// `min_t 𝔻(f, n^{it}; N)²` over the grid, refined by golden section next to the best point.
pub fn m0(f: &MultFunSpec, n: u64, table: &PrimeTable, grid: &TGrid) -> Result<M0> {
    if grid.points().is_empty() {
        return contract("empty t grid");
    }
    let dist = ArchimedeanDistance::new(f, n, table, grid.t_max())?;
    m0_with(&dist, grid)
}

pub fn m0_with(dist: &ArchimedeanDistance, grid: &TGrid) -> Result<M0> {
    let pts = grid.points();
    if pts.is_empty() {
        return contract("empty t grid");
    }
    let values: Vec<f64> = pts.par_iter().map(|&t| dist.at(t)).collect();
    let (i, &best) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(pts[a.0].abs().total_cmp(&pts[b.0].abs())))
        .expect("nonempty");
    let mut out = M0 { value: best, argmin_t: pts[i] };
    if pts.len() >= 3 {
        let lo = pts[i.saturating_sub(1)];
        let hi = pts[(i + 1).min(pts.len() - 1)];
        let (t, v) = golden_min(|t| dist.at(t), lo, hi, 80);
        if v < out.value {
            out = M0 { value: v, argmin_t: t };
        }
    }
    Ok(out)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd { (c, fc) } else { (d, fd) }
}

/// Square distance of the mode ξ from `n^{it}` next to its closed-form approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaResidual {
    pub xi: i64,
    pub t: f64,
    pub dist_sq: f64,
    pub formula: f64,
    pub residual: f64,
}

/// `|𝔻(f_ξ, n^{it}; N)² − [(1 − cos θ) log log N + cos θ · log(1 + |t| log N)]|`, `θ = 2πξ/|I|`.
pub fn dist_formula_residual(
    xi: i64,
    n: u64,
    t: f64,
    family: &FrequencyFamily,
    table: &PrimeTable,
) -> Result<FormulaResidual> {
    if !family.contains(xi) {
        return contract(format!("ξ = {xi} outside I = [{}, {}]", family.lo, family.hi));
    }
    if t.abs() > 10.0 {
        return contract(format!("|t| = {} outside the audited range |t| ≤ 10", t.abs()));
    }
    let f = MultFunSpec::frequency(xi, family);
    let dist_sq = distance_sq(&f, &MultFunSpec::archimedean(t), n, table)?;
    let theta = std::f64::consts::TAU * xi as f64 / family.cardinality() as f64;
    let ln_n = (n as f64).ln();
    let formula = (1.0 - theta.cos()) * ln_n.ln() + theta.cos() * (1.0 + t.abs() * ln_n).ln();
    Ok(FormulaResidual { xi, t, dist_sq, formula, residual: (dist_sq - formula).abs() })
}

/// `max{π²ξ²/(2A²), π² log log N / A}`, the lower-bound shape for the infimum over small t.
pub fn small_t_lower_model(xi: i64, family: &FrequencyFamily) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    (pi2 * (xi * xi) as f64 / (2.0 * family.a * family.a)).max(pi2 * family.loglog / family.a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalaszAudit {
    pub mean: Complex64,
    pub m0: f64,
    pub argmin_t: f64,
    /// `exp(−M₀/16)`.
    pub bound: f64,
    /// `|mean| / bound`.
    pub ratio: f64,
}

/// Mean value of `f` against the mean-value bound with `|t| ≤ t_max`.
pub fn halasz_audit(
    f: &MultFunSpec,
    n: u64,
    table: &PrimeTable,
    grid: &TGrid,
    omega: Option<&ValueHistogram>,
) -> Result<HalaszAudit> {
    let mean = mean_value(f, n, omega)?;
    let m = m0(f, n, table, grid)?;
    let bound = (-m.value / 16.0).exp();
    Ok(HalaszAudit { mean, m0: m.value, argmin_t: m.argmin_t, bound, ratio: mean.norm() / bound })
}

/// `Σ_{ξ∈I, |ξ| > A^{5/2}} |𝔼 f_ξ|`, exact through the Ω histogram, and the member count.
pub fn large_frequency_mass(family: &FrequencyFamily, omega: &ValueHistogram) -> (f64, usize) {
    let thr = family.large_threshold();
    let mut total = CompensatedSum::default();
    let mut count = 0;
    for xi in family.members().filter(|xi| (*xi as f64).abs() > thr) {
        let mut z = Complex64::new(0.0, 0.0);
        for l in 0..=omega.max_value() {
            z += family.mode(xi, l as u32) * omega.density(l);
        }
        total.add(z.norm());
        count += 1;
    }
    (total.value(), count)
}

/// Smallest `𝔻(f, χ; N)² / log log N` over non-principal χ modulo `q ≤ q_max`, with the minimizing modulus.
pub fn character_distance_floor(f: &MultFunSpec, q_max: u64, n: u64, table: &PrimeTable) -> Result<(f64, u64)> {
    let primes = require_primes(table, n)?;
    let loglog = (n as f64).ln().ln();
    let fp: Vec<Complex64> = primes.iter().map(|&p| f.prime_value(p)).collect();
    let mut best = (f64::INFINITY, 0);
    for q in 2..=q_max {
        let group = CharacterGroup::new(q)?;
        let local: Vec<(f64, u64)> = (1..group.len())
            .into_par_iter()
            .map(|i| {
                let chi = group.get(i).expect("in range");
                let s: CompensatedSum = primes
                    .iter()
                    .zip(&fp)
                    .map(|(&p, v)| (1.0 - (v * chi.chi(p).conj()).re) / p as f64)
                    .collect();
                (s.value() / loglog, q)
            })
            .collect();
        for c in local {
            if c.0 < best.0 {
                best = c;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{enumerate_primes, factor_counts, CountMode, SieveConfig};
    use proptest::prelude::*;

    #[test]
    fn family_at_desk_scale() {
        let fam = FrequencyFamily::new(100_000_000).unwrap();
        assert!((fam.a - 4.0 * fam.loglog.powf(1.0 / 9.0)).abs() < 1e-15);
        assert!(fam.lo <= 0 && fam.hi >= 0);
        assert!((fam.lo as f64) > -fam.half_width && (fam.lo - 1) as f64 <= -fam.half_width);
        assert!((fam.hi as f64) <= fam.half_width && (fam.hi + 1) as f64 > fam.half_width);
        assert!(fam.members().all(|x| (x as f64).abs() <= fam.large_threshold()));
        assert_eq!(fam.representative(fam.hi as f64 + 1.0), fam.lo);
        assert_eq!(fam.representative(2.2), 2);
    }

    #[test]
    fn multfun_examples() {
        assert_eq!(eval_multfun(&MultFunSpec::one(), 360).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(eval_multfun(&MultFunSpec::liouville(), 8).unwrap().re, -1.0);
        assert_eq!(eval_multfun(&MultFunSpec::liouville(), 12).unwrap().re, -1.0);
        let fam = FrequencyFamily::new(1_000_000).unwrap();
        let f0 = MultFunSpec::frequency(0, &fam);
        assert_eq!(eval_multfun(&f0, 9_699_690).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn distance_examples() {
        let table = enumerate_primes(1000).unwrap();
        let lam = MultFunSpec::liouville();
        let one = MultFunSpec::one();
        assert_eq!(distance(&lam, &lam, 10, &table).unwrap(), 0.0);
        let d = distance(&lam, &one, 10, &table).unwrap();
        assert!((d - (2.0f64 * (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).sqrt()).abs() < 1e-14);
        assert!((d - 1.533_75).abs() < 1e-5);
        assert!(distance(&lam, &one, 2000, &table).is_err());
    }

    #[test]
    fn twisted_distance_mod_three() {
        let table = enumerate_primes(100).unwrap();
        let chi = dirichlet_characters(3).unwrap().get(1).unwrap();
        let d = twisted_distance(&MultFunSpec::one(), &chi, 10, &table).unwrap();
        assert!((d * d - (1.0 + 1.0 / 3.0 + 0.4)).abs() < 1e-14);
        assert!((d - 1.316_561).abs() < 1e-6);
        let d = twisted_distance(&MultFunSpec::one(), &TwistSpec::trivial(), 10, &table).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn m0_finds_its_own_twist() {
        let table = enumerate_primes(100_000).unwrap();
        let grid = TGrid::symmetric_log(100_000f64.ln(), 2001).unwrap();
        let t0 = grid.points()[1500];
        let f = MultFunSpec::archimedean(t0);
        let m = m0(&f, 100_000, &table, &grid).unwrap();
        assert!(m.value < 1e-12, "{m:?}");
        assert!((m.argmin_t - t0).abs() < 1e-6);
        let lam = m0(&MultFunSpec::liouville(), 100_000, &table, &grid).unwrap();
        let at_zero = distance_sq(&MultFunSpec::liouville(), &MultFunSpec::one(), 100_000, &table).unwrap();
        assert!(lam.value >= 0.0 && lam.value <= at_zero + 1e-12);
        assert!(m0(&f, 100, &table, &TGrid::from_points(vec![]).unwrap()).is_err());
    }

    #[test]
    fn bucketed_distance_matches_direct() {
        let table = enumerate_primes(1_000_000).unwrap();
        let fam = FrequencyFamily::new(1_000_000).unwrap();
        let f = MultFunSpec::frequency(3, &fam);
        let fast = ArchimedeanDistance::new(&f, 1_000_000, &table, 14.0).unwrap();
        for t in [0.0, 0.01, 0.5, -3.0, 13.9] {
            let direct = distance_sq(&f, &MultFunSpec::archimedean(t), 1_000_000, &table).unwrap();
            assert!((fast.at(t) - direct).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn formula_residual_examples() {
        let table = enumerate_primes(1_000_000).unwrap();
        let fam = FrequencyFamily::new(1_000_000).unwrap();
        let r = dist_formula_residual(0, 1_000_000, 0.0, &fam, &table).unwrap();
        assert!(r.residual < 1e-12);
        let r = dist_formula_residual(0, 1_000_000, 1.0, &fam, &table).unwrap();
        assert!(r.residual <= 5.0, "{r:?}");
        assert!(dist_formula_residual(fam.hi + 1, 1_000_000, 0.0, &fam, &table).is_err());
        assert!(dist_formula_residual(0, 1_000_000, 11.0, &fam, &table).is_err());
    }

    #[test]
    fn halasz_for_one_is_tight() {
        let table = enumerate_primes(10_000).unwrap();
        let grid = TGrid::symmetric_log(10_000f64.ln(), 101).unwrap();
        let h = halasz_audit(&MultFunSpec::one(), 10_000, &table, &grid, None).unwrap();
        assert!((h.mean.re - 1.0).abs() < 1e-14);
        assert!(h.m0.abs() < 1e-12);
        assert!((h.ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mean_routes_agree() {
        let block = factor_counts(1, 100_001, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        let hist = ValueHistogram::from_block(&block, 100_000).unwrap();
        let fam = FrequencyFamily::new(100_000).unwrap();
        for f in [MultFunSpec::liouville(), MultFunSpec::frequency(2, &fam)] {
            let fast = mean_value(&f, 100_000, Some(&hist)).unwrap();
            let slow = mean_value(&f, 100_000, None).unwrap();
            assert!((fast - slow).norm() < 1e-12);
        }
    }

    #[test]
    fn parity_mode_is_liouville() {
        for n in [100_000u64, 100_000_000] {
            let fam = FrequencyFamily::new(n).unwrap();
            if let Some(xi) = fam.parity_frequency() {
                let f = MultFunSpec::frequency(xi, &fam);
                for m in 1..2000u64 {
                    assert_eq!(eval_multfun(&f, m).unwrap(), eval_multfun(&MultFunSpec::liouville(), m).unwrap());
                }
            }
        }
    }

    fn table_small() -> &'static PrimeTable {
        use std::sync::OnceLock;
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| enumerate_primes(10_000).unwrap())
    }

    proptest! {
        #[test]
        fn modes_are_completely_multiplicative(m in 1u64..=10_000, n in 1u64..=10_000, xi in -6i64..=6) {
            let fam = FrequencyFamily::new(100_000_000).unwrap();
            let f = MultFunSpec::frequency(fam.representative(xi as f64), &fam);
            let lhs = eval_multfun(&f, m * n).unwrap();
            let rhs = eval_multfun(&f, m).unwrap() * eval_multfun(&f, n).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn distance_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), n in 2u64..=10_000) {
            let t = table_small();
            let (f, g, h) = (MultFunSpec::random(a), MultFunSpec::random(b), MultFunSpec::random(c));
            prop_assert!(distance(&f, &f, n, t).unwrap() < 1e-7);
            let fg = distance(&f, &g, n, t).unwrap();
            prop_assert!((fg - distance(&g, &f, n, t).unwrap()).abs() < 1e-12);
            prop_assert!(fg <= distance(&f, &h, n, t).unwrap() + distance(&h, &g, n, t).unwrap() + 1e-9);
        }

        #[test]
        fn distance_grows_with_n(a in any::<u64>(), n1 in 2u64..=10_000, n2 in 2u64..=10_000) {
            let t = table_small();
            let (lo, hi) = (n1.min(n2), n1.max(n2));
            let f = MultFunSpec::random(a);
            let g = MultFunSpec::liouville();
            prop_assert!(distance(&f, &g, lo, t).unwrap() <= distance(&f, &g, hi, t).unwrap() + 1e-15);
        }
    }
}
