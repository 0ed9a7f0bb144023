//! Slow, independent reference implementations.
//!
//! Nothing here calls into the sieve or the fast averaging code: factor
//! counts come from trial division and sums from a local Kahan accumulator.
//! Agreement between this module and
//! the fast paths is therefore evidence rather than tautology.

use num_complex::Complex64;

use crate::averaging::WeightKind;
use crate::bounded::BoundedFunction;
use crate::error::{contract, Error, Result};

/// Largest range the brute-force routines accept.
pub const ORACLE_LIMIT: u64 = 1_000_000;

/// Ω(n) by trial division.
pub fn big_omega(n: u64) -> u32 {
    let mut m = n;
    let mut count = 0;
    while m.is_multiple_of(2) && m > 0 {
        m /= 2;
        count += 1;
    }
    let mut d = 3u64;
    while d <= m / d {
        while m.is_multiple_of(d) {
            m /= d;
            count += 1;
        }
        d += 2;
    }
    if m > 1 {
        count += 1;
    }
    count
}

/// Distinct prime divisors `≤ cutoff` of `n` (all of them when `cutoff` is infinite).
pub fn distinct_prime_factors(n: u64, cutoff: f64) -> u32 {
    let mut m = n;
    let mut count = 0;
    let mut d = 2u64;
    while d <= m / d {
        if m.is_multiple_of(d) {
            if d as f64 <= cutoff {
                count += 1;
            }
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 && m as f64 <= cutoff {
        count += 1;
    }
    count
}

/// ω(n) by trial division.
pub fn small_omega(n: u64) -> u32 {
    distinct_prime_factors(n, f64::INFINITY)
}

/// Primality by trial division.
pub fn is_prime(n: u64) -> bool {
    n >= 2 && big_omega(n) == 1
}

#[derive(Default)]
struct Kahan {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl Kahan {
    fn add(&mut self, z: Complex64) {
        let y = z.re - self.re_c;
        let t = self.re + y;
        self.re_c = (t - self.re) - y;
        self.re = t;
        let y = z.im - self.im_c;
        let t = self.im + y;
        self.im_c = (t - self.im) - y;
        self.im = t;
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn weight(kind: WeightKind, n: u64) -> f64 {
    match kind {
        WeightKind::Cesaro => 1.0,
        WeightKind::Logarithmic => 1.0 / n as f64,
    }
}

/// Direct loop for `𝔼 a(Ω(n)) b(Ω(n+h))` over `n ≤ n_max`.
pub fn brute_correlation(
    a: &BoundedFunction,
    b: &BoundedFunction,
    n_max: u64,
    shift: u64,
    kind: WeightKind,
) -> Result<Complex64> {
    if n_max > ORACLE_LIMIT {
        return Err(Error::Capacity(format!("oracle correlation limited to N ≤ {ORACLE_LIMIT}, got {n_max}")));
    }
    if n_max == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    let mut num = Kahan::default();
    let mut mass = Kahan::default();
    for n in 1..=n_max {
        let w = weight(kind, n);
        let v = a.eval(big_omega(n) as i64) * b.eval(big_omega(n + shift) as i64);
        num.add(v * w);
        mass.add(Complex64::new(w, 0.0));
    }
    Ok(num.total() / mass.total().re)
}

/// Direct weighted average of `f(n)` over `n ≤ n_max`.
pub fn brute_average(f: impl Fn(u64) -> Complex64, n_max: u64, kind: WeightKind) -> Complex64 {
    let mut num = Kahan::default();
    let mut mass = 0.0;
    let mut mass_c = 0.0;
    for n in 1..=n_max {
        let w = weight(kind, n);
        num.add(f(n) * w);
        let y = w - mass_c;
        let t = mass + y;
        mass_c = (t - mass) - y;
        mass = t;
    }
    num.total() / mass
}

/// One term `v · 𝟙[n ≡ residue mod modulus]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicTerm {
    pub coefficient: Complex64,
    pub modulus: u64,
    pub residue: u64,
}

/// Linear combination of congruence indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCombo {
    terms: Vec<PeriodicTerm>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PeriodicCombo {
    pub fn new(terms: Vec<PeriodicTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyDomain("periodic combination without terms".into()));
        }
        for t in &terms {
            if t.modulus == 0 {
                return contract("modulus must be positive");
            }
            if t.coefficient.norm() > 1.0 + 1e-12 {
                return contract(format!("coefficient {} has modulus above 1", t.coefficient));
            }
        }
        Ok(PeriodicCombo { terms })
    }

    /// `𝟙[n ≡ residue mod modulus]`.
    pub fn indicator(modulus: u64, residue: u64) -> Result<Self> {
        Self::new(vec![PeriodicTerm { coefficient: Complex64::new(1.0, 0.0), modulus, residue }])
    }

    pub fn terms(&self) -> &[PeriodicTerm] {
        &self.terms
    }

    /// Least common multiple of the moduli.
    pub fn period(&self) -> u64 {
        self.terms.iter().fold(1, |acc, t| acc / gcd(acc, t.modulus) * t.modulus)
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| n % t.modulus == t.residue % t.modulus)
            .map(|t| t.coefficient)
            .sum()
    }
}

/// Result of comparing `𝔼 fg` with `𝔼f · 𝔼g` for coprime periods.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceCheck {
    pub lhs: Complex64,
    pub product: Complex64,
    /// `|lhs − product| · N / (k ℓ)` with `k, ℓ` the term counts.
    pub scaled_error: f64,
}

pub fn periodic_independence_check(f: &PeriodicCombo, g: &PeriodicCombo, n_max: u64) -> Result<IndependenceCheck> {
    if n_max == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    let (r, s) = (f.period(), g.period());
    if gcd(r, s) != 1 {
        return contract(format!("periods {r} and {s} are not coprime"));
    }
    let mut fg = Kahan::default();
    let mut sf = Kahan::default();
    let mut sg = Kahan::default();
    for n in 1..=n_max {
        let (x, y) = (f.eval(n), g.eval(n));
        fg.add(x * y);
        sf.add(x);
        sg.add(y);
    }
    let nn = n_max as f64;
    let lhs = fg.total() / nn;
    // one rounding on each side, so integer coefficients give an exact zero at full periods
    let product = (sf.total() * sg.total()) / (nn * nn);
    let terms = (f.terms.len() * g.terms.len()) as f64;
    Ok(IndependenceCheck { lhs, product, scaled_error: (lhs - product).norm() * nn / terms })
}

/// Second-moment (or first-moment) combination for a prime pair `p, q`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    /// `|𝔼_n X(n+p, n+q)^k − 2𝔼_{m,n} X(m,n)^k + 𝔼_{m,l} X(m,l)^k|`.
    pub value: f64,
    /// `𝔼_n X(n+p, n+q)^k`.
    pub shifted: f64,
    /// `𝔼_{m,n} X(m,n)^k`; with both ranges equal to `[N]` the last two averages coincide.
    pub independent: f64,
    /// Prediction from independent residues: `|Σ 2/r² − Σ_{r | p−q} 2/r|` for k = 2, zero for k = 1.
    pub model: f64,
    /// `Σ_{r | p−q, r ≤ cutoff} 2/r`, the leading structure of the prediction.
    pub divisor_part: f64,
}

/// Full enumeration of the moment combination with `X(a,b) = Σ_{r ≤ cutoff} 𝟙[r|a] − 𝟙[r|b]`
/// over primes `r`, `m, n, l ∈ [N]`.
pub fn moment_identity_check(k: u32, n_max: u64, p: u64, q: u64, cutoff: u64) -> Result<MomentCheck> {
    if !(1..=2).contains(&k) {
        return contract(format!("moment order {k} not in {{1, 2}}"));
    }
    if n_max > 100_000 {
        return Err(Error::Capacity(format!("moment check limited to N ≤ 10^5, got {n_max}")));
    }
    if n_max == 0 {
        return Err(Error::EmptyDomain("N = 0".into()));
    }
    let primes: Vec<u64> = (2..=cutoff).filter(|&r| is_prime(r)).collect();
    let y = |n: u64| primes.iter().filter(|&&r| n.is_multiple_of(r)).count() as i64;

    // Shifted average, exact in integers.
    let mut shifted: i128 = 0;
    for n in 1..=n_max {
        let d = y(n + p) - y(n + q);
        shifted += (d as i128).pow(k);
    }
    // Independent pairs through the value distribution of y on [N].
    let mut hist = vec![0i128; primes.len() + 1];
    for n in 1..=n_max {
        hist[y(n) as usize] += 1;
    }
    let mut independent: i128 = 0;
    for (i, &ci) in hist.iter().enumerate() {
        for (j, &cj) in hist.iter().enumerate() {
            independent += ci * cj * ((i as i128) - (j as i128)).pow(k);
        }
    }
    let nn = n_max as f64;
    let shifted = shifted as f64 / nn;
    let independent = independent as f64 / (nn * nn);
    let value = (shifted - 2.0 * independent + independent).abs();

    let gap = p.abs_diff(q);
    let divisor_part: f64 = primes.iter().filter(|&&r| gap.is_multiple_of(r)).map(|&r| 2.0 / r as f64).sum();
    let model = if k == 2 {
        let squares: f64 = primes.iter().map(|&r| 2.0 / (r * r) as f64).sum();
        (squares - divisor_part).abs()
    } else {
        0.0
    };
    Ok(MomentCheck { value, shifted, independent, model, divisor_part })
}
