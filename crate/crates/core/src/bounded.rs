//! Bounded test functions of the factor count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::pretentious::FrequencyFamily;

/// Largest tabulated argument; Ω(n) ≤ 61 for n < 2^62.
pub const TABLE_MAX: usize = 64;

/// A map `ℓ ↦ a(ℓ)` with `|a(ℓ)| ≤ bound`, tabulated on `0..=64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedFunction {
    bound: f64,
    values: Vec<Complex64>,
    default_value: Complex64,
    label: String,
}

impl BoundedFunction {
    /// Checks every modulus against `bound`. Arguments outside the table map to `default_value`.
    pub fn new(label: impl Into<String>, bound: f64, values: Vec<Complex64>, default_value: Complex64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return contract(format!("bound {bound} must be positive"));
        }
        if values.len() > TABLE_MAX + 1 {
            return contract(format!("table longer than {} entries", TABLE_MAX + 1));
        }
        let tol = bound + 1e-12;
        if let Some((l, v)) = values.iter().enumerate().find(|(_, v)| !(v.norm() <= tol)) {
            return contract(format!("|a({l})| = {} exceeds bound {bound}", v.norm()));
        }
        if !(default_value.norm() <= tol) {
            return contract(format!("default value {default_value} exceeds bound {bound}"));
        }
        let mut values = values;
        values.resize(TABLE_MAX + 1, default_value);
        Ok(BoundedFunction { bound, values, default_value, label: label.into() })
    }

    /// 1-bounded function from a closure on `0..=64`, default 0.
    pub fn from_fn(label: impl Into<String>, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new(label, 1.0, (0..=TABLE_MAX).map(f).collect(), Complex64::new(0.0, 0.0))
    }

    /// `ℓ ↦ (−1)^ℓ`.
    pub fn parity() -> Self {
        Self::from_fn("parity", |l| Complex64::new(if l % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).unwrap()
    }

    pub fn constant(c: Complex64) -> Self {
        let bound = c.norm().max(1.0);
        let mut f = Self::new("const", bound, vec![c; TABLE_MAX + 1], Complex64::new(0.0, 0.0)).unwrap();
        f.label = if c == Complex64::new(1.0, 0.0) { "const".into() } else { format!("const:{c}") };
        f
    }

    /// `𝟙[ℓ = target]`.
    pub fn indicator(target: usize) -> Result<Self> {
        if target > TABLE_MAX {
            return contract(format!("indicator index {target} above {TABLE_MAX}"));
        }
        Self::from_fn(format!("indicator:{target}"), |l| Complex64::new((l == target) as u8 as f64, 0.0))
    }

    /// `ℓ ↦ e(ξℓ/|I|)` for the frequency family of `N`.
    pub fn fourier_mode(xi: i64, family: &FrequencyFamily) -> Self {
        let m = family.cardinality() as i64;
        Self::from_fn(format!("fourier-mode:{xi}"), |l| {
            let r = (xi * l as i64).rem_euclid(m);
            crate::pretentious::unit_fraction(r as u64, m as u64)
        })
        .unwrap()
    }

    /// Values uniform on the closed unit disc from a seeded ChaCha stream.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(format!("random:{seed}"), |_| {
            let r: f64 = rng.random::<f64>().sqrt();
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(r, theta)
        })
        .unwrap()
    }

    /// Parse `parity`, `const`, `const:<re>`, `indicator:<l>`, `fourier-mode:<xi>` or `random:<seed>`.
    pub fn from_preset(spec: &str, n: u64) -> Result<Self> {
        let (name, arg) = match spec.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (spec.trim(), None),
        };
        let bad = || Error::UnknownPreset(spec.to_string());
        match (name, arg) {
            ("parity", None) | ("liouville", None) => Ok(Self::parity()),
            ("const", None) | ("one", None) => Ok(Self::constant(Complex64::new(1.0, 0.0))),
            ("const", Some(v)) => Ok(Self::constant(Complex64::new(v.parse().map_err(|_| bad())?, 0.0))),
            ("indicator", Some(v)) => Self::indicator(v.parse().map_err(|_| bad())?),
            ("fourier-mode", Some(v)) => {
                let xi: i64 = v.parse().map_err(|_| bad())?;
                Ok(Self::fourier_mode(xi, &FrequencyFamily::new(n)?))
            }
            ("random", Some(v)) => Ok(Self::random(v.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }

    #[inline]
    pub fn eval(&self, l: i64) -> Complex64 {
        if (0..=TABLE_MAX as i64).contains(&l) {
            self.values[l as usize]
        } else {
            self.default_value
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn default_value(&self) -> Complex64 {
        self.default_value
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest stored modulus.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(self.default_value.norm(), f64::max)
    }

    pub fn conj(&self) -> Self {
        BoundedFunction {
            bound: self.bound,
            values: self.values.iter().map(|v| v.conj()).collect(),
            default_value: self.default_value.conj(),
            label: format!("conj({})", self.label),
        }
    }

    /// True when every tabulated value equals the first one.
    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_evaluate() {
        let p = BoundedFunction::parity();
        assert_eq!(p.eval(0).re, 1.0);
        assert_eq!(p.eval(3).re, -1.0);
        assert_eq!(p.eval(-1), Complex64::new(0.0, 0.0));
        let i = BoundedFunction::from_preset("indicator:2", 100).unwrap();
        assert_eq!(i.eval(2).re, 1.0);
        assert_eq!(i.eval(3).re, 0.0);
        assert!(BoundedFunction::from_preset("const", 10).unwrap().is_constant());
        assert!(matches!(BoundedFunction::from_preset("sawtooth", 10), Err(Error::UnknownPreset(_))));
        assert!(matches!(BoundedFunction::from_preset("indicator:x", 10), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn random_is_seeded_and_bounded() {
        let a = BoundedFunction::random(7);
        assert_eq!(a, BoundedFunction::random(7));
        assert_ne!(a, BoundedFunction::random(8));
        assert!(a.sup_norm() <= 1.0);
    }

    #[test]
    fn bound_is_enforced() {
        let too_big = vec![Complex64::new(0.0, 1.5)];
        assert!(BoundedFunction::new("x", 1.0, too_big.clone(), Complex64::new(0.0, 0.0)).is_err());
        assert!(BoundedFunction::new("x", 2.0, too_big, Complex64::new(0.0, 0.0)).is_ok());
        assert!(BoundedFunction::new("x", 1.0, vec![], Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn fourier_mode_half_is_parity() {
        let fam = FrequencyFamily::new(100_000_000).unwrap();
        if fam.cardinality().is_multiple_of(2) {
            let half = BoundedFunction::fourier_mode(fam.cardinality() as i64 / 2, &fam);
            let par = BoundedFunction::parity();
            for l in 0..=64 {
                assert!((half.eval(l) - par.eval(l)).norm() < 1e-15);
            }
        }
        let zero = BoundedFunction::fourier_mode(0, &fam);
        assert!(zero.is_constant());
    }
}
