//! Fast evaluation of `Z(t) = Σ_p c_p p^{-it}` over many values of `t`.
//!
//! Primes are grouped into buckets of width `δ` in `log p`. Inside a bucket
//! centred at `u`, `p^{-it} = e^{-itu} · e^{-it(log p − u)}` and the second
//! factor is expanded in a Taylor series whose moments are precomputed. With
//! `|t| δ / 2 ≤ 1/2` twenty terms leave an error far below `f64` resolution.
//! When the bucket count would approach the prime count the direct sum is
//! used instead.

use num_complex::Complex64;

use crate::averaging::CompensatedSum;

const TERMS: usize = 24;

#[derive(Debug, Clone)]
struct Buckets {
    width: f64,
    centers: Vec<f64>,
    /// `moments[b][k] = Σ_{p∈b} c_p (log p − u_b)^k / k!`
    moments: Vec<[Complex64; TERMS]>,
}

/// Weighted prime sum `Σ c_p p^{-it}` with optional bucketed evaluation.
#[derive(Debug, Clone)]
pub struct PrimeZetaSum {
    logs: Vec<f64>,
    coeffs: Vec<Complex64>,
    t_max: f64,
    buckets: Option<Buckets>,
}

impl PrimeZetaSum {
    /// `primes` and `coeffs` run in parallel; `t_max` is the largest `|t|` the
    /// bucketed route must cover.
    pub fn new(primes: &[u64], coeffs: Vec<Complex64>, t_max: f64) -> Self {
        assert_eq!(primes.len(), coeffs.len());
        let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let buckets = Self::build_buckets(&logs, &coeffs, t_max);
        PrimeZetaSum { logs, coeffs, t_max, buckets }
    }

    fn build_buckets(logs: &[f64], coeffs: &[Complex64], t_max: f64) -> Option<Buckets> {
        if logs.is_empty() || !(t_max.is_finite()) {
            return None;
        }
        let lo = logs[0];
        let hi = *logs.last().unwrap();
        let width = if t_max > 0.0 { 1.0 / t_max } else { hi - lo + 1.0 };
        let count = ((hi - lo) / width).floor() as usize + 1;
        if count.saturating_mul(TERMS) > logs.len() {
            return None;
        }
        let centers: Vec<f64> = (0..count).map(|b| lo + (b as f64 + 0.5) * width).collect();
        let mut moments = vec![[Complex64::new(0.0, 0.0); TERMS]; count];
        for (&lp, &c) in logs.iter().zip(coeffs) {
            let b = (((lp - lo) / width) as usize).min(count - 1);
            let d = lp - centers[b];
            let mut term = c;
            for (k, m) in moments[b].iter_mut().enumerate() {
                *m += term;
                term *= d / (k + 1) as f64;
            }
        }
        Some(Buckets { width, centers, moments })
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    /// True when `eval` will use the bucketed expansion for this `t`.
    pub fn is_bucketed(&self, t: f64) -> bool {
        self.buckets.is_some() && t.abs() <= self.t_max
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match &self.buckets {
            Some(b) if t.abs() <= self.t_max => Self::eval_buckets(b, t),
            _ => self.eval_direct(t),
        }
    }

    /// Term-by-term sum over every prime.
    pub fn eval_direct(&self, t: f64) -> Complex64 {
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for (&lp, &c) in self.logs.iter().zip(&self.coeffs) {
            let (s, co) = (-t * lp).sin_cos();
            let z = c * Complex64::new(co, s);
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }

    fn eval_buckets(b: &Buckets, t: f64) -> Complex64 {
        debug_assert!(t.abs() * b.width <= 1.0 + 1e-12);
        let mut powers = [Complex64::new(0.0, 0.0); TERMS];
        let step = Complex64::new(0.0, -t);
        let mut p = Complex64::new(1.0, 0.0);
        for slot in powers.iter_mut() {
            *slot = p;
            p *= step;
        }
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for (u, m) in b.centers.iter().zip(&b.moments) {
            let mut inner = Complex64::new(0.0, 0.0);
            for k in (0..TERMS).rev() {
                inner += powers[k] * m[k];
            }
            let (s, c) = (-t * u).sin_cos();
            let z = Complex64::new(c, s) * inner;
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }
}
