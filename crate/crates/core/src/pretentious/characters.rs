//! Dirichlet characters built from generators of `(ℤ/qℤ)*`.
//!
//! Each prime-power factor `p^e` of `q` contributes cyclic components: one
//! generated by a primitive root when `p` is odd, and for `p = 2` the
//! subgroup `⟨−1⟩ × ⟨5⟩` (or less when `e ≤ 2`). A residue is stored as its
//! vector of discrete logarithms, so character values are exact roots of
//! unity `e(r/L)` with `L` the group exponent.

use num_complex::Complex64;

use super::unit_fraction;
use crate::error::{contract, Result};

const NOT_A_UNIT: u32 = u32::MAX;

/// Largest modulus [`CharacterGroup::new`] accepts.
pub const MAX_MODULUS: u64 = 1_000_000;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn primitive_root_mod_p(p: u64) -> u64 {
    let phi = p - 1;
    let factors = factorize(phi);
    (2..p).find(|&g| factors.iter().all(|&(r, _)| pow_mod(g, phi / r, p) != 1)).unwrap_or(1)
}

/// One cyclic factor: residues modulo `modulus` with `log[a]` the exponent of the generator.
#[derive(Debug, Clone)]
struct Component {
    modulus: u64,
    order: u64,
    log: Vec<u32>,
}

fn components_for(p: u64, e: u32) -> Vec<Component> {
    let m = p.pow(e);
    if p == 2 {
        if e == 1 {
            return Vec::new();
        }
        let mut sign = vec![NOT_A_UNIT; m as usize];
        let mut five = vec![NOT_A_UNIT; m as usize];
        let five_order = if e == 2 { 1 } else { 1u64 << (e - 2) };
        let mut pw = 1u64;
        for t in 0..five_order {
            sign[pw as usize] = 0;
            five[pw as usize] = t as u32;
            let neg = (m - pw) % m;
            sign[neg as usize] = 1;
            five[neg as usize] = t as u32;
            pw = pw * 5 % m;
        }
        let mut out = vec![Component { modulus: m, order: 2, log: sign }];
        if five_order > 1 {
            out.push(Component { modulus: m, order: five_order, log: five });
        }
        return out;
    }
    let mut g = primitive_root_mod_p(p);
    if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    let order = m / p * (p - 1);
    let mut log = vec![NOT_A_UNIT; m as usize];
    let mut x = 1u64;
    for k in 0..order {
        log[x as usize] = k as u32;
        x = x * g % m;
    }
    vec![Component { modulus: m, order, log }]
}

/// A character table together with an Archimedean exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistSpec {
    modulus: u64,
    values: Vec<Complex64>,
    t: f64,
    principal: bool,
}

impl TwistSpec {
    /// Validate a user table: `χ(1) = 1`, zero exactly off the units,
    /// roots of unity of order dividing `φ(q)` on the units, and complete
    /// multiplicativity modulo `q`.
    pub fn new(modulus: u64, values: Vec<Complex64>, t: f64) -> Result<Self> {
        if modulus == 0 {
            return contract("modulus must be positive");
        }
        if values.len() as u64 != modulus {
            return contract(format!("table has {} entries for modulus {modulus}", values.len()));
        }
        if !t.is_finite() {
            return contract("twist exponent must be finite");
        }
        let q = modulus;
        let phi = (0..q).filter(|&a| gcd(a, q) == 1).count() as i32;
        let at = |a: u64| values[(a % q) as usize];
        if (at(1) - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return contract("character must send 1 to 1");
        }
        for a in 0..q {
            let v = at(a);
            if gcd(a, q) != 1 {
                if v != Complex64::new(0.0, 0.0) {
                    return contract(format!("χ({a}) must vanish since gcd({a}, {q}) > 1"));
                }
            } else if (v.powi(phi) - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                return contract(format!("χ({a}) = {v} is not a root of unity of order dividing {phi}"));
            }
        }
        let pairs: Box<dyn Iterator<Item = (u64, u64)>> = if q <= 1000 {
            Box::new((0..q).flat_map(move |a| (0..q).map(move |b| (a, b))))
        } else {
            let mut s = 0x9E37_79B9_7F4A_7C15u64;
            Box::new((0..200_000).map(move |_| {
                s = s.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
                ((s >> 33) % q, (s >> 11) % q)
            }))
        };
        for (a, b) in pairs {
            if (at(a * b) - at(a) * at(b)).norm() > 1e-9 {
                return contract(format!("χ({a}·{b}) ≠ χ({a})χ({b})"));
            }
        }
        let principal = (0..q).all(|a| gcd(a, q) != 1 || (at(a) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        Ok(TwistSpec { modulus, values, t, principal })
    }

    /// The only character modulo 1.
    pub fn trivial() -> Self {
        TwistSpec { modulus: 1, values: vec![Complex64::new(1.0, 0.0)], t: 0.0, principal: true }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn chi(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// `χ(n) n^{it}`.
    pub fn eval(&self, n: u64) -> Complex64 {
        let c = self.chi(n);
        if self.t == 0.0 || c == Complex64::new(0.0, 0.0) {
            c
        } else {
            c * Complex64::from_polar(1.0, self.t * (n as f64).ln())
        }
    }

    /// `residue,re,im` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "residue,re,im")?;
        for (a, v) in self.values.iter().enumerate() {
            writeln!(w, "{a},{}", crate::io::fmt_complex(*v))?;
        }
        Ok(())
    }
}

/// All `φ(q)` characters modulo `q`, produced one at a time.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    q: u64,
    orders: Vec<u64>,
    exponent: u64,
    /// `logs[a * gens + j]`, or `NOT_A_UNIT`.
    logs: Vec<u32>,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return contract("modulus q must be positive");
        }
        if q > MAX_MODULUS {
            return Err(crate::error::Error::Capacity(format!("modulus {q} above {MAX_MODULUS}")));
        }
        let comps: Vec<Component> = factorize(q).into_iter().flat_map(|(p, e)| components_for(p, e)).collect();
        let orders: Vec<u64> = comps.iter().map(|c| c.order).collect();
        let exponent = orders.iter().fold(1u64, |acc, &o| acc / gcd(acc, o) * o);
        let gens = comps.len();
        let mut logs = vec![NOT_A_UNIT; q as usize * gens.max(1)];
        for a in 0..q {
            if gcd(a, q) != 1 {
                continue;
            }
            for (j, c) in comps.iter().enumerate() {
                logs[a as usize * gens + j] = c.log[(a % c.modulus) as usize];
            }
            if gens == 0 {
                logs[a as usize] = 0;
            }
        }
        Ok(CharacterGroup { q, orders, exponent, logs })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `φ(q)`.
    pub fn len(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponents `(k_j)` of the character with mixed-radix index `index`; index 0 is principal.
    fn digits(&self, mut index: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let d = index as u64 % o;
                index /= o as usize;
                d
            })
            .collect()
    }

    pub fn get(&self, index: usize) -> Option<TwistSpec> {
        if index >= self.len() {
            return None;
        }
        let k = self.digits(index);
        let gens = self.orders.len();
        let values = (0..self.q as usize)
            .map(|a| {
                if gens == 0 {
                    return if self.logs[a] == NOT_A_UNIT { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0, 0.0) };
                }
                let row = &self.logs[a * gens..(a + 1) * gens];
                if row[0] == NOT_A_UNIT {
                    return Complex64::new(0.0, 0.0);
                }
                let mut r = 0u64;
                for j in 0..gens {
                    let scale = self.exponent / self.orders[j];
                    r = (r + k[j] * row[j] as u64 % self.orders[j] * scale) % self.exponent;
                }
                unit_fraction(r, self.exponent)
            })
            .collect();
        Some(TwistSpec { modulus: self.q, values, t: 0.0, principal: index == 0 })
    }

    pub fn iter(&self) -> impl Iterator<Item = TwistSpec> + '_ {
        (0..self.len()).map(|i| self.get(i).expect("index in range"))
    }
}

/// Every character modulo `q`, lazily.
pub fn dirichlet_characters(q: u64) -> Result<CharacterGroup> {
    CharacterGroup::new(q)
}
