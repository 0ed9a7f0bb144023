//! Segmented computation of prime-factor counts.
//!
//! Every statistic in this crate is an average of some function of Ω(n),
//! ω(n) or a truncated ω over a long range of integers, so this module is
//! the hot path. A block is split into fixed-length segments; each segment
//! sieves by every prime power `p^k` with `p ≤ √(hi-1)` while accumulating
//! the product of the small prime powers it found. Whatever is left over
//! (`n / product > 1`) is a single prime larger than the square root, which
//! contributes one more factor. No division happens in the inner loops.
//!
//! Segments are independent and each `n` lives in exactly one of them, so
//! the result is the same for any segment length or worker count.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{contract, Error, Result};

pub use crate::oracle::big_omega as omega_oracle;

/// Largest admissible exclusive upper bound of a block.
pub const MAX_BLOCK_END: u64 = 1 << 62;

const DEFAULT_SEGMENT: usize = 1 << 16;

/// Ascending list of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `≤ x` as a prefix slice.
    pub fn up_to(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }

    /// Primes in the closed interval `[lo, hi]`.
    pub fn in_range(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p < lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    /// Membership test; only meaningful for `n ≤ limit`.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// All primes `≤ limit`, by an odd-only segmented sieve of Eratosthenes.
pub fn enumerate_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyDomain(format!("no primes below {limit}")));
    }
    if limit >= MAX_BLOCK_END {
        return Err(Error::Capacity(format!("prime limit {limit} exceeds 2^62")));
    }
    let mut primes = vec![2u64];
    if limit >= 3 {
        let root = isqrt(limit);
        let base = if root >= 3 { simple_odd_sieve(root) } else { Vec::new() };

        // Segment over odd numbers: index i stands for 2i+1.
        const SEG: u64 = 1 << 18;
        let last_index = (limit - 1) / 2;
        let mut marks = vec![false; SEG as usize];
        let mut seg_lo = 1u64; // index of 3
        while seg_lo <= last_index {
            let seg_hi = (seg_lo + SEG).min(last_index + 1);
            let span = (seg_hi - seg_lo) as usize;
            marks[..span].fill(false);
            for &p in &base {
                let sq = p * p;
                let sq_index = (sq - 1) / 2;
                if sq_index >= seg_hi {
                    break;
                }
                // First odd multiple of p with index ≥ seg_lo, starting at p².
                let start = if sq_index >= seg_lo {
                    sq_index
                } else {
                    let lo_val = 2 * seg_lo + 1;
                    let mut m = lo_val.div_ceil(p) * p;
                    if m % 2 == 0 {
                        m += p;
                    }
                    (m - 1) / 2
                };
                let mut j = (start - seg_lo) as usize;
                while j < span {
                    marks[j] = true;
                    j += p as usize;
                }
            }
            primes.extend(
                marks[..span]
                    .iter()
                    .enumerate()
                    .filter(|(_, &composite)| !composite)
                    .map(|(j, _)| 2 * (seg_lo + j as u64) + 1),
            );
            seg_lo = seg_hi;
        }
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_odd_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Floor of the square root, exact for all `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Which arithmetic function a block tabulates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountMode {
    /// Ω(n): prime factors with multiplicity.
    BigOmega,
    /// ω(n): distinct prime factors.
    SmallOmega,
    /// Distinct prime factors `p ≤ cutoff` (cutoff compared inclusively).
    TruncatedOmega(f64),
}

impl CountMode {
    pub fn tag(&self) -> u8 {
        match self {
            CountMode::BigOmega => 0,
            CountMode::SmallOmega => 1,
            CountMode::TruncatedOmega(_) => 2,
        }
    }

    pub fn cutoff(&self) -> f64 {
        match self {
            CountMode::TruncatedOmega(t) => *t,
            _ => 0.0,
        }
    }

    fn from_tag(tag: u8, cutoff: f64) -> Result<Self> {
        match tag {
            0 => Ok(CountMode::BigOmega),
            1 => Ok(CountMode::SmallOmega),
            2 => Ok(CountMode::TruncatedOmega(cutoff)),
            other => Err(Error::Format(format!("unknown count mode tag {other}"))),
        }
    }
}

/// Tuning for [`factor_counts`].
#[derive(Debug, Clone, PartialEq)]
pub struct SieveConfig {
    pub segment_length: usize,
    pub worker_count: usize,
    /// Exponent `e` in the default truncation cutoff `N^(1/(log log N)^e)`.
    pub truncation_exponent: f64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_length: DEFAULT_SEGMENT,
            worker_count: rayon::current_num_threads().max(1),
            truncation_exponent: 8.0,
        }
    }
}

impl SieveConfig {
    pub fn with_workers(worker_count: usize) -> Self {
        SieveConfig { worker_count, ..Self::default() }
    }

    /// `t_N = N^(1/(log log N)^e)`; below 2 when N is small, in which case
    /// no prime survives the truncation.
    pub fn truncation_cutoff(&self, n: u64) -> f64 {
        let ll = (n as f64).ln().ln();
        (n as f64).powf(1.0 / ll.powf(self.truncation_exponent))
    }

    fn validate(&self) -> Result<()> {
        if self.segment_length < 2 {
            return contract(format!("segment_length {} < 2", self.segment_length));
        }
        if self.worker_count == 0 {
            return contract("worker_count must be positive");
        }
        if !(self.truncation_exponent.is_finite() && self.truncation_exponent > 0.0) {
            return contract("truncation_exponent must be a positive real");
        }
        Ok(())
    }
}

/// Counts for every integer in `[lo, hi)`, one byte each.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorCountBlock {
    lo: u64,
    hi: u64,
    mode: CountMode,
    counts: Vec<u8>,
}

impl FactorCountBlock {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn get(&self, n: u64) -> Option<u8> {
        if n >= self.lo && n < self.hi {
            Some(self.counts[(n - self.lo) as usize])
        } else {
            None
        }
    }

    /// True when every integer of the closed range `[a, b]` is present.
    pub fn covers(&self, a: u64, b: u64) -> bool {
        a >= self.lo && b < self.hi && a <= b
    }

    /// Counts for the closed range `[a, b]`, or a contract error naming the gap.
    pub fn slice(&self, a: u64, b: u64) -> Result<&[u8]> {
        if !self.covers(a, b) {
            return contract(format!(
                "factor counts cover [{}, {}) but [{a}, {b}] was requested",
                self.lo, self.hi
            ));
        }
        Ok(&self.counts[(a - self.lo) as usize..=(b - self.lo) as usize])
    }

    /// Counts for `[1, n]`; the block must start at 1.
    pub fn prefix(&self, n: u64) -> Result<&[u8]> {
        if self.lo != 1 {
            return contract("block must start at n = 1");
        }
        self.slice(1, n)
    }

    pub fn max_count(&self) -> u8 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Little-endian dump: `lo:u64, hi:u64, mode:u8, cutoff:f64`, then the raw bytes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        w.write_all(&[self.mode.tag()])?;
        w.write_all(&self.mode.cutoff().to_le_bytes())?;
        w.write_all(&self.counts)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let lo = u64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let hi = u64::from_le_bytes(b8);
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        r.read_exact(&mut b8)?;
        let cutoff = f64::from_le_bytes(b8);
        if lo == 0 || lo >= hi || hi > MAX_BLOCK_END {
            return Err(Error::Format(format!("bad block header [{lo}, {hi})")));
        }
        let mode = CountMode::from_tag(tag[0], cutoff)?;
        let len = usize::try_from(hi - lo)
            .map_err(|_| Error::Capacity("block length exceeds usize".into()))?;
        let mut counts = vec![0u8; len];
        r.read_exact(&mut counts)?;
        Ok(FactorCountBlock { lo, hi, mode, counts })
    }

    /// `n,count` lines with a header row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,count")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{}", self.lo + i as u64, c)?;
        }
        Ok(())
    }
}

/// Tabulate Ω, ω or truncated ω over `[lo, hi)`.
pub fn factor_counts(lo: u64, hi: u64, mode: CountMode, config: &SieveConfig) -> Result<FactorCountBlock> {
    config.validate()?;
    if lo < 1 || lo >= hi {
        return contract(format!("need 1 ≤ lo < hi, got [{lo}, {hi})"));
    }
    if hi > MAX_BLOCK_END {
        return Err(Error::Capacity(format!("upper bound {hi} exceeds 2^62")));
    }
    let len = usize::try_from(hi - lo)
        .ok()
        .filter(|&l| l <= isize::MAX as usize)
        .ok_or_else(|| Error::Capacity(format!("range of {} integers does not fit in memory", hi - lo)))?;
    let cutoff = match mode {
        CountMode::TruncatedOmega(t) => {
            if !(t.is_finite() && t >= 2.0) {
                return contract(format!("truncation cutoff {t} must be a finite real ≥ 2"));
            }
            // Primes above hi never divide anything in the block.
            (t.floor() as u64).min(hi)
        }
        _ => u64::MAX,
    };

    let root = isqrt(hi - 1);
    let primes = if root >= 2 { enumerate_primes(root)?.primes } else { Vec::new() };
    let kind = SegmentKind::from_mode(mode);

    let mut counts = vec![0u8; len];
    let seg = config.segment_length;
    let work = |counts: &mut Vec<u8>| {
        if hi - 1 <= u32::MAX as u64 {
            counts.par_chunks_mut(seg).enumerate().for_each_init(Vec::<u32>::new, |resid, (i, chunk)| {
                sieve_segment(lo + (i * seg) as u64, chunk, resid, &primes, kind, cutoff)
            });
        } else {
            counts.par_chunks_mut(seg).enumerate().for_each_init(Vec::<u64>::new, |resid, (i, chunk)| {
                sieve_segment(lo + (i * seg) as u64, chunk, resid, &primes, kind, cutoff)
            });
        }
    };
    if config.worker_count == rayon::current_num_threads() {
        work(&mut counts);
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.worker_count)
            .build()
            .map_err(|e| Error::Capacity(format!("cannot start worker pool: {e}")))?;
        pool.install(|| work(&mut counts));
    }
    Ok(FactorCountBlock { lo, hi, mode, counts })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SegmentKind {
    Big,
    Small,
    Truncated,
}

impl SegmentKind {
    fn from_mode(mode: CountMode) -> Self {
        match mode {
            CountMode::BigOmega => SegmentKind::Big,
            CountMode::SmallOmega => SegmentKind::Small,
            CountMode::TruncatedOmega(_) => SegmentKind::Truncated,
        }
    }
}

/// Product of the small prime powers found so far; always divides `n`.
trait Residual: Copy + PartialOrd {
    const ONE: Self;
    fn times(self, p: u64) -> Self;
    fn from_u64(n: u64) -> Self;
    fn to_u64(self) -> u64;
}

impl Residual for u32 {
    const ONE: Self = 1;
    #[inline(always)]
    fn times(self, p: u64) -> Self {
        self.wrapping_mul(p as u32)
    }
    #[inline(always)]
    fn from_u64(n: u64) -> Self {
        n as u32
    }
    #[inline(always)]
    fn to_u64(self) -> u64 {
        self as u64
    }
}

impl Residual for u64 {
    const ONE: Self = 1;
    #[inline(always)]
    fn times(self, p: u64) -> Self {
        self.wrapping_mul(p)
    }
    #[inline(always)]
    fn from_u64(n: u64) -> Self {
        n
    }
    #[inline(always)]
    fn to_u64(self) -> u64 {
        self
    }
}

fn sieve_segment<R: Residual>(
    start: u64,
    counts: &mut [u8],
    resid: &mut Vec<R>,
    primes: &[u64],
    kind: SegmentKind,
    cutoff: u64,
) {
    let len = counts.len();
    let last = start + len as u64 - 1;
    counts.fill(0);
    resid.clear();
    resid.resize(len, R::ONE);
    let resid = &mut resid[..];

    for &p in primes {
        if p * p > last {
            break;
        }
        let mut pk = p;
        let mut first_power = true;
        loop {
            let first = start.div_ceil(pk) * pk;
            let step = pk as usize;
            let count_it = match kind {
                SegmentKind::Big => true,
                SegmentKind::Small => first_power,
                SegmentKind::Truncated => first_power && p <= cutoff,
            };
            if first <= last {
                let mut m = (first - start) as usize;
                if count_it {
                    while m < len {
                        counts[m] += 1;
                        resid[m] = resid[m].times(p);
                        m += step;
                    }
                } else {
                    while m < len {
                        resid[m] = resid[m].times(p);
                        m += step;
                    }
                }
            }
            match pk.checked_mul(p) {
                Some(next) if next <= last => pk = next,
                _ => break,
            }
            first_power = false;
        }
    }

    // A leftover cofactor is one prime above √last.
    match kind {
        SegmentKind::Big | SegmentKind::Small => {
            for (i, (c, r)) in counts.iter_mut().zip(resid.iter()).enumerate() {
                let n = R::from_u64(start + i as u64);
                *c += (*r < n) as u8;
            }
        }
        SegmentKind::Truncated => {
            for (i, (c, r)) in counts.iter_mut().zip(resid.iter()).enumerate() {
                let n = start + i as u64;
                let r = r.to_u64();
                if r < n && n / r <= cutoff {
                    *c += 1;
                }
            }
        }
    }
}

/// λ(n) = (−1)^Ω(n) for every n in a Big-Omega block.
pub fn liouville(block: &FactorCountBlock) -> Result<Vec<i8>> {
    if block.mode != CountMode::BigOmega {
        return contract("Liouville values need a BigOmega block");
    }
    Ok(block.counts.iter().map(|&c| if c & 1 == 0 { 1 } else { -1 }).collect())
}

/// Ω on `[1, n_max]`, the common starting point for the experiments.
pub fn big_omega_table(n_max: u64, config: &SieveConfig) -> Result<FactorCountBlock> {
    factor_counts(1, n_max + 1, CountMode::BigOmega, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
    }

    #[test]
    fn primes_small_limits() {
        assert_eq!(enumerate_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(enumerate_primes(2).unwrap().primes(), &[2]);
        assert_eq!(enumerate_primes(3).unwrap().primes(), &[2, 3]);
        assert_eq!(enumerate_primes(100).unwrap().len(), 25);
        assert!(matches!(enumerate_primes(1), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn primes_match_trial_division() {
        for limit in [2u64, 9, 25, 26, 1000, 65_537, 100_000] {
            assert_eq!(enumerate_primes(limit).unwrap().primes(), trial_primes(limit).as_slice(), "limit {limit}");
        }
        // Crosses several internal segments.
        let big = enumerate_primes(2_000_000).unwrap();
        assert_eq!(big.len(), 148_933);
        assert!(big.primes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 99_999_999_999, u64::MAX] {
            let r = isqrt(n);
            assert!(r * r <= n);
            assert!((r + 1).checked_mul(r + 1).is_none_or(|s| s > n));
        }
    }

    #[test]
    fn big_omega_first_values() {
        let b = factor_counts(1, 13, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        assert_eq!(b.counts(), &[0, 1, 1, 2, 1, 2, 1, 3, 2, 2, 1, 3]);
        let b = factor_counts(360, 361, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        assert_eq!(b.counts(), &[6]);
    }

    #[test]
    fn truncated_counts_distinct_small_primes() {
        let b = factor_counts(10, 11, CountMode::TruncatedOmega(3.0), &SieveConfig::default()).unwrap();
        assert_eq!(b.counts(), &[1]);
        // 12 = 2²·3: both primes ≤ 3, each counted once.
        let b = factor_counts(12, 13, CountMode::TruncatedOmega(3.0), &SieveConfig::default()).unwrap();
        assert_eq!(b.counts(), &[2]);
        // Cutoff is inclusive.
        let b = factor_counts(1, 100, CountMode::TruncatedOmega(97.0), &SieveConfig::default()).unwrap();
        let s = factor_counts(1, 100, CountMode::SmallOmega, &SieveConfig::default()).unwrap();
        assert_eq!(b.counts(), s.counts());
    }

    #[test]
    fn bad_arguments() {
        let cfg = SieveConfig::default();
        assert!(matches!(factor_counts(0, 5, CountMode::BigOmega, &cfg), Err(Error::Contract(_))));
        assert!(matches!(factor_counts(5, 5, CountMode::BigOmega, &cfg), Err(Error::Contract(_))));
        assert!(matches!(factor_counts(1, 5, CountMode::TruncatedOmega(1.5), &cfg), Err(Error::Contract(_))));
        assert!(matches!(
            factor_counts(u64::MAX - 10, u64::MAX, CountMode::BigOmega, &cfg),
            Err(Error::Capacity(_))
        ));
        let tiny = SieveConfig { segment_length: 1, ..SieveConfig::default() };
        assert!(matches!(factor_counts(1, 5, CountMode::BigOmega, &tiny), Err(Error::Contract(_))));
    }

    #[test]
    fn large_offsets_use_wide_residuals() {
        let lo = (1u64 << 33) + 1;
        let b = factor_counts(lo, lo + 2000, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        for (i, &c) in b.counts().iter().enumerate() {
            assert_eq!(c as u32, omega_oracle(lo + i as u64), "n = {}", lo + i as u64);
        }
    }

    #[test]
    fn liouville_values() {
        let b = factor_counts(1, 12, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        assert_eq!(liouville(&b).unwrap(), vec![1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1]);
        let s = factor_counts(1, 12, CountMode::SmallOmega, &SieveConfig::default()).unwrap();
        assert!(matches!(liouville(&s), Err(Error::Contract(_))));
    }

    #[test]
    fn binary_dump_layout() {
        let b = factor_counts(5, 9, CountMode::TruncatedOmega(2.5), &SieveConfig::default()).unwrap();
        let mut buf = Vec::new();
        b.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 1 + 8 + 4);
        assert_eq!(&buf[..8], &5u64.to_le_bytes());
        assert_eq!(&buf[8..16], &9u64.to_le_bytes());
        assert_eq!(buf[16], 2);
        assert_eq!(&buf[17..25], &2.5f64.to_le_bytes());
        assert_eq!(&buf[25..], &[0, 1, 0, 1]);
        assert_eq!(FactorCountBlock::read_binary(&buf[..]).unwrap(), b);
        assert!(FactorCountBlock::read_binary(&buf[..20]).is_err());
    }

    #[test]
    fn csv_export() {
        let b = factor_counts(1, 5, CountMode::BigOmega, &SieveConfig::default()).unwrap();
        let mut out = Vec::new();
        b.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "n,count\n1,0\n2,1\n3,1\n4,2\n");
    }

    #[test]
    fn default_cutoff_degenerates_at_desk_scale() {
        let cfg = SieveConfig::default();
        assert!(cfg.truncation_cutoff(100_000_000) < 2.0);
        let lenient = SieveConfig { truncation_exponent: 1.0, ..cfg };
        let t = lenient.truncation_cutoff(1_000_000);
        assert!((t - 1e6f64.powf(1.0 / 1e6f64.ln().ln())).abs() < 1e-9);
    }
}
