//! Segmented sieving: primes, least prime factors, the prime patterns
//! `(q+i)/(i+1)` and the Lemma primes whose neighbours `(p+1)/2`, `(p+2)/3`
//! have no small prime factors.
//!
//! Segments are independent; they are sieved in parallel and merged in
//! ascending order, so every result is deterministic.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{PowerBound, Rational};
use crate::divisors::{is_prime, least_prime_factor};
use crate::error::{out_of_range, Error, Result};

pub const DEFAULT_SEGMENT: u64 = 1 << 20;
/// Default entry budget for [`LpfTable`] (4 bytes per entry).
pub const DEFAULT_LPF_BUDGET: u64 = 1 << 27;

/// Inclusive integer range `[lo, hi]` processed in segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SieveRange {
    lo: u64,
    hi: u64,
    segment_size: u64,
}

impl SieveRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        Self::with_segment_size(lo, hi, DEFAULT_SEGMENT)
    }

    pub fn with_segment_size(lo: u64, hi: u64, segment_size: u64) -> Result<Self> {
        if lo < 2 {
            return Err(out_of_range("lo", ">= 2", lo));
        }
        if hi < lo {
            return Err(out_of_range("hi", ">= lo", hi));
        }
        if hi >= 1 << 63 {
            return Err(out_of_range("hi", "< 2^63", hi));
        }
        if segment_size < 2 {
            return Err(out_of_range("segment_size", ">= 2", segment_size));
        }
        Ok(SieveRange {
            lo,
            hi,
            segment_size,
        })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn segment_size(&self) -> u64 {
        self.segment_size
    }

    pub fn width(&self) -> u64 {
        self.hi - self.lo + 1
    }

    /// Disjoint inclusive segments covering the range, ascending.
    pub fn segments(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut start = self.lo;
        loop {
            let end = start.saturating_add(self.segment_size - 1).min(self.hi);
            out.push((start, end));
            if end == self.hi {
                break;
            }
            start = end + 1;
        }
        out
    }
}

/// Primes up to `limit` by the plain sieve of Eratosthenes.
pub fn base_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
    }
    primes
}

fn first_multiple_from(p: u64, start: u64) -> u64 {
    (p * p).max(start.div_ceil(p) * p)
}

/// Primality flags for `[start, end]`.
fn sieve_segment(start: u64, end: u64, base: &[u64]) -> Vec<bool> {
    let len = (end - start + 1) as usize;
    let mut flags = vec![true; len];
    for n in start..start.saturating_add(2).min(end + 1) {
        if n < 2 {
            flags[(n - start) as usize] = false;
        }
    }
    for &p in base {
        if p.saturating_mul(p) > end {
            break;
        }
        let mut m = first_multiple_from(p, start);
        while m <= end {
            flags[(m - start) as usize] = false;
            m += p;
        }
    }
    flags
}

fn segment_primes(start: u64, end: u64, base: &[u64]) -> impl Iterator<Item = u64> {
    sieve_segment(start, end, base)
        .into_iter()
        .enumerate()
        .filter_map(move |(j, is_p)| is_p.then_some(start + j as u64))
}

/// Lazy ascending stream of the primes in the range, one segment at a time.
pub fn prime_stream(range: SieveRange) -> impl Iterator<Item = u64> {
    let base = base_primes(range.hi.sqrt());
    range
        .segments()
        .into_iter()
        .flat_map(move |(s, e)| segment_primes(s, e, &base).collect::<Vec<_>>())
}

/// Filter-map over the primes of the range; segments run in parallel and
/// results come back in ascending order.
pub fn par_map_primes<T, F>(range: SieveRange, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    let base = base_primes(range.hi.sqrt());
    range
        .segments()
        .into_par_iter()
        .map(|(s, e)| {
            segment_primes(s, e, &base)
                .filter_map(&f)
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(range: SieveRange) -> Vec<u64> {
    par_map_primes(range, Some)
}

pub fn prime_count(range: SieveRange) -> u64 {
    let base = base_primes(range.hi.sqrt());
    range
        .segments()
        .into_par_iter()
        .map(|(s, e)| sieve_segment(s, e, &base).iter().filter(|&&b| b).count() as u64)
        .sum()
}

/// Least prime factor of every integer in a range.
#[derive(Clone, Debug)]
pub struct LpfTable {
    lo: u64,
    hi: u64,
    /// 0 marks a prime (its own least factor); composites store `P⁻(n) < 2^32`.
    entries: Vec<u32>,
}

impl LpfTable {
    pub fn build(range: SieveRange) -> Result<Self> {
        Self::build_with_budget(range, DEFAULT_LPF_BUDGET)
    }

    pub fn build_with_budget(range: SieveRange, max_entries: u64) -> Result<Self> {
        if range.width() > max_entries {
            return Err(Error::Precondition(format!(
                "lpf table of {} entries exceeds budget {max_entries}",
                range.width()
            )));
        }
        let base = base_primes(range.hi.sqrt());
        let entries = range
            .segments()
            .into_par_iter()
            .map(|(start, end)| {
                let mut seg = vec![0u32; (end - start + 1) as usize];
                for &p in &base {
                    if p * p > end {
                        break;
                    }
                    let mut m = first_multiple_from(p, start);
                    while m <= end {
                        let slot = &mut seg[(m - start) as usize];
                        if *slot == 0 {
                            *slot = p as u32;
                        }
                        m += p;
                    }
                }
                seg
            })
            .collect::<Vec<_>>()
            .concat();
        Ok(LpfTable {
            lo: range.lo,
            hi: range.hi,
            entries,
        })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// `P⁻(n)`, or `None` outside the table.
    pub fn get(&self, n: u64) -> Option<u64> {
        if n < self.lo || n > self.hi {
            return None;
        }
        match self.entries[(n - self.lo) as usize] {
            0 => Some(n),
            p => Some(u64::from(p)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..=self.hi).zip(self.entries.iter().enumerate().map(move |(j, &p)| {
            if p == 0 {
                self.lo + j as u64
            } else {
                u64::from(p)
            }
        }))
    }
}

pub fn lpf_table(range: SieveRange) -> Result<LpfTable> {
    LpfTable::build(range)
}

/// Largest `k` for which the pattern modulus fits in 64 bits.
pub const MAX_PATTERN_K: u32 = 6;

/// `M(k) = lcm((k!)^k, lcm(2, …, k+1))`: the congruence `q ≡ 1 (mod M(k))`
/// makes every `(q+i)/(i+1)`, `i ≤ k`, integral.
pub fn pattern_modulus(k: u32) -> Result<u64> {
    if k == 0 || k > MAX_PATTERN_K {
        return Err(out_of_range("k", "1..=6", k));
    }
    let fact: u64 = (1..=u64::from(k)).product();
    let fk = fact.pow(k);
    Ok((2..=u64::from(k) + 1).fold(fk, |acc, j| acc.lcm(&j)))
}

/// `[(q+1)/2, …, (q+k)/(k+1)]` when every entry is an integral prime.
fn prime_cofactors(q: u64, k: u32) -> Option<Vec<u64>> {
    (1..=u64::from(k))
        .map(|i| {
            let num = q.checked_add(i)?;
            (num % (i + 1) == 0 && is_prime(num / (i + 1))).then_some(num / (i + 1))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constellation {
    pub k: u32,
    pub q: u64,
    /// `(q+i)/(i+1)` for `i = 1..=k`.
    pub cofactors: Vec<u64>,
    pub modulus_class: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositeConstellation {
    pub k: u32,
    pub p: u64,
    pub r: u64,
    pub q: u64,
    pub cofactors: Vec<u64>,
    pub modulus_class: u64,
}

/// Primes `q ≡ 1 (mod M(k))` in the range with every `(q+i)/(i+1)` prime.
pub fn find_schinzel(k: u32, range: SieveRange) -> Result<Vec<Constellation>> {
    let modulus = pattern_modulus(k)?;
    Ok(par_map_primes(range, |q| {
        if q % modulus != 1 {
            return None;
        }
        prime_cofactors(q, k).map(|cofactors| Constellation {
            k,
            q,
            cofactors,
            modulus_class: q % modulus,
        })
    }))
}

/// `q = p·r` in the range with `r ≠ p` prime, `q ≡ 1 (mod M(k))` and every
/// `(q+i)/(i+1)` prime. Iterates over the primes `r ≤ hi/p`.
pub fn find_composite_schinzel(
    k: u32,
    p: u64,
    range: SieveRange,
) -> Result<Vec<CompositeConstellation>> {
    let modulus = pattern_modulus(k)?;
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} is not prime")));
    }
    if p <= u64::from(k) {
        return Err(Error::Precondition(format!("p = {p} must exceed k = {k}")));
    }
    let r_lo = range.lo.div_ceil(p).max(2);
    let r_hi = range.hi / p;
    if r_lo > r_hi {
        return Ok(Vec::new());
    }
    let r_range = SieveRange::with_segment_size(r_lo, r_hi, range.segment_size)?;
    Ok(par_map_primes(r_range, |r| {
        if r == p {
            return None;
        }
        let q = p * r;
        if q % modulus != 1 {
            return None;
        }
        prime_cofactors(q, k).map(|cofactors| CompositeConstellation {
            k,
            p,
            r,
            q,
            cofactors,
            modulus_class: q % modulus,
        })
    }))
}

/// Which `x` the Lemma threshold `x^exponent` is taken at.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// `hi^exponent`, the upper end of the scanned range.
    #[default]
    RangeTop,
    /// `p^exponent` for each candidate `p`.
    PerElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaPrime {
    pub p: u64,
    /// `P⁻((p+1)/2)`
    pub lpf1: u64,
    /// `P⁻((p+2)/3)`
    pub lpf2: u64,
    pub threshold: PowerBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaScan {
    pub range: SieveRange,
    pub exponent: Rational,
    pub mode: ThresholdMode,
    pub primes: Vec<LemmaPrime>,
    /// `count / (hi / ln³ hi)`.
    pub density_ratio: f64,
}

impl LemmaScan {
    pub fn count(&self) -> usize {
        self.primes.len()
    }
}

/// `hi / ln³ hi`, the Lemma's order of magnitude.
pub fn lemma_scale(x: u64) -> f64 {
    let xf = x as f64;
    xf / xf.ln().powi(3)
}

/// Primes `p` in the range with `(p+1)/2`, `(p+2)/3` integral and both least
/// prime factors strictly above the threshold.
pub fn find_lemma_primes(
    range: SieveRange,
    exponent: &Rational,
    mode: ThresholdMode,
) -> Result<LemmaScan> {
    let half = Rational::new(1.into(), 2.into());
    if *exponent <= Rational::from_integer(0.into()) || *exponent >= half {
        return Err(out_of_range("exponent", "in (0, 1/2)", exponent));
    }
    let cofactor_hi = (range.hi + 1) / 2;
    let table = if (2..=DEFAULT_LPF_BUDGET).contains(&cofactor_hi) {
        Some(LpfTable::build(SieveRange::with_segment_size(
            2,
            cofactor_hi,
            range.segment_size,
        )?)?)
    } else {
        None
    };
    let lpf = |n: u64| match &table {
        Some(t) => t.get(n).expect("cofactor lies in the table"),
        None => least_prime_factor(n).expect("cofactor >= 2"),
    };
    let top = PowerBound::power(BigInt::from(range.hi), exponent.clone());
    // every lpf ≤ floor(hi^e) fails the range-top test
    let top_floor = floor_of(&top);
    let primes = par_map_primes(range, |p| {
        if p % 6 != 1 {
            return None;
        }
        let (lpf1, lpf2) = (lpf((p + 1) / 2), lpf((p + 2) / 3));
        let threshold = match mode {
            ThresholdMode::RangeTop => {
                if lpf1 <= top_floor || lpf2 <= top_floor {
                    return None;
                }
                top.clone()
            }
            ThresholdMode::PerElement => {
                let t = PowerBound::power(BigInt::from(p), exponent.clone());
                if !(t.exceeded_by(&Rational::from_integer(lpf1.into()))
                    && t.exceeded_by(&Rational::from_integer(lpf2.into())))
                {
                    return None;
                }
                t
            }
        };
        Some(LemmaPrime {
            p,
            lpf1,
            lpf2,
            threshold,
        })
    });
    let density_ratio = primes.len() as f64 / lemma_scale(range.hi);
    Ok(LemmaScan {
        range,
        exponent: exponent.clone(),
        mode,
        primes,
        density_ratio,
    })
}

/// Largest integer `m` with `m ≤ bound`.
fn floor_of(bound: &PowerBound) -> u64 {
    let mut m = bound.approx().floor().max(0.0) as u64;
    while bound.exceeded_by(&Rational::from_integer(m.into())) {
        m -= 1;
    }
    while !bound.exceeded_by(&Rational::from_integer((m + 1).into())) {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::divisors::is_prime_by_trial_division;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn range(lo: u64, hi: u64) -> SieveRange {
        SieveRange::new(lo, hi).unwrap()
    }

    #[test]
    fn range_validation() {
        assert!(SieveRange::new(1, 10).is_err());
        assert!(SieveRange::new(10, 9).is_err());
        assert!(SieveRange::new(2, 1 << 63).is_err());
        assert!(SieveRange::with_segment_size(2, 10, 1).is_err());
        let r = SieveRange::with_segment_size(2, 20, 7).unwrap();
        assert_eq!(r.segments(), vec![(2, 8), (9, 15), (16, 20)]);
    }

    #[test]
    fn small_primes() {
        assert_eq!(primes_in(range(2, 20)), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(
            prime_stream(range(2, 20)).collect::<Vec<_>>(),
            primes_in(range(2, 20))
        );
    }

    #[test]
    fn primes_near_a_million_match_miller_rabin() {
        let got = primes_in(range(1_000_000, 1_000_100));
        let want: Vec<u64> = (1_000_000..=1_000_100).filter(|&n| is_prime(n)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn prime_counting() {
        assert_eq!(prime_count(range(2, 1_000_000)), 78_498);
        // tiny segments exercise the merge path
        let seg = SieveRange::with_segment_size(2, 100_000, 997).unwrap();
        assert_eq!(prime_count(seg), 9_592);
        assert_eq!(primes_in(seg), primes_in(range(2, 100_000)));
    }

    #[test]
    fn lpf_examples() {
        let t = lpf_table(range(2, 10)).unwrap();
        let got: Vec<u64> = t.iter().map(|(_, p)| p).collect();
        assert_eq!(got, vec![2, 3, 2, 5, 2, 7, 2, 3, 2]);
        let t = lpf_table(range(80, 120)).unwrap();
        assert_eq!(t.get(91), Some(7));
        assert_eq!(t.get(97), Some(97));
        assert_eq!(t.get(79), None);
        assert!(LpfTable::build_with_budget(range(2, 1000), 10).is_err());
    }

    #[test]
    fn lpf_agrees_with_trial_division() {
        let lo = 5_000_000u64;
        let t = LpfTable::build(SieveRange::with_segment_size(lo, lo + 200_000, 4096).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1_000 {
            let n = rng.gen_range(lo..=lo + 200_000);
            assert_eq!(t.get(n), Some(least_prime_factor(n).unwrap()));
        }
    }

    #[test]
    fn pattern_moduli() {
        assert_eq!(pattern_modulus(1).unwrap(), 2);
        assert_eq!(pattern_modulus(2).unwrap(), 12);
        assert_eq!(pattern_modulus(3).unwrap(), 216);
        assert_eq!(pattern_modulus(4).unwrap(), 1_658_880);
        assert!(pattern_modulus(0).is_err());
        assert!(pattern_modulus(7).is_err());
    }

    fn brute_schinzel(k: u32, lo: u64, hi: u64) -> Vec<u64> {
        let m = pattern_modulus(k).unwrap();
        (lo..=hi)
            .filter(|&q| {
                q % m == 1
                    && is_prime_by_trial_division(q)
                    && (1..=u64::from(k)).all(|i| {
                        (q + i) % (i + 1) == 0 && is_prime_by_trial_division((q + i) / (i + 1))
                    })
            })
            .collect()
    }

    #[test]
    fn schinzel_examples() {
        let k1: Vec<u64> = find_schinzel(1, range(2, 100))
            .unwrap()
            .iter()
            .map(|c| c.q)
            .collect();
        assert_eq!(k1, brute_schinzel(1, 2, 100));
        for q in [5, 13, 37, 61] {
            assert!(k1.contains(&q));
        }
        let k2 = find_schinzel(2, range(2, 1000)).unwrap();
        let c13 = k2.iter().find(|c| c.q == 13).unwrap();
        assert_eq!(c13.cofactors, vec![7, 5]);
        assert_eq!(c13.modulus_class, 1);
        assert!(find_schinzel(2, range(2, 12)).unwrap().is_empty());
    }

    #[test]
    fn schinzel_matches_brute_force() {
        for k in 1..=3 {
            let got: Vec<u64> = find_schinzel(k, range(2, 200_000))
                .unwrap()
                .iter()
                .map(|c| c.q)
                .collect();
            assert_eq!(got, brute_schinzel(k, 2, 200_000), "k={k}");
        }
    }

    #[test]
    fn composite_examples() {
        let found = find_composite_schinzel(1, 3, range(2, 100)).unwrap();
        assert!(found
            .iter()
            .any(|c| c.r == 7 && c.q == 21 && c.cofactors == vec![11]));
        assert!(!found.iter().any(|c| c.q == 15));
        assert!(find_composite_schinzel(1, 3, range(2, 5))
            .unwrap()
            .is_empty());
        let k2 = find_composite_schinzel(2, 5, range(2, 1_000_000)).unwrap();
        assert!(!k2.is_empty());
        for c in &k2 {
            assert_eq!(c.q, 5 * c.r);
            assert!(is_prime_by_trial_division(c.r));
            assert_eq!(c.q % 12, 1);
            for (i, &f) in c.cofactors.iter().enumerate() {
                let i = i as u64 + 1;
                assert_eq!(c.q + i, f * (i + 1));
                assert!(is_prime_by_trial_division(f));
            }
        }
        assert!(find_composite_schinzel(2, 2, range(2, 100)).is_err());
        assert!(find_composite_schinzel(2, 9, range(2, 100)).is_err());
    }

    #[test]
    fn lemma_examples() {
        let scan =
            find_lemma_primes(range(2, 100_000), &ratio(1, 9), ThresholdMode::RangeTop).unwrap();
        let ps: Vec<u64> = scan.primes.iter().map(|l| l.p).collect();
        assert!(ps.contains(&13));
        assert!(!ps.contains(&7));
        let l13 = scan.primes.iter().find(|l| l.p == 13).unwrap();
        assert_eq!((l13.lpf1, l13.lpf2), (7, 5));
        assert!(find_lemma_primes(range(2, 100), &ratio(1, 2), ThresholdMode::RangeTop).is_err());
        assert!(find_lemma_primes(range(2, 100), &ratio(0, 1), ThresholdMode::RangeTop).is_err());
    }

    fn brute_lemma(hi: u64, exponent: f64) -> usize {
        let t = (hi as f64).powf(exponent);
        (7..=hi)
            .filter(|&p| p % 6 == 1 && is_prime_by_trial_division(p))
            .filter(|&p| {
                let a = least_prime_factor((p + 1) / 2).unwrap() as f64;
                let b = least_prime_factor((p + 2) / 3).unwrap() as f64;
                a > t && b > t
            })
            .count()
    }

    #[test]
    fn lemma_matches_brute_force() {
        for hi in [10_000u64, 50_000] {
            let scan =
                find_lemma_primes(range(2, hi), &ratio(1, 9), ThresholdMode::RangeTop).unwrap();
            assert_eq!(scan.count(), brute_lemma(hi, 1.0 / 9.0));
        }
        assert_eq!(
            find_lemma_primes(range(2, 10_000), &ratio(1, 9), ThresholdMode::RangeTop)
                .unwrap()
                .count(),
            300
        );
    }

    #[test]
    fn lemma_count_monotonicity() {
        let count =
            |hi: u64, e: Rational, mode| find_lemma_primes(range(2, hi), &e, mode).unwrap().count();
        let mut prev = 0;
        for hi in (10_000..=200_000).step_by(10_000) {
            let c = count(hi, ratio(1, 9), ThresholdMode::PerElement);
            assert!(c >= prev);
            prev = c;
        }
        let tops: Vec<usize> = [10_000u64, 100_000, 1_000_000]
            .iter()
            .map(|&hi| count(hi, ratio(1, 9), ThresholdMode::RangeTop))
            .collect();
        assert!(tops.windows(2).all(|w| w[0] <= w[1]));
        let by_exp: Vec<usize> = [ratio(1, 20), ratio(1, 9), ratio(1, 5), ratio(1, 3)]
            .into_iter()
            .map(|e| count(100_000, e, ThresholdMode::RangeTop))
            .collect();
        assert!(by_exp.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn floor_of_roots() {
        assert_eq!(floor_of(&PowerBound::power(1_000_000, ratio(1, 9))), 4);
        assert_eq!(floor_of(&PowerBound::power(512, ratio(1, 9))), 2);
        assert_eq!(floor_of(&PowerBound::power(511, ratio(1, 9))), 1);
    }
}
