//! Exact evaluation of the fractional-part criteria: the pattern sums over
//! `P_{k,i}`, the `q^{k−1}/p^k` endgame, the `σ_3` window and its reduction
//! to condition (i), the subset expansion and the small-`k` eliminations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{frac_dist, frac_part, int, ratio, rational_pow, PowerBound, Rational};
use crate::divisors::{factorize, is_prime, sigma, sigma3_squarefree, squarefree_primes};
use crate::error::{out_of_range, Error, Result};
use crate::poly::derive_quotient;
use crate::series::tail_window;
use crate::sieve::{find_lemma_primes, pattern_modulus, LpfTable, SieveRange, ThresholdMode};
use crate::Distance;

/// Candidate constants for condition (i): `19/216` and two re-derived alternatives.
pub fn condition_constants() -> [Rational; 3] {
    [ratio(19, 216), ratio(197, 216), ratio(35, 216)]
}

/// Constant realizing the window-to-condition-(i) reduction, selected by
/// [`calibrate_condition_constant`] over `q ∈ [10^3, 10^6]`.
pub fn calibrated_constant() -> Rational {
    ratio(35, 216)
}

pub fn default_epsilon() -> Rational {
    ratio(1, 10)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionLabel {
    Eq1,
    Eq2,
    Endgame,
    Sigma3Window,
    ConditionI,
    SmallK1,
    SmallK2,
}

impl CriterionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriterionLabel::Eq1 => "eq1",
            CriterionLabel::Eq2 => "eq2",
            CriterionLabel::Endgame => "endgame",
            CriterionLabel::Sigma3Window => "sigma3-window",
            CriterionLabel::ConditionI => "condition-i",
            CriterionLabel::SmallK1 => "small-k1",
            CriterionLabel::SmallK2 => "small-k2",
        }
    }
}

impl fmt::Display for CriterionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One `‖·‖ ≤ bound` evaluation. `value` is stored reduced mod 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub label: CriterionLabel,
    pub q_or_n: u64,
    pub value: Rational,
    pub distance: Distance,
    pub comparator: PowerBound,
    pub satisfied: bool,
}

impl CriterionResult {
    pub fn evaluate(
        label: CriterionLabel,
        q_or_n: u64,
        raw: &Rational,
        comparator: PowerBound,
    ) -> Self {
        let distance = frac_dist(raw);
        let satisfied = comparator.admits(distance.value());
        CriterionResult {
            label,
            q_or_n,
            value: frac_part(raw),
            distance,
            comparator,
            satisfied,
        }
    }
}

fn window_bound(q: u64, epsilon: &Rational) -> PowerBound {
    PowerBound::power(q, epsilon.clone() - Rational::one())
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(out_of_range("epsilon", "in (0, 1)", epsilon));
    }
    Ok(())
}

fn pattern_holds(q: u64, k: u32) -> bool {
    (1..=u64::from(k)).all(|i| {
        let num = q + i;
        num % (i + 1) == 0 && is_prime(num / (i + 1))
    })
}

fn weighted_quotients(k: u32, q: u64, first_weight: Rational) -> Result<Rational> {
    let qb = BigInt::from(q);
    let mut total = Rational::zero();
    for i in 1..=k {
        let weight = if i == 1 {
            first_weight.clone()
        } else {
            sigma(u64::from(i), -(k as i32))?
        };
        total += weight * derive_quotient(k, i)?.eval(&qb);
    }
    Ok(total)
}

/// `‖Σ_{i=1}^k σ_{−k}(i) P_{k,i}(q)‖` against `q^{−1+ε}`, for a pattern prime `q`.
pub fn eq1_eval(k: u32, q: u64, epsilon: &Rational) -> Result<CriterionResult> {
    check_epsilon(epsilon)?;
    let modulus = pattern_modulus(k)?;
    if !is_prime(q) || q % modulus != 1 || !pattern_holds(q, k) {
        return Err(Error::Precondition(format!(
            "q = {q} is not a k = {k} constellation prime"
        )));
    }
    let value = weighted_quotients(k, q, Rational::one())?;
    Ok(CriterionResult::evaluate(
        CriterionLabel::Eq1,
        q,
        &value,
        window_bound(q, epsilon),
    ))
}

/// `‖σ_{−k}(p) P_{k,1}(q) + Σ_{i=2}^k σ_{−k}(i) P_{k,i}(q)‖` for `q = p·r`.
pub fn eq2_eval(k: u32, p: u64, q: u64, epsilon: &Rational) -> Result<CriterionResult> {
    check_epsilon(epsilon)?;
    let modulus = pattern_modulus(k)?;
    if !is_prime(p) || p <= u64::from(k) {
        return Err(Error::Precondition(format!(
            "p = {p} must be a prime above k = {k}"
        )));
    }
    let valid =
        q % p == 0 && q / p != p && is_prime(q / p) && q % modulus == 1 && pattern_holds(q, k);
    if !valid {
        return Err(Error::Precondition(format!(
            "q = {q} is not a k = {k} composite constellation for p = {p}"
        )));
    }
    let value = weighted_quotients(k, q, sigma(p, -(k as i32))?)?;
    Ok(CriterionResult::evaluate(
        CriterionLabel::Eq2,
        q,
        &value,
        window_bound(q, epsilon),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndgameResult {
    pub result: CriterionResult,
    /// `p^{−k}`
    pub lower_bound: Rational,
    /// `distance ≥ p^{−k}` or the value is an integer.
    pub lower_bound_holds: bool,
}

/// `‖q1^{k−1}/p^k‖` with the lower bound `p^{−k}` for non-integral values.
pub fn endgame_eval(k: u32, p: u64, q1: u64, epsilon: &Rational) -> Result<EndgameResult> {
    check_epsilon(epsilon)?;
    if k == 0 {
        return Err(out_of_range("k", ">= 1", 0));
    }
    if !is_prime(p) {
        return Err(Error::Precondition(format!("p = {p} is not prime")));
    }
    if q1 == 0 || q1 % (p * p) == 0 {
        return Err(Error::Precondition(format!(
            "p^2 = {} divides q1 = {q1}",
            p * p
        )));
    }
    let denom = BigInt::from(p).pow(k);
    let value = Rational::new(BigInt::from(q1).pow(k - 1), denom.clone());
    let result = CriterionResult::evaluate(
        CriterionLabel::Endgame,
        q1,
        &value,
        window_bound(q1, epsilon),
    );
    let lower_bound = Rational::new(BigInt::one(), denom);
    let lower_bound_holds = result.distance.is_zero() || *result.distance.value() >= lower_bound;
    Ok(EndgameResult {
        result,
        lower_bound,
        lower_bound_holds,
    })
}

fn sigma3(n: u64) -> Rational {
    sigma(n, 3).expect("n >= 1")
}

/// `σ_3(q)/q + σ_3(q+1)/(q(q+1)) + σ_3(q+2)/(q(q+1)(q+2))` for an odd prime
/// `q ≡ 1 (mod 3)`.
pub fn sigma3_window(q: u64, epsilon: &Rational) -> Result<CriterionResult> {
    check_epsilon(epsilon)?;
    if !is_prime(q) || q % 6 != 1 {
        return Err(Error::Precondition(format!(
            "q = {q} must be a prime with q ≡ 1 (mod 6)"
        )));
    }
    let (a, b, c) = (int(q), int(q + 1), int(q + 2));
    let value = sigma3(q) / a.clone()
        + sigma3(q + 1) / (a.clone() * b.clone())
        + sigma3(q + 2) / (a * b * c);
    Ok(CriterionResult::evaluate(
        CriterionLabel::Sigma3Window,
        q,
        &value,
        window_bound(q, epsilon),
    ))
}

/// Exact residuals of the three constants in the `σ_3` window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma3Constants {
    pub q: u64,
    /// `σ_3(q+2)/(q(q+1)(q+2)) − 28/27`
    pub third_term: Rational,
    /// `{σ_3(q+1)/(q(q+1)) − σ_3(q+1)/(q+1)²} − 7/8`
    pub middle_difference: Rational,
    /// `{σ_3(q+1)/(q+1)² − σ_3(q+1)/(q(q+1))} − 7/8`, the opposite orientation.
    pub middle_difference_reversed: Rational,
    /// `σ_3(q)/q − (q² + 1/q)`, always zero for prime `q`.
    pub first_term: Rational,
}

pub fn sigma3_constants(q: u64) -> Result<Sigma3Constants> {
    let ok = is_prime(q)
        && q % 6 == 1
        && (q + 1) / 2 > 3
        && (q + 2) / 3 > 3
        && is_prime((q + 1) / 2)
        && is_prime((q + 2) / 3);
    if !ok {
        return Err(Error::Precondition(format!(
            "q = {q} needs q, (q+1)/2, (q+2)/3 prime and both cofactors > 3"
        )));
    }
    let (a, b, c) = (int(q), int(q + 1), int(q + 2));
    let third_term = sigma3(q + 2) / (a.clone() * b.clone() * c) - ratio(28, 27);
    let s = sigma3(q + 1);
    let diff = s.clone() / (a.clone() * b.clone()) - s / (b.clone() * b);
    let seven_eighths = ratio(7, 8);
    let middle_difference = frac_part(&diff) - seven_eighths.clone();
    let middle_difference_reversed = frac_part(&-diff) - seven_eighths;
    let first_term = sigma3(q) / a.clone() - (a.clone() * a.clone() + a.recip());
    Ok(Sigma3Constants {
        q,
        third_term,
        middle_difference,
        middle_difference_reversed,
        first_term,
    })
}

/// The `±1/4` adjustment standing in for the `9n/4` contribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuarterShift {
    Plus,
    Minus,
}

impl QuarterShift {
    pub fn value(self) -> Rational {
        match self {
            QuarterShift::Plus => ratio(1, 4),
            QuarterShift::Minus => ratio(-1, 4),
        }
    }

    /// `9n/4 mod 1` for odd `n`, as a signed quarter.
    pub fn of_odd(n: u64) -> Option<QuarterShift> {
        match n % 4 {
            1 => Some(QuarterShift::Plus),
            3 => Some(QuarterShift::Minus),
            _ => None,
        }
    }
}

fn condition_i_value(n: u64, sigma3_n: Rational, c: &Rational) -> Rational {
    let n2 = int(n) * int(n);
    int(9) * sigma3_n / (int(4) * n2) + c.clone()
}

/// `‖9σ_3(n)/(4n²) + c (± 1/4)‖` against `n^{−1/3}`.
pub fn condition_i_eval(
    n: u64,
    c: &Rational,
    shift: Option<QuarterShift>,
) -> Result<CriterionResult> {
    if n < 2 {
        return Err(out_of_range("n", ">= 2", n));
    }
    let mut value = condition_i_value(n, sigma3(n), c);
    if let Some(s) = shift {
        value += s.value();
    }
    Ok(CriterionResult::evaluate(
        CriterionLabel::ConditionI,
        n,
        &value,
        PowerBound::power(n, ratio(-1, 3)),
    ))
}

/// Terms `9 Π_{i∈I} p_i / (4 Π_{i∉I} p_i²)` over every subset `I` of the prime factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetExpansion {
    pub n: u64,
    pub primes: Vec<u64>,
    /// Indexed by bitmask: bit `j` set means `p_{j+1} ∈ I`.
    pub terms: Vec<Rational>,
}

impl SubsetExpansion {
    pub fn total(&self) -> Rational {
        self.terms.iter().sum()
    }

    /// The `I = [k]` term, `9n/4`.
    pub fn full_term(&self) -> &Rational {
        self.terms.last().expect("at least the empty subset")
    }
}

pub const MAX_SUBSET_PRIMES: usize = 20;

pub fn subset_expand(n: u64) -> Result<SubsetExpansion> {
    let primes = squarefree_primes(n)?;
    if primes.len() > MAX_SUBSET_PRIMES {
        return Err(out_of_range("omega(n)", "<= 20", primes.len()));
    }
    let terms = subset_terms(&primes, Rational::new(9.into(), 4.into()));
    Ok(SubsetExpansion { n, primes, terms })
}

/// `scale · Π_{I} p / Π_{∉I} p²` for every mask over `primes`.
fn subset_terms(primes: &[u64], scale: Rational) -> Vec<Rational> {
    let mut terms = vec![scale];
    for &p in primes {
        let p = int(p);
        let p2 = p.clone() * p.clone();
        let with: Vec<Rational> = terms.iter().map(|t| t.clone() * p.clone()).collect();
        for t in terms.iter_mut() {
            *t = t.clone() / p2.clone();
        }
        terms.extend(with);
    }
    terms
}

/// `α = Σ_{I ⊆ {2..k}} 9 Π_{i∈I} p_i / (4 Π_{i∈{2..k}∖I} p_i²)`, so that the
/// full subset sum equals `α p_1 + α / p_1²`.
pub fn alpha_from_factors(primes: &[u64]) -> Result<Rational> {
    if primes.is_empty() {
        return Err(Error::Empty);
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePrime(w[0]));
    }
    Ok(
        subset_terms(&sorted[1..], Rational::new(9.into(), 4.into()))
            .iter()
            .sum(),
    )
}

/// Which small-`ω` class to scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallK {
    K1,
    K2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallKReport {
    pub kind: SmallK,
    pub range: SieveRange,
    pub constant: Rational,
    /// Candidates of the requested shape in the range.
    pub scanned: u64,
    /// Candidates whose condition-(i) distance is at most `n^{−1/3}`.
    pub witnesses: Vec<CriterionResult>,
}

impl SmallKReport {
    pub fn count(&self) -> usize {
        self.witnesses.len()
    }

    /// Witnesses per integer of the range.
    pub fn density(&self) -> f64 {
        self.count() as f64 / self.range.width() as f64
    }
}

/// `n = p` (K1) or `n = p_1 p_2`, `p_1 < p_2`, `p_1^9 > n` (K2) in the range
/// satisfying condition (i) at tolerance `n^{−1/3}`.
pub fn small_k_elimination(kind: SmallK, range: SieveRange, c: &Rational) -> Result<SmallKReport> {
    let table = LpfTable::build(range)?;
    let label = match kind {
        SmallK::K1 => CriterionLabel::SmallK1,
        SmallK::K2 => CriterionLabel::SmallK2,
    };
    let chunks: Vec<(u64, u64)> = range.segments();
    let per_chunk: Vec<(u64, Vec<CriterionResult>)> = chunks
        .into_par_iter()
        .map(|(s, e)| {
            let mut scanned = 0u64;
            let mut hits = Vec::new();
            for n in s..=e {
                let p1 = table.get(n).expect("n in table");
                let primes = match kind {
                    SmallK::K1 if p1 == n => vec![n],
                    SmallK::K2 if p1 != n => {
                        let p2 = n / p1;
                        let ninth = u128::from(p1).pow(9);
                        if p2 <= p1 || !is_prime(p2) || ninth <= u128::from(n) {
                            continue;
                        }
                        vec![p1, p2]
                    }
                    _ => continue,
                };
                scanned += 1;
                let value = condition_i_value(n, int(sigma3_squarefree(&primes)), c);
                let res =
                    CriterionResult::evaluate(label, n, &value, PowerBound::power(n, ratio(-1, 3)));
                if res.satisfied {
                    hits.push(res);
                }
            }
            (scanned, hits)
        })
        .collect();
    let scanned = per_chunk.iter().map(|(s, _)| s).sum();
    let witnesses = per_chunk.into_iter().flat_map(|(_, h)| h).collect();
    Ok(SmallKReport {
        kind,
        range,
        constant: c.clone(),
        scanned,
        witnesses,
    })
}

/// `Σ_{k ≥ x^{1/9}} ⌊2x/k²⌋`, the count bound for non-squarefree `n ∈ [x, 2x]`
/// with a square factor of side at least `x^{1/9}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquarefreeExclusion {
    pub x: u64,
    pub sum: u64,
    /// `x^{8/9}` for comparison.
    pub reference: f64,
}

pub fn squarefree_exclusion(x: u64) -> Result<SquarefreeExclusion> {
    if x < 2 {
        return Err(out_of_range("x", ">= 2", x));
    }
    // smallest k with k^9 ≥ x
    let mut k = 1u64;
    while u128::from(k).pow(9) < u128::from(x) {
        k += 1;
    }
    let mut sum = 0u64;
    while k * k <= 2 * x {
        sum += 2 * x / (k * k);
        k += 1;
    }
    Ok(SquarefreeExclusion {
        x,
        sum,
        reference: (x as f64).powf(8.0 / 9.0),
    })
}

/// `|tail_window(k, q, k) − Σ σ_{−k}(i) P_{k,i}(q)|`.
pub fn window_approximation_gap(k: u32, q: u64) -> Result<Rational> {
    let window = tail_window(k, q, u64::from(k))?.value;
    Ok((window - weighted_quotients(k, q, Rational::one())?).abs())
}

/// `σ_k(q+i) = (((q+i)/(i+1))^k + 1) σ_k(i+1)` for every `i ≤ k` whose
/// cofactor is a prime above `i+1` and coprime to it.
pub fn pattern_sigma_identity(k: u32, q: u64, exponent: u32) -> Result<bool> {
    for i in 1..=u64::from(k) {
        if (q + i) % (i + 1) != 0 {
            continue;
        }
        let r = (q + i) / (i + 1);
        if !is_prime(r) || r <= i + 1 || (i + 1) % r == 0 {
            continue;
        }
        let lhs = sigma(q + i, exponent as i32)?;
        let rhs =
            (rational_pow(&int(r), exponent) + Rational::one()) * sigma(i + 1, exponent as i32)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One bridge sample: window distance vs condition-(i) distance at `n = (q+1)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeSample {
    pub q: u64,
    /// `|‖window‖ − ‖9σ_3(n)/(4n²) + c‖|`
    pub gap: Rational,
}

impl BridgeSample {
    /// `gap · q^{1/3}`
    pub fn scaled(&self) -> f64 {
        self.gap.to_f64().unwrap_or(f64::INFINITY) * (self.q as f64).cbrt()
    }

    /// Exact `gap ≤ bound · q^{−1/3}`.
    pub fn within(&self, bound: &Rational) -> bool {
        PowerBound::new(bound.clone(), self.q, ratio(-1, 3)).admits(&self.gap)
    }
}

/// Lemma primes of the range with `(q+1)/2` prime: the sample set for the bridge.
pub fn bridge_primes(range: SieveRange, exponent: &Rational) -> Result<Vec<u64>> {
    Ok(find_lemma_primes(range, exponent, ThresholdMode::RangeTop)?
        .primes
        .into_iter()
        .filter(|l| is_prime((l.p + 1) / 2))
        .map(|l| l.p)
        .collect())
}

pub fn bridge_samples(qs: &[u64], c: &Rational) -> Result<Vec<BridgeSample>> {
    qs.par_iter()
        .map(|&q| {
            let window = sigma3_window(q, &default_epsilon())?;
            let n = (q + 1) / 2;
            let cond = condition_i_eval(n, c, None)?;
            let gap = (window.distance.into_value() - cond.distance.into_value()).abs();
            Ok(BridgeSample { q, gap })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateFit {
    pub constant: Rational,
    pub max_scaled_gap: f64,
    pub worst_q: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub fits: Vec<CandidateFit>,
    pub selected: Rational,
}

/// Picks the candidate minimizing `max_q |bridge gap| · q^{1/3}`.
pub fn calibrate_condition_constant(qs: &[u64], candidates: &[Rational]) -> Result<Calibration> {
    if qs.is_empty() || candidates.is_empty() {
        return Err(Error::Empty);
    }
    let mut fits = Vec::with_capacity(candidates.len());
    for c in candidates {
        let samples = bridge_samples(qs, c)?;
        let worst = samples
            .iter()
            .max_by(|a, b| a.scaled().total_cmp(&b.scaled()))
            .expect("nonempty");
        fits.push(CandidateFit {
            constant: c.clone(),
            max_scaled_gap: worst.scaled(),
            worst_q: worst.q,
        });
    }
    let selected = fits
        .iter()
        .min_by(|a, b| a.max_scaled_gap.total_cmp(&b.max_scaled_gap))
        .expect("nonempty")
        .constant
        .clone();
    Ok(Calibration { fits, selected })
}

/// `9σ_3(n)/(4n²)` from a fresh factorization.
pub fn scaled_sigma3(n: u64) -> Result<Rational> {
    let f = factorize(n)?;
    Ok(int(9) * f.sigma(3) / (int(4) * int(n) * int(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::tail_window;
    use crate::sieve::{find_composite_schinzel, find_schinzel};

    fn eps() -> Rational {
        default_epsilon()
    }

    fn range(lo: u64, hi: u64) -> SieveRange {
        SieveRange::new(lo, hi).unwrap()
    }

    #[test]
    fn eq1_examples() {
        for c in find_schinzel(1, range(2, 1000)).unwrap() {
            let r = eq1_eval(1, c.q, &eps()).unwrap();
            assert!(r.distance.is_zero() && r.satisfied);
        }
        // k=2, q=13: 13 + (5/4)·1 → 1/4
        let r = eq1_eval(2, 13, &eps()).unwrap();
        assert_eq!(r.value, ratio(1, 4));
        assert_eq!(r.distance.value(), &ratio(1, 4));
        assert!(!r.satisfied);
        assert!(eq1_eval(2, 11, &eps()).is_err());
        assert!(eq1_eval(2, 13, &ratio(0, 1)).is_err());
        let first_k3 = find_schinzel(3, range(2, 1_000_000)).unwrap();
        assert!(!first_k3.is_empty());
        assert!(eq1_eval(3, first_k3[0].q, &eps()).is_ok());
    }

    #[test]
    fn eq2_examples() {
        let r = eq2_eval(1, 3, 21, &eps()).unwrap();
        assert_eq!(r.distance.value(), &ratio(1, 3));
        for p in [3u64, 5, 7, 11] {
            for c in find_composite_schinzel(1, p, range(2, 10_000)).unwrap() {
                let r = eq2_eval(1, p, c.q, &eps()).unwrap();
                assert_eq!(r.distance.value(), &ratio(1, p as i64));
            }
        }
        let k2 = find_composite_schinzel(2, 5, range(2, 1_000_000)).unwrap();
        let r = eq2_eval(2, 5, k2[0].q, &eps()).unwrap();
        // σ_{−2}(5)·q + σ_{−2}(2): fractional part is that of 26q/25 + 5/4
        let expected = frac_part(&(ratio(26, 25) * int(k2[0].q) + ratio(5, 4)));
        assert_eq!(r.value, expected);
        assert!(eq2_eval(1, 3, 15, &eps()).is_err());
        assert!(eq2_eval(2, 2, 13, &eps()).is_err());
    }

    #[test]
    fn endgame_examples() {
        let e = endgame_eval(2, 3, 10, &eps()).unwrap();
        assert_eq!(e.result.value, ratio(1, 9));
        assert_eq!(e.result.distance.value(), &ratio(1, 9));
        assert!(e.lower_bound_holds);
        let e = endgame_eval(3, 5, 10, &eps()).unwrap();
        assert_eq!(e.result.value, ratio(4, 5));
        assert_eq!(e.result.distance.value(), &ratio(1, 5));
        assert!(e.lower_bound_holds);
        for q1 in (26..500u64).filter(|q| q % 7 != 0) {
            let e = endgame_eval(2, 7, q1, &eps()).unwrap();
            assert!(!e.result.distance.is_zero());
            assert!(e.lower_bound_holds);
        }
        assert!(endgame_eval(2, 3, 18, &eps()).is_err());
        assert!(endgame_eval(2, 4, 10, &eps()).is_err());
    }

    #[test]
    fn sigma3_window_examples() {
        let r = sigma3_window(13, &eps()).unwrap();
        let expected = ratio(2198, 13) + ratio(3096, 13 * 14) + ratio(3528, 13 * 14 * 15);
        assert_eq!(r.value, frac_part(&expected));
        assert_eq!(r.distance, tail_window(3, 13, 3).unwrap().distance);
        assert!(sigma3_window(11, &eps()).is_err());
        assert!(sigma3_window(25, &eps()).is_err());
        for q in (7..5_000u64).filter(|&q| q % 6 == 1 && is_prime(q)) {
            let w = sigma3_window(q, &eps()).unwrap();
            assert_eq!(w.distance, tail_window(3, q, 3).unwrap().distance);
            assert_eq!(frac_part(&(sigma3(q) / int(q))), ratio(1, q as i64));
        }
    }

    #[test]
    fn sigma3_constant_residuals() {
        let c = sigma3_constants(13).unwrap();
        assert!(c.first_term.is_zero());
        assert_eq!(c.third_term, ratio(3528, 2730) - ratio(28, 27));
        // the two orientations of the middle difference sum to 1 − 7/4
        assert_eq!(
            c.middle_difference.clone() + c.middle_difference_reversed.clone(),
            ratio(-3, 4)
        );
        assert!(sigma3_constants(7).is_err());
        assert!(sigma3_constants(19).is_err());
    }

    #[test]
    fn condition_i_examples() {
        let r = condition_i_eval(7, &ratio(19, 216), None).unwrap();
        assert_eq!(
            r.value,
            frac_part(&(ratio(9 * 344, 4 * 49) + ratio(19, 216)))
        );
        for n in [7u64, 15, 1001, 65_537] {
            let plain = condition_i_eval(n, &ratio(19, 216), None).unwrap();
            let shifted = condition_i_eval(n, &ratio(19, 216), Some(QuarterShift::Plus)).unwrap();
            assert_eq!(shifted.distance, frac_dist(&(plain.value + ratio(1, 4))));
        }
        assert!(condition_i_eval(1, &ratio(19, 216), None).is_err());
    }

    #[test]
    fn subset_examples() {
        let e = subset_expand(15).unwrap();
        assert_eq!(e.terms.len(), 4);
        assert_eq!(e.total(), ratio(9, 4) * ratio(3528, 225));
        assert_eq!(e.total(), int(9) * int(3528) / (int(4) * int(225)));
        assert_eq!(e.full_term(), &(ratio(9, 4) * int(15)));
        let p = subset_expand(101).unwrap();
        assert_eq!(p.terms, vec![ratio(9, 4 * 101 * 101), ratio(9 * 101, 4)]);
        let one = subset_expand(1).unwrap();
        assert_eq!(one.terms, vec![ratio(9, 4)]);
        assert_eq!(subset_expand(12), Err(Error::NotSquarefree(12)));
    }

    #[test]
    fn alpha_reconstructs_subset_sum() {
        for n in [15u64, 1001, 30_030, 2 * 3 * 5 * 7 * 11 * 13 * 17] {
            let primes = squarefree_primes(n).unwrap();
            let alpha = alpha_from_factors(&primes).unwrap();
            let p1 = int(primes[0]);
            let rebuilt = alpha.clone() * p1.clone() + alpha / (p1.clone() * p1);
            assert_eq!(rebuilt, subset_expand(n).unwrap().total());
            assert_eq!(rebuilt, scaled_sigma3(n).unwrap());
        }
        // k = 2, (5, 7): α = 9/(4·49) + 9·7/4
        assert_eq!(
            alpha_from_factors(&[5, 7]).unwrap(),
            ratio(9, 196) + ratio(63, 4)
        );
        assert_eq!(alpha_from_factors(&[11]).unwrap(), ratio(9, 4));
        assert_eq!(alpha_from_factors(&[5, 5]), Err(Error::DuplicatePrime(5)));
        assert_eq!(alpha_from_factors(&[]), Err(Error::Empty));
    }

    #[test]
    fn small_k_counts() {
        let empty = small_k_elimination(SmallK::K2, range(2, 3), &calibrated_constant()).unwrap();
        assert_eq!(empty.count(), 0);
        assert_eq!(empty.scanned, 0);
        let k1 = small_k_elimination(SmallK::K1, range(2, 10_000), &ratio(19, 216)).unwrap();
        assert_eq!(k1.scanned, 1229);
        for w in &k1.witnesses {
            assert!(w.q_or_n < 1_000);
        }
    }

    #[test]
    fn squarefree_exclusion_sum() {
        // x = 512: x^{1/9} = 2, k from 2 to 32
        let s = squarefree_exclusion(512).unwrap();
        let brute: u64 = (2..=32u64).map(|k| 1024 / (k * k)).sum();
        assert_eq!(s.sum, brute);
        let s = squarefree_exclusion(1_000_000).unwrap();
        // ≈ 2x/(x^{1/9} − 1/2), a small multiple of x^{8/9}
        assert!((s.sum as f64) < 3.0 * s.reference);
    }

    #[test]
    fn pattern_identity_on_constellations() {
        for k in 1..=3u32 {
            for c in find_schinzel(k, range(2, 300_000)).unwrap() {
                for e in 0..=5 {
                    assert!(pattern_sigma_identity(k, c.q, e).unwrap());
                }
            }
        }
    }

    #[test]
    fn window_gap_shrinks() {
        for k in 2..=3u32 {
            let qs: Vec<u64> = find_schinzel(k, range(2, 1_000_000))
                .unwrap()
                .iter()
                .map(|c| c.q)
                .collect();
            let q0 = qs[0];
            let a =
                window_approximation_gap(k, q0).unwrap().to_f64().unwrap() * (q0 as f64).powf(0.9);
            for &q in &qs[1..] {
                let g = window_approximation_gap(k, q).unwrap().to_f64().unwrap();
                assert!(g <= a * (q as f64).powf(-0.9), "k={k} q={q}");
            }
        }
    }
}
