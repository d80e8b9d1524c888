//! Star discrepancy, exponential sums, the Erdős–Turán bound with explicit
//! constants and van der Corput bound evaluation for `f(n) = αn + α/n²`.
//!
//! Point sets are generic over [`Scalar`]; the phases of `f` are always
//! reduced mod 1 in exact arithmetic before any rounding.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{factorial, frac_part, int, rational_pow, Rational};
use crate::criteria::alpha_from_factors;
use crate::error::{out_of_range, Error, Result};
use crate::scalar::Scalar;
use crate::sieve::{primes_in, SieveRange};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    alpha: Rational,
    y: u64,
    length: u64,
}

impl SequenceSpec {
    pub fn new(alpha: Rational, y: u64, length: u64) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(out_of_range("alpha", "> 0", &alpha));
        }
        if y < 2 {
            return Err(out_of_range("y", ">= 2", y));
        }
        if length == 0 {
            return Err(out_of_range("length", ">= 1", 0));
        }
        Ok(SequenceSpec { alpha, y, length })
    }

    /// The interval `[y, 2y]`.
    pub fn dyadic(alpha: Rational, y: u64) -> Result<Self> {
        Self::new(alpha, y, y + 1)
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// `f(n) = αn + α/n²`, exact.
    pub fn phase(&self, n: u64) -> Rational {
        let m = int(n);
        self.alpha.clone() * m.clone() + self.alpha.clone() / (m.clone() * m)
    }

    pub fn arguments(&self) -> impl Iterator<Item = u64> {
        self.y..self.y + self.length
    }
}

/// `{f(n)}` for `n = y … y+length−1`, reduced exactly then rounded once.
pub fn fractional_parts<S: Scalar>(spec: &SequenceSpec) -> Vec<S> {
    spec.arguments()
        .map(|n| S::from_rational(&frac_part(&spec.phase(n))))
        .collect()
}

/// `D*_N = max_i max(i/N − x_(i), x_(i) − (i−1)/N)` over the sorted points.
pub fn star_discrepancy<S: Scalar>(points: &[S]) -> Result<S> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    if points
        .iter()
        .any(|x| *x < S::zero() || *x >= S::one() || x.partial_cmp(x).is_none())
    {
        return Err(Error::Precondition("points must lie in [0, 1)".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = S::from_count(sorted.len());
    let mut best = S::zero();
    for (i, x) in sorted.iter().enumerate() {
        let above = S::from_count(i + 1) / n.clone() - x.clone();
        let below = x.clone() - S::from_count(i) / n.clone();
        for d in [above, below] {
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

const CHUNK: usize = 256;

/// `|Σ_n e(h·x_n)|`; fixed-size chunks are summed in parallel and combined
/// in chunk order, so the result does not depend on scheduling.
pub fn exp_sum_points<S: Scalar>(points: &[S], h: u64) -> f64 {
    let partial: Vec<(f64, f64)> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk.iter().fold((0.0, 0.0), |(re, im), x| {
                let theta = TAU * x.frac_of_multiple(h);
                (re + theta.cos(), im + theta.sin())
            })
        })
        .collect();
    let (re, im) = partial
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    re.hypot(im)
}

/// `|Σ_{n} e(h f(n))|` with every phase `{h f(n)}` reduced exactly.
pub fn exp_sum(spec: &SequenceSpec, h: u64) -> Result<f64> {
    if h == 0 {
        return Err(out_of_range("h", ">= 1", 0));
    }
    Ok(exp_sum_points(&fractional_parts::<Rational>(spec), h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EtParams {
    h_max: u64,
}

impl EtParams {
    pub fn new(h_max: u64) -> Result<Self> {
        if h_max == 0 {
            return Err(out_of_range("H", ">= 1", 0));
        }
        Ok(EtParams { h_max })
    }

    /// `H = ⌈ln⁷ x⌉`.
    pub fn for_range(x: u64) -> Result<Self> {
        Self::new(((x as f64).ln().powi(7)).ceil().max(1.0) as u64)
    }

    pub fn h_max(&self) -> u64 {
        self.h_max
    }
}

/// Normalized Erdős–Turán bound
/// `D*_N ≤ 1/(H+1) + (3/N) Σ_{h≤H} |Σ_n e(h x_n)| / h`.
pub fn et_bound<S: Scalar>(points: &[S], params: EtParams) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    let sums: Vec<f64> = (1..=params.h_max)
        .map(|h| exp_sum_points(points, h))
        .collect();
    Ok(et_bound_from_sums(points.len(), &sums))
}

fn et_bound_from_sums(n: usize, sums: &[f64]) -> f64 {
    let h_max = sums.len() as f64;
    let weighted: f64 = sums
        .iter()
        .enumerate()
        .map(|(j, s)| s / (j + 1) as f64)
        .sum();
    1.0 / (h_max + 1.0) + 3.0 * weighted / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VdcParams {
    ell: u32,
}

impl VdcParams {
    /// `ℓ ∈ [2, 8]`, so that `C = 14Q ≤ 2^13`.
    pub fn new(ell: u32) -> Result<Self> {
        if !(2..=8).contains(&ell) {
            return Err(out_of_range("ell", "2..=8", ell));
        }
        Ok(VdcParams { ell })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// `Q = 2^{ℓ+1}`
    pub fn q(&self) -> u64 {
        1 << (self.ell + 1)
    }

    /// `C = 14Q`
    pub fn c(&self) -> u64 {
        14 * self.q()
    }
}

/// Whether the van der Corput first term carries an extra factor `α`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VdcAlphaFactor {
    #[default]
    Include,
    Omit,
}

/// `d^j/dn^j [α/n²] = α (−1)^j (j+1)! / n^{j+2}`, exact.
pub fn reciprocal_square_derivative(alpha: &Rational, j: u32, n: &Rational) -> Rational {
    let mut v = alpha.clone() * int(factorial(u64::from(j) + 1)) / rational_pow(n, j + 2);
    if j % 2 == 1 {
        v = -v;
    }
    v
}

/// `f^{(j)}(n)` for `f(n) = αn + α/n²`.
pub fn phase_derivative(alpha: &Rational, j: u32, n: &Rational) -> Rational {
    let linear = match j {
        0 => alpha.clone() * n.clone(),
        1 => alpha.clone(),
        _ => Rational::zero(),
    };
    linear + reciprocal_square_derivative(alpha, j, n)
}

/// Two-term van der Corput expression evaluated with constant 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VdcBound {
    pub h: u64,
    /// `f^{(ℓ+1)}(y)`
    pub derivative: f64,
    /// `y (h [α] |f^{(ℓ+1)}(y)|)^{1/(4Q−2)}`
    pub first_term: f64,
    /// `1 / (h |f^{(ℓ+1)}(y)|)`
    pub second_term: f64,
    pub total: f64,
    /// Always true: the constant is a placeholder, not a theorem.
    pub heuristic_constant: bool,
}

pub fn vdc_bound(
    spec: &SequenceSpec,
    h: u64,
    params: VdcParams,
    factor: VdcAlphaFactor,
) -> Result<VdcBound> {
    if h == 0 {
        return Err(out_of_range("h", ">= 1", 0));
    }
    let deriv = phase_derivative(&spec.alpha, params.ell + 1, &int(spec.y));
    let magnitude = deriv.abs();
    let mut inner = magnitude.clone() * int(h);
    if factor == VdcAlphaFactor::Include {
        inner *= spec.alpha.clone();
    }
    let exponent = 1.0 / (4.0 * params.q() as f64 - 2.0);
    let first_term = spec.y as f64
        * ToPrimitive::to_f64(&inner)
            .unwrap_or(f64::NAN)
            .powf(exponent);
    let second_term = ToPrimitive::to_f64(&(magnitude * int(h)).recip()).unwrap_or(f64::INFINITY);
    Ok(VdcBound {
        h,
        derivative: ToPrimitive::to_f64(&deriv).unwrap_or(f64::NAN),
        first_term,
        second_term,
        total: first_term + second_term,
        heuristic_constant: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub alpha: Rational,
    pub y: u64,
    pub length: u64,
    #[serde(rename = "H")]
    pub h_max: u64,
    pub ell: u32,
    pub true_discrepancy: f64,
    pub et_bound: f64,
    #[serde(skip)]
    pub exp_sums: Vec<f64>,
    #[serde(skip)]
    pub vdc_bounds: Vec<VdcBound>,
    pub violations: Vec<String>,
}

/// Exact discrepancy, Erdős–Turán bound and the per-`h` tables for one spec.
pub fn discrepancy_report(
    spec: &SequenceSpec,
    et: EtParams,
    vdc: VdcParams,
    factor: VdcAlphaFactor,
) -> Result<DiscrepancyReport> {
    let points = fractional_parts::<Rational>(spec);
    let exact = star_discrepancy(&points)?;
    let true_discrepancy = Scalar::to_f64(&exact);
    let exp_sums: Vec<f64> = (1..=et.h_max).map(|h| exp_sum_points(&points, h)).collect();
    let et_value = et_bound_from_sums(points.len(), &exp_sums);
    let vdc_bounds = (1..=et.h_max)
        .map(|h| vdc_bound(spec, h, vdc, factor))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    if et_value < true_discrepancy {
        violations.push(format!(
            "et_bound {et_value} < star discrepancy {true_discrepancy}"
        ));
    }
    let n = points.len() as i64;
    let floor = Rational::new(BigInt::one(), BigInt::from(2 * n));
    if exact < floor || exact > Rational::one() {
        violations.push(format!("star discrepancy {} outside [1/(2N), 1]", exact));
    }
    Ok(DiscrepancyReport {
        alpha: spec.alpha.clone(),
        y: spec.y,
        length: spec.length,
        h_max: et.h_max,
        ell: vdc.ell,
        true_discrepancy,
        et_bound: et_value,
        exp_sums,
        vdc_bounds,
        violations,
    })
}

/// Position of `α` relative to the bands `[y^ℓ L^{−C}, y^ℓ L^C]`, `L = ln x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "ell")]
pub enum AlphaRegime {
    /// Inside the excluded band around `y^ℓ`.
    Band(u32),
    /// Strictly between the bands of `ℓ` and `ℓ+1`.
    Between(u32),
    Outside,
}

/// Classifies `α` for `ℓ ∈ [2, 9]` with band exponent `c_exp`, on a log scale.
pub fn classify_alpha(alpha: &Rational, y: u64, x: u64, c_exp: f64) -> AlphaRegime {
    let la = ToPrimitive::to_f64(alpha).unwrap_or(f64::NAN).ln();
    let ly = (y as f64).ln();
    let width = c_exp * (x as f64).ln().ln();
    for ell in 2..=9u32 {
        let centre = f64::from(ell) * ly;
        if (la - centre).abs() <= width {
            return AlphaRegime::Band(ell);
        }
        let next = f64::from(ell + 1) * ly;
        if ell < 9 && la > centre + width && la < next - width {
            return AlphaRegime::Between(ell);
        }
    }
    AlphaRegime::Outside
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSample {
    pub primes: Vec<u64>,
    pub regime: AlphaRegime,
    /// `p_1² < α < x`
    pub alpha_in_range: bool,
    /// `N·D* ≤ y / ln⁶ y`
    pub meets_target: bool,
    pub h_capped: bool,
    pub report: DiscrepancyReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub x: u64,
    /// Number of prime factors per tuple (≥ 2).
    pub factors: usize,
    pub samples: usize,
    pub seed: u64,
    /// Upper limit on `H`; the nominal `⌈ln⁷ x⌉` is astronomically large at desk scale.
    pub h_cap: u64,
    pub ell: u32,
}

/// Random squarefree tuples `x^{1/9} < p_1 < … < p_k`, `Π p_i ≤ x`, each turned
/// into the sequence `α n + α/n²` over `[p_1, 2p_1]`.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepSample>> {
    if config.factors < 2 {
        return Err(out_of_range("factors", ">= 2", config.factors));
    }
    let x = config.x;
    let floor = (x as f64).powf(1.0 / 9.0).floor() as u64 + 1;
    let cap = (x as f64).powf(1.0 / config.factors as f64).ceil() as u64;
    let small = primes_in(SieveRange::new(floor.max(2), cap.max(floor.max(2)))?);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let nominal = EtParams::for_range(x)?;
    let et = EtParams::new(nominal.h_max().min(config.h_cap))?;
    let vdc = VdcParams::new(config.ell)?;
    let mut tuples = Vec::new();
    let mut attempts = 0;
    while tuples.len() < config.samples && attempts < 1000 * config.samples.max(1) {
        attempts += 1;
        let Some(tuple) = random_tuple(&small, config.factors, x, &mut rng) else {
            continue;
        };
        tuples.push(tuple);
    }
    tuples
        .into_iter()
        .map(|primes| {
            let alpha = alpha_from_factors(&primes)?;
            let y = primes[0];
            let spec = SequenceSpec::dyadic(alpha.clone(), y)?;
            let report = discrepancy_report(&spec, et, vdc, VdcAlphaFactor::Include)?;
            let p1sq = int(y * y);
            let alpha_in_range = p1sq < alpha && alpha < int(x);
            let target = y as f64 / (y as f64).ln().powi(6);
            let meets_target = report.true_discrepancy * spec.length as f64 <= target;
            Ok(SweepSample {
                regime: classify_alpha(&alpha, y, x, vdc.c() as f64),
                alpha_in_range,
                meets_target,
                h_capped: et.h_max() < nominal.h_max(),
                primes,
                report,
            })
        })
        .collect()
}

fn random_tuple(small: &[u64], k: usize, x: u64, rng: &mut ChaCha8Rng) -> Option<Vec<u64>> {
    let mut chosen: Vec<u64> = small.choose_multiple(rng, k - 1).copied().collect();
    chosen.sort_unstable();
    let head: u128 = chosen.iter().map(|&p| u128::from(p)).product();
    // largest factor drawn uniformly from the admissible primes above the others
    let top_max = (u128::from(x) / head) as u64;
    let last = *chosen.last()?;
    if top_max <= last {
        return None;
    }
    let candidates = primes_in(SieveRange::new(last + 1, top_max).ok()?);
    let top = *candidates.choose(rng)?;
    chosen.push(top);
    Some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::oracle::{
        central_difference_reciprocal_square, exp_sum_reverse, star_discrepancy_brute,
    };
    use rand::Rng;

    #[test]
    fn fractional_parts_examples() {
        let spec = SequenceSpec::new(int(1), 5, 4).unwrap();
        let parts: Vec<Rational> = fractional_parts(&spec);
        assert_eq!(parts, (5..9).map(|n| ratio(1, n * n)).collect::<Vec<_>>());
        let spec = SequenceSpec::new(ratio(1, 2), 2, 2).unwrap();
        assert_eq!(
            fractional_parts::<Rational>(&spec),
            vec![ratio(1, 8), ratio(5, 9)]
        );
        let f: Vec<f64> = fractional_parts(&spec);
        assert_eq!(f, vec![0.125, 5.0 / 9.0]);
        assert!(SequenceSpec::new(int(0), 5, 4).is_err());
        assert!(SequenceSpec::new(int(1), 1, 4).is_err());
    }

    #[test]
    fn discrepancy_examples() {
        let n = 16;
        let lattice: Vec<Rational> = (0..n).map(|i| ratio(i, n)).collect();
        assert_eq!(star_discrepancy(&lattice).unwrap(), ratio(1, n));
        assert_eq!(star_discrepancy(&[0.0f64; 7]).unwrap(), 1.0);
        let pts = [0.1f64, 0.3, 0.6, 0.8];
        assert_eq!(
            star_discrepancy(&pts).unwrap(),
            star_discrepancy_brute(&pts)
        );
        assert!((star_discrepancy(&pts).unwrap() - 0.2).abs() < 1e-15);
        let mid: Vec<Rational> = (0..n).map(|i| ratio(2 * i + 1, 2 * n)).collect();
        assert_eq!(star_discrepancy(&mid).unwrap(), ratio(1, 2 * n));
        assert!(star_discrepancy::<f64>(&[]).is_err());
        assert!(star_discrepancy(&[1.0f64]).is_err());
    }

    #[test]
    fn discrepancy_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=200usize {
            let f: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            assert_eq!(star_discrepancy(&f).unwrap(), star_discrepancy_brute(&f));
            let single: Vec<f32> = f.iter().map(|&v| v as f32).filter(|&v| v < 1.0).collect();
            assert_eq!(
                star_discrepancy(&single).unwrap(),
                star_discrepancy_brute(&single)
            );
            let r: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(0..997), 997)).collect();
            assert_eq!(star_discrepancy(&r).unwrap(), star_discrepancy_brute(&r));
        }
    }

    #[test]
    fn exp_sum_examples() {
        let spec = SequenceSpec::new(int(2), 3, 10).unwrap();
        let zeros = vec![Rational::zero(); 10];
        assert!((exp_sum_points(&zeros, 3) - 10.0).abs() < 1e-12);
        let halves: Vec<Rational> = (0..10).map(|n| frac_part(&ratio(n, 2))).collect();
        assert!(exp_sum_points(&halves, 1) < 1e-12);
        assert!(exp_sum(&spec, 0).is_err());

        let spec = SequenceSpec::new(ratio(665_857, 470_832), 100, 100).unwrap();
        let pts = fractional_parts::<Rational>(&spec);
        let direct = exp_sum_reverse(&pts, 1);
        assert!((exp_sum(&spec, 1).unwrap() - direct).abs() < 1e-8);
    }

    #[test]
    fn et_bound_examples() {
        let n = 64;
        let lattice: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let b = et_bound(&lattice, EtParams::new(n as u64).unwrap()).unwrap();
        assert!(b >= star_discrepancy(&lattice).unwrap());
        let zeros = vec![0.0f64; 50];
        for h in [1, 5, 40] {
            assert!(et_bound(&zeros, EtParams::new(h).unwrap()).unwrap() >= 1.0);
        }
        assert!(EtParams::new(0).is_err());
    }

    #[test]
    fn et_bound_dominates_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let pts: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
            let d = star_discrepancy(&pts).unwrap();
            assert!(et_bound(&pts, EtParams::new(50).unwrap()).unwrap() >= d);
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            reciprocal_square_derivative(&int(1), 1, &int(2)),
            ratio(-1, 4)
        );
        assert_eq!(phase_derivative(&int(3), 1, &int(2)), int(3) - ratio(3, 4));
        assert_eq!(phase_derivative(&int(3), 0, &int(2)), int(6) + ratio(3, 4));
        let alpha = ratio(7, 3);
        let n = int(1000);
        let step = ratio(1, 100);
        for j in 1..=10 {
            let exact = reciprocal_square_derivative(&alpha, j, &n);
            let fd = central_difference_reciprocal_square(&alpha, j, &n, &step);
            let rel = ((fd - exact.clone()) / exact).abs();
            assert!(rel < ratio(1, 1_000_000), "j={j} rel={rel}");
        }
    }

    #[test]
    fn vdc_params_and_bounds() {
        assert!(VdcParams::new(1).is_err());
        assert!(VdcParams::new(9).is_err());
        for ell in 2..=8 {
            let p = VdcParams::new(ell).unwrap();
            assert_eq!(p.q(), 1 << (ell + 1));
            assert!(p.c() <= 1 << 13);
        }
        let spec = SequenceSpec::dyadic(ratio(123_457, 3), 500).unwrap();
        let params = VdcParams::new(3).unwrap();
        let mut prev = 0.0;
        for h in 1..=30 {
            let b = vdc_bound(&spec, h, params, VdcAlphaFactor::Include).unwrap();
            assert!(b.total > 0.0 && b.heuristic_constant);
            assert!(b.first_term > prev);
            prev = b.first_term;
            let omit = vdc_bound(&spec, h, params, VdcAlphaFactor::Omit).unwrap();
            assert!(omit.first_term < b.first_term);
            assert_eq!(omit.second_term, b.second_term);
        }
    }

    #[test]
    fn report_has_no_violations() {
        let spec = SequenceSpec::dyadic(alpha_from_factors(&[5, 7, 11]).unwrap(), 5).unwrap();
        let r = discrepancy_report(
            &spec,
            EtParams::new(20).unwrap(),
            VdcParams::new(2).unwrap(),
            VdcAlphaFactor::Include,
        )
        .unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.exp_sums.len(), 20);
        assert_eq!(r.vdc_bounds.len(), 20);
    }

    #[test]
    fn sweep_alpha_range() {
        let cfg = SweepConfig {
            x: 1_000_000,
            factors: 3,
            samples: 10,
            seed: 1,
            h_cap: 16,
            ell: 2,
        };
        let samples = sweep(&cfg).unwrap();
        assert_eq!(samples.len(), 10);
        for s in &samples {
            assert!(s.alpha_in_range, "{:?}", s.primes);
            assert!(s.report.violations.is_empty());
            assert!(s.h_capped);
            assert!(s.primes.iter().product::<u64>() <= cfg.x);
        }
        assert_eq!(sweep(&cfg).unwrap(), samples);
    }

    #[test]
    fn classify_regimes() {
        // tiny band exponent: α = y^3 sits in band 3
        assert_eq!(
            classify_alpha(&int(1_000_000), 100, 1_000_000, 0.01),
            AlphaRegime::Band(3)
        );
        assert_eq!(
            classify_alpha(&int(100_000), 100, 1_000_000, 0.01),
            AlphaRegime::Between(2)
        );
        assert_eq!(
            classify_alpha(&int(7), 100, 1_000_000, 0.01),
            AlphaRegime::Outside
        );
    }
}
