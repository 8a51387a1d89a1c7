//! Conditional response entropy and expected predictability.
//!
//! Entropies are in bits. Expected values average the per-challenge Shannon
//! entropy, min-entropy and optimal accuracy over the whole challenge space,
//! excluding the known challenges themselves.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bins::{bin_size_1, count_to_f64, feasible_region, profile_for_rho};
use crate::correlation::{similarity_probability, within_correlation_bounds, MatchProfile, SimilarityFactor};
use crate::error::{Error, Result};
use crate::model::Response;
use crate::prediction::cond_pmf_2_from_rhos;

/// Shannon entropy, min-entropy and optimal accuracy of one binary response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub shannon: f64,
    pub min_entropy: f64,
    pub accuracy: f64,
}

impl EntropyReport {
    pub fn from_pmf(p: f64) -> Self {
        let accuracy = p.max(1.0 - p);
        Self { shannon: binary_entropy(p), min_entropy: 0.0 - accuracy.log2(), accuracy }
    }
}

/// `H(p) = −p log2 p − (1−p) log2(1−p)` with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    (term(p) + term(1.0 - p)).clamp(0.0, 1.0)
}

/// Entropy of a response given one known response at similarity `s`.
pub fn cond_entropy_1(s: SimilarityFactor, n: usize) -> Result<EntropyReport> {
    Ok(EntropyReport::from_pmf(similarity_probability(s, n)?))
}

/// Entropy of a response given two known responses.
pub fn cond_entropy_2(rho12: f64, rho13: f64, rho23: f64, r1: Response, r2: Response) -> Result<EntropyReport> {
    if !within_correlation_bounds(rho12, rho13, rho23, 1e-9) {
        return Err(Error::InfeasibleTriple(format!("({rho12}, {rho13}, {rho23})")));
    }
    Ok(EntropyReport::from_pmf(cond_pmf_2_from_rhos(rho12, rho13, rho23, r1, r2)?))
}

/// Bin weights used when averaging over one anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneAnchorWeights {
    /// The true bin sizes: `C(n−1, s−1)` for integer `s`, `C(n−1, ⌊s⌋)` otherwise.
    Census,
    /// `C(n−1, s)` for integer `s` and `C(n−1, ⌊s⌋−1)` otherwise, over
    /// `s ∈ {0, ½, ..., n−½}`. These sum to `2^n − 1` as well but pair each
    /// probability with the size of a neighbouring bin.
    Shifted,
}

impl OneAnchorWeights {
    fn weight(self, s: SimilarityFactor, n: usize) -> Result<BigUint> {
        match self {
            OneAnchorWeights::Census => bin_size_1(s, n),
            OneAnchorWeights::Shifted => {
                let t = i64::from(s.twice());
                let k = if t % 2 == 0 { t / 2 } else { (t - 1) / 2 - 1 };
                Ok(crate::combinatorics::binomial_signed(n as i64 - 1, k))
            }
        }
    }
}

/// Weighted average of reports with exact integer weights.
#[derive(Debug, Default)]
struct Accumulator {
    shannon: f64,
    min_entropy: f64,
    accuracy: f64,
    total: BigUint,
}

impl Accumulator {
    fn add(&mut self, report: EntropyReport, weight: &BigUint) {
        if weight.is_zero() {
            return;
        }
        let w = count_to_f64(weight);
        self.shannon += w * report.shannon;
        self.min_entropy += w * report.min_entropy;
        self.accuracy += w * report.accuracy;
        self.total += weight;
    }

    fn finish(self) -> Result<WeightedReport> {
        if self.total.is_zero() {
            return Err(Error::InvalidParameter("no challenges to average over".into()));
        }
        let t = count_to_f64(&self.total);
        Ok(WeightedReport {
            report: EntropyReport {
                shannon: self.shannon / t,
                min_entropy: self.min_entropy / t,
                accuracy: self.accuracy / t,
            },
            total: self.total,
        })
    }
}

/// An expected report together with the number of challenges averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedReport {
    pub report: EntropyReport,
    #[serde(with = "crate::big_serde")]
    pub total: BigUint,
}

/// Expected entropies and accuracy of a fresh challenge given one known CRP.
pub fn expected_report_1(n: usize) -> Result<EntropyReport> {
    Ok(expected_report_1_with(n, OneAnchorWeights::Census)?.report)
}

/// [`expected_report_1`] under a chosen weighting.
pub fn expected_report_1_with(n: usize, weights: OneAnchorWeights) -> Result<WeightedReport> {
    check_n(n)?;
    let mut acc = Accumulator::default();
    // the anchor itself (s = n) is excluded; s = 0 only matters for Shifted
    for twice in 0..2 * n as u32 {
        let s = SimilarityFactor::from_twice(twice);
        let w = weights.weight(s, n)?;
        acc.add(EntropyReport::from_pmf(similarity_probability(s, n)?), &w);
    }
    acc.finish()
}

/// Expected entropies and accuracy given two known CRPs at correlation `rho12`.
pub fn expected_report_2(n: usize, rho12: f64, r1: Response, r2: Response) -> Result<EntropyReport> {
    Ok(expected_report_2_weighted(n, rho12, r1, r2)?.report)
}

/// [`expected_report_2`] with the number of challenges averaged.
pub fn expected_report_2_weighted(n: usize, rho12: f64, r1: Response, r2: Response) -> Result<WeightedReport> {
    check_n(n)?;
    let p12 = profile_for_rho(n, rho12)?;
    expected_report_2_for(n, p12, r1, r2)
}

/// Average over every challenge other than the two anchors, accumulated in
/// ascending `(|S13|, |S23|, case)` order.
pub fn expected_report_2_for(n: usize, p12: MatchProfile, r1: Response, r2: Response) -> Result<WeightedReport> {
    let rho12 = p12.rho(n);
    cond_pmf_2_from_rhos(rho12, 0.0, 0.0, r1, r2)?;
    let full = n as u32;
    let mut acc = Accumulator::default();
    for cell in feasible_region(n, p12)? {
        let key = cell.key;
        let is_anchor = |s: u32, first: bool| s == full && first;
        let mut weight = cell.count;
        if is_anchor(key.s13, key.case.first_equal_13()) || is_anchor(key.s23, key.case.first_equal_23()) {
            // Φ3 = Φ1 or Φ3 = Φ2: a cell of exactly one challenge
            weight -= 1u32;
        }
        acc.add(EntropyReport::from_pmf(key.pmf(r1, r2)?), &weight);
    }
    acc.finish()
}

/// One row per response pattern `(r1, r2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseBreakdown {
    pub r1: Response,
    pub r2: Response,
    pub report: Option<EntropyReport>,
}

/// [`expected_report_2`] for all four response patterns; degenerate patterns
/// (impossible evidence) carry no report.
pub fn expected_report_2_breakdown(n: usize, rho12: f64) -> Result<Vec<ResponseBreakdown>> {
    let mut out = Vec::with_capacity(4);
    for r1 in [Response::Plus, Response::Minus] {
        for r2 in [Response::Plus, Response::Minus] {
            let report = match expected_report_2(n, rho12, r1, r2) {
                Ok(r) => Some(r),
                Err(Error::DegenerateEvidence(_)) => None,
                Err(e) => return Err(e),
            };
            out.push(ResponseBreakdown { r1, r2, report });
        }
    }
    Ok(out)
}

/// A point of the one-anchor entropy curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: SimilarityFactor,
    pub p: f64,
    pub report: EntropyReport,
    #[serde(with = "crate::big_serde")]
    pub bin_size: BigUint,
}

/// Response similarity, accuracy and entropies for every realizable `s`.
pub fn entropy_curve(n: usize) -> Result<Vec<CurvePoint>> {
    check_n(n)?;
    SimilarityFactor::realizable(n)
        .map(|s| {
            let p = similarity_probability(s, n)?;
            Ok(CurvePoint { s, p, report: EntropyReport::from_pmf(p), bin_size: bin_size_1(s, n)? })
        })
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two stages, got n = {n}")));
    }
    Ok(())
}
