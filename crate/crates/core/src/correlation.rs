//! Similarity factors, correlation coefficients and Gaussian orthant
//! probabilities.
//!
//! For two challenges the final delay differences `Φ · w` and `Φ' · w` are
//! jointly Gaussian with correlation `ρ = 2s/n − 1`, where `s` is the
//! similarity factor. Every closed form downstream is an orthant probability
//! of two or three such variables.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhiVector;

/// Slack allowed when an `asin` argument drifts outside `[-1, 1]`.
pub const ASIN_CLAMP_TOLERANCE: f64 = 1e-12;

/// Similarity factor `s ∈ {0, ½, 1, ..., n}`, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityFactor {
    twice: u32,
}

impl SimilarityFactor {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Accepts non-negative multiples of one half.
    pub fn new(value: f64) -> Result<Self> {
        let twice = value * 2.0;
        if value.is_nan() || value < 0.0 || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(Error::InvalidParameter(format!(
                "similarity factor must be a non-negative multiple of 0.5, got {value}"
            )));
        }
        Ok(Self { twice: twice as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// Half-integer factors arise exactly when the first entries differ.
    pub fn first_bits_equal(self) -> bool {
        self.twice & 1 == 0
    }

    pub fn validate(self, n: usize) -> Result<()> {
        if self.twice as usize > 2 * n {
            return Err(Error::InvalidParameter(format!("similarity factor {} exceeds n = {n}", self.value())));
        }
        Ok(())
    }

    /// `ρ = 2s/n − 1`, evaluated as `(2s − n) / n` so that `ρ(s)` and
    /// `ρ(n − s)` are exact negatives.
    pub fn rho(self, n: usize) -> f64 {
        (f64::from(self.twice) - n as f64) / n as f64
    }

    /// Every similarity factor realized by some challenge: `½, 1, ..., n`.
    pub fn realizable(n: usize) -> impl DoubleEndedIterator<Item = SimilarityFactor> {
        (1..=2 * n as u32).map(SimilarityFactor::from_twice)
    }
}

impl fmt::Display for SimilarityFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// `|S_ij|` (matching positions among `1..=n`) and whether the first entries agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchProfile {
    pub s_count: u32,
    pub first_bit_equal: bool,
}

impl MatchProfile {
    pub fn new(s_count: u32, first_bit_equal: bool) -> Self {
        Self { s_count, first_bit_equal }
    }

    /// `|D_ij| = n − |S_ij|`.
    pub fn d_count(self, n: usize) -> u32 {
        n as u32 - self.s_count
    }

    pub fn similarity_factor(self) -> SimilarityFactor {
        // first entries equal: s = ½ + (|S| − 1) + ½; otherwise s = |S| + ½
        let twice = 2 * self.s_count + u32::from(!self.first_bit_equal);
        SimilarityFactor::from_twice(twice)
    }

    pub fn from_similarity_factor(s: SimilarityFactor) -> Self {
        Self { s_count: s.twice / 2, first_bit_equal: s.first_bits_equal() }
    }

    pub fn rho(self, n: usize) -> f64 {
        self.similarity_factor().rho(n)
    }

    /// A profile is realizable iff `|S| ≤ n`, `|S| ≥ 1` when the first entries
    /// agree, and `|D| ≥ 1` when they differ.
    pub fn validate(self, n: usize) -> Result<()> {
        let ok = self.s_count as usize <= n
            && if self.first_bit_equal { self.s_count >= 1 } else { (self.s_count as usize) < n };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("match profile {self:?} is not realizable at n = {n}")))
        }
    }
}

/// The three pairwise correlations of `(Φ1, Φ2, Φ3)` with their match profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub rho12: f64,
    pub rho13: f64,
    pub rho23: f64,
    pub p12: MatchProfile,
    pub p13: MatchProfile,
    pub p23: MatchProfile,
}

impl CorrelationTriple {
    pub fn from_profiles(n: usize, p12: MatchProfile, p13: MatchProfile, p23: MatchProfile) -> Self {
        Self { rho12: p12.rho(n), rho13: p13.rho(n), rho23: p23.rho(n), p12, p13, p23 }
    }

    pub fn of(phi1: &PhiVector, phi2: &PhiVector, phi3: &PhiVector) -> Result<Self> {
        let n = phi1.n();
        Ok(Self::from_profiles(n, match_profile(phi1, phi2)?, match_profile(phi1, phi3)?, match_profile(phi2, phi3)?))
    }
}

/// Sizes of the matching index sets between two challenges.
pub fn match_profile(a: &PhiVector, b: &PhiVector) -> Result<MatchProfile> {
    a.check_same_n(b)?;
    let (a, b) = (a.as_slice(), b.as_slice());
    let n = a.len() - 1;
    let s_count = a[..n].iter().zip(&b[..n]).filter(|(x, y)| x == y).count() as u32;
    Ok(MatchProfile { s_count, first_bit_equal: a[0] == b[0] })
}

/// `s = ½·[φ_1 = φ'_1] + Σ_{i=2}^{n} [φ_i = φ'_i] + ½`.
pub fn similarity_factor(a: &PhiVector, b: &PhiVector) -> Result<SimilarityFactor> {
    a.check_same_n(b)?;
    let (a, b) = (a.as_slice(), b.as_slice());
    let n = a.len() - 1;
    let middle = a[1..n].iter().zip(&b[1..n]).filter(|(x, y)| x == y).count() as u32;
    Ok(SimilarityFactor::from_twice(u32::from(a[0] == b[0]) + 2 * middle + 1))
}

/// Correlation of the two delay differences, `2s/n − 1`.
pub fn pair_correlation(a: &PhiVector, b: &PhiVector) -> Result<f64> {
    Ok(similarity_factor(a, b)?.rho(a.n()))
}

/// `P[R_a = R_b] = ½ + asin(2s/n − 1)/π`.
pub fn response_similarity(a: &PhiVector, b: &PhiVector) -> Result<f64> {
    similarity_probability(similarity_factor(a, b)?, a.n())
}

/// Response similarity of any challenge pair with similarity factor `s`.
pub fn similarity_probability(s: SimilarityFactor, n: usize) -> Result<f64> {
    s.validate(n)?;
    Ok(0.5 + checked_asin(s.rho(n))? / PI)
}

/// `asin` with a small clamp for rounding; larger excursions are errors.
pub fn checked_asin(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho.abs() > 1.0 + ASIN_CLAMP_TOLERANCE {
        return Err(Error::CorrelationOutOfRange(rho));
    }
    Ok(rho.clamp(-1.0, 1.0).asin())
}

/// `P[X > 0, Y > 0]` for standard bivariate normals with correlation `rho`.
pub fn orthant2(rho: f64) -> Result<f64> {
    Ok(0.25 + checked_asin(rho)? / (2.0 * PI))
}

/// `P[X > 0, Y > 0, Z > 0]` for standard trivariate normals.
///
/// The triple is assumed to come from a valid correlation matrix.
pub fn orthant3(rho12: f64, rho13: f64, rho23: f64) -> Result<f64> {
    let sum = checked_asin(rho12)? + checked_asin(rho13)? + checked_asin(rho23)?;
    Ok(0.125 + sum / (4.0 * PI))
}

/// Number of positions of `S_12` that a third challenge keeps, as an exact
/// half-integer: `K = (|S13| + |S23| + |S12| − n) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeepCount {
    twice: i64,
}

impl KeepCount {
    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn is_integral(self) -> bool {
        self.twice & 1 == 0
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `Some(K)` when `K` is a non-negative integer.
    pub fn as_count(self) -> Option<u32> {
        (self.is_integral() && self.twice >= 0).then_some((self.twice / 2) as u32)
    }
}

pub fn keep_count(n: usize, s12: u32, s13: u32, s23: u32) -> KeepCount {
    KeepCount { twice: i64::from(s12) + i64::from(s13) + i64::from(s23) - n as i64 }
}

/// Necessary conditions on a correlation triple realized by three challenges:
/// `|ρ13 + ρ23| ≤ 1 + ρ12` and `|ρ13 − ρ23| ≤ 1 − ρ12`.
///
/// They follow from the triangle inequality for the weighted disagreement
/// `d = n(1 − ρ)/2` and from `d12 + d13 + d23 ≤ 2n`.
pub fn within_correlation_bounds(rho12: f64, rho13: f64, rho23: f64, tol: f64) -> bool {
    [rho12, rho13, rho23].iter().all(|r| r.abs() <= 1.0 + tol)
        && (rho13 + rho23).abs() <= 1.0 + rho12 + tol
        && (rho13 - rho23).abs() <= 1.0 - rho12 + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{challenge_to_phi, Challenge};

    fn phi(v: &[i8]) -> PhiVector {
        PhiVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_similarity_factors() {
        let base = phi(&[1, 1, 1, 1, 1, 1]);
        let flip_first = phi(&[-1, 1, 1, 1, 1, 1]);
        let flip_all = phi(&[-1, -1, -1, -1, -1, 1]);
        assert_eq!(similarity_factor(&base, &flip_first).unwrap().value(), 4.5);
        assert_eq!(similarity_factor(&base, &flip_all).unwrap().value(), 0.5);
        assert_eq!(similarity_factor(&base, &base).unwrap().value(), 5.0);
    }

    #[test]
    fn worked_similarities() {
        let base = phi(&[1, 1, 1, 1, 1, 1]);
        let p = response_similarity(&base, &phi(&[-1, 1, 1, 1, 1, 1])).unwrap();
        assert!((p - 0.7952).abs() < 1e-4, "{p}");
        let p = response_similarity(&base, &phi(&[-1, -1, -1, -1, -1, 1])).unwrap();
        assert!((p - 0.2048).abs() < 1e-4, "{p}");
        assert_eq!(response_similarity(&base, &base).unwrap(), 1.0);
        let rho = pair_correlation(&base, &phi(&[-1, 1, 1, 1, 1, 1])).unwrap();
        assert!((rho - 0.8).abs() < 1e-15);
    }

    #[test]
    fn midpoint_correlation_is_zero() {
        assert_eq!(SimilarityFactor::new(16.0).unwrap().rho(32), 0.0);
        assert_eq!(SimilarityFactor::new(2.5).unwrap().rho(5), 0.0);
    }

    #[test]
    fn similarity_factor_parsing() {
        assert!(SimilarityFactor::new(1.25).is_err());
        assert!(SimilarityFactor::new(-0.5).is_err());
        assert_eq!(SimilarityFactor::new(3.5).unwrap().twice(), 7);
        assert!(SimilarityFactor::new(6.0).unwrap().validate(5).is_err());
    }

    #[test]
    fn orthant_limits() {
        assert_eq!(orthant2(0.0).unwrap(), 0.25);
        assert_eq!(orthant2(1.0).unwrap(), 0.5);
        assert_eq!(orthant2(-1.0).unwrap(), 0.0);
        assert_eq!(orthant3(0.0, 0.0, 0.0).unwrap(), 0.125);
        assert!((orthant3(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(orthant2(1.1).is_err());
        assert!(orthant3(0.0, -1.5, 0.0).is_err());
        assert!(orthant2(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn keep_count_examples() {
        let k = keep_count(8, 4, 6, 4);
        assert_eq!(k.as_count(), Some(3));
        assert_eq!(keep_count(8, 8, 8, 8).as_count(), Some(8));
        let k = keep_count(8, 4, 5, 4);
        assert!(!k.is_integral());
        assert_eq!(k.value(), 2.5);
        assert_eq!(k.as_count(), None);
    }

    #[test]
    fn profile_and_factor_agree() {
        let n = 9;
        for a in 0..(1u64 << n) {
            let pa = challenge_to_phi(&Challenge::from_index(n, a).unwrap());
            let pb = challenge_to_phi(&Challenge::from_index(n, (a * 37 + 11) % 512).unwrap());
            let prof = match_profile(&pa, &pb).unwrap();
            let s = similarity_factor(&pa, &pb).unwrap();
            assert_eq!(prof.similarity_factor(), s);
            assert_eq!(MatchProfile::from_similarity_factor(s), prof);
            let expected = if prof.first_bit_equal {
                2.0 * f64::from(prof.s_count) / n as f64 - 1.0
            } else {
                (2.0 * f64::from(prof.s_count) + 1.0) / n as f64 - 1.0
            };
            assert!((s.rho(n) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch() {
        let a = PhiVector::ones(4).unwrap();
        let b = PhiVector::ones(5).unwrap();
        assert!(similarity_factor(&a, &b).is_err());
        assert!(response_similarity(&a, &b).is_err());
        assert!(match_profile(&a, &b).is_err());
    }

    /// Census at n = 5 around the all-ones anchor, scored from bit comparisons.
    #[test]
    fn similarity_census_n5() {
        let n = 5;
        let anchor = PhiVector::ones(n).unwrap();
        let mut census = std::collections::BTreeMap::new();
        for code in 0..32u64 {
            let p = challenge_to_phi(&Challenge::from_index(n, code).unwrap());
            let direct = 0.5 * f64::from(u8::from(p.as_slice()[0] == 1))
                + (1..n).filter(|&i| p.as_slice()[i] == 1).count() as f64
                + 0.5;
            let s = similarity_factor(&anchor, &p).unwrap();
            assert_eq!(s.value(), direct);
            *census.entry(s.twice()).or_insert(0) += 1;
        }
        let expected: Vec<(u32, i32)> =
            vec![(1, 1), (2, 1), (3, 4), (4, 4), (5, 6), (6, 6), (7, 4), (8, 4), (9, 1), (10, 1)];
        assert_eq!(census.into_iter().collect::<Vec<_>>(), expected);
    }
}
