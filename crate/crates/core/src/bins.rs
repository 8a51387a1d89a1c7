//! Similarity, accuracy and entropy bins.
//!
//! Around one anchor, every challenge falls in exactly one similarity bin
//! `B(s)`, `s ∈ {½, 1, ..., n}`; accuracy and entropy bins are unions of (at
//! most two) similarity bins. Around two anchors the challenge space splits
//! into neighborhood cells keyed by `(|S13|, |S23|)` and the sign pattern of
//! the three first entries. Cells are counted exactly and their members can
//! be streamed or addressed by index.
//!
//! All match counts `|S_ij|` range over positions `1..=n`, first entry
//! included. With that convention `K = (|S12| + |S13| + |S23| − n)/2` is an
//! integer for every realizable cell.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, binomial_signed, unrank_colex, ColexSubsets};
use crate::correlation::{
    keep_count, match_profile, similarity_probability, CorrelationTriple, MatchProfile, SimilarityFactor,
};
use crate::entropy::EntropyReport;
use crate::error::{Error, Result};
use crate::model::{PhiVector, Response};
use crate::prediction::cond_pmf_2_from_rhos;

/// Default slack when matching a computed semimetric against a requested value.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Quantity used as the "radius" of a bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semimetric {
    SimilarityFactor,
    /// `P[R = R_anchor]` for one anchor; `P[R = +1 | r1, r2]` for two.
    ResponseSimilarity,
    Accuracy,
    ShannonEntropy,
    MinEntropy,
}

impl Semimetric {
    pub const ALL: [Semimetric; 5] = [
        Semimetric::SimilarityFactor,
        Semimetric::ResponseSimilarity,
        Semimetric::Accuracy,
        Semimetric::ShannonEntropy,
        Semimetric::MinEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Semimetric::SimilarityFactor => "similarity_factor",
            Semimetric::ResponseSimilarity => "response_similarity",
            Semimetric::Accuracy => "accuracy",
            Semimetric::ShannonEntropy => "shannon_entropy",
            Semimetric::MinEntropy => "min_entropy",
        }
    }

    /// Value of this semimetric for a challenge at similarity `s` from one anchor.
    pub fn one_anchor_value(self, s: SimilarityFactor, n: usize) -> Result<f64> {
        if self == Semimetric::SimilarityFactor {
            s.validate(n)?;
            return Ok(s.value());
        }
        let p = similarity_probability(s, n)?;
        Ok(self.of_probability(p))
    }

    /// Value of this semimetric for a two-anchor conditional pmf.
    pub fn two_anchor_value(self, pmf: f64) -> Result<f64> {
        if self == Semimetric::SimilarityFactor {
            return Err(Error::InvalidParameter("the similarity factor is not defined relative to two anchors".into()));
        }
        Ok(self.of_probability(pmf))
    }

    fn of_probability(self, p: f64) -> f64 {
        let report = EntropyReport::from_pmf(p);
        match self {
            Semimetric::SimilarityFactor => unreachable!(),
            Semimetric::ResponseSimilarity => p,
            Semimetric::Accuracy => report.accuracy,
            Semimetric::ShannonEntropy => report.shannon,
            Semimetric::MinEntropy => report.min_entropy,
        }
    }
}

impl fmt::Display for Semimetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semimetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Semimetric::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .or(match norm.as_str() {
                "s" | "similarity" => Some(Semimetric::SimilarityFactor),
                "p" | "probability" => Some(Semimetric::ResponseSimilarity),
                "shannon" => Some(Semimetric::ShannonEntropy),
                "min" => Some(Semimetric::MinEntropy),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown semimetric {s:?}")))
    }
}

/// A requested bin: all challenges whose semimetric equals `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub semimetric: Semimetric,
    pub value: f64,
    pub tolerance: f64,
}

impl BinSpec {
    pub fn new(semimetric: Semimetric, value: f64) -> Self {
        Self { semimetric, value, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn matches(&self, v: f64) -> bool {
        (v - self.value).abs() <= self.tolerance
    }

    fn check_range(&self) -> Result<()> {
        let ok = match self.semimetric {
            Semimetric::SimilarityFactor => self.value >= 0.0,
            Semimetric::ResponseSimilarity => (0.0..=1.0).contains(&self.value),
            Semimetric::Accuracy => (0.5..=1.0).contains(&self.value),
            Semimetric::ShannonEntropy | Semimetric::MinEntropy => (0.0..=1.0).contains(&self.value),
        };
        let ok = ok || (self.value - self.value.clamp(0.0, 1.0)).abs() <= self.tolerance;
        if ok && self.value.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{} value {} out of range", self.semimetric, self.value)))
        }
    }
}

// ---------------------------------------------------------------------------
// one anchor
// ---------------------------------------------------------------------------

/// Number of challenges at similarity factor `s` from any fixed anchor.
///
/// With `m` matching entries among positions `2..=n`, `s = m + 1` when the
/// first entries agree and `s = m + ½` otherwise, so the size is
/// `C(n−1, s−1)` for integer `s` and `C(n−1, ⌊s⌋)` for half-integer `s`.
pub fn bin_size_1(s: SimilarityFactor, n: usize) -> Result<BigUint> {
    s.validate(n)?;
    Ok(match middle_matches(s) {
        Some(m) => binomial(n as u64 - 1, u64::from(m)),
        None => BigUint::zero(),
    })
}

/// Matching entries among positions `2..=n` implied by `s`.
fn middle_matches(s: SimilarityFactor) -> Option<u32> {
    let t = s.twice();
    if s.first_bits_equal() {
        (t >= 2).then(|| t / 2 - 1)
    } else {
        Some((t - 1) / 2)
    }
}

/// Lazily streams `B(s, anchor)` in colexicographic order of the flipped
/// positions among `2..=n`.
pub fn enumerate_bin_1(anchor: &PhiVector, s: SimilarityFactor) -> Result<SimilarityBin> {
    let n = anchor.n();
    s.validate(n)?;
    let subsets = middle_matches(s).map(|m| ColexSubsets::new(n - 1, (n - 1) - m as usize));
    Ok(SimilarityBin { anchor: anchor.as_slice().to_vec(), flip_first: !s.first_bits_equal(), subsets })
}

/// Iterator returned by [`enumerate_bin_1`].
#[derive(Debug, Clone)]
pub struct SimilarityBin {
    anchor: Vec<i8>,
    flip_first: bool,
    subsets: Option<ColexSubsets>,
}

impl Iterator for SimilarityBin {
    type Item = PhiVector;

    fn next(&mut self) -> Option<PhiVector> {
        let flips = self.subsets.as_mut()?.next()?;
        let mut phis = self.anchor.clone();
        if self.flip_first {
            phis[0] = -phis[0];
        }
        for f in flips {
            phis[f + 1] = -phis[f + 1];
        }
        Some(PhiVector::from_raw(phis))
    }
}

/// The similarity factors whose semimetric value matches `spec`.
///
/// Accuracy and entropy values are shared by `s` and `n − s`, so up to two
/// factors come back; they are returned in ascending order.
pub fn semimetric_to_factors(spec: &BinSpec, n: usize) -> Result<Vec<SimilarityFactor>> {
    spec.check_range()?;
    let mut out = Vec::new();
    for s in SimilarityFactor::realizable(n) {
        if spec.matches(spec.semimetric.one_anchor_value(s, n)?) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(Error::Unreachable { semimetric: spec.semimetric.to_string(), value: spec.value, n });
    }
    Ok(out)
}

/// Size of the union bin selected by `spec`.
pub fn bin_size(spec: &BinSpec, n: usize) -> Result<BigUint> {
    semimetric_to_factors(spec, n)?.into_iter().map(|s| bin_size_1(s, n)).sum()
}

/// Streams every challenge in the union bin selected by `spec`.
pub fn enumerate_bin(anchor: &PhiVector, spec: &BinSpec) -> Result<impl Iterator<Item = PhiVector>> {
    let bins = semimetric_to_factors(spec, anchor.n())?
        .into_iter()
        .map(|s| enumerate_bin_1(anchor, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(bins.into_iter().flatten())
}

// ---------------------------------------------------------------------------
// two anchors
// ---------------------------------------------------------------------------

/// Agreement pattern of the first entries `(φ1,1, φ2,1, φ3,1)`.
///
/// The label marks the odd one out with `0`: `111` all equal, `110` the third
/// differs, `101` the second differs, `011` the first differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FirstBitCase {
    #[serde(rename = "111")]
    AllSame,
    #[serde(rename = "110")]
    ThirdDiffers,
    #[serde(rename = "101")]
    SecondDiffers,
    #[serde(rename = "011")]
    FirstDiffers,
}

impl FirstBitCase {
    pub fn label(self) -> &'static str {
        match self {
            FirstBitCase::AllSame => "111",
            FirstBitCase::ThirdDiffers => "110",
            FirstBitCase::SecondDiffers => "101",
            FirstBitCase::FirstDiffers => "011",
        }
    }

    pub fn anchors_agree(self) -> bool {
        matches!(self, FirstBitCase::AllSame | FirstBitCase::ThirdDiffers)
    }

    pub fn first_equal_13(self) -> bool {
        matches!(self, FirstBitCase::AllSame | FirstBitCase::SecondDiffers)
    }

    pub fn first_equal_23(self) -> bool {
        matches!(self, FirstBitCase::AllSame | FirstBitCase::FirstDiffers)
    }

    /// The two cases compatible with the anchors' own first entries.
    pub fn cases_for(anchors_agree: bool) -> [FirstBitCase; 2] {
        if anchors_agree {
            [FirstBitCase::AllSame, FirstBitCase::ThirdDiffers]
        } else {
            [FirstBitCase::SecondDiffers, FirstBitCase::FirstDiffers]
        }
    }

    fn classify(phi1: i8, phi2: i8, phi3: i8) -> Self {
        match (phi1 == phi2, phi1 == phi3) {
            (true, true) => FirstBitCase::AllSame,
            (true, false) => FirstBitCase::ThirdDiffers,
            (false, true) => FirstBitCase::SecondDiffers,
            (false, false) => FirstBitCase::FirstDiffers,
        }
    }
}

impl fmt::Display for FirstBitCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Identity of a two-anchor neighborhood cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub n: usize,
    pub s12: u32,
    pub s13: u32,
    pub s23: u32,
    pub case: FirstBitCase,
}

impl CellKey {
    /// The cell that a concrete third challenge falls in.
    pub fn locate(phi1: &PhiVector, phi2: &PhiVector, phi3: &PhiVector) -> Result<Self> {
        let p12 = match_profile(phi1, phi2)?;
        let p13 = match_profile(phi1, phi3)?;
        let p23 = match_profile(phi2, phi3)?;
        let case = FirstBitCase::classify(phi1.as_slice()[0], phi2.as_slice()[0], phi3.as_slice()[0]);
        Ok(Self { n: phi1.n(), s12: p12.s_count, s13: p13.s_count, s23: p23.s_count, case })
    }

    pub fn profile12(&self) -> MatchProfile {
        MatchProfile::new(self.s12, self.case.anchors_agree())
    }

    pub fn profile13(&self) -> MatchProfile {
        MatchProfile::new(self.s13, self.case.first_equal_13())
    }

    pub fn profile23(&self) -> MatchProfile {
        MatchProfile::new(self.s23, self.case.first_equal_23())
    }

    pub fn triple(&self) -> CorrelationTriple {
        CorrelationTriple::from_profiles(self.n, self.profile12(), self.profile13(), self.profile23())
    }

    /// Conditional pmf `P[R3 = +1 | r1, r2]` shared by every member.
    pub fn pmf(&self, r1: Response, r2: Response) -> Result<f64> {
        let t = self.triple();
        cond_pmf_2_from_rhos(t.rho12, t.rho13, t.rho23, r1, r2)
    }

    /// Free positions and selection sizes, or `None` if the cell is empty.
    fn plan(&self) -> Option<CellPlan> {
        let n = self.n as i64;
        let (s12, s13, s23) = (i64::from(self.s12), i64::from(self.s13), i64::from(self.s23));
        if s12 > n || s13 > n || s23 > n {
            return None;
        }
        let k = keep_count(self.n, self.s12, self.s13, self.s23).as_count()? as i64;
        let d12 = n - s12;
        let x = s13 - k; // D12 positions agreeing with Φ1
        let y = s23 - k; // D12 positions agreeing with Φ2
        let (s_free, keep, d_free, matched) = match self.case {
            FirstBitCase::AllSame => (s12 - 1, k - 1, d12, x),
            FirstBitCase::ThirdDiffers => (s12 - 1, k, d12, x),
            FirstBitCase::SecondDiffers => (s12, k, d12 - 1, x - 1),
            FirstBitCase::FirstDiffers => (s12, k, d12 - 1, x),
        };
        if x < 0 || y < 0 || s_free < 0 || d_free < 0 {
            return None;
        }
        if keep < 0 || keep > s_free || matched < 0 || matched > d_free {
            return None;
        }
        Some(CellPlan {
            s_free: s_free as usize,
            keep: keep as usize,
            d_free: d_free as usize,
            matched: matched as usize,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct CellPlan {
    s_free: usize,
    keep: usize,
    d_free: usize,
    matched: usize,
}

impl CellPlan {
    fn keep_choices(&self) -> BigUint {
        binomial(self.s_free as u64, self.keep as u64)
    }

    fn match_choices(&self) -> BigUint {
        binomial(self.d_free as u64, self.matched as u64)
    }

    fn count(&self) -> BigUint {
        self.keep_choices() * self.match_choices()
    }
}

/// A non-empty neighborhood cell and its exact size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCell {
    pub key: CellKey,
    #[serde(with = "crate::big_serde")]
    pub count: BigUint,
}

/// Cell size from the closed-form counting rules.
///
/// With `K` kept positions of `S12`, `x = |S13| − K` and `y = |S23| − K`:
///
/// * `111`: `C(|S12|−1, K−1)·C(n−|S12|, x)`
/// * `110`: `C(|S12|−1, K)·C(n−|S12|, x)`
/// * `101`: `C(|S12|, K)·C(n−|S12|−1, x−1)`
/// * `011`: `C(|S12|, K)·C(n−|S12|−1, y−1)`
pub fn cell_count(key: &CellKey) -> Result<BigUint> {
    let count = raw_cell_count(key);
    if count.is_zero() {
        return Err(Error::InfeasibleCell(describe(key)));
    }
    Ok(count)
}

fn raw_cell_count(key: &CellKey) -> BigUint {
    let n = key.n as i64;
    let (s12, s13, s23) = (i64::from(key.s12), i64::from(key.s13), i64::from(key.s23));
    if s12 > n || s13 > n || s23 > n {
        return BigUint::zero();
    }
    let Some(k) = keep_count(key.n, key.s12, key.s13, key.s23).as_count() else {
        return BigUint::zero();
    };
    let k = i64::from(k);
    let (x, y) = (s13 - k, s23 - k);
    match key.case {
        FirstBitCase::AllSame => binomial_signed(s12 - 1, k - 1) * binomial_signed(n - s12, x),
        FirstBitCase::ThirdDiffers => binomial_signed(s12 - 1, k) * binomial_signed(n - s12, x),
        FirstBitCase::SecondDiffers => binomial_signed(s12, k) * binomial_signed(n - s12 - 1, x - 1),
        FirstBitCase::FirstDiffers => binomial_signed(s12, k) * binomial_signed(n - s12 - 1, y - 1),
    }
}

fn describe(key: &CellKey) -> String {
    format!("n={} |S12|={} |S13|={} |S23|={} case {}", key.n, key.s12, key.s13, key.s23, key.case)
}

/// Every non-empty cell around two anchors with match profile `p12`, in
/// ascending `(|S13|, |S23|, case)` order.
pub fn feasible_region(n: usize, p12: MatchProfile) -> Result<Vec<NeighborhoodCell>> {
    p12.validate(n)?;
    let mut cells = Vec::new();
    for s13 in 0..=n as u32 {
        for s23 in 0..=n as u32 {
            for case in FirstBitCase::cases_for(p12.first_bit_equal) {
                let key = CellKey { n, s12: p12.s_count, s13, s23, case };
                let count = raw_cell_count(&key);
                if !count.is_zero() {
                    cells.push(NeighborhoodCell { key, count });
                }
            }
        }
    }
    Ok(cells)
}

struct Layout {
    base: Vec<i8>,
    s_free: Vec<usize>,
    d_free: Vec<usize>,
}

impl Layout {
    fn new(phi1: &PhiVector, phi2: &PhiVector, key: &CellKey) -> Result<Self> {
        let p12 = match_profile(phi1, phi2)?;
        if phi1.n() != key.n || p12 != key.profile12() {
            return Err(Error::InfeasibleCell(format!(
                "anchors with profile {p12:?} do not belong to cell {}",
                describe(key)
            )));
        }
        let (a, b) = (phi1.as_slice(), phi2.as_slice());
        let n = key.n;
        let mut base = vec![1i8; n + 1];
        let mut s_free = Vec::new();
        let mut d_free = Vec::new();
        for i in 1..n {
            if a[i] == b[i] {
                s_free.push(i);
                base[i] = -a[i]; // flipped unless kept
            } else {
                d_free.push(i);
                base[i] = b[i]; // agrees with Φ2 unless matched to Φ1
            }
        }
        base[0] = match key.case {
            FirstBitCase::AllSame | FirstBitCase::SecondDiffers => a[0],
            FirstBitCase::ThirdDiffers => -a[0],
            FirstBitCase::FirstDiffers => b[0],
        };
        Ok(Self { base, s_free, d_free })
    }

    fn build(&self, phi1: &[i8], keep: &[usize], matched: &[usize]) -> PhiVector {
        let mut phis = self.base.clone();
        for &j in keep {
            let i = self.s_free[j];
            phis[i] = phi1[i];
        }
        for &j in matched {
            let i = self.d_free[j];
            phis[i] = phi1[i];
        }
        PhiVector::from_raw(phis)
    }
}

/// The `index`-th member of a cell.
///
/// Members are ordered by the colexicographic rank of the kept `S12`
/// positions, then of the `D12` positions taken from `Φ1`; this is the order
/// in which [`enumerate_neighborhood_2`] yields them.
pub fn construct_third(phi1: &PhiVector, phi2: &PhiVector, key: &CellKey, index: &BigUint) -> Result<PhiVector> {
    let layout = Layout::new(phi1, phi2, key)?;
    let plan = key.plan().ok_or_else(|| Error::InfeasibleCell(describe(key)))?;
    let count = plan.count();
    if *index >= count {
        return Err(Error::IndexOutOfRange { index: index.to_string(), count: count.to_string() });
    }
    let per_keep = plan.match_choices();
    let keep_rank = index / &per_keep;
    let match_rank = index % &per_keep;
    let keep = unrank_colex(plan.s_free, plan.keep, &keep_rank);
    let matched = unrank_colex(plan.d_free, plan.matched, &match_rank);
    Ok(layout.build(phi1.as_slice(), &keep, &matched))
}

/// Streams members of one cell.
pub struct CellMembers {
    phi1: Vec<i8>,
    layout: Layout,
    keep_iter: ColexSubsets,
    current_keep: Option<Vec<usize>>,
    match_iter: ColexSubsets,
    d_free: usize,
    matched: usize,
}

impl CellMembers {
    pub fn new(phi1: &PhiVector, phi2: &PhiVector, key: &CellKey) -> Result<Self> {
        let layout = Layout::new(phi1, phi2, key)?;
        let plan = key.plan().ok_or_else(|| Error::InfeasibleCell(describe(key)))?;
        let mut keep_iter = ColexSubsets::new(plan.s_free, plan.keep);
        let current_keep = keep_iter.next();
        Ok(Self {
            phi1: phi1.as_slice().to_vec(),
            layout,
            keep_iter,
            current_keep,
            match_iter: ColexSubsets::new(plan.d_free, plan.matched),
            d_free: plan.d_free,
            matched: plan.matched,
        })
    }
}

impl Iterator for CellMembers {
    type Item = PhiVector;

    fn next(&mut self) -> Option<PhiVector> {
        loop {
            let keep = self.current_keep.as_ref()?;
            if let Some(matched) = self.match_iter.next() {
                return Some(self.layout.build(&self.phi1, keep, &matched));
            }
            self.current_keep = self.keep_iter.next();
            self.match_iter = ColexSubsets::new(self.d_free, self.matched);
        }
    }
}

fn check_evidence(n: usize, p12: MatchProfile, r1: Response, r2: Response) -> Result<()> {
    let rho12 = p12.rho(n);
    cond_pmf_2_from_rhos(rho12, 0.0, 0.0, r1, r2).map(|_| ())
}

/// Cells around `(Φ1, r1)`, `(Φ2, r2)` whose semimetric matches `spec`.
pub fn neighborhood_cells(
    phi1: &PhiVector,
    phi2: &PhiVector,
    r1: Response,
    r2: Response,
    spec: &BinSpec,
) -> Result<Vec<NeighborhoodCell>> {
    spec.check_range()?;
    let n = phi1.n();
    let p12 = match_profile(phi1, phi2)?;
    check_evidence(n, p12, r1, r2)?;
    let mut out = Vec::new();
    for cell in feasible_region(n, p12)? {
        let value = spec.semimetric.two_anchor_value(cell.key.pmf(r1, r2)?)?;
        if spec.matches(value) {
            out.push(cell);
        }
    }
    Ok(out)
}

/// Streams up to `limit` members of each cell whose semimetric matches
/// `spec`; `None` streams every member.
pub fn enumerate_neighborhood_2(
    phi1: &PhiVector,
    phi2: &PhiVector,
    r1: Response,
    r2: Response,
    spec: &BinSpec,
    limit: Option<usize>,
) -> Result<impl Iterator<Item = PhiVector>> {
    let cells = neighborhood_cells(phi1, phi2, r1, r2, spec)?;
    let streams = cells.iter().map(|c| CellMembers::new(phi1, phi2, &c.key)).collect::<Result<Vec<_>>>()?;
    Ok(streams.into_iter().flat_map(move |m| m.take(limit.unwrap_or(usize::MAX))))
}

/// One point of the `(ρ13, ρ23)` landscape around two anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub key: CellKey,
    pub rho13: f64,
    pub rho23: f64,
    #[serde(with = "crate::big_serde")]
    pub count: BigUint,
    pub pmf: f64,
    pub report: EntropyReport,
}

/// Count, accuracy and entropies for every feasible cell.
pub fn region_grid(n: usize, p12: MatchProfile, r1: Response, r2: Response) -> Result<Vec<RegionPoint>> {
    p12.validate(n)?;
    check_evidence(n, p12, r1, r2)?;
    feasible_region(n, p12)?
        .into_iter()
        .map(|cell| {
            let t = cell.key.triple();
            let pmf = cond_pmf_2_from_rhos(t.rho12, t.rho13, t.rho23, r1, r2)?;
            Ok(RegionPoint {
                key: cell.key,
                rho13: t.rho13,
                rho23: t.rho23,
                count: cell.count,
                pmf,
                report: EntropyReport::from_pmf(pmf),
            })
        })
        .collect()
}

/// Anchor profile whose correlation is `rho12` at `n` stages.
pub fn profile_for_rho(n: usize, rho12: f64) -> Result<MatchProfile> {
    let twice = (rho12 + 1.0) * n as f64;
    let rounded = twice.round();
    if rho12.is_nan() || rho12.abs() > 1.0 + 1e-12 || (twice - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(Error::InvalidParameter(format!("correlation {rho12} is not realizable at n = {n}")));
    }
    let profile = MatchProfile::from_similarity_factor(SimilarityFactor::from_twice(rounded as u32));
    profile.validate(n)?;
    Ok(profile)
}

/// `count` as a float; exact below 2^53.
pub(crate) fn count_to_f64(count: &BigUint) -> f64 {
    count.to_f64().unwrap_or(f64::INFINITY)
}
