//! Optimal (Bayes) predictors of an unknown response from one or two known
//! challenge-response pairs.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::correlation::{checked_asin, match_profile, response_similarity, MatchProfile};
use crate::error::{Error, Result};
use crate::model::{PhiVector, Response};

/// A known challenge-response pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crp {
    pub phi: PhiVector,
    pub response: Response,
}

impl Crp {
    pub fn new(phi: PhiVector, response: Response) -> Self {
        Self { phi, response }
    }
}

/// Output of an optimal predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub predicted: Response,
    /// Probability that `predicted` is correct, `max(pmf, 1 − pmf)`.
    pub accuracy: f64,
    /// `P[R_target = +1 | evidence]`.
    pub pmf: f64,
}

impl Prediction {
    /// Argmax of a two-point pmf; an exact tie goes to `tie`.
    pub fn from_pmf(pmf: f64, tie: Response) -> Self {
        let predicted = if pmf > 0.5 {
            Response::Plus
        } else if pmf < 0.5 {
            Response::Minus
        } else {
            tie
        };
        Self { predicted, accuracy: pmf.max(1.0 - pmf), pmf }
    }
}

/// `P[R_target = +1 | R_known = r]`.
pub fn cond_pmf_1(known: &Crp, target: &PhiVector) -> Result<f64> {
    let same = response_similarity(&known.phi, target)?;
    Ok(match known.response {
        Response::Plus => same,
        Response::Minus => 1.0 - same,
    })
}

pub fn predict_1(known: &Crp, target: &PhiVector) -> Result<Prediction> {
    Ok(Prediction::from_pmf(cond_pmf_1(known, target)?, known.response))
}

/// Two-CRP conditional pmf from the three correlations:
///
/// `P[R3 = +1 | r1, r2] = ½·[1 + (r1·asin ρ13 + r2·asin ρ23) / (π/2 + r1·r2·asin ρ12)]`.
pub fn cond_pmf_2_from_rhos(rho12: f64, rho13: f64, rho23: f64, r1: Response, r2: Response) -> Result<f64> {
    let (a12, a13, a23) = (checked_asin(rho12)?, checked_asin(rho13)?, checked_asin(rho23)?);
    let (s1, s2) = (r1.as_f64(), r2.as_f64());
    let denominator = FRAC_PI_2 + s1 * s2 * a12;
    // zero iff (ρ12 = −1, r1 = r2) or (ρ12 = 1, r1 ≠ r2)
    if denominator <= 1e-12 {
        return Err(Error::DegenerateEvidence(format!(
            "responses ({r1}, {r2}) are impossible for anchor correlation {rho12}"
        )));
    }
    let pmf = 0.5 * (1.0 + (s1 * a13 + s2 * a23) / denominator);
    Ok(pmf.clamp(0.0, 1.0))
}

/// `P[R_target = +1 | k1, k2]`.
pub fn cond_pmf_2(k1: &Crp, k2: &Crp, target: &PhiVector) -> Result<f64> {
    let n = k1.phi.n();
    let p12 = match_profile(&k1.phi, &k2.phi)?;
    let p13 = match_profile(&k1.phi, target)?;
    let p23 = match_profile(&k2.phi, target)?;
    cond_pmf_2_from_rhos(p12.rho(n), p13.rho(n), p23.rho(n), k1.response, k2.response)
}

/// Optimal two-CRP predictor. Exact ties go to the first known response.
pub fn predict_2(k1: &Crp, k2: &Crp, target: &PhiVector) -> Result<Prediction> {
    let pmf = cond_pmf_2(k1, k2, target)?;
    let prediction = Prediction::from_pmf(pmf, k1.response);
    debug_assert!({
        let n = k1.phi.n();
        let p13 = match_profile(&k1.phi, target)?;
        let p23 = match_profile(&k2.phi, target)?;
        closest_anchor_prediction(n, k1.response, p13, k2.response, p23)
            .filter(|&r| r != prediction.predicted)
            .is_none()
    });
    Ok(prediction)
}

/// Response of the more correlated anchor times the sign of its correlation.
///
/// This is the argmax of the two-CRP pmf whenever `|ρ13| ≠ |ρ23|`; returns
/// `None` when the magnitudes tie or the deciding correlation is zero. The
/// comparison runs on exact integers (`n·ρ = 2s − n`).
pub fn closest_anchor_prediction(
    n: usize,
    r1: Response,
    p13: MatchProfile,
    r2: Response,
    p23: MatchProfile,
) -> Option<Response> {
    let scaled = |p: MatchProfile| i64::from(p.similarity_factor().twice()) - n as i64;
    let (x13, x23) = (scaled(p13), scaled(p23));
    if x13.abs() == x23.abs() {
        return None;
    }
    let (r, x) = if x13.abs() > x23.abs() { (r1, x13) } else { (r2, x23) };
    Some(if x > 0 { r } else { -r })
}
