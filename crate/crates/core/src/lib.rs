//! Response correlation, prediction and entropy analysis for arbiter PUFs.
//!
//! An `n`-stage arbiter PUF answers a challenge `c` with the sign of `Φ·w`,
//! where `Φ` is the parity transform of `c` and `w` is a Gaussian weight
//! vector fixed at manufacture. Two challenges agree in response with
//! probability `½ + asin(ρ)/π`, where `ρ` depends only on how many entries of
//! their `Φ` vectors match. Everything here follows from that fact:
//!
//! * [`model`]: the delay and linear-threshold models and the `c ↔ Φ` map.
//! * [`correlation`]: similarity factors, correlations and orthant probabilities.
//! * [`prediction`]: optimal predictors from one or two known CRPs.
//! * [`entropy`]: conditional entropies and their expectations.
//! * [`bins`]: exact counting and enumeration of challenges by similarity.
//! * [`mc`]: Monte Carlo estimates to check all of the above.

pub mod bins;
pub mod combinatorics;
pub mod correlation;
pub mod entropy;
pub mod error;
pub mod mc;
pub mod model;
pub mod prediction;

pub use num_bigint::BigUint;

pub use bins::{
    bin_size, bin_size_1, cell_count, construct_third, enumerate_bin, enumerate_bin_1, enumerate_neighborhood_2,
    feasible_region, neighborhood_cells, profile_for_rho, region_grid, semimetric_to_factors, BinSpec, CellKey,
    CellMembers, FirstBitCase, NeighborhoodCell, RegionPoint, Semimetric,
};
pub use correlation::{
    keep_count, match_profile, orthant2, orthant3, pair_correlation, response_similarity, similarity_factor,
    similarity_probability, within_correlation_bounds, CorrelationTriple, MatchProfile, SimilarityFactor,
};
pub use entropy::{
    binary_entropy, cond_entropy_1, cond_entropy_2, entropy_curve, expected_report_1, expected_report_1_with,
    expected_report_2, expected_report_2_breakdown, expected_report_2_for, expected_report_2_weighted, CurvePoint,
    EntropyReport, OneAnchorWeights, ResponseBreakdown, WeightedReport,
};
pub use error::{Error, Result};
pub use mc::{
    instances, mc_batch, mc_conditional, mc_predictor_accuracy, mc_response_similarity, McConfig, McQuery, McResult,
};
pub use model::{
    challenge_to_phi, eval_linear, eval_recursive, phi_to_challenge, sample_instance, Challenge, PhiVector,
    PufInstance, Response, StageDelays,
};
pub use prediction::{
    closest_anchor_prediction, cond_pmf_1, cond_pmf_2, cond_pmf_2_from_rhos, predict_1, predict_2, Crp, Prediction,
};

/// Serializes big counts as decimal strings.
pub(crate) mod big_serde {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}
