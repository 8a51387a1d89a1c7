//! Monte Carlo checks of the closed forms against sampled PUF instances.
//!
//! Instance `i` of a run is drawn from a ChaCha8 stream selected by
//! `(seed, i / CHUNK)` and consumed sequentially inside the chunk, so every
//! instance is a pure function of `(seed, i)` and parallel runs are
//! bit-identical to serial ones. Counters are integers and merge exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::response_similarity;
use crate::error::{Error, Result};
use crate::model::{check_sampling_params, PhiVector, PufInstance, Response, StageDelays};
use crate::prediction::{cond_pmf_1, cond_pmf_2, predict_1, predict_2, Crp};

/// Instances per RNG stream.
pub const CHUNK: u64 = 1 << 14;

/// Fewest accepted samples a conditional estimate may rest on.
pub const MIN_ACCEPTED: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub sigma: f64,
    pub instances: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n: usize, sigma: f64, instances: u64, seed: u64) -> Self {
        Self { n, sigma, instances, seed }
    }

    fn validate(&self) -> Result<()> {
        check_sampling_params(self.n, self.sigma)?;
        if self.instances == 0 {
            return Err(Error::InvalidParameter("need at least one instance".into()));
        }
        Ok(())
    }
}

/// An empirical estimate next to its closed-form value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    pub std_err: f64,
    pub analytic: f64,
    pub z_score: f64,
    /// Instances the estimate is based on (after rejection).
    pub samples: u64,
}

impl McResult {
    fn from_counts(hits: u64, samples: u64, analytic: f64) -> Self {
        let estimate = hits as f64 / samples as f64;
        let std_err = (estimate * (1.0 - estimate) / samples as f64).sqrt();
        let diff = estimate - analytic;
        let z_score = if std_err > 0.0 {
            diff / std_err
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        Self { estimate, std_err, analytic, z_score, samples }
    }

    pub fn within(&self, z: f64) -> bool {
        self.z_score.abs() <= z
    }
}

/// One quantity to estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McQuery {
    /// `P[R_a = R_b]`.
    Similarity { a: PhiVector, b: PhiVector },
    /// `P[R_target = +1 | known responses]`.
    Conditional { known: Vec<Crp>, target: PhiVector },
    /// `P[optimal prediction is right | known responses]`.
    PredictorAccuracy { known: Vec<Crp>, target: PhiVector },
}

/// Pre-resolved query: indices into the distinct challenge table.
enum Plan {
    Similarity { a: usize, b: usize },
    Conditional { known: Vec<(usize, Response)>, target: usize, hit: Response },
}

struct Prepared {
    plan: Plan,
    analytic: f64,
    conditional: bool,
}

fn intern(table: &mut Vec<PhiVector>, phi: &PhiVector) -> usize {
    if let Some(i) = table.iter().position(|p| p == phi) {
        return i;
    }
    table.push(phi.clone());
    table.len() - 1
}

fn check_known(n: usize, known: &[Crp], target: &PhiVector) -> Result<()> {
    if known.is_empty() || known.len() > 2 {
        return Err(Error::InvalidParameter(format!("expected one or two known CRPs, got {}", known.len())));
    }
    for k in known {
        if k.phi.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: k.phi.n() });
        }
    }
    if target.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: target.n() });
    }
    Ok(())
}

fn prepare(n: usize, query: &McQuery, table: &mut Vec<PhiVector>) -> Result<Prepared> {
    match query {
        McQuery::Similarity { a, b } => {
            for p in [a, b] {
                if p.n() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: p.n() });
                }
            }
            let analytic = response_similarity(a, b)?;
            let plan = Plan::Similarity { a: intern(table, a), b: intern(table, b) };
            Ok(Prepared { plan, analytic, conditional: false })
        }
        McQuery::Conditional { known, target } | McQuery::PredictorAccuracy { known, target } => {
            check_known(n, known, target)?;
            let (analytic, hit) = match query {
                McQuery::Conditional { .. } => {
                    let pmf = if known.len() == 1 {
                        cond_pmf_1(&known[0], target)?
                    } else {
                        cond_pmf_2(&known[0], &known[1], target)?
                    };
                    (pmf, Response::Plus)
                }
                _ => {
                    let pred = if known.len() == 1 {
                        predict_1(&known[0], target)?
                    } else {
                        predict_2(&known[0], &known[1], target)?
                    };
                    (pred.accuracy, pred.predicted)
                }
            };
            let known = known.iter().map(|k| (intern(table, &k.phi), k.response)).collect();
            let plan = Plan::Conditional { known, target: intern(table, target), hit };
            Ok(Prepared { plan, analytic, conditional: true })
        }
    }
}

/// Fills `w` with the weights of the next instance; draws in the same order
/// as [`StageDelays::sample`] with zero mean.
fn sample_weights<R: Rng>(rng: &mut R, sigma: f64, a: &mut [f64], b: &mut [f64], w: &mut [f64]) {
    let n = a.len();
    for i in 0..n {
        let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let [t, u, r, s] = z.map(|v| sigma * v);
        a[i] = t - u;
        b[i] = s - r;
    }
    w[0] = a[0] - b[0];
    for i in 1..n {
        w[i] = a[i - 1] + b[i - 1] + a[i] - b[i];
    }
    w[n] = a[n - 1] + b[n - 1];
}

/// Weight vector of instance `index` of a run; what the batch engine sees.
pub fn instance_at(cfg: &McConfig, index: u64) -> Result<PufInstance> {
    cfg.validate()?;
    let mut rng = chunk_rng(cfg.seed, index / CHUNK);
    let (mut a, mut b, mut w) = (vec![0.0; cfg.n], vec![0.0; cfg.n], vec![0.0; cfg.n + 1]);
    for _ in 0..=index % CHUNK {
        sample_weights(&mut rng, cfg.sigma, &mut a, &mut b, &mut w);
    }
    PufInstance::new(w, cfg.sigma)
}

/// Every instance of a run, in index order.
pub fn instances(cfg: &McConfig) -> Result<impl Iterator<Item = PufInstance>> {
    cfg.validate()?;
    let cfg = *cfg;
    Ok((0..cfg.instances.div_ceil(CHUNK)).flat_map(move |chunk| {
        let mut rng = chunk_rng(cfg.seed, chunk);
        let (mut a, mut b) = (vec![0.0; cfg.n], vec![0.0; cfg.n]);
        let len = CHUNK.min(cfg.instances - chunk * CHUNK);
        (0..len).map(move |_| {
            let mut w = vec![0.0; cfg.n + 1];
            sample_weights(&mut rng, cfg.sigma, &mut a, &mut b, &mut w);
            PufInstance::new(w, cfg.sigma).expect("valid sampling parameters")
        })
    }))
}

/// Stage delays whose linear weights equal [`instance_at`]'s.
pub fn delays_at(cfg: &McConfig, index: u64) -> Result<StageDelays> {
    cfg.validate()?;
    let mut rng = chunk_rng(cfg.seed, index / CHUNK);
    let mut out = None;
    for _ in 0..=index % CHUNK {
        out = Some(StageDelays::sample(cfg.n, 0.0, cfg.sigma, &mut rng)?);
    }
    Ok(out.expect("at least one draw"))
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Estimates every query from one shared set of sampled instances.
pub fn mc_batch(cfg: &McConfig, queries: &[McQuery]) -> Result<Vec<McResult>> {
    cfg.validate()?;
    let mut table = Vec::new();
    let prepared = queries.iter().map(|q| prepare(cfg.n, q, &mut table)).collect::<Result<Vec<_>>>()?;
    let phis: Vec<Vec<f64>> = table.iter().map(|p| p.as_slice().iter().map(|&v| f64::from(v)).collect()).collect();

    let chunks = cfg.instances.div_ceil(CHUNK);
    let counts = (0..chunks).into_par_iter().map(|chunk| run_chunk(cfg, chunk, &phis, &prepared)).reduce(
        || vec![(0u64, 0u64); prepared.len()],
        |mut acc, part| {
            for (a, p) in acc.iter_mut().zip(part) {
                a.0 += p.0;
                a.1 += p.1;
            }
            acc
        },
    );

    prepared
        .iter()
        .zip(counts)
        .map(|(p, (hits, samples))| {
            if p.conditional && samples < MIN_ACCEPTED {
                return Err(Error::InsufficientSamples { accepted: samples, required: MIN_ACCEPTED });
            }
            Ok(McResult::from_counts(hits, samples, p.analytic))
        })
        .collect()
}

fn run_chunk(cfg: &McConfig, chunk: u64, phis: &[Vec<f64>], prepared: &[Prepared]) -> Vec<(u64, u64)> {
    let n = cfg.n;
    let mut rng = chunk_rng(cfg.seed, chunk);
    let start = chunk * CHUNK;
    let end = (start + CHUNK).min(cfg.instances);
    let (mut a, mut b, mut w) = (vec![0.0; n], vec![0.0; n], vec![0.0; n + 1]);
    let mut responses = vec![Response::Plus; phis.len()];
    let mut counts = vec![(0u64, 0u64); prepared.len()];
    for _ in start..end {
        sample_weights(&mut rng, cfg.sigma, &mut a, &mut b, &mut w);
        for (r, phi) in responses.iter_mut().zip(phis) {
            let dot: f64 = w.iter().zip(phi).map(|(x, y)| x * y).sum();
            *r = Response::from_sign(dot);
        }
        for (c, p) in counts.iter_mut().zip(prepared) {
            match &p.plan {
                Plan::Similarity { a, b } => {
                    c.1 += 1;
                    c.0 += u64::from(responses[*a] == responses[*b]);
                }
                Plan::Conditional { known, target, hit } => {
                    if known.iter().all(|&(k, r)| responses[k] == r) {
                        c.1 += 1;
                        c.0 += u64::from(responses[*target] == *hit);
                    }
                }
            }
        }
    }
    counts
}

fn single(cfg: &McConfig, query: McQuery) -> Result<McResult> {
    Ok(mc_batch(cfg, std::slice::from_ref(&query))?[0])
}

/// Fraction of instances with `R_a = R_b` against the closed form.
pub fn mc_response_similarity(cfg: &McConfig, a: &PhiVector, b: &PhiVector) -> Result<McResult> {
    single(cfg, McQuery::Similarity { a: a.clone(), b: b.clone() })
}

/// `P[R_target = +1 | known]` by rejection sampling on the known responses.
pub fn mc_conditional(cfg: &McConfig, known: &[Crp], target: &PhiVector) -> Result<McResult> {
    single(cfg, McQuery::Conditional { known: known.to_vec(), target: target.clone() })
}

/// Hit rate of the optimal predictor on instances consistent with `known`.
pub fn mc_predictor_accuracy(cfg: &McConfig, known: &[Crp], target: &PhiVector) -> Result<McResult> {
    single(cfg, McQuery::PredictorAccuracy { known: known.to_vec(), target: target.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{challenge_to_phi, eval_linear};

    fn phi_of(bits: &str) -> PhiVector {
        challenge_to_phi(&bits.parse().unwrap())
    }

    #[test]
    fn identical_challenges_always_agree() {
        let cfg = McConfig::new(5, 1.0, 5000, 1);
        let a = phi_of("01011");
        let r = mc_response_similarity(&cfg, &a, &a).unwrap();
        assert_eq!((r.estimate, r.std_err, r.z_score), (1.0, 0.0, 0.0));
    }

    #[test]
    fn deterministic_and_chunk_independent() {
        let cfg = McConfig::new(8, 1.0, 3 * CHUNK + 17, 99);
        let (a, b) = (phi_of("00000000"), phi_of("00110101"));
        let x = mc_response_similarity(&cfg, &a, &b).unwrap();
        let y = mc_response_similarity(&cfg, &a, &b).unwrap();
        assert_eq!(x, y);
        let serial: u64 = instances(&cfg)
            .unwrap()
            .map(|inst| u64::from(eval_linear(&inst, &a).unwrap() == eval_linear(&inst, &b).unwrap()))
            .sum();
        assert_eq!(x.estimate, serial as f64 / cfg.instances as f64);
    }

    #[test]
    fn fast_sampler_matches_delay_model() {
        let cfg = McConfig::new(6, 0.7, 100, 5);
        let all: Vec<_> = instances(&McConfig { instances: CHUNK + 4, ..cfg }).unwrap().collect();
        for i in [0, 1, 37, CHUNK - 1, CHUNK, CHUNK + 3] {
            let fast = instance_at(&cfg, i).unwrap();
            assert_eq!(fast.weights(), all[i as usize].weights());
            let slow = delays_at(&cfg, i).unwrap().to_instance();
            assert_eq!(fast.weights(), slow.weights());
        }
    }

    #[test]
    fn one_crp_example() {
        let cfg = McConfig::new(5, 1.0, 200_000, 7);
        let known = [Crp::new(phi_of("00000"), Response::Plus)];
        let target = phi_of("00110");
        let c = mc_conditional(&cfg, &known, &target).unwrap();
        assert!(c.within(4.0), "{c:?}");
        let p = mc_predictor_accuracy(&cfg, &known, &target).unwrap();
        assert!(p.within(4.0), "{p:?}");
        assert!((p.analytic - 0.7048).abs() < 1e-4);
    }

    #[test]
    fn anchor_as_target_is_exact() {
        let cfg = McConfig::new(6, 1.0, 20_000, 3);
        let known = [Crp::new(phi_of("101100"), Response::Minus)];
        let p = mc_predictor_accuracy(&cfg, &known, &known[0].phi).unwrap();
        assert_eq!((p.estimate, p.analytic, p.z_score), (1.0, 1.0, 0.0));
    }

    #[test]
    fn rare_evidence_is_reported() {
        let cfg = McConfig::new(6, 1.0, 500, 3);
        let known = [Crp::new(phi_of("101100"), Response::Plus)];
        assert!(matches!(mc_conditional(&cfg, &known, &phi_of("000000")), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn bad_configs() {
        let a = phi_of("0101");
        assert!(mc_response_similarity(&McConfig::new(4, 1.0, 0, 1), &a, &a).is_err());
        assert!(mc_response_similarity(&McConfig::new(4, 0.0, 10, 1), &a, &a).is_err());
        assert!(mc_response_similarity(&McConfig::new(5, 1.0, 10, 1), &a, &a).is_err());
        let known = [Crp::new(a.clone(), Response::Plus)];
        let too_many = [known[0].clone(), known[0].clone(), known[0].clone()];
        assert!(mc_conditional(&McConfig::new(4, 1.0, 10, 1), &too_many, &a).is_err());
    }
}
