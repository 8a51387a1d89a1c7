//! The arbiter PUF delay model.
//!
//! A challenge `c ∈ {0,1}^n` steers two racing signals through `n` switch
//! stages. Each stage contributes four Gaussian path delays `(t, u, r, s)`;
//! the sign of the accumulated delay difference is the response. The same
//! response is obtained as a linear threshold function `sign(Φ · w)` where
//! `Φ ∈ {±1}^{n+1}` depends only on the challenge and `w ∈ ℝ^{n+1}` only on
//! the delays.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single-bit PUF response, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Response {
    Minus,
    Plus,
}

impl Response {
    /// Sign of a delay difference. Zero maps to `+1`.
    pub fn from_sign(x: f64) -> Self {
        if x < 0.0 {
            Response::Minus
        } else {
            Response::Plus
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Response::Plus),
            -1 => Ok(Response::Minus),
            _ => Err(Error::InvalidParameter(format!("response must be +1 or -1, got {v}"))),
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Response::Plus => 1,
            Response::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl Neg for Response {
    type Output = Response;

    fn neg(self) -> Response {
        match self {
            Response::Plus => Response::Minus,
            Response::Minus => Response::Plus,
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Plus => f.write_str("+1"),
            Response::Minus => f.write_str("-1"),
        }
    }
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Response::Plus),
            "-1" | "-" => Ok(Response::Minus),
            other => Err(Error::InvalidParameter(format!("response must be +1 or -1, got {other:?}"))),
        }
    }
}

impl Serialize for Response {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Response {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(deserializer)?;
        Response::from_i8(v).map_err(serde::de::Error::custom)
    }
}

/// A raw challenge `c = (c_1, ..., c_n)`.
///
/// The text form is a bitstring whose leftmost character is `c_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Challenge {
    bits: Vec<bool>,
}

impl Challenge {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidChallenge("challenge must have at least one stage".into()));
        }
        Ok(Self { bits })
    }

    /// The all-zero challenge of `n` stages.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![false; n])
    }

    /// Challenge whose bit `i` (0-based, `c_{i+1}`) is bit `i` of `code`.
    pub fn from_index(n: usize, code: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidChallenge(format!("cannot index challenges with n = {n}")));
        }
        Self::new((0..n).map(|i| (code >> i) & 1 == 1).collect())
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for Challenge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Challenge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidChallenge(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Challenge::new(bits)
    }
}

impl Serialize for Challenge {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Challenge {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Transformed challenge `Φ ∈ {±1}^{n+1}` with `φ_{n+1} = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiVector {
    phis: Vec<i8>,
}

impl PhiVector {
    /// Validates a sign vector of length `n + 1`.
    pub fn new(phis: Vec<i8>) -> Result<Self> {
        if phis.len() < 2 {
            return Err(Error::InvalidPhi("need at least two entries (n >= 1)".into()));
        }
        if let Some(bad) = phis.iter().find(|&&p| p != 1 && p != -1) {
            return Err(Error::InvalidPhi(format!("entry {bad} is not +1 or -1")));
        }
        if phis[phis.len() - 1] != 1 {
            return Err(Error::InvalidPhi("last entry must be +1".into()));
        }
        Ok(Self { phis })
    }

    /// Φ of the all-zero challenge.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n + 1])
    }

    pub(crate) fn from_raw(phis: Vec<i8>) -> Self {
        debug_assert!(phis.len() >= 2 && phis[phis.len() - 1] == 1);
        Self { phis }
    }

    /// Number of stages `n` (one less than the vector length).
    pub fn n(&self) -> usize {
        self.phis.len() - 1
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.phis
    }

    pub fn check_same_n(&self, other: &PhiVector) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }
}

impl Serialize for PhiVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.phis.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhiVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let phis = Vec::<i8>::deserialize(deserializer)?;
        PhiVector::new(phis).map_err(serde::de::Error::custom)
    }
}

/// `φ_i = (-1)^(c_i + ... + c_n)` for `i ≤ n`, and `φ_{n+1} = +1`.
pub fn challenge_to_phi(c: &Challenge) -> PhiVector {
    let n = c.n();
    let mut phis = vec![1i8; n + 1];
    let mut parity = false;
    for i in (0..n).rev() {
        parity ^= c.bits[i];
        phis[i] = if parity { -1 } else { 1 };
    }
    PhiVector::from_raw(phis)
}

/// Inverse of [`challenge_to_phi`]: `c_i = 0` iff `φ_i = φ_{i+1}`.
pub fn phi_to_challenge(phi: &PhiVector) -> Challenge {
    let bits = phi.phis.windows(2).map(|w| w[0] != w[1]).collect();
    Challenge { bits }
}

/// Per-stage path delays of one manufactured instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDelays {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub mu: f64,
    pub sigma: f64,
}

impl StageDelays {
    pub fn new(t: Vec<f64>, u: Vec<f64>, r: Vec<f64>, s: Vec<f64>, mu: f64, sigma: f64) -> Result<Self> {
        let n = t.len();
        if n == 0 {
            return Err(Error::InvalidParameter("stage delays need at least one stage".into()));
        }
        for v in [&u, &r, &s] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { t, u, r, s, mu, sigma })
    }

    /// Draws `4n` i.i.d. `N(mu, sigma²)` delays, stage by stage in `(t, u, r, s)` order.
    pub fn sample<R: Rng + ?Sized>(n: usize, mu: f64, sigma: f64, rng: &mut R) -> Result<Self> {
        check_sampling_params(n, sigma)?;
        let mut t = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        let draw = |rng: &mut R| {
            let z: f64 = StandardNormal.sample(rng);
            mu + sigma * z
        };
        for _ in 0..n {
            t.push(draw(rng));
            u.push(draw(rng));
            r.push(draw(rng));
            s.push(draw(rng));
        }
        Ok(Self { t, u, r, s, mu, sigma })
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Weight vector of the equivalent linear threshold model.
    pub fn to_instance(&self) -> PufInstance {
        let n = self.n();
        let straight: Vec<f64> = (0..n).map(|i| self.t[i] - self.u[i]).collect();
        let crossed: Vec<f64> = (0..n).map(|i| self.s[i] - self.r[i]).collect();
        let mut w = Vec::with_capacity(n + 1);
        w.push(straight[0] - crossed[0]);
        for i in 1..n {
            w.push(straight[i - 1] + crossed[i - 1] + straight[i] - crossed[i]);
        }
        w.push(straight[n - 1] + crossed[n - 1]);
        PufInstance { w, sigma: self.sigma }
    }

    /// Final accumulated delay difference `Δ_n` for a raw challenge.
    pub fn delta(&self, c: &Challenge) -> Result<f64> {
        if c.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: c.n() });
        }
        let mut delta = 0.0;
        for (i, &bit) in c.bits().iter().enumerate() {
            delta = if bit { -delta + self.s[i] - self.r[i] } else { delta + self.t[i] - self.u[i] };
        }
        Ok(delta)
    }
}

/// Linear threshold view of an instance: `R_Φ = sign(Φ · w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct PufInstance {
    w: Vec<f64>,
    sigma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    sigma: f64,
    w: Vec<f64>,
}

impl TryFrom<RawInstance> for PufInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        if raw.w.len() != raw.n + 1 {
            return Err(Error::DimensionMismatch { expected: raw.n, found: raw.w.len().saturating_sub(1) });
        }
        PufInstance::new(raw.w, raw.sigma)
    }
}

impl From<PufInstance> for RawInstance {
    fn from(p: PufInstance) -> Self {
        RawInstance { n: p.n(), sigma: p.sigma, w: p.w }
    }
}

impl PufInstance {
    pub fn new(w: Vec<f64>, sigma: f64) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::InvalidParameter("weight vector needs n + 1 >= 2 entries".into()));
        }
        Ok(Self { w, sigma })
    }

    pub fn n(&self) -> usize {
        self.w.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `Φ · w`, assuming matching dimensions.
    pub(crate) fn dot(&self, phi: &PhiVector) -> f64 {
        debug_assert_eq!(phi.phis.len(), self.w.len());
        self.w.iter().zip(&phi.phis).map(|(&w, &p)| if p > 0 { w } else { -w }).sum()
    }

    /// Response without a dimension check.
    pub(crate) fn respond(&self, phi: &PhiVector) -> Response {
        Response::from_sign(self.dot(phi))
    }
}

pub(crate) fn check_sampling_params(n: usize, sigma: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 stages, got {n}")));
    }
    if sigma.is_nan() || sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(())
}

/// Samples one instance with `mu = 0`; deterministic in `seed`.
pub fn sample_instance(n: usize, sigma: f64, seed: u64) -> Result<(StageDelays, PufInstance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delays = StageDelays::sample(n, 0.0, sigma, &mut rng)?;
    let instance = delays.to_instance();
    Ok((delays, instance))
}

/// Response from the stage-by-stage recursion.
pub fn eval_recursive(d: &StageDelays, c: &Challenge) -> Result<Response> {
    Ok(Response::from_sign(d.delta(c)?))
}

/// Response from the linear threshold model.
pub fn eval_linear(p: &PufInstance, phi: &PhiVector) -> Result<Response> {
    if p.n() != phi.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: phi.n() });
    }
    Ok(p.respond(phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(v: &[i8]) -> PhiVector {
        PhiVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_challenge_transforms() {
        let c: Challenge = "00000".parse().unwrap();
        assert_eq!(challenge_to_phi(&c), phi(&[1, 1, 1, 1, 1, 1]));
        let c: Challenge = "00001".parse().unwrap();
        assert_eq!(challenge_to_phi(&c), phi(&[-1, -1, -1, -1, -1, 1]));
        let c: Challenge = "00110".parse().unwrap();
        assert_eq!(challenge_to_phi(&c), phi(&[1, 1, 1, -1, 1, 1]));
    }

    #[test]
    fn worked_phi_to_challenge() {
        assert_eq!(phi_to_challenge(&phi(&[1, 1, 1, 1, 1, 1])).to_string(), "00000");
        assert_eq!(phi_to_challenge(&phi(&[-1, -1, -1, -1, -1, 1])).to_string(), "00001");
        assert_eq!(phi_to_challenge(&phi(&[-1, 1, 1, 1, 1, 1])).to_string(), "10000");
    }

    #[test]
    fn phi_rejects_bad_vectors() {
        assert!(PhiVector::new(vec![1, 1, -1]).is_err());
        assert!(PhiVector::new(vec![1, 0, 1]).is_err());
        assert!(PhiVector::new(vec![1]).is_err());
    }

    #[test]
    fn challenge_parse_errors() {
        assert!("".parse::<Challenge>().is_err());
        assert!("01a".parse::<Challenge>().is_err());
    }

    #[test]
    fn round_trip_exhaustive_small_n() {
        for n in 1..=16usize {
            for code in 0..(1u64 << n) {
                let c = Challenge::from_index(n, code).unwrap();
                assert_eq!(phi_to_challenge(&challenge_to_phi(&c)), c);
            }
        }
    }

    #[test]
    fn hand_evaluated_recursion() {
        let d = StageDelays::new(vec![1.0, 1.0], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2], 0.0, 1.0).unwrap();
        let c00: Challenge = "00".parse().unwrap();
        let c10: Challenge = "10".parse().unwrap();
        assert_eq!(d.delta(&c00).unwrap(), 2.0);
        assert_eq!(eval_recursive(&d, &c00).unwrap(), Response::Plus);
        assert_eq!(d.delta(&c10).unwrap(), 1.0);
        assert_eq!(eval_recursive(&d, &c10).unwrap(), Response::Plus);
        assert_eq!(eval_linear(&d.to_instance(), &challenge_to_phi(&c10)).unwrap(), Response::Plus);
    }

    #[test]
    fn equal_delays_give_zero_weights() {
        let d = StageDelays::new(vec![3.0; 4], vec![3.0; 4], vec![3.0; 4], vec![3.0; 4], 3.0, 1.0).unwrap();
        assert!(d.to_instance().weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn linear_unit_weight_examples() {
        let mut w = vec![0.0; 6];
        w[0] = 1.0;
        let p = PufInstance::new(w, 1.0).unwrap();
        assert_eq!(eval_linear(&p, &phi(&[1, -1, 1, -1, 1, 1])).unwrap(), Response::Plus);
        assert_eq!(eval_linear(&p, &phi(&[-1, 1, 1, -1, 1, 1])).unwrap(), Response::Minus);
    }

    #[test]
    fn sign_zero_is_plus() {
        let p = PufInstance::new(vec![0.0; 4], 1.0).unwrap();
        assert_eq!(eval_linear(&p, &phi(&[1, -1, 1, 1])).unwrap(), Response::Plus);
    }

    #[test]
    fn dimension_mismatch() {
        let (d, p) = sample_instance(4, 1.0, 1).unwrap();
        assert!(eval_linear(&p, &PhiVector::ones(5).unwrap()).is_err());
        assert!(eval_recursive(&d, &Challenge::zeros(3).unwrap()).is_err());
    }

    #[test]
    fn sampling_rejects_bad_params() {
        assert!(sample_instance(1, 1.0, 0).is_err());
        assert!(sample_instance(8, 0.0, 0).is_err());
        assert!(sample_instance(8, -1.0, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_instance(16, 1.0, 42).unwrap(), sample_instance(16, 1.0, 42).unwrap());
        assert_ne!(sample_instance(16, 1.0, 42).unwrap().1, sample_instance(16, 1.0, 43).unwrap().1);
    }

    #[test]
    fn models_agree_exhaustively() {
        for n in 2..=10usize {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..4 {
                let d = StageDelays::sample(n, 0.0, 1.0, &mut rng).unwrap();
                let p = d.to_instance();
                for code in 0..(1u64 << n) {
                    let c = Challenge::from_index(n, code).unwrap();
                    assert_eq!(
                        eval_recursive(&d, &c).unwrap(),
                        eval_linear(&p, &challenge_to_phi(&c)).unwrap(),
                        "n={n} c={c}"
                    );
                }
            }
        }
    }

    #[test]
    fn instance_json_shape() {
        let p = PufInstance::new(vec![0.5, -1.0, 2.0], 1.0).unwrap();
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json, serde_json::json!({"n": 2, "sigma": 1.0, "w": [0.5, -1.0, 2.0]}));
        let back: PufInstance = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::json!({"n": 3, "sigma": 1.0, "w": [0.5, -1.0, 2.0]});
        assert!(serde_json::from_value::<PufInstance>(bad).is_err());
    }

    #[test]
    fn response_parsing_and_negation() {
        assert_eq!("+1".parse::<Response>().unwrap(), Response::Plus);
        assert_eq!("-1".parse::<Response>().unwrap(), Response::Minus);
        assert!("0".parse::<Response>().is_err());
        assert_eq!(-Response::Plus, Response::Minus);
        assert_eq!(Response::Minus.to_string(), "-1");
    }
}
