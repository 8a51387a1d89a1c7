use anyhow::{bail, Context, Result};
use apuf_core::{challenge_to_phi, Challenge, Crp, PhiVector, Response};

/// A challenge given either as a bitstring (`c1 c2 ... cn`) or as a JSON
/// array of the ±1 entries of its `Φ` vector.
pub fn parse_challenge(text: &str) -> Result<PhiVector> {
    let text = text.trim();
    if text.starts_with('[') {
        let phis: Vec<i8> = serde_json::from_str(text).with_context(|| format!("bad Φ array {text:?}"))?;
        return Ok(PhiVector::new(phis)?);
    }
    let c: Challenge = text.parse()?;
    Ok(challenge_to_phi(&c))
}

/// `CHALLENGE:RESPONSE`, e.g. `00110:+1`.
pub fn parse_crp(text: &str) -> Result<Crp> {
    let Some((c, r)) = text.rsplit_once(':') else {
        bail!("expected CHALLENGE:RESPONSE, got {text:?}");
    };
    Ok(Crp::new(parse_challenge(c)?, parse_response(r)?))
}

pub fn parse_response(text: &str) -> Result<Response> {
    Ok(text.parse::<Response>()?)
}

/// All challenges must have `n` stages (or agree with each other if `n` is unset).
pub fn check_lengths<'a>(n: Option<usize>, phis: impl IntoIterator<Item = &'a PhiVector>) -> Result<usize> {
    let mut expected = n;
    for p in phis {
        match expected {
            Some(m) if m != p.n() => bail!("challenge has {} stages, expected {m}", p.n()),
            _ => expected = Some(p.n()),
        }
    }
    expected.context("no challenge given")
}
