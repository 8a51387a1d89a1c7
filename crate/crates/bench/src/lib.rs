//! Shared inputs for the benchmarks.

use apuf_core::{challenge_to_phi, Challenge, Crp, PhiVector, Response};

/// A challenge whose bits alternate in runs of `run`, as a `Φ` vector.
pub fn striped(n: usize, run: usize) -> PhiVector {
    let bits = (0..n).map(|i| (i / run) % 2 == 1).collect();
    challenge_to_phi(&Challenge::new(bits).expect("n >= 1"))
}

/// Two known CRPs at zero correlation and a target correlated with the first.
pub fn two_anchor_setup(n: usize) -> (Crp, Crp, PhiVector) {
    let k1 = Crp::new(PhiVector::ones(n).expect("n >= 1"), Response::Plus);
    let half: Vec<i8> = (0..=n).map(|i| if i < n / 2 || i == n { 1 } else { -1 }).collect();
    let k2 = Crp::new(PhiVector::new(half).expect("valid"), Response::Plus);
    let target = striped(n, 4);
    (k1, k2, target)
}
