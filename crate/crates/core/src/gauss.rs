//! Probabilistic model of the solution counts.
//!
//! Treating each "this quantity is a square" requirement as independent
//! with success probability `P = (p+1)/(2p)` gives the estimate
//! `G(p,x) = P^S(x) * p^(x-1) = exp(Q(p,x))` with `Q` quadratic in `x`.
//! All logarithms here are natural; the size diagnostics sigma and g only
//! feed base-independent claims (signs, orderings).

use crate::ffield::OddPrime;
use crate::search::WProfile;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussError {
    #[error("requirement count needs x >= 2, got {0}")]
    RequirementRange(u64),
    #[error("profile for p={0} is not stabilized")]
    Unstabilized(u64),
}

/// P = (p+1)/(2p), the chance that a uniform element is a square
/// (zero included).
pub fn success_probability(p: OddPrime) -> f64 {
    let p = p.value() as f64;
    (p + 1.0) / (2.0 * p)
}

/// S(x) = sum of r for r = 2..=x, the number of square requirements on a
/// sequence of the form (0, 1, f(2), ..., f(x)).
pub fn requirement_count(x: u64) -> Result<u64, GaussError> {
    if x < 2 {
        return Err(GaussError::RequirementRange(x));
    }
    Ok((x * x + x - 2) / 2)
}

/// The quadratic exponent Q(p,x) with Q(p,1) = 0.
pub fn gauss_exponent(p: OddPrime, x: f64) -> f64 {
    let pf = p.value() as f64;
    -0.5 * x * x * (2.0 * pf / (pf + 1.0)).ln() + 0.5 * x * (pf * (pf + 1.0) / 2.0).ln()
        - ((pf + 1.0) / 2.0).ln()
}

/// G(p,x) = exp(Q(p,x)).
pub fn gauss_estimate(p: OddPrime, x: f64) -> f64 {
    gauss_exponent(p, x).exp()
}

/// The second root of Q(p, .): the model's prediction for where the count
/// returns to 1.
pub fn second_root(p: OddPrime) -> f64 {
    let pf = p.value() as f64;
    2.0 * ((pf + 1.0).ln() - 2f64.ln()) / (2f64.ln() - (1.0 + 1.0 / pf).ln())
}

/// sigma(p): the summed natural log of the profile columns. Trailing
/// 1-columns contribute zero, so the stabilized truncation is exact.
pub fn log_size(profile: &WProfile) -> Result<f64, GaussError> {
    if !profile.stabilized() {
        return Err(GaussError::Unstabilized(profile.prime().value()));
    }
    Ok(profile.columns().map(|(_, w)| (w as f64).ln()).sum())
}

/// g(p): the model's prediction for sigma(p).
pub fn gauss_log_size(p: OddPrime) -> f64 {
    let pf = p.value() as f64;
    let lr = ((pf + 1.0) / (2.0 * pf)).ln();
    let num = 2.0 * pf.ln() + 3.0 * lr;
    num * num * num / (12.0 * lr * lr)
}

/// sigma, g, and their difference for one prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeReport {
    pub p: u64,
    pub sigma: f64,
    pub g: f64,
    pub discrepancy: f64,
}

pub fn size_report(profile: &WProfile) -> Result<SizeReport, GaussError> {
    let sigma = log_size(profile)?;
    let g = gauss_log_size(profile.prime());
    Ok(SizeReport {
        p: profile.prime().value(),
        sigma,
        g,
        discrepancy: sigma - g,
    })
}
