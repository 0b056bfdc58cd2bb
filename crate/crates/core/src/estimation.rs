//! Exact and shot-sampled input/output fidelity.
//!
//! Sampling follows the read-out protocol: undo the preparation circuit, then
//! measure in the computational basis and count all-zeros outcomes.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with a 64-bit value.
//! Each shot consumes one `f64` uniform and is resolved by inverse CDF, so for
//! a fixed seed the count of outcome 0 is monotone in its probability.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{compile, CircuitDef};
use crate::error::{Error, Result};
use crate::qmath::{apply_unitary, pure_fidelity, DensityMatrix, StateVector};

/// Mass deviation tolerated by [`sample_outcomes`] before rejecting.
pub const MASS_TOL: f64 = 1e-6;
/// Rounding floor for individual probabilities.
pub const NEGATIVE_FLOOR: f64 = -1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            other => Err(Error::input(format!(
                "unknown mode '{other}' (expected exact or sampled)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: u64,
    pub seed: Option<u64>,
}

impl FidelityEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: 0.0,
            shots: 0,
            seed: None,
        }
    }

    fn sampled(hits: u64, shots: u64, seed: u64) -> Self {
        let value = hits as f64 / shots as f64;
        Self {
            value,
            stderr: (value * (1.0 - value) / shots as f64).sqrt(),
            shots,
            seed: Some(seed),
        }
    }
}

pub fn fidelity_exact(psi_in: &StateVector, rho_out: &DensityMatrix) -> Result<FidelityEstimate> {
    Ok(FidelityEstimate::exact(pure_fidelity(psi_in, rho_out)?))
}

/// Estimates `⟨Ψ_in|ρ_out|Ψ_in⟩` as the all-zeros frequency after applying
/// the inverse of `psi_prep` to `rho_out`.
pub fn fidelity_sampled(
    psi_prep: &CircuitDef,
    rho_out: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<FidelityEstimate> {
    if shots == 0 {
        return Err(Error::input("shots must be at least 1"));
    }
    if psi_prep.n() != rho_out.n() {
        return Err(Error::input(format!(
            "preparation circuit has {} qubits, state has {}",
            psi_prep.n(),
            rho_out.n()
        )));
    }
    let undo = compile(psi_prep)?.adjoint();
    let sigma = apply_unitary(rho_out, &undo)?;
    let counts = sample_outcomes(&sigma.diagonal(), shots, seed)?;
    Ok(FidelityEstimate::sampled(counts[0], shots, seed))
}

/// Draws `shots` outcomes from `probabilities` and returns per-outcome counts.
///
/// Entries down to `NEGATIVE_FLOOR` are treated as rounding noise and clamped
/// to zero; the vector is then renormalized.
pub fn sample_outcomes(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    if probabilities.is_empty() {
        return Err(Error::input("empty outcome distribution"));
    }
    if let Some(bad) = probabilities
        .iter()
        .find(|&&p| !p.is_finite() || p < NEGATIVE_FLOOR)
    {
        return Err(Error::validation(format!(
            "invalid outcome probability {bad}"
        )));
    }
    let mass: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::validation(format!(
            "outcome probabilities sum to {mass}, expected 1"
        )));
    }
    let mut cdf = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for p in probabilities {
        acc += p.max(0.0) / mass;
        cdf.push(acc);
    }
    // Outcomes past the last positive entry are unreachable.
    let last = probabilities
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probabilities.len() - 1);
    cdf[last..].fill(f64::INFINITY);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.partition_point(|&c| c <= u);
        counts[k] += 1;
    }
    Ok(counts)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit hash of a short word sequence (SplitMix64 chain).
pub fn hash64(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |h, &w| mix64(h ^ mix64(w)))
}

/// Seed for one sweep point: `base_seed XOR hash64(scheme, kind, p_index)`.
pub fn point_seed(base_seed: u64, scheme_id: u64, kind_id: u64, p_index: u64) -> u64 {
    base_seed ^ hash64(&[scheme_id, kind_id, p_index])
}
