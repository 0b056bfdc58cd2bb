//! Runtime self-checks over the simulator's numerical invariants.

use serde::Serialize;

use crate::channels::{apply_product_channel, choi_matrix, make_channel, ChannelKind};
use crate::circuits::{b_op, compile, d_op, u_prep, x_all};
use crate::error::Result;
use crate::estimation::fidelity_exact;
use crate::harness::DEFAULT_THETA;
use crate::qmath::{min_eigenvalue, ComplexMatrix, UNITARY_TOL};
use crate::schemes::{input_state, resolve_scheme, run_protected, Scheme};

const STRENGTHS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name: name.into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn kraus_completeness() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for kind in ChannelKind::ALL {
        for p in STRENGTHS {
            worst = worst.max(make_channel(kind, p)?.completeness_error());
        }
    }
    Ok((worst <= 1e-12, format!("max |ΣK†K − I| = {worst:.3e}")))
}

fn choi_positivity() -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for kind in ChannelKind::ALL {
        for p in STRENGTHS {
            worst = worst.min(min_eigenvalue(&choi_matrix(&make_channel(kind, p)?))?);
        }
    }
    Ok((
        worst >= -1e-10,
        format!("min Choi eigenvalue = {worst:.3e}"),
    ))
}

fn circuit_unitarity() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for c in [
            u_prep(n, DEFAULT_THETA)?,
            d_op(n)?,
            b_op(n, 0.7)?,
            x_all(n)?,
        ] {
            worst = worst.max(compile(&c)?.unitarity_error());
        }
    }
    Ok((worst <= UNITARY_TOL, format!("max |U†U − I| = {worst:.3e}")))
}

fn collective_reduces_to_individual() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let b0: ComplexMatrix = compile(&b_op(n, 0.0)?)?;
        worst = worst.max(b0.max_abs_diff(&compile(&d_op(n)?)?));
    }
    Ok((worst <= 1e-12, format!("max |B(0) − D| = {worst:.3e}")))
}

fn output_states_are_physical() -> Result<(bool, String)> {
    let mut count = 0;
    for n in [2, 3] {
        let psi = input_state(n, DEFAULT_THETA)?;
        for kind in ChannelKind::ALL {
            let ch = make_channel(kind, 0.4)?;
            for scheme in Scheme::ALL {
                let inst = resolve_scheme(scheme, kind, n, DEFAULT_THETA, 0.9)?;
                run_protected(&inst, &ch, &psi)?.validate()?;
                count += 1;
            }
        }
    }
    Ok((true, format!("{count} output states valid")))
}

fn noiseless_fidelity_is_one() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in [2, 4] {
        let psi = input_state(n, DEFAULT_THETA)?;
        for kind in ChannelKind::ALL {
            let ch = make_channel(kind, 0.0)?;
            for scheme in Scheme::ALL {
                let inst = resolve_scheme(scheme, kind, n, DEFAULT_THETA, 0.0)?;
                let f = fidelity_exact(&psi, &run_protected(&inst, &ch, &psi)?)?.value;
                worst = worst.max((1.0 - f).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |1 − F| at p = 0: {worst:.3e}")))
}

fn dephasing_unprotected_closed_form() -> Result<(bool, String)> {
    // Z-dephasing damps each off-diagonal entry by (1 − p) per differing bit.
    let n = 2;
    let psi = input_state(n, DEFAULT_THETA)?;
    let amps = psi.amplitudes();
    let mut worst = 0.0f64;
    for p in STRENGTHS {
        let rho =
            apply_product_channel(&psi.to_density(), &make_channel(ChannelKind::Dephasing, p)?);
        let f = fidelity_exact(&psi, &rho)?.value;
        let mut expected = 0.0;
        for (i, a) in amps.iter().enumerate() {
            for (j, b) in amps.iter().enumerate() {
                let hamming = (i ^ j).count_ones() as i32;
                expected += a.norm_sqr() * b.norm_sqr() * (1.0 - p).powi(hamming);
            }
        }
        worst = worst.max((f - expected).abs());
    }
    Ok((worst <= 1e-12, format!("max deviation = {worst:.3e}")))
}

/// Runs every self-check.
pub fn run_checks() -> Vec<CheckResult> {
    vec![
        check("kraus-completeness", kraus_completeness()),
        check("choi-positivity", choi_positivity()),
        check("circuit-unitarity", circuit_unitarity()),
        check(
            "collective-at-zero-is-individual",
            collective_reduces_to_individual(),
        ),
        check("output-states-physical", output_states_are_physical()),
        check("noiseless-fidelity-one", noiseless_fidelity_is_one()),
        check("dephasing-closed-form", dephasing_unprotected_closed_form()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for r in run_checks() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
