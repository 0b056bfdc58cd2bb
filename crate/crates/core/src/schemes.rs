//! Pre/post-processing pairs and the protected pipeline `V·E[U ρ U†]·V†`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{apply_product_channel, ChannelKind, KrausChannel};
use crate::circuits::{b_op, compile, d_op, u_prep, x_all};
use crate::error::{Error, Result};
use crate::qmath::{apply_unitary, ComplexMatrix, DensityMatrix, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "unprotected")]
    Unprotected,
    #[serde(rename = "ind-ind")]
    IndividualIndividual,
    #[serde(rename = "ind-coll")]
    IndividualCollective,
    #[serde(rename = "coll-ind")]
    CollectiveIndividual,
    #[serde(rename = "coll-coll")]
    CollectiveCollective,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Unprotected,
        Scheme::IndividualIndividual,
        Scheme::IndividualCollective,
        Scheme::CollectiveIndividual,
        Scheme::CollectiveCollective,
    ];

    pub const PROTECTED: [Scheme; 4] = [
        Scheme::IndividualIndividual,
        Scheme::IndividualCollective,
        Scheme::CollectiveIndividual,
        Scheme::CollectiveCollective,
    ];

    /// Stable numeric id, used for seed derivation.
    pub fn id(self) -> u64 {
        match self {
            Scheme::Unprotected => 0,
            Scheme::IndividualIndividual => 1,
            Scheme::IndividualCollective => 2,
            Scheme::CollectiveIndividual => 3,
            Scheme::CollectiveCollective => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Unprotected => "unprotected",
            Scheme::IndividualIndividual => "ind-ind",
            Scheme::IndividualCollective => "ind-coll",
            Scheme::CollectiveIndividual => "coll-ind",
            Scheme::CollectiveCollective => "coll-coll",
        }
    }

    /// Whether the collective angle ξ enters the scheme.
    pub fn uses_xi(self) -> bool {
        matches!(
            self,
            Scheme::IndividualCollective | Scheme::CollectiveIndividual
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unprotected" | "none" => Ok(Scheme::Unprotected),
            "ind-ind" | "individual-individual" => Ok(Scheme::IndividualIndividual),
            "ind-coll" | "individual-collective" => Ok(Scheme::IndividualCollective),
            "coll-ind" | "collective-individual" => Ok(Scheme::CollectiveIndividual),
            "coll-coll" | "collective-collective" => Ok(Scheme::CollectiveCollective),
            other => Err(Error::input(format!(
                "unknown scheme '{other}' (expected unprotected, ind-ind, ind-coll, coll-ind or coll-coll)"
            ))),
        }
    }
}

/// How the bit-flip modification for amplitude damping is composed with
/// `D` and `B(ξ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DampingModification {
    /// Pre-processing applies `D` then `X^⊗n`; post-processing applies
    /// `X^⊗n` then `B(ξ)`. Puts the dominant amplitude on `|0…0⟩`.
    #[default]
    CircuitOrder,
    /// Matrix-product reading: `D̃ = D·X^⊗n`, `B̃ = X^⊗n·B(ξ)`. Vacuous on
    /// the input family for even `n`.
    MatrixOrder,
}

/// Resolved `(U, V)` pair for one parameter tuple.
#[derive(Clone, Debug)]
pub struct SchemeInstance {
    pub scheme: Scheme,
    pub n: usize,
    pub theta: f64,
    pub xi: f64,
    pub channel_kind: ChannelKind,
    u: ComplexMatrix,
    v: ComplexMatrix,
}

impl SchemeInstance {
    /// Pre-processing unitary.
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    /// Post-processing unitary.
    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }
}

/// `U_prep|0…0⟩ = cos(θ/2)|+…+⟩ + sin(θ/2)|−…−⟩`.
pub fn input_state(n: usize, theta: f64) -> Result<StateVector> {
    StateVector::basis(n, 0)?.evolve(&compile(&u_prep(n, theta)?)?)
}

pub fn resolve_scheme(
    scheme: Scheme,
    kind: ChannelKind,
    n: usize,
    theta: f64,
    xi: f64,
) -> Result<SchemeInstance> {
    resolve_scheme_with(scheme, kind, n, theta, xi, DampingModification::default())
}

pub fn resolve_scheme_with(
    scheme: Scheme,
    kind: ChannelKind,
    n: usize,
    theta: f64,
    xi: f64,
    modification: DampingModification,
) -> Result<SchemeInstance> {
    if n < 1 {
        return Err(Error::input("scheme needs at least one qubit"));
    }
    if !theta.is_finite() || !xi.is_finite() {
        return Err(Error::input("angles must be finite"));
    }
    let d = || compile(&d_op(n)?);
    let b = || compile(&b_op(n, xi)?);

    let (pre_d, post_d, pre_b, post_b) = if kind == ChannelKind::AmplitudeDamping {
        let x = compile(&x_all(n)?)?;
        let (d, b) = (d()?, b()?);
        match modification {
            DampingModification::CircuitOrder => {
                let pre_d = (&x * &d)?;
                let post_b = (&b * &x)?;
                (pre_d.clone(), pre_d.adjoint(), post_b.adjoint(), post_b)
            }
            DampingModification::MatrixOrder => {
                let pre_d = (&d * &x)?;
                let post_b = (&x * &b)?;
                (pre_d.clone(), pre_d.adjoint(), post_b.adjoint(), post_b)
            }
        }
    } else {
        let (d, b) = (d()?, b()?);
        (d.clone(), d, b.adjoint(), b)
    };

    let (u, v) = match scheme {
        Scheme::Unprotected => {
            let id = ComplexMatrix::identity(1 << n);
            (id.clone(), id)
        }
        Scheme::IndividualIndividual => (pre_d, post_d),
        Scheme::IndividualCollective => (pre_d, post_b),
        Scheme::CollectiveIndividual => (pre_b, post_d),
        Scheme::CollectiveCollective => {
            let prep = compile(&u_prep(n, theta)?)?;
            (prep.adjoint(), prep)
        }
    };
    Ok(SchemeInstance {
        scheme,
        n,
        theta,
        xi,
        channel_kind: kind,
        u,
        v,
    })
}

/// Runs `V · E[U |ψ⟩⟨ψ| U†] · V†` with `E` the n-fold product of `ch`.
pub fn run_protected(
    inst: &SchemeInstance,
    ch: &KrausChannel,
    psi_in: &StateVector,
) -> Result<DensityMatrix> {
    if ch.kind() != inst.channel_kind {
        return Err(Error::input(format!(
            "scheme was resolved for {} but channel is {}",
            inst.channel_kind,
            ch.kind()
        )));
    }
    if psi_in.n() != inst.n {
        return Err(Error::input(format!(
            "scheme acts on {} qubits, input state has {}",
            inst.n,
            psi_in.n()
        )));
    }
    let rho = psi_in.to_density();
    let pre = apply_unitary(&rho, &inst.u)?;
    let noisy = apply_product_channel(&pre, ch);
    apply_unitary(&noisy, &inst.v)
}
