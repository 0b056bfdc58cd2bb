//! Single-qubit decoherence channels and their n-fold product.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{conjugate_local, tensor, ComplexMatrix, DensityMatrix, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    AmplitudeDamping,
    Dephasing,
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::Dephasing,
        ChannelKind::Depolarizing,
    ];

    /// Stable numeric id, used for seed derivation.
    pub fn id(self) -> u64 {
        match self {
            ChannelKind::AmplitudeDamping => 0,
            ChannelKind::Dephasing => 1,
            ChannelKind::Depolarizing => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "amplitude-damping",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "amplitude-damping" | "damping" | "amp" | "ad" => Ok(ChannelKind::AmplitudeDamping),
            "dephasing" | "deph" => Ok(ChannelKind::Dephasing),
            "depolarizing" | "depol" => Ok(ChannelKind::Depolarizing),
            other => Err(Error::input(format!(
                "unknown channel '{other}' (expected amplitude-damping, dephasing or depolarizing)"
            ))),
        }
    }
}

/// A single-qubit channel at strength `p`, stored as its Kraus set.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kind: ChannelKind,
    p: f64,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.p
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Largest entrywise deviation of `Σ A_k† A_k` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for a in &self.kraus {
            let term = (&a.adjoint() * a).expect("2x2 Kraus operators");
            sum = sum.add(&term).expect("2x2 Kraus operators");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// Applies the channel to a single qubit of the register.
    pub fn apply_to_qubit(&self, rho: &DensityMatrix, q: usize) -> Result<DensityMatrix> {
        let n = rho.n();
        if q >= n {
            return Err(Error::input(format!(
                "qubit {q} out of range for {n}-qubit register"
            )));
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            n,
            self.kraus_sum_on(rho.matrix(), q, n),
        ))
    }

    fn kraus_sum_on(&self, m: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
        let dim = m.rows();
        self.kraus
            .iter()
            .map(|a| conjugate_local(m, a, q, n))
            .fold(ComplexMatrix::zeros(dim, dim), |acc, term| {
                acc.add(&term).expect("same register shape")
            })
    }

    /// Single-qubit action `E(m)` on an arbitrary 2×2 operator.
    pub fn apply_single(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::input("single-qubit channel needs a 2x2 operand"));
        }
        Ok(self.kraus_sum_on(m, 0, 1))
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Builds the Kraus set of `kind` at strength `p ∈ [0, 1]`.
///
/// * amplitude damping: `[[1,0],[0,√(1−p)]]`, `[[0,√p],[0,0]]`
/// * dephasing: `√(1−p)·I`, `√p·|0⟩⟨0|`, `√p·|1⟩⟨1|`
/// * depolarizing: `√(1−3p/4)·I`, `√(p/4)·{X, Y, Z}`
pub fn make_channel(kind: ChannelKind, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!(
            "channel strength must lie in [0, 1], got {p}"
        )));
    }
    let m = |entries: [Complex64; 4]| {
        ComplexMatrix::from_vec(2, 2, entries.to_vec()).expect("2x2 literal")
    };
    let kraus = match kind {
        ChannelKind::AmplitudeDamping => vec![
            m([ONE, ZERO, ZERO, real((1.0 - p).sqrt())]),
            m([ZERO, real(p.sqrt()), ZERO, ZERO]),
        ],
        ChannelKind::Dephasing => {
            let keep = real((1.0 - p).sqrt());
            let s = real(p.sqrt());
            vec![
                m([keep, ZERO, ZERO, keep]),
                m([s, ZERO, ZERO, ZERO]),
                m([ZERO, ZERO, ZERO, s]),
            ]
        }
        ChannelKind::Depolarizing => {
            let keep = real((1.0 - 0.75 * p).sqrt());
            let s = (p / 4.0).sqrt();
            let i = Complex64::new(0.0, s);
            vec![
                m([keep, ZERO, ZERO, keep]),
                m([ZERO, real(s), real(s), ZERO]),
                m([ZERO, -i, i, ZERO]),
                m([real(s), ZERO, ZERO, real(-s)]),
            ]
        }
    };
    Ok(KrausChannel { kind, p, kraus })
}

/// Applies `ch` independently to every qubit, qubit 0 first.
pub fn apply_product_channel(rho: &DensityMatrix, ch: &KrausChannel) -> DensityMatrix {
    let n = rho.n();
    let order: Vec<usize> = (0..n).collect();
    apply_product_channel_in_order(rho, ch, &order).expect("canonical order is valid")
}

/// As [`apply_product_channel`], visiting qubits in the given order. `order`
/// must be a permutation of `0..n`.
pub fn apply_product_channel_in_order(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    order: &[usize],
) -> Result<DensityMatrix> {
    let n = rho.n();
    let mut seen = vec![false; n];
    for &q in order {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(Error::input(format!(
                "qubit order {order:?} is not a permutation of 0..{n}"
            )));
        }
    }
    if order.len() != n {
        return Err(Error::input(format!(
            "qubit order {order:?} is not a permutation of 0..{n}"
        )));
    }
    let mut m = rho.matrix().clone();
    for &q in order {
        m = ch.kraus_sum_on(&m, q, n);
    }
    Ok(DensityMatrix::from_matrix_unchecked(n, m))
}

/// Choi operator `Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
pub fn choi_matrix(ch: &KrausChannel) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2, 2);
            unit[(i, j)] = ONE;
            let image = ch.apply_single(&unit).expect("2x2 operand");
            choi = choi.add(&tensor(&unit, &image)).expect("4x4 accumulator");
        }
    }
    choi
}
