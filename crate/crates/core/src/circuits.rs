//! Structured unitaries of the protection schemes.
//!
//! All circuits are gate lists applied left to right in time. The CNOT ladder
//! is a star rooted at qubit 0.

use crate::error::{Error, Result};
use crate::qmath::{embed_gate, ComplexMatrix, GateSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDef {
    n: usize,
    gates: Vec<GateSpec>,
}

impl CircuitDef {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::input("circuit needs at least one qubit"));
        }
        Ok(Self {
            n,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n: usize, gates: Vec<GateSpec>) -> Result<Self> {
        let mut c = Self::new(n)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: GateSpec) -> Result<()> {
        g.check(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    /// Appends `other` after `self` in time.
    pub fn then(mut self, other: &CircuitDef) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::input(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n, self.n
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    fn push_ladder(&mut self, reversed: bool) {
        let targets: Box<dyn Iterator<Item = usize>> = if reversed {
            Box::new((1..self.n).rev())
        } else {
            Box::new(1..self.n)
        };
        for t in targets {
            self.gates.push(GateSpec::cnot(0, t));
        }
    }

    fn push_transversal(&mut self, gate: fn(usize) -> GateSpec) {
        for q in 0..self.n {
            self.gates.push(gate(q));
        }
    }
}

/// Preparation circuit: `Ry(θ)` on qubit 0, CNOT star from qubit 0, then H on
/// every qubit. Maps `|0…0⟩` to `cos(θ/2)|+…+⟩ + sin(θ/2)|−…−⟩`.
pub fn u_prep(n: usize, theta: f64) -> Result<CircuitDef> {
    let mut c = CircuitDef::new(n)?;
    c.gates.push(GateSpec::ry(0, theta));
    c.push_ladder(false);
    c.push_transversal(GateSpec::h);
    Ok(c)
}

/// Individual operator: H on every qubit.
pub fn d_op(n: usize) -> Result<CircuitDef> {
    let mut c = CircuitDef::new(n)?;
    c.push_transversal(GateSpec::h);
    Ok(c)
}

/// Collective operator `B(ξ) = H^⊗n · L† · (Ry(ξ) ⊗ I) · L` with `L` the
/// CNOT star. Rotates by `ξ` inside span{|0…0⟩, |1…1⟩} before the Hadamards,
/// so `B(0) = D`.
pub fn b_op(n: usize, xi: f64) -> Result<CircuitDef> {
    let mut c = CircuitDef::new(n)?;
    c.push_ladder(false);
    c.gates.push(GateSpec::ry(0, xi));
    c.push_ladder(true);
    c.push_transversal(GateSpec::h);
    Ok(c)
}

/// Global bit flip `X^⊗n`.
pub fn x_all(n: usize) -> Result<CircuitDef> {
    let mut c = CircuitDef::new(n)?;
    c.push_transversal(GateSpec::x);
    Ok(c)
}

/// Product of the embedded gates, later gates multiplying on the left.
pub fn compile(c: &CircuitDef) -> Result<ComplexMatrix> {
    let dim = 1usize << c.n;
    let mut u = ComplexMatrix::identity(dim);
    for g in &c.gates {
        u = (&embed_gate(g, c.n)? * &u)?;
    }
    Ok(u)
}
