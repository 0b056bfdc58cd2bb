//! Dense complex linear algebra for small qubit registers.
//!
//! Basis ordering: qubit 0 is the leftmost tensor factor, i.e. the most
//! significant bit of the basis index. For `n` qubits, qubit `q` lives at bit
//! position `n - 1 - q`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for accepting a caller-supplied unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for accepting a matrix as Hermitian in spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row literals. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix literal");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::input(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `self · self†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = (self * &self.adjoint()).expect("square shapes agree");
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::input(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = Result<ComplexMatrix>;

    fn mul(self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product with `(a⊗b)[i·dim(b)+k, j·dim(b)+l] = a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Tensor product of a sequence, leftmost factor first. Empty input gives `[1]`.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, m| tensor(&acc, m))
}

pub(crate) fn register_dim(n: usize) -> usize {
    1usize << n
}

/// Bit mask selecting qubit `q` in an `n`-qubit basis index.
pub(crate) fn qubit_mask(q: usize, n: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Pure register state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != register_dim(n) {
            return Err(Error::input(format!(
                "{n}-qubit state needs {} amplitudes, got {}",
                register_dim(n),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::validation(format!(
                "state norm² = {norm}, expected 1"
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = register_dim(n);
        if index >= dim {
            return Err(Error::input(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self {
            n,
            amplitudes: amps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.n, u.apply(&self.amplitudes)?)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::input("state dimension mismatch"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Mixed register state. Constructors validate; pipeline stages that provably
/// preserve the invariants build it through `from_matrix_unchecked`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const EIGEN_FLOOR: f64 = -1e-10;

    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self { n, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), register_dim(n));
        Self { n, matrix }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = register_dim(n);
        Self {
            n,
            matrix: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Checks shape, hermiticity, unit trace and the eigenvalue floor.
    pub fn validate(&self) -> Result<()> {
        let dim = register_dim(self.n);
        if self.matrix.rows() != dim || !self.matrix.is_square() {
            return Err(Error::input(format!(
                "{}-qubit density matrix must be {dim}x{dim}, got {}x{}",
                self.n,
                self.matrix.rows(),
                self.matrix.cols()
            )));
        }
        let herm = self.matrix.hermiticity_error();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::validation(format!(
                "density matrix not Hermitian (error {herm:.3e})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::validation(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let lambda = min_eigenvalue(&self.matrix)?;
        if lambda < Self::EIGEN_FLOOR {
            return Err(Error::validation(format!(
                "density matrix has eigenvalue {lambda:.3e} below floor"
            )));
        }
        Ok(())
    }
}

/// Elementary gate kinds used by the protection circuits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    /// Rotation about the Bloch-sphere y axis by the given angle in radians.
    Ry(f64),
    Cnot,
}

impl GateKind {
    fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// 2×2 matrix of a single-qubit kind; `None` for CNOT.
    pub fn single_qubit_matrix(self) -> Option<ComplexMatrix> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            GateKind::H => Some(ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])),
            GateKind::X => Some(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])),
            GateKind::Ry(angle) => {
                let (sin, cos) = (angle / 2.0).sin_cos();
                Some(ComplexMatrix::from_real_rows(&[&[cos, -sin], &[sin, cos]]))
            }
            GateKind::Cnot => None,
        }
    }
}

/// A gate bound to qubit indices. For CNOT the control comes first.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateSpec {
    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            targets: vec![q],
        }
    }

    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::X,
            targets: vec![q],
        }
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::Ry(angle),
            targets: vec![q],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::input(format!(
                "{:?} expects {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        for (i, &q) in self.targets.iter().enumerate() {
            if q >= n {
                return Err(Error::input(format!(
                    "qubit index {q} out of range for {n}-qubit register"
                )));
            }
            if self.targets[..i].contains(&q) {
                return Err(Error::input(format!("repeated qubit index {q}")));
            }
        }
        Ok(())
    }
}

/// Full-register unitary for `g`, identity on the untouched qubits.
pub fn embed_gate(g: &GateSpec, n: usize) -> Result<ComplexMatrix> {
    g.check(n)?;
    let dim = register_dim(n);
    let mut out = ComplexMatrix::zeros(dim, dim);
    match g.kind.single_qubit_matrix() {
        Some(m) => {
            let mask = qubit_mask(g.targets[0], n);
            for col in 0..dim {
                let bit = usize::from(col & mask != 0);
                let base = col & !mask;
                out[(base, col)] = m[(0, bit)];
                out[(base | mask, col)] = m[(1, bit)];
            }
        }
        None => {
            let control = qubit_mask(g.targets[0], n);
            let target = qubit_mask(g.targets[1], n);
            for col in 0..dim {
                let row = if col & control != 0 {
                    col ^ target
                } else {
                    col
                };
                out[(row, col)] = ONE;
            }
        }
    }
    Ok(out)
}

/// `u ρ u†`, rejecting non-unitary `u`.
pub fn apply_unitary(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    if !u.is_square() || u.rows() != rho.dim() {
        return Err(Error::input(format!(
            "unitary is {}x{}, state dimension is {}",
            u.rows(),
            u.cols(),
            rho.dim()
        )));
    }
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(Error::validation(format!(
            "operator is not unitary (error {err:.3e})"
        )));
    }
    let out = (&(u * rho.matrix())? * &u.adjoint())?;
    Ok(DensityMatrix::from_matrix_unchecked(rho.n(), out))
}

/// Conjugates `m` by the single-qubit operator `a` acting on qubit `q`:
/// returns `A_q m A_q†` without materializing the register-sized operator.
pub(crate) fn conjugate_local(
    m: &ComplexMatrix,
    a: &ComplexMatrix,
    q: usize,
    n: usize,
) -> ComplexMatrix {
    let dim = m.rows();
    let mask = qubit_mask(q, n);
    let (a00, a01, a10, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let mut left = ComplexMatrix::zeros(dim, dim);
    for i0 in (0..dim).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        for j in 0..dim {
            let (x0, x1) = (m[(i0, j)], m[(i1, j)]);
            left[(i0, j)] = a00 * x0 + a01 * x1;
            left[(i1, j)] = a10 * x0 + a11 * x1;
        }
    }
    let (c00, c01, c10, c11) = (a00.conj(), a01.conj(), a10.conj(), a11.conj());
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j0 in (0..dim).filter(|j| j & mask == 0) {
            let j1 = j0 | mask;
            let (y0, y1) = (left[(i, j0)], left[(i, j1)]);
            out[(i, j0)] = y0 * c00 + y1 * c01;
            out[(i, j1)] = y0 * c10 + y1 * c11;
        }
    }
    out
}

/// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
pub fn pure_fidelity(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.n() != rho.n() {
        return Err(Error::input(format!(
            "state has {} qubits, density matrix has {}",
            psi.n(),
            rho.n()
        )));
    }
    let rho_psi = rho.matrix().apply(psi.amplitudes())?;
    let value: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(&rho_psi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if value.im.abs() > 1e-12 {
        return Err(Error::validation(format!(
            "fidelity has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re.clamp(0.0, 1.0))
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// The `d×d` Hermitian `A + iB` is mapped to the real symmetric
/// `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
/// eigenvalue doubled in multiplicity, and then diagonalized by cyclic Jacobi
/// rotations.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// All eigenvalues of a Hermitian matrix in ascending order (each listed once).
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::input("eigenvalues need a square matrix"));
    }
    let herm = m.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::validation(format!(
            "matrix is not Hermitian (error {herm:.3e})"
        )));
    }
    let d = m.rows();
    let size = 2 * d;
    let mut s = vec![0.0; size * size];
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            s[i * size + j] = z.re;
            s[(i + d) * size + (j + d)] = z.re;
            s[i * size + (j + d)] = -z.im;
            s[(i + d) * size + j] = z.im;
        }
    }
    jacobi_eigenvalues(&mut s, size);
    let mut evs: Vec<f64> = (0..size).map(|i| s[i * size + i]).collect();
    evs.sort_by(f64::total_cmp);
    // Doubled spectrum: keep every other value.
    Ok(evs.into_iter().step_by(2).collect())
}

/// In-place cyclic Jacobi on a dense symmetric matrix; leaves eigenvalues on
/// the diagonal.
fn jacobi_eigenvalues(a: &mut [f64], size: usize) {
    const MAX_SWEEPS: usize = 100;
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * size + j] * a[i * size + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            return;
        }
        for p in 0..size {
            for q in (p + 1)..size {
                let apq = a[p * size + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * size + p];
                let aqq = a[q * size + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k * size + p];
                    let akq = a[k * size + q];
                    a[k * size + p] = c * akp - s * akq;
                    a[k * size + q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p * size + k];
                    let aqk = a[q * size + k];
                    a[p * size + k] = c * apk - s * aqk;
                    a[q * size + k] = s * apk + c * aqk;
                }
            }
        }
    }
}
