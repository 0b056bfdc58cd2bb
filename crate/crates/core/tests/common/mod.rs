//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unitary_shield::qmath::{ComplexMatrix, DensityMatrix};

pub type Rows = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Rows {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn kron_all(factors: &[Rows]) -> Rows {
    factors
        .iter()
        .fold(vec![vec![c(1.0, 0.0)]], |acc, f| kron(&acc, f))
}

pub fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Rows {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for j in 0..m {
            for t in 0..k {
                out[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    out
}

pub fn add(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Rows {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn identity(dim: usize) -> Rows {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn max_gap(m: &ComplexMatrix, rows: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((m[(i, j)] - v).norm());
        }
    }
    worst
}

/// `Σ_{k₁…kₙ} (K_{k₁}⊗…⊗K_{kₙ}) ρ (…)†` by explicit full-register operators.
pub fn full_register_kraus_sum(kraus: &[ComplexMatrix], rho: &[Vec<Complex64>], n: usize) -> Rows {
    let dim = rho.len();
    let singles: Vec<Rows> = kraus.iter().map(to_rows).collect();
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for mut idx in 0..singles.len().pow(n as u32) {
        let mut factors = Vec::with_capacity(n);
        for _ in 0..n {
            factors.push(singles[idx % singles.len()].clone());
            idx /= singles.len();
        }
        let k = kron_all(&factors);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = c(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        acc += k[i][a] * rho[a][b] * k[j][b].conj();
                    }
                }
                out[i][j] += acc;
            }
        }
    }
    out
}

/// Random full-rank state `G G† / tr(G G†)`.
pub fn random_density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1 << n;
    let g: Vec<Complex64> = (0..dim * dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let g = ComplexMatrix::from_vec(dim, dim, g).unwrap();
    let gg = (&g * &g.adjoint()).unwrap();
    let tr = gg.trace().re;
    DensityMatrix::new(n, gg.scale(c(1.0 / tr, 0.0))).unwrap()
}
