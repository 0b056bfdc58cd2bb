use std::f64::consts::PI;

use proptest::prelude::*;

use unitary_shield::channels::{
    apply_product_channel, apply_product_channel_in_order, make_channel, ChannelKind,
};
use unitary_shield::circuits::{b_op, compile, d_op, u_prep, CircuitDef};
use unitary_shield::optimizer::{optimize_xi_exact, xi_grid, XiObjective};
use unitary_shield::qmath::{
    apply_unitary, embed_gate, min_eigenvalue, pure_fidelity, ComplexMatrix, GateSpec, StateVector,
};
use unitary_shield::schemes::{input_state, resolve_scheme, run_protected, Scheme};

mod common;
use common::{
    add, c, full_register_kraus_sum, identity, kron_all, matmul, max_gap, random_density, to_rows,
    Rows,
};

fn kind_strategy() -> impl Strategy<Value = ChannelKind> {
    prop::sample::select(ChannelKind::ALL.to_vec())
}

fn scheme_strategy() -> impl Strategy<Value = Scheme> {
    prop::sample::select(Scheme::ALL.to_vec())
}

/// `(op, a, b, angle)` with `op` 0..4 = H, X, Ry, CNOT; qubits reduced mod n.
fn gate_strategy() -> impl Strategy<Value = (u8, usize, usize, f64)> {
    (0u8..4, 0usize..4, 1usize..4, -2.0 * PI..2.0 * PI)
}

fn to_gate((op, a, b, angle): (u8, usize, usize, f64), n: usize) -> Option<GateSpec> {
    let q = a % n;
    Some(match op {
        0 => GateSpec::h(q),
        1 => GateSpec::x(q),
        2 => GateSpec::ry(q, angle),
        _ if n > 1 => GateSpec::cnot(q, (q + b % (n - 1) + 1) % n),
        _ => return None,
    })
}

fn single(op: u8, angle: f64) -> Rows {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (cs, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let m = match op {
        0 => [[s, s], [s, -s]],
        1 => [[0.0, 1.0], [1.0, 0.0]],
        _ => [[cs, -sn], [sn, cs]],
    };
    m.iter()
        .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
        .collect()
}

/// Full-register gate from explicit tensor products.
fn tensor_gate((op, a, b, angle): (u8, usize, usize, f64), n: usize) -> Rows {
    let q = a % n;
    if op < 3 {
        let f: Vec<Rows> = (0..n)
            .map(|k| {
                if k == q {
                    single(op, angle)
                } else {
                    identity(2)
                }
            })
            .collect();
        return kron_all(&f);
    }
    let t = (q + b % (n - 1) + 1) % n;
    let p0 = vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0)],
    ];
    let p1 = vec![
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
    ];
    let off: Vec<Rows> = (0..n)
        .map(|k| if k == q { p0.clone() } else { identity(2) })
        .collect();
    let on: Vec<Rows> = (0..n)
        .map(|k| match k {
            _ if k == q => p1.clone(),
            _ if k == t => single(1, 0.0),
            _ => identity(2),
        })
        .collect();
    add(&kron_all(&off), &kron_all(&on))
}

fn check_state(m: &ComplexMatrix) -> Result<(), TestCaseError> {
    prop_assert!((m.trace().re - 1.0).abs() < 1e-12);
    prop_assert!(m.trace().im.abs() < 1e-12);
    prop_assert!(m.hermiticity_error() < 1e-12);
    prop_assert!(min_eigenvalue(m).unwrap() >= -1e-10);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedded_gates_are_unitary(n in 1usize..=5, g in gate_strategy()) {
        if let Some(gate) = to_gate(g, n) {
            prop_assert!(embed_gate(&gate, n).unwrap().unitarity_error() < 1e-12);
        }
    }

    #[test]
    fn compiled_sequence_matches_tensor_products(
        n in 1usize..=4,
        gates in prop::collection::vec(gate_strategy(), 0..12),
    ) {
        let mut circuit = CircuitDef::new(n).unwrap();
        let mut oracle = identity(1 << n);
        for g in gates {
            if let Some(gate) = to_gate(g, n) {
                circuit.push(gate).unwrap();
                oracle = matmul(&tensor_gate(g, n), &oracle);
            }
        }
        prop_assert!(max_gap(&compile(&circuit).unwrap(), &oracle) < 1e-10);
    }

    #[test]
    fn unitary_conjugation_preserves_state_invariants(
        n in 1usize..=3,
        seed in any::<u64>(),
        gates in prop::collection::vec(gate_strategy(), 1..8),
    ) {
        let mut circuit = CircuitDef::new(n).unwrap();
        for g in gates {
            if let Some(gate) = to_gate(g, n) {
                circuit.push(gate).unwrap();
            }
        }
        let rho = random_density(n, seed);
        let out = apply_unitary(&rho, &compile(&circuit).unwrap()).unwrap();
        check_state(out.matrix())?;
    }

    #[test]
    fn fidelity_lies_in_unit_interval(n in 1usize..=3, seed in any::<u64>(), theta in -PI..PI) {
        let f = pure_fidelity(&input_state(n, theta).unwrap(), &random_density(n, seed)).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn product_channel_matches_full_register_kraus_sum(
        n in 1usize..=3,
        kind in kind_strategy(),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let rho = random_density(n, seed);
        let ch = make_channel(kind, p).unwrap();
        let fast = apply_product_channel(&rho, &ch);
        let slow = full_register_kraus_sum(ch.kraus(), &to_rows(rho.matrix()), n);
        prop_assert!(max_gap(fast.matrix(), &slow) < 1e-10);
        check_state(fast.matrix())?;
    }

    #[test]
    fn qubit_order_is_irrelevant(
        order in Just((0..4).collect::<Vec<usize>>()).prop_shuffle(),
        kind in kind_strategy(),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let rho = random_density(4, seed);
        let ch = make_channel(kind, p).unwrap();
        let reference = apply_product_channel(&rho, &ch);
        let permuted = apply_product_channel_in_order(&rho, &ch, &order).unwrap();
        prop_assert!(permuted.matrix().max_abs_diff(reference.matrix()) < 1e-14);
    }

    #[test]
    fn dephasing_leaves_diagonal_states_alone(
        n in 1usize..=3,
        weights in prop::collection::vec(0.0f64..1.0, 8),
        p in 0.0f64..=1.0,
    ) {
        let dim = 1 << n;
        let total: f64 = weights[..dim].iter().sum::<f64>() + 1e-3;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = c((weights[k] + 1e-3 / dim as f64) / total, 0.0);
        }
        let rho = unitary_shield::qmath::DensityMatrix::new(n, m).unwrap();
        let out = apply_product_channel(&rho, &make_channel(ChannelKind::Dephasing, p).unwrap());
        prop_assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn damping_leaves_ground_state_alone(n in 1usize..=4, p in 0.0f64..=1.0) {
        let rho = StateVector::basis(n, 0).unwrap().to_density();
        let out = apply_product_channel(&rho, &make_channel(ChannelKind::AmplitudeDamping, p).unwrap());
        prop_assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn protected_outputs_are_states(
        n in 1usize..=3,
        scheme in scheme_strategy(),
        kind in kind_strategy(),
        p in 0.0f64..=1.0,
        theta in -PI..PI,
        xi in -PI..PI,
    ) {
        let psi = input_state(n, theta).unwrap();
        let inst = resolve_scheme(scheme, kind, n, theta, xi).unwrap();
        let out = run_protected(&inst, &make_channel(kind, p).unwrap(), &psi).unwrap();
        prop_assert!(out.validate().is_ok());
        check_state(out.matrix())?;
    }

    #[test]
    fn compiled_circuits_are_unitary(n in 1usize..=5, theta in -PI..PI, xi in -PI..PI) {
        for circuit in [u_prep(n, theta).unwrap(), d_op(n).unwrap(), b_op(n, xi).unwrap()] {
            prop_assert!(compile(&circuit).unwrap().unitarity_error() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_optimum_dominates_fresh_grid(
        scheme in prop::sample::select(vec![Scheme::IndividualCollective, Scheme::CollectiveIndividual]),
        kind in kind_strategy(),
        p in 0.0f64..=1.0,
        n in prop::sample::select(vec![2usize, 3]),
    ) {
        let theta = 2.0 * PI / 3.0;
        let opt = optimize_xi_exact(scheme, kind, p, n, theta).unwrap();
        let objective = XiObjective::new(scheme, kind, p, n, theta).unwrap();
        let offset = 0.37 * 2.0 * PI / 1000.0;
        for xi in xi_grid(1000) {
            prop_assert!(opt.f_star >= objective.eval(xi + offset).unwrap() - 1e-9);
        }
    }
}
