mod common;

use bacon_shor::bits::QubitMask;
use bacon_shor::circuit::{gate, GateKind, GateSpec};
use bacon_shor::frame::{conjugate, DiagonalCliffordFrame};
use bacon_shor::pauli::{multiply, PauliString, Phase, StabilizerGroup};
use bacon_shor::pauli_sum::{split_measurement, PauliSum};
use common::*;
use proptest::prelude::*;

fn all_paulis(n: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let x = QubitMask::from_qubits((0..n).filter(|q| (code >> q) & 1 == 1));
        let z = QubitMask::from_qubits((0..n).filter(|q| (code >> (n + q)) & 1 == 1));
        out.push(PauliString::from_masks(n, x, z).hermitian());
    }
    out
}

#[test]
fn two_qubit_products_match_dense() {
    let ps = all_paulis(2);
    for a in &ps {
        for b in &ps {
            let ab = multiply(a, b).unwrap();
            let want = matmul(&pauli_matrix(a), &pauli_matrix(b));
            assert!(approx_eq(&pauli_matrix(&ab), &want, 1e-12), "{a} * {b}");
        }
    }
}

#[test]
fn products_are_associative() {
    let ps = all_paulis(2);
    for a in &ps {
        for b in &ps {
            for c in &ps {
                let l = multiply(&multiply(a, b).unwrap(), c).unwrap();
                let r = multiply(a, &multiply(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
/// XZ = -iY and ZX = +iY, so the product carries no sign.
fn xz_times_zx_is_yy() {
    let a = PauliString::parse("XZ").unwrap();
    let b = PauliString::parse("ZX").unwrap();
    let ab = multiply(&a, &b).unwrap();
    assert_eq!(ab, PauliString::parse("+YY").unwrap());
    let dense = matmul(&pauli_matrix(&a), &pauli_matrix(&b));
    assert!(approx_eq(&pauli_matrix(&ab), &dense, 1e-12));
}

fn three_qubit_gates() -> Vec<GateSpec> {
    let mut gs = Vec::new();
    for q in 0..3 {
        for k in [GateKind::X, GateKind::Z, GateKind::H] {
            gs.push(gate(k, &[q]));
        }
    }
    for (a, b) in [(0, 1), (1, 0), (0, 2), (2, 1)] {
        gs.push(gate(GateKind::CNOT, &[a, b]));
        gs.push(gate(GateKind::CZ, &[a, b]));
    }
    gs.push(gate(GateKind::CCZ, &[0, 1, 2]));
    gs.push(gate(GateKind::CCZ, &[2, 0, 1]));
    gs
}

#[test]
fn conjugation_matches_dense_for_all_three_qubit_paulis() {
    for g in three_qubit_gates() {
        let u = gate_matrix(&g, 3);
        for p in all_paulis(3) {
            let f = conjugate(&g, &DiagonalCliffordFrame::from_pauli(&p)).unwrap();
            let want = matmul(&matmul(&u, &pauli_matrix(&p)), &dagger(&u));
            assert!(approx_eq(&frame_matrix(&f), &want, 1e-12), "{g:?} on {p}");
        }
    }
}

#[test]
fn cz_on_xx_gives_yy_pattern() {
    let f = conjugate(
        &gate(GateKind::CZ, &[0, 1]),
        &DiagonalCliffordFrame::from_pauli(&PauliString::parse("XX").unwrap()),
    )
    .unwrap();
    let u = gate_matrix(&gate(GateKind::CZ, &[0, 1]), 2);
    let xx = pauli_matrix(&PauliString::parse("XX").unwrap());
    assert!(approx_eq(&frame_matrix(&f), &matmul(&matmul(&u, &xx), &dagger(&u)), 1e-12));
    // X_a X_b Z_a Z_b, i.e. the product written X-part first
    assert_eq!(f.x, QubitMask::from_qubits([0, 1]));
    assert_eq!(f.z, QubitMask::from_qubits([0, 1]));
    assert!(!f.has_cz());
}

#[test]
fn expansion_of_x_with_two_cz_pairs_matches_dense() {
    let mut f = DiagonalCliffordFrame::from_pauli(&PauliString::x_on(5, [0]));
    f.toggle_cz(1, 2);
    f.toggle_cz(3, 4);
    let s = f.expand();
    assert_eq!(s.len(), 16);
    assert!(approx_eq(&sum_matrix(&s), &frame_matrix(&f), 1e-12));
}

/// Statevector check of measurement splitting on the 2x3 Bacon-Shor code
/// (qubit (i, j) = 3i + j) in its Z gauge, with logical |0>.
#[test]
fn split_measurement_matches_statevector() {
    let p = |s: &str| PauliString::parse(s).unwrap();
    let gens = vec![
        p("ZZIIII"),
        p("IZZIII"),
        p("IIIZZI"),
        p("IIIIZZ"),
        p("XXXXXX"),
        p("ZIIZII"),
    ];
    let group = StabilizerGroup::from_generators(6, &gens).unwrap();
    let psi = project_onto(&gens, &basis_state(6, 0));

    let mut err = DiagonalCliffordFrame::from_pauli(&p("IXIIII"));
    err.toggle_cz(0, 4);
    err.toggle_cz(2, 3);
    let e = err.expand();
    let bad = apply(&frame_matrix(&err), &psi);

    for obs in [p("XXXXXX"), p("XIIXII"), p("IXIIXI"), p("ZZIIII"), p("IZZIZZ")] {
        let (plus, minus) = split_measurement(&e, &obs, &group).unwrap();
        let want = prob_plus(&obs, &bad);
        assert!((plus.prob - want).abs() < 1e-12, "{obs}: {} vs {want}", plus.prob);
        assert!((plus.prob + minus.prob - 1.0).abs() < 1e-12);
    }
}

fn frame_strategy(n: usize) -> impl Strategy<Value = DiagonalCliffordFrame> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << n, 0u64..1 << n, 0u64..1 << pairs.len(), 0u32..4).prop_map(move |(x, z, cz, ph)| {
        let xm = QubitMask::from_qubits((0..n).filter(|q| (x >> q) & 1 == 1));
        let zm = QubitMask::from_qubits((0..n).filter(|q| (z >> q) & 1 == 1));
        let mut f = DiagonalCliffordFrame::from_pauli(
            &PauliString::try_new(n, xm, zm, Phase::new(ph)).unwrap(),
        );
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if (cz >> i) & 1 == 1 {
                f.toggle_cz(u, v);
            }
        }
        f
    })
}

fn gate_strategy() -> impl Strategy<Value = GateSpec> {
    prop_oneof![
        (0usize..4).prop_map(|q| gate(GateKind::X, &[q])),
        (0usize..4).prop_map(|q| gate(GateKind::Z, &[q])),
        (0usize..4, 1usize..4).prop_map(|(a, d)| gate(GateKind::CNOT, &[a, (a + d) % 4])),
        (0usize..4, 1usize..4).prop_map(|(a, d)| gate(GateKind::CZ, &[a, (a + d) % 4])),
        (0usize..4).prop_map(|a| gate(GateKind::CCZ, &[a, (a + 1) % 4, (a + 2) % 4])),
    ]
}

fn inverse_gate(g: &GateSpec) -> GateSpec {
    // every gate in the set is self-inverse
    g.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn conjugation_round_trips(f in frame_strategy(4), g in gate_strategy()) {
        let there = conjugate(&g, &f).unwrap();
        let back = conjugate(&inverse_gate(&g), &there).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn conjugation_of_frames_matches_dense(f in frame_strategy(4), g in gate_strategy()) {
        let u = gate_matrix(&g, 4);
        let got = conjugate(&g, &f).unwrap();
        let want = matmul(&matmul(&u, &frame_matrix(&f)), &dagger(&u));
        prop_assert!(approx_eq(&frame_matrix(&got), &want, 1e-12));
    }

    #[test]
    fn frame_products_match_dense(a in frame_strategy(4), b in frame_strategy(4)) {
        let ab = a.product(&b).unwrap();
        let want = matmul(&frame_matrix(&a), &frame_matrix(&b));
        prop_assert!(approx_eq(&frame_matrix(&ab), &want, 1e-12));
        let inv = a.inverse();
        prop_assert!(approx_eq(&frame_matrix(&inv), &dagger(&frame_matrix(&a)), 1e-12));
    }

    #[test]
    fn expansion_is_unitary_and_exact(f in frame_strategy(5)) {
        let s = f.expand();
        prop_assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        prop_assert!(approx_eq(&sum_matrix(&s), &frame_matrix(&f), 1e-12));
    }

    #[test]
    fn merged_expansion_matches_full_expansion(f in frame_strategy(6), gz in proptest::collection::vec(1u64..64, 1..4)) {
        let gens: Vec<PauliString> = gz
            .iter()
            .map(|&b| PauliString::z_on(6, (0..6).filter(|q| (b >> q) & 1 == 1)))
            .collect();
        let group = StabilizerGroup::from_generators(6, &gens).unwrap();
        let fast = f.expand_mod(&group);
        let slow = f.expand().merge_mod(&group);
        prop_assert_eq!(fast.len(), slow.len());
        for ((p, c), (q, d)) in fast.iter().zip(&slow) {
            prop_assert_eq!(p, q);
            prop_assert!((c - d).norm() < 1e-12);
        }
    }

    #[test]
    fn split_probabilities_are_sane(f in frame_strategy(4), obs_code in 1u64..256) {
        let p = |s: &str| PauliString::parse(s).unwrap();
        let group = StabilizerGroup::from_generators(4, &[p("ZZII"), p("IIZZ"), p("XXXX")]).unwrap();
        let x = QubitMask::from_qubits((0..4).filter(|q| (obs_code >> q) & 1 == 1));
        let z = QubitMask::from_qubits((0..4).filter(|q| (obs_code >> (4 + q)) & 1 == 1));
        let obs = PauliString::from_masks(4, x, z).hermitian();
        let (a, b) = split_measurement(&f.expand(), &obs, &group).unwrap();
        prop_assert!(a.prob >= -1e-15 && b.prob >= -1e-15);
        prop_assert!((a.prob + b.prob - 1.0).abs() < 1e-12);
        if !f.has_cz() && group.contains(&obs).is_some() {
            prop_assert!(a.prob.min(b.prob) < 1e-12);
        }
    }
}

#[test]
fn single_pauli_sum_is_deterministic_against_stabilizer() {
    let g = StabilizerGroup::from_generators(2, &[PauliString::parse("XX").unwrap()]).unwrap();
    let e = PauliSum::from_pauli(&PauliString::parse("XZ").unwrap());
    let (a, b) = split_measurement(&e, &PauliString::parse("XX").unwrap(), &g).unwrap();
    assert!(a.prob.abs() < 1e-12 && (b.prob - 1.0).abs() < 1e-12);
}
