use bacon_shor::bits::QubitMask;
use bacon_shor::circuit::GateKind;
use bacon_shor::code::*;
use bacon_shor::frame::DiagonalCliffordFrame;
use bacon_shor::gadgets::ckz_round_robin;
use bacon_shor::pauli::PauliString;
use proptest::prelude::*;

fn groups(m: usize, n: usize) -> OperatorGroups {
    build(m, n, Gauge::Z).unwrap().1
}

#[test]
fn generator_counts() {
    let g = groups(3, 3);
    assert_eq!(g.stabilizers().count(), 4);
    assert_eq!((g.z_gauge.len(), g.x_gauge.len()), (6, 6));
    assert_eq!(groups(3, 9).stabilizers().count(), 10);
    let g = groups(2, 2);
    assert_eq!(g.z_stabs[0].to_string(), "+ZZZZ");
    assert_eq!(g.x_stabs[0].to_string(), "+XXXX");
    assert_eq!((g.logical_x.weight(), g.logical_z.weight()), (2, 2));
    assert!(matches!(build(1, 3, Gauge::Z), Err(bacon_shor::Error::DegenerateCode { .. })));
}

#[test]
fn single_x_syndrome() {
    let g = groups(3, 3);
    let e = PauliString::x_on(9, [0]);
    let s = syndrome_of(&g, &e, RoundType::Type1, Gauge::Z);
    assert_eq!(s.z_stab_bits, 0b01);
    // Z-bar_{0,1} is the only Z-gauge generator touching qubit (0, 0)
    assert_eq!(s.gauge_bits, Some(1));
    for st in g.stabilizers() {
        assert_eq!(syndrome_of(&g, st, RoundType::Type2, Gauge::Z), Syndrome::default());
    }
    assert_eq!(syndrome_of(&g, &g.logical_z, RoundType::Type2, Gauge::Z), Syndrome::default());
}

#[test]
fn classification_examples() {
    let g = groups(3, 3);
    assert_eq!(classify(&g, &g.z_gauge[0]), ErrorClass::GaugeOnly);
    assert_eq!(classify(&g, &PauliString::z_on(9, [0, 3, 6])), ErrorClass::LogicalZ);
    assert_eq!(classify(&g, &PauliString::z_on(9, [0, 3])), ErrorClass::Detectable);
    let y = g.logical_x.mul_unchecked(&g.logical_z);
    assert_eq!(classify(&g, &y), ErrorClass::LogicalY);
}

#[test]
fn inference_identity() {
    for m in 2..=5 {
        for n in 2..=9 {
            let g = groups(m, n);
            for j in 1..n {
                let prod = (0..m).fold(PauliString::identity(m * n), |acc, i| acc.mul_unchecked(&g.z_gauge[i * (n - 1) + j - 1]));
                assert_eq!(prod, g.z_stabs[j - 1], "{m}x{n} column {j}");
            }
        }
    }
}

#[test]
fn stabilizer_group_is_identity_coset() {
    for m in 2..=4 {
        for n in 2..=4 {
            let g = groups(m, n);
            let gens: Vec<&PauliString> = g.stabilizers().collect();
            for bits in 0u32..1 << gens.len() {
                let e = gens
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| bits >> k & 1 == 1)
                    .fold(PauliString::identity(m * n), |acc, (_, s)| acc.mul_unchecked(s));
                assert_eq!(classify(&g, &e), ErrorClass::IdentityCoset);
            }
        }
    }
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| {
        let mask = |b: u64| QubitMask::from_qubits((0..n).filter(|q| b >> q & 1 == 1));
        PauliString::from_masks(n, mask(x), mask(z))
    })
}

proptest! {
    #[test]
    fn syndrome_is_homomorphism(a in arb_pauli(12), b in arb_pauli(12), x_start in any::<bool>()) {
        let g = groups(3, 4);
        let start = if x_start { Gauge::X } else { Gauge::Z };
        let s = |e: &PauliString| syndrome_of(&g, e, RoundType::Type1, start);
        prop_assert_eq!(s(&a.mul_unchecked(&b)), s(&a) ^ s(&b));
    }

    #[test]
    fn z_gauge_products_act_trivially(sel in any::<u16>(), rows in any::<u8>()) {
        let g = groups(3, 4);
        let e = g.z_gauge.iter().enumerate().filter(|(k, _)| sel >> k & 1 == 1)
            .fold(PauliString::identity(12), |acc, (_, z)| acc.mul_unchecked(z));
        let bits: Vec<bool> = (0..3).map(|i| rows >> i & 1 == 1).collect();
        let ph = codespace_phase_eval(&DiagonalCliffordFrame::from_pauli(&e), &[g], &bits).unwrap();
        prop_assert!((ph.re - 1.0).abs() < 1e-12 && ph.im.abs() < 1e-12);
    }
}

#[test]
fn logical_z_phase() {
    let g = groups(3, 3);
    let d = DiagonalCliffordFrame::from_pauli(&PauliString::z_on(9, [0, 3, 6]));
    for rows in 0u8..8 {
        let bits: Vec<bool> = (0..3).map(|i| rows >> i & 1 == 1).collect();
        let want = if rows.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        assert_eq!(codespace_phase_eval(&d, &[g.clone()], &bits).unwrap().re, want);
    }
    let bad = DiagonalCliffordFrame::from_pauli(&PauliString::x_on(9, [0]));
    assert!(codespace_phase_eval(&bad, &[g], &[false; 3]).is_err());
}

#[test]
fn round_robin_cz_phase_is_parity_product() {
    let c = ckz_round_robin(3, 3, 1).unwrap();
    let mut d = DiagonalCliffordFrame::identity(18);
    for gt in c.gates() {
        d = DiagonalCliffordFrame::cz(18, gt.qubits[0], gt.qubits[1]).mul_unchecked(&d);
    }
    let spec = CodeSpec::new(3, 3, Gauge::Z).unwrap();
    let blocks = [OperatorGroups::placed(spec, 0, 18).unwrap(), OperatorGroups::placed(spec, 9, 18).unwrap()];
    for rows in 0u8..64 {
        let bits: Vec<bool> = (0..6).map(|i| rows >> i & 1 == 1).collect();
        let (a, b) = ((rows & 7).count_ones() % 2, (rows >> 3).count_ones() % 2);
        let want = if a * b == 1 { -1.0 } else { 1.0 };
        assert_eq!(codespace_phase_eval(&d, &blocks, &bits).unwrap().re, want, "rows {rows:06b}");
    }
}

#[test]
fn extension_shapes() {
    let c33 = CodeSpec::new(3, 3, Gauge::Z).unwrap();
    assert_eq!(extension_circuit(c33, c33).unwrap().gate_count(), 0);

    let c53 = CodeSpec::new(5, 3, Gauge::Z).unwrap();
    let c = extension_circuit(c33, c53).unwrap();
    c.validate().unwrap();
    assert_eq!(c.n_qubits(), 9 + 6 + 15);
    // 2x3 |+_Z> block: two row cats, then a full 5x3 round
    assert_eq!(c.timesteps[0].len(), 6);
    assert_eq!(c.count_kind(GateKind::MeasZ) + c.count_kind(GateKind::MeasX), 30);

    let c34 = CodeSpec::new(3, 4, Gauge::Z).unwrap();
    let shrink = extension_circuit(c34, c33).unwrap();
    let dropped: Vec<usize> = shrink.gates().map(|g| g.qubits[0]).collect();
    assert_eq!(dropped, vec![3, 7, 11]);
    assert!(shrink.gates().all(|g| g.kind == GateKind::MeasX));

    let grow = extension_circuit(c33, c34).unwrap();
    assert_eq!(grow.n_qubits(), 9 + 3 + 12);

    let c44 = CodeSpec::new(4, 4, Gauge::Z).unwrap();
    assert!(extension_circuit(c33, c44).is_err());
}
