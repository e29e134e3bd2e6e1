use bacon_shor::code::{CodeSpec, Gauge};
use bacon_shor::counting::{count, CountOptions};
use bacon_shor::exrec::{assemble, ExRecOptions, GateLabel};
use bacon_shor::noise::{enumerate_faults, FaultEvent, NoiseModel};
use bacon_shor::sim::run_fault_config;

fn code() -> CodeSpec {
    CodeSpec::new(3, 3, Gauge::Z).unwrap()
}

#[test]
fn no_faults_no_failure() {
    for g in [GateLabel::I, GateLabel::H, GateLabel::CNOT, GateLabel::CCZ] {
        let ex = assemble(g, code(), ExRecOptions::default()).unwrap();
        let o = run_fault_config(&ex, &[]).unwrap();
        assert_eq!(o.fail, 0.0, "{g:?}");
    }
}

#[test]
fn single_faults_never_fail() {
    for g in [GateLabel::I, GateLabel::H, GateLabel::CNOT, GateLabel::CCZ] {
        let ex = assemble(g, code(), ExRecOptions::default()).unwrap();
        let evs = enumerate_faults(&ex.circuit, &NoiseModel::uniform(1e-3)).unwrap();
        let mut bad = Vec::new();
        for e in &evs {
            let o = run_fault_config(&ex, std::slice::from_ref(e)).unwrap();
            assert!((o.weight - 1.0).abs() < 1e-10);
            if o.fail > 1e-12 {
                bad.push((e.location, e.error.to_string(), o.fail));
            }
        }
        assert!(bad.is_empty(), "{g:?}: {} of {} single faults fail, e.g. {:?}", bad.len(), evs.len(), &bad[..bad.len().min(5)]);
    }
}

#[test]
fn pair_order_does_not_matter() {
    let ex = assemble(GateLabel::CNOT, code(), ExRecOptions::default()).unwrap();
    let evs = enumerate_faults(&ex.circuit, &NoiseModel::uniform(1e-3)).unwrap();
    let n = evs.len();
    for k in 0..400 {
        let (a, b) = ((k * 7919) % n, (k * 104_729 + 13) % n);
        if evs[a].location == evs[b].location {
            continue;
        }
        let ab = run_fault_config(&ex, &[evs[a].clone(), evs[b].clone()]).unwrap();
        let ba = run_fault_config(&ex, &[evs[b].clone(), evs[a].clone()]).unwrap();
        assert!((ab.fail - ba.fail).abs() < 1e-12, "{:?} {:?}", evs[a].location, evs[b].location);
        assert!((ab.weight - 1.0).abs() < 1e-10);
    }
}

#[test]
fn cnot_has_a_malignant_x_pair_across_lec_and_ga() {
    let ex = assemble(GateLabel::CNOT, code(), ExRecOptions::default()).unwrap();
    let evs = enumerate_faults(&ex.circuit, &NoiseModel::uniform(1e-3)).unwrap();
    let is_x = |e: &FaultEvent| e.error.weight() == 1 && e.error.z.is_empty();
    let lec: Vec<_> = evs.iter().filter(|e| e.location.0 < ex.ga_steps.start && is_x(e)).collect();
    let ga: Vec<_> = evs.iter().filter(|e| ex.ga_steps.contains(&e.location.0) && is_x(e)).collect();
    let found = lec.iter().find_map(|a| {
        ga.iter().find_map(|b| {
            let o = run_fault_config(&ex, &[(*a).clone(), (*b).clone()]).unwrap();
            (o.fail > 1.0 - 1e-9).then_some((a.location, b.location))
        })
    });
    assert!(found.is_some(), "no malignant X pair among {} x {} events", lec.len(), ga.len());
}

#[test]
fn counts_are_worker_independent_and_monotone() {
    let ex = assemble(GateLabel::I, code(), ExRecOptions::default()).unwrap();
    let one = count(&ex, CountOptions { workers: 1, ..Default::default() }).unwrap();
    let many = count(&ex, CountOptions { workers: 3, ..Default::default() }).unwrap();
    for p in [1e-5, 1e-4, 1e-3] {
        let (f1, s1) = one.evaluate(&NoiseModel::uniform(p));
        let (f2, s2) = many.evaluate(&NoiseModel::uniform(p));
        assert!((f1 - f2).abs() <= 1e-12 * f1.max(1e-300) && (s1 - s2).abs() < 1e-12);
    }

    assert_eq!(one.evaluate(&NoiseModel::zero()), (0.0, 1.0));

    // p2_fail grows with every component rate on a small-rate grid
    for p in [1e-5, 1e-4, 5e-4] {
        let base = [p; 5];
        let (f0, _) = one.evaluate(&model(base));
        for c in 0..5 {
            let mut r = base;
            r[c] *= 1.5;
            let (f, _) = one.evaluate(&model(r));
            assert!(f >= f0 - 1e-18, "class {c} at p = {p}");
        }
    }

    // dropping all three-or-more-fault terms leaves a deficit of order p^3
    let deficit = |p: f64| {
        let (f, s) = one.evaluate(&NoiseModel::uniform(p));
        1.0 - (f + s)
    };
    let ratio = deficit(2e-3) / deficit(1e-3);
    assert!((ratio - 8.0).abs() < 1.0, "deficit ratio {ratio}");
}

fn model(r: [f64; 5]) -> NoiseModel {
    NoiseModel::new(r[0], r[1], r[2], r[3], r[4]).unwrap()
}
