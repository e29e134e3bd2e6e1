//! Circuit volume, spacetime volume and scheduled time of CCZ protocols
//! under ion-trap component timings.

use serde::{Deserialize, Serialize};

use crate::circuit::{gate, Circuit, GateKind, GateSpec};
use crate::code::{CodeSpec, Gauge, Placed};
use crate::gadgets::{ccz_3x3, ckz_round_robin, steane_ancilla_steps, SteanePart};
use crate::error::{Error, Result};

/// Component durations in microseconds.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct TimingProfile {
    pub t_1q: f64,
    pub t_2q: f64,
    pub t_3q: f64,
    pub t_prep: f64,
    pub t_meas: f64,
    /// Multi-qubit gates that may run at once.
    pub parallel_multiqubit_limit: usize,
}

impl Default for TimingProfile {
    fn default() -> Self {
        TimingProfile { t_1q: 1.0, t_2q: 10.0, t_3q: 10.0, t_prep: 1.0, t_meas: 30.0, parallel_multiqubit_limit: 12 }
    }
}

impl TimingProfile {
    pub fn validate(&self) -> Result<()> {
        let ts = [self.t_1q, self.t_2q, self.t_3q, self.t_prep, self.t_meas];
        if ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter(format!("component times must be positive: {ts:?}")));
        }
        if self.parallel_multiqubit_limit == 0 {
            return Err(Error::InvalidParameter("parallel limit must be at least 1".into()));
        }
        Ok(())
    }

    pub fn duration(&self, g: &GateSpec) -> f64 {
        match g.kind {
            k if k.is_prep() => self.t_prep,
            k if k.is_meas() => self.t_meas,
            _ => match g.qubits.len() {
                1 => self.t_1q,
                2 => self.t_2q,
                _ => self.t_3q,
            },
        }
    }

    /// The smallest component time.
    pub fn min_time(&self) -> f64 {
        [self.t_1q, self.t_2q, self.t_3q, self.t_prep, self.t_meas].into_iter().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct CostReport {
    pub circuit_volume: usize,
    /// Microseconds times qubits.
    pub spacetime_volume: f64,
    /// Microseconds.
    pub total_time: f64,
    pub qubit_count: usize,
}

fn counted(g: &GateSpec) -> bool {
    !(g.kind == GateKind::I && g.tag.as_deref() == Some("idle"))
}

/// Qubit participations in preparations, gates and measurements. Idle
/// locations are not components.
pub fn circuit_volume(c: &Circuit) -> usize {
    c.gates().filter(|g| counted(g)).map(|g| g.qubits.len()).sum()
}

pub fn spacetime_volume(c: &Circuit, p: &TimingProfile) -> f64 {
    c.gates().filter(|g| counted(g)).map(|g| g.qubits.len() as f64 * p.duration(g)).sum()
}

/// Runs timesteps in order, each as a synchronized layer. Multi-qubit gates
/// of a layer go in batches of at most the parallel limit; single-qubit
/// components overlap the first batch. Returns the total time and the number
/// of qubits touched.
pub fn schedule_time(c: &Circuit, p: &TimingProfile, qubit_budget: usize) -> Result<(f64, usize)> {
    p.validate()?;
    let used = used_qubits(c);
    if used > qubit_budget {
        return Err(Error::InfeasibleBudget { need: used, have: qubit_budget });
    }
    let mut total = 0.0;
    for step in &c.timesteps {
        let (multi, single): (Vec<&GateSpec>, Vec<&GateSpec>) =
            step.iter().filter(|g| counted(g)).partition(|g| g.qubits.len() > 1);
        let single_time = single.iter().map(|g| p.duration(g)).fold(0.0, f64::max);
        let multi_time: f64 = multi
            .chunks(p.parallel_multiqubit_limit)
            .map(|batch| batch.iter().map(|g| p.duration(g)).fold(0.0, f64::max))
            .sum();
        total += single_time.max(multi_time);
    }
    Ok((total, used))
}

fn used_qubits(c: &Circuit) -> usize {
    let mut seen = vec![false; c.n_qubits()];
    for g in c.gates().filter(|g| counted(g)) {
        for &q in &g.qubits {
            seen[q] = true;
        }
    }
    seen.iter().filter(|&&s| s).count()
}

pub fn report(volume: &Circuit, scheduled: &Circuit, p: &TimingProfile, qubit_budget: usize) -> Result<CostReport> {
    let (total_time, qubit_count) = schedule_time(scheduled, p, qubit_budget)?;
    Ok(CostReport {
        circuit_volume: circuit_volume(volume),
        spacetime_volume: spacetime_volume(volume, p),
        total_time,
        qubit_count,
    })
}

/// Protocols compared in the resource table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Protocol {
    /// Magic-state preparation and injection on the 7-qubit code.
    Magic7,
    /// The same protocol on the 3x3 Bacon-Shor code.
    Magic9,
    /// Depth-3 physical CCZ on three 3x3 blocks plus one Steane round.
    BaconShor3x3,
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "magic7" => Ok(Protocol::Magic7),
            "magic9" => Ok(Protocol::Magic9),
            "bs3x3" => Ok(Protocol::BaconShor3x3),
            _ => Err(Error::Parse(format!("unknown protocol {s:?}"))),
        }
    }
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Magic7, Protocol::Magic9, Protocol::BaconShor3x3];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Magic7 => "Magic 7",
            Protocol::Magic9 => "Magic 9",
            Protocol::BaconShor3x3 => "BS 3x3",
        }
    }

    /// Qubits with one ancilla block per block that needs correction.
    pub fn qubit_budget(self) -> usize {
        match self {
            Protocol::Magic7 => 3 * 7 + 3 * 7 + 3 * 8,
            Protocol::Magic9 => 3 * 9 * 3,
            Protocol::BaconShor3x3 => 2 * 27,
        }
    }
}

/// Gate list for an encoder of the 7-qubit code's `|0>`: `|+>` on the
/// first three qubits, eight CNOTs. `Z` on qubits 0..3 is a logical Z.
const SEVEN_ENCODER: [&[(usize, usize)]; 3] = [&[(0, 3), (1, 4)], &[(0, 6), (1, 5), (2, 3)], &[(2, 4), (3, 1), (5, 0)]];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum CodeKind {
    Seven,
    BaconShor,
}

impl CodeKind {
    fn n(self) -> usize {
        match self {
            CodeKind::Seven => 7,
            CodeKind::BaconShor => 9,
        }
    }
}

struct Builder {
    c: Circuit,
    /// Extra qubits verifying small cats, when they are counted.
    verify: Option<usize>,
    /// No gate is placed before this timestep.
    floor: usize,
}

impl Builder {
    fn push(&mut self, gates: impl IntoIterator<Item = GateSpec>) {
        self.c.push_asap(gates, self.floor);
    }

    /// Start the next stage after everything pushed so far.
    fn barrier(&mut self) {
        self.floor = self.c.depth();
    }

    fn range(&self, name: &str) -> Vec<usize> {
        self.c.block(name).map(|b| b.range().collect()).unwrap_or_default()
    }

    /// `|0..0> + |1..1>` on `qs` by doubling fan-out from the first qubit.
    fn fanout_cat(&mut self, qs: &[usize]) {
        self.push(qs.iter().enumerate().map(|(k, &q)| gate(if k == 0 { GateKind::PrepPlus } else { GateKind::Prep0 }, &[q])));
        let mut have = 1;
        while have < qs.len() {
            let grow = have.min(qs.len() - have);
            self.push((0..grow).map(|k| gate(GateKind::CNOT, &[qs[k], qs[have + k]])));
            have += grow;
        }
    }

    /// Parity check of two qubits of a cat on `v`, accepted on outcome 0.
    fn check(&mut self, v: usize, a: usize, b: usize, x_basis: bool) {
        if x_basis {
            self.push([gate(GateKind::PrepPlus, &[v]), gate(GateKind::CNOT, &[v, a]), gate(GateKind::CNOT, &[v, b])]);
            self.push([gate(GateKind::MeasX, &[v])]);
        } else {
            self.push([gate(GateKind::Prep0, &[v]), gate(GateKind::CNOT, &[a, v]), gate(GateKind::CNOT, &[b, v])]);
            self.push([gate(GateKind::MeasZ, &[v])]);
        }
    }

    /// Ancilla state of one Steane part on a 3x3 block, with the small cats
    /// checked when `self.verify` is set. `slot` picks verification qubits.
    fn bs_state(&mut self, anc: Placed, part: SteanePart, slot: usize) {
        for step in steane_ancilla_steps(anc, part) {
            self.push(step);
        }
        if let Some(v0) = self.verify {
            let (m, n) = (anc.spec.m, anc.spec.n);
            match part {
                SteanePart::A => (0..n).for_each(|k| self.check(v0 + slot * n + k, anc.q(0, k), anc.q(m - 1, k), true)),
                SteanePart::B => (0..m).for_each(|i| self.check(v0 + slot * m + i, anc.q(i, 0), anc.q(i, n - 1), false)),
            }
        }
    }

    fn bs_round(&mut self, pairs: &[(Placed, Placed)]) {
        for part in [SteanePart::B, SteanePart::A] {
            self.barrier();
            for (b, &(_, a)) in pairs.iter().enumerate() {
                self.bs_state(a, part, b);
            }
            self.barrier();
            for &(d, a) in pairs {
                self.push(d.qubits().zip(a.qubits()).map(|(qd, qa)| match part {
                    SteanePart::A => gate(GateKind::CNOT, &[qa, qd]),
                    SteanePart::B => gate(GateKind::CNOT, &[qd, qa]),
                }));
            }
            self.barrier();
            for &(_, a) in pairs {
                let kind = if part == SteanePart::A { GateKind::MeasX } else { GateKind::MeasZ };
                self.push(a.qubits().map(|q| gate(kind, &[q])));
            }
        }
    }

    /// Verified `|0>` (or `|+>`) of the 7-qubit code on `qs`, checked on `v`.
    fn seven_state(&mut self, qs: &[usize], v: usize, plus: bool) {
        self.push((0..7).map(|k| gate(if k < 3 { GateKind::PrepPlus } else { GateKind::Prep0 }, &[qs[k]])));
        for layer in SEVEN_ENCODER {
            self.push(layer.iter().map(|&(c, t)| gate(GateKind::CNOT, &[qs[c], qs[t]])));
        }
        self.push([gate(GateKind::Prep0, &[v])]);
        self.push((0..3).map(|k| gate(GateKind::CNOT, &[qs[k], v])));
        self.push([gate(GateKind::MeasZ, &[v])]);
        if plus {
            self.push(qs.iter().map(|&q| gate(GateKind::H, &[q])));
        }
    }

    /// Steane correction of both error types on each `(data, ancilla)`
    /// pair; the ancilla carries one extra verification qubit.
    fn seven_round(&mut self, pairs: &[(Vec<usize>, Vec<usize>)]) {
        for plus in [true, false] {
            self.barrier();
            for (_, a) in pairs {
                self.seven_state(&a[..7], a[7], plus);
            }
            self.barrier();
            for (d, a) in pairs {
                self.push((0..7).map(|k| {
                    if plus {
                        gate(GateKind::CNOT, &[d[k], a[k]])
                    } else {
                        gate(GateKind::CNOT, &[a[k], d[k]])
                    }
                }));
            }
            self.barrier();
            for (_, a) in pairs {
                let kind = if plus { GateKind::MeasZ } else { GateKind::MeasX };
                self.push(a[..7].iter().map(|&q| gate(kind, &[q])));
            }
        }
    }
}

fn builder(sizes: &[(&str, usize)], verify: Option<usize>) -> Builder {
    let mut all = sizes.to_vec();
    if let Some(n) = verify {
        all.push(("V", n));
    }
    let c = Circuit::with_blocks(&all);
    let verify = verify.map(|_| c.block("V").expect("verification block").start);
    Builder { c, verify, floor: 0 }
}

/// Depth-3 CCZ on three 3x3 blocks followed by one Steane round.
fn bacon_shor_ccz(check_cats: bool) -> Circuit {
    let mut b = builder(
        &[("D0", 9), ("D1", 9), ("D2", 9), ("A0", 9), ("A1", 9), ("A2", 9)],
        check_cats.then_some(9),
    );
    let code = CodeSpec { m: 3, n: 3, gauge: Gauge::Z };
    for step in ccz_3x3().timesteps {
        b.push(step);
    }
    let pairs: Vec<(Placed, Placed)> = (0..3).map(|k| (Placed::new(code, 9 * k), Placed::new(code, 27 + 9 * k))).collect();
    b.bs_round(&pairs);
    b.c
}

/// Prepare the encoded CCZ state by two checked measurements of
/// `X_3 CZ_12` with an error-correction round between them, inject it by
/// teleportation with all three Clifford corrections applied, then correct
/// the output blocks once more.
fn magic_state(kind: CodeKind, check_cats: bool) -> Circuit {
    let n = kind.n();
    let na = if kind == CodeKind::Seven { n + 1 } else { n };
    let mut b = builder(
        &[("D0", n), ("D1", n), ("D2", n), ("M0", n), ("M1", n), ("M2", n), ("A0", na), ("A1", na), ("A2", na)],
        check_cats.then_some(9),
    );
    let data: Vec<Vec<usize>> = (0..3).map(|k| b.range(&format!("D{k}"))).collect();
    let magic: Vec<Vec<usize>> = (0..3).map(|k| b.range(&format!("M{k}"))).collect();
    let anc: Vec<Vec<usize>> = (0..3).map(|k| b.range(&format!("A{k}"))).collect();
    let code = CodeSpec { m: 3, n: 3, gauge: Gauge::Z };
    let placed = |qs: &[usize]| Placed::new(code, qs[0]);

    // logical CZ between two blocks as qubit pairs
    let cz_pairs = |x: &[usize], y: &[usize]| -> Vec<(usize, usize)> {
        match kind {
            CodeKind::Seven => x.iter().copied().zip(y.iter().copied()).collect(),
            CodeKind::BaconShor => ckz_round_robin(3, 3, 1)
                .expect("3x3 CZ")
                .gates()
                .map(|g| (x[g.qubits[0]], y[g.qubits[1] - 9]))
                .collect(),
        }
    };

    for (k, m) in magic.iter().enumerate() {
        let plus = k < 2;
        match kind {
            CodeKind::Seven => b.seven_state(m, anc[k][7], plus),
            CodeKind::BaconShor => {
                b.bs_state(placed(m), if plus { SteanePart::B } else { SteanePart::A }, k)
            }
        }
    }
    let ec = |b: &mut Builder| match kind {
        CodeKind::Seven => b.seven_round(&magic.iter().cloned().zip(anc.iter().cloned()).collect::<Vec<_>>()),
        CodeKind::BaconShor => {
            b.bs_round(&magic.iter().zip(&anc).map(|(m, a)| (placed(m), placed(a))).collect::<Vec<_>>())
        }
    };
    let free: Vec<usize> = anc.concat();
    let cz = cz_pairs(&magic[0], &magic[1]);
    for round in 0..2 {
        if round == 1 {
            ec(&mut b);
        }
        b.barrier();
        let (cat, v) = (&free[..n], free[n]);
        b.fanout_cat(cat);
        b.check(v, cat[0], cat[n - 1], false);
        b.barrier();
        b.push((0..n).map(|k| gate(GateKind::CNOT, &[cat[k], magic[2][k]])));
        b.push(cz.iter().zip(cat).map(|(&(x, y), &c)| gate(GateKind::CCZ, &[c, x, y])));
        b.barrier();
        b.push(cat.iter().map(|&q| gate(GateKind::MeasX, &[q])));
    }

    b.barrier();
    for k in 0..3 {
        b.push((0..n).map(|j| gate(GateKind::CNOT, &[magic[k][j], data[k][j]])));
    }
    for d in &data {
        b.push(d.iter().map(|&q| gate(GateKind::MeasZ, &[q])));
    }
    b.barrier();
    for k in 0..3 {
        b.push(magic[k].iter().map(|&q| gate(GateKind::X, &[q])));
        let pairs = cz_pairs(&magic[(k + 1) % 3], &magic[(k + 2) % 3]);
        b.push(pairs.into_iter().map(|(x, y)| gate(GateKind::CZ, &[x, y])));
    }
    ec(&mut b);
    b.c
}

/// Circuits for one protocol: the first is counted for volumes, the second
/// is scheduled. Small cats are checked in the counted circuit only, since
/// the scheduled one must fit the qubit budget.
pub fn protocol_circuits(p: Protocol) -> (Circuit, Circuit) {
    let build = |check: bool| match p {
        Protocol::Magic7 => magic_state(CodeKind::Seven, check),
        Protocol::Magic9 => magic_state(CodeKind::BaconShor, check),
        Protocol::BaconShor3x3 => bacon_shor_ccz(check),
    };
    (build(true), build(false))
}

pub fn protocol_report(p: Protocol, profile: &TimingProfile) -> Result<CostReport> {
    let (volume, scheduled) = protocol_circuits(p);
    report(&volume, &scheduled, profile, p.qubit_budget())
}

/// Rows in the resource-table column order.
pub fn table_csv(rows: &[(Protocol, CostReport)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["protocol", "circuit_volume", "spacetime_volume_us_qubits", "time_us", "qubits"]).map_err(io)?;
    for (p, r) in rows {
        w.write_record([
            p.name().to_string(),
            r.circuit_volume.to_string(),
            format!("{:.0}", r.spacetime_volume),
            format!("{:.0}", r.total_time),
            r.qubit_count.to_string(),
        ])
        .map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}
