//! Fault propagation through an exREC with decoding at every measurement
//! layer.
//!
//! Errors are tracked as deviations from the noiseless run. A noiseless
//! run is assumed to see `+1` for every gauge it measures; random outcomes
//! only enter through gauge fixing, which is linear in the flips.

use crate::bits::QubitMask;
use crate::circuit::GateKind;
use crate::code::{Gauge, Placed};
use crate::decoder::{gauge_fix, ideal_decode, to_physical};
use crate::error::{Error, Result};
use crate::exrec::{ExRec, GateLabel, RowRule};
use crate::frame::DiagonalCliffordFrame;
use crate::gadgets::SteanePart;
use crate::noise::FaultEvent;
use crate::pauli::PauliString;

/// One measurement branch.
#[derive(Clone, Debug, PartialEq)]
pub struct SimBranch {
    pub frame: DiagonalCliffordFrame,
    pub weight: f64,
    /// Measurement flips recorded since the last decoding step.
    meas: QubitMask,
    /// Ideally decoded logical flags after the LEC, per block.
    pub l1: Option<Vec<(bool, bool)>>,
    /// Rows recorded by the CCZ decoder, one bitmask per block.
    rows: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub next_step: usize,
    pub branches: Vec<SimBranch>,
}

impl Eq for SimState {}

impl std::hash::Hash for SimState {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.next_step.hash(h);
        for b in &self.branches {
            b.frame.hash(h);
            b.weight.to_bits().hash(h);
            b.meas.hash(h);
            b.l1.hash(h);
            b.rows.hash(h);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    /// Probability-weighted failure fraction.
    pub fail: f64,
    /// Total branch weight; 1 up to rounding.
    pub weight: f64,
}

/// Output of CCZ TEC stage 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CczRecovery {
    /// X and CZ correction, applied on the left of the error frame.
    pub frame: DiagonalCliffordFrame,
    /// Rows per output block that stage 2 may correct.
    pub rows: Vec<u64>,
}

/// Apply a noiseless recovery on the left of `frame`.
pub fn apply_recovery(frame: &DiagonalCliffordFrame, recovery: &DiagonalCliffordFrame) -> DiagonalCliffordFrame {
    recovery.mul_unchecked(frame)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Round {
    Lec,
    Tec,
}

fn gen_flips(gens: &[PauliString], p: &PauliString) -> u64 {
    gens.iter()
        .enumerate()
        .filter(|(_, g)| !g.commutes_unchecked(p))
        .fold(0, |acc, (k, _)| acc | 1 << k)
}

fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

/// `X~_h` flips from `X-bar_{h,k}` flips.
fn x_stabs_from_gauge(v: u64, m: usize, n: usize) -> u64 {
    (1..m).fold(0, |acc, h| acc | parity(v >> ((h - 1) * n) & ((1 << n) - 1)) << (h - 1))
}

/// `Z~_j` flips from `Z-bar_{i,j}` flips.
fn z_stabs_from_gauge(v: u64, m: usize, n: usize) -> u64 {
    (1..n).fold(0, |acc, j| {
        let p = (0..m).fold(0, |p, i| p ^ (v >> (i * (n - 1) + j - 1) & 1));
        acc | p << (j - 1)
    })
}

/// Gauge-operator flips of a data block from its ancilla's outcomes.
fn part_flips(anc: &Placed, part: SteanePart, meas: &QubitMask) -> u64 {
    let (m, n) = (anc.spec.m, anc.spec.n);
    let f = |i: usize, j: usize| meas.get(anc.q(i, j)) as u64;
    let mut v = 0;
    match part {
        SteanePart::B => {
            for i in 0..m {
                for j in 1..n {
                    v |= (f(i, j - 1) ^ f(i, j)) << (i * (n - 1) + j - 1);
                }
            }
        }
        SteanePart::A => {
            for h in 1..m {
                for k in 0..n {
                    v |= (f(h - 1, k) ^ f(h, k)) << ((h - 1) * n + k);
                }
            }
        }
    }
    v
}

fn local_pauli(nq: usize, x: QubitMask, z: QubitMask) -> PauliString {
    PauliString::from_masks(nq, x, z)
}

impl SimBranch {
    fn apply_local(&mut self, block: &Placed, p: &PauliString) {
        let phys = PauliString::from_masks(
            self.frame.n_qubits(),
            to_physical(block, &p.x),
            to_physical(block, &p.z),
        );
        self.frame = self.frame.left_mul_pauli(&phys);
    }
}

impl ExRec {
    pub fn initial_state(&self) -> SimState {
        let n = self.n_qubits();
        SimState {
            next_step: 0,
            branches: vec![SimBranch {
                frame: DiagonalCliffordFrame::identity(n),
                weight: 1.0,
                meas: QubitMask::EMPTY,
                l1: None,
                rows: vec![0; self.gate.n_blocks()],
            }],
        }
    }

    /// Process one timestep, injecting `faults` located in it.
    pub fn step(&self, st: &mut SimState, faults: &[&FaultEvent]) -> Result<()> {
        let t = st.next_step;
        let layer = &self.circuit.timesteps[t];
        for b in st.branches.iter_mut() {
            for f in faults.iter().filter(|f| f.before_gate()) {
                b.frame = b.frame.left_mul_pauli(&f.error);
            }
            for g in layer {
                match g.kind {
                    GateKind::I => {}
                    GateKind::Prep0 | GateKind::PrepPlus => {
                        let q = g.qubits[0];
                        if b.frame.cz_pairs().iter().any(|&(u, v)| u as usize == q || v as usize == q) {
                            return Err(Error::InvalidCircuit(format!("frame entangles qubit {q} at preparation")));
                        }
                        b.frame.x.set(q, false);
                        b.frame.z.set(q, false);
                    }
                    GateKind::MeasZ => {
                        let q = g.qubits[0];
                        b.meas.set(q, b.frame.x.get(q));
                    }
                    GateKind::MeasX => {
                        let q = g.qubits[0];
                        if b.frame.cz_pairs().iter().any(|&(u, v)| u as usize == q || v as usize == q) {
                            return Err(Error::InvalidCircuit(format!("X measurement of qubit {q} is not deterministic")));
                        }
                        b.meas.set(q, b.frame.z.get(q));
                    }
                    _ => b.frame.conjugate_in_place(g)?,
                }
            }
            for f in faults.iter().filter(|f| !f.before_gate()) {
                b.frame = b.frame.left_mul_pauli(&f.error);
            }
        }
        st.next_step += 1;
        for (round, info) in [(Round::Lec, &self.lec), (Round::Tec, &self.tec)] {
            if let Some(k) = info.meas_steps.iter().position(|&s| s == t) {
                let mut out = Vec::with_capacity(st.branches.len());
                for b in st.branches.drain(..) {
                    out.extend(self.decode_part(round, k, b)?);
                }
                st.branches = out;
            }
        }
        Ok(())
    }

    fn decode_part(&self, round: Round, k: usize, mut b: SimBranch) -> Result<Vec<SimBranch>> {
        let info = if round == Round::Lec { &self.lec } else { &self.tec };
        let decoders = if round == Round::Lec { &self.in_decoders } else { &self.out_decoders };
        let part = info.parts[k];
        let flips: Vec<u64> = info.pairs.iter().map(|(_, a)| part_flips(a, part, &b.meas)).collect();
        b.meas = QubitMask::EMPTY;
        let mut anc = QubitMask::EMPTY;
        for (_, a) in &info.pairs {
            anc = anc.or(&a.mask());
        }
        b.frame.x = b.frame.x.and_not(&anc);
        b.frame.z = b.frame.z.and_not(&anc);
        let ccz_tec = self.gate == GateLabel::CCZ && round == Round::Tec;
        let spec = decoders.spec;
        let (m, n, nq) = (spec.m, spec.n, spec.n_qubits());
        let local = &decoders.local;
        let mut out = if k == 0 && ccz_tec {
            self.ccz_stage1(b, &flips)?
        } else if k == 0 {
            let table = decoders.table(info.start_gauge);
            for (bi, (d, _)) in info.pairs.iter().enumerate() {
                let p = match info.start_gauge {
                    Gauge::X => local_pauli(nq, QubitMask::EMPTY, table.z_table.lookup(flips[bi])),
                    _ => local_pauli(nq, table.x_table.lookup(flips[bi]), QubitMask::EMPTY),
                };
                b.apply_local(d, &p);
            }
            vec![b]
        } else {
            let table = decoders.table(info.start_gauge);
            for (bi, (d, _)) in info.pairs.iter().enumerate() {
                let v = flips[bi];
                let (corr, measured) = match info.end_gauge() {
                    Gauge::X => {
                        let s = x_stabs_from_gauge(v, m, n);
                        let z = if ccz_tec { self.stage2_rows(b.rows[bi], s, spec.m, spec.n) } else { None };
                        let z = z.unwrap_or_else(|| table.z_table.lookup(s));
                        let corr = local_pauli(nq, QubitMask::EMPTY, z);
                        (corr.clone(), v ^ gen_flips(&local.x_gauge, &corr))
                    }
                    _ => {
                        let s = z_stabs_from_gauge(v, m, n);
                        let corr = local_pauli(nq, table.x_table.lookup(s), QubitMask::EMPTY);
                        (corr.clone(), v ^ gen_flips(&local.z_gauge, &corr))
                    }
                };
                let fix = gauge_fix(spec, info.end_gauge(), measured);
                b.apply_local(d, &corr.mul_unchecked(&fix));
            }
            vec![b]
        };
        if round == Round::Lec && k == 1 {
            for b in out.iter_mut() {
                let e = b
                    .frame
                    .as_pauli()
                    .ok_or_else(|| Error::InvalidCircuit("non-Pauli frame after the LEC".into()))?;
                let table = self.in_decoders.table(info.end_gauge());
                b.l1 = Some(self.in_groups.iter().map(|g| ideal_decode(g, table, &e).1).collect());
            }
        }
        Ok(out)
    }

    /// Propagate `X^p` placed after timestep `after` through the rest of Ga.
    fn through_ga(&self, p: &QubitMask, after: usize) -> Result<DiagonalCliffordFrame> {
        let mut f = DiagonalCliffordFrame::from_pauli(&PauliString::from_masks(self.n_qubits(), *p, QubitMask::EMPTY));
        for g in self.ga_gates.iter().filter(|g| g.step > after) {
            f.conjugate_in_place(&g.gate)?;
        }
        Ok(f)
    }

    fn rows_of(&self, support: &QubitMask) -> Vec<u64> {
        self.out_blocks
            .iter()
            .map(|blk| support.and(&blk.mask()).iter().fold(0, |acc, q| acc | 1 << blk.coords(q).0))
            .collect()
    }

    /// Stage 1 of the CCZ TEC decoder. From the Z-gauge flips of each
    /// output block, locate X errors; if every block has at most one, undo
    /// the temporally last Ga gate that could have produced them and record
    /// the rows that may still carry residue. Otherwise correct X by table.
    pub fn decode_ccz_stage1(&self, z_gauge_flips: &[u64]) -> Result<CczRecovery> {
        let d = &self.out_decoders;
        let xs: Vec<QubitMask> = z_gauge_flips.iter().map(|&v| d.from_z.x_table.lookup(v)).collect();
        let mut p = QubitMask::EMPTY;
        for (blk, x) in self.out_blocks.iter().zip(&xs) {
            p = p ^ to_physical(blk, x);
        }
        let plain = DiagonalCliffordFrame::from_pauli(&PauliString::from_masks(self.n_qubits(), p, QubitMask::EMPTY));
        let single = xs.iter().all(|x| x.count() <= 1) && !p.is_empty();
        let cands: Vec<_> = if single {
            self.ga_gates
                .iter()
                .filter(|g| p.iter().all(|q| g.gate.qubits.contains(&q)))
                .collect()
        } else {
            Vec::new()
        };
        let mut rows = vec![0u64; self.out_blocks.len()];
        let Some(last) = cands.iter().max_by_key(|g| g.step) else {
            return Ok(CczRecovery { frame: plain, rows });
        };
        let r = self.through_ga(&p, last.step)?.inverse();
        let earlier = cands.iter().filter(|g| g.step < last.step);
        match self.row_rule {
            RowRule::Lightcone => {
                for g in earlier {
                    for (acc, r) in rows.iter_mut().zip(&g.lightcone_rows) {
                        *acc |= r;
                    }
                }
            }
            RowRule::Residual => {
                let before = self.ga_steps.start.wrapping_sub(1);
                let alts = earlier.map(|g| g.step).chain(std::iter::once(before));
                for step in alts {
                    let res = r.mul_unchecked(&self.through_ga(&p, step)?);
                    for (acc, rw) in rows.iter_mut().zip(self.rows_of(&res.support())) {
                        *acc |= rw;
                    }
                }
            }
        }
        Ok(CczRecovery { frame: r, rows })
    }

    /// Stage 2: block-local Z corrections from X-stabilizer flips, confined
    /// to the recorded rows when that singles out a correction, otherwise
    /// taken from the table.
    pub fn decode_ccz_stage2(&self, rows: &[u64], x_stab_flips: &[u64]) -> Vec<QubitMask> {
        let d = &self.out_decoders;
        rows.iter()
            .zip(x_stab_flips)
            .map(|(&r, &s)| {
                self.stage2_rows(r, s, d.spec.m, d.spec.n).unwrap_or_else(|| d.from_z.z_table.lookup(s))
            })
            .collect()
    }

    fn ccz_stage1(&self, mut b: SimBranch, flips: &[u64]) -> Result<Vec<SimBranch>> {
        let rec = self.decode_ccz_stage1(flips)?;
        b.frame = apply_recovery(&b.frame, &rec.frame);
        b.rows = rec.rows;
        if !b.frame.has_cz() {
            return Ok(vec![b]);
        }
        let terms = b.frame.expand_mod(&self.out_z_gauge);
        Ok(terms
            .into_iter()
            .map(|(pauli, c)| SimBranch {
                frame: DiagonalCliffordFrame::from_pauli(&pauli),
                weight: b.weight * c.norm_sqr(),
                meas: QubitMask::EMPTY,
                l1: b.l1.clone(),
                rows: b.rows.clone(),
            })
            .collect())
    }

    /// Z correction confined to the recorded rows, if the X-stabilizer
    /// flips single one out.
    fn stage2_rows(&self, rows: u64, s: u64, m: usize, n: usize) -> Option<QubitMask> {
        if rows == 0 {
            return None;
        }
        let mut r = 0u64;
        for h in 1..m {
            r |= ((r >> (h - 1) & 1) ^ (s >> (h - 1) & 1)) << h;
        }
        let full = (1u64 << m) - 1;
        let fits: Vec<u64> = [r, r ^ full].into_iter().filter(|c| c & !rows == 0).collect();
        match fits.as_slice() {
            [one] => Some(QubitMask::from_qubits((0..m).filter(|i| one >> i & 1 == 1).map(|i| i * n))),
            _ => None,
        }
    }

    /// Ideal decoding of every output block followed by the comparison
    /// with the ideally propagated LEC result.
    pub fn evaluate(&self, st: &SimState) -> Result<Outcome> {
        let mut fail = 0.0;
        let mut weight = 0.0;
        let table = self.out_decoders.table(self.tec.end_gauge());
        for b in &st.branches {
            weight += b.weight;
            let e = b
                .frame
                .as_pauli()
                .ok_or_else(|| Error::InvalidCircuit("non-Pauli frame after the TEC".into()))?;
            let l1 = b.l1.as_ref().ok_or_else(|| Error::InvalidCircuit("LEC never decoded".into()))?;
            let l2: Vec<(bool, bool)> = self.out_groups.iter().map(|g| ideal_decode(g, table, &e).1).collect();
            let ok = matches!(self.gate.propagate(l1), Some(expect) if expect == l2);
            if !ok {
                fail += b.weight;
            }
        }
        Ok(Outcome { fail, weight })
    }

    /// Run the remaining timesteps without further faults.
    pub fn finish(&self, mut st: SimState) -> Result<Outcome> {
        while st.next_step < self.circuit.depth() {
            self.step(&mut st, &[])?;
        }
        self.evaluate(&st)
    }

    /// True if a decoding step ran just before timestep `t`.
    pub fn is_decode_boundary(&self, t: usize) -> bool {
        t > 0 && (self.lec.meas_steps.contains(&(t - 1)) || self.tec.meas_steps.contains(&(t - 1)))
    }

    /// True if every fault sits inside the LEC.
    pub fn lec_only(&self, faults: &[&FaultEvent]) -> bool {
        faults.iter().all(|f| f.location.0 < self.ga_steps.start)
    }
}

/// Failure probability of the exREC given that exactly these faults occur.
pub fn run_fault_config(ex: &ExRec, faults: &[FaultEvent]) -> Result<Outcome> {
    let refs: Vec<&FaultEvent> = faults.iter().collect();
    for (i, f) in refs.iter().enumerate() {
        if refs[..i].iter().any(|g| g.location == f.location) {
            return Err(Error::InvalidParameter(format!("two faults at {:?}", f.location)));
        }
    }
    if ex.lec_only(&refs) {
        return Ok(Outcome { fail: 0.0, weight: 1.0 });
    }
    let mut st = ex.initial_state();
    while st.next_step < ex.circuit.depth() {
        let t = st.next_step;
        let here: Vec<&FaultEvent> = refs.iter().copied().filter(|f| f.location.0 == t).collect();
        ex.step(&mut st, &here)?;
    }
    ex.evaluate(&st)
}
