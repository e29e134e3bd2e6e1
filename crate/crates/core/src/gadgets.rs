//! Circuit builders for logical gates and error correction on Bacon-Shor
//! blocks, plus a phase-function check of their logical action.

use serde::Serialize;

use crate::circuit::{gate, Circuit, GateKind, GateSpec};
pub use crate::code::Placed;
use crate::code::{codespace_phase_eval, CodeSpec, Gauge, OperatorGroups};
use crate::error::{Error, Result};
use crate::frame::DiagonalCliffordFrame;
use crate::pauli::PauliString;

pub const BLOCK_NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

fn ckz_kind(arity: usize) -> GateKind {
    match arity {
        2 => GateKind::CZ,
        3 => GateKind::CCZ,
        _ => GateKind::CkZ,
    }
}

fn data_blocks(m: usize, n: usize, count: usize) -> (Circuit, Vec<Placed>) {
    // Builders accept any m, n >= 1; codes are only validated when checked.
    let spec = CodeSpec { m, n, gauge: Gauge::Z };
    let sizes: Vec<(&str, usize)> = BLOCK_NAMES[..count].iter().map(|&b| (b, m * n)).collect();
    let c = Circuit::with_blocks(&sizes);
    let placed = (0..count).map(|b| Placed::new(spec, b * m * n)).collect();
    (c, placed)
}

/// Digits of `p` in base `m`, least significant first.
fn digits(mut p: usize, m: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let d = p % m;
            p /= m;
            d
        })
        .collect()
}

/// Physical C^kZ on every (k+1)-tuple of column-0 qubits, one per block.
pub fn ckz_round_robin(m: usize, n: usize, k: usize) -> Result<Circuit> {
    if k == 0 || k + 1 > BLOCK_NAMES.len() {
        return Err(Error::InvalidParameter(format!("k = {k} out of range")));
    }
    let (mut c, blocks) = data_blocks(m, n, k + 1);
    let mut gates = Vec::new();
    // Each offset pattern is a perfect matching of the rows, so first-fit
    // packing reaches depth m^k.
    for p in 0..m.pow(k as u32) {
        let d = digits(p, m, k);
        for i in 0..m {
            let mut qs = vec![blocks[0].q(i, 0)];
            for (b, off) in d.iter().enumerate() {
                qs.push(blocks[b + 1].q((i + off) % m, 0));
            }
            gates.push(gate(ckz_kind(k + 1), &qs));
        }
    }
    c.push_first_fit(gates, 0);
    Ok(c)
}

/// Union of subcircuits `C_p`, each confined to column `p mod n`.
pub fn ckz_depth_reduced(m: usize, n: usize, k: usize) -> Result<Circuit> {
    if n < m {
        return Err(Error::IncompatibleShapes(format!("need n >= m, got {m}x{n}")));
    }
    if k == 0 || k + 1 > BLOCK_NAMES.len() {
        return Err(Error::InvalidParameter(format!("k = {k} out of range")));
    }
    let (mut c, blocks) = data_blocks(m, n, k + 1);
    let total = m.pow(k as u32);
    c.timesteps = vec![Vec::new(); total.div_ceil(n)];
    for p in 0..total {
        let d = digits(p, m, k);
        let j = p % n;
        for i in 0..m {
            let mut qs = vec![blocks[0].q(i, j)];
            // block b gets offset p_{k-b}
            for b in 1..=k {
                qs.push(blocks[b].q((i + d[k - b]) % m, j));
            }
            c.timesteps[p / n].push(gate(ckz_kind(k + 1), &qs));
        }
    }
    Ok(c)
}

/// Row offsets `(f, g)` of blocks A and C relative to B for the three-
/// timestep CCZ on 3x3 blocks.
pub fn ccz_3x3_offsets(t: usize, j: usize) -> (usize, usize) {
    let f = (j + t / 2) % 3;
    let g = (3 - j % 3 + t.div_ceil(2)) % 3;
    (f, g)
}

pub fn ccz_3x3() -> Circuit {
    let (mut c, b) = data_blocks(3, 3, 3);
    for t in 0..3 {
        let mut step = Vec::new();
        for j in 0..3 {
            let (f, g) = ccz_3x3_offsets(t, j);
            for i in 0..3 {
                step.push(gate(GateKind::CCZ, &[b[0].q((i + f) % 3, j), b[1].q(i, j), b[2].q((i + g) % 3, j)]));
            }
        }
        c.push_step(step);
    }
    c
}

/// Row sets `{2s, 2s+1}` (the last one a singleton when m is odd).
pub fn row_pairs(m: usize) -> Vec<Vec<usize>> {
    (0..m.div_ceil(2)).map(|s| (2 * s..(2 * s + 2).min(m)).collect()).collect()
}

/// CCZ in which every qubit meets at most two qubits of each other block.
/// Triples of row sets are spread over columns, `n` triples per piece.
pub fn two_transversal_ccz(m: usize, n: usize) -> Result<Circuit> {
    let sets = row_pairs(m);
    let s = sets.len();
    if n < s * s {
        return Err(Error::AsymmetryUnmet { n, required: s * s });
    }
    let (mut c, b) = data_blocks(m, n, 3);
    // Triple (a, a + d1, a + d0) for column index p = d0 + s d1.
    for p in 0..s * s {
        let (d0, d1) = (p % s, p / s);
        let j = p % n;
        for a in 0..s {
            let (sa, sb, sc) = (&sets[a], &sets[(a + d1) % s], &sets[(a + d0) % s]);
            // Latin ordering keeps each sub-step a matching on the 2x2x2 cube.
            let mut gates = Vec::new();
            for e in 0..4 {
                for x in 0..2 {
                    let (y, z) = (x ^ (e & 1), x ^ (e >> 1));
                    if x < sa.len() && y < sb.len() && z < sc.len() {
                        gates.push(gate(GateKind::CCZ, &[b[0].q(sa[x], j), b[1].q(sb[y], j), b[2].q(sc[z], j)]));
                    }
                }
            }
            c.push_first_fit(gates, 0);
        }
    }
    Ok(c)
}

/// Transversal two-block gate `kind` between blocks A and B (CNOT: A controls).
pub fn transversal_2q(spec: CodeSpec, kind: GateKind) -> Circuit {
    let (mut c, b) = data_blocks(spec.m, spec.n, 2);
    c.push_step(b[0].qubits().zip(b[1].qubits()).map(|(x, y)| gate(kind, &[x, y])).collect());
    c
}

/// Transversal H. The output block is the transpose: physical qubit
/// `(i, j)` of the input plays the role of `(j, i)` in an `n x m` code.
pub fn transversal_h(spec: CodeSpec) -> Circuit {
    let (mut c, b) = data_blocks(spec.m, spec.n, 1);
    c.push_step(b[0].qubits().map(|q| gate(GateKind::H, &[q])).collect());
    c
}

/// `perm[q]` is the index of physical qubit `q` in the transposed layout.
pub fn transpose_permutation(spec: CodeSpec) -> Vec<usize> {
    let mut perm = vec![0; spec.n_qubits()];
    for i in 0..spec.m {
        for j in 0..spec.n {
            perm[spec.qubit(i, j)] = j * spec.m + i;
        }
    }
    perm
}

/// Cat-state preparation on `qubits` in the computational basis
/// (`|0..0> + |1..1>`), as a CNOT chain from the first qubit.
pub fn cat_steps(qubits: &[usize]) -> Vec<Vec<GateSpec>> {
    let mut steps = vec![qubits
        .iter()
        .enumerate()
        .map(|(k, &q)| gate(if k == 0 { GateKind::PrepPlus } else { GateKind::Prep0 }, &[q]))
        .collect::<Vec<_>>()];
    for w in qubits.windows(2) {
        steps.push(vec![gate(GateKind::CNOT, &[w[0], w[1]])]);
    }
    steps
}

/// Cat preparation; the verified variant checks the parity of the first
/// and last qubits on an extra qubit and accepts on outcome 0.
pub fn cat_prep(size: usize, verified: bool) -> Result<Circuit> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("cat size {size} < 2")));
    }
    let mut c = if verified {
        Circuit::with_blocks(&[("cat", size), ("verify", 1)])
    } else {
        Circuit::with_blocks(&[("cat", size)])
    };
    let qs: Vec<usize> = (0..size).collect();
    for step in cat_steps(&qs) {
        c.push_asap(step, 0);
    }
    if verified {
        let v = size;
        c.push_asap([gate(GateKind::Prep0, &[v])], 0);
        c.push_asap([gate(GateKind::CNOT, &[0, v])], 0);
        c.push_asap([gate(GateKind::CNOT, &[size - 1, v])], 0);
        c.push_asap([gate(GateKind::MeasZ, &[v]).tagged("verify")], 0);
    }
    Ok(c)
}

/// The two halves of a Steane gauge-measurement round.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SteanePart {
    /// Measures X-type gauge operators with `|0_X>`: column cats in the X
    /// basis, CNOT ancilla to data, X measurement of the ancilla.
    A,
    /// Measures Z-type gauge operators with `|+_Z>`: row cats, CNOT data
    /// to ancilla, Z measurement of the ancilla.
    B,
}

impl SteanePart {
    /// Gauge the data block is left in.
    pub fn resulting_gauge(self) -> Gauge {
        match self {
            SteanePart::A => Gauge::X,
            SteanePart::B => Gauge::Z,
        }
    }
}

/// Parts in order for a type-1 round starting from `gauge`.
pub fn type1_parts(gauge: Gauge) -> [SteanePart; 2] {
    match gauge {
        Gauge::X => [SteanePart::A, SteanePart::B],
        _ => [SteanePart::B, SteanePart::A],
    }
}

/// Ancilla preparation steps for one part on one ancilla block.
pub(crate) fn steane_ancilla_steps(anc: Placed, part: SteanePart) -> Vec<Vec<GateSpec>> {
    let (m, n) = (anc.spec.m, anc.spec.n);
    let mut steps: Vec<Vec<GateSpec>> = Vec::new();
    match part {
        SteanePart::A => {
            // even-parity columns: prep_0 on row 0, |+> elsewhere, CNOT into row 0
            steps.push(
                (0..m)
                    .flat_map(|i| (0..n).map(move |k| (i, k)))
                    .map(|(i, k)| gate(if i == 0 { GateKind::Prep0 } else { GateKind::PrepPlus }, &[anc.q(i, k)]))
                    .collect(),
            );
            for i in 1..m {
                steps.push((0..n).map(|k| gate(GateKind::CNOT, &[anc.q(i, k), anc.q(0, k)])).collect());
            }
        }
        SteanePart::B => {
            let rows: Vec<Vec<Vec<GateSpec>>> = (0..m)
                .map(|i| cat_steps(&(0..n).map(|j| anc.q(i, j)).collect::<Vec<_>>()))
                .collect();
            for s in 0..rows[0].len() {
                steps.push(rows.iter().flat_map(|r| r[s].clone()).collect());
            }
        }
    }
    steps
}

/// Append one Steane part acting on every `(data, ancilla)` pair in
/// parallel. Measurement tags are `"{label}.{part}.{ancilla qubit}"`.
pub fn push_steane_part(c: &mut Circuit, pairs: &[(Placed, Placed)], part: SteanePart, label: &str) {
    let per_block: Vec<Vec<Vec<GateSpec>>> = pairs.iter().map(|&(_, a)| steane_ancilla_steps(a, part)).collect();
    for s in 0..per_block[0].len() {
        c.push_step(per_block.iter().flat_map(|b| b[s].clone()).collect());
    }
    let tag = match part {
        SteanePart::A => "a",
        SteanePart::B => "b",
    };
    let mut couple = Vec::new();
    let mut meas = Vec::new();
    for &(d, a) in pairs {
        for (qd, qa) in d.qubits().zip(a.qubits()) {
            couple.push(match part {
                SteanePart::A => gate(GateKind::CNOT, &[qa, qd]),
                SteanePart::B => gate(GateKind::CNOT, &[qd, qa]),
            });
            let kind = if part == SteanePart::A { GateKind::MeasX } else { GateKind::MeasZ };
            meas.push(gate(kind, &[qa]).tagged(format!("{label}.{tag}.{qa}")));
        }
    }
    c.push_step(couple);
    c.push_step(meas);
}

/// One Steane round on a single block with its own ancilla block. Order 1
/// flips the gauge of `code`, order 2 preserves it.
pub fn steane_ec(code: CodeSpec, order: u8) -> Result<Circuit> {
    let parts = match order {
        1 => type1_parts(code.gauge),
        2 => {
            let [x, y] = type1_parts(code.gauge);
            [y, x]
        }
        _ => return Err(Error::InvalidParameter(format!("round order {order}"))),
    };
    let nq = code.n_qubits();
    let mut c = Circuit::with_blocks(&[("data", nq), ("anc", nq)]);
    let pair = [(Placed::new(code, 0), Placed::new(code, nq))];
    for (k, part) in parts.into_iter().enumerate() {
        c.mark(&format!("part{k}"));
        push_steane_part(&mut c, &pair, part, "ec");
    }
    Ok(c)
}

/// H by one-bit teleportation onto a fresh `|+_Z>` block: logical CZ,
/// X measurement of the target, then a conditional logical X on the new
/// block. Measurement tags accumulate parity into named registers.
pub fn teleported_h(code: CodeSpec) -> Result<Circuit> {
    if code.n <= code.m {
        return Err(Error::IncompatibleShapes(format!(
            "teleported H needs n > m, got {}x{}",
            code.m, code.n
        )));
    }
    let cz = ckz_depth_reduced(code.m, code.n, 1)?;
    let nq = code.n_qubits();
    let mut c = Circuit::with_blocks(&[("A", nq), ("B", nq)]);
    let b = Placed::new(code, nq);
    for step in steane_ancilla_steps(b, SteanePart::B) {
        c.push_step(step);
    }
    c.mark("ga");
    c.append(&cz);
    let a = Placed::new(code, 0);
    c.push_step(
        (0..code.m)
            .flat_map(|i| (0..code.n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let tag = if i == 0 { "xbar".to_string() } else { format!("xg.{}", a.q(i, j)) };
                gate(GateKind::MeasX, &[a.q(i, j)]).tagged(tag)
            })
            .collect(),
    );
    c.push_step((0..code.n).map(|j| gate(GateKind::X, &[b.q(0, j)]).tagged("if:xbar")).collect());
    Ok(c)
}

/// Logical CZ between two blocks as qubit pairs: round robin on column 0.
fn logical_cz_pairs(code: CodeSpec, x: Placed, y: Placed) -> Vec<(usize, usize)> {
    let m = code.m;
    (0..m).flat_map(|off| (0..m).map(move |i| (x.q(i, 0), y.q((i + off) % m, 0)))).collect()
}

/// Steane round on every `(data, ancilla)` pair, starting from the Z gauge.
fn push_round(c: &mut Circuit, pairs: &[(Placed, Placed)], label: &str) {
    for part in type1_parts(Gauge::Z) {
        push_steane_part(c, pairs, part, label);
    }
}

/// Encoded CCZ state preparation and its injection on `m x n` blocks with
/// odd `m <= n`.
///
/// Preparation: `|+>|+>|0>` from Steane ancilla states, then `S_3 =
/// X_3 CZ_12` measured twice with a checked cat of block size whose qubits
/// control `X` on every qubit of block 2 and the `m^2` CZ gates of logical
/// CZ. A Steane round separates the two measurements. Registers `s3.0`
/// and `s3.1` hold the parities; the state is kept when they agree, and
/// logical `Z` on block 2 fires on `s3.1`.
///
/// Injection: CNOT from each state block onto its data block, Z
/// measurement of the data (register `inj.b` holds the column-0 parity),
/// then `X_b CZ_{b+1,b+2}` conditioned on `inj.b`, and a final Steane round
/// on the output blocks.
pub fn magic_ccz(code: CodeSpec) -> Result<(Circuit, Circuit)> {
    let (m, n) = (code.m, code.n);
    if m % 2 == 0 || m > n {
        return Err(Error::IncompatibleShapes(format!("magic CCZ needs odd m <= n, got {m}x{n}")));
    }
    let code = CodeSpec { gauge: Gauge::Z, ..code };
    let nq = code.n_qubits();
    let at = |k: usize| Placed::new(code, k * nq);

    let mut prep = Circuit::with_blocks(&[("M0", nq), ("M1", nq), ("M2", nq), ("A0", nq), ("A1", nq), ("A2", nq), ("V", 1)]);
    let states = [SteanePart::B, SteanePart::B, SteanePart::A];
    let per_block: Vec<_> = states.iter().enumerate().map(|(k, &p)| steane_ancilla_steps(at(k), p)).collect();
    for s in 0..per_block.iter().map(|b| b.len()).max().unwrap_or(0) {
        prep.push_step(per_block.iter().filter_map(|b| b.get(s)).flatten().cloned().collect());
    }
    let cat: Vec<usize> = at(3).qubits().collect();
    let v = 6 * nq;
    let cz = logical_cz_pairs(code, at(0), at(1));
    let pairs: Vec<(Placed, Placed)> = (0..3).map(|k| (at(k), at(k + 3))).collect();
    for r in 0..2 {
        if r == 1 {
            push_round(&mut prep, &pairs, "mid");
        }
        for step in cat_steps(&cat) {
            prep.push_step(step);
        }
        prep.push_step(vec![gate(GateKind::Prep0, &[v])]);
        prep.push_step(vec![gate(GateKind::CNOT, &[cat[0], v])]);
        prep.push_step(vec![gate(GateKind::CNOT, &[cat[nq - 1], v])]);
        prep.push_step(vec![gate(GateKind::MeasZ, &[v]).tagged(format!("catcheck.{r}"))]);
        prep.push_step(at(2).qubits().zip(&cat).map(|(q, &c)| gate(GateKind::CNOT, &[c, q])).collect());
        let start = prep.depth();
        prep.push_first_fit(cz.iter().zip(&cat).map(|(&(x, y), &c)| gate(GateKind::CCZ, &[c, x, y])), start);
        prep.push_step(cat.iter().map(|&q| gate(GateKind::MeasX, &[q]).tagged(format!("s3.{r}"))).collect());
    }
    prep.push_step((0..m).map(|i| gate(GateKind::Z, &[at(2).q(i, 0)]).tagged("if:s3.1")).collect());

    let names = ["D0", "D1", "D2", "M0", "M1", "M2", "A0", "A1", "A2"];
    let mut inject = Circuit::with_blocks(&names.map(|b| (b, nq)));
    let data = |k: usize| at(k);
    let magic = |k: usize| at(k + 3);
    inject.push_step(
        (0..3).flat_map(|k| magic(k).qubits().zip(data(k).qubits())).map(|(a, b)| gate(GateKind::CNOT, &[a, b])).collect(),
    );
    inject.push_step(
        (0..3)
            .flat_map(|k| {
                let d = data(k);
                d.qubits().map(move |q| {
                    let tag = if d.coords(q).1 == 0 { format!("inj.{k}") } else { format!("inj.{k}.{q}") };
                    gate(GateKind::MeasZ, &[q]).tagged(tag)
                })
            })
            .collect(),
    );
    for k in 0..3 {
        let cond = format!("if:inj.{k}");
        inject.push_step((0..n).map(|j| gate(GateKind::X, &[magic(k).q(0, j)]).tagged(cond.clone())).collect());
        let start = inject.depth();
        let gates = logical_cz_pairs(code, magic((k + 1) % 3), magic((k + 2) % 3))
            .into_iter()
            .map(|(x, y)| gate(GateKind::CZ, &[x, y]).tagged(cond.clone()));
        inject.push_first_fit(gates, start);
    }
    let out: Vec<(Placed, Placed)> = (0..3).map(|k| (magic(k), at(k + 6))).collect();
    push_round(&mut inject, &out, "out");
    Ok((prep, inject))
}

/// Logical gates checked by [`verify_logical_action`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum LogicalGate {
    Identity,
    /// Controlled-Z across all blocks of the circuit (CZ, CCZ, ...).
    MultiControlledZ,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LogicalActionReport {
    pub passed: bool,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

fn row_assignments(total_rows: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << total_rows).map(move |a| (0..total_rows).map(|r| (a >> r) & 1 == 1).collect())
}

/// Conjugate every bare logical X and X stabilizer of each block through
/// the circuit and compare the induced diagonal phases with the expected
/// logical gate on all row-constant basis states. Z-type generators must
/// be left unchanged.
pub fn verify_logical_action(circuit: &Circuit, code: CodeSpec, expected: LogicalGate) -> Result<LogicalActionReport> {
    let total = circuit.n_qubits();
    let groups: Vec<OperatorGroups> = circuit
        .blocks
        .iter()
        .map(|b| {
            if b.len != code.n_qubits() {
                return Err(Error::IncompatibleShapes(format!("block {} has {} qubits", b.name, b.len)));
            }
            OperatorGroups::placed(CodeSpec { gauge: Gauge::Z, ..code }, b.start, total)
        })
        .collect::<Result<_>>()?;
    let rows = groups.len() * code.m;
    if rows > 20 {
        return Err(Error::InvalidParameter(format!("{rows} rows is too many to enumerate")));
    }
    let conj = |p: &PauliString| -> Result<DiagonalCliffordFrame> {
        let mut f = DiagonalCliffordFrame::from_pauli(p);
        for g in circuit.gates() {
            f.conjugate_in_place(g)?;
        }
        Ok(f)
    };
    let mut report = LogicalActionReport::default();
    let logical_bits = |r: &[bool]| -> Vec<bool> {
        (0..groups.len()).map(|b| r[b * code.m..(b + 1) * code.m].iter().filter(|&&x| x).count() % 2 == 1).collect()
    };
    for (b, g) in groups.iter().enumerate() {
        let mut ops: Vec<(String, PauliString, bool)> = vec![(format!("logical X of block {b}"), g.logical_x, true)];
        for (i, s) in g.x_stabs.iter().enumerate() {
            ops.push((format!("X stabilizer {} of block {b}", i + 1), *s, false));
        }
        for (name, p, is_logical) in ops {
            report.checked += 1;
            let f = conj(&p)?;
            if f.x != p.x {
                report.mismatches.push(format!("{name}: X part changed"));
                continue;
            }
            let d = DiagonalCliffordFrame::from_pauli(&p).inverse().mul_unchecked(&f);
            for r in row_assignments(rows) {
                let got = codespace_phase_eval(&d, &groups, &r)?;
                let want = match (expected, is_logical) {
                    (LogicalGate::MultiControlledZ, true) => {
                        let z = logical_bits(&r);
                        let odd = z.iter().enumerate().all(|(c, &v)| c == b || v);
                        if odd { -1.0 } else { 1.0 }
                    }
                    _ => 1.0,
                };
                if (got.re - want).abs() > 1e-12 || got.im.abs() > 1e-12 {
                    report.mismatches.push(format!("{name}: phase {got} on rows {r:?}, expected {want}"));
                    break;
                }
            }
        }
        for (name, p) in g.z_stabs.iter().map(|s| ("Z stabilizer", s)).chain(g.z_gauge.iter().map(|s| ("Z gauge", s))).chain([("logical Z", &g.logical_z)]) {
            report.checked += 1;
            let f = conj(p)?;
            if f.as_pauli() != Some(*p) {
                report.mismatches.push(format!("{name} of block {b} not preserved"));
            }
        }
    }
    report.passed = report.mismatches.is_empty();
    Ok(report)
}

/// Copy of `c` with the gate at flat index `idx` removed.
pub fn delete_gate(c: &Circuit, idx: usize) -> Circuit {
    let mut out = c.clone();
    let mut k = 0;
    for step in out.timesteps.iter_mut() {
        if idx < k + step.len() {
            step.remove(idx - k);
            break;
        }
        k += step.len();
    }
    out
}
