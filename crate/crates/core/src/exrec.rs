//! Extended rectangles (LEC, Ga, TEC) and exact failure counting over at
//! most two faults.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::QubitMask;
use crate::circuit::{gate, Circuit, GateKind, GateSpec};
use crate::code::{CodeSpec, Gauge, OperatorGroups, Placed, RoundType};
use crate::decoder::{build_decoder_table, DecoderTable};
use crate::error::{Error, Result};
use crate::ft::modified_lightcone;
use crate::gadgets::{ccz_3x3, push_steane_part, type1_parts, SteanePart};
use crate::noise::{insert_idles, IdlePolicy, RateClass};
use crate::pauli::StabilizerGroup;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum GateLabel {
    I,
    H,
    CNOT,
    CCZ,
}

impl std::str::FromStr for GateLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" => Ok(GateLabel::I),
            "H" => Ok(GateLabel::H),
            "CNOT" => Ok(GateLabel::CNOT),
            "CCZ" => Ok(GateLabel::CCZ),
            _ => Err(Error::Parse(format!("unknown gate {s:?}"))),
        }
    }
}

impl GateLabel {
    pub fn n_blocks(self) -> usize {
        match self {
            GateLabel::I | GateLabel::H => 1,
            GateLabel::CNOT => 2,
            GateLabel::CCZ => 3,
        }
    }

    /// The component class whose rate the encoded gate is compared with.
    pub fn rate_class(self) -> RateClass {
        match self {
            GateLabel::I | GateLabel::H => RateClass::OneQubit,
            GateLabel::CNOT => RateClass::Cnot,
            GateLabel::CCZ => RateClass::Ccz,
        }
    }

    /// Ideal action on per-block logical `(x, z)` flags, or `None` when the
    /// image is not a Pauli.
    pub fn propagate(self, flags: &[(bool, bool)]) -> Option<Vec<(bool, bool)>> {
        match self {
            GateLabel::I => Some(flags.to_vec()),
            GateLabel::H => Some(flags.iter().map(|&(x, z)| (z, x)).collect()),
            GateLabel::CNOT => {
                let (c, t) = (flags[0], flags[1]);
                Some(vec![(c.0, c.1 ^ t.1), (t.0 ^ c.0, t.1)])
            }
            GateLabel::CCZ => flags.iter().all(|f| !f.0).then(|| flags.to_vec()),
        }
    }
}

/// How stage 1 of the CCZ TEC decoder records rows for stage 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RowRule {
    /// Rows met by the support and modified lightcone of every earlier
    /// candidate gate.
    Lightcone,
    /// Rows met by the residual frame of every alternative hypothesis,
    /// including an X that arrived before the gadget.
    Residual,
}

/// Tables for one code shape, decoding type-1 rounds from either gauge.
#[derive(Clone, Debug)]
pub struct BlockDecoders {
    pub spec: CodeSpec,
    /// Block-local generators.
    pub local: OperatorGroups,
    pub from_z: DecoderTable,
    pub from_x: DecoderTable,
}

impl BlockDecoders {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        let z = CodeSpec { gauge: Gauge::Z, ..spec };
        let x = CodeSpec { gauge: Gauge::X, ..spec };
        Ok(BlockDecoders {
            spec,
            local: OperatorGroups::placed(z, 0, spec.n_qubits())?,
            from_z: build_decoder_table(z, RoundType::Type1)?,
            from_x: build_decoder_table(x, RoundType::Type1)?,
        })
    }

    pub fn table(&self, start: Gauge) -> &DecoderTable {
        match start {
            Gauge::X => &self.from_x,
            _ => &self.from_z,
        }
    }
}

/// One type-1 Steane round on a set of blocks.
#[derive(Clone, Debug)]
pub struct RoundInfo {
    pub pairs: Vec<(Placed, Placed)>,
    pub start_gauge: Gauge,
    pub parts: [SteanePart; 2],
    /// Timestep of each part's measurement layer.
    pub meas_steps: [usize; 2],
    pub steps: Range<usize>,
}

impl RoundInfo {
    pub fn end_gauge(&self) -> Gauge {
        self.parts[1].resulting_gauge()
    }
}

/// A CCZ in the Ga segment with its recorded rows per block.
#[derive(Clone, Debug)]
pub struct GaGate {
    pub step: usize,
    pub gate: GateSpec,
    pub lightcone_rows: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct ExRec {
    pub gate: GateLabel,
    pub code: CodeSpec,
    /// Full circuit, idle locations included.
    pub circuit: Circuit,
    pub lec: RoundInfo,
    pub tec: RoundInfo,
    pub ga_steps: Range<usize>,
    pub in_blocks: Vec<Placed>,
    pub out_blocks: Vec<Placed>,
    pub in_decoders: BlockDecoders,
    pub out_decoders: BlockDecoders,
    pub ga_gates: Vec<GaGate>,
    /// Physically placed generators of the input and output blocks.
    pub in_groups: Vec<OperatorGroups>,
    pub out_groups: Vec<OperatorGroups>,
    /// Z-gauge generators of every output block.
    pub out_z_gauge: StabilizerGroup,
    pub row_rule: RowRule,
    pub idle: IdlePolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExRecOptions {
    pub idle: IdlePolicy,
    pub row_rule: RowRule,
}

impl Default for ExRecOptions {
    fn default() -> Self {
        ExRecOptions { idle: IdlePolicy::Ancilla, row_rule: RowRule::Residual }
    }
}

fn push_round(c: &mut Circuit, pairs: &[(Placed, Placed)], start: Gauge, label: &str) -> RoundInfo {
    let parts = type1_parts(start);
    let first = c.depth();
    let mut meas_steps = [0; 2];
    for (k, &part) in parts.iter().enumerate() {
        c.mark(&format!("{label}.part{k}"));
        push_steane_part(c, pairs, part, label);
        meas_steps[k] = c.depth() - 1;
    }
    RoundInfo { pairs: pairs.to_vec(), start_gauge: start, parts, meas_steps, steps: first..c.depth() }
}

/// Build the exREC for `gate` on `code` blocks. CCZ requires 3x3.
pub fn assemble(gate_label: GateLabel, code: CodeSpec, opts: ExRecOptions) -> Result<ExRec> {
    let code = CodeSpec { gauge: Gauge::Z, ..code };
    if gate_label == GateLabel::CCZ && (code.m, code.n) != (3, 3) {
        return Err(Error::IncompatibleShapes(format!(
            "the CCZ exREC is built for 3x3 blocks, got {}x{}",
            code.m, code.n
        )));
    }
    let nb = gate_label.n_blocks();
    let nq = code.n_qubits();
    let names: Vec<String> = (0..nb).map(|b| format!("D{b}")).chain((0..nb).map(|b| format!("A{b}"))).collect();
    let sizes: Vec<(&str, usize)> = names.iter().map(|s| (s.as_str(), nq)).collect();
    let mut c = Circuit::with_blocks(&sizes);
    let data: Vec<Placed> = (0..nb).map(|b| Placed::new(code, b * nq)).collect();
    let anc: Vec<Placed> = (0..nb).map(|b| Placed::new(code, (nb + b) * nq)).collect();
    let pairs: Vec<(Placed, Placed)> = data.iter().copied().zip(anc.iter().copied()).collect();

    let lec = push_round(&mut c, &pairs, Gauge::X, "lec");
    let ga_start = c.depth();
    c.mark("ga");
    let mut ga_gates = Vec::new();
    match gate_label {
        GateLabel::I => c.push_step(data[0].qubits().map(|q| gate(GateKind::I, &[q]).tagged("ga")).collect()),
        GateLabel::H => c.push_step(data[0].qubits().map(|q| gate(GateKind::H, &[q])).collect()),
        GateLabel::CNOT => c.push_step(
            data[0].qubits().zip(data[1].qubits()).map(|(a, b)| gate(GateKind::CNOT, &[a, b])).collect(),
        ),
        GateLabel::CCZ => {
            let g = ccz_3x3();
            for (t, step) in g.timesteps.iter().enumerate() {
                for (k, gs) in step.iter().enumerate() {
                    let rep = modified_lightcone(&g, code.n, (t, k))?;
                    let lightcone_rows = rep
                        .rows_touched
                        .iter()
                        .map(|rows| rows.iter().fold(0u64, |acc, r| acc | 1 << r))
                        .collect();
                    ga_gates.push(GaGate { step: ga_start + t, gate: gs.clone(), lightcone_rows });
                }
                c.push_step(step.clone());
            }
        }
    }
    let ga_steps = ga_start..c.depth();

    let (out_blocks, out_pairs, tec_start) = if gate_label == GateLabel::H {
        let ob: Vec<Placed> = data.iter().map(|d| d.after_h()).collect();
        let op = ob.iter().copied().zip(anc.iter().map(|a| a.after_h())).collect::<Vec<_>>();
        (ob, op, Gauge::X)
    } else {
        (data.clone(), pairs.clone(), Gauge::Z)
    };
    let tec = push_round(&mut c, &out_pairs, tec_start, "tec");
    let live = QubitMask::from_qubits(0..nb * nq);
    let circuit = insert_idles(&c, &live, opts.idle);
    circuit.validate()?;
    let total = circuit.n_qubits();
    let in_groups = data.iter().map(|&b| OperatorGroups::for_block(b, total)).collect::<Result<Vec<_>>>()?;
    let out_groups = out_blocks.iter().map(|&b| OperatorGroups::for_block(b, total)).collect::<Result<Vec<_>>>()?;
    let mut out_z_gauge = StabilizerGroup::new(total);
    for g in out_groups.iter().flat_map(|g| &g.z_gauge) {
        out_z_gauge.add(g)?;
    }
    Ok(ExRec {
        in_groups,
        out_groups,
        out_z_gauge,
        gate: gate_label,
        code,
        circuit,
        lec,
        tec,
        ga_steps,
        in_decoders: BlockDecoders::new(code)?,
        out_decoders: BlockDecoders::new(out_blocks[0].spec)?,
        in_blocks: data,
        out_blocks,
        ga_gates,
        row_rule: opts.row_rule,
        idle: opts.idle,
    })
}

impl ExRec {
    fn slice(&self, r: Range<usize>) -> Circuit {
        let mut c = Circuit::new(self.circuit.blocks.clone());
        c.timesteps = self.circuit.timesteps[r].to_vec();
        c
    }

    pub fn lec_circuit(&self) -> Circuit {
        self.slice(self.lec.steps.clone())
    }

    pub fn ga_circuit(&self) -> Circuit {
        self.slice(self.ga_steps.clone())
    }

    pub fn tec_circuit(&self) -> Circuit {
        self.slice(self.tec.steps.clone())
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }
}
