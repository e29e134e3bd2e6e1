//! Located gates, timestep-ordered circuits and their JSON form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "prep_0")]
    Prep0,
    #[serde(rename = "prep_plus")]
    PrepPlus,
    #[serde(rename = "meas_X")]
    MeasX,
    #[serde(rename = "meas_Z")]
    MeasZ,
    /// Explicit idle location.
    I,
    X,
    Z,
    H,
    CNOT,
    CZ,
    CCZ,
    /// Multi-controlled Z on `k + 1` qubits, `k >= 3`.
    CkZ,
}

impl GateKind {
    /// Fixed arity, or `None` for `CkZ`.
    pub fn arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            Prep0 | PrepPlus | MeasX | MeasZ | I | X | Z | H => Some(1),
            CNOT | CZ => Some(2),
            CCZ => Some(3),
            CkZ => None,
        }
    }

    pub fn is_prep(self) -> bool {
        matches!(self, GateKind::Prep0 | GateKind::PrepPlus)
    }

    pub fn is_meas(self) -> bool {
        matches!(self, GateKind::MeasX | GateKind::MeasZ)
    }

    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            Prep0 => "prep_0",
            PrepPlus => "prep_plus",
            MeasX => "meas_X",
            MeasZ => "meas_Z",
            I => "I",
            X => "X",
            Z => "Z",
            H => "H",
            CNOT => "CNOT",
            CZ => "CZ",
            CCZ => "CCZ",
            CkZ => "CkZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        use GateKind::*;
        Ok(match s {
            "prep_0" => Prep0,
            "prep_plus" => PrepPlus,
            "meas_X" => MeasX,
            "meas_Z" => MeasZ,
            "I" => I,
            "X" => X,
            "Z" => Z,
            "H" => H,
            "CNOT" => CNOT,
            "CZ" => CZ,
            "CCZ" => CCZ,
            "CkZ" => CkZ,
            other => return Err(Error::Parse(format!("unknown gate kind {other:?}"))),
        })
    }
}

/// A located gate. For CNOT the qubits are `[control, target]`.
///
/// The tag of a measurement names the classical register it writes; a gate
/// tagged `if:<reg>` only fires when that register holds 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl GateSpec {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        let g = GateSpec { kind, qubits, tag: None };
        g.validate()?;
        Ok(g)
    }

    pub fn tagged(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok_arity = match self.kind.arity() {
            Some(a) => self.qubits.len() == a,
            None => self.qubits.len() >= 4,
        };
        if !ok_arity {
            return Err(Error::InvalidGate(format!(
                "{} on {} qubits",
                self.kind,
                self.qubits.len()
            )));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(Error::InvalidGate(format!("{} repeats qubit {q}", self.kind)));
            }
        }
        Ok(())
    }

    /// Register this gate is conditioned on, if any.
    pub fn condition(&self) -> Option<&str> {
        self.tag.as_deref().and_then(|t| t.strip_prefix("if:"))
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, GateKind::I | GateKind::Z | GateKind::CZ | GateKind::CCZ | GateKind::CkZ)
    }
}

pub fn gate(kind: GateKind, qubits: &[usize]) -> GateSpec {
    GateSpec::new(kind, qubits.to_vec()).expect("invalid gate")
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub blocks: Vec<Block>,
    pub timesteps: Vec<Vec<GateSpec>>,
    /// Named timestep indices, e.g. the start of the Ga segment.
    #[serde(default)]
    pub markers: BTreeMap<String, usize>,
    /// Timestep indices before which intermediate EC is inserted.
    #[serde(default)]
    pub piece_boundaries: Vec<usize>,
}

impl Circuit {
    pub fn new(blocks: Vec<Block>) -> Self {
        Circuit { blocks, ..Default::default() }
    }

    pub fn with_blocks(names_and_sizes: &[(&str, usize)]) -> Self {
        let mut start = 0;
        let blocks = names_and_sizes
            .iter()
            .map(|&(name, len)| {
                let b = Block { name: name.to_string(), start, len };
                start += len;
                b
            })
            .collect();
        Self::new(blocks)
    }

    pub fn n_qubits(&self) -> usize {
        self.blocks.iter().map(|b| b.start + b.len).max().unwrap_or(0)
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn depth(&self) -> usize {
        self.timesteps.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateSpec> {
        self.timesteps.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind == kind).count()
    }

    /// Append a new timestep holding `gates`.
    pub fn push_step(&mut self, gates: Vec<GateSpec>) {
        self.timesteps.push(gates);
    }

    /// Place each gate in the earliest timestep after the last one that
    /// touches any of its qubits.
    pub fn push_asap(&mut self, gates: impl IntoIterator<Item = GateSpec>, floor: usize) {
        for g in gates {
            let mut t = floor;
            for (s, step) in self.timesteps.iter().enumerate().skip(floor) {
                if step.iter().any(|h| h.qubits.iter().any(|q| g.qubits.contains(q))) {
                    t = s + 1;
                }
            }
            while self.timesteps.len() <= t {
                self.timesteps.push(Vec::new());
            }
            self.timesteps[t].push(g);
        }
    }

    /// Greedy first-fit packing: each gate goes into the first timestep at
    /// or after `floor` whose support is disjoint from it.
    pub fn push_first_fit(&mut self, gates: impl IntoIterator<Item = GateSpec>, floor: usize) {
        for g in gates {
            let mut t = floor;
            loop {
                if t == self.timesteps.len() {
                    self.timesteps.push(Vec::new());
                }
                let clash = self.timesteps[t]
                    .iter()
                    .any(|h| h.qubits.iter().any(|q| g.qubits.contains(q)));
                if !clash {
                    self.timesteps[t].push(g);
                    break;
                }
                t += 1;
            }
        }
    }

    /// Append all timesteps of `other`, whose blocks must be a prefix-
    /// compatible layout of this circuit's qubits.
    pub fn append(&mut self, other: &Circuit) {
        let base = self.timesteps.len();
        for (k, v) in &other.markers {
            self.markers.entry(k.clone()).or_insert(base + v);
        }
        self.piece_boundaries.extend(other.piece_boundaries.iter().map(|b| base + b));
        self.timesteps.extend(other.timesteps.iter().cloned());
    }

    pub fn mark(&mut self, name: &str) {
        self.markers.insert(name.to_string(), self.timesteps.len());
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        for (t, step) in self.timesteps.iter().enumerate() {
            let mut used = vec![false; n];
            for g in step {
                g.validate()?;
                for &q in &g.qubits {
                    if !self.blocks.iter().any(|b| b.range().contains(&q)) {
                        return Err(Error::InvalidCircuit(format!(
                            "qubit {q} in step {t} lies outside every block"
                        )));
                    }
                    if std::mem::replace(&mut used[q], true) {
                        return Err(Error::InvalidCircuit(format!(
                            "qubit {q} used twice in step {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_and_duplicates_rejected() {
        assert!(GateSpec::new(GateKind::CNOT, vec![0]).is_err());
        assert!(GateSpec::new(GateKind::CCZ, vec![0, 1, 1]).is_err());
        assert!(GateSpec::new(GateKind::CkZ, vec![0, 1, 2]).is_err());
        assert!(GateSpec::new(GateKind::CkZ, vec![0, 1, 2, 3]).is_ok());
    }

    #[test]
    fn first_fit_packs_disjoint_gates() {
        let mut c = Circuit::with_blocks(&[("A", 4)]);
        c.push_first_fit([gate(GateKind::CZ, &[0, 1]), gate(GateKind::CZ, &[2, 3]), gate(GateKind::CZ, &[1, 2])], 0);
        assert_eq!(c.depth(), 2);
        c.validate().unwrap();
    }

    #[test]
    fn json_roundtrip() {
        let mut c = Circuit::with_blocks(&[("A", 2), ("B", 2)]);
        c.push_step(vec![gate(GateKind::MeasX, &[0]).tagged("m0")]);
        c.push_step(vec![gate(GateKind::Z, &[3]).tagged("if:m0")]);
        c.mark("ga");
        let back = Circuit::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.timesteps[1][0].condition(), Some("m0"));
    }
}
