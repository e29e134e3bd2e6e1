//! Circuit-level depolarizing noise and fault enumeration.

use serde::{Deserialize, Serialize};

use crate::bits::QubitMask;
use crate::circuit::{gate, Circuit, GateKind, GateSpec};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Rate classes a location can belong to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum RateClass {
    Ccz,
    Cnot,
    OneQubit,
    Prep,
    Meas,
}

impl RateClass {
    pub const ALL: [RateClass; 5] = [RateClass::Ccz, RateClass::Cnot, RateClass::OneQubit, RateClass::Prep, RateClass::Meas];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of(kind: GateKind) -> Result<RateClass> {
        Ok(match kind {
            GateKind::CCZ => RateClass::Ccz,
            GateKind::CNOT | GateKind::CZ => RateClass::Cnot,
            GateKind::I | GateKind::X | GateKind::Z | GateKind::H => RateClass::OneQubit,
            GateKind::Prep0 | GateKind::PrepPlus => RateClass::Prep,
            GateKind::MeasX | GateKind::MeasZ => RateClass::Meas,
            GateKind::CkZ => return Err(Error::InvalidParameter("no noise rate for CkZ".into())),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_ccz: f64,
    pub p_cnot: f64,
    pub p_1q: f64,
    pub p_i: f64,
    pub p_m: f64,
}

/// How the rates scale with the CNOT rate `p`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ModelFamily {
    /// Every component errs with probability `p`.
    #[serde(rename = "uniform")]
    Uniform,
    /// A `q`-qubit component errs with probability `p / 10^(2-q)`.
    #[serde(rename = "scaled")]
    Scaled,
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ModelFamily::Uniform),
            "scaled" => Ok(ModelFamily::Scaled),
            _ => Err(Error::Parse(format!("unknown noise model {s:?}"))),
        }
    }
}

impl ModelFamily {
    pub fn at(self, p: f64) -> NoiseModel {
        match self {
            ModelFamily::Uniform => NoiseModel::uniform(p),
            ModelFamily::Scaled => NoiseModel::scaled(p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Uniform => "uniform",
            ModelFamily::Scaled => "scaled",
        }
    }
}

impl NoiseModel {
    pub fn new(p_ccz: f64, p_cnot: f64, p_1q: f64, p_i: f64, p_m: f64) -> Result<Self> {
        let m = NoiseModel { p_ccz, p_cnot, p_1q, p_i, p_m };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for r in self.rates() {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("rate {r} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        NoiseModel::uniform(0.0)
    }

    pub fn uniform(p: f64) -> Self {
        NoiseModel { p_ccz: p, p_cnot: p, p_1q: p, p_i: p, p_m: p }
    }

    pub fn scaled(p: f64) -> Self {
        NoiseModel { p_ccz: 10.0 * p, p_cnot: p, p_1q: p / 10.0, p_i: p / 10.0, p_m: p / 10.0 }
    }

    /// Rates indexed by [`RateClass::index`].
    pub fn rates(&self) -> [f64; 5] {
        [self.p_ccz, self.p_cnot, self.p_1q, self.p_i, self.p_m]
    }

    pub fn rate(&self, class: RateClass) -> f64 {
        self.rates()[class.index()]
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: NoiseModel = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}

/// One way a location can fail.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultEvent {
    /// `(timestep, index within timestep)`.
    pub location: (usize, usize),
    pub class: RateClass,
    /// Acts after the gate, or before it for measurements.
    pub error: PauliString,
    /// Probability of this event given that its location fails.
    pub relative_weight: f64,
    /// `relative_weight` times the location rate.
    pub probability_weight: f64,
}

impl FaultEvent {
    pub fn before_gate(&self) -> bool {
        self.class == RateClass::Meas
    }
}

/// The nontrivial Paulis a location can suffer, with relative weights.
pub fn location_errors(g: &GateSpec, n_qubits: usize) -> Result<Vec<(PauliString, f64)>> {
    let single = |x: bool, q: usize| {
        if x {
            PauliString::x_on(n_qubits, [q])
        } else {
            PauliString::z_on(n_qubits, [q])
        }
    };
    Ok(match g.kind {
        GateKind::Prep0 | GateKind::MeasZ => vec![(single(true, g.qubits[0]), 1.0)],
        GateKind::PrepPlus | GateKind::MeasX => vec![(single(false, g.qubits[0]), 1.0)],
        GateKind::CkZ => return Err(Error::InvalidParameter("no noise rate for CkZ".into())),
        _ => {
            let q = g.qubits.len();
            let count = (1usize << (2 * q)) - 1;
            let w = 1.0 / count as f64;
            (1..=count)
                .map(|code| {
                    let (mut x, mut z) = (QubitMask::EMPTY, QubitMask::EMPTY);
                    for (k, &qq) in g.qubits.iter().enumerate() {
                        if code >> (2 * k) & 1 == 1 {
                            x.set(qq, true);
                        }
                        if code >> (2 * k + 1) & 1 == 1 {
                            z.set(qq, true);
                        }
                    }
                    (PauliString::from_masks(n_qubits, x, z).hermitian(), w)
                })
                .collect()
        }
    })
}

/// One event per (location, nontrivial Pauli). Conditional gates are
/// treated as always present.
pub fn enumerate_faults(circuit: &Circuit, model: &NoiseModel) -> Result<Vec<FaultEvent>> {
    let n = circuit.n_qubits();
    let mut out = Vec::new();
    for (t, step) in circuit.timesteps.iter().enumerate() {
        for (k, g) in step.iter().enumerate() {
            let class = RateClass::of(g.kind)?;
            let p = model.rate(class);
            for (error, w) in location_errors(g, n)? {
                out.push(FaultEvent { location: (t, k), class, error, relative_weight: w, probability_weight: w * p });
            }
        }
    }
    Ok(out)
}

/// Which waiting qubits get identity-gate noise.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum IdlePolicy {
    /// No idle locations.
    None,
    /// Only qubits in `always_live` (the data) carry idle noise.
    Data,
    /// Only qubits outside `always_live`, between preparation and
    /// measurement, carry idle noise.
    Ancilla,
    /// Qubits in `always_live`, plus any qubit between its preparation
    /// and its measurement, idle whenever no gate touches them.
    Live,
}

/// Fill idle slots with `I` gates tagged `"idle"`.
pub fn insert_idles(circuit: &Circuit, always_live: &QubitMask, policy: IdlePolicy) -> Circuit {
    let mut out = circuit.clone();
    if policy == IdlePolicy::None {
        return out;
    }
    let n = circuit.n_qubits();
    let mut live: Vec<bool> = (0..n).map(|q| always_live.get(q) && policy != IdlePolicy::Ancilla).collect();
    for step in out.timesteps.iter_mut() {
        let mut busy = vec![false; n];
        for g in step.iter() {
            for &q in &g.qubits {
                busy[q] = true;
                if g.kind.is_prep() && policy != IdlePolicy::Data {
                    live[q] = true;
                }
            }
        }
        let mut idles = Vec::new();
        for q in 0..n {
            if live[q] && !busy[q] {
                idles.push(gate(GateKind::I, &[q]).tagged("idle"));
            }
        }
        for g in step.iter() {
            if g.kind.is_meas() && !always_live.get(g.qubits[0]) {
                live[g.qubits[0]] = false;
            }
        }
        step.extend(idles);
    }
    out
}
