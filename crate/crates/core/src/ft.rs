//! Static fault-tolerance checks for C^kZ-form circuits.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::{Circuit, GateKind};
use crate::code::CodeSpec;
use crate::error::{Error, Result};

/// Gate position: `(timestep, index within timestep)`.
pub type GateId = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LightconeReport {
    pub gate: GateId,
    /// Qubits in the modified lightcone, excluding the gate support unless
    /// a later gate touches it.
    pub lightcone: BTreeSet<usize>,
    /// Rows (per block) met by the gate support or its modified lightcone.
    pub rows_touched: Vec<BTreeSet<usize>>,
    pub violates_two_row: bool,
}

fn block_of(c: &Circuit, q: usize) -> Option<usize> {
    c.blocks.iter().position(|b| b.range().contains(&q))
}

/// Fails unless every gate is a controlled-Z touching each block at most once.
pub fn check_ckz_form(c: &Circuit) -> Result<()> {
    for (t, step) in c.timesteps.iter().enumerate() {
        for g in step {
            if !matches!(g.kind, GateKind::CZ | GateKind::CCZ | GateKind::CkZ) {
                return Err(Error::InvalidCircuit(format!("{} in step {t} is not a controlled Z", g.kind)));
            }
            let mut seen = BTreeSet::new();
            for &q in &g.qubits {
                let b = block_of(c, q).ok_or_else(|| Error::InvalidCircuit(format!("qubit {q} outside blocks")))?;
                if !seen.insert(b) {
                    return Err(Error::InvalidCircuit(format!("gate in step {t} touches block {b} twice")));
                }
            }
        }
    }
    Ok(())
}

/// Union over later timesteps of the single-step neighbourhoods of the
/// gate support.
pub fn modified_lightcone(c: &Circuit, n_cols: usize, gate: GateId) -> Result<LightconeReport> {
    check_ckz_form(c)?;
    let g = c
        .timesteps
        .get(gate.0)
        .and_then(|s| s.get(gate.1))
        .ok_or_else(|| Error::InvalidParameter(format!("no gate at {gate:?}")))?;
    let support: BTreeSet<usize> = g.qubits.iter().copied().collect();
    let mut cone = BTreeSet::new();
    for step in &c.timesteps[gate.0 + 1..] {
        for h in step {
            if h.qubits.iter().any(|q| support.contains(q)) {
                cone.extend(h.qubits.iter().copied());
            }
        }
    }
    let mut rows_touched = vec![BTreeSet::new(); c.blocks.len()];
    for &q in support.iter().chain(&cone) {
        let b = block_of(c, q).expect("checked above");
        rows_touched[b].insert((q - c.blocks[b].start) / n_cols);
    }
    let violates_two_row = rows_touched.iter().any(|r| r.len() > 2);
    Ok(LightconeReport { gate, lightcone: cone, rows_touched, violates_two_row })
}

pub fn all_lightcones(c: &Circuit, n_cols: usize) -> Result<Vec<LightconeReport>> {
    let mut out = Vec::new();
    for (t, step) in c.timesteps.iter().enumerate() {
        for k in 0..step.len() {
            out.push(modified_lightcone(c, n_cols, (t, k))?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TwoRowVerdict {
    Pass,
    Violations(Vec<LightconeReport>),
}

impl TwoRowVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TwoRowVerdict::Pass)
    }
}

pub fn check_two_row_criterion(c: &Circuit, code: CodeSpec) -> Result<TwoRowVerdict> {
    let bad: Vec<_> = all_lightcones(c, code.n)?.into_iter().filter(|r| r.violates_two_row).collect();
    Ok(if bad.is_empty() { TwoRowVerdict::Pass } else { TwoRowVerdict::Violations(bad) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PieceStrategy {
    Plain,
    TwoTransversal,
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

pub fn piece_count(m: usize, n: usize, k: u32, strategy: PieceStrategy) -> usize {
    let base = match strategy {
        PieceStrategy::Plain => m,
        PieceStrategy::TwoTransversal => m.div_ceil(2),
    };
    ceil_div(base.pow(k), n)
}

/// Column counts `(necessary, sufficient)` for a single-piece CCZ with
/// SPR: `ceil(m^2 / 4)` and `ceil(m/2)^2`. They agree for even `m`.
pub fn single_piece_bounds(m: usize) -> (usize, usize) {
    (ceil_div(m * m, 4), m.div_ceil(2).pow(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RangeMetrics {
    pub r_x: usize,
    pub r_y: usize,
    pub depth: usize,
    pub bound_saturated: bool,
}

/// Largest column span (`r_x`) and row span (`r_y`) of any gate, with
/// blocks overlaid on the same `m x n` grid.
pub fn range_metrics(c: &Circuit, code: CodeSpec) -> RangeMetrics {
    let (mut r_x, mut r_y) = (0, 0);
    let mut non_clifford = false;
    for g in c.gates() {
        non_clifford |= matches!(g.kind, GateKind::CCZ | GateKind::CkZ);
        let coords: Vec<(usize, usize)> = g
            .qubits
            .iter()
            .filter_map(|&q| block_of(c, q).map(|b| q - c.blocks[b].start))
            .map(|l| (l / code.n, l % code.n))
            .collect();
        let span = |f: fn(&(usize, usize)) -> usize| {
            let it = coords.iter().map(f);
            it.clone().max().unwrap_or(0) - it.min().unwrap_or(0)
        };
        r_y = r_y.max(span(|c| c.0));
        r_x = r_x.max(span(|c| c.1));
    }
    RangeMetrics {
        r_x,
        r_y,
        depth: c.depth(),
        bound_saturated: non_clifford && (r_x + 1) * (r_y + 1) >= code.distance(),
    }
}
