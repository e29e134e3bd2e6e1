//! The m x n Bacon-Shor subsystem code.
//!
//! Qubit `(i, j)` of a block sits at `offset + i * n + j`. Column
//! stabilizers `Z~_j = Z_{*,j-1} Z_{*,j}` and row stabilizers
//! `X~_i = X_{i-1,*} X_{i,*}` are indexed from 1.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::{QubitMask, MAX_QUBITS};
use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::frame::DiagonalCliffordFrame;
use crate::pauli::{PauliString, StabilizerGroup};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Gauge {
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "X")]
    X,
    #[serde(rename = "unfixed")]
    Unfixed,
}

impl Gauge {
    pub fn flipped(self) -> Gauge {
        match self {
            Gauge::Z => Gauge::X,
            Gauge::X => Gauge::Z,
            Gauge::Unfixed => Gauge::Unfixed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct CodeSpec {
    pub m: usize,
    pub n: usize,
    pub gauge: Gauge,
}

impl CodeSpec {
    pub fn new(m: usize, n: usize, gauge: Gauge) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::DegenerateCode { m, n });
        }
        if m * n > MAX_QUBITS {
            return Err(Error::TooManyQubits(m * n));
        }
        Ok(CodeSpec { m, n, gauge })
    }

    pub fn n_qubits(&self) -> usize {
        self.m * self.n
    }

    pub fn distance(&self) -> usize {
        self.m.min(self.n)
    }

    #[inline]
    pub fn qubit(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn row_mask(&self, i: usize) -> QubitMask {
        QubitMask::from_qubits((0..self.n).map(|j| self.qubit(i, j)))
    }

    pub fn col_mask(&self, j: usize) -> QubitMask {
        QubitMask::from_qubits((0..self.m).map(|i| self.qubit(i, j)))
    }

    /// The transposed code, as produced by transversal H.
    pub fn transposed(&self) -> CodeSpec {
        CodeSpec { m: self.n, n: self.m, gauge: self.gauge.flipped() }
    }
}

/// A block at a qubit offset. A transposed block is the image of an
/// `n x m` block under transversal H: its coordinate `(i, j)` is physical
/// qubit `(j, i)` of the original layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Placed {
    pub spec: CodeSpec,
    pub offset: usize,
    pub transposed: bool,
}

impl Placed {
    pub fn new(spec: CodeSpec, offset: usize) -> Self {
        Placed { spec, offset, transposed: false }
    }

    /// The block as seen after transversal H.
    pub fn after_h(&self) -> Self {
        Placed { spec: self.spec.transposed(), offset: self.offset, transposed: !self.transposed }
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> usize {
        if self.transposed {
            self.offset + j * self.spec.m + i
        } else {
            self.offset + i * self.spec.n + j
        }
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.spec.n_qubits()
    }

    pub fn mask(&self) -> QubitMask {
        QubitMask::from_qubits(self.qubits())
    }

    pub fn row_mask(&self, i: usize) -> QubitMask {
        QubitMask::from_qubits((0..self.spec.n).map(|j| self.q(i, j)))
    }

    /// `(row, column)` of a physical qubit inside this block.
    pub fn coords(&self, q: usize) -> (usize, usize) {
        let l = q - self.offset;
        if self.transposed {
            (l % self.spec.m, l / self.spec.m)
        } else {
            (l / self.spec.n, l % self.spec.n)
        }
    }
}

/// Generators of one block placed at `offset` inside `total` qubits.
#[derive(Clone, Debug)]
pub struct OperatorGroups {
    pub spec: CodeSpec,
    pub block: Placed,
    pub offset: usize,
    pub total: usize,
    /// `Z~_j` for `j = 1..n`.
    pub z_stabs: Vec<PauliString>,
    /// `X~_i` for `i = 1..m`.
    pub x_stabs: Vec<PauliString>,
    /// `Z-bar_{i,j}` for `i` in `0..m`, `j` in `1..n`, row-major.
    pub z_gauge: Vec<PauliString>,
    /// `X-bar_{h,k}` for `h` in `1..m`, `k` in `0..n`, row-major.
    pub x_gauge: Vec<PauliString>,
    pub logical_z: PauliString,
    pub logical_x: PauliString,
}

pub fn build(m: usize, n: usize, gauge: Gauge) -> Result<(CodeSpec, OperatorGroups)> {
    let spec = CodeSpec::new(m, n, gauge)?;
    let groups = OperatorGroups::placed(spec, 0, spec.n_qubits())?;
    Ok((spec, groups))
}

impl OperatorGroups {
    pub fn placed(spec: CodeSpec, offset: usize, total: usize) -> Result<Self> {
        Self::for_block(Placed::new(spec, offset), total)
    }

    pub fn for_block(block: Placed, total: usize) -> Result<Self> {
        let (spec, offset) = (block.spec, block.offset);
        if offset + spec.n_qubits() > total {
            return Err(Error::QubitOutOfRange { qubit: offset + spec.n_qubits() - 1, n_qubits: total });
        }
        let (m, n) = (spec.m, spec.n);
        let q = |i: usize, j: usize| block.q(i, j);
        let zs = |qs: Vec<usize>| PauliString::z_on(total, qs);
        let xs = |qs: Vec<usize>| PauliString::x_on(total, qs);
        let z_stabs = (1..n)
            .map(|j| zs((0..m).flat_map(|i| [q(i, j - 1), q(i, j)]).collect()))
            .collect();
        let x_stabs = (1..m)
            .map(|i| xs((0..n).flat_map(|j| [q(i - 1, j), q(i, j)]).collect()))
            .collect();
        let z_gauge = (0..m)
            .flat_map(|i| (1..n).map(move |j| (i, j)))
            .map(|(i, j)| zs(vec![q(i, j - 1), q(i, j)]))
            .collect();
        let x_gauge = (1..m)
            .flat_map(|h| (0..n).map(move |k| (h, k)))
            .map(|(h, k)| xs(vec![q(h - 1, k), q(h, k)]))
            .collect();
        Ok(OperatorGroups {
            spec,
            block,
            offset,
            total,
            z_stabs,
            x_stabs,
            z_gauge,
            x_gauge,
            logical_z: zs((0..m).map(|i| q(i, 0)).collect()),
            logical_x: xs((0..n).map(|j| q(0, j)).collect()),
        })
    }

    pub fn stabilizers(&self) -> impl Iterator<Item = &PauliString> {
        self.z_stabs.iter().chain(&self.x_stabs)
    }

    pub fn block_mask(&self) -> QubitMask {
        self.block.mask()
    }

    /// Stabilizers plus the gauge generators fixed by `gauge`.
    pub fn fixed_group(&self, gauge: Gauge) -> StabilizerGroup {
        let mut g = StabilizerGroup::new(self.total);
        let extra: &[PauliString] = match gauge {
            Gauge::Z => &self.z_gauge,
            Gauge::X => &self.x_gauge,
            Gauge::Unfixed => &[],
        };
        for p in self.stabilizers().chain(extra) {
            g.add(p).expect("commuting generators");
        }
        g
    }

    /// Z-gauge generator index of `Z-bar_{i,j}`.
    pub fn z_gauge_index(&self, i: usize, j: usize) -> usize {
        i * (self.spec.n - 1) + (j - 1)
    }

    /// X-gauge generator index of `X-bar_{h,k}`.
    pub fn x_gauge_index(&self, h: usize, k: usize) -> usize {
        (h - 1) * self.spec.n + k
    }
}

/// Commutation flags packed into a bitmask, one bit per generator.
fn flags(e: &PauliString, gens: &[PauliString]) -> u64 {
    assert!(gens.len() <= 64, "more than 64 generators");
    gens.iter()
        .enumerate()
        .filter(|(_, g)| !g.commutes_unchecked(e))
        .fold(0, |acc, (k, _)| acc | 1 << k)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Syndrome {
    /// Bit `j - 1` flags `Z~_j`.
    pub z_stab_bits: u64,
    /// Bit `i - 1` flags `X~_i`.
    pub x_stab_bits: u64,
    /// Flags against the Z-bar (from Z gauge) or X-bar (from X gauge)
    /// generators, only for type-1 rounds.
    pub gauge_bits: Option<u64>,
}

impl std::ops::BitXor for Syndrome {
    type Output = Syndrome;
    fn bitxor(self, o: Syndrome) -> Syndrome {
        Syndrome {
            z_stab_bits: self.z_stab_bits ^ o.z_stab_bits,
            x_stab_bits: self.x_stab_bits ^ o.x_stab_bits,
            gauge_bits: match (self.gauge_bits, o.gauge_bits) {
                (Some(a), Some(b)) => Some(a ^ b),
                (a, b) => a.or(b),
            },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RoundType {
    Type1,
    Type2,
}

pub fn syndrome_of(
    groups: &OperatorGroups,
    e: &PauliString,
    round: RoundType,
    starting_gauge: Gauge,
) -> Syndrome {
    let gauge_bits = match (round, starting_gauge) {
        (RoundType::Type1, Gauge::Z) => Some(flags(e, &groups.z_gauge)),
        (RoundType::Type1, Gauge::X) => Some(flags(e, &groups.x_gauge)),
        _ => None,
    };
    Syndrome {
        z_stab_bits: flags(e, &groups.z_stabs),
        x_stab_bits: flags(e, &groups.x_stabs),
        gauge_bits,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum ErrorClass {
    IdentityCoset,
    GaugeOnly,
    LogicalX,
    LogicalZ,
    LogicalY,
    Detectable,
}

impl ErrorClass {
    pub fn is_logical(self) -> bool {
        matches!(self, ErrorClass::LogicalX | ErrorClass::LogicalY | ErrorClass::LogicalZ)
    }
}

/// Logical action of an undetectable error as `(x, z)` flags.
pub fn logical_flags(groups: &OperatorGroups, e: &PauliString) -> (bool, bool) {
    let x = !e.commutes_unchecked(&groups.logical_z);
    let z = !e.commutes_unchecked(&groups.logical_x);
    (x, z)
}

pub fn classify(groups: &OperatorGroups, e: &PauliString) -> ErrorClass {
    if groups.stabilizers().any(|s| !s.commutes_unchecked(e)) {
        return ErrorClass::Detectable;
    }
    match logical_flags(groups, e) {
        (true, true) => ErrorClass::LogicalY,
        (true, false) => ErrorClass::LogicalX,
        (false, true) => ErrorClass::LogicalZ,
        (false, false) => {
            let in_stab = groups
                .z_gauge
                .iter()
                .chain(&groups.x_gauge)
                .all(|g| g.commutes_unchecked(e));
            if in_stab {
                ErrorClass::IdentityCoset
            } else {
                ErrorClass::GaugeOnly
            }
        }
    }
}

/// Eigenvalue of a diagonal frame on the row-constant basis state given by
/// `row_bits`, one entry per row of each listed block.
pub fn codespace_phase_eval(
    d: &DiagonalCliffordFrame,
    blocks: &[OperatorGroups],
    row_bits: &[bool],
) -> Result<Complex64> {
    if !d.x.is_empty() {
        return Err(Error::NotDiagonal);
    }
    let rows: usize = blocks.iter().map(|b| b.spec.m).sum();
    if rows != row_bits.len() {
        return Err(Error::InvalidParameter(format!(
            "{} row bits for {rows} rows",
            row_bits.len()
        )));
    }
    let mut x = QubitMask::EMPTY;
    let mut k = 0;
    for b in blocks {
        for i in 0..b.spec.m {
            if row_bits[k] {
                x = x ^ b.block.row_mask(i);
            }
            k += 1;
        }
    }
    let sign = if d.diagonal_sign(&x) { -1.0 } else { 1.0 };
    Ok(d.phase.to_complex() * sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        let (_, g) = build(3, 3, Gauge::Z).unwrap();
        assert_eq!(g.stabilizers().count(), 4);
        assert_eq!(g.z_gauge.len(), 6);
        assert_eq!(g.x_gauge.len(), 6);
        let (_, g) = build(3, 9, Gauge::Z).unwrap();
        assert_eq!(g.stabilizers().count(), 10);
        assert!(build(1, 3, Gauge::Z).is_err());
    }

    #[test]
    fn smallest_code() {
        let (_, g) = build(2, 2, Gauge::Z).unwrap();
        assert_eq!(g.z_stabs, vec![PauliString::parse("ZZZZ").unwrap()]);
        assert_eq!(g.x_stabs, vec![PauliString::parse("XXXX").unwrap()]);
        assert_eq!(g.logical_z.weight(), 2);
        assert_eq!(g.logical_x.weight(), 2);
    }

    #[test]
    fn classification_examples() {
        let (s, g) = build(3, 3, Gauge::Z).unwrap();
        assert_eq!(classify(&g, &g.z_gauge[0]), ErrorClass::GaugeOnly);
        assert_eq!(classify(&g, &g.logical_z), ErrorClass::LogicalZ);
        let zz = PauliString::z_on(9, [s.qubit(0, 0), s.qubit(1, 0)]);
        assert_eq!(classify(&g, &zz), ErrorClass::Detectable);
        assert_eq!(classify(&g, &g.x_stabs[0]), ErrorClass::IdentityCoset);
    }
}

/// Grow or shrink a block by one side. Rows are added by joining a
/// `|+_Z>` block below and running a full-size Steane round that starts
/// with the Z gauge. Columns are added the same way after transversal H,
/// so the circuit indexes qubits column-major (`j * m + i`) in that case.
/// Columns are removed by X measurement and rows by Z measurement.
pub fn extension_circuit(from: CodeSpec, to: CodeSpec) -> Result<Circuit> {
    use crate::circuit::gate;
    use crate::gadgets::{push_steane_part, steane_ancilla_steps, type1_parts};

    let (nf, nt) = (from.n_qubits(), to.n_qubits());
    let grow = |transposed: bool, ext: CodeSpec, start: Gauge| {
        let mut c = Circuit::with_blocks(&[("data", nf), ("ext", nt - nf), ("anc", nt)]);
        let ext = Placed { spec: ext, offset: nf, transposed };
        let part = type1_parts(start)[0];
        for step in steane_ancilla_steps(ext, part) {
            c.push_step(step);
        }
        let joined = Placed { spec: to, offset: 0, transposed };
        let anc = Placed { spec: to, offset: nt, transposed };
        for part in type1_parts(start) {
            push_steane_part(&mut c, &[(joined, anc)], part, "join");
        }
        c
    };
    let shrink = |kind: GateKind, qubits: Vec<usize>| {
        let mut c = Circuit::with_blocks(&[("data", nf)]);
        c.push_step(qubits.into_iter().map(|q| gate(kind, &[q]).tagged(format!("drop.{q}"))).collect());
        c
    };
    let (m, n) = (from.m, from.n);
    Ok(match (to.m.cmp(&m), to.n.cmp(&n)) {
        (Ordering::Equal, Ordering::Equal) => Circuit::with_blocks(&[("data", nf)]),
        (Ordering::Greater, Ordering::Equal) => grow(false, CodeSpec { m: to.m - m, ..to }, Gauge::Z),
        (Ordering::Equal, Ordering::Greater) => grow(true, CodeSpec { n: to.n - n, ..to }, Gauge::X),
        (Ordering::Less, Ordering::Equal) => shrink(GateKind::MeasZ, (to.m * n..nf).collect()),
        (Ordering::Equal, Ordering::Less) => {
            shrink(GateKind::MeasX, (0..m).flat_map(|i| (to.n..n).map(move |j| i * n + j)).collect())
        }
        _ => {
            return Err(Error::IncompatibleShapes(format!(
                "{}x{} -> {}x{} changes both dimensions",
                m, n, to.m, to.n
            )))
        }
    })
}
