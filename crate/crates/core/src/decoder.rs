//! Minimum-weight lookup decoding with gauge fixing.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::QubitMask;
use crate::code::{logical_flags, syndrome_of, CodeSpec, Gauge, OperatorGroups, Placed, RoundType, Syndrome};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Largest block the exhaustive table builder accepts.
pub const MAX_TABLE_QUBITS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum PauliType {
    X,
    Z,
}

/// Single-type correction table keyed by the flips of a list of checks.
/// Qubits are block-local (`i * n + j`).
#[derive(Clone, Debug, Serialize)]
pub struct CssTable {
    pub kind: PauliType,
    pub n_checks: usize,
    pub entries: BTreeMap<u64, QubitMask>,
}

/// Lexicographic order on sorted qubit lists.
fn lex_less(a: &QubitMask, b: &QubitMask) -> bool {
    a.iter().lt(b.iter())
}

impl CssTable {
    pub fn build(kind: PauliType, n_qubits: usize, checks: &[PauliString]) -> CssTable {
        let mut entries: BTreeMap<u64, QubitMask> = BTreeMap::new();
        for bits in 0u64..1 << n_qubits {
            let mask = QubitMask::from_qubits((0..n_qubits).filter(|q| bits >> q & 1 == 1));
            let e = match kind {
                PauliType::X => PauliString::from_masks(n_qubits, mask, QubitMask::EMPTY),
                PauliType::Z => PauliString::from_masks(n_qubits, QubitMask::EMPTY, mask),
            };
            let key = checks
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.commutes_unchecked(&e))
                .fold(0u64, |acc, (k, _)| acc | 1 << k);
            let better = match entries.get(&key) {
                None => true,
                Some(old) => mask.count() < old.count() || (mask.count() == old.count() && lex_less(&mask, old)),
            };
            if better {
                entries.insert(key, mask);
            }
        }
        CssTable { kind, n_checks: checks.len(), entries }
    }

    /// Correction for `flips`; unreachable syndromes get the identity.
    pub fn lookup(&self, flips: u64) -> QubitMask {
        self.entries.get(&flips).copied().unwrap_or(QubitMask::EMPTY)
    }
}

/// Local correction masks for one block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub x: QubitMask,
    pub z: QubitMask,
}

/// Map a block-local mask to physical qubits.
pub fn to_physical(block: &Placed, local: &QubitMask) -> QubitMask {
    let n = block.spec.n;
    QubitMask::from_qubits(local.iter().map(|l| block.q(l / n, l % n)))
}

/// Map physical qubits of `block` to a block-local mask.
pub fn to_local(block: &Placed, phys: &QubitMask) -> QubitMask {
    let n = block.spec.n;
    QubitMask::from_qubits(
        phys.and(&block.mask())
            .iter()
            .map(|q| {
                let (i, j) = block.coords(q);
                i * n + j
            }),
    )
}

/// Lookup decoder for one round type on one code.
#[derive(Clone, Debug, Serialize)]
pub struct DecoderTable {
    pub spec: CodeSpec,
    pub round: String,
    pub start_gauge: Gauge,
    /// Keyed by the Z-type flips available in the round.
    pub x_table: CssTable,
    /// Keyed by the X-type flips available in the round.
    pub z_table: CssTable,
}

pub fn build_decoder_table(code: CodeSpec, round: RoundType) -> Result<DecoderTable> {
    let nq = code.n_qubits();
    if nq > MAX_TABLE_QUBITS {
        return Err(Error::InvalidParameter(format!("{}x{} too large for table decoding", code.m, code.n)));
    }
    let g = OperatorGroups::placed(code, 0, nq)?;
    let (xc, zc): (&[PauliString], &[PauliString]) = match (round, code.gauge) {
        (RoundType::Type1, Gauge::Z) => (&g.z_gauge, &g.x_stabs),
        (RoundType::Type1, Gauge::X) => (&g.z_stabs, &g.x_gauge),
        _ => (&g.z_stabs, &g.x_stabs),
    };
    Ok(DecoderTable {
        spec: code,
        round: format!("{round:?}"),
        start_gauge: code.gauge,
        x_table: CssTable::build(PauliType::X, nq, xc),
        z_table: CssTable::build(PauliType::Z, nq, zc),
    })
}

impl DecoderTable {
    fn type1(&self) -> bool {
        self.round == "Type1"
    }

    /// Recovery for a syndrome in the layout produced by [`syndrome_of`].
    pub fn decode(&self, s: &Syndrome) -> Recovery {
        let g = s.gauge_bits.unwrap_or(0);
        let (xk, zk) = match (self.type1(), self.start_gauge) {
            (true, Gauge::Z) => (g, s.x_stab_bits),
            (true, Gauge::X) => (s.z_stab_bits, g),
            _ => (s.z_stab_bits, s.x_stab_bits),
        };
        Recovery { x: self.x_table.lookup(xk), z: self.z_table.lookup(zk) }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry {
            flips: u64,
            qubits: Vec<usize>,
        }
        #[derive(Serialize)]
        struct Export<'a> {
            m: usize,
            n: usize,
            round: &'a str,
            start_gauge: Gauge,
            x_recoveries: Vec<Entry>,
            z_recoveries: Vec<Entry>,
            gauge_fixing: &'a str,
        }
        let list = |t: &CssTable| {
            t.entries.iter().map(|(&flips, m)| Entry { flips, qubits: m.iter().collect() }).collect()
        };
        let ex = Export {
            m: self.spec.m,
            n: self.spec.n,
            round: &self.round,
            start_gauge: self.start_gauge,
            x_recoveries: list(&self.x_table),
            z_recoveries: list(&self.z_table),
            gauge_fixing: if self.type1() {
                match self.start_gauge {
                    Gauge::Z => "flip X-bar_{h,k} with Z on rows h.. of column k",
                    _ => "flip Z-bar_{i,j} with X on columns j.. of row i",
                }
            } else {
                "none"
            },
        };
        serde_json::to_string_pretty(&ex).expect("serializable")
    }
}

/// Local operator bringing a freshly measured gauge to all `+1`, given the
/// flips of its generators (in [`OperatorGroups`] order). Each generator
/// is flipped alone by a Z (resp. X) string running to the block edge.
pub fn gauge_fix(code: CodeSpec, measured: Gauge, flips: u64) -> PauliString {
    let (m, n) = (code.m, code.n);
    let mut x = QubitMask::EMPTY;
    let mut z = QubitMask::EMPTY;
    match measured {
        Gauge::X => {
            for h in 1..m {
                for k in 0..n {
                    if flips >> ((h - 1) * n + k) & 1 == 1 {
                        z = z ^ QubitMask::from_qubits((h..m).map(|i| code.qubit(i, k)));
                    }
                }
            }
        }
        Gauge::Z => {
            for i in 0..m {
                for j in 1..n {
                    if flips >> (i * (n - 1) + j - 1) & 1 == 1 {
                        x = x ^ QubitMask::from_qubits((j..n).map(|jj| code.qubit(i, jj)));
                    }
                }
            }
        }
        Gauge::Unfixed => {}
    }
    PauliString::from_masks(code.n_qubits(), x, z)
}

/// Noiseless type-1 round plus table decode on one block of `e`. Returns
/// the residual error and its logical `(x, z)` flags.
pub fn ideal_decode(
    groups: &OperatorGroups,
    table: &DecoderTable,
    e: &PauliString,
) -> (PauliString, (bool, bool)) {
    let s = syndrome_of(groups, e, RoundType::Type1, table.start_gauge);
    let r = table.decode(&s);
    let rec = PauliString::from_masks(e.n_qubits(), to_physical(&groups.block, &r.x), to_physical(&groups.block, &r.z));
    let res = rec.mul_unchecked(e);
    let flags = logical_flags(groups, &res);
    (res, flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_syndrome_is_identity() {
        for gauge in [Gauge::Z, Gauge::X] {
            let code = CodeSpec::new(3, 3, gauge).unwrap();
            for round in [RoundType::Type1, RoundType::Type2] {
                let t = build_decoder_table(code, round).unwrap();
                let s = syndrome_of(&OperatorGroups::placed(code, 0, 9).unwrap(), &PauliString::identity(9), round, gauge);
                assert_eq!(t.decode(&s), Recovery::default());
            }
        }
    }

    #[test]
    fn gauge_fix_flips_one_generator() {
        let code = CodeSpec::new(3, 4, Gauge::Z).unwrap();
        let g = OperatorGroups::placed(code, 0, 12).unwrap();
        for (k, _) in g.x_gauge.iter().enumerate() {
            let f = gauge_fix(code, Gauge::X, 1 << k);
            let flips: Vec<bool> = g.x_gauge.iter().map(|x| !x.commutes_unchecked(&f)).collect();
            assert!(flips.iter().enumerate().all(|(j, &b)| b == (j == k)));
        }
        for (k, _) in g.z_gauge.iter().enumerate() {
            let f = gauge_fix(code, Gauge::Z, 1 << k);
            let flips: Vec<bool> = g.z_gauge.iter().map(|x| !x.commutes_unchecked(&f)).collect();
            assert!(flips.iter().enumerate().all(|(j, &b)| b == (j == k)));
        }
    }
}
