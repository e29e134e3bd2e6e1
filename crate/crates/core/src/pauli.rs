//! Signed Pauli strings in symplectic form.
//!
//! A [`PauliString`] stores `i^phase * X^x * Z^z`, with the X factor to the
//! left of the Z factor on every qubit. With this convention `Y = i X Z`,
//! and the product rule only needs one overlap parity per multiplication.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{QubitMask, MAX_QUBITS};
use crate::error::{Error, Result};

/// Power of `i`, kept modulo 4.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn new(power: u32) -> Self {
        Phase((power & 3) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    n_qubits: usize,
    pub x: QubitMask,
    pub z: QubitMask,
    pub phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "too many qubits");
        PauliString { n_qubits, x: QubitMask::EMPTY, z: QubitMask::EMPTY, phase: Phase::ONE }
    }

    pub fn try_new(n_qubits: usize, x: QubitMask, z: QubitMask, phase: Phase) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits));
        }
        let range = QubitMask::low(n_qubits);
        if let Some(q) = x.or(&z).and_not(&range).iter().next() {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
        Ok(PauliString { n_qubits, x, z, phase })
    }

    /// Unsigned Pauli from masks, panicking on out-of-range qubits.
    pub fn from_masks(n_qubits: usize, x: QubitMask, z: QubitMask) -> Self {
        Self::try_new(n_qubits, x, z, Phase::ONE).expect("masks out of range")
    }

    pub fn x_on<I: IntoIterator<Item = usize>>(n_qubits: usize, qubits: I) -> Self {
        Self::from_masks(n_qubits, QubitMask::from_qubits(qubits), QubitMask::EMPTY)
    }

    pub fn z_on<I: IntoIterator<Item = usize>>(n_qubits: usize, qubits: I) -> Self {
        Self::from_masks(n_qubits, QubitMask::EMPTY, QubitMask::from_qubits(qubits))
    }

    /// Parse strings such as `"XIZ"`, `"-iYY"` or `"+XZ"`. Qubit 0 is the
    /// leftmost letter.
    pub fn parse(s: &str) -> Result<Self> {
        let mut rest = s;
        let mut phase = Phase::ONE;
        if let Some(r) = rest.strip_prefix('-') {
            phase = Phase::MINUS_ONE;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase = phase.mul(Phase::I);
            rest = r;
        }
        let n = rest.chars().count();
        let mut p = PauliString::identity(n);
        for (q, c) in rest.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => p.x.set(q, true),
                'Z' => p.z.set(q, true),
                'Y' => {
                    p.x.set(q, true);
                    p.z.set(q, true);
                    // Y = i X Z
                    p.phase = p.phase.mul(Phase::I);
                }
                other => return Err(Error::Parse(format!("bad Pauli letter {other:?}"))),
            }
        }
        p.phase = p.phase.mul(phase);
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn weight(&self) -> u32 {
        self.x.or(&self.z).count()
    }

    pub fn support(&self) -> QubitMask {
        self.x.or(&self.z)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    pub fn is_hermitian(&self) -> bool {
        let y_count = self.x.and(&self.z).count();
        (self.phase.power() as u32 + y_count) % 2 == 0
    }

    /// The same Pauli with phase set to `+1` in the X-then-Z convention.
    pub fn stripped(&self) -> Self {
        PauliString { phase: Phase::ONE, ..*self }
    }

    /// Hermitian representative: the phase is chosen so that each Y carries
    /// its own factor of `i`.
    pub fn hermitian(&self) -> Self {
        let y_count = self.x.and(&self.z).count();
        PauliString { phase: Phase::new(y_count), ..*self }
    }

    /// Restrict to the qubits in `mask`, keeping the phase.
    pub fn restricted(&self, mask: &QubitMask) -> Self {
        PauliString { x: self.x.and(mask), z: self.z.and(mask), ..*self }
    }

    /// Product without size checking.
    #[inline]
    pub fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        let sign = if self.z.dot(&other.x) { Phase::MINUS_ONE } else { Phase::ONE };
        PauliString {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: self.phase.mul(other.phase).mul(sign),
        }
    }

    #[inline]
    pub fn commutes_unchecked(&self, other: &PauliString) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    pub fn inverse(&self) -> PauliString {
        // (i^p X Z)^-1 = i^-p Z X = i^-p (-1)^{x.z} X Z
        let y = self.x.dot(&self.z);
        let sign = if y { Phase::MINUS_ONE } else { Phase::ONE };
        PauliString { phase: self.phase.conj().mul(sign), ..*self }
    }
}

pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    check_sizes(a, b)?;
    Ok(a.mul_unchecked(b))
}

pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_sizes(a, b)?;
    Ok(a.commutes_unchecked(b))
}

fn check_sizes(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::SizeMismatch { left: a.n_qubits, right: b.n_qubits });
    }
    Ok(())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Print in the Hermitian-letter convention.
        let y_count = self.x.and(&self.z).count();
        let rel = self.phase.mul(Phase::new(y_count).conj());
        let prefix = match rel.power() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n_qubits {
            let c = match (self.x.get(q), self.z.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A signed abelian group of Paulis, typically the stabilizer of a
/// reference state (stabilizers plus any fixed gauge operators).
///
/// Generators are kept in reduced echelon form over the symplectic bits so
/// that [`StabilizerGroup::reduce`] returns a canonical coset
/// representative.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n_qubits: usize,
    /// (pivot index, generator); pivot `q` means X bit of qubit `q`,
    /// `MAX_QUBITS + q` the Z bit.
    gens: Vec<(usize, PauliString)>,
}

fn sym_bit(p: &PauliString, idx: usize) -> bool {
    if idx < MAX_QUBITS {
        p.x.get(idx)
    } else {
        p.z.get(idx - MAX_QUBITS)
    }
}

fn sym_highest(p: &PauliString) -> Option<usize> {
    p.z.highest().map(|q| q + MAX_QUBITS).or_else(|| p.x.highest())
}

impl StabilizerGroup {
    pub fn new(n_qubits: usize) -> Self {
        StabilizerGroup { n_qubits, gens: Vec::new() }
    }

    pub fn from_generators<'a, I: IntoIterator<Item = &'a PauliString>>(
        n_qubits: usize,
        gens: I,
    ) -> Result<Self> {
        let mut g = Self::new(n_qubits);
        for p in gens {
            g.add(p)?;
        }
        Ok(g)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = &PauliString> {
        self.gens.iter().map(|(_, g)| g)
    }

    /// Add a generator. Dependent generators are ignored; a generator that
    /// anticommutes with the group is rejected.
    pub fn add(&mut self, p: &PauliString) -> Result<bool> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: p.n_qubits() });
        }
        if self.gens.iter().any(|(_, g)| !g.commutes_unchecked(p)) {
            return Err(Error::InvalidParameter(format!("{p} anticommutes with the group")));
        }
        let r = self.reduce(p);
        let Some(pivot) = sym_highest(&r) else {
            return Ok(false);
        };
        for (_, g) in self.gens.iter_mut() {
            if sym_bit(g, pivot) {
                *g = g.mul_unchecked(&r);
            }
        }
        self.gens.push((pivot, r));
        Ok(true)
    }

    /// Canonical representative `r` of the coset `p * S`, with the phase
    /// chosen so that `p` and `r` act identically on the reference state.
    pub fn reduce(&self, p: &PauliString) -> PauliString {
        let mut r = *p;
        for (pivot, g) in &self.gens {
            if sym_bit(&r, *pivot) {
                r = r.mul_unchecked(g);
            }
        }
        r
    }

    /// `Some(sign)` if `p` is `+-1` times a group element.
    pub fn contains(&self, p: &PauliString) -> Option<Phase> {
        let r = self.reduce(p);
        r.is_identity().then_some(r.phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliString::parse("XI").unwrap();
        let z = PauliString::parse("ZI").unwrap();
        let p = multiply(&x, &z).unwrap();
        assert_eq!(p, PauliString::parse("-iYI").unwrap());
    }

    #[test]
    fn hermitian_squares_to_identity() {
        for s in ["X", "Y", "Z", "-YX", "XYZ"] {
            let p = PauliString::parse(s).unwrap();
            assert!(p.is_hermitian());
            let sq = multiply(&p, &p).unwrap();
            assert!(sq.is_identity());
            assert_eq!(sq.phase, Phase::ONE);
        }
    }

    #[test]
    fn commutation_examples() {
        let c = |a: &str, b: &str| {
            commutes(&PauliString::parse(a).unwrap(), &PauliString::parse(b).unwrap()).unwrap()
        };
        assert!(!c("XI", "ZI"));
        assert!(c("XI", "IZ"));
        assert!(c("XX", "ZZ"));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = PauliString::parse("X").unwrap();
        let b = PauliString::parse("XX").unwrap();
        assert!(matches!(multiply(&a, &b), Err(Error::SizeMismatch { .. })));
        assert!(commutes(&a, &b).is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["+XYZ", "-iIYI", "+iZZ", "-X"] {
            assert_eq!(PauliString::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn group_reduction_is_canonical() {
        let gens: Vec<_> = ["ZZI", "IZZ", "XXX"].iter().map(|s| PauliString::parse(s).unwrap()).collect();
        let g = StabilizerGroup::from_generators(3, &gens).unwrap();
        assert_eq!(g.rank(), 3);
        assert_eq!(g.contains(&PauliString::parse("ZIZ").unwrap()), Some(Phase::ONE));
        assert_eq!(g.contains(&PauliString::parse("-YYX").unwrap()), Some(Phase::ONE));
        let a = g.reduce(&PauliString::parse("ZII").unwrap());
        let b = g.reduce(&PauliString::parse("IIZ").unwrap());
        assert_eq!(a, b);
        assert!(g.contains(&PauliString::parse("ZII").unwrap()).is_none());
    }
}
