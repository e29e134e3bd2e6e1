//! Diagonal-Clifford frames: `i^k X^a D` with `D` a diagonal operator whose
//! phase function is a quadratic form over GF(2).
//!
//! `D|x> = (-1)^{b.x + sum_{(u,v)} x_u x_v} |x>`, where `b` is the Z part and
//! the sum runs over the CZ pairs. Conjugation by CCZ turns an X error into
//! an X error times a CZ on the other two nodes, so this family is the
//! smallest one closed under the gadget gate set.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::QubitMask;
use crate::circuit::{GateKind, GateSpec};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Phase, StabilizerGroup};
use crate::pauli_sum::{PauliSum, ZERO_CUTOFF};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalCliffordFrame {
    n_qubits: usize,
    pub x: QubitMask,
    pub z: QubitMask,
    /// Sorted pairs `(u, v)` with `u < v`.
    cz: Vec<(u16, u16)>,
    pub phase: Phase,
}

fn ordered(u: usize, v: usize) -> (u16, u16) {
    if u < v {
        (u as u16, v as u16)
    } else {
        (v as u16, u as u16)
    }
}

impl DiagonalCliffordFrame {
    pub fn identity(n_qubits: usize) -> Self {
        Self::from_pauli(&PauliString::identity(n_qubits))
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        DiagonalCliffordFrame { n_qubits: p.n_qubits(), x: p.x, z: p.z, cz: Vec::new(), phase: p.phase }
    }

    pub fn cz(n_qubits: usize, u: usize, v: usize) -> Self {
        let mut f = Self::identity(n_qubits);
        f.toggle_cz(u, v);
        f
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn cz_pairs(&self) -> &[(u16, u16)] {
        &self.cz
    }

    pub fn has_cz(&self) -> bool {
        !self.cz.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty() && self.z.is_empty() && self.cz.is_empty()
    }

    /// The frame as a Pauli, if it has no CZ pairs.
    pub fn as_pauli(&self) -> Option<PauliString> {
        if self.cz.is_empty() {
            PauliString::try_new(self.n_qubits, self.x, self.z, self.phase).ok()
        } else {
            None
        }
    }

    /// Multiply a CZ pair into the diagonal part (CZ^2 = I).
    pub fn toggle_cz(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "CZ on a single qubit");
        let p = ordered(u, v);
        match self.cz.binary_search(&p) {
            Ok(i) => {
                self.cz.remove(i);
            }
            Err(i) => self.cz.insert(i, p),
        }
    }

    pub fn has_pair(&self, u: usize, v: usize) -> bool {
        self.cz.binary_search(&ordered(u, v)).is_ok()
    }

    fn partners(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        let q = q as u16;
        self.cz.iter().filter_map(move |&(u, v)| {
            if u == q {
                Some(v as usize)
            } else if v == q {
                Some(u as usize)
            } else {
                None
            }
        })
    }

    /// Qubits touched by X, Z or CZ parts.
    pub fn support(&self) -> QubitMask {
        let mut s = self.x.or(&self.z);
        for &(u, v) in &self.cz {
            s.set(u as usize, true);
            s.set(v as usize, true);
        }
        s
    }

    /// Replace the diagonal part `D(x)` by `D(x + s)`. Returns whether the
    /// constant term of the new phase function is odd.
    fn shift_diagonal(&mut self, s: &QubitMask) -> bool {
        let mut sign = self.z.dot(s);
        let mut extra = QubitMask::EMPTY;
        for &(u, v) in &self.cz {
            let (u, v) = (u as usize, v as usize);
            let (su, sv) = (s.get(u), s.get(v));
            if su {
                extra.toggle(v);
            }
            if sv {
                extra.toggle(u);
            }
            sign ^= su && sv;
        }
        self.z ^= extra;
        sign
    }

    fn flip_sign(&mut self, yes: bool) {
        if yes {
            self.phase = self.phase.mul(Phase::MINUS_ONE);
        }
    }

    fn check_range(&self, qubits: &[usize]) -> Result<()> {
        for &q in qubits {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
        }
        Ok(())
    }

    /// In-place `g F g^dagger`.
    pub fn conjugate_in_place(&mut self, gate: &GateSpec) -> Result<()> {
        self.check_range(&gate.qubits)?;
        let q = &gate.qubits;
        match gate.kind {
            GateKind::I => {}
            GateKind::X => {
                let s = QubitMask::single(q[0]);
                let sign = self.shift_diagonal(&s);
                self.flip_sign(sign);
            }
            GateKind::Z => {
                let sign = self.x.get(q[0]);
                self.flip_sign(sign);
            }
            GateKind::H => {
                let t = q[0];
                if self.partners(t).next().is_some() {
                    return Err(Error::UnsupportedConjugation(format!(
                        "H on qubit {t} which carries a CZ pair"
                    )));
                }
                let (a, b) = (self.x.get(t), self.z.get(t));
                self.x.set(t, b);
                self.z.set(t, a);
                self.flip_sign(a && b);
            }
            GateKind::CNOT => {
                let (c, t) = (q[0], q[1]);
                // X_c -> X_c X_t
                if self.x.get(c) {
                    self.x.toggle(t);
                }
                // D(y) -> D(y with y_t <- y_t + y_c)
                if self.z.get(t) {
                    self.z.toggle(c);
                }
                let partners: Vec<usize> = self.partners(t).collect();
                for u in partners {
                    if u == c {
                        self.z.toggle(c);
                    } else {
                        self.toggle_cz(c, u);
                    }
                }
            }
            GateKind::CZ => {
                let (u, v) = (q[0], q[1]);
                let (au, av) = (self.x.get(u), self.x.get(v));
                if au {
                    self.z.toggle(v);
                }
                if av {
                    self.z.toggle(u);
                }
                self.flip_sign(au && av);
            }
            GateKind::CCZ => {
                let s: Vec<bool> = q.iter().map(|&j| self.x.get(j)).collect();
                for i in 0..3 {
                    if !s[i] {
                        continue;
                    }
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    self.toggle_cz(q[j], q[k]);
                    if s[j] {
                        self.z.toggle(q[k]);
                    }
                }
                // Each linear term x_k arises from the pair {i, j} with both
                // shifted; the loop above visits every such pair once.
                self.flip_sign(s[0] && s[1] && s[2]);
            }
            GateKind::CkZ => {
                let hits = q.iter().filter(|&&j| self.x.get(j)).count();
                if hits > 0 {
                    return Err(Error::UnsupportedConjugation(format!(
                        "X error through a {}-qubit controlled Z leaves the frame family",
                        q.len()
                    )));
                }
            }
            kind => {
                return Err(Error::UnsupportedConjugation(format!("{kind} is not unitary")));
            }
        }
        Ok(())
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.mul_unchecked(other))
    }

    /// `self * other`.
    pub fn mul_unchecked(&self, other: &Self) -> Self {
        // X^a1 D1 X^a2 D2 = X^(a1+a2) D1(x + a2) D2
        let mut out = self.clone();
        let sign = out.shift_diagonal(&other.x);
        out.flip_sign(sign);
        out.x ^= other.x;
        out.z ^= other.z;
        for &(u, v) in &other.cz {
            out.toggle_cz(u as usize, v as usize);
        }
        out.phase = out.phase.mul(other.phase);
        out
    }

    pub fn inverse(&self) -> Self {
        // (i^k X^a D)^-1 = i^-k D X^a = i^-k X^a D(x + a)
        let mut out = self.clone();
        let a = self.x;
        let sign = out.shift_diagonal(&a);
        out.phase = self.phase.conj();
        out.flip_sign(sign);
        out
    }

    /// Left-multiply by a Pauli: `P * F`.
    pub fn left_mul_pauli(&self, p: &PauliString) -> Self {
        Self::from_pauli(p).mul_unchecked(self)
    }

    /// Value of the diagonal part on basis state `x`, as a sign.
    pub fn diagonal_sign(&self, x: &QubitMask) -> bool {
        let mut s = self.z.dot(x);
        for &(u, v) in &self.cz {
            s ^= x.get(u as usize) && x.get(v as usize);
        }
        s
    }

    /// Expand into a Pauli sum. Each connected component of the CZ graph is
    /// Walsh-Hadamard transformed separately.
    pub fn expand(&self) -> PauliSum {
        let base = PauliString::try_new(self.n_qubits, self.x, self.z, Phase::ONE)
            .expect("frame masks in range");
        let mut terms: Vec<(PauliString, Complex64)> = vec![(base, self.phase.to_complex())];
        for comp in self.cz_components() {
            let f = self.spectrum(&comp);
            let size = f.len();
            let mut next = Vec::with_capacity(terms.len() * size);
            for (p, c) in &terms {
                for (s, &w) in f.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let mut q = *p;
                    for (bit, &qubit) in comp.iter().enumerate() {
                        if (s >> bit) & 1 == 1 {
                            q.z.toggle(qubit);
                        }
                    }
                    next.push((q, c * w));
                }
            }
            terms = next;
        }
        let mut sum = PauliSum::new(self.n_qubits);
        for (p, c) in terms {
            sum.add_term(&p, c);
        }
        sum
    }

    /// Normalized Walsh-Hadamard spectrum of the CZ phase function on one
    /// component; entry `s` is the coefficient of `Z^s` (bits in `comp` order).
    fn spectrum(&self, comp: &[usize]) -> Vec<f64> {
        let k = comp.len();
        assert!(k <= 24, "CZ component of {k} qubits is too large to expand");
        let local = |q: u16| comp.iter().position(|&c| c == q as usize).unwrap();
        let pairs: Vec<(usize, usize)> = self
            .cz
            .iter()
            .filter(|&&(u, _)| comp.contains(&(u as usize)))
            .map(|&(u, v)| (local(u), local(v)))
            .collect();
        let size = 1usize << k;
        let mut f: Vec<f64> = (0..size)
            .map(|x| {
                let odd = pairs.iter().filter(|&&(u, v)| (x >> u) & 1 == 1 && (x >> v) & 1 == 1).count() % 2 == 1;
                if odd { -1.0 } else { 1.0 }
            })
            .collect();
        walsh_hadamard(&mut f);
        let norm = 1.0 / size as f64;
        f.iter_mut().for_each(|w| *w *= norm);
        f
    }

    /// Same result as `expand().merge_mod(group)`, for groups of Z-type
    /// operators. Terms are merged after each CZ component, so at most one
    /// term per coset is ever held.
    pub fn expand_mod(&self, group: &StabilizerGroup) -> Vec<(PauliString, Complex64)> {
        if group.generators().any(|g| !g.x.is_empty()) {
            return self.expand().merge_mod(group);
        }
        // Z-type generators leave the X part and the phase alone
        let canon = |z: QubitMask| group.reduce(&PauliString::from_masks(self.n_qubits, QubitMask::EMPTY, z)).z;
        let mut acc: HashMap<QubitMask, Complex64> = HashMap::new();
        acc.insert(canon(self.z), self.phase.to_complex());
        for comp in self.cz_components() {
            let f = self.spectrum(&comp);
            let mut next: HashMap<QubitMask, Complex64> = HashMap::with_capacity(acc.len() * 4);
            for (z, c) in &acc {
                for (s, &w) in f.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let mut q = *z;
                    for (bit, &qubit) in comp.iter().enumerate() {
                        if (s >> bit) & 1 == 1 {
                            q.toggle(qubit);
                        }
                    }
                    *next.entry(canon(q)).or_default() += c * w;
                }
            }
            acc = next;
        }
        let mut out: Vec<_> = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= ZERO_CUTOFF)
            .map(|(z, c)| (PauliString::from_masks(self.n_qubits, self.x, z), c))
            .collect();
        out.sort_by_key(|(p, _)| (p.x, p.z));
        out
    }

    /// Connected components (as sorted qubit lists) of the CZ graph.
    pub fn cz_components(&self) -> Vec<Vec<usize>> {
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &(u, v) in &self.cz {
            let (u, v) = (u as usize, v as usize);
            let iu = comps.iter().position(|c| c.contains(&u));
            let iv = comps.iter().position(|c| c.contains(&v));
            match (iu, iv) {
                (None, None) => comps.push(vec![u, v]),
                (Some(i), None) => comps[i].push(v),
                (None, Some(i)) => comps[i].push(u),
                (Some(i), Some(j)) if i != j => {
                    let other = comps.swap_remove(i.max(j));
                    comps[i.min(j)].extend(other);
                }
                _ => {}
            }
        }
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort();
        comps
    }
}

/// Unnormalized in-place Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub fn conjugate(gate: &GateSpec, f: &DiagonalCliffordFrame) -> Result<DiagonalCliffordFrame> {
    let mut out = f.clone();
    out.conjugate_in_place(gate)?;
    Ok(out)
}

pub fn expand(f: &DiagonalCliffordFrame) -> PauliSum {
    f.expand()
}

impl fmt::Debug for DiagonalCliffordFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = PauliString::try_new(self.n_qubits, self.x, self.z, self.phase).expect("in range");
        write!(f, "{p}")?;
        for (u, v) in &self.cz {
            write!(f, " CZ({u},{v})")?;
        }
        Ok(())
    }
}
