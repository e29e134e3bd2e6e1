//! Complex-weighted sums of Pauli strings and measurement splitting.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bits::QubitMask;
use crate::circuit::GateSpec;
use crate::error::{Error, Result};
use crate::frame::DiagonalCliffordFrame;
use crate::pauli::{PauliString, Phase, StabilizerGroup};

pub(crate) const ZERO_CUTOFF: f64 = 1e-14;

/// `sum_a c_a P_a` with every `P_a` stored phase-free (X then Z).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(QubitMask, QubitMask), Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        let mut s = Self::new(p.n_qubits());
        s.add_term(p, Complex64::new(1.0, 0.0));
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: &PauliString, c: Complex64) {
        let c = c * p.phase.to_complex();
        let key = (p.x, p.z);
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < ZERO_CUTOFF {
            self.terms.remove(&key);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.terms
            .iter()
            .map(move |(&(x, z), &c)| (PauliString::from_masks(self.n_qubits, x, z), c))
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(&(p.x, p.z)).copied().unwrap_or_default() * p.phase.conj().to_complex()
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&mut self, s: Complex64) {
        for c in self.terms.values_mut() {
            *c *= s;
        }
    }

    /// `P * self`.
    pub fn left_mul(&self, p: &PauliString) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        for (q, c) in self.iter() {
            out.add_term(&p.mul_unchecked(&q), c);
        }
        out
    }

    /// `g * self * g^dagger`, expanding any CZ parts produced by CCZ.
    pub fn conjugate(&self, gate: &GateSpec) -> Result<PauliSum> {
        let mut out = PauliSum::new(self.n_qubits);
        for (p, c) in self.iter() {
            let mut f = DiagonalCliffordFrame::from_pauli(&p);
            f.conjugate_in_place(gate)?;
            for (q, d) in f.expand().iter() {
                out.add_term(&q, c * d);
            }
        }
        Ok(out)
    }

    /// Combine terms that act identically on states stabilized by `group`.
    /// Returns canonical coset representatives with accumulated amplitude.
    pub fn merge_mod(&self, group: &StabilizerGroup) -> Vec<(PauliString, Complex64)> {
        let mut acc: BTreeMap<(QubitMask, QubitMask), Complex64> = BTreeMap::new();
        for (p, c) in self.iter() {
            let r = group.reduce(&p);
            *acc.entry((r.x, r.z)).or_default() += c * r.phase.to_complex();
        }
        acc.into_iter()
            .filter(|(_, c)| c.norm() >= ZERO_CUTOFF)
            .map(|((x, z), c)| (PauliString::from_masks(self.n_qubits, x, z), c))
            .collect()
    }

    /// `|| self |psi> ||^2` averaged over states with stabilizer `group`
    /// (maximally mixed on whatever `group` leaves free).
    pub fn norm_sq_mod(&self, group: &StabilizerGroup) -> f64 {
        self.merge_mod(group).iter().map(|(_, c)| c.norm_sqr()).sum()
    }
}

/// One branch of a measurement: post-measurement error (normalized) and
/// its probability.
#[derive(Clone, Debug)]
pub struct Branch {
    pub error: PauliSum,
    pub prob: f64,
}

/// Measure Hermitian Pauli `observable` on `E rho E^dagger`, where `rho`
/// is the maximally mixed state on the `group` stabilizer space.
///
/// Returns the `+1` and `-1` branches.
pub fn split_measurement(
    e: &PauliSum,
    observable: &PauliString,
    group: &StabilizerGroup,
) -> Result<(Branch, Branch)> {
    if observable.n_qubits() != e.n_qubits() || group.n_qubits() != e.n_qubits() {
        return Err(Error::SizeMismatch { left: e.n_qubits(), right: observable.n_qubits() });
    }
    if !observable.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = e.n_qubits();
    let half = Complex64::new(0.5, 0.0);
    let mut plus = PauliSum::new(n);
    let mut minus = PauliSum::new(n);
    match group.contains(observable) {
        Some(sign) => {
            // O E psi = +-E O psi: each term lands wholly in one branch.
            let s_obs = sign == Phase::ONE;
            for (p, c) in e.iter() {
                let commute = p.commutes_unchecked(observable);
                if commute == s_obs {
                    plus.add_term(&p, c);
                } else {
                    minus.add_term(&p, c);
                }
            }
        }
        None => {
            // (I + s O)/2 E, kept as an explicit Pauli sum.
            for (p, c) in e.iter() {
                let op = observable.mul_unchecked(&p);
                plus.add_term(&p, c * half);
                plus.add_term(&op, c * half);
                minus.add_term(&p, c * half);
                minus.add_term(&op, -c * half);
            }
        }
    }
    let finish = |mut s: PauliSum| {
        let prob = s.norm_sq_mod(group);
        if prob > 0.0 {
            s.scale(Complex64::new(1.0 / prob.sqrt(), 0.0));
        }
        Branch { error: s, prob }
    };
    Ok((finish(plus), finish(minus)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn deterministic_single_term() {
        let g = StabilizerGroup::from_generators(2, &[p("ZZ"), p("XX")]).unwrap();
        let e = PauliSum::from_pauli(&p("XI"));
        let (a, b) = split_measurement(&e, &p("XX"), &g).unwrap();
        assert!((a.prob - 1.0).abs() < 1e-12 && b.prob.abs() < 1e-12);
        let (a, b) = split_measurement(&e, &p("ZZ"), &g).unwrap();
        assert!(a.prob.abs() < 1e-12 && (b.prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_terms_split_evenly() {
        let g = StabilizerGroup::from_generators(2, &[p("ZZ"), p("XX")]).unwrap();
        let mut e = PauliSum::new(2);
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        e.add_term(&p("IX"), amp);
        e.add_term(&p("IZ"), amp);
        let (a, b) = split_measurement(&e, &p("ZZ"), &g).unwrap();
        assert!((a.prob - 0.5).abs() < 1e-12 && (b.prob - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_observable_is_fair() {
        let g = StabilizerGroup::from_generators(2, &[p("ZZ")]).unwrap();
        let e = PauliSum::from_pauli(&p("IZ"));
        let (a, b) = split_measurement(&e, &p("XI"), &g).unwrap();
        assert!((a.prob - 0.5).abs() < 1e-12 && (b.prob - 0.5).abs() < 1e-12);
    }
}
