//! Dense linear-algebra oracles for small qubit counts. Basis index bit `q`
//! is the value of qubit `q`.
#![allow(dead_code)]

use bacon_shor::circuit::{GateKind, GateSpec};
use bacon_shor::frame::DiagonalCliffordFrame;
use bacon_shor::pauli::PauliString;
use bacon_shor::pauli_sum::PauliSum;
use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn zeros(n_qubits: usize) -> Mat {
    let d = 1 << n_qubits;
    vec![vec![C::new(0.0, 0.0); d]; d]
}

fn ipow(k: u8) -> C {
    [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][(k & 3) as usize]
}

fn bit(x: usize, q: usize) -> bool {
    (x >> q) & 1 == 1
}

/// Matrix of `i^k X^a D` with `D|x> = (-1)^{b.x + sum x_u x_v}|x>`.
pub fn frame_matrix(f: &DiagonalCliffordFrame) -> Mat {
    let n = f.n_qubits();
    let mut m = zeros(n);
    let a: usize = f.x.iter().map(|q| 1 << q).sum();
    for x in 0..1usize << n {
        let mut odd = f.z.iter().filter(|&q| bit(x, q)).count() % 2 == 1;
        for &(u, v) in f.cz_pairs() {
            odd ^= bit(x, u as usize) && bit(x, v as usize);
        }
        let s = if odd { -1.0 } else { 1.0 };
        m[x ^ a][x] = ipow(f.phase.power()) * s;
    }
    m
}

pub fn pauli_matrix(p: &PauliString) -> Mat {
    frame_matrix(&DiagonalCliffordFrame::from_pauli(p))
}

pub fn sum_matrix(s: &PauliSum) -> Mat {
    let mut m = zeros(s.n_qubits());
    for (p, c) in s.iter() {
        let pm = pauli_matrix(&p);
        add_scaled(&mut m, &pm, c);
    }
    m
}

pub fn add_scaled(m: &mut Mat, other: &Mat, c: C) {
    for (r, o) in m.iter_mut().zip(other) {
        for (a, b) in r.iter_mut().zip(o) {
            *a += c * b;
        }
    }
}

pub fn identity(n_qubits: usize) -> Mat {
    let mut m = zeros(n_qubits);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    m
}

/// Unitary of a gate on `n_qubits`, built from its action on basis states.
pub fn gate_matrix(g: &GateSpec, n_qubits: usize) -> Mat {
    let d = 1usize << n_qubits;
    let q = &g.qubits;
    let mut m = zeros(n_qubits);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for x in 0..d {
        match g.kind {
            GateKind::I => m[x][x] = C::new(1.0, 0.0),
            GateKind::X => m[x ^ (1 << q[0])][x] = C::new(1.0, 0.0),
            GateKind::Z => m[x][x] = C::new(if bit(x, q[0]) { -1.0 } else { 1.0 }, 0.0),
            GateKind::H => {
                m[x & !(1 << q[0])][x] += C::new(h, 0.0);
                let s = if bit(x, q[0]) { -h } else { h };
                m[x | (1 << q[0])][x] += C::new(s, 0.0);
            }
            GateKind::CNOT => {
                let y = if bit(x, q[0]) { x ^ (1 << q[1]) } else { x };
                m[y][x] = C::new(1.0, 0.0);
            }
            GateKind::CZ | GateKind::CCZ | GateKind::CkZ => {
                let all = q.iter().all(|&j| bit(x, j));
                m[x][x] = C::new(if all { -1.0 } else { 1.0 }, 0.0);
            }
            other => panic!("no unitary for {other}"),
        }
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dagger(a: &Mat) -> Mat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn approx_eq(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| (x - y).norm() <= tol))
}

pub type State = Vec<C>;

pub fn basis_state(n_qubits: usize, x: usize) -> State {
    let mut v = vec![C::new(0.0, 0.0); 1 << n_qubits];
    v[x] = C::new(1.0, 0.0);
    v
}

pub fn apply(m: &Mat, v: &State) -> State {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Apply a gate to a statevector without forming its matrix.
pub fn apply_gate(g: &GateSpec, v: &mut State) {
    let q = &g.qubits;
    match g.kind {
        GateKind::I => {}
        GateKind::X => {
            for x in 0..v.len() {
                if !bit(x, q[0]) {
                    v.swap(x, x | (1 << q[0]));
                }
            }
        }
        GateKind::Z => {
            for (x, a) in v.iter_mut().enumerate() {
                if bit(x, q[0]) {
                    *a = -*a;
                }
            }
        }
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for x in 0..v.len() {
                if !bit(x, q[0]) {
                    let y = x | (1 << q[0]);
                    let (a, b) = (v[x], v[y]);
                    v[x] = (a + b) * h;
                    v[y] = (a - b) * h;
                }
            }
        }
        GateKind::CNOT => {
            for x in 0..v.len() {
                if bit(x, q[0]) && !bit(x, q[1]) {
                    v.swap(x, x | (1 << q[1]));
                }
            }
        }
        GateKind::CZ | GateKind::CCZ | GateKind::CkZ => {
            for (x, a) in v.iter_mut().enumerate() {
                if q.iter().all(|&j| bit(x, j)) {
                    *a = -*a;
                }
            }
        }
        other => panic!("no unitary for {other}"),
    }
}

/// Probability that measuring Hermitian Pauli `obs` on `v` gives +1.
pub fn prob_plus(obs: &PauliString, v: &State) -> f64 {
    let m = pauli_matrix(obs);
    let ov = apply(&m, v);
    let expval: C = v.iter().zip(&ov).map(|(a, b)| a.conj() * b).sum();
    0.5 * (1.0 + expval.re)
}

/// Project `v` onto the +1 eigenspace of each generator and normalize.
pub fn project_onto(gens: &[PauliString], v: &State) -> State {
    let mut out = v.clone();
    for g in gens {
        let gv = apply(&pauli_matrix(g), &out);
        out = out.iter().zip(&gv).map(|(a, b)| (a + b) * 0.5).collect();
    }
    let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    out.iter().map(|a| a / norm).collect()
}
