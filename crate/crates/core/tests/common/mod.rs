#![allow(dead_code)]

use std::f64::consts::PI;

use cliffpert::{Circuit, CliffordGate, Pauli, PauliString};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    loop {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]);
        }
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn random_clifford<R: Rng>(rng: &mut R, n: usize) -> CliffordGate {
    let names = ["h", "s", "sdg", "x", "y", "z", "cx", "cz", "swap"];
    let name = names[rng.gen_range(0..if n > 1 { names.len() } else { 6 })];
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    let arity = if matches!(name, "cx" | "cz" | "swap") { 2 } else { 1 };
    CliffordGate::from_name(name, &qubits[..arity]).unwrap()
}

/// Half named Cliffords, half Pauli rotations with angles in `(-2π, 2π)`.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, gates: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..gates {
        if rng.gen_bool(0.5) {
            c.clifford(random_clifford(rng, n)).unwrap();
        } else {
            let axis = random_pauli(rng, n);
            c.rotation(axis, rng.gen_range(-2.0 * PI..2.0 * PI)).unwrap();
        }
    }
    c
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}
