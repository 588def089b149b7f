//! Clifford interaction picture.
//!
//! Every rotation `exp(-i θ P / 2)` is split as `exp(-i θ̃ P / 2) · exp(-i k π P / 4)`
//! with `|θ̃| <= π/4`. The Clifford parts and the named Cliffords are then
//! pushed towards the observable, conjugating every rotation axis they pass
//! and finally the observable itself. What is left is a list of rotations with
//! small angles acting on a signed Pauli observable, with the same expectation
//! value in `|0…0⟩` as the original circuit.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::circuit::{rotation_clifford_in_place, Circuit, CircuitDoc, Gate, GateDoc};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Angles with `|θ̃|` at or below this are treated as exact Cliffords.
pub const CLIFFORD_ANGLE_TOLERANCE: f64 = 1e-12;

/// Splits `theta = theta_tilde + k·π/2 (mod 2π)` with `theta_tilde` in
/// `(-π/4, π/4]` and `k` in `0..4`.
pub fn angle_transform(theta: f64) -> Result<(f64, u8)> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    let k = ((theta - FRAC_PI_4) / FRAC_PI_2).ceil();
    let mut tilde = theta - k * FRAC_PI_2;
    // guard the half-open interval against rounding at the boundary
    let mut k = k as i64;
    if tilde <= -FRAC_PI_4 {
        tilde += FRAC_PI_2;
        k -= 1;
    }
    Ok((tilde, k.rem_euclid(4) as u8))
}

/// A non-Clifford rotation in the interaction picture.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    pub axis: PauliString,
    pub theta: f64,
    /// Index of the originating gate in the input circuit.
    pub source_index: usize,
}

/// Rotations listed in the order they act on the observable (the reverse of
/// circuit order), together with the Clifford-transformed observable.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionPictureProgram {
    pub n: usize,
    pub rotations: Vec<Rotation>,
    pub observable: PauliString,
    pub sign: i8,
    /// `false` when compiled without the angle transformation, in which case
    /// angles are unrestricted.
    pub angle_transformed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub angle_transform: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            angle_transform: true,
        }
    }
}

enum CliffordStep<'a> {
    Named(&'a crate::circuit::CliffordGate),
    Rotation(&'a PauliString, u8),
}

impl CliffordStep<'_> {
    fn apply(&self, p: &mut PauliString) -> bool {
        match self {
            CliffordStep::Named(g) => g.conjugate_in_place(p),
            CliffordStep::Rotation(axis, k) => rotation_clifford_in_place(p, axis, *k),
        }
    }
}

pub fn compile(circuit: &Circuit, observable: &PauliString) -> Result<InteractionPictureProgram> {
    compile_with(circuit, observable, CompileOptions::default())
}

pub fn compile_with(
    circuit: &Circuit,
    observable: &PauliString,
    options: CompileOptions,
) -> Result<InteractionPictureProgram> {
    let mut v = compile_many(circuit, std::slice::from_ref(observable), options)?;
    Ok(v.pop().expect("one observable in, one program out"))
}

/// Compiles one circuit against several observables; the rotation list is
/// shared and computed once.
pub fn compile_many(
    circuit: &Circuit,
    observables: &[PauliString],
    options: CompileOptions,
) -> Result<Vec<InteractionPictureProgram>> {
    let n = circuit.n();
    for o in observables {
        if o.n() != n {
            return Err(Error::Dimension {
                expected: n,
                found: o.n(),
            });
        }
    }
    let mut obs: Vec<(PauliString, bool)> = observables.iter().map(|o| (o.clone(), false)).collect();
    let mut pending: Vec<Rotation> = Vec::new();

    let absorb = |step: CliffordStep, pending: &mut Vec<Rotation>, obs: &mut Vec<(PauliString, bool)>| {
        for r in pending.iter_mut() {
            if step.apply(&mut r.axis) {
                r.theta = -r.theta;
            }
        }
        for (o, neg) in obs.iter_mut() {
            if step.apply(o) {
                *neg = !*neg;
            }
        }
    };

    for (idx, gate) in circuit.gates().iter().enumerate().rev() {
        match gate {
            Gate::Clifford(g) => absorb(CliffordStep::Named(g), &mut pending, &mut obs),
            Gate::Rotation { axis, theta } => {
                let (tilde, k) = if options.angle_transform {
                    angle_transform(*theta)?
                } else {
                    (*theta, 0)
                };
                if tilde.abs() > CLIFFORD_ANGLE_TOLERANCE {
                    pending.push(Rotation {
                        axis: axis.clone(),
                        theta: tilde,
                        source_index: idx,
                    });
                }
                if k != 0 {
                    absorb(CliffordStep::Rotation(axis, k), &mut pending, &mut obs);
                }
            }
        }
    }

    Ok(obs
        .into_iter()
        .map(|(observable, neg)| InteractionPictureProgram {
            n,
            rotations: pending.clone(),
            observable,
            sign: if neg { -1 } else { 1 },
            angle_transformed: options.angle_transform,
        })
        .collect())
}

impl InteractionPictureProgram {
    /// The program as a rotation-only circuit in state order, with the
    /// observable and its sign.
    pub fn to_circuit(&self) -> (Circuit, PauliString, i8) {
        let mut c = Circuit::new(self.n);
        for r in self.rotations.iter().rev() {
            c.rotation(r.axis.clone(), r.theta)
                .expect("program rotations are valid gates");
        }
        (c, self.observable.clone(), self.sign)
    }

    pub fn to_doc(&self) -> ProgramDoc {
        let gates = self
            .rotations
            .iter()
            .rev()
            .map(|r| GateDoc {
                kind: "rot".to_string(),
                qubits: None,
                axis: Some(r.axis.to_string()),
                theta: Some(r.theta),
                source: Some(r.source_index),
            })
            .collect();
        ProgramDoc {
            circuit: CircuitDoc { n: self.n, gates },
            observable: self.observable.to_string(),
            sign: self.sign,
        }
    }
}

/// JSON form of a compiled program: a circuit document plus the observable.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProgramDoc {
    #[serde(flatten)]
    pub circuit: CircuitDoc,
    pub observable: String,
    pub sign: i8,
}
