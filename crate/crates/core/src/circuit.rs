//! Circuit representation and exact Clifford conjugation of Pauli strings.
//!
//! Gates are stored in the order they act on the state. Conjugation always
//! means the Heisenberg pull-back `C† P C`. For example with `C = S` on one
//! qubit, `S† X S = -Y` and `S† Y S = X`; the opposite direction
//! `S X S† = Y` belongs to the Schrödinger picture and is never used here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{get_bit, set_bit, PauliString};

/// Named Clifford gates. Two-qubit gates list `(control, target)` for `CX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    pub fn name(&self) -> &'static str {
        match self {
            CliffordGate::H(_) => "h",
            CliffordGate::S(_) => "s",
            CliffordGate::Sdg(_) => "sdg",
            CliffordGate::X(_) => "x",
            CliffordGate::Y(_) => "y",
            CliffordGate::Z(_) => "z",
            CliffordGate::CX(..) => "cx",
            CliffordGate::CZ(..) => "cz",
            CliffordGate::Swap(..) => "swap",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => vec![q],
            CliffordGate::CX(a, b) | CliffordGate::CZ(a, b) | CliffordGate::Swap(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn from_name(name: &str, qubits: &[usize]) -> Result<Self> {
        let arity = |expected: usize| -> Result<()> {
            if qubits.len() != expected {
                return Err(Error::GateArity {
                    gate: name.to_string(),
                    expected,
                    found: qubits.len(),
                });
            }
            Ok(())
        };
        let g = match name {
            "h" | "s" | "sdg" | "x" | "y" | "z" => {
                arity(1)?;
                let q = qubits[0];
                match name {
                    "h" => CliffordGate::H(q),
                    "s" => CliffordGate::S(q),
                    "sdg" => CliffordGate::Sdg(q),
                    "x" => CliffordGate::X(q),
                    "y" => CliffordGate::Y(q),
                    _ => CliffordGate::Z(q),
                }
            }
            "cx" | "cz" | "swap" => {
                arity(2)?;
                let (a, b) = (qubits[0], qubits[1]);
                match name {
                    "cx" => CliffordGate::CX(a, b),
                    "cz" => CliffordGate::CZ(a, b),
                    _ => CliffordGate::Swap(a, b),
                }
            }
            other => return Err(Error::Schema(format!("unknown gate kind {other:?}"))),
        };
        Ok(g)
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::DuplicateQubit {
                gate: self.name().to_string(),
                qubit: qs[0],
            });
        }
        Ok(())
    }

    /// In-place `C† p C`; returns `true` when the result picks up a minus sign.
    ///
    /// The caller guarantees the gate qubits are in range.
    pub(crate) fn conjugate_in_place(&self, p: &mut PauliString) -> bool {
        let rd = |p: &PauliString, q: usize| (get_bit(p.x_words(), q), get_bit(p.z_words(), q));
        let wr = |p: &mut PauliString, q: usize, x: bool, z: bool| {
            set_bit(p.x_mut(), q, x);
            set_bit(p.z_mut(), q, z);
        };
        match *self {
            CliffordGate::H(q) => {
                let (x, z) = rd(p, q);
                wr(p, q, z, x);
                x && z
            }
            CliffordGate::S(q) => {
                let (x, z) = rd(p, q);
                wr(p, q, x, z ^ x);
                x && !z
            }
            CliffordGate::Sdg(q) => {
                let (x, z) = rd(p, q);
                wr(p, q, x, z ^ x);
                x && z
            }
            CliffordGate::X(q) => rd(p, q).1,
            CliffordGate::Y(q) => {
                let (x, z) = rd(p, q);
                x ^ z
            }
            CliffordGate::Z(q) => rd(p, q).0,
            CliffordGate::CX(c, t) => {
                let (xc, zc) = rd(p, c);
                let (xt, zt) = rd(p, t);
                wr(p, t, xt ^ xc, zt);
                wr(p, c, xc, zc ^ zt);
                xc && zt && !(xt ^ zc)
            }
            CliffordGate::CZ(a, b) => {
                let (xa, za) = rd(p, a);
                let (xb, zb) = rd(p, b);
                wr(p, a, xa, za ^ xb);
                wr(p, b, xb, zb ^ xa);
                xa && xb && (za ^ zb)
            }
            CliffordGate::Swap(a, b) => {
                let (xa, za) = rd(p, a);
                let (xb, zb) = rd(p, b);
                wr(p, a, xb, zb);
                wr(p, b, xa, za);
                false
            }
        }
    }
}

/// A gate in a circuit: a named Clifford or a Pauli rotation `exp(-i θ P / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Clifford(CliffordGate),
    Rotation { axis: PauliString, theta: f64 },
}

/// Ordered gate list over `n` qubits, in state (application) order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        match &gate {
            Gate::Clifford(g) => g.validate(self.n)?,
            Gate::Rotation { axis, theta } => {
                if axis.n() != self.n {
                    return Err(Error::Dimension {
                        expected: self.n,
                        found: axis.n(),
                    });
                }
                if axis.is_identity() {
                    return Err(Error::IdentityAxis);
                }
                if !theta.is_finite() {
                    return Err(Error::NonFiniteAngle(*theta));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn clifford(&mut self, g: CliffordGate) -> Result<()> {
        self.push(Gate::Clifford(g))
    }

    pub fn rotation(&mut self, axis: PauliString, theta: f64) -> Result<()> {
        self.push(Gate::Rotation { axis, theta })
    }

    pub fn rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rotation { .. }))
            .count()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        doc.into_circuit()
    }

    pub fn to_doc(&self) -> CircuitDoc {
        CircuitDoc {
            n: self.n,
            gates: self.gates.iter().map(GateDoc::from_gate).collect(),
        }
    }
}

/// `C† p C` for a named Clifford, as a signed Pauli string.
pub fn conjugate_by_clifford(p: &PauliString, g: &CliffordGate) -> Result<(PauliString, i8)> {
    g.validate(p.n())?;
    let mut out = p.clone();
    let neg = g.conjugate_in_place(&mut out);
    Ok((out, if neg { -1 } else { 1 }))
}

/// `U† p U` for the Clifford rotation `U = exp(-i k π axis / 4)`.
pub fn conjugate_by_pauli_rotation_clifford(
    p: &PauliString,
    axis: &PauliString,
    k: i64,
) -> Result<(PauliString, i8)> {
    if axis.is_identity() {
        return Err(Error::IdentityAxis);
    }
    if axis.n() != p.n() {
        return Err(Error::Dimension {
            expected: p.n(),
            found: axis.n(),
        });
    }
    let mut out = p.clone();
    let neg = rotation_clifford_in_place(&mut out, axis, k.rem_euclid(4) as u8);
    Ok((out, if neg { -1 } else { 1 }))
}

/// In-place form of [`conjugate_by_pauli_rotation_clifford`] with `k` already
/// reduced mod 4.
pub(crate) fn rotation_clifford_in_place(p: &mut PauliString, axis: &PauliString, k: u8) -> bool {
    if k == 0 || !p.anticommutes_unchecked(axis) {
        return false;
    }
    if k == 2 {
        return true;
    }
    // cos(kπ/2) p + i sin(kπ/2) axis·p with axis·p = i^e r, e odd.
    let (r, phase) = axis.multiply(p).expect("dimensions checked by caller");
    let e = phase.exponent();
    debug_assert!(e & 1 == 1);
    *p = r;
    let from_phase = e == 1; // i·i = -1
    let from_sin = k == 3;
    from_phase ^ from_sin
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CircuitDoc {
    pub n: usize,
    pub gates: Vec<GateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Position of the originating gate, set on compiled programs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
}

impl GateDoc {
    fn from_gate(g: &Gate) -> Self {
        match g {
            Gate::Clifford(c) => GateDoc {
                kind: c.name().to_string(),
                qubits: Some(c.qubits()),
                axis: None,
                theta: None,
                source: None,
            },
            Gate::Rotation { axis, theta } => GateDoc {
                kind: "rot".to_string(),
                qubits: None,
                axis: Some(axis.to_string()),
                theta: Some(*theta),
                source: None,
            },
        }
    }
}

impl CircuitDoc {
    pub fn into_circuit(self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n);
        for (i, g) in self.gates.into_iter().enumerate() {
            let at = |e: Error| Error::Schema(format!("gates[{i}]: {e}"));
            let gate = if g.kind == "rot" {
                let axis = g
                    .axis
                    .ok_or_else(|| Error::Schema(format!("gates[{i}].axis: missing")))?;
                let theta = g
                    .theta
                    .ok_or_else(|| Error::Schema(format!("gates[{i}].theta: missing")))?;
                let axis: PauliString = axis
                    .parse()
                    .map_err(|e| Error::Schema(format!("gates[{i}].axis: {e}")))?;
                Gate::Rotation { axis, theta }
            } else {
                let qubits = g
                    .qubits
                    .ok_or_else(|| Error::Schema(format!("gates[{i}].qubits: missing")))?;
                Gate::Clifford(CliffordGate::from_name(&g.kind, &qubits).map_err(at)?)
            };
            c.push(gate).map_err(at)?;
        }
        Ok(c)
    }
}
