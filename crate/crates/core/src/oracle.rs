//! Brute-force references: dense matrices, statevector and density-matrix
//! simulation for small qubit counts.
//!
//! Basis index bit `q` is the computational value of qubit `q`. None of this
//! code uses the bitmask algebra of [`crate::pauli`]; Pauli factors are applied
//! qubit by qubit from their 2×2 definitions.

use num_complex::Complex64;

use crate::circuit::{Circuit, CliffordGate, Gate};
use crate::error::{Error, Result};
use crate::noise::{Channel, NoiseSpec};
use crate::pauli::{Pauli, PauliString};

pub const STATEVECTOR_MAX_QUBITS: usize = 12;
pub const DENSITY_MATRIX_MAX_QUBITS: usize = 6;

type C = Complex64;
type Mat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn pauli_2x2(op: Pauli) -> Mat2 {
    match op {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

fn clifford_1q(g: &CliffordGate) -> Option<(usize, Mat2)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = match *g {
        CliffordGate::H(q) => (q, [[C::new(h, 0.0), C::new(h, 0.0)], [C::new(h, 0.0), C::new(-h, 0.0)]]),
        CliffordGate::S(q) => (q, [[ONE, ZERO], [ZERO, I]]),
        CliffordGate::Sdg(q) => (q, [[ONE, ZERO], [ZERO, -I]]),
        CliffordGate::X(q) => (q, pauli_2x2(Pauli::X)),
        CliffordGate::Y(q) => (q, pauli_2x2(Pauli::Y)),
        CliffordGate::Z(q) => (q, pauli_2x2(Pauli::Z)),
        _ => return None,
    };
    Some(m)
}

fn apply_1q(amps: &mut [C], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let a0 = amps[base];
        let a1 = amps[base | stride];
        amps[base] = m[0][0] * a0 + m[0][1] * a1;
        amps[base | stride] = m[1][0] * a0 + m[1][1] * a1;
    }
}

fn apply_clifford(amps: &mut [C], g: &CliffordGate) {
    if let Some((q, m)) = clifford_1q(g) {
        apply_1q(amps, q, &m);
        return;
    }
    match *g {
        CliffordGate::CX(c, t) => {
            let (mc, mt) = (1usize << c, 1usize << t);
            for b in 0..amps.len() {
                if b & mc != 0 && b & mt == 0 {
                    amps.swap(b, b | mt);
                }
            }
        }
        CliffordGate::CZ(a, b2) => {
            let m = (1usize << a) | (1usize << b2);
            for (b, amp) in amps.iter_mut().enumerate() {
                if b & m == m {
                    *amp = -*amp;
                }
            }
        }
        CliffordGate::Swap(a, b2) => {
            let (ma, mb) = (1usize << a, 1usize << b2);
            for b in 0..amps.len() {
                if b & ma != 0 && b & mb == 0 {
                    amps.swap(b, (b & !ma) | mb);
                }
            }
        }
        _ => unreachable!(),
    }
}

/// `P|ψ⟩`, applying each factor from its 2×2 matrix.
fn apply_pauli(amps: &[C], p: &PauliString) -> Vec<C> {
    let mut out = vec![ZERO; amps.len()];
    let factors: Vec<(usize, Pauli)> = (0..p.n())
        .map(|q| (q, p.get(q)))
        .filter(|(_, op)| *op != Pauli::I)
        .collect();
    for (b, &a) in amps.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        let mut target = b;
        let mut coeff = a;
        for &(q, op) in &factors {
            let bit = (b >> q) & 1;
            let m = pauli_2x2(op);
            // column `bit` of the 2×2 has a single non-zero entry
            let row = if m[0][bit] != ZERO { 0 } else { 1 };
            coeff *= m[row][bit];
            target = (target & !(1 << q)) | (row << q);
        }
        out[target] += coeff;
    }
    out
}

fn apply_rotation(amps: &mut [C], axis: &PauliString, theta: f64) {
    let pa = apply_pauli(amps, axis);
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    for (a, p) in amps.iter_mut().zip(pa) {
        *a = *a * c - I * s * p;
    }
}

fn apply_gate(amps: &mut [C], g: &Gate) {
    match g {
        Gate::Clifford(c) => apply_clifford(amps, c),
        Gate::Rotation { axis, theta } => apply_rotation(amps, axis, *theta),
    }
}

fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_observable(circuit: &Circuit, observable: &PauliString) -> Result<()> {
    if observable.n() != circuit.n() {
        return Err(Error::Dimension {
            expected: circuit.n(),
            found: observable.n(),
        });
    }
    Ok(())
}

/// `⟨0|U† O U|0⟩` by direct statevector simulation.
pub fn statevector_expectation(circuit: &Circuit, observable: &PauliString) -> Result<f64> {
    check_observable(circuit, observable)?;
    let n = circuit.n();
    if n > STATEVECTOR_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            what: "statevector oracle",
            n,
            max: STATEVECTOR_MAX_QUBITS,
        });
    }
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    for g in circuit.gates() {
        apply_gate(&mut amps, g);
    }
    let val = inner(&amps, &apply_pauli(&amps, observable));
    debug_assert!(val.im.abs() < 1e-12, "imaginary residue {}", val.im);
    Ok(val.re)
}

fn kraus(channel: &Channel) -> Vec<Mat2> {
    let r = |v: f64| C::new(v, 0.0);
    match *channel {
        Channel::Pauli { sx, sy, sz } => {
            let s0 = (1.0 - sx - sy - sz).max(0.0);
            [(s0, Pauli::I), (sx, Pauli::X), (sy, Pauli::Y), (sz, Pauli::Z)]
                .into_iter()
                .map(|(p, op)| {
                    let m = pauli_2x2(op);
                    let f = r(p.sqrt());
                    [[m[0][0] * f, m[0][1] * f], [m[1][0] * f, m[1][1] * f]]
                })
                .collect()
        }
        // Standard Kraus form ρ ↦ Σ E ρ E†; |1⟩ decays to |0⟩.
        Channel::AmplitudeDamping { lambda } => vec![
            [[ONE, ZERO], [ZERO, r((1.0 - lambda).sqrt())]],
            [[ZERO, r(lambda.sqrt())], [ZERO, ZERO]],
        ],
        Channel::PhaseDamping { lambda } => vec![
            [[ONE, ZERO], [ZERO, r((1.0 - lambda).sqrt())]],
            [[ZERO, ZERO], [ZERO, r(lambda.sqrt())]],
        ],
    }
}

/// Row-major density matrix.
struct Density {
    dim: usize,
    data: Vec<C>,
}

impl Density {
    /// ρ ↦ A ρ A† for a linear map `A` given by its action on vectors.
    fn conjugate_with(&self, apply: &dyn Fn(&mut [C])) -> Vec<C> {
        let d = self.dim;
        let mut out = self.data.clone();
        // columns: A ρ
        let mut col = vec![ZERO; d];
        for j in 0..d {
            for i in 0..d {
                col[i] = out[i * d + j];
            }
            apply(&mut col);
            for i in 0..d {
                out[i * d + j] = col[i];
            }
        }
        // rows: (A ρ) A† = conj(A conj(row))
        for i in 0..d {
            let row = &mut out[i * d..(i + 1) * d];
            for v in row.iter_mut() {
                *v = v.conj();
            }
            apply(row);
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        out
    }

    fn apply_unitary(&mut self, g: &Gate) {
        self.data = self.conjugate_with(&|v: &mut [C]| apply_gate(v, g));
    }

    fn apply_channel(&mut self, q: usize, channel: &Channel) {
        let mut acc = vec![ZERO; self.data.len()];
        for e in kraus(channel) {
            let term = self.conjugate_with(&|v: &mut [C]| apply_1q(v, q, &e));
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
        }
        self.data = acc;
    }

    fn expectation(&self, p: &PauliString) -> C {
        // Tr(ρ P) = Σ_j (ρ P)_{jj} = Σ_j Σ_i ρ_{ji} P_{ij}; P e_i is column i of P.
        let d = self.dim;
        let mut tr = ZERO;
        let mut e = vec![ZERO; d];
        for i in 0..d {
            e.iter_mut().for_each(|v| *v = ZERO);
            e[i] = ONE;
            let col = apply_pauli(&e, p);
            for (j, pj) in col.iter().enumerate() {
                if *pj != ZERO {
                    tr += self.data[i * d + j] * pj;
                }
            }
        }
        tr
    }
}

/// `Tr(ρ O)` for the noisy circuit. A channel with `after = j` acts on the
/// state once all but the last `j` gates have been applied, so `j` counts
/// gates back from the measurement. Channels sharing a location act on the
/// observable in listed order, i.e. on the state in reverse listed order.
pub fn density_matrix_expectation(
    circuit: &Circuit,
    noise: &[NoiseSpec],
    observable: &PauliString,
) -> Result<f64> {
    check_observable(circuit, observable)?;
    let n = circuit.n();
    if n > DENSITY_MATRIX_MAX_QUBITS {
        return Err(Error::TooManyQubits {
            what: "density-matrix oracle",
            n,
            max: DENSITY_MATRIX_MAX_QUBITS,
        });
    }
    let g = circuit.len();
    for spec in noise {
        spec.validate(n)?;
        if spec.after > g {
            return Err(Error::NoiseLocation {
                after: spec.after,
                rotations: g,
            });
        }
    }
    let dim = 1usize << n;
    let mut rho = Density {
        dim,
        data: vec![ZERO; dim * dim],
    };
    rho.data[0] = ONE;
    let channels_at = |applied: usize, rho: &mut Density| {
        for spec in noise.iter().rev().filter(|s| g - s.after == applied) {
            rho.apply_channel(spec.qubit, &spec.channel);
        }
    };
    channels_at(0, &mut rho);
    for (i, gate) in circuit.gates().iter().enumerate() {
        rho.apply_unitary(gate);
        channels_at(i + 1, &mut rho);
    }
    let val = rho.expectation(observable);
    debug_assert!(val.im.abs() < 1e-12, "imaginary residue {}", val.im);
    Ok(val.re)
}

/// Dense `2^n × 2^n` matrices for cross-checking the bitmask algebra.
pub mod dense {
    use super::*;

    #[derive(Clone, Debug)]
    pub struct Matrix {
        pub dim: usize,
        pub data: Vec<C>,
    }

    impl Matrix {
        pub fn zeros(dim: usize) -> Self {
            Matrix {
                dim,
                data: vec![ZERO; dim * dim],
            }
        }

        pub fn get(&self, r: usize, c: usize) -> C {
            self.data[r * self.dim + c]
        }
    }

    /// Builds a matrix column by column from its action on basis vectors.
    fn from_action(n: usize, act: impl Fn(&mut [C])) -> Matrix {
        let dim = 1 << n;
        let mut m = Matrix::zeros(dim);
        let mut v = vec![ZERO; dim];
        for c in 0..dim {
            v.iter_mut().for_each(|x| *x = ZERO);
            v[c] = ONE;
            act(&mut v);
            for r in 0..dim {
                m.data[r * dim + c] = v[r];
            }
        }
        m
    }

    /// Kronecker product of the single-qubit factors.
    pub fn pauli_matrix(p: &PauliString) -> Matrix {
        let n = p.n();
        let dim = 1 << n;
        let mut m = Matrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                let mut v = ONE;
                for q in 0..n {
                    v *= pauli_2x2(p.get(q))[(r >> q) & 1][(c >> q) & 1];
                }
                m.data[r * dim + c] = v;
            }
        }
        m
    }

    /// `exp(-i θ P / 2) = cos(θ/2) I - i sin(θ/2) P`.
    pub fn rotation_matrix(axis: &PauliString, theta: f64) -> Matrix {
        let p = pauli_matrix(axis);
        let mut m = scale(&p, (0.0, -(theta / 2.0).sin()));
        for d in 0..m.dim {
            m.data[d * m.dim + d] += C::new((theta / 2.0).cos(), 0.0);
        }
        m
    }

    pub fn clifford_matrix(g: &CliffordGate, n: usize) -> Matrix {
        from_action(n, |v| apply_clifford(v, g))
    }

    pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let d = a.dim;
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = a.data[i * d + k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..d {
                    m.data[i * d + j] += aik * b.data[k * d + j];
                }
            }
        }
        m
    }

    pub fn dagger(a: &Matrix) -> Matrix {
        let d = a.dim;
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.data[j * d + i] = a.data[i * d + j].conj();
            }
        }
        m
    }

    pub fn scale(a: &Matrix, (re, im): (f64, f64)) -> Matrix {
        let f = C::new(re, im);
        Matrix {
            dim: a.dim,
            data: a.data.iter().map(|v| v * f).collect(),
        }
    }

    pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix {
            dim: a.dim,
            data: a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix {
            dim: a.dim,
            data: a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn max_abs(a: &Matrix) -> f64 {
        a.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
        max_abs(&sub(a, b))
    }

    /// `⟨0…0|M|0…0⟩` as `(re, im)`.
    pub fn vacuum_expectation(m: &Matrix) -> (f64, f64) {
        (m.data[0].re, m.data[0].im)
    }
}
