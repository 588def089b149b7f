use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const BASE_ANGLES: [f64; 4] = [FRAC_PI_2, -FRAC_PI_2, PI, -PI];
const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Alternating layers of single-qubit rotations and two-qubit rotations on a
/// random perfect matching, every angle Clifford up to `delta_theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredCliffordSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    #[serde(default)]
    pub delta_theta: f64,
}

impl LayeredCliffordSpec {
    pub fn gate_count(&self) -> usize {
        self.p * (self.n + self.n / 2)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

pub fn generate_layered_clifford(spec: &LayeredCliffordSpec) -> Result<Circuit> {
    let n = spec.n;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!("layered circuits need an even, non-zero n, got {n}")));
    }
    if spec.p == 0 {
        return Err(Error::InvalidModel("p must be at least 1".into()));
    }
    if !spec.delta_theta.is_finite() {
        return Err(Error::NonFiniteAngle(spec.delta_theta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let angle = |rng: &mut ChaCha8Rng| BASE_ANGLES[rng.gen_range(0..4)] + spec.delta_theta;
    let mut c = Circuit::new(n);
    let mut qubits: Vec<usize> = (0..n).collect();
    for _ in 0..spec.p {
        for q in 0..n {
            let axis = PauliString::from_sparse(n, &[(q, AXES[rng.gen_range(0..3)])])?;
            let theta = angle(&mut rng);
            c.rotation(axis, theta)?;
        }
        qubits.shuffle(&mut rng);
        for pair in qubits.chunks_exact(2) {
            let a = AXES[rng.gen_range(0..3)];
            let b = AXES[rng.gen_range(0..3)];
            let axis = PauliString::from_sparse(n, &[(pair[0], a), (pair[1], b)])?;
            let theta = angle(&mut rng);
            c.rotation(axis, theta)?;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::propagate::{propagate, PropagationConfig};

    fn spec(n: usize, p: usize, seed: u64, dt: f64) -> LayeredCliffordSpec {
        LayeredCliffordSpec {
            n,
            p,
            seed,
            delta_theta: dt,
        }
    }

    #[test]
    fn gate_counts() {
        assert_eq!(generate_layered_clifford(&spec(50, 4, 1, 0.1)).unwrap().len(), 300);
        assert_eq!(generate_layered_clifford(&spec(100, 3, 1, 0.1)).unwrap().len(), 450);
        assert_eq!(spec(100, 3, 0, 0.0).gate_count(), 450);
    }

    #[test]
    fn two_qubit_layers_are_matchings() {
        let c = generate_layered_clifford(&spec(10, 2, 3, 0.0)).unwrap();
        for layer in c.gates().chunks(15) {
            let mut seen = [0; 10];
            for g in &layer[10..] {
                if let crate::circuit::Gate::Rotation { axis, .. } = g {
                    assert_eq!(axis.weight(), 2);
                    for q in axis.support() {
                        seen[q] += 1;
                    }
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
    }

    #[test]
    fn zero_error_is_pure_clifford() {
        let c = generate_layered_clifford(&spec(50, 4, 9, 0.0)).unwrap();
        let obs = PauliString::parse_labeled("Z1Z26", 50).unwrap();
        let prog = compile(&c, &obs).unwrap();
        assert!(prog.rotations.is_empty());
        let v = propagate(&prog, &PropagationConfig::default()).unwrap().expectation();
        assert!(v == 0.0 || v == 1.0 || v == -1.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_layered_clifford(&spec(5, 1, 0, 0.0)).is_err());
        assert!(generate_layered_clifford(&spec(4, 0, 0, 0.0)).is_err());
        assert!(generate_layered_clifford(&spec(4, 1, 0, f64::NAN)).is_err());
    }

    #[test]
    fn deterministic() {
        let a = generate_layered_clifford(&spec(8, 2, 4, 0.1)).unwrap();
        let b = generate_layered_clifford(&spec(8, 2, 4, 0.1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spec_json() {
        let s = LayeredCliffordSpec::from_json_str(r#"{"n":4,"p":2,"seed":3}"#).unwrap();
        assert_eq!(s, spec(4, 2, 3, 0.0));
    }
}
