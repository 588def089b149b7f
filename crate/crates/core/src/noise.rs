//! Heisenberg-picture noise channels.
//!
//! Channels act on observables through the adjoint map `O ↦ Σ E† O E` of the
//! Kraus form `ρ ↦ Σ E ρ E†`. Pauli and phase-damping channels only rescale
//! coefficients; amplitude damping also branches `Z` into `I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagate::ObservableSum;

const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Pauli { sx: f64, sy: f64, sz: f64 },
    AmplitudeDamping { lambda: f64 },
    PhaseDamping { lambda: f64 },
}

impl Channel {
    pub fn bit_flip(s: f64) -> Self {
        Channel::Pauli { sx: s, sy: 0.0, sz: 0.0 }
    }

    pub fn phase_flip(s: f64) -> Self {
        Channel::Pauli { sx: 0.0, sy: 0.0, sz: s }
    }

    pub fn depolarizing(s: f64) -> Self {
        Channel::Pauli {
            sx: s / 3.0,
            sy: s / 3.0,
            sz: s / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Channel::Pauli { sx, sy, sz } => {
                let ok = [sx, sy, sz].iter().all(|s| s.is_finite() && *s >= 0.0)
                    && sx + sy + sz <= 1.0 + PROB_TOLERANCE;
                if !ok {
                    return Err(Error::InvalidNoise(format!(
                        "Pauli probabilities ({sx}, {sy}, {sz}) must be non-negative and sum to at most 1"
                    )));
                }
            }
            Channel::AmplitudeDamping { lambda } | Channel::PhaseDamping { lambda } => {
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::InvalidNoise(format!("lambda {lambda} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

/// `η` for a Pauli channel acting on each single-qubit factor `I, X, Y, Z`:
/// each error probability enters with `+` when the error commutes with the
/// factor and `-` otherwise.
pub fn pauli_scaling(sx: f64, sy: f64, sz: f64) -> [f64; 4] {
    let base = 1.0 - sx - sy - sz;
    [
        1.0,
        base + sx - sy - sz,
        base - sx + sy - sz,
        base - sx - sy + sz,
    ]
}

/// A channel on one qubit, placed in a compiled rotation list: it acts on the
/// observable once `after` rotations have been applied to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub channel: Channel,
    pub qubit: usize,
    pub after: usize,
}

impl NoiseSpec {
    pub fn new(channel: Channel, qubit: usize, after: usize) -> Self {
        NoiseSpec {
            channel,
            qubit,
            after,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.qubit >= n {
            return Err(Error::QubitOutOfRange { qubit: self.qubit, n });
        }
        self.channel.validate()
    }

    /// Applies the channel's adjoint to `sum`.
    pub fn apply(&self, sum: &mut ObservableSum) -> Result<()> {
        self.channel.validate()?;
        match self.channel {
            Channel::Pauli { sx, sy, sz } => apply_pauli_channel(sum, self.qubit, sx, sy, sz),
            Channel::AmplitudeDamping { lambda } => apply_amplitude_damping(sum, self.qubit, lambda),
            Channel::PhaseDamping { lambda } => apply_phase_damping(sum, self.qubit, lambda),
        }
    }
}

pub fn apply_pauli_channel(sum: &mut ObservableSum, qubit: usize, sx: f64, sy: f64, sz: f64) -> Result<()> {
    Channel::Pauli { sx, sy, sz }.validate()?;
    sum.scale_by_local_factor(qubit, pauli_scaling(sx, sy, sz))
}

/// `I ↦ I`, `X ↦ √(1-λ) X`, `Y ↦ √(1-λ) Y`, `Z ↦ (1-λ) Z + λ I`. The `λ I`
/// branch raises the term's damping order; see
/// [`ObservableSum::with_max_damping_order`].
pub fn apply_amplitude_damping(sum: &mut ObservableSum, qubit: usize, lambda: f64) -> Result<()> {
    Channel::AmplitudeDamping { lambda }.validate()?;
    sum.damp_amplitude(qubit, lambda)
}

/// `X, Y ↦ √(1-λ)·(X, Y)`; `I` and `Z` unchanged.
pub fn apply_phase_damping(sum: &mut ObservableSum, qubit: usize, lambda: f64) -> Result<()> {
    Channel::PhaseDamping { lambda }.validate()?;
    let r = (1.0 - lambda).sqrt();
    sum.scale_by_local_factor(qubit, [1.0, r, r, 1.0])
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NoiseDoc {
    Pauli {
        q: usize,
        #[serde(default)]
        sx: f64,
        #[serde(default)]
        sy: f64,
        #[serde(default)]
        sz: f64,
        after: usize,
    },
    AmplitudeDamping {
        q: usize,
        lambda: f64,
        after: usize,
    },
    PhaseDamping {
        q: usize,
        lambda: f64,
        after: usize,
    },
}

/// Parses a JSON array of channels such as
/// `[{"kind":"pauli","q":0,"sx":0.01,"sy":0,"sz":0,"after":3}]`.
pub fn noise_from_json_str(text: &str) -> Result<Vec<NoiseSpec>> {
    let docs: Vec<NoiseDoc> = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    docs.into_iter()
        .enumerate()
        .map(|(i, d)| {
            let spec = match d {
                NoiseDoc::Pauli { q, sx, sy, sz, after } => NoiseSpec::new(Channel::Pauli { sx, sy, sz }, q, after),
                NoiseDoc::AmplitudeDamping { q, lambda, after } => {
                    NoiseSpec::new(Channel::AmplitudeDamping { lambda }, q, after)
                }
                NoiseDoc::PhaseDamping { q, lambda, after } => {
                    NoiseSpec::new(Channel::PhaseDamping { lambda }, q, after)
                }
            };
            spec.channel
                .validate()
                .map_err(|e| Error::Schema(format!("noise[{i}]: {e}")))?;
            Ok(spec)
        })
        .collect()
}

pub fn noise_to_json(noise: &[NoiseSpec]) -> serde_json::Value {
    let docs: Vec<NoiseDoc> = noise
        .iter()
        .map(|s| match s.channel {
            Channel::Pauli { sx, sy, sz } => NoiseDoc::Pauli {
                q: s.qubit,
                sx,
                sy,
                sz,
                after: s.after,
            },
            Channel::AmplitudeDamping { lambda } => NoiseDoc::AmplitudeDamping {
                q: s.qubit,
                lambda,
                after: s.after,
            },
            Channel::PhaseDamping { lambda } => NoiseDoc::PhaseDamping {
                q: s.qubit,
                lambda,
                after: s.after,
            },
        })
        .collect();
    serde_json::to_value(docs).expect("plain data")
}
