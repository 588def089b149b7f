//! Heisenberg back-propagation with truncation in perturbation order.
//!
//! Each rotation either leaves a term alone (commuting axis) or rescales it by
//! `cos θ` and spawns a branch `± sin θ · (axis·σ)` one order higher. Branches
//! beyond the configured order `K` are never created, so the sum stays exact
//! up to and including order `K`.

mod lightcone;
mod packed;
mod sum;

use serde::{Deserialize, Serialize};

pub use lightcone::{lightcone_filter, lightcone_filter_with_noise};
pub use sum::{ObservableSum, Term};

use crate::compile::InteractionPictureProgram;
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;

/// Default cap on the number of live `(string, order)` keys.
pub const DEFAULT_MAX_TERMS: usize = 200_000_000;

/// Per-order contributions and term counts of a propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    /// `E^(k)` for `k = 0..=K`.
    pub per_order_value: Vec<f64>,
    /// Keys created at each order over the whole run.
    pub per_order_term_count: Vec<u64>,
    /// Partial sums `⟨O⟩^(k)`.
    pub cumulative_value: Vec<f64>,
    pub cumulative_term_count: Vec<u64>,
    pub total_terms_generated: u64,
}

impl OrderReport {
    pub(crate) fn new(per_order_value: Vec<f64>, per_order_term_count: Vec<u64>) -> Self {
        let mut acc = 0.0;
        let cumulative_value = per_order_value
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        let mut tacc = 0;
        let cumulative_term_count = per_order_term_count
            .iter()
            .map(|c| {
                tacc += c;
                tacc
            })
            .collect();
        OrderReport {
            per_order_value,
            per_order_term_count,
            cumulative_value,
            cumulative_term_count,
            total_terms_generated: tacc,
        }
    }

    /// `⟨O⟩^(K)` at the highest order of the run.
    pub fn expval(&self) -> f64 {
        self.cumulative_value.last().copied().unwrap_or(0.0)
    }

    /// Highest order with `|E^(k)| > tol`, if any.
    pub fn max_nonzero_order(&self, tol: f64) -> Option<usize> {
        self.per_order_value.iter().rposition(|v| v.abs() > tol)
    }

    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            expval: self.expval(),
            per_order: self.per_order_value.clone(),
            cumulative: self.cumulative_value.clone(),
            terms_per_order: self.per_order_term_count.clone(),
            total_terms: self.total_terms_generated,
        }
    }
}

/// JSON form of an [`OrderReport`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportDoc {
    pub expval: f64,
    pub per_order: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub terms_per_order: Vec<u64>,
    pub total_terms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    /// Truncation order `K`; clamped to the number of rotations.
    pub max_order: usize,
    pub max_terms: usize,
    /// `0.0` keeps every non-zero coefficient.
    pub coeff_threshold: f64,
    /// Cutoff on powers of the amplitude-damping `λ`; `None` is unbounded.
    pub max_damping_order: Option<usize>,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    /// Exact propagation without per-order bookkeeping: `max_order` is
    /// ignored and the report has a single entry.
    pub merge_orders: bool,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            max_order: usize::MAX,
            max_terms: DEFAULT_MAX_TERMS,
            coeff_threshold: 0.0,
            max_damping_order: None,
            threads: None,
            merge_orders: false,
        }
    }
}

impl PropagationConfig {
    pub fn with_order(max_order: usize) -> Self {
        PropagationConfig {
            max_order,
            ..Default::default()
        }
    }

    pub fn exact() -> Self {
        PropagationConfig {
            merge_orders: true,
            ..Default::default()
        }
    }
}

/// Result of propagating a program.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub sum: ObservableSum,
    /// Live term count after each rotation.
    pub gate_term_counts: Vec<usize>,
}

impl Propagation {
    pub fn report(&self) -> OrderReport {
        self.sum.expectation().1
    }

    pub fn expectation(&self) -> f64 {
        self.sum.expectation().0
    }
}

pub fn propagate(program: &InteractionPictureProgram, config: &PropagationConfig) -> Result<Propagation> {
    propagate_with_noise(program, &[], config)
}

/// Propagates the observable through the program, applying each channel once
/// `after` rotations have acted. Channels sharing a location are applied in
/// the listed order.
pub fn propagate_with_noise(
    program: &InteractionPictureProgram,
    noise: &[NoiseSpec],
    config: &PropagationConfig,
) -> Result<Propagation> {
    let run = || run_program(program, noise, config);
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }
}

fn run_program(
    program: &InteractionPictureProgram,
    noise: &[NoiseSpec],
    config: &PropagationConfig,
) -> Result<Propagation> {
    let rotations = &program.rotations;
    for spec in noise {
        spec.validate(program.n)?;
        if spec.after > rotations.len() {
            return Err(Error::NoiseLocation {
                after: spec.after,
                rotations: rotations.len(),
            });
        }
    }
    let k = if config.merge_orders {
        0
    } else {
        config.max_order.min(rotations.len())
    };
    let mut sum = ObservableSum::from_observable(&program.observable, f64::from(program.sign), k)
        .with_merged_orders(config.merge_orders)
        .with_coeff_threshold(config.coeff_threshold)
        .with_max_damping_order(config.max_damping_order);
    let mut gate_term_counts = Vec::with_capacity(rotations.len());
    let check = |sum: &ObservableSum, gate_index: usize| -> Result<()> {
        let terms = sum.len();
        if terms > config.max_terms {
            return Err(Error::TermLimit {
                gate_index,
                terms,
                limit: config.max_terms,
            });
        }
        Ok(())
    };
    for (i, rot) in rotations.iter().enumerate() {
        for spec in noise.iter().filter(|s| s.after == i) {
            spec.apply(&mut sum)?;
            check(&sum, i)?;
        }
        if program.angle_transformed {
            sum.apply_rotation(&rot.axis, rot.theta)?;
        } else {
            sum.apply_rotation_any_angle(&rot.axis, rot.theta)?;
        }
        check(&sum, i)?;
        gate_term_counts.push(sum.len());
    }
    for spec in noise.iter().filter(|s| s.after == rotations.len()) {
        spec.apply(&mut sum)?;
        check(&sum, rotations.len())?;
    }
    Ok(Propagation { sum, gate_term_counts })
}

/// `(value, report)` of a propagated sum.
pub fn expectation(sum: &ObservableSum) -> (f64, OrderReport) {
    sum.expectation()
}
