use std::collections::HashSet;
use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CliffordGate};
use crate::compile::{compile_many, CompileOptions, InteractionPictureProgram};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::propagate::{lightcone_filter, propagate, OrderReport, PropagationConfig};

const MAX_ATTEMPTS: usize = 1000;
const TRIPLE_RETRIES: usize = 64;

/// `|E^(k)|` above this counts as a non-zero contribution.
pub const NONZERO_TOLERANCE: f64 = 1e-14;
/// Generic angle used when probing which orders contribute.
pub const MAX_ORDER_PROBE_GAMMA: f64 = 0.3;

/// Clause `(u, v, w, d)` with `u < v < w` and `d = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 4]", into = "[i64; 4]")]
pub struct Clause {
    pub vars: [usize; 3],
    pub d: i8,
}

impl From<[i64; 4]> for Clause {
    fn from(v: [i64; 4]) -> Self {
        Clause {
            vars: [v[0] as usize, v[1] as usize, v[2] as usize],
            d: v[3] as i8,
        }
    }
}

impl From<Clause> for [i64; 4] {
    fn from(c: Clause) -> Self {
        [c.vars[0] as i64, c.vars[1] as i64, c.vars[2] as i64, i64::from(c.d)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E3Lin2Instance {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub seed: u64,
    pub clauses: Vec<Clause>,
}

impl E3Lin2Instance {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for c in &self.clauses {
            for &v in &c.vars {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (i, c) in self.clauses.iter().enumerate() {
            let [u, v, w] = c.vars;
            if !(u < v && v < w && w < self.n) {
                return Err(Error::InvalidModel(format!("clauses[{i}]: variables must satisfy u < v < w < n")));
            }
            if c.d != 1 && c.d != -1 {
                return Err(Error::InvalidModel(format!("clauses[{i}]: d must be +1 or -1")));
            }
            if !seen.insert(c.vars) {
                return Err(Error::InvalidModel(format!("clauses[{i}]: duplicate triple")));
            }
        }
        if let Some(v) = self.degrees().iter().position(|&g| g > self.d) {
            return Err(Error::InvalidModel(format!("variable {v} occurs in more than D={} clauses", self.d)));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let inst: E3Lin2Instance = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Random instance with `⌊nD/3⌋` distinct clauses and every variable in at
/// most `D` of them.
pub fn generate_e3lin2(n: usize, d: usize, seed: u64) -> Result<E3Lin2Instance> {
    if n < 3 {
        return Err(Error::InvalidModel(format!("need at least 3 variables, got {n}")));
    }
    if d == 0 {
        return Err(Error::InvalidModel("D must be at least 1".into()));
    }
    let target = n * d / 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut budget = vec![d; n];
        let mut used = HashSet::with_capacity(target);
        let mut clauses = Vec::with_capacity(target);
        while clauses.len() < target {
            let mut found = None;
            for _ in 0..TRIPLE_RETRIES {
                match sample_triple(&budget, &mut rng) {
                    Some(t) if !used.contains(&t) => {
                        found = Some(t);
                        break;
                    }
                    Some(_) => continue,
                    None => continue 'attempt,
                }
            }
            let Some(t) = found else { continue 'attempt };
            for &v in &t {
                budget[v] -= 1;
            }
            used.insert(t);
            let sign = if rng.gen::<bool>() { 1 } else { -1 };
            clauses.push(Clause { vars: t, d: sign });
        }
        return Ok(E3Lin2Instance { n, d, seed, clauses });
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: format!("no degree-{d} clause set with {target} distinct triples found for n={n}"),
    })
}

/// Three distinct variables drawn without replacement, weighted by remaining
/// budget; `None` when fewer than three have budget left.
fn sample_triple(budget: &[usize], rng: &mut ChaCha8Rng) -> Option<[usize; 3]> {
    let mut w: Vec<usize> = budget.to_vec();
    let mut out = [0usize; 3];
    for slot in out.iter_mut() {
        let total: usize = w.iter().sum();
        if total == 0 {
            return None;
        }
        let mut r = rng.gen_range(0..total);
        let mut pick = 0;
        for (i, &wi) in w.iter().enumerate() {
            if r < wi {
                pick = i;
                break;
            }
            r -= wi;
        }
        *slot = pick;
        w[pick] = 0;
    }
    out.sort_unstable();
    Some(out)
}

/// A cost term `½ d ⟨Z_u Z_v Z_w⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaTerm {
    pub observable: PauliString,
    pub d: i8,
}

/// Depth-one QAOA state preparation: Hadamards, one `Z_u Z_v Z_w` rotation of
/// angle `γ d` per clause, then `X` rotations of angle `2β` on every qubit.
pub fn build_qaoa_circuit(instance: &E3Lin2Instance, gamma: f64, beta: f64) -> Result<(Circuit, Vec<QaoaTerm>)> {
    let n = instance.n;
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.clifford(CliffordGate::H(q))?;
    }
    let mut terms = Vec::with_capacity(instance.clauses.len());
    for cl in &instance.clauses {
        let zzz = PauliString::from_sparse(n, &cl.vars.map(|v| (v, Pauli::Z)))?;
        c.rotation(zzz.clone(), gamma * f64::from(cl.d))?;
        terms.push(QaoaTerm { observable: zzz, d: cl.d });
    }
    for q in 0..n {
        c.rotation(PauliString::from_sparse(n, &[(q, Pauli::X)])?, 2.0 * beta)?;
    }
    Ok((c, terms))
}

/// Light-cone-filtered programs, one per cost term.
pub fn qaoa_programs(
    instance: &E3Lin2Instance,
    gamma: f64,
    beta: f64,
) -> Result<(Vec<InteractionPictureProgram>, Vec<QaoaTerm>)> {
    let (circuit, terms) = build_qaoa_circuit(instance, gamma, beta)?;
    let obs: Vec<PauliString> = terms.iter().map(|t| t.observable.clone()).collect();
    let programs = compile_many(&circuit, &obs, CompileOptions::default())?;
    Ok((programs.iter().map(lightcone_filter).collect(), terms))
}

/// `½ Σ d ⟨Z_u Z_v Z_w⟩^(K)` with the per-term reports in clause order.
pub fn qaoa_cost(
    instance: &E3Lin2Instance,
    gamma: f64,
    beta: f64,
    max_order: usize,
) -> Result<(f64, Vec<OrderReport>)> {
    let (programs, terms) = qaoa_programs(instance, gamma, beta)?;
    let config = PropagationConfig::with_order(max_order);
    let results: Vec<Result<(f64, OrderReport)>> = programs
        .par_iter()
        .map(|p| propagate(p, &config).map(|r| r.sum.expectation()))
        .collect();
    let mut value = 0.0;
    let mut reports = Vec::with_capacity(results.len());
    for (r, t) in results.into_iter().zip(&terms) {
        let (v, rep) = r?;
        value += 0.5 * f64::from(t.d) * v;
        reports.push(rep);
    }
    Ok((value, reports))
}

/// Highest order with a non-zero contribution to term `term` at angles
/// `(γ, β)`, or 0 when no order contributes.
pub fn max_nonzero_order_at(instance: &E3Lin2Instance, term: usize, gamma: f64, beta: f64) -> Result<usize> {
    let (circuit, terms) = build_qaoa_circuit(instance, gamma, beta)?;
    let t = terms
        .get(term)
        .ok_or_else(|| Error::InvalidArgument(format!("term {term} out of range ({} terms)", terms.len())))?;
    let prog = lightcone_filter(&compile_many(&circuit, std::slice::from_ref(&t.observable), CompileOptions::default())?[0]);
    let rep = propagate(&prog, &PropagationConfig::default())?.report();
    Ok(rep.max_nonzero_order(NONZERO_TOLERANCE).unwrap_or(0))
}

/// [`max_nonzero_order_at`] with `γ` = [`MAX_ORDER_PROBE_GAMMA`] and `β = π/4`.
pub fn max_nonzero_order(instance: &E3Lin2Instance, term: usize) -> Result<usize> {
    max_nonzero_order_at(instance, term, MAX_ORDER_PROBE_GAMMA, FRAC_PI_4)
}

/// Largest [`max_nonzero_order`] over all terms of the instance.
pub fn instance_max_nonzero_order(instance: &E3Lin2Instance) -> Result<usize> {
    let (programs, _) = qaoa_programs(instance, MAX_ORDER_PROBE_GAMMA, FRAC_PI_4)?;
    let orders: Vec<Result<usize>> = programs
        .par_iter()
        .map(|p| {
            let rep = propagate(p, &PropagationConfig::default())?.report();
            Ok(rep.max_nonzero_order(NONZERO_TOLERANCE).unwrap_or(0))
        })
        .collect();
    orders.into_iter().try_fold(0, |m, o| Ok(m.max(o?)))
}
