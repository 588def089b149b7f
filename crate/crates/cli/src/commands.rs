use std::collections::BTreeMap;
use std::io::{StdoutLock, Write};
use std::path::Path;
use std::time::Instant;

use cliffpert::analysis::order_bound_table;
use cliffpert::compile::{compile_with, CompileOptions};
use cliffpert::models::{
    generate_e3lin2, generate_layered_clifford, instance_max_nonzero_order, qaoa_cost, E3Lin2Instance,
    LayeredCliffordSpec,
};
use cliffpert::noise::noise_from_json_str;
use cliffpert::oracle::{density_matrix_expectation, statevector_expectation};
use cliffpert::propagate::{lightcone_filter, lightcone_filter_with_noise, propagate, propagate_with_noise};
use cliffpert::{Circuit, Error, NoiseSpec, OrderReport, PauliString, PropagationConfig};
use serde_json::json;

use crate::{CliError, CompileArgs, EngineArgs, ExpvalArgs, LayersArgs, OracleArgs, OrderboundArgs, QaoaArgs, QaoaOrdersArgs};

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn stdout_err(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    Ok(Circuit::from_json_str(&read(path)?)?)
}

fn load_noise(path: Option<&Path>) -> Result<Vec<NoiseSpec>> {
    match path {
        Some(p) => Ok(noise_from_json_str(&read(p)?)?),
        None => Ok(Vec::new()),
    }
}

/// `ZIZ` is read position by position; `Z1Z3` uses 1-based qubit labels.
pub fn parse_observable(text: &str, n: usize) -> Result<PauliString> {
    if text.chars().any(|c| c.is_ascii_digit()) {
        return Ok(PauliString::parse_labeled(text, n)?);
    }
    let p: PauliString = text.trim().parse()?;
    if p.n() != n {
        return Err(Error::Dimension { expected: n, found: p.n() }.into());
    }
    Ok(p)
}

fn config(engine: &EngineArgs, max_order: usize) -> Result<PropagationConfig> {
    if engine.coeff_threshold.is_nan() || engine.coeff_threshold < 0.0 {
        return Err(CliError::Usage("--coeff-threshold must be non-negative".into()));
    }
    if engine.coeff_threshold > 0.0 {
        eprintln!("warning: --coeff-threshold drops small terms; reported orders are approximate");
    }
    Ok(PropagationConfig {
        max_order,
        max_terms: engine.max_terms,
        coeff_threshold: engine.coeff_threshold,
        ..PropagationConfig::default()
    })
}

/// Shortest round-trip form, switching to exponent notation outside
/// [1e-5, 1e16) so tiny or huge values stay compact.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// CSV writer on stdout, preceded by a `# ...` parameter line.
fn csv_out(comment: &str) -> Result<csv::Writer<StdoutLock<'static>>> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "# {comment}").map_err(stdout_err)?;
    Ok(csv::Writer::from_writer(out))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| stdout_err(e.into()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(stdout_err)
}

pub fn compile(a: &CompileArgs) -> Result<()> {
    let circuit = load_circuit(&a.circuit)?;
    let obs = parse_observable(&a.observable, circuit.n())?;
    let prog = compile_with(&circuit, &obs, CompileOptions { angle_transform: !a.no_angle_transform })?;
    let doc = prog.to_doc();
    match &a.out {
        Some(path) => {
            let text = serde_json::to_string_pretty(&doc).map_err(|e| stdout_err(e.into()))?;
            std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => print_json(&doc),
    }
}

fn report_rows(w: &mut csv::Writer<StdoutLock<'static>>, rep: &OrderReport) -> Result<()> {
    w.write_record(["k", "per_order", "cumulative", "terms_per_order", "cumulative_terms"])?;
    for k in 0..rep.per_order_value.len() {
        w.write_record([
            k.to_string(),
            num(rep.per_order_value[k]),
            num(rep.cumulative_value[k]),
            rep.per_order_term_count[k].to_string(),
            rep.cumulative_term_count[k].to_string(),
        ])?;
    }
    w.flush().map_err(stdout_err)
}

pub fn expval(a: &ExpvalArgs) -> Result<()> {
    let circuit = load_circuit(&a.circuit)?;
    let obs = parse_observable(&a.observable, circuit.n())?;
    let noise = load_noise(a.noise.as_deref())?;
    let mut prog = compile_with(&circuit, &obs, CompileOptions { angle_transform: !a.no_angle_transform })?;
    let mut noise = noise;
    if !a.no_lightcone {
        let (p, nz) = lightcone_filter_with_noise(&prog, &noise);
        prog = p;
        noise = nz;
    }
    let mut cfg = config(&a.engine, a.order.as_usize())?;
    cfg.max_damping_order = a.max_damping_order;
    let rep = propagate_with_noise(&prog, &noise, &cfg)?.report();
    if a.csv {
        let mut w = csv_out(&format!(
            "observable={} order={} rotations={} channels={}",
            a.observable,
            a.order,
            prog.rotations.len(),
            noise.len()
        ))?;
        report_rows(&mut w, &rep)
    } else {
        print_json(&rep.to_doc())
    }
}

/// `½ Σ d ⟨Z Z Z⟩^(k)` from per-term reports computed at a higher order.
fn cost_at(instance: &E3Lin2Instance, reports: &[OrderReport], k: usize) -> f64 {
    reports.iter().zip(&instance.clauses).fold(0.0, |acc, (r, c)| {
        let cum = &r.cumulative_value;
        acc + 0.5 * f64::from(c.d) * cum[k.min(cum.len() - 1)]
    })
}

pub fn qaoa(a: &QaoaArgs) -> Result<()> {
    let instance = match &a.instance {
        Some(p) => E3Lin2Instance::from_json_str(&read(p)?)?,
        None => generate_e3lin2(a.n, a.d, a.seed)?,
    };
    let kmax = a.order.iter().map(|o| o.as_usize()).max().unwrap_or(usize::MAX);
    let mut w = csv_out(&format!(
        "seed={} n={} D={} beta={} clauses={}",
        instance.seed,
        instance.n,
        instance.d,
        a.beta,
        instance.clauses.len()
    ))?;
    let mut header = vec!["gamma".to_string()];
    header.extend(a.order.iter().map(|o| format!("cost_{o}")));
    if a.timing {
        header.push("seconds".into());
    }
    w.write_record(&header)?;
    for &gamma in &a.gamma_grid.0 {
        let start = Instant::now();
        let (_, reports) = qaoa_cost(&instance, gamma, a.beta, kmax)?;
        let mut row = vec![num(gamma)];
        row.extend(a.order.iter().map(|o| num(cost_at(&instance, &reports, o.as_usize()))));
        if a.timing {
            row.push(format!("{:.3}", start.elapsed().as_secs_f64()));
        }
        w.write_record(&row)?;
        w.flush().map_err(stdout_err)?;
    }
    Ok(())
}

pub fn qaoa_orders(a: &QaoaOrdersArgs) -> Result<()> {
    let mut w = csv_out(&format!("seed={} n={} runs={}", a.seed, a.n, a.runs))?;
    w.write_record(["D", "max_order", "count"])?;
    for &d in &a.d {
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for i in 0..a.runs {
            let inst = generate_e3lin2(a.n, d, a.seed.wrapping_add(i))?;
            *hist.entry(instance_max_nonzero_order(&inst)?).or_default() += 1;
        }
        for (order, count) in hist {
            w.write_record([d.to_string(), order.to_string(), count.to_string()])?;
        }
    }
    w.flush().map_err(stdout_err)
}

pub fn layers(a: &LayersArgs) -> Result<()> {
    let obs = parse_observable(&a.observable, a.n)?;
    let kmax = a.order_grid.iter().copied().max().unwrap_or(0);
    let cfg = config(&a.engine, kmax)?;
    let exact_cfg = PropagationConfig {
        max_terms: a.reference_max_terms,
        ..PropagationConfig::exact()
    };
    let mut w = csv_out(&format!(
        "seed={} runs={} n={} p={} observable={} angle_transform={}",
        a.seed, a.runs, a.n, a.p, a.observable, !a.no_angle_transform
    ))?;
    w.write_record([
        "seed",
        "dtheta",
        "k",
        "expval",
        "reference",
        "abs_error",
        "terms_per_order",
        "cumulative_terms",
    ])?;
    for seed in (0..a.runs).map(|i| a.seed.wrapping_add(i)) {
        for &dtheta in &a.dtheta_grid.0 {
            let spec = LayeredCliffordSpec { n: a.n, p: a.p, seed, delta_theta: dtheta };
            let circuit = generate_layered_clifford(&spec)?;
            let prog = compile_with(&circuit, &obs, CompileOptions { angle_transform: !a.no_angle_transform })?;
            let prog = lightcone_filter(&prog);
            let rep = propagate(&prog, &cfg)?.report();
            let reference = match a.reference.as_str() {
                "exact" => match propagate(&prog, &exact_cfg) {
                    Ok(r) => Some(r.expectation()),
                    Err(Error::TermLimit { .. }) => {
                        eprintln!("warning: seed {seed} dtheta {dtheta}: exact reference exceeds --reference-max-terms");
                        None
                    }
                    Err(e) => return Err(e.into()),
                },
                _ => None,
            };
            let last = rep.cumulative_value.len() - 1;
            for &k in &a.order_grid {
                let value = rep.cumulative_value[k.min(last)];
                let per_order_terms = rep.per_order_term_count.get(k).copied().unwrap_or(0);
                w.write_record([
                    seed.to_string(),
                    num(dtheta),
                    k.to_string(),
                    num(value),
                    reference.map(num).unwrap_or_default(),
                    reference.map(|r| num((value - r).abs())).unwrap_or_default(),
                    per_order_terms.to_string(),
                    rep.cumulative_term_count[k.min(last)].to_string(),
                ])?;
            }
            w.flush().map_err(stdout_err)?;
        }
    }
    Ok(())
}

pub fn orderbound(a: &OrderboundArgs) -> Result<()> {
    if !a.theta.is_finite() {
        return Err(Error::NonFiniteAngle(a.theta).into());
    }
    if let Some(d) = a.delta_list.iter().find(|d| d.is_nan() || **d <= 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {d}")).into());
    }
    let mut w = csv_out(&format!("theta={}", a.theta))?;
    let mut header = vec!["n".to_string()];
    header.extend(a.delta_list.iter().map(|d| format!("kmin_delta_{d}")));
    header.extend(a.delta_list.iter().map(|d| format!("m_cumulative_delta_{d}")));
    w.write_record(&header)?;
    for row in order_bound_table(a.n_range.0.iter().copied(), a.theta, &a.delta_list) {
        let mut rec = vec![row.n.to_string()];
        rec.extend(row.k_min.iter().map(ToString::to_string));
        rec.extend(row.cumulative_m.iter().map(|&m| num(m)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(stdout_err)
}

pub fn oracle(a: &OracleArgs) -> Result<()> {
    let circuit = load_circuit(&a.circuit)?;
    let obs = parse_observable(&a.observable, circuit.n())?;
    let (value, method) = match &a.noise {
        None => (statevector_expectation(&circuit, &obs)?, "statevector"),
        Some(path) => {
            let noise = load_noise(Some(path))?;
            // noise locations refer to the compiled program, so simulate that
            let prog = compile_with(&circuit, &obs, CompileOptions::default())?;
            for s in &noise {
                s.validate(prog.n)?;
                if s.after > prog.rotations.len() {
                    return Err(Error::NoiseLocation {
                        after: s.after,
                        rotations: prog.rotations.len(),
                    }
                    .into());
                }
            }
            let (pc, pobs, sign) = prog.to_circuit();
            let v = f64::from(sign) * density_matrix_expectation(&pc, &noise, &pobs)?;
            (v, "density_matrix")
        }
    };
    print_json(&json!({"expval": value, "method": method}))
}
