use std::io::Read;

use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use slicer::anticonc::{levy_q, linear_form_atoms, sperner_bound, LinearFormSpec};
use slicer::cube::{construction, Configuration, Edge, EdgeRecord};
use slicer::decomp::{binary_decompose, DyadicScalar};
use slicer::error::{Error, Result};
use slicer::lab::{
    estimate_evasion, estimate_glue_sum, estimate_linf_tail, grid, local_search_slicing_with,
    random_unit_configuration, sweep, EstimateReport, SearchOptions,
};
use slicer::par::map_batches;
use slicer::sampler::{draw_mu, BiasParams, EvasiveSampler, SimpleBiasSampler};
use slicer::scalar::{f64_to_json, parse_rational, rational_to_json, Scalar};
use slicer::verifier::{edge_plane_tests, verify_slicing};
use slicer::{Arithmetic, RngSpec};

use crate::output::{sha256_hex, Output};
use crate::{
    Cli, Command, ConstructArgs, DecomposeArgs, Emit, EstimateArgs, Estimator, Format, QfuncArgs, SampleArgs,
    SearchArgs, SweepArgs, Variant, VerifyArgs,
};

/// Dimension above which `verify` prints a cost estimate first.
const VERIFY_NOTICE_DIM: usize = 24;

pub fn run(cli: &Cli) -> Result<Output> {
    let rng = RngSpec::new(cli.global.seed);
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Decompose(a) => decompose(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a, &rng),
        Command::Qfunc(a) => qfunc(a),
        Command::Estimate(a) => estimate(a, &rng),
        Command::Search(a) => search(a, &rng),
        Command::Sweep(a) => run_sweep(a, cli.global.seed),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn read_input(path: &str) -> Result<(String, (String, String))> {
    let mut bytes = Vec::new();
    if path == "-" {
        std::io::stdin().read_to_end(&mut bytes).map_err(|e| Error::Config(format!("stdin: {e}")))?;
    } else {
        bytes = std::fs::read(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    }
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    Ok((text, (path.to_string(), hash)))
}

fn load_config(path: &str) -> Result<(Configuration, (String, String))> {
    let (text, input) = read_input(path)?;
    Ok((Configuration::from_json_str(&text)?, input))
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(text: &str) -> Result<f64> {
    let x: f64 = text.parse().map_err(|_| Error::InvalidScalar(text.to_string()))?;
    if !x.is_finite() {
        return Err(Error::NonFiniteScalar(x));
    }
    Ok(x)
}

fn float_list(text: &str) -> Result<Vec<f64>> {
    split_list(text).map(parse_f64).collect()
}

fn rational_list(text: &str) -> Result<Vec<BigRational>> {
    split_list(text).map(parse_rational).collect()
}

fn csv_text<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn construct(a: &ConstructArgs) -> Result<Output> {
    let c = construction(a.kind.into(), a.n, a.arithmetic.into())?.with_mode(a.mode.into());
    Ok(Output::new(pretty(&c.to_json()), "config.json"))
}

fn decompose_json<T: DyadicScalar>(v: &[T], to_json: impl Fn(&T) -> Value) -> Result<String> {
    let d = binary_decompose(v)?;
    let parts: Vec<Value> = d
        .parts()
        .iter()
        .map(|(j, part)| {
            json!({
                "j": j,
                "indices": part.indices,
                "values": part.values.iter().map(&to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(pretty(&parts))
}

fn decompose(a: &DecomposeArgs) -> Result<Output> {
    let text = match Arithmetic::from(a.mode) {
        Arithmetic::Exact => decompose_json(&rational_list(&a.v)?, rational_to_json)?,
        Arithmetic::Float => decompose_json(&float_list(&a.v)?, |x| f64_to_json(*x))?,
    };
    Ok(Output::new(text, "decomposition.json"))
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    n: usize,
    m: usize,
    mode: &'a str,
    total_edges: u64,
    unsliced_count: u64,
    per_plane_crossings: String,
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let (mut c, input) = load_config(a.config.as_deref().unwrap_or("-"))?;
    if let Some(mode) = a.mode {
        c = c.with_mode(mode.into());
    }
    if c.dim() > VERIFY_NOTICE_DIM {
        eprintln!(
            "verifying n = {}, m = {}: {} edge-plane tests",
            c.dim(),
            c.len(),
            edge_plane_tests(c.dim(), c.len())
        );
    }
    let report = verify_slicing(&c)?;
    let text = match a.report {
        Format::Json => pretty(&report),
        Format::Csv => {
            let mode = serde_json::to_value(report.mode).expect("mode serializes");
            csv_text(&[VerifyRow {
                n: report.n,
                m: report.m,
                mode: mode.as_str().unwrap_or_default(),
                total_edges: report.total_edges,
                unsliced_count: report.unsliced_count,
                per_plane_crossings: report
                    .per_plane_crossings
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
            }])?
        }
    };
    let mut out = Output::new(text, if a.report == Format::Json { "report.json" } else { "report.csv" });
    out.exit = u8::from(report.unsliced_count > 0);
    out.inputs.push(input);
    Ok(out)
}

fn bias_line(p: &[f64], clamped: bool) -> String {
    let linf = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    json!({ "p": p, "linf": linf, "clamped": clamped }).to_string()
}

fn edge_line(e: &Edge) -> String {
    serde_json::to_string(&EdgeRecord::from(e)).expect("edge serializes")
}

fn sample(a: &SampleArgs, rng: &RngSpec) -> Result<Output> {
    let (c, input) = load_config(&a.config)?;
    let n = c.dim();
    let dyadic = EvasiveSampler::from_configuration(&c, BiasParams::default())?;
    let simple = match a.variant {
        Variant::Simple => Some(SimpleBiasSampler::from_configuration(&c)?),
        Variant::Dyadic => None,
    };
    let batches = map_batches(a.count, rng, |spec, len| -> Result<Vec<String>> {
        let mut rng = spec.rng();
        let mut lines = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let line = match (&simple, a.emit) {
                (Some(s), Emit::Bias) => {
                    let b = s.sample(&mut rng);
                    bias_line(&b.p, b.clamped)
                }
                (Some(s), Emit::Edges) => {
                    let b = s.sample(&mut rng);
                    let u = draw_mu(&b.p, &mut rng)?;
                    edge_line(&Edge::new(u, rng.random_range(0..n))?)
                }
                (None, Emit::Bias) => {
                    let b = if a.unconditioned {
                        dyadic.bias().sample(&mut rng)
                    } else {
                        dyadic.bias().sample_conditioned(&mut rng)?
                    };
                    bias_line(&b.p, false)
                }
                (None, Emit::Edges) => edge_line(&dyadic.sample_edge(&mut rng)?),
            };
            lines.push(line);
        }
        Ok(lines)
    });
    let mut text = String::new();
    for batch in batches {
        for line in batch? {
            text.push_str(&line);
            text.push('\n');
        }
    }
    let mut out = Output::new(text, "samples.jsonl");
    out.inputs.push(input);
    Ok(out)
}

fn qfunc_json<T: Scalar>(v: Vec<T>, p: Vec<T>, alpha: T, to_json: impl Fn(&T) -> Value) -> Result<String> {
    if alpha.is_negative() {
        return Err(Error::NegativeAlpha);
    }
    let a = v.iter().filter(|x| x.abs() >= alpha).count() as u32;
    let spec = LinearFormSpec::new(v, p)?;
    let q = levy_q(&linear_form_atoms(&spec)?, &alpha)?;
    let sperner = T::from_rational(&sperner_bound(a));
    let ratio = q.as_f64() * f64::from(a).sqrt();
    Ok(pretty(&json!({ "a": a, "q": to_json(&q), "sperner": to_json(&sperner), "ratio": f64_to_json(ratio) })))
}

fn qfunc(a: &QfuncArgs) -> Result<Output> {
    let text = match Arithmetic::from(a.mode) {
        Arithmetic::Exact => {
            let v = rational_list(&a.v)?;
            let p = match &a.p {
                Some(p) => rational_list(p)?,
                None => vec![BigRational::from_integer(0.into()); v.len()],
            };
            qfunc_json(v, p, parse_rational(&a.alpha)?, rational_to_json)?
        }
        Arithmetic::Float => {
            let v = float_list(&a.v)?;
            let p = match &a.p {
                Some(p) => float_list(p)?,
                None => vec![0.0; v.len()],
            };
            qfunc_json(v, p, parse_f64(&a.alpha)?, |x| f64_to_json(*x))?
        }
    };
    Ok(Output::new(text, "qfunc.json"))
}

#[derive(Serialize)]
struct EstimateRow {
    estimator: &'static str,
    plane: Option<usize>,
    point_estimate: f64,
    std_error: f64,
    ci95_lo: f64,
    ci95_hi: f64,
    samples: u64,
    seed: u64,
    target_bound: Option<f64>,
}

impl EstimateRow {
    fn new(estimator: &'static str, plane: Option<usize>, r: &EstimateReport) -> Self {
        EstimateRow {
            estimator,
            plane,
            point_estimate: r.point_estimate,
            std_error: r.std_error,
            ci95_lo: r.ci95[0],
            ci95_hi: r.ci95[1],
            samples: r.samples,
            seed: r.seed,
            target_bound: r.target_bound,
        }
    }
}

fn require(value: Option<usize>, flag: &str) -> Result<usize> {
    value.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required without --config")))
}

/// Configuration for `estimate`: a file, a named construction, or random
/// planes drawn from stream 1 of the seed.
fn estimate_config(a: &EstimateArgs, rng: &RngSpec) -> Result<(Configuration, Option<(String, String)>)> {
    if let Some(path) = &a.config {
        let (c, input) = load_config(path)?;
        return Ok((c, Some(input)));
    }
    let n = require(a.n, "n")?;
    let c = match a.construction {
        Some(kind) => construction(kind.into(), n, Arithmetic::Float)?,
        None => random_unit_configuration(n, require(a.m, "m")?, &RngSpec::with_stream(rng.seed, 1))?,
    };
    Ok((c, None))
}

fn estimate(a: &EstimateArgs, rng: &RngSpec) -> Result<Output> {
    let (c, input) = estimate_config(a, rng)?;
    let (json_text, rows) = match a.estimator {
        Estimator::Evasion => {
            let r = estimate_evasion(&c, a.samples, rng)?;
            let mut rows: Vec<EstimateRow> =
                r.per_plane.iter().enumerate().map(|(i, p)| EstimateRow::new("evasion", Some(i), p)).collect();
            rows.push(EstimateRow::new("evasion_union", None, &r.union));
            (pretty(&r), rows)
        }
        Estimator::LinfTail => {
            let r = estimate_linf_tail(&c, a.samples, rng)?;
            let row = EstimateRow::new("linf_tail", None, &r);
            (pretty(&r), vec![row])
        }
        Estimator::Glue => {
            if a.plane >= c.len() {
                return Err(Error::PlaneIndexOutOfRange { index: a.plane, m: c.len() });
            }
            let t = match a.t {
                Some(t) => t,
                None => *c.planes()[a.plane].unit_float()?.threshold(),
            };
            let r = estimate_glue_sum(&c, a.plane, t, a.samples, rng)?;
            let row = EstimateRow::new("glue", Some(a.plane), &r);
            (pretty(&r), vec![row])
        }
    };
    let mut out = match a.format {
        Format::Json => Output::new(json_text, "estimate.json"),
        Format::Csv => Output::new(csv_text(&rows)?, "estimate.csv"),
    };
    out.inputs.extend(input);
    Ok(out)
}

fn search(a: &SearchArgs, rng: &RngSpec) -> Result<Output> {
    let opts = SearchOptions {
        coeff_range: a.coeff_range,
        replicas: a.replicas,
        mode: a.mode.into(),
        ..SearchOptions::default()
    };
    let found = local_search_slicing_with(a.n, a.m, a.iters, rng, &opts)?;
    let out = match a.format {
        Format::Json => {
            let mut value = serde_json::to_value(&found).expect("search outcome serializes");
            value["config"] = found.config.to_json();
            Output::new(pretty(&value), "search.json")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["plane".to_string(), "threshold".to_string()];
            header.extend((0..a.n).map(|i| format!("c{i}")));
            header.push("crossings".into());
            let csv_err = |e: csv::Error| Error::Config(e.to_string());
            w.write_record(&header).map_err(csv_err)?;
            for (l, coeffs) in found.coeffs.iter().enumerate() {
                let mut rec = vec![l.to_string(), found.thresholds[l].to_string()];
                rec.extend(coeffs.iter().map(i64::to_string));
                rec.push(found.report.per_plane_crossings[l].to_string());
                w.write_record(&rec).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            Output::new(String::from_utf8(bytes).expect("csv output is utf-8"), "search.csv")
        }
    };
    Ok(out)
}

fn run_sweep(a: &SweepArgs, seed: u64) -> Result<Output> {
    let seeds = if a.seeds.is_empty() { vec![seed] } else { a.seeds.clone() };
    let cells = grid(&a.n, &a.m, &a.kinds, &seeds);
    let rows = sweep(&cells, a.samples);
    Ok(match a.format {
        Format::Csv => Output::new(csv_text(&rows)?, "sweep.csv"),
        Format::Json => Output::new(pretty(&rows), "sweep.json"),
    })
}
