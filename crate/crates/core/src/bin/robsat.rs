use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use robsat::homotopy::{decide_extension, degree, ExtendVerdict};
use robsat::io::poly::default_vars;
use robsat::io::{decide_sampled, fixture_from_extension, freudenthal_grid, sample_polynomial, ExtensionFile, Instance, InstanceFile, Polynomial};
use robsat::oracles::{is_rootless, perturbation_witness, WitnessSearchConfig};
use robsat::robsat::{decide_robsat_with, decide_with_inequalities, locate_components_with, robustness_with, RobVerdict, RobustnessResult};
use robsat::{rational, CriticalValue, DeciderOptions, Error, IntCochain, Norm, PLMap, Simplex};

const EXIT_UNKNOWN: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "robsat", version, about = "Robust satisfiability of piecewise-linear systems")]
struct Cli {
    /// Seed for randomized helpers (witness search).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DeciderFlags {
    /// Do not use the Hopf extension theorem for n >= 3, dim X <= n.
    #[arg(long)]
    no_assume_hopf: bool,
}

impl DeciderFlags {
    fn options(&self) -> DeciderOptions {
        DeciderOptions { assume_hopf: !self.no_assume_hopf }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every alpha-perturbation has a root.
    Decide {
        #[arg(short, long)]
        input: PathBuf,
        /// `p/q` or `sqrt:p/q`; defaults to the file's alpha.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        norm: Option<String>,
        /// Search for a rootless perturbation when the answer is negative.
        #[arg(long)]
        witness: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        decider: DeciderFlags,
    },
    /// Compute the robustness value exactly.
    Robustness {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        norm: Option<String>,
        #[command(flatten)]
        decider: DeciderFlags,
    },
    /// Decide a raw extension problem A -> sphere over X.
    Extend {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        decider: DeciderFlags,
    },
    /// Degree of the sphere map of an extension file on an integer cycle.
    Degree {
        #[arg(short, long)]
        input: PathBuf,
        /// JSON list of {"simplex": [ids], "coefficient": k}, or @file.
        #[arg(long)]
        cycle: String,
    },
    /// List the critical values of |f|.
    CriticalValues {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        norm: Option<String>,
    },
    /// Components of the level set carrying robust roots.
    Components {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        norm: Option<String>,
        #[command(flatten)]
        decider: DeciderFlags,
    },
    /// Sample polynomials on a box; decide when --alpha and --eps are given.
    SampleGrid {
        /// One polynomial per output coordinate.
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
        /// `lo:hi` per variable.
        #[arg(long = "box", required = true)]
        boxes: Vec<String>,
        #[arg(long, default_value_t = 4)]
        res: usize,
        #[arg(long, default_value = "linf")]
        norm: String,
        /// Comma-separated variable names.
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, requires = "eps")]
        alpha: Option<String>,
        #[arg(long, requires = "alpha")]
        eps: Option<String>,
    },
    /// Build an instance from an extension file.
    GenFixture {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonPositiveAlpha | Error::NormRequired | Error::Unsupported(_) => EXIT_USAGE,
            Error::Invariant(_) => EXIT_INTERNAL,
            _ => EXIT_DATA,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: EXIT_DATA, message: format!("{}: {e}", path.display()) })
}

fn load(path: &Path, norm: Option<&str>) -> Result<Instance, Failure> {
    let mut inst = Instance::from_json(&read(path)?)?;
    if let Some(n) = norm {
        inst.norm = Norm::parse(n).map_err(|e| usage(e.to_string()))?;
    }
    Ok(inst)
}

fn alpha_of(inst: &Instance, flag: Option<&str>) -> Result<CriticalValue, Failure> {
    match flag {
        Some(s) => CriticalValue::parse(s).map_err(|e| usage(e.to_string())),
        None => inst.alpha.clone().ok_or_else(|| usage("no alpha given on the command line or in the instance")),
    }
}

fn cochain_json(c: &IntCochain) -> Value {
    Value::Object(c.support().map(|(s, v)| (s.to_string(), Value::String(v.to_string()))).collect())
}

fn extension_json(v: &ExtendVerdict) -> Value {
    match v {
        ExtendVerdict::Extends(cert) => json!({
            "verdict": v.tag(),
            "certificate": { "w": cochain_json(&cert.w), "u": cochain_json(&cert.u) },
        }),
        ExtendVerdict::NotExtends(reason) | ExtendVerdict::Unknown(reason) => json!({ "verdict": v.tag(), "reason": reason }),
    }
}

fn map_json(f: &PLMap) -> Value {
    let mut values = Map::new();
    for (v, y) in f.values() {
        values.insert(v.to_string(), Value::Array(y.iter().map(|q| Value::String(rational::format(q))).collect()));
    }
    Value::Object(values)
}

fn robustness_json(r: &RobustnessResult) -> Value {
    match r {
        RobustnessResult::Unsatisfiable => json!({ "kind": "unsatisfiable" }),
        RobustnessResult::Value(v) => json!({ "kind": "value", "value": v.to_json() }),
        RobustnessResult::Interval(lo, hi) => json!({ "kind": "interval", "lo": lo.to_json(), "hi": hi.to_json() }),
    }
}

fn parse_cycle(text: &str) -> Result<IntCochain, Failure> {
    #[derive(serde::Deserialize)]
    struct Term {
        simplex: Vec<u32>,
        coefficient: i64,
    }
    let raw = match text.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    let terms: Vec<Term> = serde_json::from_str(&raw).map_err(Error::from)?;
    let Some(first) = terms.first() else {
        return Err(usage("empty cycle"));
    };
    let mut c = IntCochain::new(first.simplex.len().saturating_sub(1));
    for t in terms {
        let s = Simplex::from_ids(&t.simplex);
        if s.dim() != c.degree {
            return Err(Failure { code: EXIT_DATA, message: "cycle mixes dimensions".into() });
        }
        let current = c.get(&s);
        c.set(s, current + BigInt::from(t.coefficient));
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<(Value, bool), Failure> {
    match cli.command {
        Command::Decide { input, alpha, norm, witness, trials, decider } => {
            let inst = load(&input, norm.as_deref())?;
            let alpha = alpha_of(&inst, alpha.as_deref())?;
            if let Some(g) = &inst.g {
                let verdict = decide_with_inequalities(&inst.f, g, &alpha, inst.norm)?;
                let out = json!({
                    "command": "decide",
                    "alpha": alpha.to_json(),
                    "norm": inst.norm.name(),
                    "constraints": g.n(),
                    "verdict": verdict.tag(),
                });
                return Ok((out, matches!(verdict, RobVerdict::Unknown)));
            }
            let decision = decide_robsat_with(&inst.f, &alpha, inst.norm, decider.options())?;
            let red = &decision.reduction;
            let mut out = json!({
                "command": "decide",
                "alpha": alpha.to_json(),
                "norm": inst.norm.name(),
                "verdict": decision.verdict.tag(),
                "trace": {
                    "sizes": red.trace,
                    "extremal_values": map_json(&red.extremal),
                    "chi": red.chi.iter().map(|(v, c)| (v.to_string(), Value::String(c.to_string()))).collect::<Map<_, _>>(),
                    "sphere_map": red.sphere_map.as_ref().map(|m| m.images().iter().map(|(v, img)| (v.to_string(), Value::String(img.to_string()))).collect::<Map<_, _>>()),
                },
            });
            if let Some(ext) = &decision.extension {
                out["extension"] = extension_json(ext);
            }
            if witness && decision.verdict.is_no() {
                let found = match &decision.verdict {
                    RobVerdict::RobustNo(Some(g)) => Some(g.clone()),
                    _ => {
                        let cfg = WitnessSearchConfig { trials, seed: cli.seed, ..Default::default() };
                        perturbation_witness(&inst.f, &alpha, inst.norm, &cfg)
                    }
                };
                if let Some(g) = &found {
                    let ok = is_rootless(g) && inst.f.distance(g, inst.norm)? <= alpha;
                    if !ok {
                        return Err(Error::Invariant("witness failed verification".into()).into());
                    }
                }
                out["witness"] = found.as_ref().map_or(Value::Null, map_json);
            }
            Ok((out, matches!(decision.verdict, RobVerdict::Unknown)))
        }
        Command::Robustness { input, norm, decider } => {
            let inst = load(&input, norm.as_deref())?;
            let (result, probes) = robustness_with(&inst.f, inst.norm, decider.options())?;
            let out = json!({
                "command": "robustness",
                "norm": inst.norm.name(),
                "robustness": robustness_json(&result),
                "probes": probes,
            });
            Ok((out, matches!(result, RobustnessResult::Interval(..))))
        }
        Command::Extend { input, decider } => {
            let p = ExtensionFile::from_json(&read(&input)?)?.to_problem()?;
            let v = decide_extension(&p.x, &p.a, &p.map, decider.options())?;
            let mut out = extension_json(&v);
            out["command"] = json!("extend");
            Ok((out, matches!(v, ExtendVerdict::Unknown(_))))
        }
        Command::Degree { input, cycle } => {
            let p = ExtensionFile::from_json(&read(&input)?)?.to_problem()?;
            let c = parse_cycle(&cycle)?;
            let d = degree(&c, &p.map)?;
            Ok((json!({ "command": "degree", "degree": d.to_string() }), false))
        }
        Command::CriticalValues { input, norm } => {
            let inst = load(&input, norm.as_deref())?;
            let values: Vec<Value> = inst.f.critical_values(inst.norm).iter().map(CriticalValue::to_json).collect();
            Ok((json!({ "command": "critical-values", "norm": inst.norm.name(), "critical_values": values }), false))
        }
        Command::Components { input, alpha, norm, decider } => {
            let inst = load(&input, norm.as_deref())?;
            let alpha = alpha_of(&inst, alpha.as_deref())?;
            let comps = locate_components_with(&inst.f, &alpha, inst.norm, decider.options())?;
            let unknown = comps.iter().any(|c| matches!(c.verdict, RobVerdict::Unknown));
            let list: Vec<Value> = comps
                .iter()
                .map(|c| {
                    json!({
                        "verdict": c.verdict.tag(),
                        "vertices": c.x.vertices().map(|v| v.0).collect::<Vec<_>>(),
                        "simplices": c.x.len(),
                        "a_vertices": c.a.vertices().map(|v| v.0).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((json!({ "command": "components", "alpha": alpha.to_json(), "components": list }), unknown))
        }
        Command::SampleGrid { exprs, boxes, res, norm, vars, alpha, eps } => {
            let norm = Norm::parse(&norm).map_err(|e| usage(e.to_string()))?;
            let bounds = boxes
                .iter()
                .map(|b| {
                    let (lo, hi) = b.split_once(':').ok_or_else(|| usage(format!("box {b:?} is not lo:hi")))?;
                    Ok((rational::parse(lo)?, rational::parse(hi)?))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let names: Vec<String> = match vars {
                Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
                None => default_vars(bounds.len()),
            };
            if names.len() != bounds.len() {
                return Err(usage("need one --box per variable"));
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let polys = exprs.iter().map(|e| Polynomial::parse(e, &refs)).collect::<Result<Vec<_>, _>>()?;
            match (alpha, eps) {
                (Some(a), Some(e)) => {
                    let d = decide_sampled(&polys, &bounds, res, &rational::parse(&a)?, &rational::parse(&e)?, norm)?;
                    let out = json!({
                        "command": "sample-grid",
                        "verdict": d.verdict.tag(),
                        "resolution": d.resolution,
                        "epsilon": rational::format(&d.epsilon),
                        "vertices": d.vertices,
                    });
                    Ok((out, d.verdict == robsat::io::SampledVerdict::Unknown))
                }
                _ => {
                    let grid = freudenthal_grid(&bounds, &vec![res; bounds.len()])?;
                    let s = sample_polynomial(&polys, &grid)?;
                    let inst = Instance::new(s.f.clone(), norm);
                    let out = json!({
                        "command": "sample-grid",
                        "epsilon": rational::format(&s.epsilon(norm)),
                        "instance": serde_json::to_value(InstanceFile::from_instance(&inst)).map_err(Error::from)?,
                    });
                    Ok((out, false))
                }
            }
        }
        Command::GenFixture { input, norm } => {
            let norm = Norm::parse(&norm).map_err(|e| usage(e.to_string()))?;
            let p = ExtensionFile::from_json(&read(&input)?)?.to_problem()?;
            let fx = fixture_from_extension(&p.x, &p.a, &p.map, norm)?;
            let inst = Instance::new(fx.f, norm);
            Ok((serde_json::to_value(InstanceFile::from_instance(&inst)).map_err(Error::from)?, false))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let wrap = !matches!(cli.command, Command::GenFixture { .. });
    match run(cli) {
        Ok((mut out, unknown)) => {
            if wrap {
                out["elapsed_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
            }
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&out).expect("serialisable"));
            ExitCode::from(if unknown { EXIT_UNKNOWN } else { 0 })
        }
        Err(f) => {
            eprintln!("robsat: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
