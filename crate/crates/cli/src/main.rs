use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use tropfan_core::classify1d::{canonical_partition, is_regular_function, m_max, minimal_model};
use tropfan_core::classify2d::{assemble_strongly_regular, certified_planes, planes_with_profile, Profile};
use tropfan_core::fan::{check_balanced, validate};
use tropfan_core::fixtures::verify_paper;
use tropfan_core::io::{
    assembly_value, balance_value, candidate_value, curve_value, function_value, gallery1d_value, int_value,
    model_value, pair_value, parse_fan, parse_function, parse_pair, partition_value, profile_value,
    to_canonical_string, vector_value, IoError, ParseOptions,
};
use tropfan_core::trop::{
    intersection_number, product_1d, product_2d, stable_intersect, Hypersurface, StableIntersection,
};
use tropfan_core::{Fan, Int, Pair, TrFn};

const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Parser)]
#[command(name = "tropfan", version, about = "Exact intersection theory on tropical fans of dimension 1 and 2")]
struct Cli {
    /// Seed for the generic shifts used by stable intersection.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Accept non-primitive rays by dividing out their content.
    #[arg(long, global = true)]
    normalize_rays: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fan axioms.
    Validate { fan: PathBuf },
    /// Check the balancing condition at every codimension-1 face.
    Balance { fan: PathBuf },
    /// Intersect a fan with one or two functions.
    Product {
        fan: PathBuf,
        #[arg(required = true, num_args = 1..=2)]
        functions: Vec<PathBuf>,
        /// Compute a single product by stable intersection with the function's hypersurface.
        #[arg(long)]
        stable: bool,
    },
    /// Canonical partition of a 1-dimensional fan, with the maximal regular function of each class.
    #[command(name = "classify-1d")]
    Classify1d {
        fan: PathBuf,
        /// Also test whether this non-negative function is regular on the fan.
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Projection of a regular 1-dimensional fan onto a sum of Bergman lines.
    MinimalModel { fan: PathBuf },
    /// Candidate planes for a function pair (standard pair on R^4 if omitted).
    EnumeratePlanes {
        pair: Option<PathBuf>,
        /// Keep planes with this profile, written a,b,c.
        #[arg(long)]
        profile: Option<ProfileArg>,
    },
    /// Search unions of candidate planes for strongly regular cycles.
    Assemble {
        pair: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        max_planes: usize,
    },
    /// Run the bundled worked examples.
    VerifyPaper,
}

#[derive(Clone, Debug)]
struct ProfileArg(Profile<Int>);

impl FromStr for ProfileArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts.as_slice() else { return Err(format!("expected three integers a,b,c, got {s:?}")) };
        let int = |x: &str| Int::from_str(x).map_err(|e| format!("{x:?}: {e}"));
        Ok(ProfileArg(Profile::new(int(a)?, int(b)?, int(c)?)))
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: IoError },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// A finished command: the JSON document, a line for humans, and whether it found a defect.
struct Outcome {
    value: Value,
    summary: String,
    finding: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn load_fan(path: &Path, opts: ParseOptions) -> Result<Fan, CliError> {
    parse_fan(&read(path)?, opts).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn load_function(path: &Path) -> Result<TrFn, CliError> {
    parse_function(&read(path)?).map_err(|source| CliError::Input { path: path.to_owned(), source })
}

fn load_pair(path: Option<&Path>) -> Result<Pair, CliError> {
    match path {
        None => Ok(Pair::standard(4, 2)),
        Some(p) => parse_pair(&read(p)?).map_err(|source| CliError::Input { path: p.to_owned(), source }),
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = ParseOptions { normalize_rays: cli.normalize_rays };
    match &cli.command {
        Command::Validate { fan } => {
            let f = load_fan(fan, opts)?;
            let violations: Vec<String> = validate(&f).iter().map(ToString::to_string).collect();
            let summary = if violations.is_empty() {
                "valid fan".to_string()
            } else {
                format!("{} violation(s): {}", violations.len(), violations.join("; "))
            };
            let finding = !violations.is_empty();
            Ok(Outcome { value: json!({ "valid": !finding, "violations": violations }), summary, finding })
        }
        Command::Balance { fan } => {
            let f = load_fan(fan, opts)?;
            let report = check_balanced(&f);
            let bad: Vec<String> = report.unbalanced().iter().map(|b| format!("{} (sum {})", b.face, b.sum)).collect();
            let summary =
                if bad.is_empty() { "balanced".to_string() } else { format!("unbalanced at {}", bad.join(", ")) };
            Ok(Outcome { value: balance_value(&report), summary, finding: !bad.is_empty() })
        }
        Command::Product { fan, functions, stable } => product(&load_fan(fan, opts)?, functions, *stable, cli.seed),
        Command::Classify1d { fan, function } => classify(&load_fan(fan, opts)?, function.as_deref()),
        Command::MinimalModel { fan } => {
            let f = load_fan(fan, opts)?;
            let model = minimal_model(&f).map_err(compute)?;
            let summary = format!(
                "{} class(es); projection to R^{} with {} Bergman summand(s)",
                model.partition.classes.len(),
                model.matrix.nrows(),
                model.decomposition.groups.len()
            );
            Ok(Outcome { value: model_value(&model), summary, finding: false })
        }
        Command::EnumeratePlanes { pair, profile } => {
            let pair = load_pair(pair.as_deref())?;
            let planes = match profile {
                Some(ProfileArg(p)) => planes_with_profile(&pair, p),
                None => certified_planes(&pair),
            }
            .map_err(compute)?;
            let summary = format!("{} plane(s)", planes.len());
            let value = json!({
                "pair": pair_value(&pair),
                "planes": planes.iter().map(candidate_value).collect::<Vec<_>>(),
                "profile": profile.as_ref().map_or(Value::Null, |p| profile_value(&p.0)),
            });
            Ok(Outcome { value, summary, finding: false })
        }
        Command::Assemble { pair, max_planes } => {
            let pair = load_pair(pair.as_deref())?;
            let report = assemble_strongly_regular(&pair, *max_planes).map_err(compute)?;
            let summary = format!(
                "{} strongly regular cycle(s), {} Hodge-index counterexample(s), {} plane subset(s) examined",
                report.cycles.len(),
                report.hodge_counterexamples.len(),
                report.subsets_examined
            );
            let mut value = assembly_value(&report);
            value["pair"] = pair_value(&pair);
            Ok(Outcome { value, summary, finding: false })
        }
        Command::VerifyPaper => {
            let report = verify_paper(cli.seed);
            Ok(Outcome { value: report.to_value(), summary: report.table(), finding: !report.all_pass() })
        }
    }
}

fn product(f: &Fan, functions: &[PathBuf], stable: bool, seed: u64) -> Result<Outcome, CliError> {
    let ts = functions.iter().map(|p| load_function(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some((p, t)) = functions.iter().zip(&ts).find(|(_, t)| t.dim() != f.ambient_dim()) {
        return Err(CliError::Usage(format!(
            "{}: function on R^{} but the fan lives in R^{}",
            p.display(),
            t.dim(),
            f.ambient_dim()
        )));
    }
    if stable && (ts.len() != 1 || f.dim() != 2) {
        return Err(CliError::Usage("--stable takes a 2-dimensional fan and one function".into()));
    }
    if ts.len() > f.dim() {
        return Err(CliError::Usage(format!("{} functions given for a fan of dimension {}", ts.len(), f.dim())));
    }
    if ts.len() == f.dim() {
        let degree = intersection_number(&ts, f).map_err(compute)?;
        return Ok(Outcome {
            summary: format!("degree {degree}"),
            value: json!({ "degree": int_value(&degree) }),
            finding: false,
        });
    }
    let t = &ts[0];
    if stable {
        return match stable_intersect(f, &Hypersurface::of(t), seed).map_err(compute)? {
            StableIntersection::Curve(c) => Ok(Outcome {
                summary: format!("1-cycle with {} ray(s)", c.len()),
                value: json!({ "cycle": curve_value(&c) }),
                finding: false,
            }),
            StableIntersection::Point(z) => Ok(Outcome {
                summary: format!("degree {}", z.weight),
                value: json!({ "degree": int_value(&z.weight) }),
                finding: false,
            }),
        };
    }
    if f.dim() == 1 {
        let z = product_1d(t, f).map_err(compute)?;
        return Ok(Outcome {
            summary: format!("degree {}", z.weight),
            value: json!({ "degree": int_value(&z.weight) }),
            finding: false,
        });
    }
    let p = product_2d(t, f).map_err(compute)?;
    let c = p.cycle.ray_weights();
    let value = json!({
        "cycle": curve_value(&c),
        "zero_weight_rays": p.zero_weight_rays.iter().map(vector_value).collect::<Vec<_>>(),
    });
    Ok(Outcome { summary: format!("1-cycle with {} ray(s)", c.len()), value, finding: false })
}

fn classify(f: &Fan, function: Option<&Path>) -> Result<Outcome, CliError> {
    let part = canonical_partition(f).map_err(compute)?;
    let mut maxima = Vec::new();
    for c in 0..part.classes.len() {
        let rep = part.representative(c);
        let m = m_max(f, &part, c, rep).map_err(compute)?;
        maxima.push(json!({ "class": c, "function": function_value(&m), "ray": rep }));
    }
    let regular = !part.classes.is_empty();
    let mut value = json!({ "m_max": maxima, "partition": partition_value(&part), "regular": regular });
    let mut summary = format!(
        "{} class(es), {} ray(s) outside galleries; {}",
        part.classes.len(),
        part.nongallery.len(),
        if regular { "regular" } else { "not regular" }
    );
    if let Some(path) = function {
        let m = load_function(path)?;
        let report = is_regular_function(f, &m).map_err(compute)?;
        value["function"] = json!({
            "product": int_value(&report.product),
            "regular": report.is_regular(),
            "witness": report.witness.as_ref().map_or(Value::Null, |w| json!({ "class": w.class, "gallery": gallery1d_value(&w.gallery), "ray": w.ray })),
        });
        summary.push_str(&format!("; function {m} has product {}", report.product));
    }
    Ok(Outcome { value, summary, finding: false })
}

fn configure_threads() {
    let Ok(v) = std::env::var("TROPFAN_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("tropfan: ignoring TROPFAN_THREADS={v:?}"),
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<(), CliError> {
    let text = to_canonical_string(value) + "\n";
    match &cli.output {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = run(&cli).and_then(|o| {
        emit(&cli, &o.value)?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            eprintln!("{}", o.summary.trim_end());
            ExitCode::from(u8::from(o.finding))
        }
        Err(e) => {
            eprintln!("tropfan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
