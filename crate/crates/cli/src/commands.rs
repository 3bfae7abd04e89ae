use std::fmt;
use std::path::Path;

use hlx_core::experiments::{
    certify, growth_fit, ksz_min_norm, loglog_fit, CertifySpec, FitPoint, GrowthSpec, InstanceSource, KszSpec,
    LineFit,
};
use hlx_core::normest::{estimate_norm, AscentConfig, NormPolicy};
use hlx_core::plot::{loglog_svg, phase_diagram_svg};
use hlx_core::tensors::DEFAULT_ENTRY_BUDGET;
use hlx_core::theory::{bh_lower_real, classify_with, constants_table, eta, sigma};
use hlx_core::{CoeffTensor, Error, ParamPoint};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AscentArgs, Cli, Command, ExperimentOutput, OutFormat, SourceArgs};
use crate::report::csv_rows;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String, std::io::Error),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Capacity { .. } | Error::OracleUnavailable(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Result of one subcommand before rendering.
pub struct Outcome {
    pub config: Value,
    pub payload: Value,
    /// Rendered CSV when `--out csv` was requested.
    pub csv: Option<String>,
    /// Output emitted verbatim, bypassing the run record.
    pub raw: Option<String>,
    pub exit_code: u8,
}

impl Outcome {
    fn new(config: Value, payload: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome {
            config,
            payload: to_value(payload)?,
            csv: None,
            raw: None,
            exit_code: 0,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Core(e.into()))
}

fn config(cli: &Cli, args: impl Serialize) -> Result<Value, CliError> {
    let mut v = to_value(args)?;
    if let Value::Object(map) = &mut v {
        map.insert("seed".into(), json!(cli.seed));
    }
    Ok(v)
}

fn policy(a: &AscentArgs, seed: u64) -> Result<NormPolicy, CliError> {
    let ascent = AscentConfig { restarts: a.restarts, max_sweeps: a.max_sweeps, tol: a.tol, seed };
    ascent.validate()?;
    Ok(NormPolicy { ascent, vertex_max_bits: a.vertex_max_bits })
}

fn read_tensor(path: &Path) -> Result<CoeffTensor, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(CoeffTensor::from_json(&text)?)
}

fn load_source(src: &SourceArgs, seed: u64) -> Result<CoeffTensor, CliError> {
    match (&src.tensor, src.family, src.m, src.n) {
        (Some(path), None, None, None) => read_tensor(path),
        (None, Some(family), Some(m), Some(n)) => Ok(family.build(m, n, src.field, seed, DEFAULT_ENTRY_BUDGET)?),
        _ => Err(CliError::Usage("give exactly one source: --tensor FILE or --family with -m and -n".into())),
    }
}

fn write_plot(path: &Path, points: &[FitPoint], fit: &LineFit, title: &str) -> Result<(), CliError> {
    std::fs::write(path, loglog_svg(points, fit, title)).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn finish_experiment(
    mut outcome: Outcome,
    out: &ExperimentOutput,
    points: &[FitPoint],
    fit: &LineFit,
    title: &str,
) -> Result<Outcome, CliError> {
    if let Some(path) = &out.plot {
        write_plot(path, points, fit, title)?;
    }
    if matches!(out.out, Some(OutFormat::Csv)) {
        outcome.csv = Some(csv_rows(points.iter().map(|pt| (pt.n, pt.value))));
    }
    Ok(outcome)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Exponent(a) => {
            let pt = ParamPoint::new(a.point.m, a.point.r, a.point.p)?;
            if !(a.epsilon >= 0.0 && a.epsilon.is_finite()) {
                return Err(CliError::Usage("--epsilon must be a finite number ≥ 0".into()));
            }
            Outcome::new(config(cli, a)?, classify_with(&pt, a.point.field, a.epsilon))
        }
        Command::Constants(a) => {
            if a.m < 1 {
                return Err(Error::Domain("m must be at least 1".into()).into());
            }
            let mut payload = json!({
                "m": a.m,
                "field": a.field,
                "eta": eta(a.m, a.field),
                "sigma": sigma(a.field),
                "bh_lower_real": bh_lower_real(a.m),
            });
            if let (Some(r), Some(p)) = (a.r, a.p) {
                let pt = ParamPoint::new(a.m, r, p)?;
                let verdict = classify_with(&pt, a.field, 0.0);
                payload["region"] = to_value(verdict.region)?;
                payload["constant_upper"] = to_value(constants_table(&pt, a.field))?;
            }
            Outcome::new(config(cli, a)?, payload)
        }
        Command::Norm(a) => {
            let t = load_source(&a.source, seed)?;
            let est = estimate_norm(&t, a.p, a.method, &policy(&a.ascent, seed)?)?;
            Outcome::new(config(cli, a)?, est)
        }
        Command::Gen(a) => {
            let t = a.family.build(a.m, a.n, a.field, seed, DEFAULT_ENTRY_BUDGET)?;
            let mut outcome = Outcome::new(config(cli, a)?, Value::Null)?;
            outcome.raw = Some(t.to_json()? + "\n");
            Ok(outcome)
        }
        Command::Fit(a) => {
            let spec = GrowthSpec {
                family: a.family,
                m: a.point.m,
                r: a.point.r,
                p: a.point.p,
                n_list: a.n_list.clone(),
                mode: a.method,
                field: a.point.field,
                samples: a.samples,
                policy: policy(&a.ascent, seed)?,
                seed,
            };
            let res = growth_fit(&spec)?;
            let fit = LineFit { slope: res.slope, intercept: res.intercept, r_squared: res.r_squared };
            let title = format!("growth of ‖T‖ ratio, m={} r={} p={}", a.point.m, a.point.r, a.point.p);
            let outcome = Outcome::new(config(cli, a)?, &res)?;
            finish_experiment(outcome, &a.output, &res.points, &fit, &title)
        }
        Command::Ksz(a) => {
            let spec = KszSpec {
                m: a.m,
                p: a.p,
                n_list: a.n_list.clone(),
                samples: a.samples,
                field: a.field,
                policy: policy(&a.ascent, seed)?,
                seed,
            };
            let rep = ksz_min_norm(&spec)?;
            let points: Vec<FitPoint> = rep.points.iter().map(|pt| FitPoint { n: pt.n, value: pt.min_norm }).collect();
            let fit = LineFit { slope: rep.slope, intercept: rep.intercept, r_squared: rep.r_squared };
            let title = format!("minimum norm of unimodular forms, m={} p={}", a.m, a.p);
            let outcome = Outcome::new(config(cli, a)?, &rep)?;
            finish_experiment(outcome, &a.output, &points, &fit, &title)
        }
        Command::Certify(a) => {
            let point = ParamPoint::new(a.point.m, a.point.r, a.point.p)?;
            let source = if a.tensor.is_empty() {
                let n_values = match (&a.n, &a.n_list) {
                    (Some(n), _) => vec![*n],
                    (None, Some(list)) => list.clone(),
                    (None, None) => return Err(CliError::Usage("give -n, --n-list or --tensor".into())),
                };
                InstanceSource::Family { family: a.family, n_values, instances: a.instances }
            } else {
                InstanceSource::Tensors(a.tensor.iter().map(|p| read_tensor(p)).collect::<Result<_, _>>()?)
            };
            let spec = CertifySpec {
                point,
                field: a.point.field,
                source,
                constant: a.constant,
                slack: a.slack,
                epsilon: a.epsilon,
                policy: policy(&a.ascent, seed)?,
                seed,
            };
            let rep = certify(&spec)?;
            let ratios: Vec<FitPoint> = rep
                .instances
                .iter()
                .filter(|i| i.coeff_norm > 0.0)
                .map(|i| FitPoint { n: i.n, value: i.operator_norm / i.coeff_norm })
                .collect();
            let mut outcome = Outcome::new(config(cli, a)?, &rep)?;
            outcome.exit_code = if rep.violations > 0 { 4 } else { 0 };
            if let Some(path) = &a.output.plot {
                let fit = loglog_fit(&ratios)
                    .map_err(|e| CliError::Usage(format!("cannot plot: {e}")))?;
                write_plot(path, &ratios, &fit, "operator norm / coefficient norm")?;
            }
            if matches!(a.output.out, Some(OutFormat::Csv)) {
                outcome.csv = Some(csv_rows(rep.instances.iter().map(|i| (i.n, i.margin))));
            }
            Ok(outcome)
        }
        Command::Phase(a) => {
            if a.m < 1 || !(a.r_max > 1.0) || !(a.p_max > 1.0) {
                return Err(CliError::Usage("need m ≥ 1, r_max > 1 and p_max > 1".into()));
            }
            let svg = phase_diagram_svg(a.m, a.r_max, a.p_max, a.cells);
            std::fs::write(&a.plot, svg).map_err(|e| CliError::Io(a.plot.display().to_string(), e))?;
            Outcome::new(config(cli, a)?, json!({ "m": a.m, "plot": a.plot }))
        }
    }
}
