use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;
use tsvf_core::error::Error;
use tsvf_core::scenarios::{self, fmt17, to_json_string, ParamValue, Scenario, ScenarioOutput, DEFAULT_SEED};

/// Directory used when `--out` is not given; each scenario gets a
/// subdirectory below it.
const OUT_ENV: &str = "TSVF_OUT_DIR";
const DEFAULT_OUT: &str = "tsvf-out";

#[derive(Parser)]
#[command(name = "tsvf", version, about = "Pre- and post-selected quantum measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List scenarios and their parameters.
    List {
        /// Only scenarios whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run one scenario and write its results.
    Run {
        /// Scenario name; may instead come from `--config`.
        scenario: Option<String>,
        /// Parameter override, `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a scenario once per value of one numeric parameter.
    Sweep {
        scenario: String,
        /// Parameter to vary.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<String>,
        /// Fixed override for every point, `key=value`; repeatable.
        #[arg(long = "fixed", value_name = "KEY=VALUE")]
        fixed: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory (default: $TSVF_OUT_DIR/<scenario>, else ./tsvf-out/<scenario>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON run request: {"scenario", "params", "out_dir", "format", "seed"}; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Default)]
struct Config {
    scenario: Option<String>,
    params: BTreeMap<String, ParamValue>,
    out_dir: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{} is not valid JSON: {e}", path.display())))?;
    let bad = |key: &str| Failure::Usage(format!("config key `{key}` has the wrong type"));
    let mut cfg = Config::default();
    let Value::Object(map) = doc else { return Err(Failure::Usage("config must be a JSON object".into())) };
    for (key, v) in &map {
        match key.as_str() {
            "scenario" => cfg.scenario = Some(v.as_str().ok_or_else(|| bad(key))?.to_string()),
            "out_dir" => cfg.out_dir = Some(PathBuf::from(v.as_str().ok_or_else(|| bad(key))?)),
            "seed" => cfg.seed = Some(v.as_u64().ok_or_else(|| bad(key))?),
            "format" => {
                let s = v.as_str().ok_or_else(|| bad(key))?;
                cfg.format = Some(Format::from_str(s, true).map_err(|_| bad(key))?);
            }
            "params" => {
                let obj = v.as_object().ok_or_else(|| bad(key))?;
                for (k, pv) in obj {
                    let value = ParamValue::from_json(pv).ok_or_else(|| bad(&format!("params.{k}")))?;
                    cfg.params.insert(k.clone(), value);
                }
            }
            other => return Err(Failure::Usage(format!("unknown config key `{other}`"))),
        }
    }
    Ok(cfg)
}

fn parse_assignments(items: &[String], into: &mut BTreeMap<String, ParamValue>) -> Result<(), Failure> {
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected key=value, got `{item}`")))?;
        into.insert(k.trim().to_string(), ParamValue::raw(v));
    }
    Ok(())
}

fn find(name: &str) -> Result<Scenario, Failure> {
    scenarios::find(name).ok_or_else(|| {
        let known: Vec<&str> = scenarios::registry().iter().map(|s| s.name).collect();
        Failure::Usage(format!("unknown scenario `{name}` (known: {})", known.join(", ")))
    })
}

fn out_dir(explicit: Option<PathBuf>, leaf: &str) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let base = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        base.join(leaf)
    })
}

/// Write to a temporary sibling, then rename over the target.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut file = fs::File::create(&tmp)?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    fs::rename(&tmp, dir.join(name))
}

fn report_checks(out: &ScenarioOutput) {
    for c in out.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} ({})", c.name, c.detail);
    }
}

fn cmd_list(filter: Option<&str>) -> Result<(), Failure> {
    let mut text = String::new();
    for s in scenarios::registry().iter().filter(|s| filter.is_none_or(|f| s.name.contains(f))) {
        text.push_str(&format!("{}  {}\n", s.name, s.summary));
        for p in &s.params {
            text.push_str(&format!("    {:<18} {:<5} default {:<14} {}\n", p.name, p.kind.name(), p.default.to_string(), p.help));
        }
    }
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_run(
    scenario: Option<String>,
    params: &[String],
    common: Common,
    format: Option<Format>,
) -> Result<(), Failure> {
    let cfg = load_config(common.config.as_deref())?;
    let name = scenario
        .or(cfg.scenario)
        .ok_or_else(|| Failure::Usage("no scenario given on the command line or in the config".into()))?;
    let s = find(&name)?;
    let mut overrides = cfg.params;
    parse_assignments(params, &mut overrides)?;
    let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let format = format.or(cfg.format).unwrap_or(Format::Both);
    let dir = out_dir(common.out.or(cfg.out_dir), s.name);

    let out = s.run_with(&overrides, seed)?;
    fs::create_dir_all(&dir)?;
    if format != Format::Csv {
        write_atomic(&dir, "results.json", &to_json_string(&out.to_json()))?;
    }
    if format != Format::Json {
        for (file, body) in &out.csv {
            write_atomic(&dir, file, body)?;
        }
    }
    println!("{}", out.one_line());
    report_checks(&out);
    if out.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_sweep(scenario: &str, param: &str, values: &[String], fixed: &[String], common: Common) -> Result<(), Failure> {
    let cfg = load_config(common.config.as_deref())?;
    let s = find(scenario)?;
    let spec = s
        .params
        .iter()
        .find(|p| p.name == param)
        .ok_or_else(|| Failure::Usage(format!("scenario `{}` has no parameter `{param}`", s.name)))?;
    if !spec.kind.is_numeric() {
        return Err(Failure::Usage(format!("parameter `{param}` is {}, not numeric", spec.kind.name())));
    }
    let mut base = cfg.params;
    parse_assignments(fixed, &mut base)?;
    let seed = common.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let dir = out_dir(common.out.or(cfg.out_dir), &format!("{}-sweep", s.name));

    // Resolve every point first so a bad value fails before any work.
    let points = values
        .iter()
        .map(|v| {
            let mut o = base.clone();
            o.insert(param.to_string(), ParamValue::raw(v.trim()));
            s.resolve(&o)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let outputs = points.par_iter().map(|p| s.run(p, seed)).collect::<Result<Vec<_>, _>>()?;

    let mut columns: Vec<String> = Vec::new();
    for out in &outputs {
        for (k, _) in &out.summary {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let mut csv = format!("{param},passed");
    for c in &columns {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push('\n');
    for (p, out) in points.iter().zip(&outputs) {
        let value = match p.get(param) {
            Some(ParamValue::Real(r)) => fmt17(*r),
            Some(v) => v.to_string(),
            None => String::new(),
        };
        csv.push_str(&format!("{value},{}", out.passed()));
        for c in &columns {
            csv.push(',');
            if let Some(v) = out.summary_value(c) {
                csv.push_str(&fmt17(v));
            }
        }
        csv.push('\n');
        println!("{param}={value} {}", out.one_line());
        report_checks(out);
    }
    fs::create_dir_all(&dir)?;
    write_atomic(&dir, &format!("sweep_{param}.csv"), &csv)?;
    if outputs.iter().all(ScenarioOutput::passed) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { filter } => cmd_list(filter.as_deref()),
        Command::Run { scenario, params, common, format } => cmd_run(scenario, &params, common, format),
        Command::Sweep { scenario, param, values, fixed, common } => cmd_sweep(&scenario, &param, &values, &fixed, common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
