use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use driftlab::emit::{emit, Format};
use driftlab::experiments::{cmd_composed, cmd_drift_types, cmd_stream_demo, cmd_usage_metric};
use driftlab::theory::{verify, VerifyReport};
use driftlab::{default_panels, Error, Experiment, ExperimentConfig, ResultTable};
use driftlab_core::oracle::ImplicationParams;

#[derive(Parser)]
#[command(name = "driftlab", version, about = "Concept-drift experiments and oracle verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on D00, test on D00/D01/D10/D11.
    DriftTypes(Common),
    /// Train on composed windows, test on D00.
    Composed(Common),
    /// Composed windows plus the usage-of-additional-information metric.
    UsageMetric(Common),
    /// Fixture suite and random implication suite; exits nonzero on violations.
    VerifyTheory(Common),
    /// Passive, active and hybrid learning on a label-switch stream.
    StreamDemo(Common),
    /// Oracle suites only.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Plain-text `key=value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator strings (`sea:concept=2,noise=0.1`) or `csv:DATA[:SCHEMA]`.
    #[arg(long, num_args = 1..)]
    datasets: Option<Vec<String>>,
    /// Learner specs (`dt`, `knn:k=3`, ...).
    #[arg(long, num_args = 1..)]
    models: Option<Vec<String>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of random instances (verify-theory).
    #[arg(long)]
    random: Option<usize>,
    /// Full-scale repetition count (1000).
    #[arg(long)]
    full_scale: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    fixtures: bool,
    /// Number of random instances.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for the verdict CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, experiment: Experiment) -> driftlab::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(experiment, path)?,
            None => ExperimentConfig::new(experiment),
        };
        cfg.experiment = experiment;
        if let Some(d) = &self.datasets {
            cfg.set("datasets", &d.join(" "))?;
        }
        if let Some(m) = &self.models {
            cfg.set("models", &m.join(" "))?;
        }
        if self.full_scale {
            cfg.set("full-scale", "true")?;
        }
        for (key, v) in [("reps", self.reps), ("train", self.train), ("test", self.test), ("random", self.random)] {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_table(table: &ResultTable, cfg: &ExperimentConfig) -> driftlab::Result<()> {
    for (name, why) in &table.failures {
        eprintln!("dataset {name} skipped: {why}");
    }
    let mut paths = emit(table, &Format::Csv, &cfg.out)?;
    paths.extend(emit(table, &Format::SvgScatter(default_panels(cfg.experiment)), &cfg.out)?);
    for a in &table.aggregates {
        println!(
            "{:<12} {:<6} {:<17} mean {:.4}  std {:.4}",
            a.dataset, a.model, a.condition, a.mean, a.std
        );
    }
    for t in &table.tests {
        println!(
            "{:<12} {:<6} {} vs {}: t = {:.3}, p = {:.3e}{}",
            t.dataset,
            t.model,
            t.a,
            t.b,
            t.t,
            t.p,
            if t.significant { " *" } else { "" }
        );
    }
    for m in &table.metrics {
        let v = m.value.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"));
        println!("{:<12} {:<6} {} = {v}", m.dataset, m.model, m.metric);
    }
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn write_verdicts(report: &VerifyReport, out: Option<&Path>) -> driftlab::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(VerifyReport::header())?;
    for row in report.csv_rows() {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("verify-theory.csv");
            fs::write(&path, bytes).map_err(|source| Error::Write {
                path: path.display().to_string(),
                source,
            })?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

fn run(cli: Cli) -> driftlab::Result<bool> {
    let params = ImplicationParams::default();
    match cli.command {
        Command::DriftTypes(c) => {
            let cfg = c.resolve(Experiment::DriftTypes)?;
            write_table(&cmd_drift_types(&cfg)?, &cfg)?;
        }
        Command::Composed(c) => {
            let cfg = c.resolve(Experiment::Composed)?;
            write_table(&cmd_composed(&cfg)?, &cfg)?;
        }
        Command::UsageMetric(c) => {
            let cfg = c.resolve(Experiment::UsageMetric)?;
            write_table(&cmd_usage_metric(&cfg)?, &cfg)?;
        }
        Command::StreamDemo(c) => {
            let cfg = c.resolve(Experiment::StreamDemo)?;
            let (table, logs) = cmd_stream_demo(&cfg)?;
            write_table(&table, &cfg)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["dataset", "model", "policy", "step", "loss", "flag", "action"])?;
            for (d, m, p, log) in &logs {
                for r in &log.records {
                    w.write_record([
                        d.as_str(),
                        m,
                        p,
                        &r.step.to_string(),
                        &r.loss.to_string(),
                        r.flag.name(),
                        r.action.name(),
                    ])?;
                }
            }
            let path = cfg.out.join("stream-demo-log.csv");
            fs::write(&path, w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
            eprintln!("wrote {}", path.display());
        }
        Command::VerifyTheory(c) => {
            let cfg = c.resolve(Experiment::VerifyTheory)?;
            let report = verify(true, Some((cfg.random, cfg.seed)), &params)?;
            write_verdicts(&report, Some(&cfg.out))?;
            eprintln!("{}", report.summary());
            return Ok(report.passed());
        }
        Command::Verify(v) => {
            if !v.fixtures && v.random.is_none() {
                return Err(Error::Config("pass --fixtures and/or --random N".into()));
            }
            let report = verify(v.fixtures, v.random.map(|n| (n, v.seed)), &params)?;
            write_verdicts(&report, v.out.as_deref())?;
            eprintln!("{}", report.summary());
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
