use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
mod doc;
mod plot;

use commands::{Options, Outcome, EXIT_INPUT};

#[derive(Parser, Debug)]
#[command(name = "adscone", version, about = "Singular AdS 3-manifolds: links, HS-spheres, left/right metrics and collisions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input document (defaults to stdin).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write an SVG figure (lr-metrics, trace-causal).
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Process every `.json` file of a directory.
    #[arg(long, global = true)]
    batch: Option<PathBuf>,
    /// Multiplies every documented tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    /// Reject non-positive masses in the classifiers.
    #[arg(long, global = true)]
    positive: bool,
    /// Print the JSON report even for commands with a one-line summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Classify the singular line of a link circle.
    ClassifyLink,
    /// Classify a causal HS-sphere.
    ClassifySphere,
    /// Check the polyhedron conditions of a marked HS-metric.
    CheckPolyhedron,
    /// Check a sampled curve or graph against the causal bound near a particle.
    TraceCausal,
    /// Left and right metrics of a sampled spacelike surface.
    LrMetrics,
    /// Collide two particles into a cone point of a static spacetime.
    Surgery,
    /// Check the geometric data of a graph of interactions.
    ValidateGraph,
    /// Assemble the holonomy of a graph of interactions.
    AssembleHolonomy,
}

impl Command {
    fn run(self, text: &str, opts: Options) -> Outcome {
        match self {
            Self::ClassifyLink => commands::classify_link(text, opts),
            Self::ClassifySphere => commands::classify_sphere(text, opts),
            Self::CheckPolyhedron => commands::check_polyhedron(text, opts),
            Self::TraceCausal => commands::trace_causal(text, opts),
            Self::LrMetrics => commands::lr_metrics(text, opts),
            Self::Surgery => commands::surgery(text, opts),
            Self::ValidateGraph => commands::validate_graph(text, opts),
            Self::AssembleHolonomy => commands::assemble(text, opts),
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display())),
        None => std::io::read_to_string(std::io::stdin()).map_err(|e| format!("cannot read stdin: {e}")),
    }
}

fn run_batch(cmd: Command, dir: &Path, opts: Options) -> Outcome {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect(),
        Err(e) => return Outcome::input_error(format!("cannot read {}: {e}", dir.display())),
    };
    files.sort();
    let results: Vec<(String, i32, serde_json::Value)> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                s.spawn(move || match read_input(Some(f)) {
                    Ok(text) => cmd.run(&text, opts),
                    Err(e) => Outcome::input_error(e),
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&files)
            .map(|(h, f)| {
                let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                match h.join() {
                    Ok(o) => (name, o.code, o.report.unwrap_or(serde_json::Value::Null)),
                    Err(_) => (name, EXIT_INPUT, json!({ "error": "internal failure" })),
                }
            })
            .collect()
    });
    let code = results.iter().map(|r| r.1).max().unwrap_or(0);
    let entries: Vec<_> =
        results.into_iter().map(|(file, code, report)| json!({ "file": file, "exit_code": code, "report": report })).collect();
    let v = doc::envelope("batch-report", &json!({ "results": entries }));
    Outcome { code, stdout: doc::render(&v), report: Some(v), plot: None }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    if !(c.tolerance_scale.is_finite() && c.tolerance_scale > 0.0) {
        eprintln!("--tolerance-scale must be a positive number");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    adscone::scalar::set_tolerance_scale(c.tolerance_scale);
    let opts = Options { positive: c.positive, json: c.json, want_plot: c.plot.is_some() };
    let outcome = match &c.batch {
        Some(dir) => run_batch(cli.command, dir, opts),
        None => match read_input(c.input.as_deref()) {
            Ok(text) => cli.command.run(&text, opts),
            Err(e) => Outcome::input_error(e),
        },
    };
    if outcome.code == EXIT_INPUT && outcome.stdout.is_empty() {
        if let Some(e) = outcome.report.as_ref().and_then(|r| r.get("error")).and_then(|e| e.as_str()) {
            eprintln!("error: {e}");
        }
    }
    match (&c.output, &outcome.report) {
        (Some(path), Some(report)) => {
            if let Err(e) = std::fs::write(path, doc::render(report)) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
            let summary_only = !outcome.stdout.trim_start().starts_with('{');
            if summary_only {
                print!("{}", outcome.stdout);
            }
        }
        _ => print!("{}", outcome.stdout),
    }
    if let (Some(path), Some(svg)) = (&c.plot, &outcome.plot) {
        if let Err(e) = std::fs::write(path, svg) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
