use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pndp::cli::{
    catalog_ids, catalog_manifest, catalog_source, load_manifest, run, wormhole_table, Manifest,
    RunOptions, RunReport,
};

#[derive(Parser)]
#[command(name = "pndp", version, about = "Curvature and Einstein-condition verification for warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Residual tolerance for Einstein-system checks.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions { seed: self.seed, samples: self.samples, tol: self.tol }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks requested by a manifest file.
    Verify {
        manifest: PathBuf,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Built-in example manifests.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print the r, xi(r) embedding table of a wormhole manifest.
    Embed {
        /// Catalog id or manifest path.
        target: String,
        #[arg(long, default_value_t = 32)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Run one entry, or `all`.
    Run {
        id: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Print an entry's manifest.
    Export { id: String },
}

fn emit(reports: &[RunReport], format: ReportFormat) {
    match format {
        ReportFormat::Text => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", r.to_text());
            }
        }
        ReportFormat::Json => {
            let json = if reports.len() == 1 {
                reports[0].to_json()
            } else {
                serde_json::to_string_pretty(reports).expect("reports serialize")
            };
            println!("{json}");
        }
    }
}

fn status(reports: &[RunReport]) -> ExitCode {
    if reports.iter().all(RunReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn resolve(target: &str) -> Result<Manifest, String> {
    if catalog_source(target).is_ok() {
        return catalog_manifest(target).map_err(|e| e.to_string());
    }
    load_manifest(target).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { manifest, args } => match load_manifest(&manifest) {
            Ok(m) => {
                let report = run(&m, &args.options());
                emit(std::slice::from_ref(&report), args.report);
                status(&[report])
            }
            Err(e) => fail(format!("{}: {e}", manifest.display())),
        },
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for id in catalog_ids() {
                    let desc = catalog_manifest(id).map(|m| m.description).unwrap_or_default();
                    println!("{id:<28} {desc}");
                }
                ExitCode::SUCCESS
            }
            CatalogAction::Export { id } => match catalog_source(&id) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            },
            CatalogAction::Run { id, args } => {
                let ids: Vec<&str> = if id == "all" { catalog_ids().collect() } else { vec![id.as_str()] };
                let mut reports = Vec::new();
                for id in ids {
                    match catalog_manifest(id) {
                        Ok(m) => reports.push(run(&m, &args.options())),
                        Err(e) => return fail(e),
                    }
                }
                emit(&reports, args.report);
                status(&reports)
            }
        },
        Command::Embed { target, steps } => match resolve(&target).and_then(|m| wormhole_table(&m, steps)) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
