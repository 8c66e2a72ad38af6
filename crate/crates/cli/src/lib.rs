//! Batch commands and the HTTP service of the `focalsphere` tool.

pub mod commands;
pub mod error;
pub mod input;
pub mod manifest;
pub mod service;
pub mod settings;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
pub use settings::Settings;

#[derive(Parser, Debug)]
#[command(name = "focalsphere", version, about = "Spherical graph layouts and focal views")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a global layout and write the embedding TSV.
    Layout(Settings),
    /// Render the focal view of one node as PNG.
    Focal(Settings),
    /// Normalized edge length and distance correlation of an embedding.
    Metrics(Settings),
    /// Render both hemispheres of an embedding.
    Hemisphere(Settings),
    /// Time 100 layout steps for several thread counts.
    Bench(Settings),
    /// Serve focal views over HTTP.
    Serve(Settings),
    /// Re-run a manifest at one thread and check its outputs.
    Replay {
        manifest: PathBuf,
        /// Write the primary output here instead of the recorded path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command line, printing results to stdout.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Layout(s) => {
            let m = commands::cmd_layout(&s.resolve()?)?;
            println!(
                "wrote {} ({:.2} s)",
                m.outputs[0].path.display(),
                m.timings["layout"]
            );
        }
        Command::Focal(s) => {
            let m = commands::cmd_focal(&s.resolve()?)?;
            println!("wrote {}", m.outputs[0].path.display());
        }
        Command::Metrics(s) => {
            let (report, _) = commands::cmd_metrics(&s.resolve()?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Hemisphere(s) => {
            let m = commands::cmd_hemisphere(&s.resolve()?)?;
            for o in &m.outputs {
                println!("wrote {}", o.path.display());
            }
        }
        Command::Bench(s) => {
            let (report, _) = commands::cmd_bench(&s.resolve()?)?;
            print!("{}", report.table());
        }
        Command::Serve(s) => {
            let s = s.resolve()?;
            let threads = s.threads();
            let rt = tokio::runtime::Builder::new_multi_thread()
                .worker_threads(threads.max(1))
                .enable_all()
                .build()?;
            rt.block_on(service::serve(s))?;
        }
        Command::Replay { manifest, out } => {
            let r = commands::cmd_replay(&manifest, out)?;
            for (role, _) in &r.checked {
                println!("{role}: identical");
            }
        }
    }
    Ok(())
}
