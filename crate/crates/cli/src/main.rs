//! sessionlift: abstract low-level event logs into high-level activity logs.
//!
//! ## Commands
//! - `run`: full pipeline (parse, sessionize, encode, cluster, name, abstract)
//! - `sessionize` / `encode` / `cluster` / `name` / `abstract`: single stages
//!   over intermediate artifacts, for inspection and reuse
//! - `synth`: generate a synthetic log with planted ground truth
//! - `eval`: adjusted Rand index of a model against planted labels

use clap::{Parser, Subcommand};

mod args;
mod artifacts;
mod cli_error;
mod cmd_abstract;
mod cmd_cluster;
mod cmd_encode;
mod cmd_eval;
mod cmd_name;
mod cmd_run;
mod cmd_sessionize;
mod cmd_synth;
mod pipeline;
mod report;

#[derive(Parser)]
#[command(name = "sessionlift")]
#[command(version, about = "Session-based event-log abstraction", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Run the whole abstraction pipeline
    Run(cmd_run::RunArgs),
    /// Split traces into sessions and list them
    Sessionize(cmd_sessionize::SessionizeArgs),
    /// Encode sessions as vectors over the activity alphabet
    Encode(cmd_encode::EncodeArgs),
    /// Cluster a session-vector matrix
    Cluster(cmd_cluster::ClusterCmdArgs),
    /// Name clusters and render the centroid heatmap
    Name(cmd_name::NameArgs),
    /// Replace each session with a start/complete pair named by its cluster
    Abstract(cmd_abstract::AbstractArgs),
    /// Generate a synthetic log with planted sessions and labels
    Synth(cmd_synth::SynthArgs),
    /// Score a model against planted labels (adjusted Rand index)
    Eval(cmd_eval::EvalArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Commands::Run(args) => cmd_run::run(args),
        Commands::Sessionize(args) => cmd_sessionize::run(args),
        Commands::Encode(args) => cmd_encode::run(args),
        Commands::Cluster(args) => cmd_cluster::run(args),
        Commands::Name(args) => cmd_name::run(args),
        Commands::Abstract(args) => cmd_abstract::run(args),
        Commands::Synth(args) => cmd_synth::run(args),
        Commands::Eval(args) => cmd_eval::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
