//! `fincast`: inflation forecasting, stock price prediction and a support
//! chat crew from one binary.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 bad input data or flags,
//! 3 singular ARIMA fit, 4 too little data, 5 unreadable model file,
//! 6 chat backend failure.

mod chat;
mod failure;
mod inflation;
mod run;
mod stock;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fincast", version, about = "Financial forecasting and support tools")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Root directory for run outputs
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Run directory name (default: UTC timestamp)
    #[arg(long, global = true)]
    pub tag: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Forecast annual inflation from World Bank data
    Inflation(inflation::InflationArgs),
    /// Train or apply the LSTM close-price model
    #[command(subcommand)]
    Stock(stock::StockCommand),
    /// Ask the support crew a finance question
    Chat(chat::ChatArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Inflation(args) => inflation::run(args, &cli.output),
        Command::Stock(cmd) => stock::run(cmd, &cli.output),
        Command::Chat(args) => chat::run(args, &cli.output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
