use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use refground_core::external::{
    HttpEndpoint, MCQA_KEY_VAR, MCQA_URL_VAR, PARSER_KEY_VAR, PARSER_URL_VAR,
};
use refground_harness::bench::{cmd_bench, render_table};
use refground_harness::config::Config;
use refground_harness::dataset::Dataset;
use refground_harness::generate::{cmd_generate, scene_files};
use refground_harness::ground::Grounder;
use refground_harness::server::cmd_serve;
use refground_harness::split::{cmd_split, parse_ratios};
use refground_harness::synth::cmd_synthesize;

#[derive(Parser)]
#[command(
    name = "refground",
    version,
    about = "Scene graphs, referential statements and grounding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParserMode {
    Grammar,
    External,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorMode {
    Heuristic,
    External,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded synthetic scenes.
    Synthesize {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build graphs and statements from scene files.
    Generate {
        /// Scene file, or directory of `*.json` scene files.
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides `dataset.imperfect_ratio` from the config.
        #[arg(long)]
        imperfect_ratio: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ground every statement of a dataset and report metrics.
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "grammar")]
        parser: ParserMode,
        #[arg(long, value_enum, default_value = "heuristic")]
        selector: SelectorMode,
        /// Report path; the table and statement log are written beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition scenes into seeded splits.
    Split {
        /// Dataset directory, or directory of scene files.
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long, default_value = "0.8,0.2")]
        ratios: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "split.json")]
        out: PathBuf,
    },
    /// Serve the grounding API over a dataset.
    Serve {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, value_enum, default_value = "grammar")]
        parser: ParserMode,
        #[arg(long, value_enum, default_value = "heuristic")]
        selector: SelectorMode,
    },
}

fn grounder(dataset: &Dataset, parser: ParserMode, selector: SelectorMode) -> Result<Grounder> {
    let mut g = Grounder::new(dataset.manifest.config.scoring);
    if let ParserMode::External = parser {
        g = g.with_external_parser(Box::new(HttpEndpoint::from_env(
            PARSER_URL_VAR,
            PARSER_KEY_VAR,
        )?));
    }
    if let SelectorMode::External = selector {
        g = g.with_external_selector(Box::new(HttpEndpoint::from_env(
            MCQA_URL_VAR,
            MCQA_KEY_VAR,
        )?));
    }
    Ok(g)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synthesize { count, seed, out } => {
            let paths = cmd_synthesize(count, seed, &out)?;
            println!("wrote {} scenes to {}", paths.len(), out.display());
        }
        Command::Generate {
            scenes,
            config,
            seed,
            imperfect_ratio,
            out,
        } => {
            let mut config = match config {
                Some(path) => Config::load(&path)?,
                None => Config::default(),
            };
            if let Some(ratio) = imperfect_ratio {
                config.dataset.imperfect_ratio = ratio;
            }
            let files = scene_files(&scenes)?;
            if files.is_empty() {
                bail!("no scene files under {}", scenes.display());
            }
            let summary = cmd_generate(&files, &config, seed, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Bench {
            data,
            parser,
            selector,
            out,
        } => {
            let dataset = Dataset::load(&data)?;
            let report = cmd_bench(&dataset, &grounder(&dataset, parser, selector)?, &out)?;
            print!("{}", render_table(&report));
        }
        Command::Split {
            scenes,
            ratios,
            seed,
            out,
        } => {
            let manifest = cmd_split(&scenes, &parse_ratios(&ratios)?, seed, &out)?;
            for part in &manifest.parts {
                println!("{}: {}", part.name, part.scenes.len());
            }
        }
        Command::Serve {
            data,
            port,
            host,
            parser,
            selector,
        } => {
            let dataset = Dataset::load(&data)?;
            let g = grounder(&dataset, parser, selector)?;
            cmd_serve(dataset, SocketAddr::new(host, port), g)?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
