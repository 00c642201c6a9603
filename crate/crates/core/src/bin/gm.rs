use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use gm_core::cli::{play_loop, replay};
use gm_core::engine::{CampaignTrace, EngineConfig, GameMaster};
use gm_core::llm::{load_script, GenerationSettings, HttpBackend, LlmBackend};
use gm_core::service::{serve, AppState};
use gm_core::state::{pregenerated_story, CampaignId, CampaignStore, Engine, NewCampaign, SystemClock};

#[derive(Parser)]
#[command(name = "gm", version, about = "Solo tabletop RPG game master")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the HTTP API and the web UI.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Play in the terminal.
    Play {
        #[arg(long, value_parser = parse_engine, default_value = "v2")]
        engine: Engine,
        #[arg(long)]
        seed: Option<u64>,
        /// Resume a saved campaign instead of starting a new one.
        #[arg(long, conflicts_with_all = ["engine", "seed"])]
        campaign: Option<String>,
        #[arg(long, default_value = "Fantasy")]
        setting: String,
        /// Opening scenario; a pre-generated one when omitted.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value = "Adventurer")]
        name: String,
        #[arg(long, default_value = "")]
        description: String,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a saved campaign against a script and compare transcripts.
    Replay {
        #[arg(long)]
        campaign: String,
        #[arg(long)]
        script: PathBuf,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
    },
    /// Print a campaign's turn traces as JSON.
    ExportTrace {
        #[arg(long)]
        campaign: String,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = BackendKind::Real)]
    backend: BackendKind,
    /// Script file for `--backend script`.
    #[arg(long, required_if_eq("backend", "script"))]
    script: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Real,
    Script,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn game_master(common: &Common) -> Result<GameMaster, String> {
    let (backend, generation): (Arc<dyn LlmBackend>, _) = match common.backend {
        BackendKind::Script => {
            let path = common.script.as_ref().ok_or("--script is required")?;
            (Arc::new(load_script(path).map_err(|e| e.to_string())?), GenerationSettings::deterministic())
        }
        BackendKind::Real => {
            let http = HttpBackend::from_env().map_err(|e| e.to_string())?;
            let generation = GenerationSettings::play(http.config().model.clone());
            (Arc::new(http), generation)
        }
    };
    let config = EngineConfig {
        generation,
        ..EngineConfig::default()
    };
    Ok(GameMaster::new(backend, Arc::new(SystemClock), config))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Serve { port, ui_dir, common } => {
            let store = CampaignStore::open(&common.data_dir).map_err(|e| e.to_string())?;
            let state = Arc::new(AppState::new(store, game_master(&common)?));
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            rt.block_on(serve(state, SocketAddr::from(([127, 0, 0, 1], port)), ui_dir))
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Play {
            engine,
            seed,
            campaign,
            setting,
            scenario,
            name,
            description,
            common,
        } => {
            let store = CampaignStore::open(&common.data_dir).map_err(|e| e.to_string())?;
            let gm = game_master(&common)?;
            let mut campaign = match campaign {
                Some(id) => store.load(&CampaignId(id)).map_err(|e| e.to_string())?,
                None => {
                    let seed = seed.unwrap_or_else(rand::random);
                    let params = NewCampaign {
                        id: None,
                        start_scenario: scenario.unwrap_or_else(|| pregenerated_story(&setting, seed).to_string()),
                        setting,
                        player_name: name,
                        player_description: description,
                        engine,
                        rng_seed: seed,
                    };
                    let c = gm.create_campaign(params).map_err(|e| e.to_string())?;
                    store.create(&c).map_err(|e| e.to_string())?;
                    c
                }
            };
            println!("Campaign {} (seed {})", campaign.id, campaign.rng_seed);
            play_loop(&gm, &mut campaign, Some(&store), io::stdin().lock(), &mut io::stdout())
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay {
            campaign,
            script,
            data_dir,
        } => {
            let store = CampaignStore::open(&data_dir).map_err(|e| e.to_string())?;
            let stored = store.load(&CampaignId(campaign)).map_err(|e| e.to_string())?;
            let backend = Arc::new(load_script(&script).map_err(|e| e.to_string())?);
            let (_, report) = replay(&stored, backend, EngineConfig::default()).map_err(|e| e.to_string())?;
            println!("turns {}", report.turns);
            println!("transcript {}", report.replayed_hash);
            if report.matches() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("replay diverged: recorded transcript {}", report.recorded_hash);
                Ok(ExitCode::FAILURE)
            }
        }
        Command::ExportTrace { campaign, data_dir } => {
            let store = CampaignStore::open(&data_dir).map_err(|e| e.to_string())?;
            let id = CampaignId(campaign);
            if !store.exists(&id) {
                return Err(format!("campaign {id} not found"));
            }
            let trace: CampaignTrace = store.load_trace(&id).map_err(|e| e.to_string())?;
            let json = serde_json::to_string_pretty(&trace).map_err(|e| e.to_string())?;
            writeln!(io::stdout(), "{json}").map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gm: {e}");
            ExitCode::FAILURE
        }
    }
}
