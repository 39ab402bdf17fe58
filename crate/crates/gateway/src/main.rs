use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hierasm_core::placement::Placement;
use hierasm_core::SpecDocument;
use hierasm_gateway::formats::{read_json, to_canonical_json};
use hierasm_gateway::{GatewayError, Problem, SceneFile, Settings};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "hierasm", version, about = "Hierarchical assembly planning")]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Grid cell size for hull point reduction (default: derived from the input).
    #[arg(long, global = true)]
    cell_size: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scene (and optionally a spec) without planning.
    Validate { scene: PathBuf, spec: Option<PathBuf> },
    /// Padded convex hull of every group.
    Hull { scene: PathBuf, spec: PathBuf },
    /// Solve poses for free groups.
    Resolve { scene: PathBuf, spec: PathBuf },
    /// Settle a placement into contact.
    Settle { scene: PathBuf, spec: PathBuf, placement: PathBuf },
    /// Group tour and per-group object order for a placement.
    Sequence { scene: PathBuf, spec: PathBuf, placement: PathBuf },
    /// Full pipeline: resolve, settle, sequence, motion plan.
    Plan { scene: PathBuf, spec: PathBuf },
    /// Run the authoring session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn problem(scene: &Path, spec: &Path) -> Result<Problem, GatewayError> {
    let s: SceneFile = read_json(scene)?;
    let d: SpecDocument = read_json(spec)?;
    Problem::new(s, &d, scene.parent())
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), GatewayError> {
    let text = to_canonical_json(value)?;
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| GatewayError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), GatewayError> {
    let settings = Settings {
        seed: cli.seed,
        cell_size: cli.cell_size,
    };
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::Validate { scene, spec } => {
            let s: SceneFile = read_json(&scene)?;
            match spec {
                Some(spec) => {
                    let d: SpecDocument = read_json(&spec)?;
                    Problem::new(s, &d, scene.parent())?;
                }
                None => {
                    s.validate()?;
                    s.load_arm(scene.parent())?;
                }
            }
            emit(&json!({ "valid": true }), out)
        }
        Cmd::Hull { scene, spec } => emit(&problem(&scene, &spec)?.hulls(&settings)?, out),
        Cmd::Resolve { scene, spec } => emit(&problem(&scene, &spec)?.resolve(&settings)?, out),
        Cmd::Settle { scene, spec, placement } => {
            let p: Placement = read_json(&placement)?;
            emit(&problem(&scene, &spec)?.settle(&p)?, out)
        }
        Cmd::Sequence { scene, spec, placement } => {
            let p: Placement = read_json(&placement)?;
            let (tour, sequences) = problem(&scene, &spec)?.sequence(&p)?;
            emit(&json!({ "tour": tour, "sequences": sequences }), out)
        }
        Cmd::Plan { scene, spec } => emit(&problem(&scene, &spec)?.plan(&settings)?, out),
        Cmd::Serve { port } => serve(port),
    }
}

fn serve(port: u16) -> Result<(), GatewayError> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| GatewayError::Io(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
            .await
            .map_err(|e| GatewayError::Io(e.to_string()))?;
        eprintln!("listening on {}", listener.local_addr().map_err(|e| GatewayError::Io(e.to_string()))?);
        axum::serve(listener, hierasm_gateway::service::router())
            .await
            .map_err(|e| GatewayError::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
