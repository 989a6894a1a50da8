use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use dragrepo_core::clock::SystemClock;
use dragrepo_core::repository::{load, save, RepoTree, MANIFEST_FILE};
use dragrepo_service::{router, AppState};

#[derive(Parser)]
#[command(
    name = "repo-service",
    about = "Serve a component repository over HTTP"
)]
struct Args {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Repository directory; created if it holds no repository yet.
    #[arg(long)]
    repo: PathBuf,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let tree = if args.repo.join(MANIFEST_FILE).exists() {
        load(&args.repo)
    } else {
        let tree = RepoTree::new();
        save(&tree, &args.repo).map(|_| tree)
    };
    let tree = match tree {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            return ExitCode::FAILURE;
        }
    };
    let state = AppState::new(tree, Some(args.repo), Arc::new(SystemClock));
    let listener = match tokio::net::TcpListener::bind(args.listen).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("cannot listen on {}: {e}", args.listen);
            return ExitCode::FAILURE;
        }
    };
    eprintln!("listening on {}", args.listen);
    let served = axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    match served {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
