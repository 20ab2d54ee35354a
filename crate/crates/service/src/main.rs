use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use htg_service::{router, Catalog};

#[derive(Parser)]
#[command(name = "htg-serve", version, about = "Serve adaptive hypertree grid surfaces over HTTP")]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Directory of grid files (`*.json`); each is served under its file stem.
    #[arg(long)]
    grids: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let catalog = match &args.grids {
        Some(dir) => match Catalog::load_dir(dir) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: loading grids from {}: {e}", dir.display());
                return ExitCode::from(if matches!(e, htg_core::Error::Io(_)) { 1 } else { 2 });
            }
        },
        None => Catalog::new(),
    };
    let addr = SocketAddr::new(args.host, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: binding {addr}: {e}");
            return ExitCode::from(1);
        }
    };
    eprintln!("serving {} grid(s) on http://{}", catalog.len(), listener.local_addr().map_or(addr, |a| a));
    if let Err(e) = axum::serve(listener, router(Arc::new(catalog))).await {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
