use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gtree::{router, trajectory_text, ServiceConfig, TrajectoryBody};
use gtree_core::collatz::{trajectory, CollatzValue};
use gtree_core::region::{render_region, RegionFormat, RegionLimits, RegionRequest};
use gtree_core::verify::verify_range;

#[derive(Parser)]
#[command(
    name = "gtree",
    version,
    about = "Explore the 3x+1 predecessor tree built from G-cells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the trajectory of n down to 1.
    Trajectory {
        n: CollatzValue,
        #[arg(long)]
        json: bool,
    },
    /// Check that every start in [from, to] reaches 1.
    Verify {
        #[arg(long)]
        from: CollatzValue,
        #[arg(long)]
        to: CollatzValue,
    },
    /// Generate and lay out a region, then write it as a scene or interchange document.
    Generate {
        #[arg(long)]
        max_value: u64,
        #[arg(long)]
        max_gen: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "interchange")]
        format: RegionFormat,
        /// Output file, `-` for stdout.
        #[arg(short, long, default_value = "-")]
        output: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "GTREE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory of static files served under `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Trajectory { n, json } => {
            let t = trajectory(n)?;
            let mut out = io::stdout().lock();
            if json {
                serde_json::to_writer(&mut out, &TrajectoryBody::from(&t))?;
                writeln!(out)?;
            } else {
                out.write_all(trajectory_text(&t).as_bytes())?;
            }
        }
        Command::Verify { from, to } => {
            let r = verify_range(from, to)?;
            println!("range: [{}, {}]", r.lo, r.hi);
            println!(
                "longest: {} steps from {}",
                r.max_length.value, r.max_length.start
            );
            println!("highest: {} from {}", r.max_peak.value, r.max_peak.start);
            if let Some(f) = r.failure {
                bail!("start {} did not converge ({:?})", f.start, f.reason);
            }
            println!("all converged");
        }
        Command::Generate {
            max_value,
            max_gen,
            seed,
            format,
            output,
        } => {
            let req = RegionRequest {
                seed,
                max_value,
                max_generation: max_gen,
                format,
            };
            let doc = render_region(&req, &RegionLimits::NONE)?;
            if output.as_os_str() == "-" {
                io::stdout().lock().write_all(doc.body.as_bytes())?;
            } else {
                fs::write(&output, doc.body)
                    .with_context(|| format!("writing {}", output.display()))?;
            }
        }
        Command::Serve { port, host, assets } => {
            if let Some(dir) = &assets {
                if !dir.is_dir() {
                    bail!("--assets: {} is not a directory", dir.display());
                }
            }
            let app = router(ServiceConfig {
                assets,
                ..ServiceConfig::default()
            });
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let addr = SocketAddr::new(host, port);
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                eprintln!("gtree: listening on http://{}", listener.local_addr()?);
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            // clap's report spans several lines; keep only the diagnostic
            let text = e.render().to_string();
            let line: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            eprintln!("gtree: {}", line.join(" "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtree: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
