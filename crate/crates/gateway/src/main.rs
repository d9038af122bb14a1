use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use socnav_core::{Condition, Layout, PedConfig};
use socnav_gateway::{run_batch, serve, BatchSpec, PolicySpec, ServeOptions};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "socnav", version, about = "Shared-autonomy social navigation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded headless trials and write logs plus a summary.
    Run(RunArgs),
    /// Accept one live operator over a websocket at /ws.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// approach, crossing or random.
    #[arg(long)]
    scenario: PedConfig,
    /// a or b.
    #[arg(long, default_value = "a")]
    layout: Layout,
    /// mc, h, vt, vb, hvt or hvb.
    #[arg(long)]
    condition: Condition,
    /// goal_seek, compliant, noisy or replay:<file>.
    #[arg(long)]
    policy: PolicySpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of trials; seeds run from --seed upward.
    #[arg(long, default_value_t = 1)]
    repeat: u32,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Trial timeout, s.
    #[arg(long)]
    max_duration: Option<f64>,
    #[arg(long)]
    ped_count: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "SOCNAV_PORT", default_value_t = 8765)]
    port: u16,
    #[arg(long, env = "SOCNAV_BIND", default_value = "127.0.0.1")]
    bind: IpAddr,
    /// Directory for live trial logs.
    #[arg(long, default_value = "logs")]
    out: PathBuf,
    /// Simulated seconds per wall-clock second.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    /// Tick only after each StateUpdate has been answered by an Input.
    #[arg(long)]
    lockstep: bool,
    /// Static files for the browser client.
    #[arg(long)]
    assets: Option<PathBuf>,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Serve(args) => serve_cmd(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let spec = BatchSpec {
        scenario: args.scenario,
        layout: args.layout,
        condition: args.condition,
        policy: args.policy,
        seed: args.seed,
        repeat: args.repeat,
        out: args.out,
        max_duration: args.max_duration,
        ped_count: args.ped_count,
    };
    match run_batch(&spec) {
        Ok(report) => {
            for (path, row) in report.logs.iter().zip(&report.rows) {
                println!("{} {:?} t={:.2}s", path.display(), row.status, row.metrics.trial_time);
            }
            println!("summary {}", report.summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn serve_cmd(args: ServeArgs) -> ExitCode {
    if args.speed.is_nan() || args.speed <= 0.0 {
        eprintln!("error: --speed must be positive");
        return ExitCode::from(2);
    }
    let opts = ServeOptions {
        out_dir: args.out,
        speed: args.speed,
        lockstep: args.lockstep,
        assets: args.assets,
    };
    let addr = SocketAddr::new(args.bind, args.port);
    let rt = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let result = rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on ws://{}/ws", listener.local_addr()?);
        serve(listener, opts).await
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
