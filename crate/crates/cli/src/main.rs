use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use climbloop_core::assets;
use climbloop_core::protocol::SessionHost;
use climbloop_core::replay::{self, format_hash_line, RunOptions};
use climbloop_core::{load_script, parse_level, parse_trace, Engine, Tunables};

const EXIT_IO: u8 = 1;
const EXIT_ASSET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

/// Headless runner and session server for the tower climb.
#[derive(Parser)]
#[command(name = "climbloop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an input trace and print its event log or hashes.
    Run(RunArgs),
    /// Check a level and script against each other.
    Validate(ValidateArgs),
    /// Serve the line protocol to one client at a time.
    Serve(ServeArgs),
}

/// Asset paths; any left out fall back to the shipped files.
#[derive(Args)]
struct AssetArgs {
    #[arg(long)]
    level: Option<PathBuf>,
    #[arg(long)]
    script: Option<PathBuf>,
    #[arg(long)]
    tunables: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    assets: AssetArgs,
    #[arg(long)]
    trace: PathBuf,
    /// Print `<tick> <digest>` every N ticks, plus the last tick.
    #[arg(long, value_name = "N", conflicts_with = "hash_only")]
    hash_every: Option<u64>,
    /// Print only the final `<tick> <digest>` line.
    #[arg(long)]
    hash_only: bool,
    /// Golden hash file to check against.
    #[arg(long, value_name = "GOLDEN")]
    expect: Option<PathBuf>,
    /// Also write the event log here.
    #[arg(long, value_name = "OUT")]
    events: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    level: Option<PathBuf>,
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    assets: AssetArgs,
    /// Port on 127.0.0.1; 0 picks a free one.
    #[arg(long, default_value_t = 7878)]
    port: u16,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .code(EXIT_IO)
}

fn read_or(path: &Option<PathBuf>, shipped: &str) -> Result<String, Failure> {
    match path {
        Some(p) => read(p),
        None => Ok(shipped.to_string()),
    }
}

fn load_engine(a: &AssetArgs) -> Result<Engine, Failure> {
    let level = parse_level(&read_or(&a.level, assets::TOWER_LEVEL)?)
        .context("level")
        .code(EXIT_ASSET)?;
    let script = load_script(&read_or(&a.script, assets::MANUSCRIPT)?)
        .context("script")
        .code(EXIT_ASSET)?;
    let tunables = Tunables::parse(&read_or(&a.tunables, assets::DEFAULT_TUNABLES)?)
        .context("tunables")
        .code(EXIT_ASSET)?;
    Engine::new(level, script, tunables).code(EXIT_ASSET)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let engine = load_engine(&args.assets)?;
    let trace = parse_trace(&read(&args.trace)?)
        .with_context(|| format!("trace {}", args.trace.display()))
        .code(EXIT_ASSET)?;
    let expect = match &args.expect {
        Some(p) => replay::parse_golden(&read(p)?)
            .with_context(|| format!("golden {}", p.display()))
            .code(EXIT_ASSET)?,
        None => Vec::new(),
    };
    let report = replay::run(
        &engine,
        &trace,
        &RunOptions {
            hash_every: args.hash_every,
            expect,
        },
    );

    let log = report.event_log();
    if let Some(path) = &args.events {
        fs::write(path, &log)
            .with_context(|| format!("writing {}", path.display()))
            .code(EXIT_IO)?;
    }
    let mut out = String::new();
    if args.hash_only {
        out = format_hash_line(report.ticks, report.final_hash) + "\n";
    } else if args.hash_every.is_some() {
        for &(tick, digest) in &report.hashes {
            out.push_str(&format_hash_line(tick, digest));
            out.push('\n');
        }
    } else {
        out = log;
    }
    std::io::stdout().write_all(out.as_bytes()).code(EXIT_IO)?;

    if !report.mismatches.is_empty() {
        for m in &report.mismatches {
            match m.actual {
                Some(a) => eprintln!("tick {}: expected {:016x}, got {a:016x}", m.tick, m.expected),
                None => eprintln!("tick {}: expected {:016x}, run ended at {}", m.tick, m.expected, report.ticks),
            }
        }
        return Err(Failure {
            code: EXIT_MISMATCH,
            error: anyhow::anyhow!("{} golden mismatch(es)", report.mismatches.len()),
        });
    }
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let engine = load_engine(&AssetArgs {
        level: args.level,
        script: args.script,
        tunables: None,
    })?;
    let level = engine.level();
    println!(
        "ok: {}x{} tiles, {} platforms, {} triggers, {} conversations, timer {} s",
        level.width,
        level.height,
        level.platforms.len(),
        level.triggers.len(),
        engine.script().len(),
        level.timer_seconds
    );
    Ok(())
}

fn serve_client(host: &mut SessionHost, stream: TcpStream) -> std::io::Result<()> {
    let mut writer = stream.try_clone()?;
    for line in BufReader::new(stream).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut out = String::new();
        for msg in host.handle_line(&line) {
            out.push_str(&msg.to_line());
            out.push('\n');
        }
        writer.write_all(out.as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), Failure> {
    let engine = load_engine(&args.assets)?;
    let listener = TcpListener::bind(("127.0.0.1", args.port))
        .with_context(|| format!("binding port {}", args.port))
        .code(EXIT_IO)?;
    let addr = listener.local_addr().code(EXIT_IO)?;
    println!("listening on {addr}");
    std::io::stdout().flush().code(EXIT_IO)?;
    let mut host = SessionHost::new(engine);
    for stream in listener.incoming() {
        match stream {
            Ok(s) => {
                if let Err(e) = serve_client(&mut host, s) {
                    eprintln!("client dropped: {e}");
                }
            }
            Err(e) => eprintln!("accept failed: {e}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Validate(a) => validate(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
