use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use svemu::bench::{
    format_report, run_benchmark_with, BenchmarkSource, BenchmarkSpec, Family, MonotonicClock, ReportFormat,
};
use svemu::{run_source_at, ExecConfig, Precision};

/// Used when total RAM cannot be determined.
const FALLBACK_MEMORY_LIMIT: u64 = 4 << 30;

#[derive(Parser, Debug)]
#[command(
    name = "svemu",
    version,
    about = "Exact state-vector emulator for OpenQASM 2.0 programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a program once and print its classical registers.
    Run {
        file: PathBuf,
        #[command(flatten)]
        exec: ExecFlags,
    },
    /// Time programs over repeated runs and print statistics.
    Bench {
        /// OpenQASM files to benchmark.
        files: Vec<PathBuf>,
        /// Generated circuit to benchmark: qft:N, ghz:N or bv:BITS (repeatable).
        #[arg(long = "gen", value_name = "FAMILY")]
        families: Vec<Family>,
        /// Runs per benchmark.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        /// Report format: text, json or csv.
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        exec: ExecFlags,
    },
    /// Write a generated circuit as OpenQASM source.
    Gen {
        /// qft:N, ghz:N or bv:BITS.
        family: Family,
        /// Output path, or `-` for standard output.
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ExecFlags {
    /// Amplitude precision: single or double.
    #[arg(long, default_value = "double")]
    precision: Precision,
    /// Worker threads [default: available cores].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Seed for measurement sampling (benchmarks use seed + run index).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest state to allocate, in bytes [default: 75% of system RAM].
    #[arg(long, value_name = "BYTES")]
    memory_limit: Option<u64>,
}

impl ExecFlags {
    fn config(&self) -> Result<ExecConfig, String> {
        let mut config =
            ExecConfig::default().with_memory_limit(self.memory_limit.unwrap_or_else(default_memory_limit));
        if let Some(t) = self.threads {
            config = config.with_threads(t as usize).map_err(|e| e.to_string())?;
        }
        Ok(config)
    }
}

fn default_memory_limit() -> u64 {
    total_memory().map_or(FALLBACK_MEMORY_LIMIT, |total| total / 4 * 3)
}

fn total_memory() -> Option<u64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    kib.checked_mul(1024)
}

fn read_source(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => format!("{}: no such file", path.display()),
        _ => format!("{}: {e}", path.display()),
    })
}

fn base_dir(path: &Path) -> &Path {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
}

fn cmd_run(file: &Path, exec: &ExecFlags) -> Result<(), String> {
    let source = read_source(file)?;
    let config = exec.config()?;
    let out = run_source_at(&source, base_dir(file), exec.precision, exec.seed, &config)
        .map_err(|e| format!("{}: {e}", file.display()))?;
    let mut stdout = io::stdout().lock();
    write!(stdout, "{}", out.classical).map_err(|e| e.to_string())?;
    writeln!(stdout, "norm = {:.12}", out.final_norm).map_err(|e| e.to_string())
}

fn cmd_bench(
    files: &[PathBuf],
    families: &[Family],
    runs: usize,
    format: ReportFormat,
    out: Option<&Path>,
    exec: &ExecFlags,
) -> Result<(), String> {
    let config = exec.config()?;
    let template = BenchmarkSpec {
        threads: config.threads(),
        precision: exec.precision,
        seed_base: exec.seed,
        ..BenchmarkSpec::generated(Family::Ghz(2), runs)
    };
    if files.is_empty() && families.is_empty() {
        return Err("nothing to benchmark: pass OpenQASM files or --gen FAMILY".into());
    }
    let mut specs = Vec::new();
    for f in files {
        specs.push(read_source(f).map(|text| BenchmarkSpec {
            name: f.display().to_string(),
            source: BenchmarkSource::Qasm {
                text,
                base_path: base_dir(f).to_path_buf(),
            },
            ..template.clone()
        }));
    }
    for fam in families {
        specs.push(Ok(BenchmarkSpec {
            name: fam.to_string(),
            source: BenchmarkSource::Generated(fam.clone()),
            ..template.clone()
        }));
    }
    let mut reports = Vec::new();
    let mut failure = None;
    for spec in specs {
        let result = spec.and_then(|spec| {
            run_benchmark_with(&spec, &config, &mut MonotonicClock::default())
                .map_err(|e| format!("{}: {e}", spec.name))
        });
        match result {
            Ok(r) => reports.push(r),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let text = format_report(&reports, format);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())?,
    }
    failure.map_or(Ok(()), Err)
}

fn cmd_gen(family: &Family, out: &Path) -> Result<(), String> {
    let source = family.generate().map_err(|e| e.to_string())?;
    if out == Path::new("-") {
        io::stdout()
            .lock()
            .write_all(source.as_bytes())
            .map_err(|e| e.to_string())
    } else {
        std::fs::write(out, source).map_err(|e| format!("{}: {e}", out.display()))
    }
}

fn usage_for(subcommand: Option<&str>) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match subcommand.and_then(|name| cmd.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", usage_for(std::env::args().nth(1).as_deref()));
            }
            return ExitCode::FAILURE;
        }
    };
    let result = match &cli.command {
        Command::Run { file, exec } => cmd_run(file, exec),
        Command::Bench {
            files,
            families,
            runs,
            format,
            out,
            exec,
        } => cmd_bench(files, families, *runs as usize, *format, out.as_deref(), exec),
        Command::Gen { family, out } => cmd_gen(family, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("svemu: {msg}");
            ExitCode::FAILURE
        }
    }
}
