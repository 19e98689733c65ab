use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use widthlab::width::{fmt_f64, theory_constants, ConstantsConfig, Domain};
use widthlab::Execution;
use widthlab_cli::{report_table1, run, table1_csv, validate_config, RunOptions};

#[derive(Parser)]
#[command(name = "widthlab", version, about = "Decoder-width experiments for parametric PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the mesh as `mesh.txt`.
    #[arg(long, global = true)]
    dump_mesh: bool,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run { config: PathBuf },
    /// Check a config and print it with defaults filled in.
    Validate { config: PathBuf },
    /// Run every config in a directory and print the combined Table 1 CSV.
    Table1 { dir: PathBuf },
    /// Print the constants ledger.
    Constants {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long = "R", default_value_t = 2.0)]
        big_r: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value = "unit_square")]
        domain: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Advection basis norms, comma separated.
        #[arg(long, value_delimiter = ',')]
        mus: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = widthlab_cli::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let opts = RunOptions { exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel }, dump_mesh: cli.dump_mesh };
    match real_main(&cli, opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: &Cli, opts: RunOptions) -> Result<bool, Box<dyn std::error::Error>> {
    match &cli.command {
        Command::Run { config } => {
            let mut cfg = validate_config(config)?;
            if let Some(s) = cli.seed {
                cfg.seed = Some(s);
            }
            let bundle = run(&cfg, opts)?;
            let dir = cli.out.clone().or_else(|| cfg.output_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
            bundle.write(&dir)?;
            for c in &bundle.summary.checks {
                println!("{} {}: {} (bound {})", if c.pass { "PASS" } else { "FAIL" }, c.name, fmt_f64(c.value), fmt_f64(c.bound));
            }
            println!("wrote {}", dir.display());
            Ok(bundle.summary.pass)
        }
        Command::Validate { config } => {
            let cfg = validate_config(config)?;
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(true)
        }
        Command::Table1 { dir } => {
            let (rows, bundles) = report_table1(dir, opts)?;
            let csv = table1_csv(&rows);
            if let Some(out) = &cli.out {
                std::fs::create_dir_all(out)?;
                std::fs::write(out.join("table1.csv"), &csv)?;
                for b in &bundles {
                    b.write(&out.join(b.summary.example_id.name()))?;
                }
            }
            print!("{csv}");
            Ok(bundles.iter().all(|b| b.summary.pass))
        }
        Command::Constants { r, big_r, t_final, domain, d, mus } => {
            let dom = Domain::parse(domain).ok_or_else(|| format!("unknown domain {domain:?}"))?;
            let ledger = theory_constants(&ConstantsConfig::new(*r, *big_r, *t_final, dom, *d).with_basis_norms(mus.clone()))?;
            for e in ledger.entries() {
                println!("{:<14} {:<22} {}", e.name, fmt_f64(e.value), e.formula);
            }
            Ok(true)
        }
    }
}
