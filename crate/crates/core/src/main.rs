use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fqsd::config::Overrides;
use fqsd::figdata::{figdata, Figure};
use fqsd::io::{resolve_out_dir, write_json};
use fqsd::run::run_config;
use fqsd::verify::{run_suite, Suite};
use fqsd::Error;

/// Non-Markovian dynamics of open systems in fermionic baths.
///
/// The output directory is `--out`, else `$FQSD_OUT_DIR`, else the
/// config's `outputs.dir`, else `./out`.
#[derive(Parser)]
#[command(name = "fqsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Overriding {
    /// Override the integrator step.
    #[arg(long = "h")]
    h: Option<f64>,
    /// Override the integrator horizon.
    #[arg(long = "T")]
    t_final: Option<f64>,
}

impl From<Overriding> for Overrides {
    fn from(o: Overriding) -> Self {
        Overrides {
            h: o.h,
            t_final: o.t_final,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve coefficients and the master equation for a config (and its sweep).
    Run {
        config: PathBuf,
        #[command(flatten)]
        ov: Overriding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite: novikov, recovery, oracle, chain, symmetry, markov, all.
    Verify {
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the data series of fig1..fig4.
    Figdata {
        fig: String,
        config: PathBuf,
        #[command(flatten)]
        ov: Overriding,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("fqsd: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, ov, out } => match run_config(&config, ov.into(), out.as_deref()) {
            Ok(s) => {
                for o in &s.outcomes {
                    for f in &o.files {
                        println!("{}", s.out_dir.join(&f.path).display());
                    }
                }
                println!("{}", s.out_dir.join(&s.manifest.path).display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Verify { suite, out } => {
            let result = suite.parse::<Suite>().and_then(|s| {
                let report = run_suite(s)?;
                let dir = resolve_out_dir(out.as_deref(), None);
                let entry = write_json(&dir.join(format!("verify_{}.json", s.name())), &report)?;
                Ok((report, dir.join(entry.path)))
            });
            match result {
                Ok((report, path)) => {
                    for c in &report.checks {
                        println!(
                            "{} [{}] {}: measured {:.3e}, tolerance {:.3e}",
                            if c.pass { "PASS" } else { "FAIL" },
                            c.suite,
                            c.check,
                            c.measured,
                            c.tolerance
                        );
                    }
                    println!("report: {}", path.display());
                    if report.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Figdata { fig, config, ov, out } => {
            match fig
                .parse::<Figure>()
                .and_then(|f| figdata(f, &config, ov.into(), out.as_deref()))
            {
                Ok(s) => {
                    for f in &s.files {
                        println!("{}", s.out_dir.join(&f.path).display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
