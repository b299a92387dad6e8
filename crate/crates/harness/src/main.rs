use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wma_core::fisher::{
    f_total_closed, fisher_numeric_auto, fisher_std_closed, ratio_p_numeric, ratio_q_closed, ratio_q_numeric,
};
use wma_core::model::{overlap, postselect_probability, weak_value, Basis, ConditionalDensity};
use wma_core::montecarlo::crb_experiment;
use wma_harness::verify::parse_tolerances;
use wma_harness::{emit, parse_config, run_sweep, verify_paper, Cell, Config, Error, Format, Result, Table};

#[derive(Parser)]
#[command(
    name = "wma",
    version,
    about = "Weak-value amplification with a thermal pointer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::JsonLines,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the reproduction suite; exits 1 if any check fails.
    Verify {
        /// Tolerance override, e.g. `--tol cold_point=1e-6`. Repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
    /// Evaluate a parameter grid; exits 1 if any row failed.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fisher-information report for the configured scenario.
    Fisher {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Replicated maximum-likelihood experiment against the Cramér–Rao bound.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        replicates: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

fn read_config(path: &Path) -> Result<Config> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Io(_) | Error::Core(_) | Error::Usage(_) => e,
        other => Error::Usage(format!("{}: {other}", path.display())),
    })
}

fn key_value_table(rows: Vec<(&str, std::result::Result<f64, String>)>) -> Table {
    Table {
        columns: vec!["quantity".into(), "value".into()],
        rows: rows
            .into_iter()
            .map(|(k, v)| {
                let value = match v {
                    Ok(x) => Cell::Number(x),
                    Err(e) => Cell::Text(format!("error: {e}")),
                };
                vec![Cell::Text(k.into()), value]
            })
            .collect(),
    }
}

fn fisher_report(config: &Config) -> Result<Table> {
    let sc = config.scenario()?;
    let s = |r: wma_core::Result<f64>| r.map_err(|e| e.to_string());
    let am = postselect_probability(&sc)?;
    let conditional =
        ConditionalDensity::for_scenario(&sc).and_then(|d| fisher_numeric_auto(&d, sc.chi).map(|f| f.value));
    let ratio = match sc.basis {
        Basis::P => ratio_p_numeric(&sc),
        Basis::Q => ratio_q_numeric(&sc),
    };
    let wv = weak_value(&sc.system);
    Ok(key_value_table(vec![
        ("chi", Ok(sc.chi)),
        ("k2", Ok(sc.k2())),
        ("A_m", Ok(am)),
        ("F_conditional", s(conditional.clone())),
        ("A_m_F_conditional", s(conditional.map(|f| am * f))),
        ("F_std", s(fisher_std_closed(&sc, sc.pointer.z))),
        ("F_std_pure", s(fisher_std_closed(&sc, 0.0))),
        ("F_total", Ok(f_total_closed(&sc))),
        ("ratio", s(ratio)),
        ("ratio_q_closed", s(ratio_q_closed(&sc))),
        ("overlap", s(overlap(&sc))),
        (
            "weak_value_re",
            s(wv.as_ref().map(|w| w.re).map_err(Clone::clone)),
        ),
        ("weak_value_im", s(wv.map(|w| w.im))),
    ]))
}

fn simulate_report(config: &Config, trials: u64, replicates: u64, seed: u64) -> Result<Table> {
    let sc = config.scenario()?;
    let r = crb_experiment(&sc, trials, replicates, seed)?;
    Ok(key_value_table(vec![
        ("seed", Ok(r.seed as f64)),
        ("n_total", Ok(r.n_total as f64)),
        ("n_postselected", Ok(r.n_postselected as f64)),
        ("n_replicates", Ok(r.n_replicates as f64)),
        ("chi_true", Ok(r.chi_true)),
        ("chi_hat", Ok(r.chi_hat)),
        ("empirical_variance", Ok(r.empirical_variance)),
        ("crb", Ok(r.crb)),
        ("std_crb", Ok(r.std_crb)),
        ("postselect_probability", Ok(r.postselect_probability)),
        ("fisher_accepted", Ok(r.fisher_accepted)),
        ("efficiency_ratio", Ok(r.efficiency_ratio())),
        ("advantage_over_standard", Ok(r.advantage_over_standard())),
    ]))
}

fn run(cli: Cli) -> Result<bool> {
    let stdout = io::stdout();
    match cli.command {
        Command::Verify { tol } => {
            let report = verify_paper(&parse_tolerances(&tol)?);
            let mut out = stdout.lock();
            out.write_all(report.render().as_bytes())?;
            out.flush()?;
            Ok(report.overall)
        }
        Command::Sweep { config, format, out } => {
            let Config::Sweep(spec) = read_config(&config)? else {
                return Err(Error::Usage(format!(
                    "{}: no sweep.axes entries",
                    config.display()
                )));
            };
            let table = run_sweep(&spec);
            match out {
                Some(path) => emit(
                    &table.to_table(),
                    format.into(),
                    &mut BufWriter::new(fs::File::create(path)?),
                )?,
                None => emit(&table.to_table(), format.into(), &mut stdout.lock())?,
            }
            let errors = table.error_count();
            if errors > 0 {
                eprintln!("wma: {errors} of {} rows failed", table.rows.len());
            }
            Ok(errors == 0)
        }
        Command::Fisher { config, format } => {
            let table = fisher_report(&read_config(&config)?)?;
            emit(&table, format.into(), &mut stdout.lock())?;
            Ok(true)
        }
        Command::Simulate {
            config,
            trials,
            replicates,
            seed,
            format,
        } => {
            let table = simulate_report(&read_config(&config)?, trials, replicates, seed)?;
            emit(&table, format.into(), &mut stdout.lock())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wma: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
