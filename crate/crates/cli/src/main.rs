//! Command line for the LOCC discrimination simulator: verification suites,
//! protocol runs, parameter sweeps, figure data export and the
//! measurement-triviality certificate.
//!
//! Exit codes: 0 success, 1 failed checks, 2 bad arguments or malformed
//! input files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use locc_core::locc::opm_triviality_check;
use locc_core::protocols::ProtocolKind;
use locc_core::states::{build_canonical_set, parse_state_set, verify_orthogonality, StateSet};
use locc_core::sweeps::{figure_files, sweep, sweep_csv, write_file};
use locc_core::tensor::Slot;
use locc_core::verify::{run_all, VerifyOptions};
use locc_core::{Error, ResourceFamily};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "locc-sim", version, about = "Entanglement-assisted LOCC discrimination simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite and report pass/fail per suite.
    Verify {
        /// Override for the suite tolerances (default: algebraic 1e-12,
        /// measure comparisons 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a protocol and emit its run report.
    Run {
        /// One of corollary1, corollary2, theorem1, theorem2, theorem3.
        #[arg(long)]
        protocol: String,
        /// Resource parameter in (0, 1]; ignored by corollary1.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a resource family over r and emit CSV records.
    Sweep {
        #[command(flatten)]
        range: RangeArgs,
        /// One of BellLike, CaseI, CaseII, CaseIII.
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write fig1.csv through fig5.csv under the output directory.
    Figures {
        #[arg(long, default_value_t = 99)]
        steps: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Per-party measurement-triviality certificate for a product-state set.
    Nonlocality {
        /// `halder12` for the built-in twelve-state set, or a set file path.
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long, default_value_t = 0.02)]
    r_min: f64,
    #[arg(long, default_value_t = 1.0)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

fn emit(text: String, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn cmd_verify(tol: Option<f64>, format: Format, out: Option<PathBuf>) -> ExitCode {
    let opts = match tol {
        Some(t) if t > 0.0 => VerifyOptions::with_tolerance(t),
        Some(t) => return usage_error(&format!("tolerance {t} must be positive")),
        None => VerifyOptions::default(),
    };
    let results = run_all(&opts);
    let all_pass = results.iter().all(|s| s.passed);
    let text = match format {
        Format::Text => {
            let mut lines: Vec<String> = results
                .iter()
                .map(|s| {
                    format!("[{}] {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail)
                })
                .collect();
            lines.push(format!(
                "{} of {} suites passed",
                results.iter().filter(|s| s.passed).count(),
                results.len()
            ));
            lines.join("\n")
        }
        Format::Json => {
            let v = serde_json::to_value(&results).expect("serialize suites");
            serde_json::to_string_pretty(&v).expect("print suites")
        }
    };
    if emit(text, &out).is_err() {
        return usage_error("cannot write output file");
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_run(protocol: &str, r: f64, format: Format, out: Option<PathBuf>) -> ExitCode {
    let kind = match ProtocolKind::parse(protocol) {
        Ok(k) => k,
        Err(e) => return usage_error(&e.to_string()),
    };
    if kind != ProtocolKind::Corollary1 && !(r > 0.0 && r <= 1.0) {
        return usage_error(&format!("r = {r} outside (0, 1]"));
    }
    let report = match locc_core::protocols::execute(kind, r) {
        Ok(rep) => rep,
        Err(e) => return usage_error(&e.to_string()),
    };
    let ok = report.checks.all_pass();
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report.to_json()).expect("print report"),
        Format::Text => {
            let mut lines = vec![
                format!("protocol {} at r = {}", report.protocol, report.r),
                format!(
                    "residual mass (fallback branch, error weight xi_e): {:.12e}",
                    report.residual_mass_avg
                ),
                format!(
                    "discard mass (ancilla-conditioning failures):       {:.12e}",
                    report.discard_mass_avg
                ),
                format!(
                    "checks: completeness={} orthogonality={} leaf_contracts={} (worst overlap {:.3e})",
                    report.checks.completeness,
                    report.checks.orthogonality,
                    report.checks.leaf_contracts,
                    report.checks.worst_pair_overlap
                ),
            ];
            for f in report.checks.failures.iter().take(6) {
                lines.push(format!("  failure: {f}"));
            }
            if report.checks.failures.len() > 6 {
                lines.push(format!("  ... {} more", report.checks.failures.len() - 6));
            }
            lines.push("per-candidate (index, total, residual, discard):".into());
            for c in &report.per_state {
                lines.push(format!(
                    "  {:>2}  {:.12}  {:.12e}  {:.12e}",
                    c.index, c.total_probability, c.residual_mass, c.discard_mass
                ));
            }
            lines.join("\n")
        }
    };
    if emit(text, &out).is_err() {
        return usage_error("cannot write output file");
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_sweep(range: &RangeArgs, family: &str, out: Option<PathBuf>) -> ExitCode {
    let fam = match ResourceFamily::parse(family) {
        Ok(f) => f,
        Err(e) => return usage_error(&e.to_string()),
    };
    let records = match sweep(fam, range.r_min, range.r_max, range.steps) {
        Ok(r) => r,
        Err(Error::InvalidParameter(m)) => return usage_error(&m),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = sweep_csv(&records);
    if emit(text, &out).is_err() {
        return usage_error("cannot write output file");
    }
    ExitCode::SUCCESS
}

fn cmd_figures(steps: usize, out_dir: &PathBuf) -> ExitCode {
    if std::fs::create_dir_all(out_dir).is_err() {
        return usage_error("cannot create output directory");
    }
    let files = match figure_files(steps) {
        Ok(f) => f,
        Err(Error::InvalidParameter(m)) => return usage_error(&m),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for (name, contents) in &files {
        if write_file(&out_dir.join(name), contents).is_err() {
            eprintln!("error: cannot write {name}");
            return ExitCode::from(1);
        }
        println!("wrote {}", out_dir.join(name).display());
    }
    ExitCode::SUCCESS
}

fn cmd_nonlocality(set_arg: &str, format: Format) -> ExitCode {
    let set: StateSet = if set_arg.eq_ignore_ascii_case("halder12") {
        build_canonical_set()
    } else {
        let text = match std::fs::read_to_string(set_arg) {
            Ok(t) => t,
            Err(e) => return usage_error(&format!("cannot read set file '{set_arg}': {e}")),
        };
        match parse_state_set(&text) {
            Ok(s) if !s.is_empty() => s,
            Ok(_) => return usage_error("set file contains no states"),
            Err(e) => return usage_error(&e.to_string()),
        }
    };
    let (orth, worst) = verify_orthogonality(&set, 1e-10).unwrap();
    if !orth {
        eprintln!("error: set is not pairwise orthogonal (worst overlap {worst:.3e})");
        return ExitCode::from(1);
    }
    let reports: Vec<_> = [Slot::A, Slot::B, Slot::C]
        .into_iter()
        .map(|p| opm_triviality_check(&set, p).unwrap())
        .collect();
    match format {
        Format::Text => {
            for rep in &reports {
                println!(
                    "party {}: constraints={} solution_dim={} trivial_only: {}",
                    rep.party, rep.num_constraints, rep.solution_dim, rep.trivial_only
                );
            }
        }
        Format::Json => {
            let v = serde_json::to_value(&reports).expect("serialize");
            println!("{}", serde_json::to_string_pretty(&v).expect("print"));
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { tol, format, out } => cmd_verify(tol, format, out),
        Command::Run { protocol, r, format, out } => cmd_run(&protocol, r, format, out),
        Command::Sweep { range, family, out } => cmd_sweep(&range, &family, out),
        Command::Figures { steps, out_dir } => cmd_figures(steps, &out_dir),
        Command::Nonlocality { set, format } => cmd_nonlocality(&set, format),
    }
}
