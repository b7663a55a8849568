//! Batch front end for the phase-covariant benchmark engines.

use std::process::ExitCode;

use phasebench::acceptance;
use phasebench::covariant::asymptotic_limits;
use phasebench_cli::{
    apply_setting, parse_config_file, run_sweep, serialize_results, write_results, CliError,
    FamilyKind, SweepConfig,
};

const USAGE: &str = "\
phasebench — classical fidelity thresholds for phase-covariant families

USAGE:
    phasebench <command> [--flag value]...

COMMANDS:
    qubit              sweep the Bloch length η at fixed --theta
    coherent           sweep the coherent intensity α²
    squeezed           sweep the squeezed-vacuum parameter λ
    displaced-thermal  sweep α² at each purity in --mu
    squeezed-thermal   sweep r at each purity in --mu
    limits             print the three large-parameter asymptotes
    selftest           run the acceptance gate (one line per criterion)

FLAGS (sweeps):
    --config PATH      flat key = value file; flags override it
    --points N         axis point count
    --from X --to X    axis range
    --theta X          qubit polar angle (radians)
    --cutoff N         fixed Fock cutoff
    --deficit-tol X    choose the cutoff by truncation deficit instead
    --methods a,b,c    subset of analytic,phase_measurement,restricted_guess,sdp
    --mu a,b,c         purity values for thermal families
    --out PATH         write results there instead of stdout
    --format csv|json  output format (default csv)

EXIT CODES: 0 success, 1 configuration error, 2 partial point failures.
";

fn parse_command(name: &str) -> Option<FamilyKind> {
    match name {
        "qubit" => Some(FamilyKind::Qubit),
        "coherent" => Some(FamilyKind::Coherent),
        "squeezed" => Some(FamilyKind::SqueezedVacuum),
        "displaced-thermal" => Some(FamilyKind::DisplacedThermal),
        "squeezed-thermal" => Some(FamilyKind::SqueezedThermal),
        _ => None,
    }
}

fn run_sweep_command(kind: FamilyKind, args: &[String]) -> Result<ExitCode, CliError> {
    let mut config = SweepConfig::defaults(kind);

    // collect flag pairs first so --config applies before overrides
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut config_path: Option<String> = None;
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::Config(format!("expected a --flag, got {flag:?}")))?;
        let value = it
            .next()
            .ok_or_else(|| CliError::Config(format!("--{key} needs a value")))?;
        if key == "config" {
            config_path = Some(value.clone());
        } else {
            pairs.push((key.to_string(), value.clone()));
        }
    }
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
        for (k, v) in parse_config_file(&text)? {
            apply_setting(&mut config, &k, &v)?;
        }
    }
    for (k, v) in &pairs {
        apply_setting(&mut config, k, v)?;
    }

    let outcome = run_sweep(&config)?;
    for failure in &outcome.failures {
        eprintln!(
            "point failed: {} [{}]: {}",
            failure.family, failure.method, failure.error
        );
    }
    let bytes = serialize_results(&outcome.results, config.format);
    match &config.out {
        Some(path) => write_results(&outcome.results, config.format, path)?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_limits() -> ExitCode {
    match asymptotic_limits() {
        Ok(lim) => {
            println!("restricted coherent (α → ∞):   {:.6}", lim.restricted_coherent);
            println!(
                "  quadrature evidence at α² = 200: {:.6}",
                lim.restricted_coherent_quadrature
            );
            println!("unrestricted coherent (α → ∞): {:.6}", lim.unrestricted_coherent);
            for (p, v) in &lim.cp_convergence {
                println!("  2·det(C_p)^(-1/2p) at p = {p:>3}: {v:.6}");
            }
            println!(
                "restricted squeezed (λ → 1):   {:.4} ± {:.4}{}",
                lim.restricted_squeezed,
                lim.restricted_squeezed_uncertainty,
                if lim.low_confidence {
                    "  (low confidence)"
                } else {
                    ""
                }
            );
            for (eps, f) in &lim.squeezed_sequence {
                println!("  quadrature at λ = 1 - {eps:.0e}: {f:.6}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("limits failed: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run_selftest() -> ExitCode {
    let reports = acceptance::run_all(true);
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        println!("all {} criteria passed", reports.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return ExitCode::FAILURE;
    };
    match command.as_str() {
        "limits" => run_limits(),
        "selftest" => run_selftest(),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        name => match parse_command(name) {
            Some(kind) => match run_sweep_command(kind, &args[1..]) {
                Ok(code) => code,
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::FAILURE
                }
            },
            None => {
                eprintln!("unknown command {name:?}\n");
                eprint!("{USAGE}");
                ExitCode::FAILURE
            }
        },
    }
}
