use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use tcsim::entanglement::{fock_gg_argmax, fock_gg_threshold};
use tcsim::scenarios::{sweep, uniform_grid, InitialKind, MeasureKind, ScenarioConfig};
use tcsim::thermal::choose_truncation;
use tcsim::verify::{run_suite, Suite};
use tcsim::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "tcsim",
    version,
    about = "Two qubits in a single-mode thermal cavity: entanglement dynamics",
    after_help = "Defaults: gamma = 1, epsilon = 1e-12, steps = 400, tmax = 20 \
                  (in units of gamma*t). Exit codes: 0 success, 1 verification \
                  failure, 2 usage error, 3 resource guard."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialArg {
    Ee,
    Eg,
    Gg,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    /// Negativity of the two-atom state (Kraus channel path).
    AtomAtom,
    /// Projected lower bound on atom-field entanglement (joint path).
    AtomField,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Channel,
    Propagator,
    Entanglement,
    Figures,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a scenario over interaction time and emit CSV.
    Sweep {
        /// Initial preparation of the atom pair.
        #[arg(long, value_enum)]
        initial: InitialArg,
        /// Excited-state population for --initial mixed.
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Mean photon number of the thermal field.
        #[arg(long)]
        nbar: f64,
        /// Atom-field coupling rate.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Largest dimensionless time gamma*t on the grid.
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
        /// Number of grid points (the grid starts at 0).
        #[arg(long, default_value_t = 400)]
        steps: usize,
        /// Thermal truncation tail bound.
        #[arg(long, default_value_t = 1e-12)]
        epsilon: f64,
        /// Which quantity to record.
        #[arg(long, value_enum, default_value_t = MeasureArg::AtomAtom)]
        measure: MeasureArg,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the Fock-state criterion for atoms prepared in the ground
    /// state: threshold, maximizer and maximum for each photon number.
    Criterion {
        /// Largest Fock number to tabulate.
        #[arg(long, default_value_t = 6)]
        ell_max: usize,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and report each check.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer_for(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn run_sweep(
    initial: InitialArg,
    lambda: f64,
    nbar: f64,
    gamma: f64,
    tmax: f64,
    steps: usize,
    epsilon: f64,
    measure: MeasureArg,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    let started = Instant::now();
    let kind = match initial {
        InitialArg::Ee => InitialKind::Ee,
        InitialArg::Eg => InitialKind::Eg,
        InitialArg::Gg => InitialKind::Gg,
        InitialArg::Mixed => InitialKind::Mixed(lambda),
    };
    let measure_kind = match measure {
        MeasureArg::AtomAtom => MeasureKind::AtomAtomNegativity,
        MeasureArg::AtomField => MeasureKind::AtomFieldLowerBound,
    };
    let config = ScenarioConfig {
        initial: kind,
        nbar,
        gamma,
        t_grid: uniform_grid(tmax / gamma, steps),
        epsilon,
    };
    let series = sweep(&config, measure_kind)?;
    let trunc = choose_truncation(nbar, epsilon)?;

    let mut w = writer_for(out).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let initial_name = match initial {
        InitialArg::Ee => "ee",
        InitialArg::Eg => "eg",
        InitialArg::Gg => "gg",
        InitialArg::Mixed => "mixed",
    };
    let measure_name = match measure {
        MeasureArg::AtomAtom => "atom-atom",
        MeasureArg::AtomField => "atom-field",
    };
    let mut emit = |line: String| -> Result<(), Error> {
        writeln!(w, "{line}").map_err(|e| Error::InvalidParameter(e.to_string()))
    };
    emit(format!("# tcsim v{VERSION}"))?;
    emit(format!("# command: sweep {}", command_echo()))?;
    emit(format!(
        "# initial={initial_name} lambda={lambda} nbar={nbar} gamma={gamma} \
         tmax={tmax} steps={steps} epsilon={epsilon} measure={measure_name}"
    ))?;
    emit(format!(
        "# truncation_cutoff={} tail_mass={} field_dim={}",
        series.truncation_cutoff,
        fmt(series.tail_mass),
        trunc.field_dim()
    ))?;
    emit(format!(
        "# wall_seconds={:.3}",
        started.elapsed().as_secs_f64()
    ))?;
    emit("gamma_t,value,trace_deficit".to_string())?;
    for p in &series.points {
        emit(format!(
            "{},{},{}",
            fmt(p.gamma_t),
            fmt(p.value),
            fmt(p.trace_deficit)
        ))?;
    }
    Ok(())
}

fn run_criterion(ell_max: usize, out: &Option<PathBuf>) -> Result<(), Error> {
    let started = Instant::now();
    let mut rows = Vec::with_capacity(ell_max);
    for ell in 1..=ell_max {
        let c_s = fock_gg_threshold(ell)?;
        let (argmax_c, max_value) = fock_gg_argmax(ell)?;
        rows.push((ell, c_s, argmax_c, max_value));
    }
    let mut w = writer_for(out).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut emit = |line: String| -> Result<(), Error> {
        writeln!(w, "{line}").map_err(|e| Error::InvalidParameter(e.to_string()))
    };
    emit(format!("# tcsim v{VERSION}"))?;
    emit(format!("# command: criterion {}", command_echo()))?;
    emit(format!("# ell_max={ell_max}"))?;
    emit(format!(
        "# wall_seconds={:.3}",
        started.elapsed().as_secs_f64()
    ))?;
    emit("ell,c_s,argmax_c,max_value".to_string())?;
    for (ell, c_s, argmax_c, max_value) in rows {
        emit(format!(
            "{ell},{},{},{}",
            fmt(c_s),
            fmt(argmax_c),
            fmt(max_value)
        ))?;
    }
    Ok(())
}

fn run_verify(suite: SuiteArg) -> Result<bool, Error> {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Channel => Suite::Channel,
        SuiteArg::Propagator => Suite::Propagator,
        SuiteArg::Entanglement => Suite::Entanglement,
        SuiteArg::Figures => Suite::Figures,
    };
    let checks = run_suite(suite)?;
    let mut all_pass = true;
    for check in &checks {
        println!("{}", check.render());
        all_pass &= check.pass;
    }
    println!(
        "{} checks, {} failed",
        checks.len(),
        checks.iter().filter(|c| !c.pass).count()
    );
    Ok(all_pass)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::DimensionGuard { .. } => 3,
        Error::InvalidParameter(_) | Error::InvalidDensityMatrix(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep {
            initial,
            lambda,
            nbar,
            gamma,
            tmax,
            steps,
            epsilon,
            measure,
            out,
        } => run_sweep(
            *initial, *lambda, *nbar, *gamma, *tmax, *steps, *epsilon, *measure, out,
        )
        .map(|_| true),
        Command::Criterion { ell_max, out } => run_criterion(*ell_max, out).map(|_| true),
        Command::Verify { suite } => run_verify(*suite),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
