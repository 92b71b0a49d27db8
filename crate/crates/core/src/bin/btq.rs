use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use btq::harness::{self, Experiment, HarnessError, RunConfig};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

/// Berezin–Toeplitz quantization experiments.
#[derive(Parser)]
#[command(name = "btq", version)]
struct Cli {
    /// JSON run configuration; flags given on the command line override its parameters.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for results.json and results.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-check derived constants against quadrature and brute-force oracles.
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// The five composition identities of the kernel calculus.
    Ktable(ParamArgs),
    /// Eigenvalues of the model operator below a cutoff.
    Spectrum(ParamArgs),
    /// Antisymmetrized first coefficient against the Poisson bracket.
    C1Identity(ParamArgs),
    /// Composition law checked on truncated Fock matrices.
    FockVerify(ParamArgs),
    /// Norm defect of sphere Toeplitz operators.
    SphereNorm(ParamArgs),
    /// Commutator expansion on the sphere.
    SphereCommutator(ParamArgs),
    /// Product expansion on the sphere.
    SphereProduct(ParamArgs),
    /// Bergman density on the sphere.
    BergmanDiag(ParamArgs),
    /// Commutator expansion on the cyclic quotient.
    OrbifoldCommutator(ParamArgs),
    /// Bergman density on the cyclic quotient.
    OrbifoldBergman(ParamArgs),
}

/// Every experiment parameter; each experiment rejects the ones it does not use.
#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated rational weights, e.g. `2,6`.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    oracle_degree: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    margin: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    /// `a:b` doubling range, comma list, or single value.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    rate_min: Option<String>,
    #[arg(long)]
    rate_max: Option<String>,
    #[arg(long)]
    richardson_tolerance: Option<String>,
    #[arg(long)]
    bound_factor: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    lift_weight: Option<String>,
    #[arg(long)]
    cone_tolerance: Option<String>,
}

impl ParamArgs {
    fn into_map(self) -> BTreeMap<String, Value> {
        let fields = [
            ("n", self.n),
            ("weights", self.weights),
            ("cutoff", self.cutoff),
            ("oracle_degree", self.oracle_degree),
            ("f", self.f),
            ("g", self.g),
            ("trials", self.trials),
            ("degree", self.degree),
            ("seed", self.seed),
            ("margin", self.margin),
            ("tolerance", self.tolerance),
            ("p", self.p),
            ("rate_min", self.rate_min),
            ("rate_max", self.rate_max),
            ("richardson_tolerance", self.richardson_tolerance),
            ("bound_factor", self.bound_factor),
            ("points", self.points),
            ("k", self.k),
            ("lift_weight", self.lift_weight),
            ("cone_tolerance", self.cone_tolerance),
        ];
        fields.into_iter().filter_map(|(k, v)| Some((k.to_string(), Value::from(v?)))).collect()
    }
}

impl Command {
    fn split(self) -> (Experiment, ParamArgs) {
        match self {
            Command::Ktable(a) => (Experiment::Ktable, a),
            Command::Spectrum(a) => (Experiment::Spectrum, a),
            Command::C1Identity(a) => (Experiment::C1Identity, a),
            Command::FockVerify(a) => (Experiment::FockVerify, a),
            Command::SphereNorm(a) => (Experiment::SphereNorm, a),
            Command::SphereCommutator(a) => (Experiment::SphereCommutator, a),
            Command::SphereProduct(a) => (Experiment::SphereProduct, a),
            Command::BergmanDiag(a) => (Experiment::BergmanDiag, a),
            Command::OrbifoldCommutator(a) => (Experiment::OrbifoldCommutator, a),
            Command::OrbifoldBergman(a) => (Experiment::OrbifoldBergman, a),
        }
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, HarnessError> {
    let mut config = match (&cli.config, cli.command) {
        (Some(path), command) => {
            let mut config = RunConfig::from_file(path)?;
            if let Some(command) = command {
                let (experiment, args) = command.split();
                if experiment != config.experiment {
                    return Err(HarnessError::Config(format!(
                        "config file runs {} but the command line asks for {}",
                        config.experiment.name(),
                        experiment.name()
                    )));
                }
                config.params.extend(args.into_map());
            }
            config
        }
        (None, Some(command)) => {
            let (experiment, args) = command.split();
            RunConfig { params: args.into_map(), ..RunConfig::new(experiment) }
        }
        (None, None) => return Err(HarnessError::Config("give an experiment subcommand or --config".into())),
    };
    if cli.out.is_some() {
        config.out = cli.out;
    }
    config.oracle |= cli.oracle;
    Ok(config)
}

fn main() -> ExitCode {
    let config = match build_config(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("btq: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = match harness::execute(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("btq: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for line in &outcome.report {
        println!("{line}");
    }
    for entry in outcome.oracle.iter().flatten() {
        let ok = entry["pass"].as_bool().unwrap_or(false);
        println!("oracle {} {}: discrepancy {}", if ok { "PASS" } else { "FAIL" }, entry["check"].as_str().unwrap_or(""), entry["discrepancy"]);
    }
    for failure in &outcome.failures {
        eprintln!("btq: assertion failed: {failure}");
    }
    println!("{} {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.experiment);
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
