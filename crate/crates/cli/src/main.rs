use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use lefalg::config::{Config, Preset};
use lefalg::exactfield::FieldSpec;
use lefalg::lefschetz::{Budget, PolarizedData};
use lefalg::{Error, ValidationError};

mod report;

use report::{Outcome, Report};

#[derive(Parser, Debug)]
#[command(name = "lefalg", version, about = "Exact checks of correspondence algebras on tensor powers of a polarized abelian datum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the generated algebra, the commutant and the diagram span on V^{⊗n}.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the compressed algebra with the compressed commutant on Λ^i(V^{⊕r}).
    VerifyBir {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        i: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Isotypic decomposition of Λ^i(V^{⊕r}) with witnesses and certificates.
    Decompose {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        i: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        /// Also split each component into (non-canonical) primitive idempotents.
        #[arg(long)]
        fine: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Diagram span alone, checked against the commutant.
    OracleDiagram {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// The default suite over all presets.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// siegel, cm or product.
    #[arg(long)]
    preset: Option<String>,
    /// Dimension parameter of the siegel preset.
    #[arg(long)]
    g: Option<usize>,
    /// Discriminant parameter of the cm preset.
    #[arg(long)]
    d: Option<i64>,
    /// Coefficient field for presets: modulus coefficients, low degree first (e.g. 1,0,1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    field: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Lift the operator-dimension budget.
    #[arg(long)]
    allow_large: bool,
    /// Worker threads; 0 means all cores.
    #[arg(long, env = "LEFALG_THREADS", default_value_t = 0)]
    threads: usize,
    /// Record wall-clock timings (reports are otherwise byte-stable).
    #[arg(long)]
    timings: bool,
    /// Human-readable rendering instead of JSON.
    #[arg(long)]
    pretty: bool,
}

struct Setup {
    data: PolarizedData,
    config: Config,
    budget: Budget,
    seed: u64,
}

fn load(common: &Common) -> Result<Setup, Error> {
    let mut config = match (&common.config, &common.preset) {
        (Some(path), _) => {
            if common.field.is_some() {
                return Err(Error::InvalidParams("--field only applies to presets".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
            Config::from_json(&text).map_err(|e| Error::InvalidParams(format!("bad config: {e}")))?
        }
        (None, Some(name)) => {
            let field = match &common.field {
                Some(coeffs) => FieldSpec::from_strings(coeffs).map_err(ValidationError::from)?,
                None => FieldSpec::rationals(),
            };
            Preset::from_name(name, common.g, common.d)?.config(&field)?
        }
        (None, None) => return Err(Error::InvalidParams("one of --config or --preset is required".into())),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if common.allow_large {
        config.budgets = config.budgets.allow_large();
    }
    let data = config.to_data()?;
    Ok(Setup {
        data,
        budget: config.budgets,
        seed: config.seed,
        config,
    })
}

fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn run(command: &Command, common: &Common) -> Report {
    let name = match command {
        Command::Verify { .. } => "verify",
        Command::VerifyBir { .. } => "verify-bir",
        Command::Decompose { .. } => "decompose",
        Command::OracleDiagram { .. } => "oracle-diagram",
        Command::Report { .. } => "report",
    };
    let mut rep = Report::new(name, common.timings);
    if let Command::Report { .. } = command {
        let started = Instant::now();
        let budget = if common.allow_large {
            Budget::default().allow_large()
        } else {
            Budget::default()
        };
        rep.seed = common.seed.unwrap_or(0);
        let seed = rep.seed;
        report::suite(&mut rep, &budget, seed);
        rep.time("total", started);
        return rep;
    }
    let setup = match load(common) {
        Ok(s) => s,
        Err(e) => {
            rep.fail_with(&e);
            return rep;
        }
    };
    rep.config_echo = serde_json::to_value(&setup.config).unwrap_or(Value::Null);
    rep.seed = setup.seed;
    if !setup.data.field().irreducibility_verified() {
        rep.warnings
            .push("field modulus has degree >= 4; irreducibility not verified".into());
    }
    let started = Instant::now();
    let result = match command {
        Command::Verify { n, .. } => report::verify(&mut rep, &setup.data, *n as usize, &setup.budget),
        Command::VerifyBir { i, r, .. } => {
            report::verify_bir(&mut rep, &setup.data, *i as usize, *r as usize, &setup.budget)
        }
        Command::Decompose { i, r, fine, .. } => report::decompose(
            &mut rep,
            &setup.data,
            *i as usize,
            *r as usize,
            &setup.budget,
            setup.seed,
            *fine,
        ),
        Command::OracleDiagram { n, .. } => {
            report::oracle_diagram(&mut rep, &setup.data, *n as usize, &setup.budget)
        }
        Command::Report { .. } => unreachable!("handled above"),
    };
    rep.time("total", started);
    if let Err(e) = result {
        rep.fail_with(&e);
    }
    rep
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Verify { common, .. }
        | Command::VerifyBir { common, .. }
        | Command::Decompose { common, .. }
        | Command::OracleDiagram { common, .. }
        | Command::Report { common } => common.clone(),
    };
    configure_threads(common.threads);
    let rep = run(&cli.command, &common);
    if common.pretty {
        print!("{}", rep.pretty());
    } else {
        println!("{}", rep.to_json_string());
    }
    ExitCode::from(match rep.outcome {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
        Outcome::Usage => 2,
        Outcome::Limit => 3,
    })
}
