//! `sdc`: anonymize microdata, attack the release, account for privacy
//! budgets and report the result.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sdc_core::dp::{BudgetLedger, LedgerEntry, NeighborModel};
use sdc_core::pipeline::{self, AttackName, MechanismConfig, RunConfig};
use sdc_core::SdcError;

#[derive(Parser)]
#[command(name = "sdc", version, about = "Statistical disclosure control toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Produce a protected release (and optional attack reports) in a run directory.
    Anonymize(RunArgs),
    /// Run one attack against an existing run directory.
    Attack {
        #[arg(long)]
        run_dir: PathBuf,
        /// linkage, attribute_inference, downcoding or dp_check
        #[arg(long)]
        name: AttackName,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "SDC_SEED")]
        seed: Option<u64>,
    },
    /// Compose a budget ledger, optionally appending an entry first.
    Account {
        #[arg(long)]
        ledger: PathBuf,
        /// Append an entry with this epsilon before composing.
        #[arg(long)]
        add_epsilon: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value = "manual")]
        mechanism: String,
        /// Entries sharing this tag ran on disjoint data.
        #[arg(long)]
        disjoint_group: Option<String>,
    },
    /// Rebuild the summary and manifest of a run directory.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
    },
    /// One run per parameter value plus a sweep.csv frontier.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// k or epsilon
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long = "hierarchy")]
    hierarchies: Vec<PathBuf>,
    #[arg(long)]
    mechanism: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "attack")]
    attacks: Vec<AttackName>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "SDC_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    neighbor_model: Option<NeighborModel>,
    /// Shared ledger the run's budget entry is appended to.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => {
                let (Some(data), Some(schema), Some(name)) = (&self.data, &self.schema, &self.mechanism) else {
                    bail!("without --config, --data, --schema and --mechanism are required");
                };
                RunConfig {
                    data: data.clone(),
                    schema: schema.clone(),
                    hierarchies: Vec::new(),
                    mechanism: MechanismConfig::parse(name, self.k, self.epsilon)?,
                    attacks: Vec::new(),
                    trials: sdc_core::attack::DEFAULT_TRIALS,
                    seed: 0,
                    output_dir: PathBuf::new(),
                    neighbor_model: NeighborModel::default(),
                    workload: Vec::new(),
                    ledger: None,
                }
            }
        };
        if let Some(p) = self.data {
            cfg.data = p;
        }
        if let Some(p) = self.schema {
            cfg.schema = p;
        }
        if !self.hierarchies.is_empty() {
            cfg.hierarchies = self.hierarchies;
        }
        if let (Some(name), Some(_)) = (&self.mechanism, &self.config) {
            cfg.mechanism = MechanismConfig::parse(name, self.k.or(cfg.mechanism.k()), self.epsilon.or(cfg.mechanism.epsilon()))?;
        }
        if let Some(k) = self.k {
            cfg.mechanism.set_parameter("k", k as f64)?;
        }
        if let Some(e) = self.epsilon {
            cfg.mechanism.set_parameter("epsilon", e)?;
        }
        if !self.attacks.is_empty() {
            cfg.attacks = self.attacks;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = self.out {
            cfg.output_dir = o;
        }
        if let Some(m) = self.neighbor_model {
            cfg.neighbor_model = m;
        }
        if let Some(l) = self.ledger {
            cfg.ledger = Some(l);
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Anonymize(args) => {
            let cfg = args.into_config()?;
            let outcome = pipeline::run(&cfg)?;
            print!("{}", outcome.summary);
            println!("run directory: {}", cfg.output_dir.display());
        }
        Command::Attack { run_dir, name, trials, seed } => {
            let outcome = pipeline::attack_run(&run_dir, name, trials, seed)
                .with_context(|| format!("attack `{name}` on {}", run_dir.display()))?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
        }
        Command::Account { ledger, add_epsilon, delta, mechanism, disjoint_group } => {
            if let Some(eps) = add_epsilon {
                let mut entry = LedgerEntry::dp(&mechanism, eps, delta);
                if let Some(g) = &disjoint_group {
                    entry = entry.disjoint(g);
                }
                // validate before touching the file
                BudgetLedger::new().compose(entry.clone())?;
                BudgetLedger::append_to(&ledger, &entry)?;
            }
            let composed = BudgetLedger::load(&ledger)
                .with_context(|| format!("reading ledger {}", ledger.display()))?
                .composed();
            println!("{}", serde_json::to_string_pretty(&composed)?);
            if let Some(w) = &composed.warning {
                eprintln!("warning: {w}");
            }
        }
        Command::Report { run_dir } => {
            print!("{}", pipeline::report(&run_dir)?);
        }
        Command::Sweep { run, param, values } => {
            let cfg = run.into_config()?;
            for row in pipeline::sweep(&cfg, &param, &values)? {
                println!(
                    "{}={} linkage={} sse_standardized={:.6}",
                    row.parameter,
                    row.value,
                    row.linkage_rate.map_or("n/a".to_string(), |r| format!("{r:.4}")),
                    row.sse_standardized
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<SdcError>().map_or(1, pipeline::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
