//! Command-line front end: load a CSV plus schema, run the chosen strategy
//! to convergence, and write reports.
//!
//! Exit codes: 0 on success, 2 when the dynamics did not converge, 1 on any
//! other error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use evotab::analysis::{
    distribution, persistence_report, rank_genes, rank_organisms, PersistenceReport, Ranking,
};
use evotab::dataset::{
    load_table_from_path, normalize, sanitize, FitnessMatrix, KinshipNorm, Schema,
};
use evotab::engine::{multi_start, run, ReplicatorConfig, RestPoint, Trajectory};
use evotab::report::{
    bundle_json, distribution_csv, matrix_csv, persistence_csv, ranking_csv, restpoint_json,
    trajectory_csv, write_atomic,
};
use evotab::strategies::{PreparedStrategy, Strategy, StrategyMix};
use evotab::Error;

/// Environment variable holding the default output directory.
const OUT_ENV: &str = "EVOTAB_OUT";

#[derive(Parser)]
#[command(
    name = "evotab",
    version,
    about = "Evolutionary game dynamics on tabular data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the replicator dynamics and write rest-point, trajectory and
    /// persistence reports.
    Run(CommonArgs),
    /// Run to convergence, then rank genes or organisms.
    Rank(RankArgs),
    /// Run to convergence, then write the delivery-distribution plan.
    Distribute(CommonArgs),
    /// Write the precomputed payoff matrices (no dynamics).
    Payoff(CommonArgs),
}

#[derive(Args)]
struct RankArgs {
    /// What to rank.
    #[arg(long, value_enum)]
    axis: Axis,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Genes,
    Organisms,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Dombal,
    Altsel,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormName {
    L1,
    L2,
}

#[derive(Args)]
struct CommonArgs {
    /// Input CSV (header row + one labeled record per row).
    #[arg(long)]
    input: PathBuf,
    /// Schema sidecar (column = direct|inverse|label).
    #[arg(long)]
    schema: PathBuf,
    /// Strategy driving the dynamics.
    #[arg(long, value_enum, default_value = "dombal")]
    strategy: StrategyName,
    /// Mixing weights for --strategy mixed, e.g. "g:dom=0.6,w:bal=0.4".
    #[arg(long)]
    mix: Option<String>,
    /// Kinship norm for the altruistic/selfish payoffs.
    #[arg(long, value_enum, default_value = "l2")]
    norm: NormName,
    /// Replicator step size in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    h: f64,
    /// Iteration budget.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Convergence tolerance on the iterate difference.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Starting point: "uniform" or a file with one weight per line.
    #[arg(long, default_value = "uniform")]
    init: String,
    /// Output directory (defaults to $EVOTAB_OUT, then ./evotab-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the iteration trajectory as CSV.
    #[arg(long)]
    export_trajectory: bool,
    /// Extra random interior starts for a uniqueness check.
    #[arg(long, default_value_t = 0)]
    starts: usize,
    /// Seed for the random multi-start.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Distribute(args) => cmd_distribute(args),
        Command::Payoff(args) => cmd_payoff(args),
    };
    match outcome {
        Ok(Outcome::Converged) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("evotab: dynamics did not converge within the iteration budget");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("evotab: {err}");
            ExitCode::from(1)
        }
    }
}

enum Outcome {
    Converged,
    NotConverged,
}

/// Everything the subcommands share: parsed inputs, prepared strategy,
/// resolved output directory.
struct Session {
    fm: FitnessMatrix,
    strategy: Strategy,
    prepared: PreparedStrategy,
    config: ReplicatorConfig,
    norm: KinshipNorm,
    out_dir: PathBuf,
    starts: usize,
    seed: u64,
    export_trajectory: bool,
}

impl Session {
    fn open(args: &CommonArgs) -> Result<Self, Error> {
        let schema = Schema::from_path(&args.schema)?;
        let raw = load_table_from_path(&args.input, &schema)?;
        let fm = sanitize(normalize(&raw, &schema)?)?;

        let norm = match args.norm {
            NormName::L1 => KinshipNorm::L1,
            NormName::L2 => KinshipNorm::L2,
        };
        let strategy = match args.strategy {
            StrategyName::Dombal => Strategy::DomBal,
            StrategyName::Altsel => Strategy::AltSel,
            StrategyName::Mixed => {
                let spec = args
                    .mix
                    .as_deref()
                    .ok_or_else(|| Error::Config("--strategy mixed requires --mix".to_string()))?;
                Strategy::Mixed(parse_mix(spec)?)
            }
        };
        let prepared = PreparedStrategy::prepare(&fm, strategy.clone(), norm)?;

        let initial_gamma = match args.init.as_str() {
            "uniform" => None,
            path => Some(parse_gamma_file(Path::new(path))?),
        };
        let config = ReplicatorConfig {
            step_size: args.h,
            max_iterations: args.max_iter,
            convergence_tol: args.tol,
            initial_gamma,
            record_trajectory: true,
        };

        let out_dir = args
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("evotab-out"));
        fs::create_dir_all(&out_dir)?;

        Ok(Session {
            fm,
            strategy,
            prepared,
            config,
            norm,
            out_dir,
            starts: args.starts,
            seed: args.seed,
            export_trajectory: args.export_trajectory,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn run_dynamics(&self) -> Result<(Trajectory, RestPoint, Option<MultiStartSummary>), Error> {
        let (trajectory, rest) = run(&self.fm, &self.prepared, &self.config)?;
        let multistart = if self.starts > 0 {
            let outcome = multi_start(
                &self.fm,
                &self.prepared,
                &self.config,
                self.starts,
                self.seed,
            )?;
            Some(MultiStartSummary {
                starts: self.starts,
                seed: self.seed,
                all_converged: outcome.all_converged,
                max_pairwise_gap: outcome.max_pairwise_gap,
            })
        } else {
            None
        };
        Ok((trajectory, rest, multistart))
    }
}

#[derive(Serialize)]
struct MultiStartSummary {
    starts: usize,
    seed: u64,
    all_converged: bool,
    max_pairwise_gap: f64,
}

#[derive(Serialize)]
struct ReportBundle<'a> {
    command: &'static str,
    strategy: &'a Strategy,
    kinship_norm: KinshipNorm,
    step_size: f64,
    max_iterations: usize,
    convergence_tol: f64,
    genes: &'a [String],
    organisms: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    rest_point: Option<&'a RestPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    persistence: Option<&'a PersistenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ranking: Option<&'a Ranking>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distribution: Option<&'a evotab::analysis::DistributionPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multi_start: Option<&'a MultiStartSummary>,
}

impl<'a> ReportBundle<'a> {
    fn new(command: &'static str, session: &'a Session) -> Self {
        ReportBundle {
            command,
            strategy: &session.strategy,
            kinship_norm: session.norm,
            step_size: session.config.step_size,
            max_iterations: session.config.max_iterations,
            convergence_tol: session.config.convergence_tol,
            genes: &session.fm.column_labels,
            organisms: &session.fm.row_labels,
            rest_point: None,
            persistence: None,
            ranking: None,
            distribution: None,
            multi_start: None,
        }
    }
}

fn cmd_run(args: &CommonArgs) -> Result<Outcome, Error> {
    let session = Session::open(args)?;
    let (trajectory, rest, multistart) = session.run_dynamics()?;
    let persistence = persistence_report(&trajectory, &rest, &session.fm.column_labels);

    write_atomic(
        session.path("restpoint.json"),
        &restpoint_json(&rest, &session.fm.column_labels),
    )?;
    write_atomic(
        session.path("trajectory.csv"),
        &trajectory_csv(&trajectory, &session.fm.column_labels),
    )?;
    write_atomic(
        session.path("persistence.csv"),
        &persistence_csv(&persistence),
    )?;

    let mut bundle = ReportBundle::new("run", &session);
    bundle.rest_point = Some(&rest);
    bundle.persistence = Some(&persistence);
    bundle.multi_start = multistart.as_ref();
    write_atomic(session.path("report.json"), &bundle_json(&bundle))?;

    if rest.converged {
        Ok(Outcome::Converged)
    } else {
        Ok(Outcome::NotConverged)
    }
}

fn cmd_rank(args: &RankArgs) -> Result<Outcome, Error> {
    let session = Session::open(&args.common)?;
    let (trajectory, rest, multistart) = session.run_dynamics()?;
    if !rest.converged {
        maybe_write_trajectory(&session, &trajectory)?;
        return Ok(Outcome::NotConverged);
    }
    let (ranking, file) = match args.axis {
        Axis::Genes => (
            rank_genes(&rest, &session.fm.column_labels)?,
            "rank_genes.csv",
        ),
        Axis::Organisms => (rank_organisms(&rest, &session.fm)?, "rank_organisms.csv"),
    };
    write_atomic(session.path(file), &ranking_csv(&ranking))?;
    maybe_write_trajectory(&session, &trajectory)?;

    let mut bundle = ReportBundle::new("rank", &session);
    bundle.rest_point = Some(&rest);
    bundle.ranking = Some(&ranking);
    bundle.multi_start = multistart.as_ref();
    write_atomic(session.path("report.json"), &bundle_json(&bundle))?;
    Ok(Outcome::Converged)
}

fn cmd_distribute(args: &CommonArgs) -> Result<Outcome, Error> {
    let session = Session::open(args)?;
    let (trajectory, rest, multistart) = session.run_dynamics()?;
    if !rest.converged {
        maybe_write_trajectory(&session, &trajectory)?;
        return Ok(Outcome::NotConverged);
    }
    let plan = distribution(&rest, &session.fm)?;
    write_atomic(session.path("distribution.csv"), &distribution_csv(&plan))?;
    maybe_write_trajectory(&session, &trajectory)?;

    let mut bundle = ReportBundle::new("distribute", &session);
    bundle.rest_point = Some(&rest);
    bundle.distribution = Some(&plan);
    bundle.multi_start = multistart.as_ref();
    write_atomic(session.path("report.json"), &bundle_json(&bundle))?;
    Ok(Outcome::Converged)
}

fn cmd_payoff(args: &CommonArgs) -> Result<Outcome, Error> {
    let session = Session::open(args)?;
    let labels = &session.fm.column_labels;

    let write_dombal = matches!(session.strategy, Strategy::DomBal | Strategy::Mixed(_));
    let write_altsel = matches!(session.strategy, Strategy::AltSel | Strategy::Mixed(_));

    if write_dombal {
        let a = evotab::strategies::build_dombal_payoff(&session.prepared.moments);
        write_atomic(
            session.path("payoff_dombal_a.csv"),
            &matrix_csv(&a, labels, labels),
        )?;
    }
    if write_altsel {
        // for a pure altsel session the payoffs were already prepared;
        // mixed sessions may have skipped them if no altsel weight is set
        let bundle = match &session.prepared.payoffs {
            Some(bundle) => bundle.clone(),
            None => {
                let kinship = evotab::dataset::compute_kinship(&session.fm, session.norm);
                evotab::strategies::build_altsel_payoff(
                    &session.fm,
                    &session.prepared.moments,
                    &kinship,
                )?
            }
        };
        write_atomic(
            session.path("payoff_altsel_dg.csv"),
            &matrix_csv(&bundle.altsel_dg, labels, labels),
        )?;
        write_atomic(
            session.path("payoff_altsel_dw.csv"),
            &matrix_csv(&bundle.altsel_dw, labels, labels),
        )?;
        write_atomic(
            session.path("payoff_altsel_d.csv"),
            &matrix_csv(&bundle.altsel_d, labels, labels),
        )?;
    }
    Ok(Outcome::Converged)
}

fn maybe_write_trajectory(session: &Session, trajectory: &Trajectory) -> Result<(), Error> {
    if session.export_trajectory {
        write_atomic(
            session.path("trajectory.csv"),
            &trajectory_csv(trajectory, &session.fm.column_labels),
        )?;
    }
    Ok(())
}

/// Parse "g:dom=0.6,w:bal=0.4" (complements are implied; "g:alt" and
/// "w:sel" keys are accepted too).
fn parse_mix(spec: &str) -> Result<StrategyMix, Error> {
    let mut weights: BTreeMap<&str, f64> = BTreeMap::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("mix component '{part}' is not key=value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("mix weight '{}' is not a number", value.trim())))?;
        let key = key.trim();
        if !matches!(key, "g:dom" | "g:alt" | "w:bal" | "w:sel") {
            return Err(Error::Config(format!(
                "unknown mix key '{key}' (expected g:dom, g:alt, w:bal or w:sel)"
            )));
        }
        if weights.insert(key, value).is_some() {
            return Err(Error::Config(format!("mix key '{key}' given twice")));
        }
    }
    let gene_dom = match (weights.get("g:dom"), weights.get("g:alt")) {
        (Some(&dom), None) => dom,
        (None, Some(&alt)) => 1.0 - alt,
        (Some(&dom), Some(&alt)) if (dom + alt - 1.0).abs() <= 1e-12 => dom,
        (Some(_), Some(_)) => return Err(Error::Config("g:dom + g:alt must sum to 1".to_string())),
        (None, None) => return Err(Error::Config("mix needs g:dom or g:alt".to_string())),
    };
    let organism_bal = match (weights.get("w:bal"), weights.get("w:sel")) {
        (Some(&bal), None) => bal,
        (None, Some(&sel)) => 1.0 - sel,
        (Some(&bal), Some(&sel)) if (bal + sel - 1.0).abs() <= 1e-12 => bal,
        (Some(_), Some(_)) => return Err(Error::Config("w:bal + w:sel must sum to 1".to_string())),
        (None, None) => return Err(Error::Config("mix needs w:bal or w:sel".to_string())),
    };
    StrategyMix::new(gene_dom, organism_bal)
}

/// One weight per line (blank lines and # comments ignored).
fn parse_gamma_file(path: &Path) -> Result<Vec<f64>, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read init file '{}': {e}", path.display())))?;
    let mut gamma = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        gamma.push(line.parse().map_err(|_| {
            Error::Config(format!(
                "init file line {}: '{}' is not a number",
                lineno + 1,
                line
            ))
        })?);
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_spec_round_trips() {
        let mix = parse_mix("g:dom=0.6,w:bal=0.4").unwrap();
        assert!((mix.gene_dom - 0.6).abs() < 1e-15);
        assert!((mix.organism_sel - 0.6).abs() < 1e-15);
    }

    #[test]
    fn mix_spec_accepts_complement_keys() {
        let mix = parse_mix("g:alt=0.3,w:sel=0.1").unwrap();
        assert!((mix.gene_dom - 0.7).abs() < 1e-15);
        assert!((mix.organism_bal - 0.9).abs() < 1e-15);
    }

    #[test]
    fn mix_spec_rejects_bad_keys_and_sums() {
        assert!(parse_mix("g:dominant=1").is_err());
        assert!(parse_mix("g:dom=0.6,g:alt=0.6,w:bal=1").is_err());
        assert!(parse_mix("w:bal=1").is_err());
    }
}
