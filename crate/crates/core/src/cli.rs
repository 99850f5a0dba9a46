//! The `coded-matmul` command line.
//!
//! Every flag may also come from a TOML file given with `--config`; flags
//! on the command line win. With `--out DIR`, outputs are written to `DIR`
//! together with a `manifest.toml` recording the resolved configuration,
//! its SHA-256, the seed, the crate version and the hash of each output.
//!
//! Exit codes: `0` success, `1` a property check failed, `2` usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    kappa_worst, q_bounds, q_exact_oracle, verify_assignment_properties, verify_resilience,
    verify_type_structure, OracleMode, SweepOptions,
};
use crate::baseline::{
    chebyshev_points, default_points, equispaced_points, poly_kappa_worst, poly_plan, PolyCodePlan,
};
use crate::decoder::{CompletedProduct, Decoder, ProgressLedger};
use crate::encoding::{build_plan, build_plan_with_zeta, encode_blocks, EncodingPlan};
use crate::error::{Error, Result};
use crate::linalg::mtx::{load_matrix_market, write_matrix_market};
use crate::linalg::{gram_product, partition_columns, Matrix, PartitionedMatrix};
use crate::plan_file::{load_plan, write_plan};
use crate::scheme::{derive_params, SchemeParams};
use crate::simulator::{
    compare_overall, simulate_timeline, time_to_decode, write_sweep_csv, CostModel, SpeedProfile,
    SweepEntry, TaskCosts,
};
use crate::subsets::DEFAULT_SAMPLES;
use crate::synthetic::random_matrix;

#[derive(Debug, Parser)]
#[command(name = "coded-matmul", version, about = "Coded distributed matrix multiplication toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every derived scheme quantity.
    Derive(Options),
    /// Build the assignment plan and emit it as a plan file.
    Plan(Options),
    /// Run the structural property checks.
    Verify(Options),
    /// Print the closed-form bounds on Q.
    QBounds(Options),
    /// Search for the exact Q of a small plan.
    QOracle {
        #[command(flatten)]
        options: Options,
        #[arg(long, value_enum, default_value_t = OracleArg::Subsets)]
        mode: OracleArg,
    },
    /// Worst condition number over straggler sets.
    Cond(Options),
    /// Decode time per straggler count, as CSV.
    Simulate(Options),
    /// Encode, simulate, decode and write the product.
    Multiply(Options),
    /// Polynomial-code counterparts.
    Baseline(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Subsets,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodesArg {
    Integers,
    Equispaced,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostArg {
    Unit,
    Nnz,
    Analytic,
}

impl From<CostArg> for CostModel {
    fn from(c: CostArg) -> Self {
        match c {
            CostArg::Unit => CostModel::Unit,
            CostArg::Nnz => CostModel::NnzFlop,
            CostArg::Analytic => CostModel::AnalyticDensity,
        }
    }
}

/// Flags shared by every subcommand; each uses the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// TOML file supplying defaults for any flag.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Read the plan from a plan file instead of building it.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub ka: Option<usize>,
    #[arg(long)]
    pub kb: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the weight of the coded `B` blocks.
    #[arg(long)]
    pub zeta: Option<usize>,
    /// Density of synthetic inputs, in `(0, 1]`.
    #[arg(long)]
    pub density: Option<f64>,
    /// Rows shared by `A` and `B`.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub a_cols: Option<usize>,
    #[arg(long)]
    pub b_cols: Option<usize>,
    /// Matrix Market file for `A` (otherwise synthetic).
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Matrix Market file for `B` (otherwise synthetic).
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Straggler counts; a comma separated list for `simulate`.
    #[arg(long, value_delimiter = ',')]
    pub straggler_count: Vec<usize>,
    /// Speed of a straggler relative to a nominal worker; 0 means failed.
    #[arg(long)]
    pub straggler_factor: Option<f64>,
    #[arg(long, value_enum)]
    pub cost_model: Option<CostArg>,
    /// Zero-pad matrices whose widths do not divide evenly.
    #[arg(long)]
    pub pad: bool,
    /// Subsets to draw when a sweep is too large to enumerate.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Evaluation nodes of the polynomial code.
    #[arg(long, value_enum)]
    pub nodes: Option<NodesArg>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Options {
    /// Fill unset flags from `other`.
    fn or(mut self, other: Options) -> Self {
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = other.$f; } )* };
        }
        fill!(plan, n, ka, kb, x, seed, zeta, density, rows, a_cols, b_cols, a, b);
        fill!(straggler_factor, cost_model, samples, nodes);
        if self.straggler_count.is_empty() {
            self.straggler_count = other.straggler_count;
        }
        self.pad |= other.pad;
        self
    }

    fn resolve(self) -> Result<Self> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let file: Options = toml::from_str(&text)
                    .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
                Ok(self.or(file))
            }
            None => Ok(self),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn scheme(&self) -> Result<SchemeParams> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")))
        };
        Ok(SchemeParams::new(
            need(self.n, "n")?,
            need(self.ka, "ka")?,
            need(self.kb, "kb")?,
            self.x.unwrap_or(0),
        )
        .with_seed(self.seed()))
    }

    fn build_plan(&self) -> Result<EncodingPlan> {
        if let Some(path) = &self.plan {
            return load_plan(path);
        }
        let params = self.scheme()?;
        match self.zeta {
            Some(z) => build_plan_with_zeta(&params, z),
            None => build_plan(&params),
        }
    }

    fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            ..SweepOptions::seeded(self.seed())
        }
    }

    fn density(&self) -> Result<f64> {
        let d = self.density.unwrap_or(1.0);
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::InvalidParameter(format!("density {d} is outside (0, 1]")));
        }
        Ok(d)
    }

    fn factor(&self, default: f64) -> f64 {
        self.straggler_factor.unwrap_or(default)
    }

    fn poly(&self, n: usize, ka: usize, kb: usize) -> Result<PolyCodePlan> {
        let points = match self.nodes.unwrap_or(NodesArg::Integers) {
            NodesArg::Integers => default_points(n),
            NodesArg::Equispaced => equispaced_points(n),
            NodesArg::Chebyshev => chebyshev_points(n),
        };
        poly_plan(n, ka, kb, Some(points))
    }

    /// `A` and `B` from files or the synthetic generator.
    fn matrices(&self) -> Result<(Matrix, Matrix)> {
        let rows = self.rows.unwrap_or(120);
        let density = self.density()?;
        let seed = self.seed();
        let load = |path: &Option<PathBuf>, cols: Option<usize>, salt: u64| match path {
            Some(p) => load_matrix_market(p),
            None => Ok(random_matrix(rows, cols.unwrap_or(120), density, seed.wrapping_add(salt))),
        };
        let a = load(&self.a, self.a_cols, 1)?;
        let b = load(&self.b, self.b_cols, 2)?;
        if a.rows() != b.rows() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but B has {}",
                a.rows(),
                b.rows()
            )));
        }
        Ok((a, b))
    }
}

/// What a subcommand produced.
struct Report {
    text: String,
    files: Vec<(&'static str, Vec<u8>)>,
    passed: bool,
}

impl Report {
    /// Printed and also saved as `name` under `--out`.
    fn file(name: &'static str, text: String) -> Self {
        Self {
            files: vec![(name, text.clone().into_bytes())],
            text,
            passed: true,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config_sha256: String,
    config: &'a Options,
    outputs: Vec<OutputHash>,
}

#[derive(Serialize)]
struct OutputHash {
    file: String,
    sha256: String,
}

fn write_outputs(dir: &Path, command: &str, options: &Options, report: &Report) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let config = toml::to_string(options)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialise config: {e}")))?;
    let mut outputs = Vec::new();
    for (name, bytes) in &report.files {
        std::fs::write(dir.join(name), bytes)?;
        outputs.push(OutputHash {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: options.seed(),
        config_sha256: sha256_hex(config.as_bytes()),
        config: options,
        outputs,
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialise manifest: {e}")))?;
    std::fs::write(dir.join("manifest.toml"), text)?;
    Ok(())
}

fn toml_text<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn cmd_derive(o: &Options) -> Result<Report> {
    let d = derive_params(&o.scheme()?)?;
    let d = match o.zeta {
        Some(z) => d.with_b_weight(z)?,
        None => d,
    };
    let mut text = toml_text(&d)?;
    writeln!(text, "coded_a_weight = {}", d.coded_a_weight()).unwrap();
    writeln!(text, "coded_b_weight = {}", d.b_weight).unwrap();
    Ok(Report::file("derived.toml", text))
}

fn cmd_verify(o: &Options) -> Result<Report> {
    let plan = o.build_plan()?;
    let d = &plan.derived;
    let mut report = verify_assignment_properties(&plan);
    if d.x == 0 {
        report = report.merge(verify_type_structure(&plan)?);
    }
    let resilience = SweepOptions {
        exhaustive_cap: 1_000_000,
        ..o.sweep_options()
    };
    report = report.merge(verify_resilience(&plan, d.stragglers, resilience));
    let mut text = report.to_string();
    let mu: Vec<String> = report.mu.iter().map(|m| format!("{m:.6}")).collect();
    writeln!(text, "mu {}", mu.join(" ")).unwrap();
    Ok(Report {
        passed: report.all_passed(),
        ..Report::file("verify.txt", text)
    })
}

fn cmd_q_bounds(o: &Options) -> Result<Report> {
    let d = match &o.plan {
        Some(path) => load_plan(path)?.derived,
        None => derive_params(&o.scheme()?)?,
    };
    let b = q_bounds(&d);
    Ok(Report::file("q_bounds.txt", format!("Q_lb={} Q_ub={}\n", b.q_lb, b.q_ub)))
}

fn cmd_q_oracle(o: &Options, mode: OracleArg) -> Result<Report> {
    let plan = o.build_plan()?;
    let mode = match mode {
        OracleArg::Subsets => OracleMode::ClassSubsets,
        OracleArg::Exhaustive => OracleMode::ExhaustiveLedgers,
    };
    let r = q_exact_oracle(&plan, mode)?;
    let b = q_bounds(&plan.derived);
    let counts: Vec<String> = r.worst_counts.iter().map(usize::to_string).collect();
    let text = format!(
        "Q={} Q_lb={} Q_ub={}\nworst_class {}\nworst_counts {}\nrank_evaluations {}\nborderline {}\n",
        r.q,
        b.q_lb,
        b.q_ub,
        r.worst_class,
        counts.join(" "),
        r.rank_evaluations,
        r.borderline
    );
    Ok(Report::file("q_oracle.txt", text))
}

fn cmd_cond(o: &Options) -> Result<Report> {
    let plan = o.build_plan()?;
    let s = o.straggler_count.first().copied().unwrap_or(plan.derived.stragglers);
    let r = kappa_worst(&plan, s, o.sweep_options())?;
    Ok(Report::file("cond.toml", toml_text(&r)?))
}

fn partition(o: &Options, a: &Matrix, b: &Matrix, a_blocks: usize, b_blocks: usize) -> Result<(PartitionedMatrix, PartitionedMatrix)> {
    Ok((
        partition_columns(a, a_blocks, o.pad)?,
        partition_columns(b, b_blocks, o.pad)?,
    ))
}

fn cmd_simulate(o: &Options) -> Result<Report> {
    let plan = o.build_plan()?;
    let d = &plan.derived;
    let poly = o.poly(d.n, d.ka, d.kb)?;
    let model: CostModel = o.cost_model.unwrap_or(CostArg::Unit).into();
    let (proposed, baseline) = match model {
        CostModel::Unit => (TaskCosts::unit(&Decoder::new(&plan)), TaskCosts::unit(&poly)),
        CostModel::NnzFlop => {
            let (a, b) = o.matrices()?;
            let (pa, pb) = partition(o, &a, &b, d.a_blocks, d.b_blocks)?;
            let (qa, qb) = partition(o, &a, &b, d.ka, d.kb)?;
            (
                TaskCosts::measured_proposed(&plan, &pa, &pb)?,
                TaskCosts::measured_poly(&poly, &qa, &qb)?,
            )
        }
        CostModel::AnalyticDensity => {
            let (t, r, w) = (
                o.rows.unwrap_or(120),
                o.a_cols.unwrap_or(120),
                o.b_cols.unwrap_or(120),
            );
            let density = o.density()?;
            (
                TaskCosts::analytic_proposed(&plan, t, r, w, density),
                TaskCosts::analytic_poly(&poly, t, r, w, density),
            )
        }
    };
    let counts: Vec<usize> = if o.straggler_count.is_empty() {
        (0..=(d.max_stragglers + 2).min(d.n)).collect()
    } else {
        o.straggler_count.clone()
    };
    let decoder = Decoder::new(&plan);
    let entries = [
        SweepEntry {
            schedule: &decoder,
            costs: &proposed,
        },
        SweepEntry {
            schedule: &poly,
            costs: &baseline,
        },
    ];
    let rows = compare_overall(&entries, &counts, o.factor(0.2))?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &rows)?;
    let text = String::from_utf8(csv).expect("csv output is UTF-8");
    Ok(Report::file("sweep.csv", text))
}

fn cmd_multiply(o: &Options) -> Result<Report> {
    let plan = o.build_plan()?;
    let d = &plan.derived;
    let (a, b) = o.matrices()?;
    let (pa, pb) = partition(o, &a, &b, d.a_blocks, d.b_blocks)?;
    let decoder = Decoder::new(&plan);
    let model: CostModel = o.cost_model.unwrap_or(CostArg::Unit).into();
    let costs = match model {
        CostModel::Unit => TaskCosts::unit(&decoder),
        CostModel::NnzFlop => TaskCosts::measured_proposed(&plan, &pa, &pb)?,
        CostModel::AnalyticDensity => {
            TaskCosts::analytic_proposed(&plan, a.rows(), a.cols(), b.cols(), o.density()?)
        }
    };
    let count = o.straggler_count.first().copied().unwrap_or(0);
    let speeds = SpeedProfile::with_stragglers(d.n, count, o.factor(0.0))?;
    let timeline = simulate_timeline(&decoder, &speeds, &costs)?;
    let t = time_to_decode(&timeline, &decoder);
    if !t.time.is_finite() {
        return Err(Error::TooFewSurvivors {
            got: d.n - count,
            needed: d.threshold,
        });
    }
    let mut ledger = ProgressLedger::new(d.n, d.tasks_per_worker);
    for e in &timeline.events[..t.products_used] {
        ledger.record_completion(e.worker)?;
    }
    let payloads = encode_blocks(&pa, &pb, &plan)?;
    let products = payloads
        .iter()
        .flat_map(|p| {
            let done = ledger.completed(p.worker);
            p.a_blocks[..done].iter().enumerate().map(move |(location, blk)| {
                gram_product(blk, &p.b_block).map(|g| CompletedProduct {
                    worker: p.worker,
                    location,
                    value: g.value,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let recovered = decoder.decode(&ledger, &products)?;
    let result = recovered.trim(a.cols(), b.cols());
    let direct = gram_product(&a, &b)?.value;
    let mut mtx = Vec::new();
    write_matrix_market(&mut mtx, &Matrix::Dense(result.clone()))?;
    let worst_cond = recovered.conditions.iter().copied().fold(0.0, f64::max);
    let text = format!(
        "decode_time {}\nproducts_used {}\nrelative_error {:.3e}\nworst_condition {:.3e}\n",
        t.time,
        t.products_used,
        result.relative_error(&direct),
        worst_cond
    );
    Ok(Report {
        files: vec![("result.mtx", mtx), ("multiply.txt", text.clone().into_bytes())],
        text,
        passed: true,
    })
}

fn cmd_baseline(o: &Options) -> Result<Report> {
    let (n, ka, kb) = match &o.plan {
        Some(path) => {
            let d = load_plan(path)?.derived;
            (d.n, d.ka, d.kb)
        }
        None => {
            let p = o.scheme()?;
            (p.n, p.ka, p.kb)
        }
    };
    let plan = o.poly(n, ka, kb)?;
    let s = o.straggler_count.first().copied().unwrap_or(n - plan.threshold());
    let cond = poly_kappa_worst(&plan, s, o.seed())?;
    let (wa, wb) = plan.weights()[n - 1];
    let nodes: Vec<String> = plan.points.iter().map(|p| format!("{p:.17e}")).collect();
    let stragglers: Vec<String> = cond.worst_stragglers.iter().map(usize::to_string).collect();
    let text = format!(
        "threshold {}\nweight_a {wa}\nweight_b {wb}\nnodes {}\nstragglers {s}\nkappa_worst {:.6e}\nworst_stragglers {}\nsubsets {}\nexhaustive {}\n",
        plan.threshold(),
        nodes.join(" "),
        cond.kappa_worst,
        stragglers.join(" "),
        cond.subsets,
        cond.exhaustive
    );
    Ok(Report::file("baseline.txt", text))
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::NoStragglerMargin { .. }
            | Error::DegenerateRelaxation { .. }
            | Error::Indivisible { .. }
            | Error::Parse { .. }
            | Error::InvalidSpeed { .. }
            | Error::TooFewSurvivors { .. }
            | Error::TooLarge(_)
            | Error::Unsupported(_)
            | Error::Io(_)
    )
}

fn dispatch(command: Command) -> (String, Result<(Options, Report)>) {
    let (name, options, mode) = match command {
        Command::Derive(o) => ("derive", o, None),
        Command::Plan(o) => ("plan", o, None),
        Command::Verify(o) => ("verify", o, None),
        Command::QBounds(o) => ("q-bounds", o, None),
        Command::QOracle { options, mode } => ("q-oracle", options, Some(mode)),
        Command::Cond(o) => ("cond", o, None),
        Command::Simulate(o) => ("simulate", o, None),
        Command::Multiply(o) => ("multiply", o, None),
        Command::Baseline(o) => ("baseline", o, None),
    };
    let run = || -> Result<(Options, Report)> {
        let o = options.resolve()?;
        let report = match name {
            "derive" => cmd_derive(&o)?,
            "plan" => Report::file("plan.txt", write_plan(&o.build_plan()?)),
            "verify" => cmd_verify(&o)?,
            "q-bounds" => cmd_q_bounds(&o)?,
            "q-oracle" => cmd_q_oracle(&o, mode.unwrap_or(OracleArg::Subsets))?,
            "cond" => cmd_cond(&o)?,
            "simulate" => cmd_simulate(&o)?,
            "multiply" => cmd_multiply(&o)?,
            _ => cmd_baseline(&o)?,
        };
        if let Some(dir) = &o.out {
            write_outputs(dir, name, &o, &report)?;
        }
        Ok((o, report))
    };
    (name.to_string(), run())
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let (name, outcome) = dispatch(cli.command);
    match outcome {
        Ok((_, report)) => {
            let _ = stdout.write_all(report.text.as_bytes());
            if report.passed {
                0
            } else {
                let _ = writeln!(stderr, "{name}: property check failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "{name}: {e}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
