//! Experiment front end for the cooperative-diversity simulator.
//!
//! Four subcommands: `dmt` emits closed-form tradeoff curves, `outage` runs
//! Monte Carlo outage sweeps, `exponent` fits the empirical diversity slope
//! of a sweep, and `verify-region` checks the outage-region optimizer
//! against the closed forms. Parameters come from an optional JSON config
//! file (`--config`) with command-line flags taking precedence. Every output
//! embeds the tool version, seed, and a hash of the fully-resolved
//! configuration, so identical runs produce identical bytes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 I/O error. Monte Carlo trials parallelize over the rayon pool; set
//! `RAYON_NUM_THREADS` to bound the workers (default: all available cores).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use coopdiv::dmt::dmt_closed_form;
use coopdiv::fading::LinkSnrProfile;
use coopdiv::montecarlo::{estimate_exponent, sweep};
use coopdiv::protocols::{Protocol, ProtocolConfig, RelayGainPolicy};
use coopdiv::regions::{region_infimum_cma, region_infimum_ddf, region_infimum_ddf_multi, region_infimum_naf};

const TOOL: &str = "coopdiv";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = TOOL, version, about = "Half-duplex cooperative fading channel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit closed-form diversity-multiplexing tradeoff curves.
    Dmt(CommonArgs),
    /// Monte Carlo outage-probability sweep over an SNR grid.
    Outage(CommonArgs),
    /// Fit the empirical diversity exponent of an outage sweep.
    Exponent(CommonArgs),
    /// Check the outage-region optimizer against the closed forms.
    VerifyRegion(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dmt(_) => "dmt",
            Command::Outage(_) => "outage",
            Command::Exponent(_) => "exponent",
            Command::VerifyRegion(_) => "verify-region",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Dmt(a) | Command::Outage(a) | Command::Exponent(a) | Command::VerifyRegion(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Comma-separated protocol list (direct, genie-miso, ltw-af, ltw-df,
    /// naf, naf-multi, ddf, ddf-multi, cb-ddf, cma-naf).
    #[arg(long, value_delimiter = ',')]
    protocols: Option<Vec<String>>,

    /// Number of cooperating partner nodes.
    #[arg(long)]
    n: Option<usize>,

    /// Target rate in bits per channel use.
    #[arg(long)]
    rate: Option<f64>,

    /// Comma-separated SNR grid in dB (strictly increasing).
    #[arg(long, value_delimiter = ',')]
    snr_grid: Option<Vec<f64>>,

    /// Comma-separated multiplexing-gain grid in [0, 1].
    #[arg(long, value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,

    /// Monte Carlo trials per grid point.
    #[arg(long)]
    trials: Option<u64>,

    /// Master seed for the counter-based trial substreams.
    #[arg(long)]
    seed: Option<u64>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format: csv (canonical) or json (field-for-field mirror).
    #[arg(long)]
    format: Option<String>,

    /// Fixed SNR offset applied to every inter-node link, in dB.
    #[arg(long)]
    inter_offset_db: Option<f64>,

    /// Treat every inter-node link as noiseless (infinite SNR).
    #[arg(long)]
    noiseless_inter: bool,

    /// Disable the E/2 fair power split in slots with two transmitters.
    #[arg(long)]
    no_fair_power_split: bool,

    /// Scale the relay repetition gain below the energy-constraint equality.
    #[arg(long)]
    relay_gain_scale: Option<f64>,

    /// Restrict DDF relay accumulation to the source link.
    #[arg(long)]
    ddf_source_only: bool,

    /// Finite DDF codeword length (default: asymptotic continuous rule).
    #[arg(long)]
    ddf_codeword_len: Option<u32>,

    /// CMA-NAF frames per super-frame (L).
    #[arg(long)]
    cma_frames: Option<usize>,

    /// CMA-NAF own-symbol share of the power budget.
    #[arg(long)]
    cma_gain_ratio: Option<f64>,

    /// Grid resolution for the region optimizer.
    #[arg(long)]
    resolution: Option<f64>,

    /// Verification tolerance for |d_closed - d_region|.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Minimum outage count for a sweep point to enter the exponent fit.
    #[arg(long)]
    min_outages: Option<u64>,
}

/// On-disk config schema; unknown keys are rejected.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    protocols: Option<Vec<String>>,
    n_nodes: Option<usize>,
    rate_bpcu: Option<f64>,
    snr_grid_db: Option<Vec<f64>>,
    r_grid: Option<Vec<f64>>,
    trials: Option<u64>,
    seed: Option<u64>,
    fair_power_split: Option<bool>,
    inter_offset_db: Option<f64>,
    noiseless_inter: Option<bool>,
    relay_gain_scale: Option<f64>,
    ddf_relay_mi_source_only: Option<bool>,
    ddf_codeword_len: Option<u32>,
    cma_frames_per_superframe: Option<usize>,
    cma_gain_ratio: Option<f64>,
    resolution: Option<f64>,
    tolerance: Option<f64>,
    min_outages: Option<u64>,
    output_path: Option<PathBuf>,
    output_format: Option<String>,
}

/// Fully-resolved experiment parameters (file config overridden by flags).
struct Experiment {
    command: &'static str,
    protocols: Vec<Protocol>,
    n_nodes: usize,
    rate_bpcu: f64,
    snr_grid_db: Vec<f64>,
    r_grid: Vec<f64>,
    trials: u64,
    seed: u64,
    fair_power_split: bool,
    inter_offset_db: Option<f64>,
    noiseless_inter: bool,
    relay_gain_scale: Option<f64>,
    ddf_relay_mi_source_only: bool,
    ddf_codeword_len: Option<u32>,
    cma_frames_per_superframe: usize,
    cma_gain_ratio: f64,
    resolution: f64,
    tolerance: f64,
    min_outages: u64,
    output_path: Option<PathBuf>,
    json: bool,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    VerificationFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::VerificationFailed(m) => m,
        }
    }
}

impl From<coopdiv::Error> for CliError {
    fn from(e: coopdiv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn default_r_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

fn resolve(command: &Command) -> Result<Experiment, CliError> {
    let args = command.args();
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    if let Some(cmd) = &file.command {
        if cmd != command.name() {
            return Err(CliError::Config(format!(
                "config file requests command '{cmd}' but '{}' was invoked",
                command.name()
            )));
        }
    }

    let protocol_names = args.protocols.clone().or(file.protocols).unwrap_or_default();
    let protocols = protocol_names
        .iter()
        .map(|s| Protocol::from_str(s).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let format = args.format.clone().or(file.output_format).unwrap_or_else(|| "csv".into());
    let json = match format.as_str() {
        "csv" => false,
        "json" => true,
        other => return Err(CliError::Config(format!("unknown output format '{other}'"))),
    };

    let exp = Experiment {
        command: command.name(),
        protocols,
        n_nodes: args.n.or(file.n_nodes).unwrap_or(2),
        rate_bpcu: args.rate.or(file.rate_bpcu).unwrap_or(1.0),
        snr_grid_db: args
            .snr_grid
            .clone()
            .or(file.snr_grid_db)
            .unwrap_or_else(|| vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0]),
        r_grid: args.r_grid.clone().or(file.r_grid).unwrap_or_else(default_r_grid),
        trials: args.trials.or(file.trials).unwrap_or(1_000_000),
        seed: args.seed.or(file.seed).unwrap_or(1),
        fair_power_split: if args.no_fair_power_split { false } else { file.fair_power_split.unwrap_or(true) },
        inter_offset_db: args.inter_offset_db.or(file.inter_offset_db),
        noiseless_inter: args.noiseless_inter || file.noiseless_inter.unwrap_or(false),
        relay_gain_scale: args.relay_gain_scale.or(file.relay_gain_scale),
        ddf_relay_mi_source_only: args.ddf_source_only || file.ddf_relay_mi_source_only.unwrap_or(false),
        ddf_codeword_len: args.ddf_codeword_len.or(file.ddf_codeword_len),
        cma_frames_per_superframe: args.cma_frames.or(file.cma_frames_per_superframe).unwrap_or(2),
        cma_gain_ratio: args.cma_gain_ratio.or(file.cma_gain_ratio).unwrap_or(0.5),
        resolution: args.resolution.or(file.resolution).unwrap_or(1e-3),
        tolerance: args.tolerance.or(file.tolerance).unwrap_or(5e-3),
        min_outages: args.min_outages.or(file.min_outages).unwrap_or(50),
        output_path: args.out.clone().or(file.output_path),
        json,
    };
    if exp.protocols.is_empty() {
        return Err(CliError::Config("at least one protocol is required".into()));
    }
    if exp.inter_offset_db.is_some() && exp.noiseless_inter {
        return Err(CliError::Config("inter-node links cannot be both offset and noiseless".into()));
    }
    Ok(exp)
}

impl Experiment {
    /// Canonical one-line rendering of every resolved parameter; hashed into
    /// the output metadata so identical configs are provably identical.
    fn canonical(&self) -> String {
        format!(
            "command={};protocols={};n={};rate={};snr={:?};r={:?};trials={};seed={};fair={};offset={:?};noiseless={};scale={:?};src_only={};ddf_l={:?};cma_l={};cma_ratio={};res={};tol={};min_out={};format={}",
            self.command,
            self.protocols.iter().map(|p| p.name()).collect::<Vec<_>>().join("+"),
            self.n_nodes,
            self.rate_bpcu,
            self.snr_grid_db,
            self.r_grid,
            self.trials,
            self.seed,
            self.fair_power_split,
            self.inter_offset_db,
            self.noiseless_inter,
            self.relay_gain_scale,
            self.ddf_relay_mi_source_only,
            self.ddf_codeword_len,
            self.cma_frames_per_superframe,
            self.cma_gain_ratio,
            self.resolution,
            self.tolerance,
            self.min_outages,
            if self.json { "json" } else { "csv" },
        )
    }

    fn config_hash(&self) -> String {
        // FNV-1a 64
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.canonical().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    /// Node count actually used by a protocol (single-relay protocols are
    /// pinned, direct transmission is a lone node).
    fn effective_n(&self, protocol: Protocol) -> usize {
        match protocol {
            Protocol::Direct => 1,
            Protocol::Naf | Protocol::LtwAf | Protocol::LtwDf | Protocol::Ddf => 2,
            _ => self.n_nodes,
        }
    }

    fn protocol_config(&self, protocol: Protocol) -> ProtocolConfig {
        let mut cfg = ProtocolConfig::new(protocol, self.effective_n(protocol)).with_rate(self.rate_bpcu);
        cfg.fair_power_split = self.fair_power_split;
        if let Some(s) = self.relay_gain_scale {
            cfg.relay_gain_policy = RelayGainPolicy::FixedScale(s);
        }
        cfg.ddf_relay_mi_source_only = self.ddf_relay_mi_source_only;
        cfg.ddf_codeword_len = self.ddf_codeword_len;
        cfg.cma_frames_per_superframe = self.cma_frames_per_superframe;
        cfg.cma_gain_ratio = self.cma_gain_ratio;
        cfg
    }

    fn profile_for(&self, protocol: Protocol, snr_db: f64) -> Result<LinkSnrProfile, CliError> {
        let n = self.effective_n(protocol);
        let mut profile = LinkSnrProfile::new(snr_db);
        if let Some(db) = self.inter_offset_db {
            profile = profile.with_inter_offset_db(n, db)?;
        }
        if self.noiseless_inter {
            profile = profile.with_noiseless_inter(n)?;
        }
        Ok(profile)
    }
}

/// A finished table: column names plus stringly-typed rows, rendered as CSV
/// or as a JSON mirror with identical fields.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    extra_metadata: Vec<(String, String)>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), extra_metadata: Vec::new() }
    }

    fn render(&self, exp: &Experiment) -> String {
        let mut out = String::new();
        if exp.json {
            let meta = serde_json::json!({
                "tool": TOOL,
                "version": VERSION,
                "command": exp.command,
                "seed": exp.seed,
                "config_hash": exp.config_hash(),
            });
            let mut meta = meta;
            for (k, v) in &self.extra_metadata {
                meta[k] = serde_json::json!(v);
            }
            let rows: Vec<serde_json::Value> = self
                .rows
                .iter()
                .map(|r| {
                    let mut obj = serde_json::Map::new();
                    for (c, v) in self.columns.iter().zip(r) {
                        obj.insert((*c).into(), serde_json::Value::String(v.clone()));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            let doc = serde_json::json!({ "metadata": meta, "rows": rows });
            out = serde_json::to_string_pretty(&doc).expect("static document serializes");
            out.push('\n');
        } else {
            let _ = writeln!(out, "# {TOOL} {VERSION}");
            let _ = writeln!(out, "# command: {}", exp.command);
            let _ = writeln!(out, "# seed: {}", exp.seed);
            let _ = writeln!(out, "# config: fnv1a64:{}", exp.config_hash());
            for (k, v) in &self.extra_metadata {
                let _ = writeln!(out, "# {k}: {v}");
            }
            let _ = writeln!(out, "{}", self.columns.join(","));
            for r in &self.rows {
                let _ = writeln!(out, "{}", r.join(","));
            }
        }
        out
    }
}

fn run_dmt(exp: &Experiment) -> Result<Table, CliError> {
    if exp.r_grid.is_empty() || exp.r_grid.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(CliError::Config("r grid must be nonempty within [0, 1]".into()));
    }
    let mut table = Table::new(vec!["protocol", "n", "r", "d"]);
    for &p in &exp.protocols {
        let n = exp.effective_n(p);
        for &r in &exp.r_grid {
            let d = dmt_closed_form(p, n, r)?;
            table.rows.push(vec![p.name().into(), n.to_string(), r.to_string(), d.to_string()]);
        }
    }
    Ok(table)
}

fn run_outage(exp: &Experiment) -> Result<Table, CliError> {
    if exp.trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let mut table = Table::new(vec![
        "protocol", "snr_db", "rate_bpcu", "trials", "outages", "p_out", "ci_low", "ci_high", "seed",
    ]);
    for &p in &exp.protocols {
        let cfg = exp.protocol_config(p);
        let profile = exp.profile_for(p, 0.0)?;
        let result = sweep(&cfg, &profile, &exp.snr_grid_db, exp.trials, exp.seed)?;
        for e in &result.estimates {
            table.rows.push(vec![
                p.name().into(),
                e.snr_db.to_string(),
                e.rate_bpcu.to_string(),
                e.trials.to_string(),
                e.outages.to_string(),
                e.p_hat.to_string(),
                e.ci_low.to_string(),
                e.ci_high.to_string(),
                e.seed.to_string(),
            ]);
        }
    }
    Ok(table)
}

fn run_exponent(exp: &Experiment) -> Result<Table, CliError> {
    let mut table = Table::new(vec![
        "protocol", "snr_db", "trials", "outages", "p_out", "used_in_fit", "slope",
    ]);
    for &p in &exp.protocols {
        let cfg = exp.protocol_config(p);
        let profile = exp.profile_for(p, 0.0)?;
        let result = sweep(&cfg, &profile, &exp.snr_grid_db, exp.trials, exp.seed)?;
        let fit = estimate_exponent(&result, exp.min_outages)?;
        for e in &result.estimates {
            table.rows.push(vec![
                p.name().into(),
                e.snr_db.to_string(),
                e.trials.to_string(),
                e.outages.to_string(),
                e.p_hat.to_string(),
                (e.outages >= exp.min_outages.max(1)).to_string(),
                fit.slope.to_string(),
            ]);
        }
        table.extra_metadata.push((format!("slope[{}]", p.name()), fit.slope.to_string()));
    }
    Ok(table)
}

fn run_verify_region(exp: &Experiment) -> Result<Table, CliError> {
    let mut table = Table::new(vec!["protocol", "n", "r", "d_closed", "d_region", "abs_err"]);
    let mut worst: f64 = 0.0;
    for &p in &exp.protocols {
        let n = exp.effective_n(p);
        for &r in &exp.r_grid {
            let d_region = match p {
                Protocol::Naf => region_infimum_naf(r, exp.resolution)?,
                Protocol::Ddf => region_infimum_ddf(r, exp.resolution)?,
                Protocol::DdfMulti => region_infimum_ddf_multi(n, r, exp.resolution)?,
                Protocol::CmaNaf => region_infimum_cma(n, r, exp.resolution)?,
                other => {
                    return Err(CliError::Config(format!(
                        "verify-region supports naf, ddf, ddf-multi, cma-naf; got {other}"
                    )));
                }
            };
            let d_closed = dmt_closed_form(p, n, r)?;
            let abs_err = (d_closed - d_region).abs();
            worst = worst.max(abs_err);
            table.rows.push(vec![
                p.name().into(),
                n.to_string(),
                r.to_string(),
                d_closed.to_string(),
                d_region.to_string(),
                abs_err.to_string(),
            ]);
        }
    }
    table.extra_metadata.push(("max_abs_err".into(), worst.to_string()));
    if worst > exp.tolerance {
        // Emit the table first so the evidence lands next to the failure.
        table.extra_metadata.push(("verification".into(), "FAILED".into()));
        return Ok(table);
    }
    table.extra_metadata.push(("verification".into(), "ok".into()));
    Ok(table)
}

fn emit(table: &Table, exp: &Experiment) -> Result<(), CliError> {
    let text = table.render(exp);
    match &exp.output_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let exp = resolve(&cli.command)?;
    let table = match cli.command {
        Command::Dmt(_) => run_dmt(&exp)?,
        Command::Outage(_) => run_outage(&exp)?,
        Command::Exponent(_) => run_exponent(&exp)?,
        Command::VerifyRegion(_) => run_verify_region(&exp)?,
    };
    emit(&table, &exp)?;
    if table.extra_metadata.iter().any(|(_, v)| v == "FAILED") {
        return Err(CliError::VerificationFailed(format!(
            "region verification exceeded tolerance {}",
            exp.tolerance
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{TOOL}: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
