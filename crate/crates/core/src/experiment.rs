//! Erasure-grid sweeps over the scheme matrix, CSV/JSON emission and
//! regression comparison of result files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::huncc::Security;
use crate::metrics::{self, FrameSpec, MetricsError};
use crate::reliability::Reliability;
use crate::simnet::{self, NetworkConfig, RunConfig, SimError};

/// Environment variable holding the worker count of a sweep.
pub const WORKERS_ENV: &str = "LLHUNCC_WORKERS";

/// Exact CSV column order.
pub const COLUMNS: [&str; 15] = [
    "scheme",
    "security",
    "eps_sat",
    "eps_5g",
    "seed",
    "throughput_payload",
    "throughput_expansion",
    "dp_mean",
    "dp_max",
    "df_mean",
    "df_max",
    "file_slots",
    "mix_ops",
    "enc_ops",
    "dec_ops",
];

const KEY_COLUMNS: usize = 5;
const GRID_LO: f64 = 0.01;
const GRID_HI: f64 = 0.3;
const DEFAULT_GRID_POINTS: usize = 7;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Usage(String),
    #[error("{scheme}/{security} at eps_sat={eps_sat}, eps_5g={eps_5g}, seed={seed}: {source}")]
    Run {
        scheme: Reliability,
        security: Security,
        eps_sat: f64,
        eps_5g: f64,
        seed: u64,
        source: SimError,
    },
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tolerance file: {0}")]
    Toml(#[from] toml::de::Error),
}

type Result<T> = std::result::Result<T, ExperimentError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Packets,
    Frames,
    Files,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Packets => "packets",
            Scenario::Frames => "frames",
            Scenario::Files => "files",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        [Scenario::Packets, Scenario::Frames, Scenario::Files]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| ExperimentError::Usage(format!("unknown scenario '{s}'")))
    }
}

/// `n` points spaced evenly in log scale over `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n - 1 => hi,
                    _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// Erasure axis: `default` (7 log-spaced points over [0.01, 0.3]),
/// `log:N`, or a comma-separated list of probabilities.
pub fn parse_axis(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    let values = if s == "default" {
        log_spaced(GRID_LO, GRID_HI, DEFAULT_GRID_POINTS)
    } else if let Some(n) = s.strip_prefix("log:") {
        let n: usize = n
            .parse()
            .map_err(|_| ExperimentError::Usage(format!("bad point count in '{s}'")))?;
        log_spaced(GRID_LO, GRID_HI, n)
    } else {
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| ExperimentError::Usage(format!("bad erasure probability '{v}'")))
            })
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(ExperimentError::Usage("empty erasure grid".into()));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(ExperimentError::Usage(format!("erasure probability {v} outside [0, 1]")));
    }
    Ok(values)
}

/// Seeds: a count `N` (seeds `0..N`) or a half-open range `a..b`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || ExperimentError::Usage(format!("bad seed set '{s}'"));
    let seeds: Vec<u64> = match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            (a..b).collect()
        }
        None => (0..s.trim().parse::<u64>().map_err(|_| bad())?).collect(),
    };
    if seeds.is_empty() {
        return Err(ExperimentError::Usage("no seeds".into()));
    }
    Ok(seeds)
}

/// A sweep: every (security, reliability) pair at every grid point and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub securities: Vec<Security>,
    pub reliabilities: Vec<Reliability>,
    pub eps_sat: Vec<f64>,
    pub eps_5g: Vec<f64>,
    /// Untrusted 5G links next to the single satellite link.
    pub n_5g: usize,
    pub rtt: u64,
    pub packet_bits: usize,
    pub frame: FrameSpec,
    pub seeds: Vec<u64>,
    /// Per-run settings; `security`, `reliability` and the network come
    /// from the sweep.
    pub run: RunConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let grid = log_spaced(GRID_LO, GRID_HI, DEFAULT_GRID_POINTS);
        ExperimentSpec {
            scenario: Scenario::Packets,
            securities: Security::ALL.to_vec(),
            reliabilities: Reliability::ALL.to_vec(),
            eps_sat: grid.clone(),
            eps_5g: grid,
            n_5g: 3,
            rtt: 20,
            packet_bits: 1024,
            frame: FrameSpec::default(),
            seeds: (0..30).collect(),
            run: RunConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(ExperimentError::Usage(m.to_string()));
        if self.securities.is_empty() || self.reliabilities.is_empty() {
            return usage("at least one security and one reliability scheme is required");
        }
        if self.eps_sat.is_empty() || self.eps_5g.is_empty() || self.seeds.is_empty() {
            return usage("grid and seed set must be non-empty");
        }
        if self.frame.k == 0 {
            return usage("frame size must be at least 1");
        }
        if self.run.packets == 0 {
            return usage("workload must contain at least one packet");
        }
        if self.packet_bits == 0 || !self.packet_bits.is_multiple_of(8) {
            return usage("packet size must be a positive multiple of 8 bits");
        }
        self.network(self.eps_sat[0], self.eps_5g[0], 0)
            .validate()
            .map_err(|e| ExperimentError::Usage(e.to_string()))
    }

    pub fn network(&self, eps_sat: f64, eps_5g: f64, seed: u64) -> NetworkConfig {
        let mut net = NetworkConfig::satellite_5g(eps_sat, eps_5g, self.n_5g, self.rtt, seed);
        net.packet_bits = self.packet_bits;
        net
    }

    /// Jobs in output order: grid point (satellite axis major), seed, then
    /// reliability and security.
    fn jobs(&self) -> Vec<(f64, f64, u64, Reliability, Security)> {
        let mut jobs = Vec::new();
        for &es in &self.eps_sat {
            for &e5 in &self.eps_5g {
                for &seed in &self.seeds {
                    for &rel in &self.reliabilities {
                        for &sec in &self.securities {
                            jobs.push((es, e5, seed, rel, sec));
                        }
                    }
                }
            }
        }
        jobs
    }
}

/// One CSV row: one scheme at one grid point and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scheme: Reliability,
    pub security: Security,
    pub eps_sat: f64,
    pub eps_5g: f64,
    pub seed: u64,
    pub throughput_payload: f64,
    pub throughput_expansion: f64,
    pub dp_mean: f64,
    pub dp_max: u64,
    pub df_mean: f64,
    pub df_max: u64,
    pub file_slots: u64,
    pub mix_ops: u64,
    pub enc_ops: u64,
    pub dec_ops: u64,
}

impl Row {
    fn key(&self) -> (String, String, u64, u64, u64) {
        (
            self.scheme.name().to_string(),
            self.security.name().to_string(),
            self.eps_sat.to_bits(),
            self.eps_5g.to_bits(),
            self.seed,
        )
    }

    /// Numeric columns in CSV order, after the key columns.
    fn values(&self) -> [f64; 10] {
        [
            self.throughput_payload,
            self.throughput_expansion,
            self.dp_mean,
            self.dp_max as f64,
            self.df_mean,
            self.df_max as f64,
            self.file_slots as f64,
            self.mix_ops as f64,
            self.enc_ops as f64,
            self.dec_ops as f64,
        ]
    }
}

/// Runs one scheme at one grid point and summarises it.
pub fn run_point(
    spec: &ExperimentSpec,
    eps_sat: f64,
    eps_5g: f64,
    seed: u64,
    scheme: Reliability,
    security: Security,
) -> Result<Row> {
    let net = spec.network(eps_sat, eps_5g, seed);
    let cfg = RunConfig {
        security,
        reliability: scheme,
        ..spec.run.clone()
    };
    let rec = simnet::run(&net, &cfg).map_err(|source| ExperimentError::Run {
        scheme,
        security,
        eps_sat,
        eps_5g,
        seed,
        source,
    })?;
    let eta = metrics::throughput(&rec)?;
    let (dp_mean, dp_max) = metrics::packet_delays(&rec)?;
    let (df_mean, df_max) = metrics::frame_delays(&rec, spec.frame)?;
    let ops = metrics::complexity_report(&rec);
    Ok(Row {
        scheme,
        security,
        eps_sat,
        eps_5g,
        seed,
        throughput_payload: metrics::throughput_payload(&rec)?,
        throughput_expansion: *eta.numer() as f64 / *eta.denom() as f64,
        dp_mean,
        dp_max,
        df_mean,
        df_max,
        file_slots: metrics::file_completion(&rec)?,
        mix_ops: ops.mix_ops,
        enc_ops: ops.enc_ops,
        dec_ops: ops.dec_ops,
    })
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ExperimentError::Usage(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs the whole sweep on `workers` threads. Rows come back in job order
/// whatever the completion order; the first failing job aborts the sweep.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<Vec<Row>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Usage(e.to_string()))?;
    let jobs = spec.jobs();
    pool.install(|| {
        jobs.par_iter()
            .map(|&(es, e5, seed, rel, sec)| run_point(spec, es, e5, seed, rel, sec))
            .collect()
    })
}

/// Provenance record written next to the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub row_order: String,
    pub links: Vec<String>,
    pub spec: ExperimentSpec,
    pub flags: BTreeMap<String, String>,
}

impl Sidecar {
    pub fn new(spec: &ExperimentSpec, rows: usize) -> Self {
        let mut links = vec!["satellite (trusted)".to_string()];
        links.extend((0..spec.n_5g).map(|i| format!("5g-{} (untrusted)", i + 1)));
        let run = &spec.run;
        let flags = [
            ("network_seed", "each row's seed seeds the whole network; links, coefficients, data and cipher use disjoint substreams".to_string()),
            ("single_path_links", "one protocol instance per link, links run in parallel".to_string()),
            ("single_path_streams", "without mixing, information packet j rides link j mod l and is released in order within that link".to_string()),
            ("huncc_single_path_assignment", format!("{:?}", run.assignment)),
            ("huncc_encrypted_links", run.huncc_c.to_string()),
            ("allow_encrypted_on_untrusted", run.allow_encrypted_on_untrusted.to_string()),
            ("acrlnc_threshold", run.acrlnc.threshold.to_string()),
            ("acrlnc_window_cap", format!("{} RTT per link", run.acrlnc.cap_rtts)),
            ("acrlnc_estimator", format!("{:?}, seeded with the true erasure probability", run.acrlnc.estimator)),
            ("rlnc_field", "GF(256), coefficients uniform on 1..=255".to_string()),
            ("cipher", format!("modeled McEliece (n={}, m={}, t={})", run.cipher.n(), run.cipher.m(), run.cipher.t())),
            ("huncc_padding", "zero fill to whole blocks; pad length kept as stream metadata".to_string()),
            ("throughput_expansion", "information bits delivered / bits sent, encrypted units expanded to whole ciphertexts".to_string()),
            ("throughput_payload", "secured units per transmission times the payload rate (c*eta + l - c) / l".to_string()),
            ("mixing_ops", "l^2 GF(256) multiplications per byte column, 8 binary operations each, encoder plus decoder".to_string()),
            ("cipher_ops", "closed-form encryption/decryption binary operations per ciphertext".to_string()),
            ("delay_unit", "slots; D^p per information packet from the slot its last secured unit is first sent to in-order release".to_string()),
            ("frame_size", spec.frame.k.to_string()),
            ("verify_payloads", run.verify_payloads.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Sidecar {
            tool: "llhuncc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows,
            row_order: "eps_sat, eps_5g, seed, scheme, security (spec order)".into(),
            links,
            spec: spec.clone(),
            flags,
        }
    }
}

/// Writes `results.csv` and `results.json` into `dir`; returns both paths.
pub fn write_outputs(spec: &ExperimentSpec, rows: &[Row], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join("results.csv");
    let json_path = dir.join("results.json");
    fs::write(&csv_path, to_csv(rows)?).map_err(io_err(&csv_path))?;
    let mut json = serde_json::to_string_pretty(&Sidecar::new(spec, rows.len()))?;
    json.push('\n');
    fs::write(&json_path, json).map_err(io_err(&json_path))?;
    Ok((csv_path, json_path))
}

pub fn to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| ExperimentError::Schema(e.to_string()))
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let headers = r.headers()?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(ExperimentError::Schema(format!(
            "{}: columns {:?} differ from {:?}",
            path.display(),
            headers.iter().collect::<Vec<_>>(),
            COLUMNS
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| ExperimentError::Schema(format!("{}: {e}", path.display()))))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    /// Rows matched on (scheme, security, eps_sat, eps_5g, seed).
    #[default]
    Rows,
    /// Seed means per (scheme, security, eps_sat, eps_5g), allowing `z`
    /// combined standard errors.
    Means,
}

/// Allowed difference `abs + rel·|baseline| (+ z·SE in means mode)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnTolerance {
    #[serde(default)]
    pub rel: f64,
    #[serde(default)]
    pub abs: f64,
    #[serde(default)]
    pub z: f64,
}

/// Tolerance file, e.g.
///
/// ```toml
/// mode = "means"
/// [default]
/// z = 3.0
/// [columns.throughput_payload]
/// rel = 0.02
/// ```
///
/// Columns without an entry use `default` (exact match when absent).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub mode: CompareMode,
    #[serde(default)]
    pub default: ColumnTolerance,
    #[serde(default)]
    pub columns: BTreeMap<String, ColumnTolerance>,
}

impl Tolerances {
    pub fn parse(text: &str) -> Result<Self> {
        let t: Tolerances = toml::from_str(text)?;
        let numeric = &COLUMNS[KEY_COLUMNS..];
        if let Some(c) = t.columns.keys().find(|c| !numeric.contains(&c.as_str())) {
            return Err(ExperimentError::Schema(format!("tolerance for unknown column '{c}'")));
        }
        let all = std::iter::once(&t.default).chain(t.columns.values());
        if all.into_iter().any(|c| !(c.rel >= 0.0 && c.abs >= 0.0 && c.z >= 0.0)) {
            return Err(ExperimentError::Usage("tolerances must be non-negative".into()));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    fn for_column(&self, c: &str) -> ColumnTolerance {
        self.columns.get(c).copied().unwrap_or(self.default)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnReport {
    pub column: String,
    pub compared: usize,
    pub failures: usize,
    pub max_abs_diff: f64,
    /// Largest `|a − b| / |a|` (the absolute difference when `a = 0`).
    pub max_rel_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub mode: CompareMode,
    pub columns: Vec<ColumnReport>,
    /// Keys present in only one file.
    pub unmatched: Vec<String>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.unmatched.is_empty() && self.columns.iter().all(|c| c.failures == 0)
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {:?}", self.mode)?;
        for c in &self.columns {
            writeln!(
                f,
                "{:<5} {:<21} compared={:<6} failures={:<6} max_abs_diff={:.6e} max_rel_diff={:.6e}",
                if c.failures == 0 { "PASS" } else { "FAIL" },
                c.column,
                c.compared,
                c.failures,
                c.max_abs_diff,
                c.max_rel_diff
            )?;
        }
        for k in &self.unmatched {
            writeln!(f, "FAIL  unmatched {k}")?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

struct Sample {
    mean: f64,
    se: f64,
}

fn summarize(xs: &[f64]) -> Sample {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let se = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Sample { mean, se }
}

type GroupKey = (String, String, u64, u64);

fn group(rows: &[Row]) -> BTreeMap<GroupKey, Vec<[f64; 10]>> {
    let mut g: BTreeMap<GroupKey, Vec<[f64; 10]>> = BTreeMap::new();
    for r in rows {
        let (a, b, c, d, _) = r.key();
        g.entry((a, b, c, d)).or_default().push(r.values());
    }
    g
}

fn key_label(scheme: &str, security: &str, es: u64, e5: u64, seed: Option<u64>) -> String {
    let mut s = format!(
        "{scheme}/{security} eps_sat={} eps_5g={}",
        f64::from_bits(es),
        f64::from_bits(e5)
    );
    if let Some(seed) = seed {
        s.push_str(&format!(" seed={seed}"));
    }
    s
}

/// Compares a candidate result set against a baseline.
pub fn compare(baseline: &[Row], candidate: &[Row], tol: &Tolerances) -> CompareReport {
    let names = &COLUMNS[KEY_COLUMNS..];
    let mut columns: Vec<ColumnReport> = names
        .iter()
        .map(|c| ColumnReport {
            column: c.to_string(),
            compared: 0,
            failures: 0,
            max_abs_diff: 0.0,
            max_rel_diff: 0.0,
        })
        .collect();
    let mut unmatched = Vec::new();
    let mut check = |i: usize, a: f64, b: f64, se: f64| {
        let t = tol.for_column(names[i]);
        let d = (a - b).abs();
        let c = &mut columns[i];
        c.compared += 1;
        c.max_abs_diff = c.max_abs_diff.max(d);
        c.max_rel_diff = c.max_rel_diff.max(if a == 0.0 { d } else { d / a.abs() });
        if d > t.abs + t.rel * a.abs() + t.z * se {
            c.failures += 1;
        }
    };
    match tol.mode {
        CompareMode::Rows => {
            let base: BTreeMap<_, _> = baseline.iter().map(|r| (r.key(), r.values())).collect();
            let cand: BTreeMap<_, _> = candidate.iter().map(|r| (r.key(), r.values())).collect();
            for (k, a) in &base {
                match cand.get(k) {
                    Some(b) => (0..names.len()).for_each(|i| check(i, a[i], b[i], 0.0)),
                    None => unmatched.push(format!("baseline only: {}", key_label(&k.0, &k.1, k.2, k.3, Some(k.4)))),
                }
            }
            for k in cand.keys().filter(|k| !base.contains_key(*k)) {
                unmatched.push(format!("candidate only: {}", key_label(&k.0, &k.1, k.2, k.3, Some(k.4))));
            }
        }
        CompareMode::Means => {
            let base = group(baseline);
            let cand = group(candidate);
            for (k, a) in &base {
                let Some(b) = cand.get(k) else {
                    unmatched.push(format!("baseline only: {}", key_label(&k.0, &k.1, k.2, k.3, None)));
                    continue;
                };
                for i in 0..names.len() {
                    let sa = summarize(&a.iter().map(|v| v[i]).collect::<Vec<_>>());
                    let sb = summarize(&b.iter().map(|v| v[i]).collect::<Vec<_>>());
                    check(i, sa.mean, sb.mean, sa.se.hypot(sb.se));
                }
            }
            for k in cand.keys().filter(|k| !base.contains_key(*k)) {
                unmatched.push(format!("candidate only: {}", key_label(&k.0, &k.1, k.2, k.3, None)));
            }
        }
    }
    CompareReport {
        mode: tol.mode,
        columns,
        unmatched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_axis_is_log_spaced() {
        let g = parse_axis("default").unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!((g[0], g[6]), (0.01, 0.3));
        let ratios: Vec<f64> = g.windows(2).map(|w| w[1] / w[0]).collect();
        let step = 30f64.powf(1.0 / 6.0);
        assert!(ratios.iter().all(|r| (r - step).abs() < 1e-12));
    }

    #[test]
    fn axis_and_seed_syntax() {
        assert_eq!(parse_axis("0").unwrap(), vec![0.0]);
        assert_eq!(parse_axis("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_axis("log:3").unwrap().len(), 3);
        assert!(parse_axis("1.5").is_err());
        assert!(parse_axis("a").is_err());
        assert_eq!(parse_seeds("3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("30..32").unwrap(), vec![30, 31]);
        assert!(parse_seeds("0").is_err());
        assert!(parse_seeds("x..2").is_err());
    }

    #[test]
    fn tolerance_file_rejects_unknown_columns() {
        assert!(Tolerances::parse("[columns.dp_mean]\nrel = 0.1").is_ok());
        assert!(Tolerances::parse("[columns.seed]\nrel = 0.1").is_err());
        assert!(Tolerances::parse("[columns.dp_mean]\nrel = -1.0").is_err());
        assert!(Tolerances::parse("mode = \"sideways\"").is_err());
        let t = Tolerances::parse("mode = \"means\"\n[default]\nz = 3.0").unwrap();
        assert_eq!(t.mode, CompareMode::Means);
        assert_eq!(t.for_column("dp_max").z, 3.0);
    }
}
