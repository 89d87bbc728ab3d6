//! Command-line front end: `constants`, `rmt-verify`, `limit-law` and `simulate`.
//!
//! Parameters resolve as flags, then a `key=value` config file, then defaults.
//! Every resolved value is echoed into the report. Reports are deterministic
//! for a fixed configuration; wall-clock time goes to a `*.timing.json` sidecar.

use crate::error::{invalid, Error, Result};
use crate::gaussian::{condition, slice_rejection_moments, GaussianVector};
use crate::limit_law::{
    case1_identity_check, derivation_audit, gaussian_limit_report, growth_fit, is_decreasing, limit_total_mass,
    rbar_comparison, sigma_m, sigma_mr, tabulate_rho, RhoSource,
};
use crate::measure::{ks_distance, ks_distance_empirical, Measure1D, UniformGrid, DEFAULT_DECONVOLUTION_REG};
use crate::random_matrices::{
    expected_abs_det_goe_exact, expected_abs_det_mc, expected_abs_det_shifted, rescale_correlation, rho_exact,
    selberg_z, selberg_z_quadrature, ExactRho, MatrixEnsemble, OnePointDensity,
};
use crate::report::{csv_float, Check, Report, Status, Timing};
use crate::rng::{derive_seed, stream};
use crate::spectral::{omega_params, spectral_constants};
use crate::svg::Plot;
use crate::torus::{build_spectrum, covariance_report, empirical_complexity, kac_rice_density, kac_rice_total};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 20240607;
/// Monte Carlo checks run with fewer samples are reported inconclusive.
pub const MIN_MC_SAMPLES: usize = 10_000;

#[derive(Parser, Debug, Clone)]
#[command(name = "critval", version, about = "Critical-value statistics of random fields and random matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// `key=value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `critval-out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output formats, comma separated (default `json,csv`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Spectral constants, their identities and the omega parameters.
    Constants(ConstantsArgs),
    /// Random-matrix identity suite.
    RmtVerify(RmtArgs),
    /// Limit measures and their cross-checks.
    LimitLaw(LimitArgs),
    /// Torus field simulation against Kac-Rice and the limit measure.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::RmtVerify(_) => "rmt-verify",
            Command::LimitLaw(_) => "limit-law",
            Command::Simulate(_) => "simulate",
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct ConstantsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RmtArgs {
    /// Samples per Monte Carlo identity.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LimitArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
    /// `exact`, `mc`, `conditional` or `auto` (exact when m <= 3).
    #[arg(long)]
    pub rho: Option<String>,
    /// Matrices for Monte Carlo one-point functions.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Dimensions of the Gaussian-limit sweep; empty to skip.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    #[arg(long = "sweep-samples")]
    pub sweep_samples: Option<usize>,
    /// Dimensions for the rescaled one-point function vs the semicircle; empty to skip.
    #[arg(long, value_delimiter = ',')]
    pub rbar: Option<Vec<usize>>,
    #[arg(long = "rbar-samples")]
    pub rbar_samples: Option<usize>,
    /// Also fit the growth of the total mass over m in {4, 8, 16, 32}.
    #[arg(long)]
    pub growth: Option<bool>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SimulateArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Overrides the omega implied by r.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Conditional samples for the Kac-Rice total.
    #[arg(long = "kr-samples")]
    pub kr_samples: Option<usize>,
    /// Conditional samples for the Kac-Rice density.
    #[arg(long = "kr-density-samples")]
    pub kr_density_samples: Option<usize>,
    #[arg(long = "ks-tol")]
    pub ks_tol: Option<f64>,
}

/// Resolved parameters: flags over config file over defaults.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    echo: BTreeMap<String, Value>,
}

impl Settings {
    pub fn from_file(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::parse(&std::fs::read_to_string(p)?),
            None => Ok(Self::default()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut file = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key=value", i + 1)))?;
            file.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { file, ..Self::default() })
    }

    fn from_file_value<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        match self.file.get(key) {
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| invalid(format!("config key {key}: cannot parse {s:?}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn get<T: FromStr + Serialize>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => {
                self.used.insert(key.to_string());
                v
            }
            None => self.from_file_value(key)?.unwrap_or(default),
        };
        self.echo.insert(key.to_string(), serde_json::to_value(&v)?);
        Ok(v)
    }

    pub fn get_opt<T: FromStr + Serialize>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => {
                self.used.insert(key.to_string());
                Some(v)
            }
            None => self.from_file_value(key)?,
        };
        self.echo.insert(key.to_string(), serde_json::to_value(&v)?);
        Ok(v)
    }

    pub fn get_list<T: FromStr + Serialize + Clone>(&mut self, key: &str, flag: Option<Vec<T>>, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let v = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(s) => s
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<T>().map_err(|e| invalid(format!("config key {key}: {e}"))))
                    .collect::<Result<Vec<T>>>()?,
                None => default,
            },
        };
        self.echo.insert(key.to_string(), serde_json::to_value(&v)?);
        Ok(v)
    }

    /// Config-file keys that no parameter consumed.
    pub fn unused_keys(&self) -> Vec<String> {
        self.file.keys().filter(|k| !self.used.contains(*k)).cloned().collect()
    }

    pub fn echo(&self) -> BTreeMap<String, Value> {
        self.echo.clone()
    }
}

/// A file produced by a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub contents: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub threads: usize,
    pub elapsed_seconds: f64,
}

impl RunOutput {
    /// Writes requested formats plus the timing sidecar; returns the paths written.
    pub fn write(&self) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(&self.out_dir)?;
        let mut written = Vec::new();
        let name = self.report.command.replace('-', "_");
        if self.formats.contains(&Format::Json) {
            let p = self.out_dir.join(format!("{name}.json"));
            self.report.write_json(&p)?;
            written.push(p);
        }
        for a in &self.artifacts {
            if self.formats.contains(&a.format) {
                let p = self.out_dir.join(&a.name);
                std::fs::write(&p, &a.contents)?;
                written.push(p);
            }
        }
        let timing = Timing {
            command: self.report.command.clone(),
            wall_clock_seconds: self.elapsed_seconds,
            threads: self.threads,
        };
        let p = self.out_dir.join(format!("{name}.timing.json"));
        std::fs::write(&p, serde_json::to_string_pretty(&timing)? + "\n")?;
        written.push(p);
        Ok(written)
    }
}

/// Resolves configuration, runs the subcommand on a dedicated thread pool and
/// returns the report without writing anything.
pub fn execute(cli: &Cli) -> Result<RunOutput> {
    let start = Instant::now();
    let mut st = Settings::from_file(cli.common.config.as_deref())?;
    let seed = st.get("seed", cli.common.seed, DEFAULT_SEED)?;
    let out: String = st.get(
        "out",
        cli.common.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
        "critval-out".to_string(),
    )?;
    let mut formats = st.get_list("format", cli.common.format.clone(), vec![Format::Json, Format::Csv])?;
    formats.sort();
    formats.dedup();
    // Thread count and output location do not change results; keep them out of the echo.
    let threads_flag = match cli.common.threads {
        Some(t) => Some(t),
        None => st.from_file_value::<usize>("threads")?,
    };
    st.echo.remove("out");
    let threads = threads_flag.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("cannot build thread pool: {e}")))?;
    let (report, artifacts) = pool.install(|| match &cli.command {
        Command::Constants(a) => run_constants(&mut st, seed, a),
        Command::RmtVerify(a) => run_rmt_verify(&mut st, seed, a),
        Command::LimitLaw(a) => run_limit_law(&mut st, seed, a),
        Command::Simulate(a) => run_simulate(&mut st, seed, a),
    })?;
    let unused = st.unused_keys();
    if !unused.is_empty() {
        return Err(invalid(format!("unknown config keys for {}: {}", cli.command.name(), unused.join(", "))));
    }
    Ok(RunOutput {
        report,
        artifacts,
        out_dir: PathBuf::from(out),
        formats,
        threads,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn finish(name: &str, seed: u64, st: &Settings, checks: Vec<Check>, results: Value) -> Report {
    let mut r = Report::new(name, seed, st.echo());
    r.checks = checks;
    r.results = results;
    r
}

pub fn run_constants(st: &mut Settings, seed: u64, a: &ConstantsArgs) -> Result<(Report, Vec<Artifact>)> {
    let m = st.get("m", a.m, 1i64)?;
    let r = st.get_opt("r", a.r)?;
    let l = st.get("L", a.l, 1.0f64)?;
    let c = spectral_constants(m)?;
    let mut checks = vec![
        Check::at_most(format!("s = (m+2)(m+4) h at m = {m}"), c.s_identity_residual(), 1e-12),
        Check::at_most(format!("d = (m+4) h at m = {m}"), c.d_identity_residual(), 1e-12),
    ];
    let top = m.max(50);
    let mut csv = String::from("m,s,d,h,ln_s,ln_d,ln_h\n");
    let mut worst = 0.0f64;
    for k in 1..=top {
        let ck = spectral_constants(k)?;
        worst = worst.max(ck.s_identity_residual()).max(ck.d_identity_residual());
        csv.push_str(&format!(
            "{k},{},{},{},{},{},{}\n",
            csv_float(ck.s),
            csv_float(ck.d),
            csv_float(ck.h),
            csv_float(ck.ln_s),
            csv_float(ck.ln_d),
            csv_float(ck.ln_h)
        ));
    }
    checks.push(Check::at_most(format!("identities for m = 1..{top}"), worst, 1e-12));
    let omega = match r {
        Some(r) => Some(omega_params(m, l, r)?),
        None => None,
    };
    let results = json!({
        "constants": c,
        "s_identity_residual": c.s_identity_residual(),
        "d_identity_residual": c.d_identity_residual(),
        "omega": omega,
    });
    let artifacts = vec![Artifact { name: "constants.csv".into(), format: Format::Csv, contents: csv }];
    Ok((finish("constants", seed, st, checks, results), artifacts))
}

/// Random covariance `A A^T / n + 0.2 I` and mean for the conditioning check.
fn random_joint(dim: usize, seed: u64) -> Result<GaussianVector> {
    let mut rng = stream(seed, 0);
    let a: DMatrix<f64> = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let cov = &a * a.transpose() / dim as f64 + DMatrix::identity(dim, dim) * 0.2;
    let mean = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
    GaussianVector::new(mean, cov)
}

/// Analytic conditional moments against slice rejection, for one random joint.
pub fn regression_checks(dim: usize, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let joint = random_joint(dim, seed)?;
    let n_obs = if dim >= 4 { 2 } else { 1 };
    let observed: Vec<usize> = (0..n_obs).collect();
    let values: Vec<f64> = observed.iter().map(|&i| joint.mean()[i] + 0.5 * joint.cov()[(i, i)].sqrt()).collect();
    let analytic = condition(&joint, &observed, &values)?;
    if samples < MIN_MC_SAMPLES {
        return Ok(analytic
            .free
            .iter()
            .map(|f| {
                Check::flag(format!("conditional moments, dim {dim}, coordinate {f}"), false, "run too small")
                    .with_status(Status::Inconclusive)
            })
            .collect());
    }
    // The slab half-width trades bias (quadratic in eps) against acceptance.
    let eps = if n_obs == 1 { 0.02 } else { 0.05 };
    let draws = samples * if n_obs == 1 { 10 } else { 100 };
    let mc = slice_rejection_moments(&joint, &observed, &values, eps, draws, derive_seed(seed, 1))?;
    let mut checks = Vec::new();
    for (j, &f) in analytic.free.iter().enumerate() {
        let mean = analytic.gaussian.mean()[j];
        let var = analytic.gaussian.cov()[(j, j)];
        checks.push(Check::within_se(
            format!("conditional mean, dim {dim}, coordinate {f}"),
            mc.mean[j].value,
            mean,
            mc.mean[j].std_error,
            4.0,
            samples,
            MIN_MC_SAMPLES,
        ));
        checks.push(Check::within_se(
            format!("conditional variance, dim {dim}, coordinate {f}"),
            mc.variance[j].value,
            var,
            mc.variance[j].std_error,
            4.0,
            samples,
            MIN_MC_SAMPLES,
        ));
    }
    Ok(checks)
}

pub fn run_rmt_verify(st: &mut Settings, seed: u64, a: &RmtArgs) -> Result<(Report, Vec<Artifact>)> {
    let samples = st.get("samples", a.samples, 200_000usize)?;
    if samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let mut checks = Vec::new();

    for (m, tol) in [(1u32, 1e-8), (2, 1e-8), (3, 1e-4)] {
        let q = selberg_z_quadrature(m, 1e-11)?;
        checks.push(Check::close(format!("Selberg Z_{m} vs quadrature"), q, selberg_z(m)?, tol, true));
    }

    let mut tag = 0u64;
    let mut next_seed = || {
        tag += 1;
        derive_seed(seed, tag)
    };
    for m in 1..=3usize {
        for v in [0.5, 1.0] {
            for c in [0.0, 0.7, -1.3] {
                let exact = expected_abs_det_goe_exact(m, v, c)?;
                let mc = expected_abs_det_mc(&MatrixEnsemble::goe(m, v)?, c, samples, next_seed())?;
                checks.push(Check::within_se(
                    format!("E|det(A-c)| GOE m={m} v={v} c={c}"),
                    mc.value,
                    exact,
                    mc.std_error,
                    3.0,
                    samples,
                    MIN_MC_SAMPLES,
                ));
            }
        }
    }
    checks.push(Check::close(
        "E|A| for GOE_1^(1/2) equals sqrt(2/pi)",
        expected_abs_det_goe_exact(1, 0.5, 0.0)?,
        (2.0 / std::f64::consts::PI).sqrt(),
        1e-3,
        false,
    ));

    for m in 1..=3usize {
        let v = 1.0;
        let rho = ExactRho::new(m + 1, v)?;
        for k in [0.25, 0.5] {
            let u = 2.0 * k * v;
            for c in [0.0, 0.7] {
                let sd = expected_abs_det_shifted(m, u, v, c, &rho)?;
                let cs = sd.completed_square.ok_or_else(|| invalid("completed-square form unavailable"))?;
                checks.push(Check::close(
                    format!("shifted forms agree m={m} k={k} c={c}"),
                    sd.general.value,
                    cs,
                    1e-8,
                    true,
                ));
                let mc = expected_abs_det_mc(&MatrixEnsemble::new(m, u, v)?, c, samples, next_seed())?;
                checks.push(Check::within_se(
                    format!("E|det(A-c)| shifted m={m} k={k} c={c}"),
                    mc.value,
                    sd.general.value,
                    mc.std_error,
                    3.0,
                    samples,
                    MIN_MC_SAMPLES,
                ));
            }
        }
    }

    for dim in 2..=6 {
        checks.extend(regression_checks(dim, samples, next_seed())?);
    }

    let mut worst = 0.0f64;
    for n in 1..=4usize {
        let v = 0.8;
        let c = 1.7;
        let grid = UniformGrid::symmetric(3.0, 100)?;
        let base = rho_exact(n, v, UniformGrid::symmetric(3.0 * c, 100)?)?;
        let scaled = rescale_correlation(&base, c)?;
        let direct = ExactRho::new(n, v / (c * c))?;
        for x in grid.points() {
            let d = direct.value(x);
            worst = worst.max((scaled.density.density_at(x) - d).abs() / d.max(1e-300));
        }
    }
    checks.push(Check::at_most("rescaling identity, exact densities n <= 4", worst, 1e-10));

    let sc = rbar_comparison(64, 1.5, (samples / 20).max(2), next_seed())?;
    let scale_noise = 3.0 * sc.noise_inside;
    let mut semi = Check::at_most("semicircle, sup |R_64 - R_inf| on |x| <= 1.5", sc.sup_error_inside, 0.05 + scale_noise);
    if samples < MIN_MC_SAMPLES {
        semi = semi.with_status(Status::Inconclusive);
    }
    checks.push(semi);

    let results = json!({ "samples": samples, "min_mc_samples": MIN_MC_SAMPLES, "semicircle": sc });
    let csv = checks_csv(&checks);
    Ok((
        finish("rmt-verify", seed, st, checks, results),
        vec![Artifact { name: "rmt_verify_checks.csv".into(), format: Format::Csv, contents: csv }],
    ))
}

fn checks_csv(checks: &[Check]) -> String {
    let mut s = String::from("name,status,lhs,rhs,error,tolerance\n");
    for c in checks {
        s.push_str(&format!(
            "\"{}\",{},{},{},{},{}\n",
            c.name.replace('"', "'"),
            c.status.as_str(),
            csv_float(c.lhs),
            csv_float(c.rhs),
            csv_float(c.error),
            csv_float(c.tolerance)
        ));
    }
    s
}

fn measure_csv(m: &Measure1D) -> String {
    let mut s = String::from("x,density\n");
    for (x, d) in m.points().iter().zip(m.density()) {
        s.push_str(&format!("{},{}\n", csv_float(*x), csv_float(*d)));
    }
    s
}

/// One-point function used by the limit-law run.
enum Rho {
    Exact(ExactRho),
    Table(crate::random_matrices::CorrelationFunction),
}

impl Rho {
    fn as_dyn(&self) -> &dyn OnePointDensity {
        match self {
            Rho::Exact(r) => r,
            Rho::Table(t) => t,
        }
    }
}

pub fn run_limit_law(st: &mut Settings, seed: u64, a: &LimitArgs) -> Result<(Report, Vec<Artifact>)> {
    let m = st.get("m", a.m, 2usize)?;
    let r = st.get("r", a.r, 1.0f64)?;
    let grid_n = st.get("grid-n", a.grid_n, 1024usize)?;
    let half_width = st.get("half-width", a.half_width, 8.0f64)?;
    let rho_kind = st.get("rho", a.rho.clone(), "auto".to_string())?;
    let samples = st.get("samples", a.samples, 200_000usize)?;
    let sweep = st.get_list("sweep", a.sweep.clone(), vec![8, 16, 32, 64])?;
    let sweep_samples = st.get("sweep-samples", a.sweep_samples, 100_000usize)?;
    let rbar = st.get_list("rbar", a.rbar.clone(), vec![16, 64])?;
    let rbar_samples = st.get("rbar-samples", a.rbar_samples, 20_000usize)?;
    let growth = st.get("growth", a.growth, false)?;
    if !(r >= 1.0) {
        return Err(Error::RequiresRAtLeastOne(r));
    }
    let grid = UniformGrid::symmetric(half_width, grid_n)?;
    let rho_seed = derive_seed(seed, 1);
    let rho = match rho_kind.as_str() {
        "exact" => Rho::Exact(ExactRho::new(m + 1, 1.0)?),
        "auto" if m + 1 <= crate::random_matrices::EXACT_MAX_N => Rho::Exact(ExactRho::new(m + 1, 1.0)?),
        "auto" | "conditional" => Rho::Table(tabulate_rho(m, RhoSource::Conditional { samples, seed: rho_seed })?),
        "mc" => Rho::Table(tabulate_rho(m, RhoSource::MonteCarlo { samples, seed: rho_seed })?),
        other => return Err(invalid(format!("unknown rho source {other:?}; use exact, mc, conditional or auto"))),
    };
    let exact = matches!(rho, Rho::Exact(_));
    let rho = rho.as_dyn();
    let mut checks = Vec::new();

    let sigma = sigma_mr(m, r, grid, rho)?;
    checks.push(Check::close("sigma_{m,r} is a probability measure", sigma.mass(), 1.0, 1e-6, false));
    let audit = derivation_audit(m, r, grid, rho)?;
    let audit_tol = if exact && r == 1.0 { 1e-4 } else { 0.01 };
    checks.push(Check::at_most("KS between the two constructions of sigma_{m,r}", audit, audit_tol));

    let mut rng = stream(derive_seed(seed, 2), 0);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let rr = rng.random_range(1.0..5.0);
        let lam = rng.random_range(-5.0..5.0);
        let y = rng.random_range(-5.0..5.0);
        worst = worst.max(case1_identity_check(rr, lam, y)?);
    }
    checks.push(Check::at_most("case-1 convolution identity, 10^4 random inputs", worst, 1e-12));

    let gamma2 = Measure1D::gaussian(grid, 2.0)?;
    let ks_gamma2 = ks_distance(&sigma, &gamma2)?;

    let sm = sigma_m(m, grid, DEFAULT_DECONVOLUTION_REG, rho)?;
    checks.push(Check::at_most("deconvolved sigma_m forward residual", sm.residual, 1e-3));

    let mut sweep_entries = Vec::new();
    if !sweep.is_empty() {
        sweep_entries = gaussian_limit_report(&sweep, sweep_samples, derive_seed(seed, 3))?;
        let (strict, within_noise) = is_decreasing(&sweep_entries);
        let mut c = Check::flag(
            "KS(sigma_{m,1}, gamma_2) strictly decreasing along the sweep",
            strict,
            format!("decreasing within noise: {within_noise}"),
        );
        if !strict && within_noise {
            c = c.with_status(Status::Inconclusive);
        }
        checks.push(c);
        let last = sweep_entries.last().expect("nonempty sweep");
        checks.push(Check::at_most(format!("KS(sigma_{{{},1}}, gamma_2)", last.m), last.ks, 0.05));
    }

    let mut rbar_entries = Vec::new();
    if !rbar.is_empty() {
        for (i, &mm) in rbar.iter().enumerate() {
            rbar_entries.push(rbar_comparison(mm, 1.5, rbar_samples, derive_seed(seed, 100 + i as u64))?);
        }
        let decreasing = rbar_entries.windows(2).all(|w| w[1].sup_error_inside < w[0].sup_error_inside);
        checks.push(Check::flag("sup |R_m - R_inf| on |x| <= 1.5 decreasing in m", decreasing, ""));
        let first = rbar_entries[0].max_outside;
        let worst = rbar_entries.iter().map(|e| e.max_outside).fold(0.0, f64::max);
        checks.push(Check::at_most("deviation outside |x| <= 1.5 never exceeds its first value", worst, first));
    }

    let mut growth_result = Value::Null;
    if growth {
        let masses = [4usize, 8, 16, 32]
            .iter()
            .map(|&mm| limit_total_mass(mm, RhoSource::MonteCarlo { samples, seed: derive_seed(seed, 200 + mm as u64) }))
            .collect::<Result<Vec<_>>>()?;
        let fit = growth_fit(&masses)?;
        checks.push(Check::close("slope of ln C_m against (1/2) m ln m", fit.slope, 1.0, 0.2, false));
        growth_result = json!({ "masses": masses, "fit": fit });
    }

    let results = json!({
        "m": m,
        "r": r,
        "rho_exact": exact,
        "sigma_mass": sigma.mass(),
        "sigma_variance": sigma.variance(),
        "ks_sigma_gamma2": ks_gamma2,
        "derivation_audit_ks": audit,
        "sigma_m": { "residual": sm.residual, "clamped_mass": sm.clamped_mass, "reliable": sm.reliable },
        "sweep": sweep_entries,
        "rbar": rbar_entries,
        "growth": growth_result,
    });
    let mut artifacts = vec![
        Artifact { name: "sigma_mr.csv".into(), format: Format::Csv, contents: measure_csv(&sigma) },
        Artifact { name: "sigma_m.csv".into(), format: Format::Csv, contents: measure_csv(&sm.measure) },
    ];
    if !sweep_entries.is_empty() {
        let mut s = String::from("m,ks,noise_floor,samples\n");
        for e in &sweep_entries {
            s.push_str(&format!("{},{},{},{}\n", e.m, csv_float(e.ks), csv_float(e.noise_floor), e.samples));
        }
        artifacts.push(Artifact { name: "gaussian_limit_sweep.csv".into(), format: Format::Csv, contents: s });
    }
    let pts = grid.points();
    let svg = Plot::new(format!("sigma_{{{m},{r}}} and gamma_2"))
        .line("sigma_{m,r}", pts.iter().copied().zip(sigma.density().iter().copied()).collect())
        .line("gamma_2", pts.iter().copied().zip(gamma2.density().iter().copied()).collect())
        .to_svg();
    artifacts.push(Artifact { name: "sigma_mr.svg".into(), format: Format::Svg, contents: svg });
    Ok((finish("limit-law", seed, st, checks, results), artifacts))
}

pub fn run_simulate(st: &mut Settings, seed: u64, a: &SimulateArgs) -> Result<(Report, Vec<Artifact>)> {
    let m = st.get("m", a.m, 2usize)?;
    let l = st.get("L", a.l, 30.0f64)?;
    let r = st.get("r", a.r, 1.0f64)?;
    let omega_flag = st.get_opt("omega", a.omega)?;
    let fields = st.get("fields", a.fields, 300usize)?;
    let grid_flag = st.get_opt("grid-n", a.grid_n)?;
    let kr_samples = st.get("kr-samples", a.kr_samples, 1_000_000usize)?;
    let kr_density_samples = st.get("kr-density-samples", a.kr_density_samples, 20_000usize)?;
    let ks_tol = st.get("ks-tol", a.ks_tol, 0.08f64)?;
    if !(r >= 1.0) {
        return Err(Error::RequiresRAtLeastOne(r));
    }
    let spectrum = Arc::new(build_spectrum(m, l)?);
    let params = omega_params(m as i64, l, r)?;
    let omega = omega_flag.unwrap_or(params.omega);
    let grid_n = grid_flag.unwrap_or_else(|| spectrum.default_grid_n());
    let mut checks = Vec::new();

    let cov = covariance_report(&spectrum)?;
    checks.push(Check::flag("symmetry-forced covariances are exactly zero", cov.zeros_exact(), ""));

    let emp = empirical_complexity(&spectrum, omega, fields, derive_seed(seed, 1), Some(grid_n))?;
    let kr = kac_rice_total(&spectrum, omega, kr_samples, derive_seed(seed, 2))?;
    checks.push(Check::within_se(
        "mean critical-point count vs Kac-Rice total",
        emp.mean_count,
        kr.value,
        emp.std_error.hypot(kr.std_error),
        3.0,
        emp.fields_used,
        50,
    ));
    checks.push(Check::flag(
        "alternating Morse count is zero on every Morse field",
        emp.incomplete_fields == 0,
        format!("{} fields failed after a refined search", emp.incomplete_fields),
    ));
    checks.push(Check::at_most("non-Morse rejection rate", emp.non_morse_fields as f64 / fields as f64, 0.01));

    let sd_u = (spectrum.dim() as f64 + omega).sqrt();
    let value_grid = UniformGrid::symmetric(6.0 * sd_u, 401)?;
    let (kr_density, _) = kac_rice_density(&spectrum, omega, value_grid, kr_density_samples, derive_seed(seed, 3))?;
    let values = emp.values.normalize()?;
    let ks_kac_rice = ks_distance_empirical(&values, &kr_density.normalize()?)?;
    checks.push(Check::at_most("KS(critical values, Kac-Rice density)", ks_kac_rice, ks_tol));

    let rho = ExactRho::new(m + 1, 1.0)?;
    let sigma = sigma_mr(m, r, crate::limit_law::default_grid(), &rho)?;
    let scale = params.value_scale();
    let rescaled = values.rescale_pushforward(1.0 / scale)?;
    let ks = ks_distance_empirical(&rescaled, &sigma)?;
    let ks_unrescaled = ks_distance_empirical(&values, &sigma)?;
    checks.push(Check::at_most("KS(rescaled critical values, sigma_{m,r})", ks, ks_tol));

    let results = json!({
        "dim": spectrum.dim(),
        "frequency_pairs": spectrum.frequencies.len(),
        "omega": omega,
        "omega_params": params,
        "grid_n": grid_n,
        "mean_count": emp.mean_count,
        "count_std_error": emp.std_error,
        "fields_used": emp.fields_used,
        "non_morse_fields": emp.non_morse_fields,
        "incomplete_fields": emp.incomplete_fields,
        "rejection_rate": emp.rejection_rate,
        "critical_values": emp.values.len(),
        "kac_rice_total": kr,
        "kac_rice_density_mass": kr_density.mass(),
        "ks_kac_rice": ks_kac_rice,
        "ks_sigma": ks,
        "ks_sigma_unrescaled": ks_unrescaled,
        "ks_noise_floor": 1.36 / (emp.values.len().max(1) as f64).sqrt(),
        "value_scale": scale,
        "covariance": cov,
    });

    let mut csv = String::from("value,morse_index,field_id\n");
    for f in &emp.fields {
        for p in &f.points {
            csv.push_str(&format!("{},{},{}\n", csv_float(p.value), p.morse_index, f.field_id));
        }
    }
    let hist = rescaled.histogram(-4.0, 4.0, 64)?;
    let bars: Vec<(f64, f64)> = hist.points().into_iter().zip(hist.density().iter().copied()).collect();
    let sg = sigma.grid().points();
    let kr_rescaled = kr_density.normalize()?.rescale_pushforward(1.0 / scale)?;
    let svg = Plot::new(format!("critical values, m={m}, L={l}, r={r}"))
        .bars("rescaled critical values", bars)
        .line("sigma_{m,r}", sg.iter().copied().zip(sigma.density().iter().copied()).collect())
        .line(
            "Kac-Rice",
            kr_rescaled.points().into_iter().zip(kr_rescaled.density().iter().copied()).collect(),
        )
        .to_svg();
    let artifacts = vec![
        Artifact { name: "critical_values.csv".into(), format: Format::Csv, contents: csv },
        Artifact { name: "critical_values.svg".into(), format: Format::Svg, contents: svg },
    ];
    Ok((finish("simulate", seed, st, checks, results), artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("critval").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let mut st = Settings::parse("m = 3\n# comment\nL=2.5\n").unwrap();
        assert_eq!(st.get("m", Some(5i64), 1).unwrap(), 5);
        assert_eq!(st.get("L", None, 1.0).unwrap(), 2.5);
        assert_eq!(st.get("r", None, 1.0).unwrap(), 1.0);
        assert!(st.unused_keys().is_empty());
        assert!(Settings::parse("oops").is_err());
        let mut st = Settings::parse("m=x").unwrap();
        assert!(st.get("m", None, 1i64).is_err());
    }

    #[test]
    fn constants_report() {
        let cli = parse(&["constants", "--m", "1"]);
        let out = execute(&cli).unwrap();
        assert!(out.report.ok());
        let json = out.report.to_json().unwrap();
        assert!(json.contains("0.3183098861837"));
        let cli = parse(&["constants", "--m", "2", "--r", "0.5", "--L", "10"]);
        assert!(matches!(execute(&cli), Err(Error::ConstraintViolation { .. })));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "m=2\nbogus=1\n").unwrap();
        let cli = parse(&["constants", "--config", p.to_str().unwrap()]);
        assert!(execute(&cli).is_err());
    }

    #[test]
    fn limit_law_rejects_small_r() {
        let cli = parse(&["limit-law", "--r", "0.5"]);
        let err = execute(&cli).unwrap_err();
        assert!(err.to_string().contains("r >= 1"));
    }

    #[test]
    fn simulate_rejects_m1() {
        let cli = parse(&["simulate", "--m", "1"]);
        assert!(execute(&cli).unwrap_err().to_string().contains("m > 1"));
    }
}
