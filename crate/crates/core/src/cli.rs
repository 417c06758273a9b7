//! Command-line front end: argument parsing, the run manifest and the JSON
//! and CSV writers.  The binary only forwards to [`run`].

use std::ffi::OsString;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::WedgeConfig;
use crate::elliptic;
use crate::error::{Error, Result};
use crate::farfield::{self, FarFieldRow};
use crate::jet;
use crate::reconstruct::SpectralSolution;
use crate::residues::CoefficientSource;
use crate::surface::{self, Component};
use crate::verify::{self, Fault, VerifyOptions};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lemwedge", version, about = "Spectral solution and diffraction coefficient of the right-angle penetrable wedge at index √2")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Incident angle θ_i in radians.
    #[arg(long, global = true, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub theta_i: f64,
    /// Limiting-absorption displacement ε > 0.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub eps: f64,
    /// Exterior wavenumber.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub k0: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, global = true, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
    /// Override a tolerance, e.g. `tol_eval=1e-9`; repeatable.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    pub tol_override: Vec<String>,
    /// Write the output here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, hide = true, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Evaluate Q_scat and Q_total at one spectral point, with the chain of
    /// intermediate values.
    Eval {
        /// Spectral point as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
    },
    /// Diffraction coefficient over an angle grid.
    Farfield {
        /// "start:stop:count"; defaults to 361 angles inside the exterior sector.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Pole points and residue coefficients of the 15 scattered labels.
    Tables {
        #[arg(long, value_enum, default_value_t = SourceArg::Tables)]
        source: SourceArg,
    },
    /// Run the acceptance checks; exit 0 iff all pass.
    Verify {
        /// Run only these check ids (1–12); repeatable.
        #[arg(long)]
        check: Vec<u8>,
    },
    /// Reciprocity asymmetry |D(θ;θ′) − D(θ′;θ)| over a grid.
    Reciprocity {
        /// "start:stop:count"; defaults to 13 angles inside the exterior sector.
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceArg {
    Tables,
    Modes,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultArg {
    CorruptTable,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub cfg: WedgeConfig,
    pub format: Format,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tol_overrides: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<CoefficientSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<u8>>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let (cfg, manifest) = match prepare(&cli) {
        Ok(v) => v,
        Err(e) => {
            report_error(err, &e);
            return EXIT_USAGE;
        }
    };
    let result = execute(&cli, &cfg, &manifest);
    match result {
        Ok((bytes, code, failure)) => {
            let written = match &cli.common.output {
                Some(path) => std::fs::write(path, &bytes).map_err(|e| e.to_string()),
                None => out.write_all(&bytes).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "{}", json!({"error": "Io", "message": e}));
                return EXIT_FAILURE;
            }
            if let Some(f) = failure {
                let _ = writeln!(err, "first failure: {f}");
            }
            code
        }
        Err(e) => {
            report_error(err, &e);
            EXIT_FAILURE
        }
    }
}

fn report_error(err: &mut dyn Write, e: &Error) {
    let _ = writeln!(err, "{}", json!({"error": e.name(), "message": e.to_string()}));
}

fn prepare(cli: &Cli) -> Result<(WedgeConfig, RunManifest)> {
    let c = &cli.common;
    let mut cfg = WedgeConfig::new(c.theta_i, c.eps).with_k0(c.k0);
    for item in &c.tol_override {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected KEY=VALUE, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad tolerance value `{value}`")))?;
        cfg.tolerances.set(key.trim(), value)?;
    }
    cfg.validate()?;
    let mut m = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "",
        cfg,
        format: c.format,
        seed: c.seed,
        tol_overrides: c.tol_override.clone(),
        zeta: None,
        grid: None,
        source: None,
        checks: None,
    };
    match &cli.command {
        Command::Eval { zeta } => {
            m.command = "eval";
            m.zeta = Some(parse_complex(zeta)?);
        }
        Command::Farfield { grid } => {
            m.command = "farfield";
            m.grid = Some(match grid {
                Some(g) => parse_grid(g)?,
                None => farfield::default_grid(361),
            });
        }
        Command::Tables { source } => {
            m.command = "tables";
            m.source = Some(match source {
                SourceArg::Tables => CoefficientSource::Tables,
                SourceArg::Modes => CoefficientSource::Modes,
            });
        }
        Command::Verify { check } => {
            m.command = "verify";
            if let Some(bad) = check.iter().find(|&&id| !(1..=12).contains(&id)) {
                return Err(Error::InvalidConfig(format!("no check with id {bad}")));
            }
            if !check.is_empty() {
                m.checks = Some(check.clone());
            }
        }
        Command::Reciprocity { grid } => {
            m.command = "reciprocity";
            m.grid = Some(match grid {
                Some(g) => parse_grid(g)?,
                None => farfield::default_grid(13),
            });
        }
    }
    Ok((cfg, m))
}

/// Parses "re,im" (or a bare real number).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidConfig(format!("expected \"re,im\", got `{s}`"));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Parses "start:stop:count" into `count` evenly spaced angles, both ends
/// included.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidConfig(format!("grid `{s}`: {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:count"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad("count must be positive and ends finite"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if !(start < stop) {
        return Err(bad("start must be below stop"));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { stop } else { start + k as f64 * step })
        .collect())
}

/// Output bytes, exit code and the first failure, if any.
type Outcome = (Vec<u8>, i32, Option<String>);

fn execute(cli: &Cli, cfg: &WedgeConfig, m: &RunManifest) -> Result<Outcome> {
    let fmt = cli.common.format;
    match &cli.command {
        Command::Eval { .. } => {
            let audit = eval_audit(cfg, m.zeta.expect("set in prepare"))?;
            audit.check_finite()?;
            Ok((emit(fmt, m, &audit, |w| audit.write_csv(w))?, EXIT_OK, None))
        }
        Command::Tables { .. } => {
            let rows = table_rows(cfg, m.source.expect("set in prepare"))?;
            for r in &rows {
                r.check_finite()?;
            }
            let body = json!({ "records": rows });
            Ok((emit(fmt, m, &body, |w| write_tables_csv(w, &rows))?, EXIT_OK, None))
        }
        Command::Farfield { .. } => {
            let table = farfield::farfield_sweep(m.grid.as_deref().expect("set"), cfg)?;
            for r in &table.rows {
                check_row(r)?;
            }
            let body = json!({ "table": table });
            Ok((emit(fmt, m, &body, |w| write_farfield_csv(w, &table.rows))?, EXIT_OK, None))
        }
        Command::Reciprocity { .. } => {
            let rep = farfield::reciprocity_report(m.grid.as_deref().expect("set"), cfg)?;
            finite("reciprocity max", &[rep.max, rep.mean, rep.max_residual])?;
            for v in rep.delta.iter().flatten().flatten() {
                finite("reciprocity delta", &[*v])?;
            }
            let body = json!({ "report": rep });
            Ok((
                emit(fmt, m, &body, |w| {
                    let summary = json!({
                        "max": rep.max, "mean": rep.mean, "argmax": rep.argmax,
                        "skipped": rep.skipped, "unstable": rep.unstable,
                        "max_residual": rep.max_residual,
                    });
                    writeln!(w, "# summary: {summary}").map_err(io_err)?;
                    let mut c = csv::Writer::from_writer(w);
                    c.write_record(["theta", "theta_prime", "delta"]).map_err(csv_err)?;
                    for (a, row) in rep.delta.iter().enumerate() {
                        for (b, v) in row.iter().enumerate() {
                            c.write_record([
                                rep.grid[a].to_string(),
                                rep.grid[b].to_string(),
                                v.map(|x| x.to_string()).unwrap_or_default(),
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                    c.flush().map_err(io_err)
                })?,
                EXIT_OK,
                None,
            ))
        }
        Command::Verify { .. } => run_verify(cli, cfg, m),
    }
}

fn run_verify(cli: &Cli, cfg: &WedgeConfig, m: &RunManifest) -> Result<Outcome> {
    let opts = VerifyOptions {
        seed: cli.common.seed,
        fault: cli.common.inject_fault.map(|f| match f {
            FaultArg::CorruptTable => Fault::CorruptTable,
        }),
        ..VerifyOptions::default()
    };
    let ids: Vec<u8> = m.checks.clone().unwrap_or_else(|| (1..=12).collect());
    let checks: Vec<_> = ids.iter().map(|&id| verify::run_check(id, cfg, &opts)).collect();
    let passed = checks.iter().all(|c| c.passed);
    let first = checks
        .iter()
        .find(|c| !c.passed)
        .map(|c| format!("{} (check {}): {}", c.name, c.id, c.failure_detail().unwrap_or_default()));
    let mut buf = Vec::new();
    match cli.common.format {
        Format::Json => {
            let head = json!({"schema_version": SCHEMA_VERSION, "manifest": m});
            writeln!(buf, "{head}").map_err(io_err)?;
            for c in &checks {
                writeln!(buf, "{}", serde_json::to_string(c).map_err(json_err)?).map_err(io_err)?;
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let summary = json!({"summary": {"passed": passed, "failed": failed, "first_failure": first}});
            writeln!(buf, "{summary}").map_err(io_err)?;
        }
        Format::Csv => {
            write_manifest_comment(&mut buf, m)?;
            let mut c = csv::Writer::from_writer(&mut buf);
            c.write_record(["id", "name", "passed", "detail"]).map_err(csv_err)?;
            for r in &checks {
                c.write_record([
                    r.id.to_string(),
                    r.name.clone(),
                    r.passed.to_string(),
                    r.failure_detail().unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
            c.flush().map_err(io_err)?;
        }
    }
    Ok((buf, if passed { EXIT_OK } else { EXIT_FAILURE }, first))
}

fn emit<T: Serialize>(
    fmt: Format,
    m: &RunManifest,
    body: &T,
    csv_body: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match fmt {
        Format::Json => {
            let mut v = serde_json::to_value(body).map_err(json_err)?;
            let obj = v
                .as_object_mut()
                .ok_or_else(|| Error::NonFiniteOutput("output is not an object".into()))?;
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("manifest".into(), serde_json::to_value(m).map_err(json_err)?);
            serde_json::to_writer_pretty(&mut buf, &v).map_err(json_err)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            write_manifest_comment(&mut buf, m)?;
            csv_body(&mut buf)?;
        }
    }
    Ok(buf)
}

fn write_manifest_comment(buf: &mut Vec<u8>, m: &RunManifest) -> Result<()> {
    let line = serde_json::to_string(m).map_err(json_err)?;
    writeln!(buf, "# manifest: {line}").map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("write failed: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv: {e}"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::NonFiniteOutput(format!("json: {e}"))
}

fn finite(what: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteOutput(what.to_string()))
    }
}

fn finite_c(what: &str, zs: &[Complex64]) -> Result<()> {
    if zs.iter().all(|z| z.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteOutput(what.to_string()))
    }
}

fn check_row(r: &FarFieldRow) -> Result<()> {
    finite("farfield theta", &[r.theta])?;
    if let Some(d) = r.d {
        finite_c("farfield D", &[d])?;
    }
    if let Some(res) = r.residual {
        finite("farfield residual", &[res])?;
    }
    Ok(())
}

/// The evaluation chain at one spectral point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalAudit {
    pub zeta: Complex64,
    pub zeta_incident: Complex64,
    /// e^{i(ζ − π/4)}, the Snell exponential solved for.
    pub s: Complex64,
    pub t: Complex64,
    #[serde(rename = "Y")]
    pub y: Complex64,
    pub component: Component,
    pub u: Complex64,
    /// u − u₀.
    pub delta: Complex64,
    /// Σ C_ℓ[ζ(u − u_ℓ) − ζ(u₀ − u_ℓ)].
    pub pole_sum: Complex64,
    #[serde(rename = "R")]
    pub remainder: Complex64,
    pub gauge_constant: Complex64,
    #[serde(rename = "Q_scat")]
    pub q_scat: Complex64,
    #[serde(rename = "Q_inc")]
    pub q_inc: Complex64,
    #[serde(rename = "Q_total")]
    pub q_total: Complex64,
}

impl EvalAudit {
    fn fields(&self) -> [(&'static str, Complex64); 13] {
        [
            ("zeta", self.zeta),
            ("zeta_incident", self.zeta_incident),
            ("s", self.s),
            ("t", self.t),
            ("Y", self.y),
            ("u", self.u),
            ("delta", self.delta),
            ("pole_sum", self.pole_sum),
            ("R", self.remainder),
            ("gauge_constant", self.gauge_constant),
            ("Q_scat", self.q_scat),
            ("Q_inc", self.q_inc),
            ("Q_total", self.q_total),
        ]
    }

    fn check_finite(&self) -> Result<()> {
        for (name, z) in self.fields() {
            finite_c(name, &[z])?;
        }
        Ok(())
    }

    fn write_csv(&self, w: &mut Vec<u8>) -> Result<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["quantity", "re", "im"]).map_err(csv_err)?;
        for (name, z) in self.fields() {
            c.write_record([name.to_string(), z.re.to_string(), z.im.to_string()])
                .map_err(csv_err)?;
        }
        c.flush().map_err(io_err)
    }
}

pub fn eval_audit(cfg: &WedgeConfig, zeta: Complex64) -> Result<EvalAudit> {
    let sol = SpectralSolution::new(cfg)?;
    let guard = cfg.tolerances.pole_guard;
    let point = surface::point_of_zeta(zeta, guard)?;
    let delta = surface::lift_delta(&point, guard)?;
    let u = elliptic::u0() + delta;
    let diffs = sol.basis().diffs(u)?;
    let pole_sum = jet::weighted(sol.records.iter().map(|r| r.c), &diffs);
    let remainder = sol.remainder(u)?;
    let q_scat = sol.q_scat_u(u)?;
    let q_total = sol.q_total(zeta)?;
    Ok(EvalAudit {
        zeta,
        zeta_incident: sol.zeta_incident(),
        s: surface::spectral_exponential(zeta),
        t: point.t,
        y: point.y,
        component: point.component,
        u,
        delta,
        pole_sum,
        remainder,
        gauge_constant: sol.gauge_constant,
        q_scat,
        q_inc: q_total - q_scat,
        q_total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub t: Complex64,
    #[serde(rename = "Y")]
    pub y: Complex64,
    pub u: Complex64,
    #[serde(rename = "r_I")]
    pub r_i: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    #[serde(rename = "C")]
    pub c: Complex64,
    pub d: Complex64,
}

impl TableRow {
    fn values(&self) -> [Complex64; 8] {
        [self.t, self.y, self.u, self.r_i, self.alpha, self.beta, self.c, self.d]
    }

    fn check_finite(&self) -> Result<()> {
        finite_c(&format!("table row {}", self.label), &self.values())
    }
}

pub fn table_rows(cfg: &WedgeConfig, source: CoefficientSource) -> Result<Vec<TableRow>> {
    let sol = SpectralSolution::with_source(cfg, source)?;
    Ok(sol
        .poles
        .iter()
        .zip(&sol.records)
        .map(|(p, r)| TableRow {
            label: p.label.to_string(),
            t: p.t(),
            y: p.y(),
            u: p.u.u,
            r_i: r.r_i,
            alpha: r.alpha,
            beta: r.beta,
            c: r.c,
            d: r.d,
        })
        .collect())
}

fn write_tables_csv(w: &mut Vec<u8>, rows: &[TableRow]) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    let names = ["t", "Y", "u", "r_I", "alpha", "beta", "C", "d"];
    let mut header = vec!["label".to_string()];
    for n in names {
        header.push(format!("re({n})"));
        header.push(format!("im({n})"));
    }
    c.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.label.clone()];
        for z in r.values() {
            rec.push(z.re.to_string());
            rec.push(z.im.to_string());
        }
        c.write_record(&rec).map_err(csv_err)?;
    }
    c.flush().map_err(io_err)
}

fn write_farfield_csv(w: &mut Vec<u8>, rows: &[FarFieldRow]) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["theta", "re(D)", "im(D)", "flag"]).map_err(csv_err)?;
    for r in rows {
        let flag = if r.flags.is_empty() {
            "ok".to_string()
        } else {
            r.flags
                .iter()
                .map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
                .collect::<Vec<_>>()
                .join("|")
        };
        c.write_record([
            r.theta.to_string(),
            r.d.map(|d| d.re.to_string()).unwrap_or_default(),
            r.d.map(|d| d.im.to_string()).unwrap_or_default(),
            flag,
        ])
        .map_err(csv_err)?;
    }
    c.flush().map_err(io_err)
}
