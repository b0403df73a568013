use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use l2ext_core::envelope::{
    impose_boundary, make_grid, sharper_constant_ma, slice_fiber, solve_envelope, write_fibre_csv, write_field,
    BoundaryData, ExitRule, Initialization,
};
use l2ext_core::hartogs::{verify_certificate, HartogsDomain};
use l2ext_core::radial::{green_type_radial, prop31_check, sharper_constant_radial};
use l2ext_core::report::{self, emit, CertificateChoice, OutputFormat, Pipeline, RunConfig};
use l2ext_core::{Error, PlanarDomain};

const EXIT_CHAIN: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_CONFIG: u8 = 4;

/// Thread count for the numerics; unset means one per core.
const THREADS_ENV: &str = "L2EXT_THREADS";

#[derive(Parser)]
#[command(name = "l2ext", version, about = "Sharper L2-extension constants: m <= S <= O")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Disc/fibre identity, closed-form constant and certificate check for a radial weight
    RadialCheck(Common),
    /// Solve the MA envelope with MaxCap (or radial oracle) data
    MaSolve {
        #[command(flatten)]
        common: Common,
        /// Use the closed-form radial boundary data instead of MaxCap
        #[arg(long)]
        oracle: bool,
    },
    /// Least-norm extension with the degree ladder
    Bergman(Common),
    /// Full m, S, O comparison
    Bounds(Common),
    /// Bounds over several C values
    SweepC {
        #[command(flatten)]
        common: Common,
        /// Comma-separated negative C values
        #[arg(long = "cs", value_delimiter = ',', allow_hyphen_values = true)]
        cs: Vec<f64>,
    },
}

/// Config file plus flags overriding its keys.
#[derive(Args, Clone)]
struct Common {
    /// JSON run config
    #[arg(long)]
    config: Option<PathBuf>,
    /// domain as JSON, e.g. '{"kind":"disc","radius":2}'
    #[arg(long)]
    domain: Option<String>,
    /// weight as JSON, e.g. '{"kind":"quadratic","alpha":1,"center":[0.4,0]}'
    #[arg(long)]
    weight: Option<String>,
    #[arg(long, value_parser = parse_pipeline)]
    pipeline: Option<Pipeline>,
    #[arg(long)]
    pullback: bool,
    #[arg(long)]
    n_xy: Option<usize>,
    #[arg(long)]
    n_t: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    t_min: Option<f64>,
    #[arg(long = "C", alias = "c", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long)]
    stencil_dirs: Option<usize>,
    #[arg(long, value_parser = parse_exit_rule)]
    exit_rule: Option<ExitRule>,
    #[arg(long)]
    radius_steps: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Pure monotone iteration from max g
    #[arg(long)]
    reference: bool,
    #[arg(long = "N-max", alias = "n-max")]
    n_max: Option<usize>,
    #[arg(long = "N-start", alias = "n-start")]
    n_start: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output formats: json, csv, fibre, ladder, field
    #[arg(long, value_delimiter = ',', value_parser = parse_format)]
    formats: Vec<OutputFormat>,
    /// File stem for outputs
    #[arg(long, default_value = "run")]
    stem: String,
}

fn parse_pipeline(s: &str) -> Result<Pipeline, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown pipeline {s}"))
}

fn parse_exit_rule(s: &str) -> Result<ExitRule, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown exit rule {s}"))
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown format {s}"))
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::from_json(r#"{"domain": {"kind": "unit_disc"}, "weight": {"kind": "zero"}}"#)?,
        };
        let json = |what: &str, s: &str| -> Result<serde_json::Value, Error> {
            serde_json::from_str(s).map_err(|e| Error::Config(format!("--{what}: {e}")))
        };
        if let Some(d) = &self.domain {
            cfg.domain =
                serde_json::from_value(json("domain", d)?).map_err(|e| Error::Config(format!("--domain: {e}")))?;
        }
        if let Some(w) = &self.weight {
            cfg.weight =
                serde_json::from_value(json("weight", w)?).map_err(|e| Error::Config(format!("--weight: {e}")))?;
        }
        if self.pipeline.is_some() {
            cfg.pipeline = self.pipeline;
        }
        if self.pullback {
            cfg.certificate = CertificateChoice::Pullback;
        }
        let s = &mut cfg.solver;
        s.n_xy = self.n_xy.unwrap_or(s.n_xy);
        s.n_t = self.n_t.unwrap_or(s.n_t);
        s.t_min = self.t_min.unwrap_or(s.t_min);
        s.c = self.c.unwrap_or(s.c);
        s.stencil_dirs = self.stencil_dirs.unwrap_or(s.stencil_dirs);
        s.exit_rule = self.exit_rule.unwrap_or(s.exit_rule);
        s.radius_steps = self.radius_steps.unwrap_or(s.radius_steps);
        s.tol = self.tol.unwrap_or(s.tol);
        s.max_sweeps = self.max_sweeps.unwrap_or(s.max_sweeps);
        if self.reference {
            s.init = Initialization::MaxBoundary;
        }
        cfg.bergman.n_max = self.n_max.unwrap_or(cfg.bergman.n_max);
        cfg.bergman.n_start = self.n_start.unwrap_or(cfg.bergman.n_start);
        if self.out.is_some() {
            cfg.output.path = self.out.clone();
        }
        if !self.formats.is_empty() {
            cfg.output.formats = self.formats.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>().map(Error::root) {
        Some(Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
        Some(Error::Config(_) | Error::DomainArgument { .. } | Error::Json(_) | Error::InvalidDomain(_)) => EXIT_CONFIG,
        _ => 1,
    }
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    print!("{}", report::to_json(value)?);
    Ok(())
}

/// Returns whether every flag of the command held.
fn execute(cmd: &Command) -> anyhow::Result<bool> {
    match cmd {
        Command::RadialCheck(common) => {
            let cfg = common.config()?;
            let profile = cfg.weight.radial_profile().ok_or_else(|| {
                Error::Config(format!("radial-check needs a radial weight, got {}", cfg.weight.label()))
            })?;
            let domain = PlanarDomain::from_kind(&cfg.domain)?;
            let hd = HartogsDomain::build(domain, cfg.weight.clone())?;
            let identity = prop31_check(profile, &cfg.quad)?;
            let sharper = sharper_constant_radial(profile, &cfg.quad)?;
            let cert = verify_certificate(&green_type_radial(profile)?, &hd, cfg.certificate_samples)?;
            let ok = identity.rel_err <= 1e-8 && cert.all_ok;
            print_json(
                &serde_json::json!({ "identity": identity, "sharper": sharper, "certificate": cert, "ok": ok }),
            )?;
            Ok(ok)
        }
        Command::MaSolve { common, oracle } => {
            let cfg = common.config()?;
            let domain = PlanarDomain::from_kind(&cfg.domain)?;
            let hd = HartogsDomain::build(domain, cfg.weight.clone())?;
            let bd = if *oracle {
                let profile = cfg
                    .weight
                    .radial_profile()
                    .ok_or_else(|| Error::Config("--oracle needs a radial weight".into()))?;
                BoundaryData::RadialOracle { profile: profile.clone() }
            } else {
                BoundaryData::MaxCap { c: cfg.solver.c }
            };
            let s = &cfg.solver;
            let grid = make_grid(&hd, s.n_xy, s.n_t, s.t_min)?;
            let g = impose_boundary(&grid, &bd)?;
            let sol = solve_envelope(&grid, &g, &s.stencil(), &s.options())?;
            let sharper = sharper_constant_ma(&sol)?;
            let fibre = slice_fiber(&sol)?;
            if let Some(dir) = &cfg.output.path {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                write_fibre_csv(&fibre, &dir.join(format!("{}_fibre.csv", common.stem)))?;
                if cfg.output.formats.contains(&OutputFormat::Field) {
                    write_field(&sol, &dir.join(format!("{}_field.f64", common.stem)))?;
                }
            }
            let diag = sol.diagnostics();
            let tol = sol.default_tolerance();
            let ok = diag.saturation_residual <= tol && diag.psh_violation <= tol;
            print_json(&serde_json::json!({
                "boundary": bd.label(),
                "diagnostics": diag,
                "S": sharper,
                "fibre": fibre,
                "ok": ok,
            }))?;
            Ok(ok)
        }
        Command::Bergman(common) => {
            let cfg = common.config()?;
            let ext = report::run_bergman(&cfg)?;
            let ok = ext.accepted.duality_gap() <= 1e-10;
            print_json(&serde_json::to_value(&ext)?)?;
            Ok(ok)
        }
        Command::Bounds(common) => {
            let cfg = common.config()?;
            let outcome = report::run_with(&cfg, None, None)?;
            if let Some(dir) = &cfg.output.path {
                for p in emit(&outcome, &cfg.output.formats, dir, &common.stem)? {
                    eprintln!("wrote {}", p.display());
                }
            }
            print_json(&serde_json::to_value(&outcome.report)?)?;
            Ok(outcome.report.chain_ok)
        }
        Command::SweepC { common, cs } => {
            let cfg = common.config()?;
            let sweep = report::sweep_c(&cfg, cs)?;
            for s in &sweep.skipped {
                eprintln!("warning: skipped C = {}: {}", s.c, s.reason);
            }
            if let Some(dir) = &cfg.output.path {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let json = dir.join(format!("{}_sweep.json", common.stem));
                let csv = dir.join(format!("{}_sweep.csv", common.stem));
                report::write_json(&sweep, &json)?;
                report::write_csv(&sweep.reports, &csv)?;
                eprintln!("wrote {} and {}", json.display(), csv.display());
            }
            print_json(&serde_json::to_value(&sweep)?)?;
            Ok(sweep.chain_ok && sweep.monotone_ok)
        }
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors share the config exit code; clap's own code 2 would read as a chain violation
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = init_threads().and_then(|_| execute(&cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHAIN),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
