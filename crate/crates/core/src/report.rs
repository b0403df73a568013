//! Config-driven runs: the comparison `m ≤ S ≤ O` between the least-norm
//! extension, the sharper constant from a Green-type certificate and the
//! classical constant `π e^{B(0)}`, plus C-sweeps and file output.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bergman::{radial_is_diagonal, stabilised_extension, StabilisedExtension};
use crate::domain::{DomainKind, PlanarDomain};
use crate::envelope::{
    check_c_validity, harmonic_minorant_check, impose_boundary, ma_certificate, make_grid, sharper_constant_ma,
    slice_fiber, solve_envelope, write_fibre_csv, write_field, BoundaryData, EnvelopeSolution, ExitRule, FibreProfile,
    Initialization, SharperConstant, SolveOptions, SolverDiagnostics, StencilSpec,
};
use crate::error::{Error, Result};
use crate::hartogs::{
    fibre_constant, verify_certificate, CertificateProvenance, CertificateReport, GreenTypeCertificate, HartogsDomain,
    LeviReport,
};
use crate::quadrature::{Integral, QuadratureSpec};
use crate::radial::{green_type_radial, prop31_check, sharper_constant_radial, IdentityCheck};
use crate::weight::WeightField;

/// Base chain tolerance before uncertainties are added.
pub const TOL_CHAIN: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Radial,
    Ma,
    Both,
}

/// Which certificate supplies `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateChoice {
    /// Closed form for radial weights, MA solution otherwise.
    #[default]
    Auto,
    /// `G̃ = G_{Ω,0}(z)`, reproducing `O`.
    Pullback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_xy: usize,
    pub n_t: usize,
    pub t_min: f64,
    #[serde(rename = "C", alias = "c")]
    pub c: f64,
    pub stencil_dirs: usize,
    pub radius_steps: f64,
    pub circle_points: usize,
    pub exit_rule: ExitRule,
    pub tol: f64,
    pub max_sweeps: usize,
    pub init: Initialization,
    pub relaxation: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let st = StencilSpec::default();
        let opts = SolveOptions::default();
        SolverConfig {
            n_xy: 64,
            n_t: 64,
            t_min: -8.0,
            c: -4.0,
            stencil_dirs: st.directions,
            radius_steps: st.radius_steps,
            circle_points: st.circle_points,
            exit_rule: st.exit_rule,
            tol: opts.tol,
            max_sweeps: opts.max_sweeps,
            init: opts.init,
            relaxation: opts.relaxation,
        }
    }
}

impl SolverConfig {
    pub fn stencil(&self) -> StencilSpec {
        StencilSpec {
            directions: self.stencil_dirs,
            radius_steps: self.radius_steps,
            circle_points: self.circle_points,
            exit_rule: self.exit_rule,
        }
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_sweeps: self.max_sweeps,
            init: self.init,
            relaxation: self.relaxation,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BergmanConfig {
    #[serde(alias = "N_start")]
    pub n_start: usize,
    #[serde(alias = "N_max")]
    pub n_max: usize,
    /// Defaults to adaptive radial quadrature for radial weights on discs
    /// and a polar tensor rule otherwise.
    pub quad: Option<QuadratureSpec>,
}

impl Default for BergmanConfig {
    fn default() -> Self {
        BergmanConfig { n_start: 16, n_max: 64, quad: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    /// `t,v` profile over `z = 0`
    Fibre,
    /// Bergman degree ladder
    Ladder,
    /// Full solver field with JSON sidecar
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub formats: Vec<OutputFormat>,
    /// Directory receiving the files.
    pub path: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { formats: vec![OutputFormat::Json, OutputFormat::Csv], path: None }
    }
}

/// Run configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainKind,
    pub weight: WeightField,
    /// Chosen from the weight when absent: radial weights use the closed
    /// form, others the MA solve.
    #[serde(default)]
    pub pipeline: Option<Pipeline>,
    #[serde(default)]
    pub certificate: CertificateChoice,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub bergman: BergmanConfig,
    /// Quadrature of the radial identities.
    #[serde(default)]
    pub quad: QuadratureSpec,
    #[serde(default = "default_samples")]
    pub certificate_samples: usize,
    #[serde(default = "default_samples")]
    pub levi_samples: usize,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_samples() -> usize {
    400
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn pipeline(&self) -> Pipeline {
        self.pipeline.unwrap_or(if self.weight.radial_profile().is_some() { Pipeline::Radial } else { Pipeline::Ma })
    }

    /// Checks everything that does not need numerics.
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if s.n_xy < 16 || s.n_t < 16 {
            return Err(Error::Config(format!("solver grid must be at least 16 x 16, got {} x {}", s.n_xy, s.n_t)));
        }
        if !(s.t_min <= -4.0 && s.t_min.is_finite()) {
            return Err(Error::Config(format!("solver t_min must be <= -4, got {}", s.t_min)));
        }
        if !(s.c < 0.0 && s.c.is_finite()) {
            return Err(Error::Config(format!("solver C must be negative, got {}", s.c)));
        }
        s.stencil().validate()?;
        s.options().validate()?;
        self.quad.validate()?;
        if let Some(q) = &self.bergman.quad {
            q.validate()?;
        }
        if self.bergman.n_start == 0 || self.bergman.n_start > self.bergman.n_max {
            return Err(Error::Config(format!(
                "bergman degrees need 1 <= n_start <= n_max, got {} and {}",
                self.bergman.n_start, self.bergman.n_max
            )));
        }
        if matches!(self.pipeline(), Pipeline::Radial | Pipeline::Both) && self.weight.radial_profile().is_none() {
            return Err(Error::Config(format!(
                "the radial pipeline needs a radial weight, got {}",
                self.weight.label()
            )));
        }
        if self.certificate_samples == 0 || self.levi_samples == 0 {
            return Err(Error::Config("sample counts must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON, output section excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let text = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

pub fn domain_label(kind: &DomainKind) -> String {
    match kind {
        DomainKind::UnitDisc => "unit_disc".into(),
        DomainKind::Disc { radius } => format!("disc(R={radius})"),
        DomainKind::Conformal { coeffs } => format!("conformal({} coeffs)", coeffs.len()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// `S + S_err < O` with verified preconditions
    Strict,
    /// Preconditions hold but the margin does not exceed the uncertainty.
    Inconclusive,
    /// Levi proxy not positive, no MA certificate, or C unchecked.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSection {
    pub identity: IdentityCheck,
    pub sharper: Integral,
    pub certificate: CertificateReport,
    /// MA solve with the closed-form boundary data, when the pipeline is
    /// `both`.
    pub ma_oracle: Option<MaOracle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaOracle {
    pub s: SharperConstant,
    /// `S_MA − S_closed_form`
    pub deviation: f64,
    pub diagnostics: SolverDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaSection {
    #[serde(rename = "C")]
    pub c: f64,
    /// Largest sampled `max(log|z|², C) − B(z)`; negative when valid.
    pub c_validity: f64,
    pub levi: Option<LeviReport>,
    pub diagnostics: SolverDiagnostics,
    pub sharper: SharperConstant,
    /// `min (v + B)` over Interior
    pub minorant_margin: f64,
    /// `tol_cmp` at this grid size
    pub tol_cmp: f64,
    pub certificate: CertificateReport,
    pub fibre: FibreProfile,
    pub fibre_convexity_defect: f64,
    pub fibre_monotonicity_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackSection {
    pub constant: Integral,
    pub certificate: CertificateReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub s_minus_m: f64,
    pub o_minus_s: f64,
}

/// One run of the `m ≤ S ≤ O` comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub domain: String,
    pub weight: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub m: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "S_err")]
    pub s_err: f64,
    #[serde(rename = "O")]
    pub o: f64,
    pub provenance: CertificateProvenance,
    pub margins: Margins,
    pub tol_chain: f64,
    pub chain_ok: bool,
    pub strictness: Strictness,
    pub strict_ok: bool,
    pub config_hash: String,
    pub pipeline: Pipeline,
    pub bergman: StabilisedExtension,
    pub radial: Option<RadialSection>,
    pub ma: Option<MaSection>,
    pub pullback: Option<PullbackSection>,
}

/// A report plus the artefacts that only go to side files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: BoundsReport,
    pub solution: Option<EnvelopeSolution>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

fn bergman_quad(domain: &PlanarDomain, weight: &WeightField, cfg: &BergmanConfig) -> QuadratureSpec {
    cfg.quad.unwrap_or(if radial_is_diagonal(domain, weight) {
        QuadratureSpec::AdaptiveRadial { target_err: 1e-10 }
    } else {
        QuadratureSpec::PolarTensor { n_r: 64, n_theta: 64 }
    })
}

/// The least-norm extension for a config.
pub fn run_bergman(config: &RunConfig) -> Result<StabilisedExtension> {
    let domain = stage("domain", PlanarDomain::from_kind(&config.domain))?;
    let quad = bergman_quad(&domain, &config.weight, &config.bergman);
    stage("bergman", stabilised_extension(&domain, &config.weight, config.bergman.n_start, config.bergman.n_max, &quad))
}

fn solve(hd: &HartogsDomain, s: &SolverConfig, bd: &BoundaryData) -> Result<EnvelopeSolution> {
    let grid = make_grid(hd, s.n_xy, s.n_t, s.t_min)?;
    let g = impose_boundary(&grid, bd)?;
    solve_envelope(&grid, &g, &s.stencil(), &s.options())
}

fn ma_section(config: &RunConfig, hd: &HartogsDomain, c: f64) -> Result<(MaSection, EnvelopeSolution)> {
    let c_validity = stage("c_validity", check_c_validity(hd.base(), c))?;
    let levi = if hd.weight().is_smooth_parametric() {
        Some(stage("levi", hd.levi_sample(config.levi_samples))?)
    } else {
        None
    };
    let sol = stage("ma_solve", solve(hd, &config.solver, &BoundaryData::MaxCap { c }))?;
    let sharper = stage("sharper_constant_ma", sharper_constant_ma(&sol))?;
    let minorant_margin = stage("harmonic_minorant", harmonic_minorant_check(&sol, hd.base()))?;
    let tol_cmp = sol.default_tolerance();
    let cert = stage("ma_certificate", ma_certificate(&sol))?.with_psh_tolerance(tol_cmp);
    let certificate = stage("ma_certificate", verify_certificate(&cert, hd, config.certificate_samples))?;
    let fibre = stage("fibre", slice_fiber(&sol))?;
    Ok((
        MaSection {
            c,
            c_validity,
            levi,
            diagnostics: sol.diagnostics(),
            sharper,
            minorant_margin,
            tol_cmp,
            certificate,
            fibre_convexity_defect: fibre.convexity_defect(),
            fibre_monotonicity_defect: fibre.monotonicity_defect(),
            fibre,
        },
        sol,
    ))
}

fn radial_section(config: &RunConfig, hd: &HartogsDomain) -> Result<RadialSection> {
    let profile = hd.weight().radial_profile().ok_or_else(|| {
        Error::Config(format!("the radial pipeline needs a radial weight, got {}", hd.weight().label()))
    })?;
    let identity = stage("prop31", prop31_check(profile, &config.quad))?;
    let sharper = stage("sharper_constant_radial", sharper_constant_radial(profile, &config.quad))?;
    let cert = stage("certificate", green_type_radial(profile))?;
    let certificate = stage("certificate", verify_certificate(&cert, hd, config.certificate_samples))?;
    let ma_oracle = if config.pipeline() == Pipeline::Both {
        let sol =
            stage("ma_oracle", solve(hd, &config.solver, &BoundaryData::RadialOracle { profile: profile.clone() }))?;
        let s = stage("ma_oracle", sharper_constant_ma(&sol))?;
        Some(MaOracle { s, deviation: s.value - sharper.value, diagnostics: sol.diagnostics() })
    } else {
        None
    };
    Ok(RadialSection { identity, sharper, certificate, ma_oracle })
}

/// Runs one configuration, with `C` and the Bergman result optionally
/// supplied by a sweep.
pub fn run_with(config: &RunConfig, c: Option<f64>, bergman: Option<&StabilisedExtension>) -> Result<RunOutcome> {
    stage("config", config.validate())?;
    let domain = stage("domain", PlanarDomain::from_kind(&config.domain))?;
    let hd = stage("hartogs", HartogsDomain::build(domain.clone(), config.weight.clone()))?;
    let o = domain.optimal_constant();
    let pipeline = config.pipeline();
    let c = c.unwrap_or(config.solver.c);

    let mut radial = None;
    let mut ma = None;
    let mut pullback = None;
    let mut solution = None;
    let (s, s_err, provenance) = if config.certificate == CertificateChoice::Pullback {
        let cert = GreenTypeCertificate::pullback(&domain);
        let constant = stage("pullback", fibre_constant(&cert, config.quad.target()))?;
        let certificate = stage("pullback", verify_certificate(&cert, &hd, config.certificate_samples))?;
        pullback = Some(PullbackSection { constant, certificate });
        (constant.value, constant.error, CertificateProvenance::Pullback)
    } else if pipeline == Pipeline::Ma {
        let (sec, sol) = ma_section(config, &hd, c)?;
        let out = (sec.sharper.value, sec.sharper.uncertainty, CertificateProvenance::MaSolution { c });
        ma = Some(sec);
        solution = Some(sol);
        out
    } else {
        let sec = radial_section(config, &hd)?;
        let out = (sec.sharper.value, sec.sharper.error, CertificateProvenance::RadialClosedForm);
        radial = Some(sec);
        out
    };

    let bergman = match bergman {
        Some(b) => b.clone(),
        None => run_bergman(config)?,
    };
    let m = bergman.accepted.norm_sq;
    let m_err = m * bergman.rel_change;
    let tol_chain = TOL_CHAIN + s_err + m_err;
    let chain_ok = m <= s + tol_chain && s <= o + tol_chain;
    let strict_applicable =
        ma.as_ref().is_some_and(|sec| sec.c_validity < 0.0 && sec.levi.as_ref().is_some_and(|l| l.min_eig > 0.0));
    let strictness = if !strict_applicable {
        Strictness::NotApplicable
    } else if s + s_err < o {
        Strictness::Strict
    } else {
        Strictness::Inconclusive
    };
    let report = BoundsReport {
        domain: domain_label(&config.domain),
        weight: config.weight.label(),
        c: ma.as_ref().map(|sec| sec.c),
        m,
        s,
        s_err,
        o,
        provenance,
        margins: Margins { s_minus_m: s - m, o_minus_s: o - s },
        tol_chain,
        chain_ok,
        strictness,
        strict_ok: strictness == Strictness::Strict,
        config_hash: config.hash(),
        pipeline,
        bergman,
        radial,
        ma,
        pullback,
    };
    Ok(RunOutcome { report, solution })
}

pub fn run(config: &RunConfig) -> Result<BoundsReport> {
    Ok(run_with(config, None, None)?.report)
}

/// A C value left out of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRun {
    #[serde(rename = "C")]
    pub c: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Ordered by decreasing `C`.
    pub reports: Vec<BoundsReport>,
    pub skipped: Vec<SkippedRun>,
    /// Largest increase `S(C_next) − S(C)` along decreasing `C`; zero when
    /// nonincreasing.
    pub worst_increase: f64,
    pub monotone_ok: bool,
    pub chain_ok: bool,
}

/// MA runs over several `C`, sharing one Bergman computation. Invalid
/// values are skipped with a reason.
pub fn sweep_c(config: &RunConfig, cs: &[f64]) -> Result<SweepReport> {
    let mut cs: Vec<f64> = cs.to_vec();
    cs.sort_by(|a, b| b.total_cmp(a));
    let mut config = config.clone();
    config.pipeline = Some(Pipeline::Ma);
    config.certificate = CertificateChoice::Auto;
    if cs.is_empty() {
        return Ok(SweepReport {
            reports: vec![],
            skipped: vec![],
            worst_increase: 0.0,
            monotone_ok: true,
            chain_ok: true,
        });
    }
    stage("config", config.validate())?;
    let domain = stage("domain", PlanarDomain::from_kind(&config.domain))?;
    let mut valid = Vec::new();
    let mut skipped = Vec::new();
    for &c in &cs {
        match check_c_validity(&domain, c) {
            Ok(_) => valid.push(c),
            Err(e) => skipped.push(SkippedRun { c, reason: e.to_string() }),
        }
    }
    let bergman = if valid.is_empty() { None } else { Some(run_bergman(&config)?) };
    let outcomes: Vec<Result<BoundsReport>> =
        valid.par_iter().map(|&c| run_with(&config, Some(c), bergman.as_ref()).map(|o| o.report)).collect();
    let mut reports = Vec::new();
    for r in outcomes {
        reports.push(r?);
    }
    let worst_increase = reports.windows(2).map(|w| w[1].s - w[0].s).fold(0.0, f64::max);
    let tol = reports.iter().map(|r| r.tol_chain).fold(0.0, f64::max);
    let monotone_ok = worst_increase <= tol;
    let chain_ok = reports.iter().all(|r| r.chain_ok);
    Ok(SweepReport { reports, skipped, worst_increase, monotone_ok, chain_ok })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, to_json(value)?).map_err(io_err(path))
}

pub const CSV_HEADER: [&str; 12] =
    ["domain", "weight", "C", "m", "S", "S_err", "O", "S_minus_m", "O_minus_S", "chain_ok", "strictness", "provenance"];

/// One row per report.
pub fn to_csv(reports: &[BoundsReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numeric(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        let strict = serde_json::to_value(r.strictness)?;
        let prov = match r.provenance {
            CertificateProvenance::RadialClosedForm => "radial_closed_form",
            CertificateProvenance::MaSolution { .. } => "ma_solution",
            CertificateProvenance::Pullback => "pullback",
        };
        w.write_record([
            r.domain.clone(),
            r.weight.clone(),
            r.c.map(|c| c.to_string()).unwrap_or_default(),
            r.m.to_string(),
            r.s.to_string(),
            r.s_err.to_string(),
            r.o.to_string(),
            r.margins.s_minus_m.to_string(),
            r.margins.o_minus_s.to_string(),
            r.chain_ok.to_string(),
            strict.as_str().unwrap_or_default().to_string(),
            prov.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numeric(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(reports: &[BoundsReport], path: &Path) -> Result<()> {
    fs::write(path, to_csv(reports)?).map_err(io_err(path))
}

pub fn write_ladder_csv(ext: &StabilisedExtension, path: &Path) -> Result<()> {
    let mut out = String::from("N,norm_sq\n");
    for (n, v) in &ext.ladder {
        out.push_str(&format!("{n},{v:.17e}\n"));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Writes the selected formats for one run into `dir` as `<stem>.*`;
/// returns the files written.
pub fn emit(outcome: &RunOutcome, formats: &[OutputFormat], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for f in formats {
        let path = match f {
            OutputFormat::Json => {
                let p = dir.join(format!("{stem}.json"));
                write_json(&outcome.report, &p)?;
                p
            }
            OutputFormat::Csv => {
                let p = dir.join(format!("{stem}.csv"));
                write_csv(std::slice::from_ref(&outcome.report), &p)?;
                p
            }
            OutputFormat::Fibre => {
                let Some(sec) = &outcome.report.ma else { continue };
                let p = dir.join(format!("{stem}_fibre.csv"));
                write_fibre_csv(&sec.fibre, &p)?;
                p
            }
            OutputFormat::Ladder => {
                let p = dir.join(format!("{stem}_ladder.csv"));
                write_ladder_csv(&outcome.report.bergman, &p)?;
                p
            }
            OutputFormat::Field => {
                let Some(sol) = &outcome.solution else { continue };
                let p = dir.join(format!("{stem}_field.f64"));
                write_field(sol, &p)?;
                p
            }
        };
        written.push(path);
    }
    Ok(written)
}
