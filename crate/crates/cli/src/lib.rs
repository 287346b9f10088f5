//! Batch front-end for `jsray-core`.
//!
//! Every command prints `key = value ; cite = KEY` lines (or an aligned
//! table with `--format text`). Validation failures print a single
//! `error = Kind ; message = ...` line and exit with status 1; internal
//! invariant violations exit with status 2.

use std::fmt::Write as _;
use std::io::Read;
use std::panic::{self, AssertUnwindSafe};

use clap::{Args, Parser, Subcommand, ValueEnum};
use jsray_core::asymptotics::{
    CITE_CHARTS, CITE_DETOUR, CITE_ENDPOINT, CITE_EXTREMAL_LIMIT, CITE_FLOW, CITE_LENGTH_AREA, CITE_MAIN, CITE_MODULAR,
    CITE_OPTIMAL_SHIFT, CITE_SUP_RATIO, CITE_UPPER_ESTIMATE,
};
use jsray_core::conformal::{check_diagram_commutativity, rect_to_round, RoundAnnulus};
use jsray_core::extremal::{
    e_functional_squared, length_area_bound, proportional_to_circumferences, sup_ratio, sup_ratio_oracle, EFunctional,
};
use jsray_core::qcmap::{dilatation_trajectory, scan_q_map, twist_is_legitimate, QcMapConfig};
use jsray_core::ray::PuncturedDisk;
use jsray_core::scalar::{format_rational, parse_rational, Scalar};
use jsray_core::surface_text::{parse_surface_spec, SurfaceSpec};
use jsray_core::*;
use num_complex::Complex64;
use num_rational::BigRational;

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned human-readable table.
    Text,
    /// One `key = value ; cite = KEY` line per result.
    Lines,
}

#[derive(Debug, Parser)]
#[command(name = "jsray", version, about = "Jenkins-Strebel rays: limit distances, detour metric, endpoints and dilatation estimates")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "lines", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// Two moduli vectors, inline or from surface-spec files (`-` is stdin).
#[derive(Debug, Args)]
pub struct PairArgs {
    /// First moduli vector, e.g. `1,2` or `1/2,3`.
    #[arg(long)]
    pub m: Option<String>,
    /// Second moduli vector.
    #[arg(long)]
    pub mp: Option<String>,
    /// Surface-spec files giving the two surfaces.
    pub files: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limit of the distance between two rays with equal endpoints.
    LimitDistance(PairArgs),
    /// Detour metric between the Busemann points of two rays.
    Detour(PairArgs),
    /// Time shift minimizing the limit distance.
    OptimalShift(PairArgs),
    /// Bounded / divergent / asymptotic verdict for a pair of rays.
    Classify {
        #[command(flatten)]
        pair: PairArgs,
        /// Foliation relation: top-equiv-abs-cont, top-equiv-not-abs-cont,
        /// not-top-equiv-zero or not-top-equiv-positive.
        #[arg(long)]
        relation: Option<String>,
        /// Whether the first foliation is Jenkins-Strebel.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        js1: bool,
        /// Whether the second foliation is Jenkins-Strebel.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        js2: bool,
        #[arg(long)]
        uniquely_ergodic: bool,
        /// Whether the critical graphs contain closed loops.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        closed_loops: bool,
        /// Modular equivalence; computed from the moduli when they are given.
        #[arg(long, action = clap::ArgAction::Set)]
        modular: Option<bool>,
        /// Endpoints agree; computed from the surfaces when files are given.
        #[arg(long)]
        endpoints_equal: bool,
    },
    /// Surface after flowing for time `t`.
    Flow {
        file: String,
        #[arg(long)]
        t: f64,
    },
    /// Canonical endpoint descriptor of the ray from a surface.
    Endpoint { file: String },
    /// Whether the rays from two surfaces have the same endpoint.
    EndpointsEqual {
        first: String,
        second: String,
        /// Flow time applied to the first surface before comparing.
        #[arg(long, default_value_t = 0.0)]
        t1: f64,
        /// Flow time applied to the second surface before comparing.
        #[arg(long, default_value_t = 0.0)]
        t2: f64,
    },
    /// Limit functional `sqrt(sum m_j i_j^2)`.
    EFunctional {
        #[arg(long)]
        m: Option<String>,
        /// Core intersection numbers `i_j`.
        #[arg(long)]
        i: Option<String>,
        /// Surface-spec file; use with `--curve`.
        file: Option<String>,
        /// Named curve from the file.
        #[arg(long)]
        curve: Option<String>,
    },
    /// Closed-form supremum of extremal-length ratios, optionally checked by sampling.
    SupRatio {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Flat length-area lower bound against the limit functional.
    LengthArea {
        file: String,
        /// Core intersection numbers `i_j`.
        #[arg(long)]
        i: String,
    },
    /// Dilatation of the explicit maps along a time grid.
    QcTrajectory {
        /// Modulus ratio `m'/m`.
        #[arg(long = "M")]
        ratio: f64,
        /// Source modulus.
        #[arg(long = "m")]
        modulus: f64,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c_im: f64,
        /// Tail coefficients from degree 2 up; `x` or `re:im`.
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        /// Constant bounding a tail that is not given explicitly.
        #[arg(long)]
        psi_bound: Option<f64>,
        /// Use the upper punctured disk (changes the branch of arg c).
        #[arg(long)]
        upper: bool,
        /// Override the exponent choice.
        #[arg(long, allow_hyphen_values = true)]
        exponent: Option<f64>,
        /// Cross-check the bound on an n x n grid.
        #[arg(long)]
        scan: Option<usize>,
        /// `start:stop:step`.
        #[arg(long)]
        t_grid: String,
    },
    /// Commutativity defect of the chart/flow square on a grid.
    DiagramCheck {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub internal: bool,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.into(), message: message.into(), internal: false }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError { kind: "InternalError".into(), message: message.into(), internal: true }
    }

    /// Splits a `Kind: message` display string.
    fn from_display(e: impl std::fmt::Display) -> Self {
        let text = e.to_string();
        let kind: String = text.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
        let rest = text[kind.len()..].trim_start_matches(|c: char| c == ':' || c == ' ');
        if kind.is_empty() {
            Self::new("Error", text)
        } else {
            Self::new(&kind, rest)
        }
    }
}

macro_rules! from_core_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::from_display(e)
            }
        }
    )*};
}

from_core_errors!(
    jsray_core::asymptotics::AsymptoticsError,
    jsray_core::asymptotics::ClassifyError,
    jsray_core::extremal::ExtremalError,
    jsray_core::qcmap::QcError,
    jsray_core::ray::RayError,
    jsray_core::surface::FoliationError,
    jsray_core::surface_text::SpecError
);

/// `%.17g` with trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..17).contains(&exp) {
        trim(&format!("{x:.*}", (16 - exp) as usize))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

enum Item {
    Value { key: String, value: String, cite: &'static str },
    Raw(String),
}

#[derive(Default)]
struct Report {
    items: Vec<Item>,
}

impl Report {
    fn value(&mut self, key: impl Into<String>, value: impl Into<String>, cite: &'static str) {
        self.items.push(Item::Value { key: key.into(), value: value.into(), cite });
    }

    fn float(&mut self, key: impl Into<String>, value: f64, cite: &'static str) {
        self.value(key, format_float(value), cite);
    }

    fn raw(&mut self, line: impl Into<String>) {
        self.items.push(Item::Raw(line.into()));
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        let width = self
            .items
            .iter()
            .filter_map(|i| match i {
                Item::Value { key, .. } => Some(key.len()),
                Item::Raw(_) => None,
            })
            .max()
            .unwrap_or(0);
        for item in &self.items {
            match (item, format) {
                (Item::Value { key, value, cite }, Format::Lines) => writeln!(out, "{key} = {value} ; cite = {cite}").unwrap(),
                (Item::Value { key, value, cite }, Format::Text) => writeln!(out, "{key:<width$}  {value}  [{cite}]").unwrap(),
                (Item::Raw(line), _) => writeln!(out, "{line}").unwrap(),
            }
        }
        out
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Context<'_> {
    fn read_spec(&mut self, path: &str) -> Result<SurfaceSpec, CliError> {
        let text = if path == "-" {
            if self.stdin_used {
                return Err(CliError::new("UsageError", "standard input can be read only once"));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| CliError::new("IoError", e.to_string()))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| CliError::new("IoError", format!("{path}: {e}")))?
        };
        Ok(parse_surface_spec(&text)?)
    }
}

fn parse_vector(flag: &str, text: &str) -> Result<Vec<Q>, CliError> {
    text.split(',')
        .map(|s| parse_rational(s).ok_or_else(|| CliError::new("ParseError", format!("--{flag}: invalid real {s:?}"))))
        .collect()
}

fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::new("ParseError", format!("invalid coefficient {text:?}"));
    let (re, im) = text.split_once(':').unwrap_or((text, "0"));
    Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| CliError::new("ParseError", format!("--t-grid {text:?}: {m}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad("expected start:stop:step")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad("expected start:stop:step"));
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(bad("need step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(bad("too many grid points"));
    }
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

impl PairArgs {
    /// Raw vectors, which may contain zeros.
    fn vectors(&self, ctx: &mut Context) -> Result<(Vec<Q>, Vec<Q>), CliError> {
        match (&self.m, &self.mp, self.files.as_slice()) {
            (Some(m), Some(mp), []) => Ok((parse_vector("m", m)?, parse_vector("mp", mp)?)),
            (None, None, [a, b]) => Ok((ctx.read_spec(a)?.surface.moduli_vector(), ctx.read_spec(b)?.surface.moduli_vector())),
            _ => Err(CliError::new("UsageError", "give either --m and --mp or two surface-spec files")),
        }
    }

    fn moduli(&self, ctx: &mut Context) -> Result<(ModuliVector<Q>, ModuliVector<Q>), CliError> {
        let (m, mp) = self.vectors(ctx)?;
        Ok((ModuliVector::new(m)?, ModuliVector::new(mp)?))
    }

    fn is_empty(&self) -> bool {
        self.m.is_none() && self.mp.is_none() && self.files.is_empty()
    }
}

fn execute(command: &Command, ctx: &mut Context) -> Result<Report, CliError> {
    let mut r = Report::default();
    match command {
        Command::LimitDistance(pair) => {
            let (m, mp) = pair.moduli(ctx)?;
            r.float("limit", limit_distance(&m, &mp)?, CITE_MAIN);
        }
        Command::Detour(pair) => {
            let (m, mp) = pair.vectors(ctx)?;
            r.float("detour", detour_metric(&m, &mp)?, CITE_DETOUR);
        }
        Command::OptimalShift(pair) => {
            let (m, mp) = pair.moduli(ctx)?;
            let opt = optimal_shift(&m, &mp)?;
            r.float("beta", opt.beta, CITE_OPTIMAL_SHIFT);
            r.float("min_value", opt.min_value, CITE_OPTIMAL_SHIFT);
        }
        Command::Classify { pair, relation, js1, js2, uniquely_ergodic, closed_loops, modular, endpoints_equal } => {
            classify_command(&mut r, ctx, pair, relation.as_deref(), (*js1, *js2), *uniquely_ergodic, *closed_loops, *modular, *endpoints_equal)?;
        }
        Command::Flow { file, t } => {
            let spec = ctx.read_spec(file)?;
            let flowed = flow(&spec.surface, *t)?;
            for c in flowed.cylinders() {
                r.float(format!("{}.circumference", c.label), c.circumference, CITE_FLOW);
                r.float(format!("{}.height", c.label), c.height, CITE_FLOW);
                r.float(format!("{}.modulus", c.label), c.modulus(), CITE_FLOW);
            }
            r.float("area", flowed.area(), CITE_FLOW);
        }
        Command::Endpoint { file } => {
            let spec = ctx.read_spec(file)?;
            let d = endpoint_descriptor(&spec.surface);
            r.value("nodes", d.nodes().len().to_string(), CITE_ENDPOINT);
            r.value("arcs", d.arcs().len().to_string(), CITE_ENDPOINT);
            for line in d.canonical_text().lines() {
                r.raw(line);
            }
        }
        Command::EndpointsEqual { first, second, t1, t2 } => {
            let (a, b) = (ctx.read_spec(first)?, ctx.read_spec(second)?);
            let da = endpoint_descriptor(&flow(&a.surface, *t1)?);
            let db = endpoint_descriptor(&flow(&b.surface, *t2)?);
            r.value("endpoints_equal", endpoints_equal(&da, &db).to_string(), CITE_ENDPOINT);
        }
        Command::EFunctional { m, i, file, curve } => {
            let squared = match (m, i, file, curve) {
                (Some(m), Some(i), None, None) => {
                    let m = ModuliVector::new(parse_vector("m", m)?)?;
                    e_functional_squared(&m, &parse_vector("i", i)?)?
                }
                (None, None, Some(file), Some(name)) => {
                    let spec = ctx.read_spec(file)?;
                    let mu = spec.curve(name).ok_or_else(|| CliError::new("UnknownCurve", format!("no curve named {name}")))?;
                    let e = EFunctional::new(ModuliVector::new(spec.surface.moduli_vector())?, spec.family.clone())?;
                    e.squared(mu)?
                }
                _ => return Err(CliError::new("UsageError", "give --m and --i, or a surface-spec file with --curve")),
            };
            r.float("e", squared.to_f64().sqrt(), CITE_EXTREMAL_LIMIT);
            r.value("e_squared", format_rational(&squared), CITE_EXTREMAL_LIMIT);
        }
        Command::SupRatio { pair, oracle, samples, seed } => {
            let (m, mp) = pair.vectors(ctx)?;
            let closed = sup_ratio(&m, &mp)?;
            r.float("sup_ratio", closed.to_f64(), CITE_SUP_RATIO);
            if *oracle {
                let m = ModuliVector::new(m)?;
                let estimate = sup_ratio_oracle(&m, &mp, *samples, *seed)?;
                r.float("oracle", estimate, CITE_SUP_RATIO);
                r.float("oracle_gap", (closed.to_f64() - estimate).abs(), CITE_SUP_RATIO);
            }
        }
        Command::LengthArea { file, i } => {
            let spec = ctx.read_spec(file)?;
            let i = parse_vector("i", i)?;
            let data = length_area_bound(&spec.surface, &i)?;
            r.float("bound", data.bound.to_f64(), CITE_LENGTH_AREA);
            r.float("e_squared", data.e_squared.to_f64(), CITE_LENGTH_AREA);
            r.value("tight", data.is_tight().to_string(), CITE_LENGTH_AREA);
            r.value("proportional", proportional_to_circumferences(&spec.surface, &i).to_string(), CITE_LENGTH_AREA);
        }
        Command::QcTrajectory { ratio, modulus, eps, c_re, c_im, psi, psi_bound, upper, exponent, scan, t_grid } => {
            let mut cfg = QcMapConfig::new(*ratio, *modulus, *eps, Complex64::new(*c_re, *c_im))?;
            if let Some(x) = exponent {
                cfg = cfg.with_exponent(*x)?;
            }
            if *upper {
                cfg = cfg.with_disk(PuncturedDisk::Upper);
            }
            if let Some(p) = psi {
                cfg = cfg.with_tail(p.split(',').map(parse_complex).collect::<Result<_, _>>()?);
            }
            if let Some(c) = psi_bound {
                if !(*c >= 0.0) {
                    return Err(CliError::new("DomainError", "--psi-bound must be nonnegative"));
                }
                cfg = cfg.with_psi_bound(*c);
            }
            let grid = parse_grid(t_grid)?;
            let report = dilatation_trajectory(&cfg, &grid)?;
            r.value("regime", format!("{:?}", cfg.choice.regime), CITE_UPPER_ESTIMATE);
            r.value("exponent", cfg.choice.exponent.map_or("none".into(), format_float), CITE_UPPER_ESTIMATE);
            r.float("power", cfg.choice.power, CITE_UPPER_ESTIMATE);
            r.float("limit_target", report.limit_target, CITE_UPPER_ESTIMATE);
            r.value("target_within_slack", report.target_within_slack.to_string(), CITE_UPPER_ESTIMATE);
            r.value(
                "validity_threshold",
                report.validity_threshold.map_or("none".into(), format_float),
                CITE_UPPER_ESTIMATE,
            );
            r.value("twist_legitimate", twist_is_legitimate(&cfg, &cfg).to_string(), CITE_UPPER_ESTIMATE);
            r.raw("# t k_p k_q_bound k_total target valid");
            for row in &report.rows {
                r.raw(format!(
                    "{} {} {} {} {} {}",
                    format_float(row.t),
                    format_float(row.k_p),
                    format_float(row.k_q_bound),
                    format_float(row.k_total),
                    format_float(report.limit_target),
                    row.valid
                ));
            }
            if let Some(n) = scan {
                let last = *grid.last().expect("nonempty grid");
                let s = scan_q_map(&cfg, last, *n);
                r.float("scan_max_dilatation", s.max_dilatation, CITE_UPPER_ESTIMATE);
                r.float("scan_min_jacobian", s.min_jacobian, CITE_UPPER_ESTIMATE);
            }
        }
        Command::DiagramCheck { a, b, t, grid } => {
            if !(*a > 0.0 && *b > 0.0 && *t >= 0.0) || !a.is_finite() || !b.is_finite() || !t.is_finite() {
                return Err(CliError::new("DomainError", "need a > 0, b > 0 and t >= 0"));
            }
            let w = rect_to_round(Complex64::new(0.0, b / 2.0), *a);
            let annulus = RoundAnnulus::new(w.norm()).map_err(CliError::from_display)?;
            r.float("half_modulus", annulus.modulus(), CITE_CHARTS);
            r.float("half_modulus_error", (annulus.modulus() - b / (2.0 * a)).abs(), CITE_CHARTS);
            r.float("sup_error", check_diagram_commutativity(*a, *b, *t, *grid), CITE_CHARTS);
        }
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn classify_command(
    r: &mut Report,
    ctx: &mut Context,
    pair: &PairArgs,
    relation: Option<&str>,
    js: (bool, bool),
    uniquely_ergodic: bool,
    closed_loops: bool,
    modular: Option<bool>,
    endpoints_flag: bool,
) -> Result<(), CliError> {
    let parse_relation = |key: &str| {
        FoliationRelation::from_key(key).ok_or_else(|| CliError::new("ParseError", format!("unknown relation {key:?}")))
    };
    let mut relation = relation.map(parse_relation).transpose()?;
    let mut endpoints = endpoints_flag;
    let mut moduli = None;
    if let [a, b] = pair.files.as_slice() {
        let (sa, sb) = (ctx.read_spec(a)?, ctx.read_spec(b)?);
        if relation.is_none() {
            relation = Some(foliation_relation(&sa.horizontal_foliation(), &sb.horizontal_foliation())?);
        }
        endpoints = endpoints_equal(&endpoint_descriptor(&sa.surface), &endpoint_descriptor(&sb.surface));
        moduli = Some((ModuliVector::new(sa.surface.moduli_vector())?, ModuliVector::new(sb.surface.moduli_vector())?));
    } else if !pair.is_empty() {
        moduli = Some(pair.moduli(ctx)?);
    }
    let relation = relation.unwrap_or(FoliationRelation::TopEquivAbsCont);
    let equivalence = match &moduli {
        Some((m, mp)) if m.len() == mp.len() => modular_equivalence(m, mp)?,
        Some((m, mp)) => return Err(CliError::new("LengthMismatch", format!("{} vs {} entries", m.len(), mp.len()))),
        None => None,
    };
    let modularly_equivalent = modular.unwrap_or(equivalence.is_some());
    let descriptor = PairDescriptor {
        relation,
        jenkins_strebel: js,
        uniquely_ergodic,
        critical_graph_has_closed_loops: closed_loops,
        modularly_equivalent,
        endpoints_equal: endpoints,
    };
    let verdict = classify(&descriptor)?;
    if !verdict.is_consistent() {
        return Err(CliError::internal(format!("verdict {:?} contradicts its boundedness flag", verdict.outcome)));
    }
    r.value("verdict", verdict.outcome.as_str(), verdict.citation);
    r.value("bounded", verdict.bounded.to_string(), verdict.citation);
    r.value("relation", relation.key(), verdict.citation);
    if let Some(eq) = equivalence {
        r.value("lambda", format_rational(&eq.lambda), CITE_MODULAR);
        r.float("alpha", eq.alpha, CITE_MODULAR);
    }
    Ok(())
}

fn error_output(e: &CliError) -> Output {
    let message = e.message.replace('\n', " ");
    Output { stdout: format!("error = {} ; message = {}\n", e.kind, message), code: if e.internal { 2 } else { 1 } }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Output { stdout: e.to_string(), code: if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 1 } else { 0 } }
                }
                _ => {
                    let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
                    error_output(&CliError::new("UsageError", first))
                }
            };
        }
    };
    let mut ctx = Context { stdin, stdin_used: false };
    let result = panic::catch_unwind(AssertUnwindSafe(|| execute(&cli.command, &mut ctx)));
    match result {
        Ok(Ok(report)) => Output { stdout: report.render(cli.format), code: 0 },
        Ok(Err(e)) => error_output(&e),
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            error_output(&CliError::internal(message))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.5 * 2f64.ln()), "0.34657359027997264");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(123456.0), "123456");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn error_kinds_are_split() {
        let e = CliError::from_display("SemanticError(line 3): PairingError: bad");
        assert_eq!(e.kind, "SemanticError");
        assert_eq!(e.message, "(line 3): PairingError: bad");
        let e = CliError::from_display("LengthMismatch: 2 vs 3 entries");
        assert_eq!((e.kind.as_str(), e.message.as_str()), ("LengthMismatch", "2 vs 3 entries"));
    }

    #[test]
    fn internal_errors_exit_with_two() {
        let out = error_output(&CliError::internal("broken\ninvariant"));
        assert_eq!(out, Output { stdout: "error = InternalError ; message = broken invariant\n".into(), code: 2 });
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("2:8:1").unwrap(), vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(parse_grid("0:1:0.25").unwrap().len(), 5);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}
