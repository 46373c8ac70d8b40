//! Command logic behind the `photon-mode` binary. Every command returns the
//! text destined for stdout; the binary only parses arguments and maps
//! errors to exit codes.

mod config;

pub use config::{Config, KNOWN_KEYS};

use std::fmt::Write as _;

use crate::analytic::{m_temp, mu_a_max, p_temp, p_temp_fwhm};
use crate::corr::{fmt_sig6, purity};
use crate::error::Error;
use crate::experiment::{run_chain_with_overrides, LabParams, TauConvention, CSV_HEADER};
use crate::grid::{auto_span, make_grid, Grid1D, Grid2D, Rule};
use crate::kernels::{
    build_advanced_wave_spatial, build_cpp_temporal_analytic, build_cpp_temporal_numeric, build_dfg_temporal,
    build_signal_spatial, SpatialScenario, TemporalScenario, DEFAULT_SPATIAL_N, DEFAULT_TEMPORAL_N,
};
use crate::matcher::{alignment_search_grid, evaluate_match, optimize_alignment, spatial_purity_report, SEARCH_GRID_N};
use crate::units::{FieldSpec, FilterSpec, MuRatios};

/// Spatial grid size of `dump` when none is configured; a full 48 x 48
/// kernel is over five million entries.
pub const DUMP_SPATIAL_N: usize = 16;

pub const SWEEP_HEADER: &str = "mu_t,sqrt_p_temp,m_opt,m_plane";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad or missing configuration; exit code 2.
    Config(String),
    /// A computation failed; exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            // parameter values come from the config
            Error::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Options {
    pub csv: bool,
    pub grid_n: Option<usize>,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Purity,
    Match,
    Sweep { axis: String, from: f64, to: f64, steps: usize },
    Report,
    Dump,
}

/// Runs `cmd`, single-threaded unless `opts.parallel` is set.
pub fn execute(cmd: &Command, cfg: &Config, opts: &Options) -> Result<String, CliError> {
    #[cfg(feature = "parallel")]
    if !opts.parallel {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| CliError::Numeric(format!("cannot build thread pool: {e}")))?;
        return pool.install(|| dispatch(cmd, cfg, opts));
    }
    dispatch(cmd, cfg, opts)
}

fn dispatch(cmd: &Command, cfg: &Config, opts: &Options) -> Result<String, CliError> {
    match cmd {
        Command::Purity => cmd_purity(cfg, opts),
        Command::Match => cmd_match(cfg, opts),
        Command::Sweep { axis, from, to, steps } => cmd_sweep(cfg, opts, axis, *from, *to, *steps),
        Command::Report => cmd_report(cfg, opts),
        Command::Dump => cmd_dump(cfg, opts),
    }
}

struct Table {
    csv: bool,
    out: String,
}

impl Table {
    fn new(csv: bool) -> Self {
        let out = if csv { "quantity,value\n".to_string() } else { String::new() };
        Table { csv, out }
    }

    fn row(&mut self, key: &str, v: f64) {
        let v = fmt_sig6(v);
        let _ = if self.csv { writeln!(self.out, "{key},{v}") } else { writeln!(self.out, "{key:<24}{v}") };
    }
}

const LAB_TEMPORAL_KEYS: &[&str] = &["pump.tau_fund_ps", "filter.fwhm_nm", "pump.lambda_nm"];
const LAB_SPATIAL_KEYS: &[&str] =
    &["filter.pinhole_diameter_um", "filter.focal_mm", "pump.beam_fwhm_mm", "pump.lambda_nm"];

fn has_all(cfg: &Config, keys: &[&str]) -> bool {
    keys.iter().all(|k| cfg.contains(k))
}

fn require_all(cfg: &Config, keys: &[&str]) -> Result<(), CliError> {
    match keys.iter().find(|k| !cfg.contains(k)) {
        Some(k) => Err(CliError::Config(format!("missing required key `{k}`"))),
        None => Ok(()),
    }
}

/// Lab parameters; keys that are absent keep their defaults, so callers
/// check the keys they depend on first.
fn lab_params(cfg: &Config) -> Result<LabParams, CliError> {
    let mut p = LabParams::default();
    let fields: [(&str, &mut f64); 7] = [
        ("pump.lambda_nm", &mut p.lambda_nm),
        ("pump.tau_fund_ps", &mut p.tau_fund_ps),
        ("filter.fwhm_nm", &mut p.filter_fwhm_nm),
        ("filter.pinhole_diameter_um", &mut p.pinhole_diameter_um),
        ("filter.focal_mm", &mut p.focal_mm),
        ("pump.beam_fwhm_mm", &mut p.pump_fwhm_mm),
        ("chain.visibility", &mut p.visibility),
    ];
    for (key, slot) in fields {
        if let Some(v) = cfg.get::<f64>(key)? {
            *slot = v;
        }
    }
    if let Some(s) = cfg.get_str("chain.tau_convention") {
        p.tau_convention = s.parse::<TauConvention>()?;
    }
    p.validate()?;
    Ok(p)
}

fn temporal_scenario(cfg: &Config) -> Result<Option<TemporalScenario>, CliError> {
    let mu_a = cfg.get::<f64>("align.mu_A")?;
    if let Some(mu_t) = cfg.get::<f64>("trigger.mu_t")? {
        let mu = MuRatios::new(mu_t, mu_a.unwrap_or(0.0))?;
        return Ok(Some(TemporalScenario::from_ratios(1.0, mu)?));
    }
    if has_all(cfg, LAB_TEMPORAL_KEYS) {
        let s = lab_params(cfg)?.temporal_scenario()?;
        return match mu_a {
            Some(mu_a) => {
                let a = FieldSpec::new(s.filter.center_omega, mu_a * s.pump.sigma_omega, 0.0)?;
                Ok(Some(s.with_alignment(a)?))
            }
            None => Ok(Some(s)),
        };
    }
    Ok(None)
}

fn spatial_scenario(cfg: &Config) -> Result<Option<SpatialScenario>, CliError> {
    if let Some(ratio) = cfg.get::<f64>("trigger.kappa_ratio")? {
        let pump = FieldSpec::new(1.0, 0.0, 1.0)?;
        return Ok(Some(SpatialScenario::new(pump, FilterSpec::gaussian_spatial(ratio)?)?));
    }
    if has_all(cfg, LAB_SPATIAL_KEYS) {
        return Ok(Some(lab_params(cfg)?.spatial_scenario()?));
    }
    Ok(None)
}

fn grid_n(cfg: &Config, opts: &Options, default: usize) -> Result<usize, CliError> {
    match opts.grid_n {
        Some(n) => Ok(n),
        None => Ok(cfg.get::<usize>("grid.n")?.unwrap_or(default)),
    }
}

fn grid_rule(cfg: &Config, default: Rule) -> Result<Rule, CliError> {
    match cfg.get_str("grid.rule") {
        Some(s) => Ok(s.parse()?),
        None => Ok(default),
    }
}

fn temporal_grid(s: &TemporalScenario, cfg: &Config, opts: &Options) -> Result<Grid1D, CliError> {
    let n = grid_n(cfg, opts, DEFAULT_TEMPORAL_N)?;
    let widths = [s.pump.sigma_omega, s.sigma_t(), s.alignment.map_or(0.0, |a| a.sigma_omega)];
    Ok(make_grid(s.signal_center(), auto_span(&widths)?, n, grid_rule(cfg, Rule::GaussLegendre)?)?)
}

fn spatial_grid(s: &SpatialScenario, cfg: &Config, opts: &Options, default_n: usize) -> Result<Grid2D, CliError> {
    let n = grid_n(cfg, opts, default_n)?;
    let half = s.default_grid(n)?.x.half_span();
    Ok(Grid2D::square(half, n, grid_rule(cfg, Rule::Trapezoid)?)?)
}

pub fn cmd_purity(cfg: &Config, opts: &Options) -> Result<String, CliError> {
    let temporal = temporal_scenario(cfg)?;
    let spatial = spatial_scenario(cfg)?;
    if temporal.is_none() && spatial.is_none() {
        return Err(CliError::Config(format!(
            "purity needs `trigger.mu_t`, `trigger.kappa_ratio`, or lab keys ({} / {})",
            LAB_TEMPORAL_KEYS.join(", "),
            LAB_SPATIAL_KEYS.join(", ")
        )));
    }
    let mut t = Table::new(opts.csv);
    if let Some(s) = temporal {
        let grid = temporal_grid(&s, cfg, opts)?;
        let mu_t = s.mu().mu_t;
        let analytic = p_temp(mu_t)?;
        let numeric = purity(&build_cpp_temporal_numeric(&s, &grid)?)?;
        t.row("mu_t", mu_t);
        t.row("p_temp_analytic", analytic);
        t.row("p_temp_numeric", numeric);
        t.row("p_temp_abs_diff", (analytic - numeric).abs());
        if !cfg.contains("trigger.mu_t") {
            let p = lab_params(cfg)?;
            t.row("p_temp_fwhm_approx", p_temp_fwhm(p.w_t()?, p.tau_p())?);
        }
    }
    if let Some(s) = spatial {
        let grid = spatial_grid(&s, cfg, opts, DEFAULT_SPATIAL_N)?;
        let r = spatial_purity_report(&s, &grid)?;
        t.row("p_sp_numeric", r.numeric);
        t.row("p_sp_gaussian_formula", r.gaussian_formula);
        let reference = match r.pinhole_formula {
            Some(p) => {
                t.row("p_sp_pinhole_formula", p);
                p
            }
            None => r.gaussian_formula,
        };
        t.row("p_sp_abs_diff", (r.numeric - reference).abs());
    }
    Ok(t.out)
}

pub fn cmd_match(cfg: &Config, opts: &Options) -> Result<String, CliError> {
    let optimize = cfg.flag("align.optimize")?;
    let s = temporal_scenario(cfg)?.ok_or_else(|| CliError::Config("missing required key `trigger.mu_t`".into()))?;
    if !optimize && !cfg.contains("align.mu_A") && cfg.contains("trigger.mu_t") {
        return Err(CliError::Config("missing required key `align.mu_A` (or set `align.optimize = true`)".into()));
    }
    let mu_t = s.mu().mu_t;
    let mut t = Table::new(opts.csv);
    t.row("mu_t", mu_t);
    let (s, grid) = if optimize {
        let n = grid_n(cfg, opts, SEARCH_GRID_N)?;
        let grid = alignment_search_grid(&s, n)?;
        let (mu_opt, m_opt) = optimize_alignment(&s, &grid)?;
        t.row("mu_A_opt", mu_opt);
        t.row("mu_A_max", mu_a_max(mu_t)?);
        t.row("match_opt", m_opt);
        let center = s.alignment.map_or(s.filter.center_omega, |a| a.center_omega);
        let s = s.with_alignment(FieldSpec::new(center, mu_opt * s.pump.sigma_omega, 0.0)?)?;
        (s, grid)
    } else {
        let grid = temporal_grid(&s, cfg, opts)?;
        (s, grid)
    };
    let r = evaluate_match(&s, &grid)?;
    t.row("mu_A_used", r.mu_a_used);
    t.row("purity_cpp", r.purity_cpp);
    t.row("purity_classical", r.purity_classical);
    t.row("match", r.mode_match);
    t.row("match_analytic", m_temp(mu_t, r.mu_a_used)?);
    t.row("bound", r.bound);
    Ok(t.out)
}

fn sweep_row(mu: f64) -> Result<String, CliError> {
    let cells = [mu, p_temp(mu)?.sqrt(), m_temp(mu, mu_a_max(mu)?)?, m_temp(mu, 0.0)?];
    Ok(cells.iter().map(|&v| fmt_sig6(v)).collect::<Vec<_>>().join(","))
}

pub fn cmd_sweep(
    _cfg: &Config,
    opts: &Options,
    axis: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, CliError> {
    if axis != "mu_t" && axis != "trigger.mu_t" {
        return Err(CliError::Config(format!("axis `{axis}` is not sweepable; use `mu_t`")));
    }
    if steps < 2 {
        return Err(CliError::Config(format!("sweep needs at least 2 steps, got {steps}")));
    }
    if !(from.is_finite() && to.is_finite() && from >= 0.0 && to >= 0.0) {
        return Err(CliError::Config(format!("sweep range [{from}, {to}] must be finite and non-negative")));
    }
    let values: Vec<f64> = (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect();
    let rows: Vec<Result<String, CliError>> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if opts.parallel {
                values.par_iter().map(|&v| sweep_row(v)).collect()
            } else {
                values.iter().map(|&v| sweep_row(v)).collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = opts;
            values.iter().map(|&v| sweep_row(v)).collect()
        }
    };
    let mut out = format!("{SWEEP_HEADER}\n");
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_report(cfg: &Config, opts: &Options) -> Result<String, CliError> {
    let p_temp_override = cfg.get::<f64>("chain.p_temp_override")?;
    let p_sp_override = cfg.get::<f64>("chain.p_sp_override")?;
    let mut required = vec!["chain.visibility", "pump.lambda_nm"];
    if p_temp_override.is_none() {
        required.extend(["pump.tau_fund_ps", "filter.fwhm_nm"]);
    }
    if p_sp_override.is_none() {
        required.extend(["filter.pinhole_diameter_um", "filter.focal_mm", "pump.beam_fwhm_mm"]);
    }
    require_all(cfg, &required)?;
    let p = lab_params(cfg)?;
    let r = run_chain_with_overrides(&p, p_temp_override, p_sp_override)?;
    if opts.csv {
        return Ok(format!("{CSV_HEADER}\n{}\n", r.csv_row()));
    }
    let mut out = format!("tau_convention  {}\n", p.tau_convention.name());
    out.push_str(&r.to_text());
    let _ = write!(out, "\n{CSV_HEADER}\n{}\n", r.csv_row());
    Ok(out)
}

pub fn cmd_dump(cfg: &Config, opts: &Options) -> Result<String, CliError> {
    let which = cfg.get_str("dump.kernel").unwrap_or("cpp");
    let temporal = || -> Result<(TemporalScenario, Grid1D), CliError> {
        let s =
            temporal_scenario(cfg)?.ok_or_else(|| CliError::Config("missing required key `trigger.mu_t`".into()))?;
        let grid = temporal_grid(&s, cfg, opts)?;
        Ok((s, grid))
    };
    let spatial = || -> Result<(SpatialScenario, Grid2D), CliError> {
        let s = spatial_scenario(cfg)?
            .ok_or_else(|| CliError::Config("missing required key `trigger.kappa_ratio`".into()))?;
        let grid = spatial_grid(&s, cfg, opts, DUMP_SPATIAL_N)?;
        Ok((s, grid))
    };
    let m = match which {
        "cpp" => {
            let (s, g) = temporal()?;
            build_cpp_temporal_numeric(&s, &g)?
        }
        "cpp_analytic" => {
            let (s, g) = temporal()?;
            build_cpp_temporal_analytic(&s, &g)?
        }
        "dfg" => {
            let (s, g) = temporal()?;
            build_dfg_temporal(&s, &g)?
        }
        "signal_spatial" => {
            let (s, g) = spatial()?;
            build_signal_spatial(&s, &g)?
        }
        "advanced_wave" => {
            let (s, g) = spatial()?;
            build_advanced_wave_spatial(&s.filter, &g)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown dump.kernel `{other}` (cpp, cpp_analytic, dfg, signal_spatial, advanced_wave)"
            )))
        }
    };
    Ok(m.to_csv())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(cmd: Command, text: &str) -> Result<String, CliError> {
        execute(&cmd, &Config::parse(text).unwrap(), &Options::default())
    }

    fn value(out: &str, key: &str) -> f64 {
        out.lines()
            .find_map(|l| {
                let mut it = l.split_whitespace();
                (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
            })
            .unwrap_or_else(|| panic!("no row {key} in\n{out}"))
    }

    #[test]
    fn purity_temporal() {
        let out = run(Command::Purity, "trigger.mu_t = 0.5\n").unwrap();
        assert!(out.contains("p_temp_analytic         0.816497\n"), "{out}");
        assert!((value(&out, "p_temp_numeric") - 0.816497).abs() < 1e-5);
        assert!(value(&out, "p_temp_abs_diff") < 1e-5);
    }

    #[test]
    fn purity_lab_spatial() {
        let out = run(
            Command::Purity,
            "pump.lambda_nm = 790\nfilter.pinhole_diameter_um = 50\nfilter.focal_mm = 80\npump.beam_fwhm_mm = 0.34\n",
        )
        .unwrap();
        let numeric = value(&out, "p_sp_numeric");
        let formula = value(&out, "p_sp_pinhole_formula");
        assert!((0.86..=0.90).contains(&numeric), "{out}");
        assert!((formula - 0.87).abs() < 0.01);
    }

    #[test]
    fn purity_needs_something() {
        let err = run(Command::Purity, "").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("trigger.mu_t"));
    }

    #[test]
    fn match_trivial_and_bounded() {
        let out = run(Command::Match, "trigger.mu_t = 0\nalign.mu_A = 0\n").unwrap();
        assert!(out.contains("match                   1\n"), "{out}");
        let out = run(Command::Match, "trigger.mu_t = 0.8\nalign.mu_A = 1.3\n").unwrap();
        assert!(value(&out, "match") <= value(&out, "bound"));
        assert_eq!(run(Command::Match, "trigger.mu_t = 0.8\n").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn match_optimize() {
        let out = run(Command::Match, "trigger.mu_t = 0.3\nalign.optimize = true\n").unwrap();
        assert!((value(&out, "mu_A_opt") - mu_a_max(0.3).unwrap()).abs() < 1e-3, "{out}");
        assert!(value(&out, "match") <= value(&out, "bound"));
    }

    #[test]
    fn sweep_table() {
        let cmd = Command::Sweep { axis: "mu_t".into(), from: 0.0, to: 2.0, steps: 9 };
        let out = run(cmd, "").unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines[1], "0,1,1,1");
        assert_eq!(lines.len(), 10);
        for l in &lines[1..] {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(v[3] <= v[2] && v[2] <= v[1] + 1e-9, "{l}");
        }
        let row = lines.iter().find(|l| l.starts_with("0.5,")).unwrap();
        let v: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(v[1] - v[2] <= 0.005);
    }

    #[test]
    fn sweep_rejects_bad_args() {
        let bad = |axis: &str, steps| {
            run(Command::Sweep { axis: axis.into(), from: 0.0, to: 1.0, steps }, "").unwrap_err().exit_code()
        };
        assert_eq!(bad("grid.n", 5), 2);
        assert_eq!(bad("mu_t", 1), 2);
    }

    #[test]
    fn sweep_parallel_matches_serial() {
        let cmd = Command::Sweep { axis: "mu_t".into(), from: 0.0, to: 3.0, steps: 31 };
        let cfg = Config::default();
        let serial = execute(&cmd, &cfg, &Options::default()).unwrap();
        let par = execute(&cmd, &cfg, &Options { parallel: true, ..Options::default() }).unwrap();
        assert_eq!(serial, par);
    }

    const LAB: &str = "pump.lambda_nm = 790\npump.tau_fund_ps = 1.6\nfilter.fwhm_nm = 0.4\n\
        filter.pinhole_diameter_um = 50\nfilter.focal_mm = 80\npump.beam_fwhm_mm = 0.34\nchain.visibility = 0.83\n";

    #[test]
    fn report_with_overrides() {
        let text = format!("{LAB}chain.p_temp_override = 0.85\nchain.p_sp_override = 0.87\n");
        let out = run(Command::Report, &text).unwrap();
        assert!((value(&out, "m_total") - 0.65).abs() < 0.01, "{out}");
        let csv =
            execute(&Command::Report, &Config::parse(&text).unwrap(), &Options { csv: true, ..Options::default() })
                .unwrap();
        assert_eq!(csv, format!("{CSV_HEADER}\n0.85,0.87,0.859942,0.6889,1.08866,0.749979,0.644939\n"));
    }

    #[test]
    fn report_rejects_bad_visibility() {
        let text = LAB.replace("0.83", "1.3");
        assert_eq!(run(Command::Report, &text).unwrap_err().exit_code(), 2);
        let err = run(Command::Report, "pump.lambda_nm = 790\n").unwrap_err();
        assert!(err.to_string().contains("chain.visibility"));
    }

    #[test]
    fn out_of_regime_is_numeric_error() {
        let text = LAB.replace("pinhole_diameter_um = 50", "pinhole_diameter_um = 2000");
        assert_eq!(run(Command::Report, &text).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn dump_kernels() {
        let out = run(Command::Dump, "trigger.mu_t = 0.5\ngrid.n = 12\n").unwrap();
        assert_eq!(out.lines().count(), 13);
        let out = run(Command::Dump, "trigger.kappa_ratio = 0.5\ndump.kernel = signal_spatial\ngrid.n = 8\n").unwrap();
        assert_eq!(out.lines().count(), 65);
        assert!(run(Command::Dump, "trigger.mu_t = 0.5\ndump.kernel = nope\n").is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let a = run(Command::Purity, "trigger.mu_t = 0.7\ntrigger.kappa_ratio = 0.3\n").unwrap();
        let b = run(Command::Purity, "trigger.mu_t = 0.7\ntrigger.kappa_ratio = 0.3\n").unwrap();
        assert_eq!(a, b);
    }
}
