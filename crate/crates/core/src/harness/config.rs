use std::fmt::Write as _;
use std::path::PathBuf;

use super::expr::Expr;
use crate::error::ConfigIssue;
use crate::mesh::{FluxClosure, Grid};
use crate::{Error, Result};

/// Largest CFL number the kinetic schemes are expected to tolerate; larger
/// values are accepted with a warning.
pub const LAMBDA_MAX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Transport,
    Rht,
    DiffusionTransport,
    DiffusionRht,
    Collocation,
}

/// Kinetic model behind a collocation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Transport,
    Rht,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Inflow,
    Periodic,
    Reflecting,
}

/// Everything needed to run one experiment. Field expressions are in `x` and
/// `z`; boundary data are expressions in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub model: Model,
    pub eps: f64,
    pub nx: usize,
    pub lambda: f64,
    pub degree: usize,
    pub nv: usize,
    pub zq: Option<usize>,
    pub tableau: String,
    pub boundary: BoundaryKind,
    pub closure: FluxClosure,
    pub sigma: Expr,
    pub inflow_left: Expr,
    pub inflow_right: Expr,
    pub theta_left: Expr,
    pub theta_right: Expr,
    pub initial: Expr,
    pub initial_radiation: Expr,
    pub well_prepared: bool,
    pub times: Vec<f64>,
    pub substeps: usize,
    pub collocation_nodes: usize,
    pub floor: f64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Transport,
            model: Model::Transport,
            eps: 1.0,
            nx: 100,
            lambda: 0.04,
            degree: 0,
            nv: 16,
            zq: None,
            tableau: "SSP2-332".into(),
            boundary: BoundaryKind::Inflow,
            closure: FluxClosure::Constant,
            sigma: Expr::constant(1.0),
            inflow_left: Expr::constant(1.0),
            inflow_right: Expr::constant(0.0),
            theta_left: Expr::constant(1.0),
            theta_right: Expr::constant(0.0),
            initial: Expr::constant(0.0),
            initial_radiation: Expr::constant(0.0),
            well_prepared: false,
            times: Vec::new(),
            substeps: 1,
            collocation_nodes: 16,
            floor: -0.1,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::from_cells(self.nx)
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    /// Time step of the kinetic schemes, `lambda dx`.
    pub fn dt(&self) -> f64 {
        self.lambda * self.dx()
    }

    /// Time step actually marched: the diffusion problems take `substeps`
    /// steps per kinetic step.
    pub fn march_dt(&self) -> f64 {
        match self.problem {
            Problem::DiffusionTransport | Problem::DiffusionRht => self.dt() / self.substeps as f64,
            _ => self.dt(),
        }
    }

    /// The kinetic model the problem is built on.
    pub fn kinetic_model(&self) -> Model {
        match self.problem {
            Problem::Transport | Problem::DiffusionTransport => Model::Transport,
            Problem::Rht | Problem::DiffusionRht => Model::Rht,
            Problem::Collocation => self.model,
        }
    }

    /// Canonical `key = value` rendering; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let problem = match self.problem {
            Problem::Transport => "transport",
            Problem::Rht => "rht",
            Problem::DiffusionTransport => "diffusion-transport",
            Problem::DiffusionRht => "diffusion-rht",
            Problem::Collocation => "collocation",
        };
        let model = match self.model {
            Model::Transport => "transport",
            Model::Rht => "rht",
        };
        let bc = match self.boundary {
            BoundaryKind::Inflow => "inflow",
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Reflecting => "reflecting",
        };
        let closure = match self.closure {
            FluxClosure::Constant => "constant",
            FluxClosure::Linear => "linear",
        };
        let times: Vec<String> = self.times.iter().map(|t| format!("{t}")).collect();
        let _ = writeln!(s, "problem = {problem}");
        let _ = writeln!(s, "model = {model}");
        let _ = writeln!(s, "eps = {:e}", self.eps);
        let _ = writeln!(s, "nx = {}", self.nx);
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "degree = {}", self.degree);
        let _ = writeln!(s, "nv = {}", self.nv);
        if let Some(q) = self.zq {
            let _ = writeln!(s, "zq = {q}");
        }
        let _ = writeln!(s, "tableau = {}", self.tableau);
        let _ = writeln!(s, "boundary = {bc}");
        let _ = writeln!(s, "closure = {closure}");
        let _ = writeln!(s, "sigma = {}", self.sigma);
        let _ = writeln!(s, "inflow_left = {}", self.inflow_left);
        let _ = writeln!(s, "inflow_right = {}", self.inflow_right);
        let _ = writeln!(s, "theta_left = {}", self.theta_left);
        let _ = writeln!(s, "theta_right = {}", self.theta_right);
        let _ = writeln!(s, "initial = {}", self.initial);
        let _ = writeln!(s, "initial_radiation = {}", self.initial_radiation);
        let _ = writeln!(s, "well_prepared = {}", self.well_prepared);
        let _ = writeln!(s, "times = {}", times.join(", "));
        let _ = writeln!(s, "substeps = {}", self.substeps);
        let _ = writeln!(s, "collocation_nodes = {}", self.collocation_nodes);
        let _ = writeln!(s, "floor = {}", self.floor);
        if let Some(p) = &self.output {
            let _ = writeln!(s, "output = {}", p.display());
        }
        s
    }
}

fn issue(line: usize, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { line: Some(line), message: message.into() }
}

/// Parses `key = value` lines (`#` starts a comment) on top of the defaults.
/// Every problem found is reported, each with its line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut issues = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    let mut dx_line = None;
    let mut nx_line = None;
    let mut lambda_line = None;
    let mut dt_value = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(issue(line_no, format!("expected `key = value`, found `{line}`")));
            continue;
        };
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        if seen.contains(&key) {
            issues.push(issue(line_no, format!("duplicate key `{key}`")));
            continue;
        }
        seen.push(key.clone());

        let num = |v: &str| v.parse::<f64>().map_err(|_| format!("`{key}` needs a number, got `{v}`"));
        let int = |v: &str| v.parse::<usize>().map_err(|_| format!("`{key}` needs a whole number, got `{v}`"));
        let expr = |v: &str| Expr::parse(v).map_err(|e| format!("`{key}`: {e}"));
        let outcome: std::result::Result<(), String> = (|| {
            match key.as_str() {
                "problem" => {
                    cfg.problem = match value {
                        "transport" => Problem::Transport,
                        "rht" => Problem::Rht,
                        "diffusion-transport" => Problem::DiffusionTransport,
                        "diffusion-rht" => Problem::DiffusionRht,
                        "collocation" => Problem::Collocation,
                        other => return Err(format!("unknown problem `{other}`")),
                    }
                }
                "model" => {
                    cfg.model = match value {
                        "transport" => Model::Transport,
                        "rht" => Model::Rht,
                        other => return Err(format!("unknown model `{other}`")),
                    }
                }
                "eps" => {
                    cfg.eps = num(value)?;
                    if !(cfg.eps > 0.0) {
                        return Err("eps must be positive".into());
                    }
                }
                "nx" => {
                    cfg.nx = int(value)?;
                    nx_line = Some(line_no);
                }
                "dx" => {
                    let dx = num(value)?;
                    if !(dx > 0.0) {
                        return Err("dx must be positive".into());
                    }
                    cfg.nx = Grid::from_dx(dx).map_err(|e| e.to_string())?.n();
                    dx_line = Some(line_no);
                }
                "lambda" => {
                    cfg.lambda = num(value)?;
                    lambda_line = Some(line_no);
                }
                "dt" => dt_value = Some((num(value)?, line_no)),
                "degree" | "n" => cfg.degree = int(value)?,
                "nv" => cfg.nv = int(value)?,
                "zq" => cfg.zq = Some(int(value)?),
                "tableau" => {
                    crate::imex::tableau(value).map_err(|e| e.to_string())?;
                    cfg.tableau = value.to_string();
                }
                "boundary" => {
                    cfg.boundary = match value {
                        "inflow" => BoundaryKind::Inflow,
                        "periodic" => BoundaryKind::Periodic,
                        "reflecting" => BoundaryKind::Reflecting,
                        other => return Err(format!("unknown boundary `{other}`")),
                    }
                }
                "closure" => cfg.closure = value.parse().map_err(|e: Error| e.to_string())?,
                "sigma" => cfg.sigma = expr(value)?,
                "inflow_left" => cfg.inflow_left = expr(value)?,
                "inflow_right" => cfg.inflow_right = expr(value)?,
                "theta_left" => cfg.theta_left = expr(value)?,
                "theta_right" => cfg.theta_right = expr(value)?,
                "initial" => cfg.initial = expr(value)?,
                "initial_radiation" => cfg.initial_radiation = expr(value)?,
                "well_prepared" => {
                    cfg.well_prepared = value
                        .parse()
                        .map_err(|_| format!("`well_prepared` needs true or false, got `{value}`"))?
                }
                "times" => {
                    cfg.times = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(num)
                        .collect::<std::result::Result<_, _>>()?;
                    if cfg.times.iter().any(|t| !(*t >= 0.0)) {
                        return Err("output times must be non-negative".into());
                    }
                    if cfg.times.windows(2).any(|w| w[1] <= w[0]) {
                        return Err("output times must be strictly ascending".into());
                    }
                }
                "substeps" => cfg.substeps = int(value)?,
                "collocation_nodes" => cfg.collocation_nodes = int(value)?,
                "floor" => cfg.floor = num(value)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => return Err(format!("unknown key `{other}`")),
            }
            Ok(())
        })();
        if let Err(m) = outcome {
            issues.push(issue(line_no, m));
        }
    }

    if let (Some(a), Some(_)) = (nx_line, dx_line) {
        issues.push(issue(a, "give either `nx` or `dx`, not both"));
    }
    if let Some((dt, line)) = dt_value {
        if lambda_line.is_some() {
            issues.push(issue(line, "give either `lambda` or `dt`, not both"));
        } else if !(dt > 0.0) {
            issues.push(issue(line, "dt must be positive"));
        } else {
            cfg.lambda = dt / cfg.dx();
        }
    }
    let whole = |msg: &str, ok: bool, issues: &mut Vec<ConfigIssue>| {
        if !ok {
            issues.push(ConfigIssue { line: None, message: msg.into() });
        }
    };
    whole("nx must be at least 2", cfg.nx >= 2, &mut issues);
    whole("lambda must be positive", cfg.lambda > 0.0, &mut issues);
    whole("nv must be at least 1", cfg.nv >= 1, &mut issues);
    whole("substeps must be at least 1", cfg.substeps >= 1, &mut issues);
    whole("collocation_nodes must be at least 1", cfg.collocation_nodes >= 1, &mut issues);
    whole(
        "zq must be at least degree + 1",
        cfg.zq.is_none_or(|q| q > cfg.degree),
        &mut issues,
    );
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    if cfg.lambda > LAMBDA_MAX {
        log::warn!("lambda = {} exceeds {LAMBDA_MAX}; the run may be unstable", cfg.lambda);
    }
    Ok(cfg)
}

const PRESETS: [(&str, &str, &str); 4] = [
    (
        "test1",
        "deterministic transport near the diffusive regime",
        "problem = transport
eps = 1e-6
dx = 0.01
lambda = 0.04
degree = 0
sigma = 1
inflow_left = 1
inflow_right = 0
closure = linear
times = 0.01, 0.05, 0.15
",
    ),
    (
        "test2",
        "transport with random scattering sigma_s = 1 + 0.5 z",
        "problem = transport
eps = 1e-6
dx = 0.025
lambda = 0.035
degree = 4
sigma = 1 + 0.5*z
inflow_left = 1
inflow_right = 0
closure = linear
times = 0.01, 0.05, 0.15
",
    ),
    (
        "test3",
        "deterministic radiative heat transfer",
        "problem = rht
eps = 1e-6
dx = 0.025
lambda = 0.035
degree = 0
sigma = 1
theta_left = 1
theta_right = 0
inflow_left = 1
inflow_right = 0
closure = linear
times = 0.01, 0.05, 0.15
",
    ),
    (
        "test4",
        "radiative heat transfer with random cross-section sigma = 1 + 0.5 z",
        "problem = rht
eps = 1e-6
dx = 0.025
lambda = 0.035
degree = 4
sigma = 1 + 0.5*z
theta_left = 1
theta_right = 0
inflow_left = 1 + 0.5*z
inflow_right = 0
closure = linear
times = 0.01, 0.05, 0.15
",
    ),
];

/// Names and one-line descriptions of the built-in presets.
pub fn preset_names() -> Vec<(&'static str, &'static str)> {
    PRESETS.iter().map(|(n, d, _)| (*n, *d)).collect()
}

/// Configuration text of a built-in preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _, _)| *n == name).map(|(_, _, t)| *t)
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    preset_text(name).map(|t| parse_config(t).expect("built-in presets are valid"))
}
