use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use nepv_core::problems::{load_potential_csv, GpeParams, Potential};
use nepv_core::solvers::{Method, SelectionKind, SelectionStrategy, SolverConfig, Target};

use crate::CliError;

/// Problem family and parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemConfig {
    ScalarSine { alpha: f64 },
    Gpe(GpeParams),
    Heaviside { n: usize, p: usize, alpha: f64 },
}

impl ProblemConfig {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemConfig::ScalarSine { .. } => "scalar_sine",
            ProblemConfig::Gpe(_) => "gpe",
            ProblemConfig::Heaviside { .. } => "heaviside",
        }
    }

    /// Nonlinearity strength: `alpha`, or `b` for the GPE.
    pub fn alpha(&self) -> f64 {
        match self {
            ProblemConfig::ScalarSine { alpha } | ProblemConfig::Heaviside { alpha, .. } => *alpha,
            ProblemConfig::Gpe(g) => g.b,
        }
    }

    pub fn with_alpha(&self, value: f64) -> Self {
        let mut c = self.clone();
        match &mut c {
            ProblemConfig::ScalarSine { alpha } | ProblemConfig::Heaviside { alpha, .. } => *alpha = value,
            ProblemConfig::Gpe(g) => g.b = value,
        }
        c
    }

    pub fn block_size(&self) -> usize {
        match self {
            ProblemConfig::Heaviside { p, .. } => *p,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Run,
    SweepAlpha,
    SingleStep,
    Order,
}

impl StudyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyKind::Run => "run",
            StudyKind::SweepAlpha => "sweep_alpha",
            StudyKind::SingleStep => "single_step",
            StudyKind::Order => "order",
        }
    }
}

impl FromStr for StudyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "run" => Ok(StudyKind::Run),
            "sweep_alpha" => Ok(StudyKind::SweepAlpha),
            "single_step" => Ok(StudyKind::SingleStep),
            "order" => Ok(StudyKind::Order),
            _ => Err(format!("unknown study kind `{s}` (expected run, sweep_alpha, single_step or order)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialGuess {
    /// Normalized vector of ones (`p = 1` only).
    Ones,
    /// Orthonormalized Gaussian matrix from the study seed.
    Random,
    /// Lowest `p` eigenvectors of the linear part `A₀`.
    LinearGround,
}

impl FromStr for InitialGuess {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ones" => Ok(InitialGuess::Ones),
            "random" => Ok(InitialGuess::Random),
            "linear_ground" => Ok(InitialGuess::LinearGround),
            _ => Err(format!("unknown initial guess `{s}` (expected ones, random or linear_ground)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: Option<StudyKind>,
    pub initial: InitialGuess,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub study: StudyConfig,
    pub output_dir: PathBuf,
}

const PROBLEM_KEYS: &[&str] = &[
    "family", "alpha", "n", "p", "grid", "half_width", "omega", "b", "potential",
];
const SOLVER_KEYS: &[&str] = &["method", "tol", "max_iter", "selection", "target", "delta", "inexact_budget"];
const STUDY_KEYS: &[&str] = &["kind", "initial", "seed", "alphas", "methods"];
const OUTPUT_KEYS: &[&str] = &["directory"];

fn err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

struct Section<'a> {
    name: &'static str,
    props: Option<&'a ini::Properties>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.props.and_then(|p| p.get(key)).map(str::trim)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| err(&format!("{}.{key}", self.name), format!("`{v}`: {e}"))),
        }
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.raw(key) else { return Ok(None) };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<T>()
                    .map_err(|e| err(&format!("{}.{key}", self.name), format!("`{item}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        if let Some(props) = self.props {
            for (k, _) in props.iter() {
                if !allowed.contains(&k) {
                    return Err(err(&format!("{}.{k}", self.name), "unknown key"));
                }
            }
        }
        Ok(())
    }
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(field, format!("must be finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses INI text; relative file names resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        for (name, _) in ini.iter() {
            if let Some(name) = name {
                if !["problem", "solver", "study", "output"].contains(&name) {
                    return Err(CliError::Config(format!("unknown section [{name}]")));
                }
            }
        }
        let section = |name: &'static str| Section {
            name,
            props: ini.section(Some(name)),
        };
        let problem = section("problem");
        let solver = section("solver");
        let study = section("study");
        let output = section("output");
        if problem.props.is_none() {
            return Err(CliError::Config("missing [problem] section".into()));
        }
        problem.check_keys(PROBLEM_KEYS)?;
        solver.check_keys(SOLVER_KEYS)?;
        study.check_keys(STUDY_KEYS)?;
        output.check_keys(OUTPUT_KEYS)?;

        let family: String = problem
            .parse("family")?
            .ok_or_else(|| err("problem.family", "missing"))?;
        let problem_cfg = match family.as_str() {
            "scalar_sine" => ProblemConfig::ScalarSine {
                alpha: finite("problem.alpha", problem.get("alpha", 0.5)?)?,
            },
            "heaviside" => {
                let n: usize = problem.get("n", 10)?;
                let p: usize = problem.get("p", 3)?;
                if n < 2 {
                    return Err(err("problem.n", format!("must be at least 2, got {n}")));
                }
                if p == 0 || p > n {
                    return Err(err("problem.p", format!("must lie in 1..={n}, got {p}")));
                }
                ProblemConfig::Heaviside {
                    n,
                    p,
                    alpha: finite("problem.alpha", problem.get("alpha", 0.5)?)?,
                }
            }
            "gpe" => {
                let d = GpeParams::default();
                let n: usize = problem.get("grid", d.n)?;
                if n < 3 {
                    return Err(err("problem.grid", format!("must be at least 3, got {n}")));
                }
                let l: f64 = finite("problem.half_width", problem.get("half_width", d.l)?)?;
                if l <= 0.0 {
                    return Err(err("problem.half_width", format!("must be positive, got {l}")));
                }
                let potential = match problem.raw("potential").unwrap_or("harmonic") {
                    "harmonic" => Potential::Harmonic,
                    "zero" => Potential::Zero,
                    file => {
                        let (gn, gl, grid) = load_potential_csv(&base.join(file))
                            .map_err(|e| err("problem.potential", e))?;
                        if gn != n || (gl - l).abs() > 1e-12 * l {
                            return Err(err(
                                "problem.potential",
                                format!("grid is for N={gn}, L={gl}, problem has N={n}, L={l}"),
                            ));
                        }
                        Potential::Grid(grid)
                    }
                };
                ProblemConfig::Gpe(GpeParams {
                    n,
                    l,
                    omega: finite("problem.omega", problem.get("omega", d.omega)?)?,
                    b: finite("problem.b", problem.get("b", d.b)?)?,
                    potential,
                })
            }
            other => {
                return Err(err(
                    "problem.family",
                    format!("unknown family `{other}` (expected scalar_sine, gpe or heaviside)"),
                ))
            }
        };

        let method: Method = solver.get("method", Method::AVersion)?;
        let kind: SelectionKind = solver.get("selection", SelectionKind::SmallestP)?;
        let selection = SelectionStrategy {
            kind,
            target: solver.get("target", Target::RayleighQuotient)?,
            delta: solver.get("delta", 0.1)?,
        };
        selection.validate().map_err(|e| err("solver.delta", e))?;
        let solver_cfg = SolverConfig {
            method,
            tol: solver.get("tol", 1e-10)?,
            max_iter: solver.get("max_iter", 200)?,
            selection,
            inexact_budget: solver.get("inexact_budget", 5000)?,
        };
        solver_cfg.validate().map_err(|e| err("solver", e))?;
        if kind == SelectionKind::ClusterLstsq && problem_cfg.block_size() != 1 {
            return Err(err("solver.selection", "cluster_lstsq needs a single vector (p = 1)"));
        }

        let initial: InitialGuess = study.get("initial", InitialGuess::Random)?;
        if initial == InitialGuess::Ones && problem_cfg.block_size() != 1 {
            return Err(err("study.initial", "`ones` needs p = 1"));
        }
        let alphas: Vec<f64> = study.list("alphas")?.unwrap_or_default();
        for a in &alphas {
            finite("study.alphas", *a)?;
        }
        let methods = study.list("methods")?.unwrap_or_else(|| vec![method]);
        if methods.is_empty() {
            return Err(err("study.methods", "empty list"));
        }
        let study_cfg = StudyConfig {
            kind: study.parse("kind")?,
            initial,
            seed: study.get("seed", 0)?,
            alphas,
            methods,
        };

        let output_dir = base.join(output.raw("directory").unwrap_or("nepv-out"));
        Ok(Self {
            problem: problem_cfg,
            solver: solver_cfg,
            study: study_cfg,
            output_dir,
        })
    }
}
