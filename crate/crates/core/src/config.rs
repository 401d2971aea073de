//! Run configuration: a flat key-value text format with dotted keys,
//! command-line overrides, and the name registries for problems,
//! tableaux and projections.

use crate::diagnostics::InvariantForm;
use crate::error::{Error, Result};
use crate::nlsolve::SolverConfig;
use crate::projections::ProjectionKind;
use crate::systems::{
    guiding_centre, lotka_volterra, point_vortices, rotator, DegenerateLagrangianSystem,
    FieldSpec,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Diagnostics selection flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSelection {
    pub energy: bool,
    pub constraint: bool,
    pub momentum: bool,
    pub lambda: bool,
    pub poincare1: bool,
    pub poincare2: bool,
    pub form: InvariantForm,
    /// Loop sample count for the first invariant.
    pub nloop: usize,
    /// Chebyshev degree for the surface grid of the second invariant.
    pub surface_degree: usize,
}

impl Default for DiagnosticsSelection {
    fn default() -> Self {
        DiagnosticsSelection {
            energy: true,
            constraint: true,
            momentum: true,
            lambda: true,
            poincare1: false,
            poincare2: false,
            form: InvariantForm::Noncanonical,
            nloop: 256,
            surface_degree: 31,
        }
    }
}

/// One experiment: problem x integrator x projection x stepping x solver
/// settings x diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    /// Problem parameter overrides (problem.<name> keys).
    pub problem_params: BTreeMap<String, f64>,
    /// Initial configuration override; the problem default otherwise.
    pub q0: Option<Vec<f64>>,
    pub tableau: String,
    pub projection: ProjectionKind,
    pub midpoint_rinf: bool,
    pub h: f64,
    pub nsteps: usize,
    pub solver: SolverConfig,
    pub diagnostics: DiagnosticsSelection,
    /// Steps between CSV rows and invariant evaluations.
    pub output_interval: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            problem: "rotator".to_string(),
            problem_params: BTreeMap::new(),
            q0: None,
            tableau: "glrk1".to_string(),
            projection: ProjectionKind::None,
            midpoint_rinf: true,
            h: 0.1,
            nsteps: 100,
            solver: SolverConfig::default(),
            diagnostics: DiagnosticsSelection::default(),
            output_interval: 10,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a nonnegative integer, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true/false, got `{v}`"))),
    }
}

impl RunConfig {
    /// Apply one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let v = value.trim();
        match key {
            "problem" => self.problem = v.to_string(),
            "tableau" => self.tableau = v.to_string(),
            "sim.h" => self.h = parse_f64(key, v)?,
            "sim.nsteps" => self.nsteps = parse_usize(key, v)?,
            "sim.projection" => self.projection = ProjectionKind::parse(v)?,
            "sim.midpoint_rinf" => self.midpoint_rinf = parse_bool(key, v)?,
            "sim.q0" => {
                let parts: std::result::Result<Vec<f64>, _> =
                    v.split(',').map(|p| p.trim().parse::<f64>()).collect();
                self.q0 = Some(parts.map_err(|_| {
                    Error::Config(format!("sim.q0: expected comma-separated numbers, got `{v}`"))
                })?);
            }
            "solver.atol" => self.solver.abs_tolerance = parse_f64(key, v)?,
            "solver.max_iter" => self.solver.max_iterations = parse_usize(key, v)?,
            "solver.jac_refresh" => self.solver.jacobian_refresh_interval = parse_usize(key, v)?,
            "solver.line_search" => self.solver.line_search = parse_bool(key, v)?,
            "diag.energy" => self.diagnostics.energy = parse_bool(key, v)?,
            "diag.constraint" => self.diagnostics.constraint = parse_bool(key, v)?,
            "diag.momentum" => self.diagnostics.momentum = parse_bool(key, v)?,
            "diag.lambda" => self.diagnostics.lambda = parse_bool(key, v)?,
            "diag.poincare1" => self.diagnostics.poincare1 = parse_bool(key, v)?,
            "diag.poincare2" => self.diagnostics.poincare2 = parse_bool(key, v)?,
            "diag.form" => self.diagnostics.form = InvariantForm::parse(v)?,
            "diag.nloop" => self.diagnostics.nloop = parse_usize(key, v)?,
            "diag.surface_degree" => self.diagnostics.surface_degree = parse_usize(key, v)?,
            "output_interval" => self.output_interval = parse_usize(key, v)?,
            _ => {
                if let Some(param) = key.strip_prefix("problem.") {
                    self.problem_params
                        .insert(param.to_string(), parse_f64(key, v)?);
                } else {
                    return Err(Error::Config(format!("unknown configuration key `{key}`")));
                }
            }
        }
        Ok(())
    }

    /// Parse the flat text form: one `key = value` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical serialization; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem);
        for (k, v) in &self.problem_params {
            let _ = writeln!(s, "problem.{k} = {v:?}");
        }
        if let Some(q0) = &self.q0 {
            let parts: Vec<String> = q0.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(s, "sim.q0 = {}", parts.join(","));
        }
        let _ = writeln!(s, "tableau = {}", self.tableau);
        let _ = writeln!(s, "sim.projection = {}", self.projection.as_str());
        let _ = writeln!(s, "sim.midpoint_rinf = {}", self.midpoint_rinf);
        let _ = writeln!(s, "sim.h = {:?}", self.h);
        let _ = writeln!(s, "sim.nsteps = {}", self.nsteps);
        let _ = writeln!(s, "solver.atol = {:?}", self.solver.abs_tolerance);
        let _ = writeln!(s, "solver.max_iter = {}", self.solver.max_iterations);
        let _ = writeln!(
            s,
            "solver.jac_refresh = {}",
            self.solver.jacobian_refresh_interval
        );
        let _ = writeln!(s, "solver.line_search = {}", self.solver.line_search);
        let _ = writeln!(s, "diag.energy = {}", self.diagnostics.energy);
        let _ = writeln!(s, "diag.constraint = {}", self.diagnostics.constraint);
        let _ = writeln!(s, "diag.momentum = {}", self.diagnostics.momentum);
        let _ = writeln!(s, "diag.lambda = {}", self.diagnostics.lambda);
        let _ = writeln!(s, "diag.poincare1 = {}", self.diagnostics.poincare1);
        let _ = writeln!(s, "diag.poincare2 = {}", self.diagnostics.poincare2);
        let _ = writeln!(s, "diag.form = {}", self.diagnostics.form.as_str());
        let _ = writeln!(s, "diag.nloop = {}", self.diagnostics.nloop);
        let _ = writeln!(s, "diag.surface_degree = {}", self.diagnostics.surface_degree);
        let _ = writeln!(s, "output_interval = {}", self.output_interval);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.h <= 0.0 {
            return Err(Error::Config(format!("sim.h must be positive, got {}", self.h)));
        }
        if self.nsteps == 0 {
            return Err(Error::Config("sim.nsteps must be at least 1".into()));
        }
        if self.output_interval == 0 {
            return Err(Error::Config("output_interval must be at least 1".into()));
        }
        crate::tableaux::by_name(&self.tableau)?;
        build_system(&self.problem, &self.problem_params)?;
        Ok(())
    }

    /// Instantiate the configured system.
    pub fn system(&self) -> Result<DegenerateLagrangianSystem> {
        build_system(&self.problem, &self.problem_params)
    }

    /// Initial configuration: the override or the problem default.
    pub fn initial_q(&self, sys: &DegenerateLagrangianSystem) -> Vec<f64> {
        self.q0.clone().unwrap_or_else(|| sys.default_q0.clone())
    }
}

fn param(params: &BTreeMap<String, f64>, name: &str, default: f64) -> f64 {
    params.get(name).copied().unwrap_or(default)
}

fn check_params(params: &BTreeMap<String, f64>, allowed: &[&str], problem: &str) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!(
                "problem `{problem}` has no parameter `{k}` (allowed: {allowed:?})"
            )));
        }
    }
    Ok(())
}

/// Instantiate a benchmark system by registry name with parameter
/// overrides.
pub fn build_system(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<DegenerateLagrangianSystem> {
    match name {
        "rotator" => {
            check_params(params, &[], name)?;
            Ok(rotator())
        }
        "lotka-volterra" => {
            check_params(params, &["a1", "a2", "b1", "b2"], name)?;
            Ok(lotka_volterra(
                param(params, "a1", 1.0),
                param(params, "a2", 1.0),
                param(params, "b1", 1.0),
                param(params, "b2", 2.0),
            ))
        }
        "point-vortices" => {
            check_params(params, &["gamma1", "gamma2"], name)?;
            Ok(point_vortices(
                param(params, "gamma1", 0.1),
                param(params, "gamma2", 0.1),
            ))
        }
        "guiding-centre-tokamak" => {
            check_params(params, &["r0", "b0", "qsafe", "mu"], name)?;
            Ok(guiding_centre(FieldSpec::Tokamak {
                r0: param(params, "r0", 2.0),
                b0: param(params, "b0", 5.0),
                qsafe: param(params, "qsafe", 2.0),
                mu: param(params, "mu", 0.01),
            }))
        }
        "guiding-centre-symmetric" => {
            check_params(params, &["b0", "mu"], name)?;
            Ok(guiding_centre(FieldSpec::Symmetric {
                b0: param(params, "b0", 1.0),
                mu: param(params, "mu", 0.01),
            }))
        }
        other => Err(Error::Config(format!("unknown problem `{other}`"))),
    }
}

pub fn problem_names() -> Vec<&'static str> {
    vec![
        "rotator",
        "lotka-volterra",
        "point-vortices",
        "guiding-centre-tokamak",
        "guiding-centre-symmetric",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.serialize();
        let parsed = RunConfig::parse(&text).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn overrides_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("problem", "point-vortices").unwrap();
        cfg.set("problem.gamma1", "0.2").unwrap();
        cfg.set("tableau", "glrk2").unwrap();
        cfg.set("sim.projection", "symmetric").unwrap();
        cfg.set("sim.h", "0.05").unwrap();
        cfg.set("sim.nsteps", "4000").unwrap();
        cfg.set("sim.q0", "1.0, 0.1, 1.0, -0.1").unwrap();
        cfg.set("solver.atol", "1e-13").unwrap();
        cfg.set("diag.form", "corrected").unwrap();
        let parsed = RunConfig::parse(&cfg.serialize()).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = RunConfig::parse(
            "# a comment\n\nproblem = lotka-volterra\nsim.h = 0.1 # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.problem, "lotka-volterra");
        assert_eq!(cfg.h, 0.1);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("sim.step", "0.1").is_err());
        assert!(cfg.set("sim.h", "fast").is_err());
        assert!(cfg.set("sim.projection", "orthogonal").is_err());
        assert!(RunConfig::parse("problem = harmonic\n").is_err());
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(RunConfig::parse("sim.nsteps = 0\n").is_err());
    }

    #[test]
    fn unknown_problem_parameters_rejected() {
        let mut cfg = RunConfig::default();
        cfg.set("problem", "rotator").unwrap();
        cfg.set("problem.mass", "2.0").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn registry_builds_every_problem() {
        for name in problem_names() {
            let sys = build_system(name, &BTreeMap::new()).unwrap();
            assert_eq!(sys.label(), name);
            assert!(!sys.default_q0.is_empty());
        }
    }
}
