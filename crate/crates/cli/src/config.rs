//! JSON problem configuration and its translation into library types.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tempus_core::{
    make_timescale, riccati_forward, suggested_riccati_seed, Coefficient, EquationSpec, GridFunction,
    PerturbationKind, PerturbationSpec, RiccatiSolution, TimeScale, TimeScaleFamily,
};

use crate::error::CliError;
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub timescale: TimeScaleFamily,
    pub equation: EquationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riccati: Option<RiccatiConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    Constant,
    Variable,
}

/// A coefficient given as a number, an expression in `t`, or one value per
/// grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Field {
    Number(f64),
    Expression(String),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub order: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CoefficientMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PerturbationKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_endpoints: Option<bool>,
    /// Inline approximate solution; excludes the generator fields.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RiccatiConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// The approximate solution to certify.
pub enum Candidate {
    Generated(PerturbationSpec),
    Inline(Vec<f64>),
}

fn config_err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ProblemConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(
                if path == "." { "<root>" } else { &path },
                e.into_inner().to_string(),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks that do not need the time scale.
    pub fn validate(&self) -> Result<(), CliError> {
        let eq = &self.equation;
        match eq.order {
            1 => {
                if eq.d.is_none() {
                    return Err(config_err(
                        "equation.d",
                        "first-order equations need a coefficient d",
                    ));
                }
            }
            2 => match eq.mode.unwrap_or(CoefficientMode::Constant) {
                CoefficientMode::Constant => {
                    if eq.alpha.is_none() {
                        return Err(config_err("equation.alpha", "constant mode needs alpha"));
                    }
                    if eq.beta.is_none() {
                        return Err(config_err("equation.beta", "constant mode needs beta"));
                    }
                }
                CoefficientMode::Variable => {
                    if eq.p.is_none() {
                        return Err(config_err("equation.p", "variable mode needs p"));
                    }
                    if eq.q.is_none() {
                        return Err(config_err("equation.q", "variable mode needs q"));
                    }
                    match &self.riccati {
                        None => {
                            return Err(config_err(
                                "riccati",
                                "variable-coefficient equations need a riccati entry",
                            ))
                        }
                        Some(r) if r.z0.is_some() && r.values.is_some() => {
                            return Err(config_err("riccati", "give either z0 or values, not both"))
                        }
                        _ => {}
                    }
                }
            },
            other => {
                return Err(config_err(
                    "equation.order",
                    format!("order must be 1 or 2, got {other}"),
                ))
            }
        }
        if let Some(init) = &eq.initial {
            if init.len() != eq.order as usize {
                return Err(config_err(
                    "equation.initial",
                    format!("expected {} initial values, got {}", eq.order, init.len()),
                ));
            }
        }
        match &self.perturbation {
            None => {}
            Some(p) => {
                let generated = p.kind.is_some() || p.magnitude.is_some() || p.seed.is_some();
                match (&p.values, generated) {
                    (Some(_), true) => {
                        return Err(config_err(
                            "perturbation.values",
                            "inline values exclude kind/magnitude/seed",
                        ))
                    }
                    (None, false) => {
                        return Err(config_err("perturbation.kind", "missing perturbation kind"))
                    }
                    (None, true) => {
                        if p.kind.is_none() {
                            return Err(config_err("perturbation.kind", "missing perturbation kind"));
                        }
                        if p.magnitude.is_none() {
                            return Err(config_err("perturbation.magnitude", "missing magnitude"));
                        }
                        if eq.initial.is_none() {
                            return Err(config_err(
                                "equation.initial",
                                "generated perturbations need initial values for the exact solution",
                            ));
                        }
                    }
                    (Some(_), false) => {}
                }
            }
        }
        Ok(())
    }

    pub fn timescale(&self) -> Result<Arc<TimeScale>, CliError> {
        make_timescale(&self.timescale)
            .map(Arc::new)
            .map_err(|e| config_err("timescale", e.to_string()))
    }

    pub fn candidate(&self, seed_override: Option<u64>) -> Result<Candidate, CliError> {
        let p = self
            .perturbation
            .as_ref()
            .ok_or_else(|| config_err("perturbation", "missing perturbation spec or inline values"))?;
        if let Some(v) = &p.values {
            return Ok(Candidate::Inline(v.clone()));
        }
        let spec = PerturbationSpec::new(
            p.kind.ok_or_else(|| config_err("perturbation.kind", "missing"))?,
            p.magnitude
                .ok_or_else(|| config_err("perturbation.magnitude", "missing"))?,
            seed_override.or(p.seed).unwrap_or(0),
            p.pin_endpoints.unwrap_or(false),
        );
        spec.validate()
            .map_err(|e| config_err("perturbation.magnitude", e.to_string()))?;
        Ok(Candidate::Generated(spec))
    }

    /// Builds the equation on `ts` (the configured time scale, or a sweep
    /// member).
    pub fn equation_on(&self, ts: &Arc<TimeScale>) -> Result<EquationSpec, CliError> {
        let eq = &self.equation;
        let init = eq.initial.clone().unwrap_or_default();
        let x0 = init.first().copied().unwrap_or(0.0);
        let x1 = init.get(1).copied().unwrap_or(0.0);
        let forcing = |required: bool| -> Result<Option<GridFunction>, CliError> {
            match &eq.forcing {
                Some(f) => sample(f, ts, "equation.forcing").map(Some),
                None if required => Ok(Some(GridFunction::zeros(ts))),
                None => Ok(None),
            }
        };
        let spec = match eq.order {
            1 => {
                let d = Coefficient::new(sample(eq.d.as_ref().unwrap(), ts, "equation.d")?);
                let f = forcing(true)?.unwrap();
                EquationSpec::first_order(d, f, x0)
            }
            _ => match eq.mode.unwrap_or(CoefficientMode::Constant) {
                CoefficientMode::Constant => {
                    EquationSpec::constant(ts, eq.alpha.unwrap(), eq.beta.unwrap(), forcing(false)?, x0, x1)
                }
                CoefficientMode::Variable => {
                    let p = sample(eq.p.as_ref().unwrap(), ts, "equation.p")?;
                    let q = sample(eq.q.as_ref().unwrap(), ts, "equation.q")?;
                    let f = forcing(true)?.unwrap();
                    let riccati = self.riccati_on(ts, &p, &q)?;
                    EquationSpec::variable(p, q, f, riccati, x0, x1)
                }
            },
        };
        spec.map_err(|e| {
            if e.is_hypothesis_violation() {
                CliError::Hypothesis(e)
            } else {
                config_err("equation", e.to_string())
            }
        })
    }

    fn riccati_on(
        &self,
        ts: &Arc<TimeScale>,
        p: &GridFunction,
        q: &GridFunction,
    ) -> Result<RiccatiSolution, CliError> {
        let r = self.riccati.clone().unwrap_or_default();
        if let Some(values) = r.values {
            let z = GridFunction::new(ts, values).map_err(|e| config_err("riccati.values", e.to_string()))?;
            return RiccatiSolution::from_values(z, p, q)
                .map_err(|e| config_err("riccati.values", e.to_string()));
        }
        let z0 = match r.z0 {
            Some(z0) => z0,
            None => suggested_riccati_seed(p, q).map_err(CliError::Hypothesis)?,
        };
        riccati_forward(p, q, z0).map_err(CliError::Hypothesis)
    }

    pub fn output_dir(&self, flag: Option<&str>) -> String {
        flag.map(str::to_string)
            .or_else(|| self.output.dir.clone())
            .unwrap_or_else(|| "tempus-out".to_string())
    }

    pub fn format(&self, flag: Option<Format>) -> Format {
        flag.or(self.output.format).unwrap_or_default()
    }
}

/// Evaluates a field on every point of `ts`.
pub fn sample(field: &Field, ts: &Arc<TimeScale>, key: &str) -> Result<GridFunction, CliError> {
    let values = match field {
        Field::Number(c) => vec![*c; ts.len()],
        Field::Expression(src) => {
            let e = Expr::parse(src).map_err(|e| config_err(key, e.to_string()))?;
            ts.points().iter().map(|&t| e.eval(t)).collect()
        }
        Field::Values(v) => v.clone(),
    };
    GridFunction::new(ts, values).map_err(|e| config_err(key, e.to_string()))
}
