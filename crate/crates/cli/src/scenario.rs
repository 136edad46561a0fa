//! Scenario files: one flat JSON object per file.

use memodiff::bifurcation::Normalization;
use memodiff::expr::{profile_from_str, GrowthProfile};
use memodiff::grid::{Bc, Grid1D, DEFAULT_N};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub m: String,
    #[serde(default = "default_bc")]
    pub bc: String,
    #[serde(rename = "L", default = "default_length")]
    pub length: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    pub lambda: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
    pub tau: Option<f64>,
    #[serde(default = "default_norm")]
    pub normalization: String,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    #[serde(rename = "tauMax")]
    pub tau_max: Option<f64>,
    #[serde(rename = "M")]
    pub order: Option<usize>,
    /// Reduced mode count for the delay spectrum.
    #[serde(rename = "K")]
    pub modes: Option<usize>,
    /// Number of delays τₙ listed in hopf.csv.
    #[serde(rename = "tauCount")]
    pub tau_count: Option<usize>,
    /// Random starts used to probe uniqueness of the steady state.
    pub starts: Option<usize>,
    #[serde(rename = "sweep.D")]
    pub sweep_d: Option<Vec<f64>>,
    #[serde(rename = "sweep.tau")]
    pub sweep_tau: Option<Vec<f64>>,
    #[serde(rename = "sweep.lambda")]
    pub sweep_lambda: Option<Vec<f64>>,
}

fn default_bc() -> String {
    "neumann".into()
}
fn default_length() -> f64 {
    PI
}
fn default_n() -> usize {
    DEFAULT_N
}
fn default_norm() -> String {
    "unit-l2".into()
}

/// Parse or validation failure, reported with exit status 64.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub struct Setup {
    pub grid: Grid1D,
    pub profile: GrowthProfile,
    pub normalization: Normalization,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("field `{field}`: {msg}"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
        let s: Scenario = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.bc_value()?;
        if Normalization::parse(&self.normalization).is_none() {
            return Err(bad(
                "normalization",
                format!("expected unit-l2 or raw, got {:?}", self.normalization),
            ));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(bad("L", "must be positive"));
        }
        if !(3..=20001).contains(&self.n) {
            return Err(bad("n", "must lie in [3, 20001]"));
        }
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(bad(name, "must be positive")),
            _ => Ok(()),
        };
        positive("lambda", self.lambda)?;
        positive("T", self.t_end)?;
        positive("dt", self.dt)?;
        positive("tauMax", self.tau_max)?;
        if let Some(t) = self.tau {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad("tau", "must be nonnegative"));
            }
        }
        if let Some(d) = self.d {
            if !d.is_finite() {
                return Err(bad("D", "must be finite"));
            }
        }
        if let Some(m) = self.order {
            if m < 8 {
                return Err(bad("M", "must be at least 8"));
            }
        }
        if self.modes == Some(0) {
            return Err(bad("K", "must be positive"));
        }
        if self.starts == Some(0) {
            return Err(bad("starts", "must be positive"));
        }
        for (name, v) in [
            ("sweep.D", &self.sweep_d),
            ("sweep.tau", &self.sweep_tau),
            ("sweep.lambda", &self.sweep_lambda),
        ] {
            if let Some(v) = v {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(bad(name, "must be a nonempty array of finite numbers"));
                }
            }
        }
        if self
            .sweep_tau
            .as_ref()
            .is_some_and(|v| v.iter().any(|&t| t < 0.0))
        {
            return Err(bad("sweep.tau", "delays must be nonnegative"));
        }
        if self
            .sweep_lambda
            .as_ref()
            .is_some_and(|v| v.iter().any(|&l| l <= 0.0))
        {
            return Err(bad("sweep.lambda", "values must be positive"));
        }
        let g = Grid1D::new(self.length, self.n, self.bc_value()?).map_err(|e| bad("n", e))?;
        profile_from_str(&self.m, &g).map_err(|e| bad("m", e))?;
        Ok(())
    }

    pub fn bc_value(&self) -> Result<Bc, ConfigError> {
        match self.bc.as_str() {
            "neumann" => Ok(Bc::Neumann),
            "dirichlet" => Ok(Bc::Dirichlet),
            other => Err(bad(
                "bc",
                format!("expected neumann or dirichlet, got {other:?}"),
            )),
        }
    }

    pub fn setup(&self) -> Result<Setup, ConfigError> {
        let grid = Grid1D::new(self.length, self.n, self.bc_value()?).map_err(|e| bad("n", e))?;
        let profile = profile_from_str(&self.m, &grid).map_err(|e| bad("m", e))?;
        let normalization = Normalization::parse(&self.normalization)
            .ok_or_else(|| bad("normalization", "unknown"))?;
        Ok(Setup {
            grid,
            profile,
            normalization,
        })
    }

    pub fn require(&self, name: &str, v: Option<f64>) -> Result<f64, ConfigError> {
        v.ok_or_else(|| bad(name, "required by this command"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_renames() {
        let s =
            Scenario::parse(r#"{"m": "-x^3+5", "lambda": 0.6, "D": 0.3, "sweep.tau": [10, 50]}"#)
                .unwrap();
        assert_eq!(s.bc, "neumann");
        assert_eq!(s.n, 201);
        assert!((s.length - PI).abs() < 1e-15);
        assert_eq!(s.sweep_tau, Some(vec![10.0, 50.0]));
        assert_eq!(s.normalization, "unit-l2");
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        let e = Scenario::parse(r#"{"m": "1", "lamda": 0.6}"#).unwrap_err();
        assert!(e.0.contains("lamda"), "{e}");
        let e = Scenario::parse("{\n\"m\": \"1\",\n\"n\": \"x\"}").unwrap_err();
        assert!(e.0.starts_with("line 3"), "{e}");
        assert!(Scenario::parse(r#"{"m": "1", "bc": "periodic"}"#)
            .unwrap_err()
            .0
            .contains("`bc`"));
        assert!(Scenario::parse(r#"{"m": "1 +"}"#)
            .unwrap_err()
            .0
            .contains("`m`"));
        assert!(Scenario::parse(r#"{"m": "1", "normalization": "l1"}"#).is_err());
        assert!(Scenario::parse(r#"{"m": "1", "M": 4}"#).is_err());
        assert!(Scenario::parse(r#"{"m": "1", "sweep.D": []}"#).is_err());
    }
}
