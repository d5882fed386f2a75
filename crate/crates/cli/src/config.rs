//! TOML run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use scq_core::hamiltonians::derive_system_params;
use scq_core::{CircuitParams, Complex, FockCutoff, Method, Params, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Analytic,
    Transformed,
    Full,
    JcmNumeric,
    TwoPhoton,
}

impl MethodName {
    pub fn method(self) -> Method {
        match self {
            MethodName::Analytic => Method::AnalyticSeries,
            MethodName::Transformed => Method::TransformedAnalytic,
            MethodName::Full => Method::FullNumeric,
            MethodName::JcmNumeric => Method::JcmNumeric,
            MethodName::TwoPhoton => Method::TwoPhotonNumeric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub omega: f64,
    pub e_z: f64,
    pub e_j: f64,
    pub gamma: f64,
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitBlock {
    pub e_ch: f64,
    pub n_g: f64,
    pub e_j: f64,
    pub phi_ratio: f64,
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: MethodName,
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub n_max: usize,
    pub tau_max: f64,
    pub n_steps: usize,
    pub output_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitBlock>,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    fn check(&self) -> anyhow::Result<()> {
        match (&self.system, &self.circuit) {
            (Some(_), Some(_)) => bail!("config has both [system] and [circuit]; give exactly one"),
            (None, None) => bail!("config needs a [system] or a [circuit] block"),
            _ => {}
        }
        if self.n_steps < 2 {
            bail!("n_steps must be at least 2, got {}", self.n_steps);
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            bail!("tau_max must be positive, got {}", self.tau_max);
        }
        Ok(())
    }

    pub fn params(&self) -> anyhow::Result<Params> {
        let p = match (&self.system, &self.circuit) {
            (Some(s), None) => Params::new(s.omega, s.e_z, s.e_j, s.gamma, Complex::new(s.beta_re, s.beta_im))?,
            (None, Some(c)) => derive_system_params(&CircuitParams {
                e_ch: c.e_ch,
                n_g: c.n_g,
                e_j: c.e_j,
                phi_ratio: c.phi_ratio,
                beta: Complex::new(c.beta_re, c.beta_im),
            })?,
            _ => bail!("config needs exactly one of [system] or [circuit]"),
        };
        Ok(p)
    }

    pub fn alpha(&self) -> Complex<f64> {
        Complex::new(self.alpha_re, self.alpha_im)
    }

    pub fn scenario(&self, allow_small_cutoff: bool) -> anyhow::Result<Scenario<f64>> {
        Ok(Scenario::new(self.params()?, self.alpha(), FockCutoff::new(self.n_max)?).allow_small_cutoff(allow_small_cutoff))
    }
}
