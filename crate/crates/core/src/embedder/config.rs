use serde::{Deserialize, Serialize};

use super::cascade::Overrides;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ParamMode {
    /// Run with the exact cascade; overrides are rejected.
    PaperExact,
    /// Fill missing overrides from [`Overrides::practical_defaults`].
    #[default]
    Practical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Balance {
    /// Every pattern class must have exactly `N` vertices.
    #[default]
    Strict,
    /// Smaller classes are padded with isolated vertices.
    Lenient,
}

/// Which density the degree conditions are centred on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMode {
    /// The measured density of each host pair.
    #[default]
    Measured,
    /// The configured `d` for every pair.
    Nominal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Verbosity {
    #[default]
    Summary,
    /// Also record per-step series.
    Series,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub seed: u64,
    pub mode: ParamMode,
    /// Nominal pair density. Defaults to the smallest measured density over the
    /// edges of the cluster graph.
    pub d: Option<Rational>,
    /// Minimum-degree ratio. Defaults to the smallest `deg / N` over all pairs.
    pub delta: Option<Rational>,
    /// Degree bound. Defaults to the maximum degree of the pattern (at least 1).
    pub max_degree: Option<usize>,
    pub overrides: Overrides,
    pub balance: Balance,
    pub density: DensityMode,
    /// Score every candidate instead of stopping at the first valid one.
    pub exhaustive_selection: bool,
    /// Count `y′ = y` among the vertices the selection proportion is taken over.
    pub proportion_includes_self: bool,
    /// Probability that a step is re-checked against from-scratch recomputation.
    pub audit_rate: f64,
    pub verbosity: Verbosity,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            seed: 0,
            mode: ParamMode::Practical,
            d: None,
            delta: None,
            max_degree: None,
            overrides: Overrides::default(),
            balance: Balance::Strict,
            density: DensityMode::Measured,
            exhaustive_selection: false,
            proportion_includes_self: false,
            audit_rate: 0.0,
            verbosity: Verbosity::Summary,
        }
    }
}

impl EmbedConfig {
    pub fn with_seed(seed: u64) -> Self {
        EmbedConfig {
            seed,
            ..EmbedConfig::default()
        }
    }
}
