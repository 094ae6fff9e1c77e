//! The parameter hierarchy `ε ≪ ε′ ≪ ε″ ≪ ε‴ ≪ d‴ ≪ d″ ≪ d′ ≪ d`.
//!
//! With `base = δ·d^Δ / (8rΔ)`:
//!
//! | name | definition                  | as a power of `base` |
//! |------|-----------------------------|----------------------|
//! | d′   | base                        | 1                    |
//! | d″   | (d′)³                       | 3                    |
//! | d‴   | (d″)²                       | 6                    |
//! | ε‴   | (d‴)²                       | 12                   |
//! | ε″   | base²·(d‴)²·(ε‴)³           | 50                   |
//! | ε′   | base²·(d‴)²·(ε″)³           | 164                  |
//! | ε    | (ε′)²                       | 328                  |
//!
//! These values are far too small to run with (`εN ≥ 1` needs `N > 10^1000`
//! for typical inputs), so the embedder normally runs on explicit overrides.
//! The exact values are always computed and reported alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One value per derived parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Derived<T: Default> {
    /// `d′`: buffer fraction.
    pub d1: T,
    /// `d″`: reordering period and second exceptional-set threshold.
    pub d2: T,
    /// `d‴`: Hall-condition diagnostics.
    pub d3: T,
    /// `ε‴`
    pub eps3: T,
    /// `ε″`
    pub eps2: T,
    /// `ε′`: tolerated failure proportion in the selection rule.
    pub eps1: T,
    /// `ε`: two-sided degree tolerance.
    pub eps: T,
}

impl<T: Default> Derived<T> {
    pub fn map<U: Default>(&self, mut f: impl FnMut(&T) -> U) -> Derived<U> {
        Derived {
            d1: f(&self.d1),
            d2: f(&self.d2),
            d3: f(&self.d3),
            eps3: f(&self.eps3),
            eps2: f(&self.eps2),
            eps1: f(&self.eps1),
            eps: f(&self.eps),
        }
    }

    /// Values in the order `d′, d″, d‴, ε‴, ε″, ε′, ε`.
    pub fn to_vec(&self) -> Vec<&T> {
        vec![&self.d1, &self.d2, &self.d3, &self.eps3, &self.eps2, &self.eps1, &self.eps]
    }
}

/// Explicit replacements for derived parameters.
pub type Overrides = Derived<Option<Rational>>;

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_none())
    }

    /// Overrides used when running at practical sizes, calibrated on random
    /// hosts over a triangle with `N = 150`, `d = 0.6`, `δ = 0.5`, `Δ = 2`.
    ///
    /// `ε` stays below `d − δ` so that low-degree hosts are detected. `ε′` is
    /// far above the nominal ordering: joint candidate sets late in the run
    /// hold a few dozen vertices, where a tolerance of `εk` is narrower than
    /// one standard deviation. `d′` keeps buffer candidate sets above the
    /// reordering threshold `(d′)²n`, which needs roughly `d′·r < d^Δ`.
    pub fn practical_defaults() -> Overrides {
        let q = |s: &str| Some(s.parse::<Rational>().expect("valid literal"));
        Derived {
            d1: q("0.11"),
            d2: q("0.09"),
            d3: q("0.05"),
            eps3: q("0.05"),
            eps2: q("0.05"),
            eps1: q("0.6"),
            eps: q("0.08"),
        }
    }

    /// `self` with gaps filled from `fallback`.
    pub fn or(&self, fallback: &Overrides) -> Overrides {
        let pick = |a: &Option<Rational>, b: &Option<Rational>| a.clone().or_else(|| b.clone());
        Derived {
            d1: pick(&self.d1, &fallback.d1),
            d2: pick(&self.d2, &fallback.d2),
            d3: pick(&self.d3, &fallback.d3),
            eps3: pick(&self.eps3, &fallback.eps3),
            eps2: pick(&self.eps2, &fallback.eps2),
            eps1: pick(&self.eps1, &fallback.eps1),
            eps: pick(&self.eps, &fallback.eps),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeMode {
    PaperExact,
    PracticalOverride,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParameterCascade {
    pub d: Rational,
    pub delta: Rational,
    pub max_degree: usize,
    pub r: usize,
    pub base: Rational,
    pub log10_base: f64,
    /// Cascade values, computed in log-space from the inputs.
    pub log10: Derived<f64>,
    /// Cascade values, exact.
    #[serde(skip)]
    pub exact: Derived<Rational>,
    /// Values the embedder runs with: overrides where given, exact values elsewhere.
    #[serde(skip)]
    pub effective: Derived<Rational>,
    pub effective_log10: Derived<f64>,
    pub mode: CascadeMode,
}

/// Computes the cascade for `(d, δ, Δ, r)`; any override switches the mode
/// to practical and replaces the corresponding effective value.
pub fn compute_cascade(
    d: &Rational,
    delta: &Rational,
    max_degree: usize,
    r: usize,
    overrides: &Overrides,
) -> Result<ParameterCascade> {
    let zero = Rational::zero();
    let one = Rational::one();
    if *d <= zero || *d > one {
        return Err(Error::arg(format!("d must lie in (0,1], got {d}")));
    }
    if *delta <= zero || *delta > one {
        return Err(Error::arg(format!("delta must lie in (0,1], got {delta}")));
    }
    if max_degree < 1 {
        return Err(Error::arg("max degree must be at least 1"));
    }
    if r < 2 {
        return Err(Error::arg(format!("r must be at least 2, got {r}")));
    }
    for (value, name) in overrides.to_vec().into_iter().zip(NAMES) {
        if let Some(v) = value {
            if !v.is_positive() || *v > one {
                return Err(Error::arg(format!("override {name} must lie in (0,1], got {v}")));
            }
        }
    }

    let denom = Rational::from_integer((8 * r * max_degree) as i64);
    let base = &(delta * &d.pow(max_degree as u32)) / &denom;

    // Log-space route, following the definitions literally.
    let lb = delta.log10() + max_degree as f64 * d.log10() - ((8 * r * max_degree) as f64).log10();
    let l_d1 = lb;
    let l_d2 = 3.0 * l_d1;
    let l_d3 = 2.0 * l_d2;
    let l_eps3 = 2.0 * l_d3;
    let l_eps2 = 2.0 * lb + 2.0 * l_d3 + 3.0 * l_eps3;
    let l_eps1 = 2.0 * lb + 2.0 * l_d3 + 3.0 * l_eps2;
    let l_eps = 2.0 * l_eps1;
    let log10 = Derived {
        d1: l_d1,
        d2: l_d2,
        d3: l_d3,
        eps3: l_eps3,
        eps2: l_eps2,
        eps1: l_eps1,
        eps: l_eps,
    };

    let d1 = base.clone();
    let d2 = d1.pow(3);
    let d3 = d2.pow(2);
    let eps3 = d3.pow(2);
    let front = &base.pow(2) * &d3.pow(2);
    let eps2 = &front * &eps3.pow(3);
    let eps1 = &front * &eps2.pow(3);
    let eps = eps1.pow(2);
    let exact = Derived {
        d1,
        d2,
        d3,
        eps3,
        eps2,
        eps1,
        eps,
    };

    let effective = Derived {
        d1: overrides.d1.clone().unwrap_or_else(|| exact.d1.clone()),
        d2: overrides.d2.clone().unwrap_or_else(|| exact.d2.clone()),
        d3: overrides.d3.clone().unwrap_or_else(|| exact.d3.clone()),
        eps3: overrides.eps3.clone().unwrap_or_else(|| exact.eps3.clone()),
        eps2: overrides.eps2.clone().unwrap_or_else(|| exact.eps2.clone()),
        eps1: overrides.eps1.clone().unwrap_or_else(|| exact.eps1.clone()),
        eps: overrides.eps.clone().unwrap_or_else(|| exact.eps.clone()),
    };
    let effective_log10 = Derived {
        d1: overrides.d1.as_ref().map_or(log10.d1, Rational::log10),
        d2: overrides.d2.as_ref().map_or(log10.d2, Rational::log10),
        d3: overrides.d3.as_ref().map_or(log10.d3, Rational::log10),
        eps3: overrides.eps3.as_ref().map_or(log10.eps3, Rational::log10),
        eps2: overrides.eps2.as_ref().map_or(log10.eps2, Rational::log10),
        eps1: overrides.eps1.as_ref().map_or(log10.eps1, Rational::log10),
        eps: overrides.eps.as_ref().map_or(log10.eps, Rational::log10),
    };

    Ok(ParameterCascade {
        d: d.clone(),
        delta: delta.clone(),
        max_degree,
        r,
        base,
        log10_base: lb,
        log10,
        exact,
        effective,
        effective_log10,
        mode: if overrides.is_empty() {
            CascadeMode::PaperExact
        } else {
            CascadeMode::PracticalOverride
        },
    })
}

const NAMES: [&str; 7] = ["d1", "d2", "d3", "eps3", "eps2", "eps1", "eps"];

impl ParameterCascade {
    /// `0 < ε ≤ ε′ ≤ ε″ ≤ ε‴ ≤ d‴ ≤ d″ ≤ d′ < d` for the effective values.
    pub fn ordering_holds(&self) -> bool {
        let e = &self.effective;
        let chain = [&e.eps, &e.eps1, &e.eps2, &e.eps3, &e.d3, &e.d2, &e.d1];
        e.eps.is_positive() && chain.windows(2).all(|w| w[0] <= w[1]) && e.d1 < self.d
    }

    /// Parameter names paired with their exact and effective `log₁₀` values.
    pub fn table(&self) -> Vec<(&'static str, f64, f64)> {
        NAMES
            .iter()
            .zip(self.log10.to_vec())
            .zip(self.effective_log10.to_vec())
            .map(|((n, p), e)| (*n, *p, *e))
            .collect()
    }
}
