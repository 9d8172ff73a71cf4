//! Solver parameters and their flat `key=value` text form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Inexactness schedule `ρₖ = initial · decayᵏ`, floored at `floor`.
///
/// With `initial = 0` the raw schedule is identically zero, which would demand
/// an exact subproblem solve; the floor keeps the inner stopping test reachable
/// in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSchedule {
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Default for RhoSchedule {
    fn default() -> Self {
        Self {
            initial: 0.0,
            decay: 0.5,
            floor: 1e-8,
        }
    }
}

impl RhoSchedule {
    /// Raw value `ρₖ`.
    pub fn raw(&self, k: usize) -> f64 {
        if self.initial == 0.0 {
            return 0.0;
        }
        self.initial * self.decay.powi(k.min(i32::MAX as usize) as i32)
    }

    /// `max(ρₖ, floor)`, the level actually used by the inner solver.
    pub fn effective(&self, k: usize) -> f64 {
        self.raw(k).max(self.floor)
    }
}

/// Which pair `(s, y)` feeds the quasi-Newton update after a step that was
/// not a unit step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecantPair {
    /// `s = zₖ − xₖ`, `y = F(zₖ) − F(xₖ)`: curvature along the model direction.
    Trial,
    /// `s = xₖ₊₁ − xₖ`, `y = F(xₖ₊₁) − F(xₖ)`.
    Step,
}

impl FromStr for SecantPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trial" => Ok(Self::Trial),
            "step" => Ok(Self::Step),
            other => Err(format!("expected `trial` or `step`, got {other:?}")),
        }
    }
}

impl fmt::Display for SecantPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Trial => "trial",
            Self::Step => "step",
        })
    }
}

/// Every scalar the outer and inner loops need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Regularization weight of the gap function and residual.
    pub alpha: f64,
    /// Hyperplane acceptance level, in (0, 1).
    pub eta: f64,
    /// Line-search sufficient-decrease factor, in (0, 1).
    pub lambda: f64,
    /// Backtracking ratio, in (0, 1).
    pub beta: f64,
    /// Required merit reduction for a unit step, in (0, 1).
    pub gamma: f64,
    /// Cautious-update threshold coefficient.
    pub h: f64,
    /// Cautious-update threshold exponent on `μₖ`.
    pub r_exp: f64,
    /// Stop once the natural residual is at most this.
    pub tol: f64,
    /// `μₖ = mu_scale · ‖xₖ − H_α(xₖ)‖`.
    pub mu_scale: f64,
    pub rho: RhoSchedule,
    pub max_iter: usize,
    pub max_linesearch: usize,
    pub inner_tol_abs: f64,
    pub inner_max_iter: usize,
    pub qn_pair: SecantPair,
    /// Rescale `B` before quasi-Newton updates: `B₀ ← (yᵀy/yᵀs)·I` on the
    /// first accepted update, then `B ← min(1, yᵀs/sᵀBs)·B`.
    pub qn_scaling: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            eta: 0.3,
            lambda: 0.5,
            beta: 0.7,
            gamma: 0.5,
            h: 1e-5,
            r_exp: 1.0,
            tol: 1e-5,
            mu_scale: 0.01,
            rho: RhoSchedule::default(),
            max_iter: 2000,
            max_linesearch: 60,
            inner_tol_abs: 1e-10,
            inner_max_iter: 10_000,
            qn_pair: SecantPair::Trial,
            qn_scaling: true,
        }
    }
}

/// Every violated constraint of a [`SolverConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid solver configuration: {}", .violations.join("; "))]
pub struct InvalidConfig {
    pub violations: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ConfigParseError {
    #[error("line {line}: expected `key=value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: cannot parse value {value:?} for {key}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidConfig),
}

const KEYS: &[&str] = &[
    "alpha",
    "eta",
    "lambda",
    "beta",
    "gamma",
    "h",
    "r_exp",
    "tol",
    "mu_scale",
    "rho0",
    "rho_decay",
    "rho_min",
    "max_iter",
    "max_linesearch",
    "inner_tol_abs",
    "inner_max_iter",
    "qn_pair",
    "qn_scaling",
];

impl SolverConfig {
    /// Collects every constraint violation; `Ok` means the config is usable.
    pub fn validate(&self) -> Result<(), InvalidConfig> {
        let mut violations = Vec::new();
        let mut open_unit = |name: &str, v: f64| {
            if !(v > 0.0 && v < 1.0) {
                violations.push(format!("{name} must lie in (0,1)"));
            }
        };
        open_unit("eta", self.eta);
        open_unit("lambda", self.lambda);
        open_unit("beta", self.beta);
        open_unit("gamma", self.gamma);
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                violations.push(format!("{name} must be positive"));
            }
        };
        positive("alpha", self.alpha);
        positive("h", self.h);
        positive("r_exp", self.r_exp);
        positive("tol", self.tol);
        positive("mu_scale", self.mu_scale);
        positive("inner_tol_abs", self.inner_tol_abs);
        if !(self.rho.initial >= 0.0 && self.rho.initial < 1.0) {
            violations.push("rho0 must lie in [0,1)".into());
        }
        if !(self.rho.decay > 0.0 && self.rho.decay <= 1.0) {
            violations.push("rho_decay must lie in (0,1]".into());
        }
        if !(self.rho.floor >= 0.0 && self.rho.floor < 1.0) {
            violations.push("rho_min must lie in [0,1)".into());
        }
        for (name, v) in [
            ("max_iter", self.max_iter),
            ("max_linesearch", self.max_linesearch),
            ("inner_max_iter", self.inner_max_iter),
        ] {
            if v == 0 {
                violations.push(format!("{name} must be positive"));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(InvalidConfig { violations })
        }
    }

    /// Renders every field as `key=value`, one per line. Floats use the
    /// shortest representation that parses back to the same bits.
    pub fn to_key_value(&self) -> String {
        self.to_string()
    }

    /// Parses a flat `key=value` file on top of the defaults. Blank lines and
    /// `#` comments are ignored.
    pub fn from_key_value(text: &str) -> Result<Self, ConfigParseError> {
        let mut cfg = Self::default();
        cfg.apply_key_value(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies overrides from `key=value` text without validating.
    pub fn apply_key_value(&mut self, text: &str) -> Result<(), ConfigParseError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigParseError::Syntax {
                line,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigParseError> {
        fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, ConfigParseError> {
            value.parse().map_err(|_| ConfigParseError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "alpha" => self.alpha = parse(key, value, line)?,
            "eta" => self.eta = parse(key, value, line)?,
            "lambda" | "lambda_" => self.lambda = parse(key, value, line)?,
            "beta" => self.beta = parse(key, value, line)?,
            "gamma" => self.gamma = parse(key, value, line)?,
            "h" => self.h = parse(key, value, line)?,
            "r_exp" => self.r_exp = parse(key, value, line)?,
            "tol" => self.tol = parse(key, value, line)?,
            "mu_scale" => self.mu_scale = parse(key, value, line)?,
            "rho0" => self.rho.initial = parse(key, value, line)?,
            "rho_decay" => self.rho.decay = parse(key, value, line)?,
            "rho_min" => self.rho.floor = parse(key, value, line)?,
            "max_iter" => self.max_iter = parse(key, value, line)?,
            "max_linesearch" => self.max_linesearch = parse(key, value, line)?,
            "inner_tol_abs" => self.inner_tol_abs = parse(key, value, line)?,
            "inner_max_iter" => self.inner_max_iter = parse(key, value, line)?,
            "qn_pair" => self.qn_pair = parse(key, value, line)?,
            "qn_scaling" => self.qn_scaling = parse(key, value, line)?,
            _ => {
                return Err(ConfigParseError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Names accepted by [`SolverConfig::from_key_value`].
    pub fn keys() -> &'static [&'static str] {
        KEYS
    }
}

impl fmt::Display for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alpha={:e}", self.alpha)?;
        writeln!(f, "eta={:e}", self.eta)?;
        writeln!(f, "lambda={:e}", self.lambda)?;
        writeln!(f, "beta={:e}", self.beta)?;
        writeln!(f, "gamma={:e}", self.gamma)?;
        writeln!(f, "h={:e}", self.h)?;
        writeln!(f, "r_exp={:e}", self.r_exp)?;
        writeln!(f, "tol={:e}", self.tol)?;
        writeln!(f, "mu_scale={:e}", self.mu_scale)?;
        writeln!(f, "rho0={:e}", self.rho.initial)?;
        writeln!(f, "rho_decay={:e}", self.rho.decay)?;
        writeln!(f, "rho_min={:e}", self.rho.floor)?;
        writeln!(f, "max_iter={}", self.max_iter)?;
        writeln!(f, "max_linesearch={}", self.max_linesearch)?;
        writeln!(f, "inner_tol_abs={:e}", self.inner_tol_abs)?;
        writeln!(f, "inner_max_iter={}", self.inner_max_iter)?;
        writeln!(f, "qn_pair={}", self.qn_pair)?;
        writeln!(f, "qn_scaling={}", self.qn_scaling)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.alpha, 0.01);
        assert_eq!(cfg.eta, 0.3);
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.beta, 0.7);
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.h, 1e-5);
        assert_eq!(cfg.rho.raw(0), 0.0);
        assert_eq!(cfg.rho.effective(3), 1e-8);
        assert_eq!(cfg.mu_scale, 0.01);
        assert_eq!(cfg.tol, 1e-5);
    }

    #[test]
    fn open_interval_boundaries_rejected() {
        let cfg = SolverConfig {
            gamma: 1.0,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.violations, vec!["gamma must lie in (0,1)".to_string()]);

        let cfg = SolverConfig {
            beta: 0.0,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.violations, vec!["beta must lie in (0,1)".to_string()]);
    }

    #[test]
    fn reports_every_violation() {
        let cfg = SolverConfig {
            eta: 1.5,
            alpha: -1.0,
            max_iter: 0,
            ..Default::default()
        };
        assert_eq!(cfg.validate().unwrap_err().violations.len(), 3);
    }

    #[test]
    fn parses_overrides_and_comments() {
        let cfg = SolverConfig::from_key_value("# tuned\ntol = 1e-8\nlambda_=0.25\n\nmax_iter=50 # cap\n").unwrap();
        assert_eq!(cfg.tol, 1e-8);
        assert_eq!(cfg.lambda, 0.25);
        assert_eq!(cfg.max_iter, 50);
        assert_eq!(cfg.beta, 0.7);

        let plain = SolverConfig::from_key_value("qn_pair=step\nqn_scaling=false").unwrap();
        assert_eq!((plain.qn_pair, plain.qn_scaling), (SecantPair::Step, false));
        assert!(matches!(
            SolverConfig::from_key_value("qn_pair=both"),
            Err(ConfigParseError::BadValue { .. })
        ));
    }

    #[test]
    fn rejects_unknown_keys_and_invalid_values() {
        assert!(matches!(
            SolverConfig::from_key_value("omega=1"),
            Err(ConfigParseError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            SolverConfig::from_key_value("tol=abc"),
            Err(ConfigParseError::BadValue { .. })
        ));
        assert!(matches!(
            SolverConfig::from_key_value("gamma=2"),
            Err(ConfigParseError::Invalid(_))
        ));
        assert!(matches!(
            SolverConfig::from_key_value("gamma"),
            Err(ConfigParseError::Syntax { .. })
        ));
    }

    proptest! {
        #[test]
        fn key_value_round_trip_is_bit_exact(
            alpha in 1e-300f64..1e300,
            eta in 0.0f64..1.0,
            tol in any::<f64>().prop_filter("positive", |v| *v > 0.0 && v.is_finite()),
            rho_min in 0.0f64..1.0,
            max_iter in 1usize..1_000_000,
        ) {
            let cfg = SolverConfig { alpha, eta, tol, max_iter, rho: RhoSchedule { floor: rho_min, ..Default::default() }, ..Default::default() };
            let mut back = SolverConfig::default();
            back.apply_key_value(&cfg.to_key_value()).unwrap();
            prop_assert_eq!(back.alpha.to_bits(), cfg.alpha.to_bits());
            prop_assert_eq!(back.eta.to_bits(), cfg.eta.to_bits());
            prop_assert_eq!(back.tol.to_bits(), cfg.tol.to_bits());
            prop_assert_eq!(back.rho.floor.to_bits(), cfg.rho.floor.to_bits());
            prop_assert_eq!(back, cfg);
        }
    }
}
