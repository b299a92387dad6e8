//! Flat `key = value` configuration documents.
//!
//! ```text
//! # balanced selection, hot pointer
//! system.phi = 0.05
//! pointer.z = 0.9
//! coupling.k2 = 0.0095
//! basis = q
//! sweep.axes.z = 0, 0.5, 0.9
//! sweep.outputs = A_m, ratio_q_closed
//! ```
//!
//! Angles are radians; `pi` may appear as `pi`, `-pi/2`, `3*pi/4` or `3pi/4`.
//! Lists are comma separated, optionally wrapped in brackets.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use wma_core::model::{AngleConvention, Basis, Scenario, SystemSpec, ThermalPointer, Z_MAX};

use crate::error::{Error, Result};
use crate::sweep::{Output, SweepSpec, DEFAULT_MAX_POINTS};

/// Scenario parameter addressable by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Z,
    Sigma,
    Chi,
    K2,
    ThetaI,
    ThetaF,
    Phi,
    A1,
    A2,
}

impl Param {
    pub const ALL: [Param; 9] = [
        Param::Z,
        Param::Sigma,
        Param::Chi,
        Param::K2,
        Param::ThetaI,
        Param::ThetaF,
        Param::Phi,
        Param::A1,
        Param::A2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Z => "z",
            Param::Sigma => "sigma",
            Param::Chi => "chi",
            Param::K2 => "k2",
            Param::ThetaI => "theta_i",
            Param::ThetaF => "theta_f",
            Param::Phi => "phi",
            Param::A1 => "a1",
            Param::A2 => "a2",
        }
    }

    /// Checks a single value against the parameter's domain.
    pub fn check(self, value: f64) -> std::result::Result<(), String> {
        if !value.is_finite() {
            return Err(format!("{} must be finite, got {value}", self.name()));
        }
        match self {
            Param::Z if !(0.0..=Z_MAX).contains(&value) => {
                Err(format!("z must lie in [0, {Z_MAX}], got {value}"))
            }
            Param::Sigma if value <= 0.0 => Err(format!("sigma must be positive, got {value}")),
            Param::K2 if value < 0.0 => Err(format!("k2 must be non-negative, got {value}")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Chi(f64),
    /// Weakness `k²`; the coupling is solved per scenario as the
    /// non-negative root.
    K2(f64),
}

/// Unvalidated-as-a-whole scenario parameters; each field is individually
/// in domain, but combinations such as `a1 = a2` are only caught by
/// [`ScenarioParams::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub a1: f64,
    pub a2: f64,
    pub theta_i: f64,
    pub phi: f64,
    pub theta_f: f64,
    pub convention: AngleConvention,
    pub z: f64,
    pub sigma: f64,
    pub coupling: Coupling,
    pub basis: Basis,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            a1: 1.0,
            a2: -1.0,
            theta_i: FRAC_PI_4,
            phi: 0.0,
            theta_f: -FRAC_PI_4,
            convention: AngleConvention::Amplitude,
            z: 0.0,
            sigma: 1.0,
            coupling: Coupling::Chi(0.0),
            basis: Basis::Q,
        }
    }
}

impl ScenarioParams {
    pub fn set(&mut self, param: Param, value: f64) {
        match param {
            Param::Z => self.z = value,
            Param::Sigma => self.sigma = value,
            Param::Chi => self.coupling = Coupling::Chi(value),
            Param::K2 => self.coupling = Coupling::K2(value),
            Param::ThetaI => self.theta_i = value,
            Param::ThetaF => self.theta_f = value,
            Param::Phi => self.phi = value,
            Param::A1 => self.a1 = value,
            Param::A2 => self.a2 = value,
        }
    }

    pub fn build(&self) -> wma_core::Result<Scenario> {
        let system = SystemSpec::with_convention(
            self.a1,
            self.a2,
            self.theta_i,
            self.phi,
            self.theta_f,
            self.convention,
        )?;
        let pointer = ThermalPointer::new(self.z, self.sigma)?;
        match self.coupling {
            Coupling::Chi(chi) => Scenario::new(system, pointer, chi, self.basis),
            Coupling::K2(k2) => Scenario::with_k2(system, pointer, k2, self.basis),
        }
    }
}

/// A parsed document: a single scenario, or a sweep around one.
#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Single(ScenarioParams),
    Sweep(SweepSpec),
}

impl Config {
    pub fn base(&self) -> &ScenarioParams {
        match self {
            Config::Single(p) => p,
            Config::Sweep(s) => &s.base,
        }
    }

    /// The base scenario, validated.
    pub fn scenario(&self) -> Result<Scenario> {
        self.base().build().map_err(|e| Error::Domain {
            line: 0,
            key: "scenario".into(),
            message: e.to_string(),
        })
    }
}

/// Parses a real number or a multiple of pi.
pub fn parse_real(token: &str) -> std::result::Result<f64, String> {
    let t = token.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim_start()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let bad = || format!("`{token}` is not a number or multiple of pi");
    let at = body.find("pi").ok_or_else(bad)?;
    let coefficient = match body[..at].trim().trim_end_matches('*').trim() {
        "" => 1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match body[at + 2..].trim() {
        "" => 1.0,
        rest => rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if divisor == 0.0 {
        return Err(bad());
    }
    Ok(sign * coefficient * PI / divisor)
}

fn parse_list(value: &str) -> Vec<&str> {
    let inner = value.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .unwrap_or(inner);
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses a configuration document.
///
/// Any `sweep.*` key turns the document into a sweep; otherwise it describes
/// a single scenario. Defaults: `sigma = 1`, `z = 0`, `phi = 0`, `a = ±1`,
/// `theta = ±pi/4` under the amplitude convention, basis Q, `chi = 0`.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut params = ScenarioParams::default();
    let mut axes: Vec<(Param, Vec<f64>)> = Vec::new();
    let mut outputs: Option<Vec<Output>> = None;
    let mut max_points = DEFAULT_MAX_POINTS;
    let mut is_sweep = false;
    let mut seen = HashSet::new();
    let mut coupling_line = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Syntax {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let key_err = |message: String| Error::Key {
            line,
            key: key.to_string(),
            message,
        };
        let domain_err = |message: String| Error::Domain {
            line,
            key: key.to_string(),
            message,
        };
        if key.is_empty() {
            return Err(Error::Syntax {
                line,
                message: "missing key".into(),
            });
        }
        if value.is_empty() {
            return Err(key_err("missing value".into()));
        }
        if !seen.insert(key.to_string()) {
            return Err(key_err("duplicate key".into()));
        }

        let scalar = |param: Param| -> Result<f64> {
            let v = parse_real(value).map_err(key_err)?;
            param.check(v).map_err(domain_err)?;
            Ok(v)
        };

        match key {
            "system.a1" => params.a1 = scalar(Param::A1)?,
            "system.a2" => params.a2 = scalar(Param::A2)?,
            "system.theta_i" => params.theta_i = scalar(Param::ThetaI)?,
            "system.theta_f" => params.theta_f = scalar(Param::ThetaF)?,
            "system.phi" => params.phi = scalar(Param::Phi)?,
            "system.angle_convention" => {
                params.convention = match value.to_ascii_lowercase().as_str() {
                    "amplitude" => AngleConvention::Amplitude,
                    "bloch" => AngleConvention::Bloch,
                    _ => return Err(key_err(format!("expected `amplitude` or `bloch`, got `{value}`"))),
                }
            }
            "pointer.z" => params.z = scalar(Param::Z)?,
            "pointer.sigma" => params.sigma = scalar(Param::Sigma)?,
            "coupling.chi" | "coupling.k2" => {
                if let Some(first) = coupling_line {
                    return Err(key_err(format!("coupling already given on line {first}")));
                }
                coupling_line = Some(line);
                params.coupling = if key == "coupling.chi" {
                    Coupling::Chi(scalar(Param::Chi)?)
                } else {
                    Coupling::K2(scalar(Param::K2)?)
                };
            }
            "basis" => {
                params.basis = match value.to_ascii_lowercase().as_str() {
                    "p" => Basis::P,
                    "q" => Basis::Q,
                    _ => return Err(key_err(format!("expected `p` or `q`, got `{value}`"))),
                }
            }
            "sweep.outputs" => {
                is_sweep = true;
                let cols = parse_list(value)
                    .into_iter()
                    .map(|c| c.parse::<Output>().map_err(key_err))
                    .collect::<Result<Vec<_>>>()?;
                if cols.is_empty() {
                    return Err(key_err("no output columns".into()));
                }
                outputs = Some(cols);
            }
            "sweep.max_points" => {
                is_sweep = true;
                max_points = value
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| key_err(format!("expected a positive integer, got `{value}`")))?;
            }
            _ => {
                let Some(name) = key.strip_prefix("sweep.axes.") else {
                    return Err(key_err("unknown key".into()));
                };
                is_sweep = true;
                let param = name.parse::<Param>().map_err(key_err)?;
                let values = parse_list(value)
                    .into_iter()
                    .map(|tok| {
                        let v = parse_real(tok).map_err(key_err)?;
                        param.check(v).map_err(domain_err)?;
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if values.is_empty() {
                    return Err(key_err("empty axis".into()));
                }
                axes.push((param, values));
            }
        }
    }

    if !is_sweep {
        return Ok(Config::Single(params));
    }
    let outputs = outputs.unwrap_or_else(|| Output::ALL.to_vec());
    let spec = SweepSpec::new(params, axes, outputs)?.with_max_points(max_points)?;
    Ok(Config::Sweep(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_angles() {
        for (tok, want) in [
            ("pi/4", FRAC_PI_4),
            ("-pi/4", -FRAC_PI_4),
            ("pi", PI),
            ("3*pi/4", 0.75 * PI),
            ("3pi/4", 0.75 * PI),
            ("- pi / 2", -0.5 * PI),
            ("0.05", 0.05),
            ("-1e-3", -1e-3),
        ] {
            assert_eq!(parse_real(tok).unwrap(), want, "{tok}");
        }
        for tok in ["pie", "pi/0", "pi/x", "x*pi", "", "pi4"] {
            assert!(parse_real(tok).is_err(), "{tok}");
        }
    }

    #[test]
    fn empty_document_is_the_default_scenario() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, Config::Single(ScenarioParams::default()));
        let sc = cfg.scenario().unwrap();
        assert!((sc.system.r() - 0.5).abs() < 1e-15 && (sc.system.t() + 0.5).abs() < 1e-15);
        assert_eq!(sc.basis, Basis::Q);
        assert_eq!(sc.chi, 0.0);
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("# header\n\n  pointer.z = 0.5   # hot\nbasis = P\n").unwrap();
        assert_eq!(cfg.base().z, 0.5);
        assert_eq!(cfg.base().basis, Basis::P);
    }

    #[test]
    fn out_of_domain_z_names_the_key() {
        let err = parse_config("pointer.sigma = 2\npointer.z = 1.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Domain { line: 2, .. }), "{err:?}");
        assert!(msg.contains("pointer.z") && msg.contains("z must lie"), "{msg}");
    }

    #[test]
    fn errors_carry_line_and_key() {
        let cases = [
            ("pointer.z = 0\nbogus.key = 1\n", 2, "bogus.key"),
            ("system.phi = one\n", 1, "system.phi"),
            ("coupling.chi = 0.1\ncoupling.k2 = 0.01\n", 2, "coupling.k2"),
            ("pointer.z = 0\npointer.z = 0.1\n", 2, "pointer.z"),
            ("sweep.axes.omega = 1\n", 1, "sweep.axes.omega"),
            ("sweep.outputs = A_m, bogus\n", 1, "sweep.outputs"),
        ];
        for (doc, line, key) in cases {
            let msg = parse_config(doc).unwrap_err().to_string();
            assert!(
                msg.starts_with(&format!("line {line}:")) && msg.contains(key),
                "{msg}"
            );
        }
        let msg = parse_config("\n\njust words\n").unwrap_err().to_string();
        assert!(msg.starts_with("line 3:"), "{msg}");
    }

    #[test]
    fn axes_form_a_grid() {
        let cfg = parse_config("sweep.axes.z = [0, 0.5, 0.9]\nsweep.axes.phi = 0.05, pi/2\n").unwrap();
        let Config::Sweep(spec) = cfg else {
            panic!("expected a sweep")
        };
        assert_eq!(spec.len(), 6);
        assert_eq!(spec.outputs, Output::ALL.to_vec());
    }

    #[test]
    fn k2_coupling_is_solved_per_scenario() {
        let cfg = parse_config("pointer.z = 0.9\ncoupling.k2 = 0.0095\n").unwrap();
        let sc = cfg.scenario().unwrap();
        assert!((sc.k2() - 0.0095).abs() < 1e-15);
    }

    #[test]
    fn degenerate_observable_is_reported_on_build() {
        let cfg = parse_config("system.a1 = 1\nsystem.a2 = 1\n").unwrap();
        assert!(cfg.scenario().is_err());
    }
}
