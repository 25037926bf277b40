//! Tunable constants and the `key = value` text format that sets them.

use crate::error::ConfigError;
use crate::sampling::SamplingConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RouteMode {
    #[default]
    Accounting,
    Faithful,
}

impl std::str::FromStr for RouteMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "accounting" => Ok(RouteMode::Accounting),
            "faithful" => Ok(RouteMode::Faithful),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl std::fmt::Display for RouteMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RouteMode::Accounting => "accounting",
            RouteMode::Faithful => "faithful",
        })
    }
}

/// How the parallel per-component phase is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParallelMode {
    /// Bandwidth multiplier 2; the phase costs the slowest instance.
    #[default]
    DoubledBandwidth,
    /// Multiplier 1, rounds doubled.
    Serialized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    /// Bits per message unit are `c_b * ceil(log2 n)`.
    pub c_b: f64,
    /// Mixing acceptance threshold `c_mix (log2 n)^3`.
    pub c_mix: f64,
    /// Scale inside the mixing bound `walk_scale log2(n / pi_min) / gap`.
    pub walk_scale: f64,
    pub c_t: f64,
    pub c_load: f64,
    pub c_rt: f64,
    pub c_g: f64,
    pub c_dj: f64,
    pub c_oh: f64,
    pub c_dec: f64,
    pub c_id: f64,
    pub c_base: f64,
    /// Growth factor of the iteration schedule.
    pub growth: f64,
    /// Allowed fraction of inter-component edges.
    pub epsilon: f64,
    pub sampling: SamplingConstants,
    pub route_mode: RouteMode,
    pub parallel_mode: ParallelMode,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_b: 2.0,
            c_mix: 20.0,
            walk_scale: 1.0,
            c_t: 1.0,
            c_load: 4.0,
            c_rt: 1.0,
            c_g: 3.0,
            c_dj: 3.0,
            c_oh: 2.0,
            c_dec: 1.0,
            c_id: 1.0,
            c_base: 4.0,
            growth: 2.0,
            epsilon: 0.1,
            sampling: SamplingConstants::default(),
            route_mode: RouteMode::Accounting,
            parallel_mode: ParallelMode::DoubledBandwidth,
        }
    }
}

pub const CONSTANT_KEYS: &[&str] = &[
    "c_B",
    "c_mix",
    "walk_scale",
    "c_t",
    "c_load",
    "c_rt",
    "c_G",
    "c_dj",
    "c_oh",
    "c_dec",
    "c_id",
    "c_base",
    "growth",
    "epsilon",
    "lemma1_edges",
    "lemma1_degree",
    "lemma1_bound",
    "mode",
    "parallel",
];

impl Constants {
    /// Set a single constant by key; keys are case sensitive.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim();
        let value = value.trim();
        let bad = || ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "mode" => {
                self.route_mode = value.parse().map_err(|_| bad())?;
                return Ok(());
            }
            "parallel" => {
                self.parallel_mode = match value {
                    "doubled" => ParallelMode::DoubledBandwidth,
                    "serialized" => ParallelMode::Serialized,
                    _ => return Err(bad()),
                };
                return Ok(());
            }
            _ => {}
        }
        let x: f64 = value.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        let slot = match key {
            "c_B" => &mut self.c_b,
            "c_mix" => &mut self.c_mix,
            "walk_scale" => &mut self.walk_scale,
            "c_t" => &mut self.c_t,
            "c_load" => &mut self.c_load,
            "c_rt" => &mut self.c_rt,
            "c_G" => &mut self.c_g,
            "c_dj" => &mut self.c_dj,
            "c_oh" => &mut self.c_oh,
            "c_dec" => &mut self.c_dec,
            "c_id" => &mut self.c_id,
            "c_base" => &mut self.c_base,
            "growth" => &mut self.growth,
            "epsilon" => &mut self.epsilon,
            "lemma1_edges" => &mut self.sampling.c_edges,
            "lemma1_degree" => &mut self.sampling.c_degree,
            "lemma1_bound" => &mut self.sampling.c_bound,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        };
        *slot = x;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let named = [
            ("c_B", self.c_b),
            ("c_mix", self.c_mix),
            ("walk_scale", self.walk_scale),
            ("c_t", self.c_t),
            ("c_load", self.c_load),
            ("c_rt", self.c_rt),
            ("c_G", self.c_g),
            ("c_dj", self.c_dj),
            ("c_oh", self.c_oh),
            ("c_dec", self.c_dec),
            ("c_id", self.c_id),
            ("c_base", self.c_base),
            ("epsilon", self.epsilon),
            ("lemma1_edges", self.sampling.c_edges),
            ("lemma1_degree", self.sampling.c_degree),
            ("lemma1_bound", self.sampling.c_bound),
        ];
        for (k, v) in named {
            if v <= 0.0 {
                return Err(ConfigError::NonPositive(k.to_string()));
            }
        }
        if self.growth <= 1.0 {
            return Err(ConfigError::BadValue {
                key: "growth".to_string(),
                value: self.growth.to_string(),
            });
        }
        // Edge codes `u n + v` must fit in one message unit.
        if self.c_b < 2.0 {
            return Err(ConfigError::BadValue {
                key: "c_B".to_string(),
                value: format!("{} (at least 2 required)", self.c_b),
            });
        }
        Ok(())
    }

    /// `key=value;...` rendering of the numeric constants.
    pub fn describe(&self) -> String {
        format!(
            "c_B={};c_mix={};walk_scale={};c_t={};c_load={};c_rt={};c_G={};c_dj={};c_oh={};c_dec={};c_id={};c_base={};growth={};epsilon={}",
            self.c_b, self.c_mix, self.walk_scale, self.c_t, self.c_load, self.c_rt, self.c_g,
            self.c_dj, self.c_oh, self.c_dec, self.c_id, self.c_base, self.growth, self.epsilon
        )
    }
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                msg: "empty key".to_string(),
            });
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses an override of the form `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Syntax {
            line: 0,
            msg: format!("expected key=value, got `{s}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_bandwidth_is_rejected() {
        let mut c = Constants::default();
        c.set("c_B", "1.5").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn set_and_validate() {
        let mut c = Constants::default();
        c.set("c_t", "30").unwrap();
        c.set("mode", "faithful").unwrap();
        c.set("lemma1_edges", "1").unwrap();
        assert_eq!(c.c_t, 30.0);
        assert_eq!(c.route_mode, RouteMode::Faithful);
        assert_eq!(c.sampling.c_edges, 1.0);
        assert!(matches!(c.set("nope", "1"), Err(ConfigError::UnknownKey(_))));
        assert!(c.set("c_t", "abc").is_err());
        c.set("c_load", "0").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::NonPositive(_))));
    }

    #[test]
    fn key_value_lines() {
        let kv = parse_key_values("# header\nc_t = 2  # inline\n\nsizes=256,512\n").unwrap();
        assert_eq!(kv.len(), 2);
        assert_eq!(kv[0], (2, "c_t".to_string(), "2".to_string()));
        assert!(parse_key_values("novalue\n").is_err());
        assert!(parse_key_values("=3\n").is_err());
    }
}
