//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "pump.tau_fund_ps",
    "pump.beam_fwhm_mm",
    "pump.lambda_nm",
    "filter.fwhm_nm",
    "filter.pinhole_diameter_um",
    "filter.focal_mm",
    "align.mu_A",
    "align.optimize",
    "trigger.mu_t",
    "trigger.kappa_ratio",
    "grid.n",
    "grid.rule",
    "chain.visibility",
    "chain.tau_convention",
    "chain.p_temp_override",
    "chain.p_sp_override",
    "dump.kernel",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    /// value and the line it came from (0 for values set programmatically)
    entries: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {line_no}: unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(CliError::Config(format!("line {line_no}: key `{key}` has no value")));
            }
            if let Some((_, first)) = cfg.entries.get(key) {
                return Err(CliError::Config(format!("line {line_no}: key `{key}` already set on line {first}")));
            }
            cfg.entries.insert(key.to_string(), (value.to_string(), line_no));
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), (value.into(), 0));
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| {
                let at = if *line > 0 { format!("line {line}: ") } else { String::new() };
                CliError::Config(format!("{at}cannot parse value `{v}` of key `{key}`"))
            }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}
