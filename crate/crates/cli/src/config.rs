// SPDX-License-Identifier: Apache-2.0

//! Run settings: `key=value` config files, scale expressions, thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::CliError;

/// Keys accepted in a config file; the same spelling as the long flags.
pub const CONFIG_KEYS: &[&str] = &[
    "disc",
    "d-min",
    "d-max",
    "x",
    "x-cap",
    "x-rule",
    "t",
    "weight",
    "epsilon",
    "psi-value",
    "n-max",
    "format",
    "out",
    "threads",
    "sieve-cap",
    "max-class-number",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A scale `coef · h^e1 · (log|D|)^e2`, written like `h*log2`, `h2*log2`,
/// `100*h2*log2`, `h*log^2.1` or a bare number.
#[derive(Debug, Clone, PartialEq)]
pub struct Scale {
    pub coef: f64,
    pub h_exp: f64,
    pub log_exp: f64,
    text: String,
}

impl Scale {
    pub fn absolute(v: f64) -> Scale {
        Scale {
            coef: v,
            h_exp: 0.0,
            log_exp: 0.0,
            text: crate::report::format_sig(v, 12),
        }
    }

    pub fn eval(&self, h: usize, log_abs_d: f64) -> f64 {
        self.coef * (h as f64).powf(self.h_exp) * log_abs_d.powf(self.log_exp)
    }

    /// Smallest integer `X` with `{p < X} = {p < value}` for integers `p`.
    pub fn eval_int(&self, h: usize, log_abs_d: f64) -> u64 {
        let v = self.eval(h, log_abs_d).ceil();
        if v >= u64::MAX as f64 {
            u64::MAX
        } else {
            v as u64
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn exponent(rest: &str, whole: &str) -> Result<f64, String> {
    if rest.is_empty() {
        return Ok(1.0);
    }
    let rest = rest.strip_prefix('^').unwrap_or(rest);
    rest.parse::<f64>()
        .ok()
        .filter(|e| e.is_finite())
        .ok_or_else(|| format!("bad exponent in scale `{whole}`"))
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err("empty scale".into());
        }
        let mut scale = Scale {
            coef: 1.0,
            h_exp: 0.0,
            log_exp: 0.0,
            text: text.to_string(),
        };
        for tok in text.split('*').map(str::trim) {
            if let Some(rest) = tok.strip_prefix("log") {
                scale.log_exp += exponent(rest, text)?;
            } else if let Some(rest) = tok.strip_prefix('h') {
                scale.h_exp += exponent(rest, text)?;
            } else {
                let c: f64 = tok.parse().map_err(|_| format!("bad factor `{tok}` in scale `{text}`"))?;
                scale.coef *= c;
            }
        }
        if !(scale.coef.is_finite() && scale.coef > 0.0) {
            return Err(format!("scale `{text}` must be positive"));
        }
        Ok(scale)
    }
}

/// Parsed `key=value` config file. Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::BadInput(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::BadInput(format!("config line {}: unknown key `{key}`", lineno + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::BadInput(format!("cannot read config {}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::BadInput(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list value.
    pub fn get_list<T>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<T>()
                            .map_err(|e| CliError::BadInput(format!("config key `{key}`: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// Flag value if given, else the config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_list<T>(&self, flag: Vec<T>, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if flag.is_empty() {
            self.get_list(key)
        } else {
            Ok(Some(flag))
        }
    }

    pub fn format(&self, flag: Option<Format>) -> Result<Format, CliError> {
        match flag {
            Some(f) => Ok(f),
            None => match self.raw("format") {
                None => Ok(Format::default()),
                Some(v) => Format::from_str(v, true).map_err(|e| CliError::BadInput(format!("config key `format`: {e}"))),
            },
        }
    }
}

/// Settings shared by every subcommand after merging flags, config file and
/// defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub sieve_cap: u64,
    pub max_class_number: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: Format::Csv,
            out: None,
            threads: default_threads(),
            sieve_cap: classprime::sieve::DEFAULT_SIEVE_CAP,
            max_class_number: classprime::classgroup::DEFAULT_MAX_CLASS_NUMBER,
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
