//! Line-oriented `key = value` configuration files. Flags always override
//! file values; unknown keys and malformed numbers are usage errors that
//! list the accepted keys.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::{CliError, CommonArgs};

pub const VALID_KEYS: [&str; 11] = [
    "model", "omega", "k1", "k2", "sign1", "sign2", "n", "d2", "format", "output", "tol",
];

/// Parse a config file into a key -> value map, validating key names.
pub fn parse_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config file {}:{}: expected `key = value`, got `{raw}`",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if !VALID_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "config file {}:{}: unknown key `{key}`; valid keys are: {}",
                path.display(),
                lineno + 1,
                VALID_KEYS.join(", ")
            )));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("config key `{key}`: invalid number `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("config key `{key}`: invalid integer `{value}`")))
}

/// Fill in any option of `args` that was not set on the command line.
pub fn merge(args: &mut CommonArgs, path: &Path) -> Result<(), CliError> {
    let map = parse_file(path)?;
    for (key, value) in &map {
        match key.as_str() {
            "model" => {
                if args.model.is_none() {
                    args.model = Some(value.clone());
                }
            }
            "omega" => {
                if args.omega.is_none() {
                    args.omega = Some(parse_f64(key, value)?);
                }
            }
            "k1" => {
                if args.k1.is_none() {
                    args.k1 = Some(parse_f64(key, value)?);
                }
            }
            "k2" => {
                if args.k2.is_none() {
                    args.k2 = Some(parse_f64(key, value)?);
                }
            }
            "sign1" => {
                if args.sign1.is_none() {
                    args.sign1 = Some(value.clone());
                }
            }
            "sign2" => {
                if args.sign2.is_none() {
                    args.sign2 = Some(value.clone());
                }
            }
            "n" => {
                if args.n.is_none() {
                    args.n = Some(parse_usize(key, value)?);
                }
            }
            "d2" => {
                if args.d2.is_none() {
                    args.d2 = Some(parse_f64(key, value)?);
                }
            }
            "format" => {
                if args.format.is_none() {
                    args.format = Some(value.clone());
                }
            }
            "output" => {
                if args.output.is_none() {
                    args.output = Some(PathBuf::from(value));
                }
            }
            "tol" => {
                if args.tol.is_none() {
                    args.tol = Some(parse_f64(key, value)?);
                }
            }
            _ => unreachable!("key validated above"),
        }
    }
    Ok(())
}
