//! Config-file defaults: a JSON object whose keys mirror the long flags of
//! the chosen subcommand. Its entries are spliced in front of the command
//! line arguments, so explicit flags override them.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Splits `--config PATH` / `--config=PATH` out of `argv`.
pub fn take_config(argv: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let mut found = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--" {
            break;
        }
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err(CliError::Usage("--config needs a path".into()));
            }
            found = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            found = Some(p.to_owned());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Flags equivalent to the config object, in key order.
pub fn config_flags(value: &Value) -> Result<Vec<String>, CliError> {
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Usage("config file must hold a JSON object".into()))?;
    let mut out = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => {
                out.push(flag);
                out.push(n.to_string());
            }
            Value::String(s) => {
                out.push(flag);
                out.push(s.clone());
            }
            Value::Array(items) => {
                let parts: Result<Vec<String>, CliError> = items
                    .iter()
                    .map(|x| match x {
                        Value::Number(n) => Ok(n.to_string()),
                        Value::String(s) => Ok(s.clone()),
                        _ => Err(CliError::Usage(format!("config key {key}: unsupported list item"))),
                    })
                    .collect();
                out.push(flag);
                out.push(parts?.join(","));
            }
            Value::Object(_) => return Err(CliError::Usage(format!("config key {key}: nested objects unsupported"))),
        }
    }
    Ok(out)
}

/// Index of the subcommand token: the first argument after the program
/// name that is not a flag.
fn subcommand_index(argv: &[String]) -> Option<usize> {
    argv.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1)
}

/// Reads the config file and splices its flags right after the subcommand.
pub fn apply(argv: &mut Vec<String>, path: &str) -> Result<(), CliError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| CliError::Io(path.into(), e))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let flags = config_flags(&value)?;
    let at = subcommand_index(argv).ok_or_else(|| CliError::Usage("config given without a subcommand".into()))?;
    argv.splice(at + 1..at + 1, flags);
    Ok(())
}
