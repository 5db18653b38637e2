//! `key = value` configuration files for `sweep`.
//!
//! Keys are the long flag names, with `-` or `_`. Blank lines and lines
//! starting with `#` are skipped. Boolean flags take `true` or `false`.

use std::ffi::OsString;

const VALUED: [&str; 15] = [
    "scheme",
    "mt",
    "mr",
    "snr-db",
    "theta",
    "theta-log",
    "power",
    "trials",
    "seed",
    "out",
    "format",
    "bandwidth-hz",
    "frame-s",
    "jobs",
    "config",
];
const SWITCHES: [&str; 2] = ["mc", "asymptotes"];

fn flag_given(cli: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    cli.iter().any(|a| {
        let a = a.to_string_lossy();
        a == long || a.starts_with(&format!("{long}="))
    })
}

/// Converts the file to flags placed before the command-line ones. `theta`
/// and `theta-log` exclude each other, so a file value for either is dropped
/// when the command line sets one of them.
pub fn to_args(text: &str, cli: &[OsString]) -> Result<Vec<String>, String> {
    let theta_on_cli = flag_given(cli, "theta") || flag_given(cli, "theta-log");
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!("line {}: nested config files are not supported", n + 1));
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                _ => return Err(format!("line {}: {key} must be true or false", n + 1)),
            }
        } else if VALUED.contains(&key.as_str()) {
            if theta_on_cli && (key == "theta" || key == "theta-log") {
                continue;
            }
            out.push(format!("--{key}={value}"));
        } else {
            return Err(format!("line {}: unknown key `{key}`", n + 1));
        }
    }
    Ok(out)
}
