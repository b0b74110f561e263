//! `key=value` configuration files.
//!
//! Each key names a long flag of the subcommand. The pairs are spliced into
//! the argument list directly after the subcommand name, ahead of the flags
//! typed by the user, and since every flag overrides earlier occurrences of
//! itself the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Subcommand names, used to locate the splice point.
pub const SUBCOMMANDS: &[&str] = &["clone", "sweep", "average", "optimize-gain", "mc", "verify"];

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value", i + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key {:?}", i + 1, k.trim())));
        }
        out.push((key, v.trim().to_owned()));
    }
    Ok(out)
}

/// Converts pairs to flags; `true`/`false` switch boolean flags.
pub fn to_flags(pairs: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => out.push(format!("--{k}={v}").into()),
        }
    }
    out
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Returns `args` with the configuration file, if any, spliced in.
pub fn expand(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(Path::new(&path), e))?;
    let flags = to_flags(&parse(&text)?);
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let p = parse("# header\n tau1 = 0.3\n\nprop=paper # trailing\nboth_modes=true\n").unwrap();
        assert_eq!(
            p,
            vec![
                ("tau1".into(), "0.3".into()),
                ("prop".into(), "paper".into()),
                ("both-modes".into(), "true".into())
            ]
        );
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(matches!(parse("tau1 0.3"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_from_pairs() {
        let f = to_flags(&[("eta".into(), "0.5".into()), ("timing".into(), "false".into()), ("vacuum".into(), "true".into())]);
        assert_eq!(f, vec![OsString::from("--eta=0.5"), OsString::from("--vacuum")]);
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.cfg");
        fs::write(&file, "eta=0.5\n").unwrap();
        let args: Vec<OsString> = vec!["linclone".into(), "--config".into(), file.clone().into(), "clone".into(), "--vacuum".into()];
        let out = expand(args).unwrap();
        let s: Vec<_> = out.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert_eq!(s[3..], ["clone", "--eta=0.5", "--vacuum"]);
    }
}
