//! Built-in environments, the subprocess adapter, and the name registry.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::env::{EnvError, Environment};

pub mod adapter;
pub mod dead_start;
pub mod freeze_frames;
pub mod mod_rotator;
pub mod paddle_mini;
pub mod server;
pub mod uniform_tree;

pub use adapter::AdapterEnv;
pub use dead_start::DeadStart;
pub use freeze_frames::FreezeFrames;
pub use mod_rotator::ModRotator;
pub use paddle_mini::PaddleMini;
pub use uniform_tree::UniformTree;

/// Names accepted by [`make_env`] without an external process.
pub const BUILTIN_ENVS: [&str; 5] = [
    "dead_start",
    "freeze_frames",
    "mod_rotator",
    "paddle_mini",
    "uniform_tree",
];

#[derive(Debug, Error)]
pub enum MakeEnvError {
    #[error("unknown environment '{0}'")]
    UnknownEnv(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Parses `key=value` strings into a parameter map, rejecting duplicates.
pub fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, String>, MakeEnvError> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| MakeEnvError::BadParams(format!("expected key=value, got '{pair}'")))?;
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(MakeEnvError::BadParams(format!("duplicate parameter '{k}'")));
        }
    }
    Ok(map)
}

/// Builds an environment by registry name.
///
/// Unrecognized parameter keys are rejected rather than ignored so typos
/// surface immediately.
pub fn make_env(
    name: &str,
    params: &BTreeMap<String, String>,
) -> Result<Box<dyn Environment>, MakeEnvError> {
    match name {
        "uniform_tree" => {
            ensure_known(params, &["b"])?;
            Ok(Box::new(UniformTree::new(parse_int(params, "b", 2)?)?))
        }
        "mod_rotator" => {
            ensure_known(params, &["m"])?;
            Ok(Box::new(ModRotator::new(parse_int(params, "m", 4)?)?))
        }
        "paddle_mini" => {
            ensure_known(params, &["core_only"])?;
            Ok(Box::new(PaddleMini::new(parse_bool(params, "core_only", false)?)))
        }
        "freeze_frames" => {
            ensure_known(params, &["k", "m", "a"])?;
            Ok(Box::new(FreezeFrames::new(
                parse_int(params, "k", 2)?,
                parse_int(params, "m", 4)?,
                parse_int(params, "a", 2)?,
            )?))
        }
        "dead_start" => {
            ensure_known(params, &["dead_steps"])?;
            Ok(Box::new(DeadStart::new(parse_int(params, "dead_steps", 1)?)))
        }
        "adapter" => {
            ensure_known(params, &["cmd", "timeout_ms"])?;
            let cmd = params
                .get("cmd")
                .ok_or_else(|| MakeEnvError::BadParams("adapter requires cmd=<command>".into()))?;
            let timeout_ms: u64 = parse_int(params, "timeout_ms", 10_000)?;
            Ok(Box::new(AdapterEnv::connect_with_timeout(
                cmd,
                std::time::Duration::from_millis(timeout_ms),
            )?))
        }
        other => Err(MakeEnvError::UnknownEnv(other.to_string())),
    }
}

fn ensure_known(params: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), MakeEnvError> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(MakeEnvError::BadParams(format!(
                "unknown parameter '{key}' (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn parse_int<T: std::str::FromStr>(
    params: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, MakeEnvError> {
    match params.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse()
            .map_err(|_| MakeEnvError::BadParams(format!("parameter '{key}': invalid value '{raw}'"))),
    }
}

fn parse_bool(
    params: &BTreeMap<String, String>,
    key: &str,
    default: bool,
) -> Result<bool, MakeEnvError> {
    match params.get(key).map(String::as_str) {
        None => Ok(default),
        Some("true") | Some("1") => Ok(true),
        Some("false") | Some("0") => Ok(false),
        Some(raw) => Err(MakeEnvError::BadParams(format!(
            "parameter '{key}': expected true/false, got '{raw}'"
        ))),
    }
}
