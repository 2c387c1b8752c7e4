//! Server side of the line protocol: exposes any [`Environment`] to an
//! external client, one request per line.
//!
//! This is what `branchscope serve` runs over stdin/stdout. The loop is
//! generic over the streams so tests can drive it in memory.

use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;

use crate::env::{Environment, StateKey};

/// Fault-injection knobs for the serve loop.
///
/// With `init_override` set, every `INIT` after the first
/// `init_override_after` requests is answered with the override key instead
/// of the environment's real initial state. This simulates an emulator whose
/// reset is unreliable, which is exactly the failure mode the validator is
/// meant to catch.
#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    pub init_override: Option<StateKey>,
    pub init_override_after: u64,
}

/// Serves `env` until `QUIT` or end of input. Protocol errors are reported
/// to the client as `ERR <msg>` lines; only I/O failures end the loop early.
pub fn serve(
    env: &mut dyn Environment,
    options: &ServeOptions,
    input: impl BufRead,
    mut output: impl Write,
) -> std::io::Result<()> {
    let mut init_count = 0u64;
    for line in input.lines() {
        let line = line?;
        let reply = respond(env, options, &mut init_count, &line);
        writeln!(output, "{reply}")?;
        output.flush()?;
        if line.trim() == "QUIT" {
            break;
        }
    }
    Ok(())
}

fn respond(
    env: &mut dyn Environment,
    options: &ServeOptions,
    init_count: &mut u64,
    line: &str,
) -> String {
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some("INFO"), None, _) => {
            let desc = env.descriptor();
            format!(
                "OK {} {} {}",
                desc.num_actions, desc.noop_action.0, desc.state_key_len
            )
        }
        (Some("INIT"), None, _) => {
            *init_count += 1;
            let root = match &options.init_override {
                Some(key) if *init_count > options.init_override_after => Ok(key.clone()),
                _ => env.initial_state(),
            };
            match root {
                Ok(key) => format!("OK {}", B64.encode(key.as_bytes())),
                Err(e) => format!("ERR {e}"),
            }
        }
        (Some("SUCC"), Some(state), None) => match B64.decode(state) {
            Ok(bytes) => match env.successors(&StateKey::new(bytes)) {
                Ok(succ) => {
                    let mut reply = String::from("OK");
                    for key in &succ {
                        reply.push(' ');
                        reply.push_str(&B64.encode(key.as_bytes()));
                    }
                    reply
                }
                Err(e) => format!("ERR {e}"),
            },
            Err(e) => format!("ERR bad base64: {e}"),
        },
        (Some("QUIT"), None, _) => "OK".into(),
        _ => format!("ERR unknown request '{line}'"),
    }
}
