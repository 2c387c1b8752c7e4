//! Client side of the line protocol for external emulators.
//!
//! The adapter speaks newline-delimited text over a child process's
//! stdin/stdout. Requests are `INFO`, `INIT`, `SUCC <state_b64>` and `QUIT`;
//! every reply starts with `OK` (followed by the payload) or `ERR <msg>`.
//! Responses are cached per key within a run, so a well-behaved emulator is
//! asked about each state at most once per enumeration.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;

use crate::env::{ActionId, EnvDescriptor, EnvError, Environment, StateKey};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

pub struct AdapterEnv {
    desc: EnvDescriptor,
    command: Vec<String>,
    timeout: Duration,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    succ_cache: HashMap<StateKey, Vec<StateKey>>,
    init_cache: Option<StateKey>,
    root_override: Option<StateKey>,
}

impl AdapterEnv {
    /// Spawns `command` (split on whitespace) and performs the `INFO`
    /// handshake.
    pub fn connect(command: &str) -> Result<Self, EnvError> {
        Self::connect_with_timeout(command, DEFAULT_TIMEOUT)
    }

    pub fn connect_with_timeout(command: &str, timeout: Duration) -> Result<Self, EnvError> {
        let argv: Vec<String> = command.split_whitespace().map(str::to_string).collect();
        Self::spawn(argv, timeout)
    }

    fn spawn(argv: Vec<String>, timeout: Duration) -> Result<Self, EnvError> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| EnvError::AdapterFailure("empty adapter command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| EnvError::AdapterFailure(format!("failed to spawn '{program}': {e}")))?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");

        let (tx, lines) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });

        let mut adapter = AdapterEnv {
            desc: EnvDescriptor {
                name: "adapter".into(),
                num_actions: 0,
                noop_action: ActionId(0),
                state_key_len: 0,
                has_controller_state: false,
            },
            command: argv.clone(),
            timeout,
            child,
            stdin,
            lines,
            succ_cache: HashMap::new(),
            init_cache: None,
            root_override: None,
        };
        adapter.handshake()?;
        Ok(adapter)
    }

    fn handshake(&mut self) -> Result<(), EnvError> {
        let fields = self.request("INFO")?;
        if fields.len() != 3 {
            return Err(EnvError::AdapterFailure(format!(
                "INFO expects 3 fields, got {}",
                fields.len()
            )));
        }
        let parse = |what: &str, raw: &str| -> Result<usize, EnvError> {
            raw.parse()
                .map_err(|_| EnvError::AdapterFailure(format!("INFO {what} field '{raw}' is not a number")))
        };
        self.desc.num_actions = parse("num_actions", &fields[0])?;
        self.desc.noop_action = ActionId(parse("noop_index", &fields[1])?);
        self.desc.state_key_len = parse("state_len", &fields[2])?;
        self.desc.validate()
    }

    /// Sends one request line and returns the whitespace-split payload of
    /// its `OK` reply.
    fn request(&mut self, line: &str) -> Result<Vec<String>, EnvError> {
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| EnvError::AdapterFailure(format!("write failed: {e}")))?;
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(EnvError::AdapterFailure(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(EnvError::AdapterFailure(format!(
                    "no response within {:?}",
                    self.timeout
                )))
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(EnvError::AdapterFailure("adapter exited early".into()))
            }
        };
        let mut tokens = reply.split_whitespace().map(str::to_string);
        match tokens.next().as_deref() {
            Some("OK") => Ok(tokens.collect()),
            Some("ERR") => Err(EnvError::AdapterFailure(format!(
                "adapter error: {}",
                tokens.collect::<Vec<_>>().join(" ")
            ))),
            _ => Err(EnvError::AdapterFailure(format!("malformed reply '{reply}'"))),
        }
    }

    fn decode_state(&self, token: &str) -> Result<StateKey, EnvError> {
        let bytes = B64
            .decode(token)
            .map_err(|e| EnvError::AdapterFailure(format!("bad base64 in reply: {e}")))?;
        if bytes.len() != self.desc.state_key_len {
            return Err(EnvError::MalformedState {
                expected: self.desc.state_key_len,
                actual: bytes.len(),
            });
        }
        Ok(StateKey::new(bytes))
    }
}

impl Environment for AdapterEnv {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        if let Some(root) = &self.root_override {
            return Ok(root.clone());
        }
        if let Some(root) = &self.init_cache {
            return Ok(root.clone());
        }
        let fields = self.request("INIT")?;
        if fields.len() != 1 {
            return Err(EnvError::AdapterFailure(format!(
                "INIT expects 1 state, got {}",
                fields.len()
            )));
        }
        let root = self.decode_state(&fields[0])?;
        self.init_cache = Some(root.clone());
        Ok(root)
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        crate::env::check_key_len(&self.desc, state)?;
        if let Some(cached) = self.succ_cache.get(state) {
            return Ok(cached.clone());
        }
        let fields = self.request(&format!("SUCC {}", B64.encode(state.as_bytes())))?;
        if fields.len() != self.desc.num_actions {
            return Err(EnvError::AdapterFailure(format!(
                "SUCC expects {} states, got {}",
                self.desc.num_actions,
                fields.len()
            )));
        }
        let succ = fields
            .iter()
            .map(|tok| self.decode_state(tok))
            .collect::<Result<Vec<_>, _>>()?;
        self.succ_cache.insert(state.clone(), succ.clone());
        Ok(succ)
    }

    fn begin_run(&mut self) {
        self.succ_cache.clear();
        self.init_cache = None;
    }

    fn warm_step(&mut self, action: ActionId) -> Result<StateKey, EnvError> {
        let root = self.initial_state()?;
        let next = self.successors(&root)?.swap_remove(action.0);
        self.root_override = Some(next.clone());
        Ok(next)
    }

    fn fork(&self) -> Result<Box<dyn Environment>, EnvError> {
        let mut twin = AdapterEnv::spawn(self.command.clone(), self.timeout)?;
        if twin.desc != self.desc {
            return Err(EnvError::AdapterFailure(
                "forked adapter reported a different descriptor".into(),
            ));
        }
        twin.root_override = self.root_override.clone();
        Ok(Box::new(twin))
    }
}

impl Drop for AdapterEnv {
    fn drop(&mut self) {
        let _ = writeln!(self.stdin, "QUIT").and_then(|_| self.stdin.flush());
        let _ = self.lines.recv_timeout(Duration::from_millis(200));
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
