//! Wire-protocol edge cases, driven against throwaway `sh` fixtures and the
//! binary's own `serve` subcommand.

use std::path::Path;
use std::time::Duration;

use branchscope::env::{ActionId, EnvError, Environment};
use branchscope::envs::adapter::AdapterEnv;

const BIN: &str = env!("CARGO_BIN_EXE_branchscope");

fn fixture(dir: &Path, name: &str, script: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, script).unwrap();
    format!("sh {}", path.display())
}

fn connect_err(cmd: &str) -> EnvError {
    match AdapterEnv::connect(cmd) {
        Ok(_) => panic!("connection unexpectedly succeeded"),
        Err(err) => err,
    }
}

#[test]
fn handshake_rejects_zero_actions() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "zero.sh", "read line\necho \"OK 0 0 4\"\n");
    let err = connect_err(&cmd);
    assert!(matches!(err, EnvError::AdapterFailure(_)), "got {err:?}");
}

#[test]
fn err_reply_surfaces_the_message() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "err.sh", "read line\necho \"ERR boom\"\n");
    let err = connect_err(&cmd);
    match err {
        EnvError::AdapterFailure(msg) => assert!(msg.contains("boom"), "got {msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn replies_must_start_with_ok_or_err() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "garbage.sh", "read line\necho \"WHAT 1 2 3\"\n");
    let err = connect_err(&cmd);
    match err {
        EnvError::AdapterFailure(msg) => assert!(msg.contains("malformed"), "got {msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn silent_subprocess_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "silent.sh", "sleep 5\n");
    let err = match AdapterEnv::connect_with_timeout(&cmd, Duration::from_millis(200)) {
        Ok(_) => panic!("connection unexpectedly succeeded"),
        Err(err) => err,
    };
    match err {
        EnvError::AdapterFailure(msg) => assert!(msg.contains("no response"), "got {msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn immediate_exit_is_an_adapter_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "quit.sh", "exit 0\n");
    let err = connect_err(&cmd);
    assert!(matches!(err, EnvError::AdapterFailure(_)), "got {err:?}");
}

#[test]
fn wrong_state_length_is_malformed_state() {
    let dir = tempfile::tempdir().unwrap();
    // INIT replies with base64 of 2 bytes while INFO promised 4.
    let script = "while read line; do\n\
                  set -- $line\n\
                  case \"$1\" in\n\
                  INFO) echo \"OK 2 0 4\" ;;\n\
                  INIT) echo \"OK AAE=\" ;;\n\
                  QUIT) echo \"OK\"; exit 0 ;;\n\
                  *) echo \"ERR unexpected\" ;;\n\
                  esac\n\
                  done\n";
    let cmd = fixture(dir.path(), "shortkey.sh", script);
    let mut adapter = AdapterEnv::connect(&cmd).unwrap();
    let err = adapter.initial_state().unwrap_err();
    assert!(
        matches!(err, EnvError::MalformedState { expected: 4, actual: 2 }),
        "got {err:?}"
    );
}

#[test]
fn succ_must_return_one_state_per_action() {
    let dir = tempfile::tempdir().unwrap();
    let script = "while read line; do\n\
                  set -- $line\n\
                  case \"$1\" in\n\
                  INFO) echo \"OK 2 0 1\" ;;\n\
                  INIT) echo \"OK AA==\" ;;\n\
                  SUCC) echo \"OK AQ==\" ;;\n\
                  QUIT) echo \"OK\"; exit 0 ;;\n\
                  *) echo \"ERR unexpected\" ;;\n\
                  esac\n\
                  done\n";
    let cmd = fixture(dir.path(), "onesucc.sh", script);
    let mut adapter = AdapterEnv::connect(&cmd).unwrap();
    let root = adapter.initial_state().unwrap();
    let err = adapter.successors(&root).unwrap_err();
    match err {
        EnvError::AdapterFailure(msg) => assert!(msg.contains("expects 2"), "got {msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn init_replies_are_cached_within_a_run() {
    let cmd = format!("{BIN} serve --env paddle_mini --init-override 0005 --init-override-after 1");
    let mut adapter = AdapterEnv::connect(&cmd).unwrap();
    let first = adapter.initial_state().unwrap();
    assert_eq!(first.as_bytes(), &[0, 3]);
    // The server would now answer INIT with the override; only the cache can
    // keep this call consistent.
    assert_eq!(adapter.initial_state().unwrap(), first);

    adapter.begin_run();
    let second = adapter.initial_state().unwrap();
    assert_eq!(second.as_bytes(), &[0, 5]);
}

#[test]
fn warm_step_moves_the_served_root() {
    let cmd = format!("{BIN} serve --env mod_rotator --param m=4");
    let mut adapter = AdapterEnv::connect(&cmd).unwrap();
    assert_eq!(adapter.initial_state().unwrap().as_bytes(), &0u32.to_le_bytes());

    let stepped = adapter.warm_step(ActionId(0)).unwrap();
    assert_eq!(stepped.as_bytes(), &1u32.to_le_bytes());
    assert_eq!(adapter.initial_state().unwrap(), stepped);
    // A new run re-queries INIT but keeps the warmed root.
    adapter.begin_run();
    assert_eq!(adapter.initial_state().unwrap(), stepped);

    let mut forked = adapter.fork().unwrap();
    assert_eq!(forked.initial_state().unwrap(), stepped);
}

#[test]
fn make_env_builds_adapters_with_a_timeout_param() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = fixture(dir.path(), "silent2.sh", "sleep 5\n");
    let mut params = std::collections::BTreeMap::new();
    params.insert("cmd".to_string(), cmd);
    params.insert("timeout_ms".to_string(), "200".to_string());
    let err = match branchscope::envs::make_env("adapter", &params) {
        Ok(_) => panic!("connection unexpectedly succeeded"),
        Err(err) => err,
    };
    assert!(err.to_string().contains("no response"), "got {err}");
}
