use std::process::ExitCode;

fn main() -> ExitCode {
    branchscope::cli::run()
}
