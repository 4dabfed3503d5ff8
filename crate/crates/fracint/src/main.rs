use std::process::ExitCode;

fn main() -> ExitCode {
    fracint::cli::run(std::env::args_os())
}
