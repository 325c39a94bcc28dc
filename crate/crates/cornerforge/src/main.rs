use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cornerforge::cli::run(std::env::args_os()))
}
