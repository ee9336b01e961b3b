use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(intervalfa::cli::run() as u8)
}
