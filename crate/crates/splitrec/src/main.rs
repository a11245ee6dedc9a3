use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(splitrec::cli::run() as u8)
}
