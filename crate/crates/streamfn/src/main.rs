use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(streamfn::cli::run(std::env::args()) as u8)
}
