use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(congruent::cli::run(std::env::args()) as u8)
}
