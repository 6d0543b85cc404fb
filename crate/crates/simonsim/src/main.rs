use std::process::ExitCode;

fn main() -> ExitCode {
    simonsim::cli::run()
}
