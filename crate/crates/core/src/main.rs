use std::process::ExitCode;

fn main() -> ExitCode {
    vqutrit::cli::run()
}
