use std::process::ExitCode;

fn main() -> ExitCode {
    leibniz::cli::run()
}
