use std::process::ExitCode;

fn main() -> ExitCode {
    multipath::cli::run(std::env::args_os())
}
