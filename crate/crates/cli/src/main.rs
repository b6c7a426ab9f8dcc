use std::process::ExitCode;

fn main() -> ExitCode {
    lp_sections_cli::run(std::env::args_os())
}
