use std::process::ExitCode;

fn main() -> ExitCode {
    taas_cli::main_with(std::env::args_os())
}
