use std::process::ExitCode;

fn main() -> ExitCode {
    fregret::cli::main_with_args(std::env::args_os())
}
