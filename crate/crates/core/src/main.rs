use std::process::ExitCode;

fn main() -> ExitCode {
    qcoherence::cli::main_with_args(std::env::args_os())
}
