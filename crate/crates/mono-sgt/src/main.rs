use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mono_sgt::cli::run(std::env::args_os()))
}
