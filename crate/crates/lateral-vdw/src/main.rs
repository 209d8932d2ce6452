use std::process::ExitCode;

fn main() -> ExitCode {
    lateral_vdw::cli::run(std::env::args_os())
}
