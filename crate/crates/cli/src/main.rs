use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nswiener_cli::run(std::env::args_os()) as u8)
}
