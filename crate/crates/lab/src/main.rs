use std::process::ExitCode;

fn main() -> ExitCode {
    horizon_lab::cli::main()
}
