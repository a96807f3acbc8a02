use std::process::ExitCode;

fn main() -> ExitCode {
    coarse_bell::cli::main()
}
