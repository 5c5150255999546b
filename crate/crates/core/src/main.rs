use std::process::ExitCode;

fn main() -> ExitCode {
    betting_enhancer::cli::main()
}
