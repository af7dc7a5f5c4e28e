use std::process::ExitCode;

fn main() -> ExitCode {
    pmx::cli::configure_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = pmx::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}
