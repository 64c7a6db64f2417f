use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match said_cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let report = match said_cli::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    print!("{}", said_cli::render(&report.rows, config.report, config.decimals));
    for failure in &report.failures {
        eprintln!("error: {failure}");
    }
    if report.succeeded() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
