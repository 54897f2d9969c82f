use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = ramsey_canon::cli::run(std::env::args_os());
    if let Some(msg) = &outcome.stderr {
        eprint!("{msg}");
        if !msg.ends_with('\n') {
            eprintln!();
        }
    }
    if let Some(json) = &outcome.stdout {
        let mut out = std::io::stdout().lock();
        if out.write_all(json.as_bytes()).is_err() {
            return ExitCode::from(3);
        }
    }
    ExitCode::from(outcome.code as u8)
}
