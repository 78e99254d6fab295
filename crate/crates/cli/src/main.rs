mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dirlaw_core::Error;

use crate::args::Cli;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Unsupported(_) | Error::Singular(_) => 2,
        Error::Resource(_) | Error::Io(_) => 3,
        Error::Integrity(_) => 4,
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), Error> {
    let flags = cli.kind.flags();
    if let Some(threads) = flags.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Domain(format!("cannot configure {threads} threads: {e}")))?;
    }
    let (kind, verb) = cli.kind.names();
    let body = commands::execute(&cli.kind)?;
    let text = body.render(kind, &verb, flags);
    match &flags.out {
        Some(out) => {
            report::write_output(out, &text, kind, &verb, argv, flags)?;
            println!("{} -> {}", body.summary(kind, &verb), out.display());
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dirlaw: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Domain(String::new())), 2);
        assert_eq!(exit_code(&Error::Unsupported(String::new())), 2);
        assert_eq!(exit_code(&Error::Singular(String::new())), 2);
        assert_eq!(exit_code(&Error::Resource(String::new())), 3);
        assert_eq!(exit_code(&Error::Integrity(String::new())), 4);
    }
}
