use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use mdfactor_cli::config::merge_config_file;
use mdfactor_cli::{execute, Cli, EXIT_FAILED_CHECK, EXIT_USAGE};

fn main() -> ExitCode {
    let args = match merge_config_file(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let run = execute(&cli.command);
    let common = cli.command.common();
    if let Some(path) = &common.out {
        if let Err(e) = run.report.write(path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    if common.json {
        println!("{}", run.report.to_json());
    } else if run.exit_code == 0 || run.exit_code == EXIT_FAILED_CHECK {
        print!("{}", run.text);
        if !run.text.ends_with('\n') && !run.text.is_empty() {
            println!();
        }
    } else {
        eprintln!("{}", run.text.trim_end());
    }
    ExitCode::from(run.exit_code as u8)
}
