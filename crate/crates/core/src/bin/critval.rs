use clap::Parser;
use critval::cli::{execute, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("critval {}: {e}", cli.command.name());
            return ExitCode::from(2);
        }
    };
    print!("{}", out.report.summary());
    match out.write() {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("critval: cannot write outputs: {e}");
            return ExitCode::from(2);
        }
    }
    if out.report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
