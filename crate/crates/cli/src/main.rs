use std::process::exit;
use translator_lab_cli::run::{EXIT_OK, EXIT_USAGE};
use translator_lab_cli::{parse_args, run, ArgsError};

fn main() {
    match parse_args(std::env::args_os()) {
        Ok(cfg) => exit(run(&cfg)),
        Err(ArgsError::Display(text)) => {
            print!("{text}");
            exit(EXIT_OK);
        }
        Err(ArgsError::Usage(e)) => {
            eprintln!("error: {e}");
            exit(EXIT_USAGE);
        }
    }
}
