use std::process::ExitCode;

use clap::Parser;

use bifol_core::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.summary);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            println!("{}", serde_json::json!({ "error": e.kind(), "message": e.to_string() }));
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
