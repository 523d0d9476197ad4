use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use seqbh::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdin = std::io::stdin().lock();
    let mut stdout = std::io::BufWriter::new(std::io::stdout().lock());
    let code = match execute(cli, &mut stdin, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = stdout.flush();
            eprintln!("seqbh: {e}");
            e.exit_code()
        }
    };
    if let Err(e) = stdout.flush() {
        eprintln!("seqbh: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
