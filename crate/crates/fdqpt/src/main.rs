use clap::Parser;
use fdqpt::cli::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits; real usage errors
            // map to exit code 1
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(cli::exit_code(&err));
    }
}
