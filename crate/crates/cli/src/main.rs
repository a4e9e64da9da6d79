use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod report;

use args::Cli;

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("DILATION_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("DILATION_LAB_THREADS must be a positive integer, got `{raw}`"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INPUT_ERROR);
    }
    match commands::run(&cli.command) {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.inconclusive {
                ExitCode::from(EXIT_INCONCLUSIVE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
