use aqrm_cli::args::Cli;
use aqrm_cli::{exit, exit_code, resolve_workers, run, RunError, WORKERS_ENV};
use clap::Parser;

fn main() {
    let (mode, args) = Cli::parse().command.split();
    let flag_workers = args.workers;
    let prepared = args.into_config(mode).and_then(|(cfg, file_workers)| {
        let env = std::env::var(WORKERS_ENV).ok();
        Ok((cfg, resolve_workers(flag_workers, env.as_deref(), file_workers)?))
    });
    let result = match prepared {
        Ok((cfg, workers)) => run(&cfg, workers),
        Err(e) => Err(RunError::Config(e)),
    };
    let code = exit_code(&result);
    match &result {
        Ok(s) => {
            for f in &s.files {
                println!("{}", f.display());
            }
            if code == exit::PARTIAL {
                eprintln!("{} of {} cells failed; see the error column", s.failed_cells, s.total_cells);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(code);
}
