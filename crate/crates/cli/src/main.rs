use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use superlie_cli::args::{Cli, Command, ReportArgs};
use superlie_cli::ids::Ids;
use superlie_cli::report::{render_record, render_summary, Report};
use superlie_cli::{manifest, run, CliError, EXIT_FAILED, EXIT_OK, EXIT_USAGE};

fn emit(report: &Report, text: String, args: &ReportArgs) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |source| CliError::Io { path: "<stdout>".into(), source };
    match &args.json {
        Some(None) => out.write_all(report.to_json().as_bytes()).map_err(io)?,
        Some(Some(path)) => {
            std::fs::write(path, report.to_json()).map_err(|source| CliError::Io { path: path.clone(), source })?;
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(())
}

fn main_inner(cli: Cli, tokens: &[String]) -> Result<i32, CliError> {
    let report_args = cli.command.report().clone();
    let timings = !report_args.no_timings;
    let report = match &cli.command {
        Command::Verify(a) => {
            let m = match &a.manifest {
                Some(path) => manifest::load(path)?,
                None => manifest::parse(manifest::BUILTIN, None)?,
            };
            let report = manifest::run(&m, timings);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(&report, render_summary(&report, timings), &report_args)?;
            report
        }
        cmd => {
            let mut ids = Ids::builtin();
            for p in &cmd.input().expect("non-verify command").ids {
                ids.load(p)?;
            }
            let mut record = run::execute(cmd, tokens, &ids)?;
            if !timings {
                record.millis = 0;
            }
            let text = render_record(&record, timings);
            let report = Report::new(vec![record], Vec::new());
            emit(&report, text, &report_args)?;
            report
        }
    };
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let tokens: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let code = main_inner(cli, &tokens).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    });
    ExitCode::from(code as u8)
}
