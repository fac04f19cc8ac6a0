use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itt::driver::{check_paths, Options, RunReport, Status};
use itt::eval::DEFAULT_FUEL;

#[derive(Parser)]
#[command(name = "itt", version, about = "Check .itt files")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check files in order; a .txt argument is a manifest.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        kernel: KernelFlags,
        /// One JSON object per declaration on stdout.
        #[arg(long)]
        json: bool,
        /// Print conversion queries made while checking this declaration
        /// (a name, or `#kind@line` for a pragma).
        #[arg(long, value_name = "DECL")]
        trace: Option<String>,
    },
    /// Check a file, then print `<normal form> : <type>` for an expression.
    Eval {
        path: PathBuf,
        expr: String,
        #[command(flatten)]
        kernel: KernelFlags,
    },
}

#[derive(Args)]
struct KernelFlags {
    /// Evaluation step budget per declaration.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Turn off eta in conversion.
    #[arg(long)]
    no_eta: bool,
}

impl KernelFlags {
    fn options(&self, trace: Option<String>) -> Options {
        Options { fuel: self.fuel, eta: !self.no_eta, trace }
    }
}

fn print_report(report: &RunReport, json: bool) {
    for f in &report.files {
        if let Some(d) = &f.parse_error {
            eprintln!("{}:{d}", f.path);
            if json {
                let line = serde_json::json!({
                    "file": f.path, "name": "<parse>", "kind": "parse", "status": Status::Error, "millis": 0
                });
                println!("{line}");
            }
        }
        for d in &f.decls {
            if let Some(out) = &d.output {
                // in JSON mode stdout carries only the records
                if json {
                    eprintln!("{}: {out}", d.name);
                } else {
                    println!("{}: {out}", d.name);
                }
            }
            if let Some(diag) = &d.diagnostic {
                eprintln!("{}:{diag}", f.path);
            }
            if json {
                println!("{}", serde_json::to_string(d).expect("report serializes"));
            }
        }
        if !json {
            println!("{}", f.summary());
        }
        eprintln!("{}: {} ms", f.path, f.millis);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check { paths, kernel, json, trace } => match check_paths(&paths, kernel.options(trace)) {
            Ok((_, report)) => {
                print_report(&report, json);
                ExitCode::from(report.exit_code() as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Cmd::Eval { path, expr, kernel } => {
            let (session, report) = match check_paths(&[path], kernel.options(None)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if report.exit_code() != 0 {
                print_report(&report, false);
                return ExitCode::from(1);
            }
            match session.eval_expr(&expr) {
                Ok((nf, ty)) => {
                    println!("{nf} : {ty}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
