use std::fs;
use std::io;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use revccs::check::{render_report, Verdict};
use revccs::export::NetView;
use revccs::repl;
use revccs::session::Session;
use revccs_core::ccs::{parse_process, Process};
use revccs_core::encoder::{encode, encode_reversible};
use revccs_core::petri::explore;
use revccs_core::rccs::RProcess;
use revccs_core::suites::run_suites;

#[derive(Parser)]
#[command(name = "revccs", version, about = "CCS and reversible CCS terms as unravel Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a term and export the net around its initial marking.
    Encode {
        term: String,
        /// Write Graphviz DOT here (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the JSON net view here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Firings explored beyond the initial marking.
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Leave out the reversing transitions.
        #[arg(long)]
        forward_only: bool,
    },
    /// Run the bounded property suites; exits 2 with a JSON witness on violation.
    Check {
        term: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Step through the reversible net of a term interactively.
    Simulate { term: String },
    /// Start the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

enum Failure {
    Input(anyhow::Error),
    Violation,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn parse(term: &str) -> anyhow::Result<Process> {
    let p = parse_process(term).with_context(|| format!("cannot parse `{term}`"))?;
    p.validate().with_context(|| format!("cannot encode `{term}`"))?;
    Ok(p)
}

fn write_out(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    if path.as_os_str() == "-" {
        print!("{contents}");
        Ok(())
    } else {
        fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// The net view `encode` exports for a term.
fn encoded_view(p: &Process, radius: usize, forward_only: bool) -> anyhow::Result<NetView> {
    let net = if forward_only { encode(p)? } else { encode_reversible(&RProcess::initial(p.clone()))? };
    let around = explore(&net, radius).map_err(|e| anyhow::anyhow!("unsafe net: {e:?}"))?;
    Ok(NetView::new(&around, net.initial()))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Encode { term, dot, json, radius, forward_only } => {
            let view = encoded_view(&parse(&term)?, radius, forward_only)?;
            if let Some(path) = &dot {
                write_out(path, &view.to_dot())?;
            }
            if let Some(path) = &json {
                let text = serde_json::to_string_pretty(&view).context("cannot serialise the net")?;
                write_out(path, &format!("{text}\n"))?;
            }
            let to_stdout = [&dot, &json].iter().any(|p| p.as_ref().is_some_and(|p| p.as_os_str() == "-"));
            if !to_stdout {
                println!(
                    "{} places, {} transitions ({} forward)",
                    view.places.len(),
                    view.transitions.len(),
                    view.forward_transitions()
                );
            }
            Ok(())
        }
        Command::Check { term, depth } => {
            let report = run_suites(&parse(&term)?, depth).map_err(anyhow::Error::from)?;
            print!("{}", render_report(&report));
            let verdict = Verdict::of(&report);
            if verdict.ok {
                Ok(())
            } else {
                println!("{}", serde_json::to_string(&verdict).context("cannot serialise the verdict")?);
                Err(Failure::Violation)
            }
        }
        Command::Simulate { term } => {
            let mut session = Session::from_process(parse(&term)?).map_err(anyhow::Error::from)?;
            repl::run(&mut session, io::stdin().lock(), io::stdout().lock()).context("terminal error")?;
            Ok(())
        }
        Command::Serve { port, bind } => {
            let runtime = tokio::runtime::Runtime::new().context("cannot start the runtime")?;
            runtime.block_on(revccs::server::serve(SocketAddr::new(bind, port)))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Violation) => ExitCode::from(2),
    }
}
