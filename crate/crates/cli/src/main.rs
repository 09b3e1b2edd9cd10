mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use subgap_core::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "subgap", version, about = "Sharp subelliptic order toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Directory for result files and the run manifest
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Greedy cluster cover of a finite metric space
    Cluster(commands::ClusterArgs),
    /// Root-cluster cover of a polynomial with measured sublevel constants
    Sublevel(commands::SublevelArgs),
    /// Gap sweeps of the one-dimensional model problem
    Gap1d(commands::Gap1dArgs),
    /// Dilation identity on random weights
    Scaling(commands::ScalingArgs),
    /// Approximate minimal eigenvector field at a point
    Ame(commands::AmeArgs),
    /// Flow foliation and Weierstrass data at a point
    Foliate(commands::FoliateArgs),
    /// Type invariants and the sharp order
    Type(commands::TypeArgs),
    /// Disc family contact exponents
    Contact(commands::ContactArgs),
    /// Certification of the bundled three-variable example
    CertifyExample(commands::CertifyArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Cluster(_) => "cluster",
            Cmd::Sublevel(_) => "sublevel",
            Cmd::Gap1d(_) => "gap1d",
            Cmd::Scaling(_) => "scaling",
            Cmd::Ame(_) => "ame",
            Cmd::Foliate(_) => "foliate",
            Cmd::Type(_) => "type",
            Cmd::Contact(_) => "contact",
            Cmd::CertifyExample(_) => "certify-example",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Hypothesis => 2,
        ErrorKind::Numerical => 3,
        ErrorKind::Input => 4,
    }
}

fn report_error(e: &Error) -> ExitCode {
    let kind = match e.kind() {
        ErrorKind::Hypothesis => "hypothesis",
        ErrorKind::Numerical => "numerical",
        ErrorKind::Input => "input",
    };
    let mut body = json!({ "error": kind, "message": e.to_string() });
    if let Error::Hypothesis { witness: Some(w), .. } = e {
        body["witness"] = json!(io::pairs(w));
    }
    eprintln!("{body}");
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            if code == 0 {
                let _ = e.print();
            } else {
                eprintln!("{}", json!({ "error": "input", "message": e.to_string().trim_end() }));
            }
            return ExitCode::from(code);
        }
    };
    if cli.common.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global();
    }
    let started = Instant::now();
    let name = cli.cmd.name();
    let mut inputs = io::Inputs::new();
    let c = &cli.common;
    let result = match &cli.cmd {
        Cmd::Cluster(a) => commands::cluster(a, c, &mut inputs),
        Cmd::Sublevel(a) => commands::sublevel(a, c, &mut inputs),
        Cmd::Gap1d(a) => commands::gap1d(a, c, &mut inputs),
        Cmd::Scaling(a) => commands::scaling(a, c, &mut inputs),
        Cmd::Ame(a) => commands::ame(a, c, &mut inputs),
        Cmd::Foliate(a) => commands::foliate(a, c, &mut inputs),
        Cmd::Type(a) => commands::type_cmd(a, c, &mut inputs),
        Cmd::Contact(a) => commands::contact(a, c, &mut inputs),
        Cmd::CertifyExample(a) => commands::certify(a, c, &mut inputs),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    if let Some(dir) = &c.out {
        if let Err(e) = io::write_outputs(dir, name, c.seed, inputs, &out, started) {
            return report_error(&e);
        }
    }
    if let Some(first) = out.artifacts.first() {
        print!("{}", first.contents);
    }
    if out.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
