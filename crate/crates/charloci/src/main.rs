//! Command-line surface: transforms, fibers, loci, perversity, intersection
//! complexes, Euler characteristics, and the verification suites.
//!
//! Exit codes: 0 success, 1 input error, 2 verification mismatch.

use charloci::complex::FreeComplex;
use charloci::error::Error;
use charloci::intersection::{ell, ic_verify_with_ell};
use charloci::io::{
    fiber_report, ic_report, locus_report, parse_point, perversity_report, ComplexJson,
    InputFile,
};
use charloci::loci::jump_locus;
use charloci::poly::MonomialOrder;
use charloci::torus::CharacterTorus;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Grevlex,
    Lex,
}

impl OrderArg {
    fn order(self) -> MonomialOrder {
        match self {
            OrderArg::Grevlex => MonomialOrder::GrevLex,
            OrderArg::Lex => MonomialOrder::Lex,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "charloci", version, about = "Exact cohomology jump loci on character tori")]
struct Cli {
    /// Monomial order for all polynomial computations
    #[arg(long, value_enum, default_value = "grevlex", global = true)]
    order: OrderArg,
    /// Report format
    #[arg(long, value_enum, default_value = "json", global = true)]
    output: OutputArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the transform of an object file as a complex file
    Transform {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cohomology dimensions of the derived fiber at a character point
    Fiber {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated rational coordinates, e.g. "1/2,-1"
        #[arg(long)]
        point: String,
    },
    /// Jump locus report for one degree and multiplicity
    Loci {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: i32,
        #[arg(long)]
        m: usize,
        /// Torsion-order bound for the arithmetic flag
        #[arg(long, default_value = "2")]
        max_order: usize,
    },
    /// Perverse t-structure membership report
    Perversity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Intersection-complex verification report for a module file
    Ic {
        #[arg(long)]
        input: PathBuf,
        /// Override the truncation depth (must be odd)
        #[arg(long)]
        ell_override: Option<usize>,
    },
    /// Euler characteristic of the complex an input denotes
    Euler {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a verification suite over the bundled examples
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "50")]
        samples: usize,
    },
}

fn realize(path: &PathBuf, order: MonomialOrder) -> charloci::Result<(FreeComplex, Option<CharacterTorus>)> {
    InputFile::load(path)?.realize(order)
}

/// Print a line, exiting quietly if the reader has gone away (broken pipe).
fn outln(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn emit(value: serde_json::Value, output: OutputArg) {
    match output {
        OutputArg::Json => outln(&serde_json::to_string_pretty(&value).unwrap()),
        OutputArg::Text => {
            let mut buf = String::new();
            render_text(&value, 0, &mut buf);
            outln(buf.trim_end_matches('\n'));
        }
    }
}

fn render_text(v: &serde_json::Value, indent: usize, buf: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                if val.is_object() || val.is_array() {
                    writeln!(buf, "{pad}{k}:").unwrap();
                    render_text(val, indent + 1, buf);
                } else {
                    writeln!(buf, "{pad}{k}: {val}").unwrap();
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                if item.is_object() || item.is_array() {
                    writeln!(buf, "{pad}-").unwrap();
                    render_text(item, indent + 1, buf);
                } else {
                    writeln!(buf, "{pad}- {item}").unwrap();
                }
            }
        }
        other => writeln!(buf, "{pad}{other}").unwrap(),
    }
}

fn run(cli: Cli) -> charloci::Result<u8> {
    let order = cli.order.order();
    // single-process engine: the thread cap is accepted for compatibility
    // and anything other than sequential is currently equivalent to 1
    let _ = std::env::var("CHARLOCI_THREADS");
    match cli.command {
        Command::Transform { input } => {
            let (c, _) = realize(&input, order)?;
            emit(serde_json::to_value(ComplexJson::from_complex(&c))?, cli.output);
            Ok(0)
        }
        Command::Fiber { input, point } => {
            let (c, _) = realize(&input, order)?;
            let rho = parse_point(&point)?;
            if rho.coords.len() != c.ring.n() {
                return Err(Error::TorusMismatch(format!(
                    "point has {} coordinates, ring has {} variables",
                    rho.coords.len(),
                    c.ring.n()
                )));
            }
            emit(fiber_report(&c.derived_fiber(&rho.coords)), cli.output);
            Ok(0)
        }
        Command::Loci { input, k, m, max_order } => {
            if m == 0 {
                return Err(Error::InvalidInput("multiplicity must be at least 1".into()));
            }
            let (c, torus) = realize(&input, order)?;
            let torus = torus.ok_or_else(|| {
                Error::TorusMismatch("loci need an even number of variables".into())
            })?;
            let locus = jump_locus(&c, k, m, &torus)?;
            emit(locus_report(&locus, &torus, max_order)?, cli.output);
            Ok(0)
        }
        Command::Perversity { input } => {
            let (c, torus) = realize(&input, order)?;
            emit(perversity_report(&c, torus.as_ref())?, cli.output);
            Ok(0)
        }
        Command::Ic { input, ell_override } => {
            let InputFile::Module(mf) = InputFile::load(&input)? else {
                return Err(Error::InvalidInput("ic needs a module file".into()));
            };
            let inp = mf.to_ic_input()?;
            let depth = match ell_override {
                Some(l) if l % 2 == 0 => {
                    return Err(Error::InvalidInput("truncation depth must be odd".into()))
                }
                Some(l) => l,
                None => ell(inp.module.ring.n()),
            };
            let rep = ic_verify_with_ell(&inp, depth)?;
            let pass = rep.all_pass();
            emit(ic_report(&rep), cli.output);
            Ok(if pass { 0 } else { 2 })
        }
        Command::Euler { input } => {
            let (c, _) = realize(&input, order)?;
            emit(serde_json::json!(c.euler_characteristic()), cli.output);
            Ok(0)
        }
        Command::Verify { suite, seed, samples } => {
            let names: Vec<&str> = if suite == "all" {
                charloci::suites::SUITE_NAMES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut failed = false;
            for name in names {
                let r = charloci::suites::run_suite(name, samples, seed)?;
                outln(&format!("{}: {}", r.name, if r.pass() { "pass" } else { "FAIL" }));
                for f in &r.failures {
                    outln(&format!("  {f}"));
                }
                failed |= !r.pass();
            }
            Ok(if failed { 2 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
