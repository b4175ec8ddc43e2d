use chainlet::chains::io::{parse_chain, parse_header, write_chain, Mode};
use chainlet::chains::Chain;
use chainlet::forms::{integrate, Form, Quadrature};
use chainlet::norms::{br_bracket, NormOptions};
use chainlet::operators::{boundary, cone};
use chainlet::plateau::{minimize, Problem};
use chainlet::scalar::{Scalar, Q};
use chainlet::verify::{self, Fault};
use chainlet::Error;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "chainlet", version, about = "Differential chains, B^r norm brackets and soap films")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the operator identity, Stokes and norm-bound suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random instances per property.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Test fixture: break an operator on purpose (retract-sign).
        #[arg(long)]
        inject_fault: Option<Fault>,
    },
    /// Bracket the B^r norm of a Dirac chain.
    Norm {
        chain: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Facet count of the dual-ball polytope.
        #[arg(long)]
        facets: Option<usize>,
        /// Step for expanding dipole terms.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Where to write the certificate (default: <chain>.cert).
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Minimize area over surfaces spanning a frame.
    Plateau {
        problem: PathBuf,
        /// Directory for <stem>.obj and <stem>.report.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Pair a chain with a form.
    Integrate { chain: PathBuf, form: PathBuf },
    /// Boundary of a chain, written as a chain file.
    Boundary { chain: PathBuf },
    /// Cone over a chain from a point, written as a chain file.
    Cone {
        chain: PathBuf,
        /// Cone point, e.g. "0 0 1"; rationals allowed in rational mode.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

enum Failure {
    Input(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Lp(_) | Error::Infeasible(_) | Error::Degenerate(_) | Error::Quadrature(_) | Error::Cap { .. } | Error::NotIntegral(_) => {
                Failure::Property(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn is_blank(text: &str) -> bool {
    text.lines().all(|l| l.split('#').next().unwrap().trim().is_empty())
}

fn mode_of(text: &str) -> Result<Mode, Failure> {
    Ok(parse_header(text)?.mode)
}

fn norm<S: Scalar>(text: &str, r: u32, opts: &NormOptions, cert: &Path) -> Result<(), Failure> {
    let c: Chain<S> = parse_chain(text)?;
    let d = c.as_dirac().ok_or_else(|| Failure::Input("norm brackets need a chain of T terms only".into()))?;
    let b = br_bracket(d, r, opts)?;
    write(cert, &b.certificate())?;
    println!("{} {} {}", b.lb, b.ub, b.gap());
    eprintln!("certificate: {}", cert.display());
    Ok(())
}

fn integrate_file<S: Scalar>(text: &str, form: &Form) -> Result<(), Failure> {
    let c: Chain<S> = parse_chain(text)?;
    let v: S = integrate(&c, form, &Quadrature::default())?;
    println!("{}", v.fmt_value());
    Ok(())
}

fn boundary_file<S: Scalar>(text: &str) -> Result<(), Failure> {
    let c: Chain<S> = parse_chain(text)?;
    if c.k() == 0 {
        eprintln!("note: the boundary of a 0-chain is the zero chain by convention");
    }
    print!("{}", write_chain(&boundary(&c)?)?);
    Ok(())
}

fn cone_file<S: Scalar>(text: &str, point: &str) -> Result<(), Failure> {
    let c: Chain<S> = parse_chain(text)?;
    let q: Vec<S> = point
        .split_whitespace()
        .map(|t| S::parse_value(t).ok_or_else(|| Failure::Input(format!("bad coordinate `{}`", t))))
        .collect::<Result<_, _>>()?;
    print!("{}", write_chain(&cone(&q, &c)?)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Verify { seed, trials, inject_fault } => {
            let report = verify::run(&verify::Config { seed, trials, fault: inject_fault });
            print!("{}", report.to_text());
            if report.passed() {
                Ok(())
            } else {
                let names: Vec<&str> = report.failing().iter().map(|c| c.property).collect();
                Err(Failure::Property(format!("failing: {}", names.join("; "))))
            }
        }
        Cmd::Norm { chain, r, facets, h, certificate } => {
            let text = read(&chain)?;
            if is_blank(&text) {
                println!("0 0 0");
                return Ok(());
            }
            let opts = NormOptions { facets, h };
            let cert = certificate.unwrap_or_else(|| chain.with_extension("cert"));
            match mode_of(&text)? {
                Mode::Rational => norm::<Q>(&text, r, &opts, &cert),
                Mode::Float => norm::<f64>(&text, r, &opts, &cert),
            }
        }
        Cmd::Plateau { problem, out_dir } => {
            let p = Problem::read(&problem)?;
            let sol = minimize(&p)?;
            let stem = problem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plateau".into());
            std::fs::create_dir_all(&out_dir).map_err(|e| Failure::Input(format!("{}: {}", out_dir.display(), e)))?;
            let text = sol.report.to_text();
            write(&out_dir.join(format!("{}.obj", stem)), &sol.to_obj())?;
            write(&out_dir.join(format!("{}.report", stem)), &text)?;
            print!("{}", text);
            if sol.report.ok() {
                Ok(())
            } else {
                Err(Failure::Property("surface fails the span, shadow or cap check".into()))
            }
        }
        Cmd::Integrate { chain, form } => {
            let text = read(&chain)?;
            let w = Form::parse(&read(&form)?)?;
            match mode_of(&text)? {
                Mode::Rational => integrate_file::<Q>(&text, &w),
                Mode::Float => integrate_file::<f64>(&text, &w),
            }
        }
        Cmd::Boundary { chain } => {
            let text = read(&chain)?;
            match mode_of(&text)? {
                Mode::Rational => boundary_file::<Q>(&text),
                Mode::Float => boundary_file::<f64>(&text),
            }
        }
        Cmd::Cone { chain, point } => {
            let text = read(&chain)?;
            match mode_of(&text)? {
                Mode::Rational => cone_file::<Q>(&text, &point),
                Mode::Float => cone_file::<f64>(&text, &point),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(2)
        }
    }
}
