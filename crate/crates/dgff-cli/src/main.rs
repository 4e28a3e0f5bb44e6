use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dgff::contour::{residue_min_radius, residue_pairing, Contour};
use dgff::correlator::{wick_correlator, InsertionList};
use dgff::kernel::{massive_green_oracle, PotentialKernel, PotentialKernelTable};
use dgff::lattice::{ClassSet, Site, SiteClass};
use dgff::modes::suite::{SuiteKind, SuiteParams};
use dgff::monomials::MonomialFamily;
use dgff::scalar::{format_rational, parse_rational, rat, GaussianRational, PiScalar, Rational};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dgff", version, about = "Exact discrete complex analysis and mode-algebra checks for the lattice GFF")]
struct Cli {
    /// Potential kernel cache to load before running (refused if corrupt or stale).
    #[arg(long, global = true)]
    kernel_cache: Option<PathBuf>,
    /// Print results as JSON.
    #[arg(long, global = true)]
    json_stdout: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Potential kernel on the diamond lattice, Cauchy kernel on medial sites.
    Kernel {
        /// Coordinates in lattice units, e.g. `1 1` or `3/2 0`.
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_hyphen_values = true)]
        z: Vec<String>,
    },
    /// CSV table of z^[k] on the sites with |x| + |y| <= window.
    Monomial {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value = "2")]
        window: String,
    },
    /// Discrete residue pairing of z^[m] and z^[n] against δ_{m+n,-1}.
    Residue {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Rectangle radius (smallest admissible one if omitted).
        #[arg(long, conflicts_with = "contour")]
        r: Option<u32>,
        /// Contour JSON file: a list of [qx, qy] nodes in quarter units.
        #[arg(long)]
        contour: Option<PathBuf>,
    },
    /// Exact correlation of a JSON insertion list (file, or stdin if omitted).
    Correlator { input: Option<PathBuf> },
    /// Commutator suite over an insertion family.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        max_index: i64,
        /// Index range of the [L, Lbar] and half-plane Virasoro identities.
        #[arg(long, default_value_t = 1)]
        secondary_max_index: i64,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = 2)]
        window: i64,
        /// Coulomb charge as p/q.
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        b: String,
        /// Enlarge every contour by this many steps.
        #[arg(long, default_value_t = 0)]
        growth: u32,
        /// Write the full report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the exact kernel with the massive Green's function on a box.
    Oracle {
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
        z: Vec<i64>,
        #[arg(long, default_value_t = 1e-3)]
        mass: f64,
        #[arg(long = "box", default_value_t = 200)]
        box_radius: i64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Potential kernel cache files.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Compute the table up to the given radius and write it.
    Save {
        path: PathBuf,
        #[arg(long, default_value_t = 64)]
        radius: i64,
    },
    /// Load and verify a cache file.
    Check { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Heisenberg,
    Virasoro,
    Coulomb,
    Mixed,
    Halfplane,
}

fn parse_site(x: &str, y: &str) -> Result<Site> {
    let q = |s: &str| -> Result<i64> {
        let r = parse_rational(s).with_context(|| format!("bad coordinate {s:?}"))?;
        let r4 = r * Rational::from_integer(4.into());
        if !r4.is_integer() {
            bail!("coordinate {s} is not a multiple of 1/4");
        }
        r4.to_integer().try_into().context("coordinate out of range")
    };
    Ok(Site::new(q(x)?, q(y)?))
}

fn quarter(q: i64) -> String {
    format_rational(&rat(q, 4))
}

fn re_im(v: &PiScalar) -> (PiScalar, PiScalar) {
    let part = |f: fn(&GaussianRational) -> Rational| {
        PiScalar::from_terms(v.terms().iter().map(|(k, c)| (*k, GaussianRational::real(f(c)))))
    };
    (part(|c| c.re.clone()), part(|c| c.im.clone()))
}

fn emit(json_out: bool, v: &PiScalar, extra: serde_json::Value) -> Result<()> {
    if json_out {
        let mut o = json!({ "value": v, "approx": v.to_complex() });
        if let (Some(o), serde_json::Value::Object(e)) = (o.as_object_mut(), extra) {
            o.extend(e);
        }
        println!("{}", serde_json::to_string_pretty(&o)?);
    } else {
        println!("{v}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(p) = &cli.kernel_cache {
        let t = PotentialKernelTable::load(p).with_context(|| format!("loading kernel cache {}", p.display()))?;
        PotentialKernel::global().install(t);
    }
    let kern = PotentialKernel::global();
    match cli.command {
        Command::Kernel { z } => {
            let s = parse_site(&z[0], &z[1])?;
            let v = match s.class() {
                SiteClass::Vertex | SiteClass::Dual => kern.diamond(s)?,
                SiteClass::MedialH | SiteClass::MedialV => kern.cauchy(s)?,
                _ => bail!("{s} is not a lattice, dual or medial site"),
            };
            emit(cli.json_stdout, &v, json!({ "site": [s.qx, s.qy], "class": format!("{:?}", s.class()) }))?;
        }
        Command::Monomial { k, window } => {
            let w = parse_rational(&window)? * Rational::from_integer(4.into());
            let wq: i64 = w.floor().to_integer().try_into()?;
            let fam = MonomialFamily::global();
            println!("x,y,class,re,im");
            for s in Site::ball(ClassSet::ALL, wq) {
                let (re, im) = re_im(&fam.monomial(k, s)?);
                println!("{},{},{:?},{re},{im}", quarter(s.qx), quarter(s.qy), s.class());
            }
        }
        Command::Residue { m, n, r, contour } => {
            let gamma = match contour {
                Some(p) => {
                    let s = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str::<Contour>(&s).context("parsing contour")?
                }
                None => Contour::rectangle(r.unwrap_or_else(|| residue_min_radius(m, n))),
            };
            let v = residue_pairing(m, n, &gamma)?;
            let want = PiScalar::from_int((m + n == -1) as i64);
            let pass = v == want;
            if cli.json_stdout {
                emit(true, &v, json!({ "m": m, "n": n, "expected": want, "pass": pass }))?;
            } else {
                println!("{v}\n{}", if pass { "PASS" } else { "FAIL" });
            }
            return Ok(pass);
        }
        Command::Correlator { input } => {
            let mut s = String::new();
            match input {
                Some(p) if p.as_os_str() != "-" => {
                    s = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?
                }
                _ => {
                    std::io::stdin().read_to_string(&mut s)?;
                }
            }
            let ins: InsertionList = serde_json::from_str(&s).context("parsing insertion list")?;
            let v = wick_correlator(&ins)?;
            emit(cli.json_stdout, &v, json!({}))?;
        }
        Command::Verify { suite, max_index, secondary_max_index, max_degree, window, b, growth, json } => {
            if max_index < 0 || secondary_max_index < 0 || window < 0 {
                bail!("bounds must be non-negative");
            }
            let kind = match suite {
                Suite::Heisenberg => SuiteKind::Heisenberg,
                Suite::Virasoro => SuiteKind::Virasoro,
                Suite::Coulomb => SuiteKind::Coulomb(parse_rational(&b)?),
                Suite::Mixed => SuiteKind::Mixed,
                Suite::Halfplane => SuiteKind::HalfPlane,
            };
            let p = SuiteParams { max_index, secondary_max_index, max_degree, window, growth };
            let report = kind.run(&p);
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            for c in report.cases.iter().filter(|c| !c.pass).take(10) {
                eprintln!("FAIL {} {:?} on {:?}: residual {}", c.identity, c.indices, c.insertion, c.residual);
            }
            let s = &report.summary;
            println!(
                "{}: {}/{} passed{}",
                report.suite,
                s.passed,
                s.total,
                if report.all_pass() { "" } else { " (FAIL)" }
            );
            return Ok(report.all_pass());
        }
        Command::Oracle { z, mass, box_radius, tol } => {
            if !(mass > 0.0) {
                bail!("mass must be positive");
            }
            let exact = kern.vertex(Site::vertex(z[0], z[1]))?;
            let o = massive_green_oracle((z[0], z[1]), mass, box_radius)?;
            let err = (exact.to_f64() - o).abs();
            let pass = err <= tol;
            if cli.json_stdout {
                let v = json!({ "kind": "numeric", "exact": exact, "oracle": o, "error": err, "tolerance": tol, "pass": pass });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                println!("{exact} = {:.10}\noracle {o:.10}\nerror {err:.3e} {}", exact.to_f64(), if pass { "PASS" } else { "FAIL" });
            }
            return Ok(pass);
        }
        Command::Cache { action } => match action {
            CacheAction::Save { path, radius } => {
                kern.ensure(radius);
                let t = kern.snapshot();
                t.save(&path).with_context(|| format!("writing {}", path.display()))?;
                println!("saved radius {} ({} entries)", t.radius(), t.len());
            }
            CacheAction::Check { path } => {
                let t = PotentialKernelTable::load(&path)?;
                println!("ok: radius {} ({} entries)", t.radius(), t.len());
            }
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
