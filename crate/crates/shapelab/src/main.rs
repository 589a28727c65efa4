use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use shapelab::brute::{brute_force_classes, BRUTE_MAX_X};
use shapelab::enumerate::{enumerate_classes, EnumerationTask, SignatureFilter};
use shapelab::fields::{ingest, parse_field_table};
use shapelab::haar::{mc_jacobian_constant, mc_shape_volume_ratio, truncated_mu_ratio, McEstimate, TestFn, BATCHES};
use shapelab::io::{read_forms, write_forms};
use shapelab::local::{local_density, CongruencePredicate, DensityPredicate};
use shapelab::space::equal_measure_partition;
use shapelab::stats::{equidist_report, NamedRegion};
use shapelab::{Error, Result};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "shapelab", version, about = "Shapes of cubic fields and their equidistribution")]
struct Cli {
    /// Worker threads; SHAPELAB_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate GL2(Z)-classes of irreducible binary cubic forms with |disc| < X.
    Enumerate(EnumerateArgs),
    /// Histogram, chi-square, KS and region ratios for a forms.csv stream.
    Equidist(EquidistArgs),
    /// Exhaustive p-adic density of a predicate.
    LocalDensity(LocalDensityArgs),
    /// Monte Carlo estimate of the Haar/|disc| Jacobian constant.
    McJacobian(McJacobianArgs),
    /// Monte Carlo estimate of a shape-restricted volume ratio.
    McRatio(McRatioArgs),
    /// Shapes of number fields of degree 3 to 5 from a field table.
    Ingest(IngestArgs),
    /// Reference tabulation by exhaustive search over a coefficient box.
    Brute(BruteArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    xmax: u64,
    #[arg(long = "i")]
    signature: SignatureFilter,
    #[arg(long)]
    maximal_only: bool,
    #[arg(long)]
    include_c3: bool,
    #[arg(long = "mod", requires = "residues")]
    modulus: Option<u64>,
    #[arg(long, requires = "modulus")]
    residues: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Accepted for interface uniformity; enumeration uses no randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EquidistArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Partition size as KXxKY, e.g. 4x6.
    #[arg(long)]
    cells: String,
    /// Region x1,x2,y1,y2 (y2 may be inf); repeatable.
    #[arg(long = "region", allow_hyphen_values = true)]
    regions: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Discriminant bound to report; defaults to one more than the largest |disc|.
    #[arg(long)]
    xmax: Option<u64>,
}

#[derive(Args)]
struct LocalDensityArgs {
    #[arg(long)]
    p: u64,
    /// `maximal` or `file:<predicate file>`.
    #[arg(long)]
    what: String,
}

#[derive(Args)]
struct McJacobianArgs {
    #[arg(long = "i")]
    signature: u8,
    #[arg(long)]
    testfn: TestFn,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct McRatioArgs {
    #[arg(long = "i")]
    signature: u8,
    #[arg(long)]
    ymax: f64,
    #[arg(long)]
    region: String,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    d4_test: bool,
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long)]
    xmax: u64,
    #[arg(long)]
    out: PathBuf,
}

fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn residue_predicate(modulus: u64, path: &Path) -> Result<CongruencePredicate> {
    let text = read_text(path)?;
    let has_mod = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.starts_with("mod"));
    let pred = if has_mod { CongruencePredicate::parse(&text)? } else { CongruencePredicate::parse(&format!("mod {modulus}\n{text}"))? };
    if pred.modulus != modulus {
        return Err(Error::InvalidTask(format!("--mod {modulus} disagrees with `mod {}` in {}", pred.modulus, path.display())));
    }
    Ok(pred)
}

fn parse_cells(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidTask(format!("--cells expects KXxKY, got `{s}`"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn mc_json(est: &McEstimate, config: serde_json::Value) -> serde_json::Value {
    json!({"estimate": est.value, "stderr": est.stderr, "N": est.samples, "seed": est.seed, "config": config})
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Enumerate(a) => {
            let congruence = match (a.modulus, &a.residues) {
                (Some(m), Some(path)) => Some(residue_predicate(m, path)?),
                _ => None,
            };
            let task = EnumerationTask::new(a.xmax, a.signature).maximal_only(a.maximal_only).include_c3(a.include_c3).congruence(congruence);
            let records = enumerate_classes(&task)?;
            write_forms(BufWriter::new(File::create(&a.out)?), &records)
        }
        Command::Equidist(a) => {
            let (kx, ky) = parse_cells(&a.cells)?;
            let spec = equal_measure_partition(kx, ky)?;
            let regions = a.regions.iter().map(|r| NamedRegion::parse(r)).collect::<Result<Vec<_>>>()?;
            let records = read_forms(BufReader::new(File::open(&a.input)?))?;
            let x = a.xmax.unwrap_or_else(|| records.iter().map(|r| r.disc.unsigned_abs() + 1).max().unwrap_or(0));
            let report = equidist_report(x, &records, &spec, &regions)?;
            write_json(&a.out, &report)
        }
        Command::LocalDensity(a) => {
            let pred = match a.what.as_str() {
                "maximal" => DensityPredicate::Maximal,
                w => match w.strip_prefix("file:") {
                    Some(path) => DensityPredicate::Congruence(CongruencePredicate::parse(&read_text(Path::new(path))?)?),
                    None => return Err(Error::InvalidTask(format!("--what expects maximal or file:<path>, got `{w}`"))),
                },
            };
            let d = local_density(a.p, &pred)?;
            let value = num_traits::ToPrimitive::to_f64(&d).unwrap_or(f64::NAN);
            print_json(&json!({"p": a.p, "what": a.what, "density": d.to_string(), "value": value}))
        }
        Command::McJacobian(a) => {
            let est = mc_jacobian_constant(a.signature, a.testfn, a.samples, a.seed)?;
            print_json(&mc_json(&est, json!({"i": a.signature, "testfn": a.testfn, "batches": BATCHES})))
        }
        Command::McRatio(a) => {
            let region = NamedRegion::parse(&a.region)?;
            let est = mc_shape_volume_ratio(&region.region, a.signature, a.ymax, a.samples, a.seed)?;
            let mu = truncated_mu_ratio(&region.region, a.ymax);
            print_json(&mc_json(&est, json!({"i": a.signature, "ymax": a.ymax, "region": region.label, "mu_ratio": mu, "batches": BATCHES})))
        }
        Command::Ingest(a) => {
            let records = parse_field_table(&read_text(&a.input)?)?;
            let shapes = ingest(&records, a.d4_test)?;
            write_json(&a.out, &shapes)
        }
        Command::Brute(a) => {
            if a.xmax > BRUTE_MAX_X {
                return Err(Error::InvalidTask(format!("--xmax must be at most {BRUTE_MAX_X}")));
            }
            let records = brute_force_classes(a.xmax)?;
            write_forms(BufWriter::new(File::create(&a.out)?), &records)
        }
    }
}

fn thread_count(flag: Option<usize>) -> std::result::Result<Option<usize>, String> {
    match std::env::var("SHAPELAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("SHAPELAB_THREADS must be a positive integer, got `{v}`")),
        },
        Err(_) => match flag {
            Some(0) => Err("--threads must be positive".into()),
            other => Ok(other),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match thread_count(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
