use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use hyperlin::ambient::Ambient;
use hyperlin::coeffs::{is_prime, ExtField, Field, PrimeField};
use hyperlin::job::{lift_job, run_job, JobFile};
use hyperlin::repro::{repro, NAMES};
use hyperlin::singular::{invariant_family_scan, Family, ScanTarget};

const DEFAULT_SEED: u64 = 20240917;

#[derive(Parser)]
#[command(name = "hyperlin", version, about = "Exact linear systems of hypersurfaces")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file.
    Run { job: PathBuf },
    /// Run a named reference computation and check its expected values.
    Repro {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(NAMES))]
        name: String,
    },
    /// Search an invariant quintic family for surfaces with prescribed singularities.
    Scan {
        #[arg(long, value_parser = ["z5", "z6"])]
        family: String,
        /// Field order (a prime or prime power).
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, value_parser = ["nodes30", "nodes31", "cusps15"])]
        target: String,
        /// Stop after this many hits.
        #[arg(long)]
        max_hits: Option<usize>,
    },
    /// Run a job over several primes and lift its unique section to QQ.
    Lift {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        job: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("HYPERLIN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Prints the report and returns whether the expected values were matched.
fn dispatch(cli: &Cli) -> Result<bool, String> {
    match &cli.command {
        Command::Run { job } => {
            let j = load_job(job)?;
            let r = run_job(&j, cli.seed).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", pretty(&r));
            } else {
                print!("{}", r.render());
            }
            Ok(true)
        }
        Command::Repro { name } => {
            let r = repro(name, cli.seed).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", pretty(&r));
            } else {
                print!("{}", r.render());
            }
            Ok(r.passed)
        }
        Command::Scan { family, q, trials, target, max_hits } => {
            let family = Family::parse(family).map_err(|e| e.to_string())?;
            let target = ScanTarget::parse(target).map_err(|e| e.to_string())?;
            let (p, k) = prime_power(*q).ok_or_else(|| format!("{q} is not a prime power"))?;
            let out = if k == 1 {
                let f = PrimeField::new(p).map_err(|e| e.to_string())?;
                scan(&f, family, *trials, target, cli.seed, *max_hits, cli.json)
            } else {
                let f = ExtField::new(p, k).map_err(|e| e.to_string())?;
                scan(&f, family, *trials, target, cli.seed, *max_hits, cli.json)
            };
            out.map_err(|e| e.to_string())
        }
        Command::Lift { primes, job } => {
            let j = load_job(job)?;
            let r = lift_job(&j, primes, cli.seed).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", pretty(&r));
            } else {
                println!("primes used: {:?}", r.used);
                if !r.skipped.is_empty() {
                    println!("skipped (not exactly one section): {:?}", r.skipped);
                }
                for (m, c) in r.monomials.iter().zip(&r.coefficients) {
                    println!("  {m}: {}", c.as_deref().unwrap_or("?"));
                }
                match &r.polynomial {
                    Some(p) => println!("section: {p}"),
                    None => println!("section: not reconstructed; add primes"),
                }
            }
            Ok(r.polynomial.is_some())
        }
    }
}

fn load_job(path: &Path) -> Result<JobFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    JobFile::from_json_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

fn scan<F: Field>(
    field: &F,
    family: Family,
    trials: usize,
    target: ScanTarget,
    seed: u64,
    max_hits: Option<usize>,
    as_json: bool,
) -> hyperlin::Result<bool> {
    let out = invariant_family_scan(family, field, trials, target, seed, max_hits)?;
    let a = Ambient::projective(field, 3);
    let fmt = |t: &[F::Elem]| t.iter().map(|c| field.format(c)).collect::<Vec<_>>();
    if as_json {
        let hits: Vec<_> = out
            .hits
            .iter()
            .map(|h| {
                json!({
                    "trial": h.trial,
                    "params": fmt(&h.params),
                    "polynomial": a.format_poly(&h.poly),
                    "singular_points": h.report.points.iter().map(|p| json!({
                        "point": a.format_point(&p.point),
                        "hessian_rank": p.hessian_rank,
                        "class": p.classification,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let counts: serde_json::Map<String, serde_json::Value> =
            out.counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let v = json!({ "trials": out.trials, "skipped": out.skipped, "counts": counts, "hits": hits });
        println!("{}", pretty(&v));
    } else {
        for h in &out.hits {
            println!("hit trial={} params=[{}]", h.trial, fmt(&h.params).join(","));
            println!("{}", a.format_poly(&h.poly));
            print!("{}", h.report.render(&a));
        }
        let counts: Vec<String> = out.counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        println!("trials={} skipped={} hits={}", out.trials, out.skipped, out.hits.len());
        println!("singular point counts {}", counts.join(" "));
    }
    Ok(!out.hits.is_empty())
}
