//! chabauty: residue-disk candidate-point pipeline for hyperelliptic curves
//! over Q at a good odd prime.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use chabauty_core::error::Error;
use chabauty_core::fixtures::{geo_set, load_config, Runtime};
use chabauty_core::verify::verify_example;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "chabauty",
    about = "Find the p-adic candidate points of a hyperelliptic curve disk by disk",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Path to the fixture bundle (config JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Residue disk, e.g. "0,-1"
    #[arg(long, global = true)]
    disk: Option<String>,
    /// Working precision exponent k (values mod p^k)
    #[arg(long, global = true, default_value_t = 1)]
    precision: i64,
    /// Write the JSON report here instead of only printing text
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// After a mod-p solve, descend into the higher residue disk of every
    /// candidate (needs enough fixture samples for precision 2)
    #[arg(long, global = true, default_value_t = false)]
    refine: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Interpolate the curve embedding of one residue disk
    EmbedDisk,
    /// Print the polynomial parametrization of the integral torsor points
    Kappa,
    /// Solve one residue disk for candidate points
    SolveDisk,
    /// Sweep every disk in the bundle
    SolveAll,
    /// Recompute the shipped worked example and diff every intermediate value
    VerifyExample,
    /// Run the bundle's internal consistency checks
    CheckInvariants,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvariantViolation(_) => ExitCode::from(2),
                Error::MissingFixture(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli) -> chabauty_core::Result<()> {
    let config_path = cli
        .config
        .clone()
        .ok_or_else(|| Error::SchemaError("--config is required".into()))?;
    let cfg = load_config(&config_path)?;
    let rt = Runtime::build(cfg)?;
    let k = cli.precision;
    let disk = || -> chabauty_core::Result<&str> {
        cli.disk
            .as_deref()
            .ok_or_else(|| Error::SchemaError("--disk is required for this command".into()))
    };
    match cli.command {
        Command::EmbedDisk => {
            let id = disk()?;
            let embed = rt.embed(id, k)?;
            println!(
                "embedding of disk {id} mod {}^{k} (coordinates in the disk parameter):",
                rt.p
            );
            let mut coords = vec![];
            for (i, f) in embed.polys.iter().enumerate() {
                let terms: Vec<String> = (0..=f.degree().unwrap_or(0))
                    .map(|j| format!("{}", f.coeff(j).truncate(k)))
                    .collect();
                println!("  coordinate {}: [{}]", i + 1, terms.join(", "));
                coords.push(
                    (0..=f.degree().unwrap_or(0))
                        .map(|j| report::number(&f.coeff(j), k, "computed"))
                        .collect::<chabauty_core::Result<Vec<_>>>()?,
                );
            }
            write_output(
                cli,
                &report::EmbedOut { disk: id.to_string(), precision: k, coordinates: coords },
            )?;
        }
        Command::Kappa => {
            let id = disk()?;
            let kp = rt.kappa(id, k as u32)?;
            println!(
                "integral-point parametrization of disk {id}: {} linear and {} quadratic coordinates mod {}^{k}",
                kp.kappa_z_first.len(),
                kp.kappa_z_height.len(),
                rt.p
            );
            for (i, f) in kp.phi.iter().enumerate() {
                println!("  phi coordinate {}: {:?}", i + 1, f.terms);
            }
            let polys: Vec<_> = kp.phi.iter().map(report::multipoly).collect();
            write_output(cli, &polys)?;
        }
        Command::SolveDisk => {
            let id = disk()?;
            let r = rt.run_disk(id, k)?;
            print_disk_report(&r);
            if r.finite {
                for c in r.candidates.iter().filter(|c| !c.lifted) {
                    println!("  candidate n = {:?} needs a higher-disk refinement", c.n);
                }
            }
            let mut refinements = vec![];
            if cli.refine && r.finite {
                for c in &r.candidates {
                    let base: Vec<u64> = c.n.iter().map(|x| x % rt.p).collect();
                    for rf in rt.refine(id, &base, c.nu % rt.p)? {
                        println!(
                            "  refinement of n = {base:?}: torsor point {:?}, point ({}, {})",
                            rf.torsor_point, rf.point.x, rf.point.y
                        );
                        refinements.push(report::refined(&rf)?);
                    }
                }
            }
            #[derive(serde::Serialize)]
            struct SolveOut {
                #[serde(flatten)]
                report: report::DiskReportOut,
                refinements: Vec<report::RefinedOut>,
            }
            write_output(cli, &SolveOut { report: report::disk_report(&r)?, refinements })?;
        }
        Command::SolveAll => {
            let entries = geo_set(&rt, k)?;
            let mut all_candidates = 0usize;
            for e in &entries {
                match &e.outcome {
                    chabauty_core::fixtures::SweepOutcome::Report(r) => {
                        print_disk_report(r);
                        if r.finite {
                            all_candidates += r.candidates.len();
                        }
                    }
                    chabauty_core::fixtures::SweepOutcome::Involution { of, candidates } => {
                        println!(
                            "disk {}: involution image of {of} ({} candidates)",
                            e.disk_id,
                            candidates.len()
                        );
                        for (pt, _) in candidates {
                            println!("  candidate: ({}, {})", pt.x.truncate(2), pt.y.truncate(2));
                        }
                        all_candidates += candidates.len();
                    }
                    chabauty_core::fixtures::SweepOutcome::SieveEmpty => {
                        println!("disk {}: skipped, empty integral disk (sieve at p)", e.disk_id);
                    }
                    chabauty_core::fixtures::SweepOutcome::Unprocessed(reason) => {
                        println!("disk {}: unprocessed ({reason})", e.disk_id);
                    }
                }
            }
            println!("total candidates over processed disks: {all_candidates}");
            write_output(cli, &report::sweep(&entries)?)?;
        }
        Command::VerifyExample => {
            let checks = verify_example(&rt)?;
            let mut failed = 0;
            for c in &checks {
                if c.pass {
                    println!("check {}: PASS ({})", c.name, c.got);
                } else {
                    failed += 1;
                    println!("check {}: FAIL (got {}, want {})", c.name, c.got, c.want);
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            #[derive(serde::Serialize)]
            struct CheckOut {
                name: String,
                pass: bool,
                got: String,
                want: String,
            }
            let out: Vec<CheckOut> = checks
                .iter()
                .map(|c| CheckOut {
                    name: c.name.clone(),
                    pass: c.pass,
                    got: c.got.clone(),
                    want: c.want.clone(),
                })
                .collect();
            write_output(cli, &out)?;
            if failed > 0 {
                return Err(Error::FitMismatch(format!("{failed} checks failed")));
            }
        }
        Command::CheckInvariants => {
            rt.table.check_symmetry()?;
            println!("height table symmetry: ok");
            let v = rt.regular.discriminant_valuation()?;
            if v != 0 {
                return Err(Error::InvariantViolation("bad reduction at p".into()));
            }
            println!("good reduction at p = {}: ok", rt.p);
            for e in &rt.endos {
                e.check_trace_zero()?;
            }
            println!("endomorphism trace conditions: ok");
            for (label, pj) in &rt.config.points {
                let pt = match pj {
                    chabauty_core::fixtures::PointJson::Affine { x, y } => {
                        chabauty_core::curve::CurvePoint::from_integers(rt.p, *x, *y)
                    }
                    chabauty_core::fixtures::PointJson::Infinity { .. } => continue,
                };
                if !rt.regular.on_curve(&pt) {
                    return Err(Error::InvariantViolation(format!(
                        "fixture point {label} is not on the curve"
                    )));
                }
            }
            println!("fixture points on the curve: ok");
            for d in &rt.config.disks {
                if d.status != chabauty_core::fixtures::DiskStatusJson::Process {
                    continue;
                }
                let k2 = rt.kappa(&d.id, 2)?;
                let k1 = rt.kappa(&d.id, 1)?;
                for (a, b) in k2.phi.iter().zip(&k1.phi) {
                    if a.reduce_to(1) != *b {
                        return Err(Error::FitMismatch(format!(
                            "parametrization reduction inconsistency on disk {}",
                            d.id
                        )));
                    }
                }
                println!("disk {}: parametrization shape and reduction: ok", d.id);
            }
            let text =
                serde_json::to_string(&rt.config).map_err(|e| Error::SchemaError(e.to_string()))?;
            let back: chabauty_core::fixtures::ConfigFile =
                serde_json::from_str(&text).map_err(|e| Error::SchemaError(e.to_string()))?;
            let again =
                serde_json::to_string(&back).map_err(|e| Error::SchemaError(e.to_string()))?;
            if text != again {
                return Err(Error::SchemaError("config round-trip mismatch".into()));
            }
            println!("config serialization round-trip: ok");
        }
    }
    Ok(())
}

fn print_disk_report(r: &chabauty_core::disk::DiskReport) {
    println!(
        "disk {} (center ({}, {})) at precision {}:",
        r.disk_id, r.center.0, r.center.1, r.k
    );
    println!("  finite: {}  bound: {:?}", r.finite, r.bound);
    for c in &r.candidates {
        println!(
            "  candidate n = {:?}, nu = {}, point = ({}, {})",
            c.n, c.nu, c.point.x, c.point.y
        );
    }
}

fn write_output<T: serde::Serialize>(cli: &Cli, value: &T) -> chabauty_core::Result<()> {
    if let Some(path) = &cli.output {
        let text =
            serde_json::to_string_pretty(value).map_err(|e| Error::SchemaError(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| Error::SchemaError(format!("cannot write {}: {e}", path.display())))?;
        println!("report written to {}", path.display());
    }
    Ok(())
}
