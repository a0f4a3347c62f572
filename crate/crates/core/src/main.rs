//! Command-line front end: sampling, sweeps, peeling traces, exhaustive
//! enumeration, homology panels, and theory reports.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use tetraglue::harness::{
    aggregate, compare_theory, read_records, run_sweep, run_trial, Conditioning,
    ExperimentConfig, Panel, Tolerances,
};
use tetraglue::model::{enumerate_all, sample_simple, sample_uniform, DEFAULT_MAX_RETRIES};
use tetraglue::peeling::{peel_algorithm1, peel_algorithm2, write_trace_csv};
use tetraglue::rng::{trial_seed, Seed};
use tetraglue::snf::DEFAULT_NONZERO_CAP;

#[derive(Parser)]
#[command(name = "tetraglue", about = "Random gluings of truncated tetrahedra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one gluing instance and write it in the text format.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Condition on the dual graph being simple.
        #[arg(long)]
        simple: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a configured sweep (JSON config mirroring ExperimentConfig).
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run peeling trials and export the step traces as CSV.
    Peel {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        algorithm: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trace_out: PathBuf,
    },
    /// Write every instance of the n <= 2 gluing space, concatenated in
    /// the text format.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the homology panel over seeded trials and print a summary.
    Homology {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Aggregate JSONL record files from a directory into a theory report.
    TheoryReport {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Sample {
            n,
            seed,
            simple,
            out,
        } => {
            let inst = if simple {
                sample_simple(n, Seed(seed), DEFAULT_MAX_RETRIES)?
            } else {
                sample_uniform(n, Seed(seed))?
            };
            inst.write_text(BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {}", out.display());
        }
        Command::Sweep { config } => {
            let cfg: ExperimentConfig = serde_json::from_reader(BufReader::new(
                File::open(&config).with_context(|| format!("open {}", config.display()))?,
            ))?;
            let (records, stats) = run_sweep(&cfg)?;
            eprintln!(
                "{} records over n = {:?}",
                records.len(),
                cfg.n_list
            );
            for a in &stats.per_n {
                println!(
                    "n = {}: mean E = {:.3}, frac V=1 = {}",
                    a.n,
                    a.mean_e,
                    a.frac_v1.map_or("-".into(), |f| format!("{f:.3}"))
                );
            }
            match compare_theory(&stats) {
                Ok(report) => print!("{}", report.render()),
                Err(e) => eprintln!("theory comparison skipped: {e}"),
            }
        }
        Command::Peel {
            algorithm,
            n,
            trials,
            seed,
            trace_out,
        } => {
            let master = Seed(seed.unwrap_or(0));
            let mut w = BufWriter::new(File::create(&trace_out)?);
            match algorithm {
                1 => {
                    let traces: Vec<_> = (0..trials)
                        .map(|t| peel_algorithm1(n, trial_seed(master, n, t)).1)
                        .collect();
                    write_trace_csv(&traces, &mut w)?;
                }
                2 => {
                    writeln!(w, "trial,k,l")?;
                    for t in 0..trials {
                        let (_, (k, l)) =
                            peel_algorithm2(n, trial_seed(master, n, t), (0, 1), (0, 2));
                        writeln!(w, "{t},{k},{l}")?;
                    }
                }
                _ => unreachable!("clap range"),
            }
            eprintln!("wrote {}", trace_out.display());
        }
        Command::Enumerate { n, out } => {
            if n > 2 {
                bail!("enumeration is only supported for n in {{1, 2}}");
            }
            let mut w = BufWriter::new(File::create(&out)?);
            let atoms = enumerate_all(n)?;
            let count = atoms.len();
            for inst in atoms {
                inst.write_text(&mut w)?;
            }
            eprintln!("wrote {count} instances to {}", out.display());
        }
        Command::Homology { n, trials, seed } => {
            let cfg = ExperimentConfig {
                n_list: vec![n],
                trials: trials as usize,
                master_seed: seed.unwrap_or(0),
                conditioning: Conditioning::Uniform,
                panels: vec![Panel::Edges, Panel::Boundary, Panel::Homology],
                out_records: None,
                out_aggregates: None,
                homology_cap: DEFAULT_NONZERO_CAP,
                tolerances: Tolerances::default(),
            };
            let mut skipped = 0;
            println!("trial,E,b1_rel,b1_abs,b1_double,torsion,heegaard_lower,heegaard_upper");
            for t in 0..trials {
                let r = run_trial(&cfg, n, t)?;
                if r.homology_skipped {
                    skipped += 1;
                    continue;
                }
                println!(
                    "{},{},{},{},{},{:?},{},{}",
                    t,
                    r.e.unwrap_or(0),
                    r.b1_rel.unwrap_or(0),
                    r.b1_abs.unwrap_or(0),
                    r.b1_double.unwrap_or(0),
                    r.torsion_factors.unwrap_or_default(),
                    r.heegaard_lower.unwrap_or(0),
                    r.heegaard_upper.unwrap_or(0),
                );
            }
            if skipped > 0 {
                eprintln!("{skipped} trials skipped (size cap)");
            }
        }
        Command::TheoryReport { input, out } => {
            let mut records = Vec::new();
            for entry in std::fs::read_dir(&input)
                .with_context(|| format!("read {}", input.display()))?
            {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "jsonl") {
                    records.extend(read_records(BufReader::new(File::open(&path)?))?);
                }
            }
            if records.is_empty() {
                bail!("no .jsonl records found in {}", input.display());
            }
            let stats = aggregate(&records, &Tolerances::default());
            let report = compare_theory(&stats)?;
            let mut w = BufWriter::new(File::create(&out)?);
            w.write_all(report.render().as_bytes())?;
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}
