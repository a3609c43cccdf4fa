use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use slitcommit::protocol::CommitBit;
use slitcommit_cli::{
    attack_sweep_csv, jsonl, nogo_demo, pattern_csv, simulate, verify, write_text, NogoLine,
    RunConfig, EXIT_OK, EXIT_REJECT, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "slitcommit",
    version,
    about = "Double-slit bit commitment with unstable particles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the commit phase and write transcripts plus Alice's unveil.
    Simulate(Common),
    /// Check an unveil file against Bob's transcript.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Bob's transcript [default: <out-dir>/bob.jsonl].
        #[arg(long)]
        bob: Option<PathBuf>,
        /// Alice's unveil message [default: <out-dir>/unveil.jsonl].
        #[arg(long)]
        unveil: Option<PathBuf>,
    },
    /// Estimate Bob's acceptance rate for a strategy over a grid of N.
    AttackSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated detection targets.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400,800")]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
    },
    /// Write the envelope and two-slit screen densities as CSV.
    Pattern(Common),
    /// Mount the purification attack on random toy commitments.
    NogoDemo {
        #[command(flatten)]
        common: Common,
        /// Pairs of each kind (concealing, perturbed).
        #[arg(long, default_value_t = 500)]
        pairs: u64,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Detections N.
    #[arg(long)]
    n: Option<usize>,
    /// Committed bit (honest) or unveil target (delayed strategies).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    bit: Option<u8>,
    /// neutron, muon, or custom (with --half-life).
    #[arg(long)]
    particle: Option<String>,
    /// Half-life in seconds.
    #[arg(long)]
    half_life: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// honest, forge-positions, guess-which-slit, store-and-delay, helstrom-router.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Commit deadline in half-lives.
    #[arg(long)]
    k: Option<f64>,
    /// Screen tabulation nodes.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.bit {
            c.bit = CommitBit::try_from(v).map_err(anyhow::Error::msg)?;
        }
        if let Some(v) = &self.particle {
            c.particle = v.clone();
        }
        if let Some(v) = self.half_life {
            c.half_life = Some(v);
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.strategy {
            c.strategy = v.clone();
        }
        if let Some(v) = self.alpha {
            c.thresholds.alpha = v;
        }
        if let Some(v) = self.epsilon {
            c.thresholds.epsilon = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.nodes {
            c.geometry.grid_nodes = v;
        }
        if let Some(v) = &self.out_dir {
            c.out_dir = v.clone();
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = common.resolve()?;
            let s = simulate(&cfg)?;
            println!(
                "detected {} of {} emitted; commit phase ends at {} s; unveil bit {}",
                s.n_detected, s.n_emitted, s.commit_end_time, s.unveil_bit
            );
            for f in &s.files {
                println!("wrote {}", f.display());
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            common,
            bob,
            unveil,
        } => {
            let cfg = common.resolve()?;
            let bob = bob.unwrap_or_else(|| cfg.out_dir.join("bob.jsonl"));
            let unveil = unveil.unwrap_or_else(|| cfg.out_dir.join("unveil.jsonl"));
            let (report, path) = verify(&bob, &unveil, cfg.thresholds, &cfg.out_dir)?;
            for t in &report.tests {
                let p = t.p_value.map_or("-".to_string(), |p| format!("{p:.3e}"));
                let note = t.warning.as_deref().unwrap_or("");
                let verdict = if t.passed { "pass" } else { "FAIL" };
                println!(
                    "{:<22} {verdict} n={} stat={:.4} p={p} {note}",
                    t.name, t.n_events, t.statistic
                );
            }
            println!(
                "bit {}: {}",
                report.bit,
                if report.accepted {
                    "accepted"
                } else {
                    "rejected"
                }
            );
            println!("wrote {}", path.display());
            Ok(if report.accepted {
                EXIT_OK
            } else {
                EXIT_REJECT
            })
        }
        Command::AttackSweep { common, grid, reps } => {
            let cfg = common.resolve()?;
            let csv = attack_sweep_csv(&cfg, &grid, reps)?;
            print!("{csv}");
            let path = write_text(&cfg.out_dir, "sweep.csv", &csv)?;
            eprintln!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Pattern(common) => {
            let cfg = common.resolve()?;
            let (env, ds) = pattern_csv(cfg.geometry)?;
            for (name, text) in [("envelope.csv", env), ("doubleslit.csv", ds)] {
                println!("wrote {}", write_text(&cfg.out_dir, name, &text)?.display());
            }
            Ok(EXIT_OK)
        }
        Command::NogoDemo { common, pairs } => {
            let cfg = common.resolve()?;
            let lines = nogo_demo(cfg.seed, pairs)?;
            for line in &lines {
                match line {
                    NogoLine::Pair(r) => println!(
                        "{:>5} {:<16} {}x{} gap={:.3e} attack={} residual={}",
                        r.index,
                        format!("{:?}", r.kind),
                        r.dims[0],
                        r.dims[1],
                        r.gap,
                        if r.attack_found {
                            "found"
                        } else {
                            "impossible"
                        },
                        r.residual.map_or("-".to_string(), |x| format!("{x:.2e}"))
                    ),
                    NogoLine::Summary(s) => println!(
                        "concealing {}/{} attacked; perturbed {}/{} blocked; max residual {:.2e}",
                        s.concealing_attacked,
                        s.concealing,
                        s.perturbed_blocked,
                        s.perturbed,
                        s.max_residual
                    ),
                }
            }
            let path = write_text(&cfg.out_dir, "nogo.jsonl", &jsonl(&lines)?)?;
            eprintln!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
