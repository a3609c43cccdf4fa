//! Command implementations for the `slitcommit` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use slitcommit::decay::{DeadlinePolicy, ParticleSpecies};
use slitcommit::nogo::{self, PairKind};
use slitcommit::optics::{ScreenModel, SlitGeometry};
use slitcommit::protocol::{
    attack_sweep, streams, BobTrial, CommitBit, CommitConfig, Disclosure, Protocol, ProtocolError,
    StrategyKind, Thresholds, UnveilMessage,
};
use slitcommit::rng;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REJECT: u8 = 3;

/// Everything needed to reproduce a run. Stored in the header line of every
/// transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub particle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_life: Option<f64>,
    /// Commit deadline in half-lives after the last detection.
    pub k: f64,
    pub geometry: SlitGeometry,
    pub thresholds: Thresholds,
    pub seed: u64,
    pub strategy: String,
    pub bit: CommitBit,
    pub inter_arrival: f64,
    pub transit_latency: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = CommitConfig::default();
        Self {
            n: c.n_detections,
            particle: c.species.name.clone(),
            half_life: None,
            k: c.deadline.multiplier,
            geometry: c.geometry,
            thresholds: Thresholds::default(),
            seed: c.seed,
            strategy: "honest".into(),
            bit: CommitBit::Zero,
            inter_arrival: c.inter_arrival,
            transit_latency: c.transit_latency,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn species(&self) -> Result<ParticleSpecies> {
        Ok(ParticleSpecies::by_name(&self.particle, self.half_life)?)
    }

    pub fn strategy_kind(&self) -> Result<StrategyKind> {
        StrategyKind::from_name(&self.strategy, self.bit).ok_or_else(|| {
            anyhow!(
                "unknown strategy {:?}; expected one of {}",
                self.strategy,
                StrategyKind::NAMES.join(", ")
            )
        })
    }

    pub fn commit_config(&self) -> Result<CommitConfig> {
        let c = CommitConfig {
            n_detections: self.n,
            species: self.species()?,
            deadline: DeadlinePolicy::new(self.k)?,
            geometry: self.geometry,
            seed: self.seed,
            inter_arrival: self.inter_arrival,
            transit_latency: self.transit_latency,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.commit_config()?;
        self.strategy_kind()?;
        self.thresholds.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Public,
    Bob,
    Alice,
    Unveil,
}

/// First line of every transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHeader {
    pub kind: FileKind,
    /// Number of record lines that follow.
    pub records: usize,
    pub n_detected: usize,
    pub commit_end_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit: Option<CommitBit>,
    pub config: RunConfig,
}

/// An error that should end the process with [`EXIT_USAGE`]: bad input,
/// never an internal bug.
#[derive(Debug)]
pub struct Malformed(pub String);

impl std::fmt::Display for Malformed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Malformed {}

fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}

fn write_jsonl<T: Serialize>(path: &Path, header: &FileHeader, rows: &[T]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(header)?);
    out.push('\n');
    for row in rows {
        out.push_str(&serde_json::to_string(row)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
    kind: FileKind,
) -> Result<(FileHeader, Vec<T>)> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |m: String| anyhow::Error::new(Malformed(format!("{}: {m}", path.display())));
    let first = lines.next().ok_or_else(|| bad("empty file".into()))??;
    let header: FileHeader =
        serde_json::from_str(&first).map_err(|e| bad(format!("header: {e}")))?;
    if header.kind != kind {
        return Err(bad(format!(
            "expected a {kind:?} file, found {:?}",
            header.kind
        )));
    }
    let mut rows = Vec::with_capacity(header.records);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let row = serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
        rows.push(row);
    }
    if rows.len() != header.records {
        return Err(bad(format!(
            "header announces {} records, found {}",
            header.records,
            rows.len()
        )));
    }
    Ok((header, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub n_detected: usize,
    pub n_emitted: usize,
    pub commit_end_time: f64,
    pub unveil_bit: CommitBit,
    pub files: Vec<PathBuf>,
}

/// Runs the commit phase, writes the public, Bob and Alice projections and
/// Alice's unveil message.
pub fn simulate(cfg: &RunConfig) -> Result<SimulateSummary> {
    cfg.validate()?;
    let protocol = Protocol::new(cfg.commit_config()?)?;
    let strategy = cfg.strategy_kind()?;
    let transcript = protocol.run_commit(strategy)?;
    let alice = transcript.alice_view();
    let mut unveil_rng = rng::stream(cfg.seed, &[streams::UNVEIL]);
    let msg = protocol.unveil(
        &alice,
        strategy,
        transcript.commit_end_time,
        &mut unveil_rng,
    )?;

    let header = |kind, records, bit| FileHeader {
        kind,
        records,
        n_detected: transcript.n_detected,
        commit_end_time: transcript.commit_end_time,
        bit,
        config: cfg.clone(),
    };
    let n = transcript.n_emitted();
    let files = vec![
        out_path(&cfg.out_dir, "public.jsonl")?,
        out_path(&cfg.out_dir, "bob.jsonl")?,
        out_path(&cfg.out_dir, "alice.jsonl")?,
        out_path(&cfg.out_dir, "unveil.jsonl")?,
    ];
    write_jsonl(
        &files[0],
        &header(FileKind::Public, n, None),
        &transcript.public_view(),
    )?;
    write_jsonl(
        &files[1],
        &header(FileKind::Bob, n, None),
        &transcript.bob_view(),
    )?;
    write_jsonl(&files[2], &header(FileKind::Alice, n, None), &alice)?;
    write_jsonl(
        &files[3],
        &header(FileKind::Unveil, msg.records.len(), Some(msg.bit)),
        &msg.records,
    )?;
    Ok(SimulateSummary {
        n_detected: transcript.n_detected,
        n_emitted: n,
        commit_end_time: transcript.commit_end_time,
        unveil_bit: msg.bit,
        files,
    })
}

/// Checks an unveil file against Bob's transcript. The screen geometry comes
/// from Bob's file; thresholds come from `thresholds`. Returns the report and
/// the path it was written to.
pub fn verify(
    bob_path: &Path,
    unveil_path: &Path,
    thresholds: Thresholds,
    out_dir: &Path,
) -> Result<(slitcommit::protocol::VerificationReport, PathBuf)> {
    thresholds.validate()?;
    let (bob_header, bob) = read_jsonl::<BobTrial>(bob_path, FileKind::Bob)?;
    let (unveil_header, records) = read_jsonl::<Disclosure>(unveil_path, FileKind::Unveil)?;
    let bit = unveil_header.bit.ok_or_else(|| {
        anyhow::Error::new(Malformed(format!(
            "{}: header lacks the bit",
            unveil_path.display()
        )))
    })?;
    let screen = ScreenModel::new(bob_header.config.geometry)?;
    let verifier = slitcommit::protocol::Verifier::new(&screen, thresholds)?;
    let report = match verifier.verify(&bob, &UnveilMessage { bit, records }) {
        Ok(r) => r,
        Err(e @ (ProtocolError::MalformedUnveil(_) | ProtocolError::MissingRecords { .. })) => {
            return Err(anyhow::Error::new(Malformed(e.to_string())))
        }
        Err(e) => return Err(e.into()),
    };
    let path = out_path(out_dir, "report.jsonl")?;
    let mut out = serde_json::to_string(&report)?;
    out.push('\n');
    fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok((report, path))
}

pub const SWEEP_HEADER: &str = "N,strategy,acceptances,reps,estimate,ci_low,ci_high";

/// Acceptance estimates over a grid of detection targets, as CSV text.
pub fn attack_sweep_csv(cfg: &RunConfig, grid: &[usize], reps: u64) -> Result<String> {
    if grid.is_empty() {
        bail!(Malformed("the N grid is empty".into()));
    }
    if reps == 0 {
        bail!(Malformed("need at least one repetition".into()));
    }
    cfg.validate()?;
    let strategy = cfg.strategy_kind()?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for &n in grid {
        let protocol = Protocol::new(CommitConfig {
            n_detections: n,
            ..cfg.commit_config()?
        })?;
        let e = attack_sweep(&protocol, cfg.thresholds, strategy, reps)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            e.n, e.strategy, e.acceptances, e.reps, e.estimate, e.ci_low, e.ci_high
        )?;
    }
    Ok(csv)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = out_path(dir, name)?;
    let mut f = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(path)
}

/// `x,density` tables of the envelope and the two-slit pattern.
pub fn pattern_csv(geometry: SlitGeometry) -> Result<(String, String)> {
    let screen = ScreenModel::new(geometry)?;
    let table = |pdf: &slitcommit::optics::ScreenPdf| {
        let mut s = String::from("x,density\n");
        for (x, d) in pdf.grid().iter().zip(pdf.density()) {
            let _ = writeln!(s, "{x},{d}");
        }
        s
    };
    Ok((table(screen.envelope()), table(screen.doubleslit())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum NogoLine {
    Summary(nogo::DemoSummary),
    Pair(nogo::PairReport),
}

/// Random concealing and perturbed pairs plus the product analog, one report
/// line each, preceded by a summary line.
pub fn nogo_demo(seed: u64, pairs: u64) -> Result<Vec<NogoLine>> {
    let mut reports = nogo::run_demo(seed, pairs, pairs)?;
    let analog = nogo::protocol_analog_pair()?;
    reports.push(nogo::evaluate(
        2 * pairs,
        PairKind::ProtocolAnalog,
        &analog,
    )?);
    let mut lines = vec![NogoLine::Summary(nogo::summarize(&reports))];
    lines.extend(reports.into_iter().map(NogoLine::Pair));
    Ok(lines)
}

pub fn jsonl<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = String::new();
    for r in rows {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_strategy_is_rejected() {
        let cfg = RunConfig {
            strategy: "teleport".into(),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn pattern_tables_have_one_row_per_node() {
        let (env, ds) = pattern_csv(SlitGeometry::default()).unwrap();
        assert_eq!(env.lines().count(), 4002);
        assert_eq!(ds.lines().count(), 4002);
        assert!(env.lines().any(|l| l == "1,0"));
    }
}
