use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use iocr::lexicon::{parse_dictionary, Lexicon};
use iocr::matcher::MatcherConfig;
use iocr::synth::Ballot;
use iocr::tally::{AccuracyReport, GroundTruth};
use serde::Serialize;

/// Fully resolved parameters of one invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub args: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matcher: Option<&'a MatcherConfig>,
}

pub fn write_run_config<T: Serialize>(dir: &Path, command: &str, args: &T, matcher: Option<&MatcherConfig>) -> Result<()> {
    let cfg = RunConfig {
        tool: "iocr",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        matcher,
    };
    write(dir, "run_config.json", &(serde_json::to_string_pretty(&cfg)? + "\n"))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_dictionary(path: &Path) -> Result<Lexicon> {
    parse_dictionary(&read_text(path)?).with_context(|| format!("invalid dictionary {}", path.display()))
}

pub fn read_manifest(path: &Path) -> Result<GroundTruth> {
    GroundTruth::from_json(&read_text(path)?).with_context(|| format!("invalid manifest {}", path.display()))
}

pub fn read_report(path: &Path) -> Result<AccuracyReport> {
    AccuracyReport::from_json(&read_text(path)?).with_context(|| format!("invalid accuracy report {}", path.display()))
}

/// One ballot file. Files that are not UTF-8 text come back as `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallotFile {
    pub ballot_id: String,
    pub text: Option<String>,
}

fn ballot_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).with_context(|| format!("cannot read ballot directory {}", dir.display()))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        bail!("no ballot files (*.txt) in {}", dir.display());
    }
    Ok(paths)
}

/// Reads every `<ballot_id>.txt` in the directory, sorted by ballot ID.
pub fn read_ballot_dir(dir: &Path) -> Result<Vec<BallotFile>> {
    ballot_paths(dir)?
        .into_iter()
        .map(|path| {
            let ballot_id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let bytes = fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
            Ok(BallotFile {
                ballot_id,
                text: String::from_utf8(bytes).ok(),
            })
        })
        .collect()
}

pub fn write_ballot_dir(dir: &Path, ballots: impl IntoIterator<Item = (String, String)>) -> Result<usize> {
    let mut n = 0;
    for (id, text) in ballots {
        write(dir, &format!("{id}.txt"), &text)?;
        n += 1;
    }
    Ok(n)
}

pub fn write_ballots(dir: &Path, ballots: &[Ballot]) -> Result<usize> {
    write_ballot_dir(dir, ballots.iter().map(|b| (b.ballot_id.clone(), b.to_text())))
}
