use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use iocr::lexicon::DEFAULT_ID_D_MIN;
use iocr::matcher::MatcherConfig;
use iocr::similarity::SimilarityScore;
use iocr::synth::DEFAULT_SEED;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "iocr", version, about = "Informed OCR ballot tabulation and experiment harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a mock-election ballot set with its dictionary and manifest.
    Generate(GenerateArgs),
    /// Corrupt a directory of ballot texts with the OCR noise channel.
    Corrupt(CorruptArgs),
    /// Match a directory of OCR ballot texts and tally the selections.
    Tally(TallyArgs),
    /// Time SymSpell, brute-force scan and Norvig correction.
    Bench(BenchArgs),
    /// ANOVA or paired t-test over accuracy reports.
    Stats(StatsArgs),
    /// Reproduce one of the four experiments end to end.
    Experiment(ExperimentArgs),
    /// Dictionary utilities.
    Lexicon {
        #[command(subcommand)]
        command: LexiconCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum LexiconCommand {
    /// Print the per-contest separation report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatcherArgs {
    /// Levenshtein similarity below which a line may be a write-in.
    #[arg(long, default_value_t = 0.65)]
    pub writein_lev: f64,
    /// Jaro-Winkler similarity below which a line may be a write-in.
    #[arg(long, default_value_t = 0.75)]
    pub writein_jw: f64,
    #[arg(long, default_value_t = iocr::similarity::DEFAULT_PREFIX_WEIGHT)]
    pub prefix_weight: f64,
    #[arg(long, default_value_t = iocr::similarity::DEFAULT_MAX_PREFIX)]
    pub max_prefix: usize,
    /// Lines with fewer alphanumeric characters are discarded as garbage.
    #[arg(long, default_value_t = 3)]
    pub garbage_min_alnum: usize,
    #[arg(long)]
    pub case_fold: bool,
    /// Compare each line with every contest instead of its own.
    #[arg(long)]
    pub scan_all_contests: bool,
    #[arg(long)]
    pub collapse_whitespace: bool,
}

impl Default for MatcherArgs {
    fn default() -> Self {
        Self::from_config(&MatcherConfig::default())
    }
}

impl MatcherArgs {
    pub fn from_config(cfg: &MatcherConfig) -> Self {
        Self {
            writein_lev: cfg.writein_threshold_lev.value(),
            writein_jw: cfg.writein_threshold_jw.value(),
            prefix_weight: cfg.prefix_weight,
            max_prefix: cfg.max_prefix,
            garbage_min_alnum: cfg.garbage_min_alnum,
            case_fold: cfg.case_fold,
            scan_all_contests: !cfg.position_keyed,
            collapse_whitespace: cfg.collapse_whitespace,
        }
    }

    pub fn to_config(&self) -> Result<MatcherConfig> {
        let score = |v: f64, flag: &str| SimilarityScore::new(v).map_err(|e| anyhow!("--{flag}: {e}"));
        let cfg = MatcherConfig {
            prefix_weight: self.prefix_weight,
            max_prefix: self.max_prefix,
            writein_threshold_lev: score(self.writein_lev, "writein-lev")?,
            writein_threshold_jw: score(self.writein_jw, "writein-jw")?,
            garbage_min_alnum: self.garbage_min_alnum,
            case_fold: self.case_fold,
            position_keyed: !self.scan_all_contests,
            collapse_whitespace: self.collapse_whitespace,
        };
        cfg.jaro_winkler().map_err(|e| anyhow!("{e}"))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Print candidate names without IDs.
    #[arg(long)]
    pub no_ids: bool,
    /// Add the Mark May / Mark Day ballots to the Governor contest.
    #[arg(long)]
    pub similar_pair: bool,
    /// Minimum edit distance between candidate IDs of one contest.
    #[arg(long, default_value_t = DEFAULT_ID_D_MIN)]
    pub id_d_min: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorruptArgs {
    /// Directory of clean ballot texts.
    #[arg(long)]
    pub ballots: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Image quality to emulate, in percent.
    #[arg(long, value_parser = ["100", "50", "20"], conflicts_with = "rate")]
    pub quality: Option<String>,
    /// Probability that a line is corrupted.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Never misread the leading contest number.
    #[arg(long)]
    pub no_first_char: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TallyArgs {
    /// Directory of per-ballot OCR texts, one `<ballot_id>.txt` per ballot.
    #[arg(long)]
    pub ballots: PathBuf,
    #[arg(long)]
    pub dictionary: PathBuf,
    /// Ground truth to score against.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Fail when more ballots than this do not fit the layout.
    #[arg(long, default_value_t = usize::MAX)]
    pub max_unreadable: usize,
    /// Number of partial tallies merged into the result.
    #[arg(long, default_value_t = 4)]
    pub shards: usize,
    #[command(flatten)]
    pub matcher: MatcherArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 10_000)]
    pub dict_size: usize,
    #[arg(long, default_value_t = 500)]
    pub queries: usize,
    /// Queries timed for Norvig correction, which is much slower.
    #[arg(long, default_value_t = 20)]
    pub norvig_queries: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub max_distance: u8,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[group(required = true, multiple = false)]
pub struct StatsArgs {
    /// One accuracy report per condition.
    #[arg(long, num_args = 2..)]
    pub anova: Vec<PathBuf>,
    /// Two accuracy reports over the same ballots.
    #[arg(long, num_args = 2)]
    pub paired: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    pub n: u8,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory, `out/exp<n>` by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run only the ballot set without candidate IDs.
    #[arg(long, conflicts_with = "ids_only")]
    pub no_ids: bool,
    /// Run only the ballot set with candidate IDs.
    #[arg(long)]
    pub ids_only: bool,
    /// Restrict experiment 2 to one quality level.
    #[arg(long, value_parser = ["100", "50", "20"])]
    pub quality: Option<String>,
    /// Noise replicates for experiment 2.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub replicates: u32,
    /// Also write every OCR ballot text.
    #[arg(long)]
    pub write_ballots: bool,
    #[command(flatten)]
    pub matcher: MatcherArgs,
}

impl ExperimentArgs {
    pub fn new(n: u8, seed: u64, out: PathBuf) -> Self {
        Self {
            n,
            seed,
            out: Some(out),
            no_ids: false,
            ids_only: false,
            quality: None,
            replicates: 5,
            write_ballots: false,
            matcher: MatcherArgs::default(),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(format!("exp{}", self.n)))
    }

    pub fn variants(&self) -> Vec<bool> {
        match (self.no_ids, self.ids_only) {
            (true, _) => vec![false],
            (_, true) => vec![true],
            _ => vec![true, false],
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    pub dictionary: PathBuf,
    /// Exit with a data error unless every contest is at least this far apart.
    #[arg(long)]
    pub min_distance: Option<usize>,
}
