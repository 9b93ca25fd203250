//! Command-line front end.
//!
//! Every command writes to the given output and error sinks and returns a
//! process exit code: 0 on success, 1 when the run finished but found
//! problems (failed rows, a misaligned inventory), 2 when it could not run
//! (bad configuration, unreadable input).
//!
//! Settings come from an optional TOML config file (`--config`) and are
//! overridden by flags. Relative paths in the config file are resolved
//! against the file's directory.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{self, InfoOptions, LabeledVectorSet, ModelScope, Smoothing};
use crate::corpus::{self, ConvertOptions, CorpusSchema};
use crate::folding::{self, DiffReport, FoldMap, ValidationReport};
use crate::g2p::{Backend, Lexicon, NucleusRule, RuleSet, SyllableTable};
use crate::inventory::{self, CountProfile, Inventory};
use crate::stream::{IpaSegment, PhonemeStream};

pub const INVENTORY_ENV: &str = "PHONOSTREAM_INVENTORY";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROBLEMS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Inventory(#[from] inventory::InventoryError),
    #[error(transparent)]
    FoldMap(#[from] folding::FoldMapError),
    #[error(transparent)]
    RuleFile(#[from] crate::g2p::RuleFileError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

fn config_error(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "phonostream",
    version,
    about = "Grapheme-to-phoneme conversion, folding and phonological statistics"
)]
pub struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert lines of orthographic text to phoneme streams.
    Convert(ConvertArgs),
    /// Compare produced phonemes against a reference inventory.
    Validate(ValidateArgs),
    /// Rank inventories by how well they match the produced phonemes.
    Match(MatchArgs),
    /// Convert a CSV corpus, keeping its metadata columns.
    Corpus(CorpusArgs),
    /// Frequencies, inventory comparison, feature eligibility, tests.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Mean unigram utterance information per child-age year.
    Info(InfoArgs),
    /// Report authoring problems in a fold map.
    CheckMap(CheckMapArgs),
    /// Suggest fold-map entries for unknown segments.
    Suggest(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct BackendArgs {
    /// Backend as KIND[=FILE]: rules=FILE, lexicon=FILE, syllabary=FILE or passthrough.
    #[arg(long)]
    pub backend: Option<String>,
    /// Rule file used for words missing from a lexicon.
    #[arg(long)]
    pub fallback_rules: Option<PathBuf>,
    /// Consonants that can carry tone in a syllabary backend (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub syllabic_consonants: Vec<String>,
    /// Emit tones as separate tokens (syllabary backends only).
    #[arg(long = "split-tones", alias = "split_tones")]
    pub split_tones: bool,
    /// Emit WORD_BOUNDARY between words.
    #[arg(long = "keep_word_boundaries", alias = "keep-word-boundaries")]
    pub keep_word_boundaries: bool,
    /// Skip folding; output phonemes exactly as the backend produced them.
    #[arg(long)]
    pub uncorrected: bool,
    /// Fold map applied to backend output.
    #[arg(long = "map")]
    pub fold_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Input file, one utterance per line (stdin when absent).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InventoryArgs {
    /// Inventory CSV.
    #[arg(long, env = INVENTORY_ENV)]
    pub inventory: Option<PathBuf>,
    /// Inventory id within the CSV
    #[arg(long)]
    pub inventory_id: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Observed phonemes: stream lines, a corpus CSV with a phonemized column, or a summary JSON.
    #[arg(long)]
    pub observed: PathBuf,
    /// Fold map applied to the observed streams first.
    #[arg(long = "map")]
    pub fold_map: Option<PathBuf>,
    #[command(flatten)]
    pub inventory: InventoryArgs,
    /// Residual segments accepted in either direction.
    #[arg(long, value_delimiter = ',')]
    pub allow: Vec<String>,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub observed: PathBuf,
    #[arg(long = "map")]
    pub fold_map: Option<PathBuf>,
    #[arg(long, env = INVENTORY_ENV)]
    pub inventory: Option<PathBuf>,
    /// Only consider inventories with this ISO 639-3 code.
    #[arg(long)]
    pub iso: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Input corpus CSV
    #[arg(long, short)]
    pub input: PathBuf,
    /// Converted corpus CSV to write
    #[arg(long, short)]
    pub output: PathBuf,
    /// `field=column` lines mapping record fields to input columns.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Summary JSON path (default: OUTPUT.summary.json).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Worker threads (default: 1)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sort output rows by target child age.
    #[arg(long)]
    pub sort_by_age: bool,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Segment token frequencies.
    Freq {
        /// Stream lines or a CSV with a phonemized column.
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Venn partition of two phoneme sets.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Features with enough + and - segments in an inventory.
    Features {
        #[command(flatten)]
        inventory: InventoryArgs,
        #[arg(long, default_value_t = 4)]
        min_each: usize,
    },
    /// One-sided exact binomial test.
    Binomial {
        #[arg(long)]
        successes: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
    },
    /// Mean silhouette score of labelled vectors.
    Silhouette {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SmoothingArg {
    None,
    AddOne,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Converted corpus CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Fit a model per age bucket instead of one pooled model.
    #[arg(long)]
    pub per_bucket: bool,
    /// Utterances sampled per bucket (seeded by --seed, default 0).
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SmoothingArg::None)]
    pub smoothing: SmoothingArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckMapArgs {
    #[arg(long = "map")]
    pub fold_map: PathBuf,
    /// Exit 1 when there are diagnostics.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub json: bool,
}

/// Settings read from a config file; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<String>,
    pub fallback_rules: Option<PathBuf>,
    pub syllabic_consonants: Option<Vec<String>>,
    pub fold_map: Option<PathBuf>,
    pub inventory: Option<PathBuf>,
    pub inventory_id: Option<u32>,
    pub keep_word_boundaries: Option<bool>,
    pub uncorrected: Option<bool>,
    pub split_tones: Option<bool>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub schema: Option<PathBuf>,
    pub allow: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: FileConfig =
            toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        rebase(&mut config.fallback_rules);
        rebase(&mut config.fold_map);
        rebase(&mut config.inventory);
        rebase(&mut config.schema);
        if let Some(spec) = &config.backend {
            if let Some((kind, file)) = spec.split_once('=') {
                let file = Path::new(file);
                if file.is_relative() {
                    config.backend = Some(format!("{kind}={}", base.join(file).display()));
                }
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Rules,
    Lexicon,
    Syllabary,
    Passthrough,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub file: Option<PathBuf>,
    pub fallback_rules: Option<PathBuf>,
    pub syllabic_consonants: Vec<String>,
}

impl BackendSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (kind, file) = match spec.split_once('=') {
            Some((k, f)) => (k.trim(), Some(PathBuf::from(f.trim()))),
            None => (spec.trim(), None),
        };
        let kind = match kind {
            "rules" => BackendKind::Rules,
            "lexicon" => BackendKind::Lexicon,
            "syllabary" => BackendKind::Syllabary,
            "passthrough" => BackendKind::Passthrough,
            other => return Err(config_error(format!("unknown backend {other:?}"))),
        };
        if kind != BackendKind::Passthrough && file.is_none() {
            return Err(config_error(format!("backend {spec:?} needs a file: KIND=FILE")));
        }
        Ok(BackendSpec {
            kind,
            file,
            fallback_rules: None,
            syllabic_consonants: Vec::new(),
        })
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub backend: Option<BackendSpec>,
    pub fold_map: Option<PathBuf>,
    pub inventory: Option<PathBuf>,
    pub inventory_id: Option<u32>,
    pub keep_word_boundaries: bool,
    pub uncorrected: bool,
    pub split_tones: bool,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
    pub schema: Option<PathBuf>,
    pub allow: Vec<String>,
}

impl RunConfig {
    pub fn resolve(file: &FileConfig, args: &BackendArgs) -> Result<Self, CliError> {
        let backend = match args.backend.as_deref().or(file.backend.as_deref()) {
            Some(spec) => {
                let mut spec = BackendSpec::parse(spec)?;
                spec.fallback_rules = args.fallback_rules.clone().or_else(|| file.fallback_rules.clone());
                spec.syllabic_consonants = if args.syllabic_consonants.is_empty() {
                    file.syllabic_consonants.clone().unwrap_or_default()
                } else {
                    args.syllabic_consonants.clone()
                };
                Some(spec)
            }
            None => None,
        };
        let config = RunConfig {
            backend,
            fold_map: args.fold_map.clone().or_else(|| file.fold_map.clone()),
            inventory: file.inventory.clone(),
            inventory_id: file.inventory_id,
            keep_word_boundaries: args.keep_word_boundaries || file.keep_word_boundaries.unwrap_or(false),
            uncorrected: args.uncorrected || file.uncorrected.unwrap_or(false),
            split_tones: args.split_tones || file.split_tones.unwrap_or(false),
            input: None,
            output: None,
            workers: file.workers.unwrap_or(1),
            seed: file.seed.unwrap_or(0),
            schema: file.schema.clone(),
            allow: file.allow.clone().unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.split_tones && self.backend.as_ref().map(|b| b.kind) != Some(BackendKind::Syllabary) {
            return Err(config_error("--split-tones only applies to syllabary backends"));
        }
        if self.workers == 0 {
            return Err(config_error("workers must be at least 1"));
        }
        Ok(())
    }

    pub fn build_backend(&self) -> Result<Backend, CliError> {
        let spec = self
            .backend
            .as_ref()
            .ok_or_else(|| config_error("no backend given (use --backend KIND[=FILE])"))?;
        let file = spec.file.as_deref();
        Ok(match spec.kind {
            BackendKind::Rules => Backend::Rules(RuleSet::from_path(file.expect("checked on parse"))?),
            BackendKind::Lexicon => Backend::Lexicon {
                lexicon: Lexicon::from_path(file.expect("checked on parse"))?,
                fallback: spec.fallback_rules.as_deref().map(RuleSet::from_path).transpose()?,
            },
            BackendKind::Syllabary => {
                let mut table = SyllableTable::from_path(file.expect("checked on parse"))?;
                let consonants = spec
                    .syllabic_consonants
                    .iter()
                    .map(|s| IpaSegment::new(s).map_err(|e| config_error(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                table.nucleus = NucleusRule::with_syllabic_consonants(consonants);
                Backend::Syllabary {
                    table,
                    split_tones: self.split_tones,
                }
            }
            BackendKind::Passthrough => Backend::Passthrough,
        })
    }

    /// The fold map to apply: none when uncorrected, an empty map when no
    /// file is configured.
    pub fn load_fold_map(&self) -> Result<Option<FoldMap>, CliError> {
        if self.uncorrected {
            return Ok(None);
        }
        Ok(Some(match &self.fold_map {
            Some(path) => FoldMap::from_path(path)?,
            None => FoldMap::default(),
        }))
    }
}

/// Parses arguments and runs the command against the process streams.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(cli, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = (|| {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        match cli.command {
            Command::Convert(args) => cmd_convert(&file, args, out, err),
            Command::Validate(args) => cmd_validate(&file, args, out),
            Command::Suggest(args) => cmd_suggest(&file, args, out),
            Command::Match(args) => cmd_match(&file, args, out),
            Command::Corpus(args) => cmd_corpus(&file, args, out, err),
            Command::Stats(cmd) => cmd_stats(&file, cmd, out),
            Command::Info(args) => cmd_info(&file, args, out),
            Command::CheckMap(args) => cmd_check_map(args, out),
        }
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(std::fs::File::open(p).map_err(|source| {
            CliError::Io {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(BufReader::new(std::io::stdin())),
    })
}

fn create_output(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    let file = std::fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(std::io::BufWriter::new(file))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One output line per input line. Lines that fail are written empty and
/// reported on `err`.
pub fn cmd_convert(
    file: &FileConfig,
    args: ConvertArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut config = RunConfig::resolve(file, &args.backend)?;
    config.input = args.input;
    config.output = args.output;
    let backend = config.build_backend()?;
    let fold_map = config.load_fold_map()?;

    let input = open_input(config.input.as_deref())?;
    let mut file_out;
    let sink: &mut dyn Write = match &config.output {
        Some(path) => {
            file_out = create_output(path)?;
            &mut file_out
        }
        None => out,
    };

    let mut failed = 0usize;
    for (number, line) in input.lines().enumerate() {
        let line = line?;
        match backend.convert_utterance(&line, config.keep_word_boundaries) {
            Ok(conversion) => {
                let stream = match &fold_map {
                    Some(map) => map.apply(&conversion.stream),
                    None => conversion.stream,
                };
                writeln!(sink, "{}", stream.emit(config.keep_word_boundaries))?;
            }
            Err(e) => {
                failed += 1;
                writeln!(sink)?;
                writeln!(err, "line {}: {e}", number + 1)?;
            }
        }
    }
    sink.flush()?;
    Ok(if failed > 0 { EXIT_PROBLEMS } else { EXIT_OK })
}

/// Observed streams from a stream file or from the phonemized column of a CSV.
pub fn load_streams(path: &Path) -> Result<Vec<PhonemeStream>, CliError> {
    if path.extension().is_some_and(|e| e == "csv") {
        let mut reader = csv::Reader::from_path(path)?;
        let column = reader
            .headers()?
            .iter()
            .position(|h| h == corpus::PHONEMIZED_COLUMN)
            .ok_or_else(|| config_error(format!("{}: no phonemized column", path.display())))?;
        let mut streams = Vec::new();
        for record in reader.records() {
            streams.push(PhonemeStream::parse(record?.get(column).unwrap_or("")));
        }
        Ok(streams)
    } else {
        Ok(read_text(path)?.lines().map(PhonemeStream::parse).collect())
    }
}

/// Observed segment set, folded by `map` when given. A summary JSON holds
/// a bare set, so the map is applied to each segment on its own there.
pub fn load_observed(path: &Path, map: Option<&FoldMap>) -> Result<BTreeSet<IpaSegment>, CliError> {
    let streams = if path.extension().is_some_and(|e| e == "json") {
        #[derive(Deserialize)]
        struct Summary {
            observed: BTreeSet<IpaSegment>,
        }
        let summary: Summary =
            serde_json::from_str(&read_text(path)?).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        summary
            .observed
            .into_iter()
            .map(|s| PhonemeStream::from_segments([s]))
            .collect()
    } else {
        load_streams(path)?
    };
    Ok(streams
        .iter()
        .flat_map(|s| match map {
            Some(map) => map.apply(s).segment_types(),
            None => s.segment_types(),
        })
        .collect())
}

fn load_inventory(file: &FileConfig, args: &InventoryArgs) -> Result<Inventory, CliError> {
    let path = args
        .inventory
        .clone()
        .or_else(|| file.inventory.clone())
        .ok_or_else(|| config_error(format!("no inventory file (use --inventory or {INVENTORY_ENV})")))?;
    let id = args
        .inventory_id
        .or(file.inventory_id)
        .ok_or_else(|| config_error("no inventory id (use --inventory-id)"))?;
    inventory::load_inventories_from_path(&path)?
        .into_iter()
        .find(|inv| inv.id == id)
        .ok_or_else(|| config_error(format!("inventory {id} is not in {}", path.display())))
}

fn validation(file: &FileConfig, args: &ValidateArgs) -> Result<(DiffReport, Inventory), CliError> {
    let inventory = load_inventory(file, &args.inventory)?;
    let map_path = args.fold_map.clone().or_else(|| file.fold_map.clone());
    let map = map_path.as_deref().map(FoldMap::from_path).transpose()?;
    let observed = load_observed(&args.observed, map.as_ref())?;
    Ok((folding::diff_inventory(&observed, &inventory), inventory))
}

/// Exit 0 when unknown and unseen are empty apart from allowed segments.
pub fn cmd_validate(file: &FileConfig, args: ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (report, inventory) = validation(file, &args)?;
    let suggestions = folding::suggest_mappings(&report, &inventory);
    let view = ValidationReport::new(&report, suggestions);
    if args.json {
        writeln!(out, "{}", view.to_json())?;
    } else {
        write!(out, "{}", view.to_text())?;
    }
    let allow_list = if args.allow.is_empty() {
        file.allow.clone().unwrap_or_default()
    } else {
        args.allow.clone()
    };
    let allowed = allow_list
        .iter()
        .map(|s| IpaSegment::new(s).map_err(|e| config_error(e.to_string())))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(if report.is_aligned_except(&allowed) {
        EXIT_OK
    } else {
        EXIT_PROBLEMS
    })
}

pub fn cmd_suggest(file: &FileConfig, args: ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (report, inventory) = validation(file, &args)?;
    let suggestions = folding::suggest_mappings(&report, &inventory);
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&suggestions).expect("serializes")
        )?;
    } else {
        for s in &suggestions {
            writeln!(out, "{} -> {}    # {}", s.unknown, s.candidate, s.reason)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_match(file: &FileConfig, args: MatchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let path = args
        .inventory
        .or_else(|| file.inventory.clone())
        .ok_or_else(|| config_error(format!("no inventory file (use --inventory or {INVENTORY_ENV})")))?;
    let mut candidates = inventory::load_inventories_from_path(&path)?;
    if let Some(iso) = &args.iso {
        candidates.retain(|inv| &inv.iso_code == iso);
    }
    let map_path = args.fold_map.or_else(|| file.fold_map.clone());
    let map = map_path.as_deref().map(FoldMap::from_path).transpose()?;
    let observed = load_observed(&args.observed, map.as_ref())?;
    let profile = CountProfile::of_segments(&observed);
    let ranked = inventory::best_match(&profile, &observed, &candidates)?;
    writeln!(
        out,
        "observed: {} types, {} consonants, {} vowels, {} diphthongs",
        profile.n_types, profile.n_consonants, profile.n_vowels, profile.n_diphthongs
    )?;
    writeln!(
        out,
        "{:>4}  {:>6}  {:>8}  {:>7}  language",
        "rank", "id", "distance", "jaccard"
    )?;
    for (rank, m) in ranked.iter().take(args.top).enumerate() {
        writeln!(
            out,
            "{:>4}  {:>6}  {:>8}  {:>7.4}  {} ({})",
            rank + 1,
            m.inventory.id,
            m.distance,
            m.jaccard,
            m.inventory.language_name,
            m.inventory.iso_code
        )?;
    }
    Ok(EXIT_OK)
}

fn load_schema(path: Option<&Path>) -> Result<CorpusSchema, CliError> {
    match path {
        Some(p) => Ok(CorpusSchema::parse_mapping(&read_text(p)?)?),
        None => Ok(CorpusSchema::default()),
    }
}

pub fn cmd_corpus(
    file: &FileConfig,
    args: CorpusArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut config = RunConfig::resolve(file, &args.backend)?;
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    config.validate()?;
    let schema = load_schema(args.schema.as_deref().or(config.schema.as_deref()))?;
    let backend = config.build_backend()?;
    let fold_map = config.load_fold_map()?;

    let mut corpus = corpus::read_corpus_path(&args.input, &schema)?;
    for row in &corpus.skipped {
        writeln!(err, "skipped line {}: {}", row.line, row.message)?;
    }
    let options = ConvertOptions {
        keep_word_boundaries: config.keep_word_boundaries,
        uncorrected: config.uncorrected,
        workers: config.workers,
    };
    let mut summary = corpus::convert_corpus(&mut corpus.records, &backend, fold_map.as_ref(), options)?;
    summary.skipped_rows = corpus.skipped.len();
    if args.sort_by_age {
        corpus::sort_by_age(&mut corpus.records);
    }
    for record in corpus.records.iter().filter(|r| r.errors.is_some()) {
        writeln!(err, "line {}: {}", record.line, record.errors.as_deref().unwrap_or(""))?;
    }

    let mut writer = create_output(&args.output)?;
    corpus::write_corpus(&corpus.records, &corpus.header, &mut writer)?;
    writer.flush()?;
    let summary_path = args.summary.unwrap_or_else(|| {
        let mut name = args.output.clone().into_os_string();
        name.push(".summary.json");
        PathBuf::from(name)
    });
    std::fs::write(&summary_path, summary.to_json() + "\n").map_err(|source| CliError::Io {
        path: summary_path.clone(),
        source,
    })?;
    writeln!(
        out,
        "{} rows, {} converted, {} failed, {} skipped, {} segment types",
        summary.rows,
        summary.converted,
        summary.failed,
        summary.skipped_rows,
        summary.observed.len()
    )?;
    Ok(if summary.failed > 0 || summary.skipped_rows > 0 {
        EXIT_PROBLEMS
    } else {
        EXIT_OK
    })
}

pub fn cmd_stats(file: &FileConfig, command: StatsCommand, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        StatsCommand::Freq { input, json } => {
            let streams = load_streams(&input)?;
            let counts = analysis::frequency_table(&streams);
            if json {
                let map: serde_json::Map<String, serde_json::Value> =
                    counts.iter().map(|(s, n)| (s.to_string(), (*n).into())).collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&map).expect("serializes"))?;
            } else {
                write!(out, "{}", analysis::format_frequency_table(&counts))?;
            }
        }
        StatsCommand::Compare { a, b, json } => {
            let set_a = load_observed(&a, None)?;
            let set_b = load_observed(&b, None)?;
            let report = analysis::compare_inventories(&set_a, &set_b);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializes"))?;
            } else {
                let name = |p: &Path| {
                    p.file_stem()
                        .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
                };
                write!(out, "{}", report.to_text(&name(&a), &name(&b)))?;
            }
        }
        StatsCommand::Features { inventory, min_each } => {
            let inventory = load_inventory(file, &inventory)?;
            for feature in analysis::eligible_features(&inventory, min_each) {
                writeln!(out, "{feature}")?;
            }
        }
        StatsCommand::Binomial { successes, trials, p0 } => {
            let p = analysis::binomial_test(successes, trials, p0)?;
            writeln!(out, "{p}")?;
        }
        StatsCommand::Silhouette { input, label_column } => {
            let text = read_text(&input)?;
            let set = LabeledVectorSet::from_csv(text.as_bytes(), &label_column)?;
            writeln!(out, "{}", analysis::silhouette(&set)?)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_info(file: &FileConfig, args: InfoArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let schema = load_schema(args.schema.as_deref().or(file.schema.as_deref()))?;
    let corpus = corpus::read_corpus_path(&args.input, &schema)?;
    let utterances = analysis::child_directed(&corpus.records);
    let options = InfoOptions {
        scope: if args.per_bucket {
            ModelScope::PerBucket
        } else {
            ModelScope::Pooled
        },
        sample_size: args.sample_size,
        seed: args.seed.or(file.seed).unwrap_or(0),
        smoothing: match args.smoothing {
            SmoothingArg::None => Smoothing::None,
            SmoothingArg::AddOne => Smoothing::AddOne,
        },
    };
    let curve = analysis::info_by_age(&utterances, options)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&curve).expect("serializes"))?;
    } else {
        write!(out, "{}", analysis::info_curve_csv(&curve))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_check_map(args: CheckMapArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let map = FoldMap::from_path(&args.fold_map)?;
    let diagnostics = map.check();
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&diagnostics).expect("serializes")
        )?;
    } else {
        for rule in &map.rules {
            let side = |segs: &[IpaSegment]| segs.iter().map(IpaSegment::as_str).collect::<Vec<_>>().join(" ");
            let rhs = if rule.rhs.is_empty() {
                "∅".to_string()
            } else {
                side(&rule.rhs)
            };
            writeln!(
                out,
                "line {:>3}  {:<12}  {:+}  {} -> {}",
                rule.line,
                rule.kind.label(),
                rule.token_delta(),
                side(&rule.lhs),
                rhs
            )?;
        }
        for d in &diagnostics {
            writeln!(out, "{d}")?;
        }
    }
    Ok(if args.strict && !diagnostics.is_empty() {
        EXIT_PROBLEMS
    } else {
        EXIT_OK
    })
}
