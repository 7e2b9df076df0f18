//! The `taas` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 I/O error. Every failure
//! prints a single `error[<code>]: <message>` line on stderr.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use taas_api::{Config, ServeError};
use taas_core::analysis::{random_matrix_benchmark, BenchConfig};
use taas_core::matcher::synthetic::{generate, SyntheticSpec};
use taas_core::matcher::{
    read_baseline, run_conformity_experiment, suggest_for_taxonomy, write_baseline, Corpus, MatchConfig,
    MatchMethod, MappingSuggestion, DEFAULT_MOC, DEFAULT_MOC_VALUES,
};
use taas_core::review::PaperRecord;
use taas_core::store::{FileStore, Workspace};
use taas_core::{PaperId, Taxonomy, TaxonomyId};

#[derive(Parser, Debug)]
#[command(name = "taas", version, about = "Taxonomy service command line")]
pub struct Cli {
    /// Directory of the document store.
    #[arg(long, global = true, env = "TAAS_STORAGE_PATH")]
    pub store: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Start the HTTP API.
    Serve(ServeArgs),
    /// Match a corpus directory against a stored taxonomy.
    Import(ImportArgs),
    /// Timing runs.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Matcher experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Print a stored taxonomy as canonical JSON.
    Export(ExportArgs),
    /// Store a taxonomy from a JSON file.
    ImportTaxonomy(ImportTaxonomyArgs),
    /// List stored taxonomies as `id<TAB>version<TAB>name`.
    List,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Address to listen on, overriding the configuration.
    #[arg(long)]
    pub listen: Option<std::net::SocketAddr>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Regex,
    Dice,
    Levenshtein,
    Fuzzysort,
}

impl From<Method> for MatchMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Regex => MatchMethod::Regex,
            Method::Dice => MatchMethod::Dice,
            Method::Levenshtein => MatchMethod::Levenshtein,
            Method::Fuzzysort => MatchMethod::Fuzzysort,
        }
    }
}

#[derive(Args, Debug)]
pub struct ImportArgs {
    /// Corpus directory with `manifest.json` and `<paper-id>.txt` files.
    pub corpus: PathBuf,
    #[arg(long)]
    pub taxonomy: String,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Similarity threshold; defaults to the method's own default.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MOC)]
    pub moc: u32,
    /// Print the new suggestions as CSV without changing the store.
    #[arg(long)]
    pub dry_run: bool,
    #[arg(long)]
    pub no_synonyms: bool,
}

#[derive(Subcommand, Debug)]
pub enum BenchCommand {
    /// Correlation matrix creation time over taxonomy sizes.
    Matrix(BenchArgs),
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated taxonomy sizes. Defaults to 10,20,...,200.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// Conformity of every method and MOC value with a manual baseline.
    Conformity(ConformityArgs),
    /// Write a seeded synthetic corpus, taxonomy and baseline.
    SynthCorpus(SynthArgs),
}

#[derive(Args, Debug)]
pub struct ConformityArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// A taxonomy JSON file, or the id of a stored taxonomy.
    #[arg(long)]
    pub taxonomy: String,
    /// CSV with `paper_id` and `concept_id` or `concept` columns.
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub moc: Option<Vec<u32>>,
    #[arg(long)]
    pub no_synonyms: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub papers: usize,
    #[arg(long, default_value_t = 20)]
    pub concepts: usize,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    pub taxonomy: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ImportTaxonomyArgs {
    pub file: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] taas_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Serve(#[from] ServeError),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(taas_core::Error::Io(_)) | CliError::Io { .. } => "io",
            CliError::Domain(e) => e.code(),
            CliError::Serve(ServeError::Config(_)) => "config",
            CliError::Serve(ServeError::Store(e)) => e.code(),
            CliError::Serve(ServeError::Io(_)) => "bind",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(taas_core::Error::Io(_)) | CliError::Io { .. } => 3,
            CliError::Domain(_) => 2,
            CliError::Serve(ServeError::Config(_)) => 1,
            CliError::Serve(ServeError::Store(taas_core::Error::Io(_))) | CliError::Serve(ServeError::Io(_)) => 3,
            CliError::Serve(ServeError::Store(_)) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(io_at(path))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(io_at(path)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_at(Path::new("<stdout>"))),
    }
}

fn one_line(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses `args` and runs the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let message = message.strip_prefix("error: ").unwrap_or(&message);
            eprintln!("error[usage]: {}", one_line(message));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), one_line(&e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let store = cli.store;
    match cli.command {
        Command::Serve(args) => serve(store, args),
        Command::Import(args) => import(&workspace(store)?, args),
        Command::Bench(BenchCommand::Matrix(args)) => bench(args),
        Command::Experiment(ExperimentCommand::Conformity(args)) => conformity(store, args),
        Command::Experiment(ExperimentCommand::SynthCorpus(args)) => synth(args),
        Command::Export(args) => {
            let json = workspace(store)?.export(&TaxonomyId::from(args.taxonomy))?;
            emit(args.output.as_deref(), &format!("{json}\n"))
        }
        Command::ImportTaxonomy(args) => {
            let text = read(&args.file)?;
            let tax = workspace(store)?.import(&text)?;
            println!("{}", tax.id());
            Ok(())
        }
        Command::List => {
            for tax in workspace(store)?.list() {
                println!("{}\t{}\t{}", tax.id(), tax.version(), tax.name());
            }
            Ok(())
        }
    }
}

fn workspace(store: Option<PathBuf>) -> CliResult<Workspace> {
    let root = store.ok_or_else(|| CliError::Usage("--store or TAAS_STORAGE_PATH is required".into()))?;
    Ok(Workspace::open(Arc::new(FileStore::open(&root)?))?)
}

fn serve(store: Option<PathBuf>, args: ServeArgs) -> CliResult<()> {
    let mut config = Config::load(args.config.as_deref()).map_err(ServeError::from)?;
    if store.is_some() {
        config.storage_path = store;
    }
    if let Some(listen) = args.listen {
        config.listen = listen;
    }
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .try_init();
    let runtime = tokio::runtime::Runtime::new().map_err(io_at(Path::new("<runtime>")))?;
    runtime.block_on(taas_api::serve(config))?;
    Ok(())
}

/// Adds corpus papers the taxonomy does not have yet and returns the ids of
/// every corpus paper.
fn add_corpus_papers(tax: &mut Taxonomy, corpus: &Corpus) -> taas_core::Result<Vec<PaperId>> {
    let ids: Vec<PaperId> = corpus
        .papers
        .iter()
        .filter_map(|r| r.id.as_deref().map(PaperId::from))
        .collect();
    let missing: Vec<PaperRecord> = corpus
        .papers
        .iter()
        .filter(|r| r.id.as_deref().is_some_and(|id| tax.paper(&PaperId::from(id)).is_none()))
        .cloned()
        .collect();
    if !missing.is_empty() {
        let outcome = tax.import_papers(missing);
        if let Some(rejected) = outcome.rejected.first() {
            return Err(taas_core::Error::Validation {
                field: "manifest",
                message: format!("paper {} rejected: {}", rejected.index, rejected.reason),
            });
        }
    }
    Ok(ids)
}

fn suggestions_csv(tax: &Taxonomy, suggestions: &[&MappingSuggestion]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["paper_id", "concept_id", "concept", "occurrence_count", "method"])
        .expect("in-memory csv");
    for s in suggestions {
        let name = tax.concept(&s.concept_id).map_or("", |c| c.name.as_str());
        writer
            .write_record([
                s.paper_id.as_str(),
                s.concept_id.as_str(),
                name,
                &s.occurrence_count.to_string(),
                s.method.as_str(),
            ])
            .expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf-8")
}

fn import(ws: &Workspace, args: ImportArgs) -> CliResult<()> {
    let corpus = Corpus::load(&args.corpus)?;
    let id = TaxonomyId::from(args.taxonomy);
    let mut config = MatchConfig::new(args.method.into())
        .with_moc(args.moc)
        .with_synonyms(!args.no_synonyms);
    if let Some(threshold) = args.threshold {
        config = config.with_threshold(threshold);
    }
    config.validate()?;

    if args.dry_run {
        let mut scratch = (*ws.get(&id)?).clone();
        let ids = add_corpus_papers(&mut scratch, &corpus)?;
        let suggestions = suggest_for_taxonomy(&scratch, &config, Some(&ids))?;
        let delta = scratch.suggestion_delta(&suggestions);
        return emit(None, &suggestions_csv(&scratch, &delta));
    }
    let ((added, changed), tax) = ws.mutate(&id, None, |t| {
        let before = t.papers().len();
        let ids = add_corpus_papers(t, &corpus)?;
        let suggestions = suggest_for_taxonomy(t, &config, Some(&ids))?;
        let changed = t.apply_suggestions(&suggestions)?;
        Ok((t.papers().len() - before, changed))
    })?;
    println!(
        "papers_added={added} mappings_changed={changed} version={}",
        tax.version()
    );
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let mut config = BenchConfig {
        repetitions: args.repetitions,
        seed: args.seed,
        ..BenchConfig::default()
    };
    if let Some(sizes) = args.sizes {
        config.sizes = sizes;
    }
    if config.sizes.is_empty() || config.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes must list positive sizes".into()));
    }
    if config.repetitions == 0 {
        return Err(CliError::Usage("--repetitions must be at least 1".into()));
    }
    emit(args.output.as_deref(), &random_matrix_benchmark(&config).to_csv())
}

fn load_taxonomy(store: Option<PathBuf>, spec: &str) -> CliResult<Taxonomy> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(Taxonomy::from_json(&read(path)?)?);
    }
    match store {
        Some(_) => Ok((*workspace(store)?.get(&TaxonomyId::from(spec))?).clone()),
        None => Err(CliError::Io {
            path: path.to_owned(),
            source: io::Error::new(io::ErrorKind::NotFound, "no such taxonomy file and no --store given"),
        }),
    }
}

fn conformity(store: Option<PathBuf>, args: ConformityArgs) -> CliResult<()> {
    let tax = load_taxonomy(store, &args.taxonomy)?;
    let corpus = Corpus::load(&args.corpus)?;
    let baseline = read_baseline(&read(&args.baseline)?, &tax)?;
    let moc = args.moc.unwrap_or_else(|| DEFAULT_MOC_VALUES.to_vec());
    let report = run_conformity_experiment(&corpus.documents(), &tax, &baseline, &moc, !args.no_synonyms)?;
    emit(args.output.as_deref(), &report.to_csv())
}

fn synth(args: SynthArgs) -> CliResult<()> {
    let spec = SyntheticSpec {
        papers: args.papers,
        concepts: args.concepts,
        ..SyntheticSpec::default()
    };
    let synthetic = generate(&spec, args.seed)?;
    synthetic.corpus.write(&args.out)?;
    let tax_path = args.out.join("taxonomy.json");
    fs::write(&tax_path, synthetic.taxonomy.to_json()).map_err(io_at(&tax_path))?;
    let baseline_path = args.out.join("baseline.csv");
    fs::write(&baseline_path, write_baseline(&synthetic.baseline, &synthetic.taxonomy))
        .map_err(io_at(&baseline_path))?;
    println!(
        "papers={} concepts={} baseline_pairs={}",
        synthetic.corpus.papers.len(),
        synthetic.taxonomy.concepts().len(),
        synthetic.baseline.len()
    );
    Ok(())
}
