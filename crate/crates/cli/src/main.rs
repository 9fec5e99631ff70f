//! `mushaf`: operator command line over the corpus index, query lab and wiki.

mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result, anyhow, bail};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mushaf_core::corpus::CorpusIndex;
use mushaf_core::{
    AbjadTable, Grouping, Selection, SplitRequest, SplitResult, SplitTarget, SplitUnit, Stats, StatsReport,
    TashkeelMode, conventions, ingest_files, jummal,
};
use mushaf_core::stats::StatValue;
use mushaf_querylab::{
    QueryDefinition, ResultGrid, Store, ValidatedQuery, ValidationReport, Value, bind_parameters, build_store,
    execute_main, validate_query,
};
use mushaf_service::AppState;
use mushaf_wiki::{Decision, Principal, QueryDraft, Wiki, WikiArchive};
use serde::Serialize;
use serde_json::json;

use crate::config::{CliConfig, FileConfig, Overrides};

#[derive(Parser)]
#[command(name = "mushaf", version, about = "Quran corpus index, statistics, query lab and wiki")]
struct Cli {
    /// TOML configuration file; flags and environment variables override it.
    #[arg(long, global = true, env = "MUSHAF_CONFIG")]
    config: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Tanzil `surah|ayah|text` corpus file.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Directory holding surahs.tsv, pages.tsv, juz.tsv and rub.tsv
    /// (default: the corpus file's directory).
    #[arg(long, global = true)]
    meta_dir: Option<PathBuf>,
    /// Persisted corpus index.
    #[arg(long, global = true, env = "MUSHAF_INDEX")]
    index: Option<PathBuf>,
    /// SQLite query store.
    #[arg(long, global = true, env = "MUSHAF_STORE")]
    store: Option<PathBuf>,
    /// Wiki directory.
    #[arg(long, global = true)]
    wiki_dir: Option<PathBuf>,
    /// `letter<TAB>value` overrides for the abjad table.
    #[arg(long, global = true)]
    abjad_table: Option<PathBuf>,
    /// Address for `serve`.
    #[arg(long, global = true, env = "MUSHAF_LISTEN")]
    listen: Option<SocketAddr>,
    /// Query row cap.
    #[arg(long, global = true)]
    row_limit: Option<usize>,
    /// Query timeout in milliseconds.
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,
    /// Concurrent query jobs for `serve`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the index and query store from a corpus.
    Ingest {
        /// Corpus file (overrides --corpus).
        corpus: Option<PathBuf>,
    },
    /// Stats Manager report.
    Stats {
        #[command(subcommand)]
        target: StatsTarget,
    },
    /// Text Splitter.
    Split(SplitArgs),
    /// Abjad (jummal) value of a text.
    Jummal { text: String },
    /// Validate or run a query definition.
    Query {
        #[command(subcommand)]
        action: QueryAction,
    },
    /// Manage the query wiki.
    Wiki {
        #[command(subcommand)]
        action: WikiAction,
    },
    /// Serve the HTTP API.
    Serve,
    /// Report counting conventions against the reference totals.
    Conventions {
        /// Write the Markdown report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StatsTarget {
    Surah { n: i64 },
    Ayah { serial: i64 },
    Word { serial: i64 },
    /// Char offsets into the vocalized ayah text, end exclusive.
    Selection { ayah: u32, start: usize, end: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Letters,
    Words,
}

#[derive(Args)]
#[group(id = "target", required = true, multiple = false)]
struct TargetArgs {
    #[arg(long)]
    surah: Option<i64>,
    #[arg(long)]
    ayah: Option<i64>,
    #[arg(long)]
    word: Option<i64>,
    /// AYAH:START:END
    #[arg(long)]
    selection: Option<String>,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, value_enum, default_value = "letters")]
    unit: UnitArg,
    /// Keep tashkeel on each token.
    #[arg(long)]
    with_tashkeel: bool,
    /// Group identical tokens with counts.
    #[arg(long)]
    grouped: bool,
}

#[derive(Args)]
struct QuerySource {
    /// Draft JSON file or a plain `.sql` file.
    #[arg(required_unless_present = "wiki")]
    file: Option<PathBuf>,
    /// Use a wiki query instead of a file.
    #[arg(long, conflicts_with = "file")]
    wiki: Option<String>,
}

#[derive(Subcommand)]
enum QueryAction {
    Validate {
        #[command(flatten)]
        source: QuerySource,
    },
    Run {
        #[command(flatten)]
        source: QuerySource,
        /// Parameter binding, repeatable: `@SurahNo=2`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
}

#[derive(Subcommand)]
enum WikiAction {
    /// List queries.
    List,
    /// Add a draft from a JSON or `.sql` file.
    Add {
        file: PathBuf,
        #[arg(long, default_value = "operator")]
        user: String,
    },
    /// Submit a draft for review.
    Submit {
        id: String,
        #[arg(long, default_value = "operator")]
        user: String,
    },
    /// Publish a submitted query, or add, submit and publish a file.
    Publish {
        /// Query id or draft file.
        target: String,
        /// Topic path, `/` separated.
        #[arg(long)]
        topic: String,
        #[arg(long, default_value = "operator")]
        user: String,
    },
    /// Reject a submitted query back to draft.
    Reject {
        id: String,
        #[arg(long)]
        reason: String,
        #[arg(long, default_value = "operator")]
        user: String,
    },
    /// Write the wiki and its documentation to an archive file.
    Export { file: PathBuf },
    /// Replace the wiki with an archive file.
    Import { file: PathBuf },
}

struct Ctx {
    cfg: CliConfig,
    json: bool,
}

impl Ctx {
    fn table(&self) -> Result<AbjadTable> {
        let mut table = AbjadTable::mashriqi();
        if let Some(path) = &self.cfg.abjad_table {
            let f = File::open(path).with_context(|| format!("{}: cannot open abjad table", path.display()))?;
            table.apply_tsv(BufReader::new(f))?;
        }
        Ok(table)
    }

    fn ingest(&self, corpus: &Path) -> Result<CorpusIndex> {
        if !corpus.is_file() {
            bail!("{}: corpus file not found", corpus.display());
        }
        Ok(ingest_files(corpus, &self.cfg.meta_dir_for(corpus), &mushaf_core::TextRules::default())?)
    }

    /// The persisted index, or a fresh ingest of the corpus when none exists.
    fn index(&self, table: &AbjadTable) -> Result<CorpusIndex> {
        let index = if self.cfg.index.is_file() {
            CorpusIndex::load(&self.cfg.index)?
        } else if self.cfg.corpus.is_file() {
            self.ingest(&self.cfg.corpus)?
        } else {
            bail!(
                "no index at {} and no corpus at {}; run `mushaf ingest <corpus>`",
                self.cfg.index.display(),
                self.cfg.corpus.display()
            );
        };
        let missing = table.uncovered(index.rules());
        if !missing.is_empty() {
            bail!("abjad table has no value for {missing:?}");
        }
        Ok(index)
    }

    fn store(&self, index: &CorpusIndex, table: &AbjadTable) -> Result<Store> {
        if !self.cfg.store.is_file() {
            build_store(index, table, &self.cfg.store)?;
        }
        Ok(Store::open(&self.cfg.store)?)
    }

    fn wiki(&self) -> Result<Wiki> {
        Ok(Wiki::open(&self.cfg.wiki_dir)?)
    }

    /// Prints `value` as compact JSON or via `human`.
    fn emit<T: Serialize>(&self, value: &T, human: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        let mut out = std::io::stdout().lock();
        if self.json {
            serde_json::to_writer(&mut out, value)?;
            writeln!(out)?;
        } else {
            human(&mut out)?;
        }
        Ok(())
    }
}

fn stat_value(v: &StatValue) -> String {
    match v {
        StatValue::Int(n) => n.to_string(),
        StatValue::Text(s) => s.clone(),
    }
}

fn print_report(ctx: &Ctx, r: &StatsReport) -> Result<()> {
    ctx.emit(r, |out| {
        for row in &r.rows {
            writeln!(out, "{}\t{}", row.label, stat_value(&row.value))?;
        }
        Ok(())
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "NULL".into(),
        Value::Integer(n) => n.to_string(),
        Value::Real(x) => x.to_string(),
        Value::Text(s) => s.clone(),
        Value::Blob(b) => format!("<{} bytes>", b.len()),
    }
}

fn print_grid(ctx: &Ctx, grid: &ResultGrid) -> Result<()> {
    ctx.emit(grid, |out| {
        writeln!(out, "{}", grid.columns.join("\t"))?;
        for row in &grid.rows {
            writeln!(out, "{}", row.iter().map(cell).collect::<Vec<_>>().join("\t"))?;
        }
        if grid.truncated {
            writeln!(out, "(truncated at {} rows)", grid.rows.len())?;
        }
        Ok(())
    })
}

fn read_draft(path: &Path) -> Result<QueryDraft> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read query file", path.display()))?;
    if path.extension().is_some_and(|e| e == "sql") {
        let title = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return Ok(QueryDraft {
            title,
            main_sql: text,
            ..QueryDraft::default()
        });
    }
    serde_json::from_str(&text).with_context(|| format!("{}: not a query draft", path.display()))
}

fn draft_definition(draft: QueryDraft) -> QueryDefinition {
    let mut def = QueryDefinition::new("cli", draft.title, draft.main_sql);
    def.description = draft.description;
    def.parameters = draft.parameters;
    def.detail_sql = draft.detail_sql;
    def.hyperlink_columns = draft.hyperlink_columns;
    def
}

/// The operator sees every query, as an administrator does.
fn operator() -> Principal {
    Principal::admin("operator")
}

fn definition(ctx: &Ctx, source: &QuerySource) -> Result<QueryDefinition> {
    match (&source.file, &source.wiki) {
        (Some(file), _) => Ok(draft_definition(read_draft(file)?)),
        (None, Some(id)) => Ok(ctx.wiki()?.get(&operator(), id)?.def.clone()),
        (None, None) => bail!("give a query file or --wiki ID"),
    }
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, String>> {
    params
        .iter()
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("{p:?}: expected NAME=VALUE"))?;
            let k = k.trim();
            let k = if k.starts_with('@') { k.to_string() } else { format!("@{k}") };
            Ok((k, v.to_string()))
        })
        .collect()
}

fn split_target(t: &TargetArgs) -> Result<SplitTarget> {
    Ok(match (t.surah, t.ayah, t.word, &t.selection) {
        (Some(n), ..) => SplitTarget::Surah(n),
        (_, Some(n), ..) => SplitTarget::Ayah(n),
        (_, _, Some(n), _) => SplitTarget::Word(n),
        (_, _, _, Some(s)) => {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, c] = parts.as_slice() else {
                bail!("--selection expects AYAH:START:END");
            };
            SplitTarget::Selection(Selection {
                ayah_serial_no: a.parse().context("selection ayah")?,
                start_offset: b.parse().context("selection start")?,
                end_offset: c.parse().context("selection end")?,
            })
        }
        _ => bail!("give one of --surah, --ayah, --word or --selection"),
    })
}

fn report_validation(ctx: &Ctx, report: &ValidationReport) -> Result<()> {
    ctx.emit(report, |out| {
        if report.is_valid() {
            writeln!(out, "valid")?;
        }
        for v in &report.violations {
            writeln!(out, "error: {v}")?;
        }
        for w in &report.warnings {
            writeln!(out, "warning: {w}")?;
        }
        Ok(())
    })?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Reported(format!("query is invalid: {report}")).into())
    }
}

/// A failure whose details already went to stdout.
#[derive(Debug)]
struct Reported(String);

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Reported {}

fn topic_path(topic: &str) -> Vec<String> {
    topic.split('/').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = CliConfig::resolve(
        file,
        Overrides {
            corpus: cli.corpus,
            meta_dir: cli.meta_dir,
            index: cli.index,
            store: cli.store,
            wiki_dir: cli.wiki_dir,
            abjad_table: cli.abjad_table,
            listen: cli.listen,
            row_limit: cli.row_limit,
            timeout_ms: cli.timeout_ms,
            workers: cli.workers,
        },
    )?;
    let ctx = Ctx { cfg, json: cli.json };

    match cli.command {
        Command::Ingest { corpus } => {
            let corpus = corpus.unwrap_or_else(|| ctx.cfg.corpus.clone());
            let table = ctx.table()?;
            let index = ctx.ingest(&corpus)?;
            index.save(&ctx.cfg.index)?;
            let store_hash = build_store(&index, &table, &ctx.cfg.store)?;
            let summary = json!({
                "index": ctx.cfg.index,
                "store": ctx.cfg.store,
                "corpus_hash": index.source_hash(),
                "store_hash": store_hash,
                "totals": index.totals(),
            });
            let t = index.totals();
            ctx.emit(&summary, |out| {
                writeln!(out, "indexed {} surahs, {} ayahs, {} words, {} letters", t.surahs, t.ayahs, t.words, t.letters)?;
                writeln!(out, "index {}", ctx.cfg.index.display())?;
                writeln!(out, "store {} ({store_hash})", ctx.cfg.store.display())
            })
        }
        Command::Stats { target } => {
            let table = ctx.table()?;
            let index = ctx.index(&table)?;
            let stats = Stats::new(&index, &table);
            let report = match target {
                StatsTarget::Surah { n } => stats.surah(n)?,
                StatsTarget::Ayah { serial } => stats.ayah(serial)?,
                StatsTarget::Word { serial } => stats.word(serial)?,
                StatsTarget::Selection { ayah, start, end } => stats.selection(&Selection {
                    ayah_serial_no: ayah,
                    start_offset: start,
                    end_offset: end,
                })?,
            };
            print_report(&ctx, &report)
        }
        Command::Split(args) => {
            let table = ctx.table()?;
            let index = ctx.index(&table)?;
            let request = SplitRequest {
                target: split_target(&args.target)?,
                unit: match args.unit {
                    UnitArg::Letters => SplitUnit::Letters,
                    UnitArg::Words => SplitUnit::Words,
                },
                tashkeel: if args.with_tashkeel { TashkeelMode::With } else { TashkeelMode::Without },
                grouping: if args.grouped { Grouping::Grouped } else { Grouping::None },
            };
            let result = mushaf_core::split(&index, &request)?;
            ctx.emit(&result, |out| match &result {
                SplitResult::Ungrouped(rows) => rows.iter().try_for_each(|r| writeln!(out, "{}\t{}", r.row_no, r.token)),
                SplitResult::Grouped(rows) => rows.iter().try_for_each(|r| writeln!(out, "{}\t{}", r.token, r.count)),
            })
        }
        Command::Jummal { text } => {
            let value = jummal(&text, &ctx.table()?)?;
            ctx.emit(&json!({ "text": text, "jummal": value }), |out| writeln!(out, "{value}"))
        }
        Command::Query { action } => {
            let table = ctx.table()?;
            let index = ctx.index(&table)?;
            let store = ctx.store(&index, &table)?;
            match action {
                QueryAction::Validate { source } => {
                    let def = definition(&ctx, &source)?;
                    report_validation(&ctx, &validate_query(&def, &store))
                }
                QueryAction::Run { source, params } => {
                    let def = definition(&ctx, &source)?;
                    let query = ValidatedQuery::new(def, &store)?;
                    let bindings = bind_parameters(&query, &parse_params(&params)?)?;
                    let grid = execute_main(&store, &query, &bindings, &ctx.cfg.service.limits)?;
                    print_grid(&ctx, &grid)
                }
            }
        }
        Command::Wiki { action } => wiki_command(&ctx, action),
        Command::Serve => {
            let table = ctx.table()?;
            let index = ctx.index(&table)?;
            let store = ctx.store(&index, &table)?;
            let wiki = ctx.wiki()?;
            let runtime = tokio::runtime::Runtime::new()?;
            let addr = ctx.cfg.listen;
            runtime.block_on(async {
                let state = AppState::new(index.into(), table, store, wiki, ctx.cfg.service.clone());
                eprintln!("listening on http://{addr}");
                mushaf_service::serve(state, addr).await
            })?;
            Ok(())
        }
        Command::Conventions { output } => {
            let table = ctx.table()?;
            let index = ctx.index(&table)?;
            let report = conventions::report(&index, &table);
            match output {
                Some(path) => {
                    std::fs::write(&path, report.to_markdown())
                        .with_context(|| format!("{}: cannot write report", path.display()))?;
                    ctx.emit(&report, |out| writeln!(out, "wrote {}", path.display()))
                }
                None => ctx.emit(&report, |out| write!(out, "{}", report.to_markdown())),
            }
        }
    }
}

fn wiki_command(ctx: &Ctx, action: WikiAction) -> Result<()> {
    let mut wiki = ctx.wiki()?;
    let done = |id: &str, what: &str| ctx.emit(&json!({ "id": id, "status": what }), |out| writeln!(out, "{id} {what}"));
    match action {
        WikiAction::List => {
            let list = wiki.list(&operator());
            ctx.emit(&list, |out| {
                for q in &list {
                    writeln!(out, "{}\t{:?}\t{}\t{}", q.id, q.state, q.topic_path.join("/"), q.title)?;
                }
                Ok(())
            })
        }
        WikiAction::Add { file, user } => {
            let id = wiki.create_draft(&Principal::developer(user), read_draft(&file)?)?;
            done(&id, "draft")
        }
        WikiAction::Submit { id, user } => {
            let (index, store) = ctx_store(ctx)?;
            drop(index);
            wiki.submit(&Principal::developer(user), &id, |d| validate_query(d, &store))?;
            done(&id, "submitted")
        }
        WikiAction::Publish { target, topic, user } => {
            let path = PathBuf::from(&target);
            let id = if path.is_file() {
                let (_, store) = ctx_store(ctx)?;
                let dev = Principal::developer(user.clone());
                let id = wiki.create_draft(&dev, read_draft(&path)?)?;
                if let Err(e) = wiki.submit(&dev, &id, |d| validate_query(d, &store)) {
                    return Err(anyhow!(e).context(format!("{id} left as a draft")));
                }
                id
            } else {
                target
            };
            wiki.decide(&Principal::admin(user), &id, Decision::Published, &topic_path(&topic), None)?;
            done(&id, "published")
        }
        WikiAction::Reject { id, reason, user } => {
            wiki.decide(&Principal::admin(user), &id, Decision::Rejected, &[], Some(reason))?;
            done(&id, "rejected")
        }
        WikiAction::Export { file } => {
            let archive = wiki.export()?;
            let text = serde_json::to_string_pretty(&archive)?;
            std::fs::write(&file, text).with_context(|| format!("{}: cannot write archive", file.display()))?;
            let n = archive.state.queries.len();
            ctx.emit(&json!({ "file": file, "queries": n }), |out| writeln!(out, "exported {n} queries to {}", file.display()))
        }
        WikiAction::Import { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("{}: cannot read archive", file.display()))?;
            let archive: WikiArchive = serde_json::from_str(&text).with_context(|| format!("{}: not a wiki archive", file.display()))?;
            wiki.import(archive)?;
            let n = wiki.state().queries.len();
            ctx.emit(&json!({ "file": file, "queries": n }), |out| writeln!(out, "imported {n} queries"))
        }
    }
}

fn ctx_store(ctx: &Ctx) -> Result<(CorpusIndex, Store)> {
    let table = ctx.table()?;
    let index = ctx.index(&table)?;
    let store = ctx.store(&index, &table)?;
    Ok((index, store))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json && e.downcast_ref::<Reported>().is_none() {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
