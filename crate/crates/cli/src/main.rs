use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use emosel::acoustics::{extract_corpus, ExtractionConfig};
use emosel::corpusio::{build_catalog, load_manifest, Representation};
use emosel::harness::{emit_report, write_synth, ResultTable, SynthSpec};
use emosel::select::{
    boost_select, ga_select, load_subset, sffs, FeatureSubset, Provenance, Selector,
};
use emosel::strategy::{compare_to_paper_subset, run_pipeline, ExperimentPlan, SelectionContext};

#[derive(Parser)]
#[command(
    name = "emosel",
    version,
    about = "Cross-corpus acoustic feature selection for emotion recognition"
)]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rep {
    Utterance,
    Segment,
}

impl From<Rep> for Representation {
    fn from(r: Rep) -> Self {
        match r {
            Rep::Utterance => Representation::Utterance,
            Rep::Segment => Representation::Segment,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    Sffs,
    Ga,
    Boost,
}

#[derive(Subcommand)]
enum Command {
    /// Extract acoustic features for every utterance of a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        /// Extraction settings; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "utterance")]
        rep: Rep,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one selector on one selection corpus of a plan.
    Select {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        corpus: String,
        #[arg(long, value_enum)]
        selector: SelectorArg,
        #[arg(long, default_value = "A1")]
        alignment: String,
        /// Subset file to write; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole strategy and write the report files.
    Pipeline {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write synthetic corpora with planted features and a plan over them.
    Synth {
        /// Generator settings; the standard synthetic set when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Overlap of a subset file with the published language-independent lists.
    Compare {
        #[arg(long)]
        subset: PathBuf,
        #[arg(long, value_enum, default_value = "utterance")]
        rep: Rep,
    },
    /// Render the recognition-rate tables of a report.csv as markdown.
    Report {
        #[arg(long)]
        csv: PathBuf,
        /// Markdown file to write; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    stage: &'static str,
    error: emosel::Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for emosel::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn write_text(path: &Path, text: &str) -> emosel::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| emosel::Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| emosel::Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_text(path: &Path) -> emosel::Result<String> {
    fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => emosel::Error::MissingFile(path.to_path_buf()),
        _ => emosel::Error::Io {
            path: path.to_path_buf(),
            source,
        },
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Extract {
            manifest,
            config,
            rep,
            out,
        } => {
            let config = match config {
                Some(p) => ExtractionConfig::load(&p).stage("config")?,
                None => ExtractionConfig::default(),
            };
            let manifest = load_manifest(&manifest).stage("manifest")?;
            let catalog = Arc::new(build_catalog(rep.into()));
            let table = extract_corpus(&manifest, &config, catalog).stage("extract")?;
            table.write(&out).stage("write")?;
            info!("{} rows written to {}", table.rows.len(), out.display());
        }
        Command::Select {
            plan,
            corpus,
            selector,
            alignment,
            out,
        } => {
            let plan = ExperimentPlan::load(&plan).stage("plan")?;
            plan.validate().stage("plan")?;
            let (mut selection, _) = plan.load_corpora().stage("load")?;
            selection.sort_by(|a, b| a.corpus_id.cmp(&b.corpus_id));
            let width = selection[0].width();
            let pool: Vec<usize> = (0..width)
                .filter(|&f| selection.iter().all(|m| m.present[f]))
                .collect();
            let context =
                SelectionContext::build(&plan, &selection, pool.clone()).stage("align")?;
            let criterion = context
                .criterion(&alignment, &corpus)
                .ok_or_else(|| Failure {
                    stage: "select",
                    error: emosel::Error::InvalidParameter(format!(
                        "no selection corpus `{corpus}` under alignment `{alignment}`"
                    )),
                })?;
            let (kind, indices) = match selector {
                SelectorArg::Sffs => (
                    Selector::Sffs,
                    sffs(criterion, &pool, &plan.sffs).stage("sffs")?.subset,
                ),
                SelectorArg::Ga => {
                    let params = emosel::select::GaParams {
                        seed: emosel::seed::derive_seed(
                            plan.seed,
                            &format!("ga/{alignment}/{corpus}"),
                        ),
                        ..plan.ga.clone()
                    };
                    (
                        Selector::Ga,
                        ga_select(criterion, &pool, &params).stage("ga")?.subset,
                    )
                }
                SelectorArg::Boost => (
                    Selector::Boost,
                    boost_select(criterion.matrix(), &pool, &plan.boost)
                        .stage("boost")?
                        .subset,
                ),
            };
            let subset =
                FeatureSubset::new(indices, width, Provenance::new(kind, &alignment, &corpus))
                    .stage("select")?;
            let rate = criterion.rate(&subset.sorted()).stage("score")?;
            info!(
                "{} features, KNN rate {:.2} ({:.2})",
                subset.len(),
                rate.mean,
                rate.std
            );
            let text = subset.to_file_string(&selection[0].catalog);
            match out {
                Some(p) => write_text(&p, &text).stage("write")?,
                None => print!("{text}"),
            }
        }
        Command::Pipeline { plan, out } => {
            let plan = ExperimentPlan::load(&plan).stage("plan")?;
            let report = run_pipeline(&plan).stage("pipeline")?;
            let files = emit_report(&report, &out).stage("report")?;
            println!(
                "{}: {} features from {}",
                report.chosen_candidate().name,
                report.chosen_subset().len(),
                report.train_corpus
            );
            info!("{} files written to {}", files.len(), out.display());
        }
        Command::Synth { spec, out } => {
            let spec = match spec {
                Some(p) => SynthSpec::load(&p).stage("spec")?,
                None => SynthSpec::default(),
            };
            spec.validate().stage("spec")?;
            let plan = write_synth(&spec, &out).stage("synth")?;
            println!("{}", plan.display());
        }
        Command::Compare { subset, rep } => {
            let catalog = build_catalog(rep.into());
            let subset = load_subset(&subset, &catalog).stage("subset")?;
            print!(
                "{}",
                compare_to_paper_subset(&subset, &catalog).to_markdown()
            );
        }
        Command::Report { csv, out } => {
            let name = csv.display().to_string();
            let text = read_text(&csv).stage("report")?;
            let table = ResultTable::parse_csv(&text, &name).stage("report")?;
            let md = table.to_markdown();
            match out {
                Some(p) => write_text(&p, &md).stage("write")?,
                None => print!("{md}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { stage, error }) => {
            eprintln!("error: {stage}: {error}");
            ExitCode::from(1)
        }
    }
}
