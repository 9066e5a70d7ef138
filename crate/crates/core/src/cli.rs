//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors and on a
//! failed `selftest`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::warn;

use crate::alignment::align_cognate_set;
use crate::classifier::{read_models, write_models, LinearModel};
use crate::ensemble::{reconstruct_wordlist, train_ensemble, EnsembleConfig};
use crate::error::{Error, Result};
use crate::fuzzy::{consensus, render_fuzzy, FuzzyPattern, FuzzyReconstruction};
use crate::metrics::{confused_pairs, score_predictions, AlignmentSizeMode};
use crate::report::render_report;
use crate::synth::{generate, oracle_check, OracleReport, SynthSpec, CLEAN_SPEC, NOISY_SPEC};
use crate::wordlist::{join_tokens, parse_wordlist, Wordlist};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "fuzzyrecon",
    version,
    about = "Fuzzy phonological reconstruction from cognate sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct EnsembleArgs {
    /// Ensemble size.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Fraction of reflexes removed from each sample.
    #[arg(long, default_value_t = 0.1)]
    dropout: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Perceptron training epochs.
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl EnsembleArgs {
    fn config(&self) -> EnsembleConfig {
        EnsembleConfig {
            n_samples: self.samples,
            dropout: self.dropout,
            seed: self.seed,
            epochs: self.epochs,
        }
    }
}

#[derive(Args, Debug)]
struct Input {
    /// Wordlist TSV (ID, DOCULECT, CONCEPT, TOKENS, COGID[, ALIGNMENT]).
    #[arg(short, long)]
    input: PathBuf,
    /// Doculect holding the gold proto-forms.
    #[arg(long)]
    proto: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train the ensemble and write one fuzzy proto-form per cognate set.
    Reconstruct {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Omit counts from the notation.
        #[arg(long)]
        bare: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Train the ensemble and save its models.
    Train {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reconstruct with previously saved models.
    Apply {
        /// Wordlist TSV.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        proto: Option<String>,
        #[arg(long)]
        bare: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Certainty and correctness summary.
    Evaluate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Fuzzy TSV from `reconstruct`; reconstructs afresh when absent.
        #[arg(long)]
        fuzzy: Option<PathBuf>,
        /// Dataset label for the first column.
        #[arg(long, default_value = "dataset")]
        dataset: String,
        /// Measure alignment size in columns instead of reflexes.
        #[arg(long)]
        alignment_size_columns: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Most frequently confused proto-sounds.
    Confusions {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        fuzzy: Option<PathBuf>,
        /// Keep only the N most frequent pairs.
        #[arg(long)]
        top: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Standalone HTML report with alignments and quintile grids.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        fuzzy: Option<PathBuf>,
        #[arg(long)]
        bare: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic wordlist from a spec file.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the corrupted reflexes as TSV.
        #[arg(long)]
        corruptions: Option<PathBuf>,
    },
    /// Run the oracle checks on synthetic data.
    ///
    /// Without `--spec`, runs the built-in clean and noisy families.
    Selftest {
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Fuzzy TSV reconstructed from the wordlist generated from --spec.
        #[arg(long, requires = "spec")]
        fuzzy: Option<PathBuf>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
    },
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(f),
    }
}

fn load_wordlist(path: &Path, proto: Option<&str>) -> Result<Wordlist> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let (wl, report) = parse_wordlist(std::io::BufReader::new(file), proto)?;
    for w in &report.warnings {
        warn!("{w}");
    }
    if let Some(p) = proto {
        if wl.training_sets().next().is_none() {
            return Err(Error::Config(format!(
                "no cognate set has a form for proto doculect {p:?}"
            )));
        }
    }
    Ok(wl)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Fuzzy reconstructions of every set that yields one; failures are logged.
pub fn reconstruct_all(models: &[LinearModel], wl: &Wordlist) -> Result<Vec<FuzzyReconstruction>> {
    let mut out = Vec::with_capacity(wl.len());
    for r in reconstruct_wordlist(models, wl)? {
        match r.reconstruction {
            Ok(fr) => out.push(fr),
            Err(e) => warn!("{e}"),
        }
    }
    Ok(out)
}

/// Train on `wl` and reconstruct all of its sets.
pub fn run_pipeline(wl: &Wordlist, cfg: &EnsembleConfig) -> Result<Vec<FuzzyReconstruction>> {
    let models = train_ensemble(wl, cfg)?;
    reconstruct_all(&models, wl)
}

pub const FUZZY_HEADER: &str = "COGID\tCONCEPT\tFUZZY\tCONSENSUS\tCERTAIN\tN_OPTIONS";

pub fn write_fuzzy_tsv(frs: &[FuzzyReconstruction], bare: bool) -> String {
    let mut out = format!("{FUZZY_HEADER}\n");
    for fr in frs {
        let consensus = consensus(fr).map(|c| join_tokens(&c)).unwrap_or_default();
        let options: usize = fr.segments.iter().map(|s| s.options.len()).product();
        out.push_str(&format!(
            "{}\t{}\t{}\t{consensus}\t{}\t{options}\n",
            fr.cogid,
            fr.concept,
            render_fuzzy(fr, bare),
            fr.certain
        ));
    }
    out
}

/// Read `reconstruct` output back. Alignment sizes come from `wl`; the
/// ensemble size from the counts, or `default_samples` for rows that carry
/// none.
pub fn read_fuzzy_tsv(text: &str, wl: &Wordlist, default_samples: usize) -> Result<Vec<FuzzyReconstruction>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<String> = match lines.next() {
        Some((_, h)) => h
            .trim_start_matches('\u{feff}')
            .split('\t')
            .map(|c| c.trim().to_uppercase())
            .collect(),
        None => return Ok(Vec::new()),
    };
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(cogid_at), Some(fuzzy_at)) = (col("COGID"), col("FUZZY")) else {
        let missing = ["COGID", "FUZZY"]
            .iter()
            .filter(|c| col(c).is_none())
            .map(|c| c.to_string())
            .collect();
        return Err(Error::MissingColumns(missing));
    };
    let concept_at = col("CONCEPT");
    let mut out = Vec::new();
    for (n, line) in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        let cell = |i: usize| {
            cells.get(i).map(|c| c.trim()).ok_or_else(|| Error::Malformed {
                line: n + 1,
                message: "too few columns".into(),
            })
        };
        let cogid = cell(cogid_at)?;
        let text = cell(fuzzy_at)?;
        let concept = concept_at.map(cell).transpose()?.unwrap_or("");
        let pattern = FuzzyPattern::parse(text)?;
        let n_samples = pattern
            .positions
            .iter()
            .find(|p| p.iter().all(|(_, c)| c.is_some()))
            .map(|p| p.iter().map(|(_, c)| c.unwrap()).sum())
            .unwrap_or(default_samples);
        let set = wl.get(cogid);
        let reflexes = set.map_or(0, |s| s.reflexes.len());
        let mut fr = FuzzyReconstruction::from_rendered(cogid, concept, text, n_samples, reflexes)?;
        if let Some(set) = set {
            fr.width = align_cognate_set(set, false)?.width();
        }
        out.push(fr);
    }
    Ok(out)
}

fn fuzzy_or_pipeline(wl: &Wordlist, fuzzy: Option<&Path>, ensemble: &EnsembleArgs) -> Result<Vec<FuzzyReconstruction>> {
    match fuzzy {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            read_fuzzy_tsv(&text, wl, ensemble.samples)
        }
        None => with_threads(ensemble.threads, || run_pipeline(wl, &ensemble.config())),
    }
}

fn corruption_tsv(corruptions: &[crate::synth::Corruption]) -> String {
    let mut out = String::from("COGID\tDOCULECT\tPOSITION\tORIGINAL\tREPLACEMENT\n");
    for c in corruptions {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            c.cogid, c.doculect, c.position, c.original, c.replacement
        ));
    }
    out
}

/// Generate from `spec`, reconstruct (or read `fuzzy`), and check.
pub fn selftest_spec(spec: &SynthSpec, cfg: &EnsembleConfig, fuzzy: Option<&str>) -> Result<OracleReport> {
    let data = generate(spec)?;
    let frs = match fuzzy {
        Some(text) => read_fuzzy_tsv(text, &data.wordlist, cfg.n_samples)?,
        None => run_pipeline(&data.wordlist, cfg)?,
    };
    if frs.len() != data.wordlist.len() {
        warn!("{} of {} sets reconstructed", frs.len(), data.wordlist.len());
    }
    oracle_check(&data.wordlist, &frs, &data.corruptions)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Reconstruct {
            input,
            ensemble,
            bare,
            output,
        } => {
            let wl = load_wordlist(&input.input, Some(&input.proto))?;
            let frs = with_threads(ensemble.threads, || run_pipeline(&wl, &ensemble.config()))?;
            emit(output.as_deref(), &write_fuzzy_tsv(&frs, bare))?;
        }
        Command::Train {
            input,
            ensemble,
            output,
        } => {
            let wl = load_wordlist(&input.input, Some(&input.proto))?;
            let models = with_threads(ensemble.threads, || train_ensemble(&wl, &ensemble.config()))?;
            emit(output.as_deref(), &write_models(&models))?;
        }
        Command::Apply {
            input,
            models,
            proto,
            bare,
            threads,
            output,
        } => {
            let wl = load_wordlist(&input, proto.as_deref())?;
            let text = fs::read_to_string(&models).map_err(|e| Error::io(&models, e))?;
            let models = read_models(&text)?;
            let frs = with_threads(threads, || reconstruct_all(&models, &wl))?;
            emit(output.as_deref(), &write_fuzzy_tsv(&frs, bare))?;
        }
        Command::Evaluate {
            input,
            ensemble,
            fuzzy,
            dataset,
            alignment_size_columns,
            output,
        } => {
            let wl = load_wordlist(&input.input, Some(&input.proto))?;
            let frs = fuzzy_or_pipeline(&wl, fuzzy.as_deref(), &ensemble)?;
            let mode = if alignment_size_columns {
                AlignmentSizeMode::Columns
            } else {
                AlignmentSizeMode::Rows
            };
            emit(
                output.as_deref(),
                &score_predictions(&frs, &wl, mode).to_tsv(&dataset, true),
            )?;
        }
        Command::Confusions {
            input,
            ensemble,
            fuzzy,
            top,
            output,
        } => {
            let wl = load_wordlist(&input.input, Some(&input.proto))?;
            let frs = fuzzy_or_pipeline(&wl, fuzzy.as_deref(), &ensemble)?;
            emit(output.as_deref(), &confused_pairs(&frs).to_tsv(top))?;
        }
        Command::Report {
            input,
            ensemble,
            fuzzy,
            bare,
            output,
        } => {
            let wl = load_wordlist(&input.input, Some(&input.proto))?;
            let frs = fuzzy_or_pipeline(&wl, fuzzy.as_deref(), &ensemble)?;
            emit(output.as_deref(), &render_report(&wl, &frs, bare)?)?;
        }
        Command::Synth {
            spec,
            output,
            corruptions,
        } => {
            let text = fs::read_to_string(&spec).map_err(|e| Error::io(&spec, e))?;
            let data = generate(&SynthSpec::parse(&text)?)?;
            emit(output.as_deref(), &data.wordlist.to_tsv())?;
            if let Some(path) = corruptions {
                emit(Some(&path), &corruption_tsv(&data.corruptions))?;
            }
        }
        Command::Selftest { spec, fuzzy, ensemble } => {
            let cfg = ensemble.config();
            let scenarios: Vec<(String, String)> = match &spec {
                Some(path) => vec![(
                    path.display().to_string(),
                    fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
                )],
                None => vec![
                    ("clean".to_string(), CLEAN_SPEC.to_string()),
                    ("noisy".to_string(), NOISY_SPEC.to_string()),
                ],
            };
            let fuzzy_text = match &fuzzy {
                Some(path) => Some(fs::read_to_string(path).map_err(|e| Error::io(path, e))?),
                None => None,
            };
            let mut all_passed = true;
            let mut out = String::new();
            for (name, text) in scenarios {
                let spec = SynthSpec::parse(&text)?;
                let report = with_threads(ensemble.threads, || selftest_spec(&spec, &cfg, fuzzy_text.as_deref()))?;
                all_passed &= report.passed();
                out.push_str(&format!("== {name}\n{report}"));
            }
            out.push_str(if all_passed {
                "selftest: PASS\n"
            } else {
                "selftest: FAIL\n"
            });
            emit(None, &out)?;
            if !all_passed {
                return Ok(EXIT_DATA);
            }
        }
    }
    Ok(EXIT_OK)
}
