use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dravida::bleu::{corpus_bleu_with, off_target_rate};
use dravida::corpus::{
    ingest_parallel, normalize_sentence, parse_directions, prepare_pair, read_lines, write_lines, Direction, LanguageId,
    TaggedLine,
};
use dravida::harness::{
    preset, reference_baselines, run_experiment, summarize, train_experiment_model, validate_direction_coverage,
    ExperimentConfig, ExperimentData, ResultTable, RunOptions, PRESET_NAMES,
};
use dravida::nmt::{Checkpoint, Translator};
use dravida::overlap::{overlap_study, Condition, VocabMode};
use dravida::par::Exec;
use dravida::script::{transliterate, Script};
use dravida::subword::{train_bpe, SubwordModel, TrainConfig, WordCounts, DEFAULT_COVERAGE};
use dravida::synth::{generate_family, FamilySpec, Lexicon, LexiconClassifier, SuffixMode};
use dravida::volt::{retrain, volt_search, VoltConfig, DEFAULT_STEP, DEFAULT_THRESHOLD};

#[derive(Parser)]
#[command(name = "dravida", version, about = "Zero-shot Dravidian translation toolkit")]
struct Cli {
    /// Run every data-parallel loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transliterate text between Indic scripts (stdin to stdout by default).
    Translit {
        /// Source language or script code.
        #[arg(long, alias = "from")]
        src: Script,
        #[arg(long, alias = "to")]
        tgt: Script,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Clean, transliterate, tag and optionally subword-encode a parallel corpus.
    Prep {
        #[arg(long = "src-file")]
        src: PathBuf,
        #[arg(long = "tgt-file")]
        tgt: PathBuf,
        #[arg(long)]
        direction: Direction,
        #[arg(long, default_value = "deva")]
        translit: Script,
        /// Subword model to segment with; words are left whole without it.
        #[arg(long)]
        bpe: Option<PathBuf>,
        #[arg(long = "out-dir")]
        out: PathBuf,
    },
    /// Train a BPE model on whitespace-tokenised text files.
    BpeTrain {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long = "vocab-size", alias = "size", default_value_t = 32000)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_COVERAGE)]
        coverage: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Segment lines from stdin, or join pieces back with --decode.
    BpeEncode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        decode: bool,
    },
    /// Pick a vocabulary size by optimal transport and optionally retrain at it.
    Volt {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Subword model whose merge list defines the candidates.
        #[arg(long)]
        merges: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: usize,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: usize,
        /// Report JSON destination (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        retrain: Option<PathBuf>,
    },
    /// Pairwise subword vocabulary overlap, as TSV.
    Overlap {
        /// Languages whose corpora are read from `<dir>/<lang>.txt`.
        #[arg(long, requires = "dir")]
        langs: Option<String>,
        #[arg(long)]
        dir: Option<PathBuf>,
        /// `lang=path`, repeated; alternative to --langs.
        #[arg(long = "corpus", num_args = 1.., required_unless_present = "langs")]
        corpora: Vec<String>,
        /// `raw` or a script to transliterate into first.
        #[arg(long, default_value = "raw")]
        condition: Condition,
        #[arg(long = "vocab-size", alias = "size", default_value_t = 32000)]
        size: usize,
        /// Shrink each vocabulary with VOLT under this threshold.
        #[arg(long)]
        volt_threshold: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model from an experiment config.
    Train {
        /// Config file, or one of the preset names.
        #[arg(long)]
        config: String,
        /// Overrides the config's training directions.
        #[arg(long)]
        dirs: Option<String>,
        /// Fill corpus and eval paths from a synthetic-family directory.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Translate lines from stdin with a trained checkpoint.
    Translate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        direction: Direction,
        #[arg(long, default_value_t = 5)]
        beam: usize,
        #[arg(long, default_value_t = 48)]
        max_len: usize,
    },
    /// Corpus BLEU, and off-target rate when a lexicon is given.
    Evaluate {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        lang: Option<LanguageId>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic language family with exact translations.
    Synth {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        lexicon: usize,
        #[arg(long, default_value_t = 0.8)]
        shared: f64,
        #[arg(long, default_value_t = 20000)]
        sentences: usize,
        #[arg(long, default_value_t = 500)]
        dev: usize,
        #[arg(long, default_value_t = 500)]
        test: usize,
        #[arg(long, default_value_t = 20000)]
        mono: usize,
        /// Give every language the same (empty) suffix.
        #[arg(long)]
        identity_suffix: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that every language is both a source and a target.
    Coverage {
        #[arg(long)]
        dirs: String,
        #[arg(long, default_value = "kn,ml,te,ta")]
        langs: String,
    },
    /// Run an experiment end to end and write its result table.
    Experiment {
        /// Config file, or one of the preset names.
        #[arg(long)]
        config: String,
        /// Fill corpus and eval paths from a synthetic-family directory.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Lexicon for off-target scoring on synthetic data.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        allow_uncovered: bool,
    },
    /// Print a shipped preset config.
    Preset { name: String },
    /// Per-target averages of several result tables.
    Summarize {
        #[arg(required = true, num_args = 1..)]
        tables: Vec<PathBuf>,
        /// Append the two published baselines.
        #[arg(long)]
        baselines: bool,
    },
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn word_counts(files: &[PathBuf]) -> Result<WordCounts> {
    let mut counts = WordCounts::new();
    for f in files {
        for line in read_lines(f)? {
            counts.add_line(&line, 1);
        }
    }
    Ok(counts)
}

fn load_config(spec: &str) -> Result<ExperimentConfig> {
    if let Some(p) = preset(spec) {
        return Ok(p);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("{spec} is neither a config file nor a preset ({})", PRESET_NAMES.join(", "));
    }
    Ok(ExperimentConfig::load(path)?)
}

fn log(line: &str) {
    eprintln!("{line}");
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.command {
        Command::Translit { src, tgt, input, output } => {
            let text = read_input(input.as_deref())?;
            write_output(output.as_deref(), &transliterate(&text, src, tgt))?;
        }
        Command::Prep {
            src,
            tgt,
            direction,
            translit,
            bpe,
            out,
        } => {
            let (corpus, report) = ingest_parallel(&src, &tgt, direction, exec)?;
            let model = bpe.map(|p| SubwordModel::load(&p)).transpose()?;
            let mut src_lines = Vec::with_capacity(corpus.pairs.len());
            let mut tgt_lines = Vec::with_capacity(corpus.pairs.len());
            for p in &corpus.pairs {
                let (s, t) = match &model {
                    Some(m) => prepare_pair((&p.src, &p.tgt), direction, translit, m)?,
                    None => (
                        TaggedLine::source(direction, normalize_sentence(&p.src, direction.src, translit)?).render(),
                        TaggedLine::target(normalize_sentence(&p.tgt, direction.tgt, translit)?).render(),
                    ),
                };
                src_lines.push(s);
                tgt_lines.push(t);
            }
            fs::create_dir_all(&out)?;
            write_lines(&out.join(format!("{direction}.src")), &src_lines)?;
            write_lines(&out.join(format!("{direction}.tgt")), &tgt_lines)?;
            fs::write(out.join(format!("{direction}.report.json")), serde_json::to_string_pretty(&report)?)?;
            eprintln!("kept {} of {} pairs", report.kept, report.read);
        }
        Command::BpeTrain {
            input,
            size,
            coverage,
            out,
        } => {
            let model = train_bpe(&word_counts(&input)?, &TrainConfig::new(size).with_coverage(coverage))?;
            model.save(&out)?;
            eprintln!("{} symbols, {} merges", model.vocab_size(), model.merges().len());
        }
        Command::BpeEncode { model, decode } => {
            let model = SubwordModel::load(&model)?;
            let stdout = io::stdout();
            let mut w = stdout.lock();
            for line in io::stdin().lock().lines() {
                let line = line?;
                let words: Vec<&str> = line.split_whitespace().collect();
                let out = if decode {
                    model.decode(&words)?
                } else {
                    model.encode(&words)?.join(" ")
                };
                writeln!(w, "{out}")?;
            }
        }
        Command::Volt {
            input,
            merges,
            threshold,
            step,
            out,
            retrain: retrain_out,
        } => {
            let counts = word_counts(&input)?;
            let full = SubwordModel::load(&merges)?;
            let config = VoltConfig {
                threshold,
                step,
                exec,
                ..VoltConfig::default()
            };
            let (rec, rep) = volt_search(&counts, &full, &config)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            write_output(out.as_deref(), &serde_json::to_string_pretty(&rep)?)?;
            eprintln!("recommended size {} at timestep {}", rec.size, rec.timestep);
            if let Some(p) = retrain_out {
                retrain(&counts, &rec, DEFAULT_COVERAGE, exec)?.save(&p)?;
            }
        }
        Command::Overlap {
            langs,
            dir,
            corpora,
            condition,
            size,
            volt_threshold,
            out,
        } => {
            let mut sources: Vec<(LanguageId, PathBuf)> = Vec::new();
            if let (Some(langs), Some(dir)) = (langs, dir) {
                for l in dravida::corpus::parse_languages(&langs)? {
                    sources.push((l, dir.join(format!("{l}.txt"))));
                }
            }
            for c in &corpora {
                let (lang, path) = c.split_once('=').context("expected lang=path")?;
                sources.push((lang.parse()?, PathBuf::from(path)));
            }
            let mut loaded = Vec::new();
            for (l, p) in sources {
                loaded.push((l, read_lines(&p)?));
            }
            let mode = match volt_threshold {
                Some(threshold) => VocabMode::Volt {
                    size,
                    threshold,
                    step: DEFAULT_STEP,
                },
                None => VocabMode::Bpe { size },
            };
            write_output(out.as_deref(), &overlap_study(&loaded, mode, condition, exec)?.to_tsv())?;
        }
        Command::Train { config, dirs, data, out } => {
            let mut c = load_config(&config)?;
            if let Some(d) = dirs {
                c.train_directions = parse_directions(&d)?;
            }
            if let Some(dir) = &data {
                c = c.with_data_dir(dir);
            }
            let data = ExperimentData::load(&c)?;
            let opts = RunOptions {
                exec,
                out_dir: None,
                classifier: None,
                log: &log,
            };
            let ck = train_experiment_model(&c, &data, &opts)?;
            ck.save(&out)?;
            eprintln!("saved {}", out.display());
        }
        Command::Translate {
            model,
            direction,
            beam,
            max_len,
        } => {
            let ck = Checkpoint::<f32>::load(&model)?;
            let mut t = Translator::new(&ck.model, &ck.vocab, ck.shared_script)?;
            t.beam = beam;
            t.max_len = max_len;
            let lines: Vec<String> = io::stdin().lock().lines().collect::<io::Result<_>>()?;
            let out = t.translate_all(&lines, direction, exec)?;
            let stdout = io::stdout();
            let mut w = stdout.lock();
            for l in out {
                writeln!(w, "{l}")?;
            }
        }
        Command::Evaluate {
            hyp,
            reference,
            lang,
            lexicon,
            out: report_out,
        } => {
            let hyps = read_lines(&hyp)?;
            let refs = read_lines(&reference)?;
            let bleu = corpus_bleu_with(&hyps, &refs, exec)?;
            let mut out = serde_json::json!({ "bleu": bleu });
            if let (Some(lang), Some(lex)) = (lang, lexicon) {
                let lexicon = Lexicon::from_json(&fs::read_to_string(&lex)?)?;
                let r = off_target_rate(&hyps, lang, &LexiconClassifier::new(&lexicon))?;
                out["off_target"] = serde_json::to_value(r)?;
            }
            write_output(report_out.as_deref(), &(serde_json::to_string_pretty(&out)? + "\n"))?;
        }
        Command::Synth {
            seed,
            lexicon,
            shared,
            sentences,
            dev,
            test,
            mono,
            identity_suffix,
            out,
        } => {
            let spec = FamilySpec {
                seed,
                lexicon_size: lexicon,
                shared_root_fraction: shared,
                suffix_mode: if identity_suffix {
                    SuffixMode::Identity
                } else {
                    SuffixMode::Distinct
                },
                sentences_per_direction: sentences,
                dev_size: dev,
                test_size: test,
                mono_size: mono,
                ..FamilySpec::default()
            };
            generate_family(&spec)?.write(&out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Coverage { dirs, langs } => {
            let langs = dravida::corpus::parse_languages(&langs)?;
            let report = validate_direction_coverage(&parse_directions(&dirs)?, &langs);
            println!("{report}");
            if !report.is_ok() {
                std::process::exit(1);
            }
        }
        Command::Experiment {
            config,
            data,
            out,
            lexicon,
            allow_uncovered,
        } => {
            let mut c = load_config(&config)?;
            if let Some(dir) = &data {
                c = c.with_data_dir(dir);
            }
            c.allow_uncovered |= allow_uncovered;
            let lexicon_path = lexicon.or_else(|| data.as_ref().map(|d| d.join("lexicon.json")).filter(|p| p.exists()));
            let lex = lexicon_path.map(|p| -> Result<Lexicon> { Ok(Lexicon::from_json(&fs::read_to_string(p)?)?) }).transpose()?;
            let classifier = lex.as_ref().map(LexiconClassifier::new);
            let inputs = ExperimentData::load(&c)?;
            let opts = RunOptions {
                exec,
                out_dir: Some(out.clone()),
                classifier: classifier.as_ref().map(|c| c as _),
                log: &log,
            };
            let outcome = run_experiment(&c, &inputs, &opts)?;
            if !outcome.reused.is_empty() {
                eprintln!("reused: {}", outcome.reused.join(", "));
            }
            fs::write(out.join("summary.tsv"), summarize(std::slice::from_ref(&outcome.table))?.to_tsv())?;
            print!("{}", outcome.table.to_tsv());
        }
        Command::Preset { name } => {
            let p = preset(&name).with_context(|| format!("unknown preset; choose from {}", PRESET_NAMES.join(", ")))?;
            println!("{}", p.to_json()?);
        }
        Command::Summarize { tables, baselines } => {
            let mut loaded = Vec::new();
            for p in &tables {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let t: ResultTable = serde_json::from_str(&text)?;
                loaded.push(t);
            }
            let mut summary = summarize(&loaded)?;
            if baselines {
                let refs: Vec<(&str, BTreeMap<LanguageId, f64>)> = reference_baselines();
                for (name, values) in &refs {
                    summary = summary.with_reference(name, values);
                }
            }
            print!("{}", summary.to_tsv());
        }
    }
    Ok(())
}
