//! Command-line pipeline: preprocess, train, similar, emoji-desc, eval.
//!
//! Exit codes: 0 success, 2 I/O or unusable input file, 3 empty
//! vocabulary after the frequency filter, 4 similarity query not found,
//! 5 invalid evaluation input.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use emovec::emoji_desc::{self, DescriptionTrainConfig};
use emovec::sentiment::{self, EvalOptions, RfParams, SvmParams};
use emovec::sgns::{self, TrainingConfig};
use emovec::store::{most_similar, EmbeddingSet};
use emovec::tokenizer::{load_stopwords, Tokenizer, TokenizerConfig};
use emovec::vocab::Vocabulary;
use emovec::{Error, Result};

#[derive(Parser)]
#[command(name = "emovec", version, about = "Joint word+emoji embeddings from tweets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TokenizerArgs {
    /// Stop-word file overriding the built-in English list (one word per line).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Keep the original letter case.
    #[arg(long)]
    no_lowercase: bool,
    /// Shorten runs of at least this many identical characters.
    #[arg(long, default_value_t = 3)]
    collapse_threshold: usize,
    /// Length such runs are shortened to.
    #[arg(long, default_value_t = 2)]
    collapse_to: usize,
}

impl TokenizerArgs {
    fn build(&self) -> Result<Tokenizer> {
        let mut cfg = TokenizerConfig {
            collapse_threshold: self.collapse_threshold,
            collapse_to: self.collapse_to,
            lowercase: !self.no_lowercase,
            ..TokenizerConfig::default()
        };
        if let Some(path) = &self.stopwords {
            cfg.stopwords = load_stopwords(path)?;
        }
        Tokenizer::new(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize a raw tweet corpus, one tweet per line in and out.
    Preprocess {
        /// Raw corpus, newline-delimited UTF-8.
        #[arg(long)]
        input: PathBuf,
        /// Tokenized output, tokens space-separated.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },
    /// Train embeddings on a tokenized corpus and save them in the
    /// binary format.
    Train {
        /// Tokenized corpus (preprocess output).
        #[arg(long)]
        corpus: PathBuf,
        /// Output embedding file.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 300)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value_t = 50)]
        min_count: u64,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0.025)]
        lr: f32,
        #[arg(long, default_value_t = 1e-4)]
        lr_final: f32,
        /// Frequent-token subsampling rate; 0 disables.
        #[arg(long, default_value_t = 1e-3)]
        sample: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Lock-free training workers. Output is reproducible only with 1.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Progress line to stderr every N corpus tokens.
        #[arg(long)]
        progress_every: Option<u64>,
        /// Also dump the vocabulary as surface<TAB>count.
        #[arg(long)]
        vocab_out: Option<PathBuf>,
    },
    /// Print the nearest neighbors of a token by cosine similarity.
    Similar {
        /// Embedding file (binary, or text when the extension is .txt).
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Train emoji vectors from a description file against frozen word
    /// vectors.
    EmojiDesc {
        /// Description file: emoji<TAB>word word word...
        #[arg(long)]
        descriptions: PathBuf,
        /// Word embedding file providing the description word vectors.
        #[arg(long)]
        word_embedding: PathBuf,
        /// Output emoji embedding file.
        #[arg(long)]
        output: PathBuf,
        /// Also write the word embedding augmented with the emoji vectors.
        #[arg(long)]
        augmented_output: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 80)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        negatives: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the sentiment evaluation matrix over one or more embeddings.
    Eval {
        /// Labeled dataset CSV with "text" and "label" columns.
        #[arg(long)]
        dataset: PathBuf,
        /// Embedding under a report name, as NAME=PATH. Repeatable.
        #[arg(long = "embedding", value_parser = parse_named_embedding, required = true)]
        embeddings: Vec<(String, PathBuf)>,
        /// Emoji ranking file, one emoji per line, most frequent first.
        #[arg(long)]
        ranking: PathBuf,
        /// Size of the common-emoji pool at the top of the ranking.
        #[arg(long, default_value_t = 173)]
        common_count: usize,
        #[arg(long, default_value_t = 1)]
        split_seed: u64,
        #[arg(long, default_value_t = 0.8)]
        split_fraction: f64,
        #[arg(long, default_value_t = 1e-4)]
        svm_lambda: f64,
        #[arg(long, default_value_t = 20)]
        svm_epochs: usize,
        #[arg(long, default_value_t = 100)]
        rf_trees: usize,
        #[arg(long, default_value_t = 12)]
        rf_depth: usize,
        /// Seed shared by both classifiers.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Report CSV path.
        #[arg(long)]
        out_csv: PathBuf,
        /// Suppress the aligned table on stdout.
        #[arg(long)]
        no_table: bool,
        #[command(flatten)]
        tokenizer: TokenizerArgs,
    },
}

fn parse_named_embedding(raw: &str) -> std::result::Result<(String, PathBuf), String> {
    let (name, path) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=PATH, got {raw:?}"))?;
    if name.is_empty() {
        return Err("embedding name must be non-empty".into());
    }
    Ok((name.to_string(), PathBuf::from(path)))
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::EmptyVocabulary => 3,
        Error::QueryNotFound { .. } => 4,
        Error::DatasetFormat { .. }
        | Error::RankingFormat { .. }
        | Error::EvalInput(_)
        | Error::SingleClass
        | Error::EmptyTestSet => 5,
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli.command) {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}

/// Loads by extension: ".txt" means the text format, everything else the
/// binary one.
fn load_embedding(path: &Path) -> Result<EmbeddingSet> {
    if path.extension().is_some_and(|e| e == "txt") {
        EmbeddingSet::load_text(path)
    } else {
        EmbeddingSet::load_binary(path)
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Preprocess {
            input,
            output,
            tokenizer,
        } => {
            eprintln!(
                "config: subcommand=preprocess input={} output={} stopwords={} lowercase={} collapse_threshold={} collapse_to={}",
                input.display(),
                output.display(),
                tokenizer
                    .stopwords
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "builtin".into()),
                !tokenizer.no_lowercase,
                tokenizer.collapse_threshold,
                tokenizer.collapse_to,
            );
            let tokenizer = tokenizer.build()?;
            cmd_preprocess(&input, &output, &tokenizer)
        }
        Command::Train {
            corpus,
            output,
            dim,
            window,
            min_count,
            negatives,
            epochs,
            lr,
            lr_final,
            sample,
            seed,
            workers,
            progress_every,
            vocab_out,
        } => {
            let cfg = TrainingConfig {
                dim,
                window,
                min_count,
                negatives,
                epochs,
                lr_initial: lr,
                lr_final,
                sample,
                seed,
                workers,
                progress_every,
            };
            eprintln!(
                "config: subcommand=train corpus={} output={} dim={} window={} min_count={} negatives={} epochs={} lr={} lr_final={} sample={} seed={} workers={}",
                corpus.display(),
                output.display(),
                cfg.dim,
                cfg.window,
                cfg.min_count,
                cfg.negatives,
                cfg.epochs,
                cfg.lr_initial,
                cfg.lr_final,
                cfg.sample,
                cfg.seed,
                cfg.workers,
            );
            cmd_train(&corpus, &output, vocab_out.as_deref(), &cfg)
        }
        Command::Similar {
            embedding,
            query,
            k,
        } => {
            eprintln!(
                "config: subcommand=similar embedding={} query={query:?} k={k}",
                embedding.display()
            );
            let set = load_embedding(&embedding)?;
            let neighbors = most_similar(&set, &query, k)?;
            let mut stdout = std::io::stdout().lock();
            for (surface, score) in neighbors {
                writeln!(stdout, "{surface}\t{score:.6}").map_err(|e| Error::io("stdout", e))?;
            }
            Ok(())
        }
        Command::EmojiDesc {
            descriptions,
            word_embedding,
            output,
            augmented_output,
            lr,
            epochs,
            negatives,
            seed,
        } => {
            eprintln!(
                "config: subcommand=emoji-desc descriptions={} word_embedding={} output={} lr={lr} epochs={epochs} negatives={negatives} seed={seed}",
                descriptions.display(),
                word_embedding.display(),
                output.display(),
            );
            let words = load_embedding(&word_embedding)?;
            let descs = emoji_desc::load_descriptions(&descriptions)?;
            let cfg = DescriptionTrainConfig {
                lr,
                epochs,
                negatives_per_positive: negatives,
                seed,
            };
            let result = emoji_desc::train_emoji_vectors(&descs, &words, &cfg)?;
            result.embeddings.save_binary(&output)?;
            println!("emoji vectors: {}", result.embeddings.len());
            println!("all-oov descriptions: {}", result.all_oov);
            println!(
                "mean positive loss: {:.6} -> {:.6}",
                result.initial_loss, result.final_loss
            );
            if let Some(path) = augmented_output {
                let augmented = emoji_desc::build_augmented(&words, &result.embeddings)?;
                augmented.save_binary(&path)?;
                println!("augmented vocabulary: {}", augmented.len());
            }
            Ok(())
        }
        Command::Eval {
            dataset,
            embeddings,
            ranking,
            common_count,
            split_seed,
            split_fraction,
            svm_lambda,
            svm_epochs,
            rf_trees,
            rf_depth,
            seed,
            out_csv,
            no_table,
            tokenizer,
        } => {
            eprintln!(
                "config: subcommand=eval dataset={} ranking={} common_count={common_count} split_seed={split_seed} split_fraction={split_fraction} svm_lambda={svm_lambda} svm_epochs={svm_epochs} rf_trees={rf_trees} rf_depth={rf_depth} seed={seed}",
                dataset.display(),
                ranking.display(),
            );
            let tokenizer = tokenizer.build()?;
            let tweets = sentiment::load_dataset(&dataset)?;
            let ranking = sentiment::EmojiRanking::load(&ranking)?;
            let mut sets = Vec::with_capacity(embeddings.len());
            for (name, path) in embeddings {
                sets.push((name, load_embedding(&path)?));
            }
            let opts = EvalOptions {
                split_seed,
                split_fraction,
                common_count,
                svm: SvmParams {
                    lambda: svm_lambda,
                    epochs: svm_epochs,
                    seed,
                },
                rf: RfParams {
                    trees: rf_trees,
                    max_depth: rf_depth,
                    seed,
                    ..RfParams::default()
                },
            };
            let report = sentiment::run_matrix(&tweets, &tokenizer, &sets, &ranking, &opts)?;
            report.save_csv(&out_csv)?;
            if !no_table {
                print!("{}", report.render_table());
            }
            Ok(())
        }
    }
}

/// Streams the corpus line by line; memory use is independent of the
/// corpus size.
fn cmd_preprocess(input: &Path, output: &Path, tokenizer: &Tokenizer) -> Result<()> {
    let reader = File::open(input).map_err(|e| Error::io(input, e))?;
    let mut reader = BufReader::new(reader);
    let writer = File::create(output).map_err(|e| Error::io(output, e))?;
    let mut writer = BufWriter::new(writer);
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| Error::io(input, e))?;
        if n == 0 {
            break;
        }
        let tokens = tokenizer.tokenize(&line);
        let mut first = true;
        for token in &tokens {
            if !first {
                writer.write_all(b" ").map_err(|e| Error::io(output, e))?;
            }
            writer
                .write_all(token.surface.as_bytes())
                .map_err(|e| Error::io(output, e))?;
            first = false;
        }
        writer.write_all(b"\n").map_err(|e| Error::io(output, e))?;
    }
    writer.flush().map_err(|e| Error::io(output, e))
}

fn cmd_train(
    corpus: &Path,
    output: &Path,
    vocab_out: Option<&Path>,
    cfg: &TrainingConfig,
) -> Result<()> {
    let vocab = Vocabulary::from_corpus_file(corpus, cfg.min_count)?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let result = sgns::train(corpus, &vocab, cfg)?;
    result.matrix.to_embedding_set(&vocab).save_binary(output)?;
    if let Some(path) = vocab_out {
        vocab.save_tsv(path)?;
    }
    println!("vocab size: {}", vocab.len());
    println!(
        "final mean loss: {:.6}",
        result.epoch_mean_loss.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}
