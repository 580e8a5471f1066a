use std::fs;
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use seasr::corpus::{
    build_frequency_list, extract_main_text, filter_urls, generate_pair_queries, generate_single_queries,
    validate_manifest, CorpusManifest, ManifestRules, UrlFilter,
};
use seasr::decoder::{load_scorer, viterbi_decode, BeamConfig, GraphSpec};
use seasr::frontend::wav::{read_feat, read_raw_pcm16, read_wav, write_feat};
use seasr::frontend::{extract_features, FrontendConfig};
use seasr::lexicon::{apply_g2p, expand_tonal, load_inventory, validate_lexicon, G2PRuleSet, Lexicon, ToneSet};
use seasr::lm::{interpolate, perplexity, read_arpa, train_ngram, write_arpa, InterpolationWeight, Smoothing, TrainConfig};
use seasr::scoring::{format_tsv, pair_lines, score_lines};
use seasr::server::{serve, ServerConfig, ServerOptions};

#[derive(Parser)]
#[command(name = "seasr", version, about = "Speech recognition toolkit for tonal and low-resource languages")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Feature extraction
    #[command(subcommand)]
    Frontend(FrontendCmd),
    /// Phoneme inventories, dictionaries and G2P
    #[command(subcommand)]
    Lex(LexCmd),
    /// N-gram language models
    #[command(subcommand)]
    Lm(LmCmd),
    /// Web corpus bootstrapping and manifest checks
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Decode a feature file
    Decode(DecodeArgs),
    /// Error rates
    #[command(subcommand)]
    Score(ScoreCmd),
    /// Run the streaming recognition server
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum FrontendCmd {
    /// WAV (or raw PCM16LE with --raw-rate) to a FEAT matrix
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Treat input as headerless PCM at this rate
        #[arg(long)]
        raw_rate: Option<u32>,
        /// `key = value` frontend config
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LexCmd {
    /// Expand tonal units into one unit per tone
    Expand {
        #[arg(long)]
        inv: PathBuf,
        #[arg(long)]
        tones: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every pronunciation against an inventory
    Validate {
        #[arg(long)]
        inv: PathBuf,
        #[arg(long)]
        lex: PathBuf,
        /// Expand the inventory with this many tones first
        #[arg(long)]
        tones: Option<usize>,
    },
    /// Print pronunciations as lexicon lines
    G2p {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long = "word", required = true)]
        words: Vec<String>,
        /// Reject rules whose output is not in this inventory
        #[arg(long)]
        inv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LmCmd {
    Train {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        /// Maximum likelihood instead of Witten-Bell
        #[arg(long)]
        mle: bool,
        /// Do not wrap sentences in <s> </s>
        #[arg(long)]
        no_markers: bool,
    },
    Interp {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Weight of model a
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Ppl {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Top-K word frequency list from transcripts
    Freq {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        top: usize,
    },
    /// Search queries from the top words of a transcript file
    Queries {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        top: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit one query per vocabulary word outside the top list instead
        #[arg(long)]
        single: bool,
    },
    /// Dedupe and filter a URL list, one URL per line
    FilterUrls {
        #[arg(long = "in")]
        input: PathBuf,
        /// Keep only hosts under this suffix
        #[arg(long)]
        domain: Option<String>,
    },
    /// Main text of an HTML page
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check a recording manifest against the collection rules
    Validate {
        #[arg(long)]
        speakers: PathBuf,
        #[arg(long)]
        utterances: PathBuf,
    },
}

#[derive(Args)]
struct DecodeArgs {
    /// Graph spec TOML (inventory, lexicon, lm, tones)
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scorer: PathBuf,
    #[arg(long)]
    feat: PathBuf,
    #[arg(long, default_value_t = BeamConfig::default().beam)]
    beam: f64,
    #[arg(long, default_value_t = BeamConfig::default().max_active)]
    max_active: usize,
    #[arg(long, default_value_t = 1.0)]
    lm_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    word_insertion_penalty: f64,
    /// No pruning at all
    #[arg(long)]
    exact: bool,
    /// Replace the graph's LM
    #[arg(long)]
    lm: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ScoreCmd {
    /// Per-line and aggregate WER as TSV
    Wer {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config file's port
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, default_value = "0.0.0.0")]
    host: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Frontend(FrontendCmd::Extract {
            input,
            out,
            raw_rate,
            config,
        }) => {
            let cfg = match config {
                Some(p) => FrontendConfig::parse(&read(&p)?)?,
                None => FrontendConfig::default(),
            };
            let file = fs::File::open(&input).with_context(|| input.display().to_string())?;
            let audio = match raw_rate {
                Some(r) => read_raw_pcm16(file, r)?,
                None => read_wav(file)?,
            };
            let m = extract_features(&audio, &cfg)?;
            write_feat(&m, io::BufWriter::new(fs::File::create(&out)?))?;
            eprintln!("{} rows x {} cols", m.rows(), m.width());
        }

        Cmd::Lex(LexCmd::Expand { inv, tones, out }) => {
            let base = load_inventory("", &read(&inv)?)?;
            let expanded = expand_tonal(&base, &ToneSet::with_count(tones))?;
            write_out(out.as_deref(), &expanded.serialize())?;
            eprintln!("{} base units -> {} units", base.len(), expanded.len());
        }
        Cmd::Lex(LexCmd::Validate { inv, lex, tones }) => {
            let mut inventory = load_inventory("", &read(&inv)?)?;
            if let Some(n) = tones {
                inventory = expand_tonal(&inventory, &ToneSet::with_count(n))?;
            }
            let lexicon = Lexicon::parse(&read(&lex)?)?;
            let report = validate_lexicon(&lexicon, &inventory);
            for v in &report {
                println!("{v}");
            }
            eprintln!("{} entries, {} violations", lexicon.len(), report.len());
            if !report.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Lex(LexCmd::G2p { rules, words, inv }) => {
            let rules = G2PRuleSet::parse(&read(&rules)?)?;
            if let Some(p) = inv {
                rules.validate(&load_inventory("", &read(&p)?)?)?;
            }
            for w in words {
                let pron = apply_g2p(&w, &rules).with_context(|| w.clone())?;
                println!("{w}\t{}", pron.join(" "));
            }
        }

        Cmd::Lm(LmCmd::Train {
            order,
            input,
            out,
            min_count,
            mle,
            no_markers,
        }) => {
            let text = read(&input)?;
            let cfg = TrainConfig {
                order,
                smoothing: if mle { Smoothing::MaximumLikelihood } else { Smoothing::WittenBell },
                min_count,
                sentence_markers: !no_markers,
            };
            let lines: Vec<&str> = text.lines().collect();
            let m = train_ngram(&lines, &cfg)?;
            fs::write(&out, write_arpa(&m))?;
            eprintln!("order {} model, vocabulary {}", m.order(), m.vocab().len());
        }
        Cmd::Lm(LmCmd::Interp { a, b, lambda, out }) => {
            let ma = read_arpa(&read(&a)?).with_context(|| a.display().to_string())?;
            let mb = read_arpa(&read(&b)?).with_context(|| b.display().to_string())?;
            let mix = interpolate(&ma, &mb, InterpolationWeight::new(lambda)?)?;
            fs::write(&out, write_arpa(&mix))?;
        }
        Cmd::Lm(LmCmd::Ppl { model, input }) => {
            let m = read_arpa(&read(&model)?)?;
            let text = read(&input)?;
            let lines: Vec<&str> = text.lines().collect();
            let r = perplexity(&m, &lines)?;
            println!("sentences\t{}", r.sentences);
            println!("predicted\t{}", r.predicted);
            println!("oov\t{}", r.oov);
            println!("logprob\t{:.6}", r.logprob);
            println!("ppl\t{:.6}", r.perplexity);
        }

        Cmd::Corpus(CorpusCmd::Freq { input, top }) => {
            let text = read(&input)?;
            let lines: Vec<&str> = text.lines().collect();
            print!("{}", build_frequency_list(&lines, top)?.to_tsv());
        }
        Cmd::Corpus(CorpusCmd::Queries {
            input,
            top,
            pairs,
            seed,
            single,
        }) => {
            let text = read(&input)?;
            let lines: Vec<&str> = text.lines().collect();
            let freq = build_frequency_list(&lines, top)?;
            let set = if single {
                let all = build_frequency_list(&lines, usize::MAX)?;
                let vocab: Vec<&str> = all.words().collect();
                generate_single_queries(&vocab, &freq)?
            } else {
                generate_pair_queries(&freq, pairs, seed)?
            };
            let mut out = io::stdout().lock();
            for q in &set.queries {
                writeln!(out, "{q}")?;
            }
        }
        Cmd::Corpus(CorpusCmd::FilterUrls { input, domain }) => {
            let text = read(&input)?;
            let urls: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            let filter = match domain {
                Some(d) => UrlFilter::with_domain(&d),
                None => UrlFilter::default(),
            };
            let r = filter_urls(&urls, &filter);
            for u in &r.kept {
                println!("{u}");
            }
            eprintln!(
                "kept {} duplicates {} blocked {} off-domain {} unparseable {}",
                r.kept.len(),
                r.duplicates,
                r.blocked,
                r.off_domain,
                r.unparseable
            );
        }
        Cmd::Corpus(CorpusCmd::Extract { input }) => {
            let html = fs::read(&input).with_context(|| input.display().to_string())?;
            println!("{}", extract_main_text(&html));
        }
        Cmd::Corpus(CorpusCmd::Validate { speakers, utterances }) => {
            let m = CorpusManifest::parse(&read(&speakers)?, &read(&utterances)?)?;
            let report = validate_manifest(&m, &ManifestRules::default());
            for v in &report {
                println!("{v}");
            }
            eprintln!(
                "{} speakers, {} utterances, {} violations",
                m.speakers.len(),
                m.utterances.len(),
                report.len()
            );
            if !report.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }

        Cmd::Decode(a) => {
            let spec = GraphSpec::from_file(&a.graph)?;
            let lm = match &a.lm {
                Some(p) => Some(read_arpa(&read(p)?)?),
                None => None,
            };
            let graph = spec.build(lm.as_ref())?;
            let scorer = load_scorer(&read(&a.scorer)?).with_context(|| a.scorer.display().to_string())?;
            let feats = read_feat(fs::File::open(&a.feat)?, FrontendConfig::default().frame_shift_ms)?;
            let cfg = if a.exact {
                BeamConfig {
                    lm_scale: a.lm_scale,
                    word_insertion_penalty: a.word_insertion_penalty,
                    ..BeamConfig::exact()
                }
            } else {
                BeamConfig {
                    beam: a.beam,
                    max_active: a.max_active,
                    lm_scale: a.lm_scale,
                    word_insertion_penalty: a.word_insertion_penalty,
                }
            };
            let h = viterbi_decode(&feats, &graph, scorer.as_ref(), &cfg)?;
            println!("{}", h.transcript());
            eprintln!("score {:.6} over {} frames", h.score, feats.rows());
            for (w, (s, e)) in h.words.iter().zip(&h.boundaries) {
                eprintln!("{w}\t{s}\t{e}");
            }
        }

        Cmd::Score(ScoreCmd::Wer { reference, hyp }) => {
            let (r, h) = (read(&reference)?, read(&hyp)?);
            let pairs = pair_lines(&r, &h)?;
            let (per, total) = score_lines(&pairs)?;
            print!("{}", format_tsv(&per, &total));
        }

        Cmd::Serve(a) => {
            let cfg = ServerConfig::from_file(&a.config)?;
            let pool = Arc::new(cfg.load_pool()?);
            let port = a.port.unwrap_or(cfg.port);
            let listener = TcpListener::bind((a.host.as_str(), port)).with_context(|| format!("bind port {port}"))?;
            let opts = ServerOptions {
                timeout: Duration::from_secs(cfg.timeout_secs),
                partial_interval: cfg.partial_interval,
            };
            serve(listener, pool, opts)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| path.display().to_string())
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| p.display().to_string()),
        None => {
            if text.is_empty() {
                bail!("nothing to write");
            }
            io::stdout().write_all(text.as_bytes()).map_err(Into::into)
        }
    }
}
