use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use glyphcrt::channel::{ChannelParams, DEFAULT_SIGMA};
use glyphcrt::codebook::{
    build_codebook, BuildParams, Candidate, ChannelOracle, CharacterBuild, Codebook,
};
use glyphcrt::crc::MlScope;
use glyphcrt::crypto::{
    sign_scheme1, sign_scheme2, verify, Credential, HashId, PermutationKey, SegmentStatus,
    SignatureConfig, ToyRsaPrivate, ToyRsaPublic, DEFAULT_SEGMENT_MIN_LETTERS,
};
use glyphcrt::fixtures;
use glyphcrt::outline::ManifoldPoint;
use glyphcrt::perceptual::{
    fit, responses_from_text, responses_to_text, scores_from_text, scores_to_text,
    select_candidates, synth_responses, FitConfig, QUESTIONS_PER_RATER,
};
use glyphcrt::pipeline::{
    capacity_report, embed, extract_report, extract_trace_report, monte_carlo_capacity,
    simulate_block_errors, simulate_document, ChannelTrace, CodecOptions, EncodedDocument,
    ExtractReport, PlainMessage, VectorDocument, DEFAULT_K, DEFAULT_N,
};
use glyphcrt::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERSION: &str = env!("CARGO_PKG_VERSION");

mod exit {
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CAPACITY: u8 = 3;
    pub const DECODE: u8 = 4;
    pub const KEY: u8 = 5;
    pub const SIGNATURE: u8 = 6;
    pub const FORMAT: u8 = 7;
}

#[derive(Parser)]
#[command(
    name = "glyphcrt",
    version,
    about = "Hide messages in glyph perturbations"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CodebookArg {
    /// Codebook file; the calibrated synthetic codebook when omitted.
    #[arg(long)]
    codebook: Option<PathBuf>,
}

#[derive(Args)]
struct BlockArgs {
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// Likelihood decoding scope: ties, list, or radius:R.
    #[arg(long, default_value = "list", value_parser = parse_scope)]
    scope: MlScope,
}

impl BlockArgs {
    fn options(&self) -> CodecOptions {
        CodecOptions {
            n: self.n,
            k: self.k,
            scope: self.scope,
        }
    }

    fn describe(&self) -> String {
        format!("n={} k={} scope={}", self.n, self.k, self.scope.as_str())
    }
}

fn parse_scope(s: &str) -> Result<MlScope, String> {
    MlScope::parse(s).ok_or_else(|| format!("unknown scope {s:?}"))
}

fn parse_hash(s: &str) -> Result<HashId, String> {
    HashId::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Build a codebook from synthetic candidates, or write the calibrated one.
    CodebookBuild {
        #[arg(long)]
        calibrated: bool,
        #[arg(long, default_value = "abcdefghijklmnopqrstuvwxyz")]
        chars: String,
        /// Candidates sampled per character.
        #[arg(long, default_value_t = 40)]
        candidates: usize,
        /// Radius of the manifold disk candidates are drawn from.
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        /// Perceptual scores; candidates below the threshold are dropped.
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long, default_value_t = 0.85)]
        perceptual_threshold: f64,
        #[arg(long, default_value_t = 0.95)]
        confusion_threshold: f64,
        #[arg(long, default_value_t = 0.90)]
        final_threshold: f64,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        #[arg(long, default_value = "synthetic")]
        font_id: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fit Bradley-Terry scores to 2AFC responses.
    FitPerceptual {
        /// Responses file.
        #[arg(long, conflicts_with = "synthetic_glyphs")]
        responses: Option<PathBuf>,
        /// Synthesize a study over this many glyphs instead.
        #[arg(long)]
        synthetic_glyphs: Option<usize>,
        #[arg(long, default_value_t = 200)]
        raters: usize,
        /// Where to save synthesized responses.
        #[arg(long)]
        responses_out: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Report the embedding capacity of a text or of English letter statistics.
    Capacity {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long, required_unless_present = "monte_carlo")]
        text: Option<PathBuf>,
        /// Sample this many blocks of English-frequency letters instead.
        #[arg(long, conflicts_with = "text")]
        monte_carlo: Option<usize>,
        #[command(flatten)]
        block: BlockArgs,
    },
    /// Embed a message into a text.
    Embed {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        text: PathBuf,
        /// Message file, embedded byte for byte.
        #[arg(long, required_unless_present = "bits")]
        message: Option<PathBuf>,
        /// Message as a string of 0 and 1.
        #[arg(long, conflicts_with = "message")]
        bits: Option<String>,
        #[arg(long)]
        key: Option<PathBuf>,
        #[command(flatten)]
        block: BlockArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover a message from a document, vector document, or channel trace.
    Extract {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        key: Option<PathBuf>,
        #[command(flatten)]
        block: BlockArgs,
        /// Message file; without it the bits are printed.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pass a document through the simulated recognition channel.
    Simulate {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
        /// Force exactly this many misread letters per block.
        #[arg(long, requires = "blocks")]
        errors: Option<usize>,
        /// Number of leading blocks that receive forced errors.
        #[arg(long, requires = "errors")]
        blocks: Option<usize>,
        /// Write the rendered vector document instead of a trace.
        #[arg(long, conflicts_with = "errors")]
        vector: bool,
        #[command(flatten)]
        block: BlockArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a permutation key, or a toy RSA key pair.
    Keygen {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        rsa: bool,
        /// Public half of an RSA key pair.
        #[arg(long, requires = "rsa")]
        public_out: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Embed per-segment signatures into a text.
    Sign {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        text: PathBuf,
        /// Permutation key (secret-key scheme).
        #[arg(
            long,
            required_unless_present = "rsa_private",
            conflicts_with = "rsa_private"
        )]
        key: Option<PathBuf>,
        /// RSA private key (public-key scheme).
        #[arg(long)]
        rsa_private: Option<PathBuf>,
        #[command(flatten)]
        signing: SigningArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check the per-segment signatures of a document.
    Verify {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(
            long,
            required_unless_present = "rsa_public",
            conflicts_with = "rsa_public"
        )]
        key: Option<PathBuf>,
        #[arg(long)]
        rsa_public: Option<PathBuf>,
        #[command(flatten)]
        signing: SigningArgs,
    },
    /// Time trace decoding of the 176-letter fixture.
    Bench {
        #[command(flatten)]
        codebook: CodebookArg,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[command(flatten)]
        block: BlockArgs,
    },
}

#[derive(Args)]
struct SigningArgs {
    #[arg(long, default_value = "sha256-128", value_parser = parse_hash)]
    hash: HashId,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_MIN_LETTERS)]
    segment_letters: usize,
    #[command(flatten)]
    block: BlockArgs,
}

impl SigningArgs {
    fn config(&self) -> SignatureConfig {
        SignatureConfig {
            hash: self.hash,
            segment_min_letters: self.segment_letters,
            codec: self.block.options(),
        }
    }

    fn describe(&self) -> String {
        format!(
            "hash={} segment_letters={} {}",
            self.hash.as_str(),
            self.segment_letters,
            self.block.describe()
        )
    }
}

/// An input file could not be read; reported as a usage error.
#[derive(Debug)]
struct MissingInput(PathBuf, std::io::Error);

impl std::fmt::Display for MissingInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot read {}: {}", self.0.display(), self.1)
    }
}

impl std::error::Error for MissingInput {}

/// Verification found mismatching segments.
#[derive(Debug)]
struct SignatureMismatch(Vec<usize>);

impl std::fmt::Display for SignatureMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "signature mismatch in segments {:?}", self.0)
    }
}

impl std::error::Error for SignatureMismatch {}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| MissingInput(path.to_path_buf(), e).into())
}

fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).map_err(|e| MissingInput(path.to_path_buf(), e).into())
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn header(seed: u64, config: String) -> Vec<String> {
    vec![format!("glyphcrt {VERSION} seed={seed} {config}")]
}

fn load_codebook(arg: &CodebookArg) -> anyhow::Result<Codebook> {
    match &arg.codebook {
        Some(p) => Ok(Codebook::from_text(&read(p)?)?),
        None => Ok(fixtures::calibrated_codebook()),
    }
}

fn load_key(path: Option<&PathBuf>) -> anyhow::Result<Option<PermutationKey>> {
    path.map(|p| Ok(PermutationKey::from_text(&read(p)?)?))
        .transpose()
}

enum Input {
    Document(EncodedDocument),
    Trace(ChannelTrace),
}

fn load_input(path: &Path, codebook: &Codebook) -> anyhow::Result<Input> {
    let text = read(path)?;
    let magic = text.lines().next().unwrap_or_default();
    Ok(match magic {
        "glyphcrt-document 1" => Input::Document(EncodedDocument::from_text(&text)?),
        "glyphcrt-trace 1" => Input::Trace(ChannelTrace::from_text(&text)?),
        "glyphcrt-vector 1" => Input::Trace(VectorDocument::from_text(&text)?.recognize(codebook)?),
        _ => {
            return Err(Error::Format {
                line: 1,
                msg: format!("unrecognized file type {magic:?}"),
            }
            .into())
        }
    })
}

fn load_document(path: &Path) -> anyhow::Result<EncodedDocument> {
    Ok(EncodedDocument::from_text(&read(path)?)?)
}

struct BuildOptions<'a> {
    calibrated: bool,
    chars: &'a str,
    candidates: usize,
    radius: f64,
    scores: Option<&'a Path>,
    perceptual: f64,
    confusion: f64,
    fin: f64,
    sigma: f64,
    font_id: &'a str,
    output: &'a Path,
}

fn codebook_build(seed: u64, o: BuildOptions<'_>) -> anyhow::Result<()> {
    let BuildOptions {
        calibrated,
        chars,
        candidates,
        radius,
        scores,
        perceptual,
        confusion,
        fin,
        sigma,
        font_id,
        output,
    } = o;
    if calibrated {
        let cb = fixtures::calibrated_codebook();
        write(
            output,
            cb.to_text(&header(seed, "codebook=calibrated".into())),
        )?;
        println!("characters {}", cb.entries().count());
        return Ok(());
    }
    let keep = scores
        .map(|p| -> anyhow::Result<_> {
            let s = scores_from_text(&read(p)?)?;
            Ok(select_candidates(&s, perceptual))
        })
        .transpose()?;
    let inputs: Vec<CharacterBuild> = chars
        .chars()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let points = fixtures::random_points(candidates, radius, &mut rng);
            let mut cands: Vec<Candidate> = fixtures::candidates(c, &points);
            if let Some(keep) = &keep {
                cands.retain(|cand| keep.contains(&cand.id));
            }
            CharacterBuild {
                character: c,
                original: fixtures::candidates(c, &[ManifoldPoint { x: 0.0, y: 0.0 }]).remove(0),
                candidates: cands,
            }
        })
        .collect();
    let oracle = ChannelOracle {
        params: ChannelParams::new(sigma, seed)?,
    };
    let params = BuildParams {
        font_id: font_id.to_string(),
        pair_threshold: confusion,
        final_threshold: fin,
        seed,
        ..BuildParams::default()
    };
    let (cb, report) = build_codebook(&inputs, &oracle, &params)?;
    let config = format!(
        "chars={chars} candidates={candidates} radius={radius} perceptual_threshold={perceptual} \
         confusion_threshold={confusion} final_threshold={fin} sigma={sigma} font_id={font_id}"
    );
    write(output, cb.to_text(&header(seed, config)))?;
    for (c, iterations, warning) in &report.characters {
        let capacity = cb.capacity(*c).unwrap_or(0);
        println!("char {c} iterations {iterations} capacity {capacity}");
        if let Some(w) = warning {
            eprintln!("warning: {c}: {w}");
        }
    }
    Ok(())
}

fn fit_perceptual(
    seed: u64,
    responses: Option<&Path>,
    synthetic: Option<usize>,
    raters: usize,
    responses_out: Option<&Path>,
    output: &Path,
) -> anyhow::Result<()> {
    let (list, source) = match (responses, synthetic) {
        (Some(p), _) => (
            responses_from_text(&read(p)?)?,
            "responses=file".to_string(),
        ),
        (None, Some(g)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: Vec<f64> = (0..g).map(|_| rng.random::<f64>()).collect();
            let r: Vec<f64> = (0..raters).map(|_| -rng.random_range(4.0..12.0)).collect();
            let list = synth_responses(&s, &r, QUESTIONS_PER_RATER, seed)?;
            let source = format!("synthetic_glyphs={g} raters={raters}");
            if let Some(out) = responses_out {
                write(out, responses_to_text(&list, &header(seed, source.clone())))?;
            }
            (list, source)
        }
        (None, None) => bail!(Error::InvalidArgument(
            "one of --responses or --synthetic-glyphs is required".into()
        )),
    };
    let result = fit(&list, &FitConfig::default())?;
    write(output, scores_to_text(&result, &header(seed, source)))?;
    println!(
        "responses {} glyphs {} raters {} iterations {} converged {} components {}",
        list.len(),
        result.scores.len(),
        result.reliabilities.len(),
        result.iterations,
        result.converged,
        result.components.len()
    );
    Ok(())
}

fn print_report(report: &ExtractReport) {
    print!("{report}");
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::CodebookBuild {
            calibrated,
            chars,
            candidates,
            radius,
            scores,
            perceptual_threshold,
            confusion_threshold,
            final_threshold,
            sigma,
            font_id,
            output,
        } => codebook_build(
            seed,
            BuildOptions {
                calibrated,
                chars: &chars,
                candidates,
                radius,
                scores: scores.as_deref(),
                perceptual: perceptual_threshold,
                confusion: confusion_threshold,
                fin: final_threshold,
                sigma,
                font_id: &font_id,
                output: &output,
            },
        ),
        Command::FitPerceptual {
            responses,
            synthetic_glyphs,
            raters,
            responses_out,
            output,
        } => fit_perceptual(
            seed,
            responses.as_deref(),
            synthetic_glyphs,
            raters,
            responses_out.as_deref(),
            &output,
        ),
        Command::Capacity {
            codebook,
            text,
            monte_carlo,
            block,
        } => {
            let cb = load_codebook(&codebook)?;
            let report = match (text, monte_carlo) {
                (Some(p), _) => capacity_report(&read(&p)?, &cb, block.n, block.k)?,
                (None, Some(b)) => monte_carlo_capacity(
                    &cb,
                    &fixtures::ENGLISH_FREQUENCIES,
                    b,
                    block.n,
                    block.k,
                    seed,
                )?,
                (None, None) => unreachable!("clap requires one"),
            };
            print!("{}", report.render());
            Ok(())
        }
        Command::Embed {
            codebook,
            text,
            message,
            bits,
            key,
            block,
            output,
        } => {
            let cb = load_codebook(&codebook)?;
            let message = match (message, bits) {
                (Some(p), _) => PlainMessage::from_bytes(&read_bytes(&p)?),
                (None, Some(b)) => PlainMessage::from_bit_string(&b)?,
                (None, None) => unreachable!("clap requires one"),
            };
            let key = load_key(key.as_ref())?;
            let doc = embed(&read(&text)?, &cb, &message, key.as_ref(), &block.options())?;
            let config = format!("embed keyed={} {}", key.is_some(), block.describe());
            write(&output, doc.to_text(&header(seed, config)))?;
            println!("bits {}", message.len());
            Ok(())
        }
        Command::Extract {
            codebook,
            input,
            key,
            block,
            output,
        } => {
            let cb = load_codebook(&codebook)?;
            let key = load_key(key.as_ref())?;
            let opts = block.options();
            let report = match load_input(&input, &cb)? {
                Input::Document(d) => extract_report(&d, &cb, key.as_ref(), &opts)?,
                Input::Trace(t) => extract_trace_report(&t, &cb, key.as_ref(), &opts)?,
            };
            print_report(&report);
            let message = report.message()?;
            match output {
                Some(p) => {
                    let bytes = message.to_bytes().ok_or_else(|| {
                        anyhow!(
                            "message has {} bits, not a whole number of bytes",
                            message.len()
                        )
                    })?;
                    write(&p, bytes)?;
                }
                None => {
                    let s: String = message
                        .bits
                        .iter()
                        .map(|&b| if b { '1' } else { '0' })
                        .collect();
                    println!("message {s}");
                }
            }
            Ok(())
        }
        Command::Simulate {
            codebook,
            input,
            key,
            sigma,
            errors,
            blocks,
            vector,
            block,
            output,
        } => {
            let cb = load_codebook(&codebook)?;
            let key = load_key(key.as_ref())?;
            let doc = load_document(&input)?;
            let params = ChannelParams::new(sigma, seed)?;
            let mut config = format!("simulate sigma={sigma} {}", block.describe());
            let contents = if vector {
                config.push_str(" vector=true");
                doc.render(&cb)?.to_text(&header(seed, config))
            } else {
                let trace = match (errors, blocks) {
                    (Some(e), Some(b)) => {
                        config.push_str(&format!(" errors={e} blocks={b}"));
                        simulate_block_errors(
                            &doc,
                            &cb,
                            key.as_ref(),
                            &vec![e; b],
                            &params,
                            &block.options(),
                        )?
                    }
                    _ => simulate_document(&doc, &cb, &params)?,
                };
                let wrong = trace
                    .results
                    .iter()
                    .filter(|r| r.is_correct() == Some(false))
                    .count();
                println!("letters {} misread {wrong}", trace.results.len());
                trace.to_text(&header(seed, config))
            };
            write(&output, contents)
        }
        Command::Keygen {
            codebook,
            rsa,
            public_out,
            output,
        } => {
            if rsa {
                let key = ToyRsaPrivate::generate(seed);
                write(&output, key.to_text(&header(seed, "keygen=rsa".into())))?;
                if let Some(p) = public_out {
                    write(&p, key.public.to_text(&header(seed, "keygen=rsa".into())))?;
                }
                println!("modulus {}", key.public.n);
            } else {
                let cb = load_codebook(&codebook)?;
                let key = PermutationKey::generate(&cb, seed);
                write(
                    &output,
                    key.to_text(&header(seed, "keygen=permutation".into())),
                )?;
                println!(
                    "key_space_bits {:.3}",
                    glyphcrt::crypto::key_space_bits(&cb)
                );
            }
            Ok(())
        }
        Command::Sign {
            codebook,
            text,
            key,
            rsa_private,
            signing,
            output,
        } => {
            let cb = load_codebook(&codebook)?;
            let text = read(&text)?;
            let config = signing.config();
            let (doc, scheme) = match (key, rsa_private) {
                (Some(k), _) => {
                    let key = PermutationKey::from_text(&read(&k)?)?;
                    (sign_scheme1(&text, &cb, &key, &config)?, 1)
                }
                (None, Some(p)) => {
                    let key = ToyRsaPrivate::from_text(&read(&p)?)?;
                    (sign_scheme2(&text, &cb, &key, &config)?, 2)
                }
                (None, None) => unreachable!("clap requires one"),
            };
            let described = format!("sign scheme={scheme} {}", signing.describe());
            write(&output, doc.to_text(&header(seed, described)))
        }
        Command::Verify {
            codebook,
            input,
            key,
            rsa_public,
            signing,
        } => {
            let cb = load_codebook(&codebook)?;
            let doc = load_document(&input)?;
            let config = signing.config();
            let report = match (key, rsa_public) {
                (Some(k), _) => {
                    let key = PermutationKey::from_text(&read(&k)?)?;
                    verify(&doc, &cb, Credential::Key(&key), &config)?
                }
                (None, Some(p)) => {
                    let public = ToyRsaPublic::from_text(&read(&p)?)?;
                    verify(&doc, &cb, Credential::Public(&public), &config)?
                }
                (None, None) => unreachable!("clap requires one"),
            };
            print!("{report}");
            if report.overall() == SegmentStatus::Mismatch {
                return Err(SignatureMismatch(report.mismatched()).into());
            }
            Ok(())
        }
        Command::Bench {
            codebook,
            repeats,
            block,
        } => {
            let cb = load_codebook(&codebook)?;
            let opts = block.options();
            let text = fixtures::bench_text();
            let capacity = capacity_report(&text, &cb, opts.n, opts.k)?;
            let payload = capacity.total_bits.saturating_sub(32) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let message = PlainMessage::new((0..payload).map(|_| rng.random()).collect());
            let doc = embed(&text, &cb, &message, None, &opts)?;
            let trace = simulate_document(&doc, &cb, &ChannelParams::new(DEFAULT_SIGMA, seed)?)?;
            let mut times = Vec::with_capacity(repeats.max(1));
            let mut decoded = false;
            for _ in 0..repeats.max(1) {
                let start = Instant::now();
                let report = extract_trace_report(&trace, &cb, None, &opts)?;
                times.push(start.elapsed().as_secs_f64());
                decoded = report.message().ok().as_ref() == Some(&message);
            }
            times.sort_by(f64::total_cmp);
            println!(
                "letters {} blocks {} payload_bits {payload} decoded {decoded} decode_seconds {:.6}",
                trace.results.len(),
                capacity.blocks,
                times[times.len() / 2]
            );
            Ok(())
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.is::<MissingInput>() {
        return exit::USAGE;
    }
    if e.is::<SignatureMismatch>() {
        return exit::SIGNATURE;
    }
    match e.downcast_ref::<Error>() {
        Some(
            Error::CapacityExceeded { .. }
            | Error::SegmentCapacity { .. }
            | Error::DocumentTooSmall,
        ) => exit::CAPACITY,
        Some(Error::PartialDecode { .. } | Error::CorruptFrame(_)) => exit::DECODE,
        Some(Error::KeyMismatch(_)) => exit::KEY,
        Some(Error::Format { .. } | Error::UnknownHash(_) | Error::UnknownCharacter(_)) => {
            exit::FORMAT
        }
        Some(Error::InvalidArgument(_)) => exit::USAGE,
        _ => exit::FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
