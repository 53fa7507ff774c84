use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use dsum::config::{DecodeMode, ExperimentConfig};
use dsum::decoder::{self, received_to_sign_function};
use dsum::gf2;
use dsum::io::{self, Manifest, SWideSidecar};
use dsum::pipeline::{self, Received};
use dsum::regularity::{efficient_split_decompose, verify_split_residual, CutClass, SplitParams};
use dsum::Error;

#[derive(Parser)]
#[command(name = "dsum", version, about = "Direct-sum codes over expander walks")]
struct Cli {
    /// Experiment config (sectioned key = value). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set walks.k=4`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Omit timing from reports so identical inputs give identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads for internal parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat failed premises and uncertified decompositions as failures (exit 5).
    #[arg(long, global = true)]
    strict: bool,
    /// Write the JSON report here as well as to stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Base code generator matrix.
    GenCode {
        #[arg(long)]
        out: PathBuf,
    },
    /// Rotation-map file for [graph], or [inner_graph] with --inner.
    GenGraph {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        inner: bool,
    },
    /// Walk-collection file; s-wide collections can also write a sidecar with graph files.
    BuildWalks {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Generator matrix of the lifted code, plus an optional manifest of content hashes.
    Lift {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Spectral, parity-sampling and premise report.
    Analyze,
    /// Encodes a message (or reads a word) and corrupts it.
    Corrupt {
        /// Message index in 0..2^D.
        #[arg(long, conflicts_with = "input")]
        message: Option<u64>,
        /// A lifted codeword (or symbol word in direct-product mode).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unique decoding of a received word.
    Decode {
        #[arg(long)]
        input: PathBuf,
    },
    /// List decoding of a received word (decode.mode list or direct-product).
    ListDecode {
        #[arg(long)]
        input: PathBuf,
    },
    /// Split regularity decomposition of the ±1 function of a received word.
    Regularity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long)]
        log: Option<PathBuf>,
        /// Check max_f ⟨g − h, f⟩ by enumeration when n^k fits the cap.
        #[arg(long)]
        verify: bool,
    },
    /// Reference parameter schedule of the explicit construction (non-binding).
    ParamsSuggest {
        #[arg(long)]
        epsilon: f64,
    },
    /// Aggregates JSON reports into one CSV row each.
    Report {
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plants, corrupts and decodes `run.trials` messages.
    Run,
}

enum Failure {
    Lib(Error),
    NotFound(String),
    Strict(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Cap { .. } => 3,
        Error::Config(_)
        | Error::Parse(_)
        | Error::Invalid(_)
        | Error::Io(_)
        | Error::Dimension(_)
        | Error::LengthMismatch { .. }
        | Error::NotRegular(_) => 2,
        _ => 1,
    }
}

struct Ctx {
    cfg: ExperimentConfig,
    deterministic: bool,
    strict: bool,
    report: Option<PathBuf>,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T) -> CmdResult {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        if let Some(p) = &self.report {
            io::write_text(p, &text)?;
        }
        print!("{text}");
        Ok(())
    }

    fn check_strict(&self, failures: Vec<String>) -> CmdResult {
        if (self.strict || self.cfg.run.strict) && !failures.is_empty() {
            Err(Failure::Strict(failures))
        } else {
            Ok(())
        }
    }
}

fn written(path: &Path, text: &str) -> Result<Value, Error> {
    io::write_text(path, text)?;
    Ok(json!({"path": path.display().to_string(), "sha256": io::content_hash(text.as_bytes())}))
}

fn read_received(ctx: &Ctx, path: &Path) -> Result<Received, Error> {
    let text = io::read_text(path)?;
    Ok(match ctx.cfg.decode.mode {
        DecodeMode::DirectProduct => Received::Symbols(io::parse_symbols(&text)?),
        _ => Received::Bits(io::parse_codeword(&text)?),
    })
}

fn decode_cmd(ctx: &Ctx, input: &Path, unique: bool) -> CmdResult {
    let inst = pipeline::build_instance(&ctx.cfg)?;
    let lifted = inst.lift()?;
    let measures = pipeline::measure(&inst, &lifted)?;
    let received = read_received(ctx, input)?;
    let report =
        pipeline::decode_received(&inst, &lifted, &measures, &ctx.cfg, &received, ctx.deterministic)?;
    ctx.emit(&report)?;
    if unique && !report.found {
        return Err(Failure::NotFound("no codeword within the unique-decoding radius".into()));
    }
    ctx.check_strict(report.strict_failures())
}

fn run(cli: Cli) -> CmdResult {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p, &cli.overrides)?,
        None => ExperimentConfig::parse("", &cli.overrides)?,
    };
    let mut ctx = Ctx {
        cfg: cfg.clone(),
        deterministic: cli.deterministic,
        strict: cli.strict,
        report: cli.report.clone(),
    };
    match cli.cmd {
        Command::GenCode { out } => {
            cfg.validate()?;
            let code = pipeline::build_base_code(&cfg)?;
            let file = written(&out, &io::format_matrix(code.generator(), code.blocklength()))?;
            ctx.emit(&json!({
                "command": "gen-code",
                "inputs": {"config": pipeline::config_hash(&cfg)},
                "output": file,
                "dim": code.dim(),
                "blocklength": code.blocklength(),
                "bias": gf2::code_bias_bruteforce(&code)?,
            }))
        }
        Command::GenGraph { out, inner } => {
            let section = if inner {
                cfg.inner_graph
                    .clone()
                    .ok_or_else(|| Error::Config("missing [inner_graph]".into()))?
            } else {
                cfg.graph.clone()
            };
            let g = pipeline::build_graph(&cfg, &section)?;
            let file = written(&out, &io::format_graph(&g))?;
            ctx.emit(&json!({
                "command": "gen-graph",
                "inputs": {"config": pipeline::config_hash(&cfg)},
                "output": file,
                "graph": pipeline::graph_summary(if inner { "H" } else { "G" }, &g)?,
            }))
        }
        Command::BuildWalks { out, sidecar } => {
            cfg.validate()?;
            let n = match &cfg.base.file {
                Some(_) => pipeline::build_base_code(&cfg)?.blocklength(),
                None => cfg.base.blocklength * cfg.base.multiplicity,
            };
            let (graphs, product, walks) = pipeline::build_walks(&cfg, n)?;
            let file = written(&out, &io::format_walks(&walks))?;
            let mut side = Value::Null;
            if let Some(sc) = sidecar {
                let p = product
                    .as_ref()
                    .ok_or_else(|| Error::Config("--sidecar needs walks.mode = s-wide".into()))?;
                let stem = sc.file_stem().unwrap_or_default().to_string_lossy().to_string();
                let dir = sc.parent().unwrap_or(Path::new(""));
                let mut names = Vec::new();
                for (role, g) in &graphs {
                    let name = format!("{stem}.{role}.txt");
                    io::write_text(&dir.join(&name), &io::format_graph(g))?;
                    names.push(name);
                }
                let meta = SWideSidecar {
                    n_outer: p.g.n(),
                    d1: p.d1(),
                    d2: p.d2(),
                    s: p.s,
                    outer_graph: names[0].clone(),
                    inner_graph: names[1].clone(),
                };
                side = written(&sc, &io::format_sidecar(&meta))?;
            }
            ctx.emit(&json!({
                "command": "build-walks",
                "inputs": {"config": pipeline::config_hash(&cfg)},
                "output": file,
                "sidecar": side,
                "n": walks.ground_size(),
                "k": walks.arity(),
                "degree": walks.step_degree(),
                "count": walks.len(),
                "regular": walks.is_regular(),
            }))
        }
        Command::Lift { out, manifest } => {
            let inst = pipeline::build_instance(&cfg)?;
            let lifted = inst.lift()?;
            let file = written(&out, &io::format_matrix(lifted.code.generator(), lifted.blocklength()))?;
            let mut man = Value::Null;
            if let Some(mp) = manifest {
                let mut m = Manifest::default();
                if let Some(f) = &cfg.base.file {
                    m.add_file("base", &cfg.resolve(f))?;
                }
                if let Some(f) = &cfg.walks.file {
                    m.add_file("walks", &cfg.resolve(f))?;
                }
                m.add_file("lifted", &out)?;
                man = written(&mp, &m.format())?;
            }
            ctx.emit(&json!({
                "command": "lift",
                "inputs": inst.hashes,
                "output": file,
                "manifest": man,
                "dim": lifted.dim(),
                "blocklength": lifted.blocklength(),
                "rate": lifted.rate(),
                "bias": dsum::direct_sum::lifted_code_bias(&lifted)?,
            }))
        }
        Command::Analyze => {
            let inst = pipeline::build_instance(&cfg)?;
            let report = pipeline::analyze(&inst, &cfg)?;
            ctx.emit(&report)?;
            ctx.check_strict(
                report
                    .premises
                    .iter()
                    .filter(|p| !p.holds)
                    .map(|p| format!("premise fails: {}", p.name))
                    .collect(),
            )
        }
        Command::Corrupt { message, input, out } => {
            let inst = pipeline::build_instance(&cfg)?;
            let lifted = inst.lift()?;
            let dprod = cfg.decode.mode == DecodeMode::DirectProduct;
            let (clean, hash_in) = match (message, &input) {
                (Some(idx), _) => {
                    if idx >> inst.base.dim() != 0 {
                        return Err(Error::Config(format!("message index {idx} out of range")).into());
                    }
                    let m = inst.base.message(idx);
                    (
                        if dprod {
                            Received::Symbols(decoder::dprod_lift_word(&inst.base.encode(&m)?, &inst.walks)?)
                        } else {
                            Received::Bits(lifted.encode(&m)?)
                        },
                        None,
                    )
                }
                (None, Some(p)) => {
                    let r = read_received(&ctx, p)?;
                    let h = r.hash();
                    (r, Some(h))
                }
                (None, None) => {
                    return Err(Error::Config("corrupt needs --message or --input".into()).into())
                }
            };
            let k = inst.walks.arity();
            let (text, errors) = match &clean {
                Received::Bits(y) => {
                    let z = match (&cfg.corrupt.file, cfg.corrupt.rate) {
                        (Some(f), _) => pipeline::apply_flips(
                            y,
                            &io::parse_positions(&io::read_text(&cfg.resolve(f))?)?,
                        )?,
                        (None, Some(rate)) => pipeline::corrupt_word(y, rate, cfg.corrupt.seed, 0),
                        (None, None) => {
                            return Err(Error::Config("corrupt needs corrupt.rate or corrupt.file".into()).into())
                        }
                    };
                    (io::format_codeword(&z), z.hamming(y))
                }
                Received::Symbols(y) => {
                    let rate = cfg
                        .corrupt
                        .rate
                        .ok_or_else(|| Error::Config("symbol corruption needs corrupt.rate".into()))?;
                    let z = pipeline::corrupt_symbols(y, k, rate, cfg.corrupt.seed, 0);
                    let e = z.iter().zip(y).filter(|(a, b)| a != b).count();
                    (io::format_symbols(&z), e)
                }
            };
            let mut inputs: BTreeMap<String, String> = inst.hashes.clone();
            if let Some(h) = hash_in {
                inputs.insert("input".into(), h);
            }
            let file = written(&out, &text)?;
            ctx.emit(&json!({
                "command": "corrupt",
                "inputs": inputs,
                "output": file,
                "message": message,
                "errors": errors,
                "fraction": errors as f64 / lifted.blocklength() as f64,
            }))
        }
        Command::Decode { input } => {
            cfg.decode.mode = DecodeMode::Unique;
            ctx.cfg = cfg;
            decode_cmd(&ctx, &input, true)
        }
        Command::ListDecode { input } => {
            if cfg.decode.mode == DecodeMode::Unique {
                cfg.decode.mode = DecodeMode::List;
            }
            ctx.cfg = cfg;
            decode_cmd(&ctx, &input, false)
        }
        Command::Regularity {
            input,
            decomposition,
            log,
            verify,
        } => {
            let inst = pipeline::build_instance(&cfg)?;
            let y = io::parse_codeword(&io::read_text(&input)?)?;
            let g = received_to_sign_function(&y, &inst.walks)?;
            let dc = pipeline::decode_config(&cfg);
            let delta = cfg.decode.delta.or(cfg.decode.beta).unwrap_or(0.25);
            let mut sp = SplitParams::new(delta, CutClass::Signed);
            sp.mode = dc.oracle;
            sp.level_delta = cfg.decode.level_delta;
            sp.config_cap = dc.config_cap;
            let dec = efficient_split_decompose(&inst.walks, &g, &sp)?;
            let dfile = match decomposition {
                Some(p) => written(
                    &p,
                    &io::format_decomposition(&dec.terms, dec.k, dec.n, CutClass::Signed),
                )?,
                None => Value::Null,
            };
            let lfile = match log {
                Some(p) => {
                    let levels: Vec<(usize, &[dsum::regularity::LogEntry])> =
                        dec.levels.iter().map(|l| (l.level, l.log.as_slice())).collect();
                    written(&p, &io::format_level_log_csv(&levels))?
                }
                None => Value::Null,
            };
            let residual = if verify {
                Some(verify_split_residual(
                    &inst.walks,
                    &g,
                    &dec,
                    CutClass::Signed,
                    dsum::regularity::TENSOR_ENUM_CAP as u128,
                )?)
            } else {
                None
            };
            let mut inputs = inst.hashes.clone();
            inputs.insert("received".into(), io::content_hash(io::format_codeword(&y).as_bytes()));
            let failures = if dec.certified {
                vec![]
            } else {
                vec!["decomposition is uncertified".to_string()]
            };
            ctx.emit(&json!({
                "command": "regularity",
                "inputs": inputs,
                "decomposition": dec,
                "terms": dec.num_terms(),
                "coefficient_l1": dec.coefficient_l1(),
                "residual_max_correlation": residual,
                "decomposition_file": dfile,
                "log_file": lfile,
            }))?;
            ctx.check_strict(failures)
        }
        Command::ParamsSuggest { epsilon } => ctx.emit(&pipeline::params_suggest(epsilon)?),
        Command::Report { files, out } => {
            let csv = aggregate(&files)?;
            match out {
                Some(p) => io::write_text(&p, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Run => {
            let report = pipeline::run_experiment(&cfg, ctx.deterministic)?;
            ctx.emit(&report)?;
            ctx.check_strict(report.strict_failures.clone())
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(_) | Value::Null => {}
        Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

/// One row per report: every scalar field under a dotted path. Arrays are skipped.
fn aggregate(files: &[PathBuf]) -> Result<String, Error> {
    let mut rows = Vec::new();
    let mut columns = std::collections::BTreeSet::new();
    for f in files {
        let text = io::read_text(f)?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", f.display())))?;
        let mut row = BTreeMap::new();
        flatten("", &v, &mut row);
        columns.extend(row.keys().cloned());
        rows.push((f.display().to_string(), row));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["file".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header).map_err(|e| Error::Invalid(e.to_string()))?;
    for (file, row) in rows {
        let mut rec = vec![file];
        rec.extend(columns.iter().map(|c| row.get(c).cloned().unwrap_or_default()));
        w.write_record(&rec).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::NotFound(msg)) => {
            eprintln!("not found: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Strict(reasons)) => {
            for r in reasons {
                eprintln!("strict: {r}");
            }
            ExitCode::from(5)
        }
    }
}
