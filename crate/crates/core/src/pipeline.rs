//! Instances built from a config, and the reports the CLI prints.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{
    DecodeMode, ExperimentConfig, GraphKind, GraphSection, OracleMode, RoundingMode, WalkMode,
};
use crate::decoder::{
    self, list_decoding_premises, DecodeConfig, DecompositionSummary, ListResult, PremiseCheck,
    Rounding,
};
use crate::direct_sum::{self, LiftedCode, ParityMode};
use crate::error::{Error, Result};
use crate::gf2::{self, BaseCodeSpec, BitWord, LinearCode, DEFAULT_ENUM_CAP};
use crate::io;
use crate::regularity::{CutMode, EXACT_SIDE_LIMIT};
use crate::spectral::{
    self, normalized_adjacency, CayleyGraphSpec, RotationGraph, SWideProduct,
};
use crate::walks::{self, TupleCollection};

/// Everything a pipeline stage needs, with content hashes of each input.
pub struct Instance {
    pub base: LinearCode,
    /// ("G", outer or only graph) and, for s-wide walks, ("H", inner graph).
    pub graphs: Vec<(String, RotationGraph)>,
    pub product: Option<SWideProduct>,
    pub walks: TupleCollection,
    pub hashes: BTreeMap<String, String>,
}

impl Instance {
    pub fn lift(&self) -> Result<LiftedCode> {
        direct_sum::dsum_lift_code(&self.base, &self.walks, DEFAULT_ENUM_CAP)
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    io::content_hash(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

pub fn build_base_code(cfg: &ExperimentConfig) -> Result<LinearCode> {
    let b = &cfg.base;
    match &b.file {
        Some(f) => {
            let (rows, cols) = io::parse_matrix(&io::read_text(&cfg.resolve(f))?)?;
            LinearCode::new(rows, cols, DEFAULT_ENUM_CAP)
        }
        None => gf2::random_balanced_code(
            &BaseCodeSpec {
                epsilon0: b.epsilon0,
                dim: b.dim,
                blocklength: b.blocklength,
                multiplicity: b.multiplicity,
                seed: b.seed,
            },
            b.budget,
            DEFAULT_ENUM_CAP,
        ),
    }
}

pub fn build_graph(cfg: &ExperimentConfig, g: &GraphSection) -> Result<RotationGraph> {
    let need = |v: Option<usize>, key: &str| {
        v.ok_or_else(|| Error::Config(format!("graph {key} is required")))
    };
    match g.kind {
        GraphKind::Cycle => RotationGraph::cycle(need(g.n, "n")?),
        GraphKind::Complete => RotationGraph::complete_with_loops(need(g.n, "n")?),
        GraphKind::Random => RotationGraph::random_regular(
            need(g.n, "n")?,
            need(g.degree, "degree")?,
            g.seed,
            g.budget,
        ),
        GraphKind::Cayley => RotationGraph::cayley_f2(&CayleyGraphSpec::random(
            need(g.m, "m")?,
            need(g.degree, "degree")?,
            g.seed,
        )?),
        GraphKind::File | GraphKind::CayleyFile => {
            let f = g
                .file
                .as_ref()
                .ok_or_else(|| Error::Config("graph file is required".into()))?;
            let text = io::read_text(&cfg.resolve(f))?;
            if g.kind == GraphKind::File {
                io::parse_graph(&text)
            } else {
                RotationGraph::cayley_f2(&io::parse_cayley(&text)?)
            }
        }
    }
}

/// Graphs and the walk collection described by the config, without the base code.
pub fn build_walks(
    cfg: &ExperimentConfig,
    n_hint: usize,
) -> Result<(Vec<(String, RotationGraph)>, Option<SWideProduct>, TupleCollection)> {
    let w = &cfg.walks;
    if let Some(f) = &w.file {
        let walks = io::parse_walks(&io::read_text(&cfg.resolve(f))?)?;
        return Ok((Vec::new(), None, walks));
    }
    match w.mode {
        WalkMode::Complete => Ok((Vec::new(), None, walks::complete(n_hint, w.k, w.cap)?)),
        WalkMode::AllWalks => {
            let g = build_graph(cfg, &cfg.graph)?;
            let walks = walks::all_walks(&g, w.k, w.cap)?;
            Ok((vec![("G".into(), g)], None, walks))
        }
        WalkMode::SWide => {
            let g = build_graph(cfg, &cfg.graph)?;
            let hs = cfg
                .inner_graph
                .as_ref()
                .ok_or_else(|| Error::Config("missing [inner_graph]".into()))?;
            let h = build_graph(cfg, hs)?;
            let s = w.s.ok_or_else(|| Error::Config("walks.s is required".into()))?;
            let product = SWideProduct::new(g.clone(), h.clone(), s)?;
            let walks = walks::swide_walks(&product, w.k, w.tweaked, w.cap)?;
            Ok((
                vec![("G".into(), g), ("H".into(), h)],
                Some(product),
                walks,
            ))
        }
    }
}

pub fn build_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    cfg.validate()?;
    let base = build_base_code(cfg)?;
    let (graphs, product, walks) = build_walks(cfg, base.blocklength())?;
    if walks.ground_size() != base.blocklength() {
        return Err(Error::Config(format!(
            "walks live on {} vertices but the base code has blocklength {}",
            walks.ground_size(),
            base.blocklength()
        )));
    }
    let mut hashes = BTreeMap::new();
    hashes.insert("config".into(), config_hash(cfg));
    hashes.insert(
        "base_code".into(),
        io::content_hash(io::format_matrix(base.generator(), base.blocklength()).as_bytes()),
    );
    for (role, g) in &graphs {
        hashes.insert(
            format!("graph_{role}"),
            io::content_hash(io::format_graph(g).as_bytes()),
        );
    }
    hashes.insert(
        "walks".into(),
        io::content_hash(io::format_walks(&walks).as_bytes()),
    );
    Ok(Instance {
        base,
        graphs,
        product,
        walks,
        hashes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub role: String,
    pub n: usize,
    pub degree: usize,
    pub sigma2: f64,
    pub lambda2: f64,
    pub simple: bool,
}

pub fn graph_summary(role: &str, g: &RotationGraph) -> Result<GraphSummary> {
    let a = normalized_adjacency(g);
    Ok(GraphSummary {
        role: role.into(),
        n: g.n(),
        degree: g.degree(),
        sigma2: spectral::sigma2(&a)?,
        lambda2: spectral::second_eigenvalue(&a)?,
        simple: g.is_simple(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitSigma {
    pub a: usize,
    pub t: usize,
    pub b: usize,
    pub sigma2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkSummary {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    pub count: usize,
    pub regular: bool,
    pub tau: f64,
    pub splits: Vec<SplitSigma>,
}

pub fn walk_summary(w: &TupleCollection) -> Result<WalkSummary> {
    let splits: Vec<SplitSigma> = walks::split_sigmas(w)?
        .into_iter()
        .map(|((a, t, b), sigma2)| SplitSigma { a, t, b, sigma2 })
        .collect();
    Ok(WalkSummary {
        n: w.ground_size(),
        k: w.arity(),
        degree: w.step_degree(),
        count: w.len(),
        regular: w.is_regular(),
        tau: splits.iter().map(|s| s.sigma2).fold(0.0, f64::max),
        splits,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZigZagSummary {
    pub step: usize,
    pub sigma2: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParitySummary {
    pub eps0: f64,
    pub epsilon: f64,
    pub exhaustive: bool,
    pub tested: usize,
    pub eps0_pow_k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeSummary {
    pub blocklength: usize,
    pub dim: usize,
    pub rate: f64,
    pub bias: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub command: &'static str,
    pub inputs: BTreeMap<String, String>,
    pub base: CodeSummary,
    pub graphs: Vec<GraphSummary>,
    pub walks: WalkSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zigzag: Option<Vec<ZigZagSummary>>,
    pub parity_sampling: ParitySummary,
    pub lifted: CodeSummary,
    pub premises: Vec<PremiseCheck>,
    pub warnings: Vec<String>,
}

fn premise(name: &str, measured: f64, required: f64, holds: bool) -> PremiseCheck {
    PremiseCheck {
        name: name.into(),
        measured,
        required,
        holds,
    }
}

/// Parity-sampling samples used when exhaustive enumeration exceeds the cap.
const PARITY_SAMPLES: usize = 2000;

pub fn analyze(inst: &Instance, cfg: &ExperimentConfig) -> Result<AnalyzeReport> {
    let gamma0 = gf2::code_bias_bruteforce(&inst.base)?;
    let graphs = inst
        .graphs
        .iter()
        .map(|(r, g)| graph_summary(r, g))
        .collect::<Result<Vec<_>>>()?;
    let walks = walk_summary(&inst.walks)?;
    let k = inst.walks.arity();
    let mut premises = Vec::new();
    let zigzag = match &inst.product {
        Some(p) => {
            let s2g = graphs[0].sigma2;
            let s2h = graphs[1].sigma2;
            let bound = spectral::zigzag_bound(s2g, s2h);
            let z = (0..p.s)
                .map(|i| {
                    let sigma2 = spectral::sigma2(&p.zigzag_operator(i))?;
                    Ok(ZigZagSummary {
                        step: i,
                        sigma2,
                        bound,
                        slack: bound - sigma2,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            premises.push(premise(
                "eps0 + 2 sigma2(G) <= sigma2(H)^4",
                gamma0 + 2.0 * s2g,
                s2h.powi(4),
                gamma0 + 2.0 * s2g <= s2h.powi(4) + 1e-12,
            ));
            Some(z)
        }
        None => None,
    };
    let n = inst.base.blocklength();
    let mode = if n < 63 && (1u64 << n) <= DEFAULT_ENUM_CAP {
        ParityMode::Exhaustive {
            cap: DEFAULT_ENUM_CAP,
        }
    } else {
        ParityMode::Sampled {
            trials: PARITY_SAMPLES,
            seed: 0,
        }
    };
    let exhaustive = matches!(mode, ParityMode::Exhaustive { .. });
    let ps = direct_sum::measured_parity_sampling(&inst.walks, gamma0, mode)?;
    let lifted = inst.lift()?;
    let lifted_bias = direct_sum::lifted_code_bias(&lifted)?;
    let beta = cfg.decode.beta.unwrap_or(0.25);
    premises.extend(list_decoding_premises(beta, lifted_bias, walks.tau, k, gamma0));
    premises.push(premise(
        "walk collection is regular",
        walks.regular as u8 as f64,
        1.0,
        walks.regular,
    ));
    let mut warnings: Vec<String> = premises
        .iter()
        .filter(|p| !p.holds)
        .map(|p| format!("premise fails: {}", p.name))
        .collect();
    if n > EXACT_SIDE_LIMIT {
        warnings.push(format!(
            "blocklength {n} exceeds {EXACT_SIDE_LIMIT}: decoding uses the heuristic oracle and is uncertified"
        ));
    }
    Ok(AnalyzeReport {
        command: "analyze",
        inputs: inst.hashes.clone(),
        base: CodeSummary {
            blocklength: n,
            dim: inst.base.dim(),
            rate: inst.base.rate(),
            bias: gamma0,
        },
        graphs,
        walks,
        zigzag,
        parity_sampling: ParitySummary {
            eps0: gamma0,
            epsilon: ps.epsilon,
            exhaustive,
            tested: ps.tested,
            eps0_pow_k: gamma0.powi(k as i32),
        },
        lifted: CodeSummary {
            blocklength: lifted.blocklength(),
            dim: lifted.dim(),
            rate: lifted.rate(),
            bias: lifted_bias,
        },
        premises,
        warnings,
    })
}

/// Flips ⌊rate·N⌋ distinct positions chosen by the seeded stream.
pub fn corrupt_word(y: &BitWord, rate: f64, seed: u64, stream: u64) -> BitWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = y.clone();
    let count = ((rate * y.len() as f64) + 1e-9).floor() as usize;
    for i in sample(&mut rng, y.len(), count.min(y.len())) {
        out.flip(i);
    }
    out
}

/// Replaces ⌊rate·N⌋ symbols by a different symbol of the same width.
pub fn corrupt_symbols(y: &[u32], k: usize, rate: f64, seed: u64, stream: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = y.to_vec();
    let count = ((rate * y.len() as f64) + 1e-9).floor() as usize;
    let q = 1u32 << k;
    for i in sample(&mut rng, y.len(), count.min(y.len())) {
        out[i] ^= rng.gen_range(1..q);
    }
    out
}

pub fn apply_flips(y: &BitWord, positions: &[usize]) -> Result<BitWord> {
    let mut out = y.clone();
    for &p in positions {
        if p >= y.len() {
            return Err(Error::Invalid(format!(
                "flip position {p} outside word of length {}",
                y.len()
            )));
        }
        out.flip(p);
    }
    Ok(out)
}

pub fn decode_config(cfg: &ExperimentConfig) -> DecodeConfig {
    let d = &cfg.decode;
    let mut dc = DecodeConfig::new(match d.mode {
        DecodeMode::Unique => 0.25,
        _ => d.beta.unwrap_or(0.25),
    });
    dc.delta = d.delta;
    dc.level_delta = d.level_delta;
    dc.eta = d.eta;
    dc.rounding = match d.rounding {
        RoundingMode::Threshold => Rounding::Threshold,
        RoundingMode::Sampled => Rounding::Sampled {
            trials: d.trials,
            seed: d.seed,
        },
    };
    dc.oracle = match d.oracle {
        OracleMode::Exact => CutMode::Exact,
        OracleMode::Alternating => CutMode::Alternating {
            restarts: d.restarts,
            seed: d.oracle_seed,
        },
        OracleMode::Auto => CutMode::Auto {
            restarts: d.restarts,
            seed: d.oracle_seed,
        },
    };
    dc.rounding_cap = d.rounding_cap as u128;
    dc.config_cap = d.config_cap as u128;
    dc
}

#[derive(Clone, Debug, Serialize)]
pub struct DecodeParameters {
    pub mode: DecodeMode,
    pub beta: f64,
    pub radius: f64,
    pub eta: f64,
    pub delta: f64,
    pub tau: f64,
    pub eps0: f64,
    pub lifted_bias: f64,
    pub k: usize,
    pub n: usize,
    pub blocklength: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub message: BitWord,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecodeReport {
    pub command: &'static str,
    pub inputs: BTreeMap<String, String>,
    pub parameters: DecodeParameters,
    /// Unique mode: the nearest list entry, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoded: Option<BitWord>,
    pub found: bool,
    pub certified: bool,
    pub list: Vec<ReportEntry>,
    pub atoms: Vec<usize>,
    pub roundings_tried: usize,
    pub decompositions: Vec<DecompositionSummary>,
    pub premises: Vec<PremiseCheck>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl DecodeReport {
    /// Reasons a strict run fails: uncertified decompositions or failed premises.
    pub fn strict_failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .premises
            .iter()
            .filter(|p| !p.holds)
            .map(|p| format!("premise fails: {}", p.name))
            .collect();
        if !self.certified {
            out.push("decomposition is uncertified".into());
        }
        out
    }
}

/// Measured quantities shared by every decode on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceMeasures {
    pub tau: f64,
    pub eps0: f64,
    pub lifted_bias: f64,
}

pub fn measure(inst: &Instance, lifted: &LiftedCode) -> Result<InstanceMeasures> {
    Ok(InstanceMeasures {
        tau: walks::splittability_tau(&inst.walks)?,
        eps0: gf2::code_bias_bruteforce(&inst.base)?,
        lifted_bias: direct_sum::lifted_code_bias(lifted)?,
    })
}

/// The received word: binary for the direct-sum modes, symbols for direct product.
pub enum Received {
    Bits(BitWord),
    Symbols(Vec<u32>),
}

impl Received {
    pub fn hash(&self) -> String {
        match self {
            Received::Bits(w) => io::content_hash(io::format_codeword(w).as_bytes()),
            Received::Symbols(s) => io::content_hash(io::format_symbols(s).as_bytes()),
        }
    }
}

pub fn decode_received(
    inst: &Instance,
    lifted: &LiftedCode,
    measures: &InstanceMeasures,
    cfg: &ExperimentConfig,
    received: &Received,
    deterministic: bool,
) -> Result<DecodeReport> {
    let dc = decode_config(cfg);
    let start = Instant::now();
    let mode = cfg.decode.mode;
    let (decoded, result): (Option<BitWord>, ListResult) = match (mode, received) {
        (DecodeMode::Unique, Received::Bits(y)) => decoder::unique_decode(y, lifted, &dc)?,
        (DecodeMode::List, Received::Bits(y)) => (None, decoder::list_decode(y, lifted, &dc)?),
        (DecodeMode::DirectProduct, Received::Symbols(y)) => {
            (None, decoder::list_decode_direct_product(y, lifted, &dc)?)
        }
        _ => {
            return Err(Error::Config(
                "direct-product decoding takes a symbol word; the other modes take bits".into(),
            ))
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let k = inst.walks.arity();
    let mut premises = list_decoding_premises(dc.beta, measures.lifted_bias, measures.tau, k, measures.eps0);
    if mode == DecodeMode::DirectProduct {
        premises.clear();
    }
    let mut warnings = result.warnings.clone();
    warnings.extend(
        premises
            .iter()
            .filter(|p| !p.holds)
            .map(|p| format!("premise fails: {}", p.name)),
    );
    let mut inputs = inst.hashes.clone();
    inputs.insert("received".into(), received.hash());
    let found = match mode {
        DecodeMode::Unique => decoded.is_some(),
        _ => !result.entries.is_empty(),
    };
    Ok(DecodeReport {
        command: match mode {
            DecodeMode::Unique => "decode",
            _ => "list-decode",
        },
        inputs,
        parameters: DecodeParameters {
            mode,
            beta: dc.beta,
            radius: result.radius,
            eta: result.eta,
            delta: result.delta,
            tau: measures.tau,
            eps0: measures.eps0,
            lifted_bias: measures.lifted_bias,
            k,
            n: inst.base.blocklength(),
            blocklength: lifted.blocklength(),
        },
        decoded,
        found,
        certified: result.certified,
        list: result
            .entries
            .iter()
            .map(|e| ReportEntry {
                message: e.message.clone(),
                distance: e.distance,
            })
            .collect(),
        atoms: result.atoms,
        roundings_tried: result.roundings_tried,
        decompositions: result.decompositions,
        premises,
        warnings,
        timing_ms: (!deterministic).then_some(elapsed),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub message: BitWord,
    pub errors: usize,
    pub success: bool,
    pub matches_bruteforce: bool,
    pub certified: bool,
    pub list_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoded: Option<BitWord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub trials: usize,
    pub successes: usize,
    pub bruteforce_agreement: usize,
    pub certified_runs: usize,
    pub certified_successes: usize,
    pub success_rate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub inputs: BTreeMap<String, String>,
    pub config: ExperimentConfig,
    pub measures: InstanceMeasures,
    pub corruption_rate: f64,
    pub premises: Vec<PremiseCheck>,
    pub trials: Vec<TrialRecord>,
    pub summary: RunSummary,
    pub warnings: Vec<String>,
    pub strict_failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// Default corruption rate: just inside the decoding radius of the mode.
pub fn default_rate(cfg: &ExperimentConfig, lifted_bias: f64) -> f64 {
    let beta = cfg.decode.beta.unwrap_or(0.25);
    match cfg.decode.mode {
        DecodeMode::Unique => ((1.0 - lifted_bias) / 4.0 - 0.02).max(0.0),
        DecodeMode::List => (0.5 - beta - 0.02).max(0.0),
        DecodeMode::DirectProduct => (1.0 - beta - 0.05).max(0.0),
    }
}

/// Plants random messages, corrupts their encodings and decodes them.
pub fn run_experiment(cfg: &ExperimentConfig, deterministic: bool) -> Result<RunReport> {
    let start = Instant::now();
    let inst = build_instance(cfg)?;
    let lifted = inst.lift()?;
    let measures = measure(&inst, &lifted)?;
    let rate = cfg
        .corrupt
        .rate
        .unwrap_or_else(|| default_rate(cfg, measures.lifted_bias));
    let k = inst.walks.arity();
    let mut trials = Vec::with_capacity(cfg.run.trials);
    let mut premises = Vec::new();
    let mut warnings = Vec::new();
    for t in 0..cfg.run.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
        rng.set_stream(t as u64);
        let message = BitWord::random(inst.base.dim(), &mut rng);
        let (received, errors) = match cfg.decode.mode {
            DecodeMode::DirectProduct => {
                let z = inst.base.encode(&message)?;
                let clean = decoder::dprod_lift_word(&z, &inst.walks)?;
                let y = corrupt_symbols(&clean, k, rate, cfg.corrupt.seed, t as u64);
                let errors = y.iter().zip(&clean).filter(|(a, b)| a != b).count();
                (Received::Symbols(y), errors)
            }
            _ => {
                let clean = lifted.encode(&message)?;
                let y = corrupt_word(&clean, rate, cfg.corrupt.seed, t as u64);
                let errors = y.hamming(&clean);
                (Received::Bits(y), errors)
            }
        };
        let report = decode_received(&inst, &lifted, &measures, cfg, &received, true)?;
        if t == 0 {
            premises = report.premises.clone();
        }
        for w in &report.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        let listed: Vec<BitWord> = report.list.iter().map(|e| e.message.clone()).collect();
        let (success, matches_bruteforce) = match &received {
            Received::Bits(y) => match cfg.decode.mode {
                DecodeMode::Unique => {
                    let (bf, _) = decoder::nearest_codeword_bruteforce(y, &lifted)?;
                    (
                        report.decoded.as_ref() == Some(&message),
                        report.decoded.as_ref() == Some(&bf),
                    )
                }
                _ => {
                    let mut bf = gf2::list_messages_at_radius(&lifted.code, y, report.parameters.radius)?;
                    bf.sort();
                    (listed.contains(&message), listed == bf)
                }
            },
            Received::Symbols(y) => {
                let mut bf = Vec::new();
                for idx in 0..(1u64 << inst.base.dim()) {
                    let m = inst.base.message(idx);
                    let z = inst.base.encode(&m)?;
                    let d = decoder::symbol_distance(y, &decoder::dprod_lift_word(&z, &inst.walks)?)?;
                    if d <= report.parameters.radius + gf2::TOL {
                        bf.push(m);
                    }
                }
                bf.sort();
                (listed.contains(&message), listed == bf)
            }
        };
        trials.push(TrialRecord {
            trial: t,
            message,
            errors,
            success,
            matches_bruteforce,
            certified: report.certified,
            list_size: report.list.len(),
            decoded: report.decoded,
        });
    }
    let successes = trials.iter().filter(|r| r.success).count();
    let certified_runs = trials.iter().filter(|r| r.certified).count();
    let summary = RunSummary {
        trials: trials.len(),
        successes,
        bruteforce_agreement: trials.iter().filter(|r| r.matches_bruteforce).count(),
        certified_runs,
        certified_successes: trials.iter().filter(|r| r.certified && r.success).count(),
        success_rate: if trials.is_empty() {
            0.0
        } else {
            successes as f64 / trials.len() as f64
        },
    };
    let mut strict_failures: Vec<String> = premises
        .iter()
        .filter(|p| !p.holds)
        .map(|p| format!("premise fails: {}", p.name))
        .collect();
    if certified_runs < trials.len() {
        strict_failures.push(format!(
            "{} of {} runs are uncertified",
            trials.len() - certified_runs,
            trials.len()
        ));
    }
    Ok(RunReport {
        command: "run",
        inputs: inst.hashes.clone(),
        config: cfg.clone(),
        measures,
        corruption_rate: rate,
        premises,
        trials,
        summary,
        warnings,
        strict_failures,
        timing_ms: (!deterministic).then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// The explicit-construction parameter schedule for a target bias. Sizes are reported as
/// base-2 logarithms because they overflow any machine integer.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsSuggestion {
    pub epsilon: f64,
    pub alpha: f64,
    pub s: u64,
    /// α⁵/(4 log₂(1/α)) ≥ 1/log₂(1/ε) for the chosen α.
    pub alpha_condition_holds: bool,
    pub log2_d2: f64,
    pub log2_d1: f64,
    pub b2: f64,
    pub log2_lambda2: f64,
    pub log2_eps0: f64,
    pub log2_multiplicity: f64,
    pub log2_inner_vertices: f64,
    pub k: u64,
    pub binding: bool,
    pub note: &'static str,
}

pub fn params_suggest(epsilon: f64) -> Result<ParamsSuggestion> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let log_inv_eps = -epsilon.log2();
    let holds = |s: f64| (1.0 / s).powi(5) / (4.0 * s.log2()) >= 1.0 / log_inv_eps;
    // Smaller α only shrinks the left side, so α = 1/128 is the only candidate.
    let s = 128.0f64;
    let ok = holds(s);
    let alpha = 1.0 / s;
    let log2_d2 = 4.0 * s * s.log2();
    let b2 = 4.0 * s * log2_d2;
    let log2_lambda2 = b2.log2() - log2_d2 / 2.0;
    let log2_d1 = 4.0 * log2_d2;
    // k − 1 is the least integer with (λ₂²)^{(1−5α)(1−α)(k−1)} ≤ ε.
    let per_step = (1.0 - 5.0 * alpha) * (1.0 - alpha) * (-2.0 * log2_lambda2);
    let k = 1 + (log_inv_eps / per_step).ceil().max(1.0) as u64;
    Ok(ParamsSuggestion {
        epsilon,
        alpha,
        s: s as u64,
        alpha_condition_holds: ok,
        log2_d2,
        log2_d1,
        b2,
        log2_lambda2,
        log2_eps0: -2.0 * log2_d2,
        log2_multiplicity: s * log2_d1,
        log2_inner_vertices: s * log2_d1,
        k,
        binding: false,
        note: "reference schedule of the explicit construction; not used by any other command",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_at_small_epsilon() {
        let p = params_suggest(1e-4).unwrap();
        assert_eq!(p.s, 128);
        assert!(!p.alpha_condition_holds);
        assert!(!p.binding);
        // d₂ = s^{4s}.
        assert_eq!(p.log2_d2, 4.0 * 128.0 * 7.0);
        assert_eq!(p.log2_d1, 4.0 * p.log2_d2);
        assert!(p.k >= 2);
        assert!(params_suggest(0.7).is_err());
    }

    #[test]
    fn corruption_flips_exactly() {
        let y = BitWord::zeros(100);
        let c = corrupt_word(&y, 0.25, 3, 0);
        assert_eq!(c.weight(), 25);
        assert_eq!(c, corrupt_word(&y, 0.25, 3, 0));
        assert_ne!(c, corrupt_word(&y, 0.25, 3, 1));
        let s = corrupt_symbols(&[0; 40], 3, 0.5, 1, 0);
        assert_eq!(s.iter().filter(|&&v| v != 0).count(), 20);
        assert!(s.iter().all(|&v| v < 8));
    }
}
