//! Experiment configuration: sectioned `key = value` text (TOML syntax).
//!
//! ```text
//! [base]
//! epsilon0 = 0.5
//! dim = 4
//! blocklength = 32
//! seed = 1
//!
//! [graph]
//! kind = "cayley"      # cycle | complete | cayley | random | file | cayley-file
//! m = 5
//! degree = 16
//! seed = 0
//!
//! [walks]
//! mode = "all-walks"   # all-walks | s-wide | complete
//! k = 3
//!
//! [decode]
//! mode = "unique"      # unique | list | direct-product
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaseSection {
    pub epsilon0: f64,
    pub dim: usize,
    pub blocklength: usize,
    pub multiplicity: usize,
    pub seed: u64,
    /// Sampling attempts for the random balanced code.
    pub budget: usize,
    /// Generator matrix file; overrides the random construction.
    pub file: Option<String>,
}

impl Default for BaseSection {
    fn default() -> Self {
        BaseSection {
            epsilon0: 0.5,
            dim: 4,
            blocklength: 32,
            multiplicity: 1,
            seed: 1,
            budget: 100_000,
            file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Cycle,
    Complete,
    Cayley,
    Random,
    File,
    CayleyFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphSection {
    pub kind: GraphKind,
    /// Vertex count for cycle, complete and random graphs.
    pub n: Option<usize>,
    /// Group dimension for Cayley graphs on F₂^m.
    pub m: Option<usize>,
    pub degree: Option<usize>,
    pub seed: u64,
    pub budget: usize,
    pub file: Option<String>,
}

impl Default for GraphSection {
    fn default() -> Self {
        GraphSection {
            kind: GraphKind::Cayley,
            n: None,
            m: Some(5),
            degree: Some(16),
            seed: 0,
            budget: 10_000,
            file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkMode {
    AllWalks,
    SWide,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkSection {
    pub mode: WalkMode,
    pub k: usize,
    /// Width of the s-wide product.
    pub s: Option<usize>,
    pub tweaked: bool,
    pub cap: usize,
    /// Walk collection file; overrides generation.
    pub file: Option<String>,
}

impl Default for WalkSection {
    fn default() -> Self {
        WalkSection {
            mode: WalkMode::AllWalks,
            k: 3,
            s: None,
            tweaked: true,
            cap: crate::walks::DEFAULT_TUPLE_CAP,
            file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeMode {
    Unique,
    List,
    DirectProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMode {
    Threshold,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    Auto,
    Exact,
    Alternating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecodeSection {
    pub mode: DecodeMode,
    /// Required for list modes; unique mode uses 1/4.
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub level_delta: Option<f64>,
    pub eta: Option<f64>,
    pub rounding: RoundingMode,
    pub trials: usize,
    pub seed: u64,
    pub oracle: OracleMode,
    pub restarts: usize,
    pub oracle_seed: u64,
    pub rounding_cap: u64,
    pub config_cap: u64,
}

impl Default for DecodeSection {
    fn default() -> Self {
        DecodeSection {
            mode: DecodeMode::Unique,
            beta: None,
            delta: None,
            level_delta: None,
            eta: None,
            rounding: RoundingMode::Threshold,
            trials: 4,
            seed: 0,
            oracle: OracleMode::Auto,
            restarts: 8,
            oracle_seed: 0,
            rounding_cap: crate::decoder::DEFAULT_ROUNDING_CAP as u64,
            config_cap: crate::regularity::DEFAULT_CONFIG_CAP as u64,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorruptSection {
    /// Fraction of positions flipped (floor(rate·N) distinct positions).
    pub rate: Option<f64>,
    pub seed: u64,
    /// Explicit flip positions, whitespace separated.
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub trials: usize,
    /// Seed for planted messages.
    pub seed: u64,
    pub strict: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            trials: 10,
            seed: 0,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub report: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub base: BaseSection,
    pub graph: GraphSection,
    /// Inner graph H of an s-wide product.
    pub inner_graph: Option<GraphSection>,
    pub walks: WalkSection,
    pub decode: DecodeSection,
    pub corrupt: CorruptSection,
    pub run: RunSection,
    pub output: OutputSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Parses a TOML value, falling back to a bare string.
fn override_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl ExperimentConfig {
    /// Parses config text and applies `section.key=value` overrides in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for o in overrides {
            let (path, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {o:?} is not key=value")))?;
            let keys: Vec<&str> = path.trim().split('.').collect();
            let (last, sections) = keys.split_last().expect("split yields one item");
            let mut cur = &mut table;
            for s in sections {
                cur = cur
                    .entry(s.to_string())
                    .or_insert_with(|| toml::Value::Table(Default::default()))
                    .as_table_mut()
                    .ok_or_else(|| Error::Config(format!("{s} is not a section")))?;
            }
            cur.insert(last.to_string(), override_value(raw));
        }
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, overrides)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, file: &str) -> PathBuf {
        self.base_dir.join(file)
    }

    fn check_file(&self, file: &Option<String>, what: &str) -> Result<()> {
        if let Some(f) = file {
            if !self.resolve(f).is_file() {
                return Err(Error::Config(format!("{what} file {f:?} does not exist")));
            }
        }
        Ok(())
    }

    fn check_graph(&self, g: &GraphSection, what: &str) -> Result<()> {
        let need = |v: Option<usize>, key: &str| {
            v.map(|_| ())
                .ok_or_else(|| Error::Config(format!("{what}.{key} is required for kind {:?}", g.kind)))
        };
        match g.kind {
            GraphKind::Cycle | GraphKind::Complete => need(g.n, "n")?,
            GraphKind::Random => {
                need(g.n, "n")?;
                need(g.degree, "degree")?;
            }
            GraphKind::Cayley => {
                need(g.m, "m")?;
                need(g.degree, "degree")?;
            }
            GraphKind::File | GraphKind::CayleyFile => {
                if g.file.is_none() {
                    return Err(Error::Config(format!("{what}.file is required for kind {:?}", g.kind)));
                }
            }
        }
        self.check_file(&g.file, what)
    }

    /// Ranges and referenced files.
    pub fn validate(&self) -> Result<()> {
        let b = &self.base;
        if b.file.is_none() {
            crate::gf2::BaseCodeSpec {
                epsilon0: b.epsilon0,
                dim: b.dim,
                blocklength: b.blocklength,
                multiplicity: b.multiplicity,
                seed: b.seed,
            }
            .validate()
            .map_err(|e| Error::Config(format!("base: {e}")))?;
        }
        self.check_file(&b.file, "base")?;
        if self.walks.file.is_none() && self.walks.mode != WalkMode::Complete {
            self.check_graph(&self.graph, "graph")?;
        }
        self.check_file(&self.walks.file, "walks")?;
        if self.walks.k == 0 {
            return Err(Error::Config("walks.k must be positive".into()));
        }
        if self.walks.mode == WalkMode::SWide && self.walks.file.is_none() {
            match &self.inner_graph {
                Some(h) => self.check_graph(h, "inner_graph")?,
                None => return Err(Error::Config("s-wide walks need an [inner_graph] section".into())),
            }
            if self.walks.s.unwrap_or(0) == 0 {
                return Err(Error::Config("s-wide walks need walks.s ≥ 1".into()));
            }
        }
        let d = &self.decode;
        let beta_max = if d.mode == DecodeMode::DirectProduct { 1.0 } else { 0.5 };
        if let Some(beta) = d.beta {
            if !(beta > 0.0 && beta < beta_max) {
                return Err(Error::Config(format!("decode.beta must lie in (0, {beta_max})")));
            }
        } else if d.mode != DecodeMode::Unique {
            return Err(Error::Config("decode.beta is required for list decoding".into()));
        }
        if d.rounding == RoundingMode::Sampled && d.trials == 0 {
            return Err(Error::Config("decode.trials must be positive".into()));
        }
        if let Some(r) = self.corrupt.rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config("corrupt.rate must lie in [0, 1]".into()));
            }
        }
        self.check_file(&self.corrupt.file, "corrupt")?;
        Ok(())
    }
}
