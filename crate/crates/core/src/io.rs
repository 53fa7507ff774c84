//! Line-oriented text formats and content hashes.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::regularity::{CutClass, LogEntry, TensorCutFunction};
use crate::spectral::{CayleyGraphSpec, RotationGraph};
use crate::walks::TupleCollection;

/// Hex SHA-256 of a byte string.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String> {
    Ok(content_hash(&std::fs::read(path)?))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Nonempty lines that are not `#` comments, trimmed, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields<T: std::str::FromStr>(line: &str, lineno: usize, want: usize) -> Result<Vec<T>> {
    let out: Vec<T> = line
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad number {t:?}")))
        })
        .collect::<Result<_>>()?;
    if want > 0 && out.len() != want {
        return Err(Error::Parse(format!(
            "line {lineno}: expected {want} fields, got {}",
            out.len()
        )));
    }
    Ok(out)
}

fn header<'a, T: std::str::FromStr>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    want: usize,
    what: &str,
) -> Result<Vec<T>> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("missing {what} header")))?;
    parse_fields(line, no, want)
}

/// "rows cols" then one row of space-separated 0/1 per line.
pub fn format_matrix(rows: &[BitWord], cols: usize) -> String {
    let mut s = format!("{} {cols}\n", rows.len());
    for r in rows {
        let bits: Vec<&str> = (0..cols)
            .map(|i| if r.get(i) { "1" } else { "0" })
            .collect();
        s.push_str(&bits.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<(Vec<BitWord>, usize)> {
    let mut lines = content_lines(text);
    let h: Vec<usize> = header(&mut lines, 2, "matrix")?;
    let (nrows, cols) = (h[0], h[1]);
    let mut rows = Vec::with_capacity(nrows);
    for (no, line) in lines {
        let bits: Vec<u8> = parse_fields(line, no, cols)?;
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse(format!("line {no}: entries must be 0 or 1")));
        }
        rows.push(BitWord::from_bits(&bits));
    }
    if rows.len() != nrows {
        return Err(Error::Parse(format!(
            "expected {nrows} rows, got {}",
            rows.len()
        )));
    }
    Ok((rows, cols))
}

/// One line of 0/1 characters.
pub fn format_codeword(w: &BitWord) -> String {
    format!("{w}\n")
}

pub fn parse_codeword(text: &str) -> Result<BitWord> {
    let mut lines = content_lines(text);
    let (_, line) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty codeword file".into()))?;
    if lines.next().is_some() {
        return Err(Error::Parse("codeword file has more than one line".into()));
    }
    line.parse()
}

/// "n d" then n·d lines "v j v' j'" with rot(v, j) = (v', j').
pub fn format_graph(g: &RotationGraph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.degree());
    for v in 0..g.n() {
        for j in 0..g.degree() {
            let (u, i) = g.rot(v, j);
            writeln!(s, "{v} {j} {u} {i}").unwrap();
        }
    }
    s
}

pub fn parse_graph(text: &str) -> Result<RotationGraph> {
    let mut lines = content_lines(text);
    let h: Vec<usize> = header(&mut lines, 2, "graph")?;
    let (n, d) = (h[0], h[1]);
    let mut rot = vec![None; n * d];
    for (no, line) in lines {
        let f: Vec<usize> = parse_fields(line, no, 4)?;
        if f[0] >= n || f[1] >= d {
            return Err(Error::Parse(format!("line {no}: port ({}, {}) out of range", f[0], f[1])));
        }
        let slot = &mut rot[f[0] * d + f[1]];
        if slot.is_some() {
            return Err(Error::Parse(format!("line {no}: port ({}, {}) listed twice", f[0], f[1])));
        }
        *slot = Some((f[2], f[3]));
    }
    let rot = rot
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::Parse(format!("port ({}, {}) missing", i / d, i % d))))
        .collect::<Result<Vec<_>>>()?;
    RotationGraph::new(n, d, rot)
}

/// "m" then one generator per line as an m-bit string, most significant bit first.
pub fn format_cayley(spec: &CayleyGraphSpec) -> String {
    let mut s = format!("{}\n", spec.m);
    for &a in &spec.generators {
        writeln!(s, "{a:0width$b}", width = spec.m).unwrap();
    }
    s
}

pub fn parse_cayley(text: &str) -> Result<CayleyGraphSpec> {
    let mut lines = content_lines(text);
    let m: usize = header(&mut lines, 1, "Cayley")?[0];
    let gens: Vec<&str> = lines.map(|(_, l)| l).collect();
    if let Some(g) = gens.iter().find(|g| g.len() != m) {
        return Err(Error::Parse(format!("generator {g:?} is not {m} bits long")));
    }
    CayleyGraphSpec::from_bitstrings(m, &gens)
}

/// "n k d count" then one tuple per line.
pub fn format_walks(w: &TupleCollection) -> String {
    let mut s = format!(
        "{} {} {} {}\n",
        w.ground_size(),
        w.arity(),
        w.step_degree(),
        w.len()
    );
    for t in w.iter() {
        let parts: Vec<String> = t.iter().map(u32::to_string).collect();
        s.push_str(&parts.join(" "));
        s.push('\n');
    }
    s
}

/// Parses a walk file. Regularity is not required here; callers check it when they need it.
pub fn parse_walks(text: &str) -> Result<TupleCollection> {
    let mut lines = content_lines(text);
    let h: Vec<usize> = header(&mut lines, 4, "walk")?;
    let (n, k, d, count) = (h[0], h[1], h[2], h[3]);
    let mut flat = Vec::with_capacity(count * k);
    let mut rows = 0;
    for (no, line) in lines {
        flat.extend(parse_fields::<u32>(line, no, k)?);
        rows += 1;
    }
    if rows != count {
        return Err(Error::Parse(format!("expected {count} tuples, got {rows}")));
    }
    TupleCollection::unchecked(n, k, d, flat)
}

/// Metadata for an s-wide collection: sizes plus the outer and inner graph files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SWideSidecar {
    pub n_outer: usize,
    pub d1: usize,
    pub d2: usize,
    pub s: usize,
    pub outer_graph: String,
    pub inner_graph: String,
}

/// "n' d1 d2 s", then "G <path>" and "H <path>".
pub fn format_sidecar(m: &SWideSidecar) -> String {
    format!(
        "{} {} {} {}\nG {}\nH {}\n",
        m.n_outer, m.d1, m.d2, m.s, m.outer_graph, m.inner_graph
    )
}

pub fn parse_sidecar(text: &str) -> Result<SWideSidecar> {
    let mut lines = content_lines(text);
    let h: Vec<usize> = header(&mut lines, 4, "s-wide")?;
    let (mut g, mut hh) = (None, None);
    for (no, line) in lines {
        match line.split_once(char::is_whitespace) {
            Some(("G", p)) => g = Some(p.trim().to_string()),
            Some(("H", p)) => hh = Some(p.trim().to_string()),
            _ => return Err(Error::Parse(format!("line {no}: expected `G <path>` or `H <path>`"))),
        }
    }
    Ok(SWideSidecar {
        n_outer: h[0],
        d1: h[1],
        d2: h[2],
        s: h[3],
        outer_graph: g.ok_or_else(|| Error::Parse("missing G line".into()))?,
        inner_graph: hh.ok_or_else(|| Error::Parse("missing H line".into()))?,
    })
}

/// Ties named files together by content hash.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    /// (role, path, sha256), in insertion order.
    pub entries: Vec<(String, String, String)>,
}

impl Manifest {
    pub fn add_file(&mut self, role: &str, path: &Path) -> Result<()> {
        let hash = hash_file(path)?;
        self.entries
            .push((role.to_string(), path.display().to_string(), hash));
        Ok(())
    }

    /// Lines "role path sha256".
    pub fn format(&self) -> String {
        self.entries
            .iter()
            .map(|(r, p, h)| format!("{r} {p} {h}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let entries = content_lines(text)
            .map(|(no, line)| {
                let f: Vec<&str> = line.split_whitespace().collect();
                match f.as_slice() {
                    [r, p, h] if h.len() == 64 => Ok((r.to_string(), p.to_string(), h.to_string())),
                    _ => Err(Error::Parse(format!("line {no}: expected `role path sha256`"))),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Manifest { entries })
    }

    /// Paths are resolved relative to `base`. Returns the roles whose content changed.
    pub fn verify(&self, base: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for (role, path, hash) in &self.entries {
            if &hash_file(&base.join(path))? != hash {
                bad.push(role.clone());
            }
        }
        Ok(bad)
    }
}

fn factor_bits(f: &[i8], class: CutClass) -> String {
    f.iter()
        .map(|&v| match (class, v) {
            (CutClass::Signed, -1) | (CutClass::Boolean, 1) => '1',
            _ => '0',
        })
        .collect()
}

/// "p k n class" then per term "c; bits; …; bits". Signed factors store bit 1 for −1;
/// the global sign is folded into c.
pub fn format_decomposition(
    terms: &[(f64, TensorCutFunction)],
    k: usize,
    n: usize,
    class: CutClass,
) -> String {
    let mut s = format!("{} {k} {n} {}\n", terms.len(), class.name());
    for (c, f) in terms {
        s.push_str(&format!("{:?}", c * f.sign as f64));
        for fac in &f.factors {
            s.push_str("; ");
            s.push_str(&factor_bits(fac, class));
        }
        s.push('\n');
    }
    s
}

pub fn parse_decomposition(text: &str) -> Result<(Vec<(f64, TensorCutFunction)>, usize, usize, CutClass)> {
    let mut lines = content_lines(text);
    let (no, head) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing decomposition header".into()))?;
    let f: Vec<&str> = head.split_whitespace().collect();
    if f.len() != 4 {
        return Err(Error::Parse(format!("line {no}: expected `p k n class`")));
    }
    let nums: Vec<usize> = parse_fields(&f[..3].join(" "), no, 3)?;
    let (p, k, n) = (nums[0], nums[1], nums[2]);
    let class = match f[3] {
        "cutpm" => CutClass::Signed,
        "cut01" => CutClass::Boolean,
        other => return Err(Error::Parse(format!("unknown class {other:?}"))),
    };
    let mut terms = Vec::with_capacity(p);
    for (no, line) in lines {
        let parts: Vec<&str> = line.split(';').map(str::trim).collect();
        if parts.len() != k + 1 {
            return Err(Error::Parse(format!("line {no}: expected {} fields", k + 1)));
        }
        let c: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {no}: bad coefficient {:?}", parts[0])))?;
        let factors = parts[1..]
            .iter()
            .map(|b| {
                let w: BitWord = b.parse()?;
                if w.len() != n {
                    return Err(Error::Parse(format!("line {no}: factor is not {n} bits")));
                }
                Ok(match class {
                    CutClass::Signed => w.signs_i8(),
                    CutClass::Boolean => w.bits().into_iter().map(|b| b as i8).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push((c, TensorCutFunction::new(1, factors, class)?));
    }
    if terms.len() != p {
        return Err(Error::Parse(format!("expected {p} terms, got {}", terms.len())));
    }
    Ok((terms, k, n, class))
}

/// Direct-product symbols: one line of space-separated integers.
pub fn format_symbols(y: &[u32]) -> String {
    let parts: Vec<String> = y.iter().map(u32::to_string).collect();
    format!("{}\n", parts.join(" "))
}

pub fn parse_symbols(text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (no, line) in content_lines(text) {
        out.extend(parse_fields::<u32>(line, no, 0)?);
    }
    Ok(out)
}

/// Flip positions, whitespace separated.
pub fn parse_positions(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (no, line) in content_lines(text) {
        out.extend(parse_fields::<usize>(line, no, 0)?);
    }
    Ok(out)
}

/// CSV with header `level,step,correlation,residual_sq`, one block per level.
pub fn format_level_log_csv(levels: &[(usize, &[LogEntry])]) -> String {
    let mut s = String::from("level,step,correlation,residual_sq\n");
    for (level, log) in levels {
        for e in *log {
            writeln!(s, "{level},{},{:?},{:?}", e.step, e.correlation, e.residual_sq).unwrap();
        }
    }
    s
}

/// CSV with header `step,correlation,residual_sq`.
pub fn format_log_csv(log: &[LogEntry]) -> String {
    let mut s = String::from("step,correlation,residual_sq\n");
    for e in log {
        writeln!(s, "{},{:?},{:?}", e.step, e.correlation, e.residual_sq).unwrap();
    }
    s
}
