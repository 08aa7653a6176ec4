//! Line-oriented config files: `[section]` headers, `key = value` pairs,
//! full-line `#` comments. Expression values are double-quoted; numbers and
//! number lists are bare. Unknown sections, unknown keys, and duplicates are
//! all rejected so a typo never silently falls back to a default.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {what}")]
    Syntax { line: usize, what: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("section [{section}] is missing key `{key}`")]
    MissingKey { section: &'static str, key: &'static str },
}

fn syntax(line: usize, what: impl Into<String>) -> ConfigError {
    ConfigError::Syntax { line, what: what.into() }
}

/// One `key = value` with its source line (for error messages).
#[derive(Clone, Debug)]
struct RawEntry {
    line: usize,
    value: String,
    quoted: bool,
}

type RawSection = BTreeMap<String, RawEntry>;

#[derive(Clone, Debug, Default)]
pub struct MetricSection {
    pub f1: String,
    pub f2: String,
    pub k3: f64,
}

#[derive(Clone, Debug, Default)]
pub struct FieldSection {
    pub v1: String,
    pub v2: String,
    pub v3: String,
}

#[derive(Clone, Debug, Default)]
pub struct FamilySection {
    pub id: String,
    /// Numeric parameters in file-independent (sorted) order.
    pub params: Vec<(String, f64)>,
    pub f1: Option<String>,
    pub f2: Option<String>,
}

#[derive(Clone, Debug)]
pub struct GridSection {
    pub bounds: [[f64; 2]; 3],
    pub counts: [usize; 3],
}

#[derive(Clone, Debug, Default)]
pub struct OptionsSection {
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub t: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub n_samples: Option<usize>,
    pub seed: Option<u64>,
    pub probes: Option<usize>,
    pub cases: Option<usize>,
    pub x0: Option<[f64; 3]>,
    pub v0: Option<[f64; 3]>,
    pub output: Option<String>,
}

/// Everything a subcommand can read from a config file. Which sections must
/// be present depends on the subcommand and is checked by its runner.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub metric: Option<MetricSection>,
    pub field: Option<FieldSection>,
    pub family: Option<FamilySection>,
    pub grid: Option<GridSection>,
    pub options: OptionsSection,
}

const SECTIONS: [&str; 5] = ["metric", "field", "family", "grid", "options"];

fn parse_raw(text: &str) -> Result<BTreeMap<String, (usize, RawSection)>, ConfigError> {
    let mut sections: BTreeMap<String, (usize, RawSection)> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(syntax(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(syntax(line, format!("duplicate section [{name}]")));
            }
            sections.insert(name.to_string(), (line, RawSection::new()));
            current = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(syntax(line, format!("expected `key = value`, got {trimmed:?}")));
        };
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, format!("bad key {key:?}")));
        }
        let section = current
            .as_ref()
            .ok_or_else(|| syntax(line, "key outside of any [section]"))?;
        let value = value.trim();
        let (value, quoted) = match value.strip_prefix('"') {
            Some(rest) => {
                let inner = rest
                    .strip_suffix('"')
                    .ok_or_else(|| syntax(line, "unterminated quoted value"))?;
                if inner.contains('"') {
                    return Err(syntax(line, "quoted value contains a stray quote"));
                }
                (inner.to_string(), true)
            }
            None => {
                if value.is_empty() {
                    return Err(syntax(line, format!("key `{key}` has no value")));
                }
                (value.to_string(), false)
            }
        };
        let entries = &mut sections.get_mut(section).expect("section exists").1;
        if entries.contains_key(key) {
            return Err(syntax(line, format!("duplicate key `{key}` in [{section}]")));
        }
        entries.insert(key.to_string(), RawEntry { line, value, quoted });
    }
    Ok(sections)
}

fn take_quoted(sec: &mut RawSection, key: &str) -> Result<Option<String>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) if e.quoted => Ok(Some(e.value)),
        Some(e) => Err(syntax(e.line, format!("`{key}` must be a quoted expression"))),
    }
}

fn parse_f64(entry: &RawEntry, key: &str) -> Result<f64, ConfigError> {
    if entry.quoted {
        return Err(syntax(entry.line, format!("`{key}` must be a bare number")));
    }
    let v: f64 = entry
        .value
        .parse()
        .map_err(|_| syntax(entry.line, format!("`{key}`: bad number {:?}", entry.value)))?;
    if !v.is_finite() {
        return Err(syntax(entry.line, format!("`{key}` must be finite")));
    }
    Ok(v)
}

fn take_f64(sec: &mut RawSection, key: &str) -> Result<Option<f64>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) => Ok(Some(parse_f64(&e, key)?)),
    }
}

fn take_usize(sec: &mut RawSection, key: &str) -> Result<Option<usize>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) => {
            let v: usize = e
                .value
                .parse()
                .map_err(|_| syntax(e.line, format!("`{key}`: bad count {:?}", e.value)))?;
            Ok(Some(v))
        }
    }
}

fn take_u64(sec: &mut RawSection, key: &str) -> Result<Option<u64>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) => {
            let v: u64 = e
                .value
                .parse()
                .map_err(|_| syntax(e.line, format!("`{key}`: bad integer {:?}", e.value)))?;
            Ok(Some(v))
        }
    }
}

fn numbers(entry: &RawEntry, key: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
    if entry.quoted {
        return Err(syntax(entry.line, format!("`{key}` must be bare numbers")));
    }
    let parts: Vec<f64> = entry
        .value
        .split_whitespace()
        .map(|w| w.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| syntax(entry.line, format!("`{key}`: expected {n} numbers")))?;
    if parts.len() != n || parts.iter().any(|v| !v.is_finite()) {
        return Err(syntax(entry.line, format!("`{key}`: expected {n} finite numbers")));
    }
    Ok(parts)
}

fn take_pair(sec: &mut RawSection, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) => {
            let v = numbers(&e, key, 2)?;
            Ok(Some((v[0], v[1])))
        }
    }
}

fn take_triple(sec: &mut RawSection, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
    match sec.remove(key) {
        None => Ok(None),
        Some(e) => {
            let v = numbers(&e, key, 3)?;
            Ok(Some([v[0], v[1], v[2]]))
        }
    }
}

fn reject_leftovers(section: &str, sec: &RawSection) -> Result<(), ConfigError> {
    if let Some((key, entry)) = sec.iter().next() {
        return Err(syntax(
            entry.line,
            format!("unknown key `{key}` in [{section}]"),
        ));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = parse_raw(text)?;
        let mut cfg = RunConfig::default();

        if let Some((_, mut sec)) = raw.remove("metric") {
            let f1 = take_quoted(&mut sec, "f1")?
                .ok_or(ConfigError::MissingKey { section: "metric", key: "f1" })?;
            let f2 = take_quoted(&mut sec, "f2")?
                .ok_or(ConfigError::MissingKey { section: "metric", key: "f2" })?;
            let k3 = take_f64(&mut sec, "k3")?
                .ok_or(ConfigError::MissingKey { section: "metric", key: "k3" })?;
            reject_leftovers("metric", &sec)?;
            cfg.metric = Some(MetricSection { f1, f2, k3 });
        }

        if let Some((_, mut sec)) = raw.remove("field") {
            let v1 = take_quoted(&mut sec, "v1")?
                .ok_or(ConfigError::MissingKey { section: "field", key: "v1" })?;
            let v2 = take_quoted(&mut sec, "v2")?
                .ok_or(ConfigError::MissingKey { section: "field", key: "v2" })?;
            let v3 = take_quoted(&mut sec, "v3")?
                .ok_or(ConfigError::MissingKey { section: "field", key: "v3" })?;
            reject_leftovers("field", &sec)?;
            cfg.field = Some(FieldSection { v1, v2, v3 });
        }

        if let Some((_, mut sec)) = raw.remove("family") {
            let id = match sec.remove("id") {
                Some(e) if !e.quoted => e.value,
                Some(e) => return Err(syntax(e.line, "`id` must be a bare family name")),
                None => {
                    return Err(ConfigError::MissingKey { section: "family", key: "id" });
                }
            };
            let f1 = take_quoted(&mut sec, "f1")?;
            let f2 = take_quoted(&mut sec, "f2")?;
            // Every remaining key is a numeric family parameter.
            let mut params = Vec::new();
            for (key, entry) in &sec {
                params.push((key.clone(), parse_f64(entry, key)?));
            }
            cfg.family = Some(FamilySection { id, params, f1, f2 });
        }

        if let Some((_, mut sec)) = raw.remove("grid") {
            let x1 = take_pair(&mut sec, "x1")?
                .ok_or(ConfigError::MissingKey { section: "grid", key: "x1" })?;
            let x2 = take_pair(&mut sec, "x2")?
                .ok_or(ConfigError::MissingKey { section: "grid", key: "x2" })?;
            let x3 = take_pair(&mut sec, "x3")?
                .ok_or(ConfigError::MissingKey { section: "grid", key: "x3" })?;
            let counts = match sec.remove("counts") {
                Some(e) => {
                    let v = numbers(&e, "counts", 3)?;
                    let c = [v[0] as usize, v[1] as usize, v[2] as usize];
                    if v.iter().zip(c).any(|(a, b)| *a != b as f64) {
                        return Err(syntax(e.line, "`counts`: expected 3 integers"));
                    }
                    c
                }
                None => {
                    return Err(ConfigError::MissingKey { section: "grid", key: "counts" });
                }
            };
            reject_leftovers("grid", &sec)?;
            cfg.grid = Some(GridSection {
                bounds: [[x1.0, x1.1], [x2.0, x2.1], [x3.0, x3.1]],
                counts,
            });
        }

        if let Some((_, mut sec)) = raw.remove("options") {
            cfg.options = OptionsSection {
                tol: take_f64(&mut sec, "tol")?,
                steps: take_usize(&mut sec, "steps")?,
                t: take_f64(&mut sec, "t")?,
                interval: take_pair(&mut sec, "interval")?,
                n_samples: take_usize(&mut sec, "n_samples")?,
                seed: take_u64(&mut sec, "seed")?,
                probes: take_usize(&mut sec, "probes")?,
                cases: take_usize(&mut sec, "cases")?,
                x0: take_triple(&mut sec, "x0")?,
                v0: take_triple(&mut sec, "v0")?,
                output: take_quoted(&mut sec, "output")?,
            };
            reject_leftovers("options", &sec)?;
        }

        Ok(cfg)
    }
}
