//! File formats.
//!
//! Profiles and potentials are TOML documents tagged with a `schema` key.
//! Sample grids, eigenvalue tables and plot curves are whitespace-separated
//! columns preceded by `# key = value` header lines. Floats are written in
//! shortest round-trip form so every file reads back bit-identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{Eigenvalue, EigenvalueSet, SearchWindow};
use crate::profiles::{make_piecewise_profile, Potential, RadialProfile, SegmentSpec};
use crate::samples::{SpectralSamples, Symmetry};

pub const PROFILE_SCHEMA: &str = "transeig-profile/1";
pub const POTENTIAL_SCHEMA: &str = "transeig-potential/1";
pub const SAMPLES_SCHEMA: &str = "transeig-samples/1";
pub const EIGS_SCHEMA: &str = "transeig-eigs/1";
pub const CURVE_SCHEMA: &str = "transeig-curve/1";

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Writes via a sibling temporary file so a failed run leaves no partial output.
pub fn write_file(path: &Path, text: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    schema: String,
    b: f64,
    segments: Vec<SegmentSpec>,
}

#[derive(Serialize, Deserialize)]
struct PotentialDoc {
    schema: String,
    #[serde(flatten)]
    potential: Potential,
}

fn check_schema(found: &str, want: &str) -> Result<()> {
    if found != want {
        return Err(Error::Parse(format!("expected schema {want:?}, found {found:?}")));
    }
    Ok(())
}

pub fn profile_to_string(p: &RadialProfile) -> String {
    let doc = ProfileDoc { schema: PROFILE_SCHEMA.into(), b: p.b(), segments: p.segment_specs() };
    toml::to_string(&doc).expect("profile serializes")
}

pub fn profile_from_str(s: &str) -> Result<RadialProfile> {
    let doc: ProfileDoc = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    check_schema(&doc.schema, PROFILE_SCHEMA)?;
    make_piecewise_profile(doc.b, doc.segments)
}

pub fn potential_to_string(v: &Potential) -> String {
    let doc = PotentialDoc { schema: POTENTIAL_SCHEMA.into(), potential: v.clone() };
    toml::to_string(&doc).expect("potential serializes")
}

pub fn potential_from_str(s: &str) -> Result<Potential> {
    let doc: PotentialDoc = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    check_schema(&doc.schema, POTENTIAL_SCHEMA)?;
    let v = doc.potential;
    Potential::new(v.a, v.pieces, v.points)
}

/// Header lines and numeric rows of a column file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: BTreeMap<String, String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn get(&self, key: &str) -> Result<&str> {
        self.header.get(key).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing header field {key:?}")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        v.parse().map_err(|_| Error::Parse(format!("header field {key:?} is not a number: {v:?}")))
    }
}

/// `# key = value` header (schema first, then the rest in the given order) and rows.
pub fn write_table(schema: &str, header: &[(&str, String)], columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = format!("# schema = {schema}\n");
    for (k, v) in header {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let _ = writeln!(out, "# columns = {}", columns.join(" "));
    for r in rows {
        // adding 0.0 turns -0 into +0
        let line: Vec<String> = r.iter().map(|x| format!("{:e}", x + 0.0)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_table(s: &str, schema: &str) -> Result<Table> {
    let mut t = Table::default();
    for (n, line) in s.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let (k, v) = h
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: header without '='", n + 1)))?;
            t.header.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number {x:?}", n + 1))))
            .collect::<Result<Vec<_>>>()?;
        t.rows.push(row);
    }
    check_schema(t.get("schema")?, schema)?;
    let width = t.get("columns")?.split_whitespace().count();
    if let Some(bad) = t.rows.iter().position(|r| r.len() != width) {
        return Err(Error::Parse(format!("row {} has {} columns, expected {width}", bad + 1, t.rows[bad].len())));
    }
    Ok(t)
}

fn symmetry_name(s: Symmetry) -> &'static str {
    match s {
        Symmetry::EvenInK => "even_in_k",
        Symmetry::ConjugateSymmetric => "conjugate_symmetric",
        Symmetry::None => "none",
    }
}

fn symmetry_from_name(s: &str) -> Result<Symmetry> {
    match s {
        "even_in_k" => Ok(Symmetry::EvenInK),
        "conjugate_symmetric" => Ok(Symmetry::ConjugateSymmetric),
        "none" => Ok(Symmetry::None),
        _ => Err(Error::Parse(format!("unknown symmetry {s:?}"))),
    }
}

/// A sample file: which function was sampled, the support bound, and the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile {
    /// `D`, `E` or `Dtilde`.
    pub quantity: String,
    /// `b` for wave data, `a` for Schrödinger data.
    pub support: f64,
    pub samples: SpectralSamples,
    pub extra: Vec<(String, String)>,
}

pub fn samples_to_string(f: &SampleFile) -> String {
    let s = &f.samples;
    let mut header = vec![
        ("quantity", f.quantity.clone()),
        ("support", format!("{:e}", f.support)),
        ("symmetry", symmetry_name(s.symmetry).to_string()),
        ("n", s.len().to_string()),
        ("k_max", format!("{:e}", s.k_max())),
    ];
    header.extend(f.extra.iter().map(|(k, v)| (k.as_str(), v.clone())));
    let rows: Vec<Vec<f64>> = s.k.iter().zip(&s.values).map(|(k, v)| vec![*k, v.re, v.im]).collect();
    write_table(SAMPLES_SCHEMA, &header, &["k", "re", "im"], &rows)
}

pub fn samples_from_str(text: &str) -> Result<SampleFile> {
    let t = parse_table(text, SAMPLES_SCHEMA)?;
    let symmetry = symmetry_from_name(t.get("symmetry")?)?;
    let k = t.rows.iter().map(|r| r[0]).collect();
    let values = t.rows.iter().map(|r| C::new(r[1], r[2])).collect();
    let known = ["schema", "columns", "quantity", "support", "symmetry", "n", "k_max"];
    let extra = t.header.iter().filter(|(k, _)| !known.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
    Ok(SampleFile {
        quantity: t.get("quantity")?.to_string(),
        support: t.get_f64("support")?,
        samples: SpectralSamples::new(k, values, symmetry)?,
        extra,
    })
}

pub fn eigs_to_string(es: &EigenvalueSet) -> String {
    let header = [
        ("d", es.d.to_string()),
        ("gamma", format!("{:e}", es.gamma)),
        ("window_k_max", format!("{:e}", es.window.k_max)),
        ("window_im_band", format!("{:e}", es.window.im_band)),
    ];
    let rows: Vec<Vec<f64>> = es.zeros.iter().map(|z| vec![z.k.re, z.k.im, z.multiplicity as f64]).collect();
    write_table(EIGS_SCHEMA, &header, &["re_k", "im_k", "multiplicity"], &rows)
}

pub fn eigs_from_str(text: &str) -> Result<EigenvalueSet> {
    let t = parse_table(text, EIGS_SCHEMA)?;
    let d = t.get("d")?.parse().map_err(|_| Error::Parse("header field \"d\" is not an integer".into()))?;
    let zeros = t
        .rows
        .iter()
        .map(|r| {
            if r[2] < 1.0 || r[2].fract() != 0.0 {
                return Err(Error::Parse(format!("bad multiplicity {}", r[2])));
            }
            Ok(Eigenvalue { k: C::new(r[0], r[1]), multiplicity: r[2] as u32 })
        })
        .collect::<Result<_>>()?;
    Ok(EigenvalueSet {
        d,
        zeros,
        gamma: t.get_f64("gamma")?,
        window: SearchWindow { k_max: t.get_f64("window_k_max")?, im_band: t.get_f64("window_im_band")? },
    })
}

/// Plot-ready `(x, value)` columns.
pub fn curve_to_string(name: &str, header: &[(&str, String)], x: &[f64], y: &[f64]) -> String {
    let mut h = vec![("quantity", name.to_string())];
    h.extend(header.iter().cloned());
    let rows: Vec<Vec<f64>> = x.iter().zip(y).map(|(a, b)| vec![*a, *b]).collect();
    write_table(CURVE_SCHEMA, &h, &["x", name], &rows)
}
