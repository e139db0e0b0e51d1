//! Reports: an envelope (schema, command, config echo, input hash, summary)
//! plus a table of flat rows, emitted as NDJSON or CSV.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Ndjson,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ndjson" => Ok(Self::Ndjson),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config { key: "format".into(), constraint: format!("ndjson or csv, got `{other}`") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub input_hash: String,
    pub summary: Value,
    #[serde(skip)]
    pub rows: Vec<Map<String, Value>>,
}

/// SHA-256 over length-prefixed parts, hex encoded.
pub fn content_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn to_row(v: Value) -> Result<Map<String, Value>> {
    match v {
        Value::Object(m) => Ok(m),
        other => Err(Error::Format(format!("report rows must be flat objects, got {other}"))),
    }
}

impl Report {
    /// `config` and `summary` are serialized as given; each row must serialize
    /// to a flat object. The hash covers the command, the config echo and any
    /// extra input bytes.
    pub fn new<C: Serialize, S: Serialize, R: Serialize>(
        command: &str,
        config: &C,
        inputs: &[&[u8]],
        summary: &S,
        rows: &[R],
    ) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let config_bytes = serde_json::to_vec(&config)?;
        let mut parts: Vec<&[u8]> = vec![command.as_bytes(), &config_bytes];
        parts.extend_from_slice(inputs);
        let input_hash = content_hash(&parts);
        let rows = rows.iter().map(|r| to_row(serde_json::to_value(r)?)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            input_hash,
            summary: serde_json::to_value(summary)?,
            rows,
        })
    }

    /// Column names: keys of the first row, then any new keys of later rows.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.rows {
            for k in r.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    pub fn emit(&self, format: ReportFormat) -> Result<Vec<u8>> {
        match format {
            ReportFormat::Ndjson => self.to_ndjson(),
            ReportFormat::Csv => Ok(self.to_csv().into_bytes()),
        }
    }

    /// Envelope on the first line, then one row object per line.
    pub fn to_ndjson(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec(self)?;
        out.push(b'\n');
        for r in &self.rows {
            serde_json::to_writer(&mut out, r)?;
            out.push(b'\n');
        }
        Ok(out)
    }

    pub fn from_ndjson(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or_else(|| Error::Format("empty report".into()))?;
        let mut rep: Report = serde_json::from_str(head)?;
        for l in lines {
            rep.rows.push(to_row(serde_json::from_str(l)?)?);
        }
        Ok(rep)
    }

    /// Header row plus one line per row. Numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut out = cols.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = cols.iter().map(|c| csv_cell(r.get(c))).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        Some(Value::String(s)) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            let s = other.to_string();
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        j: i32,
        energy: f64,
    }

    #[test]
    fn empty_payload_is_header_only() {
        let r = Report::new::<_, _, Row>("lp-energies", &(), &[], &(), &[]).unwrap();
        assert_eq!(r.to_csv(), "\n");
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let r = Report::new("lp-energies", &(), &[], &(), &[Row { j: -2, energy: 0.1 }]).unwrap();
        assert_eq!(r.to_csv(), "energy,j\n1.0000000000000001e-1,-2\n");
    }

    #[test]
    fn hash_depends_on_inputs() {
        let a = Report::new::<_, _, Row>("x", &1, &[b"abc"], &(), &[]).unwrap();
        let b = Report::new::<_, _, Row>("x", &1, &[b"abd"], &(), &[]).unwrap();
        assert_ne!(a.input_hash, b.input_hash);
        assert_eq!(a.input_hash.len(), 64);
    }
}
