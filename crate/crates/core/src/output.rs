//! Serialization of result records to JSON lines, CSV and aligned tables.

use crate::records::{CollisionRecord, NearCollisionRecord};
use crate::scan::ScanRecord;
use crate::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

/// A flattened record ready for serialization. `value` and `d` are decimal
/// strings since they routinely exceed 64 bits.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OutputRecord {
    #[serde(rename = "type")]
    pub record_type: String,
    pub n: u64,
    pub k: u64,
    pub m: u64,
    pub l: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    pub value: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extras: BTreeMap<String, String>,
}

impl From<&CollisionRecord> for OutputRecord {
    fn from(r: &CollisionRecord) -> Self {
        OutputRecord {
            record_type: "collision".into(),
            n: r.n,
            k: r.k,
            m: r.m,
            l: r.l,
            d: None,
            value: r.value.to_string(),
            extras: BTreeMap::new(),
        }
    }
}

impl From<&NearCollisionRecord> for OutputRecord {
    fn from(r: &NearCollisionRecord) -> Self {
        OutputRecord {
            record_type: "near_collision".into(),
            n: r.n,
            k: r.k,
            m: r.m,
            l: r.l,
            d: Some(r.d.to_string()),
            value: r.value.to_string(),
            extras: BTreeMap::new(),
        }
    }
}

impl From<&ScanRecord> for OutputRecord {
    fn from(r: &ScanRecord) -> Self {
        match r {
            ScanRecord::Collision(c) => c.into(),
            ScanRecord::Near(n) => n.into(),
        }
    }
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format {other:?} (expected jsonl, csv or table)")),
        }
    }
}

/// Streams records to a writer in the chosen format. Output is fully
/// determined by the record sequence, so identical runs are byte identical.
pub struct RecordWriter<W: Write> {
    out: W,
    format: Format,
    wrote_header: bool,
    // table mode buffers everything to compute column widths
    buffered: Vec<OutputRecord>,
}

const CSV_HEADER: &str = "type,n,k,m,l,d,value";

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: Format) -> Self {
        RecordWriter {
            out,
            format,
            wrote_header: false,
            buffered: Vec::new(),
        }
    }

    pub fn write(&mut self, record: &OutputRecord) -> Result<()> {
        match self.format {
            Format::Jsonl => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)?;
            }
            Format::Csv => {
                if !self.wrote_header {
                    writeln!(self.out, "{CSV_HEADER}")?;
                    self.wrote_header = true;
                }
                writeln!(
                    self.out,
                    "{},{},{},{},{},{},{}",
                    record.record_type,
                    record.n,
                    record.k,
                    record.m,
                    record.l,
                    record.d.as_deref().unwrap_or(""),
                    record.value
                )?;
            }
            Format::Table => self.buffered.push(record.clone()),
        }
        Ok(())
    }

    /// Flushes buffered table output; a no-op for the streaming formats.
    pub fn finish(mut self) -> Result<()> {
        if self.format == Format::Table {
            let header = ["type", "n", "k", "m", "l", "d", "value"];
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            let cells: Vec<[String; 7]> = self
                .buffered
                .iter()
                .map(|r| {
                    [
                        r.record_type.clone(),
                        r.n.to_string(),
                        r.k.to_string(),
                        r.m.to_string(),
                        r.l.to_string(),
                        r.d.clone().unwrap_or_default(),
                        r.value.clone(),
                    ]
                })
                .collect();
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let emit = |out: &mut W, row: &[&str]| -> Result<()> {
                let line = row
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ");
                writeln!(out, "{}", line.trim_end())?;
                Ok(())
            };
            emit(&mut self.out, &header)?;
            for row in &cells {
                let refs: Vec<&str> = row.iter().map(String::as_str).collect();
                emit(&mut self.out, &refs)?;
            }
        }
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn sample() -> Vec<OutputRecord> {
        vec![
            (&CollisionRecord {
                n: 16,
                k: 2,
                m: 10,
                l: 3,
                value: BigUint::from(120u32),
            })
                .into(),
            (&NearCollisionRecord {
                n: 6,
                k: 3,
                m: 7,
                l: 2,
                d: BigUint::from(1u32),
                value: BigUint::from(21u32),
            })
                .into(),
        ]
    }

    fn render(format: Format) -> String {
        let mut buf = Vec::new();
        let mut w = RecordWriter::new(&mut buf, format);
        for r in sample() {
            w.write(&r).unwrap();
        }
        w.finish().unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn jsonl_layout() {
        let text = render(Format::Jsonl);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            r#"{"type":"collision","n":16,"k":2,"m":10,"l":3,"value":"120"}"#
        );
        assert_eq!(
            lines[1],
            r#"{"type":"near_collision","n":6,"k":3,"m":7,"l":2,"d":"1","value":"21"}"#
        );
    }

    #[test]
    fn csv_layout() {
        let text = render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "type,n,k,m,l,d,value");
        assert_eq!(lines[1], "collision,16,2,10,3,,120");
        assert_eq!(lines[2], "near_collision,6,3,7,2,1,21");
    }

    #[test]
    fn table_aligns_columns() {
        let text = render(Format::Table);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("type"));
        // every data line has the value column at the same offset
        let off = lines[1].rfind("120").unwrap();
        assert_eq!(lines[2].rfind("21").unwrap(), off);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("jsonl".parse::<Format>().unwrap(), Format::Jsonl);
        assert!("xml".parse::<Format>().is_err());
    }
}
