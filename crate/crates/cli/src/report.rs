use std::io::{Read, Write};

use crystfib::fiberclass::{FibrationRecord, OrbifoldClass};
use serde::{Deserialize, Serialize};

/// One emitted fibration row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub group: String,
    pub name: String,
    pub row: usize,
    pub seifert_fiber: OrbifoldClass,
    pub seifert_base: OrbifoldClass,
    #[serde(with = "yes_no")]
    pub seifert_split: bool,
    pub cofiber: OrbifoldClass,
    #[serde(with = "base_word")]
    pub base: OrbifoldClass,
    #[serde(with = "yes_no")]
    pub coseifert_split: bool,
    pub index: u64,
    pub k_span: String,
    pub n_span: String,
}

impl ReportRow {
    pub fn new(group: &str, name: &str, row: usize, r: &FibrationRecord) -> Self {
        let s = r.summary();
        ReportRow {
            group: group.to_string(),
            name: name.to_string(),
            row,
            seifert_fiber: s.seifert_fiber,
            seifert_base: s.seifert_base,
            seifert_split: s.seifert_split,
            cofiber: s.cofiber,
            base: s.base,
            coseifert_split: s.coseifert_split,
            index: s.index,
            k_span: s.k_span,
            n_span: s.n_span,
        }
    }

    pub fn table_row(&self, it: u32) -> TableRow {
        TableRow {
            it,
            row: self.row,
            seifert_split: self.seifert_split,
            cofiber: self.cofiber,
            base: self.base,
            coseifert_split: self.coseifert_split,
            index: self.index,
        }
    }
}

/// Row of the `table` CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub it: u32,
    pub row: usize,
    #[serde(with = "yes_no")]
    pub seifert_split: bool,
    pub cofiber: OrbifoldClass,
    #[serde(with = "base_word")]
    pub base: OrbifoldClass,
    #[serde(with = "yes_no")]
    pub coseifert_split: bool,
    pub index: u64,
}

mod yes_no {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *b { "yes" } else { "no" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match String::deserialize(d)?.as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            other => Err(D::Error::custom(format!(
                "expected yes or no, got '{other}'"
            ))),
        }
    }
}

mod base_word {
    use crystfib::fiberclass::OrbifoldClass;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &OrbifoldClass, s: S) -> Result<S::Ok, S::Error> {
        match c {
            OrbifoldClass::Circle => s.serialize_str("circle"),
            OrbifoldClass::Interval => s.serialize_str("interval"),
            other => s.serialize_str(other.symbol()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<OrbifoldClass, D::Error> {
        let s = String::deserialize(d)?;
        OrbifoldClass::from_symbol(&s)
            .ok_or_else(|| D::Error::custom(format!("unknown class '{s}'")))
    }
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table_csv<R: Read>(input: R) -> csv::Result<Vec<TableRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_report_csv<R: Read>(input: R) -> csv::Result<Vec<ReportRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
