//! Reference data: the published fibration table for the reducible space
//! groups and the plane-group fibrations.

use serde::{Deserialize, Serialize};

use crate::fiberclass::{FibrationRecord, OrbifoldClass};

pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");
pub const PLANE_CSV: &str = include_str!("../data/plane_fibrations.csv");

/// Number of rows in the reference table.
pub const TABLE1_ROWS: usize = 273;

/// The five compared columns of a space-group fibration row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowColumns {
    pub seifert_split: bool,
    pub cofiber: OrbifoldClass,
    pub base: OrbifoldClass,
    pub coseifert_split: bool,
    pub index: u64,
}

impl RowColumns {
    pub fn of(r: &FibrationRecord) -> RowColumns {
        RowColumns {
            seifert_split: r.seifert_split,
            cofiber: r.cofiber,
            base: r.base,
            coseifert_split: r.coseifert_split,
            index: r.index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Row {
    pub it: u32,
    pub cols: RowColumns,
    /// Fibrifold name, kept verbatim and never interpreted.
    pub fibrifold: String,
}

fn yes_no(s: &str) -> bool {
    match s {
        "yes" => true,
        "no" => false,
        other => panic!("bad flag '{other}' in reference data"),
    }
}

fn class(s: &str) -> OrbifoldClass {
    OrbifoldClass::from_symbol(s).unwrap_or_else(|| panic!("bad symbol '{s}' in reference data"))
}

pub fn table1() -> Vec<Table1Row> {
    TABLE1_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.splitn(7, ',').collect();
            Table1Row {
                it: f[0].parse().expect("IT number"),
                cols: RowColumns {
                    seifert_split: yes_no(f[1]),
                    cofiber: class(f[2]),
                    base: class(f[3]),
                    coseifert_split: yes_no(f[4]),
                    index: f[5].parse().expect("index"),
                },
                fibrifold: f[6].trim_matches('"').to_string(),
            }
        })
        .collect()
}

/// Sorted reference columns for one IT number.
pub fn table1_group(it: u32) -> Vec<RowColumns> {
    let mut v: Vec<RowColumns> = table1()
        .into_iter()
        .filter(|r| r.it == it)
        .map(|r| r.cols)
        .collect();
    v.sort();
    v
}

/// IT numbers listed in the reference table.
pub fn table1_its() -> Vec<u32> {
    let mut v: Vec<u32> = table1().iter().map(|r| r.it).collect();
    v.dedup();
    v
}

/// A Seifert fibration of a plane group: class of the fiber, class of the
/// base, and whether the extension splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlaneFibration {
    pub fiber: OrbifoldClass,
    pub base: OrbifoldClass,
    pub split: bool,
}

impl PlaneFibration {
    pub fn of(r: &FibrationRecord) -> PlaneFibration {
        PlaneFibration {
            fiber: r.seifert_fiber,
            base: r.seifert_base,
            split: r.seifert_split,
        }
    }
}

pub fn plane_fibrations(it: u32) -> Vec<PlaneFibration> {
    let mut v: Vec<PlaneFibration> = PLANE_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse::<u32>().ok()? == it).then(|| PlaneFibration {
                fiber: class(f[2]),
                base: class(f[3]),
                split: yes_no(f[4]),
            })
        })
        .collect();
    v.sort();
    v
}
