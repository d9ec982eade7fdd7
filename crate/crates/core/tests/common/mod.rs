#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use dubrovin_core::matrix::SeriesMatrix;
use dubrovin_core::series::QSeries;

fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    std::fs::read_to_string(path).expect("test data file")
}

fn parse_rows<'a>(lines: impl Iterator<Item = &'a str>) -> SeriesMatrix {
    SeriesMatrix::from_rows(
        lines
            .map(|l| l.split('|').map(|c| c.trim().parse::<QSeries>().expect("entry")).collect())
            .collect(),
    )
}

/// The four printed one-parameter matrices, keyed by `t2..t5`.
pub fn printed_families() -> BTreeMap<String, SeriesMatrix> {
    let text = data("printed_families.txt");
    text.split('#')
        .filter(|b| !b.trim().is_empty())
        .map(|block| {
            let mut lines = block.lines();
            let name = lines.next().unwrap().trim().to_string();
            (name, parse_rows(lines.filter(|l| !l.trim().is_empty())))
        })
        .collect()
}

/// The printed full symbolic truncated matrix.
pub fn printed_full() -> SeriesMatrix {
    parse_rows(data("printed_full.txt").lines().filter(|l| !l.trim().is_empty()))
}

/// Independent computer-algebra values for one family.
pub struct FamilyOracle {
    pub matrix: SeriesMatrix,
    pub char_poly: Vec<QSeries>,
    pub discriminant: QSeries,
}

pub fn oracle_families() -> BTreeMap<String, FamilyOracle> {
    let text = data("oracle_families.txt");
    let mut raw: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (head, value) = line.split_once(": ").expect("key: value");
        let (fam, field) = head.split_once(' ').expect("family field");
        raw.entry(fam.to_string()).or_default().insert(field.to_string(), value.to_string());
    }
    raw.into_iter()
        .map(|(name, f)| {
            let matrix = parse_rows(f["matrix"].split(';'));
            let char_poly = (0..7).map(|k| f[&format!("c{k}")].parse().unwrap()).collect();
            let discriminant = f["disc"].parse().unwrap();
            (name, FamilyOracle { matrix, char_poly, discriminant })
        })
        .collect()
}

use dubrovin_core::gw::{GWKey, GWTable};
use dubrovin_core::series::rat;

/// Degree-1 table holding the nine listed numbers with every
/// `n2 <-> n3` partner set to zero. Not WDVV-consistent.
pub fn nine_value_table() -> GWTable {
    let listed = [
        ([5, 0, 0, 0], 0),
        ([4, 1, 0, 0], 0),
        ([3, 2, 0, 0], 1),
        ([3, 0, 1, 0], 0),
        ([2, 1, 1, 0], 1),
        ([2, 0, 0, 1], 0),
        ([1, 1, 0, 1], 1),
        ([1, 0, 2, 0], 1),
        ([0, 0, 1, 1], 1),
    ];
    let mut entries: BTreeMap<GWKey, _> = GWKey::all(1).into_iter().map(|k| (k, rat(0))).collect();
    for (n, v) in listed {
        entries.insert(GWKey::new(n, 1).unwrap(), rat(v));
    }
    GWTable::from_entries(entries)
}

/// `(row, col)` positions where two matrices differ.
pub fn mismatches(a: &SeriesMatrix, b: &SeriesMatrix) -> Vec<(usize, usize)> {
    let n = a.size();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| a.get(r, c) != b.get(r, c))
        .collect()
}
