//! Stable EHP bookkeeping for `X = pt`: a stem table read off the sphere's
//! Ext chart, the E1 page on columns `(d - r, d]`, the d1 rule
//! (multiplication by the Euler characteristic of `S^s`) and E2 by kernel
//! over image on cyclic groups.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extcalc::{minimal_resolution, Boundary};
use crate::gradmod::trivial_module;

/// A finitely generated abelian 2-group up to isomorphism.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoGroup {
    pub free_rank: u32,
    /// Orders of the cyclic torsion summands, descending; all powers of two.
    pub torsion: Vec<u64>,
}

impl TwoGroup {
    pub fn zero() -> Self {
        TwoGroup::default()
    }

    pub fn z() -> Self {
        TwoGroup {
            free_rank: 1,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        assert!(order.is_power_of_two() && order > 1, "order must be a power of two above 1");
        TwoGroup {
            free_rank: 0,
            torsion: vec![order],
        }
    }

    pub fn new(free_rank: u32, mut torsion: Vec<u64>) -> Result<Self> {
        if let Some(o) = torsion.iter().find(|o| !o.is_power_of_two() || **o < 2) {
            return Err(Error::Parse(format!("torsion order {o} is not a power of two above 1")));
        }
        torsion.sort_unstable_by(|a, b| b.cmp(a));
        Ok(TwoGroup { free_rank, torsion })
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.free_rank as usize + self.torsion.len() <= 1
    }

    /// Order as a power of two; `None` when there is a free summand.
    pub fn log2_order(&self) -> Option<u32> {
        (self.free_rank == 0).then(|| self.torsion.iter().map(|o| o.trailing_zeros()).sum())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(TwoGroup::zero());
        }
        let mut free = 0;
        let mut torsion = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if part == "Z" {
                free += 1;
            } else if let Some(o) = part.strip_prefix("Z/") {
                torsion.push(o.parse().map_err(|_| Error::Parse(format!("bad group {part:?}")))?);
            } else {
                return Err(Error::Parse(format!("bad group {part:?}")));
            }
        }
        TwoGroup::new(free, torsion)
    }
}

impl fmt::Display for TwoGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = (0..self.free_rank).map(|_| "Z".to_string()).collect();
        parts.extend(self.torsion.iter().map(|o| format!("Z/{o}")));
        write!(f, "{}", parts.join("+"))
    }
}

/// 2-primary stable stems by stem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StemTable {
    pub stems: BTreeMap<u32, TwoGroup>,
    pub provenance: String,
}

impl StemTable {
    pub fn get(&self, t: u32) -> Option<&TwoGroup> {
        self.stems.get(&t)
    }

    pub fn max_stem(&self) -> u32 {
        self.stems.keys().next_back().copied().unwrap_or(0)
    }
}

/// Stages of the sphere's resolution used to separate finite towers from
/// the infinite one.
const TOWER_DEPTH: u32 = 8;

/// Stems up to `max_stem <= 7` from the Ext chart of the sphere: each stem's
/// `h_0`-module is split into towers; a tower of length `k` is `Z/2^k` and a
/// tower reaching the last computed stage is `Z`.
pub fn stems_from_resolution(max_stem: u32) -> Result<StemTable> {
    if max_stem > 7 {
        return Err(Error::Unsupported(format!(
            "stem {max_stem} lies beyond 7, where Adams differentials start"
        )));
    }
    let max_s = TOWER_DEPTH;
    let r = minimal_resolution(&trivial_module(), Boundary::Exact, max_s, (max_stem + max_s) as i32, None)?;
    let mut stems = BTreeMap::new();
    for n in 0..=max_stem as i32 {
        // rank of h0^j from stage s, zero past the computed stages
        let mut powers: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for s in 0..=max_s {
            let dim = r.generators(s, n + s as i32);
            let mut acc = crate::f2linalg::BitMatrix::identity(dim);
            powers.insert((s, 0), dim);
            for j in 1..=max_s - s {
                let step = r.h_product(0, s + j - 1, n + (s + j - 1) as i32)?;
                acc = step.mul(&acc);
                powers.insert((s, j), acc.rank());
            }
        }
        let rank = |s: i64, j: i64| -> i64 {
            if s < 0 || j < 0 {
                return 0;
            }
            powers.get(&(s as u32, j as u32)).map_or(0, |&x| x as i64)
        };
        let mut group = TwoGroup::zero();
        for a in 0..=max_s as i64 {
            for k in 1..=(max_s as i64 - a + 1) {
                let count = rank(a, k - 1) - rank(a, k) - rank(a - 1, k) + rank(a - 1, k + 1);
                for _ in 0..count {
                    if a + k - 1 == max_s as i64 {
                        group.free_rank += 1;
                    } else {
                        group.torsion.push(1u64 << k);
                    }
                }
            }
        }
        group.torsion.sort_unstable_by(|a, b| b.cmp(a));
        stems.insert(n as u32, group);
    }
    Ok(StemTable {
        stems,
        provenance: format!(
            "derived from a minimal resolution of F2 over A to {max_s} stages; \
             assumes no Adams differentials in stems <= 7 and reads h0-towers as multiplication by 2"
        ),
    })
}

/// `chi(S^d)`: 2 for even `d`, 0 for odd `d`.
pub fn euler_char_sphere(d: i64) -> u32 {
    if d.rem_euclid(2) == 0 {
        2
    } else {
        0
    }
}

/// E1 of the stable EHP spectral sequence for `X = pt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E1Page {
    pub d: i64,
    pub r: u32,
    pub max_t: u32,
    stems: StemTable,
}

impl E1Page {
    pub fn columns(&self) -> std::ops::RangeInclusive<i64> {
        self.d - self.r as i64 + 1..=self.d
    }

    pub fn rows(&self) -> std::ops::RangeInclusive<i64> {
        0..=self.max_t as i64
    }

    pub fn in_range(&self, s: i64, t: i64) -> bool {
        self.columns().contains(&s) && t >= 0 && t <= self.max_t as i64
    }

    pub fn group(&self, s: i64, t: i64) -> TwoGroup {
        if !self.in_range(s, t) {
            return TwoGroup::zero();
        }
        self.stems.get(t as u32).cloned().unwrap_or_default()
    }

    /// The multiplier of `d1: E_{s,t} -> E_{s-1,t}`; 0 when the target column
    /// lies outside the page.
    pub fn d1(&self, s: i64, t: i64) -> u32 {
        if self.in_range(s, t) && self.in_range(s - 1, t) {
            euler_char_sphere(s)
        } else {
            0
        }
    }
}

pub fn build_e1(d: i64, r: u32, stems: &StemTable) -> Result<E1Page> {
    if r == 0 {
        return Err(Error::Parse("the column count r must be positive".into()));
    }
    if stems.get(0).map(|g| g.free_rank) != Some(1) {
        return Err(Error::Parse("stem 0 must have free rank 1".into()));
    }
    Ok(E1Page {
        d,
        r,
        max_t: stems.max_stem(),
        stems: stems.clone(),
    })
}

/// E2 of the rows where every group touched by a nonzero d1 is cyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Page {
    pub columns: Vec<i64>,
    pub rows: Vec<i64>,
    pub groups: BTreeMap<(i64, i64), TwoGroup>,
    /// Rows skipped because d1 meets a non-cyclic group.
    pub unsupported_rows: Vec<i64>,
}

impl E2Page {
    pub fn group(&self, s: i64, t: i64) -> Option<&TwoGroup> {
        self.groups.get(&(s, t))
    }
}

fn cyclic_log(g: &TwoGroup) -> Option<u32> {
    g.torsion.first().map(|o| o.trailing_zeros())
}

/// `ker(out) / im(in)` on a cyclic group, both maps being multiplication by
/// 0 or 2.
fn homology(g: &TwoGroup, out: u32, inc: u32) -> TwoGroup {
    if g.is_zero() {
        return TwoGroup::zero();
    }
    let (out2, in2) = (out == 2, inc == 2);
    if g.free_rank == 1 {
        return match (out2, in2) {
            (true, _) => TwoGroup::zero(),
            (false, true) => TwoGroup::cyclic(2),
            (false, false) => TwoGroup::z(),
        };
    }
    let k = cyclic_log(g).expect("cyclic torsion group");
    match (out2, in2) {
        (false, false) => g.clone(),
        (false, true) | (true, false) => TwoGroup::cyclic(2),
        (true, true) if k == 1 => TwoGroup::cyclic(2),
        (true, true) => TwoGroup::zero(),
    }
}

pub fn apply_d1(page: &E1Page) -> E2Page {
    let mut groups = BTreeMap::new();
    let mut unsupported = Vec::new();
    for t in page.rows() {
        let row_ok = page.columns().all(|s| {
            let touched = page.d1(s, t) != 0 || page.d1(s + 1, t) != 0;
            !touched || page.group(s, t).is_cyclic()
        });
        if !row_ok {
            unsupported.push(t);
            continue;
        }
        for s in page.columns() {
            let g = page.group(s, t);
            let (out, inc) = (page.d1(s, t), page.d1(s + 1, t));
            let h = if out == 0 && inc == 0 {
                g
            } else {
                homology(&g, out, inc)
            };
            groups.insert((s, t), h);
        }
    }
    E2Page {
        columns: page.columns().collect(),
        rows: page.rows().collect(),
        groups,
        unsupported_rows: unsupported,
    }
}

/// JSON shape shared by E1 and E2: `groups[i][j]` and `d1[i][j]` for row
/// `rows[i]` and column `columns[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageJson {
    pub columns: Vec<i64>,
    pub rows: Vec<i64>,
    pub groups: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub unsupported_rows: Vec<i64>,
}

fn marker(m: u32) -> String {
    if m == 0 {
        "0".into()
    } else {
        format!("x{m}")
    }
}

impl E1Page {
    pub fn to_json(&self, rows: &[i64]) -> PageJson {
        let columns: Vec<i64> = self.columns().collect();
        PageJson {
            groups: rows
                .iter()
                .map(|&t| columns.iter().map(|&s| self.group(s, t).to_string()).collect())
                .collect(),
            d1: Some(
                rows.iter()
                    .map(|&t| columns.iter().map(|&s| marker(self.d1(s, t))).collect())
                    .collect(),
            ),
            columns,
            rows: rows.to_vec(),
            unsupported_rows: Vec::new(),
        }
    }

    /// `s,t,group,d1` per position, rows outer.
    pub fn to_csv(&self, rows: &[i64]) -> String {
        let mut out = String::from("s,t,group,d1\n");
        for &t in rows {
            for s in self.columns() {
                let _ = writeln!(out, "{s},{t},{},{}", self.group(s, t), marker(self.d1(s, t)));
            }
        }
        out
    }
}

impl E2Page {
    pub fn to_json(&self, rows: &[i64]) -> PageJson {
        let rows: Vec<i64> = rows.iter().copied().filter(|t| self.rows.contains(t)).collect();
        PageJson {
            groups: rows
                .iter()
                .map(|&t| {
                    self.columns
                        .iter()
                        .map(|&s| self.group(s, t).map_or("?".to_string(), TwoGroup::to_string))
                        .collect()
                })
                .collect(),
            d1: None,
            columns: self.columns.clone(),
            unsupported_rows: self
                .unsupported_rows
                .iter()
                .copied()
                .filter(|t| rows.contains(t))
                .collect(),
            rows,
        }
    }

    pub fn to_csv(&self, rows: &[i64]) -> String {
        let mut out = String::from("s,t,group\n");
        for &t in rows {
            for &s in &self.columns {
                if let Some(g) = self.group(s, t) {
                    let _ = writeln!(out, "{s},{t},{g}");
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table() -> StemTable {
        stems_from_resolution(7).unwrap()
    }

    #[test]
    fn stems_match_the_classical_values() {
        let want = ["Z", "Z/2", "Z/2", "Z/8", "0", "0", "Z/2", "Z/16"];
        let t = table();
        for (n, w) in want.iter().enumerate() {
            assert_eq!(t.get(n as u32).unwrap().to_string(), *w, "stem {n}");
        }
        assert!(matches!(stems_from_resolution(8), Err(Error::Unsupported(_))));
    }

    #[test]
    fn euler_characteristic_values() {
        assert_eq!(euler_char_sphere(2), 2);
        assert_eq!(euler_char_sphere(3), 0);
        assert_eq!(euler_char_sphere(0), 2);
        assert_eq!(euler_char_sphere(-3), 0);
    }

    #[test]
    fn bottom_row_of_a_four_column_page() {
        let p = build_e1(4, 4, &table()).unwrap();
        assert_eq!(p.columns(), 1..=4);
        for s in 1..=4 {
            assert_eq!(p.group(s, 0), TwoGroup::z());
        }
        let d1: Vec<u32> = (1..=4).map(|s| p.d1(s, 0)).collect();
        assert_eq!(d1, [0, 2, 0, 2]);
        assert!(p.group(0, 0).is_zero() && p.group(5, 0).is_zero() && p.group(2, -1).is_zero());
        let e2 = apply_d1(&p);
        let row: Vec<String> = (1..=4).map(|s| e2.group(s, 0).unwrap().to_string()).collect();
        assert_eq!(row, ["Z/2", "0", "Z/2", "0"]);
    }

    #[test]
    fn interior_bottom_row_alternates() {
        let p = build_e1(11, 10, &table()).unwrap();
        let e2 = apply_d1(&p);
        for s in 3..=10 {
            let want = if s % 2 == 0 { "0" } else { "Z/2" };
            assert_eq!(e2.group(s, 0).unwrap().to_string(), want, "s = {s}");
        }
    }

    #[test]
    fn single_column_is_unchanged() {
        let p = build_e1(6, 1, &table()).unwrap();
        let e2 = apply_d1(&p);
        for t in p.rows() {
            assert_eq!(e2.group(6, t).unwrap(), &p.group(6, t));
        }
    }

    #[test]
    fn homology_of_cyclic_groups() {
        let z8 = TwoGroup::cyclic(8);
        assert!(homology(&z8, 2, 2).is_zero());
        assert_eq!(homology(&TwoGroup::cyclic(2), 2, 2), TwoGroup::cyclic(2));
        assert_eq!(homology(&z8, 0, 0), z8);
        assert_eq!(homology(&TwoGroup::z(), 0, 0), TwoGroup::z());
    }

    #[test]
    fn torsion_rows() {
        let p = build_e1(6, 4, &table()).unwrap();
        let e2 = apply_d1(&p);
        // Z/8 in stem 3: kernel or cokernel of x2, never both.
        assert_eq!(e2.group(3, 3).unwrap().to_string(), "Z/2");
        assert_eq!(e2.group(4, 3).unwrap().to_string(), "Z/2");
        assert_eq!(e2.group(5, 3).unwrap().to_string(), "Z/2");
        assert_eq!(e2.group(6, 3).unwrap().to_string(), "Z/2");
        // Z/2 in stem 1: x2 is zero there, so the group survives.
        assert_eq!(e2.group(4, 1).unwrap().to_string(), "Z/2");
    }

    #[test]
    fn non_cyclic_rows_are_reported() {
        let mut stems = table();
        stems.stems.insert(8, TwoGroup::new(0, vec![2, 2]).unwrap());
        let p = build_e1(4, 3, &stems).unwrap();
        let e2 = apply_d1(&p);
        assert_eq!(e2.unsupported_rows, [8]);
        assert!(e2.group(3, 8).is_none());
    }

    #[test]
    fn json_and_csv_shapes() {
        let p = build_e1(4, 4, &table()).unwrap();
        let j = serde_json::to_value(p.to_json(&[0])).unwrap();
        assert_eq!(j["columns"], serde_json::json!([1, 2, 3, 4]));
        assert_eq!(j["groups"], serde_json::json!([["Z", "Z", "Z", "Z"]]));
        assert_eq!(j["d1"], serde_json::json!([["0", "x2", "0", "x2"]]));
        assert_eq!(p.to_csv(&[0]), "s,t,group,d1\n1,0,Z,0\n2,0,Z,x2\n3,0,Z,0\n4,0,Z,x2\n");
        assert_eq!(TwoGroup::parse("Z+Z/4").unwrap().to_string(), "Z+Z/4");
        assert!(TwoGroup::parse("Z/6").is_err());
    }

    proptest! {
        #[test]
        fn shifting_columns_by_two_keeps_the_pattern(d in -20i64..20, r in 1u32..12) {
            let t = table();
            let a = build_e1(d, r, &t).unwrap();
            let b = build_e1(d + 2, r, &t).unwrap();
            let ea = apply_d1(&a);
            let eb = apply_d1(&b);
            for s in a.columns() {
                for row in a.rows() {
                    prop_assert_eq!(a.d1(s, row), b.d1(s + 2, row));
                    prop_assert_eq!(ea.group(s, row), eb.group(s + 2, row));
                }
            }
        }

        #[test]
        fn zero_outside_the_columns(d in -20i64..20, r in 1u32..12, s in -40i64..40, row in -3i64..8) {
            let p = build_e1(d, r, &table()).unwrap();
            if s <= d - r as i64 || s > d || row < 0 {
                prop_assert!(p.group(s, row).is_zero());
            }
        }

        #[test]
        fn zero_d1_leaves_the_page(d in -20i64..20, r in 1u32..12) {
            // Only odd columns plus the lowest column: every d1 is zero.
            let p = build_e1(d, r, &table()).unwrap();
            let e2 = apply_d1(&p);
            for s in p.columns() {
                for row in p.rows() {
                    if p.d1(s, row) == 0 && p.d1(s + 1, row) == 0 {
                        prop_assert_eq!(e2.group(s, row), Some(&p.group(s, row)));
                    }
                }
            }
        }
    }
}
