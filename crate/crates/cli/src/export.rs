//! CSV and JSON writers.
//!
//! Curve files hold one block per curve, separated by a blank line:
//!
//! ```text
//! # foliation=F1 termination=Closed closed=true
//! u,v,x,y,z
//! 0.7,0.9,1.21,0.83,1.40
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! parsing a file gives back the exact values.

use minkowski_principal::focal::FocalSheet;
use minkowski_principal::Vec3M;
use serde::Serialize;

pub const CURVE_COLUMNS: &str = "u,v,x,y,z";
pub const MESH_COLUMNS: &str = "u,v,x,y,z,valid,indicator";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveBlock {
    pub header: Vec<(String, String)>,
    pub rows: Vec<[f64; 5]>,
}

impl CurveBlock {
    /// Drops rows with non-finite entries.
    pub fn new(header: Vec<(String, String)>, uv: &[(f64, f64)], xyz: &[Vec3M]) -> Self {
        let rows = uv
            .iter()
            .zip(xyz)
            .map(|(&(u, v), p)| [u, v, p.x, p.y, p.z])
            .filter(|r| r.iter().all(|x| x.is_finite()))
            .collect();
        CurveBlock { header, rows }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn header(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Blocks with fewer than two rows are left out.
pub fn write_curves(blocks: &[CurveBlock]) -> String {
    let mut out = String::new();
    for b in blocks.iter().filter(|b| b.rows.len() >= 2) {
        if !out.is_empty() {
            out.push('\n');
        }
        let h: Vec<String> = b.header.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# {}\n{CURVE_COLUMNS}\n", h.join(" ")));
        for r in &b.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r[0], r[1], r[2], r[3], r[4]));
        }
    }
    out
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveBlock>, String> {
    let mut blocks = Vec::new();
    let mut cur: Option<CurveBlock> = None;
    for (no, line) in text.lines().enumerate() {
        let no = no + 1;
        if line.trim().is_empty() {
            blocks.extend(cur.take());
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if cur.as_ref().is_some_and(|b| !b.rows.is_empty()) {
                return Err(format!("line {no}: header inside a block"));
            }
            let mut header = Vec::new();
            for kv in h.split_whitespace() {
                let (k, v) = kv.split_once('=').ok_or_else(|| format!("line {no}: bad header field `{kv}`"))?;
                header.push((k.to_string(), v.to_string()));
            }
            cur = Some(CurveBlock { header, rows: Vec::new() });
            continue;
        }
        if line == CURVE_COLUMNS {
            cur.get_or_insert_with(|| CurveBlock { header: Vec::new(), rows: Vec::new() });
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>().map_err(|e| format!("line {no}: {e}")))
            .collect::<Result<_, _>>()?;
        let row: [f64; 5] = vals.try_into().map_err(|_| format!("line {no}: expected 5 columns"))?;
        cur.get_or_insert_with(|| CurveBlock { header: Vec::new(), rows: Vec::new() }).rows.push(row);
    }
    blocks.extend(cur);
    Ok(blocks)
}

/// Sheet mesh, one block per grid row (fixed v). Invalid nodes keep their
/// (u, v) with empty coordinates.
pub fn write_mesh(sheet: &FocalSheet) -> String {
    let mut out = String::new();
    for j in 0..sheet.nv {
        if j > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# sheet={:?} row={j}\n{MESH_COLUMNS}\n", sheet.which));
        for p in &sheet.points[j * sheet.nu..(j + 1) * sheet.nu] {
            let ind = p.indicator.map(|x| x.to_string()).unwrap_or_default();
            if p.valid {
                out.push_str(&format!("{},{},{},{},{},1,{ind}\n", p.uv.0, p.uv.1, p.xyz.x, p.xyz.y, p.xyz.z));
            } else {
                out.push_str(&format!("{},{},,,,0,\n", p.uv.0, p.uv.1));
            }
        }
    }
    out
}

/// Pretty JSON; key order follows the struct definitions.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let uv = [(0.1, 0.2), (1.0 / 3.0, -2e-300), (1e300, 0.0)];
        let xyz = [Vec3M::new(1.0, 2.0, 3.0), Vec3M::new(std::f64::consts::PI, -0.0, 5e-324), Vec3M::new(0.5, 0.25, 1e-17)];
        let b1 = CurveBlock::new(header(&[("foliation", "F1".into()), ("closed", "true".into())]), &uv, &xyz);
        let b2 = CurveBlock::new(header(&[("foliation", "F2".into())]), &uv[..2], &xyz[..2]);
        let text = write_curves(&[b1.clone(), b2.clone()]);
        let back = parse_curves(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (x, y) in back.iter().zip([&b1, &b2]) {
            assert_eq!(x.header, y.header);
            for (r, s) in x.rows.iter().zip(&y.rows) {
                for k in 0..5 {
                    assert_eq!(r[k].to_bits(), s[k].to_bits());
                }
            }
        }
        assert_eq!(back[0].get("closed"), Some("true"));
    }

    #[test]
    fn short_and_non_finite_rows_are_dropped() {
        let b = CurveBlock::new(Vec::new(), &[(0.0, 0.0), (1.0, 1.0)], &[Vec3M::new(f64::NAN, 0.0, 0.0), Vec3M::ZERO]);
        assert_eq!(b.rows.len(), 1);
        assert_eq!(write_curves(&[b]), "");
    }

    #[test]
    fn bad_rows_are_reported() {
        assert!(parse_curves("u,v,x,y,z\n1,2,3\n").unwrap_err().contains("line 2"));
        assert!(parse_curves("1,2,3,4,x\n").is_err());
    }
}
