//! Browser bindings: the admissible basis, the sphere's Ext chart and the
//! stable EHP pages for a point. Every function returns text (JSON or CSV).

use wasm_bindgen::prelude::*;

use ehp_core::ehp::{apply_d1, build_e1, stems_from_resolution};
use ehp_core::extcalc::{minimal_resolution, Boundary};
use ehp_core::gradmod::trivial_module;
use ehp_core::steenrod::basis;

const MAX_DEGREE: u32 = 40;
const MAX_T: i32 = 24;

fn fail(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Admissible monomials of one degree as a JSON array of strings.
#[wasm_bindgen]
pub fn steenrod_basis(degree: u32) -> Result<String, JsError> {
    if degree > MAX_DEGREE {
        return Err(fail(format!("degree {degree} is above {MAX_DEGREE}")));
    }
    let words: Vec<String> = basis(degree).iter().map(|w| w.to_string()).collect();
    serde_json::to_string(&words).map_err(fail)
}

/// Ext over A of F2 for `s <= max_s`, `t <= max_t` as `s,t,dim` CSV.
#[wasm_bindgen]
pub fn sphere_ext_csv(max_s: u32, max_t: i32) -> Result<String, JsError> {
    if max_t > MAX_T || max_s > 12 {
        return Err(fail(format!("keep max_t <= {MAX_T} and max_s <= 12")));
    }
    let r = minimal_resolution(&trivial_module(), Boundary::Exact, max_s, max_t, None).map_err(fail)?;
    Ok(r.chart().to_csv())
}

/// The E1 (`page = 1`) or E2 (`page = 2`) page on columns `(d - r, d]` as JSON.
#[wasm_bindgen]
pub fn ehp_page(d: i32, r: u32, page: u32) -> Result<String, JsError> {
    if r == 0 || r > 40 {
        return Err(fail("r must lie in 1..=40"));
    }
    let stems = stems_from_resolution(7).map_err(fail)?;
    let e1 = build_e1(d as i64, r, &stems).map_err(fail)?;
    let rows: Vec<i64> = e1.rows().collect();
    let j = match page {
        1 => e1.to_json(&rows),
        2 => apply_d1(&e1).to_json(&rows),
        _ => return Err(fail("page must be 1 or 2")),
    };
    serde_json::to_string(&j).map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_in_degree_three() {
        assert_eq!(steenrod_basis(3).unwrap(), r#"["Sq(3)","Sq(2,1)"]"#);
    }

    #[test]
    fn sphere_chart_starts_with_the_unit() {
        let csv = sphere_ext_csv(2, 4).unwrap();
        assert!(csv.starts_with("s,t,dim\n"));
        assert!(csv.contains("\n0,0,1\n"));
    }

    #[test]
    fn pages_have_the_requested_columns() {
        let j: serde_json::Value = serde_json::from_str(&ehp_page(4, 4, 2).unwrap()).unwrap();
        assert_eq!(j["columns"], serde_json::json!([1, 2, 3, 4]));
        assert_eq!(j["groups"][0], serde_json::json!(["Z/2", "0", "Z/2", "0"]));
    }
}
