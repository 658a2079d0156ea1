//! JSON wire format for Lefschetz complexes.
//!
//! ```json
//! {
//!   "field": "Q",
//!   "cells": [{ "id": 0, "label": "A", "dim": 0 }, ...],
//!   "kappa": [[2, 0, "-1/1"], [2, 1, "1/1"]]
//! }
//! ```
//!
//! Rational coefficients are `"num/den"` strings; GF(p) coefficients are
//! plain numbers. Cell ids must be exactly 0..n−1 in order.

use serde_json::{json, Value};

use crate::algebra::{FieldId, Scalar};
use crate::error::Error;
use crate::lefschetz::{Cell, LefschetzComplex};
use crate::Result;

impl LefschetzComplex {
    /// Serializes the complex. Cells appear in id order and κ entries in
    /// (x, y) order, so the output is deterministic.
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells()
            .iter()
            .map(|c| json!({ "id": c.id, "label": c.label, "dim": c.dim }))
            .collect();
        let mut kappa: Vec<Value> = Vec::new();
        for x in 0..self.n_cells() {
            for (y, v) in self.facet_entries(x) {
                kappa.push(json!([x, y, v.to_json()]));
            }
        }
        json!({ "field": self.field().name(), "cells": cells, "kappa": kappa })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("complex serializes")
    }

    /// Loads a complex from its JSON form and validates it.
    pub fn from_json(v: &Value) -> Result<LefschetzComplex> {
        let obj = v.as_object().ok_or_else(|| bad("complex must be a JSON object"))?;
        let field = FieldId::parse(
            obj.get("field").and_then(Value::as_str).ok_or_else(|| bad("missing field name"))?,
        )?;
        let raw_cells =
            obj.get("cells").and_then(Value::as_array).ok_or_else(|| bad("missing cells array"))?;
        let mut cells = Vec::with_capacity(raw_cells.len());
        for c in raw_cells {
            let id = c.get("id").and_then(Value::as_u64).ok_or_else(|| bad("cell without id"))?;
            let label = c
                .get("label")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("cell without label"))?;
            let dim =
                c.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("cell without dim"))?;
            cells.push(Cell { id: id as usize, label: label.to_string(), dim: dim as usize });
        }
        let raw_kappa =
            obj.get("kappa").and_then(Value::as_array).ok_or_else(|| bad("missing kappa array"))?;
        let mut kappa = Vec::with_capacity(raw_kappa.len());
        for entry in raw_kappa {
            let triple =
                entry.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("kappa entry must be [x, y, value]"))?;
            let x = triple[0].as_u64().ok_or_else(|| bad("kappa x must be a cell id"))? as usize;
            let y = triple[1].as_u64().ok_or_else(|| bad("kappa y must be a cell id"))? as usize;
            kappa.push((x, y, Scalar::from_json(field, &triple[2])?));
        }
        let complex = LefschetzComplex::from_ordered(field, cells, kappa)?;
        complex.validate()?;
        Ok(complex)
    }

    pub fn from_json_str(s: &str) -> Result<LefschetzComplex> {
        let v: Value =
            serde_json::from_str(s).map_err(|e| bad(&format!("invalid JSON: {e}")))?;
        LefschetzComplex::from_json(&v)
    }
}

fn bad(msg: &str) -> Error {
    Error::InvalidData(msg.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lefschetz::{build_simplicial, interval_complex};

    #[test]
    fn interval_round_trips() {
        let x = interval_complex(FieldId::Q);
        let reloaded = LefschetzComplex::from_json(&x.to_json()).unwrap();
        assert_eq!(reloaded.n_cells(), 3);
        assert_eq!(reloaded.cell_label(2), "AB");
        assert_eq!(reloaded.kappa(2, 0), FieldId::Q.from_i64(-1));
        assert_eq!(reloaded.kappa(2, 1), FieldId::Q.from_i64(1));
        assert_eq!(reloaded.to_json_string(), x.to_json_string());
    }

    #[test]
    fn rational_scalars_are_fraction_strings() {
        let x = interval_complex(FieldId::Q);
        let v = x.to_json();
        assert_eq!(v["kappa"][0][2], Value::String("-1/1".into()));
    }

    #[test]
    fn gf2_round_trips_with_numeric_scalars() {
        let x = build_simplicial(3, &[vec![0, 1, 2]], FieldId::gf(2).unwrap()).unwrap();
        let v = x.to_json();
        assert_eq!(v["field"], Value::String("GF(2)".into()));
        assert!(v["kappa"][0][2].is_u64());
        let reloaded = LefschetzComplex::from_json(&v).unwrap();
        assert_eq!(reloaded.to_json_string(), x.to_json_string());
    }

    #[test]
    fn rejects_gapped_ids() {
        let src = r#"{"field":"Q","cells":[{"id":1,"label":"A","dim":0}],"kappa":[]}"#;
        assert!(matches!(LefschetzComplex::from_json_str(src), Err(Error::InvalidData(_))));
    }

    #[test]
    fn rejects_grading_violation() {
        let src = r#"{
            "field": "Q",
            "cells": [{"id":0,"label":"A","dim":0},{"id":1,"label":"B","dim":2}],
            "kappa": [[1, 0, "1/1"]]
        }"#;
        assert!(matches!(
            LefschetzComplex::from_json_str(src),
            Err(Error::GradingViolation { .. })
        ));
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(LefschetzComplex::from_json_str("not json").is_err());
        assert!(LefschetzComplex::from_json_str(r#"{"field":"Q"}"#).is_err());
    }
}
