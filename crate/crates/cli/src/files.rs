//! JSON files for matrices and states.
//!
//! Matrices: `{"dim": n, "entries": [[[re, im], ...], ...]}`, row-major.
//! States may instead give `{"dim": n, "amplitudes": [[re, im], ...]}`.
//! Every number is a JSON number or a string holding a decimal or an
//! expression such as `"sqrt(2)/3"`.

use std::path::Path;

use dephasing::numerics::format_sig;
use dephasing::quantum::{pure_density, DensityOperator, PureState};
use dephasing::signals::parse_complex;
use dephasing::{CMatrix, Complex, Error, PrecisionContext, Result};
use serde_json::{json, Value};

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn declared_dim(v: &Value) -> Result<usize> {
    v.get("dim")
        .and_then(Value::as_u64)
        .map(|d| d as usize)
        .ok_or_else(|| Error::Parse("missing integer \"dim\"".into()))
}

pub fn matrix_from_json(v: &Value, ctx: &PrecisionContext) -> Result<CMatrix> {
    let dim = declared_dim(v)?;
    let rows = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"entries\" array".into()))?;
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rows.len(),
        });
    }
    let mut out = Vec::with_capacity(dim);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse("each row must be an array".into()))?;
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        out.push(row.iter().map(|z| parse_complex(z, ctx)).collect::<Result<Vec<_>>>()?);
    }
    CMatrix::from_rows(out)
}

/// A density matrix, or a pure state turned into `|ψ⟩⟨ψ|`.
pub fn density_from_json(v: &Value, ctx: &PrecisionContext) -> Result<DensityOperator> {
    if let Some(amps) = v.get("amplitudes") {
        let dim = declared_dim(v)?;
        let amps = amps
            .as_array()
            .ok_or_else(|| Error::Parse("\"amplitudes\" must be an array".into()))?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        let vector = amps.iter().map(|z| parse_complex(z, ctx)).collect::<Result<Vec<_>>>()?;
        return Ok(pure_density(&PureState::new(vector, ctx)?));
    }
    DensityOperator::new(matrix_from_json(v, ctx)?, ctx)
}

/// Enough digits to round-trip the working precision.
fn digits(ctx: &PrecisionContext) -> usize {
    ctx.decimal_digits() + 3
}

fn complex_json(z: &Complex, ctx: &PrecisionContext) -> Value {
    json!([format_sig(&z.re, digits(ctx)), format_sig(&z.im, digits(ctx))])
}

pub fn matrix_to_json(m: &CMatrix, ctx: &PrecisionContext) -> Value {
    let entries: Vec<Value> = m
        .rows()
        .map(|row| Value::Array(row.iter().map(|z| complex_json(z, ctx)).collect()))
        .collect();
    json!({ "dim": m.dim(), "entries": entries })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
