//! Plain-text gridded current fields.
//!
//! ```text
//! nx ny nt
//! x_0 .. x_{nx-1}
//! y_0 .. y_{ny-1}
//! t_0 .. t_{nt-1}
//! u: nt blocks of ny rows with nx values
//! v: same layout
//! ```
//!
//! Values are whitespace separated, so line breaks inside a section are
//! cosmetic. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use flowpath_core::GriddedField;

#[derive(Debug, thiserror::Error)]
pub enum FieldFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse {token:?} as a number")]
    Number { line: usize, token: String },
    #[error("header must hold three positive counts `nx ny nt`")]
    Header,
    #[error("expected {expected} values after the header, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Field(#[from] flowpath_core::Error),
}

pub fn parse(text: &str) -> Result<GriddedField, FieldFileError> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            tokens.push((i + 1, tok));
        }
    }
    let mut header = [0usize; 3];
    for (slot, (_, tok)) in header.iter_mut().zip(tokens.iter().take(3)) {
        *slot = tok.parse().map_err(|_| FieldFileError::Header)?;
    }
    if tokens.len() < 3 || header.contains(&0) {
        return Err(FieldFileError::Header);
    }
    let [nx, ny, nt] = header;
    let cells = nx * ny * nt;
    let expected = nx + ny + nt + 2 * cells;
    let body = &tokens[3..];
    if body.len() != expected {
        return Err(FieldFileError::Count { expected, found: body.len() });
    }
    let values = body
        .iter()
        .map(|&(line, tok)| tok.parse::<f64>().map_err(|_| FieldFileError::Number { line, token: tok.to_string() }))
        .collect::<Result<Vec<_>, _>>()?;
    let (xs, rest) = values.split_at(nx);
    let (ys, rest) = rest.split_at(ny);
    let (ts, rest) = rest.split_at(nt);
    let (u, v) = rest.split_at(cells);
    Ok(GriddedField::new(xs.to_vec(), ys.to_vec(), ts.to_vec(), u.to_vec(), v.to_vec())?)
}

pub fn read_path(path: &Path) -> Result<GriddedField, FieldFileError> {
    parse(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse`]. Values are written in shortest round-trip form.
pub fn write(field: &GriddedField) -> String {
    let (nx, ny, nt) = (field.xs().len(), field.ys().len(), field.ts().len());
    let mut out = format!("{nx} {ny} {nt}\n");
    let row = |out: &mut String, vals: &[f64]| {
        let line: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    };
    row(&mut out, field.xs());
    row(&mut out, field.ys());
    row(&mut out, field.ts());
    for data in [field.u(), field.v()] {
        for r in data.chunks(nx) {
            row(&mut out, r);
        }
    }
    out
}
