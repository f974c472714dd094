//! Parsers for the bracketed matrix literals used on the command line,
//! e.g. `[1,0.5;0,0.866]`: rows separated by `;`, entries by `,`.

use crate::error::{Error, Result};

/// Parses `[a,b;c,d;...]` into rows. `offset` is added to reported positions
/// so errors point into the caller's full input string.
pub(crate) fn parse_rows(input: &str, full: &str, offset: usize) -> Result<Vec<Vec<f64>>> {
    let trimmed = input.trim();
    let lead = input.len() - input.trim_start().len();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::parse(full, offset + lead, "expected `[...]`"))?;
    let mut rows = Vec::new();
    let mut pos = offset + lead + 1;
    for row in inner.split(';') {
        let mut entries = Vec::new();
        let mut p = pos;
        for tok in row.split(',') {
            let value = parse_real(tok.trim(), full, p + (tok.len() - tok.trim_start().len()))?;
            entries.push(value);
            p += tok.len() + 1;
        }
        rows.push(entries);
        pos += row.len() + 1;
    }
    Ok(rows)
}

pub(crate) fn parse_real(tok: &str, full: &str, position: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(full, position, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(full, position, "value must be finite"));
    }
    Ok(v)
}

/// Finds the `]` closing the literal that starts at byte 0 of `s`.
pub(crate) fn closing_bracket(s: &str) -> Option<usize> {
    s.find(']')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_positions() {
        let rows = parse_rows("[1,0.5;0,2]", "[1,0.5;0,2]", 0).unwrap();
        assert_eq!(rows, vec![vec![1.0, 0.5], vec![0.0, 2.0]]);
        match parse_rows("[1,x;0,2]", "[1,x;0,2]", 0) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
