use serde::Serialize;

use crate::error::Result;

/// 17 significant digits, enough to round-trip any `f64`.
pub(crate) fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn csv_table<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -7.25e12] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }
}
