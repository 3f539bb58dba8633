//! Plain-text number formatting shared by the CSV writers.

use std::io::{self, Write};

/// Formats `x` with 17 significant digits (enough to round-trip an `f64`).
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

/// Writes `header` followed by one `n,value` row per entry of `rows`.
pub fn write_indexed_csv<W: Write>(
    mut w: W,
    header: &str,
    rows: impl IntoIterator<Item = (u64, f64)>,
) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for (n, v) in rows {
        writeln!(w, "{n},{}", sig17(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [1.0, -0.5303300858899106, 1.0 / 3.0, 6.02e23, -1e-300] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(1.0 / 3.0), "3.3333333333333331e-1");
    }
}
