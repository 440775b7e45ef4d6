//! Grid parsing and CSV emission.

use std::io::Write;

use crate::CliError;

pub const MAX_GRID_POINTS: usize = 1_000_000;

/// `log:lo:hi:n` for `n` log-spaced points, or a comma-separated list.
///
/// Values must be positive and strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("grid `{text}`: {why}"));
    let values = if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad("expected log:lo:hi:n"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad("lo is not a number"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad("hi is not a number"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("n is not a count"))?;
        if n > MAX_GRID_POINTS {
            return Err(bad("more than 1e6 points"));
        }
        if n == 1 && lo == hi {
            vec![lo]
        } else {
            csl_cutoff::bounds::log_grid(lo, hi, n).map_err(|e| bad(&e.to_string()))?
        }
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.len() > MAX_GRID_POINTS {
        return Err(bad("needs between 1 and 1e6 points"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(bad("values must be positive and finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("values must be strictly increasing"));
    }
    Ok(values)
}

/// Nine significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// A numeric table checked for NaN and negative entries before it is written.
pub struct Csv {
    metadata: Vec<(String, f64)>,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            metadata: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    /// A `# key,value` line emitted ahead of the header.
    pub fn metadata(&mut self, key: &str, value: f64) {
        self.metadata.push((key.to_string(), value));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write + ?Sized>(&self, out: &mut W) -> Result<(), CliError> {
        for (i, row) in self.rows.iter().enumerate() {
            for (name, v) in self.header.iter().zip(row) {
                if v.is_nan() || *v < 0.0 {
                    return Err(CliError::InvalidOutput(format!("{name} = {v} in row {i}")));
                }
            }
        }
        for (k, v) in &self.metadata {
            writeln!(out, "# {k},{}", fmt_num(*v))?;
        }
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("log:1e-12:1e-3:10").unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 1e-12);
        assert_eq!(g[9], 1e-3);
        assert_eq!(parse_grid("1e6, 1e8,4e10").unwrap(), [1e6, 1e8, 4e10]);
        assert_eq!(parse_grid("5").unwrap(), [5.0]);
        for bad in ["", "1,x", "log:1:2", "log:2:1:5", "1e8,1e6", "-1,2", "log:1:2:2000000", "0"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_format_and_validation() {
        let mut c = Csv::new(vec!["t".into(), "lambda".into()]);
        c.metadata("bulk_heating_bound", 4e10);
        c.push(vec![1e-6, 5e-7]);
        let mut out = Vec::new();
        c.write(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "# bulk_heating_bound,4.00000000e10\nt,lambda\n1.00000000e-6,5.00000000e-7\n"
        );
        c.push(vec![1.0, f64::NAN]);
        assert!(matches!(c.write(&mut Vec::new()), Err(CliError::InvalidOutput(_))));
        let mut neg = Csv::new(vec!["x".into()]);
        neg.push(vec![-1.0]);
        assert!(neg.write(&mut Vec::new()).is_err());
    }
}
