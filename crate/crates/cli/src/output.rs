//! CSV rendering with a fixed significant-digit float format.

/// Formats a float with `sig` significant digits in scientific notation.
/// Zero prints as `0` and NaN as `na`, so absent or exactly-zero quantities
/// stay recognisable without a float parse.
pub fn fmt_float(v: f64, sig: usize) -> String {
    if v.is_nan() {
        "na".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{:.*e}", sig.max(1) - 1, v)
    }
}

/// One CSV document: a fixed header plus data rows in insertion order.
pub struct Table {
    lines: Vec<String>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table { lines: vec![header.to_string()] }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.lines.push(cells.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
