//! Output formatting shared by the engines and the CLI.
//!
//! All emitted floats use a fixed 12-significant-digit scientific form so
//! that identical runs produce byte-identical files.

/// Format with 12 significant digits, normalizing negative zero.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.11e}")
}

/// A small CSV table with a header row; rows are rendered as they are added.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    lines: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &str) -> Self {
        CsvTable {
            lines: vec![header.to_string()],
        }
    }

    pub fn push_raw(&mut self, line: String) {
        self.lines.push(line);
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        self.lines.push(
            values
                .iter()
                .map(|v| format_sig12(*v))
                .collect::<Vec<_>>()
                .join(","),
        );
    }

    pub fn push_cells(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn to_string_lossy(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}
