//! Plain tables and their text renderings.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(Self::Tsv),
            "csv" => Ok(Self::Csv),
            "md" | "markdown" => Ok(Self::Md),
            other => Err(format!(
                "unknown format '{other}' (expected tsv, csv or md)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tsv => "tsv",
            Self::Csv => "csv",
            Self::Md => "md",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Render the table. `comment` becomes a leading comment line.
    pub fn render(&self, format: Format, comment: Option<&str>) -> String {
        let mut out = String::new();
        match format {
            Format::Tsv => {
                if let Some(c) = comment {
                    out.push_str(&format!("# {c}\n"));
                }
                for line in std::iter::once(&self.columns).chain(&self.rows) {
                    let cells: Vec<String> =
                        line.iter().map(|c| c.replace(['\t', '\n'], " ")).collect();
                    out.push_str(&cells.join("\t"));
                    out.push('\n');
                }
            }
            Format::Csv => {
                if let Some(c) = comment {
                    out.push_str(&format!("# {c}\n"));
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                for line in std::iter::once(&self.columns).chain(&self.rows) {
                    w.write_record(line).expect("writing to memory");
                }
                let bytes = w.into_inner().expect("flushing to memory");
                out.push_str(&String::from_utf8(bytes).expect("csv of utf-8 input is utf-8"));
            }
            Format::Md => {
                if let Some(c) = comment {
                    out.push_str(&format!("<!-- {c} -->\n"));
                }
                let esc = |s: &String| s.replace('|', "\\|");
                let row = |cells: &[String]| {
                    format!(
                        "| {} |\n",
                        cells.iter().map(esc).collect::<Vec<_>>().join(" | ")
                    )
                };
                out.push_str(&row(&self.columns));
                out.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
                for r in &self.rows {
                    out.push_str(&row(r));
                }
            }
        }
        out
    }
}

/// Fixed-point text with `digits` decimals and no negative zero.
pub fn fixed(value: f64, digits: usize) -> String {
    let s = format!("{value:.digits$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// Shortest text that parses back to `value`; `NA` when absent.
pub fn exact(value: Option<f64>) -> String {
    match value {
        Some(0.0) => "0".into(),
        Some(v) if (1e-4..1e15).contains(&v.abs()) => v.to_string(),
        Some(v) => format!("{v:e}"),
        None => "NA".into(),
    }
}
