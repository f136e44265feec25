//! Covariate summary records read from and written to CSV.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use covprio_core::{pool_fixed, Covariate, NormalSummary};

use crate::error::CliError;

/// Column names in file order. `new_se` is optional.
pub const REQUIRED_COLUMNS: [&str; 7] = [
    "id",
    "label",
    "sublabel",
    "discovery_beta",
    "discovery_se",
    "replication_beta",
    "replication_se",
];
pub const OPTIONAL_NEW_SE: &str = "new_se";

/// The example data set shipped with the tool.
pub const BUNDLED_CSV: &str = include_str!("../data/crp_gwas.csv");

/// Which panels make up the evidence before the new study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvidenceSource {
    #[default]
    ReplicationOnly,
    /// Fixed-effects pooling of the discovery and replication panels.
    Pooled,
}

impl EvidenceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ReplicationOnly => "replication_only",
            Self::Pooled => "pooled",
        }
    }
}

impl fmt::Display for EvidenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvidenceSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "replication_only" => Ok(Self::ReplicationOnly),
            "pooled" => Ok(Self::Pooled),
            other => Err(format!(
                "unknown evidence source '{other}' (expected replication_only or pooled)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovariateRecord {
    pub id: String,
    pub label: String,
    pub sublabel: String,
    pub discovery_beta: f64,
    pub discovery_se: f64,
    pub replication_beta: f64,
    pub replication_se: f64,
    /// Standard error expected from the new study; the replication SE when absent.
    pub new_se: Option<f64>,
}

impl CovariateRecord {
    pub fn new_study_se(&self) -> f64 {
        self.new_se.unwrap_or(self.replication_se)
    }

    /// Evidence state before the new study.
    pub fn stage1(&self, source: EvidenceSource) -> covprio_core::Result<NormalSummary> {
        let replication = NormalSummary::from_se(self.replication_beta, self.replication_se)?;
        match source {
            EvidenceSource::ReplicationOnly => Ok(replication),
            EvidenceSource::Pooled => {
                let discovery = NormalSummary::from_se(self.discovery_beta, self.discovery_se)?;
                pool_fixed(&[discovery, replication])
            }
        }
    }

    pub fn to_covariate(&self, source: EvidenceSource) -> covprio_core::Result<Covariate> {
        let se = self.new_study_se();
        Covariate::new(self.id.clone(), self.stage1(source)?, se * se)
    }
}

fn field_error(line: u64, msg: impl Into<String>) -> CliError {
    CliError::Input(format!("line {line}: {}", msg.into()))
}

fn parse_number(raw: &str, column: &str, line: u64, positive: bool) -> Result<f64, CliError> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| field_error(line, format!("{column}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(field_error(
            line,
            format!("{column}: '{raw}' is not finite"),
        ));
    }
    if positive && v <= 0.0 {
        return Err(field_error(line, format!("{column}: {v} must be positive")));
    }
    Ok(v)
}

/// Parse records from CSV text. Errors carry the 1-based file line.
pub fn read_records<R: Read>(reader: R) -> Result<Vec<CovariateRecord>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(CliError::Input("no records".into()));
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 7];
    let missing: Vec<&str> = REQUIRED_COLUMNS
        .iter()
        .zip(idx.iter_mut())
        .filter_map(|(name, slot)| match col(name) {
            Some(i) => {
                *slot = i;
                None
            }
            None => Some(*name),
        })
        .collect();
    if !missing.is_empty() {
        return Err(field_error(
            1,
            format!("missing required column(s): {}", missing.join(", ")),
        ));
    }
    let new_se_idx = col(OPTIONAL_NEW_SE);

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            field_error(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let get = |i: usize| row.get(i).unwrap_or("");
        let id = get(idx[0]).to_string();
        if id.is_empty() {
            return Err(field_error(line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(field_error(line, format!("duplicate id '{id}'")));
        }
        let new_se = match new_se_idx.map(get) {
            Some(raw) if !raw.is_empty() => Some(parse_number(raw, OPTIONAL_NEW_SE, line, true)?),
            _ => None,
        };
        out.push(CovariateRecord {
            id,
            label: get(idx[1]).to_string(),
            sublabel: get(idx[2]).to_string(),
            discovery_beta: parse_number(get(idx[3]), "discovery_beta", line, false)?,
            discovery_se: parse_number(get(idx[4]), "discovery_se", line, true)?,
            replication_beta: parse_number(get(idx[5]), "replication_beta", line, false)?,
            replication_se: parse_number(get(idx[6]), "replication_se", line, true)?,
            new_se,
        });
    }
    if out.is_empty() {
        return Err(CliError::Input("no records".into()));
    }
    Ok(out)
}

pub fn load_records(path: &Path) -> Result<Vec<CovariateRecord>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    read_records(file).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn bundled_records() -> Vec<CovariateRecord> {
    read_records(BUNDLED_CSV.as_bytes()).expect("bundled data parses")
}

/// Write records as CSV. Numbers use the shortest representation that
/// parses back to the same value, so reading the output is lossless.
pub fn write_records<W: Write>(records: &[CovariateRecord], writer: W) -> Result<(), CliError> {
    let with_new_se = records.iter().any(|r| r.new_se.is_some());
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut header: Vec<&str> = REQUIRED_COLUMNS.to_vec();
    if with_new_se {
        header.push(OPTIONAL_NEW_SE);
    }
    w.write_record(&header).map_err(io)?;
    for r in records {
        let mut row = vec![
            r.id.clone(),
            r.label.clone(),
            r.sublabel.clone(),
            r.discovery_beta.to_string(),
            r.discovery_se.to_string(),
            r.replication_beta.to_string(),
            r.replication_se.to_string(),
        ];
        if with_new_se {
            row.push(r.new_se.map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
