//! Sweep records and their CSV / JSON / plot-data persistence.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Column order of every sweep CSV.
pub const CSV_COLUMNS: [&str; 12] = [
    "lambda",
    "alpha",
    "eps_numeric",
    "eps_uniform_best",
    "eps_wilczek",
    "eps_analytic_half_flux",
    "delta_eps",
    "delta_eps_asymptotic",
    "residual",
    "converged",
    "n_points",
    "wall_time_s",
];

/// One solved `(λ, α)` point with its reference branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub alpha: f64,
    pub eps_numeric: f64,
    /// Lowest plane-wave energy over all windings.
    pub eps_uniform_best: f64,
    /// `ε(0) + α²/2`; absent when the zero-flux reference did not converge.
    pub eps_wilczek: Option<f64>,
    /// Closed form, only at half flux.
    pub eps_analytic_half_flux: Option<f64>,
    /// `ε(α) − ε(0)`.
    pub delta_eps: Option<f64>,
    pub delta_eps_asymptotic: f64,
    pub residual: f64,
    pub converged: bool,
    pub n_points: usize,
    /// Zero unless timing was requested, which keeps tables byte-reproducible.
    pub wall_time_s: f64,
}

/// Provenance written next to every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub timestamp_iso8601: String,
    pub config_hash: String,
}

impl TableMetadata {
    pub fn new<C: Serialize>(experiment: &str, config: &C, seed: u64) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        Ok(Self {
            experiment: experiment.to_owned(),
            config_hash: config_hash(&config)?,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp_iso8601: timestamp_iso8601(),
        })
    }
}

/// Hex SHA-256 of the compact JSON form of `config`.
pub fn config_hash(config: &serde_json::Value) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Current UTC time, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp_iso8601() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    pinned
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub metadata: TableMetadata,
    pub records: Vec<SweepRecord>,
}

fn key_eq(a: &SweepRecord, b: &SweepRecord) -> bool {
    a.lambda.to_bits() == b.lambda.to_bits()
        && a.alpha.to_bits() == b.alpha.to_bits()
        && a.n_points == b.n_points
}

impl SweepTable {
    pub fn new(metadata: TableMetadata) -> Self {
        Self {
            metadata,
            records: Vec::new(),
        }
    }

    /// Appends `record`, rejecting a second record for the same `(λ, α, N)`.
    pub fn push(&mut self, record: SweepRecord) -> Result<()> {
        if self.records.iter().any(|r| key_eq(r, &record)) {
            return Err(Error::Contract(format!(
                "duplicate record for lambda={}, alpha={}, n_points={}",
                record.lambda, record.alpha, record.n_points
            )));
        }
        self.records.push(record);
        Ok(())
    }

    /// Orders records by `(λ, α, N)`.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| {
            a.lambda
                .total_cmp(&b.lambda)
                .then(a.alpha.total_cmp(&b.alpha))
                .then(a.n_points.cmp(&b.n_points))
        });
    }

    pub fn converged(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| r.converged)
    }

    pub fn find(&self, lambda: f64, alpha: f64) -> Option<&SweepRecord> {
        self.records
            .iter()
            .find(|r| r.lambda == lambda && r.alpha == alpha)
    }

    /// RFC 4180 text with CRLF line ends; reals carry 17 significant digits.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for r in &self.records {
            w.write_record([
                real(r.lambda),
                real(r.alpha),
                real(r.eps_numeric),
                real(r.eps_uniform_best),
                optional(r.eps_wilczek),
                optional(r.eps_analytic_half_flux),
                optional(r.delta_eps),
                real(r.delta_eps_asymptotic),
                real(r.residual),
                r.converged.to_string(),
                r.n_points.to_string(),
                real(r.wall_time_s),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Contract(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_csv_string()?.as_bytes())
    }

    /// Writes the metadata sidecar as pretty JSON.
    pub fn write_json_sidecar(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.metadata)?;
        text.push('\n');
        write_file(path, text.as_bytes())
    }

    /// Parses records back from [`Self::to_csv_string`] output.
    pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
        if header != CSV_COLUMNS {
            return Err(Error::Contract(format!("unexpected csv header {header:?}")));
        }
        rd.records()
            .map(|row| {
                let row = row?;
                let f = |i: usize| parse_real(&row[i]);
                let o = |i: usize| -> Result<Option<f64>> {
                    if row[i].is_empty() {
                        Ok(None)
                    } else {
                        parse_real(&row[i]).map(Some)
                    }
                };
                Ok(SweepRecord {
                    lambda: f(0)?,
                    alpha: f(1)?,
                    eps_numeric: f(2)?,
                    eps_uniform_best: f(3)?,
                    eps_wilczek: o(4)?,
                    eps_analytic_half_flux: o(5)?,
                    delta_eps: o(6)?,
                    delta_eps_asymptotic: f(7)?,
                    residual: f(8)?,
                    converged: row[9]
                        .parse()
                        .map_err(|_| Error::Contract(format!("bad flag {:?}", &row[9])))?,
                    n_points: row[10]
                        .parse()
                        .map_err(|_| Error::Contract(format!("bad count {:?}", &row[10])))?,
                    wall_time_s: f(11)?,
                })
            })
            .collect()
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn parse_real(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Contract(format!("bad number {s:?}")))
}

/// Two-column whitespace-delimited curve, one point per line.
pub fn plot_data_string(header: &str, points: &[(f64, f64)]) -> String {
    let mut s = format!("# {header}\n");
    for (x, y) in points {
        s.push_str(&format!("{x:.16e} {y:.16e}\n"));
    }
    s
}

pub fn write_plot_data(path: &Path, header: &str, points: &[(f64, f64)]) -> Result<()> {
    write_file(path, plot_data_string(header, points).as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(alpha: f64) -> SweepRecord {
        SweepRecord {
            lambda: 5.0,
            alpha,
            eps_numeric: -1.0416704344371301,
            eps_uniform_best: 0.5 * alpha * alpha - 5.0 / (4.0 * std::f64::consts::PI),
            eps_wilczek: Some(-0.9166704344371301),
            eps_analytic_half_flux: None,
            delta_eps: Some(0.1),
            delta_eps_asymptotic: -3.0e-6,
            residual: 4.2e-12,
            converged: true,
            n_points: 256,
            wall_time_s: 0.0,
        }
    }

    fn table() -> SweepTable {
        let meta = TableMetadata {
            experiment: "test".into(),
            config: serde_json::json!({"n": 1}),
            seed: 42,
            version: "0".into(),
            timestamp_iso8601: "1970-01-01T00:00:00Z".into(),
            config_hash: String::new(),
        };
        SweepTable::new(meta)
    }

    #[test]
    fn csv_layout() {
        let mut t = table();
        t.push(record(0.5)).unwrap();
        let text = t.to_csv_string().unwrap();
        let mut lines = text.split("\r\n");
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let row = lines.next().unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 12);
        assert_eq!(cells[0], "5.0000000000000000e0");
        assert_eq!(cells[5], "");
        assert_eq!(cells[9], "true");
        assert_eq!(cells[10], "256");
        assert_eq!(lines.next(), Some(""));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = table();
        t.push(record(0.1)).unwrap();
        t.push(record(1.0 / 3.0)).unwrap();
        let back = SweepTable::records_from_csv(&t.to_csv_string().unwrap()).unwrap();
        assert_eq!(back, t.records);
    }

    #[test]
    fn duplicates_rejected() {
        let mut t = table();
        t.push(record(0.25)).unwrap();
        assert!(t.push(record(0.25)).is_err());
        let mut other = record(0.25);
        other.n_points = 512;
        t.push(other).unwrap();
    }

    #[test]
    fn hash_is_stable() {
        let v = serde_json::json!({"a": 1, "b": [1.5, 2.0]});
        assert_eq!(config_hash(&v).unwrap(), config_hash(&v.clone()).unwrap());
        assert_eq!(config_hash(&v).unwrap().len(), 64);
    }

    #[test]
    fn plot_data_two_columns() {
        let s = plot_data_string("x y", &[(0.0, 1.0), (1.0, -2.5)]);
        let rows: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.split_whitespace().count() == 2));
    }
}
