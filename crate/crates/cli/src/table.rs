//! Numeric CSV tables with `# key=value` header comments.

use crate::experiment::{NxiRow, RunResult, SpaceRow, TimeRow};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    /// Missing values are NaN.
    pub rows: Vec<Vec<f64>>,
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

impl CsvTable {
    pub fn emit(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Parse(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_value(x))).map_err(csv_err)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Parse(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Parse(e.to_string()))?);
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut meta = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..]
                .trim_start()
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("bad header line `{line}`")))?;
            meta.push((k.to_string(), v.to_string()));
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> =
            rdr.headers().map_err(|e| CliError::Parse(e.to_string()))?.iter().map(str::to_string).collect();
        if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
            return Err(CliError::Parse("missing column header".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| CliError::Parse(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>().map_err(|_| CliError::Parse(format!("`{f}` is not a number"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(CsvTable { meta, columns, rows })
    }

    pub fn from_run(r: &RunResult) -> Self {
        let with_energy = r.samples.iter().any(|s| s.energy.is_some());
        let mut columns = vec!["t".to_string(), "rel_l2_error".into()];
        if with_energy {
            columns.push("energy".into());
        }
        let rows = r
            .samples
            .iter()
            .map(|s| {
                let mut row = vec![s.t, s.rel_error.unwrap_or(f64::NAN)];
                if with_energy {
                    row.push(s.energy.unwrap_or(f64::NAN));
                }
                row
            })
            .collect();
        CsvTable { meta: r.config.to_pairs(), columns, rows }
    }

    pub fn from_space(base: &crate::ExperimentConfig, rows: &[SpaceRow]) -> Self {
        CsvTable {
            meta: base.to_pairs(),
            columns: ["order", "level", "max_error", "rate"].map(String::from).to_vec(),
            rows: rows
                .iter()
                .map(|r| vec![r.order as f64, r.level as f64, r.max_error, r.rate.unwrap_or(f64::NAN)])
                .collect(),
        }
    }

    pub fn from_time(base: &crate::ExperimentConfig, rows: &[TimeRow]) -> Self {
        CsvTable {
            meta: base.to_pairs(),
            columns: ["dt", "max_error", "rate"].map(String::from).to_vec(),
            rows: rows.iter().map(|r| vec![r.dt, r.max_error, r.rate.unwrap_or(f64::NAN)]).collect(),
        }
    }

    pub fn from_nxi(base: &crate::ExperimentConfig, rows: &[NxiRow]) -> Self {
        CsvTable {
            meta: base.to_pairs(),
            columns: ["n_xi", "max_error"].map(String::from).to_vec(),
            rows: rows.iter().map(|r| vec![r.n_xi as f64, r.max_error]).collect(),
        }
    }
}
