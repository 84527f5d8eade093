//! CSV and JSON writers, and a CSV reader for re-loading results.
//!
//! CSV layout: `# key = value` lines for the resolved config, `# meta.*`
//! lines for run results, then a header row and data rows. Floats carry 17
//! significant digits, so a reload is bit-exact.

use serde_json::{json, Map, Value};

use super::config::Format;
use crate::integrator::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // serde_json writes shortest round-trip decimals; non-finite values become strings.
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
        }
    }
}

/// `{:.16e}`: 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }
}

/// A table plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub config: Vec<(String, String)>,
    pub meta: Vec<(String, String)>,
    pub table: Table,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for (k, v) in &self.meta {
            out.push_str(&format!("# meta.{k} = {v}\n"));
        }
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let obj = |pairs: &[(String, String)]| {
            Value::Object(pairs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
        };
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "config": obj(&self.config),
            "meta": obj(&self.meta),
            "columns": self.table.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values are always serialisable");
        s.push('\n');
        s
    }

    /// Inverse of [`to_csv`](Self::to_csv). Cells that parse as `f64` become
    /// numbers.
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut doc = Document::default();
        let mut lines = text.lines().enumerate();
        let header = loop {
            let Some((n, line)) = lines.next() else { return Err("missing header row".into()) };
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| format!("line {}: comment is not `# key = value`", n + 1))?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                match k.strip_prefix("meta.") {
                    Some(m) => doc.meta.push((m.to_string(), v)),
                    None => doc.config.push((k, v)),
                }
            } else {
                break line;
            }
        };
        doc.table.columns = header.split(',').map(str::to_string).collect();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let row: Vec<Cell> = line
                .split(',')
                .map(|c| c.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(c.to_string())))
                .collect();
            if row.len() != doc.table.columns.len() {
                return Err(format!("line {}: {} cells, header has {}", n + 1, row.len(), doc.table.columns.len()));
            }
            doc.table.rows.push(row);
        }
        Ok(doc)
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let pairs = |key: &str| -> Vec<(String, String)> {
            v[key]
                .as_object()
                .map(|m| m.iter().map(|(k, v)| (k.clone(), v.as_str().unwrap_or_default().to_string())).collect())
                .unwrap_or_default()
        };
        let columns = v["columns"]
            .as_array()
            .ok_or("missing columns")?
            .iter()
            .map(|c| c.as_str().unwrap_or_default().to_string())
            .collect();
        let rows = v["rows"]
            .as_array()
            .ok_or("missing rows")?
            .iter()
            .map(|r| {
                r.as_array()
                    .map(|cells| {
                        cells
                            .iter()
                            .map(|c| match c {
                                Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                                Value::String(s) => s.parse().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.clone())),
                                other => Cell::Text(other.to_string()),
                            })
                            .collect()
                    })
                    .unwrap_or_default()
            })
            .collect();
        Ok(Document { config: pairs("config"), meta: pairs("meta"), table: Table { columns, rows } })
    }
}

/// `t, theta_1..K, phi_1..K, energy, gamma2, accumulated_leakage`.
pub fn trajectory_table(traj: &Trajectory, k: usize) -> Table {
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=k).map(|i| format!("theta_{i}")));
    columns.extend((1..=k).map(|i| format!("phi_{i}")));
    columns.extend(["energy", "gamma2", "accumulated_leakage"].map(String::from));
    let rows = (0..traj.len())
        .map(|n| {
            let s = &traj.states[n];
            std::iter::once(traj.times[n])
                .chain(s.theta.iter().copied())
                .chain(s.phi.iter().copied())
                .chain([traj.energy[n], traj.gamma2[n], traj.accumulated_leakage[n]])
                .map(Cell::Num)
                .collect()
        })
        .collect();
    Table { columns, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        Document {
            config: vec![("model.K".into(), "1".into())],
            meta: vec![("termination".into(), "completed".into())],
            table: Table {
                columns: vec!["t".into(), "x".into(), "cause".into()],
                rows: vec![
                    vec![Cell::Num(0.0), Cell::Num(0.1 + 0.2), Cell::Text("completed".into())],
                    vec![Cell::Num(1e-300), Cell::Num(-std::f64::consts::PI), Cell::Text("pole_event".into())],
                ],
            },
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let d = sample();
        assert_eq!(Document::from_csv(&d.to_csv()).unwrap(), d);
        assert_eq!(Document::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
    }
}
