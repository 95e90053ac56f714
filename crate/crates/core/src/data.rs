//! Right-censored survival data with an administrative censoring time.
//!
//! Input files are CSV with a header row. The `time` and `event` columns are
//! required; every other column is read as a real-valued covariate in file
//! order.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
    pub covariates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub observations: Vec<Observation>,
    /// The administrative censoring time `y+`. No observation exceeds it.
    pub admin_censor_time: f64,
    pub covariate_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub p: usize,
    pub events: usize,
    pub censored_early: usize,
    pub censored_admin: usize,
    pub censoring_rate: f64,
}

impl Dataset {
    /// Builds a dataset, validating every observation against `admin_censor_time`.
    pub fn new(
        observations: Vec<Observation>,
        admin_censor_time: f64,
        covariate_names: Vec<String>,
    ) -> Result<Self> {
        if !(admin_censor_time > 0.0 && admin_censor_time.is_finite()) {
            return Err(Error::invalid(format!(
                "administrative censoring time must be positive and finite, got {admin_censor_time}"
            )));
        }
        let p = covariate_names.len();
        for (i, obs) in observations.iter().enumerate() {
            validate(obs, admin_censor_time, p).map_err(|message| Error::Data {
                line: i + 2,
                message,
            })?;
        }
        Ok(Self {
            observations,
            admin_censor_time,
            covariate_names,
        })
    }

    pub fn n(&self) -> usize {
        self.observations.len()
    }

    pub fn p(&self) -> usize {
        self.covariate_names.len()
    }

    pub fn summary(&self) -> DatasetSummary {
        dataset_summary(self)
    }

    /// Observations whose covariates satisfy `keep`, e.g. one trial arm.
    pub fn filter(&self, keep: impl Fn(&Observation) -> bool) -> Dataset {
        Dataset {
            observations: self.observations.iter().filter(|o| keep(o)).cloned().collect(),
            admin_censor_time: self.admin_censor_time,
            covariate_names: self.covariate_names.clone(),
        }
    }

    /// Keeps only the named covariate columns, in the given order.
    pub fn select_covariates(&self, names: &[String]) -> Result<Dataset> {
        let idx = names
            .iter()
            .map(|n| {
                self.covariate_names
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::MissingColumn(n.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            observations: self
                .observations
                .iter()
                .map(|o| Observation {
                    time: o.time,
                    event: o.event,
                    covariates: idx.iter().map(|&i| o.covariates[i]).collect(),
                })
                .collect(),
            admin_censor_time: self.admin_censor_time,
            covariate_names: names.to_vec(),
        })
    }

    /// Writes the dataset in the same CSV layout accepted by [`load_dataset`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["time".to_string(), "event".to_string()];
        header.extend(self.covariate_names.iter().cloned());
        w.write_record(&header)?;
        for obs in &self.observations {
            let mut row = vec![obs.time.to_string(), u8::from(obs.event).to_string()];
            row.extend(obs.covariates.iter().map(|c| c.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

fn validate(obs: &Observation, y_plus: f64, p: usize) -> std::result::Result<(), String> {
    if !obs.time.is_finite() || obs.time <= 0.0 {
        return Err(format!("non-positive time {}", obs.time));
    }
    if obs.time > y_plus {
        return Err(format!(
            "time {} exceeds administrative censoring time {y_plus}",
            obs.time
        ));
    }
    if obs.time == y_plus && obs.event {
        return Err(format!(
            "event recorded at the administrative censoring time {y_plus}; must be censored"
        ));
    }
    if obs.covariates.len() != p {
        return Err(format!(
            "expected {p} covariates, found {}",
            obs.covariates.len()
        ));
    }
    if obs.covariates.iter().any(|c| !c.is_finite()) {
        return Err("non-finite covariate".into());
    }
    Ok(())
}

/// Loads and validates a CSV survival file.
pub fn load_dataset(path: impl AsRef<Path>, admin_censor_time: f64) -> Result<Dataset> {
    let path = path.as_ref();
    let mut buf = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    parse_dataset(buf.as_bytes(), admin_censor_time)
}

/// Parses CSV survival data from any reader.
pub fn parse_dataset<R: Read>(reader: R, admin_censor_time: f64) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let time_col = find("time")?;
    let event_col = find("event")?;
    let cov_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != time_col && c != event_col)
        .collect();
    let covariate_names = cov_cols.iter().map(|&c| headers[c].to_string()).collect();

    let mut observations = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let bad = |message: String| Error::Data { line, message };
        let field = |c: usize| record.get(c).unwrap_or("");
        let time: f64 = field(time_col)
            .parse()
            .map_err(|_| bad(format!("cannot parse time `{}`", field(time_col))))?;
        let event = match field(event_col) {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("event must be 0 or 1, got `{other}`"))),
        };
        let covariates = cov_cols
            .iter()
            .map(|&c| {
                field(c)
                    .parse::<f64>()
                    .map_err(|_| bad(format!("cannot parse covariate `{}`", field(c))))
            })
            .collect::<Result<Vec<_>>>()?;
        observations.push(Observation {
            time,
            event,
            covariates,
        });
    }
    Dataset::new(observations, admin_censor_time, covariate_names)
}

pub fn dataset_summary(data: &Dataset) -> DatasetSummary {
    let y_plus = data.admin_censor_time;
    let mut s = DatasetSummary {
        n: data.n(),
        p: data.p(),
        events: 0,
        censored_early: 0,
        censored_admin: 0,
        censoring_rate: 0.0,
    };
    for obs in &data.observations {
        match (obs.event, obs.time >= y_plus) {
            (true, _) => s.events += 1,
            (false, true) => s.censored_admin += 1,
            (false, false) => s.censored_early += 1,
        }
    }
    if s.n > 0 {
        s.censoring_rate = (s.censored_early + s.censored_admin) as f64 / s.n as f64;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, y_plus: f64) -> Result<Dataset> {
        parse_dataset(text.as_bytes(), y_plus)
    }

    #[test]
    fn minimal_file() {
        let d = parse("time,event\n0.5,1\n1.2,1\n3.0,0\n", 3.0).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.p(), 0);
        assert_eq!(
            d.observations.iter().map(|o| o.event).collect::<Vec<_>>(),
            vec![true, true, false]
        );
    }

    #[test]
    fn covariates_in_column_order() {
        let d = parse("a,time,b,event\n1,0.5,2,1\n", 1.0).unwrap();
        assert_eq!(d.covariate_names, vec!["a", "b"]);
        assert_eq!(d.observations[0].covariates, vec![1.0, 2.0]);
    }

    #[test]
    fn rejects_non_positive_time() {
        let err = parse("time,event\n-1,1\n", 3.0).unwrap_err();
        assert!(err.to_string().contains("non-positive time"), "{err}");
        assert!(parse("time,event\n0,0\n", 3.0).is_err());
    }

    #[test]
    fn rejects_time_beyond_admin_censoring() {
        let err = parse("time,event\n3.5,0\n", 3.0).unwrap_err();
        assert!(err.to_string().contains("exceeds"), "{err}");
    }

    #[test]
    fn event_at_admin_time_is_an_error() {
        assert!(parse("time,event\n3.0,1\n", 3.0).is_err());
    }

    #[test]
    fn missing_and_malformed_columns() {
        assert!(matches!(
            parse("time,status\n1,1\n", 3.0),
            Err(Error::MissingColumn(c)) if c == "event"
        ));
        assert!(parse("time,event\n1,2\n", 3.0).is_err());
    }

    #[test]
    fn summary_counts() {
        let empty = Dataset::new(vec![], 1.0, vec![]).unwrap();
        let s = empty.summary();
        assert_eq!((s.n, s.events, s.censored_early, s.censored_admin), (0, 0, 0, 0));
        assert_eq!(s.censoring_rate, 0.0);

        let all_events: Vec<_> = (1..=10)
            .map(|i| Observation {
                time: i as f64 * 0.1,
                event: true,
                covariates: vec![],
            })
            .collect();
        let s = Dataset::new(all_events, 2.0, vec![]).unwrap().summary();
        assert_eq!(s.events, 10);
        assert_eq!(s.censoring_rate, 0.0);
    }

    #[test]
    fn write_then_reload_is_identical() {
        let d = parse("time,event,x\n0.123456789,1,0.5\n2.5,0,-1.25\n3,0,1e-3\n", 3.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = parse_dataset(buf.as_slice(), 3.0).unwrap();
        assert_eq!(d, back);
    }
}
