use super::split::Setup;
use crate::error::{Error, Result};
use crate::learn::Family;
use crate::pipeline::{Block, DatasetVariant};
use crate::targets::ClassLabel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

/// Scores of one (setup, dataset, model) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub setup: Setup,
    pub dataset: DatasetVariant,
    pub model: Family,
    /// Mean cross-validated accuracy.
    pub mean: f64,
    /// Population variance of the fold accuracies.
    pub variance: f64,
    pub test_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub n_train: usize,
    pub n_test: usize,
    pub fingerprint: String,
}

/// Fingerprint of what one stage fitted, and of the rows it fitted on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub setup: Setup,
    pub dataset: DatasetVariant,
    pub stage: String,
    pub rows_hash: String,
    pub fingerprint: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_fingerprint: String,
    pub seed: u64,
    pub cells: Vec<CellResult>,
    pub artifacts: Vec<ArtifactRecord>,
}

const HEADER: [&str; 11] = [
    "setup", "dataset", "model", "mean", "variance", "test_accuracy", "n_train", "n_test", "fingerprint",
    "fold_accuracies", "folds",
];

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: "<report>".into(), line, column: 1, message: message.into() }
}

impl ExperimentReport {
    /// Comment lines carry the metadata and artifacts; the CSV body holds one
    /// row per cell with fold accuracies joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config: {}", self.config_fingerprint);
        let _ = writeln!(s, "# seed: {}", self.seed);
        for a in &self.artifacts {
            let _ = writeln!(s, "# artifact: {} {} {} {} {}", a.setup, a.dataset, a.stage, a.rows_hash, a.fingerprint);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).expect("in-memory write");
        for c in &self.cells {
            let folds: Vec<String> = c.fold_accuracies.iter().map(|v| v.to_string()).collect();
            w.write_record([
                c.setup.to_string(),
                c.dataset.to_string(),
                c.model.to_string(),
                c.mean.to_string(),
                c.variance.to_string(),
                c.test_accuracy.to_string(),
                c.n_train.to_string(),
                c.n_test.to_string(),
                c.fingerprint.clone(),
                folds.join(";"),
                c.fold_accuracies.len().to_string(),
            ])
            .expect("in-memory write");
        }
        s.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut config_fingerprint = None;
        let mut seed = None;
        let mut artifacts = Vec::new();
        let mut body = String::new();
        let mut body_start = 0;
        for (i, line) in text.as_bytes().lines().enumerate() {
            let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
            if let Some(rest) = line.strip_prefix("# config: ") {
                config_fingerprint = Some(rest.to_string());
            } else if let Some(rest) = line.strip_prefix("# seed: ") {
                seed = Some(rest.parse::<u64>().map_err(|e| parse_err(i + 1, e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("# artifact: ") {
                let f: Vec<&str> = rest.split(' ').collect();
                if f.len() != 5 {
                    return Err(parse_err(i + 1, "artifact line needs 5 fields"));
                }
                artifacts.push(ArtifactRecord {
                    setup: f[0].parse()?,
                    dataset: f[1].parse()?,
                    stage: f[2].into(),
                    rows_hash: f[3].into(),
                    fingerprint: f[4].into(),
                });
            } else {
                if body.is_empty() {
                    body_start = i;
                }
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut cells = Vec::new();
        let mut r = csv::Reader::from_reader(body.as_bytes());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = body_start + i + 2;
            let f = |k: usize| rec.get(k).ok_or_else(|| parse_err(line, "missing field"));
            let num = |k: usize| -> Result<f64> { f(k)?.parse::<f64>().map_err(|e| parse_err(line, e.to_string())) };
            let int = |k: usize| -> Result<usize> { f(k)?.parse::<usize>().map_err(|e| parse_err(line, e.to_string())) };
            let folds_text = f(9)?;
            let fold_accuracies = if folds_text.is_empty() {
                Vec::new()
            } else {
                folds_text
                    .split(';')
                    .map(|v| v.parse::<f64>().map_err(|e| parse_err(line, e.to_string())))
                    .collect::<Result<Vec<_>>>()?
            };
            if fold_accuracies.len() != int(10)? {
                return Err(parse_err(line, "fold count mismatch"));
            }
            cells.push(CellResult {
                setup: f(0)?.parse()?,
                dataset: f(1)?.parse()?,
                model: f(2)?.parse()?,
                mean: num(3)?,
                variance: num(4)?,
                test_accuracy: num(5)?,
                n_train: int(6)?,
                n_test: int(7)?,
                fingerprint: f(8)?.to_string(),
                fold_accuracies,
            });
        }
        Ok(ExperimentReport {
            config_fingerprint: config_fingerprint.ok_or_else(|| parse_err(1, "missing config line"))?,
            seed: seed.ok_or_else(|| parse_err(2, "missing seed line"))?,
            cells,
            artifacts,
        })
    }

    pub fn cell(&self, setup: Setup, dataset: DatasetVariant, model: Family) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.setup == setup && c.dataset == dataset && c.model == model)
    }

    /// Cell with the highest CV mean for each setup (first one on ties).
    pub fn best_per_setup(&self) -> BTreeMap<Setup, &CellResult> {
        let mut best: BTreeMap<Setup, &CellResult> = BTreeMap::new();
        for c in &self.cells {
            match best.get(&c.setup) {
                Some(b) if b.mean >= c.mean => {}
                _ => {
                    best.insert(c.setup, c);
                }
            }
        }
        best
    }

    /// Mean fold variance over setups for each (model, dataset).
    pub fn average_variances(&self) -> Vec<(Family, DatasetVariant, f64)> {
        let mut acc: BTreeMap<(Family, DatasetVariant), (f64, usize)> = BTreeMap::new();
        for c in &self.cells {
            let e = acc.entry((c.model, c.dataset)).or_insert((0.0, 0));
            e.0 += c.variance;
            e.1 += 1;
        }
        acc.into_iter().map(|((m, d), (s, n))| (m, d, s / n as f64)).collect()
    }
}

fn ordered<T: Ord + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = items.collect();
    v.sort();
    v.dedup();
    v
}

/// Text tables: per setup, CV mean (variance) per model and dataset with the
/// best cell starred, the held-out accuracies, then average variances.
pub fn render_report(r: &ExperimentReport) -> String {
    let setups = ordered(r.cells.iter().map(|c| c.setup));
    let datasets = ordered(r.cells.iter().map(|c| c.dataset));
    let models = ordered(r.cells.iter().map(|c| c.model));
    let best = r.best_per_setup();
    let mut s = String::new();
    let _ = writeln!(s, "config {}  seed {}", r.config_fingerprint, r.seed);
    for &setup in &setups {
        let _ = writeln!(s, "\nSetup {setup}: cross-validated accuracy (variance); * marks the best cell");
        let _ = write!(s, "{:<10}", "model");
        for d in &datasets {
            let _ = write!(s, "{:>22}", d.as_str().to_uppercase());
        }
        let _ = writeln!(s);
        for &m in &models {
            let _ = write!(s, "{:<10}", m.as_str());
            for &d in &datasets {
                let text = match r.cell(setup, d, m) {
                    Some(c) => {
                        let star = if best.get(&setup).is_some_and(|b| std::ptr::eq(*b, c)) { "*" } else { " " };
                        format!("{:.4} ({:.5}){star}", c.mean, c.variance)
                    }
                    None => "-".into(),
                };
                let _ = write!(s, "{text:>22}");
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "Setup {setup}: held-out test accuracy");
        for &m in &models {
            let _ = write!(s, "{:<10}", m.as_str());
            for &d in &datasets {
                let text = r.cell(setup, d, m).map_or("-".into(), |c| format!("{:.4}", c.test_accuracy));
                let _ = write!(s, "{text:>22}");
            }
            let _ = writeln!(s);
        }
    }
    let _ = writeln!(s, "\nAverage variance over setups");
    let avg = r.average_variances();
    let _ = write!(s, "{:<10}", "model");
    for d in &datasets {
        let _ = write!(s, "{:>12}", d.as_str().to_uppercase());
    }
    let _ = writeln!(s);
    for &m in &models {
        let _ = write!(s, "{:<10}", m.as_str());
        for &d in &datasets {
            let v = avg.iter().find(|(am, ad, _)| *am == m && *ad == d).map(|t| t.2);
            let _ = write!(s, "{:>12}", v.map_or("-".into(), |v| format!("{v:.6}")));
        }
        let _ = writeln!(s);
    }
    s
}

/// Mean visual-word histogram per class for codebook size `k`: `k` bars per
/// class present in `labels`.
pub fn bovw_class_means(block: &Block, labels: &[ClassLabel], k: usize) -> Vec<(ClassLabel, Vec<f64>)> {
    let prefix = format!("bovw_k{k}_bin");
    let cols: Vec<usize> = block.names.iter().enumerate().filter(|(_, n)| n.starts_with(&prefix)).map(|(i, _)| i).collect();
    ClassLabel::ALL
        .into_iter()
        .filter_map(|c| {
            let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            if rows.is_empty() {
                return None;
            }
            let means = cols
                .iter()
                .map(|&j| rows.iter().map(|&i| block.data[[i, j]]).sum::<f64>() / rows.len() as f64)
                .collect();
            Some((c, means))
        })
        .collect()
}

/// CSV with one row per (class, bin).
pub fn bovw_class_means_csv(means: &[(ClassLabel, Vec<f64>)]) -> String {
    let mut s = String::from("class,bin,mean\n");
    for (c, bars) in means {
        for (i, v) in bars.iter().enumerate() {
            let _ = writeln!(s, "{c},{i},{v}");
        }
    }
    s
}
