//! Case data ingestion and coding.
//!
//! A [`CaseMatrix`] holds binary case-by-condition data plus a binary
//! outcome; every analysis in this crate starts from one. Raw numeric
//! columns are coded to membership scores with [`dichotomize_at_mean`]
//! or [`code_presence`].

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};

/// Binary case-by-condition data with a binary outcome.
///
/// Conditions are stored row-major: case `i`, condition `j` lives at
/// `conditions[i * num_conditions + j]`. All entries are exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseMatrix {
    condition_names: Vec<String>,
    outcome_name: String,
    conditions: Vec<u8>,
    outcome: Vec<u8>,
    case_ids: Vec<String>,
}

/// Per-column Bernoulli proportions plus sample size; the parameters of
/// the random null model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalProfile {
    pub condition_probs: Vec<f64>,
    pub outcome_prob: f64,
    pub n: usize,
}

/// How to code a raw numeric column into set membership.
#[derive(Debug, Clone, PartialEq)]
pub enum CodingRule {
    /// 1 iff the value falls at or above the column mean.
    DichotomizeAtMean,
    /// 1 iff the value is at or above the given threshold.
    Presence(f64),
}

impl CaseMatrix {
    /// Build a validated matrix from row-wise condition data.
    pub fn new(
        condition_names: Vec<String>,
        rows: Vec<Vec<u8>>,
        outcome: Vec<u8>,
        outcome_name: impl Into<String>,
        case_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        let v = condition_names.len();
        if v == 0 {
            return Err(QcaError::NoConditions);
        }
        let n = rows.len();
        if n == 0 {
            return Err(QcaError::EmptyData);
        }
        if outcome.len() != n {
            return Err(QcaError::DimensionMismatch(format!(
                "{} condition rows vs {} outcome entries",
                n,
                outcome.len()
            )));
        }
        let outcome_name = outcome_name.into();
        let mut seen = HashSet::new();
        for name in &condition_names {
            if !seen.insert(name.as_str()) {
                return Err(QcaError::DuplicateConditionName(name.clone()));
            }
            if *name == outcome_name {
                return Err(QcaError::ConditionNamedAsOutcome(name.clone()));
            }
        }
        let mut conditions = Vec::with_capacity(n * v);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(QcaError::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    v
                )));
            }
            for (j, &cell) in row.iter().enumerate() {
                if cell > 1 {
                    return Err(QcaError::NonBinaryColumn {
                        row: i + 1,
                        column: condition_names[j].clone(),
                        value: cell as f64,
                    });
                }
                conditions.push(cell);
            }
        }
        for (i, &y) in outcome.iter().enumerate() {
            if y > 1 {
                return Err(QcaError::NonBinaryOutcome {
                    row: i + 1,
                    value: y as f64,
                });
            }
        }
        let case_ids = match case_ids {
            Some(ids) => {
                if ids.len() != n {
                    return Err(QcaError::DimensionMismatch(format!(
                        "{} case ids vs {} cases",
                        ids.len(),
                        n
                    )));
                }
                ids
            }
            None => (1..=n).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            condition_names,
            outcome_name,
            conditions,
            outcome,
            case_ids,
        })
    }

    pub fn num_cases(&self) -> usize {
        self.outcome.len()
    }

    pub fn num_conditions(&self) -> usize {
        self.condition_names.len()
    }

    pub fn condition_names(&self) -> &[String] {
        &self.condition_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn case_ids(&self) -> &[String] {
        &self.case_ids
    }

    pub fn outcome(&self) -> &[u8] {
        &self.outcome
    }

    /// Condition value for case `i`, condition `j`.
    pub fn condition(&self, i: usize, j: usize) -> u8 {
        self.conditions[i * self.num_conditions() + j]
    }

    /// One case's condition values.
    pub fn case_row(&self, i: usize) -> &[u8] {
        let v = self.num_conditions();
        &self.conditions[i * v..(i + 1) * v]
    }

    /// Bit pattern of case `i`: condition 0 is the most significant bit,
    /// so patterns sort in the truth table's ascending binary order.
    pub fn case_pattern(&self, i: usize) -> u32 {
        let v = self.num_conditions();
        self.case_row(i)
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << (v - 1 - j)))
    }

    /// Column means of conditions and outcome, plus the case count.
    pub fn marginal_profile(&self) -> MarginalProfile {
        let n = self.num_cases();
        let v = self.num_conditions();
        let mut condition_probs = vec![0.0; v];
        for i in 0..n {
            for (j, prob) in condition_probs.iter_mut().enumerate() {
                *prob += self.condition(i, j) as f64;
            }
        }
        for prob in &mut condition_probs {
            *prob /= n as f64;
        }
        let outcome_prob = self.outcome.iter().map(|&y| y as f64).sum::<f64>() / n as f64;
        MarginalProfile {
            condition_probs,
            outcome_prob,
            n,
        }
    }

    /// The same matrix with the outcome vector complemented.
    pub fn negate_outcome(&self) -> CaseMatrix {
        let mut negated = self.clone();
        for y in &mut negated.outcome {
            *y = 1 - *y;
        }
        negated
    }

    /// Write as CSV: id column, condition columns, outcome column.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|source| QcaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut out = std::io::BufWriter::new(file);
        self.write_csv_to(&mut out).map_err(|source| QcaError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn write_csv_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "id")?;
        for name in &self.condition_names {
            write!(out, ",{name}")?;
        }
        writeln!(out, ",{}", self.outcome_name)?;
        for i in 0..self.num_cases() {
            write!(out, "{}", self.case_ids[i])?;
            for j in 0..self.num_conditions() {
                write!(out, ",{}", self.condition(i, j))?;
            }
            writeln!(out, ",{}", self.outcome[i])?;
        }
        Ok(())
    }
}

/// 1 iff the value falls at or above the vector mean. Ties at the mean
/// code as 1.
pub fn dichotomize_at_mean(values: &[f64]) -> Result<Vec<u8>> {
    if values.is_empty() {
        return Err(QcaError::EmptyVector);
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(QcaError::NonFiniteValue { index, value });
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(values.iter().map(|&x| u8::from(x >= mean)).collect())
}

/// 1 iff the value is at or above the threshold.
pub fn code_presence(values: &[f64], threshold: f64) -> Result<Vec<u8>> {
    if !threshold.is_finite() {
        return Err(QcaError::InvalidParameter(format!(
            "presence threshold {threshold} is not finite"
        )));
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(QcaError::NonFiniteValue { index, value });
        }
    }
    Ok(values.iter().map(|&x| u8::from(x >= threshold)).collect())
}

/// Load a CSV of already-binary columns. Non-binary columns are an
/// error; use [`load_csv_with_rules`] to code them on the way in.
pub fn load_csv(
    path: impl AsRef<Path>,
    outcome_label: &str,
    id_label: Option<&str>,
) -> Result<CaseMatrix> {
    load_csv_with_rules(path, outcome_label, id_label, &[])
}

/// Load a CSV, applying coding rules to the named columns first.
///
/// The file must be UTF-8, comma-delimited, with a header row. A rule may
/// target the outcome column as well as conditions.
pub fn load_csv_with_rules(
    path: impl AsRef<Path>,
    outcome_label: &str,
    id_label: Option<&str>,
    rules: &[(String, CodingRule)],
) -> Result<CaseMatrix> {
    let path = path.as_ref();
    let raw = read_numeric_csv(path, id_label)?;
    for (column, _) in rules {
        if !raw.headers.contains(column) {
            return Err(QcaError::MissingRuleColumn(column.clone()));
        }
    }
    let outcome_idx = raw
        .headers
        .iter()
        .position(|h| h == outcome_label)
        .ok_or_else(|| QcaError::MissingOutcomeColumn(outcome_label.to_string()))?;

    let mut coded: Vec<Vec<u8>> = Vec::with_capacity(raw.headers.len());
    for (col_idx, header) in raw.headers.iter().enumerate() {
        let values = &raw.columns[col_idx];
        let rule = rules.iter().find(|(c, _)| c == header).map(|(_, r)| r);
        let column = match rule {
            Some(CodingRule::DichotomizeAtMean) => dichotomize_at_mean(values)?,
            Some(CodingRule::Presence(threshold)) => code_presence(values, *threshold)?,
            None => pass_through_binary(header, values, col_idx == outcome_idx)?,
        };
        coded.push(column);
    }

    let n = raw.columns[0].len();
    let outcome = coded[outcome_idx].clone();
    let condition_names: Vec<String> = raw
        .headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != outcome_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let rows: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            coded
                .iter()
                .enumerate()
                .filter(|(c, _)| *c != outcome_idx)
                .map(|(_, col)| col[i])
                .collect()
        })
        .collect();
    CaseMatrix::new(condition_names, rows, outcome, outcome_label, raw.ids)
}

struct RawTable {
    headers: Vec<String>,
    columns: Vec<Vec<f64>>,
    ids: Option<Vec<String>>,
}

fn read_numeric_csv(path: &Path, id_label: Option<&str>) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                let msg = e.to_string();
                QcaError::Io {
                    path: path.display().to_string(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, msg),
                }
            }
            _ => QcaError::Csv {
                path: path.display().to_string(),
                source: e,
            },
        })?;
    let header_row = reader
        .headers()
        .map_err(|source| QcaError::Csv {
            path: path.display().to_string(),
            source,
        })?
        .clone();
    let all_headers: Vec<String> = header_row.iter().map(str::to_string).collect();
    let id_idx = match id_label {
        Some(label) => Some(
            all_headers
                .iter()
                .position(|h| h == label)
                .ok_or_else(|| QcaError::MissingIdColumn(label.to_string()))?,
        ),
        None => None,
    };

    let headers: Vec<String> = all_headers
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != id_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    let mut ids: Vec<String> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|source| QcaError::Csv {
            path: path.display().to_string(),
            source,
        })?;
        let row = row_idx + 1;
        let mut col = 0;
        for (field_idx, field) in record.iter().enumerate() {
            if Some(field_idx) == id_idx {
                ids.push(field.to_string());
                continue;
            }
            let column_name = headers
                .get(col)
                .cloned()
                .unwrap_or_else(|| format!("column {}", field_idx + 1));
            if field.is_empty() {
                return Err(QcaError::MissingValue {
                    row,
                    column: column_name,
                });
            }
            let value: f64 = field.parse().map_err(|_| QcaError::NonNumericCell {
                row,
                column: column_name.clone(),
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(QcaError::NonFiniteValue {
                    index: row,
                    value,
                });
            }
            columns
                .get_mut(col)
                .ok_or_else(|| QcaError::DimensionMismatch(format!("row {row} too wide")))?
                .push(value);
            col += 1;
        }
        if col != headers.len() {
            return Err(QcaError::MissingValue {
                row,
                column: headers[col].clone(),
            });
        }
    }
    if columns.first().is_none_or(|c| c.is_empty()) {
        return Err(QcaError::EmptyData);
    }
    Ok(RawTable {
        headers,
        columns,
        ids: id_idx.map(|_| ids),
    })
}

fn pass_through_binary(header: &str, values: &[f64], is_outcome: bool) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        if value == 0.0 {
            out.push(0);
        } else if value == 1.0 {
            out.push(1);
        } else if is_outcome {
            return Err(QcaError::NonBinaryOutcome {
                row: i + 1,
                value,
            });
        } else {
            return Err(QcaError::NonBinaryColumn {
                row: i + 1,
                column: header.to_string(),
                value,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_binary_passthrough() {
        let f = write_temp("A,B,Y\n1,0,1\n0,1,0\n1,1,1\n");
        let data = load_csv(f.path(), "Y", None).unwrap();
        assert_eq!(data.num_cases(), 3);
        assert_eq!(data.num_conditions(), 2);
        assert_eq!(data.outcome(), &[1, 0, 1]);
        assert_eq!(data.case_ids(), &["1", "2", "3"]);
    }

    #[test]
    fn non_binary_outcome_rejected() {
        let f = write_temp("A,Y\n1,2\n0,0\n");
        let err = load_csv(f.path(), "Y", None).unwrap_err();
        assert!(err.to_string().contains("non-binary outcome"), "{err}");
    }

    #[test]
    fn missing_outcome_column() {
        let f = write_temp("A,B\n1,0\n");
        let err = load_csv(f.path(), "Y", None).unwrap_err();
        assert!(matches!(err, QcaError::MissingOutcomeColumn(_)));
    }

    #[test]
    fn missing_value_reports_row_and_column() {
        let f = write_temp("A,Y\n1,1\n,0\n");
        let err = load_csv(f.path(), "Y", None).unwrap_err();
        match err {
            QcaError::MissingValue { row, column } => {
                assert_eq!(row, 2);
                assert_eq!(column, "A");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let f = write_temp("A,Y\nx,1\n");
        let err = load_csv(f.path(), "Y", None).unwrap_err();
        match err {
            QcaError::NonNumericCell { row, column, value } => {
                assert_eq!((row, column.as_str(), value.as_str()), (1, "A", "x"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn id_column_is_used() {
        let f = write_temp("county,A,Y\nAlachua,1,1\nBaker,0,0\n");
        let data = load_csv(f.path(), "Y", Some("county")).unwrap();
        assert_eq!(data.case_ids(), &["Alachua", "Baker"]);
        assert_eq!(data.condition_names(), &["A".to_string()]);
    }

    #[test]
    fn coding_rules_apply() {
        let f = write_temp("pct,rallies,Y\n10.0,0,1\n20.0,3,0\n30.0,1,1\n");
        let rules = vec![
            ("pct".to_string(), CodingRule::DichotomizeAtMean),
            ("rallies".to_string(), CodingRule::Presence(1.0)),
        ];
        let data = load_csv_with_rules(f.path(), "Y", None, &rules).unwrap();
        // mean(pct) = 20 -> [0, 1, 1]; rallies >= 1 -> [0, 1, 1]
        assert_eq!(data.case_row(0), &[0, 0]);
        assert_eq!(data.case_row(1), &[1, 1]);
        assert_eq!(data.case_row(2), &[1, 1]);
    }

    #[test]
    fn dichotomize_examples() {
        assert_eq!(dichotomize_at_mean(&[1.0, 2.0, 3.0]).unwrap(), vec![0, 1, 1]);
        assert_eq!(dichotomize_at_mean(&[5.0, 5.0, 5.0]).unwrap(), vec![1, 1, 1]);
        assert_eq!(dichotomize_at_mean(&[0.0, 10.0]).unwrap(), vec![0, 1]);
        assert!(dichotomize_at_mean(&[]).is_err());
    }

    #[test]
    fn presence_examples() {
        assert_eq!(
            code_presence(&[0.0, 1.0, 3.0, 0.0], 1.0).unwrap(),
            vec![0, 1, 1, 0]
        );
        assert_eq!(code_presence(&[0.0, 0.0], 1.0).unwrap(), vec![0, 0]);
    }

    #[test]
    fn marginal_profile_examples() {
        let data = CaseMatrix::new(
            vec!["A".into()],
            vec![vec![1], vec![0]],
            vec![1, 0],
            "Y",
            None,
        )
        .unwrap();
        let p = data.marginal_profile();
        assert_eq!(p.condition_probs, vec![0.5]);
        assert_eq!(p.outcome_prob, 0.5);
        assert_eq!(p.n, 2);
    }

    #[test]
    fn negate_outcome_complements() {
        let data = CaseMatrix::new(
            vec!["A".into()],
            vec![vec![1], vec![0], vec![1]],
            vec![1, 0, 1],
            "Y",
            None,
        )
        .unwrap();
        let neg = data.negate_outcome();
        assert_eq!(neg.outcome(), &[0, 1, 0]);
        assert_eq!(neg.negate_outcome(), data);
        let p = data.marginal_profile().outcome_prob;
        let q = neg.marginal_profile().outcome_prob;
        assert_eq!(p, 1.0 - q);
    }

    #[test]
    fn csv_round_trip_identity() {
        let f = write_temp("id,A,B,Y\nc1,1,0,1\nc2,0,1,0\n");
        let data = load_csv(f.path(), "Y", Some("id")).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        data.write_csv(out.path()).unwrap();
        let reloaded = load_csv(out.path(), "Y", Some("id")).unwrap();
        assert_eq!(data, reloaded);
    }

    #[test]
    fn duplicate_condition_name_rejected() {
        let err = CaseMatrix::new(
            vec!["A".into(), "A".into()],
            vec![vec![1, 0]],
            vec![1],
            "Y",
            None,
        )
        .unwrap_err();
        assert!(matches!(err, QcaError::DuplicateConditionName(_)));
    }
}
