//! Data model for labeled/unlabeled samples, validation, and CSV ingestion.
//!
//! CSV with a header row is the canonical interchange format. Default column
//! names are `y` (gold-standard outcome), `yhat` (model prediction), and
//! `x0..x{d-1}` (features); all of them can be renamed through [`CsvSchema`].
//! Decimal parsing is locale-independent (dot separator), and every loader
//! rejects NaN and infinite entries because all estimators assume finite
//! inputs.

use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Paired features, gold-standard outcomes, and model predictions.
///
/// Features are optional: mean, quantile, and mode estimands never read them.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    features: Option<Vec<Vec<f64>>>,
    outcomes: Vec<f64>,
    predictions: Vec<f64>,
}

/// Features and predictions only; the outcomes are never observed.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSet {
    features: Option<Vec<Vec<f64>>>,
    predictions: Vec<f64>,
}

fn validate_rows(
    features: &Option<Vec<Vec<f64>>>,
    columns: &[(&str, &[f64])],
) -> Result<()> {
    let n = columns
        .first()
        .map(|(_, v)| v.len())
        .or_else(|| features.as_ref().map(|f| f.len()))
        .unwrap_or(0);
    if n == 0 {
        return Err(Error::domain("dataset must contain at least one row"));
    }
    for (name, values) in columns {
        if values.len() != n {
            return Err(Error::domain(format!(
                "column {name} has {} entries, expected {n}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "column {name} has a non-finite entry at row {}",
                bad + 1
            )));
        }
    }
    if let Some(rows) = features {
        if rows.len() != n {
            return Err(Error::domain(format!(
                "feature matrix has {} rows, expected {n}",
                rows.len()
            )));
        }
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::domain(format!(
                    "feature row {} has {} entries, expected {d}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!(
                    "feature row {} has a non-finite entry",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

impl LabeledSet {
    pub fn new(
        features: Option<Vec<Vec<f64>>>,
        outcomes: Vec<f64>,
        predictions: Vec<f64>,
    ) -> Result<Self> {
        validate_rows(
            &features,
            &[("y", &outcomes), ("yhat", &predictions)],
        )?;
        Ok(LabeledSet { features, outcomes, predictions })
    }

    /// Featureless constructor for label-only estimands.
    pub fn from_pairs(outcomes: Vec<f64>, predictions: Vec<f64>) -> Result<Self> {
        LabeledSet::new(None, outcomes, predictions)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.as_ref().map(|f| f[0].len()).unwrap_or(0)
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    /// Features, or a domain error naming the estimand that needs them.
    pub fn require_features(&self, who: &str) -> Result<&[Vec<f64>]> {
        self.features
            .as_deref()
            .ok_or_else(|| Error::domain(format!("{who} requires feature columns")))
    }

    /// Per-row prediction errors f(X_i) - Y_i.
    pub fn prediction_errors(&self) -> Vec<f64> {
        self.predictions
            .iter()
            .zip(&self.outcomes)
            .map(|(f, y)| f - y)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.dim();
        let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        header.push("yhat".into());
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut row = Vec::with_capacity(d + 2);
            if let Some(f) = &self.features {
                row.extend(f[i].iter().map(|v| format!("{v}")));
            }
            row.push(format!("{}", self.outcomes[i]));
            row.push(format!("{}", self.predictions[i]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

impl UnlabeledSet {
    pub fn new(features: Option<Vec<Vec<f64>>>, predictions: Vec<f64>) -> Result<Self> {
        validate_rows(&features, &[("yhat", &predictions)])?;
        Ok(UnlabeledSet { features, predictions })
    }

    pub fn from_predictions(predictions: Vec<f64>) -> Result<Self> {
        UnlabeledSet::new(None, predictions)
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.as_ref().map(|f| f[0].len()).unwrap_or(0)
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    pub fn require_features(&self, who: &str) -> Result<&[Vec<f64>]> {
        self.features
            .as_deref()
            .ok_or_else(|| Error::domain(format!("{who} requires feature columns")))
    }
}

// --- estimand descriptions ---------------------------------------------------

/// Convex losses addressable by name (CLI and harness plumbing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexLoss {
    Squared,
    Pinball(f64),
}

/// Bounded risk-minimization losses addressable by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskLoss {
    /// Exact-mismatch indicator over a discrete parameter set.
    ModeDiscrete,
    /// Neighborhood-miss indicator with width eta.
    Mode(f64),
    /// Tukey biweight with scale c.
    Tukey(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimandKind {
    Mean,
    Quantile(f64),
    Logistic,
    Poisson,
    /// OLS coefficient j*.
    Ols(usize),
    Convex(ConvexLoss),
    Risk(RiskLoss),
}

impl fmt::Display for EstimandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimandKind::Mean => write!(f, "mean"),
            EstimandKind::Quantile(q) => write!(f, "quantile({q})"),
            EstimandKind::Logistic => write!(f, "logistic"),
            EstimandKind::Poisson => write!(f, "poisson"),
            EstimandKind::Ols(j) => write!(f, "ols(j={j})"),
            EstimandKind::Convex(ConvexLoss::Squared) => write!(f, "convex(squared)"),
            EstimandKind::Convex(ConvexLoss::Pinball(q)) => write!(f, "convex(pinball {q})"),
            EstimandKind::Risk(RiskLoss::ModeDiscrete) => write!(f, "risk(mode-discrete)"),
            EstimandKind::Risk(RiskLoss::Mode(eta)) => write!(f, "risk(mode eta={eta})"),
            EstimandKind::Risk(RiskLoss::Tukey(c)) => write!(f, "risk(tukey c={c})"),
        }
    }
}

/// Which target to infer, plus its error budget.
///
/// `delta` is the nonasymptotic budget split (rectifier side); leaving it
/// unset selects the asymptotic algorithms. `bound` is the boundedness
/// constant B required by the nonasymptotic and risk-minimization paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimandSpec {
    pub kind: EstimandKind,
    pub alpha: f64,
    pub delta: Option<f64>,
    pub bound: Option<f64>,
}

impl EstimandSpec {
    pub fn new(kind: EstimandKind, alpha: f64) -> Result<Self> {
        crate::stats::check_alpha(alpha)?;
        match kind {
            EstimandKind::Quantile(q) | EstimandKind::Convex(ConvexLoss::Pinball(q)) => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
                }
            }
            EstimandKind::Risk(RiskLoss::Mode(eta)) => {
                if eta <= 0.0 {
                    return Err(Error::domain("mode neighborhood width must be positive"));
                }
            }
            EstimandKind::Risk(RiskLoss::Tukey(c)) => {
                if c <= 0.0 {
                    return Err(Error::domain("Tukey scale must be positive"));
                }
            }
            _ => {}
        }
        Ok(EstimandSpec { kind, alpha, delta: None, bound: None })
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < self.alpha) {
            return Err(Error::domain(format!(
                "delta {delta} must lie strictly inside (0, alpha = {})",
                self.alpha
            )));
        }
        self.delta = Some(delta);
        Ok(self)
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::domain("bound must be positive and finite"));
        }
        self.bound = Some(bound);
        Ok(self)
    }
}

// --- CSV ingestion -----------------------------------------------------------

/// Column-naming convention for CSV files.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub outcome: String,
    pub prediction: String,
    pub feature_prefix: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            outcome: "y".into(),
            prediction: "yhat".into(),
            feature_prefix: "x".into(),
        }
    }
}

impl CsvSchema {
    /// Parse an override string like `y=label,yhat=pred,x=feat`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut schema = CsvSchema::default();
        for part in spec.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("bad schema fragment `{part}`")))?;
            match key.trim() {
                "y" => schema.outcome = value.trim().into(),
                "yhat" => schema.prediction = value.trim().into(),
                "x" => schema.feature_prefix = value.trim().into(),
                other => {
                    return Err(Error::domain(format!(
                        "unknown schema key `{other}` (expected y, yhat, or x)"
                    )))
                }
            }
        }
        Ok(schema)
    }

    /// Feature columns named `{prefix}0..{prefix}{d-1}`, in index order.
    fn feature_columns(&self, headers: &[String]) -> Result<Vec<(usize, usize)>> {
        let mut found: Vec<(usize, usize)> = Vec::new(); // (feature index, column)
        for (col, h) in headers.iter().enumerate() {
            if let Some(rest) = h.strip_prefix(self.feature_prefix.as_str()) {
                if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                    found.push((rest.parse().unwrap(), col));
                }
            }
        }
        found.sort_unstable();
        for (expect, &(idx, _)) in found.iter().enumerate() {
            if idx != expect {
                return Err(Error::domain(format!(
                    "feature columns must be contiguous from {p}0; missing {p}{expect}",
                    p = self.feature_prefix
                )));
            }
        }
        Ok(found)
    }
}

struct ParsedCsv {
    features: Option<Vec<Vec<f64>>>,
    outcomes: Option<Vec<f64>>,
    predictions: Vec<f64>,
}

fn parse_csv(path: &Path, schema: &CsvSchema, need_outcome: bool) -> Result<ParsedCsv> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let col_of = |name: &str| headers.iter().position(|h| h == name);
    let pred_col = col_of(&schema.prediction).ok_or_else(|| Error::Parse {
        path: display.clone(),
        row: 0,
        message: format!("missing column `{}`", schema.prediction),
    })?;
    let outcome_col = match col_of(&schema.outcome) {
        Some(c) => Some(c),
        None if need_outcome => {
            return Err(Error::Parse {
                path: display.clone(),
                row: 0,
                message: format!("missing column `{}`", schema.outcome),
            })
        }
        None => None,
    };
    let feature_cols = schema.feature_columns(&headers)?;

    let cell = |record: &csv::StringRecord, col: usize, row: usize, name: &str| -> Result<f64> {
        let raw = record.get(col).ok_or_else(|| Error::Parse {
            path: display.clone(),
            row,
            message: format!("row is ragged; column `{name}` missing"),
        })?;
        let value: f64 = raw.trim().parse().map_err(|_| Error::Parse {
            path: display.clone(),
            row,
            message: format!("column `{name}` has non-numeric cell `{raw}`"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                path: display.clone(),
                row,
                message: format!("column `{name}` has non-finite cell `{raw}`"),
            });
        }
        Ok(value)
    };

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut outcomes: Vec<f64> = Vec::new();
    let mut predictions: Vec<f64> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1; // 1-based data row
        let record = record.map_err(|e| Error::Parse {
            path: display.clone(),
            row,
            message: e.to_string(),
        })?;
        predictions.push(cell(&record, pred_col, row, &schema.prediction)?);
        if let Some(col) = outcome_col {
            outcomes.push(cell(&record, col, row, &schema.outcome)?);
        }
        if !feature_cols.is_empty() {
            let mut frow = Vec::with_capacity(feature_cols.len());
            for &(idx, col) in &feature_cols {
                frow.push(cell(&record, col, row, &format!("{}{idx}", schema.feature_prefix))?);
            }
            features.push(frow);
        }
    }
    if predictions.is_empty() {
        return Err(Error::Parse { path: display, row: 0, message: "no rows".into() });
    }
    Ok(ParsedCsv {
        features: if features.is_empty() { None } else { Some(features) },
        outcomes: if outcome_col.is_some() { Some(outcomes) } else { None },
        predictions,
    })
}

/// Load a labeled dataset; requires the outcome and prediction columns.
pub fn load_labeled(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<LabeledSet> {
    let parsed = parse_csv(path.as_ref(), schema, true)?;
    LabeledSet::new(parsed.features, parsed.outcomes.unwrap(), parsed.predictions)
}

/// Load an unlabeled dataset; requires only the prediction column.
pub fn load_unlabeled(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<UnlabeledSet> {
    let parsed = parse_csv(path.as_ref(), schema, false)?;
    UnlabeledSet::new(parsed.features, parsed.predictions)
}

/// A finite-population CSV: predictions for every row, optional features,
/// and outcomes present only on labeled rows (blank elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationFile {
    pub predictions: Vec<f64>,
    pub features: Option<Vec<Vec<f64>>>,
    pub outcomes: Vec<Option<f64>>,
}

/// Load a population CSV. The outcome column may be absent entirely or
/// blank on unlabeled rows.
pub fn load_population(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PopulationFile> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let pred_col = headers
        .iter()
        .position(|h| h == &schema.prediction)
        .ok_or_else(|| Error::Parse {
            path: display.clone(),
            row: 0,
            message: format!("missing column `{}`", schema.prediction),
        })?;
    let outcome_col = headers.iter().position(|h| h == &schema.outcome);
    let feature_cols = schema.feature_columns(&headers)?;

    let mut predictions = Vec::new();
    let mut outcomes = Vec::new();
    let mut features = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            path: display.clone(),
            row,
            message: e.to_string(),
        })?;
        let numeric = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).ok_or_else(|| Error::Parse {
                path: display.clone(),
                row,
                message: format!("row is ragged; column `{name}` missing"),
            })?;
            let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                row,
                message: format!("column `{name}` has non-numeric cell `{raw}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: display.clone(),
                    row,
                    message: format!("column `{name}` has non-finite cell `{raw}`"),
                });
            }
            Ok(v)
        };
        predictions.push(numeric(pred_col, &schema.prediction)?);
        outcomes.push(match outcome_col {
            Some(col) => {
                let raw = record.get(col).unwrap_or("").trim();
                if raw.is_empty() {
                    None
                } else {
                    Some(numeric(col, &schema.outcome)?)
                }
            }
            None => None,
        });
        if !feature_cols.is_empty() {
            let mut frow = Vec::with_capacity(feature_cols.len());
            for &(idx, col) in &feature_cols {
                frow.push(numeric(col, &format!("{}{idx}", schema.feature_prefix))?);
            }
            features.push(frow);
        }
    }
    if predictions.is_empty() {
        return Err(Error::Parse { path: display, row: 0, message: "no rows".into() });
    }
    Ok(PopulationFile {
        predictions,
        features: if features.is_empty() { None } else { Some(features) },
        outcomes,
    })
}

/// Load a labeled-row index manifest: one 0-based row index per line under
/// an `index` header.
pub fn load_index_manifest(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { path: display.clone(), row: 0, message: e.to_string() })?;
    let col = headers
        .iter()
        .position(|h| h.trim() == "index")
        .ok_or_else(|| Error::Parse {
            path: display.clone(),
            row: 0,
            message: "missing column `index`".into(),
        })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            path: display.clone(),
            row,
            message: e.to_string(),
        })?;
        let raw = record.get(col).unwrap_or("").trim();
        let idx: usize = raw.parse().map_err(|_| Error::Parse {
            path: display.clone(),
            row,
            message: format!("bad index `{raw}`"),
        })?;
        out.push(idx);
    }
    if out.is_empty() {
        return Err(Error::Parse { path: display, row: 0, message: "no rows".into() });
    }
    Ok(out)
}
