//! Batch conversion of reported study summaries to mean and SD estimates.
//!
//! Input is UTF-8 CSV with header `study_id,n,a,q1,m,q3,b` (any column
//! order) and an optional `iqr` column holding the width `q3 − q1` for studies
//! that report the IQR as a single number. Empty cells mark values the study
//! did not report. The present/absent pattern picks the scenario:
//!
//! | present            | scenario                 |
//! |--------------------|--------------------------|
//! | a, m, b            | S1                       |
//! | q1, m, q3          | S2                       |
//! | a, q1, m, q3, b    | S3                       |
//! | a, b, iqr (m opt.) | S3 from widths (SD only) |
//!
//! Any other pattern is rejected. Every input row yields one output row in
//! input order; rows that cannot be converted keep their id and sample size,
//! leave the estimate cells empty, and get an error record with the input line
//! number.

use std::fmt;
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::{
    mean_bland, mean_luo, sd_bland, sd_hozo_s1, sd_shi, sd_shi_from_widths, sd_wan_s1, sd_wan_s2,
    sd_wan_s3, sd_wan_s3_from_widths, Estimate, FiveNumberSummary, QuartileSummary, RangeSummary,
};
use crate::render::sig9;

pub const INPUT_COLUMNS: [&str; 7] = ["study_id", "n", "a", "q1", "m", "q3", "b"];
pub const IQR_COLUMN: &str = "iqr";
pub const OUTPUT_HEADER: &str =
    "study_id,n,scenario,mean_est,mean_method,sd_est,sd_method,weight_used";
pub const ERROR_HEADER: &str = "line,study_id,reason";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvertMethod {
    /// S1: range-based SD; S2: IQR-based SD; S3: optimally weighted mean and
    /// the shortcut SD.
    #[default]
    Auto,
    /// Shortcut SD (S3 only), with the weighted mean when all five values are
    /// present.
    Shi,
    /// The Wan et al. SD for the scenario, with the weighted mean for S3.
    Wan,
    /// Bland's mean and SD (full S3 only).
    Bland,
    /// Hozo et al.'s step rule for the SD (S1 only).
    Hozo,
    /// Optimally weighted mean only (full S3 only).
    Luo,
}

impl ConvertMethod {
    pub const ALL: [ConvertMethod; 6] = [
        ConvertMethod::Auto,
        ConvertMethod::Shi,
        ConvertMethod::Wan,
        ConvertMethod::Bland,
        ConvertMethod::Hozo,
        ConvertMethod::Luo,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConvertMethod::Auto => "auto",
            ConvertMethod::Shi => "shi",
            ConvertMethod::Wan => "wan",
            ConvertMethod::Bland => "bland",
            ConvertMethod::Hozo => "hozo",
            ConvertMethod::Luo => "luo",
        }
    }
}

impl fmt::Display for ConvertMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ConvertMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConvertMethod::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown conversion method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Scenario::S1),
            "S2" => Ok(Scenario::S2),
            "S3" => Ok(Scenario::S3),
            _ => Err(Error::InvalidInput(format!("unknown scenario {s:?}"))),
        }
    }
}

/// One parsed input row.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub study_id: String,
    pub n: u64,
    pub a: Option<f64>,
    pub q1: Option<f64>,
    pub m: Option<f64>,
    pub q3: Option<f64>,
    pub b: Option<f64>,
    pub iqr: Option<f64>,
}

/// A record resolved to one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyData {
    S1(RangeSummary),
    S2(QuartileSummary),
    S3(FiveNumberSummary),
    /// Range and IQR widths without the quartiles themselves.
    S3Widths {
        range: f64,
        iqr: f64,
        n: u64,
    },
}

impl StudyData {
    pub fn scenario(&self) -> Scenario {
        match self {
            StudyData::S1(_) => Scenario::S1,
            StudyData::S2(_) => Scenario::S2,
            StudyData::S3(_) | StudyData::S3Widths { .. } => Scenario::S3,
        }
    }
}

impl StudyRecord {
    /// Resolves the scenario from the present cells, or checks the cells
    /// required by `forced` and ignores the rest.
    pub fn resolve(&self, forced: Option<Scenario>) -> Result<StudyData> {
        let n = self.n;
        let need = |v: Option<f64>, name: &str, s: Scenario| {
            v.ok_or_else(|| {
                Error::InvalidInput(format!("scenario {} needs a value for {name}", s.label()))
            })
        };
        let s3 = |rec: &StudyRecord| -> Result<StudyData> {
            let sc = Scenario::S3;
            let (a, b) = (need(rec.a, "a", sc)?, need(rec.b, "b", sc)?);
            match (rec.q1, rec.q3, rec.iqr) {
                (Some(_), Some(_), Some(_)) => Err(Error::InvalidInput(
                    "give either q1 and q3 or the iqr width, not both".into(),
                )),
                (None, None, Some(iqr)) => {
                    if let Some(m) = rec.m {
                        RangeSummary::new(a, m, b, n)?;
                    } else if a > b {
                        return Err(Error::InvalidInput(format!(
                            "minimum {a} exceeds maximum {b}"
                        )));
                    }
                    if iqr < 0.0 || iqr > b - a {
                        return Err(Error::InvalidInput(format!(
                            "iqr width {iqr} must lie between 0 and the range {}",
                            b - a
                        )));
                    }
                    Ok(StudyData::S3Widths {
                        range: b - a,
                        iqr,
                        n,
                    })
                }
                _ => Ok(StudyData::S3(FiveNumberSummary::new(
                    a,
                    need(rec.q1, "q1", sc)?,
                    need(rec.m, "m", sc)?,
                    need(rec.q3, "q3", sc)?,
                    b,
                    n,
                )?)),
            }
        };
        let s1 = |rec: &StudyRecord| -> Result<StudyData> {
            let sc = Scenario::S1;
            Ok(StudyData::S1(RangeSummary::new(
                need(rec.a, "a", sc)?,
                need(rec.m, "m", sc)?,
                need(rec.b, "b", sc)?,
                n,
            )?))
        };
        let s2 = |rec: &StudyRecord| -> Result<StudyData> {
            let sc = Scenario::S2;
            Ok(StudyData::S2(QuartileSummary::new(
                need(rec.q1, "q1", sc)?,
                need(rec.m, "m", sc)?,
                need(rec.q3, "q3", sc)?,
                n,
            )?))
        };
        match forced {
            Some(Scenario::S1) => return s1(self),
            Some(Scenario::S2) => return s2(self),
            Some(Scenario::S3) => return s3(self),
            None => {}
        }
        let present = [self.a, self.q1, self.m, self.q3, self.b, self.iqr].map(|v| v.is_some());
        match present {
            [true, false, true, false, true, false] => s1(self),
            [false, true, true, true, false, false] => s2(self),
            [true, true, true, true, true, false] | [true, false, _, false, true, true] => s3(self),
            _ => {
                let names = ["a", "q1", "m", "q3", "b", "iqr"];
                let given: Vec<&str> = names
                    .iter()
                    .zip(present)
                    .filter(|(_, p)| *p)
                    .map(|(n, _)| *n)
                    .collect();
                Err(Error::InvalidInput(format!(
                    "cells {{{}}} match none of S1 {{a,m,b}}, S2 {{q1,m,q3}}, S3 {{a,q1,m,q3,b}}",
                    given.join(",")
                )))
            }
        }
    }
}

/// Estimates for one study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvertRow {
    pub study_id: String,
    pub n: Option<u64>,
    pub scenario: Option<Scenario>,
    pub mean: Option<Estimate>,
    pub sd: Option<Estimate>,
}

impl ConvertRow {
    pub fn weight_used(&self) -> Option<f64> {
        self.sd.and_then(|e| e.weight_used)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line in the input, header included.
    pub line: u64,
    pub study_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvertOutcome {
    pub rows: Vec<ConvertRow>,
    pub errors: Vec<RowError>,
}

fn unsupported(method: ConvertMethod, data: &StudyData) -> Error {
    let what = match data {
        StudyData::S3Widths { .. } => "S3 given as widths".to_string(),
        other => other.scenario().label().to_string(),
    };
    Error::InvalidInput(format!("method {method} does not apply to {what}"))
}

/// Applies `method` to resolved data, returning `(mean, sd)`.
pub fn estimate(
    method: ConvertMethod,
    data: &StudyData,
) -> Result<(Option<Estimate>, Option<Estimate>)> {
    use ConvertMethod as M;
    Ok(match (method, data) {
        (M::Auto | M::Wan, StudyData::S1(d)) => (None, Some(sd_wan_s1(d)?)),
        (M::Auto | M::Wan, StudyData::S2(d)) => (None, Some(sd_wan_s2(d)?)),
        (M::Auto | M::Shi, StudyData::S3(d)) => (Some(mean_luo(d)?), Some(sd_shi(d)?)),
        (M::Auto | M::Shi, &StudyData::S3Widths { range, iqr, n }) => {
            (None, Some(sd_shi_from_widths(range, iqr, n)?))
        }
        (M::Wan, StudyData::S3(d)) => (Some(mean_luo(d)?), Some(sd_wan_s3(d)?)),
        (M::Wan, &StudyData::S3Widths { range, iqr, n }) => {
            (None, Some(sd_wan_s3_from_widths(range, iqr, n)?))
        }
        (M::Bland, StudyData::S3(d)) => (Some(mean_bland(d)?), Some(sd_bland(d)?)),
        (M::Hozo, StudyData::S1(d)) => (None, Some(sd_hozo_s1(d)?)),
        (M::Luo, StudyData::S3(d)) => (Some(mean_luo(d)?), None),
        (method, data) => return Err(unsupported(method, data)),
    })
}

pub fn convert_record(
    record: &StudyRecord,
    method: ConvertMethod,
    scenario: Option<Scenario>,
) -> Result<ConvertRow> {
    let data = record.resolve(scenario)?;
    let (mean, sd) = estimate(method, &data)?;
    Ok(ConvertRow {
        study_id: record.study_id.clone(),
        n: Some(record.n),
        scenario: Some(data.scenario()),
        mean,
        sd,
    })
}

fn parse_cell(raw: &str, name: &str) -> Result<Option<f64>> {
    let t = raw.trim();
    if t.is_empty() {
        return Ok(None);
    }
    // Rust also accepts "inf" and "NaN", which are not data.
    let ok = t
        .bytes()
        .all(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'));
    match t.parse::<f64>() {
        Ok(v) if ok && v.is_finite() => Ok(Some(v)),
        _ => Err(Error::InvalidInput(format!(
            "cannot parse {name} value {raw:?}"
        ))),
    }
}

fn parse_n(raw: &str) -> Result<u64> {
    match raw.trim().parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::InvalidInput(format!(
            "sample size {raw:?} is not a positive integer"
        ))),
    }
}

struct Layout {
    idx: [usize; 7],
    iqr: Option<usize>,
}

fn layout(header: &csv::StringRecord) -> Result<Layout> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let find = |name: &str| names.iter().position(|h| *h == name);
    let mut idx = [0; 7];
    for (slot, col) in idx.iter_mut().zip(INPUT_COLUMNS) {
        *slot = find(col).ok_or_else(|| {
            Error::InvalidInput(format!(
                "malformed header: missing column {col:?} (expected {})",
                INPUT_COLUMNS.join(",")
            ))
        })?;
    }
    for name in &names {
        if !INPUT_COLUMNS.contains(name) && *name != IQR_COLUMN {
            return Err(Error::InvalidInput(format!(
                "malformed header: unknown column {name:?}"
            )));
        }
    }
    if names.len() != INPUT_COLUMNS.len() + usize::from(find(IQR_COLUMN).is_some()) {
        return Err(Error::InvalidInput(
            "malformed header: duplicate columns".into(),
        ));
    }
    Ok(Layout {
        idx,
        iqr: find(IQR_COLUMN),
    })
}

fn parse_record(row: &csv::StringRecord, lay: &Layout) -> Result<StudyRecord> {
    let cell = |i: usize| row.get(i).unwrap_or("");
    let num = |k: usize| parse_cell(cell(lay.idx[k]), INPUT_COLUMNS[k]);
    Ok(StudyRecord {
        study_id: cell(lay.idx[0]).trim().to_string(),
        n: parse_n(cell(lay.idx[1]))?,
        a: num(2)?,
        q1: num(3)?,
        m: num(4)?,
        q3: num(5)?,
        b: num(6)?,
        iqr: match lay.iqr {
            Some(i) => parse_cell(cell(i), IQR_COLUMN)?,
            None => None,
        },
    })
}

/// Converts every row of `input`. Only I/O failures are returned as `Err`;
/// everything else becomes a [`RowError`].
pub fn convert_csv<R: Read>(
    input: R,
    method: ConvertMethod,
    scenario: Option<Scenario>,
) -> Result<ConvertOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(input);
    let mut out = ConvertOutcome::default();
    let header = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(csv_error(e)),
    };
    if header.is_empty() {
        return Ok(out);
    }
    let lay = match layout(&header) {
        Ok(l) => l,
        Err(e) => {
            out.errors.push(RowError {
                line: 1,
                study_id: String::new(),
                reason: e.to_string(),
            });
            return Ok(out);
        }
    };
    for result in reader.records() {
        let row = result.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let study_id = row.get(lay.idx[0]).unwrap_or("").trim().to_string();
        let n = row.get(lay.idx[1]).and_then(|v| parse_n(v).ok());
        let converted = if row.len() != header.len() {
            Err(Error::InvalidInput(format!(
                "expected {} cells, found {}",
                header.len(),
                row.len()
            )))
        } else {
            parse_record(&row, &lay).and_then(|r| convert_record(&r, method, scenario))
        };
        match converted {
            Ok(r) => out.rows.push(r),
            Err(e) => {
                out.errors.push(RowError {
                    line,
                    study_id: study_id.clone(),
                    reason: e.to_string(),
                });
                out.rows.push(ConvertRow {
                    study_id,
                    n,
                    scenario: None,
                    mean: None,
                    sd: None,
                });
            }
        }
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("{other:?}")),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_rows(rows: &[ConvertRow]) -> String {
    let mut out = String::from(OUTPUT_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(sig9).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.study_id),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.scenario.map(Scenario::label).unwrap_or_default(),
            opt(r.mean.map(|e| e.value)),
            r.mean.map(|e| e.method.label()).unwrap_or_default(),
            opt(r.sd.map(|e| e.value)),
            r.sd.map(|e| e.method.label()).unwrap_or_default(),
            opt(r.weight_used()),
        );
    }
    out
}

pub fn render_errors(errors: &[RowError]) -> String {
    let mut out = String::from(ERROR_HEADER);
    out.push('\n');
    for e in errors {
        let _ = writeln!(
            out,
            "{},{},{}",
            e.line,
            csv_field(&e.study_id),
            csv_field(&e.reason)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "study_id,n,a,q1,m,q3,b\n";

    fn run(body: &str, method: ConvertMethod) -> ConvertOutcome {
        convert_csv(body.as_bytes(), method, None).unwrap()
    }

    #[test]
    fn auto_picks_per_scenario() {
        let out = run(
            &format!("{HEADER}s1,50,0,,5,,12\ns2,14,,1,3,5,\ns3,25,1,2,3,4,5\n"),
            ConvertMethod::Auto,
        );
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        let [s1, s2, s3] = &out.rows[..] else {
            panic!()
        };
        assert_eq!(s1.sd.unwrap().method.label(), "wan_sd_s1");
        assert_eq!(s1.weight_used(), Some(1.0));
        assert!(s1.mean.is_none());
        assert_eq!(s2.sd.unwrap().method.label(), "wan_sd_s2");
        assert_eq!(s2.weight_used(), Some(0.0));
        assert_eq!(s3.sd.unwrap().method.label(), "shi_sd");
        assert_eq!(s3.mean.unwrap().method.label(), "luo_mean");
        assert_eq!(s3.scenario, Some(Scenario::S3));
    }

    #[test]
    fn hozo_middle_branch() {
        let out = run(&format!("{HEADER}x,50,0,,5,,12\n"), ConvertMethod::Hozo);
        assert_eq!(out.rows[0].sd.unwrap().value, 3.0);
        let text = render_rows(&out.rows);
        assert_eq!(text.lines().nth(1), Some("x,50,S1,,,3.00000000,hozo_sd,"));
    }

    #[test]
    fn iqr_width_column() {
        let body = "study_id,n,a,q1,m,q3,b,iqr\ncapanni_bmi_ctrl,14,22.8,,,,34.3,4\n";
        let out = convert_csv(body.as_bytes(), ConvertMethod::Shi, None).unwrap();
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        assert!((out.rows[0].sd.unwrap().value - 3.348).abs() < 2e-3);
        let wan = convert_csv(body.as_bytes(), ConvertMethod::Wan, None).unwrap();
        assert!((wan.rows[0].sd.unwrap().value - 3.331).abs() < 2e-3);
        assert_eq!(wan.rows[0].weight_used(), Some(0.5));

        let both = "study_id,n,a,q1,m,q3,b,iqr\nx,14,1,2,3,4,5,2\n";
        assert_eq!(
            convert_csv(both.as_bytes(), ConvertMethod::Auto, None)
                .unwrap()
                .errors
                .len(),
            1
        );
    }

    #[test]
    fn degenerate_summary() {
        let out = run(&format!("{HEADER}flat,30,7,7,7,7,7\n"), ConvertMethod::Auto);
        let row = &out.rows[0];
        assert_eq!(row.sd.unwrap().value, 0.0);
        assert!((row.mean.unwrap().value - 7.0).abs() < 1e-12);
    }

    #[test]
    fn errors_keep_rows_in_order() {
        let out = run(
            &format!("{HEADER}ok,20,1,2,3,4,5\nbad,20,1,2,,,\nnum,20,1,x,3,4,5\nneg,0,1,,2,,3\nok2,20,1,,2,,3\n"),
            ConvertMethod::Auto,
        );
        let ids: Vec<&str> = out.rows.iter().map(|r| r.study_id.as_str()).collect();
        assert_eq!(ids, ["ok", "bad", "num", "neg", "ok2"]);
        let lines: Vec<u64> = out.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, [3, 4, 5]);
        assert!(out.rows[1].sd.is_none() && out.rows[1].scenario.is_none());
        assert!(out.errors[0].reason.contains("match none"));
        assert!(render_errors(&out.errors).starts_with("line,study_id,reason\n3,bad,"));
    }

    #[test]
    fn rejects_ambiguous_and_non_finite() {
        let out = run(
            &format!(
                "{HEADER}amb,20,1,2,3,,\ninf,20,1,,inf,,3\nnan,20,NaN,,2,,3\norder,20,5,,2,,3\n"
            ),
            ConvertMethod::Auto,
        );
        assert_eq!(out.errors.len(), 4);
    }

    #[test]
    fn method_and_scenario_mismatch() {
        let out = run(&format!("{HEADER}s1,20,1,,2,,3\n"), ConvertMethod::Shi);
        assert!(out.errors[0].reason.contains("does not apply"));
        let out = run(&format!("{HEADER}s3,20,1,2,3,4,5\n"), ConvertMethod::Hozo);
        assert_eq!(out.errors.len(), 1);
        // Forcing S1 on a full summary uses a, m and b only.
        let forced = convert_csv(
            format!("{HEADER}s3,20,1,2,3,4,5\n").as_bytes(),
            ConvertMethod::Hozo,
            Some(Scenario::S1),
        )
        .unwrap();
        assert!(forced.errors.is_empty());
        assert_eq!(forced.rows[0].sd.unwrap().value, 1.0);
    }

    #[test]
    fn header_problems() {
        let out = run("study_id,n,a,q1,m,q3\nx,5,1,2,3,4\n", ConvertMethod::Auto);
        assert_eq!(out.errors[0].line, 1);
        assert!(out.rows.is_empty());
        let out = run("study_id,n,a,q1,m,q3,b,extra\n", ConvertMethod::Auto);
        assert!(out.errors[0].reason.contains("unknown column"));
        let empty = run("", ConvertMethod::Auto);
        assert!(empty.rows.is_empty() && empty.errors.is_empty());
        let header_only = run(HEADER, ConvertMethod::Auto);
        assert_eq!(render_rows(&header_only.rows), format!("{OUTPUT_HEADER}\n"));
    }

    #[test]
    fn bland_and_luo() {
        let out = run(&format!("{HEADER}x,25,0,1,2,3,4\n"), ConvertMethod::Bland);
        assert_eq!(out.rows[0].mean.unwrap().value, 2.0);
        assert!((out.rows[0].sd.unwrap().value - 1.25f64.sqrt()).abs() < 1e-12);
        let out = run(&format!("{HEADER}x,25,0,1,2,3,4\n"), ConvertMethod::Luo);
        assert!(out.rows[0].sd.is_none());
        assert_eq!(out.rows[0].mean.unwrap().method.label(), "luo_mean");
    }
}
