//! Scaled tables, instance exports and resistance-versus-rounds curves.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::attribute::{Probability, Tolerances};
use crate::bound::MafiaBound;
use crate::catalog::{Catalog, ProtocolId, ProtocolInstance, ProtocolParams, Provenance};
use crate::pareto::{representative_rows, solve, SolutionSet, SummaryRow};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown format `{0}` (expected text, csv or json)")]
    UnknownFormat(String),
    #[error("unknown fraud kind `{0}` (expected mafia, distance or terrorist)")]
    UnknownFraud(String),
    #[error("at least one bound is required")]
    NoBounds,
    #[error("at least one point is required")]
    NoPoints,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" | "table3" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

/// A probability rounded up to a power of two; zero passes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scaled {
    Zero,
    Pow2(i32),
}

impl Scaled {
    pub fn exponent(self) -> Option<i32> {
        match self {
            Scaled::Zero => None,
            Scaled::Pow2(k) => Some(k),
        }
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scaled::Zero => f.write_str("0"),
            Scaled::Pow2(k) => write!(f, "2^{k}"),
        }
    }
}

impl Serialize for Scaled {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `2^ceil(log2 p)`.
pub fn scale_security(p: Probability) -> Scaled {
    if p.is_zero() {
        Scaled::Zero
    } else {
        Scaled::Pow2(p.log2().ceil() as i32)
    }
}

/// As [`scale_security`], as a probability.
pub fn scale_probability(p: Probability) -> Probability {
    match scale_security(p) {
        Scaled::Zero => Probability::ZERO,
        Scaled::Pow2(k) => Probability::from_log2(k as f64),
    }
}

/// `floor(bits / 1024)`.
pub fn scale_memory(bits: u64) -> u64 {
    bits / 1024
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledRow {
    pub id: String,
    pub n: u32,
    pub p_m: Scaled,
    pub p_d: Scaled,
    pub p_t: Scaled,
    pub b: bool,
    pub c: u64,
    pub m_kb: u64,
    pub f: bool,
    pub total: usize,
}

impl ScaledRow {
    pub fn from_summary(row: &SummaryRow) -> Self {
        let r = &row.representative;
        let v = &r.vector;
        ScaledRow {
            id: r.id.clone(),
            n: r.params.n,
            p_m: scale_security(v.p_m),
            p_d: scale_security(v.p_d),
            p_t: scale_security(v.p_t),
            b: v.b,
            c: v.c,
            m_kb: scale_memory(v.m),
            f: v.s,
            total: row.total,
        }
    }
}

/// One bound's representatives and totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableBlock {
    pub y: MafiaBound,
    pub rows: Vec<ScaledRow>,
    pub warnings: Vec<String>,
}

pub fn provenance_warnings(catalog: &Catalog, solution: &SolutionSet) -> Vec<String> {
    solution
        .totals()
        .keys()
        .filter_map(|&p| {
            let d = catalog.descriptor(p).ok()?;
            let mut cited: Vec<String> = d
                .formulas()
                .iter()
                .filter(|f| f.provenance == Provenance::CitedReference)
                .map(|f| format!("{} ({})", f.formula, f.reference.as_deref().unwrap_or("?")))
                .collect();
            cited.dedup();
            (!cited.is_empty()).then(|| {
                format!(
                    "{p}: total depends on cited-reference evaluators {}",
                    cited.join(", ")
                )
            })
        })
        .collect()
}

pub fn block_for(
    catalog: &Catalog,
    set: &[ProtocolInstance],
    y: &MafiaBound,
    tol: &Tolerances,
) -> TableBlock {
    let solution = solve(set, y, tol);
    TableBlock {
        y: y.clone(),
        rows: representative_rows(&solution)
            .iter()
            .map(ScaledRow::from_summary)
            .collect(),
        warnings: provenance_warnings(catalog, &solution),
    }
}

pub fn table_blocks(
    catalog: &Catalog,
    set: &[ProtocolInstance],
    y_list: &[MafiaBound],
    tol: &Tolerances,
) -> Result<Vec<TableBlock>, ReportError> {
    if y_list.is_empty() {
        return Err(ReportError::NoBounds);
    }
    Ok(y_list
        .iter()
        .map(|y| block_for(catalog, set, y, tol))
        .collect())
}

const COLUMNS: [&str; 10] = [
    "id", "n", "p_m", "p_d", "p_t", "b", "c", "m_kb", "f", "total",
];

fn cells(r: &ScaledRow) -> [String; 10] {
    [
        r.id.clone(),
        r.n.to_string(),
        r.p_m.to_string(),
        r.p_d.to_string(),
        r.p_t.to_string(),
        r.b.to_string(),
        r.c.to_string(),
        r.m_kb.to_string(),
        r.f.to_string(),
        r.total.to_string(),
    ]
}

pub fn emit_table(blocks: &[TableBlock], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(blocks)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["y"];
            header.extend(COLUMNS);
            w.write_record(&header)?;
            for b in blocks {
                for r in &b.rows {
                    let mut rec = vec![b.y.to_string()];
                    rec.extend(cells(r));
                    w.write_record(&rec)?;
                }
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        Format::Text => {
            let mut out = String::new();
            for b in blocks {
                writeln!(out, "D[{}]", b.y).unwrap();
                let mut widths = COLUMNS.map(str::len);
                let rows: Vec<[String; 10]> = b.rows.iter().map(cells).collect();
                for r in &rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cols: &[String]| {
                    cols.iter()
                        .zip(widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                        .trim_end()
                        .to_string()
                };
                out.push_str(&line(&COLUMNS.map(String::from)));
                out.push('\n');
                for r in &rows {
                    out.push_str(&line(r));
                    out.push('\n');
                }
                for w in &b.warnings {
                    writeln!(out, "warning: {w}").unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

/// Raw and scaled attributes of one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRow {
    pub id: String,
    pub protocol: ProtocolId,
    pub params: ProtocolParams,
    pub log2_p_m: f64,
    pub log2_p_d: f64,
    pub log2_p_t: f64,
    pub e: u64,
    pub c: u64,
    pub m: u64,
    pub s: bool,
    pub b: bool,
    pub scaled_p_m: Scaled,
    pub scaled_p_d: Scaled,
    pub scaled_p_t: Scaled,
    pub m_kb: u64,
}

impl From<&ProtocolInstance> for InstanceRow {
    fn from(i: &ProtocolInstance) -> Self {
        let v = &i.vector;
        InstanceRow {
            id: i.id.clone(),
            protocol: i.protocol,
            params: i.params,
            log2_p_m: v.p_m.log2(),
            log2_p_d: v.p_d.log2(),
            log2_p_t: v.p_t.log2(),
            e: v.e,
            c: v.c,
            m: v.m,
            s: v.s,
            b: v.b,
            scaled_p_m: scale_security(v.p_m),
            scaled_p_d: scale_security(v.p_d),
            scaled_p_t: scale_security(v.p_t),
            m_kb: scale_memory(v.m),
        }
    }
}

fn fmt_log(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        x.to_string()
    }
}

/// One row per instance; `nondominated` adds a marker column when given.
pub fn emit_instances(
    set: &[ProtocolInstance],
    nondominated: Option<&SolutionSet>,
    format: Format,
) -> Result<String, ReportError> {
    let marker = |id: &str| nondominated.map(|s| s.members.iter().any(|m| m.id == id));
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Marked {
                #[serde(flatten)]
                row: InstanceRow,
                #[serde(skip_serializing_if = "Option::is_none")]
                nondominated: Option<bool>,
            }
            let rows: Vec<Marked> = set
                .iter()
                .map(|i| Marked {
                    row: InstanceRow::from(i),
                    nondominated: marker(&i.id),
                })
                .collect();
            Ok(serde_json::to_string(&rows)? + "\n")
        }
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec![
                "id",
                "protocol",
                "n",
                "p_f",
                "p_d_frac",
                "ell",
                "t",
                "log2_p_m",
                "log2_p_d",
                "log2_p_t",
                "e",
                "c",
                "m",
                "s",
                "b",
                "scaled_p_m",
                "scaled_p_d",
                "scaled_p_t",
                "m_kb",
            ];
            if nondominated.is_some() {
                header.push("nondominated");
            }
            w.write_record(&header)?;
            let opt = |v: Option<String>| v.unwrap_or_default();
            for i in set {
                let r = InstanceRow::from(i);
                let mut rec = vec![
                    r.id.clone(),
                    r.protocol.to_string(),
                    r.params.n.to_string(),
                    opt(r.params.p_f.map(|v| v.to_string())),
                    opt(r.params.p_d_frac.map(|v| v.to_string())),
                    opt(r.params.ell.map(|v| v.to_string())),
                    opt(r.params.t.map(|v| v.to_string())),
                    fmt_log(r.log2_p_m),
                    fmt_log(r.log2_p_d),
                    fmt_log(r.log2_p_t),
                    r.e.to_string(),
                    r.c.to_string(),
                    r.m.to_string(),
                    r.s.to_string(),
                    r.b.to_string(),
                    r.scaled_p_m.to_string(),
                    r.scaled_p_d.to_string(),
                    r.scaled_p_t.to_string(),
                    r.m_kb.to_string(),
                ];
                if let Some(nd) = marker(&i.id) {
                    rec.push(nd.to_string());
                }
                w.write_record(&rec)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fraud {
    Mafia,
    Distance,
    Terrorist,
}

impl Fraud {
    pub fn of(self, i: &ProtocolInstance) -> Probability {
        match self {
            Fraud::Mafia => i.vector.p_m,
            Fraud::Distance => i.vector.p_d,
            Fraud::Terrorist => i.vector.p_t,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Fraud::Mafia => "mafia",
            Fraud::Distance => "distance",
            Fraud::Terrorist => "terrorist",
        }
    }
}

impl FromStr for Fraud {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mafia" => Ok(Fraud::Mafia),
            "distance" => Ok(Fraud::Distance),
            "terrorist" => Ok(Fraud::Terrorist),
            _ => Err(ReportError::UnknownFraud(s.to_string())),
        }
    }
}

/// Default curve points: 32, 64, ..., 256.
pub fn default_points() -> Vec<u32> {
    (1..=8).map(|k| 32 * k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: u32,
    pub log2_value: f64,
    pub instance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub protocol: ProtocolId,
    pub points: Vec<CurvePoint>,
}

/// Per protocol and point, the instance with `n = point` minimising the chosen fraud.
pub fn resistance_curves(
    set: &[ProtocolInstance],
    fraud: Fraud,
    points: &[u32],
) -> Result<Vec<CurveSeries>, ReportError> {
    if points.is_empty() {
        return Err(ReportError::NoPoints);
    }
    let mut protocols: Vec<ProtocolId> = set.iter().map(|i| i.protocol).collect();
    protocols.sort();
    protocols.dedup();
    Ok(protocols
        .into_iter()
        .map(|p| {
            let points = points
                .iter()
                .filter_map(|&n| {
                    set.iter()
                        .filter(|i| i.protocol == p && i.params.n == n)
                        .min_by(|a, b| {
                            fraud
                                .of(a)
                                .log2()
                                .total_cmp(&fraud.of(b).log2())
                                .then_with(|| a.params.cmp_lex(&b.params))
                        })
                        .map(|i| CurvePoint {
                            n,
                            log2_value: fraud.of(i).log2(),
                            instance: i.id.clone(),
                        })
                })
                .collect();
            CurveSeries {
                protocol: p,
                points,
            }
        })
        .collect())
}

pub fn curves_csv(series: &[CurveSeries]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["protocol", "n", "log2_value", "instance"])?;
    for s in series {
        for p in &s.points {
            w.write_record([
                s.protocol.to_string(),
                p.n.to_string(),
                fmt_log(p.log2_value),
                p.instance.clone(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const PALETTE: [&str; 13] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#843c39",
];

/// Line chart of the series, log2 value against rounds.
pub fn curves_svg(series: &[CurveSeries], fraud: Fraud) -> String {
    let (w, h, left, top, plot_w, plot_h) = (720.0, 480.0, 70.0, 40.0, 480.0, 380.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let n_max = all.clone().map(|p| p.n).max().unwrap_or(1) as f64;
    let n_min = all.clone().map(|p| p.n).min().unwrap_or(0) as f64;
    let low = all
        .map(|p| p.log2_value)
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min)
        .floor()
        .min(-1.0);
    let span = (n_max - n_min).max(1.0);
    let x = |n: u32| left + (n as f64 - n_min) / span * plot_w;
    let y = |v: f64| top + (v.max(low) / low) * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{left}" y="20" font-size="14">{} fraud resistance (log2)</text>"#,
        fraud.as_str()
    )
    .unwrap();
    writeln!(
        s,
        r#"<path d="M{left} {top}V{:.1}H{:.1}" fill="none" stroke="black"/>"#,
        top + plot_h,
        left + plot_w
    )
    .unwrap();
    for k in 0..=4 {
        let v = low * k as f64 / 4.0;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}</text>"#,
            left - 6.0,
            y(v) + 4.0,
            v
        )
        .unwrap();
    }
    let mut ticks: Vec<u32> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.n))
        .collect();
    ticks.sort_unstable();
    ticks.dedup();
    for n in ticks {
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
            x(n),
            top + plot_h + 16.0
        )
        .unwrap();
    }
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|p| format!("{:.1},{:.1}", x(p.n), y(p.log2_value)))
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = top + 14.0 * i as f64;
        writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            left + plot_w + 20.0,
            ly,
            left + plot_w + 36.0,
            ly + 9.0,
            ser.protocol
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_examples() {
        let p = Probability::pow(0.75, 10.0);
        assert_eq!(scale_security(p), Scaled::Pow2(-4));
        assert_eq!(scale_security(Probability::ONE), Scaled::Pow2(0));
        assert_eq!(
            scale_security(Probability::from_log2(-39.0)),
            Scaled::Pow2(-39)
        );
        assert_eq!(scale_security(Probability::ZERO), Scaled::Zero);
        assert_eq!(scale_memory(1023), 0);
        assert_eq!(scale_memory(1_311_126), 1280);
        assert_eq!(scale_memory(1320), 1);
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
        assert!("sideways".parse::<Fraud>().is_err());
    }
}
