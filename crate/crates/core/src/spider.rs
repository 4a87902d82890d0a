//! Spider (radar) charts comparing up to six instances.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::{AttributeId, AttributeVector};
use crate::catalog::ProtocolInstance;

pub const MAX_SPIDER_INSTANCES: usize = 6;
const RADIUS: f64 = 160.0;
const CX: f64 = 260.0;
const CY: f64 = 230.0;
const COLORS: [&str; 6] = [
    "#d62728", "#17becf", "#2ca02c", "#9467bd", "#ff7f0e", "#1f77b4",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpiderError {
    #[error("a spider chart needs at least one instance")]
    Empty,
    #[error("a spider chart takes at most {MAX_SPIDER_INSTANCES} instances, got {0}")]
    TooMany(usize),
    #[error("normalization rounds must be positive")]
    Rounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisScale {
    /// 1 at the center, `2^-rounds` at the rim.
    LogProbability,
    /// `true` at the center, `false` at the rim.
    Boolean,
    /// `10 (1 - v / reference)` clamped to `[0, 10]`.
    Linear,
}

pub fn scale_of(attr: AttributeId) -> AxisScale {
    match attr {
        AttributeId::PM | AttributeId::PD | AttributeId::PT => AxisScale::LogProbability,
        AttributeId::NS | AttributeId::NB => AxisScale::Boolean,
        AttributeId::NBE | AttributeId::NC | AttributeId::NM => AxisScale::Linear,
    }
}

fn axis_label(attr: AttributeId) -> &'static str {
    match attr {
        AttributeId::PM => "mafia fraud",
        AttributeId::PD => "distance fraud",
        AttributeId::PT => "terrorist fraud",
        AttributeId::NBE => "bits exchanged",
        AttributeId::NC => "crypto operations",
        AttributeId::NM => "memory",
        AttributeId::NS => "final slow phase",
        AttributeId::NB => "multi-bit exchanges",
    }
}

/// What the rim of each axis stands for.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Normalization {
    /// Rounds from the largest `n` shown, linear references from the shown values.
    #[default]
    Auto,
    /// An ideal instance running `rounds` rounds.
    Ideal { rounds: u32 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpiderAxisConfig {
    /// Explicit axes; `None` applies the hiding rule.
    #[serde(default)]
    pub axes: Option<Vec<AttributeId>>,
    #[serde(default)]
    pub normalization: Normalization,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Reference {
    rounds: f64,
    e: f64,
    c: f64,
    m: f64,
}

/// Fraud axes plus every other axis on which the instances differ.
pub fn visible_axes(instances: &[&ProtocolInstance]) -> Vec<AttributeId> {
    AttributeId::ALL
        .into_iter()
        .filter(|&a| {
            a.is_probability() || {
                let first = instances[0].vector.get(a);
                instances.iter().any(|i| i.vector.get(a) != first)
            }
        })
        .collect()
}

fn reference(
    instances: &[&ProtocolInstance],
    norm: Normalization,
) -> Result<Reference, SpiderError> {
    let max = |f: fn(&AttributeVector) -> u64| {
        instances
            .iter()
            .map(|i| f(&i.vector))
            .max()
            .unwrap_or(1)
            .max(1) as f64
            * 5.0
    };
    let rounds = match norm {
        Normalization::Auto => instances.iter().map(|i| i.params.n).max().unwrap_or(1),
        Normalization::Ideal { rounds } => rounds,
    };
    if rounds == 0 {
        return Err(SpiderError::Rounds);
    }
    Ok(Reference {
        rounds: rounds as f64,
        e: max(|v| v.e),
        c: max(|v| v.c),
        m: max(|v| v.m),
    })
}

/// Score in `[0, 10]`; 10 is drawn on the rim.
fn score(v: &AttributeVector, attr: AttributeId, r: &Reference) -> f64 {
    let linear = |x: u64, reference: f64| (10.0 * (1.0 - x as f64 / reference)).clamp(0.0, 10.0);
    match attr {
        AttributeId::PM | AttributeId::PD | AttributeId::PT => {
            let p = match attr {
                AttributeId::PM => v.p_m,
                AttributeId::PD => v.p_d,
                _ => v.p_t,
            };
            (10.0 * -p.log2() / r.rounds).clamp(0.0, 10.0)
        }
        AttributeId::NS => {
            if v.s {
                0.0
            } else {
                10.0
            }
        }
        AttributeId::NB => {
            if v.b {
                0.0
            } else {
                10.0
            }
        }
        AttributeId::NBE => linear(v.e, r.e),
        AttributeId::NC => linear(v.c, r.c),
        AttributeId::NM => linear(v.m, r.m),
    }
}

/// Per instance, the scores along `axes`.
pub fn spider_scores(
    instances: &[&ProtocolInstance],
    axes: &[AttributeId],
    norm: Normalization,
) -> Result<Vec<Vec<f64>>, SpiderError> {
    let r = reference(instances, norm)?;
    Ok(instances
        .iter()
        .map(|i| axes.iter().map(|&a| score(&i.vector, a, &r)).collect())
        .collect())
}

fn point(axis: usize, count: usize, radius: f64) -> (f64, f64) {
    let angle = -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * axis as f64 / count as f64;
    (CX + radius * angle.cos(), CY + radius * angle.sin())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn emit_spider(
    instances: &[&ProtocolInstance],
    config: &SpiderAxisConfig,
) -> Result<String, SpiderError> {
    if instances.is_empty() {
        return Err(SpiderError::Empty);
    }
    if instances.len() > MAX_SPIDER_INSTANCES {
        return Err(SpiderError::TooMany(instances.len()));
    }
    let axes = config
        .axes
        .clone()
        .unwrap_or_else(|| visible_axes(instances));
    let scores = spider_scores(instances, &axes, config.normalization)?;
    let k = axes.len().max(1);

    let mut s = String::new();
    s.push_str(r#"<svg xmlns="http://www.w3.org/2000/svg" width="560" height="560" viewBox="0 0 560 560" font-family="sans-serif" font-size="12">"#);
    s.push('\n');
    s.push_str(r#"<rect width="560" height="560" fill="white"/>"#);
    s.push('\n');
    for ring in 1..=5 {
        let r = RADIUS * ring as f64 / 5.0;
        let pts: Vec<String> = (0..k)
            .map(|a| {
                let (x, y) = point(a, k, r);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#cccccc"/>"##,
            pts.join(" ")
        )
        .unwrap();
    }
    for (a, attr) in axes.iter().enumerate() {
        let (x, y) = point(a, k, RADIUS);
        let (lx, ly) = point(a, k, RADIUS + 22.0);
        let anchor = if (lx - CX).abs() < 1.0 {
            "middle"
        } else if lx > CX {
            "start"
        } else {
            "end"
        };
        writeln!(
            s,
            r##"<line x1="{CX:.2}" y1="{CY:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#888888"/>"##
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{lx:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            ly + 4.0,
            axis_label(*attr)
        )
        .unwrap();
    }
    for (i, (inst, sc)) in instances.iter().zip(&scores).enumerate() {
        let color = COLORS[i];
        let pts: Vec<String> = sc
            .iter()
            .enumerate()
            .map(|(a, v)| {
                let (x, y) = point(a, k, RADIUS * v / 10.0);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r#"<polygon class="instance" data-id="{}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            escape(&inst.id),
            pts.join(" ")
        )
        .unwrap();
        let ly = 470.0 + 14.0 * i as f64;
        writeln!(
            s,
            r#"<rect x="20" y="{:.2}" width="10" height="10" fill="{color}"/><text x="36" y="{:.2}">{}</text>"#,
            ly,
            ly + 9.0,
            escape(&inst.id)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}
