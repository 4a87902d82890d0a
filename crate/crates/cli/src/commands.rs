//! Subcommand bodies. Each returns the text to write; `main` decides where.

use anyhow::{bail, Context, Result};
use dbpareto_core::bound::parse_list;
use dbpareto_core::oracle::{
    engine_agrees, random_subset, simulate_hk_distance, simulate_hk_mafia, simulate_random_answer,
    McEstimate,
};
use dbpareto_core::report::{
    curves_csv, curves_svg, default_points, emit_instances, table_blocks, Fraud, TableBlock,
};
use dbpareto_core::spider::Normalization;
use dbpareto_core::{
    emit_table, AttributeId, Engine, Format, MafiaBound, ParetoRequest, ProtocolId,
    ProtocolInstance, SpiderRequest,
};

pub fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// Splits instance ids on commas outside braces, so `BC-{16},Tree-{16,8}` gives two ids.
pub fn split_ids(text: &str) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            ',' if depth == 0 => {
                ids.push(text[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            bail!("unbalanced braces in instance list `{text}`");
        }
    }
    if depth != 0 {
        bail!("unbalanced braces in instance list `{text}`");
    }
    ids.push(text[start..].trim().to_string());
    ids.retain(|s| !s.is_empty());
    Ok(ids)
}

fn protocol_filter(engine: &Engine, list: Option<&str>) -> Result<Option<Vec<ProtocolId>>> {
    let Some(list) = list else { return Ok(None) };
    let ids = split_list(list)
        .iter()
        .map(|p| {
            let id: ProtocolId = p.parse()?;
            engine.catalog().descriptor(id)?;
            Ok(id)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(ids))
}

pub fn generate(engine: &Engine, protocols: Option<&str>, format: Format) -> Result<String> {
    let wanted = protocol_filter(engine, protocols)?;
    let set: Vec<ProtocolInstance> = engine
        .instances()
        .iter()
        .filter(|i| wanted.as_ref().is_none_or(|w| w.contains(&i.protocol)))
        .cloned()
        .collect();
    Ok(emit_instances(&set, None, format)?)
}

/// Representative table, then one member id per line; csv and json list members in full.
pub fn pareto(engine: &Engine, y: &str, protocols: Option<&str>, format: Format) -> Result<String> {
    let req = ParetoRequest {
        protocols: protocols.map(split_list),
        ..ParetoRequest::new(y)
    };
    let out = engine.pareto(&req)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&out)? + "\n"),
        Format::Csv => {
            let members = out
                .member_ids
                .iter()
                .map(|id| engine.lookup(id).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(emit_instances(&members, None, Format::Csv)?)
        }
        Format::Text => {
            let block = TableBlock {
                y: y.parse()?,
                rows: out.rows,
                warnings: out.warnings,
            };
            let mut text = emit_table(&[block], Format::Text)?.trim_end().to_string();
            text.push_str(&format!("\n\nmembers ({})\n", out.member_ids.len()));
            for id in &out.member_ids {
                text.push_str(id);
                text.push('\n');
            }
            Ok(text)
        }
    }
}

pub fn report(engine: &Engine, y_list: &str, style: &str, format: Format) -> Result<String> {
    if style != "table3" {
        bail!("unknown report style `{style}` (expected table3)");
    }
    let bounds: Vec<MafiaBound> = parse_list(y_list)?;
    let blocks = table_blocks(
        engine.catalog(),
        engine.instances(),
        &bounds,
        engine.tolerances(),
    )?;
    Ok(emit_table(&blocks, format)?)
}

pub fn spider(
    engine: &Engine,
    instances: &str,
    normalize: Option<u32>,
    axes: Option<&str>,
) -> Result<String> {
    let axes = axes
        .map(|a| {
            split_list(a)
                .iter()
                .map(|s| s.parse::<AttributeId>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let req = SpiderRequest {
        instance_ids: split_ids(instances)?,
        normalization: normalize.map(|rounds| Normalization::Ideal { rounds }),
        axes,
    };
    Ok(engine.spider(&req)?)
}

pub fn curves(engine: &Engine, fraud: &str, points: Option<&str>, svg: bool) -> Result<String> {
    let fraud: Fraud = fraud.parse()?;
    let points = match points {
        Some(p) => split_list(p)
            .iter()
            .map(|s| s.parse::<u32>().with_context(|| format!("bad point `{s}`")))
            .collect::<Result<Vec<_>>>()?,
        None => default_points(),
    };
    let series = dbpareto_core::report::resistance_curves(engine.instances(), fraud, &points)?;
    Ok(if svg {
        curves_svg(&series, fraud)
    } else {
        curves_csv(&series)?
    })
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: u64,
    pub seed: u64,
    pub subsets: u64,
    pub subset_size: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1_000_000,
            seed: 1,
            subsets: 20,
            subset_size: 500,
        }
    }
}

/// Runs the oracle suite; the flag is false when any check failed.
pub fn verify(engine: &Engine, opts: &VerifyOptions) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut ok = true;
    let mut line = |pass: bool, what: String| {
        ok &= pass;
        out.push_str(&format!("{} {what}\n", if pass { "PASS" } else { "FAIL" }));
    };

    let size = opts.subset_size.min(engine.instances().len());
    for k in 0..opts.subsets {
        let seed = opts.seed.wrapping_add(k);
        let subset = random_subset(engine.instances(), size, seed);
        let agrees = engine_agrees(&subset, engine.tolerances())?;
        line(
            agrees,
            format!("naive oracle equals engine on subset seed={seed} size={size}"),
        );
    }

    let check = |name: &str, est: McEstimate, expected: f64| {
        (
            est.within(expected, 3.0),
            format!(
                "{name}: mean={:.6} expected={expected:.6} stderr={:.2e} trials={} seed={}",
                est.mean, est.stderr, est.trials, est.seed
            ),
        )
    };
    for n in 1..=8u32 {
        let seed = opts.seed.wrapping_mul(1000).wrapping_add(u64::from(n));
        let hk = 0.75f64.powi(n as i32);
        let half = 0.5f64.powi(n as i32);
        let (p, s) = check(
            &format!("hk mafia n={n}"),
            simulate_hk_mafia(n, opts.trials, seed)?,
            hk,
        );
        line(p, s);
        let (p, s) = check(
            &format!("hk distance n={n}"),
            simulate_hk_distance(n, opts.trials, seed)?,
            hk,
        );
        line(p, s);
        let (p, s) = check(
            &format!("random answer n={n}"),
            simulate_random_answer(n, opts.trials, seed)?,
            half,
        );
        line(p, s);
    }
    Ok((out, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_split_outside_braces() {
        assert_eq!(
            split_ids("BC-{16}, Tree-{16,8}").unwrap(),
            vec!["BC-{16}", "Tree-{16,8}"]
        );
        assert_eq!(split_ids("KA-{2,0.5}").unwrap(), vec!["KA-{2,0.5}"]);
        assert!(split_ids("").unwrap().is_empty());
        assert!(split_ids("BC-{16").is_err());
        assert!(split_ids("BC-}16{").is_err());
    }
}
