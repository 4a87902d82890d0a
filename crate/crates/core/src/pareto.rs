//! Mafia-bound filtering and nondominated-set computation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::attribute::{dominates, AttributeVector, Probability, Tolerances};
use crate::bound::MafiaBound;
use crate::catalog::{ProtocolId, ProtocolInstance};

/// `D[y]`: the instances whose mafia-fraud success is at most `y`.
pub fn filter_mafia_bound(set: &[ProtocolInstance], y: &MafiaBound) -> Vec<ProtocolInstance> {
    filter_by_probability(set, y.probability())
}

pub fn filter_by_probability(set: &[ProtocolInstance], y: Probability) -> Vec<ProtocolInstance> {
    set.iter()
        .filter(|i| i.vector.p_m.log2() <= y.log2())
        .cloned()
        .collect()
}

/// Nondominated members of some source set.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub members: Vec<ProtocolInstance>,
    pub source: String,
}

impl SolutionSet {
    pub fn ids(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.id.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Members per protocol, in protocol order.
    pub fn totals(&self) -> BTreeMap<ProtocolId, usize> {
        let mut out = BTreeMap::new();
        for m in &self.members {
            *out.entry(m.protocol).or_insert(0) += 1;
        }
        out
    }
}

pub(crate) fn sort_members(members: &mut [ProtocolInstance]) {
    members.sort_by(|a, b| {
        a.protocol
            .cmp(&b.protocol)
            .then_with(|| a.params.cmp_lex(&b.params))
    });
}

/// Indices of the members of `vectors` that no other member dominates.
///
/// Candidates are scanned in ascending mafia-fraud order; a dominator of `x`
/// must have `p_m < x.p_m + 1` in log2, so only that prefix is checked.
pub fn nondominated_indices(vectors: &[AttributeVector], tol: &Tolerances) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| vectors[a].p_m.log2().total_cmp(&vectors[b].p_m.log2()));
    let sorted: Vec<AttributeVector> = order.iter().map(|&i| vectors[i]).collect();
    let keys: Vec<f64> = sorted.iter().map(|v| v.p_m.log2()).collect();

    let keep: Vec<bool> = sorted
        .par_iter()
        .with_min_len(64)
        .map(|x| {
            let limit = x.p_m.log2() + 1.0;
            let end = if x.p_m.is_zero() {
                keys.partition_point(|&k| k == f64::NEG_INFINITY)
            } else {
                keys.partition_point(|&k| k < limit)
            };
            !sorted[..end].iter().any(|cand| dominates(cand, x, tol))
        })
        .collect();

    let mut out: Vec<usize> = order
        .into_iter()
        .zip(keep)
        .filter_map(|(i, k)| k.then_some(i))
        .collect();
    out.sort_unstable();
    out
}

/// The nondominated subset of `set`, ordered by protocol then parameters.
pub fn nondominated(set: &[ProtocolInstance], tol: &Tolerances) -> SolutionSet {
    let vectors: Vec<AttributeVector> = set.iter().map(|i| i.vector).collect();
    let mut members: Vec<ProtocolInstance> = nondominated_indices(&vectors, tol)
        .into_iter()
        .map(|i| set[i].clone())
        .collect();
    sort_members(&mut members);
    SolutionSet {
        members,
        source: format!("{} instances", set.len()),
    }
}

/// `nondominated(filter_mafia_bound(set, y))`.
pub fn solve(set: &[ProtocolInstance], y: &MafiaBound, tol: &Tolerances) -> SolutionSet {
    let filtered = filter_mafia_bound(set, y);
    let mut s = nondominated(&filtered, tol);
    s.source = format!("D[{}] ({} instances)", y, filtered.len());
    s
}

/// One protocol's representative within a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub representative: ProtocolInstance,
    pub total: usize,
}

/// Per protocol: the member with the fewest fast-phase bits, ties by parameters, plus the count.
pub fn representative_rows(solution: &SolutionSet) -> Vec<SummaryRow> {
    let mut best: BTreeMap<ProtocolId, (&ProtocolInstance, usize)> = BTreeMap::new();
    for m in &solution.members {
        best.entry(m.protocol)
            .and_modify(|(rep, count)| {
                *count += 1;
                let better = m.vector.e < rep.vector.e
                    || (m.vector.e == rep.vector.e && m.params.cmp_lex(&rep.params).is_lt());
                if better {
                    *rep = m;
                }
            })
            .or_insert((m, 1));
    }
    best.into_values()
        .map(|(rep, total)| SummaryRow {
            representative: rep.clone(),
            total,
        })
        .collect()
}
