//! The protocol roster, parameter grids, attribute formulas and instance generation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::{AttributeVector, Probability};

const BUILTIN_CATALOG: &str = include_str!("catalog.toml");

pub const MAX_ROUNDS: u32 = 256;
pub const MAX_TREE_DEPTH: u32 = 32;
pub const MAX_SYMBOL_BITS: u32 = 32;
pub const FRACTION_STEPS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolId {
    BB,
    BC,
    HK,
    KA,
    MAD,
    MP,
    Poulidor,
    RC,
    SKI,
    SwissKnife,
    TMA,
    Tree,
    YKHL,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 13] = [
        ProtocolId::BB,
        ProtocolId::BC,
        ProtocolId::HK,
        ProtocolId::KA,
        ProtocolId::MAD,
        ProtocolId::MP,
        ProtocolId::Poulidor,
        ProtocolId::RC,
        ProtocolId::SKI,
        ProtocolId::SwissKnife,
        ProtocolId::TMA,
        ProtocolId::Tree,
        ProtocolId::YKHL,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::BB => "BB",
            ProtocolId::BC => "BC",
            ProtocolId::HK => "HK",
            ProtocolId::KA => "KA",
            ProtocolId::MAD => "MAD",
            ProtocolId::MP => "MP",
            ProtocolId::Poulidor => "Poulidor",
            ProtocolId::RC => "RC",
            ProtocolId::SKI => "SKI",
            ProtocolId::SwissKnife => "SwissKnife",
            ProtocolId::TMA => "TMA",
            ProtocolId::Tree => "Tree",
            ProtocolId::YKHL => "YKHL",
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolId::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| CatalogError::UnknownProtocol(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error("{protocol}: parameter schema violation: {detail}")]
    Schema {
        protocol: ProtocolId,
        detail: String,
    },
    #[error("{protocol}: formula `{formula}` unavailable; install an evaluator for {reference}")]
    FormulaUnavailable {
        protocol: ProtocolId,
        formula: String,
        reference: String,
    },
    #[error("instance {id}: {source}")]
    Instance {
        id: String,
        #[source]
        source: Box<CatalogError>,
    },
    #[error("malformed instance id `{0}`")]
    BadId(String),
    #[error("catalog file: {0}")]
    File(String),
    #[error("invalid constants: {0}")]
    Constants(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamName {
    #[serde(rename = "n")]
    N,
    #[serde(rename = "p_f")]
    VoidProbability,
    #[serde(rename = "p_d_frac")]
    PredefinedFraction,
    #[serde(rename = "ell")]
    Depth,
    #[serde(rename = "t")]
    SymbolBits,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::N => "n",
            ParamName::VoidProbability => "p_f",
            ParamName::PredefinedFraction => "p_d_frac",
            ParamName::Depth => "ell",
            ParamName::SymbolBits => "t",
        }
    }

    /// Grid values of a secondary parameter, in ascending order.
    fn grid(self) -> Vec<SecondValue> {
        match self {
            ParamName::N => (1..=MAX_ROUNDS).map(SecondValue::Int).collect(),
            ParamName::VoidProbability | ParamName::PredefinedFraction => (0..=FRACTION_STEPS)
                .map(|i| SecondValue::Real(i as f64 / FRACTION_STEPS as f64))
                .collect(),
            ParamName::Depth => (1..=MAX_TREE_DEPTH).map(SecondValue::Int).collect(),
            ParamName::SymbolBits => (2..=MAX_SYMBOL_BITS).map(SecondValue::Int).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum SecondValue {
    Int(u32),
    Real(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_d_frac: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
}

impl ProtocolParams {
    pub fn rounds(n: u32) -> Self {
        ProtocolParams {
            n,
            ..Default::default()
        }
    }

    fn with(mut self, name: ParamName, v: SecondValue) -> Self {
        match (name, v) {
            (ParamName::N, SecondValue::Int(x)) => self.n = x,
            (ParamName::VoidProbability, SecondValue::Real(x)) => self.p_f = Some(x),
            (ParamName::PredefinedFraction, SecondValue::Real(x)) => self.p_d_frac = Some(x),
            (ParamName::Depth, SecondValue::Int(x)) => self.ell = Some(x),
            (ParamName::SymbolBits, SecondValue::Int(x)) => self.t = Some(x),
            _ => unreachable!("grid value kind matches parameter"),
        }
        self
    }

    fn has(&self, name: ParamName) -> bool {
        match name {
            ParamName::N => true,
            ParamName::VoidProbability => self.p_f.is_some(),
            ParamName::PredefinedFraction => self.p_d_frac.is_some(),
            ParamName::Depth => self.ell.is_some(),
            ParamName::SymbolBits => self.t.is_some(),
        }
    }

    fn value_string(&self, name: ParamName) -> String {
        match name {
            ParamName::N => self.n.to_string(),
            ParamName::VoidProbability => self.p_f.map(|v| v.to_string()).unwrap_or_default(),
            ParamName::PredefinedFraction => {
                self.p_d_frac.map(|v| v.to_string()).unwrap_or_default()
            }
            ParamName::Depth => self.ell.map(|v| v.to_string()).unwrap_or_default(),
            ParamName::SymbolBits => self.t.map(|v| v.to_string()).unwrap_or_default(),
        }
    }

    /// Bits per fast-phase message.
    pub fn symbol_bits(&self) -> u32 {
        self.t.unwrap_or(1)
    }

    /// Number of predefined challenges, `floor(p_d_frac * n)`.
    pub fn predefined(&self) -> u32 {
        let frac = self.p_d_frac.unwrap_or(0.0);
        (frac * self.n as f64 + 1e-9).floor() as u32
    }

    /// Sort key: n first, then the secondary parameter.
    fn sort_key(&self) -> (u32, f64) {
        let second = self
            .p_f
            .or(self.p_d_frac)
            .or(self.ell.map(f64::from))
            .or(self.t.map(f64::from))
            .unwrap_or(0.0);
        (self.n, second)
    }

    pub fn cmp_lex(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = (self.sort_key(), other.sort_key());
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalConstants {
    /// Nonce size in bits.
    pub delta: u64,
    /// Signature, commitment and MAC size in bits.
    pub sigma: u64,
    /// Secret key size in bits.
    pub kappa: u64,
}

impl Default for GlobalConstants {
    fn default() -> Self {
        GlobalConstants {
            delta: 128,
            sigma: 128,
            kappa: 128,
        }
    }
}

impl GlobalConstants {
    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.delta == 0 || self.sigma == 0 {
            return Err(CatalogError::Constants(
                "delta and sigma must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    CitedReference,
    BoundOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaSpec {
    pub formula: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemoryTerm {
    #[default]
    None,
    TreeNodes,
    SkiRounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorySpec {
    pub n_coef: u64,
    pub delta_coef: u64,
    pub sigma_coef: u64,
    #[serde(default)]
    pub term: MemoryTerm,
}

impl MemorySpec {
    pub fn bits(&self, p: &ProtocolParams, k: &GlobalConstants) -> u64 {
        let n = p.n as u64;
        let term = match self.term {
            MemoryTerm::None => 0,
            MemoryTerm::TreeNodes => {
                let l = p.ell.unwrap_or(1) as u64;
                ((1u64 << (l + 1)) - 1) * (n / l)
            }
            MemoryTerm::SkiRounds => n * (p.symbol_bits() as u64 + 1),
        };
        self.n_coef * n + self.delta_coef * k.delta + self.sigma_coef * k.sigma + term
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolDescriptor {
    pub id: ProtocolId,
    pub name: String,
    pub params: Vec<ParamName>,
    pub crypto_ops: u64,
    pub slow_phase: bool,
    pub multi_bit: bool,
    #[serde(default)]
    pub e_estimated: bool,
    pub memory: MemorySpec,
    pub mafia: FormulaSpec,
    pub distance: FormulaSpec,
    pub terrorist: FormulaSpec,
}

impl ProtocolDescriptor {
    pub fn formulas(&self) -> [&FormulaSpec; 3] {
        [&self.mafia, &self.distance, &self.terrorist]
    }

    pub fn has_cited_formula(&self) -> bool {
        self.formulas()
            .iter()
            .any(|f| f.provenance == Provenance::CitedReference)
    }

    pub fn check_params(&self, p: &ProtocolParams) -> Result<(), CatalogError> {
        let err = |detail: String| CatalogError::Schema {
            protocol: self.id,
            detail,
        };
        if p.n == 0 {
            return Err(err("n must be at least 1".into()));
        }
        for name in [
            ParamName::VoidProbability,
            ParamName::PredefinedFraction,
            ParamName::Depth,
            ParamName::SymbolBits,
        ] {
            let declared = self.params.contains(&name);
            match (declared, p.has(name)) {
                (true, false) => return Err(err(format!("missing parameter {}", name.as_str()))),
                (false, true) => {
                    return Err(err(format!("unexpected parameter {}", name.as_str())))
                }
                _ => {}
            }
        }
        for v in [p.p_f, p.p_d_frac].into_iter().flatten() {
            if !(0.0..=1.0).contains(&v) {
                return Err(err(format!("probability parameter {v} outside [0, 1]")));
            }
        }
        if p.ell == Some(0) {
            return Err(err("ell must be at least 1".into()));
        }
        if p.ell.is_some_and(|l| l > 62) {
            return Err(err("ell too large".into()));
        }
        if p.t.is_some_and(|t| t < 2) {
            return Err(err("t must be at least 2".into()));
        }
        Ok(())
    }

    /// Grid points in lexicographic order of the parameter tuple.
    pub fn parameter_grid(&self) -> Vec<ProtocolParams> {
        let second = self.params.iter().copied().find(|p| *p != ParamName::N);
        let mut out = Vec::new();
        for n in 1..=MAX_ROUNDS {
            let base = ProtocolParams::rounds(n);
            match second {
                None => out.push(base),
                Some(name) => out.extend(name.grid().into_iter().map(|v| base.with(name, v))),
            }
        }
        out
    }

    pub fn format_id(&self, p: &ProtocolParams) -> String {
        let parts: Vec<String> = self.params.iter().map(|&k| p.value_string(k)).collect();
        format!("{}-{{{}}}", self.id, parts.join(","))
    }
}

pub type FormulaFn = fn(&ProtocolParams) -> Probability;

/// Named probability evaluators referenced from the catalog file.
#[derive(Clone)]
pub struct FormulaRegistry {
    map: HashMap<String, FormulaFn>,
}

impl fmt::Debug for FormulaRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<&String> = self.map.keys().collect();
        names.sort();
        f.debug_struct("FormulaRegistry")
            .field("names", &names)
            .finish()
    }
}

impl FormulaRegistry {
    pub fn empty() -> Self {
        FormulaRegistry {
            map: HashMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = FormulaRegistry::empty();
        r.install("one", formulas::one);
        r.install("half-pow-n", formulas::half_pow_n);
        r.install("three-quarters-pow-n", formulas::three_quarters_pow_n);
        r.install("seven-eighths-pow-n", formulas::seven_eighths_pow_n);
        r.install("tree-mafia", formulas::tree_mafia);
        r.install("tree-distance", formulas::tree_distance);
        r.install("ski-mafia", formulas::ski_mafia);
        r.install("ski-terrorist", formulas::ski_terrorist);
        r.install("ka-mafia", formulas::ka_mafia);
        r.install("ka-distance", formulas::ka_distance);
        r.install("mp-mafia", formulas::mp_mafia);
        r.install("mp-distance", formulas::mp_distance);
        r.install("poulidor-mafia-fit", formulas::poulidor_mafia_fit);
        r.install("poulidor-distance-fit", formulas::poulidor_distance_fit);
        r.install("tma-sync-chain", formulas::tma_sync_chain);
        r
    }

    pub fn install(&mut self, name: &str, f: FormulaFn) -> Option<FormulaFn> {
        self.map.insert(name.to_string(), f)
    }

    pub fn remove(&mut self, name: &str) -> Option<FormulaFn> {
        self.map.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<FormulaFn> {
        self.map.get(name).copied()
    }
}

/// The built-in attribute formulas.
pub mod formulas {
    use super::ProtocolParams;
    use crate::attribute::Probability;

    fn log2_sum(a: f64, b: f64) -> f64 {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if lo == f64::NEG_INFINITY {
            return hi;
        }
        hi + (1.0 + (lo - hi).exp2()).log2()
    }

    pub fn one(_: &ProtocolParams) -> Probability {
        Probability::ONE
    }

    pub fn half_pow_n(p: &ProtocolParams) -> Probability {
        Probability::pow(0.5, p.n as f64)
    }

    pub fn three_quarters_pow_n(p: &ProtocolParams) -> Probability {
        Probability::pow(0.75, p.n as f64)
    }

    pub fn seven_eighths_pow_n(p: &ProtocolParams) -> Probability {
        Probability::pow(0.875, p.n as f64)
    }

    /// `((1/2)^l (l/2 + 1))^floor(n/l)`
    pub fn tree_mafia(p: &ProtocolParams) -> Probability {
        let l = p.ell.unwrap_or(1) as f64;
        let k = (p.n / p.ell.unwrap_or(1)) as f64;
        if k == 0.0 {
            return Probability::ONE;
        }
        Probability::from_log2(k * (-l + (l / 2.0 + 1.0).log2()))
    }

    /// `(3 / 2^(l+1))^(floor(n/l) / 2)`
    pub fn tree_distance(p: &ProtocolParams) -> Probability {
        let l = p.ell.unwrap_or(1) as f64;
        let k = (p.n / p.ell.unwrap_or(1)) as f64;
        if k == 0.0 {
            return Probability::ONE;
        }
        Probability::from_log2(k / 2.0 * (3f64.log2() - (l + 1.0)))
    }

    pub fn ski_mafia(p: &ProtocolParams) -> Probability {
        let t = p.symbol_bits() as f64;
        Probability::pow((t + 1.0) / (2.0 * t), p.n as f64)
    }

    pub fn ski_terrorist(p: &ProtocolParams) -> Probability {
        let t = p.symbol_bits() as f64;
        Probability::pow((2.0 * t - 2.0) / (2.0 * t), p.n as f64)
    }

    /// `(1/2)^a (3/4)^(n-a) + a (1/2)^(n+1)` with `a` predefined challenges.
    pub fn ka_mafia(p: &ProtocolParams) -> Probability {
        let n = p.n as f64;
        let a = p.predefined() as f64;
        let guess = -a + (n - a) * 0.75f64.log2();
        let detect = if a > 0.0 {
            a.log2() - (n + 1.0)
        } else {
            f64::NEG_INFINITY
        };
        Probability::from_log2(log2_sum(guess, detect))
    }

    pub fn ka_distance(p: &ProtocolParams) -> Probability {
        Probability::pow(0.75, (p.n - p.predefined()) as f64)
    }

    pub fn mp_mafia(p: &ProtocolParams) -> Probability {
        let pf = p.p_f.unwrap_or(0.0);
        let base = ((1.0 + pf) / 2.0).max(0.75 * (1.0 - pf));
        Probability::pow(base, p.n as f64)
    }

    pub fn mp_distance(p: &ProtocolParams) -> Probability {
        let pf = p.p_f.unwrap_or(0.0);
        Probability::pow((3.0 + pf) / 4.0, p.n as f64)
    }

    /// Empirical model: `log2 p = -n + 1.735 sqrt(n) - 1.38`.
    pub fn poulidor_mafia_fit(p: &ProtocolParams) -> Probability {
        let n = p.n as f64;
        Probability::from_log2(-n + 1.735 * n.sqrt() - 1.38)
    }

    /// Empirical model: `log2 p = -n/2 + 0.7 sqrt(n)`.
    pub fn poulidor_distance_fit(p: &ProtocolParams) -> Probability {
        let n = p.n as f64;
        Probability::from_log2(-n / 2.0 + 0.7 * n.sqrt())
    }

    /// Two-state chain over (synchronised, desynchronised), started synchronised.
    pub fn tma_sync_chain(p: &ProtocolParams) -> Probability {
        let (mut sync, mut lost) = (1.0f64, 0.0f64);
        for _ in 0..p.n {
            (sync, lost) = (sync * 0.5 + lost * 0.25, sync * 0.25 + lost * 0.25);
        }
        Probability::from_value((sync + lost).min(1.0)).expect("chain mass in [0, 1]")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    constants: Option<GlobalConstants>,
    protocol: Vec<ProtocolDescriptor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagOverride {
    pub slow_phase: Option<bool>,
    pub multi_bit: Option<bool>,
}

/// A set of protocol descriptors with the constants and evaluators used to evaluate them.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub constants: GlobalConstants,
    descriptors: BTreeMap<ProtocolId, ProtocolDescriptor>,
    registry: FormulaRegistry,
}

impl Catalog {
    pub fn builtin() -> Self {
        Catalog::from_toml_str(BUILTIN_CATALOG).expect("embedded catalog parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CatalogError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| CatalogError::File(e.to_string()))?;
        let constants = file.constants.unwrap_or_default();
        constants.validate()?;
        let mut descriptors = BTreeMap::new();
        for d in file.protocol {
            if d.params.first() != Some(&ParamName::N) || d.params.len() > 2 {
                return Err(CatalogError::File(format!(
                    "{}: params must be [\"n\"] or [\"n\", <second>]",
                    d.id
                )));
            }
            if descriptors.insert(d.id, d).is_some() {
                return Err(CatalogError::File("duplicate protocol entry".into()));
            }
        }
        Ok(Catalog {
            constants,
            descriptors,
            registry: FormulaRegistry::builtin(),
        })
    }

    pub fn with_constants(mut self, constants: GlobalConstants) -> Result<Self, CatalogError> {
        constants.validate()?;
        self.constants = constants;
        Ok(self)
    }

    pub fn registry_mut(&mut self) -> &mut FormulaRegistry {
        &mut self.registry
    }

    pub fn override_flags(
        &mut self,
        id: ProtocolId,
        flags: FlagOverride,
    ) -> Result<(), CatalogError> {
        let d = self
            .descriptors
            .get_mut(&id)
            .ok_or_else(|| CatalogError::UnknownProtocol(id.to_string()))?;
        if let Some(s) = flags.slow_phase {
            d.slow_phase = s;
        }
        if let Some(b) = flags.multi_bit {
            d.multi_bit = b;
        }
        Ok(())
    }

    pub fn descriptor(&self, id: ProtocolId) -> Result<&ProtocolDescriptor, CatalogError> {
        self.descriptors
            .get(&id)
            .ok_or_else(|| CatalogError::UnknownProtocol(id.to_string()))
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &ProtocolDescriptor> {
        self.descriptors.values()
    }

    pub fn protocols(&self) -> Vec<ProtocolId> {
        self.descriptors.keys().copied().collect()
    }

    fn probability(
        &self,
        d: &ProtocolDescriptor,
        spec: &FormulaSpec,
        p: &ProtocolParams,
    ) -> Result<Probability, CatalogError> {
        let f =
            self.registry
                .get(&spec.formula)
                .ok_or_else(|| CatalogError::FormulaUnavailable {
                    protocol: d.id,
                    formula: spec.formula.clone(),
                    reference: spec
                        .reference
                        .clone()
                        .unwrap_or_else(|| "the catalog entry".into()),
                })?;
        Ok(f(p))
    }

    pub fn evaluate(
        &self,
        id: ProtocolId,
        p: &ProtocolParams,
    ) -> Result<AttributeVector, CatalogError> {
        let d = self.descriptor(id)?;
        d.check_params(p)?;
        Ok(AttributeVector {
            p_m: self.probability(d, &d.mafia, p)?,
            p_d: self.probability(d, &d.distance, p)?,
            p_t: self.probability(d, &d.terrorist, p)?,
            e: 2 * p.n as u64 * p.symbol_bits() as u64,
            c: d.crypto_ops,
            m: d.memory.bits(p, &self.constants),
            s: d.slow_phase,
            b: d.multi_bit,
        })
    }

    pub fn parameter_grid(&self, id: ProtocolId) -> Result<Vec<ProtocolParams>, CatalogError> {
        Ok(self.descriptor(id)?.parameter_grid())
    }

    pub fn format_id(&self, id: ProtocolId, p: &ProtocolParams) -> Result<String, CatalogError> {
        Ok(self.descriptor(id)?.format_id(p))
    }

    /// Parses `Name-{p1,p2}` against the protocol's schema.
    pub fn parse_id(&self, text: &str) -> Result<(ProtocolId, ProtocolParams), CatalogError> {
        let bad = || CatalogError::BadId(text.to_string());
        let (name, rest) = text.split_once('-').ok_or_else(bad)?;
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(bad)?;
        let protocol: ProtocolId = name.parse()?;
        let d = self.descriptor(protocol)?;
        let values: Vec<&str> = inner.split(',').collect();
        if values.len() != d.params.len() {
            return Err(bad());
        }
        let mut p = ProtocolParams::default();
        for (&k, v) in d.params.iter().zip(values) {
            if v.trim() != v || v.is_empty() {
                return Err(bad());
            }
            match k {
                ParamName::N => p.n = v.parse().map_err(|_| bad())?,
                ParamName::Depth => p.ell = Some(v.parse().map_err(|_| bad())?),
                ParamName::SymbolBits => p.t = Some(v.parse().map_err(|_| bad())?),
                ParamName::VoidProbability => p.p_f = Some(v.parse().map_err(|_| bad())?),
                ParamName::PredefinedFraction => p.p_d_frac = Some(v.parse().map_err(|_| bad())?),
            }
        }
        d.check_params(&p)?;
        Ok((protocol, p))
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::builtin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolInstance {
    pub id: String,
    pub protocol: ProtocolId,
    pub params: ProtocolParams,
    #[serde(skip)]
    pub vector: AttributeVector,
}

/// Evaluates every grid point of the requested protocols, ordered by protocol then parameters.
pub fn generate_instances(
    catalog: &Catalog,
    protocols: &[ProtocolId],
) -> Result<Vec<ProtocolInstance>, CatalogError> {
    let mut wanted: Vec<ProtocolId> = protocols.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut points = Vec::new();
    for id in wanted {
        let d = catalog.descriptor(id)?;
        points.extend(d.parameter_grid().into_iter().map(|p| (d, p)));
    }
    points
        .into_par_iter()
        .map(|(d, p)| {
            let id = d.format_id(&p);
            match catalog.evaluate(d.id, &p) {
                Ok(vector) => Ok(ProtocolInstance {
                    id,
                    protocol: d.id,
                    params: p,
                    vector,
                }),
                Err(e) => Err(CatalogError::Instance {
                    id,
                    source: Box::new(e),
                }),
            }
        })
        .collect()
}

/// Every protocol of the catalog.
pub fn generate_all(catalog: &Catalog) -> Result<Vec<ProtocolInstance>, CatalogError> {
    generate_instances(catalog, &catalog.protocols())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let c = Catalog::builtin();
        let sizes: Vec<(ProtocolId, usize)> = c
            .protocols()
            .into_iter()
            .map(|p| (p, c.parameter_grid(p).unwrap().len()))
            .collect();
        for (p, size) in sizes {
            let expected = match p {
                ProtocolId::Tree => 8192,
                ProtocolId::SKI => 7936,
                ProtocolId::MP | ProtocolId::KA => 5376,
                _ => 256,
            };
            assert_eq!(size, expected, "{p}");
        }
    }

    #[test]
    fn ids_round_trip() {
        let c = Catalog::builtin();
        for text in [
            "Tree-{24,6}",
            "KA-{22,0.55}",
            "KA-{32,1}",
            "BC-{16}",
            "MP-{3,0.05}",
        ] {
            let (id, p) = c.parse_id(text).unwrap();
            assert_eq!(c.format_id(id, &p).unwrap(), text);
        }
        assert!(c.parse_id("BC-{16,2}").is_err());
        assert!(c.parse_id("XX-{1}").is_err());
        assert!(c.parse_id("BC-16").is_err());
        assert!(c.parse_id("BC-{0}").is_err());
    }

    #[test]
    fn predefined_count_is_exact_on_grid() {
        for i in 0..=20u32 {
            for n in 1..=256u32 {
                let p = ProtocolParams {
                    n,
                    p_d_frac: Some(i as f64 / 20.0),
                    ..Default::default()
                };
                assert_eq!(p.predefined(), i * n / 20);
            }
        }
    }

    #[test]
    fn missing_formula_names_reference() {
        let mut c = Catalog::builtin();
        c.registry_mut().remove("ka-mafia");
        let err = c
            .evaluate(ProtocolId::KA, &c.parse_id("KA-{2,0.5}").unwrap().1)
            .unwrap_err();
        match err {
            CatalogError::FormulaUnavailable { reference, .. } => assert_eq!(reference, "KA2011"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
