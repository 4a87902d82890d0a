//! Request and response types shared by the command line and the HTTP service.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::{AttributeId, Tolerances};
use crate::bound::{BoundError, MafiaBound};
use crate::catalog::{
    generate_instances, Catalog, CatalogError, FormulaSpec, ParamName, ProtocolId, ProtocolInstance,
};
use crate::config::{ConfigError, ConstantsOverride, RunConfig};
use crate::pareto::{representative_rows, solve};
use crate::report::{provenance_warnings, InstanceRow, ScaledRow};
use crate::spider::{emit_spider, Normalization, SpiderAxisConfig, SpiderError};

pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Unprocessable(String),
}

impl ApiError {
    pub fn status(&self) -> u16 {
        match self {
            ApiError::BadRequest(_) => 400,
            ApiError::NotFound(_) => 404,
            ApiError::Unprocessable(_) => 422,
        }
    }
}

impl From<BoundError> for ApiError {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Syntax(_) => ApiError::BadRequest(e.to_string()),
            BoundError::OutOfRange(_) => ApiError::Unprocessable(e.to_string()),
        }
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::UnknownProtocol(_) => ApiError::NotFound(e.to_string()),
            CatalogError::BadId(_) | CatalogError::Schema { .. } => {
                ApiError::NotFound(e.to_string())
            }
            _ => ApiError::Unprocessable(e.to_string()),
        }
    }
}

impl From<SpiderError> for ApiError {
    fn from(e: SpiderError) -> Self {
        ApiError::BadRequest(e.to_string())
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        ApiError::BadRequest(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParetoRequest {
    pub y: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocols: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsOverride>,
}

impl ParetoRequest {
    pub fn new(y: &str) -> Self {
        ParetoRequest {
            y: y.to_string(),
            protocols: None,
            constants: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoResponse {
    pub y: String,
    pub rows: Vec<ScaledRow>,
    pub totals: BTreeMap<ProtocolId, usize>,
    pub member_ids: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvenanceView {
    pub mafia: FormulaSpec,
    pub distance: FormulaSpec,
    pub terrorist: FormulaSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolView {
    pub id: ProtocolId,
    pub name: String,
    pub params: Vec<ParamName>,
    pub grid_size: usize,
    pub crypto_ops: u64,
    pub slow_phase: bool,
    pub multi_bit: bool,
    pub e_estimated: bool,
    pub provenance: ProvenanceView,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstancePage {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub items: Vec<InstanceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDetail {
    #[serde(flatten)]
    pub row: InstanceRow,
    pub e_estimated: bool,
    pub provenance: ProvenanceView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpiderRequest {
    pub instance_ids: Vec<String>,
    #[serde(default)]
    pub normalization: Option<Normalization>,
    #[serde(default)]
    pub axes: Option<Vec<AttributeId>>,
}

/// Canonical JSON for row lists: compact, fields in declaration order.
pub fn canonical_rows(rows: &[ScaledRow]) -> String {
    serde_json::to_string(rows).expect("rows serialize")
}

/// The instance cache plus everything needed to answer queries.
#[derive(Debug, Clone)]
pub struct Engine {
    catalog: Catalog,
    tolerances: Tolerances,
    instances: Arc<Vec<ProtocolInstance>>,
    index: Arc<HashMap<String, usize>>,
}

impl Engine {
    pub fn new(
        catalog: Catalog,
        tolerances: Tolerances,
        protocols: &[ProtocolId],
    ) -> Result<Self, CatalogError> {
        let instances = generate_instances(&catalog, protocols)?;
        let index = instances
            .iter()
            .enumerate()
            .map(|(i, inst)| (inst.id.clone(), i))
            .collect();
        Ok(Engine {
            catalog,
            tolerances,
            instances: Arc::new(instances),
            index: Arc::new(index),
        })
    }

    pub fn builtin() -> Self {
        let catalog = Catalog::builtin();
        let all = catalog.protocols();
        Engine::new(catalog, Tolerances::default(), &all).expect("builtin catalog evaluates")
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self, ConfigError> {
        let catalog = cfg.build_catalog()?;
        let enabled = cfg.enabled_protocols(&catalog);
        Ok(Engine::new(catalog, cfg.tolerances(), &enabled)?)
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn instances(&self) -> &[ProtocolInstance] {
        &self.instances
    }

    pub fn lookup(&self, id: &str) -> Result<&ProtocolInstance, ApiError> {
        self.index
            .get(id)
            .map(|&i| &self.instances[i])
            .ok_or_else(|| ApiError::NotFound(format!("unknown instance id `{id}`")))
    }

    fn parse_protocols(&self, names: &[String]) -> Result<Vec<ProtocolId>, ApiError> {
        names
            .iter()
            .map(|n| {
                let id: ProtocolId = n.parse()?;
                self.catalog.descriptor(id)?;
                Ok(id)
            })
            .collect()
    }

    pub fn pareto(&self, req: &ParetoRequest) -> Result<ParetoResponse, ApiError> {
        let y: MafiaBound = req.y.parse()?;
        let wanted = req
            .protocols
            .as_deref()
            .map(|p| self.parse_protocols(p))
            .transpose()?;
        let overrides = req.constants.filter(|c| !c.is_empty());

        let (catalog, tolerances, regenerated);
        let source: &[ProtocolInstance] = match overrides {
            Some(c) => {
                c.validate()?;
                let constants = c.apply(self.catalog.constants);
                catalog = self.catalog.clone().with_constants(constants)?;
                tolerances = c.tolerances(self.tolerances);
                let present: Vec<ProtocolId> = {
                    let mut p: Vec<ProtocolId> =
                        self.instances.iter().map(|i| i.protocol).collect();
                    p.dedup();
                    p
                };
                regenerated = generate_instances(&catalog, &present)?;
                &regenerated
            }
            None => {
                catalog = self.catalog.clone();
                tolerances = self.tolerances;
                &self.instances
            }
        };
        let selected: Vec<ProtocolInstance>;
        let set: &[ProtocolInstance] = match &wanted {
            Some(w) => {
                selected = source
                    .iter()
                    .filter(|i| w.contains(&i.protocol))
                    .cloned()
                    .collect();
                &selected
            }
            None => source,
        };

        let solution = solve(set, &y, &tolerances);
        Ok(ParetoResponse {
            y: y.to_string(),
            rows: representative_rows(&solution)
                .iter()
                .map(ScaledRow::from_summary)
                .collect(),
            totals: solution.totals(),
            member_ids: solution.members.iter().map(|m| m.id.clone()).collect(),
            warnings: provenance_warnings(&catalog, &solution),
        })
    }

    fn provenance(&self, id: ProtocolId) -> Result<(ProvenanceView, bool), ApiError> {
        let d = self.catalog.descriptor(id)?;
        Ok((
            ProvenanceView {
                mafia: d.mafia.clone(),
                distance: d.distance.clone(),
                terrorist: d.terrorist.clone(),
            },
            d.e_estimated,
        ))
    }

    pub fn protocols(&self) -> Vec<ProtocolView> {
        self.catalog
            .descriptors()
            .map(|d| ProtocolView {
                id: d.id,
                name: d.name.clone(),
                params: d.params.clone(),
                grid_size: d.parameter_grid().len(),
                crypto_ops: d.crypto_ops,
                slow_phase: d.slow_phase,
                multi_bit: d.multi_bit,
                e_estimated: d.e_estimated,
                provenance: ProvenanceView {
                    mafia: d.mafia.clone(),
                    distance: d.distance.clone(),
                    terrorist: d.terrorist.clone(),
                },
            })
            .collect()
    }

    pub fn instance(&self, id: &str) -> Result<InstanceDetail, ApiError> {
        let inst = self.lookup(id)?;
        let (provenance, e_estimated) = self.provenance(inst.protocol)?;
        Ok(InstanceDetail {
            row: InstanceRow::from(inst),
            e_estimated,
            provenance,
        })
    }

    pub fn instance_page(
        &self,
        protocol: Option<&str>,
        offset: usize,
        limit: Option<usize>,
    ) -> Result<InstancePage, ApiError> {
        let limit = limit.unwrap_or(DEFAULT_PAGE);
        if limit == 0 || limit > MAX_PAGE {
            return Err(ApiError::BadRequest(format!(
                "limit must be in 1..={MAX_PAGE}"
            )));
        }
        let filter = protocol
            .map(|p| self.parse_protocols(&[p.to_string()]).map(|v| v[0]))
            .transpose()?;
        let matching: Vec<&ProtocolInstance> = self
            .instances
            .iter()
            .filter(|i| filter.is_none_or(|p| i.protocol == p))
            .collect();
        Ok(InstancePage {
            total: matching.len(),
            offset,
            limit,
            items: matching
                .into_iter()
                .skip(offset)
                .take(limit)
                .map(InstanceRow::from)
                .collect(),
        })
    }

    pub fn spider(&self, req: &SpiderRequest) -> Result<String, ApiError> {
        let instances = req
            .instance_ids
            .iter()
            .map(|id| self.lookup(id))
            .collect::<Result<Vec<_>, _>>()?;
        let config = SpiderAxisConfig {
            axes: req.axes.clone(),
            normalization: req.normalization.unwrap_or_default(),
        };
        Ok(emit_spider(&instances, &config)?)
    }
}
