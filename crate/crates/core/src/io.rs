//! JSON instance files and machine-readable result documents.
//!
//! Every number travels as a decimal string (`"3.75"`, or `"15/4"` when the
//! value has no finite decimal expansion) so that rational mode is exact end
//! to end.

use serde::{Deserialize, Serialize};

use crate::allocation::{BidAllocation, ClearingResult};
use crate::candidates::CandidateSet;
use crate::model::{
    AuctionInstance, Bid, Bundle, CostFunction, PriceVector, SupplyCurve, SupplyStep,
    ValidationErrors,
};
use crate::scalar::{
    format_rational, parse_rational, ParseNumberError, Rational, Scalar, DEFAULT_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Rational,
    Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub goods: usize,
    #[serde(default)]
    pub arithmetic: Arithmetic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub bids: Vec<BidEntry>,
    pub supply: Vec<SupplyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidEntry {
    pub id: String,
    pub values: Vec<String>,
    pub budget: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyEntry {
    pub steps: Vec<StepEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub until: String,
    pub marginal: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance at `{path}`: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("field `{field}`: {source}")]
    Number {
        field: String,
        #[source]
        source: ParseNumberError,
    },
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
}

/// A validated instance in the arithmetic mode its file asked for.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedInstance {
    Rational(AuctionInstance<Rational>),
    Float(AuctionInstance<f64>),
}

impl LoadedInstance {
    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            LoadedInstance::Rational(_) => Arithmetic::Rational,
            LoadedInstance::Float(_) => Arithmetic::Float,
        }
    }

    pub fn goods(&self) -> usize {
        match self {
            LoadedInstance::Rational(i) => i.goods(),
            LoadedInstance::Float(i) => i.goods(),
        }
    }

    /// The instance in exact arithmetic regardless of the requested mode.
    pub fn into_rational(self) -> AuctionInstance<Rational> {
        match self {
            LoadedInstance::Rational(i) => i,
            LoadedInstance::Float(i) => i.convert(),
        }
    }
}

fn number(field: String, text: &str) -> Result<Rational, LoadError> {
    parse_rational(text).map_err(|source| LoadError::Number { field, source })
}

impl InstanceFile {
    /// Parses every number exactly and validates the instance.
    pub fn to_instance(&self) -> Result<LoadedInstance, LoadError> {
        let mut bids = Vec::with_capacity(self.bids.len());
        for (b, entry) in self.bids.iter().enumerate() {
            let values = entry
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| number(format!("bids[{b}].values[{i}]"), v))
                .collect::<Result<Vec<_>, _>>()?;
            let budget = number(format!("bids[{b}].budget"), &entry.budget)?;
            bids.push(Bid::new(entry.id.clone(), values, budget));
        }
        let mut curves = Vec::with_capacity(self.supply.len());
        for (g, entry) in self.supply.iter().enumerate() {
            let mut steps = Vec::with_capacity(entry.steps.len());
            for (s, step) in entry.steps.iter().enumerate() {
                steps.push(SupplyStep {
                    until: number(format!("supply[{g}].steps[{s}].until"), &step.until)?,
                    marginal: number(format!("supply[{g}].steps[{s}].marginal"), &step.marginal)?,
                });
            }
            curves.push(SupplyCurve::new(steps));
        }
        let tolerance = self.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        let exact = AuctionInstance::new(self.goods, bids, CostFunction::new(curves), tolerance)?;
        Ok(match self.arithmetic {
            Arithmetic::Rational => LoadedInstance::Rational(exact),
            Arithmetic::Float => LoadedInstance::Float(exact.convert()),
        })
    }

    pub fn from_instance<S: Scalar>(instance: &AuctionInstance<S>, arithmetic: Arithmetic) -> Self {
        let text = |v: &S| format_rational(&v.to_rational());
        InstanceFile {
            goods: instance.goods(),
            arithmetic,
            tolerance: (instance.tolerance() != DEFAULT_TOLERANCE).then_some(instance.tolerance()),
            bids: instance
                .bids()
                .iter()
                .map(|b| BidEntry {
                    id: b.id().to_string(),
                    values: b.values().iter().map(text).collect(),
                    budget: text(b.budget()),
                })
                .collect(),
            supply: instance
                .cost()
                .curves()
                .iter()
                .map(|c| SupplyEntry {
                    steps: c
                        .steps()
                        .iter()
                        .map(|s| StepEntry {
                            until: text(&s.until),
                            marginal: text(&s.marginal),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_instance(json: &str) -> Result<LoadedInstance, LoadError> {
    let mut de = serde_json::Deserializer::from_str(json);
    let file: InstanceFile =
        serde_path_to_error::deserialize(&mut de).map_err(|e| LoadError::Json {
            path: e.path().to_string(),
            source: e.into_inner(),
        })?;
    de.end().map_err(|source| LoadError::Json {
        path: ".".into(),
        source,
    })?;
    file.to_instance()
}

pub fn read_instance(path: &std::path::Path) -> Result<LoadedInstance, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn instance_to_json<S: Scalar>(
    instance: &AuctionInstance<S>,
    arithmetic: Arithmetic,
) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(instance, arithmetic))
        .expect("serializable")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PriceListError {
    #[error(transparent)]
    Number(#[from] ParseNumberError),
    #[error("expected {expected} prices, got {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Parses a comma-separated price list such as `"2, 15/4"`.
pub fn parse_price_list<S: Scalar>(
    text: &str,
    goods: usize,
) -> Result<PriceVector<S>, PriceListError> {
    let values = text
        .split(',')
        .map(|part| parse_rational(part.trim()).map(|r| S::from_rational(&r)))
        .collect::<Result<Vec<S>, _>>()?;
    if values.len() != goods {
        return Err(PriceListError::Arity {
            expected: goods,
            found: values.len(),
        });
    }
    Ok(PriceVector::new(values)?)
}

fn strings<S: Scalar>(values: &[S]) -> Vec<String> {
    values.iter().map(|v| v.to_exact_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationEntry {
    pub id: String,
    pub bundle: Vec<String>,
}

/// Stable JSON form of a [`ClearingResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClearingReport {
    pub price: Vec<String>,
    pub revenue: String,
    pub payments: String,
    pub aggregate: Vec<String>,
    pub allocation: Vec<AllocationEntry>,
}

impl ClearingReport {
    pub fn from_result<S: Scalar>(result: &ClearingResult<S>) -> Self {
        ClearingReport {
            price: strings(result.price.as_slice()),
            revenue: result.revenue.to_exact_string(),
            payments: result.payments().to_exact_string(),
            aggregate: strings(result.aggregate.as_slice()),
            allocation: result
                .allocation
                .iter()
                .map(|a| AllocationEntry {
                    id: a.id.clone(),
                    bundle: strings(a.bundle.as_slice()),
                })
                .collect(),
        }
    }

    /// Parses the report back into exact values.
    pub fn to_result(&self) -> Result<ClearingResult<Rational>, LoadError> {
        let list = |name: &str, xs: &[String]| {
            xs.iter()
                .enumerate()
                .map(|(i, x)| number(format!("{name}[{i}]"), x))
                .collect::<Result<Vec<_>, _>>()
        };
        let price =
            PriceVector::new(list("price", &self.price)?).map_err(|e| LoadError::Number {
                field: "price".into(),
                source: ParseNumberError(e.to_string()),
            })?;
        let allocation = self
            .allocation
            .iter()
            .enumerate()
            .map(|(b, a)| {
                Ok(BidAllocation {
                    id: a.id.clone(),
                    bundle: Bundle(list(&format!("allocation[{b}].bundle"), &a.bundle)?),
                })
            })
            .collect::<Result<Vec<_>, LoadError>>()?;
        Ok(ClearingResult {
            price,
            allocation,
            aggregate: Bundle(list("aggregate", &self.aggregate)?),
            revenue: number("revenue".into(), &self.revenue)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneEntry {
    pub bid: String,
    pub goods: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub bids: Vec<String>,
    pub sigma: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateEntry {
    pub price: Vec<String>,
    pub witness: WitnessEntry,
    pub hyperplanes: Vec<HyperplaneEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsEntry {
    pub total_combinations: String,
    pub calls: String,
    pub skipped: String,
    pub infeasible: String,
    pub raw_candidates: String,
    pub unique_candidates: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatesReport {
    pub candidates: Vec<CandidateEntry>,
    pub stats: StatsEntry,
}

impl CandidatesReport {
    pub fn new<S: Scalar>(instance: &AuctionInstance<S>, set: &CandidateSet<S>) -> Self {
        let id = |b: usize| instance.bids()[b].id().to_string();
        let s = &set.stats;
        CandidatesReport {
            candidates: set
                .records
                .iter()
                .map(|r| CandidateEntry {
                    price: strings(r.price.as_slice()),
                    witness: WitnessEntry {
                        bids: r.witness.bids.iter().map(|&b| id(b)).collect(),
                        sigma: r.witness.sigma.clone(),
                    },
                    hyperplanes: r
                        .hyperplanes
                        .iter()
                        .map(|h| HyperplaneEntry {
                            bid: id(h.bid),
                            goods: [h.goods.0, h.goods.1],
                        })
                        .collect(),
                })
                .collect(),
            stats: StatsEntry {
                total_combinations: s.total_combinations.to_string(),
                calls: s.calls.to_string(),
                skipped: s.skipped.to_string(),
                infeasible: s.infeasible.to_string(),
                raw_candidates: s.raw_candidates.to_string(),
                unique_candidates: s.unique_candidates.to_string(),
            },
        }
    }
}
