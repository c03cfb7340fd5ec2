//! Result documents. Every rational is a `"p/q"` string; maps keep the
//! item and agent order of the instance.

use cefai_core::{
    audit_ce_fairness, format_rational, Allocation, Bundle, CEPair, CEReport, ExistenceReport,
    PriceVector, SolveTranscript, ViolationKind,
};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::instance::{rational, Instance};

/// Allocation and prices by name; a solve document also parses as one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateDocument {
    pub allocation: IndexMap<String, Vec<String>>,
    pub prices: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickDocument {
    pub position: usize,
    pub agent: String,
    pub item: String,
    pub price: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeDocument {
    pub agent: String,
    pub group: Vec<String>,
    pub l: usize,
    pub d: usize,
    pub maximin: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessDocument {
    pub d_max: usize,
    pub applicable: usize,
    pub violations: Vec<GuaranteeDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveDocument {
    pub range: String,
    pub path: Vec<String>,
    pub pixep: String,
    pub epsilon: String,
    pub allocation: IndexMap<String, Vec<String>>,
    pub prices: IndexMap<String, String>,
    pub picks: Vec<PickDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fairness: Option<FairnessDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDocument {
    pub agent: String,
    pub kind: String,
    pub bundle: Vec<String>,
    pub price: String,
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub valid: bool,
    pub rule: String,
    pub violations: Vec<ViolationDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fairness: Option<FairnessDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistsDocument {
    pub exists: bool,
    pub allocations_checked: usize,
    pub programs_solved: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<CandidateDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub error: ErrorBody,
}

impl ErrorDocument {
    pub fn from_error(e: &CliError) -> Self {
        let hyperplane = match e {
            CliError::Core(cefai_core::Error::NotGeneric(h)) => Some(h.to_string()),
            _ => None,
        };
        ErrorDocument {
            error: ErrorBody {
                kind: e.kind().to_string(),
                message: e.to_string(),
                hyperplane,
            },
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    Ok(serde_json::from_str(text)?)
}

fn names(inst: &Instance, b: Bundle) -> Vec<String> {
    inst.items.item_list(b)
}

impl CandidateDocument {
    pub fn from_ce(inst: &Instance, ce: &CEPair) -> Self {
        CandidateDocument {
            allocation: allocation_map(inst, &ce.allocation),
            prices: price_map(inst, &ce.prices),
        }
    }

    /// Agents missing from `allocation` hold nothing; every item needs a price.
    pub fn to_ce(&self, inst: &Instance) -> CliResult<CEPair> {
        let mut bundles = vec![Bundle::EMPTY; inst.n()];
        for (agent, items) in &self.allocation {
            let i = inst
                .agent_index(agent)
                .ok_or_else(|| CliError::Parse(format!("unknown agent {agent:?}")))?;
            for item in items {
                let j = inst
                    .items
                    .index(item)
                    .ok_or_else(|| CliError::Parse(format!("unknown item {item:?}")))?;
                bundles[i] = bundles[i].with(j);
            }
        }
        let allocation = Allocation::new(inst.m(), bundles)?;
        for name in self.prices.keys() {
            if inst.items.index(name).is_none() {
                return Err(CliError::Parse(format!("unknown item {name:?}")));
            }
        }
        let prices = inst
            .items
            .names()
            .iter()
            .map(|name| {
                self.prices
                    .get(name)
                    .ok_or_else(|| CliError::Parse(format!("no price for item {name:?}")))
                    .and_then(|p| rational(p))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(CEPair {
            prices: PriceVector::new(prices)?,
            allocation,
        })
    }
}

fn allocation_map(inst: &Instance, alloc: &Allocation) -> IndexMap<String, Vec<String>> {
    inst.agents
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), names(inst, alloc.bundle(i))))
        .collect()
}

fn price_map(inst: &Instance, prices: &PriceVector) -> IndexMap<String, String> {
    inst.items
        .names()
        .iter()
        .enumerate()
        .map(|(j, name)| (name.clone(), format_rational(prices.item(j))))
        .collect()
}

pub fn fairness_document(inst: &Instance, ce: &CEPair, d_max: usize) -> FairnessDocument {
    let audit = audit_ce_fairness(&inst.profile, &inst.incomes, ce, d_max);
    FairnessDocument {
        d_max,
        applicable: audit.applicable.len(),
        violations: audit
            .violations()
            .map(|g| GuaranteeDocument {
                agent: inst.agents[g.agent].clone(),
                group: g.group.iter().map(|&k| inst.agents[k].clone()).collect(),
                l: g.l,
                d: g.d,
                maximin: names(inst, g.maximin),
            })
            .collect(),
    }
}

impl SolveDocument {
    pub fn new(inst: &Instance, ce: &CEPair, tr: &SolveTranscript, d_max: Option<usize>) -> Self {
        let exec = &tr.execution;
        let picks = exec
            .picks
            .iter()
            .map(|p| PickDocument {
                position: p.position,
                agent: inst.agents[p.agent].clone(),
                item: inst.items.name(p.item).to_string(),
                price: format_rational(ce.prices.item(p.item)),
            })
            .collect();
        SolveDocument {
            range: tr.range.to_string(),
            path: exec.path.clone(),
            pixep: exec.leaf.label().to_string(),
            epsilon: format_rational(&tr.epsilon),
            allocation: allocation_map(inst, &ce.allocation),
            prices: price_map(inst, &ce.prices),
            picks,
            fairness: d_max.map(|d| fairness_document(inst, ce, d)),
        }
    }
}

impl VerifyDocument {
    pub fn new(inst: &Instance, report: &CEReport, rule: &str) -> Self {
        VerifyDocument {
            valid: report.valid(),
            rule: rule.to_string(),
            violations: report
                .violations
                .iter()
                .map(|v| ViolationDocument {
                    agent: inst.agents[v.agent].clone(),
                    kind: match v.kind {
                        ViolationKind::BudgetMismatch => "BudgetMismatch",
                        ViolationKind::AffordableBetterBundle => "AffordableBetterBundle",
                    }
                    .to_string(),
                    bundle: names(inst, v.witness),
                    price: format_rational(&v.witness_price),
                    threshold: format_rational(&v.threshold),
                })
                .collect(),
            fairness: None,
        }
    }
}

impl ExistsDocument {
    pub fn new(inst: &Instance, report: &ExistenceReport) -> Self {
        ExistsDocument {
            exists: report.witness.is_some(),
            allocations_checked: report.allocations_checked,
            programs_solved: report.programs_solved,
            witness: report
                .witness
                .as_ref()
                .map(|ce| CandidateDocument::from_ce(inst, ce)),
        }
    }
}
