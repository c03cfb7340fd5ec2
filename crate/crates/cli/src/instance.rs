//! Instance files: items, agents with exact incomes, and one preference
//! per agent.
//!
//! ```json
//! {
//!   "items": ["x", "y", "z"],
//!   "agents": [
//!     {"name": "Alice", "income": "10", "preference": {"partial": {"chains": [["yz", "xz"]]}}},
//!     {"name": "Bob", "income": "6", "preference": {"additive": ["3", "2", "1"]}}
//!   ]
//! }
//! ```
//!
//! A preference is one of `ranking` (every bundle, best first), `additive`
//! (one value per item), `partial` (chains of comma-joined bundle classes,
//! completed canonically or from `seed`) or `random` (a seed).

use cefai_core::{
    additive_preference, complete_partial, format_rational, make_preference, parse_rational,
    random_completion, random_preference, Bundle, BundleClass, IncomeVector, ItemNames,
    NamedInstance, PartialRelations, PreferenceOrder, Rational,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub items: Vec<String>,
    pub agents: Vec<AgentSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub income: String,
    pub preference: PreferenceSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreferenceSpec {
    Ranking(Vec<String>),
    Additive(Vec<String>),
    Partial(PartialSpec),
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSpec {
    pub chains: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A parsed, validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub items: ItemNames,
    pub agents: Vec<String>,
    pub incomes: IncomeVector,
    pub profile: Vec<PreferenceOrder>,
}

pub fn rational(text: &str) -> CliResult<Rational> {
    parse_rational(text).ok_or_else(|| CliError::Parse(format!("bad rational {text:?}")))
}

fn bundle(items: &ItemNames, text: &str) -> CliResult<Bundle> {
    items
        .parse(text)
        .ok_or_else(|| CliError::Parse(format!("bad bundle {text:?}")))
}

fn preference(items: &ItemNames, spec: &PreferenceSpec) -> CliResult<PreferenceOrder> {
    let m = items.len();
    let order = match spec {
        PreferenceSpec::Ranking(best_first) => {
            let worst_first = best_first
                .iter()
                .rev()
                .map(|s| bundle(items, s))
                .collect::<CliResult<Vec<_>>>()?;
            make_preference(m, &worst_first)?
        }
        PreferenceSpec::Additive(values) => {
            let v = values
                .iter()
                .map(|s| rational(s))
                .collect::<CliResult<Vec<_>>>()?;
            additive_preference(m, &v)?
        }
        PreferenceSpec::Partial(p) => {
            let mut rel = PartialRelations::new(m);
            for chain in &p.chains {
                let classes = chain
                    .iter()
                    .map(|g| {
                        BundleClass::parse(items, g)
                            .ok_or_else(|| CliError::Parse(format!("bad bundle class {g:?}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                rel.chain(&classes);
            }
            match p.seed {
                Some(seed) => random_completion(&rel, seed)?,
                None => complete_partial(&rel)?,
            }
        }
        PreferenceSpec::Random(seed) => random_preference(m, *seed)?,
    };
    Ok(order)
}

impl InstanceFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn resolve(&self) -> CliResult<Instance> {
        let items = ItemNames::new(self.items.iter().cloned());
        if items.is_empty() {
            return Err(CliError::Parse("no items".into()));
        }
        for (k, name) in self.items.iter().enumerate() {
            if self.items[..k].contains(name) {
                return Err(CliError::Parse(format!("duplicate item {name:?}")));
            }
        }
        if self.agents.is_empty() {
            return Err(CliError::Parse("no agents".into()));
        }
        let incomes = self
            .agents
            .iter()
            .map(|a| rational(&a.income))
            .collect::<CliResult<Vec<_>>>()?;
        let incomes = IncomeVector::new(incomes)?;
        let profile = self
            .agents
            .iter()
            .map(|a| preference(&items, &a.preference))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Instance {
            items,
            agents: self.agents.iter().map(|a| a.name.clone()).collect(),
            incomes,
            profile,
        })
    }

    /// Explicit rankings for every agent.
    pub fn from_instance(inst: &Instance) -> Self {
        let agents = inst
            .agents
            .iter()
            .zip(&inst.profile)
            .enumerate()
            .map(|(i, (name, pref))| AgentSpec {
                name: name.clone(),
                income: format_rational(inst.incomes.get(i)),
                preference: PreferenceSpec::Ranking(
                    pref.ascending()
                        .iter()
                        .rev()
                        .map(|&b| inst.items.format(b))
                        .collect(),
                ),
            })
            .collect();
        InstanceFile {
            items: inst.items.names().to_vec(),
            agents,
        }
    }

    /// A named instance at its reference incomes, with the canonical
    /// completion of its partial preferences.
    pub fn from_named(named: &NamedInstance) -> CliResult<Self> {
        Ok(Self::from_instance(&Instance {
            items: named.items.clone(),
            agents: named.agents.clone(),
            incomes: named.reference.clone(),
            profile: named.profile()?,
        }))
    }
}

impl Instance {
    pub fn m(&self) -> usize {
        self.items.len()
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }
}
