use std::io::Read;

use cefai_core::{
    ce_exists_report, counterexample_4x4, counterexample_5x2, solve, verify_ce_with,
    AffordabilityRule, NamedInstance,
};

use crate::document::{
    fairness_document, CandidateDocument, ExistsDocument, SolveDocument, VerifyDocument,
};
use crate::error::{CliError, CliResult};
use crate::instance::{Instance, InstanceFile};

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &str) -> CliResult<String> {
    let io = |source| CliError::Io {
        path: path.to_string(),
        source,
    };
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

pub fn load_instance(text: &str) -> CliResult<Instance> {
    InstanceFile::parse(text)?.resolve()
}

pub fn cmd_solve(inst: &Instance, d_max: Option<usize>) -> CliResult<SolveDocument> {
    let (ce, transcript) = solve(&inst.profile, &inst.incomes)?;
    Ok(SolveDocument::new(inst, &ce, &transcript, d_max))
}

pub fn cmd_verify(
    inst: &Instance,
    candidate: &CandidateDocument,
    strict_literal: bool,
    d_max: Option<usize>,
) -> CliResult<VerifyDocument> {
    let ce = candidate.to_ce(inst)?;
    let (rule, label) = if strict_literal {
        (AffordabilityRule::StrictLiteral, "strict-literal")
    } else {
        (AffordabilityRule::Income, "income")
    };
    let report = verify_ce_with(&inst.profile, &inst.incomes, &ce, rule)?;
    let mut doc = VerifyDocument::new(inst, &report, label);
    doc.fairness = d_max.map(|d| fairness_document(inst, &ce, d));
    Ok(doc)
}

pub fn cmd_exists(inst: &Instance) -> CliResult<ExistsDocument> {
    let report = ce_exists_report(&inst.profile, &inst.incomes)?;
    Ok(ExistsDocument::new(inst, &report))
}

pub fn named_instance(name: &str) -> CliResult<NamedInstance> {
    [counterexample_4x4(), counterexample_5x2()]
        .into_iter()
        .find(|i| i.label == name)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown instance {name:?}; known: four-items-four-agents, five-items-two-agents"
            ))
        })
}

pub fn cmd_export(name: &str) -> CliResult<InstanceFile> {
    InstanceFile::from_named(&named_instance(name)?)
}
