use std::collections::BTreeMap;
use std::fmt::Write;

use super::{DocKind, PddlDocument, PddlError};
use crate::model::{Literal, OperatorLibrary, PlanningProblem, Predicate};
use crate::ontology::{TypeHierarchy, HAND, TABLE, THING, WOODEN_CUBE};

pub const DEFAULT_DOMAIN_NAME: &str = "learningFromDemonstrationAllOperators";

const BASE_REQUIREMENTS: &str = ":strips :typing :negative-preconditions :action-costs";
const REPAIR_REQUIREMENTS: &str = ":universal-preconditions :conditional-effects";

fn literal(lit: &Literal) -> String {
    let inner = if lit.pred == Predicate::Neq {
        format!("(= {})", lit.args.join(" "))
    } else {
        format!("({} {})", lit.pred.name(), lit.args.join(" "))
    };
    // neq is written as negated equality
    if lit.positive == (lit.pred == Predicate::Neq) {
        format!("(not {inner})")
    } else {
        inner
    }
}

fn predicate_declaration(pred: Predicate) -> String {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let args: Vec<String> = pred
        .arg_types()
        .iter()
        .map(|ty| {
            let n = seen.entry(ty).or_insert(0);
            *n += 1;
            format!("?{ty}{n} - {ty}")
        })
        .collect();
    format!("({} {})", pred.name(), args.join(" "))
}

fn type_declarations(hierarchy: &TypeHierarchy) -> String {
    let mut parts: Vec<String> = [WOODEN_CUBE, HAND, TABLE]
        .iter()
        .map(|t| format!("{t} - {THING}"))
        .collect();
    for ty in hierarchy.extra_types() {
        let parent = ty.parent.unwrap_or_else(|| THING.to_string());
        parts.push(format!("{} - {}", ty.name, parent));
    }
    parts.join(" ")
}

/// Domain over the built-in type hierarchy.
pub fn emit_domain(library: &OperatorLibrary, name: &str) -> Result<PddlDocument, PddlError> {
    emit_domain_typed(library, name, &TypeHierarchy::default())
}

pub fn emit_domain_typed(
    library: &OperatorLibrary,
    name: &str,
    hierarchy: &TypeHierarchy,
) -> Result<PddlDocument, PddlError> {
    library.validate()?;
    let mut out = String::new();
    let requirements = if library.is_repaired() {
        format!("{BASE_REQUIREMENTS} {REPAIR_REQUIREMENTS}")
    } else {
        BASE_REQUIREMENTS.to_string()
    };
    writeln!(out, "(define (domain {name})").unwrap();
    writeln!(out, "  (:requirements {requirements})").unwrap();
    writeln!(out, "  (:types {})", type_declarations(hierarchy)).unwrap();
    writeln!(out, "  (:predicates").unwrap();
    for pred in Predicate::DECLARED {
        writeln!(out, "    {}", predicate_declaration(pred)).unwrap();
    }
    writeln!(out, "  )").unwrap();
    writeln!(out, "  (:functions (total-cost))").unwrap();

    for op in &library.operators {
        let cost = op.cost.ok_or_else(|| PddlError::MissingCost(op.name()))?;
        for p in &op.params {
            if !hierarchy.contains(&p.ty) {
                return Err(PddlError::UnknownType(p.ty.clone()));
            }
        }
        let params: Vec<String> = op
            .params
            .iter()
            .map(|p| format!("{} - {}", p.name, p.ty))
            .collect();
        writeln!(out).unwrap();
        writeln!(out, "  (:action {}", op.name()).unwrap();
        writeln!(out, "    :parameters ({})", params.join(" ")).unwrap();
        if op.pre.is_empty() {
            writeln!(out, "    :precondition (and)").unwrap();
        } else {
            let lits: Vec<String> = op
                .pre
                .iter()
                .map(|l| format!("      {}", literal(l)))
                .collect();
            writeln!(out, "    :precondition (and\n{})", lits.join("\n")).unwrap();
        }
        let mut effects: Vec<String> = op.eff.iter().map(literal).collect();
        let mut var = "?x".to_string();
        let mut k = 0;
        while op.params.iter().any(|p| p.name == var) {
            k += 1;
            var = format!("?x{k}");
        }
        for rev in &op.revocations {
            effects.push(format!(
                "(forall ({var} - {WOODEN_CUBE}) (when (not (= {var} {})) (not ({} {} {var}))))",
                rev.keep,
                rev.pred.name(),
                rev.hand
            ));
        }
        effects.push(format!("(increase (total-cost) {cost})"));
        let effects: Vec<String> = effects.iter().map(|e| format!("      {e}")).collect();
        writeln!(out, "    :effect (and\n{})", effects.join("\n")).unwrap();
        writeln!(out, "  )").unwrap();
    }
    writeln!(out, ")").unwrap();
    Ok(PddlDocument {
        kind: DocKind::Domain,
        text: out,
    })
}

/// Problem file. Every goal literal must name registry instances.
pub fn emit_problem(
    problem: &PlanningProblem,
    name: &str,
    domain: &str,
) -> Result<PddlDocument, PddlError> {
    if problem.goal.is_empty() {
        return Err(crate::model::ModelError::EmptyGoal.into());
    }
    for lit in &problem.goal {
        lit.check_ground(&problem.registry)?;
    }
    let mut out = String::new();
    writeln!(out, "(define (problem {name})").unwrap();
    writeln!(out, "  (:domain {domain})").unwrap();
    writeln!(out, "  (:objects").unwrap();
    for inst in problem.registry.instances() {
        writeln!(out, "    {} - {}", inst.name, inst.ty).unwrap();
    }
    writeln!(out, "  )").unwrap();
    writeln!(out, "  (:init").unwrap();
    for atom in problem.init.atoms() {
        writeln!(out, "    ({} {})", atom.pred.name(), atom.args.join(" ")).unwrap();
    }
    writeln!(out, "    (= (total-cost) 0)").unwrap();
    writeln!(out, "  )").unwrap();
    writeln!(out, "  (:goal (and").unwrap();
    for lit in &problem.goal {
        writeln!(out, "    {}", literal(lit)).unwrap();
    }
    writeln!(out, "  ))").unwrap();
    writeln!(out, "  (:metric minimize (total-cost))").unwrap();
    writeln!(out, ")").unwrap();
    Ok(PddlDocument {
        kind: DocKind::Problem,
        text: out,
    })
}
