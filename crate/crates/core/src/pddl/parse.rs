use std::collections::BTreeSet;

use super::sexpr::{self, Sexpr};
use super::{PddlError, SUPPORTED_REQUIREMENTS};
use crate::model::{
    parse_operator_name, LearnedOperator, Literal, OperatorLibrary, Param, PlanningProblem,
    Predicate, Revocation, WorldState,
};
use crate::ontology::{
    EnvironmentRegistry, ObjectInstance, ObjectType, Role, TypeHierarchy, HAND, TABLE, THING,
    WOODEN_CUBE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedDomain {
    pub name: String,
    pub requirements: Vec<String>,
    pub hierarchy: TypeHierarchy,
    /// Operators in file order; counts are absent.
    pub library: OperatorLibrary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProblem {
    pub name: String,
    pub domain: String,
    /// Registry role is always `execution`; PDDL does not record it.
    pub problem: PlanningProblem,
}

fn items<'a>(e: &'a Sexpr, what: &str) -> Result<&'a [Sexpr], PddlError> {
    e.list().ok_or_else(|| e.error(format!("expected {what}")))
}

fn word<'a>(e: &'a Sexpr, what: &str) -> Result<&'a str, PddlError> {
    e.atom().ok_or_else(|| e.error(format!("expected {what}")))
}

/// `(define (<kind> NAME) sections...)`
fn header<'a>(doc: &'a Sexpr, kind: &str) -> Result<(String, &'a [Sexpr]), PddlError> {
    let top = items(doc, "`(define ...)`")?;
    if !top.first().is_some_and(|h| h.is("define")) {
        return Err(doc.error("expected `define`"));
    }
    let decl = top
        .get(1)
        .ok_or_else(|| doc.error(format!("missing `({kind} NAME)`")))?;
    let decl_items = items(decl, &format!("`({kind} NAME)`"))?;
    match decl_items {
        [k, name] if k.is(kind) => Ok((word(name, "a name")?.to_string(), &top[2..])),
        _ => Err(decl.error(format!("expected `({kind} NAME)`"))),
    }
}

/// `a b - T c - U` into (name, type) pairs.
fn typed_list(list: &[Sexpr]) -> Result<Vec<(String, String, &Sexpr)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<&Sexpr> = Vec::new();
    let mut i = 0;
    while i < list.len() {
        if list[i].is("-") {
            let ty_expr = list
                .get(i + 1)
                .ok_or_else(|| list[i].error("`-` without a type"))?;
            let ty = word(ty_expr, "a type name")?;
            if pending.is_empty() {
                return Err(list[i].error("type without names"));
            }
            for e in pending.drain(..) {
                out.push((word(e, "a name")?.to_string(), ty.to_string(), e));
            }
            i += 2;
        } else {
            pending.push(&list[i]);
            i += 1;
        }
    }
    if let Some(e) = pending.first() {
        return Err(e.error("every name needs a type"));
    }
    Ok(out)
}

fn canonical_type(name: &str, hierarchy: &TypeHierarchy, at: &Sexpr) -> Result<String, PddlError> {
    hierarchy
        .types()
        .map(|t| t.name)
        .find(|t| t.eq_ignore_ascii_case(name))
        .ok_or_else(|| at.error(format!("unknown type `{name}`")))
}

fn predicate(e: &Sexpr) -> Result<Predicate, PddlError> {
    let name = word(e, "a predicate name")?;
    name.parse::<Predicate>()
        .map_err(|_| e.error(format!("unknown predicate `{name}`")))
}

fn atom_parts(e: &Sexpr) -> Result<(Predicate, Vec<String>, bool), PddlError> {
    let list = items(e, "an atom")?;
    let head = list.first().ok_or_else(|| e.error("empty atom"))?;
    let args = list[1..]
        .iter()
        .map(|a| word(a, "an argument").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    // `(= a b)` is a negated neq
    let (pred, positive) = if head.is("=") {
        (Predicate::Neq, false)
    } else {
        (predicate(head)?, true)
    };
    if args.len() != pred.arity() {
        return Err(e.error(format!(
            "`{}` takes {} arguments, got {}",
            word(head, "")?,
            pred.arity(),
            args.len()
        )));
    }
    Ok((pred, args, positive))
}

fn literal(e: &Sexpr) -> Result<Literal, PddlError> {
    if e.head().as_deref() == Some("not") {
        let list = items(e, "`(not ...)`")?;
        let [_, inner] = list else {
            return Err(e.error("`not` takes one argument"));
        };
        let (pred, args, positive) = atom_parts(inner)?;
        Ok(Literal {
            pred,
            args,
            positive: !positive,
        })
    } else {
        let (pred, args, positive) = atom_parts(e)?;
        Ok(Literal {
            pred,
            args,
            positive,
        })
    }
}

/// `(and l...)` or a single element.
fn conjunction(e: &Sexpr) -> Result<&[Sexpr], PddlError> {
    if e.head().as_deref() == Some("and") {
        Ok(&items(e, "a conjunction")?[1..])
    } else {
        Ok(std::slice::from_ref(e))
    }
}

fn revocation(e: &Sexpr) -> Result<Revocation, PddlError> {
    let shape = "expected `(forall (?x - Wooden_cube) (when (not (= ?x ?c)) (not (p ?h ?x))))`";
    let list = items(e, "`forall`")?;
    let [_, vars, body] = list else {
        return Err(e.error(shape));
    };
    let vars = typed_list(items(vars, "a variable list")?)?;
    let [(var, ty, at)] = vars.as_slice() else {
        return Err(e.error(shape));
    };
    if !ty.eq_ignore_ascii_case(WOODEN_CUBE) {
        return Err(at.error(format!("revocations range over {WOODEN_CUBE}, not `{ty}`")));
    }
    let (Some("when"), Some([_, cond, eff])) = (body.head().as_deref(), body.list()) else {
        return Err(body.error(shape));
    };
    let cond = literal(cond)?;
    let eff = literal(eff)?;
    let keep = match (cond.pred, cond.positive, cond.args.as_slice()) {
        (Predicate::Neq, true, [a, b]) if a == var => b.clone(),
        (Predicate::Neq, true, [a, b]) if b == var => a.clone(),
        _ => return Err(body.error(shape)),
    };
    match (eff.pred, eff.positive, eff.args.as_slice()) {
        (Predicate::ActedOn | Predicate::Graspable, false, [hand, x]) if x == var => {
            Ok(Revocation {
                pred: eff.pred,
                hand: hand.clone(),
                keep,
            })
        }
        _ => Err(body.error(shape)),
    }
}

fn action(e: &Sexpr, hierarchy: &TypeHierarchy) -> Result<LearnedOperator, PddlError> {
    let list = items(e, "an action")?;
    let name_expr = list
        .get(1)
        .ok_or_else(|| e.error("action without a name"))?;
    let name = word(name_expr, "an action name")?;
    let (activity, config_index) = parse_operator_name(name).ok_or_else(|| {
        name_expr.error(format!(
            "`{name}` is not an activity name with optional index"
        ))
    })?;

    let mut params = Vec::new();
    let mut pre = BTreeSet::new();
    let mut eff = BTreeSet::new();
    let mut cost = None;
    let mut revocations = Vec::new();
    let mut rest = list[2..].iter();
    while let Some(key) = rest.next() {
        let value = rest
            .next()
            .ok_or_else(|| key.error("keyword without a value"))?;
        match word(key, "an action keyword")?
            .to_ascii_lowercase()
            .as_str()
        {
            ":parameters" => {
                for (name, ty, at) in typed_list(items(value, "a parameter list")?)? {
                    params.push(Param::new(name, canonical_type(&ty, hierarchy, at)?));
                }
            }
            ":precondition" => {
                for l in conjunction(value)? {
                    pre.insert(literal(l)?);
                }
            }
            ":effect" => {
                for part in conjunction(value)? {
                    match part.head().as_deref() {
                        Some("increase") => {
                            let parts = items(part, "`increase`")?;
                            let [_, f, amount] = parts else {
                                return Err(part.error("expected `(increase (total-cost) N)`"));
                            };
                            if f.head().as_deref() != Some("total-cost") {
                                return Err(f.error("only `total-cost` can be increased"));
                            }
                            let amount = word(amount, "a cost")?;
                            cost = Some(amount.parse::<u32>().map_err(|_| {
                                part.error(format!("cost `{amount}` is not a non-negative integer"))
                            })?);
                        }
                        Some("forall") => revocations.push(revocation(part)?),
                        _ => {
                            let lit = literal(part)?;
                            if lit.pred == Predicate::Neq {
                                return Err(part.error("equality cannot be an effect"));
                            }
                            eff.insert(lit);
                        }
                    }
                }
            }
            other => return Err(key.error(format!("unsupported action keyword `{other}`"))),
        }
    }
    revocations.sort();
    let op = LearnedOperator {
        activity,
        config_index,
        params,
        pre,
        eff,
        count: None,
        cost,
        revocations,
    };
    op.validate()?;
    Ok(op)
}

fn requirements(e: &Sexpr) -> Result<Vec<String>, PddlError> {
    let mut flags = Vec::new();
    for flag in &items(e, "requirements")?[1..] {
        let text = word(flag, "a requirement flag")?.to_ascii_lowercase();
        if !SUPPORTED_REQUIREMENTS.contains(&text.as_str()) {
            let (line, col) = flag.pos();
            return Err(PddlError::UnsupportedRequirement {
                flag: text,
                line,
                col,
            });
        }
        flags.push(text);
    }
    Ok(flags)
}

fn types(e: &Sexpr) -> Result<TypeHierarchy, PddlError> {
    let mut extra = Vec::new();
    for (name, parent, at) in typed_list(&items(e, "types")?[1..])? {
        let builtin = [WOODEN_CUBE, HAND, TABLE]
            .into_iter()
            .find(|b| b.eq_ignore_ascii_case(&name));
        match builtin {
            Some(_) if parent.eq_ignore_ascii_case(THING) => {}
            Some(b) => return Err(at.error(format!("`{b}` must be a subtype of {THING}"))),
            None if name.eq_ignore_ascii_case(THING) => {
                return Err(at.error(format!("`{THING}` is the root type")))
            }
            None => extra.push(ObjectType {
                name,
                parent: Some(parent),
            }),
        }
    }
    Ok(TypeHierarchy::with_extra(&extra)?)
}

fn check_predicates(e: &Sexpr) -> Result<(), PddlError> {
    for decl in &items(e, "predicates")?[1..] {
        let list = items(decl, "a predicate declaration")?;
        let head = list
            .first()
            .ok_or_else(|| decl.error("empty declaration"))?;
        let pred = predicate(head)?;
        let args = typed_list(&list[1..])?;
        if args.len() != pred.arity() || pred == Predicate::Neq {
            return Err(decl.error(format!("declaration of `{}` does not match", pred.name())));
        }
    }
    Ok(())
}

fn check_functions(e: &Sexpr) -> Result<(), PddlError> {
    for f in &items(e, "functions")?[1..] {
        if f.is("-") || f.is("number") {
            continue;
        }
        if f.head().as_deref() != Some("total-cost") {
            return Err(f.error("only `(total-cost)` is supported"));
        }
    }
    Ok(())
}

pub fn parse_domain(text: &str) -> Result<ParsedDomain, PddlError> {
    let doc = sexpr::parse(text)?;
    let (name, sections) = header(&doc, "domain")?;
    let mut hierarchy = TypeHierarchy::default();
    let mut reqs = Vec::new();
    let mut operators: Vec<LearnedOperator> = Vec::new();
    for section in sections {
        match section.head().as_deref() {
            Some(":requirements") => reqs = requirements(section)?,
            Some(":types") => hierarchy = types(section)?,
            Some(":predicates") => check_predicates(section)?,
            Some(":functions") => check_functions(section)?,
            Some(":action") => {
                let op = action(section, &hierarchy)?;
                if operators.iter().any(|o| o.name() == op.name()) {
                    return Err(section.error(format!("duplicate action `{}`", op.name())));
                }
                operators.push(op);
            }
            _ => return Err(section.error("unsupported domain section")),
        }
    }
    Ok(ParsedDomain {
        name,
        requirements: reqs,
        hierarchy,
        library: OperatorLibrary { operators },
    })
}

/// Parses a problem; object types resolve against `hierarchy`.
pub fn parse_problem(text: &str, hierarchy: &TypeHierarchy) -> Result<ParsedProblem, PddlError> {
    let doc = sexpr::parse(text)?;
    let (name, sections) = header(&doc, "problem")?;
    let mut domain = None;
    let mut instances = Vec::new();
    let mut init = Vec::new();
    let mut goal = Vec::new();
    for section in sections {
        let list = items(section, "a problem section")?;
        match section.head().as_deref() {
            Some(":domain") => match list {
                [_, d] => domain = Some(word(d, "a domain name")?.to_string()),
                _ => return Err(section.error("expected `(:domain NAME)`")),
            },
            Some(":objects") => {
                for (obj, ty, at) in typed_list(&list[1..])? {
                    instances.push(ObjectInstance::new(
                        obj,
                        canonical_type(&ty, hierarchy, at)?,
                    ));
                }
            }
            Some(":init") => {
                for fact in &list[1..] {
                    if fact.head().as_deref() == Some("=") {
                        match fact.list() {
                            Some([_, f, v])
                                if f.head().as_deref() == Some("total-cost") && v.is("0") =>
                            {
                                continue
                            }
                            _ => return Err(fact.error("only `(= (total-cost) 0)` is supported")),
                        }
                    }
                    let lit = literal(fact)?;
                    if !lit.positive || lit.pred == Predicate::Neq {
                        return Err(fact.error("initial state lists true atoms only"));
                    }
                    init.push(lit.atom());
                }
            }
            Some(":goal") => {
                let [_, g] = list else {
                    return Err(section.error("expected `(:goal FORMULA)`"));
                };
                for l in conjunction(g)? {
                    goal.push(literal(l)?);
                }
            }
            Some(":metric") => {
                let ok = matches!(list, [_, m, f] if m.is("minimize") && f.head().as_deref() == Some("total-cost"));
                if !ok {
                    return Err(section.error("expected `(:metric minimize (total-cost))`"));
                }
            }
            _ => return Err(section.error("unsupported problem section")),
        }
    }
    let domain = domain.ok_or_else(|| doc.error("missing `(:domain NAME)`"))?;
    let registry = EnvironmentRegistry::new(Role::Execution, hierarchy.clone(), instances)?;
    let problem = PlanningProblem::new(registry, WorldState::new(init), goal)?;
    Ok(ParsedProblem {
        name,
        domain,
        problem,
    })
}
